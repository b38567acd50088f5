//! The supported Euclidean Jordan algebras and their elements.
//!
//! Every element is a real coordinate vector in a fixed basis:
//!
//! * `RealSymmetric(n)`: upper triangle in row-major order, diagonal entries as
//!   they are and off-diagonal entries scaled by `sqrt(2)`; `n(n+1)/2` coordinates.
//! * `ComplexHermitian(n)`: same traversal, an off-diagonal entry contributes its
//!   real and imaginary parts, both scaled by `sqrt(2)`; `n^2` coordinates.
//! * `SpinFactor(d)`: `(s, u_1, .., u_d)`; `d + 1` coordinates.
//! * `Albert`: the three real diagonal entries, then the octonion entries at
//!   `(1,2)`, `(1,3)`, `(2,3)` scaled by `sqrt(2)`; 27 coordinates.
//!
//! For the three matrix kinds the basis is orthonormal for the trace form
//! `<a, b> = tr(a o b)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::octonion::Octonion;
use crate::spectral;

pub type Rng = ChaCha8Rng;

const SQRT2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    RealSymmetric(usize),
    ComplexHermitian(usize),
    SpinFactor(usize),
    Albert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "DescriptorRepr", into = "DescriptorRepr")]
pub struct AlgebraDescriptor {
    kind: AlgebraKind,
}

#[derive(Serialize, Deserialize)]
struct DescriptorRepr {
    kind: String,
    n_or_d: usize,
}

impl TryFrom<DescriptorRepr> for AlgebraDescriptor {
    type Error = Error;
    fn try_from(r: DescriptorRepr) -> Result<Self> {
        AlgebraDescriptor::from_parts(&r.kind, r.n_or_d)
    }
}

impl From<AlgebraDescriptor> for DescriptorRepr {
    fn from(d: AlgebraDescriptor) -> Self {
        DescriptorRepr {
            kind: d.name().to_string(),
            n_or_d: d.order(),
        }
    }
}

impl AlgebraDescriptor {
    pub fn new(kind: AlgebraKind) -> Result<Self> {
        match kind {
            AlgebraKind::RealSymmetric(0)
            | AlgebraKind::ComplexHermitian(0)
            | AlgebraKind::SpinFactor(0) => Err(Error::Domain(format!(
                "{kind:?}: size parameter must be at least 1"
            ))),
            _ => Ok(Self { kind }),
        }
    }

    /// # Panics
    /// If `n == 0`.
    pub fn real_symmetric(n: usize) -> Self {
        Self::new(AlgebraKind::RealSymmetric(n)).expect("n >= 1")
    }

    /// # Panics
    /// If `n == 0`.
    pub fn complex_hermitian(n: usize) -> Self {
        Self::new(AlgebraKind::ComplexHermitian(n)).expect("n >= 1")
    }

    /// # Panics
    /// If `d == 0`.
    pub fn spin_factor(d: usize) -> Self {
        Self::new(AlgebraKind::SpinFactor(d)).expect("d >= 1")
    }

    pub fn albert() -> Self {
        Self {
            kind: AlgebraKind::Albert,
        }
    }

    /// Builds a descriptor from its serialized `(kind, n_or_d)` pair.
    pub fn from_parts(name: &str, n_or_d: usize) -> Result<Self> {
        let kind = match name {
            "real_symmetric" | "sym" => AlgebraKind::RealSymmetric(n_or_d),
            "complex_hermitian" | "herm" => AlgebraKind::ComplexHermitian(n_or_d),
            "spin_factor" | "spin" => AlgebraKind::SpinFactor(n_or_d),
            "albert" => {
                if n_or_d != 3 {
                    return Err(Error::Domain(format!(
                        "albert algebra has n_or_d = 3, got {n_or_d}"
                    )));
                }
                AlgebraKind::Albert
            }
            other => return Err(Error::Domain(format!("unknown algebra kind '{other}'"))),
        };
        Self::new(kind)
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            AlgebraKind::RealSymmetric(_) => "real_symmetric",
            AlgebraKind::ComplexHermitian(_) => "complex_hermitian",
            AlgebraKind::SpinFactor(_) => "spin_factor",
            AlgebraKind::Albert => "albert",
        }
    }

    /// Matrix size `n`, spin-factor vector dimension `d`, or 3 for the Albert algebra.
    pub fn order(&self) -> usize {
        match self.kind {
            AlgebraKind::RealSymmetric(n) | AlgebraKind::ComplexHermitian(n) => n,
            AlgebraKind::SpinFactor(d) => d,
            AlgebraKind::Albert => 3,
        }
    }

    /// Real vector-space dimension.
    pub fn dimension(&self) -> usize {
        match self.kind {
            AlgebraKind::RealSymmetric(n) => n * (n + 1) / 2,
            AlgebraKind::ComplexHermitian(n) => n * n,
            AlgebraKind::SpinFactor(d) => d + 1,
            AlgebraKind::Albert => 27,
        }
    }

    /// Number of idempotents in a complete frame.
    pub fn rank(&self) -> usize {
        match self.kind {
            AlgebraKind::RealSymmetric(n) | AlgebraKind::ComplexHermitian(n) => n,
            AlgebraKind::SpinFactor(_) => 2,
            AlgebraKind::Albert => 3,
        }
    }

    pub fn is_special_matrix(&self) -> bool {
        matches!(
            self.kind,
            AlgebraKind::RealSymmetric(_) | AlgebraKind::ComplexHermitian(_)
        )
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::Albert => write!(f, "albert"),
            _ => write!(f, "{}:{}", self.name(), self.order()),
        }
    }
}

/// Parses `albert` or `<kind>:<n>` with kind one of `real_symmetric` (`sym`),
/// `complex_hermitian` (`herm`), `spin_factor` (`spin`).
impl FromStr for AlgebraDescriptor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "albert" {
            return Ok(Self::albert());
        }
        let (name, n) = s.split_once(':').ok_or_else(|| {
            Error::Domain(format!("expected '<kind>:<n>' or 'albert', got '{s}'"))
        })?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::Domain(format!("bad size in algebra spec '{s}'")))?;
        Self::from_parts(name, n)
    }
}

/// An element of one of the supported algebras.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct AlgebraElement {
    descriptor: AlgebraDescriptor,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    kind: String,
    n_or_d: usize,
    coords: Vec<f64>,
}

impl TryFrom<ElementRepr> for AlgebraElement {
    type Error = Error;
    fn try_from(r: ElementRepr) -> Result<Self> {
        let desc = AlgebraDescriptor::from_parts(&r.kind, r.n_or_d)?;
        AlgebraElement::from_coords(desc, r.coords)
    }
}

impl From<AlgebraElement> for ElementRepr {
    fn from(e: AlgebraElement) -> Self {
        ElementRepr {
            kind: e.descriptor.name().to_string(),
            n_or_d: e.descriptor.order(),
            coords: e.coords,
        }
    }
}

impl AlgebraElement {
    pub fn from_coords(descriptor: AlgebraDescriptor, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != descriptor.dimension() {
            return Err(Error::Domain(format!(
                "{descriptor} expects {} coordinates, got {}",
                descriptor.dimension(),
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { descriptor, coords })
    }

    pub fn zero(descriptor: AlgebraDescriptor) -> Self {
        Self {
            descriptor,
            coords: vec![0.0; descriptor.dimension()],
        }
    }

    pub fn identity(descriptor: AlgebraDescriptor) -> Self {
        Self::scalar(descriptor, 1.0)
    }

    /// `value * I`.
    pub fn scalar(descriptor: AlgebraDescriptor, value: f64) -> Self {
        let mut e = Self::zero(descriptor);
        match descriptor.kind {
            AlgebraKind::RealSymmetric(n) => {
                for i in 0..n {
                    e.coords[sym_index(n, i, i)] = value;
                }
            }
            AlgebraKind::ComplexHermitian(n) => {
                for i in 0..n {
                    e.coords[herm_diag_index(n, i)] = value;
                }
            }
            AlgebraKind::SpinFactor(_) => e.coords[0] = value,
            AlgebraKind::Albert => e.coords[..3].fill(value),
        }
        e
    }

    /// Real symmetric matrix as an element of `RealSymmetric(n)`. The input is
    /// symmetrized.
    pub fn from_real_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Domain("expected a non-empty square matrix".into()));
        }
        let desc = AlgebraDescriptor::real_symmetric(m.nrows());
        Self::from_coords(desc, sym_from_matrix(m))
    }

    /// Hermitian matrix as an element of `ComplexHermitian(n)`. The input is
    /// Hermitian-symmetrized.
    pub fn from_complex_matrix(m: &DMatrix<Complex<f64>>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Domain("expected a non-empty square matrix".into()));
        }
        let desc = AlgebraDescriptor::complex_hermitian(m.nrows());
        Self::from_coords(desc, herm_from_matrix(m))
    }

    /// Real diagonal matrix in `RealSymmetric(n)`.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_real_matrix(&DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(values),
        ))
    }

    /// Spin-factor element `(s, u)`.
    pub fn spin(s: f64, u: &[f64]) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::Domain("spin factor needs d >= 1".into()));
        }
        let mut coords = Vec::with_capacity(u.len() + 1);
        coords.push(s);
        coords.extend_from_slice(u);
        Self::from_coords(AlgebraDescriptor::spin_factor(u.len()), coords)
    }

    /// Albert element from diagonal `(d1, d2, d3)` and the octonion entries at
    /// `(1,2)`, `(1,3)`, `(2,3)`.
    pub fn albert(diag: [f64; 3], upper: [Octonion; 3]) -> Self {
        AlbertMatrix { diag, upper }.to_element()
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        self.descriptor
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            descriptor: self.descriptor,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s * other`.
    ///
    /// # Panics
    /// On descriptor mismatch.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        self.assert_same(other);
        Self {
            descriptor: self.descriptor,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    /// `self + value * I`.
    pub fn shift(&self, value: f64) -> Self {
        self.add_scaled(value, &Self::identity(self.descriptor))
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.assert_same(other);
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Euclidean norm of the coordinate vector.
    pub fn coord_norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Generic trace: sum of the eigenvalues counted with multiplicity.
    pub fn trace(&self) -> f64 {
        match self.descriptor.kind {
            AlgebraKind::RealSymmetric(n) => (0..n).map(|i| self.coords[sym_index(n, i, i)]).sum(),
            AlgebraKind::ComplexHermitian(n) => {
                (0..n).map(|i| self.coords[herm_diag_index(n, i)]).sum()
            }
            AlgebraKind::SpinFactor(_) => 2.0 * self.coords[0],
            AlgebraKind::Albert => self.coords[..3].iter().sum(),
        }
    }

    pub fn jordan_square(&self) -> Self {
        jordan_unchecked(self, self)
    }

    /// Jordan power `A^k` for `k >= 0`.
    pub fn jordan_pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.descriptor);
        for _ in 0..k {
            out = jordan_unchecked(&out, self);
        }
        out
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.descriptor != other.descriptor {
            return Err(Error::DescriptorMismatch {
                left: self.descriptor,
                right: other.descriptor,
            });
        }
        Ok(())
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(
            self.descriptor, other.descriptor,
            "algebra descriptor mismatch"
        );
    }

    pub(crate) fn to_real_matrix(&self) -> DMatrix<f64> {
        match self.descriptor.kind {
            AlgebraKind::RealSymmetric(n) => sym_to_matrix(n, &self.coords),
            _ => unreachable!("not a real symmetric element"),
        }
    }

    pub(crate) fn to_complex_matrix(&self) -> DMatrix<Complex<f64>> {
        match self.descriptor.kind {
            AlgebraKind::ComplexHermitian(n) => herm_to_matrix(n, &self.coords),
            _ => unreachable!("not a complex Hermitian element"),
        }
    }

    /// Real symmetric or Hermitian matrix form for the two matrix kinds.
    pub fn as_complex_matrix(&self) -> Option<DMatrix<Complex<f64>>> {
        match self.descriptor.kind {
            AlgebraKind::RealSymmetric(_) => Some(self.to_real_matrix().map(Complex::from)),
            AlgebraKind::ComplexHermitian(_) => Some(self.to_complex_matrix()),
            _ => None,
        }
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.add_scaled(-1.0, rhs)
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl Mul<&AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        rhs.scale(self)
    }
}

impl Mul<AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: AlgebraElement) -> AlgebraElement {
        rhs.scale(self)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}

// ---------------------------------------------------------------------------
// coordinate maps

fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows r < i contribute n - r entries each
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

fn herm_diag_index(n: usize, i: usize) -> usize {
    // position of the diagonal entry (i, i): each earlier row r contributes
    // 1 + 2 (n - r - 1) coordinates
    (0..i).map(|r| 1 + 2 * (n - r - 1)).sum()
}

fn sym_to_matrix(n: usize, coords: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        m[(i, i)] = coords[k];
        k += 1;
        for j in i + 1..n {
            let v = coords[k] * FRAC_1_SQRT2;
            m[(i, j)] = v;
            m[(j, i)] = v;
            k += 1;
        }
    }
    m
}

fn sym_from_matrix(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coords = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        coords.push(m[(i, i)]);
        for j in i + 1..n {
            coords.push(0.5 * (m[(i, j)] + m[(j, i)]) * SQRT2);
        }
    }
    coords
}

fn herm_to_matrix(n: usize, coords: &[f64]) -> DMatrix<Complex<f64>> {
    let mut m = DMatrix::from_element(n, n, Complex::new(0.0, 0.0));
    let mut k = 0;
    for i in 0..n {
        m[(i, i)] = Complex::new(coords[k], 0.0);
        k += 1;
        for j in i + 1..n {
            let v = Complex::new(coords[k], coords[k + 1]) * FRAC_1_SQRT2;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
            k += 2;
        }
    }
    m
}

fn herm_from_matrix(m: &DMatrix<Complex<f64>>) -> Vec<f64> {
    let n = m.nrows();
    let mut coords = Vec::with_capacity(n * n);
    for i in 0..n {
        coords.push(m[(i, i)].re);
        for j in i + 1..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5 * SQRT2;
            coords.push(v.re);
            coords.push(v.im);
        }
    }
    coords
}

/// 3x3 Hermitian octonion matrix, stored as diagonal plus the upper entries
/// `(0,1)`, `(0,2)`, `(1,2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct AlbertMatrix {
    pub diag: [f64; 3],
    pub upper: [Octonion; 3],
}

impl AlbertMatrix {
    const UPPER: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

    pub fn from_coords(coords: &[f64]) -> Self {
        let mut upper = [Octonion::ZERO; 3];
        for (k, u) in upper.iter_mut().enumerate() {
            let start = 3 + 8 * k;
            let mut c = [0.0; 8];
            c.copy_from_slice(&coords[start..start + 8]);
            *u = Octonion::new(c).scale(FRAC_1_SQRT2);
        }
        Self {
            diag: [coords[0], coords[1], coords[2]],
            upper,
        }
    }

    pub fn to_element(self) -> AlgebraElement {
        let mut coords = Vec::with_capacity(27);
        coords.extend_from_slice(&self.diag);
        for u in &self.upper {
            coords.extend(u.scale(SQRT2).coords);
        }
        AlgebraElement {
            descriptor: AlgebraDescriptor::albert(),
            coords,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Octonion {
        match (i, j) {
            _ if i == j => Octonion::real(self.diag[i]),
            (0, 1) => self.upper[0],
            (0, 2) => self.upper[1],
            (1, 2) => self.upper[2],
            (1, 0) => self.upper[0].conj(),
            (2, 0) => self.upper[1].conj(),
            (2, 1) => self.upper[2].conj(),
            _ => unreachable!(),
        }
    }

    fn full(&self) -> [[Octonion; 3]; 3] {
        let mut m = [[Octonion::ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.entry(i, j);
            }
        }
        m
    }

    /// `(XY + YX) / 2`, entry by entry.
    pub fn jordan(&self, other: &Self) -> Self {
        let x = self.full();
        let y = other.full();
        let sym_entry = |i: usize, j: usize| {
            let mut acc = Octonion::ZERO;
            for k in 0..3 {
                acc += x[i][k] * y[k][j];
                acc += y[i][k] * x[k][j];
            }
            acc.scale(0.5)
        };
        let mut diag = [0.0; 3];
        for (i, d) in diag.iter_mut().enumerate() {
            *d = sym_entry(i, i).re();
        }
        let mut upper = [Octonion::ZERO; 3];
        for (u, &(i, j)) in upper.iter_mut().zip(Self::UPPER.iter()) {
            *u = sym_entry(i, j);
        }
        Self { diag, upper }
    }

    /// Freudenthal determinant
    /// `d1 d2 d3 - d1 |a23|^2 - d2 |a13|^2 - d3 |a12|^2 + 2 Re(a12 a23 a31)`.
    pub fn determinant(&self) -> f64 {
        let [d1, d2, d3] = self.diag;
        let [a12, a13, a23] = self.upper;
        let a31 = a13.conj();
        d1 * d2 * d3 - d1 * a23.norm_sqr() - d2 * a13.norm_sqr() - d3 * a12.norm_sqr()
            + 2.0 * ((a12 * a23) * a31).re()
    }
}

fn spin_jordan(a: &[f64], b: &[f64]) -> Vec<f64> {
    let (s, u) = (a[0], &a[1..]);
    let (t, v) = (b[0], &b[1..]);
    let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
    let mut out = Vec::with_capacity(a.len());
    out.push(s * t + dot);
    out.extend(u.iter().zip(v).map(|(ui, vi)| s * vi + t * ui));
    out
}

pub(crate) fn jordan_unchecked(a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    let descriptor = a.descriptor;
    let coords = match descriptor.kind {
        AlgebraKind::RealSymmetric(n) => {
            let x = sym_to_matrix(n, &a.coords);
            let y = sym_to_matrix(n, &b.coords);
            let p = &x * &y;
            sym_from_matrix(&(&p + p.transpose()).scale(0.5))
        }
        AlgebraKind::ComplexHermitian(n) => {
            let x = herm_to_matrix(n, &a.coords);
            let y = herm_to_matrix(n, &b.coords);
            let p = &x * &y;
            herm_from_matrix(&(&p + p.adjoint()).scale(0.5))
        }
        AlgebraKind::SpinFactor(_) => spin_jordan(&a.coords, &b.coords),
        AlgebraKind::Albert => {
            let x = AlbertMatrix::from_coords(&a.coords);
            let y = AlbertMatrix::from_coords(&b.coords);
            return x.jordan(&y).to_element();
        }
    };
    AlgebraElement { descriptor, coords }
}

/// Jordan product `A o B`.
pub fn jordan_product(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_same(b)?;
    Ok(jordan_unchecked(a, b))
}

pub(crate) fn quadratic_unchecked(a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    let ab = jordan_unchecked(a, b);
    let first = jordan_unchecked(&ab, a);
    let second = jordan_unchecked(&a.jordan_square(), b);
    first.scale(2.0).add_scaled(-1.0, &second)
}

/// Quadratic representation `U_A(B) = {ABA} = 2 (A o B) o A - A^2 o B`.
pub fn quadratic_map(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_same(b)?;
    Ok(quadratic_unchecked(a, b))
}

/// The literal matrix product `A B A`, for the two matrix kinds only.
pub fn associative_triple(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_same(b)?;
    match a.descriptor.kind {
        AlgebraKind::RealSymmetric(_) => {
            let x = a.to_real_matrix();
            let y = b.to_real_matrix();
            AlgebraElement::from_coords(a.descriptor, sym_from_matrix(&(&x * &y * &x)))
        }
        AlgebraKind::ComplexHermitian(_) => {
            let x = a.to_complex_matrix();
            let y = b.to_complex_matrix();
            AlgebraElement::from_coords(a.descriptor, herm_from_matrix(&(&x * &y * &x)))
        }
        _ => Err(Error::Domain(format!(
            "associative triple product needs a matrix algebra, got {}",
            a.descriptor
        ))),
    }
}

// ---------------------------------------------------------------------------
// random generation

/// Bounds and seed for [`random_positive`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositiveGenSpec {
    pub spectrum_low: f64,
    pub spectrum_high: f64,
    pub seed: u64,
}

impl PositiveGenSpec {
    pub fn new(spectrum_low: f64, spectrum_high: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            spectrum_low,
            spectrum_high,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spectrum_low > 0.0 && self.spectrum_low <= self.spectrum_high)
            || !self.spectrum_high.is_finite()
        {
            return Err(Error::Domain(format!(
                "need 0 < low <= high, got [{}, {}]",
                self.spectrum_low, self.spectrum_high
            )));
        }
        Ok(())
    }
}

pub fn rng_from_seed(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}

/// Element with independent standard normal coordinates.
pub fn random_gaussian(desc: AlgebraDescriptor, rng: &mut Rng) -> AlgebraElement {
    let coords = (0..desc.dimension())
        .map(|_| StandardNormal.sample(rng))
        .collect();
    AlgebraElement {
        descriptor: desc,
        coords,
    }
}

/// A complete frame of `rank` orthogonal primitive idempotents, taken from the
/// spectral decomposition of a Gaussian element with well separated eigenvalues.
pub fn random_frame(desc: AlgebraDescriptor, rng: &mut Rng) -> Vec<AlgebraElement> {
    if desc.rank() == 1 {
        return vec![AlgebraElement::identity(desc)];
    }
    loop {
        let x = random_gaussian(desc, rng);
        let dec = spectral::spectral_decompose(&x, spectral::DEFAULT_CLUSTER_TOL);
        if dec.idempotents.len() != desc.rank() {
            continue;
        }
        let scale = dec.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let min_gap = dec
            .eigenvalues
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        if min_gap > 1e-2 * scale {
            return dec.idempotents;
        }
    }
}

/// `sum_i lambda_i e_i` for the given frame.
pub fn resum_frame(frame: &[AlgebraElement], values: &[f64]) -> AlgebraElement {
    assert_eq!(frame.len(), values.len());
    let mut out = AlgebraElement::zero(frame[0].descriptor);
    for (e, &l) in frame.iter().zip(values) {
        out = out.add_scaled(l, e);
    }
    out
}

/// Positive element with eigenvalues drawn log-uniformly from `[low, high]` over
/// a random frame.
pub fn random_positive_with(
    desc: AlgebraDescriptor,
    low: f64,
    high: f64,
    rng: &mut Rng,
) -> AlgebraElement {
    let frame = random_frame(desc, rng);
    let (ll, lh) = (low.ln(), high.ln());
    let values: Vec<f64> = (0..frame.len())
        .map(|_| {
            if lh > ll {
                rng.random_range(ll..=lh).exp().clamp(low, high)
            } else {
                low
            }
        })
        .collect();
    resum_frame(&frame, &values)
}

/// Deterministic positive invertible element with spectrum in
/// `[spec.spectrum_low, spec.spectrum_high]`.
pub fn random_positive(desc: AlgebraDescriptor, spec: &PositiveGenSpec) -> AlgebraElement {
    let mut rng = rng_from_seed(spec.seed);
    random_positive_with(desc, spec.spectrum_low, spec.spectrum_high, &mut rng)
}

/// Invertible element, generally indefinite, with `|lambda_i|` in `[0.5, 2]`.
pub fn random_invertible(desc: AlgebraDescriptor, rng: &mut Rng) -> AlgebraElement {
    let frame = random_frame(desc, rng);
    let values: Vec<f64> = (0..frame.len())
        .map(|_| {
            let m = rng.random_range(0.5..=2.0);
            if rng.random_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    resum_frame(&frame, &values)
}
