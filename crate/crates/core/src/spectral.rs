//! Spectral decomposition, functional calculus and the Loewner order.
//!
//! Matrix kinds go through a dense symmetric/Hermitian eigensolver. Spin factors
//! use the closed form `t +- |v|`. Albert elements solve the characteristic cubic
//! `x^3 - T x^2 + S x - N = 0` of the traceless part and build idempotents by
//! Lagrange interpolation in Jordan powers; when two roots nearly coincide the
//! extreme eigenvalues are recomputed from the left multiplication operator,
//! whose spectrum is `{l_i} u {(l_i + l_j) / 2}`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::algebra::{
    jordan_unchecked, AlbertMatrix, AlgebraDescriptor, AlgebraElement, AlgebraKind,
};
use crate::error::{Error, Result};

/// Relative distance below which eigenvalues are merged into one cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Eigenvalues below `DOMAIN_FLOOR * ||A||` are treated as zero by functions that
/// need a strictly positive spectrum.
pub const DOMAIN_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Distinct eigenvalues (cluster representatives), descending.
    pub eigenvalues: Vec<f64>,
    pub idempotents: Vec<AlgebraElement>,
    /// Number of raw eigenvalues merged into each cluster.
    pub multiplicity_clusters: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn descriptor(&self) -> AlgebraDescriptor {
        self.idempotents[0].descriptor()
    }

    /// Spectral norm `max |lambda_i|`.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `sum_i lambda_i e_i`.
    pub fn reconstruct(&self) -> AlgebraElement {
        self.combine(|l| l)
    }

    fn combine(&self, f: impl Fn(f64) -> f64) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.descriptor());
        for (&l, e) in self.eigenvalues.iter().zip(&self.idempotents) {
            out = out.add_scaled(f(l), e);
        }
        out
    }

    /// `f(A) = sum_i f(lambda_i) e_i` after checking the spectrum against the
    /// domain of `f`.
    pub fn apply(&self, f: &ScalarFunction) -> Result<AlgebraElement> {
        let norm = self.norm();
        let floor = DOMAIN_FLOOR * norm;
        let domain = f.domain();
        for &l in &self.eigenvalues {
            let ok = match domain {
                Domain::All => true,
                Domain::NonNegative => l >= -floor,
                Domain::NonZero => l.abs() > floor && l != 0.0,
                Domain::Positive => l > floor && l > 0.0,
            };
            if !ok {
                return Err(Error::SpectrumDomain {
                    function: f.to_string(),
                    eigenvalue: l,
                    hypothesis: None,
                });
            }
        }
        let mut out = AlgebraElement::zero(self.descriptor());
        for (&l, e) in self.eigenvalues.iter().zip(&self.idempotents) {
            let x = if domain == Domain::NonNegative {
                l.max(0.0)
            } else {
                l
            };
            let v = f.eval(x);
            if !v.is_finite() {
                return Err(Error::SpectrumDomain {
                    function: f.to_string(),
                    eigenvalue: l,
                    hypothesis: Some("function value is not finite".into()),
                });
            }
            out = out.add_scaled(v, e);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    All,
    NonNegative,
    /// Every eigenvalue bounded away from zero.
    NonZero,
    Positive,
}

/// A user supplied scalar function.
#[derive(Clone)]
pub struct CustomFn {
    pub name: String,
    pub domain: Domain,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Scalar functions applied through the functional calculus.
#[derive(Clone, Debug)]
pub enum ScalarFunction {
    /// `x^p`.
    Power(f64),
    Log,
    Inverse,
    Sqrt,
    /// `a + b x`.
    Affine(f64, f64),
    /// `((1 - l) + l / x)^{-1}`.
    HarmonicProfile(f64),
    Custom(CustomFn),
}

impl ScalarFunction {
    pub fn identity() -> Self {
        ScalarFunction::Affine(0.0, 1.0)
    }

    pub fn constant(c: f64) -> Self {
        ScalarFunction::Affine(c, 0.0)
    }

    pub fn custom(
        name: impl Into<String>,
        domain: Domain,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFunction::Custom(CustomFn {
            name: name.into(),
            domain,
            f: Arc::new(f),
        })
    }

    pub fn domain(&self) -> Domain {
        match self {
            ScalarFunction::Power(_) | ScalarFunction::Log | ScalarFunction::HarmonicProfile(_) => {
                Domain::Positive
            }
            ScalarFunction::Inverse => Domain::NonZero,
            ScalarFunction::Sqrt => Domain::NonNegative,
            ScalarFunction::Affine(..) => Domain::All,
            ScalarFunction::Custom(c) => c.domain,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ScalarFunction::Power(p) => {
                if *p == 0.0 {
                    1.0
                } else if *p == 1.0 {
                    x
                } else {
                    x.powf(*p)
                }
            }
            ScalarFunction::Log => x.ln(),
            ScalarFunction::Inverse => 1.0 / x,
            ScalarFunction::Sqrt => x.sqrt(),
            ScalarFunction::Affine(a, b) => a + b * x,
            ScalarFunction::HarmonicProfile(l) => 1.0 / ((1.0 - l) + l / x),
            ScalarFunction::Custom(c) => (c.f)(x),
        }
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFunction::Power(p) => write!(f, "x^{p}"),
            ScalarFunction::Log => write!(f, "log"),
            ScalarFunction::Inverse => write!(f, "x^-1"),
            ScalarFunction::Sqrt => write!(f, "sqrt"),
            ScalarFunction::Affine(a, b) => write!(f, "{a} + {b}x"),
            ScalarFunction::HarmonicProfile(l) => write!(f, "((1-{l}) + {l}/x)^-1"),
            ScalarFunction::Custom(c) => write!(f, "{}", c.name),
        }
    }
}

// ---------------------------------------------------------------------------
// eigenvalues

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// All eigenvalues with multiplicity, descending.
pub fn eigenvalues(a: &AlgebraElement) -> Vec<f64> {
    let c = a.coords();
    match a.descriptor().kind() {
        AlgebraKind::RealSymmetric(_) => sorted_desc(
            a.to_real_matrix()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect(),
        ),
        AlgebraKind::ComplexHermitian(_) => sorted_desc(
            a.to_complex_matrix()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect(),
        ),
        AlgebraKind::SpinFactor(_) => {
            let r = norm2(&c[1..]);
            vec![c[0] + r, c[0] - r]
        }
        AlgebraKind::Albert => albert_eigenvalues(a).to_vec(),
    }
}

pub fn min_eigenvalue(a: &AlgebraElement) -> f64 {
    *eigenvalues(a).last().expect("non-empty spectrum")
}

pub fn max_eigenvalue(a: &AlgebraElement) -> f64 {
    eigenvalues(a)[0]
}

/// The JB norm `max |lambda_i|`.
pub fn spectral_norm(a: &AlgebraElement) -> f64 {
    eigenvalues(a).iter().fold(0.0, |m, l| m.max(l.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    // hypot-style accumulation keeps tiny vectors from underflowing
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

/// Roots of `y^3 + p y + q` for `p <= 0` (three real roots), descending.
fn depressed_cubic_roots(p: f64, q: f64) -> [f64; 3] {
    if p >= 0.0 {
        return [0.0; 3];
    }
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let tau = 2.0 * std::f64::consts::PI / 3.0;
    let mut y = [
        r * theta.cos(),
        r * (theta - tau).cos(),
        r * (theta + tau).cos(),
    ];
    for yi in &mut y {
        for _ in 0..2 {
            let g = (*yi * *yi + p) * *yi + q;
            let dg = 3.0 * *yi * *yi + p;
            if dg.abs() > 1e-3 * p.abs() {
                *yi -= g / dg;
            }
        }
    }
    y.sort_by(|a, b| b.total_cmp(a));
    y
}

/// Matrix of `X -> A o X` in the (orthonormal) Albert coordinates.
fn albert_left_multiplication(a: &AlgebraElement) -> DMatrix<f64> {
    let desc = a.descriptor();
    let mut m = DMatrix::zeros(27, 27);
    for k in 0..27 {
        let mut basis = vec![0.0; 27];
        basis[k] = 1.0;
        let e = AlgebraElement::from_coords(desc, basis).expect("27 coordinates");
        let col = jordan_unchecked(a, &e);
        for (i, v) in col.coords().iter().enumerate() {
            m[(i, k)] = *v;
        }
    }
    (&m + m.transpose()).scale(0.5)
}

/// The three eigenvalues of an Albert element, descending.
pub(crate) fn albert_eigenvalues(a: &AlgebraElement) -> [f64; 3] {
    let c = a.coords();
    if c[3..].iter().all(|&x| x == 0.0) {
        let mut d = [c[0], c[1], c[2]];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let shift = a.trace() / 3.0;
    let a0 = a.shift(-shift);
    let fro2: f64 = a0.coords().iter().map(|c| c * c).sum();
    if fro2 == 0.0 {
        return [shift; 3];
    }
    // for traceless X: S(X) = -tr(X^2)/2 and tr(X^2) = |coords|^2
    let p = -0.5 * fro2;
    let q = -AlbertMatrix::from_coords(a0.coords()).determinant();
    let mut y = depressed_cubic_roots(p, q);
    let radius = (fro2 / 6.0).sqrt();
    let min_gap = (y[0] - y[1]).min(y[1] - y[2]);
    if min_gap < 1e-5 * radius {
        let l = albert_left_multiplication(&a0).symmetric_eigenvalues();
        let hi = l.max();
        let lo = l.min();
        y = [hi, -(hi + lo), lo];
        y.sort_by(|a, b| b.total_cmp(a));
    }
    [y[0] + shift, y[1] + shift, y[2] + shift]
}

/// Groups descending eigenvalues whose neighbours lie within `tol`; returns
/// `(representative, start, len)` per cluster.
fn clusters(values: &[f64], tol: f64) -> Vec<(f64, usize, usize)> {
    let mut out: Vec<(f64, usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i - 1] - values[i] > tol {
            let group = &values[start..i];
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            out.push((mean, start, i - start));
            start = i;
        }
    }
    out
}

/// Spectral decomposition of `a`. Eigenvalues closer than
/// `cluster_tol * ||a||` share one idempotent.
pub fn spectral_decompose(a: &AlgebraElement, cluster_tol: f64) -> SpectralDecomposition {
    let desc = a.descriptor();
    match desc.kind() {
        AlgebraKind::RealSymmetric(_) => {
            let eig = SymmetricEigen::new(a.to_real_matrix());
            let vectors = eig.eigenvectors.map(Complex::from);
            let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            matrix_decomposition(desc, &values, &vectors, cluster_tol)
        }
        AlgebraKind::ComplexHermitian(_) => {
            let eig = SymmetricEigen::new(a.to_complex_matrix());
            let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            matrix_decomposition(desc, &values, &eig.eigenvectors, cluster_tol)
        }
        AlgebraKind::SpinFactor(_) => spin_decomposition(a, cluster_tol),
        AlgebraKind::Albert => albert_decomposition(a, cluster_tol),
    }
}

fn matrix_decomposition(
    desc: AlgebraDescriptor,
    values: &[f64],
    vectors: &DMatrix<Complex<f64>>,
    cluster_tol: f64,
) -> SpectralDecomposition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let scale = sorted.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let n = values.len();
    let mut out = SpectralDecomposition {
        eigenvalues: Vec::new(),
        idempotents: Vec::new(),
        multiplicity_clusters: Vec::new(),
    };
    for (rep, start, len) in clusters(&sorted, cluster_tol * scale) {
        let mut p = DMatrix::from_element(n, n, Complex::new(0.0, 0.0));
        for &col in &order[start..start + len] {
            let v = vectors.column(col);
            p += v * v.adjoint();
        }
        let e = match desc.kind() {
            AlgebraKind::RealSymmetric(_) => AlgebraElement::from_real_matrix(&p.map(|z| z.re)),
            _ => AlgebraElement::from_complex_matrix(&p),
        }
        .expect("projector has matching size");
        out.eigenvalues.push(rep);
        out.idempotents.push(e);
        out.multiplicity_clusters.push(len);
    }
    out
}

fn spin_decomposition(a: &AlgebraElement, cluster_tol: f64) -> SpectralDecomposition {
    let desc = a.descriptor();
    let c = a.coords();
    let t = c[0];
    let r = norm2(&c[1..]);
    let scale = t.abs() + r;
    if 2.0 * r <= cluster_tol * scale || r == 0.0 {
        return SpectralDecomposition {
            eigenvalues: vec![t],
            idempotents: vec![AlgebraElement::identity(desc)],
            multiplicity_clusters: vec![2],
        };
    }
    let half = |sign: f64| {
        let mut coords = Vec::with_capacity(c.len());
        coords.push(0.5);
        coords.extend(c[1..].iter().map(|v| 0.5 * sign * v / r));
        AlgebraElement::from_coords(desc, coords).expect("same dimension")
    };
    SpectralDecomposition {
        eigenvalues: vec![t + r, t - r],
        idempotents: vec![half(1.0), half(-1.0)],
        multiplicity_clusters: vec![1, 1],
    }
}

fn albert_decomposition(a: &AlgebraElement, cluster_tol: f64) -> SpectralDecomposition {
    let desc = a.descriptor();
    let roots = albert_eigenvalues(a);
    let scale = roots.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let groups = clusters(&roots, cluster_tol * scale);
    let reps: Vec<f64> = groups.iter().map(|g| g.0).collect();
    let identity = AlgebraElement::identity(desc);
    let idempotents: Vec<AlgebraElement> = (0..reps.len())
        .map(|i| {
            // e_i = prod_{j != i} (A - l_j) / (l_i - l_j), computed inside the
            // associative subalgebra generated by A
            let mut e = identity.clone();
            for (j, &lj) in reps.iter().enumerate() {
                if j == i {
                    continue;
                }
                let factor = a.shift(-lj).scale(1.0 / (reps[i] - lj));
                e = jordan_unchecked(&e, &factor);
            }
            e
        })
        .collect();
    SpectralDecomposition {
        eigenvalues: reps,
        idempotents,
        multiplicity_clusters: groups.iter().map(|g| g.2).collect(),
    }
}

/// `f(A)` by functional calculus.
pub fn apply_function(
    a: &AlgebraElement,
    f: &ScalarFunction,
    cluster_tol: f64,
) -> Result<AlgebraElement> {
    spectral_decompose(a, cluster_tol).apply(f)
}

/// `A^{-1}` by functional calculus with the default cluster tolerance.
pub fn inverse(a: &AlgebraElement) -> Result<AlgebraElement> {
    apply_function(a, &ScalarFunction::Inverse, DEFAULT_CLUSTER_TOL)
}

/// True iff the smallest eigenvalue is at least `-tol * max(1, ||A||)`.
pub fn is_positive(a: &AlgebraElement, tol: f64) -> bool {
    let ev = eigenvalues(a);
    let norm = ev.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    *ev.last().expect("non-empty") >= -tol * norm.max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoewnerVerdict {
    /// `B - A` has non-negative spectrum.
    Holds,
    /// Smallest eigenvalue of `B - A` is negative but within the tolerance band.
    Marginal,
    Fails,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoewnerReport {
    pub min_eig_of_difference: f64,
    /// `||A|| + ||B||`.
    pub scale: f64,
    pub verdict: LoewnerVerdict,
    pub tolerance: f64,
}

impl LoewnerReport {
    /// `A <= B` up to the tolerance (`Holds` or `Marginal`).
    pub fn holds(&self) -> bool {
        self.verdict != LoewnerVerdict::Fails
    }

    /// Smallest eigenvalue of `B - A` relative to `||A|| + ||B||`.
    pub fn margin(&self) -> f64 {
        self.min_eig_of_difference / effective_scale(self.scale)
    }
}

fn effective_scale(scale: f64) -> f64 {
    if scale > 0.0 {
        scale
    } else {
        1.0
    }
}

/// Tests `A <= B`, i.e. positivity of `B - A`, relative to `||A|| + ||B||`.
pub fn loewner_leq(a: &AlgebraElement, b: &AlgebraElement, tol: f64) -> Result<LoewnerReport> {
    a.check_same(b)?;
    let min_eig = min_eigenvalue(&(b - a));
    let scale = spectral_norm(a) + spectral_norm(b);
    let band = tol * effective_scale(scale);
    let verdict = if min_eig >= 0.0 {
        LoewnerVerdict::Holds
    } else if min_eig >= -band {
        LoewnerVerdict::Marginal
    } else {
        LoewnerVerdict::Fails
    };
    Ok(LoewnerReport {
        min_eig_of_difference: min_eig,
        scale,
        verdict,
        tolerance: tol,
    })
}
