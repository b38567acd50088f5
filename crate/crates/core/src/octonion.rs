//! Real octonions.
//!
//! Basis `e0 = 1, e1..e7`. The product is the Cayley–Dickson doubling of the
//! quaternions `(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))` with `e4` as the
//! doubling unit, so `e1, e2, e3` are the quaternion units `i, j, k` and
//! `e5, e6, e7 = e1 e4, e2 e4, e3 e4`. The resulting basis products are stored in
//! [`MUL_TABLE`].

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `MUL_TABLE[i][j] = (k, s)` means `e_i * e_j = s * e_k`.
pub const MUL_TABLE: [[(usize, i8); 8]; 8] = [
    [
        (0, 1),
        (1, 1),
        (2, 1),
        (3, 1),
        (4, 1),
        (5, 1),
        (6, 1),
        (7, 1),
    ],
    [
        (1, 1),
        (0, -1),
        (3, 1),
        (2, -1),
        (5, 1),
        (4, -1),
        (7, -1),
        (6, 1),
    ],
    [
        (2, 1),
        (3, -1),
        (0, -1),
        (1, 1),
        (6, 1),
        (7, 1),
        (4, -1),
        (5, -1),
    ],
    [
        (3, 1),
        (2, 1),
        (1, -1),
        (0, -1),
        (7, 1),
        (6, -1),
        (5, 1),
        (4, -1),
    ],
    [
        (4, 1),
        (5, -1),
        (6, -1),
        (7, -1),
        (0, -1),
        (1, 1),
        (2, 1),
        (3, 1),
    ],
    [
        (5, 1),
        (4, 1),
        (7, -1),
        (6, 1),
        (1, -1),
        (0, -1),
        (3, -1),
        (2, 1),
    ],
    [
        (6, 1),
        (7, 1),
        (4, 1),
        (5, -1),
        (2, -1),
        (3, 1),
        (0, -1),
        (1, -1),
    ],
    [
        (7, 1),
        (6, -1),
        (5, 1),
        (4, 1),
        (3, -1),
        (2, -1),
        (1, 1),
        (0, -1),
    ],
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Octonion {
    pub coords: [f64; 8],
}

impl Octonion {
    pub const ZERO: Octonion = Octonion { coords: [0.0; 8] };
    pub const ONE: Octonion = Octonion {
        coords: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    };

    pub fn new(coords: [f64; 8]) -> Self {
        Self { coords }
    }

    pub fn real(r: f64) -> Self {
        let mut coords = [0.0; 8];
        coords[0] = r;
        Self { coords }
    }

    /// Basis unit `e_i`.
    pub fn unit(i: usize) -> Self {
        assert!(i < 8, "octonion basis index {i} out of range");
        let mut coords = [0.0; 8];
        coords[i] = 1.0;
        Self { coords }
    }

    pub fn re(&self) -> f64 {
        self.coords[0]
    }

    pub fn conj(&self) -> Self {
        let mut coords = self.coords;
        for c in &mut coords[1..] {
            *c = -*c;
        }
        Self { coords }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `conj(x) / |x|^2`; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return None;
        }
        Some(self.conj().scale(1.0 / n2))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut coords = self.coords;
        for c in &mut coords {
            *c *= s;
        }
        Self { coords }
    }

    /// Real part of `x * conj(y)`, i.e. the Euclidean inner product of coordinates.
    pub fn dot(&self, rhs: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl Add for Octonion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut coords = self.coords;
        for (c, r) in coords.iter_mut().zip(rhs.coords) {
            *c += r;
        }
        Self { coords }
    }
}

impl AddAssign for Octonion {
    fn add_assign(&mut self, rhs: Self) {
        for (c, r) in self.coords.iter_mut().zip(rhs.coords) {
            *c += r;
        }
    }
}

impl Sub for Octonion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut coords = self.coords;
        for (c, r) in coords.iter_mut().zip(rhs.coords) {
            *c -= r;
        }
        Self { coords }
    }
}

impl Neg for Octonion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Octonion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [0.0; 8];
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coords.iter().enumerate() {
                let (k, s) = MUL_TABLE[i][j];
                out[k] += f64::from(s) * a * b;
            }
        }
        Self { coords: out }
    }
}

impl Mul<f64> for Octonion {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Quat = [f64; 4];

    fn qmul(x: Quat, y: Quat) -> Quat {
        [
            x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
            x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
            x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
            x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0],
        ]
    }

    fn qconj(x: Quat) -> Quat {
        [x[0], -x[1], -x[2], -x[3]]
    }

    /// Reference product straight from the doubling formula.
    fn doubling_mul(x: &Octonion, y: &Octonion) -> Octonion {
        let split = |o: &Octonion| -> (Quat, Quat) {
            let c = o.coords;
            ([c[0], c[1], c[2], c[3]], [c[4], c[5], c[6], c[7]])
        };
        let (a, b) = split(x);
        let (c, d) = split(y);
        let ac = qmul(a, c);
        let db = qmul(qconj(d), b);
        let da = qmul(d, a);
        let bc = qmul(b, qconj(c));
        let mut out = [0.0; 8];
        for i in 0..4 {
            out[i] = ac[i] - db[i];
            out[i + 4] = da[i] + bc[i];
        }
        Octonion::new(out)
    }

    fn octonion() -> impl Strategy<Value = Octonion> {
        prop::array::uniform8(-2.0f64..2.0).prop_map(Octonion::new)
    }

    fn close(a: &Octonion, b: &Octonion, scale: f64) -> bool {
        (*a - *b).norm() <= 1e-12 * scale.max(1.0)
    }

    #[test]
    fn table_matches_doubling_formula() {
        for i in 0..8 {
            for j in 0..8 {
                let got = Octonion::unit(i) * Octonion::unit(j);
                let want = doubling_mul(&Octonion::unit(i), &Octonion::unit(j));
                assert_eq!(got, want, "e{i} * e{j}");
            }
        }
    }

    #[test]
    fn basis_examples() {
        let e1 = Octonion::unit(1);
        let e2 = Octonion::unit(2);
        let e3 = Octonion::unit(3);
        assert_eq!(e1 * e1, -Octonion::ONE);
        assert_eq!(e1 * e2, e3);
        assert_eq!(e2 * e1, -e3);
        for i in 1..8 {
            assert_eq!(Octonion::unit(i) * Octonion::unit(i), -Octonion::ONE);
        }
    }

    #[test]
    fn conjugation_and_norm_examples() {
        assert_eq!(Octonion::ONE.conj(), Octonion::ONE);
        assert_eq!(Octonion::unit(5).conj(), -Octonion::unit(5));
        let mut x = Octonion::real(2.0);
        x.coords[1] = 3.0;
        let mut want = Octonion::real(2.0);
        want.coords[1] = -3.0;
        assert_eq!(x.conj(), want);

        assert_eq!(Octonion::ZERO.norm(), 0.0);
        assert_eq!(Octonion::unit(4).norm(), 1.0);
        let p = (Octonion::ONE + Octonion::unit(1)) * (Octonion::ONE + Octonion::unit(2));
        assert!((p.norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn not_associative() {
        let (e1, e2, e4) = (Octonion::unit(1), Octonion::unit(2), Octonion::unit(4));
        assert_ne!((e1 * e2) * e4, e1 * (e2 * e4));
    }

    proptest! {
        #[test]
        fn table_product_matches_doubling(x in octonion(), y in octonion()) {
            prop_assert!(close(&(x * y), &doubling_mul(&x, &y), x.norm() * y.norm()));
        }

        #[test]
        fn unit_law(x in octonion()) {
            prop_assert_eq!(Octonion::ONE * x, x);
            prop_assert_eq!(x * Octonion::ONE, x);
        }

        #[test]
        fn composition(x in octonion(), y in octonion()) {
            let lhs = (x * y).norm();
            let rhs = x.norm() * y.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn conjugate_properties(x in octonion()) {
            prop_assert_eq!(x.conj().conj(), x);
            let p = x * x.conj();
            prop_assert!(close(&p, &Octonion::real(x.norm_sqr()), x.norm_sqr()));
        }

        #[test]
        fn alternative(x in octonion(), y in octonion()) {
            let s = x.norm() * x.norm() * y.norm();
            prop_assert!(close(&(x * (x * y)), &((x * x) * y), s));
            prop_assert!(close(&((y * x) * x), &(y * (x * x)), s));
        }

        #[test]
        fn moufang(x in octonion(), y in octonion(), z in octonion()) {
            let s = z.norm() * z.norm() * x.norm() * y.norm();
            let lhs = (z * x) * (y * z);
            let rhs = z * ((x * y) * z);
            prop_assert!(close(&lhs, &rhs, s));
        }

        #[test]
        fn inverse_by_conjugate(x in octonion()) {
            prop_assume!(x.norm() > 1e-3);
            let inv = x.inverse().unwrap();
            prop_assert!(close(&(x * inv), &Octonion::ONE, 1.0));
        }
    }
}
