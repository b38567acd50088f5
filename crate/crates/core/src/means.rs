//! Weighted harmonic, geometric and arithmetic means, the nonassociative
//! perspective `P_{f,h}(A, B) = {h(B)^{1/2} f({h(B)^{-1/2} A h(B)^{-1/2}}) h(B)^{1/2}}`
//! and Specht's ratio.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{quadratic_unchecked, AlgebraElement};
use crate::error::{Error, Result};
use crate::spectral::{
    spectral_decompose, ScalarFunction, SpectralDecomposition, DEFAULT_CLUSTER_TOL, DOMAIN_FLOOR,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanFamily {
    Harmonic,
    Geometric,
    Arithmetic,
}

impl MeanFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MeanFamily::Harmonic => "harmonic",
            MeanFamily::Geometric => "geometric",
            MeanFamily::Arithmetic => "arithmetic",
        }
    }
}

impl fmt::Display for MeanFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeanFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "harmonic" | "!" => Ok(MeanFamily::Harmonic),
            "geometric" | "#" => Ok(MeanFamily::Geometric),
            "arithmetic" => Ok(MeanFamily::Arithmetic),
            other => Err(Error::Domain(format!("unknown mean `{other}`"))),
        }
    }
}

/// A mean together with its weight `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanKind {
    pub kind: MeanFamily,
    pub weight: f64,
}

impl MeanKind {
    pub fn new(kind: MeanFamily, weight: f64) -> Result<Self> {
        check_weight(weight)?;
        Ok(Self { kind, weight })
    }

    pub fn apply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        match self.kind {
            MeanFamily::Harmonic => harmonic_mean(a, b, self.weight),
            MeanFamily::Geometric => geometric_mean(a, b, self.weight),
            MeanFamily::Arithmetic => arithmetic_mean(a, b, self.weight),
        }
    }
}

pub(crate) fn check_weight(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "weight must lie in [0, 1], got {lambda}"
        )))
    }
}

/// Spectral decomposition of `a`, rejecting anything that is not positive
/// invertible. `name` labels the argument in the error.
pub(crate) fn positive_decomposition(
    a: &AlgebraElement,
    name: &str,
) -> Result<SpectralDecomposition> {
    let dec = spectral_decompose(a, DEFAULT_CLUSTER_TOL);
    let min = dec.min_eigenvalue();
    if !(min > DOMAIN_FLOOR * dec.norm() && min > 0.0) {
        return Err(Error::SpectrumDomain {
            function: "positive invertible".into(),
            eigenvalue: min,
            hypothesis: Some(format!("{name} must be positive invertible")),
        });
    }
    Ok(dec)
}

/// `A !_l B = ((1 - l) A^{-1} + l B^{-1})^{-1}`.
pub fn harmonic_mean(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
) -> Result<AlgebraElement> {
    a.check_same(b)?;
    check_weight(lambda)?;
    let da = positive_decomposition(a, "A")?;
    let db = positive_decomposition(b, "B")?;
    if lambda == 0.0 {
        return Ok(a.clone());
    }
    if lambda == 1.0 {
        return Ok(b.clone());
    }
    let ai = da.apply(&ScalarFunction::Inverse)?;
    let bi = db.apply(&ScalarFunction::Inverse)?;
    let sum = ai.scale(1.0 - lambda).add_scaled(lambda, &bi);
    spectral_decompose(&sum, DEFAULT_CLUSTER_TOL).apply(&ScalarFunction::Inverse)
}

/// `A #_l B = {A^{1/2} {A^{-1/2} B A^{-1/2}}^l A^{1/2}}`.
pub fn geometric_mean(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
) -> Result<AlgebraElement> {
    a.check_same(b)?;
    check_weight(lambda)?;
    let da = positive_decomposition(a, "A")?;
    positive_decomposition(b, "B")?;
    if lambda == 0.0 {
        return Ok(a.clone());
    }
    if lambda == 1.0 {
        return Ok(b.clone());
    }
    let half = da.apply(&ScalarFunction::Sqrt)?;
    let neg_half = da.apply(&ScalarFunction::Power(-0.5))?;
    let inner = quadratic_unchecked(&neg_half, b);
    let powered = spectral_decompose(&inner, DEFAULT_CLUSTER_TOL)
        .apply(&ScalarFunction::Power(lambda))
        .map_err(|e| e.with_hypothesis("{A^{-1/2} B A^{-1/2}} must be positive"))?;
    Ok(quadratic_unchecked(&half, &powered))
}

/// `A v_l B = (1 - l) A + l B`.
pub fn arithmetic_mean(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
) -> Result<AlgebraElement> {
    a.check_same(b)?;
    check_weight(lambda)?;
    if lambda == 0.0 {
        return Ok(a.clone());
    }
    if lambda == 1.0 {
        return Ok(b.clone());
    }
    Ok(a.scale(1.0 - lambda).add_scaled(lambda, b))
}

/// The pair `(f, h)` of a perspective. `h` must be strictly positive on the
/// spectrum of the second argument.
#[derive(Clone, Debug)]
pub struct PerspectiveSpec {
    pub f: ScalarFunction,
    pub h: ScalarFunction,
}

impl PerspectiveSpec {
    pub fn new(f: ScalarFunction, h: ScalarFunction) -> Self {
        Self { f, h }
    }

    /// `h(t) = t`, the choice behind all the mean inequalities.
    pub fn with_identity_h(f: ScalarFunction) -> Self {
        Self::new(f, ScalarFunction::identity())
    }
}

/// `P_{f,h}(A, B)`. `h(B)` is decomposed once and both of its square-root
/// factors come from that decomposition.
pub fn perspective(
    spec: &PerspectiveSpec,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<AlgebraElement> {
    a.check_same(b)?;
    let hb = spectral_decompose(b, DEFAULT_CLUSTER_TOL)
        .apply(&spec.h)
        .map_err(|e| e.with_hypothesis("Sp(B) must lie in the domain of h"))?;
    let dh = positive_decomposition(&hb, "h(B)")?;
    let half = dh.apply(&ScalarFunction::Sqrt)?;
    let neg_half = dh.apply(&ScalarFunction::Power(-0.5))?;
    let inner = quadratic_unchecked(&neg_half, a);
    let fx = spectral_decompose(&inner, DEFAULT_CLUSTER_TOL)
        .apply(&spec.f)
        .map_err(|e| {
            e.with_hypothesis("Sp({h(B)^{-1/2} A h(B)^{-1/2}}) must lie in the domain of f")
        })?;
    Ok(quadratic_unchecked(&half, &fx))
}

/// Specht's ratio `S(h) = h^{1/(h-1)} / (e log h^{1/(h-1)})`, with `S(1) = 1`.
///
/// Evaluated as `exp(u - 1) / u` where `u = log(h) / (h - 1)`, which stays
/// accurate near `h = 1`.
pub fn specht_ratio(h: f64) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(format!(
            "Specht's ratio needs h > 0, got {h}"
        )));
    }
    let d = h - 1.0;
    let u = if d == 0.0 { 1.0 } else { d.ln_1p() / d };
    Ok((u - 1.0).exp() / u)
}

/// Spectral bounds `alpha <= A, B <= beta` and the ratio `beta / alpha` at
/// which Specht's ratio is taken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpechtParams {
    pub alpha: f64,
    pub beta: f64,
    pub ratio_at: f64,
}

impl SpechtParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta >= alpha && beta.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < alpha <= beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            ratio_at: beta / alpha,
        })
    }

    /// `S(beta / alpha)`.
    pub fn ratio(&self) -> f64 {
        specht_ratio(self.ratio_at).expect("ratio_at >= 1")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        quadratic_map, random_invertible, random_positive_with, rng_from_seed, AlgebraDescriptor,
    };
    use crate::spectral::{inverse, loewner_leq};
    use proptest::prelude::*;

    fn kinds() -> Vec<AlgebraDescriptor> {
        vec![
            AlgebraDescriptor::real_symmetric(3),
            AlgebraDescriptor::complex_hermitian(3),
            AlgebraDescriptor::spin_factor(4),
            AlgebraDescriptor::albert(),
        ]
    }

    fn scalar(x: f64) -> AlgebraElement {
        AlgebraElement::diagonal(&[x]).unwrap()
    }

    fn close(a: &AlgebraElement, b: &AlgebraElement, tol: f64) -> bool {
        let s = a.coord_norm().max(b.coord_norm()).max(1.0);
        a.max_abs_diff(b) <= tol * s
    }

    fn pair(desc: AlgebraDescriptor, seed: u64) -> (AlgebraElement, AlgebraElement) {
        let mut rng = rng_from_seed(seed);
        (
            random_positive_with(desc, 0.2, 5.0, &mut rng),
            random_positive_with(desc, 0.2, 5.0, &mut rng),
        )
    }

    #[test]
    fn endpoints_are_exact() {
        for d in kinds() {
            let (a, b) = pair(d, 1);
            for mean in [harmonic_mean, geometric_mean, arithmetic_mean] {
                assert_eq!(mean(&a, &b, 0.0).unwrap(), a);
                assert_eq!(mean(&a, &b, 1.0).unwrap(), b);
            }
        }
    }

    #[test]
    fn scalar_examples() {
        let h = harmonic_mean(&scalar(2.0), &scalar(6.0), 0.5).unwrap();
        assert!((h.coords()[0] - 3.0).abs() < 1e-14);
        let g = geometric_mean(&scalar(4.0), &scalar(9.0), 0.5).unwrap();
        assert!((g.coords()[0] - 6.0).abs() < 1e-14);
        let g = geometric_mean(&scalar(3.0), &scalar(7.0), 0.3).unwrap();
        assert!((g.coords()[0] - 3f64.powf(0.7) * 7f64.powf(0.3)).abs() < 1e-14);
    }

    #[test]
    fn commuting_diagonal_examples() {
        let a = AlgebraElement::diagonal(&[1.0, 4.0]).unwrap();
        let b = AlgebraElement::diagonal(&[4.0, 1.0]).unwrap();
        let h = harmonic_mean(&a, &b, 0.5).unwrap();
        assert!(close(
            &h,
            &AlgebraElement::diagonal(&[1.6, 1.6]).unwrap(),
            1e-14
        ));
        let g = geometric_mean(&a, &b, 0.5).unwrap();
        assert!(close(
            &g,
            &AlgebraElement::diagonal(&[2.0, 2.0]).unwrap(),
            1e-14
        ));

        let a = AlgebraElement::diagonal(&[0.0, 2.0]).unwrap();
        let b = AlgebraElement::diagonal(&[2.0, 0.0]).unwrap();
        let i = AlgebraElement::identity(a.descriptor());
        assert_eq!(arithmetic_mean(&a, &b, 0.5).unwrap(), i);
    }

    #[test]
    fn equal_arguments_return_the_argument() {
        for d in kinds() {
            let (a, _) = pair(d, 2);
            for l in [0.1, 0.5, 0.9] {
                assert!(close(&harmonic_mean(&a, &a, l).unwrap(), &a, 1e-12));
                assert!(close(&geometric_mean(&a, &a, l).unwrap(), &a, 1e-12));
                assert!(close(&arithmetic_mean(&a, &a, l).unwrap(), &a, 1e-15));
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = AlgebraElement::diagonal(&[1.0, -1.0]).unwrap();
        let b = AlgebraElement::diagonal(&[1.0, 1.0]).unwrap();
        for mean in [harmonic_mean, geometric_mean] {
            match mean(&a, &b, 0.5) {
                Err(Error::SpectrumDomain {
                    eigenvalue,
                    hypothesis: Some(h),
                    ..
                }) => {
                    assert_eq!(eigenvalue, -1.0);
                    assert!(h.contains("A must be positive"));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
        assert!(matches!(
            arithmetic_mean(&b, &scalar(1.0), 0.5),
            Err(Error::DescriptorMismatch { .. })
        ));
        assert!(matches!(geometric_mean(&b, &b, 1.5), Err(Error::Domain(_))));
        assert!(MeanKind::new(MeanFamily::Harmonic, -0.1).is_err());
    }

    #[test]
    fn perspective_examples() {
        for d in kinds() {
            let (a, b) = pair(d, 3);
            // f = id, h = 1: {I A I} = A
            let spec =
                PerspectiveSpec::new(ScalarFunction::identity(), ScalarFunction::constant(1.0));
            assert!(close(&perspective(&spec, &a, &b).unwrap(), &a, 1e-13));

            let l = 0.3;
            let spec = PerspectiveSpec::with_identity_h(ScalarFunction::Power(l));
            let p = perspective(&spec, &b, &a).unwrap();
            assert!(close(&p, &geometric_mean(&a, &b, l).unwrap(), 1e-10));

            let spec = PerspectiveSpec::with_identity_h(ScalarFunction::HarmonicProfile(l));
            let p = perspective(&spec, &b, &a).unwrap();
            assert!(close(&p, &harmonic_mean(&a, &b, l).unwrap(), 1e-10));
        }
    }

    #[test]
    fn perspective_names_the_failed_hypothesis() {
        let a = AlgebraElement::diagonal(&[1.0, 2.0]).unwrap();
        let b = AlgebraElement::diagonal(&[-1.0, 2.0]).unwrap();
        let spec = PerspectiveSpec::with_identity_h(ScalarFunction::Log);
        match perspective(&spec, &a, &b) {
            Err(Error::SpectrumDomain {
                hypothesis: Some(h),
                ..
            }) => assert!(h.contains("h(B)")),
            other => panic!("unexpected {other:?}"),
        }
        let spec = PerspectiveSpec::with_identity_h(ScalarFunction::Log);
        let neg = AlgebraElement::diagonal(&[-1.0, 2.0]).unwrap();
        match perspective(&spec, &neg, &a) {
            Err(Error::SpectrumDomain {
                hypothesis: Some(h),
                ..
            }) => {
                assert!(h.contains("domain of f"))
            }
            other => panic!("unexpected {other:?}"),
        }
        let spec = PerspectiveSpec::new(ScalarFunction::Log, ScalarFunction::Log);
        match perspective(&spec, &a, &b) {
            Err(Error::SpectrumDomain {
                hypothesis: Some(h),
                ..
            }) => {
                assert!(h.contains("domain of h"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn specht_values() {
        assert_eq!(specht_ratio(1.0).unwrap(), 1.0);
        let direct = |h: f64| {
            let t = h.powf(1.0 / (h - 1.0));
            t / (std::f64::consts::E * t.ln())
        };
        for h in [0.1, 0.5, 2.0, 4.0, 10.0, 100.0] {
            let s = specht_ratio(h).unwrap();
            assert!((s - direct(h)).abs() < 1e-13 * s, "h = {h}");
        }
        // S(2) = 2 / (e ln 2)
        let s2 = 2.0 / (std::f64::consts::E * 2f64.ln());
        assert!((specht_ratio(2.0).unwrap() - s2).abs() < 1e-15);
        assert!(specht_ratio(4.0).unwrap() > 1.0);
        // smooth through h = 1
        assert!((specht_ratio(1.0 + 1e-12).unwrap() - 1.0).abs() < 1e-15);
        assert!(specht_ratio(0.0).is_err());
        assert!(specht_ratio(-2.0).is_err());
        assert!(specht_ratio(f64::NAN).is_err());

        let p = SpechtParams::new(1.0, 4.0).unwrap();
        assert_eq!(p.ratio_at, 4.0);
        assert_eq!(p.ratio(), specht_ratio(4.0).unwrap());
        assert!(SpechtParams::new(2.0, 1.0).is_err());
    }

    #[test]
    fn mean_family_parsing() {
        assert_eq!(
            "Geometric".parse::<MeanFamily>().unwrap(),
            MeanFamily::Geometric
        );
        assert!("median".parse::<MeanFamily>().is_err());
        let m = MeanKind::new(MeanFamily::Arithmetic, 0.25).unwrap();
        let out = m.apply(&scalar(0.0), &scalar(4.0)).unwrap();
        assert_eq!(out.coords()[0], 1.0);
    }

    fn kind_and_seed() -> impl Strategy<Value = (AlgebraDescriptor, u64)> {
        (0usize..4, any::<u64>()).prop_map(|(k, s)| (kinds()[k], s))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn specht_is_symmetric_under_reciprocal(h in 1e-3f64..1e3) {
            let s = specht_ratio(h).unwrap();
            let r = specht_ratio(1.0 / h).unwrap();
            prop_assert!((s - r).abs() <= 1e-12 * s);
            prop_assert!(s >= 1.0);
        }

        #[test]
        fn geometric_symmetry((d, seed) in kind_and_seed(), l in 0.0f64..1.0) {
            let (a, b) = pair(d, seed);
            let lhs = geometric_mean(&a, &b, l).unwrap();
            let rhs = geometric_mean(&b, &a, 1.0 - l).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-10));
        }

        #[test]
        fn geometric_scaling((d, seed) in kind_and_seed(), l in 0.0f64..1.0,
                             al in 0.1f64..10.0, be in 0.1f64..10.0) {
            let (a, b) = pair(d, seed);
            let lhs = geometric_mean(&a.scale(al), &b.scale(be), l).unwrap();
            let rhs = geometric_mean(&a, &b, l).unwrap().scale(al.powf(1.0 - l) * be.powf(l));
            prop_assert!(close(&lhs, &rhs, 1e-10));
        }

        #[test]
        fn harmonic_is_inverse_of_arithmetic_of_inverses((d, seed) in kind_and_seed(), l in 0.0f64..1.0) {
            let (a, b) = pair(d, seed);
            let ai = inverse(&a).unwrap();
            let bi = inverse(&b).unwrap();
            let via = inverse(&arithmetic_mean(&ai, &bi, l).unwrap()).unwrap();
            prop_assert!(close(&via, &harmonic_mean(&a, &b, l).unwrap(), 1e-10));
        }

        #[test]
        fn geometric_inversion((d, seed) in kind_and_seed(), l in 0.0f64..1.0) {
            let (a, b) = pair(d, seed);
            let lhs = inverse(&geometric_mean(&a, &b, l).unwrap()).unwrap();
            let rhs = geometric_mean(&inverse(&a).unwrap(), &inverse(&b).unwrap(), l).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-9));
        }

        #[test]
        fn geometric_congruence((d, seed) in kind_and_seed(), l in 0.0f64..1.0) {
            let (a, b) = pair(d, seed);
            let mut rng = rng_from_seed(seed ^ 0x5eed);
            let c = random_invertible(d, &mut rng);
            let u = |x: &AlgebraElement| quadratic_map(&c, x).unwrap();
            let lhs = u(&geometric_mean(&a, &b, l).unwrap());
            let rhs = geometric_mean(&u(&a), &u(&b), l).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-9));
        }

        #[test]
        fn young_chain((d, seed) in kind_and_seed(), l in 0.0f64..1.0) {
            let (a, b) = pair(d, seed);
            let h = harmonic_mean(&a, &b, l).unwrap();
            let g = geometric_mean(&a, &b, l).unwrap();
            let m = arithmetic_mean(&a, &b, l).unwrap();
            prop_assert!(loewner_leq(&h, &g, 1e-10).unwrap().holds());
            prop_assert!(loewner_leq(&g, &m, 1e-10).unwrap().holds());
        }
    }
}
