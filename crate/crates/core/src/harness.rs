//! Seeded, randomized verification of the mean inequalities and identities.
//!
//! Every check compares elements in the Loewner order. A margin is the smallest
//! eigenvalue of `RHS - LHS` divided by `||LHS|| + ||RHS||`; an identity is two
//! one-sided margins. A trial passes when all of its margins are at least
//! `-tol`. Checks whose hypotheses fail on the generated inputs are recorded
//! as skipped.
//!
//! Each trial draws its inputs from a seed derived from
//! `(base_seed, check_id, kind, lambda, index)`, so a single record can be
//! replayed from its check id, descriptor, weight and seed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{
    quadratic_map, random_invertible, random_positive_with, rng_from_seed, AlgebraDescriptor,
    AlgebraElement, PositiveGenSpec, Rng,
};
use crate::error::{Error, Result};
use crate::means::{
    arithmetic_mean, geometric_mean, harmonic_mean, perspective, positive_decomposition,
    specht_ratio, PerspectiveSpec,
};
use crate::quadrature::{
    geometric_mean_harmonic_integral, geometric_mean_integral, QuadratureConfig,
};
use crate::spectral::{
    apply_function, inverse, loewner_leq, spectral_norm, ScalarFunction, DEFAULT_CLUSTER_TOL,
};

/// Spectrum range of generated positive elements.
const GEN_LOW: f64 = 0.1;
const GEN_HIGH: f64 = 10.0;
/// Spectrum range of the positive increments used for ordered pairs.
const STEP_LOW: f64 = 0.01;
const STEP_HIGH: f64 = 2.0;

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
pub const DEFAULT_TOL: f64 = 1e-9;
pub const KUBO_ANDO_LOWER_DELTAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const KUBO_ANDO_UPPER_DELTAS: [f64; 3] = [2.0, 2.5, 3.0];
/// Upper spectral bounds for the Specht checks; the lower bound is 1.
pub const SPECHT_BETAS: [f64; 3] = [2.0, 4.0, 10.0];

// ---------------------------------------------------------------------------
// records

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped { hypothesis: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub check_id: String,
    pub descriptor: AlgebraDescriptor,
    pub seed: u64,
    pub lambda: f64,
    pub aux_params: BTreeMap<String, f64>,
    pub margins: Vec<f64>,
    pub verdict: Verdict,
}

impl TrialRecord {
    pub fn worst_margin(&self) -> Option<f64> {
        self.margins.iter().copied().reduce(f64::min)
    }
}

/// What a check computed: margins, or the hypothesis that did not hold.
enum Outcome {
    Margins(Vec<f64>),
    Skip(String),
}

/// Margin recorded when a check could not be evaluated at all.
const BROKEN_MARGIN: f64 = f64::MIN;

fn finish(
    check_id: &str,
    descriptor: AlgebraDescriptor,
    lambda: f64,
    aux: &[(&str, f64)],
    tol: f64,
    outcome: Result<Outcome>,
) -> TrialRecord {
    let (margins, verdict) = match outcome {
        Ok(Outcome::Margins(m)) => {
            let ok = m.iter().all(|x| *x >= -tol);
            (m, if ok { Verdict::Pass } else { Verdict::Fail })
        }
        Ok(Outcome::Skip(h)) => (Vec::new(), Verdict::Skipped { hypothesis: h }),
        // a spectrum outside a function's domain means an input hypothesis was
        // not met after rounding
        Err(Error::SpectrumDomain {
            function,
            eigenvalue,
            hypothesis,
        }) => (
            Vec::new(),
            Verdict::Skipped {
                hypothesis: hypothesis.unwrap_or_else(|| {
                    format!("spectrum in domain of {function} (eigenvalue {eigenvalue:e})")
                }),
            },
        ),
        Err(_) => (vec![BROKEN_MARGIN], Verdict::Fail),
    };
    TrialRecord {
        check_id: check_id.to_string(),
        descriptor,
        seed: 0,
        lambda,
        aux_params: aux.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        margins,
        verdict,
    }
}

/// Margin of `a <= b`.
fn leq(a: &AlgebraElement, b: &AlgebraElement) -> Result<f64> {
    Ok(loewner_leq(a, b, 0.0)?.margin())
}

/// Margins of `a <= b` and `b <= a`.
fn equal(a: &AlgebraElement, b: &AlgebraElement) -> Result<[f64; 2]> {
    Ok([leq(a, b)?, leq(b, a)?])
}

// ---------------------------------------------------------------------------
// checks on given inputs

/// `A !_l B <= A #_l B <= A v_l B`.
pub fn check_young(a: &AlgebraElement, b: &AlgebraElement, lambda: f64, tol: f64) -> TrialRecord {
    let out = (|| {
        let h = harmonic_mean(a, b, lambda)?;
        let g = geometric_mean(a, b, lambda)?;
        let m = arithmetic_mean(a, b, lambda)?;
        Ok(Outcome::Margins(vec![leq(&h, &g)?, leq(&g, &m)?]))
    })();
    finish("young", a.descriptor(), lambda, &[], tol, out)
}

/// The four links of
/// `A !_l B <= [A^{-1} #_l B^{-1} + 2d((A^{-1}+B^{-1})/2 - A^{-1} # B^{-1})]^{-1}
///  <= A #_l B <= A #_l B + 2d((A+B)/2 - A # B) <= A v_l B`
/// with `d = min(l, 1 - l)`.
pub fn check_refined_young(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    tol: f64,
) -> TrialRecord {
    let d = lambda.min(1.0 - lambda);
    let out = (|| {
        let ai = inverse(a)?;
        let bi = inverse(b)?;
        let inv_side = geometric_mean(&ai, &bi, lambda)?.add_scaled(
            2.0 * d,
            &(arithmetic_mean(&ai, &bi, 0.5)? - geometric_mean(&ai, &bi, 0.5)?),
        );
        let lower = inverse(&inv_side)?;
        let g = geometric_mean(a, b, lambda)?;
        let upper = g.add_scaled(
            2.0 * d,
            &(arithmetic_mean(a, b, 0.5)? - geometric_mean(a, b, 0.5)?),
        );
        Ok(Outcome::Margins(vec![
            leq(&harmonic_mean(a, b, lambda)?, &lower)?,
            leq(&lower, &g)?,
            leq(&g, &upper)?,
            leq(&upper, &arithmetic_mean(a, b, lambda)?)?,
        ]))
    })();
    finish(
        "refined_young",
        a.descriptor(),
        lambda,
        &[("delta", d)],
        tol,
        out,
    )
}

fn kubo_ando_combination(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    delta: f64,
) -> Result<AlgebraElement> {
    let g = geometric_mean(a, b, lambda)?;
    let m = arithmetic_mean(a, b, lambda)?;
    Ok(g.scale(delta).add_scaled(1.0 - delta, &m))
}

/// `d A #_l B + (1 - d) A v_l B >= A !_l B` for `0 <= d <= 1`, `0 < l < 1`.
pub fn check_kubo_ando_lower(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    delta: f64,
    tol: f64,
) -> TrialRecord {
    let out = (|| {
        if !(0.0..=1.0).contains(&delta) {
            return Ok(Outcome::Skip("0 <= delta <= 1".into()));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Ok(Outcome::Skip("0 < lambda < 1".into()));
        }
        let lhs = kubo_ando_combination(a, b, lambda, delta)?;
        Ok(Outcome::Margins(vec![leq(
            &harmonic_mean(a, b, lambda)?,
            &lhs,
        )?]))
    })();
    let id = Check::KuboAndoLower { delta }.id();
    finish(&id, a.descriptor(), lambda, &[("delta", delta)], tol, out)
}

/// `d A #_l B + (1 - d) A v_l B <= A !_l B` for `d >= 2`, provided `A <= B`
/// when `l <= 1/2` or `B <= A` when `l >= 1/2`.
pub fn check_kubo_ando_upper(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    delta: f64,
    tol: f64,
) -> TrialRecord {
    let out = (|| {
        if delta < 2.0 {
            return Ok(Outcome::Skip("delta >= 2".into()));
        }
        let a_le_b = loewner_leq(a, b, tol)?.holds();
        let b_le_a = loewner_leq(b, a, tol)?.holds();
        let ok = (lambda <= 0.5 && a_le_b) || (lambda >= 0.5 && b_le_a);
        if !ok {
            let h = if lambda <= 0.5 { "A <= B" } else { "B <= A" };
            return Ok(Outcome::Skip(h.into()));
        }
        let lhs = kubo_ando_combination(a, b, lambda, delta)?;
        Ok(Outcome::Margins(vec![leq(
            &lhs,
            &harmonic_mean(a, b, lambda)?,
        )?]))
    })();
    let id = Check::KuboAndoUpper { delta }.id();
    finish(&id, a.descriptor(), lambda, &[("delta", delta)], tol, out)
}

/// `A #_l B <= A v_l B <= S(beta/alpha) A #_l B` for `A`, `B` drawn with
/// spectrum in `[alpha, beta] = [spec.spectrum_low, spec.spectrum_high]`, plus
/// `(alpha/beta) I <= {A^{-1/2} B A^{-1/2}} <= (beta/alpha) I`.
pub fn check_specht_sandwich(
    desc: AlgebraDescriptor,
    spec: &PositiveGenSpec,
    lambda: f64,
    tol: f64,
) -> TrialRecord {
    let (alpha, beta) = (spec.spectrum_low, spec.spectrum_high);
    let mut rng = rng_from_seed(spec.seed);
    let a = random_positive_with(desc, alpha, beta, &mut rng);
    let b = random_positive_with(desc, alpha, beta, &mut rng);
    let out = (|| {
        spec.validate()?;
        let s = specht_ratio(beta / alpha)?;
        let g = geometric_mean(&a, &b, lambda)?;
        let m = arithmetic_mean(&a, &b, lambda)?;
        let neg_half = positive_decomposition(&a, "A")?.apply(&ScalarFunction::Power(-0.5))?;
        let c = quadratic_map(&neg_half, &b)?;
        let lo = AlgebraElement::scalar(desc, alpha / beta);
        let hi = AlgebraElement::scalar(desc, beta / alpha);
        Ok(Outcome::Margins(vec![
            leq(&g, &m)?,
            leq(&m, &g.scale(s))?,
            leq(&lo, &c)?,
            leq(&c, &hi)?,
        ]))
    })();
    let id = Check::SpechtSandwich { beta: beta / alpha }.id();
    finish(
        &id,
        desc,
        lambda,
        &[("alpha", alpha), ("beta", beta)],
        tol,
        out,
    )
}

/// `(sA + (1-s)B)^{-1} <= sA^{-1} + (1-s)B^{-1}`.
pub fn check_inverse_convexity(
    a: &AlgebraElement,
    b: &AlgebraElement,
    s: f64,
    tol: f64,
) -> TrialRecord {
    let out = (|| {
        positive_decomposition(a, "A")?;
        positive_decomposition(b, "B")?;
        let lhs = inverse(&a.scale(s).add_scaled(1.0 - s, b))?;
        let rhs = inverse(a)?.scale(s).add_scaled(1.0 - s, &inverse(b)?);
        Ok(Outcome::Margins(vec![leq(&lhs, &rhs)?]))
    })();
    finish(
        "inverse_convexity",
        a.descriptor(),
        s,
        &[("s", s)],
        tol,
        out,
    )
}

/// `P_{f,h}(A, C) <= P_{f,h}(B, C)` for operator monotone `f`, given `A <= B`.
pub fn check_perspective_monotone(
    spec: &PerspectiveSpec,
    a: &AlgebraElement,
    b: &AlgebraElement,
    c: &AlgebraElement,
    lambda: f64,
    tol: f64,
) -> TrialRecord {
    let out = (|| {
        if !loewner_leq(a, b, tol)?.holds() {
            return Ok(Outcome::Skip("A <= B".into()));
        }
        let pa = perspective(spec, a, c)?;
        let pb = perspective(spec, b, c)?;
        Ok(Outcome::Margins(vec![leq(&pa, &pb)?]))
    })();
    finish(
        "perspective_monotone",
        a.descriptor(),
        lambda,
        &[],
        tol,
        out,
    )
}

/// `P_{f,h}(tA1 + (1-t)A2, B) <= t P_{f,h}(A1, B) + (1-t) P_{f,h}(A2, B)` for
/// operator convex `f`.
pub fn check_perspective_convex(
    spec: &PerspectiveSpec,
    a1: &AlgebraElement,
    a2: &AlgebraElement,
    b: &AlgebraElement,
    t: f64,
    lambda: f64,
    tol: f64,
) -> TrialRecord {
    let out = (|| {
        let mix = a1.scale(t).add_scaled(1.0 - t, a2);
        let lhs = perspective(spec, &mix, b)?;
        let rhs = perspective(spec, a1, b)?
            .scale(t)
            .add_scaled(1.0 - t, &perspective(spec, a2, b)?);
        Ok(Outcome::Margins(vec![leq(&lhs, &rhs)?]))
    })();
    finish(
        "perspective_convex",
        a1.descriptor(),
        lambda,
        &[("t", t)],
        tol,
        out,
    )
}

/// `P_{r,h}(A, B) <= P_{q,h}(A, B)` whenever `r <= q` pointwise.
pub fn check_perspective_order(
    r: &ScalarFunction,
    q: &ScalarFunction,
    h: &ScalarFunction,
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    tol: f64,
) -> TrialRecord {
    let out = (|| {
        let pr = perspective(&PerspectiveSpec::new(r.clone(), h.clone()), a, b)?;
        let pq = perspective(&PerspectiveSpec::new(q.clone(), h.clone()), a, b)?;
        Ok(Outcome::Margins(vec![leq(&pr, &pq)?]))
    })();
    finish("perspective_order", a.descriptor(), lambda, &[], tol, out)
}

// ---------------------------------------------------------------------------
// check registry

/// Every check the suite knows, with its fixed parameter where it has one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    Young,
    RefinedYoung,
    KuboAndoLower {
        delta: f64,
    },
    KuboAndoUpper {
        delta: f64,
    },
    /// Spectra in `[1, beta]`.
    SpechtSandwich {
        beta: f64,
    },
    /// Convexity of the inverse, with `s = lambda`.
    InverseConvexity,
    /// `f = x^lambda`, `h(t) = 1 + t`.
    PerspectiveMonotone,
    /// `f = x^{1 + lambda}`, `h(t) = t`.
    PerspectiveConvex,
    /// `r = ((1-lambda) + lambda/x)^{-1} <= q = x^lambda`, `h(t) = t`.
    PerspectiveOrder,
    GmSymmetry,
    GmScaling,
    GmMonotone,
    GmConcave,
    GmCongruence,
    GmInversion,
    PowerMonotone,
    PowerConcave,
    LogMonotone,
    LogConcave,
    /// Both integral forms of `A #_l B` against the direct formula. Each margin
    /// is the quadrature relative tolerance minus the observed relative
    /// coordinate error. Not part of the default suite.
    GmIntegral,
}

impl Check {
    /// The checks run when a configuration does not select any.
    pub fn default_suite() -> Vec<Check> {
        let mut out = vec![Check::Young, Check::RefinedYoung];
        out.extend(
            KUBO_ANDO_LOWER_DELTAS
                .iter()
                .map(|&delta| Check::KuboAndoLower { delta }),
        );
        out.extend(
            KUBO_ANDO_UPPER_DELTAS
                .iter()
                .map(|&delta| Check::KuboAndoUpper { delta }),
        );
        out.extend(
            SPECHT_BETAS
                .iter()
                .map(|&beta| Check::SpechtSandwich { beta }),
        );
        out.extend([
            Check::InverseConvexity,
            Check::PerspectiveMonotone,
            Check::PerspectiveConvex,
            Check::PerspectiveOrder,
            Check::GmSymmetry,
            Check::GmScaling,
            Check::GmMonotone,
            Check::GmConcave,
            Check::GmCongruence,
            Check::GmInversion,
            Check::PowerMonotone,
            Check::PowerConcave,
            Check::LogMonotone,
            Check::LogConcave,
        ]);
        out
    }

    fn base_name(&self) -> &'static str {
        match self {
            Check::Young => "young",
            Check::RefinedYoung => "refined_young",
            Check::KuboAndoLower { .. } => "kubo_ando_lower",
            Check::KuboAndoUpper { .. } => "kubo_ando_upper",
            Check::SpechtSandwich { .. } => "specht_sandwich",
            Check::InverseConvexity => "inverse_convexity",
            Check::PerspectiveMonotone => "perspective_monotone",
            Check::PerspectiveConvex => "perspective_convex",
            Check::PerspectiveOrder => "perspective_order",
            Check::GmSymmetry => "gm_symmetry",
            Check::GmScaling => "gm_scaling",
            Check::GmMonotone => "gm_monotone",
            Check::GmConcave => "gm_concave",
            Check::GmCongruence => "gm_congruence",
            Check::GmInversion => "gm_inversion",
            Check::PowerMonotone => "power_monotone",
            Check::PowerConcave => "power_concave",
            Check::LogMonotone => "log_monotone",
            Check::LogConcave => "log_concave",
            Check::GmIntegral => "gm_integral",
        }
    }

    /// `name` or `name[key=value]`.
    pub fn id(&self) -> String {
        match self {
            Check::KuboAndoLower { delta } | Check::KuboAndoUpper { delta } => {
                format!("{}[delta={delta}]", self.base_name())
            }
            Check::SpechtSandwich { beta } => format!("{}[beta={beta}]", self.base_name()),
            _ => self.base_name().to_string(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unknown check `{s}`"));
        let (name, param) = match s.split_once('[') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(']').ok_or_else(bad)?;
                let (key, value) = inner.split_once('=').ok_or_else(bad)?;
                let value: f64 = value.parse().map_err(|_| bad())?;
                (name, Some((key, value)))
            }
            None => (s, None),
        };
        let check = match (name, param) {
            ("kubo_ando_lower", Some(("delta", delta))) => Check::KuboAndoLower { delta },
            ("kubo_ando_upper", Some(("delta", delta))) => Check::KuboAndoUpper { delta },
            ("specht_sandwich", Some(("beta", beta))) if beta >= 1.0 => {
                Check::SpechtSandwich { beta }
            }
            (_, Some(_)) => return Err(bad()),
            (name, None) => {
                let all = [
                    Check::Young,
                    Check::RefinedYoung,
                    Check::InverseConvexity,
                    Check::PerspectiveMonotone,
                    Check::PerspectiveConvex,
                    Check::PerspectiveOrder,
                    Check::GmSymmetry,
                    Check::GmScaling,
                    Check::GmMonotone,
                    Check::GmConcave,
                    Check::GmCongruence,
                    Check::GmInversion,
                    Check::PowerMonotone,
                    Check::PowerConcave,
                    Check::LogMonotone,
                    Check::LogConcave,
                    Check::GmIntegral,
                ];
                *all.iter().find(|c| c.base_name() == name).ok_or_else(bad)?
            }
        };
        Ok(check)
    }
}

// ---------------------------------------------------------------------------
// configuration

mod descriptor_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &[AlgebraDescriptor],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|d| d.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<AlgebraDescriptor>, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        names
            .iter()
            .map(|n| n.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(with = "descriptor_strings")]
    pub kinds: Vec<AlgebraDescriptor>,
    pub trials_per_check: usize,
    pub lambda_grid: Vec<f64>,
    pub tol: f64,
    pub base_seed: u64,
    pub quadrature: QuadratureConfig,
    /// Generate the ordered pairs the upper Kubo–Ando bound assumes instead of
    /// independent pairs.
    pub constrained: bool,
    /// Check ids to run; empty selects [`Check::default_suite`].
    pub checks: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            kinds: default_kinds(),
            trials_per_check: DEFAULT_TRIALS,
            lambda_grid: DEFAULT_LAMBDA_GRID.to_vec(),
            tol: DEFAULT_TOL,
            base_seed: 0,
            quadrature: QuadratureConfig::element(),
            constrained: true,
            checks: Vec::new(),
        }
    }
}

pub fn default_kinds() -> Vec<AlgebraDescriptor> {
    vec![
        AlgebraDescriptor::real_symmetric(3),
        AlgebraDescriptor::complex_hermitian(3),
        AlgebraDescriptor::spin_factor(4),
        AlgebraDescriptor::albert(),
    ]
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::Domain("no algebra kinds selected".into()));
        }
        if self.trials_per_check < 1 {
            return Err(Error::Domain("trials_per_check must be at least 1".into()));
        }
        if self.lambda_grid.is_empty() || self.lambda_grid.iter().any(|l| !(0.0..=1.0).contains(l))
        {
            return Err(Error::Domain(
                "lambda_grid must be a non-empty subset of [0, 1]".into(),
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Domain("tol must be positive".into()));
        }
        self.quadrature.validate()?;
        self.selected_checks().map(|_| ())
    }

    pub fn selected_checks(&self) -> Result<Vec<Check>> {
        if self.checks.is_empty() {
            Ok(Check::default_suite())
        } else {
            self.checks.iter().map(|c| c.parse()).collect()
        }
    }
}

// ---------------------------------------------------------------------------
// running

/// Per-trial seed from `(base_seed, check_id, kind, lambda, index)`.
pub fn trial_seed(
    base_seed: u64,
    check_id: &str,
    desc: AlgebraDescriptor,
    lambda: f64,
    index: usize,
) -> u64 {
    let key = format!(
        "{base_seed}|{check_id}|{desc}|{:016x}|{index}",
        lambda.to_bits()
    );
    let digest = Sha256::digest(key.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

fn positive(desc: AlgebraDescriptor, rng: &mut Rng) -> AlgebraElement {
    random_positive_with(desc, GEN_LOW, GEN_HIGH, rng)
}

/// `x + P` for a random positive `P`.
fn above(x: &AlgebraElement, rng: &mut Rng) -> AlgebraElement {
    x + &random_positive_with(x.descriptor(), STEP_LOW, STEP_HIGH, rng)
}

fn log_uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Runs one trial of `check`, drawing all inputs from `seed`.
pub fn run_trial(
    check: Check,
    desc: AlgebraDescriptor,
    lambda: f64,
    seed: u64,
    cfg: &SuiteConfig,
) -> TrialRecord {
    let tol = cfg.tol;
    let mut rng = rng_from_seed(seed);
    let rng = &mut rng;
    let mut rec = match check {
        Check::Young => {
            let (a, b) = (positive(desc, rng), positive(desc, rng));
            check_young(&a, &b, lambda, tol)
        }
        Check::RefinedYoung => {
            let (a, b) = (positive(desc, rng), positive(desc, rng));
            check_refined_young(&a, &b, lambda, tol)
        }
        Check::KuboAndoLower { delta } => {
            let (a, b) = (positive(desc, rng), positive(desc, rng));
            check_kubo_ando_lower(&a, &b, lambda, delta, tol)
        }
        Check::KuboAndoUpper { delta } => {
            let (a, b) = if !cfg.constrained {
                (positive(desc, rng), positive(desc, rng))
            } else if lambda <= 0.5 {
                let a = positive(desc, rng);
                let b = above(&a, rng);
                (a, b)
            } else {
                let b = positive(desc, rng);
                let a = above(&b, rng);
                (a, b)
            };
            check_kubo_ando_upper(&a, &b, lambda, delta, tol)
        }
        Check::SpechtSandwich { beta } => {
            let spec = PositiveGenSpec {
                spectrum_low: 1.0,
                spectrum_high: beta,
                seed: rng.random(),
            };
            check_specht_sandwich(desc, &spec, lambda, tol)
        }
        Check::InverseConvexity => {
            let (a, b) = (positive(desc, rng), positive(desc, rng));
            check_inverse_convexity(&a, &b, lambda, tol)
        }
        Check::PerspectiveMonotone => {
            let a = positive(desc, rng);
            let b = above(&a, rng);
            let c = positive(desc, rng);
            let spec = PerspectiveSpec::new(
                ScalarFunction::Power(lambda),
                ScalarFunction::Affine(1.0, 1.0),
            );
            check_perspective_monotone(&spec, &a, &b, &c, lambda, tol)
        }
        Check::PerspectiveConvex => {
            let (a1, a2, b) = (
                positive(desc, rng),
                positive(desc, rng),
                positive(desc, rng),
            );
            let t = rng.random_range(0.0..=1.0);
            let spec = PerspectiveSpec::with_identity_h(ScalarFunction::Power(1.0 + lambda));
            check_perspective_convex(&spec, &a1, &a2, &b, t, lambda, tol)
        }
        Check::PerspectiveOrder => {
            let (a, b) = (positive(desc, rng), positive(desc, rng));
            check_perspective_order(
                &ScalarFunction::HarmonicProfile(lambda),
                &ScalarFunction::Power(lambda),
                &ScalarFunction::identity(),
                &a,
                &b,
                lambda,
                tol,
            )
        }
        Check::GmSymmetry
        | Check::GmScaling
        | Check::GmMonotone
        | Check::GmConcave
        | Check::GmCongruence
        | Check::GmInversion => geometric_identity(check, desc, lambda, rng, tol),
        Check::PowerMonotone | Check::PowerConcave | Check::LogMonotone | Check::LogConcave => {
            let f = match check {
                Check::PowerMonotone | Check::PowerConcave => ScalarFunction::Power(lambda),
                _ => ScalarFunction::Log,
            };
            let monotone = matches!(check, Check::PowerMonotone | Check::LogMonotone);
            monotone_concave_trial(&check.id(), &f, monotone, desc, lambda, rng, tol)
        }
        Check::GmIntegral => {
            let (a, b) = (positive(desc, rng), positive(desc, rng));
            gm_integral_trial(&a, &b, lambda, &cfg.quadrature, tol)
        }
    };
    rec.seed = seed;
    rec
}

fn geometric_identity(
    check: Check,
    desc: AlgebraDescriptor,
    lambda: f64,
    rng: &mut Rng,
    tol: f64,
) -> TrialRecord {
    let a = positive(desc, rng);
    let b = positive(desc, rng);
    let gm = |x: &AlgebraElement, y: &AlgebraElement| geometric_mean(x, y, lambda);
    let mut aux = Vec::new();
    let out = (|| -> Result<Outcome> {
        let margins = match check {
            Check::GmSymmetry => {
                equal(&gm(&a, &b)?, &geometric_mean(&b, &a, 1.0 - lambda)?)?.to_vec()
            }
            Check::GmScaling => {
                let al = log_uniform(rng, 0.1, 10.0);
                let be = log_uniform(rng, 0.1, 10.0);
                aux.extend([("alpha", al), ("beta", be)]);
                let lhs = gm(&a.scale(al), &b.scale(be))?;
                let rhs = gm(&a, &b)?.scale(al.powf(1.0 - lambda) * be.powf(lambda));
                equal(&lhs, &rhs)?.to_vec()
            }
            Check::GmMonotone => {
                let c = above(&a, rng);
                let d = above(&b, rng);
                vec![leq(&gm(&a, &b)?, &gm(&c, &d)?)?]
            }
            Check::GmConcave => {
                let t = rng.random_range(0.0..=1.0);
                aux.push(("t", t));
                let b2 = positive(desc, rng);
                let a2 = positive(desc, rng);
                // second slot
                let mix = b.scale(1.0 - t).add_scaled(t, &b2);
                let lhs = gm(&a, &b)?.scale(1.0 - t).add_scaled(t, &gm(&a, &b2)?);
                let second = leq(&lhs, &gm(&a, &mix)?)?;
                // first slot
                let mix = a.scale(1.0 - t).add_scaled(t, &a2);
                let lhs = gm(&a, &b)?.scale(1.0 - t).add_scaled(t, &gm(&a2, &b)?);
                let first = leq(&lhs, &gm(&mix, &b)?)?;
                vec![second, first]
            }
            Check::GmCongruence => {
                let c = random_invertible(desc, rng);
                let u = |x: &AlgebraElement| quadratic_map(&c, x);
                equal(&u(&gm(&a, &b)?)?, &gm(&u(&a)?, &u(&b)?)?)?.to_vec()
            }
            Check::GmInversion => {
                let lhs = inverse(&gm(&a, &b)?)?;
                let rhs = gm(&inverse(&a)?, &inverse(&b)?)?;
                equal(&lhs, &rhs)?.to_vec()
            }
            _ => unreachable!("not a geometric-mean identity"),
        };
        Ok(Outcome::Margins(margins))
    })();
    finish(&check.id(), desc, lambda, &aux, tol, out)
}

/// Monotone trial (`A <= B` implies `f(A) <= f(B)`) or concavity trial
/// (`f(tA + (1-t)B) >= t f(A) + (1-t) f(B)`).
fn monotone_concave_trial(
    check_id: &str,
    f: &ScalarFunction,
    monotone: bool,
    desc: AlgebraDescriptor,
    lambda: f64,
    rng: &mut Rng,
    tol: f64,
) -> TrialRecord {
    let fx = |x: &AlgebraElement| apply_function(x, f, DEFAULT_CLUSTER_TOL);
    let mut aux = Vec::new();
    let out = if monotone {
        let a = positive(desc, rng);
        let b = above(&a, rng);
        (|| Ok(Outcome::Margins(vec![leq(&fx(&a)?, &fx(&b)?)?])))()
    } else {
        let a = positive(desc, rng);
        let b = positive(desc, rng);
        let t = rng.random_range(0.0..=1.0);
        aux.push(("t", t));
        (|| {
            let lhs = fx(&a)?.scale(t).add_scaled(1.0 - t, &fx(&b)?);
            let rhs = fx(&a.scale(t).add_scaled(1.0 - t, &b))?;
            Ok(Outcome::Margins(vec![leq(&lhs, &rhs)?]))
        })()
    };
    finish(check_id, desc, lambda, &aux, tol, out)
}

fn gm_integral_trial(
    a: &AlgebraElement,
    b: &AlgebraElement,
    lambda: f64,
    q: &QuadratureConfig,
    tol: f64,
) -> TrialRecord {
    let out = (|| {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Ok(Outcome::Skip("0 < lambda < 1".into()));
        }
        let direct = geometric_mean(a, b, lambda)?;
        let scale = spectral_norm(a) + spectral_norm(b);
        let mut margins = Vec::new();
        for form in [geometric_mean_integral, geometric_mean_harmonic_integral] {
            let got = form(a, b, lambda, q)?;
            margins.push(q.rel_tol - got.max_abs_diff(&direct) / scale);
        }
        Ok(Outcome::Margins(margins))
    })();
    finish("gm_integral", a.descriptor(), lambda, &[], tol, out)
}

/// Regenerates a record from its check id, descriptor, weight and seed.
pub fn replay(record: &TrialRecord, cfg: &SuiteConfig) -> Result<TrialRecord> {
    let check: Check = record.check_id.parse()?;
    Ok(run_trial(
        check,
        record.descriptor,
        record.lambda,
        record.seed,
        cfg,
    ))
}

/// All trials of one `(check, kind, lambda)` cell, in index order.
pub fn run_cell(
    check: Check,
    desc: AlgebraDescriptor,
    lambda: f64,
    cfg: &SuiteConfig,
) -> Vec<TrialRecord> {
    let id = check.id();
    (0..cfg.trials_per_check)
        .into_par_iter()
        .map(|i| {
            run_trial(
                check,
                desc,
                lambda,
                trial_seed(cfg.base_seed, &id, desc, lambda, i),
                cfg,
            )
        })
        .collect()
}

/// Monotone and concavity trials of `f` (a power `x^p`, `0 <= p <= 1`, or the
/// logarithm) on one algebra.
pub fn check_power_log_monotone_concave(
    f: &ScalarFunction,
    desc: AlgebraDescriptor,
    cfg: &SuiteConfig,
) -> Result<Vec<TrialRecord>> {
    let (checks, lambda) = match f {
        ScalarFunction::Power(p) if (0.0..=1.0).contains(p) => {
            ([Check::PowerMonotone, Check::PowerConcave], *p)
        }
        ScalarFunction::Log => ([Check::LogMonotone, Check::LogConcave], 0.0),
        other => {
            return Err(Error::Domain(format!(
                "{other} is not x^p with 0 <= p <= 1 or log"
            )))
        }
    };
    Ok(checks
        .into_iter()
        .flat_map(|c| run_cell(c, desc, lambda, cfg))
        .collect())
}

/// The three perspective laws on one algebra at weight `lambda`.
pub fn check_perspective_laws(
    desc: AlgebraDescriptor,
    lambda: f64,
    cfg: &SuiteConfig,
) -> Vec<TrialRecord> {
    [
        Check::PerspectiveMonotone,
        Check::PerspectiveConvex,
        Check::PerspectiveOrder,
    ]
    .into_iter()
    .flat_map(|c| run_cell(c, desc, lambda, cfg))
    .collect()
}

/// The six geometric-mean identities on one algebra at weight `lambda`.
pub fn check_geometric_identities(
    desc: AlgebraDescriptor,
    lambda: f64,
    cfg: &SuiteConfig,
) -> Vec<TrialRecord> {
    [
        Check::GmSymmetry,
        Check::GmScaling,
        Check::GmMonotone,
        Check::GmConcave,
        Check::GmCongruence,
        Check::GmInversion,
    ]
    .into_iter()
    .flat_map(|c| run_cell(c, desc, lambda, cfg))
    .collect()
}

// ---------------------------------------------------------------------------
// reports

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check_id: String,
    pub kind: String,
    pub lambda: f64,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    /// Smallest margin over non-skipped trials.
    pub worst_margin: Option<f64>,
    pub worst_seed: Option<u64>,
}

impl CheckSummary {
    pub fn from_records(
        check_id: &str,
        desc: AlgebraDescriptor,
        lambda: f64,
        records: &[TrialRecord],
    ) -> Self {
        let mut s = CheckSummary {
            check_id: check_id.to_string(),
            kind: desc.to_string(),
            lambda,
            pass: 0,
            fail: 0,
            skip: 0,
            worst_margin: None,
            worst_seed: None,
        };
        for r in records {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Skipped { .. } => s.skip += 1,
            }
            if let Some(m) = r.worst_margin() {
                // ties keep the earliest trial
                if s.worst_margin.is_none_or(|w| m < w) {
                    s.worst_margin = Some(m);
                    s.worst_seed = Some(r.seed);
                }
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Domain(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckSummary>,
}

impl SuiteReport {
    pub fn total_fail(&self) -> usize {
        self.checks.iter().map(|c| c.fail).sum()
    }

    pub fn total_skip(&self) -> usize {
        self.checks.iter().map(|c| c.skip).sum()
    }

    pub fn total_pass(&self) -> usize {
        self.checks.iter().map(|c| c.pass).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.checks {
            w.serialize(c).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<()> {
        std::fs::write(path, self.render(format))?;
        Ok(())
    }
}

/// Runs every selected check over `kinds x lambda_grid x trials`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for check in cfg.selected_checks()? {
        for &desc in &cfg.kinds {
            for &lambda in &cfg.lambda_grid {
                cells.push((check, desc, lambda));
            }
        }
    }
    let checks = cells
        .par_iter()
        .map(|&(check, desc, lambda)| {
            let records = run_cell(check, desc, lambda, cfg);
            CheckSummary::from_records(&check.id(), desc, lambda, &records)
        })
        .collect();
    Ok(SuiteReport {
        config: cfg.clone(),
        checks,
    })
}
