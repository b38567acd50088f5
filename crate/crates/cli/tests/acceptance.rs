//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails. Tolerances are pinned below.

use std::process::Command;
use std::time::Instant;

use jbmeans::algebra::{
    associative_triple, jordan_product, quadratic_map, random_gaussian, random_invertible,
    random_positive_with, rng_from_seed,
};
use jbmeans::harness::{check_power_log_monotone_concave, default_kinds, run_suite};
use jbmeans::means::geometric_mean;
use jbmeans::quadrature::{
    geometric_mean_harmonic_integral, geometric_mean_integral, log_integral_scalar,
    power_integral_scalar, uniformity_probe,
};
use jbmeans::spectral::{inverse, min_eigenvalue, spectral_norm};
use jbmeans::{
    AlgebraDescriptor, AlgebraElement, FunctionFamily, QuadratureConfig, ScalarFunction,
    SuiteConfig,
};

const AXIOM_TRIALS: usize = 1000;
const AXIOM_TOL: f64 = 1e-10;
const AXIOM_BUDGET_SECS: f64 = 60.0;
const SPECIAL_TRIALS: usize = 1000;
const SPECIAL_TOL: f64 = 1e-12;
const SCALAR_TOL: f64 = 1e-8;
const GM_PAIRS: usize = 50;
const GM_TOL: f64 = 1e-6;
const GM_LAMBDAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const SUITE_TRIALS: usize = 200;
const PROBE_FINEST: f64 = 1e-6;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn axiom_kinds() -> Vec<AlgebraDescriptor> {
    let mut v: Vec<_> = (2..=5).map(AlgebraDescriptor::real_symmetric).collect();
    v.extend((2..=4).map(AlgebraDescriptor::complex_hermitian));
    v.extend((2..=8).map(AlgebraDescriptor::spin_factor));
    v.push(AlgebraDescriptor::albert());
    v
}

fn rel(x: &AlgebraElement, y: &AlgebraElement, scale: f64) -> f64 {
    spectral_norm(&(x - y)) / scale.max(f64::MIN_POSITIVE)
}

fn jp(a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    jordan_product(a, b).unwrap()
}

fn um(a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    quadratic_map(a, b).unwrap()
}

/// Worst relative residual of each axiom family over all trials on one kind.
fn axiom_residuals(desc: AlgebraDescriptor, seed: u64) -> [f64; 4] {
    let mut rng = rng_from_seed(seed);
    let mut worst = [0.0f64; 4];
    for _ in 0..AXIOM_TRIALS {
        let a = random_gaussian(desc, &mut rng);
        let b = random_gaussian(desc, &mut rng);
        let c = random_invertible(desc, &mut rng);
        let d = random_invertible(desc, &mut rng);
        let p = random_positive_with(desc, 0.1, 10.0, &mut rng);
        let (na, nb) = (spectral_norm(&a), spectral_norm(&b));
        let a2 = jp(&a, &a);
        let b2 = jp(&b, &b);

        // Jordan identity (a^2 b) a = a^2 (b a)
        let jordan = rel(
            &jp(&jp(&a2, &b), &a),
            &jp(&a2, &jp(&b, &a)),
            na * na * na * nb,
        );

        // JB norm axioms, as relative violations
        let ab = spectral_norm(&jp(&a, &b));
        let norm = [
            (ab - na * nb) / (na * nb),
            (spectral_norm(&a2) - na * na).abs() / (na * na),
            (spectral_norm(&a2) - spectral_norm(&(&a2 + &b2))) / (na * na),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);

        // U maps: positivity, inverse of U_c, inverse of {c d c}
        let nc = spectral_norm(&c);
        let ci = inverse(&c).unwrap();
        let di = inverse(&d).unwrap();
        let ucp = um(&c, &p);
        let pos = (-min_eigenvalue(&ucp) / (nc * nc * spectral_norm(&p))).max(0.0);
        let back = rel(
            &um(&ci, &um(&c, &b)),
            &b,
            nb * (nc * spectral_norm(&ci)).powi(2),
        );
        let cdc = um(&c, &d);
        let cdc_inv = um(&ci, &di);
        let triple = rel(
            &jp(&cdc, &cdc_inv),
            &AlgebraElement::identity(desc),
            spectral_norm(&cdc) * spectral_norm(&cdc_inv),
        );
        let umap = pos.max(back).max(triple);

        // Jordan inverse: c c^{-1} = I and c^2 c^{-1} = c
        let nci = spectral_norm(&ci);
        let inv = rel(&jp(&c, &ci), &AlgebraElement::identity(desc), nc * nci).max(rel(
            &jp(&jp(&c, &c), &ci),
            &c,
            nc * nc * nci,
        ));

        for (w, r) in worst.iter_mut().zip([jordan, norm, umap, inv]) {
            *w = w.max(r);
        }
    }
    worst
}

fn criterion_axioms() -> Outcome {
    let start = Instant::now();
    let mut worst = [0.0f64; 4];
    for (i, desc) in axiom_kinds().into_iter().enumerate() {
        let r = axiom_residuals(desc, 0xA110 + i as u64);
        for (w, x) in worst.iter_mut().zip(r) {
            *w = w.max(x);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst.iter().all(|&w| w <= AXIOM_TOL) && secs < AXIOM_BUDGET_SECS;
    Outcome {
        pass,
        detail: format!(
            "jordan {:.1e}, norm {:.1e}, U-map {:.1e}, inverse {:.1e} (tol {AXIOM_TOL:.0e}); {secs:.1}s (budget {AXIOM_BUDGET_SECS}s)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    }
}

fn criterion_special() -> Outcome {
    let mut worst = 0.0f64;
    for desc in axiom_kinds().into_iter().filter(|d| d.is_special_matrix()) {
        let mut rng = rng_from_seed(0x5EC);
        for _ in 0..SPECIAL_TRIALS {
            let a = random_gaussian(desc, &mut rng);
            let b = random_gaussian(desc, &mut rng);
            let scale = spectral_norm(&a).powi(2) * spectral_norm(&b);
            let r = rel(&um(&a, &b), &associative_triple(&a, &b).unwrap(), scale);
            worst = worst.max(r);
        }
    }
    Outcome {
        pass: worst <= SPECIAL_TOL,
        detail: format!("worst relative residual {worst:.1e} (tol {SPECIAL_TOL:.0e})"),
    }
}

fn criterion_scalar() -> Outcome {
    let cfg = QuadratureConfig::scalar();
    let mut worst_pow = 0.0f64;
    let mut n_pow = 0;
    for i in 1..=9 {
        let l = i as f64 / 10.0;
        for k in 0..5 {
            let x = 10f64.powf(-3.0 + 1.5 * k as f64);
            let want = x.powf(l);
            let got = power_integral_scalar(x, l, &cfg).unwrap();
            worst_pow = worst_pow.max((got - want).abs() / want);
            n_pow += 1;
        }
    }
    let mut worst_log = 0.0f64;
    let mut n_log = 0;
    for k in 0..7 {
        let x = 10f64.powi(k - 3);
        let want = x.ln();
        let got = log_integral_scalar(x, &cfg).unwrap();
        // ln 1 = 0 is returned exactly; elsewhere this is a relative error
        let err = if want == 0.0 {
            got.abs()
        } else {
            (got - want).abs() / want.abs()
        };
        worst_log = worst_log.max(err);
        n_log += 1;
    }
    Outcome {
        pass: worst_pow <= SCALAR_TOL && worst_log <= SCALAR_TOL && n_pow == 45 && n_log == 7,
        detail: format!(
            "power {worst_pow:.1e} over {n_pow} points, log {worst_log:.1e} over {n_log} points (tol {SCALAR_TOL:.0e})"
        ),
    }
}

fn criterion_gm_integrals() -> Outcome {
    let cfg = QuadratureConfig::element();
    let mut worst = [0.0f64; 2];
    let mut errors = 0;
    for desc in default_kinds() {
        let mut rng = rng_from_seed(0x6E0);
        for &l in &GM_LAMBDAS {
            for _ in 0..GM_PAIRS {
                let a = random_positive_with(desc, 0.1, 10.0, &mut rng);
                let b = random_positive_with(desc, 0.1, 10.0, &mut rng);
                let g = geometric_mean(&a, &b, l).unwrap();
                let ng = spectral_norm(&g);
                let forms = [
                    geometric_mean_integral(&a, &b, l, &cfg),
                    geometric_mean_harmonic_integral(&a, &b, l, &cfg),
                ];
                for (w, f) in worst.iter_mut().zip(forms) {
                    match f {
                        Ok(v) => *w = w.max(rel(&v, &g, ng)),
                        Err(_) => errors += 1,
                    }
                }
            }
        }
    }
    Outcome {
        pass: errors == 0 && worst.iter().all(|&w| w <= GM_TOL),
        detail: format!(
            "kernel form {:.1e}, harmonic form {:.1e}, {errors} quadrature errors (tol {GM_TOL:.0e})",
            worst[0], worst[1]
        ),
    }
}

fn criterion_suite() -> Outcome {
    let cfg = SuiteConfig {
        trials_per_check: SUITE_TRIALS,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg).unwrap();
    let cells_ok = report
        .checks
        .iter()
        .all(|c| c.pass + c.fail + c.skip == SUITE_TRIALS);
    Outcome {
        pass: cells_ok && report.total_fail() == 0 && report.total_skip() == 0,
        detail: format!(
            "{} cells x {SUITE_TRIALS} trials: {} pass, {} fail, {} skip (tol {:.0e})",
            report.checks.len(),
            report.total_pass(),
            report.total_fail(),
            report.total_skip(),
            cfg.tol
        ),
    }
}

fn criterion_monotone() -> Outcome {
    let cfg = SuiteConfig {
        trials_per_check: SUITE_TRIALS,
        ..SuiteConfig::default()
    };
    let mut functions: Vec<ScalarFunction> = cfg
        .lambda_grid
        .iter()
        .map(|&l| ScalarFunction::Power(l))
        .collect();
    functions.push(ScalarFunction::Log);
    let (mut trials, mut fails) = (0, 0);
    for desc in &cfg.kinds {
        for f in &functions {
            for r in check_power_log_monotone_concave(f, *desc, &cfg).unwrap() {
                trials += 1;
                if !matches!(r.verdict, jbmeans::Verdict::Pass) {
                    fails += 1;
                }
            }
        }
    }
    Outcome {
        pass: fails == 0,
        detail: format!("{trials} trials, {fails} not passing"),
    }
}

fn criterion_probe() -> Outcome {
    let cfg = QuadratureConfig::scalar();
    let mut pass = true;
    let mut parts = Vec::new();
    for family in [
        FunctionFamily::PowerKernel { lambda: 0.5 },
        FunctionFamily::LogKernel,
    ] {
        let rec = uniformity_probe(family, 1.0, &cfg).unwrap();
        let ok = rec.levels.len() == 4 && rec.decays() && rec.finest() < PROBE_FINEST;
        pass &= ok;
        parts.push(format!(
            "{}: decreasing {}, finest {:.1e}",
            rec.family,
            rec.decays(),
            rec.finest()
        ));
    }
    Outcome {
        pass,
        detail: format!("{} (bound {PROBE_FINEST:.0e})", parts.join("; ")),
    }
}

fn criterion_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"trials_per_check": 50, "base_seed": 7}"#).unwrap();
    let mut reports = Vec::new();
    for fmt in ["json", "csv"] {
        for run in 0..2 {
            let out = dir.path().join(format!("report{run}.{fmt}"));
            let status = Command::new(env!("CARGO_BIN_EXE_jbmeans"))
                .args(["verify", "--config"])
                .arg(&cfg)
                .args(["--format", fmt, "--out"])
                .arg(&out)
                .status()
                .unwrap();
            if !status.success() {
                return Outcome {
                    pass: false,
                    detail: format!("verify exited with {status}"),
                };
            }
            reports.push(std::fs::read(&out).unwrap());
        }
    }
    let same = reports[0] == reports[1] && reports[2] == reports[3];
    Outcome {
        pass: same,
        detail: format!(
            "json {} bytes, csv {} bytes, identical across runs: {same}",
            reports[0].len(),
            reports[2].len()
        ),
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("algebra axioms", criterion_axioms),
        ("special-algebra consistency", criterion_special),
        ("scalar integral representations", criterion_scalar),
        ("geometric-mean integral forms", criterion_gm_integrals),
        ("inequality corpus", criterion_suite),
        ("operator monotone/concave x^l and log", criterion_monotone),
        ("uniformity probe", criterion_probe),
        ("determinism of verify", criterion_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
