//! End-to-end acceptance suite. Runs every criterion in order, prints one
//! PASS/FAIL line each, and fails if any criterion failed.
//!
//! ```text
//! cargo test -p bellsep --test acceptance -- --nocapture
//! ```

use std::time::{Duration, Instant};

use bellsep::cli::{self, sweep_werner, EXIT_OK};
use bellsep::observables::{correlators, CorrelationTensor};
use bellsep::rotation::{norm3, Quaternion};
use bellsep::shots::{simulate_test, ShotPlan};
use bellsep::states::{random_pure, rng_for, sample_state, singlet, SampleKind, StateRng};
use bellsep::witness::{
    bell_value, bell_value_with, chsh_value, lemma_residual, optimal_setting, ppt_lambda_min,
    robertson_check, OrientationPolicy,
};
use bellsep::{maximize_violation, DensityMatrix, OptConfig, TestSetting, Triad};
use rand::Rng;

/// Worst values seen by the bound checks of criterion 8.
#[derive(Debug)]
struct Bounds {
    max_bell: f64,
    max_disk: f64,
    min_lambda: f64,
}

impl Bounds {
    fn new() -> Self {
        Bounds {
            max_bell: f64::NEG_INFINITY,
            max_disk: f64::NEG_INFINITY,
            min_lambda: f64::INFINITY,
        }
    }

    fn state(&mut self, rho: &DensityMatrix) {
        self.min_lambda = self.min_lambda.min(ppt_lambda_min(rho));
    }

    fn setting(&mut self, rho: &DensityMatrix, s: &TestSetting) {
        let st = correlators(rho, s);
        self.max_bell = self.max_bell.max(st.bell_value());
        self.max_disk = self.max_disk.max(st.x1 * st.x1 + st.x2 * st.x2);
    }

    fn value(&mut self, s: f64) {
        self.max_bell = self.max_bell.max(s);
    }
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn random_triad(rng: &mut StateRng) -> Triad {
    Triad::from_rotation(&Quaternion::random(rng)).unwrap()
}

/// Random same-orientation setting; both frames are left-handed half the time.
fn random_same(rng: &mut StateRng) -> TestSetting {
    let (a, b) = (random_triad(rng), random_triad(rng));
    if rng.random_bool(0.5) {
        TestSetting::new(a.negated(), b.negated())
    } else {
        TestSetting::new(a, b)
    }
}

fn random_opposite(rng: &mut StateRng) -> TestSetting {
    let (a, b) = (random_triad(rng), random_triad(rng));
    if rng.random_bool(0.5) {
        TestSetting::new(a.negated(), b)
    } else {
        TestSetting::new(a, b.negated())
    }
}

fn random_unit(rng: &mut StateRng) -> [f64; 3] {
    let r = random_triad(rng);
    *r.axis(0)
}

fn entangled_mixed(rng: &mut StateRng) -> (DensityMatrix, f64) {
    loop {
        let rank = rng.random_range(2..=3);
        let rho = sample_state(SampleKind::Mixed { rank }, rng)
            .unwrap()
            .density();
        let lm = ppt_lambda_min(&rho);
        if lm < -1e-4 {
            return (rho, lm);
        }
    }
}

fn criterion_1(b: &mut Bounds) -> Outcome {
    let rho = singlet().density();
    let w = optimal_setting(&rho).unwrap();
    let opt = maximize_violation(&rho, &OptConfig::with_seed(1)).unwrap();
    b.state(&rho);
    b.value(w.s_value);
    b.value(opt.best_value);
    check(
        (w.s_value - 3.0).abs() < 1e-6
            && (opt.best_value - 3.0).abs() < 1e-6
            && (w.lambda_min + 0.5).abs() < 1e-10,
        format!(
            "singlet constructive S = {:.12}, optimizer S = {:.12}, lambda_min = {:.3e}",
            w.s_value, opt.best_value, w.lambda_min
        ),
    )
}

fn criterion_2(b: &mut Bounds) -> Outcome {
    let mut rng = rng_for(2024, 0);
    let (mut gap_c, mut gap_o) = (0.0f64, 0.0f64);
    for i in 0..200u64 {
        let (rho, lm) = entangled_mixed(&mut rng);
        let predicted = 1.0 - 4.0 * lm;
        let w = optimal_setting(&rho).unwrap();
        let opt = maximize_violation(&rho, &OptConfig::with_seed(1000 + i)).unwrap();
        gap_c = gap_c.max((w.s_value - predicted).abs());
        gap_o = gap_o.max((opt.best_value - predicted).abs());
        b.state(&rho);
        b.setting(&rho, &w.setting_used);
        b.setting(&rho, &opt.best_setting);
    }
    check(
        gap_c < 1e-7 && gap_o < 1e-5,
        format!(
            "200 entangled states, max constructive gap {gap_c:.2e}, max optimizer gap {gap_o:.2e}"
        ),
    )
}

fn criterion_3(b: &mut Bounds) -> Outcome {
    let out = cli::run([
        "bellsep",
        "audit",
        "--n",
        "1000",
        "--seed",
        "42",
        "--ensemble",
        "mixed",
        "--deadband",
        "1e-4",
    ]);
    let summary: serde_json::Value = serde_json::from_str(&out.stdout).unwrap_or_default();
    if let Some(v) = summary["max_s_value"].as_f64() {
        b.value(v);
    }
    if let Some(v) = summary["min_lambda"].as_f64() {
        b.min_lambda = b.min_lambda.min(v);
    }
    check(
        out.code == EXIT_OK,
        format!(
            "audit exit {}: entangled {}, detected {}, misclassified {}, max gap {}",
            out.code,
            summary["entangled"],
            summary["detected"],
            summary["misclassified"],
            summary["max_abs_gap"]
        ),
    )
}

fn criterion_4(b: &mut Bounds) -> Outcome {
    let rows = sweep_werner(0.0, 1.0, 101).unwrap();
    let mut ok = true;
    let (mut lam_err, mut simple_err) = (0.0f64, 0.0f64);
    for r in &rows {
        lam_err = lam_err.max((r.lambda_min - (1.0 - 3.0 * r.beta) / 4.0).abs());
        simple_err = simple_err.max((r.simple_aligned - 3.0 * r.beta).abs());
        b.value(r.s_opt);
        b.min_lambda = b.min_lambda.min(r.lambda_min);
        // The crossing sits between grid points 0.33 and 0.34.
        if r.beta < 1.0 / 3.0 {
            ok &= !r.violated && r.s_opt <= 1.0 + 1e-9;
        } else {
            ok &= r.violated && r.s_opt > 1.0;
        }
    }
    ok &= (rows[0].s_opt).abs() < 1e-9 && (rows[100].s_opt - 3.0).abs() < 1e-6;

    // A grid that contains 1/3 exactly.
    let fine = sweep_werner(0.0, 1.0, 301).unwrap();
    let third = fine[100];
    ok &= third.lambda_min.abs() < 1e-9 && (third.s_opt - 1.0).abs() < 1e-6;

    ok &= lam_err < 1e-10 && simple_err < 1e-10;
    check(
        ok,
        format!(
            "lambda err {lam_err:.1e}, simple err {simple_err:.1e}, crossing between beta 0.33 and 0.34, at 1/3: lambda {:.1e} S {:.9}",
            third.lambda_min, third.s_opt
        ),
    )
}

fn criterion_5(_: &mut Bounds) -> Outcome {
    let mut rng = rng_for(5, 0);
    let (mut comm, mut squares) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let x = random_same(&mut rng).x_operators();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            comm = comm.max(x[i].commutator(&x[j]).max_abs());
        }
        let y = random_opposite(&mut rng).x_operators();
        let sq: Vec<_> = y.iter().map(|m| m * m).collect();
        squares = squares
            .max(sq[0].max_diff(&sq[1]))
            .max(sq[0].max_diff(&sq[2]));
    }
    check(
        comm < 1e-12 && squares < 1e-12,
        format!("1000 settings each, max commutator {comm:.1e}, max square mismatch {squares:.1e}"),
    )
}

fn criterion_6(b: &mut Bounds) -> Outcome {
    let mut rng = rng_for(6, 0);
    let (mut worst_det, mut worst_rel) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut ok = true;
    for i in 0..10_000 {
        let kind = match i % 3 {
            0 => SampleKind::PureHaar,
            1 => SampleKind::Mixed { rank: 2 },
            _ => SampleKind::Mixed { rank: 4 },
        };
        let rho = sample_state(kind, &mut rng).unwrap().density();
        let s = random_opposite(&mut rng);
        let r = robertson_check(&rho, &s).unwrap();
        ok &= r.determinants_hold(1e-9) && r.relation_holds(1e-9);
        worst_det = worst_det.max(r.det_gamma - r.det_sigma);
        worst_rel = worst_rel.max(r.eq3_lhs - r.eq3_rhs);
        b.state(&rho);
        b.setting(&rho, &s);
        b.value(bell_value_with(&rho, &s, OrientationPolicy::Permissive).unwrap());
    }
    check(
        ok,
        format!("10^4 pairs, max det(Gamma)-det(Sigma) {worst_det:.2e}, max relation excess {worst_rel:.2e}"),
    )
}

fn criterion_7(_: &mut Bounds) -> Outcome {
    let mut rng = rng_for(7, 0);
    let worst = (0..1000)
        .map(|_| lemma_residual(&random_pure(&mut rng)).unwrap())
        .fold(0.0f64, f64::max);
    check(
        worst < 1e-9,
        format!("1000 Haar states, max residual {worst:.2e}"),
    )
}

fn criterion_8(b: &Bounds) -> Outcome {
    check(
        b.max_bell <= 3.0 + 1e-9 && b.max_disk <= 4.0 + 1e-9 && b.min_lambda >= -0.5 - 1e-9,
        format!(
            "max S {:.12}, max x1^2+x2^2 {:.12}, min lambda {:.12}",
            b.max_bell, b.max_disk, b.min_lambda
        ),
    )
}

fn criterion_9(_: &mut Bounds) -> Outcome {
    let rho = singlet().density();
    let aligned = TestSetting::aligned();
    let est = simulate_test(&rho, &aligned, &ShotPlan::new(1_000_000, 7)).unwrap();
    // Aligned frames on the singlet give deterministic outcomes, so se = 0.
    let mut ok = (est.s_hat - 3.0).abs() <= 5.0 * est.s_se && est.s_se < 0.01;

    // 1/sqrt(n) scaling on random entangled states with non-degenerate outcomes.
    let mut rng = rng_for(9, 0);
    let mut ratios = Vec::new();
    for k in 0..20u64 {
        let (rho, _) = entangled_mixed(&mut rng);
        let s = optimal_setting(&rho).unwrap().setting_used;
        let se: Vec<f64> = [1_000u64, 10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| {
                let plan = ShotPlan {
                    shots_per_setting: n,
                    seed: 100 + k,
                    bootstrap_resamples: 0,
                };
                simulate_test(&rho, &s, &plan).unwrap().s_se
            })
            .collect();
        for w in se.windows(2) {
            ratios.push(w[0] / w[1]);
        }
    }
    let sqrt10 = 10f64.sqrt();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &r| {
            (l.min(r), h.max(r))
        });
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    ok &= lo > 0.8 * sqrt10 && hi < 1.2 * sqrt10 && (mean / sqrt10 - 1.0).abs() < 0.05;
    check(
        ok,
        format!(
            "singlet s_hat {:.6} se {:.2e}; se ratio per 10x shots in [{lo:.3}, {hi:.3}], mean {mean:.3} (sqrt 10 = {sqrt10:.3})",
            est.s_hat, est.s_se
        ),
    )
}

fn criterion_10(_: &mut Bounds) -> Outcome {
    let rho = singlet().density();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = chsh_value(
        &rho,
        &[0.0, 0.0, 1.0],
        &[1.0, 0.0, 0.0],
        &[-h, 0.0, -h],
        &[h, 0.0, -h],
    )
    .unwrap();
    let tsirelson = 2.0 * 2f64.sqrt();
    let mut rng = rng_for(10, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let terms = rng.random_range(1..=4);
        let sep = sample_state(SampleKind::Separable { terms }, &mut rng)
            .unwrap()
            .density();
        let axes: Vec<[f64; 3]> = (0..4).map(|_| random_unit(&mut rng)).collect();
        debug_assert!(axes.iter().all(|a| (norm3(a) - 1.0).abs() < 1e-12));
        let c = chsh_value(&sep, &axes[0], &axes[1], &axes[2], &axes[3]).unwrap();
        worst = worst.max(c.abs());
    }
    check(
        (v - tsirelson).abs() < 1e-10 && worst <= 2.0 + 1e-9,
        format!("singlet CHSH {v:.12}, max |CHSH| over 1000 separable draws {worst:.9}"),
    )
}

#[test]
fn acceptance_criteria() {
    let mut bounds = Bounds::new();
    type Criterion = fn(&mut Bounds) -> Outcome;
    let suite: [(u8, &str, Criterion, u64); 9] = [
        (1, "singlet maximal violation", criterion_1, 1),
        (
            2,
            "maximal violation equals 1 - 4 lambda_min",
            criterion_2,
            120,
        ),
        (3, "detection audit", criterion_3, 300),
        (4, "Werner threshold", criterion_4, 30),
        (5, "operator identities", criterion_5, 10),
        (6, "indeterminacy relation", criterion_6, 60),
        (7, "pure-state expansion identity", criterion_7, 10),
        (9, "finite-shot convergence", criterion_9, 60),
        (10, "CHSH baseline", criterion_10, 30),
    ];

    let mut failed = Vec::new();
    let mut line = |n: u8, name: &str, out: Outcome, elapsed: Option<(Duration, u64)>| {
        let mut ok = out.ok;
        let timing = match elapsed {
            Some((t, limit)) => {
                ok &= t.as_secs_f64() < limit as f64;
                format!(" [{:.2} s, limit {limit} s]", t.as_secs_f64())
            }
            None => String::new(),
        };
        println!(
            "{} criterion {n}: {name}: {}{timing}",
            if ok { "PASS" } else { "FAIL" },
            out.detail
        );
        if !ok {
            failed.push(n);
        }
    };

    for (n, name, run, limit) in suite {
        let start = Instant::now();
        let out = run(&mut bounds);
        line(n, name, out, Some((start.elapsed(), limit)));
        if n == 7 {
            line(8, "global bounds", criterion_8(&bounds), None);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn optimizer_and_tensor_agree_on_audited_members() {
    // Fast-path statistics must match the trace-based ones used by the audit.
    let mut rng = rng_for(77, 0);
    for _ in 0..200 {
        let (rho, _) = entangled_mixed(&mut rng);
        let s = random_same(&mut rng);
        let fast = CorrelationTensor::of(&rho).stats(&s).bell_value();
        assert!((fast - bell_value(&rho, &s).unwrap()).abs() < 1e-12);
    }
}
