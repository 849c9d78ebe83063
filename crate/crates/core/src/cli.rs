//! Command front end shared by the `bellsep` binary and the tests.
//!
//! Exit codes: 0 when the computation finished (a violation is data, not a
//! failure), 1 when an audit finds a discrepancy, 2 on bad input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{fmt_num, load_setting, load_state, to_output_json};
use crate::observables::TestSetting;
use crate::optimize::{maximize_violation, OptConfig, OptResult};
use crate::shots::{simulate_test, ShotEstimate, ShotPlan};
use crate::states::{rng_for, sample_state, werner, SampleKind};
use crate::witness::{
    bell_value, chsh_value, optimal_setting, ppt_lambda_min, simple_value, WitnessReport,
    VIOLATION_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISCREPANCY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "BELLSEP_SEED";

/// Largest tolerated |S − (1 − 4·λ_min)| on entangled audit members.
pub const AUDIT_GAP_TOL: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(
    name = "bellsep",
    version,
    about = "Two-qubit entanglement tests with complementary observables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one state: λ_min, the optimal setting and its violation.
    Analyze(AnalyzeArgs),
    /// Sweep the Werner family and emit CSV.
    SweepWerner(SweepArgs),
    /// Compare partial-transpose sign against detected violation on a random ensemble.
    Audit(AuditArgs),
    /// Simulate the finite-shot three-setting experiment.
    Simulate(SimulateArgs),
}

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    /// Preset (singlet, phi+, phi-, psi+, psi-, werner:<beta>, mixed:<seed>:<rank>) or state file.
    pub state: String,
    /// Also run the multi-start optimizer.
    #[arg(long)]
    pub optimize: bool,
    /// Also evaluate a CHSH baseline.
    #[arg(long)]
    pub chsh: bool,
    /// Evaluate at this setting (preset or file) in addition to the optimal one.
    #[arg(long)]
    pub settings: Option<String>,
    /// Write the report to this file as well.
    #[arg(long)]
    pub json: Option<String>,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Mixed,
    Separable,
    Pure,
}

#[derive(Debug, clap::Args)]
pub struct AuditArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Ensemble::Mixed)]
    pub ensemble: Ensemble,
    /// |λ_min| at or below this is not classified.
    #[arg(long, default_value_t = 1e-4)]
    pub deadband: f64,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    pub state: String,
    /// Preset (aligned, flipped-b3) or settings file.
    #[arg(long, default_value = "aligned")]
    pub settings: String,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Bootstrap resamples; 0 selects delta-method error bars.
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(err: &Error) -> Self {
        let obj = serde_json::json!({
            "error": { "kind": err.kind(), "message": err.to_string() }
        });
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("{obj}\n"),
        }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::SweepWerner(a) => cmd_sweep_werner(&a),
        Command::Audit(a) => cmd_audit(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    };
    result.unwrap_or_else(|e| Outcome::input_error(&e))
}

/// Bell and simple values at a caller-chosen setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingEvaluation {
    pub setting: TestSetting,
    pub s_value: f64,
    pub simple_value: f64,
    pub violated: bool,
}

/// CHSH value at tilted axes built from a pair of triads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshBaseline {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
    pub value: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: String,
    pub witness: WitnessReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_settings: Option<SettingEvaluation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshBaseline>,
    pub timing_ms: f64,
}

/// CHSH axes a₁ = A₃, a₂ = A₁, b₁ = −(B₁+B₃)/√2, b₂ = (B₁−B₃)/√2: for the
/// singlet with aligned triads this is the Tsirelson-optimal choice.
pub fn chsh_baseline(rho: &crate::DensityMatrix, s: &TestSetting) -> Result<ChshBaseline> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = (s.a.axes(), s.b.axes());
    let a1 = a[2];
    let a2 = a[0];
    let b1 = [0, 1, 2].map(|k| -h * (b[0][k] + b[2][k]));
    let b2 = [0, 1, 2].map(|k| h * (b[0][k] - b[2][k]));
    let value = chsh_value(rho, &a1, &a2, &b1, &b2)?;
    Ok(ChshBaseline {
        a1,
        a2,
        b1,
        b2,
        value,
        violated: value > 2.0 + VIOLATION_TOL,
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let start = Instant::now();
    let state = load_state(&args.state)?;
    let rho = &state.rho;
    let witness = optimal_setting(rho)?;

    let at_settings = match &args.settings {
        Some(spec) => {
            let setting = load_setting(spec)?;
            let s_value = bell_value(rho, &setting)?;
            Some(SettingEvaluation {
                setting,
                s_value,
                simple_value: simple_value(rho, &setting)?,
                violated: s_value > 1.0 + VIOLATION_TOL,
            })
        }
        None => None,
    };
    let optimizer = if args.optimize {
        let cfg = OptConfig {
            restarts: args.restarts,
            seed: args.seed,
            ..OptConfig::default()
        };
        Some(maximize_violation(rho, &cfg)?)
    } else {
        None
    };
    let chsh = if args.chsh {
        let frames = at_settings
            .as_ref()
            .map_or(witness.setting_used, |e| e.setting);
        Some(chsh_baseline(rho, &frames)?)
    } else {
        None
    };

    let report = AnalysisReport {
        input: state.descriptor,
        witness,
        at_settings,
        optimizer,
        chsh,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let text = to_output_json(&report)?;
    if let Some(path) = &args.json {
        fs::write(path, &text).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    }
    Ok(Outcome::ok(text))
}

/// One row of the Werner sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub lambda_min: f64,
    pub s_opt: f64,
    pub simple_aligned: f64,
    pub violated: bool,
}

pub const SWEEP_HEADER: &str = "beta,lambda_min,s_opt,simple_aligned,violated";

pub fn sweep_werner(from: f64, to: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if !(0.0 <= from && from <= to && to <= 1.0) || steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= from <= to <= 1 and steps >= 2, got from={from} to={to} steps={steps}"
        )));
    }
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let beta = from + (to - from) * i as f64 / (steps - 1) as f64;
            let rho = werner(beta)?;
            let report = optimal_setting(&rho)?;
            Ok(SweepRow {
                beta,
                lambda_min: report.lambda_min,
                s_opt: report.s_value,
                simple_aligned: simple_value(&rho, &TestSetting::aligned())?,
                violated: report.violated,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.beta),
            fmt_num(r.lambda_min),
            fmt_num(r.s_opt),
            fmt_num(r.simple_aligned),
            r.violated
        );
    }
    out
}

pub fn cmd_sweep_werner(args: &SweepArgs) -> Result<Outcome> {
    let csv = sweep_csv(&sweep_werner(args.from, args.to, args.steps)?);
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(csv)),
    }
}

/// Per-member audit record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditMember {
    pub lambda_min: f64,
    pub s_constructive: f64,
    pub s_optimizer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub ensemble: Ensemble,
    pub n: usize,
    pub seed: u64,
    pub deadband: f64,
    /// Members with λ_min < −deadband.
    pub entangled: usize,
    /// Entangled members flagged by both the constructive setting and the optimizer.
    pub detected: usize,
    /// Members with |λ_min| ≤ deadband.
    pub undecided: usize,
    pub misclassified: usize,
    /// Largest |S − (1 − 4·λ_min)| over entangled members, either method.
    pub max_abs_gap: f64,
    pub min_lambda: f64,
    pub max_s_value: f64,
}

impl AuditSummary {
    pub fn passed(&self) -> bool {
        self.misclassified == 0 && self.max_abs_gap < AUDIT_GAP_TOL
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws member `index` of an audit ensemble.
pub fn audit_state(ensemble: Ensemble, seed: u64, index: u64) -> Result<crate::DensityMatrix> {
    let mut rng = rng_for(seed, index);
    let kind = match ensemble {
        Ensemble::Mixed => SampleKind::Mixed {
            rank: rng.random_range(1..=4),
        },
        Ensemble::Separable => SampleKind::Separable {
            terms: rng.random_range(1..=4),
        },
        Ensemble::Pure => SampleKind::PureHaar,
    };
    Ok(sample_state(kind, &mut rng)?.density())
}

pub fn audit_members(
    ensemble: Ensemble,
    n: usize,
    seed: u64,
    restarts: usize,
) -> Result<Vec<AuditMember>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let rho = audit_state(ensemble, seed, i)?;
            let constructive = optimal_setting(&rho)?;
            let cfg = OptConfig {
                restarts,
                seed: splitmix(seed ^ splitmix(i)),
                ..OptConfig::default()
            };
            let opt = maximize_violation(&rho, &cfg)?;
            Ok(AuditMember {
                lambda_min: ppt_lambda_min(&rho),
                s_constructive: constructive.s_value,
                s_optimizer: opt.best_value,
            })
        })
        .collect()
}

pub fn summarize_audit(
    ensemble: Ensemble,
    seed: u64,
    deadband: f64,
    members: &[AuditMember],
) -> AuditSummary {
    let mut s = AuditSummary {
        ensemble,
        n: members.len(),
        seed,
        deadband,
        entangled: 0,
        detected: 0,
        undecided: 0,
        misclassified: 0,
        max_abs_gap: 0.0,
        min_lambda: f64::INFINITY,
        max_s_value: f64::NEG_INFINITY,
    };
    let violates = |v: f64| v > 1.0 + VIOLATION_TOL;
    for m in members {
        s.min_lambda = s.min_lambda.min(m.lambda_min);
        s.max_s_value = s.max_s_value.max(m.s_constructive).max(m.s_optimizer);
        if m.lambda_min < -deadband {
            s.entangled += 1;
            let both = violates(m.s_constructive) && violates(m.s_optimizer);
            if both {
                s.detected += 1;
            } else {
                s.misclassified += 1;
            }
            let predicted = 1.0 - 4.0 * m.lambda_min;
            s.max_abs_gap = s
                .max_abs_gap
                .max((m.s_constructive - predicted).abs())
                .max((m.s_optimizer - predicted).abs());
        } else if m.lambda_min > deadband {
            if violates(m.s_constructive) || violates(m.s_optimizer) {
                s.misclassified += 1;
            }
        } else {
            s.undecided += 1;
        }
    }
    s
}

pub fn cmd_audit(args: &AuditArgs) -> Result<Outcome> {
    if args.n == 0 {
        return Err(Error::InvalidParameter("audit needs n >= 1".into()));
    }
    if !(args.deadband >= 0.0) {
        return Err(Error::InvalidParameter(
            "deadband must be non-negative".into(),
        ));
    }
    let members = audit_members(args.ensemble, args.n, args.seed, args.restarts)?;
    let summary = summarize_audit(args.ensemble, args.seed, args.deadband, &members);
    let code = if summary.passed() {
        EXIT_OK
    } else {
        EXIT_DISCREPANCY
    };
    Ok(Outcome {
        code,
        stdout: to_output_json(&summary)?,
        stderr: String::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub input: String,
    pub setting: TestSetting,
    pub plan: ShotPlan,
    pub estimate: ShotEstimate,
    /// Exact S at the same setting.
    pub exact_s: f64,
    /// (ŝ − 1)/se; null when the error bar is zero.
    pub z_score: Option<f64>,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let state = load_state(&args.state)?;
    let setting = load_setting(&args.settings)?;
    setting.require_same()?;
    let plan = ShotPlan {
        shots_per_setting: args.shots,
        seed: args.seed,
        bootstrap_resamples: args.bootstrap,
    };
    let estimate = simulate_test(&state.rho, &setting, &plan)?;
    let z = estimate.z_score();
    let report = SimulationReport {
        input: state.descriptor,
        setting,
        plan,
        exact_s: bell_value(&state.rho, &setting)?,
        z_score: z.is_finite().then_some(z),
        estimate,
    };
    Ok(Outcome::ok(to_output_json(&report)?))
}
