//! Witness report for a few standard states.
//!
//! ```text
//! cargo run --example analyze_state
//! ```

use bellsep::states::{bell_state, werner, BellKind};
use bellsep::witness::{optimal_setting, simple_value};
use bellsep::{DensityMatrix, TestSetting};

fn main() -> bellsep::Result<()> {
    let mut states: Vec<(String, DensityMatrix)> = BellKind::ALL
        .iter()
        .map(|&k| (format!("{k:?}"), bell_state(k).density()))
        .collect();
    for beta in [0.2, 1.0 / 3.0, 0.5] {
        states.push((format!("werner({beta:.3})"), werner(beta)?));
    }
    states.push(("maximally mixed".into(), DensityMatrix::maximally_mixed()));

    println!(
        "{:<18} {:>10} {:>10} {:>10}  violated",
        "state", "lambda_min", "S", "simple"
    );
    for (name, rho) in &states {
        let r = optimal_setting(rho)?;
        let simple = simple_value(rho, &TestSetting::aligned())?;
        println!(
            "{name:<18} {:>10.6} {:>10.6} {:>10.6}  {}",
            r.lambda_min, r.s_value, simple, r.violated
        );
    }
    Ok(())
}
