//! Small detection audit over the three ensembles.

use bellsep::cli::{audit_members, summarize_audit, Ensemble};

fn main() -> bellsep::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    for ensemble in [Ensemble::Mixed, Ensemble::Separable, Ensemble::Pure] {
        let members = audit_members(ensemble, n, 42, 32)?;
        let s = summarize_audit(ensemble, 42, 1e-4, &members);
        println!(
            "{ensemble:?}: n {} entangled {} detected {} undecided {} misclassified {} max gap {:.2e} -> {}",
            s.n,
            s.entangled,
            s.detected,
            s.undecided,
            s.misclassified,
            s.max_abs_gap,
            if s.passed() { "ok" } else { "DISCREPANCY" }
        );
    }
    Ok(())
}
