//! Plot-ready CSV for the Werner family. Pass a path to write it to a file.
//!
//! ```text
//! cargo run --example werner_sweep -- werner.csv
//! ```

use bellsep::cli::{sweep_csv, sweep_werner};

fn main() -> bellsep::Result<()> {
    let rows = sweep_werner(0.0, 1.0, 31)?;
    let csv = sweep_csv(&rows);
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, csv).map_err(|e| bellsep::Error::Io(e.to_string()))?,
        None => print!("{csv}"),
    }
    let first = rows.iter().find(|r| r.violated).expect("beta = 1 violates");
    eprintln!("first violating grid point: beta = {:.4}", first.beta);
    Ok(())
}
