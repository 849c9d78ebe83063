//! Jacobi eigendecomposition of a partial transpose, and the spectrum check
//! against local time reversal.

use bellsep::linalg::{hermitian_eig, partial_transpose_b};
use bellsep::states::singlet;
use bellsep::witness::local_time_reversal;

fn main() -> bellsep::Result<()> {
    let rho = singlet().density();
    let pt = partial_transpose_b(rho.mat())?;
    let eig = hermitian_eig(&pt)?;
    println!("spectrum of the partial transpose: {:?}", eig.values);
    println!(
        "reconstruction error {:.1e}",
        eig.reconstruct().max_diff(&pt)
    );
    let v = eig.vector(0);
    println!(
        "minimal eigenvector {:?}",
        v.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>()
    );

    let tr = hermitian_eig(&local_time_reversal(&rho))?;
    println!("after time reversal:              {:?}", tr.values);
    Ok(())
}
