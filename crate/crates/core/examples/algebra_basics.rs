//! Coefficient triples, both matrix forms, the bracket and the exponential.

use gcme::algebra::{commutator, expm_so3, group_drift, iso_to_so3, so3_coeffs, so3_from_coeffs, su2_from_coeffs, MatrixValue};
use gcme::{Beta, CoeffTriple, Su2Prefactor};

fn main() -> gcme::Result<()> {
    let a = CoeffTriple::new(0.4, -0.1, 0.7);
    let b = CoeffTriple::new(-0.2, 0.5, 0.3);

    let (x, y) = (so3_from_coeffs(a, Beta::Plus)?, so3_from_coeffs(b, Beta::Plus)?);
    println!("so(3) form of {a:?}:{x}");
    println!("[X, Y] coefficients: {:?}", so3_coeffs(&commutator(&x, &y)));

    // the commutator survives the su(2) -> so(3) isomorphism
    let (u, v) = (su2_from_coeffs(a, Su2Prefactor::HalfI)?, su2_from_coeffs(b, Su2Prefactor::HalfI)?);
    let mapped = iso_to_so3(&commutator(&u, &v), Su2Prefactor::HalfI)?;
    println!("|iso([U,V]) - [X,Y]| = {:.1e}", (mapped - commutator(&x, &y)).norm());

    let g = expm_so3(&x)?;
    println!("exp(X) orthogonality drift {:.1e}, det {:.15}", group_drift(&g), g.determinant());
    println!("exp(U) unitarity drift {:.1e}", group_drift(&u.expm()));

    // β = −1 gives the split form so(2,1)
    let split = so3_from_coeffs(a, Beta::Minus)?;
    println!("β = −1 form:{split}");
    Ok(())
}
