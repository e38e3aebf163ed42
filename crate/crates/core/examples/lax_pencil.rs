//! Operator pencils: the λ-expansion of their commutator against the
//! flipped-bracket residuals, checked by an independent λ-sweep.

use gcme::curvature::residual_2p1_signed;
use gcme::fields::{make_random_smooth, Grid};
use gcme::lax::{coeffs_to_gcme, gcme_pencils, lambda_sweep, mapping_deviation, pencil_commutator_at, pencil_commutator_coeffs, pencil_target, PencilSign};
use gcme::{Beta, DerivativeMode, Sign};

fn main() -> gcme::Result<()> {
    let grid = Grid::unit(3, 16)?;
    let conn = make_random_smooth(3, 1.0, 2, grid)?.to_so3(Beta::Plus, DerivativeMode::Analytic);
    let (p1, p2) = gcme_pencils(&conn, PencilSign::Subtract)?;

    let coeffs = pencil_commutator_coeffs(&p1, &p2)?;
    for (k, c) in coeffs.iter().enumerate() {
        println!("λ^{k} coefficient: max {:.4}", c.max_norm());
    }
    println!("mapping deviation: {:.2e}", mapping_deviation(&coeffs, &pencil_target(&conn)?)?);

    let mapped = coeffs_to_gcme(&coeffs)?;
    let flipped = residual_2p1_signed(&conn, Sign::Minus)?;
    for (m, r) in mapped.iter().zip(&flipped) {
        println!("  mapped {:.6}  flipped residual {:.6}", m.max_norm(), r.max_norm());
    }

    let swept = lambda_sweep(&p1, &p2, [0.0, 2.0, -0.5])?;
    let sweep_dev = (0..3).map(|k| swept[k].sub(&coeffs[k]).map(|d| d.max_norm())).collect::<gcme::Result<Vec<_>>>()?;
    println!("λ-sweep vs expansion: {:.1e} {:.1e} {:.1e}", sweep_dev[0], sweep_dev[1], sweep_dev[2]);

    let at = pencil_commutator_at(&p1, &p2, 0.3)?;
    println!("[P1, P2] at λ = 0.3: max {:.4}", at.max_norm());
    Ok(())
}
