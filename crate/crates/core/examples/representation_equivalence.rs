//! The su(2) residuals mapped to so(3) agree with the so(3) residuals only for
//! the i/2 prefactor.

use gcme::curvature::equivalence_su2_so3;
use gcme::fields::{make_random_smooth, Grid};
use gcme::{DerivativeMode, Su2Prefactor};

fn main() -> gcme::Result<()> {
    let grid = Grid::unit(3, 16)?;
    println!("seed   i/2 deviation   1/(2i) deviation   2·bracket");
    for seed in 1..=5 {
        let field = make_random_smooth(seed, 1.0, 2, grid)?;
        let good = equivalence_su2_so3(&field, Su2Prefactor::HalfI, DerivativeMode::Analytic)?;
        let bad = equivalence_su2_so3(&field, Su2Prefactor::InverseTwoI, DerivativeMode::Analytic)?;
        println!("{seed:>4}   {:>13.2e}   {:>16.4}   {:>9.4}", good.deviation, bad.deviation, 2.0 * bad.bracket_max);
    }
    Ok(())
}
