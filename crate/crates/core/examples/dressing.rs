//! Dressing a pure-gauge su(2) frame with a tabulated diagonal I(λ).

use gcme::fields::{make_pure_gauge, Grid};
use gcme::lax::{dress, dressed_residual, DressingSpec, DressingTable};
use gcme::algebra::su2_from_coeffs;
use gcme::{CoeffTriple, Sign, Su2Prefactor};
use num_complex::Complex64;

fn main() -> gcme::Result<()> {
    let gens = [CoeffTriple::new(0.6, -0.2, 0.4), CoeffTriple::new(0.1, 0.5, -0.3), CoeffTriple::new(-0.4, 0.3, 0.7)]
        .map(|c| su2_from_coeffs(c, Su2Prefactor::HalfI).unwrap());

    let i = Complex64::new(0.0, 1.0);
    let mut table = DressingTable::default();
    for lambda in [0.25, 0.5, 1.0] {
        let d = vec![i * lambda, -i * lambda];
        table.insert(lambda, DressingSpec::new(d.clone(), d.iter().map(|z| z * 2.0).collect(), d, Sign::Minus)?);
    }

    for n in [9, 17, 33] {
        let grid = Grid::unit(3, n)?;
        let pg = make_pure_gauge(&gens, grid)?;
        let h = 1.0 / (n - 1) as f64;
        for lambda in table.lambdas() {
            let spec = table.at(lambda)?;
            let psi = dress(&pg.g, spec)?;
            let r = dressed_residual(&psi, &pg.connection, spec)?;
            let worst = r.iter().map(|f| f.interior_max_norm()).fold(0.0, f64::max);
            println!("n={n:<3} λ={lambda:<5} residual {worst:.3e}  residual/h² {:.3}", worst / (h * h));
        }
    }
    Ok(())
}
