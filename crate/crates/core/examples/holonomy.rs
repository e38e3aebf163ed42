//! Plaquette holonomy: zero on flat input, h²·|R| on curved input.

use gcme::curvature::residual_2p1;
use gcme::fields::{make_random_smooth, sample_connection, Grid, Scenario};
use gcme::transport::{path_independence, plane_residual_index, plaquette_defect, GridPath, TransportOptions};
use gcme::{Axis, Beta, DerivativeMode};

fn main() -> gcme::Result<()> {
    let opts = TransportOptions::default();
    let plane = (Axis::X, Axis::Y);
    println!("   n   defect      defect/h²   |R| at corner");
    for n in [16usize, 32, 64] {
        let grid = Grid::unit(3, n + 1)?;
        let conn = make_random_smooth(7, 1.0, 2, grid)?.to_so3(Beta::Plus, DerivativeMode::Analytic);
        let c = [n / 2; 3];
        let d = plaquette_defect(&conn, c, plane, 1, &opts)?;
        let r = residual_2p1(&conn)?[plane_residual_index(plane)?].at(c).norm();
        println!("{n:>4}   {d:.3e}   {:>9.4}   {r:.4}", d * (n * n) as f64);
    }

    let grid = Grid::unit(3, 33)?;
    let flat = sample_connection(&Scenario::parse("pure-gauge(x=0.6:-0.2:0.4, y=0.1:0.5:-0.3, t=-0.4:0.3:0.7)")?, grid, 0)?
        .to_so3(Beta::Plus, DerivativeMode::Analytic);
    let p1 = GridPath::parse([0, 0, 0], "32+x 32+y 32+t")?;
    let p2 = GridPath::parse([0, 0, 0], "16+t 32+y 32+x 16+t")?;
    println!("flat: plaquette defect {:.1e}, path discrepancy {:.1e}", plaquette_defect(&flat, [5, 9, 3], plane, 4, &opts)?, path_independence(&flat, &p1, &p2, &opts)?);
    Ok(())
}
