//! Residuals of a closed-form pure-gauge connection and of a random one.

use gcme::curvature::{labels, residual_2p1};
use gcme::fields::{sample_connection, Grid, Scenario};
use gcme::{Beta, DerivativeMode};

fn main() -> gcme::Result<()> {
    let grid = Grid::unit(3, 32)?;
    for spec in ["pure-gauge(x=0.6:-0.2:0.4, y=0.1:0.5:-0.3, t=-0.4:0.3:0.7)", "random(amplitude=0.5)"] {
        let scenario = Scenario::parse(spec)?;
        let field = sample_connection(&scenario, grid, 11)?;
        for mode in [DerivativeMode::Analytic, DerivativeMode::Fd] {
            let r = residual_2p1(&field.to_so3(Beta::Plus, mode))?;
            let norms: Vec<String> = labels("so3", 3)
                .iter()
                .zip(&r)
                .map(|(l, f)| format!("{l}={:.2e}", f.interior_max_norm()))
                .collect();
            println!("{:<12} {:<9} {}", scenario.name(), format!("{mode:?}"), norms.join("  "));
        }
    }
    Ok(())
}
