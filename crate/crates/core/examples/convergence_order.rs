//! Observed order of the finite-difference residual on an analytic 1+1 scenario.

use gcme::curvature::residual_1p1_component;
use gcme::fields::{sample_connection, Grid, Scenario};
use gcme::DerivativeMode;

fn main() -> gcme::Result<()> {
    let s = Scenario::parse("analytic(k=sin(x+t), sigma=cos(2x)t, tau=x^2, omega1=exp(-t)x, omega2=sin(t), omega3=cos(x)cos(t))")?;
    let mut prev: Option<f64> = None;
    for n in [16usize, 32, 64, 128] {
        let field = sample_connection(&s, Grid::uniform(2, n + 1, 1.0 / n as f64)?, 0)?;
        let fd = residual_1p1_component(&field, DerivativeMode::Fd)?;
        let exact = residual_1p1_component(&field, DerivativeMode::Analytic)?;
        let err = (0..3).map(|k| fd[k].sub(&exact[k]).map(|d| d.interior_max_norm())).collect::<gcme::Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        match prev {
            Some(p) => println!("h = 1/{n:<4} error {err:.3e}  order {:.3}", (p / err).log2()),
            None => println!("h = 1/{n:<4} error {err:.3e}"),
        }
        prev = Some(err);
    }
    Ok(())
}
