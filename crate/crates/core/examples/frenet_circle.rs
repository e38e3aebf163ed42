//! Constant curvature and torsion: a circle, then a helix, exported as OBJ.

use gcme::fields::{sample_connection, AxisSpec, Grid, Scenario};
use gcme::transport::{curve_family, polyline_length, SqrtE, TransportOptions};
use gcme::{Beta, DerivativeMode};

fn main() -> gcme::Result<()> {
    let h = 1.0 / 128.0;
    let grid = Grid::new_2d(AxisSpec::new(0.0, h, 805)?, AxisSpec::new(0.0, h, 5)?);
    for spec in ["constants(k=1)", "constants(k=1, tau=0.4)"] {
        let conn = sample_connection(&Scenario::parse(spec)?, grid, 0)?.to_so3(Beta::Plus, DerivativeMode::Analytic);
        let fam = curve_family(&conn, &SqrtE::Constant(1.0), &TransportOptions::default())?;
        let c = &fam.curves[0];
        let far = c.iter().map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt()).fold(0.0, f64::max);
        println!("{spec:<24} length {:.5}  end {:?}  max planar distance {far:.5}", polyline_length(c), c.last().unwrap());
        if spec.contains("tau") {
            let path = std::env::temp_dir().join("gcme_helix.obj");
            fam.write_obj(std::fs::File::create(&path)?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
