//! Self-dual Yang–Mills curvature of the complexified potentials, compared with
//! the frame residuals for each candidate index map.

use gcme::embeddings::{sdym_identity_deviations, SdymMap};
use gcme::fields::{make_random_smooth, Grid};
use gcme::{Beta, DerivativeMode};

fn main() -> gcme::Result<()> {
    let grid = Grid::unit(3, 12)?;
    let conn = make_random_smooth(8, 1.0, 2, grid)?.to_so3(Beta::Plus, DerivativeMode::Analytic);
    println!("{:<66} {:>10} {:>10} {:>10}", "map", "F_ab", "F_abar", "trace");
    for map in SdymMap::all() {
        let [a, b, c] = sdym_identity_deviations(&conn, map)?.max();
        let tag = if map == SdymMap::default() { "  <- default" } else { "" };
        println!("{:<66} {a:>10.2e} {b:>10.2e} {c:>10.2e}{tag}", format!("{map:?}"));
    }
    Ok(())
}
