//! Sign-convention search over the 64 candidates against the standard oracles.

use gcme::lax::calibrate::{calibrate, evaluate, standard_oracles, ChoiceSpace, Tolerances};

fn main() -> gcme::Result<()> {
    let oracles = standard_oracles(10, 42)?;
    let space = ChoiceSpace::full();
    let tol = Tolerances::default();
    let passing = space
        .conventions()
        .iter()
        .map(|c| evaluate(c, &oracles, &tol))
        .collect::<gcme::Result<Vec<_>>>()?
        .into_iter()
        .filter(|r| r.passed)
        .count();
    println!("{passing} of {} candidates pass", space.conventions().len());

    let conv = calibrate(&space, &oracles)?;
    println!("resolved: {}", conv.label());
    println!("{}", conv.to_json()?);
    Ok(())
}
