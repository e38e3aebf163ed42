//! Exhaustive search over sign conventions.
//!
//! Each candidate convention is scored on every oracle scenario by four
//! checks:
//!
//! * `equivalence`: su(2) vs so(3) residual deviation under the prefactor
//! * `pencil`: pencil coefficients mapped back vs the flipped-bracket residuals
//! * `dressing`: dressed-system residual of a pure-gauge su(2) frame, against `C·h²`
//! * `sdym` / `ymhb`: self-dual identities and the Bogomolny pencil mapping
//!
//! Exactly one candidate must pass everything. Bracket signs cannot be seen
//! on oracles whose connection values all commute, so such oracles alone
//! leave the search ambiguous.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{gcme_pencils, mapping_deviation, pencil_commutator_coeffs, pencil_target, PencilSign, Provenance, SignConvention};
use crate::algebra::{su2_unchecked, CoeffTriple, Sign, Su2, Su2Prefactor};
use crate::curvature::{equivalence_su2_so3, GridMeta};
use crate::embeddings::{sdym_identity_deviations, ymhb_pencil_target, ymhb_pencils, SdymMap};
use crate::error::{Error, Result};
use crate::fields::{make_pure_gauge, sample_connection, slot_triple, Axis, CoeffField, ConnectionField, DerivativeMode, Grid, Scenario};
use crate::lax::dressing::{dress, dressed_residual, DressingSpec};

/// Candidate values for each convention entry.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChoiceSpace {
    pub prefactors: Vec<Su2Prefactor>,
    pub pencil_signs: Vec<PencilSign>,
    pub dressing_signs: Vec<Sign>,
    pub sdym_maps: Vec<SdymMap>,
}

impl ChoiceSpace {
    /// All 64 combinations.
    pub fn full() -> Self {
        ChoiceSpace {
            prefactors: vec![Su2Prefactor::HalfI, Su2Prefactor::InverseTwoI],
            pencil_signs: vec![PencilSign::Subtract, PencilSign::Add],
            dressing_signs: vec![Sign::Minus, Sign::Plus],
            sdym_maps: SdymMap::all(),
        }
    }

    /// A single combination.
    pub fn only(c: &SignConvention) -> Self {
        ChoiceSpace {
            prefactors: vec![c.su2_prefactor],
            pencil_signs: vec![c.pencil_sign],
            dressing_signs: vec![c.dressing_sign],
            sdym_maps: vec![c.sdym_map],
        }
    }

    /// Candidates in a fixed enumeration order.
    pub fn conventions(&self) -> Vec<SignConvention> {
        let mut out = Vec::new();
        for &su2_prefactor in &self.prefactors {
            for &pencil_sign in &self.pencil_signs {
                for &dressing_sign in &self.dressing_signs {
                    for &sdym_map in &self.sdym_maps {
                        out.push(SignConvention {
                            su2_prefactor,
                            pencil_sign,
                            dressing_sign,
                            sdym_map,
                            provenance: Provenance { source: "candidate".into(), run_id: None },
                        });
                    }
                }
            }
        }
        out
    }
}

/// A connection to test conventions against, with optional extras.
#[derive(Clone, Debug)]
pub struct OracleScenario {
    pub label: String,
    pub field: ConnectionField,
    /// Pure-gauge generators (stored coefficient order), enabling the dressing check.
    pub gauge: Option<[CoeffTriple; 3]>,
    /// Higgs coefficients, enabling the Bogomolny pencil check.
    pub higgs: Option<CoeffField>,
}

impl OracleScenario {
    pub fn new(label: &str, scenario: &Scenario, grid: Grid, seed: u64) -> Result<Self> {
        grid.require_3d("a calibration oracle")?;
        let gauge = match scenario {
            Scenario::PureGauge { generators } => Some(*generators),
            _ => None,
        };
        Ok(OracleScenario { label: label.to_string(), field: sample_connection(scenario, grid, seed)?, gauge, higgs: None })
    }

    pub fn with_higgs(mut self, higgs: CoeffField) -> Self {
        self.higgs = Some(higgs);
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Bound for the algebraic identity checks.
    pub identity: f64,
    /// Constant `C` in the dressing bound `C·h²`.
    pub dressing_constant: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { identity: 1e-10, dressing_constant: 10.0 }
    }
}

/// Deviations of one candidate on one oracle.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckResult {
    pub oracle: String,
    pub equivalence: f64,
    pub pencil: f64,
    pub dressing: Option<f64>,
    pub dressing_bound: Option<f64>,
    pub sdym: f64,
    pub ymhb: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub convention: SignConvention,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Per-candidate deviations of a failed search.
#[derive(Clone, Debug, Serialize)]
pub struct CalibrationDiagnosis {
    pub candidates: Vec<CandidateReport>,
}

impl fmt::Display for CalibrationDiagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.candidates {
            writeln!(f, "{}", c.convention.label())?;
            for r in &c.checks {
                let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
                writeln!(
                    f,
                    "  {:<16} equivalence {:.3e}  pencil {:.3e}  dressing {}  sdym {:.3e}  ymhb {}  {}",
                    r.oracle,
                    r.equivalence,
                    r.pencil,
                    opt(r.dressing),
                    r.sdym,
                    opt(r.ymhb),
                    if r.passed { "pass" } else { "FAIL" }
                )?;
            }
        }
        Ok(())
    }
}

fn dressing_check(oracle: &OracleScenario, conv: &SignConvention) -> Result<Option<f64>> {
    let Some(gens) = oracle.gauge else {
        return Ok(None);
    };
    let mats: Vec<Su2> = Axis::ALL.iter().map(|a| su2_unchecked(slot_triple(*a, gens[a.index()]), conv.su2_prefactor)).collect();
    let pg = make_pure_gauge(&mats, oracle.field.grid)?;
    let i = Complex64::new(0.0, 1.0);
    let lambda = 0.5;
    let spec = DressingSpec::new(
        vec![i * lambda, -i * lambda],
        vec![-i * 0.3, i * 0.3],
        vec![i * 0.7, -i * 0.7],
        conv.dressing_sign,
    )?;
    let psi = dress(&pg.g, &spec)?;
    let r = dressed_residual(&psi, &pg.connection, &spec)?;
    Ok(Some(r.iter().map(|f| f.interior_max_norm()).fold(0.0, f64::max)))
}

fn check(oracle: &OracleScenario, conv: &SignConvention, tol: &Tolerances) -> Result<CheckResult> {
    let grid = oracle.field.grid;
    let mode = DerivativeMode::Analytic;
    let equivalence = equivalence_su2_so3(&oracle.field, conv.su2_prefactor, mode)?.deviation;
    let conn = oracle.field.to_so3(crate::algebra::Beta::Plus, mode);
    let (p1, p2) = gcme_pencils(&conn, conv.pencil_sign)?;
    let pencil = mapping_deviation(&pencil_commutator_coeffs(&p1, &p2)?, &pencil_target(&conn)?)?;
    let dressing = dressing_check(oracle, conv)?;
    let h = grid.axes().iter().map(|a| grid.axis(*a).unwrap().spacing).fold(0.0, f64::max);
    let dressing_bound = dressing.map(|_| tol.dressing_constant * h * h);
    let sdym = sdym_identity_deviations(&conn, conv.sdym_map)?.max().into_iter().fold(0.0, f64::max);
    let ymhb = match &oracle.higgs {
        None => None,
        Some(h) => {
            let phi = h.to_so3(grid, Axis::X, crate::algebra::Beta::Plus, mode);
            let (q1, q2) = ymhb_pencils(&conn, &phi, conv.pencil_sign)?;
            Some(mapping_deviation(&pencil_commutator_coeffs(&q1, &q2)?, &ymhb_pencil_target(&conn, &phi)?)?)
        }
    };
    let ok = |v: f64| v <= tol.identity;
    let passed = ok(equivalence)
        && ok(pencil)
        && dressing.zip(dressing_bound).is_none_or(|(d, b)| d <= b)
        && ok(sdym)
        && ymhb.is_none_or(ok);
    Ok(CheckResult { oracle: oracle.label.clone(), equivalence, pencil, dressing, dressing_bound, sdym, ymhb, passed })
}

/// Scores one convention on every oracle.
pub fn evaluate(conv: &SignConvention, oracles: &[OracleScenario], tol: &Tolerances) -> Result<CandidateReport> {
    let checks = oracles.iter().map(|o| check(o, conv, tol)).collect::<Result<Vec<_>>>()?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(CandidateReport { convention: conv.clone(), checks, passed })
}

#[derive(Serialize)]
struct RunFingerprint<'a> {
    space: &'a ChoiceSpace,
    oracles: Vec<(&'a str, GridMeta, Option<u64>, bool, bool)>,
    chosen: String,
}

fn run_id(space: &ChoiceSpace, oracles: &[OracleScenario], chosen: &SignConvention) -> Result<String> {
    let fp = RunFingerprint {
        space,
        oracles: oracles
            .iter()
            .map(|o| (o.label.as_str(), GridMeta::from(&o.field.grid), o.field.seed, o.gauge.is_some(), o.higgs.is_some()))
            .collect(),
        chosen: chosen.label(),
    };
    let digest = Sha256::digest(serde_json::to_vec(&fp)?);
    Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
}

/// Finds the unique convention passing every check on every oracle.
pub fn calibrate(space: &ChoiceSpace, oracles: &[OracleScenario]) -> Result<SignConvention> {
    calibrate_with(space, oracles, &Tolerances::default())
}

pub fn calibrate_with(space: &ChoiceSpace, oracles: &[OracleScenario], tol: &Tolerances) -> Result<SignConvention> {
    if oracles.is_empty() {
        return Err(Error::Domain("calibration needs at least one oracle scenario".into()));
    }
    let candidates = space.conventions();
    if candidates.is_empty() {
        return Err(Error::Domain("empty choice space".into()));
    }
    let reports = candidates.par_iter().map(|c| evaluate(c, oracles, tol)).collect::<Result<Vec<_>>>()?;
    let passing: Vec<SignConvention> = reports.iter().filter(|r| r.passed).map(|r| r.convention.clone()).collect();
    match passing.len() {
        0 => Err(Error::CalibrationFailure(Box::new(CalibrationDiagnosis { candidates: reports }))),
        1 => {
            let mut chosen = passing.into_iter().next().unwrap();
            chosen.provenance = Provenance { source: "calibration".into(), run_id: Some(run_id(space, oracles, &chosen)?) };
            Ok(chosen)
        }
        _ => Err(Error::CalibrationAmbiguity(passing)),
    }
}

/// The standard oracle set: a non-commuting pure gauge and a random smooth
/// field with a random Higgs field, both on `n³` points.
pub fn standard_oracles(n: usize, seed: u64) -> Result<Vec<OracleScenario>> {
    let grid = Grid::unit(3, n)?;
    let flat = Scenario::parse("pure-gauge(x=0.6:-0.2:0.4, y=0.1:0.5:-0.3, t=-0.4:0.3:0.7)")?;
    let random = Scenario::parse("random(amplitude=1, bandwidth=2)")?;
    let higgs = crate::fields::sample_higgs(&random, grid, seed)?;
    Ok(vec![
        OracleScenario::new("pure-gauge", &flat, grid, seed)?,
        OracleScenario::new("random", &random, grid, seed)?.with_higgs(higgs),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_space_has_64_candidates() {
        let c = ChoiceSpace::full().conventions();
        assert_eq!(c.len(), 64);
        assert!(c[0].same_choices(&SignConvention::default()));
    }

    #[test]
    fn full_search_recovers_the_default() {
        let oracles = standard_oracles(9, 42).unwrap();
        let c = calibrate(&ChoiceSpace::full(), &oracles).unwrap();
        assert!(c.same_choices(&SignConvention::default()));
        assert_eq!(c.provenance.source, "calibration");
        let again = calibrate(&ChoiceSpace::full(), &oracles).unwrap();
        assert_eq!(c.provenance.run_id, again.provenance.run_id);
    }

    #[test]
    fn restricted_to_default_passes() {
        let oracles = standard_oracles(9, 1).unwrap();
        let c = calibrate(&ChoiceSpace::only(&SignConvention::default()), &oracles).unwrap();
        assert!(c.same_choices(&SignConvention::default()));
    }

    #[test]
    fn commuting_flat_oracle_is_ambiguous() {
        let grid = Grid::unit(3, 9).unwrap();
        let s = Scenario::parse("pure-gauge(x=0.5:0:0, y=0:0:1, t=0:0:-0.3)").unwrap();
        let oracle = OracleScenario::new("commuting", &s, grid, 0).unwrap();
        match calibrate(&ChoiceSpace::full(), &[oracle]) {
            Err(Error::CalibrationAmbiguity(list)) => {
                assert!(list.len() > 1);
                assert!(list.iter().any(|c| c.same_choices(&SignConvention::default())));
                assert!(list.iter().all(|c| c.dressing_sign == Sign::Minus));
            }
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_pencil_sign_fails_with_diagnosis() {
        let oracles = standard_oracles(9, 3).unwrap();
        let bad = SignConvention { pencil_sign: PencilSign::Add, ..SignConvention::default() };
        match calibrate(&ChoiceSpace::only(&bad), &oracles) {
            Err(Error::CalibrationFailure(d)) => {
                assert_eq!(d.candidates.len(), 1);
                let random = d.candidates[0].checks.iter().find(|c| c.oracle == "random").unwrap();
                assert!(random.pencil > 1e-3);
                assert!(d.to_string().contains("FAIL"));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
