//! Batch front-end: INI configuration, command dispatch and report files.
//!
//! A config file has three sections; every key is optional.
//!
//! ```ini
//! [grid]
//! dims = 3            ; 2 for (x, t), 3 for (x, y, t)
//! n = 32              ; points per axis
//! h = 0.03125         ; spacing, default 1/(n-1)
//! origin = 0
//!
//! [scenario]
//! generator = pure-gauge(x=0.6:-0.2:0.4, y=0.1:0.5:-0.3, t=-0.4:0.3:0.7)
//! seed = 42
//! higgs = random(amplitude=0.5)   ; Higgs scenario for embed-ymhb, default zero
//!
//! [run]
//! representation = so3            ; so3 or su2
//! beta = 1
//! convention = convention.json    ; relative to the config file
//! derivatives = analytic          ; analytic or fd
//! lambda = 0, 1, -1
//! plane = xy
//! corner = 0, 0, 0
//! cells = 1
//! path1 = 31+x 31+y
//! path2 = 31+y 31+x
//! substeps = 4
//! reproject = true
//! sqrt_e = 1
//! tolerance_profile = default     ; default (1e-10) or strict (1e-12)
//! ```
//!
//! Every run writes `report.json` (deterministic) and `run-metadata.json`
//! (timestamp) to the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::algebra::{Beta, MatrixValue};
use crate::curvature::{equivalence_su2_so3, labels, residual_1p1_component, residuals, ResidualReport};
use crate::embeddings::{sdym_identity_deviations, ymhb_pencil_target, ymhb_pencils, ymhb_residual};
use crate::error::{Error, Result};
use crate::fields::{sample_connection, sample_higgs, Axis, AxisSpec, Connection, ConnectionField, DerivativeMode, Grid, Scenario};
use crate::lax::calibrate::{calibrate, standard_oracles, ChoiceSpace};
use crate::lax::{gcme_pencils, lambda_sweep, mapping_deviation, pencil_commutator_coeffs, pencil_target, SignConvention};
use crate::transport::{curve_family, path_independence, plane_residual_index, plaquette_defect, CurveFamily, GridPath, SqrtE, TransportOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_AMBIGUOUS: i32 = 4;

/// Finite-difference bound constant: flat residuals must stay below `C·h²`.
const FD_CONSTANT: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Lax,
    EmbedYmhb,
    EmbedSdym,
    Transport,
    Reconstruct,
    Calibrate,
    Gen,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Check,
        Command::Lax,
        Command::EmbedYmhb,
        Command::EmbedSdym,
        Command::Transport,
        Command::Reconstruct,
        Command::Calibrate,
        Command::Gen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Lax => "lax",
            Command::EmbedYmhb => "embed-ymhb",
            Command::EmbedSdym => "embed-sdym",
            Command::Transport => "transport",
            Command::Reconstruct => "reconstruct",
            Command::Calibrate => "calibrate",
            Command::Gen => "gen",
        }
    }

    pub fn parse(s: &str) -> Result<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Representation {
    #[default]
    So3,
    Su2,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ToleranceProfile {
    #[default]
    Default,
    Strict,
}

impl ToleranceProfile {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "default" => Ok(ToleranceProfile::Default),
            "strict" => Ok(ToleranceProfile::Strict),
            o => Err(Error::Config(format!("unknown tolerance profile '{o}'"))),
        }
    }

    pub fn identity(self) -> f64 {
        match self {
            ToleranceProfile::Default => 1e-10,
            ToleranceProfile::Strict => 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub dims: usize,
    pub n: usize,
    pub h: Option<f64>,
    pub origin: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        let h = self.h.unwrap_or(1.0 / (self.n.max(2) - 1) as f64);
        let a = AxisSpec::new(self.origin, h, self.n).map_err(|e| Error::Config(e.to_string()))?;
        match self.dims {
            2 => Ok(Grid::new_2d(a, a)),
            3 => Ok(Grid::new_3d(a, a, a)),
            d => Err(Error::Config(format!("grid dims must be 2 or 3, got {d}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub generator: String,
    pub seed: u64,
    pub higgs: Option<String>,
    pub representation: Representation,
    pub beta: Beta,
    pub convention: Option<PathBuf>,
    pub derivatives: DerivativeMode,
    pub lambdas: [f64; 3],
    pub plane: (Axis, Axis),
    pub corner: [usize; 3],
    pub cells: usize,
    pub path1: Option<String>,
    pub path2: Option<String>,
    pub substeps: usize,
    pub reproject: bool,
    pub sqrt_e: f64,
    pub tolerance_profile: ToleranceProfile,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: GridConfig { dims: 3, n: 16, h: None, origin: 0.0 },
            generator: "zero".into(),
            seed: 0,
            higgs: None,
            representation: Representation::So3,
            beta: Beta::Plus,
            convention: None,
            derivatives: DerivativeMode::Analytic,
            lambdas: [0.0, 1.0, -1.0],
            plane: (Axis::X, Axis::Y),
            corner: [0, 0, 0],
            cells: 1,
            path1: None,
            path2: None,
            substeps: 4,
            reproject: true,
            sqrt_e: 1.0,
            tolerance_profile: ToleranceProfile::Default,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that override the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub tolerance_profile: Option<ToleranceProfile>,
    pub lambdas: Option<[f64; 3]>,
    pub no_reproject: bool,
}

fn cfg_err(section: &str, key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("[{section}] {key}: {msg}"))
}

fn parse_num<T: std::str::FromStr>(section: &str, key: &str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| cfg_err(section, key, format!("cannot parse '{v}'")))
}

pub fn parse_lambdas(v: &str) -> Result<[f64; 3]> {
    let vals: Vec<f64> = v
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad λ value '{s}'"))))
        .collect::<Result<_>>()?;
    <[f64; 3]>::try_from(vals).map_err(|_| Error::Config(format!("exactly three λ values needed, got '{v}'")))
}

fn parse_plane(v: &str) -> Result<(Axis, Axis)> {
    let chars: Vec<char> = v.trim().chars().collect();
    if chars.len() != 2 || chars[0] == chars[1] {
        return Err(Error::Config(format!("plane must name two distinct axes, got '{v}'")));
    }
    Ok((Axis::parse(&chars[0].to_string())?, Axis::parse(&chars[1].to_string())?))
}

fn parse_bool(section: &str, key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        o => Err(cfg_err(section, key, format!("expected a boolean, got '{o}'"))),
    }
}

impl RunConfig {
    /// Parses INI text. Relative `convention` paths resolve against `base`.
    pub fn from_ini_str(text: &str, base: &Path) -> Result<Self> {
        let ini = ini::Ini::load_from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        let mut c = RunConfig::default();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::Config(format!("key '{k}' outside any section")));
                }
                continue;
            };
            for (key, v) in props.iter() {
                match (section, key) {
                    ("grid", "dims") => c.grid.dims = parse_num(section, key, v)?,
                    ("grid", "n") => c.grid.n = parse_num(section, key, v)?,
                    ("grid", "h") => c.grid.h = Some(parse_num(section, key, v)?),
                    ("grid", "origin") => c.grid.origin = parse_num(section, key, v)?,
                    ("scenario", "generator") => c.generator = v.trim().to_string(),
                    ("scenario", "seed") => c.seed = parse_num(section, key, v)?,
                    ("scenario", "higgs") => c.higgs = Some(v.trim().to_string()),
                    ("run", "representation") => {
                        c.representation = match v.trim() {
                            "so3" => Representation::So3,
                            "su2" => Representation::Su2,
                            o => return Err(cfg_err(section, key, format!("unknown representation '{o}'"))),
                        }
                    }
                    ("run", "beta") => {
                        c.beta = Beta::from_value(parse_num(section, key, v)?).map_err(|e| cfg_err(section, key, e))?
                    }
                    ("run", "convention") => c.convention = Some(base.join(v.trim())),
                    ("run", "derivatives") => c.derivatives = DerivativeMode::parse(v)?,
                    ("run", "lambda") => c.lambdas = parse_lambdas(v)?,
                    ("run", "plane") => c.plane = parse_plane(v)?,
                    ("run", "corner") => {
                        let vals: Vec<usize> = v.split(',').map(|s| parse_num(section, key, s)).collect::<Result<_>>()?;
                        c.corner = vals.try_into().map_err(|_| cfg_err(section, key, "expected three indices"))?;
                    }
                    ("run", "cells") => c.cells = parse_num(section, key, v)?,
                    ("run", "path1") => c.path1 = Some(v.to_string()),
                    ("run", "path2") => c.path2 = Some(v.to_string()),
                    ("run", "substeps") => c.substeps = parse_num(section, key, v)?,
                    ("run", "reproject") => c.reproject = parse_bool(section, key, v)?,
                    ("run", "sqrt_e") => c.sqrt_e = parse_num(section, key, v)?,
                    ("run", "tolerance_profile") => c.tolerance_profile = ToleranceProfile::parse(v)?,
                    ("grid" | "scenario" | "run", _) => return Err(cfg_err(section, key, "unknown key")),
                    _ => return Err(Error::Config(format!("unknown section [{section}]"))),
                }
            }
        }
        if c.substeps == 0 || c.cells == 0 {
            return Err(Error::Config("substeps and cells must be at least 1".into()));
        }
        if !(c.sqrt_e.is_finite() && c.sqrt_e > 0.0) {
            return Err(Error::Config("sqrt_e must be positive".into()));
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_ini_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(p) = o.tolerance_profile {
            self.tolerance_profile = p;
        }
        if let Some(l) = o.lambdas {
            self.lambdas = l;
        }
        if o.no_reproject {
            self.reproject = false;
        }
    }

    fn transport_options(&self) -> TransportOptions {
        TransportOptions { substeps: self.substeps, reproject: self.reproject, ..Default::default() }
    }
}

/// One tolerance comparison.
#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Contents of `report.json`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    pub seed: u64,
    pub convention: SignConvention,
    pub passed: bool,
    pub checks: Vec<CheckItem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    fn check(&mut self, name: &str, value: f64, tolerance: f64) {
        let passed = value <= tolerance;
        self.passed &= passed;
        self.checks.push(CheckItem { name: name.into(), value, tolerance, passed });
    }
}

pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<RunReport>,
}

fn load_convention(cfg: &RunConfig) -> Result<SignConvention> {
    match &cfg.convention {
        Some(p) => SignConvention::load(p),
        None => Ok(SignConvention::default()),
    }
}

fn sample(cfg: &RunConfig, grid: Grid) -> Result<(Scenario, ConnectionField)> {
    let scenario = Scenario::parse(&cfg.generator).map_err(|e| Error::Config(e.to_string()))?;
    let field = sample_connection(&scenario, grid, cfg.seed).map_err(|e| Error::Config(e.to_string()))?;
    Ok((scenario, field))
}

fn spacing(grid: &Grid) -> f64 {
    grid.axes().iter().map(|a| grid.axis(*a).unwrap().spacing).fold(0.0, f64::max)
}

/// Tolerance for residuals that vanish exactly with analytic derivatives.
fn flat_tolerance(cfg: &RunConfig, grid: &Grid) -> f64 {
    match cfg.derivatives {
        DerivativeMode::Analytic => cfg.tolerance_profile.identity(),
        DerivativeMode::Fd => FD_CONSTANT * spacing(grid).powi(2),
    }
}

fn residual_report<E: MatrixValue>(conn: &Connection<E>, rep: &str, field: &ConnectionField, conv: &SignConvention) -> Result<ResidualReport> {
    let rs = residuals(conn)?;
    let mut r = ResidualReport::new(field.grid).with_seed(field.seed).with_convention(conv);
    for (l, f) in labels(rep, field.grid.dims()).iter().zip(&rs) {
        r.add(l, f);
    }
    Ok(r)
}

fn run_check(cfg: &RunConfig, rep: &mut RunReport, scenario: &Scenario, field: &ConnectionField, conv: &SignConvention) -> Result<ResidualReport> {
    let grid = field.grid;
    let mut report = match cfg.representation {
        Representation::So3 => residual_report(&field.to_so3(cfg.beta, cfg.derivatives), "so3", field, conv)?,
        Representation::Su2 => residual_report(&field.to_su2(conv.su2_prefactor, cfg.derivatives), "su2", field, conv)?,
    };
    if grid.dims() == 2 {
        let [r1, r2, r3] = residual_1p1_component(field, cfg.derivatives)?;
        report.add("8a", &r1).add("8b", &r2).add("8c", &r3);
    }
    if cfg.beta == Beta::Plus {
        let eq = equivalence_su2_so3(field, conv.su2_prefactor, cfg.derivatives)?;
        report.scalar("equivalenceDeviation", eq.deviation);
        rep.check("su2-so3 equivalence", eq.deviation, cfg.tolerance_profile.identity());
    }
    if scenario.is_flat() {
        rep.check("flat residual (interior max)", report.max_interior(), flat_tolerance(cfg, &grid));
    }
    Ok(report)
}

fn run_lax(cfg: &RunConfig, rep: &mut RunReport, field: &ConnectionField, conv: &SignConvention) -> Result<ResidualReport> {
    let conn = field.to_so3(cfg.beta, cfg.derivatives);
    let (p1, p2) = gcme_pencils(&conn, conv.pencil_sign)?;
    let coeffs = pencil_commutator_coeffs(&p1, &p2)?;
    let mapping = mapping_deviation(&coeffs, &pencil_target(&conn)?)?;
    let swept = lambda_sweep(&p1, &p2, cfg.lambdas)?;
    let mut sweep: f64 = 0.0;
    for k in 0..3 {
        sweep = sweep.max(swept[k].sub(&coeffs[k])?.max_norm());
    }
    let mut report = ResidualReport::new(field.grid).with_seed(field.seed).with_convention(conv);
    report.add("lambda0", &coeffs[0]).add("lambda1", &coeffs[1]).add("lambda2", &coeffs[2]);
    report.scalar("mappingDeviation", mapping).scalar("sweepDeviation", sweep);
    rep.check("pencil coefficients vs flipped-bracket residuals", mapping, cfg.tolerance_profile.identity());
    rep.check("lambda sweep vs expansion", sweep, 1e-12);
    Ok(report)
}

fn run_ymhb(cfg: &RunConfig, rep: &mut RunReport, field: &ConnectionField, conv: &SignConvention) -> Result<ResidualReport> {
    let grid = field.grid;
    let conn = field.to_so3(cfg.beta, cfg.derivatives);
    let higgs = match &cfg.higgs {
        Some(s) => Scenario::parse(s).map_err(|e| Error::Config(e.to_string()))?,
        None => Scenario::Zero,
    };
    let phi = sample_higgs(&higgs, grid, cfg.seed)?.to_so3(grid, Axis::X, cfg.beta, cfg.derivatives);
    let y = ymhb_residual(&conn, &phi)?;
    let (p1, p2) = ymhb_pencils(&conn, &phi, conv.pencil_sign)?;
    let mapping = mapping_deviation(&pencil_commutator_coeffs(&p1, &p2)?, &ymhb_pencil_target(&conn, &phi)?)?;
    let mut report = ResidualReport::new(grid).with_seed(field.seed).with_convention(conv);
    report.add("22a", &y[0]).add("22b", &y[1]).add("22c", &y[2]);
    report.scalar("pencilMappingDeviation", mapping);
    rep.check("Bogomolny pencil mapping", mapping, cfg.tolerance_profile.identity());
    if phi.value.is_identically_zero() {
        let r = crate::curvature::residual_2p1(&conn)?;
        let identical = (0..3).all(|k| y[k] == r[k]);
        rep.check("zero-Higgs residual bit-identical", if identical { 0.0 } else { 1.0 }, 0.0);
    }
    Ok(report)
}

fn run_sdym(cfg: &RunConfig, rep: &mut RunReport, field: &ConnectionField, conv: &SignConvention) -> Result<ResidualReport> {
    let tol = cfg.tolerance_profile.identity();
    let (ids, mut report) = match cfg.representation {
        Representation::So3 => {
            let ids = sdym_identity_deviations(&field.to_so3(cfg.beta, cfg.derivatives), conv.sdym_map)?;
            (ids.max(), ids.report())
        }
        Representation::Su2 => {
            let ids = sdym_identity_deviations(&field.to_su2(conv.su2_prefactor, cfg.derivatives), conv.sdym_map)?;
            (ids.max(), ids.report())
        }
    };
    report = report.with_seed(field.seed).with_convention(conv);
    for (label, dev) in ["F_ab", "F_abar_bbar", "F_trace"].iter().zip(ids) {
        rep.check(label, dev, tol);
    }
    Ok(report)
}

fn run_transport(cfg: &RunConfig, rep: &mut RunReport, scenario: &Scenario, field: &ConnectionField, conv: &SignConvention) -> Result<ResidualReport> {
    let grid = field.grid;
    let opts = cfg.transport_options();
    let mut report = ResidualReport::new(grid).with_seed(field.seed).with_convention(conv);
    let (defect, path_gap, residual_norm) = match cfg.representation {
        Representation::So3 => transport_numbers(&field.to_so3(cfg.beta, cfg.derivatives), cfg, &opts)?,
        Representation::Su2 => transport_numbers(&field.to_su2(conv.su2_prefactor, cfg.derivatives), cfg, &opts)?,
    };
    let h = grid.axis(cfg.plane.0)?.spacing * cfg.cells as f64;
    report.scalar("plaquetteDefect", defect).scalar("pathDiscrepancy", path_gap);
    report.scalar("defectOverH2", defect / (h * h));
    if let Some(rn) = residual_norm {
        report.scalar("cornerResidualNorm", rn);
    }
    if scenario.is_flat() {
        rep.check("flat plaquette defect", defect, 1e-8);
        rep.check("flat path discrepancy", path_gap, 1e-8);
    }
    Ok(report)
}

fn default_paths(cfg: &RunConfig, grid: &Grid) -> Result<(GridPath, GridPath)> {
    let (a, b) = cfg.plane;
    let n = grid.counts();
    let p = cfg.corner;
    let mut q = p;
    q[a.index()] = n[a.index()] - 1;
    q[b.index()] = n[b.index()] - 1;
    let parse = |s: &Option<String>| s.as_ref().map(|m| GridPath::parse(p, m)).transpose();
    let p1 = parse(&cfg.path1)?.map_or_else(|| GridPath::l_shaped(p, q, a, b), Ok)?;
    let p2 = parse(&cfg.path2)?.map_or_else(|| GridPath::l_shaped(p, q, b, a), Ok)?;
    Ok((p1, p2))
}

fn transport_numbers<E: MatrixValue>(conn: &Connection<E>, cfg: &RunConfig, opts: &TransportOptions) -> Result<(f64, f64, Option<f64>)> {
    let grid = *conn.grid();
    let defect = plaquette_defect(conn, cfg.corner, cfg.plane, cfg.cells, opts)?;
    let (p1, p2) = default_paths(cfg, &grid)?;
    let gap = path_independence(conn, &p1, &p2, opts)?;
    let residual_norm = if grid.dims() == 3 {
        let r = crate::curvature::residual_2p1(conn)?;
        Some(r[plane_residual_index(cfg.plane)?].at(cfg.corner).magnitude())
    } else {
        None
    };
    Ok((defect, gap, residual_norm))
}

fn run_reconstruct(cfg: &RunConfig, rep: &mut RunReport, field: &ConnectionField, conv: &SignConvention) -> Result<(ResidualReport, CurveFamily)> {
    let grid = field.grid;
    let conn = field.to_so3(cfg.beta, cfg.derivatives);
    let fam = curve_family(&conn, &SqrtE::Constant(cfg.sqrt_e), &cfg.transport_options())?;
    let expected = cfg.sqrt_e * grid.axis(Axis::X)?.length();
    let worst = fam.arc_lengths().iter().map(|l| (l - expected).abs() / expected).fold(0.0, f64::max);
    let mut report = ResidualReport::new(grid).with_seed(field.seed).with_convention(conv);
    report.scalar("curves", fam.curves.len() as f64).scalar("arcLengthRelativeError", worst);
    rep.check("arc length vs integral of sqrt(E)", worst, 1e-3);
    Ok((report, fam))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(command: Command, cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let grid = cfg.grid.build()?;
    let conv = rep.convention.clone();
    let needs_3d = matches!(command, Command::Lax | Command::EmbedYmhb | Command::EmbedSdym | Command::Calibrate);
    if needs_3d && grid.dims() != 3 {
        return Err(Error::Config(format!("{} needs dims = 3", command.name())));
    }
    if command == Command::Calibrate {
        let oracles = standard_oracles(cfg.grid.n, cfg.seed)?;
        let outcome = calibrate(&ChoiceSpace::full(), &oracles);
        let mut report = ResidualReport::new(grid).with_seed(Some(cfg.seed));
        report.scalar("candidates", ChoiceSpace::full().conventions().len() as f64);
        rep.residuals = Some(report);
        let found = outcome?;
        found.save(&cfg.out.join("convention.json"))?;
        rep.convention = found;
        return Ok(());
    }
    let (scenario, field) = sample(cfg, grid)?;
    rep.scenario = field.label.clone();
    let report = match command {
        Command::Check => run_check(cfg, rep, &scenario, &field, &conv)?,
        Command::Lax => run_lax(cfg, rep, &field, &conv)?,
        Command::EmbedYmhb => run_ymhb(cfg, rep, &field, &conv)?,
        Command::EmbedSdym => run_sdym(cfg, rep, &field, &conv)?,
        Command::Transport => run_transport(cfg, rep, &scenario, &field, &conv)?,
        Command::Reconstruct => {
            let (report, fam) = run_reconstruct(cfg, rep, &field, &conv)?;
            let mut csv = Vec::new();
            fam.write_csv(&mut csv)?;
            write(&cfg.out.join("curves.csv"), &csv)?;
            let mut obj = Vec::new();
            fam.write_obj(&mut obj)?;
            write(&cfg.out.join("curves.obj"), &obj)?;
            report
        }
        Command::Gen => {
            let mut csv = Vec::new();
            field.write_csv(&mut csv)?;
            write(&cfg.out.join("field.csv"), &csv)?;
            let mut r = ResidualReport::new(grid).with_seed(field.seed).with_convention(&conv);
            r.scalar("points", grid.len() as f64);
            r
        }
        Command::Calibrate => unreachable!(),
    };
    rep.residuals = Some(report);
    Ok(())
}

/// Runs one command, writes its artifacts to `cfg.out` and returns the exit code.
pub fn run(command: Command, cfg: &RunConfig) -> Outcome {
    let convention = match load_convention(cfg) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Outcome { exit_code: EXIT_CONFIG, report: None };
        }
    };
    if let Err(e) = fs::create_dir_all(&cfg.out) {
        eprintln!("error: cannot create {}: {e}", cfg.out.display());
        return Outcome { exit_code: EXIT_CONFIG, report: None };
    }
    let mut rep = RunReport {
        schema_version: 1,
        command: command.name().into(),
        scenario: cfg.generator.clone(),
        seed: cfg.seed,
        convention,
        passed: true,
        checks: Vec::new(),
        residuals: None,
        error: None,
    };
    let mut exit_code = match dispatch(command, cfg, &mut rep) {
        Ok(()) if rep.passed => EXIT_OK,
        Ok(()) => EXIT_TOLERANCE,
        Err(e) => {
            rep.passed = false;
            rep.error = Some(e.to_string());
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Scenario(_) | Error::Io(_) => EXIT_CONFIG,
                Error::CalibrationAmbiguity(_) => EXIT_AMBIGUOUS,
                Error::CalibrationFailure(d) => {
                    eprintln!("{d}");
                    EXIT_TOLERANCE
                }
                _ => EXIT_RUNTIME,
            }
        }
    };
    let written = serde_json::to_string_pretty(&rep)
        .map_err(Error::from)
        .and_then(|json| write(&cfg.out.join("report.json"), format!("{json}\n").as_bytes()))
        .and_then(|_| write_metadata(command, cfg));
    if let Err(e) = written {
        eprintln!("error: {e}");
        exit_code = EXIT_CONFIG;
    }
    Outcome { exit_code, report: Some(rep) }
}

fn write_metadata(command: Command, cfg: &RunConfig) -> Result<()> {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = serde_json::json!({
        "schemaVersion": 1,
        "command": command.name(),
        "timestampUnix": ts,
        "version": env!("CARGO_PKG_VERSION"),
    });
    write(&cfg.out.join("run-metadata.json"), format!("{}\n", serde_json::to_string_pretty(&meta)?).as_bytes())
}
