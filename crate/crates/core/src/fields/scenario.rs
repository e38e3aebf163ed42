//! Manufactured connections.
//!
//! A scenario is written as `name` or `name(key=value, ...)`:
//!
//! | name         | parameters                                                    |
//! |--------------|---------------------------------------------------------------|
//! | `zero`       | none                                                          |
//! | `constants`  | any of `k sigma tau m1 m2 m3 omega1 omega2 omega3` (numbers)   |
//! | `analytic`   | the same keys, values are expressions in `x y t`              |
//! | `abelian`    | `theta` (expression); `k = θ_x`, `m3 = θ_y`, `omega3 = θ_t`    |
//! | `pure-gauge` | `x`, `y`, `t` generator triples written `a:b:c`               |
//! | `random`     | `amplitude` (≥ 0), `bandwidth` (1..=8)                        |
//! | `perturbed`  | pure-gauge generators plus `amplitude`, `bandwidth`           |
//!
//! Each direction stores its coefficients in the order they are named:
//! x holds `(k, σ, τ)`, y holds `(m₁, m₂, m₃)`, t holds `(ω₁, ω₂, ω₃)`.
//! Every generator is closed form, so exact derivatives come with the samples.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::field::{Component, Connection, DerivativeMode, Field};
use super::grid::{Axis, Grid};
use crate::algebra::{
    commutator, so3_coeffs, so3_unchecked, su2_unchecked, Beta, CoeffTriple, FieldValue, MatrixValue, So3, Su2,
    Su2Prefactor,
};
use crate::error::{Error, Result};

/// Seed offset used when a Higgs field is drawn from the same scenario seed.
pub const HIGGS_SEED_OFFSET: u64 = 0x5EED_0001;

/// Maps a direction's stored triple onto the `(k, σ, τ)` slots of the matrix
/// pattern. The y and t directions list their coefficients in reverse slot
/// order, so the map is an involution.
pub fn slot_triple(axis: Axis, stored: CoeffTriple) -> CoeffTriple {
    match axis {
        Axis::X => stored,
        Axis::Y | Axis::T => CoeffTriple::new(stored.c3, stored.c2, stored.c1),
    }
}

/// Coefficient samples of one direction, with optional exact derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffField {
    pub values: Vec<CoeffTriple>,
    /// Indexed by [`Axis::index`].
    pub grad: Option<[Vec<CoeffTriple>; 3]>,
}

impl CoeffField {
    fn component<E: FieldValue>(
        &self,
        grid: Grid,
        mode: DerivativeMode,
        build: impl Fn(CoeffTriple) -> E + Sync,
    ) -> Component<E> {
        let to_field = |v: &[CoeffTriple]| Field::from_vec(grid, v.par_iter().map(|c| build(*c)).collect());
        let value = to_field(&self.values).expect("samples match grid");
        match (&self.grad, mode) {
            (Some(g), DerivativeMode::Analytic) => {
                let grad = [0, 1, 2].map(|i| {
                    grid.has_axis(Axis::ALL[i]).then(|| to_field(&g[i]).expect("samples match grid"))
                });
                Component { value, grad }
            }
            _ => Component::sampled(value),
        }
    }

    pub fn to_so3(&self, grid: Grid, axis: Axis, beta: Beta, mode: DerivativeMode) -> Component<So3> {
        self.component(grid, mode, |c| so3_unchecked(slot_triple(axis, c), beta))
    }

    pub fn to_su2(&self, grid: Grid, axis: Axis, prefactor: Su2Prefactor, mode: DerivativeMode) -> Component<Su2> {
        self.component(grid, mode, |c| su2_unchecked(slot_triple(axis, c), prefactor))
    }

    /// One stored coefficient (`slot` ∈ 0..3) as a scalar component.
    pub fn scalar(&self, grid: Grid, slot: usize, mode: DerivativeMode) -> Component<f64> {
        self.component(grid, mode, |c| c.as_array()[slot])
    }
}

/// Coefficient fields of all directions of a connection.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionField {
    pub grid: Grid,
    pub x: CoeffField,
    pub y: Option<CoeffField>,
    pub t: CoeffField,
    pub seed: Option<u64>,
    pub label: String,
}

impl ConnectionField {
    pub fn direction(&self, axis: Axis) -> Result<&CoeffField> {
        match axis {
            Axis::X => Ok(&self.x),
            Axis::Y => self.y.as_ref().ok_or(Error::MissingAxis(Axis::Y)),
            Axis::T => Ok(&self.t),
        }
    }

    pub fn to_so3(&self, beta: Beta, mode: DerivativeMode) -> Connection<So3> {
        let g = self.grid;
        Connection {
            x: self.x.to_so3(g, Axis::X, beta, mode),
            y: self.y.as_ref().map(|c| c.to_so3(g, Axis::Y, beta, mode)),
            t: self.t.to_so3(g, Axis::T, beta, mode),
        }
    }

    pub fn to_su2(&self, prefactor: Su2Prefactor, mode: DerivativeMode) -> Connection<Su2> {
        let g = self.grid;
        Connection {
            x: self.x.to_su2(g, Axis::X, prefactor, mode),
            y: self.y.as_ref().map(|c| c.to_su2(g, Axis::Y, prefactor, mode)),
            t: self.t.to_su2(g, Axis::T, prefactor, mode),
        }
    }

    /// Writes one row per point: coordinates, then the stored coefficients.
    ///
    /// Header: `x,t,k,sigma,tau,omega1,omega2,omega3` on 2D grids and
    /// `x,y,t,k,sigma,tau,m1,m2,m3,omega1,omega2,omega3` on 3D grids.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let three = self.y.is_some();
        if three {
            writeln!(w, "x,y,t,k,sigma,tau,m1,m2,m3,omega1,omega2,omega3")?;
        } else {
            writeln!(w, "x,t,k,sigma,tau,omega1,omega2,omega3")?;
        }
        for i in 0..self.grid.len() {
            let p = self.grid.point(i);
            let mut row: Vec<f64> = if three { p.to_vec() } else { vec![p[0], p[2]] };
            row.extend(self.x.values[i].as_array());
            if let Some(y) = &self.y {
                row.extend(y.values[i].as_array());
            }
            row.extend(self.t.values[i].as_array());
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Writes a matrix field: coordinates, then `m<r><c>_re,m<r><c>_im` row-major.
pub fn write_matrix_field_csv<E: MatrixValue, W: Write>(field: &Field<E>, mut w: W) -> Result<()> {
    let grid = field.grid();
    let mut header: Vec<String> = grid.axes().iter().map(|a| a.to_string()).collect();
    for r in 0..E::DIM {
        for c in 0..E::DIM {
            header.push(format!("m{r}{c}_re"));
            header.push(format!("m{r}{c}_im"));
        }
    }
    writeln!(w, "{}", header.join(","))?;
    for i in 0..grid.len() {
        let p = grid.point(i);
        let mut cells: Vec<String> = grid.axes().iter().map(|a| format!("{:e}", p[a.index()])).collect();
        for (re, im) in field.get(i).entries() {
            cells.push(format!("{re:e}"));
            cells.push(format!("{im:e}"));
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Values and first derivatives of all nine coefficients at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    /// Indexed by direction (x, y, t).
    pub value: [CoeffTriple; 3],
    /// `grad[direction][axis]`.
    pub grad: [[CoeffTriple; 3]; 3],
}

impl Jet {
    fn add(&self, o: &Jet) -> Jet {
        let mut r = *self;
        for d in 0..3 {
            r.value[d] = r.value[d] + o.value[d];
            for a in 0..3 {
                r.grad[d][a] = r.grad[d][a] + o.grad[d][a];
            }
        }
        r
    }
}

/// Closed-form pure-gauge frame `g = e^{xX₁} e^{yX₂} e^{tX₃}` at `p`, its
/// connection `(X₁, Ad_{e^{xX₁}} X₂, Ad_{e^{xX₁}e^{yX₂}} X₃)` and the
/// connection's derivatives (`grad[direction][axis]`).
///
/// With two generators the y factor is dropped.
pub fn pure_gauge_point<E: MatrixValue>(gens: &[E], p: [f64; 3]) -> (E, [E; 3], [[E; 3]; 3]) {
    let z = E::zero();
    let mut values = [z; 3];
    let mut grad = [[z; 3]; 3];
    match gens {
        [x1, x3] => {
            let a = x1.scale(p[0]).expm();
            let ad_a = |m: E| a * m * a.dagger();
            values[0] = *x1;
            values[2] = ad_a(*x3);
            grad[2][0] = ad_a(commutator(x1, x3));
            let g = a * x3.scale(p[2]).expm();
            (g, values, grad)
        }
        [x1, x2, x3] => {
            let a = x1.scale(p[0]).expm();
            let b = x2.scale(p[1]).expm();
            let ab = a * b;
            let ad_a = |m: E| a * m * a.dagger();
            let ad_ab = |m: E| ab * m * ab.dagger();
            values[0] = *x1;
            values[1] = ad_a(*x2);
            values[2] = ad_ab(*x3);
            grad[1][0] = ad_a(commutator(x1, x2));
            grad[2][0] = ad_a(commutator(x1, &(b * *x3 * b.dagger())));
            grad[2][1] = ad_ab(commutator(x2, x3));
            let g = ab * x3.scale(p[2]).expm();
            (g, values, grad)
        }
        _ => panic!("pure gauge needs two or three generators"),
    }
}

/// Pure-gauge frame field and its exactly flat connection.
pub struct PureGauge<E> {
    pub g: Field<E>,
    pub connection: Connection<E>,
}

/// Builds `g = e^{xX₁} e^{yX₂} e^{tX₃}` (2D: no y factor) and the closed-form
/// connection with exact derivatives.
pub fn make_pure_gauge<E: MatrixValue>(generators: &[E], grid: Grid) -> Result<PureGauge<E>> {
    if generators.len() != grid.dims() {
        return Err(Error::Domain(format!(
            "{} generators given for a {}-dimensional grid",
            generators.len(),
            grid.dims()
        )));
    }
    let samples: Vec<_> = (0..grid.len()).into_par_iter().map(|i| pure_gauge_point(generators, grid.point(i))).collect();
    let g = Field::from_vec(grid, samples.iter().map(|s| s.0).collect())?;
    let comp = |d: usize| -> Result<Component<E>> {
        let value = Field::from_vec(grid, samples.iter().map(|s| s.1[d]).collect())?;
        let mut grad = [None, None, None];
        for a in grid.axes() {
            grad[a.index()] = Some(Field::from_vec(grid, samples.iter().map(|s| s.2[d][a.index()]).collect())?);
        }
        Component::with_grad(value, grad)
    };
    let y = if grid.dims() == 3 { Some(comp(1)?) } else { None };
    let connection = Connection::new(comp(0)?, y, comp(2)?)?;
    Ok(PureGauge { g, connection })
}

/// One truncated real trigonometric series per coefficient.
#[derive(Clone, Debug)]
struct TrigSeries {
    /// `(wavenumbers along x, y, t; cosine weight; sine weight)`
    modes: Vec<([f64; 3], f64, f64)>,
}

impl TrigSeries {
    fn eval(&self, p: [f64; 3]) -> (f64, [f64; 3]) {
        let mut v = 0.0;
        let mut g = [0.0; 3];
        for (k, a, b) in &self.modes {
            let phase = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
            let (s, c) = phase.sin_cos();
            v += a * c + b * s;
            let dphase = -a * s + b * c;
            for ax in 0..3 {
                g[ax] += k[ax] * dphase;
            }
        }
        (v, g)
    }
}

/// Smooth, generically non-flat coefficient fields drawn from `seed`.
#[derive(Clone, Debug)]
pub struct RandomSmooth {
    series: Vec<TrigSeries>,
}

impl RandomSmooth {
    pub const MAX_BANDWIDTH: usize = 8;

    pub fn new(seed: u64, amplitude: f64, bandwidth: usize, dims: usize) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::Scenario(format!("amplitude must be finite and ≥ 0, got {amplitude}")));
        }
        if !(1..=Self::MAX_BANDWIDTH).contains(&bandwidth) {
            return Err(Error::Scenario(format!(
                "bandwidth must be in 1..={}, got {bandwidth}",
                Self::MAX_BANDWIDTH
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ny = if dims == 3 { bandwidth } else { 0 };
        let count = ((bandwidth + 1) * (ny + 1) * (bandwidth + 1)) as f64;
        let weight = amplitude / count.sqrt();
        let mut series = Vec::with_capacity(9);
        for _ in 0..9 {
            let mut modes = Vec::new();
            for p in 0..=bandwidth {
                for q in 0..=ny {
                    for r in 0..=bandwidth {
                        let a: f64 = rng.random_range(-1.0..1.0);
                        let b: f64 = rng.random_range(-1.0..1.0);
                        let k = [PI * p as f64, PI * q as f64, PI * r as f64];
                        modes.push((k, weight * a, weight * b));
                    }
                }
            }
            series.push(TrigSeries { modes });
        }
        Ok(RandomSmooth { series })
    }

    fn jet(&self, p: [f64; 3], dims: usize) -> Jet {
        let mut jet = Jet::default();
        for d in 0..3 {
            if d == 1 && dims == 2 {
                continue;
            }
            let mut val = [0.0; 3];
            let mut grad = [[0.0; 3]; 3];
            for s in 0..3 {
                let (v, g) = self.series[3 * d + s].eval(p);
                val[s] = v;
                for a in 0..3 {
                    grad[a][s] = g[a];
                }
            }
            jet.value[d] = val.into();
            for a in 0..3 {
                jet.grad[d][a] = grad[a].into();
            }
        }
        jet
    }
}

/// Parsed expression coefficients with their symbolic derivatives.
#[derive(Clone, Debug)]
pub struct AnalyticCoeffs {
    /// `exprs[direction][slot]`
    exprs: [[Expr; 3]; 3],
    /// `grads[direction][slot][axis]`
    grads: [[[Expr; 3]; 3]; 3],
}

impl AnalyticCoeffs {
    fn new(exprs: [[Expr; 3]; 3]) -> Self {
        let grads = exprs.clone().map(|d| d.map(|e| Axis::ALL.map(|a| e.diff(a))));
        AnalyticCoeffs { exprs, grads }
    }

    fn jet(&self, p: [f64; 3]) -> Jet {
        let mut jet = Jet::default();
        for d in 0..3 {
            jet.value[d] = self.exprs[d].clone().map(|e| e.eval(p)).into();
            for a in 0..3 {
                jet.grad[d][a] = [0, 1, 2].map(|s| self.grads[d][s][a].eval(p)).into();
            }
        }
        jet
    }

    fn uses_y(&self) -> bool {
        self.exprs[1].iter().any(|e| !e.is_zero()) || self.exprs.iter().flatten().any(|e| e.uses(Axis::Y))
    }
}

/// A registered generator with its parameters.
#[derive(Clone, Debug)]
pub enum Scenario {
    Zero,
    Analytic { source: String, coeffs: Box<AnalyticCoeffs> },
    PureGauge { generators: [CoeffTriple; 3] },
    Random { amplitude: f64, bandwidth: usize },
    Perturbed { generators: [CoeffTriple; 3], amplitude: f64, bandwidth: usize },
}

const COEFF_KEYS: [(&str, usize, usize); 9] = [
    ("k", 0, 0),
    ("sigma", 0, 1),
    ("tau", 0, 2),
    ("m1", 1, 0),
    ("m2", 1, 1),
    ("m3", 1, 2),
    ("omega1", 2, 0),
    ("omega2", 2, 1),
    ("omega3", 2, 2),
];

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn parse_number(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Scenario(format!("parameter '{key}' needs a finite number, got '{v}'")))
}

fn parse_triple(key: &str, v: &str) -> Result<CoeffTriple> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Scenario(format!("parameter '{key}' needs a triple a:b:c, got '{v}'")));
    }
    Ok(CoeffTriple::new(parse_number(key, parts[0])?, parse_number(key, parts[1])?, parse_number(key, parts[2])?))
}

impl Scenario {
    pub fn parse(spec: &str) -> Result<Scenario> {
        let spec = spec.trim();
        let (name, args) = match spec.find('(') {
            Some(open) => {
                if !spec.ends_with(')') {
                    return Err(Error::Scenario(format!("unbalanced parentheses in '{spec}'")));
                }
                (spec[..open].trim(), &spec[open + 1..spec.len() - 1])
            }
            None => (spec, ""),
        };
        let mut params = Vec::new();
        for part in split_top_level(args) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Scenario(format!("expected key=value, got '{part}'")))?;
            let k = k.trim();
            if params.iter().any(|(seen, _): &(&str, &str)| *seen == k) {
                return Err(Error::Scenario(format!("duplicate parameter '{k}'")));
            }
            params.push((k, v.trim()));
        }
        let allow = |allowed: &[&str]| -> Result<()> {
            for (k, _) in &params {
                if !allowed.contains(k) {
                    return Err(Error::Scenario(format!("generator '{name}' has no parameter '{k}'")));
                }
            }
            Ok(())
        };
        let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let coeff_names: Vec<&str> = COEFF_KEYS.iter().map(|c| c.0).collect();
        match name {
            "zero" => {
                allow(&[])?;
                Ok(Scenario::Zero)
            }
            "constants" | "analytic" => {
                allow(&coeff_names)?;
                let mut exprs: [[Expr; 3]; 3] = Default::default();
                for (key, d, s) in COEFF_KEYS {
                    if let Some(v) = get(key) {
                        exprs[d][s] = if name == "constants" {
                            Expr::Const(parse_number(key, v)?)
                        } else {
                            Expr::parse(v)?
                        };
                    }
                }
                Ok(Scenario::Analytic { source: spec.to_string(), coeffs: Box::new(AnalyticCoeffs::new(exprs)) })
            }
            "abelian" => {
                allow(&["theta"])?;
                let theta = Expr::parse(get("theta").ok_or_else(|| Error::Scenario("abelian needs theta".into()))?)?;
                let mut exprs: [[Expr; 3]; 3] = Default::default();
                exprs[0][0] = theta.diff(Axis::X);
                exprs[1][2] = theta.diff(Axis::Y);
                exprs[2][2] = theta.diff(Axis::T);
                Ok(Scenario::Analytic { source: spec.to_string(), coeffs: Box::new(AnalyticCoeffs::new(exprs)) })
            }
            "pure-gauge" | "perturbed" => {
                let mut allowed = vec!["x", "y", "t"];
                if name == "perturbed" {
                    allowed.extend(["amplitude", "bandwidth"]);
                }
                allow(&allowed)?;
                let mut generators = [CoeffTriple::ZERO; 3];
                for a in Axis::ALL {
                    if let Some(v) = get(&a.to_string()) {
                        generators[a.index()] = parse_triple(&a.to_string(), v)?;
                    }
                }
                if name == "pure-gauge" {
                    Ok(Scenario::PureGauge { generators })
                } else {
                    let (amplitude, bandwidth) = random_params(get("amplitude"), get("bandwidth"))?;
                    Ok(Scenario::Perturbed { generators, amplitude, bandwidth })
                }
            }
            "random" => {
                allow(&["amplitude", "bandwidth"])?;
                let (amplitude, bandwidth) = random_params(get("amplitude"), get("bandwidth"))?;
                Ok(Scenario::Random { amplitude, bandwidth })
            }
            other => Err(Error::Scenario(format!("unknown generator '{other}'"))),
        }
    }

    /// Canonical name used in report labels.
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Zero => "zero",
            Scenario::Analytic { .. } => "analytic",
            Scenario::PureGauge { .. } => "pure-gauge",
            Scenario::Random { .. } => "random",
            Scenario::Perturbed { .. } => "perturbed",
        }
    }

    /// Whether the scenario is flat by construction.
    pub fn is_flat(&self) -> bool {
        matches!(self, Scenario::Zero | Scenario::PureGauge { .. })
    }
}

fn random_params(amplitude: Option<&str>, bandwidth: Option<&str>) -> Result<(f64, usize)> {
    let amplitude = amplitude.map(|v| parse_number("amplitude", v)).transpose()?.unwrap_or(1.0);
    let bandwidth = match bandwidth {
        Some(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Scenario(format!("bandwidth must be a positive integer, got '{v}'")))?,
        None => 2,
    };
    if amplitude < 0.0 {
        return Err(Error::Scenario(format!("amplitude must be ≥ 0, got {amplitude}")));
    }
    if !(1..=RandomSmooth::MAX_BANDWIDTH).contains(&bandwidth) {
        return Err(Error::Scenario(format!("bandwidth must be in 1..={}", RandomSmooth::MAX_BANDWIDTH)));
    }
    Ok((amplitude, bandwidth))
}

fn pure_gauge_jet(gens: &[So3], p: [f64; 3]) -> Jet {
    let (_, values, grad) = pure_gauge_point(gens, p);
    let three = gens.len() == 3;
    let mut jet = Jet::default();
    for (d, axis) in Axis::ALL.into_iter().enumerate() {
        if d == 1 && !three {
            continue;
        }
        jet.value[d] = slot_triple(axis, so3_coeffs(&values[d]));
        for a in 0..3 {
            jet.grad[d][a] = slot_triple(axis, so3_coeffs(&grad[d][a]));
        }
    }
    jet
}

fn generator_matrices(generators: &[CoeffTriple; 3], grid: &Grid) -> Result<Vec<So3>> {
    let m = |a: Axis| so3_unchecked(slot_triple(a, generators[a.index()]), Beta::Plus);
    if grid.dims() == 3 {
        Ok(vec![m(Axis::X), m(Axis::Y), m(Axis::T)])
    } else if generators[1] != CoeffTriple::ZERO {
        Err(Error::Scenario("a y generator needs an (x, y, t) grid".into()))
    } else {
        Ok(vec![m(Axis::X), m(Axis::T)])
    }
}

fn sample_jets(grid: Grid, f: impl Fn([f64; 3]) -> Jet + Sync) -> Vec<Jet> {
    (0..grid.len()).into_par_iter().map(|i| f(grid.point(i))).collect()
}

/// Samples a scenario on `grid`. Identical `(scenario, grid, seed)` give
/// bit-identical fields.
pub fn sample_connection(scenario: &Scenario, grid: Grid, seed: u64) -> Result<ConnectionField> {
    let dims = grid.dims();
    let jets = match scenario {
        Scenario::Zero => vec![Jet::default(); grid.len()],
        Scenario::Analytic { coeffs, .. } => {
            if dims == 2 && coeffs.uses_y() {
                return Err(Error::Scenario("analytic scenario uses y on an (x, t) grid".into()));
            }
            sample_jets(grid, |p| coeffs.jet(p))
        }
        Scenario::PureGauge { generators } => {
            let gens = generator_matrices(generators, &grid)?;
            sample_jets(grid, |p| pure_gauge_jet(&gens, p))
        }
        Scenario::Random { amplitude, bandwidth } => {
            let r = RandomSmooth::new(seed, *amplitude, *bandwidth, dims)?;
            sample_jets(grid, |p| r.jet(p, dims))
        }
        Scenario::Perturbed { generators, amplitude, bandwidth } => {
            let gens = generator_matrices(generators, &grid)?;
            let r = RandomSmooth::new(seed, *amplitude, *bandwidth, dims)?;
            sample_jets(grid, |p| pure_gauge_jet(&gens, p).add(&r.jet(p, dims)))
        }
    };
    if let Some(i) = jets.iter().position(|j| !j.value.iter().all(|c| c.is_finite())) {
        return Err(Error::Scenario(format!("non-finite sample at point {i}")));
    }
    let direction = |d: usize| CoeffField {
        values: jets.iter().map(|j| j.value[d]).collect(),
        grad: Some([0, 1, 2].map(|a| jets.iter().map(|j| j.grad[d][a]).collect())),
    };
    let label = match scenario {
        Scenario::Analytic { source, .. } => source.clone(),
        s => s.name().to_string(),
    };
    Ok(ConnectionField {
        grid,
        x: direction(0),
        y: (dims == 3).then(|| direction(1)),
        t: direction(2),
        seed: matches!(scenario, Scenario::Random { .. } | Scenario::Perturbed { .. }).then_some(seed),
        label,
    })
}

/// Random smooth connection, see [`Scenario::Random`].
pub fn make_random_smooth(seed: u64, amplitude: f64, bandwidth: usize, grid: Grid) -> Result<ConnectionField> {
    sample_connection(&Scenario::Random { amplitude, bandwidth }, grid, seed)
}

/// A Higgs field drawn from a scenario: its x-direction coefficients, read
/// directly as `(k, σ, τ)` slots. Uses `seed + HIGGS_SEED_OFFSET`.
pub fn sample_higgs(scenario: &Scenario, grid: Grid, seed: u64) -> Result<CoeffField> {
    Ok(sample_connection(scenario, grid, seed.wrapping_add(HIGGS_SEED_OFFSET))?.x)
}

/// Serializable record of the scenario used for a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMeta {
    pub generator: String,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::su2_from_coeffs;

    #[test]
    fn zero_scenario() {
        let g = Grid::unit(3, 6).unwrap();
        let f = sample_connection(&Scenario::parse("zero").unwrap(), g, 0).unwrap();
        assert!(f.x.values.iter().chain(&f.t.values).all(|c| *c == CoeffTriple::ZERO));
    }

    #[test]
    fn abelian_theta_coefficients() {
        let g = Grid::unit(2, 64).unwrap();
        let f = sample_connection(&Scenario::parse("abelian(theta=sin(x)cos(t))").unwrap(), g, 0).unwrap();
        for i in 0..g.len() {
            let [x, _, t] = g.point(i);
            assert!((f.x.values[i].c1 - x.cos() * t.cos()).abs() < 1e-15);
            assert!((f.t.values[i].c3 + x.sin() * t.sin()).abs() < 1e-15);
            assert_eq!(f.x.values[i].c2, 0.0);
            assert_eq!(f.t.values[i].c1, 0.0);
        }
    }

    #[test]
    fn constants_scenario() {
        let g = Grid::unit(2, 5).unwrap();
        let f = sample_connection(&Scenario::parse("constants(k=1, omega3=0.7)").unwrap(), g, 0).unwrap();
        assert!(f.x.values.iter().all(|c| *c == CoeffTriple::new(1.0, 0.0, 0.0)));
        assert!(f.t.values.iter().all(|c| *c == CoeffTriple::new(0.0, 0.0, 0.7)));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Scenario::parse("bogus"), Err(Error::Scenario(_))));
        assert!(Scenario::parse("constants(q=1)").is_err());
        assert!(Scenario::parse("random(amplitude=-1)").is_err());
        assert!(Scenario::parse("random(bandwidth=0)").is_err());
        assert!(Scenario::parse("random(bandwidth=99)").is_err());
        assert!(Scenario::parse("pure-gauge(x=1:2)").is_err());
        assert!(Scenario::parse("constants(k=1, k=2)").is_err());
        let g = Grid::unit(2, 6).unwrap();
        let s = Scenario::parse("pure-gauge(x=1:0:0, y=0:1:0)").unwrap();
        assert!(sample_connection(&s, g, 0).is_err());
        let s = Scenario::parse("constants(m1=1)").unwrap();
        assert!(sample_connection(&s, g, 0).is_err());
    }

    #[test]
    fn random_is_deterministic_and_scales() {
        let g = Grid::unit(3, 6).unwrap();
        let a = make_random_smooth(42, 1.0, 2, g).unwrap();
        let b = make_random_smooth(42, 1.0, 2, g).unwrap();
        assert_eq!(a, b);
        let c = make_random_smooth(43, 1.0, 2, g).unwrap();
        assert_ne!(a, c);
        let z = make_random_smooth(42, 0.0, 2, g).unwrap();
        assert!(z.x.values.iter().all(|v| v.as_array().iter().all(|c| *c == 0.0)));
    }

    #[test]
    fn random_jet_derivatives_match_fd() {
        let r = RandomSmooth::new(5, 1.0, 3, 3).unwrap();
        let p = [0.3, 0.6, 0.2];
        let h = 1e-6;
        let jet = r.jet(p, 3);
        for a in 0..3 {
            let mut pp = p;
            let mut pm = p;
            pp[a] += h;
            pm[a] -= h;
            let (jp, jm) = (r.jet(pp, 3), r.jet(pm, 3));
            for d in 0..3 {
                let fd = (jp.value[d] - jm.value[d]).scale(0.5 / h);
                let err = (fd - jet.grad[d][a]).as_array().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(err < 1e-6, "direction {d} axis {a}: {err}");
            }
        }
    }

    #[test]
    fn pure_gauge_frame_satisfies_linear_system() {
        let gens = [(1.0, 0.0, 0.0), (0.0, 0.0, 1.0)]
            .map(|(a, b, c)| su2_from_coeffs(CoeffTriple::new(a, b, c), Su2Prefactor::HalfI).unwrap());
        let grid = Grid::unit(2, 9).unwrap();
        let pg = make_pure_gauge(&gens, grid).unwrap();
        // U ≡ X₁ and W = e^{xX₁} X₂ e^{−xX₁}
        for i in 0..grid.len() {
            let x = grid.point(i)[0];
            let a = gens[0].scale(x).expm();
            assert!((pg.connection.x.value.get(i) - gens[0]).magnitude() < 1e-15);
            assert!((pg.connection.t.value.get(i) - a * gens[1] * a.dagger()).magnitude() < 1e-14);
        }
        // g_x = U g and g_t = W g, checked by central differences on the closed form
        let p = [0.37, 0.0, 0.61];
        let h = 1e-5;
        let (g0, vals, _) = pure_gauge_point(&gens, p);
        for (axis, d) in [(0usize, 0usize), (2, 2)] {
            let mut pp = p;
            let mut pm = p;
            pp[axis] += h;
            pm[axis] -= h;
            let fd = (pure_gauge_point(&gens, pp).0 - pure_gauge_point(&gens, pm).0).scale(0.5 / h);
            assert!((fd - vals[d] * g0).magnitude() < 1e-8);
        }
    }

    #[test]
    fn pure_gauge_zero_and_commuting_generators() {
        let grid = Grid::unit(3, 6).unwrap();
        let pg = make_pure_gauge(&[So3::zeros(); 3], grid).unwrap();
        assert!(pg.g.data().iter().all(|g| *g == So3::identity()));
        assert!(pg.connection.x.value.is_identically_zero());
        let x1 = so3_unchecked(CoeffTriple::new(0.4, -0.2, 0.9), Beta::Plus);
        let pg = make_pure_gauge(&[x1, x1.scale(2.0), x1.scale(-0.5)], grid).unwrap();
        let w = pg.connection.t.value.data();
        assert!(w.iter().all(|m| (*m - x1.scale(-0.5)).magnitude() < 1e-14));
        assert!(make_pure_gauge(&[x1, x1], grid).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let g = Grid::unit(2, 5).unwrap();
        let f = sample_connection(&Scenario::parse("constants(k=1)").unwrap(), g, 0).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,t,k,sigma,tau,omega1,omega2,omega3");
        assert_eq!(lines.count(), 25);
    }
}
