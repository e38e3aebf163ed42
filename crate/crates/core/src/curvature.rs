//! Zero-curvature residuals of the frame connection.
//!
//! Residuals are the left-hand sides exactly as the compatibility conditions
//! are usually printed:
//!
//! * 1+1, componentwise: `r₁ = k_t − ω₃ₓ − τω₂ + σω₁`, `r₂ = τ_t − ω₁ₓ − σω₃ + kω₂`,
//!   `r₃ = σ_t − ω₂ₓ − kω₁ + τω₃`
//! * 1+1, matrix: `U_t − W_x + [U, W]`
//! * 2+1: `R_a = A_y − B_x + [A, B]`, `R_b = A_t − C_x + [A, C]`, `R_c = B_t − C_y + [B, C]`
//!
//! The Lax and embedding modules express their own compatibility conditions
//! in terms of these residuals.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{iso_to_so3, Beta, Sign, FieldValue, MatrixValue, So3, Su2, Su2Prefactor};
use crate::error::{Error, Result};
use crate::fields::{Axis, Component, Connection, ConnectionField, DerivativeMode, Field, Grid};
use crate::lax::SignConvention;

/// Higgs contribution `h · (∂_axis Φ + σ[Φ, partner])` added to a residual.
pub(crate) struct HiggsTerm<'a, E> {
    pub phi: &'a Component<E>,
    pub axis: Axis,
    pub partner: &'a Component<E>,
    pub sign: f64,
}

/// `∂_{q_axis} p − ∂_{p_axis} q + σ[p, q]`, optionally plus a Higgs term.
pub(crate) fn curvature_term<E: MatrixValue>(
    p: &Component<E>,
    p_axis: Axis,
    q: &Component<E>,
    q_axis: Axis,
    sign: Sign,
    higgs: Option<HiggsTerm<'_, E>>,
) -> Result<Field<E>> {
    p.grid().ensure_same(q.grid())?;
    let dp = p.derivative(q_axis)?;
    let dq = q.derivative(p_axis)?;
    let s = sign.value();
    let (pv, qv) = (p.value.data(), q.value.data());
    let (dpv, dqv) = (dp.data(), dq.data());
    let base: Vec<E> = (0..pv.len())
        .into_par_iter()
        .map(|i| {
            let br = pv[i] * qv[i] - qv[i] * pv[i];
            (dpv[i] - dqv[i]) + br.scale(s)
        })
        .collect();
    let data = match higgs {
        None => base,
        Some(h) => {
            h.phi.grid().ensure_same(p.grid())?;
            let dphi = h.phi.derivative(h.axis)?;
            let (phi, partner, dphi) = (h.phi.value.data(), h.partner.value.data(), dphi.data());
            base.into_par_iter()
                .enumerate()
                .map(|(i, r)| {
                    let br = phi[i] * partner[i] - partner[i] * phi[i];
                    (dphi[i] + br.scale(s)).scale(h.sign) + r
                })
                .collect()
        }
    };
    Field::from_vec(*p.grid(), data)
}

/// Componentwise 1+1 residuals `(r₁, r₂, r₃)` from the coefficient fields
/// `k, σ, τ` (x direction) and `ω₁, ω₂, ω₃` (t direction).
pub fn residual_1p1_component(field: &ConnectionField, mode: DerivativeMode) -> Result<[Field<f64>; 3]> {
    let grid = field.grid;
    let s = |dir: &crate::fields::CoeffField, slot| dir.scalar(grid, slot, mode);
    let (k, sg, tau) = (s(&field.x, 0), s(&field.x, 1), s(&field.x, 2));
    let (w1, w2, w3) = (s(&field.t, 0), s(&field.t, 1), s(&field.t, 2));
    let v = |c: &Component<f64>| c.value.data().to_vec();
    let (kv, sv, tv, w1v, w2v, w3v) = (v(&k), v(&sg), v(&tau), v(&w1), v(&w2), v(&w3));
    let deriv = |c: &Component<f64>, a| c.derivative(a).map(|d| d.into_owned());
    let (k_t, s_t, tau_t) = (deriv(&k, Axis::T)?, deriv(&sg, Axis::T)?, deriv(&tau, Axis::T)?);
    let (w1_x, w2_x, w3_x) = (deriv(&w1, Axis::X)?, deriv(&w2, Axis::X)?, deriv(&w3, Axis::X)?);
    let n = grid.len();
    let r1 = (0..n).map(|i| (k_t.get(i) - w3_x.get(i)) + (sv[i] * w1v[i] - tv[i] * w2v[i])).collect();
    let r2 = (0..n).map(|i| (tau_t.get(i) - w1_x.get(i)) + (kv[i] * w2v[i] - sv[i] * w3v[i])).collect();
    let r3 = (0..n).map(|i| (s_t.get(i) - w2_x.get(i)) + (tv[i] * w3v[i] - kv[i] * w1v[i])).collect();
    Ok([Field::from_vec(grid, r1)?, Field::from_vec(grid, r2)?, Field::from_vec(grid, r3)?])
}

/// `U_t − W_x + [U, W]` pointwise.
pub fn residual_1p1_matrix<E: MatrixValue>(u: &Component<E>, w: &Component<E>) -> Result<Field<E>> {
    curvature_term(u, Axis::X, w, Axis::T, Sign::Plus, None)
}

/// `(R_a, R_b, R_c)` of a connection on an `(x, y, t)` grid.
pub fn residual_2p1<E: MatrixValue>(conn: &Connection<E>) -> Result<[Field<E>; 3]> {
    residual_2p1_signed(conn, Sign::Plus)
}

/// Same as [`residual_2p1`] with a chosen bracket sign. `Sign::Minus`
/// gives `R⁻ = (A_y − B_x − [A, B], …)`, which equals `−R(−A, −B, −C)`.
pub fn residual_2p1_signed<E: MatrixValue>(conn: &Connection<E>, sign: Sign) -> Result<[Field<E>; 3]> {
    conn.grid().require_3d("the 2+1 residual")?;
    let (a, b, c) = (conn.a(), conn.b()?, conn.c());
    Ok([
        curvature_term(a, Axis::X, b, Axis::Y, sign, None)?,
        curvature_term(a, Axis::X, c, Axis::T, sign, None)?,
        curvature_term(b, Axis::Y, c, Axis::T, sign, None)?,
    ])
}

/// Residuals of every available plane: `[R_xt]` on 2D grids, `[R_a, R_b, R_c]` on 3D grids.
pub fn residuals<E: MatrixValue>(conn: &Connection<E>) -> Result<Vec<Field<E>>> {
    if conn.grid().dims() == 3 {
        Ok(residual_2p1(conn)?.to_vec())
    } else {
        Ok(vec![residual_1p1_matrix(conn.a(), conn.c())?])
    }
}

/// The bracket parts alone (`[A, B]`, `[A, C]`, `[B, C]`, or `[U, W]` in 1+1).
pub fn bracket_parts<E: MatrixValue>(conn: &Connection<E>) -> Result<Vec<Field<E>>> {
    let br = |p: &Component<E>, q: &Component<E>| p.value.zip_map(&q.value, |x, y| *x * *y - *y * *x);
    if conn.grid().dims() == 3 {
        let b = conn.b()?;
        Ok(vec![br(conn.a(), b)?, br(conn.a(), conn.c())?, br(b, conn.c())?])
    } else {
        Ok(vec![br(conn.a(), conn.c())?])
    }
}

/// Report labels for each representation and dimension.
pub fn labels(representation: &str, dims: usize) -> &'static [&'static str] {
    match (representation, dims) {
        ("so3", 3) => &["13a", "13b", "13c"],
        ("su2", 3) => &["17b", "17a", "17c"],
        ("so3", _) => &["7"],
        _ => &["11"],
    }
}

/// Result of evaluating one connection in both matrix forms.
#[derive(Clone, Debug, Serialize)]
pub struct Equivalence {
    pub so3: ResidualReport,
    pub su2: ResidualReport,
    /// Max over the grid and all equations of ‖iso(su2 residual) − so3 residual‖.
    pub deviation: f64,
    /// Max over the grid and all equations of the `so(3)` bracket term.
    pub bracket_max: f64,
}

/// Builds both matrix forms from one set of coefficients and compares their
/// residuals through [`iso_to_so3`] (using the same `prefactor`).
pub fn equivalence_su2_so3(field: &ConnectionField, prefactor: Su2Prefactor, mode: DerivativeMode) -> Result<Equivalence> {
    let so3 = field.to_so3(Beta::Plus, mode);
    let su2 = field.to_su2(prefactor, mode);
    let rs = residuals(&so3)?;
    let ru = residuals(&su2)?;
    let mut deviation: f64 = 0.0;
    for (a, b) in rs.iter().zip(&ru) {
        let mapped: Result<Vec<So3>> = b.data().par_iter().map(|m| iso_to_so3(m, prefactor)).collect();
        let mapped = Field::from_vec(field.grid, mapped?)?;
        deviation = deviation.max(mapped.sub(a)?.max_norm());
    }
    let bracket_max = bracket_parts(&so3)?.iter().map(|f| f.max_norm()).fold(0.0, f64::max);
    let dims = field.grid.dims();
    let mut so3_report = ResidualReport::new(field.grid).with_seed(field.seed);
    for (l, f) in labels("so3", dims).iter().zip(&rs) {
        so3_report.add(l, f);
    }
    let mut su2_report = ResidualReport::new(field.grid).with_seed(field.seed);
    for (l, f) in labels("su2", dims).iter().zip(&ru) {
        su2_report.add(l, f);
    }
    Ok(Equivalence { so3: so3_report, su2: su2_report, deviation, bracket_max })
}

/// Max, L2 (trapezoid-weighted) and interior-only versions of both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Norms {
    pub max: f64,
    pub l2: f64,
    pub interior_max: f64,
    pub interior_l2: f64,
}

impl Norms {
    pub fn of<T: FieldValue>(f: &Field<T>) -> Norms {
        let grid = f.grid();
        let cell = grid.cell_volume();
        let (mut max, mut l2, mut imax, mut il2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (i, v) in f.data().iter().enumerate() {
            let m = v.magnitude();
            max = max.max(m);
            l2 += grid.weight(i) * m * m;
            if grid.is_interior(i) {
                imax = imax.max(m);
                il2 += cell * m * m;
            }
        }
        Norms { max, l2: l2.sqrt(), interior_max: imax, interior_l2: il2.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub dims: usize,
    pub counts: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl From<&Grid> for GridMeta {
    fn from(g: &Grid) -> Self {
        let axes = g.axes();
        let specs: Vec<_> = axes.iter().map(|a| g.axis(*a).unwrap()).collect();
        GridMeta {
            dims: g.dims(),
            counts: specs.iter().map(|s| s.count).collect(),
            spacing: specs.iter().map(|s| s.spacing).collect(),
            origin: specs.iter().map(|s| s.origin).collect(),
        }
    }
}

/// Per-equation norms plus grid and convention metadata.
///
/// Serializes to a flat JSON object: each equation label maps to
/// `{max, l2, interiorMax, interiorL2}`, next to `schemaVersion`, `grid`,
/// `convention`, `seed` and a free-form `summary` of scalar results.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualReport {
    pub schema_version: u32,
    #[serde(flatten)]
    pub equations: BTreeMap<String, Norms>,
    pub grid: GridMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<SignConvention>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, f64>,
}

impl ResidualReport {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn new(grid: Grid) -> Self {
        ResidualReport {
            schema_version: Self::SCHEMA_VERSION,
            equations: BTreeMap::new(),
            grid: GridMeta::from(&grid),
            convention: None,
            seed: None,
            summary: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_convention(mut self, c: &SignConvention) -> Self {
        self.convention = Some(c.clone());
        self
    }

    pub fn add<T: FieldValue>(&mut self, label: &str, f: &Field<T>) -> &mut Self {
        self.equations.insert(label.to_string(), Norms::of(f));
        self
    }

    pub fn scalar(&mut self, key: &str, v: f64) -> &mut Self {
        self.summary.insert(key.to_string(), v);
        self
    }

    pub fn norms(&self, label: &str) -> Result<Norms> {
        self.equations.get(label).copied().ok_or_else(|| Error::Domain(format!("no equation '{label}' in report")))
    }

    pub fn max_interior(&self) -> f64 {
        self.equations.values().map(|n| n.interior_max).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Report over labelled fields of one type.
pub fn make_report<T: FieldValue>(fields: &[(&str, &Field<T>)], seed: Option<u64>, convention: Option<&SignConvention>) -> Result<ResidualReport> {
    let Some((_, first)) = fields.first() else {
        return Err(Error::Domain("make_report needs at least one field".into()));
    };
    let mut r = ResidualReport::new(*first.grid()).with_seed(seed);
    if let Some(c) = convention {
        r = r.with_convention(c);
    }
    for (l, f) in fields {
        first.grid().ensure_same(f.grid())?;
        r.add(l, f);
    }
    Ok(r)
}

/// Sanity holder for the pairing with [`Su2`] fields in generic code.
pub type Su2Residuals = Vec<Field<Su2>>;
