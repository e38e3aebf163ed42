//! Lax representations of the 2+1 zero-curvature system.
//!
//! Two forms are covered. The dressed linear system `ψ = g·exp(ε(I₁x + I₂y + I₃t))`
//! lives in [`dressing`]; the first-order operator pencil
//!
//! ```text
//! P₁ = (−∂_t − ∂_y + λ∂_x) − (C + B − λA)
//! P₂ = (λ∂_t − λ∂_y − ∂_x) − (−λC + λB + A)
//! ```
//!
//! lives here. `[P₁, P₂]` is a quadratic polynomial in λ whose coefficient
//! fields satisfy
//!
//! ```text
//! λ⁰: R_a⁻ + R_b⁻      λ¹: 2R_c⁻      λ²: R_a⁻ − R_b⁻
//! ```
//!
//! where `R⁻` is the residual evaluated with the bracket sign flipped
//! ([`residual_2p1_signed`] with [`Sign::Minus`]), i.e. `R⁻(A, B, C) = −R(−A, −B, −C)`.
//! So the pencil is compatible exactly when the negated connection is flat.

pub mod calibrate;
pub mod dressing;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{MatrixValue, Sign, Su2Prefactor};
use crate::curvature::residual_2p1_signed;
use crate::embeddings::SdymMap;
use crate::error::{Error, Result};
use crate::fields::{Axis, Component, Connection, Field};

pub use dressing::{dress, dressed_residual, frame_residual, DressingSpec, DressingTable};

/// How the potential enters a pencil: `D − N` as written, or `D + N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PencilSign {
    #[default]
    Subtract,
    Add,
}

impl PencilSign {
    pub fn value(self) -> f64 {
        match self {
            PencilSign::Subtract => -1.0,
            PencilSign::Add => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    /// `"default"` for the built-in choice, `"calibration"` otherwise.
    pub source: String,
    pub run_id: Option<String>,
}

/// Every sign choice the modules depend on, plus where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SignConvention {
    pub su2_prefactor: Su2Prefactor,
    pub pencil_sign: PencilSign,
    /// ε in `ψ = g·exp(ε(I₁x + I₂y + I₃t))`.
    pub dressing_sign: Sign,
    pub sdym_map: SdymMap,
    pub provenance: Provenance,
}

impl Default for SignConvention {
    fn default() -> Self {
        SignConvention {
            su2_prefactor: Su2Prefactor::HalfI,
            pencil_sign: PencilSign::Subtract,
            dressing_sign: Sign::Minus,
            sdym_map: SdymMap::default(),
            provenance: Provenance { source: "default".into(), run_id: None },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ConventionDocument {
    schema_version: u32,
    #[serde(flatten)]
    convention: SignConvention,
}

impl SignConvention {
    /// Compares the sign choices, ignoring provenance.
    pub fn same_choices(&self, other: &SignConvention) -> bool {
        self.su2_prefactor == other.su2_prefactor
            && self.pencil_sign == other.pencil_sign
            && self.dressing_sign == other.dressing_sign
            && self.sdym_map == other.sdym_map
    }

    /// Compact one-line description of the choices.
    pub fn label(&self) -> String {
        let s = |x: Sign| if x == Sign::Plus { '+' } else { '-' };
        format!(
            "prefactor={} pencil={:?} eps={} sdym(alpha={} beta_y={} swap={})",
            match self.su2_prefactor {
                Su2Prefactor::HalfI => "i/2",
                Su2Prefactor::InverseTwoI => "1/(2i)",
            },
            self.pencil_sign,
            s(self.dressing_sign),
            s(self.sdym_map.alpha_sign),
            s(self.sdym_map.beta_y_sign),
            self.sdym_map.swap_xy
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ConventionDocument { schema_version: 1, convention: self.clone() };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ConventionDocument =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad convention file: {e}")))?;
        if doc.schema_version != 1 {
            return Err(Error::Config(format!("unsupported convention schemaVersion {}", doc.schema_version)));
        }
        Ok(doc.convention)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read convention file {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// First-order operator `D(λ) + N(λ)` with `D` a constant-coefficient
/// derivative combination and `N` a matrix potential, both linear in λ.
#[derive(Clone, Debug)]
pub struct OperatorPencil<E> {
    /// `derivative[p][axis]` multiplies `λ^p ∂_axis`.
    pub derivative: [[f64; 3]; 2],
    /// `potential[p]` multiplies `λ^p`.
    pub potential: [Component<E>; 2],
}

fn apply_derivative<E: MatrixValue>(coeffs: &[f64; 3], f: &Component<E>) -> Result<Field<E>> {
    let mut out = Field::zeros(*f.grid());
    for axis in Axis::ALL {
        let c = coeffs[axis.index()];
        if c != 0.0 {
            out = out.add(&f.derivative(axis)?.scale(c))?;
        }
    }
    Ok(out)
}

fn bracket<E: MatrixValue>(a: &Field<E>, b: &Field<E>) -> Result<Field<E>> {
    a.zip_map(b, |x, y| *x * *y - *y * *x)
}

impl<E: MatrixValue> OperatorPencil<E> {
    /// Derivative coefficients and potential at a fixed λ.
    pub fn at(&self, lambda: f64) -> Result<([f64; 3], Component<E>)> {
        let d = [0, 1, 2].map(|a| self.derivative[0][a] + lambda * self.derivative[1][a]);
        let n = self.potential[0].add(&self.potential[1].scale(lambda))?;
        Ok((d, n))
    }
}

/// Coefficient fields of `λ⁰, λ¹, λ²` in `[P₁, P₂] = D₁(N₂) − D₂(N₁) + [N₁, N₂]`.
pub fn pencil_commutator_coeffs<E: MatrixValue>(p1: &OperatorPencil<E>, p2: &OperatorPencil<E>) -> Result<[Field<E>; 3]> {
    let grid = *p1.potential[0].grid();
    for n in p1.potential.iter().chain(&p2.potential) {
        grid.ensure_same(n.grid())?;
    }
    let mut out = [Field::zeros(grid), Field::zeros(grid), Field::zeros(grid)];
    for a in 0..2 {
        for b in 0..2 {
            let term = apply_derivative(&p1.derivative[a], &p2.potential[b])?
                .sub(&apply_derivative(&p2.derivative[a], &p1.potential[b])?)?
                .add(&bracket(&p1.potential[a].value, &p2.potential[b].value)?)?;
            out[a + b] = out[a + b].add(&term)?;
        }
    }
    Ok(out)
}

/// `[P₁, P₂]` evaluated at one numeric λ.
pub fn pencil_commutator_at<E: MatrixValue>(p1: &OperatorPencil<E>, p2: &OperatorPencil<E>, lambda: f64) -> Result<Field<E>> {
    let (d1, n1) = p1.at(lambda)?;
    let (d2, n2) = p2.at(lambda)?;
    apply_derivative(&d1, &n2)?.sub(&apply_derivative(&d2, &n1)?)?.add(&bracket(&n1.value, &n2.value)?)
}

/// Recovers the λ-coefficients from `[P₁, P₂]` at three distinct λ values by
/// solving the monomial Vandermonde system.
pub fn lambda_sweep<E: MatrixValue>(p1: &OperatorPencil<E>, p2: &OperatorPencil<E>, lambdas: [f64; 3]) -> Result<[Field<E>; 3]> {
    let v = nalgebra::Matrix3::from_fn(|j, k| lambdas[j].powi(k as i32));
    let inv = v
        .try_inverse()
        .filter(|_| lambdas[0] != lambdas[1] && lambdas[1] != lambdas[2] && lambdas[0] != lambdas[2])
        .ok_or_else(|| Error::Domain(format!("λ sweep needs three distinct values, got {lambdas:?}")))?;
    let samples: Vec<Field<E>> =
        lambdas.par_iter().map(|l| pencil_commutator_at(p1, p2, *l)).collect::<Result<_>>()?;
    let grid = *samples[0].grid();
    let coeff = |k: usize| -> Result<Field<E>> {
        let mut f = Field::zeros(grid);
        for (j, s) in samples.iter().enumerate() {
            f = f.add(&s.scale(inv[(k, j)]))?;
        }
        Ok(f)
    };
    Ok([coeff(0)?, coeff(1)?, coeff(2)?])
}

/// The two pencils of a connection with `A ↦ x`, `B ↦ y`, `C ↦ t`.
pub fn gcme_pencils<E: MatrixValue>(conn: &Connection<E>, sign: PencilSign) -> Result<(OperatorPencil<E>, OperatorPencil<E>)> {
    conn.grid().require_3d("the operator pencil")?;
    let (a, b, c) = (conn.a(), conn.b()?, conn.c());
    let s = sign.value();
    let p1 = OperatorPencil {
        derivative: [[0.0, -1.0, -1.0], [1.0, 0.0, 0.0]],
        potential: [c.add(b)?.scale(s), a.scale(-s)],
    };
    let p2 = OperatorPencil {
        derivative: [[-1.0, 0.0, 0.0], [0.0, -1.0, 1.0]],
        potential: [a.scale(s), c.sub(b)?.scale(-s)],
    };
    Ok((p1, p2))
}

/// Inverts `(λ⁰, λ¹, λ²) = (R_a + R_b, 2R_c, R_a − R_b)`.
pub fn coeffs_to_gcme<E: MatrixValue>(coeffs: &[Field<E>; 3]) -> Result<[Field<E>; 3]> {
    let [c0, c1, c2] = coeffs;
    Ok([c0.add(c2)?.scale(0.5), c0.sub(c2)?.scale(0.5), c1.scale(0.5)])
}

/// Forward map `(R_a, R_b, R_c) ↦ (R_a + R_b, 2R_c, R_a − R_b)`.
pub fn gcme_to_coeffs<E: MatrixValue>(r: &[Field<E>; 3]) -> Result<[Field<E>; 3]> {
    let [ra, rb, rc] = r;
    Ok([ra.add(rb)?, rc.scale(2.0), ra.sub(rb)?])
}

/// Residuals a compatible pencil must reproduce: `R⁻(A, B, C)`.
pub fn pencil_target<E: MatrixValue>(conn: &Connection<E>) -> Result<[Field<E>; 3]> {
    residual_2p1_signed(conn, Sign::Minus)
}

/// Max over the three equations of ‖coeffs_to_gcme(coeffs) − target‖.
pub fn mapping_deviation<E: MatrixValue>(coeffs: &[Field<E>; 3], target: &[Field<E>; 3]) -> Result<f64> {
    let r = coeffs_to_gcme(coeffs)?;
    let mut dev: f64 = 0.0;
    for k in 0..3 {
        dev = dev.max(r[k].sub(&target[k])?.max_norm());
    }
    Ok(dev)
}
