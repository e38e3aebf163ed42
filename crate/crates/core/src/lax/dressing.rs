//! Dressed frames `ψ = g·exp(ε(I₁x + I₂y + I₃t))` for constant diagonal `Iₖ`.
//!
//! If `g` solves `g_i = A_i g` then, because the diagonal exponential commutes
//! with every `Iₖ`, `ψ_i = A_i ψ + ε ψ Iᵢ`. With ε = −1 that is the dressed
//! system `ψ_i = A_i ψ − ψ Iᵢ` that [`dressed_residual`] measures.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{ComplexMatrix, MatrixValue, Sign};
use crate::error::{domain, Result};
use crate::fields::{partial_derivative, Axis, Connection, Field};

/// Frames whose `|det|` falls below this are treated as singular.
const SINGULAR_DET: f64 = 1e-12;

/// Diagonal entries of `I₁, I₂, I₃` (one per axis x, y, t) and the sign ε.
#[derive(Clone, Debug, PartialEq)]
pub struct DressingSpec {
    pub diag: [Vec<Complex64>; 3],
    pub sign: Sign,
}

impl DressingSpec {
    pub fn new(i1: Vec<Complex64>, i2: Vec<Complex64>, i3: Vec<Complex64>, sign: Sign) -> Result<Self> {
        let n = i1.len();
        if n == 0 || i2.len() != n || i3.len() != n {
            return Err(domain("dressing matrices need equal, nonzero sizes"));
        }
        if !i1.iter().chain(&i2).chain(&i3).all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(domain("non-finite dressing entry"));
        }
        Ok(DressingSpec { diag: [i1, i2, i3], sign })
    }

    pub fn zero(dim: usize, sign: Sign) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        DressingSpec { diag: [z.clone(), z.clone(), z], sign }
    }

    pub fn dim(&self) -> usize {
        self.diag[0].len()
    }

    pub fn matrix<C: ComplexMatrix>(&self, axis: Axis) -> C {
        C::from_diagonal(&self.diag[axis.index()])
    }

    /// `exp(ε(I₁x + I₂y + I₃t))` at physical coordinates `p`.
    pub fn exponential<C: ComplexMatrix>(&self, p: [f64; 3]) -> C {
        let eps = self.sign.value();
        let d: Vec<Complex64> = (0..self.dim())
            .map(|j| ((self.diag[0][j] * p[0] + self.diag[1][j] * p[1] + self.diag[2][j] * p[2]) * eps).exp())
            .collect();
        C::from_diagonal(&d)
    }
}

/// Dressing specs sampled at several λ values. `Iₖ(λ)` is whatever the caller
/// tabulates; no functional form is assumed.
#[derive(Clone, Debug, Default)]
pub struct DressingTable {
    entries: Vec<(f64, DressingSpec)>,
}

impl DressingTable {
    pub fn insert(&mut self, lambda: f64, spec: DressingSpec) {
        match self.entries.iter_mut().find(|(l, _)| *l == lambda) {
            Some(e) => e.1 = spec,
            None => self.entries.push((lambda, spec)),
        }
    }

    pub fn at(&self, lambda: f64) -> Result<&DressingSpec> {
        self.entries
            .iter()
            .find(|(l, _)| *l == lambda)
            .map(|(_, s)| s)
            .ok_or_else(|| domain(format!("no dressing tabulated at λ = {lambda}")))
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|(l, _)| *l)
    }
}

/// `ψ = g·exp(ε(I₁x + I₂y + I₃t))` pointwise.
pub fn dress<E: MatrixValue>(g: &Field<E>, spec: &DressingSpec) -> Result<Field<E::Complex>> {
    if spec.dim() != E::DIM {
        return Err(domain(format!("dressing is {}×{}, frame is {}×{}", spec.dim(), spec.dim(), E::DIM, E::DIM)));
    }
    if let Some(i) = g.data().iter().position(|m| m.det_abs() < SINGULAR_DET) {
        return Err(domain(format!("singular frame at point {i}")));
    }
    let grid = *g.grid();
    let data = g
        .data()
        .par_iter()
        .enumerate()
        .map(|(i, m)| m.to_complex() * spec.exponential::<E::Complex>(grid.point(i)))
        .collect();
    Field::from_vec(grid, data)
}

/// `ψ_i − (A_i ψ − ψ Iᵢ)` for every grid axis, derivatives by finite differences.
pub fn dressed_residual<E: MatrixValue>(
    psi: &Field<E::Complex>,
    conn: &Connection<E>,
    spec: &DressingSpec,
) -> Result<Vec<Field<E::Complex>>> {
    psi.grid().ensure_same(conn.grid())?;
    conn.grid()
        .axes()
        .into_iter()
        .map(|axis| {
            let d = partial_derivative(psi, axis)?;
            let a = &conn.component(axis)?.value;
            let ia: E::Complex = spec.matrix(axis);
            let grid = *psi.grid();
            let data = (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let p = psi.get(i);
                    d.get(i) - (a.get(i).to_complex() * p - p * ia)
                })
                .collect();
            Field::from_vec(grid, data)
        })
        .collect()
}

/// `g_i − A_i g` for every grid axis, derivatives by finite differences.
pub fn frame_residual<E: MatrixValue>(g: &Field<E>, conn: &Connection<E>) -> Result<Vec<Field<E>>> {
    g.grid().ensure_same(conn.grid())?;
    conn.grid()
        .axes()
        .into_iter()
        .map(|axis| {
            let d = partial_derivative(g, axis)?;
            let a = &conn.component(axis)?.value;
            d.zip_map(&a.zip_map(g, |m, x| *m * *x)?, |x, y| *x - *y)
        })
        .collect()
}
