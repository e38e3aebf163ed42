use std::borrow::Cow;

use rayon::prelude::*;

use super::grid::{Axis, Grid};
use crate::algebra::{FieldValue, MatrixValue};
use crate::error::{Error, Result};

/// One value per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid,
    data: Vec<T>,
}

/// A field of matrices.
pub type MatrixField<E> = Field<E>;

impl<T: FieldValue> Field<T> {
    pub fn from_vec(grid: Grid, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} samples, grid has {} points",
                data.len(),
                grid.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at point {i}")));
        }
        Ok(Field { grid, data })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field { grid, data: vec![T::zero(); grid.len()] }
    }

    pub fn constant(grid: Grid, v: T) -> Self {
        Field { grid, data: vec![v; grid.len()] }
    }

    /// Samples `f` at the physical coordinates `[x, y, t]` of every point.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> T + Sync) -> Self {
        let data = (0..grid.len()).into_par_iter().map(|i| f(grid.point(i))).collect();
        Field { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, idx: usize) -> T {
        self.data[idx]
    }

    pub fn at(&self, ijk: [usize; 3]) -> T {
        self.data[self.grid.index(ijk)]
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(&T) -> U + Sync) -> Field<U> {
        Field { grid: self.grid, data: self.data.par_iter().map(&f).collect() }
    }

    pub fn zip_map<S: FieldValue, U: FieldValue>(
        &self,
        other: &Field<S>,
        f: impl Fn(&T, &S) -> U + Sync,
    ) -> Result<Field<U>> {
        self.grid.ensure_same(&other.grid)?;
        let data = self.data.par_iter().zip(other.data.par_iter()).map(|(a, b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, data })
    }

    pub fn add(&self, other: &Field<T>) -> Result<Field<T>> {
        self.zip_map(other, |a, b| *a + *b)
    }

    pub fn sub(&self, other: &Field<T>) -> Result<Field<T>> {
        self.zip_map(other, |a, b| *a - *b)
    }

    pub fn scale(&self, s: f64) -> Field<T> {
        self.map(|a| a.scale(s))
    }

    /// Largest pointwise magnitude over the whole grid.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    /// Largest pointwise magnitude over interior points only.
    pub fn interior_max_norm(&self) -> f64 {
        self.data
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.is_interior(*i))
            .map(|(_, v)| v.magnitude())
            .fold(0.0, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.data.iter().all(|v| v.magnitude() == 0.0)
    }
}

/// Second-order derivative along `axis`: central differences in the interior,
/// one-sided three-point stencils on the two boundary layers.
///
/// Exact (to roundoff) on polynomials of degree ≤ 2.
pub fn partial_derivative<T: FieldValue>(f: &Field<T>, axis: Axis) -> Result<Field<T>> {
    let grid = *f.grid();
    let spec = grid.axis(axis)?;
    let stride = grid.stride(axis);
    let n = spec.count;
    let inv2h = 1.0 / (2.0 * spec.spacing);
    let data = &f.data;
    let out = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let i = grid.multi_index(idx)[axis.index()];
            let at = |off: isize| data[(idx as isize + off * stride as isize) as usize];
            let d = if i == 0 {
                at(1).scale(4.0) - at(0).scale(3.0) - at(2)
            } else if i + 1 == n {
                at(0).scale(3.0) - at(-1).scale(4.0) + at(-2)
            } else {
                at(1) - at(-1)
            };
            d.scale(inv2h)
        })
        .collect();
    Ok(Field { grid, data: out })
}

/// How residual operators obtain derivatives of connection components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeMode {
    /// Closed-form derivatives supplied by the generator.
    #[default]
    Analytic,
    /// Second-order finite differences of the sampled values.
    Fd,
}

impl DerivativeMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(DerivativeMode::Analytic),
            "fd" => Ok(DerivativeMode::Fd),
            o => Err(Error::Config(format!("unknown derivative mode '{o}'"))),
        }
    }
}

/// A sampled field together with optional closed-form partial derivatives.
///
/// `derivative` returns the supplied derivative when present and falls back
/// to finite differences otherwise. Linear combinations keep the derivatives
/// only when every operand has them.
#[derive(Clone, Debug)]
pub struct Component<T> {
    pub value: Field<T>,
    pub grad: [Option<Field<T>>; 3],
}

impl<T: FieldValue> Component<T> {
    /// Derivatives by finite differences only.
    pub fn sampled(value: Field<T>) -> Self {
        Component { value, grad: [None, None, None] }
    }

    pub fn with_grad(value: Field<T>, grad: [Option<Field<T>>; 3]) -> Result<Self> {
        for g in grad.iter().flatten() {
            value.grid().ensure_same(g.grid())?;
        }
        Ok(Component { value, grad })
    }

    pub fn zeros(grid: Grid) -> Self {
        let z = Field::zeros(grid);
        let gz = |a: Axis| grid.has_axis(a).then(|| z.clone());
        Component { grad: [gz(Axis::X), gz(Axis::Y), gz(Axis::T)], value: z }
    }

    pub fn grid(&self) -> &Grid {
        self.value.grid()
    }

    pub fn has_grad(&self) -> bool {
        self.grid().axes().iter().all(|a| self.grad[a.index()].is_some())
    }

    /// Drops closed-form derivatives, forcing finite differences.
    pub fn without_grad(&self) -> Self {
        Component::sampled(self.value.clone())
    }

    pub fn derivative(&self, axis: Axis) -> Result<Cow<'_, Field<T>>> {
        if !self.grid().has_axis(axis) {
            return Err(Error::MissingAxis(axis));
        }
        match &self.grad[axis.index()] {
            Some(g) => Ok(Cow::Borrowed(g)),
            None => Ok(Cow::Owned(partial_derivative(&self.value, axis)?)),
        }
    }

    /// Applies a linear pointwise map to values and derivatives alike.
    pub fn map_linear<U: FieldValue>(&self, f: impl Fn(&T) -> U + Sync + Copy) -> Component<U> {
        Component {
            value: self.value.map(f),
            grad: [0, 1, 2].map(|i| self.grad[i].as_ref().map(|g| g.map(f))),
        }
    }

    fn combine(&self, other: &Component<T>, f: impl Fn(&T, &T) -> T + Sync + Copy) -> Result<Component<T>> {
        let value = self.value.zip_map(&other.value, f)?;
        let mut grad = [None, None, None];
        for (i, slot) in grad.iter_mut().enumerate() {
            if let (Some(a), Some(b)) = (&self.grad[i], &other.grad[i]) {
                *slot = Some(a.zip_map(b, f)?);
            }
        }
        Ok(Component { value, grad })
    }

    pub fn add(&self, other: &Component<T>) -> Result<Component<T>> {
        self.combine(other, |a, b| *a + *b)
    }

    pub fn sub(&self, other: &Component<T>) -> Result<Component<T>> {
        self.combine(other, |a, b| *a - *b)
    }

    pub fn scale(&self, s: f64) -> Component<T> {
        self.map_linear(move |a| a.scale(s))
    }

    pub fn is_identically_zero(&self) -> bool {
        self.value.is_identically_zero() && self.grad.iter().flatten().all(|g| g.is_identically_zero())
    }
}

/// Connection components along each grid direction: `A` (x), `B` (y), `C` (t)
/// or, in the 2×2 form, `U`, `V`, `W`.
#[derive(Clone, Debug)]
pub struct Connection<E> {
    pub x: Component<E>,
    pub y: Option<Component<E>>,
    pub t: Component<E>,
}

impl<E: MatrixValue> Connection<E> {
    pub fn new(x: Component<E>, y: Option<Component<E>>, t: Component<E>) -> Result<Self> {
        x.grid().ensure_same(t.grid())?;
        match (&y, x.grid().dims()) {
            (Some(b), 3) => x.grid().ensure_same(b.grid())?,
            (None, 2) => {}
            _ => return Err(Error::Domain("y component must be present exactly on 3D grids".into())),
        }
        Ok(Connection { x, y, t })
    }

    /// Constant connection on `grid` (exact zero derivatives).
    pub fn constant(grid: Grid, a: E, b: Option<E>, c: E) -> Result<Self> {
        let comp = |v: E| {
            let z = Component::<E>::zeros(grid);
            Component { value: Field::constant(grid, v), grad: z.grad }
        };
        Connection::new(comp(a), b.map(comp), comp(c))
    }

    pub fn zeros(grid: Grid) -> Self {
        let y = (grid.dims() == 3).then(|| Component::zeros(grid));
        Connection { x: Component::zeros(grid), y, t: Component::zeros(grid) }
    }

    pub fn grid(&self) -> &Grid {
        self.x.grid()
    }

    pub fn a(&self) -> &Component<E> {
        &self.x
    }

    pub fn b(&self) -> Result<&Component<E>> {
        self.y.as_ref().ok_or(Error::MissingAxis(Axis::Y))
    }

    pub fn c(&self) -> &Component<E> {
        &self.t
    }

    pub fn component(&self, axis: Axis) -> Result<&Component<E>> {
        match axis {
            Axis::X => Ok(&self.x),
            Axis::Y => self.b(),
            Axis::T => Ok(&self.t),
        }
    }

    pub fn map_linear<U: MatrixValue>(&self, f: impl Fn(&E) -> U + Sync + Copy) -> Connection<U> {
        Connection {
            x: self.x.map_linear(f),
            y: self.y.as_ref().map(|c| c.map_linear(f)),
            t: self.t.map_linear(f),
        }
    }

    pub fn scale(&self, s: f64) -> Connection<E> {
        self.map_linear(move |m| m.scale(s))
    }

    pub fn without_grad(&self) -> Connection<E> {
        Connection {
            x: self.x.without_grad(),
            y: self.y.as_ref().map(|c| c.without_grad()),
            t: self.t.without_grad(),
        }
    }
}
