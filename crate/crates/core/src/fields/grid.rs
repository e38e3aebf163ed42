use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate directions. 2D grids carry `(x, t)`, 3D grids `(x, y, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    T,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::T];

    /// Slot in `[x, y, t]`-ordered arrays.
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::T => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Axis> {
        match s.trim() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "t" => Ok(Axis::T),
            other => Err(Error::Config(format!("unknown axis '{other}'"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::T => "t",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub origin: f64,
    pub spacing: f64,
    pub count: usize,
}

impl AxisSpec {
    pub const MIN_COUNT: usize = 5;

    pub fn new(origin: f64, spacing: f64, count: usize) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) || !origin.is_finite() {
            return Err(Error::Domain(format!("axis spacing must be positive and finite, got {spacing}")));
        }
        if count < Self::MIN_COUNT {
            return Err(Error::Domain(format!(
                "axis needs at least {} points, got {count}",
                Self::MIN_COUNT
            )));
        }
        Ok(AxisSpec { origin, spacing, count })
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + self.spacing * i as f64
    }

    pub fn length(&self) -> f64 {
        self.spacing * (self.count - 1) as f64
    }
}

/// Uniform tensor-product grid. Linear index runs x fastest, then y, then t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x: AxisSpec,
    y: Option<AxisSpec>,
    t: AxisSpec,
}

impl Grid {
    pub fn new_2d(x: AxisSpec, t: AxisSpec) -> Self {
        Grid { x, y: None, t }
    }

    pub fn new_3d(x: AxisSpec, y: AxisSpec, t: AxisSpec) -> Self {
        Grid { x, y: Some(y), t }
    }

    /// `n` points per axis with spacing `h`, starting at the origin.
    pub fn uniform(dims: usize, n: usize, h: f64) -> Result<Self> {
        let a = AxisSpec::new(0.0, h, n)?;
        match dims {
            2 => Ok(Grid::new_2d(a, a)),
            3 => Ok(Grid::new_3d(a, a, a)),
            d => Err(Error::Domain(format!("grid dimension must be 2 or 3, got {d}"))),
        }
    }

    /// `n` points per axis covering `[0, 1]`.
    pub fn unit(dims: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("unit grid needs at least two points".into()));
        }
        Grid::uniform(dims, n, 1.0 / (n - 1) as f64)
    }

    pub fn dims(&self) -> usize {
        if self.y.is_some() {
            3
        } else {
            2
        }
    }

    pub fn axes(&self) -> Vec<Axis> {
        if self.y.is_some() {
            vec![Axis::X, Axis::Y, Axis::T]
        } else {
            vec![Axis::X, Axis::T]
        }
    }

    pub fn has_axis(&self, axis: Axis) -> bool {
        axis != Axis::Y || self.y.is_some()
    }

    pub fn axis(&self, axis: Axis) -> Result<AxisSpec> {
        match axis {
            Axis::X => Ok(self.x),
            Axis::Y => self.y.ok_or(Error::MissingAxis(Axis::Y)),
            Axis::T => Ok(self.t),
        }
    }

    /// Point counts as `[nx, ny, nt]`, with `ny = 1` on 2D grids.
    pub fn counts(&self) -> [usize; 3] {
        [self.x.count, self.y.map_or(1, |a| a.count), self.t.count]
    }

    pub fn len(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stride(&self, axis: Axis) -> usize {
        let [nx, ny, _] = self.counts();
        match axis {
            Axis::X => 1,
            Axis::Y => nx,
            Axis::T => nx * ny,
        }
    }

    pub fn index(&self, ijk: [usize; 3]) -> usize {
        let [nx, ny, _] = self.counts();
        ijk[0] + nx * (ijk[1] + ny * ijk[2])
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let [nx, ny, _] = self.counts();
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn contains(&self, ijk: [i64; 3]) -> bool {
        let n = self.counts();
        (0..3).all(|a| ijk[a] >= 0 && (ijk[a] as usize) < n[a])
    }

    /// Physical coordinates `[x, y, t]` (y = 0 on 2D grids).
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.multi_index(idx);
        [self.x.coord(i), self.y.map_or(0.0, |a| a.coord(j)), self.t.coord(k)]
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        let ijk = self.multi_index(idx);
        let n = self.counts();
        self.axes().iter().all(|a| {
            let i = ijk[a.index()];
            i > 0 && i + 1 < n[a.index()]
        })
    }

    /// Trapezoid-rule quadrature weight of a point.
    pub fn weight(&self, idx: usize) -> f64 {
        let ijk = self.multi_index(idx);
        self.axes()
            .iter()
            .map(|a| {
                let spec = self.axis(*a).unwrap();
                let i = ijk[a.index()];
                if i == 0 || i + 1 == spec.count {
                    0.5 * spec.spacing
                } else {
                    spec.spacing
                }
            })
            .product()
    }

    /// Plain cell volume `Π h`, the weight of an interior point.
    pub fn cell_volume(&self) -> f64 {
        self.axes().iter().map(|a| self.axis(*a).unwrap().spacing).product()
    }

    pub fn volume(&self) -> f64 {
        self.axes().iter().map(|a| self.axis(*a).unwrap().length()).product()
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    pub(crate) fn require_3d(&self, what: &str) -> Result<()> {
        if self.dims() == 3 {
            Ok(())
        } else {
            Err(Error::Domain(format!("{what} needs an (x, y, t) grid")))
        }
    }
}
