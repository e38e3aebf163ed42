//! Frame transport along grid paths.
//!
//! Each edge integrates `dS/dθ = K(θ) S`, `S(0) = I`, with the classical
//! fourth-order Runge–Kutta method, where `K` is the connection component
//! along the edge scaled by the signed edge length. Between the two endpoint
//! samples the component is interpolated cubically (Hermite) when exact
//! derivatives are available, linearly otherwise. Edge propagators are
//! multiplied on the left, so a path from `p` to `q` returns `g(q) g(p)⁻¹` for
//! a pure-gauge frame.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{group_drift, MatrixValue, So3};
use crate::error::{domain, Error, Result};
use crate::fields::{Axis, Connection, Grid};

/// A start point and a sequence of unit steps `(axis, ±1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPath {
    pub start: [usize; 3],
    pub steps: Vec<(Axis, i8)>,
}

impl GridPath {
    pub fn new(start: [usize; 3], steps: Vec<(Axis, i8)>) -> Result<Self> {
        if steps.iter().any(|(_, s)| *s != 1 && *s != -1) {
            return Err(domain("path steps must be +1 or -1"));
        }
        Ok(GridPath { start, steps })
    }

    pub fn straight(start: [usize; 3], axis: Axis, count: usize, sign: i8) -> Result<Self> {
        GridPath::new(start, vec![(axis, sign); count])
    }

    /// Parses moves such as `"+x+x-t+y"` or `"3+x 2-t"` (a count may precede a move).
    pub fn parse(start: [usize; 3], moves: &str) -> Result<Self> {
        let mut steps = Vec::new();
        let mut count = String::new();
        let mut chars = moves.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(c) = chars.next() {
            match c {
                '0'..='9' => count.push(c),
                '+' | '-' => {
                    let axis = chars.next().ok_or_else(|| Error::Config(format!("dangling sign in path '{moves}'")))?;
                    let axis = Axis::parse(&axis.to_string())?;
                    let n = if count.is_empty() { 1 } else { count.parse::<usize>().unwrap() };
                    count.clear();
                    steps.extend(std::iter::repeat_n((axis, if c == '+' { 1 } else { -1 }), n));
                }
                other => return Err(Error::Config(format!("unexpected '{other}' in path '{moves}'"))),
            }
        }
        if !count.is_empty() {
            return Err(Error::Config(format!("trailing count in path '{moves}'")));
        }
        GridPath::new(start, steps)
    }

    /// Moves along `first` then `second` from `p` to `q`; the remaining axis must agree.
    pub fn l_shaped(p: [usize; 3], q: [usize; 3], first: Axis, second: Axis) -> Result<Self> {
        let mut steps = Vec::new();
        for a in [first, second] {
            let (from, to) = (p[a.index()] as i64, q[a.index()] as i64);
            let sign = if to >= from { 1 } else { -1 };
            steps.extend(std::iter::repeat_n((a, sign), (to - from).unsigned_abs() as usize));
        }
        let path = GridPath::new(p, steps)?;
        let end = path.end();
        if end != q.map(|v| v as i64) {
            return Err(Error::EndpointMismatch(p, q));
        }
        Ok(path)
    }

    pub fn end(&self) -> [i64; 3] {
        let mut e = self.start.map(|v| v as i64);
        for (a, s) in &self.steps {
            e[a.index()] += *s as i64;
        }
        e
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &GridPath) -> Result<GridPath> {
        if self.end() != other.start.map(|v| v as i64) {
            return Err(Error::EndpointMismatch(self.end().map(|v| v.max(0) as usize), other.start));
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().copied());
        GridPath::new(self.start, steps)
    }

    /// Checks that every visited point lies on `grid`; returns the end point.
    pub fn validate(&self, grid: &Grid) -> Result<[usize; 3]> {
        let mut p = self.start.map(|v| v as i64);
        if !grid.contains(p) {
            return Err(Error::PathOutOfBounds { step: 0 });
        }
        for (i, (a, s)) in self.steps.iter().enumerate() {
            if !grid.has_axis(*a) {
                return Err(Error::MissingAxis(*a));
            }
            p[a.index()] += *s as i64;
            if !grid.contains(p) {
                return Err(Error::PathOutOfBounds { step: i + 1 });
            }
        }
        Ok(p.map(|v| v as usize))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    Linear,
    Hermite,
    /// Hermite where the component carries exact derivatives, linear elsewhere.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportOptions {
    /// Runge–Kutta steps per edge, at least 1.
    pub substeps: usize,
    /// Polar re-projection onto the group after every edge.
    pub reproject: bool,
    pub interpolation: Interpolation,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { substeps: 4, reproject: true, interpolation: Interpolation::Auto }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult<E> {
    pub end: E,
    /// `‖g†g − I‖` of `end`.
    pub drift: f64,
    pub steps: usize,
}

/// Propagator of one edge starting at grid point `from`.
fn edge_propagator<E: MatrixValue>(conn: &Connection<E>, from: usize, axis: Axis, sign: i8, opts: &TransportOptions) -> Result<E> {
    let grid = conn.grid();
    let comp = conn.component(axis)?;
    let spec = grid.axis(axis)?;
    let to = (from as i64 + sign as i64 * grid.stride(axis) as i64) as usize;
    let len = sign as f64 * spec.spacing;
    let (m0, m1) = (comp.value.get(from), comp.value.get(to));
    let slopes = match (opts.interpolation, &comp.grad[axis.index()]) {
        (Interpolation::Linear, _) | (Interpolation::Auto, None) => None,
        (_, Some(g)) => Some((g.get(from).scale(len), g.get(to).scale(len))),
        (Interpolation::Hermite, None) => {
            let d = comp.derivative(axis)?;
            Some((d.get(from).scale(len), d.get(to).scale(len)))
        }
    };
    let k = |th: f64| -> E {
        let m = match slopes {
            None => m0.scale(1.0 - th) + m1.scale(th),
            Some((d0, d1)) => {
                let (t2, t3) = (th * th, th * th * th);
                m0.scale(2.0 * t3 - 3.0 * t2 + 1.0)
                    + d0.scale(t3 - 2.0 * t2 + th)
                    + m1.scale(-2.0 * t3 + 3.0 * t2)
                    + d1.scale(t3 - t2)
            }
        };
        m.scale(len)
    };
    let n = opts.substeps;
    let dt = 1.0 / n as f64;
    let mut s = E::identity();
    for i in 0..n {
        let th = i as f64 * dt;
        let (ka, kb, kc) = (k(th), k(th + 0.5 * dt), k(th + dt));
        let k1 = ka * s;
        let k2 = kb * (s + k1.scale(0.5 * dt));
        let k3 = kb * (s + k2.scale(0.5 * dt));
        let k4 = kc * (s + k3.scale(dt));
        s = s + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    }
    Ok(s)
}

/// Transports the identity along `path`, returning every intermediate element
/// (the start included).
pub fn propagate_trace<E: MatrixValue>(conn: &Connection<E>, path: &GridPath, start: E, opts: &TransportOptions) -> Result<Vec<E>> {
    if opts.substeps == 0 {
        return Err(domain("transport needs at least one substep per edge"));
    }
    let grid = *conn.grid();
    path.validate(&grid)?;
    let mut idx = grid.index(path.start);
    let mut g = start;
    let mut out = Vec::with_capacity(path.steps.len() + 1);
    out.push(g);
    for (axis, sign) in &path.steps {
        let s = edge_propagator(conn, idx, *axis, *sign, opts)?;
        g = s * g;
        if opts.reproject {
            g = g.project_to_group();
        }
        out.push(g);
        idx = (idx as i64 + *sign as i64 * grid.stride(*axis) as i64) as usize;
    }
    Ok(out)
}

pub fn propagate<E: MatrixValue>(conn: &Connection<E>, path: &GridPath, opts: &TransportOptions) -> Result<TransportResult<E>> {
    let trace = propagate_trace(conn, path, E::identity(), opts)?;
    let end = *trace.last().unwrap();
    Ok(TransportResult { end, drift: group_drift(&end), steps: path.steps.len() })
}

/// Loop `+a, +b, −a, −b` of side `cells` grid cells from `corner`.
pub fn plaquette_path(corner: [usize; 3], plane: (Axis, Axis), cells: usize) -> Result<GridPath> {
    let (a, b) = plane;
    if a == b {
        return Err(domain("plaquette needs two distinct axes"));
    }
    let mut steps = vec![(a, 1); cells];
    steps.extend(vec![(b, 1); cells]);
    steps.extend(vec![(a, -1); cells]);
    steps.extend(vec![(b, -1); cells]);
    GridPath::new(corner, steps)
}

/// `‖H − I‖` for the holonomy `H` around a plaquette.
pub fn plaquette_defect<E: MatrixValue>(
    conn: &Connection<E>,
    corner: [usize; 3],
    plane: (Axis, Axis),
    cells: usize,
    opts: &TransportOptions,
) -> Result<f64> {
    let r = propagate(conn, &plaquette_path(corner, plane, cells)?, opts)?;
    Ok((r.end - E::identity()).magnitude())
}

/// Defects of many plaquettes, computed concurrently, returned in input order.
pub fn plaquette_defects<E: MatrixValue>(
    conn: &Connection<E>,
    corners: &[[usize; 3]],
    plane: (Axis, Axis),
    cells: usize,
    opts: &TransportOptions,
) -> Result<Vec<f64>> {
    corners.par_iter().map(|c| plaquette_defect(conn, *c, plane, cells, opts)).collect()
}

/// Index into `curvature::residual_2p1` output for a plaquette plane.
pub fn plane_residual_index(plane: (Axis, Axis)) -> Result<usize> {
    let mut p = [plane.0, plane.1];
    p.sort();
    match p {
        [Axis::X, Axis::Y] => Ok(0),
        [Axis::X, Axis::T] => Ok(1),
        [Axis::Y, Axis::T] => Ok(2),
        _ => Err(domain("plaquette needs two distinct axes")),
    }
}

/// `‖end₁ − end₂‖` for two paths with the same endpoints.
pub fn path_independence<E: MatrixValue>(conn: &Connection<E>, p1: &GridPath, p2: &GridPath, opts: &TransportOptions) -> Result<f64> {
    if p1.start != p2.start {
        return Err(Error::EndpointMismatch(p1.start, p2.start));
    }
    let grid = conn.grid();
    let (e1, e2) = (p1.validate(grid)?, p2.validate(grid)?);
    if e1 != e2 {
        return Err(Error::EndpointMismatch(e1, e2));
    }
    let (a, b) = rayon::join(|| propagate(conn, p1, opts), || propagate(conn, p2, opts));
    Ok((a?.end - b?.end).magnitude())
}

/// Speed factor `√E` of the curve parametrization.
#[derive(Clone, Debug, PartialEq)]
pub enum SqrtE {
    Constant(f64),
    Samples(Vec<f64>),
}

impl Default for SqrtE {
    fn default() -> Self {
        SqrtE::Constant(1.0)
    }
}

/// `r(x) = r₀ + ∫ √E e₁ dx` by the trapezoid rule on a uniform spacing `h`.
pub fn reconstruct_curve(e1: &[[f64; 3]], sqrt_e: &SqrtE, h: f64, r0: [f64; 3]) -> Result<Vec<[f64; 3]>> {
    let speed = |i: usize| match sqrt_e {
        SqrtE::Constant(c) => *c,
        SqrtE::Samples(v) => v[i],
    };
    if let SqrtE::Samples(v) = sqrt_e {
        if v.len() != e1.len() {
            return Err(Error::GridMismatch(format!("{} √E samples for {} frames", v.len(), e1.len())));
        }
    }
    let mut out = Vec::with_capacity(e1.len());
    let mut r = r0;
    if !e1.is_empty() {
        out.push(r);
    }
    for i in 1..e1.len() {
        for c in 0..3 {
            r[c] += 0.5 * h * (speed(i - 1) * e1[i - 1][c] + speed(i) * e1[i][c]);
        }
        out.push(r);
    }
    Ok(out)
}

/// Frames along x at fixed `(y, t)` indices, starting from `start` at `x = 0`.
pub fn frames_along_x(conn: &Connection<So3>, yt: (usize, usize), start: So3, opts: &TransportOptions) -> Result<Vec<So3>> {
    let nx = conn.grid().counts()[0];
    let path = GridPath::straight([0, yt.0, yt.1], Axis::X, nx - 1, 1)?;
    propagate_trace(conn, &path, start, opts)
}

/// One reconstructed curve per t-slice (at y index 0). The starting frame of
/// each slice is transported from the origin along t; every curve starts at
/// the origin because the frame equations carry no `r_t` information.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveFamily {
    pub curves: Vec<Vec<[f64; 3]>>,
}

pub fn curve_family(conn: &Connection<So3>, sqrt_e: &SqrtE, opts: &TransportOptions) -> Result<CurveFamily> {
    let grid = conn.grid();
    let nt = grid.counts()[2];
    let h = grid.axis(Axis::X)?.spacing;
    let starts = propagate_trace(conn, &GridPath::straight([0, 0, 0], Axis::T, nt - 1, 1)?, So3::identity(), opts)?;
    let curves = starts
        .par_iter()
        .enumerate()
        .map(|(k, g0)| {
            let frames = frames_along_x(conn, (0, k), *g0, opts)?;
            let e1: Vec<[f64; 3]> = frames.iter().map(|f| [f[(0, 0)], f[(0, 1)], f[(0, 2)]]).collect();
            reconstruct_curve(&e1, sqrt_e, h, [0.0; 3])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveFamily { curves })
}

impl CurveFamily {
    /// Rows `t_slice,x_index,r1,r2,r3`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t_slice,x_index,r1,r2,r3")?;
        for (k, c) in self.curves.iter().enumerate() {
            for (i, r) in c.iter().enumerate() {
                writeln!(w, "{k},{i},{:e},{:e},{:e}", r[0], r[1], r[2])?;
            }
        }
        Ok(())
    }

    /// Vertices followed by one polyline element per curve.
    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.curves {
            for r in c {
                writeln!(w, "v {:e} {:e} {:e}", r[0], r[1], r[2])?;
            }
        }
        let mut base = 1;
        for c in &self.curves {
            let idx: Vec<String> = (base..base + c.len()).map(|i| i.to_string()).collect();
            writeln!(w, "l {}", idx.join(" "))?;
            base += c.len();
        }
        Ok(())
    }

    pub fn arc_lengths(&self) -> Vec<f64> {
        self.curves.iter().map(|c| polyline_length(c)).collect()
    }
}

pub fn polyline_length(points: &[[f64; 3]]) -> f64 {
    points
        .windows(2)
        .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2) + (w[1][2] - w[0][2]).powi(2)).sqrt())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{so3_from_coeffs, Beta, CoeffTriple, Su2, Su2Prefactor, su2_from_coeffs};
    use crate::curvature::residual_2p1;
    use crate::fields::{make_pure_gauge, make_random_smooth, sample_connection, AxisSpec, DerivativeMode, Scenario};
    use proptest::prelude::*;

    fn f(i: usize) -> So3 {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        so3_from_coeffs(a.into(), Beta::Plus).unwrap()
    }

    fn gens() -> [So3; 3] {
        [CoeffTriple::new(0.7, -0.3, 0.5), CoeffTriple::new(-0.2, 0.9, 0.4), CoeffTriple::new(0.6, 0.1, -0.8)]
            .map(|c| so3_from_coeffs(c, Beta::Plus).unwrap())
    }

    #[test]
    fn zero_connection_transport() {
        let g = Grid::unit(3, 6).unwrap();
        let r = propagate(&Connection::<So3>::zeros(g), &GridPath::parse([0, 0, 0], "3+x2+y-x+t").unwrap(), &TransportOptions::default()).unwrap();
        assert_eq!(r.end, So3::identity());
        assert_eq!(r.drift, 0.0);
        assert_eq!(r.steps, 7);
    }

    #[test]
    fn constant_edge_matches_exponential() {
        let x = so3_from_coeffs(CoeffTriple::new(0.8, -0.5, 0.3), Beta::Plus).unwrap();
        let err = |h: f64| {
            let a = AxisSpec::new(0.0, h, 5).unwrap();
            let grid = Grid::new_3d(a, a, a);
            let conn = Connection::constant(grid, x, Some(So3::zeros()), So3::zeros()).unwrap();
            let opts = TransportOptions { substeps: 1, reproject: false, ..Default::default() };
            let r = propagate(&conn, &GridPath::straight([0, 0, 0], Axis::X, 1, 1).unwrap(), &opts).unwrap();
            (r.end - x.scale(h).expm()).norm()
        };
        let (e1, e2) = (err(0.2), err(0.1));
        assert!(((e1 / e2).log2() - 5.0).abs() < 0.3, "{}", (e1 / e2).log2());
    }

    #[test]
    fn pure_gauge_path_gives_frame_ratio() {
        for n in [9, 17] {
            let grid = Grid::unit(3, n).unwrap();
            let pg = make_pure_gauge(&gens(), grid).unwrap();
            let p = [1, 2, 0];
            let q = [n - 2, 1, n - 1];
            let path = GridPath::parse(p, &format!("{}+t{}+x-y", n - 1, n - 3)).unwrap();
            let r = propagate(&pg.connection, &path, &TransportOptions::default()).unwrap();
            let expected = pg.g.at(q) * pg.g.at(p).transpose();
            assert!((r.end - expected).norm() < 1e-7, "{}", (r.end - expected).norm());
        }
    }

    #[test]
    fn flat_plaquettes_and_paths() {
        let grid = Grid::unit(3, 65).unwrap();
        let pg = make_pure_gauge(&gens(), grid).unwrap();
        let opts = TransportOptions::default();
        for plane in [(Axis::X, Axis::Y), (Axis::X, Axis::T), (Axis::Y, Axis::T)] {
            assert!(plaquette_defect(&pg.connection, [20, 30, 10], plane, 1, &opts).unwrap() <= 1e-8);
        }
        let p = [0, 0, 32];
        let q = [64, 64, 32];
        let l1 = GridPath::l_shaped(p, q, Axis::X, Axis::Y).unwrap();
        let l2 = GridPath::l_shaped(p, q, Axis::Y, Axis::X).unwrap();
        assert!(path_independence(&pg.connection, &l1, &l2, &opts).unwrap() <= 1e-8);
        assert_eq!(path_independence(&pg.connection, &l1, &l1, &opts).unwrap(), 0.0);
    }

    #[test]
    fn constant_noncommuting_loop() {
        let d = |n: usize| {
            let grid = Grid::unit(3, n).unwrap();
            let conn = Connection::constant(grid, f(0), Some(f(1)), So3::zeros()).unwrap();
            let h = 1.0 / (n - 1) as f64;
            plaquette_defect(&conn, [0, 0, 0], (Axis::X, Axis::Y), 1, &TransportOptions::default()).unwrap() / (h * h)
        };
        let (a, b) = (d(17), d(33));
        let richardson = 2.0 * b - a;
        assert!((richardson - 2f64.sqrt()).abs() < 0.15 * 2f64.sqrt());
        // unit square: e^{−B}e^{−A}e^{B}e^{A} is far from the identity
        let grid = Grid::unit(3, 9).unwrap();
        let conn = Connection::constant(grid, f(0), Some(f(1)), So3::zeros()).unwrap();
        let l1 = GridPath::l_shaped([0, 0, 0], [8, 8, 0], Axis::X, Axis::Y).unwrap();
        let l2 = GridPath::l_shaped([0, 0, 0], [8, 8, 0], Axis::Y, Axis::X).unwrap();
        let disc = path_independence(&conn, &l1, &l2, &TransportOptions::default()).unwrap();
        let exact = (f(1).expm() * f(0).expm() - f(0).expm() * f(1).expm()).norm();
        assert!(disc > 0.1);
        assert!((disc - exact).abs() < 1e-6);
    }

    #[test]
    fn non_flat_defect_is_second_order() {
        let field_at = |n: usize| {
            let grid = Grid::unit(3, n).unwrap();
            make_random_smooth(7, 1.0, 2, grid).unwrap().to_so3(Beta::Plus, DerivativeMode::Analytic)
        };
        let defect = |n: usize| {
            let c = (n - 1) / 2;
            plaquette_defect(&field_at(n), [c, c, c], (Axis::X, Axis::T), 1, &TransportOptions::default()).unwrap()
        };
        let ratio = defect(33) / defect(65);
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
        let conn = field_at(65);
        let r = residual_2p1(&conn).unwrap();
        assert_eq!(plane_residual_index((Axis::T, Axis::X)).unwrap(), 1);
        // the loop encloses the cell, so compare with the residual at its centre
        let centre = [[32, 32, 32], [33, 32, 32], [32, 32, 33], [33, 32, 33]]
            .iter()
            .fold(So3::zeros(), |acc, ijk| acc + r[1].at(*ijk) * 0.25);
        let rn = centre.norm();
        let h = 1.0 / 64.0;
        let d = defect(65) / (h * h);
        assert!((d - rn).abs() < 0.15 * rn, "{d} vs {rn}");
    }

    #[test]
    fn reprojection_controls_drift() {
        let grid = Grid::unit(3, 9).unwrap();
        let conn = make_random_smooth(3, 2.0, 2, grid).unwrap().to_so3(Beta::Plus, DerivativeMode::Analytic);
        let path = GridPath::parse([0, 0, 0], "8+x8+y8+t8-x").unwrap();
        let on = propagate(&conn, &path, &TransportOptions::default()).unwrap();
        assert!(on.drift <= 1e-12);
        let off = propagate(&conn, &path, &TransportOptions { reproject: false, substeps: 1, ..Default::default() }).unwrap();
        assert!(off.drift > on.drift);
        assert!(off.drift < 1e-3);
    }

    #[test]
    fn out_of_bounds_and_mismatch() {
        let grid = Grid::unit(3, 6).unwrap();
        let conn = Connection::<So3>::zeros(grid);
        let bad = GridPath::parse([0, 0, 0], "+x-x-x").unwrap();
        assert!(matches!(propagate(&conn, &bad, &TransportOptions::default()), Err(Error::PathOutOfBounds { step: 3 })));
        let a = GridPath::parse([0, 0, 0], "+x").unwrap();
        let b = GridPath::parse([0, 0, 0], "+y").unwrap();
        assert!(matches!(path_independence(&conn, &a, &b, &TransportOptions::default()), Err(Error::EndpointMismatch(..))));
        assert!(plaquette_defect(&conn, [5, 0, 0], (Axis::X, Axis::Y), 1, &TransportOptions::default()).is_err());
        assert!(GridPath::parse([0, 0, 0], "+q").is_err());
    }

    #[test]
    fn su2_transport_stays_unitary() {
        let grid = Grid::unit(3, 9).unwrap();
        let g: Vec<Su2> = [CoeffTriple::new(0.4, 0.2, -0.1), CoeffTriple::new(0.3, -0.6, 0.2), CoeffTriple::new(-0.5, 0.1, 0.4)]
            .into_iter()
            .map(|c| su2_from_coeffs(c, Su2Prefactor::HalfI).unwrap())
            .collect();
        let pg = make_pure_gauge(&g, grid).unwrap();
        let path = GridPath::parse([0, 0, 0], "8+x8+t").unwrap();
        let r = propagate(&pg.connection, &path, &TransportOptions::default()).unwrap();
        assert!(r.drift < 1e-12);
        assert!((r.end - pg.g.at([8, 0, 8])).norm() < 1e-6);
    }

    #[test]
    fn straight_segment_and_scaled_circle() {
        let e1 = vec![[0.0, 1.0, 0.0]; 11];
        let c = reconstruct_curve(&e1, &SqrtE::Constant(1.0), 0.1, [0.0; 3]).unwrap();
        assert!((polyline_length(&c) - 1.0).abs() < 1e-14);
        assert!(reconstruct_curve(&e1, &SqrtE::Samples(vec![1.0; 3]), 0.1, [0.0; 3]).is_err());

        let grid = Grid::new_2d(AxisSpec::new(0.0, 1.0 / 128.0, 129).unwrap(), AxisSpec::new(0.0, 1.0 / 128.0, 5).unwrap());
        let conn = sample_connection(&Scenario::parse("constants(k=1)").unwrap(), grid, 0).unwrap().to_so3(Beta::Plus, DerivativeMode::Analytic);
        let one = curve_family(&conn, &SqrtE::Constant(1.0), &TransportOptions::default()).unwrap();
        let four = curve_family(&conn, &SqrtE::Constant(4.0), &TransportOptions::default()).unwrap();
        let (l1, l4) = (one.arc_lengths()[0], four.arc_lengths()[0]);
        assert!((l1 - 1.0).abs() < 1e-4);
        assert!((l4 / l1 - 4.0).abs() < 1e-12);
        // e₁ = cos x e₁(0) + sin x e₂(0): chord from the origin is 2 sin(x/2)
        let end = one.curves[0][128];
        let chord = (end[0] * end[0] + end[1] * end[1] + end[2] * end[2]).sqrt();
        assert!((chord - 2.0 * 0.5f64.sin()).abs() < 1e-5);
    }

    #[test]
    fn exports() {
        let fam = CurveFamily { curves: vec![vec![[0.0; 3], [1.0, 0.0, 0.0]], vec![[0.0; 3], [0.0, 1.0, 0.0]]] };
        let mut csv = Vec::new();
        fam.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("t_slice,x_index,r1,r2,r3\n0,0,"));
        let mut obj = Vec::new();
        fam.write_obj(&mut obj).unwrap();
        let obj = String::from_utf8(obj).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert!(obj.contains("l 1 2\nl 3 4\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn transport_is_multiplicative(seed in 0u64..200, split in 1usize..6) {
            let grid = Grid::unit(3, 7).unwrap();
            let conn = make_random_smooth(seed, 1.0, 2, grid).unwrap().to_so3(Beta::Plus, DerivativeMode::Analytic);
            let opts = TransportOptions { reproject: false, ..Default::default() };
            let whole = GridPath::parse([0, 0, 0], "3+x2+y3+t-x").unwrap();
            let first = GridPath::new(whole.start, whole.steps[..split].to_vec()).unwrap();
            let mid = first.end().map(|v| v as usize);
            let second = GridPath::new(mid, whole.steps[split..].to_vec()).unwrap();
            let a = propagate(&conn, &whole, &opts).unwrap().end;
            let b = propagate(&conn, &second, &opts).unwrap().end * propagate(&conn, &first, &opts).unwrap().end;
            prop_assert!((a - b).norm() <= 1e-13);
        }
    }
}
