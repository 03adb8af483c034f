//! Space-time grids, discrete scalar fields, difference operators and
//! level-set region extraction.
//!
//! Grids are uniform tensor products of a time interval and a 1-D spatial
//! coordinate: the symmetric interval [-R, R] when `dim == 1`, or the radial
//! coordinate [0, R] of a d-ball for `dim > 1` (fields are then radial
//! profiles and the Laplacian carries the (d-1)/r term).

use std::fmt::Write as _;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Uniform space-time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    t_start: f64,
    t_end: f64,
    nt: usize,
    radius: f64,
    nx: usize,
    dim: usize,
}

impl SpaceTimeGrid {
    /// Build a grid on [t_start, t_end] x ([-R, R] in 1-D, [0, R] radially).
    pub fn new(
        t_start: f64,
        t_end: f64,
        nt: usize,
        radius: f64,
        nx: usize,
        dim: usize,
    ) -> Result<Self> {
        if nt < 3 {
            return Err(Error::invalid(format!("nt = {nt}, need nt >= 3")));
        }
        if nx < 5 {
            return Err(Error::invalid(format!("nx = {nx}, need nx >= 5")));
        }
        if !(t_end > t_start) {
            return Err(Error::invalid(format!(
                "need t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        if t_start < 0.0 {
            return Err(Error::invalid(format!("t_start = {t_start} < 0")));
        }
        if !(radius > 0.0) {
            return Err(Error::invalid(format!("R = {radius}, need R > 0")));
        }
        if dim < 1 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        Ok(Self {
            t_start,
            t_end,
            nt,
            radius,
            nx,
            dim,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Time spacing (t_end - t_start)/(nt - 1).
    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.nt - 1) as f64
    }

    /// Spatial extent: 2R for the 1-D interval, R for the radial coordinate.
    pub fn extent(&self) -> f64 {
        if self.dim == 1 {
            2.0 * self.radius
        } else {
            self.radius
        }
    }

    /// Space spacing extent/(nx - 1).
    pub fn h(&self) -> f64 {
        self.extent() / (self.nx - 1) as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t_start + self.dt() * n as f64
    }

    /// Spatial coordinate of node i: x in [-R, R] for 1-D, r in [0, R] radial.
    pub fn x(&self, i: usize) -> f64 {
        let origin = if self.dim == 1 { -self.radius } else { 0.0 };
        origin + self.h() * i as f64
    }
}

/// Discrete real-valued function on a space-time grid, stored (nt, nx)
/// row-major by time. All entries are finite after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<SpaceTimeGrid>,
    values: Array2<f64>,
}

impl ScalarField {
    /// Wrap an existing (nt, nx) array, checking shape and finiteness.
    pub fn from_values(grid: Arc<SpaceTimeGrid>, values: Array2<f64>) -> Result<Self> {
        if values.shape() != [grid.nt(), grid.nx()] {
            return Err(Error::invalid(format!(
                "field shape {:?} does not match grid ({}, {})",
                values.shape(),
                grid.nt(),
                grid.nx()
            )));
        }
        let field = Self { grid, values };
        field.check_finite()?;
        Ok(field)
    }

    /// Sample a function of (t, x) on every node.
    pub fn from_fn(grid: Arc<SpaceTimeGrid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn((grid.nt(), grid.nx()), |(n, i)| {
            f(grid.time(n), grid.x(i))
        });
        Self::from_values(grid, values)
    }

    fn check_finite(&self) -> Result<()> {
        for ((n, i), &v) in self.values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "field value at (t index {n}, x index {i}) is {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid> {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn get(&self, n: usize, i: usize) -> f64 {
        self.values[(n, i)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Apply a pointwise map; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(self.grid.clone(), self.values.mapv(|v| f(v)))
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::invalid("fields live on different grids"));
        }
        let mut values = self.values.clone();
        values.zip_mut_with(&other.values, |a, &b| *a = f(*a, b));
        Self::from_values(self.grid.clone(), values)
    }

    /// Discrete time derivative: central differences at interior time nodes,
    /// one-sided second order at the two boundary layers.
    pub fn time_derivative(&self) -> ScalarField {
        let (nt, nx) = (self.grid.nt(), self.grid.nx());
        let dt = self.grid.dt();
        let f = &self.values;
        let mut out = Array2::zeros((nt, nx));
        for i in 0..nx {
            out[(0, i)] = (-3.0 * f[(0, i)] + 4.0 * f[(1, i)] - f[(2, i)]) / (2.0 * dt);
            for n in 1..nt - 1 {
                out[(n, i)] = (f[(n + 1, i)] - f[(n - 1, i)]) / (2.0 * dt);
            }
            out[(nt - 1, i)] =
                (3.0 * f[(nt - 1, i)] - 4.0 * f[(nt - 2, i)] + f[(nt - 3, i)]) / (2.0 * dt);
        }
        Self {
            grid: self.grid.clone(),
            values: out,
        }
    }

    /// Discrete spatial gradient (d/dx, or d/dr in radial mode): central
    /// differences inside, one-sided second order at the ends. At r = 0 the
    /// radial gradient vanishes by symmetry.
    pub fn gradient(&self) -> ScalarField {
        let (nt, nx) = (self.grid.nt(), self.grid.nx());
        let h = self.grid.h();
        let radial = self.grid.dim() > 1;
        let f = &self.values;
        let mut out = Array2::zeros((nt, nx));
        for n in 0..nt {
            out[(n, 0)] = if radial {
                0.0
            } else {
                (-3.0 * f[(n, 0)] + 4.0 * f[(n, 1)] - f[(n, 2)]) / (2.0 * h)
            };
            for i in 1..nx - 1 {
                out[(n, i)] = (f[(n, i + 1)] - f[(n, i - 1)]) / (2.0 * h);
            }
            out[(n, nx - 1)] =
                (3.0 * f[(n, nx - 1)] - 4.0 * f[(n, nx - 2)] + f[(n, nx - 3)]) / (2.0 * h);
        }
        Self {
            grid: self.grid.clone(),
            values: out,
        }
    }

    /// Discrete Laplacian. 1-D: the 3-point second difference, with 4-point
    /// one-sided stencils at the outermost columns. Radial mode (dim d > 1):
    /// f_rr + (d-1)/r f_r, with the symmetric limit d*f_rr at r = 0. Both
    /// stencils are exact on quadratics.
    pub fn laplacian(&self) -> ScalarField {
        let (nt, nx) = (self.grid.nt(), self.grid.nx());
        let h = self.grid.h();
        let h2 = h * h;
        let d = self.grid.dim();
        let f = &self.values;
        let mut out = Array2::zeros((nt, nx));
        let one_sided_second = |a: f64, b: f64, c: f64, e: f64| (2.0 * a - 5.0 * b + 4.0 * c - e) / h2;
        for n in 0..nt {
            for i in 1..nx - 1 {
                let frr = (f[(n, i + 1)] - 2.0 * f[(n, i)] + f[(n, i - 1)]) / h2;
                out[(n, i)] = if d == 1 {
                    frr
                } else {
                    let fr = (f[(n, i + 1)] - f[(n, i - 1)]) / (2.0 * h);
                    frr + (d - 1) as f64 / self.grid.x(i) * fr
                };
            }
            if d == 1 {
                out[(n, 0)] = one_sided_second(f[(n, 0)], f[(n, 1)], f[(n, 2)], f[(n, 3)]);
            } else {
                // r = 0: symmetric limit d * f_rr(0), f_rr(0) = 2(f_1 - f_0)/h^2
                out[(n, 0)] = d as f64 * 2.0 * (f[(n, 1)] - f[(n, 0)]) / h2;
            }
            let m = nx - 1;
            let frr = one_sided_second(f[(n, m)], f[(n, m - 1)], f[(n, m - 2)], f[(n, m - 3)]);
            out[(n, m)] = if d == 1 {
                frr
            } else {
                let fr =
                    (3.0 * f[(n, m)] - 4.0 * f[(n, m - 1)] + f[(n, m - 2)]) / (2.0 * h);
                frr + (d - 1) as f64 / self.grid.x(m) * fr
            };
        }
        Self {
            grid: self.grid.clone(),
            values: out,
        }
    }

    /// Mask of nodes with f >= k (`Sign::Above`) or f <= -k (`Sign::Below`).
    /// Requires k > 0.
    pub fn superlevel_mask(&self, k: f64, sign: LevelSign) -> Result<RegionMask> {
        if !(k > 0.0) {
            return Err(Error::invalid(format!("level threshold k = {k}, need k > 0")));
        }
        let mask = self.values.mapv(|v| match sign {
            LevelSign::Above => v >= k,
            LevelSign::Below => v <= -k,
        });
        Ok(RegionMask {
            grid: self.grid.clone(),
            mask,
        })
    }

    /// Serialize as CSV `t,x,value`, row-major by time then space, full
    /// double precision (17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 32);
        out.push_str("t,x,value\n");
        for n in 0..self.grid.nt() {
            let t = self.grid.time(n);
            for i in 0..self.grid.nx() {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", t, self.grid.x(i), self.values[(n, i)]);
            }
        }
        out
    }
}

/// Which side of the level set to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelSign {
    /// {f >= k}
    Above,
    /// {f <= -k}
    Below,
}

/// Boolean mask over a grid's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    grid: Arc<SpaceTimeGrid>,
    mask: Array2<bool>,
}

impl RegionMask {
    pub fn full(grid: Arc<SpaceTimeGrid>) -> Self {
        let mask = Array2::from_elem((grid.nt(), grid.nx()), true);
        Self { grid, mask }
    }

    pub fn from_fn(grid: Arc<SpaceTimeGrid>, f: impl Fn(f64, f64) -> bool) -> Self {
        let mask = Array2::from_shape_fn((grid.nt(), grid.nx()), |(n, i)| {
            f(grid.time(n), grid.x(i))
        });
        Self { grid, mask }
    }

    pub fn from_index_fn(grid: Arc<SpaceTimeGrid>, f: impl Fn(usize, usize) -> bool) -> Self {
        let mask = Array2::from_shape_fn((grid.nt(), grid.nx()), |(n, i)| f(n, i));
        Self { grid, mask }
    }

    /// Pointwise complement.
    pub fn not(&self) -> RegionMask {
        RegionMask {
            grid: self.grid.clone(),
            mask: self.mask.mapv(|b| !b),
        }
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid> {
        &self.grid
    }

    pub fn contains(&self, n: usize, i: usize) -> bool {
        self.mask[(n, i)]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// Node indices in row-major (time-major) order.
    pub fn nodes(&self) -> Vec<(usize, usize)> {
        self.mask
            .indexed_iter()
            .filter_map(|(idx, &b)| b.then_some(idx))
            .collect()
    }

    /// Pointwise intersection.
    pub fn and(&self, other: &RegionMask) -> Result<RegionMask> {
        if self.grid != other.grid {
            return Err(Error::invalid("masks live on different grids"));
        }
        let mut mask = self.mask.clone();
        mask.zip_mut_with(&other.mask, |a, &b| *a = *a && b);
        Ok(RegionMask {
            grid: self.grid.clone(),
            mask,
        })
    }

    pub fn or(&self, other: &RegionMask) -> Result<RegionMask> {
        if self.grid != other.grid {
            return Err(Error::invalid("masks live on different grids"));
        }
        let mut mask = self.mask.clone();
        mask.zip_mut_with(&other.mask, |a, &b| *a = *a || b);
        Ok(RegionMask {
            grid: self.grid.clone(),
            mask,
        })
    }

    /// True if every node of `self` also lies in `other`.
    pub fn subset_of(&self, other: &RegionMask) -> bool {
        self.grid == other.grid
            && self
                .mask
                .iter()
                .zip(other.mask.iter())
                .all(|(&a, &b)| !a || b)
    }

    /// Drop the outermost spatial columns (where only one-sided spatial
    /// stencils exist).
    pub fn without_space_boundary(&self) -> RegionMask {
        let mut mask = self.mask.clone();
        let nx = self.grid.nx();
        for n in 0..self.grid.nt() {
            mask[(n, 0)] = false;
            mask[(n, nx - 1)] = false;
        }
        RegionMask {
            grid: self.grid.clone(),
            mask,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t0: f64, t1: f64, nt: usize, r: f64, nx: usize, d: usize) -> Arc<SpaceTimeGrid> {
        Arc::new(SpaceTimeGrid::new(t0, t1, nt, r, nx, d).unwrap())
    }

    #[test]
    fn spacing_examples() {
        let g = SpaceTimeGrid::new(1.0, 2.0, 101, 4.0, 201, 1).unwrap();
        assert!((g.dt() - 0.01).abs() < 1e-15);
        assert!((g.h() - 0.04).abs() < 1e-15);
        assert!((g.x(0) + 4.0).abs() < 1e-15);

        let g = SpaceTimeGrid::new(1.0, 9.0, 81, 6.0, 301, 1).unwrap();
        assert!((g.dt() - 0.1).abs() < 1e-15);
        assert!((g.h() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpaceTimeGrid::new(0.0, 1.0, 2, 1.0, 10, 1).is_err()); // nt < 3
        assert!(SpaceTimeGrid::new(0.0, 1.0, 10, 1.0, 4, 1).is_err()); // nx < 5
        assert!(SpaceTimeGrid::new(1.0, 1.0, 10, 1.0, 10, 1).is_err()); // t1 <= t0
        assert!(SpaceTimeGrid::new(0.0, 1.0, 10, 0.0, 10, 1).is_err()); // R = 0
        assert!(SpaceTimeGrid::new(-1.0, 1.0, 10, 1.0, 10, 1).is_err()); // t0 < 0
        assert!(SpaceTimeGrid::new(0.0, 1.0, 10, 1.0, 10, 0).is_err()); // d = 0
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = grid(0.0, 1.0, 3, 1.0, 5, 1);
        assert!(ScalarField::from_fn(g, |t, _| 1.0 / t).is_err());
    }

    #[test]
    fn time_derivative_linear_exact() {
        let g = grid(0.0, 1.0, 11, 1.0, 5, 1);
        let f = ScalarField::from_fn(g, |t, _| t).unwrap();
        let df = f.time_derivative();
        for &v in df.values().iter() {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn time_derivative_constant_zero() {
        let g = grid(0.0, 1.0, 11, 1.0, 5, 1);
        let f = ScalarField::from_fn(g, |_, _| 7.0).unwrap();
        let df = f.time_derivative();
        for &v in df.values().iter() {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn time_derivative_quadratic_exact() {
        // central difference is exact on quadratics; dt = 0.01
        let g = grid(0.0, 1.0, 101, 1.0, 5, 1);
        let f = ScalarField::from_fn(g.clone(), |t, _| t * t).unwrap();
        let df = f.time_derivative();
        for n in 0..g.nt() {
            let t = g.time(n);
            for i in 0..g.nx() {
                assert!(
                    (df.get(n, i) - 2.0 * t).abs() < 1e-11,
                    "at n={n}: {} vs {}",
                    df.get(n, i),
                    2.0 * t
                );
            }
        }
    }

    #[test]
    fn laplacian_quadratic_exact() {
        let g = grid(0.0, 1.0, 3, 1.0, 21, 1);
        let f = ScalarField::from_fn(g.clone(), |_, x| x * x).unwrap();
        let lap = f.laplacian();
        for n in 0..g.nt() {
            for i in 0..g.nx() {
                assert!((lap.get(n, i) - 2.0).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn gradient_linear_exact() {
        let g = grid(0.0, 1.0, 3, 1.0, 21, 1);
        let f = ScalarField::from_fn(g.clone(), |_, x| x).unwrap();
        let grad = f.gradient();
        for &v in grad.values().iter() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_laplacian_r_squared() {
        // Laplacian of r^2 in d dimensions is 2d, exact on the radial stencil
        let g = grid(0.0, 1.0, 3, 1.0, 21, 3);
        let f = ScalarField::from_fn(g.clone(), |_, r| r * r).unwrap();
        let lap = f.laplacian();
        for n in 0..g.nt() {
            for i in 0..g.nx() {
                assert!(
                    (lap.get(n, i) - 6.0).abs() < 1e-10,
                    "at i={i}: {}",
                    lap.get(n, i)
                );
            }
        }
    }

    #[test]
    fn operators_are_linear() {
        let g = grid(0.0, 1.0, 9, 1.0, 17, 1);
        let f = ScalarField::from_fn(g.clone(), |t, x| (3.0 * x + t).sin()).unwrap();
        let gfun = ScalarField::from_fn(g.clone(), |t, x| x * x * t).unwrap();
        let (alpha, beta) = (2.5, -1.25);
        let combo = f
            .zip_with(&gfun, |a, b| alpha * a + beta * b)
            .unwrap();
        for (op_combo, op_f, op_g) in [
            (combo.laplacian(), f.laplacian(), gfun.laplacian()),
            (combo.gradient(), f.gradient(), gfun.gradient()),
            (
                combo.time_derivative(),
                f.time_derivative(),
                gfun.time_derivative(),
            ),
        ] {
            for ((a, b), c) in op_combo
                .values()
                .iter()
                .zip(op_f.values().iter())
                .zip(op_g.values().iter())
            {
                assert!((a - (alpha * b + beta * c)).abs() < 1e-9 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn superlevel_masks() {
        let g = grid(0.0, 1.0, 3, 1.0, 5, 1);
        let ones = ScalarField::from_fn(g.clone(), |_, _| 1.0).unwrap();
        assert_eq!(
            ones.superlevel_mask(0.5, LevelSign::Above).unwrap().count(),
            15
        );
        assert_eq!(ones.superlevel_mask(2.0, LevelSign::Above).unwrap().count(), 0);
        assert!(ones.superlevel_mask(0.0, LevelSign::Above).is_err());
        assert!(ones.superlevel_mask(-1.0, LevelSign::Above).is_err());
    }

    #[test]
    fn mask_nestedness() {
        let g = grid(0.0, 1.0, 5, 2.0, 41, 1);
        let f = ScalarField::from_fn(g, |t, x| (x + t).cos()).unwrap();
        let big = f.superlevel_mask(0.25, LevelSign::Above).unwrap();
        let small = f.superlevel_mask(0.75, LevelSign::Above).unwrap();
        assert!(small.subset_of(&big));
    }

    #[test]
    fn csv_header_and_precision() {
        let g = grid(0.0, 1.0, 3, 1.0, 5, 1);
        let f = ScalarField::from_fn(g, |_, _| 1.0 / 3.0).unwrap();
        let csv = f.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x,value"));
        let first = lines.next().unwrap();
        assert!(first.ends_with("3.3333333333333331e-1"), "{first}");
    }
}
