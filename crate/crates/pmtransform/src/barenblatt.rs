//! Closed-form Barenblatt source solutions of the porous medium equation,
//! with exact derivatives, plus the substitution between the two standard
//! ways of writing the equation:
//!
//!   d/dt u = a(u) lap(u)            with a(u) = m|u|^{1-1/m}       (coefficient form)
//!   d/dt s = lap(s|s|^{m-1})        with s = u|u|^{1/m-1}          (standard form)
//!
//! The Barenblatt profile
//!
//!   B(t, x) = t^{-md/(d(m-1)+2)} (C - kappa |x|^2 t^{-2/(d(m-1)+2)})_+^{m/(m-1)},
//!   kappa = (m-1) / (2m(d(m-1)+2)),
//!
//! solves the coefficient form exactly inside its support and is the oracle
//! every discrete computation in this crate is checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the Barenblatt family. `tau` shifts time: evaluation at
/// (t, x) uses B(t + tau, x), so tau = 1 gives the solution that starts from
/// the t = 1 profile at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarenblattParams {
    pub m: f64,
    pub d: usize,
    pub c: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_tau() -> f64 {
    1.0
}

impl BarenblattParams {
    pub fn new(m: f64, d: usize, c: f64, tau: f64) -> Result<Self> {
        if !(m > 1.0) {
            return Err(Error::invalid(format!("m = {m}, need m > 1")));
        }
        if d < 1 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        if !(c > 0.0) {
            return Err(Error::invalid(format!("C = {c}, need C > 0")));
        }
        if !(tau >= 0.0) {
            return Err(Error::invalid(format!("tau = {tau}, need tau >= 0")));
        }
        Ok(Self { m, d, c, tau })
    }

    /// Decay exponent of the amplitude: md/(d(m-1)+2).
    pub fn outer_exponent(&self) -> f64 {
        let d = self.d as f64;
        self.m * d / (d * (self.m - 1.0) + 2.0)
    }

    /// Spreading exponent: 2/(d(m-1)+2).
    pub fn inner_exponent(&self) -> f64 {
        let d = self.d as f64;
        2.0 / (d * (self.m - 1.0) + 2.0)
    }

    /// kappa = (m-1)/(2m(d(m-1)+2)).
    pub fn kappa(&self) -> f64 {
        let d = self.d as f64;
        (self.m - 1.0) / (2.0 * self.m * (d * (self.m - 1.0) + 2.0))
    }

    fn shifted_time(&self, t: f64) -> Result<f64> {
        let s = t + self.tau;
        if !(s > 0.0) {
            return Err(Error::invalid(format!(
                "t + tau = {s} must be positive (t = {t}, tau = {})",
                self.tau
            )));
        }
        Ok(s)
    }

    /// Evaluate B(t + tau, x); zero outside the support.
    pub fn value(&self, t: f64, x: f64) -> Result<f64> {
        let s = self.shifted_time(t)?;
        let w = self.c - self.kappa() * x * x * s.powf(-self.inner_exponent());
        if w <= 0.0 {
            return Ok(0.0);
        }
        Ok(s.powf(-self.outer_exponent()) * w.powf(self.m / (self.m - 1.0)))
    }

    /// Exact (d/dt B, d/dx B, lap B) strictly inside the support; all three
    /// are 0 on and outside the free boundary (one-sided grid stencils are
    /// the tool for behavior at the interface itself, where lap B jumps).
    pub fn derivatives(&self, t: f64, x: f64) -> Result<(f64, f64, f64)> {
        let s = self.shifted_time(t)?;
        let kappa = self.kappa();
        let beta = self.outer_exponent();
        let gamma = self.inner_exponent();
        let p = self.m / (self.m - 1.0);
        let d = self.d as f64;
        let sg = s.powf(-gamma);
        let w = self.c - kappa * x * x * sg;
        if w <= 0.0 {
            return Ok((0.0, 0.0, 0.0));
        }
        let wp = w.powf(p);
        let wp1 = w.powf(p - 1.0);
        let wp2 = w.powf(p - 2.0);
        let dt = s.powf(-beta - 1.0) * (-beta * wp + p * gamma * kappa * x * x * sg * wp1);
        let dx = -2.0 * kappa * p * x * s.powf(-beta - gamma) * wp1;
        let lap = -2.0
            * kappa
            * p
            * s.powf(-beta - gamma)
            * wp2
            * (d * w - 2.0 * kappa * (p - 1.0) * x * x * sg);
        Ok((dt, dx, lap))
    }

    /// Radius of the support at time t: the root of C = kappa x^2 (t+tau)^{-2/(d(m-1)+2)}.
    pub fn support_radius(&self, t: f64) -> Result<f64> {
        let s = self.shifted_time(t)?;
        Ok((self.c / self.kappa()).sqrt() * s.powf(self.inner_exponent() / 2.0))
    }

    /// Peak value B(t + tau, 0).
    pub fn peak(&self, t: f64) -> Result<f64> {
        self.value(t, 0.0)
    }

    /// The coefficient a(u) = m |u|^{1 - 1/m} of the non-divergence form.
    pub fn coefficient(&self, u: f64) -> f64 {
        self.m * u.abs().powf(1.0 - 1.0 / self.m)
    }
}

/// Substitution to the standard form: s = u |u|^{1/m - 1} (0 maps to 0).
pub fn to_standard_form(u: f64, m: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.signum() * u.abs().powf(1.0 / m)
    }
}

/// Inverse substitution: u = s |s|^{m - 1}.
pub fn from_standard_form(s: f64, m: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.signum() * s.abs().powf(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{LevelSign, ScalarField, SpaceTimeGrid};
    use crate::numerics::SplitMix64;
    use std::sync::Arc;

    fn standard() -> BarenblattParams {
        BarenblattParams::new(2.0, 1, 1.0, 0.0).unwrap()
    }

    #[test]
    fn value_at_origin() {
        let p = standard();
        assert!((p.value(1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // 8^{-2/3} = 1/4
        assert!((p.value(8.0, 0.0).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn value_outside_support_is_zero() {
        let p = standard();
        // support radius sqrt(12) ~ 3.464 < 4
        assert_eq!(p.value(1.0, 4.0).unwrap(), 0.0);
        assert_eq!(p.value(1.0, -4.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_time() {
        let p = standard();
        assert!(p.value(0.0, 0.0).is_err());
        assert!(p.derivatives(-1.0, 0.0).is_err());
        assert!(p.support_radius(0.0).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(BarenblattParams::new(1.0, 1, 1.0, 0.0).is_err());
        assert!(BarenblattParams::new(2.0, 0, 1.0, 0.0).is_err());
        assert!(BarenblattParams::new(2.0, 1, 0.0, 0.0).is_err());
        assert!(BarenblattParams::new(2.0, 1, 1.0, -1.0).is_err());
    }

    #[test]
    fn support_radius_values() {
        let p = standard();
        let r1 = p.support_radius(1.0).unwrap();
        assert!((r1 - 12f64.sqrt()).abs() < 1e-12);
        let r8 = p.support_radius(8.0).unwrap();
        assert!((r8 - 2.0 * 12f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn support_radius_monotone_in_time() {
        let p = BarenblattParams::new(3.0, 2, 0.7, 0.5).unwrap();
        let mut prev = 0.0;
        for i in 1..20 {
            let r = p.support_radius(i as f64 * 0.3).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn gradient_vanishes_at_origin() {
        let p = standard();
        let (_, dx, _) = p.derivatives(1.0, 0.0).unwrap();
        assert_eq!(dx, 0.0);
    }

    #[test]
    fn pde_residual_of_exact_solution() {
        // dt B = m B^{1-1/m} lap B at interior points, to near machine precision
        let p = standard();
        let (dt, _, lap) = p.derivatives(1.0, 1.0).unwrap();
        let b = p.value(1.0, 1.0).unwrap();
        let res = dt - 2.0 * b.sqrt() * lap;
        assert!(res.abs() < 1e-12, "residual {res}");
    }

    #[test]
    fn pde_residual_randomized_interior() {
        for (m, d, c) in [(2.0, 1, 1.0), (3.0, 1, 0.5), (2.0, 3, 2.0), (1.5, 2, 1.0)] {
            let p = BarenblattParams::new(m, d, c, 0.25).unwrap();
            let mut rng = SplitMix64::new(42);
            for _ in 0..200 {
                let t = rng.uniform(0.5, 4.0);
                let r_sup = p.support_radius(t).unwrap();
                let x = rng.uniform(-0.95, 0.95) * r_sup;
                let b = p.value(t, x).unwrap();
                if b <= 0.0 {
                    continue;
                }
                let (dt, _, lap) = p.derivatives(t, x).unwrap();
                let res = dt - m * b.powf(1.0 - 1.0 / m) * lap;
                assert!(
                    res.abs() <= 1e-10 * (1.0 + lap.abs()),
                    "m={m} d={d} t={t} x={x}: residual {res}"
                );
            }
        }
    }

    #[test]
    fn laplacian_matches_discrete_stencil() {
        // cross-validation against the field stencils at interior points
        let p = standard();
        let grid = Arc::new(SpaceTimeGrid::new(1.0, 2.0, 5, 2.0, 201, 1).unwrap());
        let f = ScalarField::from_fn(grid.clone(), |t, x| p.value(t, x).unwrap()).unwrap();
        let lap = f.laplacian();
        let h = grid.h();
        for i in 0..grid.nx() {
            let x = grid.x(i);
            if x.abs() > 1.5 {
                continue; // stay well inside the support
            }
            let (_, _, exact) = p.derivatives(1.0, x).unwrap();
            assert!(
                (lap.get(0, i) - exact).abs() < 10.0 * h * h,
                "x={x}: {} vs {exact}",
                lap.get(0, i)
            );
        }
    }

    #[test]
    fn superlevel_mask_matches_profile_inversion() {
        // at t=1, k=0.5: B >= k exactly where |x| <= sqrt(12 (1 - sqrt(0.5)))
        let p = standard();
        let grid = Arc::new(SpaceTimeGrid::new(1.0, 2.0, 3, 4.0, 161, 1).unwrap());
        let f = ScalarField::from_fn(grid.clone(), |_, x| p.value(1.0, x).unwrap()).unwrap();
        let mask = f.superlevel_mask(0.5, LevelSign::Above).unwrap();
        let x_star = (12.0 * (1.0 - 0.5f64.sqrt())).sqrt();
        assert!((x_star - 1.875).abs() < 2e-3);
        for i in 0..grid.nx() {
            let inside = grid.x(i).abs() <= x_star + 1e-12;
            assert_eq!(mask.contains(0, i), inside, "x = {}", grid.x(i));
        }
    }

    #[test]
    fn standard_form_round_trip() {
        assert_eq!(to_standard_form(0.0, 2.0), 0.0);
        assert!((to_standard_form(4.0, 2.0) - 2.0).abs() < 1e-15);
        assert!((from_standard_form(-3.0, 2.0) + 9.0).abs() < 1e-14);
        let mut rng = SplitMix64::new(7);
        for _ in 0..500 {
            let u = rng.uniform(-10.0, 10.0);
            let m = rng.uniform(1.1, 5.0);
            let back = from_standard_form(to_standard_form(u, m), m);
            assert!((back - u).abs() <= 1e-14 * (1.0 + u.abs()), "u={u} m={m} back={back}");
        }
    }

    #[test]
    fn mass_of_standard_profile_constant_in_time() {
        // trapezoid integral of B^{1/m} over the support; 8 sqrt(3) / 3 at m=2, C=1
        let p = standard();
        let expected = 8.0 * 3.0f64.sqrt() / 3.0;
        let nx = 4001;
        let r = 8.0;
        let h = 2.0 * r / (nx - 1) as f64;
        let mut masses = Vec::new();
        for &t in &[1.0, 2.0, 5.0] {
            let mut acc = 0.0;
            for i in 0..nx {
                let x = -r + h * i as f64;
                let w = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                acc += w * p.value(t, x).unwrap().sqrt() * h;
            }
            masses.push(acc);
        }
        for &m in &masses {
            assert!((m - expected).abs() < 10.0 * h, "{m} vs {expected}");
        }
        assert!((masses[0] - masses[2]).abs() < 10.0 * h);
    }
}
