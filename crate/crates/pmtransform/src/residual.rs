//! Residual evaluation for the original equation, the substituted equation,
//! and the algebraic identity connecting them on exact solutions; plus the
//! refinement studies that exhibit the regular-vs-degenerate dichotomy at
//! the free boundary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use ndarray::Array2;

use crate::barenblatt::BarenblattParams;
use crate::error::{Error, Result};
use crate::grid::{RegionMask, ScalarField, SpaceTimeGrid};
use crate::holder::{holder_seminorm, HolderReport, PairSampling};
use crate::numerics::SplitMix64;
use crate::solver::CFL_FACTOR;
use crate::transform::{CoefficientFunction, FormCoefficient, TransformSpec};

/// Pointwise residual field with its sup norm and Holder reports of the
/// residual and of the individual equation terms.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub field: ScalarField,
    pub sup_norm: f64,
    pub holder: HolderReport,
    pub region: RegionMask,
    pub grid_tag: String,
    /// Holder reports of the named terms entering the equation.
    pub term_reports: BTreeMap<String, HolderReport>,
}

/// Residual of an identity evaluated at scattered sample points.
#[derive(Debug, Clone)]
pub struct PointResidualReport {
    pub points: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
    pub sup_norm: f64,
}

/// Deterministic sample of points strictly inside the support: t uniform in
/// [t_start, t_end], x uniform within `margin` of the support radius.
pub fn sample_interior_points(
    params: &BarenblattParams,
    t_start: f64,
    t_end: f64,
    count: usize,
    margin: f64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let mut rng = SplitMix64::new(seed);
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let t = rng.uniform(t_start, t_end);
        let r = params.support_radius(t)?;
        let x = rng.uniform(-margin, margin) * r;
        if params.value(t, x)? > 0.0 {
            pts.push((t, x));
        }
    }
    Ok(pts)
}

/// Residual of d/dt V(u) = lap Phi(u) + fbar evaluated with exact
/// derivatives of the Barenblatt solution via the chain rule:
/// V'(u) du/dt - (Phi'(u) lap u + Phi''(u)|grad u|^2) - fbar(u, |grad u|^2).
/// A pure algebraic identity for the exact solution; the sup residual sits
/// at rounding level. Points must lie strictly inside the support.
pub fn identity_residual_analytic(
    params: &BarenblattParams,
    spec: &TransformSpec,
    points: &[(f64, f64)],
) -> Result<PointResidualReport> {
    let mut residuals = Vec::with_capacity(points.len());
    let mut sup: f64 = 0.0;
    for &(t, x) in points {
        let u = params.value(t, x)?;
        if u <= 0.0 {
            return Err(Error::invalid(format!(
                "sample point (t = {t}, x = {x}) lies outside the support"
            )));
        }
        let (du_dt, du_dx, lap_u) = params.derivatives(t, x)?;
        let grad_sq = du_dx * du_dx;
        let lhs = spec.v_prime(u)? * du_dt;
        let lap_phi_u = spec.phi_prime(u)? * lap_u + spec.phi_second(u)? * grad_sq;
        let res = lhs - lap_phi_u - spec.fbar(u, grad_sq)?;
        sup = sup.max(res.abs());
        residuals.push(res);
    }
    Ok(PointResidualReport {
        points: points.to_vec(),
        residuals,
        sup_norm: sup,
    })
}

/// Sup residual of the identity after scaling each stored closed-form
/// coefficient by `factor`, one at a time. A sensitivity harness: a genuine
/// identity check must leave rounding level under every perturbation.
pub fn mutation_sweep(
    params: &BarenblattParams,
    spec: &TransformSpec,
    points: &[(f64, f64)],
    factor: f64,
) -> Result<Vec<(FormCoefficient, f64)>> {
    FormCoefficient::ALL
        .iter()
        .map(|&which| {
            let perturbed = spec.with_scaled_coefficient(which, factor)?;
            let rep = identity_residual_analytic(params, &perturbed, points)?;
            Ok((which, rep.sup_norm))
        })
        .collect()
}

fn holder_of(
    values: Array2<f64>,
    grid: &Arc<SpaceTimeGrid>,
    alpha: f64,
    region: &RegionMask,
    sampling: PairSampling,
) -> Result<(ScalarField, HolderReport)> {
    let field = ScalarField::from_values(grid.clone(), values)?;
    let report = holder_seminorm(&field, alpha, region, sampling)?;
    Ok((field, report))
}

fn sup_over(field: &ScalarField, region: &RegionMask) -> f64 {
    region
        .nodes()
        .iter()
        .fold(0.0f64, |m, &(n, i)| m.max(field.get(n, i).abs()))
}

/// Discrete defect of the original equation,
/// d/dt u - a(u) lap_h u - f(u), over the full grid, with Holder reports of
/// the terms d/dt u and a(u) lap_h u at exponent `alpha`.
pub fn residual_original(
    u: &ScalarField,
    coeff: &CoefficientFunction,
    alpha: f64,
    sampling: PairSampling,
) -> Result<ResidualReport> {
    let grid = u.grid().clone();
    let dt_u = u.time_derivative();
    let lap_u = u.laplacian();
    let a_lap = u.zip_with(&lap_u, |uu, l| coeff.a(uu) * l)?;
    let mut res = dt_u.values().clone();
    for ((n, i), v) in res.indexed_iter_mut() {
        *v -= a_lap.get(n, i) + coeff.f(u.get(n, i));
    }
    let region = RegionMask::full(grid.clone());
    let (field, holder) = holder_of(res, &grid, alpha, &region, sampling)?;
    let mut term_reports = BTreeMap::new();
    term_reports.insert(
        "dt_u".to_string(),
        holder_seminorm(&dt_u, alpha, &region, sampling)?,
    );
    term_reports.insert(
        "a_lap_u".to_string(),
        holder_seminorm(&a_lap, alpha, &region, sampling)?,
    );
    let sup_norm = sup_over(&field, &region);
    Ok(ResidualReport {
        sup_norm,
        holder,
        region,
        grid_tag: grid_tag(&grid),
        term_reports,
        field,
    })
}

/// Divergence-form flux difference [D(v) grad v] with arithmetic face means,
/// radial-aware. Only spatial-interior nodes carry values (plus the origin
/// in radial mode); the outer columns are zero.
fn flux_divergence(v: &ScalarField, spec: &TransformSpec) -> Result<Array2<f64>> {
    let grid = v.grid();
    let (nt, nx) = (grid.nt(), grid.nx());
    let h = grid.h();
    let d = grid.dim();
    let mut out = Array2::zeros((nt, nx));
    for n in 0..nt {
        let diff: Vec<f64> = (0..nx)
            .map(|i| spec.diffusion(v.get(n, i)))
            .collect::<Result<_>>()?;
        if d == 1 {
            for i in 1..nx - 1 {
                let d_right = 0.5 * (diff[i] + diff[i + 1]);
                let d_left = 0.5 * (diff[i - 1] + diff[i]);
                out[(n, i)] = (d_right * (v.get(n, i + 1) - v.get(n, i))
                    - d_left * (v.get(n, i) - v.get(n, i - 1)))
                    / (h * h);
            }
        } else {
            // radial finite-volume: (1/r^{d-1}) d/dr ( r^{d-1} D dv/dr )
            for i in 1..nx - 1 {
                let r = grid.x(i);
                let r_right = (r + 0.5 * h).powi(d as i32 - 1);
                let r_left = (r - 0.5 * h).powi(d as i32 - 1);
                let d_right = 0.5 * (diff[i] + diff[i + 1]);
                let d_left = 0.5 * (diff[i - 1] + diff[i]);
                out[(n, i)] = (r_right * d_right * (v.get(n, i + 1) - v.get(n, i))
                    - r_left * d_left * (v.get(n, i) - v.get(n, i - 1)))
                    / (h * h * r.powi(d as i32 - 1));
            }
            // symmetric origin cell
            let d_half = 0.5 * (diff[0] + diff[1]);
            out[(n, 0)] = 2.0 * d as f64 * d_half * (v.get(n, 1) - v.get(n, 0)) / (h * h);
        }
    }
    Ok(out)
}

/// Discrete residual of the substituted equation in divergence form:
/// d/dt v - [D(v) grad v] - fbar, with D at cell faces by arithmetic mean
/// and fbar from u = U(v) and discrete gradients. The degenerate product
/// Phi''(u)|grad u|^2 is evaluated as grad_h(Phi'(u)) . grad_h u (the same
/// function by the chain rule; the pointwise form amplifies rounding near
/// the interface where Phi''(u) blows up). Reported over the grid minus the
/// outer spatial columns.
pub fn residual_transformed(
    v: &ScalarField,
    spec: &TransformSpec,
    alpha: f64,
    sampling: PairSampling,
) -> Result<ResidualReport> {
    let grid = v.grid().clone();
    let u = v.map_result(|val| spec.u_inv(val))?;
    let dt_v = v.time_derivative();
    let div = flux_divergence(v, spec)?;
    let phi_prime_u = u.map_result(|val| spec.phi_prime(val))?;
    let grad_u = u.gradient();
    let grad_phi_prime = phi_prime_u.gradient();
    // fbar = -grad Phi'(u) . grad u + (Phi' f / a)(u)
    let coeff = spec.coeff();
    let mut fbar = Array2::zeros((grid.nt(), grid.nx()));
    for ((n, i), val) in fbar.indexed_iter_mut() {
        let uu = u.get(n, i);
        let reaction = if uu == 0.0 {
            0.0
        } else {
            spec.phi_prime(uu)? / coeff.a(uu) * coeff.f(uu)
        };
        *val = -grad_phi_prime.get(n, i) * grad_u.get(n, i) + reaction;
    }
    let region = RegionMask::full(grid.clone()).without_space_boundary();
    let mut res = Array2::zeros((grid.nt(), grid.nx()));
    for (n, i) in region.nodes() {
        res[(n, i)] = dt_v.get(n, i) - div[(n, i)] - fbar[(n, i)];
    }
    let (field, holder) = holder_of(res, &grid, alpha, &region, sampling)?;
    let sup_norm = sup_over(&field, &region);
    let mut term_reports = BTreeMap::new();
    term_reports.insert(
        "dt_v".to_string(),
        holder_seminorm(&dt_v, alpha, &region, sampling)?,
    );
    let (_, div_rep) = holder_of(div, &grid, alpha, &region, sampling)?;
    term_reports.insert("div_flux".to_string(), div_rep);
    let (_, fbar_rep) = holder_of(fbar, &grid, alpha, &region, sampling)?;
    term_reports.insert("fbar".to_string(), fbar_rep);
    Ok(ResidualReport {
        sup_norm,
        holder,
        region,
        grid_tag: grid_tag(&grid),
        term_reports,
        field,
    })
}

fn grid_tag(grid: &SpaceTimeGrid) -> String {
    format!(
        "nt{}x{}_d{}_t{}-{}_R{}",
        grid.nt(),
        grid.nx(),
        grid.dim(),
        grid.t_start(),
        grid.t_end(),
        grid.radius()
    )
}

impl ScalarField {
    /// Pointwise fallible map (used for U(v) and Phi'(u) fields).
    pub fn map_result(&self, f: impl Fn(f64) -> Result<f64>) -> Result<ScalarField> {
        let mut values = Array2::zeros((self.grid().nt(), self.grid().nx()));
        for ((n, i), v) in values.indexed_iter_mut() {
            *v = f(self.get(n, i))?;
        }
        ScalarField::from_values(self.grid().clone(), values)
    }
}

/// Scenario for the refinement studies.
#[derive(Debug, Clone)]
pub enum Scenario {
    /// Fields sampled from the exact Barenblatt solution; v = V(u) and
    /// Phi(u) evaluated pointwise through `spec`.
    AnalyticBarenblatt {
        params: BarenblattParams,
        spec: TransformSpec,
        t_start: f64,
        t_end: f64,
        radius: f64,
    },
    /// Identically zero trajectory (degenerate sanity case).
    Zero {
        spec: TransformSpec,
        t_start: f64,
        t_end: f64,
        radius: f64,
    },
}

impl Scenario {
    pub fn spec(&self) -> &TransformSpec {
        match self {
            Self::AnalyticBarenblatt { spec, .. } | Self::Zero { spec, .. } => spec,
        }
    }

    fn geometry(&self) -> (f64, f64, f64) {
        match self {
            Self::AnalyticBarenblatt {
                t_start,
                t_end,
                radius,
                ..
            }
            | Self::Zero {
                t_start,
                t_end,
                radius,
                ..
            } => (*t_start, *t_end, *radius),
        }
    }

    /// Sampled solution field on an (nt, nx) grid.
    pub fn sample(&self, nt: usize, nx: usize) -> Result<ScalarField> {
        let (t0, t1, r) = self.geometry();
        let dim = match self {
            Self::AnalyticBarenblatt { params, .. } => params.d,
            Self::Zero { .. } => 1,
        };
        let grid = Arc::new(SpaceTimeGrid::new(t0, t1, nt, r, nx, dim)?);
        match self {
            Self::AnalyticBarenblatt { params, .. } => {
                let mut values = Array2::zeros((nt, nx));
                for ((n, i), v) in values.indexed_iter_mut() {
                    *v = params.value(grid.time(n), grid.x(i))?;
                }
                ScalarField::from_values(grid, values)
            }
            Self::Zero { .. } => ScalarField::from_values(grid, Array2::zeros((nt, nx))),
        }
    }
}

/// Time-node count whose spacing matches the explicit-solver stability step
/// for the given spatial resolution: dt = 0.4 h^2 / (2 d a_max) with a_max
/// taken at the initial peak.
pub fn cfl_matched_nt(params: &BarenblattParams, t_start: f64, t_end: f64, h: f64) -> Result<usize> {
    let u_max = params.peak(t_start)?;
    let a_max = params.coefficient(u_max).max(crate::solver::DEGENERACY_GUARD);
    let dt = CFL_FACTOR * h * h / (2.0 * params.d as f64 * a_max);
    Ok(((t_end - t_start) / dt).ceil() as usize + 1)
}

/// Nodes within `cells` grid cells of the analytic interface |x| = r(t),
/// excluding the outer spatial columns.
pub fn interface_band(
    grid: &Arc<SpaceTimeGrid>,
    params: &BarenblattParams,
    cells: usize,
) -> Result<RegionMask> {
    let h = grid.h();
    let mut radii = Vec::with_capacity(grid.nt());
    for n in 0..grid.nt() {
        radii.push(params.support_radius(grid.time(n))?);
    }
    let mask = RegionMask::from_index_fn(grid.clone(), |n, i| {
        (grid.x(i).abs() - radii[n]).abs() <= cells as f64 * h
    });
    Ok(mask.without_space_boundary())
}

/// Cells counted as "near the free boundary" throughout the studies.
pub const INTERFACE_BAND_CELLS: usize = 3;

/// One row of the refinement table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub nt: usize,
    pub nx: usize,
    pub sup_res_orig: f64,
    pub sup_res_trans: f64,
    pub semi_dtu: f64,
    pub semi_lap_u: f64,
    pub semi_dtv: f64,
    pub semi_lap_phi: f64,
    pub runtime_s: f64,
}

/// Refinement table over strictly refining (nt, nx) levels: sup residuals
/// (original over the far-from-interface interior, substituted over its full
/// region) and full-grid Holder seminorms of the four headline terms.
pub fn convergence_study(
    scenario: &Scenario,
    levels: &[(usize, usize)],
    sampling: PairSampling,
) -> Result<Vec<ConvergenceRow>> {
    if levels.len() < 3 {
        return Err(Error::invalid("need at least 3 refinement levels"));
    }
    for pair in levels.windows(2) {
        if pair[1].0 <= pair[0].0 || pair[1].1 <= pair[0].1 {
            return Err(Error::invalid(
                "levels must strictly refine in both nt and nx",
            ));
        }
    }
    let spec = scenario.spec();
    let alpha = spec.alpha();
    let mut rows = Vec::with_capacity(levels.len());
    for (level, &(nt, nx)) in levels.iter().enumerate() {
        let start = Instant::now();
        let u = scenario.sample(nt, nx)?;
        let v = u.map_result(|val| spec.v(val))?;
        let phi_u = u.map_result(|val| spec.phi(val))?;

        let orig = residual_original(&u, spec.coeff(), alpha, sampling)?;
        let trans = residual_transformed(&v, spec, alpha, sampling)?;

        // original-equation truncation is measured away from the interface
        let interior = match scenario {
            Scenario::AnalyticBarenblatt { params, .. } => {
                interface_band(u.grid(), params, INTERFACE_BAND_CELLS)?
                    .not()
                    .and(&RegionMask::full(u.grid().clone()).without_space_boundary())?
            }
            Scenario::Zero { .. } => RegionMask::full(u.grid().clone()).without_space_boundary(),
        };
        let sup_res_orig = sup_over(&orig.field, &interior);

        let full = RegionMask::full(u.grid().clone());
        let semi_dtu = holder_seminorm(&u.time_derivative(), alpha, &full, sampling)?.seminorm;
        let semi_lap_u = holder_seminorm(&u.laplacian(), alpha, &full, sampling)?.seminorm;
        let semi_dtv = holder_seminorm(&v.time_derivative(), alpha, &full, sampling)?.seminorm;
        let semi_lap_phi = holder_seminorm(&phi_u.laplacian(), alpha, &full, sampling)?.seminorm;

        rows.push(ConvergenceRow {
            level,
            nt,
            nx,
            sup_res_orig,
            sup_res_trans: trans.sup_norm,
            semi_dtu,
            semi_lap_u,
            semi_dtv,
            semi_lap_phi,
            runtime_s: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// CSV for the refinement table. The runtime column is wall clock and is
/// the only non-reproducible field.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(
        "level,nt,nx,sup_res_orig,sup_res_trans,semi_dtu,semi_lap_u,semi_dtv,semi_lap_Phi,runtime_s\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.3}",
            r.level,
            r.nt,
            r.nx,
            r.sup_res_orig,
            r.sup_res_trans,
            r.semi_dtu,
            r.semi_lap_u,
            r.semi_dtv,
            r.semi_lap_phi,
            r.runtime_s
        );
    }
    out
}

/// One row of the free-boundary dichotomy study: extrema and band seminorms
/// within `INTERFACE_BAND_CELLS` of the analytic interface.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyRow {
    pub level: usize,
    pub nt: usize,
    pub nx: usize,
    pub max_lap_u_band: f64,
    pub max_lap_phi_band: f64,
    pub semi_dtv_band: f64,
    pub semi_lap_u_band: f64,
}

/// Near-interface refinement study on the analytic Barenblatt scenario:
/// max |lap_h u| and max |lap_h Phi(u)| over the interface band, and the
/// band Holder seminorms of d/dt v and lap_h u at the spec exponent.
pub fn dichotomy_study(
    scenario: &Scenario,
    levels: &[(usize, usize)],
    sampling: PairSampling,
) -> Result<Vec<DichotomyRow>> {
    let Scenario::AnalyticBarenblatt { params, spec, .. } = scenario else {
        return Err(Error::invalid(
            "the dichotomy study needs the analytic Barenblatt scenario",
        ));
    };
    let alpha = spec.alpha();
    let mut rows = Vec::with_capacity(levels.len());
    for (level, &(nt, nx)) in levels.iter().enumerate() {
        let u = scenario.sample(nt, nx)?;
        let v = u.map_result(|val| spec.v(val))?;
        let phi_u = u.map_result(|val| spec.phi(val))?;
        let band = interface_band(u.grid(), params, INTERFACE_BAND_CELLS)?;
        let lap_u = u.laplacian();
        let lap_phi = phi_u.laplacian();
        let dt_v = v.time_derivative();
        rows.push(DichotomyRow {
            level,
            nt,
            nx,
            max_lap_u_band: sup_over(&lap_u, &band),
            max_lap_phi_band: sup_over(&lap_phi, &band),
            semi_dtv_band: holder_seminorm(&dt_v, alpha, &band, sampling)?.seminorm,
            semi_lap_u_band: holder_seminorm(&lap_u, alpha, &band, sampling)?.seminorm,
        });
    }
    Ok(rows)
}

pub fn dichotomy_csv(rows: &[DichotomyRow]) -> String {
    let mut out =
        String::from("level,nt,nx,max_lap_u_band,max_lap_Phi_band,semi_dtv_band,semi_lap_u_band\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.level,
            r.nt,
            r.nx,
            r.max_lap_u_band,
            r.max_lap_phi_band,
            r.semi_dtv_band,
            r.semi_lap_u_band
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DEFAULT_SEED;

    fn params_m2() -> BarenblattParams {
        BarenblattParams::new(2.0, 1, 1.0, 0.0).unwrap()
    }

    fn spec_m2() -> TransformSpec {
        TransformSpec::power_law(2.0, 0.5, 10.0).unwrap()
    }

    #[test]
    fn analytic_identity_holds_at_machine_precision() {
        let params = params_m2();
        let spec = spec_m2();
        let pts =
            sample_interior_points(&params, 1.0, 2.0, 1000, 0.95, DEFAULT_SEED).unwrap();
        let rep = identity_residual_analytic(&params, &spec, &pts).unwrap();
        assert!(rep.sup_norm <= 1e-9, "sup residual {}", rep.sup_norm);
    }

    #[test]
    fn analytic_identity_at_the_peak() {
        // grad u = 0 at the origin: the residual reduces to
        // V'(u)(du/dt - a(u) lap u) = 0
        let params = params_m2();
        let spec = spec_m2();
        let rep = identity_residual_analytic(&params, &spec, &[(1.0, 0.0)]).unwrap();
        assert!(rep.sup_norm <= 1e-12);
    }

    #[test]
    fn rejects_points_outside_support() {
        let params = params_m2();
        let spec = spec_m2();
        assert!(identity_residual_analytic(&params, &spec, &[(1.0, 4.0)]).is_err());
    }

    #[test]
    fn mutation_breaks_identity() {
        let params = params_m2();
        let spec = spec_m2();
        let pts = sample_interior_points(&params, 1.0, 2.0, 200, 0.95, DEFAULT_SEED).unwrap();
        for factor in [1.1, 1.01] {
            for (which, sup) in mutation_sweep(&params, &spec, &pts, factor).unwrap() {
                assert!(
                    sup > 1e-4,
                    "perturbing {which:?} by {factor} left sup residual {sup}"
                );
            }
        }
    }

    #[test]
    fn original_residual_zero_for_constant() {
        let grid = Arc::new(SpaceTimeGrid::new(0.0, 1.0, 9, 1.0, 17, 1).unwrap());
        let u = ScalarField::from_fn(grid, |_, _| 0.7).unwrap();
        let coeff = CoefficientFunction::power_law(2.0).unwrap();
        let rep = residual_original(&u, &coeff, 0.5, PairSampling::default()).unwrap();
        assert!(rep.sup_norm < 1e-12, "{}", rep.sup_norm);
    }

    #[test]
    fn transformed_residual_zero_for_zero_field() {
        let spec = spec_m2();
        let scenario = Scenario::Zero {
            spec: spec.clone(),
            t_start: 0.0,
            t_end: 1.0,
            radius: 2.0,
        };
        let u = scenario.sample(9, 17).unwrap();
        let v = u.map_result(|val| spec.v(val)).unwrap();
        let rep = residual_transformed(&v, &spec, 0.5, PairSampling::default()).unwrap();
        assert_eq!(rep.sup_norm, 0.0);
    }

    #[test]
    fn transformed_residual_rejects_out_of_range() {
        let spec = spec_m2();
        let grid = Arc::new(SpaceTimeGrid::new(0.0, 1.0, 5, 1.0, 9, 1).unwrap());
        let v = ScalarField::from_fn(grid, |_, _| spec.v_range() * 2.0).unwrap();
        assert!(residual_transformed(&v, &spec, 0.5, PairSampling::default()).is_err());
    }

    #[test]
    fn original_residual_interior_truncation_decays() {
        let params = params_m2();
        let scenario = Scenario::AnalyticBarenblatt {
            params,
            spec: spec_m2(),
            t_start: 1.0,
            t_end: 1.5,
            radius: 6.0,
        };
        let mut sups = Vec::new();
        for &(nt, nx) in &[(51, 101), (101, 201)] {
            let u = scenario.sample(nt, nx).unwrap();
            let rep =
                residual_original(&u, &CoefficientFunction::power_law(2.0).unwrap(), 0.5,
                    PairSampling::default())
                .unwrap();
            let band = interface_band(u.grid(), &params, INTERFACE_BAND_CELLS).unwrap();
            let interior = RegionMask::full(u.grid().clone())
                .without_space_boundary()
                .and(&band.not())
                .unwrap();
            sups.push(sup_over(&rep.field, &interior));
        }
        assert!(
            sups[1] < sups[0],
            "interior sup residual must decay: {sups:?}"
        );
    }

    #[test]
    fn transformed_residual_bounded_and_decreasing_at_interface() {
        let scenario = Scenario::AnalyticBarenblatt {
            params: params_m2(),
            spec: spec_m2(),
            t_start: 1.0,
            t_end: 1.5,
            radius: 6.0,
        };
        let spec = scenario.spec().clone();
        let mut sups = Vec::new();
        for &(nt, nx) in &[(101, 101), (201, 201)] {
            let u = scenario.sample(nt, nx).unwrap();
            let v = u.map_result(|val| spec.v(val)).unwrap();
            let rep = residual_transformed(&v, &spec, 0.5, PairSampling::default()).unwrap();
            sups.push(rep.sup_norm);
        }
        assert!(sups[0] < 1.0, "bounded: {sups:?}");
        assert!(sups[1] < sups[0], "decreasing: {sups:?}");
    }

    #[test]
    fn equivalence_of_forms_on_smooth_region() {
        // the flux-form residual and the lap Phi(u) form agree within O(h)
        // away from the interface
        let params = params_m2();
        let spec = spec_m2();
        let scenario = Scenario::AnalyticBarenblatt {
            params,
            spec: spec.clone(),
            t_start: 1.0,
            t_end: 1.5,
            radius: 6.0,
        };
        let (nt, nx) = (201, 201);
        let u = scenario.sample(nt, nx).unwrap();
        let v = u.map_result(|val| spec.v(val)).unwrap();
        let phi_u = u.map_result(|val| spec.phi(val)).unwrap();
        let trans = residual_transformed(&v, &spec, 0.5, PairSampling::default()).unwrap();

        let dt_v = v.time_derivative();
        let lap_phi = phi_u.laplacian();
        let grad_u = u.gradient();
        let phi_prime_u = u.map_result(|val| spec.phi_prime(val)).unwrap();
        let grad_pp = phi_prime_u.gradient();

        let band = interface_band(u.grid(), &params, 5).unwrap();
        let smooth = RegionMask::full(u.grid().clone())
            .without_space_boundary()
            .and(&band.not())
            .unwrap();
        let h = u.grid().h();
        let mut worst: f64 = 0.0;
        for (n, i) in smooth.nodes() {
            let res6 = dt_v.get(n, i)
                - lap_phi.get(n, i)
                - (-grad_pp.get(n, i) * grad_u.get(n, i));
            let diff = (res6 - trans.field.get(n, i)).abs();
            worst = worst.max(diff);
        }
        assert!(worst <= 20.0 * h, "forms differ by {worst}, h = {h}");
    }

    #[test]
    fn convergence_study_zero_scenario() {
        let scenario = Scenario::Zero {
            spec: spec_m2(),
            t_start: 0.0,
            t_end: 1.0,
            radius: 2.0,
        };
        let rows = convergence_study(
            &scenario,
            &[(9, 17), (17, 33), (33, 65)],
            PairSampling::default(),
        )
        .unwrap();
        for r in &rows {
            assert_eq!(r.sup_res_orig, 0.0);
            assert_eq!(r.sup_res_trans, 0.0);
            assert_eq!(r.semi_dtu, 0.0);
            assert_eq!(r.semi_lap_u, 0.0);
            assert_eq!(r.semi_dtv, 0.0);
            assert_eq!(r.semi_lap_phi, 0.0);
        }
    }

    #[test]
    fn convergence_study_rejects_non_refining_levels() {
        let scenario = Scenario::Zero {
            spec: spec_m2(),
            t_start: 0.0,
            t_end: 1.0,
            radius: 2.0,
        };
        assert!(convergence_study(
            &scenario,
            &[(9, 17), (9, 33), (33, 65)],
            PairSampling::default()
        )
        .is_err());
        assert!(
            convergence_study(&scenario, &[(9, 17), (17, 33)], PairSampling::default()).is_err()
        );
    }

    #[test]
    fn cfl_matched_nt_matches_formula() {
        let params = params_m2();
        // h = 0.12 at nx = 101 on [-6, 6]: dt = 0.1 h^2, span 1 => 696 nodes
        let nt = cfl_matched_nt(&params, 1.0, 2.0, 12.0 / 100.0).unwrap();
        assert_eq!(nt, 696);
    }
}
