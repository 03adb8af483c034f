//! Discrete anisotropic (parabolic) Holder norms and seminorms on fields and
//! level-set regions, and the level-set regularity profile psi.
//!
//! The seminorm estimator takes the sup of |f(p)-f(q)| / dist(p,q)^beta over
//! grid-node pairs, with the parabolic distance max(|t-s|^{1/2}, |x-y|).
//! Over a finite pair set this is a lower bound of the continuum seminorm:
//! growth under refinement certifies irregularity, boundedness is evidence
//! (not proof) of regularity. Regions beyond the node cap are subsampled
//! with a fixed seed so every report is reproducible bit for bit.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{LevelSign, RegionMask, ScalarField};
use crate::numerics::{subsample_indices, DEFAULT_SEED};
use crate::transform::CoefficientFunction;

/// Node-pair budget and seed for seminorm estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSampling {
    /// Regions with more nodes than this are subsampled (all pairs among the
    /// selected nodes are still used).
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for PairSampling {
    fn default() -> Self {
        Self {
            max_nodes: 5000,
            seed: DEFAULT_SEED,
        }
    }
}

/// Parabolic distance max(|t-s|^{1/2}, |x-y|).
pub fn parabolic_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().sqrt().max((p.1 - q.1).abs())
}

/// Estimated sup norm and Holder seminorm of a field on a region.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    pub exponent: f64,
    pub region: RegionMask,
    pub sup_norm: f64,
    pub seminorm: f64,
    pub pairs_sampled: usize,
    pub nodes_used: usize,
    pub subsampled: bool,
}

impl HolderReport {
    /// sup norm plus seminorm.
    pub fn norm(&self) -> f64 {
        self.sup_norm + self.seminorm
    }

    /// Flat key-value text block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "exponent = {:.16e}", self.exponent);
        let _ = writeln!(out, "sup_norm = {:.16e}", self.sup_norm);
        let _ = writeln!(out, "seminorm = {:.16e}", self.seminorm);
        let _ = writeln!(out, "norm = {:.16e}", self.norm());
        let _ = writeln!(out, "region_nodes = {}", self.region.count());
        let _ = writeln!(out, "nodes_used = {}", self.nodes_used);
        let _ = writeln!(out, "pairs_sampled = {}", self.pairs_sampled);
        let _ = writeln!(out, "subsampled = {}", self.subsampled);
        out
    }
}

/// Discrete parabolic Holder report of `f` at exponent `beta` over `region`.
/// The sup norm runs over every region node; the seminorm over all pairs of
/// the (possibly subsampled) node set.
pub fn holder_seminorm(
    f: &ScalarField,
    beta: f64,
    region: &RegionMask,
    sampling: PairSampling,
) -> Result<HolderReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid(format!("exponent beta = {beta}, need (0, 1]")));
    }
    if region.grid() != f.grid() {
        return Err(Error::invalid("region and field live on different grids"));
    }
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let nodes = region.nodes();
    let grid = f.grid();

    let mut sup_norm: f64 = 0.0;
    for &(n, i) in &nodes {
        sup_norm = sup_norm.max(f.get(n, i).abs());
    }

    let selected = subsample_indices(nodes.len(), sampling.max_nodes, sampling.seed);
    let subsampled = selected.len() < nodes.len();
    let pts: Vec<(f64, f64, f64)> = selected
        .iter()
        .map(|&idx| {
            let (n, i) = nodes[idx];
            (grid.time(n), grid.x(i), f.get(n, i))
        })
        .collect();

    let k = pts.len();
    let mut seminorm: f64 = 0.0;
    for a in 0..k {
        let (ta, xa, va) = pts[a];
        for b in (a + 1)..k {
            let (tb, xb, vb) = pts[b];
            let dist = parabolic_distance((ta, xa), (tb, xb));
            if dist > 0.0 {
                seminorm = seminorm.max((va - vb).abs() / dist.powf(beta));
            }
        }
    }
    Ok(HolderReport {
        exponent: beta,
        region: region.clone(),
        sup_norm,
        seminorm,
        pairs_sampled: k * (k - 1) / 2,
        nodes_used: k,
        subsampled,
    })
}

/// Discrete stand-in for the norm controlling first time and second space
/// derivatives: sup norms of f, grad f, lap f, dt f over the region plus the
/// Holder-alpha seminorms of dt f and lap f. Mixed intermediate-order
/// seminorms are omitted; the retained terms carry the classical versus
/// non-classical distinction.
pub fn parabolic_norm_2plus(
    f: &ScalarField,
    alpha: f64,
    region: &RegionMask,
    sampling: PairSampling,
) -> Result<f64> {
    check_region_thickness(region)?;
    let grad = f.gradient();
    let lap = f.laplacian();
    let dtf = f.time_derivative();
    let mut total = 0.0;
    for fld in [f, &grad, &lap, &dtf] {
        let mut sup: f64 = 0.0;
        for &(n, i) in &region.nodes() {
            sup = sup.max(fld.get(n, i).abs());
        }
        total += sup;
    }
    total += holder_seminorm(&dtf, alpha, region, sampling)?.seminorm;
    total += holder_seminorm(&lap, alpha, region, sampling)?.seminorm;
    Ok(total)
}

/// The stencil-bearing norm needs at least two interior layers in each
/// direction.
fn check_region_thickness(region: &RegionMask) -> Result<()> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let grid = region.grid();
    let (nt, nx) = (grid.nt(), grid.nx());
    let mut t_interior = std::collections::BTreeSet::new();
    let mut x_interior = std::collections::BTreeSet::new();
    for (n, i) in region.nodes() {
        if n >= 1 && n + 1 < nt {
            t_interior.insert(n);
        }
        if i >= 1 && i + 1 < nx {
            x_interior.insert(i);
        }
    }
    if t_interior.len() < 2 || x_interior.len() < 2 {
        return Err(Error::RegionTooThin(format!(
            "{} interior time layers, {} interior space columns (need >= 2 each)",
            t_interior.len(),
            x_interior.len()
        )));
    }
    Ok(())
}

/// 1-D Holder norm (sup + seminorm) of a scalar function on [lo, hi],
/// sampled at `samples` uniform points.
pub fn holder_norm_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, beta: f64, samples: usize) -> f64 {
    let n = samples.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let vals: Vec<f64> = (0..n).map(|j| f(lo + step * j as f64)).collect();
    let sup = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut semi: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            let dist = step * (b - a) as f64;
            semi = semi.max((vals[a] - vals[b]).abs() / dist.powf(beta));
        }
    }
    sup + semi
}

/// 1-D Holder seminorm of tabulated values against |t_a - t_b|^beta.
fn holder_semi_series(ts: &[f64], vals: &[f64], beta: f64) -> f64 {
    let mut semi: f64 = 0.0;
    for a in 0..vals.len() {
        for b in (a + 1)..vals.len() {
            let dist = (ts[a] - ts[b]).abs();
            if dist > 0.0 {
                semi = semi.max((vals[a] - vals[b]).abs() / dist.powf(beta));
            }
        }
    }
    semi
}

/// Number of points for the 1-D coefficient norms; matches the default
/// quadrature resolution (512 per interval).
pub const COEFF_NORM_SAMPLES: usize = 512;

/// Exponent bundle for the psi profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiExponents {
    pub alpha_a: f64,
    pub alpha_f: f64,
    pub alpha_u: f64,
    pub alpha: f64,
}

/// Optional initial/boundary data for the psi profile. `initial` is the
/// t = t_start space layer; `boundary` holds (left, right) values per time
/// node.
#[derive(Debug, Clone, Default)]
pub struct DataTraces {
    pub initial: Option<Vec<f64>>,
    pub boundary: Option<Vec<(f64, f64)>>,
}

/// Level-set regularity profile: for each threshold k (descending), the max
/// of the coefficient norms on [k, max u], the parabolic Holder norm of u on
/// {u >= k}, and the data norms when traces are supplied; mirrored for -k.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiProfile {
    pub thresholds: Vec<f64>,
    pub psi_plus: Vec<f64>,
    pub psi_minus: Vec<f64>,
}

impl PsiProfile {
    /// CSV `k,psi_plus,psi_minus`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,psi_plus,psi_minus\n");
        for j in 0..self.thresholds.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.thresholds[j], self.psi_plus[j], self.psi_minus[j]
            );
        }
        out
    }
}

/// Compute the psi profile of a solution field. `thresholds` must be
/// positive, strictly descending and bounded by max |u|. The raw estimates
/// are lower bounds that can wobble between nested regions as the node
/// subsample changes; since the continuum profile is nondecreasing as k
/// drops (level sets are nested), a running max is applied, which keeps the
/// lower-bound property and makes the reported profile monotone.
pub fn psi_profile(
    u: &ScalarField,
    coeff: &CoefficientFunction,
    exponents: PsiExponents,
    thresholds: &[f64],
    traces: &DataTraces,
    sampling: PairSampling,
) -> Result<PsiProfile> {
    let u_max = u.sup_norm();
    if thresholds.is_empty() {
        return Err(Error::invalid("no thresholds supplied"));
    }
    for pair in thresholds.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::invalid("thresholds must be strictly descending"));
        }
    }
    for &k in thresholds {
        if !(k > 0.0) {
            return Err(Error::invalid(format!("threshold {k} must be positive")));
        }
        if k > u_max {
            return Err(Error::OutOfRange {
                name: "threshold",
                value: k,
                min: 0.0,
                max: u_max,
            });
        }
    }

    let grid = u.grid().clone();
    let ts: Vec<f64> = (0..grid.nt()).map(|n| grid.time(n)).collect();
    let h = grid.h();
    let dt = grid.dt();

    let mut psi_plus = Vec::with_capacity(thresholds.len());
    let mut psi_minus = Vec::with_capacity(thresholds.len());
    let mut run_plus = 0.0f64;
    let mut run_minus = 0.0f64;
    for &k in thresholds {
        let mut best_plus =
            holder_norm_1d(|x| coeff.a(x), k, u_max, exponents.alpha_a, COEFF_NORM_SAMPLES)
                .max(holder_norm_1d(
                    |x| coeff.f(x),
                    k,
                    u_max,
                    exponents.alpha_f,
                    COEFF_NORM_SAMPLES,
                ));
        let region = u.superlevel_mask(k, LevelSign::Above)?;
        if !region.is_empty() {
            best_plus = best_plus
                .max(holder_seminorm(u, exponents.alpha_u, &region, sampling)?.norm());
        }
        let mut best_minus =
            holder_norm_1d(|x| coeff.a(x), -u_max, -k, exponents.alpha_a, COEFF_NORM_SAMPLES)
                .max(holder_norm_1d(
                    |x| coeff.f(x),
                    -u_max,
                    -k,
                    exponents.alpha_f,
                    COEFF_NORM_SAMPLES,
                ));
        let region = u.superlevel_mask(k, LevelSign::Below)?;
        if !region.is_empty() {
            best_minus = best_minus
                .max(holder_seminorm(u, exponents.alpha_u, &region, sampling)?.norm());
        }

        if let Some(u0) = &traces.initial {
            best_plus = best_plus.max(initial_norm(u0, h, exponents.alpha, k, true));
            best_minus = best_minus.max(initial_norm(u0, h, exponents.alpha, k, false));
        }
        if let Some(g) = &traces.boundary {
            for side in 0..2 {
                let series: Vec<f64> =
                    g.iter().map(|&(l, r)| if side == 0 { l } else { r }).collect();
                best_plus = best_plus.max(boundary_norm(&ts, &series, dt, exponents.alpha, k, true));
                best_minus =
                    best_minus.max(boundary_norm(&ts, &series, dt, exponents.alpha, k, false));
            }
        }

        run_plus = run_plus.max(best_plus);
        run_minus = run_minus.max(best_minus);
        psi_plus.push(run_plus);
        psi_minus.push(run_minus);
    }
    Ok(PsiProfile {
        thresholds: thresholds.to_vec(),
        psi_plus,
        psi_minus,
    })
}

/// sup|u0| + sup|u0'| + sup|u0''| + Holder-alpha seminorm of u0'' over the
/// sublevel set of the initial layer.
fn initial_norm(u0: &[f64], h: f64, alpha: f64, k: f64, above: bool) -> f64 {
    let n = u0.len();
    if n < 5 {
        return 0.0;
    }
    let d1: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * u0[0] + 4.0 * u0[1] - u0[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * u0[n - 1] - 4.0 * u0[n - 2] + u0[n - 3]) / (2.0 * h)
            } else {
                (u0[i + 1] - u0[i - 1]) / (2.0 * h)
            }
        })
        .collect();
    let d2: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                (2.0 * u0[0] - 5.0 * u0[1] + 4.0 * u0[2] - u0[3]) / (h * h)
            } else if i == n - 1 {
                (2.0 * u0[n - 1] - 5.0 * u0[n - 2] + 4.0 * u0[n - 3] - u0[n - 4]) / (h * h)
            } else {
                (u0[i + 1] - 2.0 * u0[i] + u0[i - 1]) / (h * h)
            }
        })
        .collect();
    let sel: Vec<usize> = (0..n)
        .filter(|&i| if above { u0[i] >= k } else { u0[i] <= -k })
        .collect();
    if sel.is_empty() {
        return 0.0;
    }
    let sup = |v: &[f64]| sel.iter().fold(0.0f64, |m, &i| m.max(v[i].abs()));
    let xs: Vec<f64> = sel.iter().map(|&i| h * i as f64).collect();
    let d2_sel: Vec<f64> = sel.iter().map(|&i| d2[i]).collect();
    sup(u0) + sup(&d1) + sup(&d2) + holder_semi_series(&xs, &d2_sel, alpha)
}

/// sup|g| + sup|g'| + Holder-(alpha/2) seminorm of g' in time over the
/// sublevel set of a boundary trace.
fn boundary_norm(ts: &[f64], g: &[f64], dt: f64, alpha: f64, k: f64, above: bool) -> f64 {
    let n = g.len();
    if n < 3 {
        return 0.0;
    }
    let d1: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dt)
            } else if i == n - 1 {
                (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * dt)
            } else {
                (g[i + 1] - g[i - 1]) / (2.0 * dt)
            }
        })
        .collect();
    let sel: Vec<usize> = (0..n)
        .filter(|&i| if above { g[i] >= k } else { g[i] <= -k })
        .collect();
    if sel.is_empty() {
        return 0.0;
    }
    let sup = |v: &[f64]| sel.iter().fold(0.0f64, |m, &i| m.max(v[i].abs()));
    let t_sel: Vec<f64> = sel.iter().map(|&i| ts[i]).collect();
    let d1_sel: Vec<f64> = sel.iter().map(|&i| d1[i]).collect();
    sup(g) + sup(&d1) + holder_semi_series(&t_sel, &d1_sel, alpha / 2.0)
}

/// Raw (un-monotonised) component curves used for the growth/boundedness
/// diagnostics: the parabolic Holder norm of u at alpha_u, and the
/// derivative-bearing norm at alpha, both on {u >= k}.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiComponents {
    pub thresholds: Vec<f64>,
    pub comp_alpha_u: Vec<f64>,
    pub comp_2plus: Vec<f64>,
}

impl PsiComponents {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,comp_alpha_u,comp_2plus\n");
        for j in 0..self.thresholds.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.thresholds[j], self.comp_alpha_u[j], self.comp_2plus[j]
            );
        }
        out
    }
}

pub fn psi_components(
    u: &ScalarField,
    alpha_u: f64,
    alpha: f64,
    thresholds: &[f64],
    sampling: PairSampling,
) -> Result<PsiComponents> {
    let mut comp_alpha_u = Vec::with_capacity(thresholds.len());
    let mut comp_2plus = Vec::with_capacity(thresholds.len());
    for &k in thresholds {
        let region = u.superlevel_mask(k, LevelSign::Above)?;
        if region.is_empty() {
            return Err(Error::EmptyRegion);
        }
        comp_alpha_u.push(holder_seminorm(u, alpha_u, &region, sampling)?.norm());
        comp_2plus.push(parabolic_norm_2plus(u, alpha, &region, sampling)?);
    }
    Ok(PsiComponents {
        thresholds: thresholds.to_vec(),
        comp_alpha_u,
        comp_2plus,
    })
}
