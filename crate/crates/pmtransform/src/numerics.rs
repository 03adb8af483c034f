//! Small numerical building blocks: deterministic sampling, cumulative
//! Simpson integration, adaptive Simpson, bisection and table interpolation.

use crate::error::{Error, Result};

/// Default seed for every deterministic sampling decision in the crate.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// SplitMix64. A fixed six-line mixer is pinned here instead of an external
/// RNG so that subsampled reports stay byte-identical regardless of
/// dependency versions.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform f64 in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform f64 in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Deterministic choice of `cap` indices out of `n` via a partial
/// Fisher-Yates shuffle. Returns all indices when `n <= cap`.
pub fn subsample_indices(n: usize, cap: usize, seed: u64) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..cap {
        let j = i + (rng.next_u64() % (n - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(cap);
    idx
}

/// Cumulative integral of uniformly spaced samples, Simpson style: each cell
/// [x_j, x_{j+1}] is integrated with the quadratic through the three nodes
/// ending at x_{j+1} (the first cell uses the leading triple). Exact on
/// quadratics, fourth-order locally.
pub fn cumulative_simpson(samples: &[f64], step: f64) -> Vec<f64> {
    let n = samples.len();
    assert!(n >= 3, "cumulative_simpson needs at least 3 samples");
    let f = samples;
    let mut out = vec![0.0; n];
    out[1] = step * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
    for j in 1..n - 1 {
        out[j + 1] = out[j] + step * (-f[j - 1] + 8.0 * f[j] + 5.0 * f[j + 1]) / 12.0;
    }
    out
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
        let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Integral over [0, h] of an integrand with an integrable power singularity
/// at 0 (g ~ x^e, e > -3/4). The substitution x = h s^4 turns x^e into
/// s^{4e+3}, which adaptive Simpson handles.
pub fn integrate_singular_head<F: Fn(f64) -> f64>(g: &F, h: f64, tol: f64) -> f64 {
    let trans = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            g(h * s.powi(4)) * 4.0 * h * s.powi(3)
        }
    };
    adaptive_simpson(&trans, 0.0, 1.0, tol)
}

/// Bisection for the unique root of a strictly increasing function on
/// [lo, hi]. Converges to `rel_tol` relative to the bracket scale, capped at
/// `max_iter` bisections.
pub fn bisect_increasing<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    rel_tol: f64,
    max_iter: u32,
) -> Result<f64> {
    let flo = f(lo) - target;
    let fhi = f(hi) - target;
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::OutOfRange {
            name: "bisection target",
            value: target,
            min: f(lo),
            max: f(hi),
        });
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * scale {
            return Ok(mid);
        }
        if f(mid) - target <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cubic (four-point Lagrange) interpolation on a uniform table starting at
/// x = 0 with spacing `step`. `x` must lie within the table range.
pub fn interp_cubic(table: &[f64], step: f64, x: f64) -> f64 {
    let n = table.len();
    debug_assert!(n >= 4);
    let pos = x / step;
    // stencil j-1..j+2 clamped to the table
    let j = (pos.floor() as usize).clamp(1, n - 3);
    let t = pos - j as f64;
    let (p0, p1, p2, p3) = (table[j - 1], table[j], table[j + 1], table[j + 2]);
    // Lagrange basis on offsets -1, 0, 1, 2
    let c0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let c2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let c3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    c0 * p0 + c1 * p1 + c2 * p2 + c3 * p3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_reproducible() {
        let mut a = SplitMix64::new(DEFAULT_SEED);
        let mut b = SplitMix64::new(DEFAULT_SEED);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn subsample_full_when_small() {
        assert_eq!(subsample_indices(10, 20, 1), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn subsample_distinct_and_capped() {
        let idx = subsample_indices(100_000, 5000, DEFAULT_SEED);
        assert_eq!(idx.len(), 5000);
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 5000, "indices must be distinct");
    }

    #[test]
    fn cumulative_simpson_exact_on_quadratics() {
        let n = 101;
        let step = 0.01;
        let samples: Vec<f64> = (0..n).map(|i| {
            let x = i as f64 * step;
            3.0 * x * x - 2.0 * x + 1.0
        }).collect();
        let cum = cumulative_simpson(&samples, step);
        for (i, &c) in cum.iter().enumerate() {
            let x = i as f64 * step;
            let exact = x * x * x - x * x + x;
            assert!((c - exact).abs() < 1e-14, "at x={x}: {c} vs {exact}");
        }
    }

    #[test]
    fn cumulative_simpson_quintic_accuracy() {
        // cumulative integral of x^5/80 should give x^6/480 to ~1e-10
        let n = 1025;
        let step = 1.0 / 1024.0;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 * step).powi(5) / 80.0).collect();
        let cum = cumulative_simpson(&samples, step);
        let exact = 1.0 / 480.0;
        assert!((cum[n - 1] - exact).abs() < 1e-10, "{} vs {exact}", cum[n - 1]);
    }

    #[test]
    fn adaptive_simpson_smooth() {
        let val = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((val - 2.0).abs() < 1e-10);
    }

    #[test]
    fn singular_head_quarter_power() {
        // integral of x^{-1/4} over [0, h] = (4/3) h^{3/4}
        let h = 0.01;
        let got = integrate_singular_head(&|x: f64| x.powf(-0.25), h, 1e-13);
        let exact = 4.0 / 3.0 * h.powf(0.75);
        assert!((got - exact).abs() < 1e-12, "{got} vs {exact}");
    }

    #[test]
    fn bisection_inverts_cubic() {
        let f = |x: f64| x * x * x;
        let root = bisect_increasing(&f, 0.0, 2.0, 0.125, 1e-14, 200).unwrap();
        assert!((root - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bisection_rejects_out_of_bracket() {
        let f = |x: f64| x;
        assert!(bisect_increasing(&f, 0.0, 1.0, 2.0, 1e-12, 200).is_err());
    }

    #[test]
    fn cubic_interp_reproduces_cubics() {
        let step = 0.1;
        let table: Vec<f64> = (0..50).map(|i| {
            let x = i as f64 * step;
            x * x * x - x + 2.0
        }).collect();
        for &x in &[0.05, 0.31, 2.44, 4.87] {
            let exact = x * x * x - x + 2.0;
            assert!((interp_cubic(&table, step, x) - exact).abs() < 1e-12);
        }
    }
}
