//! The regularizing change of unknowns for degenerate diffusion.
//!
//! Given a diffusion coefficient a (vanishing only at 0) and a nonnegative
//! modulus function phi with phi(0) = 0, capped so that phi <= a^2, the
//! construction builds
//!
//!   Phi(k)  = int_0^k int_0^x ( int_0^y phi(z/2) dz )^2 dy dx   for k >= 0,
//!   V(k)    = int_0^k Phi'(x) / a(x) dx,
//!
//! both extended to negative k as odd functions (so V is strictly increasing
//! and Phi' is even; the literal iterated integral would produce an even Phi,
//! which cannot give an increasing V). U denotes the inverse of V, and the
//! substituted reaction term is
//!
//!   fbar(u, |grad u|^2) = -Phi''(u) |grad u|^2 + (Phi' f / a)(u).
//!
//! Under v = V(u) the equation d/dt u = a(u) lap u + f(u) becomes
//! d/dt v = div( a(U(v)) grad v ) + fbar, whose terms stay Holder continuous
//! across the degeneracy set.
//!
//! Two evaluation modes exist: the power-law closed form (a(u) = m|u|^{1-1/m},
//! f = 0, where every function above is an explicit power) and tabulated
//! quadrature for general coefficients. The modulus is conventionally
//! nondecreasing in |k| (a positive modulus vanishing at 0 cannot decrease
//! away from 0, so the tight cap phi = a^2 has this property).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_simpson, bisect_increasing, cumulative_simpson, integrate_singular_head,
    interp_cubic,
};

/// Scalar function type used for user-supplied coefficients.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Diffusion coefficient a and reaction f, with their Holder exponents.
#[derive(Clone)]
pub enum CoefficientFunction {
    /// a(u) = m |u|^{1 - 1/m}, f = 0. The exponent of a is 1 - 1/m.
    PowerLaw { m: f64 },
    /// User-supplied a, f with Holder exponents alpha_a, alpha_f in (0,1).
    Custom {
        a: ScalarFn,
        f: ScalarFn,
        alpha_a: f64,
        alpha_f: f64,
    },
}

impl std::fmt::Debug for CoefficientFunction {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PowerLaw { m } => write!(fm, "PowerLaw {{ m: {m} }}"),
            Self::Custom {
                alpha_a, alpha_f, ..
            } => write!(fm, "Custom {{ alpha_a: {alpha_a}, alpha_f: {alpha_f} }}"),
        }
    }
}

impl CoefficientFunction {
    pub fn power_law(m: f64) -> Result<Self> {
        if !(m > 1.0) {
            return Err(Error::invalid(format!("m = {m}, need m > 1")));
        }
        Ok(Self::PowerLaw { m })
    }

    pub fn custom(a: ScalarFn, f: ScalarFn, alpha_a: f64, alpha_f: f64) -> Result<Self> {
        for (name, val) in [("alpha_a", alpha_a), ("alpha_f", alpha_f)] {
            if !(val > 0.0 && val < 1.0) {
                return Err(Error::invalid(format!("{name} = {val}, need (0,1)")));
            }
        }
        Ok(Self::Custom {
            a,
            f,
            alpha_a,
            alpha_f,
        })
    }

    pub fn a(&self, u: f64) -> f64 {
        match self {
            Self::PowerLaw { m } => m * u.abs().powf(1.0 - 1.0 / m),
            Self::Custom { a, .. } => a(u),
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match self {
            Self::PowerLaw { .. } => 0.0,
            Self::Custom { f, .. } => f(u),
        }
    }

    pub fn alpha_a(&self) -> f64 {
        match self {
            Self::PowerLaw { m } => 1.0 - 1.0 / m,
            Self::Custom { alpha_a, .. } => *alpha_a,
        }
    }

    /// For the power law f = 0 is smooth; its exponent slot mirrors alpha_a
    /// so that min{alpha_a, alpha_f} stays alpha_a.
    pub fn alpha_f(&self) -> f64 {
        match self {
            Self::PowerLaw { m } => 1.0 - 1.0 / m,
            Self::Custom { alpha_f, .. } => *alpha_f,
        }
    }

    /// Sampled structural check on a sign-symmetric grid: a(0) = 0, a > 0
    /// away from 0, nondecreasing on [0, M], nonincreasing on [-M, 0].
    /// Runs when a transform spec is built; the solver accepts arbitrary
    /// coefficients (non-degenerate sanity problems use a = const).
    pub fn validate(&self, m_bound: f64, samples: usize) -> Result<()> {
        let n = samples.max(100) | 1; // odd count so 0 is a sample
        let half = n / 2;
        let step = m_bound / half as f64;
        let tol = 1e-12 * (1.0 + self.a(m_bound).abs());
        if self.a(0.0).abs() > tol {
            return Err(Error::invalid(format!(
                "coefficient must vanish at 0, got a(0) = {}",
                self.a(0.0)
            )));
        }
        let mut prev_pos = 0.0;
        let mut prev_neg = 0.0;
        for j in 1..=half {
            let k = step * j as f64;
            let (ap, an) = (self.a(k), self.a(-k));
            if !(ap > 0.0) || !(an > 0.0) {
                return Err(Error::invalid(format!(
                    "coefficient must be positive away from 0, got a({k}) = {ap}, a({}) = {an}",
                    -k
                )));
            }
            if ap < prev_pos - tol {
                return Err(Error::invalid(format!(
                    "coefficient must be nondecreasing on [0, M]; drops near k = {k}"
                )));
            }
            if an < prev_neg - tol {
                return Err(Error::invalid(format!(
                    "coefficient must be nonincreasing on [-M, 0]; drops near k = {}",
                    -k
                )));
            }
            prev_pos = ap;
            prev_neg = an;
        }
        Ok(())
    }
}

/// Choice of modulus function on [0, M] (used at |k|; the construction is
/// sign-symmetric).
#[derive(Clone)]
pub enum ModulusSpec {
    /// phi = a^2: the cap made tight. Default.
    TightCap,
    /// User-supplied phi(k) >= 0 with phi(0) = 0; capped against a^2.
    Function(ScalarFn),
    /// Tabulated phi on a uniform grid starting at 0; cubic interpolation.
    Tabulated { step: f64, values: Vec<f64> },
}

impl std::fmt::Debug for ModulusSpec {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TightCap => write!(fm, "TightCap"),
            Self::Function(_) => write!(fm, "Function(..)"),
            Self::Tabulated { step, values } => {
                write!(fm, "Tabulated {{ step: {step}, {} values }}", values.len())
            }
        }
    }
}

impl ModulusSpec {
    fn raw(&self, coeff: &CoefficientFunction, k: f64) -> f64 {
        match self {
            Self::TightCap => {
                let a = coeff.a(k);
                a * a
            }
            Self::Function(f) => f(k),
            Self::Tabulated { step, values } => interp_cubic(values, *step, k.abs()),
        }
    }
}

/// Pointwise cap: min(phi_raw(k), a(k)^2).
pub fn cap_modulus(phi_raw: impl Fn(f64) -> f64, a: impl Fn(f64) -> f64, k: f64) -> f64 {
    let ak = a(k);
    phi_raw(k).min(ak * ak)
}

/// The power-law closed forms. All eight numbers are stored explicitly so
/// tests can perturb a single coefficient and watch the identity fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawForms {
    pub m: f64,
    pub alpha: f64,
    /// Phi(k) = phi_coeff |k|^{phi_exp} sign(k)
    pub phi_coeff: f64,
    pub phi_exp: f64,
    /// V(k) = v_coeff |k|^{v_exp} sign(k)
    pub v_coeff: f64,
    pub v_exp: f64,
    /// fbar = -fbar_coeff |u|^{fbar_exp} sign(u) |grad u|^2
    pub fbar_coeff: f64,
    pub fbar_exp: f64,
    /// a(U(v)) = diff_coeff |v|^{diff_exp}
    pub diff_coeff: f64,
    pub diff_exp: f64,
}

impl PowerLawForms {
    pub fn new(m: f64, alpha: f64) -> Self {
        let one = 1.0 - 1.0 / m;
        let phi_exp = one * (2.0 + alpha);
        Self {
            m,
            alpha,
            phi_coeff: m * (1.0 + alpha) / (2.0 + alpha),
            phi_exp,
            v_coeff: 1.0,
            v_exp: one * (1.0 + alpha),
            fbar_coeff: (1.0 + alpha) * (m - 1.0) * (phi_exp - 1.0),
            fbar_exp: phi_exp - 2.0,
            diff_coeff: m,
            diff_exp: 1.0 / (1.0 + alpha),
        }
    }
}

/// Which stored closed-form coefficient to perturb in sensitivity tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormCoefficient {
    PhiCoeff,
    PhiExp,
    VCoeff,
    VExp,
    FbarCoeff,
    FbarExp,
}

impl FormCoefficient {
    /// The coefficients entering the substituted-equation identity.
    pub const ALL: [FormCoefficient; 6] = [
        FormCoefficient::PhiCoeff,
        FormCoefficient::PhiExp,
        FormCoefficient::VCoeff,
        FormCoefficient::VExp,
        FormCoefficient::FbarCoeff,
        FormCoefficient::FbarExp,
    ];
}

#[derive(Debug, Clone)]
struct QuadTables {
    step: f64,
    /// capped modulus at the nodes (reporting, profile comparisons)
    modulus: Vec<f64>,
    phi: Vec<f64>,
    phi_prime: Vec<f64>,
    phi_second: Vec<f64>,
    v: Vec<f64>,
}

#[derive(Debug, Clone)]
enum SpecKind {
    ClosedForm(PowerLawForms),
    Quadrature(QuadTables),
}

/// One instance of the substitution: coefficient, range bound M, exponents
/// and the evaluation machinery for Phi, V, U, fbar and the substituted
/// diffusion coefficient.
#[derive(Debug, Clone)]
pub struct TransformSpec {
    coeff: CoefficientFunction,
    m_bound: f64,
    alpha: f64,
    alpha_u: Option<f64>,
    kind: SpecKind,
}

/// Default quadrature resolution per unit of k.
pub const DEFAULT_NODES_PER_UNIT: usize = 1024;
/// Relative tolerance of the bisection inverting V.
pub const INVERSION_REL_TOL: f64 = 1e-12;
const INVERSION_MAX_ITER: u32 = 200;

impl TransformSpec {
    /// Closed-form power-law spec: a(u) = m|u|^{1-1/m}, f = 0, alpha in (0,1)
    /// chosen freely.
    pub fn power_law(m: f64, alpha: f64, m_bound: f64) -> Result<Self> {
        if !(m > 1.0) {
            return Err(Error::invalid(format!("m = {m}, need m > 1")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha = {alpha}, need (0,1)")));
        }
        if !(m_bound > 0.0) {
            return Err(Error::invalid(format!("M = {m_bound}, need M > 0")));
        }
        Ok(Self {
            coeff: CoefficientFunction::PowerLaw { m },
            m_bound,
            alpha,
            alpha_u: None,
            kind: SpecKind::ClosedForm(PowerLawForms::new(m, alpha)),
        })
    }

    /// Quadrature spec from a coefficient pair and a modulus choice. The
    /// modulus is capped against a^2, then Phi, Phi', Phi'' and V are built
    /// as cumulative Simpson tables on [0, M]; alpha = min{alpha_a, alpha_f}
    /// * alpha_u.
    pub fn quadrature(
        coeff: CoefficientFunction,
        modulus: ModulusSpec,
        m_bound: f64,
        alpha_u: f64,
        nodes_per_unit: usize,
    ) -> Result<Self> {
        if !(m_bound > 0.0) {
            return Err(Error::invalid(format!("M = {m_bound}, need M > 0")));
        }
        if !(alpha_u > 0.0 && alpha_u < 1.0) {
            return Err(Error::invalid(format!("alpha_u = {alpha_u}, need (0,1)")));
        }
        coeff.validate(m_bound, 101)?;
        let alpha = coeff.alpha_a().min(coeff.alpha_f()) * alpha_u;

        let cells = ((nodes_per_unit as f64 * m_bound).ceil() as usize).max(64);
        let n = cells + 1;
        let step = m_bound / cells as f64;
        let capped = |k: f64| {
            let a = coeff.a(k);
            modulus.raw(&coeff, k).min(a * a)
        };
        // integrand of the innermost layer is phi evaluated at half argument
        let half_arg: Vec<f64> = (0..n).map(|j| capped(0.5 * step * j as f64)).collect();
        let inner = cumulative_simpson(&half_arg, step);
        let phi_second: Vec<f64> = inner.iter().map(|&x| x * x).collect();
        let phi_prime = cumulative_simpson(&phi_second, step);
        let phi = cumulative_simpson(&phi_prime, step);
        // V' = Phi'/a, extended by 0 at the degenerate point
        let vprime: Vec<f64> = (0..n)
            .map(|j| {
                if j == 0 {
                    0.0
                } else {
                    phi_prime[j] / coeff.a(step * j as f64)
                }
            })
            .collect();
        let v = cumulative_simpson(&vprime, step);
        let modulus_nodes: Vec<f64> = (0..n).map(|j| capped(step * j as f64)).collect();
        for (name, table) in [("Phi", &phi), ("V", &v)] {
            if table.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("{name} table")));
            }
        }
        Ok(Self {
            coeff,
            m_bound,
            alpha,
            alpha_u: Some(alpha_u),
            kind: SpecKind::Quadrature(QuadTables {
                step,
                modulus: modulus_nodes,
                phi,
                phi_prime,
                phi_second,
                v,
            }),
        })
    }

    /// Quadrature spec whose Phi family is sampled from the power-law closed
    /// forms, with V integrated numerically from Phi'/a (singular head via
    /// substitution) and U inverted by bisection. Cross-validates the
    /// numerical integration and inversion stages against exact references.
    /// No integrable modulus generates this Phi through the iterated
    /// integral (its second derivative decreases in |k| for small m), so the
    /// iterated-integral stage is validated separately against polynomial
    /// moduli.
    pub fn power_law_quadrature(
        m: f64,
        alpha: f64,
        m_bound: f64,
        nodes_per_unit: usize,
    ) -> Result<Self> {
        let closed = Self::power_law(m, alpha, m_bound)?;
        let forms = match &closed.kind {
            SpecKind::ClosedForm(f) => *f,
            SpecKind::Quadrature(_) => unreachable!(),
        };
        let cells = ((nodes_per_unit as f64 * m_bound).ceil() as usize).max(64);
        let n = cells + 1;
        let step = m_bound / cells as f64;
        let at = |j: usize| step * j as f64;
        let phi: Vec<f64> = (0..n)
            .map(|j| forms.phi_coeff * at(j).powf(forms.phi_exp))
            .collect();
        let dphi = |x: f64| forms.phi_coeff * forms.phi_exp * x.powf(forms.phi_exp - 1.0);
        let phi_prime: Vec<f64> = (0..n).map(|j| if j == 0 { 0.0 } else { dphi(at(j)) }).collect();
        let phi_second: Vec<f64> = (0..n)
            .map(|j| {
                if j == 0 {
                    0.0
                } else {
                    forms.phi_coeff
                        * forms.phi_exp
                        * (forms.phi_exp - 1.0)
                        * at(j).powf(forms.phi_exp - 2.0)
                }
            })
            .collect();
        // V' = Phi'/a ~ k^{v_exp - 1} near 0: integrable but possibly singular
        let vp = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                dphi(x) / (m * x.powf(1.0 - 1.0 / m))
            }
        };
        let mut v = vec![0.0; n];
        v[1] = integrate_singular_head(&vp, step, 1e-13);
        for j in 1..n - 1 {
            v[j + 1] = v[j] + adaptive_simpson(&vp, at(j), at(j + 1), 1e-13);
        }
        let modulus_nodes: Vec<f64> = (0..n)
            .map(|j| {
                let a = m * at(j).powf(1.0 - 1.0 / m);
                a * a
            })
            .collect();
        Ok(Self {
            coeff: CoefficientFunction::PowerLaw { m },
            m_bound,
            alpha,
            alpha_u: None,
            kind: SpecKind::Quadrature(QuadTables {
                step,
                modulus: modulus_nodes,
                phi,
                phi_prime,
                phi_second,
                v,
            }),
        })
    }

    pub fn coeff(&self) -> &CoefficientFunction {
        &self.coeff
    }

    pub fn m_bound(&self) -> f64 {
        self.m_bound
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_u(&self) -> Option<f64> {
        self.alpha_u
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.kind, SpecKind::ClosedForm(_))
    }

    /// The stored closed forms, when this spec is in closed-form mode.
    pub fn forms(&self) -> Option<&PowerLawForms> {
        match &self.kind {
            SpecKind::ClosedForm(f) => Some(f),
            SpecKind::Quadrature(_) => None,
        }
    }

    /// Copy of this spec with one closed-form coefficient scaled by
    /// `factor`. Sensitivity harness for the identity checks; closed-form
    /// mode only.
    pub fn with_scaled_coefficient(&self, which: FormCoefficient, factor: f64) -> Result<Self> {
        let SpecKind::ClosedForm(mut forms) = self.kind.clone() else {
            return Err(Error::invalid(
                "coefficient scaling applies to closed-form specs only",
            ));
        };
        match which {
            FormCoefficient::PhiCoeff => forms.phi_coeff *= factor,
            FormCoefficient::PhiExp => forms.phi_exp *= factor,
            FormCoefficient::VCoeff => forms.v_coeff *= factor,
            FormCoefficient::VExp => forms.v_exp *= factor,
            FormCoefficient::FbarCoeff => forms.fbar_coeff *= factor,
            FormCoefficient::FbarExp => forms.fbar_exp *= factor,
        }
        Ok(Self {
            coeff: self.coeff.clone(),
            m_bound: self.m_bound,
            alpha: self.alpha,
            alpha_u: self.alpha_u,
            kind: SpecKind::ClosedForm(forms),
        })
    }

    fn check_range(&self, name: &'static str, k: f64) -> Result<()> {
        if k.abs() > self.m_bound * (1.0 + 1e-12) {
            return Err(Error::OutOfRange {
                name,
                value: k,
                min: -self.m_bound,
                max: self.m_bound,
            });
        }
        Ok(())
    }

    /// The capped modulus at k (quadrature tables or a^2 in closed form).
    pub fn modulus(&self, k: f64) -> Result<f64> {
        self.check_range("k", k)?;
        match &self.kind {
            SpecKind::ClosedForm(_) => {
                let a = self.coeff.a(k);
                Ok(a * a)
            }
            SpecKind::Quadrature(t) => Ok(interp_cubic(&t.modulus, t.step, k.abs())),
        }
    }

    /// Phi(k), odd in k.
    pub fn phi(&self, k: f64) -> Result<f64> {
        self.check_range("k", k)?;
        if k == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            SpecKind::ClosedForm(f) => Ok(k.signum() * f.phi_coeff * k.abs().powf(f.phi_exp)),
            SpecKind::Quadrature(t) => Ok(k.signum() * interp_cubic(&t.phi, t.step, k.abs())),
        }
    }

    /// Phi'(k), even in k; 0 at k = 0.
    pub fn phi_prime(&self, k: f64) -> Result<f64> {
        self.check_range("k", k)?;
        if k == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            SpecKind::ClosedForm(f) => {
                Ok(f.phi_coeff * f.phi_exp * k.abs().powf(f.phi_exp - 1.0))
            }
            SpecKind::Quadrature(t) => Ok(interp_cubic(&t.phi_prime, t.step, k.abs())),
        }
    }

    /// Phi''(k), odd in k; 0 at k = 0 by the empty-integral convention.
    pub fn phi_second(&self, k: f64) -> Result<f64> {
        self.check_range("k", k)?;
        if k == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            SpecKind::ClosedForm(f) => Ok(k.signum()
                * f.phi_coeff
                * f.phi_exp
                * (f.phi_exp - 1.0)
                * k.abs().powf(f.phi_exp - 2.0)),
            SpecKind::Quadrature(t) => {
                Ok(k.signum() * interp_cubic(&t.phi_second, t.step, k.abs()))
            }
        }
    }

    /// V(k), odd and strictly increasing.
    pub fn v(&self, k: f64) -> Result<f64> {
        self.check_range("k", k)?;
        if k == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            SpecKind::ClosedForm(f) => Ok(k.signum() * f.v_coeff * k.abs().powf(f.v_exp)),
            SpecKind::Quadrature(t) => Ok(k.signum() * interp_cubic(&t.v, t.step, k.abs())),
        }
    }

    /// V'(k) = Phi'(k)/a(k), even; extended by 0 at the degenerate point.
    pub fn v_prime(&self, k: f64) -> Result<f64> {
        self.check_range("k", k)?;
        if k == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            SpecKind::ClosedForm(f) => Ok(f.v_coeff * f.v_exp * k.abs().powf(f.v_exp - 1.0)),
            SpecKind::Quadrature(_) => Ok(self.phi_prime(k)? / self.coeff.a(k)),
        }
    }

    /// Largest value of |V| on the admissible range.
    pub fn v_range(&self) -> f64 {
        match &self.kind {
            SpecKind::ClosedForm(f) => f.v_coeff * self.m_bound.powf(f.v_exp),
            SpecKind::Quadrature(t) => *t.v.last().unwrap(),
        }
    }

    /// U(v): the unique k with V(k) = v. Closed form uses the exact power
    /// inverse; quadrature mode bisects the increasing V to 1e-12 relative.
    pub fn u_inv(&self, v: f64) -> Result<f64> {
        let range = self.v_range() * (1.0 + 1e-12);
        if v.abs() > range {
            return Err(Error::OutOfRange {
                name: "v",
                value: v,
                min: -range,
                max: range,
            });
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            SpecKind::ClosedForm(f) => {
                Ok(v.signum() * (v.abs() / f.v_coeff).powf(1.0 / f.v_exp))
            }
            SpecKind::Quadrature(t) => {
                let eval = |k: f64| interp_cubic(&t.v, t.step, k);
                // the range check above allows 1 ulp of slack; clamp the
                // target into the bracket
                let target = v.abs().min(eval(self.m_bound));
                let root = bisect_increasing(
                    &eval,
                    0.0,
                    self.m_bound,
                    target,
                    INVERSION_REL_TOL,
                    INVERSION_MAX_ITER,
                )?;
                Ok(v.signum() * root)
            }
        }
    }

    /// The substituted reaction term fbar(u, |grad u|^2); 0 at u = 0.
    pub fn fbar(&self, u: f64, grad_u_sq: f64) -> Result<f64> {
        self.check_range("u", u)?;
        if grad_u_sq < 0.0 {
            return Err(Error::invalid(format!(
                "grad_u_sq = {grad_u_sq} must be nonnegative"
            )));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            SpecKind::ClosedForm(f) => {
                // f = 0 for the power law; only the -Phi'' |grad u|^2 term remains
                Ok(-u.signum() * f.fbar_coeff * u.abs().powf(f.fbar_exp) * grad_u_sq)
            }
            SpecKind::Quadrature(_) => {
                let reaction = self.phi_prime(u)? / self.coeff.a(u) * self.coeff.f(u);
                Ok(-self.phi_second(u)? * grad_u_sq + reaction)
            }
        }
    }

    /// Diffusion coefficient of the substituted equation: a(U(v)).
    pub fn diffusion(&self, v: f64) -> Result<f64> {
        match &self.kind {
            SpecKind::ClosedForm(f) => {
                if v.abs() > self.v_range() * (1.0 + 1e-12) {
                    return Err(Error::OutOfRange {
                        name: "v",
                        value: v,
                        min: -self.v_range(),
                        max: self.v_range(),
                    });
                }
                Ok(f.diff_coeff * v.abs().powf(f.diff_exp))
            }
            SpecKind::Quadrature(_) => Ok(self.coeff.a(self.u_inv(v)?)),
        }
    }
}
