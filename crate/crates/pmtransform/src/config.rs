//! Structured key-value configs (TOML) for transform specs, solver problems
//! and the experiment runners, with the named presets used by the CLI.
//! Every config round-trips through its rendered form.

use serde::{Deserialize, Serialize};

use crate::barenblatt::BarenblattParams;
use crate::error::{Error, Result};
use crate::solver::{BoundaryTrace, PMEProblem};
use crate::transform::{
    CoefficientFunction, ModulusSpec, TransformSpec, DEFAULT_NODES_PER_UNIT,
};

/// Modulus choice in config form: a named preset or a tabulated function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiConfig {
    /// "tight-cap" (phi = a^2) or "power-law" (tables sampled from the
    /// power-law closed forms; exercises the numerical V/U stages).
    Preset(String),
    Table { step: f64, values: Vec<f64> },
}

impl Default for PhiConfig {
    fn default() -> Self {
        Self::Preset("tight-cap".to_string())
    }
}

/// Serializable description of a transform spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    /// coefficient family; "power-law" is the only serializable kind
    pub kind: String,
    pub m: f64,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_u: Option<f64>,
    /// "closed-form" or "quadrature"
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_per_unit: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiConfig>,
}

impl TransformConfig {
    pub fn closed_form(m: f64, alpha: f64, m_bound: f64) -> Self {
        Self {
            kind: "power-law".into(),
            m,
            alpha,
            m_bound,
            alpha_u: None,
            mode: "closed-form".into(),
            nodes_per_unit: None,
            phi: None,
        }
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("transform config serializes")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("transform config: {e}")))
    }

    pub fn build(&self) -> Result<TransformSpec> {
        if self.kind != "power-law" {
            return Err(Error::Config(format!(
                "unknown coefficient kind '{}' (only 'power-law' configs are supported)",
                self.kind
            )));
        }
        let npu = self.nodes_per_unit.unwrap_or(DEFAULT_NODES_PER_UNIT);
        match self.mode.as_str() {
            "closed-form" => TransformSpec::power_law(self.m, self.alpha, self.m_bound),
            "quadrature" => match self.phi.clone().unwrap_or_default() {
                PhiConfig::Preset(name) => match name.as_str() {
                    "power-law" => TransformSpec::power_law_quadrature(
                        self.m,
                        self.alpha,
                        self.m_bound,
                        npu,
                    ),
                    "tight-cap" => TransformSpec::quadrature(
                        CoefficientFunction::power_law(self.m)?,
                        ModulusSpec::TightCap,
                        self.m_bound,
                        self.alpha_u.ok_or_else(|| {
                            Error::Config(
                                "quadrature mode with tight-cap phi needs alpha_u".into(),
                            )
                        })?,
                        npu,
                    ),
                    other => Err(Error::Config(format!("unknown phi preset '{other}'"))),
                },
                PhiConfig::Table { step, values } => TransformSpec::quadrature(
                    CoefficientFunction::power_law(self.m)?,
                    ModulusSpec::Tabulated { step, values },
                    self.m_bound,
                    self.alpha_u.ok_or_else(|| {
                        Error::Config("quadrature mode with tabulated phi needs alpha_u".into())
                    })?,
                    npu,
                ),
            },
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

/// Serializable description of a solver problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    /// coefficient family; "power-law" only
    pub coeff: String,
    pub m: f64,
    /// "barenblatt" | "zero" | "custom"
    pub data: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barenblatt: Option<BarenblattParams>,
    pub t_start: f64,
    pub t_end: f64,
    pub radius: f64,
    pub nx: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub nt_out: usize,
    /// custom data: initial layer CSV with `x,value` rows (nx of them)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_csv: Option<String>,
    /// custom data: boundary CSV with `t,left,right` rows
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_csv: Option<String>,
}

fn default_dim() -> usize {
    1
}

impl ProblemConfig {
    pub fn render(&self) -> String {
        toml::to_string(self).expect("problem config serializes")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("problem config: {e}")))
    }

    pub fn build(&self) -> Result<PMEProblem> {
        if self.coeff != "power-law" {
            return Err(Error::Config(format!(
                "unknown coefficient kind '{}'",
                self.coeff
            )));
        }
        let coeff = CoefficientFunction::power_law(self.m)?;
        match self.data.as_str() {
            "zero" => PMEProblem::zero(
                coeff,
                self.t_start,
                self.t_end,
                self.radius,
                self.nx,
                self.dim,
            ),
            "barenblatt" => {
                let params = self.barenblatt.ok_or_else(|| {
                    Error::Config("data = \"barenblatt\" needs a [barenblatt] block".into())
                })?;
                BarenblattParams::new(params.m, params.d, params.c, params.tau)?;
                PMEProblem::barenblatt(params, self.t_start, self.t_end, self.radius, self.nx)
            }
            "custom" => {
                let init_path = self.initial_csv.as_ref().ok_or_else(|| {
                    Error::Config("data = \"custom\" needs initial_csv".into())
                })?;
                let u0 = read_initial_csv(&std::fs::read_to_string(init_path)?)?;
                let trace = match &self.boundary_csv {
                    None => BoundaryTrace::Zero,
                    Some(path) => read_boundary_csv(&std::fs::read_to_string(path)?)?,
                };
                PMEProblem::new(
                    coeff,
                    self.t_start,
                    self.t_end,
                    self.radius,
                    self.nx,
                    self.dim,
                    u0,
                    trace,
                )
            }
            other => Err(Error::Config(format!("unknown data preset '{other}'"))),
        }
    }
}

/// Parse an `x,value` CSV into an initial layer (header optional).
pub fn read_initial_csv(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("x,") {
            continue;
        }
        let mut parts = line.split(',');
        let _x = parts.next();
        let val = parts
            .next()
            .ok_or_else(|| Error::Config(format!("initial CSV line {} lacks a value", lineno + 1)))?
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("initial CSV line {}: {e}", lineno + 1)))?;
        out.push(val);
    }
    if out.is_empty() {
        return Err(Error::Config("initial CSV holds no rows".into()));
    }
    Ok(out)
}

/// Parse a `t,left,right` CSV into a tabulated boundary trace.
pub fn read_boundary_csv(text: &str) -> Result<BoundaryTrace> {
    let (mut times, mut left, mut right) = (Vec::new(), Vec::new(), Vec::new());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("t,") {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("boundary CSV line {}: {e}", lineno + 1)))?;
        if vals.len() != 3 {
            return Err(Error::Config(format!(
                "boundary CSV line {} needs t,left,right",
                lineno + 1
            )));
        }
        times.push(vals[0]);
        left.push(vals[1]);
        right.push(vals[2]);
    }
    if times.len() < 2 {
        return Err(Error::Config("boundary CSV needs at least two rows".into()));
    }
    Ok(BoundaryTrace::Tabulated { times, left, right })
}

/// Named presets wiring the flagship scenario into one-liners.
pub mod presets {
    use super::*;
    use crate::holder::PsiExponents;

    /// m = 2, d = 1, C = 1 profile observed on t in [1, 2] (the time-shifted
    /// solution started from the unit-peak layer).
    pub fn barenblatt_m2() -> BarenblattParams {
        BarenblattParams {
            m: 2.0,
            d: 1,
            c: 1.0,
            tau: 0.0,
        }
    }

    /// The quantitative anchor: m = 2 with alpha = 1/2 on [-10, 10].
    pub fn transform_m2_alpha05() -> TransformConfig {
        TransformConfig::closed_form(2.0, 0.5, 10.0)
    }

    /// Exponents for the psi profile of the m = 2 scenario: alpha_a = 1/2
    /// (the exponent of a(u) = 2|u|^{1/2}), alpha_f mirroring it (f = 0),
    /// alpha_u = 1/2 (valid for the Lipschitz solution), alpha = 1/4.
    pub fn psi_exponents_m2() -> PsiExponents {
        PsiExponents {
            alpha_a: 0.5,
            alpha_f: 0.5,
            alpha_u: 0.5,
            alpha: 0.25,
        }
    }

    /// Scenario geometry shared by the refinement studies: t in [1, 2],
    /// domain radius 6 (the support grows from ~3.46 to ~4.36).
    pub const T_START: f64 = 1.0;
    pub const T_END: f64 = 2.0;
    pub const RADIUS: f64 = 6.0;

    pub fn by_name(name: &str) -> Result<(BarenblattParams, TransformConfig)> {
        match name {
            "barenblatt-m2-alpha05" | "barenblatt-m2" => {
                Ok((barenblatt_m2(), transform_m2_alpha05()))
            }
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }
}
