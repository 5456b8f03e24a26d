//! Scenario files (JSON, format tag "pc/1").

use std::path::Path;

use conelaw::constitutive::{DriftPolicy, Interpolation, StrainPath};
use conelaw::wave::{Boundaries, BoundaryCondition, TimeProgram};
use conelaw::yield_surface::{self, PolyTerm, YieldFunction};
use conelaw::{ElasticModuli, SymTensor3, YieldDomain};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

pub const FORMAT_FAMILY: &str = "pc";
pub const FORMAT_MAJOR: u32 = 1;

pub fn load<T: DeserializeOwned + Versioned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read scenario {}: {e}", path.display()))
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let scenario: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        let inner = e.into_inner();
        if at == "." {
            CliError::Validation(format!("scenario {}: {inner}", path.display()))
        } else {
            CliError::Validation(format!("scenario {}: {at}: {inner}", path.display()))
        }
    })?;
    check_version(scenario.version())?;
    Ok(scenario)
}

pub trait Versioned {
    fn version(&self) -> &str;
}

fn check_version(tag: &str) -> Result<(), CliError> {
    let major = tag
        .strip_prefix(FORMAT_FAMILY)
        .and_then(|rest| rest.strip_prefix('/'))
        .and_then(|v| v.split('.').next())
        .and_then(|m| m.parse::<u32>().ok());
    match major {
        Some(FORMAT_MAJOR) => Ok(()),
        _ => Err(CliError::Validation(format!(
            "version: unsupported scenario format {tag:?}, expected \"{FORMAT_FAMILY}/{FORMAT_MAJOR}\""
        ))),
    }
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{field}: {reason}"))
}

fn tensor(a: [f64; 6]) -> SymTensor3 {
    SymTensor3::from_array(a)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuliSpec {
    pub lame: Option<[f64; 2]>,
    pub young: Option<[f64; 2]>,
    pub rho: Option<f64>,
}

impl ModuliSpec {
    pub fn build(&self) -> Result<ElasticModuli, CliError> {
        let rho = self
            .rho
            .ok_or_else(|| invalid("moduli.rho", "missing field `rho`"))?;
        let moduli = match (self.lame, self.young) {
            (Some([l, m]), None) => ElasticModuli::from_lame(l, m, rho),
            (None, Some([e, nu])) => ElasticModuli::from_young(e, nu, rho),
            (Some(_), Some(_)) => {
                return Err(invalid("moduli", "give either `lame` or `young`, not both"))
            }
            (None, None) => return Err(invalid("moduli", "missing field `lame` or `young`")),
        };
        moduli.map_err(|e| CliError::Validation(format!("moduli.{e}")))
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    VonMises,
    Tresca,
    Custom,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: f64,
    #[serde(default)]
    pub j2: u32,
    #[serde(default)]
    pub j3: u32,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    VonMises { k: f64 },
    Tresca { k: f64 },
    Polynomial { terms: Vec<TermSpec>, level: f64 },
    Linear { direction: [f64; 6], level: f64 },
}

impl FunctionSpec {
    fn build(&self, index: usize) -> Result<YieldFunction, CliError> {
        let f = match self {
            FunctionSpec::VonMises { k } => yield_surface::von_mises(*k),
            FunctionSpec::Tresca { k } => yield_surface::tresca(*k),
            FunctionSpec::Polynomial { terms, level } => yield_surface::invariant_polynomial(
                terms
                    .iter()
                    .map(|t| PolyTerm {
                        coeff: t.coeff,
                        j2_power: t.j2,
                        j3_power: t.j3,
                    })
                    .collect(),
                *level,
            ),
            FunctionSpec::Linear { direction, level } => {
                yield_surface::linear(tensor(*direction), *level)
            }
        };
        f.map_err(|e| CliError::Validation(format!("functions[{index}].{e}")))
    }
}

/// Criterion fields shared by every scenario kind.
pub struct CriterionSpec<'a> {
    pub criterion: CriterionKind,
    pub k: Option<f64>,
    pub functions: Option<&'a [FunctionSpec]>,
}

impl CriterionSpec<'_> {
    pub fn build(&self, tol_scale: f64) -> Result<YieldDomain, CliError> {
        let need_k = |name: &str| {
            self.k.ok_or_else(|| {
                invalid(
                    "k",
                    format!("missing field `k` (required for criterion {name:?})"),
                )
            })
        };
        if self.criterion != CriterionKind::Custom && self.functions.is_some() {
            return Err(invalid(
                "functions",
                "only allowed with criterion \"custom\"",
            ));
        }
        let domain = match self.criterion {
            CriterionKind::VonMises => YieldDomain::von_mises(need_k("von_mises")?),
            CriterionKind::Tresca => YieldDomain::tresca(need_k("tresca")?),
            CriterionKind::Custom => {
                if self.k.is_some() {
                    return Err(invalid(
                        "k",
                        "not used with criterion \"custom\"; give levels per function",
                    ));
                }
                let specs = self.functions.ok_or_else(|| {
                    invalid(
                        "functions",
                        "missing field `functions` (required for criterion \"custom\")",
                    )
                })?;
                if specs.is_empty() {
                    return Err(invalid("functions", "at least one function is required"));
                }
                let functions = specs
                    .iter()
                    .enumerate()
                    .map(|(i, f)| f.build(i))
                    .collect::<Result<Vec<_>, _>>()?;
                YieldDomain::new(functions)
            }
        }
        .map_err(|e| CliError::Validation(e.to_string()))?;
        let saturation_tol = domain.saturation_tol() * tol_scale;
        let eig_tol = domain.eig_tol() * tol_scale;
        Ok(domain
            .with_saturation_tol(saturation_tol)
            .with_eig_tol(eig_tol))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectScenario {
    pub version: String,
    /// Accepted for a uniform format; the command draws no random numbers.
    #[allow(dead_code)]
    pub seed: Option<u64>,
    pub criterion: CriterionKind,
    pub k: Option<f64>,
    pub functions: Option<Vec<FunctionSpec>>,
    pub sigma: [f64; 6],
    pub tau: [f64; 6],
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DriftSpec {
    None,
    #[default]
    RadialReturn,
}

impl From<DriftSpec> for DriftPolicy {
    fn from(d: DriftSpec) -> Self {
        match d {
            DriftSpec::None => DriftPolicy::None,
            DriftSpec::RadialReturn => DriftPolicy::RadialReturn,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationSpec {
    PiecewiseConstant,
    PiecewiseLinear,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub interpolation: InterpolationSpec,
    /// `[t, [ε̇11, ε̇22, ε̇33, ε̇12, ε̇13, ε̇23]]`
    pub knots: Vec<(f64, [f64; 6])>,
}

impl PathSpec {
    pub fn build(&self) -> Result<StrainPath, CliError> {
        let interpolation = match self.interpolation {
            InterpolationSpec::PiecewiseConstant => Interpolation::PiecewiseConstant,
            InterpolationSpec::PiecewiseLinear => Interpolation::PiecewiseLinear,
        };
        StrainPath::new(
            self.knots.iter().map(|(t, r)| (*t, tensor(*r))).collect(),
            interpolation,
        )
        .map_err(|e| CliError::Validation(format!("path.{e}")))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveScenario {
    pub version: String,
    /// Accepted for a uniform format; the command draws no random numbers.
    #[allow(dead_code)]
    pub seed: Option<u64>,
    pub moduli: ModuliSpec,
    pub criterion: CriterionKind,
    pub k: Option<f64>,
    pub functions: Option<Vec<FunctionSpec>>,
    pub path: PathSpec,
    pub dt: f64,
    #[serde(default)]
    pub drift: DriftSpec,
    pub drift_tol: Option<f64>,
    pub initial_sigma: Option<[f64; 6]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_cells: usize,
    pub length: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// `program`: `[[t, value], ...]`, piecewise constant.
    Velocity {
        program: Vec<(f64, f64)>,
    },
    Traction {
        program: Vec<(f64, f64)>,
    },
    Free,
}

impl BoundarySpec {
    fn build(&self, side: &str) -> Result<BoundaryCondition, CliError> {
        let program = |p: &[(f64, f64)]| {
            TimeProgram::new(p.to_vec()).map_err(|e| CliError::Validation(format!("bc.{side}.{e}")))
        };
        Ok(match self {
            BoundarySpec::Velocity { program: p } => BoundaryCondition::Velocity(program(p)?),
            BoundarySpec::Traction { program: p } => BoundaryCondition::Traction(program(p)?),
            BoundarySpec::Free => BoundaryCondition::Free,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundariesSpec {
    pub left: BoundarySpec,
    pub right: BoundarySpec,
}

impl BoundariesSpec {
    pub fn build(&self) -> Result<Boundaries, CliError> {
        Ok(Boundaries {
            left: self.left.build("left")?,
            right: self.right.build("right")?,
        })
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    /// Axial body force program `[[t, h], ...]`.
    #[serde(default)]
    pub body_force: Vec<(f64, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveScenarioSpec {
    pub version: String,
    pub seed: Option<u64>,
    pub grid: GridSpec,
    pub moduli: ModuliSpec,
    pub criterion: CriterionKind,
    pub k: Option<f64>,
    pub functions: Option<Vec<FunctionSpec>>,
    pub bc: BoundariesSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    pub dt: f64,
    pub t_end: f64,
    pub output_stride: usize,
    #[serde(default)]
    pub drift: DriftSpec,
    pub drift_tol: Option<f64>,
    #[serde(default)]
    pub probes: Vec<usize>,
    pub front_threshold: Option<f64>,
}

macro_rules! criterion_fields {
    ($($t:ty),*) => {$(
        impl Versioned for $t {
            fn version(&self) -> &str {
                &self.version
            }
        }

        impl $t {
            pub fn criterion_spec(&self) -> CriterionSpec<'_> {
                CriterionSpec {
                    criterion: self.criterion,
                    k: self.k,
                    functions: self.functions.as_deref(),
                }
            }
        }
    )*};
}

criterion_fields!(ProjectScenario, DriveScenario, WaveScenarioSpec);

pub fn sigma_from(a: [f64; 6]) -> SymTensor3 {
    tensor(a)
}
