//! JSON model specifications.
//!
//! A spec is an object with `"schema": 1`, a `"type"` tag and the
//! parameters of that family. Unknown fields are rejected.

use std::path::Path;

use hazdep::depfun::{FrankModel, HazardModel, Marginal, PropModel, Remarginalized};
use hazdep::frailty::{Covariance, Generator, LaplaceModel, TrivariateChiSqParams};
use hazdep::higher::{copula_family, Component, ScoreFunction, ScoreTerm};
use hazdep::levy::{Atom, LevyTriplet};
use hazdep::minid::{DiscreteExponentMeasure, MassPoint};
use hazdep::Model;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u64 = 1;

/// Family and parameters, keyed by `"type"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    Clayton {
        #[serde(default = "two")]
        dim: usize,
    },
    Frank {
        theta: f64,
    },
    Invgauss {
        theta: f64,
        #[serde(default = "two")]
        dim: usize,
    },
    /// Trivariate χ² frailty, from correlations (and optional standard
    /// deviations) or from a full covariance matrix.
    Chisq3 {
        #[serde(default)]
        rho: Option<[f64; 3]>,
        #[serde(default)]
        sd: Option<[f64; 3]>,
        #[serde(default)]
        covariance: Option<Vec<Vec<f64>>>,
    },
    SharedGamma {
        shape: f64,
        #[serde(default = "two")]
        dim: usize,
    },
    Lognormal {
        covariance: Vec<Vec<f64>>,
    },
    CompoundPoisson {
        drift: Vec<f64>,
        #[serde(default)]
        atoms: Vec<AtomSpec>,
    },
    Prop {
        beta: f64,
    },
    MultiProp {
        dim: usize,
        pairs: Vec<PairSpec>,
    },
    Minid {
        dim: usize,
        atoms: Vec<MassPointSpec>,
        #[serde(default)]
        uniform_margin_boundary: bool,
    },
    ScoreCopula {
        terms: Vec<TermSpec>,
        theta: f64,
    },
}

fn two() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub c: f64,
    pub x: Vec<f64>,
}

/// `β` for the one-based pair `pair`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub pair: [usize; 2],
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassPointSpec {
    pub w: f64,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coef: f64,
    pub factors: Vec<ComponentSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ComponentSpec {
    LegendreOdd { degree: usize },
    Grid { values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalSpec {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Lomax { shape: f64 },
    HalfStable { theta: f64 },
    Uniform,
}

impl MarginalSpec {
    pub fn build(&self) -> CliResult<Marginal> {
        Ok(match *self {
            MarginalSpec::Exponential { rate } => Marginal::exponential(rate)?,
            MarginalSpec::Weibull { shape, scale } => Marginal::weibull(shape, scale)?,
            MarginalSpec::Lomax { shape } => Marginal::lomax(shape)?,
            MarginalSpec::HalfStable { theta } => Marginal::half_stable(theta)?,
            MarginalSpec::Uniform => Marginal::Uniform,
        })
    }
}

/// A parsed model spec.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Replacement marginals; the model's own margins when absent.
    pub marginals: Option<Vec<MarginalSpec>>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, marginals: None }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Spec(format!("invalid JSON: {e}")))?;
        let obj = value.as_object_mut().ok_or_else(|| CliError::Spec("model spec must be a JSON object".into()))?;
        match obj.remove("schema").map(|v| v.as_u64()) {
            Some(Some(SCHEMA_VERSION)) => {}
            Some(_) => return Err(CliError::Spec(format!("unsupported schema, expected \"schema\": {SCHEMA_VERSION}"))),
            None => return Err(CliError::Spec("missing \"schema\" field".into())),
        }
        let marginals = match obj.remove("marginals") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => Some(serde_json::from_value(v).map_err(|e| CliError::Spec(format!("marginals: {e}")))?),
        };
        let kind = serde_json::from_value(value).map_err(|e| CliError::Spec(e.to_string()))?;
        Ok(Self { kind, marginals })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Spec(msg) => CliError::Spec(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(&self.kind).expect("spec serializes");
        let obj = value.as_object_mut().expect("tagged enum is an object");
        obj.insert("schema".into(), SCHEMA_VERSION.into());
        if let Some(m) = &self.marginals {
            obj.insert("marginals".into(), serde_json::to_value(m).expect("marginals serialize"));
        }
        serde_json::to_string(&value).expect("value serializes")
    }

    /// Constructs the model, validating parameters in the owning constructor.
    /// A rejected parameter is a spec error.
    pub fn build(&self) -> CliResult<LoadedModel> {
        self.build_unchecked().map_err(|e| match e {
            CliError::Library(e) => CliError::Spec(format!("invalid parameters: {e}")),
            other => other,
        })
    }

    fn build_unchecked(&self) -> CliResult<LoadedModel> {
        let model = build_kind(&self.kind, self.marginals.as_deref())?;
        let marginals = match (&self.kind, &self.marginals) {
            (ModelKind::Prop { .. } | ModelKind::MultiProp { .. }, _) | (_, None) => None,
            (_, Some(m)) => {
                if m.len() != hazdep::SurvivalOracle::dim(&model) {
                    return Err(CliError::Spec(format!(
                        "{} marginals given for a {}-dimensional model",
                        m.len(),
                        hazdep::SurvivalOracle::dim(&model)
                    )));
                }
                Some(m.iter().map(MarginalSpec::build).collect::<CliResult<Vec<_>>>()?)
            }
        };
        Ok(LoadedModel { model, marginals })
    }
}

fn build_kind(kind: &ModelKind, marginals: Option<&[MarginalSpec]>) -> CliResult<Model> {
    Ok(match kind {
        ModelKind::Clayton { dim } => LaplaceModel::clayton(*dim)?.into(),
        ModelKind::Frank { theta } => FrankModel::new(*theta)?.into(),
        ModelKind::Invgauss { theta, dim } => {
            LaplaceModel::shared_from_generator(Generator::inverse_gaussian(*theta)?, *dim)?.into()
        }
        ModelKind::SharedGamma { shape, dim } => LaplaceModel::shared_from_generator(Generator::gamma(*shape)?, *dim)?.into(),
        ModelKind::Chisq3 { rho, sd, covariance } => {
            let params = match (rho, sd, covariance) {
                (Some(r), None, None) => TrivariateChiSqParams::from_correlations(*r)?,
                (Some(r), Some(s), None) => TrivariateChiSqParams::from_scaled_correlations(*s, *r)?,
                (None, None, Some(rows)) => TrivariateChiSqParams::from_rows(rows)?,
                _ => return Err(CliError::Spec("chisq3 needs either `rho` (optionally with `sd`) or `covariance`".into())),
            };
            LaplaceModel::chisq3(&params)?.into()
        }
        ModelKind::Lognormal { covariance } => LaplaceModel::lognormal(Covariance::from_rows(covariance)?)?.into(),
        ModelKind::CompoundPoisson { drift, atoms } => {
            let atoms = atoms.iter().map(|a| Atom { c: a.c, x: a.x.clone() }).collect();
            LaplaceModel::compound_poisson(LevyTriplet::new(drift.clone(), atoms)?)?.into()
        }
        ModelKind::Prop { beta } => {
            let m = prop_marginals(2, marginals)?;
            PropModel::multivariate(m, &[((0, 1), *beta)])?.into()
        }
        ModelKind::MultiProp { dim, pairs } => {
            let m = prop_marginals(*dim, marginals)?;
            let mut zero_based = Vec::with_capacity(pairs.len());
            for p in pairs {
                let [i, j] = p.pair;
                if i == 0 || j == 0 {
                    return Err(CliError::Spec(format!("pair indices are one-based, got [{i}, {j}]")));
                }
                zero_based.push(((i - 1, j - 1), p.beta));
            }
            PropModel::multivariate(m, &zero_based)?.into()
        }
        ModelKind::Minid { dim, atoms, uniform_margin_boundary } => {
            let atoms = atoms.iter().map(|a| MassPoint { w: a.w, p: a.p.clone() }).collect();
            DiscreteExponentMeasure::new(*dim, atoms, *uniform_margin_boundary)?.into()
        }
        ModelKind::ScoreCopula { terms, theta } => copula_family(score_from_spec(terms)?, *theta)?.into(),
    })
}

fn prop_marginals(d: usize, marginals: Option<&[MarginalSpec]>) -> CliResult<Vec<Marginal>> {
    match marginals {
        None => Ok(vec![Marginal::Exponential { rate: 1.0 }; d]),
        Some(m) if m.len() == d => m.iter().map(MarginalSpec::build).collect(),
        Some(m) => Err(CliError::Spec(format!("{} marginals given for a {d}-dimensional model", m.len()))),
    }
}

pub fn score_from_spec(terms: &[TermSpec]) -> CliResult<ScoreFunction<f64>> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let factors = t
            .factors
            .iter()
            .map(|f| match f {
                ComponentSpec::LegendreOdd { degree } => Component::legendre_odd(*degree),
                ComponentSpec::Grid { values } => Component::grid(values.clone()),
            })
            .collect::<hazdep::Result<Vec<_>>>()?;
        out.push(ScoreTerm { coef: t.coef, factors });
    }
    Ok(ScoreFunction::new(out)?)
}

/// A model together with optional replacement marginals.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: Model,
    pub marginals: Option<Vec<Marginal>>,
}

impl LoadedModel {
    /// Runs `f` on the model as seen through its final marginals.
    pub fn with_model<R>(&self, f: impl FnOnce(&dyn HazardModel) -> R) -> R {
        match &self.marginals {
            None => f(&self.model),
            Some(m) => f(&Remarginalized::new(&self.model, m.clone())),
        }
    }

    pub fn label(&self) -> String {
        self.with_model(|m| m.label())
    }

    pub fn dim(&self) -> usize {
        hazdep::SurvivalOracle::dim(&self.model)
    }
}
