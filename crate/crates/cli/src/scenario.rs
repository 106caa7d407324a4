//! Scenario files: JSON descriptions of an operator model, its rank-one
//! perturbation data, the α values to study and the search annulus.
//!
//! Indices in scenario files are 1-based, matching the basis `e₁, e₂, …`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use quasispec_core::moments::{default_horizon, DEFAULT_MOMENT_TAU};
use quasispec_core::rootfinder::Annulus;
use quasispec_core::{Functional, ModelKind, OperatorModel, RankOnePerturbation, RankOneProblem, Vector};

use crate::error::CliError;

/// Truncations used by `trend` when the scenario does not list its own.
pub const DEFAULT_TREND_DIMS: [usize; 4] = [25, 50, 100, 200];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub operator: OperatorSpec,
    pub perturbation: PerturbationSpec,
    pub alphas: Vec<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annulus: Option<AnnulusSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend_dims: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorType {
    WeightedShift,
    DenseTriangular,
    Volterra,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(rename = "type")]
    pub kind: OperatorType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSpec>,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Coordinates `1/n`.
    OneOverN,
    /// All coordinates 1.
    Ones,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Named(Generator),
    Values(Vec<ScalarSpec>),
}

/// A real number or a `{re, im}` object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Real(f64),
    Complex(ComplexSpec),
}

impl ScalarSpec {
    pub fn value(self) -> Complex64 {
        match self {
            ScalarSpec::Real(x) => Complex64::new(x, 0.0),
            ScalarSpec::Complex(c) => c.value(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    pub im: f64,
}

impl ComplexSpec {
    pub fn value(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexSpec {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// A vector or functional: a generator, a 1-based basis index (vectors
/// only), or sparse `{"index": value}` coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordsSpec {
    Basis(usize),
    Named(Generator),
    Sparse(BTreeMap<String, ScalarSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub e_star: CoordsSpec,
    pub f: CoordsSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusSpec {
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Moment horizon `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_tau: Option<f64>,
    /// Relative root ↔ oracle matching tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_rel: Option<f64>,
    /// Radius above which roots and oracle eigenvalues are cross-checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_radius: Option<f64>,
}

/// Parses and validates a scenario. Errors carry the JSON path of the
/// offending value.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario, CliError> {
    let mut de = serde_json::Deserializer::from_slice(text);
    let scenario: Scenario = serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Parse {
        path: json_path(&e.path().to_string()),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| CliError::Parse {
        path: "$".into(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn json_path(p: &str) -> String {
    if p.is_empty() || p == "." {
        "$".into()
    } else {
        format!("$.{p}")
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation {
        path: path.into(),
        message: message.into(),
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), CliError> {
        let op = &self.operator;
        if op.dim == 0 {
            return Err(invalid("$.operator.dim", "dimension must be positive"));
        }
        match (op.kind, &op.weights) {
            (OperatorType::WeightedShift, None) => {
                return Err(invalid("$.operator.weights", "weighted_shift needs weights"));
            }
            (OperatorType::WeightedShift, Some(WeightsSpec::Values(w))) if w.len() + 1 < op.dim => {
                return Err(invalid(
                    "$.operator.weights",
                    format!("{} weights given, dimension {} needs {}", w.len(), op.dim, op.dim - 1),
                ));
            }
            (OperatorType::WeightedShift, Some(WeightsSpec::Named(Generator::Ones))) => {}
            (OperatorType::DenseTriangular | OperatorType::Volterra, Some(_)) => {
                return Err(invalid("$.operator.weights", "weights only apply to weighted_shift"));
            }
            _ => {}
        }
        if op.seed.is_some() && op.kind != OperatorType::DenseTriangular {
            return Err(invalid("$.operator.seed", "seed only applies to dense_triangular"));
        }
        if let Some(WeightsSpec::Values(w)) = &op.weights {
            for (i, s) in w.iter().enumerate() {
                check_scalar(s.value(), &format!("$.operator.weights[{i}]"))?;
            }
        }
        if let CoordsSpec::Basis(_) = self.perturbation.e_star {
            return Err(invalid(
                "$.perturbation.e_star",
                "a functional needs a generator or sparse coordinates",
            ));
        }
        check_coords(&self.perturbation.e_star, op.dim, "$.perturbation.e_star")?;
        check_coords(&self.perturbation.f, op.dim, "$.perturbation.f")?;
        if self.alphas.is_empty() {
            return Err(invalid("$.alphas", "at least one alpha is required"));
        }
        for (i, a) in self.alphas.iter().enumerate() {
            check_alpha(a.value(), &format!("$.alphas[{i}]"))?;
        }
        if let Some(a) = self.annulus {
            check_annulus(a, "$.annulus")?;
        }
        if let Some(t) = self.tolerances {
            if t.horizon == Some(0) {
                return Err(invalid("$.tolerances.horizon", "horizon must be positive"));
            }
            for (name, v) in [
                ("moment_tau", t.moment_tau),
                ("match_rel", t.match_rel),
                ("check_radius", t.check_radius),
            ] {
                if let Some(x) = v {
                    if !(x.is_finite() && x > 0.0) {
                        return Err(invalid(format!("$.tolerances.{name}"), "must be a positive number"));
                    }
                }
            }
        }
        if self.oracle_dim == Some(0) {
            return Err(invalid("$.oracle_dim", "dimension must be positive"));
        }
        if let Some(dims) = &self.trend_dims {
            if dims.is_empty() || dims[0] == 0 || dims.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(
                    "$.trend_dims",
                    "dimensions must be positive and strictly increasing",
                ));
            }
        }
        Ok(())
    }

    /// The rank-one problem truncated at `dim`.
    pub fn problem_at(&self, dim: usize) -> Result<RankOneProblem, CliError> {
        let op = &self.operator;
        let kind = match op.kind {
            OperatorType::WeightedShift => match op.weights.as_ref().expect("validated") {
                WeightsSpec::Named(Generator::OneOverN) => {
                    ModelKind::WeightedShift(quasispec_core::operators::Weights::OneOverN)
                }
                WeightsSpec::Named(Generator::Ones) => {
                    ModelKind::WeightedShift(quasispec_core::operators::Weights::Explicit(vec![
                        Complex64::new(
                            1.0, 0.0
                        );
                        dim.max(1) - 1
                    ]))
                }
                WeightsSpec::Values(w) => ModelKind::WeightedShift(quasispec_core::operators::Weights::Explicit(
                    w.iter().map(|s| s.value()).collect(),
                )),
            },
            OperatorType::DenseTriangular => ModelKind::DenseStrictlyLowerTriangular(
                quasispec_core::operators::DenseSource::Seeded(op.seed.unwrap_or(0)),
            ),
            OperatorType::Volterra => ModelKind::VolterraQuadrature,
        };
        let model = OperatorModel::new(kind, dim).map_err(|e| CliError::module("operators", e))?;
        let e_star = functional(&self.perturbation.e_star, dim)?;
        let f = vector(&self.perturbation.f, dim)?;
        let pert = RankOnePerturbation::new(e_star, f).map_err(|e| CliError::module("operators", e))?;
        RankOneProblem::new(model, pert).map_err(|e| CliError::module("operators", e))
    }

    pub fn problem(&self) -> Result<RankOneProblem, CliError> {
        self.problem_at(self.operator.dim)
    }

    pub fn alpha_values(&self) -> Vec<Complex64> {
        self.alphas.iter().map(|a| a.value()).collect()
    }

    /// The scenario annulus, or `[0.1, 4]·max(1, ‖f‖‖e*‖)` when absent.
    pub fn annulus_for(&self, problem: &RankOneProblem) -> Result<Annulus, CliError> {
        let a = self.annulus.unwrap_or_else(|| {
            let s = problem.radius_scale();
            AnnulusSpec {
                r_min: 0.1 * s,
                r_max: 4.0 * s,
            }
        });
        Annulus::new(a.r_min, a.r_max).map_err(|e| CliError::module("rootfinder", e))
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    pub fn horizon(&self) -> usize {
        self.tolerances()
            .horizon
            .unwrap_or_else(|| default_horizon(self.operator.dim))
    }

    pub fn moment_tau(&self) -> f64 {
        self.tolerances().moment_tau.unwrap_or(DEFAULT_MOMENT_TAU)
    }

    pub fn oracle_dim(&self) -> usize {
        self.oracle_dim.unwrap_or(self.operator.dim)
    }

    pub fn trend_dims(&self) -> Vec<usize> {
        self.trend_dims.clone().unwrap_or_else(|| DEFAULT_TREND_DIMS.to_vec())
    }
}

fn check_scalar(z: Complex64, path: &str) -> Result<(), CliError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, "value must be finite"))
    }
}

pub fn check_alpha(z: Complex64, path: &str) -> Result<(), CliError> {
    check_scalar(z, path)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(invalid(
            path,
            "alpha must be nonzero: eigenvalues of T + alpha F are characterised as solutions of g(z) = 1/alpha",
        ));
    }
    Ok(())
}

pub fn check_annulus(a: AnnulusSpec, path: &str) -> Result<(), CliError> {
    if !(a.r_min.is_finite() && a.r_max.is_finite() && a.r_min > 0.0 && a.r_min < a.r_max) {
        return Err(invalid(
            path,
            format!("need 0 < r_min < r_max, got r_min = {}, r_max = {}", a.r_min, a.r_max),
        ));
    }
    Ok(())
}

fn check_coords(spec: &CoordsSpec, dim: usize, path: &str) -> Result<(), CliError> {
    match spec {
        CoordsSpec::Basis(k) => {
            if *k == 0 || *k > dim {
                return Err(invalid(path, format!("basis index {k} outside 1..={dim}")));
            }
        }
        CoordsSpec::Named(_) => {}
        CoordsSpec::Sparse(map) => {
            if map.is_empty() {
                return Err(invalid(path, "sparse coordinates are empty"));
            }
            for (key, value) in map {
                let here = format!("{path}.{key}");
                let k: usize = key
                    .parse()
                    .map_err(|_| invalid(&here, "index must be a positive integer"))?;
                if k == 0 || k > dim {
                    return Err(invalid(&here, format!("index {k} outside 1..={dim}")));
                }
                check_scalar(value.value(), &here)?;
            }
        }
    }
    Ok(())
}

fn coords(spec: &CoordsSpec, dim: usize) -> Result<Vec<Complex64>, CliError> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    match spec {
        CoordsSpec::Basis(k) => {
            if *k == 0 || *k > dim {
                return Err(invalid("$.perturbation", format!("basis index {k} outside 1..={dim}")));
            }
            out[k - 1] = Complex64::new(1.0, 0.0);
        }
        CoordsSpec::Named(Generator::OneOverN) => {
            for (n, c) in out.iter_mut().enumerate() {
                *c = Complex64::new(1.0 / (n + 1) as f64, 0.0);
            }
        }
        CoordsSpec::Named(Generator::Ones) => out.fill(Complex64::new(1.0, 0.0)),
        CoordsSpec::Sparse(map) => {
            for (key, value) in map {
                let k: usize = key.parse().map_err(|_| invalid("$.perturbation", "bad sparse index"))?;
                if k == 0 || k > dim {
                    return Err(invalid("$.perturbation", format!("index {k} outside 1..={dim}")));
                }
                out[k - 1] = value.value();
            }
        }
    }
    Ok(out)
}

fn functional(spec: &CoordsSpec, dim: usize) -> Result<Functional, CliError> {
    if let CoordsSpec::Named(Generator::OneOverN) = spec {
        return Ok(Functional::one_over_n(dim));
    }
    Functional::new(coords(spec, dim)?).map_err(|e| CliError::module("operators", e))
}

fn vector(spec: &CoordsSpec, dim: usize) -> Result<Vector, CliError> {
    Vector::new(coords(spec, dim)?).map_err(|e| CliError::module("operators", e))
}

/// Parses a complex literal such as `2`, `-1.5`, `i`, `-2i`, `0.5+1e-3i` or `1-i`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {text:?} as a complex number (expected RE, IMi or RE+IMi)");
    let imag = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match s.strip_suffix('i') {
        None => Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            // The split point is the last sign that is not part of an exponent.
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
            match split {
                Some(k) => Complex64::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?),
                None => Complex64::new(0.0, imag(body)?),
            }
        }
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_literals() {
        let c = Complex64::new;
        assert_eq!(parse_complex("2"), Ok(c(2.0, 0.0)));
        assert_eq!(parse_complex("-1.5"), Ok(c(-1.5, 0.0)));
        assert_eq!(parse_complex("i"), Ok(c(0.0, 1.0)));
        assert_eq!(parse_complex("-2i"), Ok(c(0.0, -2.0)));
        assert_eq!(parse_complex("0.5+1e-3i"), Ok(c(0.5, 1e-3)));
        assert_eq!(parse_complex("1e-2-i"), Ok(c(1e-2, -1.0)));
        assert_eq!(parse_complex("-1 + 2i"), Ok(c(-1.0, 2.0)));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("inf").is_err());
    }
}
