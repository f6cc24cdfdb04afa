//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! tolerance = 5e-3
//!
//! [metric]
//! name = "randers_torus"
//! params = { b0 = 0.2, b1 = 0.1 }
//!
//! [connection]
//! kind = "perturbed"
//! c = 0.1
//!
//! [field]
//! name = "torus_pair_a"
//! compare = "torus_pair_b"
//!
//! [quadrature]
//! grid = 200
//! epsilons = [0.08, 0.04, 0.02, 0.01]
//!
//! [lemmas]
//! points = 100
//! metrics = [{ name = "round_sphere" }, { name = "randers_torus", params = { dim = 3 } }]
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every key is optional; missing ones take the defaults below.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{GbcError, Result};
use crate::finsler::Metric;
use crate::lemmas::LemmaSettings;
use crate::verify::{EstimateFlavor, QuadratureSpec, VectorField};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl MetricConfig {
    pub fn resolve(&self) -> Result<Metric> {
        Metric::from_name(&self.name, &self.params)
    }
}

impl From<&Metric> for MetricConfig {
    fn from(m: &Metric) -> Self {
        MetricConfig { name: m.name().into(), params: m.params() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub name: String,
    /// A second field whose estimate must agree with the first.
    pub compare: Option<String>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { name: "sphere_dipole".into(), compare: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaConfig {
    pub metrics: Vec<MetricConfig>,
    pub points: usize,
    pub t_grid: Vec<f64>,
    pub perturbation: f64,
    pub tolerance: f64,
    pub t_step: f64,
    pub fd_points: usize,
    pub fiber_order: usize,
    pub corrupt_connection: f64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        let s = LemmaSettings::default();
        LemmaConfig {
            // the surface zoo plus one three-dimensional entry for the odd-n rows
            metrics: Metric::zoo()
                .iter()
                .chain(std::iter::once(&Metric::RandersTorus { dim: 3, b0: 0.2, b1: 0.1 }))
                .map(MetricConfig::from)
                .collect(),
            points: s.points,
            t_grid: s.t_grid,
            perturbation: s.perturbation,
            tolerance: s.tolerance,
            t_step: s.t_step,
            fd_points: s.fd_points,
            fiber_order: s.fiber_order,
            corrupt_connection: s.corrupt_connection,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem; the runner writes `<stem>.json` and `<stem>.csv`.
    pub stem: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), stem: "report".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Pass threshold for `|estimate − χ/vol(S¹)|` and for the field comparison.
    pub tolerance: f64,
    /// Worker threads; `None` uses all cores.
    pub threads: Option<usize>,
    pub metric: MetricConfig,
    pub connection: EstimateFlavor,
    pub field: FieldConfig,
    pub quadrature: QuadratureSpec,
    pub lemmas: LemmaConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            tolerance: 5e-3,
            threads: None,
            metric: MetricConfig { name: "round_sphere".into(), params: BTreeMap::new() },
            connection: EstimateFlavor::Cartan,
            field: FieldConfig::default(),
            quadrature: QuadratureSpec::default(),
            lemmas: LemmaConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// A config with every name resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub metric: Metric,
    pub fields: Vec<VectorField>,
    pub lemma_metrics: Vec<Metric>,
    pub lemma_settings: LemmaSettings,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| GbcError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GbcError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| GbcError::Config(e.to_string()))
    }

    /// Resolve names against the zoo and check every parameter.
    pub fn resolve(&self) -> Result<Resolved> {
        if !(self.tolerance > 0.0) || !(self.lemmas.tolerance > 0.0) {
            return Err(GbcError::Config("tolerances must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(GbcError::Config("threads must be at least 1".into()));
        }
        if let EstimateFlavor::Perturbed { c } = self.connection {
            if !c.is_finite() {
                return Err(GbcError::Config("perturbation strength must be finite".into()));
            }
        }
        self.quadrature.validate()?;
        let metric = self.metric.resolve()?;
        let mut fields = vec![VectorField::from_name(&self.field.name)?];
        if let Some(c) = &self.field.compare {
            fields.push(VectorField::from_name(c)?);
        }
        for f in &fields {
            f.check_compatible(&metric)?;
        }
        let lemma_metrics = self.lemmas.metrics.iter().map(MetricConfig::resolve).collect::<Result<Vec<_>>>()?;
        let l = &self.lemmas;
        if l.points == 0 || l.t_grid.is_empty() || !(l.t_step > 0.0) {
            return Err(GbcError::Config("lemma run needs points, a t-grid and a positive t-step".into()));
        }
        let lemma_settings = LemmaSettings {
            points: l.points,
            seed: self.seed,
            t_grid: l.t_grid.clone(),
            perturbation: l.perturbation,
            tolerance: l.tolerance,
            t_step: l.t_step,
            fd_points: l.fd_points,
            fiber_order: l.fiber_order,
            corrupt_connection: l.corrupt_connection,
        };
        Ok(Resolved { metric, fields, lemma_metrics, lemma_settings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(ExperimentConfig::from_toml("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::default();
        c.metric = MetricConfig { name: "randers_torus".into(), params: [("b0".to_string(), 0.2)].into() };
        c.connection = EstimateFlavor::Perturbed { c: 0.1 };
        c.field = FieldConfig { name: "torus_pair_a".into(), compare: Some("torus_pair_b".into()) };
        c.threads = Some(3);
        c.quadrature.epsilons = vec![0.1, 0.05];
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
        c.resolve().unwrap();
    }

    #[test]
    fn documented_example_parses() {
        let text = "seed = 3\n[metric]\nname = \"randers_torus\"\nparams = { b0 = 0.2, b1 = 0.1 }\n\
                    [connection]\nkind = \"perturbed\"\nc = 0.1\n[field]\nname = \"torus_pair_a\"\n";
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.connection, EstimateFlavor::Perturbed { c: 0.1 });
        assert_eq!(c.resolve().unwrap().metric, Metric::RandersTorus { dim: 2, b0: 0.2, b1: 0.1 });
    }

    #[test]
    fn bad_names_and_parameters_are_config_errors() {
        let cases = [
            "[metric]\nname = \"hyperbolic_disk\"",
            "[metric]\nname = \"randers_torus\"\nparams = { b0 = 0.7, b1 = 0.4 }",
            "[metric]\nname = \"randers_torus\"\nparams = { wind = 0.1 }",
            "[field]\nname = \"torus_pair_a\"",
            "[field]\nname = \"spiral\"",
            "colour = 1",
        ];
        for text in cases {
            let res = ExperimentConfig::from_toml(text).and_then(|c| c.resolve().map(|_| ()));
            assert!(res.is_err(), "{text}");
        }
    }
}
