//! Declarative experiment configuration (TOML) with validation and hashing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::targets::TargetFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    L2MinVariational,
    L2Regression,
    EllipticVariational,
    EllipticCollocation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    pub problem: ProblemKind,
    pub activation: String,
    pub target: String,
    pub dimension: usize,
    pub neuron_counts: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsetSection {
    pub scheme: String,
    /// Box half-width R for random_box.
    pub half_width: Option<f64>,
    /// Fixed sphere radius for sphere_scheme.
    pub radius: Option<f64>,
    /// Radii tried per n; rows are emitted per (n, radius).
    pub radius_sweep: Option<Vec<f64>>,
    /// Petrushev weight-sphere radius.
    pub r1: Option<f64>,
    /// Petrushev bias-grid half-width.
    pub r2: Option<f64>,
    pub eps: Option<f64>,
    pub skip: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default = "default_quad_kind")]
    pub kind: String,
    pub cells_per_axis: Option<usize>,
    pub order: Option<usize>,
    /// QMC point count.
    pub n: Option<usize>,
    pub skip: Option<usize>,
}

fn default_quad_kind() -> String {
    "tensor".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollocationSection {
    pub per_axis: usize,
    #[serde(default = "default_true")]
    pub include_boundary: bool,
    #[serde(default = "default_boundary")]
    pub boundary: String,
    #[serde(default = "default_penalty")]
    pub lambda_interior: f64,
    #[serde(default = "default_penalty")]
    pub lambda_boundary: f64,
}

fn default_true() -> bool {
    true
}

fn default_boundary() -> String {
    "none".to_string()
}

fn default_penalty() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// Negative means the built-in default cutoff.
    #[serde(default = "default_rcond")]
    pub rcond: f64,
}

fn default_rcond() -> f64 {
    -1.0
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            rcond: default_rcond(),
        }
    }
}

/// Heavier quadrature settings applied only when paper-scale is requested.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperScaleSection {
    pub cells_per_axis: Option<usize>,
    pub order: Option<usize>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub pointset: PointsetSection,
    pub quadrature: Option<QuadratureSection>,
    pub error_quadrature: Option<QuadratureSection>,
    pub collocation: Option<CollocationSection>,
    #[serde(default)]
    pub solver: SolverSection,
    pub paper_scale: Option<PaperScaleSection>,
}

const SCHEMES: &[&str] = &[
    "circle_grid",
    "fibonacci_sphere",
    "random_sphere",
    "qmc_sphere",
    "random_box",
    "petrushev_grid",
    "sphere_scheme",
];

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn activation(&self) -> Result<Activation> {
        self.experiment.activation.parse()
    }

    pub fn target(&self) -> Result<TargetFunction> {
        self.experiment.target.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.name.is_empty() {
            return Err(Error::Config("experiment.name must be non-empty".into()));
        }
        let act = self.activation()?;
        let target = self.target()?;
        if target.dim() != e.dimension {
            return Err(Error::Config(format!(
                "target dimension {} does not match experiment dimension {}",
                target.dim(),
                e.dimension
            )));
        }
        if e.neuron_counts.is_empty() {
            return Err(Error::Config("neuron_counts must be non-empty".into()));
        }
        if e.neuron_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("neuron_counts must be strictly increasing".into()));
        }
        if e.seeds.is_empty() {
            return Err(Error::Config("seeds must be non-empty".into()));
        }
        if !SCHEMES.contains(&self.pointset.scheme.as_str()) {
            return Err(Error::Config(format!(
                "unknown pointset scheme `{}`",
                self.pointset.scheme
            )));
        }
        match self.pointset.scheme.as_str() {
            "circle_grid" if e.dimension != 1 => {
                return Err(Error::Config("circle_grid requires dimension 1".into()));
            }
            "fibonacci_sphere" if e.dimension != 2 => {
                return Err(Error::Config("fibonacci_sphere requires dimension 2".into()));
            }
            "random_box" if self.pointset.half_width.is_none() => {
                return Err(Error::Config("random_box requires pointset.half_width".into()));
            }
            "sphere_scheme"
                if self.pointset.radius.is_none() && self.pointset.radius_sweep.is_none() =>
            {
                return Err(Error::Config(
                    "sphere_scheme requires pointset.radius or pointset.radius_sweep".into(),
                ));
            }
            "petrushev_grid" if self.pointset.r1.is_none() || self.pointset.r2.is_none() => {
                return Err(Error::Config("petrushev_grid requires pointset.r1 and r2".into()));
            }
            _ => {}
        }
        if let Some(sweep) = &self.pointset.radius_sweep {
            if sweep.is_empty() || sweep.iter().any(|&r| !(r > 0.0)) {
                return Err(Error::Config("radius_sweep must be positive and non-empty".into()));
            }
        }
        let needs_collocation = matches!(
            e.problem,
            ProblemKind::L2Regression | ProblemKind::EllipticCollocation
        );
        if needs_collocation && self.collocation.is_none() {
            return Err(Error::Config(
                "regression/collocation problems require a [collocation] section".into(),
            ));
        }
        let needs_quadrature = matches!(
            e.problem,
            ProblemKind::L2MinVariational | ProblemKind::EllipticVariational
        );
        if needs_quadrature && self.quadrature.is_none() {
            return Err(Error::Config(
                "variational problems require a [quadrature] section".into(),
            ));
        }
        if let Some(c) = &self.collocation {
            match c.boundary.as_str() {
                "dirichlet" | "none" => {}
                other => {
                    return Err(Error::Config(format!("unknown boundary kind `{other}`")));
                }
            }
            if !(c.lambda_interior > 0.0) || !(c.lambda_boundary > 0.0) {
                return Err(Error::Config("penalties must be strictly positive".into()));
            }
            if e.problem == ProblemKind::EllipticCollocation && c.boundary == "dirichlet" {
                if let Activation::ReluPow(1) = act {
                    return Err(Error::Config(
                        "elliptic collocation requires relu2+ or tanh".into(),
                    ));
                }
            }
        }
        for q in [&self.quadrature, &self.error_quadrature].into_iter().flatten() {
            match q.kind.as_str() {
                "tensor" => {
                    if q.cells_per_axis.is_none() || q.order.is_none() {
                        return Err(Error::Config(
                            "tensor quadrature requires cells_per_axis and order".into(),
                        ));
                    }
                }
                "qmc" => {
                    if q.n.is_none() {
                        return Err(Error::Config("qmc quadrature requires n".into()));
                    }
                }
                other => {
                    return Err(Error::Config(format!("unknown quadrature kind `{other}`")));
                }
            }
        }
        Ok(())
    }

    /// Hash of the canonical serialized form; identical configs hash equal.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for b in &digest[..8] {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    /// Radii to try per n: the sweep if given, else the fixed radius, else a
    /// single "no radius" marker.
    pub fn radii(&self) -> Vec<Option<f64>> {
        if let Some(sweep) = &self.pointset.radius_sweep {
            sweep.iter().map(|&r| Some(r)).collect()
        } else if let Some(r) = self.pointset.radius {
            vec![Some(r)]
        } else {
            vec![None]
        }
    }

    /// Whether the scheme draws random numbers (and so uses seeds).
    pub fn is_random_scheme(&self) -> bool {
        matches!(self.pointset.scheme.as_str(), "random_sphere" | "random_box")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
[experiment]
name = "demo"
problem = "elliptic_variational"
activation = "relu3"
target = "prod_sin_half_pi:d=2"
dimension = 2
neuron_counts = [88, 165]

[pointset]
scheme = "fibonacci_sphere"

[quadrature]
kind = "tensor"
cells_per_axis = 50
order = 3
"#;

    #[test]
    fn parses_and_hashes_deterministically() {
        let a = ExperimentConfig::from_toml(GOOD).unwrap();
        let b = ExperimentConfig::from_toml(GOOD).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.experiment.seeds, vec![0]);
        assert_eq!(a.radii(), vec![None]);
    }

    #[test]
    fn rejects_bad_configs() {
        // decreasing neuron counts
        let bad = GOOD.replace("[88, 165]", "[165, 88]");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        // dimension mismatch with target
        let bad = GOOD.replace("dimension = 2", "dimension = 1");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        // unknown scheme
        let bad = GOOD.replace("fibonacci_sphere", "halton_sphere");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        // missing quadrature for a variational problem
        let bad = GOOD.replace("[quadrature]", "[error_quadrature]");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        // unknown key
        let bad = format!("{GOOD}\n[solver]\nrcond = 0.0\nfoo = 1\n");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }
}
