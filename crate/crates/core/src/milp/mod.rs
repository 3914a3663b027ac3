//! MILP layout planning: a K-linear coordinate system in which every edge
//! runs parallel to one of K equiangular axes, cyclic-order and sector
//! constraints preserving relative positions, minimum edge lengths, staged
//! planarity separation, and a weighted objective trading off relative
//! position, orthogonality, and edge-length evenness.

mod build;
mod model;
mod plan;
mod solve;

pub use build::{build_model, derive_sectors, suggest_params, SectorMap};
pub use model::{Constraint, MilpModel, ModelStats, Sense, VarDef, VarId, VarKind};
pub use plan::{audit_layout, extract_layout, iterative_plan, LayoutAudit, RoundLog};
pub use solve::{solve, BackendCaps, HighsBackend, Solution, SolveOptions, SolveOutcome, SolverBackend};

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("invalid planner config: {0}")]
    Config(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("backend {backend} cannot solve this model: {reason}")]
    UnsupportedModel { backend: String, reason: String },
    #[error("model infeasible{}", hint.as_deref().map(|h| format!(": {h}")).unwrap_or_default())]
    Infeasible { hint: Option<String> },
    #[error("solver hit the time limit without an incumbent")]
    Timeout,
    #[error("solution failed the feasibility audit: {0:?}")]
    SolutionRejected(Vec<String>),
    #[error("planning failed in round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<MilpError>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("solver backend error: {0}")]
    Backend(String),
}

/// How much sector slack each edge direction gets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flexibility {
    /// The same margin for every edge.
    Scalar(u32),
    /// Per endpoint `ceil((degree - 1) / 2)`, taking the larger end.
    PerNode,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub rp: f64,
    pub or: f64,
    pub ev: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            rp: 0.1,
            or: 0.4,
            ev: 0.5,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Number of axes; the plane splits into 2K sectors.
    pub k: u32,
    pub flexibility: Flexibility,
    /// Minimum edge length along its axis.
    pub min_edge_length: f64,
    /// Minimum separation margin for planarity-constrained edge pairs.
    pub min_separation: f64,
    pub weights: Weights,
    /// Relative MIP gap at which a round counts as converged.
    pub relative_gap: f64,
    /// Per-round solver time limit.
    pub time_limit: Option<Duration>,
    pub max_rounds: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            k: 4,
            flexibility: Flexibility::Scalar(1),
            min_edge_length: 2.0,
            min_separation: 1.0,
            weights: Weights::default(),
            relative_gap: 0.30,
            time_limit: None,
            max_rounds: 10,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), MilpError> {
        if self.k < 2 {
            return Err(MilpError::Config(format!("K must be at least 2, got {}", self.k)));
        }
        if self.min_edge_length <= 0.0 {
            return Err(MilpError::Config("minimum edge length must be positive".into()));
        }
        if self.min_separation <= 0.0 {
            return Err(MilpError::Config("minimum separation must be positive".into()));
        }
        let w = &self.weights;
        if w.rp < 0.0 || w.or < 0.0 || w.ev < 0.0 {
            return Err(MilpError::Config("weights must be non-negative".into()));
        }
        if (w.rp + w.or + w.ev - 1.0).abs() > 1e-9 {
            return Err(MilpError::Config(format!(
                "weights must sum to 1, got {}",
                w.rp + w.or + w.ev
            )));
        }
        if let Flexibility::Scalar(s) = self.flexibility {
            if s < 1 {
                return Err(MilpError::Config("flexibility margin must be at least 1".into()));
            }
        }
        if !(0.0..1.0).contains(&self.relative_gap) {
            return Err(MilpError::Config("relative gap must be in [0, 1)".into()));
        }
        if self.max_rounds == 0 {
            return Err(MilpError::Config("at least one planning round is required".into()));
        }
        Ok(())
    }
}
