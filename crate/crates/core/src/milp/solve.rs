//! Solver backend contract and the HiGHS implementation. Backends receive the
//! whole model and return either a feasible assignment with objective and
//! bound gap, or an infeasible/timeout status.

use std::time::Duration;

use super::model::{MilpModel, Sense, VarKind};
use super::MilpError;

#[derive(Clone, Copy, Debug)]
pub struct BackendCaps {
    pub integer_variables: bool,
    pub relative_gap: bool,
    pub time_limit: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub relative_gap: f64,
    pub time_limit: Option<Duration>,
    /// Thread count; 1 keeps runs reproducible.
    pub threads: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            relative_gap: 0.0,
            time_limit: None,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub values: Vec<f64>,
    /// Objective including the model's constant term.
    pub objective: f64,
    pub gap: Option<f64>,
    pub proven_optimal: bool,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solved(Solution),
    Infeasible { hint: Option<String> },
    Timeout { incumbent: Option<Solution> },
}

pub trait SolverBackend {
    fn name(&self) -> &str;
    fn capabilities(&self) -> BackendCaps;
    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<SolveOutcome, MilpError>;
}

/// Validates the model, checks backend capabilities, runs the backend, and
/// audits any returned assignment against every constraint (tolerance 1e-6).
/// An empty model succeeds trivially.
pub fn solve(
    model: &MilpModel,
    backend: &dyn SolverBackend,
    opts: &SolveOptions,
) -> Result<SolveOutcome, MilpError> {
    model.validate()?;
    if model.vars().is_empty() {
        return Ok(SolveOutcome::Solved(Solution {
            values: Vec::new(),
            objective: model.objective_constant,
            gap: Some(0.0),
            proven_optimal: true,
        }));
    }
    let caps = backend.capabilities();
    if model.has_integrality() && !caps.integer_variables {
        return Err(MilpError::UnsupportedModel {
            backend: backend.name().to_string(),
            reason: "model has integer variables".into(),
        });
    }
    let outcome = backend.solve(model, opts)?;
    if let SolveOutcome::Solved(sol) | SolveOutcome::Timeout { incumbent: Some(sol) } = &outcome {
        let violations = model.check_assignment(&sol.values, 1e-6);
        if !violations.is_empty() {
            return Err(MilpError::SolutionRejected(violations));
        }
    }
    Ok(outcome)
}

/// HiGHS-backed MILP solving, single-threaded for determinism.
#[derive(Default)]
pub struct HighsBackend;

impl SolverBackend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn capabilities(&self) -> BackendCaps {
        BackendCaps {
            integer_variables: true,
            relative_gap: true,
            time_limit: true,
        }
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<SolveOutcome, MilpError> {
        use highs::{HighsModelStatus, RowProblem, Sense as HSense};

        let mut problem = RowProblem::default();
        let objective: std::collections::HashMap<usize, f64> =
            model.objective().iter().copied().collect();
        let mut cols = Vec::with_capacity(model.vars().len());
        for (i, def) in model.vars().iter().enumerate() {
            let cost = objective.get(&i).copied().unwrap_or(0.0);
            let col = match def.kind {
                VarKind::Continuous => problem.add_column(cost, def.lower..=def.upper),
                VarKind::Binary | VarKind::Integer => {
                    problem.add_integer_column(cost, def.lower..=def.upper)
                }
            };
            cols.push(col);
        }
        for c in model.constraints() {
            let terms: Vec<_> = c.terms.iter().map(|&(v, k)| (cols[v], k)).collect();
            match c.sense {
                Sense::Le => problem.add_row(..=c.rhs, &terms),
                Sense::Ge => problem.add_row(c.rhs.., &terms),
                Sense::Eq => problem.add_row(c.rhs..=c.rhs, &terms),
            };
        }

        let mut highs_model = problem.optimise(HSense::Minimise);
        highs_model.make_quiet();
        highs_model.set_option("threads", i32::try_from(opts.threads).unwrap_or(1));
        // Deterministic single-thread run even when threads were requested.
        if opts.threads != 1 {
            log::debug!("running HiGHS single-threaded for reproducibility");
            highs_model.set_option("threads", 1);
        }
        if opts.relative_gap > 0.0 {
            highs_model.set_option("mip_rel_gap", opts.relative_gap);
        }
        if let Some(limit) = opts.time_limit {
            highs_model.set_option("time_limit", limit.as_secs_f64());
        }

        let solved = highs_model.solve();
        let status = solved.status();
        let gap = {
            let g = solved.mip_gap();
            if g.is_finite() {
                Some(g)
            } else {
                None
            }
        };
        match status {
            HighsModelStatus::Optimal => {
                let solution = solved.get_solution();
                Ok(SolveOutcome::Solved(Solution {
                    values: solution.columns().to_vec(),
                    objective: solved.objective_value() + model.objective_constant,
                    gap,
                    proven_optimal: gap.map_or(true, |g| g <= 1e-9),
                }))
            }
            HighsModelStatus::Infeasible => Ok(SolveOutcome::Infeasible {
                hint: Some("presolve or dual proof of infeasibility".into()),
            }),
            HighsModelStatus::UnboundedOrInfeasible | HighsModelStatus::Unbounded => {
                Ok(SolveOutcome::Infeasible {
                    hint: Some(format!("solver status {status:?}")),
                })
            }
            HighsModelStatus::ReachedTimeLimit => {
                let has_primal = solved.primal_solution_status()
                    == highs::HighsSolutionStatus::Feasible;
                let incumbent = has_primal.then(|| {
                    let solution = solved.get_solution();
                    Solution {
                        values: solution.columns().to_vec(),
                        objective: solved.objective_value() + model.objective_constant,
                        gap,
                        proven_optimal: false,
                    }
                });
                Ok(SolveOutcome::Timeout { incumbent })
            }
            other => Err(MilpError::Backend(format!("unexpected solver status {other:?}"))),
        }
    }
}
