//! The improve-parameters / improve-structure outer loop shared by
//! SX-means and the Gaussian X-means baseline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_selection::{BicScore, ComponentParams, SplitDecision};
use crate::seed::derive_seed;

/// Stopping guards for the outer loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopLimits {
    pub initial_k: usize,
    pub max_outer_iters: usize,
    /// Defaults to `max(N / 2, initial_k)` when unset.
    pub max_k: Option<usize>,
}

impl Default for LoopLimits {
    fn default() -> Self {
        LoopLimits {
            initial_k: 2,
            max_outer_iters: 50,
            max_k: None,
        }
    }
}

impl LoopLimits {
    pub(crate) fn resolve_max_k(&self, n: usize) -> Result<usize> {
        if self.initial_k == 0 {
            return Err(Error::InvalidConfig("initial_k must be at least 1".into()));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidConfig("max_outer_iters must be at least 1".into()));
        }
        if n < self.initial_k {
            return Err(Error::TooFewPoints {
                k: self.initial_k,
                n,
            });
        }
        match self.max_k {
            Some(m) if m < self.initial_k => Err(Error::InvalidConfig(format!(
                "max_k ({m}) is below initial_k ({})",
                self.initial_k
            ))),
            Some(m) => Ok(m.min(n)),
            None => Ok((n / 2).max(self.initial_k)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// A full round accepted no split.
    Converged,
    MaxK,
    MaxRounds,
}

/// Score of one cluster under the single-component model.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterFit {
    pub score: BicScore,
    pub params: ComponentParams,
    /// True when the fit fell back to a degenerate default.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub size: usize,
    pub params: ComponentParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub k_before: usize,
    pub k_after: usize,
    pub decisions: Vec<SplitDecision>,
}

impl RoundTrace {
    pub fn accepted(&self) -> usize {
        self.decisions.iter().filter(|d| d.accepted).count()
    }
}

pub(crate) struct Finalized {
    pub assignment: Vec<usize>,
    pub clusters: Vec<ClusterSummary>,
    pub notes: Vec<String>,
}

pub(crate) struct SearchOutcome {
    pub k: usize,
    pub trace: Vec<RoundTrace>,
    pub stop: StopReason,
    pub final_: Finalized,
    pub notes: Vec<String>,
}

pub(crate) trait SearchModel {
    type State;

    fn len(&self) -> usize;

    fn improve_parameters(&self, k: usize, round_seed: u64) -> Result<(Self::State, Vec<ClusterFit>)>;

    fn improve_structure(
        &self,
        state: &Self::State,
        pre: &[ClusterFit],
        round_seed: u64,
    ) -> (usize, Vec<SplitDecision>);

    /// One last clustering at `k`. `converged` carries the state of the
    /// final round when it already ran at `k`.
    fn finalize(&self, k: usize, converged: Option<Self::State>, seed: u64) -> Result<Finalized>;
}

pub(crate) fn run_search<M: SearchModel>(model: &M, limits: &LoopLimits, seed: u64) -> Result<SearchOutcome> {
    let max_k = limits.resolve_max_k(model.len())?;
    let mut k = limits.initial_k;
    let mut trace = Vec::new();
    let mut notes = Vec::new();
    let mut last_state = None;
    let stop = loop {
        if trace.len() == limits.max_outer_iters {
            break StopReason::MaxRounds;
        }
        let round = trace.len() as u64;
        let round_seed = derive_seed(seed, &[round]);
        let (state, pre) = model.improve_parameters(k, round_seed)?;
        for (j, fit) in pre.iter().enumerate() {
            if fit.fallback {
                notes.push(format!("round {round}: cluster {j} fell back to a degenerate fit"));
            }
        }
        let (k_new, decisions) = model.improve_structure(&state, &pre, round_seed);
        let k_after = k_new.min(max_k);
        trace.push(RoundTrace {
            k_before: k,
            k_after,
            decisions,
        });
        if k_new == k {
            last_state = Some(state);
            break StopReason::Converged;
        }
        k = k_after;
        if k_new >= max_k {
            if k_new > max_k {
                notes.push(format!("k capped at max_k = {max_k}"));
            }
            break StopReason::MaxK;
        }
    };
    let final_ = model.finalize(k, last_state, derive_seed(seed, &[crate::seed::TAG_FINAL]))?;
    Ok(SearchOutcome {
        k,
        trace,
        stop,
        final_,
        notes,
    })
}
