//! Restart search: sample at probability `q`, screen cheaply, and fully
//! verify the first candidate that survives every screen.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{verify_construction, Certificate, VerifyError, VerifyOptions};
use crate::hypergraph::Hypergraph;
use crate::matching::first_unmatchable_deletion;
use crate::params::{default_constant, derive_params, ConstructionParams, ParamError, Seed};
use crate::sampler::{sample_hypergraph, SampleError};
use crate::sparsity::check_sparsity_with_budget;
use crate::subsets::min_subset_edges_at_most;

/// One screening step; each is a necessary condition for robustness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// Every vertex lies in two edges and there are more than `m` edges.
    Sanity,
    Sparsity,
    Matchability,
    Subsets,
}

impl Stage {
    pub const DEFAULT_ORDER: [Stage; 4] = [Stage::Sanity, Stage::Sparsity, Stage::Matchability, Stage::Subsets];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Sanity => "sanity",
            Stage::Sparsity => "sparsity",
            Stage::Matchability => "matchability",
            Stage::Subsets => "subsets",
        }
    }

    pub fn from_name(name: &str) -> Option<Stage> {
        Stage::DEFAULT_ORDER.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct ConstructConfig {
    pub r: usize,
    pub k: usize,
    /// Defaults to `2 (s-1)!`.
    pub c: Option<f64>,
    pub seed: Seed,
    pub restarts: u64,
    /// Restarts screened per parallel batch.
    pub batch: usize,
    pub order: Vec<Stage>,
    pub verify: VerifyOptions,
    /// Verify this hypergraph instead of sampling.
    pub instance: Option<Hypergraph>,
}

impl ConstructConfig {
    pub fn new(r: usize, k: usize, seed: Seed) -> Self {
        ConstructConfig {
            r,
            k,
            c: None,
            seed,
            restarts: 10_000,
            batch: 64,
            order: Stage::DEFAULT_ORDER.to_vec(),
            verify: VerifyOptions::default(),
            instance: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("restart budget must be positive")]
    NoRestarts,
    #[error("screening order must list each stage at most once")]
    BadOrder,
}

#[derive(Debug, Clone)]
pub struct ConstructReport {
    pub success: bool,
    pub certificate: Certificate,
    /// Restarts screened, or 0 when an instance was supplied.
    pub attempts: u64,
    /// Screening stages the reported hypergraph passed, in order.
    pub stages_passed: usize,
    pub note: Option<String>,
}

/// Every set of `m` edges must span `(s-1) m` vertices, and robustness needs
/// more than `m` edges, so `n >= (s-1) m` is necessary.
pub fn feasibility_note(params: &ConstructionParams) -> Option<String> {
    let needed = (params.s - 1) * params.m;
    (params.n < needed).then(|| {
        format!(
            "n = {} is below (s-1)m = {needed}: no hypergraph on n vertices has both a perfect \
             matching after every vertex deletion and the bounded sparsity property",
            params.n
        )
    })
}

fn passes(stage: Stage, h: &Hypergraph, params: &ConstructionParams, opts: &VerifyOptions) -> bool {
    match stage {
        Stage::Sanity => h.edge_count() > params.m && h.degrees().iter().all(|&d| d >= 2),
        Stage::Sparsity => check_sparsity_with_budget(h, params.m, params.s, opts.sparsity_budget)
            .is_ok_and(|v| v.holds),
        Stage::Matchability => {
            matches!(first_unmatchable_deletion(h, params.s, opts.match_budget), Ok(None))
        }
        Stage::Subsets => {
            let g = h.two_section().complement();
            matches!(min_subset_edges_at_most(&g, params.s + 1, params.r), Ok(None))
        }
    }
}

/// Number of leading stages passed.
fn screen(h: &Hypergraph, params: &ConstructionParams, cfg: &ConstructConfig) -> usize {
    cfg.order.iter().take_while(|&&stage| passes(stage, h, params, &cfg.verify)).count()
}

pub fn run_construct(cfg: &ConstructConfig) -> Result<ConstructReport, ConstructError> {
    let mut seen = Vec::new();
    for stage in &cfg.order {
        if seen.contains(stage) {
            return Err(ConstructError::BadOrder);
        }
        seen.push(*stage);
    }
    let s = cfg.r + 3;
    let params = derive_params(cfg.r, cfg.k, cfg.c.unwrap_or_else(|| default_constant(s)))?;
    let note = feasibility_note(&params);

    if let Some(h) = &cfg.instance {
        let certificate = verify_construction(h, &params, None, None, cfg.verify)?;
        return Ok(ConstructReport {
            success: certificate.conclusions.robust_to_r,
            stages_passed: screen(h, &params, cfg),
            certificate,
            attempts: 0,
            note,
        });
    }
    if cfg.restarts == 0 {
        return Err(ConstructError::NoRestarts);
    }
    // at q = 1 every sample is the complete hypergraph
    let restarts = if params.q >= 1.0 { 1 } else { cfg.restarts };
    let batch = cfg.batch.max(1) as u64;
    let full = cfg.order.len();
    let mut best: Option<(usize, u64)> = None;
    let mut start = 0;
    while start < restarts {
        let end = (start + batch).min(restarts);
        let screened: Vec<(u64, usize)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let h = sample_hypergraph(params.n, params.s, params.q, cfg.seed.derive(i))?;
                Ok((i, screen(&h, &params, cfg)))
            })
            .collect::<Result<_, SampleError>>()?;
        for &(i, passed) in &screened {
            if best.is_none_or(|(b, _)| passed > b) {
                best = Some((passed, i));
            }
            if passed == full {
                let h = sample_hypergraph(params.n, params.s, params.q, cfg.seed.derive(i))?;
                let certificate = verify_construction(&h, &params, Some(cfg.seed), Some(i), cfg.verify)?;
                if certificate.conclusions.robust_to_r {
                    return Ok(ConstructReport {
                        success: true,
                        certificate,
                        attempts: i + 1,
                        stages_passed: passed,
                        note,
                    });
                }
            }
        }
        start = end;
    }
    let (stages_passed, i) = best.expect("at least one restart ran");
    let h = sample_hypergraph(params.n, params.s, params.q, cfg.seed.derive(i))?;
    let certificate = verify_construction(&h, &params, Some(cfg.seed), Some(i), cfg.verify)?;
    Ok(ConstructReport { success: false, certificate, attempts: restarts, stages_passed, note })
}
