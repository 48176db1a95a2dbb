//! Two-phase alpha-sweep pipeline with CSV reporting.
//!
//! For each alpha in the grid: solve AP location (exact within budget,
//! otherwise local search), drop unused APs, then solve frequency
//! assignment for each requested frequency count. The CSV report carries
//! one row per alpha; wall-clock timings go to the per-run JSON artifacts
//! so reports stay byte-reproducible.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::aploc::{solve_exact, solve_local_search, ProofStatus, PsapBudget, PsapResult};
use crate::efficiency::{eval_cs, eval_sf, Alpha};
use crate::freqassign::{prune_unused_aps, reduce_then_solve, FaBudget};
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    /// Exact when the site count fits the budget, local search otherwise.
    Auto,
    Exact,
    Local,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub alphas: Vec<f64>,
    pub freqs: Vec<usize>,
    pub budget_sites: usize,
    pub solver: SolverChoice,
    pub seed: u64,
    pub local_iters: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            alphas: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            freqs: vec![2, 3],
            budget_sites: 20,
            solver: SolverChoice::Auto,
            seed: 0,
            local_iters: 200,
        }
    }
}

/// One row of the report: the AP location result for an alpha and the
/// frequency assignment objectives derived from it.
#[derive(Debug, Clone)]
pub struct PipelineRow {
    pub alpha: f64,
    pub psap_objective: f64,
    pub psap_time_s: f64,
    pub wfap: Vec<(usize, f64)>,
    pub cover_size: usize,
    pub solver: &'static str,
}

#[derive(Debug, Clone, Default)]
pub struct PipelineReport {
    pub rows: Vec<PipelineRow>,
}

/// Per-alpha JSON artifact: the full design solutions with timings.
#[derive(Debug, Clone, Serialize)]
pub struct RunArtifact {
    pub alpha: f64,
    pub solver: String,
    pub proof_status: String,
    pub cover: Vec<usize>,
    pub pruned_cover: Vec<usize>,
    pub association: Vec<usize>,
    pub psap_objective: f64,
    pub psap_time_s: f64,
    pub e_sf: f64,
    pub e_cs: f64,
    pub wfap: Vec<WfapArtifact>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WfapArtifact {
    pub num_freqs: usize,
    pub assignment: BTreeMap<String, usize>,
    pub objective: f64,
    pub proof_status: String,
    pub time_s: f64,
}

/// Runs the two-phase sweep. Rows come back sorted by alpha.
pub fn run_pipeline(topo: &Topology, cfg: &PipelineConfig) -> (PipelineReport, Vec<RunArtifact>) {
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(|a, b| a.partial_cmp(b).expect("alpha grid contains no NaN"));
    alphas.dedup();

    let mut rows = Vec::with_capacity(alphas.len());
    let mut artifacts = Vec::with_capacity(alphas.len());
    for &a in &alphas {
        let alpha = Alpha::new(a).expect("alpha grid validated by the caller");
        let use_exact = match cfg.solver {
            SolverChoice::Exact => true,
            SolverChoice::Local => false,
            SolverChoice::Auto => topo.num_css() <= cfg.budget_sites,
        };
        let (psap, solver): (PsapResult, &'static str) = if use_exact {
            let budget = PsapBudget {
                max_sites_exact: if cfg.solver == SolverChoice::Exact {
                    usize::MAX
                } else {
                    cfg.budget_sites
                },
                max_nodes: None,
            };
            (solve_exact(topo, alpha, &budget), "exact")
        } else {
            (
                solve_local_search(topo, alpha, cfg.seed, cfg.local_iters),
                "local",
            )
        };

        let pruned = prune_unused_aps(topo, &psap.cover).expect("solver returned a cover");
        let e_sf = eval_sf(topo, &pruned).expect("cover").total;
        let e_cs = eval_cs(topo, &pruned).expect("cover").total;

        let mut wfap_rows = Vec::with_capacity(cfg.freqs.len());
        let mut wfap_artifacts = Vec::with_capacity(cfg.freqs.len());
        for &num_freqs in &cfg.freqs {
            let started = std::time::Instant::now();
            let fa = reduce_then_solve(topo, &pruned, num_freqs, &FaBudget::default())
                .expect("pruned cover is a cover");
            let elapsed = started.elapsed().as_secs_f64();
            wfap_rows.push((num_freqs, fa.value.total));
            wfap_artifacts.push(WfapArtifact {
                num_freqs,
                assignment: fa
                    .assignment
                    .iter()
                    .map(|(site, f)| (site.to_string(), *f))
                    .collect(),
                objective: fa.value.total,
                proof_status: fa.proof_status.to_string(),
                time_s: elapsed,
            });
        }

        rows.push(PipelineRow {
            alpha: a,
            psap_objective: psap.objective,
            psap_time_s: psap.wall_time.as_secs_f64(),
            wfap: wfap_rows,
            cover_size: pruned.len(),
            solver,
        });
        artifacts.push(RunArtifact {
            alpha: a,
            solver: solver.to_string(),
            proof_status: match psap.proof_status {
                ProofStatus::Optimal => "optimal".to_string(),
                ProofStatus::Heuristic => "heuristic".to_string(),
            },
            cover: psap.cover.sites().to_vec(),
            pruned_cover: pruned.sites().to_vec(),
            association: psap.association.as_slice().to_vec(),
            psap_objective: psap.objective,
            psap_time_s: psap.wall_time.as_secs_f64(),
            e_sf,
            e_cs,
            wfap: wfap_artifacts,
        });
    }
    (PipelineReport { rows }, artifacts)
}

/// Renders the report as CSV. Timing columns are deliberately absent so the
/// same seed and flags reproduce the file byte for byte; timings live in
/// the JSON artifacts.
pub fn report_to_csv(report: &PipelineReport, freqs: &[usize]) -> String {
    let mut out = String::from("alpha,psap_objective");
    for f in freqs {
        out.push_str(&format!(",wfap_f{f}"));
    }
    out.push_str(",cover_size,solver\n");
    for row in &report.rows {
        out.push_str(&format!("{},{}", row.alpha, row.psap_objective));
        for &(_, obj) in &row.wfap {
            out.push_str(&format!(",{obj}"));
        }
        out.push_str(&format!(",{},{}\n", row.cover_size, row.solver));
    }
    out
}

pub fn write_csv(report: &PipelineReport, freqs: &[usize], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, report_to_csv(report, freqs))
}

pub fn write_artifacts(artifacts: &[RunArtifact], dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for artifact in artifacts {
        let mut text = serde_json::to_string_pretty(artifact).expect("artifact serialization");
        text.push('\n');
        std::fs::write(dir.join(format!("run_a{}.json", artifact.alpha)), text)?;
    }
    Ok(())
}
