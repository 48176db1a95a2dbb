//! AP location: find a cover maximizing the partial-separation efficiency.
//!
//! The exact solver is a depth-first include/exclude search over candidate
//! sites with two prunings: branches whose remaining sites cannot cover all
//! TPs are cut, and branches whose optimistic bound (each TP served at its
//! best still-available rate with no interference) falls below the incumbent
//! are cut. Desk-scale instances (around 20 sites) solve in seconds; larger
//! ones fall back to local search.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::efficiency::{eval_pcs, Alpha};
use crate::topology::{associate, Association, Cover, Topology};

/// Comparison tolerance for objective values in pruning and tie detection.
const OBJ_EPS: f64 = 1e-9;

/// Default per-(TP, site) cap on enumerated interference scenarios.
pub const DEFAULT_SCENARIO_CAP: u64 = 4096;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("scenario explosion at TP {tp}, site {site}: {count} scenarios exceed cap {cap}")]
pub struct ScenarioExplosion {
    pub tp: usize,
    pub site: usize,
    pub count: u128,
    pub cap: u64,
}

/// Resource limits for [`solve_exact`].
#[derive(Debug, Clone)]
pub struct PsapBudget {
    /// Above this many candidate sites the exact search is not attempted.
    pub max_sites_exact: usize,
    /// Optional node cap; when hit the best incumbent is returned.
    pub max_nodes: Option<u64>,
}

impl Default for PsapBudget {
    fn default() -> Self {
        PsapBudget {
            max_sites_exact: 20,
            max_nodes: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofStatus {
    Optimal,
    Heuristic,
}

impl std::fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProofStatus::Optimal => write!(f, "optimal"),
            ProofStatus::Heuristic => write!(f, "heuristic"),
        }
    }
}

/// Result of an AP location solve.
#[derive(Debug, Clone)]
pub struct PsapResult {
    pub cover: Cover,
    pub association: Association,
    pub objective: f64,
    pub proof_status: ProofStatus,
    pub nodes_explored: u64,
    pub wall_time: Duration,
}

/// One interference scenario of a TP: the serving site, the subset of
/// same-AP users present, and the subset of hidden users (covered only by
/// weaker compatible sites) whose AP covers the TP.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceScenario {
    pub tp: usize,
    pub site: usize,
    /// `H_s`: users associated to the same AP, a subset of `N_cs`.
    pub same_ap: Vec<usize>,
    /// `U_s`: users not covered by the AP but associated to a compatible
    /// weaker site, a subset of `N_sf`.
    pub hidden: Vec<usize>,
    /// Objective coefficient of the scenario.
    pub coeff: f64,
}

fn greedy_cover_sites(topo: &Topology) -> Vec<usize> {
    let mut uncovered: Vec<bool> = vec![true; topo.num_tps()];
    let mut left = topo.num_tps();
    let mut sites = Vec::new();
    while left > 0 {
        let (best, gain) = (0..topo.num_css())
            .map(|j| (j, topo.covered(j).iter().filter(|&&i| uncovered[i]).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("at least one candidate site");
        assert!(gain > 0, "instance invariant: every TP is coverable");
        sites.push(best);
        for &i in topo.covered(best) {
            if uncovered[i] {
                uncovered[i] = false;
                left -= 1;
            }
        }
    }
    sites
}

/// Greedy set-cover start: repeatedly install the site covering the most
/// still-uncovered TPs (ties to the smallest id).
pub fn greedy_cover(topo: &Topology) -> Cover {
    Cover::unchecked(greedy_cover_sites(topo))
}

struct SearchState<'a> {
    topo: &'a Topology,
    alpha: Alpha,
    order: Vec<usize>,
    excluded: Vec<bool>,
    included: Vec<usize>,
    /// Per TP: number of covering sites not yet excluded.
    avail: Vec<usize>,
    best_sites: Vec<usize>,
    best_obj: f64,
    nodes: u64,
    node_cap: u64,
    capped: bool,
}

impl SearchState<'_> {
    fn optimistic_bound(&self) -> f64 {
        (0..self.topo.num_tps())
            .map(|i| {
                self.topo
                    .covering(i)
                    .iter()
                    .filter(|&&j| !self.excluded[j])
                    .map(|&j| f64::from(self.topo.instance().rate(i, j)))
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    fn offer(&mut self, sites: &[usize]) {
        let cover = Cover::unchecked(sites.iter().copied());
        let obj = eval_pcs(self.topo, &cover, self.alpha)
            .expect("all sites decided and coverage maintained")
            .total;
        let better = obj > self.best_obj + OBJ_EPS
            || ((obj - self.best_obj).abs() <= OBJ_EPS && cover.sites() < self.best_sites.as_slice());
        if better {
            self.best_sites = cover.sites().to_vec();
            self.best_obj = obj;
        }
    }

    fn dfs(&mut self, pos: usize) {
        if self.capped {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.capped = true;
            return;
        }
        if pos == self.order.len() {
            let sites = self.included.clone();
            self.offer(&sites);
            return;
        }
        if self.optimistic_bound() < self.best_obj - OBJ_EPS {
            return;
        }
        let site = self.order[pos];

        // include
        self.included.push(site);
        self.dfs(pos + 1);
        self.included.pop();

        // exclude, unless that leaves some TP uncoverable
        let mut feasible = true;
        for &i in self.topo.covered(site) {
            self.avail[i] -= 1;
            if self.avail[i] == 0 {
                feasible = false;
            }
        }
        if feasible {
            self.excluded[site] = true;
            self.dfs(pos + 1);
            self.excluded[site] = false;
        }
        for &i in self.topo.covered(site) {
            self.avail[i] += 1;
        }
    }
}

/// Exact AP location by branch-and-bound over site subsets.
///
/// Returns the maximizer of the partial-separation efficiency over all
/// covers, with ties broken toward the lexicographically smallest site set.
/// When the instance exceeds the budget (too many sites, or the node cap is
/// hit) the best incumbent found so far is returned with
/// [`ProofStatus::Heuristic`].
pub fn solve_exact(topo: &Topology, alpha: Alpha, budget: &PsapBudget) -> PsapResult {
    let start = Instant::now();
    let greedy = greedy_cover_sites(topo);
    let greedy_obj = eval_pcs(topo, &Cover::unchecked(greedy.iter().copied()), alpha)
        .expect("greedy result is a cover")
        .total;

    if topo.num_css() > budget.max_sites_exact {
        let cover = Cover::unchecked(greedy);
        let association = associate(topo, &cover).expect("cover");
        return PsapResult {
            association,
            objective: greedy_obj,
            cover,
            proof_status: ProofStatus::Heuristic,
            nodes_explored: 0,
            wall_time: start.elapsed(),
        };
    }

    let mut order: Vec<usize> = (0..topo.num_css()).collect();
    order.sort_by(|&a, &b| {
        topo.covered(b)
            .len()
            .cmp(&topo.covered(a).len())
            .then(a.cmp(&b))
    });
    let avail = (0..topo.num_tps()).map(|i| topo.covering(i).len()).collect();
    let mut state = SearchState {
        topo,
        alpha,
        order,
        excluded: vec![false; topo.num_css()],
        included: Vec::new(),
        avail,
        best_sites: greedy,
        best_obj: greedy_obj,
        nodes: 0,
        node_cap: budget.max_nodes.unwrap_or(u64::MAX),
        capped: false,
    };
    state.dfs(0);

    let cover = Cover::unchecked(state.best_sites.iter().copied());
    let association = associate(topo, &cover).expect("incumbent is a cover");
    let objective = eval_pcs(topo, &cover, alpha).expect("cover").total;
    PsapResult {
        cover,
        association,
        objective,
        proof_status: if state.capped {
            ProofStatus::Heuristic
        } else {
            ProofStatus::Optimal
        },
        nodes_explored: state.nodes,
        wall_time: start.elapsed(),
    }
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Add(usize),
    Drop(usize),
    Swap { out: usize, inn: usize },
}

/// Improvement-only local search from the greedy cover.
///
/// Moves are add-one, drop-one (if still a cover) and swap; the first
/// strictly improving move in a seeded random scan order is applied, up to
/// `iters` times. Deterministic for a fixed seed.
pub fn solve_local_search(topo: &Topology, alpha: Alpha, seed: u64, iters: usize) -> PsapResult {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = greedy_cover_sites(topo);
    sites.sort_unstable();
    let mut obj = eval_pcs(topo, &Cover::unchecked(sites.iter().copied()), alpha)
        .expect("greedy cover")
        .total;
    let mut evals = 0u64;

    for _ in 0..iters {
        let in_set = |j: usize, s: &[usize]| s.binary_search(&j).is_ok();
        let count: Vec<usize> = (0..topo.num_tps())
            .map(|i| topo.covering(i).iter().filter(|&&j| in_set(j, &sites)).count())
            .collect();
        let droppable = |j: usize| topo.covered(j).iter().all(|&i| count[i] >= 2);
        let swappable =
            |out: usize, inn: usize| topo.covered(out).iter().all(|&i| count[i] >= 2 || topo.covers_tp(inn, i));

        let mut moves: Vec<Move> = Vec::new();
        for j in 0..topo.num_css() {
            if !in_set(j, &sites) {
                moves.push(Move::Add(j));
            } else if sites.len() > 1 && droppable(j) {
                moves.push(Move::Drop(j));
            }
        }
        for &out in &sites {
            for inn in 0..topo.num_css() {
                if !in_set(inn, &sites) && swappable(out, inn) {
                    moves.push(Move::Swap { out, inn });
                }
            }
        }
        moves.shuffle(&mut rng);

        let mut improved = false;
        for mv in moves {
            let mut cand = sites.clone();
            match mv {
                Move::Add(j) => cand.push(j),
                Move::Drop(j) => cand.retain(|&k| k != j),
                Move::Swap { out, inn } => {
                    cand.retain(|&k| k != out);
                    cand.push(inn);
                }
            }
            cand.sort_unstable();
            let cand_obj = eval_pcs(topo, &Cover::unchecked(cand.iter().copied()), alpha)
                .expect("moves preserve coverage")
                .total;
            evals += 1;
            if cand_obj > obj + OBJ_EPS {
                sites = cand;
                obj = cand_obj;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }

    let cover = Cover::unchecked(sites);
    let association = associate(topo, &cover).expect("cover");
    PsapResult {
        association,
        objective: obj,
        cover,
        proof_status: ProofStatus::Heuristic,
        nodes_explored: evals,
        wall_time: start.elapsed(),
    }
}

/// Enumerates every interference scenario of a TP, for all of its covering
/// sites. Errors when some `(tp, site)` pair would produce more than `cap`
/// scenarios; such instances need column generation instead.
pub fn enumerate_scenarios(
    topo: &Topology,
    tp: usize,
    alpha: Alpha,
    cap: u64,
) -> Result<Vec<InterferenceScenario>, ScenarioExplosion> {
    let a = alpha.value();
    let mut out = Vec::new();
    for rank in 0..topo.covering(tp).len() {
        let pair = topo.pair_by_rank(tp, rank);
        let bits = pair.n_cs.len() + pair.n_sf.len();
        let count = 1u128 << bits.min(127);
        if bits >= 64 || count > u128::from(cap) {
            return Err(ScenarioExplosion {
                tp,
                site: pair.site,
                count,
                cap,
            });
        }
        let rate = f64::from(topo.instance().rate(tp, pair.site));
        let n_cs_size = pair.n_cs.len() as f64;
        for h_mask in 0u64..(1 << pair.n_cs.len()) {
            let same_ap: Vec<usize> = pair
                .n_cs
                .iter()
                .enumerate()
                .filter(|(b, _)| h_mask & (1 << b) != 0)
                .map(|(_, &h)| h)
                .collect();
            for u_mask in 0u64..(1 << pair.n_sf.len()) {
                let hidden: Vec<usize> = pair
                    .n_sf
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| u_mask & (1 << b) != 0)
                    .map(|(_, &h)| h)
                    .collect();
                let denom = 1.0 + a * (hidden.len() as f64 + n_cs_size) + (1.0 - a) * same_ap.len() as f64;
                out.push(InterferenceScenario {
                    tp,
                    site: pair.site,
                    coeff: rate / denom,
                    same_ap: same_ap.clone(),
                    hidden,
                });
            }
        }
    }
    Ok(out)
}
