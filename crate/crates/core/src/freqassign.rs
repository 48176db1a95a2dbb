//! Frequency assignment for a fixed cover, and the AP overlap graph.
//!
//! With the cover fixed, the association is fixed, and each TP `i` splits
//! its neighbors into the always-interfering set `H_i` (same AP) and the
//! flexible set `U_bar_i` whose interference depends on the frequencies
//! chosen for the serving APs. A proper coloring of the *AP overlap graph*
//! silences every flexible pair at once, reaching the complete-separation
//! value `e_cs(S)` exactly; the exact solver enumerates canonical
//! (restricted-growth) assignments to kill label symmetry.

use std::collections::{BTreeMap, BTreeSet};

use crate::aploc::ProofStatus;
use crate::efficiency::EfficiencyValue;
use crate::topology::{associate, Association, Cover, FrequencyMap, NotACover, Topology};

/// Resource limits for the exact frequency assignment search.
#[derive(Debug, Clone)]
pub struct FaBudget {
    /// Maximum number of installed sites enumerated exactly.
    pub max_sites: usize,
}

impl Default for FaBudget {
    fn default() -> Self {
        // 3^14 canonical-reduced assignments evaluate in seconds
        FaBudget { max_sites: 14 }
    }
}

/// Result of a frequency assignment solve.
#[derive(Debug, Clone)]
pub struct FaResult {
    pub assignment: FrequencyMap,
    pub value: EfficiencyValue,
    pub proof_status: ProofStatus,
}

/// Per-TP sets induced by a fixed association.
#[derive(Debug, Clone)]
pub struct TpSets {
    /// Serving AP `a_i`.
    pub ap: usize,
    /// Rate toward the serving AP.
    pub rate: f64,
    /// `H_i`: neighbors served by the same AP; they always interfere.
    pub same_ap: Vec<usize>,
    /// `U_i`: neighbors outside the serving AP's coverage whose AP covers the TP.
    pub hidden: Vec<usize>,
    /// `U_bar_i`: all neighbors that interfere exactly when frequencies collide.
    pub flexible: Vec<usize>,
    /// `C_i`: the APs serving the flexible neighbors.
    pub flexible_aps: Vec<usize>,
    /// Flexible neighbors grouped by serving AP.
    pub flexible_by_ap: Vec<(usize, usize)>,
}

/// Fixed-association view of a cover: association plus per-TP sets.
#[derive(Debug, Clone)]
pub struct FixedAssociationSets {
    pub cover: Cover,
    pub association: Association,
    pub per_tp: Vec<TpSets>,
}

impl FixedAssociationSets {
    pub fn build(topo: &Topology, cover: &Cover) -> Result<FixedAssociationSets, NotACover> {
        let association = associate(topo, cover)?;
        let per_tp = (0..topo.num_tps())
            .map(|i| {
                let ap = association.ap(i);
                let mut same_ap = Vec::new();
                let mut hidden = Vec::new();
                let mut flexible = Vec::new();
                for &h in topo.neighbors(i) {
                    if h == i {
                        continue;
                    }
                    let ah = association.ap(h);
                    if ah == ap {
                        same_ap.push(h);
                    } else if topo.covers_tp(ap, h) || topo.covers_tp(ah, i)  {
                        flexible.push(h);
                        if !topo.covers_tp(ap, h) {
                            hidden.push(h);
                        }
                    }
                }
                let mut by_ap: BTreeMap<usize, usize> = BTreeMap::new();
                for &h in &flexible {
                    *by_ap.entry(association.ap(h)).or_insert(0) += 1;
                }
                TpSets {
                    ap,
                    rate: f64::from(topo.instance().rate(i, ap)),
                    same_ap,
                    hidden,
                    flexible,
                    flexible_aps: by_ap.keys().copied().collect(),
                    flexible_by_ap: by_ap.into_iter().collect(),
                }
            })
            .collect();
        Ok(FixedAssociationSets {
            cover: cover.clone(),
            association,
            per_tp,
        })
    }

    /// `e(S, f)` under the fixed association.
    pub fn eval(&self, freq: &FrequencyMap) -> EfficiencyValue {
        let per_tp: Vec<f64> = self
            .per_tp
            .iter()
            .map(|tp| {
                let own = freq[&tp.ap];
                let colliding: usize = tp
                    .flexible_by_ap
                    .iter()
                    .filter(|(ap, _)| freq[ap] == own)
                    .map(|(_, n)| n)
                    .sum();
                tp.rate / (1.0 + (tp.same_ap.len() + colliding) as f64)
            })
            .collect();
        EfficiencyValue {
            total: per_tp.iter().sum(),
            per_tp,
        }
    }
}

/// Drops installed APs that serve no TP; the association of every TP is unchanged.
pub fn prune_unused_aps(topo: &Topology, cover: &Cover) -> Result<Cover, NotACover> {
    let assoc = associate(topo, cover)?;
    let used: BTreeSet<usize> = assoc.as_slice().iter().copied().collect();
    Ok(Cover::unchecked(used))
}

/// Graph on the installed APs with an edge wherever a shared-coverage TP
/// associates to one of the two endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapGraph {
    nodes: Vec<usize>,
    edges: BTreeSet<(usize, usize)>,
    adj: BTreeMap<usize, Vec<usize>>,
}

impl OverlapGraph {
    pub fn from_edges(
        nodes: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> OverlapGraph {
        let mut nodes: Vec<usize> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        let mut set = BTreeSet::new();
        let mut adj: BTreeMap<usize, Vec<usize>> = nodes.iter().map(|&n| (n, Vec::new())).collect();
        for (a, b) in edges {
            assert!(a != b, "overlap graph is simple");
            let key = (a.min(b), a.max(b));
            if set.insert(key) {
                adj.get_mut(&a).expect("edge endpoint is a node").push(b);
                adj.get_mut(&b).expect("edge endpoint is a node").push(a);
            }
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        OverlapGraph {
            nodes,
            edges: set,
            adj,
        }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[&node]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Builds the AP overlap graph of a cover.
pub fn build_overlap_graph(topo: &Topology, cover: &Cover) -> Result<OverlapGraph, NotACover> {
    let assoc = associate(topo, cover)?;
    let mut edges = Vec::new();
    for i in 0..topo.num_tps() {
        let ai = assoc.ap(i);
        for &j in topo.covering(i) {
            if j != ai && cover.contains(j) {
                edges.push((ai, j));
            }
        }
    }
    Ok(OverlapGraph::from_edges(cover.sites().iter().copied(), edges))
}

/// DSATUR-style greedy partial coloring with `num_colors` colors.
///
/// Nodes that cannot take any color are left uncolored; the colored
/// subgraph is always properly colored. Selection order: highest
/// saturation, then highest degree, then smallest id.
pub fn greedy_coloring(graph: &OverlapGraph, num_colors: usize) -> BTreeMap<usize, usize> {
    assert!(num_colors >= 1);
    let mut colors: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pending: BTreeSet<usize> = graph.nodes().iter().copied().collect();
    while !pending.is_empty() {
        let pick = pending
            .iter()
            .copied()
            .max_by(|&a, &b| {
                let sat = |v: usize| {
                    graph
                        .neighbors(v)
                        .iter()
                        .filter_map(|h| colors.get(h))
                        .collect::<BTreeSet<_>>()
                        .len()
                };
                sat(a)
                    .cmp(&sat(b))
                    .then(graph.neighbors(a).len().cmp(&graph.neighbors(b).len()))
                    .then(b.cmp(&a))
            })
            .expect("pending not empty");
        pending.remove(&pick);
        let taken: BTreeSet<usize> = graph
            .neighbors(pick)
            .iter()
            .filter_map(|h| colors.get(h).copied())
            .collect();
        if let Some(color) = (0..num_colors).find(|c| !taken.contains(c)) {
            colors.insert(pick, color);
        }
    }
    colors
}

/// Exact frequency assignment by canonical enumeration.
///
/// Frequency labels are interchangeable, so only restricted-growth strings
/// are enumerated: the first site takes label 0 and a new label may appear
/// only after all smaller ones. Returns the optimal assignment, or a greedy
/// coloring completion with [`ProofStatus::Heuristic`] when the cover
/// exceeds the budget.
pub fn solve_exact_fa(
    topo: &Topology,
    cover: &Cover,
    num_freqs: usize,
    budget: &FaBudget,
) -> Result<FaResult, NotACover> {
    assert!(num_freqs >= 1);
    let sets = FixedAssociationSets::build(topo, cover)?;
    if cover.len() > budget.max_sites {
        return Ok(heuristic_completion(topo, &sets, cover, num_freqs));
    }
    let sites = cover.sites().to_vec();
    let mut labels = vec![0usize; sites.len()];
    let mut best: Option<(Vec<usize>, f64)> = None;
    enumerate_rgs(&sites, num_freqs, 0, 0, &mut labels, &mut |labels| {
        let freq: FrequencyMap = sites.iter().copied().zip(labels.iter().copied()).collect();
        let value = sets.eval(&freq);
        if best.as_ref().is_none_or(|(_, b)| value.total > *b) {
            best = Some((labels.to_vec(), value.total));
        }
    });
    let (labels, _) = best.expect("at least one canonical assignment");
    let assignment: FrequencyMap = sites.into_iter().zip(labels).collect();
    let value = sets.eval(&assignment);
    Ok(FaResult {
        assignment,
        value,
        proof_status: ProofStatus::Optimal,
    })
}

fn enumerate_rgs(
    sites: &[usize],
    num_freqs: usize,
    pos: usize,
    max_used: usize,
    labels: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos == sites.len() {
        visit(labels);
        return;
    }
    let cap = if pos == 0 { 0 } else { (max_used + 1).min(num_freqs - 1) };
    for label in 0..=cap {
        labels[pos] = label;
        enumerate_rgs(sites, num_freqs, pos + 1, max_used.max(label), labels, visit);
    }
}

fn heuristic_completion(
    topo: &Topology,
    sets: &FixedAssociationSets,
    cover: &Cover,
    num_freqs: usize,
) -> FaResult {
    let graph = build_overlap_graph(topo, cover).expect("cover already validated");
    let mut colors = greedy_coloring(&graph, num_freqs);
    for &node in graph.nodes() {
        if !colors.contains_key(&node) {
            let best = (0..num_freqs)
                .min_by_key(|c| {
                    graph
                        .neighbors(node)
                        .iter()
                        .filter(|h| colors.get(h) == Some(c))
                        .count()
                })
                .expect("at least one color");
            colors.insert(node, best);
        }
    }
    let value = sets.eval(&colors);
    FaResult {
        assignment: colors,
        value,
        proof_status: ProofStatus::Heuristic,
    }
}

/// Frequency assignment through the overlap-graph coloring reduction.
///
/// A complete greedy coloring is returned directly (it attains `e_cs(S)`,
/// which is optimal). Otherwise colored nodes whose entire neighborhood is
/// colored stay fixed and the remaining sites are enumerated exhaustively;
/// the result is at least as good as completing the greedy coloring.
pub fn reduce_then_solve(
    topo: &Topology,
    cover: &Cover,
    num_freqs: usize,
    budget: &FaBudget,
) -> Result<FaResult, NotACover> {
    assert!(num_freqs >= 1);
    let sets = FixedAssociationSets::build(topo, cover)?;
    let graph = build_overlap_graph(topo, cover)?;
    let colors = greedy_coloring(&graph, num_freqs);

    if colors.len() == graph.nodes().len() {
        let assignment: FrequencyMap = colors;
        let value = sets.eval(&assignment);
        return Ok(FaResult {
            assignment,
            value,
            proof_status: ProofStatus::Optimal,
        });
    }

    let frozen: BTreeMap<usize, usize> = colors
        .iter()
        .filter(|(node, _)| graph.neighbors(**node).iter().all(|h| colors.contains_key(h)))
        .map(|(&node, &c)| (node, c))
        .collect();
    if frozen.is_empty() {
        return solve_exact_fa(topo, cover, num_freqs, budget);
    }
    let free: Vec<usize> = graph
        .nodes()
        .iter()
        .copied()
        .filter(|n| !frozen.contains_key(n))
        .collect();
    if free.len() > budget.max_sites {
        return Ok(heuristic_completion(topo, &sets, cover, num_freqs));
    }

    let mut best: Option<(FrequencyMap, f64)> = None;
    let total = (num_freqs as u64).pow(free.len() as u32);
    for mut code in 0..total {
        let mut freq: FrequencyMap = frozen.clone();
        for &site in &free {
            freq.insert(site, (code % num_freqs as u64) as usize);
            code /= num_freqs as u64;
        }
        let value = sets.eval(&freq);
        if best.as_ref().is_none_or(|(_, b)| value.total > *b) {
            best = Some((freq, value.total));
        }
    }
    let (assignment, _) = best.expect("at least one completion");
    let value = sets.eval(&assignment);
    Ok(FaResult {
        assignment,
        value,
        proof_status: ProofStatus::Heuristic,
    })
}
