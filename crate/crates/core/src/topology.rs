//! Derived set structures and the association induced by a cover.
//!
//! Everything here is computed once per instance and shared read-only by the
//! solvers. For a TP `i` and a covering site `j` the association-related
//! sets are:
//!
//! - `J_ij`  — sites covering `i` with weaker signal than `j` (compatible
//!   with the association `a_i = j`)
//! - `Jhat_ij` — sites covering `i` with stronger signal (incompatible)
//! - `N_cs_ij = I_j \ {i}` — TPs sharing AP `j` with `i`
//! - `N_sf_ij = I(J_ij) \ I_j` — TPs reachable only through weaker
//!   compatible sites

use std::collections::BTreeMap;

use thiserror::Error;

use crate::instance::Instance;

/// The given site set fails to cover some TP.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("site set is not a cover: TP {tp} has no installed covering AP")]
pub struct NotACover {
    pub tp: usize,
}

/// Association-related sets for one `(i, j)` pair with `j` covering `i`.
#[derive(Debug, Clone)]
pub struct PairSets {
    pub site: usize,
    /// `J_ij`: sites covering the TP, weaker than `site`.
    pub compatible: Vec<usize>,
    /// `Jhat_ij`: sites covering the TP, stronger than `site`.
    pub incompatible: Vec<usize>,
    /// `N_cs_ij = I_j \ {i}`, sorted.
    pub n_cs: Vec<usize>,
    /// `N_sf_ij = I(J_ij) \ I_j`, sorted.
    pub n_sf: Vec<usize>,
}

/// All derived sets of an instance.
#[derive(Debug, Clone)]
pub struct Topology {
    inst: Instance,
    /// `N_i = I(J_i)`, sorted; contains `i` itself whenever `J_i` is nonempty.
    neighbors: Vec<Vec<usize>>,
    /// Indexed `[i][p]` where `p` is the position of the site in `signal_order[i]`.
    pair_sets: Vec<Vec<PairSets>>,
}

impl Topology {
    /// Computes all derived sets. Idempotent and purely a function of the instance.
    pub fn build(inst: &Instance) -> Topology {
        let n_tps = inst.num_tps();
        let mut neighbors = Vec::with_capacity(n_tps);
        let mut pair_sets = Vec::with_capacity(n_tps);
        for i in 0..n_tps {
            let order = &inst.signal_order[i];
            let mut nbrs: Vec<usize> = order
                .iter()
                .flat_map(|&j| inst.covers[j].iter().copied())
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            neighbors.push(nbrs);

            let mut per_site = Vec::with_capacity(order.len());
            for (p, &j) in order.iter().enumerate() {
                let compatible: Vec<usize> = order[p + 1..].to_vec();
                let incompatible: Vec<usize> = order[..p].to_vec();
                let n_cs: Vec<usize> = inst.covers[j].iter().copied().filter(|&h| h != i).collect();
                let mut n_sf: Vec<usize> = compatible
                    .iter()
                    .flat_map(|&k| inst.covers[k].iter().copied())
                    .filter(|h| inst.covers[j].binary_search(h).is_err())
                    .collect();
                n_sf.sort_unstable();
                n_sf.dedup();
                per_site.push(PairSets {
                    site: j,
                    compatible,
                    incompatible,
                    n_cs,
                    n_sf,
                });
            }
            pair_sets.push(per_site);
        }
        Topology {
            inst: inst.clone(),
            neighbors,
            pair_sets,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn num_tps(&self) -> usize {
        self.inst.num_tps()
    }

    pub fn num_css(&self) -> usize {
        self.inst.num_css()
    }

    /// `J_i`, strongest first.
    pub fn covering(&self, tp: usize) -> &[usize] {
        &self.inst.signal_order[tp]
    }

    /// `I_j`, sorted.
    pub fn covered(&self, cs: usize) -> &[usize] {
        &self.inst.covers[cs]
    }

    /// `N_i = I(J_i)`, sorted (contains `tp` itself).
    pub fn neighbors(&self, tp: usize) -> &[usize] {
        &self.neighbors[tp]
    }

    /// Association-related sets for `(tp, cs)`; `cs` must cover `tp`.
    pub fn pair(&self, tp: usize, cs: usize) -> &PairSets {
        let p = self.inst.signal_order[tp]
            .iter()
            .position(|&j| j == cs)
            .unwrap_or_else(|| panic!("CS {cs} does not cover TP {tp}"));
        &self.pair_sets[tp][p]
    }

    /// Association-related sets for the `p`-th strongest site of `tp`.
    pub fn pair_by_rank(&self, tp: usize, rank: usize) -> &PairSets {
        &self.pair_sets[tp][rank]
    }

    /// True iff `cs` covers `tp`.
    pub fn covers_tp(&self, cs: usize, tp: usize) -> bool {
        self.inst.covers[cs].binary_search(&tp).is_ok()
    }
}

/// A subset `S` of candidate sites covering every TP.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cover {
    sites: Vec<usize>,
}

impl Cover {
    /// Validates that `sites` covers every TP of the topology's instance.
    pub fn new(topo: &Topology, sites: impl IntoIterator<Item = usize>) -> Result<Cover, NotACover> {
        let cover = Cover::unchecked(sites);
        for i in 0..topo.num_tps() {
            if !topo.covering(i).iter().any(|j| cover.contains(*j)) {
                return Err(NotACover { tp: i });
            }
        }
        Ok(cover)
    }

    /// Builds the site set without the coverage check (sorted, deduplicated).
    pub fn unchecked(sites: impl IntoIterator<Item = usize>) -> Cover {
        let mut sites: Vec<usize> = sites.into_iter().collect();
        sites.sort_unstable();
        sites.dedup();
        Cover { sites }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, cs: usize) -> bool {
        self.sites.binary_search(&cs).is_ok()
    }
}

/// The forced association: each TP connects to its strongest installed AP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    ap_of: Vec<usize>,
}

impl Association {
    /// AP serving the TP.
    pub fn ap(&self, tp: usize) -> usize {
        self.ap_of[tp]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.ap_of
    }
}

/// Associates every TP to the first site of its signal order present in `S`.
pub fn associate(topo: &Topology, cover: &Cover) -> Result<Association, NotACover> {
    let mut ap_of = Vec::with_capacity(topo.num_tps());
    for i in 0..topo.num_tps() {
        match topo.covering(i).iter().find(|&&j| cover.contains(j)) {
            Some(&j) => ap_of.push(j),
            None => return Err(NotACover { tp: i }),
        }
    }
    Ok(Association { ap_of })
}

/// A total frequency map on the installed sites, values in `0..num_frequencies`.
pub type FrequencyMap = BTreeMap<usize, usize>;

/// Interferer sets `Phi_i(S, f)` for every TP: neighbors on the same
/// frequency with at least one of the two associated APs covering the other
/// TP. The TP itself is excluded.
pub fn interferers(
    topo: &Topology,
    cover: &Cover,
    assoc: &Association,
    freq: &FrequencyMap,
) -> Vec<Vec<usize>> {
    debug_assert!(cover.sites().iter().all(|j| freq.contains_key(j)));
    (0..topo.num_tps())
        .map(|i| {
            let ai = assoc.ap(i);
            topo.neighbors(i)
                .iter()
                .copied()
                .filter(|&h| {
                    h != i && {
                        let ah = assoc.ap(h);
                        freq[&ai] == freq[&ah] && (topo.covers_tp(ai, h) || topo.covers_tp(ah, i))
                    }
                })
                .collect()
        })
        .collect()
}

/// Single-frequency interferer sets `Phi^SF_i(S)`: the frequency condition dropped.
pub fn interferers_sf(topo: &Topology, assoc: &Association) -> Vec<Vec<usize>> {
    (0..topo.num_tps())
        .map(|i| {
            let ai = assoc.ap(i);
            topo.neighbors(i)
                .iter()
                .copied()
                .filter(|&h| {
                    h != i && {
                        let ah = assoc.ap(h);
                        topo.covers_tp(ai, h) || topo.covers_tp(ah, i)
                    }
                })
                .collect()
        })
        .collect()
}

/// Complete-separation interferer sets `Phi^CS_i(S)`: only co-associated TPs.
pub fn interferers_cs(topo: &Topology, assoc: &Association) -> Vec<Vec<usize>> {
    (0..topo.num_tps())
        .map(|i| {
            let ai = assoc.ap(i);
            topo.neighbors(i)
                .iter()
                .copied()
                .filter(|&h| h != i && assoc.ap(h) == ai)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, GeneratorConfig};
    use crate::oracle::inst_a;

    #[test]
    fn inst_a_association_sets() {
        let inst = inst_a();
        let topo = Topology::build(&inst);
        // TP b (=1) with its strongest site AP1 (=0)
        let pair = topo.pair(1, 0);
        assert_eq!(pair.n_cs, vec![0]);
        assert_eq!(pair.compatible, vec![1]);
        assert_eq!(pair.incompatible, Vec::<usize>::new());
        assert_eq!(pair.n_sf, vec![2]);
        // weaker site AP2 (=1)
        let pair = topo.pair(1, 1);
        assert_eq!(pair.n_cs, vec![2]);
        assert_eq!(pair.compatible, Vec::<usize>::new());
        assert_eq!(pair.incompatible, vec![0]);
        assert_eq!(pair.n_sf, Vec::<usize>::new());
    }

    #[test]
    fn single_cs_instance_has_empty_pair_sets() {
        let inst = generate(&GeneratorConfig::isotropic(6, 1, 2.0, 4.0, 9)).unwrap();
        let topo = Topology::build(&inst);
        for i in 0..topo.num_tps() {
            let pair = topo.pair(i, 0);
            assert!(pair.compatible.is_empty());
            assert!(pair.incompatible.is_empty());
            assert!(pair.n_sf.is_empty());
        }
    }

    #[test]
    fn strongest_site_has_no_incompatible_sets() {
        let inst = generate(&GeneratorConfig::anisotropic(25, 8, 10.0, 2.0, 6.0, 4)).unwrap();
        let topo = Topology::build(&inst);
        for i in 0..topo.num_tps() {
            assert!(topo.pair_by_rank(i, 0).incompatible.is_empty());
        }
    }

    #[test]
    fn pair_sets_partition_and_disjointness() {
        let inst = generate(&GeneratorConfig::anisotropic(30, 10, 10.0, 2.0, 6.0, 17)).unwrap();
        let topo = Topology::build(&inst);
        for i in 0..topo.num_tps() {
            for (rank, &j) in topo.covering(i).iter().enumerate() {
                let pair = topo.pair_by_rank(i, rank);
                assert_eq!(pair.site, j);
                let mut both: Vec<usize> = pair
                    .compatible
                    .iter()
                    .chain(pair.incompatible.iter())
                    .copied()
                    .collect();
                both.sort_unstable();
                let mut expect: Vec<usize> =
                    topo.covering(i).iter().copied().filter(|&k| k != j).collect();
                expect.sort_unstable();
                assert_eq!(both, expect, "J_ij and Jhat_ij must partition J_i minus j");
                assert!(pair.n_cs.iter().all(|h| pair.n_sf.binary_search(h).is_err()));
                assert!(!pair.n_cs.contains(&i));
                assert!(!pair.n_sf.contains(&i));
            }
        }
    }

    #[test]
    fn neighbor_symmetry() {
        let inst = generate(&GeneratorConfig::anisotropic(40, 12, 12.0, 2.0, 5.0, 23)).unwrap();
        let topo = Topology::build(&inst);
        for i in 0..topo.num_tps() {
            for &h in topo.neighbors(i) {
                assert!(
                    topo.neighbors(h).binary_search(&i).is_ok(),
                    "neighbor relation must be symmetric ({i}, {h})"
                );
            }
        }
    }

    #[test]
    fn associate_inst_a() {
        let inst = inst_a();
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, [0, 1]).unwrap();
        let assoc = associate(&topo, &cover).unwrap();
        assert_eq!(assoc.as_slice(), &[0, 0, 1]);
    }

    #[test]
    fn associate_full_site_set_picks_order_head() {
        let inst = generate(&GeneratorConfig::anisotropic(20, 7, 9.0, 2.0, 5.0, 8)).unwrap();
        let topo = Topology::build(&inst);
        let all = Cover::new(&topo, 0..topo.num_css()).unwrap();
        let assoc = associate(&topo, &all).unwrap();
        for i in 0..topo.num_tps() {
            assert_eq!(assoc.ap(i), topo.covering(i)[0]);
        }
    }

    #[test]
    fn associate_rejects_non_cover() {
        let inst = inst_a();
        let topo = Topology::build(&inst);
        assert_eq!(Cover::new(&topo, [1]), Err(NotACover { tp: 0 }));
        let not_cover = Cover::unchecked([1]);
        assert_eq!(associate(&topo, &not_cover), Err(NotACover { tp: 0 }));
    }

    #[test]
    fn interferers_on_inst_a() {
        let inst = inst_a();
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, [0, 1]).unwrap();
        let assoc = associate(&topo, &cover).unwrap();

        let same: FrequencyMap = [(0, 0), (1, 0)].into();
        let phi = interferers(&topo, &cover, &assoc, &same);
        assert_eq!(phi, vec![vec![1], vec![0, 2], vec![1]]);

        let split: FrequencyMap = [(0, 0), (1, 1)].into();
        let phi = interferers(&topo, &cover, &assoc, &split);
        assert_eq!(phi, vec![vec![1], vec![0], vec![]]);
    }

    #[test]
    fn single_ap_interferers_are_all_neighbors() {
        let inst = generate(&GeneratorConfig::isotropic(8, 1, 2.0, 4.0, 3)).unwrap();
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, [0]).unwrap();
        let assoc = associate(&topo, &cover).unwrap();
        let freq: FrequencyMap = [(0, 0)].into();
        let phi = interferers(&topo, &cover, &assoc, &freq);
        for i in 0..topo.num_tps() {
            let expect: Vec<usize> = topo.neighbors(i).iter().copied().filter(|&h| h != i).collect();
            assert_eq!(phi[i], expect);
        }
    }

    #[test]
    fn interference_symmetry_and_sandwich() {
        for seed in [1u64, 2, 3] {
            let inst = generate(&GeneratorConfig::anisotropic(25, 8, 10.0, 2.0, 6.0, seed)).unwrap();
            let topo = Topology::build(&inst);
            let all = Cover::new(&topo, 0..topo.num_css()).unwrap();
            let assoc = associate(&topo, &all).unwrap();
            let freq: FrequencyMap = all.sites().iter().map(|&j| (j, j % 3)).collect();
            let phi = interferers(&topo, &all, &assoc, &freq);
            let phi_sf = interferers_sf(&topo, &assoc);
            let phi_cs = interferers_cs(&topo, &assoc);
            for i in 0..topo.num_tps() {
                for &h in &phi[i] {
                    assert!(phi[h].contains(&i), "interference must be symmetric");
                }
                assert!(phi_cs[i].iter().all(|h| phi[i].contains(h)));
                assert!(phi[i].iter().all(|h| phi_sf[i].contains(h)));
            }
        }
    }

    #[test]
    fn n_sf_matches_brute_force_on_small_instances() {
        for seed in [5u64, 6, 7] {
            let inst = generate(&GeneratorConfig::anisotropic(15, 6, 8.0, 2.0, 5.0, seed)).unwrap();
            let topo = Topology::build(&inst);
            for i in 0..topo.num_tps() {
                for &j in topo.covering(i) {
                    let pair = topo.pair(i, j);
                    let mut expect: Vec<usize> = (0..topo.num_tps())
                        .filter(|&h| {
                            pair.compatible.iter().any(|&k| topo.covers_tp(k, h))
                                && !topo.covers_tp(j, h)
                        })
                        .collect();
                    expect.sort_unstable();
                    assert_eq!(pair.n_sf, expect);
                }
            }
        }
    }
}
