//! Independent brute-force references used by the test suites.
//!
//! The functions here share only the [`Instance`] type with the rest of the
//! crate: associations, interferer sets and objective values are re-derived
//! from the raw instance data with plain enumeration, no pruning and no
//! caching, so they can serve as oracles for the optimized implementations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("instance too large for brute force: {0}")]
pub struct TooLarge(pub String);

/// The reference micro-instance: two sites, three TPs.
///
/// Site 0 covers TPs {0, 1}, site 1 covers TPs {1, 2}; TP 1 hears site 0
/// stronger than site 1; every rate is 54 Mbps. The only cover is {0, 1}.
pub fn inst_a() -> Instance {
    let rates: BTreeMap<(usize, usize), u32> =
        [((0, 0), 54), ((1, 0), 54), ((1, 1), 54), ((2, 1), 54)].into();
    Instance::from_signal_order(
        vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
        vec![[0.5, 0.0], [1.5, 0.0]],
        3,
        vec![vec![0], vec![0, 1], vec![1]],
        rates,
    )
    .expect("reference instance is valid")
}

/// A micro-instance whose AP overlap graph is the complete graph on four
/// sites: one TP per site pair, covered by exactly that pair, all rates 54.
pub fn inst_k4() -> Instance {
    let mut rates: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut orders = Vec::new();
    let mut tp_pos = Vec::new();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        orders.push(vec![a, b]);
        rates.insert((i, a), 54);
        rates.insert((i, b), 54);
        tp_pos.push([i as f64, 0.0]);
    }
    let cs_pos = vec![[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [3.0, 1.0]];
    Instance::from_signal_order(tp_pos, cs_pos, 3, orders, rates).expect("fixture is valid")
}

fn covers_all(inst: &Instance, sites: &[usize]) -> bool {
    inst.signal_order
        .iter()
        .all(|order| order.iter().any(|j| sites.contains(j)))
}

fn assoc_of(inst: &Instance, sites: &[usize]) -> Vec<usize> {
    inst.signal_order
        .iter()
        .map(|order| *order.iter().find(|j| sites.contains(j)).expect("cover"))
        .collect()
}

fn in_order(inst: &Instance, tp: usize, cs: usize) -> bool {
    inst.signal_order[tp].contains(&cs)
}

fn rate(inst: &Instance, tp: usize, cs: usize) -> f64 {
    f64::from(inst.rates[&(tp, cs)])
}

fn eval(inst: &Instance, assoc: &[usize], freq_of_ap: &BTreeMap<usize, usize>) -> f64 {
    let n = inst.num_tps();
    (0..n)
        .map(|i| {
            let ai = assoc[i];
            let phi = (0..n)
                .filter(|&h| {
                    h != i
                        && freq_of_ap[&ai] == freq_of_ap[&assoc[h]]
                        && (in_order(inst, h, ai) || in_order(inst, i, assoc[h]))
                })
                .count();
            rate(inst, i, ai) / (1.0 + phi as f64)
        })
        .sum()
}

fn eval_pcs(inst: &Instance, assoc: &[usize], alpha: f64) -> f64 {
    let n = inst.num_tps();
    (0..n)
        .map(|i| {
            let ai = assoc[i];
            let sf = (0..n)
                .filter(|&h| h != i && (in_order(inst, h, ai) || in_order(inst, i, assoc[h])))
                .count();
            let cs = (0..n).filter(|&h| h != i && assoc[h] == ai).count();
            rate(inst, i, ai) / (1.0 + alpha * sf as f64 + (1.0 - alpha) * cs as f64)
        })
        .sum()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1 << n)).map(move |mask| (0..n).filter(|&j| mask & (1 << j) != 0).collect())
}

/// All frequency maps on `sites` in canonical (restricted-growth) form:
/// the first site takes label 0 and a new label may appear only after all
/// smaller labels, capped at `num_freqs` labels.
pub fn canonical_maps(sites: &[usize], num_freqs: usize) -> Vec<BTreeMap<usize, usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; sites.len()];
    fn rec(
        sites: &[usize],
        num_freqs: usize,
        pos: usize,
        max_used: usize,
        labels: &mut Vec<usize>,
        out: &mut Vec<BTreeMap<usize, usize>>,
    ) {
        if pos == sites.len() {
            out.push(sites.iter().copied().zip(labels.iter().copied()).collect());
            return;
        }
        let cap = (max_used + 1).min(num_freqs - 1);
        for label in 0..=cap {
            labels[pos] = label;
            rec(sites, num_freqs, pos + 1, max_used.max(label), labels, out);
        }
    }
    if sites.is_empty() {
        out.push(BTreeMap::new());
    } else {
        rec(sites, num_freqs, 0, 0, &mut labels, &mut out);
    }
    out
}

/// All `num_freqs^|sites|` frequency maps, no symmetry reduction.
pub fn all_maps(sites: &[usize], num_freqs: usize) -> Vec<BTreeMap<usize, usize>> {
    let mut out = Vec::new();
    let total = (num_freqs as u64).pow(sites.len() as u32);
    for mut code in 0..total {
        let mut map = BTreeMap::new();
        for &j in sites {
            map.insert(j, (code % num_freqs as u64) as usize);
            code /= num_freqs as u64;
        }
        out.push(map);
    }
    out
}

/// Global optimum of the joint planning problem by exhaustive enumeration of
/// covers and canonical frequency maps.
pub fn brute_force_wpp(
    inst: &Instance,
    num_freqs: usize,
) -> Result<(Vec<usize>, BTreeMap<usize, usize>, f64), TooLarge> {
    if inst.num_css() > 16 {
        return Err(TooLarge(format!("{} candidate sites", inst.num_css())));
    }
    let mut best: Option<(Vec<usize>, BTreeMap<usize, usize>, f64)> = None;
    for sites in subsets(inst.num_css()) {
        if !covers_all(inst, &sites) {
            continue;
        }
        let assoc = assoc_of(inst, &sites);
        for freq in canonical_maps(&sites, num_freqs) {
            let obj = eval(inst, &assoc, &freq);
            let better = match &best {
                None => true,
                Some((bs, _, bo)) => obj > bo + 1e-9 || ((obj - bo).abs() <= 1e-9 && sites < *bs),
            };
            if better {
                best = Some((sites.clone(), freq, obj));
            }
        }
    }
    best.ok_or_else(|| TooLarge("no cover exists".into()))
}

/// Optimal cover for the partial-separation objective by plain enumeration.
pub fn brute_force_psap(inst: &Instance, alpha: f64) -> Result<(Vec<usize>, f64), TooLarge> {
    if inst.num_css() > 16 {
        return Err(TooLarge(format!("{} candidate sites", inst.num_css())));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for sites in subsets(inst.num_css()) {
        if !covers_all(inst, &sites) {
            continue;
        }
        let obj = eval_pcs(inst, &assoc_of(inst, &sites), alpha);
        let better = match &best {
            None => true,
            Some((bs, bo)) => obj > bo + 1e-9 || ((obj - bo).abs() <= 1e-9 && sites < *bs),
        };
        if better {
            best = Some((sites, obj));
        }
    }
    best.ok_or_else(|| TooLarge("no cover exists".into()))
}

/// Optimal frequency assignment for a fixed cover over all `|F|^|S|` maps.
pub fn brute_force_wfap(
    inst: &Instance,
    sites: &[usize],
    num_freqs: usize,
) -> Result<(BTreeMap<usize, usize>, f64), TooLarge> {
    let count = (num_freqs as f64).powi(sites.len() as i32);
    if count > 1e7 {
        return Err(TooLarge(format!("{count} frequency maps")));
    }
    if !covers_all(inst, sites) {
        return Err(TooLarge("site set is not a cover".into()));
    }
    let assoc = assoc_of(inst, sites);
    let mut best: Option<(BTreeMap<usize, usize>, f64)> = None;
    for freq in all_maps(sites, num_freqs) {
        let obj = eval(inst, &assoc, &freq);
        if best.as_ref().is_none_or(|(_, bo)| obj > *bo) {
            best = Some((freq, obj));
        }
    }
    Ok(best.expect("at least one map"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, GeneratorConfig};

    #[test]
    fn wpp_on_reference_instance() {
        let inst = inst_a();
        let (sites, freq, obj) = brute_force_wpp(&inst, 2).unwrap();
        assert_eq!(sites, vec![0, 1]);
        assert_ne!(freq[&0], freq[&1]);
        assert_eq!(obj, 108.0);

        // single frequency: the only cover scores e_sf
        let (sites, _, obj) = brute_force_wpp(&inst, 1).unwrap();
        assert_eq!(sites, vec![0, 1]);
        assert_eq!(obj, 72.0);
    }

    #[test]
    fn wpp_single_tp_single_cs() {
        let inst = generate(&GeneratorConfig::isotropic(1, 1, 0.5, 2.0, 2)).unwrap();
        let (sites, _, obj) = brute_force_wpp(&inst, 2).unwrap();
        assert_eq!(sites, vec![0]);
        assert_eq!(obj, f64::from(inst.rate(0, 0)));
    }

    #[test]
    fn psap_on_reference_instance() {
        let inst = inst_a();
        let (sites, obj) = brute_force_psap(&inst, 0.0).unwrap();
        assert_eq!((sites, obj), (vec![0, 1], 108.0));
        // alpha = 1: the only cover scores e_sf
        let (sites, obj) = brute_force_psap(&inst, 1.0).unwrap();
        assert_eq!((sites, obj), (vec![0, 1], 72.0));
    }

    #[test]
    fn wfap_single_frequency_is_sf() {
        let inst = inst_a();
        let (freq, obj) = brute_force_wfap(&inst, &[0, 1], 1).unwrap();
        assert_eq!(freq.values().collect::<Vec<_>>(), vec![&0, &0]);
        assert_eq!(obj, 72.0);
    }

    #[test]
    fn canonical_enumeration_matches_full_enumeration() {
        for seed in [3u64, 4] {
            let inst = generate(&GeneratorConfig::anisotropic(10, 5, 8.0, 2.0, 5.0, seed)).unwrap();
            let sites: Vec<usize> = (0..inst.num_css()).collect();
            let assoc = assoc_of(&inst, &sites);
            for num_freqs in [2usize, 3] {
                let full_best = all_maps(&sites, num_freqs)
                    .iter()
                    .map(|f| eval(&inst, &assoc, f))
                    .fold(f64::NEG_INFINITY, f64::max);
                let canon_best = canonical_maps(&sites, num_freqs)
                    .iter()
                    .map(|f| eval(&inst, &assoc, f))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!((full_best - canon_best).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn too_large_is_reported() {
        let inst = generate(&GeneratorConfig::isotropic(4, 2, 4.0, 6.0, 1)).unwrap();
        assert!(brute_force_wfap(&inst, &[0, 1], 10_000).is_err());
    }

    #[test]
    fn two_phase_composition_never_beats_the_joint_optimum() {
        use crate::aploc::{solve_exact, PsapBudget};
        use crate::efficiency::Alpha;
        use crate::freqassign::{prune_unused_aps, solve_exact_fa, FaBudget};
        use crate::topology::Topology;

        for seed in [1u64, 2, 3, 4] {
            let inst = generate(&GeneratorConfig::anisotropic(8, 4, 8.0, 2.0, 5.0, seed)).unwrap();
            let topo = Topology::build(&inst);
            for num_freqs in [2usize, 3] {
                let (_, _, joint) = brute_force_wpp(&inst, num_freqs).unwrap();
                for a in [0.0, 0.3, 0.6, 1.0] {
                    let psap = solve_exact(&topo, Alpha::new(a).unwrap(), &PsapBudget::default());
                    let pruned = prune_unused_aps(&topo, &psap.cover).unwrap();
                    let fa = solve_exact_fa(&topo, &pruned, num_freqs, &FaBudget::default()).unwrap();
                    assert!(
                        fa.value.total <= joint + 1e-9,
                        "seed {seed} |F|={num_freqs} a={a}: {} beats joint {joint}",
                        fa.value.total
                    );
                }
            }
        }
    }
}
