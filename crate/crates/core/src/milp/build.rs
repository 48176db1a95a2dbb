//! Builders for the five 0-1 formulations and the design embedder.
//!
//! Hyperbolic objectives are linearized with per-TP (or per-pair) term
//! variables `c` whose defining equality `c * denom = rate * pick` couples
//! them to the binary decisions; products `c * b` get standard two-row
//! linearizations with bounds `[0, c_bar]` (the lower bound 0 and constant
//! upper bound live on the variable, the two coupling rows on the model).

use itertools::Itertools;

use super::{MilpError, MilpModel, ModelInfo, Relation, SolutionVector, VarClass, VarKind};
use crate::aploc::enumerate_scenarios;
use crate::efficiency::Alpha;
use crate::freqassign::FixedAssociationSets;
use crate::topology::{associate, Cover, FrequencyMap, Topology};

/// Default cap on pigeonhole rows for the partition formulations.
pub const DEFAULT_ROW_BUDGET: u64 = 2_000_000;

/// Default per-TP cap on enumerated flexible-AP subsets.
pub const DEFAULT_SUBSET_CAP: u64 = 4096;

/// The two compact linearizations of the hyperbolic AP location model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinVariant {
    /// Direct linearization: one product per interference pair and one per
    /// co-association pair, with explicit pair-interference variables.
    LinA,
    /// Aggregated substitution: pair-interference variables are eliminated
    /// through the association variables before linearizing, which folds the
    /// same-AP part into the term coefficient and needs fewer products.
    LinB,
}

impl LinVariant {
    pub fn label(self) -> &'static str {
        match self {
            LinVariant::LinA => "lin_a",
            LinVariant::LinB => "lin_b",
        }
    }
}

/// A design solution to embed into a model.
#[derive(Debug, Clone, Copy)]
pub enum Design<'a> {
    /// A cover; the association is implied. For AP location models.
    Cover(&'a Cover),
    /// A cover with a frequency assignment. For frequency assignment models.
    Assignment(&'a Cover, &'a FrequencyMap),
}

fn x_name(j: usize) -> String {
    format!("x_{j}")
}

fn l_name(i: usize, j: usize) -> String {
    format!("l_{i}_{j}")
}

fn y_name(i: usize, h: usize) -> String {
    format!("y_{}_{}", i.min(h), i.max(h))
}

fn v_name(j: usize, k: usize) -> String {
    format!("v_{}_{}", j.min(k), j.max(k))
}

/// Shared site/association variables and rows of the AP location models.
fn psap_base(model: &mut MilpModel, topo: &Topology) {
    for j in 0..topo.num_css() {
        model.add_binary(x_name(j), VarClass::SiteOpen);
    }
    for i in 0..topo.num_tps() {
        for &j in topo.covering(i) {
            model.add_binary(l_name(i, j), VarClass::Assoc);
        }
    }
    for i in 0..topo.num_tps() {
        let terms = topo
            .covering(i)
            .iter()
            .map(|&j| (model.var(&l_name(i, j)).unwrap(), 1.0))
            .collect();
        model.add_row(format!("assoc_{i}"), terms, Relation::Eq, 1.0);
    }
    for i in 0..topo.num_tps() {
        for &j in topo.covering(i) {
            let l = model.var(&l_name(i, j)).unwrap();
            let x = model.var(&x_name(j)).unwrap();
            model.add_row(
                format!("open_{i}_{j}"),
                vec![(l, 1.0), (x, -1.0)],
                Relation::Le,
                0.0,
            );
        }
    }
    // an installed AP forbids association to anything it beats
    for i in 0..topo.num_tps() {
        for &j in topo.covering(i) {
            let mut terms = vec![(model.var(&x_name(j)).unwrap(), 1.0)];
            for &k in &topo.pair(i, j).compatible {
                terms.push((model.var(&l_name(i, k)).unwrap(), 1.0));
            }
            model.add_row(format!("best_{i}_{j}"), terms, Relation::Le, 1.0);
        }
    }
}

fn neighbors_of(topo: &Topology, i: usize) -> impl Iterator<Item = usize> + '_ {
    topo.neighbors(i).iter().copied().filter(move |&h| h != i)
}

fn shared_sites(topo: &Topology, i: usize, h: usize) -> Vec<usize> {
    topo.covering(i)
        .iter()
        .copied()
        .filter(|&j| topo.covers_tp(j, h))
        .collect()
}

/// Compact linearization of the hyperbolic AP location model.
///
/// Objective `max sum c_ij` with defining rows coupling each term to its
/// interference counts; variant [`LinVariant::LinA`] keeps the
/// pair-interference variables, [`LinVariant::LinB`] substitutes them away.
pub fn build_psap_lin(topo: &Topology, alpha: Alpha, variant: LinVariant) -> MilpModel {
    let a = alpha.value();
    let mut model = MilpModel::new(
        format!("psap_{}", variant.label()),
        ModelInfo::PsapLin {
            alpha: a,
            variant,
        },
    );
    psap_base(&mut model, topo);

    if variant == LinVariant::LinA {
        for i in 0..topo.num_tps() {
            for h in neighbors_of(topo, i) {
                if h > i {
                    model.add_binary(y_name(i, h), VarClass::PairInterference);
                }
            }
        }
        for i in 0..topo.num_tps() {
            for h in neighbors_of(topo, i) {
                let y = model.var(&y_name(i, h)).unwrap();
                let mut terms = vec![(y, 1.0)];
                for j in shared_sites(topo, i, h) {
                    terms.push((model.var(&l_name(i, j)).unwrap(), -1.0));
                }
                model.add_row(format!("sfint_{i}_{h}"), terms, Relation::Ge, 0.0);
            }
        }
    }

    for i in 0..topo.num_tps() {
        for &j in topo.covering(i) {
            let rate = f64::from(topo.instance().rate(i, j));
            model.add_var(
                format!("c_{i}_{j}"),
                VarKind::Continuous,
                0.0,
                rate,
                VarClass::TpTerm,
            );
        }
    }

    for i in 0..topo.num_tps() {
        for &j in topo.covering(i) {
            let rate = f64::from(topo.instance().rate(i, j));
            let c = model.var(&format!("c_{i}_{j}")).unwrap();
            let l = model.var(&l_name(i, j)).unwrap();
            let n_cs = topo.pair(i, j).n_cs.clone();

            let mut def_terms: Vec<(usize, f64)> = Vec::new();
            match variant {
                LinVariant::LinA => {
                    def_terms.push((c, 1.0));
                    if a > 0.0 {
                        for h in neighbors_of(topo, i) {
                            let y = model.var(&y_name(i, h)).unwrap();
                            let z = product(&mut model, format!("zy_{i}_{h}_{j}"), rate, c, vec![y]);
                            def_terms.push((z, a));
                        }
                    }
                    if a < 1.0 {
                        for &h in &n_cs {
                            let lh = model.var(&l_name(h, j)).unwrap();
                            let z = product(&mut model, format!("zl_{i}_{h}_{j}"), rate, c, vec![lh]);
                            def_terms.push((z, 1.0 - a));
                        }
                    }
                }
                LinVariant::LinB => {
                    // same-AP interference folds into the term coefficient;
                    // cross-AP interference becomes a product with the
                    // aggregated association indicator of the other TP
                    def_terms.push((c, 1.0 + a * n_cs.len() as f64));
                    if a > 0.0 {
                        for h in neighbors_of(topo, i) {
                            if topo.covers_tp(j, h) {
                                continue;
                            }
                            let bins: Vec<usize> = shared_sites(topo, i, h)
                                .into_iter()
                                .map(|k| model.var(&l_name(h, k)).unwrap())
                                .collect();
                            let z = product(&mut model, format!("zb_{i}_{h}_{j}"), rate, c, bins);
                            def_terms.push((z, a));
                        }
                    }
                    if a < 1.0 {
                        for &h in &n_cs {
                            let lh = model.var(&l_name(h, j)).unwrap();
                            let z = product(&mut model, format!("zl_{i}_{h}_{j}"), rate, c, vec![lh]);
                            def_terms.push((z, 1.0 - a));
                        }
                    }
                }
            }
            def_terms.push((l, -rate));
            model.add_defining_row(format!("def_{i}_{j}"), c, def_terms, 0.0);
        }
    }

    let objective = (0..topo.num_tps())
        .flat_map(|i| {
            topo.covering(i)
                .iter()
                .map(move |&j| (i, j))
                .collect::<Vec<_>>()
        })
        .map(|(i, j)| (model.var(&format!("c_{i}_{j}")).unwrap(), 1.0))
        .collect();
    model.objective = objective;
    model
}

/// Adds a product variable `z = term * sum(bins)` with its two coupling rows
/// `z >= term - c_bar*(1 - sum(bins))` and `z <= term`.
fn product(model: &mut MilpModel, name: String, c_bar: f64, term: usize, bins: Vec<usize>) -> usize {
    let z = model.add_product_var(name.clone(), c_bar, term, bins.clone());
    let mut lo = vec![(term, 1.0), (z, -1.0)];
    for &b in &bins {
        lo.push((b, c_bar));
    }
    model.add_row(format!("{name}_lo"), lo, Relation::Le, c_bar);
    model.add_row(
        format!("{name}_hi"),
        vec![(z, 1.0), (term, -1.0)],
        Relation::Le,
        0.0,
    );
    z
}

/// Enumerative AP location model: one binary per interference scenario.
pub fn build_psap_enum(topo: &Topology, alpha: Alpha, cap: u64) -> Result<MilpModel, MilpError> {
    let mut scenarios = Vec::with_capacity(topo.num_tps());
    for i in 0..topo.num_tps() {
        scenarios.push(enumerate_scenarios(topo, i, alpha, cap)?);
    }
    let mut model = MilpModel::new(
        "psap_l",
        ModelInfo::PsapEnum {
            alpha: alpha.value(),
            scenarios: scenarios.clone(),
        },
    );
    psap_base(&mut model, topo);

    let w_name = |i: usize, s: usize| format!("w_{i}_s{s}");
    for (i, list) in scenarios.iter().enumerate() {
        for s in 0..list.len() {
            model.add_binary(w_name(i, s), VarClass::Scenario);
        }
    }

    // each association picks exactly the scenarios of its serving site
    for (i, list) in scenarios.iter().enumerate() {
        for &j in topo.covering(i) {
            let mut terms: Vec<(usize, f64)> = list
                .iter()
                .enumerate()
                .filter(|(_, sc)| sc.site == j)
                .map(|(s, _)| (model.var(&w_name(i, s)).unwrap(), 1.0))
                .collect();
            terms.push((model.var(&l_name(i, j)).unwrap(), -1.0));
            model.add_row(format!("pick_{i}_{j}"), terms, Relation::Eq, 0.0);
        }
    }

    // symmetry of the interference relation, scenario-side
    for i in 0..topo.num_tps() {
        for h in neighbors_of(topo, i) {
            if h < i {
                continue;
            }
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for (s, sc) in scenarios[i].iter().enumerate() {
                if sc.hidden.contains(&h) {
                    terms.push((model.var(&w_name(i, s)).unwrap(), 1.0));
                }
            }
            for j in shared_sites(topo, i, h) {
                terms.push((model.var(&l_name(i, j)).unwrap(), 1.0));
            }
            for (s, sc) in scenarios[h].iter().enumerate() {
                if sc.hidden.contains(&i) {
                    terms.push((model.var(&w_name(h, s)).unwrap(), -1.0));
                }
            }
            for j in shared_sites(topo, i, h) {
                terms.push((model.var(&l_name(h, j)).unwrap(), -1.0));
            }
            model.add_row(format!("sym_{i}_{h}"), terms, Relation::Eq, 0.0);
        }
    }

    // linearized bilinear coupling: h appears in the chosen scenario's
    // same-AP set exactly when both TPs associate to the site
    for i in 0..topo.num_tps() {
        for &j in topo.covering(i) {
            for &h in &topo.pair(i, j).n_cs {
                let picked: Vec<(usize, f64)> = scenarios[i]
                    .iter()
                    .enumerate()
                    .filter(|(_, sc)| sc.site == j && sc.same_ap.contains(&h))
                    .map(|(s, _)| (model.var(&w_name(i, s)).unwrap(), 1.0))
                    .collect();
                let l_ij = model.var(&l_name(i, j)).unwrap();
                let l_hj = model.var(&l_name(h, j)).unwrap();
                let mut le = picked.clone();
                le.push((l_hj, -1.0));
                model.add_row(format!("csleq_{i}_{j}_{h}"), le, Relation::Le, 0.0);
                let mut ge = picked;
                ge.push((l_ij, -1.0));
                ge.push((l_hj, -1.0));
                model.add_row(format!("csgeq_{i}_{j}_{h}"), ge, Relation::Ge, -1.0);
            }
        }
    }

    model.objective = scenarios
        .iter()
        .enumerate()
        .flat_map(|(i, list)| {
            list.iter()
                .enumerate()
                .map(move |(s, sc)| (i, s, sc.coeff))
                .collect::<Vec<_>>()
        })
        .map(|(i, s, coeff)| (model.var(&w_name(i, s)).unwrap(), coeff))
        .collect();
    Ok(model)
}

/// Frequency assignment model with explicit frequency-pick variables and
/// AND-linearized frequency products.
pub fn build_wfap_h(
    topo: &Topology,
    cover: &Cover,
    num_freqs: usize,
) -> Result<MilpModel, MilpError> {
    assert!(num_freqs >= 1);
    let sets = FixedAssociationSets::build(topo, cover)
        .map_err(|e| MilpError::InconsistentDesign(e.to_string()))?;
    let sites = cover.sites().to_vec();
    let mut model = MilpModel::new(
        "wfap_h",
        ModelInfo::WfapH {
            sites: sites.clone(),
            num_freqs,
        },
    );

    let xf = |j: usize, f: usize| format!("x_{j}_{f}");
    for &j in &sites {
        for f in 0..num_freqs {
            model.add_binary(xf(j, f), VarClass::FreqPick);
        }
    }

    // AP pairs that serve some flexible TP pair
    let ap_pairs: Vec<(usize, usize)> = sets
        .per_tp
        .iter()
        .enumerate()
        .flat_map(|(i, tp)| {
            tp.flexible_aps
                .iter()
                .map(move |&k| (tp.ap.min(k), tp.ap.max(k)))
                .collect::<Vec<_>>()
                .into_iter()
                .map(move |p| (i, p))
        })
        .map(|(_, p)| p)
        .sorted()
        .dedup()
        .collect();
    let q_name = |j: usize, k: usize, f: usize| format!("q_{j}_{k}_{f}");
    for &(j, k) in &ap_pairs {
        for f in 0..num_freqs {
            model.add_binary(q_name(j, k, f), VarClass::FreqAnd);
        }
    }

    let mut tp_pairs: Vec<(usize, usize)> = Vec::new();
    for (i, tp) in sets.per_tp.iter().enumerate() {
        for &h in &tp.flexible {
            if h > i {
                tp_pairs.push((i, h));
            }
        }
    }
    for &(i, h) in &tp_pairs {
        model.add_binary(y_name(i, h), VarClass::PairInterference);
    }

    for (i, tp) in sets.per_tp.iter().enumerate() {
        model.add_var(
            format!("c_{i}"),
            VarKind::Continuous,
            0.0,
            tp.rate / (1.0 + tp.same_ap.len() as f64),
            VarClass::TpTerm,
        );
    }

    for &j in &sites {
        let terms = (0..num_freqs)
            .map(|f| (model.var(&xf(j, f)).unwrap(), 1.0))
            .collect();
        model.add_row(format!("freq_{j}"), terms, Relation::Eq, 1.0);
    }
    for &(j, k) in &ap_pairs {
        for f in 0..num_freqs {
            let q = model.var(&q_name(j, k, f)).unwrap();
            let a = model.var(&xf(j, f)).unwrap();
            let b = model.var(&xf(k, f)).unwrap();
            model.add_row(
                format!("qand_{j}_{k}_{f}_a"),
                vec![(q, 1.0), (a, -1.0)],
                Relation::Le,
                0.0,
            );
            model.add_row(
                format!("qand_{j}_{k}_{f}_b"),
                vec![(q, 1.0), (b, -1.0)],
                Relation::Le,
                0.0,
            );
            model.add_row(
                format!("qand_{j}_{k}_{f}_c"),
                vec![(q, 1.0), (a, -1.0), (b, -1.0)],
                Relation::Ge,
                -1.0,
            );
        }
    }
    for &(i, h) in &tp_pairs {
        let (j, k) = {
            let a = sets.per_tp[i].ap;
            let b = sets.per_tp[h].ap;
            (a.min(b), a.max(b))
        };
        let mut terms = vec![(model.var(&y_name(i, h)).unwrap(), 1.0)];
        for f in 0..num_freqs {
            terms.push((model.var(&q_name(j, k, f)).unwrap(), -1.0));
        }
        model.add_row(format!("ydef_{i}_{h}"), terms, Relation::Eq, 0.0);
    }

    hyperbolic_terms(&mut model, &sets, y_name);
    model.objective = (0..sets.per_tp.len())
        .map(|i| (model.var(&format!("c_{i}")).unwrap(), 1.0))
        .collect();
    Ok(model)
}

/// Adds per-TP defining rows and products for the hyperbolic objective of
/// the frequency assignment models; `pair_var` names the binary that is 1
/// when the two TPs' APs share a frequency.
fn hyperbolic_terms(
    model: &mut MilpModel,
    sets: &FixedAssociationSets,
    pair_var: impl Fn(usize, usize) -> String,
) {
    for (i, tp) in sets.per_tp.iter().enumerate() {
        let c = model.var(&format!("c_{i}")).unwrap();
        let c_bar = tp.rate / (1.0 + tp.same_ap.len() as f64);
        let mut terms = vec![(c, 1.0 + tp.same_ap.len() as f64)];
        for &h in &tp.flexible {
            let y = model.var(&pair_var(i, h)).unwrap();
            let z = product(model, format!("z_{i}_{h}"), c_bar, c, vec![y]);
            terms.push((z, 1.0));
        }
        model.add_defining_row(format!("cdef_{i}"), c, terms, tp.rate);
    }
}

fn pigeonhole_and_transitivity(
    model: &mut MilpModel,
    sites: &[usize],
    num_freqs: usize,
    row_budget: u64,
) -> Result<(), MilpError> {
    let t = match num_freqs {
        2 => 3,
        3 => 4,
        other => panic!("partition formulation supports 2 or 3 frequencies, got {other}"),
    };
    if sites.len() >= t {
        let mut rows: u128 = 1;
        for k in 0..t {
            rows = rows * (sites.len() - k) as u128 / (k + 1) as u128;
        }
        if rows > u128::from(row_budget) {
            return Err(MilpError::TooManyAps {
                sites: sites.len(),
                rows,
                budget: row_budget,
            });
        }
    }
    for subset in sites.iter().copied().combinations(t) {
        let name = format!("pigeon_{}", subset.iter().join("_"));
        let terms = subset
            .iter()
            .copied()
            .tuple_combinations()
            .map(|(j, k)| (model.var(&v_name(j, k)).unwrap(), 1.0))
            .collect();
        model.add_row(name, terms, Relation::Ge, 1.0);
    }
    for triple in sites.iter().copied().combinations(3) {
        let (j, k, l) = (triple[0], triple[1], triple[2]);
        let vjk = model.var(&v_name(j, k)).unwrap();
        let vkl = model.var(&v_name(k, l)).unwrap();
        let vjl = model.var(&v_name(j, l)).unwrap();
        model.add_row(
            format!("tri_{j}_{k}_{l}_a"),
            vec![(vjk, 1.0), (vjl, -1.0), (vkl, -1.0)],
            Relation::Ge,
            -1.0,
        );
        model.add_row(
            format!("tri_{j}_{k}_{l}_b"),
            vec![(vkl, 1.0), (vjk, -1.0), (vjl, -1.0)],
            Relation::Ge,
            -1.0,
        );
        model.add_row(
            format!("tri_{j}_{k}_{l}_c"),
            vec![(vjl, 1.0), (vjk, -1.0), (vkl, -1.0)],
            Relation::Ge,
            -1.0,
        );
    }
    Ok(())
}

/// Frequency assignment model over an implicit partition of the APs:
/// same-frequency pair variables with pigeonhole and transitivity rows.
pub fn build_wfap_h2(
    topo: &Topology,
    cover: &Cover,
    num_freqs: usize,
    row_budget: u64,
) -> Result<MilpModel, MilpError> {
    let sets = FixedAssociationSets::build(topo, cover)
        .map_err(|e| MilpError::InconsistentDesign(e.to_string()))?;
    let sites = cover.sites().to_vec();
    let mut model = MilpModel::new(
        "wfap_h2",
        ModelInfo::WfapH2 {
            sites: sites.clone(),
            num_freqs,
        },
    );
    for (j, k) in sites.iter().copied().tuple_combinations() {
        model.add_binary(v_name(j, k), VarClass::SamePartition);
    }
    for (i, tp) in sets.per_tp.iter().enumerate() {
        model.add_var(
            format!("c_{i}"),
            VarKind::Continuous,
            0.0,
            tp.rate / (1.0 + tp.same_ap.len() as f64),
            VarClass::TpTerm,
        );
    }
    pigeonhole_and_transitivity(&mut model, &sites, num_freqs, row_budget)?;
    let ap_of: Vec<usize> = sets.per_tp.iter().map(|tp| tp.ap).collect();
    hyperbolic_terms(&mut model, &sets, |i, h| v_name(ap_of[i], ap_of[h]));
    model.objective = (0..sets.per_tp.len())
        .map(|i| (model.var(&format!("c_{i}")).unwrap(), 1.0))
        .collect();
    Ok(model)
}

/// Enumerative frequency assignment model: one binary per TP and subset of
/// its flexible-AP set, linked to the partition variables.
pub fn build_wfap_enum(
    topo: &Topology,
    cover: &Cover,
    num_freqs: usize,
    subset_cap: u64,
) -> Result<MilpModel, MilpError> {
    let sets = FixedAssociationSets::build(topo, cover)
        .map_err(|e| MilpError::InconsistentDesign(e.to_string()))?;
    let sites = cover.sites().to_vec();

    let mut subsets: Vec<Vec<Vec<usize>>> = Vec::with_capacity(sets.per_tp.len());
    for (i, tp) in sets.per_tp.iter().enumerate() {
        let bits = tp.flexible_aps.len();
        let count = 1u128 << bits.min(127);
        if bits >= 64 || count > u128::from(subset_cap) {
            return Err(MilpError::SubsetExplosion {
                tp: i,
                count,
                cap: subset_cap,
            });
        }
        let mut list = Vec::with_capacity(count as usize);
        for mask in 0u64..(1 << bits) {
            list.push(
                tp.flexible_aps
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &ap)| ap)
                    .collect::<Vec<usize>>(),
            );
        }
        subsets.push(list);
    }

    let mut model = MilpModel::new(
        "wfap_l",
        ModelInfo::WfapEnum {
            sites: sites.clone(),
            num_freqs,
            subsets: subsets.clone(),
        },
    );
    for (j, k) in sites.iter().copied().tuple_combinations() {
        model.add_binary(v_name(j, k), VarClass::SamePartition);
    }
    let w_name = |i: usize, s: usize| format!("w_{i}_A{s}");
    for (i, list) in subsets.iter().enumerate() {
        for s in 0..list.len() {
            model.add_binary(w_name(i, s), VarClass::SubsetPick);
        }
    }
    pigeonhole_and_transitivity(&mut model, &sites, num_freqs, DEFAULT_ROW_BUDGET)?;

    // the chosen subset is exactly the set of same-frequency flexible APs
    for (i, tp) in sets.per_tp.iter().enumerate() {
        for &k in &tp.flexible_aps {
            let mut terms = vec![(model.var(&v_name(tp.ap, k)).unwrap(), 1.0)];
            for (s, subset) in subsets[i].iter().enumerate() {
                if subset.contains(&k) {
                    terms.push((model.var(&w_name(i, s)).unwrap(), -1.0));
                }
            }
            model.add_row(format!("link_{i}_{k}"), terms, Relation::Eq, 0.0);
        }
    }
    for i in 0..sets.per_tp.len() {
        let terms = (0..subsets[i].len())
            .map(|s| (model.var(&w_name(i, s)).unwrap(), 1.0))
            .collect();
        model.add_row(format!("conv_{i}"), terms, Relation::Eq, 1.0);
    }

    let mut objective = Vec::new();
    for (i, tp) in sets.per_tp.iter().enumerate() {
        for (s, subset) in subsets[i].iter().enumerate() {
            let colliding: usize = tp
                .flexible_by_ap
                .iter()
                .filter(|(ap, _)| subset.contains(ap))
                .map(|(_, n)| n)
                .sum();
            let coeff = tp.rate / (1.0 + (tp.same_ap.len() + colliding) as f64);
            objective.push((model.var(&w_name(i, s)).unwrap(), coeff));
        }
    }
    model.objective = objective;
    Ok(model)
}

fn name_indices(name: &str) -> Vec<usize> {
    name.split('_')
        .skip(1)
        .map(|tok| {
            tok.trim_start_matches(|c: char| c.is_ascii_alphabetic())
                .parse::<usize>()
                .unwrap_or_else(|_| panic!("unparseable index in variable name {name}"))
        })
        .collect()
}

/// Maps a design solution onto a model's variables per the formulation's
/// semantics, producing a complete solution vector.
pub fn embed_design(
    model: &MilpModel,
    topo: &Topology,
    design: Design,
) -> Result<SolutionVector, MilpError> {
    let cover = match design {
        Design::Cover(c) | Design::Assignment(c, _) => c,
    };
    let assoc =
        associate(topo, cover).map_err(|e| MilpError::InconsistentDesign(e.to_string()))?;

    // per-formulation context
    enum Ctx {
        Psap {
            term: Vec<f64>,
        },
        PsapEnum {
            term_scenario: Vec<usize>,
        },
        Wfap {
            freq: FrequencyMap,
            chosen_subset: Vec<usize>,
        },
    }

    let sf_interferes = |i: usize, h: usize| {
        topo.covers_tp(assoc.ap(i), h) || topo.covers_tp(assoc.ap(h), i)
    };

    let wfap_freq = |sites: &[usize], num_freqs: usize| -> Result<FrequencyMap, MilpError> {
        let Design::Assignment(c, f) = design else {
            return Err(MilpError::InconsistentDesign(
                "frequency assignment models need a frequency map".into(),
            ));
        };
        if c.sites() != sites {
            return Err(MilpError::InconsistentDesign(format!(
                "model was built for sites {:?}, got {:?}",
                sites,
                c.sites()
            )));
        }
        for &j in sites {
            match f.get(&j) {
                Some(&v) if v < num_freqs => {}
                Some(&v) => {
                    return Err(MilpError::InconsistentDesign(format!(
                        "frequency {v} of AP {j} exceeds the model's {num_freqs} frequencies"
                    )))
                }
                None => {
                    return Err(MilpError::InconsistentDesign(format!(
                        "frequency map is not total: AP {j} unassigned"
                    )))
                }
            }
        }
        Ok(f.clone())
    };

    let ctx = match &model.info {
        ModelInfo::Generic => {
            return Err(MilpError::InconsistentDesign(
                "model carries no formulation context".into(),
            ))
        }
        ModelInfo::PsapLin { alpha, .. } => {
            let a = *alpha;
            let term = (0..topo.num_tps())
                .map(|i| {
                    let sf = (0..topo.num_tps())
                        .filter(|&h| h != i && sf_interferes(i, h))
                        .count();
                    let cs = (0..topo.num_tps())
                        .filter(|&h| h != i && assoc.ap(h) == assoc.ap(i))
                        .count();
                    f64::from(topo.instance().rate(i, assoc.ap(i)))
                        / (1.0 + a * sf as f64 + (1.0 - a) * cs as f64)
                })
                .collect();
            Ctx::Psap { term }
        }
        ModelInfo::PsapEnum { scenarios, .. } => {
            let mut term_scenario = Vec::with_capacity(topo.num_tps());
            for i in 0..topo.num_tps() {
                let ai = assoc.ap(i);
                let pair = topo.pair(i, ai);
                let same_ap: Vec<usize> = pair
                    .n_cs
                    .iter()
                    .copied()
                    .filter(|&h| assoc.ap(h) == ai)
                    .collect();
                let hidden: Vec<usize> = pair
                    .n_sf
                    .iter()
                    .copied()
                    .filter(|&h| pair.compatible.contains(&assoc.ap(h)))
                    .collect();
                let s = scenarios[i]
                    .iter()
                    .position(|sc| sc.site == ai && sc.same_ap == same_ap && sc.hidden == hidden)
                    .ok_or_else(|| {
                        MilpError::InconsistentDesign(format!(
                            "realized scenario of TP {i} is not enumerated"
                        ))
                    })?;
                term_scenario.push(s);
            }
            Ctx::PsapEnum { term_scenario }
        }
        ModelInfo::WfapH { sites, num_freqs } | ModelInfo::WfapH2 { sites, num_freqs } => {
            Ctx::Wfap {
                freq: wfap_freq(sites, *num_freqs)?,
                chosen_subset: Vec::new(),
            }
        }
        ModelInfo::WfapEnum {
            sites,
            num_freqs,
            subsets,
        } => {
            let freq = wfap_freq(sites, *num_freqs)?;
            let mut chosen = Vec::with_capacity(topo.num_tps());
            let sets = FixedAssociationSets::build(topo, cover)
                .map_err(|e| MilpError::InconsistentDesign(e.to_string()))?;
            for (i, tp) in sets.per_tp.iter().enumerate() {
                let realized: Vec<usize> = tp
                    .flexible_aps
                    .iter()
                    .copied()
                    .filter(|k| freq[k] == freq[&tp.ap])
                    .collect();
                let s = subsets[i]
                    .iter()
                    .position(|sub| *sub == realized)
                    .expect("every subset of the flexible-AP set is enumerated");
                chosen.push(s);
            }
            Ctx::Wfap {
                freq,
                chosen_subset: chosen,
            }
        }
    };

    let mut values = vec![0.0f64; model.num_vars()];
    for (idx, var) in model.vars().iter().enumerate() {
        if var.class == VarClass::Product {
            continue;
        }
        let ix = name_indices(&var.name);
        values[idx] = match var.class {
            VarClass::SiteOpen => f64::from(u8::from(cover.contains(ix[0]))),
            VarClass::Assoc => f64::from(u8::from(assoc.ap(ix[0]) == ix[1])),
            VarClass::PairInterference => match &ctx {
                Ctx::Psap { .. } | Ctx::PsapEnum { .. } => {
                    f64::from(u8::from(sf_interferes(ix[0], ix[1])))
                }
                Ctx::Wfap { freq, .. } => {
                    f64::from(u8::from(freq[&assoc.ap(ix[0])] == freq[&assoc.ap(ix[1])]))
                }
            },
            VarClass::TpTerm => match &ctx {
                Ctx::Psap { term } => {
                    if assoc.ap(ix[0]) == ix[1] {
                        term[ix[0]]
                    } else {
                        0.0
                    }
                }
                Ctx::PsapEnum { .. } => unreachable!("enumerative model has no term variables"),
                Ctx::Wfap { freq, .. } => {
                    let i = ix[0];
                    let ai = assoc.ap(i);
                    let phi = (0..topo.num_tps())
                        .filter(|&h| {
                            h != i && freq[&ai] == freq[&assoc.ap(h)] && sf_interferes(i, h)
                        })
                        .count();
                    f64::from(topo.instance().rate(i, ai)) / (1.0 + phi as f64)
                }
            },
            VarClass::Scenario => match &ctx {
                Ctx::PsapEnum { term_scenario, .. } => {
                    f64::from(u8::from(term_scenario[ix[0]] == ix[1]))
                }
                _ => unreachable!("scenario variables only appear in the enumerative model"),
            },
            VarClass::SubsetPick => match &ctx {
                Ctx::Wfap { chosen_subset, .. } => {
                    f64::from(u8::from(chosen_subset[ix[0]] == ix[1]))
                }
                _ => unreachable!(),
            },
            VarClass::FreqPick => match &ctx {
                Ctx::Wfap { freq, .. } => f64::from(u8::from(freq[&ix[0]] == ix[1])),
                _ => unreachable!(),
            },
            VarClass::FreqAnd => match &ctx {
                Ctx::Wfap { freq, .. } => {
                    f64::from(u8::from(freq[&ix[0]] == ix[2] && freq[&ix[1]] == ix[2]))
                }
                _ => unreachable!(),
            },
            VarClass::SamePartition => match &ctx {
                Ctx::Wfap { freq, .. } => f64::from(u8::from(freq[&ix[0]] == freq[&ix[1]])),
                _ => unreachable!(),
            },
            VarClass::Product => unreachable!(),
        };
    }
    for (idx, var) in model.vars().iter().enumerate() {
        if let Some((term, bins)) = &var.product {
            values[idx] = values[*term] * bins.iter().map(|&b| values[b]).sum::<f64>();
        }
    }

    let mut sol = SolutionVector::default();
    for (idx, var) in model.vars().iter().enumerate() {
        sol.set(var.name.clone(), values[idx]);
    }
    Ok(sol)
}
