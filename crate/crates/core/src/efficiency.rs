//! The four access-efficiency objectives.
//!
//! Every objective sums, over the covered TPs, the data rate toward the
//! associated AP divided by one plus an interferer count. They differ only
//! in which interferer set is counted:
//!
//! - `e(S,f)` counts `Phi_i(S,f)` (the realized design),
//! - `e_sf(S)` counts `Phi^SF_i(S)` (every AP on one frequency),
//! - `e_cs(S)` counts `Phi^CS_i(S)` (full separation by frequency),
//! - `e_pcs(S,alpha)` blends the two with the separation likelihood `alpha`.

use thiserror::Error;

use crate::topology::{
    associate, interferers, interferers_cs, interferers_sf, Cover, FrequencyMap, NotACover,
    Topology,
};

#[derive(Debug, Clone, Copy, Error, PartialEq)]
#[error("alpha must lie in [0, 1], got {0}")]
pub struct InvalidAlpha(pub f64);

/// Separation parameter of the partial-separation objective: the likelihood
/// that a frequency-dependent potential interferer remains an interferer
/// after frequency assignment.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Alpha, InvalidAlpha> {
        if (0.0..=1.0).contains(&value) {
            Ok(Alpha(value))
        } else {
            Err(InvalidAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An efficiency score with its per-TP decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyValue {
    pub total: f64,
    pub per_tp: Vec<f64>,
}

impl EfficiencyValue {
    fn from_terms(per_tp: Vec<f64>) -> EfficiencyValue {
        EfficiencyValue {
            total: per_tp.iter().sum(),
            per_tp,
        }
    }
}

fn collect(topo: &Topology, ap_of: &[usize], denom: impl Fn(usize) -> f64) -> EfficiencyValue {
    let per_tp = (0..topo.num_tps())
        .map(|i| f64::from(topo.instance().rate(i, ap_of[i])) / denom(i))
        .collect();
    EfficiencyValue::from_terms(per_tp)
}

/// `e(S,f)`: access efficiency of a complete design solution.
pub fn eval_design(
    topo: &Topology,
    cover: &Cover,
    freq: &FrequencyMap,
) -> Result<EfficiencyValue, NotACover> {
    let assoc = associate(topo, cover)?;
    let phi = interferers(topo, cover, &assoc, freq);
    Ok(collect(topo, assoc.as_slice(), |i| 1.0 + phi[i].len() as f64))
}

/// `e_sf(S)`: efficiency when all installed APs share one frequency.
pub fn eval_sf(topo: &Topology, cover: &Cover) -> Result<EfficiencyValue, NotACover> {
    let assoc = associate(topo, cover)?;
    let phi = interferers_sf(topo, &assoc);
    Ok(collect(topo, assoc.as_slice(), |i| 1.0 + phi[i].len() as f64))
}

/// `e_cs(S)`: efficiency when frequencies fully separate co-channel APs.
pub fn eval_cs(topo: &Topology, cover: &Cover) -> Result<EfficiencyValue, NotACover> {
    let assoc = associate(topo, cover)?;
    let phi = interferers_cs(topo, &assoc);
    Ok(collect(topo, assoc.as_slice(), |i| 1.0 + phi[i].len() as f64))
}

/// `e_pcs(S, alpha)`: the partial-separation blend
/// `rate / (1 + alpha*|Phi^SF| + (1-alpha)*|Phi^CS|)`.
pub fn eval_pcs(topo: &Topology, cover: &Cover, alpha: Alpha) -> Result<EfficiencyValue, NotACover> {
    let assoc = associate(topo, cover)?;
    let phi_sf = interferers_sf(topo, &assoc);
    let phi_cs = interferers_cs(topo, &assoc);
    let a = alpha.value();
    Ok(collect(topo, assoc.as_slice(), |i| {
        1.0 + a * phi_sf[i].len() as f64 + (1.0 - a) * phi_cs[i].len() as f64
    }))
}

/// The algebraically equal second form of the partial-separation objective:
/// `rate / (1 + alpha*|Phi^SF \ Phi^CS| + |Phi^CS|)`.
pub fn eval_pcs_alt(
    topo: &Topology,
    cover: &Cover,
    alpha: Alpha,
) -> Result<EfficiencyValue, NotACover> {
    let assoc = associate(topo, cover)?;
    let phi_sf = interferers_sf(topo, &assoc);
    let phi_cs = interferers_cs(topo, &assoc);
    let a = alpha.value();
    Ok(collect(topo, assoc.as_slice(), |i| {
        let extra = (phi_sf[i].len() - phi_cs[i].len()) as f64;
        1.0 + a * extra + phi_cs[i].len() as f64
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, GeneratorConfig};
    use crate::oracle::inst_a;
    use proptest::prelude::*;

    fn inst_a_setup() -> (Topology, Cover) {
        let inst = inst_a();
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, [0, 1]).unwrap();
        (topo, cover)
    }

    #[test]
    fn design_values_on_inst_a() {
        let (topo, cover) = inst_a_setup();
        let same: FrequencyMap = [(0, 0), (1, 0)].into();
        assert_eq!(eval_design(&topo, &cover, &same).unwrap().total, 72.0);
        let split: FrequencyMap = [(0, 0), (1, 1)].into();
        assert_eq!(eval_design(&topo, &cover, &split).unwrap().total, 108.0);
    }

    #[test]
    fn sf_cs_values_on_inst_a() {
        let (topo, cover) = inst_a_setup();
        assert_eq!(eval_sf(&topo, &cover).unwrap().total, 72.0);
        assert_eq!(eval_cs(&topo, &cover).unwrap().total, 108.0);
    }

    #[test]
    fn pcs_value_on_inst_a() {
        let (topo, cover) = inst_a_setup();
        let v = eval_pcs(&topo, &cover, Alpha::new(0.5).unwrap()).unwrap();
        assert_eq!(v.per_tp, vec![27.0, 21.6, 36.0]);
        assert!((v.total - 84.6).abs() < 1e-12);
    }

    #[test]
    fn isolated_tp_scores_full_rate() {
        let inst = generate(&GeneratorConfig::isotropic(1, 1, 0.5, 2.0, 2)).unwrap();
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, [0]).unwrap();
        let rate = f64::from(inst.rate(0, 0));
        let freq: FrequencyMap = [(0, 0)].into();
        assert_eq!(eval_design(&topo, &cover, &freq).unwrap().total, rate);
    }

    #[test]
    fn single_ap_sf_equals_cs() {
        let inst = generate(&GeneratorConfig::isotropic(7, 1, 2.0, 4.0, 6)).unwrap();
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, [0]).unwrap();
        let sf = eval_sf(&topo, &cover).unwrap();
        let cs = eval_cs(&topo, &cover).unwrap();
        assert_eq!(sf, cs);
        let n = topo.num_tps() as f64;
        let expect: f64 = (0..topo.num_tps()).map(|i| f64::from(inst.rate(i, 0)) / n).sum();
        assert!((sf.total - expect).abs() < 1e-12);
    }

    #[test]
    fn pcs_endpoints_match_cs_and_sf() {
        let inst = generate(&GeneratorConfig::anisotropic(20, 6, 9.0, 2.0, 5.0, 12)).unwrap();
        let topo = Topology::build(&inst);
        let cover = Cover::new(&topo, 0..topo.num_css()).unwrap();
        let at0 = eval_pcs(&topo, &cover, Alpha::new(0.0).unwrap()).unwrap();
        let at1 = eval_pcs(&topo, &cover, Alpha::new(1.0).unwrap()).unwrap();
        assert_eq!(at0, eval_cs(&topo, &cover).unwrap());
        assert_eq!(at1, eval_sf(&topo, &cover).unwrap());
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::new(-0.1).is_err());
        assert!(Alpha::new(1.1).is_err());
        assert!(Alpha::new(0.0).is_ok());
        assert!(Alpha::new(1.0).is_ok());
    }

    proptest! {
        #[test]
        fn sandwich_monotonicity_and_form_equivalence(seed in 0u64..500, assign_seed in 0u64..100) {
            let inst = generate(&GeneratorConfig::anisotropic(12, 5, 8.0, 2.0, 5.0, seed)).unwrap();
            let topo = Topology::build(&inst);
            let cover = Cover::new(&topo, 0..topo.num_css()).unwrap();
            let freq: FrequencyMap = cover
                .sites()
                .iter()
                .enumerate()
                .map(|(k, &j)| (j, ((assign_seed as usize) ^ (k * 2654435761)) % 3))
                .collect();

            let e = eval_design(&topo, &cover, &freq).unwrap();
            let sf = eval_sf(&topo, &cover).unwrap();
            let cs = eval_cs(&topo, &cover).unwrap();
            for i in 0..topo.num_tps() {
                prop_assert!(sf.per_tp[i] <= e.per_tp[i] + 1e-12);
                prop_assert!(e.per_tp[i] <= cs.per_tp[i] + 1e-12);
            }

            let mut prev = f64::INFINITY;
            for k in 0..=10 {
                let alpha = Alpha::new(k as f64 / 10.0).unwrap();
                let v = eval_pcs(&topo, &cover, alpha).unwrap();
                prop_assert!(v.total <= prev + 1e-9);
                prev = v.total;
                let alt = eval_pcs_alt(&topo, &cover, alpha).unwrap();
                prop_assert!((v.total - alt.total).abs() <= 1e-12);
            }
        }
    }
}
