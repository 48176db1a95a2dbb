//! Problem instance data model, random 2D generators and JSON file I/O.
//!
//! An [`Instance`] is self-contained: coverage lists, per-TP signal order and
//! per-pair data rates are stored explicitly, so downstream modules never
//! need a propagation model. Signal strength is modeled by distance when
//! generating (closer is stronger), with ties broken by ascending site id so
//! the order is a strict total order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The 802.11g rate set, in Mbps.
pub const RATE_SET: [u32; 8] = [6, 9, 12, 18, 24, 36, 48, 54];

/// Default mapping from distance (as a fraction of the coverage radius
/// toward the TP) to data rate. First matching fraction wins.
pub const DEFAULT_RATE_THRESHOLDS: [(f64, u32); 8] = [
    (0.25, 54),
    (0.40, 48),
    (0.50, 36),
    (0.65, 24),
    (0.75, 18),
    (0.85, 12),
    (0.95, 9),
    (1.00, 6),
];

const PLACEMENT_RETRIES: usize = 1000;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("test point {tp} could not be covered by any candidate site after {retries} retries")]
    UncoverableInstance { tp: usize, retries: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A user location that must be covered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestPoint {
    pub id: usize,
    pub pos: [f64; 2],
}

/// A location where an AP may be installed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateSite {
    pub id: usize,
    pub pos: [f64; 2],
}

/// Coverage-area model used by the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Propagation {
    /// The coverage area of an AP is a disk of the given radius.
    #[serde(rename = "isotropic")]
    Isotropic { radius: f64 },
    /// Per-sector radii drawn uniformly from `[radius_min, radius_max]`,
    /// linearly interpolated in angle between sector anchors.
    #[serde(rename = "anisotropic")]
    Anisotropic {
        num_sectors: usize,
        radius_min: f64,
        radius_max: f64,
    },
}

/// Configuration for [`generate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub num_tps: usize,
    pub num_css: usize,
    pub area_side: f64,
    pub propagation: Propagation,
    /// `(distance_fraction, rate)` pairs, fractions increasing and rates
    /// strictly decreasing. The first fraction `q` with
    /// `q * effective_radius >= dist` selects the rate.
    pub rate_thresholds: Vec<(f64, u32)>,
    pub num_frequencies: usize,
    pub rng_seed: u64,
}

impl GeneratorConfig {
    /// Isotropic config with the default rate thresholds and three frequencies.
    pub fn isotropic(num_tps: usize, num_css: usize, area_side: f64, radius: f64, rng_seed: u64) -> Self {
        GeneratorConfig {
            num_tps,
            num_css,
            area_side,
            propagation: Propagation::Isotropic { radius },
            rate_thresholds: DEFAULT_RATE_THRESHOLDS.to_vec(),
            num_frequencies: 3,
            rng_seed,
        }
    }

    /// Anisotropic config with 16 sectors, default thresholds and three frequencies.
    pub fn anisotropic(
        num_tps: usize,
        num_css: usize,
        area_side: f64,
        radius_min: f64,
        radius_max: f64,
        rng_seed: u64,
    ) -> Self {
        GeneratorConfig {
            num_tps,
            num_css,
            area_side,
            propagation: Propagation::Anisotropic {
                num_sectors: 16,
                radius_min,
                radius_max,
            },
            rate_thresholds: DEFAULT_RATE_THRESHOLDS.to_vec(),
            num_frequencies: 3,
            rng_seed,
        }
    }

    // negated comparisons are deliberate: NaN inputs must fail validation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<(), InstanceError> {
        let err = |m: String| Err(InstanceError::InvalidConfig(m));
        if self.num_tps > 0 && self.num_css == 0 {
            return err("at least one candidate site is required to cover test points".into());
        }
        if !(self.area_side > 0.0) {
            return err(format!("area_side must be positive, got {}", self.area_side));
        }
        match self.propagation {
            Propagation::Isotropic { radius } => {
                if !(radius > 0.0) {
                    return err(format!("radius must be positive, got {radius}"));
                }
            }
            Propagation::Anisotropic {
                num_sectors,
                radius_min,
                radius_max,
            } => {
                if num_sectors == 0 {
                    return err("num_sectors must be at least 1".into());
                }
                if !(radius_min > 0.0) {
                    return err(format!("radius_min must be positive, got {radius_min}"));
                }
                if radius_min > radius_max {
                    return err(format!("radius_min {radius_min} exceeds radius_max {radius_max}"));
                }
            }
        }
        if self.rate_thresholds.is_empty() {
            return err("rate_thresholds must not be empty".into());
        }
        for pair in self.rate_thresholds.windows(2) {
            if pair[0].0 >= pair[1].0 {
                return err("rate_thresholds fractions must be strictly increasing".into());
            }
            if pair[0].1 <= pair[1].1 {
                return err("rate_thresholds rates must be strictly decreasing".into());
            }
        }
        if self.rate_thresholds.last().unwrap().0 < 1.0 {
            return err("last rate threshold fraction must reach 1.0 so every covered TP gets a rate".into());
        }
        for &(q, r) in &self.rate_thresholds {
            if !(q > 0.0) {
                return err(format!("threshold fraction must be positive, got {q}"));
            }
            if !RATE_SET.contains(&r) {
                return err(format!("rate {r} is not in the 802.11g rate set"));
            }
        }
        if self.num_frequencies == 0 {
            return err("num_frequencies must be at least 1".into());
        }
        Ok(())
    }
}

/// A planning instance: test points `I`, candidate sites `J`, frequencies
/// `F`, coverage lists `I_j`, per-TP signal order on `J_i` and rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub tps: Vec<TestPoint>,
    pub css: Vec<CandidateSite>,
    pub num_frequencies: usize,
    /// For each CS `j`, the sorted list of TP ids it covers (`I_j`).
    pub covers: Vec<Vec<usize>>,
    /// For each TP `i`, the CS ids covering it, strongest first (`J_i` under `>_i`).
    pub signal_order: Vec<Vec<usize>>,
    /// Data rate in Mbps for each `(i, j)` with `j` covering `i`.
    pub rates: BTreeMap<(usize, usize), u32>,
    pub meta: Option<GeneratorConfig>,
}

impl Instance {
    pub fn num_tps(&self) -> usize {
        self.tps.len()
    }

    pub fn num_css(&self) -> usize {
        self.css.len()
    }

    /// Rate for a covered pair. Panics if `j` does not cover `i`.
    pub fn rate(&self, tp: usize, cs: usize) -> u32 {
        *self
            .rates
            .get(&(tp, cs))
            .unwrap_or_else(|| panic!("no rate for uncovered pair ({tp}, {cs})"))
    }

    /// Builds an instance from explicit parts and validates every invariant.
    pub fn from_parts(
        tps: Vec<TestPoint>,
        css: Vec<CandidateSite>,
        num_frequencies: usize,
        covers: Vec<Vec<usize>>,
        signal_order: Vec<Vec<usize>>,
        rates: BTreeMap<(usize, usize), u32>,
        meta: Option<GeneratorConfig>,
    ) -> Result<Instance, InstanceError> {
        let inst = Instance {
            tps,
            css,
            num_frequencies,
            covers,
            signal_order,
            rates,
            meta,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Builds an instance from signal orders alone; coverage lists are
    /// derived by symmetry. Convenient for hand-made fixtures.
    pub fn from_signal_order(
        tp_pos: Vec<[f64; 2]>,
        cs_pos: Vec<[f64; 2]>,
        num_frequencies: usize,
        signal_order: Vec<Vec<usize>>,
        rates: BTreeMap<(usize, usize), u32>,
    ) -> Result<Instance, InstanceError> {
        let tps = tp_pos
            .into_iter()
            .enumerate()
            .map(|(id, pos)| TestPoint { id, pos })
            .collect();
        let css: Vec<CandidateSite> = cs_pos
            .into_iter()
            .enumerate()
            .map(|(id, pos)| CandidateSite { id, pos })
            .collect();
        let mut covers = vec![Vec::new(); css.len()];
        for (i, order) in signal_order.iter().enumerate() {
            for &j in order {
                if j >= css.len() {
                    return Err(InstanceError::Parse(format!(
                        "signal_order[{i}] references unknown CS {j}"
                    )));
                }
                covers[j].push(i);
            }
        }
        for list in &mut covers {
            list.sort_unstable();
        }
        Instance::from_parts(tps, css, num_frequencies, covers, signal_order, rates, None)
    }

    /// Checks every instance invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let parse = |m: String| Err(InstanceError::Parse(m));
        for (idx, tp) in self.tps.iter().enumerate() {
            if tp.id != idx {
                return parse(format!("tps[{idx}] has id {}, ids must be contiguous from 0", tp.id));
            }
        }
        for (idx, cs) in self.css.iter().enumerate() {
            if cs.id != idx {
                return parse(format!("css[{idx}] has id {}, ids must be contiguous from 0", cs.id));
            }
        }
        if self.num_frequencies == 0 {
            return parse("num_frequencies must be at least 1".into());
        }
        if self.covers.len() != self.css.len() {
            return parse(format!(
                "covers has {} entries for {} candidate sites",
                self.covers.len(),
                self.css.len()
            ));
        }
        if self.signal_order.len() != self.tps.len() {
            return parse(format!(
                "signal_order has {} entries for {} test points",
                self.signal_order.len(),
                self.tps.len()
            ));
        }
        for (j, list) in self.covers.iter().enumerate() {
            for pair in list.windows(2) {
                if pair[0] >= pair[1] {
                    return parse(format!("covers[{j}] is not sorted strictly ascending"));
                }
            }
            for &i in list {
                if i >= self.tps.len() {
                    return parse(format!("covers[{j}] references unknown TP {i}"));
                }
                if !self.signal_order[i].contains(&j) {
                    return parse(format!(
                        "coverage asymmetry: TP {i} in covers[{j}] but CS {j} not in signal_order[{i}]"
                    ));
                }
            }
        }
        let mut pairs = 0usize;
        for (i, order) in self.signal_order.iter().enumerate() {
            if order.is_empty() {
                return parse(format!("TP {i} is uncoverable: signal_order[{i}] is empty"));
            }
            let mut seen = vec![false; self.css.len()];
            for &j in order {
                if j >= self.css.len() {
                    return parse(format!("signal_order[{i}] references unknown CS {j}"));
                }
                if seen[j] {
                    return parse(format!(
                        "signal_order[{i}] lists CS {j} twice: the order is not strict"
                    ));
                }
                seen[j] = true;
                if self.covers[j].binary_search(&i).is_err() {
                    return parse(format!(
                        "coverage asymmetry: CS {j} in signal_order[{i}] but TP {i} not in covers[{j}]"
                    ));
                }
                match self.rates.get(&(i, j)) {
                    None => return parse(format!("missing rate for covered pair ({i}, {j})")),
                    Some(r) if !RATE_SET.contains(r) => {
                        return parse(format!("rate {r} for pair ({i}, {j}) is not in the 802.11g rate set"))
                    }
                    _ => {}
                }
                pairs += 1;
            }
        }
        if pairs != self.rates.len() {
            return parse(format!(
                "rates has {} entries but the instance has {} covered pairs",
                self.rates.len(),
                pairs
            ));
        }
        Ok(())
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Coverage radius of a site in the direction of `angle` (radians).
fn effective_radius(prop: &Propagation, sector_radii: &[f64], angle: f64) -> f64 {
    match prop {
        Propagation::Isotropic { radius } => *radius,
        Propagation::Anisotropic { num_sectors, .. } => {
            let n = *num_sectors;
            if n == 1 {
                return sector_radii[0];
            }
            let tau = std::f64::consts::TAU;
            let mut theta = angle % tau;
            if theta < 0.0 {
                theta += tau;
            }
            let step = tau / n as f64;
            let t = theta / step;
            let k = (t.floor() as usize) % n;
            let frac = t - t.floor();
            sector_radii[k] * (1.0 - frac) + sector_radii[(k + 1) % n] * frac
        }
    }
}

fn rate_for(cfg: &GeneratorConfig, reff: f64, d: f64) -> u32 {
    for &(q, r) in &cfg.rate_thresholds {
        if q * reff >= d {
            return r;
        }
    }
    // unreachable for covered pairs: the last fraction reaches 1.0
    cfg.rate_thresholds.last().unwrap().1
}

/// Generates a random 2D instance. Pure function of the config: the same
/// seed yields a byte-identical serialized instance.
pub fn generate(cfg: &GeneratorConfig) -> Result<Instance, InstanceError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let side = cfg.area_side;

    let css: Vec<CandidateSite> = (0..cfg.num_css)
        .map(|id| CandidateSite {
            id,
            pos: [rng.gen_range(0.0..side), rng.gen_range(0.0..side)],
        })
        .collect();

    let sector_radii: Vec<Vec<f64>> = match cfg.propagation {
        Propagation::Isotropic { radius } => vec![vec![radius]; cfg.num_css],
        Propagation::Anisotropic {
            num_sectors,
            radius_min,
            radius_max,
        } => (0..cfg.num_css)
            .map(|_| {
                (0..num_sectors)
                    .map(|_| {
                        if radius_min == radius_max {
                            radius_min
                        } else {
                            rng.gen_range(radius_min..radius_max)
                        }
                    })
                    .collect()
            })
            .collect(),
    };

    let covered_by = |pos: [f64; 2], j: usize| -> bool {
        let cs = &css[j];
        let d = dist(pos, cs.pos);
        let angle = (pos[1] - cs.pos[1]).atan2(pos[0] - cs.pos[0]);
        d <= effective_radius(&cfg.propagation, &sector_radii[j], angle)
    };

    let mut tps = Vec::with_capacity(cfg.num_tps);
    for id in 0..cfg.num_tps {
        let mut placed = None;
        for _ in 0..PLACEMENT_RETRIES {
            let pos = [rng.gen_range(0.0..side), rng.gen_range(0.0..side)];
            if (0..cfg.num_css).any(|j| covered_by(pos, j)) {
                placed = Some(pos);
                break;
            }
        }
        match placed {
            Some(pos) => tps.push(TestPoint { id, pos }),
            None => {
                return Err(InstanceError::UncoverableInstance {
                    tp: id,
                    retries: PLACEMENT_RETRIES,
                })
            }
        }
    }

    let mut covers = vec![Vec::new(); cfg.num_css];
    let mut signal_order = vec![Vec::new(); cfg.num_tps];
    let mut rates = BTreeMap::new();
    for tp in &tps {
        let mut covering: Vec<(f64, usize)> = Vec::new();
        for (j, cs) in css.iter().enumerate() {
            if covered_by(tp.pos, j) {
                covering.push((dist(tp.pos, cs.pos), j));
            }
        }
        // closer means stronger; ties broken by ascending site id
        covering.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(d, j) in &covering {
            covers[j].push(tp.id);
            signal_order[tp.id].push(j);
            let angle = (tp.pos[1] - css[j].pos[1]).atan2(tp.pos[0] - css[j].pos[0]);
            let reff = effective_radius(&cfg.propagation, &sector_radii[j], angle);
            rates.insert((tp.id, j), rate_for(cfg, reff, d));
        }
    }
    for list in &mut covers {
        list.sort_unstable();
    }

    Instance::from_parts(
        tps,
        css,
        cfg.num_frequencies,
        covers,
        signal_order,
        rates,
        Some(cfg.clone()),
    )
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    tps: Vec<TestPoint>,
    css: Vec<CandidateSite>,
    num_frequencies: usize,
    covers: Vec<Vec<usize>>,
    signal_order: Vec<Vec<usize>>,
    rates: BTreeMap<String, u32>,
    meta: Option<GeneratorConfig>,
}

struct RateKey(usize, usize);

impl fmt::Display for RateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

fn parse_rate_key(key: &str) -> Result<(usize, usize), InstanceError> {
    let mut parts = key.splitn(2, ',');
    let bad = || InstanceError::Parse(format!("rate key {key:?} is not of the form \"i,j\""));
    let i = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let j = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    Ok((i, j))
}

/// Serializes an instance to its canonical JSON text.
pub fn to_json_string(inst: &Instance) -> String {
    let file = InstanceFile {
        tps: inst.tps.clone(),
        css: inst.css.clone(),
        num_frequencies: inst.num_frequencies,
        covers: inst.covers.clone(),
        signal_order: inst.signal_order.clone(),
        rates: inst
            .rates
            .iter()
            .map(|(&(i, j), &r)| (RateKey(i, j).to_string(), r))
            .collect(),
        meta: inst.meta.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance serialization cannot fail");
    text.push('\n');
    text
}

/// Parses and validates an instance from JSON text.
pub fn from_json_str(text: &str) -> Result<Instance, InstanceError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
    let mut rates = BTreeMap::new();
    for (key, rate) in &file.rates {
        rates.insert(parse_rate_key(key)?, *rate);
    }
    Instance::from_parts(
        file.tps,
        file.css,
        file.num_frequencies,
        file.covers,
        file.signal_order,
        rates,
        file.meta,
    )
}

/// Writes the canonical JSON serialization of `inst` to `path`.
pub fn save(inst: &Instance, path: &Path) -> Result<(), InstanceError> {
    std::fs::write(path, to_json_string(inst))?;
    Ok(())
}

/// Loads and validates an instance file.
pub fn load(path: &Path) -> Result<Instance, InstanceError> {
    let text = std::fs::read_to_string(path)?;
    from_json_str(&text)
}
