//! Solver-agnostic 0-1 linear models for the five formulations, with LP
//! text emission, solution checking and design embedding.
//!
//! No MILP solver is embedded: models are certified by embedding known
//! design solutions ([`build::embed_design`]) and checking them
//! ([`check_solution`]), and micro-scale models can be optimized exactly by
//! [`solve_by_enumeration`], which walks every binary assignment and
//! completes the continuous variables through their defining rows.

mod build;
mod lp;

pub use build::{
    build_psap_enum, build_psap_lin, build_wfap_enum, build_wfap_h, build_wfap_h2, embed_design,
    Design, LinVariant, DEFAULT_ROW_BUDGET, DEFAULT_SUBSET_CAP,
};
pub use lp::{emit_lp, parse_lp, parse_lp_str, to_lp_string, LpParseError};

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::aploc::{InterferenceScenario, ScenarioExplosion};

#[derive(Debug, Error)]
pub enum MilpError {
    #[error(transparent)]
    Scenario(#[from] ScenarioExplosion),
    #[error("subset explosion at TP {tp}: {count} subsets of its flexible-AP set exceed cap {cap}")]
    SubsetExplosion { tp: usize, count: u128, cap: u64 },
    #[error("too many APs: {rows} pigeonhole rows over {sites} sites exceed budget {budget}")]
    TooManyAps { sites: usize, rows: u128, budget: u64 },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("inconsistent design: {0}")]
    InconsistentDesign(String),
    #[error("enumeration too large: model has {0} binary variables")]
    TooManyBinaries(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// Domain meaning of a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarClass {
    /// `x_j`: site `j` opens an AP.
    SiteOpen,
    /// `l_ij`: TP `i` associates to AP `j`.
    Assoc,
    /// `y_ih`: TPs `i` and `h` interfere.
    PairInterference,
    /// `c_i` / `c_ij`: the TP's hyperbolic objective term.
    TpTerm,
    /// `z...`: linearized product of a term variable and binaries.
    Product,
    /// `x_jf`: AP `j` uses frequency `f`.
    FreqPick,
    /// `q_jkf`: APs `j` and `k` both use frequency `f`.
    FreqAnd,
    /// `v_jk`: APs `j` and `k` share a frequency.
    SamePartition,
    /// `w_is`: interference scenario pick.
    Scenario,
    /// `w_iA`: colliding-AP subset pick.
    SubsetPick,
}

impl VarClass {
    pub fn label(self) -> &'static str {
        match self {
            VarClass::SiteOpen => "site_open",
            VarClass::Assoc => "association",
            VarClass::PairInterference => "pair_interference",
            VarClass::TpTerm => "tp_term",
            VarClass::Product => "product",
            VarClass::FreqPick => "frequency_pick",
            VarClass::FreqAnd => "frequency_and",
            VarClass::SamePartition => "same_partition",
            VarClass::Scenario => "scenario_pick",
            VarClass::SubsetPick => "subset_pick",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub class: VarClass,
    /// For linearized products: `value = vars[term] * sum(vars[b] for b in bins)`.
    pub product: Option<(usize, Vec<usize>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Context a model carries about the formulation it encodes, consumed by
/// [`embed_design`] and the reports.
#[derive(Debug, Clone)]
pub enum ModelInfo {
    /// A model read back from LP text; no embedding support.
    Generic,
    PsapLin {
        alpha: f64,
        variant: LinVariant,
    },
    PsapEnum {
        alpha: f64,
        /// Per TP, the enumerated scenarios in variable order.
        scenarios: Vec<Vec<InterferenceScenario>>,
    },
    WfapH {
        sites: Vec<usize>,
        num_freqs: usize,
    },
    WfapH2 {
        sites: Vec<usize>,
        num_freqs: usize,
    },
    WfapEnum {
        sites: Vec<usize>,
        num_freqs: usize,
        /// Per TP, the enumerated subsets of its flexible-AP set in variable order.
        subsets: Vec<Vec<Vec<usize>>>,
    },
}

/// A 0-1 linear model with a maximization objective.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub name: String,
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<Row>,
    pub info: ModelInfo,
    /// `term variable -> defining equality row`, for enumeration.
    defining_rows: HashMap<usize, usize>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>, info: ModelInfo) -> MilpModel {
        MilpModel {
            name: name.into(),
            vars: Vec::new(),
            index: HashMap::new(),
            objective: Vec::new(),
            rows: Vec::new(),
            info,
            defining_rows: HashMap::new(),
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
        class: VarClass,
    ) -> usize {
        let name = name.into();
        assert!(
            !self.index.contains_key(&name),
            "duplicate variable name {name}"
        );
        if kind == VarKind::Binary {
            assert!(lower == 0.0 && upper == 1.0, "binary bounds must be [0,1]");
        }
        let idx = self.vars.len();
        self.index.insert(name.clone(), idx);
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
            class,
            product: None,
        });
        idx
    }

    pub fn add_binary(&mut self, name: impl Into<String>, class: VarClass) -> usize {
        self.add_var(name, VarKind::Binary, 0.0, 1.0, class)
    }

    /// Adds a continuous product variable `term * sum(bins)` with bounds `[0, upper]`.
    pub fn add_product_var(
        &mut self,
        name: impl Into<String>,
        upper: f64,
        term: usize,
        bins: Vec<usize>,
    ) -> usize {
        let idx = self.add_var(name, VarKind::Continuous, 0.0, upper, VarClass::Product);
        self.vars[idx].product = Some((term, bins));
        idx
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        let idx = self.rows.len();
        self.rows.push(Row {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
        idx
    }

    /// Adds an equality row that uniquely determines `term_var` once all
    /// binaries are fixed.
    pub fn add_defining_row(
        &mut self,
        name: impl Into<String>,
        term_var: usize,
        terms: Vec<(usize, f64)>,
        rhs: f64,
    ) -> usize {
        let row = self.add_row(name, terms, Relation::Eq, rhs);
        self.defining_rows.insert(term_var, row);
        row
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub(crate) fn vars_mut(&mut self) -> &mut Vec<Variable> {
        &mut self.vars
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn var_name(&self, idx: usize) -> &str {
        &self.vars[idx].name
    }

    /// Variable annotations: name to domain meaning.
    pub fn annotations(&self) -> BTreeMap<String, &'static str> {
        self.vars
            .iter()
            .map(|v| (v.name.clone(), v.class.label()))
            .collect()
    }

    /// Structural validation: term indices in range, names unique by
    /// construction, binary bounds already enforced.
    pub fn validate(&self) -> Result<(), String> {
        for (ri, row) in self.rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                if v >= self.vars.len() {
                    return Err(format!("row {ri} ({}) references variable {v}", row.name));
                }
            }
        }
        for &(v, _) in &self.objective {
            if v >= self.vars.len() {
                return Err(format!("objective references variable {v}"));
            }
        }
        Ok(())
    }
}

/// A (partial) assignment of values to model variables by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolutionVector(pub BTreeMap<String, f64>);

impl SolutionVector {
    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(0.0)
    }
}

/// Feasibility report for a solution vector.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub feasible: bool,
    pub violated_rows: Vec<String>,
    pub objective: f64,
}

const CHECK_TOL: f64 = 1e-6;

/// Evaluates every row, bound and integrality restriction at tolerance 1e-6.
/// Variables missing from the solution count as 0; names not declared by
/// the model are an error.
pub fn check_solution(model: &MilpModel, sol: &SolutionVector) -> Result<CheckReport, MilpError> {
    for name in sol.0.keys() {
        if model.var(name).is_none() {
            return Err(MilpError::UnknownVariable(name.clone()));
        }
    }
    let values: Vec<f64> = model.vars.iter().map(|v| sol.get(&v.name)).collect();
    Ok(check_values(model, &values))
}

fn check_values(model: &MilpModel, values: &[f64]) -> CheckReport {
    let mut violated = Vec::new();
    for (idx, var) in model.vars.iter().enumerate() {
        let v = values[idx];
        if v < var.lower - CHECK_TOL || v > var.upper + CHECK_TOL {
            violated.push(format!("bounds({})", var.name));
        } else if var.kind == VarKind::Binary && (v - v.round()).abs() > CHECK_TOL {
            violated.push(format!("integrality({})", var.name));
        }
    }
    for row in &model.rows {
        let lhs: f64 = row.terms.iter().map(|&(v, c)| c * values[v]).sum();
        let ok = match row.relation {
            Relation::Le => lhs <= row.rhs + CHECK_TOL,
            Relation::Ge => lhs >= row.rhs - CHECK_TOL,
            Relation::Eq => (lhs - row.rhs).abs() <= CHECK_TOL,
        };
        if !ok {
            violated.push(row.name.clone());
        }
    }
    let objective = model.objective.iter().map(|&(v, c)| c * values[v]).sum();
    CheckReport {
        feasible: violated.is_empty(),
        violated_rows: violated,
        objective,
    }
}

/// Bounds are satisfied by construction during enumeration; rows are checked
/// with early exit.
fn values_feasible(model: &MilpModel, values: &[f64]) -> bool {
    model.rows.iter().all(|row| {
        let lhs: f64 = row.terms.iter().map(|&(v, c)| c * values[v]).sum();
        match row.relation {
            Relation::Le => lhs <= row.rhs + CHECK_TOL,
            Relation::Ge => lhs >= row.rhs - CHECK_TOL,
            Relation::Eq => (lhs - row.rhs).abs() <= CHECK_TOL,
        }
    })
}

/// Exact optimization of a micro-scale model by walking every assignment of
/// the binary variables. Continuous term variables are completed through
/// their defining rows (`term * denom = rhs'`), products as `term * bins`.
/// Returns the best feasible solution, or `None` when none exists.
pub fn solve_by_enumeration(
    model: &MilpModel,
    max_binaries: usize,
) -> Result<Option<(SolutionVector, f64)>, MilpError> {
    let binaries: Vec<usize> = (0..model.num_vars())
        .filter(|&v| model.vars[v].kind == VarKind::Binary)
        .collect();
    if binaries.len() > max_binaries {
        return Err(MilpError::TooManyBinaries(binaries.len()));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut values = vec![0.0f64; model.num_vars()];
    for mask in 0u64..(1u64 << binaries.len()) {
        for v in values.iter_mut() {
            *v = 0.0;
        }
        for (bit, &v) in binaries.iter().enumerate() {
            values[v] = f64::from(u8::from(mask & (1 << bit) != 0));
        }
        // complete term variables from their defining rows
        for (&term, &row_idx) in &model.defining_rows {
            let row = &model.rows[row_idx];
            let mut denom = 0.0;
            let mut rhs = row.rhs;
            for &(v, c) in &row.terms {
                if v == term {
                    denom += c;
                } else if let Some((t, bins)) = &model.vars[v].product {
                    debug_assert_eq!(*t, term, "products in a defining row share its term");
                    denom += c * bins.iter().map(|&b| values[b]).sum::<f64>();
                } else {
                    rhs -= c * values[v];
                }
            }
            values[term] = if denom > 0.0 { rhs / denom } else { 0.0 };
        }
        for v in 0..model.num_vars() {
            if let Some((term, bins)) = &model.vars[v].product {
                values[v] = values[*term] * bins.iter().map(|&b| values[b]).sum::<f64>();
            }
        }

        if !values_feasible(model, &values) {
            continue;
        }
        let objective: f64 = model.objective.iter().map(|&(v, c)| c * values[v]).sum();
        if best.as_ref().is_none_or(|(_, b)| objective > *b) {
            best = Some((values.clone(), objective));
        }
    }
    Ok(best.map(|(values, objective)| {
        let mut sol = SolutionVector::default();
        for (v, var) in model.vars.iter().enumerate() {
            sol.set(var.name.clone(), values[v]);
        }
        (sol, objective)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model() -> MilpModel {
        // max 3a + 2b + c  s.t.  a + b <= 1,  c defined by c + 2*z = 4*a with z = c*b
        let mut m = MilpModel::new("toy", ModelInfo::Generic);
        let a = m.add_binary("x_0", VarClass::SiteOpen);
        let b = m.add_binary("x_1", VarClass::SiteOpen);
        let c = m.add_var("c_0", VarKind::Continuous, 0.0, 4.0, VarClass::TpTerm);
        let z = m.add_product_var("z_0_1", 4.0, c, vec![b]);
        m.add_row("cap", vec![(a, 1.0), (b, 1.0)], Relation::Le, 1.0);
        m.add_defining_row("def_0", c, vec![(c, 1.0), (z, 2.0), (a, -4.0)], 0.0);
        m.add_row("z_lo", vec![(c, 1.0), (b, 4.0), (z, -1.0)], Relation::Le, 4.0);
        m.add_row("z_hi", vec![(z, 1.0), (c, -1.0)], Relation::Le, 0.0);
        m.objective = vec![(a, 3.0), (b, 2.0), (c, 1.0)];
        m
    }

    #[test]
    fn check_reports_violations_and_objective() {
        let m = toy_model();
        let mut sol = SolutionVector::default();
        sol.set("x_0", 1.0);
        sol.set("x_1", 1.0);
        let rep = check_solution(&m, &sol).unwrap();
        assert!(!rep.feasible);
        assert_eq!(rep.violated_rows, vec!["cap".to_string(), "def_0".to_string()]);

        sol.set("x_1", 0.0);
        sol.set("c_0", 4.0);
        let rep = check_solution(&m, &sol).unwrap();
        assert!(rep.feasible, "{:?}", rep.violated_rows);
        assert_eq!(rep.objective, 7.0);
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let m = toy_model();
        let mut sol = SolutionVector::default();
        sol.set("nope", 1.0);
        assert!(matches!(
            check_solution(&m, &sol),
            Err(MilpError::UnknownVariable(_))
        ));
    }

    #[test]
    fn enumeration_finds_the_optimum() {
        let m = toy_model();
        let (sol, obj) = solve_by_enumeration(&m, 22).unwrap().unwrap();
        // a=1 yields 3 + c with c = 4 (b=0), beating b=1 (2 + 0)
        assert_eq!(obj, 7.0);
        assert_eq!(sol.get("x_0"), 1.0);
        assert_eq!(sol.get("x_1"), 0.0);
        assert_eq!(sol.get("c_0"), 4.0);
    }

    #[test]
    fn enumeration_rejects_oversized_models() {
        let mut m = MilpModel::new("big", ModelInfo::Generic);
        for k in 0..30 {
            m.add_binary(format!("x_{k}"), VarClass::SiteOpen);
        }
        assert!(matches!(
            solve_by_enumeration(&m, 22),
            Err(MilpError::TooManyBinaries(30))
        ));
    }
}
