//! LP-format text emission and the bundled reader.
//!
//! Emission is deterministic: objective and row terms keep their model
//! order, while the Bounds and Binary sections list variables in a
//! canonical order derived from the variable names alone (annotation class,
//! then numeric indices). The reader accepts exactly the emitted dialect,
//! so `emit -> parse -> emit` reproduces files byte for byte.

use std::path::Path;

use thiserror::Error;

use super::{MilpError, MilpModel, ModelInfo, Relation, VarKind};

#[derive(Debug, Error)]
#[error("lp parse error: {0}")]
pub struct LpParseError(pub String);

const TERMS_PER_LINE: usize = 8;

fn fmt_num(x: f64) -> String {
    // +0.0 normalizes negative zero
    format!("{}", x + 0.0)
}

/// Canonical ordering key for the Bounds/Binary sections, derived from the
/// name so that built and re-parsed models emit identically.
fn sort_key(name: &str) -> (u8, Vec<i64>, String) {
    let tokens: Vec<&str> = name.split('_').collect();
    let arity = tokens.len() - 1;
    let indices: Vec<i64> = tokens[1..]
        .iter()
        .map(|t| {
            t.trim_start_matches(|c: char| c.is_ascii_alphabetic())
                .parse::<i64>()
                .unwrap_or(-1)
        })
        .collect();
    let sub_alpha = tokens
        .get(2)
        .map(|t| t.starts_with(|c: char| c.is_ascii_alphabetic()))
        .unwrap_or(false);
    let rank = match (tokens[0], arity) {
        ("x", 1) => 0,
        ("l", 2) => 1,
        ("y", 2) => 2,
        ("c", 1) | ("c", 2) => 3,
        ("zy", 3) => 4,
        ("zl", 3) => 5,
        ("zb", 3) => 6,
        ("z", 2) => 7,
        ("q", 3) => 8,
        ("x", 2) => 9,
        ("v", 2) => 10,
        ("w", 2) if sub_alpha => 11,
        _ => 12,
    };
    (rank, indices, name.to_string())
}

fn push_terms(out: &mut String, head: &str, terms: &[(usize, f64)], model: &MilpModel, tail: &str) {
    out.push(' ');
    out.push_str(head);
    let mut on_line = 0usize;
    for (pos, &(v, coef)) in terms.iter().enumerate() {
        if on_line == TERMS_PER_LINE {
            out.push('\n');
            out.push_str("     ");
            on_line = 0;
        }
        let mag = coef.abs();
        if pos == 0 {
            out.push(' ');
            if coef < 0.0 {
                out.push_str("- ");
            }
        } else if coef < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if mag != 1.0 {
            out.push_str(&fmt_num(mag));
            out.push(' ');
        }
        out.push_str(model.var_name(v));
        on_line += 1;
    }
    out.push_str(tail);
    out.push('\n');
}

/// Renders the model as LP-format text.
pub fn to_lp_string(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("Maximize\n");
    if model.objective.is_empty() {
        out.push_str(" obj:\n");
    } else {
        push_terms(&mut out, "obj:", &model.objective, model, "");
    }
    if !model.rows.is_empty() {
        out.push_str("Subject To\n");
        for row in &model.rows {
            let tail = format!(" {} {}", row.relation.symbol(), fmt_num(row.rhs));
            push_terms(&mut out, &format!("{}:", row.name), &row.terms, model, &tail);
        }
    }
    let mut continuous: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Continuous)
        .map(|v| v.name.as_str())
        .collect();
    continuous.sort_by_key(|n| sort_key(n));
    if !continuous.is_empty() {
        out.push_str("Bounds\n");
        for name in continuous {
            let var = &model.vars()[model.var(name).unwrap()];
            out.push_str(&format!(
                " {} <= {} <= {}\n",
                fmt_num(var.lower),
                name,
                fmt_num(var.upper)
            ));
        }
    }
    let mut binaries: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    binaries.sort_by_key(|n| sort_key(n));
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for name in binaries {
            out.push(' ');
            out.push_str(name);
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

/// Writes the LP text of the model to a file.
pub fn emit_lp(model: &MilpModel, path: &Path) -> Result<(), MilpError> {
    std::fs::write(path, to_lp_string(model))?;
    Ok(())
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Binary,
    Done,
}

fn is_number(tok: &str) -> bool {
    tok.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == '-')
        && tok.parse::<f64>().is_ok()
}

/// Parses LP text in the emitted dialect back into a model (context-free:
/// the result carries [`ModelInfo::Generic`]).
pub fn parse_lp_str(text: &str) -> Result<MilpModel, LpParseError> {
    let mut model = MilpModel::new("parsed", ModelInfo::Generic);
    let err = |m: String| LpParseError(m);

    let mut section = Section::Preamble;
    let mut obj_tokens: Vec<String> = Vec::new();
    let mut row_tokens: Vec<String> = Vec::new();
    let mut bound_lines: Vec<String> = Vec::new();
    let mut binary_tokens: Vec<String> = Vec::new();
    for line in text.lines() {
        match line.trim() {
            "Maximize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Rows;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "Binary" => {
                section = Section::Binary;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Preamble | Section::Done => {
                if !line.trim().is_empty() {
                    return Err(err(format!("unexpected content outside sections: {line:?}")));
                }
            }
            Section::Objective => obj_tokens.extend(line.split_whitespace().map(String::from)),
            Section::Rows => row_tokens.extend(line.split_whitespace().map(String::from)),
            Section::Bounds => bound_lines.push(line.to_string()),
            Section::Binary => binary_tokens.extend(line.split_whitespace().map(String::from)),
        }
    }
    if section != Section::Done {
        return Err(err("missing End marker".into()));
    }

    fn intern(model: &mut MilpModel, name: &str) -> usize {
        model.var(name).unwrap_or_else(|| {
            model.add_var(
                name.to_string(),
                VarKind::Continuous,
                0.0,
                f64::INFINITY,
                super::VarClass::TpTerm,
            )
        })
    }

    // expression tokens -> terms, stopping at a relation or the end
    fn parse_terms(
        model: &mut MilpModel,
        tokens: &[String],
        mut pos: usize,
    ) -> Result<(Vec<(usize, f64)>, usize), LpParseError> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        while pos < tokens.len() {
            let tok = &tokens[pos];
            if tok == "<=" || tok == ">=" || tok == "=" {
                break;
            }
            if tok == "+" {
                sign = 1.0;
            } else if tok == "-" {
                sign = -1.0;
            } else if is_number(tok) {
                if coef.is_some() {
                    return Err(LpParseError(format!("two coefficients before a name at {tok:?}")));
                }
                coef = Some(tok.parse().unwrap());
            } else if tok.ends_with(':') {
                break;
            } else {
                let v = intern(model, tok);
                terms.push((v, sign * coef.take().unwrap_or(1.0)));
                sign = 1.0;
            }
            pos += 1;
        }
        if coef.is_some() {
            return Err(LpParseError("dangling coefficient".into()));
        }
        Ok((terms, pos))
    }

    if !obj_tokens.is_empty() {
        if obj_tokens[0] != "obj:" {
            return Err(err(format!("expected obj: at start of objective, got {:?}", obj_tokens[0])));
        }
        let (terms, pos) = parse_terms(&mut model, &obj_tokens, 1)?;
        if pos != obj_tokens.len() {
            return Err(err("trailing tokens in objective".into()));
        }
        model.objective = terms;
    }

    let mut pos = 0;
    while pos < row_tokens.len() {
        let name_tok = &row_tokens[pos];
        if !name_tok.ends_with(':') {
            return Err(err(format!("expected row name, got {name_tok:?}")));
        }
        let name = name_tok.trim_end_matches(':').to_string();
        let (terms, next) = parse_terms(&mut model, &row_tokens, pos + 1)?;
        if next >= row_tokens.len() {
            return Err(err(format!("row {name} has no relation")));
        }
        let relation = match row_tokens[next].as_str() {
            "<=" => Relation::Le,
            ">=" => Relation::Ge,
            "=" => Relation::Eq,
            other => return Err(err(format!("unknown relation {other:?}"))),
        };
        let rhs_tok = row_tokens
            .get(next + 1)
            .ok_or_else(|| err(format!("row {name} has no right-hand side")))?;
        let rhs: f64 = rhs_tok
            .parse()
            .map_err(|_| err(format!("bad right-hand side {rhs_tok:?}")))?;
        model.add_row(name, terms, relation, rhs);
        pos = next + 2;
    }

    for line in bound_lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 || toks[1] != "<=" || toks[3] != "<=" {
            return Err(err(format!("unsupported bounds line: {line:?}")));
        }
        let lower: f64 = toks[0].parse().map_err(|_| err(format!("bad bound {:?}", toks[0])))?;
        let upper: f64 = toks[4].parse().map_err(|_| err(format!("bad bound {:?}", toks[4])))?;
        let v = intern(&mut model, toks[2]);
        let var = &mut model.vars_mut()[v];
        var.lower = lower;
        var.upper = upper;
    }
    for name in binary_tokens {
        let v = intern(&mut model, &name);
        let var = &mut model.vars_mut()[v];
        var.kind = VarKind::Binary;
        var.lower = 0.0;
        var.upper = 1.0;
    }
    model
        .validate()
        .map_err(|m| err(format!("parsed model is inconsistent: {m}")))?;
    Ok(model)
}

/// Parses an LP file from disk.
pub fn parse_lp(path: &Path) -> Result<MilpModel, MilpError> {
    let text = std::fs::read_to_string(path)?;
    parse_lp_str(&text).map_err(|e| MilpError::InconsistentDesign(e.to_string()))
}
