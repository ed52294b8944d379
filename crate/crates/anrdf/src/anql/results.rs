//! Answer serialization: TSV and a SPARQL-style JSON bindings document.

use serde_json::{json, Map, Value as Json};

use super::eval::Answers;
use super::{Solution, Value};
use crate::domain::Domain;
use crate::graph::Term;

/// One row per answer, values in their literal syntax, unbound cells empty.
pub fn to_tsv(answers: &Answers) -> String {
    let mut out = String::new();
    let header: Vec<String> = answers.variables.iter().map(|v| v.to_string()).collect();
    out.push_str(&header.join("\t"));
    out.push('\n');
    for row in &answers.rows {
        out.push_str(&tsv_row(answers, row));
        out.push('\n');
    }
    out
}

fn tsv_row(answers: &Answers, row: &Solution) -> String {
    answers
        .variables
        .iter()
        .map(|v| row.get(v).map(|x| x.to_string()).unwrap_or_default())
        .collect::<Vec<_>>()
        .join("\t")
}

/// Sorts rows by their TSV rendering, for output that does not depend on
/// evaluation order.
pub fn sort_rows(answers: &mut Answers) {
    let rows = std::mem::take(&mut answers.rows);
    let mut keyed: Vec<(String, Solution)> =
        rows.into_iter().map(|r| (tsv_row(answers, &r), r)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    answers.rows = keyed.into_iter().map(|(_, r)| r).collect();
}

fn json_value(v: &Value, domain: &Domain) -> Json {
    match v {
        Value::Term(t) => {
            let kind = match t {
                Term::Iri(_) => "iri",
                Term::Literal(_) => "literal",
                Term::Skolem(_) => "skolem",
            };
            json!({ "type": kind, "value": t.lexical() })
        }
        Value::Number(_) => json!({ "type": "literal", "value": v.to_string() }),
        Value::Annotation(a) => {
            let id = if domain.check(a).is_ok() {
                domain.id()
            } else {
                a.kind().to_string()
            };
            json!({ "type": format!("annotation:{id}"), "value": a.to_string() })
        }
    }
}

/// `{"head": {"vars": [...]}, "results": {"bindings": [...]}}`
pub fn to_json(answers: &Answers, domain: &Domain) -> String {
    let vars: Vec<Json> = answers
        .variables
        .iter()
        .map(|v| Json::String(v.name().to_string()))
        .collect();
    let bindings: Vec<Json> = answers
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            for v in &answers.variables {
                if let Some(x) = row.get(v) {
                    m.insert(v.name().to_string(), json_value(x, domain));
                }
            }
            Json::Object(m)
        })
        .collect();
    let doc = json!({ "head": { "vars": vars }, "results": { "bindings": bindings } });
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}
