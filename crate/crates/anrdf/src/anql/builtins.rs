//! Built-in functions and predicates.

use super::ast::Builtin;
use super::Value;
use crate::domain::rational::format_rational;
use crate::domain::temporal::allen_lifted;
use crate::domain::{Annotation, Domain, Semiring, TNorm, TemporalValue};

/// Result of a built-in call: a value, or a truth value for predicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Output {
    Value(Value),
    Truth(bool),
}

/// Reads a value as an annotation of `domain`; numbers use the literal
/// shorthand of the domain (a degree, or a single time point).
pub(crate) fn as_annotation(domain: &Domain, v: &Value) -> Result<Annotation, String> {
    match v {
        Value::Annotation(a) => Ok(a.clone()),
        Value::Number(n) => domain
            .parse_literal(&format_rational(n))
            .map_err(|e| format!("{} is not a {} annotation: {}", format_rational(n), domain, e.message)),
        Value::Term(t) => Err(format!("{t} is not an annotation")),
    }
}

fn as_temporal(v: &Value) -> Result<TemporalValue, String> {
    match as_annotation(&Domain::Temporal, v)? {
        Annotation::Temporal(t) => Ok(t),
        other => Err(format!("{other} is not a temporal annotation")),
    }
}

/// The domain used to combine `values`: the graph's domain when it accepts
/// them all, otherwise the primitive domain they share.
pub(crate) fn common_domain(graph: &Domain, values: &[&Annotation]) -> Result<Domain, String> {
    if values.iter().all(|v| graph.check(v).is_ok()) {
        return Ok(graph.clone());
    }
    let first = values.first().ok_or("no annotation to combine")?;
    let d = match first {
        Annotation::Boolean(_) => Domain::Boolean,
        Annotation::Fuzzy(_) => Domain::Fuzzy(TNorm::Min),
        Annotation::Temporal(_) => Domain::Temporal,
        Annotation::Provenance(_) => Domain::Provenance,
        Annotation::Compound(_) => {
            return Err(format!("compound value {first} is not from domain {graph}"))
        }
    };
    for v in values {
        d.check(v).map_err(|e| e.to_string())?;
    }
    Ok(d)
}

pub(crate) fn call(graph: &Domain, b: Builtin, args: &[Option<Value>]) -> Result<Output, String> {
    if args.len() != b.arity() {
        return Err(format!("{} takes {} argument(s)", b.name(), b.arity()));
    }
    if matches!(b, Builtin::Join | Builtin::Meet) {
        // An unbound operand counts as the neutral element, so that
        // `?l1 ∨ ?l2` works on UNION branches binding only one side.
        let bound: Vec<&Value> = args.iter().flatten().collect();
        if bound.is_empty() {
            return Err(format!("{} needs at least one bound operand", b.name()));
        }
        let anns = bound
            .iter()
            .map(|v| as_annotation(graph, v))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&Annotation> = anns.iter().collect();
        let d = common_domain(graph, &refs)?;
        let out = if b == Builtin::Join {
            d.oplus_all(refs)
        } else {
            d.otimes_all(refs)
        };
        return Ok(Output::Value(Value::Annotation(out)));
    }
    let vals = args
        .iter()
        .map(|a| a.as_ref().ok_or_else(|| format!("unbound argument to {}", b.name())))
        .collect::<Result<Vec<_>, _>>()?;
    let kind_probe = |kind: &str| match vals[0] {
        Value::Annotation(a) => Output::Truth(a.kind() == kind),
        _ => Output::Truth(false),
    };
    Ok(match b {
        Builtin::Length => {
            let t = as_temporal(vals[0])?;
            Output::Value(Value::Number(t.length().map_err(|e| e.to_string())?))
        }
        Builtin::MaxLength => {
            let t = as_temporal(vals[0])?;
            let iv = t.maxlength().map_err(|e| e.to_string())?;
            Output::Value(Value::Annotation(Annotation::Temporal(TemporalValue::interval(iv))))
        }
        Builtin::Allen(r, q) => {
            let t1 = as_temporal(vals[0])?;
            let t2 = as_temporal(vals[1])?;
            Output::Truth(allen_lifted(r, q, &t1, &t2).map_err(|e| e.to_string())?)
        }
        Builtin::IsTemporal => kind_probe("temporal"),
        Builtin::IsFuzzy => kind_probe("fuzzy"),
        Builtin::IsProvenance => kind_probe("provenance"),
        Builtin::Join | Builtin::Meet => unreachable!("handled above"),
    })
}
