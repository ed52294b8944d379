//! Evaluation of the pattern algebra over a closed annotated graph.

use std::cmp::Ordering;
use std::collections::HashMap;

use indexmap::IndexSet;
use num::{Signed, Zero};

use super::ast::{
    Aggregate, AggregateFn, Expr, Filter, Label, OrderKey, Pattern, Query, TermPattern,
    TriplePattern, Variable,
};
use super::builtins::{self, as_annotation, common_domain, Output};
use super::{Solution, Value};
use crate::domain::{Annotation, Domain, Rational, Semiring, TimePoint};
use crate::graph::{AnnotatedGraph, Dataset, Term};

/// The answers to a query plus any diagnostics raised while evaluating it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answers {
    pub variables: Vec<Variable>,
    pub rows: Vec<Solution>,
    pub diagnostics: Vec<String>,
}

/// Evaluates a query over one (closed) graph.
pub fn evaluate(graph: &AnnotatedGraph, query: &Query) -> Answers {
    let mut ev = Evaluator::new(graph);
    let rows = ev.eval(&query.pattern);
    Answers {
        variables: query.variables.clone(),
        rows,
        diagnostics: ev.into_diagnostics(),
    }
}

/// Evaluates a query over the main graph and, when present, the segregated
/// side graph, concatenating the answers.
pub fn evaluate_dataset(ds: &Dataset, query: &Query) -> Answers {
    let mut answers = evaluate(&ds.graph, query);
    if let Some(side) = &ds.side {
        let more = evaluate(side, query);
        answers.rows.extend(more.rows);
        for d in more.diagnostics {
            if !answers.diagnostics.contains(&d) {
                answers.diagnostics.push(d);
            }
        }
    }
    answers
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Error,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

pub struct Evaluator<'g> {
    graph: &'g AnnotatedGraph,
    diagnostics: IndexSet<String>,
}

impl<'g> Evaluator<'g> {
    pub fn new(graph: &'g AnnotatedGraph) -> Evaluator<'g> {
        Evaluator {
            graph,
            diagnostics: IndexSet::new(),
        }
    }

    pub fn into_diagnostics(self) -> Vec<String> {
        self.diagnostics.into_iter().collect()
    }

    fn domain(&self) -> &Domain {
        self.graph.domain()
    }

    fn note(&mut self, message: String) {
        self.diagnostics.insert(message);
    }

    /// Evaluates a pattern; every operator's output is reduced to its
    /// domain-maximal answers.
    pub fn eval(&mut self, p: &Pattern) -> Vec<Solution> {
        let rows = match p {
            Pattern::Bap(tps) => self.eval_bap(tps),
            Pattern::And(a, b) => {
                let left = self.eval(a);
                let right = self.eval(b);
                let mut out = Vec::new();
                for l in &left {
                    for r in &right {
                        if let Some(m) = self.merge(l, r) {
                            out.push(m);
                        }
                    }
                }
                out
            }
            Pattern::Union(a, b) => {
                let mut out = self.eval(a);
                out.extend(self.eval(b));
                out
            }
            Pattern::Optional {
                left,
                right,
                condition,
            } => {
                let left = self.eval(left);
                let right = self.eval(right);
                self.optional(left, &right, condition.as_ref())
            }
            Pattern::Filter(inner, f) => {
                let rows = self.eval(inner);
                rows.into_iter()
                    .filter(|sol| self.filter(f, sol) == Tri::True)
                    .collect()
            }
            Pattern::Assign {
                pattern,
                expr,
                target,
            } => {
                let rows = self.eval(pattern);
                let mut out = Vec::with_capacity(rows.len());
                for mut sol in rows {
                    match self.expr(expr, &sol) {
                        Ok(Output::Value(Value::Annotation(a))) if self.is_bottom(&a) => {
                            self.note(format!("ASSIGN to {target} skipped a solution: result is bottom"))
                        }
                        Ok(out_value) => {
                            sol.insert(target.clone(), output_value(out_value));
                            out.push(sol);
                        }
                        Err(e) => self.note(format!("ASSIGN to {target} skipped a solution: {e}")),
                    }
                }
                out
            }
            Pattern::GroupBy {
                pattern,
                keys,
                aggregates,
            } => {
                let rows = self.eval(pattern);
                self.group_by(rows, keys, aggregates)
            }
            Pattern::OrderBy(inner, keys) => {
                let rows = self.eval(inner);
                self.order_by(rows, keys)
            }
            Pattern::Limit(inner, n) => {
                let mut rows = self.eval(inner);
                rows.truncate(*n);
                rows
            }
            Pattern::SubSelect(vars, inner) => self
                .eval(inner)
                .into_iter()
                .map(|sol| {
                    sol.into_iter()
                        .filter(|(k, _)| vars.contains(k))
                        .collect::<Solution>()
                })
                .collect(),
        };
        self.prune(rows)
    }

    fn eval_bap(&mut self, tps: &[TriplePattern]) -> Vec<Solution> {
        let mut rows = vec![Solution::new()];
        for tp in tps {
            let mut next = Vec::new();
            for sol in &rows {
                self.match_pattern(tp, sol, &mut next);
            }
            rows = next;
            if rows.is_empty() {
                break;
            }
        }
        rows
    }

    fn match_pattern(&self, tp: &TriplePattern, sol: &Solution, out: &mut Vec<Solution>) {
        let mut fixed: [Option<Term>; 3] = [None, None, None];
        for (slot, tpat) in [&tp.subject, &tp.predicate, &tp.object].into_iter().enumerate() {
            match tpat {
                TermPattern::Term(t) => fixed[slot] = Some(t.clone()),
                TermPattern::Var(v) => match sol.get(v) {
                    Some(Value::Term(t)) => fixed[slot] = Some(t.clone()),
                    Some(_) => return,
                    None => {}
                },
            }
        }
        if let Label::Var(v) = &tp.label {
            if matches!(sol.get(v), Some(Value::Term(_) | Value::Number(_))) {
                return;
            }
        }
        let d = self.domain();
        'candidates: for (s, p, o, mu) in
            self.graph
                .matching(fixed[0].as_ref(), fixed[1].as_ref(), fixed[2].as_ref())
        {
            let mut next = sol.clone();
            for (tpat, term) in [(&tp.subject, s), (&tp.predicate, p), (&tp.object, o)] {
                if let TermPattern::Var(v) = tpat {
                    match next.get(v) {
                        Some(Value::Term(bound)) if bound != term => continue 'candidates,
                        Some(_) => {}
                        None => {
                            next.insert(v.clone(), Value::Term(term.clone()));
                        }
                    }
                }
            }
            match &tp.label {
                Label::Const(lambda) => {
                    if !d.leq(lambda, mu).unwrap_or(false) {
                        continue;
                    }
                }
                Label::Var(v) => {
                    let value = match next.get(v) {
                        Some(Value::Annotation(prev)) => match meet(d, prev, mu) {
                            Some(m) => m,
                            None => continue,
                        },
                        _ => mu.clone(),
                    };
                    next.insert(v.clone(), Value::Annotation(value));
                }
            }
            out.push(next);
        }
    }

    /// ⊗-union of two ⊗-compatible solutions.
    fn merge(&self, a: &Solution, b: &Solution) -> Option<Solution> {
        let mut out = a.clone();
        for (k, vb) in b {
            match a.get(k) {
                None => {
                    out.insert(k.clone(), vb.clone());
                }
                Some(Value::Annotation(x)) => match vb {
                    Value::Annotation(y) => {
                        out.insert(k.clone(), Value::Annotation(meet(self.domain(), x, y)?));
                    }
                    _ => return None,
                },
                Some(va) => {
                    if va != vb {
                        return None;
                    }
                }
            }
        }
        Some(out)
    }

    /// OPTIONAL with condition. Every ⊗-compatible right solution satisfying
    /// the condition yields a merged answer. The left solution is kept on its
    /// own unless some such right solution covers it, i.e. leaves every
    /// shared annotation unchanged by the meet.
    fn optional(
        &mut self,
        left: Vec<Solution>,
        right: &[Solution],
        condition: Option<&Filter>,
    ) -> Vec<Solution> {
        let mut out = Vec::new();
        for sol1 in left {
            let mut merged = Vec::new();
            let mut covered = false;
            for sol2 in right {
                let Some(sol) = self.merge(&sol1, sol2) else {
                    continue;
                };
                let holds = condition.map_or(Tri::True, |r| self.filter(r, &sol)) == Tri::True;
                if !holds {
                    continue;
                }
                let covers = sol1.iter().all(|(k, v)| match v {
                    Value::Annotation(_) if sol2.contains_key(k) => sol.get(k) == Some(v),
                    _ => true,
                });
                covered |= covers;
                merged.push(sol);
            }
            if !covered {
                out.push(sol1);
            }
            out.extend(merged);
        }
        out
    }

    fn filter(&self, f: &Filter, sol: &Solution) -> Tri {
        match f {
            Filter::Bound(v) => sol.contains_key(v).into(),
            Filter::IsBlank(e) | Filter::IsIri(e) | Filter::IsLiteral(e) => {
                let Ok(Output::Value(v)) = self.expr(e, sol) else {
                    return Tri::Error;
                };
                match (f, v) {
                    (Filter::IsBlank(_), Value::Term(t)) => matches!(t, Term::Skolem(_)).into(),
                    (Filter::IsIri(_), Value::Term(t)) => t.is_iri().into(),
                    (Filter::IsLiteral(_), Value::Term(t)) => {
                        matches!(t, Term::Literal(_)).into()
                    }
                    (Filter::IsLiteral(_), Value::Number(_)) => Tri::True,
                    _ => Tri::False,
                }
            }
            Filter::Eq(a, b) => match (self.expr(a, sol), self.expr(b, sol)) {
                (Ok(x), Ok(y)) => (output_value(x) == output_value(y)).into(),
                _ => Tri::Error,
            },
            Filter::Not(inner) => match self.filter(inner, sol) {
                Tri::True => Tri::False,
                Tri::False => Tri::True,
                Tri::Error => Tri::Error,
            },
            Filter::And(a, b) => match (self.filter(a, sol), self.filter(b, sol)) {
                (Tri::True, Tri::True) => Tri::True,
                (Tri::Error, _) | (_, Tri::Error) => Tri::Error,
                _ => Tri::False,
            },
            Filter::Or(a, b) => match (self.filter(a, sol), self.filter(b, sol)) {
                (Tri::True, _) | (_, Tri::True) => Tri::True,
                (Tri::Error, _) | (_, Tri::Error) => Tri::Error,
                _ => Tri::False,
            },
            Filter::Leq(a, b) => {
                // The annotated predicates are two-valued: anything that cannot
                // be compared is simply false.
                let (Ok(Output::Value(x)), Ok(Output::Value(y))) = (self.expr(a, sol), self.expr(b, sol))
                else {
                    return Tri::False;
                };
                let d = self.domain();
                let (Ok(x), Ok(y)) = (as_annotation(d, &x), as_annotation(d, &y)) else {
                    return Tri::False;
                };
                match common_domain(d, &[&x, &y]) {
                    Ok(cd) => cd.preceq(&x, &y).into(),
                    Err(_) => Tri::False,
                }
            }
            Filter::Call(b, args) => match self.call(*b, args, sol) {
                Ok(Output::Truth(t)) => t.into(),
                _ => Tri::False,
            },
        }
    }

    fn expr(&self, e: &Expr, sol: &Solution) -> Result<Output, String> {
        match e {
            Expr::Var(v) => sol
                .get(v)
                .cloned()
                .map(Output::Value)
                .ok_or_else(|| format!("{v} is unbound")),
            Expr::Const(v) => Ok(Output::Value(v.clone())),
            Expr::Call(b, args) => self.call(*b, args, sol),
        }
    }

    fn call(&self, b: super::ast::Builtin, args: &[Expr], sol: &Solution) -> Result<Output, String> {
        let mut values = Vec::with_capacity(args.len());
        for a in args {
            values.push(match a {
                Expr::Var(v) => sol.get(v).cloned(),
                other => match self.expr(other, sol)? {
                    Output::Value(v) => Some(v),
                    Output::Truth(_) => return Err("a truth value is not a valid argument".into()),
                },
            });
        }
        builtins::call(self.domain(), b, &values)
    }

    fn group_by(
        &mut self,
        rows: Vec<Solution>,
        keys: &[Variable],
        aggregates: &[Aggregate],
    ) -> Vec<Solution> {
        let mut groups: Vec<(Solution, Vec<Solution>)> = Vec::new();
        let mut index: HashMap<Solution, usize> = HashMap::new();
        for sol in rows {
            let key: Solution = sol
                .iter()
                .filter(|(k, _)| keys.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let at = *index.entry(key.clone()).or_insert_with(|| {
                groups.push((key, Vec::new()));
                groups.len() - 1
            });
            groups[at].1.push(sol);
        }
        let mut out: IndexSet<Solution> = IndexSet::new();
        'groups: for (key, members) in groups {
            let mut sol = key;
            for agg in aggregates {
                match self.aggregate(agg, &members) {
                    Ok(v) => {
                        sol.insert(agg.target.clone(), v);
                    }
                    Err(e) => {
                        self.note(format!("group dropped, aggregate {}: {e}", agg.target));
                        continue 'groups;
                    }
                }
            }
            out.insert(sol);
        }
        out.into_iter().collect()
    }

    fn aggregate(&self, agg: &Aggregate, members: &[Solution]) -> Result<Value, String> {
        let evaluated: Vec<Result<Value, String>> = members
            .iter()
            .map(|sol| self.expr(&agg.argument, sol).map(output_value))
            .collect();
        if agg.function == AggregateFn::Count {
            let n = evaluated.iter().filter(|v| v.is_ok()).count();
            return Ok(Value::Number(Rational::from_integer((n as i64).into())));
        }
        let values = evaluated.into_iter().collect::<Result<Vec<_>, _>>()?;
        let numbers = || -> Result<Vec<&Rational>, String> {
            values
                .iter()
                .map(|v| match v {
                    Value::Number(n) => Ok(n),
                    other => Err(format!("{other} is not numeric")),
                })
                .collect()
        };
        match agg.function {
            AggregateFn::Count => unreachable!("handled above"),
            AggregateFn::Sum => Ok(Value::Number(numbers()?.into_iter().cloned().sum())),
            AggregateFn::Avg => {
                let ns = numbers()?;
                if ns.is_empty() {
                    return Err("average of no values".into());
                }
                let total: Rational = ns.iter().copied().cloned().sum();
                Ok(Value::Number(
                    total / Rational::from_integer((ns.len() as i64).into()),
                ))
            }
            AggregateFn::Max | AggregateFn::Min => {
                total_order_class(&values)?;
                let pick = if agg.function == AggregateFn::Max {
                    values.iter().max()
                } else {
                    values.iter().min()
                };
                pick.cloned().ok_or_else(|| "no values".into())
            }
            AggregateFn::Join | AggregateFn::Meet => {
                let d = self.domain();
                let anns = values
                    .iter()
                    .map(|v| as_annotation(d, v))
                    .collect::<Result<Vec<_>, _>>()?;
                let refs: Vec<&Annotation> = anns.iter().collect();
                let cd = common_domain(d, &refs)?;
                let out = if agg.function == AggregateFn::Join {
                    cd.oplus_all(refs)
                } else {
                    cd.otimes_all(refs)
                };
                if cd.is_bottom(&out) {
                    return Err("the aggregate is ⊥".into());
                }
                Ok(Value::Annotation(out))
            }
        }
    }

    fn order_by(&mut self, mut rows: Vec<Solution>, keys: &[OrderKey]) -> Vec<Solution> {
        for key in keys {
            let values: Vec<Value> = rows.iter().filter_map(|sol| sol.get(&key.variable).cloned()).collect();
            if let Err(e) = order_class(&values) {
                self.note(format!("ORDERBY {} left the order unchanged: {e}", key.variable));
                return rows;
            }
        }
        rows.sort_by(|a, b| {
            for key in keys {
                let ord = match (a.get(&key.variable), b.get(&key.variable)) {
                    (None, None) => Ordering::Equal,
                    (None, Some(_)) => Ordering::Less,
                    (Some(_), None) => Ordering::Greater,
                    (Some(x), Some(y)) => compare_values(x, y),
                };
                let ord = if key.descending { ord.reverse() } else { ord };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        });
        rows
    }

    /// Drops every solution dominated by a distinct solution that agrees on
    /// all other values and has pointwise larger annotations.
    fn prune(&self, rows: Vec<Solution>) -> Vec<Solution> {
        if rows.len() < 2 {
            return rows;
        }
        let mut groups: HashMap<Vec<(&Variable, Option<&Value>)>, Vec<usize>> = HashMap::new();
        for (i, sol) in rows.iter().enumerate() {
            let key: Vec<(&Variable, Option<&Value>)> = sol
                .iter()
                .map(|(k, v)| (k, (!matches!(v, Value::Annotation(_))).then_some(v)))
                .collect();
            if key.iter().any(|(_, v)| v.is_none()) {
                groups.entry(key).or_default().push(i);
            }
        }
        let mut drop = vec![false; rows.len()];
        for members in groups.values() {
            for &i in members {
                drop[i] = members
                    .iter()
                    .any(|&j| rows[j] != rows[i] && self.dominated(&rows[i], &rows[j]));
            }
        }
        rows.into_iter()
            .zip(drop)
            .filter_map(|(sol, d)| (!d).then_some(sol))
            .collect()
    }

    fn is_bottom(&self, a: &Annotation) -> bool {
        common_domain(self.domain(), &[a]).is_ok_and(|d| d.is_bottom(a))
    }

    fn dominated(&self, lower: &Solution, upper: &Solution) -> bool {
        lower.iter().all(|(k, v)| match (v, upper.get(k)) {
            (Value::Annotation(a), Some(Value::Annotation(b))) => common_domain(self.domain(), &[a, b])
                .map(|d| d.preceq(a, b))
                .unwrap_or(false),
            _ => true,
        })
    }
}

fn meet(d: &Domain, a: &Annotation, b: &Annotation) -> Option<Annotation> {
    let cd = common_domain(d, &[a, b]).ok()?;
    let m = cd.otimes(a, b);
    (!cd.is_bottom(&m)).then_some(m)
}

fn output_value(o: Output) -> Value {
    match o {
        Output::Value(v) => v,
        Output::Truth(b) => Value::Term(Term::literal(if b { "true" } else { "false" })),
    }
}

/// Values MAX/MIN accept: all numbers, all terms, or all booleans or degrees.
fn total_order_class(values: &[Value]) -> Result<(), String> {
    let class = |v: &Value| match v {
        Value::Number(_) => Some(0),
        Value::Term(_) => Some(1),
        Value::Annotation(Annotation::Boolean(_)) => Some(2),
        Value::Annotation(Annotation::Fuzzy(_)) => Some(3),
        Value::Annotation(_) => None,
    };
    let mut seen = None;
    for v in values {
        let c = class(v).ok_or_else(|| format!("{v} is not totally ordered"))?;
        if seen.is_some_and(|s| s != c) {
            return Err("values of different types".into());
        }
        seen = Some(c);
    }
    Ok(())
}

fn order_class(values: &[Value]) -> Result<(), String> {
    let class = |v: &Value| match v {
        Value::Number(_) => "number",
        Value::Term(_) => "term",
        Value::Annotation(a) => a.kind(),
    };
    let mut seen: Option<&str> = None;
    for v in values {
        let c = class(v);
        if seen.is_some_and(|s| s != c) {
            return Err(format!("cannot order {} against {c} values", seen.unwrap_or("")));
        }
        seen = Some(c);
    }
    Ok(())
}

/// Total order used by ORDERBY; annotations are linearized per domain and
/// ties are broken on their serialized form.
pub(crate) fn compare_values(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Annotation(x), Value::Annotation(y)) => linear_key(x)
            .cmp(&linear_key(y))
            .then_with(|| x.to_string().cmp(&y.to_string())),
        _ => a.cmp(b),
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum LinearKey {
    Scalar(Rational),
    /// Earliest start, then total length with infinite lengths last.
    Temporal(Option<TimePoint>, (bool, Rational)),
    Count(usize),
}

fn linear_key(a: &Annotation) -> LinearKey {
    match a {
        Annotation::Boolean(b) => LinearKey::Scalar(Rational::from_integer((*b as i64).into())),
        Annotation::Fuzzy(d) => LinearKey::Scalar(d.value().clone()),
        Annotation::Temporal(t) => {
            let (start, len) = t.sort_key();
            let len = match len {
                Some(l) if !l.is_negative() => (false, l),
                _ => (true, Rational::zero()),
            };
            LinearKey::Temporal(start, len)
        }
        Annotation::Provenance(p) => LinearKey::Count(p.clauses().len()),
        Annotation::Compound(c) => LinearKey::Count(c.len()),
    }
}
