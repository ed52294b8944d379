//! The AnQL pattern algebra.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;

use super::Value;
use crate::domain::temporal::{AllenRelation, Quantifier};
use crate::domain::Annotation;
use crate::graph::Term;

/// A query variable. Names starting with `#` are generated by rewrites and are
/// never shown by `SELECT *`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Variable {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_internal(&self) -> bool {
        self.0.starts_with('#')
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermPattern {
    Var(Variable),
    Term(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    Var(Variable),
    Const(Annotation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
    pub label: Label,
}

impl TriplePattern {
    pub fn term_variables(&self) -> impl Iterator<Item = &Variable> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(|t| match t {
                TermPattern::Var(v) => Some(v),
                TermPattern::Term(_) => None,
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Length,
    MaxLength,
    Allen(AllenRelation, Quantifier),
    Join,
    Meet,
    IsTemporal,
    IsFuzzy,
    IsProvenance,
}

impl Builtin {
    /// Resolves a built-in name, ignoring case. Allen relations are named
    /// `<relation><mode>` with mode `EE`, `EA`, `AE`, `EAAE` or `AA`; `Any`
    /// and `All` alias `EE` and `AA`, and the bare relation name means `AA`.
    pub fn from_name(name: &str) -> Option<Builtin> {
        let lower = name.to_ascii_lowercase();
        let simple = match lower.as_str() {
            "length" => Some(Builtin::Length),
            "maxlength" => Some(Builtin::MaxLength),
            "join" => Some(Builtin::Join),
            "meet" => Some(Builtin::Meet),
            "istemporal" => Some(Builtin::IsTemporal),
            "isfuzzy" => Some(Builtin::IsFuzzy),
            "isprovenance" => Some(Builtin::IsProvenance),
            _ => None,
        };
        if simple.is_some() {
            return simple;
        }
        for r in AllenRelation::ALL {
            let Some(rest) = lower.strip_prefix(&r.name().to_ascii_lowercase()) else {
                continue;
            };
            let q = match rest {
                "" | "all" | "aa" => Quantifier::ForallForall,
                "any" | "ee" => Quantifier::ExistsExists,
                "ea" => Quantifier::ExistsForall,
                "ae" => Quantifier::ForallExists,
                "eaae" => Quantifier::ExistsForallAndForallExists,
                _ => continue,
            };
            return Some(Builtin::Allen(r, q));
        }
        None
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::Length => "length".into(),
            Builtin::MaxLength => "maxlength".into(),
            Builtin::Allen(r, q) => format!("{}{}", r.name(), q.suffix()),
            Builtin::Join => "join".into(),
            Builtin::Meet => "meet".into(),
            Builtin::IsTemporal => "isTEMPORAL".into(),
            Builtin::IsFuzzy => "isFUZZY".into(),
            Builtin::IsProvenance => "isPROVENANCE".into(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Builtin::Allen(..) | Builtin::Join | Builtin::Meet => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(Variable),
    Const(Value),
    Call(Builtin, Vec<Expr>),
}

impl Expr {
    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Variable>) {
        match self {
            Expr::Var(v) => out.push(v),
            Expr::Const(_) => {}
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn variables(&self) -> Vec<&Variable> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Filter {
    Bound(Variable),
    IsBlank(Expr),
    IsIri(Expr),
    IsLiteral(Expr),
    Eq(Expr, Expr),
    Not(Box<Filter>),
    And(Box<Filter>, Box<Filter>),
    Or(Box<Filter>, Box<Filter>),
    /// `x ⪯ y` in the annotation order.
    Leq(Expr, Expr),
    Call(Builtin, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateFn {
    Sum,
    Avg,
    Max,
    Min,
    Count,
    Join,
    Meet,
}

impl AggregateFn {
    pub fn from_name(name: &str) -> Option<AggregateFn> {
        Some(match name.to_ascii_uppercase().as_str() {
            "SUM" => AggregateFn::Sum,
            "AVG" => AggregateFn::Avg,
            "MAX" => AggregateFn::Max,
            "MIN" => AggregateFn::Min,
            "COUNT" => AggregateFn::Count,
            "JOIN" | "⊕" => AggregateFn::Join,
            "MEET" | "⊗" => AggregateFn::Meet,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub function: AggregateFn,
    pub argument: Expr,
    pub target: Variable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderKey {
    pub variable: Variable,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Bap(Vec<TriplePattern>),
    And(Box<Pattern>, Box<Pattern>),
    Union(Box<Pattern>, Box<Pattern>),
    Optional {
        left: Box<Pattern>,
        right: Box<Pattern>,
        condition: Option<Filter>,
    },
    Filter(Box<Pattern>, Filter),
    Assign {
        pattern: Box<Pattern>,
        expr: Expr,
        target: Variable,
    },
    GroupBy {
        pattern: Box<Pattern>,
        keys: Vec<Variable>,
        aggregates: Vec<Aggregate>,
    },
    OrderBy(Box<Pattern>, Vec<OrderKey>),
    Limit(Box<Pattern>, usize),
    SubSelect(Vec<Variable>, Box<Pattern>),
}

impl Pattern {
    /// Variables that may be bound by the pattern, in order of first occurrence.
    pub fn variables(&self) -> IndexSet<Variable> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut IndexSet<Variable>) {
        match self {
            Pattern::Bap(tps) => {
                for tp in tps {
                    for v in tp.term_variables() {
                        out.insert(v.clone());
                    }
                    if let Label::Var(v) = &tp.label {
                        out.insert(v.clone());
                    }
                }
            }
            Pattern::And(a, b) | Pattern::Union(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Pattern::Optional { left, right, .. } => {
                left.collect_vars(out);
                right.collect_vars(out);
            }
            Pattern::Filter(p, _) | Pattern::OrderBy(p, _) | Pattern::Limit(p, _) => {
                p.collect_vars(out)
            }
            Pattern::Assign { pattern, target, .. } => {
                pattern.collect_vars(out);
                out.insert(target.clone());
            }
            Pattern::GroupBy {
                keys, aggregates, ..
            } => {
                out.extend(keys.iter().cloned());
                out.extend(aggregates.iter().map(|a| a.target.clone()));
            }
            Pattern::SubSelect(vars, _) => out.extend(vars.iter().cloned()),
        }
    }
}

/// A parsed SELECT query: output columns plus the full algebra expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub variables: Vec<Variable>,
    pub pattern: Pattern,
}

impl Query {
    pub fn has_order(&self) -> bool {
        fn walk(p: &Pattern) -> bool {
            match p {
                Pattern::OrderBy(..) => true,
                Pattern::Limit(p, _) | Pattern::SubSelect(_, p) => walk(p),
                _ => false,
            }
        }
        walk(&self.pattern)
    }
}
