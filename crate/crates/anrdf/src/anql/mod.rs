//! AnQL: SPARQL-style graph patterns whose triples carry annotation labels.

pub mod ast;
mod builtins;
mod eval;
pub mod results;

use std::collections::BTreeMap;
use std::fmt;

use crate::domain::rational::format_rational;
use crate::domain::{Annotation, Rational};
use crate::graph::Term;

pub use ast::{
    Aggregate, AggregateFn, Builtin, Expr, Filter, Label, OrderKey, Pattern, Query, TermPattern,
    TriplePattern, Variable,
};
pub use eval::{evaluate, evaluate_dataset, Answers, Evaluator};

/// A value bound to a variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Term(Term),
    Annotation(Annotation),
    Number(Rational),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Term(t) => write!(f, "{t}"),
            Value::Annotation(a) => write!(f, "{a}"),
            Value::Number(n) => f.write_str(&format_rational(n)),
        }
    }
}

/// A solution mapping.
pub type Solution = BTreeMap<Variable, Value>;

/// How unannotated triple patterns are labelled before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DefaultRewrite {
    /// One annotation variable shared by every unannotated pattern.
    SharedVar,
    /// A fresh annotation variable per pattern.
    #[default]
    FreshVars,
    /// The domain's ⊤ as a constant label.
    Top,
}

impl DefaultRewrite {
    pub fn from_name(name: &str) -> Option<DefaultRewrite> {
        Some(match name {
            "shared-var" => DefaultRewrite::SharedVar,
            "fresh-vars" => DefaultRewrite::FreshVars,
            "top" => DefaultRewrite::Top,
            _ => return None,
        })
    }
}
