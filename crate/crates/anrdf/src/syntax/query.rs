//! The AnQL query grammar.
//!
//! Group elements are combined left to right: adjacent triple patterns form
//! one basic pattern, nested groups and UNIONs are joined with AND. FILTERs
//! apply to the whole stretch of the group up to the next ASSIGN, GROUPBY,
//! ORDERBY or LIMIT (or the end of the group); trailing FILTERs of an
//! OPTIONAL block become its condition.

use std::collections::BTreeSet;

use super::cursor::{is_name_char, is_name_start, Cursor};
use super::document::{parse_iri_ref, parse_term, PrefixMap};
use super::literal::{parse_annotation, parse_number};
use super::SyntaxError;
use crate::anql::{
    Aggregate, AggregateFn, Builtin, DefaultRewrite, Expr, Filter, Label, OrderKey, Pattern,
    Query, TermPattern, TriplePattern, Value, Variable,
};
use crate::domain::{Domain, Semiring};

type FilterCtor = fn(Expr) -> Filter;

/// Parses a query. Annotation literals are read in `domain`; unannotated
/// triple patterns are labelled according to `rewrite`.
pub fn parse_query(
    text: &str,
    domain: &Domain,
    rewrite: DefaultRewrite,
) -> Result<Query, SyntaxError> {
    let mut p = Parser {
        cur: Cursor::new(text),
        prefixes: PrefixMap::default(),
        domain,
        rewrite,
        fresh: 0,
        term_vars: BTreeSet::new(),
        label_vars: BTreeSet::new(),
    };
    p.prologue()?;
    let start = p.cur.pos();
    let (variables, pattern) = p.select()?;
    p.cur.skip_ws();
    if !p.cur.at_end() {
        return Err(p.cur.error(format!("unexpected {} after query", p.cur.describe())));
    }
    if let Some(v) = p.term_vars.intersection(&p.label_vars).next() {
        return Err(p.cur.error_at(
            start,
            format!("{v} is used both as a term and as an annotation"),
        ));
    }
    Ok(Query { variables, pattern })
}

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: PrefixMap,
    domain: &'a Domain,
    rewrite: DefaultRewrite,
    fresh: usize,
    term_vars: BTreeSet<Variable>,
    label_vars: BTreeSet<Variable>,
}

fn and_all(filters: Vec<Filter>) -> Option<Filter> {
    filters
        .into_iter()
        .reduce(|a, b| Filter::And(Box::new(a), Box::new(b)))
}

fn and(current: Option<Pattern>, next: Pattern) -> Pattern {
    match current {
        None => next,
        Some(c) => Pattern::And(Box::new(c), Box::new(next)),
    }
}

impl<'a> Parser<'a> {
    fn ws(&mut self) {
        self.cur.skip_ws();
    }

    fn prologue(&mut self) -> Result<(), SyntaxError> {
        loop {
            self.ws();
            if self.cur.eat_keyword("PREFIX") || self.cur.eat_keyword("@prefix") {
                self.ws();
                let name = self.cur.take_while(is_name_char).to_string();
                self.cur.expect(":")?;
                self.ws();
                let ns = parse_iri_ref(&mut self.cur)?;
                self.prefixes.insert(&name, &ns);
                self.ws();
                self.cur.eat(".");
            } else {
                return Ok(());
            }
        }
    }

    /// `SELECT vars [WHERE] { ... } [ORDERBY ...] [LIMIT n]`
    fn select(&mut self) -> Result<(Vec<Variable>, Pattern), SyntaxError> {
        self.ws();
        if !self.cur.eat_keyword("SELECT") {
            return Err(self.cur.error(format!("expected SELECT, found {}", self.cur.describe())));
        }
        self.ws();
        let mut vars = Vec::new();
        let star = self.cur.eat("*");
        if !star {
            loop {
                self.ws();
                if !matches!(self.cur.peek(), Some('?' | '$')) {
                    break;
                }
                vars.push(self.variable()?);
            }
            if vars.is_empty() {
                return Err(self.cur.error("expected `*` or a variable after SELECT"));
            }
        }
        self.ws();
        self.cur.eat_keyword("WHERE");
        self.ws();
        let group_at = self.cur.pos();
        let mut body = self.group()?;
        let available = body.variables();
        if star {
            vars = available.iter().filter(|v| !v.is_internal()).cloned().collect();
        } else if let Some(v) = vars.iter().find(|v| !available.contains(*v)) {
            return Err(self
                .cur
                .error_at(group_at, format!("selected variable {v} does not occur in the pattern")));
        }
        let mut limit = None;
        loop {
            self.ws();
            if let Some(keys) = self.order_keys()? {
                body = Pattern::OrderBy(Box::new(body), keys);
            } else if self.cur.eat_keyword("LIMIT") {
                limit = Some(self.count()?);
            } else {
                break;
            }
        }
        let mut pattern = Pattern::SubSelect(vars.clone(), Box::new(body));
        if let Some(n) = limit {
            pattern = Pattern::Limit(Box::new(pattern), n);
        }
        Ok((vars, pattern))
    }

    fn count(&mut self) -> Result<usize, SyntaxError> {
        self.ws();
        let at = self.cur.pos();
        let digits = self.cur.take_while(|c| c.is_ascii_digit());
        digits
            .parse()
            .map_err(|_| self.cur.error_at(at, "expected a non-negative integer"))
    }

    fn order_keys(&mut self) -> Result<Option<Vec<OrderKey>>, SyntaxError> {
        let save = self.cur.pos();
        let matched = self.cur.eat_keyword("ORDERBY") || {
            if self.cur.eat_keyword("ORDER") {
                self.ws();
                self.cur.eat_keyword("BY") || {
                    self.cur.reset(save);
                    false
                }
            } else {
                false
            }
        };
        if !matched {
            return Ok(None);
        }
        let mut keys = Vec::new();
        loop {
            self.ws();
            let descending = if self.cur.eat_keyword("DESC") {
                Some(true)
            } else if self.cur.eat_keyword("ASC") {
                Some(false)
            } else {
                None
            };
            match descending {
                Some(d) => {
                    self.ws();
                    self.cur.expect("(")?;
                    self.ws();
                    let variable = self.variable()?;
                    self.ws();
                    self.cur.expect(")")?;
                    keys.push(OrderKey {
                        variable,
                        descending: d,
                    });
                }
                None if matches!(self.cur.peek(), Some('?' | '$')) => keys.push(OrderKey {
                    variable: self.variable()?,
                    descending: false,
                }),
                None => break,
            }
        }
        if keys.is_empty() {
            return Err(self.cur.error("expected an ORDERBY key"));
        }
        Ok(Some(keys))
    }

    fn variable(&mut self) -> Result<Variable, SyntaxError> {
        if !(self.cur.eat("?") || self.cur.eat("$")) {
            return Err(self.cur.error(format!("expected a variable, found {}", self.cur.describe())));
        }
        let name = self.cur.take_while(is_name_char);
        if name.is_empty() {
            return Err(self.cur.error("empty variable name"));
        }
        Ok(Variable::new(name))
    }

    /// A braced group with its pending filters applied.
    fn group(&mut self) -> Result<Pattern, SyntaxError> {
        let (p, filters) = self.group_raw()?;
        Ok(match and_all(filters) {
            Some(f) => Pattern::Filter(Box::new(p), f),
            None => p,
        })
    }

    fn group_raw(&mut self) -> Result<(Pattern, Vec<Filter>), SyntaxError> {
        self.ws();
        let open = self.cur.pos();
        self.cur.expect("{")?;
        self.ws();
        if self.cur.peek_keyword("SELECT") {
            let (_, sub) = self.select()?;
            self.ws();
            self.cur.expect("}")?;
            return Ok((sub, Vec::new()));
        }
        let mut current: Option<Pattern> = None;
        let mut bap: Vec<TriplePattern> = Vec::new();
        let mut pending: Vec<Filter> = Vec::new();
        loop {
            self.ws();
            if self.cur.eat("}") {
                break;
            }
            if self.cur.at_end() {
                return Err(self.cur.error("unterminated group, expected `}`"));
            }
            if self.cur.eat(".") {
                continue;
            }
            if self.cur.eat_keyword("OPTIONAL") {
                flush(&mut current, &mut bap);
                let (right, filters) = self.group_raw()?;
                current = Some(Pattern::Optional {
                    left: Box::new(current.take().unwrap_or(Pattern::Bap(Vec::new()))),
                    right: Box::new(right),
                    condition: and_all(filters),
                });
            } else if self.cur.eat_keyword("FILTER") {
                self.ws();
                pending.push(self.filter_clause()?);
            } else if self.cur.eat_keyword("ASSIGN") {
                let base = self.barrier(&mut current, &mut bap, &mut pending);
                self.ws();
                let expr = self.expr()?;
                self.ws();
                if !self.cur.eat_keyword("AS") {
                    return Err(self.cur.error("expected AS"));
                }
                self.ws();
                let target = self.variable()?;
                current = Some(Pattern::Assign {
                    pattern: Box::new(base),
                    expr,
                    target,
                });
            } else if self.peek_group_by() {
                let base = self.barrier(&mut current, &mut bap, &mut pending);
                current = Some(self.group_by(base)?);
            } else if self.cur.peek_keyword("ORDERBY") || self.cur.peek_keyword("ORDER") {
                let base = self.barrier(&mut current, &mut bap, &mut pending);
                let keys = self.order_keys()?.ok_or_else(|| self.cur.error("expected ORDERBY"))?;
                current = Some(Pattern::OrderBy(Box::new(base), keys));
            } else if self.cur.eat_keyword("LIMIT") {
                let base = self.barrier(&mut current, &mut bap, &mut pending);
                let n = self.count()?;
                current = Some(Pattern::Limit(Box::new(base), n));
            } else if self.cur.peek() == Some('{') {
                flush(&mut current, &mut bap);
                let mut p = self.group()?;
                loop {
                    self.ws();
                    if !self.cur.eat_keyword("UNION") {
                        break;
                    }
                    let rhs = self.group()?;
                    p = Pattern::Union(Box::new(p), Box::new(rhs));
                }
                current = Some(and(current.take(), p));
            } else {
                bap.push(self.triple_pattern()?);
            }
        }
        flush(&mut current, &mut bap);
        match current {
            Some(p) => Ok((p, pending)),
            None => Err(self.cur.error_at(open, "empty group pattern")),
        }
    }

    fn peek_group_by(&mut self) -> bool {
        if self.cur.peek_keyword("GROUPBY") {
            return true;
        }
        let save = self.cur.pos();
        let found = self.cur.eat_keyword("GROUP") && {
            self.ws();
            self.cur.peek_keyword("BY")
        };
        self.cur.reset(save);
        found
    }

    /// Closes the stretch before a solution modifier: flushes pending
    /// triples and applies deferred filters.
    fn barrier(
        &mut self,
        current: &mut Option<Pattern>,
        bap: &mut Vec<TriplePattern>,
        pending: &mut Vec<Filter>,
    ) -> Pattern {
        flush(current, bap);
        let base = current.take().unwrap_or(Pattern::Bap(Vec::new()));
        match and_all(std::mem::take(pending)) {
            Some(f) => Pattern::Filter(Box::new(base), f),
            None => base,
        }
    }

    fn group_by(&mut self, base: Pattern) -> Result<Pattern, SyntaxError> {
        let at = self.cur.pos();
        if !self.cur.eat_keyword("GROUPBY") {
            self.cur.eat_keyword("GROUP");
            self.ws();
            self.cur.eat_keyword("BY");
        }
        self.ws();
        self.cur.expect("(")?;
        let mut keys = Vec::new();
        loop {
            self.ws();
            if self.cur.eat(")") {
                break;
            }
            keys.push(self.variable()?);
        }
        let mut aggregates = Vec::new();
        loop {
            self.ws();
            let save = self.cur.pos();
            let name = if self.cur.eat("⊕") {
                "JOIN"
            } else if self.cur.eat("⊗") {
                "MEET"
            } else {
                self.cur.take_while(is_name_char)
            };
            let function = AggregateFn::from_name(name);
            self.ws();
            let Some(function) = function.filter(|_| self.cur.peek() == Some('(')) else {
                self.cur.reset(save);
                break;
            };
            self.cur.expect("(")?;
            self.ws();
            let argument = if self.cur.eat("*") {
                Expr::Const(Value::Number(crate::domain::Rational::from_integer(1.into())))
            } else {
                self.expr()?
            };
            self.ws();
            self.cur.expect(")")?;
            self.ws();
            if !self.cur.eat_keyword("AS") {
                return Err(self.cur.error("expected AS after aggregate"));
            }
            self.ws();
            let target = self.variable()?;
            aggregates.push(Aggregate {
                function,
                argument,
                target,
            });
        }
        let inner = base.variables();
        for agg in &aggregates {
            if inner.contains(&agg.target) {
                return Err(self.cur.error_at(
                    at,
                    format!("aggregate target {} already occurs in the pattern", agg.target),
                ));
            }
            if let Some(v) = agg.argument.variables().into_iter().find(|v| keys.contains(v)) {
                return Err(self.cur.error_at(
                    at,
                    format!("grouping variable {v} is used in an aggregate"),
                ));
            }
        }
        Ok(Pattern::GroupBy {
            pattern: Box::new(base),
            keys,
            aggregates,
        })
    }

    fn triple_pattern(&mut self) -> Result<TriplePattern, SyntaxError> {
        let parenthesized = self.cur.eat("(");
        let mut slots = Vec::with_capacity(3);
        for _ in 0..3 {
            self.ws();
            slots.push(self.slot()?);
        }
        let mut label = None;
        if parenthesized {
            self.ws();
            self.cur.expect(")")?;
            let save = self.cur.pos();
            self.ws();
            if self.cur.eat(":") {
                self.ws();
                label = Some(self.label()?);
            } else {
                self.cur.reset(save);
            }
        }
        let label = match label {
            Some(l) => l,
            None => self.default_label(),
        };
        let object = slots.pop().expect("three slots");
        let predicate = slots.pop().expect("three slots");
        let subject = slots.pop().expect("three slots");
        Ok(TriplePattern {
            subject,
            predicate,
            object,
            label,
        })
    }

    fn default_label(&mut self) -> Label {
        match self.rewrite {
            DefaultRewrite::SharedVar => Label::Var(Variable::new("#ann")),
            DefaultRewrite::FreshVars => {
                self.fresh += 1;
                Label::Var(Variable::new(&format!("#ann{}", self.fresh)))
            }
            DefaultRewrite::Top => Label::Const(self.domain.top()),
        }
    }

    fn label(&mut self) -> Result<Label, SyntaxError> {
        if matches!(self.cur.peek(), Some('?' | '$')) {
            let v = self.variable()?;
            self.label_vars.insert(v.clone());
            Ok(Label::Var(v))
        } else {
            Ok(Label::Const(parse_annotation(self.domain, &mut self.cur)?))
        }
    }

    fn slot(&mut self) -> Result<TermPattern, SyntaxError> {
        match self.cur.peek() {
            Some('?' | '$') => {
                let v = self.variable()?;
                self.term_vars.insert(v.clone());
                Ok(TermPattern::Var(v))
            }
            // Blank nodes in queries act as undistinguished variables.
            Some('_') if self.cur.peek_nth(1) == Some(':') => {
                self.cur.eat("_:");
                let label = self.cur.take_while(is_name_char);
                let v = Variable::new(&format!("#b{label}"));
                self.term_vars.insert(v.clone());
                Ok(TermPattern::Var(v))
            }
            _ => parse_term(&mut self.cur, &self.prefixes, "query").map(TermPattern::Term),
        }
    }

    fn filter_clause(&mut self) -> Result<Filter, SyntaxError> {
        if self.cur.eat("(") {
            let f = self.or()?;
            self.ws();
            self.cur.expect(")")?;
            Ok(f)
        } else if self.cur.eat("{") {
            let f = self.or()?;
            self.ws();
            self.cur.expect("}")?;
            Ok(f)
        } else {
            self.primary_filter()
        }
    }

    fn or(&mut self) -> Result<Filter, SyntaxError> {
        let mut f = self.and()?;
        loop {
            self.ws();
            if self.cur.eat("||") || self.cur.eat_keyword("OR") {
                let rhs = self.and()?;
                f = Filter::Or(Box::new(f), Box::new(rhs));
            } else {
                return Ok(f);
            }
        }
    }

    fn and(&mut self) -> Result<Filter, SyntaxError> {
        let mut f = self.unary()?;
        loop {
            self.ws();
            if self.cur.eat("&&") || self.cur.eat_keyword("AND") {
                let rhs = self.unary()?;
                f = Filter::And(Box::new(f), Box::new(rhs));
            } else {
                return Ok(f);
            }
        }
    }

    fn unary(&mut self) -> Result<Filter, SyntaxError> {
        self.ws();
        if self.cur.rest().starts_with("!=") {
            return Err(self.cur.error("unexpected `!=`"));
        }
        if self.cur.eat("!") || self.cur.eat("¬") || self.cur.eat_keyword("NOT") {
            return Ok(Filter::Not(Box::new(self.unary()?)));
        }
        self.primary_filter()
    }

    fn primary_filter(&mut self) -> Result<Filter, SyntaxError> {
        self.ws();
        if self.cur.eat("(") {
            let f = self.or()?;
            self.ws();
            self.cur.expect(")")?;
            return Ok(f);
        }
        let probes: [(&str, FilterCtor); 5] = [
            ("isBLANK", Filter::IsBlank),
            ("isIRI", Filter::IsIri),
            ("isURI", Filter::IsIri),
            ("isLITERAL", Filter::IsLiteral),
            ("BOUND", |_| unreachable!("handled separately")),
        ];
        for (kw, make) in probes {
            if !self.cur.peek_keyword(kw) {
                continue;
            }
            self.cur.eat_keyword(kw);
            self.ws();
            self.cur.expect("(")?;
            self.ws();
            let f = if kw == "BOUND" {
                Filter::Bound(self.variable()?)
            } else {
                make(self.expr()?)
            };
            self.ws();
            self.cur.expect(")")?;
            return Ok(f);
        }
        let at = self.cur.pos();
        let lhs = self.expr()?;
        self.ws();
        if self.cur.eat("!=") {
            self.ws();
            let rhs = self.expr()?;
            return Ok(Filter::Not(Box::new(Filter::Eq(lhs, rhs))));
        }
        if self.cur.eat("=") {
            self.ws();
            return Ok(Filter::Eq(lhs, self.expr()?));
        }
        if self.cur.eat("⪯") || self.cur.eat("≼") || self.cur.eat("<=") {
            self.ws();
            return Ok(Filter::Leq(lhs, self.expr()?));
        }
        match lhs {
            Expr::Call(b, args) => Ok(Filter::Call(b, args)),
            _ => Err(self.cur.error_at(at, "expected a condition")),
        }
    }

    /// Join-level expression: `a ∨ b`, `a \/ b` or `a v b`.
    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.meet_expr()?;
        loop {
            self.ws();
            if self.cur.eat("∨") || self.cur.eat("\\/") || self.cur.eat("⊕") || self.cur.eat_keyword("v") {
                let rhs = self.meet_expr()?;
                e = Expr::Call(Builtin::Join, vec![e, rhs]);
            } else {
                return Ok(e);
            }
        }
    }

    fn meet_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.atom()?;
        loop {
            self.ws();
            if self.cur.eat("∧") || self.cur.eat("/\\") || self.cur.eat("⊗") || self.cur.eat("^") {
                let rhs = self.atom()?;
                e = Expr::Call(Builtin::Meet, vec![e, rhs]);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        self.ws();
        match self.cur.peek() {
            Some('?' | '$') => Ok(Expr::Var(self.variable()?)),
            Some('(') => {
                self.cur.bump();
                let e = self.expr()?;
                self.ws();
                self.cur.expect(")")?;
                Ok(e)
            }
            Some('{' | '[') => Ok(Expr::Const(Value::Annotation(parse_annotation(
                self.domain,
                &mut self.cur,
            )?))),
            Some(c) if c.is_ascii_digit() || ((c == '-' || c == '+') && self.cur.peek_nth(1).is_some_and(|d| d.is_ascii_digit())) => {
                Ok(Expr::Const(Value::Number(parse_number(&mut self.cur)?)))
            }
            Some(c) if is_name_start(c) => {
                let save = self.cur.pos();
                let name = self.cur.take_while(is_name_char);
                if self.cur.peek() == Some('(') {
                    let b = Builtin::from_name(name).ok_or_else(|| {
                        self.cur.error_at(save, format!("unknown built-in `{name}`"))
                    })?;
                    self.cur.bump();
                    let mut args = Vec::new();
                    loop {
                        self.ws();
                        if self.cur.eat(")") {
                            break;
                        }
                        if !args.is_empty() {
                            self.cur.expect(",")?;
                        }
                        args.push(self.expr()?);
                    }
                    if args.len() != b.arity() {
                        return Err(self.cur.error_at(
                            save,
                            format!("{} takes {} argument(s)", b.name(), b.arity()),
                        ));
                    }
                    return Ok(Expr::Call(b, args));
                }
                self.cur.reset(save);
                Ok(Expr::Const(Value::Term(parse_term(&mut self.cur, &self.prefixes, "query")?)))
            }
            _ => {
                let t = parse_term(&mut self.cur, &self.prefixes, "query")?;
                Ok(Expr::Const(Value::Term(t)))
            }
        }
    }
}

fn flush(current: &mut Option<Pattern>, bap: &mut Vec<TriplePattern>) {
    if !bap.is_empty() {
        let p = Pattern::Bap(std::mem::take(bap));
        *current = Some(and(current.take(), p));
    }
}
