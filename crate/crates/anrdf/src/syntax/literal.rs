//! Annotation literals, parsed according to the domain they belong to.

use super::cursor::{is_name_char, is_name_start, is_number_char, Cursor};
use super::SyntaxError;
use crate::domain::rational::parse_rational;
use crate::domain::{
    Annotation, Degree, Domain, Interval, Provenance, Rational, TemporalValue, TimePoint,
};

/// Parses a complete literal; surrounding whitespace is allowed.
pub fn parse_annotation_str(domain: &Domain, text: &str) -> Result<Annotation, SyntaxError> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let value = parse_annotation(domain, &mut cur)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error(format!("unexpected {} after annotation", cur.describe())));
    }
    Ok(value)
}

pub fn parse_annotation(domain: &Domain, cur: &mut Cursor) -> Result<Annotation, SyntaxError> {
    match domain {
        Domain::Boolean => {
            if cur.eat_keyword("true") {
                Ok(Annotation::Boolean(true))
            } else if cur.eat_keyword("false") {
                Ok(Annotation::Boolean(false))
            } else {
                Err(cur.error(format!("expected `true` or `false`, found {}", cur.describe())))
            }
        }
        Domain::Fuzzy(_) => {
            let start = cur.pos();
            let value = parse_number(cur)?;
            Degree::new(value)
                .map(Annotation::Fuzzy)
                .map_err(|e| cur.error_at(start, e.to_string()))
        }
        Domain::Temporal => parse_temporal(cur).map(Annotation::Temporal),
        Domain::Provenance => parse_provenance(cur).map(Annotation::Provenance),
        Domain::Compound(c) => {
            cur.expect("{")?;
            cur.skip_ws();
            let mut pairs = Vec::new();
            if !cur.eat("}") {
                loop {
                    cur.expect("<")?;
                    cur.skip_ws();
                    let x = parse_annotation(&c.first, cur)?;
                    cur.skip_ws();
                    cur.expect(",")?;
                    cur.skip_ws();
                    let y = parse_annotation(&c.second, cur)?;
                    cur.skip_ws();
                    cur.expect(">")?;
                    pairs.push((x, y));
                    cur.skip_ws();
                    if cur.eat("}") {
                        break;
                    }
                    cur.expect(",")?;
                    cur.skip_ws();
                }
            }
            Ok(Annotation::Compound(c.normalise(&pairs)))
        }
    }
}

pub fn parse_number(cur: &mut Cursor) -> Result<Rational, SyntaxError> {
    let start = cur.pos();
    let token = cur.take_while(is_number_char);
    parse_rational(token).ok_or_else(|| {
        cur.reset(start);
        cur.error(format!("expected a number, found {}", cur.describe()))
    })
}

fn parse_time_point(cur: &mut Cursor) -> Result<TimePoint, SyntaxError> {
    if cur.eat("-inf") {
        Ok(TimePoint::NegInf)
    } else if cur.eat("+inf") || cur.eat("inf") {
        Ok(TimePoint::PosInf)
    } else {
        parse_number(cur).map(TimePoint::At)
    }
}

/// `[a,b]`, or the point shorthand `[a]`.
fn parse_interval(cur: &mut Cursor) -> Result<Interval, SyntaxError> {
    let start = cur.pos();
    cur.expect("[")?;
    cur.skip_ws();
    let lo = parse_time_point(cur)?;
    cur.skip_ws();
    let hi = if cur.eat(",") {
        cur.skip_ws();
        let hi = parse_time_point(cur)?;
        cur.skip_ws();
        hi
    } else {
        lo.clone()
    };
    cur.expect("]")?;
    Interval::new(lo, hi).map_err(|e| cur.error_at(start, e.to_string()))
}

/// `{[a,b],...}`, a single interval, or a bare time point.
fn parse_temporal(cur: &mut Cursor) -> Result<TemporalValue, SyntaxError> {
    match cur.peek() {
        Some('{') => {
            cur.bump();
            cur.skip_ws();
            let mut intervals = Vec::new();
            if !cur.eat("}") {
                loop {
                    intervals.push(parse_interval(cur)?);
                    cur.skip_ws();
                    if cur.eat("}") {
                        break;
                    }
                    cur.expect(",")?;
                    cur.skip_ws();
                }
            }
            Ok(TemporalValue::from_intervals(intervals))
        }
        Some('[') => Ok(TemporalValue::interval(parse_interval(cur)?)),
        _ => {
            let start = cur.pos();
            let point = parse_time_point(cur)?;
            Interval::new(point.clone(), point)
                .map(TemporalValue::interval)
                .map_err(|e| cur.error_at(start, e.to_string()))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Connective {
    And,
    Or,
}

fn parse_connective(cur: &mut Cursor) -> Option<Connective> {
    if cur.eat("^") || cur.eat("∧") {
        Some(Connective::And)
    } else if cur.eat("∨") || cur.eat_keyword("v") {
        Some(Connective::Or)
    } else {
        None
    }
}

fn parse_provenance(cur: &mut Cursor) -> Result<Provenance, SyntaxError> {
    match cur.peek() {
        Some('(') => {
            cur.bump();
            cur.skip_ws();
            let mut value = parse_provenance(cur)?;
            let mut op: Option<Connective> = None;
            loop {
                cur.skip_ws();
                if cur.eat(")") {
                    return Ok(value);
                }
                let at = cur.pos();
                let next = parse_connective(cur)
                    .ok_or_else(|| cur.error(format!("expected `^`, `v` or `)`, found {}", cur.describe())))?;
                if op.is_some_and(|o| o != next) {
                    return Err(cur.error_at(at, "mixed `^` and `v` need parentheses"));
                }
                op = Some(next);
                cur.skip_ws();
                let rhs = parse_provenance(cur)?;
                value = match next {
                    Connective::And => value.and(&rhs),
                    Connective::Or => value.or(&rhs),
                };
            }
        }
        Some('<') => {
            cur.bump();
            let name = cur.take_while(|c| c != '>');
            cur.expect(">")?;
            Ok(Provenance::atom(name))
        }
        Some(c) if is_name_start(c) => {
            let start = cur.pos();
            let name = cur.take_while(is_name_char);
            match name {
                "true" => Ok(Provenance::verum()),
                "false" => Ok(Provenance::falsum()),
                "v" => Err(cur.error_at(start, "`v` is reserved; write <v> for an atom named v")),
                _ => Ok(Provenance::atom(name)),
            }
        }
        _ => Err(cur.error(format!("expected a provenance formula, found {}", cur.describe()))),
    }
}
