//! Function syntax shared by the CLI and the JSON formats.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := (scalar-factor '*')* atom ('*' scalar-factor)*
//! atom   := 'chi' '(' element ',' 'level' '=' int ')'
//!         | 'conj' '(' expr ')'
//! ```
//!
//! with scalars in the scalar grammar (`1/2 + 3*z8^3` — parenthesize sums
//! used as coefficients) and elements in the owning group's literal
//! grammar. Every printed function re-parses to an equal value.

use num_traits::Signed;
use serde_json::{json, Value};

use crate::convalg::ConvElement;
use crate::error::{Error, Result};
use crate::group::{Group, GroupModel};
use crate::scalar::{self, CycScalar};
use crate::schwartz::BSFunction;

pub fn parse_function(src: &str, group: &Group) -> Result<BSFunction> {
    let mut cur = scalar::Cursor::new(src);
    let f = expr(&mut cur, group)?;
    if !cur.at_end() {
        return Err(cur.err("trailing input after function"));
    }
    Ok(f)
}

/// Accepts either a plain function literal or the `L[...]` wrapper marking
/// a convolution-algebra element.
pub fn parse_conv(src: &str, group: &Group) -> Result<ConvElement> {
    let trimmed = src.trim();
    let inner = match trimmed.strip_prefix("L[") {
        Some(rest) => rest
            .strip_suffix(']')
            .ok_or_else(|| Error::Syntax { pos: trimmed.len(), msg: "unterminated L[...]".into() })?,
        None => trimmed,
    };
    Ok(ConvElement::from_symbol(parse_function(inner, group)?))
}

fn expr(cur: &mut scalar::Cursor, group: &Group) -> Result<BSFunction> {
    let mut acc = term(cur, group)?;
    loop {
        if cur.eat(b'+') {
            acc = acc.add(&term(cur, group)?)?;
        } else if cur.eat(b'-') {
            acc = acc.sub(&term(cur, group)?)?;
        } else {
            return Ok(acc);
        }
    }
}

fn term(cur: &mut scalar::Cursor, group: &Group) -> Result<BSFunction> {
    let mut coeff = CycScalar::one();
    let mut func: Option<BSFunction> = None;
    loop {
        if cur.eat_kw("chi") {
            if func.is_some() {
                return Err(cur.err("at most one chi(...) factor per term"));
            }
            func = Some(chi_atom(cur, group)?);
        } else if cur.eat_kw("conj") {
            if func.is_some() {
                return Err(cur.err("at most one function factor per term"));
            }
            cur.expect(b'(')?;
            let inner = expr(cur, group)?;
            cur.expect(b')')?;
            func = Some(inner.star());
        } else {
            coeff = coeff.mul(&scalar::scalar_factor(cur)?)?;
        }
        if !cur.eat(b'*') {
            break;
        }
    }
    match func {
        Some(f) => f.scale(&coeff),
        None => Err(cur.err("expected chi(...) in this term")),
    }
}

fn chi_atom(cur: &mut scalar::Cursor, group: &Group) -> Result<BSFunction> {
    cur.expect(b'(')?;
    let lit = cur.take_balanced_until_comma()?;
    cur.expect(b',')?;
    if !cur.eat_kw("level") {
        return Err(cur.err("expected level=<n>"));
    }
    cur.expect(b'=')?;
    let level = cur.signed_int()?;
    cur.expect(b')')?;
    let level = i32::try_from(level).map_err(|_| Error::LevelRange {
        level,
        group: group.descriptor().to_string(),
    })?;
    let elem = group.parse_elem(&lit)?;
    BSFunction::indicator(group, &elem, level)
}

/// Canonical text form: terms sorted by canonical representative, each as
/// `coeff*chi(elem, level=n)` at the function's canonical level.
pub fn print_function(f: &BSFunction) -> String {
    if f.is_zero() {
        return format!("0*chi({}, level={})", f.group().format_elem(&f.group().identity()), f.level());
    }
    let group = f.group();
    let mut out = String::new();
    let mut first = true;
    for (k, c) in f.terms() {
        let atom = format!("chi({}, level={})", group.format_elem(k), f.level());
        let (neg, mag) = match c.as_rational() {
            Some(r) if r.is_negative() => (true, CycScalar::from_rational(-r)),
            _ => (false, c.clone()),
        };
        if first {
            if neg {
                out.push('-');
            }
            first = false;
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if mag.is_one() {
            out.push_str(&atom);
        } else {
            out.push_str(&format!("{}*{}", scalar::coeff_string(&mag), atom));
        }
    }
    out
}

pub fn print_conv(a: &ConvElement) -> String {
    format!("L[{}]", print_function(a.symbol()))
}

// ---- JSON ------------------------------------------------------------------

/// `{"group": <descriptor>, "level": n, "terms": [{"rep": ..., "coeff": ...}]}`
pub fn function_to_json(f: &BSFunction) -> Value {
    let group = f.group();
    let terms: Vec<Value> = f
        .terms()
        .map(|(k, c)| json!({"rep": group.format_elem(k), "coeff": c.to_string()}))
        .collect();
    json!({
        "group": group.descriptor(),
        "level": f.level(),
        "terms": terms,
    })
}

pub fn function_from_json(v: &Value) -> Result<BSFunction> {
    let group_desc = v
        .get("group")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Validation("function JSON needs a \"group\" descriptor".into()))?;
    let group = GroupModel::parse(group_desc)?;
    function_from_json_in(v, &group)
}

/// Parse against an already-resolved group (must match the descriptor).
pub fn function_from_json_in(v: &Value, group: &Group) -> Result<BSFunction> {
    if let Some(d) = v.get("group").and_then(Value::as_str) {
        if d != group.descriptor() {
            return Err(Error::MixedGroups(d.to_string(), group.descriptor().to_string()));
        }
    }
    let level = v
        .get("level")
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Validation("function JSON needs an integer \"level\"".into()))?;
    let level = i32::try_from(level)
        .map_err(|_| Error::LevelRange { level, group: group.descriptor().to_string() })?;
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Validation("function JSON needs a \"terms\" array".into()))?;
    let mut entries = Vec::with_capacity(terms.len());
    for t in terms {
        let rep = t
            .get("rep")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Validation("term needs a \"rep\" literal".into()))?;
        let coeff = t
            .get("coeff")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Validation("term needs a \"coeff\" literal".into()))?;
        entries.push((group.parse_elem(rep)?, scalar::parse_scalar(coeff)?));
    }
    BSFunction::from_terms(group, level, entries)
}

/// `{"dual": true, "symbol": <function JSON>}`
pub fn conv_to_json(a: &ConvElement) -> Value {
    json!({"dual": true, "symbol": function_to_json(a.symbol())})
}

pub fn conv_from_json(v: &Value) -> Result<ConvElement> {
    if v.get("dual").and_then(Value::as_bool) != Some(true) {
        return Err(Error::Validation("expected {\"dual\": true, \"symbol\": ...}".into()));
    }
    let sym = v
        .get("symbol")
        .ok_or_else(|| Error::Validation("dual element JSON needs a \"symbol\"".into()))?;
    Ok(ConvElement::from_symbol(function_from_json(sym)?))
}
