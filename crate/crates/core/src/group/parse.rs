//! Descriptor grammar (`finite:<name>`, `cayley@<file>`, `zp:<p>`, `qp:<p>`,
//! `z`, `shift:<p>`, `prod(...)`) and group-directed element literals.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::finite::FiniteGroup;
use super::{GElem, Group, GroupKind, GroupModel};
use crate::error::{Error, Result};

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::Usage(format!("{p} is not prime")));
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return Err(Error::Usage(format!("{p} is not prime")));
        }
        d += 1;
    }
    Ok(())
}

fn parse_prime(s: &str, what: &str) -> Result<u32> {
    let p: u32 = s
        .parse()
        .map_err(|_| Error::Usage(format!("bad prime in {what}: '{s}'")))?;
    check_prime(p)?;
    Ok(p)
}

/// Split `prod(a,b,...)` bodies on top-level commas.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

pub(crate) fn parse_descriptor(src: &str) -> Result<Group> {
    let s = src.trim();
    if s == "z" {
        return Ok(GroupModel::z_discrete());
    }
    if let Some(rest) = s.strip_prefix("zp:") {
        return GroupModel::zp(parse_prime(rest, "zp")?);
    }
    if let Some(rest) = s.strip_prefix("qp:") {
        return GroupModel::qp(parse_prime(rest, "qp")?);
    }
    if let Some(rest) = s.strip_prefix("shift:") {
        return GroupModel::shift(parse_prime(rest, "shift")?);
    }
    if let Some(rest) = s.strip_prefix("prod(") {
        let body = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Usage(format!("unterminated prod(...) in '{s}'")))?;
        let factors = split_top_level(body)
            .into_iter()
            .map(parse_descriptor)
            .collect::<Result<Vec<_>>>()?;
        return GroupModel::product(factors);
    }
    let (base, dual) = match s.strip_suffix("@dual") {
        Some(b) => (b, true),
        None => (s, false),
    };
    let mut fin = if let Some(rest) = base.strip_prefix("finite:") {
        if let Some(path) = rest.strip_prefix("cayley@") {
            FiniteGroup::from_cayley_file(path)?
        } else {
            FiniteGroup::builtin(rest)?
        }
    } else if let Some(path) = base.strip_prefix("cayley@") {
        FiniteGroup::from_cayley_file(path)?
    } else {
        return Err(Error::Usage(format!(
            "unknown group descriptor '{src}' (expected finite:<name>, cayley@<file>, zp:<p>, qp:<p>, z, shift:<p>, prod(...))"
        )));
    };
    fin.unit_is_whole = dual;
    Ok(GroupModel::finite(fin))
}

fn parse_rat_literal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Element(format!("bad rational literal '{s}'")))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Element(format!("bad rational literal '{s}'")))?,
        None => BigInt::from(1),
    };
    if d == BigInt::from(0) {
        return Err(Error::Element(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(n, d))
}

fn strip_parens(s: &str) -> Result<&str> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Element(format!("expected a parenthesized tuple, got '{s}'")))?;
    Ok(inner)
}

pub(crate) fn parse_elem(g: &GroupModel, src: &str) -> Result<GElem> {
    let s = src.trim();
    match &g.kind {
        GroupKind::Finite(_) => g.elem_finite(s),
        GroupKind::Zp(_) | GroupKind::Qp(_) => g.elem_rat(parse_rat_literal(s)?),
        GroupKind::ZDiscrete => {
            let n: BigInt = s
                .parse()
                .map_err(|_| Error::Element(format!("bad integer literal '{s}'")))?;
            Ok(GElem(super::Coord::Int(n)))
        }
        GroupKind::Shift(_) => {
            let inner = strip_parens(s)?;
            let parts = split_top_level(inner);
            if parts.len() != 2 {
                return Err(Error::Element(format!("shift element needs (k, b), got '{s}'")));
            }
            let k: i64 = parts[0]
                .trim()
                .parse()
                .map_err(|_| Error::Element(format!("bad shift exponent '{}'", parts[0])))?;
            g.elem_shift(k, parse_rat_literal(parts[1])?)
        }
        GroupKind::Product(fs) => {
            let inner = strip_parens(s)?;
            let parts = split_top_level(inner);
            if parts.len() != fs.len() {
                return Err(Error::Element(format!(
                    "tuple arity {} does not match product of {} factors",
                    parts.len(),
                    fs.len()
                )));
            }
            let comps = fs
                .iter()
                .zip(parts)
                .map(|(f, p)| parse_elem(f, p))
                .collect::<Result<Vec<_>>>()?;
            g.elem_tuple(comps)
        }
    }
}
