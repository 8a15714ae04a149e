//! Exact Pontryagin duality for the self-dual abelian instances.
//!
//! Supported groups: `qp:<p>` (self-dual under the standard character, with
//! the self-dual Haar normalization mu(Z_p) = 1 on both sides), labelled
//! finite cyclic groups `finite:z<m>` (the dual flips the measure
//! normalization so that inversion and the Plancherel identity hold with no
//! irrational factors), and finite products of supported groups.
//!
//! `zp:<p>` and `z` are abelian but their duals (a Pruefer group, the
//! circle) are not representable in the group model, so the transform
//! refuses them; `shift:<p>` and non-abelian finite groups are refused for
//! non-commutativity. Finite abelian groups without a cyclic decomposition
//! in the descriptor (Cayley tables) are refused as well: the pairing data
//! is part of the descriptor, not inferred.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{Coord, GElem, Group, GroupKind, GroupModel, Level, Side};
use crate::scalar::CycScalar;
use crate::schwartz::BSFunction;

/// The Pontryagin dual as a group model, when representable.
pub fn dual_group(group: &Group) -> Result<Group> {
    match &group.kind {
        GroupKind::Qp(_) => Ok(group.clone()),
        GroupKind::Finite(f) => {
            if f.cyclic.is_none() {
                if f.abelian {
                    return Err(Error::Unsupported(format!(
                        "finite group {} carries no cyclic decomposition in its descriptor",
                        group.descriptor()
                    )));
                }
                return Err(Error::Unsupported(format!("group {} is not abelian", group.descriptor())));
            }
            let mut dual = f.clone();
            dual.unit_is_whole = !dual.unit_is_whole;
            Ok(GroupModel::finite(dual))
        }
        GroupKind::Product(fs) => {
            let duals = fs.iter().map(dual_group).collect::<Result<Vec<_>>>()?;
            GroupModel::product(duals)
        }
        GroupKind::Zp(p) => Err(Error::Unsupported(format!(
            "the dual of zp:{p} is a discrete Pruefer group, not representable here"
        ))),
        GroupKind::ZDiscrete => Err(Error::Unsupported(
            "the dual of discrete Z is the circle, which has no compact open subgroups".into(),
        )),
        GroupKind::Shift(p) => Err(Error::Unsupported(format!("shift:{p} is not abelian"))),
    }
}

fn frac_part(t: &BigRational) -> BigRational {
    t - t.floor()
}

/// zeta^{frac(xi * x)} for the standard character of Q_p; exact root of
/// unity with conductor a p-power.
fn qp_pairing(p: u32, xi: &BigRational, x: &BigRational) -> Result<CycScalar> {
    let frac = frac_part(&(xi * x));
    if frac.is_zero() {
        return Ok(CycScalar::one());
    }
    let denom = frac.denom();
    let numer = frac.numer();
    debug_assert!(!numer.is_negative());
    let d: u64 = denom
        .try_into()
        .map_err(|_| Error::ConductorCap { requested: u64::MAX, cap: crate::scalar::max_conductor() as u64 })?;
    let m: i64 = (numer.mod_floor(denom))
        .try_into()
        .map_err(|_| Error::Overflow("character exponent".into()))?;
    let d32 = u32::try_from(d)
        .map_err(|_| Error::ConductorCap { requested: d, cap: crate::scalar::max_conductor() as u64 })?;
    let _ = p;
    CycScalar::root_of_unity(d32, m)
}

fn pairing_coord(primal: &GroupModel, xi: &Coord, x: &Coord) -> Result<CycScalar> {
    match (&primal.kind, xi, x) {
        (GroupKind::Qp(p) | GroupKind::Zp(p), Coord::Rat(a), Coord::Rat(b)) => qp_pairing(*p, a, b),
        (GroupKind::Finite(f), Coord::Fin(i), Coord::Fin(j)) => {
            let m = f
                .cyclic
                .ok_or_else(|| Error::Unsupported(format!("no character pairing for {}", f.name)))?;
            CycScalar::root_of_unity(
                u32::try_from(m).map_err(|_| Error::Overflow("cyclic order".into()))?,
                (*i as i64) * (*j as i64),
            )
        }
        (GroupKind::Product(fs), Coord::Tup(xs), Coord::Tup(ys)) => {
            let mut acc = CycScalar::one();
            for (g, (a, b)) in fs.iter().zip(xs.iter().zip(ys)) {
                acc = acc.mul(&pairing_coord(g, a, b)?)?;
            }
            Ok(acc)
        }
        _ => Err(Error::Unsupported(format!(
            "no character pairing on {}",
            primal.descriptor()
        ))),
    }
}

/// chi_xi(x): the character of the group at dual parameter xi, an exact
/// root of unity, multiplicative in x.
pub fn character_value(group: &Group, xi: &GElem, x: &GElem) -> Result<CycScalar> {
    if !group.is_abelian() {
        return Err(Error::Unsupported(format!("group {} is not abelian", group.descriptor())));
    }
    group.validate_elem(x)?;
    pairing_coord(group, &xi.0, &x.0)
}

/// The annihilator window: H_n^perp on the dual group as
/// (level, representatives), refined finely enough that every character
/// xi -> chi_xi(r) (r a support representative) is constant on the window's
/// cosets.
fn perp_window(
    primal: &GroupModel,
    dual: &Group,
    n: Level,
    support: &[&Coord],
) -> Result<(Level, Vec<GElem>)> {
    let (base, fine) = perp_levels(primal, n, support)?;
    let reps = dual.coset_reps(base, fine)?;
    Ok((fine, reps))
}

/// (base level of H_n^perp in the dual filtration, required fineness).
fn perp_levels(primal: &GroupModel, n: Level, support: &[&Coord]) -> Result<(Level, i32)> {
    match &primal.kind {
        GroupKind::Qp(p) => {
            let base = -n;
            let mut fine = base;
            for c in support {
                if let Coord::Rat(r) = c {
                    if !r.is_zero() {
                        let v = crate::group::padic_val(r, *p).expect("nonzero");
                        fine = fine.max(
                            i32::try_from(-v).map_err(|_| Error::Overflow("valuation".into()))?,
                        );
                    }
                }
            }
            Ok((base, fine))
        }
        GroupKind::Finite(f) => {
            // the dual flips the measure normalization, which shifts its
            // whole-group and point levels by one relative to the primal
            let dual_whole = if f.unit_is_whole { -1 } else { 0 };
            let dual_point = dual_whole + 1;
            let base = if n >= f.point_level() { dual_whole } else { dual_point };
            Ok((base, dual_point))
        }
        GroupKind::Product(fs) => {
            let mut base = Level::MIN;
            let mut fine = Level::MIN;
            for (i, g) in fs.iter().enumerate() {
                let comp: Vec<&Coord> = support
                    .iter()
                    .map(|c| match c {
                        Coord::Tup(cs) => &cs[i],
                        _ => unreachable!("product support must be tuples"),
                    })
                    .collect();
                let (b, f) = perp_levels(g, n, &comp)?;
                base = base.max(b);
                fine = fine.max(f);
            }
            Ok((base, fine))
        }
        _ => Err(Error::Unsupported(format!("no dual filtration for {}", primal.descriptor()))),
    }
}

fn transform(f: &BSFunction, conjugate: bool) -> Result<BSFunction> {
    let primal = f.group().clone();
    let dual = dual_group(&primal)?;
    if f.is_zero() {
        return Ok(BSFunction::zero(&dual));
    }
    let n = f.level();
    let mu = primal.measure(n)?;
    let support: Vec<&Coord> = f.support_reps().map(|r| &r.0).collect();
    let (fine, window) = perp_window(&primal, &dual, n, &support)?;
    let mut terms = Vec::with_capacity(window.len());
    for xi in window {
        let mut acc = CycScalar::zero();
        for (r, c) in f.terms() {
            let mut chi = pairing_coord(&primal, &xi.0, &r.0)?;
            if conjugate {
                chi = chi.conjugate();
            }
            acc = acc.add(&c.mul(&chi)?)?;
        }
        if !acc.is_zero() {
            terms.push((xi, acc.scale(&mu)));
        }
    }
    BSFunction::from_terms(&dual, fine, terms)
}

/// The Fourier transform: f_hat(xi) = integral of f(x) conj(chi_xi(x)) dx,
/// landing on the dual group model. Exact, coset by coset.
pub fn fourier(f: &BSFunction) -> Result<BSFunction> {
    transform(f, true)
}

/// The inverse transform (no conjugation): inverse_fourier(fourier(f)) = f.
pub fn inverse_fourier(g: &BSFunction) -> Result<BSFunction> {
    transform(g, false)
}

/// (||f||^2, ||f_hat||^2, equal?) with ||f||^2 the left Haar integral of
/// f conj(f); the verdict must always be true.
pub fn plancherel_check(f: &BSFunction) -> Result<(CycScalar, CycScalar, bool)> {
    let lhs = f.mul(&f.star())?.integral(Side::Left)?;
    let fh = fourier(f)?;
    let rhs = fh.mul(&fh.star())?.integral(Side::Left)?;
    let ok = lhs == rhs;
    Ok((lhs, rhs, ok))
}
