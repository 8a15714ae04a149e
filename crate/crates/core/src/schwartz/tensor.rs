//! Finite tensor decompositions sum f_i (x) g_i and the coproduct maps.
//!
//! `coproduct_right(f, g)` decomposes the two-variable function
//! f(xy) g(y); `coproduct_left(f, g)` decomposes f(x) g(xy). Both return
//! exact finite lists of pairs, and the Galois inverses undo them. All
//! comparisons are exact: a decomposition equals another iff the sparse
//! difference of their two-variable functions vanishes on the union of the
//! support rectangles, outside which both vanish identically.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{ensure_same_group, GElem, Group, Level, Side};
use crate::scalar::CycScalar;

use super::BSFunction;

/// Which Galois map a decomposition is inverted against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaloisMap {
    /// a (x) b -> Delta(a)(1 (x) b), i.e. f(xy) g(y).
    T1,
    /// a (x) b -> (a (x) 1) Delta(b), i.e. f(x) g(xy).
    T2,
}

#[derive(Clone, Debug)]
pub struct TensorDecomposition {
    group: Group,
    pairs: Vec<(BSFunction, BSFunction)>,
}

impl TensorDecomposition {
    pub fn empty(group: &Group) -> Self {
        TensorDecomposition { group: group.clone(), pairs: Vec::new() }
    }

    pub fn new(group: &Group, pairs: Vec<(BSFunction, BSFunction)>) -> Result<Self> {
        for (a, b) in &pairs {
            ensure_same_group(group, a.group())?;
            ensure_same_group(group, b.group())?;
        }
        let pairs = pairs.into_iter().filter(|(a, b)| !a.is_zero() && !b.is_zero()).collect();
        Ok(TensorDecomposition { group: group.clone(), pairs })
    }

    pub fn singleton(f: &BSFunction, g: &BSFunction) -> Result<Self> {
        Self::new(f.group(), vec![(f.clone(), g.clone())])
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn pairs(&self) -> &[(BSFunction, BSFunction)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn eval(&self, x: &GElem, y: &GElem) -> Result<CycScalar> {
        let mut acc = CycScalar::zero();
        for (f, g) in &self.pairs {
            acc = acc.add(&f.eval(x)?.mul(&g.eval(y)?)?)?;
        }
        Ok(acc)
    }

    /// Exact equality as functions on G x G: accumulate the sparse
    /// difference over the refined support keys; everything off those keys
    /// vanishes on both sides by construction.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        ensure_same_group(&self.group, &other.group)?;
        let mut acc: BTreeMap<(GElem, GElem), CycScalar> = BTreeMap::new();
        let all = self
            .pairs
            .iter()
            .map(|p| (p, false))
            .chain(other.pairs.iter().map(|p| (p, true)));
        let lx = self
            .pairs
            .iter()
            .chain(other.pairs.iter())
            .map(|(f, _)| f.level())
            .max()
            .unwrap_or(0);
        let ly = self
            .pairs
            .iter()
            .chain(other.pairs.iter())
            .map(|(_, g)| g.level())
            .max()
            .unwrap_or(0);
        for ((f, g), negate) in all {
            let fr = f.refine_to(lx)?;
            let gr = g.refine_to(ly)?;
            for (xk, xv) in fr.terms() {
                for (yk, yv) in gr.terms() {
                    let mut v = xv.mul(yv)?;
                    if negate {
                        v = v.neg();
                    }
                    let slot = acc.entry((xk.clone(), yk.clone())).or_insert_with(CycScalar::zero);
                    *slot = slot.add(&v)?;
                }
            }
        }
        Ok(acc.values().all(|v| v.is_zero()))
    }

    /// Exact comparison against a target two-variable function on an
    /// explicit window of cosets, each window given as (level, reps). The
    /// caller must choose the windows so that the target vanishes outside
    /// their rectangle; the legs' supports are merged into the window, so
    /// the pointwise check on the window is a proof, not a sample.
    pub fn equals_fn<F>(
        &self,
        target: F,
        window_x: (Level, &[GElem]),
        window_y: (Level, &[GElem]),
    ) -> Result<bool>
    where
        F: Fn(&GElem, &GElem) -> Result<CycScalar>,
    {
        let (wlx, wx) = window_x;
        let (wly, wy) = window_y;
        let lx = wlx.max(self.pairs.iter().map(|(f, _)| f.level()).max().unwrap_or(wlx));
        let ly = wly.max(self.pairs.iter().map(|(_, g)| g.level()).max().unwrap_or(wly));
        let mut xs: std::collections::BTreeSet<GElem> = std::collections::BTreeSet::new();
        let mut ys: std::collections::BTreeSet<GElem> = std::collections::BTreeSet::new();
        for x in wx {
            xs.extend(refine_coset(&self.group, x, wlx, lx)?);
        }
        for y in wy {
            ys.extend(refine_coset(&self.group, y, wly, ly)?);
        }
        // include the legs' supports: if a leg sticks out of the window the
        // pointwise check must see it
        for (f, g) in &self.pairs {
            xs.extend(f.refined_support(lx)?);
            ys.extend(g.refined_support(ly)?);
        }
        for x in &xs {
            for y in &ys {
                if self.eval(x, y)? != target(x, y)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Expand one coset representative (given at `from`) into canonical
/// representatives at the finer level `to`.
pub(crate) fn refine_coset(group: &Group, rep: &GElem, from: Level, to: Level) -> Result<Vec<GElem>> {
    let mut out = Vec::new();
    for h in group.coset_reps(from, to)? {
        out.push(group.canonical_rep(&group.mul(rep, &h), to)?);
    }
    Ok(out)
}

/// Smallest level m >= g.level such that g is invariant under *left*
/// translation by H_m (that is, H_m <= s H_n s^{-1} for every support
/// coset s H_n of g).
pub(crate) fn left_invariance_level(g: &BSFunction) -> Result<Level> {
    let group = g.group();
    let mut m = g.level();
    for s in g.support_reps() {
        let s_inv = group.inv(s);
        m = m.max(group.conj_level(&s_inv, g.level())?);
    }
    Ok(m)
}

/// Decompose Delta(f)(1 (x) g), i.e. F(x,y) = f(xy) g(y): refine g to the
/// common level m (f is right-H_m-invariant since m >= level(f)) and pair
/// each coset of g with the corresponding right translate of f.
pub fn coproduct_right(f: &BSFunction, g: &BSFunction) -> Result<TensorDecomposition> {
    ensure_same_group(f.group(), g.group())?;
    let group = f.group().clone();
    if f.is_zero() || g.is_zero() {
        return Ok(TensorDecomposition::empty(&group));
    }
    let m = f.level().max(g.level());
    let gr = g.refine_to(m)?;
    let mut pairs = Vec::with_capacity(gr.term_count());
    for (y, d) in gr.terms() {
        let left = f.translate(y, Side::Right)?;
        let right = BSFunction::indicator(&group, y, m)?.scale(d)?;
        pairs.push((left, right));
    }
    TensorDecomposition::new(&group, pairs)
}

/// Decompose (f (x) 1) Delta(g), i.e. F(x,y) = f(x) g(xy): refine f to a
/// level m such that every refined support coset x_j H_m of f satisfies
/// x_j H_m x_j^{-1} <= s H_n s^{-1} for all support cosets of g; then pair
/// each coset of f with the left translate of g by x_j^{-1}.
pub fn coproduct_left(f: &BSFunction, g: &BSFunction) -> Result<TensorDecomposition> {
    ensure_same_group(f.group(), g.group())?;
    let group = f.group().clone();
    if f.is_zero() || g.is_zero() {
        return Ok(TensorDecomposition::empty(&group));
    }
    let g_sup: Vec<GElem> = g.support_reps().cloned().collect();
    let mut m = f.level().max(g.level());
    let fr = loop {
        let fr = f.refine_to(m)?;
        let mut need = m;
        for (x, _) in fr.terms() {
            for s in &g_sup {
                let z = group.mul(&group.inv(s), x);
                need = need.max(group.conj_level(&z, g.level())?);
            }
        }
        if need == m {
            break fr;
        }
        m = need;
    };
    let mut pairs = Vec::with_capacity(fr.term_count());
    for (x, c) in fr.terms() {
        let left = BSFunction::indicator(&group, x, m)?.scale(c)?;
        let right = g.translate(&group.inv(x), Side::Left)?;
        pairs.push((left, right));
    }
    TensorDecomposition::new(&group, pairs)
}

/// Invert a Galois map on a decomposition in its image. T1 sends the
/// decomposition of f(xy) g(y) back to one of f(x) g(y); T2 does the same
/// for f(x) g(xy). Round trips are exact identities of functions.
pub fn galois_inverse(t: &TensorDecomposition, which: GaloisMap) -> Result<TensorDecomposition> {
    let group = t.group().clone();
    let mut pairs = Vec::new();
    for (f, g) in t.pairs() {
        match which {
            GaloisMap::T1 => {
                // target: F(x y^{-1}, y); decompose g fine enough that f is
                // right-invariant under y_k H_m y_k^{-1}
                let mut m = f.level().max(g.level());
                let gr = loop {
                    let gr = g.refine_to(m)?;
                    let mut need = m;
                    for (y, _) in gr.terms() {
                        need = need.max(group.conj_level(y, f.level())?);
                    }
                    if need == m {
                        break gr;
                    }
                    m = need;
                };
                for (y, d) in gr.terms() {
                    let left = f.translate(&group.inv(y), Side::Right)?;
                    let right = BSFunction::indicator(&group, y, m)?.scale(d)?;
                    pairs.push((left, right));
                }
            }
            GaloisMap::T2 => {
                // target: F(x, x^{-1} y); decompose f fine enough that g is
                // left-H_m-invariant
                let m = f.level().max(left_invariance_level(g)?);
                let fr = f.refine_to(m)?;
                for (x, c) in fr.terms() {
                    let left = BSFunction::indicator(&group, x, m)?.scale(c)?;
                    let right = g.translate(x, Side::Left)?;
                    pairs.push((left, right));
                }
            }
        }
    }
    TensorDecomposition::new(&group, pairs)
}

/// Exact equality of two triple decompositions as functions on G^3.
pub fn triples_equal(
    group: &Group,
    a: &[(BSFunction, BSFunction, BSFunction)],
    b: &[(BSFunction, BSFunction, BSFunction)],
) -> Result<bool> {
    let mut acc: BTreeMap<(GElem, GElem, GElem), CycScalar> = BTreeMap::new();
    let l1 = a.iter().chain(b).map(|(f, _, _)| f.level()).max().unwrap_or(0);
    let l2 = a.iter().chain(b).map(|(_, g, _)| g.level()).max().unwrap_or(0);
    let l3 = a.iter().chain(b).map(|(_, _, h)| h.level()).max().unwrap_or(0);
    let all = a.iter().map(|t| (t, false)).chain(b.iter().map(|t| (t, true)));
    for ((f, g, h), negate) in all {
        let fr = f.refine_to(l1)?;
        let gr = g.refine_to(l2)?;
        let hr = h.refine_to(l3)?;
        for (k1, v1) in fr.terms() {
            for (k2, v2) in gr.terms() {
                let v12 = v1.mul(v2)?;
                for (k3, v3) in hr.terms() {
                    let mut v = v12.mul(v3)?;
                    if negate {
                        v = v.neg();
                    }
                    let slot = acc
                        .entry((k1.clone(), k2.clone(), k3.clone()))
                        .or_insert_with(CycScalar::zero);
                    *slot = slot.add(&v)?;
                }
            }
        }
    }
    let _ = group;
    Ok(acc.values().all(|v| v.is_zero()))
}

/// (counit (x) id) applied to a decomposition: sum of eps(f_i) g_i.
pub fn apply_counit_left(t: &TensorDecomposition) -> Result<BSFunction> {
    let mut acc = BSFunction::zero(t.group());
    for (f, g) in t.pairs() {
        acc = acc.add(&g.scale(&f.counit())?)?;
    }
    Ok(acc)
}

/// (id (x) counit) applied to a decomposition: sum of f_i eps(g_i).
pub fn apply_counit_right(t: &TensorDecomposition) -> Result<BSFunction> {
    let mut acc = BSFunction::zero(t.group());
    for (f, g) in t.pairs() {
        acc = acc.add(&f.scale(&g.counit())?)?;
    }
    Ok(acc)
}

/// m(S (x) id): sum of S(f_i) * g_i, pointwise products.
pub fn apply_antipode_left(t: &TensorDecomposition) -> Result<BSFunction> {
    let mut acc = BSFunction::zero(t.group());
    for (f, g) in t.pairs() {
        acc = acc.add(&f.antipode()?.mul(g)?)?;
    }
    Ok(acc)
}

/// m(id (x) S): sum of f_i * S(g_i).
pub fn apply_antipode_right(t: &TensorDecomposition) -> Result<BSFunction> {
    let mut acc = BSFunction::zero(t.group());
    for (f, g) in t.pairs() {
        acc = acc.add(&f.mul(&g.antipode()?)?)?;
    }
    Ok(acc)
}

/// (integral (x) id) with the chosen side applied to the first leg.
pub fn apply_integral_left(t: &TensorDecomposition, side: Side) -> Result<BSFunction> {
    let mut acc = BSFunction::zero(t.group());
    for (f, g) in t.pairs() {
        acc = acc.add(&g.scale(&f.integral(side)?)?)?;
    }
    Ok(acc)
}

/// (id (x) integral) with the chosen side applied to the second leg.
pub fn apply_integral_right(t: &TensorDecomposition, side: Side) -> Result<BSFunction> {
    let mut acc = BSFunction::zero(t.group());
    for (f, g) in t.pairs() {
        acc = acc.add(&f.scale(&g.integral(side)?)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupModel;

    fn chi(g: &Group, lit: &str, n: Level) -> BSFunction {
        BSFunction::indicator(g, &g.parse_elem(lit).unwrap(), n).unwrap()
    }

    #[test]
    fn group_like_identity_for_subgroup_indicators() {
        // Delta(p)(1 (x) p) = p (x) p for p = chi_H
        for d in ["qp:2", "zp:3", "shift:2", "finite:s3"] {
            let g = GroupModel::parse(d).unwrap();
            let p = BSFunction::from_subgroup(&g, g.default_level()).unwrap();
            let t = coproduct_right(&p, &p).unwrap();
            assert_eq!(t.len(), 1);
            assert!(t.equals(&TensorDecomposition::singleton(&p, &p).unwrap()).unwrap(), "{d}");
            let t = coproduct_left(&p, &p).unwrap();
            assert!(t.equals(&TensorDecomposition::singleton(&p, &p).unwrap()).unwrap(), "{d}");
        }
    }

    #[test]
    fn coproduct_right_single_cosets_on_qp() {
        // f(x+y) g(y) with single-coset f, g: one pair (chi_{(a-b)+H}, chi_{b+H})
        let g = GroupModel::parse("qp:2").unwrap();
        let f = chi(&g, "1/2", 0);
        let h = chi(&g, "1", 0);
        let t = coproduct_right(&f, &h).unwrap();
        assert_eq!(t.len(), 1);
        let expect =
            TensorDecomposition::singleton(&chi(&g, "-1/2", 0), &chi(&g, "1", 0)).unwrap();
        assert!(t.equals(&expect).unwrap());
        // pointwise oracle on a window
        let win = g.coset_reps(-2, 2).unwrap();
        for x in &win {
            for y in &win {
                let want = f.eval(&g.mul(x, y)).unwrap().mul(&h.eval(y).unwrap()).unwrap();
                assert_eq!(t.eval(x, y).unwrap(), want);
            }
        }
    }

    #[test]
    fn coproduct_left_single_cosets_on_qp3() {
        let g = GroupModel::parse("qp:3").unwrap();
        let f = chi(&g, "1/3", 0);
        let h = chi(&g, "2", 0);
        let t = coproduct_left(&f, &h).unwrap();
        assert_eq!(t.len(), 1);
        // second leg is chi_{(b-a)+H} with b - a = 2 - 1/3 = 5/3
        let expect =
            TensorDecomposition::singleton(&chi(&g, "1/3", 0), &chi(&g, "5/3", 0)).unwrap();
        assert!(t.equals(&expect).unwrap());
    }

    #[test]
    fn coproducts_of_zero_are_empty() {
        let g = GroupModel::parse("qp:2").unwrap();
        let z = BSFunction::zero(&g);
        let f = chi(&g, "0", 0);
        assert!(coproduct_right(&f, &z).unwrap().is_empty());
        assert!(coproduct_left(&z, &f).unwrap().is_empty());
    }

    #[test]
    fn galois_round_trips() {
        let g = GroupModel::parse("shift:2").unwrap();
        let f = chi(&g, "(1, 1/2)", 1).add(&chi(&g, "(0, 0)", 0).scale(&CycScalar::from_int(2)).unwrap()).unwrap();
        let h = chi(&g, "(-1, 0)", 0).add(&chi(&g, "(0, 1)", 1)).unwrap();
        let t1 = coproduct_right(&f, &h).unwrap();
        let back = galois_inverse(&t1, GaloisMap::T1).unwrap();
        assert!(back.equals(&TensorDecomposition::singleton(&f, &h).unwrap()).unwrap());
        let t2 = coproduct_left(&f, &h).unwrap();
        let back = galois_inverse(&t2, GaloisMap::T2).unwrap();
        assert!(back.equals(&TensorDecomposition::singleton(&f, &h).unwrap()).unwrap());
        // stated fixed point: [(chi_H, chi_H)] is its own T1 inverse
        let p = BSFunction::from_subgroup(&g, 0).unwrap();
        let t = TensorDecomposition::singleton(&p, &p).unwrap();
        assert!(galois_inverse(&t, GaloisMap::T1).unwrap().equals(&t).unwrap());
        // empty in, empty out
        assert!(galois_inverse(&TensorDecomposition::empty(&g), GaloisMap::T1).unwrap().is_empty());
    }

    #[test]
    fn counit_and_antipode_laws_spot_check() {
        let g = GroupModel::parse("shift:2").unwrap();
        let f = chi(&g, "(1, 0)", 0);
        let h = chi(&g, "(1, 2)", 1).scale(&CycScalar::root_of_unity(4, 1).unwrap()).unwrap();
        let t = coproduct_right(&f, &h).unwrap();
        assert_eq!(apply_counit_left(&t).unwrap(), f.mul(&h).unwrap());
        assert_eq!(apply_antipode_left(&t).unwrap(), h.scale(&f.counit()).unwrap());
        let t = coproduct_left(&f, &h).unwrap();
        assert_eq!(apply_counit_right(&t).unwrap(), f.mul(&h).unwrap());
        assert_eq!(apply_antipode_right(&t).unwrap(), f.scale(&h.counit()).unwrap());
    }
}
