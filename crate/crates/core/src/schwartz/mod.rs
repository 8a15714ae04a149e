//! The multiplier Hopf *-algebra of locally constant compactly supported
//! functions on a locally profinite group.
//!
//! A [`BSFunction`] is stored as a level n and a finite map from canonical
//! coset representatives r (at level n) to nonzero scalars, meaning
//! f = sum_r c_r chi_{r H_n}. The stored form is canonical: zero terms are
//! dropped and the level is greedily coarsened to the coarsest level at
//! which the function is still coset-constant, so structural equality is
//! equality of functions.

mod build;
mod cert;
mod tensor;

pub use build::QuotientRep;
pub use cert::{is_group_like, membership_certificate, GroupLikeVerdict, MembershipCertificate};
pub use tensor::{
    apply_antipode_left, apply_antipode_right, apply_counit_left, apply_counit_right,
    apply_integral_left, apply_integral_right, coproduct_left, coproduct_right, galois_inverse,
    triples_equal, GaloisMap, TensorDecomposition,
};
pub(crate) use tensor::left_invariance_level;

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::group::{ensure_same_group, GElem, Group, Level, Side};
use crate::scalar::CycScalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSFunction {
    group: Group,
    level: Level,
    terms: BTreeMap<GElem, CycScalar>,
}

impl BSFunction {
    pub fn zero(group: &Group) -> Self {
        BSFunction { group: group.clone(), level: group.default_level(), terms: BTreeMap::new() }
    }

    /// chi_{x H_n}.
    pub fn indicator(group: &Group, x: &GElem, n: Level) -> Result<Self> {
        group.validate_elem(x)?;
        let rep = group.canonical_rep(x, n)?;
        let mut terms = BTreeMap::new();
        terms.insert(rep, CycScalar::one());
        Ok(BSFunction { group: group.clone(), level: n, terms }.canonicalized())
    }

    /// chi_{H_n}.
    pub fn from_subgroup(group: &Group, n: Level) -> Result<Self> {
        Self::indicator(group, &group.identity(), n)
    }

    /// Assemble from explicit (representative, coefficient) terms at one level.
    pub fn from_terms(group: &Group, n: Level, entries: Vec<(GElem, CycScalar)>) -> Result<Self> {
        let mut terms: BTreeMap<GElem, CycScalar> = BTreeMap::new();
        for (x, c) in entries {
            group.validate_elem(&x)?;
            let rep = group.canonical_rep(&x, n)?;
            let slot = terms.entry(rep).or_insert_with(CycScalar::zero);
            *slot = slot.add(&c)?;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(BSFunction { group: group.clone(), level: n, terms }.canonicalized())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Canonical support representatives at the stored level.
    pub fn support_reps(&self) -> impl Iterator<Item = &GElem> {
        self.terms.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GElem, &CycScalar)> {
        self.terms.iter()
    }

    pub fn eval(&self, x: &GElem) -> Result<CycScalar> {
        let rep = self.group.canonical_rep(x, self.level)?;
        Ok(self.terms.get(&rep).cloned().unwrap_or_else(CycScalar::zero))
    }

    pub fn counit(&self) -> CycScalar {
        self.eval(&self.group.identity()).expect("identity is always representable")
    }

    // ---- canonical form ----------------------------------------------------

    fn canonicalized(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() {
            self.level = self.group.default_level();
            return self;
        }
        loop {
            let next = self.level - 1;
            if let Some(min) = self.group.level_min() {
                if next < min {
                    break;
                }
            }
            if let Some(floor) = self.group.level_floor() {
                if next < floor {
                    break;
                }
            }
            let idx = match self.group.index(next, self.level) {
                Ok(i) => i,
                Err(_) => break,
            };
            if idx == 1 {
                // the filtration does not move between these levels
                self.level = next;
                continue;
            }
            let mut parents: BTreeMap<GElem, (u64, CycScalar)> = BTreeMap::new();
            let mut ok = true;
            for (k, c) in &self.terms {
                let parent = self.group.canonical_rep(k, next).expect("coarser level is valid");
                match parents.get_mut(&parent) {
                    None => {
                        parents.insert(parent, (1, c.clone()));
                    }
                    Some((count, coeff)) => {
                        if coeff != c {
                            ok = false;
                            break;
                        }
                        *count += 1;
                    }
                }
            }
            if !ok || parents.values().any(|(count, _)| *count != idx) {
                break;
            }
            self.terms = parents.into_iter().map(|(k, (_, c))| (k, c)).collect();
            self.level = next;
        }
        self
    }

    /// The same function re-expressed at a finer level n >= level.
    pub fn refine_to(&self, n: Level) -> Result<Self> {
        if n < self.level {
            return Err(Error::Usage(format!("refine_to({n}) below current level {}", self.level)));
        }
        if n == self.level {
            return Ok(self.clone());
        }
        let reps = self.group.coset_reps(self.level, n)?;
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            for h in &reps {
                let child = self.group.canonical_rep(&self.group.mul(k, h), n)?;
                terms.insert(child, c.clone());
            }
        }
        Ok(BSFunction { group: self.group.clone(), level: n, terms })
    }

    /// All support cosets refined to level n (n >= level).
    pub fn refined_support(&self, n: Level) -> Result<Vec<GElem>> {
        Ok(self.refine_to(n)?.terms.into_keys().collect())
    }

    fn common_level(&self, other: &Self) -> Level {
        self.level.max(other.level)
    }

    // ---- pointwise *-algebra ----------------------------------------------

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_group(&self.group, &other.group)?;
        let n = self.common_level(other);
        let mut a = self.refine_to(n)?;
        let b = other.refine_to(n)?;
        for (k, c) in b.terms {
            let slot = a.terms.entry(k).or_insert_with(CycScalar::zero);
            *slot = slot.add(&c)?;
        }
        Ok(a.canonicalized())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect();
        BSFunction { group: self.group.clone(), level: self.level, terms }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        ensure_same_group(&self.group, &other.group)?;
        let n = self.common_level(other);
        let a = self.refine_to(n)?;
        let b = other.refine_to(n)?;
        let mut terms = BTreeMap::new();
        for (k, c) in &a.terms {
            if let Some(d) = b.terms.get(k) {
                let p = c.mul(d)?;
                if !p.is_zero() {
                    terms.insert(k.clone(), p);
                }
            }
        }
        Ok(BSFunction { group: self.group.clone(), level: n, terms }.canonicalized())
    }

    pub fn scale(&self, c: &CycScalar) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self::zero(&self.group));
        }
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(k.clone(), v.mul(c)?);
        }
        Ok(BSFunction { group: self.group.clone(), level: self.level, terms })
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        self.scale(&CycScalar::from_rational(r.clone())).expect("rational scaling cannot overflow conductor")
    }

    /// Pointwise complex conjugate, star(f)(x) = conj(f(x)).
    pub fn star(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c.conjugate())).collect();
        BSFunction { group: self.group.clone(), level: self.level, terms }
    }

    // ---- translations and the antipode -------------------------------------

    /// Left: (x . f)(y) = f(x^{-1} y). Right: f_x(y) = f(y x), computed at a
    /// conjugation-refined level so the result is again left-coset constant.
    pub fn translate(&self, x: &GElem, side: Side) -> Result<Self> {
        self.group.validate_elem(x)?;
        match side {
            Side::Left => {
                let mut terms = BTreeMap::new();
                for (k, c) in &self.terms {
                    let moved = self.group.canonical_rep(&self.group.mul(x, k), self.level)?;
                    terms.insert(moved, c.clone());
                }
                Ok(BSFunction { group: self.group.clone(), level: self.level, terms }.canonicalized())
            }
            Side::Right => {
                if self.is_zero() {
                    return Ok(self.clone());
                }
                let x_inv = self.group.inv(x);
                let mut pieces: Vec<(Level, Vec<GElem>, CycScalar)> = Vec::new();
                for (k, c) in &self.terms {
                    let (m, reps) = self.group.coset_mul_elem(k, self.level, &x_inv)?;
                    pieces.push((m, reps, c.clone()));
                }
                self.assemble(pieces)
            }
        }
    }

    /// S(f)(x) = f(x^{-1}); an involution, *-compatible.
    pub fn antipode(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mut pieces: Vec<(Level, Vec<GElem>, CycScalar)> = Vec::new();
        for (k, c) in &self.terms {
            let (m, reps) = self.group.coset_inverse(k, self.level)?;
            pieces.push((m, reps, c.clone()));
        }
        self.assemble(pieces)
    }

    /// Merge disjoint coset pieces at possibly different levels into one
    /// canonical function.
    fn assemble(&self, pieces: Vec<(Level, Vec<GElem>, CycScalar)>) -> Result<Self> {
        let target = pieces.iter().map(|(m, _, _)| *m).max().unwrap_or(self.level);
        let mut terms: BTreeMap<GElem, CycScalar> = BTreeMap::new();
        for (m, reps, c) in pieces {
            let expand = self.group.coset_reps(m, target)?;
            for r in reps {
                for h in &expand {
                    let key = self.group.canonical_rep(&self.group.mul(&r, h), target)?;
                    let slot = terms.entry(key).or_insert_with(CycScalar::zero);
                    *slot = slot.add(&c)?;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(BSFunction { group: self.group.clone(), level: target, terms }.canonicalized())
    }

    // ---- Haar integrals ------------------------------------------------------

    /// Left: integral of f against the left Haar measure (mu(H_0) = 1).
    /// Right: against the right Haar measure, sum of c_r Delta(r)^{-1} mu(r H_n);
    /// the two agree on unimodular groups.
    pub fn integral(&self, side: Side) -> Result<CycScalar> {
        let mu = self.group.measure(self.level)?;
        let mut acc = CycScalar::zero();
        for (k, c) in &self.terms {
            let weight = match side {
                Side::Left => mu.clone(),
                Side::Right => mu.clone() / self.group.modular(k),
            };
            acc = acc.add(&c.scale(&weight))?;
        }
        Ok(acc)
    }

    // ---- span dimension -------------------------------------------------------

    /// Exact dimension of span{ x.f : x in H_n }, by exact rank over the
    /// common refinement basis.
    pub fn translate_span_dim(&self, n: Level) -> Result<usize> {
        self.group.check_level(n)?;
        if self.is_zero() {
            return Ok(0);
        }
        // translates are constant for x within H_L once H_L fixes every
        // support coset: r^{-1} H_L r <= H_level for all support reps r
        let mut l = n.max(self.level);
        for r in self.support_reps() {
            let r_inv = self.group.inv(r);
            l = l.max(self.group.conj_level(&r_inv, self.level)?);
        }
        let xs = self.group.coset_reps(n, l)?;
        let translates = xs
            .iter()
            .map(|x| self.translate(x, Side::Left))
            .collect::<Result<Vec<_>>>()?;
        let common = translates.iter().map(|t| t.level).max().unwrap_or(self.level);
        let mut window: std::collections::BTreeSet<GElem> = std::collections::BTreeSet::new();
        let refined = translates
            .iter()
            .map(|t| t.refine_to(common))
            .collect::<Result<Vec<_>>>()?;
        for t in &refined {
            window.extend(t.terms.keys().cloned());
        }
        let cols: Vec<GElem> = window.into_iter().collect();
        let mut entries = Vec::with_capacity(refined.len() * cols.len());
        for t in &refined {
            for c in &cols {
                entries.push(t.terms.get(c).cloned().unwrap_or_else(CycScalar::zero));
            }
        }
        Ok(crate::linalg::exact_rank(refined.len(), cols.len(), &entries))
    }

    /// chi_K for K the union of all support cosets of the given functions;
    /// a self-adjoint idempotent b with f*b = f for every listed f.
    pub fn local_unit(fs: &[BSFunction]) -> Result<BSFunction> {
        let first = fs.first().ok_or_else(|| Error::Usage("local_unit of an empty list".into()))?;
        let group = first.group.clone();
        let mut level = first.level;
        for f in fs {
            ensure_same_group(&group, &f.group)?;
            level = level.max(f.level);
        }
        let mut terms: BTreeMap<GElem, CycScalar> = BTreeMap::new();
        for f in fs {
            for k in f.refined_support(level)? {
                terms.insert(k, CycScalar::one());
            }
        }
        Ok(BSFunction { group, level, terms }.canonicalized())
    }
}

/// The product set (U a H_la) * (U b H_lb) as a disjoint union of cosets:
/// returns (level, canonical representatives). Exact; used to build the
/// windows on which two-variable identities are compared.
pub fn coset_set_product(
    group: &Group,
    la: Level,
    ra: &[GElem],
    lb: Level,
    rb: &[GElem],
) -> Result<(Level, Vec<GElem>)> {
    let e = group.identity();
    let mut pieces: Vec<(Level, Vec<GElem>)> = Vec::new();
    for b in rb {
        // H_la * b as a union of cosets, then aH_la * bH_lb = U (a r) H_{min(m, lb)}
        let (m, reps) = group.coset_mul_elem(&e, la, b)?;
        let lvl = m.min(lb);
        for a in ra {
            let mut row = Vec::with_capacity(reps.len());
            for r in &reps {
                row.push(group.canonical_rep(&group.mul(a, r), lvl)?);
            }
            pieces.push((lvl, row));
        }
    }
    let target = pieces.iter().map(|(l, _)| *l).max().unwrap_or(la.max(lb));
    let mut out: std::collections::BTreeSet<GElem> = std::collections::BTreeSet::new();
    for (l, reps) in pieces {
        let expand = group.coset_reps(l, target)?;
        for r in reps {
            for h in &expand {
                out.insert(group.canonical_rep(&group.mul(&r, h), target)?);
            }
        }
    }
    Ok((target, out.into_iter().collect()))
}

/// The support of the two-variable symbol f(x) g(x^{-1} z) in its second
/// variable: the product set supp(f) * supp(g), as (level, representatives).
pub fn tensor_support(f: &BSFunction, g: &BSFunction) -> Result<(Level, Vec<GElem>)> {
    let fa: Vec<GElem> = f.support_reps().cloned().collect();
    let ga: Vec<GElem> = g.support_reps().cloned().collect();
    coset_set_product(f.group(), f.level(), &fa, g.level(), &ga)
}
