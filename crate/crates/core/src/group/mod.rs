//! Locally profinite groups presented by a filtration of compact open
//! subgroups H_n (H_{n+1} <= H_n, mu(H_0) = 1), with exact coset
//! enumeration, Haar measure, and the modular function.
//!
//! Shipped instances:
//!
//! * `finite:<name>` / `cayley@<file>` — finite groups; H_n saturates to the
//!   whole group at low levels and to {e} at high levels;
//! * `zp:<p>` — the additive group Z_p with H_n = p^n Z_p, n >= 0;
//! * `qp:<p>` — Q_p with H_n = p^n Z_p for all integers n (self-dual);
//! * `z` — discrete Z with H_n = {0};
//! * `shift:<p>` — the semidirect product Q_p x| Z with
//!   (k,b)(k',b') = (k+k', b + p^k b'), H_n = {0} x p^n Z_p; the one
//!   non-unimodular instance;
//! * `prod(g1,...,gk)` — finite products, componentwise filtration.
//!
//! Representable points are exact: Z[1/p] coordinates for the p-adic
//! instances, so all group and measure data is rational.

mod finite;
mod padic;
mod parse;

pub use finite::FiniteGroup;
pub(crate) use padic::val_p as padic_val;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Level = i32;
pub type Group = Arc<GroupModel>;

/// Which side a translation / integral / coset acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Cap on the number of coset representatives any single enumeration may
/// produce; beyond this the request is refused rather than left to thrash.
const MAX_ENUMERATION: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Finite(FiniteGroup),
    Zp(u32),
    Qp(u32),
    ZDiscrete,
    Shift(u32),
    Product(Vec<Group>),
}

#[derive(Debug, PartialEq, Eq)]
pub struct GroupModel {
    pub(crate) kind: GroupKind,
    descriptor: String,
}

/// Group element coordinates. Elements do not carry a group reference;
/// every operation goes through the owning [`GroupModel`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Fin(usize),
    Rat(BigRational),
    Int(BigInt),
    Shift(i64, BigRational),
    Tup(Vec<Coord>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GElem(pub(crate) Coord);

pub fn ensure_same_group(a: &Group, b: &Group) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::MixedGroups(a.descriptor().into(), b.descriptor().into()))
    }
}

impl GroupModel {
    pub(crate) fn from_kind(kind: GroupKind) -> Group {
        let descriptor = Self::kind_descriptor(&kind);
        Arc::new(GroupModel { kind, descriptor })
    }

    fn kind_descriptor(kind: &GroupKind) -> String {
        match kind {
            GroupKind::Finite(f) => {
                let base = if f.name.starts_with("cayley@") {
                    f.name.clone()
                } else {
                    format!("finite:{}", f.name)
                };
                if f.unit_is_whole {
                    format!("{base}@dual")
                } else {
                    base
                }
            }
            GroupKind::Zp(p) => format!("zp:{p}"),
            GroupKind::Qp(p) => format!("qp:{p}"),
            GroupKind::ZDiscrete => "z".into(),
            GroupKind::Shift(p) => format!("shift:{p}"),
            GroupKind::Product(fs) => {
                let inner: Vec<String> = fs.iter().map(|g| g.descriptor().to_string()).collect();
                format!("prod({})", inner.join(","))
            }
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Construct a group from its descriptor string.
    pub fn parse(descriptor: &str) -> Result<Group> {
        parse::parse_descriptor(descriptor)
    }

    pub fn finite(f: FiniteGroup) -> Group {
        Self::from_kind(GroupKind::Finite(f))
    }

    pub fn zp(p: u32) -> Result<Group> {
        parse::check_prime(p)?;
        Ok(Self::from_kind(GroupKind::Zp(p)))
    }

    pub fn qp(p: u32) -> Result<Group> {
        parse::check_prime(p)?;
        Ok(Self::from_kind(GroupKind::Qp(p)))
    }

    pub fn z_discrete() -> Group {
        Self::from_kind(GroupKind::ZDiscrete)
    }

    pub fn shift(p: u32) -> Result<Group> {
        parse::check_prime(p)?;
        Ok(Self::from_kind(GroupKind::Shift(p)))
    }

    pub fn product(factors: Vec<Group>) -> Result<Group> {
        if factors.is_empty() {
            return Err(Error::Usage("product of zero groups".into()));
        }
        Ok(Self::from_kind(GroupKind::Product(factors)))
    }

    pub fn is_abelian(&self) -> bool {
        match &self.kind {
            GroupKind::Finite(f) => f.abelian,
            GroupKind::Zp(_) | GroupKind::Qp(_) | GroupKind::ZDiscrete => true,
            GroupKind::Shift(_) => false,
            GroupKind::Product(fs) => fs.iter().all(|g| g.is_abelian()),
        }
    }

    pub fn is_unimodular(&self) -> bool {
        match &self.kind {
            GroupKind::Shift(_) => false,
            GroupKind::Product(fs) => fs.iter().all(|g| g.is_unimodular()),
            _ => true,
        }
    }

    // ---- levels ----------------------------------------------------------

    /// Smallest admissible level, if bounded below. For `zp` and `z` there
    /// is no compact open subgroup strictly larger than H_0, so levels below
    /// 0 are rejected loudly.
    pub fn level_min(&self) -> Option<Level> {
        match &self.kind {
            GroupKind::Zp(_) | GroupKind::ZDiscrete => Some(0),
            GroupKind::Finite(_) | GroupKind::Qp(_) | GroupKind::Shift(_) => None,
            GroupKind::Product(fs) => fs.iter().filter_map(|g| g.level_min()).max(),
        }
    }

    /// Coarsest level at which the filtration still moves: below this every
    /// H_n is equal (finite groups saturate at the whole group). `None` when
    /// the filtration is strictly decreasing forever downwards.
    pub fn level_floor(&self) -> Option<Level> {
        match &self.kind {
            GroupKind::Finite(f) => Some(f.whole_level()),
            GroupKind::Zp(_) | GroupKind::ZDiscrete => Some(0),
            GroupKind::Qp(_) | GroupKind::Shift(_) => None,
            GroupKind::Product(fs) => {
                let mut floors = Vec::new();
                for g in fs {
                    floors.push(g.level_floor()?);
                }
                floors.into_iter().min()
            }
        }
    }

    /// Finest level at which the filtration still moves (finite groups and
    /// discrete Z saturate at {e}).
    pub fn level_ceiling(&self) -> Option<Level> {
        match &self.kind {
            GroupKind::Finite(f) => Some(f.point_level()),
            GroupKind::ZDiscrete => Some(0),
            GroupKind::Zp(_) | GroupKind::Qp(_) | GroupKind::Shift(_) => None,
            GroupKind::Product(fs) => {
                let mut tops = Vec::new();
                for g in fs {
                    tops.push(g.level_ceiling()?);
                }
                tops.into_iter().max()
            }
        }
    }

    pub fn check_level(&self, n: Level) -> Result<()> {
        if let Some(min) = self.level_min() {
            if n < min {
                return Err(Error::LevelRange { level: n as i64, group: self.descriptor.clone() });
            }
        }
        Ok(())
    }

    /// Clamp a requested level span to the meaningful range of this group.
    pub fn clamp_span(&self, lo: Level, hi: Level) -> (Level, Level) {
        let mut lo = lo;
        let mut hi = hi;
        if let Some(min) = self.level_min() {
            lo = lo.max(min);
        }
        if let Some(floor) = self.level_floor() {
            lo = lo.max(floor);
        }
        if let Some(ceiling) = self.level_ceiling() {
            hi = hi.min(ceiling);
        }
        if hi < lo {
            hi = lo;
        }
        (lo, hi)
    }

    /// Default level for degenerate (zero) functions.
    pub fn default_level(&self) -> Level {
        let (lo, hi) = self.clamp_span(0, 0);
        0i32.clamp(lo, hi)
    }

    // ---- element construction and the group law ---------------------------

    pub fn identity(&self) -> GElem {
        GElem(self.identity_coord(&self.kind))
    }

    fn identity_coord(&self, kind: &GroupKind) -> Coord {
        match kind {
            GroupKind::Finite(f) => Coord::Fin(f.identity),
            GroupKind::Zp(_) | GroupKind::Qp(_) => Coord::Rat(BigRational::zero()),
            GroupKind::ZDiscrete => Coord::Int(BigInt::zero()),
            GroupKind::Shift(_) => Coord::Shift(0, BigRational::zero()),
            GroupKind::Product(fs) => Coord::Tup(fs.iter().map(|g| g.identity().0).collect()),
        }
    }

    /// Validate that an element's coordinates belong to this group.
    pub fn validate_elem(&self, x: &GElem) -> Result<()> {
        self.validate_coord(&self.kind, &x.0)
    }

    fn validate_coord(&self, kind: &GroupKind, c: &Coord) -> Result<()> {
        match (kind, c) {
            (GroupKind::Finite(f), Coord::Fin(i)) => {
                if *i < f.order() {
                    Ok(())
                } else {
                    Err(Error::Element(format!("index {i} out of range for {}", f.name)))
                }
            }
            (GroupKind::Zp(p), Coord::Rat(r)) => {
                if r.is_integer() {
                    Ok(())
                } else {
                    Err(Error::Element(format!("{r} is not in Z_{p} (non-integer denominator)")))
                }
            }
            (GroupKind::Qp(p), Coord::Rat(r)) => {
                if padic::is_p_rational(r, *p) {
                    Ok(())
                } else {
                    Err(Error::Element(format!("{r} has a denominator prime to {p}... not representable in qp:{p}")))
                }
            }
            (GroupKind::ZDiscrete, Coord::Int(_)) => Ok(()),
            (GroupKind::Shift(p), Coord::Shift(_, b)) => {
                if padic::is_p_rational(b, *p) {
                    Ok(())
                } else {
                    Err(Error::Element(format!("{b} is not a Z[1/{p}] coordinate")))
                }
            }
            (GroupKind::Product(fs), Coord::Tup(cs)) => {
                if fs.len() != cs.len() {
                    return Err(Error::Element(format!("tuple arity {} != {}", cs.len(), fs.len())));
                }
                for (g, c) in fs.iter().zip(cs) {
                    g.validate_coord(&g.kind, c)?;
                }
                Ok(())
            }
            _ => Err(Error::Element("coordinate shape does not match group".into())),
        }
    }

    pub fn elem_rat(&self, r: BigRational) -> Result<GElem> {
        let e = GElem(Coord::Rat(r));
        self.validate_elem(&e)?;
        Ok(e)
    }

    pub fn elem_int(&self, n: i64) -> Result<GElem> {
        match &self.kind {
            GroupKind::ZDiscrete => Ok(GElem(Coord::Int(BigInt::from(n)))),
            GroupKind::Zp(_) | GroupKind::Qp(_) => self.elem_rat(BigRational::from(BigInt::from(n))),
            _ => Err(Error::Element("integer literal not valid for this group".into())),
        }
    }

    pub fn elem_shift(&self, k: i64, b: BigRational) -> Result<GElem> {
        let e = GElem(Coord::Shift(k, b));
        self.validate_elem(&e)?;
        Ok(e)
    }

    pub fn elem_finite(&self, name: &str) -> Result<GElem> {
        match &self.kind {
            GroupKind::Finite(f) => f
                .elem_index(name)
                .map(|i| GElem(Coord::Fin(i)))
                .ok_or_else(|| Error::Element(format!("no element '{name}' in {}", f.name))),
            _ => Err(Error::Element("named element not valid for this group".into())),
        }
    }

    pub fn elem_tuple(&self, comps: Vec<GElem>) -> Result<GElem> {
        let e = GElem(Coord::Tup(comps.into_iter().map(|c| c.0).collect()));
        self.validate_elem(&e)?;
        Ok(e)
    }

    pub fn mul(&self, x: &GElem, y: &GElem) -> GElem {
        GElem(self.mul_coord(&self.kind, &x.0, &y.0))
    }

    fn mul_coord(&self, kind: &GroupKind, x: &Coord, y: &Coord) -> Coord {
        match (kind, x, y) {
            (GroupKind::Finite(f), Coord::Fin(a), Coord::Fin(b)) => Coord::Fin(f.table[*a][*b]),
            (GroupKind::Zp(_) | GroupKind::Qp(_), Coord::Rat(a), Coord::Rat(b)) => Coord::Rat(a + b),
            (GroupKind::ZDiscrete, Coord::Int(a), Coord::Int(b)) => Coord::Int(a + b),
            (GroupKind::Shift(p), Coord::Shift(k, b), Coord::Shift(k2, b2)) => {
                Coord::Shift(k + k2, b + padic::pow_p(*p, *k) * b2)
            }
            (GroupKind::Product(fs), Coord::Tup(a), Coord::Tup(b)) => Coord::Tup(
                fs.iter()
                    .zip(a.iter().zip(b.iter()))
                    .map(|(g, (ca, cb))| g.mul_coord(&g.kind, ca, cb))
                    .collect(),
            ),
            _ => panic!("mixed coordinate shapes in group operation"),
        }
    }

    pub fn inv(&self, x: &GElem) -> GElem {
        GElem(self.inv_coord(&self.kind, &x.0))
    }

    fn inv_coord(&self, kind: &GroupKind, x: &Coord) -> Coord {
        match (kind, x) {
            (GroupKind::Finite(f), Coord::Fin(a)) => Coord::Fin(f.inv[*a]),
            (GroupKind::Zp(_) | GroupKind::Qp(_), Coord::Rat(a)) => Coord::Rat(-a),
            (GroupKind::ZDiscrete, Coord::Int(a)) => Coord::Int(-a),
            (GroupKind::Shift(p), Coord::Shift(k, b)) => Coord::Shift(-k, -(padic::pow_p(*p, -k) * b)),
            (GroupKind::Product(fs), Coord::Tup(a)) => {
                Coord::Tup(fs.iter().zip(a).map(|(g, c)| g.inv_coord(&g.kind, c)).collect())
            }
            _ => panic!("mixed coordinate shapes in group operation"),
        }
    }

    // ---- cosets, measure, modular function --------------------------------

    /// Canonical representative of x H_n; idempotent, equal cosets map to
    /// identical representatives.
    pub fn canonical_rep(&self, x: &GElem, n: Level) -> Result<GElem> {
        self.check_level(n)?;
        Ok(GElem(self.canon_coord(&self.kind, &x.0, n)))
    }

    fn canon_coord(&self, kind: &GroupKind, x: &Coord, n: Level) -> Coord {
        match (kind, x) {
            (GroupKind::Finite(f), Coord::Fin(a)) => {
                if n <= f.whole_level() {
                    Coord::Fin(f.identity)
                } else {
                    Coord::Fin(*a)
                }
            }
            (GroupKind::Zp(p) | GroupKind::Qp(p), Coord::Rat(r)) => Coord::Rat(padic::canonical(r, *p, n as i64)),
            (GroupKind::ZDiscrete, Coord::Int(a)) => Coord::Int(a.clone()),
            (GroupKind::Shift(p), Coord::Shift(k, b)) => {
                Coord::Shift(*k, padic::canonical(b, *p, n as i64 + *k as i64))
            }
            (GroupKind::Product(fs), Coord::Tup(cs)) => Coord::Tup(
                fs.iter().zip(cs).map(|(g, c)| g.canon_coord(&g.kind, c, n)).collect(),
            ),
            _ => panic!("mixed coordinate shapes in group operation"),
        }
    }

    pub fn eq_at_level(&self, x: &GElem, y: &GElem, n: Level) -> Result<bool> {
        Ok(self.canonical_rep(x, n)? == self.canonical_rep(y, n)?)
    }

    pub fn is_in_subgroup(&self, x: &GElem, n: Level) -> Result<bool> {
        Ok(self.canonical_rep(x, n)? == self.canonical_rep(&self.identity(), n)?)
    }

    /// [H_m : H_n] for m <= n.
    pub fn index(&self, m: Level, n: Level) -> Result<u64> {
        if m > n {
            return Err(Error::Usage(format!("index({m},{n}): need m <= n")));
        }
        self.check_level(m)?;
        self.check_level(n)?;
        self.index_unchecked(m, n)
    }

    fn index_unchecked(&self, m: Level, n: Level) -> Result<u64> {
        let too_big = || Error::Overflow(format!("index({m},{n}) exceeds the enumeration cap"));
        let idx = match &self.kind {
            GroupKind::Finite(f) => {
                if m <= f.whole_level() && n >= f.point_level() {
                    f.order() as u64
                } else {
                    1
                }
            }
            GroupKind::Zp(p) | GroupKind::Qp(p) | GroupKind::Shift(p) => (*p as u64)
                .checked_pow(u32::try_from(n - m).map_err(|_| too_big())?)
                .ok_or_else(too_big)?,
            GroupKind::ZDiscrete => 1,
            GroupKind::Product(fs) => {
                let mut acc: u64 = 1;
                for g in fs {
                    acc = acc.checked_mul(g.index_unchecked(m, n)?).ok_or_else(too_big)?;
                }
                acc
            }
        };
        if idx > MAX_ENUMERATION {
            return Err(too_big());
        }
        Ok(idx)
    }

    /// mu(H_n) under the global normalization mu(H_0) = 1.
    pub fn measure(&self, n: Level) -> Result<BigRational> {
        self.check_level(n)?;
        if n >= 0 {
            let idx = self.index_unchecked(0, n)?;
            Ok(BigRational::new(BigInt::one(), BigInt::from(idx)))
        } else {
            let idx = self.index_unchecked(n, 0)?;
            Ok(BigRational::from(BigInt::from(idx)))
        }
    }

    /// mu(x H_n) (left) or mu(H_n x) (right); the right value carries the
    /// modular factor, with the convention mu(E x) = Delta(x) mu(E).
    pub fn measure_coset(&self, x: &GElem, n: Level, side: Side) -> Result<BigRational> {
        let m = self.measure(n)?;
        Ok(match side {
            Side::Left => m,
            Side::Right => self.modular(x) * m,
        })
    }

    /// The modular function Delta(x): a homomorphism into the positive
    /// rationals, 1 on every compact subgroup and on unimodular instances.
    pub fn modular(&self, x: &GElem) -> BigRational {
        self.modular_coord(&self.kind, &x.0)
    }

    fn modular_coord(&self, kind: &GroupKind, x: &Coord) -> BigRational {
        match (kind, x) {
            (GroupKind::Shift(p), Coord::Shift(k, _)) => padic::pow_p(*p, *k),
            (GroupKind::Product(fs), Coord::Tup(cs)) => {
                let mut acc = BigRational::one();
                for (g, c) in fs.iter().zip(cs) {
                    acc *= g.modular_coord(&g.kind, c);
                }
                acc
            }
            _ => BigRational::one(),
        }
    }

    /// Exactly index(m,n) canonical representatives of the H_n-cosets inside
    /// H_m; pairwise distinct at level n, union covering H_m.
    pub fn coset_reps(&self, m: Level, n: Level) -> Result<Vec<GElem>> {
        if m > n {
            return Err(Error::Usage(format!("coset_reps({m},{n}): need m <= n")));
        }
        self.check_level(m)?;
        self.check_level(n)?;
        self.index_unchecked(m, n)?; // enumeration-size guard
        Ok(self.reps_coord(&self.kind, m, n).into_iter().map(GElem).collect())
    }

    fn reps_coord(&self, kind: &GroupKind, m: Level, n: Level) -> Vec<Coord> {
        match kind {
            GroupKind::Finite(f) => {
                if m <= f.whole_level() && n >= f.point_level() {
                    (0..f.order()).map(Coord::Fin).collect()
                } else {
                    vec![Coord::Fin(f.identity)]
                }
            }
            GroupKind::Zp(p) | GroupKind::Qp(p) => {
                let count = (*p as u64).pow((n - m) as u32);
                let step = padic::pow_p(*p, m as i64);
                (0..count).map(|t| Coord::Rat(BigRational::from(BigInt::from(t)) * &step)).collect()
            }
            GroupKind::ZDiscrete => vec![Coord::Int(BigInt::zero())],
            GroupKind::Shift(p) => {
                let count = (*p as u64).pow((n - m) as u32);
                let step = padic::pow_p(*p, m as i64);
                (0..count)
                    .map(|t| Coord::Shift(0, BigRational::from(BigInt::from(t)) * &step))
                    .collect()
            }
            GroupKind::Product(fs) => {
                let mut acc: Vec<Vec<Coord>> = vec![vec![]];
                for g in fs {
                    let reps = g.reps_coord(&g.kind, m, n);
                    let mut next = Vec::with_capacity(acc.len() * reps.len());
                    for prefix in &acc {
                        for r in &reps {
                            let mut row = prefix.clone();
                            row.push(r.clone());
                            next.push(row);
                        }
                    }
                    acc = next;
                }
                acc.into_iter().map(Coord::Tup).collect()
            }
        }
    }

    /// A level m with x H_m x^{-1} <= H_n; equal to n on every instance
    /// where conjugation preserves the filtration, n - k on shift(p).
    /// Deterministic, not necessarily minimal.
    pub fn conj_level(&self, x: &GElem, n: Level) -> Result<Level> {
        let m = self.conj_coord(&self.kind, &x.0, n);
        self.check_level(m)?;
        Ok(m)
    }

    fn conj_coord(&self, kind: &GroupKind, x: &Coord, n: Level) -> Level {
        match (kind, x) {
            (GroupKind::Shift(_), Coord::Shift(k, _)) => {
                n - Level::try_from(*k).expect("shift exponent fits a level")
            }
            (GroupKind::Product(fs), Coord::Tup(cs)) => fs
                .iter()
                .zip(cs)
                .map(|(g, c)| g.conj_coord(&g.kind, c, n))
                .max()
                .unwrap_or(n),
            _ => n,
        }
    }

    // ---- coset geometry helpers used by the function algebra --------------

    /// The coset r H_n * x, returned as (level M, disjoint canonical
    /// representatives of its H_M-cosets). Exact: the union of the returned
    /// cosets equals r H_n x.
    pub fn coset_mul_elem(&self, rep: &GElem, n: Level, x: &GElem) -> Result<(Level, Vec<GElem>)> {
        let m = self.conj_level(x, n)?;
        let x_inv = self.inv(x);
        let l = self.conj_level(&x_inv, m)?.max(n);
        let mut out = BTreeSet::new();
        for u in self.coset_reps(n, l)? {
            let ru = self.mul(rep, &u);
            out.insert(self.canonical_rep(&self.mul(&ru, x), m)?);
        }
        // mu(H_n x) = Delta(x) mu(H_n) must equal |out| * mu(H_M)
        let expect = self.modular(x) * self.measure(n)? / self.measure(m)?;
        debug_assert_eq!(expect, BigRational::from(BigInt::from(out.len() as i64)));
        Ok((m, out.into_iter().collect()))
    }

    /// The inverse coset (r H_n)^{-1} = H_n r^{-1}, as (level M, disjoint
    /// canonical representatives).
    pub fn coset_inverse(&self, rep: &GElem, n: Level) -> Result<(Level, Vec<GElem>)> {
        let r_inv = self.inv(rep);
        let m = self.conj_level(&r_inv, n)?;
        let l = self.conj_level(rep, m)?.max(n);
        let mut out = BTreeSet::new();
        for u in self.coset_reps(n, l)? {
            out.insert(self.canonical_rep(&self.mul(&u, &r_inv), m)?);
        }
        let expect = self.modular(&r_inv) * self.measure(n)? / self.measure(m)?;
        debug_assert_eq!(expect, BigRational::from(BigInt::from(out.len() as i64)));
        Ok((m, out.into_iter().collect()))
    }

    // ---- element text form -------------------------------------------------

    pub fn format_elem(&self, x: &GElem) -> String {
        self.format_coord(&self.kind, &x.0)
    }

    fn format_coord(&self, kind: &GroupKind, c: &Coord) -> String {
        match (kind, c) {
            (GroupKind::Finite(f), Coord::Fin(i)) => f.elems[*i].clone(),
            (_, Coord::Rat(r)) => format_rat(r),
            (_, Coord::Int(i)) => i.to_string(),
            (GroupKind::Shift(_), Coord::Shift(k, b)) => format!("({}, {})", k, format_rat(b)),
            (GroupKind::Product(fs), Coord::Tup(cs)) => {
                let inner: Vec<String> =
                    fs.iter().zip(cs).map(|(g, c)| g.format_coord(&g.kind, c)).collect();
                format!("({})", inner.join(", "))
            }
            _ => panic!("mixed coordinate shapes in format"),
        }
    }

    /// Parse an element literal in this group's syntax.
    pub fn parse_elem(&self, src: &str) -> Result<GElem> {
        parse::parse_elem(self, src)
    }
}

fn format_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn qp_group_law() {
        let g = GroupModel::qp(2).unwrap();
        let x = g.elem_rat(rat(3, 4)).unwrap();
        let y = g.elem_rat(rat(1, 2)).unwrap();
        assert_eq!(g.mul(&x, &y), g.elem_rat(rat(5, 4)).unwrap());
        assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
    }

    #[test]
    fn shift_semidirect_law() {
        // oracle: direct evaluation of (k,b)(k',b') = (k+k', b + p^k b')
        let g = GroupModel::shift(2).unwrap();
        let a = g.elem_shift(1, rat(0, 1)).unwrap();
        let b = g.elem_shift(0, rat(1, 1)).unwrap();
        assert_eq!(g.mul(&a, &b), g.elem_shift(1, rat(2, 1)).unwrap());
        assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
        let c = g.elem_shift(-2, rat(3, 4)).unwrap();
        assert_eq!(g.mul(&c, &g.inv(&c)), g.identity());
    }

    #[test]
    fn coset_reps_zp3() {
        let g = GroupModel::zp(3).unwrap();
        let reps = g.coset_reps(0, 1).unwrap();
        let want: Vec<GElem> = (0..3).map(|t| g.elem_int(t).unwrap()).collect();
        assert_eq!(reps, want);
    }

    #[test]
    fn coset_reps_qp2_distinct_and_covering() {
        let g = GroupModel::qp(2).unwrap();
        let reps = g.coset_reps(-1, 1).unwrap();
        let want: Vec<GElem> = [rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 2)]
            .into_iter()
            .map(|r| g.elem_rat(r).unwrap())
            .collect();
        assert_eq!(reps, want);
        // exhaustive distinctness and covering at level 1
        for (i, a) in reps.iter().enumerate() {
            assert_eq!(g.canonical_rep(a, 1).unwrap(), *a);
            for b in reps.iter().skip(i + 1) {
                assert!(!g.eq_at_level(a, b, 1).unwrap());
            }
        }
    }

    #[test]
    fn finite_group_levels() {
        let g = GroupModel::finite(FiniteGroup::s3());
        assert_eq!(g.coset_reps(-1, 0).unwrap().len(), 6);
        assert_eq!(g.coset_reps(0, 0).unwrap().len(), 1);
        assert_eq!(g.measure(0).unwrap(), rat(1, 1));
        assert_eq!(g.measure(-1).unwrap(), rat(6, 1));
        // saturation: far levels behave like the extremes
        assert_eq!(g.index(-5, 3).unwrap(), 6);
    }

    #[test]
    fn canonical_reps() {
        let g = GroupModel::qp(2).unwrap();
        let x = g.elem_rat(rat(13, 4)).unwrap();
        assert_eq!(g.canonical_rep(&x, 2).unwrap(), g.elem_rat(rat(13, 4)).unwrap());
        // oracle for level 1: 13/4 - 5/4 = 2 lies in 2 Z_2
        assert_eq!(g.canonical_rep(&x, 1).unwrap(), g.elem_rat(rat(5, 4)).unwrap());
        let z5 = GroupModel::zp(5).unwrap();
        let y = z5.elem_int(7).unwrap();
        assert_eq!(z5.canonical_rep(&y, 1).unwrap(), z5.elem_int(2).unwrap());
    }

    #[test]
    fn canonical_rep_respects_right_multiplication_inside_the_subgroup() {
        for d in ["qp:2", "zp:3", "shift:2", "finite:s3"] {
            let g = GroupModel::parse(d).unwrap();
            let (lo, hi) = g.clamp_span(-1, 1);
            for n in lo..=hi {
                for x in g.coset_reps(lo, hi).unwrap() {
                    for h in g.coset_reps(n, (n + 2).min(hi.max(n + 2))).unwrap() {
                        let xh = g.mul(&x, &h);
                        assert_eq!(
                            g.canonical_rep(&xh, n).unwrap(),
                            g.canonical_rep(&x, n).unwrap(),
                            "group {d}, level {n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conj_level_soundness() {
        let g = GroupModel::shift(2).unwrap();
        let x = g.elem_shift(1, rat(0, 1)).unwrap();
        for n in -2..=2 {
            let m = g.conj_level(&x, n).unwrap();
            assert_eq!(m, n - 1);
            // oracle: conjugate finer-level representatives and test membership
            for r in g.coset_reps(m, m + 2).unwrap() {
                let conj = g.mul(&g.mul(&x, &r), &g.inv(&x));
                assert!(g.is_in_subgroup(&conj, n).unwrap());
            }
        }
        let q = GroupModel::qp(3).unwrap();
        let y = q.elem_rat(rat(5, 9)).unwrap();
        assert_eq!(q.conj_level(&y, 1).unwrap(), 1);
    }

    #[test]
    fn measure_coherence() {
        for d in ["qp:2", "zp:3", "shift:2", "finite:z6", "z"] {
            let g = GroupModel::parse(d).unwrap();
            let (lo, hi) = g.clamp_span(-2, 2);
            for m in lo..=hi {
                for n in m..=hi {
                    let reps = g.coset_reps(m, n).unwrap();
                    let total: BigRational =
                        reps.iter().map(|_| g.measure(n).unwrap()).sum();
                    assert_eq!(total, g.measure(m).unwrap(), "group {d} ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn modular_function_on_shift() {
        let g = GroupModel::shift(2).unwrap();
        // oracle: mu(H_n x) by decomposing the right coset into left cosets
        // at levels n = 2, 3 and counting
        let x = g.elem_shift(1, rat(0, 1)).unwrap();
        for n in [2, 3] {
            let (m, reps) = g.coset_mul_elem(&g.identity(), n, &x).unwrap();
            let counted =
                BigRational::from(BigInt::from(reps.len() as i64)) * g.measure(m).unwrap();
            assert_eq!(counted, g.modular(&x) * g.measure(n).unwrap());
        }
        assert_eq!(g.modular(&x), rat(2, 1));
        // homomorphism and triviality on the compact subgroup
        let y = g.elem_shift(-2, rat(1, 2)).unwrap();
        assert_eq!(g.modular(&g.mul(&x, &y)), g.modular(&x) * g.modular(&y));
        let h = g.elem_shift(0, rat(3, 1)).unwrap();
        assert_eq!(g.modular(&h), rat(1, 1));
    }

    #[test]
    fn unimodular_instances() {
        for d in ["qp:5", "zp:2", "z", "finite:s3", "prod(qp:2,finite:z2)"] {
            let g = GroupModel::parse(d).unwrap();
            assert!(g.is_unimodular(), "{d}");
        }
        assert!(!GroupModel::parse("shift:2").unwrap().is_unimodular());
    }

    #[test]
    fn product_groups() {
        let g = GroupModel::parse("prod(zp:2,finite:z3)").unwrap();
        assert_eq!(g.level_min(), Some(0));
        let reps = g.coset_reps(0, 1).unwrap();
        assert_eq!(reps.len(), 2); // zp:2 splits in two, z3 stays {e} above level 0
        let x = g.parse_elem("(1, 2)").unwrap();
        let y = g.parse_elem("(1, 2)").unwrap();
        let xy = g.mul(&x, &y);
        assert_eq!(g.format_elem(&xy), "(2, 1)");
    }

    #[test]
    fn level_range_is_loud() {
        let g = GroupModel::zp(2).unwrap();
        assert!(matches!(g.coset_reps(-1, 0), Err(Error::LevelRange { .. })));
        let z = GroupModel::z_discrete();
        assert!(matches!(z.measure(-1), Err(Error::LevelRange { .. })));
    }

    #[test]
    fn elem_rejection() {
        let g = GroupModel::qp(2).unwrap();
        assert!(matches!(g.parse_elem("1/3"), Err(Error::Element(_))));
        let z = GroupModel::zp(2).unwrap();
        assert!(matches!(z.parse_elem("1/2"), Err(Error::Element(_))));
    }

    #[test]
    fn coset_mul_elem_exactness_on_shift() {
        let g = GroupModel::shift(2).unwrap();
        let x = g.elem_shift(1, rat(1, 2)).unwrap();
        let r = g.elem_shift(0, rat(0, 1)).unwrap();
        let (m, reps) = g.coset_mul_elem(&r, 0, &x).unwrap();
        // pointwise: every u in H_0 gives r u x inside one of the returned cosets
        for u in g.coset_reps(0, 3).unwrap() {
            let pt = g.mul(&g.mul(&r, &u), &x);
            let c = g.canonical_rep(&pt, m).unwrap();
            assert!(reps.contains(&c));
        }
    }

    #[test]
    fn coset_inverse_exactness() {
        for d in ["qp:2", "shift:2", "finite:s3"] {
            let g = GroupModel::parse(d).unwrap();
            let (lo, hi) = g.clamp_span(0, 1);
            let n = hi.min(lo + 1);
            for r in g.coset_reps(lo, n).unwrap() {
                let (m, reps) = g.coset_inverse(&r, n).unwrap();
                let fine = m.max(n) + 1;
                for u in g.coset_reps(n, fine).unwrap() {
                    let pt = g.inv(&g.mul(&r, &u));
                    let c = g.canonical_rep(&pt, m).unwrap();
                    assert!(reps.contains(&c), "group {d}");
                }
            }
        }
    }
}
