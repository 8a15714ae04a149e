//! Group-like projections and membership certificates.

use crate::error::Result;
use crate::group::{GElem, Level};

use super::tensor::{coproduct_left, coproduct_right, TensorDecomposition};
use super::BSFunction;

/// Verdict of [`is_group_like`]: on success the support is a compact open
/// subgroup, returned as its coset set.
#[derive(Clone, Debug)]
pub enum GroupLikeVerdict {
    Yes { level: Level, cosets: Vec<GElem> },
    No { reason: String },
}

impl GroupLikeVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, GroupLikeVerdict::Yes { .. })
    }
}

/// Check whether p is a group-like projection: p = p^2 = p* nonzero and
/// Delta(p)(p (x) 1) = Delta(p)(1 (x) p) = p (x) p, via exact tensor
/// equality of coproduct decompositions.
pub fn is_group_like(p: &BSFunction) -> Result<GroupLikeVerdict> {
    if p.is_zero() {
        return Ok(GroupLikeVerdict::No { reason: "zero function".into() });
    }
    if p.mul(p)? != *p {
        return Ok(GroupLikeVerdict::No { reason: "not idempotent".into() });
    }
    if p.star() != *p {
        return Ok(GroupLikeVerdict::No { reason: "not self-adjoint".into() });
    }
    let target = TensorDecomposition::singleton(p, p)?;
    if !coproduct_right(p, p)?.equals(&target)? || !coproduct_left(p, p)?.equals(&target)? {
        return Ok(GroupLikeVerdict::No { reason: "support not closed".into() });
    }
    Ok(GroupLikeVerdict::Yes { level: p.level(), cosets: p.support_reps().cloned().collect() })
}

/// Constructive membership content: exact decompositions of
/// f(xy) chi_H(y) and f(y) chi_H(xy) for H = H_n, together with the finite
/// set F of H_n-coset labels off which f vanishes.
#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    /// Decomposition of f(xy) chi_H(y).
    pub dec_translation: TensorDecomposition,
    /// Decomposition of f(y) chi_H(xy).
    pub dec_support: TensorDecomposition,
    /// Canonical labels of the H_n-cosets carrying the support of f.
    pub support_mod_h: Vec<GElem>,
}

pub fn membership_certificate(f: &BSFunction, n: Level) -> Result<MembershipCertificate> {
    let group = f.group();
    group.check_level(n)?;
    let h = BSFunction::from_subgroup(group, n)?;
    let dec_translation = coproduct_right(f, &h)?;
    let dec_support = coproduct_right(&h, f)?;
    let mut support: std::collections::BTreeSet<GElem> = std::collections::BTreeSet::new();
    let fine = f.level().max(n);
    for r in f.refined_support(fine)? {
        support.insert(group.canonical_rep(&r, n)?);
    }
    Ok(MembershipCertificate {
        dec_translation,
        dec_support,
        support_mod_h: support.into_iter().collect(),
    })
}
