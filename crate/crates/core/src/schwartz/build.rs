//! Constructors from quotient data: tables on H_0/H_n and matrix
//! coefficients of finite-dimensional unitary representations of H_0/H_n.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{GElem, Group, Level};
use crate::scalar::CycScalar;

use super::BSFunction;

type Mat = Vec<Vec<CycScalar>>;

fn mat_mul(a: &Mat, b: &Mat) -> Result<Mat> {
    let n = a.len();
    let mut out = vec![vec![CycScalar::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j])?)?;
            }
        }
    }
    Ok(out)
}

fn mat_is_identity(a: &Mat) -> bool {
    a.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() })
    })
}

fn conj_transpose(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conjugate()).collect()).collect()
}

/// A finite-dimensional unitary representation of the finite quotient
/// H_0/H_n, given by exact matrices over the cyclotomic field, one per
/// canonical coset representative.
#[derive(Clone, Debug)]
pub struct QuotientRep {
    level: Level,
    dim: usize,
    mats: BTreeMap<GElem, Mat>,
}

impl QuotientRep {
    /// Validate and build: requires one square matrix per coset of H_n in
    /// H_0, the identity matrix at e, homomorphism property on all pairs,
    /// and unitarity of every matrix.
    pub fn new(group: &Group, level: Level, entries: Vec<(GElem, Mat)>) -> Result<Self> {
        group.check_level(level)?;
        if level < 0 {
            return Err(Error::Usage("quotient representations live on H_0/H_n with n >= 0".into()));
        }
        let reps = group.coset_reps(0, level)?;
        let dim = entries
            .first()
            .map(|(_, m)| m.len())
            .ok_or_else(|| Error::Validation("empty representation table".into()))?;
        if dim == 0 {
            return Err(Error::Validation("zero-dimensional representation".into()));
        }
        let mut mats: BTreeMap<GElem, Mat> = BTreeMap::new();
        for (x, m) in entries {
            group.validate_elem(&x)?;
            if !group.is_in_subgroup(&x, 0)? {
                return Err(Error::Validation(format!(
                    "representation key {} lies outside H_0",
                    group.format_elem(&x)
                )));
            }
            if m.len() != dim || m.iter().any(|row| row.len() != dim) {
                return Err(Error::Validation("representation matrices must be square of equal size".into()));
            }
            let key = group.canonical_rep(&x, level)?;
            if mats.insert(key, m).is_some() {
                return Err(Error::Validation("duplicate coset key in representation table".into()));
            }
        }
        if mats.len() != reps.len() {
            return Err(Error::Validation(format!(
                "representation table has {} entries, quotient has {} cosets",
                mats.len(),
                reps.len()
            )));
        }
        let rep = QuotientRep { level, dim, mats };
        // identity, homomorphism, unitarity
        let e = group.canonical_rep(&group.identity(), level)?;
        if !mat_is_identity(rep.mat(&e)?) {
            return Err(Error::Validation("representation does not send e to the identity matrix".into()));
        }
        for r in &reps {
            let mr = rep.mat(r)?;
            if !mat_is_identity(&mat_mul(mr, &conj_transpose(mr))?) {
                return Err(Error::Validation(format!(
                    "matrix at {} is not unitary",
                    group.format_elem(r)
                )));
            }
            for s in &reps {
                let prod_key = group.canonical_rep(&group.mul(r, s), level)?;
                let lhs = mat_mul(mr, rep.mat(s)?)?;
                if &lhs != rep.mat(&prod_key)? {
                    return Err(Error::Validation(format!(
                        "not a homomorphism at ({}, {})",
                        group.format_elem(r),
                        group.format_elem(s)
                    )));
                }
            }
        }
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> Level {
        self.level
    }

    fn mat(&self, key: &GElem) -> Result<&Mat> {
        self.mats.get(key).ok_or_else(|| Error::Validation("missing coset in representation table".into()))
    }
}

impl BSFunction {
    /// Pull back a table on H_0/H_n to a level-n function supported in H_0.
    pub fn from_quotient_table(group: &Group, n: Level, table: Vec<(GElem, CycScalar)>) -> Result<Self> {
        for (x, _) in &table {
            group.validate_elem(x)?;
            if !group.is_in_subgroup(x, 0)? {
                return Err(Error::Element(format!(
                    "table key {} lies outside H_0",
                    group.format_elem(x)
                )));
            }
        }
        BSFunction::from_terms(group, n, table)
    }

    /// h -> rep(h H_n)_{ij} as a level-n function supported in H_0.
    pub fn matrix_coefficient(group: &Group, rep: &QuotientRep, i: usize, j: usize) -> Result<Self> {
        if i >= rep.dim || j >= rep.dim {
            return Err(Error::Usage(format!("matrix coefficient ({i},{j}) outside dimension {}", rep.dim)));
        }
        let mut terms = Vec::new();
        for (key, m) in &rep.mats {
            terms.push((key.clone(), m[i][j].clone()));
        }
        BSFunction::from_terms(group, rep.level, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupModel;

    #[test]
    fn sign_character_of_z2_quotient() {
        // the nontrivial character of Z_2/2Z_2 has matrix coefficient
        // chi_{2Z_2} - chi_{1+2Z_2}; oracle: evaluate the pullback on both
        // cosets
        let g = GroupModel::parse("zp:2").unwrap();
        let zero = g.parse_elem("0").unwrap();
        let one = g.parse_elem("1").unwrap();
        let rep = QuotientRep::new(
            &g,
            1,
            vec![
                (zero.clone(), vec![vec![CycScalar::one()]]),
                (one.clone(), vec![vec![CycScalar::from_int(-1)]]),
            ],
        )
        .unwrap();
        let f = BSFunction::matrix_coefficient(&g, &rep, 0, 0).unwrap();
        assert_eq!(f.eval(&zero).unwrap(), CycScalar::one());
        assert_eq!(f.eval(&one).unwrap(), CycScalar::from_int(-1));
        assert_eq!(f.eval(&g.parse_elem("3").unwrap()).unwrap(), CycScalar::from_int(-1));
        let expect = BSFunction::indicator(&g, &zero, 1)
            .unwrap()
            .sub(&BSFunction::indicator(&g, &one, 1).unwrap())
            .unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn invalid_reps_are_rejected() {
        let g = GroupModel::parse("zp:2").unwrap();
        let zero = g.parse_elem("0").unwrap();
        let one = g.parse_elem("1").unwrap();
        // not a homomorphism: sends the generator to 2 (also not unitary)
        let bad = QuotientRep::new(
            &g,
            1,
            vec![
                (zero.clone(), vec![vec![CycScalar::one()]]),
                (one.clone(), vec![vec![CycScalar::from_int(2)]]),
            ],
        );
        assert!(bad.is_err());
        // missing coset
        let missing = QuotientRep::new(&g, 1, vec![(zero, vec![vec![CycScalar::one()]])]);
        assert!(missing.is_err());
    }

    #[test]
    fn constant_quotient_table_coarsens() {
        let g = GroupModel::parse("zp:3").unwrap();
        let table: Vec<(GElem, CycScalar)> = (0..3)
            .map(|t| (g.parse_elem(&t.to_string()).unwrap(), CycScalar::one()))
            .collect();
        let f = BSFunction::from_quotient_table(&g, 1, table).unwrap();
        assert_eq!(f, BSFunction::from_subgroup(&g, 0).unwrap());
        assert_eq!(f.level(), 0);
    }

    #[test]
    fn fourth_root_character_of_z2_mod_4() {
        // a genuine character of Z_2/4Z_2 = Z/4 through zeta_4
        let g = GroupModel::parse("zp:2").unwrap();
        let i = CycScalar::root_of_unity(4, 1).unwrap();
        let entries: Vec<(GElem, Mat)> = (0..4)
            .map(|t| {
                (
                    g.parse_elem(&t.to_string()).unwrap(),
                    vec![vec![i.pow(t as u32).unwrap()]],
                )
            })
            .collect();
        let rep = QuotientRep::new(&g, 2, entries).unwrap();
        let f = BSFunction::matrix_coefficient(&g, &rep, 0, 0).unwrap();
        assert_eq!(f.eval(&g.parse_elem("3").unwrap()).unwrap(), i.pow(3).unwrap());
        assert_eq!(f.level(), 2);
        assert_eq!(f.term_count(), 4);
    }
}
