//! Dense polynomial helpers over BigInt / BigRational, little-endian
//! coefficient order. Only what cyclotomic reduction needs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) fn trim_rat(v: &mut Vec<BigRational>) {
    while let Some(last) = v.last() {
        if last.is_zero() {
            v.pop();
        } else {
            break;
        }
    }
}

fn trim_int(v: &mut Vec<BigInt>) {
    while let Some(last) = v.last() {
        if last.is_zero() {
            v.pop();
        } else {
            break;
        }
    }
}

/// x^n - 1 over the integers.
pub(crate) fn x_pow_minus_one(n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n + 1];
    v[0] = BigInt::from(-1);
    v[n] = BigInt::one();
    v
}

/// Exact division of integer polynomials; `den` must be monic and divide
/// `num` exactly. Panics otherwise (internal use on cyclotomic factors only).
pub(crate) fn int_poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    trim_int(&mut rem);
    let mut den = den.to_vec();
    trim_int(&mut den);
    assert!(!den.is_empty() && den.last().unwrap().is_one(), "divisor must be monic");
    let dd = den.len() - 1;
    if rem.len() < den.len() {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    while rem.len() > dd {
        let d = rem.len() - 1;
        let c = rem[d].clone();
        if !c.is_zero() {
            let shift = d - dd;
            quot[shift] = c.clone();
            for (i, dc) in den.iter().enumerate() {
                let t = &c * dc;
                rem[shift + i] -= t;
            }
        }
        rem.pop();
        trim_int(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// Reduce a rational polynomial modulo a monic integer polynomial, in place.
pub(crate) fn reduce_mod_monic(a: &mut Vec<BigRational>, m: &[BigInt]) {
    let dm = m.len() - 1;
    debug_assert!(m.last().unwrap().is_one());
    while a.len() > dm {
        let d = a.len() - 1;
        let c = a[d].clone();
        if !c.is_zero() {
            let shift = d - dm;
            for (i, mc) in m.iter().enumerate().take(dm) {
                let t = &c * BigRational::from(mc.clone());
                a[shift + i] -= t;
            }
        }
        a.pop();
    }
    trim_rat(a);
}

pub(crate) fn rat_poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            out[i + j] += ca * cb;
        }
    }
    trim_rat(&mut out);
    out
}

/// Long division over Q[x]: returns (quotient, remainder).
fn rat_poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    trim_rat(&mut rem);
    let mut b = b.to_vec();
    trim_rat(&mut b);
    assert!(!b.is_empty(), "division by zero polynomial");
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() > db {
        let d = rem.len() - 1;
        let c = &rem[d] / &lead;
        if !c.is_zero() {
            let shift = d - db;
            quot[shift] = c.clone();
            for (i, bc) in b.iter().enumerate().take(db) {
                let t = &c * bc;
                rem[shift + i] -= t;
            }
        }
        rem.pop();
        trim_rat(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    trim_rat(&mut quot);
    (quot, rem)
}

/// Inverse of `f` modulo the monic integer polynomial `m`, when coprime.
/// Extended Euclid over Q[x]; `m` is irreducible in our use so any nonzero
/// reduced `f` is invertible.
pub(crate) fn rat_poly_inverse_mod(f: &[BigRational], m: &[BigInt]) -> Option<Vec<BigRational>> {
    let m_rat: Vec<BigRational> = m.iter().map(|c| BigRational::from(c.clone())).collect();
    let mut r0 = m_rat.clone();
    let mut r1 = f.to_vec();
    trim_rat(&mut r1);
    if r1.is_empty() {
        return None;
    }
    // invariants: r_i = s_i*m + t_i*f; only t is tracked
    let mut t0: Vec<BigRational> = vec![];
    let mut t1: Vec<BigRational> = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = rat_poly_divmod(&r0, &r1);
        let mut t2 = t0.clone();
        let qt = rat_poly_mul(&q, &t1);
        if t2.len() < qt.len() {
            t2.resize(qt.len(), BigRational::zero());
        }
        for (i, c) in qt.into_iter().enumerate() {
            t2[i] -= c;
        }
        trim_rat(&mut t2);
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t2;
    }
    // r0 is the gcd; must be a nonzero constant
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].clone();
    let mut inv: Vec<BigRational> = t0.into_iter().map(|t| t / &c).collect();
    reduce_mod_monic(&mut inv, m);
    Some(inv)
}
