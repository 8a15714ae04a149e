//! The dual convolution algebra: elements are operators acting on L^2(G) by
//! left convolution against a compactly supported locally constant symbol.
//! Everything is computed exactly at symbol level; operator facts are
//! delegated to the truncation module.
//!
//! With symbol f the element represents the integral of f(x) times left
//! translation by x. The product is convolution of symbols, the involution
//! carries the modular correction, and the dual coproduct decomposes a
//! two-variable symbol into finitely many tensor factors.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::group::{ensure_same_group, GElem, Group, Level, Side};
use crate::scalar::CycScalar;
use crate::schwartz::{tensor_support, BSFunction, TensorDecomposition};

/// An element of the convolution algebra, wrapped so that pointwise and
/// convolution products cannot be confused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvElement {
    symbol: BSFunction,
}

/// A finite decomposition sum L_{b_i} (x) L_{c_i} of a two-variable symbol.
#[derive(Clone, Debug)]
pub struct DualDecomposition {
    pairs: Vec<(ConvElement, ConvElement)>,
}

impl DualDecomposition {
    pub fn pairs(&self) -> &[(ConvElement, ConvElement)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The underlying tensor of symbols, for exact comparisons.
    pub fn symbol_tensor(&self, group: &Group) -> Result<TensorDecomposition> {
        TensorDecomposition::new(
            group,
            self.pairs.iter().map(|(a, b)| (a.symbol.clone(), b.symbol.clone())).collect(),
        )
    }
}

/// Exact convolution of symbols: (f * g)(z) = integral of f(y) g(y^{-1} z).
/// Refine f to a level m at which g is left-H_m-invariant; then
/// f * g = sum_j c_j mu(H_m) (x_j . g).
pub fn symbol_convolve(f: &BSFunction, g: &BSFunction) -> Result<BSFunction> {
    ensure_same_group(f.group(), g.group())?;
    let group = f.group().clone();
    if f.is_zero() || g.is_zero() {
        return Ok(BSFunction::zero(&group));
    }
    let m = f.level().max(crate::schwartz::left_invariance_level(g)?);
    let mu = group.measure(m)?;
    let fr = f.refine_to(m)?;
    let mut acc = BSFunction::zero(&group);
    for (x, c) in fr.terms() {
        let t = g.translate(x, Side::Left)?.scale(&c.scale(&mu))?;
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

impl ConvElement {
    pub fn from_symbol(symbol: BSFunction) -> Self {
        ConvElement { symbol }
    }

    pub fn zero(group: &Group) -> Self {
        ConvElement { symbol: BSFunction::zero(group) }
    }

    pub fn symbol(&self) -> &BSFunction {
        &self.symbol
    }

    pub fn group(&self) -> &Group {
        self.symbol.group()
    }

    pub fn is_zero(&self) -> bool {
        self.symbol.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(ConvElement { symbol: self.symbol.add(&other.symbol)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(ConvElement { symbol: self.symbol.sub(&other.symbol)? })
    }

    pub fn scale(&self, c: &CycScalar) -> Result<Self> {
        Ok(ConvElement { symbol: self.symbol.scale(c)? })
    }

    /// Convolution product.
    pub fn conv_mul(&self, other: &Self) -> Result<Self> {
        Ok(ConvElement { symbol: symbol_convolve(&self.symbol, &other.symbol)? })
    }

    /// The involution: symbol x -> conj(f(x^{-1})) Delta(x^{-1}).
    pub fn conv_star(&self) -> Result<Self> {
        let g = self.group().clone();
        let reflected = self.symbol.star().antipode()?;
        let mut terms = Vec::new();
        for (k, c) in reflected.terms() {
            let w = g.modular(&g.inv(k));
            terms.push((k.clone(), c.scale(&w)));
        }
        Ok(ConvElement { symbol: BSFunction::from_terms(&g, reflected.level(), terms)? })
    }

    /// Dual antipode: symbol x -> Delta(x^{-1}) f(x^{-1}); an involution.
    pub fn dual_antipode(&self) -> Result<Self> {
        let g = self.group().clone();
        let reflected = self.symbol.antipode()?;
        let mut terms = Vec::new();
        for (k, c) in reflected.terms() {
            let w = g.modular(&g.inv(k));
            terms.push((k.clone(), c.scale(&w)));
        }
        Ok(ConvElement { symbol: BSFunction::from_terms(&g, reflected.level(), terms)? })
    }

    /// Dual counit: the left Haar integral of the symbol.
    pub fn dual_counit(&self) -> Result<CycScalar> {
        self.symbol.integral(Side::Left)
    }

    /// The Haar weight: evaluation of the symbol at the identity.
    pub fn haar_weight(&self) -> CycScalar {
        self.symbol.counit()
    }

    /// Left multiplication by the group element x (translation of the symbol).
    pub fn translate_left(&self, x: &GElem) -> Result<Self> {
        Ok(ConvElement { symbol: self.symbol.translate(x, Side::Left)? })
    }

    /// Restriction of the symbol to H_n (the conditional expectation).
    pub fn restrict(&self, n: Level) -> Result<Self> {
        let g = self.group().clone();
        g.check_level(n)?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        let fine = self.symbol.level().max(n);
        let fr = self.symbol.refine_to(fine)?;
        let mut terms = Vec::new();
        for (k, c) in fr.terms() {
            if g.is_in_subgroup(k, n)? {
                terms.push((k.clone(), c.clone()));
            }
        }
        Ok(ConvElement { symbol: BSFunction::from_terms(&g, fine, terms)? })
    }
}

/// The projection onto functions left-invariant under H_n: symbol
/// mu(H_n)^{-1} chi_{H_n}, an idempotent self-adjoint group-like element.
/// The explicit normalization realizes the unit-mass Haar measure on H_n at
/// every level.
pub fn projection_ph(group: &Group, n: Level) -> Result<ConvElement> {
    let chi = BSFunction::from_subgroup(group, n)?;
    let inv_mu = BigRational::from_integer(1.into()) / group.measure(n)?;
    Ok(ConvElement { symbol: chi.scale_rat(&inv_mu) })
}

/// Dual coproduct cushioned on the chosen side.
///
/// Right: decomposes the two-variable symbol F(x, z) = f(x) g(x^{-1} z)
/// (the symbol of Delta(a)(1 (x) b)): refine f to a level where g is
/// left-invariant and pair each coset of f with the left translate of g.
///
/// Left: decomposes F(u, y) = f(u y^{-1}) g(y) Delta(y^{-1}) (the symbol of
/// (a (x) 1) Delta(b)): decompose g and pair with modular-weighted right
/// translates of f.
pub fn dual_coproduct(a: &ConvElement, b: &ConvElement, side: Side) -> Result<DualDecomposition> {
    ensure_same_group(a.group(), b.group())?;
    let group = a.group().clone();
    if a.is_zero() || b.is_zero() {
        return Ok(DualDecomposition { pairs: Vec::new() });
    }
    let f = &a.symbol;
    let g = &b.symbol;
    let mut pairs = Vec::new();
    match side {
        Side::Right => {
            let m = f.level().max(crate::schwartz::left_invariance_level(g)?);
            let fr = f.refine_to(m)?;
            for (x, c) in fr.terms() {
                let left = BSFunction::indicator(&group, x, m)?.scale(c)?;
                let right = g.translate(x, Side::Left)?;
                pairs.push((ConvElement::from_symbol(left), ConvElement::from_symbol(right)));
            }
        }
        Side::Left => {
            // f must be right-invariant under y_k H_m y_k^{-1}
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
                let w = group.modular(&group.inv(y));
                let left = f.translate(&group.inv(y), Side::Right)?.scale(&d.scale(&w))?;
                let right = BSFunction::indicator(&group, y, m)?;
                pairs.push((ConvElement::from_symbol(left), ConvElement::from_symbol(right)));
            }
        }
    }
    let pairs = pairs.into_iter().filter(|(x, y)| !x.is_zero() && !y.is_zero()).collect();
    Ok(DualDecomposition { pairs })
}

/// The vector state <a chi_{H_n}, chi_{H_n}>, computed exactly by coset sums.
pub fn vector_state_tau(a: &ConvElement, n: Level) -> Result<CycScalar> {
    let group = a.group().clone();
    group.check_level(n)?;
    let chi = BSFunction::from_subgroup(&group, n)?;
    let image = symbol_convolve(&a.symbol, &chi)?;
    ConvElement::from_symbol(image).restrict(n)?.symbol.integral(Side::Left)
}

/// Conditional expectation onto the subalgebra supported in H_n: at symbol
/// level, restriction to H_n. Idempotent, tau-preserving, an H_n-bimodule
/// projection.
pub fn cond_expectation(a: &ConvElement, n: Level) -> Result<ConvElement> {
    a.restrict(n)
}

/// Finite-support reconstruction: F = support coset labels of the symbol
/// modulo H_n, and the exact verdict of a = sum_{x in F} x E(x^{-1} a).
pub fn coset_reconstruction(a: &ConvElement, n: Level) -> Result<(Vec<GElem>, bool)> {
    let group = a.group().clone();
    group.check_level(n)?;
    let fine = a.symbol.level().max(n);
    let mut labels: std::collections::BTreeSet<GElem> = std::collections::BTreeSet::new();
    for r in a.symbol.refined_support(fine)? {
        labels.insert(group.canonical_rep(&r, n)?);
    }
    let mut rebuilt = ConvElement::zero(&group);
    for x in &labels {
        let shifted = a.translate_left(&group.inv(x))?;
        let piece = cond_expectation(&shifted, n)?.translate_left(x)?;
        rebuilt = rebuilt.add(&piece)?;
    }
    // off-support labels contribute nothing: E(x^{-1} a) = 0 for x not in FH
    let verdict = rebuilt == *a;
    Ok((labels.into_iter().collect(), verdict))
}

/// Both finite decompositions against the subgroup projection: of
/// Delta(a)(1 (x) p_H) and of (a (x) 1) Delta(p_H).
pub fn dual_membership_certificate(
    a: &ConvElement,
    n: Level,
) -> Result<(DualDecomposition, DualDecomposition)> {
    let p = projection_ph(a.group(), n)?;
    Ok((dual_coproduct(a, &p, Side::Right)?, dual_coproduct(a, &p, Side::Left)?))
}

/// Window on which the two-variable symbol f(x) g(x^{-1} z) of the right
/// dual coproduct is supported: x over supp(f), z over supp(f)*supp(g).
pub fn dual_right_window(a: &ConvElement, b: &ConvElement) -> Result<((Level, Vec<GElem>), (Level, Vec<GElem>))> {
    let f = &a.symbol;
    let g = &b.symbol;
    let wx = (f.level(), f.support_reps().cloned().collect::<Vec<_>>());
    let wz = tensor_support(f, g)?;
    Ok((wx, wz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupModel;

    fn chi(g: &Group, lit: &str, n: Level) -> BSFunction {
        BSFunction::indicator(g, &g.parse_elem(lit).unwrap(), n).unwrap()
    }

    fn l(g: &Group, lit: &str, n: Level) -> ConvElement {
        ConvElement::from_symbol(chi(g, lit, n))
    }

    #[test]
    fn subgroup_projection_is_idempotent() {
        // mu(Z_2) = 1 so L_{chi_{Z_2}} is its own convolution square
        let g = GroupModel::parse("qp:2").unwrap();
        let p = l(&g, "0", 0);
        assert_eq!(p.conv_mul(&p).unwrap(), p);
        // and at level 2 with the explicit normalization
        let p2 = projection_ph(&g, 2).unwrap();
        assert_eq!(p2.conv_mul(&p2).unwrap(), p2);
        assert_eq!(p2.conv_star().unwrap(), p2);
        assert_eq!(
            p2.symbol(),
            &chi(&g, "0", 2).scale(&CycScalar::from_int(4)).unwrap()
        );
    }

    #[test]
    fn conv_mul_of_cosets_on_qp3() {
        // oracle: the double coset sum over a Z/9 window gives
        // (1/3) chi_{a+b+3Z_3}
        let g = GroupModel::parse("qp:3").unwrap();
        let a = l(&g, "1", 1);
        let b = l(&g, "2", 1);
        let want = chi(&g, "0", 1)
            .translate(&g.parse_elem("3").unwrap(), Side::Left)
            .unwrap()
            .scale(&CycScalar::ratio(1, 3))
            .unwrap();
        assert_eq!(a.conv_mul(&b).unwrap().symbol(), &want);
        // brute-force double sum oracle at level 2 over the support window
        let prod = a.conv_mul(&b).unwrap();
        let mu2 = CycScalar::from_rational(g.measure(2).unwrap());
        for z in g.coset_reps(0, 2).unwrap() {
            let mut acc = CycScalar::zero();
            for y in g.coset_reps(0, 2).unwrap() {
                let fy = a.symbol().eval(&y).unwrap();
                let gz = b.symbol().eval(&g.mul(&g.inv(&y), &z)).unwrap();
                acc = acc.add(&fy.mul(&gz).unwrap().mul(&mu2).unwrap()).unwrap();
            }
            assert_eq!(prod.symbol().eval(&z).unwrap(), acc);
        }
    }

    #[test]
    fn conv_mul_with_zero() {
        let g = GroupModel::parse("qp:2").unwrap();
        let a = l(&g, "1/2", 1);
        let z = ConvElement::zero(&g);
        assert!(a.conv_mul(&z).unwrap().is_zero());
    }

    #[test]
    fn conv_star_involution_and_antimultiplicativity() {
        let g = GroupModel::parse("shift:2").unwrap();
        let a = ConvElement::from_symbol(
            chi(&g, "(1, 1/2)", 1).scale(&CycScalar::root_of_unity(4, 1).unwrap()).unwrap(),
        );
        let b = ConvElement::from_symbol(chi(&g, "(-1, 0)", 0).add(&chi(&g, "(0, 1)", 1)).unwrap());
        assert_eq!(a.conv_star().unwrap().conv_star().unwrap(), a);
        let lhs = a.conv_mul(&b).unwrap().conv_star().unwrap();
        let rhs = b.conv_star().unwrap().conv_mul(&a.conv_star().unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conv_star_example_on_qp2() {
        // star of L_{zeta_4 chi_{1/2+Z_2}} is L_{-zeta_4 chi_{-1/2+Z_2}}
        let g = GroupModel::parse("qp:2").unwrap();
        let i = CycScalar::root_of_unity(4, 1).unwrap();
        let a = ConvElement::from_symbol(chi(&g, "1/2", 0).scale(&i).unwrap());
        let want = ConvElement::from_symbol(chi(&g, "-1/2", 0).scale(&i.neg()).unwrap());
        assert_eq!(a.conv_star().unwrap(), want);
    }

    #[test]
    fn dual_antipode_formula() {
        let g = GroupModel::parse("qp:3").unwrap();
        let a = l(&g, "1", 1);
        assert_eq!(a.dual_antipode().unwrap(), l(&g, "-1", 1));
        let p = l(&g, "0", 0);
        assert_eq!(p.dual_antipode().unwrap(), p);
        // S^2 = id on shift, where the modular factor matters
        let s = GroupModel::parse("shift:2").unwrap();
        let b = ConvElement::from_symbol(chi(&s, "(1, 0)", 1));
        assert_eq!(b.dual_antipode().unwrap().dual_antipode().unwrap(), b);
        // pointwise: S(b) has symbol Delta(x^{-1}) f(x^{-1})
        let sb = b.dual_antipode().unwrap();
        for k in -2i64..=2 {
            for c in s.coset_reps(-1, 3).unwrap() {
                let y = s.mul(&s.elem_shift(k, BigRational::from_integer(0.into())).unwrap(), &c);
                let want = b
                    .symbol()
                    .eval(&s.inv(&y))
                    .unwrap()
                    .scale(&s.modular(&s.inv(&y)));
                assert_eq!(sb.symbol().eval(&y).unwrap(), want);
            }
        }
    }

    #[test]
    fn dual_counit_values() {
        let g = GroupModel::parse("qp:2").unwrap();
        assert_eq!(l(&g, "0", 1).dual_counit().unwrap(), CycScalar::ratio(1, 2));
        assert!(ConvElement::zero(&g).dual_counit().unwrap().is_zero());
    }

    #[test]
    fn haar_weight_values() {
        let g = GroupModel::parse("qp:2").unwrap();
        assert_eq!(l(&g, "0", 0).haar_weight(), CycScalar::one());
        assert!(l(&g, "1", 1).haar_weight().is_zero());
        // w(a* a) = 1/4 for a = L_{chi_{1/2+2Z_2}}
        let a = l(&g, "1/2", 2);
        let w = a.conv_star().unwrap().conv_mul(&a).unwrap().haar_weight();
        assert_eq!(w, CycScalar::ratio(1, 4));
    }

    #[test]
    fn dual_coproduct_right_on_qp2() {
        // Delta(L_{chi_{1/2+Z_2}})(1 (x) L_{chi_{Z_2}}) decomposes as
        // one pair (L_{chi_{1/2+Z_2}}, L_{chi_{-1/2+Z_2}})
        let g = GroupModel::parse("qp:2").unwrap();
        let a = l(&g, "1/2", 0);
        let b = l(&g, "0", 0);
        let t = dual_coproduct(&a, &b, Side::Right).unwrap();
        assert_eq!(t.len(), 1);
        let tensor = t.symbol_tensor(&g).unwrap();
        let expect = TensorDecomposition::singleton(&chi(&g, "1/2", 0), &chi(&g, "-1/2", 0)).unwrap();
        assert!(tensor.equals(&expect).unwrap());
        // pointwise oracle: F(x,z) = f(x) g(x^{-1} z) on a window of G x G
        let ((wlx, wx), (wlz, wz)) = dual_right_window(&a, &b).unwrap();
        let fa = a.symbol().clone();
        let gb = b.symbol().clone();
        let ok = tensor
            .equals_fn(
                |x, z| fa.eval(x)?.mul(&gb.eval(&g.mul(&g.inv(x), z))?),
                (wlx, &wx),
                (wlz, &wz),
            )
            .unwrap();
        assert!(ok);
        assert!(dual_coproduct(&ConvElement::zero(&g), &b, Side::Right).unwrap().is_empty());
    }

    #[test]
    fn ph_is_group_like_in_the_dual() {
        for d in ["qp:2", "shift:2", "finite:s3"] {
            let g = GroupModel::parse(d).unwrap();
            let (lo, hi) = g.clamp_span(-1, 2);
            for n in lo..=hi {
                let p = projection_ph(&g, n).unwrap();
                for side in [Side::Right, Side::Left] {
                    let t = dual_coproduct(&p, &p, side).unwrap();
                    assert_eq!(t.len(), 1, "{d} level {n}");
                    let (x, y) = &t.pairs()[0];
                    assert_eq!(x, &p, "{d} level {n} {side:?}");
                    assert_eq!(y, &p, "{d} level {n} {side:?}");
                }
            }
        }
    }

    #[test]
    fn tau_values() {
        let g = GroupModel::parse("qp:2").unwrap();
        // oracle: the double integral over H_0 via level-1 coset reps
        let a = l(&g, "0", 0);
        let mut byhand = CycScalar::zero();
        let mu1 = CycScalar::from_rational(g.measure(1).unwrap());
        for x in g.coset_reps(0, 1).unwrap() {
            for y in g.coset_reps(0, 1).unwrap() {
                let v = a.symbol().eval(&y).unwrap();
                let w = chi(&g, "0", 0).eval(&g.mul(&g.inv(&y), &x)).unwrap();
                byhand = byhand
                    .add(&v.mul(&w).unwrap().mul(&mu1).unwrap().mul(&mu1).unwrap())
                    .unwrap();
            }
        }
        assert_eq!(vector_state_tau(&a, 0).unwrap(), byhand);
        assert_eq!(vector_state_tau(&a, 0).unwrap(), CycScalar::one());
        assert!(vector_state_tau(&l(&g, "3/2", 0), 0).unwrap().is_zero());
        assert!(vector_state_tau(&ConvElement::zero(&g), 1).unwrap().is_zero());
        // b p_H = tau(b) p_H for symbols supported in H_n
        let b = ConvElement::from_symbol(
            chi(&g, "0", 1).add(&chi(&g, "1", 1).scale(&CycScalar::from_int(3)).unwrap()).unwrap(),
        );
        let p = projection_ph(&g, 0).unwrap();
        let lhs = b.conv_mul(&p).unwrap();
        let rhs = p.scale(&vector_state_tau(&b, 0).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conditional_expectation_is_restriction() {
        let g = GroupModel::parse("qp:2").unwrap();
        let inside = l(&g, "1", 1);
        assert_eq!(cond_expectation(&inside, 0).unwrap(), inside);
        let outside = l(&g, "1/2", 0);
        assert!(cond_expectation(&outside, 0).unwrap().is_zero());
        let p = projection_ph(&g, 0).unwrap();
        assert_eq!(cond_expectation(&p, 0).unwrap(), p);
        // oracle: E(a) = mu(H_n)^{-1} (id (x) tau)(Delta(a)(1 (x) p_H))
        let a = ConvElement::from_symbol(
            chi(&g, "1/2", 1).add(&chi(&g, "1", 1).scale(&CycScalar::root_of_unity(3, 1).unwrap()).unwrap()).unwrap(),
        );
        for n in 0..=1 {
            let p = projection_ph(&g, n).unwrap();
            let t = dual_coproduct(&a, &p, Side::Right).unwrap();
            let mut acc = ConvElement::zero(&g);
            for (x, y) in t.pairs() {
                acc = acc.add(&x.scale(&vector_state_tau(y, n).unwrap()).unwrap()).unwrap();
            }
            let inv_mu = CycScalar::from_rational(
                BigRational::from_integer(1.into()) / g.measure(n).unwrap(),
            );
            assert_eq!(acc.scale(&inv_mu).unwrap(), cond_expectation(&a, n).unwrap());
        }
    }

    #[test]
    fn reconstruction_identity() {
        let g = GroupModel::parse("qp:2").unwrap();
        let a = ConvElement::from_symbol(chi(&g, "1/2", 2).add(&chi(&g, "3", 0)).unwrap());
        let (labels, ok) = coset_reconstruction(&a, 0).unwrap();
        assert!(ok);
        let want: Vec<GElem> = vec![g.parse_elem("1/2").unwrap(), g.parse_elem("3").unwrap()]
            .into_iter()
            .map(|x| g.canonical_rep(&x, 0).unwrap())
            .collect();
        let mut want = want;
        want.sort();
        assert_eq!(labels, want);
        let (labels, ok) = coset_reconstruction(&ConvElement::zero(&g), 0).unwrap();
        assert!(ok);
        assert!(labels.is_empty());
    }

    #[test]
    fn dual_membership_lengths() {
        let g = GroupModel::parse("qp:2").unwrap();
        let a = l(&g, "1/2", 0);
        let (rt, lt) = dual_membership_certificate(&a, 0).unwrap();
        assert_eq!(rt.len(), 1);
        assert_eq!(lt.len(), 1);
        let z = ConvElement::zero(&g);
        let (rt, lt) = dual_membership_certificate(&z, 0).unwrap();
        assert!(rt.is_empty() && lt.is_empty());
    }
}
