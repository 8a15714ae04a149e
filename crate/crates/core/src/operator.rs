//! Exact finite-dimensional truncations of L^2(G): matrices of convolution
//! operators and multiplication operators over a window of level-n cosets,
//! exact rank and commutators.
//!
//! Windows are unions of level-n cosets of a single level, so the Gram
//! matrix is a scalar multiple of the identity and adjoints are plain
//! conjugate transposes. When an operator image escapes the window the
//! exact mode refuses (naming the missing cosets) instead of silently
//! truncating; the compressed mode computes P_K a P_K and reports the
//! leakage.

use std::collections::BTreeSet;

use crate::convalg::symbol_convolve;
use crate::error::{Error, Result};
use crate::group::{ensure_same_group, GElem, Group, Level};
use crate::linalg;
use crate::scalar::CycScalar;
use crate::schwartz::BSFunction;

/// A finite window: pairwise disjoint level-n cosets with basis the
/// indicator functions of those cosets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    group: Group,
    level: Level,
    reps: Vec<GElem>,
}

impl Truncation {
    pub fn new(group: &Group, level: Level, reps: Vec<GElem>) -> Result<Self> {
        group.check_level(level)?;
        let mut seen = BTreeSet::new();
        let mut canon = Vec::with_capacity(reps.len());
        for r in reps {
            group.validate_elem(&r)?;
            let c = group.canonical_rep(&r, level)?;
            if !seen.insert(c.clone()) {
                return Err(Error::Validation(format!(
                    "window cosets are not disjoint at {}",
                    group.format_elem(&c)
                )));
            }
            canon.push(c);
        }
        if canon.is_empty() {
            return Err(Error::Validation("empty truncation window".into()));
        }
        Ok(Truncation { group: group.clone(), level, reps: canon })
    }

    /// The window of all level-n cosets inside H_m (a ball window).
    pub fn ball(group: &Group, m: Level, n: Level) -> Result<Self> {
        Self::new(group, n, group.coset_reps(m, n)?)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[GElem] {
        &self.reps
    }

    fn position(&self, key: &GElem) -> Option<usize> {
        self.reps.iter().position(|r| r == key)
    }

    /// Coordinates of a window-supported function in the indicator basis.
    pub fn coords(&self, f: &BSFunction) -> Result<Vec<CycScalar>> {
        ensure_same_group(&self.group, f.group())?;
        if f.level() > self.level {
            return Err(Error::Validation(format!(
                "function at level {} is finer than the window level {}",
                f.level(),
                self.level
            )));
        }
        let fr = f.refine_to(self.level)?;
        let mut v = vec![CycScalar::zero(); self.dim()];
        for (k, c) in fr.terms() {
            match self.position(k) {
                Some(i) => v[i] = c.clone(),
                None => {
                    return Err(Error::Leakage(self.group.format_elem(k)));
                }
            }
        }
        Ok(v)
    }
}

/// Dense exact matrix between truncation bases, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<CycScalar>,
}

impl TruncMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        TruncMatrix { rows, cols, entries: vec![CycScalar::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycScalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &TruncMatrix) -> Result<TruncMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = TruncMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a.mul(other.get(k, j))?;
                    let v = out.get(i, j).add(&add)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncMatrix) -> Result<TruncMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape("matrix subtraction shape mismatch".into()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = out.get(i, j).sub(other.get(i, j))?;
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = TruncMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conjugate());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// First nonzero entry, if any: (row, col, value).
    pub fn first_nonzero(&self) -> Option<(usize, usize, CycScalar)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_zero() {
                    return Some((i, j, self.get(i, j).clone()));
                }
            }
        }
        None
    }

    /// Rank over the cyclotomic field, by fraction-free elimination.
    pub fn exact_rank(&self) -> usize {
        linalg::exact_rank(self.rows, self.cols, &self.entries)
    }

    pub fn apply(&self, v: &[CycScalar]) -> Result<Vec<CycScalar>> {
        if v.len() != self.cols {
            return Err(Error::Shape("vector length mismatch".into()));
        }
        let mut out = vec![CycScalar::zero(); self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            for j in 0..self.cols {
                *slot = slot.add(&self.get(i, j).mul(&v[j])?)?;
            }
        }
        Ok(out)
    }
}

/// The diagonal matrix of the multiplication operator by g on the window.
/// g must be constant on the window's cosets (refine the truncation first
/// if it is not).
pub fn matrix_of_mult(g: &BSFunction, t: &Truncation) -> Result<TruncMatrix> {
    ensure_same_group(t.group(), g.group())?;
    if g.level() > t.level {
        return Err(Error::Validation(format!(
            "multiplier at level {} is not constant on level-{} window cosets, refine the truncation",
            g.level(),
            t.level
        )));
    }
    let mut out = TruncMatrix::zeros(t.dim(), t.dim());
    for (i, r) in t.reps().iter().enumerate() {
        out.set(i, i, g.eval(r)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvMode {
    /// The matrix represents the operator exactly on the window; any image
    /// coset outside the window is an error naming the missing cosets.
    Exact,
    /// The compression P_K L_f P_K: image cosets outside the window are
    /// dropped and reported.
    Compressed,
}

/// The matrix of the convolution operator by f on the window: column y is
/// the coefficient vector of f * chi_{y H_n}. Returns the matrix together
/// with the cosets that leaked out of the window (empty in exact mode).
pub fn matrix_of_conv(
    f: &BSFunction,
    t: &Truncation,
    mode: ConvMode,
) -> Result<(TruncMatrix, Vec<GElem>)> {
    ensure_same_group(t.group(), f.group())?;
    let group = t.group().clone();
    let mut out = TruncMatrix::zeros(t.dim(), t.dim());
    let mut leaked: BTreeSet<GElem> = BTreeSet::new();
    for (j, y) in t.reps().iter().enumerate() {
        let basis = BSFunction::indicator(&group, y, t.level)?;
        let image = symbol_convolve(f, &basis)?;
        if image.is_zero() {
            continue;
        }
        if image.level() > t.level {
            return Err(Error::Validation(format!(
                "convolution image at level {} is finer than the window level {}",
                image.level(),
                t.level
            )));
        }
        let refined = image.refine_to(t.level)?;
        for (k, c) in refined.terms() {
            match t.position(k) {
                Some(i) => out.set(i, j, c.clone()),
                None => {
                    leaked.insert(k.clone());
                }
            }
        }
    }
    let leaked: Vec<GElem> = leaked.into_iter().collect();
    if mode == ConvMode::Exact && !leaked.is_empty() {
        let names: Vec<String> = leaked.iter().map(|k| group.format_elem(k)).collect();
        return Err(Error::Leakage(names.join(", ")));
    }
    Ok((out, leaked))
}

/// Exact commutator test: ab - ba = 0, with a witness entry when nonzero.
pub fn commutator_is_zero(
    a: &TruncMatrix,
    b: &TruncMatrix,
) -> Result<(bool, Option<(usize, usize, CycScalar)>)> {
    let c = a.mul(b)?.sub(&b.mul(a)?)?;
    let witness = c.first_nonzero();
    Ok((witness.is_none(), witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupModel;

    fn chi(g: &Group, lit: &str, n: Level) -> BSFunction {
        BSFunction::indicator(g, &g.parse_elem(lit).unwrap(), n).unwrap()
    }

    #[test]
    fn mult_matrix_is_diagonal() {
        let g = GroupModel::parse("qp:2").unwrap();
        let t = Truncation::ball(&g, -1, 0).unwrap(); // cosets of Z_2 in 2^{-1}Z_2
        let m = matrix_of_mult(&chi(&g, "0", 0), &t).unwrap();
        assert_eq!(m.get(0, 0), &CycScalar::one());
        assert_eq!(m.get(1, 1), &CycScalar::zero());
        // idempotent symbol gives an idempotent matrix
        assert_eq!(m.mul(&m).unwrap(), m);
        // multiplicativity of diagonal matrices
        let a = chi(&g, "0", 0);
        let b = chi(&g, "1/2", 0);
        let lhs = matrix_of_mult(&a.mul(&b).unwrap(), &t).unwrap();
        let rhs = matrix_of_mult(&a, &t).unwrap().mul(&matrix_of_mult(&b, &t).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conv_matrix_columns_match_symbol_convolution() {
        let g = GroupModel::parse("qp:2").unwrap();
        let t = Truncation::ball(&g, -1, 1).unwrap();
        let f = chi(&g, "0", 1);
        let (m, leaked) = matrix_of_conv(&f, &t, ConvMode::Exact).unwrap();
        assert!(leaked.is_empty());
        // oracle: apply to each basis vector and compare against the symbol
        for (j, y) in t.reps().iter().enumerate() {
            let image = symbol_convolve(&f, &chi(&g, &g.format_elem(y), 1)).unwrap();
            let coords = t.coords(&image).unwrap();
            for i in 0..t.dim() {
                assert_eq!(m.get(i, j), &coords[i]);
            }
        }
        let (z, _) = matrix_of_conv(&BSFunction::zero(&g), &t, ConvMode::Exact).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn product_law_on_leakage_free_windows() {
        let g = GroupModel::parse("qp:2").unwrap();
        let t = Truncation::ball(&g, -2, 1).unwrap();
        let f = chi(&g, "0", 1);
        let h = chi(&g, "1/2", 1);
        let (mf, _) = matrix_of_conv(&f, &t, ConvMode::Exact).unwrap();
        let (mh, _) = matrix_of_conv(&h, &t, ConvMode::Exact).unwrap();
        let fh = symbol_convolve(&f, &h).unwrap();
        let (mfh, _) = matrix_of_conv(&fh, &t, ConvMode::Exact).unwrap();
        assert_eq!(mf.mul(&mh).unwrap(), mfh);
    }

    #[test]
    fn leakage_is_detected_not_truncated() {
        let g = GroupModel::parse("qp:2").unwrap();
        // window = Z_2 only, convolving by chi_{2^{-1}Z_2} spreads outside
        let t = Truncation::ball(&g, 0, 1).unwrap();
        let f = chi(&g, "0", -1);
        match matrix_of_conv(&f, &t, ConvMode::Exact) {
            Err(Error::Leakage(msg)) => assert!(msg.contains("1/2") || msg.contains("3/2")),
            other => panic!("expected leakage error, got {other:?}"),
        }
        let (compressed, leaked) = matrix_of_conv(&f, &t, ConvMode::Compressed).unwrap();
        assert!(!leaked.is_empty());
        assert!(!compressed.is_zero());
    }

    #[test]
    fn rank_one_witness_at_growing_windows() {
        // M(chi_H) L_{chi_H} has exact rank one on every leakage-free
        // window; oracle = explicit image computation chi_H * (chi_H xi)
        let g = GroupModel::parse("qp:2").unwrap();
        for k in 1..=3 {
            let t = Truncation::ball(&g, -k, 0).unwrap();
            let h = chi(&g, "0", 0);
            let (conv, leaked) = matrix_of_conv(&h, &t, ConvMode::Exact).unwrap();
            assert!(leaked.is_empty());
            let mult = matrix_of_mult(&h, &t).unwrap();
            let prod = mult.mul(&conv).unwrap();
            assert_eq!(prod.exact_rank(), 1, "window 2^-{k}");
            for (j, y) in t.reps().iter().enumerate() {
                let xi = chi(&g, &g.format_elem(y), 0);
                let image = symbol_convolve(&h, &xi).unwrap().mul(&h).unwrap();
                let coords = t.coords(&image).unwrap();
                for i in 0..t.dim() {
                    assert_eq!(prod.get(i, j), &coords[i], "col {j} row {i}");
                }
            }
        }
    }

    #[test]
    fn commutator_witnesses() {
        let g = GroupModel::parse("qp:2").unwrap();
        let t = Truncation::ball(&g, -2, 0).unwrap();
        let h = chi(&g, "0", 0);
        let (conv, _) = matrix_of_conv(&h, &t, ConvMode::Exact).unwrap();
        let mult = matrix_of_mult(&h, &t).unwrap();
        let (ok, w) = commutator_is_zero(&conv, &mult).unwrap();
        assert!(ok && w.is_none());
        // translated convolution symbol fails to commute
        let (conv2, _) = matrix_of_conv(&chi(&g, "1/2", 0), &t, ConvMode::Exact).unwrap();
        let (ok, w) = commutator_is_zero(&conv2, &mult).unwrap();
        assert!(!ok);
        assert!(w.is_some());
        // [a, a] = 0
        let (ok, _) = commutator_is_zero(&conv, &conv).unwrap();
        assert!(ok);
    }

    #[test]
    fn adjoint_law_on_symmetric_windows() {
        // conj-transpose of the convolution matrix equals the matrix of the
        // star symbol, on unimodular groups and symmetric windows
        let g = GroupModel::parse("qp:3").unwrap();
        let t = Truncation::ball(&g, -1, 1).unwrap();
        let f = chi(&g, "1/3", 0).scale(&CycScalar::root_of_unity(4, 1).unwrap()).unwrap();
        let a = crate::convalg::ConvElement::from_symbol(f.clone());
        let star_symbol = a.conv_star().unwrap().symbol().clone();
        let (m, leaked) = matrix_of_conv(&f, &t, ConvMode::Exact).unwrap();
        assert!(leaked.is_empty());
        let (ms, _) = matrix_of_conv(&star_symbol, &t, ConvMode::Exact).unwrap();
        assert_eq!(m.conj_transpose(), ms);
    }

    #[test]
    fn rank_stabilizes_once_the_window_holds_the_supports() {
        let g = GroupModel::parse("qp:2").unwrap();
        let f = chi(&g, "1/2", 1);
        let h = chi(&g, "0", 1);
        let mut ranks = Vec::new();
        for k in 1..=3 {
            let t = Truncation::ball(&g, -k, 1).unwrap();
            let (conv, _) = matrix_of_conv(&f, &t, ConvMode::Exact).unwrap();
            let mult = matrix_of_mult(&h, &t).unwrap();
            ranks.push(mult.mul(&conv).unwrap().exact_rank());
        }
        assert_eq!(ranks[0], ranks[1]);
        assert_eq!(ranks[1], ranks[2]);
    }
}
