//! Sparse tensors over an algebra, sparse multilinear maps between tensor
//! powers, and the Koszul-signed elementary operators built from the product.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;
use thiserror::Error;

use crate::algebra::{Basis, Element, GradedAlgebra};
use crate::scalar::{frac, Q};

/// Multi-index `(i₁, …, iₙ)` naming the basis tensor `t_{i₁} ⊗ … ⊗ t_{iₙ}`.
pub type Idx = SmallVec<[Basis; 8]>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("slot {i} out of range for arity {n}")]
    Slot { i: usize, n: usize },
    #[error("block bounds {0:?} are malformed")]
    Blocks((usize, usize, usize, usize)),
    #[error("odd maps cannot be tensored")]
    OddMap,
    #[error("element is not parity-homogeneous")]
    NotHomogeneous,
    #[error("{0} needs arity at least {1}")]
    TooShort(&'static str, usize),
}

pub fn idx(xs: &[Basis]) -> Idx {
    Idx::from_slice(xs)
}

pub fn concat(a: &[Basis], b: &[Basis]) -> Idx {
    let mut out = Idx::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out
}

pub(crate) fn neg_if(neg: bool) -> Q {
    if neg {
        -Q::one()
    } else {
        Q::one()
    }
}

/// All multi-indices of length `n` over `dim` letters, in lexicographic order.
pub fn basis_indices(dim: usize, n: usize) -> impl Iterator<Item = Idx> + Clone {
    let total = dim.pow(n as u32);
    (0..total).map(move |r| unrank(dim, n, r))
}

pub fn unrank(dim: usize, n: usize, mut r: usize) -> Idx {
    let mut out: Idx = SmallVec::from_elem(0, n);
    for slot in out.iter_mut().rev() {
        *slot = (r % dim) as Basis;
        r /= dim;
    }
    out
}

pub fn rank(dim: usize, x: &[Basis]) -> usize {
    x.iter().fold(0, |acc, &i| acc * dim + i as usize)
}

/// Sparse element of `A^{⊗n}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TensorVector {
    arity: usize,
    terms: BTreeMap<Idx, Q>,
}

impl TensorVector {
    pub fn zero(arity: usize) -> Self {
        TensorVector { arity, terms: BTreeMap::new() }
    }

    pub fn basis(x: &[Basis]) -> Self {
        let mut v = TensorVector::zero(x.len());
        v.terms.insert(idx(x), Q::one());
        v
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Idx, Q)>) -> Self {
        let mut v = TensorVector::zero(arity);
        for (k, c) in terms {
            v.add_term(k, c);
        }
        v
    }

    pub fn from_element(e: &Element) -> Self {
        TensorVector::from_terms(1, e.iter().map(|(a, c)| (idx(&[a]), c)))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, x: &[Basis]) -> Q {
        self.terms.get(x).copied().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Idx, &Q)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, k: Idx, c: Q) {
        debug_assert_eq!(k.len(), self.arity, "tensor arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TensorVector, s: Q) {
        if s.is_zero() {
            return;
        }
        for (k, c) in &other.terms {
            self.add_term(k.clone(), *c * s);
        }
    }

    pub fn scaled(&self, s: Q) -> TensorVector {
        let mut v = TensorVector::zero(self.arity);
        v.add_scaled(self, s);
        v
    }

    pub fn sub(&self, other: &TensorVector) -> TensorVector {
        let mut v = self.clone();
        v.add_scaled(other, -Q::one());
        v
    }

    /// Linear extension of a map given on basis tensors.
    pub fn map_linear(&self, out_arity: usize, mut f: impl FnMut(&[Basis]) -> TensorVector) -> TensorVector {
        let mut out = TensorVector::zero(out_arity);
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), *c);
        }
        out
    }

    /// `self ⊗ other` (no signs: basis tensors are just juxtaposed).
    pub fn tensor(&self, other: &TensorVector) -> TensorVector {
        let mut out = TensorVector::zero(self.arity + other.arity);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(concat(a, b), *x * *y);
            }
        }
        out
    }

    /// Keeps only the terms whose multi-index satisfies `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&[Basis]) -> bool) {
        self.terms.retain(|k, _| keep(k));
    }

    pub fn parity(&self, alg: &GradedAlgebra) -> Option<u8> {
        let mut ps = self.terms.keys().map(|k| alg.parity_of(k));
        match ps.next() {
            None => Some(0),
            Some(p) => ps.all(|x| x == p).then_some(p),
        }
    }
}

/// Linear map `A^{⊗m} → A^{⊗r} ⊗ A^{⊗s}`, stored column by column over the
/// lexicographically ranked basis of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiMap {
    dim: usize,
    in_arity: usize,
    split: (usize, usize),
    cols: Vec<TensorVector>,
}

impl MultiMap {
    pub fn zero(dim: usize, in_arity: usize, split: (usize, usize)) -> Self {
        let out = split.0 + split.1;
        MultiMap { dim, in_arity, split, cols: vec![TensorVector::zero(out); dim.pow(in_arity as u32)] }
    }

    /// Builds the map from its values on basis tensors, evaluating columns in
    /// parallel on the current rayon pool.
    pub fn from_fn<F>(dim: usize, in_arity: usize, split: (usize, usize), f: F) -> Self
    where
        F: Fn(&[Basis]) -> TensorVector + Sync,
    {
        let out = split.0 + split.1;
        let cols: Vec<TensorVector> = (0..dim.pow(in_arity as u32))
            .into_par_iter()
            .map(|r| {
                let v = f(&unrank(dim, in_arity, r));
                debug_assert_eq!(v.arity(), out);
                v
            })
            .collect();
        MultiMap { dim, in_arity, split, cols }
    }

    pub fn identity(dim: usize, n: usize) -> Self {
        MultiMap::from_fn(dim, n, (0, n), TensorVector::basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn in_arity(&self) -> usize {
        self.in_arity
    }

    pub fn out_arity(&self) -> usize {
        self.split.0 + self.split.1
    }

    pub fn split(&self) -> (usize, usize) {
        self.split
    }

    pub fn with_split(mut self, split: (usize, usize)) -> Self {
        assert_eq!(split.0 + split.1, self.out_arity());
        self.split = split;
        self
    }

    pub fn column(&self, x: &[Basis]) -> &TensorVector {
        &self.cols[rank(self.dim, x)]
    }

    /// Nonzero columns in lexicographic order of the input multi-index.
    pub fn columns(&self) -> impl Iterator<Item = (Idx, &TensorVector)> {
        let (dim, n) = (self.dim, self.in_arity);
        self.cols.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(r, c)| (unrank(dim, n, r), c))
    }

    /// `(input, output, coefficient)` triples in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Idx, Idx, Q)> + '_ {
        self.columns().flat_map(|(i, c)| c.iter().map(move |(o, v)| (i.clone(), o.clone(), *v)).collect::<Vec<_>>())
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, v: &TensorVector) -> Result<TensorVector, TensorError> {
        if v.arity() != self.in_arity {
            return Err(TensorError::Arity { expected: self.in_arity, got: v.arity() });
        }
        Ok(v.map_linear(self.out_arity(), |x| self.column(x).clone()))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &MultiMap) -> Result<MultiMap, TensorError> {
        if g.out_arity() != self.in_arity {
            return Err(TensorError::Arity { expected: self.in_arity, got: g.out_arity() });
        }
        Ok(MultiMap {
            dim: self.dim,
            in_arity: g.in_arity,
            split: self.split,
            cols: g
                .cols
                .par_iter()
                .map(|c| c.map_linear(self.out_arity(), |x| self.column(x).clone()))
                .collect(),
        })
    }

    fn check_same_shape(&self, other: &MultiMap) -> Result<(), TensorError> {
        if self.in_arity != other.in_arity {
            return Err(TensorError::Arity { expected: self.in_arity, got: other.in_arity });
        }
        if self.out_arity() != other.out_arity() {
            return Err(TensorError::Arity { expected: self.out_arity(), got: other.out_arity() });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiMap) -> Result<MultiMap, TensorError> {
        self.add_scaled(other, Q::one())
    }

    pub fn sub(&self, other: &MultiMap) -> Result<MultiMap, TensorError> {
        self.add_scaled(other, -Q::one())
    }

    pub fn add_scaled(&self, other: &MultiMap, s: Q) -> Result<MultiMap, TensorError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.cols.iter_mut().zip(&other.cols) {
            a.add_scaled(b, s);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Q) -> MultiMap {
        let mut out = self.clone();
        for c in &mut out.cols {
            *c = c.scaled(s);
        }
        out
    }

    /// Every column maps a basis tensor to tensors of the same parity.
    pub fn is_even(&self, alg: &GradedAlgebra) -> bool {
        self.columns().all(|(x, c)| {
            let p = alg.parity_of(&x);
            c.iter().all(|(k, _)| alg.parity_of(k) == p)
        })
    }

    /// `f ⊗ g`, defined for even maps only.
    pub fn tensor_product(&self, g: &MultiMap, alg: &GradedAlgebra) -> Result<MultiMap, TensorError> {
        if !self.is_even(alg) || !g.is_even(alg) {
            return Err(TensorError::OddMap);
        }
        let m = self.in_arity;
        let out = (self.out_arity(), g.out_arity());
        Ok(MultiMap::from_fn(self.dim, m + g.in_arity, out, |x| {
            self.column(&x[..m]).tensor(g.column(&x[m..]))
        }))
    }

    /// `id^{⊗k} ⊗ f`.
    pub fn pad_left_identity(&self, k: usize) -> MultiMap {
        let split = (self.split.0 + k, self.split.1);
        MultiMap::from_fn(self.dim, self.in_arity + k, split, |x| {
            TensorVector::basis(&x[..k]).tensor(self.column(&x[k..]))
        })
    }

    /// `f ⊗ id^{⊗k}`.
    pub fn pad_right_identity(&self, k: usize) -> MultiMap {
        let split = (self.split.0, self.split.1 + k);
        let m = self.in_arity;
        MultiMap::from_fn(self.dim, m + k, split, |x| self.column(&x[..m]).tensor(&TensorVector::basis(&x[m..])))
    }

    /// Zeroes every column whose input fails `keep_in` and drops output terms failing `keep_out`.
    pub fn restricted(
        &self,
        keep_in: impl Fn(&[Basis]) -> bool + Sync,
        keep_out: impl Fn(&[Basis]) -> bool + Sync,
    ) -> MultiMap {
        let (dim, n) = (self.dim, self.in_arity);
        let cols = self
            .cols
            .par_iter()
            .enumerate()
            .map(|(r, c)| {
                if !keep_in(&unrank(dim, n, r)) {
                    return TensorVector::zero(c.arity());
                }
                let mut c = c.clone();
                c.retain(&keep_out);
                c
            })
            .collect();
        MultiMap { dim, in_arity: n, split: self.split, cols }
    }
}

/// Sign of the permutation placing input slot `perm[k]` at output position
/// `k`, counting only transpositions of two odd slots.
pub fn koszul_sign(perm: &[usize], parities: &[u8]) -> i8 {
    let mut odd = 0u32;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                odd += (parities[perm[i]] & parities[perm[j]]) as u32;
            }
        }
    }
    if odd % 2 == 0 {
        1
    } else {
        -1
    }
}

fn odd_sum(alg: &GradedAlgebra, xs: &[Basis]) -> u8 {
    alg.parity_of(xs)
}

/// `𝔪_{1,i}` on a basis tensor: `a₁ aᵢ` in the first slot, slot `i` removed,
/// sign `(−1)^{|aᵢ|(|a₂|+…+|a_{i−1}|)}`. Slots are 1-based.
pub fn mult_1i_on(alg: &GradedAlgebra, i: usize, x: &[Basis]) -> TensorVector {
    let neg = alg.parity(x[i - 1]) & odd_sum(alg, &x[1..i - 1]) == 1;
    product_front(alg, x[0], x[i - 1], &x[1..i - 1], &x[i..], neg_if(neg))
}

/// `𝔪*_{i,1}` on a basis tensor: `aᵢ a₁` in the first slot, sign
/// `(−1)^{|aᵢ|(|a₁|+…+|a_{i−1}|)}`.
pub fn mult_star_i1_on(alg: &GradedAlgebra, i: usize, x: &[Basis]) -> TensorVector {
    let neg = alg.parity(x[i - 1]) & odd_sum(alg, &x[..i - 1]) == 1;
    product_front(alg, x[i - 1], x[0], &x[1..i - 1], &x[i..], neg_if(neg))
}

fn product_front(alg: &GradedAlgebra, a: Basis, b: Basis, mid: &[Basis], tail: &[Basis], s: Q) -> TensorVector {
    let n = 1 + mid.len() + tail.len();
    let mut out = TensorVector::zero(n);
    for (c, v) in alg.mul_basis(a, b) {
        let mut k = Idx::with_capacity(n);
        k.push(*c);
        k.extend_from_slice(mid);
        k.extend_from_slice(tail);
        out.add_term(k, s * *v);
    }
    out
}

/// `P_{1,i}`: moves slot `i` to the front. Returns the permuted index and
/// whether the Koszul sign is negative.
pub fn perm_1i_on(alg: &GradedAlgebra, i: usize, x: &[Basis]) -> (Idx, bool) {
    let neg = alg.parity(x[i - 1]) & odd_sum(alg, &x[..i - 1]) == 1;
    let mut k = Idx::with_capacity(x.len());
    k.push(x[i - 1]);
    k.extend_from_slice(&x[..i - 1]);
    k.extend_from_slice(&x[i..]);
    (k, neg)
}

/// `P_{i,1}`: moves the first slot to position `i`.
pub fn perm_i1_on(alg: &GradedAlgebra, i: usize, x: &[Basis]) -> (Idx, bool) {
    let neg = alg.parity(x[0]) & odd_sum(alg, &x[1..i]) == 1;
    let mut k = Idx::with_capacity(x.len());
    k.extend_from_slice(&x[1..i]);
    k.push(x[0]);
    k.extend_from_slice(&x[i..]);
    (k, neg)
}

/// Graded swap of the first `p` slots with the rest: `u ⊗ v ↦ (−1)^{|u||v|} v ⊗ u`.
pub fn block_swap_on(alg: &GradedAlgebra, p: usize, x: &[Basis]) -> (Idx, bool) {
    let (u, v) = x.split_at(p);
    (concat(v, u), odd_sum(alg, u) & odd_sum(alg, v) == 1)
}

fn check_slot(i: usize, lo: usize, n: usize) -> Result<(), TensorError> {
    if i < lo || i > n {
        Err(TensorError::Slot { i, n })
    } else {
        Ok(())
    }
}

pub fn mult_1i(alg: &GradedAlgebra, i: usize, n: usize) -> Result<MultiMap, TensorError> {
    check_slot(i, 2, n)?;
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n - 1), |x| mult_1i_on(alg, i, x)))
}

pub fn mult_star_i1(alg: &GradedAlgebra, i: usize, n: usize) -> Result<MultiMap, TensorError> {
    check_slot(i, 2, n)?;
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n - 1), |x| mult_star_i1_on(alg, i, x)))
}

fn signed_basis(k: Idx, neg: bool) -> TensorVector {
    let mut v = TensorVector::zero(k.len());
    v.add_term(k, neg_if(neg));
    v
}

pub fn perm_1i(alg: &GradedAlgebra, i: usize, n: usize) -> Result<MultiMap, TensorError> {
    check_slot(i, 1, n)?;
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n), |x| {
        let (k, neg) = perm_1i_on(alg, i, x);
        signed_basis(k, neg)
    }))
}

pub fn perm_i1(alg: &GradedAlgebra, i: usize, n: usize) -> Result<MultiMap, TensorError> {
    check_slot(i, 1, n)?;
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n), |x| {
        let (k, neg) = perm_i1_on(alg, i, x);
        signed_basis(k, neg)
    }))
}

/// `ad¹_x`: `a₀ ⊗ a₁ ⊗ … ↦ [x, a₀] ⊗ a₁ ⊗ …`.
pub fn ad_first(alg: &GradedAlgebra, x: &Element, n: usize) -> Result<MultiMap, TensorError> {
    if x.parity(alg).is_none() {
        return Err(TensorError::NotHomogeneous);
    }
    if n == 0 {
        return Err(TensorError::TooShort("ad_first", 1));
    }
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n), |y| {
        let mut out = TensorVector::zero(n);
        for (a, va) in x.iter() {
            for (c, v) in alg.bracket(a, y[0]).iter() {
                let mut k = idx(&[c]);
                k.extend_from_slice(&y[1..]);
                out.add_term(k, va * v);
            }
        }
        out
    }))
}

/// The right shift `s: a₁ ⊗ … ↦ 1 ⊗ a₁ ⊗ …`.
pub fn shift_s(alg: &GradedAlgebra, n: usize) -> MultiMap {
    MultiMap::from_fn(alg.dim(), n, (0, n + 1), |x| TensorVector::basis(&concat(&[0], x)))
}

/// `Sym^n_{p,q;r,s}` on basis tensors: `½(x + (−1)^n σx)` where `σ` is the
/// graded exchange of slots `p..=q` with `r..=s` (1-based).
pub fn sym_block_on(alg: &GradedAlgebra, n_parity: usize, blocks: (usize, usize, usize, usize), x: &[Basis]) -> TensorVector {
    let (p, q, r, s) = blocks;
    let mut perm: Vec<usize> = (0..x.len()).collect();
    let first: Vec<usize> = (p - 1..q).collect();
    let second: Vec<usize> = (r - 1..s).collect();
    let middle: Vec<usize> = (q..r - 1).collect();
    let mut pos = p - 1;
    for &k in second.iter().chain(&middle).chain(&first) {
        perm[pos] = k;
        pos += 1;
    }
    let parities: Vec<u8> = x.iter().map(|&a| alg.parity(a)).collect();
    let mut sign = koszul_sign(&perm, &parities) as i128;
    if n_parity % 2 == 1 {
        sign = -sign;
    }
    let swapped: Idx = perm.iter().map(|&k| x[k]).collect();
    let mut out = TensorVector::zero(x.len());
    out.add_term(idx(x), frac(1, 2));
    out.add_term(swapped, frac(sign, 2));
    out
}

pub fn sym_block(
    alg: &GradedAlgebra,
    n_parity: usize,
    blocks: (usize, usize, usize, usize),
    total_arity: usize,
) -> Result<MultiMap, TensorError> {
    let (p, q, r, s) = blocks;
    if !(1 <= p && p <= q && q < r && r <= s && s <= total_arity && s - r == q - p) {
        return Err(TensorError::Blocks(blocks));
    }
    Ok(MultiMap::from_fn(alg.dim(), total_arity, (0, total_arity), |x| sym_block_on(alg, n_parity, blocks, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn alg(name: &str) -> GradedAlgebra {
        GradedAlgebra::builtin(name).unwrap()
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]), -1);
        // slot 3 to the front past two odd slots
        assert_eq!(koszul_sign(&[2, 0, 1], &[1, 1, 1]), 1);
        assert_eq!(koszul_sign(&[2, 0, 1], &[1, 0, 1]), -1);
    }

    #[test]
    fn multiplication_operators() {
        let ext = alg("exterior1");
        // a ⊗ b ⊗ c with b, c odd: 𝔪_{1,3} picks (−1)^{|c||b|}
        let v = mult_1i_on(&ext, 3, &[0, 1, 1]);
        assert_eq!(v, TensorVector::from_terms(2, [(idx(&[1, 1]), q(-1))]));
        let m = alg("mat2");
        assert_eq!(mult_1i_on(&m, 2, &[1, 2]), TensorVector::basis(&[2]));
        assert_eq!(mult_star_i1_on(&m, 2, &[1, 2]), TensorVector::zero(1));
        assert_eq!(mult_star_i1_on(&m, 2, &[2, 1]), TensorVector::basis(&[2]));
    }

    #[test]
    fn permutation_examples() {
        let ext = alg("exterior1");
        assert_eq!(perm_1i_on(&ext, 3, &[1, 0, 1]), (idx(&[1, 1, 0]), true));
        assert_eq!(perm_i1_on(&ext, 3, &[1, 1, 0]), (idx(&[1, 0, 1]), true));
        assert_eq!(perm_1i_on(&ext, 1, &[1, 1]), (idx(&[1, 1]), false));
        let p = perm_1i(&ext, 3, 3).unwrap();
        let back = perm_i1(&ext, 3, 3).unwrap();
        assert_eq!(back.compose(&p).unwrap(), MultiMap::identity(2, 3));
    }

    #[test]
    fn ad_first_examples() {
        let m = alg("mat2");
        let ad = ad_first(&m, &Element::basis(1), 2).unwrap();
        assert_eq!(ad.column(&[2, 3]), &TensorVector::basis(&[2, 3]));
        assert!(ad_first(&m, &Element::basis(0), 3).unwrap().is_zero());
        assert!(ad_first(&alg("group_Z2"), &Element::basis(1), 2).unwrap().is_zero());
    }

    #[test]
    fn shift_examples() {
        let m = alg("mat2");
        let s = shift_s(&m, 1);
        assert_eq!(s.column(&[2]), &TensorVector::basis(&[0, 2]));
        let ss = shift_s(&m, 2).compose(&s).unwrap();
        assert_eq!(ss.column(&[3]), &TensorVector::basis(&[0, 0, 3]));
        let s0 = shift_s(&m, 0);
        assert_eq!(s0.column(&[]), &TensorVector::basis(&[0]));
    }

    #[test]
    fn sym_block_examples() {
        let m = alg("mat2");
        let even = sym_block_on(&m, 2, (1, 2, 3, 4), &[1, 2, 3, 0]);
        assert_eq!(even, TensorVector::from_terms(4, [(idx(&[1, 2, 3, 0]), frac(1, 2)), (idx(&[3, 0, 1, 2]), frac(1, 2))]));
        let odd = sym_block_on(&m, 1, (1, 1, 2, 2), &[1, 2]);
        assert_eq!(odd, TensorVector::from_terms(2, [(idx(&[1, 2]), frac(1, 2)), (idx(&[2, 1]), frac(-1, 2))]));
        let s = sym_block(&alg("exterior1"), 3, (2, 3, 5, 6), 6).unwrap();
        assert_eq!(s.compose(&s).unwrap(), s);
        assert!(sym_block(&m, 0, (1, 2, 2, 3), 3).is_err());
    }

    #[test]
    fn padding_and_tensor_product() {
        let m = alg("mat2");
        let mm = mult_1i(&m, 2, 2).unwrap();
        let padded = mm.pad_left_identity(1);
        assert_eq!(padded.column(&[3, 1, 2]), &TensorVector::basis(&[3, 2]));
        let right = mm.pad_right_identity(1);
        assert_eq!(right.column(&[1, 2, 3]), &TensorVector::basis(&[2, 3]));
        let id = MultiMap::identity(4, 1);
        assert_eq!(id.tensor_product(&mm, &m).unwrap(), padded);
        assert_eq!(id.compose(&mm).unwrap().in_arity(), 2);
        assert!(mm.compose(&mm).is_err());
    }
}
