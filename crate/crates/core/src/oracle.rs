//! Ω as a normal-ordered polynomial in ghosts `Cⁿ_A` and momenta `P^A_n`,
//! squared with the canonical commutation rules.
//!
//! A monomial is an optional algebra element (the lead, standing for the
//! generator `t_a` of the constraint algebra) times ghosts times momenta,
//! ghosts to the left. The symbol `Cⁿ_A` has parity `n + |A|`; so does `P^A_n`.
//! `[P^A_n, Cᵐ_B} = δ` when the level and the multi-index agree.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Basis, GradedAlgebra};
use crate::bar::z_on;
use crate::recursion::URegistry;
use crate::scalar::{sign, Q};
use crate::tensor::{basis_indices, idx, Idx};

/// Which multi-indices a level-`n` ghost or momentum may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexModel {
    /// First `n − 1` slots taken from `A/k·1`, the last from `A`.
    #[default]
    Normalized,
    /// Every slot ranges over `A`.
    Full,
}

impl IndexModel {
    pub fn admits(self, level: usize, x: &[Basis]) -> bool {
        match self {
            IndexModel::Full => true,
            IndexModel::Normalized => x[..level.saturating_sub(1)].iter().all(|&a| a != 0),
        }
    }

    /// Checks each block of `x` cut at `split = (p, q)`; `p = 0` is a single block.
    pub fn admits_split(self, split: (usize, usize), x: &[Basis]) -> bool {
        let (p, q) = split;
        if p == 0 {
            return self.admits(q, x);
        }
        self.admits(p, &x[..p]) && self.admits(q, &x[p..])
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexModel::Normalized => "normalized",
            IndexModel::Full => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym {
    pub momentum: bool,
    pub level: usize,
    pub idx: Idx,
}

impl Sym {
    pub fn ghost(level: usize, x: &[Basis]) -> Self {
        Sym { momentum: false, level, idx: idx(x) }
    }

    pub fn momentum(level: usize, x: &[Basis]) -> Self {
        Sym { momentum: true, level, idx: idx(x) }
    }

    pub fn parity(&self, alg: &GradedAlgebra) -> u8 {
        (self.level as u8 + alg.parity_of(&self.idx)) & 1
    }
}

/// A CP-ordered monomial with its symbols in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub lead: Option<Basis>,
    pub ghosts: Vec<Sym>,
    pub moms: Vec<Sym>,
}

impl Monomial {
    pub fn signature(&self) -> Signature {
        let mut ghosts: Vec<usize> = self.ghosts.iter().map(|s| s.level).collect();
        let mut moms: Vec<usize> = self.moms.iter().map(|s| s.level).collect();
        ghosts.sort_unstable();
        moms.sort_unstable();
        Signature { lead: self.lead.is_some(), ghosts, moms }
    }

    pub fn ghost_number(&self) -> isize {
        let g: usize = self.ghosts.iter().map(|s| s.level).sum();
        let p: usize = self.moms.iter().map(|s| s.level).sum();
        g as isize - p as isize
    }

    /// Ghost indices concatenated, then lead (unit if absent) and momentum indices.
    pub fn flatten(&self) -> (Vec<Basis>, Vec<Basis>) {
        let input = self.ghosts.iter().flat_map(|s| s.idx.iter().copied()).collect();
        let mut out = vec![self.lead.unwrap_or(0)];
        out.extend(self.moms.iter().flat_map(|s| s.idx.iter().copied()));
        (input, out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Signature {
    pub lead: bool,
    pub ghosts: Vec<usize>,
    pub moms: Vec<usize>,
}

impl Signature {
    pub fn ghost_level_sum(&self) -> usize {
        self.ghosts.iter().sum()
    }

    /// Highest registry level any contribution to this sector can consume.
    /// A one-contraction product feeding three ghosts of total level `S`
    /// uses maps with input level at most `S - 1`; every other sector can
    /// reach input level `S`.
    pub fn max_key_level(&self) -> usize {
        let s = self.ghost_level_sum();
        if self.ghosts.len() >= 3 { s.saturating_sub(2) } else { s.saturating_sub(1) }
    }
}

/// Nonzero coefficients keyed by canonical monomial.
pub type GhostPolynomial = BTreeMap<Monomial, Q>;

/// Sorts graded-commutative symbols; `None` when an odd symbol repeats.
pub fn canon(alg: &GradedAlgebra, mut c: Q, syms: &mut [Sym]) -> Option<Q> {
    let n = syms.len();
    for i in 0..n {
        for j in 0..n.saturating_sub(1 + i) {
            if syms[j] > syms[j + 1] {
                if syms[j].parity(alg) & syms[j + 1].parity(alg) == 1 {
                    c = -c;
                }
                syms.swap(j, j + 1);
            }
        }
    }
    for j in 0..n.saturating_sub(1) {
        if syms[j] == syms[j + 1] && syms[j].parity(alg) == 1 {
            return None;
        }
    }
    Some(c)
}

/// Moves every momentum right of every ghost, contracting matching pairs.
pub fn normal_order(alg: &GradedAlgebra, word: Vec<Sym>, c: Q) -> Vec<(Q, Vec<Sym>, Vec<Sym>)> {
    let mut res = Vec::new();
    let mut stack = vec![(c, word)];
    while let Some((c, w)) = stack.pop() {
        let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i].momentum && !w[i + 1].momentum) else {
            let (g, p): (Vec<Sym>, Vec<Sym>) = w.into_iter().partition(|s| !s.momentum);
            res.push((c, g, p));
            continue;
        };
        let (pp, pg) = (w[i].parity(alg), w[i + 1].parity(alg));
        if w[i].level == w[i + 1].level && w[i].idx == w[i + 1].idx {
            let mut shorter = w.clone();
            shorter.drain(i..i + 2);
            stack.push((-c * sign(pp as usize), shorter));
        }
        let mut swapped = w;
        swapped.swap(i, i + 1);
        stack.push((c * sign((pp & pg) as usize), swapped));
    }
    res
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaTerm {
    pub coef: Q,
    pub lead: Option<Basis>,
    pub ghosts: Vec<Sym>,
    pub moms: Vec<Sym>,
}

/// `C¹ + Σₙ ⟨Z_{n+1}(C^{n+1}), Pₙ⟩ + Σ ⟨U(Cᵐ⊗C^{m′}), P…⟩` through the registry level.
/// Terms carrying a symbol the index model rejects are left out.
pub fn build_omega(reg: &URegistry, model: IndexModel) -> Vec<OmegaTerm> {
    let alg = reg.algebra();
    let level = reg.level();
    let mut terms = Vec::new();
    for a in 0..alg.dim() as Basis {
        terms.push(OmegaTerm { coef: Q::one(), lead: Some(a), ghosts: vec![Sym::ghost(1, &[a])], moms: vec![] });
    }
    for n in 1..=level {
        for b in basis_indices(alg.dim(), n + 1) {
            if !model.admits(n + 1, &b) {
                continue;
            }
            for (out, c) in z_on(alg, &b).iter() {
                if !model.admits(n, &out[1..]) {
                    continue;
                }
                terms.push(OmegaTerm {
                    coef: *c,
                    lead: Some(out[0]),
                    ghosts: vec![Sym::ghost(n + 1, &b)],
                    moms: vec![Sym::momentum(n, &out[1..])],
                });
            }
        }
    }
    for (key, map) in reg.maps() {
        for (z, col) in map.columns() {
            if !model.admits_split((key.in1, key.in2), &z) {
                continue;
            }
            let ghosts = vec![Sym::ghost(key.in1, &z[..key.in1]), Sym::ghost(key.in2, &z[key.in1..])];
            for (out, c) in col.iter() {
                if !model.admits_split(key.split(), out) {
                    continue;
                }
                let moms = if key.out1 == 0 {
                    vec![Sym::momentum(key.out2, out)]
                } else {
                    vec![Sym::momentum(key.out1, &out[..key.out1]), Sym::momentum(key.out2, &out[key.out1..])]
                };
                terms.push(OmegaTerm { coef: *c, lead: None, ghosts: ghosts.clone(), moms });
            }
        }
    }
    for t in &terms {
        let gh: usize = t.ghosts.iter().map(|s| s.level).sum::<usize>();
        let ph: usize = t.moms.iter().map(|s| s.level).sum::<usize>();
        assert_eq!(gh, ph + 1, "Ω term with ghost number ≠ 1");
    }
    terms
}

#[derive(Debug, Clone)]
pub struct OracleSquare {
    /// Coefficients of Ω² in sectors whose every contribution is built from
    /// registry keys within the truncation level.
    pub safe: GhostPolynomial,
    /// Nonzero counts per signature beyond that bound, not judged.
    pub unchecked: BTreeMap<Signature, usize>,
    pub omega_terms: usize,
}

impl OracleSquare {
    pub fn by_signature(&self) -> BTreeMap<Signature, GhostPolynomial> {
        let mut out: BTreeMap<Signature, GhostPolynomial> = BTreeMap::new();
        for (m, c) in &self.safe {
            out.entry(m.signature()).or_default().insert(m.clone(), *c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.safe.is_empty()
    }
}

/// Ω·Ω with every product normal ordered. Only pairs that contract at
/// least once, or multiply two leads, contribute.
pub fn square_omega(reg: &URegistry, model: IndexModel) -> OracleSquare {
    let alg = reg.algebra();
    let level = reg.level();
    let terms = build_omega(reg, model);
    let mut by_ghost: HashMap<(usize, &Idx), Vec<usize>> = HashMap::new();
    for (i, t) in terms.iter().enumerate() {
        for s in &t.ghosts {
            let v = by_ghost.entry((s.level, &s.idx)).or_default();
            if v.last() != Some(&i) {
                v.push(i);
            }
        }
    }
    let leads: Vec<usize> = (0..terms.len()).filter(|&i| terms[i].lead.is_some()).collect();
    let parts: Vec<GhostPolynomial> = (0..terms.len())
        .into_par_iter()
        .map(|i| {
            let t1 = &terms[i];
            let mut partners: Vec<usize> = t1
                .moms
                .iter()
                .flat_map(|s| by_ghost.get(&(s.level, &s.idx)).into_iter().flatten().copied())
                .collect();
            if t1.lead.is_some() {
                partners.extend(&leads);
            }
            partners.sort_unstable();
            partners.dedup();
            let mut acc = GhostPolynomial::new();
            for j in partners {
                product_into(alg, t1, &terms[j], &mut acc);
            }
            acc
        })
        .collect();
    let mut total = GhostPolynomial::new();
    for part in parts {
        for (m, c) in part {
            *total.entry(m).or_insert_with(Q::zero) += c;
        }
    }
    total.retain(|_, c| !c.is_zero());
    let mut safe = GhostPolynomial::new();
    let mut unchecked: BTreeMap<Signature, usize> = BTreeMap::new();
    for (m, c) in total {
        assert_eq!(m.ghost_number(), 2, "Ω² term with ghost number ≠ 2");
        assert!(m.ghosts.len() <= 3 && m.moms.len() <= 3, "Ω² monomial outside the shape bound");
        let sig = m.signature();
        if sig.max_key_level() <= level {
            safe.insert(m, c);
        } else {
            *unchecked.entry(sig).or_default() += 1;
        }
    }
    OracleSquare { safe, unchecked, omega_terms: terms.len() }
}

fn product_into(alg: &GradedAlgebra, t1: &OmegaTerm, t2: &OmegaTerm, acc: &mut GhostPolynomial) {
    let both = t1.lead.is_some() && t2.lead.is_some();
    let mut c = t1.coef * t2.coef;
    if let Some(l2) = t2.lead {
        let passed: u8 = t1.ghosts.iter().chain(&t1.moms).map(|s| s.parity(alg)).sum::<u8>() & 1;
        if alg.parity(l2) & passed == 1 {
            c = -c;
        }
    }
    let leads: Vec<(Option<Basis>, Q)> = match (t1.lead, t2.lead) {
        (Some(a), Some(b)) => alg.mul_basis(a, b).iter().map(|(k, v)| (Some(*k), *v)).collect(),
        (Some(a), None) | (None, Some(a)) => vec![(Some(a), Q::one())],
        (None, None) => vec![(None, Q::one())],
    };
    let word: Vec<Sym> = t1.moms.iter().chain(&t2.ghosts).cloned().collect();
    let before = word.len();
    for (cc, gg, pp) in normal_order(alg, word, c) {
        if gg.len() + pp.len() == before && !both {
            continue;
        }
        let mut ghosts: Vec<Sym> = t1.ghosts.iter().cloned().chain(gg).collect();
        let Some(cc) = canon(alg, cc, &mut ghosts) else { continue };
        let mut moms: Vec<Sym> = pp.into_iter().chain(t2.moms.iter().cloned()).collect();
        let Some(cc) = canon(alg, cc, &mut moms) else { continue };
        for (l, lv) in &leads {
            let lead = l.filter(|&a| a != 0);
            let m = Monomial { lead, ghosts: ghosts.clone(), moms: moms.clone() };
            *acc.entry(m).or_insert_with(Q::zero) += cc * lv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn alg(name: &str) -> GradedAlgebra {
        GradedAlgebra::builtin(name).unwrap()
    }

    #[test]
    fn contraction_of_conjugate_pair() {
        let a = alg("mat2");
        let w = vec![Sym::momentum(1, &[2]), Sym::ghost(1, &[2])];
        let mut got = normal_order(&a, w, q(1));
        got.sort_by(|x, y| x.1.len().cmp(&y.1.len()));
        // P C = −C P + 1 for odd symbols; the contraction sign is −(−1)^{|P|}
        assert_eq!(got[0], (q(1), vec![], vec![]));
        assert_eq!(got[1], (q(-1), vec![Sym::ghost(1, &[2])], vec![Sym::momentum(1, &[2])]));
    }

    #[test]
    fn even_symbols_commute_and_contract_with_minus() {
        let a = alg("mat2");
        let w = vec![Sym::momentum(2, &[1, 1]), Sym::ghost(2, &[1, 1])];
        let mut got = normal_order(&a, w, q(1));
        got.sort_by(|x, y| x.1.len().cmp(&y.1.len()));
        assert_eq!(got[0].0, q(-1));
        assert_eq!(got[1].0, q(1));
    }

    #[test]
    fn repeated_odd_ghost_vanishes() {
        let a = alg("mat2");
        let mut s = vec![Sym::ghost(1, &[1]), Sym::ghost(1, &[1])];
        assert_eq!(canon(&a, q(1), &mut s), None);
        let mut s = vec![Sym::ghost(2, &[1, 2]), Sym::ghost(2, &[1, 2])];
        assert_eq!(canon(&a, q(1), &mut s), Some(q(1)));
        let mut s = vec![Sym::ghost(1, &[2]), Sym::ghost(1, &[1])];
        assert_eq!(canon(&a, q(1), &mut s), Some(q(-1)));
    }

    #[test]
    fn level_one_terms() {
        let a = alg("mat2");
        let reg = URegistry::build(&a, 1);
        let terms = build_omega(&reg, IndexModel::Full);
        let lone = terms.iter().filter(|t| t.moms.is_empty()).count();
        assert_eq!(lone, 4);
        assert!(terms.iter().any(|t| t.lead.is_none() && t.ghosts.len() == 2));
        assert!(terms.iter().any(|t| t.ghosts[0].level == 2 && t.moms[0].level == 1));
    }

    #[test]
    fn normalized_model_drops_unit_slots() {
        let m = IndexModel::Normalized;
        assert!(m.admits(1, &[0]));
        assert!(!m.admits(2, &[0, 1]));
        assert!(m.admits(2, &[1, 0]));
        assert!(m.admits_split((1, 2), &[0, 1, 0]));
        assert!(!m.admits_split((1, 2), &[0, 0, 1]));
        assert!(IndexModel::Full.admits(3, &[0, 0, 0]));
    }

    #[test]
    fn square_vanishes_at_low_level() {
        for name in GradedAlgebra::catalog() {
            let reg = URegistry::build(&alg(name), 2);
            let sq = square_omega(&reg, IndexModel::Normalized);
            assert!(sq.is_zero(), "{name}: {:?}", sq.safe.iter().next());
        }
    }

    #[test]
    fn seeded_nonassociative_table_shows_up() {
        let bad = alg("mat2").with_structure_constant(2, 3, 1, q(2)).unwrap();
        let reg = URegistry::build(&bad, 2);
        let sq = square_omega(&reg, IndexModel::Normalized);
        assert!(!sq.is_zero());
    }
}
