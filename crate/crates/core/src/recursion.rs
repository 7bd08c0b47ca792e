//! The structure maps `U_{m,m′}^{n,n′}`, computed level by level.
//!
//! A key `(m, m′, n, n′)` names a map `A^{⊗(m+m′)} → A^{⊗n} ⊗ A^{⊗n′}` taking
//! the ghost pair `Cᵐ ⊗ C^{m′}` to the momentum pair `Pₙ ⊗ P_{n′}`; `n = 0`
//! marks the single-momentum maps `U_{m,m′}^{n′}`. The equations at out-sum
//! `L` are solved for `n` running down from `⌊(L−1)/2⌋` to `0`, so that every
//! map read while solving is either of lower out-sum or was produced earlier
//! at the same out-sum with a larger `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{Basis, GradedAlgebra};
use crate::bar::bprime_on;
use crate::scalar::{format_q, frac, sign, Q};
use crate::tensor::{
    block_swap_on, concat, mult_1i_on, mult_star_i1_on, neg_if, perm_1i_on, perm_i1_on, MultiMap, TensorVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct UKey {
    pub in1: usize,
    pub in2: usize,
    pub out1: usize,
    pub out2: usize,
}

impl UKey {
    pub const fn new(in1: usize, in2: usize, out1: usize, out2: usize) -> Self {
        UKey { in1, in2, out1, out2 }
    }

    pub fn in_arity(&self) -> usize {
        self.in1 + self.in2
    }

    pub fn out_arity(&self) -> usize {
        self.out1 + self.out2
    }

    pub fn split(&self) -> (usize, usize) {
        (self.out1, self.out2)
    }

    /// Arity bookkeeping plus `1 ≤ in1 ≤ in2` and `out1 < out2` unless `out1 = 0`.
    pub fn is_well_formed(&self) -> bool {
        self.in1 >= 1
            && self.in1 <= self.in2
            && self.out2 >= 1
            && self.in_arity() == self.out_arity() + 1
            && (self.out1 == 0 || self.out1 < self.out2)
    }

    pub fn file_name(&self) -> String {
        format!("U_{}_{}__{}_{}.json", self.in1, self.in2, self.out1, self.out2)
    }
}

impl fmt::Display for UKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U_{{{},{}}}^{{{},{}}}", self.in1, self.in2, self.out1, self.out2)
    }
}

/// Keys whose map vanishes identically: `U_{m,n}^{m′,·}` with `m′ ≥ m` and
/// `n − m ≥ 2`, and the conventional zeros with `n = n′ ≥ 1` (no momentum is
/// squared) or `n > n′`.
pub fn is_forced_zero(key: UKey) -> bool {
    let vanishing = key.out1 >= key.in1 && key.in2 >= key.in1 + 2;
    let conventional = key.out1 >= 1 && key.out1 >= key.out2;
    vanishing || conventional
}

/// What solving a forced-zero key left behind: on an associative algebra the
/// equation residue is zero; otherwise the first nonzero entry is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroRecord {
    pub residue_nnz: usize,
    pub witness: Option<(Vec<Basis>, Vec<Basis>, Q)>,
}

#[derive(Debug, Clone)]
struct Access {
    level: usize,
    out1: usize,
    read: Vec<UKey>,
}

#[derive(Debug, Clone)]
pub struct URegistry {
    alg: GradedAlgebra,
    level: usize,
    table: BTreeMap<UKey, MultiMap>,
    zeros: BTreeMap<UKey, ZeroRecord>,
    specials: Vec<UKey>,
    log: Vec<Access>,
}

/// One summand of a generating relation: a map on the ghost pair of arities
/// `(x, y)`, possibly in the swapped order relative to the stored pair.
enum Term {
    Mult,
    PermIdU { i: usize, key: UKey },
    IdU { key: UKey },
    U { key: UKey },
}

struct Contribution {
    x: usize,
    y: usize,
    coef: Q,
    term: Term,
}

impl URegistry {
    pub fn new(alg: GradedAlgebra) -> Self {
        URegistry {
            alg,
            level: 0,
            table: BTreeMap::new(),
            zeros: BTreeMap::new(),
            specials: Vec::new(),
            log: Vec::new(),
        }
    }

    /// All maps with out-sum at most `level`.
    pub fn build(alg: &GradedAlgebra, level: usize) -> Self {
        let mut reg = URegistry::new(alg.clone());
        reg.solve_level(level);
        reg
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.alg
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn keys(&self) -> impl Iterator<Item = UKey> + '_ {
        self.table.keys().copied()
    }

    pub fn maps(&self) -> impl Iterator<Item = (UKey, &MultiMap)> {
        self.table.iter().map(|(k, v)| (*k, v))
    }

    pub fn zeros(&self) -> &BTreeMap<UKey, ZeroRecord> {
        &self.zeros
    }

    /// Keys filled by the canonical solution of the equal-arity equations.
    pub fn special_keys(&self) -> &[UKey] {
        &self.specials
    }

    /// The stored map, or `None` for absent keys and for keys outside the
    /// admissible range (`in1 > in2`, or `out1 ≥ max(1, out2)`).
    pub fn get(&self, key: UKey) -> Option<&MultiMap> {
        if key.in1 > key.in2 || (key.out1 >= 1 && key.out1 >= key.out2) {
            return None;
        }
        self.table.get(&key)
    }

    /// Value on one basis tensor; `None` where `get` is `None`.
    pub fn column(&self, key: UKey, x: &[Basis]) -> Option<&TensorVector> {
        self.get(key).map(|m| m.column(x))
    }

    /// Replaces a stored map. Used to inject perturbations when testing that
    /// the verifiers detect them.
    pub fn replace(&mut self, key: UKey, map: MultiMap) -> Option<MultiMap> {
        assert_eq!(map.in_arity(), key.in_arity());
        assert_eq!(map.split(), key.split());
        self.table.insert(key, map)
    }

    /// Forced-zero keys whose equation did not close: nonempty only for
    /// non-associative input.
    pub fn inconsistencies(&self) -> Vec<(UKey, &ZeroRecord)> {
        self.zeros.iter().filter(|(_, r)| r.residue_nnz > 0).map(|(k, r)| (*k, r)).collect()
    }

    /// Reads that broke the solving order, as `(level, n, key read)`.
    pub fn ordering_violations(&self) -> Vec<(usize, usize, UKey)> {
        let mut out = Vec::new();
        for a in &self.log {
            for r in &a.read {
                let lower = r.out_arity() < a.level;
                let earlier = r.out_arity() == a.level && r.out1 > a.out1;
                if !(lower || earlier) {
                    out.push((a.level, a.out1, *r));
                }
            }
        }
        out
    }

    pub fn solve_level(&mut self, level: usize) {
        if level >= 1 && self.level < 1 {
            let m = base_u111(&self.alg);
            self.table.insert(UKey::new(1, 1, 0, 1), m);
            self.level = 1;
        }
        for l in self.level + 1..=level {
            for m in (0..=(l - 1) / 2).rev() {
                self.solve_equation(m, l - 1 - m);
            }
            self.level = l;
        }
    }

    fn contributions(&self, m: usize, n: usize) -> (Vec<Contribution>, Vec<UKey>) {
        let l = m + n;
        let mut out = Vec::new();
        let mut read = Vec::new();
        let c1 = -sign(m * n + m + n);
        out.push(Contribution { x: m + 1, y: n + 1, coef: c1, term: Term::Mult });
        for i in 0..=(l.saturating_sub(1)) / 2 {
            if l < 1 + i {
                continue;
            }
            let key = UKey::new(i + 1, l - i, m, n);
            if self.get(key).is_some() {
                read.push(key);
                out.push(Contribution { x: i + 1, y: l - i + 1, coef: -sign(m), term: Term::PermIdU { i, key } });
            }
        }
        for i in 1..=(l + 1) / 2 {
            let key = UKey::new(i, l - i + 1, m, n);
            if self.get(key).is_some() {
                read.push(key);
                out.push(Contribution { x: i + 1, y: l - i + 1, coef: sign(i + n), term: Term::IdU { key } });
            }
        }
        for i in 0..=l / 2 {
            let key = UKey::new(i + 1, l - i + 1, m + 1, n);
            if self.get(key).is_some() {
                read.push(key);
                out.push(Contribution { x: i + 1, y: l - i + 1, coef: -sign(m), term: Term::U { key } });
            }
        }
        (out, read)
    }

    fn eval_term(&self, m: usize, term: &Term, z: &[Basis]) -> TensorVector {
        let alg = &self.alg;
        let raw = match term {
            Term::Mult => {
                let mut v = mult_1i_on(alg, m + 2, z);
                v.add_scaled(&mult_star_i1_on(alg, m + 2, z), -Q::one());
                v
            }
            Term::PermIdU { i, key } => {
                let (p, neg) = perm_1i_on(alg, i + 2, z);
                let col = self.table[key].column(&p[1..]);
                prefix(p[0], col).scaled(neg_if(neg))
            }
            Term::IdU { key } => prefix(z[0], self.table[key].column(&z[1..])),
            Term::U { key } => self.table[key].column(z).clone(),
        };
        if m == 0 {
            return raw;
        }
        let mut out = TensorVector::zero(raw.arity());
        for (k, v) in raw.iter() {
            let (p, neg) = perm_i1_on(alg, m + 1, k);
            out.add_term(p, *v * neg_if(neg));
        }
        out
    }

    fn solve_equation(&mut self, m: usize, n: usize) {
        let l = m + n;
        let (contribs, read) = self.contributions(m, n);
        self.log.push(Access { level: l + 1, out1: m, read });
        let dim = self.alg.dim();
        let split = (m, n + 1);
        for i in 0..=l / 2 {
            let (a, b) = (i + 1, l - i + 1);
            let key = UKey::new(a, b, m, n + 1);
            let parts: Vec<&Contribution> =
                contribs.iter().filter(|c| (c.x == a && c.y == b) || (c.x == b && c.y == a)).collect();
            let reg = &*self;
            let mut map = MultiMap::from_fn(dim, a + b, split, |z| {
                let mut acc = TensorVector::zero(m + n + 1);
                for c in &parts {
                    if c.x == a {
                        acc.add_scaled(&reg.eval_term(m, &c.term, z), c.coef);
                    } else {
                        // stored order is (y, x): undo the block swap
                        let (w, neg) = block_swap_on(&reg.alg, c.y, z);
                        let s = c.coef * neg_if(neg) * sign(c.x * c.y);
                        acc.add_scaled(&reg.eval_term(m, &c.term, &w), s);
                    }
                }
                acc
            });
            if a == b {
                map = symmetrize_halves(&self.alg, a, &map);
            }
            debug_assert_eq!(a <= m, is_forced_zero(key));
            if a <= m {
                let witness = map.entries().next().map(|(x, y, v)| (x.to_vec(), y.to_vec(), v));
                self.zeros.insert(key, ZeroRecord { residue_nnz: map.nnz(), witness });
                continue;
            }
            if a == b && m == a - 1 {
                self.specials.push(key);
                self.table.insert(key, special_ukk(&self.alg, a));
                continue;
            }
            self.table.insert(key, map);
        }
    }

    /// Writes one `U_m_mp__n_np.json` file per stored map.
    pub fn dump(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (key, map) in &self.table {
            let path = dir.join(key.file_name());
            std::fs::write(&path, dump_json(*key, map))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn prefix(a: Basis, v: &TensorVector) -> TensorVector {
    TensorVector::from_terms(v.arity() + 1, v.iter().map(|(k, c)| (concat(&[a], k), *c)))
}

/// `M ↦ ½(M + (−1)^l M∘τ)` with `τ` the graded swap of the two input halves of length `l`.
pub fn symmetrize_halves(alg: &GradedAlgebra, l: usize, map: &MultiMap) -> MultiMap {
    MultiMap::from_fn(alg.dim(), 2 * l, map.split(), |z| {
        let mut out = map.column(z).scaled(frac(1, 2));
        let (w, neg) = block_swap_on(alg, l, z);
        out.add_scaled(map.column(&w), frac(1, 2) * neg_if(neg) * sign(l));
        out
    })
}

/// `U_{1,1}^1 = −½[−,−]`.
pub fn base_u111(alg: &GradedAlgebra) -> MultiMap {
    MultiMap::from_fn(alg.dim(), 2, (0, 1), |z| {
        TensorVector::from_element(&alg.bracket(z[0], z[1]).scaled(-frac(1, 2)))
    })
}

/// `U_{1,2}^2(a ⊗ b₁ ⊗ b₂) = [a, b₁] ⊗ b₂ + (−1)^{|a||b₁|} b₁ ⊗ [a, b₂]`.
pub fn base_u122(alg: &GradedAlgebra) -> MultiMap {
    MultiMap::from_fn(alg.dim(), 3, (0, 2), |z| inner_lie(alg, z[0], &z[1..]))
}

/// `L_a` on a basis tensor: `[a, −]` applied in every slot with Koszul signs.
pub fn inner_lie(alg: &GradedAlgebra, a: Basis, x: &[Basis]) -> TensorVector {
    let mut out = TensorVector::zero(x.len());
    for k in 0..x.len() {
        let s = neg_if(alg.parity(a) & alg.parity_of(&x[..k]) == 1);
        for (c, v) in alg.bracket(a, x[k]).iter() {
            let mut y = crate::tensor::idx(x);
            y[k] = c;
            out.add_term(y, s * v);
        }
    }
    out
}

/// Canonical `U_{k,k}^{k−1,k}`: the half-symmetrization of
/// `(−1)^{k+1} b′⊗id^{⊗k} + (−1)^k (id^{⊗(k−1)}⊗b′)∘P_{k,1}`.
pub fn special_ukk(alg: &GradedAlgebra, k: usize) -> MultiMap {
    assert!(k >= 2, "special_ukk needs k ≥ 2");
    let raw = MultiMap::from_fn(alg.dim(), 2 * k, (k - 1, k), |z| {
        let mut out = TensorVector::zero(2 * k - 1);
        for (h, v) in bprime_on(alg, &z[..k]).iter() {
            out.add_term(concat(h, &z[k..]), *v * sign(k + 1));
        }
        let (p, neg) = perm_i1_on(alg, k, z);
        for (t, v) in bprime_on(alg, &p[k - 1..]).iter() {
            out.add_term(concat(&p[..k - 1], t), *v * sign(k) * neg_if(neg));
        }
        out
    });
    symmetrize_halves(alg, k, &raw)
}

/// Checks `U_{1,n}^n(a₀ ⊗ …) = (−1)ⁿ L_{a₀}(a₁ ⊗ … ⊗ aₙ)` on every basis tensor.
pub fn check_u1nn(reg: &URegistry, n: usize) -> bool {
    let Some(map) = reg.get(UKey::new(1, n, 0, n)) else {
        return false;
    };
    let alg = reg.algebra();
    crate::tensor::basis_indices(alg.dim(), n + 1)
        .all(|z| *map.column(&z) == inner_lie(alg, z[0], &z[1..]).scaled(sign(n)))
}

#[derive(Serialize)]
struct Dump<'a> {
    key: [usize; 4],
    entries: Vec<(&'a [Basis], Vec<Basis>, String)>,
}

/// The map as `{"key": [m, m′, n, n′], "entries": [[in, out, "p/q"], …]}`.
pub fn dump_json(key: UKey, map: &MultiMap) -> String {
    let cols: Vec<_> = map.columns().collect();
    let mut entries = Vec::new();
    for (x, col) in &cols {
        for (y, v) in col.iter() {
            entries.push((x.as_slice(), y.to_vec(), format_q(v)));
        }
    }
    let d = Dump { key: [key.in1, key.in2, key.out1, key.out2], entries };
    serde_json::to_string(&d).expect("dump serializes")
}

/// Sum of absolute values of all coefficients; a cheap fingerprint for logs.
pub fn weight(map: &MultiMap) -> Q {
    map.entries().fold(Q::zero(), |acc, (_, _, v)| acc + if v < Q::zero() { -v } else { v })
}
