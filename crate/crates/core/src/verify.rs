//! The coefficient families of Ω·Ω, assembled directly from the registry.
//!
//! Each family is evaluated on basis ghost pairs `Cˣ_A ⊗ C^y_B` and folded
//! into canonical monomials, so its value can be compared term by term with
//! the normal-ordered square. The index model is applied wherever a ghost or
//! momentum symbol appears, including the symbols contracted away inside a
//! composition.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{Basis, GradedAlgebra};
use crate::bar::{bprime_on, z_on, z_partial_on};
use crate::oracle::{canon, GhostPolynomial, IndexModel, Monomial, OracleSquare, Signature, Sym};
use crate::recursion::{UKey, URegistry};
use crate::report::{Family, ResidualReport, Witness};
use crate::scalar::{frac, sign, Q};
use crate::tensor::{concat, mult_1i_on, mult_star_i1_on, unrank, MultiMap, TensorVector};

/// The three parts of the coefficient of `C C P P` (or `C C P`) in Ω·Ω.
#[derive(Debug, Clone, Default)]
pub struct FamilyParts {
    pub z: GhostPolynomial,
    pub y: GhostPolynomial,
    pub x: GhostPolynomial,
}

impl FamilyParts {
    pub fn total(&self) -> GhostPolynomial {
        let mut out = self.z.clone();
        merge(&mut out, &self.y);
        merge(&mut out, &self.x);
        out
    }
}

fn merge(into: &mut GhostPolynomial, from: &GhostPolynomial) {
    for (m, c) in from {
        *into.entry(m.clone()).or_insert_with(Q::zero) += *c;
    }
    into.retain(|_, c| !c.is_zero());
}

/// `(m, n)` with `n ≥ max(m, 1)` whose equation stays inside the truncation.
pub fn family_indices(level: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 0..=level {
        for n in m.max(1)..=level {
            if m + n + 2 <= level + 1 {
                out.push((m, n));
            }
        }
    }
    out
}

/// The oracle signature holding family `(m, n)`.
pub fn family_signature(m: usize, n: usize, lead: bool) -> Signature {
    Signature { lead, ghosts: vec![], moms: if m == 0 { vec![n] } else { vec![m, n] } }
}

pub struct Verifier<'a> {
    reg: &'a URegistry,
    alg: &'a GradedAlgebra,
    model: IndexModel,
}

type Column = TensorVector;

impl<'a> Verifier<'a> {
    pub fn new(reg: &'a URegistry, model: IndexModel) -> Self {
        Verifier { reg, alg: reg.algebra(), model }
    }

    pub fn registry(&self) -> &URegistry {
        self.reg
    }

    pub fn model(&self) -> IndexModel {
        self.model
    }

    fn u(&self, key: UKey) -> Option<&MultiMap> {
        self.reg.get(key)
    }

    /// `U(x)` with the input blocks checked against the index model.
    fn u_in(&self, key: UKey, x: &[Basis]) -> Option<&Column> {
        if !self.model.admits_split((key.in1, key.in2), x) {
            return None;
        }
        self.u(key).map(|m| m.column(x))
    }

    /// `U(x)` with the output blocks checked against the index model.
    fn u_out(&self, key: UKey, x: &[Basis]) -> impl Iterator<Item = (&crate::tensor::Idx, &Q)> {
        let model = self.model;
        self.u(key)
            .map(|m| m.column(x))
            .into_iter()
            .flat_map(|c| c.iter())
            .filter(move |(k, _)| model.admits_split(key.split(), k))
    }

    /// Evaluates `f` on every admissible basis ghost pair `Cˣ ⊗ Cʸ` and folds
    /// `c·f` into monomials; `f` returns the lead in slot 0, then momenta cut at `split`.
    fn pair<F>(&self, acc: &mut GhostPolynomial, xa: usize, ya: usize, c: Q, split: (usize, usize), f: F)
    where
        F: Fn(&[Basis]) -> Column + Sync,
    {
        let dim = self.alg.dim();
        let n = xa + ya;
        let total = dim.pow(n as u32);
        let part: GhostPolynomial = (0..total)
            .into_par_iter()
            .fold(GhostPolynomial::new, |mut local, r| {
                let z = unrank(dim, n, r);
                if self.model.admits_split((xa, ya), &z) {
                    let v = f(&z);
                    self.emit(&mut local, xa, &z, &v, c, split);
                }
                local
            })
            .reduce(GhostPolynomial::new, |mut a, b| {
                for (m, v) in b {
                    *a.entry(m).or_insert_with(Q::zero) += v;
                }
                a
            });
        for (m, v) in part {
            *acc.entry(m).or_insert_with(Q::zero) += v;
        }
        acc.retain(|_, v| !v.is_zero());
    }

    fn emit(&self, acc: &mut GhostPolynomial, xa: usize, z: &[Basis], vec: &Column, c: Q, split: (usize, usize)) {
        let (m, n) = split;
        for (out, v) in vec.iter() {
            let rest = &out[1..];
            if !self.model.admits_split(split, rest) {
                continue;
            }
            let mut ghosts = vec![Sym::ghost(xa, &z[..xa]), Sym::ghost(z.len() - xa, &z[xa..])];
            let Some(c1) = canon(self.alg, c * *v, &mut ghosts) else { continue };
            let mut moms = if m == 0 {
                vec![Sym::momentum(n, rest)]
            } else {
                vec![Sym::momentum(m, &rest[..m]), Sym::momentum(n, &rest[m..])]
            };
            let Some(c2) = canon(self.alg, c1, &mut moms) else { continue };
            let lead = Some(out[0]).filter(|&a| a != 0);
            *acc.entry(Monomial { lead, ghosts, moms }).or_insert_with(Q::zero) += c2;
        }
    }

    fn swap_after_lead(&self, x: &Column, n: usize, s: Q) -> Column {
        let mut out = x.scaled(s);
        for (k, v) in x.iter() {
            let (u, w) = (&k[1..1 + n], &k[1 + n..]);
            let neg = self.alg.parity_of(u) & self.alg.parity_of(w) == 1;
            let key = concat(&concat(&k[..1], w), u);
            out.add_term(key, *v * s * sign(n) * if neg { -Q::one() } else { Q::one() });
        }
        out
    }

    /// The part of Ω·Ω coming from two Ω_A terms.
    pub fn z_family(&self, m: usize, n: usize) -> GhostPolynomial {
        let alg = self.alg;
        let mut acc = GhostPolynomial::new();
        if m == 0 {
            self.pair(&mut acc, 1, n + 1, Q::one(), (0, n), |z| {
                let mut out = Column::zero(n + 1);
                for (k, v) in z_on(alg, &z[1..]).iter() {
                    for (c, u) in alg.bracket(z[0], k[0]).iter() {
                        out.add_term(concat(&[c], &k[1..]), *v * u);
                    }
                }
                out
            });
            return acc;
        }
        let x = move |z: &[Basis]| {
            let mut out = Column::zero(m + n + 1);
            let za = z_on(alg, &z[..m + 1]);
            let zb = z_on(alg, &z[m + 1..]);
            for (k1, v1) in za.iter() {
                for (k2, v2) in zb.iter() {
                    let y = concat(k1, k2);
                    out.add_scaled(&mult_1i_on(alg, m + 2, &y), *v1 * *v2);
                    out.add_scaled(&mult_star_i1_on(alg, m + 2, &y), -*v1 * *v2);
                }
            }
            out
        };
        if m < n {
            self.pair(&mut acc, m + 1, n + 1, sign(m * n + m), (m, n), x);
        } else {
            self.pair(&mut acc, n + 1, n + 1, Q::one(), (n, n), |z| self.swap_after_lead(&x(z), n, frac(1, 4)));
        }
        acc
    }

    /// The part from one Ω_A term and one U term.
    pub fn y_family(&self, m: usize, n: usize) -> GhostPolynomial {
        let alg = self.alg;
        let l = m + n;
        let mut acc = GhostPolynomial::new();
        if m == n {
            for i in 0..=n {
                let key = UKey::new(i + 1, 2 * n - i + 1, n, n + 1);
                self.pair(&mut acc, i + 1, 2 * n - i + 1, sign(n), (n, n), |z| {
                    let mut g = Column::zero(2 * n + 1);
                    for (y, v) in self.u_out(key, z) {
                        g.add_scaled(&z_partial_on(alg, n + 1, y), *v);
                    }
                    self.swap_after_lead(&g, n, frac(1, 2))
                });
            }
            return acc;
        }
        for i in 0..=l {
            let j = l - i;
            if j < i {
                continue;
            }
            let key = UKey::new(i + 1, j + 1, m, n + 1);
            self.pair(&mut acc, i + 1, j + 1, sign(n), (m, n), |z| {
                let mut out = Column::zero(l + 1);
                for (y, v) in self.u_out(key, z) {
                    out.add_scaled(&z_partial_on(alg, m + 1, y), *v);
                }
                out
            });
        }
        for i in 0..=l {
            let j = l - i;
            if j <= i {
                continue;
            }
            let key = UKey::new(i + 1, j, m, n);
            self.pair(&mut acc, i + 1, j + 1, sign(m + n), (m, n), |z| {
                let mut out = Column::zero(l + 1);
                for (k, v) in z_partial_on(alg, i + 2, z).iter() {
                    if let Some(col) = self.u_in(key, &k[1..]) {
                        for (k2, v2) in col.iter() {
                            out.add_term(concat(&k[..1], k2), *v * *v2);
                        }
                    }
                }
                out
            });
        }
        for i in 1..=l {
            let j = l - i;
            if j + 1 < i {
                continue;
            }
            let key = UKey::new(i, j + 1, m, n);
            self.pair(&mut acc, i + 1, j + 1, sign(i + 1), (m, n), |z| {
                let mut out = Column::zero(l + 1);
                for (k, v) in z_on(alg, &z[..i + 1]).iter() {
                    let y = concat(k, &z[i + 1..]);
                    if let Some(col) = self.u_in(key, &y[1..]) {
                        for (k2, v2) in col.iter() {
                            out.add_term(concat(&y[..1], k2), *v * *v2);
                        }
                    }
                }
                out
            });
        }
        if m + 1 < n {
            for i in 0..=l {
                let j = l - i;
                if j < i {
                    continue;
                }
                let key = UKey::new(i + 1, j + 1, m + 1, n);
                self.pair(&mut acc, i + 1, j + 1, sign(m + n), (m, n), |z| {
                    let mut out = Column::zero(l + 1);
                    for (k, v) in self.u_out(key, z) {
                        for (k2, v2) in z_on(alg, &k[..m + 1]).iter() {
                            out.add_term(concat(k2, &k[m + 1..]), *v * *v2);
                        }
                    }
                    out
                });
            }
        }
        acc
    }

    /// The part from two U terms.
    pub fn x_family(&self, m: usize, n: usize) -> GhostPolynomial {
        let l = m + n;
        let mut acc = GhostPolynomial::new();
        let mut i = 1;
        while 2 * i <= l + 1 {
            let mut j = 1;
            while 2 * j <= l + 2 {
                let outer = UKey::new(j, l + 2 - j, i, l + 1 - i);
                let inner = UKey::new(i, l + 1 - i, m, n);
                if self.u(outer).is_some() && self.u(inner).is_some() {
                    let c = sign((i + 1) * (m + n) + 1);
                    self.pair(&mut acc, j, l + 2 - j, c, (m, n), |z| {
                        let mut out = Column::zero(l + 1);
                        for (k, v) in self.u_out(outer, z) {
                            for (k2, v2) in self.u(inner).unwrap().column(k).iter() {
                                out.add_term(concat(&[0], k2), *v * *v2);
                            }
                        }
                        out
                    });
                }
                j += 1;
            }
            i += 1;
        }
        acc
    }

    pub fn family(&self, m: usize, n: usize) -> FamilyParts {
        FamilyParts { z: self.z_family(m, n), y: self.y_family(m, n), x: self.x_family(m, n) }
    }

    /// The equations left over once `Z = id − 1⊗b′` is substituted, for `m < n`.
    /// They are identities between maps on full tensors and concern exactly
    /// the unit directions, so they are always evaluated in the full model.
    pub fn rest(&self, m: usize, n: usize) -> GhostPolynomial {
        assert!(m < n, "rest equations need m < n");
        if self.model != IndexModel::Full {
            return Verifier::new(self.reg, IndexModel::Full).rest(m, n);
        }
        let alg = self.alg;
        let l = m + n;
        let mut acc = GhostPolynomial::new();
        let lead0 = |v: Column| Column::from_terms(v.arity() + 1, v.iter().map(|(k, c)| (concat(&[0], k), *c)));
        let bp = |x: &[Basis]| if x.len() < 2 { Column::zero(x.len().saturating_sub(1)) } else { bprime_on(alg, x) };
        for i in m..=l / 2 {
            let key = UKey::new(i + 1, l - i + 1, m, n + 1);
            self.pair(&mut acc, i + 1, l - i + 1, sign(m), (m, n), |z| {
                let mut out = Column::zero(l);
                for (k, v) in self.u_out(key, z) {
                    for (k2, v2) in bp(&k[m..]).iter() {
                        out.add_term(concat(&k[..m], k2), *v * *v2);
                    }
                }
                lead0(out)
            });
        }
        if m >= 1 {
            for i in m + 1..=l / 2 {
                let key = UKey::new(i + 1, l - i + 1, m + 1, n);
                self.pair(&mut acc, i + 1, l - i + 1, Q::one(), (m, n), |z| {
                    let mut out = Column::zero(l);
                    for (k, v) in self.u_out(key, z) {
                        for (k2, v2) in bprime_on(alg, &k[..m + 1]).iter() {
                            out.add_term(concat(k2, &k[m + 1..]), *v * *v2);
                        }
                    }
                    lead0(out)
                });
            }
        }
        for i in m..=(l - 1) / 2 {
            let key = UKey::new(i + 1, l - i, m, n);
            self.pair(&mut acc, i + 1, l - i + 1, Q::one(), (m, n), |z| {
                let mut out = Column::zero(l);
                for (k, v) in bprime_on(alg, &z[i + 1..]).iter() {
                    if let Some(col) = self.u_in(key, &concat(&z[..i + 1], k)) {
                        out.add_scaled(col, *v);
                    }
                }
                lead0(out)
            });
        }
        for i in m + 1..=(l + 1) / 2 {
            let key = UKey::new(i, l - i + 1, m, n);
            self.pair(&mut acc, i + 1, l - i + 1, sign(m + n + i + 1), (m, n), |z| {
                let mut out = Column::zero(l);
                for (k, v) in bprime_on(alg, &z[..i + 1]).iter() {
                    if let Some(col) = self.u_in(key, &concat(k, &z[i + 1..])) {
                        out.add_scaled(col, *v);
                    }
                }
                lead0(out)
            });
        }
        for j in m + 1..=l / 2 {
            for i in j..=l / 2 {
                let outer = UKey::new(i + 1, l + 1 - i, j, l + 1 - j);
                let inner = UKey::new(j, l + 1 - j, m, n);
                if self.u(outer).is_none() || self.u(inner).is_none() {
                    continue;
                }
                self.pair(&mut acc, i + 1, l + 1 - i, sign(j * (m + n)), (m, n), |z| {
                    let mut out = Column::zero(l);
                    for (k, v) in self.u_out(outer, z) {
                        out.add_scaled(self.u(inner).unwrap().column(k), *v);
                    }
                    lead0(out)
                });
            }
        }
        acc
    }

    /// `½(ab − (−1)^{|a||b|} ba) + U_{1,1}^1(a ⊗ b)` on all basis pairs.
    pub fn residual_zero(&self) -> ResidualReport {
        let alg = self.alg;
        let u = self.u(UKey::new(1, 1, 0, 1));
        let d = alg.dim();
        let mut failures = Vec::new();
        for a in 0..d as Basis {
            for b in 0..d as Basis {
                let mut v = alg.bracket(a, b).scaled(frac(1, 2));
                if let Some(u) = u {
                    for (k, c) in u.column(&[a, b]).iter() {
                        v.add_term(k[0], *c);
                    }
                }
                for (k, c) in v.iter() {
                    failures.push(Witness { input: vec![a, b], output: vec![k], value: c });
                }
            }
        }
        ResidualReport::new(Family::ZeroOrder, vec![]).with_failures(failures).with_checked(d * d)
    }

    fn family_report(&self, family: Family, m: usize, n: usize) -> ResidualReport {
        let parts = self.family(m, n);
        let total = parts.total();
        let indices = if family == Family::Linear { vec![n] } else { vec![m, n] };
        let mut r = ResidualReport::from_polynomial(family, indices, &total);
        r.checked = parts.z.len() + parts.y.len() + parts.x.len();
        if !r.passed {
            r.label = Some(format!("Z {} / Y {} / X {} nonzero", parts.z.len(), parts.y.len(), parts.x.len()));
        }
        r
    }

    /// `𝒵_n + 𝒴_n + 1⊗𝒳_n`, the momentum-linear coefficient `C C Pₙ`.
    pub fn residual_linear(&self, n: usize) -> ResidualReport {
        self.family_report(Family::Linear, 0, n)
    }

    /// `𝒵_{mn} + 𝒴_{mn} + 1⊗𝒳_{mn}`, the coefficient of `C C P_m P_n`.
    pub fn residual_quadratic(&self, m: usize, n: usize) -> ResidualReport {
        assert!(m >= 1 && m <= n);
        self.family_report(Family::Quadratic, m, n)
    }

    pub fn residual_rest(&self, m: usize, n: usize) -> ResidualReport {
        let r = self.rest(m, n);
        let mut rep = ResidualReport::from_polynomial(Family::Rest, vec![m, n], &r);
        rep.checked = self.alg.dim().pow((m + n + 2) as u32);
        rep
    }

    /// All linear, quadratic and rest reports inside the truncation.
    pub fn residual_suite(&self, max_sum: Option<usize>) -> Vec<ResidualReport> {
        let level = self.reg.level();
        let keep = |m: usize, n: usize| max_sum.is_none_or(|s| m + n <= s);
        let mut out = vec![self.residual_zero()];
        for (m, n) in family_indices(level) {
            if !keep(m, n) {
                continue;
            }
            out.push(if m == 0 { self.residual_linear(n) } else { self.residual_quadratic(m, n) });
        }
        out
    }

    pub fn rest_suite(&self, max_sum: Option<usize>) -> Vec<ResidualReport> {
        family_indices(self.reg.level())
            .into_iter()
            .filter(|&(m, n)| m < n && max_sum.is_none_or(|s| m + n <= s))
            .map(|(m, n)| self.residual_rest(m, n))
            .collect()
    }

    /// Compares every family with the oracle sector of the same signature,
    /// and requires every other truncation-safe sector to vanish.
    pub fn oracle_agreement(&self, sq: &OracleSquare) -> Vec<ResidualReport> {
        let mut sectors: BTreeMap<(Vec<usize>, Vec<usize>), GhostPolynomial> = BTreeMap::new();
        for (mono, c) in &sq.safe {
            let s = mono.signature();
            sectors.entry((s.ghosts, s.moms)).or_default().insert(mono.clone(), *c);
        }
        let mut out = Vec::new();
        for (m, n) in family_indices(self.reg.level()) {
            let fam = self.family(m, n).total();
            let moms = family_signature(m, n, false).moms;
            let mut diff = GhostPolynomial::new();
            for ((g, p), poly) in &sectors {
                if g.len() == 2 && *p == moms {
                    merge(&mut diff, poly);
                }
            }
            let oracle_nnz = diff.len();
            let neg: GhostPolynomial = fam.iter().map(|(k, v)| (k.clone(), -*v)).collect();
            merge(&mut diff, &neg);
            let label = format!("family vs oracle ({} family, {} oracle terms)", fam.len(), oracle_nnz);
            let mut r = ResidualReport::from_polynomial(Family::Oracle, vec![m, n], &diff).labelled(label);
            r.checked = fam.len().max(oracle_nnz);
            out.push(r);
        }
        for ((g, p), poly) in &sectors {
            let is_family = g.len() == 2 && !p.is_empty();
            if is_family {
                continue;
            }
            let label = format!("sector C{g:?} P{p:?}");
            let mut idx = g.clone();
            idx.extend(p);
            out.push(ResidualReport::from_polynomial(Family::Oracle, idx, poly).labelled(label));
        }
        out.push(
            ResidualReport::new(Family::Oracle, vec![])
                .labelled(format!("Ω² over {} Ω terms, {} safe coefficients", sq.omega_terms, sq.safe.len()))
                .with_checked(sq.omega_terms)
                .with_failures(
                    sq.safe
                        .iter()
                        .map(|(mono, v)| {
                            let (input, output) = mono.flatten();
                            Witness { input, output, value: *v }
                        })
                        .collect(),
                ),
        );
        out
    }
}
