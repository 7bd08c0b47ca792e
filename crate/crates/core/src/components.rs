//! Ω in component notation and the cubic-ghost identities.
//!
//! A capital index `A` is a level-`r` multi-index. Reading the canonical Ω
//! terms off as
//! `Ω = C^A t_A + C^A Z_A^B P̄_B + ½ C^B C^A U_{AB}^C P̄_C + ¼ C^B C^A U_{AB}^{CD} P̄_D P̄_C`
//! with `P̄_B = ±P_B` chosen so that `[P̄, C] = δ`, the vanishing of Ω² splits
//! into five identities: `[t, Z]`-type relations at orders `C²P` and `C²P²`
//! and the cyclic sums at orders `C³P`, `C³P²`, `C³P³`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::algebra::{Basis, Element, GradedAlgebra};
use crate::oracle::{build_omega, canon, IndexModel, Sym};
use crate::recursion::URegistry;
use crate::report::{Family, ResidualReport, Witness};
use crate::scalar::{frac, q, sign, Q};
use crate::tensor::{basis_indices, Idx};

/// A capital index: level and multi-index.
pub type Ix = (usize, Idx);

fn ix(s: &Sym) -> Ix {
    (s.level, s.idx.clone())
}

#[derive(Debug, Clone, Default)]
pub struct ComponentOmega {
    pub z: BTreeMap<(Ix, Ix), Element>,
    pub u3: BTreeMap<(Ix, Ix, Ix), Q>,
    pub u4: BTreeMap<(Ix, Ix, Ix, Ix), Q>,
}

struct Ctx<'a> {
    alg: &'a GradedAlgebra,
    om: &'a ComponentOmega,
    z_by: HashMap<Ix, Vec<Ix>>,
    u3_by: HashMap<(Ix, Ix), Vec<(Ix, Q)>>,
    u4_by: HashMap<(Ix, Ix), Vec<(Ix, Ix, Q)>>,
}

/// Parity of the symbol `Cⁿ_A`.
fn par(alg: &GradedAlgebra, a: &Ix) -> usize {
    (a.0 + alg.parity_of(&a.1) as usize) % 2
}

/// `ε_A`, with `ε(C^A) = ε_A + 1`.
fn eps(alg: &GradedAlgebra, a: &Ix) -> usize {
    (par(alg, a) + 1) % 2
}

/// `π_B = s·P̄_B`.
fn sp(alg: &GradedAlgebra, b: &Ix) -> Q {
    if par(alg, b) == 1 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Reads `Z`, `U_{AB}^C`, `U_{AB}^{CD}` off the canonical Ω terms.
pub fn component_omega(reg: &URegistry, model: IndexModel) -> ComponentOmega {
    let alg = reg.algebra();
    let mut canonical: BTreeMap<(Option<Basis>, Vec<Sym>, Vec<Sym>), Q> = BTreeMap::new();
    for t in build_omega(reg, model) {
        let mut g = t.ghosts.clone();
        let Some(c1) = canon(alg, t.coef, &mut g) else { continue };
        let mut p = t.moms.clone();
        let Some(c2) = canon(alg, c1, &mut p) else { continue };
        *canonical.entry((t.lead, g, p)).or_insert_with(Q::zero) += c2;
    }
    let mut om = ComponentOmega::default();
    for ((lead, g, p), u) in canonical {
        if u.is_zero() {
            continue;
        }
        match (g.len(), p.len()) {
            (1, 0) => {}
            (1, 1) => {
                let (a, b) = (ix(&g[0]), ix(&p[0]));
                let l = lead.expect("Z terms carry a lead");
                let s = sign(alg.parity(l) as usize * par(alg, &a)) * sp(alg, &b);
                om.z.entry((a, b)).or_insert_with(Element::zero).add_term(l, u * s);
            }
            (2, 1) => {
                let (x, y, c) = (ix(&g[0]), ix(&g[1]), ix(&p[0]));
                let base = u * sign(par(alg, &x) + 1) * sp(alg, &c);
                if x != y {
                    let flip = -sign(eps(alg, &x) * eps(alg, &y));
                    *om.u3.entry((y.clone(), x.clone(), c.clone())).or_insert_with(Q::zero) += base;
                    *om.u3.entry((x, y, c)).or_insert_with(Q::zero) += flip * base;
                } else {
                    *om.u3.entry((x.clone(), x, c)).or_insert_with(Q::zero) += q(2) * base;
                }
            }
            (2, 2) => {
                let (x, y, c1, d1) = (ix(&g[0]), ix(&g[1]), ix(&p[0]), ix(&p[1]));
                let mut mult = Q::one();
                if x == y {
                    mult *= frac(1, 2);
                }
                if c1 == d1 {
                    mult *= frac(1, 2);
                }
                let v = u * sign(par(alg, &x) + 1) * sign(eps(alg, &d1)) * sp(alg, &c1) * sp(alg, &d1) / mult;
                let ab: Vec<(Ix, Ix, Q)> = if x != y {
                    vec![(y.clone(), x.clone(), Q::one()), (x.clone(), y.clone(), -sign(eps(alg, &x) * eps(alg, &y)))]
                } else {
                    vec![(x.clone(), x.clone(), Q::one())]
                };
                let cd: Vec<(Ix, Ix, Q)> = if c1 != d1 {
                    vec![(d1.clone(), c1.clone(), Q::one()), (c1.clone(), d1.clone(), -sign(eps(alg, &c1) * eps(alg, &d1)))]
                } else {
                    vec![(c1.clone(), c1.clone(), Q::one())]
                };
                for (a, b, s1) in &ab {
                    for (c, d, s2) in &cd {
                        let e = om.u4.entry((a.clone(), b.clone(), c.clone(), d.clone())).or_insert_with(Q::zero);
                        *e += v * s1 * s2;
                    }
                }
            }
            shape => panic!("unexpected Ω term shape {shape:?}"),
        }
    }
    om.z.retain(|_, e| !e.is_zero());
    om.u3.retain(|_, v| !v.is_zero());
    om.u4.retain(|_, v| !v.is_zero());
    om
}

impl<'a> Ctx<'a> {
    fn new(alg: &'a GradedAlgebra, om: &'a ComponentOmega) -> Self {
        let mut z_by: HashMap<Ix, Vec<Ix>> = HashMap::new();
        for (a, b) in om.z.keys() {
            z_by.entry(a.clone()).or_default().push(b.clone());
        }
        let mut u3_by: HashMap<(Ix, Ix), Vec<(Ix, Q)>> = HashMap::new();
        for ((a, b, c), v) in &om.u3 {
            u3_by.entry((a.clone(), b.clone())).or_default().push((c.clone(), *v));
        }
        let mut u4_by: HashMap<(Ix, Ix), Vec<(Ix, Ix, Q)>> = HashMap::new();
        for ((a, b, c, d), v) in &om.u4 {
            u4_by.entry((a.clone(), b.clone())).or_default().push((c.clone(), d.clone(), *v));
        }
        Ctx { alg, om, z_by, u3_by, u4_by }
    }

    fn eps(&self, a: &Ix) -> usize {
        eps(self.alg, a)
    }

    fn zs(&self, a: &Ix) -> &[Ix] {
        self.z_by.get(a).map_or(&[], |v| v)
    }

    fn z(&self, a: &Ix, b: &Ix) -> Element {
        self.om.z.get(&(a.clone(), b.clone())).cloned().unwrap_or_else(Element::zero)
    }

    fn u3(&self, a: &Ix, b: &Ix) -> &[(Ix, Q)] {
        self.u3_by.get(&(a.clone(), b.clone())).map_or(&[], |v| v)
    }

    fn u4(&self, a: &Ix, b: &Ix) -> &[(Ix, Ix, Q)] {
        self.u4_by.get(&(a.clone(), b.clone())).map_or(&[], |v| v)
    }

    fn t(&self, a: &Ix) -> Element {
        if a.0 == 1 {
            Element::basis(a.1[0])
        } else {
            Element::zero()
        }
    }

    fn comm(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (a, va) in x.iter() {
            for (b, vb) in y.iter() {
                out.add_scaled(&self.alg.bracket(a, b), va * vb);
            }
        }
        out
    }
}

fn flat(parts: &[&Ix]) -> Vec<Basis> {
    parts.iter().flat_map(|p| p.1.iter().copied()).collect()
}

fn element_failures(input: Vec<Basis>, head: Vec<Basis>, e: &Element, out: &mut Vec<Witness>) {
    for (k, v) in e.iter() {
        let mut output = head.clone();
        output.push(k);
        out.push(Witness { input: input.clone(), output, value: v });
    }
}

/// Capital indices of level `1..=max_arity` admitted by the model.
pub fn indices(alg: &GradedAlgebra, max_arity: usize, model: IndexModel) -> Vec<Ix> {
    let mut out = Vec::new();
    for n in 1..=max_arity {
        for x in basis_indices(alg.dim(), n) {
            if model.admits(n, &x) {
                out.push((n, x));
            }
        }
    }
    out
}

/// The five identities for indices of arity at most `max_arity`, restricted
/// to combinations whose total level stays inside the truncation.
pub fn component_identities(reg: &URegistry, max_arity: usize, model: IndexModel) -> Vec<ResidualReport> {
    let alg = reg.algebra();
    let level = reg.level();
    let om = component_omega(reg, model);
    let cx = Ctx::new(alg, &om);
    let idx = indices(alg, max_arity, model);
    let mut reports = Vec::new();
    let half = frac(1, 2);
    let unit = Element::basis(0);

    // C2P1
    let (mut fails, mut checked) = (Vec::new(), 0);
    for a in &idx {
        for b in &idx {
            if a.0 + b.0 > level {
                continue;
            }
            let (ea, eb) = (cx.eps(a), cx.eps(b));
            let mut lhs: BTreeMap<Ix, Element> = BTreeMap::new();
            let mut add = |d: &Ix, e: &Element, c: Q| lhs.entry(d.clone()).or_insert_with(Element::zero).add_scaled(e, c);
            for d in cx.zs(b) {
                add(d, &cx.comm(&cx.t(a), &cx.z(b, d)), Q::one());
            }
            for d in cx.zs(a) {
                add(d, &cx.comm(&cx.t(b), &cx.z(a, d)), -sign(ea * eb));
            }
            for (c, v) in cx.u3(a, b) {
                for d in cx.zs(c) {
                    add(d, &cx.z(c, d), -*v);
                }
            }
            for (d, c, v) in cx.u4(a, b) {
                add(d, &cx.t(c), *v);
            }
            for c in cx.zs(a) {
                for (d, v) in cx.u3(c, b) {
                    add(d, &cx.z(a, c), *v * sign(eb));
                }
            }
            for c in cx.zs(b) {
                for (d, v) in cx.u3(c, a) {
                    add(d, &cx.z(b, c), -*v * sign(ea * (1 + eb)));
                }
            }
            for (e, c, v) in cx.u4(a, b) {
                for (d, v2) in cx.u3(c, e) {
                    add(d, &unit, -half * v * v2);
                }
            }
            for (d, e) in &lhs {
                checked += 1;
                element_failures(flat(&[a, b]), flat(&[d]), e, &mut fails);
            }
        }
    }
    reports.push(component_report("C2P1", max_arity, checked, fails));

    // C3P1. Cubic terms consume maps of input level at most a + b + c - 1,
    // so they stay inside the truncation one level further than C2.
    let (mut fails, mut checked) = (Vec::new(), 0);
    for a in &idx {
        for b in &idx {
            for c in &idx {
                if a.0 + b.0 + c.0 > level + 2 {
                    continue;
                }
                let mut acc: BTreeMap<Ix, Q> = BTreeMap::new();
                for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                    let s = sign(cx.eps(x) * cx.eps(z));
                    for (d, v) in cx.u3(x, y) {
                        for (e, v2) in cx.u3(d, z) {
                            *acc.entry(e.clone()).or_insert_with(Q::zero) += s * v * v2;
                        }
                    }
                }
                checked += 1;
                for (e, v) in acc {
                    if !v.is_zero() {
                        fails.push(Witness { input: flat(&[a, b, c]), output: flat(&[&e]), value: v });
                    }
                }
            }
        }
    }
    reports.push(component_report("C3P1", max_arity, checked, fails));

    // C2P2
    let (mut fails, mut checked) = (Vec::new(), 0);
    for a in &idx {
        for b in &idx {
            if a.0 + b.0 > level {
                continue;
            }
            let (ea, eb) = (cx.eps(a), cx.eps(b));
            let mut lhs: BTreeMap<(Ix, Ix), Element> = BTreeMap::new();
            let mut add = |d: &Ix, e: &Ix, x: &Element, c: Q| {
                lhs.entry((d.clone(), e.clone())).or_insert_with(Element::zero).add_scaled(x, c)
            };
            for d in cx.zs(a) {
                for e in cx.zs(b) {
                    let (ed, ee) = (cx.eps(d), cx.eps(e));
                    let cm = cx.comm(&cx.z(a, d), &cx.z(b, e));
                    add(d, e, &cm, sign((eb + 1) * (ed + 1)));
                    add(e, d, &cm, -sign((eb + 1) * (ed + 1) + ed * ee));
                }
            }
            for (d, c, v) in cx.u4(a, b) {
                for e in cx.zs(c) {
                    let (ed, ee) = (cx.eps(d), cx.eps(e));
                    add(d, e, &cx.z(c, e), -*v * sign(ed));
                    add(e, d, &cx.z(c, e), *v * sign(ed * (1 + ee)));
                }
            }
            for c in cx.zs(a) {
                for (d, e, v) in cx.u4(c, b) {
                    add(d, e, &cx.z(a, c), -*v * sign(eb));
                }
            }
            for c in cx.zs(b) {
                for (d, e, v) in cx.u4(c, a) {
                    add(d, e, &cx.z(b, c), *v * sign(ea * (1 + eb)));
                }
            }
            for (f, c, v) in cx.u4(a, b) {
                for (d, e, v2) in cx.u4(c, f) {
                    add(d, e, &unit, half * v * v2);
                }
            }
            for ((d, e), x) in &lhs {
                checked += 1;
                element_failures(flat(&[a, b]), flat(&[d, e]), x, &mut fails);
            }
        }
    }
    reports.push(component_report("C2P2", max_arity, checked, fails));

    // C3P2 and C3P3
    let (mut fails2, mut fails3, mut checked2, mut checked3) = (Vec::new(), Vec::new(), 0, 0);
    for a in &idx {
        for b in &idx {
            for c in &idx {
                if a.0 + b.0 + c.0 > level + 2 {
                    continue;
                }
                let mut acc: BTreeMap<(Ix, Ix), Q> = BTreeMap::new();
                let mut base: BTreeMap<(Ix, Ix, Ix), Q> = BTreeMap::new();
                for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                    let s = sign(cx.eps(x) * cx.eps(z));
                    let ez = cx.eps(z);
                    for (d, v) in cx.u3(x, y) {
                        for (e, f, v2) in cx.u4(d, z) {
                            *acc.entry((e.clone(), f.clone())).or_insert_with(Q::zero) += s * v * v2;
                        }
                    }
                    for (e, d, v) in cx.u4(x, y) {
                        for (f, v2) in cx.u3(d, z) {
                            let (ee, ef) = (cx.eps(e), cx.eps(f));
                            let w = s * v * v2 * sign((ee + 1) * ez);
                            *acc.entry((e.clone(), f.clone())).or_insert_with(Q::zero) += w;
                            *acc.entry((f.clone(), e.clone())).or_insert_with(Q::zero) -= w * sign(ee * ef);
                        }
                    }
                    for (e, d, v) in cx.u4(x, y) {
                        for (f, g, v2) in cx.u4(d, z) {
                            let (ee, eg) = (cx.eps(e), cx.eps(g));
                            let sg = sign((ee + 1) * (ez + 1) + cx.eps(x) * ez + ee * eg);
                            *base.entry((e.clone(), f.clone(), g.clone())).or_insert_with(Q::zero) += sg * v * v2;
                        }
                    }
                }
                checked2 += 1;
                for ((e, f), v) in acc {
                    if !v.is_zero() {
                        fails2.push(Witness { input: flat(&[a, b, c]), output: flat(&[&e, &f]), value: v });
                    }
                }
                let get = |k: (&Ix, &Ix, &Ix)| base.get(&(k.0.clone(), k.1.clone(), k.2.clone())).copied().unwrap_or_default();
                for (e, f, g) in base.keys() {
                    checked3 += 1;
                    let sum = get((e, f, g)) + get((f, g, e)) + get((g, e, f));
                    if !sum.is_zero() {
                        fails3.push(Witness { input: flat(&[a, b, c]), output: flat(&[e, f, g]), value: sum });
                    }
                }
            }
        }
    }
    reports.push(component_report("C3P2", max_arity, checked2, fails2));
    reports.push(component_report("C3P3", max_arity, checked3, fails3));
    reports
}

fn component_report(name: &str, max_arity: usize, checked: usize, fails: Vec<Witness>) -> ResidualReport {
    ResidualReport::new(Family::CubicComponent, vec![max_arity]).labelled(name).with_checked(checked).with_failures(fails)
}
