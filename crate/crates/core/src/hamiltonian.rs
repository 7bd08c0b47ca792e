//! The Hamiltonian extension `ℋ = H + Σₙ ⟨Vₙ(Cⁿ), Pₙ⟩` for an even `H ∈ A`,
//! with `Vₙ = (−1)ⁿ L_H` and the bilinear-in-momenta terms set to zero.

use thiserror::Error;

use crate::algebra::{Basis, Element, GradedAlgebra};
use crate::bar::{lie_derivative, z_map, Derivation};
use crate::recursion::{UKey, URegistry};
use crate::report::{Family, ResidualReport, Witness};
use crate::scalar::{sign, Q};
use crate::tensor::{ad_first, MultiMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HamiltonianError {
    #[error("H must be homogeneous and even")]
    NotEven,
    #[error("level must be at least 1")]
    Level,
}

#[derive(Debug, Clone)]
pub struct HamiltonianExtension {
    pub h: Element,
    /// `v[n − 1] = Vₙ`, an arity-`n` endomorphism.
    v: Vec<MultiMap>,
}

/// `L_H = [H, −]` acting in every slot of arity-`n` tensors.
pub fn lie_h(alg: &GradedAlgebra, h: &Element, n: usize) -> MultiMap {
    lie_derivative(alg, &Derivation::Inner(h.clone()), n - 1)
}

impl HamiltonianExtension {
    /// `Vₙ = (−1)ⁿ L_H` for `1 ≤ n ≤ level`.
    pub fn build(alg: &GradedAlgebra, h: Element, level: usize) -> Result<Self, HamiltonianError> {
        Self::with_signs(alg, h, level, |n| sign(n))
    }

    /// `Vₙ = +L_H` at every `n`: wrong at odd `n`.
    pub fn wrong_sign(alg: &GradedAlgebra, h: Element, level: usize) -> Result<Self, HamiltonianError> {
        Self::with_signs(alg, h, level, |_| Q::from_integer(1))
    }

    fn with_signs(
        alg: &GradedAlgebra,
        h: Element,
        level: usize,
        s: impl Fn(usize) -> Q,
    ) -> Result<Self, HamiltonianError> {
        if h.parity(alg) != Some(0) && !h.is_zero() {
            return Err(HamiltonianError::NotEven);
        }
        if level == 0 {
            return Err(HamiltonianError::Level);
        }
        let v = (1..=level).map(|n| lie_h(alg, &h, n).scale(s(n))).collect();
        Ok(HamiltonianExtension { h, v })
    }

    pub fn level(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self, n: usize) -> &MultiMap {
        &self.v[n - 1]
    }

    /// `[H, a] + V₁(a)` on every basis element.
    pub fn check_unit_order(&self, alg: &GradedAlgebra) -> ResidualReport {
        let mut failures = Vec::new();
        for a in 0..alg.dim() as Basis {
            let mut r = Element::zero();
            for (b, hb) in self.h.iter() {
                r.add_scaled(&alg.bracket(b, a), hb);
            }
            for (k, c) in self.v(1).column(&[a]).iter() {
                r.add_term(k[0], *c);
            }
            for (k, c) in r.iter() {
                failures.push(Witness { input: vec![a], output: vec![k], value: c });
            }
        }
        ResidualReport::new(Family::Hamiltonian, vec![1])
            .labelled("[H,C] + V(C)")
            .with_checked(alg.dim())
            .with_failures(failures)
    }

    /// `ad¹_H Z_{n+1} + (−1)ⁿ Z_{n+1} V_{n+1} + (−1)ⁿ (id⊗Vₙ) Z_{n+1}` on arity `n + 1`.
    pub fn linear_residual(&self, alg: &GradedAlgebra, n: usize) -> MultiMap {
        let z = z_map(alg, n + 1).expect("arity ≥ 2");
        let ad = ad_first(alg, &self.h, n + 1).expect("H homogeneous");
        let first = ad.compose(&z).unwrap();
        let second = z.compose(self.v(n + 1)).unwrap().scale(sign(n));
        let third = self.v(n).pad_left_identity(1).with_split((0, n + 1)).compose(&z).unwrap().scale(sign(n));
        first.add(&second).unwrap().add(&third).unwrap()
    }

    /// The momentum-linear conditions for `1 ≤ n < level`.
    pub fn check_linear_c(&self, alg: &GradedAlgebra) -> Vec<ResidualReport> {
        let mut out = vec![self.check_unit_order(alg)];
        for n in 1..self.level() {
            let r = self.linear_residual(alg, n);
            out.push(ResidualReport::from_map(Family::Hamiltonian, vec![n], &r).labelled("ad H Z + Z V + (id⊗V) Z"));
        }
        out
    }

    /// `L_H∘U − U∘L_H`.
    pub fn commutator_with_u(&self, alg: &GradedAlgebra, u: &MultiMap) -> MultiMap {
        let left = lie_h(alg, &self.h, u.out_arity()).compose(u).unwrap();
        let right = u.compose(&lie_h(alg, &self.h, u.in_arity())).unwrap();
        left.sub(&right).unwrap()
    }

    pub fn check_lh_commutes_u(&self, reg: &URegistry, key: UKey) -> bool {
        reg.get(key).is_some_and(|u| self.commutator_with_u(reg.algebra(), u).is_zero())
    }

    /// `L_H∘U = U∘L_H` for every stored key, as one report.
    pub fn check_all_u(&self, reg: &URegistry) -> ResidualReport {
        let alg = reg.algebra();
        let mut failures = Vec::new();
        let mut checked = 0;
        for (_, u) in reg.maps() {
            checked += 1;
            let r = self.commutator_with_u(alg, u);
            failures.extend(r.entries().map(|(x, y, v)| Witness { input: x.to_vec(), output: y.to_vec(), value: v }));
        }
        ResidualReport::new(Family::Hamiltonian, vec![]).labelled("L_H U = U L_H").with_checked(checked).with_failures(failures)
    }
}

/// All checks for every basis element `H` that is even, labelled by `H`,
/// with `V` built one arity past the registry so the linear conditions reach it,
/// plus the wrong-sign control, which passes when the wrong sign is caught
/// or when `H` is central (then every `Vₙ` vanishes and nothing can fail).
pub fn hamiltonian_suite(reg: &URegistry) -> Vec<ResidualReport> {
    let alg = reg.algebra();
    let level = reg.level().max(1) + 1;
    let mut out = Vec::new();
    for b in 0..alg.dim() as Basis {
        if alg.parity(b) != 0 {
            continue;
        }
        let h = Element::basis(b);
        let ext = HamiltonianExtension::build(alg, h.clone(), level).expect("even basis element");
        let tag = |r: ResidualReport| {
            let label = format!("H=e{b}: {}", r.label.clone().unwrap_or_default());
            r.labelled(label)
        };
        out.extend(ext.check_linear_c(alg).into_iter().map(tag));
        out.push(tag(ext.check_all_u(reg)));
        let bad = HamiltonianExtension::wrong_sign(alg, h, level).expect("even basis element");
        let caught = bad.check_linear_c(alg).iter().any(|r| !r.passed);
        let central = (1..=level).all(|n| ext.v(n).is_zero());
        let mut control = ResidualReport::new(Family::Hamiltonian, vec![])
            .labelled(format!("H=e{b}: wrong-sign control{}", if central { " (H central)" } else { "" }))
            .with_checked(1);
        control.passed = caught || central;
        out.push(control);
    }
    out
}
