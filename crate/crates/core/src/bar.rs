//! The bar differential `b′`, the contracting homotopy `s`, the zero-mode maps
//! `Zₙ = b′∘s`, and the calculus of noncommutative forms.
//!
//! A form `a₀ da₁ … daₙ` is the basis tensor `a₀ ⊗ a₁ ⊗ … ⊗ aₙ` and `d` is the
//! shift `1 ⊗ −`. The operators act on full tensors, where the Cartan formula
//! and the commutation rules with `b′` hold exactly; relations that use
//! `d1 = 0` hold after `reduced`.

use num_traits::One;
use thiserror::Error;

use crate::algebra::{Basis, Element, GradedAlgebra};
use crate::report::{Family, ResidualReport};
use crate::scalar::{sign, Q};
use crate::tensor::{concat, idx, mult_1i, neg_if, perm_1i_on, Idx, MultiMap, TensorError, TensorVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("map is not a derivation: Leibniz rule fails at ({0},{1})")]
    NotDerivation(Basis, Basis),
    #[error("derivation matrix must map arity 1 to arity 1")]
    DerivationShape,
}

/// `b′(a₁ ⊗ … ⊗ aₙ) = Σᵢ (−1)^i … ⊗ aᵢaᵢ₊₁ ⊗ …`; zero below arity 2.
pub fn bprime_on(alg: &GradedAlgebra, x: &[Basis]) -> TensorVector {
    let n = x.len();
    let mut out = TensorVector::zero(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let s = sign(i);
        for (c, v) in alg.mul_basis(x[i], x[i + 1]) {
            let mut k = Idx::with_capacity(n - 1);
            k.extend_from_slice(&x[..i]);
            k.push(*c);
            k.extend_from_slice(&x[i + 2..]);
            out.add_term(k, s * *v);
        }
    }
    out
}

/// `Zₙ = b′(1 ⊗ −)`. At arity 1 this is the identity.
pub fn z_on(alg: &GradedAlgebra, x: &[Basis]) -> TensorVector {
    bprime_on(alg, &concat(&[0], x))
}

/// `Z^{[1,i]}_j = P_{1,i}∘(id^{⊗(i−1)} ⊗ Z_j)` on arity `i + j − 1`.
pub fn z_partial_on(alg: &GradedAlgebra, i: usize, x: &[Basis]) -> TensorVector {
    let mut out = TensorVector::zero(x.len());
    for (k, v) in z_on(alg, &x[i - 1..]).iter() {
        let (p, neg) = perm_1i_on(alg, i, &concat(&x[..i - 1], k));
        out.add_term(p, *v * neg_if(neg));
    }
    out
}

pub fn bprime(alg: &GradedAlgebra, n: usize) -> Result<MultiMap, BarError> {
    if n < 2 {
        return Err(TensorError::TooShort("bprime", 2).into());
    }
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n - 1), |x| bprime_on(alg, x)))
}

pub fn z_map(alg: &GradedAlgebra, n: usize) -> Result<MultiMap, BarError> {
    if n < 2 {
        return Err(TensorError::TooShort("z_map", 2).into());
    }
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n), |x| z_on(alg, x)))
}

pub fn z_partial(alg: &GradedAlgebra, i: usize, j: usize) -> Result<MultiMap, BarError> {
    if i < 1 {
        return Err(TensorError::Slot { i, n: i + j - 1 }.into());
    }
    if j < 2 {
        return Err(TensorError::TooShort("z_partial", 2).into());
    }
    let n = i + j - 1;
    Ok(MultiMap::from_fn(alg.dim(), n, (0, n), |x| z_partial_on(alg, i, x)))
}

/// The two through maps `𝔪₁₂∘Zₙ∘(id⊗Z_{n−1})` and `𝔪₁₂∘(id⊗Z_{n−1})∘Zₙ`,
/// both of which vanish on an associative algebra.
pub fn zz_through_maps(alg: &GradedAlgebra, n: usize) -> Result<(MultiMap, MultiMap), BarError> {
    if n < 3 {
        return Err(TensorError::TooShort("zz_through_maps", 3).into());
    }
    let zn = z_map(alg, n)?;
    let inner = z_map(alg, n - 1)?.pad_left_identity(1).with_split((0, n));
    let m12 = mult_1i(alg, 2, n)?;
    let first = m12.compose(&zn.compose(&inner)?)?;
    let second = m12.compose(&inner.compose(&zn)?)?;
    Ok((first, second))
}

#[derive(Debug, Clone)]
pub enum Derivation {
    /// `[x, −]` for a homogeneous `x`.
    Inner(Element),
    /// An explicit arity-1 map, checked against the Leibniz rule.
    General { matrix: MultiMap, parity: u8 },
}

impl Derivation {
    pub fn inner(alg: &GradedAlgebra, x: Element) -> Result<Self, BarError> {
        if x.parity(alg).is_none() {
            return Err(TensorError::NotHomogeneous.into());
        }
        Ok(Derivation::Inner(x))
    }

    pub fn general(alg: &GradedAlgebra, matrix: MultiMap, parity: u8) -> Result<Self, BarError> {
        if matrix.in_arity() != 1 || matrix.out_arity() != 1 {
            return Err(BarError::DerivationShape);
        }
        let d = Derivation::General { matrix, parity };
        d.check_leibniz(alg)?;
        Ok(d)
    }

    pub fn parity(&self, alg: &GradedAlgebra) -> u8 {
        match self {
            Derivation::Inner(x) => x.parity(alg).unwrap_or(0),
            Derivation::General { parity, .. } => *parity,
        }
    }

    pub fn apply_basis(&self, alg: &GradedAlgebra, a: Basis) -> Element {
        match self {
            Derivation::Inner(x) => {
                let mut out = Element::zero();
                for (b, v) in x.iter() {
                    out.add_scaled(&alg.bracket(b, a), v);
                }
                out
            }
            Derivation::General { matrix, .. } => {
                Element::from_pairs(matrix.column(&[a]).iter().map(|(k, v)| (k[0], *v)))
            }
        }
    }

    pub fn apply(&self, alg: &GradedAlgebra, e: &Element) -> Element {
        let mut out = Element::zero();
        for (a, v) in e.iter() {
            out.add_scaled(&self.apply_basis(alg, a), v);
        }
        out
    }

    /// `D(ab) = D(a)b + (−1)^{|D||a|} aD(b)` on all basis pairs.
    pub fn check_leibniz(&self, alg: &GradedAlgebra) -> Result<(), BarError> {
        let pd = self.parity(alg);
        for a in 0..alg.dim() as Basis {
            for b in 0..alg.dim() as Basis {
                let (ea, eb) = (Element::basis(a), Element::basis(b));
                let lhs = self.apply(alg, &alg.multiply(&ea, &eb));
                let mut rhs = alg.multiply(&self.apply_basis(alg, a), &eb);
                let s = neg_if(pd & alg.parity(a) == 1);
                rhs.add_scaled(&alg.multiply(&ea, &self.apply_basis(alg, b)), s);
                if lhs != rhs {
                    return Err(BarError::NotDerivation(a, b));
                }
            }
        }
        Ok(())
    }
}

/// Right action of `c` on the form `x₀ dx₁ … dxₙ`, propagated from the right
/// end by the Leibniz rule (signs of the even case).
pub fn right_action_on(alg: &GradedAlgebra, x: &[Basis], c: Basis) -> TensorVector {
    let n = x.len();
    let mut out = TensorVector::zero(n);
    let Some((&last, head)) = x.split_last() else {
        return out;
    };
    for (k, v) in alg.mul_basis(last, c) {
        out.add_term(concat(head, &[*k]), *v);
    }
    if !head.is_empty() {
        let inner = right_action_on(alg, head, last);
        for (k, v) in inner.iter() {
            out.add_term(concat(k, &[c]), -*v);
        }
    }
    out
}

pub fn right_action(alg: &GradedAlgebra, form: &TensorVector, c: &Element) -> TensorVector {
    let mut out = TensorVector::zero(form.arity());
    for (x, vx) in form.iter() {
        for (b, vc) in c.iter() {
            out.add_scaled(&right_action_on(alg, x, b), *vx * vc);
        }
    }
    out
}

/// `L_D` on forms of degree `n` (tensors of arity `n + 1`): `D` applied in every slot.
pub fn lie_derivative(alg: &GradedAlgebra, d: &Derivation, n: usize) -> MultiMap {
    let pd = d.parity(alg);
    MultiMap::from_fn(alg.dim(), n + 1, (0, n + 1), |x| {
        let mut out = TensorVector::zero(n + 1);
        for k in 0..=n {
            let s = neg_if(pd & alg.parity_of(&x[..k]) == 1);
            for (b, v) in d.apply_basis(alg, x[k]).iter() {
                let mut y = idx(x);
                y[k] = b;
                out.add_term(y, s * v);
            }
        }
        out
    })
}

/// `I_D(a₀ da₁ … daₙ) = Σₖ (−1)^{k−1} (a₀ da₁ … da_{k−1}).D(aₖ) da_{k+1} … daₙ`.
pub fn contraction_i(alg: &GradedAlgebra, d: &Derivation, n: usize) -> MultiMap {
    MultiMap::from_fn(alg.dim(), n + 1, (0, n), |x| {
        let mut out = TensorVector::zero(n);
        for k in 1..=n {
            let s = sign(k - 1);
            for (b, v) in d.apply_basis(alg, x[k]).iter() {
                for (head, w) in right_action_on(alg, &x[..k], b).iter() {
                    out.add_term(concat(head, &x[k + 1..]), s * v * *w);
                }
            }
        }
        out
    })
}

/// `d` on forms of degree `n`: the shift `1 ⊗ −`.
pub fn form_d(alg: &GradedAlgebra, n: usize) -> MultiMap {
    crate::tensor::shift_s(alg, n + 1)
}

/// Forms vanish when any differential slot carries the unit (`d1 = 0`).
pub fn is_reduced_form(x: &[Basis]) -> bool {
    x.iter().skip(1).all(|&a| a != 0)
}

/// Projects a map between form spaces onto reduced forms on both sides.
pub fn reduced(map: &MultiMap) -> MultiMap {
    map.restricted(is_reduced_form, is_reduced_form)
}

/// `s b′ + b′ s = id` and `b′∘b′ = 0` on arities `1..=max_arity`, and both
/// through maps of `zz_through_maps` for `3 ≤ n ≤ max_arity`.
pub fn bar_identities(alg: &GradedAlgebra, max_arity: usize) -> Vec<ResidualReport> {
    let d = alg.dim();
    let mut out = Vec::new();
    for n in 1..=max_arity {
        let homotopy = MultiMap::from_fn(d, n, (0, n), |x| {
            let mut v = TensorVector::zero(n);
            for (y, c) in bprime_on(alg, x).iter() {
                v.add_term(concat(&[0], y), *c);
            }
            v.add_scaled(&bprime_on(alg, &concat(&[0], x)), Q::one());
            v.add_term(idx(x), -Q::one());
            v
        });
        out.push(ResidualReport::from_map(Family::Bar, vec![n], &homotopy).labelled("s b' + b' s - id"));
        if n >= 3 {
            let square = MultiMap::from_fn(d, n, (0, n - 2), |x| {
                bprime_on(alg, x).map_linear(n - 2, |y| bprime_on(alg, y))
            });
            out.push(ResidualReport::from_map(Family::Bar, vec![n], &square).labelled("b' b'"));
            let (first, second) = zz_through_maps(alg, n).expect("n ≥ 3");
            out.push(ResidualReport::from_map(Family::Bar, vec![n], &first).labelled("m12 Z (id x Z)"));
            out.push(ResidualReport::from_map(Family::Bar, vec![n], &second).labelled("m12 (id x Z) Z"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn alg(name: &str) -> GradedAlgebra {
        GradedAlgebra::builtin(name).unwrap()
    }

    fn tv(terms: &[(&[Basis], i128)]) -> TensorVector {
        let n = terms[0].0.len();
        TensorVector::from_terms(n, terms.iter().map(|(k, v)| (idx(k), q(*v))))
    }

    #[test]
    fn bprime_displays() {
        let m = alg("mat2");
        assert_eq!(bprime_on(&m, &[1, 2]), tv(&[(&[2], 1)]));
        // b′(a⊗b⊗c) = ab⊗c − a⊗bc with a = E12, b = E21, c = E12
        assert_eq!(bprime_on(&m, &[2, 3, 2]), tv(&[(&[1, 2], 1), (&[2, 0], -1), (&[2, 1], 1)]));
        assert_eq!(bprime_on(&m, &[0, 3]), tv(&[(&[3], 1)]));
        assert!(bprime(&m, 1).is_err());
    }

    #[test]
    fn z_displays() {
        let m = alg("mat2");
        // Z²(a⊗b) = a⊗b − 1⊗ab
        let z = z_on(&m, &[1, 2]);
        assert_eq!(z, tv(&[(&[1, 2], 1), (&[0, 2], -1)]));
        // Z³(a⊗b⊗c) = a⊗b⊗c − 1⊗ab⊗c + 1⊗a⊗bc
        let z = z_on(&m, &[1, 2, 3]);
        assert_eq!(z, tv(&[(&[1, 2, 3], 1), (&[0, 2, 3], -1), (&[0, 1, 1], 1)]));
        assert!(z_on(&m, &[0, 3]).is_zero());
        assert_eq!(z_on(&m, &[2]), tv(&[(&[2], 1)]));
        assert_eq!(z_partial(&m, 1, 2).unwrap(), z_map(&m, 2).unwrap());
        assert!(z_partial_on(&m, 2, &[2, 0, 3]).is_zero());
        assert_eq!(z_partial_on(&m, 2, &[2, 1, 2]), tv(&[(&[1, 2, 2], 1), (&[0, 2, 2], -1)]));
    }

    #[test]
    fn right_action_displays() {
        let m = alg("mat2");
        // (a₀ da₁).c = a₀ ⊗ a₁c − a₀a₁ ⊗ c with a₀ = E12, a₁ = E21, c = E11
        let got = right_action_on(&m, &[2, 3], 1);
        let mut want = TensorVector::zero(2);
        for (k, v) in m.mul_basis(3, 1) {
            want.add_term(idx(&[2, *k]), *v);
        }
        for (k, v) in m.mul_basis(2, 3) {
            want.add_term(idx(&[*k, 1]), -*v);
        }
        assert_eq!(got, want);
        let form = TensorVector::basis(&[1, 2, 3]);
        let mut times_one = right_action(&m, &form, &Element::basis(0));
        assert_ne!(times_one, form);
        times_one.retain(is_reduced_form);
        assert_eq!(times_one, form);
    }

    #[test]
    fn lie_and_contraction_examples() {
        let m = alg("mat2");
        let unit = Derivation::inner(&m, Element::basis(0)).unwrap();
        assert!(lie_derivative(&m, &unit, 2).is_zero());
        let e11 = Derivation::inner(&m, Element::basis(1)).unwrap();
        assert!(lie_derivative(&m, &e11, 1).column(&[2, 3]).is_zero());
        let i = contraction_i(&m, &e11, 1);
        // I_D(a₀ da₁) = a₀ D(a₁)
        let mut want = TensorVector::zero(1);
        for (c, v) in m.mul_basis(3, 2) {
            want.add_term(idx(&[*c]), *v);
        }
        assert_eq!(i.column(&[3, 2]), &want);
    }

    #[test]
    fn general_derivation_is_checked() {
        let m = alg("mat2");
        let not = MultiMap::identity(4, 1);
        assert!(matches!(Derivation::general(&m, not, 0), Err(BarError::NotDerivation(..))));
        let ad = crate::tensor::ad_first(&m, &Element::basis(2), 1).unwrap();
        assert!(Derivation::general(&m, ad, 0).is_ok());
    }
}
