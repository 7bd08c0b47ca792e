//! Randomized checks of the sign conventions and the bar calculus.

use brst_core::bar::{bprime, bprime_on, contraction_i, form_d, lie_derivative, z_on, zz_through_maps, Derivation};
use brst_core::scalar::q;
use brst_core::tensor::{block_swap_on, concat, koszul_sign, perm_1i_on, perm_i1_on, Idx};
use brst_core::{Basis, Element, GradedAlgebra, MultiMap, TensorVector};
use proptest::prelude::*;
use proptest::sample::Index;

fn catalog(i: usize) -> GradedAlgebra {
    GradedAlgebra::builtin(GradedAlgebra::catalog()[i % 5]).unwrap()
}

fn tensor(alg: &GradedAlgebra, picks: &[Index]) -> Idx {
    picks.iter().map(|p| p.index(alg.dim()) as Basis).collect()
}

fn perm_and_parities(max: usize) -> impl Strategy<Value = (Vec<usize>, Vec<u8>)> {
    (1..=max).prop_flat_map(|n| {
        (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), proptest::collection::vec(0u8..2, n))
    })
}

/// A derivation that is not inner on the commutative catalog entries:
/// scaling of the nilpotent generator.
fn scaling(alg: &GradedAlgebra, c: i128) -> Option<Derivation> {
    let m = match alg.name() {
        "dual_numbers" | "exterior1" => {
            MultiMap::from_fn(2, 1, (0, 1), |x| if x[0] == 1 { TensorVector::from_terms(1, [(Idx::from_slice(&[1]), q(c))]) } else { TensorVector::zero(1) })
        }
        _ => return None,
    };
    Some(Derivation::general(alg, m, 0).unwrap())
}

fn derivation(alg: &GradedAlgebra, coeffs: &[i128]) -> Derivation {
    if let Some(d) = scaling(alg, coeffs[0]) {
        return d;
    }
    let mut x = Element::zero();
    for (b, c) in coeffs.iter().enumerate().take(alg.dim()) {
        if alg.parity(b as Basis) == 0 {
            x.add_term(b as Basis, q(*c));
        }
    }
    Derivation::inner(alg, x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn koszul_sign_is_multiplicative((p, par) in perm_and_parities(7), seed in any::<u64>()) {
        let n = p.len();
        let mut tau: Vec<usize> = (0..n).collect();
        tau.rotate_left((seed as usize) % n);
        tau.swap(0, (seed as usize / 7) % n);
        let moved: Vec<u8> = p.iter().map(|&i| par[i]).collect();
        let composite: Vec<usize> = tau.iter().map(|&k| p[k]).collect();
        prop_assert_eq!(koszul_sign(&composite, &par), koszul_sign(&p, &par) * koszul_sign(&tau, &moved));
    }

    #[test]
    fn koszul_sign_of_inverse((p, par) in perm_and_parities(7)) {
        let mut inv = vec![0; p.len()];
        for (k, &i) in p.iter().enumerate() {
            inv[i] = k;
        }
        let moved: Vec<u8> = p.iter().map(|&i| par[i]).collect();
        prop_assert_eq!(koszul_sign(&inv, &moved), koszul_sign(&p, &par));
    }

    #[test]
    fn moving_a_slot_front_and_back_is_identity(a in 0usize..5, picks in proptest::collection::vec(any::<Index>(), 2..7), i in any::<Index>()) {
        let alg = catalog(a);
        let x = tensor(&alg, &picks);
        let i = 1 + i.index(x.len());
        let (y, s1) = perm_1i_on(&alg, i, &x);
        let (z, s2) = perm_i1_on(&alg, i, &y);
        prop_assert_eq!(z, x);
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn block_swap_is_an_involution(a in 0usize..5, picks in proptest::collection::vec(any::<Index>(), 2..7), p in any::<Index>()) {
        let alg = catalog(a);
        let x = tensor(&alg, &picks);
        let p = 1 + p.index(x.len() - 1);
        let (y, s1) = block_swap_on(&alg, p, &x);
        let (z, s2) = block_swap_on(&alg, x.len() - p, &y);
        prop_assert_eq!(z, x);
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn homotopy_inverts_bprime(a in 0usize..5, picks in proptest::collection::vec(any::<Index>(), 1..7)) {
        let alg = catalog(a);
        let x = tensor(&alg, &picks);
        let mut v = TensorVector::zero(x.len());
        for (y, c) in bprime_on(&alg, &x).iter() {
            v.add_term(concat(&[0], y), *c);
        }
        v.add_scaled(&z_on(&alg, &x), q(1));
        prop_assert_eq!(v, TensorVector::basis(&x));
    }

    #[test]
    fn bprime_squares_to_zero(a in 0usize..5, picks in proptest::collection::vec(any::<Index>(), 3..8)) {
        let alg = catalog(a);
        let x = tensor(&alg, &picks);
        let twice = bprime_on(&alg, &x).map_linear(x.len() - 2, |y| bprime_on(&alg, y));
        prop_assert!(twice.is_zero());
    }

    #[test]
    fn cartan_and_contraction_rules(a in 0usize..5, coeffs in proptest::collection::vec(-3i128..=3, 4), n in 1usize..4) {
        let alg = catalog(a);
        let d = derivation(&alg, &coeffs);
        let lie = lie_derivative(&alg, &d, n);
        let di = form_d(&alg, n - 1).compose(&contraction_i(&alg, &d, n)).unwrap();
        let id = contraction_i(&alg, &d, n + 1).compose(&form_d(&alg, n)).unwrap();
        prop_assert_eq!(di.add(&id).unwrap(), lie);
        let ib = contraction_i(&alg, &d, n).compose(&bprime(&alg, n + 2).unwrap()).unwrap();
        let bi = bprime(&alg, n + 1).unwrap().compose(&contraction_i(&alg, &d, n + 1)).unwrap();
        prop_assert!(ib.add(&bi).unwrap().is_zero());
    }
}

#[test]
fn through_maps_vanish_on_every_catalog_algebra() {
    for i in 0..5 {
        let alg = catalog(i);
        for n in 3..=5 {
            let (f, s) = zz_through_maps(&alg, n).unwrap();
            assert!(f.is_zero() && s.is_zero(), "{} n={n}", alg.name());
        }
    }
}

#[test]
fn through_maps_see_a_broken_product() {
    let bad = GradedAlgebra::builtin("mat2").unwrap().with_structure_constant(2, 3, 1, q(2)).unwrap();
    let (f, s) = zz_through_maps(&bad, 3).unwrap();
    assert!(!f.is_zero() || !s.is_zero());
}
