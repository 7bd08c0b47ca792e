//! Closed forms of the first structure maps on purely even algebras, used to
//! cross-check the solved recursion. Inputs are written `a, b, a′, b′, c′`
//! for the slots of `Cᵐ ⊗ C^{m′}`.

use crate::algebra::{Basis, GradedAlgebra};
use crate::recursion::{inner_lie, symmetrize_halves, UKey};
use crate::scalar::{frac, q, sign, Q};
use crate::tensor::{basis_indices, idx, MultiMap, TensorVector};

#[derive(Clone, Copy)]
enum Factor {
    Slot(usize),
    Prod(usize, usize),
}
use Factor::{Prod, Slot};

fn eval(alg: &GradedAlgebra, z: &[Basis], coef: Q, factors: &[Factor]) -> TensorVector {
    let mut out = TensorVector::from_terms(0, [(idx(&[]), coef)]);
    for f in factors {
        let v = match *f {
            Slot(i) => TensorVector::basis(&[z[i]]),
            Prod(i, j) => TensorVector::from_terms(1, alg.mul_basis(z[i], z[j]).iter().map(|(c, v)| (idx(&[*c]), *v))),
        };
        out = out.tensor(&v);
    }
    out
}

fn from_terms(alg: &GradedAlgebra, key: UKey, scale: Q, terms: &[(i128, &[Factor])]) -> MultiMap {
    MultiMap::from_fn(alg.dim(), key.in_arity(), key.split(), |z| {
        let mut acc = TensorVector::zero(key.out_arity());
        for (c, fs) in terms {
            acc.add_scaled(&eval(alg, z, scale * q(*c), fs), q(1));
        }
        acc
    })
}

const A: usize = 0;
const B: usize = 1;
const A2: usize = 2;
const B2: usize = 3;
const C2: usize = 4;

/// `U_{2,2}^{1,2}`, the symmetrized canonical solution at `k = 2`.
pub fn u2212(alg: &GradedAlgebra) -> MultiMap {
    let terms: [(i128, &[Factor]); 6] = [
        (-1, &[Prod(A, B), Slot(A2), Slot(B2)]),
        (1, &[Slot(B), Prod(A, A2), Slot(B2)]),
        (-1, &[Slot(B), Slot(A), Prod(A2, B2)]),
        (-1, &[Prod(A2, B2), Slot(A), Slot(B)]),
        (1, &[Slot(B2), Prod(A2, A), Slot(B)]),
        (-1, &[Slot(B2), Slot(A2), Prod(A, B)]),
    ];
    from_terms(alg, UKey::new(2, 2, 1, 2), frac(1, 2), &terms)
}

/// `U_{2,2}^3`.
pub fn u2203(alg: &GradedAlgebra) -> MultiMap {
    let terms: [(i128, &[Factor]); 14] = [
        (1, &[Slot(A), Slot(A2), Prod(B2, B)]),
        (-1, &[Slot(A), Slot(A2), Prod(B, B2)]),
        (1, &[Slot(A), Prod(A2, B), Slot(B2)]),
        (-1, &[Slot(A), Prod(B, A2), Slot(B2)]),
        (1, &[Slot(A2), Slot(A), Prod(B, B2)]),
        (-1, &[Slot(A2), Slot(A), Prod(B2, B)]),
        (1, &[Slot(A2), Prod(A, B2), Slot(B)]),
        (-1, &[Slot(A2), Prod(B2, A), Slot(B)]),
        (1, &[Slot(B), Slot(A), Prod(A2, B2)]),
        (-1, &[Slot(B), Prod(A, A2), Slot(B2)]),
        (1, &[Slot(B2), Slot(A2), Prod(A, B)]),
        (-1, &[Slot(B2), Prod(A2, A), Slot(B)]),
        (1, &[Prod(A, B), Slot(A2), Slot(B2)]),
        (1, &[Prod(A2, B2), Slot(A), Slot(B)]),
    ];
    from_terms(alg, UKey::new(2, 2, 0, 3), frac(1, 2), &terms)
}

/// `U_{2,3}^{1,3}` on `a ⊗ b ⊗ a′ ⊗ b′ ⊗ c′`.
pub fn u2313(alg: &GradedAlgebra) -> MultiMap {
    let terms: [(i128, &[Factor]); 8] = [
        (1, &[Slot(C2), Slot(A2), Prod(B2, A), Slot(B)]),
        (-1, &[Slot(C2), Slot(A2), Slot(B2), Prod(A, B)]),
        (-1, &[Slot(B), Prod(A2, A), Slot(B2), Slot(C2)]),
        (1, &[Slot(B), Slot(A2), Prod(A, B2), Slot(C2)]),
        (-1, &[Slot(B), Slot(A2), Slot(A), Prod(B2, C2)]),
        (1, &[Slot(B), Prod(A, A2), Slot(B2), Slot(C2)]),
        (-1, &[Prod(A, B), Slot(A2), Slot(B2), Slot(C2)]),
        (-1, &[Prod(B2, C2), Slot(A2), Slot(A), Slot(B)]),
    ];
    from_terms(alg, UKey::new(2, 3, 1, 3), q(1), &terms)
}

/// `U_{2,3}^{1,3}` as a component tensor `U^{g,hij}_{ab,cde}` built from
/// Kronecker deltas and structure constants `f(x,y)^k`.
pub fn u2313_components(alg: &GradedAlgebra) -> MultiMap {
    let d = alg.dim();
    let f = |x: Basis, y: Basis, k: Basis| alg.structure_constant(x as usize, y as usize, k as usize);
    let dl = |x: Basis, y: Basis| if x == y { q(1) } else { q(0) };
    MultiMap::from_fn(d, 5, (1, 3), |z| {
        let (a, b, c, dd, e) = (z[0], z[1], z[2], z[3], z[4]);
        let mut out = TensorVector::zero(4);
        for o in basis_indices(d, 4) {
            let (g, h, i, j) = (o[0], o[1], o[2], o[3]);
            let val = dl(e, g) * dl(c, h) * f(dd, a, i) * dl(b, j) - dl(e, g) * dl(c, h) * dl(dd, i) * f(a, b, j)
                - dl(b, g) * f(c, a, h) * dl(dd, i) * dl(e, j)
                + dl(b, g) * dl(c, h) * f(a, dd, i) * dl(e, j)
                - dl(b, g) * dl(c, h) * dl(a, i) * f(dd, e, j)
                + dl(b, g) * f(a, c, h) * dl(dd, i) * dl(e, j)
                - f(a, b, g) * dl(c, h) * dl(dd, i) * dl(e, j)
                - f(dd, e, g) * dl(c, h) * dl(a, i) * dl(b, j);
            out.add_term(o, val);
        }
        out
    })
}

/// `U_{1,n}^n = (−1)ⁿ L_{a₀}` on the remaining slots. Holds for every grading.
pub fn u1nn(alg: &GradedAlgebra, n: usize) -> MultiMap {
    MultiMap::from_fn(alg.dim(), n + 1, (0, n), |z| inner_lie(alg, z[0], &z[1..]).scaled(sign(n)))
}

/// The closed form for `key`, when one is known for this algebra.
pub fn closed_form(alg: &GradedAlgebra, key: UKey) -> Option<MultiMap> {
    let even = alg.is_even();
    match (key.in1, key.in2, key.out1, key.out2) {
        (1, 1, 0, 1) => Some(crate::recursion::base_u111(alg)),
        (1, n, 0, m) if n == m && n >= 2 => Some(u1nn(alg, n)),
        (2, 2, 1, 2) if even => Some(u2212(alg)),
        (2, 2, 0, 3) if even => Some(u2203(alg)),
        (2, 3, 1, 3) if even => Some(u2313(alg)),
        _ => None,
    }
}

/// The defining expression behind `U_{2,2}^{1,2}` before symmetrization, kept
/// to check that the symmetrized form agrees with the stored map.
pub fn u2212_unsymmetrized(alg: &GradedAlgebra) -> MultiMap {
    let terms: [(i128, &[Factor]); 3] = [
        (-1, &[Prod(A, B), Slot(A2), Slot(B2)]),
        (1, &[Slot(B), Prod(A, A2), Slot(B2)]),
        (-1, &[Slot(B), Slot(A), Prod(A2, B2)]),
    ];
    let raw = from_terms(alg, UKey::new(2, 2, 1, 2), q(1), &terms);
    symmetrize_halves(alg, 2, &raw)
}
