//! Finite-dimensional Z₂-graded unital algebras given by structure constants.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{format_q, parse_q, q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension must be at least 1")]
    EmptyBasis,
    #[error("unit_index must be 0, got {0}")]
    UnitIndex(usize),
    #[error("parity list has {got} entries, expected {dim}")]
    ParityLength { dim: usize, got: usize },
    #[error("parity of basis element {0} must be 0 or 1")]
    ParityValue(usize),
    #[error("the unit must be even")]
    OddUnit,
    #[error("index out of range in structure constant ({0},{1},{2})")]
    IndexOutOfRange(usize, usize, usize),
    #[error("bad coefficient {0:?}")]
    BadCoefficient(String),
    #[error("unit law violated at ({0},{1})")]
    UnitLaw(usize, usize),
    #[error("parity-inhomogeneous structure constant at ({0},{1},{2})")]
    Inhomogeneous(usize, usize, usize),
    #[error("element is not parity-homogeneous")]
    NotHomogeneous,
    #[error("unknown algebra {0:?}")]
    Unknown(String),
    #[error("invalid algebra file: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Associativity {
    Unchecked,
    Verified,
    Violated,
}

/// Basis indices fit in a byte; the catalog never exceeds dimension 4.
pub type Basis = u8;

#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    name: String,
    dim: usize,
    parity: Vec<u8>,
    // row-major over (a, b)
    table: Vec<Vec<(Basis, Q)>>,
    assoc: Associativity,
}

/// A failing triple `(t_a t_b) t_c ≠ t_a (t_b t_c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssocViolation {
    pub triple: (usize, usize, usize),
    pub left: Element,
    pub right: Element,
}

impl GradedAlgebra {
    /// Builds an algebra from `(a, b, c, f_ab^c)` entries. Repeated triples add up.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        parity: Vec<u8>,
        entries: &[(usize, usize, usize, Q)],
    ) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::EmptyBasis);
        }
        if dim > 255 {
            return Err(AlgebraError::IndexOutOfRange(dim, 0, 0));
        }
        if parity.len() != dim {
            return Err(AlgebraError::ParityLength { dim, got: parity.len() });
        }
        if let Some(i) = parity.iter().position(|&p| p > 1) {
            return Err(AlgebraError::ParityValue(i));
        }
        if parity[0] != 0 {
            return Err(AlgebraError::OddUnit);
        }
        let mut dense: BTreeMap<(usize, usize), BTreeMap<usize, Q>> = BTreeMap::new();
        for &(a, b, c, ref v) in entries {
            if a >= dim || b >= dim || c >= dim {
                return Err(AlgebraError::IndexOutOfRange(a, b, c));
            }
            *dense.entry((a, b)).or_default().entry(c).or_insert_with(Q::zero) += *v;
        }
        let mut table = vec![Vec::new(); dim * dim];
        for ((a, b), row) in dense {
            for (c, v) in row {
                if v.is_zero() {
                    continue;
                }
                if (parity[a] + parity[b]) % 2 != parity[c] {
                    return Err(AlgebraError::Inhomogeneous(a, b, c));
                }
                table[a * dim + b].push((c as Basis, v));
            }
        }
        let alg = GradedAlgebra { name: name.into(), dim, parity, table, assoc: Associativity::Unchecked };
        for x in 0..dim {
            let expect = [(x as Basis, Q::one())];
            if alg.mul_basis(0, x as Basis) != expect {
                return Err(AlgebraError::UnitLaw(0, x));
            }
            if alg.mul_basis(x as Basis, 0) != expect {
                return Err(AlgebraError::UnitLaw(x, 0));
            }
        }
        Ok(alg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self, a: Basis) -> u8 {
        self.parity[a as usize]
    }

    pub fn parities(&self) -> &[u8] {
        &self.parity
    }

    /// Parity of a basis tensor `t_{i1} ⊗ … ⊗ t_{in}`.
    pub fn parity_of(&self, idx: &[Basis]) -> u8 {
        idx.iter().fold(0, |acc, &i| acc ^ self.parity[i as usize])
    }

    pub fn is_even(&self) -> bool {
        self.parity.iter().all(|&p| p == 0)
    }

    pub fn associativity(&self) -> Associativity {
        self.assoc
    }

    /// `t_a t_b` as a sparse list sorted by basis index.
    pub fn mul_basis(&self, a: Basis, b: Basis) -> &[(Basis, Q)] {
        &self.table[a as usize * self.dim + b as usize]
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> Q {
        self.table[a * self.dim + b]
            .iter()
            .find(|(k, _)| *k as usize == c)
            .map(|(_, v)| *v)
            .unwrap_or_else(Q::zero)
    }

    /// Returns a copy with `f_ab^c` replaced. Unit laws and homogeneity are
    /// re-validated; associativity goes back to unchecked.
    pub fn with_structure_constant(&self, a: usize, b: usize, c: usize, v: Q) -> Result<Self, AlgebraError> {
        let mut entries = self.entries();
        entries.retain(|e| (e.0, e.1, e.2) != (a, b, c));
        entries.push((a, b, c, v));
        GradedAlgebra::new(self.name.clone(), self.dim, self.parity.clone(), &entries)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn entries(&self) -> Vec<(usize, usize, usize, Q)> {
        let mut out = Vec::new();
        for a in 0..self.dim {
            for b in 0..self.dim {
                for (c, v) in self.mul_basis(a as Basis, b as Basis) {
                    out.push((a, b, *c as usize, *v));
                }
            }
        }
        out
    }

    fn mul_basis_elem(&self, a: Basis, b: Basis) -> Element {
        Element::from_pairs(self.mul_basis(a, b).iter().copied())
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (&a, va) in &x.coeffs {
            for (&b, vb) in &y.coeffs {
                for (c, v) in self.mul_basis(a, b) {
                    out.add_term(*c, *va * *vb * *v);
                }
            }
        }
        out
    }

    /// Graded commutator `ab − (−1)^{|a||b|} ba` of two basis elements.
    pub fn bracket(&self, a: Basis, b: Basis) -> Element {
        let mut out = self.mul_basis_elem(a, b);
        let s = if self.parity(a) & self.parity(b) == 1 { q(1) } else { q(-1) };
        for (c, v) in self.mul_basis(b, a) {
            out.add_term(*c, s * *v);
        }
        out
    }

    pub fn commutator(&self, x: &Element, y: &Element) -> Result<Element, AlgebraError> {
        let px = x.parity(self).ok_or(AlgebraError::NotHomogeneous)?;
        let py = y.parity(self).ok_or(AlgebraError::NotHomogeneous)?;
        let mut out = self.multiply(x, y);
        let s = if px & py == 1 { q(1) } else { q(-1) };
        out.add_scaled(&self.multiply(y, x), s);
        Ok(out)
    }

    /// Lists every basis triple on which the two bracketings differ and records the result.
    pub fn check_associativity(&mut self) -> Vec<AssocViolation> {
        let report = self.associativity_violations();
        self.assoc = if report.is_empty() { Associativity::Verified } else { Associativity::Violated };
        report
    }

    pub fn associativity_violations(&self) -> Vec<AssocViolation> {
        let mut report = Vec::new();
        for a in 0..self.dim as Basis {
            for b in 0..self.dim as Basis {
                let ab = self.mul_basis_elem(a, b);
                for c in 0..self.dim as Basis {
                    let left = self.multiply(&ab, &Element::basis(c));
                    let right = self.multiply(&Element::basis(a), &self.mul_basis_elem(b, c));
                    if left != right {
                        report.push(AssocViolation { triple: (a as usize, b as usize, c as usize), left, right });
                    }
                }
            }
        }
        report
    }

    pub fn builtin(name: &str) -> Result<Self, AlgebraError> {
        let mut alg = match name {
            "unit" => GradedAlgebra::new("unit", 1, vec![0], &[(0, 0, 0, q(1))]),
            "dual_numbers" => GradedAlgebra::new("dual_numbers", 2, vec![0, 0], &unital(2, &[])),
            "group_Z2" => GradedAlgebra::new("group_Z2", 2, vec![0, 0], &unital(2, &[(1, 1, 0, q(1))])),
            "exterior1" => GradedAlgebra::new("exterior1", 2, vec![0, 1], &unital(2, &[])),
            "mat2" => GradedAlgebra::new("mat2", 4, vec![0; 4], &unital(4, &mat2_products())),
            _ => return Err(AlgebraError::Unknown(name.to_string())),
        }?;
        let bad = alg.check_associativity();
        debug_assert!(bad.is_empty());
        Ok(alg)
    }

    pub fn catalog() -> [&'static str; 5] {
        ["unit", "dual_numbers", "group_Z2", "mat2", "exterior1"]
    }

    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
        if file.unit_index != 0 {
            return Err(AlgebraError::UnitIndex(file.unit_index));
        }
        let mut entries = Vec::with_capacity(file.f.len());
        for (a, b, c, v) in file.f {
            let v = match v {
                Coefficient::Text(s) => parse_q(&s).ok_or(AlgebraError::BadCoefficient(s))?,
                Coefficient::Int(n) => q(n as i128),
            };
            entries.push((a, b, c, v));
        }
        GradedAlgebra::new(file.name, file.dim, file.parity, &entries)
    }

    pub fn to_json(&self) -> String {
        let file = AlgebraFile {
            name: self.name.clone(),
            dim: self.dim,
            unit_index: 0,
            parity: self.parity.clone(),
            f: self.entries().into_iter().map(|(a, b, c, v)| (a, b, c, Coefficient::Text(format_q(&v)))).collect(),
        };
        serde_json::to_string_pretty(&file).expect("algebra serializes")
    }
}

/// Unit rows and columns plus the given products among non-unit elements.
fn unital(dim: usize, extra: &[(usize, usize, usize, Q)]) -> Vec<(usize, usize, usize, Q)> {
    let mut e = vec![(0, 0, 0, q(1))];
    for x in 1..dim {
        e.push((0, x, x, q(1)));
        e.push((x, 0, x, q(1)));
    }
    e.extend_from_slice(extra);
    e
}

/// 2×2 matrices in the basis (1, E11, E12, E21), with E22 = 1 − E11.
fn mat2_products() -> Vec<(usize, usize, usize, Q)> {
    let (e11, e12, e21) = (1, 2, 3);
    vec![
        (e11, e11, e11, q(1)),
        (e11, e12, e12, q(1)),
        (e12, e21, e11, q(1)),
        (e21, e11, e21, q(1)),
        (e21, e12, 0, q(1)),
        (e21, e12, e11, q(-1)),
    ]
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    name: String,
    dim: usize,
    unit_index: usize,
    parity: Vec<u8>,
    f: Vec<(usize, usize, usize, Coefficient)>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Text(String),
    Int(i64),
}

/// Sparse linear combination of basis elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    coeffs: BTreeMap<Basis, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(a: Basis) -> Self {
        let mut e = Element::zero();
        e.coeffs.insert(a, Q::one());
        e
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Basis, Q)>) -> Self {
        let mut e = Element::zero();
        for (a, v) in pairs {
            e.add_term(a, v);
        }
        e
    }

    pub fn add_term(&mut self, a: Basis, v: Q) {
        if v.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(a).or_insert_with(Q::zero);
        *slot += v;
        if slot.is_zero() {
            self.coeffs.remove(&a);
        }
    }

    pub fn add_scaled(&mut self, other: &Element, s: Q) {
        for (&a, v) in &other.coeffs {
            self.add_term(a, *v * s);
        }
    }

    pub fn scaled(&self, s: Q) -> Element {
        let mut e = Element::zero();
        e.add_scaled(self, s);
        e
    }

    pub fn get(&self, a: Basis) -> Q {
        self.coeffs.get(&a).copied().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Basis, Q)> + '_ {
        self.coeffs.iter().map(|(a, v)| (*a, *v))
    }

    /// `None` for mixed parity; the zero element counts as even.
    pub fn parity(&self, alg: &GradedAlgebra) -> Option<u8> {
        let mut ps = self.coeffs.keys().map(|&a| alg.parity(a));
        match ps.next() {
            None => Some(0),
            Some(p) => ps.all(|x| x == p).then_some(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat2() -> GradedAlgebra {
        GradedAlgebra::builtin("mat2").unwrap()
    }

    // 2×2 matrices of the four basis elements, used as an independent oracle.
    fn matrix(a: Basis) -> [[i128; 2]; 2] {
        match a {
            0 => [[1, 0], [0, 1]],
            1 => [[1, 0], [0, 0]],
            2 => [[0, 1], [0, 0]],
            _ => [[0, 0], [1, 0]],
        }
    }

    fn to_matrix(e: &Element) -> [[Q; 2]; 2] {
        let mut m = [[Q::zero(); 2]; 2];
        for (a, v) in e.iter() {
            let b = matrix(a);
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] += v * q(b[i][j]);
                }
            }
        }
        m
    }

    #[test]
    fn mat2_table_matches_matrix_multiplication() {
        let alg = mat2();
        for a in 0..4 {
            for b in 0..4 {
                let (x, y) = (matrix(a), matrix(b));
                let mut prod = [[Q::zero(); 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            prod[i][j] += q(x[i][k] * y[k][j]);
                        }
                    }
                }
                let got = alg.multiply(&Element::basis(a), &Element::basis(b));
                assert_eq!(to_matrix(&got), prod, "({a},{b})");
            }
        }
        let e = alg.multiply(&Element::basis(1), &Element::basis(2));
        assert_eq!(e, Element::basis(2));
    }

    #[test]
    fn catalog_is_associative() {
        for name in GradedAlgebra::catalog() {
            let mut alg = GradedAlgebra::builtin(name).unwrap();
            assert!(alg.check_associativity().is_empty(), "{name}");
            assert_eq!(alg.associativity(), Associativity::Verified);
        }
    }

    #[test]
    fn unit_law_violation_is_named() {
        let err = GradedAlgebra::new("bad", 2, vec![0, 0], &[(0, 0, 0, q(1)), (0, 1, 1, q(2)), (1, 0, 1, q(1))]);
        assert_eq!(err.unwrap_err().to_string(), "unit law violated at (0,1)");
    }

    #[test]
    fn inhomogeneous_table_is_rejected() {
        let err = GradedAlgebra::new("bad", 2, vec![0, 1], &unital(2, &[(1, 1, 1, q(1))]));
        assert_eq!(err.unwrap_err(), AlgebraError::Inhomogeneous(1, 1, 1));
    }

    #[test]
    fn small_catalog_examples() {
        let unit = GradedAlgebra::builtin("unit").unwrap();
        assert_eq!(unit.dim(), 1);
        let z2 = GradedAlgebra::builtin("group_Z2").unwrap();
        assert_eq!(z2.structure_constant(1, 1, 0), q(1));
        let dual = GradedAlgebra::builtin("dual_numbers").unwrap();
        assert!(dual.mul_basis(1, 1).is_empty());
        let ext = GradedAlgebra::builtin("exterior1").unwrap();
        assert_eq!(ext.parities(), &[0, 1]);
        let theta = Element::basis(1);
        assert!(ext.commutator(&theta, &theta).unwrap().is_zero());
    }

    #[test]
    fn perturbed_mat2_is_not_associative() {
        let mut bad = mat2().with_structure_constant(2, 3, 1, q(2)).unwrap();
        let report = bad.check_associativity();
        assert!(!report.is_empty());
        assert_eq!(bad.associativity(), Associativity::Violated);
        let v = &report[0];
        let (a, b, c) = v.triple;
        let l = bad.multiply(&bad.multiply(&Element::basis(a as u8), &Element::basis(b as u8)), &Element::basis(c as u8));
        assert_eq!(l, v.left);
    }

    #[test]
    fn commutator_rejects_mixed_parity() {
        let ext = GradedAlgebra::builtin("exterior1").unwrap();
        let mixed = Element::from_pairs([(0, q(1)), (1, q(1))]);
        assert_eq!(ext.commutator(&mixed, &Element::basis(1)), Err(AlgebraError::NotHomogeneous));
    }

    #[test]
    fn json_round_trip() {
        let alg = mat2();
        let back = GradedAlgebra::from_json(&alg.to_json()).unwrap();
        assert_eq!(back.entries(), alg.entries());
        let text = r#"{"name":"d","dim":2,"unit_index":0,"parity":[0,0],
            "f":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,1]]}"#;
        assert_eq!(GradedAlgebra::from_json(text).unwrap().dim(), 2);
        let text = r#"{"name":"d","dim":1,"unit_index":1,"parity":[0],"f":[]}"#;
        assert_eq!(GradedAlgebra::from_json(text).unwrap_err(), AlgebraError::UnitIndex(1));
    }
}
