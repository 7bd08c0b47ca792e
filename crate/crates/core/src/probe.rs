//! Negative control: a non-associative table must leave a visible trace.

use crate::algebra::GradedAlgebra;
use crate::bar::zz_through_maps;
use crate::components::component_identities;
use crate::oracle::IndexModel;
use crate::recursion::URegistry;
use crate::report::{Family, ResidualReport, Witness};
use crate::verify::{family_indices, Verifier};

/// Runs the cheap residuals on `alg` at `level` and collects every nonzero
/// one. On a non-associative table the probe passes when something is
/// nonzero; on an associative one it passes when everything vanishes.
pub fn nonassoc_probe(alg: &GradedAlgebra, level: usize, model: IndexModel) -> ResidualReport {
    let violations = alg.associativity_violations();
    let reg = URegistry::build(alg, level);
    let mut found: Vec<(String, Vec<Witness>)> = Vec::new();
    for n in 3..=(level + 1).min(5) {
        let (first, second) = zz_through_maps(alg, n).expect("n ≥ 3");
        for (name, m) in [("m12 Z (id x Z)", first), ("m12 (id x Z) Z", second)] {
            let r = ResidualReport::from_map(Family::Bar, vec![n], &m);
            if !r.passed {
                found.push((format!("{name} at arity {n}"), r.witnesses));
            }
        }
    }
    for (key, z) in reg.inconsistencies() {
        let w = z.witness.clone().map(|(x, y, v)| Witness { input: x, output: y, value: v });
        found.push((format!("forced-zero equation for {key}"), w.into_iter().collect()));
    }
    let v = Verifier::new(&reg, model);
    for (m, n) in family_indices(level).into_iter().filter(|&(m, n)| m + n <= 3) {
        let r = if m == 0 { v.residual_linear(n) } else { v.residual_quadratic(m, n) };
        if !r.passed {
            found.push((format!("family ({m},{n})"), r.witnesses));
        }
    }
    for r in component_identities(&reg, 1, model) {
        if !r.passed {
            found.push((r.label.clone().unwrap_or_default(), r.witnesses));
        }
    }
    let detected = !found.is_empty();
    let names: Vec<&str> = found.iter().map(|(n, _)| n.as_str()).collect();
    let label = if violations.is_empty() {
        "associative input".to_string()
    } else {
        let (a, b, c) = violations[0].triple;
        format!("({a},{b},{c}) not associative; nonzero: {}", if detected { names.join(", ") } else { "none".into() })
    };
    let witnesses: Vec<Witness> = found.into_iter().flat_map(|(_, w)| w).collect();
    let mut rep = ResidualReport::new(Family::Nonassoc, vec![level]).labelled(label).with_checked(violations.len());
    rep.witnesses = witnesses.into_iter().take(crate::report::MAX_WITNESSES).collect();
    rep.passed = if violations.is_empty() { !detected } else { detected };
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn doubled_structure_constant_is_detected() {
        let bad = GradedAlgebra::builtin("mat2").unwrap().with_structure_constant(2, 3, 1, q(2)).unwrap();
        assert!(!bad.associativity_violations().is_empty());
        let r = nonassoc_probe(&bad, 3, IndexModel::Normalized);
        assert!(r.passed && !r.witnesses.is_empty(), "{r:?}");
    }

    #[test]
    fn associative_input_degenerates_to_positive_suite() {
        let r = nonassoc_probe(&GradedAlgebra::builtin("dual_numbers").unwrap(), 3, IndexModel::Normalized);
        assert!(r.passed && r.witnesses.is_empty());
    }
}
