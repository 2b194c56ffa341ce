use magicrank_core::clifford::gates::CMatrix;
use magicrank_core::gadget::*;
use magicrank_core::stabilizer::MagicId;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn unitaries() -> &'static [CMatrix] {
    static U: OnceLock<Vec<CMatrix>> = OnceLock::new();
    U.get_or_init(|| sp4_unitaries().unwrap())
}

fn gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[test]
fn two_copy_h3_finds_eq18_output() {
    let s = sweep_two_copy(MagicId::H3, unitaries()).unwrap();
    assert_eq!(s.branches_tested, 3 * 51_840);
    assert!(s.max_completeness_error < 1e-10);
    let found = s.hits.iter().any(|h| {
        h.classification == Classification::PhaseStateNonclifford
            && (h.probability - 0.375).abs() <= 1e-10
            && matches_phases_up_to_pauli(&h.output, [PI / 2.0, PI / 3.0], 1e-8)
    });
    eprintln!(
        "H3: {} phase-state hits, {} non-Clifford",
        s.phase_state_hits, s.nonclifford_hits
    );
    assert!(found);
}

#[test]
fn two_copy_norrell_finds_eq21_output() {
    let s = sweep_two_copy(MagicId::N, unitaries()).unwrap();
    assert!(s.max_completeness_error < 1e-10);
    let found = s.hits.iter().any(|h| {
        (h.probability - 0.25).abs() <= 1e-10
            && h.phases
                .is_some_and(|p| gap(p[0], PI) <= 1e-8 && gap(p[1], PI) <= 1e-8)
    });
    eprintln!(
        "N: {} phase-state hits, {} non-Clifford",
        s.phase_state_hits, s.nonclifford_hits
    );
    assert!(found);
}

#[test]
fn two_copy_strange_has_no_nonclifford_hits() {
    let s = sweep_two_copy(MagicId::S, unitaries()).unwrap();
    eprintln!(
        "S: {} phase-state hits, {} non-Clifford",
        s.phase_state_hits, s.nonclifford_hits
    );
    assert_eq!(s.nonclifford_hits, 0);
}

#[test]
fn injection_positive_control_and_negatives() {
    let t = sweep_injection(MagicId::T3, unitaries()).unwrap();
    let target = t3_gate();
    let hit = t.gadgets.iter().find(|g| {
        let u = CMatrix::from_fn(3, 3, |i, j| g.injected[i][j]);
        equivalent_up_to_clifford(&u, &target)
    });
    eprintln!("T3 gadgets: {}", t.gadgets.len());
    assert!(hit.is_some());
    for m in [MagicId::S, MagicId::H3, MagicId::N] {
        let s = sweep_injection(m, unitaries()).unwrap();
        eprintln!("{m} gadgets: {}", s.gadgets.len());
        assert!(s.gadgets.is_empty());
    }
}

#[test]
fn weyl_prefactor_preserves_classifications() {
    use magicrank_core::clifford::pauli::PauliLabel;
    use rand::{Rng, SeedableRng};
    let us = unitaries();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let c = &us[rng.random_range(0..us.len())];
        let m = MagicId::QUTRIT[rng.random_range(0..4)];
        let v: Vec<u8> = (0..4).map(|_| rng.random_range(0..3)).collect();
        let d = PauliLabel::from_symplectic(&v).matrix();
        let dc = &d * c;
        let mut a: Vec<_> = (0..3).map(|k| report_for(m, c, k).classification).collect();
        let mut b: Vec<_> = (0..3)
            .map(|k| report_for(m, &dc, k).classification)
            .collect();
        a.sort_by_key(|c| *c as u8);
        b.sort_by_key(|c| *c as u8);
        assert_eq!(a, b);
        let total: f64 = (0..3).map(|k| report_for(m, c, k).probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
