use hypervirial::rspt::rspt_expand;
use hypervirial::{energy_series, rspt_series, PotentialFamily, PotentialKind, QuantumState};

#[test]
fn reference_families_agree_through_order_15() {
    for family in [PotentialFamily::CORNELL, PotentialFamily::QUARTIC] {
        for l in 0..=3 {
            let engine = energy_series(family, QuantumState::new(0, l), 15).unwrap();
            let oracle = rspt_series(family, l, 15).unwrap();
            assert_eq!(engine, oracle, "{family}, l = {l}");
        }
    }
}

#[test]
fn generalized_exponents_agree() {
    for (kind, p) in [
        (PotentialKind::CoulombPlusPower, 2),
        (PotentialKind::CoulombPlusPower, 3),
        (PotentialKind::OscillatorPlusEvenPower, 3),
        (PotentialKind::OscillatorPlusEvenPower, 4),
    ] {
        let family = PotentialFamily::new(kind, p).unwrap();
        for l in 0..=2 {
            let engine = energy_series(family, QuantumState::new(0, l), 8).unwrap();
            let oracle = rspt_series(family, l, 8).unwrap();
            assert_eq!(engine, oracle, "{family}, l = {l}");
        }
    }
}

#[test]
fn oracle_wavefunction_degrees_grow_by_a_fixed_step() {
    let family = PotentialFamily::new(PotentialKind::CoulombPlusPower, 2).unwrap();
    let (_, ansatz) = rspt_expand(family, QuantumState::new(0, 0), 5).unwrap();
    for (k, poly) in ansatz.corrections.iter().enumerate() {
        assert_eq!(poly.len() - 1, 3 * k);
    }
}
