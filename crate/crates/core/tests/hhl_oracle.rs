use std::f64::consts::TAU;

use qcost::hhl::{self, HhlProblem};
use qcost::linalg::{self, rng_from_seed};
use rand::Rng;

fn random_snapped(n: usize, m: usize, rng: &mut impl Rng) -> HhlProblem {
    let dim = 1usize << n;
    let top = ((1u64 << m) - 1) as f64;
    let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(0.6..top)).collect();
    let a = linalg::hermitian_with_spectrum(&spectrum, rng);
    let b = linalg::random_state(dim, rng);
    HhlProblem::new(a, b, m, Some(TAU), None).unwrap().snap_spectrum().unwrap()
}

#[test]
fn snapped_random_instances_invert_exactly() {
    let mut rng = rng_from_seed(77);
    for i in 0..20 {
        let n = 1 + i % 3;
        let m = 3 + i % 2;
        let p = random_snapped(n, m, &mut rng);
        assert!(p.is_exact());
        let r = hhl::run_hhl(&p).unwrap();
        assert!(r.fidelity_vs_oracle >= 1.0 - 1e-9, "instance {i}: {}", r.fidelity_vs_oracle);
        assert!((r.herald_prob - r.expected_herald_prob).abs() <= 1e-9, "instance {i}");
        assert!(r.clock_residual <= 1e-18, "instance {i}: {:e}", r.clock_residual);
    }
}

#[test]
fn worked_example_matches_hand_values() {
    let r = hhl::run_hhl(&hhl::two_by_two_problem()).unwrap();
    let target = [linalg::c(3.0, 0.0), linalg::c(-1.0, 0.0)];
    assert!(linalg::fidelity(&r.state, &target) >= 1.0 - 1e-9);
    assert!((r.herald_prob - 0.625).abs() <= 1e-9);
}

#[test]
fn stage_structure() {
    let p = hhl::two_by_two_problem();
    let c = hhl::build_hhl_circuit(&p).unwrap();
    let names: Vec<&str> = c.stages().iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, [hhl::STAGE_ESTIMATION, hhl::STAGE_ROTATION, hhl::STAGE_UNCOMPUTE]);
    assert_eq!(c.layout().total_qubits(), p.total_qubits());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn herald_scales_quadratically_in_c(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let p = random_snapped(1, 3, &mut rng);
            let mut half = p.clone();
            half.c_const = p.c_const / 2.0;
            let ratio = hhl::herald_probability(&p) / hhl::herald_probability(&half);
            prop_assert!((ratio - 4.0).abs() < 1e-9);
            let circuit = hhl::run_hhl(&half).unwrap().herald_prob;
            prop_assert!((circuit - hhl::herald_probability(&half)).abs() < 1e-9);
        }
    }
}
