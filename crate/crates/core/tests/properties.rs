use proptest::prelude::*;

use pendular::dipole_pair::{
    heisenberg_constants, m_changing_coupling, pair_coupling, pair_hamiltonian, vdd_from_first_principles, xyz_matrix,
    CouplingGeometry,
};
use pendular::linalg::{dot, Matrix};
use pendular::pendular_moments::moments;
use pendular::rotor_basis::{build_stark_hamiltonian, solve_pendular, BasisSpec};
use pendular::units::{epsilon_for_x, omega_over_b, r_for_omega, reduced_field, PresetRegistry};
use pendular::xxz_chain::{build_chain_hamiltonian, ground_state, total_sz, Boundary, ChainSpec, Range, XxzConstants};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn pendular_states_are_orthonormal(x in 0.0f64..12.0, m in 0i32..4) {
        let spec = BasisSpec::new(m, 30).unwrap();
        let sol = solve_pendular(x, &spec).unwrap();
        prop_assert!(sol.energies.windows(2).all(|w| w[0] <= w[1]));
        let h = build_stark_hamiltonian(x, &spec).unwrap().to_dense();
        for k in 0..3 {
            let v = sol.state(k);
            prop_assert!((dot(&v, &v) - 1.0).abs() < 1e-12);
            let hv = h.matvec(&v);
            let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - sol.energies[k] * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res < 1e-10);
            for l in 0..k {
                prop_assert!(dot(&v, &sol.state(l)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn moments_are_bounded(x in 0.0f64..12.0) {
        let m = moments(x, 30).unwrap();
        prop_assert!(m.c0.abs() <= 1.0 && m.c1.abs() <= 1.0 && m.cx.abs() <= 1.0);
        prop_assert!(m.delta_e >= 0.0);
        prop_assert!(m.cx >= 0.0);
        prop_assert!(m.c0 >= 0.0);
    }

    #[test]
    fn pair_maps_exactly_onto_xyz(x in 0.0f64..12.0, log_omega in -6.0f64..0.0, alpha in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let m = moments(x, 30).unwrap();
        let g = CouplingGeometry::new(10f64.powf(log_omega), alpha).unwrap();
        let h = pair_hamiltonian(&m, &g);
        let xyz = xyz_matrix(&heisenberg_constants(&m, &g));
        prop_assert!(h.max_abs_diff(&xyz.re) < 1e-12);
        prop_assert!(xyz.max_imag() == 0.0);
        prop_assert!(h.is_symmetric());
    }

    #[test]
    fn first_principles_coupling_is_closed_form_plus_m_changing_terms(
        x in 0.0f64..12.0,
        alpha in 0.0f64..std::f64::consts::FRAC_PI_2,
    ) {
        let m = moments(x, 30).unwrap();
        let g = CouplingGeometry::new(1.0, alpha).unwrap();
        let v = vdd_from_first_principles(x, &g, 30).unwrap();
        let closed = pair_coupling(&m, &g);
        let extra = m_changing_coupling(&m, &g);
        let sum = Matrix::from_fn(4, 4, |r, c| closed[(r, c)] + extra[(r, c)]);
        prop_assert!(v.re.max_abs_diff(&sum) < 1e-12);
        prop_assert!(v.max_imag() < 1e-12);
    }

    #[test]
    fn flip_flops_conserve_magnetization(n in 3usize..10, state in any::<u32>(), periodic in any::<bool>(), dipolar in any::<bool>()) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
        let range = if dipolar { Range::Dipolar } else { Range::NearestNeighbour };
        let spec = ChainSpec::new(n, boundary, XxzConstants { j: 0.7, jz: -0.2, gamma: 0.1 }).unwrap().with_range(range);
        let h = build_chain_hamiltonian(&spec).unwrap();
        let s = state & ((1u32 << n) - 1);
        for (t, amp) in h.flip_flops(s) {
            prop_assert_eq!(total_sz(t, n), total_sz(s, n));
            prop_assert!(amp != 0.0);
        }
    }

    #[test]
    fn chain_ground_state_is_global_minimum(
        n in 2usize..8,
        j in -1.0f64..1.0,
        jz in -2.0f64..2.0,
        gamma in -1.0f64..1.0,
    ) {
        let spec = ChainSpec::new(n, Boundary::Open, XxzConstants { j, jz, gamma }).unwrap();
        let r = ground_state(&spec).unwrap();
        let dense = build_chain_hamiltonian(&spec).unwrap().to_dense().unwrap();
        let eig = pendular::linalg::symmetric_eigen(&dense).unwrap();
        prop_assert!((r.ground_energy - eig.values[0]).abs() < 1e-10);
        prop_assert!((r.gap - (eig.values[1] - eig.values[0])).abs() < 1e-9);
        prop_assert!(r.gap >= 0.0 && r.spin_gap >= 0.0);
        prop_assert!(r.magnetization_per_site.abs() <= 1.0);
        prop_assert!((0.0..=1.0).contains(&r.ground_overlap_polarized));
        prop_assert!(r.sector_ground_energies.iter().all(|&(_, e)| e >= r.ground_energy - 1e-12));
    }

    #[test]
    fn unit_conversions_round_trip(eps in 0.0f64..100.0, r in 1.0f64..2000.0) {
        let reg = PresetRegistry::builtin();
        for name in reg.list() {
            let p = reg.get(name).unwrap();
            let x = reduced_field(p, eps);
            prop_assert!((epsilon_for_x(p, x) - eps).abs() <= 1e-12 * eps.max(1.0));
            let w = omega_over_b(p, r).unwrap();
            prop_assert!((r_for_omega(p, w).unwrap() - r).abs() <= 1e-10 * r);
        }
    }
}
