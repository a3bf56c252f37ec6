use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtmix_core::relaxation::{membership, membership_lab, EnergyFunction, K_TOL};
use rtmix_core::state::{project, to_acc, to_lab, unit};
use rtmix_core::{FluidSetup, StateZ, SymTraceless};

fn setup(n: usize) -> FluidSetup {
    FluidSetup::new(0.25, 4.0, 1.0, n).unwrap()
}

fn state(n: usize) -> impl Strategy<Value = StateZ> {
    let dim = 2 * n + SymTraceless::dim(n) + 1;
    (0.3f64..3.9, prop::collection::vec(-3.0f64..3.0, dim)).prop_map(move |(rho, c)| StateZ {
        rho,
        v: DVector::from_column_slice(&c[..n]),
        u: DVector::from_column_slice(&c[n..2 * n]),
        s: SymTraceless::from_entries(n, c[2 * n..dim - 1].to_vec()).unwrap(),
        p: c[dim - 1],
    })
}

fn gap(a: &StateZ, b: &StateZ) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn lab_acc_roundtrip(z in state(2), t in 0.0f64..2.0) {
        let s = setup(2);
        prop_assert!(gap(&to_acc(&to_lab(&z, t, &s), t, &s), &z) < 1e-14);
        prop_assert!(gap(&to_lab(&to_acc(&z, t, &s), t, &s), &z) < 1e-14);
    }

    #[test]
    fn lab_acc_roundtrip_3d(z in state(3), t in prop::sample::select(vec![0.3, 1.0])) {
        let s = setup(3);
        prop_assert!(gap(&to_acc(&to_lab(&z, t, &s), t, &s), &z) < 1e-14);
    }

    #[test]
    fn transforms_preserve_convex_combinations(z1 in state(2), z2 in state(2), lam in 0.0f64..1.0, t in 0.0f64..2.0) {
        let s = setup(2);
        let mix = &(&z1 * lam) + &(&z2 * (1.0 - lam));
        let lhs = to_lab(&mix, t, &s);
        let rhs = &(&to_lab(&z1, t, &s) * lam) + &(&to_lab(&z2, t, &s) * (1.0 - lam));
        prop_assert!(gap(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn stress_stays_traceless(z in state(3), t in 0.0f64..2.0) {
        let s = setup(3);
        for m in [to_lab(&z, t, &s).s.to_matrix(), to_acc(&z, t, &s).s.to_matrix()] {
            prop_assert!(m.trace().abs() < 1e-12 * (1.0 + m.norm()));
        }
    }

    #[test]
    fn projection_ignores_pressure(z in state(2), p in -5.0f64..5.0) {
        let mut z2 = z.clone();
        z2.p = p;
        prop_assert_eq!(project(&z), project(&z2));
        prop_assert_eq!(project(&z).embed(z.p), z);
    }
}

#[test]
fn zero_time_is_identity() {
    let s = setup(2);
    let z = StateZ {
        rho: 1.1,
        v: DVector::from_vec(vec![0.3, -0.7]),
        u: DVector::from_vec(vec![2.0, 0.1]),
        s: SymTraceless::diag2(0.4),
        p: 7.0,
    };
    assert_eq!(to_lab(&z, 0.0, &s), z);
    assert_eq!(to_acc(&z, 0.0, &s), z);
}

#[test]
fn accelerated_rest_frame_maps_to_lab_rest() {
    let s = setup(2);
    let (mu, t) = (2.0, 0.8);
    let a = s.g * t;
    let en = unit(2, 1);
    let z = StateZ { rho: mu, v: &en * a, u: &en * (mu * a), s: SymTraceless::zeros(2), p: 0.0 };
    let lab = to_lab(&z, t, &s);
    assert!(lab.v.norm() < 1e-15 && lab.u.norm() < 1e-15);
    let back = to_acc(&lab, t, &s);
    assert!((&back.v - &z.v).norm() < 1e-15 && (&back.u - &z.u).norm() < 1e-15);
}

#[test]
fn lab_and_accelerated_predicates_agree_at_zero_time() {
    let s = setup(2);
    let e_fn = EnergyFunction::constant(1.5);
    let x = DVector::from_vec(vec![0.2, -0.4]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..200 {
        let f: f64 = rng.gen();
        let rho = 0.25 + 3.75 * f;
        let z = StateZ {
            rho,
            v: DVector::from_vec(vec![f - 0.5, 0.3 * k as f64 / 200.0]),
            u: DVector::from_vec(vec![rho * (f - 0.5) + 0.1, -0.2]),
            s: SymTraceless::diag2(0.5 - f),
            p: 0.0,
        };
        let lab = membership_lab(&z, &x, 0.0, &e_fn, &s, K_TOL).region;
        let acc = membership(&z, 1.5, &s, K_TOL).region;
        assert_eq!(lab, acc, "state {k}");
    }
}
