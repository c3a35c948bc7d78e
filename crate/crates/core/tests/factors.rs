//! Entry periodicity of the closed-form factors: with primed roots whose
//! N-th powers follow the recursion, shifting either index by N leaves the
//! entry unchanged.

use qhi_core::linalg::C64;
use qhi_core::roots::principal_root;
use qhi_core::shear::{step, ShearWeights, SurfaceKind};
use qhi_core::torus::{self, EdgeRoots};
use qhi_core::weyl::{RootOfUnity, SphereCentrals};
use qhi_core::{sphere, word::Letter};

fn image(root: &RootOfUnity, letter: Letter, from: EdgeRoots, kind: SurfaceKind) -> EdgeRoots {
    let n = root.n();
    let w = ShearWeights::new(
        from.u.powi(n as i32),
        from.v.powi(n as i32),
        C64::new(1.0, 0.0),
    );
    let out = step(&w, letter, kind).unwrap();
    EdgeRoots::new(
        principal_root(out.x1, n) * root.selector_phase(1),
        principal_root(out.x2, n),
    )
}

fn assert_periodic(n: usize, entry: impl Fn(i64, i64) -> C64) {
    let n = n as i64;
    for i in 0..n {
        for j in 0..n {
            let base = entry(i, j);
            for (a, b) in [(i + n, j), (i, j + n), (i + n, j + n)] {
                let shifted = entry(a, b);
                assert!(
                    (shifted - base).norm() <= 1e-10 * base.norm(),
                    "({i},{j}) vs ({a},{b}): {base} {shifted}"
                );
            }
        }
    }
}

#[test]
fn torus_entries_are_n_periodic() {
    let h = C64::new(1.0, 0.0);
    for (n, k) in [(3, 1), (5, 2), (7, 3)] {
        let root = RootOfUnity::new(n, k).unwrap();
        let from = EdgeRoots::new(C64::new(0.8, 0.3), C64::new(-0.4, 1.1));
        let to = image(&root, Letter::R, from, SurfaceKind::Torus1);
        assert_periodic(n, |i, j| torus::c_r_entry(&root, from, to, h, i, j));
        let to = image(&root, Letter::L, from, SurfaceKind::Torus1);
        assert_periodic(n, |i, j| torus::c_l_tilde_entry(&root, from, to, h, i, j));
    }
}

#[test]
fn sphere_entries_are_n_periodic() {
    let centrals = SphereCentrals::geometric();
    for (n, k) in [(3, 1), (5, 3), (7, 2)] {
        let root = RootOfUnity::new(n, k).unwrap();
        let from = EdgeRoots::new(C64::new(0.6, -0.7), C64::new(1.3, 0.2));
        let to = image(&root, Letter::R, from, SurfaceKind::Sphere4);
        assert_periodic(n, |i, j| {
            sphere::cstar_r_entry(&root, from, to, &centrals, i, j)
        });
        let to = image(&root, Letter::L, from, SurfaceKind::Sphere4);
        assert_periodic(n, |i, j| {
            sphere::cstar_l_tilde_entry(&root, from, to, &centrals, i, j)
        });
    }
}

#[test]
fn l_factor_is_fourier_times_tilde() {
    let root = RootOfUnity::primitive(5).unwrap();
    let h = C64::new(1.0, 0.0);
    let from = EdgeRoots::new(C64::new(0.8, 0.3), C64::new(-0.4, 1.1));
    let to = image(&root, Letter::L, from, SurfaceKind::Torus1);
    let cl = torus::matrix_c_l(&root, from, to, h).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let summed = torus::c_l_entry_summed(&root, from, to, h, i as i64, j as i64);
            assert!((summed - cl[(i, j)]).norm() < 1e-12 * cl[(i, j)].norm().max(1.0));
        }
    }
}
