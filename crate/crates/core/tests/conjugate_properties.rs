//! Structural properties of `L_λ` for every built-in Hamiltonian kind.

use proptest::prelude::*;
use supnorm::hamiltonian::RadialTable;
use supnorm::{HamiltonianSpec, Vec2, WeightField};

fn table_spec() -> HamiltonianSpec {
    // Isotropic profile ρ = 0.5 + λ on a 3×3 grid with four levels.
    let lambdas = vec![0.5, 1.0, 2.0, 4.0];
    let n_dirs = 12;
    let mut records = Vec::new();
    for node in 0..9 {
        for dir in 0..n_dirs {
            for (k, l) in lambdas.iter().enumerate() {
                records.push((node, dir, k, 0.5 + l));
            }
        }
    }
    let table = RadialTable::from_records(Vec2::ZERO, 0.5, 3, 3, lambdas, n_dirs, &records).unwrap();
    HamiltonianSpec::tabulated(table)
}

fn kinds() -> Vec<(&'static str, HamiltonianSpec)> {
    vec![
        ("eikonal", HamiltonianSpec::eikonal()),
        ("power-1.5", HamiltonianSpec::isotropic_power(1.5).unwrap()),
        ("power-3", HamiltonianSpec::isotropic_power(3.0).unwrap()),
        (
            "weighted",
            HamiltonianSpec::weighted(
                WeightField::Affine {
                    c0: 1.0,
                    cx: 0.5,
                    cy: -0.25,
                },
                Vec2::ZERO,
                Vec2::new(1.0, 1.0),
            )
            .unwrap(),
        ),
        ("anisotropic", HamiltonianSpec::anisotropic([[4.0, 1.0], [1.0, 2.0]]).unwrap()),
        ("plateau", HamiltonianSpec::plateau(0.5, 0.75).unwrap()),
        ("tabulated", table_spec()),
    ]
}

fn point() -> impl Strategy<Value = Vec2> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn vector() -> impl Strategy<Value = Vec2> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn homogeneous_of_degree_one(x in point(), q in vector(), c in 0.01..20.0f64, lambda in 0.0..4.0f64) {
        for (name, spec) in kinds() {
            let a = spec.conjugate(x, q * c, lambda);
            let b = c * spec.conjugate(x, q, lambda);
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn sandwiched_between_inner_and_outer_radii(x in point(), q in vector(), lambda in 0.0..4.0f64) {
        for (name, spec) in kinds() {
            let l = spec.conjugate(x, q, lambda);
            let n = q.norm();
            let (lo, hi) = (spec.inner_radius(lambda) * n, spec.outer_radius(lambda) * n);
            prop_assert!(lo <= l + 1e-9 * (1.0 + l) && l <= hi + 1e-9 * (1.0 + hi), "{name}: {lo} ≤ {l} ≤ {hi}");
        }
    }

    #[test]
    fn non_decreasing_in_lambda(x in point(), q in vector(), l1 in 0.0..4.0f64, dl in 0.0..2.0f64) {
        for (name, spec) in kinds() {
            let a = spec.conjugate(x, q, l1);
            let b = spec.conjugate(x, q, l1 + dl);
            prop_assert!(a <= b + 1e-12 * (1.0 + b), "{name}: {a} > {b}");
        }
    }

    #[test]
    fn subadditive(x in point(), q1 in vector(), q2 in vector(), lambda in 0.0..4.0f64) {
        for (name, spec) in kinds() {
            let lhs = spec.conjugate(x, q1 + q2, lambda);
            let rhs = spec.conjugate(x, q1, lambda) + spec.conjugate(x, q2, lambda);
            prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs), "{name}: {lhs} > {rhs}");
        }
    }

    /// Every `p` strictly inside the sublevel pairs with every `q` on the unit
    /// sphere of `L_λ` to at most 1.
    #[test]
    fn dual_to_the_sublevel(x in point(), p in vector(), lambda in 0.1..4.0f64) {
        for (name, spec) in kinds() {
            let h = spec.eval_h(x, p).unwrap();
            if h > 0.95 * lambda {
                continue;
            }
            for k in 0..90 {
                let q = Vec2::from_angle(k as f64 * std::f64::consts::TAU / 90.0);
                let l = spec.conjugate(x, q, lambda);
                if l > 0.0 {
                    let pairing = p.dot(q) / l;
                    prop_assert!(pairing <= 1.0 + 1e-9, "{name}: p·q = {pairing} at H = {h}, λ = {lambda}");
                }
            }
        }
    }
}

/// `L_λ(q)` against a dense maximisation of `p·q` over the boundary of the
/// sublevel, traced by bisection on `H` along each ray.
#[test]
fn conjugate_matches_a_dense_support_oracle() {
    let support = |spec: &HamiltonianSpec, x: Vec2, q: Vec2, lambda: f64| -> f64 {
        let mut best: f64 = 0.0;
        for k in 0..20_000 {
            let e = Vec2::from_angle(k as f64 * std::f64::consts::TAU / 20_000.0);
            let (mut lo, mut hi) = (0.0, 1.0);
            while spec.eval_h(x, e * hi).unwrap() <= lambda {
                hi *= 2.0;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if spec.eval_h(x, e * mid).unwrap() <= lambda {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.max(lo * e.dot(q));
        }
        best
    };
    let x = Vec2::new(0.3, 0.6);
    for (name, spec) in kinds() {
        if name == "tabulated" || name == "plateau" {
            continue;
        }
        for (q, lambda) in [(Vec2::new(1.0, 0.0), 1.0), (Vec2::new(0.3, -0.8), 2.0), (Vec2::new(-1.0, 1.0), 0.5)] {
            let exact = support(&spec, x, q, lambda);
            // The polygonal support is an inner approximation whose error decays like n⁻².
            let gap = |n: usize| {
                let l = spec.conjugate_l(x, q, lambda, n);
                assert!(l <= exact * (1.0 + 1e-9), "{name}: {l} above {exact}");
                (exact - l) / exact
            };
            for n in [32, 64, 128, 256, 512] {
                let g = gap(n);
                assert!(g <= 40.0 / (n * n) as f64 + 1e-8, "{name}: relative gap {g} at {n} directions");
            }
        }
    }
}

#[test]
fn plateau_conjugate_at_the_shelf_level() {
    let spec = HamiltonianSpec::plateau(0.5, 0.75).unwrap();
    for k in 0..8 {
        let q = Vec2::from_angle(k as f64 * 0.7) * 2.0;
        assert!((spec.conjugate(Vec2::ZERO, q, 0.5) - 1.5).abs() < 1e-12);
    }
}
