//! Property tests for the structural invariants: Chen additivity, norm
//! homogeneity and monotonicity, lift identities, integral linearity, and
//! file round trips.

use proptest::prelude::*;

use grough::io::{load_path_csv, write_path_csv};
use grough::{
    chen_defect, cross_variation, gubinelli_integral, hoelder_norm, ito_integral, ito_lift,
    quadratic_variation, rough_path_seminorm, stratonovich_integral, stratonovich_lift,
    ControlledPath, GridPath, LevelTwo, LiftKind, Partition, RoughPath, TimeGrid, TripleSample,
};

fn grid_path_strategy(max_steps: usize) -> impl Strategy<Value = GridPath> {
    (2usize..max_steps, any::<u64>()).prop_map(|(n, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = TimeGrid::new(1.0, n).unwrap();
        let mut values = vec![0.0];
        for _ in 0..n {
            let last = *values.last().unwrap();
            values.push(last + rng.random_range(-0.5..0.5));
        }
        GridPath::scalar(grid, values).unwrap()
    })
}

fn rough_path_strategy(max_steps: usize) -> impl Strategy<Value = RoughPath> {
    (grid_path_strategy(max_steps), any::<u64>()).prop_map(|(path, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = path.grid().n_steps();
        let blocks: Vec<f64> = (0..n).map(|_| rng.random_range(-0.3..0.3)).collect();
        let level2 = LevelTwo::new(1, n, blocks).unwrap();
        RoughPath::new(path, level2, LiftKind::Ito).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chen_additivity_of_reconstruction(rp in rough_path_strategy(32)) {
        let n = rp.grid().n_points();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let ik = rp.reconstruct_level2(i, k).unwrap()[0];
                    let ij = rp.reconstruct_level2(i, j).unwrap()[0];
                    let jk = rp.reconstruct_level2(j, k).unwrap()[0];
                    let xij = rp.path().value1(j) - rp.path().value1(i);
                    let xjk = rp.path().value1(k) - rp.path().value1(j);
                    let composed = ij + jk + xij * xjk;
                    prop_assert!(
                        (ik - composed).abs() <= 1e-12 * (1.0 + ik.abs()),
                        "triple ({i},{j},{k}): {ik} vs {composed}"
                    );
                }
            }
        }
    }

    #[test]
    fn chen_defect_of_library_lifts_is_rounding(path in grid_path_strategy(48)) {
        let rp = ito_lift(&path);
        let prefix = rp.prefix();
        let defect = chen_defect(
            rp.path(),
            |i, j, out| prefix.interval(i, j, out),
            TripleSample::Exhaustive,
        ).unwrap();
        let sup = path.sup_norm();
        prop_assert!(defect <= 1e-12 * (1.0 + sup * sup), "defect {defect}");
    }

    #[test]
    fn hoelder_homogeneity(path in grid_path_strategy(48), lambda in -4.0f64..4.0) {
        let alpha = 0.45;
        let base = hoelder_norm(&path, alpha).unwrap();
        let scaled = hoelder_norm(&path.scale(lambda), alpha).unwrap();
        prop_assert!(
            (scaled - lambda.abs() * base).abs() <= 1e-12 * (1.0 + scaled),
            "{scaled} vs {}", lambda.abs() * base
        );
    }

    #[test]
    fn hoelder_monotone_in_alpha_on_unit_horizon(path in grid_path_strategy(48)) {
        // T = 1 so t - s ≤ 1 and the weight shrinks as alpha grows.
        let lo = hoelder_norm(&path, 0.35).unwrap();
        let hi = hoelder_norm(&path, 0.49).unwrap();
        prop_assert!(lo <= hi + 1e-12 * (1.0 + hi));
    }

    #[test]
    fn seminorm_parabolic_scaling(rp in rough_path_strategy(32), lambda in 0.1f64..3.0) {
        let alpha = 0.4;
        let base = rough_path_seminorm(&rp, alpha).unwrap();
        let scaled = RoughPath::new(
            rp.path().scale(lambda),
            rp.level2().scale(lambda * lambda),
            LiftKind::Ito,
        ).unwrap();
        let got = rough_path_seminorm(&scaled, alpha).unwrap();
        prop_assert!(
            (got - lambda * base).abs() <= 1e-11 * (1.0 + got),
            "{got} vs {}", lambda * base
        );
    }

    #[test]
    fn lift_symmetric_part_identity(path in grid_path_strategy(64)) {
        // 2·Sym(X2_{s,t}) = B_{s,t}² - Σ ΔB² over (s,t), exactly on the grid.
        let rp = ito_lift(&path);
        let qv = quadratic_variation(&path);
        let n = path.grid().n_points();
        let pairs = [(0, n - 1), (0, 1), (n / 3, 2 * n / 3)];
        for (s, t) in pairs {
            if s >= t { continue; }
            let x2 = rp.reconstruct_level2(s, t).unwrap()[0];
            let inc = path.value1(t) - path.value1(s);
            let mut dqv = [0.0];
            qv.increment(s, t, &mut dqv);
            prop_assert!(
                (2.0 * x2 - (inc * inc - dqv[0])).abs() <= 1e-11 * (1.0 + inc * inc)
            );
        }
    }

    #[test]
    fn strat_antisymmetric_part_unchanged(path in grid_path_strategy(64)) {
        // The symmetrisation adds only symmetric data; in one dimension the
        // whole correction is the half quadratic-variation increment.
        let rp = ito_lift(&path);
        let qv = quadratic_variation(&path);
        let strat = stratonovich_lift(&rp, &qv).unwrap();
        let n = path.grid().n_points();
        for (s, t) in [(0, n - 1), (1, n / 2)] {
            if s >= t { continue; }
            let a = rp.reconstruct_level2(s, t).unwrap()[0];
            let b = strat.reconstruct_level2(s, t).unwrap()[0];
            let mut dqv = [0.0];
            qv.increment(s, t, &mut dqv);
            prop_assert!((b - a - 0.5 * dqv[0]).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn integral_additive_in_integrand(path in grid_path_strategy(48), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let rp = ito_lift(&path);
        let cp1 = ControlledPath::coordinate(&rp).unwrap();
        let cp2 = ControlledPath::constant(&[0.7], 1, &rp).unwrap();
        let combo = cp1.axpy(a, &cp2, b).unwrap();
        let part = Partition::full(rp.grid());
        let v1 = gubinelli_integral(&cp1, &rp, &part).unwrap().value[0];
        let v2 = gubinelli_integral(&cp2, &rp, &part).unwrap().value[0];
        let vc = gubinelli_integral(&combo, &rp, &part).unwrap().value[0];
        prop_assert!((vc - (a * v1 + b * v2)).abs() <= 1e-11 * (1.0 + vc.abs()));
    }

    #[test]
    fn polarization_identity(y in grid_path_strategy(48), b in grid_path_strategy(48)) {
        // Regrid b onto y's grid by truncation is not meaningful; instead
        // require equal step counts and rebuild on y's grid.
        let n = y.grid().n_steps().min(b.grid().n_steps());
        let grid = TimeGrid::new(1.0, n).unwrap();
        let yv = GridPath::scalar(grid, y.values()[..=n].to_vec()).unwrap();
        let bv = GridPath::scalar(grid, b.values()[..=n].to_vec()).unwrap();
        let sum = yv.axpy(1.0, &bv, 1.0).unwrap();
        let qs = cross_variation(&sum, &sum).unwrap();
        let qy = cross_variation(&yv, &yv).unwrap();
        let qb = cross_variation(&bv, &bv).unwrap();
        let cv = cross_variation(&yv, &bv).unwrap();
        let k = n;
        let lhs = qs.value(k)[0] - qy.value(k)[0] - qb.value(k)[0];
        prop_assert!((lhs - 2.0 * cv.value(k)[0]).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn strat_equals_ito_plus_half_cross(path in grid_path_strategy(64)) {
        let y = ito_integral(&path, &path).unwrap();
        let ito = ito_integral(&y, &path).unwrap();
        let strat = stratonovich_integral(&y, &path).unwrap();
        let cv = cross_variation(&y, &path).unwrap();
        let n = path.grid().n_points() - 1;
        let lhs = strat.value1(n) - ito.value1(n);
        prop_assert!((lhs - 0.5 * cv.value(n)[0]).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn path_csv_round_trip(path in grid_path_strategy(32)) {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("p.csv");
        write_path_csv(&path, &file).unwrap();
        let back = load_path_csv(&file).unwrap();
        prop_assert_eq!(back.values(), path.values());
        prop_assert_eq!(back.grid().n_steps(), path.grid().n_steps());
    }
}
