#![allow(clippy::needless_range_loop)]

mod common;

use cwpower::diagnostics::{
    emit_report, estimate_order, parse_json_report, reference_eigenpair, ReportFormat,
};
use cwpower::grid::{assemble, l_shape, unit_square, unit_square_principal_value};
use cwpower::iteration::{
    collatz_wielandt, fixed_shift_power, mu_matches_sup, variable_lambda_power, Criterion,
    SolverConfig, StoppingRule, Update, VariableLambda,
};
use cwpower::linsolve::{factor_stencil, solve};
use cwpower::operators::{
    hilbert_matrix, random_tridiagonal, shifted_solve, DenseMatrix, InverseLaplacian,
    PositiveOperator,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn config() -> Config {
    Config {
        cases: 64,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One small operator of each kind, chosen by `seed`.
fn small_operator(seed: u64) -> Box<dyn PositiveOperator> {
    let mut r = rng(seed);
    match seed % 3 {
        0 => Box::new(common::random_primitive(r.gen_range(1..=12), &mut r)),
        1 => Box::new(random_tridiagonal(r.gen_range(2..=20), seed).unwrap()),
        _ => Box::new(InverseLaplacian::new(common::random_domain(&mut r)).unwrap()),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn apply_is_completely_positive(seed in any::<u64>()) {
        let op = small_operator(seed);
        let mut r = rng(seed ^ 1);
        let n = op.dim();
        // Nonnegative, nonzero, possibly sparse.
        let mut v: Vec<f64> = (0..n).map(|_| if r.gen_bool(0.5) { r.gen_range(0.0..1.0) } else { 0.0 }).collect();
        let k = r.gen_range(0..n);
        v[k] = 1.0;
        // Tridiagonal and sparse dense operators are primitive, not positive:
        // a high enough power is positive.
        let mut y = v;
        for _ in 0..n {
            y = op.apply(&y).unwrap();
        }
        prop_assert!(y.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn apply_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let op = small_operator(seed);
        let mut r = rng(seed ^ 2);
        let n = op.dim();
        let x: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = op.apply(&combo).unwrap();
        let (ax, ay) = (op.apply(&x).unwrap(), op.apply(&y).unwrap());
        let rhs: Vec<f64> = ax.iter().zip(&ay).map(|(p, q)| a * p + b * q).collect();
        let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect();
        let scale = (a.abs() * norm(&ax) + b.abs() * norm(&ay)).max(1e-300);
        prop_assert!(norm(&diff) <= 1e-12 * scale.max(norm(&lhs)));
    }

    #[test]
    fn shifted_solve_positive_with_small_residual(seed in any::<u64>(), gap in 0.1f64..2.0) {
        let op = small_operator(seed);
        let (rho, _) = reference_eigenpair(op.as_ref()).unwrap();
        let lambda = rho + gap * rho.max(0.1);
        let mut r = rng(seed ^ 3);
        let v = common::random_positive_vector(op.dim(), &mut r);
        let w = shifted_solve(op.as_ref(), lambda, &v).unwrap();
        prop_assert!(w.iter().all(|&x| x > 0.0));
        let aw = op.apply(&w).unwrap();
        let res: Vec<f64> = w.iter().zip(&aw).zip(&v).map(|((w, a), v)| lambda * w - a - v).collect();
        prop_assert!(norm(&res) <= 1e-10 * norm(&v));
    }

    #[test]
    fn laplacian_shift_formulations_agree(seed in any::<u64>(), excess in 0.05f64..1.0) {
        let mut r = rng(seed);
        let domain = common::random_domain(&mut r);
        let t = InverseLaplacian::new(domain).unwrap();
        let s = t.stencil();
        let (rho, _) = reference_eigenpair(&t).unwrap();
        let lambda = rho * (1.0 + excess);
        let v = common::random_positive_vector(t.dim(), &mut r);
        // Identity form, as used by the operator.
        let w1 = shifted_solve(&t, lambda, &v).unwrap();
        // Alternative: (λA − I) w = A v.
        let f = factor_stencil(s, lambda, -1.0).unwrap();
        let w2 = solve(&f, &s.mul_vec(&v).unwrap()).unwrap();
        let diff: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&diff) <= 1e-10 * norm(&w1));
    }

    #[test]
    fn discrete_maximum_principle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = InverseLaplacian::new(common::random_domain(&mut r)).unwrap();
        let n = t.dim();
        let mut f = vec![0.0; n];
        f[r.gen_range(0..n)] = r.gen_range(0.1..1.0);
        for x in f.iter_mut() {
            if r.gen_bool(0.3) {
                *x += r.gen_range(0.0..1.0);
            }
        }
        let u = t.apply(&f).unwrap();
        prop_assert!(u.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn stencil_positive_definite(seed in any::<u64>()) {
        let mut r = rng(seed);
        let domain = common::random_domain(&mut r);
        let dense = assemble(&domain).to_dense();
        for i in 0..dense.len() {
            for j in 0..dense.len() {
                prop_assert_eq!(dense[i][j], dense[j][i]);
            }
        }
        prop_assert!(common::symmetric_min_eigenvalue(&dense) > 0.0);
    }

    #[test]
    fn cw_sandwich(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let a = common::random_primitive(n, &mut r);
        let y = common::random_positive_vector(n, &mut r);
        let b = collatz_wielandt(&a, &y).unwrap();
        let rho = common::spectral_radius(a.entries());
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.lower <= rho * (1.0 + 1e-12) && rho <= b.upper * (1.0 + 1e-12));
    }

    #[test]
    fn cw_scale_invariant(seed in any::<u64>(), log_s in -8.0f64..8.0) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=20);
        let a = common::random_primitive(n, &mut r);
        let y = common::random_positive_vector(n, &mut r);
        let s = 10f64.powf(log_s);
        let ys: Vec<f64> = y.iter().map(|x| x * s).collect();
        let (b1, b2) = (collatz_wielandt(&a, &y).unwrap(), collatz_wielandt(&a, &ys).unwrap());
        prop_assert!((b1.lower - b2.lower).abs() <= 1e-14 * b1.lower.abs().max(1.0));
        prop_assert!((b1.upper - b2.upper).abs() <= 1e-14 * b1.upper.abs().max(1.0));
    }

    #[test]
    fn variable_lambda_monotone_and_positive(seed in any::<u64>()) {
        let op = small_operator(seed);
        let (rho, _) = reference_eigenpair(op.as_ref()).unwrap();
        let mut r = rng(seed ^ 4);
        let v0 = common::random_positive_vector(op.dim(), &mut r);
        let mut it = VariableLambda::new(op.as_ref(), &v0, Update::Sup).unwrap();
        prop_assume!(!it.is_degenerate_start());
        for _ in 0..15 {
            let prev = it.state().lambda;
            if it.step().is_err() {
                break;
            }
            let s = it.state();
            prop_assert!(s.lambda < prev + 1e-12 * prev.abs());
            prop_assert!(s.lambda > rho - 1e-10 * rho.max(1.0));
            prop_assert!(s.v.iter().all(|&x| x > 0.0));
            prop_assert!((norm(&s.v) - 1.0).abs() < 1e-14);
            if (s.lambda - prev).abs() < 1e-15 * prev {
                break;
            }
        }
    }

    #[test]
    fn fixed_shift_iterates_positive(seed in any::<u64>(), excess in 0.2f64..2.0) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=15);
        let a = common::random_primitive(n, &mut r);
        let rho = common::spectral_radius(a.entries());
        let v0 = common::random_positive_vector(n, &mut r);
        let rule = StoppingRule::new(Criterion::Sc1, 1e-10, 5).unwrap();
        let rep = fixed_shift_power(&a, &v0, rho + excess, &rule).unwrap();
        prop_assert!(rep.vector.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn mu_and_sup_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=20);
        let a = common::random_primitive(n, &mut r);
        let v0 = common::random_positive_vector(n, &mut r);
        prop_assert!(mu_matches_sup(&a, &v0, 8).unwrap());
    }

    #[test]
    fn sc1_equals_sc2_on_grids(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = InverseLaplacian::new(common::random_domain(&mut r)).unwrap();
        let v0 = common::random_positive_vector(t.dim(), &mut r);
        let cfg = SolverConfig::for_kind(t.kind());
        let rep = variable_lambda_power(&t, &v0, &cfg).unwrap();
        for rec in &rep.records {
            let (sc2, sc1) = (rec.criterion.unwrap(), rec.cw_gap.unwrap());
            prop_assert!((sc1 - sc2).abs() <= 1e-12, "sc1 {} sc2 {}", sc1, sc2);
        }
    }

    #[test]
    fn order_estimate_scale_invariant(seed in any::<u64>(), log_s in -4.0f64..4.0) {
        let mut r = rng(seed);
        let len = r.gen_range(3..=10);
        let e = common::random_errors(len, &mut r);
        let s = 10f64.powf(log_s);
        let scaled: Vec<f64> = e.iter().map(|x| x * s).collect();
        let a = estimate_order(&e, 0.0).unwrap();
        let b = estimate_order(&scaled, 0.0).unwrap();
        for (x, y) in a.orders.iter().zip(&b.orders) {
            match (x, y) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0)),
                (None, None) => {}
                _ => prop_assert!(false, "definedness differs"),
            }
        }
    }

    #[test]
    fn reference_sandwich(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=12);
        let a = common::random_primitive(n, &mut r);
        let (lambda, v) = reference_eigenpair(&a).unwrap();
        let b = collatz_wielandt(&a, &v).unwrap();
        prop_assert!(b.lower <= lambda && lambda <= b.upper);
        prop_assert!(b.gap() < 1e-14 * lambda.max(1.0) * 10.0);
        let rho = common::spectral_radius(a.entries());
        prop_assert!((lambda - rho).abs() <= 1e-12 * rho.max(1.0));
    }

    #[test]
    fn json_report_round_trip(seed in any::<u64>()) {
        let op = small_operator(seed);
        let mut r = rng(seed ^ 5);
        let v0 = common::random_positive_vector(op.dim(), &mut r);
        let mut rep = variable_lambda_power(op.as_ref(), &v0, &SolverConfig::for_kind(op.kind())).unwrap();
        let (lambda_ref, _) = reference_eigenpair(op.as_ref()).unwrap();
        rep.attach_reference(lambda_ref);
        let order = rep.order_estimate();
        let text = emit_report(&rep, &order, ReportFormat::Json);
        let (back, back_order) = parse_json_report(&text).unwrap();
        prop_assert_eq!(back, rep);
        prop_assert_eq!(back_order, order);
    }
}

#[test]
fn random_tridiagonal_spectral_radius_inside_cw_bounds() {
    let t = random_tridiagonal(5, 1).unwrap();
    let dense = t.to_dense();
    let rows: Vec<Vec<f64>> = (0..5).map(|i| dense.row(i).to_vec()).collect();
    let rho = common::symmetric_max_eigenvalue(&rows);
    let b = collatz_wielandt(&t, &[1.0; 5]).unwrap();
    assert!(b.lower <= rho && rho <= b.upper);
    assert!((t.largest_eigenvalue() - rho).abs() < 1e-13);
}

#[test]
fn unit_square_eigenvalue_matches_dense_oracle() {
    for k in [2u32, 3, 4, 6, 8, 10] {
        let h = 1.0 / f64::from(k);
        let dense = assemble(&unit_square(h).unwrap()).to_dense();
        let smallest = common::symmetric_min_eigenvalue(&dense);
        let exact = unit_square_principal_value(h);
        assert!(
            ((1.0 / smallest - exact) / exact).abs() < 1e-12,
            "h = 1/{k}"
        );
    }
}

#[test]
fn smallest_stencil_eigenvalue_at_quarter_spacing() {
    let dense = assemble(&unit_square(0.25).unwrap()).to_dense();
    let expected = 128.0 * (std::f64::consts::PI / 8.0).sin().powi(2);
    assert!((common::symmetric_min_eigenvalue(&dense) - expected).abs() < 1e-11);
    assert!((expected - 18.7452).abs() < 1e-4);
}

#[test]
fn unit_square_eigenvalue_decreases_toward_continuum() {
    let star = 1.0 / (2.0 * std::f64::consts::PI.powi(2));
    let values: Vec<f64> = [4u32, 6, 10, 16, 25, 50]
        .iter()
        .map(|&k| {
            let t = InverseLaplacian::new(unit_square(1.0 / f64::from(k)).unwrap()).unwrap();
            reference_eigenpair(&t).unwrap().0
        })
        .collect();
    assert!(values.iter().all(|&l| l > star));
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn reference_for_fine_grid_matches_formula() {
    for k in [16u32, 25, 50] {
        let h = 1.0 / f64::from(k);
        let t = InverseLaplacian::new(unit_square(h).unwrap()).unwrap();
        let (l, _) = reference_eigenpair(&t).unwrap();
        let exact = unit_square_principal_value(h);
        assert!(((l - exact) / exact).abs() < 1e-12);
    }
}

#[test]
fn dense_reference_matches_eigensolve_for_small_hilbert() {
    for n in 1..=12 {
        let h = hilbert_matrix(n).unwrap();
        let (l, _) = reference_eigenpair(&h).unwrap();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| h.entries().row(i).to_vec()).collect();
        let oracle = common::symmetric_max_eigenvalue(&rows);
        assert!((l - oracle).abs() <= 1e-12 * oracle, "n = {n}");
    }
}

#[test]
fn stencil_solution_respects_square_symmetry() {
    let t = InverseLaplacian::new(unit_square(1.0 / 8.0).unwrap()).unwrap();
    let d = t.domain();
    let m = (d.nx(), d.ny());
    let mut r = rng(11);
    let base: Vec<f64> = (0..t.dim()).map(|_| r.gen_range(0.0..1.0)).collect();
    // b mirrored left-right, so the solution must be mirrored as well.
    let mirror = |k: usize| {
        let (c, row) = d.node(k);
        d.index_of(m.0 - 1 - c, row).unwrap()
    };
    let b: Vec<f64> = (0..t.dim()).map(|k| base[k] + base[mirror(k)]).collect();
    let u = t.apply(&b).unwrap();
    for k in 0..t.dim() {
        assert!((u[k] - u[mirror(k)]).abs() <= 1e-11 * u[k].abs().max(1e-300));
    }
}

#[test]
fn l_shape_runs_to_convergence() {
    let t = InverseLaplacian::new(l_shape(1.0 / 8.0).unwrap()).unwrap();
    let v0 = t.apply_to_ones();
    let rep = variable_lambda_power(&t, &v0, &SolverConfig::for_kind(t.kind())).unwrap();
    let (l, _) = reference_eigenpair(&t).unwrap();
    assert!(rep.converged());
    assert!(((rep.lambda - l) / l).abs() < 1e-12);
}

#[test]
fn matrix_file_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    let h = hilbert_matrix(5).unwrap();
    std::fs::write(&path, h.to_text()).unwrap();
    let back = DenseMatrix::load(&path).unwrap();
    assert_eq!(back.entries(), h.entries());
}
