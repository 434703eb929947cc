//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities. Tolerances are pinned here, not calibrated.

use std::time::Instant;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unimag::config::{build_scenario, RunConfig};
use unimag::dyson::{
    dyson_series, oracle_propagator, oracle_propagator_refined, unitarity_defect, Method, TimeGrid,
};
use unimag::hamiltonians::{random_bounded_hamiltonian, HamiltonianSpec, TimeProfile};
use unimag::magnus::{bch_combine, magnus_exponent, omega_density};
use unimag::matrix::{expm, inv, logm, singular_values, sqrtm_pd, ComplexMatrix};
use unimag::runner::{run_scenario, run_with_method};
use unimag::unitarize::{
    normalizer_exact, normalizer_series, sigma_density, unitarize_report,
    unitarized_propagator_exact, xi_density,
};

const MINUS_I: C64 = C64::new(0.0, -1.0);

fn random_matrix(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// 100 seeded fixtures cycling dim in {2,4,8}, window length ≤ 1, and all
/// three time profiles, each with ||H|| ≤ 2.
fn fixture_set() -> Vec<(HamiltonianSpec, TimeGrid)> {
    let profiles = [
        TimeProfile::Constant,
        TimeProfile::Polynomial,
        TimeProfile::Trigonometric,
    ];
    (0..100u64)
        .map(|j| {
            let dim = [2usize, 4, 8][(j % 3) as usize];
            let t1 = 0.25 + 0.25 * ((j % 4) as f64);
            let profile = profiles[(j % 3) as usize];
            let h = random_bounded_hamiltonian(dim, 2.0, 1000 + j, profile);
            let grid = TimeGrid::new(0.0, t1, 128).unwrap();
            (h, grid)
        })
        .collect()
}

fn hermitian_version(h: &HamiltonianSpec) -> HamiltonianSpec {
    let inner = h.clone();
    HamiltonianSpec::new(inner.dim(), inner.norm_bound(), move |t| {
        inner.at(t).hermitian_part()
    })
}

#[test]
fn acceptance_01_manifest_unitarity() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (h, grid) in fixture_set() {
        let u = oracle_propagator(&h, &grid);
        let sv = singular_values(&u).unwrap();
        let cond = sv.last().unwrap() / sv.first().unwrap();
        assert!(
            cond <= 1e6,
            "fixture violates the condition premise: {cond:.2e}"
        );
        let p = unitarized_propagator_exact(&u).unwrap();
        worst = worst.max(unitarity_defect(&p));
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst <= 1e-10, "worst defect {worst:.3e} > 1e-10");
    assert!(elapsed < 10.0, "runtime {elapsed:.2}s >= 10s");
    println!(
        "acceptance 1 manifest unitarity: PASS (100 fixtures, worst defect {worst:.3e}, {elapsed:.2}s)"
    );
}

#[test]
fn acceptance_02_hermitian_reduction() {
    let mut worst_n: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut worst_xi: f64 = 0.0;
    for (h, grid) in fixture_set() {
        let hh = hermitian_version(&h);
        let eye = ComplexMatrix::identity(hh.dim());
        let u = oracle_propagator(&hh, &grid);
        let n = normalizer_exact(&u).unwrap();
        let p = &n * &u;
        worst_n = worst_n.max((&n - &eye).fro_norm());
        worst_p = worst_p.max((&p - &u).fro_norm());
        let omega = omega_density(&hh, &grid, 2);
        let xi = xi_density(&omega, 1);
        let xi_mag = xi
            .samples()
            .iter()
            .map(|s| s.fro_norm())
            .fold(0.0, f64::max);
        worst_xi = worst_xi.max(xi_mag);
    }
    assert!(worst_n <= 1e-10, "||N - I|| worst {worst_n:.3e}");
    assert!(worst_p <= 1e-10, "||P - U|| worst {worst_p:.3e}");
    assert!(worst_xi <= 1e-12, "xi order-1 samples worst {worst_xi:.3e}");
    println!(
        "acceptance 2 hermitian reduction: PASS (||N-I|| {worst_n:.3e}, ||P-U|| {worst_p:.3e}, xi {worst_xi:.3e})"
    );
}

#[test]
fn acceptance_03_pure_decay_analytic() {
    let (gamma, t1): (f64, f64) = (0.7, 1.0);
    let dim = 3;
    let h = HamiltonianSpec::constant(ComplexMatrix::identity(dim).scale(C64::new(0.0, -gamma)));
    let grid = TimeGrid::new(0.0, t1, 256).unwrap();
    let eye = ComplexMatrix::identity(dim);
    let n_expected = ComplexMatrix::identity(dim).scale_re((gamma * t1).exp());

    // exact path
    let u = oracle_propagator(&h, &grid);
    let n_exact = normalizer_exact(&u).unwrap();
    let p_exact = &n_exact * &u;
    let en = (&n_exact - &n_expected).fro_norm();
    let ep = (&p_exact - &eye).fro_norm();
    assert!(en <= 1e-12, "exact N error {en:.3e}");
    assert!(ep <= 1e-12, "exact P error {ep:.3e}");

    // series path
    let omega = omega_density(&h, &grid, 2);
    let xi = xi_density(&omega, 3);
    let n_series = normalizer_series(&xi);
    let u_magnus = expm(&magnus_exponent(&omega).scale(MINUS_I));
    let p_series = &n_series * &u_magnus;
    let esn = (&n_series - &n_expected).fro_norm();
    let esp = (&p_series - &eye).fro_norm();
    assert!(esn <= 1e-12, "series N error {esn:.3e}");
    assert!(esp <= 1e-12, "series P error {esp:.3e}");
    println!(
        "acceptance 3 pure decay: PASS (exact N {en:.2e} P {ep:.2e}; series N {esn:.2e} P {esp:.2e})"
    );
}

#[test]
fn acceptance_04_dyson_truncation_order() {
    let start = Instant::now();
    let h = random_bounded_hamiltonian(2, 1.5, 7, TimeProfile::Trigonometric);
    let ts: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
    let mut slopes = Vec::new();
    for k in 1..=3usize {
        let errs: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let grid = TimeGrid::new(0.0, t, 512).unwrap();
                let u = dyson_series(&h, &grid, k);
                let truth = oracle_propagator_refined(&h, &grid);
                (&u - &truth).fro_norm()
            })
            .collect();
        let slope = log_log_slope(&ts, &errs);
        assert!(
            (slope - (k as f64 + 1.0)).abs() <= 0.3,
            "order {k}: slope {slope:.3}, errs {errs:?}"
        );
        slopes.push(slope);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "runtime {elapsed:.2}s >= 5s");
    println!(
        "acceptance 4 dyson order: PASS (slopes {:.2}/{:.2}/{:.2} for K=1..3, {elapsed:.2}s)",
        slopes[0], slopes[1], slopes[2]
    );
}

#[test]
fn acceptance_05_magnus_order() {
    // Hermitian H(t) = σz + sin(t) σx
    let h = HamiltonianSpec::new(2, 2.0, |t: f64| {
        ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(t.sin(), 0.0)],
            vec![C64::new(t.sin(), 0.0), C64::new(-1.0, 0.0)],
        ])
        .unwrap()
    });
    let ts = [0.4, 0.2, 0.1, 0.05];
    let errs: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let grid = TimeGrid::new(0.0, t, 512).unwrap();
            let u = expm(&magnus_exponent(&omega_density(&h, &grid, 2)).scale(MINUS_I));
            let truth = oracle_propagator_refined(&h, &grid);
            (&u - &truth).fro_norm()
        })
        .collect();
    let slope = log_log_slope(&ts, &errs);
    assert!(slope >= 3.0 - 0.3, "slope {slope:.3}, errs {errs:?}");
    println!("acceptance 5 magnus order: PASS (order-2 slope {slope:.2})");
}

#[test]
fn acceptance_06_bch_oracle() {
    let scales = [0.2, 0.1, 0.05, 0.025];
    let mut min_slope = f64::INFINITY;
    for pair in 0..50u64 {
        let a0 = random_matrix(3, 2000 + pair);
        let b0 = random_matrix(3, 3000 + pair);
        let a0 = a0.scale_re(1.0 / a0.fro_norm());
        let b0 = b0.scale_re(1.0 / b0.fro_norm());
        let errs: Vec<f64> = scales
            .iter()
            .map(|&s| {
                let a = a0.scale_re(s);
                let b = b0.scale_re(s);
                let c = bch_combine(&a, &b, 3).unwrap();
                let truth = logm(&(&expm(&a) * &expm(&b))).unwrap();
                (&c - &truth).fro_norm()
            })
            .collect();
        min_slope = min_slope.min(log_log_slope(&scales, &errs));
    }
    assert!(min_slope >= 3.5, "min slope {min_slope:.3}");
    println!("acceptance 6 bch oracle: PASS (50 pairs, min slope {min_slope:.2})");
}

#[test]
fn acceptance_07_xi_product_identity() {
    // constant non-Hermitian 2x2 H; Ξ at order 2
    let hm = random_matrix(2, 4242).scale_re(0.8);
    let ts = [0.4, 0.2, 0.1, 0.05];
    let errs: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let h = HamiltonianSpec::constant(hm.clone());
            let grid = TimeGrid::new(0.0, t, 256).unwrap();
            let omega = omega_density(&h, &grid, 2);
            let xi = xi_density(&omega, 2);
            let lhs = expm(&magnus_exponent(&xi));
            let u = expm(&hm.scale(C64::new(0.0, -t)));
            (&lhs - &(&u * &u.adjoint())).fro_norm()
        })
        .collect();
    let slope = log_log_slope(&ts, &errs);
    assert!(slope >= 3.0, "slope {slope:.3}, errs {errs:?}");
    println!("acceptance 7 xi product identity: PASS (slope {slope:.2})");
}

#[test]
fn acceptance_08_path_consistency() {
    let ts = [0.4, 0.2, 0.1, 0.05];
    let slope_for = |h: &HamiltonianSpec| -> f64 {
        let errs: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let grid = TimeGrid::new(0.0, t, 256).unwrap();
                unitarize_report(h, &grid, 2, 3).unwrap().path_disagreement
            })
            .collect();
        log_log_slope(&ts, &errs)
    };

    // 2-site Hatano-Nelson, τ=1, γ=0.5
    let hn = unimag::hamiltonians::build_hatano_nelson(
        &unimag::hamiltonians::HatanoNelsonSpec::with_constant_gamma(2, vec![1.0], vec![0.5]),
    )
    .unwrap();
    let hn_slope = slope_for(&hn);
    assert!(hn_slope >= 2.5, "Hatano-Nelson slope {hn_slope:.3}");

    let mut min_random = f64::INFINITY;
    for j in 0..10u64 {
        let dim = [2usize, 3, 4][(j % 3) as usize];
        let h = random_bounded_hamiltonian(dim, 1.5, 5000 + j, TimeProfile::Trigonometric);
        min_random = min_random.min(slope_for(&h));
    }
    assert!(
        min_random >= 2.5,
        "random-fixture min slope {min_random:.3}"
    );
    println!(
        "acceptance 8 path consistency: PASS (HN slope {hn_slope:.2}, random min {min_random:.2})"
    );
}

#[test]
fn acceptance_09_hatano_nelson_end_to_end() {
    // the lattice demo: l=6, τ=1, γ_i(t) = 0.5 sin(t)
    let demo = r#"{
        "model": {"hatano_nelson": {"l": 6,
            "tau": [1, 1, 1, 1, 1],
            "gamma": {"g0": [0, 0, 0, 0, 0],
                       "g1": [0.5, 0.5, 0.5, 0.5, 0.5],
                       "omega": [1, 1, 1, 1, 1]}}},
        "time": {"t0": 0.0, "t1": 2.0, "steps": 256, "output_every": 16},
        "method": "unitarized_exact",
        "initial_state": "site_1_localized",
        "output": {"path": "demo.csv", "format": "csv"}
    }"#;
    let scenario = build_scenario(RunConfig::from_json(demo).unwrap()).unwrap();
    let run = run_scenario(&scenario).unwrap();
    let worst = run
        .rows
        .iter()
        .map(|r| (r.state_norm - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "unitarized_exact norm drift {worst:.3e}");

    // oracle with a constant nonzero γ drifts monotonically away from 1
    let mut config = RunConfig::from_json(demo).unwrap();
    if let unimag::config::ModelConfig::HatanoNelson { gamma, .. } = &mut config.model {
        gamma.g0 = vec![0.5; 5];
        gamma.g1 = vec![0.0; 5];
    }
    let scenario_const = build_scenario(config).unwrap();
    let oracle_run = run_with_method(&scenario_const, Method::Oracle).unwrap();
    let drift: Vec<f64> = oracle_run
        .rows
        .iter()
        .map(|r| (r.state_norm - 1.0).abs())
        .collect();
    for w in drift.windows(2) {
        assert!(w[1] >= w[0] - 1e-12, "drift not monotone: {drift:?}");
    }
    let final_drift = *drift.last().unwrap();
    assert!(final_drift > 1e-3, "no visible drift: {final_drift:.3e}");

    // first-order Σ is the Hermitian hopping, entry by entry
    let omega = omega_density(&scenario.hamiltonian, &scenario.grid, 1);
    let xi = xi_density(&omega, 1);
    let sigma = sigma_density(&omega, &xi, 1);
    let hc = ComplexMatrix::from_fn(6, |i, j| {
        if i.abs_diff(j) == 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut worst_entry: f64 = 0.0;
    for s in sigma.samples() {
        for i in 0..6 {
            for j in 0..6 {
                worst_entry = worst_entry.max((s.get(i, j) - hc.get(i, j)).norm());
            }
        }
    }
    assert!(
        worst_entry <= 1e-14,
        "Σ₁ vs Hc worst entry {worst_entry:.3e}"
    );
    println!(
        "acceptance 9 lattice demo: PASS (unitarized drift {worst:.2e}, oracle drift {final_drift:.2e}, Σ₁ {worst_entry:.2e})"
    );
}

#[test]
fn acceptance_10_matrix_kernel_self_consistency() {
    // sqrtm_pd round trip on 100 SPD fixtures
    let mut worst_sqrt: f64 = 0.0;
    for j in 0..100u64 {
        let dim = 2 + (j % 7) as usize;
        let m = random_matrix(dim, 7000 + j);
        let a = &(&m * &m.adjoint()) + &ComplexMatrix::identity(dim).scale_re(1e-3);
        let s = sqrtm_pd(&a).unwrap();
        worst_sqrt = worst_sqrt.max((&(&s * &s) - &a).fro_norm() / a.fro_norm().max(1.0));
    }
    assert!(worst_sqrt <= 1e-10, "sqrt round trip {worst_sqrt:.3e}");

    // expm against the spectral oracle on constructed diagonalizable fixtures
    let mut worst_expm: f64 = 0.0;
    for j in 0..40u64 {
        let dim = 2 + (j % 5) as usize;
        let v = &ComplexMatrix::identity(dim) + &random_matrix(dim, 8000 + j).scale_re(0.2);
        let vinv = inv(&v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + j);
        let lam: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let a = &(&v * &ComplexMatrix::from_diag(&lam)) * &vinv;
        let explam: Vec<C64> = lam.iter().map(|z| z.exp()).collect();
        let want = &(&v * &ComplexMatrix::from_diag(&explam)) * &vinv;
        worst_expm = worst_expm.max((&expm(&a) - &want).fro_norm());
    }
    assert!(
        worst_expm <= 1e-9,
        "expm vs spectral oracle {worst_expm:.3e}"
    );

    // the two normalizer formulas agree
    let mut worst_dual: f64 = 0.0;
    for j in 0..25u64 {
        let u = &random_matrix(4, 9500 + j) + &ComplexMatrix::identity(4).scale_re(2.0);
        let n1 = normalizer_exact(&u).unwrap();
        let ui = inv(&u).unwrap();
        let n2 = sqrtm_pd(&(&ui.adjoint() * &ui).hermitian_part()).unwrap();
        worst_dual = worst_dual.max((&n1 - &n2).fro_norm());
    }
    assert!(
        worst_dual <= 1e-9,
        "dual normalizer formulas {worst_dual:.3e}"
    );
    println!(
        "acceptance 10 kernels: PASS (sqrt {worst_sqrt:.2e}, expm {worst_expm:.2e}, dual N {worst_dual:.2e})"
    );
}

#[test]
fn acceptance_summary_state_evolution_sanity() {
    // not a numbered criterion: a cheap end-to-end guard that the evolved
    // state of the unitarized demo stays a probability distribution
    let demo = r#"{
        "model": {"hatano_nelson": {"l": 6,
            "tau": [1, 1, 1, 1, 1],
            "gamma": {"g0": [0.5, 0.5, 0.5, 0.5, 0.5],
                       "g1": [0, 0, 0, 0, 0],
                       "omega": [0, 0, 0, 0, 0]}}},
        "time": {"t0": 0.0, "t1": 3.0, "steps": 192, "output_every": 32},
        "method": "unitarized_exact",
        "output": {"path": "demo.csv", "format": "csv"}
    }"#;
    let scenario = build_scenario(RunConfig::from_json(demo).unwrap()).unwrap();
    let run = run_scenario(&scenario).unwrap();
    for r in &run.rows {
        let total: f64 = r.site_populations.iter().sum();
        assert!((total - 1.0).abs() < 1e-8, "populations sum {total}");
        assert!(r.site_populations.iter().all(|p| *p >= 0.0));
    }
    let _ = Array1::<C64>::zeros(1);
}
