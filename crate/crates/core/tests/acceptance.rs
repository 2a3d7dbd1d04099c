//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line.

use std::f64::consts::PI;
use std::io::Write;

use dnls_core::diagnostics::{convergence_rates, ExactSolution};
use dnls_core::grid::{inner_product, norm_h, seminorm_1h};
use dnls_core::operators::{apply_fd_laplacian, LaplacianEigs, SpectralLaplacian};
use dnls_core::schemes::licfp::{li_cfp_step, startup_step};
use dnls_core::schemes::{
    run_to_time, solve_shifted, PdeParams, SchemeKind, SchemeRun, SolverConfig,
};
use dnls_core::{Complex64, Field, Grid3, TimeGrid};
use dnls_oracle::{
    dense_fd_laplacian, dense_shifted_system, dense_solve, dense_spectral_laplacian,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

// Written to the raw stdout handle so the line shows up even when the test
// harness captures output.
fn report(id: &str, ok: bool, detail: String) {
    let line = format!(
        "[{}] criterion {id}: {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn benchmark(n: usize) -> (Field, ExactSolution) {
    let grid = Grid3::cube(n).unwrap();
    let exact = ExactSolution::new(Complex64::new(1.0, 0.0), [1, 1, 1], PdeParams::default());
    (exact.u(0.0, &grid), exact)
}

fn final_errors(kind: SchemeKind, n: usize, tau: f64, t_final: f64) -> (f64, f64) {
    let (u0, exact) = benchmark(n);
    let tg = TimeGrid::from_final_time(tau, t_final).unwrap();
    let out = run_to_time(
        u0,
        kind,
        PdeParams::default(),
        tg,
        SolverConfig::default(),
        tg.steps().max(1),
        Some(&exact),
    )
    .unwrap();
    out.rows.last().unwrap().errors.unwrap()
}

fn random_field(grid: Grid3, rng: &mut StdRng) -> Field {
    Field::from_fn(grid, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn criterion_1_temporal_convergence() {
    let taus = [0.1, 0.05, 0.025, 0.0125];
    let published = [1.751e-1, 4.507e-2, 1.135e-2, 2.844e-3];
    let errors: Vec<f64> = taus
        .iter()
        .map(|&tau| final_errors(SchemeKind::LiCfp, 16, tau, 1.0).0)
        .collect();
    let pairs: Vec<(f64, f64)> = taus.iter().copied().zip(errors.iter().copied()).collect();
    let rates = convergence_rates(&pairs).unwrap();
    let errors_ok = errors
        .iter()
        .zip(published)
        .all(|(&e, p)| rel(e, p) <= 0.05);
    let rates_ok = rates.iter().all(|&r| (1.9..=2.05).contains(&r));
    let ok = errors_ok && rates_ok;
    report(
        "1 (temporal convergence, N=16)",
        ok,
        format!(
            "L2 errors {} vs {}; rates {rates:.4?}",
            sci(&errors),
            sci(&published)
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2_spectral_spatial_accuracy() {
    let errors: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| final_errors(SchemeKind::LiCfp, n, 1e-4, 1.0).0)
        .collect();
    let max = errors.iter().copied().fold(0.0, f64::max);
    let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = max <= 1e-6 && max <= 2.0 * min;
    report(
        "2 (spatial accuracy, tau=1e-4)",
        ok,
        format!("L2 errors at N=4,8,16: {}", sci(&errors)),
    );
    assert!(ok);
}

#[test]
#[ignore = "full-fidelity run with 1e5 steps per grid; enable with --ignored"]
fn criterion_2_full_fidelity() {
    let errors: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| final_errors(SchemeKind::LiCfp, n, 1e-5, 1.0).0)
        .collect();
    let ok = errors
        .iter()
        .all(|&e| (1.8e-9 / 3.0..=1.8e-9 * 3.0).contains(&e));
    report(
        "2-full (spatial accuracy, tau=1e-5)",
        ok,
        format!(
            "L2 errors at N=4,8,16: {} (target 1.8e-9 within x3)",
            sci(&errors)
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_scheme_comparison() {
    // h = π/4 on [0, 2π] means N = 8
    let licfp = final_errors(SchemeKind::LiCfp, 8, 0.005, 1.0).0;
    let ifd = final_errors(SchemeKind::Ifd, 8, 0.005, 1.0).0;
    let rk3 = final_errors(SchemeKind::Rk3, 8, 0.005, 1.0).0;
    let ok_licfp = rel(licfp, 4.553e-4) <= 0.05;
    let ok_ifd = rel(ifd, 8.746e-1) <= 0.10;
    let ok_rk3 = (1.014e-6 / 2.0..=2.0 * 1.014e-6).contains(&rk3);
    let ok = ok_licfp && ok_ifd && ok_rk3;
    report(
        "3 (scheme comparison, tau=0.005, h=pi/4)",
        ok,
        format!(
            "LI-CFP {licfp:.4e} (4.553e-4), IFD {ifd:.4e} (8.746e-1), RK3 {rk3:.4e} (1.014e-6)"
        ),
    );
    assert!(ok);
}

fn max_residuals(kind: SchemeKind) -> (f64, f64) {
    let (u0, _) = benchmark(16);
    let tg = TimeGrid::from_final_time(0.1, 100.0).unwrap();
    let out = run_to_time(
        u0,
        kind,
        PdeParams::default(),
        tg,
        SolverConfig::default(),
        1,
        None,
    )
    .unwrap();
    out.rows.iter().fold((0.0f64, 0.0f64), |(m, e), r| {
        (m.max(r.rel_mass_residual), e.max(r.rel_energy_residual))
    })
}

#[test]
fn criterion_4_long_time_conservation() {
    let (rm_l, re_l) = max_residuals(SchemeKind::LiCfp);
    let (rm_i, re_i) = max_residuals(SchemeKind::Ifd);
    let ok = rm_l <= 1e-10 && re_l <= 1e-10 && rm_i <= 1e-9 && re_i <= 1e-9;
    report(
        "4 (conservation on [0,100], tau=0.1, N=16)",
        ok,
        format!("LI-CFP max RM {rm_l:.3e}, RE {re_l:.3e}; IFD max RM {rm_i:.3e}, RE {re_i:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_property_suite() {
    let mut rng = StdRng::seed_from_u64(20_240_531);
    let mut failures = Vec::new();

    // semi-norm equivalence |U|_{1,h} <= |U|_h <= (π/2)|U|_{1,h}
    for n in [4, 8] {
        let grid = Grid3::cube(n).unwrap();
        let op = SpectralLaplacian::new(grid);
        for _ in 0..100 {
            let u = random_field(grid, &mut rng);
            let fd = seminorm_1h(&u);
            let sp = op.seminorm_h(&u).unwrap();
            if !(fd <= sp * (1.0 + 1e-12) && sp <= PI / 2.0 * fd * (1.0 + 1e-12)) {
                failures.push(format!("semi-norm sandwich at N={n}: {fd} vs {sp}"));
            }
        }
    }

    // FFT vs dense operators
    for grid in [
        Grid3::cube(2).unwrap(),
        Grid3::cube(4).unwrap(),
        Grid3::new([4, 2, 2], [2.0 * PI; 3]).unwrap(),
    ] {
        let op = SpectralLaplacian::new(grid);
        let dense_sp = dense_spectral_laplacian(&grid).unwrap();
        let dense_fd = dense_fd_laplacian(&grid).unwrap();
        for _ in 0..5 {
            let u = random_field(grid, &mut rng);
            let fast = op.apply(&u).unwrap();
            let slow = dense_sp.apply(&u).unwrap();
            let err = norm_h(&fast.sub(&slow).unwrap()) / norm_h(&slow).max(1e-300);
            if err > 1e-12 {
                failures.push(format!("spectral FFT vs dense on {grid}: {err:e}"));
            }
            let fast = apply_fd_laplacian(&u);
            let slow = dense_fd.apply(&u).unwrap();
            let err = norm_h(&fast.sub(&slow).unwrap()) / norm_h(&slow).max(1e-300);
            if err > 1e-12 {
                failures.push(format!("fd stencil vs dense on {grid}: {err:e}"));
            }
        }
    }

    // modewise eigenvalue sandwich
    for n in [4, 8, 16, 32] {
        let eigs = LaplacianEigs::new(&Grid3::cube(n).unwrap());
        for axis in 0..3 {
            for (s, f) in eigs.spectral(axis).iter().zip(eigs.fd(axis)) {
                let (s, f) = (s.abs(), f.abs());
                if !(4.0 / (PI * PI) * s <= f * (1.0 + 1e-14) && f <= s * (1.0 + 1e-14)) {
                    failures.push(format!("eigenvalue sandwich N={n}: {s} vs {f}"));
                }
            }
        }
    }

    // three-level mass identity and per-step energy identity
    let cfg = SolverConfig::default();
    {
        let grid = Grid3::cube(8).unwrap();
        let u0 = Field::from_fn(grid, |[x, y, z]| {
            Complex64::new(
                0.6 + 0.2 * x.cos() * y.sin(),
                0.2 * (2.0 * z).cos() + 0.1 * y.sin(),
            )
        });
        let m0 = norm_h(&u0).powi(2);
        let tg = TimeGrid::new(0.05, 40).unwrap();
        let mut run = SchemeRun::new(SchemeKind::LiCfp, u0, PdeParams::default(), tg, cfg);
        let mut energy = run.energy().unwrap();
        let mut worst_mass = 0.0f64;
        let mut worst_energy = 0.0f64;
        while !run.is_finished() {
            let before = run.previous().map(|p| norm_h(p).powi(2));
            run.step().unwrap();
            if let Some(before) = before {
                let after = norm_h(run.current()).powi(2);
                worst_mass = worst_mass.max((after - before).abs() / m0);
            }
            let next = run.energy().unwrap();
            worst_energy = worst_energy.max((next - energy).abs() / energy.abs());
            energy = next;
        }
        if worst_mass > 100.0 * cfg.tol {
            failures.push(format!("three-level mass identity: {worst_mass:e}"));
        }
        if worst_energy > 1e-10 {
            failures.push(format!("per-step energy identity: {worst_energy:e}"));
        }
    }

    // splitting solver vs dense direct solve
    {
        let grid = Grid3::cube(4).unwrap();
        let op = SpectralLaplacian::new(grid);
        for &(tau, coeff) in &[(0.01, 2.0), (0.1, 2.0 * (-0.2f64).exp()), (0.05, -1.5)] {
            let rhs = random_field(grid, &mut rng);
            let potential = random_field(grid, &mut rng).modulus_squared();
            let fast = solve_shifted(&op, &rhs, &potential, tau, coeff, &cfg)
                .unwrap()
                .field;
            let a = dense_shifted_system(&grid, &potential, tau, coeff).unwrap();
            let slow = dense_solve(&a, &rhs).unwrap();
            let err = norm_h(&fast.sub(&slow).unwrap()) / norm_h(&slow);
            if err > 1e-10 {
                failures.push(format!("solve_shifted vs dense (tau={tau}): {err:e}"));
            }
        }
    }

    // exact solution satisfies the continuous equation under Δ_h
    {
        let grid = Grid3::cube(8).unwrap();
        let op = SpectralLaplacian::new(grid);
        let params = PdeParams::default();
        let exact = ExactSolution::new(Complex64::new(0.8, 0.6), [1, -2, 3], params);
        let t = 0.7;
        let dt = 1e-4;
        let u = exact.u(t, &grid);
        let lap = op.apply(&u).unwrap();
        // u_t = -i δ'(t) u, δ'(t) = |k|² - β|K|² e^{-2γt}
        let k2 = (1 + 4 + 9) as f64;
        let dphase = k2 - params.beta * exact.amplitude.norm_sqr() * params.damping_factor(t);
        let mut worst = 0.0f64;
        for j in 0..grid.len() {
            let v = u.values()[j];
            let ut = Complex64::new(0.0, -dphase) * v;
            let r = Complex64::new(0.0, 1.0) * ut
                + lap.values()[j]
                + params.nonlinear_coeff(t) * v.norm_sqr() * v;
            worst = worst.max(r.norm());
        }
        // the closed-form derivative agrees with the sampled phase
        let fd_phase = (exact.phase(t + dt, &grid) - exact.phase(t - dt, &grid)) / (2.0 * dt);
        if worst > 1e-10 || (fd_phase - dphase).abs() > 1e-6 {
            failures.push(format!("exact-solution residual {worst:e}"));
        }
    }

    // rate formula on synthetic power laws
    for p in [1.0, 2.0, 3.0, 4.5] {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&t: &f64| (t, 3.7 * t.powf(p)))
            .collect();
        for r in convergence_rates(&pts).unwrap() {
            if (r - p).abs() > 1e-12 {
                failures.push(format!("rate formula p={p}: {r}"));
            }
        }
    }

    // Hermitian, negative semi-definite quadratic forms
    {
        let grid = Grid3::cube(4).unwrap();
        let op = SpectralLaplacian::new(grid);
        for _ in 0..20 {
            let u = random_field(grid, &mut rng);
            let lap = op.apply(&u).unwrap();
            let q = -inner_product(&lap, &u).unwrap();
            let scale = norm_h(&u).powi(2);
            if q.im.abs() > 1e-12 * scale || q.re < -1e-12 * scale {
                failures.push(format!("quadratic form {q}"));
            }
        }
    }

    // startup and three-level steps agree with the scalar plane-wave reduction
    {
        let (u0, _) = benchmark(8);
        let grid = *u0.grid();
        let op = SpectralLaplacian::new(grid);
        let params = PdeParams::default();
        let u1 = startup_step(&op, &u0, &params, 0.1, &cfg).unwrap().field;
        let u2 = li_cfp_step(&op, &u0, &u1, 0.1, &params, 0.1, &cfg)
            .unwrap()
            .field;
        let m0 = norm_h(&u0).powi(2);
        for u in [&u1, &u2] {
            if (norm_h(u).powi(2) - m0).abs() > 100.0 * cfg.tol * m0 {
                failures.push("startup mass".into());
            }
        }
    }

    let ok = failures.is_empty();
    report(
        "5 (property suite)",
        ok,
        if ok {
            "all invariants hold".to_string()
        } else {
            failures.join("; ")
        },
    );
    assert!(ok, "{failures:#?}");
}

#[test]
fn criterion_6_grid_ratio_regimes() {
    // τ > h at N=16, τ=0.1? h = 2π/16 ≈ 0.39, so both regimes need τ/h on each side
    let (coarse, _) = final_errors(SchemeKind::LiCfp, 4, 2.0, 2.0);
    let h4 = 2.0 * PI / 4.0;
    let (fine, _) = final_errors(SchemeKind::LiCfp, 16, 0.1, 1.0);
    let h16 = 2.0 * PI / 16.0;
    let ok = coarse.is_finite() && fine.is_finite() && 2.0 > h4 && 0.1 < h16;
    report(
        "6 (no grid-ratio restriction)",
        ok,
        format!(
            "tau/h = {:.2}: L2 {coarse:.3e}; tau/h = {:.2}: L2 {fine:.3e}",
            2.0 / h4,
            0.1 / h16
        ),
    );
    assert!(ok);
}
