//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p gaussian-complexity-core --test acceptance`.

use std::f64::consts::{E, FRAC_PI_3, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gaussian_complexity_core::coherent::{coherent_complexity, coherent_geodesic};
use gaussian_complexity_core::complexity::{relative_complex_structure, state_complexity};
use gaussian_complexity_core::lie::{metric_inner, stabilizer_basis};
use gaussian_complexity_core::nonreversible::{
    cost_breakdown, lorentz_geodesic, lorentz_geodesic_with_drift, lorentz_residual,
    nonreversible_cost, DiscretizedPath, Polynomial, SingleModeChart, SingleModeMetric,
    VectorPotential,
};
use gaussian_complexity_core::oracle::{
    check_stabilizer_geodesic, minimize_to_target, OracleOptions,
};
use gaussian_complexity_core::phase_space::{
    apply_transformation, multimode_squeezing, reference_state, single_mode_squeezing,
    CovarianceMatrix, GaussianState, StateKind,
};
use gaussian_complexity_core::sampling::{random_stabilizer_element, random_state};
use gaussian_complexity_core::weyl::{weyl_complexity, WeylFactor};
use gaussian_complexity_core::{DVector, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn tol() -> Tolerance {
    Tolerance::default()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn squeezed(r: f64, phi: f64) -> GaussianState {
    apply_transformation(
        &reference_state(StateKind::Boson, 1),
        &single_mode_squeezing(r, phi).unwrap(),
        tol(),
    )
    .unwrap()
}

const RADII: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
const ANGLES: [f64; 3] = [0.0, FRAC_PI_3, 3.0 * PI / 2.0];

fn squeezing_anchor() -> Outcome {
    let r0 = reference_state(StateKind::Boson, 1);
    let sigma = CovarianceMatrix::identity(1);
    let mut worst: f64 = 0.0;
    for r in RADII {
        for phi in ANGLES {
            let c = state_complexity(&r0, &squeezed(r, phi), &sigma, tol())
                .map_err(|e| e.to_string())?;
            worst = worst.max((c - r).abs());
        }
    }
    check(worst <= 1e-10, format!("max |C - r| = {worst:.3e}"))
}

fn multimode_additivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        for _ in 0..5 {
            let params: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.random_range(0.0..2.5), rng.random_range(0.0..2.0 * PI)))
                .collect();
            let m = multimode_squeezing(&params).unwrap();
            let r0 = reference_state(StateKind::Boson, n);
            let t = apply_transformation(&r0, &m, tol()).unwrap();
            let c = state_complexity(&r0, &t, &CovarianceMatrix::identity(n), tol())
                .map_err(|e| e.to_string())?;
            let expected = params.iter().map(|(r, _)| r * r).sum::<f64>().sqrt();
            worst = worst.max((c - expected).abs());
        }
    }
    check(
        worst <= 1e-9,
        format!("max |C - sqrt(sum r^2)| = {worst:.3e}"),
    )
}

fn coherent_reduction() -> Outcome {
    let r0 = reference_state(StateKind::Boson, 1);
    let sigma = CovarianceMatrix::identity(1);
    let mut worst: f64 = 0.0;
    for r in RADII {
        for phi in ANGLES {
            let g = coherent_geodesic(&r0, &squeezed(r, phi), &sigma, tol())
                .map_err(|e| e.to_string())?;
            worst = worst.max((coherent_complexity(&g) - r).abs());
        }
    }
    let t = r0
        .with_displacement(DVector::from_vec(vec![3.0, 4.0]))
        .unwrap();
    let g = coherent_geodesic(&r0, &t, &sigma, tol()).map_err(|e| e.to_string())?;
    let anchor = (coherent_complexity(&g) - 5.0).abs();
    check(
        worst <= 1e-10 && anchor <= 1e-12,
        format!("z=0 max |C - r| = {worst:.3e}, |C(z=(3,4)) - 5| = {anchor:.3e}"),
    )
}

fn orthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for kind in [StateKind::Boson, StateKind::Fermion] {
        for n in 1..=2 {
            let r0 = reference_state(kind, n);
            let sigma = r0.metric_covariance(tol()).unwrap();
            let basis =
                stabilizer_basis(r0.complex_structure(), &sigma).map_err(|e| e.to_string())?;
            for _ in 0..50 {
                let t = random_state(kind, n, 0.6, &mut rng, tol()).unwrap();
                let d = relative_complex_structure(&r0, &t, tol()).map_err(|e| e.to_string())?;
                let gen = d.generator();
                for v in &basis.elements {
                    worst = worst.max(metric_inner(gen.matrix(), v.matrix(), &sigma).abs());
                }
                count += 1;
            }
        }
    }
    check(
        worst <= 1e-9,
        format!("{count} targets, max |g1(log D/2, V)| = {worst:.3e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_gap: f64 = 0.0;
    let mut worst_undercut: f64 = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let cases = [(StateKind::Boson, 1, 20), (StateKind::Fermion, 2, 10)];
    for (kind, n, count) in cases {
        let r0 = reference_state(kind, n);
        let sigma = r0.metric_covariance(tol()).unwrap();
        for i in 0..count {
            let t = random_state(kind, n, 0.5, &mut rng, tol()).unwrap();
            let closed = state_complexity(&r0, &t, &sigma, tol()).map_err(|e| e.to_string())?;
            let opts = OracleOptions {
                segments: 16,
                restarts: 5,
                seed: 100 + i as u64,
                ..OracleOptions::default()
            };
            let sol = minimize_to_target(&r0, &t, &opts, tol()).map_err(|e| e.to_string())?;
            if !sol.converged {
                failures.push(format!("{kind:?} #{i} did not converge"));
                continue;
            }
            let gap = (sol.length - closed).abs() / closed.max(1e-12);
            worst_gap = worst_gap.max(gap);
            worst_undercut = worst_undercut.max(closed - sol.length);
        }
    }
    let detail = format!(
        "max relative gap = {worst_gap:.3e}, max undercut = {worst_undercut:.3e}{}",
        if failures.is_empty() {
            String::new()
        } else {
            format!(", {}", failures.join("; "))
        }
    );
    check(
        failures.is_empty() && worst_gap < 0.01 && worst_undercut <= 1e-6,
        detail,
    )
}

fn weyl_analytic() -> Outcome {
    let mut worst: f64 = 0.0;
    for (beta, r) in [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)] {
        let c = weyl_complexity(r, &WeylFactor::Linear(beta), 128).map_err(|e| e.to_string())?;
        let exact = ((beta * r).exp() - 1.0) / beta;
        worst = worst.max((c - exact).abs());
    }
    let exact = E - 1.0;
    let errs: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| (weyl_complexity(1.0, &WeylFactor::Linear(1.0), n).unwrap() - exact).abs())
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        worst <= 1e-8 && min_order >= 3.8,
        format!("max error = {worst:.3e}, observed orders = {orders:.3?}"),
    )
}

fn radial_path(from: f64, to: f64, n: usize) -> DiscretizedPath {
    DiscretizedPath::uniform(
        (0..=n)
            .map(|k| DVector::from_vec(vec![from + (to - from) * k as f64 / n as f64, 0.0]))
            .collect(),
    )
    .unwrap()
}

fn non_reversibility() -> Outcome {
    let chart = SingleModeMetric;
    let h = VectorPotential::Gradient(Polynomial::new(vec![0.0, 0.5]).unwrap());
    let path = radial_path(0.0, 2.0, 64);
    let fwd = nonreversible_cost(&path, &chart, &h).map_err(|e| e.to_string())?;
    let rev = nonreversible_cost(&path.reversed(), &chart, &h).map_err(|e| e.to_string())?;
    let anchor = (fwd - 1.0).abs().max((rev - 3.0).abs());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..40);
        let mut r = rng.random_range(0.0..1.5);
        let mut phi = rng.random_range(0.0..2.0 * PI);
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            pts.push(DVector::from_vec(vec![r, phi]));
            r = (r + rng.random_range(-0.2..0.2)).abs();
            phi += rng.random_range(-0.5..0.5);
        }
        let path = DiscretizedPath::uniform(pts).unwrap();
        let a = match rng.random_range(0..3) {
            0 => VectorPotential::Constant(rng.random_range(0.0..1.0)),
            1 => VectorPotential::Gradient(
                Polynomial::new(vec![0.0, 0.3, rng.random_range(-0.1..0.1)]).unwrap(),
            ),
            _ => VectorPotential::Modulated {
                f0: Polynomial::new(vec![rng.random_range(0.0..0.5)]).unwrap(),
                eps: rng.random_range(-1.0..1.0),
            },
        };
        let f = nonreversible_cost(&path, &chart, &a).map_err(|e| e.to_string())?;
        let b = nonreversible_cost(&path.reversed(), &chart, &a).map_err(|e| e.to_string())?;
        let len = cost_breakdown(&path, &chart, &VectorPotential::None)
            .unwrap()
            .length;
        worst = worst.max((f + b - 2.0 * len).abs() / len.max(1.0));
    }
    check(
        anchor <= 1e-10 && worst <= 1e-12,
        format!("forward = {fwd:.12}, reverse = {rev:.12}, max |f + b - 2L| = {worst:.3e}"),
    )
}

fn lorentz_degeneracy() -> Outcome {
    let start = SingleModeChart::new(0.7, 0.4).unwrap();
    let vel = (0.3, 0.8);
    let length = 1.2;
    let residual = |steps: usize| -> Result<f64, String> {
        // Coarse grids drift more than the default guard allows; the order
        // sweep needs them anyway.
        let t =
            lorentz_geodesic_with_drift(start, vel, &VectorPotential::None, length, steps, 1e-3)
                .map_err(|e| e.to_string())?;
        lorentz_residual(&t, &VectorPotential::None).map_err(|e| e.to_string())
    };
    let res: Vec<f64> = [20, 40, 80]
        .iter()
        .map(|&s| residual(s))
        .collect::<Result<_, _>>()?;
    let orders: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);

    let free = lorentz_geodesic(start, vel, &VectorPotential::None, length, 200)
        .map_err(|e| e.to_string())?;
    let radial_fields = [
        VectorPotential::Gradient(Polynomial::new(vec![0.0, 0.2, 0.1]).unwrap()),
        VectorPotential::Constant(0.4),
        VectorPotential::custom(|r, _| 0.3 * (1.0 + r).recip()),
    ];
    let mut worst: f64 = 0.0;
    for a in &radial_fields {
        let t = lorentz_geodesic(start, vel, a, length, 200).map_err(|e| e.to_string())?;
        for (p, q) in t.path.points().iter().zip(free.path.points()) {
            worst = worst.max((p - q).norm());
        }
    }
    check(
        min_order >= 3.5 && worst <= 1e-12,
        format!(
            "residuals = [{}], orders = {orders:.3?}, max deviation with f(r) = {worst:.3e}",
            res.iter()
                .map(|v| format!("{v:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn condition_one() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut total = 0;
    for kind in [StateKind::Boson, StateKind::Fermion] {
        for n in 1..=2 {
            let r0 = reference_state(kind, n);
            let sigma = r0.metric_covariance(tol()).unwrap();
            let basis =
                stabilizer_basis(r0.complex_structure(), &sigma).map_err(|e| e.to_string())?;
            let mut generators: Vec<_> = basis.elements.iter().map(|e| e.scaled(0.9)).collect();
            generators.push(random_stabilizer_element(&basis, 1.0, &mut rng));
            for (i, v) in generators.iter().enumerate() {
                let rep = check_stabilizer_geodesic(v, &sigma, 50, 1000 + i as u64, tol())
                    .map_err(|e| e.to_string())?;
                worst = worst.max(rep.max_derivative());
                total += rep.derivatives.len();
            }
        }
    }
    check(
        worst < 1e-6,
        format!("{total} perturbations, max |dL/de| = {worst:.3e}"),
    )
}

fn reversal_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for (kind, n, count) in [
        (StateKind::Boson, 1, 15),
        (StateKind::Boson, 2, 15),
        (StateKind::Fermion, 1, 10),
        (StateKind::Fermion, 2, 10),
    ] {
        for _ in 0..count {
            let a = random_state(kind, n, 0.4, &mut rng, tol()).unwrap();
            let b = random_state(kind, n, 0.4, &mut rng, tol()).unwrap();
            let sa = a.metric_covariance(tol()).unwrap();
            let sb = b.metric_covariance(tol()).unwrap();
            let ab = state_complexity(&a, &b, &sa, tol()).map_err(|e| e.to_string())?;
            let ba = state_complexity(&b, &a, &sb, tol()).map_err(|e| e.to_string())?;
            worst = worst.max((ab - ba).abs());
            pairs += 1;
        }
    }
    check(
        worst <= 1e-10,
        format!("{pairs} pairs, max |C(a,b) - C(b,a)| = {worst:.3e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "1 squeezing anchor",
            squeezing_anchor,
            Duration::from_secs(1),
        ),
        (
            "2 multimode additivity",
            multimode_additivity,
            Duration::from_secs(1),
        ),
        (
            "3 coherent reduction and anchor",
            coherent_reduction,
            Duration::from_secs(1),
        ),
        (
            "4 stabilizer orthogonality",
            orthogonality,
            Duration::from_secs(10),
        ),
        (
            "5 oracle equivalence",
            oracle_equivalence,
            Duration::from_secs(300),
        ),
        (
            "6 weyl analytic check",
            weyl_analytic,
            Duration::from_secs(1),
        ),
        (
            "7 non-reversibility",
            non_reversibility,
            Duration::from_secs(5),
        ),
        (
            "8 lorentz geodesic degeneracy",
            lorentz_degeneracy,
            Duration::from_secs(10),
        ),
        (
            "9 condition-1 stationarity",
            condition_one,
            Duration::from_secs(60),
        ),
        (
            "10 reversal symmetry",
            reversal_symmetry,
            Duration::from_secs(5),
        ),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let t0 = Instant::now();
        let outcome = run();
        let elapsed = t0.elapsed();
        let in_time = elapsed <= budget;
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.3}s / budget {}s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
