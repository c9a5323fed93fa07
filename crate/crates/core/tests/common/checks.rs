//! Criterion checks shared by the property tests and the acceptance suite.
//! Each returns the worst residual observed, or a description of the failure.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinbasis::deduction::{deduce_all, deduce_with, Conventions, DeductionConfig, DeductionReport, PhaseFamily};
use spinbasis::spin::{basis_operator, bloch_vector, expectation, inner_product, same_ray_within, spin_operator};
use spinbasis::{AxisLabel, PhaseAngle, SpinOperator, SpinState};

pub type Check = Result<f64, String>;

pub const GRID: usize = 10_000;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn wrap(r: f64) -> f64 {
    let w = (r + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

fn sign_changes(values: &[(f64, f64)]) -> Vec<f64> {
    values
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum() && w[0].1 != 0.0)
        .map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            x0 - y0 * (x1 - x0) / (y1 - y0)
        })
        .collect()
}

/// Scans `|A|^2` over a grid: `<S_z>` of `(|A|, |B|)` changes sign exactly
/// once, at `|A| = |B|`, and the deduced x states sit there.
pub fn grid_equal_magnitudes(report: &DeductionReport) -> Check {
    let s_z = spin_operator(AxisLabel::Z);
    // Offset grid so no sample lands exactly on a root.
    let samples: Vec<(f64, f64)> = (0..GRID)
        .map(|k| {
            let t = (k as f64 + 0.37) / GRID as f64;
            let psi = SpinState::from_real(t.sqrt(), (1.0 - t).sqrt());
            (t, expectation(&s_z, &psi).unwrap())
        })
        .collect();
    let roots = sign_changes(&samples);
    ensure(roots.len() == 1, || {
        format!("expected one root of <S_z>, found {}", roots.len())
    })?;
    let root_gap = (roots[0] - 0.5).abs();
    ensure(root_gap < 1.0 / GRID as f64, || format!("root at |A|^2 = {}", roots[0]))?;
    let f = &report.final_states;
    let mut worst = root_gap;
    for s in [f.x_up, f.x_down, f.y_up, f.y_down] {
        worst = worst
            .max((s.a().norm() - s.b().norm()).abs())
            .max((s.a().norm() - FRAC_1_SQRT_2).abs());
    }
    ensure(worst < 1.0 / GRID as f64, || {
        format!("deduced magnitudes off by {worst}")
    })?;
    Ok(worst)
}

/// Scans the lower phase of x_down: the overlap with x_up vanishes only at
/// `phi4 = phi3 + pi`, which is where the deduced x_down sits.
pub fn grid_x_down_phase(report: &DeductionReport) -> Check {
    let x_up = report.final_states.x_up;
    let x_down = report.final_states.x_down;
    let phi3 = x_down.a().arg();
    let overlap = |phi4: f64| {
        let psi = SpinState::new(
            Complex64::from_polar(FRAC_1_SQRT_2, phi3),
            Complex64::from_polar(FRAC_1_SQRT_2, phi4),
        );
        inner_product(&x_up, &psi).norm()
    };
    let step = 2.0 * PI / GRID as f64;
    let (best, min) = (0..GRID)
        .map(|k| -PI + (k as f64 + 0.5) * step)
        .map(|p| (p, overlap(p)))
        .fold((0.0, f64::INFINITY), |acc, (p, o)| if o < acc.1 { (p, o) } else { acc });
    let target = wrap(phi3 + PI);
    ensure(wrap(best - target).abs() <= step, || {
        format!("overlap minimum at {best}, expected {target}")
    })?;
    ensure(min < step, || format!("minimum overlap {min}"))?;
    let deduced = wrap(x_down.b().arg() - x_down.a().arg());
    let gap = wrap(deduced - PI).abs();
    ensure(gap < 1e-12, || format!("deduced phi4 - phi3 = {deduced}"))?;
    Ok(gap)
}

/// Scans the y relative phase: `<S_x>` vanishes exactly at `±pi/2`, and the
/// deduced candidates are those two.
pub fn grid_y_relative_phase(report: &DeductionReport) -> Check {
    let f = &report.final_states;
    let s_x = basis_operator(&f.x_up, &f.x_down).map_err(|e| e.to_string())?;
    let step = 2.0 * PI / GRID as f64;
    let samples: Vec<(f64, f64)> = (0..GRID)
        .map(|k| -PI + (k as f64 + 0.29) * step)
        .map(|d| {
            (
                d,
                expectation(
                    &s_x,
                    &SpinState::new(
                        Complex64::new(FRAC_1_SQRT_2, 0.0),
                        Complex64::from_polar(FRAC_1_SQRT_2, d),
                    ),
                )
                .unwrap(),
            )
        })
        .collect();
    let mut roots = sign_changes(&samples);
    roots.sort_by(f64::total_cmp);
    ensure(roots.len() == 2, || {
        format!("expected two roots of <S_x>, found {roots:?}")
    })?;
    let grid_gap = (roots[0] + PI / 2.0).abs().max((roots[1] - PI / 2.0).abs());
    ensure(grid_gap < step, || format!("roots at {roots:?}"))?;
    let chosen = wrap(f.y_up.b().arg() - f.y_up.a().arg());
    let gap = (chosen - PI / 2.0).abs();
    ensure(gap < 1e-12, || format!("deduced y relative phase {chosen}"))?;
    Ok(gap)
}

fn random_angle(rng: &mut ChaCha8Rng) -> PhaseAngle {
    if rng.random_bool(0.25) {
        PhaseAngle::pi_fraction(rng.random_range(-12..=12), rng.random_range(1..=12))
    } else {
        PhaseAngle::radians(rng.random_range(-PI..PI))
    }
}

fn random_assignment(family: &PhaseFamily, rng: &mut ChaCha8Rng) -> BTreeMap<String, PhaseAngle> {
    family
        .free_symbols()
        .into_iter()
        .map(|s| (s.to_owned(), random_angle(rng)))
        .collect()
}

fn family<'a>(report: &'a DeductionReport, step: &str, key: &str) -> &'a PhaseFamily {
    report
        .steps
        .iter()
        .find(|s| s.name == step)
        .and_then(|s| s.family_after.get(key))
        .unwrap_or_else(|| panic!("step {step} has no family {key}"))
}

fn residuals(psi: &SpinState, ops: &[&SpinOperator], orthogonal_to: Option<&SpinState>) -> f64 {
    let mut worst = (psi.norm_sqr() - 1.0).abs();
    for op in ops {
        worst = worst.max(expectation(op, psi).unwrap().abs());
    }
    if let Some(r) = orthogonal_to {
        worst = worst.max(inner_product(r, psi).norm());
    }
    worst
}

/// Random instantiations of every phase family satisfy the constraints
/// that produced it.
pub fn phase_families(instances: usize, seed: u64) -> Check {
    let report = deduce_all().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_z = spin_operator(AxisLabel::Z);
    let x_up = report.final_states.x_up;
    let s_x = spin_operator(AxisLabel::X);
    let y_up_upper = report.steps.iter().find(|s| s.name == "y-candidates").unwrap().states["y_up_upper"];

    let x_up_family = family(&report, "x-unbiased", "x_up");
    let x_down_family = family(&report, "x-down-orthogonality", "x_down");
    let y_down_family = family(&report, "y-candidates", "y_down_upper");
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let psi = x_up_family
            .instantiate(&random_assignment(x_up_family, &mut rng))
            .map_err(|e| e.to_string())?;
        worst = worst.max(residuals(&psi, &[&s_z], None));
        let psi = x_down_family
            .instantiate(&random_assignment(x_down_family, &mut rng))
            .map_err(|e| e.to_string())?;
        worst = worst.max(residuals(&psi, &[&s_z], Some(&x_up)));
        let psi = y_down_family
            .instantiate(&random_assignment(y_down_family, &mut rng))
            .map_err(|e| e.to_string())?;
        worst = worst.max(residuals(&psi, &[&s_z, &s_x], Some(&y_up_upper)));
        // The y_up family: its overall phase is the phi5 convention.
        let config = DeductionConfig {
            conventions: Conventions {
                phi5: random_angle(&mut rng),
                ..Conventions::default()
            },
            ..DeductionConfig::default()
        };
        let f = deduce_with(&config).map_err(|e| e.to_string())?.final_states;
        worst = worst.max(residuals(&f.y_up, &[&s_z, &s_x], None));
    }
    ensure(worst <= 1e-12, || format!("worst constraint residual {worst}"))?;
    Ok(worst)
}

/// Overriding the overall-phase conventions changes each final state by a
/// global phase only, and every verification check still passes.
pub fn convention_overrides(instances: usize, seed: u64) -> Check {
    let base = deduce_all().map_err(|e| e.to_string())?.final_states;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let shared = random_angle(&mut rng);
        let conventions = Conventions {
            phi1: shared,
            phi2: shared,
            phi3: random_angle(&mut rng),
            phi5: random_angle(&mut rng),
            phi7: random_angle(&mut rng),
        };
        let report = deduce_with(&DeductionConfig {
            conventions,
            ..DeductionConfig::default()
        })
        .map_err(|e| e.to_string())?;
        ensure(report.all_checks_pass(), || format!("checks fail for {conventions:?}"))?;
        let f = report.final_states;
        for (a, b) in [
            (f.x_up, base.x_up),
            (f.x_down, base.x_down),
            (f.y_up, base.y_up),
            (f.y_down, base.y_down),
        ] {
            ensure(same_ray_within(&a, &b, 1e-12).map_err(|e| e.to_string())?, || {
                format!("{a} is not {b} up to phase")
            })?;
            worst = worst.max(1.0 - inner_product(&a, &b).norm());
        }
    }
    Ok(worst)
}

/// Changing `phi2 - phi1` rotates the whole frame about z by that angle.
pub fn relative_convention_rotates_frame(instances: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (p1, p2) = (random_angle(&mut rng), random_angle(&mut rng));
        let alpha = p2.to_radians() - p1.to_radians();
        let conventions = Conventions {
            phi1: p1,
            phi2: p2,
            ..Conventions::default()
        };
        let report = deduce_with(&DeductionConfig {
            conventions,
            ..DeductionConfig::default()
        })
        .map_err(|e| e.to_string())?;
        ensure(report.all_checks_pass(), || format!("checks fail for {conventions:?}"))?;
        let f = report.final_states;
        let (c, s) = (alpha.cos(), alpha.sin());
        for (psi, want) in [
            (f.x_up, [c, s, 0.0]),
            (f.x_down, [-c, -s, 0.0]),
            (f.y_up, [-s, c, 0.0]),
            (f.y_down, [s, -c, 0.0]),
        ] {
            let got = bloch_vector(&psi).map_err(|e| e.to_string())?;
            for k in 0..3 {
                worst = worst.max((got[k] - want[k]).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("frame rotation off by {worst}"))?;
    Ok(worst)
}
