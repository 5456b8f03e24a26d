//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use conelaw::cone::{project, tresca_degenerate_kkt_branch, Branch, KktBranch};
use conelaw::constitutive::{
    integrate_path, rate_split, script_h, stress_rate_tangent_form, von_mises_script_h,
    DriftPolicy, DriverConfig, Interpolation, MaterialState, StrainPath,
};
use conelaw::oracle::oracle_normal_projection;
use conelaw::sampling::{
    random_tensor, tresca_degenerate_surface, tresca_smooth_surface, two_function_instance,
    von_mises_surface,
};
use conelaw::tensor::{grad_j2, grad_j3, j2, j3, spectral};
use conelaw::wave::{run, Boundaries, BoundaryCondition, TimeProgram, WaveScenario};
use conelaw::yield_surface::{tresca_gradient, tresca_value};
use conelaw::{ElasticModuli, SymTensor3, YieldDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_c0de;

// Tolerances and sample counts.
const MOREAU_SAMPLES: usize = 10_000;
const MOREAU_TOL: f64 = 1e-10;
const ORACLE_SAMPLES: usize = 1_000;
const ORACLE_TOL: f64 = 1e-6;
const KKT_MIN_HITS: usize = 50;
const GRAD_SAMPLES: usize = 1_000;
const GRAD_H: f64 = 1e-5;
const GRAD_REL_TOL: f64 = 1e-6;
const GRAD_MIN_GAP: f64 = 1e-2;
const TRESCA_GRAD_NORM_TOL: f64 = 1e-12;
const IDENTITY_STATES: usize = 100;
const IDENTITY_TOL: f64 = 1e-10;
const CONSISTENCY_TOL: f64 = 1e-8;
const PLATEAU_LOW: f64 = 1e-4;
const PLATEAU_HIGH: f64 = 1e-6;
const CONVERGENCE_RATIO: f64 = 2.0;
const CONVERGENCE_RATIO_TOL: f64 = 0.3;
const WAVE_CELLS: usize = 1_000;
const WAVE_SPEED_TOL: f64 = 0.02;
const WAVE_VIOLATION_TOL: f64 = 1e-6;
const DISSIPATION_FLOOR: f64 = -1e-10;
const SHIFT_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

fn criterion_1_moreau(rng: &mut ChaCha8Rng) -> Outcome {
    type Sampler = fn(&mut ChaCha8Rng, f64) -> (YieldDomain, SymTensor3);
    let families: [(&str, Sampler); 3] = [
        ("von_mises", |r, k| {
            (YieldDomain::von_mises(k).unwrap(), von_mises_surface(r, k))
        }),
        ("tresca_smooth", |r, k| {
            (
                YieldDomain::tresca(k).unwrap(),
                tresca_smooth_surface(r, k, 1e-3 * k),
            )
        }),
        ("tresca_degenerate", |r, k| {
            let m = if r.gen_bool(0.5) { 1 } else { 3 };
            (
                YieldDomain::tresca(k).unwrap(),
                tresca_degenerate_surface(r, k, m),
            )
        }),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, sample) in families {
        let (mut recon, mut orth, mut trace) = (0.0_f64, 0.0_f64, 0.0_f64);
        for _ in 0..MOREAU_SAMPLES {
            let k = log_uniform(rng, 0.1, 10.0);
            let (domain, sigma) = sample(rng, k);
            let scale = log_uniform(rng, 1e-2, 1e2);
            let tau = random_tensor(rng, scale);
            let n = tau.norm();
            let s = match project(&domain, sigma, tau) {
                Ok(p) => p.split,
                Err(e) => return outcome(false, format!("{name}: projection failed: {e}")),
            };
            recon = recon.max((s.tangent + s.normal - tau).norm() / n);
            orth = orth.max(s.tangent.dot(s.normal).abs() / (n * n));
            trace = trace.max(s.normal.trace().abs() / n);
        }
        pass &= recon <= MOREAU_TOL && orth <= MOREAU_TOL && trace <= MOREAU_TOL;
        parts.push(format!(
            "{name}: recon {recon:.1e} orth {orth:.1e} tr {trace:.1e}"
        ));
    }
    outcome(
        pass,
        format!("{} samples each; {}", MOREAU_SAMPLES, parts.join("; ")),
    )
}

fn criterion_2_oracle(rng: &mut ChaCha8Rng) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut kkt: BTreeMap<KktBranch, usize> = BTreeMap::new();
    let branches = [
        Branch::One,
        Branch::Two,
        Branch::TrescaSmooth,
        Branch::TrescaDegenerateM1,
        Branch::TrescaDegenerateM3,
    ];
    for expected in branches {
        let mut worst = 0.0_f64;
        for _ in 0..ORACLE_SAMPLES {
            let k = rng.gen_range(0.5..=2.0);
            let (domain, sigma) = match expected {
                Branch::One => (
                    YieldDomain::von_mises(k).unwrap(),
                    von_mises_surface(rng, k),
                ),
                Branch::Two => two_function_instance(rng, k),
                Branch::TrescaSmooth => (
                    YieldDomain::tresca(k).unwrap(),
                    tresca_smooth_surface(rng, k, 1e-2),
                ),
                Branch::TrescaDegenerateM1 => (
                    YieldDomain::tresca(k).unwrap(),
                    tresca_degenerate_surface(rng, k, 1),
                ),
                _ => (
                    YieldDomain::tresca(k).unwrap(),
                    tresca_degenerate_surface(rng, k, 3),
                ),
            };
            let tau = random_tensor(rng, 1.0);
            let p = match project(&domain, sigma, tau) {
                Ok(p) => p,
                Err(e) => {
                    return outcome(
                        false,
                        format!("{}: projection failed: {e}", expected.as_str()),
                    )
                }
            };
            if p.branch != expected {
                return outcome(
                    false,
                    format!(
                        "expected branch {}, got {}",
                        expected.as_str(),
                        p.branch.as_str()
                    ),
                );
            }
            let reference = match oracle_normal_projection(&domain, sigma, tau) {
                Ok(r) => r,
                Err(e) => {
                    return outcome(false, format!("{}: oracle failed: {e}", expected.as_str()))
                }
            };
            worst = worst.max((p.split.normal - reference).max_abs());
            if matches!(
                expected,
                Branch::TrescaDegenerateM1 | Branch::TrescaDegenerateM3
            ) {
                let b = tresca_degenerate_kkt_branch(sigma, tau, domain.eig_tol()).unwrap();
                *kkt.entry(b).or_default() += 1;
            }
        }
        pass &= worst <= ORACLE_TOL;
        parts.push(format!("{} {worst:.1e}", expected.as_str()));
    }
    let all = [
        KktBranch::Interior,
        KktBranch::Zero,
        KktBranch::FirstOnly,
        KktBranch::SecondOnly,
    ];
    let coverage: Vec<String> = all
        .iter()
        .map(|b| format!("{b:?}={}", kkt.get(b).copied().unwrap_or(0)))
        .collect();
    pass &= all
        .iter()
        .all(|b| kkt.get(b).copied().unwrap_or(0) >= KKT_MIN_HITS);
    outcome(
        pass,
        format!(
            "max |closed - oracle| per branch: {}; KKT hits: {}",
            parts.join(", "),
            coverage.join(" ")
        ),
    )
}

fn basis_directions() -> [SymTensor3; 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        SymTensor3::diag(1.0, 0.0, 0.0),
        SymTensor3::diag(0.0, 1.0, 0.0),
        SymTensor3::diag(0.0, 0.0, 1.0),
        SymTensor3::new(0.0, 0.0, 0.0, r, 0.0, 0.0),
        SymTensor3::new(0.0, 0.0, 0.0, 0.0, r, 0.0),
        SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.0, r),
    ]
}

fn fd_relative_error(f: impl Fn(SymTensor3) -> f64, grad: SymTensor3, at: SymTensor3) -> f64 {
    let (mut diff, mut norm) = (0.0, 0.0);
    for e in basis_directions() {
        let fd = (f(at + e * GRAD_H) - f(at - e * GRAD_H)) / (2.0 * GRAD_H);
        let an = grad.dot(e);
        diff += (fd - an) * (fd - an);
        norm += an * an;
    }
    (diff / norm).sqrt()
}

fn criterion_3_gradients(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut e2, mut e3, mut et, mut norm_dev) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut accepted = 0;
    while accepted < GRAD_SAMPLES {
        let s = random_tensor(rng, 1.0);
        let ev = spectral(s).eigenvalues;
        if ev[0] - ev[1] < GRAD_MIN_GAP || ev[1] - ev[2] < GRAD_MIN_GAP {
            continue;
        }
        accepted += 1;
        e2 = e2.max(fd_relative_error(j2, grad_j2(s), s));
        e3 = e3.max(fd_relative_error(j3, grad_j3(s), s));
        let gt = match tresca_gradient(s, 1e-8) {
            Ok(g) => g,
            Err(e) => return outcome(false, format!("tresca gradient failed: {e}")),
        };
        et = et.max(fd_relative_error(tresca_value, gt, s));
        norm_dev = norm_dev.max((gt.norm_squared() - 0.5).abs());
    }
    let pass = e2 <= GRAD_REL_TOL
        && e3 <= GRAD_REL_TOL
        && et <= GRAD_REL_TOL
        && norm_dev <= TRESCA_GRAD_NORM_TOL;
    outcome(
        pass,
        format!(
            "{GRAD_SAMPLES} points; rel err J2 {e2:.1e} J3 {e3:.1e} Tresca {et:.1e}; max ||grad f_T|^2 - 1/2| {norm_dev:.1e}"
        ),
    )
}

fn criterion_4_identities(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut cross, mut closed, mut consistency) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..IDENTITY_STATES {
        let moduli =
            ElasticModuli::from_lame(rng.gen_range(0.5..=3.0), rng.gen_range(0.5..=3.0), 1.0)
                .unwrap();
        let k = rng.gen_range(0.5..=2.0);
        let (domain, sigma) = match i % 4 {
            0 => (
                YieldDomain::von_mises(k).unwrap(),
                von_mises_surface(rng, k),
            ),
            1 => (
                YieldDomain::tresca(k).unwrap(),
                tresca_smooth_surface(rng, k, 1e-2),
            ),
            2 => {
                let m = if rng.gen_bool(0.5) { 1 } else { 3 };
                (
                    YieldDomain::tresca(k).unwrap(),
                    tresca_degenerate_surface(rng, k, m),
                )
            }
            _ => two_function_instance(rng, k),
        };
        let rate = random_tensor(rng, 1.0);
        let (h, split, tangent_form) = match (
            script_h(&domain, &moduli, sigma, rate),
            rate_split(&domain, &moduli, sigma, rate),
            stress_rate_tangent_form(&domain, &moduli, sigma, rate),
        ) {
            (Ok(h), Ok(s), Ok(t)) => (h, s, t),
            _ => return outcome(false, format!("state {i}: constitutive evaluation failed")),
        };
        let scale = moduli.hooke(rate).norm().max(1.0);
        cross = cross.max((tangent_form - h).norm() / scale);
        if i % 4 == 0 {
            closed = closed.max((von_mises_script_h(&moduli, k, sigma, rate) - h).norm() / scale);
        }
        let denom = rate.norm() * split.sigma_rate.norm();
        if denom > 0.0 {
            consistency = consistency.max(split.consistency().abs() / denom);
        }
    }
    let pass = cross <= IDENTITY_TOL && closed <= IDENTITY_TOL && consistency <= CONSISTENCY_TOL;
    outcome(
        pass,
        format!(
            "{IDENTITY_STATES} states; P_T(H) vs H - 2mu P_N {cross:.1e}; Von Mises closed form {closed:.1e}; consistency {consistency:.1e}"
        ),
    )
}

fn shear_ramp(dt: f64) -> conelaw::Result<(f64, f64)> {
    let domain = YieldDomain::von_mises(1.0)?;
    let moduli = ElasticModuli::from_lame(1.0, 1.0, 1.0)?;
    let path = StrainPath::constant(SymTensor3::new(0.0, 0.0, 0.0, 0.1, 0.0, 0.0), 10.0)?;
    let traj = integrate_path(
        &domain,
        &moduli,
        MaterialState::default(),
        &path,
        &DriverConfig::new(dt, DriftPolicy::RadialReturn),
    )?;
    Ok((
        traj.final_state().sigma.s12,
        traj.peak_trial_violation().max(0.0),
    ))
}

fn criterion_5_plateau() -> Outcome {
    let (coarse, fine) = match (shear_ramp(1e-4), shear_ramp(5e-5)) {
        (Ok(c), Ok(f)) => (c, f),
        (Err(e), _) | (_, Err(e)) => return outcome(false, format!("driver failed: {e}")),
    };
    let (s12, over_coarse) = coarse;
    let over_fine = fine.1;
    let in_band = (1.0 - PLATEAU_LOW..=1.0 + PLATEAU_HIGH).contains(&s12);
    let ratio = over_coarse / over_fine;
    let converges = ratio.is_finite() && (ratio - CONVERGENCE_RATIO).abs() <= CONVERGENCE_RATIO_TOL;
    outcome(
        in_band && converges,
        format!(
            "final s12 {s12:.12} (band {}); overshoot dt=1e-4 {over_coarse:.3e}, dt=5e-5 {over_fine:.3e}, ratio {ratio:.3} ({})",
            if in_band { "ok" } else { "miss" },
            if converges { "ok" } else { "miss" },
        ),
    )
}

fn bar(n_cells: usize, k: f64, velocity: f64) -> WaveScenario {
    let moduli = ElasticModuli::from_lame(1.0, 1.0, 1.0).unwrap();
    let dx = 1.0 / n_cells as f64;
    WaveScenario {
        n_cells,
        length: 1.0,
        dt: 0.5 * dx / moduli.p_wave_speed(),
        moduli,
        domain: YieldDomain::von_mises(k).unwrap(),
        boundaries: Boundaries {
            left: BoundaryCondition::Velocity(TimeProgram::constant(velocity)),
            right: BoundaryCondition::Free,
        },
        body_force: TimeProgram::zero(),
        t_end: 0.0,
        output_stride: usize::MAX,
        drift: DriftPolicy::RadialReturn,
        drift_tol: 1e-9,
        probes: vec![n_cells / 2],
        front_threshold: 0.5 * velocity.abs(),
    }
}

fn criterion_6_wave() -> Outcome {
    let mut elastic = bar(WAVE_CELLS, 1e9, 1e-3);
    let c = elastic.moduli.p_wave_speed();
    elastic.t_end = 0.75 / c;
    let rec = match run(&elastic) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("elastic run failed: {e}")),
    };
    let Some(arrival) = rec.arrivals[0] else {
        return outcome(false, "front never reached mid-bar");
    };
    let speed = 0.5 / arrival;
    let speed_err = (speed - c).abs() / c;

    let mut plastic = bar(400, 2e-3, -1e-2);
    plastic.t_end = 0.75 / c;
    let rec = match run(&plastic) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("plastic run failed: {e}")),
    };
    let plastic_cells = rec
        .final_grid
        .cells
        .iter()
        .filter(|c| c.eps_p != SymTensor3::ZERO)
        .count();
    let violation = rec.max_violation.max(0.0);
    let min_diss = rec.min_dissipation();
    let pass = speed_err <= WAVE_SPEED_TOL
        && violation <= WAVE_VIOLATION_TOL
        && min_diss >= DISSIPATION_FLOOR
        && plastic_cells > 0;
    outcome(
        pass,
        format!(
            "front speed {speed:.5} vs {c:.5} (rel err {speed_err:.2e}); plastic run: {plastic_cells} yielded cells, max violation {violation:.1e}, min step dissipation {min_diss:.1e}"
        ),
    )
}

fn criterion_7_hydrostatic(rng: &mut ChaCha8Rng) -> Outcome {
    let moduli = ElasticModuli::from_lame(1.0, 1.0, 1.0).unwrap();
    let path = StrainPath::new(
        vec![
            (0.0, SymTensor3::new(0.05, -0.02, 0.0, 0.1, 0.0, 0.03)),
            (4.0, SymTensor3::new(-0.1, 0.08, 0.02, 0.0, 0.06, -0.04)),
            (8.0, SymTensor3::new(0.0, 0.0, -0.07, -0.1, 0.02, 0.05)),
            (12.0, SymTensor3::ZERO),
        ],
        Interpolation::PiecewiseConstant,
    )
    .unwrap();
    let config = DriverConfig::new(1e-3, DriftPolicy::RadialReturn);
    let mut worst = 0.0_f64;
    let mut plastic_steps = 0;
    for domain in [
        YieldDomain::von_mises(1.0).unwrap(),
        YieldDomain::tresca(1.0).unwrap(),
    ] {
        let base = match integrate_path(&domain, &moduli, MaterialState::default(), &path, &config)
        {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("base run failed: {e}")),
        };
        plastic_steps += base
            .steps
            .iter()
            .filter(|s| s.split.eps_p_rate != SymTensor3::ZERO)
            .count();
        for _ in 0..3 {
            let p = rng.gen_range(-10.0..=10.0);
            let shift = SymTensor3::hydrostatic(p);
            let initial = MaterialState::from_stress(&moduli, shift, 0.0);
            let shifted = match integrate_path(&domain, &moduli, initial, &path, &config) {
                Ok(t) => t,
                Err(e) => return outcome(false, format!("shifted run failed: {e}")),
            };
            let mut prev = base.initial.sigma;
            for (n, (a, b)) in base.steps.iter().zip(&shifted.steps).enumerate() {
                worst = worst.max((a.split.eps_p_rate - b.split.eps_p_rate).max_abs());
                // Pointwise: same rate at the shifted stress of the base run.
                let rate = path.rate_at(base.initial.t + n as f64 * config.dt);
                let direct = rate_split(&domain, &moduli, prev + shift, rate);
                match direct {
                    Ok(d) => worst = worst.max((a.split.eps_p_rate - d.eps_p_rate).max_abs()),
                    Err(e) => return outcome(false, format!("pointwise split failed: {e}")),
                }
                prev = a.state.sigma;
            }
        }
    }
    outcome(
        worst <= SHIFT_TOL && plastic_steps > 0,
        format!("{plastic_steps} plastic steps; max |eps_p_rate difference| {worst:.1e}"),
    )
}

type Criterion = Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome>;

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("moreau decomposition", Box::new(criterion_1_moreau)),
        ("oracle equivalence", Box::new(criterion_2_oracle)),
        ("gradient checks", Box::new(criterion_3_gradients)),
        ("constitutive identities", Box::new(criterion_4_identities)),
        ("driver plateau", Box::new(|_| criterion_5_plateau())),
        ("wave speeds", Box::new(|_| criterion_6_wave())),
        ("hydrostatic invariance", Box::new(criterion_7_hydrostatic)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = check(&mut rng);
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {} {:<24} {}  ({secs:.1}s) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
