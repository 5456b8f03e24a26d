//! Seeded randomized invariant suite behind `conelaw check`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use conelaw::cone::{tresca_degenerate_kkt_branch, KktBranch};
use conelaw::constitutive::{rate_split, script_h, stress_rate_tangent_form, von_mises_script_h};
use conelaw::oracle::oracle_normal_projection;
use conelaw::sampling::{
    inside, random_tensor, tresca_degenerate_surface, tresca_smooth_surface, two_function_instance,
    von_mises_surface,
};
use conelaw::tensor::{grad_j2, grad_j3, j2, j3, spectral};
use conelaw::yield_surface::{tresca_gradient, tresca_value};
use conelaw::{project, Branch, ElasticModuli, SymTensor3, YieldDomain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

pub struct Row {
    pub suite: String,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
    /// `true` when `worst` must reach at least `tolerance` (coverage counts).
    pub at_least: bool,
}

impl Row {
    pub fn pass(&self) -> bool {
        if self.at_least {
            self.worst >= self.tolerance
        } else {
            self.worst <= self.tolerance
        }
    }
}

#[derive(Clone, Copy)]
enum Family {
    VonMises,
    TrescaSmooth,
    TrescaM1,
    TrescaM3,
    TwoFunction,
}

impl Family {
    const ALL: [Family; 5] = [
        Family::VonMises,
        Family::TrescaSmooth,
        Family::TrescaM1,
        Family::TrescaM3,
        Family::TwoFunction,
    ];

    fn branch(self) -> Branch {
        match self {
            Family::VonMises => Branch::One,
            Family::TrescaSmooth => Branch::TrescaSmooth,
            Family::TrescaM1 => Branch::TrescaDegenerateM1,
            Family::TrescaM3 => Branch::TrescaDegenerateM3,
            Family::TwoFunction => Branch::Two,
        }
    }

    fn sample(self, rng: &mut ChaCha8Rng, k: f64) -> (YieldDomain, SymTensor3) {
        match self {
            Family::VonMises => (
                YieldDomain::von_mises(k).unwrap(),
                von_mises_surface(rng, k),
            ),
            Family::TrescaSmooth => (
                YieldDomain::tresca(k).unwrap(),
                tresca_smooth_surface(rng, k, 1e-3 * k),
            ),
            Family::TrescaM1 => (
                YieldDomain::tresca(k).unwrap(),
                tresca_degenerate_surface(rng, k, 1),
            ),
            Family::TrescaM3 => (
                YieldDomain::tresca(k).unwrap(),
                tresca_degenerate_surface(rng, k, 3),
            ),
            Family::TwoFunction => two_function_instance(rng, k),
        }
    }
}

struct Table {
    rows: Vec<Row>,
    tol_scale: f64,
}

impl Table {
    fn at_most(&mut self, suite: impl Into<String>, samples: usize, worst: f64, tolerance: f64) {
        self.rows.push(Row {
            suite: suite.into(),
            samples,
            worst,
            tolerance: tolerance * self.tol_scale,
            at_least: false,
        });
    }
}

fn fd_error(f: fn(SymTensor3) -> f64, grad: SymTensor3, at: SymTensor3) -> f64 {
    const H: f64 = 1e-5;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let dirs = [
        SymTensor3::diag(1.0, 0.0, 0.0),
        SymTensor3::diag(0.0, 1.0, 0.0),
        SymTensor3::diag(0.0, 0.0, 1.0),
        SymTensor3::new(0.0, 0.0, 0.0, r, 0.0, 0.0),
        SymTensor3::new(0.0, 0.0, 0.0, 0.0, r, 0.0),
        SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.0, r),
    ];
    let (mut diff, mut norm) = (0.0, 0.0);
    for e in dirs {
        let fd = (f(at + e * H) - f(at - e * H)) / (2.0 * H);
        let an = grad.dot(e);
        diff += (fd - an) * (fd - an);
        norm += an * an;
    }
    (diff / norm).sqrt()
}

pub fn run_suite(seed: u64, samples: usize, tol_scale: f64) -> Vec<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Table {
        rows: Vec::new(),
        tol_scale,
    };
    let tenth = (samples / 10).max(1);
    let hundredth = (samples / 100).max(1);

    // Moreau decomposition, relative to |τ| and |τ|².
    for (name, families) in [
        ("von_mises", &[Family::VonMises][..]),
        ("tresca_smooth", &[Family::TrescaSmooth][..]),
        (
            "tresca_degenerate",
            &[Family::TrescaM1, Family::TrescaM3][..],
        ),
    ] {
        let mut worst = 0.0_f64;
        for i in 0..samples {
            let k = rng.gen_range(0.1..=10.0);
            let (domain, sigma) = families[i % families.len()].sample(&mut rng, k);
            let scale = rng.gen_range(0.01..=100.0);
            let tau = random_tensor(&mut rng, scale);
            let n = tau.norm();
            let s = match project(&domain, sigma, tau) {
                Ok(p) => p.split,
                Err(_) => {
                    worst = f64::INFINITY;
                    continue;
                }
            };
            worst = worst
                .max((s.tangent + s.normal - tau).norm() / n)
                .max(s.tangent.dot(s.normal).abs() / (n * n))
                .max(s.normal.trace().abs() / n);
        }
        table.at_most(format!("moreau/{name}"), samples, worst, 1e-10);
    }

    // Closed forms against the numerical oracle.
    let mut kkt: BTreeMap<KktBranch, usize> = BTreeMap::new();
    for family in Family::ALL {
        let branch = family.branch();
        let mut worst = 0.0_f64;
        for _ in 0..tenth {
            let k = rng.gen_range(0.5..=2.0);
            let (domain, sigma) = family.sample(&mut rng, k);
            let tau = random_tensor(&mut rng, 1.0);
            let err = match (
                project(&domain, sigma, tau),
                oracle_normal_projection(&domain, sigma, tau),
            ) {
                (Ok(p), Ok(r)) if p.branch == branch => (p.split.normal - r).max_abs(),
                _ => f64::INFINITY,
            };
            worst = worst.max(err);
            if matches!(family, Family::TrescaM1 | Family::TrescaM3) {
                if let Ok(b) = tresca_degenerate_kkt_branch(sigma, tau, domain.eig_tol()) {
                    *kkt.entry(b).or_default() += 1;
                }
            }
        }
        table.at_most(format!("oracle/{}", branch.as_str()), tenth, worst, 1e-6);
    }
    let required = (50 * tenth).div_ceil(1000).min(50) as f64;
    for b in [
        KktBranch::Interior,
        KktBranch::Zero,
        KktBranch::FirstOnly,
        KktBranch::SecondOnly,
    ] {
        table.rows.push(Row {
            suite: format!("kkt_coverage/{b:?}"),
            samples: 2 * tenth,
            worst: kkt.get(&b).copied().unwrap_or(0) as f64,
            tolerance: required,
            at_least: true,
        });
    }

    // Gradients against central differences, eigenvalue gaps ≥ 1e-2.
    let (mut e2, mut e3, mut et, mut norm_dev) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut accepted = 0;
    while accepted < tenth {
        let s = random_tensor(&mut rng, 1.0);
        let ev = spectral(s).eigenvalues;
        if ev[0] - ev[1] < 1e-2 || ev[1] - ev[2] < 1e-2 {
            continue;
        }
        accepted += 1;
        e2 = e2.max(fd_error(j2, grad_j2(s), s));
        e3 = e3.max(fd_error(j3, grad_j3(s), s));
        match tresca_gradient(s, 1e-8) {
            Ok(g) => {
                et = et.max(fd_error(tresca_value, g, s));
                norm_dev = norm_dev.max((g.norm_squared() - 0.5).abs());
            }
            Err(_) => et = f64::INFINITY,
        }
    }
    table.at_most("gradient/j2", tenth, e2, 1e-6);
    table.at_most("gradient/j3", tenth, e3, 1e-6);
    table.at_most("gradient/tresca", tenth, et, 1e-6);
    table.at_most("gradient/tresca_norm", tenth, norm_dev, 1e-12);

    // Rate split invariants and hydrostatic invariance over saturated states.
    let (mut add, mut orth, mut pyth, mut trace, mut cons, mut hydro) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..tenth {
        let family = Family::ALL[i % Family::ALL.len()];
        let k = rng.gen_range(0.5..=2.0);
        let (domain, sigma) = family.sample(&mut rng, k);
        let moduli =
            ElasticModuli::from_lame(rng.gen_range(0.5..=3.0), rng.gen_range(0.5..=3.0), 1.0)
                .unwrap();
        let rate = random_tensor(&mut rng, 1.0);
        let n2 = rate.norm_squared();
        let Ok(s) = rate_split(&domain, &moduli, sigma, rate) else {
            add = f64::INFINITY;
            continue;
        };
        add = add.max((s.eps_e_rate + s.eps_p_rate - rate).norm() / rate.norm());
        orth = orth.max(s.eps_e_rate.dot(s.eps_p_rate).max(0.0) / n2);
        pyth =
            pyth.max((s.eps_e_rate.norm_squared() + s.eps_p_rate.norm_squared() - n2).abs() / n2);
        trace = trace.max(s.eps_p_rate.trace().max(0.0) / rate.norm());
        let denom = rate.norm() * s.sigma_rate.norm();
        if denom > 0.0 {
            cons = cons.max(s.consistency().max(0.0) / denom);
        }
        let (alpha, beta) = (rng.gen_range(0.1..=10.0), rng.gen_range(-10.0..=10.0));
        match project(&domain, sigma, rate * alpha + SymTensor3::hydrostatic(beta)) {
            Ok(p) => hydro = hydro.max((p.split.normal - s.eps_p_rate * alpha).max_abs() / alpha),
            Err(_) => hydro = f64::INFINITY,
        }
    }
    table.at_most("rate_split/additivity", tenth, add, 1e-12);
    table.at_most("rate_split/orthogonality", tenth, orth, 1e-10);
    table.at_most("rate_split/pythagoras", tenth, pyth, 1e-10);
    table.at_most("rate_split/plastic_trace", tenth, trace, 1e-10);
    table.at_most("rate_split/consistency", tenth, cons, 1e-8);
    table.at_most("normal/hydrostatic_invariance", tenth, hydro, 1e-10);

    // Stress-rate identities and maximum work.
    let (mut cross, mut closed, mut work) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..hundredth {
        let family = Family::ALL[i % Family::ALL.len()];
        let k = rng.gen_range(0.5..=2.0);
        let (domain, sigma) = family.sample(&mut rng, k);
        let moduli =
            ElasticModuli::from_lame(rng.gen_range(0.5..=3.0), rng.gen_range(0.5..=3.0), 1.0)
                .unwrap();
        let rate = random_tensor(&mut rng, 1.0);
        let scale = moduli.hooke(rate).norm().max(1.0);
        match (
            script_h(&domain, &moduli, sigma, rate),
            stress_rate_tangent_form(&domain, &moduli, sigma, rate),
            rate_split(&domain, &moduli, sigma, rate),
        ) {
            (Ok(h), Ok(t), Ok(s)) => {
                cross = cross.max((h - t).norm() / scale);
                if matches!(family, Family::VonMises) {
                    closed = closed
                        .max((von_mises_script_h(&moduli, k, sigma, rate) - h).norm() / scale);
                }
                let w = s.eps_p_rate.dot(sigma);
                for _ in 0..100 {
                    let other = inside(&mut rng, &domain, 3.0 * k);
                    work = work.max(s.eps_p_rate.dot(other) - w);
                }
            }
            _ => cross = f64::INFINITY,
        }
    }
    table.at_most("stress_rate/tangent_form", hundredth, cross, 1e-10);
    table.at_most(
        "stress_rate/von_mises_closed_form",
        hundredth,
        closed,
        1e-10,
    );
    table.at_most("maximum_work", hundredth * 100, work.max(0.0), 1e-8);
    table.rows
}

pub fn render(rows: &[Row], seed: u64, samples: usize, tol_scale: f64) -> String {
    let mut out = String::new();
    writeln!(out, "# conelaw check").unwrap();
    writeln!(out, "# generator: {GENERATOR}, seed {seed}").unwrap();
    writeln!(out, "# samples: {samples}, tol-scale: {tol_scale}").unwrap();
    writeln!(
        out,
        "{:<36} {:>8} {:>10} {:>10} {:>6}",
        "suite", "samples", "worst", "tolerance", "result"
    )
    .unwrap();
    for r in rows {
        let worst = if r.at_least {
            format!("{}", r.worst)
        } else {
            format!("{:.2e}", r.worst)
        };
        let tol = if r.at_least {
            format!(">={}", r.tolerance)
        } else {
            format!("{:.1e}", r.tolerance)
        };
        writeln!(
            out,
            "{:<36} {:>8} {:>10} {:>10} {:>6}",
            r.suite,
            r.samples,
            worst,
            tol,
            if r.pass() { "pass" } else { "FAIL" }
        )
        .unwrap();
    }
    let passed = rows.iter().filter(|r| r.pass()).count();
    writeln!(out, "# {passed}/{} suites passed", rows.len()).unwrap();
    out
}
