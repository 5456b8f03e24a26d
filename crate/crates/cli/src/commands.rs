use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use conelaw::constitutive::{critical_yield_value, integrate_path, DriverConfig, MaterialState};
use conelaw::wave::{run, Boundaries, BoundaryCondition, TimeProgram, WaveScenario};
use conelaw::{project, SymTensor3};
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::{self, DriveScenario, ProjectScenario, WaveScenarioSpec};

pub struct GlobalOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol_scale: f64,
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn push_tensor(row: &mut String, t: SymTensor3) {
    for x in t.to_array() {
        write!(row, ",{x:e}").unwrap();
    }
}

fn tensor_columns(prefix: &str) -> String {
    ["11", "22", "33", "12", "13", "23"]
        .iter()
        .map(|c| format!("{prefix}{c}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Serialize)]
struct ProjectOutput {
    tangent: SymTensor3,
    normal: SymTensor3,
    branch: &'static str,
}

pub fn cmd_project(path: &Path, opts: &GlobalOptions) -> Result<(), CliError> {
    let sc: ProjectScenario = scenario::load(path)?;
    let domain = sc.criterion_spec().build(opts.tol_scale)?;
    let p = project(
        &domain,
        scenario::sigma_from(sc.sigma),
        scenario::sigma_from(sc.tau),
    )?;
    let out = ProjectOutput {
        tangent: p.split.tangent,
        normal: p.split.normal,
        branch: p.branch.as_str(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("serializable");
    text.push('\n');
    emit(opts.out.as_deref(), &text)
}

fn check_positive(field: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{field}: must be positive and finite, got {x}"
        )))
    }
}

pub fn cmd_drive(path: &Path, opts: &GlobalOptions) -> Result<(), CliError> {
    let sc: DriveScenario = scenario::load(path)?;
    let moduli = sc.moduli.build()?;
    let domain = sc.criterion_spec().build(opts.tol_scale)?;
    let strain_path = sc.path.build()?;
    check_positive("dt", sc.dt)?;
    let mut config = DriverConfig::new(sc.dt, sc.drift.into());
    if let Some(tol) = sc.drift_tol {
        check_positive("drift_tol", tol)?;
        config.drift_tol = tol;
    }
    config.drift_tol *= opts.tol_scale;
    let sigma0 = sc
        .initial_sigma
        .map_or(SymTensor3::ZERO, scenario::sigma_from);
    let initial = MaterialState::from_stress(&moduli, sigma0, strain_path.start());
    let traj = integrate_path(&domain, &moduli, initial, &strain_path, &config)?;

    let mut csv = format!(
        "t,{},{},{},f_value,consistency_residual\n",
        tensor_columns("sigma"),
        tensor_columns("eps_e"),
        tensor_columns("eps_p")
    );
    let mut row = |s: &MaterialState, f: f64, residual: f64| {
        write!(csv, "{:e}", s.t).unwrap();
        push_tensor(&mut csv, s.sigma);
        push_tensor(&mut csv, s.eps_e);
        push_tensor(&mut csv, s.eps_p);
        writeln!(csv, ",{f:e},{residual:e}").unwrap();
    };
    row(
        &traj.initial,
        critical_yield_value(&domain, traj.initial.sigma),
        0.0,
    );
    for step in &traj.steps {
        row(&step.state, step.f_value, step.consistency_residual);
    }
    emit(opts.out.as_deref(), &csv)
}

#[derive(Serialize)]
struct FrontArrival {
    node: usize,
    x: f64,
    t: Option<f64>,
}

#[derive(Serialize)]
struct WaveSummary {
    version: String,
    seed: Option<u64>,
    n_cells: usize,
    dx: f64,
    dt: f64,
    steps: usize,
    front_arrivals: Vec<FrontArrival>,
    max_violation: f64,
    max_trial_violation: f64,
    min_step_dissipation: Option<f64>,
    total_dissipation: f64,
    /// `[t, E]`, every `output_stride` steps.
    energy: Vec<(f64, f64)>,
}

fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

/// Half the largest prescribed boundary speed.
fn default_front_threshold(b: &Boundaries, needed: bool) -> Result<f64, CliError> {
    let speed = |bc: &BoundaryCondition| match bc {
        BoundaryCondition::Velocity(p) => p.peak(),
        _ => 0.0,
    };
    let peak = speed(&b.left).max(speed(&b.right));
    if peak > 0.0 || !needed {
        Ok(0.5 * peak)
    } else {
        Err(CliError::Validation(
            "front_threshold: required when probes are given and no boundary velocity is prescribed".into(),
        ))
    }
}

pub fn cmd_wave(path: &Path, summary: Option<&Path>, opts: &GlobalOptions) -> Result<(), CliError> {
    let sc: WaveScenarioSpec = scenario::load(path)?;
    let moduli = sc.moduli.build()?;
    let domain = sc.criterion_spec().build(opts.tol_scale)?;
    check_positive("dt", sc.dt)?;
    let drift_tol = sc.drift_tol.unwrap_or(1e-9);
    check_positive("drift_tol", drift_tol)?;
    let body_force = TimeProgram::new(sc.forcing.body_force.clone())
        .map_err(|e| CliError::Validation(format!("forcing.{e}")))?;
    let boundaries = sc.bc.build()?;
    let front_threshold = match sc.front_threshold {
        Some(x) => {
            check_positive("front_threshold", x)?;
            x
        }
        None => default_front_threshold(&boundaries, !sc.probes.is_empty())?,
    };
    let scenario = WaveScenario {
        n_cells: sc.grid.n_cells,
        length: sc.grid.length,
        moduli,
        domain,
        boundaries,
        body_force,
        dt: sc.dt,
        t_end: sc.t_end,
        output_stride: sc.output_stride,
        drift: sc.drift.into(),
        drift_tol: drift_tol * opts.tol_scale,
        probes: sc.probes.clone(),
        front_threshold,
    };
    let rec = run(&scenario).map_err(|e| match e {
        conelaw::Error::InvalidParameter { field, reason } => {
            let field = match field {
                "n_cells" | "length" => format!("grid.{field}"),
                other => other.to_string(),
            };
            CliError::Validation(format!("{field}: {reason}"))
        }
        other => other.into(),
    })?;

    let mut csv = format!("t,x,v,{},f_value\n", tensor_columns("sigma"));
    for snap in &rec.snapshots {
        for (i, sigma) in snap.sigma.iter().enumerate() {
            let x = (i as f64 + 0.5) * rec.dx;
            let v = 0.5 * (snap.velocity[i] + snap.velocity[i + 1]);
            write!(csv, "{:e},{x:e},{v:e}", snap.t).unwrap();
            push_tensor(&mut csv, *sigma);
            writeln!(csv, ",{:e}", critical_yield_value(&scenario.domain, *sigma)).unwrap();
        }
    }
    emit(opts.out.as_deref(), &csv)?;

    let summary_doc = WaveSummary {
        version: sc.version.clone(),
        seed: opts.seed.or(sc.seed),
        n_cells: scenario.n_cells,
        dx: rec.dx,
        dt: scenario.dt,
        steps: rec.dissipation.len(),
        front_arrivals: scenario
            .probes
            .iter()
            .zip(&rec.arrivals)
            .map(|(&node, &t)| FrontArrival {
                node,
                x: node as f64 * rec.dx,
                t,
            })
            .collect(),
        max_violation: rec.max_violation.max(0.0),
        max_trial_violation: rec.max_trial_violation.max(rec.max_violation).max(0.0),
        min_step_dissipation: (!rec.dissipation.is_empty()).then(|| rec.min_dissipation()),
        total_dissipation: rec.dissipation.iter().sum(),
        energy: rec
            .energy
            .iter()
            .step_by(scenario.output_stride)
            .copied()
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&summary_doc).expect("serializable");
    text.push('\n');
    let target = summary
        .map(Path::to_path_buf)
        .or_else(|| opts.out.as_deref().map(summary_path));
    match target {
        Some(p) => emit(Some(&p), &text),
        None => Ok(()),
    }
}
