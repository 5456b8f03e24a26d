//! Velocity-stress wave propagation in a 1-D bar under uniaxial strain.
//!
//! Staggered leapfrog: node velocities live at half steps, cell stresses at
//! whole steps. Each step first updates velocities from the stress divergence,
//! then advances every cell stress with the constitutive operator driven by
//! `ε̇ = (∂v/∂x) e1 ⊗ e1`.

use crate::constitutive::{advance, DriftPolicy, DriverConfig, MaterialState};
use crate::elasticity::ElasticModuli;
use crate::error::{Error, Result};
use crate::tensor::SymTensor3;
use crate::yield_surface::YieldDomain;

pub const MAX_CFL: f64 = 0.9;

/// Piecewise-constant scalar program: value `v_i` on `[t_i, t_{i+1})`, zero
/// before the first knot.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeProgram {
    knots: Vec<(f64, f64)>,
}

impl TimeProgram {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots
            .windows(2)
            .any(|w| w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::invalid(
                "program",
                "times must be strictly increasing",
            ));
        }
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::invalid("program", "times and values must be finite"));
        }
        Ok(Self { knots })
    }

    pub fn zero() -> Self {
        Self { knots: Vec::new() }
    }

    /// Value `v` from `t = 0` on.
    pub fn constant(v: f64) -> Self {
        Self {
            knots: vec![(0.0, v)],
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.knots.partition_point(|(ti, _)| *ti <= t) {
            0 => 0.0,
            i => self.knots[i - 1].1,
        }
    }

    /// Time after which the program no longer changes.
    /// Largest magnitude the program takes.
    pub fn peak(&self) -> f64 {
        self.knots.iter().fold(0.0, |m, k| m.max(k.1.abs()))
    }

    pub fn last_change(&self) -> f64 {
        self.knots.last().map_or(f64::NEG_INFINITY, |k| k.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryCondition {
    /// Prescribed axial velocity.
    Velocity(TimeProgram),
    /// Prescribed axial stress `σ11` at the end.
    Traction(TimeProgram),
    /// Zero traction.
    Free,
}

impl BoundaryCondition {
    fn stress(&self, t: f64) -> Option<f64> {
        match self {
            BoundaryCondition::Velocity(_) => None,
            BoundaryCondition::Traction(p) => Some(p.value(t)),
            BoundaryCondition::Free => Some(0.0),
        }
    }

    fn last_change(&self) -> f64 {
        match self {
            BoundaryCondition::Velocity(p) | BoundaryCondition::Traction(p) => p.last_change(),
            BoundaryCondition::Free => f64::NEG_INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Boundaries {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

/// Bar state: `n_cells` stress cells and `n_cells + 1` nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    pub dx: f64,
    pub cells: Vec<MaterialState>,
    /// Axial node velocities at the latest half step.
    pub velocity: Vec<f64>,
    pub t: f64,
}

impl Grid1D {
    pub fn new(n_cells: usize, length: f64) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::invalid("n_cells", "must be at least 1"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("length", "must be positive and finite"));
        }
        Ok(Self {
            dx: length / n_cells as f64,
            cells: vec![MaterialState::default(); n_cells],
            velocity: vec![0.0; n_cells + 1],
            t: 0.0,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn node_x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn cell_x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    /// Largest stable step for the given CFL number.
    pub fn stable_dt(&self, moduli: &ElasticModuli, cfl: f64) -> f64 {
        cfl * self.dx / moduli.p_wave_speed()
    }

    pub fn check_cfl(&self, moduli: &ElasticModuli, dt: f64) -> Result<()> {
        let limit = self.stable_dt(moduli, MAX_CFL);
        if dt.is_nan() || dt <= 0.0 || dt > limit {
            return Err(Error::CflViolation { dt, limit });
        }
        Ok(())
    }

    /// Elastic strain energy of the cells, `½ Σ σ : H⁻¹σ dx`.
    pub fn strain_energy(&self, moduli: &ElasticModuli) -> f64 {
        0.5 * self.dx
            * self
                .cells
                .iter()
                .map(|c| c.sigma.dot(moduli.hooke_inverse(c.sigma)))
                .sum::<f64>()
    }

    fn node_mass(&self, moduli: &ElasticModuli, i: usize) -> f64 {
        let full = moduli.density() * self.dx;
        if i == 0 || i == self.cells.len() {
            0.5 * full
        } else {
            full
        }
    }

    /// Advances by one step; the grid is left untouched on error.
    pub fn step(
        &mut self,
        moduli: &ElasticModuli,
        domain: &YieldDomain,
        boundaries: &Boundaries,
        body_force: &TimeProgram,
        config: &DriverConfig,
    ) -> Result<StepReport> {
        let dt = config.dt;
        self.check_cfl(moduli, dt)?;
        let n = self.cells.len();
        let rho = moduli.density();
        let t_half = self.t + 0.5 * dt;
        let h = body_force.value(self.t);
        let s11 = |i: usize| self.cells[i].sigma.s11;

        let old = &self.velocity;
        let mut vel = old.clone();
        for (i, v) in vel.iter_mut().enumerate().take(n).skip(1) {
            *v += dt * ((s11(i) - s11(i - 1)) / (rho * self.dx) + h / rho);
        }
        let half_mass = 0.5 * rho * self.dx;
        vel[0] = match (&boundaries.left, boundaries.left.stress(self.t)) {
            (BoundaryCondition::Velocity(p), _) => p.value(t_half),
            (_, Some(s)) => old[0] + dt * ((s11(0) - s) / half_mass + h / rho),
            _ => unreachable!(),
        };
        vel[n] = match (&boundaries.right, boundaries.right.stress(self.t)) {
            (BoundaryCondition::Velocity(p), _) => p.value(t_half),
            (_, Some(s)) => old[n] + dt * ((s - s11(n - 1)) / half_mass + h / rho),
            _ => unreachable!(),
        };

        let kinetic = 0.5
            * (0..=n)
                .map(|i| self.node_mass(moduli, i) * old[i] * vel[i])
                .sum::<f64>();
        let energy = kinetic + self.strain_energy(moduli);

        let mut cells = Vec::with_capacity(n);
        let mut dissipation = 0.0;
        let mut max_violation = f64::NEG_INFINITY;
        let mut max_trial_violation = f64::NEG_INFINITY;
        let mut plastic_cells = 0;
        for (i, cell) in self.cells.iter().enumerate() {
            let rate = SymTensor3::new((vel[i + 1] - vel[i]) / self.dx, 0.0, 0.0, 0.0, 0.0, 0.0);
            let (next, split, _, trial) = advance(domain, moduli, cell, rate, config)?;
            let work = split.eps_p_rate.dot(cell.sigma);
            if split.eps_p_rate != SymTensor3::ZERO {
                plastic_cells += 1;
            }
            dissipation += work * dt * self.dx;
            max_trial_violation = max_trial_violation.max(trial);
            max_violation = max_violation.max(domain.membership(next.sigma));
            cells.push(next);
        }
        if max_violation > config.hard_limit() {
            return Err(Error::IntegrationFailure {
                step: 0,
                reason: format!(
                    "membership {max_violation:e} exceeds hard limit {:e}",
                    config.hard_limit()
                ),
            });
        }

        self.cells = cells;
        self.velocity = vel;
        self.t += dt;
        Ok(StepReport {
            energy,
            dissipation,
            max_violation,
            max_trial_violation,
            plastic_cells,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    /// Discrete energy at the start of the step, with the kinetic part in
    /// product form `½ Σ m v^{n-1/2} v^{n+1/2}`.
    pub energy: f64,
    /// `Σ_cells ε̇p : σ dt dx`.
    pub dissipation: f64,
    /// Largest membership after drift correction.
    pub max_violation: f64,
    pub max_trial_violation: f64,
    pub plastic_cells: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveScenario {
    pub n_cells: usize,
    pub length: f64,
    pub moduli: ElasticModuli,
    pub domain: YieldDomain,
    pub boundaries: Boundaries,
    pub body_force: TimeProgram,
    pub dt: f64,
    pub t_end: f64,
    pub output_stride: usize,
    pub drift: DriftPolicy,
    pub drift_tol: f64,
    /// Node indices at which front arrival is detected.
    pub probes: Vec<usize>,
    /// `|v|` level marking the front.
    pub front_threshold: f64,
}

impl WaveScenario {
    pub fn config(&self) -> DriverConfig {
        DriverConfig {
            dt: self.dt,
            drift: self.drift,
            drift_tol: self.drift_tol,
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Time after which boundaries and body force are constant.
    pub fn forcing_end(&self) -> f64 {
        self.boundaries
            .left
            .last_change()
            .max(self.boundaries.right.last_change())
            .max(self.body_force.last_change())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    /// Node velocities, half a step behind `t`.
    pub velocity: Vec<f64>,
    pub sigma: Vec<SymTensor3>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveRecord {
    pub dx: f64,
    pub snapshots: Vec<Snapshot>,
    /// `(t, E)` with `E` evaluated at the start of each step.
    pub energy: Vec<(f64, f64)>,
    pub dissipation: Vec<f64>,
    /// First time each probe exceeded the front threshold, linearly
    /// interpolated between half steps.
    pub arrivals: Vec<Option<f64>>,
    pub max_violation: f64,
    pub max_trial_violation: f64,
    pub final_grid: Grid1D,
}

impl WaveRecord {
    pub fn min_dissipation(&self) -> f64 {
        self.dissipation
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn snapshot(grid: &Grid1D) -> Snapshot {
    Snapshot {
        t: grid.t,
        velocity: grid.velocity.clone(),
        sigma: grid.cells.iter().map(|c| c.sigma).collect(),
    }
}

pub fn run(scenario: &WaveScenario) -> Result<WaveRecord> {
    let mut grid = Grid1D::new(scenario.n_cells, scenario.length)?;
    run_from(scenario, &mut grid)
}

/// Runs `scenario` starting from an arbitrary grid state.
pub fn run_from(scenario: &WaveScenario, grid: &mut Grid1D) -> Result<WaveRecord> {
    if scenario.output_stride == 0 {
        return Err(Error::invalid("output_stride", "must be at least 1"));
    }
    if !(scenario.t_end >= 0.0 && scenario.t_end.is_finite()) {
        return Err(Error::invalid("t_end", "must be non-negative and finite"));
    }
    if let Some(&p) = scenario.probes.iter().find(|&&p| p > grid.n_cells()) {
        return Err(Error::invalid(
            "probes",
            format!("node {p} is outside the grid"),
        ));
    }
    grid.check_cfl(&scenario.moduli, scenario.dt)?;
    let config = scenario.config();
    let n_steps = scenario.n_steps();

    let mut record = WaveRecord {
        dx: grid.dx,
        snapshots: vec![snapshot(grid)],
        energy: Vec::with_capacity(n_steps),
        dissipation: Vec::with_capacity(n_steps),
        arrivals: vec![None; scenario.probes.len()],
        max_violation: grid
            .cells
            .iter()
            .map(|c| scenario.domain.membership(c.sigma))
            .fold(f64::NEG_INFINITY, f64::max),
        max_trial_violation: f64::NEG_INFINITY,
        final_grid: grid.clone(),
    };
    for step in 0..n_steps {
        let t = grid.t;
        let before: Vec<f64> = scenario
            .probes
            .iter()
            .map(|&p| grid.velocity[p].abs())
            .collect();
        let report = grid
            .step(
                &scenario.moduli,
                &scenario.domain,
                &scenario.boundaries,
                &scenario.body_force,
                &config,
            )
            .map_err(|e| match e {
                Error::IntegrationFailure { reason, .. } => {
                    Error::IntegrationFailure { step, reason }
                }
                Error::MembershipViolation { violation } => Error::IntegrationFailure {
                    step,
                    reason: format!("stress drifted {violation:e} outside the yield domain"),
                },
                other => other,
            })?;
        for (k, &p) in scenario.probes.iter().enumerate() {
            let now = grid.velocity[p].abs();
            if record.arrivals[k].is_none() && now >= scenario.front_threshold {
                // v^{n-1/2} and v^{n+1/2} bracket the crossing.
                let frac = if now > before[k] {
                    ((scenario.front_threshold - before[k]) / (now - before[k])).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                record.arrivals[k] = Some(t - 0.5 * scenario.dt + frac * scenario.dt);
            }
        }
        record.energy.push((t, report.energy));
        record.dissipation.push(report.dissipation);
        record.max_violation = record.max_violation.max(report.max_violation);
        record.max_trial_violation = record.max_trial_violation.max(report.max_trial_violation);
        if (step + 1) % scenario.output_stride == 0 {
            record.snapshots.push(snapshot(grid));
        }
    }
    record.final_grid = grid.clone();
    Ok(record)
}
