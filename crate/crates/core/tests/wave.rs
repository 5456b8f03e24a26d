use conelaw::constitutive::DriftPolicy;
use conelaw::wave::{
    run, run_from, Boundaries, BoundaryCondition, Grid1D, TimeProgram, WaveScenario,
};
use conelaw::yield_surface::YieldFunction;
use conelaw::{ElasticModuli, YieldDomain};

fn scenario(
    n_cells: usize,
    k: f64,
    cfl: f64,
    left: BoundaryCondition,
    right: BoundaryCondition,
) -> WaveScenario {
    let moduli = ElasticModuli::from_lame(2.0, 1.0, 1.5).unwrap();
    let dx = 1.0 / n_cells as f64;
    WaveScenario {
        n_cells,
        length: 1.0,
        dt: cfl * dx / moduli.p_wave_speed(),
        moduli,
        domain: YieldDomain::von_mises(k).unwrap(),
        boundaries: Boundaries { left, right },
        body_force: TimeProgram::zero(),
        t_end: 0.0,
        output_stride: 10,
        drift: DriftPolicy::RadialReturn,
        drift_tol: 1e-9,
        probes: vec![],
        front_threshold: 0.0,
    }
}

fn pulse(amplitude: f64, duration: f64) -> BoundaryCondition {
    BoundaryCondition::Velocity(TimeProgram::new(vec![(0.0, amplitude), (duration, 0.0)]).unwrap())
}

#[test]
fn free_end_reflection_keeps_velocity_and_flips_stress() {
    let mut s = scenario(400, 1e9, 0.5, pulse(1e-3, 0.05), BoundaryCondition::Free);
    let c = s.moduli.p_wave_speed();
    // Pulse centre passes x = 0.75 at about 0.75/c going right and 1.25/c coming back.
    s.t_end = 1.6 / c;
    s.output_stride = 1;
    let rec = run(&s).unwrap();
    let node = 300;
    let cell = 300;
    let (mut v_in, mut v_out) = (0.0_f64, 0.0_f64);
    let (mut s_in, mut s_out) = (0.0_f64, 0.0_f64);
    for snap in &rec.snapshots {
        let v = snap.velocity[node];
        let sig = snap.sigma[cell].s11;
        if snap.t < 1.0 / c {
            if v.abs() > v_in.abs() {
                v_in = v;
            }
            if sig.abs() > s_in.abs() {
                s_in = sig;
            }
        } else {
            if v.abs() > v_out.abs() {
                v_out = v;
            }
            if sig.abs() > s_out.abs() {
                s_out = sig;
            }
        }
    }
    assert!(v_in > 0.0 && v_out > 0.0, "{v_in} {v_out}");
    assert!(s_in < 0.0 && s_out > 0.0, "{s_in} {s_out}");
    assert!((v_out / v_in - 1.0).abs() < 0.1);
}

#[test]
fn elastic_energy_is_conserved() {
    let mut s = scenario(200, 1e9, 0.5, pulse(1e-3, 0.05), BoundaryCondition::Free);
    s.boundaries.left = BoundaryCondition::Free;
    let mut grid = Grid1D::new(200, 1.0).unwrap();
    // smooth initial velocity bump
    for (i, v) in grid.velocity.iter_mut().enumerate() {
        let x = i as f64 / 200.0 - 0.5;
        *v = 1e-3 * (-(x * x) / 0.005).exp();
    }
    s.t_end = 1000.0 * s.dt;
    let rec = run_from(&s, &mut grid).unwrap();
    let e0 = rec.energy[0].1;
    let worst = rec
        .energy
        .iter()
        .map(|(_, e)| (e - e0).abs() / e0)
        .fold(0.0, f64::max);
    assert!(worst <= 5e-3, "relative energy drift {worst}");
}

#[test]
fn plastic_energy_decays_after_forcing_stops() {
    let mut s = scenario(300, 2e-3, 0.5, pulse(-1e-2, 0.2), BoundaryCondition::Free);
    s.t_end = 2.0;
    let forcing_end = s.forcing_end();
    let rec = run(&s).unwrap();
    let after: Vec<f64> = rec
        .energy
        .iter()
        .filter(|(t, _)| *t > forcing_end)
        .map(|(_, e)| *e)
        .collect();
    assert!(after.len() > 1000);
    for w in after.windows(1000).step_by(100) {
        assert!(w[999] <= w[0] * 1.01, "{} -> {}", w[0], w[999]);
    }
    assert!(rec.min_dissipation() >= -1e-10);
    assert!(rec.dissipation.iter().sum::<f64>() > 0.0);
}

#[test]
fn strong_loading_respects_yield_cap() {
    let k = 1e-3;
    let mut s = scenario(
        200,
        k,
        0.8,
        BoundaryCondition::Velocity(TimeProgram::constant(5e-2)),
        BoundaryCondition::Free,
    );
    s.t_end = 0.6;
    let rec = run(&s).unwrap();
    let f = YieldFunction::VonMises { k };
    for snap in &rec.snapshots {
        for sig in &snap.sigma {
            assert!(f.reporting_value(*sig) <= k + 1e-6);
        }
    }
    assert!(rec.final_grid.cells.iter().any(|c| c.eps_p.norm() > 0.0));
}

#[test]
fn traction_boundary_launches_compression() {
    let mut s = scenario(
        200,
        1e9,
        0.5,
        BoundaryCondition::Traction(TimeProgram::constant(-1e-3)),
        BoundaryCondition::Free,
    );
    s.t_end = 0.3 / s.moduli.p_wave_speed();
    let rec = run(&s).unwrap();
    let cells = &rec.final_grid.cells;
    assert!((cells[0].sigma.s11 + 1e-3).abs() < 1e-4);
    assert!(rec.final_grid.velocity[0] > 0.0);
    assert_eq!(cells[150].sigma.s11, 0.0);
}

#[test]
fn uniform_body_force_accelerates_free_bar() {
    let mut s = scenario(
        50,
        1e9,
        0.5,
        BoundaryCondition::Free,
        BoundaryCondition::Free,
    );
    s.body_force = TimeProgram::constant(0.3);
    s.t_end = 100.0 * s.dt;
    let rec = run(&s).unwrap();
    let expected = 0.3 / s.moduli.density() * s.t_end;
    for v in &rec.final_grid.velocity {
        assert!((v - expected).abs() < 1e-12);
    }
}
