use std::f64::consts::PI;

use central_spin::control::{PulseSequence, TwoTimeKernel};
use central_spin::kernels::{box_delta, box_detuning, KernelSpec};
use central_spin::oracle::{compare_reduced, evolve_amplitudes, BathRealization};
use central_spin::propagator::{analytic_box, solve_volterra, TimeGrid};
use central_spin::scenario::{time_average, ScenarioConfig};
use central_spin::tcl::{coefficients, evolve_exact, evolve_tcl_direct, QubitState};
use central_spin::Complex64;

#[test]
fn constant_pulses_match_between_oracle_and_volterra() {
    let (acal, n, omega_bath, omega0) = (1.0, 16, 0.0, 1.2);
    let omega = box_detuning(omega0, omega_bath, acal, n).unwrap();
    let grid = TimeGrid::new(10.0, 10_000).unwrap();
    let bath = BathRealization::homogeneous(acal, n, omega_bath).unwrap();
    for pulses in [PulseSequence::constant(0.1, 0.05, 0.3).unwrap(), PulseSequence::constant_rate(2.0, 0.1).unwrap()] {
        let oracle = evolve_amplitudes(&bath, omega0, grid, &pulses).unwrap();
        let kernel = TwoTimeKernel::new(KernelSpec::box_model(acal, n, omega).unwrap(), pulses).unwrap();
        let reduced = solve_volterra(&kernel, grid).unwrap().with_overhauser(0.5 * acal);
        let report = compare_reduced(&oracle, &reduced).unwrap();
        assert!(report.max_abs <= 1e-4, "{report:?}");
    }
}

#[test]
fn random_pulses_match_between_oracle_and_volterra() {
    let (acal, n, omega0) = (1.0, 8, 0.9);
    let omega = box_detuning(omega0, 0.0, acal, n).unwrap();
    let grid = TimeGrid::new(6.0, 12_000).unwrap();
    let bath = BathRealization::homogeneous(acal, n, 0.0).unwrap();
    let pulses = PulseSequence::random(0.1, 0.04, 0.5, 99).unwrap();
    let oracle = evolve_amplitudes(&bath, omega0, grid, &pulses).unwrap();
    let kernel = TwoTimeKernel::new(KernelSpec::box_model(acal, n, omega).unwrap(), pulses).unwrap();
    let reduced = solve_volterra(&kernel, grid).unwrap().with_overhauser(0.5 * acal);
    assert!(compare_reduced(&oracle, &reduced).unwrap().max_abs <= 1e-4);
}

#[test]
fn aligned_overhauser_field_is_more_fragile() {
    let (n, omega0) = (4, 1.0);
    let min_fidelity = |acal: f64| {
        let omega = box_detuning(omega0, 0.0, acal, n).unwrap();
        let delta = box_delta(omega, acal, n).unwrap();
        let grid = TimeGrid::new(2.0 * PI / delta, 4000).unwrap();
        let bath = BathRealization::homogeneous(acal, n, 0.0).unwrap();
        let traj = evolve_amplitudes(&bath, omega0, grid, &PulseSequence::off()).unwrap();
        let min = traj.fidelity().into_iter().fold(f64::INFINITY, f64::min);
        assert!((min - omega.abs() / delta).abs() < 1e-6);
        min
    };
    assert!(min_fidelity(1.0) < min_fidelity(-1.0));
}

#[test]
fn box_revivals_are_periodic() {
    let (omega, acal, n) = (0.3, 1.5, 9);
    let delta = box_delta(omega, acal, n).unwrap();
    let period = 2.0 * PI / delta;
    // two periods on a grid whose midpoint is exactly one period
    let grid = TimeGrid::new(2.0 * period, 2000).unwrap();
    let f = analytic_box(omega, acal, n, grid).unwrap().fidelity();
    for k in 0..=1000 {
        assert!((f[k] - f[k + 1000]).abs() < 1e-12, "node {k}");
    }
}

#[test]
fn stronger_constant_control_never_hurts_long_memory() {
    let grid = TimeGrid::new(5.0, 5000).unwrap();
    let base = KernelSpec::exponential(1.0, 0.2).unwrap();
    let means: Vec<f64> = [0.0, 0.2, 1.0, 5.0]
        .iter()
        .map(|&psi| {
            let pulses = PulseSequence::constant(0.02, 0.01, psi).unwrap();
            let kernel = TwoTimeKernel::new(base.clone(), pulses).unwrap();
            time_average(&solve_volterra(&kernel, grid).unwrap().fidelity(), grid)
        })
        .collect();
    assert!(means.windows(2).all(|w| w[1] >= w[0]), "{means:?}");
}

#[test]
fn evolved_states_stay_hermitian() {
    let grid = TimeGrid::new(4.0, 4000).unwrap();
    let kernel = TwoTimeKernel::new(
        KernelSpec::exponential(1.0, 3.0).unwrap(),
        PulseSequence::random(0.05, 0.02, 0.3, 5).unwrap(),
    )
    .unwrap();
    let series = solve_volterra(&kernel, grid).unwrap().with_overhauser(0.7);
    let rho0 = QubitState::new(0.6, Complex64::new(0.2, -0.3)).unwrap();
    let exact = evolve_exact(&rho0, &series);
    let tcl = evolve_tcl_direct(&rho0, &coefficients(&series));
    for s in exact.iter().chain(&tcl.states) {
        assert!(s.hermiticity_error() <= 1e-10);
        assert!((s.trace() - 1.0).abs() <= 1e-10);
    }
}

const SAMPLE: &str = r#"
base_rate = 2.5
seed = 4
output = "out/x.csv"
overhauser = 0.25

[kernel]
type = "tabulated"
dt = 0.5
re = [1.0, 0.5, 0.25]
im = [0.0, 0.1, 0.0]

[control]
mode = "constant"
tau = 0.1
kappa = 0.05
psi = 0.3

[grid]
t_max = 1.0
n_steps = 20

[initial]
rho11 = 0.5
rho10_im = 0.5

[sweep]
parameter = "control.psi"
values = [0.1, 0.2]

[bath]
n = 3
coupling_mean = 0.2
coupling_spread = 0.01
omega0 = 1.0
"#;

#[test]
fn config_round_trip_is_idempotent() {
    let cfg = ScenarioConfig::from_toml(SAMPLE).unwrap();
    let once = cfg.to_toml().unwrap();
    let reparsed = ScenarioConfig::from_toml(&once).unwrap();
    assert_eq!(reparsed, cfg);
    assert_eq!(reparsed.to_toml().unwrap(), once);
}

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.kernel_spec().unwrap();
        count += 1;
    }
    assert_eq!(count, 4);
}
