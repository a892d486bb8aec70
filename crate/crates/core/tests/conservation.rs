use dnls_core::continuum::{coupled_energy, coupled_mass, nls_evolve, CoupledState};
use dnls_core::lattice::{energy, evolve, mass};
use dnls_core::spectral::{sample_initial_data, smooth_lowpass};
use dnls_core::{
    cis, ContinuumField64, Cx, DnlsParams64, LatticeField64, Nonlinearity, SamplingSpec,
    TorusGrid64,
};

const LEN: f64 = 51.2;

fn gaussian(grid: TorusGrid64, amp: f64, width: f64, centre: f64, k: f64) -> ContinuumField64 {
    ContinuumField64::from_fn(grid, |x| {
        let r = (x - centre) / width;
        cis(k * x) * (amp * (-r * r).exp())
    })
    .unwrap()
}

fn sampled_pair(h: f64) -> (LatticeField64, CoupledState<f64>) {
    let fine = TorusGrid64::from_length(LEN, 2048).unwrap();
    let spec = SamplingSpec::new(h, 0.5).unwrap();
    let psi = gaussian(fine, 0.8, 2.5, 0.0, 0.3);
    let phi = gaussian(fine, 0.6, 2.0, 1.0, -0.4);
    let u0 = sample_initial_data(&psi, &phi, &spec).unwrap();
    let state = CoupledState::new(
        smooth_lowpass(&psi, spec.n_cut()).unwrap(),
        smooth_lowpass(&phi, spec.n_cut()).unwrap(),
    )
    .unwrap();
    (u0, state)
}

fn max_rel_dev(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|v| ((v - values[0]) / values[0]).abs())
        .fold(0.0, f64::max)
}

fn lattice_energy_drift(u0: &LatticeField64, nl: Nonlinearity, dt: f64, taus: &[f64]) -> f64 {
    let params = DnlsParams64::new(nl, dt, 100.0).unwrap();
    let s = evolve(u0, &params, taus).unwrap();
    let e: Vec<f64> = s.states.iter().map(|u| energy(u, nl)).collect();
    max_rel_dev(&e)
}

#[test]
fn lattice_mass_and_energy() {
    let (u0, _) = sampled_pair(0.1);
    let taus: Vec<f64> = (-10..=10).map(|j| j as f64 * 10.0).collect();
    for nl in [Nonlinearity::Defocusing, Nonlinearity::Focusing] {
        let params = DnlsParams64::new(nl, 0.05, 100.0).unwrap();
        let s = evolve(&u0, &params, &taus).unwrap();
        assert!(
            s.max_relative_mass_drift() <= 1e-11,
            "{nl:?}: {:e}",
            s.max_relative_mass_drift()
        );

        let coarse = lattice_energy_drift(&u0, nl, 0.1, &taus);
        let fine = lattice_energy_drift(&u0, nl, 0.05, &taus);
        let ratio = coarse / fine;
        assert!(
            (3.5..=4.5).contains(&ratio),
            "{nl:?}: energy drift ratio {ratio}"
        );
    }
}

#[test]
fn linear_flow_conserves_exactly_enough() {
    let grid = TorusGrid64::new(256, 0.2).unwrap();
    let u0 = LatticeField64::from_fn(grid, |n| {
        Cx::new(if n == 0 { 0.2f64.sqrt() } else { 0.0 }, 0.0)
    })
    .unwrap();
    let taus: Vec<f64> = (0..=8).map(|j| j as f64 * 12.5).collect();
    let s = evolve(
        &u0,
        &DnlsParams64::new(Nonlinearity::Off, 0.05, 100.0).unwrap(),
        &taus,
    )
    .unwrap();
    let e0 = energy(&u0, Nonlinearity::Off);
    for u in &s.states {
        assert!((mass(u) - 0.2).abs() <= 1e-11);
        assert!((energy(u, Nonlinearity::Off) - e0).abs() <= 1e-11);
    }
}

#[test]
fn coupled_mass_and_energy() {
    let (_, state) = sampled_pair(0.1);
    let ts: Vec<f64> = (-4..=4).map(|j| j as f64 * 0.25).collect();
    let nl = Nonlinearity::Defocusing;
    let (p0, q0) = coupled_mass(&state);
    let drift = |dt: f64| {
        let run = nls_evolve(&state, 1.0, dt, nl, &ts).unwrap();
        let e: Vec<f64> = run.iter().map(|(_, s)| coupled_energy(s, nl)).collect();
        for (t, s) in &run {
            let (p, q) = coupled_mass(s);
            assert!(((p - p0) / p0).abs() <= 1e-11, "psi mass at t = {t}");
            assert!(((q - q0) / q0).abs() <= 1e-11, "phi mass at t = {t}");
        }
        let e0 = coupled_energy(&state, nl);
        e.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max) / e0.abs()
    };
    let ratio = drift(4e-3) / drift(2e-3);
    assert!((3.5..=4.5).contains(&ratio), "energy drift ratio {ratio}");
}
