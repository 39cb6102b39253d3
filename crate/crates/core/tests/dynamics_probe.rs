//! Attractor probing against the region structure: each region's long-term
//! inventory (equilibria, cycles, washout) must be what the classification
//! promises, and cycle periods must behave near the Hopf and cycle-death
//! values.

use flocstat_core::dynamics::{
    attractor_probe, cycle_period, homoclinic_locate, integrate, unstable_seed, AttractorKind,
};
use flocstat_core::equilibria::{find_steady_states, SteadyStateKind};
use flocstat_core::model::{jacobian, BioParams, OperatingPoint, State};
use flocstat_core::stability::eigenvalues;
use flocstat_core::CoreError;

fn branch1(op: &OperatingPoint, p: &BioParams) -> flocstat_core::equilibria::SteadyState {
    find_steady_states(op, p)
        .unwrap()
        .into_iter()
        .find(|e| e.kind == SteadyStateKind::Branch1)
        .expect("stable-capable branch exists")
}

#[test]
fn washout_region_attracts_everything() {
    let p = BioParams::line3();
    let op = OperatingPoint::new(3.0, 0.1);
    for init in [State::new(1.0, 1.0, 1.0), State::new(0.1, 3.0, 0.2)] {
        let report = attractor_probe(&init, &op, &p, 800.0).unwrap();
        assert!(matches!(report.kind, AttractorKind::Washout), "{init:?}");
    }
}

#[test]
fn coexistence_region_attracts_to_the_branch() {
    let p = BioParams::line3();
    let op = OperatingPoint::new(9.0, 0.1);
    let e1 = branch1(&op, &p);
    let report = attractor_probe(&State::new(2.0, 0.5, 0.5), &op, &p, 3000.0).unwrap();
    match report.kind {
        AttractorKind::Equilibrium(x) => assert!(x.dist_inf(&e1.state) < 1e-6),
        other => panic!("expected the coexistence equilibrium, got {other:?}"),
    }
}

#[test]
fn bistable_region_splits_by_seed() {
    // fold side: washout and the stable branch coexist; seeds displaced off
    // the saddle along its unstable direction reach both
    let p = BioParams::line3();
    let op = OperatingPoint::new(3.84, 0.1);
    let states = find_steady_states(&op, &p).unwrap();
    let saddle = states
        .iter()
        .find(|e| e.kind == SteadyStateKind::Branch2)
        .unwrap();
    let e1 = states
        .iter()
        .find(|e| e.kind == SteadyStateKind::Branch1)
        .unwrap();
    let seed_a = unstable_seed(saddle, &op, &p, 1e-3).unwrap();
    // mirror displacement
    let seed_b = State::new(
        2.0 * saddle.state.s - seed_a.s,
        (2.0 * saddle.state.u - seed_a.u).max(0.0),
        (2.0 * saddle.state.v - seed_a.v).max(0.0),
    );
    let mut saw_washout = false;
    let mut saw_branch = false;
    for seed in [seed_a, seed_b] {
        match attractor_probe(&seed, &op, &p, 80000.0).unwrap().kind {
            AttractorKind::Washout => saw_washout = true,
            AttractorKind::Equilibrium(x) if x.dist_inf(&e1.state) < 1e-5 => saw_branch = true,
            other => panic!("unexpected attractor {other:?}"),
        }
    }
    assert!(saw_washout && saw_branch);
}

#[test]
fn unstable_window_holds_a_cycle() {
    // both steady states unstable past the transcritical: the only attractor
    // is the limit cycle
    let p = BioParams::line3();
    let op = OperatingPoint::new(5.0, 0.1);
    let seed = unstable_seed(&branch1(&op, &p), &op, &p, 1e-3).unwrap();
    let report = attractor_probe(&seed, &op, &p, 4000.0).unwrap();
    match report.kind {
        AttractorKind::LimitCycle { period, orbit } => {
            assert!(period > 0.0);
            // closure after phase alignment: remove the along-flow component
            // of the first-to-last gap, leaving the transverse residual
            let first = *orbit.states.first().unwrap();
            let last = *orbit.states.last().unwrap();
            let flow = flocstat_core::model::vector_field(&first, &op, &p).to_array();
            let norm = flow.iter().map(|f| f * f).sum::<f64>().sqrt();
            let gap = [last.s - first.s, last.u - first.u, last.v - first.v];
            let along: f64 = gap
                .iter()
                .zip(&flow)
                .map(|(g, f)| g * f / norm)
                .sum();
            let transverse: f64 = gap
                .iter()
                .zip(&flow)
                .map(|(g, f)| (g - along * f / norm).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(
                transverse < 1e-6,
                "orbit fails to close: transverse gap {transverse:e}"
            );
        }
        other => panic!("expected a cycle, got {other:?}"),
    }
}

#[test]
fn bistable_cycle_window_depends_on_seed() {
    // between the first Hopf and the first cycle-death value the cycle
    // coexists with the stable washout state
    let p = BioParams::line3();
    let op = OperatingPoint::new(3.845, 0.1);
    let seed = unstable_seed(&branch1(&op, &p), &op, &p, 1e-3).unwrap();
    let near = attractor_probe(&seed, &op, &p, 20000.0).unwrap();
    assert!(matches!(near.kind, AttractorKind::LimitCycle { .. }));
    let far = attractor_probe(&State::new(1.0, 1.0, 1.0), &op, &p, 20000.0).unwrap();
    assert!(matches!(far.kind, AttractorKind::Washout));
}

#[test]
fn no_cycle_between_the_two_death_points() {
    let p = BioParams::line3();
    let op = OperatingPoint::new(3.9, 0.1);
    let seed = unstable_seed(&branch1(&op, &p), &op, &p, 1e-3).unwrap();
    let report = attractor_probe(&seed, &op, &p, 20000.0).unwrap();
    assert!(
        matches!(report.kind, AttractorKind::Washout),
        "got {:?}",
        report.kind
    );
}

#[test]
fn cycle_frequency_matches_the_marginal_pair() {
    // just past the Hopf value the cycle turns at the pair's frequency
    let p = BioParams::line3();
    let op = OperatingPoint::new(3.8425, 0.1);
    let e1 = branch1(&op, &p);
    let eig = eigenvalues(&jacobian(&e1.state, &op, &p)).unwrap();
    let omega = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let hopf_period = 2.0 * std::f64::consts::PI / omega;
    let seed = unstable_seed(&e1, &op, &p, 1e-3).unwrap();
    let period = cycle_period(&op, &p, &seed, 60000.0).unwrap();
    assert!(
        (period - hopf_period).abs() < 0.10 * hopf_period,
        "period {period} vs linearized {hopf_period}"
    );
}

#[test]
fn period_grows_toward_both_cycle_death_points() {
    let p = BioParams::line3();
    let measure = |s_in: f64| {
        let op = OperatingPoint::new(s_in, 0.1);
        let seed = unstable_seed(&branch1(&op, &p), &op, &p, 1e-3).unwrap();
        cycle_period(&op, &p, &seed, 60000.0).unwrap()
    };
    // increasing toward the death point above the first Hopf value
    let up: Vec<f64> = [3.8425, 3.8435, 3.8445, 3.8455, 3.8465]
        .iter()
        .map(|&s| measure(s))
        .collect();
    assert!(up.windows(2).all(|w| w[1] > w[0]), "ladder up: {up:?}");
    // increasing while descending toward the death point below the window top
    let down: Vec<f64> = [4.25, 4.2, 4.15, 4.1, 4.05]
        .iter()
        .map(|&s| measure(s))
        .collect();
    assert!(down.windows(2).all(|w| w[1] > w[0]), "ladder down: {down:?}");
}

#[test]
fn homoclinic_bisection_rejects_uniform_brackets() {
    let p = BioParams::line3();
    match homoclinic_locate(0.1, (4.2, 4.5), &p, 500.0) {
        Err(CoreError::Inconclusive(_)) => {}
        other => panic!("expected an inconclusive bracket, got {other:?}"),
    }
}

#[test]
fn rescaled_time_regime_finds_cycle_and_equilibrium() {
    let p = BioParams::line5();
    let d = 2.5e-5;
    // oscillatory window
    let op = OperatingPoint::new(48.0, d);
    let seed = unstable_seed(&branch1(&op, &p), &op, &p, 1e-3).unwrap();
    let report = attractor_probe(&seed, &op, &p, 2e5).unwrap();
    assert!(
        matches!(report.kind, AttractorKind::LimitCycle { .. }),
        "got {:?}",
        report.kind
    );
    // quiet window below the first Hopf value
    let op = OperatingPoint::new(1.0, d);
    let e1 = branch1(&op, &p);
    let report = attractor_probe(&State::new(0.5, 0.1, 0.1), &op, &p, 2e6).unwrap();
    match report.kind {
        AttractorKind::Equilibrium(x) => assert!(x.dist_inf(&e1.state) < 1e-5),
        other => panic!("expected the coexistence equilibrium, got {other:?}"),
    }
}

#[test]
fn nonnegativity_over_random_initial_conditions() {
    let p = BioParams::line3();
    let mut seed = 0xabcdef12345u64;
    let mut next = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    // operating points spanning washout-only, coexistence, and cycle regions
    for op in [
        OperatingPoint::new(3.0, 0.1),
        OperatingPoint::new(9.0, 0.1),
        OperatingPoint::new(5.0, 0.1),
    ] {
        for _ in 0..34 {
            let init = State::new(8.0 * next(), 4.0 * next(), 4.0 * next());
            let traj = integrate(&init, &op, &p, 120.0, (1e-8, 1e-8)).unwrap();
            for x in &traj.states {
                assert!(x.s >= -1e-12 && x.u >= -1e-12 && x.v >= -1e-12);
            }
        }
    }
}

#[test]
fn integration_failure_modes_are_reported() {
    let p = BioParams::line3();
    let op = OperatingPoint::new(1.0, 0.1);
    // an initial condition far outside the admissible box diverges immediately
    let err = integrate(&State::new(0.5, 90.0, 0.5), &op, &p, 10.0, (1e-8, 1e-8)).unwrap_err();
    assert!(matches!(err, CoreError::Divergence { .. }), "{err}");
    // an impossible tolerance exhausts the step size
    let err = integrate(&State::new(1.0, 1.0, 1.0), &op, &p, 10.0, (1e-300, 1e-300)).unwrap_err();
    assert!(matches!(err, CoreError::StepSizeUnderflow { .. }), "{err}");
}
