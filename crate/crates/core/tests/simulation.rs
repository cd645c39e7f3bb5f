mod common;

use bobsled_core::aero::AirState;
use bobsled_core::evaluation::{combine, evaluate_run, loss_energies, model_rmse};
use bobsled_core::friction::{Braghin, LateralModel, LongitudinalLaw};
use bobsled_core::icehouse::Direction;
use bobsled_core::onetrack::{build_axle_trace, TraceOptions};
use bobsled_core::sim::{
    simulate, simulate_glide, ControlTrace, GlideScenario, InitialConditions, Scenario, SimModel,
    TrackProfile,
};
use bobsled_core::telemetry::{derive_channels, resample};
use common::*;

const G: f64 = 9.81;

#[test]
fn straight_run_without_steering_stays_straight() {
    let model = fitted_model();
    let log = simulate(&model, &straight_scenario(8.0)).unwrap();
    for x in &log.samples {
        assert!(x.state.beta.abs() < 1e-12 && x.state.psi_dot.abs() < 1e-12);
        assert!(x.snapshot.front_f0.y.abs() < 1e-9 && x.snapshot.rear.y.abs() < 1e-9);
    }
    assert!(log.energy_closure(model.bob.mass) < 1e-9);
}

#[test]
fn mirrored_steering_mirrors_the_yaw() {
    let model = fitted_model();
    let run = |delta: f64| {
        let sc = Scenario::new(
            TrackProfile::straight(2000.0, 0.1),
            ControlTrace::step_steer(2.0, 0.2, delta),
            InitialConditions {
                v: 25.0,
                beta: 0.0,
                psi_dot: 0.0,
                s: 0.0,
            },
            6.0,
        );
        simulate(&model, &sc).unwrap()
    };
    let (left, right) = (run(0.5f64.to_radians()), run(-0.5f64.to_radians()));
    assert!(left.final_state.psi_dot > 0.0);
    for (a, b) in left.samples.iter().zip(&right.samples) {
        assert!((a.state.psi_dot + b.state.psi_dot).abs() < 1e-12);
        assert!((a.state.beta + b.state.beta).abs() < 1e-12);
        assert!((a.state.v - b.state.v).abs() < 1e-9);
    }
}

#[test]
fn level_glide_decelerates_at_the_friction_rate() {
    let mu = 0.004;
    let still_air = AirState {
        p_air: 1e-6,
        ..AirState::ICE_HOUSE
    };
    let model = SimModel::new(
        two_man_bob(),
        LongitudinalLaw::Fixed(mu),
        LateralModel::fitted(),
        still_air,
    );
    let sc = Scenario::new(
        TrackProfile::straight(500.0, 0.0),
        ControlTrace::neutral(),
        InitialConditions {
            v: 10.0,
            beta: 0.0,
            psi_dot: 0.0,
            s: 0.0,
        },
        5.0,
    );
    let log = simulate(&model, &sc).unwrap();
    let t = log.final_state.t;
    let expected = 10.0 - mu * G * t;
    assert!(
        (log.final_state.v - expected).abs() < 1e-6,
        "{} vs {expected}",
        log.final_state.v
    );
}

#[test]
fn glide_simulation_matches_the_closed_form_without_air() {
    let sc = GlideScenario {
        mass: 100.0,
        mu: 0.005,
        kappa: 0.0,
        v0: 3.0,
        length: 20.0,
        cxax: 1e-12,
        air: AirState::ICE_HOUSE,
        dt: 1e-3,
        sample_rate: 100.0,
    };
    let run = simulate_glide(&sc, Some(Direction::Up)).unwrap();
    for (s, v) in run.s.iter().zip(&run.v) {
        let expect = (9.0 - 2.0 * 0.005 * G * s).sqrt();
        assert!((v - expect).abs() < 1e-6, "s {s}: {v} vs {expect}");
    }
}

#[test]
fn loss_energies_survive_halving_the_rate() {
    let model = fitted_model();
    let p = pipeline(&model, &corner_scenario(0.8), "A");
    let half = derive_channels(&resample(&p.run, 50.0).unwrap()).unwrap();
    let half_trace = build_axle_trace(
        &half,
        &model.bob,
        &model.longitudinal,
        &model.aero,
        &TraceOptions::default(),
    )
    .unwrap();
    let per_metre = |trace| {
        let segments = loss_energies(trace, &model.aero, (0.0, 1e4)).unwrap();
        let distance: f64 = segments.iter().map(|x| x.s_end - x.s_start).sum();
        let b = combine(&segments);
        (b.e_tot_loss / distance, b.de_tot * b.e_tot_loss / distance)
    };
    let (full, halved) = (per_metre(&p.reconstructed), per_metre(&half_trace));
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs();
    assert!(rel(full.0, halved.0) < 1e-3, "{full:?} vs {halved:?}");
    assert!(rel(full.1, halved.1) < 1e-3, "{full:?} vs {halved:?}");
}

#[test]
fn reference_law_misfits_a_fitted_law_run() {
    let model = fitted_model();
    let p = pipeline(&model, &corner_scenario(0.8), "A");
    let mass = model.bob.mass;
    let fitted = model_rmse(&p.reconstructed, &LateralModel::fitted(), mass).unwrap();
    let reference = model_rmse(
        &p.reconstructed,
        &LateralModel::Braghin(Braghin::default()),
        mass,
    )
    .unwrap();
    assert!(
        fitted * 10.0 < reference,
        "fitted {fitted} vs reference {reference}"
    );

    let braghin_model = model_with(LateralModel::Braghin(Braghin::default()));
    let q = pipeline(&braghin_model, &corner_scenario(0.8), "A");
    let back = model_rmse(
        &q.reconstructed,
        &LateralModel::Braghin(Braghin::default()),
        mass,
    )
    .unwrap();
    assert!(back < fitted.max(1.0) * 10.0);
}

#[test]
fn more_steering_costs_more_front_energy() {
    let model = fitted_model();
    let front = |deg: f64| {
        let p = pipeline(&model, &slalom_scenario(deg), "A");
        evaluate_run("r", "A", "t", &p.reconstructed, &model.aero)
            .unwrap()
            .breakdown
            .de_ice_f
    };
    let (low, high) = (front(0.3), front(0.9));
    assert!(high > low, "{low} vs {high}");
}
