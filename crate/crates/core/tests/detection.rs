//! Detector statistics measured through the policy and the slot arbiter.

use asa_sim::arbiter::{Action, SlotArbiter, SlotOutcome};
use asa_sim::channel::{ChannelParams, ChannelProcess, StartRule};
use asa_sim::experiment::{detector_error_curve, estimate_pie, ExperimentConfig};
use asa_sim::policy::{Mode, PolicyConfig, UserState};
use asa_sim::rng;

/// Mean of La/L for a sensing user, with an optional occupant already in access.
fn sensing_statistic(occupied: bool, periods: u64) -> f64 {
    let params = ChannelParams::geometric(3.23, 1.43).unwrap();
    let policy = PolicyConfig::new(24, 0, 0.2, 0.5, vec![params.eta()]).unwrap();
    let mut arbiter = SlotArbiter::new();
    let mut outcome = SlotOutcome::default();
    let mut total = 0.0;
    for p in 0..periods {
        let seed = rng::run_seed(77 + occupied as u64, p);
        let mut channel =
            ChannelProcess::new(params, rng::channel_stream(seed, 0), StartRule::default());
        let mut sensor = UserState::new(0.5, &policy).unwrap();
        let mut sensor_rng = rng::user_stream(seed, 0);
        sensor.enter(&policy, &mut sensor_rng);
        let mut occupant_rng = rng::user_stream(seed, 1);
        let q = 0.5 / params.eta();
        let mut la = 0;
        for _ in 0..24 {
            let on = [channel.next_slot().is_on()];
            let mut actions = vec![sensor.slot_action(&mut sensor_rng).unwrap()];
            if occupied {
                actions.push(if rand::Rng::random_bool(&mut occupant_rng, q) {
                    Action::Transmit(0)
                } else {
                    Action::Sense(0)
                });
            }
            arbiter.resolve_into(&on, &actions, &mut outcome).unwrap();
            sensor.record_outcome(outcome.availability[0].unwrap());
            la += outcome.availability[0].unwrap() as u64;
        }
        assert_eq!(sensor.mode(), Mode::Sensing);
        assert_eq!(sensor.available_count(), la);
        total += la as f64 / 24.0;
    }
    total / periods as f64
}

#[test]
fn sensing_statistic_is_calibrated() {
    let eta = 3.23 / (3.23 + 1.43);
    let h0 = sensing_statistic(false, 20_000);
    let h1 = sensing_statistic(true, 20_000);
    assert!((h0 - eta).abs() < 0.02, "H0 mean {h0}");
    assert!((h1 - (eta - 0.5)).abs() < 0.02, "H1 mean {h1}");
}

#[test]
fn lone_user_period_error_matches_false_alarm() {
    // One user, one channel, entering at 0. Period 1 is sensing, so always
    // bad. Period 2 is bad only if the first test false-alarmed and the
    // coin came up tail: P = FA(24) / 2.
    let params = ChannelParams::geometric(3.23, 1.43).unwrap();
    let mut cfg = ExperimentConfig::reference(vec![params], &[0.5]);
    cfg.horizon = 60;
    cfg.runs = 40_000;
    let periods = estimate_pie(&cfg, 0).unwrap();
    assert_eq!(periods.len(), 2);
    assert_eq!(periods[0].p_err, 1.0);

    let curve = detector_error_curve(params, 0.5, 0.2, &[24], 40_000, 5).unwrap();
    let fa = curve.points[0];
    let predicted = fa.false_alarm / 2.0;
    let se = (periods[1].p_err_stderr.powi(2) + (fa.false_alarm_stderr / 2.0).powi(2)).sqrt();
    assert!(
        (periods[1].p_err - predicted).abs() < 3.0 * se,
        "P2 {} vs FA/2 {predicted} (se {se})",
        periods[1].p_err
    );
    assert!(periods[1].p_err > 0.0);
}
