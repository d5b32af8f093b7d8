use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shpattern_core::direct::spectral::fit_slope;
use shpattern_core::model::{interior_rhs, model_rhs, run_model};
use shpattern_core::{make_params, AmplitudeState, BoundaryForcing, ForcingKind, Signal, Topology};

fn random_state(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> AmplitudeState {
    let a = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect();
    AmplitudeState::real_sector(a)
}

fn distance(x: &AmplitudeState, y: &AmplitudeState) -> f64 {
    x.a.iter().zip(&y.a).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

#[test]
fn shifts_commute_with_the_periodic_rhs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = make_params(0.07, 0.8, 1, 9, 16).unwrap();
    let forcing = BoundaryForcing::periodic();
    for _ in 0..20 {
        let state = random_state(&mut rng, 9, 0.4);
        let k = rng.gen_range(1..9);
        let (da, db) = model_rhs(&state, &params, &forcing).unwrap();
        let (sa, sb) = model_rhs(&state.shifted(k), &params, &forcing).unwrap();
        let expect = AmplitudeState { t: 0.0, a: da, b: db }.shifted(k);
        for j in 0..9 {
            assert!((sa[j] - expect.a[j]).norm() < 1e-15);
            assert!((sb[j] - expect.b[j]).norm() < 1e-15);
        }
    }
}

#[test]
fn global_phase_commutes_with_interior_rhs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let params = make_params(0.03, 1.0, 2, 6, 16).unwrap();
    for _ in 0..20 {
        let mut state = random_state(&mut rng, 6, 0.5);
        // Leave the real sector so both components are exercised.
        state.b[2] += Complex64::new(0.1, -0.2);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let rot = Complex64::from_polar(1.0, theta);
        let turned = AmplitudeState {
            t: 0.0,
            a: state.a.iter().map(|z| z * rot).collect(),
            b: state.b.iter().map(|z| z * rot.conj()).collect(),
        };
        for j in 0..6 {
            let (da, db) = interior_rhs(&state, &params, j, Topology::Periodic).unwrap();
            let (ta, tb) = interior_rhs(&turned, &params, j, Topology::Periodic).unwrap();
            assert!((ta - da * rot).norm() < 1e-14);
            assert!((tb - db * rot.conj()).norm() < 1e-14);
        }
    }
}

#[test]
fn wall_forcing_breaks_phase_symmetry() {
    let params = make_params(0.0, 1.0, 1, 4, 16).unwrap();
    let forcing = BoundaryForcing::left(ForcingKind::EvenGiven, Signal::constant(0.05), Signal::zero(), &params);
    let state = AmplitudeState::real_sector(vec![Complex64::new(0.01, 0.0); 4]);
    let rot = Complex64::i();
    let turned = AmplitudeState::real_sector(state.a.iter().map(|z| z * rot).collect());
    let (da, _) = model_rhs(&state, &params, &forcing).unwrap();
    let (ta, _) = model_rhs(&turned, &params, &forcing).unwrap();
    assert!((ta[0] - da[0] * rot).norm() > 1e-3);
}

#[test]
fn rk4_is_fourth_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let params = make_params(0.1, 1.0, 1, 8, 16).unwrap();
    let forcing = BoundaryForcing::periodic();
    let state = random_state(&mut rng, 8, 0.3);
    let run = |dt: f64| run_model(&state, &params, &forcing, 20.0, dt, usize::MAX).unwrap().last().clone();
    let dts = [0.4, 0.2, 0.1];
    let errors: Vec<f64> = dts.iter().map(|&dt| distance(&run(dt), &run(dt / 2.0))).collect();
    let slope = fit_slope(&dts.map(f64::ln), &errors.iter().map(|e| e.ln()).collect::<Vec<_>>());
    assert!(slope >= 3.9, "slope {slope}, errors {errors:?}");
}

#[test]
fn bounded_rk4_is_fourth_order_with_smooth_forcing() {
    let params = make_params(0.05, 1.0, 1, 6, 16).unwrap();
    let alpha = Signal::Harmonic {
        mean: 0.02,
        amplitude: 0.01,
        omega: 0.3,
        phase: 0.0,
    };
    let forcing = BoundaryForcing::left(ForcingKind::OddGiven, alpha, Signal::constant(0.01), &params);
    let state = AmplitudeState::real_sector(vec![Complex64::new(0.1, 0.05); 6]);
    let run = |dt: f64| run_model(&state, &params, &forcing, 10.0, dt, usize::MAX).unwrap().last().clone();
    let dts = [0.4, 0.2, 0.1];
    let errors: Vec<f64> = dts.iter().map(|&dt| distance(&run(dt), &run(dt / 2.0))).collect();
    let slope = fit_slope(&dts.map(f64::ln), &errors.iter().map(|e| e.ln()).collect::<Vec<_>>());
    assert!(slope >= 3.9, "slope {slope}, errors {errors:?}");
}
