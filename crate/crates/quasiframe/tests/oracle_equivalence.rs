//! Cross-validation of the frame picture against the density-matrix
//! reference on seeded random ensembles.

use nalgebra::Matrix4;
use quasiframe::measurement::{measure_once, MeasProcess, QubitMeterState};
use quasiframe::types::tol;
use quasiframe::{oracle, sampling, sic, ChshSettings, Sign};

const SAMPLES: usize = 1000;

/// Frame probabilities of random mixed states match projector traces.
#[test]
fn state_representations_agree() {
    let mut rng = sampling::rng_from_seed(101);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let rho = sampling::random_density(&mut rng);
        let s = oracle::bloch_from_density(&rho);
        let framed = sic::sic_from_bloch(&s);
        for pair in 0..4 {
            let born = (rho.matrix() * oracle::sic_projector(&sic::tetra_vector(pair)))
                .trace()
                .re;
            worst = worst.max((framed.get(pair) - born).abs());
        }
    }
    assert!(worst < 1e-12, "worst deviation {worst:e}");
}

/// Unitary evolution: frame rotation channel versus conjugation.
#[test]
fn unitary_channels_agree() {
    let mut rng = sampling::rng_from_seed(102);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let rho = sampling::random_density(&mut rng);
        let u = sampling::random_unitary(&mut rng);
        let evolved = oracle::apply_unitary(&rho, &u);
        let direct = sic::sic_from_bloch(&oracle::bloch_from_density(&evolved));

        let o = sic::rotation_from_unitary(&u);
        let channel = sic::channel_from_rotation(&o).unwrap();
        let framed = channel.apply(&sic::sic_from_bloch(&oracle::bloch_from_density(&rho)));
        worst = worst.max((framed.vector() - direct.vector()).abs().max());
    }
    assert!(worst < 1e-9, "worst deviation {worst:e}");
}

/// Measurement statistics: process marginal versus the Born rule.
#[test]
fn measurement_statistics_agree() {
    let mut rng = sampling::rng_from_seed(103);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let s = sampling::random_bloch(&mut rng);
        let m = sampling::random_direction(&mut rng);
        let outcome =
            measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m)).unwrap();
        let rho = oracle::density_from_bloch(&s);
        for beta in Sign::BOTH {
            let born = oracle::born_probability(&rho, &m, beta);
            worst = worst.max((outcome.outcome_probability(beta) - born).abs());
        }
    }
    assert!(worst < 1e-12, "worst deviation {worst:e}");
}

/// Collapse: conditional frame states versus the projective update.
#[test]
fn collapse_states_agree() {
    let mut rng = sampling::rng_from_seed(104);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let s = sampling::random_bloch(&mut rng);
        let m = sampling::random_direction(&mut rng);
        let outcome =
            measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m)).unwrap();
        let rho = oracle::density_from_bloch(&s);
        for beta in Sign::BOTH {
            if outcome.outcome_probability(beta) <= tol::ENTRY {
                continue;
            }
            let conditional = outcome.conditional_qubit(beta).unwrap();
            let collapsed = oracle::luders_collapse(&rho, &m, beta).unwrap();
            let reference = sic::sic_from_bloch(&oracle::bloch_from_density(&collapsed));
            worst = worst.max((conditional.vector() - reference.vector()).abs().max());
        }
    }
    assert!(worst < 1e-12, "worst deviation {worst:e}");
}

/// Two-qubit correlators: local frame rotations versus operator traces.
#[test]
fn two_qubit_correlators_agree() {
    let mut rng = sampling::rng_from_seed(105);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let rho = sampling::random_two_qubit_density(&mut rng);
        let joint = Matrix4::from_fn(|a, b| {
            let op = oracle::sic_projector(&sic::tetra_vector(a))
                .kronecker(&oracle::sic_projector(&sic::tetra_vector(b)));
            (rho.matrix() * op).trace().re
        });
        let p = sic::SicDist2::new(joint).expect("projector traces form a distribution");
        for _ in 0..5 {
            let a = sampling::random_direction(&mut rng);
            let b = sampling::random_direction(&mut rng);
            let framed = sic::correlator_from_sic(&p, &a, &b).unwrap();
            let direct = oracle::correlation(&rho, &a, &b);
            worst = worst.max((framed - direct).abs());
        }
    }
    assert!(worst < 1e-9, "worst deviation {worst:e}");
}

/// CHSH on the singlet: the frame route reproduces the oracle at random
/// settings and saturates 2*sqrt(2) at the optimal ones.
#[test]
fn chsh_routes_agree() {
    let mut rng = sampling::rng_from_seed(106);
    let p = sic::singlet_sic();
    let rho = oracle::singlet_density();
    for _ in 0..100 {
        let settings = ChshSettings {
            a1: sampling::random_direction(&mut rng),
            a2: sampling::random_direction(&mut rng),
            b1: sampling::random_direction(&mut rng),
            b2: sampling::random_direction(&mut rng),
        };
        let framed = sic::chsh_from_sic(&p, &settings).unwrap();
        let direct = oracle::chsh_value(&rho, &settings);
        assert!((framed - direct).abs() < 1e-9);
    }
    let tsirelson = sic::chsh_from_sic(&p, &ChshSettings::tsirelson()).unwrap();
    assert!((tsirelson - 2.0 * 2.0f64.sqrt()).abs() < 1e-9);
}
