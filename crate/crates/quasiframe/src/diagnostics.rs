//! Seeded cross-validation sweeps of the frame picture against the
//! density-matrix reference, packaged for reporting.

use crate::measurement::{measure_once, MeasProcess, QubitMeterState};
use crate::oracle;
use crate::sampling;
use crate::sic;
use crate::types::tol;
use crate::Sign;

/// Outcome of one cross-validation category.
#[derive(Clone, Debug)]
pub struct CategoryReport {
    /// Short category label.
    pub category: &'static str,
    /// Number of random samples drawn.
    pub samples: usize,
    /// Largest absolute deviation between the two routes.
    pub max_deviation: f64,
    /// Tolerance the category is held to.
    pub tolerance: f64,
    /// Inputs of the worst sample, serialized for error reports.
    pub worst_input: String,
}

impl CategoryReport {
    /// True when the category stayed within tolerance.
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

/// Run all cross-validation ensembles with one seed: state
/// representations, unitary channels, measurement statistics, and
/// collapse states. Deterministic given (seed, samples).
pub fn oracle_diff(seed: u64, samples: usize) -> Vec<CategoryReport> {
    vec![
        states_category(seed, samples),
        channels_category(seed, samples),
        statistics_category(seed, samples),
        collapse_category(seed, samples),
    ]
}

fn states_category(seed: u64, samples: usize) -> CategoryReport {
    let mut rng = sampling::rng_from_seed(seed);
    let mut max_deviation = 0.0f64;
    let mut worst_input = String::new();
    for _ in 0..samples {
        let rho = sampling::random_density(&mut rng);
        let s = oracle::bloch_from_density(&rho);
        let framed = sic::sic_from_bloch(&s);
        for pair in 0..4 {
            let born = (rho.matrix() * oracle::sic_projector(&sic::tetra_vector(pair)))
                .trace()
                .re;
            let dev = (framed.get(pair) - born).abs();
            if dev > max_deviation {
                max_deviation = dev;
                worst_input = format!("bloch = {:?}", s.vector().as_slice());
            }
        }
    }
    CategoryReport {
        category: "states",
        samples,
        max_deviation,
        tolerance: tol::ENTRY,
        worst_input,
    }
}

fn channels_category(seed: u64, samples: usize) -> CategoryReport {
    let mut rng = sampling::rng_from_seed(seed.wrapping_add(1));
    let mut max_deviation = 0.0f64;
    let mut worst_input = String::new();
    for _ in 0..samples {
        let rho = sampling::random_density(&mut rng);
        let u = sampling::random_unitary(&mut rng);
        let direct =
            sic::sic_from_bloch(&oracle::bloch_from_density(&oracle::apply_unitary(&rho, &u)));
        let channel = sic::channel_from_rotation(&sic::rotation_from_unitary(&u))
            .expect("rotation extracted from a unitary is proper");
        let framed = channel.apply(&sic::sic_from_bloch(&oracle::bloch_from_density(&rho)));
        let dev = (framed.vector() - direct.vector()).abs().max();
        if dev > max_deviation {
            max_deviation = dev;
            worst_input = format!(
                "bloch = {:?}, unitary = {:?}",
                oracle::bloch_from_density(&rho).vector().as_slice(),
                u.matrix().as_slice()
            );
        }
    }
    CategoryReport {
        category: "channels",
        samples,
        max_deviation,
        tolerance: tol::DERIVED,
        worst_input,
    }
}

fn statistics_category(seed: u64, samples: usize) -> CategoryReport {
    let mut rng = sampling::rng_from_seed(seed.wrapping_add(2));
    let mut max_deviation = 0.0f64;
    let mut worst_input = String::new();
    for _ in 0..samples {
        let s = sampling::random_bloch(&mut rng);
        let m = sampling::random_direction(&mut rng);
        let outcome = measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m))
            .expect("canonical measurement of a physical state stays nonnegative");
        let rho = oracle::density_from_bloch(&s);
        for beta in Sign::BOTH {
            let dev =
                (outcome.outcome_probability(beta) - oracle::born_probability(&rho, &m, beta)).abs();
            if dev > max_deviation {
                max_deviation = dev;
                worst_input = format!(
                    "bloch = {:?}, direction = {:?}",
                    s.vector().as_slice(),
                    m.vector().as_slice()
                );
            }
        }
    }
    CategoryReport {
        category: "statistics",
        samples,
        max_deviation,
        tolerance: tol::ENTRY,
        worst_input,
    }
}

fn collapse_category(seed: u64, samples: usize) -> CategoryReport {
    let mut rng = sampling::rng_from_seed(seed.wrapping_add(3));
    let mut max_deviation = 0.0f64;
    let mut worst_input = String::new();
    for _ in 0..samples {
        let s = sampling::random_bloch(&mut rng);
        let m = sampling::random_direction(&mut rng);
        let outcome = measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m))
            .expect("canonical measurement of a physical state stays nonnegative");
        let rho = oracle::density_from_bloch(&s);
        for beta in Sign::BOTH {
            if outcome.outcome_probability(beta) <= tol::ENTRY {
                continue;
            }
            let conditional = outcome
                .conditional_qubit(beta)
                .expect("outcome has nonzero probability");
            let collapsed = oracle::luders_collapse(&rho, &m, beta)
                .expect("outcome has nonzero probability");
            let reference = sic::sic_from_bloch(&oracle::bloch_from_density(&collapsed));
            let dev = (conditional.vector() - reference.vector()).abs().max();
            if dev > max_deviation {
                max_deviation = dev;
                worst_input = format!(
                    "bloch = {:?}, direction = {:?}, outcome = {}",
                    s.vector().as_slice(),
                    m.vector().as_slice(),
                    beta
                );
            }
        }
    }
    CategoryReport {
        category: "collapse",
        samples,
        max_deviation,
        tolerance: tol::ENTRY,
        worst_input,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_categories_pass_and_repeat_exactly() {
        let first = oracle_diff(7, 50);
        let second = oracle_diff(7, 50);
        assert_eq!(first.len(), 4);
        for (a, b) in first.iter().zip(second.iter()) {
            assert!(a.passed(), "{} deviated by {:e}", a.category, a.max_deviation);
            assert_eq!(a.max_deviation.to_bits(), b.max_deviation.to_bits());
            assert_eq!(a.worst_input, b.worst_input);
        }
    }
}
