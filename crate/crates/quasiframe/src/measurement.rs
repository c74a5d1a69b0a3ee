//! Projective qubit measurement as a quasi-bistochastic process on a
//! three-bit register.
//!
//! The register holds one meter bit and the two qubit frame bits, so its
//! distributions live on 8 outcomes indexed (meter, bit, bit') big-endian
//! with +1 before -1. The 7-dim correlator space of that register splits
//! into three orthogonal blocks:
//!
//! * components 0..3: the plain qubit monomials (a, a', aa'),
//! * components 3..6: the same monomials dressed by the meter sign,
//! * component 6: the meter sign alone.
//!
//! A measurement along direction m acts on correlator vectors through the
//! 7x7 matrix produced by [`build_a`], giving the 8x8 process
//! S = (1 + 7 n_out . A n_in)/8 of [`MeasProcess`]. The three parameters
//! (x, y, z) of [`MeasParams`] sweep every A with the correct single-shot
//! behaviour; the canonical point (1, 0, 0) is the unique member whose
//! process factorizes, and the only one that stays well behaved under
//! repetition ([`uniqueness_residual`]).
//!
//! The process necessarily carries negative entries: scaling the
//! direction shows nonnegativity would require |m| <= 1/3
//! ([`positivity_necessity_check`]), and the classical comparators
//! ([`classical_convex_process`], [`two_meter_copy`],
//! [`meter_realizability_check`]) locate the obstruction in the
//! unit-length 3-dim direction itself.

use nalgebra::{DVector, Matrix4, SMatrix, SVector, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::gbv::{self, BitDist, Gbv};
use crate::sic::{self, QuasiStochMat, SicDist};
use crate::types::{tol, triple_index, triple_signs, BlochVec, MeasDirection, Sign};

/// Correlator-space vector of the qubit-meter register.
pub type Vec7 = SVector<f64, 7>;
/// Linear map on the correlator space.
pub type Mat7 = SMatrix<f64, 7, 7>;
/// Distribution over the 8 register outcomes.
pub type Vec8 = SVector<f64, 8>;
/// Process matrix on register distributions.
pub type Mat8 = SMatrix<f64, 8, 8>;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Embed a 3-vector into the plain qubit block (components 0..3).
pub fn qubit_block(v: &Vector3<f64>) -> Vec7 {
    let mut out = Vec7::zeros();
    out[0] = v[0];
    out[1] = v[1];
    out[2] = v[2];
    out
}

/// Embed a 3-vector into the meter-dressed block (components 3..6).
pub fn cross_block(v: &Vector3<f64>) -> Vec7 {
    let mut out = Vec7::zeros();
    out[3] = v[0];
    out[4] = v[1];
    out[5] = v[2];
    out
}

/// Unit vector along the lone meter-sign component.
pub fn meter_axis() -> Vec7 {
    let mut out = Vec7::zeros();
    out[6] = 1.0;
    out
}

/// Correlator frame vector of one register outcome, decomposed over the
/// three blocks: sqrt(3/7)(n + alpha n_dressed) + (alpha/sqrt(7)) e_meter
/// with n the tetrahedral vector of the qubit bits.
pub fn frame_triple(index: usize) -> Vec7 {
    let (alpha, _, _) = triple_signs(index);
    let n = sic::tetra_vector(index % 4);
    (qubit_block(&n) + cross_block(&n) * alpha) * (3.0f64 / 7.0).sqrt()
        + meter_axis() * (alpha / 7.0f64.sqrt())
}

/// The free parameters of the measurement family. Every member produces
/// correct single-shot statistics; only [`MeasParams::CANONICAL`] keeps
/// repeated application positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasParams {
    /// Weight mixing the plain block into its own image.
    pub x: f64,
    /// Weight of the dressed-block asymmetry.
    pub y: f64,
    /// Weight mixing the plain block into the meter component.
    pub z: f64,
}

impl MeasParams {
    /// The canonical parameter point (1, 0, 0).
    pub const CANONICAL: MeasParams = MeasParams {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };

    /// Bundle three reals.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        MeasParams { x, y, z }
    }
}

fn a_from_vector(v: &Vector3<f64>, params: MeasParams) -> Mat7 {
    let m1 = qubit_block(v);
    let m2 = cross_block(v);
    let e3 = meter_axis();
    let r1 = m1 * params.x + m2 * (1.0 - params.x);
    let r2 = (m1 - m2) * params.y + e3 / SQRT_3;
    let r3 = m1 * params.z + m2 * (SQRT_3 - params.z);
    m1 * r1.transpose() + m2 * r2.transpose() + e3 * r3.transpose()
}

/// Correlator-space action of a measurement along `m` with family
/// parameters (x, y, z):
///
/// ```text
/// A = m1 r1^T + m2 r2^T + e3 r3^T,
/// r1 = x m1 + (1-x) m2,
/// r2 = y (m1 - m2) + e3/sqrt(3),
/// r3 = z m1 + (sqrt(3)-z) m2,
/// ```
///
/// with m1, m2 the block embeddings of m and e3 the meter axis. At the
/// canonical point this reduces to m1 m1^T + m2 e3^T/sqrt(3) + sqrt(3) e3 m2^T,
/// which satisfies A^(2k) = A^2 and A^(2k+1) = A.
pub fn build_a(m: &MeasDirection, params: MeasParams) -> Mat7 {
    a_from_vector(&m.vector(), params)
}

fn s_from_a(a: &Mat7) -> Mat8 {
    let frame: [Vec7; 8] = std::array::from_fn(frame_triple);
    let images: [Vec7; 8] = std::array::from_fn(|i| a * frame[i]);
    Mat8::from_fn(|out, inp| 0.125 * (1.0 + 7.0 * frame[out].dot(&images[inp])))
}

/// The 8x8 quasi-bistochastic measurement process S[out|in]
/// = (1 + 7 n_out . A n_in)/8, rows and columns indexed by the
/// (meter, bit, bit') triple.
#[derive(Clone, Debug)]
pub struct MeasProcess {
    m: MeasDirection,
    params: MeasParams,
    s: Mat8,
}

impl MeasProcess {
    /// Build the process for direction `m` and family parameters `params`.
    pub fn new(m: &MeasDirection, params: MeasParams) -> Self {
        let s = s_from_a(&build_a(m, params));
        MeasProcess { m: *m, params, s }
    }

    /// The canonical process for direction `m`.
    pub fn canonical(m: &MeasDirection) -> Self {
        Self::new(m, MeasParams::CANONICAL)
    }

    /// Measurement direction.
    pub fn direction(&self) -> &MeasDirection {
        &self.m
    }

    /// Family parameters.
    pub fn params(&self) -> MeasParams {
        self.params
    }

    /// The process matrix.
    pub fn matrix(&self) -> &Mat8 {
        &self.s
    }

    /// Single transition entry S[out|in].
    pub fn entry(&self, out: usize, inp: usize) -> f64 {
        self.s[(out, inp)]
    }

    /// Smallest entry; below -1e-12 for every unit direction.
    pub fn min_entry(&self) -> f64 {
        self.s.min()
    }

    /// Apply to a raw distribution vector.
    pub fn apply_raw(&self, p: &Vec8) -> Vec8 {
        self.s * p
    }
}

/// A physical (nonnegative, normalized) distribution of the qubit-meter
/// register, indexed (meter, bit, bit') big-endian with +1 first.
#[derive(Clone, Debug)]
pub struct QubitMeterState {
    p: Vec8,
}

impl QubitMeterState {
    /// Validate positivity (floor -1e-12) and normalization, then wrap.
    pub fn new(p: Vec8) -> Result<Self> {
        let min = p.min();
        if min < tol::NEGATIVE_FLOOR {
            return Err(Error::NegativeEntries {
                min_entry: min,
                context: format!("register distribution {:?}", p.as_slice()),
            });
        }
        let sum = p.sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol::INPUT {
            return Err(Error::NotNormalized { sum });
        }
        Ok(QubitMeterState { p })
    }

    /// Product state: the given qubit distribution with the meter pinned
    /// to `meter`.
    pub fn from_parts(qubit: &SicDist, meter: Sign) -> Result<Self> {
        let min = qubit.min_entry();
        if min < tol::NEGATIVE_FLOOR {
            return Err(Error::NegativeEntries {
                min_entry: min,
                context: "qubit distribution attached to a register".into(),
            });
        }
        let mut p = Vec8::zeros();
        for pair in 0..4 {
            p[triple_index(meter, pair)] = qubit.get(pair);
        }
        Ok(QubitMeterState { p })
    }

    /// The standard pre-measurement state: qubit with Bloch vector `s`,
    /// meter pinned to +1.
    pub fn initial(s: &BlochVec) -> Self {
        Self::from_parts(&sic::sic_from_bloch(s), Sign::Plus)
            .expect("frame distribution of a physical state is nonnegative")
    }

    /// Entry by triple index.
    pub fn get(&self, index: usize) -> f64 {
        self.p[index]
    }

    /// The raw 8-vector.
    pub fn vector(&self) -> &Vec8 {
        &self.p
    }

    /// Qubit marginal (meter summed out).
    pub fn qubit_marginal(&self) -> SicDist {
        let q = Vector4::from_fn(|pair, _| {
            self.p[triple_index(Sign::Plus, pair)] + self.p[triple_index(Sign::Minus, pair)]
        });
        SicDist::new(q).expect("marginal of a normalized distribution is normalized")
    }

    /// Expectation of the meter sign.
    pub fn meter_expectation(&self) -> f64 {
        (0..8).map(|i| triple_signs(i).0 * self.p[i]).sum()
    }

    /// Probability of meter value `beta`.
    pub fn meter_probability(&self, beta: Sign) -> f64 {
        (0..4).map(|pair| self.p[triple_index(beta, pair)]).sum()
    }

    /// Qubit distribution conditioned on meter value `beta`.
    pub fn conditional_qubit(&self, beta: Sign) -> Result<SicDist> {
        let p_beta = self.meter_probability(beta);
        if p_beta <= tol::ENTRY {
            return Err(Error::ZeroProbabilityOutcome {
                outcome: beta.to_string(),
                probability: p_beta,
            });
        }
        let q = Vector4::from_fn(|pair, _| self.p[triple_index(beta, pair)] / p_beta);
        Ok(SicDist::new(q).expect("conditional distribution is normalized by construction"))
    }

    /// View as a generic 3-bit distribution.
    pub fn to_dist(&self) -> BitDist {
        BitDist::new(3, DVector::from_row_slice(self.p.as_slice()))
            .expect("register state is a valid 3-bit distribution")
    }

    /// Generalized Bloch vector of the register distribution.
    pub fn gbv(&self) -> Gbv {
        gbv::gbv_from_dist(&self.to_dist())
    }
}

/// Result of one guarded application of a measurement process.
#[derive(Clone, Debug)]
pub struct MeasureOutcome {
    /// Post-measurement register state (dust in [-1e-12, 0) clamped).
    pub state: QubitMeterState,
    /// Probability of meter outcome +1.
    pub p_plus: f64,
    /// Probability of meter outcome -1.
    pub p_minus: f64,
    /// Smallest raw output entry before clamping.
    pub min_entry_raw: f64,
    /// Number of entries clamped to zero.
    pub clamped_entries: usize,
}

impl MeasureOutcome {
    /// Probability of meter outcome `beta`.
    pub fn outcome_probability(&self, beta: Sign) -> f64 {
        match beta {
            Sign::Plus => self.p_plus,
            Sign::Minus => self.p_minus,
        }
    }

    /// Post-measurement qubit distribution given outcome `beta`.
    pub fn conditional_qubit(&self, beta: Sign) -> Result<SicDist> {
        self.state.conditional_qubit(beta)
    }
}

/// Apply a measurement process once to a deterministic-meter state.
///
/// The output distribution must stay nonnegative (floor -1e-12) or the
/// call fails with a diagnostic dump; double-precision dust in
/// [-1e-12, 0) is clamped to zero and counted. A meter with
/// |expectation| != 1 is rejected: the contract covers sharp pointers
/// only.
pub fn measure_once(state: &QubitMeterState, process: &MeasProcess) -> Result<MeasureOutcome> {
    let meter = state.meter_expectation();
    if (meter.abs() - 1.0).abs() > tol::INPUT {
        return Err(Error::NoisyMeter { expectation: meter });
    }
    let raw = process.apply_raw(state.vector());
    let min_entry_raw = raw.min();
    if min_entry_raw < tol::NEGATIVE_FLOOR {
        return Err(Error::NegativeEntries {
            min_entry: min_entry_raw,
            context: format!(
                "measurement output for direction {:?}, params {:?}, input {:?}, output {:?}",
                process.direction().vector().as_slice(),
                process.params(),
                state.vector().as_slice(),
                raw.as_slice(),
            ),
        });
    }
    let mut p = raw;
    let mut clamped_entries = 0;
    for e in p.iter_mut() {
        if *e < 0.0 {
            *e = 0.0;
            clamped_entries += 1;
        }
    }
    let state = QubitMeterState { p };
    let p_plus = state.meter_probability(Sign::Plus);
    let p_minus = state.meter_probability(Sign::Minus);
    Ok(MeasureOutcome {
        state,
        p_plus,
        p_minus,
        min_entry_raw,
        clamped_entries,
    })
}

/// Meter treatment between successive applications.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeterHandling {
    /// Leave the register as the process produced it (default; matches
    /// the correlator-power analysis).
    Keep,
    /// Re-pin the meter to +1 before each application after the first.
    Reset,
}

/// Per-step positivity telemetry of an unguarded run.
#[derive(Clone, Copy, Debug)]
pub struct StepTelemetry {
    /// 1-based application number.
    pub step: usize,
    /// Smallest entry right after this application, before clamping.
    pub min_entry: f64,
    /// Entries clamped from [-1e-12, 0) to zero.
    pub clamped_entries: usize,
}

/// Final distribution and telemetry of a repeated or chained run. The
/// run never fails: genuine negative entries are reported through the
/// telemetry and left in place, so the final distribution may be a
/// quasi-distribution.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Register distribution after the last step.
    pub final_dist: BitDist,
    /// One record per application.
    pub steps: Vec<StepTelemetry>,
}

impl RunOutcome {
    /// True when no step dipped below the -1e-12 floor.
    pub fn all_nonnegative(&self) -> bool {
        self.steps.iter().all(|t| t.min_entry >= tol::NEGATIVE_FLOOR)
    }

    /// Most negative entry seen across all steps.
    pub fn worst_min_entry(&self) -> f64 {
        self.steps
            .iter()
            .map(|t| t.min_entry)
            .fold(f64::INFINITY, f64::min)
    }

    /// Final state as a validated physical distribution.
    pub fn final_state(&self) -> Result<QubitMeterState> {
        QubitMeterState::new(Vec8::from_iterator(self.final_dist.vector().iter().cloned()))
    }

    /// Qubit marginal of the final distribution.
    pub fn qubit_marginal(&self) -> SicDist {
        let q = Vector4::from_fn(|pair, _| {
            self.final_dist.get(pair) + self.final_dist.get(4 + pair)
        });
        SicDist::new(q).expect("marginal of a normalized distribution is normalized")
    }

    /// Probability of meter value `beta` in the final distribution.
    pub fn meter_probability(&self, beta: Sign) -> f64 {
        (0..4)
            .map(|pair| self.final_dist.get(triple_index(beta, pair)))
            .sum()
    }
}

fn reset_meter(p: &Vec8) -> Vec8 {
    let mut out = Vec8::zeros();
    for pair in 0..4 {
        out[triple_index(Sign::Plus, pair)] =
            p[triple_index(Sign::Plus, pair)] + p[triple_index(Sign::Minus, pair)];
    }
    out
}

fn run_steps<'a>(
    state: &QubitMeterState,
    processes: impl Iterator<Item = &'a MeasProcess>,
    handling: MeterHandling,
) -> RunOutcome {
    let mut p = *state.vector();
    let mut steps = Vec::new();
    for (i, process) in processes.enumerate() {
        if i > 0 && handling == MeterHandling::Reset {
            p = reset_meter(&p);
        }
        p = process.apply_raw(&p);
        let min_entry = p.min();
        let mut clamped_entries = 0;
        for e in p.iter_mut() {
            if *e < 0.0 && *e >= tol::NEGATIVE_FLOOR {
                *e = 0.0;
                clamped_entries += 1;
            }
        }
        steps.push(StepTelemetry {
            step: i + 1,
            min_entry,
            clamped_entries,
        });
    }
    RunOutcome {
        final_dist: BitDist::new(3, DVector::from_row_slice(p.as_slice()))
            .expect("process preserves normalization"),
        steps,
    }
}

/// Apply the same process `k` times, recording per-step positivity.
/// With canonical parameters and [`MeterHandling::Keep`] the output
/// alternates between the single-shot and double-shot closed forms.
pub fn measure_repeat(
    state: &QubitMeterState,
    process: &MeasProcess,
    k: usize,
    handling: MeterHandling,
) -> RunOutcome {
    run_steps(state, std::iter::repeat_n(process, k), handling)
}

/// Apply canonical processes for a sequence of directions, recording
/// per-step positivity.
pub fn measure_chain(
    state: &QubitMeterState,
    directions: &[MeasDirection],
    handling: MeterHandling,
) -> RunOutcome {
    let processes: Vec<MeasProcess> = directions.iter().map(MeasProcess::canonical).collect();
    run_steps(state, processes.iter(), handling)
}

/// Largest absolute value, over all sign and frame-index assignments, of
/// the term separating a family member from the canonical process:
///
/// ```text
/// [3(x + (1-x)a + by(1-a)) - sqrt(3) a (z + (sqrt(3)-z)a)] (m.n_in)(m.n_out)
/// ```
///
/// with a, b the input/output meter signs. Zero exactly at the canonical
/// parameters; the a = +1 bracket vanishes identically, which is why a
/// single application cannot distinguish family members.
pub fn uniqueness_residual(params: MeasParams, m: &MeasDirection) -> f64 {
    let overlaps: [f64; 4] = std::array::from_fn(|i| m.vector().dot(&sic::tetra_vector(i)));
    let mut worst = 0.0f64;
    for alpha in [1.0, -1.0] {
        for beta in [1.0, -1.0] {
            let bracket = 3.0 * (params.x + (1.0 - params.x) * alpha + beta * params.y * (1.0 - alpha))
                - SQRT_3 * alpha * (params.z + (SQRT_3 - params.z) * alpha);
            for oa in overlaps {
                for ob in overlaps {
                    worst = worst.max((bracket * oa * ob).abs());
                }
            }
        }
    }
    worst
}

/// Result of sweeping [`uniqueness_residual`] over a cubic grid.
#[derive(Clone, Debug)]
pub struct UniquenessScan {
    /// Grid points whose residual fell at or below the zero tolerance.
    pub zeros: Vec<MeasParams>,
    /// Smallest residual strictly above the tolerance.
    pub min_nonzero_residual: f64,
    /// Points per axis actually used.
    pub points_per_axis: usize,
}

/// Sweep the parameter cube [lo, hi]^3 with `points_per_axis` samples per
/// axis and classify each point by its uniqueness residual.
pub fn uniqueness_grid_scan(
    m: &MeasDirection,
    lo: f64,
    hi: f64,
    points_per_axis: usize,
    zero_tol: f64,
) -> UniquenessScan {
    let coord = |i: usize| {
        if points_per_axis < 2 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (points_per_axis - 1) as f64
        }
    };
    let mut zeros = Vec::new();
    let mut min_nonzero_residual = f64::INFINITY;
    for ix in 0..points_per_axis {
        for iy in 0..points_per_axis {
            for iz in 0..points_per_axis {
                let params = MeasParams::new(coord(ix), coord(iy), coord(iz));
                let residual = uniqueness_residual(params, m);
                if residual <= zero_tol {
                    zeros.push(params);
                } else {
                    min_nonzero_residual = min_nonzero_residual.min(residual);
                }
            }
        }
    }
    UniquenessScan {
        zeros,
        min_nonzero_residual,
        points_per_axis,
    }
}

/// Verdict of the scaled-direction positivity scan.
#[derive(Clone, Copy, Debug)]
pub struct NecessityVerdict {
    /// Direction length used.
    pub scale: f64,
    /// Number of grid directions examined.
    pub directions: usize,
    /// Smallest process entry over the whole grid.
    pub min_entry: f64,
    /// Largest, over directions, of each direction's smallest entry.
    pub max_direction_min: f64,
}

impl NecessityVerdict {
    /// All entries nonnegative (floor -1e-12) for every direction.
    pub fn nonnegative_everywhere(&self) -> bool {
        self.min_entry >= tol::NEGATIVE_FLOOR
    }

    /// Every single direction produced at least one negative entry.
    pub fn negative_for_every_direction(&self) -> bool {
        self.max_direction_min < tol::NEGATIVE_FLOOR
    }
}

/// Build the canonical process with the direction shrunk to length
/// `scale` and report entry positivity over a deterministic direction
/// grid. Nonnegativity holds whenever scale <= 1/3; at scale 1 every
/// direction yields a negative entry, which is why a genuine (unit
/// length) measurement direction forces quasi-probabilities.
pub fn positivity_necessity_check(scale: f64, directions: usize) -> Result<NecessityVerdict> {
    if !scale.is_finite() || scale < 0.0 {
        return Err(Error::InvalidScale { scale });
    }
    let mut min_entry = f64::INFINITY;
    let mut max_direction_min = f64::NEG_INFINITY;
    for dir in crate::sampling::direction_grid(directions) {
        let s = s_from_a(&a_from_vector(&(dir.vector() * scale), MeasParams::CANONICAL));
        let dir_min = s.min();
        min_entry = min_entry.min(dir_min);
        max_direction_min = max_direction_min.max(dir_min);
    }
    Ok(NecessityVerdict {
        scale,
        directions,
        min_entry,
        max_direction_min,
    })
}

/// Fully positive stochastic comparator: with probability r1 / r2 / r3
/// the meter bit is overwritten by the first qubit bit / the second /
/// their product, and the qubit bits pass through untouched.
///
/// The reachable meter expectations are convex combinations
/// r1 <a> + r2 <a'> + r3 <aa'>, i.e. (r1 s_x + r2 s_y + r3 s_z)/sqrt(3);
/// a projective measurement would need weights (m_x, m_y, m_z), which sum
/// their squares to 1 rather than themselves, so no weight choice
/// reproduces it except along the coordinate axes.
pub fn classical_convex_process(r1: f64, r2: f64, r3: f64) -> Result<Mat8> {
    let sum = r1 + r2 + r3;
    let min = r1.min(r2).min(r3);
    if !sum.is_finite() || (sum - 1.0).abs() > tol::INPUT || min < 0.0 {
        return Err(Error::InvalidMixture { sum, min });
    }
    Ok(Mat8::from_fn(|out, inp| {
        let (alpha, b, bp) = triple_signs(out);
        let (_, a, ap) = triple_signs(inp);
        if b != a || bp != ap {
            return 0.0;
        }
        r1 * 0.5 * (1.0 + a * alpha) + r2 * 0.5 * (1.0 + ap * alpha) + r3 * 0.5 * (1.0 + a * ap * alpha)
    }))
}

fn four_bit_sign(index: usize, position: usize) -> f64 {
    1.0 - 2.0 * ((index >> (3 - position)) & 1) as f64
}

/// Initial state of the two-meter comparator: qubit bits distributed as
/// `qubit`, both meter bits pinned to +1. Indexed (a, a', meter, meter')
/// big-endian.
pub fn two_meter_initial(qubit: &SicDist) -> BitDist {
    let mut p = DVector::zeros(16);
    for pair in 0..4 {
        p[pair << 2] = qubit.get(pair);
    }
    BitDist::new(4, p).expect("product of normalized distributions is normalized")
}

/// Positive bistochastic comparator with two meter bits: each meter
/// copies the sign of its own qubit bit,
/// p_out(a, a', meter, meter') = q(a, a') (1 + a meter)(1 + a' meter')/4.
///
/// No collapse happens: the qubit marginal passes through unchanged, and
/// the meters read out the full frame statistics of the qubit. Both
/// meters must arrive pinned to +1.
pub fn two_meter_copy(state: &BitDist) -> Result<BitDist> {
    if state.n_bits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            got: state.vector().len(),
        });
    }
    for position in [2, 3] {
        let expectation: f64 = (0..16)
            .map(|i| four_bit_sign(i, position) * state.get(i))
            .sum();
        if (expectation - 1.0).abs() > tol::INPUT {
            return Err(Error::NoisyMeter { expectation });
        }
    }
    // Qubit marginal over both meters.
    let mut q = [0.0f64; 4];
    for i in 0..16 {
        q[i >> 2] += state.get(i);
    }
    let p = DVector::from_fn(16, |i, _| {
        let a = four_bit_sign(i, 0);
        let ap = four_bit_sign(i, 1);
        let alpha = four_bit_sign(i, 2);
        let alphap = four_bit_sign(i, 3);
        q[i >> 2] * 0.25 * (1.0 + a * alpha) * (1.0 + ap * alphap)
    });
    Ok(BitDist::new(4, p).expect("copy process preserves normalization"))
}

/// Joint outcome of a measurement followed by observer copies.
#[derive(Clone, Debug)]
pub struct BroadcastOutcome {
    joint: BitDist,
    n_observers: usize,
    measurement: MeasureOutcome,
}

impl BroadcastOutcome {
    /// Joint distribution over (meter, bit, bit', observer_1..observer_M),
    /// big-endian.
    pub fn joint(&self) -> &BitDist {
        &self.joint
    }

    /// Number of observer bits attached.
    pub fn n_observers(&self) -> usize {
        self.n_observers
    }

    /// The underlying single-measurement outcome.
    pub fn measurement(&self) -> &MeasureOutcome {
        &self.measurement
    }

    /// Correlation between observer `i` (1-based) and the meter sign;
    /// 1 for a perfect copy.
    pub fn observer_outcome_correlation(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.n_observers {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.n_observers,
            });
        }
        let obs_bits = self.n_observers;
        let mut corr = 0.0;
        for idx in 0..self.joint.vector().len() {
            let triple = idx >> obs_bits;
            let beta = triple_signs(triple).0;
            let gamma = 1.0 - 2.0 * ((idx >> (obs_bits - i)) & 1) as f64;
            corr += beta * gamma * self.joint.get(idx);
        }
        Ok(corr)
    }

    /// Marginal over all observer bits; equals the plain measurement
    /// output.
    pub fn qubit_meter_marginal(&self) -> BitDist {
        let obs_bits = self.n_observers;
        let mut p = DVector::zeros(8);
        for idx in 0..self.joint.vector().len() {
            p[idx >> obs_bits] += self.joint.get(idx);
        }
        BitDist::new(3, p).expect("marginal of a normalized distribution is normalized")
    }
}

/// Measure once, then couple `observers` fresh +1-pinned bits to the
/// outcome through the copy kernel (1 + observer * meter)/2 each. Every
/// observer bit ends perfectly correlated with the meter, and discarding
/// the observers recovers the plain measurement output: readout can be
/// duplicated to any audience without touching the qubit.
pub fn broadcast(
    state: &QubitMeterState,
    process: &MeasProcess,
    observers: usize,
) -> Result<BroadcastOutcome> {
    gbv::outcome_count(3 + observers)?;
    let measurement = measure_once(state, process)?;
    let obs_count = 1usize << observers;
    let mut joint = DVector::zeros(8 * obs_count);
    for triple in 0..8 {
        let beta = triple_signs(triple).0;
        for g in 0..obs_count {
            let mut weight = 1.0;
            for i in 0..observers {
                let gamma = 1.0 - 2.0 * ((g >> (observers - 1 - i)) & 1) as f64;
                weight *= 0.5 * (1.0 + gamma * beta);
            }
            joint[(triple << observers) | g] = measurement.state.get(triple) * weight;
        }
    }
    Ok(BroadcastOutcome {
        joint: BitDist::new(3 + observers, joint)
            .expect("observer coupling preserves normalization"),
        n_observers: observers,
        measurement,
    })
}

/// Discard the meter: the induced 4x4 map on qubit frame distributions,
/// V[out_pair|in_pair] = sum over output meter of S[.|+1, in_pair].
///
/// For the canonical process this equals the projective-update channel
/// [`sic::luders_channel`]: singular, idempotent, collapsing every Bloch
/// vector onto the measurement axis.
pub fn marginalize_to_luders(process: &MeasProcess) -> QuasiStochMat {
    let v = Matrix4::from_fn(|out_pair, in_pair| {
        Sign::BOTH
            .iter()
            .map(|&beta| process.entry(triple_index(beta, out_pair), in_pair))
            .sum()
    });
    QuasiStochMat::new(v).expect("column sums inherited from the process")
}

/// Verdict on whether a target meter expectation is reachable by the
/// positive single-meter comparator.
#[derive(Clone, Copy, Debug)]
pub struct RealizabilityVerdict {
    /// Requested meter expectation.
    pub target: f64,
    /// Attainable bound: 1/sqrt(3).
    pub bound: f64,
    /// Whether |target| <= bound.
    pub realizable: bool,
}

/// The positive copy of a single qubit bit can only move the meter
/// expectation within [-1/sqrt(3), 1/sqrt(3)]: a frame bit of a physical
/// qubit has |expectation| = |s_component|/sqrt(3) <= 1/sqrt(3). A
/// deterministic pointer (expectation 1) therefore lies outside
/// the reachable set: the meter cannot be prepared by classical copying.
pub fn meter_realizability_check(target: f64) -> RealizabilityVerdict {
    let bound = SQRT_3.recip();
    RealizabilityVerdict {
        target,
        bound,
        realizable: target.abs() <= bound + tol::ENTRY,
    }
}

/// Collision-entropy bookkeeping of one canonical measurement.
#[derive(Clone, Copy, Debug)]
pub struct EntropyDelta {
    /// Register collision entropy before the process, in bits.
    pub h2_before: f64,
    /// Register collision entropy after, in bits.
    pub h2_after: f64,
    /// after - before, computed from the actual distributions.
    pub delta: f64,
    /// Closed form -1 + log2[(3 + |s|^2)/(1 + (m.s)^2)].
    pub closed_form: f64,
}

/// Entropy change of the qubit-meter register under one canonical
/// measurement of the state with Bloch vector `s` along `m`.
///
/// The squared register lengths before and after give the closed form
/// -1 + log2[(3 + |s|^2)/(1 + (m.s)^2)]: zero for a pure state measured
/// along its own axis, exactly one bit for a pure state measured along
/// an orthogonal axis, and log2(3) - 1 at the maximally mixed point.
pub fn entropy_delta(s: &BlochVec, m: &MeasDirection) -> EntropyDelta {
    let initial = QubitMeterState::initial(s);
    let process = MeasProcess::canonical(m);
    let outcome = measure_once(&initial, &process)
        .expect("canonical measurement of a physical state stays nonnegative");
    let h2_before = gbv::collision_entropy(&initial.gbv());
    let h2_after = gbv::collision_entropy(&outcome.state.gbv());
    let overlap = m.dot_bloch(s);
    let closed_form = -1.0 + ((3.0 + s.norm_squared()) / (1.0 + overlap * overlap)).log2();
    EntropyDelta {
        h2_before,
        h2_after,
        delta: h2_after - h2_before,
        closed_form,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::sampling;
    use crate::types::pair_signs;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn mat_pow(a: &Mat7, k: usize) -> Mat7 {
        let mut out = Mat7::identity();
        for _ in 0..k {
            out *= a;
        }
        out
    }

    #[test]
    fn frame_triples_match_the_three_bit_frame() {
        for index in 0..8 {
            let triple = frame_triple(index);
            let generic = gbv::frame_vector(3, index).unwrap();
            for k in 0..7 {
                assert_abs_diff_eq!(triple[k], generic[k], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn initial_state_has_the_expected_correlators() {
        let s = BlochVec::new(0.3, -0.2, 0.5).unwrap();
        let state = QubitMeterState::initial(&s);
        assert_abs_diff_eq!(state.meter_expectation(), 1.0, epsilon = 1e-15);
        let w = state.gbv();
        let c = (7.0f64 / 3.0).sqrt();
        for k in 0..3 {
            assert_abs_diff_eq!(w.get(k), c * s.vector()[k], epsilon = 1e-13);
            assert_abs_diff_eq!(w.get(3 + k), c * s.vector()[k], epsilon = 1e-13);
        }
        assert_abs_diff_eq!(w.get(6), 7.0f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn canonical_a_alternates_between_two_register_forms() {
        let mut rng = sampling::rng_from_seed(41);
        for _ in 0..20 {
            let s = sampling::random_bloch(&mut rng);
            let m = sampling::random_direction(&mut rng);
            let a = build_a(&m, MeasParams::CANONICAL);
            let state = QubitMeterState::initial(&s);
            let w = Vec7::from_iterator(state.gbv().vector().iter().cloned());
            let sm = m.dot_bloch(&s);
            let c = (7.0f64 / 3.0).sqrt();

            let w1 = a * w;
            let expect1 = (qubit_block(&m.vector()) * sm + cross_block(&m.vector())) * c
                + meter_axis() * (7.0f64.sqrt() * sm);
            assert!((w1 - expect1).abs().max() < 1e-12);

            let w2 = a * w1;
            let expect2 = (qubit_block(&m.vector()) + cross_block(&m.vector())) * (c * sm)
                + meter_axis() * 7.0f64.sqrt();
            assert!((w2 - expect2).abs().max() < 1e-12);

            let w3 = a * w2;
            assert!((w3 - w1).abs().max() < 1e-12);
        }
    }

    #[test]
    fn canonical_a_powers_are_semi_cyclic() {
        let m = MeasDirection::new(0.6, 0.0, 0.8).unwrap();
        let a = build_a(&m, MeasParams::CANONICAL);
        let a2 = a * a;
        for k in 1..=6 {
            assert!((mat_pow(&a, 2 * k) - a2).abs().max() < 1e-12);
            assert!((mat_pow(&a, 2 * k + 1) - a).abs().max() < 1e-12);
        }
        // A^2 is the orthogonal projector onto the span of the two block
        // embeddings of m and the meter axis.
        let proj = qubit_block(&m.vector()) * qubit_block(&m.vector()).transpose()
            + cross_block(&m.vector()) * cross_block(&m.vector()).transpose()
            + meter_axis() * meter_axis().transpose();
        assert!((a2 - proj).abs().max() < 1e-13);
    }

    #[test]
    fn canonical_process_factorizes_entrywise() {
        let mut rng = sampling::rng_from_seed(42);
        for _ in 0..10 {
            let m = sampling::random_direction(&mut rng);
            let process = MeasProcess::canonical(&m);
            for out in 0..8 {
                for inp in 0..8 {
                    let (beta, b, bp) = triple_signs(out);
                    let (alpha, a, ap) = triple_signs(inp);
                    let n_out = m.vector().dot(&(Vector3::new(b, bp, b * bp) / SQRT_3));
                    let n_in = m.vector().dot(&(Vector3::new(a, ap, a * ap) / SQRT_3));
                    let expected =
                        0.125 * (1.0 + alpha * beta * n_out) * (1.0 + 3.0 * alpha * beta * n_in);
                    assert_abs_diff_eq!(process.entry(out, inp), expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn canonical_entry_at_all_plus_is_frozen() {
        let process = MeasProcess::canonical(&MeasDirection::z());
        let r3 = SQRT_3.recip();
        assert_abs_diff_eq!(
            process.entry(0, 0),
            0.125 * (1.0 + r3) * (1.0 + SQRT_3),
            epsilon = 1e-14
        );
    }

    #[test]
    fn family_process_matches_expanded_polynomial_form() {
        let mut rng = sampling::rng_from_seed(43);
        for _ in 0..10 {
            let m = sampling::random_direction(&mut rng);
            let params = MeasParams::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let process = MeasProcess::new(&m, params);
            for out in 0..8 {
                for inp in 0..8 {
                    let (beta, b, bp) = triple_signs(out);
                    let (alpha, a, ap) = triple_signs(inp);
                    let n_out = m.vector().dot(&(Vector3::new(b, bp, b * bp) / SQRT_3));
                    let n_in = m.vector().dot(&(Vector3::new(a, ap, a * ap) / SQRT_3));
                    let expected = 0.125
                        * (1.0
                            + SQRT_3 * beta * (params.z + (SQRT_3 - params.z) * alpha) * n_in
                            + alpha * beta * n_out
                            + 3.0
                                * (params.x
                                    + (1.0 - params.x) * alpha
                                    + beta * params.y * (1.0 - alpha))
                                * n_out
                                * n_in);
                    assert_abs_diff_eq!(process.entry(out, inp), expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn every_family_member_is_bistochastic() {
        let mut rng = sampling::rng_from_seed(44);
        for _ in 0..20 {
            let m = sampling::random_direction(&mut rng);
            let params = MeasParams::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let s = MeasProcess::new(&m, params);
            for i in 0..8 {
                assert_abs_diff_eq!(s.matrix().column(i).sum(), 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(s.matrix().row(i).sum(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn canonical_process_always_has_negative_entries() {
        let mut rng = sampling::rng_from_seed(45);
        assert!(MeasProcess::canonical(&MeasDirection::z()).min_entry() < -1e-12);
        for _ in 0..50 {
            let m = sampling::random_direction(&mut rng);
            assert!(MeasProcess::canonical(&m).min_entry() < -1e-12);
        }
    }

    #[test]
    fn process_induces_its_correlator_map_on_gbvs() {
        // The affine action extracted from S is exactly (A, 0).
        let m = MeasDirection::new(0.0, 0.8, -0.6).unwrap();
        let params = MeasParams::new(0.4, -1.1, 2.0);
        let process = MeasProcess::new(&m, params);
        let a = build_a(&m, params);
        let t = nalgebra::DMatrix::from_fn(8, 8, |r, c| process.entry(r, c));
        let map = gbv::affine_from_process(3, &t).unwrap();
        for j in 0..7 {
            for k in 0..7 {
                assert_abs_diff_eq!(map.linear()[(j, k)], a[(j, k)], epsilon = 1e-12);
            }
        }
        assert!(map.offset().abs().max() < 1e-12);
    }

    #[test]
    fn measurement_statistics_match_the_born_rule() {
        let mut rng = sampling::rng_from_seed(46);
        for _ in 0..50 {
            let s = sampling::random_bloch(&mut rng);
            let m = sampling::random_direction(&mut rng);
            let outcome =
                measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m)).unwrap();
            let overlap = m.dot_bloch(&s);
            assert_abs_diff_eq!(outcome.p_plus, 0.5 * (1.0 + overlap), epsilon = 1e-12);
            assert_abs_diff_eq!(outcome.p_minus, 0.5 * (1.0 - overlap), epsilon = 1e-12);
            let rho = oracle::density_from_bloch(&s);
            assert_abs_diff_eq!(
                outcome.p_plus,
                oracle::born_probability(&rho, &m, Sign::Plus),
                epsilon = 1e-12
            );
            // Full output distribution: (1 + beta m.n)(1 + beta m.s)/8.
            for idx in 0..8 {
                let (beta, b, bp) = triple_signs(idx);
                let n_out = m.vector().dot(&(Vector3::new(b, bp, b * bp) / SQRT_3));
                let expected = 0.125 * (1.0 + beta * n_out) * (1.0 + beta * overlap);
                assert_abs_diff_eq!(outcome.state.get(idx), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn collapse_lands_on_the_outcome_axis() {
        let mut rng = sampling::rng_from_seed(47);
        for _ in 0..50 {
            let s = sampling::random_bloch(&mut rng);
            let m = sampling::random_direction(&mut rng);
            let outcome =
                measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m)).unwrap();
            for beta in Sign::BOTH {
                if outcome.outcome_probability(beta) <= tol::ENTRY {
                    continue;
                }
                let conditional = outcome.conditional_qubit(beta).unwrap();
                let collapsed = BlochVec::from_vector(m.vector() * beta.value()).unwrap();
                let expected = sic::sic_from_bloch(&collapsed);
                for pair in 0..4 {
                    assert_abs_diff_eq!(
                        conditional.get(pair),
                        expected.get(pair),
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let m = MeasDirection::new(0.0, 1.0, 0.0).unwrap();
        let s = BlochVec::new(0.0, 1.0, 0.0).unwrap();
        let outcome = measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m)).unwrap();
        assert_abs_diff_eq!(outcome.p_plus, 1.0, epsilon = 1e-12);
        assert!(matches!(
            outcome.conditional_qubit(Sign::Minus),
            Err(Error::ZeroProbabilityOutcome { .. })
        ));
    }

    #[test]
    fn orthogonal_measurement_splits_evenly() {
        // Measuring x on the +z eigenstate: both outcomes at 1/2, collapse
        // to the positive/negative x axis.
        let s = BlochVec::new(0.0, 0.0, 1.0).unwrap();
        let m = MeasDirection::x();
        let outcome = measure_once(&QubitMeterState::initial(&s), &MeasProcess::canonical(&m)).unwrap();
        assert_abs_diff_eq!(outcome.p_plus, 0.5, epsilon = 1e-12);
        for beta in Sign::BOTH {
            let bloch = sic::bloch_from_sic(&outcome.conditional_qubit(beta).unwrap()).unwrap();
            assert_abs_diff_eq!(bloch.vector()[0], beta.value(), epsilon = 1e-12);
            assert_abs_diff_eq!(bloch.vector()[1], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(bloch.vector()[2], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn noisy_meter_is_rejected() {
        let mut p = Vec8::zeros();
        // Uniform meter attached to the maximally mixed qubit.
        for i in 0..8 {
            p[i] = 0.125;
        }
        let state = QubitMeterState::new(p).unwrap();
        let err = measure_once(&state, &MeasProcess::canonical(&MeasDirection::z()));
        assert!(matches!(err, Err(Error::NoisyMeter { .. })));
    }

    #[test]
    fn second_application_reaches_the_fixed_form() {
        let mut rng = sampling::rng_from_seed(48);
        for _ in 0..20 {
            let s = sampling::random_bloch(&mut rng);
            let m = sampling::random_direction(&mut rng);
            let process = MeasProcess::canonical(&m);
            let run = measure_repeat(&QubitMeterState::initial(&s), &process, 2, MeterHandling::Keep);
            assert!(run.all_nonnegative());
            let sm = m.dot_bloch(&s);
            for idx in 0..8 {
                let (beta, b, bp) = triple_signs(idx);
                let n_out = m.vector().dot(&(Vector3::new(b, bp, b * bp) / SQRT_3));
                let expected = 0.125 * (1.0 + sm * n_out) * (1.0 + beta);
                assert_abs_diff_eq!(run.final_dist.get(idx), expected, epsilon = 1e-12);
            }
            // Odd counts return to the single-shot output.
            let run1 = measure_repeat(&QubitMeterState::initial(&s), &process, 1, MeterHandling::Keep);
            let run3 = measure_repeat(&QubitMeterState::initial(&s), &process, 3, MeterHandling::Keep);
            for idx in 0..8 {
                assert_abs_diff_eq!(
                    run3.final_dist.get(idx),
                    run1.final_dist.get(idx),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn meter_reset_repeats_the_born_statistics() {
        let s = BlochVec::new(0.3, 0.1, 0.7).unwrap();
        let m = MeasDirection::z();
        let process = MeasProcess::canonical(&m);
        let run = measure_repeat(&QubitMeterState::initial(&s), &process, 2, MeterHandling::Reset);
        assert!(run.all_nonnegative());
        // After the first shot the qubit sits at (m.s) m, so the second
        // shot shows the same outcome probabilities.
        let sm = m.dot_bloch(&s);
        assert_abs_diff_eq!(run.meter_probability(Sign::Plus), 0.5 * (1.0 + sm), epsilon = 1e-12);
        let bloch = sic::bloch_from_sic(&run.qubit_marginal()).unwrap();
        let expected = m.vector() * sm;
        assert!((bloch.vector() - expected).norm() < 1e-12);
    }

    #[test]
    fn noncanonical_repetition_reports_negativity() {
        let mut rng = sampling::rng_from_seed(49);
        let mut saw_negative = false;
        for _ in 0..20 {
            let s = sampling::random_pure_bloch(&mut rng);
            let m = sampling::random_direction(&mut rng);
            let params = MeasParams::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let run = measure_repeat(
                &QubitMeterState::initial(&s),
                &MeasProcess::new(&m, params),
                2,
                MeterHandling::Keep,
            );
            if !run.all_nonnegative() {
                saw_negative = true;
            }
        }
        assert!(saw_negative);
    }

    #[test]
    fn chain_of_equal_directions_is_repetition() {
        let s = BlochVec::new(0.2, -0.4, 0.1).unwrap();
        let m = MeasDirection::new(0.6, 0.8, 0.0).unwrap();
        let chain = measure_chain(&QubitMeterState::initial(&s), &[m, m], MeterHandling::Keep);
        let repeat = measure_repeat(
            &QubitMeterState::initial(&s),
            &MeasProcess::canonical(&m),
            2,
            MeterHandling::Keep,
        );
        for idx in 0..8 {
            assert_abs_diff_eq!(
                chain.final_dist.get(idx),
                repeat.final_dist.get(idx),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn orthogonal_chain_erases_the_first_outcome() {
        let s = BlochVec::new(0.0, 0.0, 1.0).unwrap();
        let chain = measure_chain(
            &QubitMeterState::initial(&s),
            &[MeasDirection::z(), MeasDirection::x()],
            MeterHandling::Keep,
        );
        assert!(chain.all_nonnegative());
        assert_abs_diff_eq!(chain.meter_probability(Sign::Plus), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn chains_stay_nonnegative_and_track_sequential_collapse() {
        let mut rng = sampling::rng_from_seed(50);
        for _ in 0..10 {
            let s = sampling::random_bloch(&mut rng);
            let dirs: Vec<MeasDirection> =
                (0..8).map(|_| sampling::random_direction(&mut rng)).collect();
            let run = measure_chain(&QubitMeterState::initial(&s), &dirs, MeterHandling::Keep);
            assert!(run.all_nonnegative());
            // Outcome-averaged collapse: s_k = (s_{k-1}.m_k) m_k.
            let mut expected = s.vector();
            for m in &dirs {
                expected = m.vector() * m.vector().dot(&expected);
            }
            let bloch = sic::bloch_from_sic(&run.qubit_marginal()).unwrap();
            assert!((bloch.vector() - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn uniqueness_residual_vanishes_only_at_the_canonical_point() {
        let mut rng = sampling::rng_from_seed(51);
        for _ in 0..20 {
            let m = sampling::random_direction(&mut rng);
            assert!(uniqueness_residual(MeasParams::CANONICAL, &m) < 1e-14);
        }
        // Frozen value: at (0,0,0) with m = z the bracket at input sign -1
        // is -6 and the largest overlap product is 1/3.
        let residual = uniqueness_residual(MeasParams::new(0.0, 0.0, 0.0), &MeasDirection::z());
        assert_abs_diff_eq!(residual, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn uniqueness_grid_scan_finds_one_zero() {
        let scan = uniqueness_grid_scan(&MeasDirection::z(), -2.0, 2.0, 5, 1e-9);
        assert_eq!(scan.zeros.len(), 1);
        let z = scan.zeros[0];
        assert_abs_diff_eq!(z.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z.z, 0.0, epsilon = 1e-12);
        assert!(scan.min_nonzero_residual > 1e-3);
    }

    #[test]
    fn scaled_directions_locate_the_positivity_boundary() {
        let third = positivity_necessity_check(1.0 / 3.0, 200).unwrap();
        assert!(third.nonnegative_everywhere());
        let unit = positivity_necessity_check(1.0, 200).unwrap();
        assert!(unit.negative_for_every_direction());
        let zero = positivity_necessity_check(0.0, 10).unwrap();
        assert_abs_diff_eq!(zero.min_entry, 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(zero.max_direction_min, 0.125, epsilon = 1e-15);
        assert!(matches!(
            positivity_necessity_check(-0.5, 10),
            Err(Error::InvalidScale { .. })
        ));
    }

    #[test]
    fn convex_comparator_is_stochastic_and_reads_frame_components() {
        let mut rng = sampling::rng_from_seed(52);
        assert!(matches!(
            classical_convex_process(0.5, 0.6, -0.1),
            Err(Error::InvalidMixture { .. })
        ));
        assert!(matches!(
            classical_convex_process(0.5, 0.2, 0.2),
            Err(Error::InvalidMixture { .. })
        ));
        for weights in [
            (1.0, 0.0, 0.0),
            (0.0, 1.0, 0.0),
            (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
            (0.2, 0.5, 0.3),
        ] {
            let t = classical_convex_process(weights.0, weights.1, weights.2).unwrap();
            assert!(t.min() >= 0.0);
            for col in 0..8 {
                assert_abs_diff_eq!(t.column(col).sum(), 1.0, epsilon = 1e-12);
            }
            for _ in 0..5 {
                let s = sampling::random_bloch(&mut rng);
                let state = QubitMeterState::initial(&s);
                let out = QubitMeterState::new(t * state.vector()).unwrap();
                let expected = (weights.0 * s.vector()[0]
                    + weights.1 * s.vector()[1]
                    + weights.2 * s.vector()[2])
                    / SQRT_3;
                assert_abs_diff_eq!(out.meter_expectation(), expected, epsilon = 1e-12);
                // Qubit bits pass through untouched.
                let before = state.qubit_marginal();
                let after = out.qubit_marginal();
                for pair in 0..4 {
                    assert_abs_diff_eq!(after.get(pair), before.get(pair), epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn two_meter_copy_reads_out_without_collapse() {
        let mut rng = sampling::rng_from_seed(53);
        for _ in 0..20 {
            let s = sampling::random_bloch(&mut rng);
            let qubit = sic::sic_from_bloch(&s);
            let out = two_meter_copy(&two_meter_initial(&qubit)).unwrap();
            assert!(out.min_entry() >= 0.0);
            // Qubit marginal unchanged, entrywise.
            for pair in 0..4 {
                let marg: f64 = (0..4).map(|g| out.get((pair << 2) | g)).sum();
                assert_abs_diff_eq!(marg, qubit.get(pair), epsilon = 1e-14);
            }
            // Each meter copies its own bit's expectation.
            let expect_a: f64 = (0..16).map(|i| four_bit_sign(i, 0) * out.get(i)).sum();
            let expect_alpha: f64 = (0..16).map(|i| four_bit_sign(i, 2) * out.get(i)).sum();
            assert_abs_diff_eq!(expect_alpha, expect_a, epsilon = 1e-13);
            assert_abs_diff_eq!(expect_a, s.vector()[0] / SQRT_3, epsilon = 1e-13);
        }
        // Frozen corner: s on the first tetrahedral axis, where
        // <meter> = s_x/sqrt(3) = (1/sqrt(3))/sqrt(3) = 1/3.
        let s = BlochVec::from_vector(sic::tetra_vector(0)).unwrap();
        let out = two_meter_copy(&two_meter_initial(&sic::sic_from_bloch(&s))).unwrap();
        let expect_alpha: f64 = (0..16).map(|i| four_bit_sign(i, 2) * out.get(i)).sum();
        assert_abs_diff_eq!(expect_alpha, 1.0 / 3.0, epsilon = 1e-13);
        // Noisy meters are rejected.
        let bad = two_meter_copy(&out);
        assert!(matches!(bad, Err(Error::NoisyMeter { .. })));
    }

    #[test]
    fn broadcast_copies_the_outcome_to_every_observer() {
        let s = BlochVec::new(0.2, 0.3, -0.1).unwrap();
        let m = MeasDirection::new(0.0, 0.6, 0.8).unwrap();
        let process = MeasProcess::canonical(&m);
        let state = QubitMeterState::initial(&s);
        for observers in 0..=5 {
            let out = broadcast(&state, &process, observers).unwrap();
            assert!(out.joint().min_entry() >= 0.0);
            for i in 1..=observers {
                assert_abs_diff_eq!(
                    out.observer_outcome_correlation(i).unwrap(),
                    1.0,
                    epsilon = 1e-12
                );
            }
            let marginal = out.qubit_meter_marginal();
            for idx in 0..8 {
                assert_abs_diff_eq!(
                    marginal.get(idx),
                    out.measurement().state.get(idx),
                    epsilon = 1e-13
                );
            }
        }
        assert!(broadcast(&state, &process, 10).is_err());
    }

    #[test]
    fn broadcast_observers_agree_on_the_mixed_state() {
        let out = broadcast(
            &QubitMeterState::initial(&BlochVec::zero()),
            &MeasProcess::canonical(&MeasDirection::z()),
            2,
        )
        .unwrap();
        // p(gamma1 = gamma2 = beta) = 1 with p(beta) = 1/2 each.
        let mut agree = 0.0;
        for idx in 0..32 {
            let triple = idx >> 2;
            let beta = triple_signs(triple).0;
            let g1 = 1.0 - 2.0 * ((idx >> 1) & 1) as f64;
            let g2 = 1.0 - 2.0 * (idx & 1) as f64;
            if g1 == beta && g2 == beta {
                agree += out.joint().get(idx);
            }
        }
        assert_abs_diff_eq!(agree, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(out.measurement().p_plus, 0.5, epsilon = 1e-13);
    }

    #[test]
    fn discarding_the_meter_gives_the_projective_update_channel() {
        let mut rng = sampling::rng_from_seed(54);
        for _ in 0..20 {
            let m = sampling::random_direction(&mut rng);
            let v = marginalize_to_luders(&MeasProcess::canonical(&m));
            let reference = sic::luders_channel(&m);
            assert!((v.matrix() - reference.matrix()).abs().max() < 1e-12);
            // Idempotent and singular.
            assert!((v.compose(&v).matrix() - v.matrix()).abs().max() < 1e-12);
            assert!(v.matrix().determinant().abs() < 1e-12);
        }
        // The induced Bloch map is the rank-one projector onto m.
        let m = MeasDirection::new(0.8, 0.0, 0.6).unwrap();
        let v = marginalize_to_luders(&MeasProcess::canonical(&m));
        let t = nalgebra::DMatrix::from_fn(4, 4, |r, c| v.matrix()[(r, c)]);
        let map = gbv::affine_from_process(2, &t).unwrap();
        let outer = m.vector() * m.vector().transpose();
        for j in 0..3 {
            for k in 0..3 {
                assert_abs_diff_eq!(map.linear()[(j, k)], outer[(j, k)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_pointer_is_out_of_classical_reach() {
        assert!(!meter_realizability_check(1.0).realizable);
        assert!(meter_realizability_check(SQRT_3.recip()).realizable);
        assert!(meter_realizability_check(0.0).realizable);
        assert!(!meter_realizability_check(-0.9).realizable);
    }

    #[test]
    fn entropy_delta_matches_its_closed_form() {
        let mut rng = sampling::rng_from_seed(55);
        for _ in 0..100 {
            let s = sampling::random_bloch(&mut rng);
            let m = sampling::random_direction(&mut rng);
            let e = entropy_delta(&s, &m);
            assert_abs_diff_eq!(e.delta, e.closed_form, epsilon = 1e-12);
        }
    }

    #[test]
    fn entropy_delta_special_cases() {
        // Pure state measured along its own axis: no entropy change.
        let aligned = entropy_delta(
            &BlochVec::new(0.0, 0.0, 1.0).unwrap(),
            &MeasDirection::z(),
        );
        assert_abs_diff_eq!(aligned.delta, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(aligned.closed_form, 0.0, epsilon = 1e-12);

        // Pure state measured orthogonally: exactly one bit.
        let orthogonal = entropy_delta(
            &BlochVec::new(0.0, 0.0, 1.0).unwrap(),
            &MeasDirection::x(),
        );
        assert_abs_diff_eq!(orthogonal.delta, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(orthogonal.closed_form, 1.0, epsilon = 1e-12);

        // Maximally mixed: log2(3) - 1, from two bits down to log2(6).
        let mixed = entropy_delta(&BlochVec::zero(), &MeasDirection::y());
        assert_abs_diff_eq!(mixed.h2_before, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mixed.h2_after, 6.0f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(mixed.delta, 3.0f64.log2() - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mixed.closed_form, 3.0f64.log2() - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pair_sign_helpers_agree_with_the_tetrahedron() {
        for pair in 0..4 {
            let (a, ap) = pair_signs(pair);
            let n = sic::tetra_vector(pair);
            assert_abs_diff_eq!(n[0], a / SQRT_3, epsilon = 1e-15);
            assert_abs_diff_eq!(n[1], ap / SQRT_3, epsilon = 1e-15);
            assert_abs_diff_eq!(n[2], a * ap / SQRT_3, epsilon = 1e-15);
        }
    }
}
