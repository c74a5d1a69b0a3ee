//! Textbook density-matrix quantum mechanics for one and two qubits.
//!
//! This module is the reference implementation the rest of the crate is
//! validated against: states as complex density matrices, dynamics as
//! unitary conjugation, measurement as projector traces and collapse.
//! It deliberately shares no code with the frame-representation modules;
//! agreement between the two routes is established only in tests.
//!
//! Validation thresholds on construction:
//!
//! - Hermiticity and unit trace to 1e-12,
//! - eigenvalues >= -1e-10 (dust from arithmetic on physical inputs).

use nalgebra::{Matrix2, Matrix4, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{tol, BlochVec, ChshSettings, MeasDirection, Sign};

/// Eigenvalue floor accepted for density matrices.
const EIGENVALUE_FLOOR: f64 = -1e-10;

type C = Complex64;
type M2 = Matrix2<Complex64>;
type M4 = Matrix4<Complex64>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// 2x2 identity.
pub fn identity2() -> M2 {
    M2::identity()
}

/// Pauli X.
pub fn pauli_x() -> M2 {
    M2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Pauli Y.
pub fn pauli_y() -> M2 {
    M2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

/// Pauli Z.
pub fn pauli_z() -> M2 {
    M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// v . sigma for a real 3-vector v.
pub fn dot_sigma(v: &Vector3<f64>) -> M2 {
    pauli_x() * c(v.x, 0.0) + pauli_y() * c(v.y, 0.0) + pauli_z() * c(v.z, 0.0)
}

fn max_abs_entry2(m: &M2) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

fn max_abs_entry4(m: &M4) -> f64 {
    m.iter().map(|e| e.norm()).fold(0.0, f64::max)
}

fn check_hermitian2(m: &M2) -> Result<()> {
    let dev = max_abs_entry2(&(m - m.adjoint()));
    if dev > tol::ENTRY {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

fn check_hermitian4(m: &M4) -> Result<()> {
    let dev = max_abs_entry4(&(m - m.adjoint()));
    if dev > tol::ENTRY {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// A single-qubit density matrix: Hermitian, unit trace, positive
/// semidefinite (eigenvalues >= -1e-10).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMat(M2);

impl DensityMat {
    /// Validate and wrap a 2x2 matrix.
    pub fn new(m: M2) -> Result<Self> {
        check_hermitian2(&m)?;
        let trace = m.trace();
        if (trace.re - 1.0).abs() > tol::ENTRY || trace.im.abs() > tol::ENTRY {
            return Err(Error::NonUnitTrace { trace: trace.re });
        }
        // Hermitian 2x2 eigenvalues in closed form.
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let off = m[(0, 1)].norm_sqr();
        let half_gap = (0.25 * (a - d) * (a - d) + off).sqrt();
        let min_eig = 0.5 * (a + d) - half_gap;
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        Ok(DensityMat(m))
    }

    /// The maximally mixed state I/2.
    pub fn maximally_mixed() -> Self {
        DensityMat(identity2() * c(0.5, 0.0))
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &M2 {
        &self.0
    }

    /// Tr[rho^2]; 1 for pure states, 1/2 at the center of the ball.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// A two-qubit density matrix with the same invariants as [`DensityMat`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMat4(M4);

impl DensityMat4 {
    /// Validate and wrap a 4x4 matrix.
    pub fn new(m: M4) -> Result<Self> {
        check_hermitian4(&m)?;
        let trace = m.trace();
        if (trace.re - 1.0).abs() > tol::ENTRY || trace.im.abs() > tol::ENTRY {
            return Err(Error::NonUnitTrace { trace: trace.re });
        }
        let eig = m.symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        Ok(DensityMat4(m))
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &M4 {
        &self.0
    }
}

/// A 2x2 unitary, validated to U^dagger U = I within 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary2(M2);

impl Unitary2 {
    /// Validate and wrap a 2x2 matrix.
    pub fn new(m: M2) -> Result<Self> {
        let dev = max_abs_entry2(&(m.adjoint() * m - identity2()));
        if dev > tol::ENTRY {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Unitary2(m))
    }

    /// Identity gate.
    pub fn identity() -> Self {
        Unitary2(identity2())
    }

    /// The Hadamard gate.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Unitary2(M2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)))
    }

    /// Bit flip (Pauli X as a gate).
    pub fn pauli_x() -> Self {
        Unitary2(pauli_x())
    }

    /// exp(-i * angle * (axis . sigma) / 2): Bloch rotation by `angle`
    /// about `axis`, counterclockwise by the right-hand rule.
    pub fn rotation_about(axis: &MeasDirection, angle: f64) -> Self {
        let half = 0.5 * angle;
        let u = identity2() * c(half.cos(), 0.0) - dot_sigma(&axis.vector()) * c(0.0, half.sin());
        Unitary2(u)
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &M2 {
        &self.0
    }
}

/// rho = (I + s . sigma) / 2.
pub fn density_from_bloch(s: &BlochVec) -> DensityMat {
    let m = (identity2() + dot_sigma(&s.vector())) * c(0.5, 0.0);
    DensityMat::new(m).expect("Bloch ball membership guarantees a valid state")
}

/// s_k = Tr[rho sigma_k]; always lands inside the closed unit ball.
pub fn bloch_from_density(rho: &DensityMat) -> BlochVec {
    let m = rho.matrix();
    let sx = (m * pauli_x()).trace().re;
    let sy = (m * pauli_y()).trace().re;
    let sz = (m * pauli_z()).trace().re;
    BlochVec::from_vector(Vector3::new(sx, sy, sz))
        .expect("valid density matrices map into the unit ball")
}

/// rho -> U rho U^dagger.
pub fn apply_unitary(rho: &DensityMat, u: &Unitary2) -> DensityMat {
    let m = u.matrix() * rho.matrix() * u.matrix().adjoint();
    DensityMat::new(m).expect("conjugation by a unitary preserves state invariants")
}

/// The projector (I + outcome * m . sigma) / 2 onto the `outcome` eigenspace
/// of m . sigma.
pub fn outcome_projector(m: &MeasDirection, outcome: Sign) -> M2 {
    (identity2() + dot_sigma(&m.vector()) * c(outcome.value(), 0.0)) * c(0.5, 0.0)
}

/// The rank-one operator (I + n . sigma) / 4 for a unit vector n.
///
/// Four of these along unit vectors with pairwise dot products -1/3 form an
/// informationally complete measurement; callers supply the vectors.
pub fn sic_projector(n: &Vector3<f64>) -> M2 {
    (identity2() + dot_sigma(n)) * c(0.25, 0.0)
}

/// Born rule: Tr[rho P_outcome] for projective measurement along m.
pub fn born_probability(rho: &DensityMat, m: &MeasDirection, outcome: Sign) -> f64 {
    (rho.matrix() * outcome_projector(m, outcome)).trace().re
}

/// Projective collapse: P rho P / Tr[rho P].
///
/// Errors when the outcome has (numerically) zero probability; the
/// conditional state is undefined there and no convention is invented.
pub fn luders_collapse(rho: &DensityMat, m: &MeasDirection, outcome: Sign) -> Result<DensityMat> {
    let p = born_probability(rho, m, outcome);
    if p <= tol::ENTRY {
        return Err(Error::ZeroProbabilityOutcome {
            outcome: outcome.to_string(),
            probability: p,
        });
    }
    let proj = outcome_projector(m, outcome);
    let collapsed = proj * rho.matrix() * proj * c(1.0 / p, 0.0);
    DensityMat::new(collapsed)
}

/// The two-qubit singlet state (|01> - |10>) / sqrt(2) as a density matrix.
pub fn singlet_density() -> DensityMat4 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)];
    let mut m = M4::zeros();
    for (i, &pi) in psi.iter().enumerate() {
        for (j, &pj) in psi.iter().enumerate() {
            m[(i, j)] = pi * pj.conj();
        }
    }
    DensityMat4::new(m).expect("pure state projector is a valid state")
}

/// Which qubit to keep when tracing out the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    /// Keep the left (first) qubit.
    Left,
    /// Keep the right (second) qubit.
    Right,
}

/// Partial trace of a two-qubit state down to one qubit.
pub fn partial_trace(rho: &DensityMat4, keep: Party) -> DensityMat {
    let m = rho.matrix();
    let mut out = M2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = c(0.0, 0.0);
            for k in 0..2 {
                acc += match keep {
                    Party::Left => m[(2 * i + k, 2 * j + k)],
                    Party::Right => m[(2 * k + i, 2 * k + j)],
                };
            }
            out[(i, j)] = acc;
        }
    }
    DensityMat::new(out).expect("partial trace of a valid state is a valid state")
}

/// Two-point correlator E(a, b) = Tr[rho (a . sigma) x (b . sigma)].
pub fn correlation(rho: &DensityMat4, a: &MeasDirection, b: &MeasDirection) -> f64 {
    let op = dot_sigma(&a.vector()).kronecker(&dot_sigma(&b.vector()));
    (rho.matrix() * op).trace().re
}

/// CHSH combination E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2).
pub fn chsh_value(rho: &DensityMat4, settings: &ChshSettings) -> f64 {
    correlation(rho, &settings.a1, &settings.b1)
        + correlation(rho, &settings.a1, &settings.b2)
        + correlation(rho, &settings.a2, &settings.b1)
        - correlation(rho, &settings.a2, &settings.b2)
}
