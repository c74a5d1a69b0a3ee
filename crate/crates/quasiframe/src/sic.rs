//! The single-qubit tetrahedral frame and its probability representation.
//!
//! Four unit Bloch vectors n_aa' = (a, a', a*a') / sqrt(3), indexed by a
//! sign pair, form a regular tetrahedron. The operators (I + n.sigma)/4
//! built on them are informationally complete, so a qubit state is fully
//! described by the four outcome probabilities
//!
//! ```text
//! p(aa') = (1 + s . n_aa') / 4,        s = 3 * sum_aa' p(aa') n_aa'
//! ```
//!
//! Unitary dynamics becomes a real 4x4 transition matrix with unit column
//! sums whose entries may be negative (quasi-stochastic); the only
//! rotations with genuinely stochastic 0/1 matrices are the twelve that
//! permute the tetrahedron. Projective measurement averaged over outcomes
//! becomes a singular idempotent channel. Two qubits get the product
//! frame, under which the singlet is an ordinary (nonnegative) joint
//! distribution that still violates the CHSH bound once settings are
//! steered by local quasi-stochastic rotations.
//!
//! This symmetric frame is self-dual up to the fixed affine rescaling in
//! [`bloch_from_sic`]; general frames would carry a distinct dual set and
//! are deliberately not modeled.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::oracle::{pauli_x, pauli_y, pauli_z, Unitary2};
use crate::types::{pair_signs, tol, BlochVec, ChshSettings, MeasDirection};

/// Number of frame elements.
pub const FRAME_SIZE: usize = 4;

/// The tetrahedral Bloch vector (a, a', a*a') / sqrt(3) for a pair index.
pub fn tetra_vector(index: usize) -> Vector3<f64> {
    let (a, ap) = pair_signs(index);
    let r = 3.0_f64.sqrt().recip();
    Vector3::new(a * r, ap * r, a * ap * r)
}

/// All four tetrahedral vectors in index order.
pub fn tetra_vectors() -> [Vector3<f64>; FRAME_SIZE] {
    [
        tetra_vector(0),
        tetra_vector(1),
        tetra_vector(2),
        tetra_vector(3),
    ]
}

/// A normalized real 4-vector over the frame outcomes, indexed (a, a')
/// big-endian with +1 first.
///
/// Entries are probabilities when the vector comes from a physical state;
/// channel outputs are allowed to carry (reported, never hidden) negative
/// entries, so only normalization is enforced here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SicDist(Vector4<f64>);

impl SicDist {
    /// Validate normalization and wrap.
    pub fn new(p: Vector4<f64>) -> Result<Self> {
        let sum = p.sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol::INPUT {
            return Err(Error::NotNormalized { sum });
        }
        Ok(SicDist(p))
    }

    /// Validate four plain entries and wrap.
    pub fn from_entries(entries: [f64; FRAME_SIZE]) -> Result<Self> {
        SicDist::new(Vector4::new(entries[0], entries[1], entries[2], entries[3]))
    }

    /// The uniform distribution (maximally mixed state).
    pub fn uniform() -> Self {
        SicDist(Vector4::repeat(0.25))
    }

    /// Entry by pair index.
    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    /// All four entries in index order.
    pub fn entries(&self) -> [f64; FRAME_SIZE] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    /// Underlying vector.
    pub fn vector(&self) -> Vector4<f64> {
        self.0
    }

    /// Smallest entry; negative values indicate a quasi-distribution.
    pub fn min_entry(&self) -> f64 {
        self.0.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// True when every entry clears the positivity floor.
    pub fn is_nonnegative(&self) -> bool {
        self.min_entry() >= tol::NEGATIVE_FLOOR
    }
}

/// p(aa') = (1 + s . n_aa') / 4; nonnegative for any ball vector, each
/// entry at most 1/2.
pub fn sic_from_bloch(s: &BlochVec) -> SicDist {
    let v = s.vector();
    let p = Vector4::from_fn(|i, _| 0.25 * (1.0 + v.dot(&tetra_vector(i))));
    SicDist(p)
}

/// s = 3 * sum p(aa') n_aa'; errors if the result leaves the Bloch ball,
/// which only happens for quasi-distribution inputs.
pub fn bloch_from_sic(p: &SicDist) -> Result<BlochVec> {
    let mut s = Vector3::zeros();
    for i in 0..FRAME_SIZE {
        s += 3.0 * p.get(i) * tetra_vector(i);
    }
    BlochVec::from_vector(s)
}

/// A real 4x4 transition matrix on frame distributions with unit column
/// sums. Entries may be negative; [`QuasiStochMat::negativity`] totals the
/// negative mass.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiStochMat(Matrix4<f64>);

impl QuasiStochMat {
    /// Validate unit column sums and wrap.
    pub fn new(t: Matrix4<f64>) -> Result<Self> {
        for col in 0..FRAME_SIZE {
            let sum: f64 = t.column(col).sum();
            if !sum.is_finite() || (sum - 1.0).abs() > tol::INPUT {
                return Err(Error::NotStochastic { column: col, sum });
            }
        }
        Ok(QuasiStochMat(t))
    }

    /// The identity channel.
    pub fn identity() -> Self {
        QuasiStochMat(Matrix4::identity())
    }

    /// Underlying matrix, rows indexed by output, columns by input.
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// Apply the channel: p'(bb') = sum_aa' T[bb', aa'] p(aa').
    ///
    /// Negativity of the output is reported through the returned
    /// distribution's accessors, never rejected here.
    pub fn apply(&self, p: &SicDist) -> SicDist {
        SicDist(self.0 * p.vector())
    }

    /// Composition: `self` after `other`.
    pub fn compose(&self, other: &QuasiStochMat) -> QuasiStochMat {
        QuasiStochMat(self.0 * other.0)
    }

    /// Total negative mass, sum of max(0, -entry).
    pub fn negativity(&self) -> f64 {
        self.0.iter().map(|&t| (-t).max(0.0)).sum()
    }

    /// Smallest entry.
    pub fn min_entry(&self) -> f64 {
        self.0.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// True when every entry is within `tolerance` of 0 or 1.
    pub fn is_zero_one(&self, tolerance: f64) -> bool {
        self.0
            .iter()
            .all(|&t| t.abs() <= tolerance || (t - 1.0).abs() <= tolerance)
    }

    /// True when the matrix is a permutation: 0/1 entries with one unit
    /// per row and per column.
    pub fn is_permutation(&self, tolerance: f64) -> bool {
        if !self.is_zero_one(tolerance) {
            return false;
        }
        for k in 0..FRAME_SIZE {
            let row: f64 = self.0.row(k).sum();
            let col: f64 = self.0.column(k).sum();
            if (row - 1.0).abs() > tolerance || (col - 1.0).abs() > tolerance {
                return false;
            }
        }
        true
    }
}

fn check_proper_rotation(o: &Matrix3<f64>) -> Result<()> {
    let gram_dev = (o.transpose() * o - Matrix3::identity())
        .iter()
        .map(|e| e.abs())
        .fold(0.0, f64::max);
    let det_dev = (o.determinant() - 1.0).abs();
    let deviation = gram_dev.max(det_dev);
    if deviation > tol::INPUT {
        return Err(Error::NotRotation { deviation });
    }
    Ok(())
}

/// Transition matrix of a Bloch rotation O:
/// T(bb' | aa') = (1 + 3 (O n_aa') . n_bb') / 4.
///
/// Columns always sum to one. Entries are all 0 or 1 exactly when O
/// permutes the tetrahedron; any other rotation forces at least one
/// strictly negative entry.
pub fn channel_from_rotation(o: &Matrix3<f64>) -> Result<QuasiStochMat> {
    check_proper_rotation(o)?;
    let rotated: Vec<Vector3<f64>> = (0..FRAME_SIZE).map(|a| o * tetra_vector(a)).collect();
    let t = Matrix4::from_fn(|b, a| 0.25 * (1.0 + 3.0 * rotated[a].dot(&tetra_vector(b))));
    Ok(QuasiStochMat(t))
}

/// Bloch rotation of a qubit unitary: O_jk = Tr[sigma_j U sigma_k U^dagger] / 2.
///
/// Global phases cancel, so the result is always a proper rotation and
/// satisfies bloch(U rho U^dagger) = O bloch(rho).
pub fn rotation_from_unitary(u: &Unitary2) -> Matrix3<f64> {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let um = u.matrix();
    Matrix3::from_fn(|j, k| 0.5 * (paulis[j] * um * paulis[k] * um.adjoint()).trace().re)
}

/// Outcome-averaged projective measurement along m as a frame channel:
/// V(bb' | aa') = (1 + 3 (m . n_bb')(m . n_aa')) / 4.
///
/// The induced map on Bloch vectors is s -> (s . m) m, a rank-one
/// projection, so V is singular and idempotent.
pub fn luders_channel(m: &MeasDirection) -> QuasiStochMat {
    let mv = m.vector();
    let overlaps: Vec<f64> = (0..FRAME_SIZE).map(|i| mv.dot(&tetra_vector(i))).collect();
    let v = Matrix4::from_fn(|b, a| 0.25 * (1.0 + 3.0 * overlaps[b] * overlaps[a]));
    QuasiStochMat(v)
}

/// The twelve rotations that permute the tetrahedron: even permutations of
/// the coordinate axes combined with even sign flips.
pub fn tetrahedral_rotations() -> Vec<Matrix3<f64>> {
    let perms: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
    let sign_patterns: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    let mut out = Vec::with_capacity(12);
    for perm in perms {
        for signs in sign_patterns {
            let mut m = Matrix3::zeros();
            for (j, (&target, &sign)) in perm.iter().zip(signs.iter()).enumerate() {
                m[(target, j)] = sign;
            }
            out.push(m);
        }
    }
    out
}

/// A rotation whose action aligns `direction` with the +z axis; its third
/// row is the direction itself, so (O s) . e_z = s . direction.
pub fn rotation_to_z(direction: &MeasDirection) -> Matrix3<f64> {
    let d = direction.vector();
    let helper = if d.z.abs() < 0.9 {
        Vector3::z()
    } else {
        Vector3::x()
    };
    let u = d.cross(&helper).normalize();
    let v = d.cross(&u);
    Matrix3::from_rows(&[u.transpose(), v.transpose(), d.transpose()])
}

/// A joint distribution over two frame outcome pairs, indexed
/// (left pair, right pair).
#[derive(Clone, Debug, PartialEq)]
pub struct SicDist2(Matrix4<f64>);

impl SicDist2 {
    /// Validate normalization and wrap.
    pub fn new(p: Matrix4<f64>) -> Result<Self> {
        let sum = p.sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol::INPUT {
            return Err(Error::NotNormalized { sum });
        }
        Ok(SicDist2(p))
    }

    /// The uniform joint distribution (maximally mixed two-qubit state).
    pub fn uniform() -> Self {
        SicDist2(Matrix4::repeat(1.0 / 16.0))
    }

    /// Entry by (left, right) pair indices.
    pub fn get(&self, left: usize, right: usize) -> f64 {
        self.0[(left, right)]
    }

    /// Marginal over the right party.
    pub fn left_marginal(&self) -> SicDist {
        SicDist(Vector4::from_fn(|a, _| self.0.row(a).sum()))
    }

    /// Marginal over the left party.
    pub fn right_marginal(&self) -> SicDist {
        SicDist(Vector4::from_fn(|b, _| self.0.column(b).sum()))
    }

    /// Smallest entry.
    pub fn min_entry(&self) -> f64 {
        self.0.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Apply independent channels to the two parties.
    pub fn apply_local(&self, left: &QuasiStochMat, right: &QuasiStochMat) -> SicDist2 {
        SicDist2(left.matrix() * self.0 * right.matrix().transpose())
    }

    /// Expectation of the product of outcome sign products,
    /// sum p(aa', bb') (a a')(b b').
    pub fn sign_correlator(&self) -> f64 {
        let mut acc = 0.0;
        for a in 0..FRAME_SIZE {
            let (sa, sap) = pair_signs(a);
            for b in 0..FRAME_SIZE {
                let (sb, sbp) = pair_signs(b);
                acc += self.0[(a, b)] * (sa * sap) * (sb * sbp);
            }
        }
        acc
    }
}

/// The singlet state in the product frame:
/// p(aa', bb') = (1 - n_aa' . n_bb') / 16.
///
/// All sixteen entries are nonnegative: 0 on the diagonal, 1/12 off it.
pub fn singlet_sic() -> SicDist2 {
    let p = Matrix4::from_fn(|a, b| (1.0 - tetra_vector(a).dot(&tetra_vector(b))) / 16.0);
    SicDist2(p)
}

/// Two-point correlator for measurement directions (a, b): steer each
/// party's frame with the rotation channel that aligns its setting with
/// +z, then read the product-sign expectation (scaled by 3, the frame's
/// variance factor).
pub fn correlator_from_sic(p: &SicDist2, a: &MeasDirection, b: &MeasDirection) -> Result<f64> {
    let left = channel_from_rotation(&rotation_to_z(a))?;
    let right = channel_from_rotation(&rotation_to_z(b))?;
    Ok(3.0 * p.apply_local(&left, &right).sign_correlator())
}

/// CHSH combination E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2), computed
/// entirely in the frame picture via local quasi-stochastic rotations.
pub fn chsh_from_sic(p: &SicDist2, settings: &ChshSettings) -> Result<f64> {
    Ok(correlator_from_sic(p, &settings.a1, &settings.b1)?
        + correlator_from_sic(p, &settings.a1, &settings.b2)?
        + correlator_from_sic(p, &settings.a2, &settings.b1)?
        - correlator_from_sic(p, &settings.a2, &settings.b2)?)
}
