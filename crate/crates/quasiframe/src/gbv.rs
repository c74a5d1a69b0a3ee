//! Frame representation of n-bit registers: generalized Bloch vectors.
//!
//! A distribution p over n sign bits is equivalent to the vector of its
//! (2^n - 1) nontrivial monomial correlators. Packaging those correlators
//! as w with the normalization used here,
//!
//! ```text
//! p(x) = (1 + w . n_x) / 2^n,    w = (2^n - 1)/2^n * sum_x (2^n p(x) - 1) n_x,
//! ```
//!
//! where the frame vector n_x lists every nontrivial monomial of the
//! outcome signs divided by sqrt(2^n - 1). The frame vectors are unit
//! length, have pairwise dot products -1/(2^n - 1), and resolve the
//! identity as sum_x n_x n_x^T = 2^n/(2^n - 1) I. For n = 2 they are
//! exactly the tetrahedral vectors of [`crate::sic`], so w coincides with
//! the Bloch vector itself.
//!
//! Monomial ordering: components are sorted by degree, then
//! lexicographically by bit positions, except for n = 3 where the qubit
//! monomials of the (meter, qubit-bit, qubit-bit) layout come first and
//! the lone meter bit last; serialized vectors should carry
//! [`ordering_tag`] so downstream readers can tell the two apart.
//!
//! Linear maps on distributions with unit column sums become affine maps
//! on w; [`affine_from_process`] extracts them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::types::tol;

/// Largest supported register width (2^n outcome vectors stay in memory).
pub const MAX_BITS: usize = 12;

/// 2^n, validating the supported range 1..=12.
pub fn outcome_count(n_bits: usize) -> Result<usize> {
    if n_bits == 0 || n_bits > MAX_BITS {
        return Err(Error::BitCountOutOfRange { n_bits });
    }
    Ok(1usize << n_bits)
}

/// Version tag for the monomial ordering baked into frame vectors.
pub fn ordering_tag(n_bits: usize) -> &'static str {
    if n_bits == 3 {
        "qubit-major/v1"
    } else {
        "degree-lex/v1"
    }
}

/// Ordered monomials as bitmasks over bit positions (position 0 is the
/// first, most significant bit of the outcome index).
pub fn monomial_masks(n_bits: usize) -> Result<Vec<u32>> {
    outcome_count(n_bits)?;
    if n_bits == 3 {
        // Qubit-major layout for (meter, bit, bit') registers: the two
        // qubit bits and their product first, then the meter-dressed
        // copies, then the meter bit alone.
        let of = |positions: &[usize]| -> u32 {
            positions.iter().map(|&j| 1u32 << j).sum()
        };
        return Ok(vec![
            of(&[1]),
            of(&[2]),
            of(&[1, 2]),
            of(&[0, 1]),
            of(&[0, 2]),
            of(&[0, 1, 2]),
            of(&[0]),
        ]);
    }
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n_bits))
        .map(|mask| (0..n_bits).filter(|&j| mask & (1 << j)!= 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(subsets
        .into_iter()
        .map(|positions| positions.into_iter().map(|j| 1u32 << j).sum())
        .collect())
}

/// Sign (+1/-1) of bit position `position` in outcome `index`, big-endian
/// with +1 encoded as bit 0.
fn bit_sign(n_bits: usize, index: usize, position: usize) -> f64 {
    let bit = (index >> (n_bits - 1 - position)) & 1;
    1.0 - 2.0 * bit as f64
}

/// The frame vector for one outcome: all nontrivial monomials of its bit
/// signs, divided by sqrt(2^n - 1).
pub fn frame_vector(n_bits: usize, index: usize) -> Result<DVector<f64>> {
    let size = outcome_count(n_bits)?;
    if index >= size {
        return Err(Error::IndexOutOfRange { index, size });
    }
    let masks = monomial_masks(n_bits)?;
    let scale = ((size - 1) as f64).sqrt().recip();
    Ok(DVector::from_iterator(
        size - 1,
        masks.iter().map(|&mask| {
            let mut prod = 1.0;
            for position in 0..n_bits {
                if mask & (1 << position) != 0 {
                    prod *= bit_sign(n_bits, index, position);
                }
            }
            prod * scale
        }),
    ))
}

/// All frame vectors stacked as rows: a 2^n x (2^n - 1) matrix.
pub fn frame_matrix(n_bits: usize) -> Result<DMatrix<f64>> {
    let size = outcome_count(n_bits)?;
    let mut m = DMatrix::zeros(size, size - 1);
    for x in 0..size {
        m.set_row(x, &frame_vector(n_bits, x)?.transpose());
    }
    Ok(m)
}

/// A normalized distribution over 2^n sign-bit outcomes, indexed
/// big-endian with +1 bits first.
///
/// Entries are nonnegative for physical inputs; frame inversions may
/// produce (flagged) negative entries, so only normalization is enforced.
#[derive(Clone, Debug, PartialEq)]
pub struct BitDist {
    n_bits: usize,
    p: DVector<f64>,
}

impl BitDist {
    /// Validate length and normalization, then wrap.
    pub fn new(n_bits: usize, p: DVector<f64>) -> Result<Self> {
        let size = outcome_count(n_bits)?;
        if p.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: p.len(),
            });
        }
        let sum = p.sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol::INPUT {
            return Err(Error::NotNormalized { sum });
        }
        Ok(BitDist { n_bits, p })
    }

    /// The uniform distribution on n bits.
    pub fn uniform(n_bits: usize) -> Result<Self> {
        let size = outcome_count(n_bits)?;
        Ok(BitDist {
            n_bits,
            p: DVector::repeat(size, 1.0 / size as f64),
        })
    }

    /// Register width.
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Entry by outcome index.
    pub fn get(&self, index: usize) -> f64 {
        self.p[index]
    }

    /// Underlying vector.
    pub fn vector(&self) -> &DVector<f64> {
        &self.p
    }

    /// Smallest entry; negative values indicate a quasi-distribution.
    pub fn min_entry(&self) -> f64 {
        self.p.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Sum of squared probabilities (collision probability).
    pub fn collision_probability(&self) -> f64 {
        self.p.iter().map(|&x| x * x).sum()
    }
}

/// The generalized Bloch vector of an n-bit register: (2^n - 1) scaled
/// monomial correlators.
#[derive(Clone, Debug, PartialEq)]
pub struct Gbv {
    n_bits: usize,
    w: DVector<f64>,
}

impl Gbv {
    /// Validate length and wrap.
    pub fn new(n_bits: usize, w: DVector<f64>) -> Result<Self> {
        let size = outcome_count(n_bits)?;
        if w.len() != size - 1 {
            return Err(Error::DimensionMismatch {
                expected: size - 1,
                got: w.len(),
            });
        }
        Ok(Gbv { n_bits, w })
    }

    /// Register width.
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// Component by monomial position (see [`monomial_masks`]).
    pub fn get(&self, index: usize) -> f64 {
        self.w[index]
    }

    /// Underlying vector.
    pub fn vector(&self) -> &DVector<f64> {
        &self.w
    }

    /// Squared length; at most (2^n - 1)^2 for physical distributions,
    /// with equality exactly on deterministic outcomes.
    pub fn norm_squared(&self) -> f64 {
        self.w.norm_squared()
    }
}

/// Correlator extraction: w = (2^n - 1)/2^n * sum_x (2^n p(x) - 1) n_x.
pub fn gbv_from_dist(p: &BitDist) -> Gbv {
    let n_bits = p.n_bits();
    let size = 1usize << n_bits;
    let frame = frame_matrix(n_bits).expect("width validated at construction");
    let centered = p.vector().map(|x| size as f64 * x - 1.0);
    let w = frame.transpose() * centered * ((size - 1) as f64 / size as f64);
    Gbv { n_bits, w }
}

/// Result of inverting a generalized Bloch vector back to a distribution.
#[derive(Clone, Debug)]
pub struct RecoveredDist {
    /// The recovered, normalized distribution.
    pub dist: BitDist,
    /// True when an entry fell below the positivity floor: the input was
    /// a quasi-distribution, not a physical one. Entries are reported
    /// as computed, never clipped.
    pub nonpositive: bool,
}

/// Frame inversion: p(x) = (1 + w . n_x) / 2^n.
pub fn dist_from_gbv(w: &Gbv) -> RecoveredDist {
    let n_bits = w.n_bits();
    let size = 1usize << n_bits;
    let frame = frame_matrix(n_bits).expect("width validated at construction");
    let p = (frame * w.vector()).add_scalar(1.0) / size as f64;
    let nonpositive = p.iter().any(|&x| x < tol::NEGATIVE_FLOOR);
    RecoveredDist {
        dist: BitDist { n_bits, p },
        nonpositive,
    }
}

/// The affine action (w -> linear w + offset) induced on generalized
/// Bloch vectors by a column-normalized process on distributions.
#[derive(Clone, Debug)]
pub struct AffineMap {
    n_bits: usize,
    linear: DMatrix<f64>,
    offset: DVector<f64>,
}

impl AffineMap {
    /// Register width the map acts on.
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    /// The linear part, (2^n - 1) square.
    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    /// The translation part; zero exactly when the process is
    /// bistochastic (unit row sums leave the uniform point fixed).
    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    /// Apply to a generalized Bloch vector.
    pub fn apply(&self, w: &Gbv) -> Result<Gbv> {
        if w.n_bits() != self.n_bits {
            return Err(Error::DimensionMismatch {
                expected: self.n_bits,
                got: w.n_bits(),
            });
        }
        Ok(Gbv {
            n_bits: self.n_bits,
            w: &self.linear * w.vector() + &self.offset,
        })
    }
}

/// Extract the affine frame action of a process matrix T (rows indexed by
/// output, columns by input, unit column sums):
///
/// ```text
/// linear = (2^n - 1)/2^n * N^T T N,    offset = (2^n - 1)/2^n * N^T (T 1),
/// ```
///
/// with N the stacked frame vectors. Then gbv(T p) = linear gbv(p) + offset
/// for every distribution p.
pub fn affine_from_process(n_bits: usize, t: &DMatrix<f64>) -> Result<AffineMap> {
    let size = outcome_count(n_bits)?;
    if t.nrows() != size || t.ncols() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            got: t.nrows().max(t.ncols()),
        });
    }
    for col in 0..size {
        let sum: f64 = t.column(col).sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tol::INPUT {
            return Err(Error::NotStochastic { column: col, sum });
        }
    }
    let frame = frame_matrix(n_bits)?;
    let scale = (size - 1) as f64 / size as f64;
    let linear = frame.transpose() * t * &frame * scale;
    let row_sums = t * DVector::repeat(size, 1.0);
    let offset = frame.transpose() * row_sums * scale;
    Ok(AffineMap {
        n_bits,
        linear,
        offset,
    })
}

/// Collision (second-order Renyi) entropy in bits, from the vector length:
/// H2 = -log2[ (1 + |w|^2 / (2^n - 1)) / 2^n ].
///
/// Equals -log2 sum_x p(x)^2 of the underlying distribution: n bits at the
/// uniform point, 0 on deterministic outcomes.
pub fn collision_entropy(w: &Gbv) -> f64 {
    let size = (1usize << w.n_bits()) as f64;
    -((1.0 + w.norm_squared() / (size - 1.0)) / size).log2()
}
