//! Seeded randomness.
//!
//! Every random draw in the simulator comes from a ChaCha20 generator seeded
//! with the run seed. Independent consumers use distinct ChaCha streams so
//! that adding a draw in one place never perturbs another:
//!
//! | stream            | consumer                                   |
//! |-------------------|--------------------------------------------|
//! | `0`               | initial-state preparation                  |
//! | `1`               | Born-rule sampling in the jump loop        |
//! | `RULE_BASE + n`   | test construction by a rule at time `n`    |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::scalar::{Real, C};

pub const STREAM_INITIAL_STATE: u64 = 0;
pub const STREAM_SAMPLING: u64 = 1;
pub const STREAM_RULE_BASE: u64 = 1 << 32;

/// Generator for the given seed and stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator used by a rule when building the test for time `n`.
pub fn rule_rng(seed: u64, n: u64) -> ChaCha20Rng {
    stream_rng(seed, STREAM_RULE_BASE.wrapping_add(n))
}

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C::new(T::lit(re * s), T::lit(im * s))
}

/// Unit vector distributed uniformly (Haar) on the complex sphere.
pub fn haar_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C<T>> {
    loop {
        let mut v: Vec<C<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let norm = crate::linalg::norm_sqr(&v).sqrt();
        if norm > T::lit(1e-3) {
            for z in &mut v {
                *z = *z / norm;
            }
            return v;
        }
    }
}

/// Gaussian unitary ensemble sample `(G + G†)/2`; its eigenbasis is Haar
/// distributed and its spectrum is almost surely nondegenerate.
pub fn gue<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix<T> {
    let mut m = CMatrix::zeros(dim);
    let half = T::lit(0.5);
    for i in 0..dim {
        for j in i..dim {
            let z: C<T> = complex_gaussian(rng);
            if i == j {
                m[(i, i)] = C::new(z.re, T::zero());
            } else {
                let w = z * half;
                m[(i, j)] = w;
                m[(j, i)] = w.conj();
            }
        }
    }
    m
}

/// Haar-random unitary via Gram-Schmidt on Gaussian columns. Returns the
/// columns as orthonormal vectors.
pub fn haar_unitary_columns<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<C<T>>> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        // Two passes of modified Gram-Schmidt keep orthogonality at machine precision.
        for _ in 0..2 {
            for u in &cols {
                let proj = crate::linalg::dot(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x = *x - proj * *y;
                }
            }
        }
        let norm = crate::linalg::norm_sqr(&v).sqrt();
        if norm < T::lit(1e-6) {
            continue;
        }
        for x in &mut v {
            *x = *x / norm;
        }
        cols.push(v);
    }
    cols
}

/// Pseudo-random unitary `H D₃ H D₂ H D₁` on `num_qubits` qubits, where `H`
/// is the Walsh-Hadamard transform and `Dᵢ` are diagonal matrices of uniform
/// random phases. Applying it costs `O(n·2ⁿ)`, so the columns of large
/// scrambling bases can be generated without a dense QR.
#[derive(Clone, Debug)]
pub struct PhaseScrambler<T: Real> {
    num_qubits: usize,
    phases: [Vec<C<T>>; 3],
}

impl<T: Real> PhaseScrambler<T> {
    pub fn new<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << num_qubits;
        let mut layer = || -> Vec<C<T>> {
            (0..dim)
                .map(|_| {
                    let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    C::new(T::lit(theta.cos()), T::lit(theta.sin()))
                })
                .collect()
        };
        let phases = [layer(), layer(), layer()];
        Self { num_qubits, phases }
    }

    pub fn apply(&self, v: &mut [C<T>]) {
        for layer in &self.phases {
            for (x, p) in v.iter_mut().zip(layer) {
                *x = *x * *p;
            }
            walsh_hadamard(v, self.num_qubits);
        }
    }

    /// Image of computational basis vector `k`.
    pub fn column(&self, k: usize) -> Vec<C<T>> {
        let mut v = vec![C::new(T::zero(), T::zero()); 1 << self.num_qubits];
        v[k] = C::new(T::one(), T::zero());
        self.apply(&mut v);
        v
    }
}

/// Orthonormal basis of `2^num_qubits` vectors drawn Haar-like: exact Haar
/// (Gram-Schmidt on Gaussian columns) up to 6 qubits, [`PhaseScrambler`]
/// columns beyond that.
pub fn scrambling_basis<T: Real, R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Vec<Vec<C<T>>> {
    let dim = 1usize << num_qubits;
    if num_qubits <= 6 {
        haar_unitary_columns(dim, rng)
    } else {
        let s = PhaseScrambler::new(num_qubits, rng);
        (0..dim).map(|k| s.column(k)).collect()
    }
}

/// In-place normalized Walsh-Hadamard transform.
pub fn walsh_hadamard<T: Real>(v: &mut [C<T>], num_qubits: usize) {
    let n = v.len();
    debug_assert_eq!(n, 1 << num_qubits);
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let s = T::one() / T::lit(n as f64).sqrt();
    for x in v.iter_mut() {
        *x = *x * s;
    }
}
