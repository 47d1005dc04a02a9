//! Cross-checks against independent constructions built on nalgebra.

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qstages::factorize::{finest_factorization, schmidt_rank, DEFAULT_EPS};
use qstages::linalg::{eigh, CMatrix};
use qstages::qstate::{entanglement_entropy, mutual_information, partial_trace};
use qstages::random::{gue, stream_rng};
use qstages::{QubitSet, StateVector64};

fn to_na(m: &CMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m[(i, j)])
}

/// Full density matrix |s⟩⟨s| traced down to `keep` by explicit index
/// arithmetic on the 2^N × 2^N outer product.
fn outer_product_trace(s: &StateVector64, keep: &[usize]) -> DMatrix<Complex64> {
    let n = s.num_qubits();
    let psi = DVector::from_column_slice(s.amplitudes());
    let rho = &psi * psi.adjoint();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let sub = |x: usize| keep.iter().fold(0, |acc, &q| acc << 1 | bit(x, q));
    let env = |x: usize| (0..n).filter(|q| !keep.contains(q)).fold(0, |acc, q| acc << 1 | bit(x, q));
    let d = 1 << keep.len();
    let mut out = DMatrix::zeros(d, d);
    for x in 0..1 << n {
        for y in 0..1 << n {
            if env(x) == env(y) {
                out[(sub(x), sub(y))] += rho[(x, y)];
            }
        }
    }
    out
}

fn entropy_bits(rho: &DMatrix<Complex64>) -> f64 {
    rho.clone()
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|&l| -l * l.log2())
        .sum()
}

#[test]
fn partial_trace_matches_outer_product_oracle() {
    let mut rng = stream_rng(31, 0);
    for _ in 0..20 {
        let s = StateVector64::haar_random(3, &mut rng).unwrap();
        for keep in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]] {
            let ours = partial_trace(&s, &QubitSet::new(keep.clone(), 3).unwrap()).unwrap();
            let oracle = outer_product_trace(&s, &keep);
            assert_abs_diff_eq!((to_na(ours.matrix()) - oracle).camax(), 0.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn eigh_matches_nalgebra() {
    let mut rng = stream_rng(32, 0);
    for dim in [1, 2, 3, 5, 8, 16] {
        let m = gue::<f64, _>(dim, &mut rng);
        let ours = eigh(&m);
        let mut theirs: Vec<f64> = to_na(&m).symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.eigenvalues.iter().zip(&theirs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        for (l, v) in ours.eigenvalues.iter().zip(&ours.eigenvectors) {
            let av = m.mul_vec(v).unwrap();
            let resid = av.iter().zip(v).map(|(x, y)| (x - y * l).norm_sqr()).sum::<f64>().sqrt();
            assert!(resid < 1e-10, "dim {dim}: residual {resid}");
        }
    }
}

#[test]
fn entropies_match_nalgebra() {
    let mut rng = stream_rng(33, 0);
    for n in 2..=5 {
        let s = StateVector64::haar_random(n, &mut rng).unwrap();
        for mask in 1..(1u64 << n) - 1 {
            let cut = QubitSet::from_mask(mask);
            let keep: Vec<usize> = cut.iter().collect();
            let want = entropy_bits(&outer_product_trace(&s, &keep));
            assert_abs_diff_eq!(entanglement_entropy(&s, &cut).unwrap(), want, epsilon = 1e-9);
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let si = entropy_bits(&outer_product_trace(&s, &[i]));
                let sj = entropy_bits(&outer_product_trace(&s, &[j]));
                let sij = entropy_bits(&outer_product_trace(&s, &[i.min(j), i.max(j)]));
                assert_abs_diff_eq!(mutual_information(&s, i, j).unwrap(), si + sj - sij, epsilon = 1e-9);
            }
        }
    }
}

#[test]
fn schmidt_rank_matches_singular_values() {
    let mut rng = stream_rng(34, 0);
    let a = StateVector64::haar_random(2, &mut rng).unwrap();
    let b = StateVector64::bell();
    let s = qstages::tensor_product(&a, &b).unwrap();
    for mask in 1..15u64 {
        let cut = QubitSet::from_mask(mask);
        let keep: Vec<usize> = cut.iter().collect();
        let rest: Vec<usize> = (0..4).filter(|q| !cut.contains(*q)).collect();
        // Reshape into (cut × rest) and count singular values above 1e-6.
        let bit = |x: usize, q: usize| (x >> (3 - q)) & 1;
        let mut m = DMatrix::<Complex64>::zeros(1 << keep.len(), 1 << rest.len());
        for x in 0..16 {
            let r = keep.iter().fold(0, |acc, &q| acc << 1 | bit(x, q));
            let c = rest.iter().fold(0, |acc, &q| acc << 1 | bit(x, q));
            m[(r, c)] = s.amplitudes()[x];
        }
        let want = m.singular_values().iter().filter(|&&v| v > 1e-6).count();
        assert_eq!(schmidt_rank(&s, &cut, DEFAULT_EPS).unwrap(), want, "cut {cut}");
    }
    let p = finest_factorization(&s, DEFAULT_EPS).unwrap();
    assert_eq!(p.blocks().len(), 2);
}
