use num_complex::Complex64;

use super::{ComplexMatrix, NumericsError, RealMatrix};

/// Solves `A X = B` for Hermitian positive definite `A` via a Cholesky
/// factorization `A = L L^H`.
pub fn hermitian_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if b.rows() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    let l = cholesky(a)?;
    let k = b.cols();
    let mut x = b.clone();
    // Forward substitution L Y = B, then back substitution L^H X = Y.
    for col in 0..k {
        for i in 0..n {
            let mut acc = x[(i, col)];
            for j in 0..i {
                acc -= l[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc / l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut acc = x[(i, col)];
            for j in i + 1..n {
                acc -= l[(j, i)].conj() * x[(j, col)];
            }
            x[(i, col)] = acc / l[(i, i)].re;
        }
    }
    Ok(x)
}

/// Lower-triangular Cholesky factor. Fails on a pivot that is not positive
/// relative to the matrix scale.
fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let n = a.rows();
    let scale = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0_f64, f64::max);
    let floor = scale * f64::EPSILON * n as f64;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > floor) {
            return Err(NumericsError::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / djj;
        }
    }
    Ok(l)
}

/// Real blocks `C = [Re H, -Im H]` and `D = [Im H, Re H]`, so that for the
/// stacked vector `x' = [Re x; Im x]` we have `Re(Hx) = C x'` and
/// `Im(Hx) = D x'`.
pub fn stacked_blocks(h: &ComplexMatrix) -> (RealMatrix, RealMatrix) {
    let (m, n) = (h.rows(), h.cols());
    let mut c = RealMatrix::zeros(m, 2 * n);
    let mut d = RealMatrix::zeros(m, 2 * n);
    for r in 0..m {
        for k in 0..n {
            let z = h[(r, k)];
            c[(r, k)] = z.re;
            c[(r, n + k)] = -z.im;
            d[(r, k)] = z.im;
            d[(r, n + k)] = z.re;
        }
    }
    (c, d)
}

/// `[Re x; Im x]`.
pub fn stack(x: &[Complex64]) -> Vec<f64> {
    x.iter().map(|z| z.re).chain(x.iter().map(|z| z.im)).collect()
}

/// Inverse of [`stack`]. Panics on odd length.
pub fn unstack(x_prime: &[f64]) -> Vec<Complex64> {
    assert!(x_prime.len() % 2 == 0, "stacked vector must have even length");
    let n = x_prime.len() / 2;
    (0..n)
        .map(|k| Complex64::new(x_prime[k], x_prime[n + k]))
        .collect()
}

/// Diagonal of the adjugate of `diag(p)`: entry `m` is the product of all
/// other entries. Computed from prefix/suffix products so zeros are exact.
pub fn diag_adjugate(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut out = vec![1.0; m];
    let mut prefix = 1.0;
    for i in 0..m {
        out[i] = prefix;
        prefix *= p[i];
    }
    let mut suffix = 1.0;
    for i in (0..m).rev() {
        out[i] *= suffix;
        suffix *= p[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sample_complex_gaussian, SeededRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(4.0, 4.0)])
            .unwrap();
        let x = hermitian_solve(&ComplexMatrix::identity(2), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_solve() {
        let a = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 4.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        let x = hermitian_solve(&a, &b).unwrap();
        assert!((x[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_spd_residual() {
        for seed in 0..20 {
            let mut rng = SeededRng::new(seed, 7);
            let g = sample_complex_gaussian(&mut rng, 6, 10, 1.0);
            let a = g.gram_rows();
            let b = sample_complex_gaussian(&mut rng, 6, 3, 1.0);
            let x = hermitian_solve(&a, &b).unwrap();
            let resid = a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm() / b.frobenius_norm();
            assert!(resid <= 1e-10, "residual {resid}");
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        let b = ComplexMatrix::identity(2);
        assert!(matches!(
            hermitian_solve(&a, &b),
            Err(NumericsError::NotPositiveDefinite { pivot: 1, .. })
        ));
        let singular = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(hermitian_solve(&singular, &b).is_err());
    }

    #[test]
    fn blocks_of_imaginary_unit() {
        let h = ComplexMatrix::from_row_major(1, 1, vec![c(0.0, 1.0)]).unwrap();
        let (cb, db) = stacked_blocks(&h);
        assert_eq!(cb.as_slice(), &[0.0, -1.0]);
        assert_eq!(db.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn blocks_of_real_channel() {
        let h = ComplexMatrix::from_real(1, 2, &[2.0, -3.0]).unwrap();
        let (cb, db) = stacked_blocks(&h);
        assert_eq!(cb.as_slice(), &[2.0, -3.0, 0.0, 0.0]);
        assert_eq!(db.as_slice(), &[0.0, 0.0, 2.0, -3.0]);
    }

    #[test]
    fn blocks_reproduce_complex_product() {
        let mut rng = SeededRng::new(11, 0);
        for _ in 0..100 {
            let h = sample_complex_gaussian(&mut rng, 4, 8, 1.0);
            let x = sample_complex_gaussian(&mut rng, 8, 1, 1.0);
            let x = x.as_slice();
            let (cb, db) = stacked_blocks(&h);
            let xp = stack(x);
            let re = cb.mul_vec(&xp);
            let im = db.mul_vec(&xp);
            let hx = h.mul_vec(x).unwrap();
            for m in 0..4 {
                assert!((hx[m] - c(re[m], im[m])).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn adjugate_examples() {
        assert_eq!(diag_adjugate(&[2.0, 3.0, 4.0]), vec![12.0, 8.0, 6.0]);
        assert_eq!(diag_adjugate(&[5.0]), vec![1.0]);
        assert_eq!(diag_adjugate(&[0.0, 3.0, 4.0]), vec![12.0, 0.0, 0.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn stack_roundtrip(v in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 0..40)) {
                let x: Vec<Complex64> = v.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
                prop_assert_eq!(unstack(&stack(&x)), x);
            }

            #[test]
            fn adjugate_times_entry_is_det(p in prop::collection::vec(-10.0f64..10.0, 1..9)) {
                let det: f64 = p.iter().product();
                let adj = diag_adjugate(&p);
                for (a, pm) in adj.iter().zip(&p) {
                    prop_assert!((a * pm - det).abs() <= 1e-12 * det.abs().max(1e-300));
                }
            }
        }
    }
}
