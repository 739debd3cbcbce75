//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Dimensions in this toolkit stay small (≤ ~100), so plain Jacobi rotations
//! are plenty and keep the whole stack dependency-free and deterministic.

use num_complex::Complex;

use crate::error::Error;
use crate::mat::ComplexMatrix;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition M = Q diag(λ) Q† of a Hermitian matrix.
///
/// The input is symmetrized to (M + M†)/2 first; asymmetry beyond the scalar
/// tolerance is an error. Eigenvalues come back ascending, eigenvectors as
/// the matching columns of the returned unitary.
pub fn hermitian_eigensystem<T: Scalar>(
    m: &ComplexMatrix<T>,
) -> Result<(Vec<T>, ComplexMatrix<T>), Error> {
    if !m.is_square() {
        return Err(Error::Dimension("eigensystem requires a square matrix".into()));
    }
    let asym = m.hermitian_asymmetry();
    if asym > T::TOL_HERMITIAN {
        return Err(Error::NotHermitian { asymmetry: asym.to_f64().unwrap_or(f64::NAN) });
    }
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut q = ComplexMatrix::<T>::identity(n);

    let scale = a.frobenius_norm().max(T::one());
    let target = T::TOL_JACOBI_OFF * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::Convergence(format!(
            "Jacobi did not reach off-diagonal target after {} sweeps",
            MAX_SWEEPS
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    Ok((eigenvalues, vectors))
}

fn off_diagonal_norm<T: Scalar>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s = s + a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating a[p,r] (p < r).
fn rotate<T: Scalar>(a: &mut ComplexMatrix<T>, q: &mut ComplexMatrix<T>, p: usize, r: usize) {
    let apr = a[(p, r)];
    let b = apr.norm();
    if b == T::zero() {
        return;
    }
    let phase = apr / Complex::new(b, T::zero());
    let app = a[(p, p)].re;
    let arr = a[(r, r)].re;

    // Zero b*(c²−s²) + (arr−app)*s*c: with t = tanθ, t² − 2τt − 1 = 0,
    // τ = (arr−app)/(2b); pick the smaller-magnitude root.
    let two = T::from_f64(2.0).unwrap();
    let tau = (arr - app) / (two * b);
    // smaller-magnitude root of t² − 2τt − 1 = 0, in the cancellation-free
    // form −1/(|τ| + √(1+τ²)) so large |τ| (tiny off-diagonals) stays exact
    let t = {
        let root = (T::one() + tau * tau).sqrt();
        if tau >= T::zero() {
            -T::one() / (tau + root)
        } else {
            T::one() / (root - tau)
        }
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // Column rotation U: e_p ← c e_p + s e^{-iφ} e_r ; e_r ← −s e^{iφ} e_p + c e_r
    let cc = Complex::new(c, T::zero());
    let sp = phase * Complex::new(s, T::zero()); // s e^{iφ}
    let n = a.rows();

    // A ← U† A U, applied as row then column updates.
    for k in 0..n {
        let akp = a[(k, p)];
        let akr = a[(k, r)];
        a[(k, p)] = akp * cc + akr * sp.conj();
        a[(k, r)] = akr * cc - akp * sp;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let ark = a[(r, k)];
        a[(p, k)] = apk * cc + ark * sp;
        a[(r, k)] = ark * cc - apk * sp.conj();
    }
    // Clean the target entries and enforce real diagonal.
    a[(p, r)] = Complex::new(T::zero(), T::zero());
    a[(r, p)] = Complex::new(T::zero(), T::zero());
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(r, r)] = Complex::new(a[(r, r)].re, T::zero());

    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = qkp * cc + qkr * sp.conj();
        q[(k, r)] = qkr * cc - qkp * sp;
    }
}

/// f(M) = Q diag(f(λ)) Q† for Hermitian M.
pub fn hermitian_function<T: Scalar>(
    m: &ComplexMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> Result<ComplexMatrix<T>, Error> {
    let (vals, q) = hermitian_eigensystem(m)?;
    let n = m.rows();
    let mut d = ComplexMatrix::<T>::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = f(vals[i]);
    }
    Ok(q.mul(&d).mul(&q.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(vals: &[f64], q: &M) -> M {
        let n = vals.len();
        let mut d = M::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = c(vals[i], 0.0);
        }
        q.mul(&d).mul(&q.adjoint())
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let (vals, _) = hermitian_eigensystem(&M::identity(2)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0]);
    }

    #[test]
    fn sigma_x_spectrum() {
        let sx = M::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let (vals, q) = hermitian_eigensystem(&sx).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!(reconstruct(&vals, &q).max_abs_diff(&sx) < 1e-12);
    }

    #[test]
    fn diagonal_input_is_passed_through_sorted() {
        let d = M::from_vec(2, 2, vec![c(0.75, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)]).unwrap();
        let (vals, q) = hermitian_eigensystem(&d).unwrap();
        assert_eq!(vals, vec![0.25, 0.75]);
        // columns are standard basis vectors up to order
        assert!((q[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((q[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = M::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn random_hermitian_reconstruction_up_to_side_36() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &n in &[2usize, 3, 5, 8, 12, 20, 36] {
            let mut m = M::zeros(n, n);
            for r in 0..n {
                m[(r, r)] = c(rng.gen::<f64>() * 2.0 - 1.0, 0.0);
                for q in (r + 1)..n {
                    let z = c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
                    m[(r, q)] = z;
                    m[(q, r)] = z.conj();
                }
            }
            let (vals, q) = hermitian_eigensystem(&m).unwrap();
            assert!(reconstruct(&vals, &q).max_abs_diff(&m) < 1e-10, "n={}", n);
            // unitarity of Q
            let qq = q.adjoint().mul(&q);
            assert!(qq.max_abs_diff(&M::identity(n)) < 1e-10, "n={}", n);
            // ascending order
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
