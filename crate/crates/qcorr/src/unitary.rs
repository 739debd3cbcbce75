//! Unitary completion of isometries and related helpers.

use num_complex::Complex;

use crate::error::Error;
use crate::mat::ComplexMatrix;
use crate::scalar::Scalar;

/// Which dimension of the input carries the orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// n×k input with orthonormal columns; output first k columns preserved.
    Columns,
    /// k×n input with orthonormal rows; output first k rows preserved.
    Rows,
}

/// Extends an isometry to a full unitary.
///
/// The given block is preserved exactly; the remaining columns (rows) are
/// produced by Gram-Schmidt over the standard basis in index order, skipping
/// candidates that become near-dependent.
pub fn complete_to_unitary<T: Scalar>(
    iso: &ComplexMatrix<T>,
    orientation: Orientation,
) -> Result<ComplexMatrix<T>, Error> {
    match orientation {
        Orientation::Columns => complete_columns(iso),
        Orientation::Rows => Ok(complete_columns(&iso.adjoint())?.adjoint()),
    }
}

fn complete_columns<T: Scalar>(iso: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, Error> {
    let n = iso.rows();
    let k = iso.cols();
    if k > n {
        return Err(Error::Dimension(format!("isometry has more columns ({}) than rows ({})", k, n)));
    }

    let mut basis: Vec<Vec<Complex<T>>> = (0..k).map(|j| iso.column(j)).collect();

    // Check orthonormality of the given block.
    let mut worst = T::zero();
    for i in 0..k {
        for j in i..k {
            let ip = inner(&basis[i], &basis[j]);
            let expect = if i == j { T::one() } else { T::zero() };
            worst = worst.max((ip - Complex::new(expect, T::zero())).norm());
        }
    }
    if worst > T::TOL_ORTHO {
        return Err(Error::NotOrthonormal { residual: worst.to_f64().unwrap_or(f64::NAN) });
    }

    for cand in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![Complex::new(T::zero(), T::zero()); n];
        v[cand] = Complex::new(T::one(), T::zero());
        // two orthogonalization passes for numerical safety
        for _ in 0..2 {
            for b in &basis {
                let ip = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = *vi - bi * ip;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if norm > T::TOL_FILL {
            let inv = Complex::new(T::one() / norm, T::zero());
            for vi in v.iter_mut() {
                *vi = *vi * inv;
            }
            basis.push(v);
        }
    }
    if basis.len() != n {
        return Err(Error::CompletionFailed(format!(
            "could only assemble {} of {} orthonormal directions",
            basis.len(),
            n
        )));
    }

    Ok(ComplexMatrix::from_fn(n, n, |r, c| basis[c][r]))
}

fn inner<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |s, (x, y)| s + x.conj() * y)
}

/// Max-abs residual of U†U − 1 and UU† − 1.
pub fn unitarity_residual<T: Scalar>(u: &ComplexMatrix<T>) -> T {
    let n = u.rows();
    let id = ComplexMatrix::<T>::identity(n);
    let a = u.adjoint().mul(u).max_abs_diff(&id);
    let b = u.mul(&u.adjoint()).max_abs_diff(&id);
    a.max(b)
}

pub fn is_unitary<T: Scalar>(u: &ComplexMatrix<T>) -> bool {
    u.is_square() && unitarity_residual(u) <= T::TOL_ORTHO
}
