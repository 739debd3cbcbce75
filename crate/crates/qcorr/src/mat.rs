//! Dense complex matrices: tensor products and partial traces.
//!
//! Everything downstream (states, measurements, dilations) is carried by
//! [`ComplexMatrix`]. Matrices are row-major and immutable in practice;
//! all operations return fresh values. Tensor factor 0 is the slowest
//! index, i.e. `(a ⊗ b)[(ia*rb+ib), (ja*cb+jb)] = a[ia,ja] * b[ib,jb]`.

use num_complex::Complex;

use crate::error::Error;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

/// Bipartite dimension annotation for a square matrix of side `dim_a * dim_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimSplit {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl DimSplit {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self, Error> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension("subsystem dimensions must be positive".into()));
        }
        Ok(DimSplit { dim_a, dim_b })
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn dims(&self) -> [usize; 2] {
        [self.dim_a, self.dim_b]
    }

    pub fn swapped(&self) -> DimSplit {
        DimSplit { dim_a: self.dim_b, dim_b: self.dim_a }
    }
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "entry count {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Column vector |i⟩ of dimension n.
    pub fn basis_vector(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n, 1);
        v[(i, 0)] = Complex::new(T::one(), T::zero());
        v
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: Complex<T>) -> Self {
        let data = self.data.iter().map(|a| a * k).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, k: T) -> Self {
        self.scale(Complex::new(k, T::zero()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] = out.data[r * other.cols + c] + a * other.data[k * other.cols + c];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.data[c * self.cols + r].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        assert!(self.is_square());
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            t = t + self.data[i * self.cols + i];
        }
        t
    }

    /// Kronecker product; `self` is the slow factor.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.data[ia * self.cols + ja];
                for ib in 0..other.rows {
                    for jb in 0..other.cols {
                        out.data[(ia * other.rows + ib) * cols + ja * other.cols + jb] =
                            a * other.data[ib * other.cols + jb];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
    }

    /// Largest |m[i,j] - conj(m[j,i])| over all pairs.
    pub fn hermitian_asymmetry(&self) -> T {
        assert!(self.is_square());
        let mut worst = T::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.data[r * self.cols + c] - self.data[c * self.cols + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// (M + M†)/2.
    pub fn symmetrized(&self) -> Self {
        let half = Complex::new(T::from_f64(0.5).unwrap(), T::zero());
        self.add(&self.adjoint()).scale(half)
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self.data[r * self.cols + j]).collect()
    }

    /// |u⟩⟨v| from two same-length vectors.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut s = Complex::new(T::zero(), T::zero());
                for c in 0..self.cols {
                    s = s + self.data[r * self.cols + c] * v[c];
                }
                s
            })
            .collect()
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Alias used throughout the higher layers.
pub type Mat<T> = ComplexMatrix<T>;

/// Partial trace over the tensor factors *not* listed in `keep`.
///
/// `dims` lists the factor dimensions, factor 0 slowest; their product must
/// equal the matrix side. `keep` is a strictly increasing list of factor
/// indices; the result lives on the kept factors in their original order.
pub fn partial_trace<T: Scalar>(
    m: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>, Error> {
    if !m.is_square() {
        return Err(Error::Dimension("partial trace requires a square matrix".into()));
    }
    let side: usize = dims.iter().product();
    if side != m.rows() {
        return Err(Error::Dimension(format!(
            "factor dims {:?} (product {}) do not match matrix side {}",
            dims,
            side,
            m.rows()
        )));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension("keep selector must be strictly increasing factor indices".into()));
    }

    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dim: usize = keep.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Stride of each factor in the flat index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let flat = |multi_keep: usize, multi_traced: usize| -> usize {
        let mut idx = 0;
        let mut mk = multi_keep;
        for &f in keep.iter().rev() {
            idx += (mk % dims[f]) * strides[f];
            mk /= dims[f];
        }
        let mut mt = multi_traced;
        for &f in traced.iter().rev() {
            idx += (mt % dims[f]) * strides[f];
            mt /= dims[f];
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for i in 0..kept_dim {
        for j in 0..kept_dim {
            let mut s = Complex::new(T::zero(), T::zero());
            for t in 0..traced_dim {
                s = s + m[(flat(i, t), flat(j, t))];
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Kronecker product as a free function.
pub fn tensor_product<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

/// Permutation matrix mapping the layout H1 ⊗ H2 to H2 ⊗ H1:
/// basis index `i1*d2 + i2` is sent to `i2*d1 + i1`.
pub fn swap_factors<T: Scalar>(d1: usize, d2: usize) -> ComplexMatrix<T> {
    let n = d1 * d2;
    let mut p = ComplexMatrix::zeros(n, n);
    for i1 in 0..d1 {
        for i2 in 0..d2 {
            p[(i2 * d1 + i1, i1 * d2 + i2)] = Complex::new(T::one(), T::zero());
        }
    }
    p
}
