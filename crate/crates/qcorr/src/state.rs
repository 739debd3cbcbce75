//! Bipartite density matrices: validation, named families, random ensembles,
//! and the on-disk state format.

use num_complex::Complex64;
use serde::Deserialize;

use crate::eig::hermitian_eigensystem;
use crate::error::Error;
use crate::mat::{partial_trace, swap_factors, DimSplit};
use crate::rng::{complex_gaussian_vec, seeded};
use crate::{C64, Mat, Result};

const TOL_HERMITIAN: f64 = 1e-10;
const TOL_TRACE: f64 = 1e-10;
const TOL_PSD: f64 = 1e-10;

pub const STATE_SCHEMA_VERSION: u32 = 1;

/// Validated bipartite density operator: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Mat,
    split: DimSplit,
}

impl DensityMatrix {
    /// Validates `m` as a density operator on `split`.
    ///
    /// Eigenvalues in [−1e-10, 0) are treated as round-off: they are clipped
    /// to zero and the spectrum renormalized to unit trace. Anything more
    /// negative is rejected.
    pub fn from_matrix(m: Mat, split: DimSplit) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        if !m.is_square() || m.rows() != split.total() {
            return Err(Error::Dimension(format!(
                "matrix side {} does not equal dim_a*dim_b = {}",
                m.rows(),
                split.total()
            )));
        }
        let asym = m.hermitian_asymmetry();
        if asym > TOL_HERMITIAN {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        let m = m.symmetrized();
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        let (vals, q) = hermitian_eigensystem(&m)?;
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -TOL_PSD {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let matrix = if min < 0.0 {
            let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
            let sum: f64 = clipped.iter().sum();
            let n = m.rows();
            let mut d = Mat::zeros(n, n);
            for i in 0..n {
                d[(i, i)] = Complex64::new(clipped[i] / sum, 0.0);
            }
            q.mul(&d).mul(&q.adjoint())
        } else {
            m
        };
        Ok(DensityMatrix { matrix, split })
    }

    /// |v⟩⟨v| / ⟨v|v⟩.
    pub fn pure_from_vector(v: &[C64], split: DimSplit) -> Result<Self> {
        if v.len() != split.total() {
            return Err(Error::Dimension(format!(
                "vector length {} does not equal dim_a*dim_b = {}",
                v.len(),
                split.total()
            )));
        }
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::ZeroVector);
        }
        let normed: Vec<C64> = v.iter().map(|z| z / norm_sq.sqrt()).collect();
        Ok(DensityMatrix { matrix: Mat::outer(&normed, &normed), split })
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn split(&self) -> DimSplit {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.split.total()
    }

    /// ρ_A = Tr_B[ρ_AB].
    pub fn marginal_a(&self) -> Mat {
        partial_trace(&self.matrix, &self.split.dims(), &[0]).expect("valid split")
    }

    /// ρ_B = Tr_A[ρ_AB].
    pub fn marginal_b(&self) -> Mat {
        partial_trace(&self.matrix, &self.split.dims(), &[1]).expect("valid split")
    }

    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).trace().re
    }

    /// The same state viewed as ρ_BA; measurements stay defined on "B",
    /// so J(B:A) of the original is J(A:B) of the swap.
    pub fn swap_subsystems(&self) -> DensityMatrix {
        let p = swap_factors::<f64>(self.split.dim_a, self.split.dim_b);
        DensityMatrix {
            matrix: p.mul(&self.matrix).mul(&p.adjoint()),
            split: self.split.swapped(),
        }
    }
}

/// |ψ⟩⟨ψ| with ψ a normalized vector of iid standard complex Gaussians.
pub fn random_pure_haar(split: DimSplit, seed: u64) -> DensityMatrix {
    let mut rng = seeded(seed);
    let v = complex_gaussian_vec(&mut rng, split.total());
    DensityMatrix::pure_from_vector(&v, split).expect("Gaussian vector is nonzero")
}

/// ρ = GG†/Tr(GG†) with G a (d_a·d_b)×rank complex Gaussian matrix.
pub fn random_mixed_ginibre(split: DimSplit, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = split.total();
    if rank == 0 || rank > n {
        return Err(Error::RankOutOfRange { rank, max: n });
    }
    let mut rng = seeded(seed);
    let g = Mat::from_vec(n, rank, complex_gaussian_vec(&mut rng, n * rank))?;
    let gg = g.mul(&g.adjoint());
    let tr = gg.trace().re;
    DensityMatrix::from_matrix(gg.scale_re(1.0 / tr), split)
}

/// Random state diagonal in the product computational basis.
pub fn random_classical_classical(split: DimSplit, seed: u64) -> DensityMatrix {
    let mut rng = seeded(seed);
    let n = split.total();
    let raw: Vec<f64> = complex_gaussian_vec(&mut rng, n).iter().map(|z| z.norm_sqr()).collect();
    let sum: f64 = raw.iter().sum();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(raw[i] / sum, 0.0);
    }
    DensityMatrix::from_matrix(m, split).expect("diagonal distribution is a valid state")
}

pub fn bell_phi_plus() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [
        Complex64::new(s, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
    ];
    DensityMatrix::pure_from_vector(&v, DimSplit { dim_a: 2, dim_b: 2 }).unwrap()
}

pub fn singlet() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    DensityMatrix::pure_from_vector(&v, DimSplit { dim_a: 2, dim_b: 2 }).unwrap()
}

/// Werner state ρ = z·|Ψ⁻⟩⟨Ψ⁻| + (1−z)·I₄/4 for z ∈ [0, 1].
pub fn werner(z: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::ParamRange(format!("werner parameter z = {} outside [0, 1]", z)));
    }
    let psi = singlet();
    let m = psi
        .matrix()
        .scale_re(z)
        .add(&Mat::identity(4).scale_re((1.0 - z) / 4.0));
    DensityMatrix::from_matrix(m, DimSplit { dim_a: 2, dim_b: 2 })
}

pub fn maximally_mixed(split: DimSplit) -> DensityMatrix {
    let n = split.total();
    DensityMatrix {
        matrix: Mat::identity(n).scale_re(1.0 / n as f64),
        split,
    }
}

/// ρ_A ⊗ ρ_B.
pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let split = DimSplit { dim_a: a.dim(), dim_b: b.dim() };
    DensityMatrix { matrix: a.matrix().kron(b.matrix()), split }
}

/// Σ_{ij} p(i,j) |i⟩⟨i| ⊗ |j⟩⟨j| from a joint probability table
/// (row index = A, column index = B).
pub fn classical_classical(table: &[Vec<f64>]) -> Result<DensityMatrix> {
    let da = table.len();
    if da == 0 || table[0].is_empty() || table.iter().any(|r| r.len() != table[0].len()) {
        return Err(Error::InvalidDistribution("table must be rectangular and nonempty".into()));
    }
    let db = table[0].len();
    let mut sum = 0.0;
    for row in table {
        for &p in row {
            if p < -1e-12 || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("negative or non-finite entry {}", p)));
            }
            sum += p;
        }
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("table sums to {}", sum)));
    }
    let split = DimSplit { dim_a: da, dim_b: db };
    let mut m = Mat::zeros(da * db, da * db);
    for (i, row) in table.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            let k = i * db + j;
            m[(k, k)] = Complex64::new(p.max(0.0) / sum, 0.0);
        }
    }
    Ok(DensityMatrix { matrix: m, split })
}

// ---------------------------------------------------------------------------
// File format: {"schema_version":1,"dims":[da,db],"matrix":[[re,im],...]}
// row-major, 17 significant digits on write.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct StateFile {
    schema_version: u32,
    dims: [usize; 2],
    matrix: Vec<[f64; 2]>,
}

pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn to_state_json(rho: &DensityMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\n  \"schema_version\": {},\n  \"dims\": [{}, {}],\n  \"matrix\": [\n",
        STATE_SCHEMA_VERSION,
        rho.split.dim_a,
        rho.split.dim_b
    ));
    let n = rho.dim();
    for r in 0..n {
        for c in 0..n {
            let z = rho.matrix[(r, c)];
            let sep = if r == n - 1 && c == n - 1 { "" } else { "," };
            out.push_str(&format!("    [{}, {}]{}\n", format_f64(z.re), format_f64(z.im), sep));
        }
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn from_state_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state file: {}", e)))?;
    if file.schema_version != STATE_SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "unsupported state schema_version {}",
            file.schema_version
        )));
    }
    let split = DimSplit::new(file.dims[0], file.dims[1])?;
    let n = split.total();
    if file.matrix.len() != n * n {
        return Err(Error::Parse(format!(
            "matrix has {} entries, expected {}",
            file.matrix.len(),
            n * n
        )));
    }
    let data: Vec<C64> = file.matrix.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    DensityMatrix::from_matrix(Mat::from_vec(n, n, data)?, split)
}

pub fn write_state_file(path: &std::path::Path, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, to_state_json(rho))?;
    Ok(())
}

pub fn read_state_file(path: &std::path::Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    from_state_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split22() -> DimSplit {
        DimSplit { dim_a: 2, dim_b: 2 }
    }

    #[test]
    fn maximally_mixed_is_accepted() {
        let m = Mat::identity(4).scale_re(0.25);
        let rho = DensityMatrix::from_matrix(m, split22()).unwrap();
        assert!((rho.purity() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn negative_spectrum_is_rejected() {
        let mut m = Mat::zeros(4, 4);
        for (i, v) in [0.6, 0.6, -0.1, -0.1].iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        assert!(matches!(
            DensityMatrix::from_matrix(m, split22()),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn bell_projector_is_pure() {
        let rho = bell_phi_plus();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let m = rho.matrix().clone();
        let again = DensityMatrix::from_matrix(m, split22()).unwrap();
        assert!((again.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clipped_and_renormalized() {
        let mut m = Mat::zeros(4, 4);
        for (i, v) in [0.5 + 5e-11, 0.5 + 5e-11, -5e-11, -5e-11].iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        let rho = DensityMatrix::from_matrix(m, split22()).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
        let (vals, _) = hermitian_eigensystem(rho.matrix()).unwrap();
        assert!(vals.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn pure_from_vector_normalizes() {
        let v = [
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        let rho = DensityMatrix::pure_from_vector(&v, split22()).unwrap();
        assert!(rho.matrix().max_abs_diff(bell_phi_plus().matrix()) < 1e-15);
    }

    #[test]
    fn pure_from_vector_rejects_zero() {
        let v = [Complex64::new(0.0, 0.0); 4];
        assert!(matches!(
            DensityMatrix::pure_from_vector(&v, split22()),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn haar_pure_has_unit_purity_and_is_deterministic() {
        for seed in [0u64, 1, 99] {
            let a = random_pure_haar(split22(), seed);
            assert!((a.purity() - 1.0).abs() < 1e-12);
            let b = random_pure_haar(split22(), seed);
            assert_eq!(a.matrix().data(), b.matrix().data());
        }
    }

    #[test]
    fn distinct_seeds_give_distinct_states() {
        for s in 0..10u64 {
            let a = random_pure_haar(split22(), 2 * s);
            let b = random_pure_haar(split22(), 2 * s + 1);
            assert!(a.matrix().max_abs_diff(b.matrix()) > 1e-6);
        }
    }

    #[test]
    fn ginibre_rank_one_is_pure() {
        let rho = random_mixed_ginibre(split22(), 1, 5).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ginibre_full_rank_has_positive_spectrum() {
        let rho = random_mixed_ginibre(split22(), 4, 5).unwrap();
        let (vals, _) = hermitian_eigensystem(rho.matrix()).unwrap();
        assert!(vals.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn ginibre_rejects_rank_out_of_range() {
        assert!(random_mixed_ginibre(split22(), 5, 0).is_err());
        assert!(random_mixed_ginibre(split22(), 0, 0).is_err());
    }

    #[test]
    fn marginals_are_valid_states() {
        for seed in 0..5u64 {
            let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 3 }, 6, seed).unwrap();
            let ra = DensityMatrix::from_matrix(rho.marginal_a(), DimSplit { dim_a: 2, dim_b: 1 });
            let rb = DensityMatrix::from_matrix(rho.marginal_b(), DimSplit { dim_a: 3, dim_b: 1 });
            assert!(ra.is_ok() && rb.is_ok());
        }
    }

    #[test]
    fn werner_boundaries() {
        let w0 = werner(0.0).unwrap();
        assert!(w0.matrix().max_abs_diff(&Mat::identity(4).scale_re(0.25)) < 1e-15);
        let w1 = werner(1.0).unwrap();
        assert!(w1.matrix().max_abs_diff(singlet().matrix()) < 1e-12);
        assert!(werner(1.5).is_err());
        assert!(werner(-0.1).is_err());
    }

    #[test]
    fn werner_spectrum() {
        for &z in &[0.0, 0.5, 1.0] {
            let (vals, _) = hermitian_eigensystem(werner(z).unwrap().matrix()).unwrap();
            let mut expect = vec![(1.0 - z) / 4.0; 3];
            expect.push((1.0 + 3.0 * z) / 4.0);
            expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (v, e) in vals.iter().zip(&expect) {
                assert!((v - e).abs() < 1e-12, "z={} {:?} vs {:?}", z, vals, expect);
            }
        }
    }

    #[test]
    fn classical_classical_perfect_bit() {
        let rho = classical_classical(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let mut expect = Mat::zeros(4, 4);
        expect[(0, 0)] = Complex64::new(0.5, 0.0);
        expect[(3, 3)] = Complex64::new(0.5, 0.0);
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn swap_subsystems_swaps_marginals() {
        let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 3 }, 4, 11).unwrap();
        let sw = rho.swap_subsystems();
        assert_eq!(sw.split(), DimSplit { dim_a: 3, dim_b: 2 });
        assert!(sw.marginal_a().max_abs_diff(&rho.marginal_b()) < 1e-12);
        assert!(sw.marginal_b().max_abs_diff(&rho.marginal_a()) < 1e-12);
    }

    #[test]
    fn state_file_round_trip() {
        let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 3 }, 3, 7).unwrap();
        let text = to_state_json(&rho);
        let back = from_state_json(&text).unwrap();
        assert!(rho.matrix().max_abs_diff(back.matrix()) < 1e-15);
        assert_eq!(rho.split(), back.split());
    }

    #[test]
    fn state_file_rejects_unknown_major_version() {
        let rho = bell_phi_plus();
        let text = to_state_json(&rho).replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(from_state_json(&text).is_err());
    }
}
