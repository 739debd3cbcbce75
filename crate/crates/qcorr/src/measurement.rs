//! POVMs and projective measurements on subsystem B, plus the conditioning
//! map producing the outcome ensemble {p_k, ρ_{A|k}}.

use num_complex::Complex64;
use serde::Deserialize;

use crate::correlations::von_neumann_entropy_mat;
use crate::eig::hermitian_eigensystem;
use crate::error::Error;
use crate::mat::partial_trace;
use crate::rng::{complex_gaussian_vec, SeededRng};
use crate::state::{format_f64, DensityMatrix};
use crate::unitary::unitarity_residual;
use crate::{C64, DimSplit, Mat, Result};

const TOL_HERMITIAN: f64 = 1e-10;
const TOL_PSD: f64 = 1e-10;
const TOL_COMPLETENESS: f64 = 1e-10;
const TOL_ORTHOGONALITY: f64 = 1e-9;

/// Outcomes with probability below this are dropped from the ensemble; they
/// contribute nothing to Σ p_k S(ρ_{A|k}) and would otherwise divide by ~0.
pub const OUTCOME_EPS: f64 = 1e-12;

pub const POVM_SCHEMA_VERSION: u32 = 1;

/// Positive operator valued measurement {E_k} on a d-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<Mat>,
}

impl Povm {
    pub fn new(dim: usize, elements: Vec<Mat>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let mut sum = Mat::zeros(dim, dim);
        for (k, e) in elements.iter().enumerate() {
            if !e.is_square() || e.rows() != dim {
                return Err(Error::InvalidPovm(format!("element {} has wrong dimension", k)));
            }
            if !e.is_finite() {
                return Err(Error::NonFinite);
            }
            let asym = e.hermitian_asymmetry();
            if asym > TOL_HERMITIAN {
                return Err(Error::InvalidPovm(format!(
                    "element {} not Hermitian (asymmetry {:.3e})",
                    k, asym
                )));
            }
            let (vals, _) = hermitian_eigensystem(e)?;
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < -TOL_PSD {
                return Err(Error::InvalidPovm(format!(
                    "element {} not PSD (min eigenvalue {:.3e})",
                    k, min
                )));
            }
            sum = sum.add(e);
        }
        let residual = sum.max_abs_diff(&Mat::identity(dim));
        if residual > TOL_COMPLETENESS {
            return Err(Error::InvalidPovm(format!(
                "completeness violated: |ΣE − 1| = {:.3e}",
                residual
            )));
        }
        Ok(Povm { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Projective (von Neumann) measurement: mutually orthogonal projectors
/// summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    dim: usize,
    projectors: Vec<Mat>,
}

impl ProjectiveMeasurement {
    pub fn new(dim: usize, projectors: Vec<Mat>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidProjective("no projectors".into()));
        }
        let mut sum = Mat::zeros(dim, dim);
        for p in &projectors {
            if !p.is_square() || p.rows() != dim {
                return Err(Error::InvalidProjective("projector has wrong dimension".into()));
            }
            sum = sum.add(p);
        }
        let completeness = sum.max_abs_diff(&Mat::identity(dim));
        if completeness > TOL_COMPLETENESS {
            return Err(Error::InvalidProjective(format!(
                "completeness violated: |ΣΠ − 1| = {:.3e}",
                completeness
            )));
        }
        for (k, pk) in projectors.iter().enumerate() {
            for (j, pj) in projectors.iter().enumerate() {
                let prod = pk.mul(pj);
                let expect = if k == j { pk.clone() } else { Mat::zeros(dim, dim) };
                let r = prod.max_abs_diff(&expect);
                if r > TOL_ORTHOGONALITY {
                    return Err(Error::InvalidProjective(format!(
                        "orthogonality violated at ({}, {}): residual {:.3e}",
                        k, j, r
                    )));
                }
            }
        }
        Ok(ProjectiveMeasurement { dim, projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[Mat] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    /// Every projective measurement is a POVM.
    pub fn as_povm(&self) -> Povm {
        Povm { dim: self.dim, elements: self.projectors.clone() }
    }
}

/// Rank-1 projectors onto the columns of a unitary.
pub fn projective_from_unitary(u: &Mat) -> Result<ProjectiveMeasurement> {
    let residual = unitarity_residual(u);
    if !u.is_square() || residual > 1e-10 {
        return Err(Error::NotUnitary { residual });
    }
    let dim = u.rows();
    let projectors = (0..dim)
        .map(|j| {
            let col = u.column(j);
            Mat::outer(&col, &col)
        })
        .collect();
    Ok(ProjectiveMeasurement { dim, projectors })
}

/// Qubit measurement along the Bloch direction (θ, φ):
/// |n⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩ and its orthocomplement.
pub fn qubit_projective(theta: f64, phi: f64) -> ProjectiveMeasurement {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let phase = Complex64::new(phi.cos(), phi.sin());
    let up = [Complex64::new(ct, 0.0), phase * st];
    let dn = [Complex64::new(st, 0.0), -phase * ct];
    ProjectiveMeasurement {
        dim: 2,
        projectors: vec![Mat::outer(&up, &up), Mat::outer(&dn, &dn)],
    }
}

/// Computational-basis projectors on dimension d.
pub fn computational_basis(dim: usize) -> ProjectiveMeasurement {
    let projectors = (0..dim)
        .map(|i| {
            let mut p = Mat::zeros(dim, dim);
            p[(i, i)] = Complex64::new(1.0, 0.0);
            p
        })
        .collect();
    ProjectiveMeasurement { dim, projectors }
}

/// Trine POVM on a qubit: {(2/3)|ψ_j⟩⟨ψ_j|} with three coplanar unit vectors
/// at 120°.
pub fn trine_povm() -> Povm {
    let elements = (0..3)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * (j as f64) / 3.0;
            let v = [Complex64::new(a.cos(), 0.0), Complex64::new(a.sin(), 0.0)];
            Mat::outer(&v, &v).scale_re(2.0 / 3.0)
        })
        .collect();
    Povm { dim: 2, elements }
}

/// Outcome ensemble of Eq-style conditioning: p_k with ρ_{A|k}.
#[derive(Debug, Clone)]
pub struct ConditionalEnsemble {
    pub probabilities: Vec<f64>,
    pub conditionals: Vec<DensityMatrix>,
    /// Outcome indices dropped because p_k < [`OUTCOME_EPS`].
    pub dropped: Vec<usize>,
}

/// p_k = Tr[(1_A ⊗ E_k) ρ_AB], ρ_{A|k} = Tr_B[(1_A ⊗ E_k) ρ_AB] / p_k.
pub fn condition_on_b(rho: &DensityMatrix, m: &Povm) -> Result<ConditionalEnsemble> {
    let split = rho.split();
    if m.dim() != split.dim_b {
        return Err(Error::Dimension(format!(
            "POVM dimension {} does not match dim_b {}",
            m.dim(),
            split.dim_b
        )));
    }
    let id_a = Mat::identity(split.dim_a);
    let mut probabilities = Vec::new();
    let mut conditionals = Vec::new();
    let mut dropped = Vec::new();
    for (k, e) in m.elements().iter().enumerate() {
        let weighted = id_a.kron(e).mul(rho.matrix());
        let p = weighted.trace().re;
        if p < OUTCOME_EPS {
            dropped.push(k);
            continue;
        }
        let cond = partial_trace(&weighted, &split.dims(), &[0])?.scale_re(1.0 / p);
        let cond = DensityMatrix::from_matrix(cond, DimSplit::new(split.dim_a, 1)?)?;
        probabilities.push(p);
        conditionals.push(cond);
    }
    Ok(ConditionalEnsemble { probabilities, conditionals, dropped })
}

/// S(ρ_A) − Σ_k p_k S(ρ_{A|k}) for a fixed measurement: the classical
/// information about A extracted by measuring B with `m`.
pub fn fixed_measurement_classical_info(rho: &DensityMatrix, m: &Povm) -> Result<f64> {
    let ensemble = condition_on_b(rho, m)?;
    let s_a = von_neumann_entropy_mat(&rho.marginal_a())?;
    let mut avg = 0.0;
    for (p, cond) in ensemble.probabilities.iter().zip(&ensemble.conditionals) {
        avg += p * von_neumann_entropy_mat(cond.matrix())?;
    }
    Ok(s_a - avg)
}

// ---------------------------------------------------------------------------
// Random measurement fixtures (used by scans and the verification suites).
// ---------------------------------------------------------------------------

/// Unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> Mat {
    loop {
        let g = Mat::from_vec(dim, dim, complex_gaussian_vec(rng, dim * dim)).unwrap();
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        let mut ok = true;
        'outer: for j in 0..dim {
            let mut v = g.column(j);
            for _ in 0..2 {
                for b in &cols {
                    let ip: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= bi * ip;
                    }
                }
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break 'outer;
            }
            cols.push(v.iter().map(|z| z / norm).collect());
        }
        if ok {
            return Mat::from_fn(dim, dim, |r, c| cols[c][r]);
        }
    }
}

pub fn random_projective(dim: usize, rng: &mut SeededRng) -> ProjectiveMeasurement {
    projective_from_unitary(&random_unitary(dim, rng)).expect("Gram-Schmidt output is unitary")
}

/// Two-outcome POVM {E, 1−E} with the spectrum of E squashed into
/// [0.05, 0.95], so both outcomes are full rank.
pub fn random_two_outcome_povm(dim: usize, rng: &mut SeededRng) -> Povm {
    let g = Mat::from_vec(dim, dim, complex_gaussian_vec(rng, dim * dim)).unwrap();
    let h = g.symmetrized();
    let (vals, q) = hermitian_eigensystem(&h).unwrap();
    let lo = vals[0];
    let hi = vals[vals.len() - 1];
    let span = (hi - lo).max(1e-12);
    let mut d = Mat::zeros(dim, dim);
    for i in 0..dim {
        d[(i, i)] = Complex64::new(0.05 + 0.9 * (vals[i] - lo) / span, 0.0);
    }
    let e = q.mul(&d).mul(&q.adjoint()).symmetrized();
    let rest = Mat::identity(dim).sub(&e).symmetrized();
    Povm { dim, elements: vec![e, rest] }
}

/// Rank-1 POVM with `n_out` outcomes: Gaussian vectors v_k, M_k = |v_k⟩⟨v_k|,
/// completeness enforced by E_k = T^{-1/2} M_k T^{-1/2} with T = Σ M_k.
pub fn random_rank1_povm(dim: usize, n_out: usize, rng: &mut SeededRng) -> Povm {
    loop {
        let vectors: Vec<Vec<C64>> = (0..n_out).map(|_| complex_gaussian_vec(rng, dim)).collect();
        if let Ok(p) = rank1_povm_from_vectors(dim, &vectors) {
            return p;
        }
    }
}

/// Builds the completeness-corrected rank-1 POVM from unnormalized vectors.
/// Fails if T = Σ |v_k⟩⟨v_k| has an eigenvalue below 1e-8.
pub fn rank1_povm_from_vectors(dim: usize, vectors: &[Vec<C64>]) -> Result<Povm> {
    let mut t = Mat::zeros(dim, dim);
    for v in vectors {
        t = t.add(&Mat::outer(v, v));
    }
    let (vals, q) = hermitian_eigensystem(&t.symmetrized())?;
    if vals.iter().any(|&v| v < 1e-8) {
        return Err(Error::InvalidPovm("vector frame is near-degenerate".into()));
    }
    let mut d = Mat::zeros(dim, dim);
    for i in 0..dim {
        d[(i, i)] = Complex64::new(1.0 / vals[i].sqrt(), 0.0);
    }
    let t_inv_sqrt = q.mul(&d).mul(&q.adjoint());
    let elements: Vec<Mat> = vectors
        .iter()
        .map(|v| {
            let w = t_inv_sqrt.matvec(v);
            Mat::outer(&w, &w)
        })
        .collect();
    Povm::new(dim, elements)
}

// ---------------------------------------------------------------------------
// File format: {"schema_version":1,"dim":d,"elements":[[[re,im],...],...]}
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct PovmFile {
    schema_version: u32,
    dim: usize,
    elements: Vec<Vec<[f64; 2]>>,
}

pub fn to_povm_json(m: &Povm) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\n  \"schema_version\": {},\n  \"dim\": {},\n  \"elements\": [\n",
        POVM_SCHEMA_VERSION,
        m.dim
    ));
    for (k, e) in m.elements.iter().enumerate() {
        out.push_str("    [");
        let n = m.dim * m.dim;
        for (i, z) in e.data().iter().enumerate() {
            let sep = if i + 1 == n { "" } else { ", " };
            out.push_str(&format!("[{}, {}]{}", format_f64(z.re), format_f64(z.im), sep));
        }
        let sep = if k + 1 == m.elements.len() { "" } else { "," };
        out.push_str(&format!("]{}\n", sep));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn from_povm_json(text: &str) -> Result<Povm> {
    let file: PovmFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("povm file: {}", e)))?;
    if file.schema_version != POVM_SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "unsupported povm schema_version {}",
            file.schema_version
        )));
    }
    let d = file.dim;
    let elements: Result<Vec<Mat>> = file
        .elements
        .iter()
        .map(|entries| {
            let data: Vec<C64> = entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            Mat::from_vec(d, d, data)
        })
        .collect();
    Povm::new(d, elements?)
}

pub fn write_povm_file(path: &std::path::Path, m: &Povm) -> Result<()> {
    std::fs::write(path, to_povm_json(m))?;
    Ok(())
}

pub fn read_povm_file(path: &std::path::Path) -> Result<Povm> {
    let text = std::fs::read_to_string(path)?;
    from_povm_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::state::{bell_phi_plus, maximally_mixed, product, random_mixed_ginibre, werner};

    #[test]
    fn identity_unitary_gives_computational_basis() {
        let pm = projective_from_unitary(&Mat::identity(2)).unwrap();
        assert!(pm.projectors()[0].max_abs_diff(&computational_basis(2).projectors()[0]) < 1e-15);
        assert!(pm.projectors()[1].max_abs_diff(&computational_basis(2).projectors()[1]) < 1e-15);
    }

    #[test]
    fn hadamard_gives_plus_minus_basis() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = Mat::from_vec(
            2,
            2,
            vec![
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
        )
        .unwrap();
        let pm = projective_from_unitary(&h).unwrap();
        let plus = [Complex64::new(s, 0.0), Complex64::new(s, 0.0)];
        assert!(pm.projectors()[0].max_abs_diff(&Mat::outer(&plus, &plus)) < 1e-12);
    }

    #[test]
    fn projective_from_non_unitary_is_rejected() {
        let m = Mat::from_vec(
            2,
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(projective_from_unitary(&m).is_err());
    }

    #[test]
    fn qubit_projective_angles() {
        let pm = qubit_projective(0.0, 0.0);
        assert!(pm.projectors()[0].max_abs_diff(&computational_basis(2).projectors()[0]) < 1e-15);
        let pm = qubit_projective(std::f64::consts::FRAC_PI_2, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [Complex64::new(s, 0.0), Complex64::new(s, 0.0)];
        assert!(pm.projectors()[0].max_abs_diff(&Mat::outer(&plus, &plus)) < 1e-12);
    }

    #[test]
    fn antipodal_angles_swap_outcomes() {
        let (theta, phi) = (0.7, 1.3);
        let a = qubit_projective(theta, phi);
        let b = qubit_projective(std::f64::consts::PI - theta, phi + std::f64::consts::PI);
        assert!(a.projectors()[0].max_abs_diff(&b.projectors()[1]) < 1e-12);
        assert!(a.projectors()[1].max_abs_diff(&b.projectors()[0]) < 1e-12);
    }

    #[test]
    fn random_projective_passes_invariants() {
        let mut rng = seeded(3);
        for dim in [2usize, 3] {
            let pm = random_projective(dim, &mut rng);
            assert!(ProjectiveMeasurement::new(dim, pm.projectors().to_vec()).is_ok());
        }
    }

    #[test]
    fn trine_is_a_valid_povm() {
        let t = trine_povm();
        assert!(Povm::new(2, t.elements().to_vec()).is_ok());
    }

    #[test]
    fn bell_with_computational_basis() {
        let rho = bell_phi_plus();
        let m = computational_basis(2).as_povm();
        let ens = condition_on_b(&rho, &m).unwrap();
        assert_eq!(ens.probabilities.len(), 2);
        assert!((ens.probabilities[0] - 0.5).abs() < 1e-12);
        assert!((ens.probabilities[1] - 0.5).abs() < 1e-12);
        // conditionals are |0⟩⟨0| and |1⟩⟨1|
        let p0 = computational_basis(2).projectors()[0].clone();
        let p1 = computational_basis(2).projectors()[1].clone();
        assert!(ens.conditionals[0].matrix().max_abs_diff(&p0) < 1e-12);
        assert!(ens.conditionals[1].matrix().max_abs_diff(&p1) < 1e-12);
    }

    #[test]
    fn product_state_conditionals_equal_marginal() {
        let a = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 1 }, 2, 1).unwrap();
        let b = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 1 }, 2, 2).unwrap();
        let rho = product(&a, &b);
        let mut rng = seeded(9);
        let m = random_two_outcome_povm(2, &mut rng);
        let ens = condition_on_b(&rho, &m).unwrap();
        for cond in &ens.conditionals {
            assert!(cond.matrix().max_abs_diff(&rho.marginal_a()) < 1e-10);
        }
    }

    // Independent index-sum oracle for Eq-style conditioning:
    // p_k = Σ_{i,j,j'} E_k[j',j] ρ[(i,j),(i,j')]  — computed entry by entry.
    fn oracle_condition(rho: &DensityMatrix, e: &Mat) -> (f64, Mat) {
        let [da, db] = rho.split().dims();
        let mut num = Mat::zeros(da, da);
        for i in 0..da {
            for ip in 0..da {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..db {
                    for jp in 0..db {
                        // Tr_B[(1⊗E)ρ][i,i'] = Σ_{j,j'} E[j,j'] ρ[(i,j'),(i',j)]
                        s += e[(j, jp)] * rho.matrix()[(i * db + jp, ip * db + j)];
                    }
                }
                num[(i, ip)] = s;
            }
        }
        let p = num.trace().re;
        (p, num.scale_re(1.0 / p))
    }

    #[test]
    fn werner_half_conditioning_matches_index_sum_oracle() {
        let rho = werner(0.5).unwrap();
        let m = computational_basis(2).as_povm();
        let ens = condition_on_b(&rho, &m).unwrap();
        for (k, e) in m.elements().iter().enumerate() {
            let (p, cond) = oracle_condition(&rho, e);
            assert!((ens.probabilities[k] - p).abs() < 1e-12);
            assert!((p - 0.5).abs() < 1e-12);
            assert!(ens.conditionals[k].matrix().max_abs_diff(&cond) < 1e-12);
        }
    }

    #[test]
    fn conditionals_average_back_to_marginal() {
        let mut rng = seeded(17);
        for seed in 0..10u64 {
            let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 3 }, 4, seed).unwrap();
            let m = random_rank1_povm(3, 4, &mut rng);
            let ens = condition_on_b(&rho, &m).unwrap();
            let psum: f64 = ens.probabilities.iter().sum();
            assert!((psum - 1.0).abs() < 1e-9);
            let mut avg = Mat::zeros(2, 2);
            for (p, c) in ens.probabilities.iter().zip(&ens.conditionals) {
                avg = avg.add(&c.matrix().scale_re(*p));
            }
            assert!(avg.max_abs_diff(&rho.marginal_a()) < 1e-10);
        }
    }

    #[test]
    fn bell_classical_info_is_one_bit() {
        let j = fixed_measurement_classical_info(&bell_phi_plus(), &computational_basis(2).as_povm())
            .unwrap();
        assert!((j - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_and_maximally_mixed_give_zero_info() {
        let a = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 1 }, 2, 3).unwrap();
        let b = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 1 }, 2, 4).unwrap();
        let mut rng = seeded(5);
        let m = random_two_outcome_povm(2, &mut rng);
        let j = fixed_measurement_classical_info(&product(&a, &b), &m).unwrap();
        assert!(j.abs() < 1e-10);
        let j = fixed_measurement_classical_info(&maximally_mixed(DimSplit { dim_a: 2, dim_b: 2 }), &m)
            .unwrap();
        assert!(j.abs() < 1e-10);
    }

    #[test]
    fn povm_completeness_violation_is_rejected() {
        let e = Mat::identity(2).scale_re(0.4);
        assert!(Povm::new(2, vec![e.clone(), e]).is_err());
    }

    #[test]
    fn povm_file_round_trip() {
        let mut rng = seeded(8);
        let m = random_rank1_povm(2, 4, &mut rng);
        let text = to_povm_json(&m);
        let back = from_povm_json(&text).unwrap();
        assert_eq!(back.len(), m.len());
        for (a, b) in m.elements().iter().zip(back.elements()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
    }
}
