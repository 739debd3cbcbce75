//! Neumark and Stinespring dilations, and the numerical verifier for the
//! entropy-bound proof chain.
//!
//! A POVM on B is lifted to a projective measurement on B⊗B̄ (Neumark), the
//! projective measurement is lifted to a unitary on B⊗B̄⊗C (Stinespring),
//! and the resulting primed states are reduced, their entropies taken, and
//! strong subadditivity applied. Each identity along the way is checked
//! with an explicit residual.

use num_complex::Complex64;

use crate::correlations::{shannon_entropy, von_neumann_entropy_mat};
use crate::eig::{hermitian_eigensystem, hermitian_function};
use crate::error::Error;
use crate::mat::{partial_trace, swap_factors};
use crate::measurement::{condition_on_b, Povm, ProjectiveMeasurement, OUTCOME_EPS};
use crate::state::DensityMatrix;
use crate::unitary::{complete_to_unitary, Orientation};
use crate::{C64, Mat, Result};

/// Default cap on the fully dilated dimension d_A·d_B·ancilla·outcomes.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeumarkConstruction {
    /// Ancilla of dimension n (outcome count); projectors of rank d built
    /// from the √E isometry.
    Canonical,
    /// Elements refined into rank-1 pieces and padded to a multiple of d;
    /// projectors are rank 1. The only construction for which
    /// ρ'_BB̄ = Σ_k p_k Π_k holds literally.
    Rank1,
}

impl NeumarkConstruction {
    pub fn as_str(&self) -> &'static str {
        match self {
            NeumarkConstruction::Canonical => "canonical",
            NeumarkConstruction::Rank1 => "rank1",
        }
    }
}

impl std::str::FromStr for NeumarkConstruction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(NeumarkConstruction::Canonical),
            "rank1" => Ok(NeumarkConstruction::Rank1),
            other => Err(Error::ParamRange(format!("unknown construction '{}'", other))),
        }
    }
}

/// Projective extension of a POVM on H_B ⊗ H_B̄.
///
/// `source` is the POVM the projectors compress back to; for the rank-1
/// construction this is the refined (and zero-padded) element list, one per
/// projector.
#[derive(Debug, Clone)]
pub struct NeumarkExtension {
    pub source: Povm,
    pub ancilla_dim: usize,
    /// The fixed ancilla vector |ω⟩ ∈ H_B̄ (first standard basis vector).
    pub omega: Vec<C64>,
    pub projectors: ProjectiveMeasurement,
    pub construction: NeumarkConstruction,
}

impl NeumarkExtension {
    /// |ω⟩⟨ω| on the ancilla.
    pub fn omega_projector(&self) -> Mat {
        Mat::outer(&self.omega, &self.omega)
    }

    /// ρ_ABB̄ = ρ_AB ⊗ |ω⟩⟨ω|.
    pub fn extend_state(&self, rho: &DensityMatrix) -> Mat {
        rho.matrix().kron(&self.omega_projector())
    }

    /// Max over k of |(1_B ⊗ ⟨ω|) Π_k (1_B ⊗ |ω⟩) − E_k|.
    pub fn compression_residual(&self) -> f64 {
        let d = self.source.dim();
        let n = self.ancilla_dim;
        let mut worst: f64 = 0.0;
        for (pi, e) in self.projectors.projectors().iter().zip(self.source.elements()) {
            // entry (i, i') of the compression is Π[(i, ω), (i', ω)] summed
            // against |ω⟩⟨ω|; with ω = e_0 this picks the a = a' = 0 block.
            let mut compressed = Mat::zeros(d, d);
            for i in 0..d {
                for ip in 0..d {
                    let mut s = Complex64::new(0.0, 0.0);
                    for a in 0..n {
                        for ap in 0..n {
                            s += self.omega[a].conj() * pi[(i * n + a, ip * n + ap)] * self.omega[ap];
                        }
                    }
                    compressed[(i, ip)] = s;
                }
            }
            worst = worst.max(compressed.max_abs_diff(e));
        }
        worst
    }
}

/// √M for PSD Hermitian M, clipping round-off negatives.
fn psd_sqrt(m: &Mat) -> Result<Mat> {
    hermitian_function(m, |l| Complex64::new(l.max(0.0).sqrt(), 0.0))
}

/// Builds a projective extension of `m` on H_B ⊗ H_B̄.
pub fn neumark_extend(m: &Povm, construction: NeumarkConstruction) -> Result<NeumarkExtension> {
    match construction {
        NeumarkConstruction::Canonical => neumark_canonical(m),
        NeumarkConstruction::Rank1 => neumark_rank1(m),
    }
}

fn neumark_canonical(m: &Povm) -> Result<NeumarkExtension> {
    let d = m.dim();
    let n = m.len();
    // Isometry W|v⟩ = Σ_a (√E_a|v⟩) ⊗ |a⟩, written in B̄-slow layout so the
    // ω = e_0 slice is the leading d×d block and the completion preserves a
    // contiguous column prefix.
    let sqrt_e: Vec<Mat> = m.elements().iter().map(psd_sqrt).collect::<Result<_>>()?;
    let mut w = Mat::zeros(d * n, d);
    for (a, se) in sqrt_e.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                w[(a * d + i, j)] = se[(i, j)];
            }
        }
    }
    let w_hat = complete_to_unitary(&w, Orientation::Columns)?;
    let swap = swap_factors::<f64>(n, d); // B̄⊗B layout -> B⊗B̄ layout
    let mut projectors = Vec::with_capacity(n);
    for k in 0..n {
        let mut pick = Mat::zeros(n, n);
        pick[(k, k)] = Complex64::new(1.0, 0.0);
        let outcome = pick.kron(&Mat::identity(d));
        let pi_tilde = w_hat.adjoint().mul(&outcome).mul(&w_hat);
        projectors.push(swap.mul(&pi_tilde).mul(&swap.adjoint()).symmetrized());
    }
    let mut omega = vec![Complex64::new(0.0, 0.0); n];
    omega[0] = Complex64::new(1.0, 0.0);
    Ok(NeumarkExtension {
        source: m.clone(),
        ancilla_dim: n,
        omega,
        projectors: ProjectiveMeasurement::new(d * n, projectors)?,
        construction: NeumarkConstruction::Canonical,
    })
}

fn neumark_rank1(m: &Povm) -> Result<NeumarkExtension> {
    let d = m.dim();
    // Refine every element into rank-1 pieces E = Σ |e⟩⟨e|.
    let mut vectors: Vec<Vec<C64>> = Vec::new();
    for e in m.elements() {
        let (vals, q) = hermitian_eigensystem(e)?;
        for (i, &lambda) in vals.iter().enumerate() {
            if lambda > 1e-12 {
                let col = q.column(i);
                vectors.push(col.iter().map(|z| z * lambda.sqrt()).collect());
            }
        }
    }
    // Pad with zero elements until the count is a multiple of d.
    while vectors.len() % d != 0 || vectors.len() < d {
        vectors.push(vec![Complex64::new(0.0, 0.0); d]);
    }
    let m_tot = vectors.len();
    let ancilla_dim = m_tot / d;

    // d×m co-isometry whose k-th column is e_k; rows are orthonormal because
    // Σ_k |e_k⟩⟨e_k| = 1.
    let co_iso = Mat::from_fn(d, m_tot, |r, k| vectors[k][r]);
    let frame = complete_to_unitary(&co_iso, Orientation::Rows).map_err(|e| match e {
        Error::NotOrthonormal { residual } => Error::InvalidPovm(format!(
            "rank-1 refinement does not form a tight frame (residual {:.3e})",
            residual
        )),
        other => other,
    })?;

    let swap = swap_factors::<f64>(ancilla_dim, d);
    let mut projectors = Vec::with_capacity(m_tot);
    for k in 0..m_tot {
        let phi = frame.column(k);
        let pi_tilde = Mat::outer(&phi, &phi);
        projectors.push(swap.mul(&pi_tilde).mul(&swap.adjoint()));
    }

    let elements: Vec<Mat> = vectors.iter().map(|v| Mat::outer(v, v)).collect();
    let source = Povm::new(d, elements)?;
    let mut omega = vec![Complex64::new(0.0, 0.0); ancilla_dim];
    omega[0] = Complex64::new(1.0, 0.0);
    Ok(NeumarkExtension {
        source,
        ancilla_dim,
        omega,
        projectors: ProjectiveMeasurement::new(d * ancilla_dim, projectors)?,
        construction: NeumarkConstruction::Rank1,
    })
}

/// Residuals between the POVM route and the projective route for outcome
/// probabilities and conditional states.
#[derive(Debug, Clone, Copy)]
pub struct NeumarkResiduals {
    pub probability_residual: f64,
    pub conditional_residual: f64,
}

/// Checks p_k and ρ_{A|k} computed from (ρ_AB, E_k) against the same
/// quantities from (ρ_ABB̄, Π_k).
pub fn verify_neumark_consistency(
    rho: &DensityMatrix,
    ext: &NeumarkExtension,
) -> Result<NeumarkResiduals> {
    let split = rho.split();
    if ext.source.dim() != split.dim_b {
        return Err(Error::Dimension(format!(
            "extension acts on dim {}, state has dim_b {}",
            ext.source.dim(),
            split.dim_b
        )));
    }
    let da = split.dim_a;
    let id_a = Mat::identity(da);
    let rho_ext = ext.extend_state(rho);
    let dims_ext = [da, split.dim_b * ext.ancilla_dim];

    let mut prob_res: f64 = 0.0;
    let mut cond_res: f64 = 0.0;
    for (e, pi) in ext.source.elements().iter().zip(ext.projectors.projectors()) {
        let povm_weighted = id_a.kron(e).mul(rho.matrix());
        let p_povm = povm_weighted.trace().re;
        let proj_weighted = id_a.kron(pi).mul(&rho_ext);
        let p_proj = proj_weighted.trace().re;
        prob_res = prob_res.max((p_povm - p_proj).abs());
        if p_povm >= OUTCOME_EPS && p_proj >= OUTCOME_EPS {
            let c_povm = partial_trace(&povm_weighted, &split.dims(), &[0])?.scale_re(1.0 / p_povm);
            let c_proj = partial_trace(&proj_weighted, &dims_ext, &[0])?.scale_re(1.0 / p_proj);
            cond_res = cond_res.max(c_povm.max_abs_diff(&c_proj));
        }
    }
    Ok(NeumarkResiduals { probability_residual: prob_res, conditional_residual: cond_res })
}

/// Stinespring lift of a projective measurement to a unitary on
/// H_BB̄ ⊗ H_C, with H_C spanned by one flag vector per outcome.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub measurement: ProjectiveMeasurement,
    /// Number of outcomes = dim H_C.
    pub c_dim: usize,
    /// V: H_BB̄ → H_BB̄ ⊗ H_C, |v⟩ ↦ Σ_k Π_k|v⟩ ⊗ |c_k⟩.
    pub isometry_v: Mat,
    /// Unitary on H_BB̄ ⊗ H_C extending |v⟩ ⊗ |c_0⟩ ↦ V|v⟩.
    pub unitary_u: Mat,
}

impl StinespringDilation {
    /// |c_k⟩ (standard basis of H_C).
    pub fn c_basis_vector(&self, k: usize) -> Vec<C64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.c_dim];
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    /// |c_0⟩, the initial flag state.
    pub fn initial_c(&self) -> Vec<C64> {
        self.c_basis_vector(0)
    }
}

pub fn stinespring_dilate(m: &ProjectiveMeasurement) -> Result<StinespringDilation> {
    let dim = m.dim();
    let n_out = m.len();

    // V in the final BB̄-slow / C-fast layout.
    let mut v = Mat::zeros(dim * n_out, dim);
    // Ṽ in C-slow layout, so the |c_0⟩ slice is the leading column block.
    let mut v_tilde = Mat::zeros(dim * n_out, dim);
    for (k, pi) in m.projectors().iter().enumerate() {
        for r in 0..dim {
            for j in 0..dim {
                v[(r * n_out + k, j)] = pi[(r, j)];
                v_tilde[(k * dim + r, j)] = pi[(r, j)];
            }
        }
    }
    let u_tilde = complete_to_unitary(&v_tilde, Orientation::Columns)?;
    let swap = swap_factors::<f64>(n_out, dim); // C⊗BB̄ -> BB̄⊗C
    let unitary_u = swap.mul(&u_tilde).mul(&swap.adjoint());
    Ok(StinespringDilation { measurement: m.clone(), c_dim: n_out, isometry_v: v, unitary_u })
}

/// All the primed states and entropies of the proof chain for one
/// (state, POVM, construction) instance.
#[derive(Debug, Clone)]
pub struct ProofTrace {
    pub state: DensityMatrix,
    pub extension: NeumarkExtension,
    pub dilation: StinespringDilation,

    /// Outcome probabilities, one per projector (dropped outcomes as 0).
    pub probabilities: Vec<f64>,
    /// Conditional states for retained outcomes (None where dropped).
    pub conditionals: Vec<Option<DensityMatrix>>,

    pub rho_bbbar: Mat,
    pub rho_p_abbbar: Mat,
    pub rho_p_ab: Mat,
    pub rho_p_abbbarc: Mat,
    pub rho_p_ac: Mat,
    pub rho_p_a: Mat,
    pub rho_p_bbbarc: Mat,
    pub rho_p_bbbar: Mat,

    pub s_a: f64,
    pub s_b: f64,
    pub s_bbbar: f64,
    pub s_p_ac: f64,
    pub s_p_a: f64,
    pub s_p_bbbarc: f64,
    pub s_p_bbbar: f64,
    pub h_p: f64,
    pub avg_conditional_entropy: f64,

    /// Max-abs difference between the U-conjugation form of ρ'_ABB̄C and the
    /// explicit double sum Σ_{k,j} [(1⊗Π_k)ρ(1⊗Π_j)] ⊗ |c_k⟩⟨c_j|.
    pub double_sum_residual: f64,
    /// Max-abs difference between the literal Σ_k(1_A⊗E_k)ρ_AB and the
    /// Lüders-form ρ'_AB; nonzero in general, recorded not judged.
    pub literal_vs_luders_residual: f64,
}

/// Runs the whole dilation pipeline and collects every reduced state and
/// entropy the proof refers to.
pub fn build_proof_trace(
    rho: &DensityMatrix,
    m: &Povm,
    construction: NeumarkConstruction,
    dimension_cap: usize,
) -> Result<ProofTrace> {
    let ext = neumark_extend(m, construction)?;
    let split = rho.split();
    if ext.source.dim() != split.dim_b {
        return Err(Error::Dimension(format!(
            "POVM dim {} does not match dim_b {}",
            ext.source.dim(),
            split.dim_b
        )));
    }
    let da = split.dim_a;
    let db = split.dim_b;
    let n = ext.ancilla_dim;
    let big_d = db * n;
    let n_out = ext.projectors.len();
    let total = da * big_d * n_out;
    if total > dimension_cap {
        return Err(Error::DimensionCap { total, cap: dimension_cap });
    }

    let id_a = Mat::identity(da);
    let rho_abbbar = ext.extend_state(rho);
    let rho_bbbar = partial_trace(&rho_abbbar, &[da, big_d], &[1])?;

    // Lüders post-measurement state on ABB̄.
    let lifted: Vec<Mat> = ext
        .projectors
        .projectors()
        .iter()
        .map(|pi| id_a.kron(pi))
        .collect();
    let mut rho_p_abbbar = Mat::zeros(da * big_d, da * big_d);
    for l in &lifted {
        rho_p_abbbar = rho_p_abbbar.add(&l.mul(&rho_abbbar).mul(l));
    }

    let dilation = stinespring_dilate(&ext.projectors)?;
    let u_full = id_a.kron(&dilation.unitary_u);
    let c0 = dilation.initial_c();
    let rho_abbbarc = rho_abbbar.kron(&Mat::outer(&c0, &c0));
    let rho_p_abbbarc = u_full.mul(&rho_abbbarc).mul(&u_full.adjoint());

    // Independent double-sum route for the same state.
    let mut double_sum = Mat::zeros(total, total);
    for (k, lk) in lifted.iter().enumerate() {
        let ck = dilation.c_basis_vector(k);
        for (j, lj) in lifted.iter().enumerate() {
            let cj = dilation.c_basis_vector(j);
            let block = lk.mul(&rho_abbbar).mul(lj);
            double_sum = double_sum.add(&block.kron(&Mat::outer(&ck, &cj)));
        }
    }
    let double_sum_residual = rho_p_abbbarc.max_abs_diff(&double_sum);

    let dims3 = [da, big_d, n_out];
    let rho_p_ac = partial_trace(&rho_p_abbbarc, &dims3, &[0, 2])?;
    let rho_p_a = partial_trace(&rho_p_abbbarc, &dims3, &[0])?;
    let rho_p_bbbarc = partial_trace(&rho_p_abbbarc, &dims3, &[1, 2])?;
    let rho_p_bbbar = partial_trace(&rho_p_bbbarc, &[big_d, n_out], &[0])?;
    let rho_p_ab = partial_trace(&rho_p_abbbar, &[da, db, n], &[0, 1])?;

    // Outcome ensemble over the extension's source POVM, re-expanded so the
    // index matches the projector index.
    let ensemble = condition_on_b(rho, &ext.source)?;
    let mut probabilities = vec![0.0; n_out];
    let mut conditionals: Vec<Option<DensityMatrix>> = vec![None; n_out];
    {
        let mut it = ensemble.probabilities.iter().zip(ensemble.conditionals.iter());
        for k in 0..n_out {
            if ensemble.dropped.contains(&k) {
                continue;
            }
            if let Some((p, c)) = it.next() {
                probabilities[k] = *p;
                conditionals[k] = Some(c.clone());
            }
        }
    }

    let s_a = von_neumann_entropy_mat(&rho.marginal_a())?;
    let s_b = von_neumann_entropy_mat(&rho.marginal_b())?;
    let s_bbbar = von_neumann_entropy_mat(&rho_bbbar)?;
    let s_p_ac = von_neumann_entropy_mat(&rho_p_ac)?;
    let s_p_a = von_neumann_entropy_mat(&rho_p_a)?;
    let s_p_bbbarc = von_neumann_entropy_mat(&rho_p_bbbarc)?;
    let s_p_bbbar = von_neumann_entropy_mat(&rho_p_bbbar)?;
    let h_p = shannon_entropy(&probabilities)?;
    let avg_conditional_entropy = probabilities
        .iter()
        .zip(&conditionals)
        .filter_map(|(p, c)| c.as_ref().map(|c| p * von_neumann_entropy_mat(c.matrix()).unwrap()))
        .sum();

    // Literal (unsandwiched) Eq.-style post-measurement operator on AB.
    let mut literal = Mat::zeros(da * db, da * db);
    for e in ext.source.elements() {
        literal = literal.add(&id_a.kron(e).mul(rho.matrix()));
    }
    let literal_vs_luders_residual = literal.max_abs_diff(&rho_p_ab);

    Ok(ProofTrace {
        state: rho.clone(),
        extension: ext,
        dilation,
        probabilities,
        conditionals,
        rho_bbbar,
        rho_p_abbbar,
        rho_p_ab,
        rho_p_abbbarc,
        rho_p_ac,
        rho_p_a,
        rho_p_bbbarc,
        rho_p_bbbar,
        s_a,
        s_b,
        s_bbbar,
        s_p_ac,
        s_p_a,
        s_p_bbbarc,
        s_p_bbbar,
        h_p,
        avg_conditional_entropy,
        double_sum_residual,
        literal_vs_luders_residual,
    })
}

/// One verified identity of the proof chain.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Informational checks are reported but do not fail the verdict.
    pub required: bool,
}

#[derive(Debug, Clone)]
pub struct ProofVerdict {
    pub checks: Vec<CheckResult>,
    pub ssa_slack: f64,
    pub final_margin_sb: f64,
    pub final_margin_sa: f64,
    pub all_required_pass: bool,
}

const CHECK_TOL: f64 = 1e-8;
const SLACK_TOL: f64 = 1e-9;

/// Verifies every entropy identity and inequality of the proof on a built
/// trace. Failures are reported in the verdict, never thrown.
pub fn verify_proof(trace: &ProofTrace) -> ProofVerdict {
    let mut checks = Vec::new();
    let push = |name: &'static str, residual: f64, tolerance: f64, required: bool, checks: &mut Vec<CheckResult>| {
        checks.push(CheckResult { name, residual, tolerance, passed: residual <= tolerance, required });
    };

    // (i) S(ρ'_AC) = H(p) + Σ p_k S(ρ_{A|k})
    push(
        "entropy_ac_decomposition",
        (trace.s_p_ac - (trace.h_p + trace.avg_conditional_entropy)).abs(),
        CHECK_TOL,
        true,
        &mut checks,
    );
    // (ii) S(ρ'_A) = S(ρ_A)
    push("marginal_a_unchanged", (trace.s_p_a - trace.s_a).abs(), CHECK_TOL, true, &mut checks);
    // (iii) S(ρ'_BB̄C) = S(ρ_BB̄) and S(ρ_BB̄) = S(ρ_B)
    push(
        "bbbarc_entropy_preserved",
        (trace.s_p_bbbarc - trace.s_bbbar).abs(),
        CHECK_TOL,
        true,
        &mut checks,
    );
    push(
        "ancilla_adds_no_entropy",
        (trace.s_bbbar - trace.s_b).abs(),
        CHECK_TOL,
        true,
        &mut checks,
    );

    // (iv) ρ'_BB̄ = Σ_k p_k Π_k: literal for rank-1 projectors only.
    let mut mixture = Mat::zeros(trace.rho_p_bbbar.rows(), trace.rho_p_bbbar.cols());
    for (p, pi) in trace.probabilities.iter().zip(trace.extension.projectors.projectors()) {
        mixture = mixture.add(&pi.scale_re(*p));
    }
    let rank1 = trace.extension.construction == NeumarkConstruction::Rank1;
    push(
        "post_measurement_bbbar_is_projector_mixture",
        trace.rho_p_bbbar.max_abs_diff(&mixture),
        1e-10,
        rank1,
        &mut checks,
    );
    // Always-required decomposition S(ρ'_BB̄) = H(p) + Σ p_k S(Π_kρΠ_k/p_k).
    let mut block_sum = trace.h_p;
    for pi in trace.extension.projectors.projectors() {
        let sandwiched = pi.mul(&trace.rho_bbbar).mul(pi);
        let p = sandwiched.trace().re;
        if p >= OUTCOME_EPS {
            block_sum += p
                * von_neumann_entropy_mat(&sandwiched.scale_re(1.0 / p).symmetrized())
                    .unwrap_or(f64::NAN);
        }
    }
    push(
        "post_measurement_bbbar_entropy_decomposition",
        (trace.s_p_bbbar - block_sum).abs(),
        CHECK_TOL,
        true,
        &mut checks,
    );

    // (v) strong subadditivity slack
    let ssa_slack = trace.s_p_ac + trace.s_p_bbbarc - trace.s_p_a - trace.s_p_bbbar;
    push("strong_subadditivity", (-ssa_slack).max(0.0), SLACK_TOL, true, &mut checks);

    // (vi) final margins
    let j_objective = trace.s_a - trace.avg_conditional_entropy;
    let final_margin_sb = trace.s_b - j_objective;
    let final_margin_sa = trace.s_a - j_objective;
    push("bound_by_s_b", (-final_margin_sb).max(0.0), SLACK_TOL, true, &mut checks);
    push("bound_by_s_a", (-final_margin_sa).max(0.0), SLACK_TOL, true, &mut checks);

    let all_required_pass = checks.iter().all(|c| c.passed || !c.required);
    ProofVerdict { checks, ssa_slack, final_margin_sb, final_margin_sa, all_required_pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::DimSplit;
    use crate::measurement::{
        computational_basis, random_rank1_povm, random_two_outcome_povm, trine_povm,
    };
    use crate::rng::seeded;
    use crate::state::{bell_phi_plus, product, random_mixed_ginibre, random_pure_haar};
    use crate::unitary::unitarity_residual;

    #[test]
    fn canonical_extension_of_projective_povm_round_trips() {
        let m = computational_basis(2).as_povm();
        let ext = neumark_extend(&m, NeumarkConstruction::Canonical).unwrap();
        assert_eq!(ext.ancilla_dim, 2);
        assert!(ext.compression_residual() < 1e-10);
        for seed in 0..20u64 {
            let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 2 }, 4, seed).unwrap();
            let r = verify_neumark_consistency(&rho, &ext).unwrap();
            assert!(r.probability_residual < 1e-12);
            assert!(r.conditional_residual < 1e-12);
        }
    }

    #[test]
    fn trine_rank1_compression_identity() {
        let ext = neumark_extend(&trine_povm(), NeumarkConstruction::Rank1).unwrap();
        // padded from 3 rank-1 elements to 4
        assert_eq!(ext.source.len(), 4);
        assert_eq!(ext.ancilla_dim, 2);
        assert!(ext.compression_residual() < 1e-10);
        // hand check against the explicit co-isometry: the first two entries
        // of each projector's range vector must reproduce the trine vectors.
        for (k, e) in ext.source.elements().iter().enumerate().take(3) {
            let pi = &ext.projectors.projectors()[k];
            assert!((pi.trace().re - 1.0).abs() < 1e-10); // rank 1
            assert!((e.trace().re - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_projectors_pass_invariants_for_random_povms() {
        let mut rng = seeded(31);
        for _ in 0..5 {
            let m = random_two_outcome_povm(2, &mut rng);
            let ext = neumark_extend(&m, NeumarkConstruction::Canonical).unwrap();
            assert!(ext.compression_residual() < 1e-10);
        }
    }

    #[test]
    fn product_state_with_trine_conditionals_equal_marginal() {
        let a = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 1 }, 2, 1).unwrap();
        let b = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 1 }, 2, 2).unwrap();
        let rho = product(&a, &b);
        let ext = neumark_extend(&trine_povm(), NeumarkConstruction::Rank1).unwrap();
        let r = verify_neumark_consistency(&rho, &ext).unwrap();
        assert!(r.probability_residual < 1e-12);
        assert!(r.conditional_residual < 1e-12);
        let ens = condition_on_b(&rho, &ext.source).unwrap();
        for c in &ens.conditionals {
            assert!(c.matrix().max_abs_diff(&rho.marginal_a()) < 1e-12);
        }
    }

    #[test]
    fn stinespring_of_single_projector_is_identity() {
        let m = ProjectiveMeasurement::new(2, vec![Mat::identity(2)]).unwrap();
        let dil = stinespring_dilate(&m).unwrap();
        assert!(dil.isometry_v.max_abs_diff(&Mat::identity(2)) < 1e-12);
        assert!(dil.unitary_u.max_abs_diff(&Mat::identity(2)) < 1e-12);
    }

    #[test]
    fn stinespring_of_computational_basis_routes_flags() {
        let dil = stinespring_dilate(&computational_basis(2)).unwrap();
        // |0⟩⊗|c_0⟩ is index 0, |1⟩⊗|c_0⟩ is index 2 in the BB̄-slow layout.
        // U e_0 = |0⟩⊗|c_0⟩ = e_0; U e_2 = |1⟩⊗|c_1⟩ = e_3.
        let u = &dil.unitary_u;
        assert!((u[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((u[(3, 2)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stinespring_contract_on_random_measurements() {
        let mut rng = seeded(44);
        for dim in [2usize, 3] {
            let m = crate::measurement::random_projective(dim, &mut rng);
            let dil = stinespring_dilate(&m).unwrap();
            let v = &dil.isometry_v;
            assert!(v.adjoint().mul(v).max_abs_diff(&Mat::identity(dim)) < 1e-10);
            assert!(unitarity_residual(&dil.unitary_u) < 1e-10);
            // U(|v⟩⊗|c_0⟩) = V|v⟩ on basis vectors
            for j in 0..dim {
                let mut col_u = Vec::with_capacity(dim * dil.c_dim);
                for r in 0..dim * dil.c_dim {
                    col_u.push(dil.unitary_u[(r, j * dil.c_dim)]);
                }
                let col_v = v.column(j);
                let diff: f64 = col_u
                    .iter()
                    .zip(&col_v)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
                assert!(diff < 1e-10);
            }
        }
    }

    #[test]
    fn bell_with_computational_trace_entropies() {
        let trace = build_proof_trace(
            &bell_phi_plus(),
            &computational_basis(2).as_povm(),
            NeumarkConstruction::Rank1,
            DEFAULT_DIMENSION_CAP,
        )
        .unwrap();
        assert!((trace.h_p - 1.0).abs() < 1e-12);
        assert!(trace.avg_conditional_entropy.abs() < 1e-12);
        assert!((trace.s_p_ac - 1.0).abs() < 1e-10);
        let verdict = verify_proof(&trace);
        assert!(verdict.all_required_pass, "{:#?}", verdict.checks);
        // J-objective is tight here, so the SSA slack vanishes.
        assert!(verdict.ssa_slack.abs() < 1e-9);
    }

    #[test]
    fn pure_product_state_trace_passes() {
        let a = random_pure_haar(DimSplit { dim_a: 2, dim_b: 1 }, 3);
        let b = random_pure_haar(DimSplit { dim_a: 2, dim_b: 1 }, 4);
        let rho = product(&a, &b);
        let mut rng = seeded(2);
        let m = random_two_outcome_povm(2, &mut rng);
        let trace =
            build_proof_trace(&rho, &m, NeumarkConstruction::Canonical, DEFAULT_DIMENSION_CAP)
                .unwrap();
        let verdict = verify_proof(&trace);
        assert!(verdict.all_required_pass, "{:#?}", verdict.checks);
        assert!(verdict.ssa_slack >= -1e-9);
        assert!(trace.s_a.abs() < 1e-10 && trace.s_b.abs() < 1e-10);
    }

    #[test]
    fn random_2x3_state_preserves_marginal_a() {
        let mut rng = seeded(6);
        for seed in 0..5u64 {
            let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 3 }, 4, seed).unwrap();
            let m = random_two_outcome_povm(3, &mut rng);
            let trace =
                build_proof_trace(&rho, &m, NeumarkConstruction::Canonical, DEFAULT_DIMENSION_CAP)
                    .unwrap();
            assert!(trace.rho_p_a.max_abs_diff(&rho.marginal_a()) < 1e-12);
            // Σ p_k ρ_{A|k} = ρ_A
            let mut avg = Mat::zeros(2, 2);
            for (p, c) in trace.probabilities.iter().zip(&trace.conditionals) {
                if let Some(c) = c {
                    avg = avg.add(&c.matrix().scale_re(*p));
                }
            }
            assert!(avg.max_abs_diff(&rho.marginal_a()) < 1e-10);
        }
    }

    #[test]
    fn ac_reconstruction_two_routes_agree() {
        let mut rng = seeded(61);
        let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 2 }, 4, 8).unwrap();
        let m = random_two_outcome_povm(2, &mut rng);
        let trace =
            build_proof_trace(&rho, &m, NeumarkConstruction::Canonical, DEFAULT_DIMENSION_CAP)
                .unwrap();
        let mut block = Mat::zeros(trace.rho_p_ac.rows(), trace.rho_p_ac.cols());
        for (k, (p, c)) in trace.probabilities.iter().zip(&trace.conditionals).enumerate() {
            if let Some(c) = c {
                let ck = trace.dilation.c_basis_vector(k);
                block = block.add(&c.matrix().scale_re(*p).kron(&Mat::outer(&ck, &ck)));
            }
        }
        assert!(trace.rho_p_ac.max_abs_diff(&block) < 1e-10);
        assert!(trace.double_sum_residual < 1e-10);
    }

    #[test]
    fn bbbarc_spectrum_matches_bbbar() {
        let mut rng = seeded(62);
        let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 2 }, 3, 13).unwrap();
        let m = random_two_outcome_povm(2, &mut rng);
        let trace =
            build_proof_trace(&rho, &m, NeumarkConstruction::Canonical, DEFAULT_DIMENSION_CAP)
                .unwrap();
        let (mut big, _) = hermitian_eigensystem(&trace.rho_p_bbbarc).unwrap();
        let (mut small, _) = hermitian_eigensystem(&trace.rho_bbbar).unwrap();
        big.reverse();
        small.reverse();
        small.resize(big.len(), 0.0);
        for (a, b) in big.iter().zip(&small) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rank1_satisfies_projector_mixture_identity() {
        let mut rng = seeded(63);
        for _ in 0..3 {
            let rho = random_mixed_ginibre(DimSplit { dim_a: 2, dim_b: 2 }, 4, 77).unwrap();
            let m = random_rank1_povm(2, 4, &mut rng);
            let trace =
                build_proof_trace(&rho, &m, NeumarkConstruction::Rank1, DEFAULT_DIMENSION_CAP)
                    .unwrap();
            let verdict = verify_proof(&trace);
            let mix = verdict
                .checks
                .iter()
                .find(|c| c.name == "post_measurement_bbbar_is_projector_mixture")
                .unwrap();
            assert!(mix.passed, "residual {}", mix.residual);
            assert!(verdict.all_required_pass, "{:#?}", verdict.checks);
        }
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let rho = random_mixed_ginibre(DimSplit { dim_a: 3, dim_b: 3 }, 4, 0).unwrap();
        let mut rng = seeded(64);
        let m = random_rank1_povm(3, 9, &mut rng);
        let err = build_proof_trace(&rho, &m, NeumarkConstruction::Rank1, 64);
        assert!(matches!(err, Err(Error::DimensionCap { .. })));
    }
}
