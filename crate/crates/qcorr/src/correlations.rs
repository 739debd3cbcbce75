//! Entropies, mutual information, the optimized classical-correlation
//! measure J(A:B), quantum discord, and the bound report.
//!
//! All quantities are in bits (log base 2).

use crate::eig::hermitian_eigensystem;
use crate::error::Error;
use crate::measurement::{fixed_measurement_classical_info, qubit_projective};
use crate::optimize::{
    optimize_classical_correlations, BestMeasurement, MeasurementClass, OptimizeOutcome,
};
use crate::simplex::nelder_mead;
use crate::state::DensityMatrix;
use crate::{Mat, Result};

/// Eigenvalues below this are treated as exact zeros in entropy sums.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-12;

/// S(ρ) = −Tr[ρ log₂ ρ] for a PSD unit-trace matrix.
pub fn von_neumann_entropy_mat(m: &Mat) -> Result<f64> {
    let (vals, _) = hermitian_eigensystem(m)?;
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-9 {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let sum: f64 = vals.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::TraceNotOne { trace: sum });
    }
    Ok(entropy_of_spectrum(&vals))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    von_neumann_entropy_mat(rho.matrix()).expect("validated density matrix")
}

fn entropy_of_spectrum(vals: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in vals {
        if v >= ENTROPY_EIGENVALUE_FLOOR {
            s -= v * v.log2();
        }
    }
    // guard against -0.0 so reports format identically
    if s == 0.0 {
        0.0
    } else {
        s
    }
}

/// H(p) = −Σ p_k log₂ p_k.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &x in p {
        if x < -1e-12 || !x.is_finite() {
            return Err(Error::InvalidDistribution(format!("probability {}", x)));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {}", sum)));
    }
    Ok(entropy_of_spectrum(p))
}

/// I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB).
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let s_a = von_neumann_entropy_mat(&rho.marginal_a())?;
    let s_b = von_neumann_entropy_mat(&rho.marginal_b())?;
    let s_ab = von_neumann_entropy_mat(rho.matrix())?;
    Ok(s_a + s_b - s_ab)
}

/// Exhaustive reference maximization of the classical information over
/// rank-1 projective qubit measurements on a uniform (θ, φ) grid.
///
/// Only valid for dim_b = 2. Deterministic; ties keep the first grid point.
pub fn qubit_grid_oracle(
    rho: &DensityMatrix,
    n_theta: usize,
    n_phi: usize,
) -> Result<(f64, (f64, f64))> {
    if rho.split().dim_b != 2 {
        return Err(Error::Dimension(format!(
            "grid oracle requires dim_b = 2, got {}",
            rho.split().dim_b
        )));
    }
    if n_theta < 2 || n_phi < 1 {
        return Err(Error::ParamRange("grid needs n_theta >= 2, n_phi >= 1".into()));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_angles = (0.0, 0.0);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let m = qubit_projective(theta, phi).as_povm();
            let v = fixed_measurement_classical_info(rho, &m)?;
            if v > best {
                best = v;
                best_angles = (theta, phi);
            }
        }
    }
    Ok((best, best_angles))
}

/// Grid scan followed by a simplex polish of the best angles. The reliable
/// route for dim_b = 2.
pub fn qubit_grid_refine(
    rho: &DensityMatrix,
    n_theta: usize,
    n_phi: usize,
) -> Result<(f64, (f64, f64))> {
    let (coarse, (theta, phi)) = qubit_grid_oracle(rho, n_theta, n_phi)?;
    let objective = |x: &[f64]| {
        let m = qubit_projective(x[0], x[1]).as_povm();
        match fixed_measurement_classical_info(rho, &m) {
            Ok(v) => -v,
            Err(_) => 1e3,
        }
    };
    let r = nelder_mead(objective, &[theta, phi], 0.05, 1e-9, 2000);
    if -r.value > coarse {
        Ok((-r.value, (r.x[0], r.x[1])))
    } else {
        Ok((coarse, (theta, phi)))
    }
}

/// Everything a single-state analysis produces.
#[derive(Debug, Clone)]
pub struct CorrelationReport {
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    pub mutual_information: f64,
    pub classical_j: f64,
    pub discord: f64,
    /// min{S_A, S_B} − J; the Theorem says this stays ≥ 0.
    pub bound_margin: f64,
    /// S_B − D; the discord marginal bound.
    pub discord_sb_margin: f64,
    pub best_measurement: BestMeasurement,
    pub optimizer_restarts: usize,
    pub measurement_class: MeasurementClass,
}

#[derive(Debug, Clone, Copy)]
pub struct DiscordOptions {
    pub class: MeasurementClass,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        DiscordOptions { class: MeasurementClass::Projective, restarts: 32, seed: 0 }
    }
}

/// Full report: D = I − J with J from the multi-restart optimizer.
pub fn quantum_discord(rho: &DensityMatrix, options: &DiscordOptions) -> Result<CorrelationReport> {
    let outcome = optimize_classical_correlations(rho, options.class, options.restarts, options.seed)?;
    report_from_j(rho, outcome, options.restarts)
}

/// Same computation as [`quantum_discord`]; named entry point for callers
/// that only care about the margins.
pub fn bound_report(rho: &DensityMatrix, options: &DiscordOptions) -> Result<CorrelationReport> {
    quantum_discord(rho, options)
}

pub(crate) fn report_from_j(
    rho: &DensityMatrix,
    outcome: OptimizeOutcome,
    restarts: usize,
) -> Result<CorrelationReport> {
    let s_a = von_neumann_entropy_mat(&rho.marginal_a())?;
    let s_b = von_neumann_entropy_mat(&rho.marginal_b())?;
    let s_ab = von_neumann_entropy_mat(rho.matrix())?;
    let mi = s_a + s_b - s_ab;
    let j = outcome.j;
    let discord = mi - j;
    Ok(CorrelationReport {
        s_a,
        s_b,
        s_ab,
        mutual_information: mi,
        classical_j: j,
        discord,
        bound_margin: s_a.min(s_b) - j,
        discord_sb_margin: s_b - discord,
        best_measurement: outcome.best.clone(),
        optimizer_restarts: restarts,
        measurement_class: outcome.best.class,
    })
}
