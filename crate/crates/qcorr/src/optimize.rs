//! Maximization of the classical information over measurement classes.
//!
//! Two unconstrained charts feed a multi-restart Nelder-Mead search:
//!
//! * projective: rank-1 bases u = exp(iH(x)) with H Hermitian built from
//!   d² real parameters;
//! * povm: d² rank-1 outcomes from unnormalized complex vectors, with
//!   completeness enforced exactly by the T^{-1/2} correction.

use num_complex::Complex64;

use crate::eig::hermitian_function;
use crate::error::Error;
use crate::measurement::{
    fixed_measurement_classical_info, projective_from_unitary, rank1_povm_from_vectors, Povm,
    ProjectiveMeasurement,
};
use crate::rng::seeded;
use crate::simplex::nelder_mead;
use crate::state::DensityMatrix;
use crate::{C64, Mat, Result};

/// Initial simplex scale, in radians-equivalent units of the charts.
const SIMPLEX_SCALE: f64 = 0.3;
/// Convergence threshold on the simplex diameter.
const SIMPLEX_TOL: f64 = 1e-7;
/// Evaluation cap per restart.
const MAX_EVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementClass {
    Projective,
    Povm,
}

impl MeasurementClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasurementClass::Projective => "projective",
            MeasurementClass::Povm => "povm",
        }
    }
}

impl std::str::FromStr for MeasurementClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" => Ok(MeasurementClass::Projective),
            "povm" => Ok(MeasurementClass::Povm),
            other => Err(Error::ParamRange(format!("unknown measurement class '{}'", other))),
        }
    }
}

/// Chart parameters of the best measurement found.
#[derive(Debug, Clone)]
pub struct BestMeasurement {
    pub class: MeasurementClass,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub j: f64,
    pub best: BestMeasurement,
    pub evals: usize,
}

/// Number of chart parameters for the given class on dimension d.
pub fn param_count(class: MeasurementClass, dim: usize) -> usize {
    match class {
        MeasurementClass::Projective => dim * dim,
        // d² rank-1 outcomes, each a complex d-vector
        MeasurementClass::Povm => 2 * dim * dim * dim,
    }
}

/// Hermitian H from d² real parameters: d diagonal entries followed by
/// (re, im) pairs for the strict upper triangle.
fn hermitian_from_params(dim: usize, params: &[f64]) -> Mat {
    let mut h = Mat::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(params[i], 0.0);
    }
    let mut t = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = Complex64::new(params[t], params[t + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            t += 2;
        }
    }
    h
}

/// Rank-1 projective basis from the chart point.
pub fn projective_chart(dim: usize, params: &[f64]) -> Result<ProjectiveMeasurement> {
    if params.len() != param_count(MeasurementClass::Projective, dim) {
        return Err(Error::ParamRange(format!(
            "projective chart on dim {} needs {} parameters, got {}",
            dim,
            param_count(MeasurementClass::Projective, dim),
            params.len()
        )));
    }
    let h = hermitian_from_params(dim, params);
    let u = hermitian_function(&h, |lambda| Complex64::new(lambda.cos(), lambda.sin()))?;
    projective_from_unitary(&u)
}

/// Rank-1 POVM with d² outcomes from the chart point.
pub fn povm_chart(dim: usize, params: &[f64]) -> Result<Povm> {
    let n_out = dim * dim;
    if params.len() != param_count(MeasurementClass::Povm, dim) {
        return Err(Error::ParamRange(format!(
            "povm chart on dim {} needs {} parameters, got {}",
            dim,
            param_count(MeasurementClass::Povm, dim),
            params.len()
        )));
    }
    let vectors: Vec<Vec<C64>> = (0..n_out)
        .map(|k| {
            (0..dim)
                .map(|i| {
                    let base = 2 * (k * dim + i);
                    Complex64::new(params[base], params[base + 1])
                })
                .collect()
        })
        .collect();
    rank1_povm_from_vectors(dim, &vectors)
}

fn measurement_from_params(class: MeasurementClass, dim: usize, params: &[f64]) -> Result<Povm> {
    match class {
        MeasurementClass::Projective => Ok(projective_chart(dim, params)?.as_povm()),
        MeasurementClass::Povm => povm_chart(dim, params),
    }
}

/// Maximizes S(ρ_A) − Σ p_k S(ρ_{A|k}) over the chosen measurement class.
///
/// Each restart runs a Nelder-Mead search from an independent start drawn
/// from one seeded stream, so the first n restarts of a (seed, 2n) run equal
/// those of a (seed, n) run. Ties keep the lowest restart index. The result
/// is never below the value at any start point, and never below 0.
pub fn optimize_classical_correlations(
    rho: &DensityMatrix,
    class: MeasurementClass,
    restarts: usize,
    seed: u64,
) -> Result<OptimizeOutcome> {
    if restarts == 0 {
        return Err(Error::ParamRange("restarts must be >= 1".into()));
    }
    let dim = rho.split().dim_b;
    let n_params = param_count(class, dim);
    let mut rng = seeded(seed);

    let objective = |x: &[f64]| match measurement_from_params(class, dim, x) {
        Ok(m) => match fixed_measurement_classical_info(rho, &m) {
            Ok(v) => -v,
            Err(_) => 1e3,
        },
        // degenerate chart point (e.g. near-singular T); steer away
        Err(_) => 1e3,
    };

    let mut best_value = f64::NEG_INFINITY;
    let mut best_params: Vec<f64> = vec![0.0; n_params];
    let mut total_evals = 0usize;
    for _ in 0..restarts {
        let start: Vec<f64> = (0..n_params)
            .map(|_| {
                use rand::Rng;
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
            })
            .collect();
        let r = nelder_mead(objective, &start, SIMPLEX_SCALE, SIMPLEX_TOL, MAX_EVALS);
        total_evals += r.evals;
        if -r.value > best_value {
            best_value = -r.value;
            best_params = r.x;
        }
    }

    Ok(OptimizeOutcome {
        j: best_value.max(0.0),
        best: BestMeasurement { class, params: best_params },
        evals: total_evals,
    })
}
