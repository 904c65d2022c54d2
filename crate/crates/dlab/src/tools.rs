//! JSON front ends for the DEC solver, eluder dimension and optimal design.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use dlab_core::dec_lab::{dec_offset, eluder_dimension, eluder_dimension_class, DecDivergence, DecProblem, DecSolver};
use dlab_core::envs::BanditModel;
use dlab_core::numprob::design::g_optimal_design;
use dlab_core::RewardDist;

pub const DEC_SCHEMA: &str = "dlab.dec/1";
pub const ELUDER_SCHEMA: &str = "dlab.eluder/1";
pub const POINTS_SCHEMA: &str = "dlab.points/1";

fn core(e: dlab_core::Error) -> anyhow::Error {
    anyhow!("{e}")
}

fn check_schema(v: &serde_json::Value, want: &str) -> Result<()> {
    match v.get("schema").and_then(|s| s.as_str()) {
        Some(s) if s == want => Ok(()),
        Some(s) => bail!("unsupported schema {s:?} (expected {want:?})"),
        None => bail!("missing \"schema\" field (expected {want:?})"),
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, schema: &str) -> Result<T> {
    let v: serde_json::Value = serde_json::from_str(text).context("input is not valid JSON")?;
    check_schema(&v, schema)?;
    serde_json::from_value(v).with_context(|| format!("input does not match {schema}"))
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceArg {
    HellingerSq,
    SquaredMeanGap,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseArg {
    #[default]
    Gaussian,
    Bernoulli,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverArg {
    CuttingPlane {
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Hedge {
        iters: usize,
    },
}

fn default_max_iter() -> usize {
    500
}

fn default_tol() -> f64 {
    1e-9
}

/// Models given by per-decision means.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecInput {
    pub schema: String,
    pub gamma: f64,
    pub divergence: DivergenceArg,
    #[serde(default)]
    pub noise: NoiseArg,
    pub models: Vec<Vec<f64>>,
    pub reference: Vec<f64>,
    #[serde(default)]
    pub solver: Option<SolverArg>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateOut {
    pub p: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub upper: f64,
    pub payoffs: Vec<f64>,
    pub iterations: usize,
    pub flagged: bool,
}

fn model(means: &[f64], noise: NoiseArg) -> Result<BanditModel> {
    Ok(match noise {
        NoiseArg::Gaussian => BanditModel::gaussian(means),
        NoiseArg::Bernoulli => BanditModel::new(means.iter().map(|&m| RewardDist::bernoulli(m)).collect::<Result<_, _>>().map_err(core)?),
    })
}

pub fn dec_json(text: &str) -> Result<CertificateOut> {
    let inp: DecInput = parse(text, DEC_SCHEMA)?;
    let kind = match inp.divergence {
        DivergenceArg::HellingerSq => DecDivergence::HellingerSq,
        DivergenceArg::SquaredMeanGap => DecDivergence::SquaredMeanGap,
    };
    let models = inp.models.iter().map(|m| model(m, inp.noise)).collect::<Result<Vec<_>>>()?;
    let reference = model(&inp.reference, inp.noise)?;
    let prob = DecProblem::new(&models, &reference, inp.gamma, kind).map_err(core)?;
    let solver = match inp.solver {
        None => DecSolver::default(),
        Some(SolverArg::CuttingPlane { max_iter, tol }) => DecSolver::CuttingPlane { max_iter, tol },
        Some(SolverArg::Hedge { iters }) => DecSolver::Hedge { iters },
    };
    let c = dec_offset(&prob, solver).map_err(core)?;
    Ok(CertificateOut { p: c.p.probs().to_vec(), value: c.value, gap: c.gap, upper: c.upper, payoffs: c.payoffs, iterations: c.iterations, flagged: c.flagged })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EluderInput {
    pub schema: String,
    /// `values[f][π]`.
    pub values: Vec<Vec<f64>>,
    /// Index of `f*`; the max over the class when absent.
    #[serde(default)]
    pub fstar: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EluderOut {
    pub dim: usize,
    pub witness_eps: f64,
    pub lower_bound_only: bool,
}

pub fn eluder_json(text: &str, eps: f64) -> Result<EluderOut> {
    let inp: EluderInput = parse(text, ELUDER_SCHEMA)?;
    let r = match inp.fstar {
        Some(i) => {
            let fstar = inp.values.get(i).with_context(|| format!("fstar index {i} out of range"))?;
            eluder_dimension(&inp.values, fstar, eps)
        }
        None => eluder_dimension_class(&inp.values, eps),
    }
    .map_err(core)?;
    Ok(EluderOut { dim: r.dim, witness_eps: r.witness_eps, lower_bound_only: r.lower_bound_only })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsInput {
    pub schema: String,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignOut {
    pub weights: Vec<f64>,
    pub leverage: Vec<f64>,
    pub max_leverage: f64,
    pub rank: usize,
    pub iterations: usize,
    pub converged: bool,
}

pub fn design_json(text: &str, tol: f64) -> Result<DesignOut> {
    let inp: PointsInput = parse(text, POINTS_SCHEMA)?;
    let d = g_optimal_design(&inp.points, tol).map_err(core)?;
    Ok(DesignOut {
        weights: d.weights.probs().to_vec(),
        max_leverage: d.max_leverage(),
        leverage: d.leverage,
        rank: d.rank,
        iterations: d.iterations,
        converged: d.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dec_single_model_zero() {
        let c = dec_json(r#"{"schema":"dlab.dec/1","gamma":2,"divergence":"hellinger_sq","models":[[0.2,0.6]],"reference":[0.2,0.6]}"#).unwrap();
        assert!(c.value.abs() < 1e-9);
        assert!(dec_json(r#"{"schema":"dlab.dec/2","gamma":2,"divergence":"hellinger_sq","models":[[0.2]],"reference":[0.2]}"#).is_err());
    }

    #[test]
    fn eluder_binary() {
        let r = eluder_json(r#"{"schema":"dlab.eluder/1","values":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,0],[1,0,1],[0,1,1],[1,1,1]]}"#, 0.4).unwrap();
        assert_eq!(r.dim, 3);
    }

    #[test]
    fn design_basis() {
        let r = design_json(r#"{"schema":"dlab.points/1","points":[[1,0],[0,1]]}"#, 1e-6).unwrap();
        assert!((r.max_leverage - 2.0).abs() < 1e-9);
    }
}
