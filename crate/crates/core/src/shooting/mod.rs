//! The proof driver: initial sets on the Begin exit face, transport to the
//! End entry sections, cover inequalities, crossing counts and the
//! transversality enclosure, collected into self-validating certificates.

mod certificate;
mod transport;

pub use certificate::{OrbitProofCertificate, Verdict};
pub use transport::{
    derivative_enclosure, derivative_matrix, initial_lohner, initial_set, transport, DerivativeInputs, Transport,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::integrator::{Direction, FlowJob, IntegratorError, SectionSpec};
use crate::interval::Interval;
use crate::manifold::{manifold_bounds, verify_block, ConeForm, HSetBlock, ManifoldError, ManifoldOptions};
use crate::systems::FieldId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShootingError {
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// A connecting-orbit candidate: `r ∈ [r̂ − Δr, r̂ + Δr]` on the Begin exit
/// face, expected to cross `A′ = 0` exactly `n` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitCandidate {
    pub n: usize,
    pub r_hat: f64,
    pub delta_r: f64,
    /// Crossings of the End section counted in either direction.
    pub crossings_to_section: usize,
    /// Sign of the section level `A − A′ = ±d^e_2`.
    pub end_side: i8,
}

impl OrbitCandidate {
    pub fn new(n: usize, r_hat: f64, delta_r: f64) -> Result<Self, ShootingError> {
        if n == 0 {
            return Err(ShootingError::InvalidCandidate("n must be positive".into()));
        }
        if !(delta_r > 0.0 && r_hat - delta_r > 0.0 && r_hat.is_finite()) {
            return Err(ShootingError::InvalidCandidate(format!("need 0 < r̂ − Δr, got r̂ = {r_hat}, Δr = {delta_r}")));
        }
        let end_side = if n % 2 == 1 { 1 } else { -1 };
        Ok(OrbitCandidate { n, r_hat, delta_r, crossings_to_section: n + 1, end_side })
    }

    /// Structural check of the derived fields (for deserialized data).
    pub fn check(&self) -> Result<(), ShootingError> {
        let fresh = OrbitCandidate::new(self.n, self.r_hat, self.delta_r)?;
        if fresh != *self {
            return Err(ShootingError::InvalidCandidate(format!(
                "n = {}: expected {} crossings on side {}, got {} on side {}",
                self.n, fresh.crossings_to_section, fresh.end_side, self.crossings_to_section, self.end_side
            )));
        }
        Ok(())
    }

    pub fn r_minus(&self) -> Interval {
        Interval::point(self.r_hat) - Interval::point(self.delta_r)
    }

    pub fn r_plus(&self) -> Interval {
        Interval::point(self.r_hat) + Interval::point(self.delta_r)
    }

    /// `[r⁻, r⁺]`, outward rounded.
    pub fn r_range(&self) -> Interval {
        self.r_minus().hull(self.r_plus())
    }

    /// The six shipped candidates.
    pub fn defaults() -> Vec<OrbitCandidate> {
        [
            (0.003288250, 4e-7),
            (0.001184020, 6e-8),
            (0.000650050, 3e-8),
            (0.000424204, 2e-8),
            (0.000304427, 1e-8),
            (0.000232050, 8e-9),
        ]
        .iter()
        .enumerate()
        .map(|(i, &(r, d))| OrbitCandidate::new(i + 1, r, d).expect("valid default"))
        .collect()
    }
}

/// Block sizes and the cone form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockConfig {
    pub db1: f64,
    pub db2: f64,
    pub de1: f64,
    pub de2: f64,
    pub r_star: f64,
    pub a: f64,
}

impl Default for BlockConfig {
    fn default() -> Self {
        BlockConfig { db1: 0.125, db2: 2.8e-6, de1: 0.0015, de2: 0.01, r_star: 6.0, a: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub order: usize,
    pub tol: f64,
    pub max_steps: usize,
    pub h_max: f64,
    /// Give up when the section is not reached by this `r`.
    pub t_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { order: 20, tol: 1e-14, max_steps: 20_000, h_max: 0.1, t_max: 60.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubdivisionConfig {
    pub r_count: usize,
    pub y_count: usize,
    /// r-slices of the refined `F′` mode.
    pub refine_count: usize,
}

impl Default for SubdivisionConfig {
    fn default() -> Self {
        SubdivisionConfig { r_count: 1, y_count: 1, refine_count: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofConfig {
    pub blocks: BlockConfig,
    pub candidates: Vec<OrbitCandidate>,
    pub integrator: IntegratorConfig,
    pub subdivisions: SubdivisionConfig,
    pub manifold: ManifoldOptions,
}

impl Default for ProofConfig {
    fn default() -> Self {
        ProofConfig {
            blocks: BlockConfig::default(),
            candidates: OrbitCandidate::defaults(),
            integrator: IntegratorConfig::default(),
            subdivisions: SubdivisionConfig::default(),
            manifold: ManifoldOptions::default(),
        }
    }
}

impl ProofConfig {
    pub fn check(&self) -> Result<(), ShootingError> {
        let b = &self.blocks;
        for (name, v) in [("db1", b.db1), ("db2", b.db2), ("de1", b.de1), ("de2", b.de2), ("r_star", b.r_star), ("a", b.a)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ShootingError::Config(format!("blocks.{name} must be positive and finite, got {v}")));
            }
        }
        let s = &self.subdivisions;
        if s.r_count == 0 || s.y_count == 0 || s.refine_count == 0 {
            return Err(ShootingError::Config("subdivision counts must be at least 1".into()));
        }
        if !(self.integrator.t_max > 0.0) {
            return Err(ShootingError::Config("integrator.t_max must be positive".into()));
        }
        for c in &self.candidates {
            c.check()?;
        }
        self.job_template().map(|_| ())
    }

    /// Validates the integrator settings through a throwaway job.
    fn job_template(&self) -> Result<FlowJob, ShootingError> {
        let x = crate::IntervalVector::from_points(&[1.0, 0.0, 0.0]);
        self.configure(FlowJob::new(FieldId::Original, Interval::ONE, &x).map_err(cfg)?)
    }

    pub(crate) fn configure(&self, job: FlowJob) -> Result<FlowJob, ShootingError> {
        let c = &self.integrator;
        let mut job = job.with_order(c.order).and_then(|j| j.with_tol(c.tol)).and_then(|j| j.with_h_max(c.h_max)).map_err(cfg)?;
        job.max_steps = c.max_steps;
        Ok(job)
    }

    /// `A − A′ = side·d^e_2`.
    pub fn end_section(&self, cand: &OrbitCandidate) -> SectionSpec {
        SectionSpec::new([0.0, 1.0, -1.0], f64::from(cand.end_side) * self.blocks.de2, Direction::Any)
    }

    pub fn begin_block(&self, cand: &OrbitCandidate) -> Result<HSetBlock, ShootingError> {
        let rho = cand.r_plus().ln().map_err(|e| ShootingError::InvalidCandidate(e.to_string()))?;
        HSetBlock::begin(self.blocks.db1, self.blocks.db2, rho.hi()).map_err(|e| ShootingError::Config(e.to_string()))
    }

    pub fn end_block(&self) -> Result<HSetBlock, ShootingError> {
        HSetBlock::end(self.blocks.de1, self.blocks.de2, self.blocks.r_star).map_err(|e| ShootingError::Config(e.to_string()))
    }

    pub fn cone(&self) -> Result<ConeForm, ShootingError> {
        ConeForm::new(self.blocks.a).map_err(|e| ShootingError::Config(e.to_string()))
    }
}

fn cfg(e: IntegratorError) -> ShootingError {
    ShootingError::Config(e.to_string())
}

/// Block check and bounds for one side; a failed precondition is a verdict,
/// not an error.
#[derive(Debug, Clone)]
pub(crate) struct SideCertificates {
    pub block: crate::manifold::BlockCertificate,
    pub bounds: Result<crate::manifold::ManifoldCertificate, String>,
}

fn side_certificates(id: FieldId, block: &HSetBlock, q: &ConeForm, opts: &ManifoldOptions) -> Result<SideCertificates, ShootingError> {
    let cert = verify_block(id, block, opts).map_err(|e| ShootingError::Config(e.to_string()))?;
    let bounds = match manifold_bounds(id, block, q, opts) {
        Ok(b) => Ok(b),
        Err(ManifoldError::PreconditionNotCertified(s)) => Err(s),
        Err(e) => return Err(ShootingError::Config(e.to_string())),
    };
    Ok(SideCertificates { block: cert, bounds })
}

/// Options for one proof run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProveOptions {
    /// Replace the default r-subdivision by this many slices (refined `F′`).
    pub refine: Option<usize>,
}

/// Runs the full pipeline for one candidate.
pub fn prove_orbit(cand: &OrbitCandidate, config: &ProofConfig, opts: ProveOptions) -> Result<OrbitProofCertificate, ShootingError> {
    config.check()?;
    cand.check()?;
    let q = config.cone()?;
    let end = side_certificates(FieldId::End, &config.end_block()?, &q, &config.manifold)?;
    prove_with(cand, config, opts, &end)
}

fn prove_with(
    cand: &OrbitCandidate,
    config: &ProofConfig,
    opts: ProveOptions,
    end: &SideCertificates,
) -> Result<OrbitProofCertificate, ShootingError> {
    let q = config.cone()?;
    let begin = side_certificates(FieldId::Begin, &config.begin_block(cand)?, &q, &config.manifold)?;
    let r_count = opts.refine.unwrap_or(config.subdivisions.r_count);
    if r_count == 0 {
        return Err(ShootingError::Config("refine count must be at least 1".into()));
    }
    let tr = transport(cand, config, r_count, config.subdivisions.y_count)?;
    Ok(OrbitProofCertificate::assemble(cand, config, &begin, end, tr, r_count))
}

/// Proves every configured candidate; output is ordered by candidate.
pub fn prove_all(config: &ProofConfig, opts: ProveOptions) -> Result<Vec<OrbitProofCertificate>, ShootingError> {
    config.check()?;
    if config.candidates.is_empty() {
        return Ok(Vec::new());
    }
    let q = config.cone()?;
    let end = side_certificates(FieldId::End, &config.end_block()?, &q, &config.manifold)?;
    config.candidates.par_iter().map(|c| prove_with(c, config, opts, &end)).collect()
}
