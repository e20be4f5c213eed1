use rayon::prelude::*;

use super::{OrbitCandidate, ProofConfig, ShootingError};
use crate::integrator::{count_axis_crossings, integrate_to_section, CrossingResult, FlowJob, LohnerSet};
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::manifold::HSetBlock;
use crate::systems::FieldId;

/// `(r, (A, A′))` over the exit face `x_b = d^b_1`: `A = d1 + y_b`,
/// `A′ = (d1 − y_b)/(2r)`.
pub fn initial_set(cand: &OrbitCandidate, block_b: &HSetBlock) -> Result<(Interval, IntervalVector), ShootingError> {
    let r = cand.r_range();
    let (a, p) = face_point(r, block_b.y_range(), block_b.d1)?;
    Ok((r, IntervalVector::from([a, p])))
}

fn face_point(r: Interval, y: Interval, d1: f64) -> Result<(Interval, Interval), ShootingError> {
    let d = Interval::point(d1);
    let p = (d - y).checked_div(r.scale(2.0)).map_err(|e| ShootingError::InvalidCandidate(e.to_string()))?;
    Ok((d + y, p))
}

/// `∂(u, A, A′)/∂(r, y_b)` of the face parameterization with `u = 1/r`.
fn face_jacobian(r: Interval, y: Interval, d1: f64) -> Result<[[Interval; 2]; 3], ShootingError> {
    let err = |e: crate::IntervalError| ShootingError::InvalidCandidate(e.to_string());
    let r2 = r.sqr();
    let d = Interval::point(d1);
    Ok([
        [-r2.recip().map_err(err)?, Interval::ZERO],
        [Interval::ZERO, Interval::ONE],
        [-(d - y).checked_div(r2.scale(2.0)).map_err(err)?, -r.scale(2.0).recip().map_err(err)?],
    ])
}

/// Extended initial set `(1/r, A, A′)` over `r × y` as an affine image of
/// the parameter box plus a mean-value residual.
pub fn initial_lohner(r: Interval, y: Interval, d1: f64) -> Result<LohnerSet, ShootingError> {
    let (rm, ym) = (Interval::point(r.mid()), Interval::point(y.mid()));
    let um = rm.recip().map_err(|e| ShootingError::InvalidCandidate(e.to_string()))?;
    let (am, pm) = face_point(rm, ym, d1)?;
    let pc = [um, am, pm];
    let center: [f64; 3] = std::array::from_fn(|i| pc[i].mid());
    let dc = face_jacobian(rm, ym, d1)?;
    let c: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| if j < 2 { dc[i][j].mid() } else { 0.0 }));
    let r0 = [r - rm, y - ym, Interval::ZERO];
    let dq = face_jacobian(r, y, d1)?;
    let residual: [Interval; 3] = std::array::from_fn(|i| {
        (0..2).fold(pc[i] - Interval::point(center[i]), |s, j| s + (dq[i][j] - Interval::point(c[i][j])) * r0[j])
    });
    Ok(LohnerSet::from_affine(center, c, r0, residual))
}

/// Transport of one parameter cell to the End section.
#[derive(Debug, Clone)]
pub struct CellTransport {
    pub r: Interval,
    pub y: Interval,
    pub outcome: Result<CellImage, String>,
}

#[derive(Debug, Clone)]
pub struct CellImage {
    pub return_time: Interval,
    pub x_e: Interval,
    /// `∂(r_e, x_e)/∂(r, y_b)`.
    pub dp: IntervalMatrix,
    pub axis_crossings: Result<usize, String>,
}

/// Images of the edge slices (`r = r⁻`, `r = r⁺`, split in `y_b`) and of
/// the parameter cells covering `W`.
#[derive(Debug, Clone)]
pub struct Transport {
    pub minus: Vec<Result<Interval, String>>,
    pub plus: Vec<Result<Interval, String>>,
    pub cells: Vec<CellTransport>,
}

fn run(
    cand: &OrbitCandidate,
    config: &ProofConfig,
    r: Interval,
    y: Interval,
    variational: bool,
) -> Result<Result<(FlowJob, CrossingResult), String>, ShootingError> {
    let set = initial_lohner(r, y, config.blocks.db1)?;
    let job = FlowJob::from_set(FieldId::Original, r, set).map_err(|e| ShootingError::Config(e.to_string()))?;
    let job = config.configure(job)?.with_variational(variational);
    let sec = config.end_section(cand);
    Ok(integrate_to_section(&job, &sec, cand.crossings_to_section, config.integrator.t_max)
        .map(|res| (job, res))
        .map_err(|e| e.to_string()))
}

const XE: [f64; 3] = [0.0, 1.0, 1.0];

/// Integrates the edge slices and the `r_count × y_count` cells of `W`.
pub fn transport(cand: &OrbitCandidate, config: &ProofConfig, r_count: usize, y_count: usize) -> Result<Transport, ShootingError> {
    let ys = Interval::symmetric(config.blocks.db2).split(y_count);
    let edge = |r: Interval| -> Result<Vec<Result<Interval, String>>, ShootingError> {
        ys.par_iter().map(|&y| Ok(run(cand, config, r, y, false)?.map(|(_, res)| res.project(&XE)))).collect()
    };
    let minus = edge(cand.r_minus())?;
    let plus = edge(cand.r_plus())?;
    let grid: Vec<(Interval, Interval)> = cand.r_range().split(r_count).into_iter().flat_map(|r| ys.iter().map(move |&y| (r, y))).collect();
    let cells = grid
        .par_iter()
        .map(|&(r, y)| {
            let outcome = match run(cand, config, r, y, true)? {
                Ok((job, res)) => cell_image(&job, &res, r, y, config.blocks.db1),
                Err(e) => Err(e),
            };
            Ok(CellTransport { r, y, outcome })
        })
        .collect::<Result<Vec<_>, ShootingError>>()?;
    Ok(Transport { minus, plus, cells })
}

fn cell_image(job: &FlowJob, res: &CrossingResult, r: Interval, y: Interval, d1: f64) -> Result<CellImage, String> {
    let dp = derivative_matrix(res, r, y, d1).map_err(|e| e.to_string())?;
    Ok(CellImage {
        return_time: res.t_cross,
        x_e: res.project(&XE),
        dp,
        axis_crossings: count_axis_crossings(job, res).map_err(|e| e.to_string()),
    })
}

/// `∂(r_e, x_e)/∂(r, y_b)` from the section Jacobian of a crossing, with
/// `r_e = 1/u_e` and `x_e = A + A′`.
pub fn derivative_matrix(res: &CrossingResult, r: Interval, y: Interval, d1: f64) -> Result<IntervalMatrix, ShootingError> {
    let j = res.jacobian.as_ref().ok_or_else(|| ShootingError::Config("crossing computed without variational equations".into()))?;
    let f = face_jacobian(r, y, d1)?;
    let col = |i: usize, k: usize| (0..3).fold(Interval::ZERO, |s, m| s + j.get(i, m) * f[m][k]);
    let ue2 = res.state[0].sqr();
    let mut out = IntervalMatrix::zeros(2, 2);
    for k in 0..2 {
        let dr = -col(0, k).checked_div(ue2).map_err(|e| ShootingError::InvalidCandidate(e.to_string()))?;
        out.set(0, k, dr);
        out.set(1, k, col(1, k) + col(2, k));
    }
    Ok(out)
}

/// Inputs of the `F′` combination.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DerivativeInputs {
    #[serde(rename = "DP")]
    pub dp: IntervalMatrix,
    pub xs_lip: Interval,
    pub yu_lip_rescaled: Interval,
}

impl DerivativeInputs {
    /// Symmetrizes `[x_s′] = lip_e·[−1, 1]` and `[ỹ_u′] = (lip_b/r⁻)·[−1, 1]`.
    pub fn new(dp: IntervalMatrix, lip_e: Interval, lip_b: Interval, r_minus: Interval) -> Result<Self, ShootingError> {
        let yu = Interval::point(lip_b.hi())
            .checked_div(Interval::point(r_minus.lo()))
            .map_err(|e| ShootingError::InvalidCandidate(e.to_string()))?;
        Ok(DerivativeInputs { dp, xs_lip: Interval::symmetric(lip_e.hi()), yu_lip_rescaled: Interval::symmetric(yu.hi()) })
    }
}

/// `F′ = DP₂₁ + DP₂₂·[ỹ_u′] − [x_s′]·(DP₁₁ + DP₁₂·[ỹ_u′])`.
pub fn derivative_enclosure(inputs: &DerivativeInputs) -> Interval {
    let d = &inputs.dp;
    let yu = inputs.yu_lip_rescaled;
    d.get(1, 0) + d.get(1, 1) * yu - inputs.xs_lip * (d.get(0, 0) + d.get(0, 1) * yu)
}
