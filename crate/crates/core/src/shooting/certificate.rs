use serde::{Deserialize, Serialize};

use super::transport::{derivative_enclosure, DerivativeInputs, Transport};
use super::{OrbitCandidate, ProofConfig, SideCertificates};
use crate::interval::{Interval, IntervalMatrix};
use crate::manifold::{BlockCertificate, ManifoldCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Proved,
    Failed(String),
    Inconclusive(String),
}

impl Verdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved)
    }
}

/// Per-cell data of the `W` subdivision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub r: Interval,
    pub y: Interval,
    pub return_time: Interval,
    pub x_e: Interval,
    #[serde(rename = "DP")]
    pub dp: IntervalMatrix,
    /// Absent when either manifold bound is missing.
    #[serde(rename = "F_prime")]
    pub f_prime: Option<Interval>,
    pub crossing_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitProofCertificate {
    pub candidate: OrbitCandidate,
    /// `d^e_1`, `r_*` used by the inequalities.
    pub de1: f64,
    pub r_star: f64,
    pub block_b: BlockCertificate,
    pub block_e: BlockCertificate,
    pub bounds_b: Option<ManifoldCertificate>,
    pub bounds_e: Option<ManifoldCertificate>,
    pub return_time: Option<Interval>,
    pub cover_minus: Option<Interval>,
    pub cover_plus: Option<Interval>,
    pub crossing_count: Option<usize>,
    /// Inputs of the combination, with `DP` hulled over all cells.
    pub derivative: Option<DerivativeInputs>,
    #[serde(rename = "F_prime")]
    pub f_prime: Option<Interval>,
    pub r_subdivisions: usize,
    pub y_subdivisions: usize,
    pub cells: Vec<CellRecord>,
    /// Integration problems, if any (they make the verdict inconclusive).
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

fn hull_all(xs: impl IntoIterator<Item = Interval>) -> Option<Interval> {
    xs.into_iter().reduce(Interval::hull)
}

fn hull_slices(xs: &[Result<Interval, String>], label: &str, notes: &mut Vec<String>) -> Option<Interval> {
    let mut ok = Vec::new();
    for x in xs {
        match x {
            Ok(v) => ok.push(*v),
            Err(e) => notes.push(format!("{label} slice: {e}")),
        }
    }
    if ok.len() == xs.len() {
        hull_all(ok)
    } else {
        None
    }
}

impl OrbitProofCertificate {
    pub(crate) fn assemble(
        cand: &OrbitCandidate,
        config: &ProofConfig,
        begin: &SideCertificates,
        end: &SideCertificates,
        tr: Transport,
        r_count: usize,
    ) -> Self {
        let mut notes = Vec::new();
        for (label, s) in [("begin", begin), ("end", end)] {
            if let Err(e) = &s.bounds {
                notes.push(format!("{label} manifold bounds: {e}"));
            }
        }
        let bounds_b = begin.bounds.clone().ok();
        let bounds_e = end.bounds.clone().ok();
        let cover_minus = hull_slices(&tr.minus, "r⁻", &mut notes);
        let cover_plus = hull_slices(&tr.plus, "r⁺", &mut notes);

        let mut cells = Vec::new();
        let mut complete = true;
        let mut counts = Vec::new();
        for c in &tr.cells {
            let img = match &c.outcome {
                Ok(img) => img,
                Err(e) => {
                    notes.push(format!("cell r ∈ {}, y ∈ {}: {e}", c.r, c.y));
                    complete = false;
                    continue;
                }
            };
            let count = match &img.axis_crossings {
                Ok(k) => Some(*k),
                Err(e) => {
                    notes.push(format!("axis count on cell r ∈ {}: {e}", c.r));
                    None
                }
            };
            counts.push(count);
            let f_prime = match (&bounds_b, &bounds_e) {
                (Some(b), Some(e)) => DerivativeInputs::new(img.dp.clone(), e.lip_t, b.lip_t, cand.r_minus())
                    .ok()
                    .map(|inp| derivative_enclosure(&inp)),
                _ => None,
            };
            cells.push(CellRecord {
                r: c.r,
                y: c.y,
                return_time: img.return_time,
                x_e: img.x_e,
                dp: img.dp.clone(),
                f_prime,
                crossing_count: count,
            });
        }
        let complete = complete && !cells.is_empty();
        let return_time = complete.then(|| hull_all(cells.iter().map(|c| c.return_time))).flatten();
        let crossing_count = match counts.first() {
            Some(Some(k)) if complete && counts.iter().all(|c| *c == Some(*k)) => Some(*k),
            _ => None,
        };
        let derivative = match (&bounds_b, &bounds_e, complete) {
            (Some(b), Some(e), true) => {
                let dp = cells.iter().skip(1).fold(cells[0].dp.clone(), |acc, c| acc.hull(&c.dp).expect("2×2"));
                DerivativeInputs::new(dp, e.lip_t, b.lip_t, cand.r_minus()).ok()
            }
            _ => None,
        };
        let f_prime = match (complete && derivative.is_some(), cells.iter().map(|c| c.f_prime).collect::<Option<Vec<_>>>()) {
            (true, Some(fs)) => hull_all(fs),
            _ => None,
        };

        let mut cert = OrbitProofCertificate {
            candidate: *cand,
            de1: config.blocks.de1,
            r_star: config.blocks.r_star,
            block_b: begin.block.clone(),
            block_e: end.block.clone(),
            bounds_b,
            bounds_e,
            return_time,
            cover_minus,
            cover_plus,
            crossing_count,
            derivative,
            f_prime,
            r_subdivisions: r_count,
            y_subdivisions: config.subdivisions.y_count,
            cells,
            notes,
            verdict: Verdict::Inconclusive(String::new()),
        };
        cert.verdict = cert.recheck();
        cert
    }

    /// Re-derives the verdict from the stored intervals alone: the F′ of
    /// every cell is recomputed from its DP and the stored lip constants.
    pub fn recheck(&self) -> Verdict {
        let n = self.candidate.n;
        let mut failed = Vec::new();
        let mut open = Vec::new();
        if self.candidate.check().is_err() {
            failed.push("candidate fields are inconsistent".to_string());
        }
        if !self.block_b.verdict {
            failed.push("Begin block not isolating".into());
        }
        if !self.block_e.verdict {
            failed.push("End block not isolating".into());
        }
        for (label, b) in [("Begin", &self.bounds_b), ("End", &self.bounds_e)] {
            match b {
                Some(c) if c.e.lo() > 0.0 => {}
                Some(_) => failed.push(format!("{label} cone constant not positive")),
                None => failed.push(format!("{label} manifold bounds not certified")),
            }
        }
        match self.return_time {
            Some(t) if t.lo() >= self.r_star => {}
            Some(t) => failed.push(format!("return time {t} not ≥ r_* = {}", self.r_star)),
            None => open.push("return time unavailable".to_string()),
        }
        match (self.cover_minus, self.cover_plus) {
            (Some(m), Some(p)) => {
                let opposite = matches!((m.strict_sign(), p.strict_sign()), (Some(a), Some(b)) if a == -b);
                if !opposite {
                    failed.push(format!("covers {m} and {p} do not have strict opposite signs"));
                } else if !(m.mig() > self.de1 && p.mig() > self.de1) {
                    failed.push(format!("cover magnitudes {m}, {p} not beyond d^e_1 = {}", self.de1));
                }
            }
            _ => open.push("edge-slice covers unavailable".to_string()),
        }
        match self.crossing_count {
            Some(k) if k == n => {}
            Some(k) => failed.push(format!("{k} crossings of A′ = 0, expected {n}")),
            None => open.push("A′ = 0 crossing count not verified on every cell; subdivide W".to_string()),
        }
        match (&self.derivative, self.f_prime) {
            (Some(d), Some(f)) => {
                let recomputed = self.cells.iter().map(|c| {
                    derivative_enclosure(&DerivativeInputs {
                        dp: c.dp.clone(),
                        xs_lip: d.xs_lip,
                        yu_lip_rescaled: d.yu_lip_rescaled,
                    })
                });
                let consistent = self.cells.iter().zip(recomputed).all(|(c, r)| c.f_prime.is_some_and(|cf| r.subset(cf) && cf.subset(f)))
                    && self.cells.iter().all(|c| c.dp.subset(&d.dp));
                let lips_ok = match (&self.bounds_b, &self.bounds_e) {
                    (Some(b), Some(e)) => {
                        Interval::symmetric(e.lip_t.hi()).subset(d.xs_lip)
                            && Interval::point(b.lip_t.hi())
                                .checked_div(Interval::point(self.candidate.r_minus().lo()))
                                .map(|y| y.hi() <= d.yu_lip_rescaled.hi())
                                .unwrap_or(false)
                    }
                    _ => false,
                };
                if !consistent || !lips_ok || self.cells.is_empty() {
                    failed.push("stored F′ is not reproduced by its inputs".into());
                } else if f.contains_zero() {
                    failed.push(format!("F′ = {f} contains 0"));
                }
            }
            _ => open.push("F′ unavailable".to_string()),
        }
        if !failed.is_empty() {
            Verdict::Failed(failed.join("; "))
        } else if !open.is_empty() {
            let mut hint = open.join("; ");
            if let Some(first) = self.notes.first() {
                hint = format!("{hint} ({first})");
            }
            Verdict::Inconclusive(hint)
        } else {
            Verdict::Proved
        }
    }

    /// True when the stored verdict is exactly what the stored intervals
    /// imply.
    pub fn self_validates(&self) -> bool {
        self.recheck() == self.verdict
    }
}
