//! Human-readable rendering of certificate files, with the reference
//! values alongside.

use std::fmt::Write;

use conefield::shooting::OrbitProofCertificate;
use conefield::Interval;
use serde_json::Value;

use crate::certs::{Envelope, Payload};

/// Reference return-time bounds, n = 1..6.
pub const REFERENCE_RETURN_TIME: [(f64, f64); 6] = [
    (6.5694270711914049, 6.8663028711914071),
    (9.547364685097655, 9.8754898050976578),
    (12.63188037430908, 12.975630434309084),
    (15.467339314615232, 15.811089354615238),
    (18.659449295387446, 19.009330830371958),
    (21.645791630860828, 21.989541646860836),
];

/// Reference edge-slice covers `(r⁻, r⁺)` in bracket notation.
pub const REFERENCE_COVERS: [(&str, &str); 6] = [
    ("-0.0032[19,26]", "0.0032[89,97]"),
    ("0.00189[2,8]", "-0.0018[86,93]"),
    ("-0.0019[87,92]", "0.0019[37,43]"),
    ("0.00209[5,9]", "-0.00221[0,5]"),
    ("-0.00155[5,9]", "0.0015[78,82]"),
    ("0.00173[1,4]", "-0.0016[57,61]"),
];

/// Reference `F′` enclosures.
pub const REFERENCE_F_PRIME: [(f64, f64); 6] = [
    (1396.0, 16970.0),
    (-56203.7, -12850.2),
    (16342.1, 137481.0),
    (-183339.0, -24681.3),
    (39626.1, 307922.0),
    (-435119.0, -1138.93),
];

/// Reference `F′₁` with 100 r-slices.
pub const REFERENCE_F_PRIME_REFINED: (f64, f64) = (7902.54, 8399.24);

pub const REFERENCE_BEGIN_LIP: f64 = 7.65e-6;
pub const REFERENCE_END_LIP: f64 = 0.000252;

fn iv(x: (f64, f64)) -> Interval {
    Interval::new(x.0, x.1).expect("ordered constant")
}

fn show(x: Option<Interval>) -> String {
    x.map_or_else(|| "—".to_string(), |v| v.to_string())
}

fn meets(ours: Option<Interval>, reference: Interval) -> &'static str {
    match ours {
        Some(v) if v.overlaps(reference) => "yes",
        Some(_) => "NO",
        None => "—",
    }
}

fn orbit_rows(out: &mut String, c: &OrbitProofCertificate, refine: Option<usize>) {
    let n = c.candidate.n;
    let _ = writeln!(out, "Orbit n = {n}  r ∈ {}  verdict: {:?}", c.candidate.r_range(), c.verdict);
    let _ = writeln!(out, "  {:<16} {:<48} {:<34} {}", "quantity", "ours", "reference", "intersects");
    let mut row = |name: &str, ours: Option<Interval>, reference: Option<Interval>, label: String| {
        let m = reference.map_or("—", |p| meets(ours, p));
        let _ = writeln!(out, "  {:<16} {:<48} {:<34} {}", name, show(ours), label, m);
    };
    let k = n.checked_sub(1).filter(|&k| k < 6);
    let pt = k.map(|k| iv(REFERENCE_RETURN_TIME[k]));
    row("return time", c.return_time, pt, pt.map_or("—".into(), |p| p.to_string()));
    for (name, ours, idx) in [("cover r⁻", c.cover_minus, 0), ("cover r⁺", c.cover_plus, 1)] {
        let s = k.map(|k| if idx == 0 { REFERENCE_COVERS[k].0 } else { REFERENCE_COVERS[k].1 });
        let p = s.and_then(|s| Interval::parse_compressed(s).ok());
        row(name, ours, p, s.unwrap_or("—").to_string());
    }
    let pf = match (n, refine) {
        (1, Some(100)) => Some(iv(REFERENCE_F_PRIME_REFINED)),
        (_, None) => k.map(|k| iv(REFERENCE_F_PRIME[k])),
        _ => None,
    };
    row("F′", c.f_prime, pf, pf.map_or("—".into(), |p| p.to_string()));
    let _ = writeln!(
        out,
        "  {:<16} {:<48} {:<34} {}",
        "A′ = 0 crossings",
        c.crossing_count.map_or("—".into(), |k| k.to_string()),
        n,
        if c.crossing_count == Some(n) { "equal" } else { "differs" }
    );
    for note in &c.notes {
        let _ = writeln!(out, "  note: {note}");
    }
}

/// Every `{lo, hi}` object in the document, with its JSON path.
fn collect_intervals(v: &Value, path: &str, out: &mut Vec<(String, String, String)>) {
    match v {
        Value::Object(map) => {
            if let (Some(Value::String(lo)), Some(Value::String(hi)), 2) = (map.get("lo"), map.get("hi"), map.len()) {
                out.push((path.to_string(), lo.clone(), hi.clone()));
                return;
            }
            for (k, x) in map {
                collect_intervals(x, &format!("{path}.{k}"), out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                collect_intervals(x, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

pub fn render(env: &Envelope) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "certificate schema {}  config sha256 {}", env.schema_version, env.config_sha256);
    match &env.payload {
        Payload::Manifold { sides } => {
            for s in sides {
                let _ = writeln!(out, "{} block: faces {:?} verdict {}", s.field, s.block.face_bounds.map(|x| x.to_string()), s.block.verdict);
                if let Some(a) = &s.analytic_block {
                    let _ = writeln!(out, "  closed-form block lemma holds: {}", a.holds);
                }
                if let (Some(e), None) = (&s.cone, &s.bounds) {
                    let _ = writeln!(out, "  E {e}");
                }
                if let Some(b) = &s.bounds {
                    let reference = if s.field == "Begin" { REFERENCE_BEGIN_LIP } else { REFERENCE_END_LIP };
                    let _ = writeln!(out, "  E {}  m {}  lip_t {}  (reference lip_t ≤ {reference})", b.e, b.m, b.lip_t);
                }
                if let Some(f) = &s.failure {
                    let _ = writeln!(out, "  failure: {f}");
                }
            }
        }
        Payload::OrbitProofs { refine, certificates } => {
            if let Some(r) = refine {
                let _ = writeln!(out, "refined mode: {r} r-slices");
            }
            for c in certificates {
                orbit_rows(&mut out, c, *refine);
            }
        }
    }
    let json = serde_json::to_value(env).expect("serializable");
    let mut all = Vec::new();
    collect_intervals(&json, "$", &mut all);
    let _ = writeln!(out, "\nall intervals ({}):", all.len());
    for (p, lo, hi) in all {
        let _ = writeln!(out, "  {p} = [{lo}, {hi}]");
    }
    out
}
