//! JSON certificate files. Intervals are `{"lo": "...", "hi": "..."}` with
//! shortest round-trip decimal strings.

use std::path::Path;

use anyhow::{bail, Context};
use conefield::manifold::{AnalyticResult, BlockCertificate, ManifoldCertificate};
use conefield::shooting::{OrbitProofCertificate, Verdict};
use conefield::Interval;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideReport {
    pub field: String,
    pub block: BlockCertificate,
    /// Closed-form block lemma, when it applies to the block shape.
    pub analytic_block: Option<AnalyticResult>,
    /// Cone constant `E` (lower end certified).
    pub cone: Option<Interval>,
    pub bounds: Option<ManifoldCertificate>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Manifold { sides: Vec<SideReport> },
    OrbitProofs { refine: Option<usize>, certificates: Vec<OrbitProofCertificate> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub config_sha256: String,
    #[serde(flatten)]
    pub payload: Payload,
}

impl Envelope {
    pub fn new(config_sha256: String, payload: Payload) -> Self {
        Envelope { schema_version: SCHEMA_VERSION, config_sha256, payload }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let env: Envelope = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if env.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema version {} (expected {SCHEMA_VERSION})", env.schema_version);
        }
        Ok(env)
    }
}

/// 0 = all proved, 1 = any failed, 2 = any inconclusive.
pub fn exit_code<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> u8 {
    let mut code = 0;
    for v in verdicts {
        match v {
            Verdict::Proved => {}
            Verdict::Failed(_) => return 1,
            Verdict::Inconclusive(_) => code = 2,
        }
    }
    code
}
