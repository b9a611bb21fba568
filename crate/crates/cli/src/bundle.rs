//! Versioned JSON envelopes for codes, witnesses and schedules.

use std::fs;
use std::path::Path;

use addrccz::address::AddressableRsCode;
use addrccz::codes::MatF;
use addrccz::concat::{QubitCssCode, Stage};
use addrccz::css::CssCode;
use addrccz::gates::GateSchedule;
use addrccz::ortho::OrthoWitness;
use addrccz::tri_t::TriWitness;
use addrccz::verify::CodeSpace;
use addrccz::{Elem, FieldCtx};
use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const FORMAT_VERSION: &str = "1.0";
const MAJOR: &str = "1";

fn check_version(v: &str) -> Result<()> {
    if v.split('.').next() != Some(MAJOR) {
        bail!("unsupported format_version {v:?}; this build reads {MAJOR}.x");
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct Bundle {
    pub format_version: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
    pub payload: Value,
}

impl Bundle {
    pub fn new<T: Serialize>(kind: &str, note: Option<String>, payload: &T) -> Result<Bundle> {
        Ok(Bundle {
            format_version: FORMAT_VERSION.into(),
            kind: kind.into(),
            note,
            payload: serde_json::to_value(payload)?,
        })
    }

    pub fn read(path: &Path) -> Result<Bundle> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let b: Bundle = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        check_version(&b.format_version)?;
        Ok(b)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    fn payload<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.payload.clone()).with_context(|| format!("malformed {} payload", self.kind))
    }

    pub fn load(&self) -> Result<Loaded> {
        Ok(match self.kind.as_str() {
            "rs_addressable" => Loaded::Rs(Box::new(self.payload()?)),
            "ortho" => Loaded::Ortho(Box::new(self.payload()?)),
            "designed" => Loaded::Designed(Box::new(self.payload()?)),
            "qubit_css" => Loaded::Qubit(Box::new(self.payload()?)),
            "tri_t" => Loaded::Tri(Box::new(self.payload()?)),
            other => bail!("unknown bundle kind {other:?}"),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckSummary {
    pub checked: u64,
    pub passed: bool,
}

#[derive(Serialize, Deserialize)]
pub struct OrthoPayload {
    pub g: MatF,
    pub k: usize,
    pub witness: OrthoWitness,
    pub code: CssCode,
    pub check: CheckSummary,
}

#[derive(Serialize, Deserialize)]
pub struct DesignedPayload {
    pub t: u32,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub k_prime: usize,
    pub m_prime: usize,
    pub code: CssCode,
    pub lambdas: Vec<Vec<Elem>>,
    pub check: CheckSummary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: Stage,
    pub n: usize,
    pub k: usize,
    pub d_lower: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl StageSummary {
    pub fn of(c: &QubitCssCode) -> StageSummary {
        StageSummary { stage: c.stage, n: c.n, k: c.k, d_lower: c.d_lower, note: c.note.clone() }
    }
}

#[derive(Serialize, Deserialize)]
pub struct QubitPayload {
    pub code: QubitCssCode,
    pub stages: Vec<StageSummary>,
}

pub enum Loaded {
    Rs(Box<AddressableRsCode>),
    Ortho(Box<OrthoPayload>),
    Designed(Box<DesignedPayload>),
    Qubit(Box<QubitPayload>),
    Tri(Box<TriWitness>),
}

impl Loaded {
    pub fn css(&self) -> Option<&CssCode> {
        match self {
            Loaded::Rs(r) => Some(&r.code),
            Loaded::Ortho(o) => Some(&o.code),
            Loaded::Designed(d) => Some(&d.code),
            _ => None,
        }
    }

    pub fn code_space(&self) -> Result<&dyn CodeSpace> {
        match self {
            Loaded::Qubit(q) => Ok(&q.code),
            other => other.css().map(|c| c as &dyn CodeSpace).ok_or_else(|| anyhow!("bundle holds no code")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleHeader {
    format_version: String,
    field: FieldCtx,
    gates: usize,
    depth: Option<usize>,
    max_usage: usize,
}

/// Header line with the depth, then one application per line.
pub fn schedule_to_text(s: &GateSchedule) -> String {
    let h = ScheduleHeader {
        format_version: FORMAT_VERSION.into(),
        field: s.field().clone(),
        gates: s.len(),
        depth: s.depth(),
        max_usage: s.max_usage(),
    };
    let mut out = serde_json::to_string(&h).expect("header serializes");
    out.push('\n');
    out.push_str(&s.to_json_lines());
    out
}

pub fn read_schedule(path: &Path) -> Result<GateSchedule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let h: ScheduleHeader = serde_json::from_str(first).context("schedule header")?;
    check_version(&h.format_version)?;
    Ok(GateSchedule::from_json_lines(&h.field, rest)?)
}
