//! Rendering of command results: canonical JSON by default, a human-oriented
//! text mode behind `--format text`. The JSON surface is the one tests and
//! scripts may rely on.

use decomp_core::automata::{ExtractedCertificate, Trace};
use decomp_core::f2poly::protocol::ProtocolTranscript;
use decomp_core::solver::{BoundReport, SolveResult, SolveStatus};
use decomp_core::{InputTriple, TernaryFunction};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Serialize, Deserialize)]
pub struct YTableFile {
    pub k: u32,
    pub table: String,
}

#[derive(Debug, Serialize)]
pub struct IndexingReport {
    pub k: u32,
    pub inputs: u64,
    pub failures: u64,
    pub max_steps: u32,
    pub step_bound: u32,
    pub time_factor: u32,
}

pub enum Payload<'a> {
    Function(&'a TernaryFunction),
    Solve(&'a SolveResult),
    Verify { counterexample: Option<InputTriple> },
    Bound(&'a BoundReport),
    Protocol(&'a ProtocolTranscript),
    Trace(&'a Trace),
    Extract { extracted: &'a ExtractedCertificate, verified: bool },
    IndexingRun { k: u32, result: u8, expected: u8, steps: u32, bound: u32 },
    IndexingExhaustive(&'a IndexingReport),
}

#[derive(Serialize)]
struct SolveJson<'a> {
    status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    dc: Option<u32>,
    lower: u32,
    upper: u32,
    nodes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<&'a decomp_core::DecompositionCertificate>,
}

#[derive(Serialize)]
struct VerifyJson {
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<InputTriple>,
}

#[derive(Serialize)]
struct TraceJson {
    offset: i64,
    rows: Vec<Vec<u8>>,
}

#[derive(Serialize)]
struct ExtractJson<'a> {
    certificate: &'a decomp_core::DecompositionCertificate,
    u: u32,
    v: u32,
    read_time: u32,
    a_cells: (i64, i64),
    b_cells: (i64, i64),
    verified: bool,
}

#[derive(Serialize)]
struct IndexingRunJson {
    k: u32,
    result: u8,
    expected: u8,
    matches: bool,
    steps: u32,
    step_bound: u32,
}

pub struct OutputSink {
    out: Option<PathBuf>,
    text: bool,
}

impl OutputSink {
    pub fn new(out: Option<PathBuf>, text: bool) -> Self {
        OutputSink { out, text }
    }

    pub fn emit(&self, payload: &Payload<'_>) -> Result<(), String> {
        let body = if self.text { render_text(payload) } else { render_json(payload)? };
        match &self.out {
            None => {
                println!("{body}");
                Ok(())
            }
            Some(path) => std::fs::write(path, body + "\n")
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
        }
    }
}

fn render_json(payload: &Payload<'_>) -> Result<String, String> {
    let json = match payload {
        Payload::Function(f) => f.to_json(),
        Payload::Solve(result) => {
            let body = SolveJson {
                status: result.status,
                dc: result.value(),
                lower: result.lower,
                upper: result.upper,
                nodes: result.stats.nodes,
                certificate: result.certificate.as_ref(),
            };
            serde_json::to_string(&body).map_err(|e| e.to_string())?
        }
        Payload::Verify { counterexample } => serde_json::to_string(&VerifyJson {
            verified: counterexample.is_none(),
            counterexample: *counterexample,
        })
        .map_err(|e| e.to_string())?,
        Payload::Bound(report) => serde_json::to_string(report).map_err(|e| e.to_string())?,
        Payload::Protocol(t) => serde_json::to_string(t).map_err(|e| e.to_string())?,
        Payload::Trace(trace) => {
            let offset = trace.rows.first().map_or(0, |r| r.offset);
            let rows = trace.rows.iter().map(|r| r.cells.clone()).collect();
            serde_json::to_string(&TraceJson { offset, rows }).map_err(|e| e.to_string())?
        }
        Payload::Extract { extracted, verified } => serde_json::to_string(&ExtractJson {
            certificate: &extracted.certificate,
            u: extracted.certificate.u,
            v: extracted.certificate.v,
            read_time: extracted.read_time,
            a_cells: extracted.a_cells,
            b_cells: extracted.b_cells,
            verified: *verified,
        })
        .map_err(|e| e.to_string())?,
        Payload::IndexingRun { k, result, expected, steps, bound } => {
            serde_json::to_string(&IndexingRunJson {
                k: *k,
                result: *result,
                expected: *expected,
                matches: result == expected,
                steps: *steps,
                step_bound: *bound,
            })
            .map_err(|e| e.to_string())?
        }
        Payload::IndexingExhaustive(report) => {
            serde_json::to_string(report).map_err(|e| e.to_string())?
        }
    };
    Ok(json)
}

fn render_text(payload: &Payload<'_>) -> String {
    match payload {
        Payload::Function(f) => format!(
            "function p={} q={} r={} s={} ({} entries)\n{}",
            f.p(),
            f.q(),
            f.r(),
            f.s(),
            f.table().len(),
            f.to_json()
        ),
        Payload::Solve(result) => match result.status {
            SolveStatus::Exact => format!(
                "dc = {} (exact, {} nodes)",
                result.upper, result.stats.nodes
            ),
            _ => format!(
                "dc in [{}, {}] (budget exhausted after {} nodes)",
                result.lower, result.upper, result.stats.nodes
            ),
        },
        Payload::Verify { counterexample } => match counterexample {
            None => "verified".to_string(),
            Some(t) => format!("refuted at (x={}, y={}, z={})", t.x, t.y, t.z),
        },
        Payload::Bound(report) => {
            let m = report.m.map_or("none (vacuous)".to_string(), |m| m.to_string());
            format!("bound m = {m} ({:?})", report.kind)
        }
        Payload::Protocol(t) => format!(
            "k={} d={} f={} |A|={} |B|={} referee={}\nA: {}\nB: {}",
            t.k, t.d, t.f, t.size_a, t.size_b, t.referee, t.message_a, t.message_b
        ),
        Payload::Trace(trace) => trace.dump().trim_end().to_string(),
        Payload::Extract { extracted, verified } => format!(
            "extracted u={} v={} at time {}, a cells {:?}, b cells {:?}: {}",
            extracted.certificate.u,
            extracted.certificate.v,
            extracted.read_time,
            extracted.a_cells,
            extracted.b_cells,
            if *verified { "verified" } else { "REFUTED" }
        ),
        Payload::IndexingRun { k, result, expected, steps, bound } => format!(
            "k={k}: result {result} (expected {expected}) after {steps} steps (bound {bound})"
        ),
        Payload::IndexingExhaustive(r) => format!(
            "k={}: {} inputs, {} failures, max {} steps (bound {} = {}·n)",
            r.k, r.inputs, r.failures, r.max_steps, r.step_bound, r.time_factor
        ),
    }
}
