//! The invariant report: thresholds, dimension bounds, topological
//! complexity, action dimension, and the L2 nonvanishing degree, each field
//! gated on the evidence actually supplied. Theorem-valued fields are
//! populated only from a validated certificate or witness, or when the
//! caller explicitly opts into citing the theory without certification.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{degree_profile, Graph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown report format `{0}` (expected `text` or `json`)")]
    UnknownFormat(String),
    #[error("report parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Evidence handed to [`compute_report`]. Everything is optional; missing
/// evidence degrades the report with caveats instead of failing.
#[derive(Debug, Clone, Default)]
pub struct ReportArtifacts {
    /// Dimension of the built configuration complex, if one was built.
    pub complex_dimension: Option<i64>,
    /// Betti numbers, if homology was computed.
    pub betti: Option<Vec<usize>>,
    /// A validated product witness exists (the direct-product subgroup).
    pub witness_validated: bool,
    /// Digest of a validated disjoint-conjugates certificate.
    pub certificate_digest: Option<String>,
    /// Fill theorem fields without certification, with a caveat.
    pub trust_paper: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub m: usize,
    pub m3: usize,
    pub threshold: usize,
    pub n: usize,
    pub dim_complex: Option<i64>,
    pub dim_bound_swiatkowski: usize,
    pub abelian_rank_swiatkowski: usize,
    pub tc: Option<usize>,
    pub tc_lower_certificate: Option<String>,
    pub tc_upper_source: Option<String>,
    pub actdim: Option<usize>,
    pub l2_degree: Option<usize>,
    pub caveats: Vec<String>,
}

pub fn compute_report(g: &Graph, n: usize, artifacts: &ReportArtifacts) -> InvariantReport {
    let profile = degree_profile(g);
    let (m, m3) = (profile.m, profile.m3);
    let threshold = 2 * m + m3;
    let mut caveats: Vec<String> = Vec::new();
    if artifacts.complex_dimension.is_none() {
        caveats.push("complex not built: dim_complex unknown".to_string());
    }
    if let (Some(dim), Some(betti)) = (artifacts.complex_dimension, artifacts.betti.as_ref()) {
        // Consistency only; the homotopy-dimension bound concerns a smaller
        // complex and is reported, not enforced on the built one.
        let top_nonzero = betti.iter().rposition(|&b| b > 0).map_or(-1, |k| k as i64);
        debug_assert!(top_nonzero <= dim);
    }
    let theorem_gate = m > 0 && n >= threshold;
    if m == 0 {
        caveats.push("no essential vertices: theorem fields not applicable".to_string());
    } else if n < threshold {
        caveats.push(format!("n below 2m+m3 = {threshold}: theorem fields unset"));
    }
    let mut tc = None;
    let mut tc_lower_certificate = None;
    let mut tc_upper_source = None;
    if theorem_gate {
        if let Some(digest) = &artifacts.certificate_digest {
            tc = Some(2 * m);
            tc_lower_certificate = Some(format!("sha256:{digest}"));
        } else if artifacts.trust_paper {
            tc = Some(2 * m);
            tc_lower_certificate = Some("cited".to_string());
            caveats.push("tc cited, not certified".to_string());
        } else {
            caveats.push("no validated certificate: tc unknown".to_string());
        }
        if tc.is_some() {
            tc_upper_source =
                Some("cd(G) <= TC(G) <= 2 cd(G), with cd bounded by min(m, n)".to_string());
        }
    }
    let witness_gate = theorem_gate
        && (artifacts.witness_validated
            || artifacts.certificate_digest.is_some()
            || artifacts.trust_paper);
    let mut actdim = None;
    let mut l2_degree = None;
    if witness_gate {
        actdim = Some(2 * m);
        l2_degree = Some(m);
        if !artifacts.witness_validated && artifacts.certificate_digest.is_none() {
            caveats.push("actdim and l2_degree cited, not certified".to_string());
        }
    } else if theorem_gate {
        caveats.push("no validated witness: actdim and l2_degree unknown".to_string());
    }
    InvariantReport {
        m,
        m3,
        threshold,
        n,
        dim_complex: artifacts.complex_dimension,
        dim_bound_swiatkowski: m.min(n),
        abelian_rank_swiatkowski: m.min(n / 2),
        tc,
        tc_lower_certificate,
        tc_upper_source,
        actdim,
        l2_degree,
        caveats,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl ReportFormat {
    pub fn from_token(token: &str) -> Result<Self, ReportError> {
        match token {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

fn opt_line<T: std::fmt::Display>(out: &mut String, key: &str, value: &Option<T>) {
    match value {
        Some(v) => {
            let _ = writeln!(out, "{key}: {v}");
        }
        None => {
            let _ = writeln!(out, "{key}: unknown");
        }
    }
}

/// Renders the report; byte-deterministic. The text format has a fixed key
/// order and `unknown` placeholders; caveats follow as `caveats[i]` lines.
pub fn render_report(r: &InvariantReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "m: {}", r.m);
            let _ = writeln!(out, "m3: {}", r.m3);
            let _ = writeln!(out, "threshold: {}", r.threshold);
            let _ = writeln!(out, "n: {}", r.n);
            opt_line(&mut out, "dim_complex", &r.dim_complex);
            let _ = writeln!(out, "dim_bound_swiatkowski: {}", r.dim_bound_swiatkowski);
            let _ = writeln!(
                out,
                "abelian_rank_swiatkowski: {}",
                r.abelian_rank_swiatkowski
            );
            opt_line(&mut out, "tc", &r.tc);
            opt_line(&mut out, "tc_lower_certificate", &r.tc_lower_certificate);
            opt_line(&mut out, "actdim", &r.actdim);
            opt_line(&mut out, "l2_degree", &r.l2_degree);
            for (i, caveat) in r.caveats.iter().enumerate() {
                let _ = writeln!(out, "caveats[{i}]: {caveat}");
            }
            out
        }
    }
}

/// Parses the text rendering back; inverse of [`render_report`] on its
/// image (the round-trip property the tests pin down).
pub fn parse_report(text: &str) -> Result<InvariantReport, ReportError> {
    let mut fields: Vec<(String, String)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line.split_once(": ").ok_or(ReportError::Parse {
            line: lineno,
            msg: "expected `key: value`".to_string(),
        })?;
        fields.push((key.to_string(), value.to_string()));
    }
    let get = |key: &str| -> Result<String, ReportError> {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or(ReportError::Parse {
                line: 0,
                msg: format!("missing key {key}"),
            })
    };
    let parse_usize = |key: &str| -> Result<usize, ReportError> {
        get(key)?.parse().map_err(|_| ReportError::Parse {
            line: 0,
            msg: format!("bad integer for {key}"),
        })
    };
    let opt_usize = |key: &str| -> Result<Option<usize>, ReportError> {
        let v = get(key)?;
        if v == "unknown" {
            Ok(None)
        } else {
            Ok(Some(v.parse().map_err(|_| ReportError::Parse {
                line: 0,
                msg: format!("bad integer for {key}"),
            })?))
        }
    };
    let dim_complex = {
        let v = get("dim_complex")?;
        if v == "unknown" {
            None
        } else {
            Some(v.parse().map_err(|_| ReportError::Parse {
                line: 0,
                msg: "bad integer for dim_complex".to_string(),
            })?)
        }
    };
    let tc_lower_certificate = {
        let v = get("tc_lower_certificate")?;
        if v == "unknown" {
            None
        } else {
            Some(v)
        }
    };
    let caveats: Vec<String> = fields
        .iter()
        .filter(|(k, _)| k.starts_with("caveats["))
        .map(|(_, v)| v.clone())
        .collect();
    let tc = opt_usize("tc")?;
    Ok(InvariantReport {
        m: parse_usize("m")?,
        m3: parse_usize("m3")?,
        threshold: parse_usize("threshold")?,
        n: parse_usize("n")?,
        dim_complex,
        dim_bound_swiatkowski: parse_usize("dim_bound_swiatkowski")?,
        abelian_rank_swiatkowski: parse_usize("abelian_rank_swiatkowski")?,
        tc,
        tc_lower_certificate,
        tc_upper_source: tc
            .map(|_| "cd(G) <= TC(G) <= 2 cd(G), with cd bounded by min(m, n)".to_string()),
        actdim: opt_usize("actdim")?,
        l2_degree: opt_usize("l2_degree")?,
        caveats,
    })
}
