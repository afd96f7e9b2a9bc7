//! Row models and serialization for campaign output.
//!
//! Every command has a fixed CSV header. Floats are serialized with 17
//! significant digits; timing never appears in CSV so re-runs with the
//! same configuration are byte-identical.

use serde::Serialize;

use llab_core::pierce::NuMomentRow;
use llab_core::report::VerificationReport;
use llab_core::{PatternReport, ShustermanOutcome};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternRow {
    pub n: u64,
    pub corr: i64,
    pub c_pp: u64,
    pub c_pm: u64,
    pub c_mp: u64,
    pub c_mm: u64,
    pub eta: i8,
    pub e_size: u64,
    pub witness_a: Option<u64>,
    pub witness_b: Option<u64>,
    pub case_tag: Option<String>,
}

impl PatternRow {
    pub fn new(report: &PatternReport, witness: Option<&ShustermanOutcome>) -> Self {
        let (witness_a, witness_b, case_tag) = witness_fields(witness);
        PatternRow {
            n: report.modulus,
            corr: report.corr,
            c_pp: report.counts.pp,
            c_pm: report.counts.pm,
            c_mp: report.counts.mp,
            c_mm: report.counts.mm,
            eta: report.eta_min.as_i8(),
            e_size: report.e_size,
            witness_a,
            witness_b,
            case_tag,
        }
    }
}

fn witness_fields(w: Option<&ShustermanOutcome>) -> (Option<u64>, Option<u64>, Option<String>) {
    match w {
        None => (None, None, None),
        Some(ShustermanOutcome::Witness(w)) => (Some(w.a), Some(w.b), Some(w.tag.to_string())),
        Some(ShustermanOutcome::NoWitness { .. }) => (None, None, Some("no-witness".into())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub n: u64,
    pub witness_a: Option<u64>,
    pub witness_b: Option<u64>,
    pub case_tag: String,
}

impl WitnessRow {
    pub fn new(n: u64, outcome: &ShustermanOutcome) -> Self {
        let (witness_a, witness_b, case_tag) = witness_fields(Some(outcome));
        WitnessRow {
            n,
            witness_a,
            witness_b,
            case_tag: case_tag.expect("tag always set for present outcome"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRow {
    pub set_id: String,
    pub n: u64,
    pub b: u64,
    pub card: u64,
    pub star: f64,
    pub et_bound: f64,
    pub k_cutoff: u64,
}

/// Campaign output: one homogeneous batch of rows per command.
pub enum Batch {
    Patterns(Vec<PatternRow>),
    Witness(Vec<WitnessRow>),
    Checks(Vec<VerificationReport>),
    Nu(Vec<NuMomentRow>),
    Discrepancy(Vec<DiscrepancyRow>),
}

impl Batch {
    pub fn len(&self) -> usize {
        match self {
            Batch::Patterns(v) => v.len(),
            Batch::Witness(v) => v.len(),
            Batch::Checks(v) => v.len(),
            Batch::Nu(v) => v.len(),
            Batch::Discrepancy(v) => v.len(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Batch::Patterns(rows) => {
                out.push_str("N,corr,c_pp,c_pm,c_mp,c_mm,eta,e_size,witness_a,witness_b,case_tag\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{},{}\n",
                        r.n,
                        r.corr,
                        r.c_pp,
                        r.c_pm,
                        r.c_mp,
                        r.c_mm,
                        r.eta,
                        r.e_size,
                        opt(r.witness_a),
                        opt(r.witness_b),
                        r.case_tag.as_deref().unwrap_or(""),
                    ));
                }
            }
            Batch::Witness(rows) => {
                out.push_str("N,witness_a,witness_b,case_tag\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        r.n,
                        opt(r.witness_a),
                        opt(r.witness_b),
                        r.case_tag
                    ));
                }
            }
            Batch::Checks(rows) => {
                out.push_str("check_id,N,params,lhs,rhs,tolerance,pass\n");
                for r in rows {
                    let n = r.inputs.get("N").cloned().unwrap_or_default();
                    let params: Vec<String> = r
                        .inputs
                        .iter()
                        .filter(|(k, _)| k.as_str() != "N")
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect();
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.check_id,
                        n,
                        params.join(";"),
                        fmt_float(r.lhs),
                        fmt_float(r.rhs),
                        fmt_float(r.tolerance),
                        r.pass
                    ));
                }
            }
            Batch::Nu(rows) => {
                out.push_str("N,r,moment,ratio\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        r.modulus,
                        r.r,
                        r.moment,
                        fmt_float(r.ratio)
                    ));
                }
            }
            Batch::Discrepancy(rows) => {
                out.push_str("set_id,N,b,card,star,et_bound,K\n");
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.set_id,
                        r.n,
                        r.b,
                        r.card,
                        fmt_float(r.star),
                        fmt_float(r.et_bound),
                        r.k_cutoff
                    ));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        match self {
            Batch::Patterns(rows) => serde_json::to_string_pretty(rows),
            Batch::Witness(rows) => serde_json::to_string_pretty(rows),
            Batch::Checks(rows) => serde_json::to_string_pretty(rows),
            Batch::Nu(rows) => serde_json::to_string_pretty(rows),
            Batch::Discrepancy(rows) => serde_json::to_string_pretty(rows),
        }
    }
}

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
