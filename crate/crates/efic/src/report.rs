//! Serializable views of analysis results, and payment-table input.

use std::collections::BTreeMap;

use efic_core::{
    Arc, ConstraintGraph, Frontier, ImplementabilityReport, PartitionOutcome, PaymentTable,
    TrustPartition, VertexId, ViolationReport, WitnessCycle,
};
use serde::{Deserialize, Serialize};

use crate::document::FormatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexView {
    pub agent: usize,
    pub profile: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcView {
    pub tail: VertexView,
    pub head: VertexView,
    pub kind: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessView {
    pub arcs: Vec<ArcView>,
    pub total_weight: f64,
    pub n_ef: usize,
    pub n_ic: usize,
}

fn vertex(g: &ConstraintGraph, id: VertexId) -> VertexView {
    let v = g.vertex(id);
    VertexView {
        agent: v.agent,
        profile: v.profile,
    }
}

pub fn arc_view(g: &ConstraintGraph, a: &Arc) -> ArcView {
    ArcView {
        tail: vertex(g, a.tail),
        head: vertex(g, a.head),
        kind: a.kind.to_string(),
        weight: a.weight,
    }
}

pub fn witness_view(g: &ConstraintGraph, w: &WitnessCycle) -> WitnessView {
    WitnessView {
        arcs: w.arcs.iter().map(|a| arc_view(g, a)).collect(),
        total_weight: w.total_weight,
        n_ef: w.n_ef,
        n_ic: w.n_ic,
    }
}

#[derive(Debug, Serialize)]
pub struct CheckView {
    pub ef_implementable: bool,
    pub ic_implementable: bool,
    pub ef_and_ic_implementable: bool,
    pub ef_or_ic_implementable: bool,
    pub witnesses: WitnessesView,
}

#[derive(Debug, Serialize)]
pub struct WitnessesView {
    pub ef: Option<WitnessView>,
    pub ic: Option<WitnessView>,
    pub ef_and_ic: Option<WitnessView>,
}

pub fn check_view(g: &ConstraintGraph, r: &ImplementabilityReport) -> CheckView {
    let w = |c: &Option<WitnessCycle>| c.as_ref().map(|c| witness_view(g, c));
    CheckView {
        ef_implementable: r.ef_implementable,
        ic_implementable: r.ic_implementable,
        ef_and_ic_implementable: r.ef_and_ic_implementable,
        ef_or_ic_implementable: r.ef_or_ic_implementable(),
        witnesses: WitnessesView {
            ef: w(&r.ef_witness),
            ic: w(&r.ic_witness),
            ef_and_ic: w(&r.ef_and_ic_witness),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaymentRow {
    pub agent: usize,
    pub profile: Vec<usize>,
    pub payment: f64,
}

pub fn payment_rows(g: &ConstraintGraph, p: &PaymentTable) -> Vec<PaymentRow> {
    (0..g.vertex_count())
        .map(|k| {
            let v = g.vertex(VertexId(k));
            PaymentRow {
                agent: v.agent,
                profile: v.profile,
                payment: p.get(VertexId(k)),
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct ViolationView {
    pub max_ef_violation: f64,
    pub max_ic_violation: f64,
    pub worst_ef_arc: Option<ArcView>,
    pub worst_ic_arc: Option<ArcView>,
}

pub fn violation_view(g: &ConstraintGraph, r: &ViolationReport) -> ViolationView {
    ViolationView {
        max_ef_violation: r.max_ef_violation,
        max_ic_violation: r.max_ic_violation,
        worst_ef_arc: r.worst_ef_arc.as_ref().map(|a| arc_view(g, a)),
        worst_ic_arc: r.worst_ic_arc.as_ref().map(|a| arc_view(g, a)),
    }
}

#[derive(Debug, Serialize)]
pub struct ShiftView {
    pub c_ef: f64,
    pub c_ic: f64,
}

/// `payments` output: the table plus its violations against the unshifted instance.
#[derive(Debug, Serialize)]
pub struct PaymentsView {
    pub shift: ShiftView,
    pub payments: Vec<PaymentRow>,
    pub violations: ViolationView,
}

#[derive(Debug, Serialize)]
pub struct FrontierVertexView {
    pub c_ef: f64,
    pub c_ic: f64,
    pub binding: Vec<WitnessView>,
}

#[derive(Debug, Serialize)]
pub struct SegmentView {
    pub from: usize,
    pub to: usize,
    pub slope: f64,
}

#[derive(Debug, Serialize)]
pub struct FrontierView {
    pub vertices: Vec<FrontierVertexView>,
    pub segments: Vec<SegmentView>,
    pub complete: bool,
    pub rounds: usize,
    pub cuts: usize,
}

pub fn frontier_view(g: &ConstraintGraph, f: &Frontier) -> FrontierView {
    FrontierView {
        vertices: f
            .vertices
            .iter()
            .map(|v| FrontierVertexView {
                c_ef: v.c_ef,
                c_ic: v.c_ic,
                binding: v.binding.iter().map(|w| witness_view(g, w)).collect(),
            })
            .collect(),
        segments: f
            .slopes()
            .into_iter()
            .enumerate()
            .map(|(k, slope)| SegmentView {
                from: k,
                to: k + 1,
                slope,
            })
            .collect(),
        complete: f.complete,
        rounds: f.rounds,
        cuts: f.cuts,
    }
}

/// `partition` output. `surviving_arcs` is the guaranteed scope; `all_arcs`
/// measures the constraints pruning gave up.
#[derive(Debug, Serialize)]
pub struct PartitionView {
    pub trusted: Vec<usize>,
    pub untrusted: Vec<usize>,
    pub payments: Vec<PaymentRow>,
    pub surviving_arcs: ViolationView,
    pub all_arcs: ViolationView,
}

pub fn partition_view(
    g: &ConstraintGraph,
    part: &TrustPartition,
    out: &PartitionOutcome,
) -> PartitionView {
    PartitionView {
        trusted: part.trusted(),
        untrusted: part.untrusted(),
        payments: payment_rows(g, &out.payments),
        surviving_arcs: violation_view(g, &out.surviving),
        all_arcs: violation_view(g, &out.all_arcs),
    }
}

pub fn payments_csv(rows: &[PaymentRow]) -> Result<String, FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["agent", "profile", "payment"])?;
    for r in rows {
        w.write_record([
            r.agent.to_string(),
            profile_cell(&r.profile),
            r.payment.to_string(),
        ])?;
    }
    finish(w)
}

pub fn frontier_csv(f: &Frontier) -> Result<String, FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["c_ef", "c_ic"])?;
    for v in &f.vertices {
        w.write_record([v.c_ef.to_string(), v.c_ic.to_string()])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, FormatError> {
    let bytes = w
        .into_inner()
        .map_err(|e| FormatError::Payments(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Profiles in CSV cells are type indices joined by `-`.
fn profile_cell(profile: &[usize]) -> String {
    profile
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("-")
}

fn parse_profile_cell(cell: &str) -> Result<Vec<usize>, FormatError> {
    cell.split('-')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| FormatError::Payments(format!("bad profile cell {cell:?}")))
        })
        .collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PaymentsDoc {
    payments: Vec<PaymentRow>,
    // Accepted so `payments` output can be fed straight back in.
    #[serde(default)]
    #[allow(dead_code)]
    shift: Option<serde_json::Value>,
    #[serde(default)]
    #[allow(dead_code)]
    violations: Option<serde_json::Value>,
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    agent: usize,
    profile: String,
    payment: f64,
}

/// Reads a payment table as JSON (`{"payments": [...]}`) or as the CSV written
/// by [`payments_csv`], and checks it covers every vertex of `g` exactly once.
pub fn parse_payments(g: &ConstraintGraph, text: &str) -> Result<PaymentTable, FormatError> {
    let rows: Vec<PaymentRow> = if text.trim_start().starts_with('{') {
        serde_json::from_str::<PaymentsDoc>(text)?.payments
    } else {
        let mut rows = Vec::new();
        for rec in csv::Reader::from_reader(text.as_bytes()).deserialize::<CsvRow>() {
            let rec = rec?;
            rows.push(PaymentRow {
                agent: rec.agent,
                profile: parse_profile_cell(&rec.profile)?,
                payment: rec.payment,
            });
        }
        rows
    };
    let mut values: BTreeMap<usize, f64> = BTreeMap::new();
    for r in &rows {
        let id = g.vertex_id(r.agent, &r.profile).ok_or_else(|| {
            FormatError::Payments(format!(
                "no vertex for agent {} at profile {:?}",
                r.agent, r.profile
            ))
        })?;
        if !r.payment.is_finite() {
            return Err(FormatError::Payments(format!(
                "payment for agent {} at profile {:?} is not finite",
                r.agent, r.profile
            )));
        }
        if values.insert(id.0, r.payment).is_some() {
            return Err(FormatError::Payments(format!(
                "duplicate payment for agent {} at profile {:?}",
                r.agent, r.profile
            )));
        }
    }
    if let Some(k) = (0..g.vertex_count()).find(|k| !values.contains_key(k)) {
        let v = g.vertex(VertexId(k));
        return Err(FormatError::Payments(format!(
            "missing payment for agent {} at profile {:?}",
            v.agent, v.profile
        )));
    }
    Ok(PaymentTable::new(
        g.num_agents(),
        values.into_values().collect(),
    ))
}
