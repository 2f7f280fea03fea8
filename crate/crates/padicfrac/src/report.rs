//! Rendering and serialization: bracket notation, a versioned JSON
//! envelope and byte-stable CSV for sweep tables.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::engine::{Expansion, Kind};
use crate::oracle::AuditReport;
use crate::sweep::{SweepConfig, SweepRow};

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA: &str = "padicfrac/1";

/// Bracket notation: `[b0, b1, ...]` when finite or truncated,
/// `[pre...; overline(per...)]` when periodic.
pub fn render_brackets(p: &BigInt, e: &Expansion) -> String {
    let rendered: Vec<String> = e.quotients.iter().map(|q| q.display_with(p)).collect();
    match e.kind {
        Kind::Periodic { preperiod, period } => {
            let pre = rendered[..preperiod].join(", ");
            let per = rendered[preperiod..preperiod + period].join(", ");
            if preperiod == 0 {
                format!("[overline({per})]")
            } else {
                format!("[{pre}; overline({per})]")
            }
        }
        _ => format!("[{}]", rendered.join(", ")),
    }
}

fn kind_json(kind: &Kind) -> Value {
    match kind {
        Kind::Finite => json!({ "kind": "finite" }),
        Kind::Periodic { preperiod, period } => json!({
            "kind": "periodic",
            "preperiod": preperiod,
            "period": period,
        }),
        Kind::Truncated => json!({ "kind": "truncated" }),
    }
}

/// Full diagnostics envelope for one expansion. Big integers are
/// serialized as decimal strings so no reader is forced into f64.
pub fn expansion_json(e: &Expansion) -> Value {
    let p = BigInt::from(e.p);
    let quotients: Vec<Value> = e
        .quotients
        .iter()
        .map(|q| {
            json!({
                "unit": q.unit().to_string(),
                "exp": q.exp(),
                "display": q.display_with(&p),
            })
        })
        .collect();
    let diagnostics: Vec<Value> = e
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "vp_alpha": d.vp_alpha,
                "vp_b": d.vp_b,
                "abs_p": d.abs_p.to_string(),
                "abs_q": d.abs_q.to_string(),
                "vp_b_conv": d.vp_b_conv,
            })
        })
        .collect();
    let convergents: Vec<Value> = e
        .convergents
        .iter()
        .map(|(a, b)| json!([a.to_string(), b.to_string()]))
        .collect();
    json!({
        "schema": SCHEMA,
        "p": e.p,
        "algorithm": e.alg.to_string(),
        "result": kind_json(&e.kind),
        "steps": e.quotients.len(),
        "rendered": render_brackets(&p, e),
        "quotients": quotients,
        "diagnostics": diagnostics,
        "convergents": convergents,
    })
}

/// Audit results in the same envelope shape as expansions.
pub fn audit_json(reports: &[AuditReport]) -> Value {
    let items: Vec<Value> = reports
        .iter()
        .map(|r| {
            let checks: Vec<Value> = r
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "pass": c.pass,
                        "witness_index": c.witness_index,
                        "witness": c.witness,
                    })
                })
                .collect();
            json!({
                "subject": r.subject,
                "pass": r.all_pass(),
                "checks": checks,
            })
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "pass": reports.iter().all(|r| r.all_pass()),
        "reports": items,
    })
}

/// Resolved-config comment block reproduced at the top of every CSV so a
/// table is self-describing.
fn csv_config_header(config: &SweepConfig) -> String {
    config
        .resolved_pairs()
        .into_iter()
        .map(|(k, v)| format!("# {k} = {v}\n"))
        .collect()
}

/// CSV with the fixed column contract `p,murru,browkin1,neww,modified,total`.
pub fn table_csv(config: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut out = csv_config_header(config);
    out.push_str("p,murru,browkin1,neww,modified,total\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.p,
            row.murru,
            row.browkin1,
            row.neww,
            row.modified,
            row.total
        ));
    }
    out
}

/// The same table as a JSON envelope.
pub fn table_json(config: &SweepConfig, rows: &[SweepRow]) -> Value {
    let cfg: Value = config
        .resolved_pairs()
        .into_iter()
        .map(|(k, v)| (k, Value::String(v)))
        .collect::<serde_json::Map<String, Value>>()
        .into();
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "p": r.p,
                "murru": r.murru,
                "browkin1": r.browkin1,
                "neww": r.neww,
                "modified": r.modified,
                "total": r.total,
            })
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "config": cfg,
        "rows": rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{expand, AlgorithmId};
    use crate::prime::{Branch, PrimeCtx};
    use crate::rat::Rat;
    use crate::surd::Surd;
    use std::sync::Arc;

    #[test]
    fn brackets_finite() {
        let ctx = Arc::new(PrimeCtx::new(71).unwrap());
        let x = Surd::from_rat(ctx, Rat::new(BigInt::from(103), BigInt::from(21)));
        let e = expand(&x, AlgorithmId::Neww, 100).unwrap();
        assert_eq!(render_brackets(&BigInt::from(71), &e), "[-12, -10/71, 5]");
    }

    #[test]
    fn brackets_periodic() {
        let ctx = Arc::new(PrimeCtx::new(5).unwrap());
        let a = Surd::from_sqrt(ctx, BigInt::from(19), Branch::Plus).unwrap();
        let e = expand(&a, AlgorithmId::Neww, 5000).unwrap();
        assert_eq!(
            render_brackets(&BigInt::from(5), &e),
            "[2; overline(3/5, -2, 1/5, -3, 2/5, -1)]"
        );
    }

    #[test]
    fn json_envelope_versioned() {
        let ctx = Arc::new(PrimeCtx::new(5).unwrap());
        let x = Surd::from_rat(ctx, Rat::new(BigInt::from(973), BigInt::from(234)));
        let e = expand(&x, AlgorithmId::Neww, 100).unwrap();
        let v = expansion_json(&e);
        assert_eq!(v["schema"], "padicfrac/1");
        assert_eq!(v["result"]["kind"], "finite");
        assert_eq!(v["steps"], 6);
        assert_eq!(v["quotients"][1]["display"], "4/5");
    }
}
