//! Deterministic JSON reports and plain-text tables.

use std::collections::BTreeMap;

use hochkit::{Discrepancy, GradedRingPresentation, LimitReport, Verdict, VerificationReport};
use serde_json::{json, Map, Value};

/// The common report shape; command-specific fields go in `extra`.
pub struct Report {
    pub command: String,
    pub window: (i64, i64),
    pub dims: BTreeMap<i64, usize>,
    pub products: Vec<Value>,
    pub verdict: Verdict,
    pub first_discrepancy: Option<Value>,
    pub unstabilized_degrees: Vec<i64>,
    pub extra: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &str, window: (i64, i64), dims: BTreeMap<i64, usize>) -> Self {
        Report {
            command: command.to_string(),
            window,
            dims,
            products: Vec::new(),
            verdict: Verdict::Pass,
            first_discrepancy: None,
            unstabilized_degrees: Vec::new(),
            extra: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("command".into(), json!(self.command));
        obj.insert("window".into(), json!([self.window.0, self.window.1]));
        obj.insert("dims".into(), degree_map(&self.dims));
        obj.insert("products".into(), Value::Array(self.products.clone()));
        obj.insert("verdict".into(), json!(self.verdict));
        obj.insert("first_discrepancy".into(), self.first_discrepancy.clone().unwrap_or(Value::Null));
        obj.insert("unstabilized_degrees".into(), json!(self.unstabilized_degrees));
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        serde_json::to_string_pretty(&Value::Object(obj)).expect("report serializes")
    }

    pub fn formality_caveat(&self) -> bool {
        self.extra.iter().any(|(k, v)| k == "formality_caveat" && v == &Value::Bool(true))
    }

    /// One line per nonzero degree, then the verdict for verifying commands.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let nonzero: Vec<_> = self.dims.iter().filter(|(_, d)| **d > 0).collect();
        if nonzero.is_empty() {
            out.push_str(&format!("all degrees in {}:{} have dim 0\n", self.window.0, self.window.1));
        }
        for (t, d) in nonzero {
            out.push_str(&format!("degree {t}: dim {d}\n"));
        }
        out
    }
}

/// Degree-keyed object in increasing numeric order.
pub fn degree_map<V: serde::Serialize>(m: &BTreeMap<i64, V>) -> Value {
    let mut obj = Map::new();
    for (t, v) in m {
        obj.insert(t.to_string(), json!(v));
    }
    Value::Object(obj)
}

pub fn products(ring: &GradedRingPresentation) -> Vec<Value> {
    let Some(ps) = &ring.products else { return Vec::new() };
    ps.iter()
        .filter(|p| !p.result.is_zero())
        .map(|p| {
            let result: Vec<Value> =
                p.result.iter().map(|(i, c)| json!([i, c.to_fraction_string()])).collect();
            json!({"left": [p.left.0, p.left.1], "right": [p.right.0, p.right.1], "result": result})
        })
        .collect()
}

pub fn limit_fields(limit: &LimitReport) -> Vec<(String, Value)> {
    let stages: Map<String, Value> =
        limit.stage_dims.iter().map(|(n, d)| (n.to_string(), degree_map(d))).collect();
    let failures: Vec<Value> =
        limit.mittag_leffler_failures.iter().map(|(s, d)| json!({"stage": s, "degree": d})).collect();
    vec![
        ("stabilization".into(), degree_map(&limit.stabilization)),
        ("stage_dims".into(), Value::Object(stages)),
        ("mittag_leffler_failures".into(), Value::Array(failures)),
        ("lim1_unresolved".into(), json!(limit.lim1_unresolved)),
    ]
}

pub fn discrepancy(d: &Discrepancy) -> Value {
    json!(d)
}

pub fn verification(r: &VerificationReport) -> Report {
    let dims: BTreeMap<i64, usize> = r.exterior.dims.clone();
    let mut rep = Report::new("verify-koszul", r.window, dims);
    rep.products = products(&r.exterior);
    rep.verdict = r.verdict;
    rep.first_discrepancy = r.first_discrepancy.as_ref().map(discrepancy);
    rep.unstabilized_degrees = r.unstabilized_degrees.clone();
    let side_by_side: BTreeMap<i64, Value> =
        r.dims.iter().map(|(t, (e, p))| (*t, json!({"exterior": e, "polynomial": p}))).collect();
    let ranks: Vec<Value> = r
        .product_ranks
        .iter()
        .map(|((i, j), (e, p))| json!({"degrees": [i, j], "exterior": e, "polynomial": p}))
        .collect();
    let koszul: Map<String, Value> = r
        .koszul_dual_dims
        .iter()
        .map(|(k, rows)| {
            let m: BTreeMap<i64, Value> = rows.iter().map(|(t, (a, b))| (*t, json!([a, b]))).collect();
            (k.clone(), degree_map(&m))
        })
        .collect();
    rep.extra = vec![
        ("group".into(), json!(r.group)),
        ("field".into(), json!(r.field.to_string())),
        ("formality_caveat".into(), json!(r.formality_caveat)),
        ("comparison".into(), degree_map(&side_by_side)),
        ("product_ranks".into(), Value::Array(ranks)),
        ("koszul_dual_dims".into(), Value::Object(koszul)),
        ("stabilization".into(), degree_map(&r.limit.stabilization)),
    ];
    rep
}
