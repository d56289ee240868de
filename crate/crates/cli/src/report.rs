//! JSON views of library results.

use empeq::empirical::{ComponentMembership, MembershipVerdict, Refutation};
use empeq::format::{number_value, profile_to_value, round_sig};
use empeq::monotone::MonotonicityVerdict;
use empeq::nash::NashComponent;
use empeq::refine::RefinementVerdict;
use empeq::{Game, MixedProfile};
use serde_json::{json, Map, Value};

pub const DIGITS: usize = 12;

pub fn num(x: f64) -> Value {
    number_value(round_sig(x, DIGITS))
}

pub fn profile(g: &Game, p: &MixedProfile) -> Value {
    profile_to_value(g, p, |x| round_sig(x, DIGITS))
}

pub fn component(g: &Game, c: &NashComponent) -> Value {
    let mut out = Map::new();
    for (i, vs) in c.vertices.iter().enumerate() {
        let list: Vec<Value> = vs
            .iter()
            .map(|v| {
                let mut m = Map::new();
                for (a, &x) in g.actions(i).iter().zip(v) {
                    m.insert(a.clone(), num(x));
                }
                Value::Object(m)
            })
            .collect();
        out.insert(g.players()[i].clone(), Value::Array(list));
    }
    Value::Object(out)
}

pub fn refinement(g: &Game, v: &RefinementVerdict) -> Value {
    json!({
        "status": v.status.as_str(),
        "reason": v.reason,
        "witnesses": v.witnesses.iter().map(|w| json!({
            "epsilon": num(w.epsilon),
            "delta": num(w.delta),
            "profile": profile(g, &w.profile),
        })).collect::<Vec<_>>(),
    })
}

pub fn monotonicity(g: &Game, v: &MonotonicityVerdict) -> Value {
    json!({
        "satisfied": v.satisfied,
        "violations": v.violations.iter().map(|x| json!({
            "player": g.players()[x.player],
            "action": g.actions(x.player)[x.action],
            "other": g.actions(x.player)[x.other],
            "probabilities": [num(x.probs.0), num(x.probs.1)],
            "utilities": [num(x.utilities.0), num(x.utilities.1)],
        })).collect::<Vec<_>>(),
    })
}

fn refutation(g: &Game, r: &Refutation) -> Value {
    let kind = match r {
        Refutation::Dominance { .. } => "dominance",
        Refutation::OrderExhaustion { .. } => "order-exhaustion",
    };
    json!({"kind": kind, "detail": r.describe(g)})
}

pub fn membership(g: &Game, v: &MembershipVerdict) -> Value {
    let mut out = Map::new();
    out.insert("decision".into(), v.decision.as_str().into());
    out.insert("m".into(), num(v.m));
    out.insert(
        "witnesses".into(),
        v.witnesses
            .iter()
            .map(|w| json!({"delta": num(w.delta), "profile": profile(g, &w.profile)}))
            .collect(),
    );
    if let Some(r) = &v.refutation {
        out.insert("refutation".into(), refutation(g, r));
    }
    if let Some(orders) = &v.orders {
        let mut m = Map::new();
        for (i, o) in orders.iter().enumerate() {
            let classes: Vec<Vec<&str>> = o
                .classes()
                .iter()
                .map(|c| c.iter().map(|&a| g.actions(i)[a].as_str()).collect())
                .collect();
            m.insert(g.players()[i].clone(), json!(classes));
        }
        out.insert("orders".into(), Value::Object(m));
    }
    out.insert("diagnostics".into(), json!(v.diagnostics));
    Value::Object(out)
}

pub fn component_membership(g: &Game, c: &ComponentMembership) -> Value {
    json!({
        "vertices": component(g, &c.component),
        "grid_points": c.grid.len(),
        "member_grid_points": c.member_count(),
        "member_intervals": c.intervals.iter().map(|iv| json!({
            "lo": num(iv.lo),
            "hi": num(iv.hi),
            "lo_profile": profile(g, &iv.lo_profile),
            "hi_profile": profile(g, &iv.hi_profile),
        })).collect::<Vec<_>>(),
        "grid": c.grid.iter().map(|p| json!({
            "parameter": p.parameter.map(num),
            "profile": profile(g, &p.profile),
            "decision": p.verdict.decision.as_str(),
        })).collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}
