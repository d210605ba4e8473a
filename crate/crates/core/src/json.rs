//! JSON encodings. Rationals are strings `"p/q"` (or `"p"`) so that no
//! precision is lost downstream.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::geometry::QuadNum;
use crate::graph::{GraphWithBoundary, Mode, ValidationReport};
use crate::identities::{ConsistencyReport, IdentityReport};
use crate::linalg::RatMatrix;
use crate::measure::{
    mask_positions, GrassmannPoint, KasteleynMatrix, MeasurementTable, PfaffianPoint,
    SkewKasteleynMatrix,
};
use crate::transport::{EventRecord, SignAssignment};

pub fn rational(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn rationals(qs: &[BigRational]) -> Value {
    Value::Array(qs.iter().map(rational).collect())
}

pub fn matrix(m: &RatMatrix) -> Value {
    let entries: Vec<Value> = (0..m.rows()).map(|i| rationals(m.row(i))).collect();
    json!({
        "rows": m.row_labels(),
        "cols": m.col_labels(),
        "entries": entries,
    })
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Bipartite => "bipartite",
        Mode::General => "general",
    }
}

pub fn quad(q: &QuadNum) -> Value {
    json!({ "a": rational(q.a()), "b": rational(q.b()), "d": rational(q.d()) })
}

pub fn event(g: &GraphWithBoundary, ev: &EventRecord) -> Value {
    let e = g.edge(ev.edge);
    json!({
        "segment": ev.segment,
        "time": quad(&ev.time),
        "vertex": g.label(ev.vertex),
        "edge": [g.label(e.0), g.label(e.1)],
        "transversal": ev.transversal,
    })
}

pub fn signs(g: &GraphWithBoundary, s: &SignAssignment, trace: bool) -> Value {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| json!({ "edge": [g.label(e.0), g.label(e.1)], "sign": s.sign(i) }))
        .collect();
    let mut v = json!({
        "seed": s.seed,
        "attempts": s.attempts,
        "event_count": s.events.len(),
        "digest": s.digest(),
        "edges": edges,
    });
    if trace {
        v["events"] = Value::Array(s.events.iter().map(|ev| event(g, ev)).collect());
    }
    v
}

pub fn kasteleyn(g: &GraphWithBoundary, k: &KasteleynMatrix, trace: bool) -> Value {
    json!({
        "kind": "kasteleyn",
        "internal": k.internal,
        "excess": k.excess,
        "boundary": k.boundary_labels,
        "weighted": k.weighted,
        "matrix": matrix(&k.matrix),
        "signs": signs(g, &k.signs, trace),
    })
}

pub fn skew_kasteleyn(g: &GraphWithBoundary, x: &SkewKasteleynMatrix, trace: bool) -> Value {
    json!({
        "kind": "skew-kasteleyn",
        "internal": x.internal,
        "boundary": x.boundary_labels,
        "weighted": x.weighted,
        "matrix": matrix(x.matrix.matrix()),
        "signs": signs(g, &x.signs, trace),
    })
}

/// Boundary labels at the set bits of `mask`.
pub fn subset_labels(labels: &[String], mask: usize) -> Vec<&str> {
    mask_positions(mask, labels.len())
        .into_iter()
        .map(|p| labels[p].as_str())
        .collect()
}

pub fn table(t: &MeasurementTable) -> Value {
    let values: Vec<Value> = (0..t.values.len())
        .map(|m| json!({ "subset": subset_labels(&t.boundary_labels, m), "value": rational(t.get(m)) }))
        .collect();
    json!({
        "mode": mode_name(t.mode),
        "internal": t.internal,
        "excess": t.excess,
        "boundary": t.boundary_labels,
        "weighted": t.weighted,
        "values": values,
    })
}

pub fn grassmann(p: &GrassmannPoint, boundary: &[String]) -> Value {
    let coords: Vec<Value> = p
        .subsets()
        .iter()
        .zip(&p.plucker)
        .map(|(s, v)| {
            let names: Vec<&str> = s.iter().map(|&i| boundary[i].as_str()).collect();
            json!({ "subset": names, "value": rational(v) })
        })
        .collect();
    json!({
        "k": p.k,
        "n": p.n,
        "L": matrix(&p.l),
        "plucker": coords,
        "nonnegative": p.is_nonnegative(),
        "consistent": p.is_consistent(),
    })
}

pub fn pfaffian_point(p: &PfaffianPoint) -> Value {
    json!({
        "base": rational(&p.base),
        "degenerate": p.degenerate,
        "Y": matrix(p.y.matrix()),
    })
}

pub fn identity(r: &IdentityReport) -> Value {
    json!({
        "identity": r.identity,
        "labels": r.labels,
        "lhs": rational(&r.lhs),
        "rhs": rational(&r.rhs),
        "holds": r.holds,
        "in_circular_order": r.in_circular_order,
    })
}

pub fn consistency(r: &ConsistencyReport, boundary: &[String]) -> Value {
    let failures: Vec<Value> = r
        .failures
        .iter()
        .map(|(s, l, rr)| {
            let names: Vec<&str> = s.iter().map(|&i| boundary[i].as_str()).collect();
            json!({ "subset": names, "lhs": rational(l), "rhs": rational(rr) })
        })
        .collect();
    json!({
        "identity": "pfaffian",
        "checked": r.checked,
        "exhaustive": r.exhaustive,
        "holds": r.holds(),
        "failures": failures,
    })
}

pub fn validation(g: &GraphWithBoundary, r: &ValidationReport) -> Value {
    json!({
        "mode": mode_name(r.mode),
        "valid": r.is_valid(),
        "violations": r.violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "internal": r.counts.internal,
        "excess": r.counts.excess,
        "boundary": g.boundary().iter().map(|&v| g.label(v)).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::frac;

    #[test]
    fn rationals_are_strings() {
        assert_eq!(rational(&frac(-6, 4)), json!("-3/2"));
        assert_eq!(rational(&frac(4, 2)), json!("2"));
    }

    #[test]
    fn matrix_shape() {
        let m = RatMatrix::from_i64(&[&[1, -1]]);
        let v = matrix(&m);
        assert_eq!(v["entries"], json!([["1", "-1"]]));
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    }
}
