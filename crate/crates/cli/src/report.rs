use mpoints::enumerate::CountSeries;
use mpoints::exactlin::linalg::Q;
use mpoints::fitting::{FitResult, Ranked};
use mpoints::invariants::AdjointReport;
use mpoints::pairspec::PairModel;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

fn int(z: &num_bigint::BigInt) -> Value {
    match z.to_i64() {
        Some(x) => json!(x),
        None => json!(z.to_string()),
    }
}

pub fn rational(q: &Q) -> Value {
    json!({"num": int(q.numer()), "den": int(q.denom())})
}

fn opt_rational(q: &Option<Q>) -> Value {
    q.as_ref().map_or(Value::Null, rational)
}

pub fn invariant_block(pair: &PairModel, r: &AdjointReport) -> Value {
    let decomposition = r.decomposition.as_ref().map_or(Value::Null, |d| {
        json!({
            "aLog": rational(&d.a_log),
            "bBase": d.b_base,
            "iSet": d.i_set,
            "rigidLog": d.rigid_log,
            "faceInBoundary": d.face_in_boundary,
            "correctionSets": d.correction.as_ref().map_or(Value::Null, |t| json!({"bOrbits": t.b_orbits, "bPrimeOrbits": t.b_prime_orbits})),
        })
    });
    json!({
        "name": pair.name,
        "configHash": mpoints::enumerate::config_hash(pair),
        "L": pair.l_class,
        "a": rational(&r.a),
        "b": r.b,
        "rigid": r.rigid,
        "alpha": opt_rational(&r.alpha),
        "alphaPeyre": opt_rational(&r.alpha_peyre),
        "picRank": r.pic_rank,
        "invariantFactors": r.invariant_factors,
        "stronglyConvex": r.strongly_convex,
        "adjointClass": r.adjoint.iter().map(rational).collect::<Vec<_>>(),
        "minimalFace": r.face_labels,
        "model": r.model(),
        "decomposition": decomposition,
    })
}

pub fn count_block(series: &CountSeries, path: Option<&str>) -> Value {
    json!({
        "series": path,
        "heightDegree": series.height_degree,
        "effectiveS": series.s,
        "boundaryPoints": "excluded",
        "rows": series.rows.iter().map(|(b, n)| json!([b, n.to_string()])).collect::<Vec<_>>(),
    })
}

pub fn fit_block(f: &FitResult) -> Value {
    json!({
        "logC": f.log_c,
        "aHat": f.a_hat,
        "bMinus1Hat": f.b_minus1_hat,
        "aFixed": f.a_fixed,
        "bFixed": f.b_fixed,
        "residual": f.residual,
        "stdErr": f.std_err,
        "samples": f.samples,
        "dropped": f.dropped,
    })
}

pub fn ranking_block(r: &[Ranked]) -> Value {
    Value::Array(
        r.iter()
            .map(|x| json!({"bMinus1": x.b_minus1, "logC": x.log_c, "residual": x.residual}))
            .collect(),
    )
}
