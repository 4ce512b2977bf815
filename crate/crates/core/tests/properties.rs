use mpoints::arith::{factorize, is_prime, quadratic_valuations, QuadraticPlace};
use mpoints::enumerate::{count_series, primitive_points, CountOptions, Membership};
use mpoints::exactlin::{
    dual_cone, min_parameter_in_cone, minimal_face, q, smith_normal_form, Extended, IntMatrix,
    RationalCone, Q, Z,
};
use mpoints::fitting::{fit_power_log, FitMode};
use mpoints::oracle::brute_generators;
use mpoints::pairspec::{
    build_pair, permute_vector, reduce_generators, ConfigDocument, Family, FamilyKind, Mult,
    PairModel,
};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeSet, HashSet};

fn pair(json: &str) -> PairModel {
    build_pair(&ConfigDocument::from_json(json).unwrap()).unwrap()
}

fn coordinate_pair(vars: usize, n: usize, kind: &str, m: &[u64]) -> PairModel {
    let divs: Vec<String> = (0..n)
        .map(|i| format!(r#"{{"name":"D{i}","form":"x{i}"}}"#))
        .collect();
    let ms: Vec<String> = m.iter().map(|x| x.to_string()).collect();
    pair(&format!(
        r#"{{"ambient":{{"projective":{vars}}},"divisors":[{}],"family":{{"kind":"{kind}","m":[{}]}}}}"#,
        divs.join(","),
        ms.join(",")
    ))
}

fn norm_pair(vars: usize, kind: &str, m: u64, geometric: bool) -> PairModel {
    pair(&format!(
        r#"{{"ambient":{{"projective":{vars}}},"divisors":[{{"name":"q","form":"x0^2 + x1^2","splitting":{{"quadratic":-1}}}}],"family":{{"kind":"{kind}","m":[{m}],"geometric":{geometric}}}}}"#
    ))
}

fn counts(p: &PairModel, bounds: &[u64]) -> Vec<u128> {
    count_series(
        p,
        bounds,
        CountOptions {
            chunks: 8,
            threads: 2,
        },
    )
    .unwrap()
    .rows
    .iter()
    .map(|r| r.1)
    .collect()
}

fn family(kind: FamilyKind, m: &[u64]) -> Family {
    Family::split(kind, m.iter().map(|&x| Mult::Fin(x)).collect())
}

fn planted(c: f64, a: f64, b: u32) -> Vec<(f64, f64)> {
    (4..=24)
        .map(|k| 2f64.powi(k))
        .map(|x| (x, c * x.powf(a) * x.ln().powi(b as i32 - 1)))
        .collect()
}

#[test]
fn factorize_reassembles() {
    let mut rng = StdRng::seed_from_u64(11);
    for i in 0..1_000_000u64 {
        let n: i128 = if i % 1000 == 0 {
            rng.random_range(1..=1i128 << 62)
        } else {
            rng.random_range(-1_000_000_000_000..=1_000_000_000_000)
        };
        if n == 0 {
            continue;
        }
        let f = factorize(n).unwrap();
        assert_eq!(f.value(), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factors_are_prime(n in 2i128..(1i128 << 80)) {
        let f = factorize(n).unwrap();
        prop_assert_eq!(f.value(), n);
        for w in f.factors.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
        for (p, _) in &f.factors {
            prop_assert!(is_prime(*p));
        }
    }

    #[test]
    fn gaussian_split_places(x in -400i64..400, y in -400i64..400, k in 0usize..4) {
        prop_assume!(x != 0 || y != 0);
        let p = [5u64, 13, 17, 29][k];
        let place = QuadraticPlace::new(p, -1, None).unwrap();
        let (a, b) = quadratic_valuations(x, y, &place, &[]).unwrap().unwrap();
        let norm = x as i128 * x as i128 + y as i128 * y as i128;
        prop_assert_eq!(a + b, factorize(norm).unwrap().exponent(p as u128));
        let (c, d) = quadratic_valuations(x, -y, &place, &[]).unwrap().unwrap();
        prop_assert_eq!((c, d), (b, a));
        for m in 2..4 {
            if (a == 0 || a >= m) && (b == 0 || b >= m) {
                prop_assert!(a + b == 0 || a + b >= m);
            }
        }
    }

    #[test]
    fn smith_form(rows in prop::collection::vec(prop::collection::vec(-6i64..6, 3), 1..4)) {
        let a = IntMatrix::from_i64(3, &rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.diag.clone());
        for w in s.factors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        if rows.len() == 3 {
            let det = mpoints::exactlin::linalg::det(
                &rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>(),
            );
            let prod = s.factors.iter().fold(Z::from(1), |acc, d| acc * d);
            if !det.is_zero() {
                prop_assert_eq!(Q::from_integer(prod), det.abs());
            }
        }
    }

    #[test]
    fn double_dual(gens in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 3..6),
                   probes in prop::collection::vec(prop::collection::vec(-5i64..6, 3), 20)) {
        let c = RationalCone::from_i64(3, &gens);
        prop_assume!(c.span_dim() == 3);
        let dd = dual_cone(&dual_cone(&c));
        for x in &probes {
            let x: Vec<Q> = x.iter().map(|&v| q(v)).collect();
            prop_assert_eq!(c.contains(&x), dd.contains(&x));
        }
    }

    #[test]
    fn minimal_face_is_a_face(gens in prop::collection::vec(prop::collection::vec(0i64..4, 3), 3..6),
                              weights in prop::collection::vec(0i64..3, 6)) {
        let c = RationalCone::from_i64(3, &gens);
        let point: Vec<Q> = (0..3)
            .map(|i| gens.iter().zip(&weights).map(|(g, w)| q(g[i] * w)).sum())
            .collect();
        let face = minimal_face(&c, &point).unwrap();
        let f = RationalCone::new(3, face.generators.clone());
        prop_assert!(f.contains(&point));
        for g in &face.generators {
            let doubled: Vec<Q> = g.iter().map(|x| x * q(2)).collect();
            let sum: Vec<Q> = g.iter().zip(&point).map(|(a, b)| a + b).collect();
            prop_assert!(f.contains(&doubled) && f.contains(&sum) && c.contains(g));
        }
    }

    #[test]
    fn min_parameter_monotone(gens in prop::collection::vec(prop::collection::vec(0i64..4, 2), 2..5),
                              extra in prop::collection::vec(-2i64..4, 2),
                              base in prop::collection::vec(-4i64..2, 2),
                              dir in prop::collection::vec(1i64..4, 2)) {
        let small = RationalCone::from_i64(2, &gens);
        let mut more = gens.clone();
        more.push(extra);
        let big = RationalCone::from_i64(2, &more);
        let b: Vec<Q> = base.iter().map(|&x| q(x)).collect();
        let d: Vec<Q> = dir.iter().map(|&x| q(x)).collect();
        let ts = min_parameter_in_cone(&small, &b, &d);
        let tb = min_parameter_in_cone(&big, &b, &d);
        let key = |e: &Extended| match e {
            Extended::NegInf => (0, None),
            Extended::Finite(x) => (1, Some(x.clone())),
            Extended::PosInf => (2, None),
        };
        prop_assert!(key(&tb) <= key(&ts), "{:?} vs {:?}", tb, ts);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn planted_models_recovered(c in 0.2f64..5.0, a in 0.2f64..3.0, b in 1u32..=4) {
        let data = planted(c, a, b);
        let f = fit_power_log(&data, FitMode::Free).unwrap();
        prop_assert!((f.a_hat - a).abs() < 1e-3);
        prop_assert!((f.b_minus1_hat - (b as f64 - 1.0)).abs() < 1e-3);
        prop_assert!((f.log_c - c.ln()).abs() < 1e-3);
    }

    #[test]
    fn true_a_fits_best(c in 0.2f64..5.0, a in 0.4f64..3.0, b in 1u32..=4) {
        let data = planted(c, a, b);
        let r = |x: f64| fit_power_log(&data, FitMode::FixedA(x)).unwrap().residual;
        prop_assert!(r(a) <= r(a - 0.2));
        prop_assert!(r(a) <= r(a + 0.2));
    }

    #[test]
    fn predicate_inclusions(m in prop::collection::vec(2u64..6, 1..4), seed in any::<u64>()) {
        let n = m.len();
        let mut rng = StdRng::seed_from_u64(seed);
        let darmon = family(FamilyKind::Darmon, &m);
        let campana = family(FamilyKind::Campana, &m);
        let weak = family(FamilyKind::WeakCampana, &m);
        for f in [&darmon, &campana, &weak] {
            prop_assert!(f.contains(&vec![0; n]));
        }
        for _ in 0..200 {
            let w: Vec<u64> = (0..n).map(|_| rng.random_range(0..13)).collect();
            prop_assert!(!darmon.contains(&w) || campana.contains(&w));
            prop_assert!(!campana.contains(&w) || weak.contains(&w));
        }
    }

    #[test]
    fn generators_match_the_scan(kind in 0usize..3, m in prop::collection::vec(2u64..4, 1..3)) {
        let name = ["campana", "darmon", "weak_campana"][kind];
        let p = coordinate_pair(3, m.len(), name, &m);
        let bound = 4 * m.iter().max().unwrap();
        let boxed: BTreeSet<Vec<u64>> = p
            .generators
            .iter()
            .map(|g| g.w.clone())
            .filter(|w| w.iter().all(|&x| x <= bound))
            .collect();
        prop_assert_eq!(boxed, brute_generators(&p.family, &vec![bound; m.len()]));
    }
}

#[test]
fn weight_one_leaves_the_weak_sum() {
    let campana = family(FamilyKind::Campana, &[1, 2]);
    let weak = family(FamilyKind::WeakCampana, &[1, 1]);
    assert!(campana.contains(&[1, 0]));
    assert!(!family(FamilyKind::WeakCampana, &[1, 2]).contains(&[1, 0]));
    assert!(!weak.contains(&[3, 0]));
    assert!(weak.contains(&[0, 0]));
}

#[test]
fn generators_are_galois_stable() {
    for p in [
        norm_pair(3, "campana", 2, false),
        norm_pair(3, "weak_campana", 3, true),
    ] {
        let gens: HashSet<Vec<u64>> = p.generators.iter().map(|g| g.w.clone()).collect();
        for sigma in &p.galois.elements {
            for w in &gens {
                assert!(gens.contains(&permute_vector(sigma, w)));
            }
        }
    }
}

#[test]
fn reduction_subsets() {
    for (kind, m) in [
        ("weak_campana", vec![2, 3]),
        ("campana", vec![2, 2, 3]),
        ("weak_campana", vec![2, 2, 2]),
    ] {
        let p = coordinate_pair(3, m.len(), kind, &m);
        let all: HashSet<_> = p.generators.iter().cloned().collect();
        let (boundary, vertices) = reduce_generators(&p.generators, &p.strata);
        let bset: HashSet<_> = boundary.iter().cloned().collect();
        assert!(vertices.iter().all(|g| bset.contains(g)));
        assert!(boundary.iter().all(|g| all.contains(g)));
        let (b2, v2) = reduce_generators(&boundary, &p.strata);
        assert_eq!(b2, boundary);
        assert_eq!(v2, vertices);
    }
}

#[test]
fn family_inclusions_on_counts() {
    for (vars, bounds) in [
        (2usize, &[10u64, 100, 1000, 5000][..]),
        (3, &[10, 30, 60][..]),
    ] {
        let n = vars.min(3);
        let m = vec![2; n];
        let d = counts(&coordinate_pair(vars, n, "darmon", &m), bounds);
        let c = counts(&coordinate_pair(vars, n, "campana", &m), bounds);
        let w = counts(&coordinate_pair(vars, n, "weak_campana", &m), bounds);
        for i in 0..bounds.len() {
            assert!(d[i] <= c[i] && c[i] <= w[i], "{d:?} {c:?} {w:?}");
        }
    }
}

#[test]
fn geometric_below_rational() {
    for (vars, bounds) in [(2usize, vec![100u64, 500, 1500]), (3, vec![20, 60])] {
        for kind in ["campana", "weak_campana"] {
            let g = counts(&norm_pair(vars, kind, 2, true), &bounds);
            let r = counts(&norm_pair(vars, kind, 2, false), &bounds);
            assert!(g.iter().zip(&r).all(|(a, b)| a <= b), "{kind}: {g:?} {r:?}");
        }
    }
}

#[test]
fn counts_monotone_and_chunk_free() {
    let p = norm_pair(3, "campana", 2, false);
    let bounds: Vec<u64> = (1..=40).collect();
    let reference = counts(&p, &bounds);
    assert!(reference.windows(2).all(|w| w[0] <= w[1]));
    for (threads, chunks) in [(1, 1), (2, 5), (8, 33)] {
        let s = count_series(&p, &bounds, CountOptions { chunks, threads }).unwrap();
        let got: Vec<u128> = s.rows.iter().map(|r| r.1).collect();
        assert_eq!(got, reference);
    }
}

#[test]
fn canonical_representatives_are_unique() {
    for (vars, t) in [(2usize, 30u64), (3, 8)] {
        let pts = primitive_points(vars, t);
        let mut seen = HashSet::new();
        for x in &pts {
            let neg: Vec<i64> = x.iter().map(|v| -v).collect();
            assert!(seen.insert(x.clone()));
            assert!(!seen.contains(&neg));
        }
        let p = coordinate_pair(vars, vars.min(3), "weak_campana", &vec![2; vars.min(3)]);
        let m = Membership::new(&p).unwrap();
        let direct = pts.iter().filter(|x| m.contains(x).unwrap()).count() as u128;
        let bounds = [t];
        assert_eq!(counts(&p, &bounds)[0], direct);
    }
}
