use mpoints::enumerate::{count_series, CountOptions};
use mpoints::invariants::{predict_default, rank_formula};
use mpoints::oracle::brute_count;
use mpoints::pairspec::{build_pair, ConfigDocument, PairModel};
use std::path::PathBuf;

fn configs() -> Vec<(String, PairModel)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut out = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    for p in paths {
        let text = std::fs::read_to_string(&p).unwrap();
        let doc =
            ConfigDocument::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let pair = build_pair(&doc).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        out.push((p.file_name().unwrap().to_string_lossy().into_owned(), pair));
    }
    out
}

#[test]
fn every_config_round_trips() {
    for (name, pair) in configs() {
        let again = ConfigDocument::from_json(&pair.config.to_json()).unwrap();
        assert_eq!(again, pair.config, "{name}");
    }
}

#[test]
fn invariants_of_shipped_pairs() {
    for (name, pair) in configs() {
        if !pair.proper {
            continue;
        }
        let r = predict_default(&pair).unwrap_or_else(|e| panic!("{name}: {e}"));
        eprintln!(
            "{name}: a = {}, b = {}, rigid = {}, pic rank = {}, torsion = {:?}",
            r.a, r.b, r.rigid, r.pic_rank, r.invariant_factors
        );
        assert_eq!(r.pic_rank, rank_formula(&pair), "{name}");
    }
}

#[test]
fn counts_agree_with_the_oracle() {
    for (name, pair) in configs() {
        let t = if pair.ambient == mpoints::pairspec::Ambient::Projective(2) {
            200
        } else {
            15
        };
        let bounds: Vec<u64> = (1..=t).map(|x: u64| x.pow(pair.height_degree)).collect();
        let series = count_series(
            &pair,
            &bounds,
            CountOptions {
                chunks: 4,
                threads: 2,
            },
        )
        .unwrap();
        for &tt in &[1, t / 2, t] {
            let brute = brute_count(&pair, tt).unwrap() as u128;
            assert_eq!(series.rows[tt as usize - 1].1, brute, "{name} at T = {tt}");
        }
    }
}
