//! Synthetic three-topic benchmark written to disk, plus helpers for running
//! the `ldir` binary.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOPICS: usize = 3;
pub const VOCAB: usize = 40;
pub const TEXT_TOKENS: usize = 8;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ldir")
}

pub fn ldir(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("ldir binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Token `i` of topic `t`; vocabularies of different topics never overlap.
pub fn token(t: usize, i: usize) -> String {
    const STEMS: [&str; TOPICS] = ["orchard", "harbor", "quartz"];
    format!("{}{i}", STEMS[t])
}

/// `TEXT_TOKENS` distinct tokens of topic `t`.
pub fn topic_text(rng: &mut ChaCha8Rng, t: usize) -> Vec<String> {
    let ids: Vec<usize> = (0..VOCAB).collect();
    ids.choose_multiple(rng, TEXT_TOKENS)
        .map(|&i| token(t, i))
        .collect()
}

fn json_line(id: &str, text: &str) -> String {
    format!("{}\n", serde_json::json!({ "id": id, "text": text }))
}

pub struct Benchmark {
    pub dir: PathBuf,
    pub corpus: PathBuf,
    pub sts: PathBuf,
    pub docs: PathBuf,
    pub queries: PathBuf,
    pub qrels: PathBuf,
    pub clusters: PathBuf,
}

/// Writes a 300-text corpus (100 per topic) and derived evaluation sets:
/// * STS pairs keep `TEXT_TOKENS - r` tokens of a text and swap the other `r`
///   for tokens of another topic; gold is the number of kept tokens.
/// * Retrieval queries are 4 tokens of one document; that document has grade 2
///   and the rest of its topic grade 1.
/// * Clustering items are the corpus texts labelled by topic.
pub fn write_benchmark(dir: &Path, seed: u64) -> Benchmark {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = String::new();
    let mut texts: Vec<(usize, Vec<String>)> = Vec::new();
    for i in 0..300 {
        let t = i % TOPICS;
        let toks = topic_text(&mut rng, t);
        corpus.push_str(&json_line(&format!("c{i:03}"), &toks.join(" ")));
        texts.push((t, toks));
    }

    let mut sts = String::new();
    for p in 0..180 {
        let t = p % TOPICS;
        let other = (t + 1 + rng.random_range(0..TOPICS - 1)) % TOPICS;
        let a = topic_text(&mut rng, t);
        let r = p % (TEXT_TOKENS + 1);
        let mut b: Vec<String> = a[..TEXT_TOKENS - r].to_vec();
        let foreign = topic_text(&mut rng, other);
        b.extend(foreign.into_iter().take(r));
        b.shuffle(&mut rng);
        writeln!(sts, "{}\t{}\t{}", a.join(" "), b.join(" "), TEXT_TOKENS - r).unwrap();
    }

    let docs_idx: Vec<usize> = (0..60).collect();
    let mut docs = String::new();
    for &d in &docs_idx {
        docs.push_str(&json_line(&format!("doc{d:02}"), &texts[d].1.join(" ")));
    }
    let mut queries = String::new();
    let mut qrels = String::from("query-id\tcorpus-id\tscore\n");
    for q in 0..15 {
        let d = q * 4;
        let mut toks = texts[d].1.clone();
        toks.shuffle(&mut rng);
        queries.push_str(&json_line(&format!("q{q:02}"), &toks[..4].join(" ")));
        for &other in &docs_idx {
            if texts[other].0 == texts[d].0 {
                let grade = if other == d { 2 } else { 1 };
                writeln!(qrels, "q{q:02}\tdoc{other:02}\t{grade}").unwrap();
            }
        }
    }

    let mut clusters = String::new();
    for (t, toks) in &texts {
        clusters.push_str(&format!(
            "{}\n",
            serde_json::json!({ "text": toks.join(" "), "label": format!("topic{t}") })
        ));
    }

    let b = Benchmark {
        dir: dir.to_path_buf(),
        corpus: dir.join("corpus.jsonl"),
        sts: dir.join("sts.tsv"),
        docs: dir.join("docs.jsonl"),
        queries: dir.join("queries.jsonl"),
        qrels: dir.join("qrels.tsv"),
        clusters: dir.join("clusters.jsonl"),
    };
    std::fs::write(&b.corpus, corpus).unwrap();
    std::fs::write(&b.sts, sts).unwrap();
    std::fs::write(&b.docs, docs).unwrap();
    std::fs::write(&b.queries, queries).unwrap();
    std::fs::write(&b.qrels, qrels).unwrap();
    std::fs::write(&b.clusters, clusters).unwrap();
    b
}

/// Distinct tokens shared by two texts.
pub fn overlap(a: &str, b: &str) -> usize {
    let a: BTreeSet<&str> = a.split_whitespace().collect();
    b.split_whitespace()
        .filter(|t| a.contains(t))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Value printed on the table row of an `eval` run.
pub fn table_value(out: &str) -> f64 {
    let row = out.lines().nth(2).expect("table row");
    row.split_whitespace().last().unwrap().parse().unwrap()
}
