mod common;

use std::path::Path;

use common::{ldir, stderr, stdout, write_benchmark};
use ldir::anchors::load_anchor_set;
use ldir::ldir::{read_binary_dump, read_jsonl_dump};

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn sample(corpus: &Path, out: &Path, extra: &[&str]) -> std::process::Output {
    let mut args = vec!["sample-anchors", "--corpus", p(corpus), "--out", p(out)];
    args.extend_from_slice(extra);
    ldir(&args)
}

fn write_corpus(path: &Path, n: usize) {
    let mut body = String::new();
    for i in 0..n {
        let text = format!("word{} word{} word{} common", i, i * 7 % 31, i * 13 % 17);
        body.push_str(&format!(
            "{}\n",
            serde_json::json!({ "id": format!("t{i}"), "text": text })
        ));
    }
    std::fs::write(path, body).unwrap();
}

#[test]
fn sample_anchors_writes_requested_count_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 300);
    let out = dir.path().join("a.ldir");
    let run = sample(
        &corpus,
        &out,
        &[
            "--provider",
            "hashed:dim=128,seed=7",
            "--method",
            "fps",
            "--n",
            "200",
        ],
    );
    assert!(run.status.success(), "{}", stderr(&run));
    let set = load_anchor_set(&out).unwrap();
    assert_eq!(set.len(), 200);
    assert_eq!(set.provenance().seed, 42);
    let text = stdout(&run);
    for needle in [
        "anchors    200",
        "method     fps",
        "bucket     all",
        "min dist",
        "median",
        "config {",
    ] {
        assert!(text.contains(needle), "{needle} missing in {text}");
    }
}

#[test]
fn sample_anchors_rejects_oversized_n() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 150);
    let run = sample(&corpus, &dir.path().join("a.ldir"), &["--n", "200"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(
        stderr(&run).contains("corpus too small"),
        "{}",
        stderr(&run)
    );
}

#[test]
fn sample_anchors_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 120);
    let a = dir.path().join("a.ldir");
    let b = dir.path().join("b.ldir");
    for (out, method) in [(&a, "kmeans"), (&b, "kmeans")] {
        assert!(sample(&corpus, out, &["--n", "20", "--method", method])
            .status
            .success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 30);
    let out = dir.path().join("a.ldir");
    assert_eq!(
        sample(&corpus, &out, &["--n", "5", "--method", "spiral"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sample(&corpus, &out, &["--n", "5", "--provider", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ldir(&["sample-anchors", "--n", "5"]).status.code(), Some(2));
    assert_eq!(
        sample(&dir.path().join("missing.jsonl"), &out, &["--n", "5"])
            .status
            .code(),
        Some(4)
    );
    let unreachable = sample(
        &corpus,
        &out,
        &[
            "--n",
            "5",
            "--provider",
            "http:endpoint=http://127.0.0.1:9,dim=8,timeout_ms=200,retry_backoff_ms=1",
        ],
    );
    assert_eq!(
        unreachable.status.code(),
        Some(3),
        "{}",
        stderr(&unreachable)
    );
    std::fs::write(dir.path().join("junk.ldir"), b"LDIR\x01garbage").unwrap();
    let bad = ldir(&[
        "embed",
        "--anchors",
        p(&dir.path().join("junk.ldir")),
        "--input",
        p(&corpus),
        "--out",
        p(&dir.path().join("e.jsonl")),
    ]);
    assert_eq!(bad.status.code(), Some(4), "{}", stderr(&bad));
    assert_eq!(ldir(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn embedding_the_anchor_file_gives_unit_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 200);
    let anchors = dir.path().join("a.ldir");
    assert!(sample(
        &corpus,
        &anchors,
        &["--n", "60", "--provider", "hashed:dim=128,seed=7"]
    )
    .status
    .success());
    let out = dir.path().join("e.jsonl");
    let run = ldir(&[
        "embed",
        "--anchors",
        p(&anchors),
        "--input",
        p(&anchors),
        "--out",
        p(&out),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows = read_jsonl_dump(
        std::io::BufReader::new(std::fs::File::open(&out).unwrap()),
        "e",
    )
    .unwrap();
    assert_eq!(rows.len(), 60);
    for (j, row) in rows.iter().enumerate() {
        assert_eq!(row.scores.len(), 60);
        assert!(
            (row.scores[j] - 1.0).abs() <= 1e-9,
            "row {j}: {}",
            row.scores[j]
        );
    }
}

#[test]
fn fine_grained_concatenates_widths_and_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 450);
    let a1 = dir.path().join("a1.bin");
    let a2 = dir.path().join("a2.bin");
    assert!(sample(
        &corpus,
        &a1,
        &["--n", "200", "--provider", "hashed:dim=64,seed=1"]
    )
    .status
    .success());
    assert!(sample(
        &corpus,
        &a2,
        &[
            "--n",
            "200",
            "--provider",
            "hashed:dim=96,seed=2",
            "--method",
            "uniform"
        ]
    )
    .status
    .success());
    let out = dir.path().join("e.bin");
    let s1 = format!("{}:hashed:dim=64,seed=1", p(&a1));
    let s2 = format!("{}:hashed:dim=96,seed=2", p(&a2));
    let run = ldir(&[
        "embed",
        "--fine-grained",
        &s1,
        &s2,
        "--input",
        p(&corpus),
        "--out",
        p(&out),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let rows = read_binary_dump(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 450);
    assert!(rows.iter().all(|r| r.scores.len() == 400));

    let swapped = format!("{}:hashed:dim=64,seed=1", p(&a2));
    let run = ldir(&[
        "embed",
        "--fine-grained",
        &s1,
        &swapped,
        "--input",
        p(&corpus),
        "--out",
        p(&out),
    ]);
    assert_eq!(run.status.code(), Some(2));
    let run = ldir(&[
        "embed",
        "--anchors",
        p(&a1),
        "--provider",
        "hashed:dim=64,seed=9",
        "--input",
        p(&corpus),
        "--out",
        p(&out),
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(
        stderr(&run).contains("encoder mismatch"),
        "{}",
        stderr(&run)
    );
}

#[test]
fn inspect_lists_top_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 100);
    let anchors = dir.path().join("a.ldir");
    assert!(sample(&corpus, &anchors, &["--n", "10"]).status.success());
    let set = load_anchor_set(&anchors).unwrap();
    let third = set.anchors()[3].record.text.clone();
    let run = ldir(&[
        "inspect",
        "--anchors",
        p(&anchors),
        "--top",
        "2",
        &third,
        "unrelated words entirely",
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with("config ")).collect();
    assert_eq!(lines.len(), 6, "{text}");
    let first: Vec<&str> = lines[1].split_whitespace().collect();
    assert_eq!(first[0], "3");
    assert!((first[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
    let default = ldir(&["inspect", "--anchors", p(&anchors), &third]);
    assert_eq!(
        stdout(&default)
            .lines()
            .filter(|l| l.starts_with("  "))
            .count(),
        5
    );
}

#[test]
fn inspect_ranks_overlapping_anchor_first() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        "{\"id\":\"a\",\"text\":\"river bank water flow\"}\n{\"id\":\"b\",\"text\":\"violin concert music hall\"}\n",
    )
    .unwrap();
    let anchors = dir.path().join("a.ldir");
    assert!(sample(&corpus, &anchors, &["--n", "2"]).status.success());
    let run = ldir(&[
        "inspect",
        "--anchors",
        p(&anchors),
        "--top",
        "1",
        "water flow downstream",
    ]);
    assert!(
        stdout(&run)
            .lines()
            .nth(1)
            .unwrap()
            .contains("river bank water flow"),
        "{}",
        stdout(&run)
    );
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    write_corpus(&corpus, 80);
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "corpus = {:?}\nn = 30\nmethod = \"uniform\"\nseed = 5\n",
            p(&corpus)
        ),
    )
    .unwrap();
    let out = dir.path().join("a.ldir");
    let run = ldir(&[
        "sample-anchors",
        "--config",
        p(&cfg),
        "--n",
        "12",
        "--out",
        p(&out),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let set = load_anchor_set(&out).unwrap();
    assert_eq!(set.len(), 12);
    assert_eq!(set.provenance().seed, 5);
    let echo_line = stdout(&run)
        .lines()
        .find(|l| l.starts_with("config "))
        .unwrap()
        .to_owned();
    let echo: serde_json::Value = serde_json::from_str(&echo_line["config ".len()..]).unwrap();
    assert_eq!(echo["n"], 12);
    assert_eq!(echo["method"], "uniform");
    assert_eq!(echo["seed"], 5);

    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(
        ldir(&["sample-anchors", "--config", p(&cfg)]).status.code(),
        Some(2)
    );
}

#[test]
fn eval_reports_carry_config_and_hit_synthetic_targets() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_benchmark(dir.path(), 11);
    let anchors = dir.path().join("a.ldir");
    assert!(sample(&b.corpus, &anchors, &["--n", "60"]).status.success());
    let report = dir.path().join("r.json");
    let run = ldir(&[
        "eval",
        "--task",
        "sts",
        "--anchors",
        p(&anchors),
        "--data",
        p(&b.sts),
        "--report",
        p(&report),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["task"], "sts");
    assert_eq!(json["config"]["metric"], "cosine");
    assert_eq!(json["config"]["task"], "sts");
    assert_eq!(json["config"]["segments"][0]["n"], 60);

    let ident = dir.path().join("ident.tsv");
    let mut body = String::new();
    for i in 0..6 {
        body.push_str(&format!(
            "orchard{i} harbor{i}\torchard{i} harbor{i}\t{i}\n"
        ));
    }
    std::fs::write(&ident, body).unwrap();
    let run = ldir(&[
        "eval",
        "--task",
        "cognitive-load",
        "--k",
        "25",
        "--anchors",
        p(&anchors),
        "--data",
        p(&ident),
    ]);
    assert!(run.status.success(), "{}", stderr(&run));
    assert_eq!(common::table_value(&stdout(&run)), 25.0);
    let run = ldir(&[
        "eval",
        "--task",
        "retrieval",
        "--anchors",
        p(&anchors),
        "--docs",
        p(&b.docs),
    ]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn store_converts_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("s.jsonl");
    std::fs::write(&jsonl, "{\"id\":\"a\",\"text\":\"x\",\"vector\":[0.5,1.0]}\n{\"id\":\"b\",\"text\":\"y\",\"vector\":[-2.0,0.25]}\n").unwrap();
    let bin = dir.path().join("s.bin");
    let back = dir.path().join("back.jsonl");
    let bin2 = dir.path().join("s2.bin");
    assert!(ldir(&["store", "--input", p(&jsonl), "--out", p(&bin)])
        .status
        .success());
    assert!(ldir(&["store", "--input", p(&bin), "--out", p(&back)])
        .status
        .success());
    assert!(ldir(&[
        "store",
        "--input",
        p(&back),
        "--out",
        p(&bin2),
        "--to",
        "binary"
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&bin).unwrap(), std::fs::read(&bin2).unwrap());
    let truncated = dir.path().join("t.bin");
    let bytes = std::fs::read(&bin).unwrap();
    std::fs::write(&truncated, &bytes[..bytes.len() - 3]).unwrap();
    assert_eq!(
        ldir(&["store", "--input", p(&truncated), "--out", p(&back)])
            .status
            .code(),
        Some(4)
    );
}
