use anyhow::Context;
use ldir::anchors::{
    build_anchor_set, save_anchor_set, AnchorOptions, FpsStart, LengthBucket, SamplingMethod,
};
use ldir::encoder::{open_encoder, read_corpus_jsonl};

use super::{parse_provider, print_echo};
use crate::config::{config_error, Layered};
use crate::SampleArgs;

const KEYS: &[&str] = &[
    "corpus",
    "provider",
    "method",
    "n",
    "seed",
    "bucket",
    "start",
    "normalize",
    "out",
    "jsonl",
];

fn median(sorted: &[f64]) -> f64 {
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

pub fn run(args: SampleArgs) -> anyhow::Result<()> {
    let mut cfg = Layered::load(args.config.as_deref(), KEYS)?;
    let corpus_path = cfg.required("corpus", args.corpus.map(|p| p.display().to_string()))?;
    let provider = cfg.with_default("provider", args.provider, "hashed".to_string())?;
    let method: SamplingMethod = cfg.with_default(
        "method",
        args.method.map(|m| m.parse()).transpose()?,
        SamplingMethod::Fps,
    )?;
    let n = cfg.number("n", args.n, 500)?;
    let seed = cfg.number("seed", args.seed, 42)?;
    let bucket: LengthBucket = cfg.with_default(
        "bucket",
        args.bucket.map(|b| b.parse()).transpose()?,
        LengthBucket::All,
    )?;
    let start_raw = cfg.with_default("start", args.start, "centroid_farthest".to_string())?;
    let start = match start_raw.as_str() {
        "seeded" => FpsStart::Seeded(seed),
        other => other.parse()?,
    };
    cfg.record("start", start.to_string());
    let normalize = cfg.switch("normalize", args.no_normalize, true)?;
    let out = cfg.required::<String>("out", args.out.map(|p| p.display().to_string()))?;
    let jsonl = cfg.optional::<String>("jsonl", args.jsonl.map(|p| p.display().to_string()))?;

    let spec = parse_provider(&provider)?;
    let encoder = open_encoder(&spec).with_context(|| format!("opening provider {spec}"))?;
    cfg.record("provider", encoder.descriptor().to_string());
    let corpus =
        read_corpus_jsonl(&corpus_path).with_context(|| format!("reading corpus {corpus_path}"))?;
    let n = usize::try_from(n).map_err(|_| config_error("--n is too large"))?;
    if n == 0 {
        return Err(config_error("--n must be at least 1"));
    }
    let options = AnchorOptions {
        method,
        n,
        seed,
        bucket,
        start,
        normalize,
    };
    let set = build_anchor_set(&corpus, encoder.as_ref(), &options)?;
    save_anchor_set(&set, &out).with_context(|| format!("writing {out}"))?;
    if let Some(path) = jsonl {
        std::fs::write(&path, set.to_jsonl()).with_context(|| format!("writing {path}"))?;
    }

    let mut distances = set.pairwise_distances()?;
    distances.sort_by(f64::total_cmp);
    println!("anchors    {}", set.len());
    println!("method     {method}");
    println!("bucket     {bucket}");
    println!("set id     {}", set.id());
    if distances.is_empty() {
        println!("distance   n/a (single anchor)");
    } else {
        println!("min dist   {:.6}", distances[0]);
        println!("median     {:.6}", median(&distances));
    }
    cfg.record("anchor_set_id", set.id());
    print_echo(&cfg);
    Ok(())
}
