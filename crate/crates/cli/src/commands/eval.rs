use anyhow::Context;
use ldir::eval::{
    eval_clustering, eval_cognitive_load, eval_retrieval, eval_sts, render_table,
    ClusteringDataset, RetrievalDataset, StsDataset, Task,
};

use super::{Source, SOURCE_KEYS};
use crate::config::{config_error, Layered};
use crate::EvalArgs;

const KEYS: &[&str] = &[
    "task", "data", "docs", "queries", "qrels", "seed", "k", "cutoff", "report",
];

pub fn parse_task(raw: &str) -> anyhow::Result<Task> {
    match raw {
        "sts" => Ok(Task::Sts),
        "retrieval" => Ok(Task::Retrieval),
        "clustering" => Ok(Task::Clustering),
        "cognitive-load" | "cognitive_load" => Ok(Task::CognitiveLoad),
        other => Err(config_error(format!(
            "unknown task {other:?} (expected sts, retrieval, clustering or cognitive-load)"
        ))),
    }
}

fn to_usize(key: &str, value: u64) -> anyhow::Result<usize> {
    usize::try_from(value).map_err(|_| config_error(format!("--{key} is too large")))
}

pub fn run(args: EvalArgs) -> anyhow::Result<()> {
    let allowed: Vec<&str> = KEYS.iter().chain(SOURCE_KEYS).copied().collect();
    let mut cfg = Layered::load(args.config.as_deref(), &allowed)?;
    let task = parse_task(&cfg.required::<String>("task", args.task)?)?;
    cfg.record("task", task.name());
    let path = |p: Option<std::path::PathBuf>| p.map(|p| p.display().to_string());
    let mut report = match task {
        Task::Sts | Task::Clustering | Task::CognitiveLoad => {
            let data = cfg.required::<String>("data", path(args.data))?;
            let source = Source::resolve(args.source, &mut cfg)?;
            let embed = |texts: &[_]| source.embed_vectors(texts);
            match task {
                Task::Sts => {
                    let dataset =
                        StsDataset::load(&data).with_context(|| format!("loading {data}"))?;
                    eval_sts(&dataset, embed)?
                }
                Task::CognitiveLoad => {
                    let k = to_usize("k", cfg.number("k", args.k, 25)?)?;
                    let dataset =
                        StsDataset::load(&data).with_context(|| format!("loading {data}"))?;
                    eval_cognitive_load(&dataset, embed, k)?
                }
                _ => {
                    let seed = cfg.number("seed", args.seed, 42)?;
                    let dataset = ClusteringDataset::load(&data)
                        .with_context(|| format!("loading {data}"))?;
                    eval_clustering(&dataset, embed, seed)?
                }
            }
        }
        Task::Retrieval => {
            let docs = cfg.required::<String>("docs", path(args.docs))?;
            let queries = cfg.required::<String>("queries", path(args.queries))?;
            let qrels = cfg.required::<String>("qrels", path(args.qrels))?;
            let cutoff = to_usize("cutoff", cfg.number("cutoff", args.cutoff, 10)?)?;
            if cutoff == 0 {
                return Err(config_error("--cutoff must be at least 1"));
            }
            let source = Source::resolve(args.source, &mut cfg)?;
            let dataset = RetrievalDataset::load(&docs, &queries, &qrels)
                .context("loading retrieval dataset")?;
            eval_retrieval(&dataset, |texts: &[_]| source.embed_vectors(texts), cutoff)?
        }
    };
    let report_path = cfg.optional::<String>("report", path(args.report))?;
    report.config.extend(cfg.echo().clone());
    print!("{}", render_table(std::slice::from_ref(&report)));
    for (key, value) in &report.details {
        println!("  {key:<16} {value}");
    }
    if let Some(out) = report_path {
        let mut body = report.to_json();
        body.push('\n');
        std::fs::write(&out, body).with_context(|| format!("writing {out}"))?;
    }
    println!(
        "config {}",
        serde_json::to_string(&report.config).expect("echo serializes")
    );
    Ok(())
}
