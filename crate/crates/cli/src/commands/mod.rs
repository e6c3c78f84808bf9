pub mod embed;
pub mod eval;
pub mod inspect;
pub mod sample;
pub mod store;

use std::path::{Path, PathBuf};

use anyhow::Context;
use ldir::anchors::{load_anchor_set, AnchorSet};
use ldir::encoder::{open_encoder, Encoder, ProviderSpec, TextRecord};
use ldir::format::has_magic;
use ldir::ldir::{
    embed_corpus_fine_grained, embed_corpus_relative, FineGrainedConfig, Relatedness,
    RelativeEmbedding, Segment,
};
use ldir::Vector;
use serde_json::{json, Value};

use crate::config::{config_error, Layered};
use crate::SourceArgs;

pub const SOURCE_KEYS: &[&str] = &["anchors", "provider", "fine_grained", "metric"];

pub fn parse_provider(raw: &str) -> anyhow::Result<ProviderSpec> {
    raw.parse::<ProviderSpec>()
        .map_err(|e| config_error(format!("--provider {raw:?}: {e}")))
}

fn load_set(path: &Path) -> anyhow::Result<AnchorSet> {
    load_anchor_set(path).with_context(|| format!("loading anchor set {}", path.display()))
}

/// Anchor sets with their encoders, ready to embed.
pub struct Source {
    pub segments: Vec<(AnchorSet, Box<dyn Encoder>)>,
    pub metric: Relatedness,
}

impl Source {
    pub fn resolve(args: SourceArgs, layered: &mut Layered) -> anyhow::Result<Self> {
        let metric: Relatedness = layered.with_default(
            "metric",
            args.metric.map(|m| m.parse()).transpose()?,
            Relatedness::Cosine,
        )?;
        let anchors = layered.optional("anchors", args.anchors.map(|p| p.display().to_string()))?;
        let provider = layered.optional("provider", args.provider)?;
        let fine = layered.list("fine_grained", args.fine_grained)?;
        let mut pairs: Vec<(PathBuf, Option<String>)> = Vec::new();
        match (anchors, fine.is_empty()) {
            (Some(path), true) => pairs.push((PathBuf::from(path), provider)),
            (None, false) => {
                if provider.is_some() {
                    return Err(config_error(
                        "--provider cannot be combined with --fine-grained; give PATH:PROVIDER",
                    ));
                }
                if fine.len() < 2 {
                    return Err(config_error("--fine-grained needs at least 2 anchor sets"));
                }
                for entry in &fine {
                    match entry.split_once(':') {
                        Some((path, spec)) => {
                            pairs.push((PathBuf::from(path), Some(spec.to_owned())))
                        }
                        None => pairs.push((PathBuf::from(entry), None)),
                    }
                }
            }
            (Some(_), false) => {
                return Err(config_error(
                    "use either --anchors or --fine-grained, not both",
                ))
            }
            (None, true) => return Err(config_error("missing required setting --anchors")),
        }
        let mut segments = Vec::with_capacity(pairs.len());
        let mut echo = Vec::new();
        for (path, spec) in pairs {
            let set = load_set(&path)?;
            let spec = match spec {
                Some(raw) => parse_provider(&raw)?,
                None => set.encoder().to_spec(),
            };
            let encoder =
                open_encoder(&spec).with_context(|| format!("opening provider {spec}"))?;
            let p = set.provenance();
            echo.push(json!({
                "path": path.display().to_string(),
                "anchor_set_id": set.id(),
                "n": set.len(),
                "method": p.method.name(),
                "seed": p.seed,
                "bucket": p.bucket.name(),
                "start": p.start.to_string(),
                "normalize": p.normalize,
                "anchor_encoder": p.encoder.to_string(),
                "provider": encoder.descriptor().to_string(),
            }));
            segments.push((set, encoder));
        }
        layered.record("segments", Value::from(echo));
        let source = Source { segments, metric };
        if source.segments.len() > 1 {
            let config = FineGrainedConfig::from_segments(&source.borrowed())?;
            layered.record("dimension", config.total_dim());
        } else {
            layered.record("dimension", source.segments[0].0.len());
        }
        Ok(source)
    }

    fn borrowed(&self) -> Vec<Segment<'_>> {
        self.segments
            .iter()
            .map(|(set, enc)| Segment {
                anchors: set,
                provider: enc.as_ref(),
            })
            .collect()
    }

    pub fn embed(&self, texts: &[TextRecord]) -> ldir::Result<Vec<RelativeEmbedding>> {
        if let [(set, enc)] = self.segments.as_slice() {
            embed_corpus_relative(texts, set, enc.as_ref(), self.metric)
        } else {
            embed_corpus_fine_grained(texts, &self.borrowed(), self.metric)
        }
    }

    pub fn embed_vectors(&self, texts: &[TextRecord]) -> ldir::Result<Vec<Vector>> {
        Ok(self.embed(texts)?.into_iter().map(|e| e.scores).collect())
    }

    /// Anchor texts in output-dimension order.
    pub fn anchor_texts(&self) -> Vec<&str> {
        self.segments
            .iter()
            .flat_map(|(set, _)| set.anchors().iter().map(|a| a.record.text.as_str()))
            .collect()
    }
}

/// Reads texts from a JSON-lines corpus or from the anchors of an anchor-set file.
pub fn read_texts(path: &Path) -> anyhow::Result<Vec<TextRecord>> {
    let head = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if has_magic(&head) {
        Ok(load_set(path)?.records())
    } else {
        ldir::encoder::read_corpus_jsonl(path)
            .with_context(|| format!("reading corpus {}", path.display()))
    }
}

pub fn print_echo(layered: &Layered) {
    println!(
        "config {}",
        serde_json::to_string(layered.echo()).expect("echo serializes")
    );
}
