use std::path::Path;

use ldir::encoder::{anonymous_records, TextRecord};

use super::{print_echo, read_texts, Source, SOURCE_KEYS};
use crate::config::{config_error, Layered};
use crate::InspectArgs;

const KEYS: &[&str] = &["top", "input"];

/// Indices of the `m` largest scores, highest first, ties to the lower index.
pub fn top_indices(scores: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(m);
    order
}

fn shorten(text: &str, width: usize) -> String {
    let flat = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if flat.chars().count() <= width {
        flat
    } else {
        let mut cut: String = flat.chars().take(width.saturating_sub(3)).collect();
        cut.push_str("...");
        cut
    }
}

pub fn run(args: InspectArgs) -> anyhow::Result<()> {
    let allowed: Vec<&str> = KEYS.iter().chain(SOURCE_KEYS).copied().collect();
    let mut cfg = Layered::load(args.config.as_deref(), &allowed)?;
    let top = cfg.number("top", args.top, 5)?;
    let input = cfg.optional::<String>("input", args.input.map(|p| p.display().to_string()))?;
    let source = Source::resolve(args.source, &mut cfg)?;

    let mut texts: Vec<TextRecord> = match &input {
        Some(path) => read_texts(Path::new(path))?,
        None => Vec::new(),
    };
    texts.extend(anonymous_records(&args.texts).into_iter().map(|mut r| {
        r.id = format!("arg{}", r.id);
        r
    }));
    if texts.is_empty() {
        return Err(config_error(
            "nothing to inspect: give texts as arguments or --input",
        ));
    }
    let rows = source.embed(&texts)?;
    let anchors = source.anchor_texts();
    let m = usize::try_from(top)
        .unwrap_or(usize::MAX)
        .min(anchors.len());
    for (record, row) in texts.iter().zip(&rows) {
        println!("{}  {}", record.id, shorten(&record.text, 60));
        for j in top_indices(row.scores.as_slice(), m) {
            println!(
                "  {:>6}  {:>10.6}  {}",
                j,
                row.scores.as_slice()[j],
                shorten(anchors[j], 60)
            );
        }
    }
    print_echo(&cfg);
    Ok(())
}
