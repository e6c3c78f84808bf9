use anyhow::Context;
use ldir::encoder::VectorStore;

use super::embed::DumpFormat;
use crate::StoreArgs;

pub fn run(args: StoreArgs) -> anyhow::Result<()> {
    let target = match args.to.as_deref() {
        Some(raw) => DumpFormat::parse(raw)?,
        None => DumpFormat::from_extension(&args.out),
    };
    let store = VectorStore::load(&args.input)
        .with_context(|| format!("loading {}", args.input.display()))?;
    match target {
        DumpFormat::Jsonl => store.save_jsonl(&args.out),
        DumpFormat::Binary => store.save_binary(&args.out),
    }
    .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "converted  {} records of dimension {} to {}",
        store.len(),
        store.dim(),
        target.name()
    );
    println!("wrote      {}", args.out.display());
    let echo = serde_json::json!({
        "input": args.input.display().to_string(),
        "out": args.out.display().to_string(),
        "to": target.name(),
    });
    println!("config {echo}");
    Ok(())
}
