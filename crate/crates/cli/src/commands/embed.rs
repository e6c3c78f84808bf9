use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use ldir::ldir::{write_binary_dump, write_jsonl_dump};

use super::{print_echo, read_texts, Source, SOURCE_KEYS};
use crate::config::{config_error, Layered};
use crate::EmbedArgs;

const KEYS: &[&str] = &["input", "format", "out"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    Jsonl,
    Binary,
}

impl DumpFormat {
    pub fn parse(raw: &str) -> anyhow::Result<Self> {
        match raw {
            "jsonl" => Ok(DumpFormat::Jsonl),
            "binary" | "bin" => Ok(DumpFormat::Binary),
            other => Err(config_error(format!(
                "unknown format {other:?} (expected jsonl or binary)"
            ))),
        }
    }

    /// `.bin` and `.ldir` mean binary, anything else JSON lines.
    pub fn from_extension(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin" | "ldir") => DumpFormat::Binary,
            _ => DumpFormat::Jsonl,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DumpFormat::Jsonl => "jsonl",
            DumpFormat::Binary => "binary",
        }
    }
}

pub fn run(args: EmbedArgs) -> anyhow::Result<()> {
    let allowed: Vec<&str> = KEYS.iter().chain(SOURCE_KEYS).copied().collect();
    let mut cfg = Layered::load(args.config.as_deref(), &allowed)?;
    let input = cfg.required::<String>("input", args.input.map(|p| p.display().to_string()))?;
    let out = cfg.required::<String>("out", args.out.map(|p| p.display().to_string()))?;
    let format = match cfg.optional::<String>("format", args.format)? {
        Some(raw) => DumpFormat::parse(&raw)?,
        None => DumpFormat::from_extension(Path::new(&out)),
    };
    cfg.record("format", format.name());
    let source = Source::resolve(args.source, &mut cfg)?;

    let texts = read_texts(Path::new(&input))?;
    let rows = source.embed(&texts)?;
    let ids: Vec<String> = texts.iter().map(|t| t.id.clone()).collect();
    let file = File::create(&out).with_context(|| format!("creating {out}"))?;
    let mut writer = BufWriter::new(file);
    match format {
        DumpFormat::Jsonl => write_jsonl_dump(&mut writer, &ids, &rows)?,
        DumpFormat::Binary => write_binary_dump(&mut writer, &ids, &rows)?,
    }
    std::io::Write::flush(&mut writer).with_context(|| format!("writing {out}"))?;
    println!("embedded   {} texts", rows.len());
    println!("dimension  {}", rows.first().map_or(0, |r| r.len()));
    print_echo(&cfg);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_inference() {
        assert_eq!(
            DumpFormat::from_extension(Path::new("x.bin")),
            DumpFormat::Binary
        );
        assert_eq!(
            DumpFormat::from_extension(Path::new("x.ldir")),
            DumpFormat::Binary
        );
        assert_eq!(
            DumpFormat::from_extension(Path::new("x.jsonl")),
            DumpFormat::Jsonl
        );
        assert!(DumpFormat::parse("csv").is_err());
    }
}
