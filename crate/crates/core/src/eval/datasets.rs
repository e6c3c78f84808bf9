//! Evaluation dataset files.
//!
//! - STS: TSV `text_a \t text_b \t gold`, no header.
//! - Retrieval: docs and queries as JSON lines `{"id", "text"}`, qrels as TSV
//!   `query_id \t doc_id \t grade`. A first qrels line whose grade is not an
//!   integer is read as a header and skipped.
//! - Clustering: JSON lines `{"text", "label"}`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoder::{read_corpus_jsonl, validate_corpus, write_corpus_jsonl, TextRecord};
use crate::error::{LdirError, Result};

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StsPair {
    pub a: String,
    pub b: String,
    pub gold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StsDataset {
    pub name: String,
    pub pairs: Vec<StsPair>,
}

impl StsDataset {
    pub fn new(name: impl Into<String>, pairs: Vec<StsPair>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(LdirError::InvalidDataset(format!(
                "STS set needs at least 2 pairs, got {}",
                pairs.len()
            )));
        }
        if let Some(i) = pairs.iter().position(|p| !p.gold.is_finite()) {
            return Err(LdirError::InvalidDataset(format!(
                "pair {i} has a non-finite gold score"
            )));
        }
        Ok(StsDataset {
            name: name.into(),
            pairs,
        })
    }

    pub fn read_tsv(reader: impl BufRead, name: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let location = format!("{name}:{}", i + 1);
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(LdirError::parse(
                    location,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let gold: f64 = fields[2].trim().parse().map_err(|_| {
                LdirError::parse(
                    &location,
                    format!("gold score {:?} is not a number", fields[2]),
                )
            })?;
            if !gold.is_finite() {
                return Err(LdirError::parse(location, "gold score is not finite"));
            }
            pairs.push(StsPair {
                a: fields[0].to_owned(),
                b: fields[1].to_owned(),
                gold,
            });
        }
        Self::new(name, pairs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut set = Self::read_tsv(open(path)?, &path.display().to_string())?;
        set.name = stem(path);
        Ok(set)
    }

    pub fn to_tsv(&self) -> Result<String> {
        let mut out = String::new();
        for (i, p) in self.pairs.iter().enumerate() {
            if [&p.a, &p.b].iter().any(|t| t.contains(['\t', '\n', '\r'])) {
                return Err(LdirError::InvalidDataset(format!(
                    "pair {i} text contains a tab or newline"
                )));
            }
            out.push_str(&format!("{}\t{}\t{}\n", p.a, p.b, p.gold));
        }
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_tsv()?)?;
        Ok(())
    }
}

/// Query id to (doc id to grade).
pub type Qrels = BTreeMap<String, BTreeMap<String, u32>>;

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalDataset {
    pub name: String,
    pub docs: Vec<TextRecord>,
    pub queries: Vec<TextRecord>,
    pub qrels: Qrels,
}

impl RetrievalDataset {
    pub fn new(
        name: impl Into<String>,
        docs: Vec<TextRecord>,
        queries: Vec<TextRecord>,
        qrels: Qrels,
    ) -> Result<Self> {
        validate_corpus(&docs)?;
        validate_corpus(&queries)?;
        let doc_ids: HashSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
        let query_ids: HashSet<&str> = queries.iter().map(|q| q.id.as_str()).collect();
        for (q, judged) in &qrels {
            if !query_ids.contains(q.as_str()) {
                return Err(LdirError::InvalidDataset(format!(
                    "qrels name unknown query {q:?}"
                )));
            }
            if let Some(d) = judged.keys().find(|d| !doc_ids.contains(d.as_str())) {
                return Err(LdirError::InvalidDataset(format!(
                    "qrels name unknown document {d:?}"
                )));
            }
        }
        Ok(RetrievalDataset {
            name: name.into(),
            docs,
            queries,
            qrels,
        })
    }

    pub fn read_qrels(reader: impl BufRead, source: &str) -> Result<Qrels> {
        let mut qrels = Qrels::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let location = format!("{source}:{}", i + 1);
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(LdirError::parse(
                    location,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let grade = match fields[2].trim().parse::<u32>() {
                Ok(g) => g,
                Err(_) if i == 0 => continue,
                Err(_) => {
                    return Err(LdirError::parse(
                        location,
                        format!("grade {:?} is not a non-negative integer", fields[2]),
                    ))
                }
            };
            let judged = qrels.entry(fields[0].to_owned()).or_default();
            if judged.insert(fields[1].to_owned(), grade).is_some() {
                return Err(LdirError::parse(
                    location,
                    format!("duplicate judgement {}/{}", fields[0], fields[1]),
                ));
            }
        }
        Ok(qrels)
    }

    pub fn load(
        docs: impl AsRef<Path>,
        queries: impl AsRef<Path>,
        qrels: impl AsRef<Path>,
    ) -> Result<Self> {
        let qrels_path = qrels.as_ref();
        let judged = Self::read_qrels(open(qrels_path)?, &qrels_path.display().to_string())?;
        Self::new(
            stem(docs.as_ref()),
            read_corpus_jsonl(docs)?,
            read_corpus_jsonl(queries)?,
            judged,
        )
    }

    pub fn save(
        &self,
        docs: impl AsRef<Path>,
        queries: impl AsRef<Path>,
        qrels: impl AsRef<Path>,
    ) -> Result<()> {
        write_corpus_jsonl(docs, &self.docs)?;
        write_corpus_jsonl(queries, &self.queries)?;
        let mut out = String::new();
        for (q, judged) in &self.qrels {
            for (d, g) in judged {
                out.push_str(&format!("{q}\t{d}\t{g}\n"));
            }
        }
        std::fs::write(qrels, out)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterItem {
    pub text: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringDataset {
    pub name: String,
    pub items: Vec<ClusterItem>,
}

impl ClusteringDataset {
    /// Requires at least two distinct labels.
    pub fn new(name: impl Into<String>, items: Vec<ClusterItem>) -> Result<Self> {
        let labels: BTreeSet<&str> = items.iter().map(|i| i.label.as_str()).collect();
        if labels.len() < 2 {
            return Err(LdirError::InvalidDataset(format!(
                "clustering set needs at least 2 distinct labels, got {}",
                labels.len()
            )));
        }
        Ok(ClusteringDataset {
            name: name.into(),
            items,
        })
    }

    pub fn label_count(&self) -> usize {
        self.items
            .iter()
            .map(|i| i.label.as_str())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn read_jsonl(reader: impl BufRead, name: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let item: ClusterItem = serde_json::from_str(&line)
                .map_err(|e| LdirError::parse(format!("{name}:{}", i + 1), e.to_string()))?;
            items.push(item);
        }
        Self::new(name, items)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut set = Self::read_jsonl(open(path)?, &path.display().to_string())?;
        set.name = stem(path);
        Ok(set)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for item in &self.items {
            out.push_str(&serde_json::to_string(item).expect("items serialize"));
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sts_tsv() {
        let set = StsDataset::read_tsv("a b\tc d\t4.5\nx\ty\t0\n".as_bytes(), "s").unwrap();
        assert_eq!(set.pairs.len(), 2);
        assert_eq!(set.pairs[0].gold, 4.5);
        assert_eq!(
            StsDataset::read_tsv(set.to_tsv().unwrap().as_bytes(), "s").unwrap(),
            set
        );
        assert!(matches!(
            StsDataset::read_tsv("a\tb\n".as_bytes(), "s"),
            Err(LdirError::Parse { location, .. }) if location == "s:1"
        ));
        assert!(StsDataset::read_tsv("a\tb\tx\n".as_bytes(), "s").is_err());
        assert!(StsDataset::read_tsv("a\tb\t1\n".as_bytes(), "s").is_err());
        assert!(StsDataset::read_tsv("a\tb\tNaN\nc\td\t1\n".as_bytes(), "s").is_err());
    }

    #[test]
    fn qrels_header_and_grades() {
        let q = RetrievalDataset::read_qrels(
            "query-id\tcorpus-id\tscore\nq1\td1\t2\nq1\td2\t0\n".as_bytes(),
            "q",
        )
        .unwrap();
        assert_eq!(q["q1"]["d1"], 2);
        assert_eq!(q["q1"].len(), 2);
        assert!(RetrievalDataset::read_qrels("q1\td1\t1\nq1\td2\tx\n".as_bytes(), "q").is_err());
        assert!(RetrievalDataset::read_qrels("q1\td1\t1\nq1\td1\t1\n".as_bytes(), "q").is_err());
    }

    #[test]
    fn retrieval_ids_checked() {
        let docs = vec![TextRecord::new("d1", "x").unwrap()];
        let queries = vec![TextRecord::new("q1", "x").unwrap()];
        let mut qrels = Qrels::new();
        qrels.entry("q1".into()).or_default().insert("d9".into(), 1);
        assert!(RetrievalDataset::new("r", docs.clone(), queries.clone(), qrels).is_err());
        let mut qrels = Qrels::new();
        qrels.entry("q7".into()).or_default().insert("d1".into(), 1);
        assert!(RetrievalDataset::new("r", docs, queries, qrels).is_err());
    }

    #[test]
    fn clustering_needs_two_labels() {
        let one = "{\"text\":\"a\",\"label\":\"x\"}\n{\"text\":\"b\",\"label\":\"x\"}\n";
        assert!(matches!(
            ClusteringDataset::read_jsonl(one.as_bytes(), "c"),
            Err(LdirError::InvalidDataset(_))
        ));
        let two = "{\"text\":\"a\",\"label\":\"x\"}\n{\"text\":\"b\",\"label\":\"y\"}\n";
        assert_eq!(
            ClusteringDataset::read_jsonl(two.as_bytes(), "c")
                .unwrap()
                .label_count(),
            2
        );
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let docs = vec![
            TextRecord::new("d1", "x y").unwrap(),
            TextRecord::new("d2", "z").unwrap(),
        ];
        let queries = vec![TextRecord::new("q1", "x").unwrap()];
        let mut qrels = Qrels::new();
        qrels.entry("q1".into()).or_default().insert("d1".into(), 1);
        let set = RetrievalDataset::new("docs", docs, queries, qrels).unwrap();
        let p = |n: &str| dir.path().join(n);
        set.save(p("docs.jsonl"), p("queries.jsonl"), p("qrels.tsv"))
            .unwrap();
        assert_eq!(
            RetrievalDataset::load(p("docs.jsonl"), p("queries.jsonl"), p("qrels.tsv")).unwrap(),
            set
        );

        let c = ClusteringDataset::new(
            "clusters",
            vec![
                ClusterItem {
                    text: "a".into(),
                    label: "x".into(),
                },
                ClusterItem {
                    text: "b".into(),
                    label: "y".into(),
                },
            ],
        )
        .unwrap();
        c.save(p("clusters.jsonl")).unwrap();
        assert_eq!(ClusteringDataset::load(p("clusters.jsonl")).unwrap(), c);
    }
}
