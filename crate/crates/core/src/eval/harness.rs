//! Task harnesses. Each takes an embedding function mapping a batch of texts
//! to one vector per text, in order; scores are reported ×100.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::encoder::{anonymous_records, TextRecord};
use crate::error::{LdirError, Result};
use crate::ldir::{cognitive_load_pairs, dense_cognitive_load};
use crate::vector::{cosine_similarity, Vector};

use super::datasets::{ClusteringDataset, RetrievalDataset, StsDataset};
use super::kmeans::kmeans;
use super::ndcg::ndcg_at_k;
use super::report::{EvalReport, Task};
use super::spearman::spearman;
use super::vmeasure::homogeneity_completeness_v_measure;

fn embed_checked<F>(embed: &F, texts: &[TextRecord]) -> Result<Vec<Vector>>
where
    F: Fn(&[TextRecord]) -> Result<Vec<Vector>>,
{
    let out = embed(texts)?;
    if out.len() != texts.len() {
        return Err(LdirError::LengthMismatch {
            left: texts.len(),
            right: out.len(),
        });
    }
    Ok(out)
}

fn embed_pairs<F>(dataset: &StsDataset, embed: &F) -> Result<Vec<(Vector, Vector)>>
where
    F: Fn(&[TextRecord]) -> Result<Vec<Vector>>,
{
    let texts: Vec<&str> = dataset
        .pairs
        .iter()
        .flat_map(|p| [p.a.as_str(), p.b.as_str()])
        .collect();
    let mut rows = embed_checked(embed, &anonymous_records(&texts))?.into_iter();
    Ok((0..dataset.pairs.len())
        .map(|_| {
            (
                rows.next().expect("two rows per pair"),
                rows.next().expect("two rows per pair"),
            )
        })
        .collect())
}

/// Spearman correlation between pair cosines and gold scores.
pub fn eval_sts<F>(dataset: &StsDataset, embed: F) -> Result<EvalReport>
where
    F: Fn(&[TextRecord]) -> Result<Vec<Vector>>,
{
    let pairs = embed_pairs(dataset, &embed)?;
    let predicted = pairs
        .iter()
        .map(|(a, b)| cosine_similarity(a, b))
        .collect::<Result<Vec<_>>>()?;
    let gold: Vec<f64> = dataset.pairs.iter().map(|p| p.gold).collect();
    let rho = spearman(&predicted, &gold)?;
    Ok(
        EvalReport::new(Task::Sts, &dataset.name, "spearman", rho * 100.0)
            .detail("pairs", pairs.len() as f64),
    )
}

/// Ranks every document by cosine to each query, ties broken by document id.
pub fn rank_documents(query: &Vector, docs: &[Vector], doc_ids: &[String]) -> Result<Vec<usize>> {
    let scores = docs
        .iter()
        .map(|d| cosine_similarity(query, d))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| doc_ids[a].cmp(&doc_ids[b]))
    });
    Ok(order)
}

/// Mean nDCG@`k` over the queries that have judgements.
pub fn eval_retrieval<F>(dataset: &RetrievalDataset, embed: F, k: usize) -> Result<EvalReport>
where
    F: Fn(&[TextRecord]) -> Result<Vec<Vector>>,
{
    if k == 0 {
        return Err(LdirError::InvalidParameter(
            "nDCG cutoff k must be positive".into(),
        ));
    }
    let judged: Vec<usize> = dataset
        .queries
        .iter()
        .enumerate()
        .filter(|(_, q)| dataset.qrels.get(&q.id).is_some_and(|j| !j.is_empty()))
        .map(|(i, _)| i)
        .collect();
    if judged.is_empty() {
        return Err(LdirError::EmptyQrels);
    }
    let docs = embed_checked(&embed, &dataset.docs)?;
    let queries: Vec<TextRecord> = judged.iter().map(|&i| dataset.queries[i].clone()).collect();
    let query_vectors = embed_checked(&embed, &queries)?;
    let doc_ids: Vec<String> = dataset.docs.iter().map(|d| d.id.clone()).collect();
    let per_query = queries
        .par_iter()
        .zip(query_vectors.par_iter())
        .map(|(q, v)| {
            let order = rank_documents(v, &docs, &doc_ids)?;
            let ranked: Vec<&str> = order.iter().take(k).map(|&i| doc_ids[i].as_str()).collect();
            Ok(ndcg_at_k(&ranked, &dataset.qrels[&q.id], k))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = per_query.iter().sum::<f64>() / per_query.len() as f64;
    Ok(EvalReport::new(
        Task::Retrieval,
        &dataset.name,
        format!("ndcg@{k}"),
        mean * 100.0,
    )
    .detail("queries", per_query.len() as f64)
    .detail("docs", docs.len() as f64))
}

/// k-means with one cluster per gold label, scored by V-measure.
pub fn eval_clustering<F>(dataset: &ClusteringDataset, embed: F, seed: u64) -> Result<EvalReport>
where
    F: Fn(&[TextRecord]) -> Result<Vec<Vector>>,
{
    let k = dataset
        .items
        .iter()
        .map(|i| i.label.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    if k < 2 {
        return Err(LdirError::InvalidDataset(
            "clustering set needs at least 2 distinct labels".into(),
        ));
    }
    let texts: Vec<&str> = dataset.items.iter().map(|i| i.text.as_str()).collect();
    let vectors = embed_checked(&embed, &anonymous_records(&texts))?;
    let labels = kmeans(&vectors, k, seed)?;
    let gold: Vec<&str> = dataset.items.iter().map(|i| i.label.as_str()).collect();
    let v = homogeneity_completeness_v_measure(&gold, &labels)?;
    Ok(EvalReport::new(
        Task::Clustering,
        &dataset.name,
        "v_measure",
        v.v_measure * 100.0,
    )
    .detail("homogeneity", v.homogeneity * 100.0)
    .detail("completeness", v.completeness * 100.0)
    .detail("k", k as f64))
}

/// Mean top-`k` overlap between the two sides of each STS pair.
pub fn eval_cognitive_load<F>(dataset: &StsDataset, embed: F, k: usize) -> Result<EvalReport>
where
    F: Fn(&[TextRecord]) -> Result<Vec<Vector>>,
{
    let pairs = embed_pairs(dataset, &embed)?;
    let load = cognitive_load_pairs(&pairs, k)?;
    Ok(EvalReport::new(
        Task::CognitiveLoad,
        &dataset.name,
        format!("load@{k}"),
        load.mean,
    )
    .detail("rounded", load.rounded as f64)
    .detail("pairs", load.pairs as f64)
    .detail("dense_advisory", dense_cognitive_load(&pairs)?))
}
