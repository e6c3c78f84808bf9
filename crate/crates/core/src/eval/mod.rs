//! Metrics, datasets and task harnesses for STS, retrieval and clustering.

mod datasets;
mod harness;
pub mod kmeans;
mod ndcg;
mod report;
mod spearman;
mod vmeasure;

pub use datasets::{ClusterItem, ClusteringDataset, Qrels, RetrievalDataset, StsDataset, StsPair};
pub use harness::{eval_clustering, eval_cognitive_load, eval_retrieval, eval_sts, rank_documents};
pub use kmeans::{kmeans, kmeans_fit, KMeansConfig, KMeansFit};
pub use ndcg::ndcg_at_k;
pub use report::{render_table, EvalReport, Task};
pub use spearman::{average_ranks, pearson, spearman};
pub use vmeasure::{homogeneity_completeness_v_measure, v_measure, VMeasure};
