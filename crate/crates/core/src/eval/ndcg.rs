use std::collections::BTreeMap;

fn gain(grade: u32) -> f64 {
    2f64.powi(grade as i32) - 1.0
}

/// nDCG@k with exponential gains `2^rel − 1` and `log2(rank + 1)` discounts.
///
/// Documents missing from `qrels` have grade 0. Returns 0 when the query has
/// no document with a positive grade.
pub fn ndcg_at_k<S: AsRef<str>>(
    ranked_doc_ids: &[S],
    qrels: &BTreeMap<String, u32>,
    k: usize,
) -> f64 {
    let mut ideal: Vec<u32> = qrels.values().copied().filter(|&g| g > 0).collect();
    if ideal.is_empty() || k == 0 {
        return 0.0;
    }
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let discount = |rank: usize| (rank as f64 + 2.0).log2();
    let idcg: f64 = ideal
        .iter()
        .take(k)
        .enumerate()
        .map(|(r, &g)| gain(g) / discount(r))
        .sum();
    let dcg: f64 = ranked_doc_ids
        .iter()
        .take(k)
        .enumerate()
        .map(|(r, id)| gain(qrels.get(id.as_ref()).copied().unwrap_or(0)) / discount(r))
        .sum();
    dcg / idcg
}
