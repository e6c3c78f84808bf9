use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Sts,
    Retrieval,
    Clustering,
    CognitiveLoad,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Sts => "sts",
            Task::Retrieval => "retrieval",
            Task::Clustering => "clustering",
            Task::CognitiveLoad => "cognitive_load",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of one evaluation run. `config` echoes every setting needed to
/// repeat the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub dataset: String,
    pub metric: String,
    pub value: f64,
    pub details: BTreeMap<String, f64>,
    pub config: BTreeMap<String, Value>,
}

impl EvalReport {
    pub fn new(
        task: Task,
        dataset: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
    ) -> Self {
        EvalReport {
            task,
            dataset: dataset.into(),
            metric: metric.into(),
            value,
            details: BTreeMap::new(),
            config: BTreeMap::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_owned(), value);
        self
    }

    pub fn with_config(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.config.insert(key.to_owned(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Fixed-width summary table, one row per report.
pub fn render_table(reports: &[EvalReport]) -> String {
    let mut out = format!(
        "{:<16} {:<28} {:<14} {:>10}\n",
        "task", "dataset", "metric", "value"
    );
    out.push_str(&"-".repeat(71));
    out.push('\n');
    for r in reports {
        let dataset: String = r.dataset.chars().take(28).collect();
        out.push_str(&format!(
            "{:<16} {:<28} {:<14} {:>10.2}\n",
            r.task.name(),
            dataset,
            r.metric,
            r.value
        ));
    }
    out
}
