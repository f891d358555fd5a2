use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::PreferenceExample;
use crate::gtr::GtrId;
use crate::tasks::TaskKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskPreference {
    pub task: TaskKind,
    pub examples: usize,
    /// Every GTR with the percentage of label sets containing it, most
    /// frequent first, ties in pool order.
    pub ranking: Vec<(GtrId, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceReport {
    pub tasks: Vec<TaskPreference>,
}

/// Label frequencies per task. Tasks without examples are omitted.
pub fn preference_report(dataset: &[PreferenceExample]) -> PreferenceReport {
    let mut counts: BTreeMap<TaskKind, (usize, [usize; 8])> = BTreeMap::new();
    for ex in dataset {
        let entry = counts.entry(ex.task).or_default();
        entry.0 += 1;
        for g in &ex.labels {
            entry.1[g.index()] += 1;
        }
    }
    let tasks = counts
        .into_iter()
        .map(|(task, (n, hits))| {
            let mut ranking: Vec<(GtrId, f64)> =
                GtrId::POOL.iter().map(|&g| (g, 100.0 * hits[g.index()] as f64 / n as f64)).collect();
            ranking.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            TaskPreference { task, examples: n, ranking }
        })
        .collect();
    PreferenceReport { tasks }
}

impl PreferenceReport {
    pub fn task(&self, task: TaskKind) -> Option<&TaskPreference> {
        self.tasks.iter().find(|t| t.task == task)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("task\trank\tgtr\tfrequency\n");
        for t in &self.tasks {
            for (rank, (g, f)) in t.ranking.iter().enumerate() {
                let _ = writeln!(out, "{}\t{}\t{g}\t{f:.1}", t.task, rank + 1);
            }
        }
        out
    }

    /// One column per task, one row per rank, cells like `Vfdp (92.3%)`.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Rank |");
        for t in &self.tasks {
            let _ = write!(out, " {} (n={}) |", t.task, t.examples);
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.tasks.len()));
        out.push('\n');
        for rank in 0..GtrId::POOL.len() {
            let _ = write!(out, "| {} |", rank + 1);
            for t in &self.tasks {
                let (g, f) = t.ranking[rank];
                let _ = write!(out, " {g} ({f:.1}%) |");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(task: TaskKind, labels: &[GtrId]) -> PreferenceExample {
        PreferenceExample {
            id: String::new(),
            task,
            features: vec![],
            labels: labels.to_vec(),
            gre: BTreeMap::new(),
        }
    }

    #[test]
    fn single_label_task_is_full_frequency() {
        let data: Vec<_> = (0..4).map(|_| example(TaskKind::Conn, &[GtrId::Vfdp])).collect();
        let report = preference_report(&data);
        assert_eq!(report.tasks.len(), 1);
        assert_eq!(report.task(TaskKind::Conn).unwrap().ranking[0], (GtrId::Vfdp, 100.0));
        assert!(report.task(TaskKind::Cyc).is_none());
    }

    #[test]
    fn multi_labels_count_for_each_member() {
        let data = vec![
            example(TaskKind::SP, &[GtrId::Tset, GtrId::Tlist]),
            example(TaskKind::SP, &[GtrId::Tlist]),
        ];
        let report = preference_report(&data);
        let sp = report.task(TaskKind::SP).unwrap();
        assert_eq!(sp.ranking[0], (GtrId::Tlist, 100.0));
        assert_eq!(sp.ranking[1], (GtrId::Tset, 50.0));
        // zero-frequency members follow in pool order
        assert_eq!(sp.ranking[2].0, GtrId::Vdot);
        assert!(report.to_tsv().contains("SP\t1\tTlist\t100.0"));
        assert!(report.to_markdown().contains("| 2 | Tset (50.0%) |"));
    }
}
