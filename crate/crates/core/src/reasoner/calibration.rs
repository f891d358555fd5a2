//! Mock calibration from published per-task preference frequencies.
//!
//! Each question draws one latent `u ∈ [0, 1)` and GTR `r` is favored when
//! `u` falls in its circular band of width `f_r`. Bands are nested: ranked by
//! frequency, every band starts at 0, so a more frequent GTR is favored on a
//! superset of the questions of a less frequent one. The tail `[f_max, 1)`
//! that no nested band reaches is covered by moving the smallest bands that
//! fit there. Every GTR is favored with probability exactly `f_r`, every
//! question has a favorite, and the observed ranking of the top GTRs does
//! not depend on sampling noise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::gtr::GtrId;
use crate::rng::derive_seed;
use crate::tasks::TaskKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Per task, the fraction of questions in which each GTR is favored.
    pub frequencies: BTreeMap<TaskKind, BTreeMap<GtrId, f64>>,
    /// Token count of every favored answer.
    pub favored_tokens: u32,
    /// Token count of the other (also correct, but wordier) answers.
    pub other_tokens: u32,
}

impl Calibration {
    pub fn new(frequencies: BTreeMap<TaskKind, BTreeMap<GtrId, f64>>) -> Self {
        Calibration { frequencies, favored_tokens: 100, other_tokens: 400 }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (task, row) in &self.frequencies {
            for (gtr, &f) in row {
                if !(0.0..=1.0).contains(&f) {
                    return Err(format!("frequency of {gtr} for {task} is {f}, outside [0, 1]"));
                }
            }
        }
        if self.favored_tokens == 0 || self.favored_tokens >= self.other_tokens {
            return Err("favored_tokens must be in [1, other_tokens)".into());
        }
        Ok(())
    }

    /// The favored GTRs for a question, or `None` if `task` is not
    /// calibrated. Rows whose frequencies sum below 1 are scaled up so that
    /// every question favors at least one GTR.
    pub fn favored(&self, seed: u64, question_id: &str, task: TaskKind) -> Option<Vec<GtrId>> {
        let bands = self.bands(task)?;
        let u = (derive_seed(seed, &format!("calibration/{question_id}")) >> 11) as f64 / (1u64 << 53) as f64;
        Some(
            GtrId::POOL
                .into_iter()
                .filter(|g| bands.get(g).is_some_and(|&(start, f)| (u - start).rem_euclid(1.0) < f))
                .collect(),
        )
    }

    /// `(start, width)` of each GTR's band for `task`.
    fn bands(&self, task: TaskKind) -> Option<BTreeMap<GtrId, (f64, f64)>> {
        let row = self.frequencies.get(&task)?;
        let total: f64 = row.values().sum();
        if total <= 0.0 {
            return None;
        }
        let scale = if total < 1.0 { 1.0 / total } else { 1.0 };
        let mut ranked: Vec<(GtrId, f64)> =
            GtrId::POOL.iter().map(|&g| (g, (row.get(&g).copied().unwrap_or(0.0) * scale).min(1.0))).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut bands: BTreeMap<GtrId, (f64, f64)> = ranked.iter().map(|&(g, f)| (g, (0.0, f))).collect();
        // Cover [top, 1) from the right, preferring one band that spans the
        // whole remainder, otherwise the widest band that does not.
        let top = ranked[0].1;
        let mut end = 1.0;
        let mut spare: Vec<(GtrId, f64)> = ranked[1..].iter().copied().filter(|&(_, f)| f > 0.0).collect();
        while end - top > 1e-12 && !spare.is_empty() {
            let gap = end - top;
            let pick = spare.iter().rposition(|&(_, f)| f >= gap).unwrap_or(0);
            let (g, f) = spare.remove(pick);
            bands.insert(g, ((end - f).rem_euclid(1.0), f));
            end -= f;
        }
        Some(bands)
    }
}

/// Published preference tables that can seed a calibrated mock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceTable {
    Gpt4o,
    Gemini25Pro,
}

const TASK_COLUMNS: [TaskKind; 7] =
    [TaskKind::Conn, TaskKind::Cyc, TaskKind::TS, TaskKind::SP, TaskKind::MF, TaskKind::BGM, TaskKind::HP];

use GtrId::*;

// Rows are per task in column order; entries are (GTR, percent) by rank.
const GPT4O: [[(GtrId, f64); 8]; 7] = [
    [(Vfdp, 92.3), (Vneato, 92.1), (Vsfdp, 91.7), (Vcirco, 84.4), (Vdot, 73.0), (Tlist, 27.0), (Tmat, 58.0), (Tset, 47.7)],
    // The source lists Vfdp twice for this task and omits Vneato; the
    // second Vfdp entry is read as Vneato.
    [(Vsfdp, 85.1), (Vfdp, 12.9), (Vdot, 12.2), (Vcirco, 10.5), (Vneato, 61.1), (Tlist, 10.8), (Tmat, 0.2), (Tset, 0.0)],
    [(Tset, 58.5), (Tlist, 36.2), (Vdot, 23.1), (Tmat, 0.8), (Vsfdp, 0.8), (Vneato, 0.8), (Vcirco, 0.8), (Vfdp, 0.8)],
    [(Tset, 19.5), (Vneato, 18.7), (Tlist, 17.1), (Vfdp, 16.3), (Vcirco, 13.8), (Vsfdp, 12.2), (Vdot, 10.6), (Tmat, 6.5)],
    [(Tlist, 21.7), (Tset, 20.8), (Tmat, 16.7), (Vneato, 10.8), (Vfdp, 8.3), (Vdot, 7.5), (Vcirco, 7.5), (Vsfdp, 6.7)],
    [(Vdot, 34.2), (Vcirco, 20.3), (Vneato, 19.8), (Vsfdp, 13.4), (Vfdp, 9.1), (Tlist, 7.0), (Tset, 1.6), (Tmat, 0.5)],
    [(Tlist, 30.4), (Tset, 20.3), (Vcirco, 18.8), (Vdot, 17.4), (Vsfdp, 15.9), (Vneato, 14.5), (Tmat, 7.2), (Vfdp, 0.0)],
];

const GEMINI_25_PRO: [[(GtrId, f64); 8]; 7] = [
    [(Vneato, 88.8), (Vfdp, 88.2), (Vsfdp, 88.2), (Vcirco, 87.0), (Vdot, 83.4), (Tlist, 61.3), (Tmat, 8.5), (Tset, 5.1)],
    // Vneato appears twice and Vfdp is missing; the second entry is Vfdp.
    [(Vneato, 97.2), (Vsfdp, 93.0), (Vdot, 71.8), (Vcirco, 71.1), (Vfdp, 8.3), (Tlist, 0.5), (Tmat, 5.2), (Tset, 2.1)],
    // Vfdp appears twice and Vcirco is missing; the last entry is Vcirco.
    [(Tset, 41.0), (Tlist, 30.3), (Tmat, 15.4), (Vdot, 6.9), (Vfdp, 4.3), (Vneato, 2.1), (Vsfdp, 0.0), (Vcirco, 0.8)],
    [(Tlist, 48.6), (Tmat, 37.6), (Tset, 26.6), (Vsfdp, 13.8), (Vdot, 11.0), (Vfdp, 8.3), (Vcirco, 4.6), (Vneato, 2.8)],
    [(Tmat, 40.0), (Tlist, 36.0), (Tset, 14.0), (Vsfdp, 6.0), (Vneato, 2.0), (Vcirco, 2.0), (Vdot, 0.0), (Vfdp, 0.0)],
    [(Vfdp, 24.4), (Vsfdp, 14.5), (Vneato, 14.5), (Vdot, 13.7), (Tmat, 12.2), (Vcirco, 9.2), (Tset, 6.9), (Tlist, 5.3)],
    [(Tlist, 42.9), (Tset, 31.7), (Tmat, 30.2), (Vfdp, 9.5), (Vcirco, 9.5), (Vsfdp, 9.6), (Vdot, 0.0), (Vneato, 0.0)],
];

/// Per-task label frequencies (as fractions) of a published preference table.
pub fn reference_preferences(table: ReferenceTable) -> BTreeMap<TaskKind, BTreeMap<GtrId, f64>> {
    let rows = match table {
        ReferenceTable::Gpt4o => &GPT4O,
        ReferenceTable::Gemini25Pro => &GEMINI_25_PRO,
    };
    TASK_COLUMNS
        .iter()
        .zip(rows.iter())
        .map(|(&task, row)| (task, row.iter().map(|&(g, pct)| (g, pct / 100.0)).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_cover_the_pool() {
        for table in [ReferenceTable::Gpt4o, ReferenceTable::Gemini25Pro] {
            let prefs = reference_preferences(table);
            assert_eq!(prefs.len(), 7);
            for row in prefs.values() {
                assert_eq!(row.len(), 8);
                assert!(row.values().sum::<f64>() >= 0.99);
            }
        }
        assert!((reference_preferences(ReferenceTable::Gpt4o)[&TaskKind::Conn][&Vfdp] - 0.923).abs() < 1e-12);
    }

    #[test]
    fn band_membership_matches_frequency() {
        let cal = Calibration::new(reference_preferences(ReferenceTable::Gpt4o));
        let n = 20_000;
        let mut hits = BTreeMap::new();
        for i in 0..n {
            for g in cal.favored(7, &format!("q{i}"), TaskKind::SP).unwrap() {
                *hits.entry(g).or_insert(0usize) += 1;
            }
        }
        for (g, &f) in &cal.frequencies[&TaskKind::SP] {
            let observed = *hits.get(g).unwrap_or(&0) as f64 / n as f64;
            assert!((observed - f).abs() < 0.015, "{g}: {observed} vs {f}");
        }
    }

    #[test]
    fn more_frequent_gtrs_are_favored_on_supersets() {
        let cal = Calibration::new(reference_preferences(ReferenceTable::Gpt4o));
        for i in 0..5000 {
            let f = cal.favored(3, &i.to_string(), TaskKind::Conn).unwrap();
            if f.contains(&Vneato) {
                assert!(f.contains(&Vfdp), "question {i}: {f:?}");
            }
        }
    }

    #[test]
    fn every_question_has_a_favorite() {
        let mut row = BTreeMap::new();
        row.insert(Tset, 0.3);
        row.insert(Vdot, 0.2);
        let cal = Calibration::new(BTreeMap::from([(TaskKind::MF, row)]));
        for i in 0..500 {
            assert!(!cal.favored(1, &i.to_string(), TaskKind::MF).unwrap().is_empty());
        }
        assert!(cal.favored(1, "x", TaskKind::Conn).is_none());
    }
}
