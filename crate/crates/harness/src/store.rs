//! JSONL files and the resumable probe store.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gtr_core::gtr::GtrId;
use gtr_core::preference::ProbeRecord;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::HarnessError;

fn ensure_parent(path: &Path) -> Result<(), HarnessError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e)),
        _ => Ok(()),
    }
}

/// Writes `text` through a sibling temporary file and a rename, so readers
/// never see a half-written file.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), HarnessError> {
    ensure_parent(path)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), HarnessError> {
    let mut text = String::new();
    for item in items {
        text.push_str(&serde_json::to_string(item).map_err(|e| HarnessError::Data(e.to_string()))?);
        text.push('\n');
    }
    write_atomic(path, &text)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| HarnessError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Data(e.to_string()))?;
    write_atomic(path, &(text + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Parse { path: path.to_path_buf(), line: 0, message: e.to_string() })
}

/// Append-only JSONL of probe records keyed by (question, GTR, trial).
///
/// Records are appended as they complete, so an interrupted run keeps its
/// progress. [`ProbeStore::canonicalize`] rewrites the file in question
/// order, then pool order, then trial, which makes the final file
/// independent of how the work was split across runs.
#[derive(Debug, Clone)]
pub struct ProbeStore {
    path: PathBuf,
}

pub type ProbeKey = (String, GtrId, usize);

impl ProbeStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ProbeStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// All complete records. A truncated last line (from a killed run) is
    /// dropped; a malformed line anywhere else is an error.
    pub fn load(&self) -> Result<Vec<ProbeRecord>, HarnessError> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(HarnessError::io(&self.path, e)),
        };
        let complete = text.ends_with('\n');
        let lines: Vec<&str> = text.lines().collect();
        let mut out = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(line) {
                Ok(r) => out.push(r),
                Err(_) if i + 1 == lines.len() && !complete => {
                    log::warn!("{}: dropping truncated final record", self.path.display());
                }
                Err(e) => {
                    return Err(HarnessError::Parse { path: self.path.clone(), line: i + 1, message: e.to_string() })
                }
            }
        }
        Ok(out)
    }

    pub fn keys(&self) -> Result<BTreeSet<ProbeKey>, HarnessError> {
        Ok(self.load()?.into_iter().map(|r| (r.question_id, r.gtr, r.trial)).collect())
    }

    pub fn append(&self, records: &[ProbeRecord]) -> Result<(), HarnessError> {
        if records.is_empty() {
            return Ok(());
        }
        ensure_parent(&self.path)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| HarnessError::io(&self.path, e))?;
        let mut w = BufWriter::new(file);
        for r in records {
            let line = serde_json::to_string(r).map_err(|e| HarnessError::Data(e.to_string()))?;
            writeln!(w, "{line}").map_err(|e| HarnessError::io(&self.path, e))?;
        }
        w.flush().map_err(|e| HarnessError::io(&self.path, e))
    }

    /// Deduplicates (first record wins) and sorts by the position of the
    /// question in `order`, then GTR, then trial. Records of questions not
    /// in `order` go last, by id.
    pub fn canonicalize(&self, order: &[String]) -> Result<Vec<ProbeRecord>, HarnessError> {
        let records = self.load()?;
        let rank: HashMap<&str, usize> = order.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut seen = BTreeSet::new();
        let mut kept: Vec<ProbeRecord> =
            records.into_iter().filter(|r| seen.insert((r.question_id.clone(), r.gtr, r.trial))).collect();
        kept.sort_by(|a, b| {
            let ra = rank.get(a.question_id.as_str()).copied().unwrap_or(usize::MAX);
            let rb = rank.get(b.question_id.as_str()).copied().unwrap_or(usize::MAX);
            (ra, &a.question_id, a.gtr, a.trial).cmp(&(rb, &b.question_id, b.gtr, b.trial))
        });
        if self.path.exists() {
            write_jsonl(&self.path, &kept)?;
        }
        Ok(kept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(q: &str, g: GtrId, t: usize) -> ProbeRecord {
        ProbeRecord::new(q, g, t, 1, 10)
    }

    #[test]
    fn truncated_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let store = ProbeStore::new(dir.path().join("p.jsonl"));
        store.append(&[rec("a", GtrId::Vdot, 0)]).unwrap();
        let mut text = fs::read_to_string(store.path()).unwrap();
        text.push_str("{\"question_id\":\"a\",\"gt");
        fs::write(store.path(), text).unwrap();
        assert_eq!(store.load().unwrap().len(), 1);
        assert_eq!(store.canonicalize(&["a".into()]).unwrap().len(), 1);
        assert!(fs::read_to_string(store.path()).unwrap().ends_with('\n'));
    }

    #[test]
    fn canonical_order_and_dedup() {
        let dir = tempfile::tempdir().unwrap();
        let store = ProbeStore::new(dir.path().join("p.jsonl"));
        let mut dup = rec("b", GtrId::Tset, 1);
        dup.tokens = 99;
        store
            .append(&[rec("b", GtrId::Tset, 1), rec("a", GtrId::Tmat, 0), dup, rec("b", GtrId::Vdot, 0), rec("z", GtrId::Vdot, 0)])
            .unwrap();
        let out = store.canonicalize(&["b".into(), "a".into()]).unwrap();
        let keys: Vec<_> = out.iter().map(|r| (r.question_id.as_str(), r.gtr, r.trial, r.tokens)).collect();
        assert_eq!(
            keys,
            vec![("b", GtrId::Vdot, 0, 10), ("b", GtrId::Tset, 1, 10), ("a", GtrId::Tmat, 0, 10), ("z", GtrId::Vdot, 0, 10)]
        );
    }

    #[test]
    fn missing_store_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let store = ProbeStore::new(dir.path().join("none.jsonl"));
        assert!(store.load().unwrap().is_empty());
        assert!(store.canonicalize(&[]).unwrap().is_empty());
        assert!(!store.path().exists());
    }

    proptest::proptest! {
        #[test]
        fn canonicalize_is_order_independent(
            raw in proptest::collection::vec((0usize..4, 0usize..8, 0usize..3), 0..40),
            rotate in 0usize..40,
        ) {
            let recs: Vec<ProbeRecord> =
                raw.iter().map(|&(q, g, t)| rec(&format!("q{q}"), GtrId::POOL[g], t)).collect();
            let order: Vec<String> = (0..3).map(|q| format!("q{q}")).collect();
            let dir = tempfile::tempdir().unwrap();
            let (a, b) = (ProbeStore::new(dir.path().join("a")), ProbeStore::new(dir.path().join("b")));
            a.append(&recs).unwrap();
            let mut shuffled = recs.clone();
            if !shuffled.is_empty() {
                let n = rotate % shuffled.len();
                shuffled.rotate_left(n);
            }
            b.append(&shuffled).unwrap();
            let out = a.canonicalize(&order).unwrap();
            proptest::prop_assert_eq!(&out, &b.canonicalize(&order).unwrap());
            let keys: BTreeSet<_> = recs.iter().map(|r| (r.question_id.clone(), r.gtr, r.trial)).collect();
            proptest::prop_assert_eq!(out.len(), keys.len());
            proptest::prop_assert_eq!(a.canonicalize(&order).unwrap(), out);
        }
    }
}
