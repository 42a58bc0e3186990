//! Append-only run journal: one JSON line per finished query, so an
//! interrupted run resumes without recomputing anything it already settled.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use rubricforge_core::{DatasetEntry, RejectEntry};

/// How a query ended: in the dataset or in the reject log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryOutcome {
    Done(DatasetEntry),
    Rejected(RejectEntry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalLine {
    pub id: String,
    pub outcome: QueryOutcome,
}

/// Loads a journal into an id -> outcome map.
///
/// A missing file is an empty journal. Lines that fail to parse (a crash
/// mid-write, manual edits) are dropped with a warning — losing a line only
/// means recomputing that query.
pub fn read_journal(path: &Path) -> std::io::Result<BTreeMap<String, QueryOutcome>> {
    let file = match File::open(path) {
        Ok(file) => file,
        Err(err) if err.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
        Err(err) => return Err(err),
    };
    let mut outcomes = BTreeMap::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JournalLine>(&line) {
            Ok(entry) => {
                outcomes.insert(entry.id, entry.outcome);
            }
            Err(err) => {
                tracing::warn!(
                    path = %path.display(),
                    line = index + 1,
                    error = %err,
                    "journal line dropped; its query will be recomputed"
                );
            }
        }
    }
    Ok(outcomes)
}

/// Appends journal lines, flushing after each so a crash loses at most the
/// line being written.
pub struct JournalWriter {
    file: File,
}

impl JournalWriter {
    pub fn append(path: &Path) -> std::io::Result<Self> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(JournalWriter { file })
    }

    pub fn write(&mut self, line: &JournalLine) -> std::io::Result<()> {
        let json = serde_json::to_string(line).map_err(std::io::Error::other)?;
        self.file.write_all(json.as_bytes())?;
        self.file.write_all(b"\n")?;
        self.file.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rubricforge_core::{Criterion, Domain};

    fn done_line(id: &str) -> JournalLine {
        JournalLine {
            id: id.to_string(),
            outcome: QueryOutcome::Done(DatasetEntry {
                id: id.to_string(),
                domain: Domain::Chat,
                prompt: "p".to_string(),
                rubric: vec![Criterion::semantic("c1", "Covers the point", "Covers it.", 5)],
            }),
        }
    }

    fn rejected_line(id: &str) -> JournalLine {
        JournalLine {
            id: id.to_string(),
            outcome: QueryOutcome::Rejected(RejectEntry {
                id: id.to_string(),
                stage: "generate".to_string(),
                error: "GENERATION_FAILED: scripted".to_string(),
            }),
        }
    }

    #[test]
    fn round_trips_done_and_rejected_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        let mut writer = JournalWriter::append(&path).unwrap();
        writer.write(&done_line("q1")).unwrap();
        writer.write(&rejected_line("q2")).unwrap();
        drop(writer);

        let outcomes = read_journal(&path).unwrap();
        assert_eq!(outcomes.len(), 2);
        assert!(matches!(outcomes["q1"], QueryOutcome::Done(_)));
        assert!(matches!(outcomes["q2"], QueryOutcome::Rejected(_)));
    }

    #[test]
    fn missing_file_is_an_empty_journal() {
        let dir = tempfile::tempdir().unwrap();
        let outcomes = read_journal(&dir.path().join("absent.jsonl")).unwrap();
        assert!(outcomes.is_empty());
    }

    #[test]
    fn corrupt_lines_are_dropped_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        let mut writer = JournalWriter::append(&path).unwrap();
        writer.write(&done_line("q1")).unwrap();
        drop(writer);
        // Simulate a crash mid-write plus stray noise.
        std::fs::write(
            &path,
            format!(
                "{}\n{{\"id\": \"q2\", \"outco\nnot json either\n",
                serde_json::to_string(&done_line("q1")).unwrap()
            ),
        )
        .unwrap();

        let outcomes = read_journal(&path).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert!(outcomes.contains_key("q1"));
    }

    #[test]
    fn append_resumes_an_existing_journal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        let mut writer = JournalWriter::append(&path).unwrap();
        writer.write(&done_line("q1")).unwrap();
        drop(writer);
        let mut writer = JournalWriter::append(&path).unwrap();
        writer.write(&done_line("q2")).unwrap();
        drop(writer);

        let outcomes = read_journal(&path).unwrap();
        assert_eq!(outcomes.len(), 2);
    }

    #[test]
    fn journal_wire_shape_is_stable() {
        let json = serde_json::to_string(&rejected_line("q9")).unwrap();
        assert!(json.contains("\"outcome\":{\"rejected\":{"), "{json}");
        let json = serde_json::to_string(&done_line("q8")).unwrap();
        assert!(json.contains("\"outcome\":{\"done\":{"), "{json}");
    }
}
