//! Append-only checkpoint log for partition searches.
//!
//! ```text
//! # repclass-checkpoint {"m":12,"mode":"partition","s":4,...}
//! unit:0 done witnesses:[]
//! unit:7 done witnesses:[{"a":{"m":12,"elements":[...]}, ...}]
//! ```
//!
//! Records are appended in completion order. A malformed final line is the
//! trace of an interrupted write: it is dropped and that unit recomputed.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{PartitionWitness, SpecEcho};
use crate::error::{Error, Result};

const HEADER_PREFIX: &str = "# repclass-checkpoint ";

pub(crate) struct CheckpointLog {
    path: PathBuf,
    file: Mutex<BufWriter<File>>,
}

pub(crate) type Completed = BTreeMap<u64, Vec<PartitionWitness>>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::CheckpointIo {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_record(line: &str) -> Option<(u64, Vec<PartitionWitness>)> {
    let rest = line.strip_prefix("unit:")?;
    let (id, json) = rest.split_once(" done witnesses:")?;
    let id = id.parse().ok()?;
    let witnesses = serde_json::from_str(json).ok()?;
    Some((id, witnesses))
}

impl CheckpointLog {
    /// Opens (or creates) the log and returns the units already completed.
    pub(crate) fn open(path: &Path, echo: &SpecEcho) -> Result<(Self, Completed)> {
        let header = format!("{HEADER_PREFIX}{}", serde_json::to_string(echo)?);
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(io_err(path)(e)),
        };

        let mut completed = Completed::new();
        let mut valid_len = 0usize;
        let mut has_header = false;
        let mut offset = 0usize;
        let lines: Vec<&str> = text.split_inclusive('\n').collect();
        for (i, raw) in lines.iter().enumerate() {
            let line_no = i + 1;
            let is_last = i + 1 == lines.len();
            let terminated = raw.ends_with('\n');
            let line = raw.trim_end_matches(['\n', '\r']);
            offset += raw.len();

            if i == 0 {
                if line == header && terminated {
                    has_header = true;
                    valid_len = offset;
                    continue;
                }
                if line.starts_with(HEADER_PREFIX) && terminated {
                    return Err(Error::CheckpointCorrupt {
                        path: path.to_path_buf(),
                        line: line_no,
                        msg: "checkpoint was written for a different search".into(),
                    });
                }
                if is_last {
                    // truncated header from an interrupted first write
                    break;
                }
                return Err(Error::CheckpointCorrupt {
                    path: path.to_path_buf(),
                    line: line_no,
                    msg: "missing checkpoint header".into(),
                });
            }

            match parse_record(line).filter(|_| terminated) {
                Some((id, w)) => {
                    completed.insert(id, w);
                    valid_len = offset;
                }
                None if is_last => break,
                None => {
                    return Err(Error::CheckpointCorrupt {
                        path: path.to_path_buf(),
                        line: line_no,
                        msg: "malformed unit record".into(),
                    })
                }
            }
        }

        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(false)
            .open(path)
            .map_err(io_err(path))?;
        file.set_len(valid_len as u64).map_err(io_err(path))?;
        let mut file = OpenOptions::new().append(true).open(path).map_err(io_err(path))?;
        if !has_header {
            writeln!(file, "{header}").map_err(io_err(path))?;
            file.flush().map_err(io_err(path))?;
        }
        Ok((
            Self {
                path: path.to_path_buf(),
                file: Mutex::new(BufWriter::new(file)),
            },
            completed,
        ))
    }

    pub(crate) fn record(&self, unit: u64, witnesses: &[PartitionWitness]) -> Result<()> {
        let line = format!("unit:{unit} done witnesses:{}\n", serde_json::to_string(witnesses)?);
        let mut f = self.file.lock().expect("checkpoint writer poisoned");
        f.write_all(line.as_bytes()).map_err(io_err(&self.path))?;
        f.flush().map_err(io_err(&self.path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::SearchMode;

    fn echo(s: usize) -> SpecEcho {
        SpecEcho {
            m: 6,
            mode: SearchMode::Partition { s },
            prune: true,
            exclude_half_shift: false,
            up_to_symmetry: false,
        }
    }

    #[test]
    fn records_survive_reopen_and_trailing_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.log");
        {
            let (log, done) = CheckpointLog::open(&path, &echo(2)).unwrap();
            assert!(done.is_empty());
            log.record(3, &[]).unwrap();
            log.record(1, &[]).unwrap();
        }
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        write!(f, "unit:2 done witn").unwrap();
        drop(f);

        let (log, done) = CheckpointLog::open(&path, &echo(2)).unwrap();
        assert_eq!(done.keys().copied().collect::<Vec<_>>(), vec![1, 3]);
        log.record(2, &[]).unwrap();
        drop(log);
        let (_, done) = CheckpointLog::open(&path, &echo(2)).unwrap();
        assert_eq!(done.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn mismatched_or_corrupt_logs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.log");
        drop(CheckpointLog::open(&path, &echo(2)).unwrap());
        assert!(matches!(
            CheckpointLog::open(&path, &echo(4)),
            Err(Error::CheckpointCorrupt { .. })
        ));

        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        writeln!(f, "garbage").unwrap();
        writeln!(f, "unit:1 done witnesses:[]").unwrap();
        drop(f);
        assert!(matches!(
            CheckpointLog::open(&path, &echo(2)),
            Err(Error::CheckpointCorrupt { line: 2, .. })
        ));
    }
}
