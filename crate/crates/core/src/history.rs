//! Version histories as an initial program plus invertible line patches.
//!
//! Patch text format, one or more hunks:
//!
//! ```text
//! @ <old_line_no>
//! -- <exact old line>
//! ++ <new line>
//! ```
//!
//! A hunk removes its `--` lines starting at `old_line_no` and puts its `++`
//! lines in their place. A hunk without `--` lines inserts before
//! `old_line_no` (use `line_count + 1` to append).

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::minic::{self, MinicError, SourceProgram};

#[derive(Debug, thiserror::Error)]
pub enum HistoryError {
    #[error("hunk {hunk}: expected line {line} to be {expected:?}, found {actual:?}")]
    PatchMismatch { hunk: usize, line: usize, expected: String, actual: Option<String> },
    #[error("patch line {line}: {message}")]
    PatchSyntax { line: usize, message: String },
    #[error("hunks {first} and {second} overlap or are out of order")]
    Overlap { first: usize, second: usize },
    #[error("version {version} does not parse: {source}")]
    InvalidVersion { version: usize, source: MinicError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("history {0} has no p0.mc")]
    MissingBase(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hunk {
    pub old_line_no: usize,
    pub removed: Vec<String>,
    pub added: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Patch {
    pub hunks: Vec<Hunk>,
}

/// Lines touched by a patch, in the patched version's numbering.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModifiedLines {
    /// Lines holding added text.
    pub lines: BTreeSet<usize>,
    /// For pure deletions: the line that follows the deletion point.
    pub anchors: BTreeSet<usize>,
}

impl ModifiedLines {
    /// Lines and anchors together; this is what gets labelled.
    pub fn all(&self) -> BTreeSet<usize> {
        self.lines.union(&self.anchors).copied().collect()
    }
}

impl Patch {
    pub fn parse(text: &str) -> Result<Patch, HistoryError> {
        let mut hunks: Vec<Hunk> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let syntax = |message: &str| HistoryError::PatchSyntax { line: line_no, message: message.into() };
            if let Some(rest) = line.strip_prefix('@') {
                let n: usize = rest.trim().parse().map_err(|_| syntax("expected `@ <line number>`"))?;
                if n == 0 {
                    return Err(syntax("line numbers start at 1"));
                }
                hunks.push(Hunk { old_line_no: n, removed: Vec::new(), added: Vec::new() });
            } else if let Some(rest) = line.strip_prefix("--") {
                let hunk = hunks.last_mut().ok_or_else(|| syntax("`--` line before any `@` header"))?;
                if !hunk.added.is_empty() {
                    return Err(syntax("`--` lines must precede `++` lines within a hunk"));
                }
                hunk.removed.push(strip_one_space(rest).to_string());
            } else if let Some(rest) = line.strip_prefix("++") {
                let hunk = hunks.last_mut().ok_or_else(|| syntax("`++` line before any `@` header"))?;
                hunk.added.push(strip_one_space(rest).to_string());
            } else if !line.trim().is_empty() {
                return Err(syntax("expected `@`, `--` or `++`"));
            }
        }
        let patch = Patch { hunks };
        patch.check_order()?;
        Ok(patch)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for h in &self.hunks {
            out.push_str(&format!("@ {}\n", h.old_line_no));
            for l in &h.removed {
                out.push_str(&format!("-- {l}\n"));
            }
            for l in &h.added {
                out.push_str(&format!("++ {l}\n"));
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.hunks.is_empty()
    }

    fn check_order(&self) -> Result<(), HistoryError> {
        for (i, pair) in self.hunks.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if b.old_line_no < a.old_line_no + a.removed.len().max(1) {
                return Err(HistoryError::Overlap { first: i, second: i + 1 });
            }
        }
        Ok(())
    }

    /// Start line of each hunk in the patched version.
    fn new_starts(&self) -> Vec<usize> {
        let mut offset: isize = 0;
        self.hunks
            .iter()
            .map(|h| {
                let start = (h.old_line_no as isize + offset) as usize;
                offset += h.added.len() as isize - h.removed.len() as isize;
                start
            })
            .collect()
    }

    /// Maps a line of the old version to the patched version. Lines removed
    /// by a hunk map to the first line of its replacement (or the deletion
    /// anchor).
    pub fn map_line(&self, old_line: usize) -> usize {
        let starts = self.new_starts();
        let mut offset: isize = 0;
        for (h, &new_start) in self.hunks.iter().zip(&starts) {
            if old_line < h.old_line_no {
                break;
            }
            if old_line < h.old_line_no + h.removed.len() {
                return new_start;
            }
            offset += h.added.len() as isize - h.removed.len() as isize;
        }
        (old_line as isize + offset) as usize
    }
}

fn strip_one_space(s: &str) -> &str {
    s.strip_prefix(' ').unwrap_or(s)
}

impl fmt::Display for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Splits text into lines, remembering whether it ended with a newline.
fn split_text(text: &str) -> (Vec<&str>, bool) {
    if text.is_empty() {
        return (Vec::new(), false);
    }
    let trailing = text.ends_with('\n');
    let body = if trailing { &text[..text.len() - 1] } else { text };
    (body.split('\n').collect(), trailing)
}

pub fn apply_patch(text: &str, patch: &Patch) -> Result<String, HistoryError> {
    patch.check_order()?;
    let (old, trailing) = split_text(text);
    let mut out: Vec<&str> = Vec::with_capacity(old.len());
    let mut cursor = 0usize;
    for (idx, h) in patch.hunks.iter().enumerate() {
        let start = h.old_line_no - 1;
        if start > old.len() {
            return Err(HistoryError::PatchMismatch {
                hunk: idx,
                line: h.old_line_no,
                expected: h.removed.first().cloned().unwrap_or_default(),
                actual: None,
            });
        }
        out.extend_from_slice(&old[cursor..start]);
        for (k, expected) in h.removed.iter().enumerate() {
            let actual = old.get(start + k).copied();
            if actual != Some(expected.as_str()) {
                return Err(HistoryError::PatchMismatch {
                    hunk: idx,
                    line: h.old_line_no + k,
                    expected: expected.clone(),
                    actual: actual.map(str::to_string),
                });
            }
        }
        out.extend(h.added.iter().map(String::as_str));
        cursor = start + h.removed.len();
    }
    out.extend_from_slice(&old[cursor..]);
    let mut result = out.join("\n");
    if trailing || (text.is_empty() && !result.is_empty()) {
        result.push('\n');
    }
    Ok(result)
}

pub fn invert_patch(patch: &Patch) -> Patch {
    let hunks = patch
        .hunks
        .iter()
        .zip(patch.new_starts())
        .map(|(h, new_start)| Hunk { old_line_no: new_start, removed: h.added.clone(), added: h.removed.clone() })
        .collect();
    Patch { hunks }
}

pub fn modified_lines(patch: &Patch) -> ModifiedLines {
    let mut result = ModifiedLines::default();
    for (h, start) in patch.hunks.iter().zip(patch.new_starts()) {
        if h.added.is_empty() {
            result.anchors.insert(start);
        } else {
            result.lines.extend(start..start + h.added.len());
        }
    }
    result
}

/// P_0 plus Patch_1..Patch_k with every intermediate version parsed.
#[derive(Debug, Clone)]
pub struct VersionHistory {
    pub name: String,
    pub patches: Vec<Patch>,
    versions: Vec<SourceProgram>,
}

impl VersionHistory {
    pub fn new(name: impl Into<String>, base_text: &str, patches: Vec<Patch>) -> Result<Self, HistoryError> {
        let mut versions = Vec::with_capacity(patches.len() + 1);
        let base = minic::parse_valid(base_text).map_err(|source| HistoryError::InvalidVersion { version: 0, source })?;
        versions.push(base);
        let mut text = base_text.to_string();
        for (i, patch) in patches.iter().enumerate() {
            text = apply_patch(&text, patch)?;
            let p = minic::parse_valid(&text)
                .map_err(|source| HistoryError::InvalidVersion { version: i + 1, source })?;
            versions.push(p);
        }
        Ok(VersionHistory { name: name.into(), patches, versions })
    }

    /// Reads `p0.mc` and `patch1.diff`, `patch2.diff`, ... until the first gap.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, HistoryError> {
        let dir = dir.as_ref();
        let read = |path: PathBuf| fs::read_to_string(&path).map_err(|source| HistoryError::Io { path, source });
        let base_path = dir.join("p0.mc");
        if !base_path.exists() {
            return Err(HistoryError::MissingBase(dir.to_path_buf()));
        }
        let base = read(base_path)?;
        let mut patches = Vec::new();
        for i in 1.. {
            let path = dir.join(format!("patch{i}.diff"));
            if !path.exists() {
                break;
            }
            patches.push(Patch::parse(&read(path)?)?);
        }
        let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "history".into());
        Self::new(name, &base, patches)
    }

    /// Number of patches (k); versions are P_0..P_k.
    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn version(&self, i: usize) -> &SourceProgram {
        &self.versions[i]
    }

    pub fn versions(&self) -> &[SourceProgram] {
        &self.versions
    }

    /// Reconstructs P_j from P_i (j <= i) by applying inverse patches.
    pub fn rewind(&self, i: usize, j: usize) -> Result<String, HistoryError> {
        let mut text = minic::render(&self.versions[i]);
        for k in (j + 1..=i).rev() {
            text = apply_patch(&text, &invert_patch(&self.patches[k - 1]))?;
        }
        Ok(text)
    }

    /// Lines of P_i that differ from P_j (j < i): every line touched by
    /// Patch_{j+1}..Patch_i, carried forward into P_i's numbering.
    pub fn lines_modified_since(&self, i: usize, j: usize) -> BTreeSet<usize> {
        let mut acc: BTreeSet<usize> = BTreeSet::new();
        for k in j + 1..=i {
            let patch = &self.patches[k - 1];
            let mut carried: BTreeSet<usize> = acc.iter().map(|&l| patch.map_line(l)).collect();
            carried.extend(modified_lines(patch).all());
            acc = carried;
        }
        acc
    }
}
