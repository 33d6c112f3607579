//! Dataset loading, label mapping, balancing and splitting.
//!
//! Two sources feed training: the OLID tweet corpus (tab-separated,
//! hierarchical OFF/NOT and TIN/UNT labels) and the Toxic-Comments
//! corpus (CSV with six binary flags, mapped onto OFF/NOT and used for
//! training augmentation only).

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Default seed for balancing and splitting.
pub const DEFAULT_SEED: u64 = 5;

/// Sample counts reported for the Toxic-Comments augmentation at full
/// scale. The mapping rule, not these totals, is normative; they are kept
/// for internal-consistency arithmetic:
/// `MAPPED_TOTAL − NOT_REMOVED = 2 × PAIRS_ADDED`.
pub mod reported_counts {
    /// Rows surviving the OFF/NOT mapping rule.
    pub const MAPPED_TOTAL: u64 = 109_236;
    /// NOT rows randomly removed when balancing.
    pub const NOT_REMOVED: u64 = 84_626;
    /// OFF rows kept — and NOT rows kept — after balancing.
    pub const PAIRS_ADDED: u64 = 12_305;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabelA {
    Not,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LabelB {
    Tin,
    Unt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    Olid,
    Toxic,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Olid => "OLID",
            Source::Toxic => "TOXIC",
        }
    }
}

impl LabelA {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelA::Not => "NOT",
            LabelA::Off => "OFF",
        }
    }

    pub fn parse(s: &str) -> Option<LabelA> {
        match s {
            "NOT" => Some(LabelA::Not),
            "OFF" => Some(LabelA::Off),
            _ => None,
        }
    }

    /// Class index used by the encoders: NOT=0, OFF=1.
    pub fn index(self) -> usize {
        match self {
            LabelA::Not => 0,
            LabelA::Off => 1,
        }
    }
}

impl LabelB {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelB::Tin => "TIN",
            LabelB::Unt => "UNT",
        }
    }

    pub fn parse(s: &str) -> Option<LabelB> {
        match s {
            "TIN" => Some(LabelB::Tin),
            "UNT" => Some(LabelB::Unt),
            _ => None,
        }
    }

    /// Class index used by the encoders: TIN=0, UNT=1.
    pub fn index(self) -> usize {
        match self {
            LabelB::Tin => 0,
            LabelB::Unt => 1,
        }
    }
}

impl fmt::Display for LabelA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for LabelB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One text with its subtask-A label and optional subtask-B label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub label_a: LabelA,
    pub label_b: Option<LabelB>,
    pub source: Source,
}

/// One raw Toxic-Comments record: six binary flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToxicRow {
    pub id: String,
    pub comment_text: String,
    /// toxic, severe_toxic, obscene, threat, insult, identity_hate
    pub flags: [u8; 6],
}

impl ToxicRow {
    pub fn toxic(&self) -> bool {
        self.flags[0] == 1
    }

    pub fn severe_toxic(&self) -> bool {
        self.flags[1] == 1
    }

    pub fn all_clear(&self) -> bool {
        self.flags.iter().all(|&f| f == 0)
    }
}

/// Seeded train/validation partition.
#[derive(Debug, Clone)]
pub struct DataSplit {
    pub train: Vec<LabeledExample>,
    pub validation: Vec<LabeledExample>,
    pub seed: u64,
}

/// Header line of OLID-format TSV files.
pub const OLID_HEADER: &str = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c";

/// Load an OLID training file: tab-separated with header
/// `id tweet subtask_a subtask_b subtask_c`. The subtask_c column is
/// read and discarded; NULL subtask_b markers become absent labels.
pub fn load_olid(path: &Path) -> Result<Vec<LabeledExample>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let path_str = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == OLID_HEADER => {}
        Some((_, header)) => {
            return Err(Error::parse(
                path_str,
                1,
                format!("unexpected header {header:?}"),
            ))
        }
        None => return Err(Error::parse(path_str, 1, "missing header")),
    }

    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                path_str,
                line_no,
                format!("expected 5 tab-separated columns, got {}", fields.len()),
            ));
        }
        let label_a = LabelA::parse(fields[2]).ok_or_else(|| Error::UnknownLabel {
            value: fields[2].to_string(),
            line: line_no,
        })?;
        let label_b = match fields[3] {
            "NULL" | "" | "-" => None,
            other => Some(LabelB::parse(other).ok_or_else(|| Error::UnknownLabel {
                value: other.to_string(),
                line: line_no,
            })?),
        };
        if label_b.is_some() && label_a == LabelA::Not {
            return Err(Error::parse(
                path_str,
                line_no,
                "subtask_b label on a NOT row",
            ));
        }
        if fields[1].is_empty() {
            return Err(Error::parse(path_str, line_no, "empty tweet text"));
        }
        out.push(LabeledExample {
            id: fields[0].to_string(),
            text: fields[1].to_string(),
            label_a,
            label_b,
            source: Source::Olid,
        });
    }
    Ok(out)
}

/// Write examples back out in the OLID format. Tabs and newlines inside
/// the text are replaced by spaces to keep the format line-based.
pub fn write_olid(path: &Path, examples: &[LabeledExample]) -> Result<()> {
    let mut text = String::from(OLID_HEADER);
    text.push('\n');
    for ex in examples {
        let clean: String = ex
            .text
            .chars()
            .map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c })
            .collect();
        let label_b = ex.label_b.map(|b| b.as_str()).unwrap_or("NULL");
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\tNULL\n",
            ex.id,
            clean,
            ex.label_a.as_str(),
            label_b
        ));
    }
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

const TOXIC_HEADER: [&str; 8] = [
    "id",
    "comment_text",
    "toxic",
    "severe_toxic",
    "obscene",
    "threat",
    "insult",
    "identity_hate",
];

/// Load the Toxic-Comments CSV. Quoted fields may span multiple lines;
/// embedded newlines are preserved in the text.
pub fn load_toxic_comments(path: &Path) -> Result<Vec<ToxicRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let path_str = path.display().to_string();

    let headers = reader.headers()?.clone();
    let expected: Vec<&str> = TOXIC_HEADER.to_vec();
    let actual: Vec<&str> = headers.iter().collect();
    if actual != expected {
        return Err(Error::parse(
            path_str,
            1,
            format!("unexpected header {actual:?}"),
        ));
    }

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line_no = i + 2;
        if record.len() != 8 {
            return Err(Error::parse(
                path_str,
                line_no,
                format!("expected 8 fields, got {}", record.len()),
            ));
        }
        let mut flags = [0u8; 6];
        for (j, flag) in flags.iter_mut().enumerate() {
            *flag = match &record[j + 2] {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::parse(
                        path_str,
                        line_no,
                        format!("non-binary flag value {other:?} in {}", TOXIC_HEADER[j + 2]),
                    ))
                }
            };
        }
        out.push(ToxicRow {
            id: record[0].to_string(),
            comment_text: record[1].to_string(),
            flags,
        });
    }
    Ok(out)
}

/// Write rows back out in the Toxic-Comments CSV format.
pub fn write_toxic_comments(path: &Path, rows: &[ToxicRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(TOXIC_HEADER)?;
    for row in rows {
        let mut record = vec![row.id.clone(), row.comment_text.clone()];
        record.extend(row.flags.iter().map(|f| f.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Map Toxic-Comments flags onto OFF/NOT.
///
/// OFF iff toxic or severe_toxic is positive; NOT iff no flag is
/// positive; any row positive only in the other four categories is
/// excluded entirely. Mapped examples never carry a subtask-B label.
pub fn map_toxic_labels(rows: &[ToxicRow]) -> Vec<LabeledExample> {
    rows.iter()
        .filter(|row| !row.comment_text.is_empty())
        .filter_map(|row| {
            let label_a = if row.toxic() || row.severe_toxic() {
                LabelA::Off
            } else if row.all_clear() {
                LabelA::Not
            } else {
                return None;
            };
            Some(LabeledExample {
                id: row.id.clone(),
                text: row.comment_text.clone(),
                label_a,
                label_b: None,
                source: Source::Toxic,
            })
        })
        .collect()
}

/// Randomly remove NOT examples (seeded) until the classes are equal.
/// Survivor order is preserved; input with |NOT| <= |OFF| is returned
/// unchanged.
pub fn balance(examples: Vec<LabeledExample>, seed: u64) -> Vec<LabeledExample> {
    let n_off = examples.iter().filter(|e| e.label_a == LabelA::Off).count();
    let not_indices: Vec<usize> = examples
        .iter()
        .enumerate()
        .filter(|(_, e)| e.label_a == LabelA::Not)
        .map(|(i, _)| i)
        .collect();
    if not_indices.len() <= n_off {
        return examples;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = not_indices.clone();
    shuffled.shuffle(&mut rng);
    let mut keep = vec![true; examples.len()];
    for &idx in &shuffled[n_off..] {
        keep[idx] = false;
    }
    examples
        .into_iter()
        .zip(keep)
        .filter_map(|(ex, kept)| kept.then_some(ex))
        .collect()
}

/// Seeded shuffle then partition into n_train / n_val examples.
pub fn split(
    examples: Vec<LabeledExample>,
    n_train: usize,
    n_val: usize,
    seed: u64,
) -> Result<DataSplit> {
    if n_train + n_val != examples.len() {
        return Err(Error::SizeMismatch(format!(
            "{} + {} != {} examples",
            n_train,
            n_val,
            examples.len()
        )));
    }
    let mut shuffled = examples;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let validation = shuffled.split_off(n_train);
    Ok(DataSplit {
        train: shuffled,
        validation,
        seed,
    })
}

/// Only the examples that carry a subtask-B label (OLID OFF rows).
pub fn build_subtask_b_view(examples: &[LabeledExample]) -> Vec<LabeledExample> {
    examples
        .iter()
        .filter(|e| e.label_b.is_some())
        .cloned()
        .collect()
}

/// Header line of prepared-dataset TSV files.
pub const PREPARED_HEADER: &str = "id\tlabel_a\tlabel_b\ttext";

/// Write the prepared-dataset TSV: `id<TAB>label_a<TAB>label_b<TAB>text`
/// with `-` for an absent subtask-B label.
pub fn write_prepared(path: &Path, examples: &[LabeledExample]) -> Result<()> {
    let mut text = String::from(PREPARED_HEADER);
    text.push('\n');
    for ex in examples {
        let clean: String = ex
            .text
            .chars()
            .map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c })
            .collect();
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            ex.id,
            ex.label_a.as_str(),
            ex.label_b.map(|b| b.as_str()).unwrap_or("-"),
            clean
        ));
    }
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Read a prepared-dataset TSV written by [`write_prepared`]. The source
/// column is not part of the format; loaded examples are tagged OLID.
pub fn read_prepared(path: &Path) -> Result<Vec<LabeledExample>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let path_str = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim_end() != PREPARED_HEADER {
                return Err(Error::parse(path_str, 1, format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                path_str,
                line_no,
                format!("expected 4 tab-separated columns, got {}", fields.len()),
            ));
        }
        let label_a = LabelA::parse(fields[1]).ok_or_else(|| Error::UnknownLabel {
            value: fields[1].to_string(),
            line: line_no,
        })?;
        let label_b = match fields[2] {
            "-" => None,
            other => Some(LabelB::parse(other).ok_or_else(|| Error::UnknownLabel {
                value: other.to_string(),
                line: line_no,
            })?),
        };
        out.push(LabeledExample {
            id: fields[0].to_string(),
            text: fields[3].to_string(),
            label_a,
            label_b,
            source: Source::Olid,
        });
    }
    Ok(out)
}

/// Deterministic ordering helper used when stable output is needed.
pub fn sort_by_id(examples: &mut [LabeledExample]) {
    examples.sort_by(|a, b| match a.id.len().cmp(&b.id.len()) {
        Ordering::Equal => a.id.cmp(&b.id),
        other => other,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn example(id: &str, label_a: LabelA, label_b: Option<LabelB>) -> LabeledExample {
        LabeledExample {
            id: id.to_string(),
            text: format!("text {id}"),
            label_a,
            label_b,
            source: Source::Olid,
        }
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const OLID_FIXTURE: &str = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n\
        1\t@user go away\tOFF\tTIN\tIND\n\
        2\tsuch crap\tOFF\tUNT\tNULL\n\
        3\tnice day\tNOT\tNULL\tNULL\n";

    #[test]
    fn olid_fixture_loads_with_optional_label_b() {
        let f = write_temp(OLID_FIXTURE);
        let examples = load_olid(f.path()).unwrap();
        assert_eq!(examples.len(), 3);
        assert_eq!(examples[0].label_b, Some(LabelB::Tin));
        assert_eq!(examples[1].label_b, Some(LabelB::Unt));
        assert_eq!(examples[2].label_b, None);
        assert_eq!(examples[2].label_a, LabelA::Not);
        assert!(examples.iter().all(|e| e.source == Source::Olid));
    }

    #[test]
    fn olid_header_only_is_empty() {
        let f = write_temp("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n");
        assert!(load_olid(f.path()).unwrap().is_empty());
    }

    #[test]
    fn olid_malformed_row_names_line() {
        let f = write_temp("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n1\tmissing columns\n");
        let err = load_olid(f.path()).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }

    #[test]
    fn olid_unknown_label_names_value() {
        let f = write_temp("id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n1\thello\tBAD\tNULL\tNULL\n");
        let err = load_olid(f.path()).unwrap_err().to_string();
        assert!(err.contains("BAD"), "{err}");
    }

    #[test]
    fn olid_round_trip() {
        let f = write_temp(OLID_FIXTURE);
        let examples = load_olid(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_olid(out.path(), &examples).unwrap();
        assert_eq!(load_olid(out.path()).unwrap(), examples);
    }

    const TOXIC_HEADER_LINE: &str =
        "id,comment_text,toxic,severe_toxic,obscene,threat,insult,identity_hate\n";

    #[test]
    fn toxic_fixture_loads_flags() {
        let f = write_temp(&format!(
            "{TOXIC_HEADER_LINE}a1,all fine here,0,0,0,0,0,0\na2,awful stuff,1,0,0,0,0,0\n"
        ));
        let rows = load_toxic_comments(f.path()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].flags, [0; 6]);
        assert_eq!(rows[1].flags, [1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn toxic_header_only_is_empty() {
        let f = write_temp(TOXIC_HEADER_LINE);
        assert!(load_toxic_comments(f.path()).unwrap().is_empty());
    }

    #[test]
    fn toxic_quoted_comma_preserved() {
        let f = write_temp(&format!(
            "{TOXIC_HEADER_LINE}a1,\"hello, world\",0,0,0,0,0,0\n"
        ));
        let rows = load_toxic_comments(f.path()).unwrap();
        assert_eq!(rows[0].comment_text, "hello, world");
    }

    #[test]
    fn toxic_multiline_field_preserved() {
        let f = write_temp(&format!(
            "{TOXIC_HEADER_LINE}a1,\"line one\nline two\",0,0,0,0,0,0\n"
        ));
        let rows = load_toxic_comments(f.path()).unwrap();
        assert_eq!(rows[0].comment_text, "line one\nline two");
    }

    #[test]
    fn toxic_non_binary_flag_is_error() {
        let f = write_temp(&format!("{TOXIC_HEADER_LINE}a1,text,2,0,0,0,0,0\n"));
        assert!(load_toxic_comments(f.path()).is_err());
    }

    #[test]
    fn toxic_round_trip() {
        let f = write_temp(&format!(
            "{TOXIC_HEADER_LINE}a1,\"hello, world\",0,0,0,0,0,0\na2,\"two\nlines\",1,1,0,0,1,0\n"
        ));
        let rows = load_toxic_comments(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_toxic_comments(out.path(), &rows).unwrap();
        assert_eq!(load_toxic_comments(out.path()).unwrap(), rows);
    }

    fn toxic_row(flags: [u8; 6]) -> ToxicRow {
        ToxicRow {
            id: format!("{flags:?}"),
            comment_text: "text".to_string(),
            flags,
        }
    }

    #[test]
    fn map_toxic_rule_table() {
        assert_eq!(
            map_toxic_labels(&[toxic_row([1, 0, 0, 0, 0, 0])])[0].label_a,
            LabelA::Off
        );
        assert_eq!(
            map_toxic_labels(&[toxic_row([0, 0, 0, 0, 0, 0])])[0].label_a,
            LabelA::Not
        );
        assert!(map_toxic_labels(&[toxic_row([0, 0, 0, 0, 1, 0])]).is_empty());
    }

    // Brute force over all 64 flag combinations: OFF iff toxic or
    // severe_toxic; NOT iff all clear; excluded otherwise.
    #[test]
    fn map_toxic_partition_over_all_flag_vectors() {
        for bits in 0u8..64 {
            let flags: [u8; 6] = std::array::from_fn(|i| (bits >> i) & 1);
            let mapped = map_toxic_labels(&[toxic_row(flags)]);
            let expect_off = flags[0] == 1 || flags[1] == 1;
            let expect_not = flags.iter().all(|&f| f == 0);
            match (&mapped[..], expect_off, expect_not) {
                ([ex], true, _) => assert_eq!(ex.label_a, LabelA::Off, "{flags:?}"),
                ([ex], false, true) => assert_eq!(ex.label_a, LabelA::Not, "{flags:?}"),
                ([], false, false) => {}
                other => panic!("unexpected mapping for {flags:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn mapped_toxic_examples_have_no_label_b() {
        let mapped = map_toxic_labels(&[toxic_row([1, 1, 1, 1, 1, 1])]);
        assert_eq!(mapped[0].label_b, None);
        assert_eq!(mapped[0].source, Source::Toxic);
    }

    #[test]
    fn balance_already_balanced_unchanged() {
        let examples: Vec<_> = (0..3)
            .map(|i| example(&format!("o{i}"), LabelA::Off, None))
            .chain((0..3).map(|i| example(&format!("n{i}"), LabelA::Not, None)))
            .collect();
        assert_eq!(balance(examples.clone(), 5), examples);
    }

    #[test]
    fn balance_removes_only_not_and_is_deterministic() {
        let examples: Vec<_> = (0..2)
            .map(|i| example(&format!("o{i}"), LabelA::Off, None))
            .chain((0..5).map(|i| example(&format!("n{i}"), LabelA::Not, None)))
            .collect();
        let run1 = balance(examples.clone(), 7);
        let run2 = balance(examples.clone(), 7);
        assert_eq!(run1, run2);
        let n_off = run1.iter().filter(|e| e.label_a == LabelA::Off).count();
        let n_not = run1.iter().filter(|e| e.label_a == LabelA::Not).count();
        assert_eq!((n_off, n_not), (2, 2));
        // all OFF survive
        assert!(run1.iter().filter(|e| e.label_a == LabelA::Off).count() == 2);
        // survivor order preserved
        let positions: Vec<usize> = run1
            .iter()
            .map(|e| examples.iter().position(|x| x.id == e.id).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn balance_different_seeds_differ_eventually() {
        let examples: Vec<_> = (0..2)
            .map(|i| example(&format!("o{i}"), LabelA::Off, None))
            .chain((0..30).map(|i| example(&format!("n{i}"), LabelA::Not, None)))
            .collect();
        let a = balance(examples.clone(), 1);
        let b = balance(examples, 2);
        assert_ne!(a, b);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let examples: Vec<_> = (0..10)
            .map(|i| example(&format!("e{i}"), LabelA::Not, None))
            .collect();
        let s1 = split(examples.clone(), 7, 3, 5).unwrap();
        let s2 = split(examples.clone(), 7, 3, 5).unwrap();
        assert_eq!(s1.train.len(), 7);
        assert_eq!(s1.validation.len(), 3);
        assert_eq!(s1.train, s2.train);
        assert_eq!(s1.validation, s2.validation);

        // partition: no duplicated or lost ids
        let mut ids: Vec<&str> = s1
            .train
            .iter()
            .chain(&s1.validation)
            .map(|e| e.id.as_str())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 10);
    }

    #[test]
    fn split_empty_validation() {
        let examples: Vec<_> = (0..10)
            .map(|i| example(&format!("e{i}"), LabelA::Not, None))
            .collect();
        let s = split(examples, 10, 0, 5).unwrap();
        assert!(s.validation.is_empty());
    }

    #[test]
    fn split_size_mismatch_is_error() {
        let examples: Vec<_> = (0..10)
            .map(|i| example(&format!("e{i}"), LabelA::Not, None))
            .collect();
        assert!(split(examples, 5, 3, 5).is_err());
    }

    #[test]
    fn subtask_b_view_filters() {
        let examples = vec![
            example("1", LabelA::Off, Some(LabelB::Tin)),
            example("2", LabelA::Off, None),
            example("3", LabelA::Not, None),
            example("4", LabelA::Off, Some(LabelB::Unt)),
            example("5", LabelA::Not, None),
        ];
        let view = build_subtask_b_view(&examples);
        assert_eq!(view.len(), 2);
        assert!(view.iter().all(|e| e.label_b.is_some()));
        assert!(build_subtask_b_view(&examples[2..3]).is_empty());
    }

    #[test]
    fn prepared_round_trip() {
        let examples = vec![
            example("1", LabelA::Off, Some(LabelB::Tin)),
            example("2", LabelA::Not, None),
        ];
        let out = tempfile::NamedTempFile::new().unwrap();
        write_prepared(out.path(), &examples).unwrap();
        let loaded = read_prepared(out.path()).unwrap();
        assert_eq!(loaded, examples);
    }

    #[test]
    fn prepared_text_may_contain_spaces_and_punct() {
        let mut ex = example("9", LabelA::Off, None);
        ex.text = "you a$$hole :) #tag".to_string();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_prepared(out.path(), &[ex.clone()]).unwrap();
        assert_eq!(read_prepared(out.path()).unwrap()[0].text, ex.text);
    }
}
