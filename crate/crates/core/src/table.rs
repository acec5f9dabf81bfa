//! Column-major typed tables with explicit missing masks.
//!
//! A [`Table`] is built once (usually through [`load_csv`]) and never mutated
//! in place: masking, encoding and imputation all return new tables, so a
//! table can be shared read-only across worker threads.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{IqaError, Result};

/// Statistical type of a column. Drives bias-test dispatch, scorer choice and
/// pseudo-rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Discrete,
    Binary,
    Categorical,
}

impl ColumnKind {
    pub fn is_continuous(self) -> bool {
        matches!(self, ColumnKind::Continuous)
    }
}

/// Minimum number of occurrences every distinct value needs before a column
/// is treated as discrete or nominal.
pub const MIN_CATEGORY_FREQUENCY: usize = 5;

/// Tokens read as missing by default. `?` is the UCI convention.
pub const DEFAULT_MISSING_TOKENS: [&str; 4] = ["", "NA", "NaN", "?"];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    /// Encoded values. Masked positions hold NaN and must not be read.
    pub values: Vec<f64>,
    /// `true` marks a missing cell.
    pub mask: Vec<bool>,
    /// Code-to-label dictionary; the code of `labels[i]` is `i`.
    pub labels: Option<Vec<String>>,
}

/// Masked cells compare equal whatever they hold.
impl PartialEq for Column {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.mask == other.mask
            && self.labels == other.labels
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(&self.mask)
                .all(|((a, b), &m)| m || a == b)
    }
}

impl Column {
    /// Numeric column from optional cells; kind starts as `Continuous`.
    pub fn from_options(name: impl Into<String>, cells: &[Option<f64>]) -> Self {
        let values = cells.iter().map(|c| c.unwrap_or(f64::NAN)).collect();
        let mask = cells.iter().map(Option::is_none).collect();
        Column {
            name: name.into(),
            kind: ColumnKind::Continuous,
            values,
            mask,
            labels: None,
        }
    }

    /// Fully observed numeric column.
    pub fn from_values(name: impl Into<String>, values: Vec<f64>) -> Self {
        let mask = vec![false; values.len()];
        Column {
            name: name.into(),
            kind: ColumnKind::Continuous,
            values,
            mask,
            labels: None,
        }
    }

    pub fn with_kind(mut self, kind: ColumnKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.mask[row]
    }

    pub fn get(&self, row: usize) -> Option<f64> {
        if self.mask[row] {
            None
        } else {
            Some(self.values[row])
        }
    }

    pub fn n_missing(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn n_observed(&self) -> usize {
        self.len() - self.n_missing()
    }

    pub fn is_all_missing(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    /// Observed values in row order.
    pub fn observed(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| !m)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Row indices of observed cells.
    pub fn observed_rows(&self) -> Vec<usize> {
        (0..self.len()).filter(|&r| !self.mask[r]).collect()
    }

    /// Sorted distinct observed values.
    pub fn distinct_observed(&self) -> Vec<f64> {
        let mut v = self.observed();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn set(&mut self, row: usize, value: Option<f64>) {
        match value {
            Some(v) => {
                self.values[row] = v;
                self.mask[row] = false;
            }
            None => {
                self.values[row] = f64::NAN;
                self.mask[row] = true;
            }
        }
    }

    /// Label for an encoded value, when the column carries a dictionary.
    pub fn decode(&self, value: f64) -> Option<&str> {
        let labels = self.labels.as_ref()?;
        if value < 0.0 || value.fract() != 0.0 {
            return None;
        }
        labels.get(value as usize).map(String::as_str)
    }

    fn take_rows(&self, rows: &[usize]) -> Column {
        Column {
            name: self.name.clone(),
            kind: self.kind,
            values: rows.iter().map(|&r| self.values[r]).collect(),
            mask: rows.iter().map(|&r| self.mask[r]).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Missing fraction `1 - μ` of a column.
pub fn missing_fraction(c: &Column) -> Result<f64> {
    if c.is_empty() {
        return Err(IqaError::degenerate(format!(
            "column {:?} has no rows",
            c.name
        )));
    }
    Ok(c.n_missing() as f64 / c.len() as f64)
}

/// Completeness `μ`: fraction of observed cells.
pub fn completeness(c: &Column) -> Result<f64> {
    Ok(1.0 - missing_fraction(c)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    columns: Vec<Column>,
    n_rows: usize,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Column::len);
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.values.len() != c.mask.len() {
                return Err(IqaError::invalid(format!(
                    "column {:?}: values and mask lengths differ",
                    c.name
                )));
            }
            if c.len() != n_rows {
                return Err(IqaError::invalid(format!(
                    "column {:?} has {} rows, expected {n_rows}",
                    c.name,
                    c.len()
                )));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(IqaError::invalid(format!("duplicate column {:?}", c.name)));
            }
        }
        Ok(Table { columns, n_rows })
    }

    /// Table with a fixed row count and no columns.
    pub fn empty(n_rows: usize) -> Self {
        Table {
            columns: Vec::new(),
            n_rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| IqaError::UnknownColumn(name.to_string()))
    }

    pub fn column_mut(&mut self, name: &str) -> Result<&mut Column> {
        self.columns
            .iter_mut()
            .find(|c| c.name == name)
            .ok_or_else(|| IqaError::UnknownColumn(name.to_string()))
    }

    pub fn total_missing(&self) -> usize {
        self.columns.iter().map(Column::n_missing).sum()
    }

    /// Fraction of masked cells over the whole table.
    pub fn overall_missing_fraction(&self) -> f64 {
        let cells = self.n_rows * self.columns.len();
        if cells == 0 {
            0.0
        } else {
            self.total_missing() as f64 / cells as f64
        }
    }

    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            columns: self.columns.iter().map(|c| c.take_rows(rows)).collect(),
            n_rows: rows.len(),
        }
    }

    /// Projection onto the named columns, in the given order.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Table> {
        let columns = names
            .iter()
            .map(|n| self.column(n.as_ref()).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(Table {
            columns,
            n_rows: self.n_rows,
        })
    }

    /// Table without the named columns. Unknown names are ignored.
    pub fn drop_columns<S: AsRef<str>>(&self, names: &[S]) -> Table {
        let drop: BTreeSet<&str> = names.iter().map(|s| s.as_ref()).collect();
        Table {
            columns: self
                .columns
                .iter()
                .filter(|c| !drop.contains(c.name.as_str()))
                .cloned()
                .collect(),
            n_rows: self.n_rows,
        }
    }

    pub fn replace_column(&mut self, column: Column) -> Result<()> {
        if column.len() != self.n_rows {
            return Err(IqaError::invalid(format!(
                "column {:?} has {} rows, expected {}",
                column.name,
                column.len(),
                self.n_rows
            )));
        }
        let slot = self.column_mut(&column.name.clone())?;
        *slot = column;
        Ok(())
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }

    /// Writes the table as CSV. Labelled columns are decoded, missing cells
    /// are written as empty fields.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.names())
            .map_err(|e| IqaError::Csv(e.to_string()))?;
        for row in 0..self.n_rows {
            let record: Vec<String> = self
                .columns
                .iter()
                .map(|c| match c.get(row) {
                    None => String::new(),
                    Some(v) => match c.decode(v) {
                        Some(label) => label.to_string(),
                        None => format_number(v),
                    },
                })
                .collect();
            w.write_record(&record)
                .map_err(|e| IqaError::Csv(e.to_string()))?;
        }
        w.flush().map_err(|e| IqaError::Csv(e.to_string()))?;
        Ok(())
    }
}

pub(crate) fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Unparsed cells straight from a CSV file, column-major. `None` marks a
/// missing-sentinel cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub names: Vec<String>,
    pub cells: Vec<Vec<Option<String>>>,
    pub n_rows: usize,
}

#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub missing_tokens: Vec<String>,
    /// Per-column kind overrides applied after inference.
    pub kind_hints: BTreeMap<String, ColumnKind>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            missing_tokens: DEFAULT_MISSING_TOKENS.iter().map(|s| s.to_string()).collect(),
            kind_hints: BTreeMap::new(),
        }
    }
}

/// Reads a header-first CSV file into string cells.
pub fn read_raw_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IqaError::io(path, e))?;
    read_raw_csv_from(file, opts)
}

pub fn read_raw_csv_from<R: std::io::Read>(reader: R, opts: &CsvOptions) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| IqaError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let tokens: BTreeSet<&str> = opts.missing_tokens.iter().map(String::as_str).collect();
    let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); names.len()];
    let mut n_rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| IqaError::Csv(e.to_string()))?;
        if rec.len() != names.len() {
            return Err(IqaError::RaggedRows {
                row: i,
                expected: names.len(),
                found: rec.len(),
            });
        }
        for (col, field) in rec.iter().enumerate() {
            let field = field.trim();
            cells[col].push(if tokens.contains(field) {
                None
            } else {
                Some(field.to_string())
            });
        }
        n_rows += 1;
    }
    Ok(RawTable {
        names,
        cells,
        n_rows,
    })
}

/// Maps strings to codes `0..V` in first-appearance order.
pub fn encode_labels(cells: &[Option<String>]) -> (Vec<Option<f64>>, Vec<String>) {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let codes = cells
        .iter()
        .map(|cell| {
            cell.as_deref().map(|s| {
                let next = labels.len();
                let code = *index.entry(s).or_insert_with(|| {
                    labels.push(s.to_string());
                    next
                });
                code as f64
            })
        })
        .collect();
    (codes, labels)
}

/// Converts raw cells to a numeric [`Table`].
///
/// Columns whose observed cells all parse as numbers stay numeric without a
/// dictionary. Columns with no numeric cell at all, and columns hinted as
/// `Categorical`, are label-encoded. A column mixing numbers and text without
/// a hint is a parse error at its first non-numeric cell.
pub fn label_encode(raw: &RawTable, hints: &BTreeMap<String, ColumnKind>) -> Result<Table> {
    let mut columns = Vec::with_capacity(raw.names.len());
    for (name, cells) in raw.names.iter().zip(&raw.cells) {
        let hinted_categorical = hints.get(name) == Some(&ColumnKind::Categorical);
        let parsed: Vec<Option<std::result::Result<f64, ()>>> = cells
            .iter()
            .map(|c| c.as_deref().map(|s| s.parse::<f64>().map_err(|_| ())))
            .collect();
        let n_numeric = parsed.iter().flatten().filter(|p| p.is_ok()).count();
        let n_text = parsed.iter().flatten().filter(|p| p.is_err()).count();

        let column = if hinted_categorical || (n_text > 0 && n_numeric == 0) {
            let (codes, labels) = encode_labels(cells);
            let mut c = Column::from_options(name.clone(), &codes);
            c.kind = ColumnKind::Categorical;
            c.labels = Some(labels);
            c
        } else if n_text > 0 {
            let row = parsed
                .iter()
                .position(|p| matches!(p, Some(Err(()))))
                .unwrap_or(0);
            return Err(IqaError::Parse {
                row,
                column: name.clone(),
                value: cells[row].clone().unwrap_or_default(),
            });
        } else {
            let vals: Vec<Option<f64>> = parsed
                .into_iter()
                .map(|p| p.map(|r| r.unwrap_or(f64::NAN)))
                .collect();
            Column::from_options(name.clone(), &vals)
        };
        columns.push(column);
    }
    if columns.is_empty() {
        return Ok(Table::empty(raw.n_rows));
    }
    Table::new(columns)
}

/// Kind of a single column under the frequency rule.
pub fn infer_kind(c: &Column) -> ColumnKind {
    if c.is_all_missing() {
        return ColumnKind::Continuous;
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for v in c.observed() {
        *counts.entry(v.to_bits()).or_default() += 1;
    }
    let distinct = counts.len();
    if c.labels.is_some() {
        // Text categories have no numeric scale to fall back on.
        return match distinct {
            1 => ColumnKind::Discrete,
            2 => ColumnKind::Binary,
            _ => ColumnKind::Categorical,
        };
    }
    if counts.values().any(|&n| n < MIN_CATEGORY_FREQUENCY) {
        return ColumnKind::Continuous;
    }
    match distinct {
        1 => ColumnKind::Discrete,
        2 => ColumnKind::Binary,
        _ => ColumnKind::Discrete,
    }
}

/// Assigns a kind to every column, then applies the hints.
pub fn infer_column_kinds(t: &Table, hints: &BTreeMap<String, ColumnKind>) -> Result<Table> {
    let mut columns = t.columns.clone();
    for c in &mut columns {
        c.kind = match hints.get(&c.name) {
            Some(&kind) => {
                if kind == ColumnKind::Binary && c.distinct_observed().len() > 2 {
                    return Err(IqaError::invalid(format!(
                        "column {:?} is hinted binary but has more than two values",
                        c.name
                    )));
                }
                kind
            }
            None => infer_kind(c),
        };
    }
    Ok(Table {
        columns,
        n_rows: t.n_rows,
    })
}

/// Reads, encodes and types a CSV file.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Table> {
    let raw = read_raw_csv(path, opts)?;
    let table = label_encode(&raw, &opts.kind_hints)?;
    infer_column_kinds(&table, &opts.kind_hints)
}

/// Masks each observed cell outside `protect` independently with
/// probability `rate`. Existing masks are kept.
pub fn inject_mcar(t: &Table, rate: f64, seed: u64, protect: &[&str]) -> Result<Table> {
    if !(0.0..1.0).contains(&rate) {
        return Err(IqaError::invalid(format!("MCAR rate {rate} outside [0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = t.clone();
    for c in &mut out.columns {
        if protect.contains(&c.name.as_str()) {
            continue;
        }
        for row in 0..c.len() {
            if !c.mask[row] && rng.gen::<f64>() < rate {
                c.set(row, None);
            }
        }
    }
    Ok(out)
}

/// Train/test row indices per fold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub folds: Vec<Fold>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitIndices {
    fn from_test_sets(n_rows: usize, test_sets: Vec<Vec<usize>>) -> Self {
        let folds = test_sets
            .into_iter()
            .map(|mut test| {
                test.sort_unstable();
                let mut in_test = vec![false; n_rows];
                for &r in &test {
                    in_test[r] = true;
                }
                let train = (0..n_rows).filter(|&r| !in_test[r]).collect();
                Fold { train, test }
            })
            .collect();
        SplitIndices { folds }
    }
}

fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

/// Shuffled K-fold partition; fold sizes differ by at most one.
pub fn kfold_split(n_rows: usize, k: usize, seed: u64) -> Result<SplitIndices> {
    if k < 2 || k > n_rows {
        return Err(IqaError::InvalidFoldCount { k, n_rows });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = shuffled(n_rows, &mut rng);
    let (base, extra) = (n_rows / k, n_rows % k);
    let mut tests = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        tests.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(SplitIndices::from_test_sets(n_rows, tests))
}

/// K-fold partition that deals each class round-robin over the folds, so
/// every test fold sees both classes whenever each class has ≥ k members.
pub fn stratified_kfold_split(labels: &[bool], k: usize, seed: u64) -> Result<SplitIndices> {
    let n_rows = labels.len();
    if k < 2 || k > n_rows {
        return Err(IqaError::InvalidFoldCount { k, n_rows });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = shuffled(n_rows, &mut rng);
    let mut tests = vec![Vec::new(); k];
    let mut slot = 0;
    for class in [true, false] {
        for &r in order.iter().filter(|&&r| labels[r] == class) {
            tests[slot % k].push(r);
            slot += 1;
        }
    }
    Ok(SplitIndices::from_test_sets(n_rows, tests))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(names: &[&str], rows: &[&[&str]]) -> RawTable {
        let text = std::iter::once(names.join(","))
            .chain(rows.iter().map(|r| r.join(",")))
            .collect::<Vec<_>>()
            .join("\n");
        read_raw_csv_from(text.as_bytes(), &CsvOptions::default()).unwrap()
    }

    #[test]
    fn binary_by_frequency() {
        let c = Column::from_values("b", vec![0., 0., 0., 0., 0., 1., 1., 1., 1., 1.]);
        assert_eq!(infer_kind(&c), ColumnKind::Binary);
    }

    #[test]
    fn unique_reals_are_continuous() {
        let c = Column::from_values("x", (0..1000).map(|i| i as f64 * 0.37).collect());
        assert_eq!(infer_kind(&c), ColumnKind::Continuous);
    }

    #[test]
    fn rule_of_five_violation() {
        let mut v = vec![1.0; 5];
        v.extend([2.0; 5]);
        v.extend([3.0; 4]);
        let c = Column::from_values("x", v.clone());
        assert_eq!(infer_kind(&c), ColumnKind::Continuous);
        v.push(3.0);
        assert_eq!(infer_kind(&Column::from_values("x", v)), ColumnKind::Discrete);
    }

    #[test]
    fn constant_and_all_missing() {
        let c = Column::from_values("c", vec![4.0; 6]);
        assert_eq!(infer_kind(&c), ColumnKind::Discrete);
        let m = Column::from_options("m", &[None, None]);
        assert_eq!(infer_kind(&m), ColumnKind::Continuous);
    }

    #[test]
    fn label_encoding_first_appearance() {
        let r = raw(&["s", "n"], &[&["b", "1"], &["a", "2"], &["b", "3"], &["?", "4"]]);
        let t = label_encode(&r, &BTreeMap::new()).unwrap();
        let s = t.column("s").unwrap();
        assert_eq!(&s.values[..3], &[0.0, 1.0, 0.0]);
        assert!(s.mask[3]);
        assert_eq!(s.labels.as_deref(), Some(&["b".to_string(), "a".to_string()][..]));
        let n = t.column("n").unwrap();
        assert_eq!(n.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(n.labels.is_none());
    }

    #[test]
    fn mixed_column_is_parse_error() {
        let r = raw(&["x"], &[&["1"], &["abc"], &["3"]]);
        match label_encode(&r, &BTreeMap::new()) {
            Err(IqaError::Parse { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (1, "x", "abc"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn header_only_file() {
        let r = raw(&["a", "b"], &[]);
        let t = label_encode(&r, &BTreeMap::new()).unwrap();
        assert_eq!(t.n_rows(), 0);
        assert_eq!(t.n_cols(), 2);
        assert!(missing_fraction(t.column("a").unwrap()).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let text = "a,b\n1,2\n3\n";
        let err = read_raw_csv_from(text.as_bytes(), &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, IqaError::RaggedRows { row: 1, .. }));
    }

    #[test]
    fn fully_masked_fraction() {
        let c = Column::from_options("m", &[None; 10]);
        assert_eq!(missing_fraction(&c).unwrap(), 1.0);
        assert_eq!(completeness(&c).unwrap(), 0.0);
    }

    #[test]
    fn mcar_rate_zero_is_identity() {
        let t = Table::new(vec![Column::from_values("a", vec![1.0; 50])]).unwrap();
        assert_eq!(inject_mcar(&t, 0.0, 3, &[]).unwrap(), t);
    }

    #[test]
    fn mcar_half_rate_concentration() {
        let t = Table::new(vec![Column::from_values("a", vec![1.0; 10_000])]).unwrap();
        let a = inject_mcar(&t, 0.5, 11, &[]).unwrap();
        let frac = a.overall_missing_fraction();
        assert!((0.48..=0.52).contains(&frac), "{frac}");
        assert_eq!(a, inject_mcar(&t, 0.5, 11, &[]).unwrap());
    }

    #[test]
    fn mcar_respects_protection_and_prior_mask() {
        let t = Table::new(vec![
            Column::from_options("a", &[None, Some(1.0), Some(2.0), Some(3.0)]),
            Column::from_values("p", vec![1.0; 4]),
        ])
        .unwrap();
        let out = inject_mcar(&t, 0.99, 5, &["p"]).unwrap();
        assert!(out.column("a").unwrap().mask[0]);
        assert_eq!(out.column("p").unwrap().n_missing(), 0);
    }

    #[test]
    fn kfold_sizes() {
        let s = kfold_split(10, 5, 1).unwrap();
        assert!(s.folds.iter().all(|f| f.test.len() == 2));
        let mut sizes: Vec<usize> = kfold_split(7, 5, 1)
            .unwrap()
            .folds
            .iter()
            .map(|f| f.test.len())
            .collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 2, 2]);
        assert!(matches!(
            kfold_split(10, 1, 0),
            Err(IqaError::InvalidFoldCount { .. })
        ));
        assert!(kfold_split(3, 4, 0).is_err());
    }

    #[test]
    fn stratified_folds_hold_both_classes() {
        let labels: Vec<bool> = (0..60).map(|i| i % 6 == 0).collect();
        let s = stratified_kfold_split(&labels, 5, 9).unwrap();
        for f in &s.folds {
            assert!(f.test.iter().any(|&r| labels[r]));
            assert!(f.test.iter().any(|&r| !labels[r]));
        }
    }

    #[test]
    fn write_csv_decodes_labels() {
        let r = raw(&["s", "x"], &[&["yes", "1.5"], &["no", "?"]]);
        let t = label_encode(&r, &BTreeMap::new()).unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "s,x\nyes,1.5\nno,\n");
    }
}
