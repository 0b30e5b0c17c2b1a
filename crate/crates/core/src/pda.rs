//! Placement delivery arrays: the grid model, brute-force verification of
//! the three defining rules, parameter extraction and star-row queries.
//!
//! Rows and columns are 0-based indices everywhere in the API. Codes are
//! dense 1-based integers, as in the text format.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

/// One cell of a PDA.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Star,
    /// 1-based code id.
    Code(u32),
}

impl Entry {
    pub fn is_star(self) -> bool {
        matches!(self, Entry::Star)
    }

    pub fn code(self) -> Option<u32> {
        match self {
            Entry::Star => None,
            Entry::Code(s) => Some(s),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => f.write_str("*"),
            Entry::Code(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdaError {
    #[error("array must have at least one row and one column")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("code {code} at row {row}, col {col} is outside [1:{codes}]")]
    CodeOutOfRange {
        code: u32,
        row: usize,
        col: usize,
        codes: u32,
    },
    #[error("code count must be at least 1")]
    NoCodes,
    #[error("column {col} has {found} stars but column 0 has {expected}")]
    UnequalColumns {
        col: usize,
        expected: usize,
        found: usize,
    },
}

/// An `F x K` array of stars and codes in `[1:S]`.
///
/// Construction only enforces the structural shape (rectangular, codes in
/// range). Whether the array satisfies the PDA rules is answered by
/// [`Pda::verify`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pda {
    rows: usize,
    cols: usize,
    codes: u32,
    cells: Vec<Entry>,
}

impl Pda {
    /// Builds an array from row-major cells.
    pub fn new(rows: usize, cols: usize, codes: u32, cells: Vec<Entry>) -> Result<Self, PdaError> {
        if rows == 0 || cols == 0 {
            return Err(PdaError::Empty);
        }
        if codes == 0 {
            return Err(PdaError::NoCodes);
        }
        if cells.len() != rows * cols {
            return Err(PdaError::Ragged {
                row: cells.len() / cols,
                expected: cols,
                found: cells.len() % cols,
            });
        }
        for (idx, e) in cells.iter().enumerate() {
            if let Entry::Code(s) = *e {
                if s == 0 || s > codes {
                    return Err(PdaError::CodeOutOfRange {
                        code: s,
                        row: idx / cols,
                        col: idx % cols,
                        codes,
                    });
                }
            }
        }
        Ok(Pda {
            rows,
            cols,
            codes,
            cells,
        })
    }

    pub fn from_rows(rows: &[Vec<Entry>], codes: u32) -> Result<Self, PdaError> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if width == 0 {
            return Err(PdaError::Empty);
        }
        for (j, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(PdaError::Ragged {
                    row: j,
                    expected: width,
                    found: r.len(),
                });
            }
        }
        let cells = rows.iter().flatten().copied().collect();
        Pda::new(rows.len(), width, codes, cells)
    }

    /// Builds an array from rows where `0` stands for a star.
    /// `S` is taken as the largest code present.
    pub fn from_code_rows(rows: &[&[u32]]) -> Result<Self, PdaError> {
        let entries: Vec<Vec<Entry>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&c| if c == 0 { Entry::Star } else { Entry::Code(c) })
                    .collect()
            })
            .collect();
        let codes = rows
            .iter()
            .flat_map(|r| r.iter())
            .copied()
            .max()
            .unwrap_or(0);
        Pda::from_rows(&entries, codes)
    }

    /// Subpacketization `F`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of users `K`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of codes `S`.
    pub fn codes(&self) -> u32 {
        self.codes
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        self.cells[row * self.cols + col]
    }

    pub fn cells(&self) -> &[Entry] {
        &self.cells
    }

    pub fn row(&self, row: usize) -> &[Entry] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn column_star_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for (idx, e) in self.cells.iter().enumerate() {
            if e.is_star() {
                counts[idx % self.cols] += 1;
            }
        }
        counts
    }

    pub fn row_star_counts(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|j| self.row(j).iter().filter(|e| e.is_star()).count())
            .collect()
    }

    /// Positions of every code, indexed by `s - 1`, each list in row-major order.
    pub fn occurrences(&self) -> Vec<Vec<(usize, usize)>> {
        let mut occ = vec![Vec::new(); self.codes as usize];
        for (idx, e) in self.cells.iter().enumerate() {
            if let Entry::Code(s) = *e {
                occ[s as usize - 1].push((idx / self.cols, idx % self.cols));
            }
        }
        occ
    }

    /// Occurrence counts indexed by `s - 1`.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut mult = vec![0; self.codes as usize];
        for e in &self.cells {
            if let Entry::Code(s) = *e {
                mult[s as usize - 1] += 1;
            }
        }
        mult
    }

    /// `Z`, if every column has the same number of stars.
    pub fn stars_per_column(&self) -> Result<usize, PdaError> {
        let counts = self.column_star_counts();
        let z = counts[0];
        match counts.iter().position(|&c| c != z) {
            Some(col) => Err(PdaError::UnequalColumns {
                col,
                expected: z,
                found: counts[col],
            }),
            None => Ok(z),
        }
    }

    /// Checks C1 (equal column star counts), C2 (every code present) and
    /// C3 (equal codes sit on the diagonal of an otherwise-star 2x2 subarray).
    pub fn verify(&self) -> CheckReport {
        let mut violations = Vec::new();

        let counts = self.column_star_counts();
        for (col, &c) in counts.iter().enumerate().skip(1) {
            if c != counts[0] {
                violations.push(Violation {
                    rule: Rule::C1,
                    row: None,
                    col: Some(col),
                    row2: None,
                    col2: Some(0),
                    msg: format!("column {col} has {c} stars, column 0 has {}", counts[0]),
                });
            }
        }

        let occ = self.occurrences();
        for (idx, list) in occ.iter().enumerate() {
            if list.is_empty() {
                violations.push(Violation {
                    rule: Rule::C2,
                    row: None,
                    col: None,
                    row2: None,
                    col2: None,
                    msg: format!("code {} never occurs", idx + 1),
                });
            }
        }

        // Pairwise over occurrences of the same code only.
        for (idx, list) in occ.iter().enumerate() {
            let s = idx + 1;
            for (a, &(j1, k1)) in list.iter().enumerate() {
                for &(j2, k2) in &list[a + 1..] {
                    let msg = if j1 == j2 {
                        Some(format!("code {s} repeats in row {j1}"))
                    } else if k1 == k2 {
                        Some(format!("code {s} repeats in column {k1}"))
                    } else if !self.get(j1, k2).is_star() || !self.get(j2, k1).is_star() {
                        Some(format!(
                            "code {s} at ({j1},{k1}) and ({j2},{k2}) needs stars at ({j1},{k2}) and ({j2},{k1})"
                        ))
                    } else {
                        None
                    };
                    if let Some(msg) = msg {
                        violations.push(Violation {
                            rule: Rule::C3,
                            row: Some(j1),
                            col: Some(k1),
                            row2: Some(j2),
                            col2: Some(k2),
                            msg,
                        });
                    }
                }
            }
        }

        CheckReport::from_violations(violations)
    }

    /// Exact parameters of a PDA whose columns share one star count.
    pub fn params(&self) -> Result<PdaParams, PdaError> {
        let z = self.stars_per_column()?;
        let k = self.cols as u64;
        let f = self.rows as u64;
        let s = self.codes as u64;
        let mult = self.multiplicities();
        let regularity = if mult.iter().all(|&g| g == mult[0]) {
            Some(mult[0] as u64)
        } else {
            None
        };
        Ok(PdaParams {
            users: k,
            subpacketization: f,
            stars_per_column: z as u64,
            codes: s,
            memory_ratio: Ratio::new(z as u64, f),
            load: Ratio::new(s, f),
            regularity,
            mean_gain: Ratio::new(k * (f - z as u64), s),
        })
    }

    /// Rows `i` such that every column containing `s` has a star in row `i`.
    pub fn star_rows_for(&self, s: u32) -> Vec<usize> {
        let cols: Vec<usize> = (0..self.cols)
            .filter(|&k| (0..self.rows).any(|j| self.get(j, k) == Entry::Code(s)))
            .collect();
        (0..self.rows)
            .filter(|&i| cols.iter().all(|&k| self.get(i, k).is_star()))
            .collect()
    }

    /// Every row has the same number of stars.
    pub fn check_condition2(&self) -> bool {
        let counts = self.row_star_counts();
        counts.iter().all(|&c| c == counts[0])
    }
}

/// Checks a raw grid against the PDA rules with a claimed code count.
///
/// Shape problems (empty or ragged grid, codes outside `[1:s_claim]`) are
/// structural errors, not rule violations.
pub fn verify_grid(grid: &[Vec<Entry>], s_claim: u32) -> Result<CheckReport, PdaError> {
    Ok(Pda::from_rows(grid, s_claim)?.verify())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PdaParams {
    pub users: u64,
    pub subpacketization: u64,
    pub stars_per_column: u64,
    pub codes: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub memory_ratio: Ratio<u64>,
    #[serde(serialize_with = "ser_ratio")]
    pub load: Ratio<u64>,
    pub regularity: Option<u64>,
    #[serde(serialize_with = "ser_ratio")]
    pub mean_gain: Ratio<u64>,
}

impl PdaParams {
    /// `(K, F, Z, S)`.
    pub fn tuple(&self) -> (u64, u64, u64, u64) {
        (
            self.users,
            self.subpacketization,
            self.stars_per_column,
            self.codes,
        )
    }
}

impl fmt::Display for PdaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, ff, z, s) = self.tuple();
        match self.regularity {
            Some(g) => write!(f, "{g}-({k},{ff},{z},{s})")?,
            None => write!(f, "({k},{ff},{z},{s})")?,
        }
        write!(f, " memory {} load {}", self.memory_ratio, self.load)
    }
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&r.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    C1,
    C2,
    C3,
    Cond1,
    Cond2,
}

/// One failed rule, with the grid coordinates (0-based) that reproduce it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub row: Option<usize>,
    pub col: Option<usize>,
    pub row2: Option<usize>,
    pub col2: Option<usize>,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        CheckReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.violations.iter().filter(|v| v.rule == rule).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Assigns dense 1-based ids to labels in order of first appearance.
/// Returns the cells and the label of each id.
pub(crate) fn dense_relabel<L: Ord + Clone>(
    rows: usize,
    cols: usize,
    labels: Vec<Option<L>>,
) -> (Vec<Entry>, Vec<L>) {
    let mut ids: BTreeMap<L, u32> = BTreeMap::new();
    let mut order = Vec::new();
    let mut cells = Vec::with_capacity(rows * cols);
    for label in labels {
        match label {
            None => cells.push(Entry::Star),
            Some(l) => {
                let next = ids.len() as u32 + 1;
                let id = *ids.entry(l.clone()).or_insert_with(|| {
                    order.push(l);
                    next
                });
                cells.push(Entry::Code(id));
            }
        }
    }
    (cells, order)
}
