//! Rank matrices, partial rank matrices, and the profile text format.
//!
//! A profile of `n` ballots over `m` candidates is stored as an n×m grid,
//! one ballot per row, most preferred candidate in column 0. Partial
//! matrices additionally allow null entries; a null cell is stored as the
//! sentinel id `m`, which keeps the grid branch-free. Cell mutation is not
//! exposed here: in-algorithm edits go through the score cache so that
//! cached bounds can never go stale.

use std::fmt;

use crate::error::{Error, Result};

/// A candidate, identified by a dense index local to one election.
/// Display names live on [`Profile`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate(u32);

impl Candidate {
    pub fn new(id: u32) -> Self {
        Candidate(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Address of one matrix entry, 0-indexed.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CellIndex {
    pub voter: usize,
    pub position: usize,
}

impl CellIndex {
    pub fn new(voter: usize, position: usize) -> Self {
        CellIndex { voter, position }
    }
}

/// An n×m grid of candidate-or-null cells where no candidate repeats
/// within a row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialRankMatrix {
    n: usize,
    m: usize,
    /// Row-major; `m` is the null sentinel.
    cells: Vec<u32>,
}

impl PartialRankMatrix {
    /// The fully null matrix.
    pub fn empty(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Dimension(format!(
                "matrix must have n >= 1 and m >= 1, got {n}x{m}"
            )));
        }
        Ok(PartialRankMatrix {
            n,
            m,
            cells: vec![m as u32; n * m],
        })
    }

    /// Build from explicit rows of `Some(candidate)` / `None` entries.
    pub fn from_rows(rows: &[Vec<Option<Candidate>>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut out = Self::empty(n, m)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (j, cell) in row.iter().enumerate() {
                if let Some(c) = cell {
                    out.place(i, j, *c)?;
                }
            }
        }
        Ok(out)
    }

    /// Build an otherwise-null matrix with the given cells locked.
    pub fn from_cells(n: usize, m: usize, locked: &[(usize, usize, Candidate)]) -> Result<Self> {
        let mut out = Self::empty(n, m)?;
        for &(i, j, c) in locked {
            out.place(i, j, c)?;
        }
        Ok(out)
    }

    fn place(&mut self, i: usize, j: usize, c: Candidate) -> Result<()> {
        if i >= self.n || j >= self.m {
            return Err(Error::Dimension(format!(
                "cell ({i},{j}) outside {}x{} matrix",
                self.n, self.m
            )));
        }
        if c.index() >= self.m {
            return Err(Error::Dimension(format!(
                "candidate {} outside 0..{}",
                c.id(),
                self.m
            )));
        }
        if self.cell_raw(i, j) != self.m as u32 {
            return Err(Error::IllegalMutation(format!(
                "cell ({i},{j}) is already locked"
            )));
        }
        if self.row_contains(i, c.id()) {
            return Err(Error::IllegalMutation(format!(
                "candidate {} appears twice in row {i}",
                c.id()
            )));
        }
        self.set_cell_raw(i, j, c.id());
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, cell: CellIndex) -> Option<Candidate> {
        let v = self.cell_raw(cell.voter, cell.position);
        (v != self.m as u32).then_some(Candidate(v))
    }

    /// Number of non-null cells.
    pub fn size(&self) -> usize {
        let null = self.m as u32;
        self.cells.iter().filter(|&&v| v != null).count()
    }

    pub fn is_complete(&self) -> bool {
        let null = self.m as u32;
        self.cells.iter().all(|&v| v != null)
    }

    /// Locked cells in row-major order.
    pub fn locked_cells(&self) -> Vec<(CellIndex, Candidate)> {
        let null = self.m as u32;
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.m {
                let v = self.cell_raw(i, j);
                if v != null {
                    out.push((CellIndex::new(i, j), Candidate(v)));
                }
            }
        }
        out
    }

    /// Locked-cell count of one row.
    pub fn row_locked(&self, voter: usize) -> usize {
        let null = self.m as u32;
        self.row_raw(voter).iter().filter(|&&v| v != null).count()
    }

    /// Null count of one row.
    pub fn row_nulls(&self, voter: usize) -> usize {
        self.m - self.row_locked(voter)
    }

    pub fn to_rows(&self) -> Vec<Vec<Option<Candidate>>> {
        (0..self.n)
            .map(|i| {
                (0..self.m)
                    .map(|j| self.get(CellIndex::new(i, j)))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.m);
        i * self.m + j
    }

    pub(crate) fn cell_raw(&self, i: usize, j: usize) -> u32 {
        self.cells[self.idx(i, j)]
    }

    pub(crate) fn set_cell_raw(&mut self, i: usize, j: usize, v: u32) {
        let k = self.idx(i, j);
        self.cells[k] = v;
    }

    pub(crate) fn row_raw(&self, i: usize) -> &[u32] {
        &self.cells[i * self.m..(i + 1) * self.m]
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.cells
    }

    pub(crate) fn null_id(&self) -> u32 {
        self.m as u32
    }

    pub(crate) fn row_contains(&self, i: usize, cand_id: u32) -> bool {
        self.row_raw(i).contains(&cand_id)
    }
}

impl fmt::Debug for PartialRankMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} [", self.n, self.m)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.m {
                let v = self.cell_raw(i, j);
                if v == self.m as u32 {
                    write!(f, "  .")?;
                } else {
                    write!(f, " {v:2}")?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// True iff every non-null cell of `base` holds the same candidate in
/// `ext`, i.e. `ext` extends `base`.
pub fn is_extension(base: &PartialRankMatrix, ext: &PartialRankMatrix) -> Result<bool> {
    if base.n != ext.n || base.m != ext.m {
        return Err(Error::Dimension(format!(
            "cannot compare {}x{} against {}x{}",
            base.n, base.m, ext.n, ext.m
        )));
    }
    let null = base.m as u32;
    Ok(base
        .cells
        .iter()
        .zip(&ext.cells)
        .all(|(&b, &e)| b == null || b == e))
}

/// The partial matrix that is null exactly on the non-null cells of `part`
/// and agrees with `full` elsewhere. Requires `part ⊆ full`.
pub fn complement(full: &RankMatrix, part: &PartialRankMatrix) -> Result<PartialRankMatrix> {
    if !is_extension(part, full.as_partial())? {
        return Err(Error::Precondition(
            "complement requires the partial matrix to be contained in the full one".into(),
        ));
    }
    let m = full.m();
    let null = m as u32;
    let mut out = full.to_partial();
    for k in 0..out.cells.len() {
        if part.cells[k] != null {
            out.cells[k] = null;
        }
    }
    Ok(out)
}

/// A complete rank matrix: every row is a permutation of the candidates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RankMatrix(PartialRankMatrix);

impl RankMatrix {
    pub fn from_rows(rows: &[Vec<Candidate>]) -> Result<Self> {
        let wrapped: Vec<Vec<Option<Candidate>>> = rows
            .iter()
            .map(|r| r.iter().copied().map(Some).collect())
            .collect();
        Self::from_partial(PartialRankMatrix::from_rows(&wrapped)?)
    }

    /// Promote a partial matrix; fails unless it is complete.
    pub fn from_partial(p: PartialRankMatrix) -> Result<Self> {
        if !p.is_complete() {
            return Err(Error::Precondition(format!(
                "matrix has {} null cells, a rank matrix must be complete",
                p.n * p.m - p.size()
            )));
        }
        Ok(RankMatrix(p))
    }

    pub fn as_partial(&self) -> &PartialRankMatrix {
        &self.0
    }

    pub fn to_partial(&self) -> PartialRankMatrix {
        self.0.clone()
    }

    pub fn candidate_at(&self, cell: CellIndex) -> Candidate {
        self.0.get(cell).expect("rank matrix cell is never null")
    }

    /// One ballot, most preferred first.
    pub fn ballot(&self, voter: usize) -> Vec<Candidate> {
        self.0.row_raw(voter).iter().map(|&v| Candidate(v)).collect()
    }

    /// Position (0-indexed) of a candidate on a ballot.
    pub fn position_of(&self, voter: usize, c: Candidate) -> usize {
        self.0
            .row_raw(voter)
            .iter()
            .position(|&v| v == c.id())
            .expect("candidate missing from complete ballot")
    }
}

impl std::ops::Deref for RankMatrix {
    type Target = PartialRankMatrix;

    fn deref(&self) -> &PartialRankMatrix {
        &self.0
    }
}

impl fmt::Debug for RankMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A (possibly partial) matrix together with candidate display names.
///
/// Text format, UTF-8:
///
/// ```text
/// n m
/// name_1 ... name_m
/// <n ballot lines of m tokens, a token being a name or `-` for null>
/// ```
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Profile {
    names: Vec<String>,
    matrix: PartialRankMatrix,
}

impl Profile {
    pub fn new(names: Vec<String>, matrix: PartialRankMatrix) -> Result<Self> {
        if names.len() != matrix.m() {
            return Err(Error::Dimension(format!(
                "{} names for {} candidates",
                names.len(),
                matrix.m()
            )));
        }
        for (k, name) in names.iter().enumerate() {
            if name == "-" || name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::Parse {
                    line: 2,
                    message: format!("invalid candidate name {name:?}"),
                });
            }
            if names[..k].iter().any(|seen| seen == name) {
                return Err(Error::Parse {
                    line: 2,
                    message: format!("duplicate candidate name {name:?}"),
                });
            }
        }
        Ok(Profile { names, matrix })
    }

    pub fn parse(text: &str) -> Result<Self> {
        // Line numbers refer to non-empty lines, 1-based.
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let (header_line, header) = *lines.first().ok_or(Error::Parse {
            line: 1,
            message: "empty profile".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |tok: &str| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: header_line,
                message: format!("malformed header, expected `n m`, got {header:?}"),
            })
        };
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: header_line,
                message: format!("malformed header, expected `n m`, got {header:?}"),
            });
        }
        let n = parse_dim(dims[0])?;
        let m = parse_dim(dims[1])?;
        if n == 0 || m == 0 {
            return Err(Error::Parse {
                line: header_line,
                message: "n and m must both be at least 1".into(),
            });
        }
        if lines.len() != n + 2 {
            return Err(Error::Parse {
                line: header_line,
                message: format!("expected {} lines after the header, found {}", n + 1, lines.len() - 1),
            });
        }
        let (names_line, names_text) = lines[1];
        let names: Vec<String> = names_text.split_whitespace().map(str::to_owned).collect();
        if names.len() != m {
            return Err(Error::Parse {
                line: names_line,
                message: format!("expected {m} candidate names, found {}", names.len()),
            });
        }
        let mut matrix = PartialRankMatrix::empty(n, m)?;
        for i in 0..n {
            let (line_no, row_text) = lines[i + 2];
            let tokens: Vec<&str> = row_text.split_whitespace().collect();
            if tokens.len() != m {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("row has {} tokens, expected {m}", tokens.len()),
                });
            }
            for (j, tok) in tokens.iter().enumerate() {
                if *tok == "-" {
                    continue;
                }
                let id = names.iter().position(|nm| nm == tok).ok_or(Error::Parse {
                    line: line_no,
                    message: format!("unknown candidate token {tok:?}"),
                })? as u32;
                matrix.place(i, j, Candidate(id)).map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("candidate {tok:?} appears twice in the row"),
                })?;
            }
        }
        Profile::new(names, matrix)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n{}\n", self.matrix.n(), self.matrix.m(), self.names.join(" "));
        for i in 0..self.matrix.n() {
            let row: Vec<&str> = (0..self.matrix.m())
                .map(|j| match self.matrix.get(CellIndex::new(i, j)) {
                    Some(c) => self.names[c.index()].as_str(),
                    None => "-",
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, c: Candidate) -> &str {
        &self.names[c.index()]
    }

    pub fn candidate(&self, name: &str) -> Option<Candidate> {
        self.names
            .iter()
            .position(|nm| nm == name)
            .map(|k| Candidate(k as u32))
    }

    pub fn matrix(&self) -> &PartialRankMatrix {
        &self.matrix
    }

    pub fn into_parts(self) -> (Vec<String>, PartialRankMatrix) {
        (self.names, self.matrix)
    }

    /// The profile as a complete rank matrix; fails on any null cell.
    pub fn complete(&self) -> Result<RankMatrix> {
        RankMatrix::from_partial(self.matrix.clone())
    }

    /// `A`, `B`, ... for m <= 26, otherwise `c0`, `c1`, ...
    pub fn default_names(m: usize) -> Vec<String> {
        if m <= 26 {
            (0..m)
                .map(|k| char::from(b'A' + k as u8).to_string())
                .collect()
        } else {
            (0..m).map(|k| format!("c{k}")).collect()
        }
    }
}
