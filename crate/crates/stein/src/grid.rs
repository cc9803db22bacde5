//! Symbol arrays, partial transversals, and occurrence statistics.
//!
//! Coordinates and symbols are 1-based throughout, including the text format.

use std::collections::HashSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// A 1-based (row, column) coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub fn new(row: u32, col: u32) -> Self {
        Cell { row, col }
    }
}

/// An n×n array of symbols in `1..=m`, with an optional mask of forbidden
/// cells that carry no symbol. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    n: u32,
    m: u32,
    /// Row-major, 0 marks a forbidden cell.
    cells: Vec<u32>,
    forbidden_count: u64,
}

/// A set of cells with pairwise distinct rows, columns, and symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialTransversal {
    pub cells: Vec<Cell>,
}

impl PartialTransversal {
    pub fn new(cells: Vec<Cell>) -> Self {
        PartialTransversal { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Per-symbol totals and maximum row/column multiplicities, indexed by
/// symbol − 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceStats {
    pub totals: Vec<u64>,
    pub max_row_mult: Vec<u32>,
    pub max_col_mult: Vec<u32>,
}

impl OccurrenceStats {
    pub fn max_multiplicity(&self) -> u32 {
        self.max_row_mult
            .iter()
            .chain(&self.max_col_mult)
            .copied()
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GridError {
    #[error("equi-n-square is defined on full arrays but {0} cells are forbidden")]
    ForbiddenCellsPresent(u64),
    #[error("transversal is invalid for this grid")]
    InvalidTransversal,
    #[error("grid parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cell ({0}, {1}) out of range")]
    OutOfRange(u32, u32),
}

/// Incremental constructor for [`Grid`]; every cell must end up either set
/// or forbidden exactly once.
pub struct GridBuilder {
    n: u32,
    m: u32,
    cells: Vec<u32>,
    assigned: Vec<bool>,
    forbidden_count: u64,
}

impl GridBuilder {
    pub fn new(n: u32, m: u32) -> Self {
        assert!(n >= 1 && m >= 1);
        GridBuilder {
            n,
            m,
            cells: vec![0; n as usize * n as usize],
            assigned: vec![false; n as usize * n as usize],
            forbidden_count: 0,
        }
    }

    fn idx(&self, row: u32, col: u32) -> usize {
        assert!(
            (1..=self.n).contains(&row) && (1..=self.n).contains(&col),
            "cell ({row}, {col}) out of range for n = {}",
            self.n
        );
        (row as usize - 1) * self.n as usize + (col as usize - 1)
    }

    pub fn set(&mut self, row: u32, col: u32, symbol: u32) {
        assert!((1..=self.m).contains(&symbol), "symbol {symbol} out of range");
        let i = self.idx(row, col);
        assert!(!self.assigned[i], "cell ({row}, {col}) assigned twice");
        self.cells[i] = symbol;
        self.assigned[i] = true;
    }

    pub fn forbid(&mut self, row: u32, col: u32) {
        let i = self.idx(row, col);
        assert!(!self.assigned[i], "cell ({row}, {col}) assigned twice");
        self.assigned[i] = true;
        self.forbidden_count += 1;
    }

    pub fn is_assigned(&self, row: u32, col: u32) -> bool {
        self.assigned[self.idx(row, col)]
    }

    /// Finish construction; panics if any cell is still unassigned (callers
    /// fill exhaustively by design, a gap is a bug).
    pub fn finish(self) -> Grid {
        if let Some(i) = self.assigned.iter().position(|&a| !a) {
            let (r, c) = (i / self.n as usize + 1, i % self.n as usize + 1);
            panic!("cell ({r}, {c}) left unassigned");
        }
        Grid {
            n: self.n,
            m: self.m,
            cells: self.cells,
            forbidden_count: self.forbidden_count,
        }
    }
}

impl Grid {
    /// Build a full (mask-free) grid from 1-based symbol rows.
    pub fn from_rows(m: u32, rows: &[Vec<u32>]) -> Self {
        let n = rows.len() as u32;
        let mut b = GridBuilder::new(n, m);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len() as u32, n, "row {} has wrong length", r + 1);
            for (c, &s) in row.iter().enumerate() {
                b.set(r as u32 + 1, c as u32 + 1, s);
            }
        }
        b.finish()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn symbol_count(&self) -> u32 {
        self.m
    }

    pub fn forbidden_count(&self) -> u64 {
        self.forbidden_count
    }

    /// Symbol at a cell, or `None` if the cell is forbidden.
    pub fn symbol_at(&self, row: u32, col: u32) -> Option<u32> {
        let i = (row as usize - 1) * self.n as usize + (col as usize - 1);
        match self.cells[i] {
            0 => None,
            s => Some(s),
        }
    }

    pub fn is_forbidden(&self, row: u32, col: u32) -> bool {
        self.symbol_at(row, col).is_none()
    }

    pub fn in_range(&self, cell: Cell) -> bool {
        (1..=self.n).contains(&cell.row) && (1..=self.n).contains(&cell.col)
    }
}

/// True iff the grid is square over exactly `n` symbols each occurring
/// exactly `n` times.
pub fn is_equi_square(g: &Grid) -> Result<bool, GridError> {
    if g.forbidden_count() > 0 {
        return Err(GridError::ForbiddenCellsPresent(g.forbidden_count()));
    }
    if g.symbol_count() != g.n() {
        return Ok(false);
    }
    let mut counts = vec![0u64; g.symbol_count() as usize];
    for &s in &g.cells {
        counts[s as usize - 1] += 1;
    }
    Ok(counts.iter().all(|&c| c == g.n() as u64))
}

/// True iff rows, columns, and symbols are pairwise distinct and no cell is
/// forbidden or out of range.
pub fn validate_transversal(g: &Grid, t: &PartialTransversal) -> bool {
    let mut rows = HashSet::new();
    let mut cols = HashSet::new();
    let mut syms = HashSet::new();
    for &cell in &t.cells {
        if !g.in_range(cell) {
            return false;
        }
        let Some(s) = g.symbol_at(cell.row, cell.col) else {
            return false;
        };
        if !rows.insert(cell.row) || !cols.insert(cell.col) || !syms.insert(s) {
            return false;
        }
    }
    true
}

pub fn occurrence_stats(g: &Grid) -> OccurrenceStats {
    let m = g.symbol_count() as usize;
    let n = g.n() as usize;
    let mut totals = vec![0u64; m];
    let mut max_row = vec![0u32; m];
    let mut max_col = vec![0u32; m];
    let mut scratch = vec![0u32; m];
    let mut touched = Vec::new();

    for r in 0..n {
        for c in 0..n {
            let s = g.cells[r * n + c];
            if s == 0 {
                continue;
            }
            let s = s as usize - 1;
            totals[s] += 1;
            if scratch[s] == 0 {
                touched.push(s);
            }
            scratch[s] += 1;
        }
        for &s in &touched {
            max_row[s] = max_row[s].max(scratch[s]);
            scratch[s] = 0;
        }
        touched.clear();
    }
    for c in 0..n {
        for r in 0..n {
            let s = g.cells[r * n + c];
            if s == 0 {
                continue;
            }
            let s = s as usize - 1;
            if scratch[s] == 0 {
                touched.push(s);
            }
            scratch[s] += 1;
        }
        for &s in &touched {
            max_col[s] = max_col[s].max(scratch[s]);
            scratch[s] = 0;
        }
        touched.clear();
    }
    OccurrenceStats {
        totals,
        max_row_mult: max_row,
        max_col_mult: max_col,
    }
}

/// Symbols of `1..=m` not used by the transversal, ascending.
pub fn missed_symbols(g: &Grid, t: &PartialTransversal) -> Result<Vec<u32>, GridError> {
    if !validate_transversal(g, t) {
        return Err(GridError::InvalidTransversal);
    }
    let used: HashSet<u32> = t
        .cells
        .iter()
        .map(|c| g.symbol_at(c.row, c.col).unwrap())
        .collect();
    Ok((1..=g.symbol_count()).filter(|s| !used.contains(s)).collect())
}

impl Grid {
    /// Canonical text serialization: `n m` header, then n rows of n tokens
    /// (`*` for forbidden cells), single spaces, LF endings.
    pub fn to_text(&self) -> String {
        let n = self.n as usize;
        let mut out = String::with_capacity(n * n * 3 + 16);
        self.write_text(&mut out).expect("writing to a String");
        out
    }

    /// Stream the canonical text form without materializing it; large grids
    /// are written (or hashed) row by row.
    pub fn write_text(&self, out: &mut impl Write) -> std::fmt::Result {
        let n = self.n as usize;
        writeln!(out, "{} {}", self.n, self.m)?;
        let mut row = String::with_capacity(n * 3 + 1);
        for r in 0..n {
            row.clear();
            for c in 0..n {
                if c > 0 {
                    row.push(' ');
                }
                match self.cells[r * n + c] {
                    0 => row.push('*'),
                    s => write!(row, "{s}")?,
                }
            }
            row.push('\n');
            out.write_str(&row)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Grid, GridError> {
        let err = |line: usize, msg: String| GridError::Parse { line, msg };
        let mut lines = text.split('\n');
        let header = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
        let mut it = header.split_whitespace();
        let n: u32 = it
            .next()
            .and_then(|tok| tok.parse().ok())
            .ok_or_else(|| err(1, "expected `n m` header".into()))?;
        let m: u32 = it
            .next()
            .and_then(|tok| tok.parse().ok())
            .ok_or_else(|| err(1, "expected `n m` header".into()))?;
        if it.next().is_some() {
            return Err(err(1, "trailing tokens in header".into()));
        }
        if n == 0 || m == 0 {
            return Err(err(1, "n and m must be positive".into()));
        }
        let mut b = GridBuilder::new(n, m);
        for r in 1..=n {
            let line = lines
                .next()
                .ok_or_else(|| err(r as usize + 1, format!("missing row {r}")))?;
            let mut c = 0u32;
            for tok in line.split_whitespace() {
                c += 1;
                if c > n {
                    return Err(err(r as usize + 1, format!("row {r} has more than {n} tokens")));
                }
                if tok == "*" {
                    b.forbid(r, c);
                } else {
                    let s: u32 = tok.parse().map_err(|_| {
                        err(r as usize + 1, format!("bad symbol token `{tok}`"))
                    })?;
                    if !(1..=m).contains(&s) {
                        return Err(err(
                            r as usize + 1,
                            format!("symbol {s} out of range 1..={m}"),
                        ));
                    }
                    b.set(r, c, s);
                }
            }
            if c != n {
                return Err(err(r as usize + 1, format!("row {r} has {c} tokens, expected {n}")));
            }
        }
        for (off, line) in lines.enumerate() {
            if !line.trim().is_empty() {
                return Err(err(n as usize + 2 + off, "trailing content after grid".into()));
            }
        }
        Ok(b.finish())
    }
}

/// The cyclic addition-table square: `cell(i,j) = ((i+j−2) mod n) + 1`.
/// A Latin square, hence an equi-n-square; handy in tests.
pub fn cyclic_square(n: u32) -> Grid {
    let rows: Vec<Vec<u32>> = (1..=n)
        .map(|i| (1..=n).map(|j| (i + j - 2) % n + 1).collect())
        .collect();
    Grid::from_rows(n, &rows)
}
