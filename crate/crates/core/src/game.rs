//! Finite two-player zero-sum games in normal form.
//!
//! `PayoffMatrix` stores the row player's payoffs; the column player receives
//! the negation of every entry. Mixed strategies are probability vectors over
//! pure strategies, and a `StrategyProfile` pairs one mixed strategy per
//! player. The functions here evaluate expected payoffs, pure best responses,
//! and the exploitability `epsilon_of_profile` of a profile, which is zero
//! exactly at a Nash equilibrium.

use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` accepted when constructing a mixed strategy.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Row-major payoff matrix for the row player of a zero-sum game.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    /// Builds a matrix from row-major entries. All entries must be finite and
    /// both dimensions positive.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "payoff matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "payoff entries must be finite, got {bad}"
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds a matrix from a vector of equally long rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".to_string(),
            ));
        }
        Self::new(n_rows, n_cols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Returns a copy grown by one row and one column. `new_row` has
    /// `cols() + 1` entries (its last entry is the new corner) and `new_col`
    /// has `rows()` entries, one per existing row. Existing entries are
    /// preserved bit for bit.
    pub fn augmented(&self, new_row: &[f64], new_col: &[f64]) -> Result<Self> {
        if new_row.len() != self.cols + 1 {
            return Err(Error::DimensionMismatch(format!(
                "new row must have {} entries, got {}",
                self.cols + 1,
                new_row.len()
            )));
        }
        if new_col.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "new column must have {} entries, got {}",
                self.rows,
                new_col.len()
            )));
        }
        let mut entries = Vec::with_capacity((self.rows + 1) * (self.cols + 1));
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.push(new_col[i]);
        }
        entries.extend_from_slice(new_row);
        Self::new(self.rows + 1, self.cols + 1, entries)
    }

    /// Extracts the submatrix restricted to the given row and column indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::InvalidArgument(format!("row index {i} out of range")));
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::InvalidArgument(format!("column index {j} out of range")));
        }
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j)))
            .collect();
        Self::new(rows.len(), cols.len(), entries)
    }

    /// Serializes to plain-text CSV, one line per row. Floats are written in
    /// shortest round-trip form, so parsing the output reproduces the matrix
    /// bit for bit.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV format written by [`PayoffMatrix::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|_| {
                        Error::Parse(format!(
                            "line {}: not a number: {field:?}",
                            line_no + 1
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("no matrix rows found".to_string()));
        }
        Self::from_rows(rows)
    }
}

/// Probability distribution over pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    /// Validates and renormalizes a probability vector. Entries must be
    /// non-negative and sum to 1 within [`PROB_SUM_TOLERANCE`]; the vector is
    /// renormalized exactly once, and sums outside tolerance are rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbability("empty strategy".to_string()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbability(format!(
                "probabilities must be finite and non-negative, got {bad}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidProbability(format!(
                "probabilities sum to {sum}, outside tolerance {PROB_SUM_TOLERANCE}"
            )));
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self { probs })
    }

    /// Accepts an already-normalized vector without renormalizing, so stored
    /// strategies round-trip bit-exactly. The sum must still be within
    /// tolerance of 1.
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbability("empty strategy".to_string()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidProbability(format!(
                "probabilities must be finite and non-negative, got {bad}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidProbability(format!(
                "probabilities sum to {sum}, outside tolerance {PROB_SUM_TOLERANCE}"
            )));
        }
        Ok(Self { probs })
    }

    /// Point mass on `index`.
    pub fn pure(index: usize, len: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::InvalidArgument(format!(
                "pure strategy index {index} out of range for {len} strategies"
            )));
        }
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Ok(Self { probs })
    }

    /// Uniform distribution over `len` strategies.
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidProbability("empty strategy".to_string()));
        }
        Ok(Self {
            probs: vec![1.0 / len as f64; len],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
}

impl StrategyProfile {
    pub fn new(row: MixedStrategy, col: MixedStrategy) -> Self {
        Self { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Row,
    Col,
}

fn check_dims(u: &PayoffMatrix, profile: &StrategyProfile) -> Result<()> {
    if profile.row.len() != u.rows() || profile.col.len() != u.cols() {
        return Err(Error::DimensionMismatch(format!(
            "profile is {}x{} but matrix is {}x{}",
            profile.row.len(),
            profile.col.len(),
            u.rows(),
            u.cols()
        )));
    }
    Ok(())
}

/// Row player's expected payoff under a profile. The column player's expected
/// payoff is the negation.
pub fn expected_payoff(u: &PayoffMatrix, profile: &StrategyProfile) -> Result<f64> {
    check_dims(u, profile)?;
    let q = profile.col.probs();
    let mut total = 0.0;
    for (i, &p) in profile.row.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let row_value: f64 = u.row(i).iter().zip(q).map(|(&a, &b)| a * b).sum();
        total += p * row_value;
    }
    Ok(total)
}

/// Pure strategy maximizing `player`'s expected payoff against the opponent
/// mixture, with its payoff. Ties resolve to the lowest index.
pub fn best_pure_response(
    u: &PayoffMatrix,
    opponent: &MixedStrategy,
    player: Player,
) -> Result<(usize, f64)> {
    let n = match player {
        Player::Row => {
            if opponent.len() != u.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "opponent mixture has {} entries but matrix has {} columns",
                    opponent.len(),
                    u.cols()
                )));
            }
            u.rows()
        }
        Player::Col => {
            if opponent.len() != u.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "opponent mixture has {} entries but matrix has {} rows",
                    opponent.len(),
                    u.rows()
                )));
            }
            u.cols()
        }
    };
    let payoff_of = |k: usize| -> f64 {
        match player {
            Player::Row => u
                .row(k)
                .iter()
                .zip(opponent.probs())
                .map(|(&a, &b)| a * b)
                .sum(),
            // The column player receives the negated entries.
            Player::Col => -opponent
                .probs()
                .iter()
                .enumerate()
                .map(|(i, &p)| p * u.get(i, k))
                .sum::<f64>(),
        }
    };
    let mut best = (0, payoff_of(0));
    for k in 1..n {
        let v = payoff_of(k);
        if v > best.1 {
            best = (k, v);
        }
    }
    Ok(best)
}

/// Largest gain any player can achieve by a unilateral pure deviation from
/// the profile. Zero exactly at a Nash equilibrium.
pub fn epsilon_of_profile(u: &PayoffMatrix, profile: &StrategyProfile) -> Result<f64> {
    check_dims(u, profile)?;
    let value = expected_payoff(u, profile)?;
    let (_, row_best) = best_pure_response(u, &profile.col, Player::Row)?;
    let (_, col_best) = best_pure_response(u, &profile.row, Player::Col)?;
    let eps = (row_best - value).max(col_best - (-value));
    // Mathematically non-negative; clamp float rounding of order 1e-16.
    Ok(eps.max(0.0))
}
