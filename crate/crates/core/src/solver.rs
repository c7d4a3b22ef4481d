//! Exact solving of zero-sum matrix games by linear programming.
//!
//! The game with row-player payoffs `U` is normalized by shifting all entries
//! to be at least 1, then reduced to the standard LP pair: minimize `1'x`
//! subject to `U'x >= 1, x >= 0` for the row player, whose dual is maximize
//! `1'y` subject to `U y <= 1, y >= 0` for the column player. One dense
//! simplex run over the column problem yields both: the primal basic solution
//! gives the column strategy and the duals under the slack columns give the
//! row strategy. The mixed strategies are the normalized vectors and the game
//! value is `1 / sum - shift`.
//!
//! Training matrices are hostile to textbook pivoting rules. Saturated
//! classifiers score identically against whole blocks of generators, so the
//! LP has large degenerate faces with exact ties, and near-parallel strategy
//! rows make many bases on those faces near-singular, turning reduced costs
//! into noise; index-based rules then walk in circles. The defenses, in
//! order: a Harris-style two-pass ratio test that picks the largest eligible
//! pivot element (stability over index order); periodic exact rebuilds of the
//! tableau from the input data; and, when a run still stalls, a retry with a
//! tiny deterministic right-hand-side perturbation, which splits the exact
//! ties and restores strict objective progress. Whatever path terminates, the
//! solution is read off the unperturbed data and accepted only if its exact
//! equilibrium gap on the original matrix is negligible, so no fallback can
//! smuggle out a bad answer.

use crate::error::{Error, Result};
use crate::game::{epsilon_of_profile, MixedStrategy, PayoffMatrix, StrategyProfile};

/// Optimality tolerance on reduced costs.
const OPT_TOL: f64 = 1e-9;
/// Smallest pivot magnitude accepted during the ratio test. Dividing a row by
/// anything smaller amplifies rounding noise past recovery.
const PIVOT_TOL: f64 = 1e-9;
/// Worst leftover reduced cost accepted when an improving column fails the
/// ratio test even on a freshly refactorized tableau; see `run_simplex`.
const DRIFT_TOL: f64 = 1e-6;
/// Feasibility slack in the first Harris pass: rows may overshoot their bound
/// by this much so that near-ties are resolved by pivot magnitude instead.
const FEAS_TOL: f64 = 1e-9;
/// Equilibrium gap under which a terminal basis's solution is accepted.
/// Matches the conditioning floor of near-degenerate training matrices;
/// cleanly solved games come out orders of magnitude below it.
const CERTIFY_TOL: f64 = 1e-6;
/// Pivots without objective progress before the incumbent basis is checked
/// for early acceptance.
const STALL_WINDOW: usize = 512;
/// Stall checks that may fail before the attempt is abandoned to a retry.
const MAX_STALL_CHECKS: usize = 8;
/// Objective gain that counts as progress for stall detection.
const PROGRESS_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;
/// Pivots between preventive refactorizations.
const REFRESH_EVERY: usize = 64;
/// Retries with perturbed right-hand sides after the clean attempt fails.
const MAX_RETRIES: usize = 3;
/// Relative scale of the first retry's right-hand-side perturbation.
const PERTURB_BASE: f64 = 1e-9;

/// Equilibrium of a zero-sum matrix game.
#[derive(Debug, Clone)]
pub struct GameSolution {
    pub row_strategy: MixedStrategy,
    pub col_strategy: MixedStrategy,
    /// Expected payoff to the row player under the equilibrium profile.
    pub value: f64,
}

impl GameSolution {
    pub fn profile(&self) -> StrategyProfile {
        StrategyProfile::new(self.row_strategy.clone(), self.col_strategy.clone())
    }
}

/// Solves the zero-sum game with row payoffs `u`, maximizing for the row
/// player. Returns an exact equilibrium up to simplex tolerances.
pub fn solve_zero_sum(u: &PayoffMatrix) -> Result<GameSolution> {
    let (m, n) = (u.rows(), u.cols());
    if m == 1 && n == 1 {
        return Ok(GameSolution {
            row_strategy: MixedStrategy::pure(0, 1)?,
            col_strategy: MixedStrategy::pure(0, 1)?,
            value: u.get(0, 0),
        });
    }

    let min_entry = u
        .entries()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let shift = if min_entry < 1.0 { 1.0 - min_entry } else { 0.0 };

    // First attempt on the exact data; retries split degenerate ties with a
    // scaled-up deterministic rhs perturbation. The terminal basis of every
    // attempt is verified on the unperturbed matrix before it is accepted.
    let mut last_err: Option<Error> = None;
    for attempt in 0..=MAX_RETRIES {
        let b = perturbed_rhs(m, attempt);
        match run_simplex(u, shift, &b) {
            Ok(basis) => match certify(u, shift, &basis) {
                Ok(solution) => return Ok(solution),
                Err(e) => last_err = Some(e),
            },
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one attempt ran"))
}

/// Right-hand side for the given attempt: exact ones first, then ones plus a
/// deterministic perturbation growing 32-fold per retry. Distinct components
/// make degenerate vertices split into strictly improving steps.
fn perturbed_rhs(m: usize, attempt: usize) -> Vec<f64> {
    if attempt == 0 {
        return vec![1.0; m];
    }
    let mut scale = PERTURB_BASE;
    for _ in 1..attempt {
        scale *= 32.0;
    }
    (0..m)
        .map(|i| {
            // splitmix64 finalizer over (attempt, i); avoids structured
            // patterns that could re-align with the degeneracy being split.
            let mut h = (attempt as u64) << 32 | i as u64;
            h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            h ^= h >> 31;
            // Map to [0.5, 1.5) so every component moves by a distinct amount.
            1.0 + scale * (0.5 + (h >> 11) as f64 / 9_007_199_254_740_992.0)
        })
        .collect()
}

/// Extracts the basis's solution on the unperturbed data and accepts it only
/// if no pure strategy improves on it by more than `CERTIFY_TOL`. The check
/// runs directly against the original matrix, so no numerical shortcut taken
/// during pivoting can smuggle out a bad answer.
fn certify(u: &PayoffMatrix, shift: f64, basis: &[usize]) -> Result<GameSolution> {
    let solution = extract(u, shift, basis)?;
    let eps = epsilon_of_profile(u, &solution.profile())?;
    if eps <= CERTIFY_TOL {
        Ok(solution)
    } else {
        Err(Error::Numerical(format!(
            "simplex terminal basis leaves an equilibrium gap of {eps:.3e}"
        )))
    }
}

/// Runs the primal simplex on `maximize 1'y` subject to `(U + shift) y <= b`
/// and returns the terminal basis. This LP is always bounded: every
/// constraint coefficient is at least 1 after the shift, so each y_j is
/// bounded by max(b). Termination is therefore either reduced-cost
/// optimality, a verified early exit from a stall, or attempt exhaustion;
/// the caller re-verifies whatever basis comes back.
fn run_simplex(u: &PayoffMatrix, shift: f64, b: &[f64]) -> Result<Vec<usize>> {
    let (m, n) = (u.rows(), u.cols());
    // Tableau rows: m constraints (U + shift) y + s = b, then the objective
    // row for maximize 1'y. Columns: n structural, m slacks, rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[j] = u.get(i, j) + shift;
        }
        row[n + i] = 1.0;
        row[width - 1] = b[i];
        t.push(row);
    }
    let mut obj = vec![0.0; width];
    for cell in obj.iter_mut().take(n) {
        *cell = -1.0;
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    // A failed ratio test on an improving column can only be floating-point
    // drift in the tableau, which ill-conditioned bases readily provoke via
    // small pivots. The escape hatch is refactorization: rebuild the whole
    // tableau exactly from the original data and the current basis. A column
    // that still looks improving yet unbounded on a freshly rebuilt tableau
    // carries a noise-level reduced cost; it is set aside until the next
    // basis change.
    let mut refreshed = false;
    let mut pivots_since_refresh = 0usize;
    // Columns set aside as numerically non-improving since the last pivot.
    let mut noise_cols = vec![false; n + m];
    let mut best_obj = f64::NEG_INFINITY;
    let mut stalled = 0usize;
    let mut stall_checks = 0usize;
    for _ in 0..MAX_PIVOTS {
        if pivots_since_refresh >= REFRESH_EVERY {
            t = refactorize(u, shift, b, &basis)?;
            pivots_since_refresh = 0;
        }
        // A long churn without objective progress means the walk is trapped
        // on a degenerate face. Hand the incumbent basis back if it already
        // solves the game; otherwise keep pivoting for a while, then give up
        // on this attempt and let the caller retry perturbed.
        if stalled >= STALL_WINDOW {
            stalled = 0;
            stall_checks += 1;
            if certify(u, shift, &basis).is_ok() || stall_checks >= MAX_STALL_CHECKS {
                return Ok(basis);
            }
            t = refactorize(u, shift, b, &basis)?;
            pivots_since_refresh = 0;
        }
        // Entering variable: lowest-index column with a negative reduced cost.
        let Some(enter) =
            (0..n + m).find(|&j| !noise_cols[j] && t[m][j] < -OPT_TOL)
        else {
            return Ok(basis);
        };
        // Harris two-pass ratio test: the first pass finds the tightest ratio
        // with a small feasibility slack, the second picks the largest pivot
        // element among rows whose ratio fits under that bound. Stability
        // beats index order here; anticycling falls to the stall salvage.
        // Negative right-hand sides are rounding noise and clamp to zero.
        let mut theta = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_TOL {
                let ratio = (t[i][width - 1].max(0.0) + FEAS_TOL) / t[i][enter];
                if ratio < theta {
                    theta = ratio;
                }
            }
        }
        let mut leave: Option<usize> = None;
        if theta.is_finite() {
            let mut best_elem = 0.0;
            for i in 0..m {
                if t[i][enter] > best_elem
                    && t[i][width - 1].max(0.0) / t[i][enter] <= theta
                {
                    best_elem = t[i][enter];
                    leave = Some(i);
                }
            }
        }
        let Some(pivot_row) = leave else {
            if !refreshed {
                refreshed = true;
                t = refactorize(u, shift, b, &basis)?;
                pivots_since_refresh = 0;
                continue;
            }
            if t[m][enter] > -DRIFT_TOL {
                noise_cols[enter] = true;
                continue;
            }
            return Err(Error::Numerical(format!(
                "simplex stuck with reduced cost {:.3e} on a bounded LP",
                t[m][enter]
            )));
        };
        let pivot = t[pivot_row][enter];
        for cell in t[pivot_row].iter_mut() {
            *cell /= pivot;
        }
        for i in 0..=m {
            if i == pivot_row {
                continue;
            }
            let factor = t[i][enter];
            if factor == 0.0 {
                continue;
            }
            let (pivot_slice, row) = if i < pivot_row {
                let (a, b) = t.split_at_mut(pivot_row);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = t.split_at_mut(i);
                (&a[pivot_row], &mut b[0])
            };
            for (cell, &p) in row.iter_mut().zip(pivot_slice.iter()) {
                *cell -= factor * p;
            }
        }
        basis[pivot_row] = enter;
        refreshed = false;
        noise_cols.fill(false);
        pivots_since_refresh += 1;
        let obj = t[m][width - 1];
        if obj > best_obj + PROGRESS_TOL {
            best_obj = obj;
            stalled = 0;
        } else {
            stalled += 1;
        }
    }
    // Out of pivots; the caller's certification decides whether the incumbent
    // basis is usable or the next perturbation attempt should run.
    Ok(basis)
}

/// Rebuilds the tableau `[B^-1 A' | B^-1 | B^-1 b]` exactly from the original
/// shifted matrix and the current basis, discarding all accumulated rounding.
/// Gauss-Jordan with partial pivoting reduces the basis columns to the
/// identity; the reduced-cost row is then priced out fresh.
fn refactorize(u: &PayoffMatrix, shift: f64, b: &[f64], basis: &[usize]) -> Result<Vec<Vec<f64>>> {
    let (m, n) = (u.rows(), u.cols());
    let width = n + m + 1;
    // work rows: [basis columns | structural columns | slacks | rhs]
    let mut work: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; m + width];
        for (k, &bv) in basis.iter().enumerate() {
            row[k] = if bv < n {
                u.get(i, bv) + shift
            } else if bv - n == i {
                1.0
            } else {
                0.0
            };
        }
        for j in 0..n {
            row[m + j] = u.get(i, j) + shift;
        }
        row[m + n + i] = 1.0;
        row[m + width - 1] = b[i];
        work.push(row);
    }
    let mut row_of_basis = vec![usize::MAX; m];
    for k in 0..m {
        let pivot_row = (0..m)
            .filter(|&i| row_of_basis.iter().all(|&r| r != i))
            .max_by(|&a, &b| work[a][k].abs().total_cmp(&work[b][k].abs()))
            .expect("rows remain while basis columns remain");
        let pivot = work[pivot_row][k];
        if pivot.abs() < 1e-12 {
            return Err(Error::Numerical(
                "basis matrix is numerically singular during refactorization".to_string(),
            ));
        }
        for cell in work[pivot_row].iter_mut() {
            *cell /= pivot;
        }
        for i in 0..m {
            if i == pivot_row {
                continue;
            }
            let factor = work[i][k];
            if factor == 0.0 {
                continue;
            }
            let (pivot_slice, row) = if i < pivot_row {
                let (a, b) = work.split_at_mut(pivot_row);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = work.split_at_mut(i);
                (&a[pivot_row], &mut b[0])
            };
            for (cell, &p) in row.iter_mut().zip(pivot_slice.iter()) {
                *cell -= factor * p;
            }
        }
        row_of_basis[k] = pivot_row;
    }
    // Tableau row i must carry basic variable basis[i].
    let mut t: Vec<Vec<f64>> = vec![Vec::new(); m + 1];
    for (k, &r) in row_of_basis.iter().enumerate() {
        t[k] = work[r][m..].to_vec();
    }
    // Reduced costs c_B B^-1 A - c with c_j = 1 on structural columns.
    let mut obj = vec![0.0; width];
    for cell in obj.iter_mut().take(n) {
        *cell = -1.0;
    }
    for (k, &bv) in basis.iter().enumerate() {
        if bv < n {
            for (cell, &v) in obj.iter_mut().zip(t[k].iter()) {
                *cell += v;
            }
        }
    }
    t[m] = obj;
    Ok(t)
}

/// Reads the equilibrium out of a terminal basis. The tableau is rebuilt from
/// scratch on the exact unperturbed data, so the reported strategies carry
/// refactorization-level precision regardless of the pivot path (and of any
/// rhs perturbation) that led here.
fn extract(u: &PayoffMatrix, shift: f64, basis: &[usize]) -> Result<GameSolution> {
    let (m, n) = (u.rows(), u.cols());
    let ones = vec![1.0; m];
    let t = refactorize(u, shift, &ones, basis)?;
    let width = n + m + 1;
    let objective = t[m][width - 1];
    if objective <= PIVOT_TOL {
        return Err(Error::Numerical(
            "game LP objective vanished after normalization".to_string(),
        ));
    }

    let mut y = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = t[i][width - 1].max(0.0);
        }
    }
    // Duals of the column problem live under the slack columns of the
    // objective row; they solve the row player's LP.
    let x: Vec<f64> = (0..m).map(|i| t[m][n + i].max(0.0)).collect();

    let sum_y: f64 = y.iter().sum();
    let sum_x: f64 = x.iter().sum();
    if sum_y <= 0.0 || sum_x <= 0.0 {
        return Err(Error::Numerical(
            "degenerate simplex solution with empty support".to_string(),
        ));
    }
    let col_strategy = MixedStrategy::new(y.iter().map(|v| v / sum_y).collect())?;
    let row_strategy = MixedStrategy::new(x.iter().map(|v| v / sum_x).collect())?;
    Ok(GameSolution {
        row_strategy,
        col_strategy,
        value: 1.0 / objective - shift,
    })
}
