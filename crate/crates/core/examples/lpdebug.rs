//! Instrumented copy of the simplex loop for diagnosing stalls on captured
//! matrices. Run: `lpdebug <csv-path> [max_pivots]`.

use std::collections::HashMap;
use std::fs;

use gangs_core::game::PayoffMatrix;

const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE_TOL: f64 = 1e-9;
const REFRESH_EVERY: usize = 64;

fn refactorize(u: &PayoffMatrix, shift: f64, basis: &[usize]) -> Vec<Vec<f64>> {
    let m = u.rows();
    let n = u.cols();
    let width = n + m + 1;
    let mut work: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; m + width];
            for (k, &b) in basis.iter().enumerate() {
                row[k] = if b < n { u.get(i, b) + shift } else if b - n == i { 1.0 } else { 0.0 };
            }
            for j in 0..n {
                row[m + j] = u.get(i, j) + shift;
            }
            row[m + n + i] = 1.0;
            row[m + width - 1] = 1.0;
            row
        })
        .collect();

    let mut row_of_basis = vec![usize::MAX; m];
    let mut used = vec![false; m];
    for k in 0..m {
        let mut best = (usize::MAX, 0.0f64);
        for (i, row) in work.iter().enumerate() {
            if !used[i] && row[k].abs() > best.1 {
                best = (i, row[k].abs());
            }
        }
        if best.1 < 1e-12 {
            panic!("singular basis during refactorization");
        }
        let p = best.0;
        used[p] = true;
        row_of_basis[k] = p;
        let piv = work[p][k];
        for v in work[p].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i != p {
                let f = work[i][k];
                if f != 0.0 {
                    for j in 0..m + width {
                        let delta = f * work[p][j];
                        work[i][j] -= delta;
                    }
                }
            }
        }
    }

    let mut t = vec![vec![0.0; width]; m + 1];
    for k in 0..m {
        let src = row_of_basis[k];
        t[k][..width].copy_from_slice(&work[src][m..]);
    }
    for j in 0..n {
        t[m][j] = -1.0;
    }
    for (k, &b) in basis.iter().enumerate() {
        if b < n {
            for j in 0..width {
                let delta = t[k][j];
                t[m][j] += delta;
            }
        }
    }
    t
}

fn lex_less(t: &[Vec<f64>], i: usize, bi: usize, enter: usize, n: usize, m: usize) -> bool {
    let (si, sb) = (t[i][enter], t[bi][enter]);
    for j in n..n + m {
        let (a, b) = (t[i][j] / si, t[bi][j] / sb);
        if (a - b).abs() > RATIO_TIE_TOL * (1.0 + b.abs()) {
            return a < b;
        }
    }
    i < bi
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let path = args.get(1).expect("usage: lpdebug <csv> [max_pivots] [refresh_every]");
    let max_pivots: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(5000);
    let refresh_every: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(REFRESH_EVERY);
    let text = fs::read_to_string(path).unwrap();
    let u = PayoffMatrix::from_csv(&text).unwrap();
    let m = u.rows();
    let n = u.cols();
    println!("matrix {m}x{n}");

    let min_entry = u.entries().iter().cloned().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min_entry;
    let width = n + m + 1;

    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut t = refactorize(&u, shift, &basis);
    let mut noise_cols = vec![false; n + m];
    let mut pivots_since_refresh = 0usize;
    let mut refreshed = false;
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut last_obj = f64::NEG_INFINITY;
    let mut degen_streak = 0usize;

    for pivot in 0..max_pivots {
        if pivots_since_refresh >= refresh_every {
            t = refactorize(&u, shift, &basis);
            pivots_since_refresh = 0;
        }
        let Some(enter) = (0..n + m).find(|&j| !noise_cols[j] && t[m][j] < -OPT_TOL) else {
            println!("OPTIMAL after {pivot} pivots, obj={}", t[m][width - 1]);
            return;
        };
        // Harris two-pass ratio test: pass 1 finds the tightest ratio with a
        // small feasibility slack; pass 2 picks the largest pivot element
        // among rows whose ratio fits under that bound.
        let mut theta = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > PIVOT_TOL {
                let r = (t[i][width - 1].max(0.0) + 1e-9) / t[i][enter];
                if r < theta {
                    theta = r;
                }
            }
        }
        let mut leave: Option<(usize, f64)> = None;
        if theta.is_finite() {
            let mut best_elem = 0.0;
            for i in 0..m {
                if t[i][enter] > best_elem
                    && t[i][width - 1].max(0.0) / t[i][enter] <= theta
                {
                    best_elem = t[i][enter];
                    leave = Some((i, t[i][width - 1].max(0.0) / t[i][enter]));
                }
            }
        }
        let Some((pivot_row, ratio)) = leave else {
            if !refreshed {
                refreshed = true;
                println!("pivot {pivot}: no leave for col {enter} rc={:.3e}, refactorizing", t[m][enter]);
                t = refactorize(&u, shift, &basis);
                pivots_since_refresh = 0;
                continue;
            }
            println!("pivot {pivot}: col {enter} rc={:.3e} stuck after refresh", t[m][enter]);
            noise_cols[enter] = true;
            continue;
        };

        let obj = t[m][width - 1];
        let rc = t[m][enter];
        let degenerate = ratio.abs() <= 1e-12;
        if degenerate {
            degen_streak += 1;
        } else {
            degen_streak = 0;
        }

        let mut sorted = basis.clone();
        sorted.sort_unstable();
        let count = seen.entry(sorted).or_insert(0);
        *count += 1;
        let revisit = *count;

        if pivot < 200 || pivot % 1000 == 0 || revisit > 1 || degen_streak > 10 {
            println!(
                "pivot {pivot}: enter={enter} leave_row={pivot_row} (basis var {}) ratio={ratio:.3e} rc={rc:.3e} obj={obj:.12} degen_streak={degen_streak} revisit={revisit}",
                basis[pivot_row]
            );
        }
        if revisit > 3 {
            println!("BASIS REVISITED {revisit} times; cycling confirmed at pivot {pivot}");
            if revisit > 6 {
                return;
            }
        }
        if obj < last_obj - 1e-9 {
            println!("pivot {pivot}: OBJECTIVE DECREASED {last_obj:.12} -> {obj:.12}");
        }
        last_obj = obj;

        let piv = t[pivot_row][enter];
        let scaled: Vec<f64> = t[pivot_row].iter().map(|v| v / piv).collect();
        for (i, row) in t.iter_mut().enumerate() {
            if i == pivot_row {
                row.copy_from_slice(&scaled);
                continue;
            }
            let f = row[enter];
            if f != 0.0 {
                for (v, s) in row.iter_mut().zip(&scaled) {
                    *v -= f * s;
                }
            }
        }
        basis[pivot_row] = enter;
        refreshed = false;
        noise_cols.fill(false);
        pivots_since_refresh += 1;
    }
    println!("gave up after {max_pivots} pivots, obj={}", t[m][width - 1]);
}
