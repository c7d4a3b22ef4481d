//! Independent oracles for the integration suites.
//!
//! Everything here is deliberately written from first principles, sharing no
//! numerical code with the library: equilibria come from support enumeration
//! over Shapley-Snow kernel systems solved by a local Gaussian elimination,
//! gradients from central finite differences, and payoffs from a naive
//! re-implementation of the forward pass.

#![allow(dead_code)]

use gangs_core::{Activation, MlpNet, PayoffMatrix};

/// Solves `A x = b` by Gaussian elimination with partial pivoting; `None` on
/// a (numerically) singular system.
pub fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .expect("finite entries")
        })?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..=n {
                let delta = factor * m[col][k];
                m[row][k] -= delta;
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn recurse(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            recurse(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    recurse(0, n, k, &mut cur, &mut out);
    out
}

/// Zero-sum equilibrium by support enumeration: for every pair of
/// equal-sized supports, solve the equalizer systems (each support strategy
/// makes the opponent's support indifferent at value `v`) and keep the first
/// candidate that is a nonnegative distribution and unexploitable on the
/// full matrix. Exhaustive, so it is an oracle for small games. Returns
/// `(row_strategy, col_strategy, value)`.
pub fn solve_by_support_enumeration(
    u: &PayoffMatrix,
    tol: f64,
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let (m, n) = (u.rows(), u.cols());
    for k in 1..=m.min(n) {
        for rows in subsets_of_size(m, k) {
            'pair: for cols in subsets_of_size(n, k) {
                // Column strategy y and value v: rows in the support are
                // indifferent, weights sum to one.
                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut b = vec![0.0; k + 1];
                for (ri, &i) in rows.iter().enumerate() {
                    for (cj, &j) in cols.iter().enumerate() {
                        a[ri][cj] = u.get(i, j);
                    }
                    a[ri][k] = -1.0;
                }
                for cj in 0..k {
                    a[k][cj] = 1.0;
                }
                b[k] = 1.0;
                let Some(yv) = solve_linear(&a, &b) else {
                    continue;
                };
                let (y, v) = (&yv[..k], yv[k]);

                // Row strategy x from the transposed equalizer system.
                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut b = vec![0.0; k + 1];
                for (cj, &j) in cols.iter().enumerate() {
                    for (ri, &i) in rows.iter().enumerate() {
                        a[cj][ri] = u.get(i, j);
                    }
                    a[cj][k] = -1.0;
                }
                for ri in 0..k {
                    a[k][ri] = 1.0;
                }
                b[k] = 1.0;
                let Some(xv) = solve_linear(&a, &b) else {
                    continue;
                };
                let (x, v2) = (&xv[..k], xv[k]);

                if (v - v2).abs() > tol {
                    continue;
                }
                if y.iter().any(|&p| p < -tol) || x.iter().any(|&p| p < -tol) {
                    continue;
                }

                let mut x_full = vec![0.0; m];
                for (ri, &i) in rows.iter().enumerate() {
                    x_full[i] = x[ri].max(0.0);
                }
                let mut y_full = vec![0.0; n];
                for (cj, &j) in cols.iter().enumerate() {
                    y_full[j] = y[cj].max(0.0);
                }
                let xs: f64 = x_full.iter().sum();
                let ys: f64 = y_full.iter().sum();
                for p in x_full.iter_mut() {
                    *p /= xs;
                }
                for p in y_full.iter_mut() {
                    *p /= ys;
                }

                // Global optimality on the full matrix: no row earns more
                // than v against y, no column concedes less than v under x.
                for i in 0..m {
                    let payoff: f64 = (0..n).map(|j| u.get(i, j) * y_full[j]).sum();
                    if payoff > v + tol {
                        continue 'pair;
                    }
                }
                for j in 0..n {
                    let payoff: f64 = (0..m).map(|i| u.get(i, j) * x_full[i]).sum();
                    if payoff < v - tol {
                        continue 'pair;
                    }
                }
                return Some((x_full, y_full, v));
            }
        }
    }
    None
}

/// Central finite-difference gradient of `f` at `x` with step `h`.
pub fn central_diff(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = f(&probe);
        probe[i] = orig - h;
        let fm = f(&probe);
        probe[i] = orig;
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}

/// Relative-or-absolute gradient comparison: near-zero entries use an
/// absolute floor, everything else a relative bound.
pub fn gradients_close(got: &[f64], want: &[f64], rel: f64, abs_floor: f64) -> bool {
    assert_eq!(got.len(), want.len());
    got.iter().zip(want).all(|(&g, &w)| {
        let scale = g.abs().max(w.abs());
        if scale < abs_floor {
            (g - w).abs() <= abs_floor
        } else {
            (g - w).abs() <= rel * scale
        }
    })
}

/// Naive forward pass re-implemented from the parameter layout definition:
/// per layer, weights row-major then biases, activation applied element-wise.
pub fn naive_forward(net: &MlpNet, input: &[f64]) -> Vec<f64> {
    let sizes = net.arch().sizes();
    let acts = net.arch().activations();
    let params = net.params();
    let mut offset = 0;
    let mut x = input.to_vec();
    for (l, act) in acts.iter().enumerate() {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        let weights = &params[offset..offset + fan_in * fan_out];
        let biases = &params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
        offset += fan_in * fan_out + fan_out;
        let mut next = Vec::with_capacity(fan_out);
        for o in 0..fan_out {
            let mut z = biases[o];
            for i in 0..fan_in {
                z += weights[o * fan_in + i] * x[i];
            }
            next.push(match act {
                Activation::Relu => z.max(0.0),
                Activation::Tanh => z.tanh(),
                Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                Activation::Linear => z,
            });
        }
        x = next;
    }
    x
}

/// Log measuring function as the payoff definition states it.
pub fn naive_phi_log(p: f64, clamp_eps: f64) -> f64 {
    p.clamp(clamp_eps, 1.0 - clamp_eps).ln()
}

/// Brute-force classifier payoff on explicit samples: the literal double sum
/// over mixture components and points, using only [`naive_forward`].
pub fn brute_force_uc(
    g_nets: &[MlpNet],
    c_nets: &[MlpNet],
    c_weights: &[f64],
    phi: &dyn Fn(f64) -> f64,
    real: &[f64],
    data_dim: usize,
    latents: &[f64],
    latent_dim: usize,
    g_choices: &[usize],
) -> f64 {
    let n_real = real.len() / data_dim;
    let n_fake = latents.len() / latent_dim;
    let mixture_phi = |point: &[f64]| -> f64 {
        c_nets
            .iter()
            .zip(c_weights)
            .map(|(net, &w)| w * phi(naive_forward(net, point)[0]))
            .sum()
    };
    let mut real_term = 0.0;
    for t in 0..n_real {
        real_term += mixture_phi(&real[t * data_dim..(t + 1) * data_dim]);
    }
    let mut fake_term = 0.0;
    for t in 0..n_fake {
        let z = &latents[t * latent_dim..(t + 1) * latent_dim];
        let x = naive_forward(&g_nets[g_choices[t]], z);
        fake_term += mixture_phi(&x);
    }
    real_term / n_real as f64 - fake_term / n_fake as f64
}

/// Uniform random payoff matrix with entries in [-1, 1].
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> PayoffMatrix {
    use rand::Rng;
    let mut rng = gangs_core::seed::rng(seed);
    let entries: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    PayoffMatrix::new(rows, cols, entries).expect("valid random matrix")
}
