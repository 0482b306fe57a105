//! Reference computations that share no code with the library's Smith-form path.

use std::collections::{HashSet, VecDeque};

use abtqft_core::intlinalg::IntSymMatrix;
use num_traits::ToPrimitive;

/// Lower-triangular column Hermite basis of the lattice spanned by the columns of `l`.
pub fn hermite_columns(l: &IntSymMatrix) -> Vec<Vec<i64>> {
    let n = l.dim();
    let mut cols: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| l[(i, j)].to_i64().expect("small entry"))
                .collect()
        })
        .collect();
    for i in 0..n {
        // gcd of row i over columns i.. lands in column i
        loop {
            let nonzero: Vec<usize> = (i..n).filter(|&j| cols[j][i] != 0).collect();
            let Some(&p) = nonzero.iter().min_by_key(|&&j| cols[j][i].abs()) else {
                panic!("singular lattice");
            };
            cols.swap(i, p);
            if nonzero.len() == 1 {
                break;
            }
            for j in i + 1..n {
                let q = cols[j][i].div_euclid(cols[i][i]);
                let pivot = cols[i].clone();
                for (x, y) in cols[j].iter_mut().zip(&pivot) {
                    *x -= q * y;
                }
            }
        }
        if cols[i][i] < 0 {
            cols[i].iter_mut().for_each(|x| *x = -*x);
        }
    }
    cols
}

fn reduce(h: &[Vec<i64>], mut x: Vec<i64>) -> Vec<i64> {
    for i in 0..x.len() {
        let q = x[i].div_euclid(h[i][i]);
        for (xj, hj) in x.iter_mut().zip(&h[i]) {
            *xj -= q * hj;
        }
    }
    x
}

/// Size of the subgroup of `ℤⁿ / Lℤⁿ` reached from 0 by adding unit vectors.
pub fn cokernel_order_by_closure(l: &IntSymMatrix) -> u64 {
    let n = l.dim();
    let h = hermite_columns(l);
    let start = vec![0i64; n];
    let mut seen: HashSet<Vec<i64>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for i in 0..n {
            let mut y = x.clone();
            y[i] += 1;
            let y = reduce(&h, y);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len() as u64
}

/// `Σ_{g∈ℤ_kᵐ} exp(πi/k·gᵀLg)` term by term, without residue counting.
pub fn naive_state_sum(l: &IntSymMatrix, k: u64) -> (f64, f64) {
    let m = l.dim();
    let e: Vec<i64> = (0..m * m)
        .map(|t| l[(t / m, t % m)].to_i64().expect("small"))
        .collect();
    let total = k.pow(m as u32);
    let (mut re, mut im) = (0.0, 0.0);
    for mut idx in 0..total {
        let mut g = vec![0i64; m];
        for slot in g.iter_mut() {
            *slot = (idx % k) as i64;
            idx /= k;
        }
        let q: i64 = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| g[i] * e[i * m + j] * g[j])
            .sum();
        let theta = std::f64::consts::PI * q as f64 / k as f64;
        re += theta.cos();
        im += theta.sin();
    }
    (re, im)
}

fn det_i64(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = a[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * a[0][j] * det_i64(&minor)
        })
        .sum()
}

/// `(adj L, det L)`, so that `L⁻¹ = adj L / det L`.
pub fn adjugate(l: &IntSymMatrix) -> (Vec<Vec<i64>>, i64) {
    let n = l.dim();
    let a: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| l[(i, j)].to_i64().expect("small")).collect())
        .collect();
    let adj = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<i64>> = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * det_i64(&minor)
                })
                .collect()
        })
        .collect();
    (adj, det_i64(&a))
}

/// `|det|^{-1/2} Σ_x exp(−πik·xᵀL⁻¹x)` over the Hermite box of coset representatives.
pub fn box_gauss_sum(l: &IntSymMatrix, k: u64) -> (f64, f64) {
    let n = l.dim();
    let h = hermite_columns(l);
    let (adj, det) = adjugate(l);
    let sides: Vec<i64> = (0..n).map(|i| h[i][i]).collect();
    let total: i64 = sides.iter().product();
    let (mut re, mut im) = (0.0, 0.0);
    for mut idx in 0..total {
        let mut x = vec![0i64; n];
        for (slot, s) in x.iter_mut().zip(&sides) {
            *slot = idx % s;
            idx /= s;
        }
        let num: i64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| x[i] * adj[i][j] * x[j])
            .sum();
        // exp(−πik·num/det), reduced exactly mod 2·det
        let period = 2 * det.abs();
        let r = (num * k as i64 * det.signum()).rem_euclid(period);
        let theta = -std::f64::consts::PI * r as f64 / det.abs() as f64;
        re += theta.cos();
        im += theta.sin();
    }
    let norm = (total as f64).sqrt();
    (re / norm, im / norm)
}

/// `Σ_{g∈ℤ_kᵐ} exp(πi/k·(g,h)ᵀ M (g,h))` for the block matrix `M` whose last `colors.len()`
/// components are fixed to `colors`.
pub fn naive_colored_sum(block: &IntSymMatrix, colors: &[i64], k: u64) -> (f64, f64) {
    let n = block.dim();
    let m = n - colors.len();
    let e: Vec<i64> = (0..n * n)
        .map(|t| block[(t / n, t % n)].to_i64().expect("small"))
        .collect();
    let (mut re, mut im) = (0.0, 0.0);
    for mut idx in 0..k.pow(m as u32) {
        let mut v = vec![0i64; n];
        for slot in v.iter_mut().take(m) {
            *slot = (idx % k) as i64;
            idx /= k;
        }
        v[m..].copy_from_slice(colors);
        let q: i64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| v[i] * e[i * n + j] * v[j])
            .sum();
        let theta = std::f64::consts::PI * q as f64 / k as f64;
        re += theta.cos();
        im += theta.sin();
    }
    (re, im)
}
