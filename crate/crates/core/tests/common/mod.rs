#![allow(dead_code)]

use rand::Rng;

/// Error-free product: `a * b = p + e` exactly.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Error-free sum (Knuth).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Compensated dot product, as accurate as if computed in twice the working
/// precision and then rounded.
pub fn dot2(b: &[f64], c: &[f64]) -> f64 {
    let (mut s, mut err) = (0.0, 0.0);
    for (&x, &y) in b.iter().zip(c) {
        let (p, ep) = two_prod(x, y);
        let (t, es) = two_sum(s, p);
        s = t;
        err += ep + es;
    }
    s + err
}

/// Kahan summation.
pub fn kahan_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Every finite non-negative binary16 value, ascending, built from the
/// exponent/fraction layout.
pub fn fp16_grid() -> Vec<f64> {
    let mut out = Vec::with_capacity(31 * 1024);
    for frac in 0..1024u32 {
        out.push(frac as f64 * 2f64.powi(-24));
    }
    for exp in 1..31i32 {
        for frac in 0..1024u32 {
            out.push((1.0 + frac as f64 / 1024.0) * 2f64.powi(exp - 15));
        }
    }
    out
}

/// Round to binary16 by nearest-grid search, ties to the even code.
/// `None` means overflow (at or beyond the rounding boundary 65520).
pub fn fp16_by_enumeration(grid: &[f64], x: f64) -> Option<f64> {
    let a = x.abs();
    if a >= 65520.0 {
        return None;
    }
    let i = grid.partition_point(|&g| g < a);
    let r = if i == grid.len() {
        grid[i - 1]
    } else if grid[i] == a || i == 0 {
        grid[i]
    } else {
        let (lo, hi) = (grid[i - 1], grid[i]);
        let (dl, dh) = (a - lo, hi - a);
        if dl < dh {
            lo
        } else if dh < dl {
            hi
        } else if (i - 1) % 2 == 0 {
            lo
        } else {
            hi
        }
    };
    Some(r.copysign(x))
}

/// Vector whose entries have log-uniform magnitudes over `decades` decades
/// and random signs.
pub fn log_uniform_vec<R: Rng>(rng: &mut R, len: usize, decades: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let e: f64 = rng.random_range(-decades / 2.0..decades / 2.0);
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            s * 10f64.powf(e)
        })
        .collect()
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect()
}

/// Independent rejection sampler for sorted, separated DOAs.
pub fn reference_doas<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64, sep: f64) -> Vec<f64> {
    loop {
        let mut d: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if (1..n).all(|i| d[i] - d[i - 1] >= sep) {
            return d;
        }
    }
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Random matrix with orthonormal columns (Gram-Schmidt twice).
pub fn random_orthonormal<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while q.len() < cols {
        let mut v = gaussian_vec(rng, rows);
        for _ in 0..2 {
            for u in &q {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= d * ui;
                }
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            q.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    q
}

/// `b^T c - y` with a single final rounding, from the error-free expansion
/// of every product and of `-y`.
pub fn exact_residual(b: &[f64], c: &[f64], y: f64) -> f64 {
    let mut expansion: Vec<f64> = Vec::new();
    let mut grow = |x: f64| {
        let mut q = x;
        let mut next = Vec::with_capacity(expansion.len() + 1);
        for &e in &expansion {
            let (s, err) = two_sum(q, e);
            if err != 0.0 {
                next.push(err);
            }
            q = s;
        }
        if q != 0.0 {
            next.push(q);
        }
        expansion = next;
    };
    for (&x, &z) in b.iter().zip(c) {
        let (p, e) = two_prod(x, z);
        grow(p);
        grow(e);
    }
    grow(-y);
    // components are non-overlapping and increasing in magnitude
    expansion.iter().fold(0.0, |acc, &e| acc + e)
}
