//! Chebyshev series under the convention `g(s) = g₀ + 2Σ_{n≥1} g_n T_n(s)`.
//!
//! Products use the two-sided form `g(cos θ) = Σ_{n∈ℤ} g_{|n|} e^{inθ}`:
//! the product of two series is the discrete convolution of their
//! two-sided coefficient sequences, `h_n = Σ_k a_{|n−k|} b_{|k|}`.

use rayon::prelude::*;

use crate::rigor::Interval;

/// `T₀(s), …, T_n(s)`.
pub fn cheb_t(s: f64, n: usize) -> Vec<f64> {
    let mut t = vec![1.0, s];
    while t.len() <= n {
        let k = t.len();
        t.push(2.0 * s * t[k - 1] - t[k - 2]);
    }
    t.truncate(n + 1);
    t
}

/// Interval enclosures of `T₀(s), …, T_n(s)`, intersected with `[−1, 1]`
/// when `s ⊆ [−1, 1]`.
pub fn cheb_t_interval(s: Interval, n: usize) -> Vec<Interval> {
    let unit = Interval::new(-1.0, 1.0);
    let inside = s.subset_of(unit);
    let clip = |x: Interval| if inside { intersect(x, unit) } else { x };
    let two_s = Interval::point(2.0) * s;
    let mut t = vec![Interval::ONE, clip(s)];
    while t.len() <= n {
        let k = t.len();
        t.push(clip(two_s * t[k - 1] - t[k - 2]));
    }
    t.truncate(n + 1);
    t
}

fn intersect(a: Interval, b: Interval) -> Interval {
    let lo = a.lo().max(b.lo());
    let hi = a.hi().min(b.hi());
    if lo <= hi {
        Interval::new(lo, hi)
    } else {
        a
    }
}

/// Clenshaw evaluation of a scalar series.
pub fn eval(c: &[f64], s: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for k in (1..c.len()).rev() {
        let b0 = 2.0 * c[k] + 2.0 * s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + s * b1 - b2
}

/// Interval Clenshaw evaluation; encloses the range over `s`.
pub fn eval_interval(c: &[Interval], s: Interval) -> Interval {
    let two = Interval::point(2.0);
    let (mut b1, mut b2) = (Interval::ZERO, Interval::ZERO);
    for k in (1..c.len()).rev() {
        let b0 = two * c[k] + two * s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(Interval::ZERO) + s * b1 - b2
}

/// Enclosure of `{g(s) : s ∈ [−1, 1]}`: the tighter of interval Clenshaw and
/// `g₀ ± 2Σ|g_n|`, both valid.
pub fn range(c: &[Interval]) -> Interval {
    let clenshaw = eval_interval(c, Interval::new(-1.0, 1.0));
    let spread = Interval::point(2.0) * Interval::sum(c.iter().skip(1).map(|x| x.abs()));
    let crude = c.first().copied().unwrap_or(Interval::ZERO) + Interval::new(-spread.hi(), spread.hi());
    intersect(clenshaw, crude)
}

/// Product of two series of degrees `da`, `db` given the pairwise products
/// `prod(i, j) = a_i b_j`; returns coefficients `0..=da+db`.
pub fn product_with<T, P, A>(da: usize, db: usize, prod: P, add: A) -> Vec<T>
where
    T: Clone + Send + Sync,
    P: Fn(usize, usize) -> T + Sync,
    A: Fn(&T, &T) -> T + Sync,
{
    let pairs: Vec<Vec<T>> = (0..=da)
        .into_par_iter()
        .map(|i| (0..=db).map(|j| prod(i, j)).collect())
        .collect();
    (0..=da + db)
        .into_par_iter()
        .map(|n| {
            let mut acc: Option<T> = None;
            for k in -(db as i64)..=(db as i64) {
                let i = (n as i64 - k).unsigned_abs() as usize;
                if i > da {
                    continue;
                }
                let term = &pairs[i][k.unsigned_abs() as usize];
                acc = Some(match acc {
                    None => term.clone(),
                    Some(a) => add(&a, term),
                });
            }
            acc.expect("at least one term")
        })
        .collect()
}

pub fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    product_with(a.len() - 1, b.len() - 1, |i, j| a[i] * b[j], |x, y| x + y)
}

pub fn product_interval(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    product_with(a.len() - 1, b.len() - 1, |i, j| a[i] * b[j], |x, y| *x + *y)
}

/// `‖g₀‖ + 2Σ_{n≥1} ‖g_n‖` from the coefficient norms.
pub fn con_norm<I: IntoIterator<Item = Interval>>(norms: I) -> Interval {
    let mut it = norms.into_iter();
    let first = it.next().unwrap_or(Interval::ZERO);
    first + Interval::point(2.0) * Interval::sum(it)
}

/// `1` for the constant coefficient, `2` otherwise: the weight of
/// coefficient `c` in the con-norm.
pub fn con_factor(c: usize) -> Interval {
    if c == 0 {
        Interval::ONE
    } else {
        Interval::point(2.0)
    }
}

/// Smallest power of two `N_FFT` with `N_FFT/2 ≥ N_c + 1`, so that the
/// grid determines a series of order `N_c`.
pub fn nfft_for(nc: usize) -> usize {
    let mut n = 2;
    while n / 2 < nc + 1 {
        n *= 2;
    }
    n
}

/// Step-size grid `½s_fix − ½s_fix cos(2πk/N_FFT)` for `k = 0, …, N_FFT/2 − 1`.
pub fn arclength_grid(s_fix: f64, nfft: usize) -> Vec<f64> {
    (0..nfft / 2)
        .map(|k| {
            if 4 * k == nfft {
                0.5 * s_fix
            } else {
                0.5 * s_fix - 0.5 * s_fix * (2.0 * std::f64::consts::PI * k as f64 / nfft as f64).cos()
            }
        })
        .collect()
}

/// Grid points rescaled to `ŝ = 2s/s_fix − 1 ∈ [−1, 1)`.
pub fn rescaled_grid(nfft: usize) -> Vec<f64> {
    arclength_grid(1.0, nfft).into_iter().map(|s| 2.0 * s - 1.0).collect()
}

/// Weights `W[n][k]` of the least-squares fit `g_n = Σ_k W[n][k] g(ŝ_k)` of
/// an order-`nc` series to values at `nodes`; interpolation when there are
/// exactly `nc + 1` distinct nodes.
pub fn fit_weights(nodes: &[f64], nc: usize) -> Vec<Vec<f64>> {
    let v = nalgebra::DMatrix::from_fn(nodes.len(), nc + 1, |k, n| {
        if n == 0 {
            1.0
        } else {
            2.0 * cheb_t(nodes[k], n)[n]
        }
    });
    let pinv = v.pseudo_inverse(1e-14).expect("Chebyshev matrix of distinct nodes");
    (0..=nc).map(|n| (0..nodes.len()).map(|k| pinv[(n, k)]).collect()).collect()
}

/// Fits order-`nc` coefficients to values at `nodes`.
pub fn fit<T, S, C>(values: &[T], nodes: &[f64], nc: usize, scale: S, combine: C) -> Vec<T>
where
    S: Fn(&T, f64) -> T,
    C: Fn(&T, &T) -> T,
{
    assert_eq!(values.len(), nodes.len());
    let w = fit_weights(nodes, nc);
    w.iter()
        .map(|row| {
            let mut acc = scale(&values[0], row[0]);
            for k in 1..values.len() {
                acc = combine(&acc, &scale(&values[k], row[k]));
            }
            acc
        })
        .collect()
}
