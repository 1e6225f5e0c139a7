//! LLL reduction and Fincke–Pohst enumeration for positive definite integral
//! Gram matrices. Floating point only steers the search; every reported vector
//! is checked with exact integer arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Mat = Vec<Vec<BigInt>>;

fn quad(g: &Mat, x: &[BigInt]) -> BigInt {
    let n = x.len();
    let mut acc = BigInt::zero();
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        let mut row = BigInt::zero();
        for j in 0..n {
            row += &g[i][j] * &x[j];
        }
        acc += &x[i] * row;
    }
    acc
}

/// Value of `x^T G x`.
pub fn quadratic_form(g: &Mat, x: &[BigInt]) -> BigInt {
    quad(g, x)
}

fn gso(g: &Mat) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = g.len();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut bb = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = BigRational::from_integer(g[i][j].clone());
            for k in 0..j {
                s -= &mu[i][k] * &mu[j][k] * &bb[k];
            }
            mu[i][j] = s / &bb[j];
        }
        let mut s = BigRational::from_integer(g[i][i].clone());
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &bb[k];
        }
        bb[i] = s;
    }
    (mu, bb)
}

/// LLL-reduce the Gram matrix; returns `(reduced_gram, T)` with
/// `reduced = T G T^t` and `T` unimodular (rows are the new basis).
pub fn lll_gram(g: &Mat) -> (Mat, Mat) {
    let n = g.len();
    let mut t: Mat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut gr = g.clone();
    let delta = BigRational::new(BigInt::from(99), BigInt::from(100));
    let mut k = 1;
    while k < n {
        // size reduction of row k
        for j in (0..k).rev() {
            let (mu, _) = gso(&gr);
            let q = mu[k][j].round().to_integer();
            if !q.is_zero() {
                for c in 0..n {
                    let v = &q * &t[j][c];
                    t[k][c] -= v;
                }
                // b_k <- b_k - q b_j
                for c in 0..n {
                    let v = &q * &gr[j][c];
                    gr[k][c] -= v;
                }
                for r in 0..n {
                    let v = &q * &gr[r][j];
                    gr[r][k] -= v;
                }
            }
        }
        let (mu, bb) = gso(&gr);
        let lhs = bb[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bb[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            t.swap(k, k - 1);
            gr.swap(k, k - 1);
            for r in gr.iter_mut() {
                r.swap(k, k - 1);
            }
            k = k.max(2) - 1;
        }
    }
    (gr, t)
}

/// LLL basis change and the Fincke–Pohst coefficients of the reduced form.
fn prepare(g: &Mat) -> (Mat, Mat, Vec<Vec<f64>>) {
    let n = g.len();
    let (gr, t) = lll_gram(g);
    // x^T G x = sum q_ii (x_i + sum_{j>i} q_ij x_j)^2
    let mut q = vec![vec![0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = gr[i][j].to_f64().unwrap();
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    (gr, t, q)
}

fn to_original(t: &Mat, xb: &[BigInt]) -> Vec<BigInt> {
    let n = xb.len();
    (0..n)
        .map(|c| {
            let mut s = BigInt::zero();
            for r in 0..n {
                s += &xb[r] * &t[r][c];
            }
            s
        })
        .collect()
}

/// All nonzero integer vectors `x` with `x^T G x <= bound`, in the original coordinates,
/// sorted by (value, vector).
pub fn short_vectors(g: &Mat, bound: &BigInt) -> Vec<(BigInt, Vec<BigInt>)> {
    let n = g.len();
    if bound.is_negative() || bound.is_zero() {
        return vec![];
    }
    let (gr, t, q) = prepare(g);
    let b = bound.to_f64().unwrap();
    let slack = b * 1e-9 + 1e-6;
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    enumerate(&q, n, n, b + slack, 0.0, &mut x, &mut |x| {
        if x.iter().all(|&v| v == 0) {
            return;
        }
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let val = quad(&gr, &xb);
        if &val <= bound {
            out.push((val, to_original(&t, &xb)));
        }
    });
    out.sort();
    out
}

fn enumerate(
    q: &[Vec<f64>],
    n: usize,
    level: usize,
    bound: f64,
    acc: f64,
    x: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    if level == 0 {
        visit(x);
        return;
    }
    let i = level - 1;
    let mut center = 0.0;
    for j in i + 1..n {
        center += q[i][j] * x[j] as f64;
    }
    let rem = (bound - acc).max(0.0);
    let radius = (rem / q[i][i]).sqrt();
    let lo = (-center - radius).ceil() as i64;
    let hi = (-center + radius).floor() as i64;
    for v in lo..=hi {
        let d = v as f64 + center;
        let contrib = q[i][i] * d * d;
        if acc + contrib <= bound {
            x[i] = v;
            enumerate(q, n, i, bound, acc + contrib, x, visit);
        }
    }
    x[i] = 0;
}

/// Some `x` with `x^T G x = value`, visiting at most `budget` partial vectors.
pub fn vector_of_value(g: &Mat, value: &BigInt, budget: usize) -> Option<Vec<BigInt>> {
    if !value.is_positive() {
        return None;
    }
    let n = g.len();
    let (gr, t, q) = prepare(g);
    let target = value.to_f64()?;
    let mut x = vec![0i64; n];
    let mut left = budget;
    let mut found = None;
    search(&q, n, n, target, 0.0, &mut x, &mut left, &mut |x| {
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        if &quad(&gr, &xb) == value {
            found = Some(to_original(&t, &xb));
            true
        } else {
            false
        }
    });
    found
}

#[allow(clippy::too_many_arguments)]
fn search(
    q: &[Vec<f64>],
    n: usize,
    level: usize,
    target: f64,
    acc: f64,
    x: &mut Vec<i64>,
    left: &mut usize,
    check: &mut dyn FnMut(&[i64]) -> bool,
) -> bool {
    if *left == 0 {
        return false;
    }
    *left -= 1;
    let i = level - 1;
    let mut center = 0.0;
    for j in i + 1..n {
        center += q[i][j] * x[j] as f64;
    }
    let rem = (target - acc).max(0.0);
    let radius = (rem / q[i][i]).sqrt();
    if i == 0 {
        // the last coordinate is a root of a quadratic; test the nearby integers
        for r in [-radius, radius] {
            let v0 = (r - center).round() as i64;
            for v in v0 - 1..=v0 + 1 {
                x[0] = v;
                if check(x) {
                    return true;
                }
            }
        }
        x[0] = 0;
        return false;
    }
    let slack = 1e-6 * (1.0 + target);
    let lo = (-center - radius).ceil() as i64;
    let hi = (-center + radius).floor() as i64;
    for v in lo..=hi {
        let d = v as f64 + center;
        let contrib = q[i][i] * d * d;
        if acc + contrib <= target + slack {
            x[i] = v;
            if search(q, n, i, target, acc + contrib, x, left, check) {
                return true;
            }
        }
    }
    x[i] = 0;
    false
}

/// The minimum nonzero value of the form and all vectors attaining it.
pub fn minimal_vectors(g: &Mat) -> (BigInt, Vec<Vec<BigInt>>) {
    let (gr, _) = lll_gram(g);
    let bound = (0..g.len()).map(|i| gr[i][i].clone()).min().unwrap();
    let all = short_vectors(g, &bound);
    let m = all[0].0.clone();
    let v = all.into_iter().filter(|(val, _)| *val == m).map(|(_, v)| v).collect();
    (m, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn d4_has_24_minimal_vectors() {
        // Hurwitz order, trace form trd(x ybar)
        let g = m(&[&[2, 0, 0, 1], &[0, 2, 0, 1], &[0, 0, 2, 1], &[1, 1, 1, 2]]);
        let (min, v) = minimal_vectors(&g);
        assert_eq!(min, BigInt::from(2));
        assert_eq!(v.len(), 24);
    }

    #[test]
    fn skewed_basis_counts_match_brute_force() {
        let g = m(&[&[5, 4, 1], &[4, 6, 2], &[1, 2, 9]]);
        let found = short_vectors(&g, &BigInt::from(20));
        let mut brute = 0;
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                for c in -10i64..=10 {
                    let x = [a, b, c].map(BigInt::from);
                    let v = quad(&g, &x);
                    if (a, b, c) != (0, 0, 0) && v <= BigInt::from(20) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(found.len(), brute);
    }

    #[test]
    fn exact_value_search() {
        let g = m(&[&[2, 0, 0, 1], &[0, 2, 0, 1], &[0, 0, 2, 1], &[1, 1, 1, 2]]);
        for v in [2i64, 4, 6, 14, 2 * 1_000_003, 2 * 999_999_937] {
            let x = vector_of_value(&g, &BigInt::from(v), 1 << 20).expect("Hurwitz norms represent every integer");
            assert_eq!(quad(&g, &x), BigInt::from(v));
        }
        assert!(vector_of_value(&g, &BigInt::from(3), 1 << 20).is_none());
    }
}
