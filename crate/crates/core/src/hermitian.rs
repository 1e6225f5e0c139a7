//! Quaternion hermitian forms on `B^g`, the similitude groups `GU_g` and
//! `GSp_2g`, and the permutation conjugating one into the other over a field.

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::arith::{FiniteField, Gf, GfMat};
use crate::quat::{solve_norm, MaximalOrder, QuatAlgebra, QuatElem, QuatError, Rat};

/// A matrix with entries in `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<QuatElem>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![QuatElem::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = QuatElem::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<QuatElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_cols(cols: &[Vec<QuatElem>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.data[i * c + j] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(d: &[QuatElem]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &QuatElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: QuatElem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn col(&self, j: usize) -> Vec<QuatElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Conjugate transpose.
    pub fn star(&self) -> QMat {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    pub fn mul(&self, alg: &QuatAlgebra, o: &QMat) -> QMat {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = QuatElem::zero();
                for k in 0..self.cols {
                    s = &s + &alg.mul(self.get(i, k), o.get(k, j));
                }
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn add(&self, o: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Entries as rationals when every entry is a scalar.
    pub fn as_rational(&self) -> Option<Vec<Vec<Rat>>> {
        if self.data.iter().any(|x| x.0[1..].iter().any(|c| !c.is_zero())) {
            return None;
        }
        Some((0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).0[0].clone()).collect()).collect())
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.star()
    }

    /// Rational diagonal entries when the matrix is diagonal with scalar diagonal.
    pub fn rational_diagonal(&self) -> Option<Vec<Rat>> {
        let r = self.as_rational()?;
        for (i, row) in r.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j && !x.is_zero() {
                    return None;
                }
            }
        }
        Some((0..self.rows).map(|i| r[i][i].clone()).collect())
    }
}

/// `f(x, y) = x* Λ y` on column vectors of `B^g`, with `Λ* = Λ` positive definite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    pub g: usize,
    pub gram: QMat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HermitianError {
    #[error("Gram matrix is not square hermitian")]
    NotHermitian,
    #[error("form is not positive definite")]
    NotDefinite,
}

impl HermitianForm {
    pub fn new(alg: &QuatAlgebra, gram: QMat) -> Result<Self, HermitianError> {
        if !gram.is_hermitian() {
            return Err(HermitianError::NotHermitian);
        }
        let f = HermitianForm { g: gram.rows(), gram };
        if !leading_minors_positive(&f.trace_form(alg)) {
            return Err(HermitianError::NotDefinite);
        }
        Ok(f)
    }

    pub fn eval(&self, alg: &QuatAlgebra, x: &[QuatElem], y: &[QuatElem]) -> QuatElem {
        let mut s = QuatElem::zero();
        for i in 0..self.g {
            for j in 0..self.g {
                s = &s + &alg.mul3(&x[i].conj(), self.gram.get(i, j), &y[j]);
            }
        }
        s
    }

    /// The rational form `trd f(x, y)` on `B^g ≅ Q^{4g}` (basis `e_i ε_a`, `ε = 1, i, j, k`).
    pub fn trace_form(&self, alg: &QuatAlgebra) -> Vec<Vec<Rat>> {
        let eps: Vec<QuatElem> = (0..4)
            .map(|a| {
                let mut c = [0i64; 4];
                c[a] = 1;
                QuatElem::from_ints(c)
            })
            .collect();
        let n = 4 * self.g;
        let mut out = vec![vec![Rat::zero(); n]; n];
        for r in 0..n {
            for c in 0..n {
                let (i, a) = (r / 4, r % 4);
                let (j, b) = (c / 4, c % 4);
                out[r][c] = alg.mul3(&eps[a].conj(), self.gram.get(i, j), &eps[b]).trd();
            }
        }
        out
    }
}

fn leading_minors_positive(m: &[Vec<Rat>]) -> bool {
    // Gaussian elimination without pivoting: all pivots positive iff all leading minors are
    let mut a = m.to_vec();
    let n = a.len();
    for c in 0..n {
        if !a[c][c].is_positive() {
            return false;
        }
        for i in c + 1..n {
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

/// Columns `M` with `M* Λ M = diag(α)`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub basis: QMat,
    pub alphas: Vec<Rat>,
}

/// Quaternionic Gram–Schmidt, pivoting on the largest remaining `f(v, v)`.
pub fn diagonalize(alg: &QuatAlgebra, f: &HermitianForm) -> Diagonalization {
    let g = f.g;
    let mut cols: Vec<Vec<QuatElem>> = QMat::identity(g).data.chunks(g).map(|c| c.to_vec()).collect();
    let mut alphas = Vec::with_capacity(g);
    for k in 0..g {
        let norm = |v: &[QuatElem]| f.eval(alg, v, v).0[0].clone();
        let mut best = k;
        for j in k + 1..g {
            if norm(&cols[j]) > norm(&cols[best]) {
                best = j;
            }
        }
        cols.swap(k, best);
        if norm(&cols[k]).is_zero() {
            polarize(alg, f, &mut cols, k);
        }
        let alpha = norm(&cols[k]);
        assert!(!alpha.is_zero(), "degenerate hermitian form");
        let inv = alpha.recip();
        for j in k + 1..g {
            let c = f.eval(alg, &cols[k], &cols[j]).scale(&inv);
            let shift: Vec<QuatElem> = cols[k].iter().map(|x| alg.mul(x, &c)).collect();
            cols[j] = cols[j].iter().zip(&shift).map(|(a, b)| a - b).collect();
        }
        alphas.push(alpha);
    }
    Diagonalization { basis: QMat::from_cols(&cols), alphas }
}

// Only reachable for indefinite forms: replace v_k by v_k + v_j c with c = conj f(v_k, v_j).
fn polarize(alg: &QuatAlgebra, f: &HermitianForm, cols: &mut [Vec<QuatElem>], k: usize) {
    for j in k + 1..cols.len() {
        let c = f.eval(alg, &cols[k], &cols[j]);
        if !c.is_zero() {
            let cc = c.conj();
            let shift: Vec<QuatElem> = cols[j].iter().map(|x| alg.mul(x, &cc)).collect();
            cols[k] = cols[k].iter().zip(&shift).map(|(a, b)| a + b).collect();
            return;
        }
    }
}

/// `M'` with `M'* Λ M' = I`, rescaling each Gram–Schmidt vector by some `c` with `n(c) = 1/α`.
pub fn unit_form(order: &MaximalOrder, f: &HermitianForm) -> Result<QMat, QuatError> {
    let alg = &order.alg;
    let d = diagonalize(alg, f);
    let mut cols = Vec::with_capacity(f.g);
    for (j, alpha) in d.alphas.iter().enumerate() {
        let c = solve_norm(order, &alpha.recip(), 64)?;
        cols.push(d.basis.col(j).iter().map(|x| alg.mul(x, &c)).collect::<Vec<_>>());
    }
    Ok(QMat::from_cols(&cols))
}

/// `γ` with `M* M = γ I` over `B`.
pub fn similitude_over_b(alg: &QuatAlgebra, m: &QMat) -> Option<Rat> {
    let d = m.star().mul(alg, m).rational_diagonal()?;
    let gamma = d[0].clone();
    (d.iter().all(|x| *x == gamma) && !gamma.is_zero()).then_some(gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// `M* M = γ I` for `M ∈ M_g(M_2(K))` stored as a `2g × 2g` matrix, `*` the blockwise adjugate transpose.
    GU,
    /// `M^t J_2g M = γ J_2g`.
    GSp,
}

/// `J_2g = [[0, I], [-I, 0]]`.
pub fn standard_j(field: &FiniteField, g: usize) -> GfMat {
    let mut j = GfMat::zeros(field, 2 * g, 2 * g);
    for i in 0..g {
        j[(i, g + i)] = field.one();
        j[(g + i, i)] = -field.one();
    }
    j
}

/// `diag(J_2, ..., J_2)`.
pub fn block_j(field: &FiniteField, g: usize) -> GfMat {
    let mut j = GfMat::zeros(field, 2 * g, 2 * g);
    for i in 0..g {
        j[(2 * i, 2 * i + 1)] = field.one();
        j[(2 * i + 1, 2 * i)] = -field.one();
    }
    j
}

/// Blockwise `(M*)_{ij} = adj(M_{ji})` on `2 × 2` blocks.
pub fn m2_star(m: &GfMat) -> GfMat {
    let n = m.rows();
    assert!(m.is_square() && n % 2 == 0);
    let mut out = GfMat::zeros(m.field(), n, n);
    for bi in 0..n / 2 {
        for bj in 0..n / 2 {
            let (r, c) = (2 * bj, 2 * bi);
            let (a, b, cc, d) = (&m[(r, c)], &m[(r, c + 1)], &m[(r + 1, c)], &m[(r + 1, c + 1)]);
            out[(2 * bi, 2 * bj)] = d.clone();
            out[(2 * bi, 2 * bj + 1)] = -b;
            out[(2 * bi + 1, 2 * bj)] = -cc;
            out[(2 * bi + 1, 2 * bj + 1)] = a.clone();
        }
    }
    out
}

fn scalar_multiple(m: &GfMat, base: &GfMat) -> Option<Gf> {
    let (i, j) = (0..base.rows())
        .flat_map(|i| (0..base.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !base[(i, j)].is_zero())?;
    let gamma = m[(i, j)].div(&base[(i, j)]).ok()?;
    (!gamma.is_zero() && *m == base.scale(&gamma)).then_some(gamma)
}

/// `γ` when `m` is a similitude of the given flavor over a field.
pub fn is_similitude(m: &GfMat, flavor: Flavor) -> Option<Gf> {
    if !m.is_square() || m.rows() % 2 == 1 {
        return None;
    }
    let f = m.field();
    let g = m.rows() / 2;
    match flavor {
        Flavor::GU => scalar_multiple(&m2_star(m).mul(m), &GfMat::identity(f, 2 * g)),
        Flavor::GSp => {
            let j = standard_j(f, g);
            scalar_multiple(&m.transpose().mul(&j).mul(m), &j)
        }
    }
}

/// `γ` with `M* M = γ I` for `M ∈ M_g(F_{p²})`, `*` the Frobenius conjugate transpose.
pub fn unitary_similitude_fp2(m: &GfMat) -> Option<Gf> {
    let f = m.field();
    assert_eq!(f.degree(), 2, "expected a matrix over F_{{p^2}}");
    let star = m.transpose().frobenius();
    scalar_multiple(&star.mul(m), &GfMat::identity(f, m.rows()))
}

/// The permutation `P` with `P^t J̃ P = J`: block index `i` goes to interleaved `2i`, `g + i` to `2i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationData {
    pub g: usize,
    /// `P e_c = e_{perm[c]}`.
    pub perm: Vec<usize>,
}

pub fn build_conjugation(g: usize) -> ConjugationData {
    assert!(g >= 1);
    let perm: Vec<usize> = (0..2 * g).map(|c| if c < g { 2 * c } else { 2 * (c - g) + 1 }).collect();
    let data = ConjugationData { g, perm };
    let f = FiniteField::prime_field(3).unwrap();
    let p = data.matrix(&f);
    assert_eq!(p.transpose().mul(&block_j(&f, g)).mul(&p), standard_j(&f, g));
    data
}

impl ConjugationData {
    pub fn matrix(&self, field: &FiniteField) -> GfMat {
        let n = 2 * self.g;
        let mut m = GfMat::zeros(field, n, n);
        for (c, &r) in self.perm.iter().enumerate() {
            m[(r, c)] = field.one();
        }
        m
    }

    /// `P^t M P`.
    pub fn to_gsp(&self, m: &GfMat) -> GfMat {
        let p = self.matrix(m.field());
        p.transpose().mul(m).mul(&p)
    }

    /// `P M P^t`.
    pub fn to_gu(&self, m: &GfMat) -> GfMat {
        let p = self.matrix(m.field());
        p.mul(m).mul(&p.transpose())
    }
}

fn cayley(x: &GfMat) -> Option<GfMat> {
    let f = x.field();
    let id = GfMat::identity(f, x.rows());
    Some(id.sub(x).mul(&id.add(x).inverse()?))
}

/// A random element of `GU_g(M_2(K))`: a Cayley transform of a skew-hermitian matrix
/// composed with a random quaternion scalar.
pub fn random_gu_m2<R: Rng + ?Sized>(field: &FiniteField, g: usize, rng: &mut R) -> GfMat {
    let n = 2 * g;
    loop {
        let mut x = GfMat::zeros(field, n, n);
        for bi in 0..g {
            for bj in bi..g {
                let blk: [Gf; 4] = std::array::from_fn(|_| field.random(rng));
                if bi == bj {
                    // trace zero blocks are exactly the skew ones
                    x[(2 * bi, 2 * bi)] = blk[0].clone();
                    x[(2 * bi, 2 * bi + 1)] = blk[1].clone();
                    x[(2 * bi + 1, 2 * bi)] = blk[2].clone();
                    x[(2 * bi + 1, 2 * bi + 1)] = -&blk[0];
                } else {
                    x[(2 * bi, 2 * bj)] = blk[0].clone();
                    x[(2 * bi, 2 * bj + 1)] = blk[1].clone();
                    x[(2 * bi + 1, 2 * bj)] = blk[2].clone();
                    x[(2 * bi + 1, 2 * bj + 1)] = blk[3].clone();
                    // X_ji = -adj(X_ij)
                    x[(2 * bj, 2 * bi)] = -&blk[3];
                    x[(2 * bj, 2 * bi + 1)] = blk[1].clone();
                    x[(2 * bj + 1, 2 * bi)] = blk[2].clone();
                    x[(2 * bj + 1, 2 * bi + 1)] = -&blk[0];
                }
            }
        }
        let Some(u) = cayley(&x) else { continue };
        let s: [Gf; 4] = std::array::from_fn(|_| field.random(rng));
        if (&s[0] * &s[3] - &s[1] * &s[2]).is_zero() {
            continue;
        }
        let mut d = GfMat::zeros(field, n, n);
        for b in 0..g {
            d[(2 * b, 2 * b)] = s[0].clone();
            d[(2 * b, 2 * b + 1)] = s[1].clone();
            d[(2 * b + 1, 2 * b)] = s[2].clone();
            d[(2 * b + 1, 2 * b + 1)] = s[3].clone();
        }
        return u.mul(&d);
    }
}

/// A random element of `GSp_2g(K)`: a Cayley transform of `J S` (`S` symmetric)
/// times `diag(I, γ I)`.
pub fn random_gsp<R: Rng + ?Sized>(field: &FiniteField, g: usize, rng: &mut R) -> GfMat {
    let n = 2 * g;
    let j = standard_j(field, g);
    loop {
        let mut s = GfMat::zeros(field, n, n);
        for a in 0..n {
            for b in a..n {
                let v = field.random(rng);
                s[(a, b)] = v.clone();
                s[(b, a)] = v;
            }
        }
        let Some(u) = cayley(&j.mul(&s)) else { continue };
        let gamma = field.random_nonzero(rng);
        let mut d = GfMat::identity(field, n);
        for i in g..n {
            d[(i, i)] = gamma.clone();
        }
        return u.mul(&d);
    }
}
