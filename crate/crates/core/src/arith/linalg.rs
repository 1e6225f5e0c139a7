//! Dense matrices over a finite field.

use std::fmt;

use super::ff::{FiniteField, Gf};
use super::poly::Poly;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GfMat {
    field: FiniteField,
    rows: usize,
    cols: usize,
    data: Vec<Gf>,
}

impl GfMat {
    pub fn zeros(field: &FiniteField, rows: usize, cols: usize) -> Self {
        GfMat { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &FiniteField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows(field: &FiniteField, rows: Vec<Vec<Gf>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Gf> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        GfMat { field: field.clone(), rows: r, cols: c, data }
    }

    pub fn from_ints(field: &FiniteField, rows: &[Vec<i64>]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Self::from_rows(field, rows)
    }

    pub fn diagonal(field: &FiniteField, d: &[Gf]) -> Self {
        let mut m = Self::zeros(field, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Gf] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Gf> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> GfMat {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map(&self, target: &FiniteField, f: impl Fn(&Gf) -> Gf) -> GfMat {
        GfMat {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entrywise `x ↦ x^p`.
    pub fn frobenius(&self) -> GfMat {
        self.map(&self.field.clone(), |x| x.frobenius())
    }

    pub fn add(&self, o: &GfMat) -> GfMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        GfMat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &GfMat) -> GfMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        GfMat { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: &Gf) -> GfMat {
        self.map(&self.field.clone(), |x| x * k)
    }

    pub fn mul(&self, o: &GfMat) -> GfMat {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a * &o[(k, j)];
                    out[(i, j)] += &t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Gf]) -> Vec<Gf> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += &(a * b);
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> GfMat {
        let mut acc = Self::identity(&self.field, self.rows);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Evaluate a polynomial at this (square) matrix.
    pub fn eval_poly(&self, f: &Poly) -> GfMat {
        let n = self.rows;
        let mut acc = Self::zeros(&self.field, n, n);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, piv);
            let inv = self[(r, c)].inv().unwrap();
            for j in 0..self.cols {
                self[(r, j)] = &self[(r, j)] * &inv;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let t = &f * &self[(r, j)];
                        self[(i, j)] -= &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{v : A v = 0}`, in canonical (RREF) order.
    pub fn kernel(&self) -> Vec<Vec<Gf>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&m[(r, f)];
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<GfMat> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Self::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = self.field.one();
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> Gf {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return self.field.zero();
            };
            if piv != c {
                m.swap_rows(c, piv);
                det = -&det;
            }
            det = &det * &m[(c, c)];
            let inv = m[(c, c)].inv().unwrap();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] * &inv;
                for j in c..n {
                    let t = &f * &m[(c, j)];
                    m[(i, j)] -= &t;
                }
            }
        }
        det
    }

    /// Solve `A x = b`, returning one solution if it exists.
    pub fn solve(&self, b: &[Gf]) -> Option<Vec<Gf>> {
        let mut aug = Self::zeros(&self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let piv = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Characteristic polynomial `det(xI - A)` via reduction to Hessenberg form.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let f = self.field.clone();
        let mut h = self.clone();
        // similarity transform to upper Hessenberg
        for m in 1..n.saturating_sub(1) {
            let Some(piv) = (m..n).find(|&i| !h[(i, m - 1)].is_zero()) else {
                continue;
            };
            if piv != m {
                h.swap_rows(piv, m);
                for i in 0..n {
                    h.data.swap(i * n + piv, i * n + m);
                }
            }
            let inv = h[(m, m - 1)].inv().unwrap();
            for i in m + 1..n {
                if h[(i, m - 1)].is_zero() {
                    continue;
                }
                let u = &h[(i, m - 1)] * &inv;
                for j in 0..n {
                    let t = &u * &h[(m, j)];
                    h[(i, j)] -= &t;
                }
                for j in 0..n {
                    let t = &u * &h[(j, i)];
                    h[(j, m)] += &t;
                }
            }
        }
        // recurrence on leading principal submatrices
        let x = Poly::x(&f);
        let mut ps: Vec<Poly> = vec![Poly::one(&f)];
        for k in 0..n {
            let mut pk = x.sub(&Poly::constant(h[(k, k)].clone())).mul(&ps[k]);
            let mut prod = f.one();
            for i in (0..k).rev() {
                prod = &prod * &h[(i + 1, i)];
                let coef = &prod * &h[(i, k)];
                pk = pk.sub(&ps[i].scale(&coef));
            }
            ps.push(pk);
        }
        ps.pop().unwrap()
    }

    /// Row-wise text rendering with serialized field elements.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for GfMat {
    type Output = Gf;
    fn index(&self, (i, j): (usize, usize)) -> &Gf {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for GfMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Gf {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for GfMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Row-reduced basis of the span of `vectors` (empty vectors dropped).
pub fn span_basis(field: &FiniteField, vectors: &[Vec<Gf>], dim: usize) -> Vec<Vec<Gf>> {
    if vectors.is_empty() {
        return vec![];
    }
    let mut m = GfMat::from_rows(field, vectors.to_vec());
    let r = m.rref().len();
    debug_assert_eq!(m.cols(), dim);
    (0..r).map(|i| m.row(i).to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(f: &FiniteField, n: usize, rng: &mut ChaCha8Rng) -> GfMat {
        let rows = (0..n).map(|_| (0..n).map(|_| f.random(rng)).collect()).collect();
        GfMat::from_rows(f, rows)
    }

    #[test]
    fn charpoly_annihilates_and_matches_det() {
        let f = FiniteField::new(7, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..7 {
            let a = random(&f, n, &mut rng);
            let cp = a.charpoly();
            assert_eq!(cp.deg(), n);
            assert!(a.eval_poly(&cp).is_zero());
            let c0 = cp.coeff(0);
            let det = a.determinant();
            let expect = if n % 2 == 0 { det } else { -&det };
            assert_eq!(c0, expect);
        }
    }

    #[test]
    fn inverse_and_kernel() {
        let f = FiniteField::new(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random(&f, 4, &mut rng);
            match a.inverse() {
                Some(inv) => {
                    assert_eq!(a.mul(&inv), GfMat::identity(&f, 4));
                    assert!(a.kernel().is_empty());
                }
                None => {
                    assert!(a.determinant().is_zero());
                    for v in a.kernel() {
                        assert!(a.mul_vec(&v).iter().all(|x| x.is_zero()));
                    }
                }
            }
        }
    }
}
