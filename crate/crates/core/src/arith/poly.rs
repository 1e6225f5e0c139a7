//! Univariate polynomials over a [`FiniteField`] and their factorization.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ff::{FiniteField, Gf};
use super::FieldError;

/// Dense polynomial, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FiniteField,
    c: Vec<Gf>,
}

impl Poly {
    pub fn new(field: &FiniteField, mut c: Vec<Gf>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { field: field.clone(), c }
    }

    pub fn zero(field: &FiniteField) -> Self {
        Poly { field: field.clone(), c: vec![] }
    }

    pub fn one(field: &FiniteField) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Gf) -> Self {
        let f = c.field().clone();
        Self::new(&f, vec![c])
    }

    /// The monomial `x`.
    pub fn x(field: &FiniteField) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    /// `x - a`.
    pub fn linear(a: &Gf) -> Self {
        let f = a.field().clone();
        Self::new(&f, vec![-a, f.one()])
    }

    pub fn from_ints(field: &FiniteField, c: &[i64]) -> Self {
        Self::new(field, c.iter().map(|&x| field.from_int(x)).collect())
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Gf] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Gf {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn lead(&self) -> Gf {
        self.c.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv().unwrap();
        self.scale(&inv)
    }

    pub fn scale(&self, k: &Gf) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(&self.field, (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new(&self.field, (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(&self.field, out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        if self.c.len() <= dd {
            return (Poly::zero(&self.field), self.clone());
        }
        let lead_inv = d.lead().inv().unwrap();
        let mut r = self.c.clone();
        let mut q = vec![self.field.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let coef = &r[i] * &lead_inv;
            if coef.is_zero() {
                continue;
            }
            for k in 0..=dd {
                let t = &coef * &d.c[k];
                r[i - dd + k] -= &t;
            }
            q[i - dd] = coef;
        }
        r.truncate(dd);
        (Poly::new(&self.field, q), Poly::new(&self.field, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, x)| x.scale(i as u64))
            .collect();
        Poly::new(&self.field, c)
    }

    pub fn eval(&self, x: &Gf) -> Gf {
        let mut acc = self.field.zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn mulmod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.field).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    /// Apply a field map to every coefficient.
    pub fn map_coeffs(&self, target: &FiniteField, f: impl Fn(&Gf) -> Gf) -> Poly {
        Poly::new(target, self.c.iter().map(f).collect())
    }

    /// Roots in the coefficient field, sorted, without multiplicity.
    pub fn roots(&self) -> Vec<Gf> {
        let mut out: Vec<Gf> = factor_poly(self)
            .unwrap_or_default()
            .into_iter()
            .filter(|(g, _)| g.deg() == 1)
            .map(|(g, _)| -&g.coeff(0))
            .collect();
        out.sort();
        out
    }

    fn seed(&self) -> u64 {
        // FNV-1a over the serialized coefficients
        let mut h: u64 = 0xcbf29ce484222325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        feed(self.field.p());
        feed(self.field.degree() as u64);
        for c in &self.c {
            for &d in c.coeffs() {
                feed(d);
            }
        }
        h
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*x^{i}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Factor `f` into monic irreducibles with multiplicities, sorted by (degree, coefficients).
pub fn factor_poly(f: &Poly) -> Result<Vec<(Poly, usize)>, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (g, m) in squarefree(&f.monic()) {
        for (h, d) in distinct_degree(&g) {
            let mut rng = ChaCha8Rng::seed_from_u64(h.seed());
            for irr in equal_degree(&h, d, &mut rng) {
                out.push((irr, m));
            }
        }
    }
    out.sort_by(|a, b| {
        a.0.deg()
            .cmp(&b.0.deg())
            .then_with(|| a.0.c.cmp(&b.0.c))
            .then(a.1.cmp(&b.1))
    });
    Ok(out)
}

/// Squarefree factorization of a monic polynomial: pairs `(g, m)` with `g` squarefree.
pub fn squarefree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field().clone();
    let p = field.p() as usize;
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let fp = f.derivative();
    let mut c = f.gcd(&fp);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if fac.deg() > 0 {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if c.deg() > 0 {
        // c is a p-th power
        let d = field.degree();
        let root_c: Vec<Gf> = (0..=c.deg() / p)
            .map(|k| c.coeff(k * p).frobenius_pow(d - 1))
            .collect();
        let r = Poly::new(&field, root_c);
        for (g, m) in squarefree(&r) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field().clone();
    let q = field.order();
    let x = Poly::x(&field);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(&q, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let dr = rest.deg();
        out.push((rest, dr));
    }
    out
}

/// Split a product of distinct monic irreducibles of degree `d`.
pub fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    let field = f.field().clone();
    let p = field.p();
    loop {
        let a = Poly::new(&field, (0..n).map(|_| field.random(rng)).collect());
        if a.degree().is_none_or(|k| k == 0) {
            continue;
        }
        let g0 = f.gcd(&a);
        let candidate = if g0.deg() > 0 {
            g0
        } else if p == 2 {
            // absolute trace of F_{2^{kd}} to F_2 applied to a
            let steps = field.degree() * d;
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..steps {
                t = t.mulmod(&t, f);
                acc = acc.add(&t);
            }
            f.gcd(&acc)
        } else {
            let e = (field.order().pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let b = a.powmod(&e, f).sub(&Poly::one(&field));
            f.gcd(&b)
        };
        if candidate.deg() > 0 && candidate.deg() < n {
            let other = f.div_exact(&candidate);
            let mut out = equal_degree(&candidate, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn small_examples() {
        let f3 = FiniteField::new(3, 1).unwrap();
        let f = Poly::from_ints(&f3, &[1, 0, 1]);
        let fac = factor_poly(&f).unwrap();
        assert_eq!(fac.len(), 1);
        assert_eq!(fac[0].0, f);

        let f5 = FiniteField::new(5, 1).unwrap();
        let g = Poly::from_ints(&f5, &[-1, 0, 1]);
        let fac = factor_poly(&g).unwrap();
        assert_eq!(fac.len(), 2);
        assert!(fac.iter().all(|(h, m)| h.deg() == 1 && *m == 1));
        assert!(factor_poly(&Poly::zero(&f5)).is_err());
    }

    fn product(fac: &[(Poly, usize)], field: &FiniteField) -> Poly {
        let mut acc = Poly::one(field);
        for (g, m) in fac {
            for _ in 0..*m {
                acc = acc.mul(g);
            }
        }
        acc
    }

    #[test]
    fn round_trip_random_f11() {
        let f = FiniteField::new(11, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let c: Vec<Gf> = (0..9).map(|_| f.random(&mut rng)).collect();
            let mut poly = Poly::new(&f, c);
            if poly.degree() != Some(8) {
                continue;
            }
            poly = poly.monic();
            let fac = factor_poly(&poly).unwrap();
            assert_eq!(product(&fac, &f), poly);
        }
    }

    #[test]
    fn repeated_and_pth_power_factors() {
        for (p, d) in [(2u64, 2usize), (3, 2), (2, 3), (5, 1)] {
            let f = FiniteField::new(p, d).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p * 10 + d as u64);
            for _ in 0..10 {
                let mut parts = Vec::new();
                for _ in 0..3 {
                    let k = rng.gen_range(1..4);
                    let c: Vec<Gf> = (0..=k).map(|_| f.random(&mut rng)).collect();
                    let g = Poly::new(&f, c);
                    if g.degree().unwrap_or(0) > 0 {
                        parts.push(g.monic());
                    }
                }
                let mut poly = Poly::one(&f);
                for (i, g) in parts.iter().enumerate() {
                    for _ in 0..(i * p as usize + 1) {
                        poly = poly.mul(g);
                    }
                }
                let fac = factor_poly(&poly).unwrap();
                assert_eq!(product(&fac, &f), poly);
                for (g, _) in &fac {
                    assert_eq!(distinct_degree(g).len(), 1);
                    assert_eq!(distinct_degree(g)[0].1, g.deg());
                }
            }
        }
    }

    #[test]
    fn roots_over_extension() {
        let f9 = FiniteField::new(3, 2).unwrap();
        let g = Poly::from_ints(&f9, &[1, 0, 1]);
        let r = g.roots();
        assert_eq!(r.len(), 2);
        for x in r {
            assert!(g.eval(&x).is_zero());
        }
    }
}
