//! Finite fields `F_{p^d}` represented as `F_p[t]/(m(t))`.
//!
//! The defining polynomial `m` of each `(p, d)` is the smallest monic
//! irreducible polynomial of degree `d` when coefficient vectors
//! `(c_0, ..., c_{d-1})` are read as base-`p` integers with `c_0` the least
//! significant digit. Fields are interned, so the same `(p, d)` always yields
//! the same context and serialized elements are reproducible.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use rand::Rng;

use super::int::{is_prime, mod_inv, mod_pow};
use super::FieldError;

pub struct FieldCtx {
    p: u64,
    degree: usize,
    /// Monic, `degree + 1` coefficients, constant term first.
    modulus: Vec<u64>,
}

#[derive(Clone)]
pub struct FiniteField(Arc<FieldCtx>);

static REGISTRY: OnceLock<Mutex<HashMap<(u64, usize), FiniteField>>> = OnceLock::new();

impl FiniteField {
    /// The field with `p^degree` elements. Cached per `(p, degree)`.
    pub fn new(p: u64, degree: usize) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if p >= 1 << 31 {
            return Err(FieldError::PrimeTooLarge(p));
        }
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = reg.lock().unwrap().get(&(p, degree)) {
            return Ok(f.clone());
        }
        // computed outside the lock; a racing insert produces the same value
        let modulus = lowest_irreducible(p, degree);
        let field = FiniteField(Arc::new(FieldCtx { p, degree, modulus }));
        let mut guard = reg.lock().unwrap();
        Ok(guard.entry((p, degree)).or_insert(field).clone())
    }

    pub fn prime_field(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.degree() as u32)
    }

    /// Field order as `u64`, when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.degree() {
            acc = acc.checked_mul(self.p())?;
        }
        Some(acc)
    }

    pub fn zero(&self) -> Gf {
        Gf { field: self.clone(), c: vec![0; self.degree()] }
    }

    pub fn one(&self) -> Gf {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Gf {
        let mut c = vec![0; self.degree()];
        c[0] = n.rem_euclid(self.p() as i64) as u64;
        Gf { field: self.clone(), c }
    }

    /// The class of `t` (for degree 1 this is the constant root of the defining polynomial).
    pub fn generator(&self) -> Gf {
        if self.degree() == 1 {
            return self.from_int(-(self.modulus()[0] as i64));
        }
        let mut c = vec![0; self.degree()];
        c[1] = 1;
        Gf { field: self.clone(), c }
    }

    /// Element from arbitrary-length coefficients, reduced modulo the defining polynomial.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Gf {
        let p = self.p();
        let mut c: Vec<u64> = coeffs.iter().map(|x| x % p).collect();
        reduce_in_place(&mut c, self.modulus(), p);
        c.resize(self.degree(), 0);
        Gf { field: self.clone(), c }
    }

    pub fn from_signed_coeffs(&self, coeffs: &[i64]) -> Gf {
        let p = self.p() as i64;
        let v: Vec<u64> = coeffs.iter().map(|x| x.rem_euclid(p) as u64).collect();
        self.from_coeffs(&v)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Gf {
        let c = (0..self.degree()).map(|_| rng.gen_range(0..self.p())).collect();
        Gf { field: self.clone(), c }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Gf {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// All elements in increasing index order (only sensible for small fields).
    pub fn elements(&self) -> impl Iterator<Item = Gf> + '_ {
        let q = self.order_u64().expect("field too large to enumerate");
        (0..q).map(move |n| self.from_index(n))
    }

    /// Element whose coefficients are the base-`p` digits of `n`.
    pub fn from_index(&self, mut n: u64) -> Gf {
        let p = self.p();
        let mut c = vec![0; self.degree()];
        for slot in c.iter_mut() {
            *slot = n % p;
            n /= p;
        }
        Gf { field: self.clone(), c }
    }

    pub fn same_as(&self, other: &FiniteField) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.p() == other.p() && self.degree() == other.degree())
    }

    /// Parse the `[c0,c1,...]` text form.
    pub fn parse(&self, s: &str) -> Result<Gf, FieldError> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| FieldError::Parse(s.to_string()))?;
        let coeffs: Result<Vec<u64>, _> = if inner.trim().is_empty() {
            Ok(vec![])
        } else {
            inner.split(',').map(|t| t.trim().parse::<u64>()).collect()
        };
        let coeffs = coeffs.map_err(|_| FieldError::Parse(s.to_string()))?;
        if coeffs.len() != self.degree() || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(FieldError::Parse(s.to_string()));
        }
        Ok(Gf { field: self.clone(), c: coeffs })
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p(), self.degree())
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}
impl Eq for FiniteField {}

impl Hash for FiniteField {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p().hash(state);
        self.degree().hash(state);
    }
}

/// An element of a [`FiniteField`].
#[derive(Clone)]
pub struct Gf {
    field: FiniteField,
    c: Vec<u64>,
}

impl Gf {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// `Some(c)` when the element lies in the prime field.
    pub fn as_prime_field(&self) -> Option<u64> {
        if self.c[1..].iter().all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }

    /// Base-`p` index; inverse of [`FiniteField::from_index`].
    pub fn index(&self) -> u64 {
        let p = self.field.p();
        self.c.iter().rev().fold(0u64, |acc, &d| acc * p + d)
    }

    fn check(&self, other: &Gf) {
        assert!(
            self.field.same_as(&other.field),
            "field mismatch: {:?} vs {:?}",
            self.field,
            other.field
        );
    }

    pub fn inv(&self) -> Result<Gf, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.field.p();
        let (g, s) = fp_poly_xgcd_inverse(&self.c, self.field.modulus(), p);
        debug_assert_eq!(g, 1);
        Ok(self.field.from_coeffs(&s))
    }

    pub fn pow(&self, mut e: u64) -> Gf {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, e: &BigUint) -> Gf {
        let mut acc = self.field.one();
        for i in (0..e.bits()).rev() {
            acc = &acc * &acc;
            if e.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    /// `x^(p^k)`.
    pub fn frobenius_pow(&self, k: usize) -> Gf {
        let mut x = self.clone();
        for _ in 0..k % self.field.degree().max(1) {
            x = x.pow(self.field.p());
        }
        x
    }

    /// The absolute Frobenius `x ↦ x^p`.
    pub fn frobenius(&self) -> Gf {
        self.pow(self.field.p())
    }

    /// `x^{-1}` or an error; shorthand for division.
    pub fn div(&self, other: &Gf) -> Result<Gf, FieldError> {
        Ok(self * &other.inv()?)
    }

    /// Norm down to the prime field.
    pub fn absolute_norm(&self) -> u64 {
        let mut acc = self.field.one();
        let mut x = self.clone();
        for _ in 0..self.field.degree() {
            acc = &acc * &x;
            x = x.frobenius();
        }
        acc.as_prime_field().expect("norm lies in the prime field")
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self) -> u64 {
        assert!(!self.is_zero());
        let q1 = self.field.order_u64().expect("small field") - 1;
        let mut ord = q1;
        for (r, _) in super::int::factorize(q1) {
            while ord % r == 0 && self.pow(ord / r).is_one() {
                ord /= r;
            }
        }
        ord
    }

    pub fn scale(&self, k: u64) -> Gf {
        let p = self.field.p();
        let k = k % p;
        Gf { field: self.field.clone(), c: self.c.iter().map(|&x| x * k % p).collect() }
    }
}

/// Checked arithmetic entry point: field mismatches and division by zero are errors
/// rather than panics.
pub fn ff_arith(a: &Gf, b: &Gf, op: FfOp) -> Result<Gf, FieldError> {
    if !a.field.same_as(&b.field) {
        return Err(FieldError::Mismatch);
    }
    Ok(match op {
        FfOp::Add => a + b,
        FfOp::Mul => a * b,
        FfOp::Inv => b.inv()?,
        FfOp::Frobenius => a.frobenius(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfOp {
    Add,
    Mul,
    Inv,
    Frobenius,
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.c == other.c
    }
}
impl Eq for Gf {}

impl Hash for Gf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.p().hash(state);
        self.c.hash(state);
    }
}

impl PartialOrd for Gf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the coefficient vector `(c0, c1, ...)`.
impl Ord for Gf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.cmp(&other.c)
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<'a> Add<&'a Gf> for &'a Gf {
    type Output = Gf;
    fn add(self, rhs: &Gf) -> Gf {
        self.check(rhs);
        let p = self.field.p();
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| (a + b) % p).collect();
        Gf { field: self.field.clone(), c }
    }
}

impl<'a> Sub<&'a Gf> for &'a Gf {
    type Output = Gf;
    fn sub(self, rhs: &Gf) -> Gf {
        self.check(rhs);
        let p = self.field.p();
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| (a + p - b) % p).collect();
        Gf { field: self.field.clone(), c }
    }
}

impl<'a> Mul<&'a Gf> for &'a Gf {
    type Output = Gf;
    fn mul(self, rhs: &Gf) -> Gf {
        self.check(rhs);
        let p = self.field.p();
        let d = self.field.degree();
        if d == 1 {
            return Gf { field: self.field.clone(), c: vec![self.c[0] * rhs.c[0] % p] };
        }
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        reduce_in_place(&mut prod, self.field.modulus(), p);
        prod.resize(d, 0);
        Gf { field: self.field.clone(), c: prod }
    }
}

impl Neg for &Gf {
    type Output = Gf;
    fn neg(self) -> Gf {
        let p = self.field.p();
        Gf { field: self.field.clone(), c: self.c.iter().map(|&a| (p - a) % p).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Gf> for Gf {
            type Output = Gf;
            fn $m(self, rhs: Gf) -> Gf {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Gf> for Gf {
            type Output = Gf;
            fn $m(self, rhs: &Gf) -> Gf {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Gf {
    type Output = Gf;
    fn neg(self) -> Gf {
        -&self
    }
}

impl AddAssign<&Gf> for Gf {
    fn add_assign(&mut self, rhs: &Gf) {
        self.check(rhs);
        let p = self.field.p();
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a = (*a + b) % p;
        }
    }
}

impl SubAssign<&Gf> for Gf {
    fn sub_assign(&mut self, rhs: &Gf) {
        self.check(rhs);
        let p = self.field.p();
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a = (*a + p - b) % p;
        }
    }
}

impl MulAssign<&Gf> for Gf {
    fn mul_assign(&mut self, rhs: &Gf) {
        *self = &*self * rhs;
    }
}

// ---------------------------------------------------------------------------
// Dense polynomials over F_p (constant term first), used for field construction.

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Reduce `v` modulo the monic polynomial `m` in place (result has `len < deg m` after trim).
fn reduce_in_place(v: &mut Vec<u64>, m: &[u64], p: u64) {
    let dm = m.len() - 1;
    if v.len() <= dm {
        return;
    }
    for i in (dm..v.len()).rev() {
        let coef = v[i] % p;
        if coef == 0 {
            continue;
        }
        v[i] = 0;
        for k in 0..dm {
            let sub = coef * m[k] % p;
            v[i - dm + k] = (v[i - dm + k] + p - sub) % p;
        }
    }
    v.truncate(dm);
}

fn fp_poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    reduce_in_place(&mut prod, m, p);
    trim(&mut prod);
    prod
}

fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // b need not be monic
    let mut r: Vec<u64> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db] as i128, p).expect("nonzero leading coefficient");
    while r.len() > db {
        let top = r.len() - 1;
        let coef = r[top] * lead_inv % p;
        for k in 0..=db {
            let sub = coef * b[k] % p;
            r[top - db + k] = (r[top - db + k] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

fn fp_poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = fp_poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Returns `(1, s)` with `s·a ≡ 1 mod m` for `a` coprime to `m`.
fn fp_poly_xgcd_inverse(a: &[u64], m: &[u64], p: u64) -> (u64, Vec<u64>) {
    // invariant: r_i ≡ s_i · a (mod m)
    let mut r0: Vec<u64> = m.to_vec();
    let mut r1: Vec<u64> = a.to_vec();
    trim(&mut r1);
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // polynomial division r0 = q r1 + r
        let d1 = r1.len() - 1;
        let lead_inv = mod_inv(r1[d1] as i128, p).unwrap();
        let mut r = r0.clone();
        trim(&mut r);
        let mut q = vec![0u64; r.len().saturating_sub(d1).max(1)];
        while r.len() > d1 {
            let top = r.len() - 1;
            let coef = r[top] * lead_inv % p;
            q[top - d1] = coef;
            for k in 0..=d1 {
                let sub = coef * r1[k] % p;
                r[top - d1 + k] = (r[top - d1 + k] + p - sub) % p;
            }
            trim(&mut r);
        }
        // s = s0 - q s1
        let mut qs = vec![0u64; q.len() + s1.len()];
        for (i, &x) in q.iter().enumerate() {
            for (j, &y) in s1.iter().enumerate() {
                qs[i + j] = (qs[i + j] + x * y) % p;
            }
        }
        let len = qs.len().max(s0.len());
        let mut s = vec![0u64; len];
        for i in 0..len {
            let a0 = *s0.get(i).unwrap_or(&0);
            let b0 = *qs.get(i).unwrap_or(&0);
            s[i] = (a0 + p - b0) % p;
        }
        trim(&mut s);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is a nonzero constant
    let c = r0[0];
    let cinv = mod_inv(c as i128, p).unwrap();
    let s: Vec<u64> = s0.iter().map(|&x| x * cinv % p).collect();
    (1, s)
}

fn fp_poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    reduce_in_place(&mut b, m, p);
    trim(&mut b);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_poly_mulmod(&acc, &b, m, p);
        }
        b = fp_poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

/// Ben-Or irreducibility test for a monic polynomial over F_p.
pub fn is_irreducible_fp(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 0..d / 2 {
        h = fp_poly_powmod(&h, p, f, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = fp_poly_gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn lowest_irreducible(p: u64, d: usize) -> Vec<u64> {
    let mut digits = vec![0u64; d];
    loop {
        let mut f = digits.clone();
        f.push(1);
        if (d == 1 || f[0] != 0) && is_irreducible_fp(&f, p) {
            return f;
        }
        // increment base-p counter, c_0 least significant
        let mut i = 0;
        loop {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
            assert!(i < d, "no irreducible polynomial found");
        }
    }
}

/// `a^e mod p` helper re-exported for callers that only need prime-field powers.
pub fn fp_pow(a: u64, e: u64, p: u64) -> u64 {
    mod_pow(a, e, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn defining_polynomials_are_lowest() {
        assert_eq!(FiniteField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FiniteField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::new(11, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FiniteField::new(13, 2).unwrap().modulus(), &[2, 0, 1]);
        assert_eq!(FiniteField::new(5, 1).unwrap().modulus(), &[0, 1]);
    }

    #[test]
    fn f4_cube_roots() {
        let f4 = FiniteField::new(2, 2).unwrap();
        let w = f4.generator();
        let w2 = &w * &w;
        assert!((&w * &w2).is_one());
        assert_eq!(w.frobenius(), w2);
    }

    #[test]
    fn inverse_every_element_f121() {
        let f = FiniteField::new(11, 2).unwrap();
        for x in f.elements().skip(1) {
            assert!((&x * &x.inv().unwrap()).is_one());
            assert_eq!(x.frobenius().frobenius(), x);
        }
        assert_eq!(f.zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn mismatch_is_reported() {
        let a = FiniteField::new(3, 2).unwrap().one();
        let b = FiniteField::new(3, 3).unwrap().one();
        assert_eq!(ff_arith(&a, &b, FfOp::Add), Err(FieldError::Mismatch));
    }

    #[test]
    fn large_degree_field_axioms() {
        let f = FiniteField::new(13, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = f.random_nonzero(&mut rng);
            assert!((&a * &a.inv().unwrap()).is_one());
            assert_eq!(a.frobenius_pow(12), a);
        }
    }

    #[test]
    fn text_round_trip() {
        let f = FiniteField::new(11, 2).unwrap();
        let x = f.from_coeffs(&[3, 7]);
        assert_eq!(x.to_string(), "[3,7]");
        assert_eq!(f.parse("[3,7]").unwrap(), x);
        assert!(f.parse("[3,11]").is_err());
    }
}
