//! Quaternion algebras `(a, b / Q)` and their elements.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::int::{legendre, valuation};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `B = (a, b / Q)`: `i^2 = a`, `j^2 = b`, `k = ij = -ji`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuatAlgebra {
    pub p: u64,
    pub a: i64,
    pub b: i64,
}

/// `x0 + x1 i + x2 j + x3 k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuatElem(pub [Rat; 4]);

impl QuatElem {
    pub fn new(c: [Rat; 4]) -> Self {
        QuatElem(c)
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        QuatElem(c.map(rat))
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        QuatElem([0, 1, 2, 3].map(|i| Rat::from_integer(c[i].clone())))
    }

    pub fn scalar(r: Rat) -> Self {
        QuatElem([r, Rat::zero(), Rat::zero(), Rat::zero()])
    }

    pub fn zero() -> Self {
        Self::scalar(Rat::zero())
    }

    pub fn one() -> Self {
        Self::scalar(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn conj(&self) -> Self {
        let c = &self.0;
        QuatElem([c[0].clone(), -&c[1], -&c[2], -&c[3]])
    }

    pub fn trd(&self) -> Rat {
        &self.0[0] * rat(2)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        QuatElem(self.0.clone().map(|x| x * r))
    }

    pub fn coords(&self) -> &[Rat; 4] {
        &self.0
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

impl Serialize for QuatElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuatElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v: Vec<String> = Vec::deserialize(d)?;
        if v.len() != 4 {
            return Err(D::Error::custom("quaternion needs 4 coordinates"));
        }
        let mut c: [Rat; 4] = std::array::from_fn(|_| Rat::zero());
        for (slot, s) in c.iter_mut().zip(&v) {
            *slot = s.parse::<Rat>().map_err(D::Error::custom)?;
        }
        Ok(QuatElem(c))
    }
}

impl fmt::Debug for QuatElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl<'a> Add<&'a QuatElem> for &'a QuatElem {
    type Output = QuatElem;
    fn add(self, o: &QuatElem) -> QuatElem {
        QuatElem([0, 1, 2, 3].map(|i| &self.0[i] + &o.0[i]))
    }
}

impl<'a> Sub<&'a QuatElem> for &'a QuatElem {
    type Output = QuatElem;
    fn sub(self, o: &QuatElem) -> QuatElem {
        QuatElem([0, 1, 2, 3].map(|i| &self.0[i] - &o.0[i]))
    }
}

impl Neg for &QuatElem {
    type Output = QuatElem;
    fn neg(self) -> QuatElem {
        QuatElem(self.0.clone().map(|x| -x))
    }
}

impl QuatAlgebra {
    pub fn new(p: u64, a: i64, b: i64) -> Self {
        QuatAlgebra { p, a, b }
    }

    pub fn mul(&self, x: &QuatElem, y: &QuatElem) -> QuatElem {
        let a = rat(self.a);
        let b = rat(self.b);
        let ab = &a * &b;
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        let z0 = x0 * y0 + &a * x1 * y1 + &b * x2 * y2 - &ab * x3 * y3;
        let z1 = x0 * y1 + x1 * y0 - &b * x2 * y3 + &b * x3 * y2;
        let z2 = x0 * y2 + x2 * y0 + &a * x1 * y3 - &a * x3 * y1;
        let z3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1;
        QuatElem([z0, z1, z2, z3])
    }

    pub fn mul3(&self, x: &QuatElem, y: &QuatElem, z: &QuatElem) -> QuatElem {
        self.mul(&self.mul(x, y), z)
    }

    pub fn norm(&self, x: &QuatElem) -> Rat {
        let [x0, x1, x2, x3] = &x.0;
        let a = rat(self.a);
        let b = rat(self.b);
        x0 * x0 - &a * x1 * x1 - &b * x2 * x2 + &a * &b * x3 * x3
    }

    /// `trd(x ȳ)`, twice the norm bilinear form.
    pub fn pairing(&self, x: &QuatElem, y: &QuatElem) -> Rat {
        let [x0, x1, x2, x3] = &x.0;
        let [y0, y1, y2, y3] = &y.0;
        let a = rat(self.a);
        let b = rat(self.b);
        rat(2) * (x0 * y0 - &a * x1 * y1 - &b * x2 * y2 + &a * &b * x3 * y3)
    }

    pub fn inv(&self, x: &QuatElem) -> Option<QuatElem> {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        Some(x.conj().scale(&n.recip()))
    }

    /// Places where the algebra ramifies, among `∞` and the primes up to `bound`.
    pub fn ramified_places(&self, bound: u64) -> Vec<Place> {
        let a = rat(self.a);
        let b = rat(self.b);
        let mut out = Vec::new();
        for q in crate::arith::int::primes_up_to(bound) {
            if hilbert_symbol(&a, &b, Place::Prime(q)) == -1 {
                out.push(Place::Prime(q));
            }
        }
        if hilbert_symbol(&a, &b, Place::Infinity) == -1 {
            out.push(Place::Infinity);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Prime(u64),
    Infinity,
}

/// Hilbert symbol `(a, b)_v`; panics on zero input.
pub fn hilbert_symbol(a: &Rat, b: &Rat, v: Place) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    // clear denominators by squares
    let ai = a.numer() * a.denom();
    let bi = b.numer() * b.denom();
    match v {
        Place::Infinity => {
            if ai.is_negative() && bi.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => hilbert_int(&ai, &bi, p),
    }
}

fn split_val(n: &BigInt, p: u64) -> (u32, BigInt) {
    let v = valuation(n, p);
    (v, n / BigInt::from(p).pow(v))
}

fn hilbert_int(a: &BigInt, b: &BigInt, p: u64) -> i32 {
    let (alpha, u) = split_val(a, p);
    let (beta, w) = split_val(b, p);
    if p == 2 {
        let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8)).to_i64().unwrap();
        let (u8_, w8) = (m8(&u), m8(&w));
        let eps = |x: i64| ((x - 1) / 2) % 2;
        let omega = |x: i64| ((x * x - 1) / 8) % 2;
        let e = eps(u8_) * eps(w8) + alpha as i64 * omega(w8) + beta as i64 * omega(u8_);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let m = |x: &BigInt| x.mod_floor(&BigInt::from(p)).to_i64().unwrap();
        let mut s = 1;
        if (alpha * beta) % 2 == 1 && p % 4 == 3 {
            s = -s;
        }
        if beta % 2 == 1 {
            s *= legendre(m(&u), p);
        }
        if alpha % 2 == 1 {
            s *= legendre(m(&w), p);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_table() {
        let b = QuatAlgebra::new(3, -1, -3);
        let i = QuatElem::from_ints([0, 1, 0, 0]);
        let j = QuatElem::from_ints([0, 0, 1, 0]);
        let k = QuatElem::from_ints([0, 0, 0, 1]);
        assert_eq!(b.mul(&i, &i), QuatElem::from_ints([-1, 0, 0, 0]));
        assert_eq!(b.mul(&j, &j), QuatElem::from_ints([-3, 0, 0, 0]));
        assert_eq!(b.mul(&i, &j), k);
        assert_eq!(b.mul(&j, &i), -&k);
        assert_eq!(b.mul(&k, &k), QuatElem::from_ints([-3, 0, 0, 0]));
    }

    #[test]
    fn symbols_for_hamilton_quaternions() {
        let m1 = rat(-1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Infinity), -1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Prime(3)), 1);
    }
}
