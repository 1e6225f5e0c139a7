//! Truncated Witt vectors `W_k(F_{p^2})`, realized as `(Z/p^k)[t]/(M(t))`
//! where `M` is the integer lift of the defining polynomial of `F_{p^2}`.
//! The Frobenius lift sends `t` to the root `s` of `M` with `s ≡ t^p (mod p)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use super::ff::{FiniteField, Gf};
use super::int::mod_inv;

pub struct WittCtx {
    p: u64,
    k: u32,
    modulus_pk: u64,
    /// `t^2 = -m1 t - m0`.
    m0: u64,
    m1: u64,
    /// Coordinates of `σ(t)`.
    sigma_t: [u64; 2],
    residue: FiniteField,
}

#[derive(Clone)]
pub struct WittRing(Arc<WittCtx>);

static REGISTRY: OnceLock<Mutex<HashMap<(u64, u32), WittRing>>> = OnceLock::new();

impl WittRing {
    /// `W_k(F_{p^2})`, cached per `(p, k)`.
    pub fn new(p: u64, k: u32) -> Self {
        assert!(k >= 1);
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(r) = reg.lock().unwrap().get(&(p, k)) {
            return r.clone();
        }
        let residue = FiniteField::new(p, 2).expect("prime");
        let modulus_pk = p.checked_pow(k).expect("p^k overflows");
        assert!(modulus_pk < 1 << 31, "p^k too large");
        let m = residue.modulus();
        let mut ctx = WittCtx {
            p,
            k,
            modulus_pk,
            m0: m[0],
            m1: m[1],
            sigma_t: [0, 1],
            residue: residue.clone(),
        };
        // Newton iteration for the root of M near t^p
        let tp = residue.generator().frobenius();
        let mut ring = WittRing(Arc::new(WittCtx { sigma_t: [0, 1], ..ctx.clone_shallow() }));
        let mut s = ring.lift(&tp);
        for _ in 0..=k.ilog2() + 1 {
            let ms = ring.eval_modulus(&s);
            let dms = ring.eval_modulus_derivative(&s);
            s = &s - &(&ms * &dms.inv().expect("separable"));
        }
        ctx.sigma_t = s.c;
        ring = WittRing(Arc::new(ctx));
        let mut guard = reg.lock().unwrap();
        guard.entry((p, k)).or_insert(ring).clone()
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn precision(&self) -> u32 {
        self.0.k
    }

    /// `p^k`.
    pub fn modulus(&self) -> u64 {
        self.0.modulus_pk
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.0.residue
    }

    pub fn elem(&self, c0: i64, c1: i64) -> Witt {
        let m = self.modulus() as i64;
        Witt { ring: self.clone(), c: [c0.rem_euclid(m) as u64, c1.rem_euclid(m) as u64] }
    }

    pub fn zero(&self) -> Witt {
        self.elem(0, 0)
    }

    pub fn one(&self) -> Witt {
        self.elem(1, 0)
    }

    pub fn from_int(&self, n: i64) -> Witt {
        self.elem(n, 0)
    }

    /// The class of `t`.
    pub fn t(&self) -> Witt {
        self.elem(0, 1)
    }

    /// The lift with coordinates in `[0, p)` of a residue.
    pub fn lift(&self, x: &Gf) -> Witt {
        assert!(x.field().same_as(self.residue_field()));
        Witt { ring: self.clone(), c: [x.coeffs()[0], x.coeffs()[1]] }
    }

    /// Multiplicative (Teichmüller) representative of a residue.
    pub fn teichmuller(&self, x: &Gf) -> Witt {
        let q = self.p() * self.p();
        let mut w = self.lift(x);
        for _ in 1..self.precision() {
            w = w.pow(q);
        }
        w
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Witt {
        let m = self.modulus();
        Witt { ring: self.clone(), c: [rng.gen_range(0..m), rng.gen_range(0..m)] }
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Witt {
        loop {
            let w = self.random(rng);
            if w.is_unit() {
                return w;
            }
        }
    }

    fn eval_modulus(&self, s: &Witt) -> Witt {
        &(&(s * s) + &(s * &self.from_int(self.0.m1 as i64))) + &self.from_int(self.0.m0 as i64)
    }

    fn eval_modulus_derivative(&self, s: &Witt) -> Witt {
        &(s * &self.from_int(2)) + &self.from_int(self.0.m1 as i64)
    }

    fn same(&self, o: &WittRing) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || (self.p() == o.p() && self.precision() == o.precision())
    }
}

impl WittCtx {
    fn clone_shallow(&self) -> WittCtx {
        WittCtx {
            p: self.p,
            k: self.k,
            modulus_pk: self.modulus_pk,
            m0: self.m0,
            m1: self.m1,
            sigma_t: self.sigma_t,
            residue: self.residue.clone(),
        }
    }
}

impl PartialEq for WittRing {
    fn eq(&self, o: &Self) -> bool {
        self.same(o)
    }
}
impl Eq for WittRing {}

impl fmt::Debug for WittRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W_{}(F_{}^2)", self.precision(), self.p())
    }
}

/// Element `c0 + c1 t` of `W_k(F_{p^2})`.
#[derive(Clone)]
pub struct Witt {
    ring: WittRing,
    c: [u64; 2],
}

impl Witt {
    pub fn ring(&self) -> &WittRing {
        &self.ring
    }

    pub fn coords(&self) -> [u64; 2] {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0, 0]
    }

    pub fn is_one(&self) -> bool {
        self.c == [1, 0]
    }

    pub fn is_unit(&self) -> bool {
        !self.reduce().is_zero()
    }

    /// Image in `W_1 = F_{p^2}`.
    pub fn reduce(&self) -> Gf {
        let p = self.ring.p();
        self.ring.residue_field().from_coeffs(&[self.c[0] % p, self.c[1] % p])
    }

    /// Largest `v ≤ k` with `p^v` dividing both coordinates.
    pub fn valuation(&self) -> u32 {
        let p = self.ring.p();
        let mut v = 0;
        let (mut a, mut b) = (self.c[0], self.c[1]);
        while v < self.ring.precision() && a % p == 0 && b % p == 0 {
            a /= p;
            b /= p;
            v += 1;
        }
        v
    }

    /// Reduction modulo `p^j` viewed back inside `W_k` (coordinates in `[0, p^j)`).
    pub fn truncate(&self, j: u32) -> Witt {
        let m = self.ring.p().pow(j);
        Witt { ring: self.ring.clone(), c: [self.c[0] % m, self.c[1] % m] }
    }

    pub fn scale(&self, n: i64) -> Witt {
        self * &self.ring.from_int(n)
    }

    /// Divide by `p` when both coordinates are divisible; the result is only
    /// determined modulo `p^{k-1}`.
    pub fn div_p(&self) -> Option<Witt> {
        let p = self.ring.p();
        if self.c[0] % p != 0 || self.c[1] % p != 0 {
            return None;
        }
        Some(Witt { ring: self.ring.clone(), c: [self.c[0] / p, self.c[1] / p] })
    }

    pub fn sigma(&self) -> Witt {
        let s = &self.ring.0.sigma_t;
        let m = self.ring.modulus() as u128;
        let c0 = (self.c[0] as u128 + self.c[1] as u128 * s[0] as u128) % m;
        let c1 = (self.c[1] as u128 * s[1] as u128) % m;
        Witt { ring: self.ring.clone(), c: [c0 as u64, c1 as u64] }
    }

    /// `σ^{-1}`; equal to `σ` since the residue field has degree 2.
    pub fn sigma_inv(&self) -> Witt {
        self.sigma()
    }

    /// `σ^e` for any integer `e`.
    pub fn sigma_pow(&self, e: i64) -> Witt {
        if e.rem_euclid(2) == 1 {
            self.sigma()
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Option<Witt> {
        let r = self.reduce().inv().ok()?;
        let two = self.ring.from_int(2);
        let mut x = self.ring.lift(&r);
        for _ in 0..=self.ring.precision().ilog2() + 1 {
            x = &x * &(&two - &(self * &x));
        }
        Some(x)
    }

    pub fn pow(&self, mut e: u64) -> Witt {
        let mut acc = self.ring.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }
}

impl PartialEq for Witt {
    fn eq(&self, o: &Self) -> bool {
        self.ring.same(&o.ring) && self.c == o.c
    }
}
impl Eq for Witt {}

impl std::hash::Hash for Witt {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl fmt::Debug for Witt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+{}t mod {})", self.c[0], self.c[1], self.ring.modulus())
    }
}

impl<'a> Add<&'a Witt> for &'a Witt {
    type Output = Witt;
    fn add(self, o: &Witt) -> Witt {
        assert!(self.ring.same(&o.ring));
        let m = self.ring.modulus();
        Witt { ring: self.ring.clone(), c: [(self.c[0] + o.c[0]) % m, (self.c[1] + o.c[1]) % m] }
    }
}

impl<'a> Sub<&'a Witt> for &'a Witt {
    type Output = Witt;
    fn sub(self, o: &Witt) -> Witt {
        assert!(self.ring.same(&o.ring));
        let m = self.ring.modulus();
        Witt {
            ring: self.ring.clone(),
            c: [(self.c[0] + m - o.c[0]) % m, (self.c[1] + m - o.c[1]) % m],
        }
    }
}

impl<'a> Mul<&'a Witt> for &'a Witt {
    type Output = Witt;
    fn mul(self, o: &Witt) -> Witt {
        assert!(self.ring.same(&o.ring));
        let m = self.ring.modulus() as u128;
        let (a0, a1) = (self.c[0] as u128, self.c[1] as u128);
        let (b0, b1) = (o.c[0] as u128, o.c[1] as u128);
        let hi = a1 * b1 % m;
        let ctx = &self.ring.0;
        // t^2 = -m1 t - m0
        let c0 = (a0 * b0 + m * m - hi * ctx.m0 as u128 % m) % m;
        let c1 = (a0 * b1 + a1 * b0 + m * m - hi * ctx.m1 as u128 % m) % m;
        Witt { ring: self.ring.clone(), c: [c0 as u64, c1 as u64] }
    }
}

impl Neg for &Witt {
    type Output = Witt;
    fn neg(self) -> Witt {
        let m = self.ring.modulus();
        Witt { ring: self.ring.clone(), c: [(m - self.c[0]) % m, (m - self.c[1]) % m] }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Witt> for Witt {
            type Output = Witt;
            fn $m(self, rhs: Witt) -> Witt {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Witt {
    type Output = Witt;
    fn neg(self) -> Witt {
        -&self
    }
}

/// Inverse of `a` modulo `p^k` for a `p`-adic unit `a`.
pub fn inv_mod_pk(a: i64, p: u64, k: u32) -> Option<u64> {
    mod_inv(a as i128, p.pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma_is_involutive_automorphism() {
        for (p, k) in [(2u64, 5u32), (3, 4), (5, 3), (11, 4)] {
            let w = WittRing::new(p, k);
            assert!(w.one().sigma().is_one());
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..50 {
                let a = w.random(&mut rng);
                let b = w.random(&mut rng);
                assert_eq!(a.sigma().sigma(), a);
                assert_eq!((&a * &b).sigma(), &a.sigma() * &b.sigma());
                assert_eq!((&a + &b).sigma(), &a.sigma() + &b.sigma());
                assert_eq!(a.sigma().reduce(), a.reduce().frobenius());
                assert_eq!((&a * &b).reduce(), &a.reduce() * &b.reduce());
            }
        }
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let w = WittRing::new(5, 3);
        let f = w.residue_field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = f.random(&mut rng);
            let y = f.random(&mut rng);
            assert_eq!(w.teichmuller(&(&x * &y)), &w.teichmuller(&x) * &w.teichmuller(&y));
            assert_eq!(w.teichmuller(&x).reduce(), x);
            assert_eq!(w.teichmuller(&x).sigma(), w.teichmuller(&x.frobenius()));
        }
    }

    #[test]
    fn inverse_of_units() {
        let w = WittRing::new(3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let a = w.random_unit(&mut rng);
            assert!((&a * &a.inv().unwrap()).is_one());
        }
        assert!(w.from_int(3).inv().is_none());
    }
}
