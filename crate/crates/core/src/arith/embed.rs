//! Canonical embeddings between finite fields of the same characteristic.
//!
//! `F_{p^2} -> F_{p^D}` sends the generator to the smallest root (coefficient
//! order) of the defining polynomial of `F_{p^2}`. For other pairs the
//! generator goes to the smallest root that is compatible with those choices
//! on the `F_{p^2}` subfield, so embeddings of fields containing `F_{p^2}`
//! commute with the canonical copy of `F_{p^2}`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::ff::{FiniteField, Gf};
use super::linalg::GfMat;
use super::poly::Poly;

#[derive(Clone, Debug)]
pub struct Embedding {
    from: FiniteField,
    to: FiniteField,
    gen_image: Gf,
    /// Images of `1, t, ..., t^{a-1}`.
    powers: Vec<Gf>,
}

static CACHE: OnceLock<Mutex<HashMap<(u64, usize, usize), Embedding>>> = OnceLock::new();

impl Embedding {
    fn with_image(from: &FiniteField, to: &FiniteField, gen_image: Gf) -> Self {
        let mut powers = Vec::with_capacity(from.degree());
        let mut acc = to.one();
        for _ in 0..from.degree() {
            powers.push(acc.clone());
            acc = &acc * &gen_image;
        }
        Embedding { from: from.clone(), to: to.clone(), gen_image, powers }
    }

    pub fn from_field(&self) -> &FiniteField {
        &self.from
    }

    pub fn to_field(&self) -> &FiniteField {
        &self.to
    }

    pub fn generator_image(&self) -> &Gf {
        &self.gen_image
    }

    pub fn apply(&self, x: &Gf) -> Gf {
        assert!(x.field().same_as(&self.from));
        let mut acc = self.to.zero();
        for (c, pw) in x.coeffs().iter().zip(&self.powers) {
            if *c != 0 {
                acc += &pw.scale(*c);
            }
        }
        acc
    }

    /// Inverse image, if `y` lies in the embedded subfield.
    pub fn preimage(&self, y: &Gf) -> Option<Gf> {
        let fp = FiniteField::prime_field(self.from.p()).unwrap();
        let a = self.from.degree();
        let b = self.to.degree();
        let mut m = GfMat::zeros(&fp, b, a);
        for (j, pw) in self.powers.iter().enumerate() {
            for (i, &c) in pw.coeffs().iter().enumerate() {
                m[(i, j)] = fp.from_int(c as i64);
            }
        }
        let rhs: Vec<Gf> = y.coeffs().iter().map(|&c| fp.from_int(c as i64)).collect();
        let sol = m.solve(&rhs)?;
        let coeffs: Vec<u64> = sol.iter().map(|s| s.coeffs()[0]).collect();
        Some(self.from.from_coeffs(&coeffs))
    }
}

/// The canonical embedding `from -> to`; `None` unless `deg(from) | deg(to)`.
pub fn canonical_embedding(from: &FiniteField, to: &FiniteField) -> Option<Embedding> {
    assert_eq!(from.p(), to.p(), "characteristic mismatch");
    let (a, b) = (from.degree(), to.degree());
    if b % a != 0 {
        return None;
    }
    let key = (from.p(), a, b);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(e) = cache.lock().unwrap().get(&key) {
        return Some(e.clone());
    }
    let emb = if a == 1 {
        Embedding::with_image(from, to, to.from_int(-(from.modulus()[0] as i64)))
    } else if a == b {
        Embedding::with_image(from, to, to.generator())
    } else {
        let m = Poly::new(
            to,
            from.modulus().iter().map(|&c| to.from_int(c as i64)).collect(),
        );
        let roots = m.roots();
        let chosen = if a % 2 == 0 && a != 2 {
            let f2 = FiniteField::new(from.p(), 2).unwrap();
            let inner = canonical_embedding(&f2, from).unwrap();
            let outer = canonical_embedding(&f2, to).unwrap();
            let target = outer.generator_image().clone();
            let h = inner.generator_image();
            roots
                .into_iter()
                .find(|r| Embedding::with_image(from, to, r.clone()).apply(h) == target)
                .expect("compatible root exists")
        } else {
            roots.into_iter().next().expect("subfield root exists")
        };
        Embedding::with_image(from, to, chosen)
    };
    cache.lock().unwrap().insert(key, emb.clone());
    Some(emb)
}

/// Smallest divisor `d` of `deg(x.field)` with `x ∈ F_{p^d}` (as a subfield).
pub fn degree_of_element(x: &Gf) -> usize {
    let n = x.field().degree();
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| x.frobenius_pow(d) == *x)
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings_are_homomorphisms_and_compatible() {
        for p in [2u64, 3, 5] {
            let f2 = FiniteField::new(p, 2).unwrap();
            let f4 = FiniteField::new(p, 4).unwrap();
            let f8 = FiniteField::new(p, 8).unwrap();
            let e24 = canonical_embedding(&f2, &f4).unwrap();
            let e48 = canonical_embedding(&f4, &f8).unwrap();
            let e28 = canonical_embedding(&f2, &f8).unwrap();
            for x in f2.elements() {
                assert_eq!(e48.apply(&e24.apply(&x)), e28.apply(&x));
                assert_eq!(e24.preimage(&e24.apply(&x)), Some(x.clone()));
                for y in f2.elements() {
                    assert_eq!(e24.apply(&(&x * &y)), &e24.apply(&x) * &e24.apply(&y));
                }
            }
            let g = f4.generator();
            assert!(e24.preimage(&g).is_none());
            assert_eq!(degree_of_element(&g), 4);
        }
    }
}
