//! The algebra `B_{p,∞}` and a maximal order in it.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{ratio, QuatAlgebra, QuatElem, Place, Rat};
use super::lattice::Lattice;
use super::QuatError;
use crate::arith::int::{is_prime, legendre};

/// A maximal order together with its ambient algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalOrder {
    pub alg: QuatAlgebra,
    pub lattice: Lattice,
}

fn q(c: [(i64, i64); 4]) -> QuatElem {
    QuatElem(c.map(|(n, d)| ratio(n, d)))
}

/// Candidate (a, b, basis) triples; each is verified before use.
fn recipes(p: u64) -> Vec<(i64, i64, Vec<QuatElem>)> {
    let pi = p as i64;
    if p == 2 {
        return vec![(
            -1,
            -1,
            vec![
                q([(1, 1), (0, 1), (0, 1), (0, 1)]),
                q([(0, 1), (1, 1), (0, 1), (0, 1)]),
                q([(0, 1), (0, 1), (1, 1), (0, 1)]),
                q([(1, 2), (1, 2), (1, 2), (1, 2)]),
            ],
        )];
    }
    match p % 8 {
        3 | 7 => vec![(
            -1,
            -pi,
            vec![
                q([(1, 1), (0, 1), (0, 1), (0, 1)]),
                q([(0, 1), (1, 1), (0, 1), (0, 1)]),
                q([(1, 2), (0, 1), (1, 2), (0, 1)]),
                q([(0, 1), (1, 2), (0, 1), (1, 2)]),
            ],
        )],
        5 => vec![(
            -2,
            -pi,
            vec![
                q([(1, 1), (0, 1), (0, 1), (0, 1)]),
                q([(1, 2), (0, 1), (1, 2), (1, 2)]),
                q([(0, 1), (1, 4), (1, 2), (1, 4)]),
                q([(0, 1), (0, 1), (0, 1), (1, 1)]),
            ],
        )],
        _ => {
            // p ≡ 1 mod 8: (-q, -p) with q ≡ 3 mod 4 and p a non-residue mod q
            let qq = (3u64..)
                .step_by(4)
                .find(|&q| is_prime(q) && legendre(pi, q) == -1)
                .unwrap() as i64;
            let mut out = Vec::new();
            for c in 0..qq {
                if (c * c * pi + 1) % qq != 0 {
                    continue;
                }
                for s in [1, -1] {
                    out.push((
                        -qq,
                        -pi,
                        vec![
                            q([(1, 2), (1, 2), (0, 1), (0, 1)]),
                            q([(0, 1), (0, 1), (1, 2), (s, 2)]),
                            q([(0, 1), (1, qq), (0, 1), (c, qq)]),
                            q([(0, 1), (0, 1), (0, 1), (1, 1)]),
                        ],
                    ));
                }
            }
            out
        }
    }
}

/// Places checked for ramification: all primes up to `max(200, 2|ab|p)`.
pub fn ramification_bound(alg: &QuatAlgebra) -> u64 {
    let ab = (alg.a * alg.b).unsigned_abs();
    200u64.max(2 * ab * alg.p)
}

/// Build `B_{p,∞}` and a maximal order, verifying ramification and discriminant.
pub fn build_algebra(p: u64) -> Result<(QuatAlgebra, MaximalOrder), QuatError> {
    if !is_prime(p) {
        return Err(QuatError::NotPrime(p));
    }
    for (a, b, basis) in recipes(p) {
        let alg = QuatAlgebra::new(p, a, b);
        let ram = alg.ramified_places(ramification_bound(&alg));
        if ram != vec![Place::Prime(p), Place::Infinity] {
            continue;
        }
        let lattice = Lattice::from_generators(&basis);
        let order = MaximalOrder { alg: alg.clone(), lattice };
        if order.verify().is_ok() {
            return Ok((alg, order));
        }
    }
    Err(QuatError::Construction(p))
}

impl MaximalOrder {
    pub fn p(&self) -> u64 {
        self.alg.p
    }

    pub fn basis(&self) -> [QuatElem; 4] {
        self.lattice.basis_elems()
    }

    /// Determinant of `trd(e_i ē_j)` on a Z-basis.
    pub fn discriminant(&self) -> Rat {
        det4(&self.lattice.pairing_gram(&self.alg))
    }

    /// Contains 1, multiplicatively closed, discriminant `p^2`.
    pub fn verify(&self) -> Result<(), QuatError> {
        if !self.lattice.contains(&QuatElem::one()) {
            return Err(QuatError::NotAnOrder("missing 1"));
        }
        let e = self.basis();
        for x in &e {
            for y in &e {
                if !self.lattice.contains(&self.alg.mul(x, y)) {
                    return Err(QuatError::NotAnOrder("not closed"));
                }
            }
        }
        let pp = Rat::from_integer(BigInt::from(self.p() * self.p()));
        if self.discriminant() != pp {
            return Err(QuatError::NotAnOrder("discriminant is not p^2"));
        }
        Ok(())
    }

    /// Structure constants: `e_a e_b = Σ_c C[a][b][c] e_c`.
    pub fn structure_constants(&self) -> [[[BigInt; 4]; 4]; 4] {
        let e = self.basis();
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                self.lattice
                    .coords(&self.alg.mul(&e[a], &e[b]))
                    .expect("order is closed")
            })
        })
    }

    /// Coordinates of `1` in the order basis.
    pub fn one_coords(&self) -> [BigInt; 4] {
        self.lattice.coords(&QuatElem::one()).unwrap()
    }
}

/// Exact determinant of a 4x4 rational matrix.
pub fn det4(m: &[[Rat; 4]; 4]) -> Rat {
    let mut a: Vec<Vec<Rat>> = m.iter().map(|r| r.to_vec()).collect();
    let mut det = Rat::one();
    for c in 0..4 {
        let Some(piv) = (c..4).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..4 {
            let f = &a[i][c] / &a[c][c];
            for j in c..4 {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Integer coordinates modulo `m` of an element that is integral at all primes dividing `m`.
pub fn coords_mod(order: &MaximalOrder, x: &QuatElem, m: u64) -> Option<[u64; 4]> {
    let c = order.lattice.rational_coords(x);
    let mut out = [0u64; 4];
    for i in 0..4 {
        out[i] = crate::arith::int::rational_mod(c[i].numer(), c[i].denom(), m)?;
    }
    Some(out)
}

/// Lift of residues to an element of the order.
pub fn from_coords(order: &MaximalOrder, c: &[u64]) -> QuatElem {
    let b: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
    order.lattice.element(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes_build() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 41, 73, 89, 97] {
            let (alg, o) = build_algebra(p).unwrap();
            assert_eq!(alg.p, p);
            o.verify().unwrap();
        }
        let (alg, _) = build_algebra(11).unwrap();
        assert_eq!((alg.a, alg.b), (-1, -11));
        let (alg, _) = build_algebra(3).unwrap();
        assert_eq!((alg.a, alg.b), (-1, -3));
        assert!(build_algebra(4).is_err());
    }
}
