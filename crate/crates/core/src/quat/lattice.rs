//! Full-rank Z-lattices in `Q^4` stored as a canonical Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::algebra::{QuatAlgebra, QuatElem, Rat};

/// Rows `basis[i] / den` form a Z-basis. The integer matrix is upper triangular
/// with positive pivots and entries above each pivot reduced into `[0, pivot)`;
/// `den` is minimal. Two lattices are equal iff their fields are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub basis: [[BigInt; 4]; 4],
    pub den: BigInt,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    basis: Vec<Vec<String>>,
    den: String,
}

impl Serialize for Lattice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LatticeRepr {
            basis: self.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            den: self.den.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = LatticeRepr::deserialize(d)?;
        let int = |s: &str| s.parse::<BigInt>().map_err(D::Error::custom);
        if r.basis.len() != 4 || r.basis.iter().any(|row| row.len() != 4) {
            return Err(D::Error::custom("lattice basis must be 4x4"));
        }
        let mut basis: [[BigInt; 4]; 4] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                basis[i][j] = int(&r.basis[i][j])?;
            }
        }
        Ok(Lattice { basis, den: int(&r.den)? })
    }
}

/// Hermite normal form of the row span of an integer matrix with `cols` columns.
/// Returns only the nonzero rows.
pub fn hnf_rows(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut r0 = 0;
    for c in 0..cols {
        // gather rows from r0 with nonzero entry in column c and combine them
        let mut piv: Option<usize> = None;
        for r in r0..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            match piv {
                None => piv = Some(r),
                Some(pr) => {
                    let a = rows[pr][c].clone();
                    let b = rows[r][c].clone();
                    let eg = a.extended_gcd(&b);
                    let (g, s, t) = (eg.gcd, eg.x, eg.y);
                    let (ag, bg) = (&a / &g, &b / &g);
                    let new_p: Vec<BigInt> =
                        (0..cols).map(|k| &s * &rows[pr][k] + &t * &rows[r][k]).collect();
                    let new_r: Vec<BigInt> =
                        (0..cols).map(|k| &ag * &rows[r][k] - &bg * &rows[pr][k]).collect();
                    rows[pr] = new_p;
                    rows[r] = new_r;
                }
            }
        }
        let Some(pr) = piv else { continue };
        rows.swap(r0, pr);
        if rows[r0][c].is_negative() {
            rows[r0] = rows[r0].iter().map(|x| -x).collect();
        }
        r0 += 1;
    }
    for r in rows.into_iter().take(r0) {
        out.push(r);
    }
    // reduce entries above pivots
    for i in 0..out.len() {
        let pc = (0..cols).find(|&c| !out[i][c].is_zero()).unwrap();
        let pv = out[i][pc].clone();
        for k in 0..i {
            let q = out[k][pc].div_floor(&pv);
            if !q.is_zero() {
                let row_i = out[i].clone();
                for (x, y) in out[k].iter_mut().zip(&row_i) {
                    *x -= &q * y;
                }
            }
        }
    }
    out
}

impl Lattice {
    /// Lattice spanned by `gens` (must have rank 4).
    pub fn from_generators(gens: &[QuatElem]) -> Lattice {
        let den = gens.iter().fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator()));
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                g.0.iter()
                    .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        let h = hnf_rows(rows, 4);
        assert_eq!(h.len(), 4, "generators do not span a full-rank lattice");
        Self::normalize(h, den)
    }

    fn normalize(h: Vec<Vec<BigInt>>, den: BigInt) -> Lattice {
        let mut g = den.clone();
        for r in &h {
            for x in r {
                g = g.gcd(x);
            }
        }
        let basis: [[BigInt; 4]; 4] =
            std::array::from_fn(|i| std::array::from_fn(|j| &h[i][j] / &g));
        Lattice { basis, den: den / g }
    }

    pub fn basis_elems(&self) -> [QuatElem; 4] {
        std::array::from_fn(|i| {
            QuatElem(std::array::from_fn(|j| {
                BigRational::new(self.basis[i][j].clone(), self.den.clone())
            }))
        })
    }

    /// Integer coordinates of `x` in the stored basis, if `x` lies in the lattice.
    pub fn coords(&self, x: &QuatElem) -> Option<[BigInt; 4]> {
        // x * den as rationals; solve c^T basis = x*den with upper triangular basis
        let target: Vec<Rat> = x.0.iter().map(|v| v * Rat::from_integer(self.den.clone())).collect();
        if target.iter().any(|t| !t.is_integer()) {
            return None;
        }
        let mut rem: Vec<BigInt> = target.iter().map(|t| t.to_integer()).collect();
        let mut c: [BigInt; 4] = Default::default();
        for i in 0..4 {
            let pc = (0..4).find(|&k| !self.basis[i][k].is_zero()).unwrap();
            // pivots of an upper-triangular full-rank 4x4 are on the diagonal
            debug_assert_eq!(pc, i);
            let (q, r) = rem[pc].div_rem(&self.basis[i][pc]);
            if !r.is_zero() {
                return None;
            }
            for k in 0..4 {
                rem[k] -= &q * &self.basis[i][k];
            }
            c[i] = q;
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(c)
        } else {
            None
        }
    }

    /// Rational coordinates of any `x` in the stored basis.
    pub fn rational_coords(&self, x: &QuatElem) -> [Rat; 4] {
        let mut rem: Vec<Rat> =
            x.0.iter().map(|v| v * Rat::from_integer(self.den.clone())).collect();
        let mut c: [Rat; 4] = std::array::from_fn(|_| Rat::zero());
        for i in 0..4 {
            let q = &rem[i] / Rat::from_integer(self.basis[i][i].clone());
            for k in 0..4 {
                rem[k] -= &q * Rat::from_integer(self.basis[i][k].clone());
            }
            c[i] = q;
        }
        c
    }

    pub fn contains(&self, x: &QuatElem) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, o: &Lattice) -> bool {
        o.basis_elems().iter().all(|e| self.contains(e))
    }

    pub fn element(&self, c: &[BigInt]) -> QuatElem {
        let e = self.basis_elems();
        let mut acc = QuatElem::zero();
        for (ci, ei) in c.iter().zip(e.iter()) {
            acc = &acc + &ei.scale(&Rat::from_integer(ci.clone()));
        }
        acc
    }

    /// Covolume relative to `Z^4` (determinant of the basis matrix).
    pub fn det(&self) -> Rat {
        let mut d = BigInt::one();
        for i in 0..4 {
            d *= &self.basis[i][i];
        }
        Rat::new(d, self.den.pow(4))
    }

    pub fn sum(&self, o: &Lattice) -> Lattice {
        let mut g: Vec<QuatElem> = self.basis_elems().to_vec();
        g.extend(o.basis_elems());
        Lattice::from_generators(&g)
    }

    pub fn scale(&self, r: &Rat) -> Lattice {
        let g: Vec<QuatElem> = self.basis_elems().iter().map(|e| e.scale(r)).collect();
        Lattice::from_generators(&g)
    }

    pub fn conj(&self) -> Lattice {
        let g: Vec<QuatElem> = self.basis_elems().iter().map(|e| e.conj()).collect();
        Lattice::from_generators(&g)
    }

    pub fn left_mul(&self, alg: &QuatAlgebra, x: &QuatElem) -> Lattice {
        let g: Vec<QuatElem> = self.basis_elems().iter().map(|e| alg.mul(x, e)).collect();
        Lattice::from_generators(&g)
    }

    pub fn right_mul(&self, alg: &QuatAlgebra, x: &QuatElem) -> Lattice {
        let g: Vec<QuatElem> = self.basis_elems().iter().map(|e| alg.mul(e, x)).collect();
        Lattice::from_generators(&g)
    }

    /// Z-span of all products `x y`.
    pub fn product(&self, alg: &QuatAlgebra, o: &Lattice) -> Lattice {
        let (a, b) = (self.basis_elems(), o.basis_elems());
        let mut g = Vec::with_capacity(16);
        for x in &a {
            for y in &b {
                g.push(alg.mul(x, y));
            }
        }
        Lattice::from_generators(&g)
    }

    /// Matrix of `trd(e_i ē_j)` on the stored basis.
    pub fn pairing_gram(&self, alg: &QuatAlgebra) -> [[Rat; 4]; 4] {
        let e = self.basis_elems();
        std::array::from_fn(|i| std::array::from_fn(|j| alg.pairing(&e[i], &e[j])))
    }

    /// gcd of the values of the reduced norm on the lattice.
    pub fn norm_gcd(&self, alg: &QuatAlgebra) -> Rat {
        let g = self.pairing_gram(alg);
        let mut vals = Vec::new();
        for i in 0..4 {
            vals.push(&g[i][i] / Rat::from_integer(BigInt::from(2)));
            for j in i + 1..4 {
                vals.push(g[i][j].clone());
            }
        }
        rat_gcd(&vals)
    }

    /// `{x ∈ self : x ∈ m·other}`-style helper: the lattice `m·self`.
    pub fn scale_int(&self, m: &BigInt) -> Lattice {
        self.scale(&Rat::from_integer(m.clone()))
    }

    /// Index `[self : sub]` for a sublattice.
    pub fn index_of(&self, sub: &Lattice) -> BigInt {
        let r = sub.det() / self.det();
        assert!(r.is_integer(), "not a sublattice");
        r.to_integer().abs()
    }
}

/// Positive gcd of rationals (gcd of numerators over lcm of denominators).
pub fn rat_gcd(vals: &[Rat]) -> Rat {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in vals {
        if v.is_zero() {
            continue;
        }
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    Rat::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::algebra::ratio;

    #[test]
    fn hnf_is_canonical() {
        let a = QuatElem::from_ints([1, 0, 0, 0]);
        let b = QuatElem::from_ints([0, 1, 0, 0]);
        let c = QuatElem::from_ints([0, 0, 1, 0]);
        let h = QuatElem([ratio(1, 2), ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        let l1 = Lattice::from_generators(&[a.clone(), b.clone(), c.clone(), h.clone()]);
        let l2 = Lattice::from_generators(&[
            &h + &a,
            &b - &a,
            &(&c + &b) + &a,
            h.scale(&ratio(-1, 1)),
            &a + &a,
        ]);
        assert_eq!(l1, l2);
        assert!(l1.contains(&QuatElem::from_ints([0, 0, 0, 1])));
        assert!(!l1.contains(&QuatElem([ratio(1, 2), ratio(1, 2), Rat::zero(), Rat::zero()])));
        assert_eq!(l1.det(), ratio(1, 2));
    }
}
