//! Right ideals of a maximal order: norms, equivalence, neighbours of norm `ℓ`
//! and the class set with unit groups.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{QuatAlgebra, QuatElem, Rat};
use super::lattice::Lattice;
use super::order::MaximalOrder;
use super::short::{minimal_vectors, short_vectors, vector_of_value};
use super::QuatError;
use crate::arith::int::{factorize, is_prime, squarefree_decompose};
use crate::arith::{FiniteField, GfMat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightIdeal {
    pub lattice: Lattice,
    /// Reduced norm (gcd of `n(x)` over the ideal).
    #[serde(with = "rat_serde")]
    pub nrd: Rat,
}

pub(crate) mod rat_serde {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Rat>().map_err(serde::de::Error::custom)
    }
}

impl RightIdeal {
    pub fn from_lattice(alg: &QuatAlgebra, lattice: Lattice) -> Self {
        let nrd = lattice.norm_gcd(alg);
        RightIdeal { lattice, nrd }
    }

    pub fn unit(order: &MaximalOrder) -> Self {
        Self::from_lattice(&order.alg, order.lattice.clone())
    }

    pub fn basis(&self) -> [QuatElem; 4] {
        self.lattice.basis_elems()
    }

    /// Integral Gram matrix `trd(e_i ē_j)/nrd`; the form `x ↦ n(x)/nrd` is half of it.
    pub fn normalized_gram(&self, alg: &QuatAlgebra) -> Vec<Vec<BigInt>> {
        gram_over(&self.lattice, alg, &self.nrd)
    }

    pub fn is_right_ideal_of(&self, order: &MaximalOrder) -> bool {
        let alg = &order.alg;
        self.basis()
            .iter()
            .all(|x| order.basis().iter().all(|o| self.lattice.contains(&alg.mul(x, o))))
    }

    /// `O_l(I) = I Ī / nrd(I)`.
    pub fn left_order(&self, alg: &QuatAlgebra) -> Lattice {
        self.lattice
            .product(alg, &self.lattice.conj())
            .scale(&self.nrd.recip())
    }

    pub fn left_mul(&self, alg: &QuatAlgebra, x: &QuatElem) -> RightIdeal {
        RightIdeal { lattice: self.lattice.left_mul(alg, x), nrd: &self.nrd * alg.norm(x) }
    }

    /// Determinant of the normalized Gram matrix (equals `p^2` for right ideals of a maximal order).
    pub fn normalized_discriminant(&self, alg: &QuatAlgebra) -> BigInt {
        let g = self.normalized_gram(alg);
        let m: [[Rat; 4]; 4] =
            std::array::from_fn(|i| std::array::from_fn(|j| Rat::from_integer(g[i][j].clone())));
        super::order::det4(&m).to_integer()
    }
}

fn gram_over(l: &Lattice, alg: &QuatAlgebra, scale: &Rat) -> Vec<Vec<BigInt>> {
    let g = l.pairing_gram(alg);
    g.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let v = x / scale;
                    assert!(v.is_integer(), "normalized Gram is not integral");
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

/// `Some(x)` with `I = xJ` when the right ideals are equivalent.
pub fn is_equivalent(alg: &QuatAlgebra, i: &RightIdeal, j: &RightIdeal) -> Option<QuatElem> {
    let prod = i.lattice.product(alg, &j.lattice.conj());
    let target = &i.nrd * &j.nrd;
    let g = gram_over(&prod, alg, &target);
    let vecs = short_vectors(&g, &BigInt::from(2));
    let (_, c) = vecs.into_iter().find(|(v, _)| *v == BigInt::from(2))?;
    let y = prod.element(&c);
    let x = y.scale(&j.nrd.recip());
    let moved = j.lattice.left_mul(alg, &x);
    assert_eq!(moved, i.lattice, "equivalence witness failed verification");
    Some(x)
}

/// The `ℓ + 1` right ideals `J ⊂ I` with `nrd(J) = ℓ nrd(I)`.
pub fn right_ideals_of_norm(
    order: &MaximalOrder,
    ideal: &RightIdeal,
    ell: u64,
) -> Result<Vec<RightIdeal>, QuatError> {
    if !is_prime(ell) || ell == order.p() {
        return Err(QuatError::BadEll(ell));
    }
    let alg = &order.alg;
    let f = FiniteField::prime_field(ell).unwrap();
    let g = ideal.normalized_gram(alg);
    let gi: Vec<Vec<i64>> = g
        .iter()
        .map(|r| r.iter().map(|x| (x % BigInt::from(2 * ell)).to_i64().unwrap()).collect())
        .collect();
    // right multiplication by order basis elements, in ideal coordinates mod ℓ
    let ib = ideal.basis();
    let act: Vec<GfMat> = order
        .basis()
        .iter()
        .map(|o| {
            let rows = ib
                .iter()
                .map(|e| {
                    let c = ideal.lattice.coords(&alg.mul(e, o)).expect("right ideal");
                    c.iter().map(|x| f.from_int((x % BigInt::from(ell)).to_i64().unwrap())).collect()
                })
                .collect();
            GfMat::from_rows(&f, rows)
        })
        .collect();
    let mut found: Vec<GfMat> = Vec::new();
    let l = ell as i64;
    for idx in 1..ell.pow(4) {
        let c: Vec<i64> = (0..4).map(|k| ((idx / ell.pow(k)) % ell) as i64).collect();
        // n(x)/nrd = (1/2) c^T G c; compute mod ℓ from the integer expression
        let mut q = 0i64;
        for a in 0..4 {
            q += c[a] * c[a] * (gi[a][a] / 2);
            for b in a + 1..4 {
                q += c[a] * c[b] * gi[a][b];
            }
        }
        if q.rem_euclid(l) != 0 {
            continue;
        }
        let v: Vec<_> = c.iter().map(|&x| f.from_int(x)).collect();
        if found.iter().any(|s| in_span(s, &v)) {
            continue;
        }
        let vm = GfMat::from_rows(&f, vec![v]);
        let gens: Vec<Vec<_>> = act.iter().map(|a| vm.mul(a).row(0).to_vec()).collect();
        let mut span = GfMat::from_rows(&f, gens);
        let r = span.rref().len();
        assert_eq!(r, 2, "isotropic vector should generate a 2-dimensional right submodule");
        let rows: Vec<Vec<_>> = (0..2).map(|i| span.row(i).to_vec()).collect();
        found.push(GfMat::from_rows(&f, rows));
    }
    assert_eq!(found.len() as u64, ell + 1);
    let lb = BigInt::from(ell);
    let mut out = Vec::new();
    for s in found {
        let mut gens: Vec<QuatElem> =
            ib.iter().map(|e| e.scale(&Rat::from_integer(lb.clone()))).collect();
        for i in 0..2 {
            let c: Vec<BigInt> = s.row(i).iter().map(|x| BigInt::from(x.coeffs()[0])).collect();
            gens.push(ideal.lattice.element(&c));
        }
        let lat = Lattice::from_generators(&gens);
        let j = RightIdeal::from_lattice(alg, lat);
        assert_eq!(j.nrd, &ideal.nrd * Rat::from_integer(lb.clone()));
        out.push(j);
    }
    Ok(out)
}

fn in_span(rref: &GfMat, v: &[crate::arith::Gf]) -> bool {
    let mut rows: Vec<Vec<_>> = (0..rref.rows()).map(|i| rref.row(i).to_vec()).collect();
    rows.push(v.to_vec());
    GfMat::from_rows(rref.field(), rows).rank() == rref.rows()
}

/// Equivalent integral ideal of smallest possible norm, `(ȳ/nrd(I))·I` for a
/// minimal vector `y` of `I`.
pub fn reduce_ideal(alg: &QuatAlgebra, ideal: &RightIdeal) -> RightIdeal {
    let g = ideal.normalized_gram(alg);
    let (_, vecs) = minimal_vectors(&g);
    let y = ideal.lattice.element(&vecs[0]);
    let x = y.conj().scale(&ideal.nrd.recip());
    ideal.left_mul(alg, &x)
}

/// A class representative with its left order and that order's unit group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassInfo {
    pub ideal: RightIdeal,
    pub left_order: Lattice,
    pub units: Vec<QuatElem>,
}

/// Norm-one elements of an order (given as a lattice with integral norm form).
pub fn units_of(alg: &QuatAlgebra, order: &Lattice) -> Vec<QuatElem> {
    let g = gram_over(order, alg, &Rat::one());
    short_vectors(&g, &BigInt::from(2))
        .into_iter()
        .filter(|(v, _)| *v == BigInt::from(2))
        .map(|(_, c)| order.element(&c))
        .collect()
}

/// Smallest prime different from `p`.
pub fn smallest_other_prime(p: u64) -> u64 {
    if p == 2 {
        3
    } else {
        2
    }
}

/// Representatives of the right ideal classes of `order` by breadth-first
/// search on the `ℓ`-neighbour graph; completeness is certified by the mass formula.
pub fn ideal_classes(order: &MaximalOrder) -> Result<Vec<ClassInfo>, QuatError> {
    let alg = &order.alg;
    let ell = smallest_other_prime(order.p());
    let mut reps = vec![RightIdeal::unit(order)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let nbrs = right_ideals_of_norm(order, &reps[i].clone(), ell)?;
        for j in nbrs {
            if reps.iter().any(|r| is_equivalent(alg, &j, r).is_some()) {
                continue;
            }
            reps.push(reduce_ideal(alg, &j));
            queue.push_back(reps.len() - 1);
        }
    }
    let infos: Vec<ClassInfo> = reps
        .into_iter()
        .map(|ideal| {
            let left_order = ideal.left_order(alg);
            let units = units_of(alg, &left_order);
            ClassInfo { ideal, left_order, units }
        })
        .collect();
    let mass = mass(&infos);
    let expected = Rat::new(BigInt::from(order.p() - 1), BigInt::from(24));
    if mass != expected {
        return Err(QuatError::MassMismatch { got: mass.to_string(), expected: expected.to_string() });
    }
    Ok(infos)
}

/// `Σ 1/|O_l(I_i)^×|`.
pub fn mass(classes: &[ClassInfo]) -> Rat {
    classes
        .iter()
        .map(|c| Rat::new(BigInt::one(), BigInt::from(c.units.len())))
        .fold(Rat::zero(), |a, b| a + b)
}

/// An element `x ∈ B` with `n(x) = q`. Writing `q = (a1 a2^2)/(b1 b2^2)` with
/// `a1, b1` squarefree, find for each prime `r | a1 b1` some `y_r ∈ O` with
/// `n(y_r) = r s_r^2`, `s_r ≤ max_scale`, and return `x = ∏ y_r · a2 / (b1 b2 ∏ s_r)`.
pub fn solve_norm(order: &MaximalOrder, q: &Rat, max_scale: u64) -> Result<QuatElem, QuatError> {
    if *q <= Rat::zero() {
        return Err(QuatError::NonPositiveNorm);
    }
    let alg = &order.alg;
    let (a1, a2) = squarefree_decompose(q.numer());
    let (b1, b2) = squarefree_decompose(q.denom());
    let m = (&a1 * &b1).to_u64().ok_or(QuatError::SearchExhausted)?;
    let g = gram_over(&order.lattice, alg, &Rat::one());
    let mut y = QuatElem::one();
    let mut scale = BigInt::one();
    for (r, _) in factorize(m) {
        let (s, yr) = (1..=max_scale)
            .find_map(|s| {
                let twice = BigInt::from(2 * r) * BigInt::from(s * s);
                vector_of_value(&g, &twice, NORM_SEARCH_BUDGET).map(|c| (s, order.lattice.element(&c)))
            })
            .ok_or(QuatError::SearchExhausted)?;
        y = alg.mul(&y, &yr);
        scale *= BigInt::from(s);
    }
    let x = y.scale(&Rat::new(a2, &b1 * &b2 * scale));
    debug_assert_eq!(alg.norm(&x), *q);
    Ok(x)
}

const NORM_SEARCH_BUDGET: usize = 1 << 22;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::order::build_algebra;

    #[test]
    fn p11_neighbours_and_classes() {
        let (alg, o) = build_algebra(11).unwrap();
        let unit = RightIdeal::unit(&o);
        let n2 = right_ideals_of_norm(&o, &unit, 2).unwrap();
        assert_eq!(n2.len(), 3);
        assert_eq!(right_ideals_of_norm(&o, &unit, 3).unwrap().len(), 4);
        for j in &n2 {
            assert!(j.is_right_ideal_of(&o));
            assert_eq!(j.normalized_discriminant(&alg), BigInt::from(121));
        }
        let classes = ideal_classes(&o).unwrap();
        let mut orders: Vec<usize> = classes.iter().map(|c| c.units.len()).collect();
        orders.sort();
        assert_eq!(orders, vec![4, 6]);
        assert!(right_ideals_of_norm(&o, &unit, 11).is_err());
    }

    #[test]
    fn hurwitz_units_and_norms() {
        let (alg, o) = build_algebra(2).unwrap();
        let classes = ideal_classes(&o).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].units.len(), 24);
        let x = solve_norm(&o, &Rat::from_integer(BigInt::from(2)), 5).unwrap();
        assert_eq!(alg.norm(&x), Rat::from_integer(BigInt::from(2)));
        let q = Rat::new(BigInt::from(4), BigInt::from(9));
        assert_eq!(alg.norm(&solve_norm(&o, &q, 5).unwrap()), q);
        assert!(solve_norm(&o, &Rat::zero(), 5).is_err());
    }
}
