use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::HeckeError;
use crate::arith::{Gf, GfMat};
use crate::hermitian::unitary_similitude_fp2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Weight {
    /// `λ ↦ λ^κ` on `GU_1(F_{p^2}) = F_{p^2}^×`.
    Character { kappa: u64 },
    /// `Sym^a(std) ⊗ det^b` on `GU_g(F_{p^2})`.
    SymDet { g: usize, a: u32, b: i64 },
}

impl Weight {
    pub fn trivial() -> Self {
        Weight::Character { kappa: 0 }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Weight::Character { .. } => 1,
            Weight::SymDet { g, a, .. } => monomials(g, a).len(),
        }
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::Character { kappa } => write!(f, "kappa={kappa}"),
            Weight::SymDet { g, a, b } => write!(f, "g={g},Sym^{a}*det^{b}"),
        }
    }
}

/// Exponent vectors of degree `a` in `g` variables, lexicographically decreasing.
fn monomials(g: usize, a: u32) -> Vec<Vec<u32>> {
    fn rec(g: usize, a: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == g {
            prefix.push(a);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=a).rev() {
            prefix.push(e);
            rec(g, a - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, a, &mut Vec::new(), &mut out);
    out
}

fn poly_mul(x: &BTreeMap<Vec<u32>, Gf>, y: &BTreeMap<Vec<u32>, Gf>) -> BTreeMap<Vec<u32>, Gf> {
    let mut out: BTreeMap<Vec<u32>, Gf> = BTreeMap::new();
    for (ex, cx) in x {
        for (ey, cy) in y {
            let e: Vec<u32> = ex.iter().zip(ey).map(|(a, b)| a + b).collect();
            let c = cx * cy;
            match out.get_mut(&e) {
                Some(v) => *v += &c,
                None => {
                    out.insert(e, c);
                }
            }
        }
    }
    out
}

fn sym_power(m: &GfMat, a: u32) -> GfMat {
    let f = m.field();
    let g = m.rows();
    let mons = monomials(g, a);
    let index: BTreeMap<&Vec<u32>, usize> = mons.iter().enumerate().map(|(i, e)| (e, i)).collect();
    // image of x_i is the i-th column Σ_j M_ji x_j
    let images: Vec<BTreeMap<Vec<u32>, Gf>> = (0..g)
        .map(|i| {
            (0..g)
                .filter(|&j| !m[(j, i)].is_zero())
                .map(|j| {
                    let mut e = vec![0u32; g];
                    e[j] = 1;
                    (e, m[(j, i)].clone())
                })
                .collect()
        })
        .collect();
    let mut out = GfMat::zeros(f, mons.len(), mons.len());
    for (c, mon) in mons.iter().enumerate() {
        let mut acc: BTreeMap<Vec<u32>, Gf> = BTreeMap::from([(vec![0u32; g], f.one())]);
        for (i, &e) in mon.iter().enumerate() {
            for _ in 0..e {
                acc = poly_mul(&acc, &images[i]);
            }
        }
        for (e, v) in acc {
            out[(index[&e], c)] = v;
        }
    }
    out
}

/// `ρ(M)` for `M ∈ GU_g(F_{p^2})`.
pub fn eval_weight(w: &Weight, m: &GfMat) -> Result<GfMat, HeckeError> {
    if !m.is_square() || unitary_similitude_fp2(m).is_none() {
        return Err(HeckeError::NotSimilitude);
    }
    let f = m.field();
    match *w {
        Weight::Character { kappa } => {
            if m.rows() != 1 {
                return Err(HeckeError::UnsupportedWeight(format!("{w} on a {}x{} matrix", m.rows(), m.cols())));
            }
            Ok(GfMat::from_rows(f, vec![vec![m[(0, 0)].pow(kappa)]]))
        }
        Weight::SymDet { g, a, b } => {
            if m.rows() != g {
                return Err(HeckeError::UnsupportedWeight(format!("{w} on a {}x{} matrix", m.rows(), m.cols())));
            }
            let d = m.determinant();
            let db = if b >= 0 { d.pow(b as u64) } else { d.inv().expect("invertible").pow(b.unsigned_abs()) };
            Ok(sym_power(m, a).scale(&db))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FiniteField;

    #[test]
    fn character_and_dims() {
        let f = FiniteField::new(5, 2).unwrap();
        let x = f.generator();
        let m = GfMat::from_rows(&f, vec![vec![x.clone()]]);
        assert_eq!(eval_weight(&Weight::Character { kappa: 1 }, &m).unwrap()[(0, 0)], x);
        assert!(eval_weight(&Weight::trivial(), &m).unwrap()[(0, 0)].is_one());
        assert_eq!(Weight::SymDet { g: 2, a: 3, b: 0 }.dim(), 4);
        assert_eq!(Weight::SymDet { g: 3, a: 2, b: 1 }.dim(), 6);
    }

    #[test]
    fn standard_representation() {
        let f = FiniteField::new(3, 2).unwrap();
        // a unitary matrix: diag(λ, μ) with λ^{p+1} = μ^{p+1}
        let l = f.generator();
        let m = GfMat::diagonal(&f, &[l.clone(), l.frobenius()]);
        let r = eval_weight(&Weight::SymDet { g: 2, a: 1, b: 0 }, &m).unwrap();
        assert_eq!(r, m);
        let c = f.elements().into_iter().find(|c| !c.is_zero() && !c.pow(4).is_one()).unwrap();
        let not_unitary = GfMat::diagonal(&f, &[c, f.one()]);
        assert!(eval_weight(&Weight::SymDet { g: 2, a: 1, b: 0 }, &not_unitary).is_err());
    }
}
