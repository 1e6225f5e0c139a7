use std::collections::BTreeMap;

use num_integer::Integer;

use super::{HeckeError, HeckeOperator, Weight};
use crate::arith::embed::{canonical_embedding, degree_of_element};
use crate::arith::{factor_poly, FiniteField, Gf, GfMat, Poly};

/// A system `ℓ ↦ a_ℓ`, stored once per Galois orbit over the field of the operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigensystem {
    pub weight: Option<Weight>,
    /// Absolute degree of the smallest field containing the operators' field and all `a_ℓ`.
    pub field_degree: usize,
    pub values: BTreeMap<u64, Gf>,
    /// Dimension of the joint generalized eigenspace of this representative.
    pub multiplicity: usize,
    /// Number of conjugates over the operators' field.
    pub orbit_size: usize,
}

impl Eigensystem {
    /// All conjugates of the values over `F_{p^base}` (`base` divides `field_degree`).
    pub fn conjugates(&self, base: usize) -> Vec<BTreeMap<u64, Gf>> {
        let mut out: Vec<BTreeMap<u64, Gf>> = Vec::new();
        let mut cur = self.values.clone();
        for _ in 0..self.field_degree / base {
            if !out.contains(&cur) {
                out.push(cur.clone());
            }
            cur = cur.into_iter().map(|(l, v)| (l, v.frobenius_pow(base))).collect();
        }
        out
    }

    /// Values mapped into `F_{p^degree}` (which must contain them).
    pub fn values_in(&self, target: &FiniteField) -> BTreeMap<u64, Gf> {
        let emb = canonical_embedding(self.values.values().next().map_or(target, |v| v.field()), target)
            .expect("target field contains the values");
        self.values.iter().map(|(l, v)| (*l, emb.apply(v))).collect()
    }
}

/// Matrix of `a` restricted to the column space of `k` (which `a` preserves).
fn restrict(a: &GfMat, k: &GfMat) -> GfMat {
    let ak = a.mul(k);
    let cols: Vec<Vec<Gf>> = (0..k.cols()).map(|j| k.solve(&ak.col(j)).expect("invariant subspace")).collect();
    GfMat::from_rows(a.field(), cols).transpose()
}

fn embed_mat(m: &GfMat, target: &FiniteField) -> GfMat {
    if m.field() == target {
        return m.clone();
    }
    let emb = canonical_embedding(m.field(), target).unwrap();
    m.map(target, |x| emb.apply(x))
}

fn embed_poly(f: &Poly, target: &FiniteField) -> Poly {
    if f.field() == target {
        return f.clone();
    }
    let emb = canonical_embedding(f.field(), target).unwrap();
    f.map_coeffs(target, |x| emb.apply(x))
}

struct Splitter<'a> {
    ells: Vec<u64>,
    base: &'a FiniteField,
    out: Vec<Eigensystem>,
}

impl Splitter<'_> {
    fn split(&mut self, mats: Vec<GfMat>, values: Vec<Gf>) {
        let Some(a) = mats.first() else {
            self.record(values, 0);
            return;
        };
        let dim = a.rows();
        if values.len() == self.ells.len() {
            self.record(values, dim);
            return;
        }
        let field = a.field().clone();
        let cp = a.charpoly();
        for (phi, mult) in factor_poly(&cp).expect("nonzero") {
            let e = phi.deg();
            let (ext, phi_e) = if e == 1 {
                (field.clone(), phi.clone())
            } else {
                let ext = FiniteField::new(field.p(), field.degree() * e).unwrap();
                let ph = embed_poly(&phi, &ext);
                (ext, ph)
            };
            let lambda = if e == 1 { -&phi.coeff(0) } else { phi_e.roots()[0].clone() };
            let am = embed_mat(a, &ext);
            let mut shifted = am.clone();
            for i in 0..dim {
                shifted[(i, i)] -= &lambda;
            }
            let kern = shifted.pow(mult as u64).kernel();
            assert_eq!(kern.len(), mult, "generalized eigenspace has the algebraic multiplicity");
            let k = GfMat::from_rows(&ext, kern).transpose();
            let rest: Vec<GfMat> = mats[1..].iter().map(|m| restrict(&embed_mat(m, &ext), &k)).collect();
            let mut vals: Vec<Gf> = values.iter().map(|v| embed_val(v, &ext)).collect();
            vals.push(lambda);
            let next = if rest.is_empty() { vec![GfMat::identity(&ext, k.cols())] } else { rest };
            self.split(next, vals);
        }
    }

    fn record(&mut self, values: Vec<Gf>, dim: usize) {
        let b = self.base.degree();
        let deg = values.iter().fold(b, |acc, v| acc.lcm(&degree_of_element(v)));
        let small = FiniteField::new(self.base.p(), deg).unwrap();
        let vals: BTreeMap<u64, Gf> = self
            .ells
            .iter()
            .zip(&values)
            .map(|(l, v)| {
                let emb = canonical_embedding(&small, v.field()).unwrap();
                (*l, emb.preimage(v).expect("value lies in the subfield"))
            })
            .collect();
        self.out.push(Eigensystem { weight: None, field_degree: deg, values: vals, multiplicity: dim, orbit_size: deg / b });
    }
}

fn embed_val(v: &Gf, target: &FiniteField) -> Gf {
    if v.field() == target {
        return v.clone();
    }
    canonical_embedding(v.field(), target).unwrap().apply(v)
}

/// Simultaneous generalized eigensystems of commuting operators, one
/// representative per Galois orbit over the operators' field; the total
/// `Σ multiplicity · orbit_size` equals the dimension.
pub fn eigensystems(ops: &[HeckeOperator]) -> Result<Vec<Eigensystem>, HeckeError> {
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            if a.matrix.mul(&b.matrix) != b.matrix.mul(&a.matrix) {
                return Err(HeckeError::NotCommuting);
            }
        }
    }
    let Some(first) = ops.first() else {
        return Ok(Vec::new());
    };
    let base = first.matrix.field().clone();
    let mut s = Splitter { ells: ops.iter().map(|o| o.ell).collect(), base: &base, out: Vec::new() };
    if first.matrix.rows() > 0 {
        s.split(ops.iter().map(|o| o.matrix.clone()).collect(), Vec::new());
    }
    Ok(s.out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(ell: u64, m: GfMat) -> HeckeOperator {
        HeckeOperator { ell, matrix: m }
    }

    #[test]
    fn scalar_and_diagonal() {
        let f = FiniteField::prime_field(11).unwrap();
        let s = eigensystems(&[op(2, GfMat::from_ints(&f, &[vec![7]]))]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].values[&2], f.from_int(7));
        let a = op(2, GfMat::diagonal(&f, &[f.from_int(1), f.from_int(2)]));
        let b = op(3, GfMat::diagonal(&f, &[f.from_int(2), f.from_int(1)]));
        let s = eigensystems(&[a, b]).unwrap();
        let pairs: Vec<(Gf, Gf)> = s.iter().map(|e| (e.values[&2].clone(), e.values[&3].clone())).collect();
        assert_eq!(pairs.len(), 2);
        assert!(pairs.contains(&(f.from_int(1), f.from_int(2))));
        assert!(pairs.contains(&(f.from_int(2), f.from_int(1))));
    }

    #[test]
    fn irreducible_block_needs_extension() {
        let f = FiniteField::prime_field(3).unwrap();
        // x^2 + 1 is irreducible over F_3
        let m = GfMat::from_ints(&f, &[vec![0, -1], vec![1, 0]]);
        let s = eigensystems(&[op(2, m)]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].field_degree, s[0].orbit_size, s[0].multiplicity), (2, 2, 1));
        let v = &s[0].values[&2];
        assert_eq!(v * v, v.field().from_int(-1));
    }

    #[test]
    fn non_commuting_rejected() {
        let f = FiniteField::prime_field(5).unwrap();
        let a = op(2, GfMat::from_ints(&f, &[vec![1, 1], vec![0, 1]]));
        let b = op(3, GfMat::from_ints(&f, &[vec![1, 0], vec![1, 1]]));
        assert!(matches!(eigensystems(&[a, b]), Err(HeckeError::NotCommuting)));
    }

    #[test]
    fn jordan_block_multiplicity() {
        let f = FiniteField::prime_field(5).unwrap();
        let a = op(2, GfMat::from_ints(&f, &[vec![3, 1], vec![0, 3]]));
        let s = eigensystems(&[a]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].multiplicity, 2);
    }
}
