//! Restriction of scalars from `L = F_{p^a}` to `F_p` and the descent of
//! eigenvectors through `L ⊗ L ≅ ∏_σ L`, `α ⊗ β ↦ (σ(α) β)_σ`.

use super::HeckeError;
use crate::arith::{FiniteField, Gf, GfMat};

/// Coordinates of `x ∈ L` in the basis `1, t, ..., t^{a-1}` over `F_p`.
fn coords(x: &Gf) -> Vec<u64> {
    let a = x.field().degree();
    let mut c = x.coeffs().to_vec();
    c.resize(a, 0);
    c
}

/// The `F_p`-linear operator underlying an `L`-linear one, in the basis `e_i t^j` (index `i a + j`).
pub fn restrict_scalars(m: &GfMat) -> GfMat {
    let l = m.field();
    let a = l.degree();
    let fp = FiniteField::prime_field(l.p()).unwrap();
    let t = l.generator();
    let n = m.rows();
    let mut out = GfMat::zeros(&fp, n * a, m.cols() * a);
    for k in 0..n {
        for i in 0..m.cols() {
            for j in 0..a {
                let c = coords(&(&m[(k, i)] * &t.pow(j as u64)));
                for (mm, v) in c.iter().enumerate() {
                    out[(k * a + mm, i * a + j)] = fp.from_int(*v as i64);
                }
            }
        }
    }
    out
}

fn is_joint_eigenvector(ops: &[GfMat], v: &[Gf]) -> Option<Vec<Gf>> {
    let k = v.iter().position(|x| !x.is_zero())?;
    ops.iter()
        .map(|m| {
            let w = m.mul_vec(v);
            let lambda = w[k].div(&v[k]).ok()?;
            (w.iter().zip(v).all(|(a, b)| *a == &lambda * b)).then_some(lambda)
        })
        .collect()
}

/// Descent of a joint eigenvector `v ∈ L^n` of operators defined over `F_p`
/// along `σ = Frob^s`: the vector `φ^{-1}(e_σ) · v` of `Res_{L/F_p}(L^n) ⊗ L`,
/// with `e_σ` the idempotent of `L ⊗ L` on the `σ` factor. Returns the vector
/// (coordinates in the basis `e_i t^j ⊗ 1`) and its eigenvalues `σ(a_T)` for
/// the operators `Res(T) ⊗ 1`.
pub fn galois_descend(ops: &[GfMat], v: &[Gf], s: usize) -> Result<(Vec<Gf>, Vec<Gf>), HeckeError> {
    let l: FiniteField = v[0].field().clone();
    let a = l.degree();
    if ops.iter().any(|m| m.field().degree() != 1) {
        return Err(HeckeError::UnsupportedWeight("operators must be defined over the prime field".into()));
    }
    let ops_l: Vec<GfMat> = ops.iter().map(|m| m.map(&l, |x| l.from_int(x.coeffs()[0] as i64))).collect();
    is_joint_eigenvector(&ops_l, v).ok_or(HeckeError::NotEigenvector)?;
    // φ(t^j ⊗ c) = (τ(t)^j c)_τ, τ = Frob^r; solve φ(Σ_j t^j ⊗ c_j) = δ_σ
    let t = l.generator();
    let phi_rows: Vec<Vec<Gf>> = (0..a).map(|r| (0..a).map(|j| t.frobenius_pow(r).pow(j as u64)).collect()).collect();
    let phi = GfMat::from_rows(&l, phi_rows);
    let mut delta = vec![l.zero(); a];
    delta[s % a] = l.one();
    let c = phi.solve(&delta).expect("Vandermonde in distinct conjugates");
    // (v_i ⊗ 1)(Σ_j t^j ⊗ c_j) = Σ_m t^m ⊗ Σ_j coeff_m(v_i t^j) c_j
    let n = v.len();
    let mut out = vec![l.zero(); n * a];
    for i in 0..n {
        for (j, cj) in c.iter().enumerate() {
            let x = coords(&(&v[i] * &t.pow(j as u64)));
            for (m, coef) in x.iter().enumerate() {
                out[i * a + m] += &cj.scale(*coef);
            }
        }
    }
    let res: Vec<GfMat> = ops_l.iter().map(|m| restrict_scalars(m).map(&l, |x| l.from_int(x.coeffs()[0] as i64))).collect();
    let got = is_joint_eigenvector(&res, &out).ok_or(HeckeError::NotEigenvector)?;
    Ok((out, got))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_frobenius_swaps_eigenvalues() {
        let f2 = FiniteField::prime_field(2).unwrap();
        let f4 = FiniteField::new(2, 2).unwrap();
        // companion matrix of x^2 + x + 1: eigenvalues ω, ω^2
        let m = GfMat::from_ints(&f2, &[vec![0, 1], vec![1, 1]]);
        let w = f4.generator();
        let ml = m.map(&f4, |x| f4.from_int(x.coeffs()[0] as i64));
        let kern = {
            let mut s = ml.clone();
            for i in 0..2 {
                s[(i, i)] -= &w;
            }
            s.kernel()
        };
        let v = &kern[0];
        let (_, id) = galois_descend(&[m.clone()], v, 0).unwrap();
        assert_eq!(id[0], w);
        let (_, sig) = galois_descend(&[m], v, 1).unwrap();
        assert_eq!(sig[0], w.frobenius());
    }
}
