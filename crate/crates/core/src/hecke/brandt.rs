use std::collections::HashMap;

use super::{eigensystems, Eigensystem, HeckeError, Weight};
use crate::arith::{FiniteField, Gf, GfMat};
use crate::classset::{check_compatible, gsp_action, raise_level, ClassSet, ClassSetPoint, LevelContext};
use crate::quat::local::{mat2_mul, Mat2};
use crate::quat::{is_equivalent, right_ideals_of_norm};

/// The `ℓ + 1` representatives `[[ℓ, 0], [0, 1]]`, `[[1, j], [0, ℓ]]` of
/// `GL_2(Z_ℓ) diag(1, ℓ) GL_2(Z_ℓ) / GL_2(Z_ℓ)` read as left cosets.
pub fn coset_reps(ell: u64) -> Vec<[[i64; 2]; 2]> {
    let l = ell as i64;
    let mut out = vec![[[l, 0], [0, 1]]];
    out.extend((0..l).map(|j| [[1, j], [0, l]]));
    out
}

/// `GL_2(Z_ℓ) a = GL_2(Z_ℓ) b`, i.e. `a b^{-1} = a adj(b) / det(b)` is `ℓ`-integral
/// with unit determinant.
pub fn same_left_coset(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2], ell: u64) -> bool {
    let l = ell as i64;
    let val = |mut x: i64| {
        if x == 0 {
            return u32::MAX;
        }
        let mut v = 0;
        while x % l == 0 {
            x /= l;
            v += 1;
        }
        v
    };
    let det = |m: &[[i64; 2]; 2]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let vb = val(det(b));
    if val(det(a)) != vb {
        return false;
    }
    let adj = [[b[1][1], -b[0][1]], [-b[1][0], b[0][0]]];
    (0..2).all(|i| (0..2).all(|j| val(a[i][0] * adj[0][j] + a[i][1] * adj[1][j]) >= vb))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeOperator {
    pub ell: u64,
    pub matrix: GfMat,
}

/// Marker-one canonical points: the basis of every weight-character space.
pub fn weight_basis(cs: &ClassSet) -> Vec<ClassSetPoint> {
    cs.marker_one()
}

/// For each class `i`: the neighbours `J ⊂ I_i` of norm `ℓ`, as `(j, s(m), r(m))` with
/// `J = b I_j` and `m = x_j^{-1} b^{-1} x_i`. `witness_shift` replaces `b` by `b γ`
/// for a unit `γ` of `O_l(I_j)`, which must not change any operator.
pub fn class_edges(ctx: &LevelContext, ell: u64, witness_shift: usize) -> Result<Vec<Vec<(usize, Mat2, Gf)>>, HeckeError> {
    let pn = ctx.p * ctx.n;
    if pn % ell == 0 {
        return Err(HeckeError::BadEll { ell, pn });
    }
    let alg = &ctx.order.alg;
    let mut out = Vec::with_capacity(ctx.class_count());
    for (i, info) in ctx.classes.iter().enumerate() {
        let mut edges = Vec::with_capacity(ell as usize + 1);
        for sub in right_ideals_of_norm(&ctx.order, &info.ideal, ell)? {
            let (j, b) = ctx
                .classes
                .iter()
                .enumerate()
                .find_map(|(j, c)| is_equivalent(alg, &sub, &c.ideal).map(|b| (j, b)))
                .expect("class list is complete");
            let units = &ctx.classes[j].units;
            let b = alg.mul(&b, &units[witness_shift % units.len()]);
            let m = alg.mul3(&alg.inv(&ctx.base[j]).unwrap(), &alg.inv(&b).unwrap(), &ctx.base[i]);
            let s = ctx.splitting.apply(&ctx.order, &m).expect("m is a unit at N");
            let r = ctx.reduction.apply(&ctx.order, &m).expect("m is a unit at p");
            edges.push((j, s, r));
        }
        out.push(edges);
    }
    Ok(out)
}

/// Targets of `T_ℓ` on the weight basis, independent of the weight character.
#[derive(Clone, Debug)]
pub struct BrandtData {
    pub ell: u64,
    pub field: FiniteField,
    /// Row `x`: `(column, η)` with `f(target) = η^{-κ} F(column)`.
    pub targets: Vec<Vec<(usize, Gf)>>,
}

fn basis_index(basis: &[ClassSetPoint]) -> HashMap<(usize, Mat2), usize> {
    basis.iter().enumerate().map(|(k, x)| ((x.class, x.level), k)).collect()
}

pub fn brandt_data(cs: &ClassSet, ell: u64) -> Result<BrandtData, HeckeError> {
    brandt_data_shifted(cs, ell, 0)
}

pub fn brandt_data_shifted(cs: &ClassSet, ell: u64, witness_shift: usize) -> Result<BrandtData, HeckeError> {
    let ctx = &cs.ctx;
    let edges = class_edges(ctx, ell, witness_shift)?;
    let basis = weight_basis(cs);
    let index = basis_index(&basis);
    let targets = basis
        .iter()
        .map(|x| {
            edges[x.class]
                .iter()
                .map(|(j, s, r)| {
                    let t = ctx.canonical(*j, &mat2_mul(s, &x.level, ctx.n), r);
                    (index[&(t.class, t.level)], t.marker)
                })
                .collect()
        })
        .collect();
    Ok(BrandtData { ell, field: ctx.field().clone(), targets })
}

fn weighted(field: &FiniteField, rows: &[Vec<(usize, Gf)>], cols: usize, kappa: u64) -> GfMat {
    let q1 = field.order_u64().expect("small field") - 1;
    let e = (q1 - kappa % q1) % q1;
    let mut m = GfMat::zeros(field, rows.len(), cols);
    for (x, row) in rows.iter().enumerate() {
        for (c, eta) in row {
            let v = eta.pow(e);
            m[(x, *c)] += &v;
        }
    }
    m
}

impl BrandtData {
    pub fn dim(&self) -> usize {
        self.targets.len()
    }

    pub fn matrix(&self, kappa: u64) -> GfMat {
        weighted(&self.field, &self.targets, self.dim(), kappa)
    }

    pub fn operator(&self, kappa: u64) -> HeckeOperator {
        HeckeOperator { ell: self.ell, matrix: self.matrix(kappa) }
    }
}

pub fn brandt_operator(cs: &ClassSet, w: &Weight, ell: u64) -> Result<HeckeOperator, HeckeError> {
    let Weight::Character { kappa } = *w else {
        return Err(HeckeError::UnsupportedWeight(w.to_string()));
    };
    Ok(brandt_data(cs, ell)?.operator(kappa))
}

/// `(R_g F)(i, α) = f(i, α g, 1)`; `g ↦ R_g` is a homomorphism.
pub fn gsp_matrix(cs: &ClassSet, g: &Mat2, kappa: u64) -> GfMat {
    let ctx = &cs.ctx;
    let basis = weight_basis(cs);
    let index = basis_index(&basis);
    let ginv = crate::quat::local::mat2_inv(g, ctx.n).expect("invertible");
    let rows: Vec<Vec<(usize, Gf)>> = basis
        .iter()
        .map(|x| {
            let t = gsp_action(ctx, &ginv, x);
            vec![(index[&(t.class, t.level)], t.marker)]
        })
        .collect();
    weighted(ctx.field(), &rows, basis.len(), kappa)
}

/// Pullback of weight-`κ` functions along the forgetful map from level `N'` to level `N`.
pub fn pullback_matrix(big: &ClassSet, small: &ClassSet, kappa: u64) -> Result<GfMat, HeckeError> {
    check_compatible(&big.ctx, &small.ctx)?;
    let sb = weight_basis(small);
    let index = basis_index(&sb);
    let rows: Vec<Vec<(usize, Gf)>> = weight_basis(big)
        .iter()
        .map(|x| {
            let t = raise_level(&big.ctx, &small.ctx, x)?;
            Ok(vec![(index[&(t.class, t.level)], t.marker)])
        })
        .collect::<Result<_, HeckeError>>()?;
    Ok(weighted(small.ctx.field(), &rows, sb.len(), kappa))
}

/// Eigensystems of `T_ℓ` at each character weight `κ`, tagged with their weight.
pub fn sweep_characters(cs: &ClassSet, ells: &[u64], kappas: impl IntoIterator<Item = u64>) -> Result<Vec<Eigensystem>, HeckeError> {
    let data: Vec<BrandtData> = ells.iter().map(|&l| brandt_data(cs, l)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for kappa in kappas {
        let ops: Vec<HeckeOperator> = data.iter().map(|d| d.operator(kappa)).collect();
        for mut s in eigensystems(&ops)? {
            s.weight = Some(Weight::Character { kappa });
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classset::build_class_set;

    #[test]
    fn cosets() {
        for ell in [2u64, 3, 5] {
            let reps = coset_reps(ell);
            assert_eq!(reps.len() as u64, ell + 1);
            for (a, x) in reps.iter().enumerate() {
                assert_eq!(x[0][0] * x[1][1] - x[0][1] * x[1][0], ell as i64);
                for (b, y) in reps.iter().enumerate() {
                    assert_eq!(same_left_coset(x, y, ell), a == b);
                }
            }
        }
    }

    #[test]
    fn hurwitz_row_sums() {
        let cs = build_class_set(2, 3).unwrap();
        let d = brandt_data(&cs, 5).unwrap();
        let t = d.matrix(0);
        assert_eq!(t.rows(), 2);
        for i in 0..t.rows() {
            let s = t.row(i).iter().fold(t.field().zero(), |a, b| &a + b);
            assert_eq!(s, t.field().from_int(6));
        }
    }
}
