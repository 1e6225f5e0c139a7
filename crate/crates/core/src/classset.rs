//! The decorated class set `Ω(N)` at `g = 1`: triples (ideal class, level
//! structure in `GL_2(Z/N)`, marker in `F_{p^2}^×`) modulo the unit group of
//! the left order of the class, acting on the left of both decorations.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::int::{gcd_u64, is_prime};
use crate::arith::{FiniteField, Gf};
use crate::quat::local::{mat2_det, mat2_inv, mat2_mul, mat2_reduce, Mat2, MAT2_ID};
use crate::quat::short::short_vectors;
use crate::quat::{
    build_algebra, ideal_classes, reduce_mod_p, split_mod_n, ClassInfo, MaximalOrder, QuatElem, QuatError,
    Reduction, Splitting,
};

#[derive(Debug, thiserror::Error)]
pub enum ClassSetError {
    #[error("invalid level data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error("unit group of class {0} does not act freely on level structures")]
    NotFree(usize),
    #[error("contexts are incompatible: {0}")]
    Mismatch(&'static str),
    #[error("serialization: {0}")]
    Serde(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Everything needed to decorate ideal classes at level `N`.
#[derive(Debug)]
pub struct LevelContext {
    pub p: u64,
    pub n: u64,
    pub order: MaximalOrder,
    pub classes: Vec<ClassInfo>,
    /// `x_i ∈ I_i` with `n(x_i)/nrd(I_i)` prime to `pN`, so `I_i ⊗ Z_q = x_i O_q` for `q | pN`.
    pub base: Vec<QuatElem>,
    pub splitting: Splitting,
    pub reduction: Reduction,
    /// Images `(s(u), r(u))` of `u = x_i^{-1} γ x_i` for every unit `γ` of `O_l(I_i)`.
    pub unit_images: Vec<Vec<(Mat2, Gf)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassSetPoint {
    pub class: usize,
    pub level: Mat2,
    pub marker: Gf,
}

pub fn validate_level(p: u64, n: u64) -> Result<(), ClassSetError> {
    if !is_prime(p) {
        return Err(ClassSetError::Invalid(format!("p = {p} is not prime")));
    }
    if n < 3 {
        return Err(ClassSetError::Invalid(format!("level N = {n} must be at least 3")));
    }
    if gcd_u64(n, p) != 1 {
        return Err(ClassSetError::Invalid(format!("level N = {n} is not prime to p = {p}")));
    }
    Ok(())
}

/// All of `GL_2(Z/N)` in lexicographic order.
pub fn gl2(n: u64) -> Vec<Mat2> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let m = [a, b, c, d];
                    if gcd_u64(mat2_det(&m, n), n) == 1 {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// An element of the ideal whose normalized norm is prime to `m`.
fn base_element(order: &MaximalOrder, info: &ClassInfo, m: u64) -> QuatElem {
    let alg = &order.alg;
    let g = info.ideal.normalized_gram(alg);
    let mut bound = BigInt::from(8);
    loop {
        let mut vecs = short_vectors(&g, &bound);
        vecs.sort();
        for (v, c) in vecs {
            let half: BigInt = v / 2;
            if gcd_u64(crate::arith::int::big_mod(&half, m), m) == 1 {
                return info.ideal.lattice.element(&c);
            }
        }
        bound *= 2;
    }
}

impl LevelContext {
    pub fn new(p: u64, n: u64) -> Result<Self, ClassSetError> {
        validate_level(p, n)?;
        let (_, order) = build_algebra(p)?;
        let classes = ideal_classes(&order)?;
        Self::from_parts(p, n, order, classes, None)
    }

    /// Rebuild from stored pieces; `base` is recomputed when absent.
    pub fn from_parts(
        p: u64,
        n: u64,
        order: MaximalOrder,
        classes: Vec<ClassInfo>,
        base: Option<Vec<QuatElem>>,
    ) -> Result<Self, ClassSetError> {
        validate_level(p, n)?;
        order.verify()?;
        let alg = &order.alg;
        let base = base.unwrap_or_else(|| classes.iter().map(|c| base_element(&order, c, p * n)).collect());
        if base.len() != classes.len() {
            return Err(ClassSetError::Mismatch("one base element per class"));
        }
        let splitting = split_mod_n(&order, n)?;
        let reduction = reduce_mod_p(&order);
        let mut unit_images = Vec::with_capacity(classes.len());
        for (i, (info, x)) in classes.iter().zip(&base).enumerate() {
            if !info.ideal.lattice.contains(x) {
                return Err(ClassSetError::Mismatch("base element outside its ideal"));
            }
            let xinv = alg.inv(x).ok_or(ClassSetError::Mismatch("zero base element"))?;
            let mut imgs = Vec::with_capacity(info.units.len());
            for gamma in &info.units {
                let u = alg.mul3(&xinv, gamma, x);
                let s = splitting.apply(&order, &u).ok_or(ClassSetError::Mismatch("unit not integral at N"))?;
                let r = reduction.apply(&order, &u).ok_or(ClassSetError::Mismatch("unit not integral at p"))?;
                imgs.push((s, r));
            }
            // free action on GL_2(Z/N): only the identity unit maps to the identity matrix
            if imgs.iter().filter(|(s, _)| *s == MAT2_ID).count() != 1 {
                return Err(ClassSetError::NotFree(i));
            }
            unit_images.push(imgs);
        }
        Ok(LevelContext { p, n, order, classes, base, splitting, reduction, unit_images })
    }

    pub fn field(&self) -> &FiniteField {
        &self.reduction.field
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn unit_orders(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.units.len()).collect()
    }

    /// The canonical representative of the orbit of `(class, level, marker)`.
    pub fn canonical(&self, class: usize, level: &Mat2, marker: &Gf) -> ClassSetPoint {
        let n = self.n;
        let level = mat2_reduce(level, n);
        self.unit_images[class]
            .iter()
            .map(|(s, r)| ClassSetPoint { class, level: mat2_mul(s, &level, n), marker: r * marker })
            .min()
            .expect("unit group contains 1")
    }

    /// Expected orbit count when the action is free.
    pub fn expected_size(&self) -> usize {
        let gl = gl2_order(self.n) as usize;
        let q = (self.p * self.p - 1) as usize;
        self.unit_orders().iter().map(|u| gl * q / u).sum()
    }

    /// `Σ |GL_2(Z/N)| / |O_i^×|`, the number of orbits with marker 1.
    pub fn weight_space_dim(&self) -> usize {
        let gl = gl2_order(self.n) as usize;
        self.unit_orders().iter().map(|u| gl / u).sum()
    }
}

/// `|GL_2(Z/N)| = N^4 ∏_{ℓ | N} (1 - 1/ℓ)(1 - 1/ℓ^2)`.
pub fn gl2_order(n: u64) -> u64 {
    let mut out = n.pow(4);
    for (ell, _) in crate::arith::int::factorize(n) {
        out = out / ell * (ell - 1);
        out = out / (ell * ell) * (ell * ell - 1);
    }
    out
}

#[derive(Clone, Debug)]
pub struct ClassSet {
    pub ctx: Arc<LevelContext>,
    pub points: Vec<ClassSetPoint>,
    index: HashMap<ClassSetPoint, usize>,
}

pub fn build_class_set(p: u64, n: u64) -> Result<ClassSet, ClassSetError> {
    Ok(ClassSet::new(Arc::new(LevelContext::new(p, n)?)))
}

impl ClassSet {
    pub fn new(ctx: Arc<LevelContext>) -> Self {
        let field = ctx.field().clone();
        let mut set = BTreeSet::new();
        let levels = gl2(ctx.n);
        let markers: Vec<Gf> = field.elements().filter(|x| !x.is_zero()).collect();
        for class in 0..ctx.class_count() {
            for a in &levels {
                let c = ctx.canonical(class, a, &field.one());
                if c.level != *a {
                    continue;
                }
                for eta in &markers {
                    set.insert(ctx.canonical(class, a, eta));
                }
            }
        }
        Self::from_points(ctx, set.into_iter().collect())
    }

    fn from_points(ctx: Arc<LevelContext>, points: Vec<ClassSetPoint>) -> Self {
        let index = points.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        ClassSet { ctx, points, index }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, pt: &ClassSetPoint) -> Option<usize> {
        self.index.get(pt).copied()
    }

    pub fn canonicalize(&self, pt: &ClassSetPoint) -> ClassSetPoint {
        self.ctx.canonical(pt.class, &pt.level, &pt.marker)
    }

    /// Points with marker 1, which index a basis of each weight space.
    pub fn marker_one(&self) -> Vec<ClassSetPoint> {
        self.points.iter().filter(|x| x.marker.is_one()).cloned().collect()
    }

    /// The residual action of `λ ∈ F_{p^2}^×` on markers.
    pub fn scale_marker(&self, lambda: &Gf, pt: &ClassSetPoint) -> ClassSetPoint {
        self.ctx.canonical(pt.class, &pt.level, &(&pt.marker * lambda))
    }
}

/// `g · (i, α, η) = (i, α g^{-1}, η)`.
pub fn gsp_action(ctx: &LevelContext, g: &Mat2, pt: &ClassSetPoint) -> ClassSetPoint {
    let ginv = mat2_inv(g, ctx.n).expect("invertible level element");
    ctx.canonical(pt.class, &mat2_mul(&pt.level, &ginv, ctx.n), &pt.marker)
}

/// Correction `(s_N(x_i^{-1} x'_i), r(x_i^{-1} x'_i))` between the base elements of two levels.
fn level_change(big: &LevelContext, small: &LevelContext, class: usize) -> (Mat2, Gf) {
    let alg = &small.order.alg;
    let m = alg.mul(&alg.inv(&small.base[class]).unwrap(), &big.base[class]);
    let s = small.splitting.apply(&small.order, &m).expect("unit at N");
    let r = small.reduction.apply(&small.order, &m).expect("unit at p");
    (s, r)
}

pub fn check_compatible(big: &LevelContext, small: &LevelContext) -> Result<(), ClassSetError> {
    if big.p != small.p || big.n % small.n != 0 {
        return Err(ClassSetError::Mismatch("level must divide the raised level"));
    }
    if big.order != small.order {
        return Err(ClassSetError::Mismatch("different maximal orders"));
    }
    if big.classes.iter().zip(&small.classes).any(|(a, b)| a.ideal != b.ideal) || big.classes.len() != small.classes.len() {
        return Err(ClassSetError::Mismatch("different class representatives"));
    }
    Ok(())
}

/// Forget level `N'` structure down to level `N | N'`.
pub fn raise_level(big: &LevelContext, small: &LevelContext, pt: &ClassSetPoint) -> Result<ClassSetPoint, ClassSetError> {
    check_compatible(big, small)?;
    let (s, r) = level_change(big, small, pt.class);
    let alpha = mat2_mul(&s, &mat2_reduce(&pt.level, small.n), small.n);
    Ok(small.canonical(pt.class, &alpha, &(&r * &pt.marker)))
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    class: usize,
    level: [u64; 4],
    marker: String,
}

#[derive(Serialize, Deserialize)]
struct ClassSetRecord {
    p: u64,
    n: u64,
    order: MaximalOrder,
    classes: Vec<ClassInfo>,
    base: Vec<QuatElem>,
    points: Vec<PointRecord>,
}

impl ClassSet {
    pub fn to_json(&self) -> String {
        let ctx = &self.ctx;
        let rec = ClassSetRecord {
            p: ctx.p,
            n: ctx.n,
            order: ctx.order.clone(),
            classes: ctx.classes.clone(),
            base: ctx.base.clone(),
            points: self
                .points
                .iter()
                .map(|x| PointRecord { class: x.class, level: x.level, marker: x.marker.to_string() })
                .collect(),
        };
        serde_json::to_string_pretty(&rec).expect("serializable")
    }

    /// Load and re-verify: every stored point must be canonical and the list complete.
    pub fn from_json(s: &str) -> Result<Self, ClassSetError> {
        let rec: ClassSetRecord = serde_json::from_str(s).map_err(|e| ClassSetError::Serde(e.to_string()))?;
        let ctx = Arc::new(LevelContext::from_parts(rec.p, rec.n, rec.order, rec.classes, Some(rec.base))?);
        let field = ctx.field().clone();
        let mut points = Vec::with_capacity(rec.points.len());
        for r in rec.points {
            let marker = field.parse(&r.marker).map_err(|e| ClassSetError::Serde(e.to_string()))?;
            let pt = ClassSetPoint { class: r.class, level: r.level, marker };
            if r.class >= ctx.class_count() || ctx.canonical(pt.class, &pt.level, &pt.marker) != pt {
                return Err(ClassSetError::Serde("stored point is not canonical".into()));
            }
            points.push(pt);
        }
        if points.len() != ctx.expected_size() || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ClassSetError::Serde("stored point list is incomplete or unordered".into()));
        }
        Ok(Self::from_points(ctx, points))
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassSetError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ClassSetError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_level_three() {
        let cs = build_class_set(2, 3).unwrap();
        assert_eq!(cs.len(), 6);
        assert_eq!(cs.ctx.expected_size(), 6);
        for x in &cs.points {
            assert_eq!(&cs.canonicalize(x), x);
        }
    }

    #[test]
    fn invalid_levels() {
        assert!(build_class_set(4, 3).is_err());
        assert!(build_class_set(3, 3).is_err());
        assert!(build_class_set(5, 2).is_err());
    }

    #[test]
    fn gl2_orders() {
        for n in [3u64, 4, 6, 12] {
            assert_eq!(gl2(n).len() as u64, gl2_order(n));
        }
        assert_eq!(gl2_order(3), 48);
    }

    #[test]
    fn json_round_trip() {
        let cs = build_class_set(2, 3).unwrap();
        let back = ClassSet::from_json(&cs.to_json()).unwrap();
        assert_eq!(back.points, cs.points);
        assert_eq!(back.to_json(), cs.to_json());
    }
}
