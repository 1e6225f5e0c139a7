//! The superspecial Dieudonné module `A_{1,1}^g` over `W_k(F_{p^2})`, its
//! endomorphisms, the local quaternion order `W[π]` and the action on `M/FM`.
//!
//! Basis order is `e_1, f_1, ..., e_g, f_g`, one `A_{1,1}` per pair.

use rand::Rng;

use crate::arith::{FiniteField, Gf, GfMat, Witt, WittRing};

/// Dense matrix over `W_k(F_{p^2})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WMat {
    ring: WittRing,
    rows: usize,
    cols: usize,
    data: Vec<Witt>,
}

impl WMat {
    pub fn zeros(ring: &WittRing, rows: usize, cols: usize) -> Self {
        WMat { ring: ring.clone(), rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &WittRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_ints(ring: &WittRing, rows: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(ring, rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, ring.from_int(x));
            }
        }
        m
    }

    pub fn ring(&self) -> &WittRing {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Witt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Witt) {
        self.data[i * self.cols + j] = x;
    }

    fn map(&self, f: impl Fn(&Witt) -> Witt) -> WMat {
        WMat { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn sigma_pow(&self, e: i64) -> WMat {
        self.map(|x| x.sigma_pow(e))
    }

    pub fn scale(&self, c: &Witt) -> WMat {
        self.map(|x| x * c)
    }

    pub fn transpose(&self) -> WMat {
        let mut m = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn add(&self, o: &WMat) -> WMat {
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&o.data) {
            *a = &*a + b;
        }
        m
    }

    pub fn sub(&self, o: &WMat) -> WMat {
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(&o.data) {
            *a = &*a - b;
        }
        m
    }

    pub fn mul(&self, o: &WMat) -> WMat {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = Self::zeros(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = &m.data[i * o.cols + j] + &(a * o.get(k, j));
                    m.data[i * o.cols + j] = v;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Witt]) -> Vec<Witt> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(self.ring.zero(), |acc, j| &acc + &(self.get(i, j) * &v[j])))
            .collect()
    }

    /// Entrywise reduction to `F_{p^2}`.
    pub fn reduce(&self) -> GfMat {
        let f = self.ring.residue_field();
        let rows = (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).reduce()).collect()).collect();
        GfMat::from_rows(f, rows)
    }

    /// Inverse over the local ring `W_k`; exists iff the reduction is invertible.
    pub fn inverse(&self) -> Option<WMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.ring, n);
        for c in 0..n {
            let piv = (c..n).find(|&i| a.get(i, c).is_unit())?;
            if piv != c {
                for j in 0..n {
                    a.data.swap(piv * n + j, c * n + j);
                    inv.data.swap(piv * n + j, c * n + j);
                }
            }
            let s = a.get(c, c).inv()?;
            for j in 0..n {
                a.set(c, j, a.get(c, j) * &s);
                inv.set(c, j, inv.get(c, j) * &s);
            }
            for i in 0..n {
                if i == c || a.get(i, c).is_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..n {
                    a.set(i, j, a.get(i, j) - &(&f * a.get(c, j)));
                    inv.set(i, j, inv.get(i, j) - &(&f * inv.get(c, j)));
                }
            }
        }
        Some(inv)
    }
}

/// `x ↦ mat · σ^twist(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semilinear {
    pub mat: WMat,
    pub twist: i64,
}

impl Semilinear {
    pub fn linear(mat: WMat) -> Self {
        Semilinear { mat, twist: 0 }
    }

    pub fn apply(&self, x: &[Witt]) -> Vec<Witt> {
        let sx: Vec<Witt> = x.iter().map(|c| c.sigma_pow(self.twist)).collect();
        self.mat.mul_vec(&sx)
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Semilinear) -> Semilinear {
        Semilinear { mat: self.mat.mul(&o.mat.sigma_pow(self.twist)), twist: (self.twist + o.twist).rem_euclid(2) }
    }

    /// Equal as maps (twists compared modulo the order of `σ`).
    pub fn same_map(&self, o: &Semilinear) -> bool {
        self.mat == o.mat && (self.twist - o.twist).rem_euclid(2) == 0
    }
}

#[derive(Clone, Debug)]
pub struct DieudonneModule {
    pub g: usize,
    pub ring: WittRing,
    pub frob: Semilinear,
    pub ver: Semilinear,
    /// `e_0(x, y) = x^t E_0 y`.
    pub e0: WMat,
}

fn block_diag(ring: &WittRing, g: usize, blk: [[i64; 2]; 2]) -> WMat {
    let mut m = WMat::zeros(ring, 2 * g, 2 * g);
    for b in 0..g {
        for i in 0..2 {
            for j in 0..2 {
                m.set(2 * b + i, 2 * b + j, ring.from_int(blk[i][j]));
            }
        }
    }
    m
}

/// `A_{1,1}^g` with `F = [[0,1],[-p,0]]σ`, `V = [[0,-1],[p,0]]σ^{-1}` and `E_0 = diag(J_2)`.
pub fn build_module(g: usize, p: u64, k: u32) -> DieudonneModule {
    assert!(k >= 2, "Witt precision must be at least 2");
    let ring = WittRing::new(p, k);
    let pi = p as i64;
    let m = DieudonneModule {
        g,
        frob: Semilinear { mat: block_diag(&ring, g, [[0, 1], [-pi, 0]]), twist: 1 },
        ver: Semilinear { mat: block_diag(&ring, g, [[0, -1], [pi, 0]]), twist: -1 },
        e0: block_diag(&ring, g, [[0, 1], [-1, 0]]),
        ring,
    };
    let p_id = Semilinear::linear(WMat::identity(&m.ring, 2 * g).scale(&m.ring.from_int(pi)));
    assert!(m.frob.compose(&m.ver).same_map(&p_id));
    assert!(m.ver.compose(&m.frob).same_map(&p_id));
    m
}

impl DieudonneModule {
    pub fn rank(&self) -> usize {
        2 * self.g
    }

    pub fn pairing(&self, x: &[Witt], y: &[Witt]) -> Witt {
        let ey = self.e0.mul_vec(y);
        x.iter().zip(&ey).fold(self.ring.zero(), |acc, (a, b)| &acc + &(a * b))
    }

    /// `e_0(Fx, y) = σ(e_0(x, Vy))`.
    pub fn adjoint_holds(&self, x: &[Witt], y: &[Witt]) -> bool {
        self.pairing(&self.frob.apply(x), y) == self.pairing(x, &self.ver.apply(y)).sigma()
    }

    pub fn commutes_with_f_and_v(&self, t: &DieudonneEnd) -> bool {
        let tl = Semilinear::linear(t.mat.clone());
        tl.compose(&self.frob).same_map(&self.frob.compose(&tl))
            && tl.compose(&self.ver).same_map(&self.ver.compose(&tl))
    }

    /// Basis of `M/FM` over `F_{p^2}` as indices of standard basis vectors, together with
    /// the reduction of `F` (whose column space is `FM/pM`).
    fn quotient_data(&self) -> (Vec<usize>, GfMat) {
        let fm = self.frob.mat.reduce();
        let n = self.rank();
        let field = fm.field().clone();
        let mut span: Vec<Vec<Gf>> = (0..n).map(|j| fm.col(j)).collect();
        let base_rank = GfMat::from_rows(&field, span.clone()).rank();
        let mut comp = Vec::new();
        let mut rank = base_rank;
        for i in 0..n {
            let mut e = vec![field.zero(); n];
            e[i] = field.one();
            span.push(e);
            let r = GfMat::from_rows(&field, span.clone()).rank();
            if r > rank {
                rank = r;
                comp.push(i);
            } else {
                span.pop();
            }
        }
        (comp, fm)
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient_data().0.len()
    }

    /// Matrix of the map induced by `t` on `M/FM`, in the basis given by the
    /// complement of `FM` among standard basis vectors.
    pub fn reduction_action(&self, t: &DieudonneEnd) -> GfMat {
        let (comp, fm) = self.quotient_data();
        let n = self.rank();
        let field = fm.field().clone();
        // columns: a basis of FM mod p, then the complement vectors
        let mut fm_basis = fm.transpose();
        let piv = fm_basis.rref();
        let mut cols: Vec<Vec<Gf>> = (0..piv.len()).map(|i| fm_basis.row(i).to_vec()).collect();
        for &i in &comp {
            let mut e = vec![field.zero(); n];
            e[i] = field.one();
            cols.push(e);
        }
        let basis = GfMat::from_rows(&field, cols).transpose();
        let tm = t.mat.reduce();
        let d = comp.len();
        let mut out = GfMat::zeros(&field, d, d);
        for (c, &j) in comp.iter().enumerate() {
            let img = tm.col(j);
            let coords = basis.solve(&img).expect("basis spans");
            for r in 0..d {
                out[(r, c)] = coords[piv.len() + r].clone();
            }
        }
        out
    }
}

/// An endomorphism of `A_{1,1}^g` commuting with `F`: every `2 × 2` block has
/// the shape `[[x, y], [-p σ(y), σ(x)]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DieudonneEnd {
    pub g: usize,
    pub mat: WMat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DieudonneError {
    #[error("block ({0}, {1}) does not have the endomorphism shape")]
    BadBlock(usize, usize),
    #[error("matrix size is not 2g")]
    BadSize,
}

impl DieudonneEnd {
    pub fn new(g: usize, mat: WMat) -> Result<Self, DieudonneError> {
        if mat.rows() != 2 * g || mat.cols() != 2 * g {
            return Err(DieudonneError::BadSize);
        }
        let p = mat.ring().p() as i64;
        for i in 0..g {
            for j in 0..g {
                let x = mat.get(2 * i, 2 * j);
                let y = mat.get(2 * i, 2 * j + 1);
                if *mat.get(2 * i + 1, 2 * j) != y.sigma().scale(-p) || *mat.get(2 * i + 1, 2 * j + 1) != x.sigma() {
                    return Err(DieudonneError::BadBlock(i, j));
                }
            }
        }
        Ok(DieudonneEnd { g, mat })
    }

    pub fn block(&self, i: usize, j: usize) -> QuatPadic {
        QuatPadic { x: self.mat.get(2 * i, 2 * j).clone(), y: self.mat.get(2 * i, 2 * j + 1).clone() }
    }

    pub fn mul(&self, o: &DieudonneEnd) -> DieudonneEnd {
        DieudonneEnd { g: self.g, mat: self.mat.mul(&o.mat) }
    }

    pub fn add(&self, o: &DieudonneEnd) -> DieudonneEnd {
        DieudonneEnd { g: self.g, mat: self.mat.add(&o.mat) }
    }
}

/// `x + yπ` in `O_p = W[π]`, `π^2 = -p`, `π a = σ(a) π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatPadic {
    pub x: Witt,
    pub y: Witt,
}

impl QuatPadic {
    pub fn zero(ring: &WittRing) -> Self {
        QuatPadic { x: ring.zero(), y: ring.zero() }
    }

    pub fn one(ring: &WittRing) -> Self {
        QuatPadic { x: ring.one(), y: ring.zero() }
    }

    pub fn pi(ring: &WittRing) -> Self {
        QuatPadic { x: ring.zero(), y: ring.one() }
    }

    pub fn mul(&self, o: &QuatPadic) -> QuatPadic {
        let p = self.x.ring().p() as i64;
        QuatPadic {
            x: &(&self.x * &o.x) - &(&self.y * &o.y.sigma()).scale(p),
            y: &(&self.x * &o.y) + &(&self.y * &o.x.sigma()),
        }
    }

    pub fn add(&self, o: &QuatPadic) -> QuatPadic {
        QuatPadic { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    pub fn conj(&self) -> QuatPadic {
        QuatPadic { x: self.x.sigma(), y: -&self.y }
    }

    pub fn norm(&self) -> Witt {
        let p = self.x.ring().p() as i64;
        &(&self.x * &self.x.sigma()) + &(&self.y * &self.y.sigma()).scale(p)
    }
}

/// `g × g` matrix over `O_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QpMat {
    pub g: usize,
    pub data: Vec<QuatPadic>,
}

impl QpMat {
    pub fn get(&self, i: usize, j: usize) -> &QuatPadic {
        &self.data[i * self.g + j]
    }

    pub fn identity(ring: &WittRing, g: usize) -> Self {
        let data = (0..g * g).map(|n| if n / g == n % g { QuatPadic::one(ring) } else { QuatPadic::zero(ring) }).collect();
        QpMat { g, data }
    }

    pub fn mul(&self, o: &QpMat) -> QpMat {
        let g = self.g;
        let ring = self.data[0].x.ring().clone();
        let data = (0..g * g)
            .map(|n| {
                let (i, j) = (n / g, n % g);
                (0..g).fold(QuatPadic::zero(&ring), |acc, k| acc.add(&self.get(i, k).mul(o.get(k, j))))
            })
            .collect();
        QpMat { g, data }
    }

    pub fn add(&self, o: &QpMat) -> QpMat {
        QpMat { g: self.g, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn star(&self) -> QpMat {
        let g = self.g;
        QpMat { g, data: (0..g * g).map(|n| self.get(n % g, n / g).conj()).collect() }
    }
}

/// `T ↦ (x_ij + y_ij π)`.
pub fn phi_iso(t: &DieudonneEnd) -> QpMat {
    let g = t.g;
    QpMat { g, data: (0..g * g).map(|n| t.block(n / g, n % g)).collect() }
}

pub fn phi_inverse(m: &QpMat) -> DieudonneEnd {
    let g = m.g;
    let ring = m.data[0].x.ring().clone();
    let p = ring.p() as i64;
    let mut mat = WMat::zeros(&ring, 2 * g, 2 * g);
    for i in 0..g {
        for j in 0..g {
            let q = m.get(i, j);
            mat.set(2 * i, 2 * j, q.x.clone());
            mat.set(2 * i, 2 * j + 1, q.y.clone());
            mat.set(2 * i + 1, 2 * j, q.y.sigma().scale(-p));
            mat.set(2 * i + 1, 2 * j + 1, q.x.sigma());
        }
    }
    DieudonneEnd { g, mat }
}

/// `γ` with `M* M = γ I` over `O_p`.
pub fn qp_similitude(m: &QpMat) -> Option<Witt> {
    let prod = m.star().mul(m);
    let ring = m.data[0].x.ring().clone();
    let gamma = prod.get(0, 0).clone();
    if !gamma.y.is_zero() {
        return None;
    }
    let scalar = QpMat {
        g: m.g,
        data: (0..m.g * m.g).map(|n| if n / m.g == n % m.g { gamma.clone() } else { QuatPadic::zero(&ring) }).collect(),
    };
    (prod == scalar).then_some(gamma.x)
}

/// `γ` with `T^t E_0 T = γ E_0`.
pub fn is_symplectic_end(module: &DieudonneModule, t: &DieudonneEnd) -> Option<Witt> {
    let lhs = t.mat.transpose().mul(&module.e0).mul(&t.mat);
    let gamma = lhs.get(0, 1).clone();
    (lhs == module.e0.scale(&gamma)).then_some(gamma)
}

pub fn random_end<R: Rng + ?Sized>(ring: &WittRing, g: usize, rng: &mut R) -> DieudonneEnd {
    let data = (0..g * g).map(|_| QuatPadic { x: ring.random(rng), y: ring.random(rng) }).collect();
    phi_inverse(&QpMat { g, data })
}

/// Cayley transform `(I - X)(I + X)^{-1}` of a random skew-hermitian `X` over `O_p`,
/// times a random unit scalar.
pub fn random_symplectic_end<R: Rng + ?Sized>(ring: &WittRing, g: usize, rng: &mut R) -> DieudonneEnd {
    loop {
        let mut data = vec![QuatPadic::zero(ring); g * g];
        for i in 0..g {
            for j in i..g {
                if i == j {
                    let w = ring.random(rng);
                    data[i * g + i] = QuatPadic { x: &w - &w.sigma(), y: ring.random(rng) };
                } else {
                    let z = QuatPadic { x: ring.random(rng), y: ring.random(rng) };
                    let zc = z.conj();
                    data[j * g + i] = QuatPadic { x: -&zc.x, y: -&zc.y };
                    data[i * g + j] = z;
                }
            }
        }
        let x = phi_inverse(&QpMat { g, data }).mat;
        let id = WMat::identity(ring, 2 * g);
        let Some(inv) = id.add(&x).inverse() else { continue };
        let u = QuatPadic { x: ring.random_unit(rng), y: ring.random(rng) };
        let scalar = phi_inverse(&QpMat {
            g,
            data: (0..g * g).map(|n| if n / g == n % g { u.clone() } else { QuatPadic::zero(ring) }).collect(),
        });
        return DieudonneEnd { g, mat: id.sub(&x).mul(&inv).mul(&scalar.mat) };
    }
}

/// The endomorphism `diag(x, σ(x))` with `x` the Teichmüller lift of `λ^p`; it acts on `M/FM` as `λ`.
pub fn teichmuller_lift(ring: &WittRing, lambda: &Gf) -> DieudonneEnd {
    let x = ring.teichmuller(&lambda.frobenius());
    phi_inverse(&QpMat { g: 1, data: vec![QuatPadic { x, y: ring.zero() }] })
}

/// Entrywise `x_ij ↦ frob(x̄_ij)`, the expected action on `M/FM`.
pub fn reduction_formula(t: &DieudonneEnd, field: &FiniteField) -> GfMat {
    let g = t.g;
    let rows = (0..g).map(|i| (0..g).map(|j| t.block(i, j).x.reduce().frobenius()).collect()).collect();
    GfMat::from_rows(field, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fv_and_quotient() {
        let m = build_module(1, 5, 3);
        assert_eq!(m.quotient_dim(), 1);
        assert_eq!(m.quotient_data().0, vec![1]);
        let m3 = build_module(3, 3, 4);
        assert_eq!(m3.quotient_dim(), 3);
    }

    #[test]
    fn adjointness_on_basis() {
        let m = build_module(2, 3, 4);
        let ring = m.ring.clone();
        for a in 0..4 {
            for b in 0..4 {
                let mut x = vec![ring.zero(); 4];
                let mut y = vec![ring.zero(); 4];
                x[a] = ring.one();
                y[b] = ring.one();
                assert!(m.adjoint_holds(&x, &y));
            }
        }
    }

    #[test]
    fn frobenius_is_pi() {
        let m = build_module(1, 7, 3);
        let f = DieudonneEnd::new(1, m.frob.mat.clone()).unwrap();
        assert_eq!(phi_iso(&f), QpMat { g: 1, data: vec![QuatPadic::pi(&m.ring)] });
        assert_eq!(is_symplectic_end(&m, &f), Some(m.ring.from_int(7)));
        let id = DieudonneEnd::new(1, WMat::identity(&m.ring, 2)).unwrap();
        assert_eq!(is_symplectic_end(&m, &id), Some(m.ring.one()));
    }

    #[test]
    fn multiplicativity_and_shape() {
        let ring = WittRing::new(3, 3);
        let m = build_module(2, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_end(&ring, 2, &mut rng);
            let b = random_end(&ring, 2, &mut rng);
            let ab = a.mul(&b);
            assert!(DieudonneEnd::new(2, ab.mat.clone()).is_ok());
            assert!(m.commutes_with_f_and_v(&ab));
            assert_eq!(phi_iso(&ab), phi_iso(&a).mul(&phi_iso(&b)));
            assert_eq!(phi_inverse(&phi_iso(&a)), a);
        }
        let mut bad = WMat::identity(&ring, 2);
        bad.set(1, 0, ring.one());
        assert!(DieudonneEnd::new(1, bad).is_err());
    }

    #[test]
    fn teichmuller_and_kernel() {
        let m = build_module(1, 5, 4);
        let f = m.ring.residue_field().clone();
        for lambda in f.elements().filter(|x| !x.is_zero()) {
            let t = teichmuller_lift(&m.ring, &lambda);
            assert_eq!(m.reduction_action(&t), GfMat::from_rows(&f, vec![vec![lambda.clone()]]));
        }
    }

    #[test]
    fn symplectic_matches_unitary() {
        let m = build_module(2, 5, 4);
        let f = m.ring.residue_field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let t = random_symplectic_end(&m.ring, 2, &mut rng);
            let gamma = is_symplectic_end(&m, &t).expect("symplectic");
            assert_eq!(qp_similitude(&phi_iso(&t)), Some(gamma));
            let u = random_symplectic_end(&m.ring, 2, &mut rng);
            assert_eq!(m.reduction_action(&t), reduction_formula(&t, &f));
            assert_eq!(m.reduction_action(&t.mul(&u)), m.reduction_action(&t).mul(&m.reduction_action(&u)));
            let r = random_end(&m.ring, 2, &mut rng);
            assert_eq!(is_symplectic_end(&m, &r).is_some(), qp_similitude(&phi_iso(&r)).is_some());
        }
    }
}
