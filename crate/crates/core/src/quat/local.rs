//! Local maps of a maximal order: `O/NO ≅ M_2(Z/N)` for `gcd(N, p) = 1` and
//! the residue map `O → O/P ≅ F_{p^2}` at the ramified prime.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::algebra::QuatElem;
use super::order::{coords_mod, MaximalOrder};
use super::QuatError;
use crate::arith::int::{crt, factorize, gcd_u64, mod_inv};
use crate::arith::{FiniteField, Gf, GfMat, Poly};

/// 2x2 matrices over `Z/n`, row-major.
pub type Mat2 = [u64; 4];

pub fn mat2_mul(a: &Mat2, b: &Mat2, n: u64) -> Mat2 {
    let m = |x: u64, y: u64| ((x as u128 * y as u128) % n as u128) as u64;
    [
        (m(a[0], b[0]) + m(a[1], b[2])) % n,
        (m(a[0], b[1]) + m(a[1], b[3])) % n,
        (m(a[2], b[0]) + m(a[3], b[2])) % n,
        (m(a[2], b[1]) + m(a[3], b[3])) % n,
    ]
}

pub fn mat2_det(a: &Mat2, n: u64) -> u64 {
    let m = |x: u64, y: u64| ((x as u128 * y as u128) % n as u128) as u64;
    (m(a[0], a[3]) + n - m(a[1], a[2])) % n
}

pub fn mat2_inv(a: &Mat2, n: u64) -> Option<Mat2> {
    let d = mod_inv(mat2_det(a, n) as i128, n)?;
    let m = |x: u64| ((x as u128 * d as u128) % n as u128) as u64;
    Some([m(a[3]), m((n - a[1]) % n), m((n - a[2]) % n), m(a[0])])
}

pub fn mat2_reduce(a: &Mat2, n: u64) -> Mat2 {
    a.map(|x| x % n)
}

pub const MAT2_ID: Mat2 = [1, 0, 0, 1];

/// Arithmetic in `O/mO` through structure constants.
struct ModRing {
    m: u64,
    consts: Vec<[[u64; 4]; 4]>,
    one: [u64; 4],
}

impl ModRing {
    fn new(order: &MaximalOrder, m: u64) -> Self {
        let c = order.structure_constants();
        let bm = BigInt::from(m);
        let red = |x: &BigInt| {
            let r = x % &bm;
            ((r + &bm) % &bm).to_u64().unwrap()
        };
        let consts = (0..4)
            .map(|a| std::array::from_fn(|b| std::array::from_fn(|k| red(&c[a][b][k]))))
            .collect();
        let one_c = order.one_coords();
        ModRing { m, consts, one: std::array::from_fn(|k| red(&one_c[k])) }
    }

    fn mul(&self, x: &[u64; 4], y: &[u64; 4]) -> [u64; 4] {
        let m = self.m as u128;
        let mut out = [0u128; 4];
        for a in 0..4 {
            if x[a] == 0 {
                continue;
            }
            for b in 0..4 {
                if y[b] == 0 {
                    continue;
                }
                let xy = x[a] as u128 * y[b] as u128 % m;
                for k in 0..4 {
                    out[k] = (out[k] + xy * self.consts[a][b][k] as u128) % m;
                }
            }
        }
        out.map(|v| v as u64)
    }

    fn sub(&self, x: &[u64; 4], y: &[u64; 4]) -> [u64; 4] {
        std::array::from_fn(|k| (x[k] + self.m - y[k]) % self.m)
    }

    fn scale(&self, x: &[u64; 4], s: u64) -> [u64; 4] {
        x.map(|v| ((v as u128 * s as u128) % self.m as u128) as u64)
    }
}

/// `φ: O/NO → M_2(Z/N)`, stored as the images of the order basis.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub n: u64,
    pub basis_images: [Mat2; 4],
}

/// Data for one prime power `ℓ^e ‖ N`: images of the order basis modulo `ℓ^e`.
fn split_prime_power(order: &MaximalOrder, ell: u64, e: u32) -> [Mat2; 4] {
    let m = ell.pow(e);
    let r1 = ModRing::new(order, ell);
    // smallest nontrivial idempotent mod ℓ, coordinates read with the first coordinate most significant
    let mut idem = None;
    for idx in 0..ell.pow(4) {
        let c: [u64; 4] = std::array::from_fn(|k| (idx / ell.pow(3 - k as u32)) % ell);
        if c == [0; 4] || c == r1.one {
            continue;
        }
        if r1.mul(&c, &c) == c {
            idem = Some(c);
            break;
        }
    }
    let e0 = idem.expect("O/ℓO is a matrix algebra");
    let r = ModRing::new(order, m);
    let mut id = e0;
    for _ in 0..8 {
        let sq = r.mul(&id, &id);
        let cube = r.mul(&sq, &id);
        id = r.sub(&r.scale(&sq, 3), &r.scale(&cube, 2));
    }
    debug_assert_eq!(r.mul(&id, &id), id);
    let one = r.one;
    let comp = r.sub(&one, &id);
    let basis: Vec<[u64; 4]> =
        (0..4).map(|k| std::array::from_fn(|j| if j == k { 1 } else { 0 })).collect();
    let nonzero_mod_ell = |x: &[u64; 4]| x.iter().any(|&v| v % ell != 0);
    let e12 = basis
        .iter()
        .map(|y| r.mul(&r.mul(&id, y), &comp))
        .find(nonzero_mod_ell)
        .unwrap();
    let f = basis
        .iter()
        .map(|z| r.mul(&r.mul(&comp, z), &id))
        .find(nonzero_mod_ell)
        .unwrap();
    // e12 f = c e11
    let unit_pos = (0..4).find(|&k| id[k] % ell != 0).unwrap();
    let inv_e = mod_inv(id[unit_pos] as i128, m).unwrap();
    let scalar_of = |x: &[u64; 4]| -> u64 {
        let s = ((x[unit_pos] as u128 * inv_e as u128) % m as u128) as u64;
        debug_assert_eq!(r.scale(&id, s), *x);
        s
    };
    let c = scalar_of(&r.mul(&e12, &f));
    let e21 = r.scale(&f, mod_inv(c as i128, m).expect("unit"));
    // a_ij = coefficient of e11 in e_1i x e_j1
    let row1 = [id, e12];
    let col1 = [id, e21];
    std::array::from_fn(|k| {
        let x = basis[k];
        let mut mat = [0u64; 4];
        for i in 0..2 {
            for j in 0..2 {
                let t = r.mul(&r.mul(&row1[i], &x), &col1[j]);
                mat[2 * i + j] = scalar_of(&t);
            }
        }
        mat
    })
}

/// Splitting of `O/NO`, assembled by CRT from prime-power pieces.
pub fn split_mod_n(order: &MaximalOrder, n: u64) -> Result<Splitting, QuatError> {
    if gcd_u64(n, order.p()) != 1 || n < 2 {
        return Err(QuatError::LevelNotCoprime { n, p: order.p() });
    }
    let pieces: Vec<(u64, [Mat2; 4])> = factorize(n)
        .into_iter()
        .map(|(ell, e)| (ell.pow(e), split_prime_power(order, ell, e)))
        .collect();
    let basis_images = std::array::from_fn(|k| {
        std::array::from_fn(|entry| {
            let res: Vec<(u64, u64)> = pieces.iter().map(|(m, imgs)| (imgs[k][entry], *m)).collect();
            crt(&res).0
        })
    });
    Ok(Splitting { n, basis_images })
}

impl Splitting {
    pub fn apply_coords(&self, c: &[u64; 4]) -> Mat2 {
        let n = self.n;
        let mut out = [0u64; 4];
        for k in 0..4 {
            for e in 0..4 {
                out[e] = ((out[e] as u128 + c[k] as u128 * self.basis_images[k][e] as u128)
                    % n as u128) as u64;
            }
        }
        out
    }

    /// Image of an element integral at every prime dividing `N`.
    pub fn apply(&self, order: &MaximalOrder, x: &QuatElem) -> Option<Mat2> {
        coords_mod(order, x, self.n).map(|c| self.apply_coords(&c))
    }

    /// The splitting modulo a divisor of `N`.
    pub fn reduce_to(&self, d: u64) -> Splitting {
        assert_eq!(self.n % d, 0);
        Splitting { n: d, basis_images: self.basis_images.map(|m| mat2_reduce(&m, d)) }
    }
}

/// Residue map `O → F_{p^2}` as the images of the order basis.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub field: FiniteField,
    pub basis_images: [Gf; 4],
}

pub fn reduce_mod_p(order: &MaximalOrder) -> Reduction {
    let p = order.p();
    let fp = FiniteField::prime_field(p).unwrap();
    let f2 = FiniteField::new(p, 2).unwrap();
    let g = order.lattice.pairing_gram(&order.alg);
    let to_fp = |x: &num_rational::BigRational| {
        fp.from_int(crate::arith::int::rational_mod(x.numer(), x.denom(), p).unwrap() as i64)
    };
    let gm = GfMat::from_rows(&fp, (0..4).map(|i| (0..4).map(|j| to_fp(&g[i][j])).collect()).collect());
    let rad = gm.kernel();
    assert_eq!(rad.len(), 2, "radical of the trace form should be 2-dimensional");
    let one = coords_mod(order, &QuatElem::one(), p).unwrap();
    let one_v: Vec<Gf> = one.iter().map(|&x| fp.from_int(x as i64)).collect();
    let e = order.basis();
    let unit_vec = |k: usize| -> Vec<Gf> { (0..4).map(|j| if j == k { fp.one() } else { fp.zero() }).collect() };
    let mut base_rows = vec![one_v.clone(), rad[0].clone(), rad[1].clone()];
    let zi = (0..4)
        .find(|&k| {
            let mut rows = base_rows.clone();
            rows.push(unit_vec(k));
            GfMat::from_rows(&fp, rows).rank() == 4
        })
        .expect("O/P has dimension 2");
    let z = &e[zi];
    let alg = &order.alg;
    let t = to_fp(&z.trd());
    let nz = to_fp(&alg.norm(z));
    let minpoly = Poly::new(&f2, vec![f2.from_int(nz.coeffs()[0] as i64), f2.from_int(-(t.coeffs()[0] as i64)), f2.one()]);
    let roots = minpoly.roots();
    assert_eq!(roots.len(), 2, "generator must have an irreducible quadratic minimal polynomial");
    let r = roots[0].clone();
    // columns: 1, z, rad0, rad1; solve e_k = a·1 + b·z + (radical part)
    base_rows.insert(1, unit_vec(zi));
    let m = GfMat::from_rows(&fp, base_rows).transpose();
    let basis_images = std::array::from_fn(|k| {
        let sol = m.solve(&unit_vec(k)).unwrap();
        let a = sol[0].coeffs()[0] as i64;
        let b = sol[1].coeffs()[0] as i64;
        &f2.from_int(a) + &(&f2.from_int(b) * &r)
    });
    Reduction { field: f2, basis_images }
}

impl Reduction {
    pub fn apply_coords(&self, c: &[u64; 4]) -> Gf {
        let mut acc = self.field.zero();
        for k in 0..4 {
            acc += &self.basis_images[k].scale(c[k]);
        }
        acc
    }

    /// Residue of a `p`-integral element of `B` (coordinates in the order basis
    /// with denominators prime to `p`).
    pub fn apply(&self, order: &MaximalOrder, x: &QuatElem) -> Option<Gf> {
        coords_mod(order, x, self.field.p()).map(|c| self.apply_coords(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::order::build_algebra;
    use crate::quat::algebra::Rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_elem(o: &MaximalOrder, rng: &mut ChaCha8Rng) -> QuatElem {
        let c: Vec<BigInt> = (0..4).map(|_| BigInt::from(rng.gen_range(-20i64..20))).collect();
        o.lattice.element(&c)
    }

    #[test]
    fn splitting_is_a_ring_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, n) in [(11u64, 3u64), (11, 12), (13, 4), (2, 9), (17, 6)] {
            let (alg, o) = build_algebra(p).unwrap();
            let s = split_mod_n(&o, n).unwrap();
            assert_eq!(s.apply(&o, &QuatElem::one()).unwrap(), MAT2_ID);
            for _ in 0..50 {
                let x = random_elem(&o, &mut rng);
                let y = random_elem(&o, &mut rng);
                let fx = s.apply(&o, &x).unwrap();
                let fy = s.apply(&o, &y).unwrap();
                assert_eq!(s.apply(&o, &alg.mul(&x, &y)).unwrap(), mat2_mul(&fx, &fy, n));
                let nx = alg.norm(&x).to_integer();
                let nmod = ((nx % BigInt::from(n)) + BigInt::from(n)) % BigInt::from(n);
                assert_eq!(BigInt::from(mat2_det(&fx, n)), nmod);
            }
        }
        let (_, o) = build_algebra(11).unwrap();
        assert!(split_mod_n(&o, 22).is_err());
    }

    #[test]
    fn splitting_reduces_compatibly() {
        let (_, o) = build_algebra(11).unwrap();
        let s3 = split_mod_n(&o, 3).unwrap();
        let s12 = split_mod_n(&o, 12).unwrap();
        assert_eq!(s12.reduce_to(3).basis_images, s3.basis_images);
    }

    #[test]
    fn residue_map_is_a_ring_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for p in [2u64, 3, 5, 11, 13, 17] {
            let (alg, o) = build_algebra(p).unwrap();
            let red = reduce_mod_p(&o);
            assert!(red.apply(&o, &QuatElem::one()).unwrap().is_one());
            for _ in 0..50 {
                let x = random_elem(&o, &mut rng);
                let y = random_elem(&o, &mut rng);
                let rx = red.apply(&o, &x).unwrap();
                let ry = red.apply(&o, &y).unwrap();
                assert_eq!(red.apply(&o, &alg.mul(&x, &y)).unwrap(), &rx * &ry);
                let nx = alg.norm(&x);
                let nmod = crate::arith::int::rational_mod(nx.numer(), nx.denom(), p).unwrap();
                assert_eq!(rx.absolute_norm(), nmod);
                if nmod == 0 {
                    assert!(rx.is_zero());
                }
            }
            let half = QuatElem::one().scale(&Rat::new(BigInt::from(1), BigInt::from(p + 1)));
            assert!(red.apply(&o, &half).is_some());
        }
    }
}
