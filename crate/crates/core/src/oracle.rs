//! Classical side at `g = 1`: level-one modular forms mod `p` as `q`-expansions,
//! and supersingular `j`-invariants over `F_{p²}`. Nothing here touches the
//! quaternion algebra.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::embed::canonical_embedding;
use crate::arith::int::{is_prime, mod_inv, mod_pow, rational_mod};
use crate::arith::{FiniteField, Gf, GfMat};
use crate::hecke::{eigensystems, Eigensystem, HeckeError, HeckeOperator, Weight};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("insufficient precision: need {need} coefficients, have {have}")]
    Precision { need: usize, have: usize },
    #[error("incompatible expansions")]
    Incompatible,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no common ell between the two sides")]
    EmptyOverlap,
    #[error("ell = {0} divides p")]
    BadEll(u64),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

/// `Σ_{n ≤ Q} a_n q^n` with coefficients in `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub p: u64,
    pub weight: u32,
    pub coeffs: Vec<u64>,
}

impl QExpansion {
    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn zero(p: u64, weight: u32, prec: usize) -> Self {
        QExpansion { p, weight, coeffs: vec![0; prec + 1] }
    }

    pub fn truncate(&self, prec: usize) -> Self {
        QExpansion { coeffs: self.coeffs[..=prec.min(self.precision())].to_vec(), ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, OracleError> {
        if self.p != other.p {
            return Err(OracleError::Incompatible);
        }
        let prec = self.precision().min(other.precision());
        let p = self.p;
        let mut c = vec![0u64; prec + 1];
        for (i, a) in self.coeffs[..=prec].iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, b) in other.coeffs[..=prec - i].iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % p;
            }
        }
        Ok(QExpansion { p, weight: self.weight + other.weight, coeffs: c })
    }

    pub fn add(&self, other: &Self) -> Result<Self, OracleError> {
        if self.p != other.p || self.weight != other.weight {
            return Err(OracleError::Incompatible);
        }
        let prec = self.precision().min(other.precision());
        let coeffs = (0..=prec).map(|n| (self.coeffs[n] + other.coeffs[n]) % self.p).collect();
        Ok(QExpansion { coeffs, ..self.clone() })
    }

    pub fn scale(&self, c: u64) -> Self {
        QExpansion { coeffs: self.coeffs.iter().map(|a| a * (c % self.p) % self.p).collect(), ..self.clone() }
    }

    pub fn pow(&self, e: u32, prec: usize) -> Result<Self, OracleError> {
        let mut acc = QExpansion { p: self.p, weight: 0, coeffs: vec![0; prec + 1] };
        acc.coeffs[0] = 1 % self.p;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

/// `q ∏ (1 - q^n)^24` mod `p`.
pub fn delta_mod_p(p: u64, prec: usize) -> QExpansion {
    assert!(prec >= 2, "precision at least 2");
    // ∏ (1 - q^n) to precision prec - 1, then the 24th power
    let m = prec - 1;
    let mut eta = vec![0u64; m + 1];
    eta[0] = 1;
    for n in 1..=m {
        for i in (n..=m).rev() {
            eta[i] = (eta[i] + p - eta[i - n]) % p;
        }
    }
    let base = QExpansion { p, weight: 0, coeffs: eta };
    let mut pw = base.pow(24, m).expect("same prime");
    let mut coeffs = vec![0u64];
    coeffs.append(&mut pw.coeffs);
    QExpansion { p, weight: 12, coeffs }
}

fn bernoulli(k: usize) -> BigRational {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    let mut binom: Vec<BigInt> = vec![BigInt::one(); 2];
    for m in 1..=k {
        // row m+1 of Pascal's triangle
        let mut next = vec![BigInt::one(); m + 2];
        for i in 1..=m {
            next[i] = &binom[i - 1] + binom.get(i).cloned().unwrap_or_else(BigInt::zero);
        }
        binom = next;
        let s: BigRational = (0..m).map(|j| BigRational::from_integer(binom[j].clone()) * &b[j]).sum();
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b[k].clone()
}

/// Normalized Eisenstein series `1 - (2k / B_k) Σ σ_{k-1}(n) q^n` mod `p`
/// (requires the constant to be `p`-integral, true for all even `k ≥ 4`).
pub fn eisenstein(p: u64, k: u32, prec: usize) -> QExpansion {
    assert!(k >= 4 && k % 2 == 0, "even weight at least 4");
    let c = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k as usize);
    let c = rational_mod(c.numer(), c.denom(), p).expect("p-integral Eisenstein constant");
    let mut coeffs = vec![0u64; prec + 1];
    coeffs[0] = 1 % p;
    for d in 1..=prec as u64 {
        let dk = mod_pow(d % p, (k - 1) as u64, p);
        let mut n = d;
        while n <= prec as u64 {
            coeffs[n as usize] = (coeffs[n as usize] + c * dk) % p;
            n += d;
        }
    }
    QExpansion { p, weight: k, coeffs }
}

/// `T_ℓ` on level-one forms of weight `k`: `b_n = a_{nℓ} + ℓ^{k-1} a_{n/ℓ}`.
pub fn hecke_on_qexp(f: &QExpansion, ell: u64, k: u32) -> Result<QExpansion, OracleError> {
    if ell % f.p == 0 {
        return Err(OracleError::BadEll(ell));
    }
    let prec = f.precision() / ell as usize;
    if prec == 0 {
        return Err(OracleError::Precision { need: ell as usize + 1, have: f.coeffs.len() });
    }
    let lk = mod_pow(ell % f.p, (k - 1) as u64, f.p);
    let coeffs = (0..=prec)
        .map(|n| {
            let a = f.coeffs[n * ell as usize];
            let b = if n % ell as usize == 0 { lk * f.coeffs[n / ell as usize] % f.p } else { 0 };
            (a + b) % f.p
        })
        .collect();
    Ok(QExpansion { p: f.p, weight: k, coeffs })
}

/// Echelon basis `Δ^c E_4^a E_6^b` of level-one forms of weight `k` mod `p`
/// (integral over `Z[1/6]`, so valid for `p ≥ 5`).
pub fn modular_forms_basis(p: u64, k: u32, prec: usize) -> Vec<QExpansion> {
    let e4 = eisenstein(p, 4, prec);
    let e6 = eisenstein(p, 6, prec);
    let delta = delta_mod_p(p, prec.max(2)).truncate(prec);
    let mut out = Vec::new();
    let mut c = 0u32;
    while 12 * c <= k {
        let r = k - 12 * c;
        if let Some((a, b)) = (0..=r / 4).find_map(|a| ((r - 4 * a) % 6 == 0).then_some((a, (r - 4 * a) / 6))) {
            let f = delta.pow(c, prec).and_then(|d| d.mul(&e4.pow(a, prec)?)).and_then(|d| d.mul(&e6.pow(b, prec)?)).expect("same prime");
            out.push(QExpansion { weight: k, ..f });
        }
        c += 1;
    }
    out
}

/// Coordinates of `f` in an echelon basis (`basis[c]` starts with `q^c`).
fn echelon_coords(basis: &[QExpansion], f: &QExpansion) -> Result<Vec<u64>, OracleError> {
    let p = f.p;
    if f.precision() + 1 < basis.len() {
        return Err(OracleError::Precision { need: basis.len(), have: f.coeffs.len() });
    }
    let mut rest = f.coeffs.clone();
    let mut out = vec![0u64; basis.len()];
    for (c, b) in basis.iter().enumerate() {
        let x = rest[c];
        out[c] = x;
        for (n, r) in rest.iter_mut().enumerate() {
            *r = (*r + p * p - x * b.coeffs.get(n).copied().unwrap_or(0) % p) % p;
        }
    }
    Ok(out)
}

/// Matrix of `T_ℓ` on weight-`k` level-one forms mod `p`.
pub fn hecke_matrix(p: u64, k: u32, ell: u64, prec: usize) -> Result<GfMat, OracleError> {
    let basis = modular_forms_basis(p, k, prec);
    let fp = FiniteField::prime_field(p).map_err(|_| OracleError::NotPrime(p))?;
    let cols: Vec<Vec<u64>> = basis.iter().map(|f| echelon_coords(&basis, &hecke_on_qexp(f, ell, k)?)).collect::<Result<_, _>>()?;
    let n = basis.len();
    let rows: Vec<Vec<Gf>> = (0..n).map(|i| (0..n).map(|j| fp.from_int(cols[j][i] as i64)).collect()).collect();
    Ok(GfMat::from_rows(&fp, rows))
}

/// A level-one system mod `p` from weight `k`.
#[derive(Clone, Debug)]
pub struct ClassicalSystem {
    pub k: u32,
    pub values: BTreeMap<u64, Gf>,
}

/// Eigensystems of `T_ℓ` on level-one forms of each weight, one per Galois orbit.
pub fn classical_eigensystems(p: u64, ells: &[u64], weights: &[u32], prec: usize) -> Result<Vec<ClassicalSystem>, OracleError> {
    let mut out = Vec::new();
    for &k in weights {
        let ops: Vec<HeckeOperator> =
            ells.iter().map(|&ell| Ok(HeckeOperator { ell, matrix: hecke_matrix(p, k, ell, prec)? })).collect::<Result<_, OracleError>>()?;
        for s in eigensystems(&ops)? {
            out.push(ClassicalSystem { k, values: s.values });
        }
    }
    Ok(out)
}

/// Weights of the level-one forms compared against the quaternionic side.
pub const CLASSICAL_WEIGHTS: [u32; 12] = [4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26];

/// `{2, 5, 7, 13}` minus primes dividing `pN`, topped up with the next primes
/// coprime to `pN` until four remain: two primes leave so few distinct value
/// tuples that a perturbed system can land on a genuine one.
pub fn default_ells(p: u64, n: u64) -> Vec<u64> {
    let base = [2u64, 5, 7, 13];
    let mut ells: Vec<u64> = base.into_iter().filter(|l| (p * n) % l != 0).collect();
    for l in (3..).filter(|l| is_prime(*l) && !base.contains(l) && (p * n) % l != 0) {
        if ells.len() >= 4 {
            break;
        }
        ells.push(l);
    }
    ells.sort();
    ells
}

/// The prime whose eigenvalue the negative control shifts: 2, or the next base prime when `2 | pN`.
pub fn control_ell(p: u64, n: u64) -> u64 {
    [2u64, 5, 7, 13].into_iter().find(|l| (p * n) % l != 0).expect("some base prime is coprime to pN")
}

/// `Δ`'s system on `ells`, read off its `q`-expansion.
pub fn delta_system(p: u64, ells: &[u64]) -> ClassicalSystem {
    let fp = FiniteField::prime_field(p).expect("prime");
    let max = ells.iter().copied().max().unwrap_or(2) as usize;
    let d = delta_mod_p(p, max.max(2));
    ClassicalSystem { k: 12, values: ells.iter().map(|&l| (l, fp.from_int(d.coeffs[l as usize] as i64))).collect() }
}

/// The same system with `a_ℓ` shifted by one.
pub fn perturbed(sys: &ClassicalSystem, ell: u64) -> ClassicalSystem {
    let mut out = sys.clone();
    if let Some(v) = out.values.get_mut(&ell) {
        *v = &*v + &v.field().one();
    }
    out
}

#[derive(Clone, Debug)]
pub struct SupersingularCensus {
    pub p: u64,
    pub j_invariants: Vec<Gf>,
    pub h: usize,
}

/// Short Weierstrass model `y² = x³ + a x + b` with invariant `j` (`p ≥ 5`).
pub fn curve_with_j(j: &Gf) -> (Gf, Gf) {
    let f = j.field();
    if j.is_zero() {
        return (f.zero(), f.one());
    }
    let c = &f.from_int(1728) - j;
    if c.is_zero() {
        return (f.one(), f.zero());
    }
    (&(j * &c) * &f.from_int(3), &(&(j * &c) * &c) * &f.from_int(2))
}

/// Coefficient of `x^{p-1}` in `(x³ + a x + b)^{(p-1)/2}`.
pub fn hasse_invariant(a: &Gf, b: &Gf) -> Gf {
    let f = a.field();
    let p = f.p();
    let m = (p - 1) / 2;
    let fact: Vec<u64> = (0..=m).scan(1u64, |acc, i| {
        if i > 0 {
            *acc = *acc * i % p;
        }
        Some(*acc)
    }).collect();
    let mut total = f.zero();
    // x^{3i + s} a^s b^t with i + s + t = m and 3i + s = p - 1
    for i in 0..=m {
        let Some(s) = (p - 1).checked_sub(3 * i) else { break };
        if i + s > m {
            continue;
        }
        let t = m - i - s;
        let denom = fact[i as usize] * fact[s as usize] % p * fact[t as usize] % p;
        let coef = fact[m as usize] * mod_inv(denom as i128, p).unwrap() % p;
        total = &total + &(&a.pow(s) * &b.pow(t)).scale(coef);
    }
    total
}

/// Point count of a general Weierstrass curve over a small field, including infinity.
pub fn count_points(f: &FiniteField, a: &[Gf; 5]) -> u64 {
    let [a1, a2, a3, a4, a6] = a;
    let elems: Vec<Gf> = f.elements().collect();
    let mut count = 1;
    for x in &elems {
        let rhs = &(&(&(x * x) * &(x + a2)) + &(a4 * x)) + a6;
        for y in &elems {
            let lhs = &(y * y) + &(y * &(&(a1 * x) + a3));
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

/// `j`-invariant of a general Weierstrass equation, or `None` if singular.
pub fn j_invariant(a: &[Gf; 5]) -> Option<Gf> {
    let [a1, a2, a3, a4, a6] = a;
    let f = a1.field();
    let c = |n: i64| f.from_int(n);
    let b2 = &(a1 * a1) + &(a2 * &c(4));
    let b4 = &(a1 * a3) + &(a4 * &c(2));
    let b6 = &(a3 * a3) + &(a6 * &c(4));
    let b8 = &(&(&(&(a1 * a1) * a6) + &(&(a2 * a6) * &c(4))) - &(&(a1 * a3) * a4)) + &(&(&(a2 * a3) * a3) - &(a4 * a4));
    let c4 = &(&b2 * &b2) - &(&b4 * &c(24));
    let disc = &(&(&(&(-&(&b2 * &b2)) * &b8) - &(&(&b4 * &b4) * &(&b4 * &c(8)))) - &(&(&b6 * &b6) * &c(27))) + &(&(&b2 * &b4) * &(&b6 * &c(9)));
    if disc.is_zero() {
        return None;
    }
    (&(&c4 * &c4) * &c4).div(&disc).ok()
}

/// Supersingular `j`-invariants in `F_{p²}`, sorted by field index.
pub fn supersingular_census(p: u64) -> Result<SupersingularCensus, OracleError> {
    if !is_prime(p) {
        return Err(OracleError::NotPrime(p));
    }
    let f = FiniteField::new(p, 2).map_err(|_| OracleError::NotPrime(p))?;
    let mut js: Vec<Gf> = if p >= 5 {
        f.elements().filter(|j| {
            let (a, b) = curve_with_j(j);
            hasse_invariant(&a, &b).is_zero()
        }).collect()
    } else {
        // every curve over F_{p²}: supersingular iff #E ≡ 1 mod p
        let elems: Vec<Gf> = f.elements().collect();
        let mut found = Vec::new();
        for a1 in &elems {
            for a2 in &elems {
                for a3 in &elems {
                    for a4 in &elems {
                        for a6 in &elems {
                            let a = [a1.clone(), a2.clone(), a3.clone(), a4.clone(), a6.clone()];
                            let Some(j) = j_invariant(&a) else { continue };
                            if found.contains(&j) {
                                continue;
                            }
                            if count_points(&f, &a) % p == 1 {
                                found.push(j);
                            }
                        }
                    }
                }
            }
        }
        found
    };
    js.sort_by_key(|j| j.index());
    let h = js.len();
    Ok(SupersingularCensus { p, j_invariants: js, h })
}

/// Whether some model over `F_{p²}` of the curve with invariant `j` has exactly `target` points (`p ≥ 5`).
pub fn has_model_with_points(j: &Gf, target: u64) -> bool {
    let f = j.field().clone();
    let (a, b) = curve_with_j(j);
    let z = f.zero();
    let units: Vec<Gf> = f.elements().filter(|d| !d.is_zero()).collect();
    units.into_iter().any(|d| {
        let (a2, b2) = if a.is_zero() {
            (z.clone(), &b * &d)
        } else if b.is_zero() {
            (&a * &d, z.clone())
        } else {
            (&a * &(&d * &d), &b * &(&(&d * &d) * &d))
        };
        count_points(&f, &[z.clone(), z.clone(), z.clone(), a2, b2]) == target
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchEntry {
    pub k: u32,
    pub values: BTreeMap<u64, String>,
    /// `(κ, multiplicity)` pairs at which the system occurs.
    pub matches: Vec<(u64, usize)>,
    /// First `ℓ` (in increasing order) beyond which no quaternionic system agrees, when unmatched.
    pub diverging_ell: Option<u64>,
}

impl MatchEntry {
    pub fn passed(&self) -> bool {
        !self.matches.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub ells: Vec<u64>,
    pub entries: Vec<MatchEntry>,
}

impl MatchReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.passed()).count()
    }
}

fn embed_all(v: &BTreeMap<u64, Gf>, ells: &[u64], target: &FiniteField) -> Vec<Gf> {
    ells.iter()
        .map(|l| {
            let x = &v[l];
            canonical_embedding(x.field(), target).expect("subfield").apply(x)
        })
        .collect()
}

/// Length of the longest prefix of `ells` on which the two systems agree up to a common Frobenius.
fn agreement(a: &BTreeMap<u64, Gf>, b: &BTreeMap<u64, Gf>, ells: &[u64]) -> usize {
    let p = a.values().next().map(|x| x.field().p()).unwrap_or(2);
    let da = a.values().map(|x| x.field().degree()).max().unwrap_or(1);
    let db = b.values().map(|x| x.field().degree()).max().unwrap_or(1);
    let deg = num_integer::lcm(da, db);
    let target = FiniteField::new(p, deg).expect("field");
    let va = embed_all(a, ells, &target);
    let vb = embed_all(b, ells, &target);
    (0..deg)
        .map(|j| va.iter().zip(&vb).take_while(|(x, y)| x.frobenius_pow(j) == **y).count())
        .max()
        .unwrap_or(0)
}

/// Whether two systems agree on `ells` after applying one power of Frobenius to all values.
pub fn conjugate_systems(a: &BTreeMap<u64, Gf>, b: &BTreeMap<u64, Gf>, ells: &[u64]) -> bool {
    agreement(a, b, ells) == ells.len()
}

/// Locate each classical system among quaternionic ones (each tagged with its character weight),
/// comparing on the common `ℓ` up to Galois conjugacy.
pub fn match_eigensystems(quaternionic: &[Eigensystem], classical: &[ClassicalSystem]) -> Result<MatchReport, OracleError> {
    let mut ells: Vec<u64> = classical.first().map(|c| c.values.keys().copied().collect()).unwrap_or_default();
    ells.retain(|l| classical.iter().all(|c| c.values.contains_key(l)) && quaternionic.iter().all(|q| q.values.contains_key(l)));
    if ells.is_empty() {
        return Err(OracleError::EmptyOverlap);
    }
    let entries = classical
        .iter()
        .map(|c| {
            let mut matches = Vec::new();
            let mut best = 0;
            for q in quaternionic {
                let n = agreement(&c.values, &q.values, &ells);
                best = best.max(n);
                if n == ells.len() {
                    let kappa = match q.weight {
                        Some(Weight::Character { kappa }) => kappa,
                        _ => 0,
                    };
                    matches.push((kappa, q.multiplicity));
                }
            }
            matches.sort();
            matches.dedup();
            MatchEntry {
                k: c.k,
                values: c.values.iter().map(|(l, v)| (*l, v.to_string())).collect(),
                diverging_ell: (best < ells.len()).then(|| ells[best]),
                matches,
            }
        })
        .collect();
    Ok(MatchReport { ells, entries })
}
