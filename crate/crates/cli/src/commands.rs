use std::collections::BTreeMap;

use anyhow::{Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use ssforms::arith::GfMat;
use ssforms::classset::{build_class_set, gl2, ClassSet};
use ssforms::dieudonne::{build_module, is_symplectic_end, phi_inverse, phi_iso, qp_similitude, random_end, random_symplectic_end};
use ssforms::hecke::{brandt_data, eigensystems, gsp_matrix, BrandtData, Eigensystem, Weight};
use ssforms::hermitian::{build_conjugation, is_similitude, random_gu_m2, Flavor};
use ssforms::oracle::{
    classical_eigensystems, control_ell, delta_system, match_eigensystems, perturbed, supersingular_census, MatchReport,
    CLASSICAL_WEIGHTS,
};
use ssforms::quat::ideal::mass;
use ssforms::quat::{build_algebra, ideal_classes, Rat};

use crate::cache::{Cache, Lookup};
use crate::config::RunConfig;

pub fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().context("building worker pool")
}

fn write_out(cfg: &RunConfig, body: &str) -> Result<()> {
    if let Some(path) = &cfg.out {
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Hit,
    Miss,
    Recomputed,
}

/// The class set for the configured level, through the cache when one is configured.
pub fn class_set(cfg: &RunConfig) -> Result<(ClassSet, CacheStatus)> {
    let Some(dir) = &cfg.cache_dir else {
        return Ok((build_class_set(cfg.p, cfg.n)?, CacheStatus::Disabled));
    };
    let cache = Cache::new(dir)?;
    let key = format!("classset-p{}-n{}", cfg.p, cfg.n);
    let status = match cache.get(&key) {
        Lookup::Hit(body) => match ClassSet::from_json(&body) {
            Ok(cs) => return Ok((cs, CacheStatus::Hit)),
            Err(e) => {
                eprintln!("warning: cached {key} failed verification ({e}); recomputing");
                CacheStatus::Recomputed
            }
        },
        Lookup::Corrupt => {
            eprintln!("warning: cached {key} has a bad checksum; recomputing");
            CacheStatus::Recomputed
        }
        Lookup::Miss => CacheStatus::Miss,
    };
    let cs = build_class_set(cfg.p, cfg.n)?;
    cache.put(&key, &cs.to_json())?;
    Ok((cs, status))
}

pub fn cmd_classset(cfg: &RunConfig) -> Result<bool> {
    let (cs, status) = class_set(cfg)?;
    println!("class set p={} N={}: {} points", cfg.p, cfg.n, cs.len());
    println!("unit orders: {:?}", cs.ctx.unit_orders());
    println!("weight space dimension: {}", cs.ctx.weight_space_dim());
    if status != CacheStatus::Disabled {
        println!("cache: {status:?}");
    }
    if let Some(path) = &cfg.out {
        cs.save(path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(true)
}

fn matrix_json(m: &GfMat) -> Vec<Vec<String>> {
    m.to_string_rows()
}

fn all_brandt(cs: &ClassSet, cfg: &RunConfig) -> Result<Vec<BrandtData>> {
    let pool = pool(cfg)?;
    pool.install(|| cfg.ell.par_iter().map(|&l| brandt_data(cs, l).map_err(anyhow::Error::from)).collect())
}

pub fn cmd_brandt(cfg: &RunConfig) -> Result<bool> {
    let (cs, _) = class_set(cfg)?;
    let data = all_brandt(&cs, cfg)?;
    let pool = pool(cfg)?;
    let jobs: Vec<(usize, u64)> = (0..data.len()).flat_map(|i| cfg.kappas.iter().map(move |&k| (i, k))).collect();
    let ops: Vec<serde_json::Value> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, kappa)| {
                let m = data[i].matrix(kappa);
                json!({ "ell": data[i].ell, "kappa": kappa, "dim": m.rows(), "matrix": matrix_json(&m) })
            })
            .collect()
    });
    println!("{} operators of dimension {} over F_{}^2", ops.len(), cs.ctx.weight_space_dim(), cfg.p);
    write_out(cfg, &to_json(&json!({ "p": cfg.p, "N": cfg.n, "operators": ops })))?;
    Ok(true)
}

#[derive(Serialize)]
struct SystemRow {
    field_degree: usize,
    multiplicity: usize,
    orbit_size: usize,
    values: BTreeMap<u64, String>,
}

#[derive(Serialize)]
struct WeightRow {
    kappa: u64,
    systems: Vec<SystemRow>,
}

/// Eigensystems at every configured character weight, in weight order.
pub fn sweep(cs: &ClassSet, cfg: &RunConfig) -> Result<Vec<Eigensystem>> {
    let data = all_brandt(cs, cfg)?;
    let pool = pool(cfg)?;
    let per: Vec<Vec<Eigensystem>> = pool.install(|| {
        cfg.kappas
            .par_iter()
            .map(|&kappa| {
                let ops: Vec<_> = data.iter().map(|d| d.operator(kappa)).collect();
                let mut out = eigensystems(&ops)?;
                for s in &mut out {
                    s.weight = Some(Weight::Character { kappa });
                }
                Ok(out)
            })
            .collect::<Result<_>>()
    })?;
    Ok(per.into_iter().flatten().collect())
}

fn kappa_of(s: &Eigensystem) -> u64 {
    match s.weight {
        Some(Weight::Character { kappa }) => kappa,
        _ => 0,
    }
}

pub fn cmd_eigensystems(cfg: &RunConfig) -> Result<bool> {
    let (cs, _) = class_set(cfg)?;
    let systems = sweep(&cs, cfg)?;
    let mut rows: Vec<WeightRow> = cfg.kappas.iter().map(|&kappa| WeightRow { kappa, systems: Vec::new() }).collect();
    for s in &systems {
        let row = rows.iter_mut().find(|r| r.kappa == kappa_of(s)).expect("configured weight");
        row.systems.push(SystemRow {
            field_degree: s.field_degree,
            multiplicity: s.multiplicity,
            orbit_size: s.orbit_size,
            values: s.values.iter().map(|(l, v)| (*l, v.to_string())).collect(),
        });
    }
    println!("{} eigensystem orbits across {} weights", systems.len(), rows.len());
    write_out(cfg, &to_json(&json!({ "p": cfg.p, "N": cfg.n, "ells": cfg.ell, "rows": rows })))?;
    Ok(true)
}

#[derive(Serialize)]
struct CheckResult {
    name: String,
    passed: bool,
    detail: String,
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn record(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        let detail = detail.into();
        println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        self.0.push(CheckResult { name: name.to_string(), passed, detail });
    }

    fn all_passed(&self) -> bool {
        self.0.iter().all(|c| c.passed)
    }
}

fn commute(a: &GfMat, b: &GfMat) -> bool {
    a.mul(b) == b.mul(a)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<bool> {
    let mut checks = Checks(Vec::new());
    let p = cfg.p;

    let (_, order) = build_algebra(p)?;
    let classes = ideal_classes(&order)?;
    let census = supersingular_census(p)?;
    checks.record("census", classes.len() == census.h, format!("{} ideal classes, {} supersingular j", classes.len(), census.h));
    let m = mass(&classes);
    checks.record("mass", m == Rat::new((p - 1).into(), 24.into()), format!("sum 1/|O^x| = {m}"));

    let (cs, status) = class_set(cfg)?;
    checks.record("class set size", cs.len() == cs.ctx.expected_size(), format!("{} points (cache {status:?})", cs.len()));

    let data = all_brandt(&cs, cfg)?;
    let q1 = p * p - 1;
    let pool = pool(cfg)?;
    let bad_commute: Vec<u64> = pool.install(|| {
        cfg.kappas
            .par_iter()
            .filter(|&&k| {
                let ts: Vec<GfMat> = data.iter().map(|d| d.matrix(k)).collect();
                !ts.iter().enumerate().all(|(i, a)| ts[i + 1..].iter().all(|b| commute(a, b)))
            })
            .copied()
            .collect()
    });
    checks.record("Hecke operators commute", bad_commute.is_empty(), format!("failing weights {bad_commute:?}"));

    let twist_bad: Vec<u64> = cfg.kappas.iter().copied().filter(|&k| data.iter().any(|d| d.matrix(p * k % q1) != d.matrix(k).frobenius())).collect();
    checks.record("Frobenius twist T(p k) = frob T(k)", twist_bad.is_empty(), format!("failing weights {twist_bad:?}"));

    let degrees_ok = data.iter().all(|d| {
        let m = d.matrix(0);
        (0..m.rows()).all(|i| (0..m.cols()).fold(m.field().zero(), |acc, j| &acc + &m[(i, j)]) == m.field().one().scale(d.ell + 1))
    });
    checks.record("trivial-weight row sums are l + 1", degrees_ok, "");

    let group = gl2(cfg.n);
    let sample: Vec<u64> = cfg.kappas.iter().copied().step_by((cfg.kappas.len() / 6).max(1)).collect();
    let gsp_ok = pool.install(|| {
        sample.par_iter().all(|&k| {
            let ts: Vec<GfMat> = data.iter().map(|d| d.matrix(k)).collect();
            group.iter().all(|g| {
                let r = gsp_matrix(&cs, g, k);
                ts.iter().all(|t| commute(&r, t))
            })
        })
    });
    checks.record("level action commutes with Hecke", gsp_ok, format!("{} group elements at weights {sample:?}", group.len()));

    let quat = sweep(&cs, cfg)?;
    let classical = classical_eigensystems(p, &cfg.ell, &CLASSICAL_WEIGHTS, cfg.qprec)?;
    let report = match_eigensystems(&quat, &classical)?;
    checks.record(
        "classical systems occur",
        report.failures() == 0,
        format!("{} of {} matched", report.entries.len() - report.failures(), report.entries.len()),
    );
    let delta = delta_system(p, &cfg.ell);
    let ok = match_eigensystems(&quat, &[delta.clone()])?;
    checks.record("Delta occurs", ok.failures() == 0, format!("{:?}", ok.entries[0].matches));
    let control = match_eigensystems(&quat, &[perturbed(&delta, control_ell(p, cfg.n))])?;
    checks.record("perturbed Delta is rejected", control.failures() == 1, format!("diverges at l = {:?}", control.entries[0].diverging_ell));

    let passed = checks.all_passed();
    write_out(cfg, &to_json(&VerifyReport { config: cfg.clone(), checks: checks.0, matches: report, passed }))?;
    Ok(passed)
}

#[derive(Serialize)]
struct VerifyReport {
    config: RunConfig,
    checks: Vec<CheckResult>,
    matches: MatchReport,
    passed: bool,
}

pub fn cmd_dieudonne_check(cfg: &RunConfig, samples: usize) -> Result<bool> {
    let mut checks = Checks(Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    for g in 1..=3 {
        let m = build_module(g, cfg.p, cfg.witt_k);
        let ring = m.ring.clone();
        let pw = ring.from_int(cfg.p as i64);
        let (mut fv, mut adj, mut iso, mut sym) = (true, true, true, true);
        fv &= m.frob.compose(&m.ver).same_map(&m.ver.compose(&m.frob));
        for _ in 0..samples {
            let x: Vec<_> = (0..2 * g).map(|_| ring.random(&mut rng)).collect();
            let y: Vec<_> = (0..2 * g).map(|_| ring.random(&mut rng)).collect();
            fv &= m.frob.apply(&m.ver.apply(&x)).iter().zip(&x).all(|(a, b)| *a == b * &pw);
            adj &= m.adjoint_holds(&x, &y);
            let a = random_end(&ring, g, &mut rng);
            let b = random_end(&ring, g, &mut rng);
            iso &= phi_iso(&a.mul(&b)) == phi_iso(&a).mul(&phi_iso(&b));
            iso &= phi_iso(&a.add(&b)) == phi_iso(&a).add(&phi_iso(&b));
            iso &= phi_inverse(&phi_iso(&a)) == a;
            let s = random_symplectic_end(&ring, g, &mut rng);
            sym &= is_symplectic_end(&m, &s).is_some();
            for t in [&s, &a] {
                sym &= is_symplectic_end(&m, t) == qp_similitude(&phi_iso(t));
            }
        }
        let tag = format!("g={g} p={} k={}", cfg.p, cfg.witt_k);
        checks.record(&format!("FV = VF = p ({tag})"), fv, format!("{samples} samples"));
        checks.record(&format!("adjointness ({tag})"), adj, format!("{samples} samples"));
        checks.record(&format!("phi ring isomorphism ({tag})"), iso, format!("{samples} samples"));
        checks.record(&format!("symplectic iff GU similitude ({tag})"), sym, format!("{samples} samples"));
    }
    let passed = checks.all_passed();
    write_out(cfg, &to_json(&json!({ "checks": checks.0, "passed": passed })))?;
    Ok(passed)
}

pub fn cmd_gu_gsp_check(cfg: &RunConfig, samples: usize, fields: &[u64]) -> Result<bool> {
    let mut checks = Checks(Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    for g in 1..=3 {
        let conj = build_conjugation(g);
        for &ell in fields {
            let f = ssforms::arith::FiniteField::prime_field(ell)?;
            let ok = (0..samples).all(|_| {
                let m = random_gu_m2(&f, g, &mut rng);
                let gamma = is_similitude(&m, Flavor::GU);
                let s = conj.to_gsp(&m);
                gamma.is_some() && is_similitude(&s, Flavor::GSp) == gamma && conj.to_gu(&s) == m
            });
            checks.record(&format!("GU_{g}(M_2(F_{ell})) -> GSp_{}", 2 * g), ok, format!("{samples} samples"));
        }
    }
    let passed = checks.all_passed();
    write_out(cfg, &to_json(&json!({ "checks": checks.0, "passed": passed })))?;
    Ok(passed)
}
