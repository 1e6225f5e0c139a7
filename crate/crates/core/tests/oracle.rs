use ssforms::arith::FiniteField;
use ssforms::oracle::{
    classical_eigensystems, delta_mod_p, eisenstein, has_model_with_points, hecke_on_qexp, match_eigensystems,
    supersingular_census, ClassicalSystem, MatchReport,
};

#[test]
fn delta_is_an_eigenform_mod_p() {
    for p in [11u64, 13, 17, 19] {
        let d = delta_mod_p(p, 400);
        for ell in [2u64, 3, 5, 7, 13].into_iter().filter(|l| *l != p) {
            let t = hecke_on_qexp(&d, ell, 12).unwrap();
            let a = d.coeffs[ell as usize];
            let scaled = d.truncate(t.precision()).scale(a);
            assert_eq!(t, scaled, "p={p} ell={ell}");
        }
    }
}

#[test]
fn delta_precision_is_monotone() {
    let short = delta_mod_p(11, 50);
    let long = delta_mod_p(11, 100);
    assert_eq!(long.truncate(50), short);
    // τ(2) = -24
    assert_eq!(short.coeffs[2], 9);
}

#[test]
fn hasse_invariant_congruence() {
    for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31] {
        let e = eisenstein(p, (p - 1) as u32, 200);
        assert_eq!(e.coeffs[0], 1);
        assert!(e.coeffs[1..].iter().all(|c| *c == 0), "p={p}");
    }
}

#[test]
fn census_small_primes() {
    for (p, h) in [(2u64, 1usize), (3, 1), (5, 1), (11, 2), (13, 1), (37, 3), (97, 8)] {
        assert_eq!(supersingular_census(p).unwrap().h, h, "p={p}");
    }
    let c = supersingular_census(11).unwrap();
    let f = FiniteField::new(11, 2).unwrap();
    // j = 0 and 1728 = 1 are the supersingular invariants mod 11
    assert_eq!(c.j_invariants, vec![f.zero(), f.one()]);
    assert!(supersingular_census(9).is_err());
}

#[test]
fn supersingular_curves_have_p_plus_one_squared_points() {
    for p in [5u64, 7, 11, 13] {
        for j in supersingular_census(p).unwrap().j_invariants {
            assert!(has_model_with_points(&j, (p + 1) * (p + 1)), "p={p} j={j}");
        }
    }
}

#[test]
fn weight_twelve_contains_delta() {
    let p = 11;
    let ells = [2u64, 5, 7, 13];
    let systems = classical_eigensystems(p, &ells, &[12], 16 * 13).unwrap();
    assert_eq!(systems.len(), 2);
    let d = delta_mod_p(p, 20);
    assert!(systems.iter().any(|s| ells.iter().all(|l| s.values[l].as_prime_field() == Some(d.coeffs[*l as usize]))));
    // the Eisenstein system 1 + ℓ^11 ≡ 1 + ℓ mod 11
    assert!(systems.iter().any(|s| ells.iter().all(|l| s.values[l].as_prime_field() == Some((1 + l) % p))));
}

#[test]
fn report_round_trip_and_empty_overlap() {
    let f = FiniteField::prime_field(11).unwrap();
    let sys = |vals: &[(u64, i64)]| ClassicalSystem { k: 4, values: vals.iter().map(|(l, v)| (*l, f.from_int(*v))).collect() };
    let q = ssforms::hecke::Eigensystem {
        weight: Some(ssforms::hecke::Weight::Character { kappa: 3 }),
        field_degree: 2,
        values: [(2u64, f.from_int(3)), (5, f.from_int(6))].into_iter().collect(),
        multiplicity: 1,
        orbit_size: 1,
    };
    let report = match_eigensystems(&[q.clone()], &[sys(&[(2, 3), (5, 6)]), sys(&[(2, 3), (5, 7)])]).unwrap();
    assert_eq!(report.entries[0].matches, vec![(3, 1)]);
    assert_eq!(report.entries[1].diverging_ell, Some(5));
    assert_eq!(report.failures(), 1);
    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<MatchReport>(&json).unwrap(), report);
    assert!(match_eigensystems(&[q], &[sys(&[(3, 1)])]).is_err());
}
