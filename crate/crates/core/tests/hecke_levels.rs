use ssforms::classset::build_class_set;
use ssforms::hecke::{brandt_data, eigensystems};

#[test]
fn level_11_3_operators_commute() {
    let cs = build_class_set(11, 3).unwrap();
    assert_eq!(cs.len(), 2400);
    let d2 = brandt_data(&cs, 2).unwrap();
    let d5 = brandt_data(&cs, 5).unwrap();
    assert_eq!(d2.dim(), 20);
    for kappa in [0, 1, 5, 11, 60, 119] {
        let a = d2.matrix(kappa);
        let b = d5.matrix(kappa);
        assert_eq!(a.mul(&b), b.mul(&a), "kappa {kappa}");
    }
    let sys = eigensystems(&[d2.operator(0), d5.operator(0)]).unwrap();
    let total: usize = sys.iter().map(|s| s.multiplicity * s.orbit_size).sum();
    assert_eq!(total, 20);
}

#[test]
fn frobenius_twist_and_row_sums() {
    let cs = build_class_set(11, 3).unwrap();
    let d = brandt_data(&cs, 5).unwrap();
    let m0 = d.matrix(0);
    let one = m0.field().one();
    for i in 0..m0.rows() {
        let s = (0..m0.cols()).fold(m0.field().zero(), |acc, j| &acc + &m0[(i, j)]);
        assert_eq!(s, one.scale(6));
    }
    for kappa in [1u64, 3, 7] {
        assert_eq!(d.matrix(11 * kappa % 120), d.matrix(kappa).frobenius());
    }
}

#[test]
fn gsp_and_level_raising() {
    use ssforms::classset::gl2;
    use ssforms::hecke::{gsp_matrix, pullback_matrix};
    use ssforms::quat::local::mat2_mul;
    let cs = build_class_set(11, 3).unwrap();
    let g = gl2(3);
    let d = brandt_data(&cs, 5).unwrap();
    for kappa in [0u64, 2] {
        let t = d.matrix(kappa);
        for h in g.iter().step_by(7) {
            let r = gsp_matrix(&cs, h, kappa);
            assert_eq!(r.mul(&t), t.mul(&r));
            let h2 = g[11];
            assert_eq!(gsp_matrix(&cs, h, kappa).mul(&gsp_matrix(&cs, &h2, kappa)), gsp_matrix(&cs, &mat2_mul(h, &h2, 3), kappa));
        }
    }
    let big = build_class_set(11, 6).unwrap();
    for ell in [5u64, 7] {
        let ts = brandt_data(&cs, ell).unwrap();
        let tb = brandt_data(&big, ell).unwrap();
        for kappa in [0u64, 4] {
            let p = pullback_matrix(&big, &cs, kappa).unwrap();
            assert_eq!(tb.matrix(kappa).mul(&p), p.mul(&ts.matrix(kappa)), "ell {ell} kappa {kappa}");
        }
    }
}

#[test]
fn other_levels() {
    for (p, n, size, dim) in [(13u64, 4u64, 8064usize, 48usize), (17, 3, 9216, 32)] {
        let cs = build_class_set(p, n).unwrap();
        assert_eq!(cs.len(), size);
        let d = brandt_data(&cs, 5).unwrap();
        assert_eq!(d.dim(), dim);
        let d7 = brandt_data(&cs, 7).unwrap();
        assert_eq!(d.matrix(1).mul(&d7.matrix(1)), d7.matrix(1).mul(&d.matrix(1)));
    }
}
