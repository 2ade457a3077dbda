use super::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// RK4 integration of the hyperboloid geodesic equation `x'' = <x',x'>_L x`
/// together with the parallel-transport equation `W' = <x',W>_L x`.
/// Returns `(x(1), W(1), arc length)`.
fn integrate_geodesic(p: &[f64], v: &[f64], w: &[f64], steps: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let n = p.len();
    let mink = |a: &[f64], b: &[f64]| -> f64 {
        -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
    };
    // state = [x, x', W]
    let deriv = |s: &[f64]| -> Vec<f64> {
        let (x, xd, wv) = (&s[..n], &s[n..2 * n], &s[2 * n..]);
        let c = mink(xd, xd);
        let cw = mink(xd, wv);
        let mut out = Vec::with_capacity(3 * n);
        out.extend_from_slice(xd);
        out.extend(x.iter().map(|xi| c * xi));
        out.extend(x.iter().map(|xi| cw * xi));
        out
    };
    let mut s: Vec<f64> = p.iter().chain(v).chain(w).cloned().collect();
    let h = 1.0 / steps as f64;
    let mut length = 0.0;
    let speed = |s: &[f64]| mink(&s[n..2 * n], &s[n..2 * n]).max(0.0).sqrt();
    for _ in 0..steps {
        let k1 = deriv(&s);
        let s2: Vec<f64> = s.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let k2 = deriv(&s2);
        let s3: Vec<f64> = s.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let k3 = deriv(&s3);
        let s4: Vec<f64> = s.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let k4 = deriv(&s4);
        // Simpson on the speed for arc length.
        length += h / 6.0 * (speed(&s) + 2.0 * speed(&s2) + 2.0 * speed(&s3) + speed(&s4));
        for i in 0..s.len() {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    (s[..n].to_vec(), s[2 * n..].to_vec(), length)
}

fn test_manifolds() -> Vec<Manifold> {
    vec![
        Manifold::euclidean(4),
        Manifold::hyperboloid(3),
        Manifold::spd(3),
        Manifold::product(vec![
            Manifold::euclidean(2),
            Manifold::hyperboloid(2),
            Manifold::spd(2),
        ])
        .unwrap(),
    ]
}

#[test]
fn euclidean_exp_is_addition() {
    let m = Manifold::euclidean(2);
    let p = m.point(vec![1.0, 2.0]).unwrap();
    let v = m.tangent(&p, vec![3.0, -1.0]).unwrap();
    assert_eq!(m.exp(&p, &v).unwrap().coords(), &[4.0, 1.0]);
}

#[test]
fn euclidean_log_is_difference() {
    let m = Manifold::euclidean(2);
    let p = m.point(vec![1.0, 1.0]).unwrap();
    let q = m.point(vec![4.0, 5.0]).unwrap();
    assert_eq!(m.log(&p, &q).unwrap().coords(), &[3.0, 4.0]);
    assert_eq!(m.dist(&p, &q).unwrap(), 5.0);
}

#[test]
fn spd_commuting_exp_and_log() {
    let m = Manifold::spd(2);
    let id = m.origin();
    let target = m.point(vec![4.0, 0.0, 0.0, 9.0]).unwrap();
    let v = m.log(&id, &target).unwrap().scaled(0.5);
    let mid = m.exp(&id, &v).unwrap();
    assert!(max_abs_diff(mid.coords(), &[2.0, 0.0, 0.0, 3.0]) < 1e-12);

    let q = m
        .point(vec![std::f64::consts::E.powi(2), 0.0, 0.0, 1.0])
        .unwrap();
    let l = m.log(&id, &q).unwrap();
    assert!(max_abs_diff(l.coords(), &[2.0, 0.0, 0.0, 0.0]) < 1e-12);
    assert!(close(m.dist(&id, &q).unwrap(), 2.0, 1e-12));
}

#[test]
fn hyperboloid_exp_matches_closed_form_and_ode() {
    let m = Manifold::hyperboloid(2);
    let p = m.origin();
    let v = m.tangent(&p, vec![0.0, 1.0, 0.0]).unwrap();
    let q = m.exp(&p, &v).unwrap();
    let expected = [1f64.cosh(), 1f64.sinh(), 0.0];
    assert!(max_abs_diff(q.coords(), &expected) < 1e-12);
    assert!(close(q.coords()[0], 1.5431, 1e-4) && close(q.coords()[1], 1.1752, 1e-4));

    let (x1, _, len) = integrate_geodesic(p.coords(), v.coords(), &[0.0; 3], 2000);
    assert!(max_abs_diff(&x1, &expected) < 1e-9);
    assert!(close(len, 1.0, 1e-9));
    assert!(close(m.dist(&p, &q).unwrap(), 1.0, 1e-12));
}

#[test]
fn hyperboloid_exp_and_transport_match_ode_off_apex() {
    let m = Manifold::hyperboloid(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = m.sample_ball(&m.origin(), 1.5, &mut rng).unwrap();
        let v = m.random_unit_tangent(&p, &mut rng).unwrap().scaled(1.3);
        let w = m.random_tangent(&p, &mut rng).unwrap();
        let q = m.exp(&p, &v).unwrap();
        let (x1, w1, len) = integrate_geodesic(p.coords(), v.coords(), w.coords(), 4000);
        assert!(max_abs_diff(q.coords(), &x1) < 1e-8);
        assert!(close(len, m.norm(&v).unwrap(), 1e-8));
        let wt = m.transport(&p, &q, &w).unwrap();
        assert!(max_abs_diff(wt.coords(), &w1) < 1e-8);
        assert!(close(m.norm(&wt).unwrap(), m.norm(&w).unwrap(), 1e-9));
    }
}

#[test]
fn log_of_identical_points_is_exact_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in test_manifolds() {
        let p = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        assert!(m.log(&p, &p).unwrap().is_zero(), "{}", m.id());
        assert_eq!(m.dist(&p, &p).unwrap(), 0.0);
    }
}

#[test]
fn transport_to_self_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in test_manifolds() {
        let p = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let v = m.random_tangent(&p, &mut rng).unwrap();
        let t = m.transport(&p, &p, &v).unwrap();
        assert!(max_abs_diff(t.coords(), v.coords()) < 1e-12, "{}", m.id());
    }
}

#[test]
fn euclidean_transport_is_identity() {
    let m = Manifold::euclidean(3);
    let p = m.point(vec![1.0, 2.0, 3.0]).unwrap();
    let q = m.point(vec![-1.0, 0.5, 7.0]).unwrap();
    let v = m.tangent(&p, vec![0.3, -0.2, 0.9]).unwrap();
    assert_eq!(m.transport(&p, &q, &v).unwrap().coords(), v.coords());
}

#[test]
fn hyperboloid_metric_positive_on_tangents() {
    let m = Manifold::hyperboloid(4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let p = m.sample_ball(&m.origin(), 3.0, &mut rng).unwrap();
        let v = m.random_tangent(&p, &mut rng).unwrap();
        assert!(m.inner(&p, &v, &v).unwrap() > 0.0);
    }
}

#[test]
fn law_of_cosines_flat_and_degenerate() {
    let m = Manifold::euclidean(3);
    let p1 = m.point(vec![1.0, 0.0, 2.0]).unwrap();
    let p2 = m.point(vec![-1.0, 4.0, 0.5]).unwrap();
    let p3 = m.point(vec![0.25, 0.5, -3.0]).unwrap();
    assert!(m.law_of_cosines_slack(&p1, &p2, &p3).unwrap().abs() < 1e-12);

    let h = Manifold::hyperboloid(2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = h.sample_ball(&h.origin(), 2.0, &mut rng).unwrap();
    let b = h.sample_ball(&h.origin(), 2.0, &mut rng).unwrap();
    assert!(h.law_of_cosines_slack(&a, &b, &a).unwrap().abs() < 1e-9);
}

#[test]
fn law_of_cosines_strict_on_hyperboloid() {
    let h = Manifold::hyperboloid(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut positive = 0;
    for _ in 0..200 {
        let a = h.sample_ball(&h.origin(), 2.0, &mut rng).unwrap();
        let b = h.sample_ball(&h.origin(), 2.0, &mut rng).unwrap();
        let c = h.sample_ball(&h.origin(), 2.0, &mut rng).unwrap();
        let s = h.law_of_cosines_slack(&a, &b, &c).unwrap();
        assert!(s >= -1e-9);
        if s > 1e-6 {
            positive += 1;
        }
    }
    assert!(positive > 150);
}

#[test]
fn product_of_lines_is_plane() {
    let line = Manifold::euclidean(1);
    let prod = product_manifold(vec![line.clone(), line]).unwrap();
    let plane = Manifold::euclidean(2);
    let (pc, qc, vc) = (vec![0.5, -1.0], vec![2.0, 3.0], vec![1.5, 0.25]);
    let (pp, qp) = (
        prod.point(pc.clone()).unwrap(),
        prod.point(qc.clone()).unwrap(),
    );
    let (pe, qe) = (plane.point(pc).unwrap(), plane.point(qc).unwrap());
    let vp = prod.tangent(&pp, vc.clone()).unwrap();
    let ve = plane.tangent(&pe, vc).unwrap();
    assert!(
        max_abs_diff(
            prod.exp(&pp, &vp).unwrap().coords(),
            plane.exp(&pe, &ve).unwrap().coords()
        ) < 1e-12
    );
    assert!(
        max_abs_diff(
            prod.log(&pp, &qp).unwrap().coords(),
            plane.log(&pe, &qe).unwrap().coords()
        ) < 1e-12
    );
    assert!(close(
        prod.dist(&pp, &qp).unwrap(),
        plane.dist(&pe, &qe).unwrap(),
        1e-12
    ));
    assert!(close(
        prod.inner(&pp, &vp, &vp).unwrap(),
        plane.inner(&pe, &ve, &ve).unwrap(),
        1e-12
    ));
    assert!(
        max_abs_diff(
            prod.transport(&pp, &qp, &vp).unwrap().coords(),
            plane.transport(&pe, &qe, &ve).unwrap().coords()
        ) < 1e-12
    );
}

#[test]
fn product_log_is_componentwise_with_flat_difference() {
    let h = Manifold::hyperboloid(2);
    let prod = product_manifold(vec![h.clone(), Manifold::euclidean(2)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = h.sample_ball(&h.origin(), 1.0, &mut rng).unwrap();
    let q = h.sample_ball(&h.origin(), 1.0, &mut rng).unwrap();
    let (mu, nu) = ([0.5, 2.0], [-1.0, 3.5]);
    let pp = prod
        .point(p.coords().iter().chain(&mu).cloned().collect())
        .unwrap();
    let qp = prod
        .point(q.coords().iter().chain(&nu).cloned().collect())
        .unwrap();
    let l = prod.log(&pp, &qp).unwrap();
    let lh = h.log(&p, &q).unwrap();
    assert!(max_abs_diff(&l.coords()[..3], lh.coords()) < 1e-14);
    assert_eq!(&l.coords()[3..], &[-1.5, 1.5]);
    let d = prod.dist(&pp, &qp).unwrap();
    let expected = (h.dist_sq(&p, &q).unwrap() + 1.5f64.powi(2) * 2.0).sqrt();
    assert!(close(d, expected, 1e-12));
}

#[test]
fn errors_are_reported() {
    let m = Manifold::euclidean(2);
    let p = m.point(vec![0.0, 0.0]).unwrap();
    let q = m.point(vec![1.0, 0.0]).unwrap();
    let v = m.tangent(&q, vec![1.0, 1.0]).unwrap();
    assert_eq!(m.exp(&p, &v), Err(Error::BaseMismatch));
    assert!(matches!(
        m.point(vec![f64::NAN, 0.0]),
        Err(Error::NonFinite(_))
    ));
    assert!(matches!(
        m.point(vec![0.0]),
        Err(Error::DimensionMismatch { .. })
    ));

    let h = Manifold::hyperboloid(2);
    assert!(matches!(
        h.point(vec![2.0, 0.0, 0.0]),
        Err(Error::InvalidPoint(_))
    ));
    assert!(matches!(
        h.dist(&p, &h.origin()),
        Err(Error::ManifoldMismatch { .. })
    ));
    assert!(matches!(
        h.tangent(&h.origin(), vec![1.0, 0.0, 0.0]),
        Err(Error::InvalidTangent(_))
    ));

    let s = Manifold::spd(2);
    assert!(matches!(
        s.point(vec![1.0, 0.0, 0.0, -1.0]),
        Err(Error::InvalidPoint(_))
    ));
    assert!(matches!(
        s.point(vec![1.0, 0.5, 0.0, 1.0]),
        Err(Error::InvalidPoint(_))
    ));
    assert_eq!(Manifold::product(vec![]).unwrap_err(), Error::EmptyProduct);
}

#[test]
fn spd_eigenvalue_floor_is_an_error() {
    let s = Manifold::spd(2);
    let id = s.origin();
    let huge = s.tangent(&id, vec![-40.0, 0.0, 0.0, 1.0]).unwrap();
    // exp(-40) is representable; floor applies to later maps through it.
    let q = s.exp(&id, &huge).unwrap();
    let v = s.tangent(&q, vec![-1.0, 0.0, 0.0, 0.0]).unwrap();
    let r = s.exp(&q, &v.scaled(1e3));
    assert!(
        r.is_ok()
            || matches!(
                r,
                Err(Error::EigenvalueFloor { .. }) | Err(Error::NonFinite(_))
            )
    );
    let tiny = s
        .exp(&id, &s.tangent(&id, vec![-40.0, 0.0, 0.0, 0.0]).unwrap())
        .unwrap();
    assert!(matches!(
        s.log(&tiny, &id),
        Err(Error::EigenvalueFloor { .. })
    ));
}

#[test]
fn points_roundtrip_through_json() {
    let s = Manifold::spd(2);
    let p = s.point(vec![2.0, 0.5, 0.5, 1.0]).unwrap();
    let json = serde_json::to_string(&p).unwrap();
    assert_eq!(
        json,
        r#"{"manifold_id":"spd(2)","coords":[2.0,0.5,0.5,1.0]}"#
    );
    let back: ManifoldPoint = serde_json::from_str(&json).unwrap();
    assert_eq!(back, p);
}

#[test]
fn ids_parse_back() {
    for m in test_manifolds() {
        assert_eq!(Manifold::from_id(m.id()).unwrap(), m);
    }
    let nested = Manifold::product(vec![
        test_manifolds().pop().unwrap(),
        Manifold::euclidean(2),
    ])
    .unwrap();
    assert_eq!(
        Manifold::from_id(nested.id()).unwrap().coord_len(),
        nested.coord_len()
    );
    for bad in ["sphere(2)", "spd(x)", "product(spd(2)", "euclidean"] {
        assert!(Manifold::parse_id(bad).is_err(), "{bad}");
    }
}

fn manifold_strategy() -> impl Strategy<Value = Manifold> {
    prop_oneof![
        Just(Manifold::euclidean(5)),
        Just(Manifold::hyperboloid(4)),
        Just(Manifold::spd(3)),
        Just(
            Manifold::product(vec![
                Manifold::hyperboloid(2),
                Manifold::euclidean(1),
                Manifold::spd(2)
            ])
            .unwrap()
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_log_roundtrip_and_norms(m in manifold_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = m.sample_ball(&m.origin(), 2.5, &mut rng).unwrap();
        let q = m.sample_ball(&m.origin(), 2.5, &mut rng).unwrap();
        let v = m.log(&p, &q).unwrap();
        let back = m.exp(&p, &v).unwrap();
        prop_assert!(m.dist(&back, &q).unwrap() <= 1e-8);
        prop_assert!((m.norm(&v).unwrap() - m.dist(&p, &q).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn geodesic_distance_is_linear_in_time(m in manifold_strategy(), seed in any::<u64>(), t in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = m.sample_ball(&m.origin(), 1.0, &mut rng).unwrap();
        let u = m.random_unit_tangent(&p, &mut rng).unwrap();
        let q = m.exp(&p, &u.scaled(t)).unwrap();
        prop_assert!((m.dist(&p, &q).unwrap() - t).abs() <= 1e-8);
    }

    #[test]
    fn transport_is_an_invertible_isometry(m in manifold_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let q = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let u = m.random_tangent(&p, &mut rng).unwrap();
        let v = m.random_tangent(&p, &mut rng).unwrap();
        let tu = m.transport(&p, &q, &u).unwrap();
        let tv = m.transport(&p, &q, &v).unwrap();
        m.validate_tangent(&tu).unwrap();
        prop_assert!((m.inner(&q, &tu, &tv).unwrap() - m.inner(&p, &u, &v).unwrap()).abs() <= 1e-9);
        let back = m.transport(&q, &p, &tu).unwrap();
        prop_assert!(max_abs_diff(back.coords(), u.coords()) <= 1e-9 * (1.0 + m.norm(&u).unwrap()));
    }

    #[test]
    fn squared_distance_is_geodesically_convex(m in manifold_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let p0 = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let p1 = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        for t in [0.25, 0.5, 0.75] {
            let g = m.geodesic(&p0, &p1, t).unwrap();
            let lhs = m.dist_sq(&q, &g).unwrap();
            let rhs = (1.0 - t) * m.dist_sq(&q, &p0).unwrap() + t * m.dist_sq(&q, &p1).unwrap();
            prop_assert!(lhs <= rhs + 1e-9);
        }
    }

    #[test]
    fn distance_is_a_metric(m in manifold_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let b = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let c = m.sample_ball(&m.origin(), 2.0, &mut rng).unwrap();
        let (ab, ba) = (m.dist(&a, &b).unwrap(), m.dist(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-9);
        prop_assert!(ab <= m.dist(&a, &c).unwrap() + m.dist(&c, &b).unwrap() + 1e-9);
        prop_assert!(m.law_of_cosines_slack(&a, &b, &c).unwrap() >= -1e-9);
    }
}
