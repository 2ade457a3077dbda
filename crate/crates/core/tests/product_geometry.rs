use hadamard_prox::apps::{problem_library, ProblemInstance};
use hadamard_prox::Manifold;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_manifold(m: &Manifold, samples: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o = m.origin();
    for _ in 0..samples {
        let p = m.sample_ball(&o, 2.0, &mut rng).unwrap();
        let q = m.sample_ball(&o, 2.0, &mut rng).unwrap();
        let r = m.sample_ball(&o, 2.0, &mut rng).unwrap();
        let v = m.log(&p, &q).unwrap();
        let back = m.exp(&p, &v).unwrap();
        assert!(m.dist(&back, &q).unwrap() <= 1e-9 * (1.0 + m.dist(&p, &q).unwrap()));
        let w = m.random_tangent(&p, &mut rng).unwrap();
        let tw = m.transport(&p, &q, &w).unwrap();
        let (a, b) = (m.norm(&w).unwrap(), m.norm(&tw).unwrap());
        assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        assert!(m.law_of_cosines_slack(&p, &q, &r).unwrap() >= -1e-9);
    }
}

#[test]
fn lifted_kkt_manifolds_inherit_geometry() {
    for name in ["nlp-toy-active", "nlp-equality", "nlp-spd-inactive"] {
        let inst = problem_library(name, &serde_json::Value::Null).unwrap();
        let ProblemInstance::Nlp(prob) = &inst.problem else {
            unreachable!()
        };
        check_manifold(&prob.lifted_manifold().unwrap(), 500, 17);
    }
}

#[test]
fn mixed_products() {
    let m = Manifold::product(vec![
        Manifold::hyperboloid(2),
        Manifold::spd(2),
        Manifold::euclidean(3),
    ])
    .unwrap();
    check_manifold(&m, 1000, 5);
    assert_eq!(Manifold::parse_id(m.id().as_str()).unwrap(), m);
}
