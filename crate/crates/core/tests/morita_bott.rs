use stardeform::fixture::{bott_projection, moyal_plane};
use stardeform::matrix::StarMatrix;
use stardeform::module::DeformedModule;
use stardeform::morita::{
    canonical_inner, deform_full_witness, theta_adjointability, verify_nice_identities, verify_strongly_full,
    verify_strongly_full_classical, ClassicalModule, FullnessWitness, InnerProductModule,
};
use stardeform::sample::Sampler;
use stardeform::series::FormalSeries;

const N: usize = 3;

fn bott() -> DeformedModule {
    let alg = moyal_plane(N).unwrap();
    let p0 = bott_projection(&alg).unwrap();
    DeformedModule::fedosov(&alg, &p0).unwrap()
}

fn element(dm: &DeformedModule, s: &mut Sampler) -> StarMatrix {
    dm.project(&s.matrix(dm.alg().ring(), N, 2, 1)).unwrap()
}

#[test]
fn classical_identities() {
    let dm = bott();
    let alg = dm.alg();
    let one = alg.ring().one();
    assert!(verify_strongly_full_classical(dm.p0(), &one).unwrap().passed());
    let cm = ClassicalModule::new(dm.p0());
    let mut s = Sampler::new(21);
    s.max_degree = 2;
    for _ in 0..3 {
        let x = element(&dm, &mut s).classical_part();
        let y = element(&dm, &mut s).classical_part();
        let reports = verify_nice_identities(&cm, &FormalSeries::one(alg.ring(), N), &x, &y).unwrap();
        assert!(reports.iter().all(|r| r.passed()), "{reports:?}");
    }
}

#[test]
fn deformed_identities() {
    let dm = bott();
    let alg = dm.alg();
    let w = deform_full_witness(&dm, &alg.ring().one()).unwrap();
    assert!(verify_strongly_full(alg, dm.p(), &w).unwrap().passed());
    assert!(w.tau.classical_part().is_one());
    let mut s = Sampler::new(22);
    s.max_degree = 2;
    s.max_terms = 2;
    let x = element(&dm, &mut s);
    let y = element(&dm, &mut s);
    let reports = verify_nice_identities(&dm, &w.tau, &x, &y).unwrap();
    assert!(reports.iter().all(|r| r.passed()), "{reports:?}");
    // Str(P) = 1 + 2/(1 + x^2 + p^2)^2 l + O(l^3), so the undeformed witness fails.
    let naive = FullnessWitness::new(alg.one()).unwrap();
    let report = verify_strongly_full(alg, dm.p(), &naive).unwrap();
    assert_eq!(report.first_failing_order(), Some(1));
}

#[test]
fn theta_operators_are_adjointable() {
    let dm = bott();
    let mut s = Sampler::new(23);
    s.max_degree = 1;
    s.max_terms = 2;
    let v: Vec<StarMatrix> = (0..4).map(|_| element(&dm, &mut s)).collect();
    assert!(theta_adjointability(&dm, &v[0], &v[1], &v[2], &v[3]).unwrap().passed());
    assert!(theta_adjointability(&dm, &v[0], &v[0], &v[2], &v[3]).unwrap().passed());
    let zero = StarMatrix::zero(dm.alg().ring(), N, 2, 1);
    let lhs = dm.inner(&dm.theta(&v[0], &v[1], &zero).unwrap(), &v[3]).unwrap();
    assert!(lhs.is_zero());
}

#[test]
fn canonical_inner_product_laws() {
    let dm = bott();
    let alg = dm.alg();
    let mut s = Sampler::new(24);
    let x = s.matrix(alg.ring(), N, 2, 1);
    let y = s.matrix(alg.ring(), N, 2, 1);
    let a = s.series(alg.ring(), N);
    let ya = y.map_entries(|e| alg.star_mul(e, &a)).unwrap();
    assert_eq!(canonical_inner(alg, &x, &ya).unwrap(), alg.star_mul(&canonical_inner(alg, &x, &y).unwrap(), &a).unwrap());
    assert_eq!(canonical_inner(alg, &x, &y).unwrap().conj(), canonical_inner(alg, &y, &x).unwrap());
}

#[test]
fn rank_two_projection_is_not_full_with_unit_witness() {
    let alg = moyal_plane(N).unwrap();
    let r = alg.ring();
    let id = StarMatrix::from_classical(2, 2, vec![r.int(1), r.int(0), r.int(0), r.int(1)], N).unwrap();
    let report = verify_strongly_full_classical(&id, &r.one()).unwrap();
    assert!(!report.passed());
    assert_eq!(report.failures[0].message.as_deref(), Some("residual 1"));
}
