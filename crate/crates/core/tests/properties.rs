//! Randomised invariants. Elements come either from proptest strategies or
//! from the seeded sampler with a proptest-chosen seed.

use std::sync::OnceLock;

use num_rational::BigRational;
use proptest::prelude::*;

use stardeform::coeff::{CoeffKind, CoeffRing, Coefficient, GaussianRational, Monomial, Poly};
use stardeform::fixture::{bott_projection, moyal_plane};
use stardeform::matrix::{hermitian_factorization, mat_series_inverse, MatrixAlgebra, StarMatrix};
use stardeform::module::DeformedModule;
use stardeform::morita::theta_adjointability;
use stardeform::sample::Sampler;
use stardeform::semiclassical::PoissonData;
use stardeform::series::FormalSeries;
use stardeform::star::{standard_theta, star_inverse, DiffOperator, EquivalenceTransform, StarAlgebra};

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, 1i64..=4, -3i64..=3).prop_map(|(p, q, im)| {
        GaussianRational::new(BigRational::new(p.into(), q.into()), BigRational::from_integer(im.into()))
    })
}

fn poly(nvars: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u16..=2, nvars), gaussian()), 0..4)
        .prop_map(move |terms| Poly::from_terms(nvars, terms.into_iter().map(|(e, c)| (Monomial::from_slice(&e), c))))
}

/// Polynomials or quotients by a nowhere-vanishing real denominator.
fn coefficient() -> impl Strategy<Value = Coefficient> {
    let ring = CoeffRing::rational(2);
    (poly(2), 0u16..=2, 1i64..=3).prop_map(move |(p, k, a)| {
        let num = ring.from_poly(p);
        if k == 0 {
            return num;
        }
        let d = ring.var(0).unwrap().pow(2 * k as u32).try_add(&ring.int(a)).unwrap();
        num.try_mul(&d.invert().unwrap()).unwrap()
    })
}

fn eq(a: &Coefficient, b: &Coefficient) -> bool {
    a.try_eq(b).unwrap()
}

fn moyal(order: usize) -> StarAlgebra {
    StarAlgebra::moyal(1, &standard_theta(1), CoeffKind::Polynomial, order).unwrap()
}

fn sampler(seed: u64) -> Sampler {
    let mut s = Sampler::new(seed);
    s.max_degree = 2;
    s.max_terms = 2;
    s
}

fn bott() -> &'static DeformedModule {
    static MODULE: OnceLock<DeformedModule> = OnceLock::new();
    MODULE.get_or_init(|| {
        let alg = moyal_plane(2).unwrap();
        let p0 = bott_projection(&alg).unwrap();
        DeformedModule::fedosov(&alg, &p0).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gaussian_field_laws(a in gaussian(), b in gaussian(), c in gaussian()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn coefficient_ring_laws(a in coefficient(), b in coefficient(), c in coefficient()) {
        let ab = a.try_mul(&b).unwrap();
        prop_assert!(eq(&ab, &b.try_mul(&a).unwrap()));
        prop_assert!(eq(&ab.try_mul(&c).unwrap(), &a.try_mul(&b.try_mul(&c).unwrap()).unwrap()));
        let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
        prop_assert!(eq(&lhs, &ab.try_add(&a.try_mul(&c).unwrap()).unwrap()));
        prop_assert!(a.try_sub(&a).unwrap().is_zero());
        prop_assert!(eq(&ab.conj(), &a.conj().try_mul(&b.conj()).unwrap()));
        prop_assert!(eq(&a.conj().conj(), &a));
    }

    #[test]
    fn inverse_of_nonzero_coefficient(a in coefficient()) {
        prop_assume!(!a.is_zero());
        prop_assert!(a.try_mul(&a.invert().unwrap()).unwrap().is_one());
    }

    #[test]
    fn derivative_is_a_derivation(a in coefficient(), b in coefficient(), k in 0usize..2) {
        let lhs = a.try_mul(&b).unwrap().derivative(k).unwrap();
        let rhs = a.derivative(k).unwrap().try_mul(&b).unwrap().try_add(&a.try_mul(&b.derivative(k).unwrap()).unwrap()).unwrap();
        prop_assert!(eq(&lhs, &rhs));
    }

    #[test]
    fn evaluation_is_multiplicative(a in coefficient(), b in coefficient(), x in -3i64..=3, y in -3i64..=3) {
        let pt = [BigRational::from_integer(x.into()), BigRational::from_integer(y.into())];
        let ab = a.try_mul(&b).unwrap().evaluate_at(&pt).unwrap();
        prop_assert_eq!(ab, &a.evaluate_at(&pt).unwrap() * &b.evaluate_at(&pt).unwrap());
    }

    #[test]
    fn cauchy_product_is_associative(seed in any::<u64>()) {
        let ring = CoeffRing::polynomial(2);
        let mut s = sampler(seed);
        let (f, g, h) = (s.series(ring, 4), s.series(ring, 4), s.series(ring, 4));
        let lhs = f.try_cauchy_mul(&g).unwrap().try_cauchy_mul(&h).unwrap();
        let rhs = f.try_cauchy_mul(&g.try_cauchy_mul(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs.first_difference(&rhs).unwrap(), None);
        let t = f.try_cauchy_mul(&g).unwrap().truncate(2).unwrap();
        let t2 = f.truncate(2).unwrap().try_cauchy_mul(&g.truncate(2).unwrap()).unwrap();
        prop_assert_eq!(t.first_difference(&t2).unwrap(), None);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moyal_product_is_associative_and_hermitian(seed in any::<u64>()) {
        let alg = moyal(3);
        let mut s = sampler(seed);
        let (f, g, h) = (s.series(alg.ring(), 3), s.series(alg.ring(), 3), s.series(alg.ring(), 3));
        let lhs = alg.star_mul(&alg.star_mul(&f, &g).unwrap(), &h).unwrap();
        let rhs = alg.star_mul(&f, &alg.star_mul(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(lhs.first_difference(&rhs).unwrap(), None);
        let adj = alg.star_mul(&f, &g).unwrap().conj();
        prop_assert_eq!(adj.first_difference(&alg.star_mul(&g.conj(), &f.conj()).unwrap()).unwrap(), None);
        let one = alg.one();
        prop_assert_eq!(alg.star_mul(&one, &f).unwrap().first_difference(&f).unwrap(), None);
        prop_assert_eq!(alg.star_mul(&f, &one).unwrap().first_difference(&f).unwrap(), None);
    }

    #[test]
    fn star_inverse_inverts(seed in any::<u64>()) {
        let alg = moyal_plane(3).unwrap();
        let mut s = sampler(seed);
        let mut f = s.series(alg.ring(), 3);
        f.set_coeff(0, f.classical_part().try_mul(f.classical_part()).unwrap().try_add(&alg.ring().int(1)).unwrap());
        prop_assume!(!f.classical_part().is_zero());
        let g = star_inverse(&alg, &f).unwrap();
        prop_assert!(alg.star_mul(&f, &g).unwrap().try_eq(&alg.one()).unwrap());
        prop_assert!(alg.star_mul(&g, &f).unwrap().try_eq(&alg.one()).unwrap());
    }

    #[test]
    fn poisson_bracket_is_a_lie_bracket(seed in any::<u64>()) {
        let alg = moyal(1);
        let pd = PoissonData::new(&alg);
        let mut s = sampler(seed);
        let (f, g, h) = (s.coefficient(alg.ring()), s.coefficient(alg.ring()), s.coefficient(alg.ring()));
        let br = |a: &Coefficient, b: &Coefficient| pd.bracket(a, b).unwrap();
        prop_assert!(br(&f, &g).try_add(&br(&g, &f)).unwrap().is_zero());
        let jacobi = br(&f, &br(&g, &h)).try_add(&br(&g, &br(&h, &f))).unwrap().try_add(&br(&h, &br(&f, &g))).unwrap();
        prop_assert!(jacobi.is_zero());
        let leibniz = br(&f, &g.try_mul(&h).unwrap()).try_sub(&br(&f, &g).try_mul(&h).unwrap()).unwrap();
        prop_assert!(eq(&leibniz, &g.try_mul(&br(&f, &h)).unwrap()));
    }

    #[test]
    fn first_cochain_antisymmetrizes_to_bracket(seed in any::<u64>()) {
        let alg = moyal(1);
        let pd = PoissonData::new(&alg);
        let mut s = sampler(seed);
        let (f, g) = (s.coefficient(alg.ring()), s.coefficient(alg.ring()));
        let c1 = alg.apply_cochain(1, &f, &g).unwrap().try_sub(&alg.apply_cochain(1, &g, &f).unwrap()).unwrap();
        // C_1(f,g) - C_1(g,f) = i {f,g}
        prop_assert!(eq(&c1, &pd.bracket(&f, &g).unwrap().scale(&GaussianRational::i())));
    }

    #[test]
    fn equivalence_transform_round_trips(seed in any::<u64>()) {
        let ring = CoeffRing::polynomial(2);
        let mut s = sampler(seed);
        let shift = DiffOperator::new([(s.coefficient(ring), Monomial::var(0))]).unwrap();
        let t = EquivalenceTransform::new(ring, 3, vec![DiffOperator::laplacian(ring), shift]);
        let f = s.series(ring, 3);
        let back = t.apply_inverse(&t.apply(&f).unwrap()).unwrap();
        prop_assert_eq!(back.first_difference(&f).unwrap(), None);
    }

    #[test]
    fn matrix_inverse_round_trips(seed in any::<u64>(), n in 1usize..=2) {
        let alg = moyal_plane(2).unwrap();
        let mut s = sampler(seed);
        let a = s.hermitian_near_identity(alg.ring(), 2, n);
        let b = mat_series_inverse(&alg, &a).unwrap();
        prop_assert_eq!(alg.mul(&a, &b).unwrap().first_difference(&alg.unit(n)).unwrap(), None);
    }

    #[test]
    fn factorization_reproduces_input(seed in any::<u64>(), n in 1usize..=2) {
        let alg = moyal_plane(2).unwrap();
        let mut s = sampler(seed);
        let sm = s.hermitian_near_identity(alg.ring(), 2, n);
        let l = hermitian_factorization(&alg, &sm, &alg.unit(n)).unwrap();
        prop_assert_eq!(alg.mul(&l.adjoint(), &l).unwrap().first_difference(&sm).unwrap(), None);
        prop_assert!(l.classical_part().try_eq(&alg.unit(n)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn bott_module_invariants(seed in any::<u64>()) {
        let dm = bott();
        let alg = dm.alg();
        let mut s = sampler(seed);
        s.max_degree = 1;
        let mut element = || dm.project(&s.matrix(alg.ring(), 2, 2, 1)).unwrap();
        let (x, y, z, w) = (element(), element(), element(), element());
        prop_assert_eq!(dm.project(&x).unwrap().first_difference(&x).unwrap(), None);
        let hxy = dm.metric(&x, &y).unwrap();
        let hyx: FormalSeries = dm.metric(&y, &x).unwrap();
        prop_assert_eq!(hyx.conj().first_difference(&hxy).unwrap(), None);
        prop_assert!(theta_adjointability(dm, &x, &y, &z, &w).unwrap().passed());
        let unit: &StarMatrix = dm.endo_unit().unwrap();
        prop_assert_eq!(dm.endo_apply(unit, &x).unwrap().first_difference(&x).unwrap(), None);
    }
}
