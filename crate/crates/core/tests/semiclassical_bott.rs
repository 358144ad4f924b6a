mod common;

use common::check_golden;
use stardeform::coeff::{Coefficient, GaussianRational};
use stardeform::fixture::{bott_projection, moyal_plane};
use stardeform::matrix::StarMatrix;
use stardeform::module::DeformedModule;
use stardeform::sample::Sampler;
use stardeform::semiclassical::{
    center_coefficient, connection_curvature, fibred_bracket, levi_civita, module_bracket, module_curvature, ConnectionData,
    PoissonData, VectorField,
};
use stardeform::series::FormalSeries;
use stardeform::star::StarAlgebra;

// First-order quantities only need the deformation to order one.
const N: usize = 1;

fn bott() -> (StarAlgebra, DeformedModule) {
    let alg = moyal_plane(N).unwrap();
    let p0 = bott_projection(&alg).unwrap();
    let dm = DeformedModule::fedosov(&alg, &p0).unwrap();
    (alg, dm)
}

fn constant_module() -> DeformedModule {
    let alg = moyal_plane(N).unwrap();
    let r = alg.ring();
    let p0 = StarMatrix::from_classical(2, 2, vec![r.int(1), r.int(0), r.int(0), r.int(0)], N).unwrap();
    DeformedModule::fedosov(&alg, &p0).unwrap()
}

fn section(dm: &DeformedModule, s: &mut Sampler) -> StarMatrix {
    dm.project(&s.matrix(dm.alg().ring(), N, 2, 1).classical_part()).unwrap()
}

fn times(x: &StarMatrix, g: &Coefficient) -> StarMatrix {
    x.map_entries(|e| e.mul_coefficient(g)).unwrap()
}

fn coords(alg: &StarAlgebra) -> (Coefficient, Coefficient) {
    (alg.ring().var(0).unwrap(), alg.ring().var(1).unwrap())
}

#[test]
fn module_bracket_is_first_order_action() {
    let (alg, dm) = bott();
    let mut s = Sampler::new(5);
    s.max_degree = 2;
    for _ in 0..4 {
        let x = section(&dm, &mut s);
        let a = s.coefficient(alg.ring());
        let r1 = dm.action(&x, &FormalSeries::constant(a.clone(), N)).unwrap().coefficient_matrix(1);
        // (2/i) R_1 = -2i R_1
        let expected = r1.scale(&(GaussianRational::i() * GaussianRational::from_int(-2)));
        assert_eq!(module_bracket(&dm, &x, &a).unwrap(), expected);
        assert!(module_bracket(&dm, &x, &alg.ring().one()).unwrap().is_zero());
    }
}

#[test]
fn leibniz_rules() {
    let (alg, dm) = bott();
    let pd = PoissonData::new(&alg);
    let mut s = Sampler::new(6);
    s.max_degree = 2;
    for _ in 0..4 {
        let x = section(&dm, &mut s);
        let f = s.coefficient(alg.ring());
        let g = s.coefficient(alg.ring());
        let lhs = module_bracket(&dm, &times(&x, &g), &f).unwrap();
        let rhs = times(&module_bracket(&dm, &x, &f).unwrap(), &g).try_add(&times(&x, &pd.bracket(&g, &f).unwrap())).unwrap();
        assert_eq!(lhs, rhs);
        let lhs = module_bracket(&dm, &x, &f.try_mul(&g).unwrap()).unwrap();
        let rhs = times(&module_bracket(&dm, &x, &f).unwrap(), &g).try_add(&times(&module_bracket(&dm, &x, &g).unwrap(), &f)).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn bracket_is_covariant_derivative_along_hamiltonian_fields() {
    let (alg, dm) = bott();
    let pd = PoissonData::new(&alg);
    let cd = ConnectionData::new(dm.p0()).unwrap();
    let (x, p) = coords(&alg);
    let mut s = Sampler::new(7);
    let sec = section(&dm, &mut s);
    for f in [x.clone(), p.clone(), x.try_mul(&p).unwrap()] {
        assert_eq!(levi_civita(&cd, &pd.hamiltonian(&f).unwrap(), &sec).unwrap(), module_bracket(&dm, &sec, &f).unwrap());
    }
    // Leibniz rule of the connection.
    let g = s.coefficient(alg.ring());
    let v = VectorField::new(vec![s.coefficient(alg.ring()), s.coefficient(alg.ring())]);
    let lhs = levi_civita(&cd, &v, &times(&sec, &g)).unwrap();
    let rhs = times(&levi_civita(&cd, &v, &sec).unwrap(), &g).try_add(&times(&sec, &v.apply(&g).unwrap())).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn bott_curvature() {
    let (alg, dm) = bott();
    let pd = PoissonData::new(&alg);
    let cd = ConnectionData::new(dm.p0()).unwrap();
    let (x, p) = coords(&alg);
    let e1 = dm.project(&StarMatrix::basis_column(alg.ring(), N, 2, 0)).unwrap();
    let r = module_curvature(&dm, &x, &p, &e1).unwrap();
    assert!(!r.is_zero());
    check_golden(&alg, &r, "bott_curvature_x_p.json");

    // Grassmann curvature P0 [X(P0), Y(P0)] as a third route.
    let (hx, hp) = (pd.hamiltonian(&x).unwrap(), pd.hamiltonian(&p).unwrap());
    let dp = |v: &VectorField| dm.p0().map_entries(|e| Ok(FormalSeries::constant(v.apply(e.classical_part())?, N))).unwrap();
    let (a, b) = (dp(&hx), dp(&hp));
    let comm = a.cauchy_mul(&b).unwrap().try_sub(&b.cauchy_mul(&a).unwrap()).unwrap();
    let grassmann = dm.p0().cauchy_mul(&comm).unwrap().cauchy_mul(&e1).unwrap();
    assert_eq!(connection_curvature(&cd, &hx, &hp, &e1).unwrap(), grassmann);

    let mut s = Sampler::new(8);
    s.max_degree = 2;
    let pairs = [(x.clone(), p.clone()), (x.try_mul(&x).unwrap(), p.clone()), (x.clone(), x.try_mul(&p).unwrap())];
    for (f, g) in pairs {
        let sec = section(&dm, &mut s);
        let re = module_curvature(&dm, &f, &g, &sec).unwrap();
        let (xf, xg) = (pd.hamiltonian(&f).unwrap(), pd.hamiltonian(&g).unwrap());
        assert_eq!(re, connection_curvature(&cd, &xg, &xf, &sec).unwrap());
        assert_eq!(re, connection_curvature(&cd, &xf, &xg, &sec).unwrap().neg());
        assert!(module_curvature(&dm, &f, &f, &sec).unwrap().is_zero());
        assert!(connection_curvature(&cd, &xf, &xf, &sec).unwrap().is_zero());
        // Right A-linearity.
        let h = s.coefficient(alg.ring());
        assert_eq!(module_curvature(&dm, &f, &g, &times(&sec, &h)).unwrap(), times(&re, &h));
    }
}

#[test]
fn constant_projection_is_flat() {
    let dm = constant_module();
    let alg = dm.alg().clone();
    let pd = PoissonData::new(&alg);
    let cd = ConnectionData::new(dm.p0()).unwrap();
    let (x, p) = coords(&alg);
    let mut s = Sampler::new(9);
    let sec = section(&dm, &mut s);
    assert!(module_curvature(&dm, &x, &p, &sec).unwrap().is_zero());
    let (hx, hp) = (pd.hamiltonian(&x).unwrap(), pd.hamiltonian(&p).unwrap());
    assert!(connection_curvature(&cd, &hx, &hp, &sec).unwrap().is_zero());
    // nabla is the plain directional derivative here.
    assert_eq!(levi_civita(&cd, &hx, &sec).unwrap(), cd.d(&sec, &hx).unwrap());
}

#[test]
fn fibred_bracket_on_bott() {
    let (alg, dm) = bott();
    let pd = PoissonData::new(&alg);
    let (x, p) = coords(&alg);
    let p0 = dm.p0().clone();
    let center = |f: &Coefficient| p0.map_entries(|e| e.mul_coefficient(f)).unwrap();
    let fb = fibred_bracket(&dm, &center(&x), &center(&p)).unwrap();
    assert!(fb.agrees().unwrap());
    assert_eq!(fb.direct, center(&pd.bracket(&x, &p).unwrap()));
    assert_eq!(fb.direct, p0);

    let mut s = Sampler::new(10);
    s.max_degree = 1;
    let sand = |m: &StarMatrix| p0.cauchy_mul(m).unwrap().cauchy_mul(&p0).unwrap();
    for _ in 0..2 {
        let l0 = sand(&s.classical_matrix(alg.ring(), N, 2, 2));
        let f = s.coefficient(alg.ring());
        let fb = fibred_bracket(&dm, &l0, &center(&f)).unwrap();
        assert!(fb.agrees().unwrap());
        assert!(fibred_bracket(&dm, &l0, &p0).unwrap().direct.is_zero());
        let g = s.coefficient(alg.ring());
        assert_eq!(fibred_bracket(&dm, &center(&f), &center(&g)).unwrap().direct, center(&pd.bracket(&f, &g).unwrap()));
    }
    let not_center = StarMatrix::identity(alg.ring(), N, 2);
    assert!(center_coefficient(&p0, &not_center).is_err());
}

#[test]
fn constant_projection_fibred_bracket() {
    let dm = constant_module();
    let alg = dm.alg().clone();
    let r = alg.ring();
    let (x, p) = coords(&alg);
    let l0 = StarMatrix::from_classical(2, 2, vec![x.try_mul(&x).unwrap(), r.int(0), r.int(0), r.int(0)], N).unwrap();
    let u = StarMatrix::from_classical(2, 2, vec![p.clone(), r.int(0), r.int(0), r.int(0)], N).unwrap();
    let fb = fibred_bracket(&dm, &l0, &u).unwrap();
    assert!(fb.agrees().unwrap());
    // {x^2, p} = 2x in the corner.
    let expected = StarMatrix::from_classical(2, 2, vec![x.scale(&GaussianRational::from_int(2)), r.int(0), r.int(0), r.int(0)], N).unwrap();
    assert_eq!(fb.direct, expected);
}
