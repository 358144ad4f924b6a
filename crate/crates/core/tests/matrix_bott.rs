mod common;

use common::check_golden;
use stardeform::fixture::{bott_projection, moyal_plane};
use stardeform::matrix::{
    deform_projection_fedosov, deform_projection_recursive, idempotent_intertwiner, mat_series_inverse, projection_defect,
    MatrixAlgebra, StarMatrix,
};
use stardeform::star::StarAlgebra;

fn bott(order: usize) -> (StarAlgebra, StarMatrix) {
    let alg = moyal_plane(order).unwrap();
    let p0 = bott_projection(&alg).unwrap();
    (alg, p0)
}

#[test]
fn bott_projection_deformations() {
    let (alg, p0) = bott(3);
    assert!(p0.trace().unwrap().is_one());
    let b = projection_defect(&alg, &p0).unwrap();
    assert!(alg.mul(&b, &p0).unwrap().try_eq(&alg.mul(&p0, &b).unwrap()).unwrap());

    let p = deform_projection_fedosov(&alg, &p0, true).unwrap();
    assert_eq!(alg.mul(&p, &p).unwrap().first_difference(&p).unwrap(), None);
    assert!(p.is_hermitian().unwrap());
    assert!(p.classical_part().try_eq(&p0).unwrap());

    let q = deform_projection_recursive(&alg, &p0).unwrap();
    assert_eq!(alg.mul(&q, &q).unwrap().first_difference(&q).unwrap(), None);
    assert!(q.is_hermitian().unwrap());

    let u = idempotent_intertwiner(&alg, &p, &q).unwrap();
    assert!(u.classical_part().try_eq(&alg.unit(2)).unwrap());
    assert_eq!(alg.mul(&u, &p).unwrap().first_difference(&alg.mul(&q, &u).unwrap()).unwrap(), None);
    let v = mat_series_inverse(&alg, &u).unwrap();
    assert!(alg.mul(&u, &v).unwrap().try_eq(&alg.unit(2)).unwrap());
    assert!(alg.mul(&v, &u).unwrap().try_eq(&alg.unit(2)).unwrap());
    check_golden(&alg, &p, "bott_fedosov_n3.json");
    check_golden(&alg, &q, "bott_recursive_n3.json");
}
