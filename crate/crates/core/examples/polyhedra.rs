//! Exact polyhedra: H- and V-representations, recession cones, and lattices.

use troprat::num::{int, rat};
use troprat::poly::{is_unimodular, Lattice, Polyhedron};
use troprat::trop::AffineForm;

pub fn run_example() {
    // The region x ≥ 0, y ≥ 0, x + y ≥ 1.
    let p = Polyhedron::new(
        2,
        vec![
            AffineForm::from_ints(&[1, 0], rat(0)),
            AffineForm::from_ints(&[0, 1], rat(0)),
            AffineForm::from_ints(&[1, 1], rat(-1)),
        ],
        vec![],
    );
    let v = p.vrep().unwrap();
    println!("vertices: {:?}", v.vertices.iter().map(|x| x.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
    println!("rays: {:?}", v.rays);
    assert_eq!(v.vertices.len(), 2);
    assert_eq!(v.rays.len(), 2);

    let cone = p.recession_cone();
    println!("recession cone is bounded: {}, dimension {:?}", cone.is_bounded(), cone.affine_dim());

    let square = Polyhedron::from_generators(
        2,
        vec![vec![rat(0), rat(0)], vec![rat(2), rat(0)], vec![rat(0), rat(2)], vec![rat(2), rat(2)]],
        vec![],
        vec![],
    );
    let x = p.intersect(&square);
    println!("intersection with [0,2]^2 has {} vertices", x.vrep().unwrap().vertices.len());

    let l = Lattice::from_generators(2, &[vec![int(2), int(0)], vec![int(1), int(1)]]);
    let z2 = Lattice::from_generators(2, &[vec![int(1), int(0)], vec![int(0), int(1)]]);
    println!("lattice rank {}, contains (1,-1): {}", l.rank(), l.contains(&[int(1), int(-1)]));
    let shear = vec![vec![int(1), int(1)], vec![int(0), int(1)]];
    println!("shear is unimodular on Z^2: {}", is_unimodular(&shear, &z2, &z2).unwrap());
    let double = vec![vec![int(2), int(0)], vec![int(0), int(1)]];
    println!("diag(2,1) is unimodular on Z^2: {}", is_unimodular(&double, &z2, &z2).unwrap());
}

#[allow(dead_code)]
fn main() {
    run_example();
}
