//! SVG drawings of a function on the unit square and of a barycentric subdivision.

use troprat::bary::barycentric_subdivision;
use troprat::complex::{AbstractComplex, PolyhedralComplex};
use troprat::num::rat;
use troprat::plot::render_svg;
use troprat::poly::Polyhedron;
use troprat::pwa::FacewiseAffine;
use troprat::trop::AffineForm;
use troprat::Caps;

pub fn run_example() {
    let x = AffineForm::var(2, 0);
    let y = AffineForm::var(2, 1);
    let one = AffineForm::constant(2, rat(1));
    let square = Polyhedron::new(2, vec![x.clone(), y.clone(), one.sub(&x), one.sub(&y)], vec![]);
    let c = PolyhedralComplex::new(2, vec![square], true).unwrap();
    let f = FacewiseAffine::affine(c.clone(), AffineForm::from_ints(&[2, -1], rat(3))).unwrap();
    let svg = render_svg(&c, Some(&f), None).unwrap();
    println!("square: {} bytes of SVG", svg.len());

    let delta = AbstractComplex::from_facets(&["v1", "v2"], &["ρ"], &[vec!["v1", "v2", "ρ"]]).unwrap();
    let sub = barycentric_subdivision(&delta, &Caps::default()).unwrap();
    let svg = render_svg(&sub.realize().unwrap(), None, None).unwrap();
    println!("subdivision: {} polygons, {} segments", svg.matches("<polygon").count(), svg.matches("<line").count());
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, svg).unwrap();
        println!("wrote {path}");
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
