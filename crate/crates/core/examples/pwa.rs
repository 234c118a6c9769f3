//! Facewise affine functions: membership in Rat, convexity certificates and dominating
//! scales.

use troprat::complex::PolyhedralComplex;
use troprat::num::{int, rat};
use troprat::poly::Polyhedron;
use troprat::pwa::{convexity_check, dominating_scale, equal_on, rat_membership, FacewiseAffine, Func};
use troprat::trop::{parse_rational, AffineForm};
use troprat::Caps;

fn line_cells() -> PolyhedralComplex {
    PolyhedralComplex::new(
        1,
        vec![
            Polyhedron::new(1, vec![AffineForm::from_ints(&[-1], rat(1))], vec![]),
            Polyhedron::new(1, vec![AffineForm::from_ints(&[1], rat(-1))], vec![]),
        ],
        true,
    )
    .unwrap()
}

pub fn run_example() {
    // max(0, 2x − 2) on R.
    let c = line_cells();
    let f = FacewiseAffine::from_maximal(
        c.clone(),
        vec![AffineForm::from_ints(&[0], rat(0)), AffineForm::from_ints(&[2], rat(-2))],
    )
    .unwrap();
    println!("F(3) = {}", f.eval(&[rat(3)]).unwrap());
    println!("F in Rat: {}", rat_membership(&f).is_ok());
    let cert = convexity_check(&f, false).unwrap();
    println!("F is convex, {} supporting forms", cert.cells.len());

    // Two parallel half-lines with slopes 1 and 2.
    let rays = PolyhedralComplex::new(
        2,
        vec![
            Polyhedron::new(2, vec![AffineForm::from_ints(&[1, 0], rat(0))], vec![AffineForm::from_ints(&[0, 1], rat(0))]),
            Polyhedron::new(2, vec![AffineForm::from_ints(&[1, 0], rat(0))], vec![AffineForm::from_ints(&[0, 1], rat(-1))]),
        ],
        true,
    )
    .unwrap();
    let g = FacewiseAffine::from_maximal(
        rays,
        vec![AffineForm::from_ints(&[1, 0], rat(0)), AffineForm::from_ints(&[2, 0], rat(0))],
    )
    .unwrap();
    println!("two rays: {}", rat_membership(&g).unwrap_err());

    // N·x − 5x > 0 on (0, ∞) first holds for N = 6.
    let half = Polyhedron::new(1, vec![AffineForm::from_ints(&[1], rat(0))], vec![]);
    let x = FacewiseAffine::affine(PolyhedralComplex::new(1, vec![half.clone()], true).unwrap(), AffineForm::var(1, 0)).unwrap();
    let origin = Polyhedron::point(&[rat(0)]);
    let d = dominating_scale(&x, &AffineForm::from_ints(&[5], rat(0)), &origin, &half).unwrap();
    println!("dominating scale N = {}", d.n);
    assert_eq!(d.n, int(6));

    // min(2x, 0) − min(x, 0) = min(x, 0) on R.
    let whole = PolyhedralComplex::new(1, vec![Polyhedron::universe(1)], true).unwrap();
    let lhs = parse_rational("min(2*x1, 0) - min(x1, 0)", 1).unwrap();
    let rhs = parse_rational("min(x1, 0)", 1).unwrap();
    println!("equal on R: {}", equal_on(&whole, Func::Expr(&lhs), Func::Expr(&rhs), &Caps::default()).unwrap().is_equal());
}

#[allow(dead_code)]
fn main() {
    run_example();
}
