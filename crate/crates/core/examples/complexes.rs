//! Polyhedral complexes: validation, refinement, recession fans, parallel classes, and
//! arrangement completion.

use troprat::complex::{arrangement_completion, AbstractComplex, PolyhedralComplex};
use troprat::num::rat;
use troprat::poly::Polyhedron;
use troprat::trop::AffineForm;
use troprat::Caps;

fn half_plane(m: &[i64], c: i64) -> Polyhedron {
    Polyhedron::new(2, vec![AffineForm::from_ints(m, rat(c))], vec![])
}

pub fn run_example() {
    // Two quadrants sharing the positive x-axis.
    let sigma = PolyhedralComplex::new(
        2,
        vec![
            half_plane(&[1, 0], 0).intersect(&half_plane(&[0, 1], 0)),
            half_plane(&[1, 0], 0).intersect(&half_plane(&[0, -1], 0)),
        ],
        true,
    )
    .unwrap();
    println!("f-vector {:?}", sigma.f_vector());

    let bad = PolyhedralComplex::new(2, vec![half_plane(&[1, 0], 0), half_plane(&[0, 1], 0)], true);
    println!("overlapping half-planes: {}", bad.unwrap_err());

    let fan = sigma.recession_fan().unwrap();
    println!("recession fan has {} cells", fan.len());
    for (dir, cells) in sigma.parallel_classes() {
        println!("  direction {dir:?} is shared by maximal cells {cells:?}");
    }

    let refined = sigma.refine_by(&[AffineForm::from_ints(&[1, 0], rat(-1))]);
    println!("refined by x = 1: f-vector {:?}", refined.f_vector());

    let (arr, beta) = arrangement_completion(&sigma, &Caps::default()).unwrap();
    println!("arrangement of {} hyperplanes, Σ_β has {} maximal cells", arr.hyperplanes.len(), beta.maximal_cells().len());

    let tri = AbstractComplex::from_facets(&["a", "b"], &["r"], &[vec!["a", "b", "r"]]).unwrap();
    let real = tri.realize().unwrap();
    println!("abstract complex with {} elements realizes in R^{} with f-vector {:?}", tri.len(), real.dim(), real.f_vector());
}

#[allow(dead_code)]
fn main() {
    run_example();
}
