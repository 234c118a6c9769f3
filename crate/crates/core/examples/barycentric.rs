//! Barycentric subdivision of an abstract complex with a ray, its integral embedding, and
//! the faithfulness certificate for its coordinate functions.

use troprat::bary::{
    barycentric_subdivision, coordinate_functions, embed_barycentric, faithfulness_check, lattice_preservation_check,
    Perturbation,
};
use troprat::complex::AbstractComplex;
use troprat::num::rat;
use troprat::Caps;

pub fn run_example() {
    let delta = AbstractComplex::from_facets(&["v1", "v2"], &["ρ"], &[vec!["v1", "v2", "ρ"]]).unwrap();
    let sub = barycentric_subdivision(&delta, &Caps::default()).unwrap();
    println!("vertices: {:?}", sub.complex().finite_labels());
    println!("rays: {:?}", sub.complex().ray_labels());
    println!("(bounded, unbounded) cells by dimension: {:?}", sub.f_vector());

    let emb = embed_barycentric(&sub, None).unwrap();
    println!("embedded in R^{} with coordinates {:?}", emb.target_dim(), emb.target_labels);
    let cert = lattice_preservation_check(&sub, &emb).unwrap();
    println!("{} cells, all unimodular: {}", cert.cells.len(), cert.cells.iter().all(|c| c.unimodular));

    let maps = coordinate_functions(&sub, &emb).unwrap();
    let faithful = faithfulness_check(&emb.domain, &maps).unwrap();
    println!("injective: {}, needed pairwise comparison: {}", faithful.injective, faithful.pairwise);

    let v = sub.vertex_named("p(v1,v2)").unwrap();
    let bad = embed_barycentric(&sub, Some(&Perturbation { vertex: v, factor: rat(2) })).unwrap();
    match lattice_preservation_check(&sub, &bad) {
        Ok(_) => println!("perturbation went unnoticed"),
        Err(e) => println!("doubling p(v1,v2) breaks the lattice on chain {:?}: {:?}", e.chain, e.failure),
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
