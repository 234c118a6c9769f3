//! Writing a function in Rat as a tropical rational expression in the coordinates.

use troprat::gen;
use troprat::pwa::FacewiseAffine;
use troprat::synth::{synthesize, verify_synthesis};
use troprat::Caps;

fn show(f: &FacewiseAffine) {
    let caps = Caps::default();
    let r = synthesize(f, &caps).unwrap();
    println!("  λ = {}, {} hyperplanes", r.lambda, r.hyperplanes.len());
    println!("  expression: {}", r.expression);
    assert!(verify_synthesis(f, &r, &caps).unwrap().is_none());
}

pub fn run_example() {
    let mut rng = gen::rng(7);
    let mut k = 0;
    while k < 3 {
        let f = gen::random_rat_function(&mut rng, 2, 12);
        if f.complex().maximal_cells().len() < 3 {
            continue;
        }
        k += 1;
        println!("function {k} in R^{} on {} maximal cells", f.dim(), f.complex().maximal_cells().len());
        show(&f);
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
