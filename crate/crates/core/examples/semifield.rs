//! Tropical arithmetic on Q ∪ {∞} and expressions in the coordinate functions.

use troprat::num::{rat, ratio};
use troprat::trop::{linearity_regions, parse_rational, trop_add, trop_mul, TropValue};
use troprat::Caps;

pub fn run_example() {
    let a = TropValue::Finite(ratio(3, 2));
    let b = TropValue::Finite(rat(-1));
    println!("{a} ⊕ {b} = {}", trop_add(&a, &b));
    println!("{a} ⊙ {b} = {}", trop_mul(&a, &b));
    println!("{a} ⊕ ∞ = {}", trop_add(&a, &TropValue::Infinity));

    let e = parse_rational("min(2*x1, 0) - min(x1, 0)", 1).unwrap();
    for x in [-3, 0, 5] {
        println!("  {e} at x1 = {x}: {}", e.eval(&[rat(x)]).unwrap());
    }
    assert_eq!(e.eval(&[rat(-3)]).unwrap(), TropValue::Finite(rat(-3)));

    let f = parse_rational("min(x1, x2, 1) - min(x1 + x2, 0)", 2).unwrap();
    let regions = linearity_regions(&f, 2, &Caps::default()).unwrap();
    println!("{f} has {} linearity regions:", regions.forms.len());
    for (i, form) in regions.forms.iter().enumerate() {
        if let Some(form) = form {
            println!("  region {i}: {form}");
        }
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
