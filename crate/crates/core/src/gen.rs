//! Seeded random inputs: abstract complexes, complexes from arrangements, and functions on
//! them with and without the Rat property.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{AbstractComplex, Arrangement, PolyhedralComplex};
use crate::num::{int, rat, ratio, Int, Rat};
use crate::poly::Polyhedron;
use crate::pwa::FacewiseAffine;
use crate::trop::AffineForm;
use crate::Caps;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `a/b` with `|a| ≤ num` and `1 ≤ b ≤ den`.
pub fn random_rat(rng: &mut impl Rng, num: i64, den: i64) -> Rat {
    ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn random_slope(rng: &mut impl Rng, n: usize, bound: i64) -> Vec<Int> {
    (0..n).map(|_| int(rng.gen_range(-bound..=bound))).collect()
}

/// Bounds for [`random_abstract_complex`].
#[derive(Clone, Debug)]
pub struct AbstractParams {
    pub max_vertices: usize,
    pub max_rays: usize,
    pub max_elements: usize,
    /// Require at least one ray.
    pub with_ray: bool,
}

impl Default for AbstractParams {
    fn default() -> Self {
        AbstractParams { max_vertices: 4, max_rays: 3, max_elements: 40, with_ray: false }
    }
}

/// The downward closure of random simplices on vertices `v1, …` and rays `r1, …`. Every
/// ray lies in a simplex with a finite vertex.
pub fn random_abstract_complex(rng: &mut impl Rng, p: &AbstractParams) -> AbstractComplex {
    loop {
        let nv = rng.gen_range(1..=p.max_vertices.max(1));
        let lo = usize::from(p.with_ray);
        let nr = rng.gen_range(lo..=p.max_rays.max(lo));
        let vs: Vec<String> = (1..=nv).map(|i| format!("v{i}")).collect();
        let rs: Vec<String> = (1..=nr).map(|i| format!("r{i}")).collect();
        let mut facets: Vec<Vec<String>> = Vec::new();
        let mut covered: BTreeSet<String> = BTreeSet::new();
        let k = rng.gen_range(1..=3);
        for _ in 0..k {
            facets.push(random_facet(rng, &vs, &rs));
        }
        for r in &rs {
            if !facets.iter().any(|f| f.contains(r)) {
                let mut f = vec![vs.choose(rng).unwrap().clone(), r.clone()];
                f.sort();
                facets.push(f);
            }
        }
        for f in &facets {
            covered.extend(f.iter().cloned());
        }
        let mut size: BTreeSet<Vec<&String>> = BTreeSet::new();
        for f in &facets {
            for mask in 0u32..(1 << f.len()) {
                size.insert(f.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, x)| x).collect());
            }
        }
        if size.len() + (nv + nr - covered.len().min(nv + nr)) > p.max_elements {
            continue;
        }
        let vr: Vec<&str> = vs.iter().map(|s| s.as_str()).collect();
        let rr: Vec<&str> = rs.iter().map(|s| s.as_str()).collect();
        let fr: Vec<Vec<&str>> = facets.iter().map(|f| f.iter().map(|s| s.as_str()).collect()).collect();
        return AbstractComplex::from_facets(&vr, &rr, &fr).expect("facets use known labels");
    }
}

fn random_facet(rng: &mut impl Rng, vs: &[String], rs: &[String]) -> Vec<String> {
    let mut f: Vec<String> = Vec::new();
    let a = rng.gen_range(1..=vs.len());
    f.extend(vs.choose_multiple(rng, a).cloned());
    if !rs.is_empty() {
        let b = rng.gen_range(0..=rs.len());
        f.extend(rs.choose_multiple(rng, b).cloned());
    }
    f.sort();
    f
}

/// A random hyperplane `⟨m, u⟩ + c` with small integer normal and rational offset.
pub fn random_hyperplane(rng: &mut impl Rng, n: usize) -> AffineForm {
    loop {
        let m = random_slope(rng, n, 2);
        if m.iter().any(|x| x != &Int::from(0)) {
            return AffineForm::new(m, random_rat(rng, 3, 2));
        }
    }
}

/// A random arrangement complex in `R^n` with at most `max_cells` maximal cells.
pub fn random_arrangement(rng: &mut impl Rng, n: usize, max_cells: usize) -> Arrangement {
    loop {
        let k = rng.gen_range(0..=(n + 2).min(4));
        let hs: Vec<AffineForm> = (0..k).map(|_| random_hyperplane(rng, n)).collect();
        let arr = Arrangement::new(n, &hs, &Caps::default()).expect("small arrangement");
        if arr.complex.maximal_cells().len() <= max_cells {
            return arr;
        }
    }
}

/// The subcomplex generated by a nonempty random subset of the maximal cells.
pub fn random_subcomplex(rng: &mut impl Rng, c: &PolyhedralComplex) -> PolyhedralComplex {
    let maximal = c.maximal_cells();
    let k = rng.gen_range(1..=maximal.len());
    let chosen: Vec<usize> = maximal.choose_multiple(rng, k).copied().collect();
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    for i in chosen {
        keep.extend(c.faces_of(i).iter().copied());
    }
    c.subcomplex(&keep.into_iter().collect::<Vec<_>>())
}

/// A random complex in `R^n` (`n ≤ 3`) with at most `max_cells` maximal cells, cut out of
/// an arrangement, with the arrangement's hyperplanes.
pub fn random_complex(rng: &mut impl Rng, n: usize, max_cells: usize) -> (PolyhedralComplex, Vec<AffineForm>) {
    let arr = random_arrangement(rng, n, max_cells);
    (random_subcomplex(rng, &arr.complex), arr.hyperplanes)
}

/// `Σ c_j |ℓ_j| + a` on `complex` with integer `c_j`; when `convex` all `c_j ≥ 0`.
pub fn abs_combination(
    rng: &mut impl Rng,
    complex: &PolyhedralComplex,
    hyperplanes: &[AffineForm],
    slope_bound: i64,
    convex: Option<bool>,
) -> Option<FacewiseAffine> {
    let n = complex.dim();
    let cs: Vec<Int> = hyperplanes
        .iter()
        .map(|_| match convex {
            Some(true) => int(rng.gen_range(0..=2)),
            _ => int(rng.gen_range(-2..=2)),
        })
        .collect();
    let affine = AffineForm::new(random_slope(rng, n, 2), random_rat(rng, 5, 3));
    let forms: Vec<AffineForm> = complex
        .maximal_cells()
        .iter()
        .map(|&i| {
            let u = crate::complex::relint_point(complex.cell(i));
            let mut f = affine.clone();
            for (h, c) in hyperplanes.iter().zip(&cs) {
                let s = if h.eval(&u) >= rat(0) { c.clone() } else { -c.clone() };
                f = f.add(&h.scale(&s));
            }
            f
        })
        .collect();
    if forms.iter().any(|f| f.slope.iter().any(|x| x > &int(slope_bound) || x < &int(-slope_bound))) {
        return None;
    }
    FacewiseAffine::from_maximal(complex.clone(), forms).ok()
}

/// A random member of `Rat(Σ)` on a random complex (`n` in `1..=max_dim`), with slopes in
/// `[−5, 5]`.
pub fn random_rat_function(rng: &mut impl Rng, max_dim: usize, max_cells: usize) -> FacewiseAffine {
    loop {
        let n = rng.gen_range(1..=max_dim);
        let (c, hs) = random_complex(rng, n, max_cells);
        if let Some(f) = abs_combination(rng, &c, &hs, 5, None) {
            return f;
        }
    }
}

/// Parallel translates of one cone, placed in distinct parallel affine subspaces so that
/// they are pairwise disjoint, each carrying its own affine form. When `agree` the forms
/// share their slope, so the function lies in Rat; otherwise slopes are random.
pub fn parallel_translates(rng: &mut impl Rng, agree: bool) -> FacewiseAffine {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..n);
    let rays: Vec<Vec<Int>> = loop {
        let rs: Vec<Vec<Int>> = (0..k).map(|_| random_slope(rng, n - 1, 2)).collect();
        let rows: Vec<Vec<Rat>> = rs.iter().map(|r| crate::num::to_rats(r)).collect();
        if crate::num::rank(&rows) == k {
            break rs.into_iter().map(|mut r| {
                r.push(int(0));
                r
            }).collect();
        }
    };
    let copies = rng.gen_range(2..=3);
    let mut cells = Vec::new();
    for j in 0..copies {
        let mut base: Vec<Rat> = (0..n - 1).map(|_| random_rat(rng, 3, 2)).collect();
        base.push(rat(j as i64));
        cells.push(Polyhedron::from_extreme_generators(n, vec![base], rays.clone(), vec![]));
    }
    let complex = PolyhedralComplex::new(n, cells, true).expect("disjoint translates");
    let shared = random_slope(rng, n, 5);
    let forms: Vec<AffineForm> = complex
        .maximal_cells()
        .iter()
        .map(|_| {
            let m = if agree { shared.clone() } else { random_slope(rng, n, 5) };
            AffineForm::new(m, random_rat(rng, 5, 3))
        })
        .collect();
    FacewiseAffine::from_maximal(complex, forms).expect("disjoint cells carry independent forms")
}

/// A facewise affine function on a complete arrangement, convex when `convex` is true and
/// usually not otherwise.
pub fn random_convexity_case(rng: &mut impl Rng, n: usize, convex: bool) -> FacewiseAffine {
    loop {
        let arr = random_arrangement(rng, n, 40);
        if arr.hyperplanes.is_empty() {
            continue;
        }
        if let Some(f) = abs_combination(rng, &arr.complex, &arr.hyperplanes, 8, Some(convex)) {
            return f;
        }
    }
}

/// A random point with small rational coordinates.
pub fn random_point(rng: &mut impl Rng, n: usize, bound: i64) -> Vec<Rat> {
    (0..n).map(|_| random_rat(rng, bound * 4, 4)).collect()
}
