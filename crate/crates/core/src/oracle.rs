//! Slow reference checks by direct evaluation, used to cross-examine certificates.

use rand::Rng;

use crate::complex::{relint_point, PolyhedralComplex};
use crate::num::{int, rat, rat_of, to_rats, Int, Rat};
use crate::pwa::{FacewiseAffine, Func};
use crate::trop::TropValue;

/// Random points of `|complex|`: convex combinations of each cell's vertices plus
/// nonnegative multiples of its rays and integer multiples of its lineality.
pub fn sample_points(rng: &mut impl Rng, complex: &PolyhedralComplex, per_cell: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    for i in 0..complex.len() {
        let v = match complex.cell(i).vrep() {
            Some(v) => v,
            None => continue,
        };
        out.push(relint_point(complex.cell(i)));
        for _ in 0..per_cell {
            let w: Vec<i64> = v.vertices.iter().map(|_| rng.gen_range(1..=8)).collect();
            let total: i64 = w.iter().sum();
            let mut u = vec![rat(0); complex.dim()];
            for (x, &c) in v.vertices.iter().zip(&w) {
                for (a, b) in u.iter_mut().zip(x) {
                    *a += b * Rat::new(int(c), int(total));
                }
            }
            for r in &v.rays {
                let c = rat(rng.gen_range(0..=5));
                for (a, b) in u.iter_mut().zip(r) {
                    *a += rat_of(b) * &c;
                }
            }
            for l in &v.lineality {
                let c = rat(rng.gen_range(-5..=5));
                for (a, b) in u.iter_mut().zip(l) {
                    *a += rat_of(b) * &c;
                }
            }
            out.push(u);
        }
    }
    out
}

/// The first sample point where the two functions differ.
pub fn sampled_difference(a: Func<'_>, b: Func<'_>, points: &[Vec<Rat>]) -> Option<(Vec<Rat>, TropValue, TropValue)> {
    points.iter().find_map(|u| match (a.eval(u), b.eval(u)) {
        (Ok(x), Ok(y)) if x == y => None,
        (Ok(x), Ok(y)) => Some((u.clone(), x, y)),
        _ => Some((u.clone(), TropValue::Infinity, TropValue::Infinity)),
    })
}

/// Compares `F(u + 2^20 r) − F(u + 2^10 r)` across all maximal cells whose recession cones
/// contain `r`, for `r` running over the generators of pairwise intersections of those
/// cones. Returns the first pair of cells with different increments.
pub fn increments_disagree(f: &FacewiseAffine) -> Option<(usize, usize, Vec<Int>)> {
    let c = f.complex();
    let top = c.maximal_cells();
    let cones: Vec<_> = top.iter().map(|&i| c.cell(i).recession_cone()).collect();
    let mut dirs: Vec<Vec<Int>> = Vec::new();
    for a in 0..cones.len() {
        for b in a..cones.len() {
            if let Some(v) = cones[a].intersect(&cones[b]).vrep() {
                dirs.extend(v.rays.iter().cloned());
                for l in &v.lineality {
                    dirs.push(l.clone());
                    dirs.push(l.iter().map(|x| -x).collect());
                }
            }
        }
    }
    dirs.sort();
    dirs.dedup();
    let far = |u: &[Rat], r: &[Rat], e: u32| -> Vec<Rat> {
        let t = rat_of(&(Int::from(1) << e));
        u.iter().zip(r).map(|(a, b)| a + b * &t).collect()
    };
    for r in dirs {
        let rr = to_rats(&r);
        let mut seen: Option<(usize, Rat)> = None;
        for (k, &i) in top.iter().enumerate() {
            if !cones[k].contains(&rr) {
                continue;
            }
            let u = relint_point(c.cell(i));
            let d = f.eval(&far(&u, &rr, 20))? - f.eval(&far(&u, &rr, 10))?;
            match &seen {
                None => seen = Some((i, d)),
                Some((j, d0)) if *d0 != d => return Some((*j, i, r)),
                _ => {}
            }
        }
    }
    None
}
