//! Double description for cones `{y : A y ≥ 0, E y = 0}` with integer data.

use num_traits::{Signed, Zero};

use crate::num::{clear_denoms, dot_ii, nullspace, primitive, rref, to_rats, Bits, Int, Rat};

#[derive(Clone, Debug, Default)]
pub struct ConeGens {
    pub lineality: Vec<Vec<Int>>,
    pub rays: Vec<Vec<Int>>,
}

fn mat_vec(m: &[Vec<Int>], v: &[Int]) -> Vec<Int> {
    m.iter().map(|row| dot_ii(row, v)).collect()
}

/// Columns-as-rows helper: returns `Σ_j coeffs[j] * basis[j]`.
fn combine(basis: &[Vec<Int>], coeffs: &[Int], d: usize) -> Vec<Int> {
    let mut out = vec![Int::zero(); d];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            if !x.is_zero() {
                *o += c * x;
            }
        }
    }
    out
}

fn int_basis(rows: Vec<Vec<Rat>>) -> Vec<Vec<Int>> {
    rows.iter().map(|r| clear_denoms(r)).collect()
}

/// Extreme rays and lineality basis of the cone cut out by `ineqs ≥ 0` and `eqs = 0` in `R^d`.
pub fn cone_generators(d: usize, ineqs: &[Vec<Int>], eqs: &[Vec<Int>]) -> ConeGens {
    // Parametrize the equality subspace: y = Σ z_j b_j.
    let b: Vec<Vec<Int>> = if eqs.is_empty() {
        (0..d)
            .map(|i| {
                let mut e = vec![Int::zero(); d];
                e[i] = Int::from(1);
                e
            })
            .collect()
    } else {
        let rows: Vec<Vec<Rat>> = eqs.iter().map(|r| to_rats(r)).collect();
        int_basis(nullspace(&rows, d))
    };
    let k = b.len();
    if k == 0 {
        return ConeGens::default();
    }
    // G z ≥ 0 with G = A B.
    let g: Vec<Vec<Int>> = ineqs
        .iter()
        .map(|a| b.iter().map(|bj| dot_ii(a, bj)).collect::<Vec<Int>>())
        .filter(|row: &Vec<Int>| row.iter().any(|x| !x.is_zero()))
        .map(|row| primitive(&row))
        .collect();
    let g_rat: Vec<Vec<Rat>> = g.iter().map(|r| to_rats(r)).collect();
    let lin_z = int_basis(nullspace(&g_rat, k));
    let lineality: Vec<Vec<Int>> = lin_z.iter().map(|z| primitive(&combine(&b, z, d))).collect();
    let mut w_rows = g_rat.clone();
    rref(&mut w_rows);
    let w = int_basis(w_rows);
    let r = w.len();
    if r == 0 {
        return ConeGens { lineality, rays: Vec::new() };
    }
    // Pointed cone in w-coordinates: z = Σ w_i W_i, constraints G' = G Wᵀ.
    let gp: Vec<Vec<Int>> = g.iter().map(|row| mat_vec(&w, row)).collect();
    let pointed = pointed_rays(r, &gp);
    let rays = pointed
        .into_iter()
        .map(|wv| {
            let z = combine(&w, &wv, k);
            primitive(&combine(&b, &z, d))
        })
        .collect();
    ConeGens { lineality, rays }
}

struct Ray {
    v: Vec<Int>,
    zeros: Bits,
}

/// Extreme rays of a pointed cone `{w ∈ R^r : G w ≥ 0}` where `G` has full column rank.
fn pointed_rays(r: usize, g: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let m = g.len();
    // Pick r independent rows for the initial simplicial cone.
    let mut chosen: Vec<usize> = Vec::new();
    let mut echelon: Vec<Vec<Rat>> = Vec::new();
    for (i, row) in g.iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(to_rats(row));
        if crate::num::rank(&trial) > echelon.len() {
            rref(&mut trial);
            echelon = trial;
            chosen.push(i);
            if chosen.len() == r {
                break;
            }
        }
    }
    debug_assert_eq!(chosen.len(), r);
    // Columns of S⁻¹: ray j solves S x = e_j.
    let s: Vec<Vec<Rat>> = chosen.iter().map(|&i| to_rats(&g[i])).collect();
    let mut rays: Vec<Ray> = Vec::with_capacity(r);
    for j in 0..r {
        let rhs: Vec<Rat> = (0..r).map(|i| if i == j { Rat::from_integer(1.into()) } else { Rat::zero() }).collect();
        let x = crate::num::solve(&s, &rhs, r).expect("independent rows");
        let v = clear_denoms(&x);
        let mut zeros = Bits::new(m);
        for (pos, &ci) in chosen.iter().enumerate() {
            if pos != j {
                zeros.set(ci);
            }
        }
        rays.push(Ray { v, zeros });
    }
    let mut in_basis = vec![false; m];
    for &c in &chosen {
        in_basis[c] = true;
    }
    for (i, row) in g.iter().enumerate() {
        if in_basis[i] {
            continue;
        }
        let vals: Vec<Int> = rays.iter().map(|ray| dot_ii(row, &ray.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, v) in vals.iter().enumerate() {
                if v.is_zero() {
                    rays[k].zeros.set(i);
                }
            }
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if r >= 2 && common.count() + 2 < r {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|q| q == p || q == n || !common.is_subset(&rays[q].zeros));
                if !adjacent {
                    continue;
                }
                let a = &vals[p];
                let b = -&vals[n];
                let v: Vec<Int> = rays[n].v.iter().zip(&rays[p].v).map(|(x, y)| a * x + &b * y).collect();
                if v.iter().all(Zero::is_zero) {
                    continue;
                }
                let mut zeros = common;
                zeros.set(i);
                fresh.push(Ray { v: primitive(&v), zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, ray) in rays.into_iter().enumerate() {
            if vals[k].is_negative() {
                continue;
            }
            let mut ray = ray;
            if vals[k].is_zero() {
                ray.zeros.set(i);
            }
            kept.push(ray);
        }
        kept.extend(fresh);
        rays = kept;
    }
    rays.into_iter().map(|r| r.v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    fn v(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn orthant_rays() {
        let g = cone_generators(2, &[v(&[1, 0]), v(&[0, 1])], &[]);
        let mut rays = g.rays.clone();
        rays.sort();
        assert_eq!(rays, vec![v(&[0, 1]), v(&[1, 0])]);
        assert!(g.lineality.is_empty());
    }

    #[test]
    fn halfspace_has_lineality() {
        let g = cone_generators(2, &[v(&[1, 0])], &[]);
        assert_eq!(g.rays, vec![v(&[1, 0])]);
        assert_eq!(g.lineality.len(), 1);
    }

    #[test]
    fn square_cone_has_four_rays() {
        // Homogenized unit square: x ≥ 0, y ≥ 0, t - x ≥ 0, t - y ≥ 0.
        let ineqs = [v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[-1, 0, 1]), v(&[0, -1, 1])];
        let g = cone_generators(3, &ineqs, &[]);
        assert_eq!(g.rays.len(), 4);
    }

    #[test]
    fn redundant_and_contradictory_rows() {
        let g = cone_generators(1, &[v(&[1]), v(&[2]), v(&[-1])], &[]);
        assert!(g.rays.is_empty() && g.lineality.is_empty());
        let g = cone_generators(3, &[v(&[1, 0, 0])], &[v(&[0, 1, 0])]);
        assert_eq!(g.rays, vec![v(&[1, 0, 0])]);
        assert_eq!(g.lineality, vec![v(&[0, 0, 1])]);
    }
}
