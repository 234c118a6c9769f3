//! Integer lattices in Hermite normal form.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::num::{nullspace, rat_of, solve, to_rats, Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    pub dim: usize,
    /// Row-style Hermite basis: echelon, positive pivots, reduced above pivots.
    pub basis: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("generator {0} is not integral")]
    NonIntegral(usize),
    #[error("lattice ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("map has shape {rows}x{cols}, lattices live in dimensions {from} -> {to}")]
    Shape { rows: usize, cols: usize, from: usize, to: usize },
}

fn sub_row(a: &mut [Int], b: &[Int], q: &Int) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// Row Hermite normal form `H = U M` with `U` unimodular. Returns `(H, U, rank)`; the
/// first `rank` rows of `H` are nonzero.
pub fn hnf_with_transform(m: &[Vec<Int>], ncols: usize) -> (Vec<Vec<Int>>, Vec<Vec<Int>>, usize) {
    let rows = m.len();
    let mut a: Vec<Vec<Int>> = m.to_vec();
    let mut u: Vec<Vec<Int>> = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    let mut p = 0;
    for j in 0..ncols {
        if p == rows {
            break;
        }
        loop {
            let Some(k) = (p..rows)
                .filter(|&k| !a[k][j].is_zero())
                .min_by(|&x, &y| a[x][j].abs().cmp(&a[y][j].abs()))
            else {
                break;
            };
            a.swap(p, k);
            u.swap(p, k);
            let mut done = true;
            for i in p + 1..rows {
                if a[i][j].is_zero() {
                    continue;
                }
                let q = a[i][j].div_floor(&a[p][j]);
                let (pa, pu) = (a[p].clone(), u[p].clone());
                sub_row(&mut a[i], &pa, &q);
                sub_row(&mut u[i], &pu, &q);
                if !a[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[p][j].is_zero() {
            continue;
        }
        if a[p][j].is_negative() {
            for x in a[p].iter_mut().chain(u[p].iter_mut()) {
                *x = -&*x;
            }
        }
        let (pa, pu) = (a[p].clone(), u[p].clone());
        for i in 0..p {
            let q = a[i][j].div_floor(&pa[j]);
            if !q.is_zero() {
                sub_row(&mut a[i], &pa, &q);
                sub_row(&mut u[i], &pu, &q);
            }
        }
        p += 1;
    }
    (a, u, p)
}

fn transpose(m: &[Vec<Int>], ncols: usize) -> Vec<Vec<Int>> {
    (0..ncols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

impl Lattice {
    pub fn from_generators(dim: usize, gens: &[Vec<Int>]) -> Lattice {
        let (h, _, r) = hnf_with_transform(gens, dim);
        Lattice { dim, basis: h.into_iter().take(r).collect() }
    }

    /// Accepts rational generators, failing on the first non-integral one.
    pub fn from_rational(dim: usize, gens: &[Vec<Rat>]) -> Result<Lattice, LatticeError> {
        let mut ints = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.iter().any(|x| !x.is_integer()) {
                return Err(LatticeError::NonIntegral(i));
            }
            ints.push(g.iter().map(|x| x.to_integer()).collect());
        }
        Ok(Lattice::from_generators(dim, &ints))
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `span_Q(self) ∩ Z^dim`.
    pub fn saturation(&self) -> Lattice {
        saturated_lattice(self.dim, &self.basis.iter().map(|b| to_rats(b)).collect::<Vec<_>>())
    }

    pub fn is_saturated(&self) -> bool {
        *self == self.saturation()
    }

    /// `[sup : self]` when `self ⊆ sup` have equal rank.
    pub fn index_in(&self, sup: &Lattice) -> Option<Int> {
        if self.rank() != sup.rank() || self.dim != sup.dim {
            return None;
        }
        let gens: Vec<Vec<Rat>> = sup.basis.iter().map(|b| to_rats(b)).collect();
        let mut coords = Vec::with_capacity(self.rank());
        for b in &self.basis {
            let c = crate::num::coords_in_span(&gens, &to_rats(b))?;
            if c.iter().any(|x| !x.is_integer()) {
                return None;
            }
            coords.push(c.into_iter().map(|x| x.to_integer()).collect::<Vec<Int>>());
        }
        Some(det_int(coords).abs())
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        let mut gens = self.basis.clone();
        gens.push(v.to_vec());
        Lattice::from_generators(self.dim, &gens) == *self
    }
}

/// `span_Q(gens) ∩ Z^dim` for rational generators.
pub fn saturated_lattice(dim: usize, gens: &[Vec<Rat>]) -> Lattice {
    // Coordinates where every generator vanishes play no role; drop them first.
    let support: Vec<usize> = (0..dim).filter(|&j| gens.iter().any(|g| !g[j].is_zero())).collect();
    if support.len() < dim {
        let sub: Vec<Vec<Rat>> = gens.iter().map(|g| support.iter().map(|&j| g[j].clone()).collect()).collect();
        let lifted: Vec<Vec<Int>> = saturated_full(support.len(), &sub)
            .basis
            .into_iter()
            .map(|b| {
                let mut v = vec![Int::zero(); dim];
                for (&j, x) in support.iter().zip(b) {
                    v[j] = x;
                }
                v
            })
            .collect();
        return Lattice::from_generators(dim, &lifted);
    }
    saturated_full(dim, gens)
}

fn saturated_full(dim: usize, gens: &[Vec<Rat>]) -> Lattice {
    let complement = nullspace(gens, dim);
    if complement.is_empty() {
        let id: Vec<Vec<Int>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
        return Lattice { dim, basis: id };
    }
    let c: Vec<Vec<Int>> = complement.iter().map(|r| crate::num::clear_denoms(r)).collect();
    Lattice::from_generators(dim, &integer_kernel(&c, dim))
}

/// Determinant of a square integer matrix (Bareiss elimination).
pub fn det_int(mut a: Vec<Vec<Int>>) -> Int {
    let n = a.len();
    if n == 0 {
        return Int::one();
    }
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Basis of `{x ∈ Z^ncols : m x = 0}`.
pub fn integer_kernel(m: &[Vec<Int>], ncols: usize) -> Vec<Vec<Int>> {
    if m.is_empty() {
        return (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
    }
    let mt = transpose(m, ncols);
    let (_, u, r) = hnf_with_transform(&mt, m.len());
    u.into_iter().skip(r).collect()
}

/// An integer `x` with `rows · x = rhs`, if one exists.
pub fn solve_integer(rows: &[Vec<Int>], rhs: &[Rat], ncols: usize) -> Option<Vec<Int>> {
    if rows.is_empty() {
        return Some(vec![Int::zero(); ncols]);
    }
    // U Bᵀ = H, so B Uᵀ = Hᵀ; solve Hᵀ y = rhs on the pivot block and set x = Uᵀ y.
    let bt = transpose(rows, ncols);
    let (h, u, r) = hnf_with_transform(&bt, rows.len());
    let ht: Vec<Vec<Rat>> = (0..rows.len()).map(|i| (0..r).map(|k| rat_of(&h[k][i])).collect()).collect();
    let y = solve(&ht, rhs, r)?;
    if y.iter().any(|v| !v.is_integer()) {
        return None;
    }
    let mut x = vec![Int::zero(); ncols];
    for (k, yk) in y.iter().enumerate() {
        let yk = yk.to_integer();
        if yk.is_zero() {
            continue;
        }
        for (xi, ui) in x.iter_mut().zip(&u[k]) {
            *xi += &yk * ui;
        }
    }
    Some(x)
}

/// Whether the integer matrix `map` (rows = target coordinates) carries `n` onto `n2`.
pub fn is_unimodular(map: &[Vec<Int>], n: &Lattice, n2: &Lattice) -> Result<bool, LatticeError> {
    let cols = map.first().map_or(n.dim, |r| r.len());
    if map.len() != n2.dim || cols != n.dim {
        return Err(LatticeError::Shape { rows: map.len(), cols, from: n.dim, to: n2.dim });
    }
    if n.rank() != n2.rank() {
        return Err(LatticeError::RankMismatch(n.rank(), n2.rank()));
    }
    let images: Vec<Vec<Int>> = n
        .basis
        .iter()
        .map(|b| map.iter().map(|row| crate::num::dot_ii(row, b)).collect())
        .collect();
    let img = Lattice::from_generators(n2.dim, &images);
    Ok(img.rank() == n.rank() && img == *n2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn v(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn hermite_basis_of_index_two_sublattice() {
        let l = Lattice::from_generators(2, &[v(&[2, 0]), v(&[0, 2]), v(&[1, 1])]);
        assert_eq!(l.basis, vec![v(&[1, 1]), v(&[0, 2])]);
        assert!(!l.is_saturated());
        assert_eq!(l.saturation().basis, vec![v(&[1, 0]), v(&[0, 1])]);
    }

    #[test]
    fn rank_one_lattices_agree() {
        let a = Lattice::from_generators(2, &[v(&[1, -1])]);
        let b = Lattice::from_rational(2, &[vec![rat(1), rat(-1)]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank(), 1);
        assert!(Lattice::from_rational(1, &[vec![crate::num::ratio(1, 2)]]).is_err());
    }

    #[test]
    fn index_and_determinant() {
        assert_eq!(det_int(vec![v(&[2, 1]), v(&[1, 3])]), int(5));
        assert_eq!(det_int(vec![v(&[0, 1]), v(&[1, 0])]), int(-1));
        let z2 = Lattice::from_generators(2, &[v(&[1, 0]), v(&[0, 1])]);
        let l = Lattice::from_generators(2, &[v(&[2, 0]), v(&[0, 2]), v(&[1, 1])]);
        assert_eq!(l.index_in(&z2), Some(int(2)));
        let wide = saturated_lattice(4, &[vec![rat(0), rat(2), rat(0), rat(4)]]);
        assert_eq!(wide.basis, vec![v(&[0, 1, 0, 2])]);
    }

    #[test]
    fn unimodularity_examples() {
        let z2 = Lattice::from_generators(2, &[v(&[1, 0]), v(&[0, 1])]);
        let id = vec![v(&[1, 0]), v(&[0, 1])];
        assert!(is_unimodular(&id, &z2, &z2).unwrap());
        let d = vec![v(&[2, 0]), v(&[0, 1])];
        assert!(!is_unimodular(&d, &z2, &z2).unwrap());
        let line = Lattice::from_generators(2, &[v(&[1, 1])]);
        assert!(matches!(is_unimodular(&id, &line, &z2), Err(LatticeError::RankMismatch(1, 2))));
    }

    #[test]
    fn kernel_and_integer_solutions() {
        let k = integer_kernel(&[v(&[2, 4, 6])], 3);
        assert_eq!(k.len(), 2);
        for b in &k {
            assert!(crate::num::dot_ii(&v(&[2, 4, 6]), b).is_zero());
        }
        let x = solve_integer(&[v(&[2, 1])], &[rat(3)], 2).unwrap();
        assert_eq!(crate::num::dot_ii(&v(&[2, 1]), &x), int(3));
        assert!(solve_integer(&[v(&[2, 4])], &[rat(3)], 2).is_none());
    }

    #[test]
    fn saturation_of_diagonal_direction() {
        let s = saturated_lattice(3, &[vec![crate::num::ratio(1, 2), crate::num::ratio(-1, 2), rat(0)]]);
        assert_eq!(s.basis, vec![v(&[1, -1, 0])]);
    }
}
