//! Hyperplane arrangements and the completion of a complex to a complete one.

use std::collections::BTreeSet;

use crate::poly::Polyhedron;
use crate::trop::AffineForm;
use crate::Caps;

use super::{relint_point, ComplexError, PolyhedralComplex};

/// Primitive, pairwise non-proportional affine forms and the complete complex they cut
/// out of `R^n`.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub hyperplanes: Vec<AffineForm>,
    pub complex: PolyhedralComplex,
}

impl Arrangement {
    pub fn new(dim: usize, hyperplanes: &[AffineForm], caps: &Caps) -> Result<Arrangement, ComplexError> {
        let hs: Vec<AffineForm> =
            hyperplanes.iter().filter_map(|h| h.hyperplane_key()).collect::<BTreeSet<_>>().into_iter().collect();
        if hs.len() > caps.max_hyperplanes {
            return Err(ComplexError::CapExceeded { what: "hyperplane", count: hs.len(), cap: caps.max_hyperplanes });
        }
        let mut chambers = vec![Polyhedron::universe(dim)];
        for h in &hs {
            let mut next = Vec::with_capacity(chambers.len() * 2);
            for c in chambers {
                let (a, b) = c.split(h);
                next.extend(a);
                next.extend(b);
            }
            if next.len() > caps.max_cells {
                return Err(ComplexError::CapExceeded { what: "cell", count: next.len(), cap: caps.max_cells });
            }
            chambers = next;
        }
        let complex = PolyhedralComplex::trusted(dim, chambers);
        complex.check_caps(caps)?;
        Ok(Arrangement { hyperplanes: hs, complex })
    }

    /// Signs of the hyperplane forms at `u`.
    pub fn sign_vector(&self, u: &[crate::num::Rat]) -> Vec<i8> {
        self.hyperplanes
            .iter()
            .map(|h| {
                let v = h.eval(u);
                match v.cmp(&num_traits::Zero::zero()) {
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => 1,
                }
            })
            .collect()
    }
}

/// Facet-supporting hyperplanes and affine-hull equations of the maximal cells.
pub fn supporting_hyperplanes(sigma: &PolyhedralComplex) -> Vec<AffineForm> {
    let mut out: BTreeSet<AffineForm> = BTreeSet::new();
    for &i in sigma.maximal_cells() {
        let h = sigma.cell(i).hrep().expect("nonempty cell");
        for f in h.facets.iter().chain(&h.equalities) {
            if let Some(k) = f.hyperplane_key() {
                out.insert(k);
            }
        }
    }
    out.into_iter().collect()
}

/// The arrangement of all supporting hyperplanes of `sigma`, and the subcomplex of its
/// faces lying in the support of `sigma`.
pub fn arrangement_completion(
    sigma: &PolyhedralComplex,
    caps: &Caps,
) -> Result<(Arrangement, PolyhedralComplex), ComplexError> {
    let arr = Arrangement::new(sigma.dim(), &supporting_hyperplanes(sigma), caps)?;
    let keep: Vec<usize> = (0..arr.complex.len())
        .filter(|&i| sigma.support_contains(&relint_point(arr.complex.cell(i))))
        .collect();
    let beta = arr.complex.subcomplex(&keep);
    Ok((arr, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    fn f(s: &[i64], c: i64) -> AffineForm {
        AffineForm::from_ints(s, rat(c))
    }

    #[test]
    fn half_line_completion() {
        let ray = Polyhedron::from_generators(1, vec![vec![rat(0)]], vec![vec![int(1)]], vec![]);
        let sigma = PolyhedralComplex::new(1, vec![ray], true).unwrap();
        let (arr, beta) = arrangement_completion(&sigma, &Caps::default()).unwrap();
        assert_eq!(arr.complex.f_vector(), vec![1, 2]);
        assert_eq!(beta.f_vector(), vec![1, 1]);
    }

    #[test]
    fn square_completion_is_a_grid() {
        let sq = Polyhedron::new(2, vec![f(&[1, 0], 0), f(&[-1, 0], 1), f(&[0, 1], 0), f(&[0, -1], 1)], vec![]);
        let sigma = PolyhedralComplex::new(2, vec![sq], true).unwrap();
        let (arr, beta) = arrangement_completion(&sigma, &Caps::default()).unwrap();
        assert_eq!(arr.hyperplanes.len(), 4);
        assert_eq!(arr.complex.f_vector()[2], 9);
        assert_eq!(beta.f_vector(), vec![4, 4, 1]);
    }

    #[test]
    fn three_generic_lines() {
        let arr = Arrangement::new(2, &[f(&[1, 0], 0), f(&[0, 1], 0), f(&[1, 1], -1)], &Caps::default()).unwrap();
        assert_eq!(arr.complex.f_vector()[2], 7);
    }
}
