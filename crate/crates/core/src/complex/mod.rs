//! Embedded polyhedral complexes, abstract complexes with a recession fan, and arrangements.

mod abstract_complex;
mod arrangement;

pub use abstract_complex::{AbstractComplex, AbstractError, AbstractInput, ElementInput, ParallelClassAbstract};
pub use arrangement::{arrangement_completion, supporting_hyperplanes, Arrangement};

use std::collections::{BTreeMap, HashMap};


use crate::num::{to_rats, Int, Rat};
use crate::poly::{PolyKey, Polyhedron};
use crate::Caps;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("complex has no cells")]
    NoCells,
    #[error("cell {cell} lives in dimension {found}, expected {expected}")]
    Dimension { cell: usize, found: usize, expected: usize },
    #[error("cell {0} is empty")]
    EmptyCell(usize),
    #[error("cells {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("a face of cell {0} is not a cell of the complex")]
    MissingFace(usize),
    #[error("cells {0} and {1} meet in a set that is not a common face")]
    NotAFace(usize, usize),
    #[error("recession cones of cells {0} and {1} do not meet in a common face")]
    NotAFan(usize, usize),
    #[error("{what} count {count} exceeds the cap {cap}")]
    CapExceeded { what: &'static str, count: usize, cap: usize },
}

/// A finite polyhedral complex in `R^n`.
///
/// Cell indices are stable: cells passed to a constructor keep their positions, and any
/// faces added automatically are appended after them.
#[derive(Clone, Debug)]
pub struct PolyhedralComplex {
    dim: usize,
    cells: Vec<Polyhedron>,
    cell_dims: Vec<usize>,
    faces: Vec<Vec<usize>>,
    cofaces: Vec<Vec<usize>>,
    maximal: Vec<usize>,
    index: HashMap<PolyKey, usize>,
}

impl PolyhedralComplex {
    /// Validates `cells` as a complex. With `auto_faces`, missing faces are added instead
    /// of being reported.
    pub fn new(dim: usize, cells: Vec<Polyhedron>, auto_faces: bool) -> Result<Self, ComplexError> {
        let c = Self::close(dim, cells, auto_faces)?;
        c.check_intersections()?;
        Ok(c)
    }

    /// Adds all faces but does not check pairwise intersections. For cells known to form
    /// a complex, such as arrangement chambers or common refinements.
    pub fn trusted(dim: usize, cells: Vec<Polyhedron>) -> Self {
        Self::close(dim, cells, true).expect("trusted complex")
    }

    /// Assembles a complex whose face relation is already known: `faces[i]` lists the
    /// indices of all faces of cell `i`, including `i`.
    pub fn from_parts(dim: usize, cells: Vec<Polyhedron>, faces: Vec<Vec<usize>>) -> Self {
        let cell_dims = cells.iter().map(|c| c.affine_dim().expect("nonempty cell")).collect();
        let index = cells.iter().enumerate().map(|(i, c)| (c.key(), i)).collect();
        Self::assemble(dim, cells, cell_dims, faces, index)
    }

    fn assemble(
        dim: usize,
        cells: Vec<Polyhedron>,
        cell_dims: Vec<usize>,
        mut faces: Vec<Vec<usize>>,
        index: HashMap<PolyKey, usize>,
    ) -> Self {
        let mut cofaces = vec![Vec::new(); cells.len()];
        for (i, fs) in faces.iter_mut().enumerate() {
            fs.sort_unstable();
            fs.dedup();
            for &f in fs.iter() {
                cofaces[f].push(i);
            }
        }
        let maximal = (0..cells.len()).filter(|&i| cofaces[i].len() == 1).collect();
        PolyhedralComplex { dim, cells, cell_dims, faces, cofaces, maximal, index }
    }

    fn close(dim: usize, cells: Vec<Polyhedron>, auto_faces: bool) -> Result<Self, ComplexError> {
        if cells.is_empty() {
            return Err(ComplexError::NoCells);
        }
        let mut index: HashMap<PolyKey, usize> = HashMap::new();
        let mut all: Vec<Polyhedron> = Vec::with_capacity(cells.len());
        for (i, c) in cells.into_iter().enumerate() {
            if c.dim() != dim {
                return Err(ComplexError::Dimension { cell: i, found: c.dim(), expected: dim });
            }
            if c.is_empty() {
                return Err(ComplexError::EmptyCell(i));
            }
            if let Some(&j) = index.get(&c.key()) {
                return Err(ComplexError::Duplicate(j, i));
            }
            index.insert(c.key(), i);
            all.push(c);
        }
        let mut faces: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < all.len() {
            let mut fs = Vec::new();
            for f in all[i].faces() {
                let k = f.key();
                match index.get(&k) {
                    Some(&j) => fs.push(j),
                    None if auto_faces => {
                        index.insert(k, all.len());
                        fs.push(all.len());
                        all.push(f);
                    }
                    None => return Err(ComplexError::MissingFace(i)),
                }
            }
            faces.push(fs);
            i += 1;
        }
        let dims = all.iter().map(|c| c.affine_dim().unwrap()).collect();
        Ok(Self::assemble(dim, all, dims, faces, index))
    }

    fn check_intersections(&self) -> Result<(), ComplexError> {
        let m = &self.maximal;
        for (a, &i) in m.iter().enumerate() {
            for &j in &m[a + 1..] {
                let x = self.cells[i].intersect(&self.cells[j]);
                if x.is_empty() {
                    continue;
                }
                let ok = self
                    .index
                    .get(&x.key())
                    .is_some_and(|k| self.faces[i].binary_search(k).is_ok() && self.faces[j].binary_search(k).is_ok());
                if !ok {
                    return Err(ComplexError::NotAFace(i.min(j), i.max(j)));
                }
            }
        }
        Ok(())
    }

    pub fn check_caps(&self, caps: &Caps) -> Result<(), ComplexError> {
        if self.dim > caps.max_dim {
            return Err(ComplexError::CapExceeded { what: "dimension", count: self.dim, cap: caps.max_dim });
        }
        if self.cells.len() > caps.max_cells {
            return Err(ComplexError::CapExceeded { what: "cell", count: self.cells.len(), cap: caps.max_cells });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Polyhedron] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Polyhedron {
        &self.cells[i]
    }

    pub fn cell_dim(&self, i: usize) -> usize {
        self.cell_dims[i]
    }

    /// Indices of all faces of cell `i`, including `i` itself.
    pub fn faces_of(&self, i: usize) -> &[usize] {
        &self.faces[i]
    }

    /// Indices of all cells having `i` as a face, including `i` itself.
    pub fn cofaces_of(&self, i: usize) -> &[usize] {
        &self.cofaces[i]
    }

    pub fn is_face(&self, face: usize, of: usize) -> bool {
        self.faces[of].binary_search(&face).is_ok()
    }

    pub fn maximal_cells(&self) -> &[usize] {
        &self.maximal
    }

    /// Maximal cells containing cell `i`.
    pub fn maximal_cofaces(&self, i: usize) -> Vec<usize> {
        self.cofaces[i].iter().copied().filter(|&j| self.cofaces[j].len() == 1).collect()
    }

    pub fn index_of(&self, p: &Polyhedron) -> Option<usize> {
        self.index.get(&p.key()).copied()
    }

    /// Largest cell dimension.
    pub fn pure_dim(&self) -> usize {
        self.cell_dims.iter().copied().max().unwrap_or(0)
    }

    /// Number of cells of each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.pure_dim() + 1];
        for &d in &self.cell_dims {
            f[d] += 1;
        }
        f
    }

    /// The cell containing `u` in its relative interior.
    pub fn locate(&self, u: &[Rat]) -> Option<usize> {
        let top = self.maximal.iter().copied().find(|&i| self.cells[i].contains(u))?;
        let mut best = top;
        for &f in &self.faces[top] {
            if self.cell_dims[f] < self.cell_dims[best] && self.cells[f].contains(u) {
                best = f;
            }
        }
        Some(best)
    }

    pub fn support_contains(&self, u: &[Rat]) -> bool {
        self.maximal.iter().any(|&i| self.cells[i].contains(u))
    }

    /// Whether `p ⊆ |Σ|`. The polyhedron is cut by the walls of all cells meeting it; each
    /// piece then lies inside or outside every cell, so one point per piece decides.
    pub fn covers(&self, p: &Polyhedron) -> bool {
        if p.is_empty() {
            return true;
        }
        let mut walls: Vec<crate::trop::AffineForm> = Vec::new();
        for &i in &self.maximal {
            let c = &self.cells[i];
            if c.contains_polyhedron(p) {
                return true;
            }
            if c.intersect(p).is_empty() {
                continue;
            }
            walls.extend(c.ineqs().iter().cloned());
            walls.extend(c.eqs().iter().cloned());
        }
        let mut pieces = vec![p.clone()];
        for h in &walls {
            let mut next = Vec::with_capacity(pieces.len());
            for q in pieces {
                let (a, b) = q.split(h);
                next.extend(a);
                next.extend(b);
            }
            pieces = next;
        }
        pieces.iter().all(|q| self.support_contains(&relint_point(q)))
    }

    /// The cells with indices in `keep`, which must be closed under taking faces.
    pub fn subcomplex(&self, keep: &[usize]) -> PolyhedralComplex {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let cells = keep.iter().map(|&i| self.cells[i].clone()).collect();
        let faces = keep.iter().map(|&i| self.faces[i].iter().map(|f| pos[f]).collect()).collect();
        let dims = keep.iter().map(|&i| self.cell_dims[i]).collect();
        let index = keep.iter().enumerate().map(|(a, &b)| (self.cells[b].key(), a)).collect();
        Self::assemble(self.dim, cells, dims, faces, index)
    }

    /// The fan of recession cones.
    pub fn recession_fan(&self) -> Result<PolyhedralComplex, ComplexError> {
        let mut origin: Vec<usize> = Vec::new();
        let mut cones: Vec<Polyhedron> = Vec::new();
        let mut seen: HashMap<PolyKey, ()> = HashMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            let r = c.recession_cone();
            if seen.insert(r.key(), ()).is_none() {
                origin.push(i);
                cones.push(r);
            }
        }
        PolyhedralComplex::new(self.dim, cones, true).map_err(|e| match e {
            ComplexError::NotAFace(a, b) => ComplexError::NotAFan(origin[a], origin[b]),
            e => e,
        })
    }

    /// Directions along which slopes of parallel half-lines must agree, each with the
    /// maximal cells whose recession cone contains it. These are the generators of all
    /// pairwise intersections of recession cones of maximal cells.
    pub fn parallel_directions(&self) -> Vec<(Vec<Int>, Vec<usize>)> {
        let mut distinct: Vec<Polyhedron> = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut pos: HashMap<PolyKey, usize> = HashMap::new();
        for &i in &self.maximal {
            let r = self.cells[i].recession_cone();
            let v = r.vrep().unwrap();
            if v.rays.is_empty() && v.lineality.is_empty() {
                continue;
            }
            let k = *pos.entry(r.key()).or_insert_with(|| {
                distinct.push(r.clone());
                members.push(Vec::new());
                distinct.len() - 1
            });
            members[k].push(i);
        }
        let mut dirs: BTreeMap<Vec<Int>, ()> = BTreeMap::new();
        for a in 0..distinct.len() {
            for b in a..distinct.len() {
                let x = if a == b { distinct[a].clone() } else { distinct[a].intersect(&distinct[b]) };
                if let Some(v) = x.vrep() {
                    for r in v.recession_generators() {
                        dirs.insert(r, ());
                    }
                }
            }
        }
        dirs.into_keys()
            .map(|d| {
                let dr = to_rats(&d);
                let mut cells: Vec<usize> = Vec::new();
                for (k, cone) in distinct.iter().enumerate() {
                    if cone.recedes_along(&dr) {
                        cells.extend(&members[k]);
                    }
                }
                cells.sort_unstable();
                (d, cells)
            })
            .filter(|(_, cells)| !cells.is_empty())
            .collect()
    }

    /// Partition of (maximal cell, primitive direction) pairs into parallel classes, one
    /// class per direction.
    pub fn parallel_classes(&self) -> Vec<(Vec<Int>, Vec<usize>)> {
        self.parallel_directions()
    }

    /// Closures of pairwise intersections of cells; refines both inputs on the common part
    /// of their supports.
    pub fn common_refinement(&self, other: &PolyhedralComplex) -> PolyhedralComplex {
        assert_eq!(self.dim, other.dim, "ambient dimensions differ");
        let mut seen: HashMap<PolyKey, ()> = HashMap::new();
        let mut cells = Vec::new();
        for &i in &self.maximal {
            for &j in &other.maximal {
                let x = self.cells[i].intersect(&other.cells[j]);
                if x.is_empty() || seen.insert(x.key(), ()).is_some() {
                    continue;
                }
                cells.push(x);
            }
        }
        PolyhedralComplex::trusted(self.dim, cells)
    }

    /// Refines every cell by the hyperplanes `h = 0`, keeping all faces.
    pub fn refine_by(&self, hyperplanes: &[crate::trop::AffineForm]) -> PolyhedralComplex {
        let mut pieces: Vec<Polyhedron> = self.maximal.iter().map(|&i| self.cells[i].clone()).collect();
        for h in hyperplanes {
            let mut next = Vec::with_capacity(pieces.len());
            for p in pieces {
                match p.split(h) {
                    (Some(a), Some(b)) if !a.key().eq(&b.key()) => {
                        next.push(a);
                        next.push(b);
                    }
                    (Some(a), _) => next.push(a),
                    (None, Some(b)) => next.push(b),
                    (None, None) => {}
                }
            }
            pieces = next;
        }
        PolyhedralComplex::trusted(self.dim, pieces)
    }
}

/// A point of the relative interior of `p`.
pub fn relint_point(p: &Polyhedron) -> Vec<Rat> {
    p.vrep().expect("nonempty").interior_point()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};
    use crate::trop::AffineForm;

    fn f(s: &[i64], c: i64) -> AffineForm {
        AffineForm::from_ints(s, rat(c))
    }

    fn vr(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    fn vi(xs: &[i64]) -> Vec<Int> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn tri(a: &[i64], b: &[i64], c: &[i64]) -> Polyhedron {
        Polyhedron::from_generators(2, vec![vr(a), vr(b), vr(c)], vec![], vec![])
    }

    fn square(x0: i64, y0: i64, x1: i64, y1: i64) -> Polyhedron {
        Polyhedron::new(2, vec![f(&[1, 0], -x0), f(&[-1, 0], x1), f(&[0, 1], -y0), f(&[0, -1], y1)], vec![])
    }

    #[test]
    fn triangles_sharing_an_edge() {
        let c = PolyhedralComplex::new(2, vec![tri(&[0, 0], &[1, 0], &[0, 1]), tri(&[1, 0], &[0, 1], &[1, 1])], true)
            .unwrap();
        assert_eq!(c.f_vector(), vec![4, 5, 2]);
        assert_eq!(c.maximal_cells(), &[0, 1]);
    }

    #[test]
    fn overlapping_squares_are_rejected() {
        let e = PolyhedralComplex::new(2, vec![square(0, 0, 2, 2), square(1, 0, 3, 2)], true).unwrap_err();
        assert_eq!(e, ComplexError::NotAFace(0, 1));
    }

    #[test]
    fn missing_endpoints_are_reported() {
        let seg = Polyhedron::from_generators(1, vec![vr(&[0]), vr(&[1])], vec![], vec![]);
        assert_eq!(PolyhedralComplex::new(1, vec![seg], false).unwrap_err(), ComplexError::MissingFace(0));
    }

    #[test]
    fn recession_fans() {
        let sq = PolyhedralComplex::new(2, vec![square(0, 0, 1, 1)], true).unwrap();
        assert_eq!(sq.recession_fan().unwrap().len(), 1);
        let cone = |a: &[i64], b: &[i64]| Polyhedron::from_generators(2, vec![vr(&[0, 0])], vec![vi(a), vi(b)], vec![]);
        let good = PolyhedralComplex::new(2, vec![cone(&[1, 0], &[1, 1]), cone(&[1, 1], &[0, 1])], true).unwrap();
        assert_eq!(good.recession_fan().unwrap().maximal_cells().len(), 2);
        // Parallel planar cones at different heights overlap only as recession cones.
        let a = Polyhedron::from_generators(3, vec![vr(&[0, 0, 0])], vec![vi(&[1, 0, 0]), vi(&[0, 1, 0])], vec![]);
        let b = Polyhedron::from_generators(3, vec![vr(&[0, 0, 1])], vec![vi(&[1, 1, 0]), vi(&[1, -1, 0])], vec![]);
        let bad = PolyhedralComplex::new(3, vec![a, b], true).unwrap();
        assert!(matches!(bad.recession_fan(), Err(ComplexError::NotAFan(_, _))));
    }

    #[test]
    fn refinement_of_square_by_diagonals() {
        let sq = square(0, 0, 1, 1);
        let d1 = PolyhedralComplex::new(2, vec![tri(&[0, 0], &[1, 0], &[1, 1]), tri(&[0, 0], &[0, 1], &[1, 1])], true)
            .unwrap();
        let d2 = PolyhedralComplex::new(2, vec![tri(&[0, 0], &[1, 0], &[0, 1]), tri(&[1, 0], &[0, 1], &[1, 1])], true)
            .unwrap();
        let r = d1.common_refinement(&d2);
        assert_eq!(r.maximal_cells().len(), 4);
        let same = d1.common_refinement(&d1);
        assert_eq!(same.maximal_cells().len(), 2);
        let whole = PolyhedralComplex::new(2, vec![sq], true).unwrap();
        assert_eq!(whole.common_refinement(&d1).maximal_cells().len(), 2);
    }

    #[test]
    fn point_location() {
        let c = PolyhedralComplex::new(2, vec![square(0, 0, 1, 1)], true).unwrap();
        let i = c.locate(&[rat(0), crate::num::ratio(1, 2)]).unwrap();
        assert_eq!(c.cell_dim(i), 1);
        assert!(c.locate(&[rat(2), rat(0)]).is_none());
    }

    #[test]
    fn vertical_rays_form_one_class() {
        let ray = |x: i64| Polyhedron::from_generators(2, vec![vr(&[x, 0])], vec![vi(&[0, 1])], vec![]);
        let c = PolyhedralComplex::new(2, vec![ray(0), ray(2)], true).unwrap();
        let classes = c.parallel_classes();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].0, vi(&[0, 1]));
        assert_eq!(classes[0].1.len(), 2);
    }
}
