//! Exact rational polyhedra: both representations, faces, recession cones and splitting.

pub mod dd;
pub mod lattice;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};

use crate::num::{clear_denoms, dot, primitive, rank, rat, rat_of, rref, to_rats, Bits, Int, Rat};
use crate::trop::AffineForm;

pub use lattice::{det_int, is_unimodular, saturated_lattice, solve_integer, Lattice, LatticeError};

/// Generators of a nonempty polyhedron: `conv(vertices) + cone(rays) + span(lineality)`.
///
/// Canonical: lineality is the scaled RREF basis, vertices and rays lie in its orthogonal
/// complement, rays are primitive, and both lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VRep {
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Int>>,
    pub lineality: Vec<Vec<Int>>,
}

impl VRep {
    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        let base = &self.vertices[0];
        let mut rows: Vec<Vec<Rat>> =
            self.vertices[1..].iter().map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        rows.extend(self.rays.iter().map(|r| to_rats(r)));
        rows.extend(self.lineality.iter().map(|r| to_rats(r)));
        if rows.is_empty() {
            0
        } else {
            rank(&rows)
        }
    }

    /// Directions spanning the linear space parallel to the affine hull.
    pub fn direction_generators(&self) -> Vec<Vec<Rat>> {
        let base = &self.vertices[0];
        let mut rows: Vec<Vec<Rat>> =
            self.vertices[1..].iter().map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        rows.extend(self.rays.iter().map(|r| to_rats(r)));
        rows.extend(self.lineality.iter().map(|r| to_rats(r)));
        rows
    }

    /// A point of the relative interior.
    pub fn interior_point(&self) -> Vec<Rat> {
        let n = self.vertices[0].len();
        let k = rat(self.vertices.len() as i64);
        let mut p = vec![Rat::zero(); n];
        for v in &self.vertices {
            for (a, b) in p.iter_mut().zip(v) {
                *a += b;
            }
        }
        for a in p.iter_mut() {
            *a /= &k;
        }
        for r in &self.rays {
            for (a, b) in p.iter_mut().zip(r) {
                *a += rat_of(b);
            }
        }
        p
    }

    /// Rays together with both signs of each lineality vector.
    pub fn recession_generators(&self) -> Vec<Vec<Int>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        out
    }
}

/// Canonical irredundant inequality description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub facets: Vec<AffineForm>,
    pub equalities: Vec<AffineForm>,
}

/// `{u : L(u) ≥ 0 for L in ineqs, L(u) = 0 for L in eqs}`.
///
/// Either representation may be given; the other is computed on demand and cached.
/// Cloning is cheap.
#[derive(Clone, Debug)]
pub struct Polyhedron(Arc<Inner>);

#[derive(Debug)]
struct Inner {
    dim: usize,
    cons: OnceLock<(Vec<AffineForm>, Vec<AffineForm>)>,
    vrep: OnceLock<Option<VRep>>,
    hrep: OnceLock<Option<HRep>>,
}

impl Polyhedron {
    fn raw(dim: usize) -> Inner {
        Inner { dim, cons: OnceLock::new(), vrep: OnceLock::new(), hrep: OnceLock::new() }
    }

    pub fn new(dim: usize, ineqs: Vec<AffineForm>, eqs: Vec<AffineForm>) -> Polyhedron {
        let mut infeasible = false;
        let mut ins: Vec<AffineForm> = Vec::new();
        for f in &ineqs {
            assert_eq!(f.dim(), dim, "constraint dimension");
            match f.primitive() {
                Some(g) => ins.push(g),
                None if f.constant.is_negative() => infeasible = true,
                None => {}
            }
        }
        let mut es: Vec<AffineForm> = Vec::new();
        for f in &eqs {
            assert_eq!(f.dim(), dim, "constraint dimension");
            match f.hyperplane_key() {
                Some(g) => es.push(g),
                None if !f.constant.is_zero() => infeasible = true,
                None => {}
            }
        }
        ins.sort();
        ins.dedup();
        es.sort();
        es.dedup();
        let inner = Self::raw(dim);
        let _ = inner.cons.set((ins, es));
        if infeasible {
            let _ = inner.vrep.set(None);
        }
        Polyhedron(Arc::new(inner))
    }

    pub fn universe(dim: usize) -> Polyhedron {
        Polyhedron::new(dim, vec![], vec![])
    }

    pub fn empty(dim: usize) -> Polyhedron {
        Polyhedron::new(dim, vec![AffineForm::constant(dim, rat(-1))], vec![])
    }

    pub fn point(p: &[Rat]) -> Polyhedron {
        Polyhedron::from_extreme_generators(p.len(), vec![p.to_vec()], vec![], vec![])
    }

    /// Builds from a canonical V-representation; constraints are derived lazily.
    pub fn from_vrep(dim: usize, v: VRep) -> Polyhedron {
        let inner = Self::raw(dim);
        let _ = inner.vrep.set(Some(v));
        Polyhedron(Arc::new(inner))
    }

    /// Builds from generators that are already irredundant (for example the vertices and
    /// rays of a face, or their image under an injective affine map).
    pub fn from_extreme_generators(
        dim: usize,
        vertices: Vec<Vec<Rat>>,
        rays: Vec<Vec<Int>>,
        lineality: Vec<Vec<Int>>,
    ) -> Polyhedron {
        Polyhedron::from_vrep(dim, canonical_vrep(dim, vertices, rays, lineality))
    }

    /// Builds from arbitrary, possibly redundant generators.
    pub fn from_generators(
        dim: usize,
        vertices: Vec<Vec<Rat>>,
        rays: Vec<Vec<Int>>,
        lineality: Vec<Vec<Int>>,
    ) -> Polyhedron {
        let v = canonical_vrep(dim, vertices, rays, lineality);
        let h = hrep_from_vrep(dim, &v);
        Polyhedron::new(dim, h.facets, h.equalities)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    fn cons(&self) -> &(Vec<AffineForm>, Vec<AffineForm>) {
        self.0.cons.get_or_init(|| match self.hrep() {
            Some(h) => (h.facets.clone(), h.equalities.clone()),
            None => (vec![AffineForm::constant(self.0.dim, rat(-1))], vec![]),
        })
    }

    pub fn ineqs(&self) -> &[AffineForm] {
        &self.cons().0
    }

    pub fn eqs(&self) -> &[AffineForm] {
        &self.cons().1
    }

    pub fn vrep(&self) -> Option<&VRep> {
        self.0
            .vrep
            .get_or_init(|| {
                let (i, e) = self.0.cons.get().expect("polyhedron without any representation");
                compute_vrep(self.0.dim, i, e)
            })
            .as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.vrep().is_none()
    }

    /// Canonical facets and equalities; `None` when empty.
    pub fn hrep(&self) -> Option<&HRep> {
        self.0.hrep.get_or_init(|| self.vrep().map(|v| hrep_from_vrep(self.0.dim, v))).as_ref()
    }

    /// Affine dimension, `None` when empty.
    pub fn affine_dim(&self) -> Option<usize> {
        self.vrep().map(|v| v.affine_dim())
    }

    pub fn is_bounded(&self) -> bool {
        self.vrep().is_none_or(|v| v.is_bounded())
    }

    pub fn contains(&self, u: &[Rat]) -> bool {
        self.ineqs().iter().all(|f| !f.eval(u).is_negative()) && self.eqs().iter().all(|f| f.eval(u).is_zero())
    }

    /// Whether direction `r` lies in the recession cone.
    pub fn recedes_along(&self, r: &[Rat]) -> bool {
        self.ineqs().iter().all(|f| !f.slope_along(r).is_negative())
            && self.eqs().iter().all(|f| f.slope_along(r).is_zero())
    }

    pub fn contains_polyhedron(&self, other: &Polyhedron) -> bool {
        match other.vrep() {
            None => true,
            Some(v) => {
                v.vertices.iter().all(|x| self.contains(x))
                    && v.recession_generators().iter().all(|r| self.recedes_along(&to_rats(r)))
            }
        }
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        assert_eq!(self.dim(), other.dim(), "ambient dimensions differ");
        self.with_constraints(other.ineqs(), other.eqs())
    }

    pub fn with_constraints(&self, ineqs: &[AffineForm], eqs: &[AffineForm]) -> Polyhedron {
        let mut ins = self.ineqs().to_vec();
        ins.extend(ineqs.iter().cloned());
        let mut es = self.eqs().to_vec();
        es.extend(eqs.iter().cloned());
        Polyhedron::new(self.dim(), ins, es).reduced()
    }

    /// Drops inequalities that do not define facets, using the V-representation.
    pub fn reduced(self) -> Polyhedron {
        let Some(v) = self.vrep() else {
            return self;
        };
        let d = v.affine_dim();
        let gens = homogeneous_generators(v);
        let mut keep: Vec<AffineForm> = Vec::new();
        let mut seen: Vec<Bits> = Vec::new();
        let mut implicit: Vec<AffineForm> = Vec::new();
        for f in self.ineqs() {
            let mut tight = Bits::new(gens.len());
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for (i, (g, is_vertex)) in gens.iter().enumerate() {
                let val = if *is_vertex { f.eval(g) } else { f.slope_along(g) };
                if val.is_zero() {
                    tight.set(i);
                    let mut h = g.clone();
                    h.push(if *is_vertex { Rat::one() } else { Rat::zero() });
                    rows.push(h);
                }
            }
            if tight.count() == gens.len() {
                implicit.push(f.clone());
                continue;
            }
            for l in &v.lineality {
                let mut h = to_rats(l);
                h.push(Rat::zero());
                rows.push(h);
            }
            if rows.is_empty() || rank(&rows) != d || seen.contains(&tight) {
                continue;
            }
            seen.push(tight);
            keep.push(f.clone());
        }
        let mut eqs = self.eqs().to_vec();
        eqs.extend(implicit);
        let p = Polyhedron::new(self.dim(), keep, eqs);
        let _ = p.0.vrep.set(Some(v.clone()));
        if let Some(h) = self.0.hrep.get() {
            let _ = p.0.hrep.set(h.clone());
        }
        p
    }

    /// `rec(P)`; for an empty polyhedron, the empty set.
    pub fn recession_cone(&self) -> Polyhedron {
        match self.vrep() {
            None => Polyhedron::empty(self.dim()),
            Some(v) => Polyhedron::from_vrep(
                self.dim(),
                VRep {
                    vertices: vec![vec![Rat::zero(); self.dim()]],
                    rays: v.rays.clone(),
                    lineality: v.lineality.clone(),
                },
            ),
        }
    }

    /// Equality key independent of the chosen constraints.
    pub fn key(&self) -> PolyKey {
        PolyKey { dim: self.dim(), vrep: self.vrep().cloned() }
    }

    /// All nonempty faces including `self`, ordered by decreasing dimension.
    pub fn faces(&self) -> Vec<Polyhedron> {
        let (Some(v), Some(h)) = (self.vrep(), self.hrep()) else {
            return Vec::new();
        };
        let nv = v.vertices.len();
        let ng = nv + v.rays.len();
        let mut tight: Vec<Bits> = Vec::new();
        for f in &h.facets {
            let mut b = Bits::new(ng);
            for (i, x) in v.vertices.iter().enumerate() {
                if f.eval(x).is_zero() {
                    b.set(i);
                }
            }
            for (i, r) in v.rays.iter().enumerate() {
                if f.slope_along_int(r).is_zero() {
                    b.set(nv + i);
                }
            }
            tight.push(b);
        }
        let mut full = Bits::new(ng);
        (0..ng).for_each(|i| full.set(i));
        let mut seen: BTreeSet<Bits> = BTreeSet::new();
        seen.insert(full.clone());
        let mut queue = vec![full];
        let mut out_sets = Vec::new();
        while let Some(s) = queue.pop() {
            for t in &tight {
                let s2 = s.and(t);
                if s2 == s || !s2.ones().any(|i| i < nv) || seen.contains(&s2) {
                    continue;
                }
                seen.insert(s2.clone());
                queue.push(s2);
            }
            out_sets.push(s);
        }
        let mut faces: Vec<Polyhedron> = out_sets
            .into_iter()
            .map(|s| {
                if s.count() == ng {
                    return self.clone();
                }
                let verts: Vec<Vec<Rat>> = s.ones().filter(|&i| i < nv).map(|i| v.vertices[i].clone()).collect();
                let rays: Vec<Vec<Int>> = s.ones().filter(|&i| i >= nv).map(|i| v.rays[i - nv].clone()).collect();
                let mut eqs = h.equalities.clone();
                let mut ins = Vec::new();
                for (f, t) in h.facets.iter().zip(&tight) {
                    if s.is_subset(t) {
                        eqs.push(f.clone());
                    } else {
                        ins.push(f.clone());
                    }
                }
                let p = Polyhedron::new(self.dim(), ins, eqs);
                let fv = VRep { vertices: verts, rays, lineality: v.lineality.clone() };
                let _ = p.0.vrep.set(Some(fv));
                p
            })
            .collect();
        faces.sort_by_cached_key(|p| (std::cmp::Reverse(p.affine_dim()), p.key()));
        faces
    }

    /// Splits along `h = 0` into the parts where `h ≥ 0` and `h ≤ 0`. Parts that are not
    /// of full relative dimension are dropped; when `h` does not change sign on the
    /// polyhedron it is returned whole on its side.
    pub fn split(&self, h: &AffineForm) -> (Option<Polyhedron>, Option<Polyhedron>) {
        match self.side_of(h) {
            _ if self.is_empty() => (None, None),
            Some(Ordering::Greater) | Some(Ordering::Equal) => (Some(self.clone()), None),
            Some(Ordering::Less) => (None, Some(self.clone())),
            None => {
                let plus = self.with_constraints(std::slice::from_ref(h), &[]);
                let minus = self.with_constraints(&[h.neg()], &[]);
                (Some(plus), Some(minus))
            }
        }
    }

    /// Sign of `h` on the polyhedron: `Greater` if `h ≥ 0` and not identically zero,
    /// `Less` if `h ≤ 0` and not identically zero, `Equal` if `h ≡ 0`; `None` if it takes
    /// both signs or the polyhedron is empty.
    pub fn side_of(&self, h: &AffineForm) -> Option<Ordering> {
        let v = self.vrep()?;
        let mut pos = false;
        let mut neg = false;
        for x in &v.vertices {
            match h.eval(x).cmp(&Rat::zero()) {
                Ordering::Greater => pos = true,
                Ordering::Less => neg = true,
                Ordering::Equal => {}
            }
        }
        for r in &v.rays {
            match h.slope_along_int(r).cmp(&Int::zero()) {
                Ordering::Greater => pos = true,
                Ordering::Less => neg = true,
                Ordering::Equal => {}
            }
        }
        for l in &v.lineality {
            if !h.slope_along_int(l).is_zero() {
                pos = true;
                neg = true;
            }
        }
        match (pos, neg) {
            (true, true) => None,
            (true, false) => Some(Ordering::Greater),
            (false, true) => Some(Ordering::Less),
            (false, false) => Some(Ordering::Equal),
        }
    }

    /// Image under `u ↦ M u + c`, assuming the map is injective on the affine hull.
    pub fn image_injective(&self, m: &[Vec<Int>], c: &[Rat]) -> Polyhedron {
        let v = self.vrep().expect("image of an empty polyhedron");
        let lin_map = |x: &[Int]| -> Vec<Int> { m.iter().map(|row| crate::num::dot_ii(row, x)).collect() };
        let vertices = v
            .vertices
            .iter()
            .map(|x| m.iter().zip(c).map(|(row, ci)| crate::num::dot_ir(row, x) + ci).collect())
            .collect();
        let rays = v.rays.iter().map(|r| lin_map(r)).collect();
        let lineality = v.lineality.iter().map(|l| lin_map(l)).collect();
        Polyhedron::from_extreme_generators(m.len(), vertices, rays, lineality)
    }
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Polyhedron {}

impl Hash for Polyhedron {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyKey {
    pub dim: usize,
    pub vrep: Option<VRep>,
}

/// Vertices as `(v, true)` and rays as `(r, false)`, all rational.
fn homogeneous_generators(v: &VRep) -> Vec<(Vec<Rat>, bool)> {
    let mut out: Vec<(Vec<Rat>, bool)> = v.vertices.iter().map(|x| (x.clone(), true)).collect();
    out.extend(v.rays.iter().map(|r| (to_rats(r), false)));
    out
}

fn homogenize(f: &AffineForm) -> Vec<Int> {
    let mut row: Vec<Rat> = to_rats(&f.slope);
    row.push(f.constant.clone());
    clear_denoms(&row)
}

fn compute_vrep(dim: usize, ineqs: &[AffineForm], eqs: &[AffineForm]) -> Option<VRep> {
    let mut a: Vec<Vec<Int>> = ineqs.iter().map(homogenize).collect();
    let mut t = vec![Int::zero(); dim + 1];
    t[dim] = Int::one();
    a.push(t);
    let e: Vec<Vec<Int>> = eqs.iter().map(homogenize).collect();
    let g = dd::cone_generators(dim + 1, &a, &e);
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for r in g.rays {
        if r[dim].is_zero() {
            rays.push(r[..dim].to_vec());
        } else {
            let t = rat_of(&r[dim]);
            vertices.push(r[..dim].iter().map(|x| rat_of(x) / &t).collect());
        }
    }
    if vertices.is_empty() {
        return None;
    }
    let lineality = g.lineality.into_iter().map(|l| l[..dim].to_vec()).collect();
    Some(canonical_vrep(dim, vertices, rays, lineality))
}

/// Normalizes generators: RREF lineality, projection of vertices and rays onto its
/// orthogonal complement, primitive rays, sorted and deduplicated lists.
pub fn canonical_vrep(dim: usize, vertices: Vec<Vec<Rat>>, rays: Vec<Vec<Int>>, lineality: Vec<Vec<Int>>) -> VRep {
    let mut lin: Vec<Vec<Rat>> = lineality.iter().map(|l| to_rats(l)).collect();
    rref(&mut lin);
    let lin_int: Vec<Vec<Int>> = lin.iter().map(|l| clear_denoms(l)).collect();
    let project = |x: &[Rat]| -> Vec<Rat> {
        if lin.is_empty() {
            return x.to_vec();
        }
        // Solve (L Lᵀ) c = L x, then x - Lᵀ c.
        let gram: Vec<Vec<Rat>> = lin.iter().map(|a| lin.iter().map(|b| dot(a, b)).collect()).collect();
        let rhs: Vec<Rat> = lin.iter().map(|a| dot(a, x)).collect();
        let c = crate::num::solve(&gram, &rhs, lin.len()).expect("independent lineality");
        let mut out = x.to_vec();
        for (ci, l) in c.iter().zip(&lin) {
            if ci.is_zero() {
                continue;
            }
            for (o, li) in out.iter_mut().zip(l) {
                *o -= ci * li;
            }
        }
        out
    };
    let mut vs: Vec<Vec<Rat>> = vertices.iter().map(|v| project(v)).collect();
    vs.sort();
    vs.dedup();
    let mut rs: Vec<Vec<Int>> = rays
        .iter()
        .map(|r| clear_denoms(&project(&to_rats(r))))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| primitive(&r))
        .collect();
    rs.sort();
    rs.dedup();
    debug_assert!(vs.iter().all(|v| v.len() == dim));
    VRep { vertices: vs, rays: rs, lineality: lin_int }
}

/// Canonical H-representation of a nonempty polyhedron given by generators.
pub fn hrep_from_vrep(dim: usize, v: &VRep) -> HRep {
    // Valid inequalities (a, b): a·v + b ≥ 0, a·r ≥ 0, a·l = 0.
    let mut ineqs: Vec<Vec<Int>> = v
        .vertices
        .iter()
        .map(|x| {
            let mut row = x.clone();
            row.push(Rat::one());
            clear_denoms(&row)
        })
        .collect();
    for r in &v.rays {
        let mut row = r.clone();
        row.push(Int::zero());
        ineqs.push(row);
    }
    let eqs: Vec<Vec<Int>> = v
        .lineality
        .iter()
        .map(|l| {
            let mut row = l.clone();
            row.push(Int::zero());
            row
        })
        .collect();
    let g = dd::cone_generators(dim + 1, &ineqs, &eqs);
    let mut eq_rows: Vec<Vec<Rat>> = g.lineality.iter().map(|l| to_rats(l)).collect();
    let pivots = rref(&mut eq_rows);
    let equalities: Vec<AffineForm> = eq_rows.iter().map(|row| to_form(row)).collect();
    let mut facets: Vec<AffineForm> = Vec::new();
    for ray in &g.rays {
        let mut row = to_rats(ray);
        for (e, &pc) in eq_rows.iter().zip(&pivots) {
            if row[pc].is_zero() {
                continue;
            }
            let f = row[pc].clone();
            for (x, y) in row.iter_mut().zip(e) {
                *x -= &f * y;
            }
        }
        if row[..dim].iter().all(Zero::is_zero) {
            continue;
        }
        facets.push(to_form(&row));
    }
    facets.sort();
    facets.dedup();
    HRep { facets, equalities }
}

/// Positive rescaling of `(a, b)` to an affine form with primitive integer slope.
fn to_form(row: &[Rat]) -> AffineForm {
    let n = row.len() - 1;
    let l = crate::num::lcm_denoms(&row[..n]);
    let scaled: Vec<Rat> = row.iter().map(|x| x * rat_of(&l)).collect();
    let ints: Vec<Int> = scaled[..n].iter().map(|x| x.to_integer()).collect();
    let g = crate::num::gcd_all(&ints);
    let g = if g.is_zero() { Int::one() } else { g };
    AffineForm::new(ints.iter().map(|x| x / &g).collect(), &scaled[n] / rat_of(&g))
}
