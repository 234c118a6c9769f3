//! Barycentric subdivision of abstract complexes, its integral embedding, and
//! faithfulness certificates for families of facewise affine maps.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::complex::{relint_point, AbstractComplex, AbstractError, AbstractInput, ComplexError, ElementInput, PolyhedralComplex};
use crate::num::{coords_in_span, dot_ir, int, nullspace, primitive, rank, rat, rat_of, solve, to_rats, Int, Rat};
use crate::poly::{is_unimodular, saturated_lattice, solve_integer, Lattice, Polyhedron};
use crate::pwa::{FacewiseAffine, PwaError};
use crate::trop::AffineForm;
use crate::Caps;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BaryError {
    #[error(transparent)]
    Abstract(#[from] AbstractError),
    #[error("the subdivision has more than {cap} cells")]
    CapExceeded { cap: usize },
    #[error("no vertex of the subdivision is labeled `{0}`")]
    UnknownVertex(String),
    #[error("a perturbation factor must be nonzero")]
    ZeroFactor,
    #[error("coordinate `{coordinate}` is not integral affine on cell {cell}")]
    NonIntegral { cell: usize, coordinate: String },
    #[error("the image cells do not form a complex: {0}")]
    ImageNotComplex(ComplexError),
    #[error(transparent)]
    Pwa(#[from] PwaError),
}

/// A cell `η(τ•, S•)`: a chain `τ_1 ≺ ⋯ ≺ τ_k` of elements of `Δ` and a chain
/// `S_1 ≺ ⋯ ≺ S_l` of nonzero cones of `Υ` below `τ_1`. With `k = 0` it is a cone of the
/// subdivided recession fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaryCell {
    pub chain: Vec<usize>,
    pub rays: Vec<usize>,
}

impl BaryCell {
    pub fn dim(&self) -> usize {
        match self.chain.len() {
            0 => self.rays.len(),
            k => k - 1 + self.rays.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }
}

/// The barycentric subdivision `Δ′` of an abstract complex together with the chain data of
/// each of its elements.
///
/// Finite vertices of `Δ′` correspond to elements of `Δ` (in the order of
/// [`AbstractComplex::delta`]) and rays to the nonzero cones of `Υ`.
#[derive(Clone, Debug)]
pub struct Subdivision {
    base: AbstractComplex,
    complex: AbstractComplex,
    cells: Vec<BaryCell>,
    vertex_elems: Vec<usize>,
    ray_elems: Vec<usize>,
}

fn join_labels(ac: &AbstractComplex, z: &[usize]) -> String {
    z.iter().map(|&x| ac.label(x)).collect::<Vec<_>>().join(",")
}

/// All strict chains (including the empty one) in `elems` ordered by `ac`, each listed
/// bottom-up.
fn chains(ac: &AbstractComplex, elems: &[usize], cap: usize) -> Option<Vec<Vec<usize>>> {
    fn extend(ac: &AbstractComplex, elems: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) -> bool {
        out.push(cur.clone());
        if out.len() > cap {
            return false;
        }
        let last = *cur.last().unwrap();
        for &e in elems {
            if e != last && ac.leq(last, e) {
                cur.push(e);
                let ok = extend(ac, elems, cur, out, cap);
                cur.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = vec![Vec::new()];
    for &e in elems {
        let mut cur = vec![e];
        if !extend(ac, elems, &mut cur, &mut out, cap) {
            return None;
        }
    }
    Some(out)
}

/// The barycentric subdivision of `delta`. Elements are ordered by their number of
/// generators and then by generator labels.
pub fn barycentric_subdivision(delta: &AbstractComplex, caps: &Caps) -> Result<Subdivision, BaryError> {
    let cap = caps.max_cells;
    let vertex_elems = delta.delta();
    let ray_elems: Vec<usize> = delta.upsilon().into_iter().filter(|&u| u != delta.bottom()).collect();
    let mut labels: Vec<String> = vertex_elems
        .iter()
        .map(|&t| match delta.zeta(t) {
            [v] => delta.label(*v).to_string(),
            z => format!("p({})", join_labels(delta, z)),
        })
        .chain(ray_elems.iter().map(|&u| match delta.zeta(u) {
            [b] => delta.label(*b).to_string(),
            z => format!("e({})", join_labels(delta, z)),
        }))
        .collect();
    let elems: Vec<usize> = vertex_elems.iter().chain(&ray_elems).copied().collect();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for name in &labels {
        *seen.entry(name.clone()).or_default() += 1;
    }
    for (l, name) in labels.iter_mut().enumerate() {
        if seen[name.as_str()] > 1 {
            *name = format!("{name}#{}", delta.id(elems[l]));
        }
    }
    let nf = vertex_elems.len();
    let vpos: HashMap<usize, usize> = vertex_elems.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let rpos: HashMap<usize, usize> = ray_elems.iter().enumerate().map(|(i, &u)| (u, nf + i)).collect();

    let fan_chains = chains(delta, &ray_elems, cap).ok_or(BaryError::CapExceeded { cap })?;
    let cell_chains = chains(delta, &vertex_elems, cap).ok_or(BaryError::CapExceeded { cap })?;
    let mut cells: Vec<(Vec<usize>, BaryCell)> = Vec::new();
    for s in &fan_chains {
        cells.push((s.iter().map(|u| rpos[u]).collect(), BaryCell { chain: vec![], rays: s.clone() }));
    }
    for c in cell_chains.iter().filter(|c| !c.is_empty()) {
        for s in fan_chains.iter().filter(|s| s.iter().all(|&u| delta.leq(u, c[0]))) {
            let mut key: Vec<usize> = c.iter().map(|t| vpos[t]).collect();
            key.extend(s.iter().map(|u| rpos[u]));
            key.sort_unstable();
            cells.push((key, BaryCell { chain: c.clone(), rays: s.clone() }));
            if cells.len() > cap {
                return Err(BaryError::CapExceeded { cap });
            }
        }
    }
    cells.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let index: HashMap<&[usize], usize> = cells.iter().enumerate().map(|(i, (k, _))| (k.as_slice(), i)).collect();
    let id = |k: &[usize]| -> String {
        if k.is_empty() {
            "0".into()
        } else {
            k.iter().map(|&x| labels[x].as_str()).collect::<Vec<_>>().join("+")
        }
    };
    let elements = cells
        .iter()
        .map(|(k, _)| ElementInput {
            id: id(k),
            zeta: k.iter().map(|&x| labels[x].clone()).collect(),
            covers: (0..k.len())
                .map(|drop| {
                    let sub: Vec<usize> = k.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &x)| x).collect();
                    id(&cells[index[sub.as_slice()]].0)
                })
                .collect(),
        })
        .collect();
    let input = AbstractInput { v_f: labels[..nf].to_vec(), v_inf: labels[nf..].to_vec(), elements };
    let complex = AbstractComplex::new(&input)?;
    Ok(Subdivision {
        base: delta.clone(),
        complex,
        cells: cells.into_iter().map(|(_, c)| c).collect(),
        vertex_elems,
        ray_elems,
    })
}

/// Cells `conv(points) + cone(rays)` for every element of `ac` meeting `V_f`, in the order
/// of [`AbstractComplex::delta`].
fn realize_with(
    ac: &AbstractComplex,
    dim: usize,
    point: impl Fn(usize) -> Vec<Rat>,
    ray: impl Fn(usize) -> Vec<Int>,
) -> PolyhedralComplex {
    let nf = ac.num_finite();
    let delta = ac.delta();
    let pos: HashMap<usize, usize> = delta.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let cells = delta
        .iter()
        .map(|&t| {
            let vertices = ac.finite_part(t).into_iter().map(&point).collect();
            let rays = ac.ray_part(t).into_iter().map(|b| ray(b - nf)).collect();
            Polyhedron::from_extreme_generators(dim, vertices, rays, vec![])
        })
        .collect();
    let faces = delta.iter().map(|&t| ac.interval(t).filter_map(|e| pos.get(&e).copied()).collect()).collect();
    PolyhedralComplex::from_parts(dim, cells, faces)
}

fn unit(n: usize, i: usize) -> Vec<Int> {
    (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()
}

impl Subdivision {
    /// The subdivided complex `Δ`.
    pub fn base(&self) -> &AbstractComplex {
        &self.base
    }

    /// `Δ′` as an abstract complex.
    pub fn complex(&self) -> &AbstractComplex {
        &self.complex
    }

    /// Chain data, indexed like the elements of [`Subdivision::complex`].
    pub fn cells(&self) -> &[BaryCell] {
        &self.cells
    }

    pub fn cell(&self, e: usize) -> &BaryCell {
        &self.cells[e]
    }

    /// The element `τ` of `Δ` whose barycenter is finite vertex `x` of `Δ′`.
    pub fn vertex_element(&self, x: usize) -> usize {
        self.vertex_elems[x]
    }

    /// The cone of `Υ` giving ray `b` of `Δ′` (0-based among rays).
    pub fn ray_element(&self, b: usize) -> usize {
        self.ray_elems[b]
    }

    /// Index of the finite vertex of `Δ′` at the barycenter of `τ`.
    pub fn vertex_of(&self, tau: usize) -> Option<usize> {
        self.vertex_elems.iter().position(|&t| t == tau)
    }

    /// Finite vertex index of the label `name`.
    pub fn vertex_named(&self, name: &str) -> Option<usize> {
        self.complex.finite_labels().iter().position(|l| l == name)
    }

    /// `|ζ(τ) ∩ V_f|` for the element behind finite vertex `x`.
    pub fn weight(&self, x: usize) -> usize {
        self.base.finite_part(self.vertex_elems[x]).len()
    }

    /// The barycenter `p_τ = (1/|A|)·e_{A ∪ B}` of the element behind vertex `x`.
    pub fn barycenter(&self, x: usize) -> Vec<Rat> {
        let t = self.vertex_elems[x];
        let w = rat(self.weight(x) as i64);
        let mut p = vec![Rat::zero(); self.base.ambient_dim()];
        for &a in self.base.zeta(t) {
            p[a] = Rat::one() / &w;
        }
        p
    }

    /// `e_S` for the ray set `S = ζ(υ)` of ray `b`.
    pub fn ray_direction(&self, b: usize) -> Vec<Int> {
        let mut r = vec![Int::zero(); self.base.ambient_dim()];
        for &x in self.base.zeta(self.ray_elems[b]) {
            r[x] = Int::one();
        }
        r
    }

    /// Realizes `Δ′` inside the realization of `Δ` in `R^(V_f ∪ V_∞)`. Cells are listed in
    /// the order of `complex().delta()`.
    pub fn realize(&self) -> Result<PolyhedralComplex, AbstractError> {
        self.base.realize()?;
        Ok(realize_with(
            &self.complex,
            self.base.ambient_dim(),
            |x| self.barycenter(x),
            |b| self.ray_direction(b),
        ))
    }

    /// Number of cells of `Δ′` meeting `V_f` in each dimension, split into (bounded,
    /// unbounded).
    pub fn f_vector(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for c in self.cells.iter().filter(|c| !c.chain.is_empty()) {
            let d = c.dim();
            if out.len() <= d {
                out.resize(d + 1, (0, 0));
            }
            if c.is_bounded() {
                out[d].0 += 1;
            } else {
                out[d].1 += 1;
            }
        }
        out
    }
}

/// Scales the image of one finite vertex, to exercise the certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub vertex: usize,
    pub factor: Rat,
}

/// The map `φ` from the realization of `Δ′` into `R^(V″_f ∪ V′_∞)`, one coordinate per
/// vertex and ray of `Δ′`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub target_labels: Vec<String>,
    /// `φ(p_τ)`, indexed by finite vertex of `Δ′`.
    pub vertex_images: Vec<Vec<Rat>>,
    /// Images of the ray directions `e_S`.
    pub ray_images: Vec<Vec<Int>>,
    /// Cells `η(τ•, S•)`, in the order of `complex().delta()` of the subdivision.
    pub domain: PolyhedralComplex,
    /// Cells `σ(τ•, S•)`, indexed like `domain`.
    pub image: PolyhedralComplex,
}

impl Embedding {
    pub fn target_dim(&self) -> usize {
        self.target_labels.len()
    }
}

/// Homogenized generators `(y, 1)` and `(r, 0)` that are linearly independent force the
/// cells they span to meet along common faces.
fn independent_generators(dim: usize, vertices: &[Vec<Rat>], rays: &[Vec<Int>]) -> bool {
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(vertices.len() + rays.len());
    for v in vertices {
        let mut r = v.clone();
        r.push(Rat::one());
        rows.push(r);
    }
    for v in rays {
        let mut r = to_rats(v);
        r.push(Rat::zero());
        rows.push(r);
    }
    rows.len() <= dim + 1 && (rows.is_empty() || rank(&rows) == rows.len())
}

/// Builds `φ` with `φ(p_τ) = (1/|ζ(τ) ∩ V_f|)·e_{𝔭_τ}` and `e_S ↦ e_S`, optionally scaling
/// one vertex image.
pub fn embed_barycentric(sub: &Subdivision, perturb: Option<&Perturbation>) -> Result<Embedding, BaryError> {
    let ac = sub.complex();
    let nf = ac.num_finite();
    let t = ac.ambient_dim();
    let domain = sub.realize()?;
    let mut vertex_images: Vec<Vec<Rat>> = (0..nf)
        .map(|x| {
            let w = Rat::one() / rat(sub.weight(x) as i64);
            unit(t, x).into_iter().map(|e| rat_of(&e) * &w).collect()
        })
        .collect();
    if let Some(p) = perturb {
        if p.factor.is_zero() {
            return Err(BaryError::ZeroFactor);
        }
        let v = vertex_images.get_mut(p.vertex).ok_or_else(|| BaryError::UnknownVertex(p.vertex.to_string()))?;
        for c in v.iter_mut() {
            *c *= &p.factor;
        }
    }
    let ray_images: Vec<Vec<Int>> = (0..ac.num_rays()).map(|b| unit(t, nf + b)).collect();
    let image = realize_with(ac, t, |x| vertex_images[x].clone(), |b| ray_images[b].clone());
    if !independent_generators(t, &vertex_images, &ray_images) {
        let cells = image.maximal_cells().iter().map(|&i| image.cell(i).clone()).collect();
        PolyhedralComplex::new(t, cells, true).map_err(BaryError::ImageNotComplex)?;
    }
    let target_labels = ac.finite_labels().iter().chain(ac.ray_labels()).cloned().collect();
    Ok(Embedding { target_labels, vertex_images, ray_images, domain, image })
}

/// Lattice data of one cell of `Δ′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellLattice {
    /// Element of `Δ′`.
    pub element: usize,
    /// Ids of `τ_1, …, τ_k`.
    pub chain: Vec<String>,
    /// Ids of the cones `S_1, …, S_l`.
    pub rays: Vec<String>,
    pub rank: usize,
    pub unimodular: bool,
    /// Whether the generators for consecutive chain members alone span `N`.
    pub consecutive_pairs_suffice: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCertificate {
    pub cells: Vec<CellLattice>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeFailure {
    /// A generator `m_ij(φ(p_τi) − φ(p_τj))` of `N′` is not integral.
    NonIntegralGenerator { i: usize, j: usize },
    /// The generators of `N` do not span the full lattice of the cell.
    SourceNotSaturated,
    /// `N′` has the given index in the lattice of the image cell.
    IndexMismatch { index: Int },
    /// `φ` collapses the cell.
    RankDrop,
    /// `φ` differs from `ψ` at the named vertex or ray.
    NotRestrictionOfPsi { label: String },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("lattice check fails on the cell with chain {chain:?} and rays {rays:?}: {failure:?}")]
pub struct LatticeViolation {
    pub element: usize,
    pub chain: Vec<String>,
    pub rays: Vec<String>,
    pub failure: LatticeFailure,
}

fn lcm_usize(a: usize, b: usize) -> Rat {
    rat(a.lcm(&b) as i64)
}

fn sub_scaled(a: &[Rat], b: &[Rat], m: &Rat) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| (x - y) * m).collect()
}

/// Checks on every cell of `Δ′` that `φ` carries the lattice `N` spanned by
/// `m_ij(p_τi − p_τj)` and `e_{S_j}` isomorphically onto the lattice of the image cell, and
/// that `φ` is the restriction of the integral linear map `ψ` sending `e_{ζ(τ_i)}` to
/// `e_{𝔭_τi}` and `e_{S_j}` to `e_{S_j}`.
pub fn lattice_preservation_check(sub: &Subdivision, emb: &Embedding) -> Result<LatticeCertificate, LatticeViolation> {
    let ac = sub.complex();
    let base = sub.base();
    let n = base.ambient_dim();
    let t = emb.target_dim();
    let nf = ac.num_finite();
    let mut cells = Vec::new();
    let mut psi_failure = None;
    for e in ac.delta() {
        let cell = sub.cell(e);
        let fail = |failure: LatticeFailure| LatticeViolation {
            element: e,
            chain: cell.chain.iter().map(|&x| base.id(x).to_string()).collect(),
            rays: cell.rays.iter().map(|&x| base.id(x).to_string()).collect(),
            failure,
        };
        let xs: Vec<usize> = cell.chain.iter().map(|&tau| sub.vertex_of(tau).unwrap()).collect();
        let bs: Vec<usize> = ac.ray_part(e).into_iter().map(|b| b - nf).collect();
        let ws: Vec<usize> = xs.iter().map(|&x| sub.weight(x)).collect();
        let ps: Vec<Vec<Rat>> = xs.iter().map(|&x| sub.barycenter(x)).collect();
        let qs: Vec<&Vec<Rat>> = xs.iter().map(|&x| &emb.vertex_images[x]).collect();
        let src_rays: Vec<Vec<Rat>> = bs.iter().map(|&b| to_rats(&sub.ray_direction(b))).collect();
        let img_rays: Vec<Vec<Rat>> = bs.iter().map(|&b| to_rats(&emb.ray_images[b])).collect();

        let mut n_all = src_rays.clone();
        let mut n_consec = src_rays.clone();
        let mut n2_all = img_rays.clone();
        let mut pairs = Vec::new();
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let m = lcm_usize(ws[i], ws[j]);
                let g = sub_scaled(&ps[i], &ps[j], &m);
                if j == i + 1 {
                    n_consec.push(g.clone());
                }
                n_all.push(g);
                n2_all.push(sub_scaled(qs[i], qs[j], &m));
                pairs.push((i, j));
            }
        }
        let big_n = Lattice::from_rational(n, &n_all).map_err(|_| fail(LatticeFailure::SourceNotSaturated))?;
        let big_n2 = Lattice::from_rational(t, &n2_all).map_err(|err| match err {
            crate::poly::LatticeError::NonIntegral(k) if k >= img_rays.len() => {
                let (i, j) = pairs[k - img_rays.len()];
                fail(LatticeFailure::NonIntegralGenerator { i, j })
            }
            _ => fail(LatticeFailure::NotRestrictionOfPsi { label: ac.ray_labels()[bs[0]].clone() }),
        })?;
        let mut dirs: Vec<Vec<Rat>> = ps.iter().skip(1).map(|p| sub_scaled(p, &ps[0], &Rat::one())).collect();
        dirs.extend(src_rays.iter().cloned());
        let mut img_dirs: Vec<Vec<Rat>> = qs.iter().skip(1).map(|q| sub_scaled(q, qs[0], &Rat::one())).collect();
        img_dirs.extend(img_rays.iter().cloned());
        let r = cell.dim();
        if big_n != saturated_lattice(n, &dirs) || big_n.rank() != r {
            return Err(fail(LatticeFailure::SourceNotSaturated));
        }
        if !img_dirs.is_empty() && rank(&img_dirs) != r {
            return Err(fail(LatticeFailure::RankDrop));
        }
        let n2_sat = saturated_lattice(t, &img_dirs);
        if big_n2 != n2_sat {
            let index = big_n2.index_in(&n2_sat).unwrap_or_else(Int::zero);
            return Err(fail(LatticeFailure::IndexMismatch { index }));
        }
        // The linear part of φ on the basis of N must land in N′ and span it.
        let mut images = Vec::with_capacity(big_n.rank());
        for b in &big_n.basis {
            let c = coords_in_span(&dirs, &to_rats(b)).expect("basis vector lies in the span");
            let y: Vec<Rat> = (0..t).map(|k| c.iter().zip(&img_dirs).map(|(a, d)| a * &d[k]).sum()).collect();
            images.push(y);
        }
        match Lattice::from_rational(t, &images) {
            Ok(l) if l == big_n2 => {}
            Ok(l) => {
                let index = l.index_in(&n2_sat).unwrap_or_else(Int::zero);
                return Err(fail(LatticeFailure::IndexMismatch { index }));
            }
            Err(_) => return Err(fail(LatticeFailure::IndexMismatch { index: Int::zero() })),
        }
        for (k, &x) in xs.iter().enumerate() {
            let w = Rat::one() / rat(ws[k] as i64);
            let want: Vec<Rat> = unit(t, x).iter().map(|e| rat_of(e) * &w).collect();
            if *qs[k] != want {
                psi_failure.get_or_insert_with(|| fail(LatticeFailure::NotRestrictionOfPsi { label: ac.finite_labels()[x].clone() }));
            }
        }
        for &b in &bs {
            if emb.ray_images[b] != unit(t, nf + b) {
                psi_failure.get_or_insert_with(|| fail(LatticeFailure::NotRestrictionOfPsi { label: ac.ray_labels()[b].clone() }));
            }
        }
        let consecutive = Lattice::from_rational(n, &n_consec).map(|l| l == big_n).unwrap_or(false);
        cells.push(CellLattice {
            element: e,
            chain: cell.chain.iter().map(|&x| base.id(x).to_string()).collect(),
            rays: cell.rays.iter().map(|&x| base.id(x).to_string()).collect(),
            rank: r,
            unimodular: true,
            consecutive_pairs_suffice: consecutive,
        });
    }
    match psi_failure {
        Some(v) => Err(v),
        None => Ok(LatticeCertificate { cells }),
    }
}

/// The pullbacks `F_i = φ* x_i` of the target coordinates, as facewise affine functions on
/// `emb.domain`.
pub fn coordinate_functions(sub: &Subdivision, emb: &Embedding) -> Result<Vec<FacewiseAffine>, BaryError> {
    let ac = sub.complex();
    let nf = ac.num_finite();
    let n = sub.base().ambient_dim();
    let t = emb.target_dim();
    let delta = ac.delta();
    let maximal = emb.domain.maximal_cells();
    let mut forms: Vec<Vec<AffineForm>> = vec![Vec::with_capacity(maximal.len()); t];
    for &c in maximal {
        let e = delta[c];
        let xs = ac.finite_part(e);
        let bs: Vec<usize> = ac.ray_part(e).into_iter().map(|b| b - nf).collect();
        let ps: Vec<Vec<Rat>> = xs.iter().map(|&x| sub.barycenter(x)).collect();
        let mut dirs: Vec<Vec<Rat>> = ps.iter().skip(1).map(|p| sub_scaled(p, &ps[0], &Rat::one())).collect();
        dirs.extend(bs.iter().map(|&b| to_rats(&sub.ray_direction(b))));
        let lattice = saturated_lattice(n, &dirs);
        let coords: Vec<Vec<Rat>> = lattice
            .basis
            .iter()
            .map(|b| coords_in_span(&dirs, &to_rats(b)).expect("basis vector lies in the span"))
            .collect();
        let q0 = &emb.vertex_images[xs[0]];
        for (k, out) in forms.iter_mut().enumerate() {
            let mut vals: Vec<Rat> = xs.iter().skip(1).map(|&x| &emb.vertex_images[x][k] - &q0[k]).collect();
            vals.extend(bs.iter().map(|&b| rat_of(&emb.ray_images[b][k])));
            let rhs: Vec<Rat> = coords.iter().map(|c| c.iter().zip(&vals).map(|(a, v)| a * v).sum()).collect();
            let m = solve_integer(&lattice.basis, &rhs, n)
                .ok_or_else(|| BaryError::NonIntegral { cell: c, coordinate: emb.target_labels[k].clone() })?;
            let g = &q0[k] - dot_ir(&m, &ps[0]);
            out.push(AffineForm::new(m, g));
        }
    }
    forms
        .into_iter()
        .map(|f| FacewiseAffine::from_maximal(emb.domain.clone(), f).map_err(BaryError::from))
        .collect()
}

/// Per-cell part of a faithfulness certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellFaithfulness {
    pub cell: usize,
    pub dim: usize,
    pub unimodular: bool,
}

#[derive(Clone, Debug)]
pub struct FaithfulnessCertificate {
    pub cells: Vec<CellFaithfulness>,
    pub injective: bool,
    /// Whether injectivity needed the exact pairwise comparison rather than the
    /// independent-generator argument.
    pub pairwise: bool,
    /// The image cells, indexed like the domain.
    pub image: PolyhedralComplex,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FaithfulnessViolation {
    #[error("the maps are not defined on the given complex: {0}")]
    Mismatch(String),
    #[error("points {u:?} (cell {cell_a}) and {v:?} (cell {cell_b}) both map to {image:?}")]
    NotInjective { cell_a: usize, cell_b: usize, u: Vec<Rat>, v: Vec<Rat>, image: Vec<Rat> },
    #[error("the map on cell {cell} has lattice index {index}")]
    NotUnimodular { cell: usize, index: Int },
    #[error("the image is not a polyhedral complex: {0}")]
    ImageNotComplex(ComplexError),
}

struct CellMap {
    rows: Vec<Vec<Int>>,
    offset: Vec<Rat>,
}

impl CellMap {
    fn apply(&self, u: &[Rat]) -> Vec<Rat> {
        self.rows.iter().zip(&self.offset).map(|(r, c)| dot_ir(r, u) + c).collect()
    }

    fn linear(&self, d: &[Rat]) -> Vec<Rat> {
        self.rows.iter().map(|r| dot_ir(r, d)).collect()
    }

    /// `{u : L(φ(u)) ≥ 0}` as a form on the domain.
    fn pullback(&self, l: &AffineForm) -> AffineForm {
        let n = self.rows.first().map_or(0, |r| r.len());
        let slope = (0..n).map(|q| self.rows.iter().zip(&l.slope).map(|(r, a)| a * &r[q]).sum()).collect();
        let constant = &l.constant + dot_ir(&l.slope, &self.offset);
        AffineForm::new(slope, constant)
    }
}

fn add_scaled(u: &[Rat], d: &[Rat], s: &Rat) -> Vec<Rat> {
    u.iter().zip(d).map(|(a, b)| a + b * s).collect()
}

/// A point of `p` outside `q`, given that one exists.
fn point_outside(p: &Polyhedron, q: &Polyhedron) -> Vec<Rat> {
    let v = p.vrep().expect("nonempty");
    if let Some(x) = v.vertices.iter().find(|x| !q.contains(x)) {
        return x.clone();
    }
    let base = &v.vertices[0];
    for r in v.rays.iter().chain(&v.lineality) {
        for s in 0..64 {
            let x = add_scaled(base, &to_rats(r), &rat_of(&(Int::one() << s)));
            if !q.contains(&x) {
                return x;
            }
        }
        let neg: Vec<Rat> = r.iter().map(|a| -rat_of(a)).collect();
        for s in 0..64 {
            let x = add_scaled(base, &neg, &rat_of(&(Int::one() << s)));
            if p.contains(&x) && !q.contains(&x) {
                return x;
            }
        }
    }
    relint_point(p)
}

/// Certifies that the family `maps` is injective on `|complex|`, unimodular on every cell,
/// and has a polyhedral complex as image.
pub fn faithfulness_check(
    complex: &PolyhedralComplex,
    maps: &[FacewiseAffine],
) -> Result<FaithfulnessCertificate, FaithfulnessViolation> {
    let n = complex.dim();
    let t = maps.len();
    for (k, f) in maps.iter().enumerate() {
        if f.dim() != n || f.complex().len() != complex.len() {
            return Err(FaithfulnessViolation::Mismatch(format!("map {k} lives on a different complex")));
        }
        if (0..complex.len()).any(|i| f.complex().cell(i) != complex.cell(i)) {
            return Err(FaithfulnessViolation::Mismatch(format!("map {k} uses different cells")));
        }
    }
    let cell_map = |i: usize| CellMap {
        rows: maps.iter().map(|f| f.form(i).slope.clone()).collect(),
        offset: maps.iter().map(|f| f.form(i).constant.clone()).collect(),
    };
    let maximal = complex.maximal_cells().to_vec();
    let mut cells = Vec::new();
    for &i in &maximal {
        let cm = cell_map(i);
        let p = complex.cell(i);
        let v = p.vrep().expect("nonempty cell");
        let dirs = v.direction_generators();
        let dim = complex.cell_dim(i);
        if dim > 0 {
            let img: Vec<Vec<Rat>> = dirs.iter().map(|d| cm.linear(d)).collect();
            let img_rank = if t == 0 { 0 } else { rank(&img) };
            if img_rank < dim {
                let cols: Vec<Vec<Rat>> = (0..t).map(|r| img.iter().map(|y| y[r].clone()).collect()).collect();
                let a = if t == 0 {
                    let mut a = vec![Rat::zero(); dirs.len()];
                    a[0] = Rat::one();
                    a
                } else {
                    nullspace(&cols, dirs.len())
                        .into_iter()
                        .find(|a| {
                            let d: Vec<Rat> = (0..n).map(|q| a.iter().zip(&dirs).map(|(x, g)| x * &g[q]).sum()).collect();
                            d.iter().any(|x| !x.is_zero())
                        })
                        .expect("a kernel direction inside the cell")
                };
                let d: Vec<Rat> = (0..n).map(|q| a.iter().zip(&dirs).map(|(x, g)| x * &g[q]).sum()).collect();
                let u = relint_point(p);
                let mut s = Rat::one();
                let mut w = add_scaled(&u, &d, &s);
                while !p.contains(&w) {
                    s /= rat(2);
                    w = add_scaled(&u, &d, &s);
                }
                let image = cm.apply(&u);
                return Err(FaithfulnessViolation::NotInjective { cell_a: i, cell_b: i, u, v: w, image });
            }
            let lattice = saturated_lattice(n, &dirs);
            let target = saturated_lattice(t, &img);
            if !is_unimodular(&cm.rows, &lattice, &target).unwrap_or(false) {
                let images: Vec<Vec<Int>> =
                    lattice.basis.iter().map(|b| cm.rows.iter().map(|r| crate::num::dot_ii(r, b)).collect()).collect();
                let index = Lattice::from_generators(t, &images).index_in(&target).unwrap_or_else(Int::zero);
                return Err(FaithfulnessViolation::NotUnimodular { cell: i, index });
            }
        }
        cells.push(CellFaithfulness { cell: i, dim, unimodular: true });
    }

    let images: Vec<Polyhedron> = (0..complex.len())
        .map(|i| {
            let cm = cell_map(i);
            complex.cell(i).image_injective(&cm.rows, &cm.offset)
        })
        .collect();
    let faces: Vec<Vec<usize>> = (0..complex.len()).map(|i| complex.faces_of(i).to_vec()).collect();

    if fast_injectivity(complex, &maximal, &cell_map) {
        let image = PolyhedralComplex::from_parts(t, images, faces);
        return Ok(FaithfulnessCertificate { cells, injective: true, pairwise: false, image });
    }

    for (a, &i) in maximal.iter().enumerate() {
        let cmi = cell_map(i);
        for &j in &maximal[a + 1..] {
            let cmj = cell_map(j);
            for (x, cx, y, cy) in [(i, &cmi, j, &cmj), (j, &cmj, i, &cmi)] {
                let target = &images[y];
                let ineqs: Vec<AffineForm> = target.ineqs().iter().map(|l| cx.pullback(l)).collect();
                let eqs: Vec<AffineForm> = target.eqs().iter().map(|l| cx.pullback(l)).collect();
                let pre = complex.cell(x).with_constraints(&ineqs, &eqs);
                if pre.is_empty() || complex.cell(y).contains_polyhedron(&pre) {
                    continue;
                }
                let u = point_outside(&pre, complex.cell(y));
                let image = cx.apply(&u);
                let v = preimage(complex.cell(y), cy, &image).unwrap_or_else(|| u.clone());
                return Err(FaithfulnessViolation::NotInjective { cell_a: x, cell_b: y, u, v, image });
            }
        }
    }
    let max_images = maximal.iter().map(|&i| images[i].clone()).collect();
    PolyhedralComplex::new(t, max_images, true).map_err(FaithfulnessViolation::ImageNotComplex)?;
    let image = PolyhedralComplex::from_parts(t, images, faces);
    Ok(FaithfulnessCertificate { cells, injective: true, pairwise: true, image })
}

/// The point of `cell` sent to `y`, assuming the map is injective there.
fn preimage(cell: &Polyhedron, cm: &CellMap, y: &[Rat]) -> Option<Vec<Rat>> {
    let v = cell.vrep()?;
    let dirs = v.direction_generators();
    let base = &v.vertices[0];
    let fb = cm.apply(base);
    let rhs: Vec<Rat> = y.iter().zip(&fb).map(|(a, b)| a - b).collect();
    let img: Vec<Vec<Rat>> = dirs.iter().map(|d| cm.linear(d)).collect();
    let rows: Vec<Vec<Rat>> = (0..y.len()).map(|r| img.iter().map(|g| g[r].clone()).collect()).collect();
    let lam = solve(&rows, &rhs, dirs.len())?;
    let mut u = base.clone();
    for (l, d) in lam.iter().zip(&dirs) {
        u = add_scaled(&u, d, l);
    }
    Some(u)
}

/// Injectivity via generators: if distinct generators of the cells have distinct images and
/// the homogenized images are linearly independent, two image cells meet exactly in the
/// image of the face spanned by their common generators.
fn fast_injectivity(complex: &PolyhedralComplex, maximal: &[usize], cell_map: &impl Fn(usize) -> CellMap) -> bool {
    let mut src: HashMap<(Vec<Rat>, bool), Vec<Rat>> = HashMap::new();
    let mut img: HashMap<Vec<Rat>, (Vec<Rat>, bool)> = HashMap::new();
    for &i in maximal {
        let v = complex.cell(i).vrep().expect("nonempty cell");
        if !v.lineality.is_empty() {
            return false;
        }
        let cm = cell_map(i);
        let gens = v
            .vertices
            .iter()
            .map(|x| ((x.clone(), true), {
                let mut y = cm.apply(x);
                y.push(Rat::one());
                y
            }))
            .chain(v.rays.iter().map(|r| {
                let y: Vec<Int> = cm.rows.iter().map(|row| crate::num::dot_ii(row, r)).collect();
                let mut y = to_rats(&primitive(&y));
                y.push(Rat::zero());
                ((to_rats(r), false), y)
            }));
        for (key, y) in gens {
            if let Some(prev) = img.get(&y) {
                if *prev != key {
                    return false;
                }
            }
            match src.get(&key) {
                Some(z) if *z != y => return false,
                _ => {}
            }
            img.insert(y.clone(), key.clone());
            src.insert(key, y);
        }
    }
    let rows: Vec<Vec<Rat>> = img.into_keys().collect();
    rows.iter().all(|r| r.iter().any(|x| !x.is_zero())) && (rows.is_empty() || rank(&rows) == rows.len())
}

/// A coordinate whose doubling breaks unimodularity: a ray coordinate, or the barycenter
/// coordinate of an element with at least two finite vertices.
pub fn doubling_candidate(sub: &Subdivision) -> Option<usize> {
    let nf = sub.complex().num_finite();
    if sub.complex().num_rays() > 0 {
        return Some(nf);
    }
    (0..nf).find(|&x| sub.weight(x) >= 2)
}

/// Doubles the `k`-th map.
pub fn doubled(maps: &[FacewiseAffine], k: usize) -> Vec<FacewiseAffine> {
    maps.iter().enumerate().map(|(i, f)| if i == k { f.scale(&int(2)) } else { f.clone() }).collect()
}
