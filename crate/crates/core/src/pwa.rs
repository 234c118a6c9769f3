//! Facewise integral affine functions on polyhedral complexes.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::complex::{relint_point, ComplexError, PolyhedralComplex};
use crate::lp::{maximize, LpOutcome, Row};
use crate::num::{dot, fmt_rat, rat, rat_of, to_rats, Int, Rat};
use crate::poly::Polyhedron;
use crate::trop::{rational_regions_on, AffineForm, EvalError, Region, TropRational, TropValue};
use crate::Caps;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PwaError {
    #[error("no affine piece is given for maximal cell {0}")]
    MissingPiece(usize),
    #[error("piece refers to cell {0}, which does not exist")]
    NoSuchCell(usize),
    #[error("piece for cell {cell} has {found} slope entries, expected {expected}")]
    Dimension { cell: usize, found: usize, expected: usize },
    #[error("pieces on cells {a} and {b} disagree on their common face {face}")]
    Discontinuous { a: usize, b: usize, face: usize },
    #[error("the functions are defined on different supports")]
    SupportMismatch,
    #[error("the complex is not a refinement of the function's complex")]
    NotARefinement,
    #[error("direction is not in the recession cone of cell {0}")]
    NotInRecessionCone(usize),
    #[error("the function is not defined on all of the requested domain")]
    NotDefined,
    #[error("the function is not concave (no supporting function at cell {0})")]
    NotConcave(usize),
    #[error("the function is not convex (no supporting function at cell {0})")]
    NotConvex(usize),
    #[error("the complex does not cover R^n")]
    NotComplete,
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("no finite scale: along direction {direction:?} F has slope {f_slope} and G has slope {g_slope}")]
    NoFiniteScale { direction: Vec<Int>, f_slope: Rat, g_slope: Rat },
    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A continuous function on `|Σ|` that is integral affine on every cell.
///
/// Every cell carries a form; on lower-dimensional cells it is the restriction of the form
/// of any maximal coface, so only its values on the cell are meaningful.
#[derive(Clone, Debug)]
pub struct FacewiseAffine {
    complex: PolyhedralComplex,
    forms: Vec<AffineForm>,
}

/// Whether `f` and `g` agree as functions on `p`.
pub fn agree_on(f: &AffineForm, g: &AffineForm, p: &Polyhedron) -> bool {
    let Some(v) = p.vrep() else {
        return true;
    };
    v.vertices.iter().all(|x| f.eval(x) == g.eval(x))
        && v.rays.iter().chain(&v.lineality).all(|r| f.slope_along_int(r) == g.slope_along_int(r))
}

/// A point of `p` where `f` and `g` differ, if any.
pub fn disagreement(f: &AffineForm, g: &AffineForm, p: &Polyhedron) -> Option<Vec<Rat>> {
    let v = p.vrep()?;
    if let Some(x) = v.vertices.iter().find(|x| f.eval(x) != g.eval(x)) {
        return Some(x.clone());
    }
    let base = &v.vertices[0];
    v.rays
        .iter()
        .chain(&v.lineality)
        .find(|r| f.slope_along_int(r) != g.slope_along_int(r))
        .map(|r| base.iter().zip(r).map(|(a, b)| a + rat_of(b)).collect())
}

impl FacewiseAffine {
    /// Builds a function from pieces given on (at least) every maximal cell and checks
    /// continuity across shared faces.
    pub fn new(complex: PolyhedralComplex, pieces: &[(usize, AffineForm)]) -> Result<Self, PwaError> {
        let n = complex.dim();
        let mut given: Vec<Option<AffineForm>> = vec![None; complex.len()];
        for (c, f) in pieces {
            if *c >= complex.len() {
                return Err(PwaError::NoSuchCell(*c));
            }
            if f.dim() != n {
                return Err(PwaError::Dimension { cell: *c, found: f.dim(), expected: n });
            }
            given[*c] = Some(f.clone());
        }
        let mut forms: Vec<Option<(AffineForm, usize)>> = vec![None; complex.len()];
        for &m in complex.maximal_cells() {
            let f = given[m].clone().ok_or(PwaError::MissingPiece(m))?;
            for &d in complex.faces_of(m) {
                match &forms[d] {
                    None => forms[d] = Some((f.clone(), m)),
                    Some((g, o)) => {
                        if !agree_on(&f, g, complex.cell(d)) {
                            return Err(PwaError::Discontinuous { a: *o, b: m, face: d });
                        }
                    }
                }
            }
        }
        for (c, g) in given.iter().enumerate() {
            if let (Some(g), Some((f, m))) = (g, &forms[c]) {
                if !agree_on(f, g, complex.cell(c)) {
                    return Err(PwaError::Discontinuous { a: *m, b: c, face: c });
                }
            }
        }
        let forms = forms.into_iter().map(|f| f.unwrap().0).collect();
        Ok(FacewiseAffine { complex, forms })
    }

    /// One form per maximal cell, in the order of `complex.maximal_cells()`.
    pub fn from_maximal(complex: PolyhedralComplex, forms: Vec<AffineForm>) -> Result<Self, PwaError> {
        let pieces: Vec<(usize, AffineForm)> = complex.maximal_cells().iter().copied().zip(forms).collect();
        FacewiseAffine::new(complex, &pieces)
    }

    /// The function given by `f` on every maximal cell.
    pub fn from_fn(complex: PolyhedralComplex, f: impl Fn(&Polyhedron) -> AffineForm) -> Result<Self, PwaError> {
        let forms = complex.maximal_cells().iter().map(|&i| f(complex.cell(i))).collect();
        FacewiseAffine::from_maximal(complex, forms)
    }

    /// A single form on every cell.
    pub fn affine(complex: PolyhedralComplex, f: AffineForm) -> Result<Self, PwaError> {
        FacewiseAffine::from_fn(complex, |_| f.clone())
    }

    pub fn complex(&self) -> &PolyhedralComplex {
        &self.complex
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn form(&self, cell: usize) -> &AffineForm {
        &self.forms[cell]
    }

    /// Forms of the maximal cells, in the order of `maximal_cells()`.
    pub fn maximal_forms(&self) -> Vec<&AffineForm> {
        self.complex.maximal_cells().iter().map(|&i| &self.forms[i]).collect()
    }

    /// `F(u)`, or `None` outside the support.
    pub fn eval(&self, u: &[Rat]) -> Option<Rat> {
        let i = self.complex.maximal_cells().iter().copied().find(|&i| self.complex.cell(i).contains(u))?;
        Some(self.forms[i].eval(u))
    }

    pub fn neg(&self) -> FacewiseAffine {
        FacewiseAffine { complex: self.complex.clone(), forms: self.forms.iter().map(|f| f.neg()).collect() }
    }

    pub fn scale(&self, k: &Int) -> FacewiseAffine {
        FacewiseAffine { complex: self.complex.clone(), forms: self.forms.iter().map(|f| f.scale(k)).collect() }
    }

    /// The same function on a refinement of (part of) its complex.
    pub fn on_complex(&self, complex: PolyhedralComplex) -> Result<FacewiseAffine, PwaError> {
        let mut forms = Vec::with_capacity(complex.maximal_cells().len());
        for &i in complex.maximal_cells() {
            let c = complex.cell(i);
            let host = self
                .complex
                .maximal_cells()
                .iter()
                .copied()
                .find(|&j| self.complex.cell(j).contains_polyhedron(c))
                .ok_or(PwaError::NotARefinement)?;
            forms.push(self.forms[host].clone());
        }
        FacewiseAffine::from_maximal(complex, forms)
    }

    /// The function restricted to the cells cut by `hyperplanes`.
    pub fn refine_by(&self, hyperplanes: &[AffineForm]) -> FacewiseAffine {
        self.on_complex(self.complex.refine_by(hyperplanes)).expect("a refinement")
    }

    /// Checks that both complexes have the same support.
    fn same_support(&self, other: &FacewiseAffine) -> Result<(), PwaError> {
        let covers = |a: &PolyhedralComplex, b: &PolyhedralComplex| {
            b.maximal_cells().iter().all(|&i| a.covers(b.cell(i)))
        };
        if self.dim() != other.dim() || !covers(&self.complex, &other.complex) || !covers(&other.complex, &self.complex)
        {
            return Err(PwaError::SupportMismatch);
        }
        Ok(())
    }

    /// Both functions on the common refinement of their complexes.
    fn aligned(&self, other: &FacewiseAffine) -> Result<(FacewiseAffine, FacewiseAffine), PwaError> {
        self.same_support(other)?;
        let r = self.complex.common_refinement(&other.complex);
        Ok((self.on_complex(r.clone())?, other.on_complex(r)?))
    }
}

/// `F ⊕ G = min(F, G)` on the common refinement, further cut where `F = G`.
pub fn fa_tropical_add(f: &FacewiseAffine, g: &FacewiseAffine) -> Result<FacewiseAffine, PwaError> {
    let (f, g) = f.aligned(g)?;
    let mut walls: BTreeSet<AffineForm> = BTreeSet::new();
    for &i in f.complex.maximal_cells() {
        let h = f.forms[i].sub(&g.forms[i]);
        if f.complex.cell(i).side_of(&h).is_none() {
            walls.insert(h.hyperplane_key().unwrap());
        }
    }
    let walls: Vec<AffineForm> = walls.into_iter().collect();
    let (f, g) = (f.refine_by(&walls), g.refine_by(&walls));
    let forms = f
        .complex
        .maximal_cells()
        .iter()
        .map(|&i| {
            let (a, b) = (&f.forms[i], &g.forms[i]);
            match f.complex.cell(i).side_of(&a.sub(b)) {
                Some(std::cmp::Ordering::Greater) => b.clone(),
                _ => a.clone(),
            }
        })
        .collect();
    FacewiseAffine::from_maximal(f.complex, forms)
}

/// `F ⊙ G = F + G` on the common refinement.
pub fn fa_add(f: &FacewiseAffine, g: &FacewiseAffine) -> Result<FacewiseAffine, PwaError> {
    let (f, g) = f.aligned(g)?;
    let forms = f.complex.maximal_cells().iter().map(|&i| f.forms[i].add(&g.forms[i])).collect();
    FacewiseAffine::from_maximal(f.complex, forms)
}

/// `⟨m_σ, r⟩` for a direction `r` of `rec(σ)`.
pub fn slope_at_infinity(f: &FacewiseAffine, cell: usize, r: &[Int]) -> Result<Int, PwaError> {
    if cell >= f.complex.len() {
        return Err(PwaError::NoSuchCell(cell));
    }
    if !f.complex.cell(cell).recedes_along(&to_rats(r)) {
        return Err(PwaError::NotInRecessionCone(cell));
    }
    Ok(f.forms[cell].slope_along_int(r))
}

/// Two parallel half-lines along which a function has different slopes at infinity.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("slopes {slope_a} on cell {cell_a} and {slope_b} on cell {cell_b} differ along {direction:?}")]
pub struct NotInRat {
    pub cell_a: usize,
    pub cell_b: usize,
    pub direction: Vec<Int>,
    pub slope_a: Int,
    pub slope_b: Int,
}

/// Decides whether `F` has equal slopes at infinity along parallel half-lines. Directions
/// are the generators of pairwise intersections of recession cones of maximal cells.
pub fn rat_membership(f: &FacewiseAffine) -> Result<(), NotInRat> {
    for (r, cells) in f.complex.parallel_directions() {
        let first = cells[0];
        let s0 = f.forms[first].slope_along_int(&r);
        for &c in &cells[1..] {
            let s = f.forms[c].slope_along_int(&r);
            if s != s0 {
                return Err(NotInRat { cell_a: first, cell_b: c, direction: r, slope_a: s0, slope_b: s });
            }
        }
    }
    Ok(())
}

/// Membership for a function on the realization of an abstract complex, with parallelism
/// taken from its recession fan: within each class, slopes along every ray of the class
/// cone must agree. Cells of `f` are indexed like `ac.delta()`.
pub fn rat_membership_abstract(f: &FacewiseAffine, ac: &crate::complex::AbstractComplex) -> Result<(), NotInRat> {
    let delta = ac.delta();
    let pos = |t: usize| delta.iter().position(|&d| d == t).unwrap();
    let n = ac.ambient_dim();
    for class in ac.parallel_classes() {
        for &b in ac.zeta(class.upsilon) {
            let r: Vec<Int> = (0..n).map(|j| if j == b { Int::one() } else { Int::zero() }).collect();
            let first = pos(class.cells[0]);
            let s0 = f.forms[first].slope_along_int(&r);
            for &t in &class.cells[1..] {
                let c = pos(t);
                let s = f.forms[c].slope_along_int(&r);
                if s != s0 {
                    return Err(NotInRat { cell_a: first, cell_b: c, direction: r, slope_a: s0, slope_b: s });
                }
            }
        }
    }
    Ok(())
}

/// A supporting function `L_σ = ⟨m, u⟩ + γ` at a cell: equal to `H` on the cell and
/// exceeded by at least `margin` at generators of cofaces off the cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportingFunction {
    pub cell: usize,
    pub slope: Vec<Rat>,
    pub constant: Rat,
    pub margin: Rat,
}

impl SupportingFunction {
    pub fn eval(&self, u: &[Rat]) -> Rat {
        dot(&self.slope, u) + &self.constant
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityCertificate {
    pub cells: Vec<SupportingFunction>,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cell {cell}: {reason}")]
pub struct ConvexityViolation {
    pub cell: usize,
    pub reason: String,
}

/// Generators of the maximal cofaces of `cell` lying off it, as `(point, is_vertex, form)`.
fn off_generators(h: &FacewiseAffine, cell: usize) -> Vec<(Vec<Rat>, bool, &AffineForm)> {
    let c = &h.complex;
    let sigma = c.cell(cell);
    let mut out = Vec::new();
    for m in c.maximal_cofaces(cell) {
        if m == cell {
            continue;
        }
        let v = c.cell(m).vrep().unwrap();
        for x in &v.vertices {
            if !sigma.contains(x) {
                out.push((x.clone(), true, &h.forms[m]));
            }
        }
        for r in &v.rays {
            let r = to_rats(r);
            if !sigma.recedes_along(&r) {
                out.push((r, false, &h.forms[m]));
            }
        }
    }
    out
}

/// Finds, for every cell, an affine function agreeing with `H` on the cell and lying
/// below `H` on its star, by maximizing the excess margin with an exact LP.
pub fn convexity_check(h: &FacewiseAffine, strict: bool) -> Result<ConvexityCertificate, ConvexityViolation> {
    let n = h.dim();
    let nv = n + 2;
    let mut cells = Vec::with_capacity(h.complex.len());
    for i in 0..h.complex.len() {
        let v = h.complex.cell(i).vrep().unwrap();
        let f = &h.forms[i];
        let mut eq = Vec::new();
        for x in &v.vertices {
            let mut a = x.clone();
            a.extend([Rat::one(), Rat::zero()]);
            eq.push(Row::new(a, f.eval(x)));
        }
        for r in v.rays.iter().chain(&v.lineality) {
            let mut a = to_rats(r);
            a.extend([Rat::zero(), Rat::zero()]);
            eq.push(Row::new(a, rat_of(&f.slope_along_int(r))));
        }
        let mut le = Vec::new();
        for (x, is_vertex, g) in off_generators(h, i) {
            let mut a = x.clone();
            if is_vertex {
                a.extend([Rat::one(), Rat::one()]);
                le.push(Row::new(a, g.eval(&x)));
            } else {
                a.extend([Rat::zero(), Rat::one()]);
                le.push(Row::new(a, g.slope_along(&x)));
            }
        }
        let mut cap = vec![Rat::zero(); nv];
        cap[n + 1] = Rat::one();
        le.push(Row::new(cap.clone(), Rat::one()));
        match maximize(nv, &cap, &le, &eq) {
            LpOutcome::Optimal { x, value } => {
                if value.is_negative() {
                    return Err(ConvexityViolation {
                        cell: i,
                        reason: format!("best supporting function falls short by {}", fmt_rat(&-value)),
                    });
                }
                if strict && value.is_zero() {
                    return Err(ConvexityViolation { cell: i, reason: "not strictly convex".into() });
                }
                cells.push(SupportingFunction {
                    cell: i,
                    slope: x[..n].to_vec(),
                    constant: x[n].clone(),
                    margin: value,
                });
            }
            _ => return Err(ConvexityViolation { cell: i, reason: "no affine function agrees with H on the cell".into() }),
        }
    }
    let strict = cells.iter().all(|c| c.margin.is_positive());
    Ok(ConvexityCertificate { cells, strict })
}

impl ConvexityCertificate {
    /// Re-checks every supporting function by direct evaluation.
    pub fn verify(&self, h: &FacewiseAffine) -> bool {
        if self.cells.len() != h.complex.len() {
            return false;
        }
        self.cells.iter().enumerate().all(|(i, s)| {
            let v = h.complex.cell(i).vrep().unwrap();
            let f = &h.forms[i];
            let on_cell = v.vertices.iter().all(|x| s.eval(x) == f.eval(x))
                && v.rays.iter().chain(&v.lineality).all(|r| {
                    let r = to_rats(r);
                    dot(&s.slope, &r) == f.slope_along(&r)
                });
            let off = off_generators(h, i).into_iter().all(|(x, is_vertex, g)| {
                let gap = if is_vertex { g.eval(&x) - s.eval(&x) } else { g.slope_along(&x) - dot(&s.slope, &x) };
                gap >= s.margin && !gap.is_negative() && (!self.strict || gap.is_positive())
            });
            s.cell == i && on_cell && off
        })
    }
}

/// A minimal scale for which `N·F − G` is positive off the inner set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominatingScale {
    pub n: Int,
    /// A point of `Θ ∖ Θ'` where `(N−1)·F − G ≤ 0`, when `N − 1` fails for a reason
    /// other than the floor `N ≥ 1`.
    pub witness: Option<Vec<Rat>>,
}

enum Bound {
    /// `N > q`.
    Strict(Rat),
    /// `N ≥ q`.
    Weak(Rat),
}

impl Bound {
    fn min_int(&self) -> Int {
        match self {
            Bound::Strict(q) => q.floor().to_integer() + Int::one(),
            Bound::Weak(q) => q.ceil().to_integer(),
        }
    }
}

/// The least positive integer `N` with `N·F − G > 0` on `Θ ∖ Θ'`, for concave `F ≥ 0` on
/// `Θ` vanishing exactly on `Θ'` and affine `G` vanishing on `Θ'`.
///
/// Along a ray where `F` has slope zero, `G` may have any slope `≤ 0`; a positive slope
/// leaves no finite scale.
pub fn dominating_scale(
    f: &FacewiseAffine,
    g: &AffineForm,
    inner: &Polyhedron,
    outer: &Polyhedron,
) -> Result<DominatingScale, PwaError> {
    if !f.complex.covers(outer) {
        return Err(PwaError::NotDefined);
    }
    if !outer.contains_polyhedron(inner) {
        return Err(PwaError::Hypothesis("Θ' is not contained in Θ".into()));
    }
    if let Err(v) = convexity_check(&f.neg(), false) {
        return Err(PwaError::NotConcave(v.cell));
    }
    if !agree_on(g, &AffineForm::zero(f.dim()), inner) {
        return Err(PwaError::Hypothesis("G does not vanish on Θ'".into()));
    }
    let mut bounds: Vec<(Bound, Vec<Rat>, Option<(Vec<Rat>, Vec<Rat>, Rat)>)> = Vec::new();
    for &s in f.complex.maximal_cells() {
        let fs = &f.forms[s];
        if !agree_on(fs, &AffineForm::zero(f.dim()), &f.complex.cell(s).intersect(inner)) {
            return Err(PwaError::Hypothesis("F does not vanish on Θ'".into()));
        }
        let c = f.complex.cell(s).intersect(outer);
        let Some(v) = c.vrep() else {
            continue;
        };
        let negative = v.vertices.iter().any(|x| fs.eval(x).is_negative())
            || v.rays.iter().any(|r| fs.slope_along_int(r).is_negative())
            || v.lineality.iter().any(|r| !fs.slope_along_int(r).is_zero());
        if negative {
            return Err(PwaError::Hypothesis("F takes negative values on Θ".into()));
        }
        let zero = if fs.is_constant() {
            if fs.constant.is_zero() {
                c.clone()
            } else {
                Polyhedron::empty(f.dim())
            }
        } else {
            c.with_constraints(&[], std::slice::from_ref(fs))
        };
        if !inner.contains_polyhedron(&zero) {
            return Err(PwaError::Hypothesis("F vanishes at points of Θ outside Θ'".into()));
        }
        for l in &v.lineality {
            let sg = g.slope_along_int(l);
            if !sg.is_zero() {
                return Err(PwaError::NoFiniteScale { direction: l.clone(), f_slope: Rat::zero(), g_slope: rat_of(&sg) });
            }
        }
        for x in &v.vertices {
            let fx = fs.eval(x);
            if fx.is_positive() {
                bounds.push((Bound::Strict(g.eval(x) / &fx), x.clone(), None));
            }
        }
        let z = zero.vrep().map(|z| z.vertices[0].clone());
        for r in &v.rays {
            let (sf, sg) = (rat_of(&fs.slope_along_int(r)), rat_of(&g.slope_along_int(r)));
            if sf.is_zero() {
                if sg.is_positive() {
                    return Err(PwaError::NoFiniteScale { direction: r.clone(), f_slope: sf, g_slope: sg });
                }
                continue;
            }
            let q = sg / &sf;
            match &z {
                Some(z) => {
                    let p = z.iter().zip(r).map(|(a, b)| a + rat_of(b)).collect();
                    bounds.push((Bound::Strict(q), p, None));
                }
                None => {
                    let w = v.vertices[0].clone();
                    bounds.push((Bound::Weak(q), w.clone(), Some((w, to_rats(r), sf))));
                }
            }
        }
    }
    let mut n = Int::one();
    let mut binding = None;
    for (b, p, ray) in &bounds {
        let k = b.min_int();
        if k >= n {
            n = k;
            binding = Some((p, ray));
        }
    }
    let witness = binding.map(|(p, ray)| {
        let m = rat_of(&(&n - Int::one()));
        let phi = |u: &[Rat]| &m * f.eval(u).unwrap() - g.eval(u);
        match ray {
            None => p.clone(),
            Some((v, r, sf)) => {
                let s = &m * sf - g.slope_along(r);
                let t = (phi(v) / -s).ceil().max(Rat::one());
                v.iter().zip(r).map(|(a, b)| a + &t * b).collect()
            }
        }
    });
    Ok(DominatingScale { n, witness })
}

fn add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// For convex `H` on a complete complex, the forms `L_σ` of the maximal cells, whose
/// pointwise maximum is `H`.
pub fn max_affine_representation(h: &FacewiseAffine) -> Result<Vec<AffineForm>, PwaError> {
    if !h.complex.covers(&Polyhedron::universe(h.dim())) {
        return Err(PwaError::NotComplete);
    }
    convexity_check(h, false).map_err(|v| PwaError::NotConvex(v.cell))?;
    let forms: Vec<AffineForm> =
        h.maximal_forms().into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    for i in 0..h.complex.len() {
        let v = h.complex.cell(i).vrep().unwrap();
        let mut probes = v.vertices.clone();
        probes.push(v.interior_point());
        for r in &v.rays {
            probes.push(add(&v.vertices[0], &to_rats(r)));
        }
        for u in probes {
            let top = forms.iter().map(|f| f.eval(&u)).max().unwrap();
            assert_eq!(top, h.forms[i].eval(&u), "maximum of supporting forms differs from H");
        }
    }
    Ok(forms)
}

/// Either kind of function accepted by [`equal_on`].
#[derive(Clone, Copy, Debug)]
pub enum Func<'a> {
    Expr(&'a TropRational),
    Facewise(&'a FacewiseAffine),
}

impl Func<'_> {
    pub fn eval(&self, u: &[Rat]) -> Result<TropValue, PwaError> {
        match self {
            Func::Expr(e) => Ok(e.eval(u)?),
            Func::Facewise(f) => f.eval(u).map(TropValue::Finite).ok_or(PwaError::NotDefined),
        }
    }

    /// Pieces of full relative dimension covering `domain`.
    pub fn regions_on(&self, domain: &Polyhedron) -> Result<Vec<Region>, PwaError> {
        match self {
            Func::Expr(e) => Ok(rational_regions_on(e, domain)?),
            Func::Facewise(f) => {
                if !f.complex.covers(domain) {
                    return Err(PwaError::NotDefined);
                }
                let d = domain.affine_dim();
                Ok(f.complex
                    .maximal_cells()
                    .iter()
                    .filter_map(|&i| {
                        let x = f.complex.cell(i).intersect(domain);
                        (x.affine_dim().is_some() && x.affine_dim() == d)
                            .then(|| Region { cell: x, form: Some(f.forms[i].clone()) })
                    })
                    .collect())
            }
        }
    }
}

/// Outcome of an exact equality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Differ { point: Vec<Rat>, left: TropValue, right: TropValue },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

/// Decides whether two functions agree on `|W|`, comparing affine forms on the common
/// linearity pieces inside each maximal cell of `W`.
pub fn equal_on(w: &PolyhedralComplex, a: Func<'_>, b: Func<'_>, caps: &Caps) -> Result<Comparison, PwaError> {
    if w.dim() > caps.max_dim {
        return Err(PwaError::DimensionCap { dim: w.dim(), cap: caps.max_dim });
    }
    for &i in w.maximal_cells() {
        for r in a.regions_on(w.cell(i))? {
            for s in b.regions_on(&r.cell)? {
                let point = match (&r.form, &s.form) {
                    (None, None) => None,
                    (Some(f), Some(g)) => disagreement(f, g, &s.cell),
                    _ => Some(relint_point(&s.cell)),
                };
                if let Some(point) = point {
                    let (left, right) = (a.eval(&point)?, b.eval(&point)?);
                    return Ok(Comparison::Differ { point, left, right });
                }
            }
        }
    }
    Ok(Comparison::Equal)
}

/// Midpoint convexity `H((u+v)/2) ≤ (H(u)+H(v))/2` on one segment, for use as an oracle.
pub fn midpoint_convex(h: &FacewiseAffine, u: &[Rat], v: &[Rat]) -> Option<bool> {
    let mid: Vec<Rat> = u.iter().zip(v).map(|(a, b)| (a + b) / rat(2)).collect();
    Some(h.eval(&mid)? * rat(2) <= h.eval(u)? + h.eval(v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};
    use crate::trop::parse_rational;

    fn aff(s: &[i64], c: i64) -> AffineForm {
        AffineForm::from_ints(s, rat(c))
    }

    fn line_split(at: i64) -> PolyhedralComplex {
        let left = Polyhedron::new(1, vec![aff(&[-1], at)], vec![]);
        let right = Polyhedron::new(1, vec![aff(&[1], -at)], vec![]);
        PolyhedralComplex::new(1, vec![left, right], true).unwrap()
    }

    fn line() -> PolyhedralComplex {
        PolyhedralComplex::new(1, vec![Polyhedron::universe(1)], true).unwrap()
    }

    fn interval(a: i64, b: Option<i64>) -> Polyhedron {
        let mut ins = vec![aff(&[1], -a)];
        if let Some(b) = b {
            ins.push(aff(&[-1], b));
        }
        Polyhedron::new(1, ins, vec![])
    }

    fn abs_x() -> FacewiseAffine {
        FacewiseAffine::from_fn(line_split(0), |c| if c.contains(&[rat(1)]) { aff(&[1], 0) } else { aff(&[-1], 0) })
            .unwrap()
    }

    #[test]
    fn discontinuity_is_rejected() {
        let e = FacewiseAffine::from_maximal(line_split(0), vec![aff(&[0], 1), aff(&[0], 0)]).unwrap_err();
        assert!(matches!(e, PwaError::Discontinuous { .. }));
    }

    #[test]
    fn min_of_x_and_zero() {
        let f = FacewiseAffine::affine(line(), aff(&[1], 0)).unwrap();
        let g = FacewiseAffine::affine(line(), aff(&[0], 0)).unwrap();
        let m = fa_tropical_add(&f, &g).unwrap();
        assert_eq!(m.complex().maximal_cells().len(), 2);
        assert_eq!(m.eval(&[rat(3)]), Some(rat(0)));
        assert_eq!(m.eval(&[rat(-3)]), Some(rat(-3)));
        let z = fa_tropical_add(&g, &g).unwrap();
        assert_eq!(z.complex().maximal_cells().len(), 1);
    }

    #[test]
    fn min_on_square_splits_on_diagonal() {
        let sq = Polyhedron::new(2, vec![aff(&[1, 0], 0), aff(&[-1, 0], 1), aff(&[0, 1], 0), aff(&[0, -1], 1)], vec![]);
        let c = PolyhedralComplex::new(2, vec![sq], true).unwrap();
        let f = FacewiseAffine::affine(c.clone(), aff(&[1, 0], 0)).unwrap();
        let g = FacewiseAffine::affine(c, aff(&[0, 1], 0)).unwrap();
        let m = fa_tropical_add(&f, &g).unwrap();
        assert_eq!(m.complex().maximal_cells().len(), 2);
        assert_eq!(m.complex().f_vector(), vec![4, 5, 2]);
    }

    #[test]
    fn slopes_at_infinity() {
        let c = PolyhedralComplex::new(1, vec![interval(1, None)], true).unwrap();
        let f = FacewiseAffine::affine(c, aff(&[2], -2)).unwrap();
        assert_eq!(slope_at_infinity(&f, 0, &[int(1)]).unwrap(), int(2));
        assert!(slope_at_infinity(&f, 0, &[int(-1)]).is_err());
        let cone = Polyhedron::from_generators(2, vec![vec![rat(0), rat(0)]], vec![vec![int(1), int(1)]], vec![]);
        let g = FacewiseAffine::affine(PolyhedralComplex::new(2, vec![cone], true).unwrap(), aff(&[3, -1], 0)).unwrap();
        assert_eq!(slope_at_infinity(&g, 0, &[int(1), int(1)]).unwrap(), int(2));
    }

    #[test]
    fn vertical_rays_with_different_slopes() {
        let ray = |x: i64| Polyhedron::from_generators(2, vec![vec![rat(x), rat(0)]], vec![vec![int(0), int(1)]], vec![]);
        let c = PolyhedralComplex::new(2, vec![ray(0), ray(2)], true).unwrap();
        let f = FacewiseAffine::from_fn(c, |p| if p.contains(&[rat(0), rat(0)]) { aff(&[0, 1], 0) } else { aff(&[0, 2], 0) })
            .unwrap();
        let w = rat_membership(&f).unwrap_err();
        assert_eq!(w.direction, vec![int(0), int(1)]);
        let mut s = [w.slope_a, w.slope_b];
        s.sort();
        assert_eq!(s, [int(1), int(2)]);
    }

    #[test]
    fn half_strips_with_matching_slopes() {
        let a = Polyhedron::new(2, vec![aff(&[1, 0], 0), aff(&[-1, 0], 1), aff(&[0, 1], 0)], vec![]);
        let b = Polyhedron::new(2, vec![aff(&[1, 0], 1), aff(&[-1, 0], 0), aff(&[0, 1], 0)], vec![]);
        let c = PolyhedralComplex::new(2, vec![a, b], true).unwrap();
        let f = FacewiseAffine::from_fn(c, |p| if p.contains(&[rat(1), rat(0)]) { aff(&[0, 1], 0) } else { aff(&[1, 1], 0) })
            .unwrap();
        assert!(rat_membership(&f).is_ok());
    }

    #[test]
    fn convexity_of_absolute_value() {
        let cert = convexity_check(&abs_x(), true).unwrap();
        assert!(cert.strict);
        assert!(cert.verify(&abs_x()));
        let origin = abs_x().complex().index_of(&Polyhedron::point(&[rat(0)])).unwrap();
        assert!(cert.cells[origin].slope[0].abs() < rat(1));
        let e = convexity_check(&abs_x().neg(), false).unwrap_err();
        assert_eq!(e.cell, origin);
    }

    #[test]
    fn bend_at_one_is_strict() {
        let h = FacewiseAffine::from_fn(line_split(1), |c| if c.contains(&[rat(2)]) { aff(&[2], -1) } else { aff(&[1], 0) })
            .unwrap();
        assert!(convexity_check(&h, true).unwrap().strict);
    }

    #[test]
    fn scale_examples() {
        let c = PolyhedralComplex::new(1, vec![interval(0, None)], true).unwrap();
        let f = FacewiseAffine::affine(c, aff(&[1], 0)).unwrap();
        let theta = interval(0, None);
        let origin = Polyhedron::point(&[rat(0)]);
        let s = dominating_scale(&f, &aff(&[5], 0), &origin, &theta).unwrap();
        assert_eq!(s.n, int(6));
        let w = s.witness.unwrap();
        assert!(rat(5) * f.eval(&w).unwrap() - rat(5) * &w[0] <= rat(0) && w[0].is_positive());

        let c2 = PolyhedralComplex::new(1, vec![interval(0, Some(1)), interval(1, None)], true).unwrap();
        let fm = FacewiseAffine::from_fn(c2, |p| if p.contains(&[ratio(1, 2)]) { aff(&[1], 0) } else { aff(&[0], 1) })
            .unwrap();
        assert_eq!(dominating_scale(&fm, &aff(&[-2], 0), &origin, &theta).unwrap().n, int(1));
        assert!(matches!(
            dominating_scale(&fm, &aff(&[1], 0), &origin, &theta),
            Err(PwaError::NoFiniteScale { .. })
        ));
    }

    #[test]
    fn max_affine_of_absolute_values() {
        let quadrants: Vec<Polyhedron> = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .iter()
            .map(|&(a, b)| Polyhedron::new(2, vec![aff(&[a, 0], 0), aff(&[0, b], 0)], vec![]))
            .collect();
        let c = PolyhedralComplex::new(2, quadrants, true).unwrap();
        let h = FacewiseAffine::from_fn(c, |p| {
            let u = relint_point(p);
            aff(&[if u[0].is_positive() { 1 } else { -1 }, if u[1].is_positive() { 1 } else { -1 }], 0)
        })
        .unwrap();
        assert_eq!(max_affine_representation(&h).unwrap().len(), 4);
        assert_eq!(max_affine_representation(&abs_x()).unwrap().len(), 2);
        let a = FacewiseAffine::affine(line(), aff(&[3], 1)).unwrap();
        assert_eq!(max_affine_representation(&a).unwrap(), vec![aff(&[3], 1)]);
    }

    #[test]
    fn kernel_oracle_examples() {
        let caps = Caps::default();
        let e1 = parse_rational("min(2*x1, 0) - min(x1, 0)", 1).unwrap();
        let e2 = parse_rational("min(x1, 0)", 1).unwrap();
        assert!(equal_on(&line(), Func::Expr(&e1), Func::Expr(&e2), &caps).unwrap().is_equal());
        let x = parse_rational("x1", 1).unwrap();
        match equal_on(&line(), Func::Expr(&x), Func::Expr(&e2), &caps).unwrap() {
            Comparison::Differ { point, .. } => assert!(point[0].is_positive()),
            Comparison::Equal => panic!("x and min(x, 0) differ"),
        }
        let neg = PolyhedralComplex::new(1, vec![Polyhedron::new(1, vec![aff(&[-1], 0)], vec![])], true).unwrap();
        assert!(equal_on(&neg, Func::Expr(&x), Func::Expr(&e2), &caps).unwrap().is_equal());
        assert!(equal_on(&line(), Func::Facewise(&abs_x()), Func::Expr(&parse_rational("0 - min(x1, -x1)", 1).unwrap()), &caps)
            .unwrap()
            .is_equal());
    }
}
