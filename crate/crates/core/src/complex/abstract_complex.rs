//! Abstract polyhedral complexes with a recession fan, realized by extended simplices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::num::{Bits, Int, Rat};
use crate::poly::Polyhedron;

use super::PolyhedralComplex;

/// Serialized form: labels of finite vertices and rays, and poset elements given by their
/// ζ-sets and lower covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractInput {
    #[serde(rename = "V_f")]
    pub v_f: Vec<String>,
    #[serde(rename = "V_inf", default)]
    pub v_inf: Vec<String>,
    pub elements: Vec<ElementInput>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementInput {
    pub id: String,
    pub zeta: Vec<String>,
    #[serde(default)]
    pub covers: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AbstractError {
    #[error("the vertex set V_f is empty")]
    NoFiniteVertices,
    #[error("label `{0}` is used twice")]
    DuplicateLabel(String),
    #[error("element id `{0}` is used twice")]
    DuplicateId(String),
    #[error("element `{element}` refers to unknown {what} `{name}`")]
    Unknown { element: String, what: &'static str, name: String },
    #[error("the cover relation has a cycle through `{0}`")]
    Cycle(String),
    #[error("property (1) fails: {0}")]
    Property1(String),
    #[error("property (2) fails: {0}")]
    Property2(String),
    #[error("property (3) fails at `{element}`: {reason}")]
    Property3 { element: String, reason: String },
    #[error("elements `{0}` and `{1}` have the same ζ-set and cannot both be realized in R^(V_f ∪ V_inf)")]
    NotEmbeddable(String, String),
}

/// A validated delta-complex `(Π, ζ, ⪯)` over `V_f ∪ V_∞`.
///
/// Vertex labels are indexed `0..|V_f|` followed by the rays. Elements keep their input
/// order.
#[derive(Clone, Debug)]
pub struct AbstractComplex {
    v_f: Vec<String>,
    v_inf: Vec<String>,
    ids: Vec<String>,
    zeta: Vec<Vec<usize>>,
    covers: Vec<Vec<usize>>,
    below: Vec<Bits>,
    bottom: usize,
}

/// Directions supported on `ζ(upsilon)` are identified across all `cells`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelClassAbstract {
    pub upsilon: usize,
    pub cells: Vec<usize>,
}

impl AbstractComplex {
    pub fn new(input: &AbstractInput) -> Result<AbstractComplex, AbstractError> {
        if input.v_f.is_empty() {
            return Err(AbstractError::NoFiniteVertices);
        }
        let mut labels: HashMap<&str, usize> = HashMap::new();
        for (i, l) in input.v_f.iter().chain(&input.v_inf).enumerate() {
            if labels.insert(l.as_str(), i).is_some() {
                return Err(AbstractError::DuplicateLabel(l.clone()));
            }
        }
        let mut by_id: HashMap<&str, usize> = HashMap::new();
        for (i, e) in input.elements.iter().enumerate() {
            if by_id.insert(e.id.as_str(), i).is_some() {
                return Err(AbstractError::DuplicateId(e.id.clone()));
            }
        }
        let mut zeta = Vec::new();
        let mut covers = Vec::new();
        for e in &input.elements {
            let mut z = Vec::new();
            for x in &e.zeta {
                let &k = labels.get(x.as_str()).ok_or_else(|| AbstractError::Unknown {
                    element: e.id.clone(),
                    what: "label",
                    name: x.clone(),
                })?;
                z.push(k);
            }
            z.sort_unstable();
            z.dedup();
            zeta.push(z);
            let mut c = Vec::new();
            for x in &e.covers {
                let &k = by_id.get(x.as_str()).ok_or_else(|| AbstractError::Unknown {
                    element: e.id.clone(),
                    what: "element",
                    name: x.clone(),
                })?;
                c.push(k);
            }
            covers.push(c);
        }
        let n = input.elements.len();
        let below = down_sets(&covers, n).map_err(|i| AbstractError::Cycle(input.elements[i].id.clone()))?;
        let ac = AbstractComplex {
            v_f: input.v_f.clone(),
            v_inf: input.v_inf.clone(),
            ids: input.elements.iter().map(|e| e.id.clone()).collect(),
            zeta,
            covers,
            below,
            bottom: 0,
        };
        ac.validated()
    }

    fn validated(mut self) -> Result<AbstractComplex, AbstractError> {
        let n = self.ids.len();
        // (1)
        let bottom = (0..n).find(|&b| (0..n).all(|i| self.below[i].get(b)));
        let Some(bottom) = bottom else {
            return Err(AbstractError::Property1("no minimum element".into()));
        };
        if !self.zeta[bottom].is_empty() {
            return Err(AbstractError::Property1(format!("ζ({}) is not empty", self.ids[bottom])));
        }
        self.bottom = bottom;
        // (2)
        let nl = self.v_f.len() + self.v_inf.len();
        let mut singles = vec![Vec::new(); nl];
        for (i, z) in self.zeta.iter().enumerate() {
            if z.len() == 1 {
                singles[z[0]].push(i);
            }
        }
        for (x, s) in singles.iter().enumerate() {
            match s.len() {
                1 => {}
                0 => return Err(AbstractError::Property2(format!("no element has ζ = {{{}}}", self.label(x)))),
                _ => {
                    return Err(AbstractError::Property2(format!(
                        "elements `{}` and `{}` both have ζ = {{{}}}",
                        self.ids[s[0]],
                        self.ids[s[1]],
                        self.label(x)
                    )))
                }
            }
        }
        // (3)
        for t in 0..n {
            let zt = &self.zeta[t];
            let fail = |reason: String| AbstractError::Property3 { element: self.ids[t].clone(), reason };
            let interval: Vec<usize> = self.below[t].ones().collect();
            let mut seen: BTreeMap<&[usize], usize> = BTreeMap::new();
            for &e in &interval {
                if !is_subset(&self.zeta[e], zt) {
                    return Err(fail(format!("ζ({}) is not contained in ζ({})", self.ids[e], self.ids[t])));
                }
                if let Some(&o) = seen.get(self.zeta[e].as_slice()) {
                    return Err(fail(format!("`{}` and `{}` have the same ζ-set", self.ids[o], self.ids[e])));
                }
                seen.insert(&self.zeta[e], e);
            }
            if zt.len() >= usize::BITS as usize - 1 || interval.len() != 1usize << zt.len() {
                return Err(fail(format!(
                    "the interval has {} elements but ζ has {} subsets",
                    interval.len(),
                    1u128 << zt.len().min(127)
                )));
            }
            for &a in &interval {
                for &b in &interval {
                    let le = self.below[b].get(a);
                    if le != is_subset(&self.zeta[a], &self.zeta[b]) {
                        return Err(fail(format!(
                            "order between `{}` and `{}` does not match inclusion",
                            self.ids[a], self.ids[b]
                        )));
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn num_finite(&self) -> usize {
        self.v_f.len()
    }

    pub fn num_rays(&self) -> usize {
        self.v_inf.len()
    }

    /// Dimension of the ambient space `R^(V_f ∪ V_∞)`.
    pub fn ambient_dim(&self) -> usize {
        self.v_f.len() + self.v_inf.len()
    }

    pub fn label(&self, x: usize) -> &str {
        if x < self.v_f.len() {
            &self.v_f[x]
        } else {
            &self.v_inf[x - self.v_f.len()]
        }
    }

    pub fn finite_labels(&self) -> &[String] {
        &self.v_f
    }

    pub fn ray_labels(&self) -> &[String] {
        &self.v_inf
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn zeta(&self, i: usize) -> &[usize] {
        &self.zeta[i]
    }

    pub fn covers(&self, i: usize) -> &[usize] {
        &self.covers[i]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// `a ⪯ b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b].get(a)
    }

    /// The interval `[0̂, t]`.
    pub fn interval(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.below[t].ones()
    }

    /// `A = ζ(t) ∩ V_f`.
    pub fn finite_part(&self, t: usize) -> Vec<usize> {
        self.zeta[t].iter().copied().filter(|&x| x < self.v_f.len()).collect()
    }

    /// `B = ζ(t) ∩ V_∞`, as label indices.
    pub fn ray_part(&self, t: usize) -> Vec<usize> {
        self.zeta[t].iter().copied().filter(|&x| x >= self.v_f.len()).collect()
    }

    /// Elements meeting `V_f`.
    pub fn delta(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.zeta[i].iter().any(|&x| x < self.v_f.len())).collect()
    }

    /// The recession fan: elements with ζ inside `V_∞`, including `0̂`.
    pub fn upsilon(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.zeta[i].iter().all(|&x| x >= self.v_f.len())).collect()
    }

    /// The unique element of `[0̂, t]` whose ζ-set is `set`.
    pub fn element_below(&self, t: usize, set: &[usize]) -> Option<usize> {
        self.interval(t).find(|&e| self.zeta[e] == set)
    }

    /// The polyhedron `Θ_ζ(t) = σ^A × R^B_{≥0}`.
    pub fn theta(&self, t: usize) -> Polyhedron {
        let n = self.ambient_dim();
        let unit = |x: usize| -> Vec<Int> { (0..n).map(|j| if j == x { Int::one() } else { Int::zero() }).collect() };
        let vertices: Vec<Vec<Rat>> =
            self.finite_part(t).iter().map(|&a| unit(a).into_iter().map(Rat::from_integer).collect()).collect();
        let rays = self.ray_part(t).iter().map(|&b| unit(b)).collect();
        Polyhedron::from_extreme_generators(n, vertices, rays, vec![])
    }

    /// Realizes `Δ` by extended simplices in `R^(V_f ∪ V_∞)`. Cells are listed in the order
    /// of [`AbstractComplex::delta`].
    pub fn realize(&self) -> Result<PolyhedralComplex, AbstractError> {
        let delta = self.delta();
        let mut by_zeta: BTreeMap<&[usize], usize> = BTreeMap::new();
        for &t in &delta {
            if let Some(&o) = by_zeta.get(self.zeta[t].as_slice()) {
                return Err(AbstractError::NotEmbeddable(self.ids[o].clone(), self.ids[t].clone()));
            }
            by_zeta.insert(&self.zeta[t], t);
        }
        let pos: HashMap<usize, usize> = delta.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let cells = delta.iter().map(|&t| self.theta(t)).collect();
        let faces = delta.iter().map(|&t| self.interval(t).filter_map(|e| pos.get(&e).copied()).collect()).collect();
        Ok(PolyhedralComplex::from_parts(self.ambient_dim(), cells, faces))
    }

    /// Realizes the recession fan `Υ` as cones `R^B_{≥0}`; fails when two cones of `Υ` share
    /// their ray set (a multifan).
    pub fn realize_fan(&self) -> Result<PolyhedralComplex, AbstractError> {
        let ups = self.upsilon();
        let n = self.ambient_dim();
        let mut by_zeta: BTreeMap<&[usize], usize> = BTreeMap::new();
        for &t in &ups {
            if let Some(&o) = by_zeta.get(self.zeta[t].as_slice()) {
                return Err(AbstractError::NotEmbeddable(self.ids[o].clone(), self.ids[t].clone()));
            }
            by_zeta.insert(&self.zeta[t], t);
        }
        let pos: HashMap<usize, usize> = ups.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let cells = ups
            .iter()
            .map(|&t| {
                let rays = self.zeta[t]
                    .iter()
                    .map(|&b| (0..n).map(|j| if j == b { Int::one() } else { Int::zero() }).collect())
                    .collect();
                Polyhedron::from_extreme_generators(n, vec![vec![Rat::zero(); n]], rays, vec![])
            })
            .collect();
        let faces = ups.iter().map(|&t| self.interval(t).filter_map(|e| pos.get(&e).copied()).collect()).collect();
        Ok(PolyhedralComplex::from_parts(n, cells, faces))
    }

    /// For each nonzero cone `υ` of `Υ`, the cells of `Δ` whose interval contains it. Two
    /// half-lines are parallel exactly when they lie in one class and have the same
    /// direction in `R^ζ(υ)`; cones with equal ray sets stay distinct.
    pub fn parallel_classes(&self) -> Vec<ParallelClassAbstract> {
        let delta = self.delta();
        self.upsilon()
            .into_iter()
            .filter(|&u| u != self.bottom)
            .map(|u| ParallelClassAbstract { upsilon: u, cells: delta.iter().copied().filter(|&t| self.leq(u, t)).collect() })
            .collect()
    }

    /// The serialized form.
    pub fn to_input(&self) -> AbstractInput {
        AbstractInput {
            v_f: self.v_f.clone(),
            v_inf: self.v_inf.clone(),
            elements: (0..self.len())
                .map(|i| ElementInput {
                    id: self.ids[i].clone(),
                    zeta: self.zeta[i].iter().map(|&x| self.label(x).to_string()).collect(),
                    covers: self.covers[i].iter().map(|&c| self.ids[c].clone()).collect(),
                })
                .collect(),
        }
    }

    /// The complex of all faces of the given simplices, where each facet is a set of
    /// labels (finite vertices and rays). Elements are named by their sorted labels joined
    /// with `+`, and `0` for the minimum.
    pub fn from_facets(v_f: &[&str], v_inf: &[&str], facets: &[Vec<&str>]) -> Result<AbstractComplex, AbstractError> {
        let labels: Vec<String> = v_f.iter().chain(v_inf).map(|s| s.to_string()).collect();
        let pos: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in facets {
            let mut idx: Vec<usize> = Vec::new();
            for x in f {
                let &k = pos.get(x).ok_or_else(|| AbstractError::Unknown {
                    element: f.join("+"),
                    what: "label",
                    name: x.to_string(),
                })?;
                idx.push(k);
            }
            idx.sort_unstable();
            idx.dedup();
            for mask in 0u32..(1 << idx.len()) {
                sets.insert(idx.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &x)| x).collect());
            }
        }
        for k in 0..labels.len() {
            sets.insert(vec![k]);
        }
        sets.insert(vec![]);
        let mut sets: Vec<Vec<usize>> = sets.into_iter().collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let name = |s: &[usize]| -> String {
            if s.is_empty() {
                "0".into()
            } else {
                s.iter().map(|&x| labels[x].as_str()).collect::<Vec<_>>().join("+")
            }
        };
        let members: BTreeSet<&Vec<usize>> = sets.iter().collect();
        let elements = sets
            .iter()
            .map(|s| ElementInput {
                id: name(s),
                zeta: s.iter().map(|&x| labels[x].clone()).collect(),
                covers: (0..s.len())
                    .map(|drop| s.iter().enumerate().filter(|(b, _)| *b != drop).map(|(_, &x)| x).collect::<Vec<_>>())
                    .filter(|c| members.contains(c))
                    .map(|c| name(&c))
                    .collect(),
            })
            .collect();
        AbstractComplex::new(&AbstractInput {
            v_f: v_f.iter().map(|s| s.to_string()).collect(),
            v_inf: v_inf.iter().map(|s| s.to_string()).collect(),
            elements,
        })
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Reflexive-transitive closure of the cover relation; `Err(i)` names an element on a cycle.
fn down_sets(covers: &[Vec<usize>], n: usize) -> Result<Vec<Bits>, usize> {
    // 0 = unvisited, 1 = in progress, 2 = done.
    let mut state = vec![0u8; n];
    let mut below: Vec<Option<Bits>> = vec![None; n];
    fn visit(i: usize, covers: &[Vec<usize>], state: &mut [u8], below: &mut [Option<Bits>], n: usize) -> Result<(), usize> {
        match state[i] {
            2 => return Ok(()),
            1 => return Err(i),
            _ => {}
        }
        state[i] = 1;
        let mut b = Bits::new(n);
        b.set(i);
        for &c in &covers[i] {
            visit(c, covers, state, below, n)?;
            for k in below[c].as_ref().unwrap().ones() {
                b.set(k);
            }
        }
        below[i] = Some(b);
        state[i] = 2;
        Ok(())
    }
    for i in 0..n {
        visit(i, covers, &mut state, &mut below, n)?;
    }
    Ok(below.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn el(id: &str, zeta: &[&str], covers: &[&str]) -> ElementInput {
        ElementInput {
            id: id.into(),
            zeta: zeta.iter().map(|s| s.to_string()).collect(),
            covers: covers.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Two vertices joined by an edge, each carrying two rays, with the two-dimensional
    /// cones over `{ρ, ρ'}` either distinct (`shared = false`) or shared.
    pub(crate) fn two_sector_example(shared: bool) -> AbstractInput {
        let (t1, t2) = if shared { ("tau", "tau") } else { ("tau1", "tau2") };
        let mut elements = vec![
            el("0", &[], &[]),
            el("rho", &["rho"], &["0"]),
            el("rho'", &["rho'"], &["0"]),
            el("v1", &["v1"], &["0"]),
            el("v2", &["v2"], &["0"]),
            el("e", &["v1", "v2"], &["v1", "v2"]),
            el("r1", &["v1", "rho"], &["v1", "rho"]),
            el("r1'", &["v1", "rho'"], &["v1", "rho'"]),
            el("r2", &["v2", "rho"], &["v2", "rho"]),
            el("r2'", &["v2", "rho'"], &["v2", "rho'"]),
            el("s1", &["v1", "rho", "rho'"], &["r1", "r1'", t1]),
            el("s2", &["v2", "rho", "rho'"], &["r2", "r2'", t2]),
        ];
        if shared {
            elements.push(el("tau", &["rho", "rho'"], &["rho", "rho'"]));
        } else {
            elements.push(el("tau1", &["rho", "rho'"], &["rho", "rho'"]));
            elements.push(el("tau2", &["rho", "rho'"], &["rho", "rho'"]));
        }
        AbstractInput { v_f: vec!["v1".into(), "v2".into()], v_inf: vec!["rho".into(), "rho'".into()], elements }
    }

    #[test]
    fn two_sector_example_is_valid() {
        let a = AbstractComplex::new(&two_sector_example(false)).unwrap();
        assert_eq!(a.delta().len(), 9);
        assert_eq!(a.upsilon().len(), 5);
        let classes = a.parallel_classes();
        let tau1 = a.index_of("tau1").unwrap();
        let c = classes.iter().find(|c| c.upsilon == tau1).unwrap();
        assert_eq!(c.cells, vec![a.index_of("s1").unwrap()]);
        let rho = a.index_of("rho").unwrap();
        assert_eq!(classes.iter().find(|c| c.upsilon == rho).unwrap().cells.len(), 4);
        assert!(matches!(a.realize_fan(), Err(AbstractError::NotEmbeddable(_, _))));
        assert_eq!(a.realize().unwrap().len(), 9);
    }

    #[test]
    fn shared_cone_identifies_interior_directions() {
        let a = AbstractComplex::new(&two_sector_example(true)).unwrap();
        let tau = a.index_of("tau").unwrap();
        let c = a.parallel_classes().into_iter().find(|c| c.upsilon == tau).unwrap();
        assert_eq!(c.cells.len(), 2);
        let fan = a.realize_fan().unwrap();
        assert_eq!(a.realize().unwrap().recession_fan().unwrap().len(), fan.len());
    }

    #[test]
    fn property_two_violation() {
        let mut inp = two_sector_example(false);
        inp.elements.push(el("v1bis", &["v1"], &["0"]));
        assert!(matches!(AbstractComplex::new(&inp), Err(AbstractError::Property2(_))));
    }

    #[test]
    fn property_three_violation() {
        let mut inp = two_sector_example(false);
        inp.elements.retain(|e| e.id != "r1'");
        for e in inp.elements.iter_mut() {
            e.covers.retain(|c| c != "r1'");
        }
        match AbstractComplex::new(&inp) {
            Err(AbstractError::Property3 { element, .. }) => assert_eq!(element, "s1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn property_one_violation() {
        let inp = AbstractInput {
            v_f: vec!["a".into(), "b".into()],
            v_inf: vec![],
            elements: vec![el("a", &["a"], &[]), el("b", &["b"], &[])],
        };
        assert!(matches!(AbstractComplex::new(&inp), Err(AbstractError::Property1(_))));
    }

    #[test]
    fn realization_of_half_strip() {
        let a = AbstractComplex::from_facets(&["v1", "v2"], &["rho"], &[vec!["v1", "v2", "rho"]]).unwrap();
        let c = a.realize().unwrap();
        assert_eq!(c.f_vector(), vec![2, 3, 1]);
        let fan = c.recession_fan().unwrap();
        assert_eq!(fan.maximal_cells().len(), 1);
        let edge = AbstractComplex::from_facets(&["v1", "v2"], &[], &[vec!["v1", "v2"]]).unwrap();
        assert_eq!(edge.realize().unwrap().f_vector(), vec![2, 1]);
    }
}
