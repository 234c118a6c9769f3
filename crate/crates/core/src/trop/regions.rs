//! Domains of linearity of min-plus expressions.

use std::cmp::Ordering;

use num_traits::Signed;

use crate::complex::{relint_point, Arrangement, ComplexError, PolyhedralComplex};
use crate::num::int;
use crate::poly::Polyhedron;
use crate::Caps;

use super::{AffineForm, EvalError, TropExpr, TropRational};

/// A closed piece of a domain on which an expression agrees with `form` (`None` is `∞`).
#[derive(Clone, Debug)]
pub struct Region {
    pub cell: Polyhedron,
    pub form: Option<AffineForm>,
}

/// Closed pieces of full relative dimension covering `domain`, each carrying the affine
/// form of `e` there. Pieces may overlap along boundaries and need not meet face to face.
pub fn regions_on(e: &TropExpr, domain: &Polyhedron) -> Result<Vec<Region>, EvalError> {
    if domain.is_empty() {
        return Ok(Vec::new());
    }
    let n = domain.dim();
    Ok(match e {
        TropExpr::Affine(a) => {
            if a.dim() != n {
                return Err(EvalError::Dimension { expected: a.dim(), got: n });
            }
            vec![Region { cell: domain.clone(), form: Some(a.clone()) }]
        }
        TropExpr::Infinity => vec![Region { cell: domain.clone(), form: None }],
        TropExpr::Pow(c, k) => {
            if *k == 0 {
                return Ok(vec![Region { cell: domain.clone(), form: Some(AffineForm::zero(n)) }]);
            }
            let mut out = Vec::new();
            for r in regions_on(c, domain)? {
                let form = match r.form {
                    Some(f) => Some(f.scale(&int(*k))),
                    None if *k > 0 => None,
                    None => return Err(EvalError::InverseOfInfinity),
                };
                out.push(Region { cell: r.cell, form });
            }
            out
        }
        TropExpr::Sum(cs) => {
            let mut acc = vec![Region { cell: domain.clone(), form: Some(AffineForm::zero(n)) }];
            for c in cs {
                let mut next = Vec::new();
                for r in acc {
                    for s in regions_on(c, &r.cell)? {
                        let form = match (&r.form, s.form) {
                            (Some(a), Some(b)) => Some(a.add(&b)),
                            _ => None,
                        };
                        next.push(Region { cell: s.cell, form });
                    }
                }
                acc = next;
            }
            acc
        }
        TropExpr::Min(cs) => {
            let mut acc = vec![Region { cell: domain.clone(), form: None }];
            for c in cs {
                let mut next = Vec::new();
                for r in acc {
                    for s in regions_on(c, &r.cell)? {
                        min_into(r.form.as_ref(), s, &mut next);
                    }
                }
                acc = next;
            }
            acc
        }
    })
}

/// Splits `s.cell` by where `f` or `s.form` is smaller and pushes the pieces.
fn min_into(f: Option<&AffineForm>, s: Region, out: &mut Vec<Region>) {
    let (f, g) = match (f, &s.form) {
        (None, _) => return out.push(s),
        (Some(f), None) => return out.push(Region { cell: s.cell, form: Some(f.clone()) }),
        (Some(f), Some(g)) => (f.clone(), g.clone()),
    };
    let h = f.sub(&g);
    if h.is_constant() {
        let form = if h.constant.is_positive() { g } else { f };
        return out.push(Region { cell: s.cell, form: Some(form) });
    }
    match s.cell.side_of(&h) {
        Some(Ordering::Greater) => out.push(Region { cell: s.cell, form: Some(g) }),
        Some(Ordering::Less) | Some(Ordering::Equal) => out.push(Region { cell: s.cell, form: Some(f) }),
        None => {
            let (plus, minus) = s.cell.split(&h);
            out.extend(plus.map(|c| Region { cell: c, form: Some(g) }));
            out.extend(minus.map(|c| Region { cell: c, form: Some(f) }));
        }
    }
}

/// Regions of `p ⊘ q` on `domain`.
pub fn rational_regions_on(e: &TropRational, domain: &Polyhedron) -> Result<Vec<Region>, EvalError> {
    let mut out = Vec::new();
    for r in regions_on(&e.num, domain)? {
        for s in regions_on(&e.den, &r.cell)? {
            let form = match (&r.form, s.form) {
                (Some(p), Some(q)) => Some(p.sub(&q)),
                (None, Some(_)) => None,
                (_, None) => return Err(EvalError::InfMinusInf),
            };
            out.push(Region { cell: s.cell, form });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RegionsError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("dimension {dim} exceeds the bound {cap} for linearity regions")]
    DimensionCap { dim: usize, cap: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A complete complex on whose maximal cells an expression is affine.
#[derive(Clone, Debug)]
pub struct LinearityRegions {
    pub complex: PolyhedralComplex,
    /// The form on each maximal cell, indexed like `complex.maximal_cells()`.
    pub forms: Vec<Option<AffineForm>>,
}

impl LinearityRegions {
    /// The form on a maximal cell containing the cell `i`.
    pub fn form_of(&self, i: usize) -> Option<&AffineForm> {
        let m = self.complex.maximal_cofaces(i)[0];
        let k = self.complex.maximal_cells().iter().position(|&j| j == m).unwrap();
        self.forms[k].as_ref()
    }
}

/// Default bound on the ambient dimension for [`linearity_regions`].
pub const MAX_REGION_DIM: usize = 6;

/// Linearity domains of `e` on `R^n`: the arrangement of all region walls, with adjacent
/// chambers merged when they carry the same form and their union is convex. If merging
/// breaks the face-to-face property the unmerged arrangement is returned.
pub fn linearity_regions(e: &TropRational, n: usize, caps: &Caps) -> Result<LinearityRegions, RegionsError> {
    if n > MAX_REGION_DIM.min(caps.max_dim) {
        return Err(RegionsError::DimensionCap { dim: n, cap: MAX_REGION_DIM.min(caps.max_dim) });
    }
    let regions = rational_regions_on(e, &Polyhedron::universe(n))?;
    let mut walls: Vec<AffineForm> = Vec::new();
    for r in &regions {
        walls.extend(r.cell.ineqs().iter().cloned());
        walls.extend(r.cell.eqs().iter().cloned());
    }
    let arr = Arrangement::new(n, &walls, caps)?;
    let mut chambers: Vec<(Polyhedron, Option<AffineForm>)> = Vec::new();
    for &i in arr.complex.maximal_cells() {
        let c = arr.complex.cell(i);
        let u = relint_point(c);
        let form = regions.iter().find(|r| r.cell.contains(&u)).expect("regions cover R^n").form.clone();
        chambers.push((c.clone(), form));
    }
    let merged = merge_chambers(chambers.clone());
    if merged.len() < chambers.len() {
        let cells: Vec<Polyhedron> = merged.iter().map(|(c, _)| c.clone()).collect();
        if let Ok(complex) = PolyhedralComplex::new(n, cells.clone(), true) {
            let forms = complex
                .maximal_cells()
                .iter()
                .map(|&i| {
                    let k = cells.iter().position(|c| c == complex.cell(i)).unwrap();
                    merged[k].1.clone()
                })
                .collect();
            return Ok(LinearityRegions { complex, forms });
        }
    }
    let complex = arr.complex;
    let forms = complex
        .maximal_cells()
        .iter()
        .map(|&i| chambers.iter().find(|(c, _)| c == complex.cell(i)).unwrap().1.clone())
        .collect();
    Ok(LinearityRegions { complex, forms })
}

fn merge_chambers(mut cells: Vec<(Polyhedron, Option<AffineForm>)>) -> Vec<(Polyhedron, Option<AffineForm>)> {
    loop {
        let mut found = None;
        'outer: for a in 0..cells.len() {
            for b in a + 1..cells.len() {
                if cells[a].1 == cells[b].1 {
                    if let Some(h) = convex_union(&cells[a].0, &cells[b].0) {
                        found = Some((a, b, h));
                        break 'outer;
                    }
                }
            }
        }
        match found {
            None => return cells,
            Some((a, b, h)) => {
                let form = cells[a].1.clone();
                cells.remove(b);
                cells[a] = (h, form);
            }
        }
    }
}

/// `A ∪ B` when it is convex.
fn convex_union(a: &Polyhedron, b: &Polyhedron) -> Option<Polyhedron> {
    let (va, vb) = (a.vrep()?, b.vrep()?);
    // Full-dimensional cells can only have a convex union if they share a facet.
    if a.intersect(b).affine_dim()? + 1 < a.affine_dim()? {
        return None;
    }
    let mut vertices = va.vertices.clone();
    vertices.extend(vb.vertices.iter().cloned());
    let mut rays = va.rays.clone();
    rays.extend(vb.rays.iter().cloned());
    let mut lin = va.lineality.clone();
    lin.extend(vb.lineality.iter().cloned());
    let hull = Polyhedron::from_generators(a.dim(), vertices, rays, lin);
    for f in a.ineqs() {
        if hull.side_of(f) == Some(Ordering::Greater) || hull.side_of(f) == Some(Ordering::Equal) {
            continue;
        }
        let rest = hull.with_constraints(&[f.neg()], &[]);
        if !b.contains_polyhedron(&rest) {
            return None;
        }
    }
    Some(hull)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::trop::parse_rational;

    fn lin(s: &str, n: usize) -> LinearityRegions {
        linearity_regions(&parse_rational(s, n).unwrap(), n, &Caps::default()).unwrap()
    }

    #[test]
    fn min_with_zero_has_two_pieces() {
        let r = lin("min(x1, 0)", 1);
        assert_eq!(r.complex.maximal_cells().len(), 2);
        let mut forms: Vec<String> = r.forms.iter().map(|f| f.as_ref().unwrap().to_string()).collect();
        forms.sort();
        assert_eq!(forms, vec!["0", "x1"]);
    }

    #[test]
    fn three_way_min_in_the_plane() {
        let r = lin("min(x1, x2, 0)", 2);
        assert_eq!(r.complex.maximal_cells().len(), 3);
        assert!(r.complex.recession_fan().is_ok());
    }

    #[test]
    fn affine_leaf_is_one_cell() {
        let r = lin("2 + 3*x1 - x2", 2);
        assert_eq!(r.complex.maximal_cells().len(), 1);
        assert_eq!(r.forms[0].as_ref().unwrap().to_string(), "2 + 3*x1 - x2");
    }

    #[test]
    fn forms_agree_with_evaluation() {
        let e = parse_rational("min(2*x1, x2 - 1, 3) - min(x1, x2)", 2).unwrap();
        let r = linearity_regions(&e, 2, &Caps::default()).unwrap();
        for x in -4..=4 {
            for y in -4..=4 {
                let u = [rat(x), crate::num::ratio(2 * y + 1, 2)];
                let i = r.complex.locate(&u).unwrap();
                let f = r.form_of(i).unwrap();
                assert_eq!(e.eval(&u).unwrap(), super::super::TropValue::Finite(f.eval(&u)));
            }
        }
    }

    #[test]
    fn dimension_cap() {
        let e = parse_rational("x1", 7).unwrap();
        assert!(matches!(
            linearity_regions(&e, 7, &Caps::default()),
            Err(RegionsError::DimensionCap { .. })
        ));
    }
}
