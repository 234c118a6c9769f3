//! Writing a function of `Rat(|Σ|)` as a tropical rational expression in the coordinates.
//!
//! With `Ĥ = Σ |ℓ_i|` over the walls of the arrangement completion, `λĤ + F` is a maximum
//! of affine forms on `|Σ|` for a large enough integer `λ`, so `F = max_σ A_σ − λĤ`. In
//! min-plus terms this is `p2 ⊘ p1` with `p1 = ⊕ (−A_σ)` and `p2 = ⊙ min(λℓ_i, −λℓ_i)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::complex::{arrangement_completion, Arrangement, ComplexError, PolyhedralComplex};
use crate::num::{rat_of, to_rats, Int, Rat};
use crate::pwa::{
    agree_on, equal_on, rat_membership, Comparison, ConvexityCertificate, FacewiseAffine, Func, NotInRat, PwaError,
    SupportingFunction,
};
use crate::trop::{AffineForm, TropExpr, TropRational};
use crate::Caps;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("function is not in Rat: {0}")]
    NotInRat(#[from] NotInRat),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Pwa(#[from] PwaError),
    #[error("cells {tau} and {sigma}: a ray of zero potential gap has positive function gap")]
    InfeasiblePair { tau: usize, sigma: usize },
}

/// Output of [`synthesize`].
#[derive(Clone, Debug)]
pub struct SynthesisResult {
    /// The shortest verified expression found; equals `raw` or a compact equivalent.
    pub expression: TropRational,
    /// `p2 ⊘ p1` as constructed.
    pub raw: TropRational,
    pub lambda: Int,
    pub hyperplanes: Vec<AffineForm>,
    /// `Ĥ` on the arrangement complex.
    pub potential: FacewiseAffine,
    /// The faces of the arrangement inside `|Σ|`.
    pub index_cells: PolyhedralComplex,
    /// `(L_Ĥ,σ, L_F,σ)` for each maximal cell of `index_cells`, in order.
    pub cell_forms: Vec<(AffineForm, AffineForm)>,
}

/// `Σ_{i ∉ I(σ)} ε_i ℓ_i`, where `I(σ)` are the walls containing the cell and `ε_i` is the
/// sign of `ℓ_i` on it.
pub fn supporting_form(hyperplanes: &[AffineForm], cell: &crate::poly::Polyhedron) -> AffineForm {
    let mut acc = AffineForm::zero(cell.dim());
    for l in hyperplanes {
        match cell.side_of(l) {
            Some(Ordering::Greater) => acc = acc.add(l),
            Some(Ordering::Less) => acc = acc.sub(l),
            _ => {}
        }
    }
    acc
}

/// `Ĥ = Σ_i |ℓ_i|` on the arrangement, with the certificate given by the supporting forms.
pub fn build_convex_potential(arr: &Arrangement) -> (FacewiseAffine, ConvexityCertificate) {
    let c = &arr.complex;
    let h = FacewiseAffine::from_fn(c.clone(), |p| supporting_form(&arr.hyperplanes, p)).expect("continuous");
    let mut cells = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        let l = supporting_form(&arr.hyperplanes, c.cell(i));
        let mut margin: Option<Rat> = None;
        for m in c.maximal_cofaces(i) {
            if m == i {
                continue;
            }
            let v = c.cell(m).vrep().unwrap();
            let hm = h.form(m);
            let gaps = v
                .vertices
                .iter()
                .filter(|x| !c.cell(i).contains(x))
                .map(|x| hm.eval(x) - l.eval(x))
                .chain(
                    v.rays
                        .iter()
                        .filter(|r| !c.cell(i).recedes_along(&to_rats(r)))
                        .map(|r| rat_of(&(hm.slope_along_int(r) - l.slope_along_int(r)))),
                );
            for g in gaps {
                margin = Some(margin.map_or(g.clone(), |m: Rat| m.min(g)));
            }
        }
        cells.push(SupportingFunction {
            cell: i,
            slope: to_rats(&l.slope),
            constant: l.constant.clone(),
            margin: margin.unwrap_or_else(Rat::one),
        });
    }
    let strict = cells.iter().all(|s| s.margin.is_positive());
    (h, ConvexityCertificate { cells, strict })
}

fn ceil_int(q: &Rat) -> Int {
    q.ceil().to_integer()
}

/// Least integer `λ ≥ 1` with `λ(L_Ĥ,τ − L_Ĥ,σ) ≥ L_F,σ − L_F,τ` on `τ` for every ordered
/// pair of maximal cells of `Σ_β`, where `f` is given on `Σ_β`.
pub fn compute_lambda(f: &FacewiseAffine, hyperplanes: &[AffineForm]) -> Result<Int, SynthError> {
    let c = f.complex();
    let top = c.maximal_cells();
    let lh: Vec<AffineForm> = top.iter().map(|&i| supporting_form(hyperplanes, c.cell(i))).collect();
    let mut lambda = Int::one();
    for (a, &tau) in top.iter().enumerate() {
        let v = c.cell(tau).vrep().unwrap();
        for (b, &sigma) in top.iter().enumerate() {
            if a == b {
                continue;
            }
            let dh = lh[a].sub(&lh[b]);
            let df = f.form(sigma).sub(f.form(tau));
            for x in &v.vertices {
                let (gh, gf) = (dh.eval(x), df.eval(x));
                if gh.is_positive() {
                    lambda = lambda.max(ceil_int(&(gf / gh)));
                } else {
                    assert!(gh.is_zero() && !gf.is_positive(), "potential gap vanishes off the cell");
                }
            }
            for r in v.rays.iter().chain(&v.lineality) {
                let (sh, sf) = (dh.slope_along_int(r), df.slope_along_int(r));
                if sh.is_positive() {
                    lambda = lambda.max(ceil_int(&(rat_of(&sf) / rat_of(&sh))));
                } else if sf.is_positive() || sh.is_negative() {
                    return Err(SynthError::InfeasiblePair { tau, sigma });
                }
            }
        }
    }
    Ok(lambda)
}

/// `F` as `p2 ⊘ p1` in the coordinate functions, checked by [`verify_synthesis`] and
/// compacted when a shorter verified form exists.
pub fn synthesize(f: &FacewiseAffine, caps: &Caps) -> Result<SynthesisResult, SynthError> {
    rat_membership(f)?;
    f.complex().check_caps(caps)?;
    let n = f.dim();
    let (arr, beta) = arrangement_completion(f.complex(), caps)?;
    let (potential, _) = build_convex_potential(&arr);
    let fb = f.on_complex(beta.clone())?;
    let lambda = compute_lambda(&fb, &arr.hyperplanes)?;
    let cell_forms: Vec<(AffineForm, AffineForm)> = beta
        .maximal_cells()
        .iter()
        .map(|&i| (supporting_form(&arr.hyperplanes, beta.cell(i)), fb.form(i).clone()))
        .collect();
    let terms: BTreeSet<AffineForm> = cell_forms.iter().map(|(h, g)| h.scale(&lambda).add(g).neg()).collect();
    let p1 = TropExpr::min_of(terms.into_iter().map(TropExpr::Affine).collect());
    let p2 = if arr.hyperplanes.is_empty() {
        TropExpr::constant(n, Rat::zero())
    } else {
        TropExpr::sum_of(
            arr.hyperplanes
                .iter()
                .map(|l| {
                    let s = l.scale(&lambda);
                    TropExpr::Min(vec![TropExpr::Affine(s.clone()), TropExpr::Affine(s.neg())])
                })
                .collect(),
        )
    };
    let raw = TropRational::new(p2, p1);
    let mut result = SynthesisResult {
        expression: raw.clone(),
        raw,
        lambda,
        hyperplanes: arr.hyperplanes.clone(),
        potential,
        index_cells: beta,
        cell_forms,
    };
    if let Some(e) = compact(f, caps)? {
        result.expression = e;
    }
    Ok(result)
}

/// Candidates `F`, `min_σ L_F,σ` and `max_σ L_F,σ`, returned if one equals `F` on `|Σ|`.
fn compact(f: &FacewiseAffine, caps: &Caps) -> Result<Option<TropRational>, SynthError> {
    let n = f.dim();
    let forms: Vec<AffineForm> = f.maximal_forms().into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let zero = TropExpr::constant(n, Rat::zero());
    let leaves = |neg: bool| TropExpr::min_of(forms.iter().map(|g| TropExpr::Affine(if neg { g.neg() } else { g.clone() })).collect());
    let candidates = [TropRational::new(leaves(false), zero.clone()), TropRational::new(zero, leaves(true))];
    for e in candidates {
        if equal_on(f.complex(), Func::Expr(&e), Func::Facewise(f), caps)?.is_equal() {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// Why a synthesis result was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyFailure {
    Differ(Comparison),
    NonIntegralSlope,
    PairConstraint { tau: usize, sigma: usize },
}

/// Checks the expressions against `F` on `|Σ|`, integrality of the leaves, and the `λ`
/// pair constraints at cell vertices.
pub fn verify_synthesis(f: &FacewiseAffine, r: &SynthesisResult, caps: &Caps) -> Result<Option<VerifyFailure>, PwaError> {
    for e in [&r.expression, &r.raw] {
        let c = equal_on(f.complex(), Func::Expr(e), Func::Facewise(f), caps)?;
        if !c.is_equal() {
            return Ok(Some(VerifyFailure::Differ(c)));
        }
        // Slopes are integer vectors by type; reject leaves not in the ambient dimension.
        if e.leaves().iter().any(|l| l.dim() != f.dim()) {
            return Ok(Some(VerifyFailure::NonIntegralSlope));
        }
    }
    let c = &r.index_cells;
    let top = c.maximal_cells();
    for (a, &tau) in top.iter().enumerate() {
        let v = c.cell(tau).vrep().unwrap();
        let at = r.cell_forms[a].0.scale(&r.lambda).add(&r.cell_forms[a].1);
        if !agree_on(&r.cell_forms[a].1, &f_on(f, c.cell(tau)), c.cell(tau)) {
            return Ok(Some(VerifyFailure::PairConstraint { tau, sigma: tau }));
        }
        for (b, &sigma) in top.iter().enumerate() {
            let asig = r.cell_forms[b].0.scale(&r.lambda).add(&r.cell_forms[b].1);
            let bad = v.vertices.iter().any(|x| at.eval(x) < asig.eval(x))
                || v.rays.iter().any(|ray| at.slope_along_int(ray) < asig.slope_along_int(ray))
                || v.lineality.iter().any(|l| at.slope_along_int(l) != asig.slope_along_int(l));
            if bad {
                return Ok(Some(VerifyFailure::PairConstraint { tau, sigma }));
            }
        }
    }
    Ok(None)
}

/// The form of `F` on a maximal cell containing `p`.
fn f_on(f: &FacewiseAffine, p: &crate::poly::Polyhedron) -> AffineForm {
    let c = f.complex();
    let i = c.maximal_cells().iter().copied().find(|&i| c.cell(i).contains_polyhedron(p)).expect("refinement");
    f.form(i).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};
    use crate::poly::Polyhedron;
    use crate::pwa::convexity_check;

    fn aff(s: &[i64], c: i64) -> AffineForm {
        AffineForm::from_ints(s, rat(c))
    }

    fn caps() -> Caps {
        Caps::default()
    }

    fn hinge(scale: i64) -> FacewiseAffine {
        let a = Polyhedron::new(1, vec![aff(&[1], 0), aff(&[-1], 1)], vec![]);
        let b = Polyhedron::new(1, vec![aff(&[1], -1)], vec![]);
        let c = PolyhedralComplex::new(1, vec![a, b], true).unwrap();
        FacewiseAffine::from_fn(c, |p| if p.contains(&[rat(2)]) { aff(&[scale], -scale) } else { aff(&[0], 0) }).unwrap()
    }

    #[test]
    fn potential_of_one_wall() {
        let arr = Arrangement::new(1, &[aff(&[1], 0)], &caps()).unwrap();
        let (h, cert) = build_convex_potential(&arr);
        assert!(cert.strict && cert.verify(&h));
        assert_eq!(h.eval(&[rat(-3)]), Some(rat(3)));
    }

    #[test]
    fn potential_of_three_lines_is_strict() {
        let arr = Arrangement::new(2, &[aff(&[1, 0], 0), aff(&[0, 1], 0), aff(&[1, -1], 0)], &caps()).unwrap();
        let (h, cert) = build_convex_potential(&arr);
        assert!(cert.strict && cert.verify(&h));
        assert_eq!(convexity_check(&h, true).unwrap().strict, true);
        assert_eq!(h.eval(&[rat(1), rat(-2)]), Some(rat(6)));
    }

    #[test]
    fn empty_arrangement_potential() {
        let arr = Arrangement::new(2, &[], &caps()).unwrap();
        let (h, cert) = build_convex_potential(&arr);
        assert_eq!(h.complex().len(), 1);
        assert!(cert.verify(&h));
    }

    #[test]
    fn lambda_examples() {
        let hs = [aff(&[1], 0), aff(&[1], -1)];
        let beta = arrangement_completion(hinge(2).complex(), &caps()).unwrap().1;
        assert_eq!(compute_lambda(&hinge(2).on_complex(beta.clone()).unwrap(), &hs).unwrap(), int(1));
        assert_eq!(compute_lambda(&hinge(2000).on_complex(beta.clone()).unwrap(), &hs).unwrap(), int(1));
        assert_eq!(compute_lambda(&hinge(-2000).on_complex(beta).unwrap(), &hs).unwrap(), int(1000));
        let zero = FacewiseAffine::affine(hinge(1).complex().clone(), aff(&[0], 0)).unwrap();
        assert_eq!(compute_lambda(&zero, &hs).unwrap(), int(1));
    }

    #[test]
    fn hinge_synthesis_compacts_to_a_maximum() {
        let f = hinge(2);
        let r = synthesize(&f, &caps()).unwrap();
        assert_eq!(verify_synthesis(&f, &r, &caps()).unwrap(), None);
        assert_eq!(r.expression.to_string(), "0 - min(0, 2 - 2*x1)");
        for k in [0i64, 1, 3, 1 << 20] {
            let u = [rat(k)];
            assert_eq!(r.raw.eval(&u).unwrap().finite().cloned(), f.eval(&u));
        }
    }

    #[test]
    fn min_of_coordinates() {
        let a = Polyhedron::new(2, vec![aff(&[-1, 1], 0)], vec![]);
        let b = Polyhedron::new(2, vec![aff(&[1, -1], 0)], vec![]);
        let c = PolyhedralComplex::new(2, vec![a, b], true).unwrap();
        let f = FacewiseAffine::from_fn(c, |p| if p.contains(&[rat(0), rat(1)]) { aff(&[1, 0], 0) } else { aff(&[0, 1], 0) })
            .unwrap();
        let r = synthesize(&f, &caps()).unwrap();
        assert_eq!(verify_synthesis(&f, &r, &caps()).unwrap(), None);
        assert_eq!(r.expression.to_string(), "min(x2, x1)");
    }

    #[test]
    fn constant_function() {
        let c = PolyhedralComplex::new(1, vec![Polyhedron::new(1, vec![aff(&[1], 0)], vec![])], true).unwrap();
        let f = FacewiseAffine::affine(c, AffineForm::constant(1, rat(7))).unwrap();
        let r = synthesize(&f, &caps()).unwrap();
        assert_eq!(r.expression.to_string(), "7");
        assert_eq!(verify_synthesis(&f, &r, &caps()).unwrap(), None);
    }

    #[test]
    fn perturbed_constant_is_caught() {
        let f = hinge(2);
        let mut r = synthesize(&f, &caps()).unwrap();
        let TropExpr::Min(ts) = &mut r.raw.den else { panic!("p1 is a minimum") };
        let TropExpr::Affine(a) = &mut ts[0] else { panic!("affine term") };
        a.constant += crate::num::ratio(1, 7);
        r.expression = r.raw.clone();
        assert!(matches!(verify_synthesis(&f, &r, &caps()).unwrap(), Some(VerifyFailure::Differ(_))));
    }

    #[test]
    fn non_member_is_rejected() {
        let ray = |x: i64| Polyhedron::from_generators(2, vec![vec![rat(x), rat(0)]], vec![vec![int(0), int(1)]], vec![]);
        let c = PolyhedralComplex::new(2, vec![ray(0), ray(2)], true).unwrap();
        let f = FacewiseAffine::from_fn(c, |p| if p.contains(&[rat(0), rat(0)]) { aff(&[0, 1], 0) } else { aff(&[0, 2], 0) })
            .unwrap();
        assert!(matches!(synthesize(&f, &caps()), Err(SynthError::NotInRat(_))));
    }

    #[test]
    fn doubling_never_lowers_lambda() {
        let hs = [aff(&[1], 0), aff(&[1], -1)];
        let beta = arrangement_completion(hinge(-3).complex(), &caps()).unwrap().1;
        let f = hinge(-3).on_complex(beta).unwrap();
        assert!(compute_lambda(&f.scale(&int(2)), &hs).unwrap() >= compute_lambda(&f, &hs).unwrap());
    }
}
