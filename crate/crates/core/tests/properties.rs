use std::collections::BTreeSet;

use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use troprat::bary::{barycentric_subdivision, embed_barycentric};
use troprat::complex::{arrangement_completion, relint_point, AbstractComplex, PolyhedralComplex};
use troprat::gen::{self, AbstractParams};
use troprat::lp::{feasible_point, Row};
use troprat::num::{int, rat, rat_of, ratio, Int, Rat};
use troprat::poly::{hrep_from_vrep, Polyhedron};
use troprat::pwa::{
    convexity_check, dominating_scale, equal_on, fa_add, fa_tropical_add, midpoint_convex, rat_membership,
    FacewiseAffine, Func,
};
use troprat::synth::{build_convex_potential, synthesize, verify_synthesis};
use troprat::trop::{linearity_regions, parse_rational, trop_add, trop_mul, AffineForm, TropExpr, TropRational, TropValue};
use troprat::Caps;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-60i64..=60, 1i64..=12).prop_map(|(a, b)| ratio(a, b))
}

fn trop_value() -> impl Strategy<Value = TropValue> {
    prop_oneof![9 => small_rat().prop_map(TropValue::Finite), 1 => Just(TropValue::Infinity)]
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn random_form(rng: &mut impl Rng, n: usize) -> AffineForm {
    let m: Vec<Int> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
    AffineForm::new(m, gen::random_rat(rng, 4, 3))
}

fn random_min(rng: &mut impl Rng, n: usize, k: usize) -> TropExpr {
    TropExpr::min_of((0..k).map(|_| TropExpr::Affine(random_form(rng, n))).collect())
}

fn random_rational(rng: &mut impl Rng, n: usize) -> TropRational {
    let a = rng.gen_range(1..=3);
    let b = rng.gen_range(1..=2);
    TropRational::new(random_min(rng, n, a), random_min(rng, n, b))
}

fn whole_space(n: usize) -> PolyhedralComplex {
    PolyhedralComplex::new(n, vec![Polyhedron::universe(n)], true).unwrap()
}

fn random_polyhedron(rng: &mut impl Rng, n: usize) -> Polyhedron {
    loop {
        let k = rng.gen_range(1..=n + 3);
        let ineqs = (0..k).map(|_| random_form(rng, n)).collect();
        let p = Polyhedron::new(n, ineqs, vec![]);
        if !p.is_empty() {
            return p;
        }
    }
}

/// `u ∈ conv(V) + cone(R) + span(L)`, decided by a feasibility LP in the coefficients.
fn in_minkowski_sum(u: &[Rat], vertices: &[Vec<Rat>], rays: &[Vec<Int>], lin: &[Vec<Int>]) -> bool {
    let (nv, nr, nl) = (vertices.len(), rays.len(), lin.len());
    let vars = nv + nr + 2 * nl;
    let mut eq = Vec::new();
    for (j, uj) in u.iter().enumerate() {
        let mut a: Vec<Rat> = vertices.iter().map(|v| v[j].clone()).collect();
        a.extend(rays.iter().map(|r| rat_of(&r[j])));
        a.extend(lin.iter().map(|l| rat_of(&l[j])));
        a.extend(lin.iter().map(|l| -rat_of(&l[j])));
        eq.push(Row::new(a, uj.clone()));
    }
    let mut ones = vec![rat(1); nv];
    ones.resize(vars, rat(0));
    eq.push(Row::new(ones, rat(1)));
    let le: Vec<Row> = (0..vars)
        .map(|i| {
            let mut a = vec![rat(0); vars];
            a[i] = rat(-1);
            Row::new(a, rat(0))
        })
        .collect();
    feasible_point(vars, &le, &eq).is_some()
}

fn keys(c: &PolyhedralComplex) -> BTreeSet<troprat::poly::PolyKey> {
    c.cells().iter().map(|p| p.key()).collect()
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn semifield_axioms(a in trop_value(), b in trop_value(), c in trop_value()) {
        prop_assert_eq!(trop_add(&trop_add(&a, &b), &c), trop_add(&a, &trop_add(&b, &c)));
        prop_assert_eq!(trop_mul(&trop_mul(&a, &b), &c), trop_mul(&a, &trop_mul(&b, &c)));
        prop_assert_eq!(trop_add(&a, &b), trop_add(&b, &a));
        prop_assert_eq!(trop_mul(&a, &b), trop_mul(&b, &a));
        prop_assert_eq!(trop_mul(&a, &trop_add(&b, &c)), trop_add(&trop_mul(&a, &b), &trop_mul(&a, &c)));
        prop_assert_eq!(trop_add(&a, &TropValue::Infinity), a.clone());
        prop_assert_eq!(trop_mul(&a, &TropValue::Finite(rat(0))), a.clone());
        if let TropValue::Finite(x) = &a {
            prop_assert_eq!(trop_mul(&a, &TropValue::Finite(-x)), TropValue::Finite(rat(0)));
        }
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn eval_matches_linearity_regions(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=2);
        let e = random_rational(&mut rng, n);
        let regions = linearity_regions(&e, n, &Caps::default()).unwrap();
        let top = regions.complex.maximal_cells();
        for _ in 0..10 {
            let u = gen::random_point(&mut rng, n, 4);
            let k = top.iter().position(|&i| regions.complex.cell(i).contains(&u)).unwrap();
            let form = regions.forms[k].as_ref().unwrap();
            prop_assert_eq!(e.eval(&u).unwrap(), TropValue::Finite(form.eval(&u)));
        }
    }

    #[test]
    fn print_then_parse_evaluates_the_same(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=3);
        let e = random_rational(&mut rng, n);
        let back = parse_rational(&e.to_string(), n).unwrap();
        for _ in 0..10 {
            let u = gen::random_point(&mut rng, n, 5);
            prop_assert_eq!(e.eval(&u).unwrap(), back.eval(&u).unwrap());
        }
    }

    #[test]
    fn vrep_hrep_round_trip(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=4);
        let p = random_polyhedron(&mut rng, n);
        let v = p.vrep().unwrap().clone();
        let h = hrep_from_vrep(n, &v);
        let q = Polyhedron::new(n, h.facets.clone(), h.equalities.clone());
        prop_assert_eq!(q.vrep().unwrap(), &v);
    }

    #[test]
    fn minkowski_decomposition(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=3);
        let p = random_polyhedron(&mut rng, n);
        let v = p.vrep().unwrap();
        for _ in 0..8 {
            let u = gen::random_point(&mut rng, n, 4);
            prop_assert_eq!(p.contains(&u), in_minkowski_sum(&u, &v.vertices, &v.rays, &v.lineality));
        }
    }

    #[test]
    fn recession_cone_of_intersection(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=3);
        let p = random_polyhedron(&mut rng, n);
        let q = random_polyhedron(&mut rng, n);
        let x = p.intersect(&q);
        if !x.is_empty() && x.affine_dim() == Some(n) {
            prop_assert_eq!(x.recession_cone(), p.recession_cone().intersect(&q.recession_cone()));
        }
    }

    #[test]
    fn points_lie_in_exactly_one_relative_interior(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=3);
        let (c, _) = gen::random_complex(&mut rng, n, 20);
        for u in troprat::oracle::sample_points(&mut rng, &c, 2) {
            let owners = (0..c.len())
                .filter(|&i| c.cell(i).contains(&u) && c.faces_of(i).iter().all(|&f| f == i || !c.cell(f).contains(&u)))
                .count();
            prop_assert_eq!(owners, 1);
        }
    }

    #[test]
    fn self_refinement_is_identity(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=3);
        let (c, _) = gen::random_complex(&mut rng, n, 20);
        prop_assert_eq!(keys(&c.common_refinement(&c)), keys(&c));
    }

    #[test]
    fn recession_fan_of_realization(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let ac = gen::random_abstract_complex(&mut rng, &AbstractParams { max_elements: 24, ..AbstractParams::default() });
        if let (Ok(real), Ok(fan)) = (ac.realize(), ac.realize_fan()) {
            prop_assert_eq!(keys(&real.recession_fan().unwrap()), keys(&fan));
        }
    }

    #[test]
    fn arrangement_completion_contains_the_complex(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=3);
        let (c, _) = gen::random_complex(&mut rng, n, 12);
        let (arr, beta) = arrangement_completion(&c, &Caps::default()).unwrap();
        for p in beta.cells() {
            prop_assert!(arr.complex.index_of(p).is_some());
        }
        for i in 0..c.len() {
            let inside: Vec<&Polyhedron> = beta.cells().iter().filter(|p| c.cell(i).contains_polyhedron(p)).collect();
            let single = PolyhedralComplex::new(n, vec![c.cell(i).clone()], true).unwrap();
            for u in troprat::oracle::sample_points(&mut rng, &single, 3) {
                prop_assert!(inside.iter().any(|p| p.contains(&u)));
            }
        }
    }

    #[test]
    fn rat_is_closed_under_min_and_sum(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=2);
        let (c, hs) = gen::random_complex(&mut rng, n, 12);
        let f = gen::abs_combination(&mut rng, &c, &hs, 20, None).unwrap();
        let g = gen::abs_combination(&mut rng, &c, &hs, 20, None).unwrap();
        prop_assert!(rat_membership(&f).is_ok() && rat_membership(&g).is_ok());
        prop_assert!(rat_membership(&fa_tropical_add(&f, &g).unwrap()).is_ok());
        prop_assert!(rat_membership(&fa_add(&f, &g).unwrap()).is_ok());
    }

    #[test]
    fn membership_is_refinement_invariant(seed in any::<u64>(), agree in any::<bool>()) {
        let mut rng = gen::rng(seed);
        let f = gen::parallel_translates(&mut rng, agree);
        let hs: Vec<AffineForm> = (0..2).map(|_| gen::random_hyperplane(&mut rng, f.dim())).collect();
        prop_assert_eq!(rat_membership(&f).is_ok(), rat_membership(&f.refine_by(&hs)).is_ok());
    }

    #[test]
    fn convexity_matches_midpoint_sampling(seed in any::<u64>(), convex in any::<bool>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=2);
        let h = gen::random_convexity_case(&mut rng, n, convex);
        let certified = convexity_check(&h, false).is_ok();
        // Segments between points of different cells, plus the cell points themselves.
        let pts = troprat::oracle::sample_points(&mut rng, h.complex(), 2);
        let mut sampled = true;
        for (i, u) in pts.iter().enumerate() {
            for v in &pts[i + 1..] {
                sampled &= midpoint_convex(&h, u, v).unwrap();
            }
        }
        prop_assert_eq!(certified, sampled);
    }

    #[test]
    fn dominating_scale_is_minimal(a in 1i64..=6, g in -20i64..=40) {
        let half = Polyhedron::new(1, vec![AffineForm::var(1, 0)], vec![]);
        let f = FacewiseAffine::affine(PolyhedralComplex::new(1, vec![half.clone()], true).unwrap(), AffineForm::from_ints(&[a], rat(0))).unwrap();
        let gf = AffineForm::from_ints(&[g], rat(0));
        let d = dominating_scale(&f, &gf, &Polyhedron::point(&[rat(0)]), &half).unwrap();
        let expect = (g.div_euclid(a) + 1).max(1);
        prop_assert_eq!(d.n.clone(), int(expect));
        if expect > 1 {
            let w = d.witness.unwrap();
            let n1 = rat_of(&(d.n - Int::from(1)));
            prop_assert!(f.eval(&w).unwrap() * n1 - gf.eval(&w) <= Rat::zero());
        }
    }

    #[test]
    fn equality_is_a_congruence(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=2);
        let w = whole_space(n);
        let caps = Caps::default();
        let a = random_min(&mut rng, n, 2);
        let b = random_min(&mut rng, n, 2);
        // a' = min(a, a ⊙ 1) is a different tree with the same values.
        let shift = |e: &TropExpr| TropExpr::min_of(vec![e.clone(), TropExpr::sum_of(vec![e.clone(), TropExpr::constant(n, rat(1))])]);
        let (a2, b2) = (shift(&a), shift(&b));
        let r = |e: TropExpr| TropRational::from_expr(e, n);
        let eq = |x: TropRational, y: TropRational| equal_on(&w, Func::Expr(&x), Func::Expr(&y), &caps).unwrap().is_equal();
        prop_assert!(eq(r(a.clone()), r(a.clone())));
        prop_assert!(eq(r(a.clone()), r(a2.clone())) && eq(r(a2.clone()), r(a.clone())));
        prop_assert!(eq(r(TropExpr::min_of(vec![a.clone(), b.clone()])), r(TropExpr::min_of(vec![a2.clone(), b2.clone()]))));
        prop_assert!(eq(r(TropExpr::sum_of(vec![a.clone(), b.clone()])), r(TropExpr::sum_of(vec![a2, b2]))));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn synthesis_is_exact_at_probe_points(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let f = gen::random_rat_function(&mut rng, 3, 40);
        let caps = Caps::default();
        let r = synthesize(&f, &caps).unwrap();
        prop_assert!(verify_synthesis(&f, &r, &caps).unwrap().is_none());
        for leaf in r.expression.leaves() {
            prop_assert_eq!(leaf.dim(), f.dim());
        }
        let c = f.complex();
        for i in 0..c.len() {
            let v = c.cell(i).vrep().unwrap();
            let mut probes: Vec<Vec<Rat>> = v.vertices.clone();
            let b = relint_point(c.cell(i));
            probes.push(b.clone());
            for ray in v.rays.iter().chain(&v.lineality) {
                for t in [1u32, 1 << 10, 1 << 20] {
                    probes.push(b.iter().zip(ray).map(|(x, d)| x + rat_of(d) * rat(t as i64)).collect());
                }
            }
            for u in probes {
                prop_assert_eq!(r.expression.eval(&u).unwrap(), TropValue::Finite(f.eval(&u).unwrap()));
            }
        }
    }

    #[test]
    fn doubling_slopes_does_not_lower_lambda(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let f = gen::random_rat_function(&mut rng, 2, 16);
        let caps = Caps::default();
        let one = synthesize(&f, &caps).unwrap().lambda;
        let two = synthesize(&f.scale(&int(2)), &caps).unwrap().lambda;
        prop_assert!(two >= one);
    }

    #[test]
    fn convex_potential_is_certified(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let n = rng.gen_range(1..=3);
        let arr = gen::random_arrangement(&mut rng, n, 40);
        let (h, cert) = build_convex_potential(&arr);
        prop_assert!(cert.verify(&h));
        prop_assert!(convexity_check(&h, true).is_ok());
    }

    #[test]
    fn simplex_subdivision_vertex_count(a in 1usize..=4) {
        let names = ["a", "b", "c", "d"];
        let ac = AbstractComplex::from_facets(&names[..a], &[], &[names[..a].to_vec()]).unwrap();
        let sub = barycentric_subdivision(&ac, &Caps::default()).unwrap();
        // One barycenter per chain of length one, i.e. per nonempty face.
        let faces = (1u32..(1 << a)).count();
        prop_assert_eq!(sub.complex().num_finite(), faces);
        prop_assert_eq!(faces, (1 << a) - 1);
    }

    #[test]
    fn image_recession_fan_is_image_of_the_fan(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let ac = gen::random_abstract_complex(&mut rng, &AbstractParams { max_elements: 24, with_ray: true, ..AbstractParams::default() });
        let sub = barycentric_subdivision(&ac, &Caps::default()).unwrap();
        let emb = embed_barycentric(&sub, None).unwrap();
        let d = sub.complex();
        let nf = d.num_finite();
        let t = emb.target_dim();
        let expected: BTreeSet<_> = d
            .upsilon()
            .into_iter()
            .map(|u| {
                let rays: Vec<Vec<Int>> = d.ray_part(u).iter().map(|&b| emb.ray_images[b - nf].clone()).collect();
                Polyhedron::from_generators(t, vec![vec![rat(0); t]], rays, vec![]).key()
            })
            .collect();
        prop_assert_eq!(keys(&emb.image.recession_fan().unwrap()), expected);
    }
}

#[test]
fn coordinates_on_the_image_synthesize_to_themselves() {
    let ac = AbstractComplex::from_facets(&["a", "b"], &[], &[vec!["a", "b"]]).unwrap();
    let sub = barycentric_subdivision(&ac, &Caps::default()).unwrap();
    let emb = embed_barycentric(&sub, None).unwrap();
    let caps = Caps::default();
    for k in 0..emb.target_dim() {
        let x = AffineForm::var(emb.target_dim(), k);
        let f = FacewiseAffine::affine(emb.image.clone(), x.clone()).unwrap();
        let r = synthesize(&f, &caps).unwrap();
        assert!(verify_synthesis(&f, &r, &caps).unwrap().is_none());
        assert!(r.expression.leaves().iter().all(|l| l.dim() == emb.target_dim()));
        let mut rng = gen::rng(k as u64);
        for u in troprat::oracle::sample_points(&mut rng, &emb.image, 3) {
            assert_eq!(r.expression.eval(&u).unwrap(), TropValue::Finite(x.eval(&u)));
        }
    }
}
