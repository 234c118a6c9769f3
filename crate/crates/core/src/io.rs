//! JSON formats. Rationals are strings `"a/b"`; integers are JSON numbers when they fit in
//! 64 bits and strings otherwise.

use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::bary::{Embedding, FaithfulnessCertificate, FaithfulnessViolation, LatticeCertificate, LatticeViolation, Subdivision};
use crate::complex::{ComplexError, PolyhedralComplex};
use crate::num::{fmt_rat, parse_rat, Int, Rat};
use crate::poly::Polyhedron;
use crate::pwa::{Comparison, ConvexityCertificate, ConvexityViolation, DominatingScale, FacewiseAffine, NotInRat, PwaError};
use crate::synth::{SynthesisResult, VerifyFailure};
use crate::trop::{AffineForm, TropValue};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn int_value(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn rat_value(x: &Rat) -> Value {
    json!(fmt_rat(x))
}

fn rats_value(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_value).collect())
}

fn ints_value(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_value).collect())
}

mod int_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Int], s: S) -> Result<S::Ok, S::Error> {
        ints_value(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Int>, D::Error> {
        let raw: Vec<Value> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| match v {
                Value::Number(n) => n.as_i64().map(Int::from).ok_or_else(|| serde::de::Error::custom("slope entries must be integers")),
                Value::String(s) => s.trim().parse::<Int>().map_err(serde::de::Error::custom),
                _ => Err(serde::de::Error::custom("slope entries must be integers")),
            })
            .collect()
    }
}

mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => parse_rat(&s).map_err(serde::de::Error::custom),
            Value::Number(n) => n.as_i64().map(|v| Rat::from_integer(v.into())).ok_or_else(|| serde::de::Error::custom("expected a rational")),
            _ => Err(serde::de::Error::custom("expected a rational string")),
        }
    }
}

/// `⟨m, u⟩ + g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    #[serde(with = "int_list")]
    pub m: Vec<Int>,
    #[serde(with = "rat_str")]
    pub g: Rat,
}

impl From<&AffineForm> for FormJson {
    fn from(f: &AffineForm) -> Self {
        FormJson { m: f.slope.clone(), g: f.constant.clone() }
    }
}

impl FormJson {
    pub fn to_form(&self, dim: usize) -> Result<AffineForm, FormatError> {
        if self.m.len() != dim {
            return Err(FormatError::Invalid(format!("form has {} slope entries, expected {dim}", self.m.len())));
        }
        Ok(AffineForm::new(self.m.clone(), self.g.clone()))
    }
}

/// `{u : ⟨m, u⟩ + g ≥ 0 for ineqs, = 0 for eqs}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronJson {
    pub dim: usize,
    #[serde(default)]
    pub ineqs: Vec<FormJson>,
    #[serde(default)]
    pub eqs: Vec<FormJson>,
}

impl From<&Polyhedron> for PolyhedronJson {
    fn from(p: &Polyhedron) -> Self {
        let (ineqs, eqs) = match p.hrep() {
            Some(h) => (h.facets.iter().map(FormJson::from).collect(), h.equalities.iter().map(FormJson::from).collect()),
            None => (p.ineqs().iter().map(FormJson::from).collect(), p.eqs().iter().map(FormJson::from).collect()),
        };
        PolyhedronJson { dim: p.dim(), ineqs, eqs }
    }
}

impl PolyhedronJson {
    pub fn to_polyhedron(&self) -> Result<Polyhedron, FormatError> {
        let ineqs = self.ineqs.iter().map(|f| f.to_form(self.dim)).collect::<Result<_, _>>()?;
        let eqs = self.eqs.iter().map(|f| f.to_form(self.dim)).collect::<Result<_, _>>()?;
        Ok(Polyhedron::new(self.dim, ineqs, eqs))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dim: usize,
    pub cells: Vec<PolyhedronJson>,
}

impl From<&PolyhedralComplex> for ComplexJson {
    fn from(c: &PolyhedralComplex) -> Self {
        ComplexJson { dim: c.dim(), cells: c.cells().iter().map(PolyhedronJson::from).collect() }
    }
}

impl ComplexJson {
    pub fn polyhedra(&self) -> Result<Vec<Polyhedron>, FormatError> {
        self.cells.iter().map(|c| c.to_polyhedron()).collect()
    }

    /// Validates the cells as a complex; with `auto_faces`, missing faces are added.
    pub fn build(&self, auto_faces: bool) -> Result<Result<PolyhedralComplex, ComplexError>, FormatError> {
        Ok(PolyhedralComplex::new(self.dim, self.polyhedra()?, auto_faces))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceJson {
    pub cell: usize,
    #[serde(with = "int_list")]
    pub m: Vec<Int>,
    #[serde(with = "rat_str")]
    pub g: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub complex: ComplexJson,
    pub pieces: Vec<PieceJson>,
}

impl From<&FacewiseAffine> for FunctionJson {
    fn from(f: &FacewiseAffine) -> Self {
        let c = f.complex();
        FunctionJson {
            complex: ComplexJson::from(c),
            pieces: c
                .maximal_cells()
                .iter()
                .map(|&i| PieceJson { cell: i, m: f.form(i).slope.clone(), g: f.form(i).constant.clone() })
                .collect(),
        }
    }
}

/// Why a function file could not be turned into a function.
#[derive(Debug, thiserror::Error)]
pub enum FunctionBuildError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Pwa(#[from] PwaError),
}

impl FunctionJson {
    pub fn build(&self, auto_faces: bool) -> Result<Result<FacewiseAffine, FunctionBuildError>, FormatError> {
        let complex = match self.complex.build(auto_faces)? {
            Ok(c) => c,
            Err(e) => return Ok(Err(e.into())),
        };
        let n = complex.dim();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            if p.m.len() != n {
                return Err(FormatError::Invalid(format!("piece for cell {} has {} slope entries, expected {n}", p.cell, p.m.len())));
            }
            pieces.push((p.cell, AffineForm::new(p.m.clone(), p.g.clone())));
        }
        Ok(FacewiseAffine::new(complex, &pieces).map_err(FunctionBuildError::from))
    }
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// A point given as a JSON array of rationals or as comma-separated rationals.
pub fn parse_point(text: &str) -> Result<Vec<Rat>, FormatError> {
    let t = text.trim();
    if t.starts_with('[') {
        let raw: Vec<Value> = serde_json::from_str(t)?;
        raw.iter()
            .map(|v| match v {
                Value::String(s) => parse_rat(s).map_err(FormatError::Invalid),
                Value::Number(n) => parse_rat(&n.to_string()).map_err(FormatError::Invalid),
                _ => Err(FormatError::Invalid("point entries must be rationals".into())),
            })
            .collect()
    } else {
        t.split(',').map(|s| parse_rat(s.trim()).map_err(FormatError::Invalid)).collect()
    }
}

pub fn tropical_value(v: &TropValue) -> Value {
    match v {
        TropValue::Finite(x) => rat_value(x),
        TropValue::Infinity => json!("inf"),
    }
}

pub fn form_value(f: &AffineForm) -> Value {
    json!({ "m": ints_value(&f.slope), "g": rat_value(&f.constant) })
}

pub fn synthesis_value(r: &SynthesisResult) -> Value {
    let c = &r.index_cells;
    json!({
        "expr": r.expression.to_string(),
        "raw": r.raw.to_string(),
        "lambda": int_value(&r.lambda),
        "hyperplanes": r.hyperplanes.iter().map(form_value).collect::<Vec<_>>(),
        "cells": c.maximal_cells().iter().zip(&r.cell_forms).map(|(&i, (lh, lf))| json!({
            "cell": serde_json::to_value(PolyhedronJson::from(c.cell(i))).unwrap(),
            "L_H": form_value(lh),
            "L_F": form_value(lf),
        })).collect::<Vec<_>>(),
    })
}

pub fn not_in_rat_value(e: &NotInRat) -> Value {
    json!({
        "in_rat": false,
        "cell_a": e.cell_a,
        "cell_b": e.cell_b,
        "direction": ints_value(&e.direction),
        "slope_a": int_value(&e.slope_a),
        "slope_b": int_value(&e.slope_b),
    })
}

pub fn comparison_value(c: &Comparison) -> Value {
    match c {
        Comparison::Equal => json!({ "equal": true }),
        Comparison::Differ { point, left, right } => json!({
            "equal": false,
            "point": rats_value(point),
            "left": tropical_value(left),
            "right": tropical_value(right),
        }),
    }
}

pub fn verify_value(failure: &Option<VerifyFailure>) -> Value {
    match failure {
        None => json!({ "verified": true }),
        Some(VerifyFailure::Differ(c)) => json!({ "verified": false, "reason": "differ", "comparison": comparison_value(c) }),
        Some(VerifyFailure::NonIntegralSlope) => json!({ "verified": false, "reason": "non-integral slope" }),
        Some(VerifyFailure::PairConstraint { tau, sigma }) => {
            json!({ "verified": false, "reason": "pair constraint", "tau": tau, "sigma": sigma })
        }
    }
}

pub fn convexity_value(c: &ConvexityCertificate) -> Value {
    json!({
        "convex": true,
        "strict": c.strict,
        "cells": c.cells.iter().map(|s| json!({
            "cell": s.cell,
            "m": rats_value(&s.slope),
            "g": rat_value(&s.constant),
            "margin": rat_value(&s.margin),
        })).collect::<Vec<_>>(),
    })
}

pub fn convexity_violation_value(v: &ConvexityViolation) -> Value {
    json!({ "convex": false, "cell": v.cell, "reason": v.reason })
}

pub fn dominating_value(d: &DominatingScale) -> Value {
    json!({ "N": int_value(&d.n), "witness": d.witness.as_deref().map(rats_value) })
}

pub fn subdivision_value(s: &Subdivision) -> Value {
    let fv = s.f_vector();
    let mut v = serde_json::to_value(s.complex().to_input()).unwrap();
    v["f_vector"] = json!(fv.iter().map(|(b, u)| b + u).collect::<Vec<_>>());
    v["unbounded"] = json!(fv.iter().map(|(_, u)| u).collect::<Vec<_>>());
    v
}

pub fn embedding_value(e: &Embedding) -> Value {
    let nf = e.vertex_images.len();
    json!({
        "target": e.target_labels,
        "vertices": e.vertex_images.iter().enumerate().map(|(x, y)| json!({
            "label": e.target_labels[x],
            "image": rats_value(y),
        })).collect::<Vec<_>>(),
        "rays": e.ray_images.iter().enumerate().map(|(b, y)| json!({
            "label": e.target_labels[nf + b],
            "image": ints_value(y),
        })).collect::<Vec<_>>(),
        "image_complex": serde_json::to_value(ComplexJson::from(&e.image)).unwrap(),
    })
}

pub fn lattice_value(c: &LatticeCertificate) -> Value {
    json!({
        "cells": c.cells.iter().map(|x| json!({
            "chain": x.chain,
            "rays": x.rays,
            "rank": x.rank,
            "unimodular": x.unimodular,
            "consecutive_pairs_suffice": x.consecutive_pairs_suffice,
        })).collect::<Vec<_>>(),
    })
}

pub fn lattice_violation_value(v: &LatticeViolation) -> Value {
    json!({
        "unimodular": false,
        "chain": v.chain,
        "rays": v.rays,
        "failure": format!("{:?}", v.failure),
    })
}

pub fn faithfulness_value(c: &FaithfulnessCertificate) -> Value {
    json!({
        "cells": c.cells.iter().map(|x| json!({ "cell": x.cell, "dim": x.dim, "unimodular": x.unimodular })).collect::<Vec<_>>(),
        "injective": c.injective,
        "pairwise": c.pairwise,
        "image_complex": serde_json::to_value(ComplexJson::from(&c.image)).unwrap(),
    })
}

pub fn faithfulness_violation_value(v: &FaithfulnessViolation) -> Value {
    match v {
        FaithfulnessViolation::NotInjective { cell_a, cell_b, u, v, image } => json!({
            "injective": false,
            "cells": [cell_a, cell_b],
            "points": [rats_value(u), rats_value(v)],
            "image": rats_value(image),
        }),
        FaithfulnessViolation::NotUnimodular { cell, index } => {
            json!({ "unimodular": false, "cell": cell, "index": int_value(index) })
        }
        other => json!({ "valid": false, "reason": other.to_string() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, ratio};

    #[test]
    fn polyhedron_round_trip() {
        let text = r#"{"dim": 2, "ineqs": [{"m": [1, 0], "g": "0"}, {"m": [-1, 0], "g": "1/2"}], "eqs": [{"m": [0, 1], "g": "-3"}]}"#;
        let p: PolyhedronJson = parse(text).unwrap();
        let poly = p.to_polyhedron().unwrap();
        assert!(poly.contains(&[ratio(1, 4), rat(3)]));
        let back: PolyhedronJson = parse(&to_pretty(&PolyhedronJson::from(&poly))).unwrap();
        assert_eq!(back.to_polyhedron().unwrap(), poly);
    }

    #[test]
    fn function_round_trip() {
        let text = r#"{"complex": {"dim": 1, "cells": [
            {"dim": 1, "ineqs": [{"m": [-1], "g": "1"}]},
            {"dim": 1, "ineqs": [{"m": [1], "g": "-1"}]}]},
          "pieces": [{"cell": 0, "m": [0], "g": "0"}, {"cell": 1, "m": [2], "g": "-2"}]}"#;
        let f: FunctionJson = parse(text).unwrap();
        let fa = f.build(true).unwrap().unwrap();
        assert_eq!(fa.eval(&[rat(3)]), Some(rat(4)));
        let again: FunctionJson = parse(&to_pretty(&FunctionJson::from(&fa))).unwrap();
        assert_eq!(again.build(false).unwrap().unwrap().eval(&[rat(3)]), Some(rat(4)));
    }

    #[test]
    fn big_integers_and_points() {
        let v: FormJson = parse(r#"{"m": ["123456789012345678901234567890"], "g": "1/3"}"#).unwrap();
        assert_eq!(v.m[0].to_string(), "123456789012345678901234567890");
        assert_eq!(parse_point("1/2, -3").unwrap(), vec![ratio(1, 2), rat(-3)]);
        assert_eq!(parse_point(r#"["1/2", 4]"#).unwrap(), vec![ratio(1, 2), rat(4)]);
        assert!(parse::<PolyhedronJson>("{\"dim\": 1, ").is_err());
    }
}
