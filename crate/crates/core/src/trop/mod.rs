//! The tropical semifield over Q, integral affine forms and min-plus expressions.

mod parse;
mod regions;

pub use parse::{parse_expr, parse_rational, ParseError};
pub use regions::{
    linearity_regions, rational_regions_on, regions_on, LinearityRegions, Region, RegionsError, MAX_REGION_DIM,
};

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::num::{dot_ir, fmt_rat, int, rat, rat_of, Int, Rat};

/// An element of `Q ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropValue {
    Finite(Rat),
    Infinity,
}

impl TropValue {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            TropValue::Finite(r) => Some(r),
            TropValue::Infinity => None,
        }
    }
}

impl From<Rat> for TropValue {
    fn from(r: Rat) -> Self {
        TropValue::Finite(r)
    }
}

impl Ord for TropValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropValue::Finite(a), TropValue::Finite(b)) => a.cmp(b),
            (TropValue::Finite(_), TropValue::Infinity) => Ordering::Less,
            (TropValue::Infinity, TropValue::Finite(_)) => Ordering::Greater,
            (TropValue::Infinity, TropValue::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for TropValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropValue::Finite(r) => f.write_str(&fmt_rat(r)),
            TropValue::Infinity => f.write_str("inf"),
        }
    }
}

/// Tropical sum `a ⊕ b = min(a, b)`.
pub fn trop_add(a: &TropValue, b: &TropValue) -> TropValue {
    a.min(b).clone()
}

/// Tropical product `a ⊙ b = a + b`; `∞` absorbs.
pub fn trop_mul(a: &TropValue, b: &TropValue) -> TropValue {
    match (a, b) {
        (TropValue::Finite(x), TropValue::Finite(y)) => TropValue::Finite(x + y),
        _ => TropValue::Infinity,
    }
}

/// `u ↦ ⟨m, u⟩ + γ` with integer slope `m` and rational constant `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineForm {
    pub slope: Vec<Int>,
    pub constant: Rat,
}

impl AffineForm {
    pub fn new(slope: Vec<Int>, constant: Rat) -> Self {
        AffineForm { slope, constant }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        AffineForm { slope: vec![Int::zero(); n], constant: c }
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(n, Rat::zero())
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut slope = vec![Int::zero(); n];
        slope[i] = int(1);
        AffineForm { slope, constant: Rat::zero() }
    }

    pub fn from_ints(slope: &[i64], constant: Rat) -> Self {
        AffineForm { slope: slope.iter().map(|&s| int(s)).collect(), constant }
    }

    pub fn dim(&self) -> usize {
        self.slope.len()
    }

    pub fn eval(&self, u: &[Rat]) -> Rat {
        dot_ir(&self.slope, u) + &self.constant
    }

    /// Directional derivative along `r`.
    pub fn slope_along(&self, r: &[Rat]) -> Rat {
        dot_ir(&self.slope, r)
    }

    pub fn slope_along_int(&self, r: &[Int]) -> Int {
        crate::num::dot_ii(&self.slope, r)
    }

    pub fn is_constant(&self) -> bool {
        self.slope.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &AffineForm) -> AffineForm {
        AffineForm {
            slope: self.slope.iter().zip(&o.slope).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &o.constant,
        }
    }

    pub fn sub(&self, o: &AffineForm) -> AffineForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> AffineForm {
        AffineForm {
            slope: self.slope.iter().map(|a| -a).collect(),
            constant: -&self.constant,
        }
    }

    pub fn scale(&self, k: &Int) -> AffineForm {
        AffineForm {
            slope: self.slope.iter().map(|a| a * k).collect(),
            constant: &self.constant * rat_of(k),
        }
    }

    /// Positive rescaling with primitive slope; `None` for constant forms.
    pub fn primitive(&self) -> Option<AffineForm> {
        let g = crate::num::gcd_all(&self.slope);
        if g.is_zero() {
            return None;
        }
        Some(AffineForm {
            slope: self.slope.iter().map(|a| a / &g).collect(),
            constant: &self.constant / rat_of(&g),
        })
    }

    /// Primitive and sign-normalized (first nonzero slope entry positive), so that a
    /// hyperplane has exactly one representative.
    pub fn hyperplane_key(&self) -> Option<AffineForm> {
        let p = self.primitive()?;
        let first = p.slope.iter().find(|x| !x.is_zero()).unwrap();
        Some(if first.is_negative() { p.neg() } else { p })
    }

    fn signed_terms(&self) -> Vec<(bool, String)> {
        let mut out = Vec::new();
        if !self.constant.is_zero() || self.is_constant() {
            out.push((self.constant.is_negative(), fmt_rat(&self.constant.abs())));
        }
        for (i, a) in self.slope.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mag = a.abs();
            let body = if mag == int(1) { format!("x{}", i + 1) } else { format!("{}*x{}", mag, i + 1) };
            out.push((a.is_negative(), body));
        }
        out
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&self.signed_terms()))
    }
}

fn join_signed(terms: &[(bool, String)]) -> String {
    let mut s = String::new();
    for (k, (neg, body)) in terms.iter().enumerate() {
        match (k, neg) {
            (0, false) => {}
            (0, true) => s.push('-'),
            (_, false) => s.push_str(" + "),
            (_, true) => s.push_str(" - "),
        }
        s.push_str(body);
    }
    s
}

/// Min-plus expression tree. `Sum` is `⊙`, `Min` is `⊕`, `Pow` an integer `⊙`-power.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TropExpr {
    Affine(AffineForm),
    Infinity,
    Min(Vec<TropExpr>),
    Sum(Vec<TropExpr>),
    Pow(Box<TropExpr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("inf - inf is undefined")]
    InfMinusInf,
    #[error("negative power of inf")]
    InverseOfInfinity,
}

impl TropExpr {
    pub fn constant(n: usize, c: Rat) -> Self {
        TropExpr::Affine(AffineForm::constant(n, c))
    }

    pub fn var(n: usize, i: usize) -> Self {
        TropExpr::Affine(AffineForm::var(n, i))
    }

    pub fn min_of(children: Vec<TropExpr>) -> Self {
        if children.len() == 1 {
            children.into_iter().next().unwrap()
        } else {
            TropExpr::Min(children)
        }
    }

    pub fn sum_of(children: Vec<TropExpr>) -> Self {
        if children.len() == 1 {
            children.into_iter().next().unwrap()
        } else {
            TropExpr::Sum(children)
        }
    }

    pub fn eval(&self, u: &[Rat]) -> Result<TropValue, EvalError> {
        Ok(match self {
            TropExpr::Affine(a) => {
                if a.dim() != u.len() {
                    return Err(EvalError::Dimension { expected: a.dim(), got: u.len() });
                }
                TropValue::Finite(a.eval(u))
            }
            TropExpr::Infinity => TropValue::Infinity,
            TropExpr::Min(cs) => {
                let mut acc = TropValue::Infinity;
                for c in cs {
                    acc = trop_add(&acc, &c.eval(u)?);
                }
                acc
            }
            TropExpr::Sum(cs) => {
                let mut acc = TropValue::Finite(Rat::zero());
                for c in cs {
                    acc = trop_mul(&acc, &c.eval(u)?);
                }
                acc
            }
            TropExpr::Pow(c, k) => match (c.eval(u)?, k) {
                (_, 0) => TropValue::Finite(Rat::zero()),
                (TropValue::Finite(v), k) => TropValue::Finite(v * rat(*k)),
                (TropValue::Infinity, k) if *k > 0 => TropValue::Infinity,
                (TropValue::Infinity, _) => return Err(EvalError::InverseOfInfinity),
            },
        })
    }

    /// All affine leaves, in tree order.
    pub fn leaves(&self) -> Vec<&AffineForm> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a AffineForm>) {
        match self {
            TropExpr::Affine(a) => out.push(a),
            TropExpr::Infinity => {}
            TropExpr::Min(cs) | TropExpr::Sum(cs) => cs.iter().for_each(|c| c.collect_leaves(out)),
            TropExpr::Pow(c, _) => c.collect_leaves(out),
        }
    }

    /// Maximum dimension used by any leaf (leaves of an expression share one dimension).
    pub fn dim(&self) -> Option<usize> {
        self.leaves().first().map(|a| a.dim())
    }

    /// A normal form for printing: flattened, affine parts merged, `min` children sorted by
    /// slope then constant, duplicates dropped. Semantics are unchanged.
    pub fn canonical(&self) -> TropExpr {
        match self {
            TropExpr::Affine(_) | TropExpr::Infinity => self.clone(),
            TropExpr::Pow(c, k) => match (c.canonical(), *k) {
                (_, 0) => TropExpr::constant(self.dim().unwrap_or(0), Rat::zero()),
                (c, 1) => c,
                (TropExpr::Affine(a), k) => TropExpr::Affine(a.scale(&int(k))),
                (TropExpr::Pow(inner, j), k) => TropExpr::Pow(inner, j * k),
                (c, k) => TropExpr::Pow(Box::new(c), k),
            },
            TropExpr::Min(cs) => {
                let mut flat = Vec::new();
                for c in cs {
                    match c.canonical() {
                        TropExpr::Min(inner) => flat.extend(inner),
                        TropExpr::Infinity => {}
                        other => flat.push(other),
                    }
                }
                if flat.is_empty() {
                    return TropExpr::Infinity;
                }
                flat.sort_by(canonical_order);
                flat.dedup();
                TropExpr::min_of(flat)
            }
            TropExpr::Sum(cs) => {
                let n = self.dim().unwrap_or(0);
                let mut aff: Option<AffineForm> = None;
                let mut rest = Vec::new();
                for c in cs {
                    let parts = match c.canonical() {
                        TropExpr::Sum(inner) => inner,
                        other => vec![other],
                    };
                    for p in parts {
                        match p {
                            TropExpr::Affine(a) => aff = Some(aff.map_or(a.clone(), |b| b.add(&a))),
                            TropExpr::Infinity => return TropExpr::Infinity,
                            other => rest.push(other),
                        }
                    }
                }
                rest.sort_by_key(|e| e.to_string());
                let mut out = Vec::new();
                match aff {
                    Some(a) if !(a.is_constant() && a.constant.is_zero() && !rest.is_empty()) => {
                        out.push(TropExpr::Affine(a))
                    }
                    None if rest.is_empty() => out.push(TropExpr::constant(n, Rat::zero())),
                    _ => {}
                }
                out.extend(rest);
                TropExpr::sum_of(out)
            }
        }
    }

    fn signed_terms(&self) -> Vec<(bool, String)> {
        match self {
            TropExpr::Affine(a) => a.signed_terms(),
            TropExpr::Sum(cs) => cs.iter().flat_map(|c| c.signed_terms()).collect(),
            TropExpr::Pow(c, k) => {
                let body = c.atom_string();
                let body = if k.abs() == 1 { body } else { format!("{}*{}", k.abs(), body) };
                vec![(*k < 0, body)]
            }
            other => vec![(false, other.atom_string())],
        }
    }

    fn atom_string(&self) -> String {
        match self {
            TropExpr::Infinity => "inf".into(),
            TropExpr::Min(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                format!("min({})", parts.join(", "))
            }
            other => format!("({other})"),
        }
    }
}

fn canonical_order(a: &TropExpr, b: &TropExpr) -> Ordering {
    match (a, b) {
        (TropExpr::Affine(x), TropExpr::Affine(y)) => {
            x.slope.cmp(&y.slope).then_with(|| x.constant.cmp(&y.constant))
        }
        (TropExpr::Affine(_), _) => Ordering::Less,
        (_, TropExpr::Affine(_)) => Ordering::Greater,
        _ => a.to_string().cmp(&b.to_string()),
    }
}

impl fmt::Display for TropExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&self.signed_terms()))
    }
}

/// `p ⊘ q`, evaluated as `p(u) − q(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropRational {
    pub num: TropExpr,
    pub den: TropExpr,
}

impl TropRational {
    pub fn new(num: TropExpr, den: TropExpr) -> Self {
        TropRational { num, den }
    }

    /// `e ⊘ 0`.
    pub fn from_expr(e: TropExpr, n: usize) -> Self {
        TropRational { num: e, den: TropExpr::constant(n, Rat::zero()) }
    }

    pub fn eval(&self, u: &[Rat]) -> Result<TropValue, EvalError> {
        match (self.num.eval(u)?, self.den.eval(u)?) {
            (TropValue::Finite(p), TropValue::Finite(q)) => Ok(TropValue::Finite(p - q)),
            (TropValue::Infinity, TropValue::Finite(_)) => Ok(TropValue::Infinity),
            _ => Err(EvalError::InfMinusInf),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.num.dim().or_else(|| self.den.dim())
    }

    pub fn leaves(&self) -> Vec<&AffineForm> {
        let mut l = self.num.leaves();
        l.extend(self.den.leaves());
        l
    }

    pub fn canonical(&self) -> TropRational {
        TropRational { num: self.num.canonical(), den: self.den.canonical() }
    }
}

impl fmt::Display for TropRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.num)?;
        match &self.den {
            TropExpr::Affine(a) if a.is_constant() && a.constant.is_zero() => Ok(()),
            TropExpr::Affine(a) if a.is_constant() && a.constant.is_negative() => {
                write!(f, " + {}", crate::num::fmt_rat(&-a.constant.clone()))
            }
            TropExpr::Affine(a) if a.is_constant() => write!(f, " - {}", crate::num::fmt_rat(&a.constant)),
            TropExpr::Affine(a) => write!(f, " - ({a})"),
            den => {
                for (neg, body) in den.signed_terms() {
                    write!(f, " {} {}", if neg { "+" } else { "-" }, body)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::ratio;

    fn fin(n: i64, d: i64) -> TropValue {
        TropValue::Finite(ratio(n, d))
    }

    #[test]
    fn semifield_operations() {
        assert_eq!(trop_add(&fin(3, 1), &fin(5, 1)), fin(3, 1));
        assert_eq!(trop_add(&TropValue::Infinity, &fin(-7, 2)), fin(-7, 2));
        assert_eq!(trop_add(&fin(-2, 3), &fin(-1, 1)), fin(-1, 1));
        assert_eq!(trop_mul(&fin(2, 1), &fin(3, 1)), fin(5, 1));
        assert_eq!(trop_mul(&TropValue::Infinity, &fin(4, 1)), TropValue::Infinity);
        assert_eq!(trop_mul(&fin(1, 2), &fin(1, 3)), fin(5, 6));
    }

    #[test]
    fn affine_printing() {
        let a = AffineForm::from_ints(&[3, -1], rat(2));
        assert_eq!(a.to_string(), "2 + 3*x1 - x2");
        assert_eq!(AffineForm::zero(2).to_string(), "0");
        assert_eq!(AffineForm::from_ints(&[-1], ratio(-1, 2)).to_string(), "-1/2 - x1");
    }

    #[test]
    fn hyperplane_keys_identify_opposite_forms() {
        let a = AffineForm::from_ints(&[2, -4], rat(6));
        let b = AffineForm::from_ints(&[-1, 2], rat(-3));
        assert_eq!(a.hyperplane_key(), b.hyperplane_key());
        assert!(AffineForm::zero(2).hyperplane_key().is_none());
    }

    #[test]
    fn evaluation_examples() {
        let e = TropExpr::Min(vec![TropExpr::var(1, 0), TropExpr::constant(1, rat(0))]);
        assert_eq!(e.eval(&[rat(2)]).unwrap(), fin(0, 1));
        let abs_neg = |i| {
            TropExpr::Min(vec![
                TropExpr::var(2, i),
                TropExpr::Affine(AffineForm::var(2, i).neg()),
            ])
        };
        let e = TropExpr::Sum(vec![abs_neg(0), abs_neg(1)]);
        assert_eq!(e.eval(&[rat(1), rat(-2)]).unwrap(), fin(-3, 1));
        let r = TropRational::new(
            TropExpr::var(1, 0),
            TropExpr::Min(vec![TropExpr::var(1, 0), TropExpr::constant(1, rat(0))]),
        );
        assert_eq!(r.eval(&[rat(-1)]).unwrap(), fin(0, 1));
    }

    #[test]
    fn infinite_evaluation() {
        let r = TropRational::new(TropExpr::Infinity, TropExpr::Infinity);
        assert_eq!(r.eval(&[]), Err(EvalError::InfMinusInf));
        let p = TropExpr::Pow(Box::new(TropExpr::Infinity), -1);
        assert_eq!(p.eval(&[]), Err(EvalError::InverseOfInfinity));
        let p = TropExpr::Pow(Box::new(TropExpr::Infinity), 0);
        assert_eq!(p.eval(&[]).unwrap(), fin(0, 1));
    }

    #[test]
    fn canonical_sorts_min_children() {
        let e = TropExpr::Min(vec![
            TropExpr::var(2, 0),
            TropExpr::constant(2, rat(1)),
            TropExpr::var(2, 1),
            TropExpr::var(2, 0),
        ]);
        assert_eq!(e.canonical().to_string(), "min(1, x2, x1)");
    }
}
