//! The skew polynomial rings `R = F[∂,∂̄]` and `R̄ = F[∂̄]`.
//!
//! Operators are kept normal-ordered as `Σ c_{pq} ∂^p ∂̄^q` with the
//! coefficients on the left. Elements with no `∂` are the ordinary
//! operators of `R̄`.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jetfield::{binomial, dbar, derivative, dtime, FieldElem, JetDerivations};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OreOp {
    terms: BTreeMap<(u32, u32), FieldElem>,
}

impl OreOp {
    pub fn zero() -> Self {
        OreOp::default()
    }

    pub fn one() -> Self {
        OreOp::scalar(FieldElem::one())
    }

    pub fn scalar(c: FieldElem) -> Self {
        OreOp::monomial(c, 0, 0)
    }

    /// `c·∂^p∂̄^q`
    pub fn monomial(c: FieldElem, p: u32, q: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((p, q), c);
        }
        OreOp { terms }
    }

    pub fn d() -> Self {
        OreOp::monomial(FieldElem::one(), 1, 0)
    }

    pub fn dbar() -> Self {
        OreOp::monomial(FieldElem::one(), 0, 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), FieldElem)>) -> Self {
        let mut op = OreOp::zero();
        for ((p, q), c) in terms {
            op.add_term(p, q, &c);
        }
        op
    }

    fn add_term(&mut self, p: u32, q: u32, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((p, q)).or_default();
        *slot = slot.add(c);
        if slot.is_zero() {
            self.terms.remove(&(p, q));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0, 0).is_one()
    }

    /// Terms in increasing `(p, q)` order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&(u32, u32), &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: u32, q: u32) -> FieldElem {
        self.terms.get(&(p, q)).cloned().unwrap_or_default()
    }

    /// `∂`-degree; zero for the zero operator.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(p, _)| p).max().unwrap_or(0)
    }

    /// `∂̄`-order; zero for the zero operator.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|&(_, q)| q).max().unwrap_or(0)
    }

    pub fn is_ordinary(&self) -> bool {
        self.terms.keys().all(|&(p, _)| p == 0)
    }

    /// Leading coefficient of an ordinary operator.
    pub fn leading_coeff(&self) -> FieldElem {
        self.coeff(0, self.order())
    }

    /// The `R̄`-coefficient of `∂^k`, i.e. `Σ_q c_{kq} ∂̄^q`.
    pub fn level(&self, k: u32) -> OreOp {
        OreOp {
            terms: self
                .terms
                .iter()
                .filter(|((p, _), _)| *p == k)
                .map(|(&(_, q), c)| ((0, q), c.clone()))
                .collect(),
        }
    }

    /// `Σ_k levels[k]·∂^k` for ordinary `levels[k]`.
    pub fn from_levels(levels: &[OreOp]) -> OreOp {
        let mut out = OreOp::zero();
        for (k, lv) in levels.iter().enumerate() {
            for (&(p, q), c) in &lv.terms {
                out.add_term(p + k as u32, q, c);
            }
        }
        out
    }

    /// Total number of polynomial terms in all coefficients.
    pub fn size(&self) -> usize {
        self.terms.values().map(FieldElem::size).sum()
    }

    pub fn add(&self, rhs: &OreOp) -> OreOp {
        let mut out = self.clone();
        for (&(p, q), c) in &rhs.terms {
            out.add_term(p, q, c);
        }
        out
    }

    pub fn neg(&self) -> OreOp {
        OreOp {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, rhs: &OreOp) -> OreOp {
        self.add(&rhs.neg())
    }

    /// `f·A`; multiplication by a field element on the left needs no commutation.
    pub fn scale_left(&self, f: &FieldElem) -> OreOp {
        if f.is_zero() {
            return OreOp::zero();
        }
        OreOp {
            terms: self.terms.iter().map(|(k, c)| (*k, f.mul(c))).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> OreOp {
        if c.is_zero() {
            return OreOp::zero();
        }
        OreOp {
            terms: self.terms.iter().map(|(k, x)| (*k, x.scale(c))).collect(),
        }
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, mut f: impl FnMut(&FieldElem) -> FieldElem) -> OreOp {
        OreOp::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    /// Coefficientwise `∂`: `Σ ∂(c_{pq}) ∂^p∂̄^q`.
    pub fn dtime_coeffs<S: JetDerivations + ?Sized>(&self, sys: &S) -> OreOp {
        self.map_coeffs(|c| dtime(c, sys))
    }

    pub fn dbar_coeffs<S: JetDerivations + ?Sized>(&self, sys: &S) -> OreOp {
        self.map_coeffs(|c| dbar(c, sys))
    }
}

/// Derivatives `∂^i ∂̄^j b` of one coefficient, computed on demand.
struct DerivCache<'a, S: ?Sized> {
    base: &'a FieldElem,
    sys: &'a S,
    memo: HashMap<(u32, u32), FieldElem>,
}

impl<'a, S: JetDerivations + ?Sized> DerivCache<'a, S> {
    fn new(base: &'a FieldElem, sys: &'a S) -> Self {
        DerivCache {
            base,
            sys,
            memo: HashMap::new(),
        }
    }

    fn get(&mut self, i: u32, j: u32) -> FieldElem {
        if i == 0 && j == 0 {
            return self.base.clone();
        }
        if let Some(v) = self.memo.get(&(i, j)) {
            return v.clone();
        }
        let v = if j > 0 {
            dbar(&self.get(i, j - 1), self.sys)
        } else {
            dtime(&self.get(i - 1, 0), self.sys)
        };
        self.memo.insert((i, j), v.clone());
        v
    }
}

/// Normal-ordered product `A·B`.
pub fn mul<S: JetDerivations + ?Sized>(a: &OreOp, b: &OreOp, sys: &S) -> OreOp {
    let mut out = OreOp::zero();
    if a.is_zero() || b.is_zero() {
        return out;
    }
    for (&(r, s), bc) in &b.terms {
        let mut cache = DerivCache::new(bc, sys);
        for (&(p, q), ac) in &a.terms {
            // ∂^p∂̄^q·b = Σ C(p,i)C(q,j) (∂^{p−i}∂̄^{q−j} b) ∂^i∂̄^j
            for i in 0..=p {
                for j in 0..=q {
                    let db = cache.get(p - i, q - j);
                    if db.is_zero() {
                        continue;
                    }
                    let c = binomial(p, i) * binomial(q, j);
                    let term = ac.mul(&db).scale(&c);
                    out.add_term(i + r, j + s, &term);
                }
            }
        }
    }
    out
}

/// `A(f) = Σ c_{pq} ∂^p∂̄^q f`.
pub fn apply<S: JetDerivations + ?Sized>(a: &OreOp, f: &FieldElem, sys: &S) -> FieldElem {
    a.terms.iter().fold(FieldElem::zero(), |acc, (&(p, q), c)| {
        acc.add(&c.mul(&derivative(f, p, q, sys)))
    })
}

fn check_ordinary(ops: &[&OreOp]) -> Result<()> {
    if ops.iter().all(|o| o.is_ordinary()) {
        Ok(())
    } else {
        Err(Error::NotOrdinary)
    }
}

/// Right division in `R̄`: `A = Q·B + R` with `order(R) < order(B)`.
pub fn divide_right<S: JetDerivations + ?Sized>(
    a: &OreOp,
    b: &OreOp,
    sys: &S,
) -> Result<(OreOp, OreOp)> {
    check_ordinary(&[a, b])?;
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ob = b.order();
    let lb = b.leading_coeff();
    let mut q = OreOp::zero();
    let mut r = a.clone();
    while !r.is_zero() && r.order() >= ob {
        let shift = r.order() - ob;
        let t = OreOp::monomial(r.leading_coeff().div(&lb)?, 0, shift);
        r = r.sub(&mul(&t, b, sys));
        q = q.add(&t);
    }
    Ok((q, r))
}

/// Left division in `R̄`: `A = B·Q + R` with `order(R) < order(B)`.
pub fn divide_left<S: JetDerivations + ?Sized>(
    a: &OreOp,
    b: &OreOp,
    sys: &S,
) -> Result<(OreOp, OreOp)> {
    check_ordinary(&[a, b])?;
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ob = b.order();
    let lb = b.leading_coeff();
    let mut q = OreOp::zero();
    let mut r = a.clone();
    while !r.is_zero() && r.order() >= ob {
        let shift = r.order() - ob;
        let t = OreOp::monomial(r.leading_coeff().div(&lb)?, 0, shift);
        r = r.sub(&mul(b, &t, sys));
        q = q.add(&t);
    }
    Ok((q, r))
}

/// Formal adjoint: `(f∂^n∂̄^m)* = (−1)^{n+m} ∂^n∂̄^m·f`, normal-ordered.
pub fn transpose<S: JetDerivations + ?Sized>(a: &OreOp, sys: &S) -> OreOp {
    let mut out = OreOp::zero();
    for (&(p, q), c) in &a.terms {
        let sign = if (p + q) % 2 == 0 {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        let d = OreOp::monomial(FieldElem::rational(sign), p, q);
        out = out.add(&mul(&d, &OreOp::scalar(c.clone()), sys));
    }
    out
}
