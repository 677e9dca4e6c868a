//! The on-shell differential field: exact rational functions of reduced jet
//! coordinates, with the total derivatives `∂` (time) and `∂̄` (space).
//!
//! Only reduced coordinates exist, so every derivative that the field
//! equations determine is substituted away as soon as it is produced. Weak
//! equality therefore is literal equality of [`FieldElem`]s.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{gcd, Poly, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetKind {
    /// A constrained field `φ^J`; none of its derivatives is a free coordinate.
    PhiJ,
    /// An unconstrained field `φ^a` and its `∂̄`-derivatives.
    PhiA,
    /// A multiplier `λ^α` with arbitrary mixed derivatives.
    Lambda,
}

/// One reduced jet coordinate `∂^p ∂̄^q` of a field of the given kind.
///
/// Ordered lexicographically by `(kind, index, p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetCoord {
    pub kind: JetKind,
    pub index: u32,
    pub p: u32,
    pub q: u32,
}

impl JetCoord {
    pub const fn new(kind: JetKind, index: u32, p: u32, q: u32) -> Self {
        JetCoord { kind, index, p, q }
    }

    pub const fn phi_j(index: u32) -> Self {
        JetCoord::new(JetKind::PhiJ, index, 0, 0)
    }

    pub const fn phi_a(index: u32, q: u32) -> Self {
        JetCoord::new(JetKind::PhiA, index, 0, q)
    }

    pub const fn lambda(index: u32, p: u32, q: u32) -> Self {
        JetCoord::new(JetKind::Lambda, index, p, q)
    }

    /// Whether the coordinate is reduced (not determined by the equations).
    pub fn is_reduced(&self) -> bool {
        match self.kind {
            JetKind::PhiJ => self.p == 0 && self.q == 0,
            JetKind::PhiA => self.p == 0,
            JetKind::Lambda => true,
        }
    }
}

/// How the derivations act on individual jet coordinates.
///
/// Implemented by [`crate::cartan::CartanSystem`]; the derivations of a
/// general [`FieldElem`] follow by the chain rule.
pub trait JetDerivations {
    fn dbar_jet(&self, jet: JetCoord) -> FieldElem;
    fn dtime_jet(&self, jet: JetCoord) -> FieldElem;
}

/// Element of the on-shell field: `num / den` in lowest terms with monic `den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

impl Default for FieldElem {
    fn default() -> Self {
        FieldElem::zero()
    }
}

impl From<Poly> for FieldElem {
    fn from(num: Poly) -> Self {
        FieldElem {
            num,
            den: Poly::one(),
        }
    }
}

impl FieldElem {
    pub fn zero() -> Self {
        Poly::zero().into()
    }

    pub fn one() -> Self {
        Poly::one().into()
    }

    pub fn from_int(n: i64) -> Self {
        Poly::from_int(n).into()
    }

    pub fn rational(c: BigRational) -> Self {
        Poly::constant(c).into()
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        FieldElem::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn jet(j: JetCoord) -> Self {
        Poly::var(Var::Jet(j)).into()
    }

    pub fn param(i: u32) -> Self {
        Poly::var(Var::Param(i)).into()
    }

    /// Builds `num / den` in canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(FieldElem::zero());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        Ok(FieldElem::normalized(num, den))
    }

    /// Scales so that `den` is monic; assumes the pair is already coprime.
    fn normalized(num: Poly, den: Poly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            FieldElem { num, den }
        } else {
            let inv = lc.recip();
            FieldElem {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Number of stored terms, used as a size measure for pivoting.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn jets(&self) -> BTreeSet<JetCoord> {
        self.vars()
            .into_iter()
            .filter_map(|v| match v {
                Var::Jet(j) => Some(j),
                Var::Param(_) => None,
            })
            .collect()
    }

    pub fn add(&self, rhs: &FieldElem) -> FieldElem {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, c, d) = (&self.num, &self.den, &rhs.num, &rhs.den);
        if b.is_one() && d.is_one() {
            return (a + c).into();
        }
        if b == d {
            return FieldElem::new(a + c, b.clone()).expect("nonzero denominator");
        }
        if b.is_one() {
            return FieldElem::normalized(&(a * d) + c, d.clone());
        }
        if d.is_one() {
            return FieldElem::normalized(a + &(c * b), b.clone());
        }
        let g = gcd(b, d);
        if g.is_one() {
            return FieldElem::normalized(&(a * d) + &(c * b), b * d);
        }
        let b1 = b.div_exact(&g).expect("gcd divides");
        let d1 = d.div_exact(&g).expect("gcd divides");
        let t = &(a * &d1) + &(c * &b1);
        if t.is_zero() {
            return FieldElem::zero();
        }
        let g2 = gcd(&t, &g);
        let num = t.div_exact(&g2).expect("gcd divides");
        let den = &b1 * &d.div_exact(&g2).expect("gcd divides");
        FieldElem::normalized(num, den)
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, rhs: &FieldElem) -> FieldElem {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &FieldElem) -> FieldElem {
        if self.is_zero() || rhs.is_zero() {
            return FieldElem::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return (&self.num * &rhs.num).into();
        }
        let (a, b, c, d) = (&self.num, &self.den, &rhs.num, &rhs.den);
        let g1 = gcd(a, d);
        let g2 = gcd(c, b);
        let a1 = a.div_exact(&g1).expect("gcd divides");
        let d1 = d.div_exact(&g1).expect("gcd divides");
        let c1 = c.div_exact(&g2).expect("gcd divides");
        let b1 = b.div_exact(&g2).expect("gcd divides");
        FieldElem::normalized(&a1 * &c1, &b1 * &d1)
    }

    pub fn scale(&self, c: &BigRational) -> FieldElem {
        if c.is_zero() {
            return FieldElem::zero();
        }
        FieldElem {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElem::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<FieldElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(FieldElem::normalized(base.num.pow(k), base.den.pow(k)))
    }

    /// Partial derivative with respect to a single coordinate or parameter.
    pub fn partial(&self, v: Var) -> FieldElem {
        let dn = self.num.partial(v);
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return FieldElem::new(dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        FieldElem::new(num, &self.den * &self.den).expect("nonzero denominator")
    }

    /// Applies the derivation fixed by its values on the variables.
    pub fn derive<F>(&self, image: F) -> FieldElem
    where
        F: Fn(Var) -> FieldElem,
    {
        let dn = derive_poly(&self.num, &image);
        if self.den.is_one() {
            return dn;
        }
        let dd = derive_poly(&self.den, &image);
        let den = FieldElem::from(self.den.clone());
        let inv_den = den.inv().expect("nonzero denominator");
        if dd.is_zero() {
            return dn.mul(&inv_den);
        }
        dn.sub(&self.mul(&dd)).mul(&inv_den)
    }

    /// Replaces a parameter by a rational value.
    pub fn substitute_param(&self, index: u32, value: &BigRational) -> Result<FieldElem> {
        let v = Var::Param(index);
        let c = Poly::constant(value.clone());
        FieldElem::new(self.num.substitute(v, &c), self.den.substitute(v, &c))
    }
}

fn derive_poly<F>(p: &Poly, image: &F) -> FieldElem
where
    F: Fn(Var) -> FieldElem,
{
    let mut poly_part = Poly::zero();
    let mut rest = FieldElem::zero();
    for v in p.vars() {
        let img = image(v);
        if img.is_zero() {
            continue;
        }
        let dp = p.partial(v);
        if img.is_polynomial() {
            poly_part = &poly_part + &(&dp * img.numer());
        } else {
            rest = rest.add(&FieldElem::from(dp).mul(&img));
        }
    }
    rest.add(&poly_part.into())
}

/// Total `∂̄`-derivative.
pub fn dbar<S: JetDerivations + ?Sized>(a: &FieldElem, sys: &S) -> FieldElem {
    a.derive(|v| match v {
        Var::Param(_) => FieldElem::zero(),
        Var::Jet(j) => sys.dbar_jet(j),
    })
}

/// Total `∂`-derivative.
pub fn dtime<S: JetDerivations + ?Sized>(a: &FieldElem, sys: &S) -> FieldElem {
    a.derive(|v| match v {
        Var::Param(_) => FieldElem::zero(),
        Var::Jet(j) => sys.dtime_jet(j),
    })
}

/// `dtime^p(dbar^q(a))`.
pub fn derivative<S: JetDerivations + ?Sized>(a: &FieldElem, p: u32, q: u32, sys: &S) -> FieldElem {
    let mut out = a.clone();
    for _ in 0..q {
        out = dbar(&out, sys);
    }
    for _ in 0..p {
        out = dtime(&out, sys);
    }
    out
}

pub(crate) fn binomial(n: u32, k: u32) -> BigRational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Free prolongation: `∂̄` and `∂` just raise the jet order.
    struct Free;

    impl JetDerivations for Free {
        fn dbar_jet(&self, j: JetCoord) -> FieldElem {
            FieldElem::jet(JetCoord { q: j.q + 1, ..j })
        }
        fn dtime_jet(&self, j: JetCoord) -> FieldElem {
            FieldElem::jet(JetCoord::lambda(j.index, j.p + 1, j.q))
        }
    }

    fn phi() -> FieldElem {
        FieldElem::jet(JetCoord::phi_a(0, 0))
    }
    fn lam() -> FieldElem {
        FieldElem::jet(JetCoord::lambda(0, 0, 0))
    }
    fn g() -> FieldElem {
        FieldElem::param(0)
    }

    #[test]
    fn subtraction_to_zero() {
        assert!(phi().sub(&phi()).is_zero());
    }

    #[test]
    fn cancellation() {
        let a = g().mul(&lam());
        assert_eq!(a.div(&lam()).unwrap(), g());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(phi().div(&FieldElem::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn times_coupling() {
        let f = FieldElem::jet(JetCoord::phi_a(0, 1)).add(&FieldElem::jet(JetCoord::lambda(0, 1, 0)));
        let gf = f.mul(&g());
        let expect = g()
            .mul(&FieldElem::jet(JetCoord::phi_a(0, 1)))
            .add(&g().mul(&FieldElem::jet(JetCoord::lambda(0, 1, 0))));
        assert_eq!(gf, expect);
    }

    #[test]
    fn chain_rule_on_square() {
        let sq = lam().mul(&lam());
        let half = dbar(&sq, &Free).scale(&BigRational::new(1.into(), 2.into()));
        assert_eq!(half, lam().mul(&FieldElem::jet(JetCoord::lambda(0, 0, 1))));
    }

    #[test]
    fn quotient_rule() {
        let a = FieldElem::one().div(&phi()).unwrap();
        let d = dbar(&a, &Free);
        let expect = FieldElem::jet(JetCoord::phi_a(0, 1))
            .neg()
            .div(&phi().mul(&phi()))
            .unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn canonical_denominator_is_monic() {
        let a = FieldElem::new(Poly::from_int(3), Poly::from_int(6)).unwrap();
        assert_eq!(a, FieldElem::ratio(1, 2));
        let b = FieldElem::from_int(2).div(&phi().scale(&BigRational::from_integer((-4).into()))).unwrap();
        assert!(b.denom().leading_coeff().is_one());
        assert_eq!(b, FieldElem::ratio(-1, 2).div(&phi()).unwrap());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigRational::from_integer(10.into()));
        assert_eq!(binomial(3, 0), BigRational::one());
    }
}
