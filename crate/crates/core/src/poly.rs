//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are jet coordinates and symbolic parameters. Monomials are
//! compared lexicographically with variables taken in descending order, which
//! is a monomial order, so leading terms are multiplicative and exact
//! division by leading terms terminates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::jetfield::JetCoord;

/// A polynomial variable.
///
/// Parameters sort below every jet coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Param(u32),
    Jet(JetCoord),
}

/// Power product, stored as `(var, exponent)` pairs sorted by descending var.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (va, ea) = self.0[i];
            let (vb, eb) = other.0[j];
            match va.cmp(&vb) {
                Ordering::Greater => {
                    out.push((va, ea));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((vb, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 > v {
                return None;
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(w, _)| *w != v).collect())
    }

    fn with_power(&self, v: Var, e: u32) -> Monomial {
        if e == 0 {
            return self.clone();
        }
        self.mul(&Monomial(vec![(v, e)]))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = other.degree_in(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => {
                    if va == vb {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    } else {
                        return va.cmp(vb);
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (v, e) in m.factors() {
                write!(f, "*{:?}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Monomial::var(v), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| *v))
            .collect()
    }

    /// The largest variable occurring in the polynomial.
    pub fn main_var(&self) -> Option<Var> {
        self.terms
            .keys()
            .filter_map(|m| m.factors().first().map(|(v, _)| *v))
            .max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.clone(), d * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, d)| (n.mul(m), d * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Same polynomial scaled to leading coefficient 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn rational_content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::one();
        }
        BigRational::new(num, den)
    }

    pub fn partial(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e == 0 {
                continue;
            }
            let rest = m.without(v).with_power(v, e - 1);
            out.add_term(rest, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Replace every occurrence of `v` by `value`.
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        let mut powers: Vec<Poly> = vec![Poly::one()];
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(v) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let rest = m.without(v);
            out = &out + &powers[e].mul_monomial(&rest, c);
        }
        out
    }

    /// Coefficients with respect to `v`: `self = Σ coeffs[k] v^k`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.degree_in(v) as usize;
            out[e].add_term(m.without(v), c.clone());
        }
        out
    }

    pub fn from_coefficients(v: Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, q) in &c.terms {
                out.add_term(m.with_power(v, k as u32), q.clone());
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(&lm)?;
            let c = rc / &lc;
            rem = &rem - &d.mul_monomial(&m, &c);
            quot.add_term(m, c);
        }
        Some(quot)
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

/// Monic greatest common divisor over ℚ. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    if a.len() == 1 || b.len() == 1 {
        return monomial_gcd(a, b);
    }
    if modular::coprime(a, b) {
        return Poly::one();
    }
    let x = a.main_var().max(b.main_var()).expect("non-constant");
    let (da, db) = (a.degree_in(x), b.degree_in(x));
    if da == 0 {
        return gcd(a, &content_in(b, x));
    }
    if db == 0 {
        return gcd(&content_in(a, x), b);
    }
    // Cheap exact-divisibility probes cover the common case of a repeated factor.
    if da <= db {
        if b.div_exact(a).is_some() {
            return a.monic();
        }
    } else if a.div_exact(b).is_some() {
        return b.monic();
    }
    let ca = content_in(a, x);
    let cb = content_in(b, x);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = primitive_prs(pa, pb, x);
    (&c * &g).monic()
}

fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut it = a.terms.keys().chain(b.terms.keys());
    let first = it.next().expect("nonzero").clone();
    let m = it.fold(first, |acc, m| acc.gcd(m));
    Poly::term(m, BigRational::one())
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
pub fn content_in(p: &Poly, x: Var) -> Poly {
    let mut coeffs: Vec<Poly> = p
        .coefficients_in(x)
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    coeffs.sort_by_key(Poly::len);
    let mut g = Poly::zero();
    for c in coeffs {
        g = gcd(&g, &c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn primitive_part_in(p: &Poly, x: Var) -> Poly {
    let c = content_in(p, x);
    let pp = p.div_exact(&c).expect("content divides");
    let r = pp.rational_content();
    pp.scale(&r.recip())
}

fn prem(a: &Poly, b: &Poly, x: Var) -> Poly {
    let bc = b.coefficients_in(x);
    let db = bc.len() - 1;
    let lb = bc[db].clone();
    let mut r = a.coefficients_in(x);
    trim(&mut r);
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| &lb * c).collect();
        for (k, c) in bc.iter().enumerate() {
            let t = &lr * c;
            next[k + shift] = &next[k + shift] - &t;
        }
        r = next;
        trim(&mut r);
    }
    Poly::from_coefficients(x, &r)
}

fn trim(v: &mut Vec<Poly>) {
    while v.len() > 1 && v.last().is_some_and(Poly::is_zero) {
        v.pop();
    }
}

fn primitive_prs(mut a: Poly, mut b: Poly, x: Var) -> Poly {
    if a.degree_in(x) < b.degree_in(x) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.degree_in(x) == 0 {
            return Poly::one();
        }
        let r = prem(&a, &b, x);
        if r.is_zero() {
            return primitive_part_in(&b, x).monic();
        }
        a = b;
        b = primitive_part_in(&r, x);
    }
}

/// Coprimality certificate through univariate images modulo a prime.
///
/// If `g = gcd(a, b)` has positive degree in `x`, every evaluation of the
/// other variables that keeps the leading coefficient of `a` in `x`
/// nonzero maps `g` to a common factor of the same degree. So coprime
/// images in every shared variable prove `g = 1`. A `false` answer is
/// inconclusive.
mod modular {
    use super::{Poly, Var};
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use std::collections::BTreeSet;

    const P: u64 = (1 << 61) - 1;

    fn mulm(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn powm(mut b: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    }

    fn inv(a: u64) -> u64 {
        powm(a, P - 2)
    }

    fn reduce(n: &BigInt) -> u64 {
        let m = n % BigInt::from(P);
        let m = if m < BigInt::from(0) { m + BigInt::from(P) } else { m };
        m.to_u64().expect("reduced below the modulus")
    }

    /// Fixed pseudo-random evaluation point for a variable.
    fn point(v: Var, salt: u64) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        std::hash::Hash::hash(&(v, salt), &mut h);
        std::hash::Hasher::finish(&h) % (P - 2) + 2
    }

    /// Image of `p` in `F_p[x]`; `None` if a denominator vanishes mod p.
    fn image(p: &Poly, x: Var, salt: u64) -> Option<Vec<u64>> {
        let mut out = vec![0u64; p.degree_in(x) as usize + 1];
        for (m, c) in p.terms() {
            let d = reduce(c.denom());
            if d == 0 {
                return None;
            }
            let mut t = mulm(reduce(c.numer()), inv(d));
            let mut k = 0;
            for &(v, e) in m.factors() {
                if v == x {
                    k = e as usize;
                } else {
                    t = mulm(t, powm(point(v, salt), e as u64));
                }
            }
            out[k] = (out[k] + t) % P;
        }
        Some(out)
    }

    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Degree of the gcd of two nonzero univariate polynomials.
    fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let lb = inv(*b.last().expect("nonempty"));
            while a.len() >= b.len() {
                let f = mulm(*a.last().expect("nonempty"), lb);
                let shift = a.len() - b.len();
                for (k, &c) in b.iter().enumerate() {
                    a[k + shift] = (a[k + shift] + P - mulm(f, c)) % P;
                }
                trim(&mut a);
            }
            std::mem::swap(&mut a, &mut b);
        }
        a.len() - 1
    }

    pub(super) fn coprime(a: &Poly, b: &Poly) -> bool {
        let shared: BTreeSet<Var> = a.vars().intersection(&b.vars()).copied().collect();
        for &x in &shared {
            let ok = (0..2).any(|salt| {
                let (Some(ia), Some(ib)) = (image(a, x, salt), image(b, x, salt)) else {
                    return false;
                };
                if ia.last() == Some(&0) || ib.last() == Some(&0) {
                    return false;
                }
                gcd_degree(ia, ib) == 0
            });
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetfield::{JetCoord, JetKind};

    fn x() -> Poly {
        Poly::var(Var::Jet(JetCoord::new(JetKind::PhiA, 0, 0, 0)))
    }
    fn y() -> Poly {
        Poly::var(Var::Jet(JetCoord::new(JetKind::PhiA, 0, 0, 1)))
    }
    fn z() -> Poly {
        Poly::var(Var::Jet(JetCoord::new(JetKind::Lambda, 0, 1, 0)))
    }
    fn g() -> Poly {
        Poly::var(Var::Param(0))
    }
    fn int(n: i64) -> Poly {
        Poly::from_int(n)
    }

    #[test]
    fn ring_basics() {
        let p = &x() + &y();
        let q = &p * &p;
        let expect = &(&(&x() * &x()) + &(&int(2) * &(&x() * &y()))) + &(&y() * &y());
        assert_eq!(q, expect);
        assert!((&q - &q).is_zero());
        assert_eq!(p.pow(3), &q * &p);
    }

    #[test]
    fn exact_division() {
        let a = &(&x() + &y()) * &(&x() - &g());
        assert_eq!(a.div_exact(&(&x() + &y())), Some(&x() - &g()));
        assert_eq!(a.div_exact(&(&x() + &int(1))), None);
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let f = &(&x() * &y()) + &(&g() * &z());
        let a = &f * &(&x() + &int(3));
        let b = &f * &(&(&y() * &y()) - &z());
        let d = gcd(&a, &b);
        assert_eq!(d, f.monic());
        let one = gcd(&(&x() + &int(1)), &(&x() - &int(1)));
        assert!(one.is_one());
    }

    #[test]
    fn gcd_with_powers() {
        let f = &x() + &(&g() * &y());
        let a = f.pow(3);
        let b = &f.pow(2) * &(&z() + &int(1));
        assert_eq!(gcd(&a, &b), f.pow(2).monic());
    }

    #[test]
    fn substitution_and_partials() {
        let p = &(&x() * &x()) + &(&g() * &y());
        assert_eq!(p.partial(Var::Param(0)), y());
        assert_eq!(p.substitute(Var::Param(0), &Poly::zero()), &x() * &x());
        let dp = p.partial(match x().main_var() {
            Some(v) => v,
            None => unreachable!(),
        });
        assert_eq!(dp, &int(2) * &x());
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let a = Monomial::var(Var::Param(0));
        let b = Monomial::var(Var::Jet(JetCoord::new(JetKind::PhiA, 0, 0, 0)));
        assert!(a < b);
        let c = Monomial::var(Var::Jet(JetCoord::new(JetKind::Lambda, 0, 0, 0)));
        assert_eq!(a.mul(&c).cmp(&b.mul(&c)), Ordering::Less);
    }
}
