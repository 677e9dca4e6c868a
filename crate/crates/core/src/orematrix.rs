//! Matrices over `R̄ = F[∂̄]` and their Jacobson normal form.
//!
//! `jacobson` finds unimodular `U`, `V` with `U·M·V = diag(1,…,1,Δ,0,…)`,
//! keeping `U⁻¹` and `V⁻¹` alongside by applying the inverse of every
//! elementary operation.

use std::fmt;

use crate::cartan::CartanSystem;
use crate::error::{Error, Result};
use crate::jetfield::{FieldElem, JetDerivations};
use crate::ore::{self, OreOp};
use crate::poly::{self, Monomial, Poly};

#[derive(Clone, PartialEq, Eq)]
pub struct OreMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<OreOp>,
}

impl fmt::Debug for OreMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

impl OreMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        OreMatrix {
            rows,
            cols,
            entries: vec![OreOp::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = OreMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, OreOp::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<OreOp>>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(OreMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn row_vector(entries: Vec<OreOp>) -> Self {
        OreMatrix {
            rows: 1,
            cols: entries.len(),
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &OreOp {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: OreOp) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[OreOp] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[OreOp] {
        &self.entries
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> OreMatrix {
        OreMatrix {
            rows: end - start,
            cols: self.cols,
            entries: self.entries[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(OreOp::is_zero)
    }

    pub fn is_ordinary(&self) -> bool {
        self.entries.iter().all(OreOp::is_ordinary)
    }

    pub fn map(&self, f: impl FnMut(&OreOp) -> OreOp) -> OreMatrix {
        OreMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Plain transpose, no adjoint on the entries.
    pub fn transposed(&self) -> OreMatrix {
        let mut out = OreMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Formal adjoint `(Mᵀ)*`, entrywise transpose of the transposed matrix.
    pub fn adjoint<S: JetDerivations + ?Sized>(&self, sys: &S) -> OreMatrix {
        self.transposed().map(|e| ore::transpose(e, sys))
    }

    pub fn add(&self, rhs: &OreMatrix) -> Result<OreMatrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Dimension(format!(
                "{}×{} + {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(OreMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn mul<S: JetDerivations + ?Sized>(&self, rhs: &OreMatrix, sys: &S) -> Result<OreMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}×{} · {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = OreMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = OreOp::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&ore::mul(a, b, sys));
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Stacks matrices with equal column counts.
    pub fn vstack(parts: &[&OreMatrix]) -> Result<OreMatrix> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::Dimension("vstack of unequal widths".into()));
        }
        Ok(OreMatrix {
            rows: parts.iter().map(|m| m.rows).sum(),
            cols,
            entries: parts.iter().flat_map(|m| m.entries.iter().cloned()).collect(),
        })
    }
}

/// `U·M·V = diag(1,…,1,Δ)` padded with zeros.
#[derive(Clone, Debug)]
pub struct JacobsonDecomposition {
    pub u: OreMatrix,
    pub v: OreMatrix,
    pub u_inv: OreMatrix,
    pub v_inv: OreMatrix,
    pub rank: usize,
    /// Zero when the rank is zero.
    pub delta: OreOp,
}

impl JacobsonDecomposition {
    /// The diagonal block form for a matrix of the given shape.
    pub fn diagonal(&self) -> OreMatrix {
        let mut d = OreMatrix::zeros(self.u.rows(), self.v.rows());
        for t in 0..self.rank {
            let e = if t + 1 == self.rank {
                self.delta.clone()
            } else {
                OreOp::one()
            };
            d.set(t, t, e);
        }
        d
    }

    /// Checks `U·M·V = D`, `U·U⁻¹ = 1` and `V·V⁻¹ = 1` by exact multiplication.
    pub fn verify(&self, m: &OreMatrix, sys: &CartanSystem) -> Result<bool> {
        let umv = self.u.mul(m, sys)?.mul(&self.v, sys)?;
        Ok(umv == self.diagonal()
            && self.u.mul(&self.u_inv, sys)? == OreMatrix::identity(self.u.rows())
            && self.v.mul(&self.v_inv, sys)? == OreMatrix::identity(self.v.rows()))
    }
}

struct Work<'a> {
    m: OreMatrix,
    u: OreMatrix,
    ui: OreMatrix,
    v: OreMatrix,
    vi: OreMatrix,
    sys: &'a CartanSystem,
}

impl Work<'_> {
    fn mul(&self, a: &OreOp, b: &OreOp) -> OreOp {
        ore::mul(a, b, self.sys)
    }

    /// `row_i += c·row_j`
    fn row_add(&mut self, i: usize, j: usize, c: &OreOp) {
        if c.is_zero() {
            return;
        }
        for mat in [&mut self.m, &mut self.u] {
            for k in 0..mat.cols {
                let t = ore::mul(c, mat.get(j, k), self.sys);
                let new = mat.get(i, k).add(&t);
                mat.set(i, k, new);
            }
        }
        for k in 0..self.ui.rows {
            let t = self.mul(self.ui.get(k, i), c);
            let new = self.ui.get(k, j).sub(&t);
            self.ui.set(k, j, new);
        }
    }

    /// `col_j += col_i·c`
    fn col_add(&mut self, j: usize, i: usize, c: &OreOp) {
        if c.is_zero() {
            return;
        }
        for mat in [&mut self.m, &mut self.v] {
            for k in 0..mat.rows {
                let t = ore::mul(mat.get(k, i), c, self.sys);
                let new = mat.get(k, j).add(&t);
                mat.set(k, j, new);
            }
        }
        for k in 0..self.vi.cols {
            let t = self.mul(c, self.vi.get(j, k));
            let new = self.vi.get(i, k).sub(&t);
            self.vi.set(i, k, new);
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for mat in [&mut self.m, &mut self.u] {
            for k in 0..mat.cols {
                mat.entries.swap(i * mat.cols + k, j * mat.cols + k);
            }
        }
        for k in 0..self.ui.rows {
            let c = self.ui.cols;
            self.ui.entries.swap(k * c + i, k * c + j);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for mat in [&mut self.m, &mut self.v] {
            for k in 0..mat.rows {
                mat.entries.swap(k * mat.cols + i, k * mat.cols + j);
            }
        }
        let c = self.vi.cols;
        for k in 0..c {
            self.vi.entries.swap(i * c + k, j * c + k);
        }
    }

    /// `row_i = f·row_i` for nonzero `f ∈ F`.
    fn row_scale(&mut self, i: usize, f: &FieldElem) -> Result<()> {
        let inv = OreOp::scalar(f.inv()?);
        for mat in [&mut self.m, &mut self.u] {
            for k in 0..mat.cols {
                let new = mat.get(i, k).scale_left(f);
                mat.set(i, k, new);
            }
        }
        for k in 0..self.ui.rows {
            let new = self.mul(self.ui.get(k, i), &inv);
            self.ui.set(k, i, new);
        }
        Ok(())
    }

    /// `col_j = col_j·f` for nonzero `f ∈ F`.
    fn col_scale(&mut self, j: usize, f: &FieldElem) -> Result<()> {
        let inv = f.inv()?;
        let fop = OreOp::scalar(f.clone());
        for mat in [&mut self.m, &mut self.v] {
            for k in 0..mat.rows {
                let new = ore::mul(mat.get(k, j), &fop, self.sys);
                mat.set(k, j, new);
            }
        }
        for k in 0..self.vi.cols {
            let new = self.vi.get(j, k).scale_left(&inv);
            self.vi.set(j, k, new);
        }
        Ok(())
    }

    /// Left-scales row `i` so its entries have coprime polynomial coefficients.
    fn row_clean(&mut self, i: usize) -> Result<()> {
        let coeffs: Vec<FieldElem> = self
            .m
            .row(i)
            .iter()
            .flat_map(|e| e.terms().map(|(_, c)| c.clone()))
            .collect();
        if let Some(f) = primitive_factor(&coeffs, true) {
            self.row_scale(i, &f)?;
        }
        Ok(())
    }

    /// Right-scales column `j` likewise; the factor is read off the adjoints,
    /// since `E·f = (f·E*)*`.
    fn col_clean(&mut self, j: usize) -> Result<()> {
        let coeffs: Vec<FieldElem> = (0..self.m.rows)
            .map(|k| ore::transpose(self.m.get(k, j), self.sys))
            .flat_map(|e| e.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>())
            .collect();
        if let Some(f) = primitive_factor(&coeffs, false) {
            self.col_scale(j, &f)?;
        }
        Ok(())
    }

    /// Moves diagonal entry `a` to position `b` (both row and column).
    fn diag_swap(&mut self, a: usize, b: usize) {
        self.row_swap(a, b);
        self.col_swap(a, b);
    }

    /// Diagonalizes the block starting at `(start, start)`; returns the rank.
    fn staircase(&mut self, start: usize) -> Result<usize> {
        let (rows, cols) = (self.m.rows, self.m.cols);
        let mut t = start;
        while t < rows.min(cols) {
            let Some((pi, pj)) = self.pivot(t) else { break };
            self.row_swap(t, pi);
            self.col_swap(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if self.m.get(i, t).is_zero() {
                        continue;
                    }
                    let (q, r) = ore::divide_right(self.m.get(i, t), self.m.get(t, t), self.sys)?;
                    self.row_add(i, t, &q.neg());
                    self.row_clean(i)?;
                    clean &= r.is_zero();
                }
                // the row is only cleared once the column is
                for j in t + 1..cols {
                    if !clean {
                        break;
                    }
                    if self.m.get(t, j).is_zero() {
                        continue;
                    }
                    let (q, r) = ore::divide_left(self.m.get(t, j), self.m.get(t, t), self.sys)?;
                    self.col_add(j, t, &q.neg());
                    self.col_clean(j)?;
                    clean &= r.is_zero();
                }
                if clean {
                    break;
                }
                // some remainder now has lower order than the pivot
                let (i, j) = self.pivot(t).expect("a nonzero remainder exists");
                self.row_swap(t, i);
                self.col_swap(t, j);
            }
            t += 1;
        }
        Ok(t)
    }

    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((u32, bool, usize), (usize, usize))> = None;
        for i in t..self.m.rows {
            for j in t..self.m.cols {
                let e = self.m.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let k = key(e);
                if best.as_ref().is_none_or(|(bk, _)| k < *bk) {
                    best = Some((k, (i, j)));
                }
            }
        }
        best.map(|(_, p)| p)
    }

    fn normalize(&mut self, rank: usize) -> Result<()> {
        for t in 0..rank {
            let lc = self.m.get(t, t).leading_coeff();
            if !lc.is_one() {
                self.row_scale(t, &lc.inv()?)?;
            }
        }
        Ok(())
    }

    fn nonunits(&self, rank: usize) -> Vec<usize> {
        (0..rank).filter(|&t| self.m.get(t, t).order() > 0).collect()
    }

    /// Combines two nonunit diagonal entries at `rank−2`, `rank−1` so that
    /// the smaller order strictly drops.
    fn merge(&mut self, rank: usize, bound: u32) -> Result<()> {
        let (ia, ib) = (rank - 2, rank - 1);
        let a = self.m.get(ia, ia).clone();
        let b = self.m.get(ib, ib).clone();
        for r in mixing_candidates(&a, &b, self.sys, bound) {
            let rb = self.mul(&r, &b);
            let (q, rem) = ore::divide_left(&rb, &a, self.sys)?;
            if rem.is_zero() {
                continue;
            }
            self.row_add(ia, ib, &r);
            self.col_add(ib, ia, &q.neg());
            return Ok(());
        }
        Err(Error::DecompositionIncomplete {
            left: a.order(),
            right: b.order(),
        })
    }
}

/// `lcm(denominators) / content`, or `None` when that is 1. Rows divide by
/// the full numerator gcd; columns only by its monomial part, because a
/// right factor `1/c` has to be differentiated through `V`.
pub(crate) fn primitive_factor(coeffs: &[FieldElem], full: bool) -> Option<FieldElem> {
    let mut den = Poly::one();
    let mut content = Poly::zero();
    let mut mono: Option<Monomial> = None;
    for c in coeffs {
        let g = poly::gcd(&den, c.denom());
        den = &den * &c.denom().div_exact(&g).expect("gcd divides");
        if full {
            content = poly::gcd(&content, c.numer());
        }
        for (m, _) in c.numer().terms() {
            mono = Some(match mono {
                None => m.clone(),
                Some(acc) => acc.gcd(m),
            });
        }
    }
    if !full {
        let mono = mono.unwrap_or_else(Monomial::one);
        content = Poly::term(mono, num_rational::BigRational::from_integer(1.into()));
    }
    if content.is_zero() || (content.is_one() && den.is_one()) {
        return None;
    }
    FieldElem::new(den, content).ok()
}

/// Pivot preference: low order, then a constant leading coefficient (so the
/// quotients stay polynomial), then few terms.
fn key(e: &OreOp) -> (u32, bool, usize) {
    (e.order(), e.leading_coeff().constant_value().is_none(), e.size())
}

/// Left multipliers tried, in order, when mixing two diagonal entries.
fn mixing_candidates(a: &OreOp, b: &OreOp, sys: &CartanSystem, bound: u32) -> Vec<OreOp> {
    let mut jets: Vec<FieldElem> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let coeff_jets = a
        .terms()
        .chain(b.terms())
        .flat_map(|(_, c)| c.jets())
        .collect::<std::collections::BTreeSet<_>>();
    for j in coeff_jets.into_iter().chain(sys.reduced_jets(bound)) {
        if seen.insert(j) {
            jets.push(FieldElem::jet(j));
        }
    }
    let mut out = vec![OreOp::one()];
    out.extend(jets.iter().cloned().map(OreOp::scalar));
    out.extend(jets.iter().map(|j| OreOp::scalar(j.mul(j))));
    out.push(OreOp::dbar());
    out.extend(jets.iter().map(|j| OreOp::monomial(j.clone(), 0, 1)));
    out
}

pub fn jacobson(m: &OreMatrix, sys: &CartanSystem) -> Result<JacobsonDecomposition> {
    jacobson_with_bound(m, sys, sys.default_order_bound())
}

/// As [`jacobson`], searching mixing coefficients among jets up to `bound`.
pub fn jacobson_with_bound(
    m: &OreMatrix,
    sys: &CartanSystem,
    bound: u32,
) -> Result<JacobsonDecomposition> {
    if !m.is_ordinary() {
        return Err(Error::NotOrdinary);
    }
    let mut w = Work {
        m: m.clone(),
        u: OreMatrix::identity(m.rows),
        ui: OreMatrix::identity(m.rows),
        v: OreMatrix::identity(m.cols),
        vi: OreMatrix::identity(m.cols),
        sys,
    };
    let rank = w.staircase(0)?;
    w.normalize(rank)?;
    loop {
        let nonunits = w.nonunits(rank);
        if nonunits.len() < 2 {
            if let Some(&t) = nonunits.first() {
                w.diag_swap(t, rank - 1);
            }
            break;
        }
        // the lower-order entry goes first; it is the one whose order drops
        let a = *nonunits
            .iter()
            .min_by_key(|&&t| key(w.m.get(t, t)))
            .expect("two nonunits");
        let b = *nonunits.iter().find(|&&t| t != a).expect("two nonunits");
        w.diag_swap(a, rank - 2);
        let b = if b == rank - 2 { a } else { b };
        w.diag_swap(b, rank - 1);
        w.merge(rank, bound)?;
        w.staircase(rank - 2)?;
        w.normalize(rank)?;
    }
    let delta = if rank == 0 {
        OreOp::zero()
    } else {
        w.m.get(rank - 1, rank - 1).clone()
    };
    Ok(JacobsonDecomposition {
        u: w.u,
        v: w.v,
        u_inv: w.ui,
        v_inv: w.vi,
        rank,
        delta,
    })
}

pub fn rank(m: &OreMatrix, sys: &CartanSystem) -> Result<usize> {
    Ok(jacobson(m, sys)?.rank)
}

/// A free basis of `{x : x·M = 0}`, one row per basis element.
pub fn left_nullspace(m: &OreMatrix, sys: &CartanSystem) -> Result<OreMatrix> {
    let dec = jacobson(m, sys)?;
    Ok(dec.u.row_range(dec.rank, m.rows))
}

/// Some `x` with `x·M = v`, or `None` when `v` is not in the row module of `M`.
pub fn solve_left(m: &OreMatrix, v: &OreMatrix, sys: &CartanSystem) -> Result<Option<OreMatrix>> {
    let dec = jacobson(m, sys)?;
    solve_left_with(&dec, m, v, sys)
}

/// [`solve_left`] against a precomputed decomposition of `m`.
pub fn solve_left_with(
    dec: &JacobsonDecomposition,
    m: &OreMatrix,
    v: &OreMatrix,
    sys: &CartanSystem,
) -> Result<Option<OreMatrix>> {
    if v.rows != 1 || v.cols != m.cols {
        return Err(Error::Dimension(format!(
            "right-hand side is {}×{}, expected 1×{}",
            v.rows, v.cols, m.cols
        )));
    }
    if !v.is_ordinary() {
        return Err(Error::NotOrdinary);
    }
    let w = v.mul(&dec.v, sys)?;
    if (dec.rank..m.cols).any(|j| !w.get(0, j).is_zero()) {
        return Ok(None);
    }
    let mut y = OreMatrix::zeros(1, m.rows);
    for j in 0..dec.rank {
        if j + 1 == dec.rank {
            let (q, r) = ore::divide_right(w.get(0, j), &dec.delta, sys)?;
            if !r.is_zero() {
                return Ok(None);
            }
            y.set(0, j, q);
        } else {
            y.set(0, j, w.get(0, j).clone());
        }
    }
    Ok(Some(y.mul(&dec.u, sys)?))
}

/// Rows freely generating the row module of `generators`.
pub fn free_basis(generators: &OreMatrix, sys: &CartanSystem) -> Result<OreMatrix> {
    let dec = jacobson(generators, sys)?;
    let mut rows = Vec::with_capacity(dec.rank);
    for t in 0..dec.rank {
        let row = dec.v_inv.row(t).to_vec();
        if t + 1 == dec.rank {
            rows.push(row.iter().map(|e| ore::mul(&dec.delta, e, sys)).collect());
        } else {
            rows.push(row);
        }
    }
    OreMatrix::from_rows(rows, generators.cols)
}
