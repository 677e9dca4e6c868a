//! Random operators and matrices for property tests and benchmarks.
//!
//! Coefficients are small polynomials in `φ`, `∂̄φ`, `λ` and the first
//! parameter of a one-field, one-multiplier layout.

use rand::Rng;

use crate::jetfield::{FieldElem, JetCoord};
use crate::ore::OreOp;
use crate::orematrix::OreMatrix;

fn phi(q: u32) -> FieldElem {
    FieldElem::jet(JetCoord::phi_a(0, q))
}

fn lam() -> FieldElem {
    FieldElem::jet(JetCoord::lambda(0, 0, 0))
}

/// Small polynomial in φ, ∂̄φ, λ, g with integer coefficients in −2..=2.
pub fn random_coeff<R: Rng>(rng: &mut R) -> FieldElem {
    let atoms = [FieldElem::one(), phi(0), phi(1), lam(), FieldElem::param(0)];
    let mut c = FieldElem::zero();
    let terms = if rng.gen_bool(0.25) { 2 } else { 1 };
    for _ in 0..terms {
        let a = &atoms[rng.gen_range(0..atoms.len())];
        let k = rng.gen_range(-2..=2);
        c = c.add(&a.mul(&FieldElem::from_int(k)));
    }
    c
}

/// A random operator of ∂̄-order at most `max_order`, zero with probability
/// one half. Lower coefficients are sparse and the leading coefficient is
/// more often a constant, which keeps the elimination from swelling.
pub fn random_ordinary<R: Rng>(rng: &mut R, max_order: u32) -> OreOp {
    if rng.gen_bool(0.5) {
        return OreOp::zero();
    }
    let order = rng.gen_range(0..=max_order);
    let mut op = OreOp::zero();
    for q in 0..order {
        if rng.gen_bool(0.5) {
            op = op.add(&OreOp::monomial(random_coeff(rng), 0, q));
        }
    }
    let lead = if rng.gen_bool(0.6) {
        FieldElem::from_int([-2, -1, 1, 2][rng.gen_range(0..4)])
    } else {
        loop {
            let c = random_coeff(rng);
            if !c.is_zero() {
                break c;
            }
        }
    };
    op.add(&OreOp::monomial(lead, 0, order))
}

pub fn random_operator<R: Rng>(rng: &mut R, max_degree: u32, max_order: u32) -> OreOp {
    let mut op = OreOp::zero();
    for p in 0..=rng.gen_range(0..=max_degree) {
        for q in 0..=rng.gen_range(0..=max_order) {
            if rng.gen_bool(0.6) {
                op = op.add(&OreOp::monomial(random_coeff(rng), p, q));
            }
        }
    }
    op
}

pub fn random_matrix<R: Rng>(rng: &mut R, max_dim: usize, max_order: u32) -> OreMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| random_ordinary(rng, max_order)).collect())
        .collect();
    OreMatrix::from_rows(data, cols).unwrap()
}
