#![allow(dead_code)]

use gauge2d_core::cartan::{CartanSystem, FieldDecl, Layout};
use gauge2d_core::{FieldElem, JetCoord};

pub fn phi(q: u32) -> FieldElem {
    FieldElem::jet(JetCoord::phi_a(0, q))
}

pub fn lam(p: u32, q: u32) -> FieldElem {
    FieldElem::jet(JetCoord::lambda(0, p, q))
}

pub fn g() -> FieldElem {
    FieldElem::param(0)
}

/// ∂φ = g/2 φ² − g/2 λ² − ∂̄λ
pub fn coupled() -> CartanSystem {
    let half_g = g().mul(&FieldElem::ratio(1, 2));
    let z = half_g
        .mul(&phi(0).mul(&phi(0)))
        .sub(&half_g.mul(&lam(0, 0).mul(&lam(0, 0))))
        .sub(&lam(0, 1));
    let layout = Layout::new(vec![FieldDecl::free("phi")], vec!["lam".into()], vec!["g".into()]);
    CartanSystem::new(layout, vec![z], vec![]).unwrap()
}

fn single(z: FieldElem) -> CartanSystem {
    let layout = Layout::new(vec![FieldDecl::free("phi")], vec!["lam".into()], vec!["g".into()]);
    CartanSystem::new(layout, vec![z], vec![]).unwrap()
}

/// The coupled system at g = 0: ∂φ = −∂̄λ
pub fn free_coupled() -> CartanSystem {
    coupled()
        .specialize(0, &num_rational::BigRational::from_integer(0.into()))
        .unwrap()
}

/// ∂φ = λ
pub fn trivial() -> CartanSystem {
    single(lam(0, 0))
}

/// ∂φ = ∂̄φ, no multipliers
pub fn gaugeless() -> CartanSystem {
    let layout = Layout::new(vec![FieldDecl::free("phi")], vec![], vec![]);
    CartanSystem::new(layout, vec![phi(1)], vec![]).unwrap()
}

/// Completely integrable pair: ∂u = 2λ, ∂v = λ, ∂̄u = 2∂̄v
pub fn integrable() -> CartanSystem {
    let layout = Layout::new(
        vec![FieldDecl::constrained("u"), FieldDecl::free("v")],
        vec!["lam".into()],
        vec![],
    );
    let two = FieldElem::from_int(2);
    let v1 = FieldElem::jet(JetCoord::phi_a(0, 1));
    CartanSystem::new(layout, vec![two.mul(&lam(0, 0)), lam(0, 0)], vec![two.mul(&v1)]).unwrap()
}

#[allow(unused_imports)]
pub use gauge2d_core::sample::{random_coeff, random_matrix, random_operator, random_ordinary};
