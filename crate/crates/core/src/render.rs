//! Canonical text for field elements and operators.
//!
//! The output uses the expression grammar of the system files, so every
//! rendered value parses back to an equal value.

use num_traits::One;

use crate::cartan::Layout;
use crate::jetfield::{FieldElem, JetCoord, JetKind};
use crate::ore::OreOp;
use crate::poly::{Monomial, Poly, Var};

pub fn jet(j: JetCoord, layout: &Layout) -> String {
    let base = match j.kind {
        JetKind::Lambda => layout
            .lambdas
            .get(j.index as usize)
            .cloned()
            .unwrap_or_else(|| format!("lambda#{}", j.index)),
        _ => layout
            .field_of(j)
            .map(|i| layout.fields[i].name.clone())
            .unwrap_or_else(|| format!("field#{}", j.index)),
    };
    let mut s = base;
    for _ in 0..j.q {
        s = format!("dbar({s})");
    }
    for _ in 0..j.p {
        s = format!("d({s})");
    }
    s
}

pub fn var(v: Var, layout: &Layout) -> String {
    match v {
        Var::Param(k) => layout
            .params
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| format!("param#{k}")),
        Var::Jet(j) => jet(j, layout),
    }
}

fn monomial(m: &Monomial, layout: &Layout) -> String {
    m.factors()
        .iter()
        .map(|&(v, e)| {
            if e == 1 {
                var(v, layout)
            } else {
                format!("{}^{e}", var(v, layout))
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn join_signed(parts: impl IntoIterator<Item = String>) -> String {
    let mut out = String::new();
    for (i, p) in parts.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&p);
        }
    }
    out
}

pub fn poly(p: &Poly, layout: &Layout) -> String {
    if p.is_zero() {
        return "0".into();
    }
    join_signed(p.terms().rev().map(|(m, c)| {
        if m.is_one() {
            c.to_string()
        } else if c.is_one() {
            monomial(m, layout)
        } else if (-c).is_one() {
            format!("-{}", monomial(m, layout))
        } else {
            format!("{c}*{}", monomial(m, layout))
        }
    }))
}

fn is_atom(p: &Poly) -> bool {
    p.len() == 1
        && p.leading().is_some_and(|(m, c)| c.is_one() && m.factors().len() == 1)
}

pub fn field_elem(e: &FieldElem, layout: &Layout) -> String {
    let num = poly(e.numer(), layout);
    if e.denom().is_one() {
        return num;
    }
    let num = if e.numer().len() > 1 { format!("({num})") } else { num };
    let den = poly(e.denom(), layout);
    let den = if is_atom(e.denom()) { den } else { format!("({den})") };
    format!("{num}/{den}")
}

/// Operator text such as `(g*lam)*D*Dbar - Dbar^2`.
pub fn op(a: &OreOp, layout: &Layout) -> String {
    if a.is_zero() {
        return "0".into();
    }
    join_signed(a.terms().rev().map(|(&(p, q), c)| {
        let mut sym = Vec::new();
        match p {
            0 => {}
            1 => sym.push("D".to_string()),
            _ => sym.push(format!("D^{p}")),
        }
        match q {
            0 => {}
            1 => sym.push("Dbar".to_string()),
            _ => sym.push(format!("Dbar^{q}")),
        }
        let sym = sym.join("*");
        let coeff = field_elem(c, layout);
        match (sym.is_empty(), c.is_one(), c.neg().is_one()) {
            (true, _, _) if c.is_one() => "1".into(),
            (true, _, _) => format!("({coeff})"),
            (false, true, _) => sym,
            (false, _, true) => format!("-{sym}"),
            (false, _, _) => format!("({coeff})*{sym}"),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::FieldDecl;

    fn layout() -> Layout {
        Layout::new(vec![FieldDecl::free("phi")], vec!["lam".into()], vec!["g".into()])
    }

    #[test]
    fn jets_nest_derivatives() {
        let l = layout();
        assert_eq!(jet(JetCoord::phi_a(0, 2), &l), "dbar(dbar(phi))");
        assert_eq!(jet(JetCoord::lambda(0, 1, 1), &l), "d(dbar(lam))");
    }

    #[test]
    fn fractions_and_signs() {
        let l = layout();
        let g = FieldElem::param(0);
        let phi = FieldElem::jet(JetCoord::phi_a(0, 0));
        let e = g.mul(&phi).sub(&FieldElem::ratio(3, 4)).div(&phi.add(&g)).unwrap();
        let s = field_elem(&e, &l);
        assert!(s.contains(")/("), "{s}");
        let op_text = op(
            &OreOp::monomial(g.neg(), 1, 0).add(&OreOp::dbar()).add(&OreOp::scalar(phi)),
            &l,
        );
        assert_eq!(op_text, "(-g)*D + Dbar + (phi)");
    }
}
