//! Independent checks of pipeline output against the linearized equations.

use crate::cartan::CartanSystem;
use crate::error::Result;
use crate::jetfield::{FieldElem, JetKind};
use crate::noether::Resolution;
use crate::ore::OreOp;
use crate::orematrix::{self, OreMatrix};
use crate::poly::Var;

/// Universal linearization `E`, `(n+m)×(n+l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Linearization {
    pub e: OreMatrix,
}

/// `−Σ_v ∂z/∂v·op(v)` split into field and multiplier columns.
fn variation(z: &FieldElem, sys: &CartanSystem) -> (Vec<OreOp>, Vec<OreOp>) {
    let layout = sys.layout();
    let mut fields = vec![OreOp::zero(); sys.n()];
    let mut lambdas = vec![OreOp::zero(); sys.l()];
    for jet in z.jets() {
        let term = OreOp::monomial(z.partial(Var::Jet(jet)), jet.p, jet.q);
        let slot = match jet.kind {
            JetKind::Lambda => &mut lambdas[jet.index as usize],
            _ => &mut fields[layout.field_of(jet).expect("field jet")],
        };
        *slot = slot.sub(&term);
    }
    (fields, lambdas)
}

pub fn linearize(sys: &CartanSystem) -> Linearization {
    let (n, m, l) = (sys.n(), sys.m(), sys.l());
    let mut e = OreMatrix::zeros(n + m, n + l);
    for (i, z) in sys.evolution().iter().enumerate() {
        let (fields, lambdas) = variation(z, sys);
        for (j, v) in fields.into_iter().enumerate() {
            let v = if i == j { v.add(&OreOp::d()) } else { v };
            e.set(i, j, v);
        }
        for (a, v) in lambdas.into_iter().enumerate() {
            e.set(i, n + a, v);
        }
    }
    for (jj, z) in sys.constraints().iter().enumerate() {
        let own = sys.layout().constrained_field(jj);
        let (fields, _) = variation(z, sys);
        for (j, v) in fields.into_iter().enumerate() {
            let v = if j == own { v.add(&OreOp::dbar()) } else { v };
            e.set(n + jj, j, v);
        }
    }
    Linearization { e }
}

/// A nonzero entry of a product that should vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub row: usize,
    pub col: usize,
    pub value: OreOp,
}

fn residuals(m: &OreMatrix) -> Vec<Residual> {
    let mut out = Vec::new();
    for row in 0..m.rows() {
        for col in 0..m.cols() {
            let v = m.get(row, col);
            if !v.is_zero() {
                out.push(Residual {
                    row,
                    col,
                    value: v.clone(),
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeReport {
    pub passed: bool,
    pub residuals: Vec<Residual>,
}

/// Passes iff `E·R = 0` entrywise.
pub fn check_gauge(lin: &Linearization, res: &Resolution, sys: &CartanSystem) -> Result<GaugeReport> {
    let prod = lin.e.mul(&res.r_gen, sys)?;
    let residuals = residuals(&prod);
    Ok(GaugeReport {
        passed: residuals.is_empty(),
        residuals,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducibilityReport {
    pub passed: bool,
    /// Nonzero entries of `R·Z`.
    pub residuals: Vec<Residual>,
    /// The top-`∂` coefficients of the columns of `Z` are independent over `R̄`.
    pub injective: bool,
    pub r1: usize,
    pub r2: usize,
    /// `r1 − r2 = l`.
    pub rank_law: bool,
}

/// `R̄`-matrix of the top `∂`-coefficient of each column.
fn leading_columns(z: &OreMatrix) -> OreMatrix {
    let mut out = OreMatrix::zeros(z.rows(), z.cols());
    for c in 0..z.cols() {
        let d = (0..z.rows()).map(|r| z.get(r, c).degree()).max().unwrap_or(0);
        for r in 0..z.rows() {
            out.set(r, c, z.get(r, c).level(d));
        }
    }
    out
}

/// Passes iff `R·Z = 0`, `Z` is injective, and `r1 − r2 = l`.
pub fn check_reducibility(res: &Resolution, sys: &CartanSystem) -> Result<ReducibilityReport> {
    let (r1, r2) = (res.r1(), res.r2());
    let prod = res.r_gen.mul(&res.z_gen, sys)?;
    let residuals = residuals(&prod);
    let injective = r2 == 0 || orematrix::rank(&leading_columns(&res.z_gen), sys)? == r2;
    let rank_law = r1 >= r2 && r1 - r2 == sys.l();
    Ok(ReducibilityReport {
        passed: residuals.is_empty() && injective && rank_law,
        residuals,
        injective,
        r1,
        r2,
        rank_law,
    })
}

/// Degree-of-freedom count `n − m − rank R̄`; conjectural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofReport {
    pub n: usize,
    pub m: usize,
    pub rank_rbar: usize,
    pub dof: i64,
    pub flag: &'static str,
}

impl DofReport {
    /// A negative count means the generators are inconsistent with the system.
    pub fn consistent(&self) -> bool {
        self.dof >= 0
    }
}

/// The `n`-row matrix over `R̄` whose columns are the `∂^k`-coefficients of
/// the field components of each generator.
pub fn rbar_matrix(res: &Resolution, n: usize) -> OreMatrix {
    let mut cols: Vec<Vec<OreOp>> = Vec::new();
    for g in 0..res.r1() {
        let deg = (0..n).map(|i| res.r_gen.get(i, g).degree()).max().unwrap_or(0);
        for k in 0..=deg {
            cols.push((0..n).map(|i| res.r_gen.get(i, g).level(k)).collect());
        }
    }
    let mut out = OreMatrix::zeros(n, cols.len());
    for (c, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            out.set(i, c, v);
        }
    }
    out
}

pub fn dof_count(res: &Resolution, sys: &CartanSystem) -> Result<DofReport> {
    let (n, m) = (sys.n(), sys.m());
    let rbar = rbar_matrix(res, n);
    let rank_rbar = if rbar.cols() == 0 {
        0
    } else {
        orematrix::rank(&rbar, sys)?
    };
    Ok(DofReport {
        n,
        m,
        rank_rbar,
        dof: n as i64 - m as i64 - rank_rbar as i64,
        flag: "conjectural",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{FieldDecl, Layout};
    use crate::jetfield::JetCoord;
    use crate::noether::analyze;

    fn phi(q: u32) -> FieldElem {
        FieldElem::jet(JetCoord::phi_a(0, q))
    }
    fn lam() -> FieldElem {
        FieldElem::jet(JetCoord::lambda(0, 0, 0))
    }
    fn lam1() -> FieldElem {
        FieldElem::jet(JetCoord::lambda(0, 0, 1))
    }
    fn g() -> FieldElem {
        FieldElem::param(0)
    }

    fn one_field(z: FieldElem) -> CartanSystem {
        let layout = Layout::new(vec![FieldDecl::free("phi")], vec!["lam".into()], vec!["g".into()]);
        CartanSystem::new(layout, vec![z], vec![]).unwrap()
    }

    fn coupled() -> CartanSystem {
        let half_g = g().mul(&FieldElem::ratio(1, 2));
        one_field(
            half_g
                .mul(&phi(0).mul(&phi(0)))
                .sub(&half_g.mul(&lam().mul(&lam())))
                .sub(&lam1()),
        )
    }

    /// ∂u = 2λ, ∂v = λ, ∂̄u = 2∂̄v
    fn integrable() -> CartanSystem {
        let layout = Layout::new(
            vec![FieldDecl::constrained("u"), FieldDecl::free("v")],
            vec!["lam".into()],
            vec![],
        );
        let two = FieldElem::from_int(2);
        let v1 = FieldElem::jet(JetCoord::phi_a(0, 1));
        CartanSystem::new(layout, vec![two.mul(&lam()), lam()], vec![two.mul(&v1)]).unwrap()
    }

    #[test]
    fn linearization_of_coupled_system() {
        let lin = linearize(&coupled());
        assert_eq!(lin.e.get(0, 0), &OreOp::d().sub(&OreOp::scalar(g().mul(&phi(0)))));
        assert_eq!(lin.e.get(0, 1), &OreOp::dbar().add(&OreOp::scalar(g().mul(&lam()))));
    }

    #[test]
    fn linearization_of_trivial_system() {
        let lin = linearize(&one_field(lam()));
        assert_eq!(lin.e.get(0, 0), &OreOp::d());
        assert_eq!(lin.e.get(0, 1), &OreOp::scalar(FieldElem::from_int(-1)));
    }

    #[test]
    fn constraint_rows_carry_dbar() {
        let sys = integrable();
        let lin = linearize(&sys);
        assert_eq!((lin.e.rows(), lin.e.cols()), (3, 3));
        let u = sys.layout().constrained_field(0);
        let v = 1 - u;
        assert_eq!(lin.e.get(2, u), &OreOp::dbar());
        assert_eq!(lin.e.get(2, v), &OreOp::monomial(FieldElem::from_int(-2), 0, 1));
        assert!(lin.e.get(2, 2).is_zero());
    }

    #[test]
    fn generators_pass_and_corruption_fails() {
        for sys in [coupled(), one_field(lam1().neg()), one_field(lam()), integrable()] {
            let a = analyze(&sys, None).unwrap();
            let lin = linearize(&sys);
            let rep = check_gauge(&lin, &a.resolution, &sys).unwrap();
            assert!(rep.passed, "{:?}", rep.residuals);
            assert!(check_reducibility(&a.resolution, &sys).unwrap().passed);
            let mut bad = a.resolution.clone();
            let flipped = bad.r_gen.get(0, 0).neg();
            bad.r_gen.set(0, 0, flipped);
            assert!(!check_gauge(&lin, &bad, &sys).unwrap().passed);
        }
    }

    #[test]
    fn corrupted_reducibility_fails() {
        let sys = coupled();
        let mut res = analyze(&sys, None).unwrap().resolution;
        let e = res.z_gen.get(0, 0).add(&OreOp::one());
        res.z_gen.set(0, 0, e);
        let rep = check_reducibility(&res, &sys).unwrap();
        assert!(!rep.passed);
        assert!(!rep.residuals.is_empty());
    }

    #[test]
    fn degrees_of_freedom() {
        for (sys, dof) in [
            (coupled(), 0),
            (one_field(lam1().neg()), 0),
            (integrable(), 0),
            (one_field(phi(1)), 1),
        ] {
            let a = analyze(&sys, None).unwrap();
            let rep = dof_count(&a.resolution, &sys).unwrap();
            assert_eq!(rep.dof, dof);
            assert_eq!(rep.flag, "conjectural");
        }
    }
}
