//! Field equations in Cartan normal form
//!
//! ```text
//! ∂φ^i  = Z^i(φ, ∂̄^q φ^a, ∂̄^p λ^α)
//! ∂̄φ^J = Z^J(φ, ∂̄^q φ^a)
//! ```
//!
//! and the reduction of a first-order Pfaffian system to this form.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::jetfield::{dbar, dtime, FieldElem, JetCoord, JetDerivations, JetKind};
use crate::poly::Var;

/// Name and role of one field `φ^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub constrained: bool,
}

impl FieldDecl {
    pub fn free(name: impl Into<String>) -> Self {
        FieldDecl {
            name: name.into(),
            constrained: false,
        }
    }

    pub fn constrained(name: impl Into<String>) -> Self {
        FieldDecl {
            name: name.into(),
            constrained: true,
        }
    }
}

/// Names of fields, multipliers and parameters, plus the split of fields
/// into constrained (`φ^J`) and free (`φ^a`) ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub fields: Vec<FieldDecl>,
    pub lambdas: Vec<String>,
    pub params: Vec<String>,
    field_jets: Vec<JetCoord>,
    constrained: Vec<usize>,
    free: Vec<usize>,
}

impl Layout {
    pub fn new(fields: Vec<FieldDecl>, lambdas: Vec<String>, params: Vec<String>) -> Self {
        let mut field_jets = Vec::with_capacity(fields.len());
        let mut constrained = Vec::new();
        let mut free = Vec::new();
        for (i, f) in fields.iter().enumerate() {
            if f.constrained {
                field_jets.push(JetCoord::phi_j(constrained.len() as u32));
                constrained.push(i);
            } else {
                field_jets.push(JetCoord::phi_a(free.len() as u32, 0));
                free.push(i);
            }
        }
        Layout {
            fields,
            lambdas,
            params,
            field_jets,
            constrained,
            free,
        }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn m(&self) -> usize {
        self.constrained.len()
    }

    pub fn l(&self) -> usize {
        self.lambdas.len()
    }

    /// Base jet coordinate of field `i`.
    pub fn field_jet(&self, i: usize) -> JetCoord {
        self.field_jets[i]
    }

    /// Field index of constrained field `J`.
    pub fn constrained_field(&self, j: usize) -> usize {
        self.constrained[j]
    }

    /// Field index of free field `a`.
    pub fn free_field(&self, a: usize) -> usize {
        self.free[a]
    }

    /// Field index `i` owning a `φ`-jet, or `None` for `λ`-jets.
    pub fn field_of(&self, jet: JetCoord) -> Option<usize> {
        match jet.kind {
            JetKind::PhiJ => self.constrained.get(jet.index as usize).copied(),
            JetKind::PhiA => self.free.get(jet.index as usize).copied(),
            JetKind::Lambda => None,
        }
    }

    pub fn jet_in_range(&self, jet: JetCoord) -> bool {
        match jet.kind {
            JetKind::PhiJ => (jet.index as usize) < self.m(),
            JetKind::PhiA => (jet.index as usize) < self.n() - self.m(),
            JetKind::Lambda => (jet.index as usize) < self.l(),
        }
    }
}

/// A system in Cartan normal form.
pub struct CartanSystem {
    layout: Layout,
    evolution: Vec<FieldElem>,
    constraints: Vec<FieldElem>,
    dtime_cache: Mutex<HashMap<JetCoord, FieldElem>>,
}

impl Clone for CartanSystem {
    fn clone(&self) -> Self {
        CartanSystem {
            layout: self.layout.clone(),
            evolution: self.evolution.clone(),
            constraints: self.constraints.clone(),
            dtime_cache: Mutex::default(),
        }
    }
}

impl fmt::Debug for CartanSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CartanSystem")
            .field("layout", &self.layout)
            .field("evolution", &self.evolution)
            .field("constraints", &self.constraints)
            .finish()
    }
}

impl CartanSystem {
    /// `evolution[i]` is `Z^i` for field `i`; `constraints[J]` is `Z^J`
    /// for the `J`-th constrained field. Only dimensions are checked here;
    /// see [`CartanSystem::validate`] for the remaining invariants.
    pub fn new(layout: Layout, evolution: Vec<FieldElem>, constraints: Vec<FieldElem>) -> Result<Self> {
        if evolution.len() != layout.n() {
            return Err(Error::InvalidSystem(format!(
                "expected {} evolution equations, got {}",
                layout.n(),
                evolution.len()
            )));
        }
        if constraints.len() != layout.m() {
            return Err(Error::InvalidSystem(format!(
                "expected {} constraint equations, got {}",
                layout.m(),
                constraints.len()
            )));
        }
        Ok(CartanSystem {
            layout,
            evolution,
            constraints,
            dtime_cache: Mutex::default(),
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn m(&self) -> usize {
        self.layout.m()
    }

    pub fn l(&self) -> usize {
        self.layout.l()
    }

    pub fn evolution(&self) -> &[FieldElem] {
        &self.evolution
    }

    pub fn constraints(&self) -> &[FieldElem] {
        &self.constraints
    }

    /// Same system with parameter `index` replaced by `value`.
    pub fn specialize(&self, index: usize, value: &num_rational::BigRational) -> Result<CartanSystem> {
        let sub = |e: &FieldElem| e.substitute_param(index as u32, value);
        let evolution = self.evolution.iter().map(sub).collect::<Result<Vec<_>>>()?;
        let constraints = self.constraints.iter().map(sub).collect::<Result<Vec<_>>>()?;
        CartanSystem::new(self.layout.clone(), evolution, constraints)
    }

    /// Largest jet order appearing on the right-hand sides.
    pub fn max_jet_order(&self) -> u32 {
        self.evolution
            .iter()
            .chain(&self.constraints)
            .flat_map(|e| e.jets())
            .map(|j| j.p.max(j.q))
            .max()
            .unwrap_or(0)
    }

    pub fn default_order_bound(&self) -> u32 {
        self.max_jet_order() + 3
    }

    /// Checks every structural invariant and the compatibility of the two
    /// derivations on all reduced jets up to `order_bound`.
    pub fn validate(&self, order_bound: u32) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, z) in self.evolution.iter().enumerate() {
            for jet in z.jets() {
                if !jet.is_reduced() || !self.layout.jet_in_range(jet) {
                    violations.push(Violation::InvalidJet {
                        equation: Equation::Evolution(i),
                        jet,
                    });
                } else if jet.kind == JetKind::Lambda && jet.p > 0 {
                    violations.push(Violation::TimeDerivativeOfMultiplier { field: i, jet });
                }
            }
            for v in z.vars() {
                if let Var::Param(k) = v {
                    if k as usize >= self.layout.params.len() {
                        violations.push(Violation::UnknownParameter(k));
                    }
                }
            }
        }
        for (j, z) in self.constraints.iter().enumerate() {
            for jet in z.jets() {
                if jet.kind == JetKind::Lambda {
                    violations.push(Violation::MultiplierInConstraint { constraint: j, jet });
                } else if !jet.is_reduced() || !self.layout.jet_in_range(jet) {
                    violations.push(Violation::InvalidJet {
                        equation: Equation::Constraint(j),
                        jet,
                    });
                }
            }
        }
        if violations.is_empty() {
            for jet in self.reduced_jets(order_bound) {
                let lhs = dtime(&self.dbar_jet(jet), self);
                let rhs = dbar(&self.dtime_jet(jet), self);
                let residual = lhs.sub(&rhs);
                if !residual.is_zero() {
                    violations.push(Violation::NotCompatible { jet, residual });
                }
            }
        }
        ValidationReport { violations }
    }

    /// All reduced jets with orders up to `bound`, in the fixed coordinate order.
    pub fn reduced_jets(&self, bound: u32) -> Vec<JetCoord> {
        let mut out = Vec::new();
        for j in 0..self.m() {
            out.push(JetCoord::phi_j(j as u32));
        }
        for a in 0..self.n() - self.m() {
            for q in 0..=bound {
                out.push(JetCoord::phi_a(a as u32, q));
            }
        }
        for al in 0..self.l() {
            for p in 0..=bound {
                for q in 0..=bound {
                    out.push(JetCoord::lambda(al as u32, p, q));
                }
            }
        }
        out
    }
}

impl JetDerivations for CartanSystem {
    fn dbar_jet(&self, jet: JetCoord) -> FieldElem {
        match jet.kind {
            JetKind::PhiJ => self.constraints[jet.index as usize].clone(),
            JetKind::PhiA | JetKind::Lambda => FieldElem::jet(JetCoord { q: jet.q + 1, ..jet }),
        }
    }

    fn dtime_jet(&self, jet: JetCoord) -> FieldElem {
        match jet.kind {
            JetKind::Lambda => FieldElem::jet(JetCoord { p: jet.p + 1, ..jet }),
            JetKind::PhiJ => {
                self.evolution[self.layout.constrained_field(jet.index as usize)].clone()
            }
            JetKind::PhiA => {
                if let Some(hit) = self.dtime_cache.lock().unwrap().get(&jet) {
                    return hit.clone();
                }
                let value = if jet.q == 0 {
                    self.evolution[self.layout.free_field(jet.index as usize)].clone()
                } else {
                    let lower = self.dtime_jet(JetCoord { q: jet.q - 1, ..jet });
                    dbar(&lower, self)
                };
                self.dtime_cache
                    .lock()
                    .unwrap()
                    .insert(jet, value.clone());
                value
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equation {
    Evolution(usize),
    Constraint(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A jet that is not reduced, or indexes a nonexistent field.
    InvalidJet { equation: Equation, jet: JetCoord },
    /// `Z^i` depends on a `∂`-derivative of a multiplier.
    TimeDerivativeOfMultiplier { field: usize, jet: JetCoord },
    MultiplierInConstraint { constraint: usize, jet: JetCoord },
    UnknownParameter(u32),
    /// `∂∂̄ v ≠ ∂̄∂ v` on-shell; `residual` is the difference.
    NotCompatible { jet: JetCoord, residual: FieldElem },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// First-order Pfaffian data `θ^J = dφ^J − Z_a^J(φ) dφ^a`.
#[derive(Clone, Debug)]
pub struct PfaffianInput {
    pub fields: Vec<FieldDecl>,
    pub params: Vec<String>,
    /// `theta[J][a] = Z_a^J`, functions of the undifferentiated fields only.
    pub theta: Vec<Vec<FieldElem>>,
}

impl PfaffianInput {
    fn layout(&self) -> Layout {
        Layout::new(self.fields.clone(), Vec::new(), self.params.clone())
    }

    fn check(&self, layout: &Layout) -> Result<()> {
        let (m, k) = (layout.m(), layout.n() - layout.m());
        if self.theta.len() != m || self.theta.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidSystem(format!(
                "Pfaffian data must be {m}×{k}"
            )));
        }
        for z in self.theta.iter().flatten() {
            if let Some(jet) = z
                .jets()
                .into_iter()
                .find(|j| j.p != 0 || j.q != 0 || !layout.jet_in_range(*j) || j.kind == JetKind::Lambda)
            {
                return Err(Error::InvalidSystem(format!(
                    "Pfaffian coefficient depends on non-coordinate jet {jet:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Curvature `Ω^J_{ab}` of a Pfaffian system, indexed `[J][a][b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvature(pub Vec<Vec<Vec<FieldElem>>>);

impl Curvature {
    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().flatten().all(FieldElem::is_zero)
    }
}

pub fn curvature(input: &PfaffianInput) -> Result<Curvature> {
    let layout = input.layout();
    input.check(&layout)?;
    let m = layout.m();
    let k = layout.n() - m;
    let da = |a: usize| Var::Jet(JetCoord::phi_a(a as u32, 0));
    let dj = |j: usize| Var::Jet(JetCoord::phi_j(j as u32));
    let z = &input.theta;
    let mut omega = vec![vec![vec![FieldElem::zero(); k]; k]; m];
    for (j, slab) in omega.iter_mut().enumerate() {
        for a in 0..k {
            for b in 0..k {
                let mut w = z[j][b].partial(da(a)).sub(&z[j][a].partial(da(b)));
                for i in 0..m {
                    w = w.add(&z[i][a].mul(&z[j][b].partial(dj(i))));
                    w = w.sub(&z[i][b].mul(&z[j][a].partial(dj(i))));
                }
                slab[a][b] = w;
            }
        }
    }
    Ok(Curvature(omega))
}

/// Result of reducing Pfaffian data to the rigid Cartan form.
#[derive(Clone, Debug)]
pub struct PfaffianReduction {
    pub system: CartanSystem,
    /// Generic rank of the contraction `∂̄φ^b Ω^J_{ba}`.
    pub rank: usize,
    /// Kernel basis `Z_α^a`, one vector per multiplier.
    pub kernel: Vec<Vec<FieldElem>>,
    pub warnings: Vec<String>,
}

pub fn pfaffian_to_cartan(input: &PfaffianInput) -> Result<PfaffianReduction> {
    let omega = curvature(input)?;
    let base = input.layout();
    let m = base.m();
    let k = base.n() - m;
    let dbar_phi = |b: usize| FieldElem::jet(JetCoord::phi_a(b as u32, 1));

    // W^J_a = Σ_b ∂̄φ^b Ω^J_{ba}
    let w: Vec<Vec<FieldElem>> = (0..m)
        .map(|j| {
            (0..k)
                .map(|a| {
                    (0..k).fold(FieldElem::zero(), |acc, b| {
                        acc.add(&dbar_phi(b).mul(&omega.0[j][b][a]))
                    })
                })
                .collect()
        })
        .collect();

    let (rref, pivots) = row_echelon(w.clone());
    let rank = pivots.len();
    let free_cols: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    let kernel: Vec<Vec<FieldElem>> = free_cols
        .iter()
        .map(|&f| {
            let mut v = vec![FieldElem::zero(); k];
            v[f] = FieldElem::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = rref[r][f].neg();
            }
            v
        })
        .collect();

    for (alpha, v) in kernel.iter().enumerate() {
        for (j, row) in w.iter().enumerate() {
            let s = row
                .iter()
                .zip(v)
                .fold(FieldElem::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
            if !s.is_zero() {
                return Err(Error::DegenerateRank(format!(
                    "kernel vector {alpha} fails row {j}"
                )));
            }
        }
    }
    if k > 0 && kernel.is_empty() {
        return Err(Error::DegenerateRank(
            "the direction ∂̄φ^a must always lie in the kernel".into(),
        ));
    }

    let l = kernel.len();
    let lambdas: Vec<String> = if l == 1 {
        vec!["lam".to_string()]
    } else {
        (1..=l).map(|i| format!("lam{i}")).collect()
    };
    let lam = |alpha: usize| FieldElem::jet(JetCoord::lambda(alpha as u32, 0, 0));

    // ∂φ^a = Z_α^a λ^α
    let free_rhs: Vec<FieldElem> = (0..k)
        .map(|a| {
            kernel
                .iter()
                .enumerate()
                .fold(FieldElem::zero(), |acc, (al, v)| acc.add(&v[a].mul(&lam(al))))
        })
        .collect();
    let mut evolution = vec![FieldElem::zero(); base.n()];
    for (a, rhs) in free_rhs.iter().enumerate() {
        evolution[base.free_field(a)] = rhs.clone();
    }
    let mut constraints = Vec::with_capacity(m);
    for j in 0..m {
        let mut ev = FieldElem::zero();
        let mut cn = FieldElem::zero();
        for a in 0..k {
            ev = ev.add(&input.theta[j][a].mul(&free_rhs[a]));
            cn = cn.add(&input.theta[j][a].mul(&dbar_phi(a)));
        }
        evolution[base.constrained_field(j)] = ev;
        constraints.push(cn);
    }

    let layout = Layout::new(input.fields.clone(), lambdas, input.params.clone());
    let system = CartanSystem::new(layout, evolution, constraints)?;
    let report = system.validate(system.default_order_bound());
    if !report.is_valid() {
        return Err(Error::InvalidSystem(format!(
            "reduced system fails validation: {:?}",
            report.violations
        )));
    }
    let mut warnings = Vec::new();
    if l == 1 {
        warnings.push(
            "a single multiplier remains: the tangent vectors ∂φ and ∂̄φ are proportional and integral surfaces degenerate into curves"
                .to_string(),
        );
    }
    Ok(PfaffianReduction {
        system,
        rank,
        kernel,
        warnings,
    })
}

/// Reduced row echelon form over the field; returns the matrix and pivot columns.
fn row_echelon(mut a: Vec<Vec<FieldElem>>) -> (Vec<Vec<FieldElem>>, Vec<usize>) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].size())
        else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("pivot is nonzero");
        for x in a[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.sub(&f.mul(y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> FieldElem {
        FieldElem::jet(JetCoord::phi_a(0, 0))
    }
    fn lam() -> FieldElem {
        FieldElem::jet(JetCoord::lambda(0, 0, 0))
    }
    fn g() -> FieldElem {
        FieldElem::param(0)
    }

    /// ∂φ = g/2 φ² − g/2 λ² − ∂̄λ
    fn coupled() -> CartanSystem {
        let half_g = g().mul(&FieldElem::ratio(1, 2));
        let z = half_g
            .mul(&phi().mul(&phi()))
            .sub(&half_g.mul(&lam().mul(&lam())))
            .sub(&FieldElem::jet(JetCoord::lambda(0, 0, 1)));
        let layout = Layout::new(vec![FieldDecl::free("phi")], vec!["lam".into()], vec!["g".into()]);
        CartanSystem::new(layout, vec![z], vec![]).unwrap()
    }

    #[test]
    fn coupled_system_is_valid() {
        let sys = coupled();
        assert!(sys.validate(sys.default_order_bound()).is_valid());
    }

    #[test]
    fn dtime_of_phi_substitutes_evolution() {
        let sys = coupled();
        assert_eq!(sys.dtime_jet(JetCoord::phi_a(0, 0)), sys.evolution()[0]);
        // dtime(∂̄φ) = gφ∂̄φ − gλ∂̄λ − ∂̄²λ
        let expect = g()
            .mul(&phi())
            .mul(&FieldElem::jet(JetCoord::phi_a(0, 1)))
            .sub(&g().mul(&lam()).mul(&FieldElem::jet(JetCoord::lambda(0, 0, 1))))
            .sub(&FieldElem::jet(JetCoord::lambda(0, 0, 2)));
        assert_eq!(dtime(&FieldElem::jet(JetCoord::phi_a(0, 1)), &sys), expect);
        assert_eq!(
            dtime(&lam(), &sys),
            FieldElem::jet(JetCoord::lambda(0, 1, 0))
        );
    }

    #[test]
    fn constraint_with_multiplier_is_rejected() {
        let layout = Layout::new(
            vec![FieldDecl::free("u"), FieldDecl::constrained("w")],
            vec!["lam".into()],
            vec![],
        );
        let sys = CartanSystem::new(layout, vec![lam(), lam()], vec![lam()]).unwrap();
        let report = sys.validate(3);
        assert!(matches!(
            report.violations[0],
            Violation::MultiplierInConstraint { constraint: 0, .. }
        ));
    }

    #[test]
    fn incompatible_constraint_is_reported() {
        // ∂̄w = u but ∂w = 0, ∂u = λ: ∂∂̄w = λ ≠ 0 = ∂̄∂w
        let layout = Layout::new(
            vec![FieldDecl::free("u"), FieldDecl::constrained("w")],
            vec!["lam".into()],
            vec![],
        );
        let sys = CartanSystem::new(layout, vec![lam(), FieldElem::zero()], vec![phi()]).unwrap();
        let report = sys.validate(2);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotCompatible { jet, .. } if jet.kind == JetKind::PhiJ)));
    }

    #[test]
    fn two_field_constraint_dbar() {
        // ∂̄φ¹ = Z(φ¹,φ²)·∂̄φ²  with φ¹ constrained
        let layout = Layout::new(
            vec![FieldDecl::constrained("p1"), FieldDecl::free("p2")],
            vec![],
            vec![],
        );
        let zf = FieldElem::jet(JetCoord::phi_j(0)).mul(&phi());
        let rhs = zf.mul(&FieldElem::jet(JetCoord::phi_a(0, 1)));
        let sys = CartanSystem::new(
            layout,
            vec![FieldElem::zero(), FieldElem::zero()],
            vec![rhs.clone()],
        )
        .unwrap();
        assert_eq!(dbar(&FieldElem::jet(JetCoord::phi_j(0)), &sys), rhs);
    }

    fn contact() -> PfaffianInput {
        // fields x, y free; z constrained; θ = dz − y dx
        PfaffianInput {
            fields: vec![FieldDecl::free("x"), FieldDecl::free("y"), FieldDecl::constrained("z")],
            params: vec![],
            theta: vec![vec![FieldElem::jet(JetCoord::phi_a(1, 0)), FieldElem::zero()]],
        }
    }

    #[test]
    fn curvature_of_constant_data_vanishes() {
        let input = PfaffianInput {
            fields: vec![FieldDecl::free("x"), FieldDecl::free("y"), FieldDecl::constrained("z")],
            params: vec![],
            theta: vec![vec![FieldElem::from_int(2), FieldElem::from_int(-1)]],
        };
        assert!(curvature(&input).unwrap().is_zero());
    }

    #[test]
    fn contact_curvature() {
        let om = curvature(&contact()).unwrap();
        assert_eq!(om.0[0][0][1], FieldElem::from_int(-1));
        assert_eq!(om.0[0][1][0], FieldElem::from_int(1));
        assert!(om.0[0][0][0].is_zero());
    }

    #[test]
    fn contact_reduction() {
        let red = pfaffian_to_cartan(&contact()).unwrap();
        assert_eq!(red.rank, 1);
        assert_eq!(red.system.l(), 1);
        assert_eq!(red.warnings.len(), 1);
        // kernel contains ∂̄φ^a direction: Z^x : Z^y = ∂̄x : ∂̄y
        let v = &red.kernel[0];
        let lhs = v[0].mul(&FieldElem::jet(JetCoord::phi_a(1, 1)));
        let rhs = v[1].mul(&FieldElem::jet(JetCoord::phi_a(0, 1)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn integrable_reduction_keeps_coordinate_directions() {
        let input = PfaffianInput {
            fields: vec![FieldDecl::constrained("u"), FieldDecl::free("v"), FieldDecl::free("w")],
            params: vec![],
            theta: vec![vec![FieldElem::from_int(2), FieldElem::jet(JetCoord::phi_j(0))]],
        };
        // Ω = ∂_v(u) − 0 + Z_v ∂_u Z_w − Z_w ∂_u Z_v = 2 ≠ 0 here, so use u-free data
        let integrable = PfaffianInput {
            theta: vec![vec![FieldElem::from_int(2), FieldElem::from_int(3)]],
            ..input.clone()
        };
        let red = pfaffian_to_cartan(&integrable).unwrap();
        assert_eq!(red.rank, 0);
        assert_eq!(red.system.l(), 2);
        assert_eq!(red.kernel[0], vec![FieldElem::one(), FieldElem::zero()]);
        assert_eq!(red.kernel[1], vec![FieldElem::zero(), FieldElem::one()]);
        let red = pfaffian_to_cartan(&input).unwrap();
        assert_eq!(red.system.l(), 1);
    }

    #[test]
    fn single_free_field() {
        let input = PfaffianInput {
            fields: vec![FieldDecl::free("phi")],
            params: vec![],
            theta: vec![],
        };
        let red = pfaffian_to_cartan(&input).unwrap();
        assert_eq!(red.system.evolution()[0], lam());
    }
}
