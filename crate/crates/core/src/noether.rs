//! Hamiltonian constraints, their time derivatives, and the syzygies that
//! turn into gauge generators and reducibility relations.
//!
//! A constraint density linear in the momenta is stored as a `1×n` row over
//! `R̄` acting on `(π_1, …, π_n)`. The certificate of a track is the
//! `1×n` row over `R` with `∂^k T_α = D^k T_α + cert^{(k)}·(T_1, …, T_n)`,
//! where `T_i = δS/δφ^i` are the momentum evolution equations.

use num_rational::BigRational;
use num_traits::One;

use crate::cartan::CartanSystem;
use crate::error::{Error, Result};
use crate::jetfield::{FieldElem, JetCoord, JetKind};
use crate::ore::{self, OreOp};
use crate::orematrix::{self, JacobsonDecomposition, OreMatrix};
use crate::poly::Var;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintTrack {
    /// `D^k T_α` as a row acting on the momenta.
    pub row: OreMatrix,
    pub cert: OreMatrix,
    pub k: usize,
}

/// `(−∂̄)^n·f`, normal-ordered.
fn adjoint_dbar(n: u32, f: &FieldElem, sys: &CartanSystem) -> OreOp {
    let sign = if n % 2 == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    ore::mul(
        &OreOp::monomial(FieldElem::rational(sign), 0, n),
        &OreOp::scalar(f.clone()),
        sys,
    )
}

/// Jets of `φ^i` appearing in `z`, with their `∂̄`-order.
fn field_jets(z: &FieldElem, sys: &CartanSystem, i: usize) -> Vec<JetCoord> {
    z.jets()
        .into_iter()
        .filter(|j| j.kind != JetKind::Lambda && sys.layout().field_of(*j) == Some(i))
        .collect()
}

/// `T_α = −Σ_n (−∂̄)^n (∂Z^i/∂(∂̄^n λ^α) π_i)`.
pub fn primary_constraints(sys: &CartanSystem) -> Vec<ConstraintTrack> {
    let n = sys.n();
    (0..sys.l())
        .map(|alpha| {
            let mut row = vec![OreOp::zero(); n];
            for (i, z) in sys.evolution().iter().enumerate() {
                for jet in z.jets() {
                    if jet.kind != JetKind::Lambda || jet.index as usize != alpha {
                        continue;
                    }
                    let f = z.partial(Var::Jet(jet));
                    row[i] = row[i].sub(&adjoint_dbar(jet.q, &f, sys));
                }
            }
            ConstraintTrack {
                row: OreMatrix::row_vector(row),
                cert: OreMatrix::zeros(1, n),
                k: 0,
            }
        })
        .collect()
}

/// The `n×n` matrix `P` with `∂π_i = −T_i + Σ_j P_ij π_j`, where
/// `P_ij = −Σ_n (−∂̄)^n·∂Z^j/∂(∂̄^n φ^i)`.
pub fn momentum_flow(sys: &CartanSystem) -> OreMatrix {
    let n = sys.n();
    let mut p = OreMatrix::zeros(n, n);
    for (j, z) in sys.evolution().iter().enumerate() {
        for i in 0..n {
            let mut e = OreOp::zero();
            for jet in field_jets(z, sys, i) {
                let f = z.partial(Var::Jet(jet));
                e = e.sub(&adjoint_dbar(jet.q, &f, sys));
            }
            p.set(i, j, e);
        }
    }
    p
}

/// One application of `D`: the total time derivative of `row·π` with `∂π`
/// eliminated through the momentum equations.
pub fn d_step(t: &ConstraintTrack, sys: &CartanSystem) -> ConstraintTrack {
    d_step_with(t, &momentum_flow(sys), sys)
}

fn d_step_with(t: &ConstraintTrack, flow: &OreMatrix, sys: &CartanSystem) -> ConstraintTrack {
    let carried = t.row.mul(flow, sys).expect("row and flow agree in size");
    let row = t
        .row
        .map(|e| e.dtime_coeffs(sys))
        .add(&carried)
        .expect("same shape");
    let d = OreOp::d();
    let cert = t
        .cert
        .map(|c| ore::mul(&d, c, sys))
        .add(&t.row.map(OreOp::neg))
        .expect("same shape");
    ConstraintTrack {
        row,
        cert,
        k: t.k + 1,
    }
}

/// The constraint history once the module `span{D^k T_α : k ≤ K}` stopped growing.
#[derive(Clone, Debug)]
pub struct Stabilization {
    pub k: usize,
    /// `levels[k][α]` for `k = 0..=K+1`.
    pub levels: Vec<Vec<ConstraintTrack>>,
    /// Decomposition of [`Stabilization::stacked`]`(K)`.
    pub decomposition: JacobsonDecomposition,
}

impl Stabilization {
    pub fn l(&self) -> usize {
        self.levels[0].len()
    }

    /// Rows of levels `0..=upto`, level-major.
    pub fn stacked(&self, upto: usize) -> OreMatrix {
        stack(&self.levels[..=upto], self.levels_cols())
    }

    fn levels_cols(&self) -> usize {
        self.levels[0].first().map_or(0, |t| t.row.cols())
    }
}

fn stack(levels: &[Vec<ConstraintTrack>], cols: usize) -> OreMatrix {
    let rows = levels
        .iter()
        .flatten()
        .map(|t| t.row.row(0).to_vec())
        .collect();
    OreMatrix::from_rows(rows, cols).expect("rows share the field count")
}

/// Default iteration budget `n + l + 2`.
pub fn default_budget(sys: &CartanSystem) -> usize {
    sys.n() + sys.l() + 2
}

/// Iterates `D` until every level-`K+1` row lies in the `R̄`-span of the
/// earlier ones.
pub fn stabilize(
    tracks: Vec<ConstraintTrack>,
    sys: &CartanSystem,
    max_k: usize,
) -> Result<Stabilization> {
    let n = sys.n();
    let flow = momentum_flow(sys);
    let mut levels = vec![tracks];
    for k in 0..=max_k {
        let next: Vec<ConstraintTrack> =
            levels[k].iter().map(|t| d_step_with(t, &flow, sys)).collect();
        let stacked = stack(&levels, n);
        let dec = orematrix::jacobson(&stacked, sys)?;
        let mut inside = true;
        for t in &next {
            if orematrix::solve_left_with(&dec, &stacked, &t.row, sys)?.is_none() {
                inside = false;
                break;
            }
        }
        levels.push(next);
        if inside {
            return Ok(Stabilization {
                k,
                levels,
                decomposition: dec,
            });
        }
    }
    Err(Error::BudgetExceeded { max_k })
}

/// The generating set `{M_α} ∪ {M_A}` of the constraint syzygies, one
/// covector over `R` per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SyzygyGenSet {
    /// `r1 × l`; the first `l` rows are the `M_α`.
    pub generators: OreMatrix,
    pub k: usize,
    pub l: usize,
}

impl SyzygyGenSet {
    pub fn r1(&self) -> usize {
        self.generators.rows()
    }

    pub fn m_alpha(&self) -> OreMatrix {
        self.generators.row_range(0, self.l)
    }

    pub fn m_a(&self) -> OreMatrix {
        self.generators.row_range(self.l, self.r1())
    }
}

/// `Σ_k x[k·l+β]·∂^k` for each `β`.
fn regroup(x: &[OreOp], l: usize) -> Vec<OreOp> {
    (0..l)
        .map(|beta| {
            let levels: Vec<OreOp> = x.iter().skip(beta).step_by(l.max(1)).cloned().collect();
            OreOp::from_levels(&levels)
        })
        .collect()
}

/// Rescales a covector by a unit of `F` so its coefficients are coprime polynomials.
fn primitive(cov: Vec<OreOp>) -> Vec<OreOp> {
    let coeffs: Vec<FieldElem> = cov
        .iter()
        .flat_map(|c| c.terms().map(|(_, f)| f.clone()).collect::<Vec<_>>())
        .collect();
    match orematrix::primitive_factor(&coeffs, true) {
        Some(f) => cov.iter().map(|c| c.scale_left(&f)).collect(),
        None => cov,
    }
}

/// Levels `0..=k` of each component, laid out as in [`regroup`].
fn flatten(cov: &[OreOp], k: usize) -> Vec<OreOp> {
    let l = cov.len();
    let mut out = vec![OreOp::zero(); (k + 1) * l];
    for (beta, c) in cov.iter().enumerate() {
        for lv in 0..=k {
            out[lv * l + beta] = c.level(lv as u32);
        }
    }
    out
}

pub fn syzygy_generating_set(stab: &Stabilization, sys: &CartanSystem) -> Result<SyzygyGenSet> {
    let (k, l) = (stab.k, stab.l());
    let stacked = stab.stacked(k);
    let dec = &stab.decomposition;
    let mut rows = Vec::new();
    for (alpha, t) in stab.levels[k + 1].iter().enumerate() {
        let x = orematrix::solve_left_with(dec, &stacked, &t.row, sys)?.ok_or_else(|| {
            Error::ExpansionFailure(format!("level {} row {alpha} left the span", k + 1))
        })?;
        let mut m: Vec<OreOp> = regroup(x.row(0), l).iter().map(OreOp::neg).collect();
        m[alpha] = m[alpha].add(&OreOp::monomial(FieldElem::one(), k as u32 + 1, 0));
        rows.push(m);
    }
    for r in dec.rank..stacked.rows() {
        rows.push(primitive(regroup(dec.u.row(r), l)));
    }
    Ok(SyzygyGenSet {
        generators: OreMatrix::from_rows(rows, l)?,
        k,
        l,
    })
}

/// Rows `N_A = (−K_A^α, δ_A^B ∂ − L_A^B)` from `∂·M_A = K_A^α M_α + L_A^B M_B`.
pub fn second_syzygies(s: &SyzygyGenSet, sys: &CartanSystem) -> Result<OreMatrix> {
    let (l, r1, k) = (s.l, s.r1(), s.k);
    let m_a = s.m_a();
    let r2 = m_a.rows();
    let basis = OreMatrix::from_rows(
        (0..r2).map(|b| flatten(m_a.row(b), k)).collect(),
        (k + 1) * l,
    )?;
    let dec = if r2 > 0 {
        Some(orematrix::jacobson(&basis, sys)?)
    } else {
        None
    };
    let d = OreOp::d();
    let mut out = OreMatrix::zeros(r2, r1);
    for a in 0..r2 {
        let dm: Vec<OreOp> = m_a.row(a).iter().map(|c| ore::mul(&d, c, sys)).collect();
        let coeff_k: Vec<OreOp> = dm.iter().map(|c| c.level(k as u32 + 1)).collect();
        let mut rem = dm.clone();
        for (alpha, ka) in coeff_k.iter().enumerate() {
            for (beta, r) in rem.iter_mut().enumerate() {
                let t = ore::mul(ka, s.generators.get(alpha, beta), sys);
                *r = r.sub(&t);
            }
        }
        if rem.iter().any(|r| !r.is_zero() && r.degree() > k as u32) {
            return Err(Error::ExpansionFailure(format!(
                "∂·M_{a} keeps degree above {k} after removing the M_α part"
            )));
        }
        let v = OreMatrix::row_vector(flatten(&rem, k));
        let coeffs = orematrix::solve_left_with(dec.as_ref().expect("r2 > 0"), &basis, &v, sys)?
            .ok_or_else(|| Error::ExpansionFailure(format!("∂·M_{a} is not in the span of M")))?;
        for (alpha, ka) in coeff_k.iter().enumerate() {
            out.set(a, alpha, ka.neg());
        }
        for b in 0..r2 {
            let mut e = coeffs.get(0, b).neg();
            if a == b {
                e = e.add(&d);
            }
            out.set(a, l + b, e);
        }
    }
    Ok(out)
}

/// Gauge generators (columns) and reducibility relations.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolution {
    /// `(n+l)×r1`: rows `0..n` are `δφ^i`, rows `n..n+l` are `δλ^α`.
    pub r_gen: OreMatrix,
    /// `r1×r2`.
    pub z_gen: OreMatrix,
}

impl Resolution {
    pub fn r1(&self) -> usize {
        self.r_gen.cols()
    }

    pub fn r2(&self) -> usize {
        self.z_gen.cols()
    }

    /// Substitutes a parameter value into every coefficient; fails when a
    /// denominator vanishes.
    pub fn specialize(&self, index: u32, value: &BigRational) -> Result<Resolution> {
        let sub = |m: &OreMatrix| -> Result<OreMatrix> {
            let mut out = OreMatrix::zeros(m.rows(), m.cols());
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let terms = m
                        .get(r, c)
                        .terms()
                        .map(|(&pq, f)| Ok((pq, f.substitute_param(index, value)?)))
                        .collect::<Result<Vec<_>>>()?;
                    out.set(r, c, OreOp::from_terms(terms));
                }
            }
            Ok(out)
        };
        Ok(Resolution {
            r_gen: sub(&self.r_gen)?,
            z_gen: sub(&self.z_gen)?,
        })
    }
}

/// `R^α_I = (M_I^α)*`, `R^i_I = −(Σ_{k,α} M^α_{Ik}·cert^{(k)}_{α,i})*`, `Z = N*`.
pub fn dualize(
    s: &SyzygyGenSet,
    n_mat: &OreMatrix,
    stab: &Stabilization,
    sys: &CartanSystem,
) -> Resolution {
    let (n, l, r1) = (sys.n(), s.l, s.r1());
    let mut r_gen = OreMatrix::zeros(n + l, r1);
    for i_gen in 0..r1 {
        let m = s.generators.row(i_gen);
        let mut phi = vec![OreOp::zero(); n];
        for (alpha, comp) in m.iter().enumerate() {
            for lv in 0..=comp.degree() {
                let c = comp.level(lv);
                if c.is_zero() {
                    continue;
                }
                let cert = &stab.levels[lv as usize][alpha].cert;
                for (i, acc) in phi.iter_mut().enumerate() {
                    *acc = acc.add(&ore::mul(&c, cert.get(0, i), sys));
                }
            }
            r_gen.set(n + alpha, i_gen, ore::transpose(comp, sys));
        }
        for (i, acc) in phi.iter().enumerate() {
            r_gen.set(i, i_gen, ore::transpose(acc, sys).neg());
        }
    }
    let z_gen = n_mat.transposed().map(|e| ore::transpose(e, sys));
    Resolution { r_gen, z_gen }
}

/// Everything the pipeline computes for one system.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub stabilization: Option<Stabilization>,
    pub syzygies: SyzygyGenSet,
    pub second: OreMatrix,
    pub resolution: Resolution,
}

impl Analysis {
    /// Stabilization index `K`; 0 for systems without multipliers.
    pub fn k(&self) -> usize {
        self.stabilization.as_ref().map_or(0, |s| s.k)
    }
}

/// Runs the whole construction with the given budget (default [`default_budget`]).
pub fn analyze(sys: &CartanSystem, max_k: Option<usize>) -> Result<Analysis> {
    let (n, l) = (sys.n(), sys.l());
    if l == 0 {
        return Ok(Analysis {
            stabilization: None,
            syzygies: SyzygyGenSet {
                generators: OreMatrix::zeros(0, 0),
                k: 0,
                l: 0,
            },
            second: OreMatrix::zeros(0, 0),
            resolution: Resolution {
                r_gen: OreMatrix::zeros(n, 0),
                z_gen: OreMatrix::zeros(0, 0),
            },
        });
    }
    let stab = stabilize(
        primary_constraints(sys),
        sys,
        max_k.unwrap_or_else(|| default_budget(sys)),
    )?;
    let syz = syzygy_generating_set(&stab, sys)?;
    let second = second_syzygies(&syz, sys)?;
    let resolution = dualize(&syz, &second, &stab, sys);
    Ok(Analysis {
        stabilization: Some(stab),
        syzygies: syz,
        second,
        resolution,
    })
}
