//! The analysis pipeline and its report.

use gauge2d_core::cartan::{CartanSystem, Equation, Layout, Violation};
use gauge2d_core::noether::{self, analyze, primary_constraints, Resolution};
use gauge2d_core::render;
use gauge2d_core::verify::{check_gauge, check_reducibility, dof_count, linearize};
use gauge2d_core::Error;
use num_rational::BigRational;

use crate::report::Node;

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    pub max_k: Option<usize>,
    /// Parameter index and value to substitute into the generic result.
    pub specialize: Option<(usize, BigRational)>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Node,
    /// Both `E·R = 0` and `R·Z = 0` (with injectivity and the rank law) hold.
    pub verified: bool,
}

fn list(names: &[&str]) -> String {
    if names.is_empty() {
        "-".into()
    } else {
        names.join(", ")
    }
}

fn system_node(sys: &CartanSystem) -> Node {
    let layout = sys.layout();
    let fields: Vec<&str> = layout.fields.iter().map(|f| f.name.as_str()).collect();
    let constrained: Vec<&str> = layout
        .fields
        .iter()
        .filter(|f| f.constrained)
        .map(|f| f.name.as_str())
        .collect();
    let lambdas: Vec<&str> = layout.lambdas.iter().map(String::as_str).collect();
    let params: Vec<&str> = layout.params.iter().map(String::as_str).collect();
    Node::branch(
        "system",
        vec![
            Node::leaf("fields", list(&fields)),
            Node::leaf("constrained", list(&constrained)),
            Node::leaf("lambdas", list(&lambdas)),
            Node::leaf("params", list(&params)),
            Node::leaf("n", sys.n()),
            Node::leaf("m", sys.m()),
            Node::leaf("l", sys.l()),
        ],
    )
}

/// Name of the `I`-th gauge parameter.
pub fn eps(i: usize) -> String {
    format!("eps{}", i + 1)
}

/// Keys of the rows of `R`: field names, then multiplier names.
fn variable_names(layout: &Layout) -> Vec<String> {
    layout
        .fields
        .iter()
        .map(|f| f.name.clone())
        .chain(layout.lambdas.iter().cloned())
        .collect()
}

fn generators_node(res: &Resolution, layout: &Layout) -> Node {
    let vars = variable_names(layout);
    let mut children = vec![Node::leaf("count", res.r1())];
    for g in 0..res.r1() {
        let comps = vars
            .iter()
            .enumerate()
            .map(|(row, v)| Node::leaf(v.clone(), render::op(res.r_gen.get(row, g), layout)))
            .collect();
        children.push(Node::branch(eps(g), comps));
    }
    Node::branch("generators", children)
}

fn reducibility_node(res: &Resolution, layout: &Layout) -> Node {
    let mut children = vec![Node::leaf("count", res.r2())];
    for a in 0..res.r2() {
        let comps = (0..res.r1())
            .map(|g| Node::leaf(eps(g), render::op(res.z_gen.get(g, a), layout)))
            .collect();
        children.push(Node::branch(format!("rel{}", a + 1), comps));
    }
    Node::branch("reducibility", children)
}

fn constraints_node(sys: &CartanSystem) -> Node {
    let layout = sys.layout();
    let rows = primary_constraints(sys)
        .into_iter()
        .enumerate()
        .map(|(alpha, t)| {
            let comps = (0..sys.n())
                .map(|i| {
                    Node::leaf(
                        format!("pi_{}", layout.fields[i].name),
                        render::op(t.row.get(0, i), layout),
                    )
                })
                .collect();
            Node::branch(layout.lambdas[alpha].clone(), comps)
        })
        .collect();
    Node::branch("constraints", rows)
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Substitutes into the generic generators and compares with a run on the
/// specialized system.
fn specialization_node(
    sys: &CartanSystem,
    res: &Resolution,
    index: usize,
    value: &BigRational,
    max_k: Option<usize>,
    notes: &mut Vec<String>,
) -> Node {
    let param = sys.layout().params[index].clone();
    let mut children = vec![
        Node::leaf("param", &param),
        Node::leaf("value", value),
        Node::leaf("generic_r1", res.r1()),
        Node::leaf("generic_r2", res.r2()),
    ];
    let special = sys
        .specialize(index, value)
        .and_then(|s| analyze(&s, max_k).map(|a| (s, a.resolution)));
    let (special_sys, special_res) = match special {
        Ok(x) => x,
        Err(e) => {
            children.push(Node::leaf("special_run", &e));
            children.push(Node::leaf("outcome", "SpecializationFailure"));
            notes.push(format!("SpecializationFailure: the system at {param} = {value} could not be analysed ({e})"));
            return Node::branch("specialization", children);
        }
    };
    children.push(Node::leaf("special_r1", special_res.r1()));
    children.push(Node::leaf("special_r2", special_res.r2()));
    let substituted = res.specialize(index as u32, value);
    let outcome = match &substituted {
        Err(e) => {
            children.push(Node::leaf("substitution", e));
            notes.push(format!(
                "SpecializationFailure: substituting {param} = {value} into the generic generators fails ({e})"
            ));
            false
        }
        Ok(sub) => {
            children.push(Node::leaf("substitution", "ok"));
            let still = check_gauge(&linearize(&special_sys), sub, &special_sys)
                .map(|r| r.passed)
                .unwrap_or(false);
            children.push(Node::leaf("substituted_gauge", pass(still)));
            let same = sub.r1() == special_res.r1()
                && sub.r2() == special_res.r2();
            if !same {
                notes.push(format!(
                    "SpecializationFailure: at {param} = {value} the generating set has {} generator(s) and {} relation(s); the generic set specializes to {} and {}",
                    special_res.r1(),
                    special_res.r2(),
                    sub.r1(),
                    sub.r2()
                ));
            }
            same
        }
    };
    children.push(Node::leaf(
        "outcome",
        if outcome { "consistent" } else { "SpecializationFailure" },
    ));
    Node::branch("specialization", children)
}

/// Runs the analysis and the independent checks.
pub fn run_pipeline(sys: &CartanSystem, opts: &PipelineOptions) -> Result<Outcome, Error> {
    let layout = sys.layout();
    let analysis = analyze(sys, opts.max_k)?;
    let res = &analysis.resolution;
    let mut notes = Vec::new();

    let budget = opts.max_k.unwrap_or_else(|| noether::default_budget(sys));
    let stab = Node::branch(
        "stabilization",
        vec![
            Node::leaf("K", analysis.stabilization.as_ref().map_or("-".to_string(), |s| s.k.to_string())),
            Node::leaf("budget", budget),
        ],
    );
    if sys.l() == 0 {
        notes.push("no multipliers: there are no constraints and no gauge symmetry".to_string());
    }

    let gauge = check_gauge(&linearize(sys), res, sys)?;
    let red = check_reducibility(res, sys)?;
    let dof = dof_count(res, sys)?;
    if !dof.consistent() {
        notes.push("negative degree-of-freedom count".to_string());
    }
    let verified = gauge.passed && red.passed;

    let mut top = vec![
        system_node(sys),
        stab,
        constraints_node(sys),
        generators_node(res, layout),
        reducibility_node(res, layout),
        Node::branch(
            "dof",
            vec![
                Node::leaf("n", dof.n),
                Node::leaf("m", dof.m),
                Node::leaf("rank_rbar", dof.rank_rbar),
                Node::leaf("value", dof.dof),
                Node::leaf("status", dof.flag),
            ],
        ),
        Node::branch(
            "verification",
            vec![
                Node::leaf("gauge", pass(gauge.passed)),
                Node::leaf("gauge_residuals", gauge.residuals.len()),
                Node::leaf("reducibility", pass(red.passed)),
                Node::leaf("rz_residuals", red.residuals.len()),
                Node::leaf("injective", yes(red.injective)),
                Node::leaf("rank_law", yes(red.rank_law)),
            ],
        ),
    ];
    if let Some((index, value)) = &opts.specialize {
        top.push(specialization_node(sys, res, *index, value, opts.max_k, &mut notes));
    }
    if !notes.is_empty() {
        top.push(Node::branch(
            "notes",
            notes
                .iter()
                .enumerate()
                .map(|(i, n)| Node::leaf(format!("note{}", i + 1), n))
                .collect(),
        ));
    }
    top.push(Node::leaf("status", if verified { "verified" } else { "failed" }));
    Ok(Outcome {
        report: Node::branch("", top),
        verified,
    })
}

/// One line per validation violation.
pub fn describe_violation(v: &Violation, layout: &Layout) -> String {
    let eq = |e: &Equation| match e {
        Equation::Evolution(i) => format!("evolution of {}", layout.fields[*i].name),
        Equation::Constraint(j) => {
            format!("constraint of {}", layout.fields[layout.constrained_field(*j)].name)
        }
    };
    match v {
        Violation::InvalidJet { equation, jet } => format!(
            "{}: {} is not a coordinate of the reduced jet space",
            eq(equation),
            render::jet(*jet, layout)
        ),
        Violation::TimeDerivativeOfMultiplier { field, jet } => format!(
            "evolution of {}: time derivative {} of a multiplier",
            layout.fields[*field].name,
            render::jet(*jet, layout)
        ),
        Violation::MultiplierInConstraint { constraint, jet } => format!(
            "constraint of {}: mentions multiplier jet {}",
            layout.fields[layout.constrained_field(*constraint)].name,
            render::jet(*jet, layout)
        ),
        Violation::UnknownParameter(k) => format!("unknown parameter #{k}"),
        Violation::NotCompatible { jet, residual } => format!(
            "d(dbar({0})) and dbar(d({0})) differ by {1}",
            render::jet(*jet, layout),
            render::field_elem(residual, layout)
        ),
    }
}
