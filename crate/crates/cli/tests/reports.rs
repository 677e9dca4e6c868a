use std::path::PathBuf;

use gauge2d::commands::load_system;
use gauge2d::expr::{eval_op, parse, Names};
use gauge2d::pipeline::{eps, run_pipeline, PipelineOptions};
use gauge2d::report::{parse_machine, to_machine, to_text, Node};
use gauge2d_core::noether::{analyze, primary_constraints};
use gauge2d_core::CartanSystem;

const FIXTURES: [&str; 5] = ["coupled", "coupled_g0", "integrable", "trivial", "gaugeless"];

fn load(name: &str) -> CartanSystem {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("fixtures/{name}.g2d"));
    load_system(&std::fs::read_to_string(path).unwrap()).unwrap().1
}

fn int(n: &Node, key: &str) -> i64 {
    n.value_at(key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .parse()
        .unwrap_or_else(|_| panic!("{key} is not an integer"))
}

fn one_of(n: &Node, key: &str, allowed: &[&str]) {
    let v = n.value_at(key).unwrap_or_else(|| panic!("missing {key}"));
    assert!(allowed.contains(&v), "{key} = {v}");
}

fn keys(n: &Node) -> Vec<&str> {
    n.children.iter().map(|c| c.key.as_str()).collect()
}

/// Structure and value types of an analysis report.
fn check_schema(r: &Node, sys: &CartanSystem) {
    let top = keys(r);
    let fixed = ["system", "stabilization", "constraints", "generators", "reducibility", "dof", "verification"];
    assert_eq!(&top[..fixed.len()], &fixed);
    assert_eq!(top.last(), Some(&"status"));
    for extra in &top[fixed.len()..top.len() - 1] {
        assert!(["specialization", "notes"].contains(extra), "{extra}");
    }

    let s = r.child("system").unwrap();
    assert_eq!(keys(s), ["fields", "constrained", "lambdas", "params", "n", "m", "l"]);
    assert_eq!(int(s, "n") as usize, sys.n());
    assert_eq!(int(s, "m") as usize, sys.m());
    assert_eq!(int(s, "l") as usize, sys.l());

    let st = r.child("stabilization").unwrap();
    assert_eq!(keys(st), ["K", "budget"]);
    if sys.l() == 0 {
        assert_eq!(st.value_at("K"), Some("-"));
    } else {
        int(st, "K");
    }
    int(st, "budget");

    let layout = sys.layout();
    let c = r.child("constraints").unwrap();
    assert_eq!(keys(c), layout.lambdas.iter().map(String::as_str).collect::<Vec<_>>());
    let pis: Vec<String> = layout.fields.iter().map(|f| format!("pi_{}", f.name)).collect();
    for row in &c.children {
        assert_eq!(keys(row), pis.iter().map(String::as_str).collect::<Vec<_>>());
    }

    let vars: Vec<&str> = layout
        .fields
        .iter()
        .map(|f| f.name.as_str())
        .chain(layout.lambdas.iter().map(String::as_str))
        .collect();
    let g = r.child("generators").unwrap();
    let r1 = int(g, "count") as usize;
    let mut expect = vec!["count".to_string()];
    expect.extend((0..r1).map(eps));
    assert_eq!(keys(g), expect.iter().map(String::as_str).collect::<Vec<_>>());
    for gen in &g.children[1..] {
        assert_eq!(keys(gen), vars);
    }

    let z = r.child("reducibility").unwrap();
    let r2 = int(z, "count") as usize;
    assert_eq!(z.children.len(), r2 + 1);
    let epsilons: Vec<String> = (0..r1).map(eps).collect();
    for (a, rel) in z.children[1..].iter().enumerate() {
        assert_eq!(rel.key, format!("rel{}", a + 1));
        assert_eq!(keys(rel), epsilons.iter().map(String::as_str).collect::<Vec<_>>());
    }

    let d = r.child("dof").unwrap();
    assert_eq!(keys(d), ["n", "m", "rank_rbar", "value", "status"]);
    assert_eq!(int(d, "value"), int(d, "n") - int(d, "m") - int(d, "rank_rbar"));
    assert_eq!(d.value_at("status"), Some("conjectural"));

    let v = r.child("verification").unwrap();
    one_of(v, "gauge", &["pass", "fail"]);
    one_of(v, "reducibility", &["pass", "fail"]);
    one_of(v, "injective", &["yes", "no"]);
    one_of(v, "rank_law", &["yes", "no"]);
    int(v, "gauge_residuals");
    int(v, "rz_residuals");
    one_of(r, "status", &["verified", "failed"]);
}

#[test]
fn reports_follow_the_schema() {
    for name in FIXTURES {
        let sys = load(name);
        let out = run_pipeline(&sys, &PipelineOptions::default()).unwrap();
        check_schema(&out.report, &sys);
        let reparsed = parse_machine(&to_machine(&out.report)).unwrap();
        assert_eq!(reparsed, out.report, "{name}");
    }
}

#[test]
fn text_and_machine_carry_the_same_data() {
    for name in FIXTURES {
        let sys = load(name);
        let opts = PipelineOptions {
            specialize: (!sys.layout().params.is_empty()).then(|| (0, num_rational::BigRational::from_integer(0.into()))),
            ..Default::default()
        };
        let out = run_pipeline(&sys, &opts).unwrap();
        let text = to_text(&out.report);
        let lines: Vec<&str> = text.lines().collect();
        let leaves = out.report.leaves();
        let mut cursor = 0;
        for (path, value) in &leaves {
            let key = path.rsplit('/').next().unwrap();
            let at = lines[cursor..]
                .iter()
                .position(|l| l.trim_start().starts_with(&key.replace('_', " ")) || l.trim_start().starts_with(key))
                .map(|p| p + cursor)
                .unwrap_or_else(|| panic!("{name}: {path} missing from text"));
            assert!(lines[at].ends_with(value.as_str()), "{name}: {path}");
            cursor = at + 1;
        }
    }
}

#[test]
fn rendered_operators_parse_back() {
    for name in FIXTURES {
        let sys = load(name);
        let layout = sys.layout();
        let names = Names::operators(layout);
        let report = run_pipeline(&sys, &PipelineOptions::default()).unwrap().report;
        let res = analyze(&sys, None).unwrap().resolution;
        let back = |path: &str| {
            let text = report.value_at(path).unwrap();
            let e = parse(text, Some(&names)).unwrap_or_else(|e| panic!("{path}: {e}: {text}"));
            eval_op(&e, &names, &sys).unwrap()
        };
        let vars: Vec<String> = layout
            .fields
            .iter()
            .map(|f| f.name.clone())
            .chain(layout.lambdas.iter().cloned())
            .collect();
        for g in 0..res.r1() {
            for (row, v) in vars.iter().enumerate() {
                assert_eq!(&back(&format!("generators/{}/{v}", eps(g))), res.r_gen.get(row, g));
            }
        }
        for a in 0..res.r2() {
            for g in 0..res.r1() {
                assert_eq!(&back(&format!("reducibility/rel{}/{}", a + 1, eps(g))), res.z_gen.get(g, a));
            }
        }
        for (alpha, t) in primary_constraints(&sys).iter().enumerate() {
            for (i, f) in layout.fields.iter().enumerate() {
                let path = format!("constraints/{}/pi_{}", layout.lambdas[alpha], f.name);
                assert_eq!(&back(&path), t.row.get(0, i));
            }
        }
    }
}
