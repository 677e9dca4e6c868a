//! Key/value report trees.
//!
//! The machine format writes one node per line, `key: value` for leaves and
//! `key:` for branches, indented two spaces per level. The text format shows
//! the same nodes for reading.

use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub key: String,
    pub value: Option<String>,
    pub children: Vec<Node>,
}

impl Node {
    /// An empty value is stored as `-`.
    pub fn leaf(key: impl Into<String>, value: impl ToString) -> Node {
        let v = value.to_string();
        Node {
            key: key.into(),
            value: Some(if v.is_empty() { "-".into() } else { v }),
            children: Vec::new(),
        }
    }

    pub fn branch(key: impl Into<String>, children: Vec<Node>) -> Node {
        Node {
            key: key.into(),
            value: None,
            children,
        }
    }

    pub fn child(&self, key: &str) -> Option<&Node> {
        self.children.iter().find(|c| c.key == key)
    }

    /// Looks up a `/`-separated path below this node.
    pub fn get(&self, path: &str) -> Option<&Node> {
        path.split('/').try_fold(self, |n, k| n.child(k))
    }

    pub fn value_at(&self, path: &str) -> Option<&str> {
        self.get(path).and_then(|n| n.value.as_deref())
    }

    /// Every leaf as `(path, value)`, depth first.
    pub fn leaves(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for c in &self.children {
            c.collect_leaves("", &mut out);
        }
        out
    }

    fn collect_leaves(&self, prefix: &str, out: &mut Vec<(String, String)>) {
        let path = if prefix.is_empty() {
            self.key.clone()
        } else {
            format!("{prefix}/{}", self.key)
        };
        match &self.value {
            Some(v) => out.push((path, v.clone())),
            None => {
                for c in &self.children {
                    c.collect_leaves(&path, out);
                }
            }
        }
    }
}

fn write_machine(n: &Node, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match &n.value {
        Some(v) => writeln!(out, "{pad}{}: {v}", n.key).unwrap(),
        None => writeln!(out, "{pad}{}:", n.key).unwrap(),
    }
    for c in &n.children {
        write_machine(c, depth + 1, out);
    }
}

/// Machine serialization of the children of `root`.
pub fn to_machine(root: &Node) -> String {
    let mut out = String::new();
    for c in &root.children {
        write_machine(c, 0, &mut out);
    }
    out
}

/// Reads the machine format back into a tree rooted at an unnamed node.
pub fn parse_machine(text: &str) -> Result<Node, String> {
    let mut stack: Vec<Node> = vec![Node::branch("", Vec::new())];
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start_matches(' ').len();
        if indent % 2 != 0 {
            return Err(format!("line {}: odd indentation", i + 1));
        }
        let depth = indent / 2 + 1;
        if depth > stack.len() {
            return Err(format!("line {}: indented below a leaf or too deep", i + 1));
        }
        while stack.len() > depth {
            let done = stack.pop().unwrap();
            stack.last_mut().unwrap().children.push(done);
        }
        let body = &line[indent..];
        let Some((key, rest)) = body.split_once(':') else {
            return Err(format!("line {}: missing ':'", i + 1));
        };
        if rest.is_empty() {
            stack.push(Node::branch(key, Vec::new()));
        } else {
            let Some(v) = rest.strip_prefix(' ') else {
                return Err(format!("line {}: expected ': ' after key", i + 1));
            };
            stack.last_mut().unwrap().children.push(Node::leaf(key, v));
        }
    }
    while stack.len() > 1 {
        let done = stack.pop().unwrap();
        stack.last_mut().unwrap().children.push(done);
    }
    Ok(stack.pop().unwrap())
}

fn write_text(n: &Node, depth: usize, out: &mut String) {
    if let (0, Some(v)) = (depth, &n.value) {
        writeln!(out, "{}: {v}", n.key.replace('_', " ")).unwrap();
        return;
    }
    if depth == 0 {
        let title = n.key.replace('_', " ");
        writeln!(out, "{title}").unwrap();
        writeln!(out, "{}", "-".repeat(title.chars().count())).unwrap();
        for c in &n.children {
            write_text(c, 1, out);
        }
        writeln!(out).unwrap();
        return;
    }
    let pad = "  ".repeat(depth);
    match &n.value {
        Some(v) => {
            let dots = ".".repeat(18usize.saturating_sub(n.key.chars().count() + 2 * depth).max(2));
            writeln!(out, "{pad}{} {dots} {v}", n.key).unwrap()
        }
        None => {
            writeln!(out, "{pad}{}", n.key).unwrap();
            for c in &n.children {
                write_text(c, depth + 1, out);
            }
        }
    }
}

/// Human-readable rendering: one titled block per top-level node.
pub fn to_text(root: &Node) -> String {
    let mut out = String::new();
    for c in &root.children {
        write_text(c, 0, &mut out);
    }
    out.trim_end().to_string() + "\n"
}

/// Compares `path = value` lines against a report; returns the mismatches.
pub fn check_expected(report: &Node, expected: &str) -> Result<Vec<String>, String> {
    let mut mismatches = Vec::new();
    for (i, raw) in expected.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((path, want)) = line.split_once('=') else {
            return Err(format!("line {}: expected path = value", i + 1));
        };
        let (path, want) = (path.trim(), want.trim());
        match report.value_at(path) {
            Some(got) if got == want => {}
            Some(got) => mismatches.push(format!("{path}: expected {want}, got {got}")),
            None => mismatches.push(format!("{path}: missing from the report")),
        }
    }
    Ok(mismatches)
}
