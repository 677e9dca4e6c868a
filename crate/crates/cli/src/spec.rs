//! System files.
//!
//! ```text
//! # comment
//! [fields]
//! u, v
//! constrained = [u]
//!
//! [lambdas]
//! lam
//!
//! [params]
//! g
//!
//! [evolution]
//! u = 2*lam
//! v = lam
//!
//! [constraints]
//! u = 2*dbar(v)
//!
//! [options]
//! max_k = 6
//! order_bound = 4
//! format = machine
//!
//! [theta]
//! u.v = v
//! ```
//!
//! `[theta]` holds Pfaffian data `Z_a^J` as `J.a = expr` for `reduce-pfaffian`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use gauge2d_core::cartan::{CartanSystem, FieldDecl, Layout, PfaffianInput};
use gauge2d_core::FieldElem;

use crate::expr::{self, Expr, Names, RESERVED};

/// A parse error at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for FileError {}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, FileError> {
    Err(FileError {
        line,
        col,
        message: message.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "machine" => Ok(Format::Machine),
            _ => Err(format!("unknown format '{s}' (expected text or machine)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub max_k: Option<usize>,
    pub order_bound: Option<u32>,
    pub format: Option<Format>,
}

/// One `key = expr` line.
#[derive(Clone, Debug)]
struct Entry {
    key: String,
    text: String,
    line: usize,
    col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Fields,
    Lambdas,
    Params,
    Evolution,
    Constraints,
    Options,
    Theta,
}

impl Section {
    fn parse(s: &str) -> Option<Section> {
        Some(match s {
            "fields" => Section::Fields,
            "lambdas" => Section::Lambdas,
            "params" => Section::Params,
            "evolution" => Section::Evolution,
            "constraints" => Section::Constraints,
            "options" => Section::Options,
            "theta" => Section::Theta,
            _ => return None,
        })
    }
}

/// A parsed system file.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub layout: Layout,
    /// `Z^i` per field, in field order; empty when the file has no `[evolution]`.
    pub evolution: Vec<Expr>,
    /// `Z^J` per constrained field.
    pub constraints: Vec<Expr>,
    /// `theta[J][a]`, empty when the file has no `[theta]`.
    pub theta: Vec<Vec<Expr>>,
    pub options: Options,
    positions: BTreeMap<(Section, usize, usize), (usize, usize)>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && c.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `a, b, c` (or `[a, b, c]` when `bracketed`) into names with their columns.
fn name_list(text: &str, line: usize, col: usize, bracketed: bool) -> Result<Vec<(String, usize)>, FileError> {
    let trimmed = text.trim();
    let lead = text.len() - text.trim_start().len();
    let (body, off) = if bracketed {
        match trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            Some(b) => (b, col + lead + 1),
            None => return err(line, col + lead, "expected a list [a, b, ...]"),
        }
    } else {
        (trimmed, col + lead)
    };
    let mut out = Vec::new();
    let mut pos = 0;
    for part in body.split(',') {
        let name = part.trim();
        let c = off + pos + (part.len() - part.trim_start().len());
        pos += part.len() + 1;
        if name.is_empty() {
            if body.trim().is_empty() {
                break;
            }
            return err(line, c, "empty name in list");
        }
        if !is_ident(name) {
            return err(line, c, format!("'{name}' is not an identifier"));
        }
        out.push((name.to_string(), c));
    }
    Ok(out)
}

/// Reads a system file. Expressions are checked against the declared names.
pub fn parse_spec(text: &str) -> Result<SystemSpec, FileError> {
    let mut section: Option<Section> = None;
    let mut seen = BTreeSet::new();
    let mut fields: Vec<(String, usize, usize)> = Vec::new();
    let mut constrained: Vec<(String, usize, usize)> = Vec::new();
    let mut lambdas: Vec<(String, usize, usize)> = Vec::new();
    let mut params: Vec<(String, usize, usize)> = Vec::new();
    let mut entries: BTreeMap<Section, Vec<Entry>> = BTreeMap::new();
    let mut options = Options::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let Some(s) = Section::parse(name.trim()) else {
                return err(line, indent + 1, format!("unknown section [{}]", name.trim()));
            };
            if !seen.insert(s) {
                return err(line, indent + 1, format!("duplicate section [{}]", name.trim()));
            }
            section = Some(s);
            continue;
        }
        let Some(sec) = section else {
            return err(line, indent + 1, "content before the first section");
        };
        let (key, value, value_col) = match body.find('=') {
            Some(eq) => (Some(body[..eq].trim()), &body[eq + 1..], eq + 2),
            None => (None, body, 1),
        };
        match sec {
            Section::Fields | Section::Lambdas | Section::Params => {
                let target = match (sec, key) {
                    (Section::Fields, Some("constrained")) => &mut constrained,
                    (_, Some(k)) => return err(line, indent + 1, format!("unexpected key '{k}'")),
                    (Section::Fields, None) => &mut fields,
                    (Section::Lambdas, None) => &mut lambdas,
                    _ => &mut params,
                };
                for (name, col) in name_list(value, line, value_col, key.is_some())? {
                    target.push((name, line, col));
                }
            }
            Section::Options => {
                let Some(k) = key else {
                    return err(line, indent + 1, "expected key = value");
                };
                let v = value.trim();
                let bad = || FileError {
                    line,
                    col: value_col,
                    message: format!("{k} must be a nonnegative integer"),
                };
                match k {
                    "max_k" => options.max_k = Some(v.parse().map_err(|_| bad())?),
                    "order_bound" => options.order_bound = Some(v.parse().map_err(|_| bad())?),
                    "format" => options.format = Some(v.parse().or_else(|e: String| err(line, value_col, e))?),
                    _ => return err(line, indent + 1, format!("unknown option '{k}'")),
                }
            }
            Section::Evolution | Section::Constraints | Section::Theta => {
                let Some(k) = key else {
                    return err(line, indent + 1, "expected name = expression");
                };
                entries.entry(sec).or_default().push(Entry {
                    key: k.to_string(),
                    text: value.to_string(),
                    line,
                    col: value_col,
                });
            }
        }
    }

    let mut all = BTreeSet::new();
    for (name, line, col) in fields.iter().chain(&lambdas).chain(&params) {
        if RESERVED.contains(&name.as_str()) {
            return err(*line, *col, format!("'{name}' is reserved"));
        }
        if !all.insert(name.clone()) {
            return err(*line, *col, format!("'{name}' declared twice"));
        }
    }
    if fields.is_empty() {
        return err(1, 1, "no fields declared");
    }
    let mut cset = BTreeSet::new();
    for (name, line, col) in &constrained {
        if !fields.iter().any(|f| &f.0 == name) {
            return err(*line, *col, format!("constrained '{name}' is not a field"));
        }
        if !cset.insert(name.clone()) {
            return err(*line, *col, format!("'{name}' listed twice as constrained"));
        }
    }
    let decls = fields
        .iter()
        .map(|(name, ..)| {
            if cset.contains(name) {
                FieldDecl::constrained(name.clone())
            } else {
                FieldDecl::free(name.clone())
            }
        })
        .collect();
    let layout = Layout::new(
        decls,
        lambdas.into_iter().map(|x| x.0).collect(),
        params.into_iter().map(|x| x.0).collect(),
    );
    let names = Names::scalars(&layout);
    let mut positions = BTreeMap::new();

    let parse_entry = |e: &Entry| -> Result<Expr, FileError> {
        expr::parse(&e.text, Some(&names)).map_err(|s| FileError {
            line: e.line,
            col: e.col + s.offset,
            message: s.message,
        })
    };
    let field_index = |e: &Entry, name: &str, want_constrained: Option<bool>| -> Result<usize, FileError> {
        let Some(i) = layout.fields.iter().position(|f| f.name == name) else {
            return err(e.line, 1, format!("'{name}' is not a field"));
        };
        match want_constrained {
            Some(true) if !layout.fields[i].constrained => {
                err(e.line, 1, format!("'{name}' is not a constrained field"))
            }
            Some(false) if layout.fields[i].constrained => {
                err(e.line, 1, format!("'{name}' is constrained"))
            }
            _ => Ok(i),
        }
    };

    let mut evolution = Vec::new();
    if let Some(list) = entries.get(&Section::Evolution) {
        let mut slots: Vec<Option<Expr>> = vec![None; layout.n()];
        for e in list {
            let i = field_index(e, &e.key, None)?;
            if slots[i].is_some() {
                return err(e.line, 1, format!("second evolution entry for '{}'", e.key));
            }
            slots[i] = Some(parse_entry(e)?);
            positions.insert((Section::Evolution, i, 0), (e.line, e.col));
        }
        for (i, s) in slots.into_iter().enumerate() {
            match s {
                Some(x) => evolution.push(x),
                None => {
                    return err(list[0].line, 1, format!("no evolution entry for '{}'", layout.fields[i].name))
                }
            }
        }
    }

    let mut constraints = Vec::new();
    let clist = entries.get(&Section::Constraints).cloned().unwrap_or_default();
    if layout.m() > 0 && !evolution.is_empty() || !clist.is_empty() {
        let mut slots: Vec<Option<Expr>> = vec![None; layout.m()];
        for e in &clist {
            let i = field_index(e, &e.key, Some(true))?;
            let j = (0..layout.m()).find(|&j| layout.constrained_field(j) == i).expect("constrained");
            if slots[j].is_some() {
                return err(e.line, 1, format!("second constraint entry for '{}'", e.key));
            }
            slots[j] = Some(parse_entry(e)?);
            positions.insert((Section::Constraints, j, 0), (e.line, e.col));
        }
        for (j, s) in slots.into_iter().enumerate() {
            match s {
                Some(x) => constraints.push(x),
                None => {
                    let name = &layout.fields[layout.constrained_field(j)].name;
                    let line = clist.first().map_or(1, |e| e.line);
                    return err(line, 1, format!("no constraint entry for '{name}'"));
                }
            }
        }
    }

    let mut theta = Vec::new();
    if let Some(list) = entries.get(&Section::Theta) {
        let k = layout.n() - layout.m();
        let mut slots: Vec<Vec<Option<Expr>>> = vec![vec![None; k]; layout.m()];
        for e in list {
            let Some((jn, an)) = e.key.split_once('.') else {
                return err(e.line, 1, "theta keys are written J.a");
            };
            let i = field_index(e, jn.trim(), Some(true))?;
            let b = field_index(e, an.trim(), Some(false))?;
            let j = (0..layout.m()).find(|&j| layout.constrained_field(j) == i).expect("constrained");
            let a = (0..k).find(|&a| layout.free_field(a) == b).expect("free");
            if slots[j][a].is_some() {
                return err(e.line, 1, format!("second theta entry for '{}'", e.key));
            }
            slots[j][a] = Some(parse_entry(e)?);
            positions.insert((Section::Theta, j, a), (e.line, e.col));
        }
        // missing entries are zero
        theta = slots
            .into_iter()
            .map(|row| row.into_iter().map(|x| x.unwrap_or(Expr::Int(0.into()))).collect())
            .collect();
    }

    Ok(SystemSpec {
        layout,
        evolution,
        constraints,
        theta,
        options,
        positions,
    })
}

impl SystemSpec {
    fn eval(&self, e: &Expr, key: (Section, usize, usize)) -> Result<FieldElem, FileError> {
        let names = Names::scalars(&self.layout);
        expr::eval_scalar(e, &names).map_err(|x| {
            let (line, col) = self.positions.get(&key).copied().unwrap_or((1, 1));
            FileError {
                line,
                col,
                message: x.to_string(),
            }
        })
    }

    pub fn has_evolution(&self) -> bool {
        !self.evolution.is_empty()
    }

    /// The Cartan system, before validation.
    pub fn system(&self) -> Result<CartanSystem, FileError> {
        if !self.has_evolution() {
            return err(1, 1, "the file has no [evolution] section");
        }
        let evolution = self
            .evolution
            .iter()
            .enumerate()
            .map(|(i, e)| self.eval(e, (Section::Evolution, i, 0)))
            .collect::<Result<Vec<_>, _>>()?;
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(j, e)| self.eval(e, (Section::Constraints, j, 0)))
            .collect::<Result<Vec<_>, _>>()?;
        CartanSystem::new(self.layout.clone(), evolution, constraints).map_err(|e| FileError {
            line: 1,
            col: 1,
            message: e.to_string(),
        })
    }

    /// The Pfaffian data of the `[theta]` section.
    pub fn pfaffian(&self) -> Result<PfaffianInput, FileError> {
        if self.theta.is_empty() && self.layout.m() > 0 {
            return err(1, 1, "the file has no [theta] section");
        }
        if self.layout.l() > 0 {
            return err(1, 1, "Pfaffian data takes no [lambdas]; the multipliers are computed");
        }
        let theta = self
            .theta
            .iter()
            .enumerate()
            .map(|(j, row)| {
                row.iter()
                    .enumerate()
                    .map(|(a, e)| self.eval(e, (Section::Theta, j, a)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PfaffianInput {
            fields: self.layout.fields.clone(),
            params: self.layout.params.clone(),
            theta,
        })
    }
}

/// System file text for a Cartan system; parses back to the same system.
pub fn render_system(sys: &CartanSystem) -> String {
    use gauge2d_core::render::field_elem;
    let layout = sys.layout();
    let mut out = String::new();
    let names: Vec<&str> = layout.fields.iter().map(|f| f.name.as_str()).collect();
    out.push_str(&format!("[fields]\n{}\n", names.join(", ")));
    let constrained: Vec<&str> = layout
        .fields
        .iter()
        .filter(|f| f.constrained)
        .map(|f| f.name.as_str())
        .collect();
    if !constrained.is_empty() {
        out.push_str(&format!("constrained = [{}]\n", constrained.join(", ")));
    }
    if !layout.lambdas.is_empty() {
        out.push_str(&format!("\n[lambdas]\n{}\n", layout.lambdas.join(", ")));
    }
    if !layout.params.is_empty() {
        out.push_str(&format!("\n[params]\n{}\n", layout.params.join(", ")));
    }
    out.push_str("\n[evolution]\n");
    for (i, z) in sys.evolution().iter().enumerate() {
        out.push_str(&format!("{} = {}\n", layout.fields[i].name, field_elem(z, layout)));
    }
    if sys.m() > 0 {
        out.push_str("\n[constraints]\n");
        for (j, z) in sys.constraints().iter().enumerate() {
            let i = layout.constrained_field(j);
            out.push_str(&format!("{} = {}\n", layout.fields[i].name, field_elem(z, layout)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const COUPLED: &str = "\
[fields]
phi

[lambdas]
lam

[params]
g

[evolution]
phi = g/2*phi^2 - g/2*lam^2 - dbar(lam)
";

    #[test]
    fn reads_the_coupled_system() {
        let spec = parse_spec(COUPLED).unwrap();
        let sys = spec.system().unwrap();
        assert_eq!((sys.n(), sys.m(), sys.l()), (1, 0, 1));
        let again = parse_spec(&render_system(&sys)).unwrap().system().unwrap();
        assert_eq!(again.evolution(), sys.evolution());
    }

    #[test]
    fn errors_point_at_the_offending_token() {
        let bad = COUPLED.replace("dbar(lam)", "dbar(lam) + psi");
        let e = parse_spec(&bad).unwrap_err();
        assert_eq!((e.line, e.col), (11, 43), "{e}");
        let e = parse_spec("[fields]\nphi\n[wrong]\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_spec("phi = 1\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn structural_checks() {
        assert!(parse_spec("[fields]\nphi, phi\n").is_err());
        assert!(parse_spec("[fields]\nd\n").is_err());
        assert!(parse_spec("[fields]\nphi\nconstrained = [psi]\n").is_err());
        let missing = "[fields]\nu, v\nconstrained = [u]\n[evolution]\nu = 0\nv = 0\n";
        assert!(parse_spec(missing).is_err());
        let twice = "[fields]\nphi\n[evolution]\nphi = 0\nphi = 1\n";
        assert!(parse_spec(twice).is_err());
        let opts = "[fields]\nphi\n[options]\nmax_k = 3\nformat = machine\n";
        let spec = parse_spec(opts).unwrap();
        assert_eq!(spec.options.max_k, Some(3));
        assert_eq!(spec.options.format, Some(Format::Machine));
        assert!(parse_spec("[fields]\nphi\n[options]\nmax_k = -1\n").is_err());
    }

    #[test]
    fn theta_defaults_to_zero() {
        let spec = parse_spec("[fields]\nz, x, y\nconstrained = [z]\n[theta]\nz.y = x\n").unwrap();
        let p = spec.pfaffian().unwrap();
        assert!(p.theta[0][0].is_zero());
        assert!(!p.theta[0][1].is_zero());
    }
}
