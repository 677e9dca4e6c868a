//! Expression grammar shared by system files and reports.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' '-'? INT)?
//! atom    := INT | IDENT | ('d' | 'dbar') '(' sum ')' | '(' sum ')'
//! ```
//!
//! `D` and `Dbar` are operator symbols when operators are enabled.

use std::fmt;

use gauge2d_core::cartan::Layout;
use gauge2d_core::ore::{self, OreOp};
use gauge2d_core::{FieldElem, JetCoord, JetDerivations, JetKind};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Ident(String),
    D(Box<Expr>),
    Dbar(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

struct Wrapped<'a>(&'a Expr, u8);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.prec() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Ident(s) => f.write_str(s),
            Expr::D(a) => write!(f, "d({a})"),
            Expr::Dbar(a) => write!(f, "dbar({a})"),
            Expr::Neg(a) => write!(f, "-{}", Wrapped(a, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", Wrapped(a, 1), Wrapped(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", Wrapped(a, 2), Wrapped(b, 3)),
            Expr::Pow(a, e) => write!(f, "{}^{e}", Wrapped(a, 5)),
        }
    }
}

/// A syntax error at a character offset of the parsed text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.offset + 1, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(SyntaxError {
                offset: i,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

/// What an identifier stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Name {
    Field(usize),
    Lambda(usize),
    Param(usize),
    D,
    Dbar,
}

/// Identifiers known to the parser.
#[derive(Clone, Debug)]
pub struct Names<'a> {
    layout: &'a Layout,
    operators: bool,
}

impl<'a> Names<'a> {
    /// Field, multiplier and parameter names of a layout.
    pub fn scalars(layout: &'a Layout) -> Self {
        Names {
            layout,
            operators: false,
        }
    }

    /// The layout names plus the operator symbols `D` and `Dbar`.
    pub fn operators(layout: &'a Layout) -> Self {
        Names {
            layout,
            operators: true,
        }
    }

    pub fn layout(&self) -> &Layout {
        self.layout
    }

    pub fn lookup(&self, s: &str) -> Option<Name> {
        let l = self.layout;
        if let Some(i) = l.fields.iter().position(|f| f.name == s) {
            return Some(Name::Field(i));
        }
        if let Some(i) = l.lambdas.iter().position(|x| x == s) {
            return Some(Name::Lambda(i));
        }
        if let Some(i) = l.params.iter().position(|x| x == s) {
            return Some(Name::Param(i));
        }
        match (self.operators, s) {
            (true, "D") => Some(Name::D),
            (true, "Dbar") => Some(Name::Dbar),
            _ => None,
        }
    }
}

/// Words that cannot name a field, multiplier or parameter.
pub const RESERVED: [&str; 4] = ["d", "dbar", "D", "Dbar"];

struct Parser<'n, 'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: Option<&'n Names<'a>>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let negative = *self.peek() == Tok::Sym('-');
        if negative {
            self.bump();
        }
        let Tok::Int(n) = self.peek().clone() else {
            return self.err("exponent must be an integer literal");
        };
        let Ok(e) = i64::try_from(&n) else {
            return self.err("exponent too large");
        };
        self.bump();
        if *self.peek() == Tok::Sym('^') {
            return self.err("chained exponents need parentheses");
        }
        Ok(Expr::Pow(Box::new(base), if negative { -e } else { e }))
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::Sym('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(s) if s == "d" || s == "dbar" => {
                self.expect('(')?;
                let arg_at = self.offset();
                let arg = self.sum()?;
                self.expect(')')?;
                if s == "d" && !self.multiplier_jet(&arg) {
                    return Err(SyntaxError {
                        offset: arg_at,
                        message: "d applies only to multipliers and their derivatives".into(),
                    });
                }
                Ok(if s == "d" {
                    Expr::D(Box::new(arg))
                } else {
                    Expr::Dbar(Box::new(arg))
                })
            }
            Tok::Ident(s) => {
                if let Some(names) = self.names {
                    if names.lookup(&s).is_none() {
                        return Err(SyntaxError {
                            offset: at,
                            message: format!("unknown identifier '{s}'"),
                        });
                    }
                }
                Ok(Expr::Ident(s))
            }
            Tok::End => Err(SyntaxError {
                offset: at,
                message: "unexpected end of expression".into(),
            }),
            Tok::Sym(c) => Err(SyntaxError {
                offset: at,
                message: format!("unexpected '{c}'"),
            }),
        }
    }

    /// A multiplier name under `d`/`dbar` applications. Without a name
    /// table any identifier qualifies.
    fn multiplier_jet(&self, e: &Expr) -> bool {
        match e {
            Expr::D(a) | Expr::Dbar(a) => self.multiplier_jet(a),
            Expr::Ident(s) => match self.names {
                Some(n) => matches!(n.lookup(s), Some(Name::Lambda(_))),
                None => true,
            },
            _ => false,
        }
    }
}

/// Parses a complete expression. With a name table every identifier must
/// be known.
pub fn parse(text: &str, names: Option<&Names>) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        names,
    };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown identifier '{0}'")]
    Unknown(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operator where a function is required: {0}")]
    NotScalar(String),
    #[error("d applies only to multipliers and their derivatives")]
    TimeDerivative,
}

/// Prolongation that raises jet orders without using any equations.
struct Prolong;

impl JetDerivations for Prolong {
    fn dbar_jet(&self, j: JetCoord) -> FieldElem {
        FieldElem::jet(JetCoord { q: j.q + 1, ..j })
    }
    fn dtime_jet(&self, j: JetCoord) -> FieldElem {
        FieldElem::jet(JetCoord { p: j.p + 1, ..j })
    }
}

fn scalar_of(op: &OreOp, e: &Expr) -> Result<FieldElem, EvalError> {
    if op.terms().all(|(&k, _)| k == (0, 0)) {
        Ok(op.coeff(0, 0))
    } else {
        Err(EvalError::NotScalar(e.to_string()))
    }
}

fn eval_with(e: &Expr, names: &Names, sys: &dyn JetDerivations) -> Result<OreOp, EvalError> {
    let layout = names.layout();
    let scalar = |x: &Expr| -> Result<FieldElem, EvalError> { scalar_of(&eval_with(x, names, sys)?, x) };
    Ok(match e {
        Expr::Int(n) => OreOp::scalar(FieldElem::rational(BigRational::from_integer(n.clone()))),
        Expr::Ident(s) => match names.lookup(s) {
            Some(Name::Field(i)) => OreOp::scalar(FieldElem::jet(layout.field_jet(i))),
            Some(Name::Lambda(a)) => OreOp::scalar(FieldElem::jet(JetCoord::lambda(a as u32, 0, 0))),
            Some(Name::Param(k)) => OreOp::scalar(FieldElem::param(k as u32)),
            Some(Name::D) => OreOp::d(),
            Some(Name::Dbar) => OreOp::dbar(),
            None => return Err(EvalError::Unknown(s.clone())),
        },
        Expr::D(a) => {
            let f = scalar(a)?;
            if f.jets().iter().any(|j| j.kind != JetKind::Lambda) {
                return Err(EvalError::TimeDerivative);
            }
            OreOp::scalar(gauge2d_core::jetfield::dtime(&f, &Prolong))
        }
        Expr::Dbar(a) => OreOp::scalar(gauge2d_core::jetfield::dbar(&scalar(a)?, &Prolong)),
        Expr::Neg(a) => eval_with(a, names, sys)?.neg(),
        Expr::Add(a, b) => eval_with(a, names, sys)?.add(&eval_with(b, names, sys)?),
        Expr::Sub(a, b) => eval_with(a, names, sys)?.sub(&eval_with(b, names, sys)?),
        Expr::Mul(a, b) => ore::mul(&eval_with(a, names, sys)?, &eval_with(b, names, sys)?, sys),
        Expr::Div(a, b) => {
            let inv = scalar(b)?.inv().map_err(|_| EvalError::DivisionByZero)?;
            ore::mul(&eval_with(a, names, sys)?, &OreOp::scalar(inv), sys)
        }
        Expr::Pow(a, k) => {
            let base = eval_with(a, names, sys)?;
            if *k < 0 {
                let f = scalar_of(&base, a)?;
                let exp = i32::try_from(*k).map_err(|_| EvalError::DivisionByZero)?;
                OreOp::scalar(f.pow(exp).map_err(|_| EvalError::DivisionByZero)?)
            } else {
                (0..*k).fold(OreOp::one(), |acc, _| ore::mul(&acc, &base, sys))
            }
        }
    })
}

/// Evaluates an expression to an element of the jet field.
pub fn eval_scalar(e: &Expr, names: &Names) -> Result<FieldElem, EvalError> {
    scalar_of(&eval_with(e, names, &Prolong)?, e)
}

/// Evaluates an operator expression; products are composed through `sys`.
pub fn eval_op(e: &Expr, names: &Names, sys: &dyn JetDerivations) -> Result<OreOp, EvalError> {
    eval_with(e, names, sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gauge2d_core::cartan::FieldDecl;

    fn layout() -> Layout {
        Layout::new(vec![FieldDecl::free("phi")], vec!["lam".into()], vec!["g".into()])
    }

    fn p(s: &str) -> Expr {
        parse(s, None).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-a^2"), Expr::Neg(Box::new(p("a^2"))));
        assert_eq!(p("-a*b"), Expr::Mul(Box::new(p("-a")), Box::new(p("b"))));
        assert_eq!(p("a - b - c").to_string(), "a - b - c");
        assert_eq!(p("a - (b - c)").to_string(), "a - (b - c)");
        assert_eq!(p("a/(b*c)").to_string(), "a/(b*c)");
        assert_eq!(p("(a^2)^3").to_string(), "(a^2)^3");
        assert_eq!(p("x^-2"), Expr::Pow(Box::new(p("x")), -2));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(parse("a + ", None).unwrap_err().offset, 4);
        assert_eq!(parse("a $ b", None).unwrap_err().offset, 2);
        assert!(parse("a^b", None).is_err());
        assert!(parse("a^2^3", None).is_err());
        assert!(parse("(a", None).is_err());
        let l = layout();
        let names = Names::scalars(&l);
        let e = parse("phi + psi", Some(&names)).unwrap_err();
        assert_eq!(e.offset, 6);
        let e = parse("d(phi)", Some(&names)).unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(parse("d(dbar(lam))", Some(&names)).is_ok());
    }

    #[test]
    fn evaluates_the_coupled_right_hand_side() {
        let l = layout();
        let names = Names::scalars(&l);
        let e = parse("g/2*phi^2 - g/2*lam^2 - dbar(lam)", Some(&names)).unwrap();
        let z = eval_scalar(&e, &names).unwrap();
        let g = FieldElem::param(0);
        let phi = FieldElem::jet(JetCoord::phi_a(0, 0));
        let lam = FieldElem::jet(JetCoord::lambda(0, 0, 0));
        let half = FieldElem::ratio(1, 2);
        let expect = half
            .mul(&g)
            .mul(&phi.mul(&phi))
            .sub(&half.mul(&g).mul(&lam.mul(&lam)))
            .sub(&FieldElem::jet(JetCoord::lambda(0, 0, 1)));
        assert_eq!(z, expect);
        assert_eq!(
            eval_scalar(&p("1/(phi - phi)"), &names),
            Err(EvalError::DivisionByZero)
        );
    }

    #[test]
    fn operators_need_the_operator_table() {
        let l = layout();
        assert!(parse("D*Dbar", Some(&Names::scalars(&l))).is_err());
        let names = Names::operators(&l);
        let op = eval_op(&parse("Dbar*lam", Some(&names)).unwrap(), &names, &Prolong).unwrap();
        let lam = FieldElem::jet(JetCoord::lambda(0, 0, 0));
        let expect = OreOp::monomial(lam, 0, 1).add(&OreOp::scalar(FieldElem::jet(JetCoord::lambda(0, 0, 1))));
        assert_eq!(op, expect);
        assert!(eval_scalar(&parse("D", Some(&names)).unwrap(), &names).is_err());
    }
}
