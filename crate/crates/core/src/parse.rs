//! Problem-file parsing: systems, scalar equations, generator and transform
//! declarations, and options, one statement per line.
//!
//! Grammar (infix, ^ > unary minus > * / > + -):
//!
//! ```text
//! file       : line*
//! line       : statement? comment? NEWLINE
//! statement  : "f1''" "=" expr          system equation (vars x f1 f2 f1' f2')
//!            | "f2''" "=" expr
//!            | "u''"  "=" expr          scalar equation (vars x u u', const i)
//!            | "generator" expr ";" expr ";" expr      components in (x f1 f2)
//!            | "transform" expr ";" expr               components in (x u), i allowed
//!            | key "=" value            key in {ansatz_degree, tol, seed, format}
//! expr       : term  (("+" | "-") term)*
//! term       : unary (("*" | "/") unary)*
//! unary      : "-" unary | power
//! power      : atom ("^" exponent)*
//! exponent   : "-"? INT | "(" "-"? INT ")"
//! atom       : NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! Numbers are exact: decimals and scientific notation become rationals.
//! Implicit multiplication is rejected; primes bind to the identifier.

use crate::complexify::{ComplexOde, OdeSystem};
use crate::expr::{CScalar, Expr, Func, Q};
use crate::linearize::PointTransform;
use crate::symmetry::VectorField;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ParseErrorKind {
    Syntax { expected: Vec<&'static str> },
    Semantic,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.pos.line, self.pos.col, self.message
        )?;
        if let ParseErrorKind::Syntax { expected } = &self.kind {
            if !expected.is_empty() {
                write!(f, " (expected {})", expected.join(", "))?;
            }
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

fn syntax(pos: Pos, message: impl Into<String>, expected: Vec<&'static str>) -> ParseError {
    ParseError {
        pos,
        message: message.into(),
        kind: ParseErrorKind::Syntax { expected },
    }
}

fn semantic(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        pos,
        message: message.into(),
        kind: ParseErrorKind::Semantic,
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub ansatz_degree: Option<u32>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub system: Option<OdeSystem>,
    pub scalar: Option<ComplexOde>,
    pub generators: Vec<VectorField>,
    pub transforms: Vec<PointTransform>,
    pub options: Options,
}

impl ProblemFile {
    /// Analysis commands need exactly one of {system, scalar}.
    pub fn analysis_input(&self) -> Result<AnalysisInput<'_>, String> {
        match (&self.system, &self.scalar) {
            (Some(s), None) => Ok(AnalysisInput::System(s)),
            (None, Some(c)) => Ok(AnalysisInput::Scalar(c)),
            (Some(_), Some(_)) => {
                Err("problem file contains both a system and a scalar equation".into())
            }
            (None, None) => Err("problem file contains no equation to analyze".into()),
        }
    }
}

pub enum AnalysisInput<'a> {
    System(&'a OdeSystem),
    Scalar(&'a ComplexOde),
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Number(Q),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Equals,
    Semi,
    Eol,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Number(_) => "number".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Equals => "'='".into(),
            Tok::Semi => "';'".into(),
            Tok::Eol => "end of line".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    i: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            i: 0,
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.i).copied()?;
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.i).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\r')) {
                self.bump();
            }
            if self.peek() == Some(b'#') {
                while self.peek().is_some() && self.peek() != Some(b'\n') {
                    self.bump();
                }
            }
            let pos = self.pos();
            let Some(c) = self.peek() else {
                out.push((Tok::Eof, pos));
                return Ok(out);
            };
            match c {
                b'\n' => {
                    self.bump();
                    out.push((Tok::Eol, pos));
                }
                b'+' => {
                    self.bump();
                    out.push((Tok::Plus, pos));
                }
                b'-' => {
                    self.bump();
                    out.push((Tok::Minus, pos));
                }
                b'*' => {
                    self.bump();
                    out.push((Tok::Star, pos));
                }
                b'/' => {
                    self.bump();
                    out.push((Tok::Slash, pos));
                }
                b'^' => {
                    self.bump();
                    out.push((Tok::Caret, pos));
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LParen, pos));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RParen, pos));
                }
                b'=' => {
                    self.bump();
                    out.push((Tok::Equals, pos));
                }
                b';' => {
                    self.bump();
                    out.push((Tok::Semi, pos));
                }
                b'0'..=b'9' | b'.' => {
                    out.push((self.number(pos)?, pos));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut s = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_')
                    {
                        s.push(self.bump().unwrap() as char);
                    }
                    // Primes bind to the identifier.
                    while self.peek() == Some(b'\'') {
                        self.bump();
                        s.push('\'');
                    }
                    out.push((Tok::Ident(s), pos));
                }
                other => {
                    return Err(syntax(
                        pos,
                        format!("unexpected character '{}'", other as char),
                        vec![],
                    ))
                }
            }
        }
    }

    fn number(&mut self, pos: Pos) -> Result<Tok, ParseError> {
        let mut int_part = String::new();
        let mut frac_part = String::new();
        let mut exp_part = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            int_part.push(self.bump().unwrap() as char);
        }
        if self.peek() == Some(b'.') {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                frac_part.push(self.bump().unwrap() as char);
            }
            if int_part.is_empty() && frac_part.is_empty() {
                return Err(syntax(pos, "malformed number", vec!["digits"]));
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            // Only treat as an exponent when followed by digits or a sign;
            // otherwise it is the start of an identifier (rejected later as
            // implicit multiplication).
            let save = (self.i, self.line, self.col);
            self.bump();
            let mut sign = String::new();
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                sign.push(self.bump().unwrap() as char);
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                exp_part.push_str(&sign);
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    exp_part.push(self.bump().unwrap() as char);
                }
            } else {
                (self.i, self.line, self.col) = save;
            }
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(syntax(pos, "malformed number", vec!["digits"]));
        }
        let mut num = BigInt::from_str(&format!(
            "{}{}",
            if int_part.is_empty() { "0" } else { &int_part },
            frac_part
        ))
        .map_err(|_| syntax(pos, "malformed number", vec![]))?;
        let mut den = BigInt::one();
        for _ in 0..frac_part.len() {
            den *= 10;
        }
        if !exp_part.is_empty() {
            let e: i64 = exp_part
                .parse()
                .map_err(|_| syntax(pos, "malformed exponent", vec![]))?;
            if e >= 0 {
                for _ in 0..e {
                    num *= 10;
                }
            } else {
                for _ in 0..(-e) {
                    den *= 10;
                }
            }
        }
        Ok(Tok::Number(Q::new(num, den)))
    }
}

// ---------------------------------------------------------------------------
// Untyped expression AST with positions for semantic diagnostics.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Ast {
    Num(Q),
    Ident(String, Pos),
    Call(String, Box<Ast>, Pos),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, Pos),
    Neg(Box<Ast>),
    Pow(Box<Ast>, i32),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, t: &Tok, what: &'static str) -> Result<Pos, ParseError> {
        if self.peek() == t {
            Ok(self.bump().1)
        } else {
            Err(syntax(
                self.pos(),
                format!("found {}", self.peek().describe()),
                vec![what],
            ))
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let pos = self.pos();
                    self.bump();
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), pos);
                }
                Tok::Ident(_) | Tok::Number(_) | Tok::LParen => {
                    return Err(syntax(
                        self.pos(),
                        format!(
                            "implicit multiplication is not allowed (found {})",
                            self.peek().describe()
                        ),
                        vec!["operator", "end of line"],
                    ));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.peek() == &Tok::Minus {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let mut base = self.atom()?;
        while self.peek() == &Tok::Caret {
            self.bump();
            let n = self.exponent()?;
            base = Ast::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = self.peek() == &Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let mut sign = 1i64;
        if self.peek() == &Tok::Minus {
            self.bump();
            sign = -1;
        }
        let pos = self.pos();
        let Tok::Number(q) = self.peek().clone() else {
            return Err(syntax(
                pos,
                format!("found {}", self.peek().describe()),
                vec!["integer exponent"],
            ));
        };
        self.bump();
        if !q.is_integer() {
            return Err(semantic(pos, "powers are restricted to integer exponents"));
        }
        let n: i64 = q
            .to_integer()
            .try_into()
            .map_err(|_| semantic(pos, "exponent out of range"))?;
        if parenthesized {
            self.expect(&Tok::RParen, "')'")?;
        }
        i32::try_from(sign * n).map_err(|_| semantic(pos, "exponent out of range"))
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        match self.bump().0 {
            Tok::Number(q) => Ok(Ast::Num(q)),
            Tok::Ident(name) => {
                if self.peek() == &Tok::LParen {
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(Ast::Call(name, Box::new(arg), pos))
                } else {
                    Ok(Ast::Ident(name, pos))
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            other => Err(syntax(
                pos,
                format!("found {}", other.describe()),
                vec!["number", "identifier", "'('"],
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Context-checked conversion of the untyped AST.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ctx {
    System,
    Generator,
    Scalar,
    Transform,
}

impl Ctx {
    fn describe(self) -> &'static str {
        match self {
            Ctx::System => "a system equation",
            Ctx::Generator => "a generator component",
            Ctx::Scalar => "a scalar equation",
            Ctx::Transform => "a transform component",
        }
    }
}

fn to_expr(ast: &Ast, ctx: Ctx) -> Result<Expr, ParseError> {
    Ok(match ast {
        Ast::Num(q) => Expr::rational(q.clone()),
        Ast::Ident(name, pos) => match (name.as_str(), ctx) {
            ("x", _) => Expr::x(),
            ("f1", _) => Expr::f1(),
            ("f2", _) => Expr::f2(),
            ("f1'", Ctx::System) => Expr::f1p(),
            ("f2'", Ctx::System) => Expr::f2p(),
            ("u" | "u'" | "i", _) => {
                return Err(semantic(
                    *pos,
                    format!("'{name}' is not legal in {}", ctx.describe()),
                ))
            }
            _ => {
                return Err(semantic(
                    *pos,
                    format!("unknown identifier '{name}' in {}", ctx.describe()),
                ))
            }
        },
        Ast::Call(name, arg, pos) => {
            let f = Func::from_name(name).ok_or_else(|| {
                semantic(*pos, format!("unknown function '{name}'"))
            })?;
            Expr::func(f, &to_expr(arg, ctx)?)
        }
        Ast::Add(a, b) => to_expr(a, ctx)? + to_expr(b, ctx)?,
        Ast::Sub(a, b) => to_expr(a, ctx)? - to_expr(b, ctx)?,
        Ast::Mul(a, b) => to_expr(a, ctx)? * to_expr(b, ctx)?,
        Ast::Div(a, b, pos) => {
            let den = to_expr(b, ctx)?;
            if den.is_const_zero() {
                return Err(semantic(*pos, "division by the zero constant"));
            }
            to_expr(a, ctx)? / den
        }
        Ast::Neg(a) => -to_expr(a, ctx)?,
        Ast::Pow(a, n) => to_expr(a, ctx)?.pow(*n),
    })
}

fn to_cscalar(ast: &Ast, ctx: Ctx) -> Result<CScalar, ParseError> {
    Ok(match ast {
        Ast::Num(q) => CScalar::from_q(q.clone()),
        Ast::Ident(name, pos) => match (name.as_str(), ctx) {
            ("x", _) => CScalar::x(),
            ("u", _) => CScalar::u(),
            ("i", _) => CScalar::i(),
            ("u'", Ctx::Scalar) => CScalar::up(),
            _ => {
                return Err(semantic(
                    *pos,
                    format!("'{name}' is not legal in {}", ctx.describe()),
                ))
            }
        },
        Ast::Call(name, arg, pos) => {
            let f = Func::from_name(name).ok_or_else(|| {
                semantic(*pos, format!("unknown function '{name}'"))
            })?;
            CScalar::func(f, &to_cscalar(arg, ctx)?)
        }
        Ast::Add(a, b) => to_cscalar(a, ctx)? + to_cscalar(b, ctx)?,
        Ast::Sub(a, b) => to_cscalar(a, ctx)? - to_cscalar(b, ctx)?,
        Ast::Mul(a, b) => to_cscalar(a, ctx)? * to_cscalar(b, ctx)?,
        Ast::Div(a, b, pos) => {
            let den = to_cscalar(b, ctx)?;
            if den.is_const_zero() {
                return Err(semantic(*pos, "division by the zero constant"));
            }
            to_cscalar(a, ctx)? / den
        }
        Ast::Neg(a) => -to_cscalar(a, ctx)?,
        Ast::Pow(a, n) => to_cscalar(a, ctx)?.pow(*n),
    })
}

// ---------------------------------------------------------------------------
// Problem-file driver
// ---------------------------------------------------------------------------

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, i: 0 };
    let mut f1pp: Option<(Expr, Pos)> = None;
    let mut f2pp: Option<(Expr, Pos)> = None;
    let mut scalar: Option<CScalar> = None;
    let mut generators = Vec::new();
    let mut transforms = Vec::new();
    let mut options = Options::default();

    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Eol => {
                p.bump();
                continue;
            }
            Tok::Ident(head) => {
                let pos = p.pos();
                match head.as_str() {
                    "f1''" | "f2''" => {
                        p.bump();
                        p.expect(&Tok::Equals, "'='")?;
                        let rhs = to_expr(&p.expr()?, Ctx::System)?;
                        let slot = if head == "f1''" { &mut f1pp } else { &mut f2pp };
                        if slot.is_some() {
                            return Err(semantic(pos, format!("duplicate equation for {head}")));
                        }
                        *slot = Some((rhs, pos));
                    }
                    "u''" => {
                        p.bump();
                        p.expect(&Tok::Equals, "'='")?;
                        let rhs = to_cscalar(&p.expr()?, Ctx::Scalar)?;
                        if scalar.is_some() {
                            return Err(semantic(pos, "duplicate scalar equation"));
                        }
                        scalar = Some(rhs);
                    }
                    "generator" => {
                        p.bump();
                        let xi = to_expr(&p.expr()?, Ctx::Generator)?;
                        p.expect(&Tok::Semi, "';'")?;
                        let eta1 = to_expr(&p.expr()?, Ctx::Generator)?;
                        p.expect(&Tok::Semi, "';'")?;
                        let eta2 = to_expr(&p.expr()?, Ctx::Generator)?;
                        let vf = VectorField::new(xi, eta1, eta2)
                            .map_err(|e| semantic(pos, e.to_string()))?;
                        generators.push(vf);
                    }
                    "transform" => {
                        p.bump();
                        let chi = to_cscalar(&p.expr()?, Ctx::Transform)?;
                        p.expect(&Tok::Semi, "';'")?;
                        let big_u = to_cscalar(&p.expr()?, Ctx::Transform)?;
                        transforms.push(PointTransform::new(chi, big_u));
                    }
                    "ansatz_degree" | "tol" | "seed" | "format" => {
                        p.bump();
                        p.expect(&Tok::Equals, "'='")?;
                        parse_option(&mut p, &head, &mut options)?;
                    }
                    other => {
                        return Err(syntax(
                            pos,
                            format!("unknown statement '{other}'"),
                            vec![
                                "f1''",
                                "f2''",
                                "u''",
                                "generator",
                                "transform",
                                "ansatz_degree",
                                "tol",
                                "seed",
                                "format",
                            ],
                        ))
                    }
                }
                // Statement must end the line.
                match p.peek() {
                    Tok::Eol => {
                        p.bump();
                    }
                    Tok::Eof => {}
                    _ => {
                        return Err(syntax(
                            p.pos(),
                            format!("found {}", p.peek().describe()),
                            vec!["end of line"],
                        ))
                    }
                }
            }
            other => {
                return Err(syntax(
                    p.pos(),
                    format!("found {}", other.describe()),
                    vec!["statement", "end of line"],
                ))
            }
        }
    }

    let system = match (f1pp, f2pp) {
        (Some((w1, _)), Some((w2, _))) => Some(OdeSystem::new(w1, w2)),
        (None, None) => None,
        (Some((_, pos)), None) => {
            return Err(semantic(pos, "system is missing its f2'' equation"))
        }
        (None, Some((_, pos))) => {
            return Err(semantic(pos, "system is missing its f1'' equation"))
        }
    };
    Ok(ProblemFile {
        system,
        scalar: scalar.map(ComplexOde::new),
        generators,
        transforms,
        options,
    })
}

fn parse_option(p: &mut Parser, key: &str, options: &mut Options) -> Result<(), ParseError> {
    let pos = p.pos();
    match key {
        "format" => match p.bump().0 {
            Tok::Ident(v) if v == "json" || v == "text" => options.format = Some(v),
            other => {
                return Err(syntax(
                    pos,
                    format!("found {}", other.describe()),
                    vec!["json", "text"],
                ))
            }
        },
        _ => {
            let mut sign = Q::one();
            if p.peek() == &Tok::Minus {
                p.bump();
                sign = -sign;
            }
            let Tok::Number(q) = p.peek().clone() else {
                return Err(syntax(
                    pos,
                    format!("found {}", p.peek().describe()),
                    vec!["number"],
                ));
            };
            p.bump();
            let q = q * sign;
            match key {
                "ansatz_degree" => {
                    if !q.is_integer() || q < Q::zero() {
                        return Err(semantic(pos, "ansatz_degree must be a non-negative integer"));
                    }
                    options.ansatz_degree = Some(
                        u32::try_from(q.to_integer())
                            .map_err(|_| semantic(pos, "ansatz_degree out of range"))?,
                    );
                }
                "tol" => {
                    let v = crate::expr::Coeff::to_c64(&q).re;
                    if !(v > 0.0) {
                        return Err(semantic(pos, "tol must be positive"));
                    }
                    options.tol = Some(v);
                }
                "seed" => {
                    if !q.is_integer() || q < Q::zero() {
                        return Err(semantic(pos, "seed must be a non-negative integer"));
                    }
                    options.seed = Some(
                        u64::try_from(q.to_integer())
                            .map_err(|_| semantic(pos, "seed out of range"))?,
                    );
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(())
}

/// Parse a single expression in the system context (x, f1, f2, f1', f2').
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, i: 0 };
    let ast = p.expr()?;
    match p.peek() {
        Tok::Eof | Tok::Eol => {}
        other => {
            return Err(syntax(
                p.pos(),
                format!("found {}", other.describe()),
                vec!["end of input"],
            ))
        }
    }
    to_expr(&ast, Ctx::System)
}

/// Parse a single complex expression in the scalar context (x, u, u', i).
pub fn parse_cscalar(text: &str) -> Result<CScalar, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, i: 0 };
    let ast = p.expr()?;
    match p.peek() {
        Tok::Eof | Tok::Eol => {}
        other => {
            return Err(syntax(
                p.pos(),
                format!("found {}", other.describe()),
                vec!["end of input"],
            ))
        }
    }
    to_cscalar(&ast, Ctx::Scalar)
}

/// Parse exact rational constants like "3", "-1/2", "0.25".
pub fn parse_rational(text: &str) -> Result<Q, String> {
    let toks = Lexer::new(text)
        .tokens()
        .map_err(|e| e.to_string())?;
    let mut p = Parser { toks, i: 0 };
    let ast = p.expr().map_err(|e| e.to_string())?;
    fn eval(a: &Ast) -> Option<Q> {
        match a {
            Ast::Num(q) => Some(q.clone()),
            Ast::Neg(x) => Some(-eval(x)?),
            Ast::Div(a, b, _) => {
                let d = eval(b)?;
                if d.is_zero() {
                    None
                } else {
                    Some(eval(a)? / d)
                }
            }
            Ast::Mul(a, b) => Some(eval(a)? * eval(b)?),
            Ast::Add(a, b) => Some(eval(a)? + eval(b)?),
            Ast::Sub(a, b) => Some(eval(a)? - eval(b)?),
            _ => None,
        }
    }
    eval(&ast).ok_or_else(|| format!("'{text}' is not a rational constant"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexify::check_cr;
    use crate::corpus;
    use crate::expr::ZeroTest;

    fn zt() -> ZeroTest {
        ZeroTest::default()
    }

    #[test]
    fn parses_cubic_const_system() {
        let f =
            parse_problem("f1'' = f1'^3 - 3*f1'*f2'^2\nf2'' = 3*f1'^2*f2' - f2'^3").unwrap();
        let s = f.system.unwrap();
        let want = corpus::cubic_const();
        assert!(s.omega1.normal_eq(&want.omega1, &zt()));
        assert!(s.omega2.normal_eq(&want.omega2, &zt()));
    }

    #[test]
    fn parses_scalar_equation() {
        let f = parse_problem("u'' = x*u*u'^3").unwrap();
        let c = f.scalar.unwrap();
        let want = CScalar::x() * CScalar::u() * CScalar::up().pow(3);
        assert!(c.omega.normal_eq(&want, &zt()));
    }

    #[test]
    fn syntax_error_position() {
        let e = parse_problem("f1'' = +").unwrap_err();
        assert_eq!(e.pos.line, 1);
        assert!(matches!(e.kind, ParseErrorKind::Syntax { .. }));
    }

    #[test]
    fn semantic_errors() {
        // f's in a scalar equation
        let e = parse_problem("u'' = f1*u'").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Semantic));
        // u in a system
        let e = parse_problem("f1'' = u\nf2'' = 0").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Semantic));
        // i outside complex contexts
        let e = parse_problem("f1'' = i\nf2'' = 0").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Semantic));
        // division by the zero constant
        let e = parse_problem("f1'' = 1/0\nf2'' = 0").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Semantic));
        // missing partner equation
        let e = parse_problem("f1'' = 0").unwrap_err();
        assert!(e.message.contains("missing"));
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let e = parse_problem("f1'' = 2x\nf2'' = 0").unwrap_err();
        assert!(e.message.contains("implicit multiplication"), "{e}");
    }

    #[test]
    fn numbers_are_exact() {
        let e = parse_expr("0.5 + 1e-3").unwrap();
        assert!(e.normal_eq(
            &(Expr::ratio(1, 2) + Expr::ratio(1, 1000)),
            &zt()
        ));
        let e = parse_expr("2.5e2").unwrap();
        assert!(e.normal_eq(&Expr::int(250), &zt()));
    }

    #[test]
    fn imaginary_unit_in_scalar_context() {
        let c = parse_cscalar("(1 + i)*u").unwrap();
        let want = (CScalar::int(1) + CScalar::i()) * CScalar::u();
        assert!(c.normal_eq(&want, &zt()));
    }

    #[test]
    fn options_and_declarations() {
        let text = std::fs::read_to_string(corpus_path("emden_full.ode")).unwrap();
        let f = parse_problem(&text).unwrap();
        assert_eq!(f.options.ansatz_degree, Some(3));
        assert_eq!(f.options.seed, Some(0));
        assert_eq!(f.options.format.as_deref(), Some("json"));
        assert!((f.options.tol.unwrap() - 1e-9).abs() < 1e-20);
        assert_eq!(f.generators.len(), 3);
        assert_eq!(f.transforms.len(), 1);
        let t = &f.transforms[0];
        let want = crate::linearize::emden_transform();
        assert!(t.chi.normal_eq(&want.chi, &zt()));
        assert!(t.big_u.normal_eq(&want.big_u, &zt()));
    }

    fn corpus_path(name: &str) -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("corpus")
            .join(name)
    }

    #[test]
    fn corpus_files_parse_and_match_programmatic_forms() {
        let pairs = [
            ("cubic_const.ode", Some(corpus::cubic_const())),
            ("cubic_x.ode", Some(corpus::cubic_x())),
            ("cubic_u.ode", Some(corpus::cubic_u())),
            ("cubic_xu.ode", Some(corpus::cubic_xu())),
            ("cubic_xu2.ode", Some(corpus::cubic_xu2())),
            ("emden.ode", Some(corpus::emden())),
            ("rational_g2.ode", Some(corpus::rational_g2())),
            ("conjugate_fail.ode", None),
            ("scalar_xu2.ode", None),
        ];
        for (name, want) in pairs {
            let text = std::fs::read_to_string(corpus_path(name)).unwrap();
            let f = parse_problem(&text)
                .unwrap_or_else(|e| panic!("corpus file {name} fails to parse: {e}"));
            if let Some(want) = want {
                let s = f.system.expect(name);
                assert!(s.omega1.normal_eq(&want.omega1, &zt()), "{name} omega1");
                assert!(s.omega2.normal_eq(&want.omega2, &zt()), "{name} omega2");
            }
        }
    }

    #[test]
    fn conjugate_corpus_fails_cr() {
        let text = std::fs::read_to_string(corpus_path("conjugate_fail.ode")).unwrap();
        let f = parse_problem(&text).unwrap();
        assert!(!check_cr(&f.system.unwrap(), &zt()).passed());
    }

    #[test]
    fn print_parse_round_trip_random() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 200 {
            let e = random_expr(&mut rng, 0);
            // Skip expressions whose denominators vanish identically.
            let Ok(nf) = e.normal_form() else { continue };
            let printed = e.to_string();
            let parsed = parse_expr(&printed)
                .unwrap_or_else(|err| panic!("reparse failed for '{printed}': {err}"));
            assert!(
                parsed.normal_eq(&nf, &zt()),
                "round trip mismatch for '{printed}'"
            );
            checked += 1;
        }
    }

    fn random_expr(rng: &mut rand_chacha::ChaCha8Rng, depth: u32) -> Expr {
        use crate::expr::Var;
        use rand::Rng;
        let leaf = depth > 3 || rng.gen_bool(0.35);
        if leaf {
            return match rng.gen_range(0..7) {
                0 => Expr::x(),
                1 => Expr::f1(),
                2 => Expr::f2(),
                3 => Expr::f1p(),
                4 => Expr::f2p(),
                5 => Expr::ratio(rng.gen_range(-9i64..10), rng.gen_range(1i64..8)),
                _ => Expr::var(Var::F1),
            };
        }
        let a = random_expr(rng, depth + 1);
        let b = random_expr(rng, depth + 1);
        match rng.gen_range(0..8) {
            0 => a + b,
            1 => a - b,
            2 => a * b,
            3 => {
                if b.is_const_zero() {
                    a
                } else {
                    a / b
                }
            }
            4 => -a,
            5 => a.pow(rng.gen_range(-2i32..4)),
            6 => match rng.gen_range(0..6) {
                0 => a.sin(),
                1 => a.cos(),
                2 => a.exp(),
                3 => a.log(),
                4 => a.sqrt(),
                _ => a.arctan(),
            },
            _ => a + b,
        }
    }
}
