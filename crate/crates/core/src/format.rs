//! The `.gsip` problem format.
//!
//! A line-oriented text format. `#` starts a comment; blank lines are
//! ignored; whitespace inside a line is insignificant.
//!
//! ```text
//! problem "cex1"
//! outer x in [-1.0, 1.0]
//! inner y in [-1.0, 1.0]
//! objective: -x
//! g: (x - y)^2 - 10.0
//! h: -2.0 * x + y
//! f_star: 0.5
//! f_L: 0.5
//! ```
//!
//! `outer` and `inner` lines repeat, one per variable. `h` repeats, one per
//! lower-level constraint, in order. `f_star` and `f_L` are optional.
//! Expressions use `+ - * / ^`, unary minus, parentheses, `min(a, b)` and
//! `max(a, b)`; the exponent of `^` must be a nonnegative integer literal.
//!
//! [`serialize_problem`] emits canonical text that [`parse_problem`] reads back
//! to an equal [`ProblemDocument`].

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::expr::Expr;

/// A variable declaration: name and closed bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            lo,
            hi,
        }
    }
}

/// The parsed content of a `.gsip` file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDocument {
    pub name: String,
    pub outer: Vec<VarDecl>,
    pub inner: Vec<VarDecl>,
    pub objective: Expr,
    pub g: Expr,
    pub h: Vec<Expr>,
    pub f_star: Option<f64>,
    pub f_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredVariable(String),
    DuplicateDeclaration(String),
    UnboundedVariable(String),
    InvalidBounds(String),
    /// The objective references an inner variable.
    OuterScope(String),
    Missing(&'static str),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UndeclaredVariable(v) => write!(f, "undeclared variable `{v}`"),
            ParseErrorKind::DuplicateDeclaration(v) => write!(f, "duplicate declaration of `{v}`"),
            ParseErrorKind::UnboundedVariable(v) => {
                write!(f, "variable `{v}` needs finite bounds")
            }
            ParseErrorKind::InvalidBounds(v) => write!(f, "variable `{v}` has lo > hi"),
            ParseErrorKind::OuterScope(v) => {
                write!(f, "objective may only use outer variables, found `{v}`")
            }
            ParseErrorKind::Missing(what) => write!(f, "missing `{what}` line"),
        }
    }
}

/// A diagnostic with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        Self { line, column, kind }
    }

    fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Self::new(line, column, ParseErrorKind::Syntax(msg.into()))
    }
}

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex_line(line_no: usize, text: &str) -> PResult<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, col });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let value: f64 = lit
                .parse()
                .map_err(|_| ParseError::syntax(line_no, col, format!("bad number `{lit}`")))?;
            out.push(Spanned {
                tok: Tok::Num(value, lit),
                col,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(ParseError::syntax(line_no, col, "unterminated string")),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let esc = match chars.get(i + 1) {
                            Some('n') => '\n',
                            Some('r') => '\r',
                            Some('t') => '\t',
                            Some('\\') => '\\',
                            Some('"') => '"',
                            _ => {
                                return Err(ParseError::syntax(
                                    line_no,
                                    i + 1,
                                    "unknown escape in string",
                                ))
                            }
                        };
                        s.push(esc);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(Spanned {
                tok: Tok::Str(s),
                col,
            });
        } else {
            return Err(ParseError::syntax(
                line_no,
                col,
                format!("unexpected character `{c}`"),
            ));
        }
    }
    Ok(out)
}

/// Variable reference with its source position, checked after all
/// declarations are known.
#[derive(Debug, Clone)]
struct VarRef {
    name: String,
    line: usize,
    col: usize,
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
    refs: Vec<VarRef>,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Spanned], pos: usize, line: usize, end_col: usize) -> Self {
        Self {
            toks,
            pos,
            line,
            end_col,
            refs: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |s| s.col)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line, self.col(), msg)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {}", t.describe())),
            None => self.err(format!("expected {wanted}, found end of line")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_end(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of line")),
        }
    }

    fn signed_number(&mut self) -> PResult<f64> {
        let sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -1.0
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                1.0
            }
            _ => 1.0,
        };
        match self.peek() {
            Some(Tok::Num(v, _)) => {
                let v = *v;
                self.pos += 1;
                Ok(sign * v)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = lhs + self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = lhs * self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.peek() != Some(&Tok::Minus) {
            return self.power();
        }
        self.pos += 1;
        // `-` directly before a bare literal is a negative literal
        if let Some(Tok::Num(v, _)) = self.peek() {
            if self.peek_at(1) != Some(&Tok::Caret) {
                let v = *v;
                self.pos += 1;
                return Ok(Expr::Const(-v));
            }
        }
        Ok(-self.unary()?)
    }

    fn power(&mut self) -> PResult<Expr> {
        let mut base = self.primary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let col = self.col();
            match self.next() {
                Some(Tok::Num(_, lit)) if lit.bytes().all(|b| b.is_ascii_digit()) => {
                    let e: u32 = lit.parse().map_err(|_| {
                        ParseError::syntax(self.line, col, format!("exponent `{lit}` too large"))
                    })?;
                    base = base.powi(e);
                }
                _ => {
                    return Err(ParseError::syntax(
                        self.line,
                        col,
                        "exponent must be a nonnegative integer literal",
                    ))
                }
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(v, _)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) if name == "min" || name == "max" => {
                self.pos += 1;
                self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if name == "min" { a.min(b) } else { a.max(b) })
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.refs.push(VarRef {
                    name: name.clone(),
                    line: self.line,
                    col,
                });
                Ok(Expr::Var(name))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// Parses and validates a `.gsip` document.
pub fn parse_problem(text: &str) -> Result<ProblemDocument, ParseError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut name: Option<String> = None;
    let mut outer: Vec<VarDecl> = Vec::new();
    let mut inner: Vec<VarDecl> = Vec::new();
    let mut objective: Option<(Expr, Vec<VarRef>)> = None;
    let mut g: Option<(Expr, Vec<VarRef>)> = None;
    let mut h: Vec<(Expr, Vec<VarRef>)> = Vec::new();
    let mut f_star: Option<f64> = None;
    let mut f_l: Option<f64> = None;
    let mut last_line = 0;

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let toks = lex_line(line_no, raw)?;
        if toks.is_empty() {
            continue;
        }
        let end_col = raw.chars().count() + 1;
        let head_col = toks[0].col;
        let keyword = match &toks[0].tok {
            Tok::Ident(k) => k.clone(),
            t => {
                return Err(ParseError::syntax(
                    line_no,
                    head_col,
                    format!("expected a keyword, found {}", t.describe()),
                ))
            }
        };
        let mut cur = Cursor::new(&toks, 1, line_no, end_col);
        let duplicate =
            |what: &str| ParseError::new(line_no, head_col, ParseErrorKind::DuplicateDeclaration(what.into()));
        match keyword.as_str() {
            "problem" => {
                let s = match cur.next() {
                    Some(Tok::Str(s)) => s,
                    _ => return Err(ParseError::syntax(line_no, cur.col(), "expected quoted problem name")),
                };
                cur.expect_end()?;
                if name.is_some() {
                    return Err(duplicate("problem"));
                }
                name = Some(s);
            }
            "outer" | "inner" => {
                let var_col = cur.col();
                let var = match cur.next() {
                    Some(Tok::Ident(v)) => v,
                    _ => return Err(ParseError::syntax(line_no, var_col, "expected a variable name")),
                };
                if var == "min" || var == "max" {
                    return Err(ParseError::syntax(
                        line_no,
                        var_col,
                        format!("`{var}` is reserved"),
                    ));
                }
                if cur.peek().is_none() {
                    return Err(ParseError::new(
                        line_no,
                        var_col,
                        ParseErrorKind::UnboundedVariable(var),
                    ));
                }
                match cur.next() {
                    Some(Tok::Ident(kw)) if kw == "in" => {}
                    _ => return Err(ParseError::syntax(line_no, cur.col(), "expected `in`")),
                }
                cur.expect(Tok::LBracket, "`[`")?;
                let lo = cur.signed_number()?;
                cur.expect(Tok::Comma, "`,`")?;
                let hi = cur.signed_number()?;
                cur.expect(Tok::RBracket, "`]`")?;
                cur.expect_end()?;
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(ParseError::new(
                        line_no,
                        var_col,
                        ParseErrorKind::UnboundedVariable(var),
                    ));
                }
                if lo > hi {
                    return Err(ParseError::new(line_no, var_col, ParseErrorKind::InvalidBounds(var)));
                }
                if outer.iter().chain(&inner).any(|d| d.name == var) {
                    return Err(ParseError::new(
                        line_no,
                        var_col,
                        ParseErrorKind::DuplicateDeclaration(var),
                    ));
                }
                let decl = VarDecl::new(var, lo, hi);
                if keyword == "outer" {
                    outer.push(decl);
                } else {
                    inner.push(decl);
                }
            }
            "objective" | "g" | "h" => {
                cur.expect(Tok::Colon, "`:`")?;
                let e = cur.expr()?;
                cur.expect_end()?;
                let refs = std::mem::take(&mut cur.refs);
                match keyword.as_str() {
                    "objective" if objective.is_some() => return Err(duplicate("objective")),
                    "objective" => objective = Some((e, refs)),
                    "g" if g.is_some() => return Err(duplicate("g")),
                    "g" => g = Some((e, refs)),
                    _ => h.push((e, refs)),
                }
            }
            "f_star" | "f_L" => {
                cur.expect(Tok::Colon, "`:`")?;
                let v = cur.signed_number()?;
                cur.expect_end()?;
                let slot = if keyword == "f_star" { &mut f_star } else { &mut f_l };
                if slot.is_some() {
                    return Err(duplicate(&keyword));
                }
                *slot = Some(v);
            }
            other => {
                return Err(ParseError::syntax(
                    line_no,
                    head_col,
                    format!("unknown keyword `{other}`"),
                ))
            }
        }
    }

    let eof = |what| ParseError::new(last_line + 1, 1, ParseErrorKind::Missing(what));
    let name = name.ok_or_else(|| eof("problem"))?;
    if outer.is_empty() {
        return Err(eof("outer"));
    }
    if inner.is_empty() {
        return Err(eof("inner"));
    }
    let (objective, objective_refs) = objective.ok_or_else(|| eof("objective"))?;
    let (g, g_refs) = g.ok_or_else(|| eof("g"))?;

    let is_outer = |n: &str| outer.iter().any(|d| d.name == n);
    let is_inner = |n: &str| inner.iter().any(|d| d.name == n);
    for r in &objective_refs {
        if is_inner(&r.name) {
            return Err(ParseError::new(r.line, r.col, ParseErrorKind::OuterScope(r.name.clone())));
        }
        if !is_outer(&r.name) {
            return Err(ParseError::new(
                r.line,
                r.col,
                ParseErrorKind::UndeclaredVariable(r.name.clone()),
            ));
        }
    }
    for r in g_refs.iter().chain(h.iter().flat_map(|(_, refs)| refs)) {
        if !is_outer(&r.name) && !is_inner(&r.name) {
            return Err(ParseError::new(
                r.line,
                r.col,
                ParseErrorKind::UndeclaredVariable(r.name.clone()),
            ));
        }
    }
    Ok(ProblemDocument {
        name,
        outer,
        inner,
        objective,
        g,
        h: h.into_iter().map(|(e, _)| e).collect(),
        f_star,
        f_l,
    })
}

fn quote(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text for a document. Reals use the shortest representation that
/// reads back to the same `f64`.
pub fn serialize_problem(doc: &ProblemDocument) -> String {
    let mut out = String::new();
    // writing into a String cannot fail
    let _ = writeln!(out, "problem {}", quote(&doc.name));
    for d in &doc.outer {
        let _ = writeln!(out, "outer {} in [{:?}, {:?}]", d.name, d.lo, d.hi);
    }
    for d in &doc.inner {
        let _ = writeln!(out, "inner {} in [{:?}, {:?}]", d.name, d.lo, d.hi);
    }
    let _ = writeln!(out, "objective: {}", doc.objective);
    let _ = writeln!(out, "g: {}", doc.g);
    for h in &doc.h {
        let _ = writeln!(out, "h: {h}");
    }
    if let Some(v) = doc.f_star {
        let _ = writeln!(out, "f_star: {v:?}");
    }
    if let Some(v) = doc.f_l {
        let _ = writeln!(out, "f_L: {v:?}");
    }
    out
}
