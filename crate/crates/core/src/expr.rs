//! Arithmetic expression trees over named variables.
//!
//! An [`Expr`] supports exact point evaluation ([`Expr::eval`]) and the
//! natural interval extension ([`Expr::interval_eval`]). The solver works on
//! [`CompiledExpr`], the same tree with variable names resolved to slot
//! indices.
//!
//! `Display` prints the expression in the `.gsip` expression syntax; parsing
//! that text back yields a structurally equal tree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::interval::{int_pow, Interval};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

/// Source of variable values for point evaluation.
pub trait Env {
    fn lookup(&self, name: &str) -> Option<f64>;
}

impl Env for [(&str, f64)] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

impl<const N: usize> Env for [(&str, f64); N] {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.as_slice().lookup(name)
    }
}

impl Env for Vec<(&str, f64)> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.as_slice().lookup(name)
    }
}

impl Env for HashMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Env for BTreeMap<String, f64> {
    fn lookup(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn powi(self, exponent: u32) -> Self {
        Expr::Pow(Box::new(self), exponent)
    }

    pub fn min(self, other: Expr) -> Self {
        Expr::Min(Box::new(self), Box::new(other))
    }

    pub fn max(self, other: Expr) -> Self {
        Expr::Max(Box::new(self), Box::new(other))
    }

    /// Names of all variables referenced, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) => {
                out.insert(n.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_variables(out),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Min(a, b)
            | Expr::Max(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) => 1 + a.size(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Min(a, b)
            | Expr::Max(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Exact recursive evaluation at a point.
    pub fn eval<E: Env + ?Sized>(&self, env: &E) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(n) => env
                .lookup(n)
                .ok_or_else(|| Error::UnknownVariable(n.clone()))?,
            Expr::Neg(a) => -a.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Div(a, b) => checked_div(a.eval(env)?, b.eval(env)?)?,
            Expr::Pow(a, e) => int_pow(a.eval(env)?, *e),
            Expr::Min(a, b) => a.eval(env)?.min(b.eval(env)?),
            Expr::Max(a, b) => a.eval(env)?.max(b.eval(env)?),
        })
    }

    /// Natural interval extension over `domain`.
    pub fn interval_eval(&self, domain: &BoxDomain) -> Result<Interval> {
        let names: Vec<&str> = domain.names().iter().map(String::as_str).collect();
        self.compile(&names)?.eval_interval(domain.bounds())
    }

    /// Replaces every variable bound in `env` by its value and folds constant
    /// subtrees. Folding performs the same floating-point operations
    /// evaluation would, so values are unchanged. A constant division by zero
    /// is left unfolded so the error surfaces at evaluation time.
    pub fn substitute<E: Env + ?Sized>(&self, env: &E) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(n) => match env.lookup(n) {
                Some(v) => Expr::Const(v),
                None => Expr::Var(n.clone()),
            },
            Expr::Neg(a) => match a.substitute(env) {
                Expr::Const(c) => Expr::Const(-c),
                a => Expr::Neg(Box::new(a)),
            },
            Expr::Pow(a, e) => match a.substitute(env) {
                Expr::Const(c) => Expr::Const(int_pow(c, *e)),
                a => Expr::Pow(Box::new(a), *e),
            },
            Expr::Add(a, b) => fold2(a, b, env, Expr::Add, |x, y| Some(x + y)),
            Expr::Sub(a, b) => fold2(a, b, env, Expr::Sub, |x, y| Some(x - y)),
            Expr::Mul(a, b) => fold2(a, b, env, Expr::Mul, |x, y| Some(x * y)),
            Expr::Div(a, b) => fold2(a, b, env, Expr::Div, |x, y| checked_div(x, y).ok()),
            Expr::Min(a, b) => fold2(a, b, env, Expr::Min, |x, y| Some(x.min(y))),
            Expr::Max(a, b) => fold2(a, b, env, Expr::Max, |x, y| Some(x.max(y))),
        }
    }

    /// Resolves variable names to positions in `slots`.
    pub fn compile(&self, slots: &[&str]) -> Result<CompiledExpr> {
        let root = compile_node(self, slots)?;
        Ok(CompiledExpr {
            root,
            arity: slots.len(),
        })
    }
}

fn checked_div(a: f64, b: f64) -> Result<f64> {
    if b == 0.0 {
        Err(Error::DivisionByZero)
    } else {
        Ok(a / b)
    }
}

fn fold2<E: Env + ?Sized>(
    a: &Expr,
    b: &Expr,
    env: &E,
    build: fn(Box<Expr>, Box<Expr>) -> Expr,
    apply: fn(f64, f64) -> Option<f64>,
) -> Expr {
    let a = a.substitute(env);
    let b = b.substitute(env);
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        if let Some(v) = apply(*x, *y) {
            return Expr::Const(v);
        }
    }
    build(Box::new(a), Box::new(b))
}

/// An [`Expr`] whose variables are resolved to slot indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExpr {
    root: Node,
    arity: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Slot(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Min(Box<Node>, Box<Node>),
    Max(Box<Node>, Box<Node>),
}

fn compile_node(e: &Expr, slots: &[&str]) -> Result<Node> {
    let pair = |a: &Expr, b: &Expr| -> Result<(Box<Node>, Box<Node>)> {
        Ok((
            Box::new(compile_node(a, slots)?),
            Box::new(compile_node(b, slots)?),
        ))
    };
    Ok(match e {
        Expr::Const(c) => Node::Const(*c),
        Expr::Var(n) => Node::Slot(
            slots
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| Error::UnknownVariable(n.clone()))?,
        ),
        Expr::Neg(a) => Node::Neg(Box::new(compile_node(a, slots)?)),
        Expr::Pow(a, k) => Node::Pow(Box::new(compile_node(a, slots)?), *k),
        Expr::Add(a, b) => {
            let (a, b) = pair(a, b)?;
            Node::Add(a, b)
        }
        Expr::Sub(a, b) => {
            let (a, b) = pair(a, b)?;
            Node::Sub(a, b)
        }
        Expr::Mul(a, b) => {
            let (a, b) = pair(a, b)?;
            Node::Mul(a, b)
        }
        Expr::Div(a, b) => {
            let (a, b) = pair(a, b)?;
            Node::Div(a, b)
        }
        Expr::Min(a, b) => {
            let (a, b) = pair(a, b)?;
            Node::Min(a, b)
        }
        Expr::Max(a, b) => {
            let (a, b) = pair(a, b)?;
            Node::Max(a, b)
        }
    })
}

impl CompiledExpr {
    /// Number of slots the expression was compiled against.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        debug_assert_eq!(point.len(), self.arity);
        eval_node(&self.root, point)
    }

    pub fn eval_interval(&self, bounds: &[Interval]) -> Result<Interval> {
        debug_assert_eq!(bounds.len(), self.arity);
        interval_node(&self.root, bounds)
    }
}

fn eval_node(n: &Node, p: &[f64]) -> Result<f64> {
    Ok(match n {
        Node::Const(c) => *c,
        Node::Slot(i) => p[*i],
        Node::Neg(a) => -eval_node(a, p)?,
        Node::Add(a, b) => eval_node(a, p)? + eval_node(b, p)?,
        Node::Sub(a, b) => eval_node(a, p)? - eval_node(b, p)?,
        Node::Mul(a, b) => eval_node(a, p)? * eval_node(b, p)?,
        Node::Div(a, b) => checked_div(eval_node(a, p)?, eval_node(b, p)?)?,
        Node::Pow(a, e) => int_pow(eval_node(a, p)?, *e),
        Node::Min(a, b) => eval_node(a, p)?.min(eval_node(b, p)?),
        Node::Max(a, b) => eval_node(a, p)?.max(eval_node(b, p)?),
    })
}

fn interval_node(n: &Node, b: &[Interval]) -> Result<Interval> {
    Ok(match n {
        Node::Const(c) => Interval::point(*c),
        Node::Slot(i) => b[*i],
        Node::Neg(a) => interval_node(a, b)?.neg(),
        Node::Add(l, r) => interval_node(l, b)?.add(interval_node(r, b)?),
        Node::Sub(l, r) => interval_node(l, b)?.sub(interval_node(r, b)?),
        Node::Mul(l, r) => interval_node(l, b)?.mul(interval_node(r, b)?),
        Node::Div(l, r) => interval_node(l, b)?
            .div(interval_node(r, b)?)
            .ok_or(Error::DivisionByZero)?,
        Node::Pow(a, e) => interval_node(a, b)?.powi(*e),
        Node::Min(l, r) => interval_node(l, b)?.min(interval_node(r, b)?),
        Node::Max(l, r) => interval_node(l, b)?.max(interval_node(r, b)?),
    })
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::Const(v)
    }
}

impl From<&str> for Expr {
    fn from(name: &str) -> Self {
        Expr::Var(name.to_owned())
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl<T: Into<Expr>> ops::$trait<T> for Expr {
            type Output = Expr;
            fn $method(self, rhs: T) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs.into()))
            }
        }

        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(Expr::Const(self)), Box::new(rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

// Printing precedence: sums 1, products 2, unary minus (and negative
// literals) 3, powers 4, atoms 5.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Const(c) if c.is_sign_negative() => 3,
        Expr::Pow(..) => 4,
        Expr::Const(_) | Expr::Var(_) | Expr::Min(..) | Expr::Max(..) => 5,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_level: u8) -> fmt::Result {
    if level(e) < min_level {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    let infix = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, l: u8| {
        write_at(f, a, l)?;
        write!(f, " {op} ")?;
        write_at(f, b, l + 1)
    };
    match e {
        Expr::Const(c) => write!(f, "{c:?}"),
        Expr::Var(n) => write!(f, "{n}"),
        // `-2.0` would read back as a negative literal, not a negation
        Expr::Neg(a) if matches!(**a, Expr::Const(c) if !c.is_sign_negative()) => {
            write!(f, "-(")?;
            write_expr(f, a)?;
            write!(f, ")")
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, 3)
        }
        Expr::Add(a, b) => infix(f, a, "+", b, 1),
        Expr::Sub(a, b) => infix(f, a, "-", b, 1),
        Expr::Mul(a, b) => infix(f, a, "*", b, 2),
        Expr::Div(a, b) => infix(f, a, "/", b, 2),
        Expr::Pow(a, k) => {
            write_at(f, a, 5)?;
            write!(f, "^{k}")
        }
        Expr::Min(a, b) | Expr::Max(a, b) => {
            let name = if matches!(e, Expr::Min(..)) { "min" } else { "max" };
            write!(f, "{name}(")?;
            write_expr(f, a)?;
            write!(f, ", ")?;
            write_expr(f, b)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
