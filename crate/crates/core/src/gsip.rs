//! Generalized semi-infinite programs and their subproblems.
//!
//! A [`GsipProblem`] reads
//!
//! ```text
//! minimize f(x) over x in X
//! subject to g(x, y) >= 0 for every y in Y with h_j(x, y) <= 0 for all j
//! ```
//!
//! Writing `hbar = max_j h_j`, its closed relaxation asks
//! `max(g(x, y), hbar(x, y)) >= 0` for every `y` in `Y`. Everything in this
//! crate targets that relaxation and its optimal value `f_L`.
//!
//! Subproblems are returned as [`Instance`]s with the fixed variables folded
//! into constants, so the optimizer only sees the free block.

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::format::{self, ProblemDocument, VarDecl};
use crate::opt::{ConstraintSpec, Instance, MinimizeOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct GsipProblem {
    pub name: String,
    /// Host set of the decision variables.
    pub x: BoxDomain,
    /// Host set of the lower-level variables.
    pub y: BoxDomain,
    pub f: Expr,
    pub g: Expr,
    pub h: Vec<Expr>,
    pub f_star: Option<f64>,
    pub f_l: Option<f64>,
}

impl GsipProblem {
    /// Validates variable scopes: `f` over `X` only, `g` and every `h_j` over
    /// `X` and `Y`, and `X`, `Y` name-disjoint.
    pub fn new(
        name: impl Into<String>,
        x: BoxDomain,
        y: BoxDomain,
        f: Expr,
        g: Expr,
        h: Vec<Expr>,
    ) -> Result<Self> {
        if x.dim() == 0 || y.dim() == 0 {
            return Err(Error::Structure("X and Y need at least one coordinate".into()));
        }
        if let Some(dup) = x.names().iter().find(|n| y.index_of(n).is_some()) {
            return Err(Error::Structure(format!("`{dup}` is declared in both X and Y")));
        }
        if let Some(v) = f.variables().into_iter().find(|v| x.index_of(v).is_none()) {
            return Err(Error::Structure(format!("objective references `{v}`, not an X variable")));
        }
        for e in std::iter::once(&g).chain(&h) {
            if let Some(v) = e
                .variables()
                .into_iter()
                .find(|v| x.index_of(v).is_none() && y.index_of(v).is_none())
            {
                return Err(Error::UnknownVariable(v));
            }
        }
        Ok(Self {
            name: name.into(),
            x,
            y,
            f,
            g,
            h,
            f_star: None,
            f_l: None,
        })
    }

    pub fn with_reference(mut self, f_star: f64, f_l: f64) -> Self {
        self.f_star = Some(f_star);
        self.f_l = Some(f_l);
        self
    }

    pub fn from_document(doc: ProblemDocument) -> Result<Self> {
        let boxed = |decls: &[VarDecl]| {
            BoxDomain::new(decls.iter().map(|d| (d.name.clone(), d.lo, d.hi)))
        };
        let mut p = Self::new(
            doc.name,
            boxed(&doc.outer)?,
            boxed(&doc.inner)?,
            doc.objective,
            doc.g,
            doc.h,
        )?;
        p.f_star = doc.f_star;
        p.f_l = doc.f_l;
        Ok(p)
    }

    pub fn to_document(&self) -> ProblemDocument {
        let decls = |b: &BoxDomain| {
            b.names()
                .iter()
                .zip(b.bounds())
                .map(|(n, iv)| VarDecl::new(n.clone(), iv.lo, iv.hi))
                .collect()
        };
        ProblemDocument {
            name: self.name.clone(),
            outer: decls(&self.x),
            inner: decls(&self.y),
            objective: self.f.clone(),
            g: self.g.clone(),
            h: self.h.clone(),
            f_star: self.f_star,
            f_l: self.f_l,
        }
    }

    /// Parses `.gsip` text.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_document(format::parse_problem(text)?)
    }

    /// Canonical `.gsip` text.
    pub fn to_text(&self) -> String {
        format::serialize_problem(&self.to_document())
    }

    /// The constraint aggregate `max_j h_j`, folded to the right in declared
    /// order. A single constraint is returned unchanged.
    pub fn hbar(&self) -> Result<Expr> {
        let mut rev = self.h.iter().rev();
        let last = rev
            .next()
            .ok_or_else(|| Error::Structure("no lower-level constraints".into()))?
            .clone();
        Ok(rev.fold(last, |acc, h| h.clone().max(acc)))
    }

    /// The discretized lower-bounding problem: minimize `f` over `X` with one
    /// constraint `max(g(., y), hbar(., y)) >= 0` per `y` in `yset`.
    pub fn build_lower_bounding(&self, yset: &[Vec<f64>]) -> Result<Instance> {
        let hbar = self.hbar()?;
        let constraints = yset
            .iter()
            .map(|yp| {
                self.y.check_contains(yp, "discretization point")?;
                let env = self.y.assign(yp);
                Ok(ConstraintSpec::ge(
                    self.g.substitute(&env).max(hbar.substitute(&env)),
                ))
            })
            .collect::<Result<_>>()?;
        Ok(Instance::new(self.f.clone(), constraints, self.x.clone()))
    }

    /// The lower-level program at `x`: minimize `g(x, .)` over `Y` subject to
    /// `hbar(x, .) <= 0`.
    pub fn build_llp(&self, x: &[f64]) -> Result<Instance> {
        self.x.check_contains(x, "x")?;
        let env = self.x.assign(x);
        Ok(Instance::new(
            self.g.substitute(&env),
            vec![ConstraintSpec::le(self.hbar()?.substitute(&env))],
            self.y.clone(),
        ))
    }

    /// The auxiliary lower-level program at `x`: minimize `hbar(x, .)` over
    /// `Y` subject to `g(x, .) <= alpha * llp_value`.
    pub fn build_aux_llp(&self, x: &[f64], llp_value: f64, alpha: f64) -> Result<Instance> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !llp_value.is_finite() {
            return Err(Error::Parameter("llp_value must be finite".into()));
        }
        self.x.check_contains(x, "x")?;
        let env = self.x.assign(x);
        let level = self.g.substitute(&env) - Expr::Const(alpha * llp_value);
        Ok(Instance::new(
            self.hbar()?.substitute(&env),
            vec![ConstraintSpec::le(level)],
            self.y.clone(),
        ))
    }

    /// The lower-level program of the relaxation at `x`: minimize
    /// `max(g(x, .), hbar(x, .))` over `Y`.
    pub fn build_sip_llp(&self, x: &[f64]) -> Result<Instance> {
        self.x.check_contains(x, "x")?;
        let env = self.x.assign(x);
        Ok(Instance::new(
            self.g.substitute(&env).max(self.hbar()?.substitute(&env)),
            vec![],
            self.y.clone(),
        ))
    }

    /// Membership of `x` in the feasible set of the relaxation: the optimal
    /// value of the relaxation's lower-level program is `>= -tol_feas`.
    pub fn check_relaxation_feasible(&self, x: &[f64], opts: &MinimizeOptions) -> Result<bool> {
        let out = self.build_sip_llp(x)?.minimize(opts)?;
        // an unconstrained problem over a nonempty box always has a minimizer
        let value = out.value().expect("box-only minimization is feasible");
        Ok(value >= -opts.tol_feas)
    }

    /// Checks an epsilon-optimal Slater point: `f(x_s) <= f_star + epsilon`
    /// and, for every `y` in `Y`, `g(x_s, y) >= delta` or
    /// `hbar(x_s, y) >= delta`. The second part is certified with the
    /// branch-and-bound lower bound.
    pub fn verify_slater(
        &self,
        cert: &SlaterCertificate,
        f_star: f64,
        opts: &MinimizeOptions,
    ) -> Result<bool> {
        cert.validate()?;
        self.x.check_contains(&cert.x_s, "Slater point")?;
        let fx = self.f.eval(&self.x.assign(&cert.x_s))?;
        if fx > f_star + cert.epsilon {
            return Ok(false);
        }
        let out = self.build_sip_llp(&cert.x_s)?.minimize(opts)?;
        let lower = out.lower_bound().expect("box-only minimization is feasible");
        Ok(lower >= cert.delta - opts.tol_feas)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlaterCertificate {
    pub x_s: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
}

impl SlaterCertificate {
    pub fn new(x_s: Vec<f64>, epsilon: f64, delta: f64) -> Result<Self> {
        let cert = Self { x_s, epsilon, delta };
        cert.validate()?;
        Ok(cert)
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Parameter(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::Parameter(format!("delta must be > 0, got {}", self.delta)));
        }
        Ok(())
    }
}

fn unit_box(name: &str) -> BoxDomain {
    BoxDomain::new([(name, -1.0, 1.0)]).expect("static box")
}

/// `min -x` over `x in [-1, 1]` s.t. `(x - y)^2 - 10 >= 0` for all
/// `y in [-1, 1]` with `-2x + y <= 0`. The relaxation's feasible set is
/// `[-1, -1/2]`, so `f_L = 1/2`.
pub fn cex1() -> GsipProblem {
    let (x, y) = (Expr::var("x"), Expr::var("y"));
    GsipProblem::new(
        "cex1",
        unit_box("x"),
        unit_box("y"),
        -x.clone(),
        (x.clone() - y.clone()).powi(2) - 10.0,
        vec![-2.0 * x + y],
    )
    .expect("static problem")
    .with_reference(0.5, 0.5)
}

/// `min -x` over `x in [-1, 1]` s.t. `-y - 10 >= 0` for all `y in [-1, 1]`
/// with `min(-2x + y, -x) <= 0`. Again `f_L = 1/2`.
pub fn cex2() -> GsipProblem {
    let (x, y) = (Expr::var("x"), Expr::var("y"));
    GsipProblem::new(
        "cex2",
        unit_box("x"),
        unit_box("y"),
        -x.clone(),
        -y.clone() - 10.0,
        vec![(-2.0 * x.clone() + y).min(-x)],
    )
    .expect("static problem")
    .with_reference(0.5, 0.5)
}

pub fn builtin_problems() -> Vec<GsipProblem> {
    vec![cex1(), cex2()]
}

/// Looks up a built-in problem by name (`"cex1"`, `"cex2"`).
pub fn builtin(name: &str) -> Option<GsipProblem> {
    builtin_problems().into_iter().find(|p| p.name == name)
}
