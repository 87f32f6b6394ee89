//! Discretization-based lower bounding for the relaxation of a GSIP.
//!
//! Each iteration solves the lower-bounding problem over the current finite
//! set `Y^k` for `x^k` and `f^{L,k}`, then grows `Y^k` with one point whose
//! choice depends on the [`Variant`]:
//!
//! * [`Variant::LlpOnly`] adds a minimizer of the GSIP lower-level program.
//! * [`Variant::AuxLlp`] adds a minimizer of the auxiliary lower-level
//!   program (minimize `hbar` among `alpha`-near-optimal points of the LLP).
//! * [`Variant::SipLlp`] adds a minimizer of `max(g, hbar)`, the lower-level
//!   program of the relaxation itself.
//!
//! The first two can stall strictly below `f_L`; [`diagnose_trace`] exposes
//! the mechanism for `LlpOnly` runs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::gsip::GsipProblem;
use crate::opt::{ConstraintSpec, Instance, MinimizeOptions, DEFAULT_NODE_BUDGET, DEFAULT_TOL_OPT};

/// Two points closer than this in every coordinate are the same point.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// Default optimality tolerance of the lower-level solves (LLP, auxiliary
/// LLP, SIP LLP) in [`run`].
///
/// A value tolerance `t` only pins a quadratic lower-level minimizer to
/// within `sqrt(t)`, and the cuts inherit that error. `1e-12` keeps the
/// minimizers accurate to about `1e-6`.
pub const DEFAULT_LOWER_LEVEL_TOL_OPT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "llp-only")]
    LlpOnly,
    #[serde(rename = "aux")]
    AuxLlp,
    #[serde(rename = "sip-llp")]
    SipLlp,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::LlpOnly => "llp-only",
            Variant::AuxLlp => "aux",
            Variant::SipLlp => "sip-llp",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "llp-only" => Ok(Variant::LlpOnly),
            "aux" | "aux-llp" => Ok(Variant::AuxLlp),
            "sip-llp" => Ok(Variant::SipLlp),
            _ => Err(Error::Usage(format!("unknown variant `{s}`"))),
        }
    }
}

/// Which auxiliary minimizer to keep when several are optimal. The rules
/// other than `SolverDefault` order candidates by the first `Y` coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Whatever the branch-and-bound returns first.
    #[default]
    SolverDefault,
    MinFirst,
    MaxFirst,
    /// Midpoint of the `MinFirst` and `MaxFirst` choices, when that midpoint
    /// is itself optimal; otherwise the `MinFirst` choice.
    Center,
}

impl FromStr for TieBreak {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solver-default" => Ok(TieBreak::SolverDefault),
            "min" | "min-first" => Ok(TieBreak::MinFirst),
            "max" | "max-first" => Ok(TieBreak::MaxFirst),
            "center" => Ok(TieBreak::Center),
            _ => Err(Error::Usage(format!("unknown tie-break `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmConfig {
    pub variant: Variant,
    /// Near-optimality factor of the auxiliary program, in `(0, 1)`.
    pub alpha: f64,
    pub tol_feas: f64,
    /// Optimality tolerance of the lower-bounding problem.
    pub tol_opt: f64,
    /// Optimality tolerance of the lower-level programs.
    pub lower_level_tol_opt: f64,
    pub max_iter: usize,
    pub initial_yset: Vec<Vec<f64>>,
    pub aux_tie_break: TieBreak,
    /// Stop as soon as an iteration adds a duplicate point at an unchanged
    /// `x`. When off, such runs continue until `max_iter`.
    pub stop_on_stall: bool,
    pub node_budget: usize,
}

impl AlgorithmConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            alpha: 0.95,
            tol_feas: 1e-9,
            tol_opt: DEFAULT_TOL_OPT,
            lower_level_tol_opt: DEFAULT_LOWER_LEVEL_TOL_OPT,
            max_iter: 50,
            initial_yset: Vec::new(),
            aux_tie_break: TieBreak::SolverDefault,
            stop_on_stall: true,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    /// Options of the lower-bounding solves.
    pub fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            tol_opt: self.tol_opt,
            tol_feas: self.tol_feas,
            node_budget: self.node_budget,
        }
    }

    /// Options of the lower-level solves.
    pub fn lower_level_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            tol_opt: self.lower_level_tol_opt,
            ..self.minimize_options()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.tol_feas >= 0.0) {
            return Err(Error::Parameter("tol_feas must be >= 0".into()));
        }
        if !(self.tol_opt > 0.0) || !(self.lower_level_tol_opt > 0.0) {
            return Err(Error::Parameter("optimality tolerances must be > 0".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlpRecord {
    pub y_k: Option<Vec<f64>>,
    pub value: Option<f64>,
    pub infeasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxRecord {
    pub y_tilde_k: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SipLlpRecord {
    pub y_k: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    /// 1-based iteration index.
    pub k: usize,
    pub x_k: Vec<f64>,
    /// `f(x_k)`: the lower bound of this iteration, within `tol_opt`.
    #[serde(rename = "f_Lk")]
    pub f_lk: f64,
    pub llp: Option<LlpRecord>,
    pub aux: Option<AuxRecord>,
    pub sip_llp: Option<SipLlpRecord>,
    pub added_point: Option<Vec<f64>>,
    #[serde(rename = "Yset_size_after")]
    pub yset_size_after: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// `x_k` is feasible for the relaxation, so `f^{L,k}` is its value.
    ConvergedFeasible,
    /// The lower-bounding problem has no feasible point.
    InfeasibleDetected,
    Stalled,
    IterationCap,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::ConvergedFeasible => "converged_feasible",
            RunStatus::InfeasibleDetected => "infeasible_detected",
            RunStatus::Stalled => "stalled",
            RunStatus::IterationCap => "iteration_cap",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub trace: Vec<IterateRecord>,
    pub status: RunStatus,
    /// Last `f_Lk`; `+inf` when the lower-bounding problem became infeasible.
    pub final_lower_bound: f64,
}

/// Runs the lower-bounding loop.
pub fn run(p: &GsipProblem, cfg: &AlgorithmConfig) -> Result<RunResult> {
    cfg.validate()?;
    let opts = cfg.minimize_options();
    let ll_opts = cfg.lower_level_options();
    let mut yset: Vec<Vec<f64>> = Vec::new();
    for yp in &cfg.initial_yset {
        p.y.check_contains(yp, "initial discretization point")?;
        if !contains_point(&yset, yp) {
            yset.push(yp.clone());
        }
    }
    let hbar = p.hbar()?;

    let mut trace: Vec<IterateRecord> = Vec::new();
    let mut status = RunStatus::IterationCap;
    for k in 1..=cfg.max_iter {
        let lower = p.build_lower_bounding(&yset)?.minimize(&opts)?;
        let f_lk = lower.value();
        let (Some(x), Some(f_lk)) = (lower.minimizer, f_lk) else {
            status = RunStatus::InfeasibleDetected;
            break;
        };
        // normalizes -0.0
        let f_lk = f_lk + 0.0;
        let mut rec = IterateRecord {
            k,
            x_k: x.clone(),
            f_lk,
            llp: None,
            aux: None,
            sip_llp: None,
            added_point: None,
            yset_size_after: yset.len(),
        };

        let candidate = match cfg.variant {
            Variant::LlpOnly | Variant::AuxLlp => {
                let llp = p.build_llp(&x)?.minimize(&ll_opts)?;
                let llp_value = llp.value();
                rec.llp = Some(LlpRecord {
                    y_k: llp.minimizer.clone(),
                    value: llp_value,
                    infeasible: !llp.is_optimal(),
                });
                match (llp.minimizer, llp_value) {
                    (Some(y), Some(v)) if v < -cfg.tol_feas => {
                        if cfg.variant == Variant::LlpOnly {
                            Some(y)
                        } else {
                            match solve_aux(p, &hbar, &x, v, cfg, &ll_opts)? {
                                Some((y_tilde, value)) => {
                                    rec.aux = Some(AuxRecord {
                                        y_tilde_k: y_tilde.clone(),
                                        value,
                                    });
                                    Some(y_tilde)
                                }
                                None => None,
                            }
                        }
                    }
                    _ => None,
                }
            }
            Variant::SipLlp => None,
        };

        let candidate = match candidate {
            Some(y) => y,
            None => {
                // no cut from the variant's own rule: decide with the
                // relaxation's lower-level program
                let sip = p.build_sip_llp(&x)?.minimize(&ll_opts)?;
                let value = sip.value().expect("box-only minimization is feasible");
                let y = sip.minimizer.expect("box-only minimization is feasible");
                rec.sip_llp = Some(SipLlpRecord { y_k: y.clone(), value });
                if value >= -cfg.tol_feas {
                    status = RunStatus::ConvergedFeasible;
                    trace.push(rec);
                    break;
                }
                if cfg.variant != Variant::SipLlp {
                    // LLP and auxiliary rules give no point to add
                    status = RunStatus::Stalled;
                    trace.push(rec);
                    break;
                }
                y
            }
        };

        let duplicate = contains_point(&yset, &candidate);
        let same_x = trace
            .last()
            .is_some_and(|prev| same_point(&prev.x_k, &x));
        rec.added_point = Some(candidate.clone());
        if !duplicate {
            yset.push(candidate);
        }
        rec.yset_size_after = yset.len();
        if duplicate && same_x && cfg.stop_on_stall {
            // a repeated cut can still sit at a relaxation-feasible x when
            // the LLP minimizer lies on the boundary hbar = 0
            status = RunStatus::Stalled;
            if rec.sip_llp.is_none() {
                let sip = p.build_sip_llp(&x)?.minimize(&ll_opts)?;
                let value = sip.value().expect("box-only minimization is feasible");
                let y = sip.minimizer.expect("box-only minimization is feasible");
                if value >= -cfg.tol_feas {
                    status = RunStatus::ConvergedFeasible;
                }
                rec.sip_llp = Some(SipLlpRecord { y_k: y, value });
            }
            trace.push(rec);
            break;
        }
        trace.push(rec);
    }

    let final_lower_bound = match status {
        RunStatus::InfeasibleDetected => f64::INFINITY,
        _ => trace.last().map_or(f64::NEG_INFINITY, |r| r.f_lk),
    };
    Ok(RunResult {
        trace,
        status,
        final_lower_bound,
    })
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(u, v)| (u - v).abs() <= DUPLICATE_TOL)
}

fn contains_point(set: &[Vec<f64>], p: &[f64]) -> bool {
    set.iter().any(|q| same_point(q, p))
}

/// Solves the auxiliary program and applies the configured tie-break.
/// Returns the chosen point and `hbar` there.
fn solve_aux(
    p: &GsipProblem,
    hbar: &Expr,
    x: &[f64],
    llp_value: f64,
    cfg: &AlgorithmConfig,
    opts: &MinimizeOptions,
) -> Result<Option<(Vec<f64>, f64)>> {
    let aux = p.build_aux_llp(x, llp_value, cfg.alpha)?;
    let out = aux.minimize(opts)?;
    let best = out.value();
    let (Some(default), Some(best)) = (out.minimizer, best) else {
        return Ok(None);
    };
    let chosen = match cfg.aux_tie_break {
        TieBreak::SolverDefault => default,
        TieBreak::MinFirst => extreme_optimizer(&aux, best, false, opts)?.unwrap_or(default),
        TieBreak::MaxFirst => extreme_optimizer(&aux, best, true, opts)?.unwrap_or(default),
        TieBreak::Center => {
            let lo = extreme_optimizer(&aux, best, false, opts)?.unwrap_or_else(|| default.clone());
            let hi = extreme_optimizer(&aux, best, true, opts)?.unwrap_or_else(|| default.clone());
            let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
            let optimal = aux.is_feasible(&mid, opts.tol_feas)?
                && aux.objective_at(&mid)? <= best + opts.tol_opt;
            if optimal {
                mid
            } else {
                lo
            }
        }
    };
    let env = p.x.assign(x);
    let y_env = p.y.assign(&chosen);
    let value = hbar.substitute(&env).eval(&y_env)? + 0.0;
    Ok(Some((chosen, value)))
}

/// Minimizes (or maximizes) the first coordinate over the optimal face
/// `{aux constraints, aux objective <= best}`.
fn extreme_optimizer(
    aux: &Instance,
    best: f64,
    maximize: bool,
    opts: &MinimizeOptions,
) -> Result<Option<Vec<f64>>> {
    let first = Expr::var(aux.domain.names()[0].clone());
    let objective = if maximize { -first } else { first };
    let mut constraints = aux.constraints.clone();
    constraints.push(ConstraintSpec::le(aux.objective.clone() - Expr::Const(best)));
    let face = Instance::new(objective, constraints, aux.domain.clone());
    Ok(face.minimize(opts)?.minimizer)
}

/// A pair of iterations `(l, k)`, `l > k`, where the LLP point `y_k` had
/// `hbar(x_k, y_k) < 0` but `hbar(x_l, y_k) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub l: usize,
    pub k: usize,
    /// `hbar(x_l, y_k)`.
    pub value: f64,
}

/// Scans a run for pairs `l > k` with `hbar(x_l, y_k) > tol_feas` although
/// `hbar(x_k, y_k) < -tol_feas`. Such pairs contradict the hope that the
/// LLP points eventually satisfy the `g` clause of the cuts.
///
/// Fails with a usage error when the trace carries no LLP minimizers.
pub fn diagnose_trace(p: &GsipProblem, result: &RunResult) -> Result<Vec<Violation>> {
    diagnose_trace_with_tol(p, result, crate::opt::DEFAULT_TOL_FEAS)
}

pub fn diagnose_trace_with_tol(
    p: &GsipProblem,
    result: &RunResult,
    tol_feas: f64,
) -> Result<Vec<Violation>> {
    let hbar = p.hbar()?;
    let names: Vec<&str> = p
        .x
        .names()
        .iter()
        .chain(p.y.names())
        .map(String::as_str)
        .collect();
    let compiled = hbar.compile(&names)?;
    let at = |x: &[f64], y: &[f64]| -> Result<f64> {
        let point: Vec<f64> = x.iter().chain(y).copied().collect();
        compiled.eval(&point)
    };

    let llp_points: Vec<(usize, &[f64], &[f64])> = result
        .trace
        .iter()
        .filter_map(|r| {
            let y = r.llp.as_ref()?.y_k.as_deref()?;
            Some((r.k, r.x_k.as_slice(), y))
        })
        .collect();
    if llp_points.is_empty() {
        return Err(Error::Usage("trace has no lower-level program minimizers".into()));
    }

    let mut out = Vec::new();
    for &(k, x_k, y_k) in &llp_points {
        if at(x_k, y_k)? >= -tol_feas {
            continue;
        }
        for later in result.trace.iter().filter(|r| r.k > k) {
            let value = at(&later.x_k, y_k)?;
            if value > tol_feas {
                out.push(Violation {
                    l: later.k,
                    k,
                    value,
                });
            }
        }
    }
    Ok(out)
}

/// `(k, f_Lk)` for every iteration.
pub fn lower_bound_history(result: &RunResult) -> Vec<(usize, f64)> {
    result.trace.iter().map(|r| (r.k, r.f_lk)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsip::{cex1, cex2};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-6
    }

    #[test]
    fn llp_only_on_first_counterexample_halves() {
        let mut cfg = AlgorithmConfig::new(Variant::LlpOnly);
        cfg.max_iter = 6;
        let res = run(&cex1(), &cfg).unwrap();
        assert_eq!(res.status, RunStatus::IterationCap);
        for (r, (k, f)) in res.trace.iter().zip(lower_bound_history(&res)) {
            let expect = 0.5f64.powi(k as i32 - 1);
            assert_eq!(r.k, k);
            assert!(close(f, -expect));
            assert!(close(r.x_k[0], expect));
            assert!(close(r.llp.as_ref().unwrap().y_k.as_ref().unwrap()[0], expect));
            assert_eq!(r.added_point, r.llp.as_ref().unwrap().y_k);
            assert_eq!(r.yset_size_after, r.k);
        }
    }

    #[test]
    fn loose_tolerance_loses_the_halving() {
        // with t = 1e-6, y = 0 is t-optimal once x^2 < t
        let mut cfg = AlgorithmConfig::new(Variant::LlpOnly);
        cfg.lower_level_tol_opt = 1e-6;
        cfg.max_iter = 20;
        let res = run(&cex1(), &cfg).unwrap();
        assert_eq!(res.status, RunStatus::Stalled);
        assert!(res.trace.len() < 20);
    }

    #[test]
    fn sip_llp_converges_in_two_iterations() {
        for p in [cex1(), cex2()] {
            let res = run(&p, &AlgorithmConfig::new(Variant::SipLlp)).unwrap();
            assert_eq!(res.status, RunStatus::ConvergedFeasible);
            let hist = lower_bound_history(&res);
            assert_eq!(hist.len(), 2);
            assert!(close(hist[0].1, -1.0) && close(hist[1].1, 0.5));
            assert_eq!(res.trace[0].added_point, Some(vec![-1.0]));
            assert!(close(res.trace[1].x_k[0], -0.5));
            assert!(res.trace[1].sip_llp.as_ref().unwrap().value >= -1e-9);
            assert_eq!(res.final_lower_bound, hist[1].1);
        }
    }

    #[test]
    fn repeated_boundary_cut_is_checked_against_the_relaxation() {
        // the auxiliary rule keeps adding y = -1 at x = -1/2, where hbar = 0
        let res = run(&cex1(), &AlgorithmConfig::new(Variant::AuxLlp)).unwrap();
        assert_eq!(res.status, RunStatus::ConvergedFeasible);
        assert!(close(res.final_lower_bound, 0.5));
    }

    #[test]
    fn aux_on_second_counterexample_stalls_at_zero() {
        let res = run(&cex2(), &AlgorithmConfig::new(Variant::AuxLlp)).unwrap();
        assert_eq!(res.status, RunStatus::Stalled);
        let first = &res.trace[0];
        assert!(close(first.x_k[0], 1.0));
        assert!(close(first.llp.as_ref().unwrap().value.unwrap(), -11.0));
        assert!(close(first.aux.as_ref().unwrap().y_tilde_k[0], 0.45));
        for r in &res.trace[1..] {
            assert!(close(r.x_k[0], 0.0));
        }
        assert!(close(res.final_lower_bound, 0.0));
    }

    #[test]
    fn tie_breaks_pick_different_points() {
        let mut picks = Vec::new();
        for tb in [TieBreak::MinFirst, TieBreak::MaxFirst, TieBreak::Center] {
            let mut cfg = AlgorithmConfig::new(Variant::AuxLlp);
            cfg.aux_tie_break = tb;
            cfg.max_iter = 2;
            let res = run(&cex2(), &cfg).unwrap();
            picks.push(res.trace[1].aux.as_ref().unwrap().y_tilde_k[0]);
        }
        assert!((picks[0] - 0.45).abs() <= 1e-6);
        assert!((picks[1] - 1.0).abs() <= 1e-6);
        assert!((picks[2] - 0.725).abs() <= 1e-6);
    }

    #[test]
    fn diagnosis_needs_llp_data() {
        let res = run(&cex1(), &AlgorithmConfig::new(Variant::SipLlp)).unwrap();
        assert!(matches!(diagnose_trace(&cex1(), &res), Err(Error::Usage(_))));
    }

    #[test]
    fn diagnosis_boundary_pair_is_not_reported() {
        let mut cfg = AlgorithmConfig::new(Variant::LlpOnly);
        cfg.max_iter = 4;
        let res = run(&cex1(), &cfg).unwrap();
        let v = diagnose_trace(&cex1(), &res).unwrap();
        assert!(v.iter().all(|v| v.l > v.k + 1));
        let pair = v.iter().find(|v| (v.l, v.k) == (4, 1)).unwrap();
        assert!(close(pair.value, 0.75));
    }

    #[test]
    fn empty_history() {
        let res = RunResult {
            trace: vec![],
            status: RunStatus::IterationCap,
            final_lower_bound: f64::NEG_INFINITY,
        };
        assert!(lower_bound_history(&res).is_empty());
    }

    #[test]
    fn config_validation() {
        let mut cfg = AlgorithmConfig::new(Variant::AuxLlp);
        cfg.alpha = 1.0;
        assert!(matches!(run(&cex2(), &cfg), Err(Error::Parameter(_))));
        let mut cfg = AlgorithmConfig::new(Variant::LlpOnly);
        cfg.initial_yset = vec![vec![3.0]];
        assert!(matches!(run(&cex1(), &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn infeasible_lower_bounding_is_detected() {
        let mut p = cex1();
        // any cut requires -2x + y >= 0 or g >= 0 with g < 0 everywhere
        p.x = crate::domain::BoxDomain::new([("x", 0.8, 1.0)]).unwrap();
        let mut cfg = AlgorithmConfig::new(Variant::SipLlp);
        cfg.initial_yset = vec![vec![1.0]];
        let res = run(&p, &cfg).unwrap();
        assert_eq!(res.status, RunStatus::InfeasibleDetected);
        assert!(res.trace.is_empty());
        assert_eq!(res.final_lower_bound, f64::INFINITY);
    }
}
