//! Certified global minimization over a box by interval branch-and-bound,
//! and a dense-grid brute-force minimizer used as an independent oracle.
//!
//! The branch-and-bound is best-first on the node lower bound. It bisects the
//! coordinate whose split raises the objective lower bound the most, falling
//! back to the widest coordinate when no split helps. A node is discarded when its objective lower bound
//! exceeds `incumbent - tol_opt`, or when some constraint is certified
//! violated by more than `tol_feas` over the whole node. Incumbents come from
//! evaluating the midpoint and (in up to four dimensions) the corners of
//! every box the search creates; the incumbent changes only on strict
//! improvement, so the returned minimizer is the first certified incumbent
//! achieving the final value. Given identical inputs the search is fully
//! deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::expr::{CompiledExpr, Expr};
use crate::interval::Interval;

pub const DEFAULT_TOL_OPT: f64 = 1e-6;
pub const DEFAULT_TOL_FEAS: f64 = 1e-9;
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;
/// Boxes narrower than this are not split further.
pub const MIN_BOX_WIDTH: f64 = 1e-9;

const MAX_CORNER_DIM: usize = 4;
const MAX_GRID_POINTS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    /// `expr <= 0`
    NonPositive,
    /// `expr >= 0`
    NonNegative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpec {
    pub expr: Expr,
    pub sense: Sense,
}

impl ConstraintSpec {
    /// `expr <= 0`
    pub fn le(expr: Expr) -> Self {
        Self {
            expr,
            sense: Sense::NonPositive,
        }
    }

    /// `expr >= 0`
    pub fn ge(expr: Expr) -> Self {
        Self {
            expr,
            sense: Sense::NonNegative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub tol_opt: f64,
    pub tol_feas: f64,
    pub node_budget: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol_opt: DEFAULT_TOL_OPT,
            tol_feas: DEFAULT_TOL_FEAS,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl MinimizeOptions {
    pub fn new(tol_opt: f64, tol_feas: f64) -> Self {
        Self {
            tol_opt,
            tol_feas,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_opt > 0.0) || !self.tol_opt.is_finite() {
            return Err(Error::Parameter(format!("tol_opt must be > 0, got {}", self.tol_opt)));
        }
        if !(self.tol_feas >= 0.0) || !self.tol_feas.is_finite() {
            return Err(Error::Parameter(format!(
                "tol_feas must be >= 0, got {}",
                self.tol_feas
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizeStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome {
    pub status: MinimizeStatus,
    /// Present iff optimal. Coordinates follow the box order.
    pub minimizer: Option<Vec<f64>>,
    /// `hi` is the objective at the minimizer, `lo` a lower bound on the
    /// infimum over the box with constraints relaxed by `tol_feas`.
    pub value_bounds: Option<Interval>,
    /// Nodes expanded (branch-and-bound) or points evaluated (grid).
    pub work: usize,
}

impl MinimizeOutcome {
    fn infeasible(work: usize) -> Self {
        Self {
            status: MinimizeStatus::Infeasible,
            minimizer: None,
            value_bounds: None,
            work,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == MinimizeStatus::Optimal
    }

    /// Objective value at the minimizer.
    pub fn value(&self) -> Option<f64> {
        self.value_bounds.map(|b| b.hi)
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.value_bounds.map(|b| b.lo)
    }
}

/// A box-constrained minimization problem with inequality constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub objective: Expr,
    pub constraints: Vec<ConstraintSpec>,
    pub domain: BoxDomain,
}

impl Instance {
    pub fn new(objective: Expr, constraints: Vec<ConstraintSpec>, domain: BoxDomain) -> Self {
        Self {
            objective,
            constraints,
            domain,
        }
    }

    fn compile(&self) -> Result<Compiled> {
        let names: Vec<&str> = self.domain.names().iter().map(String::as_str).collect();
        Ok(Compiled {
            objective: self.objective.compile(&names)?,
            constraints: self
                .constraints
                .iter()
                .map(|c| Ok((c.expr.compile(&names)?, c.sense)))
                .collect::<Result<_>>()?,
        })
    }

    pub fn objective_at(&self, point: &[f64]) -> Result<f64> {
        self.objective.eval(&self.domain.assign(point))
    }

    /// Point feasibility: in the box and every constraint satisfied within
    /// `tol_feas`.
    pub fn is_feasible(&self, point: &[f64], tol_feas: f64) -> Result<bool> {
        if !self.domain.contains(point) {
            return Ok(false);
        }
        let env = self.domain.assign(point);
        for c in &self.constraints {
            if !satisfied(c.expr.eval(&env)?, c.sense, tol_feas) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Interval branch-and-bound. See the module docs.
    pub fn minimize(&self, opts: &MinimizeOptions) -> Result<MinimizeOutcome> {
        opts.validate()?;
        let compiled = self.compile()?;
        BranchAndBound::new(&compiled, opts, self.domain.dim()).run(self.domain.bounds())
    }

    /// Brute force over the full tensor grid with `points_per_axis` points
    /// per coordinate, endpoints included. The first grid point (in
    /// lexicographic index order) attaining the best feasible value wins.
    pub fn grid_minimize(&self, points_per_axis: usize, tol_feas: f64) -> Result<MinimizeOutcome> {
        if points_per_axis < 2 {
            return Err(Error::Parameter("points_per_axis must be >= 2".into()));
        }
        let dim = self.domain.dim();
        let total = (points_per_axis as u64)
            .checked_pow(dim as u32)
            .filter(|&t| t <= MAX_GRID_POINTS)
            .ok_or_else(|| Error::Parameter(format!("grid of {points_per_axis}^{dim} points is too large")))?;
        let compiled = self.compile()?;
        let axes: Vec<Vec<f64>> = self
            .domain
            .bounds()
            .iter()
            .map(|b| grid_axis(*b, points_per_axis))
            .collect();

        let mut index = vec![0usize; dim];
        let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
        let mut best: Option<(Vec<f64>, f64)> = None;
        for _ in 0..total {
            if compiled.feasible(&point, tol_feas)? {
                let v = compiled.objective.eval(&point)?;
                if best.as_ref().map_or(true, |(_, b)| v < *b) {
                    best = Some((point.clone(), v));
                }
            }
            // odometer increment, last coordinate fastest
            for axis in (0..dim).rev() {
                index[axis] += 1;
                if index[axis] < points_per_axis {
                    point[axis] = axes[axis][index[axis]];
                    break;
                }
                index[axis] = 0;
                point[axis] = axes[axis][0];
            }
        }
        Ok(match best {
            Some((p, v)) => MinimizeOutcome {
                status: MinimizeStatus::Optimal,
                minimizer: Some(p),
                value_bounds: Some(Interval::point(v)),
                work: total as usize,
            },
            None => MinimizeOutcome::infeasible(total as usize),
        })
    }
}

/// Grid coordinates along one axis, endpoints exact.
pub fn grid_axis(bound: Interval, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                bound.hi
            } else {
                bound.lo + bound.width() * (i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Certified global minimization with the given tolerances and the default
/// node budget.
pub fn minimize(
    objective: Expr,
    constraints: Vec<ConstraintSpec>,
    domain: BoxDomain,
    tol_opt: f64,
    tol_feas: f64,
) -> Result<MinimizeOutcome> {
    Instance::new(objective, constraints, domain).minimize(&MinimizeOptions::new(tol_opt, tol_feas))
}

/// Dense-grid oracle with the default feasibility tolerance.
pub fn grid_minimize(
    objective: Expr,
    constraints: Vec<ConstraintSpec>,
    domain: BoxDomain,
    points_per_axis: usize,
) -> Result<MinimizeOutcome> {
    Instance::new(objective, constraints, domain).grid_minimize(points_per_axis, DEFAULT_TOL_FEAS)
}

fn satisfied(v: f64, sense: Sense, tol: f64) -> bool {
    match sense {
        Sense::NonPositive => v <= tol,
        Sense::NonNegative => v >= -tol,
    }
}

fn certified_satisfied(iv: Interval, sense: Sense, tol: f64) -> bool {
    match sense {
        Sense::NonPositive => iv.hi <= tol,
        Sense::NonNegative => iv.lo >= -tol,
    }
}

fn certified_violated(iv: Interval, sense: Sense, tol: f64) -> bool {
    match sense {
        Sense::NonPositive => iv.lo > tol,
        Sense::NonNegative => iv.hi < -tol,
    }
}

struct Compiled {
    objective: CompiledExpr,
    constraints: Vec<(CompiledExpr, Sense)>,
}

impl Compiled {
    fn feasible(&self, point: &[f64], tol: f64) -> Result<bool> {
        for (c, sense) in &self.constraints {
            if !satisfied(c.eval(point)?, *sense, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct Node {
    bounds: Vec<Interval>,
    lb: f64,
    /// Every constraint holds on the whole box.
    feasible: bool,
    seq: u64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // reversed: BinaryHeap pops the smallest lower bound, oldest first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lb
            .total_cmp(&self.lb)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct BranchAndBound<'a> {
    problem: &'a Compiled,
    opts: &'a MinimizeOptions,
    dim: usize,
    incumbent: Option<(Vec<f64>, f64)>,
    /// Smallest lower bound among nodes discarded without being resolved.
    discarded_lb: f64,
    seq: u64,
    scratch: Vec<f64>,
}

impl<'a> BranchAndBound<'a> {
    fn new(problem: &'a Compiled, opts: &'a MinimizeOptions, dim: usize) -> Self {
        Self {
            problem,
            opts,
            dim,
            incumbent: None,
            discarded_lb: f64::INFINITY,
            seq: 0,
            scratch: vec![0.0; dim],
        }
    }

    fn cutoff(&self) -> f64 {
        self.incumbent
            .as_ref()
            .map_or(f64::INFINITY, |(_, v)| v - self.opts.tol_opt)
    }

    fn try_point(&mut self, point: &[f64]) -> Result<()> {
        if !self.problem.feasible(point, self.opts.tol_feas)? {
            return Ok(());
        }
        let v = self.problem.objective.eval(point)?;
        if self.incumbent.as_ref().map_or(true, |(_, best)| v < *best) {
            self.incumbent = Some((point.to_vec(), v));
        }
        Ok(())
    }

    fn probe(&mut self, bounds: &[Interval]) -> Result<()> {
        let mut p = std::mem::take(&mut self.scratch);
        for (slot, b) in p.iter_mut().zip(bounds) {
            *slot = b.midpoint();
        }
        self.try_point(&p)?;
        if self.dim <= MAX_CORNER_DIM {
            for mask in 0..(1u32 << self.dim) {
                for (i, (slot, b)) in p.iter_mut().zip(bounds).enumerate() {
                    *slot = if mask & (1 << i) == 0 { b.lo } else { b.hi };
                }
                self.try_point(&p)?;
            }
        }
        self.scratch = p;
        Ok(())
    }

    /// Bounds a box: `None` when a constraint is certified violated,
    /// otherwise the objective lower bound and whether the box is certified
    /// feasible. Probes the box for incumbents.
    fn bound(&mut self, bounds: &[Interval]) -> Result<Option<(f64, bool)>> {
        let mut feasible = true;
        for (c, sense) in &self.problem.constraints {
            let iv = c.eval_interval(bounds)?;
            if certified_violated(iv, *sense, self.opts.tol_feas) {
                return Ok(None);
            }
            feasible &= certified_satisfied(iv, *sense, self.opts.tol_feas);
        }
        let lb = self.problem.objective.eval_interval(bounds)?.lo;
        self.probe(bounds)?;
        Ok(Some((lb, feasible)))
    }

    /// The coordinate to bisect, `None` once every side is at minimum width.
    ///
    /// On certified-feasible boxes, prefers the coordinate whose bisection
    /// raises the objective lower bound the most. Otherwise, and on ties,
    /// the widest coordinate, then the first.
    fn split_axis(&self, node: &Node) -> Result<Option<usize>> {
        let mut best: Option<(usize, f64, f64)> = None;
        let mut child = node.bounds.clone();
        for (i, b) in node.bounds.iter().enumerate() {
            let width = b.width();
            if width <= MIN_BOX_WIDTH {
                continue;
            }
            let score = if self.dim == 1 || !node.feasible {
                node.lb
            } else {
                let (l, r) = b.bisect();
                child[i] = l;
                let lo_l = self.problem.objective.eval_interval(&child)?.lo;
                child[i] = r;
                let lo_r = self.problem.objective.eval_interval(&child)?.lo;
                child[i] = *b;
                lo_l.min(lo_r)
            };
            let better = match best {
                None => true,
                Some((_, s, w)) => score > s || (score == s && width > w),
            };
            if better {
                best = Some((i, score, width));
            }
        }
        Ok(best.map(|(i, _, _)| i))
    }

    fn push(&mut self, heap: &mut BinaryHeap<Node>, bounds: Vec<Interval>, (lb, feasible): (f64, bool)) {
        if lb > self.cutoff() {
            self.discarded_lb = self.discarded_lb.min(lb);
            return;
        }
        self.seq += 1;
        heap.push(Node {
            bounds,
            lb,
            feasible,
            seq: self.seq,
        });
    }

    fn run(mut self, root: &[Interval]) -> Result<MinimizeOutcome> {
        let mut heap = BinaryHeap::new();
        let mut unresolved_lb = f64::INFINITY;
        let mut expanded = 0usize;
        if let Some(lb) = self.bound(root)? {
            self.push(&mut heap, root.to_vec(), lb);
        }
        while let Some(node) = heap.pop() {
            if node.lb > self.cutoff() {
                self.discarded_lb = self.discarded_lb.min(node.lb);
                break;
            }
            expanded += 1;
            if expanded > self.opts.node_budget {
                return Err(Error::BudgetExceeded(self.opts.node_budget));
            }
            let Some(axis) = self.split_axis(&node)? else {
                // already probed at creation; nothing left to learn here
                unresolved_lb = unresolved_lb.min(node.lb);
                continue;
            };
            let (left, right) = node.bounds[axis].bisect();
            for half in [left, right] {
                let mut child = node.bounds.clone();
                child[axis] = half;
                if let Some(lb) = self.bound(&child)? {
                    self.push(&mut heap, child, lb);
                }
            }
        }
        let Some((point, value)) = self.incumbent else {
            return Ok(MinimizeOutcome::infeasible(expanded));
        };
        // unresolved nodes only matter if they could hide a better point
        let unresolved = if unresolved_lb < value { unresolved_lb } else { f64::INFINITY };
        let lo = value.min(self.discarded_lb).min(unresolved);
        Ok(MinimizeOutcome {
            status: MinimizeStatus::Optimal,
            minimizer: Some(point),
            value_bounds: Some(Interval { lo, hi: value }),
            work: expanded,
        })
    }
}
