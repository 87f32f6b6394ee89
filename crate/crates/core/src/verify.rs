//! Cross-checks of branch-and-bound results against the grid oracle.
//!
//! The grid value of a Lipschitz objective can exceed the true minimum by at
//! most `L * mesh` when the feasible region is not thinner than a grid cell.
//! `L` is estimated from neighbouring grid values and is therefore a
//! measurement, not a certificate.

use std::fmt;

use serde::Serialize;

use crate::algorithms::{run, AlgorithmConfig, RunResult, Variant};
use crate::error::Result;
use crate::gsip::GsipProblem;
use crate::opt::{grid_axis, Instance, MinimizeOptions, MinimizeOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Agree,
    /// Branch-and-bound found a feasible point, the grid did not. Expected
    /// when the feasible region is thinner than the grid mesh.
    Sliver,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub bb: MinimizeOutcome,
    pub grid: MinimizeOutcome,
    /// Largest neighbouring-grid slope, scaled by `sqrt(dim)`.
    pub lipschitz: f64,
    /// Diagonal of one grid cell.
    pub mesh: f64,
    /// `tol_opt + lipschitz * mesh`.
    pub allowed: f64,
    /// `|bb value - grid value|` when both are optimal.
    pub discrepancy: Option<f64>,
    pub verdict: Verdict,
    /// The B&B minimizer is in the box, feasible within `tol_feas`, and its
    /// objective lies inside the reported bounds.
    pub sound: bool,
}

/// Solves `inst` both ways and classifies the outcome.
pub fn compare_with_grid(
    inst: &Instance,
    opts: &MinimizeOptions,
    points_per_axis: usize,
) -> Result<Comparison> {
    let bb = inst.minimize(opts)?;
    let grid = inst.grid_minimize(points_per_axis, opts.tol_feas)?;
    let (lipschitz, mesh) = sampled_lipschitz(inst, points_per_axis)?;
    let allowed = opts.tol_opt + lipschitz * mesh;

    let sound = match (&bb.minimizer, bb.value_bounds) {
        (Some(x), Some(b)) => {
            let v = inst.objective_at(x)?;
            inst.is_feasible(x, opts.tol_feas)? && b.lo <= v && v <= b.hi
        }
        _ => true,
    };

    let (discrepancy, verdict) = match (bb.value(), grid.value()) {
        (Some(a), Some(b)) => {
            let d = (a - b).abs();
            (Some(d), if d <= allowed { Verdict::Agree } else { Verdict::Mismatch })
        }
        (Some(_), None) => (None, Verdict::Sliver),
        (None, Some(_)) => (None, Verdict::Mismatch),
        (None, None) => (None, Verdict::Agree),
    };
    Ok(Comparison {
        bb,
        grid,
        lipschitz,
        mesh,
        allowed,
        discrepancy,
        verdict,
        sound,
    })
}

/// Largest slope between grid neighbours along any axis, times `sqrt(dim)`,
/// and the cell diagonal.
pub fn sampled_lipschitz(inst: &Instance, points_per_axis: usize) -> Result<(f64, f64)> {
    let names: Vec<&str> = inst.domain.names().iter().map(String::as_str).collect();
    let f = inst.objective.compile(&names)?;
    let dim = names.len();
    let axes: Vec<Vec<f64>> = inst
        .domain
        .bounds()
        .iter()
        .map(|b| grid_axis(*b, points_per_axis))
        .collect();
    let steps: Vec<f64> = inst
        .domain
        .bounds()
        .iter()
        .map(|b| b.width() / (points_per_axis - 1) as f64)
        .collect();
    let mesh = steps.iter().map(|s| s * s).sum::<f64>().sqrt();

    let total = points_per_axis.pow(dim as u32);
    let mut values = Vec::with_capacity(total);
    let mut index = vec![0usize; dim];
    for _ in 0..total {
        let point: Vec<f64> = index.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
        values.push(f.eval(&point)?);
        for axis in (0..dim).rev() {
            index[axis] += 1;
            if index[axis] < points_per_axis {
                break;
            }
            index[axis] = 0;
        }
    }

    let mut slope: f64 = 0.0;
    let mut stride = 1;
    for axis in (0..dim).rev() {
        if steps[axis] > 0.0 {
            for (i, v) in values.iter().enumerate() {
                if (i / stride) % points_per_axis + 1 < points_per_axis {
                    slope = slope.max((values[i + stride] - v).abs() / steps[axis]);
                }
            }
        }
        stride *= points_per_axis;
    }
    Ok((slope * (dim as f64).sqrt(), mesh))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subproblem {
    LowerBounding,
    Llp,
    AuxLlp,
    SipLlp,
}

pub const SUBPROBLEMS: [Subproblem; 4] = [
    Subproblem::LowerBounding,
    Subproblem::Llp,
    Subproblem::AuxLlp,
    Subproblem::SipLlp,
];

impl fmt::Display for Subproblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subproblem::LowerBounding => "lower-bounding",
            Subproblem::Llp => "llp",
            Subproblem::AuxLlp => "aux-llp",
            Subproblem::SipLlp => "sip-llp",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub variant: Variant,
    pub k: usize,
    pub subproblem: Subproblem,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub problem: String,
    pub points_per_axis: usize,
    pub runs: Vec<(Variant, RunResult)>,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.comparison.verdict != Verdict::Mismatch && c.comparison.sound)
    }

    /// Largest discrepancy per subproblem kind, over all variants.
    pub fn max_discrepancy(&self, kind: Subproblem) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.subproblem == kind)
            .filter_map(|c| c.comparison.discrepancy)
            .reduce(f64::max)
    }

    pub fn max_discrepancy_for(&self, variant: Variant, kind: Subproblem) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.variant == variant && c.subproblem == kind)
            .filter_map(|c| c.comparison.discrepancy)
            .reduce(f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks
            .iter()
            .filter(|c| c.comparison.verdict == Verdict::Mismatch || !c.comparison.sound)
    }

    pub fn slivers(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.comparison.verdict == Verdict::Sliver)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem {} (grid {} points per axis)", self.problem, self.points_per_axis)?;
        for (variant, res) in &self.runs {
            writeln!(
                f,
                "  {variant}: {} iterations, status {}, final lower bound {:?}",
                res.trace.len(),
                res.status,
                res.final_lower_bound
            )?;
        }
        for (variant, _) in &self.runs {
            for kind in SUBPROBLEMS {
                let n = self
                    .checks
                    .iter()
                    .filter(|c| c.variant == *variant && c.subproblem == kind)
                    .count();
                match self.max_discrepancy_for(*variant, kind) {
                    Some(d) => writeln!(f, "  {variant} {kind}: {n} checks, max discrepancy {d:e}")?,
                    None => writeln!(f, "  {variant} {kind}: {n} checks")?,
                }
            }
        }
        for c in self.slivers() {
            writeln!(f, "  warning: {} k={} {}: feasible region below grid resolution", c.variant, c.k, c.subproblem)?;
        }
        for c in self.failures() {
            let cmp = &c.comparison;
            writeln!(
                f,
                "  FAIL: {} k={} {}: bb {:?}, grid {:?}, allowed {:e}, sound {}",
                c.variant,
                c.k,
                c.subproblem,
                cmp.bb.value(),
                cmp.grid.value(),
                cmp.allowed,
                cmp.sound
            )?;
        }
        write!(f, "{}", if self.passed() { "verify: ok" } else { "verify: FAILED" })
    }
}

/// Runs all three variants for at most `max_iter` iterations each, then
/// checks every subproblem at every iterate against the grid.
pub fn verify_problem(
    p: &GsipProblem,
    points_per_axis: usize,
    max_iter: usize,
    base: &AlgorithmConfig,
) -> Result<VerifyReport> {
    let opts = base.minimize_options();
    let ll_opts = base.lower_level_options();
    let mut runs = Vec::new();
    let mut checks = Vec::new();
    for variant in [Variant::LlpOnly, Variant::AuxLlp, Variant::SipLlp] {
        let cfg = AlgorithmConfig {
            variant,
            max_iter,
            ..base.clone()
        };
        let res = run(p, &cfg)?;
        let mut yset: Vec<Vec<f64>> = cfg.initial_yset.clone();
        for rec in &res.trace {
            let mut check = |subproblem, inst: &Instance, opts: &MinimizeOptions| -> Result<()> {
                checks.push(Check {
                    variant,
                    k: rec.k,
                    subproblem,
                    comparison: compare_with_grid(inst, opts, points_per_axis)?,
                });
                Ok(())
            };
            check(Subproblem::LowerBounding, &p.build_lower_bounding(&yset)?, &opts)?;
            let llp = p.build_llp(&rec.x_k)?;
            check(Subproblem::Llp, &llp, &ll_opts)?;
            if let Some(v) = llp.minimize(&ll_opts)?.value().filter(|&v| v < -cfg.tol_feas) {
                check(Subproblem::AuxLlp, &p.build_aux_llp(&rec.x_k, v, cfg.alpha)?, &ll_opts)?;
            }
            check(Subproblem::SipLlp, &p.build_sip_llp(&rec.x_k)?, &ll_opts)?;

            if let Some(y) = &rec.added_point {
                if yset.len() < rec.yset_size_after {
                    yset.push(y.clone());
                }
            }
        }
        runs.push((variant, res));
    }
    Ok(VerifyReport {
        problem: p.name.clone(),
        points_per_axis,
        runs,
        checks,
    })
}
