//! Subcommand implementations.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use freeineq_core::equilibrium::{
    default_test_family, double_well_demo, euler_lagrange_residual, global_transport_check, solve_equilibrium,
    PotentialKind,
};
use freeineq_core::experiments::{lp_explorer, pair_stats, verify_inequalities_with_degree};
use freeineq_core::functionals::{
    fisher_i_grid, fisher_j_grid, log_energy, total_variation, total_variation_grid,
};
use freeineq_core::measure::grid_from_density;
use freeineq_core::transport::wasserstein_p;
use freeineq_core::{Distribution1d, GridMeasure, Measure, Potential};

use crate::config::Settings;
use crate::output::{num, Obj, Table, Value};

/// Process outcome: success or an inequality flagged in diagnostic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn violated(v: Value, tol: f64) -> bool {
    match v {
        Value::Finite(x) => x < -tol,
        Value::NegInf => true,
        _ => false,
    }
}

fn to_grid(m: &Measure, cells: usize) -> Result<GridMeasure> {
    Ok(match m {
        Measure::Beta(b) => grid_from_density(b, cells)?,
        Measure::Grid(g) => g.clone(),
        Measure::Scaled(s) => {
            let (lo, hi) = s.support();
            GridMeasure::from_distribution(s, lo, hi, cells)?
        }
    })
}

/// Functionals of two measures and the three inequality slacks.
pub fn functionals(a: &Path, b: &Path, s: &Settings) -> Result<(Obj, Outcome)> {
    let ma = Measure::from_json(&read(a)?).with_context(|| format!("parsing measure {}", a.display()))?;
    let mb = Measure::from_json(&read(b)?).with_context(|| format!("parsing measure {}", b.display()))?;
    let (w1, h, i, j, tv, l2) = match (&ma, &mb) {
        (Measure::Beta(x), Measure::Beta(y)) => {
            let st = pair_stats(x, y);
            let tv = total_variation(x, y).finite().unwrap_or(f64::INFINITY);
            (st.w1, Value::Finite(st.h), Value::Finite(st.i), Value::Finite(st.j), Value::Finite(tv), 1.0)
        }
        _ => {
            let (ga, gb) = (to_grid(&ma, s.cells)?, to_grid(&mb, s.cells)?);
            let w1 = wasserstein_p(&ma, &mb, 1.0)?;
            let reach = [ma.support(), mb.support()].iter().fold(0.0f64, |r, (lo, hi)| r.max(lo.abs()).max(hi.abs()));
            let l = (reach / 2.0).max(1.0);
            (
                w1,
                log_energy(&ga, &gb).into(),
                fisher_i_grid(&ga, &gb).into(),
                fisher_j_grid(&ga, &gb).into(),
                total_variation_grid(&ga, &gb).into(),
                l * l,
            )
        }
    };
    let (hf, if_, jf) = (h.as_f64(), i.as_f64(), j.as_f64());
    let slack_t = Value::from(2.0 * l2 * hf - w1 * w1);
    let slack_lsi = Value::from(jf - 2.0 * hf);
    let slack_hwi = if if_ == f64::INFINITY {
        Value::PosInf
    } else {
        Value::from((2.0 * if_).sqrt() * w1 - 0.5 * w1 * w1 - hf)
    };
    let bad = [slack_t, slack_lsi, slack_hwi].iter().any(|&v| violated(v, s.tolerance));
    let obj = Obj::new()
        .value("W1", w1)
        .value("H", h)
        .value("I", i)
        .value("J", j)
        .value("TV", tv)
        .value("slack_transport", slack_t)
        .value("slack_lsi", slack_lsi)
        .value("slack_hwi", slack_hwi);
    Ok((obj, if bad && s.diagnostic { Outcome::Violation } else { Outcome::Ok }))
}

pub const VERIFY_HEADER: [&str; 8] = ["sample_id", "W1", "H", "I", "J", "slack_t", "slack_lsi", "slack_hwi"];

/// Seeded inequality sweep written as CSV.
pub fn verify(s: &Settings, out: Option<&Path>) -> Result<Outcome> {
    let report = verify_inequalities_with_degree(s.seed, s.samples, s.degree);
    let mut table = Table::new(sink(out)?, &VERIFY_HEADER)?;
    let mut violations = 0;
    for row in &report.rows {
        let st = &row.stats;
        violations += [st.slack_transport, st.slack_lsi, st.slack_hwi].iter().filter(|&&x| x < -s.tolerance).count();
        table.row([
            row.sample_id.to_string(),
            num(st.w1),
            num(st.h),
            num(st.i),
            num(st.j),
            num(st.slack_transport),
            num(st.slack_lsi),
            num(st.slack_hwi),
        ])?;
    }
    table.finish()?.flush()?;
    eprintln!(
        "verify: seed={} samples={} max_degree={} violations={violations} sharpness_ok={}",
        s.seed, s.samples, s.degree, report.sharpness_ok
    );
    Ok(if violations > 0 && s.diagnostic { Outcome::Violation } else { Outcome::Ok })
}

pub const LP_HEADER: [&str; 8] = ["r", "terms", "tail_bound", "H", "alpha_integral", "u_integral", "ratio", "bound"];

/// Parameters of the geometric-family sweep.
#[derive(Debug, Clone, Copy)]
pub struct LpSweep {
    pub p: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub steps: usize,
    pub eta: f64,
}

impl LpSweep {
    /// `1 - r` spaced geometrically from `1 - r_min` to `1 - r_max`.
    pub fn radii(&self) -> Result<Vec<f64>> {
        for (name, r) in [("r-min", self.r_min), ("r-max", self.r_max)] {
            if !(r > 0.0 && r < 1.0) {
                bail!("{name} must lie in (0, 1), got {r}");
            }
        }
        if self.r_min > self.r_max {
            bail!("r-min must not exceed r-max");
        }
        if self.steps == 0 {
            bail!("steps must be positive");
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            bail!("p must be at least 1, got {}", self.p);
        }
        if self.eta == 0.0 || !self.eta.is_finite() {
            bail!("eta must be a nonzero number");
        }
        if self.steps == 1 {
            return Ok(vec![self.r_min]);
        }
        let (a, b) = (1.0 - self.r_min, 1.0 - self.r_max);
        Ok((0..self.steps)
            .map(|k| {
                let t = k as f64 / (self.steps - 1) as f64;
                1.0 - a * (b / a).powf(t)
            })
            .collect())
    }
}

pub fn lp_sweep(sweep: LpSweep, out: Option<&Path>) -> Result<Outcome> {
    let rs = sweep.radii()?;
    let report = lp_explorer(sweep.p, &rs, sweep.eta)?;
    let mut table = Table::new(sink(out)?, &LP_HEADER)?;
    for row in &report.rows {
        table.row([
            num(row.r),
            row.terms.to_string(),
            num(row.tail_bound),
            num(row.h),
            num(row.alpha_integral),
            num(row.u_integral),
            num(row.ratio),
            row.bound.map(num).unwrap_or_default(),
        ])?;
    }
    let mut w = table.finish()?;
    writeln!(w, "# slope={}", num(report.slope))?;
    writeln!(w, "# u_slope={}", num(report.u_slope))?;
    w.flush()?;
    Ok(Outcome::Ok)
}

pub const DENSITY_HEADER: [&str; 3] = ["x", "weight", "density"];

/// Equilibrium measure, residual and the global transport check.
pub fn equilibrium(path: &Path, s: &Settings, out: Option<&Path>) -> Result<(Obj, Outcome)> {
    let text = read(path)?;
    let v = Potential::from_json(&text).with_context(|| format!("parsing potential {}", path.display()))?;
    let interval = v.default_interval();
    let eq = solve_equilibrium(&v, interval, s.cells)?;
    let residual = euler_lagrange_residual(&eq, &v);
    let tests = default_test_family(&eq, s.seed);
    let check = global_transport_check(&v, &eq, &tests);
    let cert = &check.certificate;
    let counterexamples = check.rows.iter().filter(|r| r.ratio.is_some_and(|x| x < cert.constant)).count();

    if let Some(p) = out {
        let mut table = Table::new(sink(Some(p))?, &DENSITY_HEADER)?;
        let width = (interval.1 - interval.0) / s.cells as f64;
        for (x, w) in eq.measure().nodes().iter().zip(eq.measure().weights()) {
            table.row([num(*x), num(*w), num(w / width)])?;
        }
        table.finish()?.flush()?;
    }

    let kind = match v.kind() {
        PotentialKind::Poly(_) => "poly",
        PotentialKind::DoubleWell { .. } => "double_well",
    };
    let (s0, s1) = eq.support();
    let rows: Vec<Obj> = check
        .rows
        .iter()
        .map(|r| {
            Obj::new()
                .text("label", &r.label)
                .opt("relative_entropy", r.relative_entropy)
                .value("w1", r.w1)
                .opt("ratio", r.ratio)
        })
        .collect();
    let transport = Obj::new()
        .value("A", cert.a)
        .value("B", cert.b)
        .value("L", cert.l)
        .value("constant", cert.constant)
        .opt("min_ratio", check.min_ratio)
        .boolean("all_above", check.all_above)
        .int("counterexamples", counterexamples as u64)
        .objects("measures", rows);
    let mut obj = Obj::new()
        .text("potential", kind)
        .numbers("interval", &[interval.0, interval.1])
        .int("cells", s.cells as u64)
        .int("iterations", eq.iterations() as u64)
        .value("optimality_gap", eq.optimality_gap())
        .value("robin_constant", eq.robin_constant())
        .numbers("support", &[s0, s1])
        .value("residual", residual)
        .object("transport", transport);
    if let PotentialKind::DoubleWell { a1, a2 } = *v.kind() {
        let demo = double_well_demo(a1, a2)?;
        let wells: Vec<Obj> = demo
            .wells
            .iter()
            .map(|w| {
                Obj::new()
                    .value("center", w.center)
                    .numbers("support", &[w.support.0, w.support.1])
                    .value("sup_hilbert_gap", w.sup_hilbert_gap)
                    .value("fisher_information", w.fisher_information)
            })
            .collect();
        obj = obj.object(
            "double_well",
            Obj::new().objects("wells", wells).value("w1_between", demo.w1_between).boolean("lsi_obstructed", demo.lsi_obstructed),
        );
    }
    Ok((obj, if counterexamples > 0 && s.diagnostic { Outcome::Violation } else { Outcome::Ok }))
}
