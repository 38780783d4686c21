//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Lines tagged `info` are supplementary and never affect
//! the exit status.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use freeineq_core::chebyshev::{eval_phi, eval_psi, QuadratureRule};
use freeineq_core::equilibrium::{
    default_test_family, double_well_demo, euler_lagrange_residual, global_transport_check, solve_equilibrium,
    Potential,
};
use freeineq_core::experiments::{lp_explorer, pair_stats, pinsker_failure_table, random_pair, sharpness_pair, PairStats};
use freeineq_core::functionals::{e2_pairing, fisher_i_scaled, fisher_j_scaled};
use freeineq_core::operators::{apply_e, apply_l, apply_n, apply_u};
use freeineq_core::transport::{w1_dual_spectral, wasserstein_p, wasserstein_quantile};
use freeineq_core::{BetaDensity, ChebSeries};

const SEED: u64 = 20_240_601;
const PAIRS: u64 = 1000;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, pass: bool, elapsed: Duration, detail: String) {
        if !pass {
            self.failed += 1;
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:<4} {name} ({:.2}s): {detail}", elapsed.as_secs_f64());
    }

    fn info(&self, id: &str, name: &str, detail: String) {
        println!("[info] {id:<4} {name}: {detail}");
    }
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sweep() -> Vec<PairStats> {
    use rayon::prelude::*;
    (0..PAIRS)
        .into_par_iter()
        .map(|id| {
            let (mu, nu) = random_pair(SEED, id);
            pair_stats(&mu, &nu)
        })
        .collect()
}

fn operators(rep: &mut Report) {
    let start = Instant::now();
    let xs: Vec<f64> = (0..41).map(|k| -1.99 + 3.98 * k as f64 / 40.0).collect();
    let mut err: f64 = 0.0;
    for n in 1..=64usize {
        let f = ChebSeries::mode(n, 1.0);
        let (e, nn, l, u) = (apply_e(&f), apply_n(&f), apply_l(&f), apply_u(&f));
        for &x in &xs {
            let phi = eval_phi(n, x).unwrap();
            let psi = eval_psi(n - 1, x).unwrap();
            let nf = n as f64;
            err = err
                .max((e.eval(x) - phi / nf).abs())
                .max((nn.eval(x) - nf * phi).abs() / nf)
                .max((l.eval(x) - apply_n(&nn).eval(x)).abs() / (nf * nf))
                .max((u.eval(x) - 0.5 * psi).abs() / nf);
        }
    }
    let beta = QuadratureRule::beta(80);
    let alpha = QuadratureRule::alpha(80);
    let mut pair_err: f64 = 0.0;
    for id in 0..50 {
        let (mu, nu) = random_pair(SEED + 1, id);
        let (f, g) = (mu.density(), nu.density());
        let lf = apply_l(f);
        let ibp_l = beta.integrate(|x| lf.eval(x) * g.eval(x));
        let (df, dg) = (f.derivative(), g.derivative());
        let ibp_r = 2.0 * alpha.integrate(|x| df.eval(x) * dg.eval(x));
        let uf = apply_u(f);
        let iso_l = alpha.integrate(|x| uf.eval(x).powi(2));
        let mean = beta.integrate(|x| f.eval(x));
        let iso_r = 0.5 * beta.integrate(|x| (f.eval(x) - mean).powi(2));
        pair_err = pair_err.max((ibp_l - ibp_r).abs() / ibp_l.abs().max(1.0)).max((iso_l - iso_r).abs());
    }
    let elapsed = start.elapsed();
    let pass = err < 1e-12 && pair_err < 1e-10 && elapsed < Duration::from_secs(5);
    rep.line(
        "C1",
        "operator suite",
        pass,
        elapsed,
        format!("modal error {err:.2e} (tol 1e-12), pair identities {pair_err:.2e} (tol 1e-10)"),
    );
}

fn transport(rep: &mut Report, stats: &[PairStats], sweep_time: Duration) {
    let start = Instant::now();
    let violations = stats.iter().filter(|s| s.slack_transport < -1e-9).count();
    let worst = stats.iter().map(|s| s.slack_transport).fold(f64::INFINITY, f64::min);
    let sharp: Vec<f64> = [0.1, 0.3, 0.5]
        .iter()
        .map(|&c| {
            let (mu, nu) = sharpness_pair(c).unwrap();
            let s = pair_stats(&mu, &nu);
            s.w1 * s.w1 - 2.0 * s.h
        })
        .collect();
    let elapsed = start.elapsed() + sweep_time;
    let pass = violations == 0 && max_abs(sharp.iter().copied()) < 1e-8 && elapsed < Duration::from_secs(60);
    rep.line(
        "C2",
        "transportation W1^2 <= 2H",
        pass,
        elapsed,
        format!(
            "{violations} violations in {PAIRS} pairs (min slack {worst:.3e}), sharpness |W1^2-2H| = {:.2e}",
            max_abs(sharp)
        ),
    );
}

fn log_sobolev(rep: &mut Report, stats: &[PairStats]) {
    let start = Instant::now();
    let j_err = max_abs(stats.iter().map(|s| s.j - 2.0 * s.i));
    let lsi_viol = stats.iter().filter(|s| s.slack_lsi < -1e-9).count();
    let mut literal: f64 = 0.0;
    let mut corrected: f64 = 0.0;
    for l in [0.5, 2.0, 5.0] {
        for id in 0..50 {
            let (mu, nu) = random_pair(SEED, id);
            let (a, b) = (mu.rescale(l).unwrap(), nu.rescale(l).unwrap());
            let i_l = fisher_i_scaled(&a, &b).unwrap();
            let j_l = fisher_j_scaled(&a, &b).unwrap();
            literal = literal.max((j_l - 2.0 * l * l * i_l).abs());
            corrected = corrected.max((l * l * j_l - 2.0 * i_l).abs());
        }
    }
    let elapsed = start.elapsed();
    rep.line(
        "C3a",
        "log-Sobolev J = 2I and 2H <= J",
        j_err < 1e-10 && lsi_viol == 0,
        elapsed,
        format!("max |J-2I| = {j_err:.2e}, {lsi_viol} violations of 2H <= J"),
    );
    rep.line(
        "C3b",
        "scaled identity J = 2L^2 I_L (as stated)",
        literal < 1e-9,
        elapsed,
        format!("max |J_L - 2L^2 I_L| = {literal:.3e} over L in {{0.5, 2, 5}}"),
    );
    rep.info("C3b", "scaled identity L^2 J_L = 2 I_L", format!("max deviation {corrected:.2e}"));
}

fn hwi(rep: &mut Report, stats: &[PairStats]) {
    let start = Instant::now();
    let violations = stats.iter().filter(|s| s.slack_hwi < -1e-9).count();
    let worst = stats.iter().map(|s| s.slack_hwi).fold(f64::INFINITY, f64::min);
    let sharp = max_abs([0.1, 0.3, 0.5].iter().map(|&c| {
        let (mu, nu) = sharpness_pair(c).unwrap();
        pair_stats(&mu, &nu).slack_hwi
    }));
    let elapsed = start.elapsed();
    rep.line(
        "C4",
        "HWI slack",
        violations == 0 && sharp < 1e-8,
        elapsed,
        format!("{violations} violations in {PAIRS} pairs (min slack {worst:.3e}), equality-case slack {sharp:.2e}"),
    );
    // the same pair family with a pure second mode
    let mu = BetaDensity::from_coeffs(vec![1.0, 0.0, 0.4]).unwrap();
    let s = pair_stats(&mu, &BetaDensity::arcsine());
    rep.info("C4", "slack at psi = 0.4 phi_2", format!("{:.6e}", s.slack_hwi));
}

fn closed_forms(rep: &mut Report) {
    let start = Instant::now();
    let (r, eta) = (0.5, 0.1);
    let row = lp_explorer(2.0, &[r], eta).unwrap().rows[0];
    let oracle = common::log_energy_oracle(common::geometric_density(r, eta), 64);
    let h_err = (row.h - oracle).abs();
    let parseval = (row.alpha_integral - eta * eta / (1.0 - r * r)).abs();
    rep.line(
        "C5a",
        "geometric H vs double quadrature",
        h_err < 1e-6,
        start.elapsed(),
        format!("spectral {:.12e}, oracle {oracle:.12e}, diff {h_err:.2e}", row.h),
    );
    rep.line(
        "C5b",
        "Parseval for the geometric family",
        parseval < 1e-10,
        start.elapsed(),
        format!("|alpha-integral - eta^2/(1-r^2)| = {parseval:.2e}"),
    );

    let t = Instant::now();
    let rs = [0.9, 0.99, 0.999, 0.9999];
    let rep15 = lp_explorer(1.5, &rs, 1.0).unwrap();
    rep.line(
        "C5c",
        "p = 1.5 slope against -log(1-r)",
        (rep15.slope - 0.25).abs() <= 0.0125,
        t.elapsed(),
        format!("slope {:.6} (target 0.25 +- 5%)", rep15.slope),
    );
    rep.info("C5c", "slope of the u-integral", format!("{:.6}", rep15.u_slope));

    let t = Instant::now();
    let rs14 = [0.5, 0.9, 0.99, 0.999, 0.9999];
    let rep14 = lp_explorer(1.4, &rs14, 1.0).unwrap();
    let below = rep14.rows.iter().all(|row| row.alpha_integral <= row.bound.unwrap());
    let ratios: Vec<f64> = rep14.rows.iter().map(|row| row.ratio).collect();
    let monotone = ratios.windows(2).all(|w| w[1] > w[0]);
    let growth = ratios.last().unwrap() / ratios[0];
    let elapsed = start.elapsed();
    rep.line(
        "C5d",
        "p = 1.4 integral below the explicit bound",
        below && elapsed < Duration::from_secs(120),
        t.elapsed(),
        format!(
            "integrals {:?} vs bounds {:?}",
            rep14.rows.iter().map(|r| format!("{:.4}", r.alpha_integral)).collect::<Vec<_>>(),
            rep14.rows.iter().map(|r| format!("{:.4}", r.bound.unwrap())).collect::<Vec<_>>()
        ),
    );
    rep.line(
        "C5e",
        "p = 1.4 ratio grows >= 10x",
        monotone && growth >= 10.0,
        t.elapsed(),
        format!("ratios {ratios:.4?}, monotone {monotone}, growth {growth:.3}x"),
    );
}

fn pinsker(rep: &mut Report) {
    let start = Instant::now();
    let c = 0.7;
    let rows = pinsker_failure_table(32, c).unwrap();
    let tv_err = max_abs(rows.iter().map(|r| r.tv - 2.0 * c / PI));
    let ratio_err = max_abs(rows.iter().map(|r| r.ratio - r.predicted));
    rep.line(
        "C6",
        "Pinsker failure",
        tv_err < 1e-8 && ratio_err < 1e-10,
        start.elapsed(),
        format!("max |TV - 2|c|/pi| = {tv_err:.2e}, max |H/TV^2 - pi^2/(8n)| = {ratio_err:.2e}"),
    );
}

fn equilibrium(rep: &mut Report) -> (Potential, freeineq_core::EquilibriumResult) {
    let start = Instant::now();
    let v = Potential::quadratic();
    let eq = solve_equilibrium(&v, v.default_interval(), 2000).expect("solver converges");
    let w1 = wasserstein_p(eq.measure(), &BetaDensity::semicircle(), 1.0).unwrap();
    let k = eq.robin_constant();
    let res = euler_lagrange_residual(&eq, &v);
    let dw = double_well_demo(-3.0, 3.0).unwrap();
    let dw_sup = dw.wells.iter().map(|w| w.sup_hilbert_gap).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let pass = w1 < 1e-2 && (k - 1.0).abs() <= 1e-2 && res < 5e-3 && dw_sup < 1e-6 && elapsed < Duration::from_secs(600);
    rep.line(
        "C7",
        "equilibrium of x^2/2 and double well",
        pass,
        elapsed,
        format!(
            "W1 to semicircle {w1:.2e}, K_V {k:.6}, residual {res:.2e}, {} iterations, double-well sup gap {dw_sup:.2e}",
            eq.iterations()
        ),
    );
    (v, eq)
}

fn global_transport(rep: &mut Report, v: &Potential, eq: &freeineq_core::EquilibriumResult) {
    let start = Instant::now();
    let tests = default_test_family(eq, SEED);
    let report = global_transport_check(v, eq, &tests);
    let cert = &report.certificate;
    let checked = report.rows.iter().filter(|r| r.ratio.is_some()).count();
    let counterexamples = report.rows.iter().filter(|r| r.ratio.is_some_and(|x| x < cert.constant)).count();
    rep.line(
        "C8",
        "global transportation constant",
        report.all_above && counterexamples == 0 && checked > 0,
        start.elapsed(),
        format!(
            "A = {}, L = {:.4}, C = {:.6e}, min ratio {:.6e} over {checked} measures, {counterexamples} counterexamples",
            cert.a,
            cert.l,
            cert.constant,
            report.min_ratio.unwrap_or(f64::NAN)
        ),
    );
}

fn dual_formula(rep: &mut Report) {
    let start = Instant::now();
    let mut err: f64 = 0.0;
    for id in 0..200 {
        let (mu, nu) = random_pair(SEED + 2, id);
        let dual = w1_dual_spectral(&mu.difference(&nu)).unwrap();
        let quant = wasserstein_quantile(&mu, &nu, 1.0).unwrap();
        err = err.max((dual - quant).abs());
    }
    let g2 = 0.4;
    let mu = BetaDensity::from_coeffs(vec![1.0, 0.0, g2]).unwrap();
    let nu = BetaDensity::arcsine();
    let w1 = wasserstein_quantile(&mu, &nu, 1.0).unwrap() / g2;
    let e2 = e2_pairing(&mu.difference(&nu)).sqrt() / g2;
    let pass = err < 1e-6 && (w1 - 4.0 / (3.0 * PI)).abs() < 1e-6 && (e2 - 0.5).abs() < 1e-12;
    rep.line(
        "C9",
        "dual formula and second-mode gap",
        pass,
        start.elapsed(),
        format!("max |dual - quantile| = {err:.2e}, W1/|g2| = {w1:.10} (4/(3pi) = {:.10}), sqrt(2<E^2psi,psi>)/|g2| = {e2:.10}", 4.0 / (3.0 * PI)),
    );
}

fn main() {
    let mut rep = Report { failed: 0 };
    operators(&mut rep);
    let t = Instant::now();
    let stats = sweep();
    let sweep_time = t.elapsed();
    transport(&mut rep, &stats, sweep_time);
    log_sobolev(&mut rep, &stats);
    hwi(&mut rep, &stats);
    closed_forms(&mut rep);
    pinsker(&mut rep);
    let (v, eq) = equilibrium(&mut rep);
    global_transport(&mut rep, &v, &eq);
    dual_formula(&mut rep);
    println!("acceptance: {} criterion line(s) failed", rep.failed);
    if rep.failed > 0 {
        std::process::exit(1);
    }
}
