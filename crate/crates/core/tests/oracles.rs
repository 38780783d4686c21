mod common;

use std::f64::consts::PI;

use freeineq_core::experiments::random_pair;
use freeineq_core::functionals::entropy_h_diff;
use freeineq_core::operators::{apply_e, hilbert_difference, semigroup};
use freeineq_core::SignedDifference;

fn sample_difference(id: u64, max_degree: usize) -> SignedDifference {
    let (mu, nu) = random_pair(17, id);
    let d = mu.difference(&nu);
    let keep: Vec<f64> = d.series().coeffs().iter().take(max_degree + 1).skip(1).copied().collect();
    SignedDifference::from_tail(&keep)
}

#[test]
fn entropy_matches_double_quadrature() {
    for id in 0..4 {
        let d = sample_difference(id, 8);
        let s = d.series().clone();
        let oracle = common::log_energy_oracle(|t| s.eval_theta(t), 48);
        let spectral = entropy_h_diff(&d);
        assert!((oracle - spectral).abs() < 1e-7, "sample {id}: {oracle} vs {spectral}");
    }
}

#[test]
fn geometric_entropy_matches_double_quadrature() {
    let (r, eta) = (0.5, 0.1);
    let oracle = common::log_energy_oracle(common::geometric_density(r, eta), 64);
    let closed = -(eta * eta) / (2.0 * r * r) * (1.0 - r * r).ln();
    assert!((oracle - closed).abs() < 1e-8, "{oracle} vs {closed}");
}

#[test]
fn hilbert_matches_principal_value() {
    for id in 0..4 {
        let d = sample_difference(id, 12);
        let s = d.series().clone();
        let h = hilbert_difference(&d);
        for k in 1..20 {
            let theta = PI * k as f64 / 20.0 + 0.013;
            let oracle = common::hilbert_oracle(|t| s.eval_theta(t), theta);
            let spectral = h.eval(2.0 * theta.cos());
            assert!((oracle - spectral).abs() < 1e-9, "θ = {theta}: {oracle} vs {spectral}");
        }
    }
}

#[test]
fn energy_operator_is_log_potential() {
    let d = sample_difference(5, 10);
    let s = d.series().clone();
    let e = apply_e(&s);
    for x in [-1.9, -1.2, -0.3, 0.0, 0.71, 1.5, 1.99] {
        let oracle = common::log_potential_oracle(|t| s.eval_theta(t), x);
        assert!((oracle - e.eval(x)).abs() < 1e-9, "x = {x}: {oracle} vs {}", e.eval(x));
    }
}

#[test]
fn semigroup_is_poisson_smoothing() {
    let d = sample_difference(6, 16);
    let s = d.series().clone();
    for t in [0.1, 0.5, 2.0] {
        let damped = semigroup(&s, t).unwrap();
        for k in 0..9 {
            let theta = PI * k as f64 / 8.0;
            let oracle = common::poisson_oracle(|p| s.eval_theta(p), t, theta);
            assert!((oracle - damped.eval_theta(theta)).abs() < 1e-10);
        }
    }
}
