//! Fixtures shared by the integration tests.

#![allow(dead_code)]

use ringflow::model_family::inner_radius;
use ringflow::solver::{solve_poisson, Field, FourierSeries, RingDomain, SolveOptions};

/// Model core radii resolved to spectral accuracy at `n_r = 64`.
pub const MODEL_RADII: [f64; 5] = [0.4, 0.5, 0.6, 0.7, 0.8];

/// Exact annulus whose model solution has core radius `r`.
pub fn model_domain(r: f64) -> RingDomain {
    RingDomain::annulus(inner_radius(r).unwrap()).unwrap()
}

pub fn solve(domain: &RingDomain, n_theta: usize, n_r: usize) -> Field {
    solve_poisson(domain, &SolveOptions::new(n_theta, n_r)).unwrap()
}

pub fn model_field(r: f64, n_theta: usize, n_r: usize) -> Field {
    solve(&model_domain(r), n_theta, n_r)
}

/// The three fixed non-symmetric test domains.
pub fn perturbed_domains() -> Vec<(&'static str, RingDomain)> {
    vec![
        (
            "lambda=0.3, v1=0.02cos2",
            RingDomain::new(0.3, FourierSeries::cosine(2, 0.02), FourierSeries::zero()).unwrap(),
        ),
        (
            "lambda=r_i(0.5), v2=0.01cos3",
            RingDomain::new(inner_radius(0.5).unwrap(), FourierSeries::zero(), FourierSeries::cosine(3, 0.01))
                .unwrap(),
        ),
        (
            "lambda=0.4, v1=0.01cos2+0.005sin3, v2=0.01cos4",
            RingDomain::new(
                0.4,
                FourierSeries::cosine(2, 0.01).plus(&FourierSeries::sine(3, 0.005)),
                FourierSeries::cosine(4, 0.01),
            )
            .unwrap(),
        ),
    ]
}
