// SPDX-License-Identifier: Apache-2.0

//! Closed-form steady-state relations used as oracles for the simulator.

use crate::cc::VIRTUAL_RTT_FLOOR;
use crate::error::{Error, Result};

/// Reference base RTT at which the coupling equalises rates, seconds.
pub const DEFAULT_R_B_STAR: f64 = 0.025;

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Probability(p))
    }
}

/// Reno packets per second: `(1/R) * sqrt(3 / (2 p))`.
pub fn reno_rate(rtt: f64, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok((1.5 / p).sqrt() / rtt)
}

/// RTT-independence floor: `max(R, 25 ms)`.
pub fn f_rtt(rtt: f64) -> f64 {
    rtt.max(VIRTUAL_RTT_FLOOR)
}

/// Scalable packets per second: `2 / (f(R) p)`.
pub fn scalable_rate(rtt: f64, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(2.0 / (f_rtt(rtt) * p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingInputs {
    /// Multiplicative decrease factor of the Classic control.
    pub beta_c: f64,
    /// Classic queue delay target, seconds.
    pub target: f64,
    /// Base RTT at which both controls should get equal rates, seconds.
    pub r_b_star: f64,
}

impl CouplingInputs {
    pub fn new(beta_c: f64) -> Self {
        CouplingInputs { beta_c, target: 0.015, r_b_star: DEFAULT_R_B_STAR }
    }
}

/// Coupling factor `k = sqrt(8/3) * (1 + beta)/2 * (1 + target / R_b*)`.
pub fn coupling_factor(inputs: CouplingInputs) -> f64 {
    (8.0f64 / 3.0).sqrt() * (1.0 + inputs.beta_c) / 2.0 * (1.0 + inputs.target / inputs.r_b_star)
}

/// Signals per round `v = p W`.
pub fn marks_per_round(window: f64, p: f64) -> f64 {
    p * window
}

/// Relative change of signals per round when the window grows by `scale`
/// for a control with response exponent `b`: `scale^(1 - 1/b)`.
pub fn marks_per_round_scaling(scale: f64, b: f64) -> f64 {
    scale.powf(1.0 - 1.0 / b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioInputs {
    /// Base RTT of the scalable flow, seconds.
    pub rtt_l: f64,
    /// Base RTT of the Classic flow, seconds.
    pub rtt_c: f64,
    pub beta_c: f64,
    pub k: f64,
    pub target: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioPrediction {
    pub ratio: f64,
    /// The Classic RTT lies outside the range where the sawtooth-averaged
    /// RTT approximation holds.
    pub outside_validity: bool,
}

/// Longest Classic base RTT for which `R_C ≈ ((1+β)/2)(R_b + target)` holds.
pub fn validity_limit(target: f64, beta_c: f64) -> f64 {
    target * beta_c / (1.0 - beta_c)
}

/// Predicted `r_L / r_C` for one scalable and one Classic flow sharing the
/// coupled AQM. The shared base probability cancels:
/// `r_L/r_C = 2 R_C / (f(R_L) k sqrt(3/2))`.
pub fn predict_rate_ratio(inp: RatioInputs) -> RatioPrediction {
    let r_c = (1.0 + inp.beta_c) / 2.0 * (inp.rtt_c + inp.target);
    let ratio = 2.0 * r_c / (f_rtt(inp.rtt_l) * inp.k * 1.5f64.sqrt());
    RatioPrediction { ratio, outside_validity: inp.rtt_c > validity_limit(inp.target, inp.beta_c) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reno_examples() {
        assert_relative_eq!(reno_rate(0.02, 0.015).unwrap(), 500.0, max_relative = 1e-12);
        assert_relative_eq!(reno_rate(0.02, 0.375).unwrap(), 2.0 / 0.02, max_relative = 1e-12);
        let a = reno_rate(0.02, 0.01).unwrap();
        let b = reno_rate(0.04, 0.01).unwrap();
        assert_relative_eq!(a, 2.0 * b, max_relative = 1e-12);
        assert!(reno_rate(0.02, 0.0).is_err());
    }

    #[test]
    fn scalable_examples() {
        assert_relative_eq!(scalable_rate(0.01, 0.02).unwrap(), 4000.0, max_relative = 1e-12);
        assert_relative_eq!(scalable_rate(0.1, 0.2).unwrap(), 100.0, max_relative = 1e-12);
        assert_eq!(scalable_rate(0.001, 0.05).unwrap(), scalable_rate(0.025, 0.05).unwrap());
        assert!(scalable_rate(0.01, -1.0).is_err());
    }

    #[test]
    fn coupling_values() {
        assert!((coupling_factor(CouplingInputs::new(0.5)) - 1.96).abs() < 0.005);
        assert!((coupling_factor(CouplingInputs::new(0.7)) - 2.22).abs() < 0.005);
        let k0 = coupling_factor(CouplingInputs { target: 0.0, ..CouplingInputs::new(0.5) });
        assert_relative_eq!(k0, (8.0f64 / 3.0).sqrt() * 0.75, max_relative = 1e-12);
    }

    #[test]
    fn marks_examples() {
        assert_relative_eq!(marks_per_round(100.0, 0.02), 2.0, max_relative = 1e-12);
        assert_eq!(marks_per_round_scaling(4.0, 1.0), 1.0);
        assert_relative_eq!(marks_per_round_scaling(4.0, 0.5), 0.25, max_relative = 1e-12);
    }

    #[test]
    fn ratio_at_reference_rtt_is_one() {
        for beta in [0.5, 0.7] {
            let k = coupling_factor(CouplingInputs::new(beta));
            let p = predict_rate_ratio(RatioInputs { rtt_l: 0.025, rtt_c: 0.025, beta_c: beta, k, target: 0.015 });
            assert_relative_eq!(p.ratio, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn fixed_k_two_scales_inversely() {
        let k_reno = coupling_factor(CouplingInputs::new(0.5));
        let p = predict_rate_ratio(RatioInputs { rtt_l: 0.025, rtt_c: 0.025, beta_c: 0.5, k: 2.0, target: 0.015 });
        assert_relative_eq!(p.ratio, k_reno / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn long_classic_rtt_flags_validity() {
        let p = predict_rate_ratio(RatioInputs { rtt_l: 0.005, rtt_c: 0.1, beta_c: 0.5, k: 2.0, target: 0.015 });
        assert!(p.ratio > 1.0 && p.ratio.is_finite());
        assert!(p.outside_validity);
    }
}
