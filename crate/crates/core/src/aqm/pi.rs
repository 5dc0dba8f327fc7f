// SPDX-License-Identifier: Apache-2.0

/// Proportional-integral controller on queuing time.
///
/// Gains are applied once per update with delays in seconds, so
/// `alpha = 0.16` moves the output by 0.0024 per update for a 15 ms error.
/// The output is clamped to [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct PiCore {
    pub target: f64,
    pub alpha: f64,
    pub beta: f64,
    p: f64,
    prevq: f64,
}

impl PiCore {
    pub fn new(target: f64, alpha: f64, beta: f64) -> Self {
        PiCore { target, alpha, beta, p: 0.0, prevq: 0.0 }
    }

    /// Feeds one queue-delay sample (seconds) and returns the new output.
    pub fn update(&mut self, curq: f64) -> f64 {
        let delta = self.alpha * (curq - self.target) + self.beta * (curq - self.prevq);
        self.p = (self.p + delta).clamp(0.0, 1.0);
        self.prevq = curq;
        self.p
    }

    pub fn probability(&self) -> f64 {
        self.p
    }

    pub fn prevq(&self) -> f64 {
        self.prevq
    }

    /// Forces the controller state; used to hold probabilities in tests and
    /// to restore snapshots.
    pub fn set_state(&mut self, p: f64, prevq: f64) {
        self.p = p.clamp(0.0, 1.0);
        self.prevq = prevq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_leaves_output() {
        let mut pi = PiCore::new(0.015, 0.16, 3.2);
        pi.set_state(0.3, 0.015);
        assert_eq!(pi.update(0.015), 0.3);
    }

    #[test]
    fn integral_step() {
        let mut pi = PiCore::new(0.015, 0.16, 3.2);
        pi.set_state(0.1, 0.030);
        let p = pi.update(0.030);
        assert!((p - 0.1024).abs() < 1e-12);
    }

    #[test]
    fn clamps() {
        let mut pi = PiCore::new(0.015, 0.16, 3.2);
        pi.set_state(0.001, 0.0);
        assert_eq!(pi.update(0.0), 0.0);
        pi.set_state(0.999, 0.0);
        assert_eq!(pi.update(1.0), 1.0);
    }
}
