//! Gapped spin chain whose non-local observable is unstable: measured in the
//! perturbed ground state it evaluates to `(1 + δ²)^{-n/2}` instead of 1.

use serde::{Deserialize, Serialize};

use super::{ExperimentRecord, SweepOutput};

pub const EXPERIMENT: &str = "nonlocal";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlocalSweep {
    pub n_sites: Vec<usize>,
    pub deltas: Vec<f64>,
}

/// `(1 + δ²)^{-n/2}`.
pub fn perturbed_value(delta: f64, n: usize) -> f64 {
    (1.0 + delta * delta).powf(-(n as f64) / 2.0)
}

impl NonlocalSweep {
    pub fn run(&self) -> SweepOutput {
        let records = self
            .n_sites
            .iter()
            .flat_map(|&n| {
                self.deltas.iter().map(move |&d| {
                    ExperimentRecord::new(EXPERIMENT, n, d, 0, perturbed_value(d, n), 1.0)
                })
            })
            .collect();
        SweepOutput {
            records,
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form() {
        assert_eq!(perturbed_value(0.0, 1000), 1.0);
        assert_eq!(perturbed_value(0.1, 1000), 1.01f64.powf(-500.0));
        assert!((perturbed_value(0.5, 4) - 1.0 / 1.5625).abs() < 1e-15);
    }

    #[test]
    fn error_grows_with_n_and_vanishes_with_delta() {
        let out = NonlocalSweep {
            n_sites: vec![10, 10_000],
            deltas: vec![0.0, 1e-4, 0.1],
        }
        .run();
        let err = |n, d| {
            out.records
                .iter()
                .find(|r| r.n_sites == n && r.delta == d)
                .unwrap()
                .abs_error
        };
        assert_eq!(err(10, 0.0), 0.0);
        assert!(err(10_000, 0.1) > 0.999_999);
        assert!(err(10, 1e-4) < 1e-7);
        assert!(err(10, 0.1) < err(10_000, 0.1));
    }
}
