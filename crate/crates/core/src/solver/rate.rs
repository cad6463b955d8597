use thiserror::Error;

use super::Trajectory;

pub const MIN_TAIL_SAMPLES: usize = 10;

/// The tail must shrink the residual by at least this factor to count as decaying.
const MIN_TAIL_DECAY: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("only {0} usable samples in the tail, need {MIN_TAIL_SAMPLES}")]
    TooFewSamples(usize),
    #[error("non-decaying tail")]
    NonDecayingTail,
}

/// Decay rate `lambda` of `residual ~ c exp(-lambda t)`, by least squares on
/// `ln residual` over the second half of the trajectory's time span.
pub fn estimate_rate(trajectory: &Trajectory) -> Result<f64, RateError> {
    let (Some(&t0), Some(&t1)) = (trajectory.times.first(), trajectory.times.last()) else {
        return Err(RateError::TooFewSamples(0));
    };
    let start = 0.5 * (t0 + t1);
    let tail: Vec<(f64, f64)> = trajectory
        .times
        .iter()
        .zip(&trajectory.residuals)
        .filter(|(&t, &r)| t >= start && r > 0.0 && r.is_finite())
        .map(|(&t, &r)| (t, r.ln()))
        .collect();
    if tail.len() < MIN_TAIL_SAMPLES {
        return Err(RateError::TooFewSamples(tail.len()));
    }
    let m = tail.len() as f64;
    let mean_t = tail.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = tail.iter().map(|p| p.1).sum::<f64>() / m;
    let (sxy, sxx) = tail.iter().fold((0.0, 0.0), |(sxy, sxx), &(t, y)| {
        let dt = t - mean_t;
        (sxy + dt * (y - mean_y), sxx + dt * dt)
    });
    if sxx == 0.0 {
        return Err(RateError::TooFewSamples(1));
    }
    let slope = sxy / sxx;
    let drop = tail[0].1 - tail[tail.len() - 1].1;
    if !(slope < 0.0) || drop < MIN_TAIL_DECAY.ln() {
        return Err(RateError::NonDecayingTail);
    }
    Ok(-slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::KVector;

    fn synthetic(times: &[f64], f: impl Fn(f64) -> f64) -> Trajectory {
        Trajectory {
            times: times.to_vec(),
            states: times.iter().map(|_| KVector::zeros(1)).collect(),
            residuals: times.iter().map(|&t| f(t)).collect(),
            energies: vec![0.0; times.len()],
        }
    }

    #[test]
    fn exact_exponential() {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let lambda = 0.8377;
        let rate = estimate_rate(&synthetic(&times, |t| 3.0 * (-lambda * t).exp())).unwrap();
        assert!((rate - lambda).abs() < 1e-10);
    }

    #[test]
    fn flat_tail_rejected() {
        let times: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let err = estimate_rate(&synthetic(&times, |t| 0.5 + 1.0 / (1.0 + t))).unwrap_err();
        assert_eq!(err, RateError::NonDecayingTail);
        assert_eq!(err.to_string(), "non-decaying tail");
    }

    #[test]
    fn short_trajectory_rejected() {
        let times = [0.0, 1.0, 2.0];
        assert!(matches!(
            estimate_rate(&synthetic(&times, |t| (-t).exp())),
            Err(RateError::TooFewSamples(_))
        ));
    }
}
