use super::ScoringError;

pub const Z_95: f64 = 1.96;

/// Wilson score interval for `successes / n`, clipped to [0, 1].
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> Result<(f64, f64), ScoringError> {
    if n == 0 {
        return Err(ScoringError::EmptySample);
    }
    if successes > n {
        return Err(ScoringError::SuccessesExceedTrials { successes, n });
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        let (lo, hi) = wilson_interval(4, 10, Z_95).unwrap();
        assert!((lo - 0.1682).abs() < 1e-4 && (hi - 0.6873).abs() < 1e-3, "{lo} {hi}");
        let (lo, hi) = wilson_interval(0, 10, Z_95).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
        let (lo, hi) = wilson_interval(10, 10, Z_95).unwrap();
        assert!((lo - 0.7225).abs() < 1e-3);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn rejects_bad_counts() {
        assert!(matches!(wilson_interval(0, 0, Z_95), Err(ScoringError::EmptySample)));
        assert!(wilson_interval(3, 2, Z_95).is_err());
    }

    proptest! {
        #[test]
        fn contains_point_estimate(n in 1u64..500, frac in 0.0f64..=1.0) {
            let s = ((n as f64) * frac).floor() as u64;
            let (lo, hi) = wilson_interval(s, n, Z_95).unwrap();
            let p = s as f64 / n as f64;
            prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
        }

        #[test]
        fn narrows_as_n_grows(k in 1u64..20, s_frac in 0u64..=4) {
            // same rate s/4 at n = 4k and n = 8k
            let small = wilson_interval(s_frac * k, 4 * k, Z_95).unwrap();
            let large = wilson_interval(2 * s_frac * k, 8 * k, Z_95).unwrap();
            prop_assert!(large.1 - large.0 <= small.1 - small.0 + 1e-12);
        }
    }
}
