//! Discrete service-time laws on `{1, ..., U_S}`.
//!
//! Every law is stored as a table of support points and cumulative
//! probabilities and sampled by inverse transform with a single uniform draw.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameterized description of a service-time law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    /// Discrete Weibull with survival `iota^(k^beta)`, truncated to raw
    /// support `{0, ..., U_S - 1}` and mapped through `max(j, 1)`.
    TruncatedWeibull { iota: f64, beta: f64 },
    /// `v1` with probability `p1`, `v2` with probability `p2`.
    TwoPoint { v1: u32, p1: f64, v2: u32, p2: f64 },
    Constant { value: u32 },
}

/// Probability of raw value `j` under the truncated Weibull:
/// `(iota^(j^beta) - iota^((j+1)^beta)) / (1 - iota^(U_S^beta))`.
pub fn truncated_weibull_pmf(iota: f64, beta: f64, service_bound: u32) -> Result<Vec<f64>> {
    check_weibull(iota, beta, service_bound)?;
    let survival = |k: u32| iota.powf(f64::from(k).powf(beta));
    let norm = 1.0 - survival(service_bound);
    Ok((0..service_bound)
        .map(|j| (survival(j) - survival(j + 1)) / norm)
        .collect())
}

/// Exact mean service time `sum_j max(j, 1) P(j)` of the truncated Weibull.
pub fn exact_weibull_mean(iota: f64, beta: f64, service_bound: u32) -> Result<f64> {
    let pmf = truncated_weibull_pmf(iota, beta, service_bound)?;
    Ok(pmf
        .iter()
        .enumerate()
        .map(|(j, p)| (j.max(1) as f64) * p)
        .sum())
}

fn check_weibull(iota: f64, beta: f64, service_bound: u32) -> Result<()> {
    if !(iota > 0.0 && iota < 1.0) {
        return Err(Error::parameter(format!("weibull iota {iota} must lie in (0, 1)")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::parameter(format!("weibull beta {beta} must lie in (0, 1]")));
    }
    if service_bound < 2 {
        return Err(Error::parameter("truncated weibull needs service_bound >= 2"));
    }
    Ok(())
}

/// A finite law on positive integers, ready for inverse-transform sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLaw {
    values: Vec<u32>,
    cumulative: Vec<f64>,
    mean: f64,
}

impl DiscreteLaw {
    /// Builds a law from `(value, probability)` pairs. Probabilities must be
    /// nonnegative and sum to one within `1e-9`; duplicate values are merged.
    pub fn from_pairs(pairs: &[(u32, f64)], service_bound: u32) -> Result<Self> {
        let mut merged: Vec<(u32, f64)> = Vec::new();
        for &(v, p) in pairs {
            if v == 0 || v > service_bound {
                return Err(Error::parameter(format!(
                    "service value {v} outside [1, {service_bound}]"
                )));
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::parameter(format!("invalid probability {p}")));
            }
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some(entry) => entry.1 += p,
                None => merged.push((v, p)),
            }
        }
        merged.retain(|&(_, p)| p > 0.0);
        merged.sort_by_key(|&(v, _)| v);
        let total: f64 = merged.iter().map(|&(_, p)| p).sum();
        if merged.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(Error::parameter(format!("probabilities sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(merged.len());
        for &(_, p) in &merged {
            acc += p / total;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let mean = merged.iter().map(|&(v, p)| f64::from(v) * p / total).sum();
        Ok(Self {
            values: merged.iter().map(|&(v, _)| v).collect(),
            cumulative,
            mean,
        })
    }

    pub fn from_spec(spec: &LawSpec, service_bound: u32) -> Result<Self> {
        match *spec {
            LawSpec::TruncatedWeibull { iota, beta } => {
                let pmf = truncated_weibull_pmf(iota, beta, service_bound)?;
                let pairs: Vec<(u32, f64)> = pmf
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| ((j as u32).max(1), p))
                    .collect();
                Self::from_pairs(&pairs, service_bound)
            }
            LawSpec::TwoPoint { v1, p1, v2, p2 } => {
                Self::from_pairs(&[(v1, p1), (v2, p2)], service_bound)
            }
            LawSpec::Constant { value } => Self::from_pairs(&[(value, 1.0)], service_bound),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn support(&self) -> &[u32] {
        &self.values
    }

    pub fn probability(&self, value: u32) -> f64 {
        match self.values.iter().position(|&v| v == value) {
            Some(0) => self.cumulative[0],
            Some(k) => self.cumulative[k] - self.cumulative[k - 1],
            None => 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        if self.values.len() == 1 {
            return self.values[0];
        }
        let u: f64 = rng.gen();
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.values[k.min(self.values.len() - 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weibull_pmf_matches_closed_form_at_zero() {
        let pmf = truncated_weibull_pmf(0.5, 0.5, 100).unwrap();
        assert_relative_eq!(pmf[0], 0.5 / (1.0 - 0.5f64.powi(10)), epsilon = 1e-15);
        assert_relative_eq!(pmf[0], 0.500489, epsilon = 1e-6);
    }

    #[test]
    fn weibull_pmf_sums_to_one() {
        for &iota in &[0.01, 0.4, 0.5, 0.7, 0.8, 0.99] {
            for &beta in &[0.2, 0.5, 1.0] {
                let pmf = truncated_weibull_pmf(iota, beta, 100).unwrap();
                let total: f64 = pmf.iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "iota={iota} beta={beta}");
                assert!(pmf.iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn weibull_small_iota_is_unit_service() {
        let law = DiscreteLaw::from_spec(&LawSpec::TruncatedWeibull { iota: 1e-12, beta: 0.5 }, 100)
            .unwrap();
        assert!(law.probability(1) > 1.0 - 1e-9);
        assert!((law.mean() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weibull_rejects_bad_parameters() {
        assert!(truncated_weibull_pmf(0.0, 0.5, 100).is_err());
        assert!(truncated_weibull_pmf(1.0, 0.5, 100).is_err());
        assert!(truncated_weibull_pmf(0.5, 1.5, 100).is_err());
        assert!(truncated_weibull_pmf(0.5, 0.5, 1).is_err());
    }

    #[test]
    fn weibull_mean_is_direct_sum() {
        let mean = exact_weibull_mean(0.5, 0.5, 100).unwrap();
        let survival = |k: f64| 0.5f64.powf(k.sqrt());
        let norm = 1.0 - survival(100.0);
        let mut oracle = 0.0;
        for j in 0..100u32 {
            oracle += f64::from(j.max(1)) * (survival(j as f64) - survival(j as f64 + 1.0)) / norm;
        }
        assert_relative_eq!(mean, oracle, max_relative = 1e-12);
        let law = DiscreteLaw::from_spec(&LawSpec::TruncatedWeibull { iota: 0.5, beta: 0.5 }, 100)
            .unwrap();
        assert_relative_eq!(law.mean(), mean, max_relative = 1e-12);
    }

    #[test]
    fn constant_law() {
        let law = DiscreteLaw::from_spec(&LawSpec::Constant { value: 10 }, 100).unwrap();
        assert_eq!(law.mean(), 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| law.sample(&mut rng) == 10));
    }

    #[test]
    fn two_point_law_validation() {
        assert!(DiscreteLaw::from_pairs(&[(1, 0.5), (2, 0.4)], 10).is_err());
        assert!(DiscreteLaw::from_pairs(&[(0, 1.0)], 10).is_err());
        assert!(DiscreteLaw::from_pairs(&[(11, 1.0)], 10).is_err());
        let law = DiscreteLaw::from_spec(&LawSpec::TwoPoint { v1: 1, p1: 0.99, v2: 100, p2: 0.01 }, 100)
            .unwrap();
        assert_relative_eq!(law.mean(), 1.99, epsilon = 1e-12);
    }

    #[test]
    fn empirical_mean_within_three_standard_errors() {
        let law = DiscreteLaw::from_spec(&LawSpec::TruncatedWeibull { iota: 0.5, beta: 0.5 }, 100)
            .unwrap();
        // Oracle moments from the raw pmf, independent of the sampling table.
        let pmf = truncated_weibull_pmf(0.5, 0.5, 100).unwrap();
        let m1: f64 = pmf.iter().enumerate().map(|(j, p)| j.max(1) as f64 * p).sum();
        let m2: f64 = pmf
            .iter()
            .enumerate()
            .map(|(j, p)| (j.max(1) as f64).powi(2) * p)
            .sum();
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sum = 0.0;
        for _ in 0..n {
            let s = law.sample(&mut rng);
            assert!((1..=100).contains(&s));
            sum += f64::from(s);
        }
        let se = ((m2 - m1 * m1) / n as f64).sqrt();
        assert!((sum / n as f64 - m1).abs() < 3.0 * se);
    }

    #[test]
    fn sampling_is_reproducible() {
        let law = DiscreteLaw::from_spec(&LawSpec::TruncatedWeibull { iota: 0.7, beta: 0.5 }, 100)
            .unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..64).map(|_| law.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }
}
