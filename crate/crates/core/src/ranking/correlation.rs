use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

impl CorrelationMethod {
    pub fn compute(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            CorrelationMethod::Pearson => pearson(x, y),
            CorrelationMethod::Spearman => spearman(x, y),
        }
    }
}

impl FromStr for CorrelationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(Self::Pearson),
            "spearman" => Ok(Self::Spearman),
            _ => Err(Error::InvalidSpec(format!("unknown correlation `{s}`"))),
        }
    }
}

impl fmt::Display for CorrelationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pearson => "pearson",
            Self::Spearman => "spearman",
        })
    }
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::ConfigMismatch(format!("vectors of length {} and {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateInput("correlation needs at least two points".into()));
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    let (cx, cy) = (constant(x) || sxx == 0.0, constant(y) || syy == 0.0);
    if cx || cy {
        return Err(Error::ZeroVariance(
            (if cx { "reference vector is constant" } else { "candidate vector is constant" }).into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn rank_average(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    pearson(&rank_average(x), &rank_average(y))
}

/// Kendall's τ-a: (concordant − discordant) / (n choose 2). Tied pairs
/// count as neither.
pub fn kendall_tau_a(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len();
    let mut score = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let s = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
            if x[i] != x[j] && y[i] != y[j] {
                score += s as i64;
            }
        }
    }
    Ok(score as f64 / (n * (n - 1) / 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_and_reversed() {
        let x = [0.1, 0.5, 0.3, 0.9];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let rev: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((spearman(&x, &rev).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn average_ranks() {
        assert_eq!(rank_average(&[0.9, 0.1, 0.9, 0.5]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn constant_vectors() {
        assert!(matches!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ZeroVariance(_))));
        assert!(matches!(spearman(&[1.0, 2.0], &[3.0, 3.0]), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn kendall_small() {
        assert_eq!(kendall_tau_a(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(), 1.0 / 3.0);
    }

    proptest! {
        #[test]
        fn spearman_is_rank_invariant(
            x in proptest::collection::vec(-5.0f64..5.0, 3..20),
            y in proptest::collection::vec(-5.0f64..5.0, 20),
        ) {
            let y = &y[..x.len()];
            if let Ok(base) = spearman(&x, y) {
                let warped: Vec<f64> = y.iter().map(|v| v.powi(3) + 2.0 * v).collect();
                prop_assert!((spearman(&x, &warped).unwrap() - base).abs() < 1e-12);
            }
        }

        #[test]
        fn pearson_is_affine_invariant(
            x in proptest::collection::vec(-5.0f64..5.0, 3..20),
            y in proptest::collection::vec(-5.0f64..5.0, 20),
            a in 0.1f64..10.0,
            b in -3.0f64..3.0,
        ) {
            let y = &y[..x.len()];
            if let Ok(base) = pearson(&x, y) {
                let moved: Vec<f64> = y.iter().map(|v| a * v + b).collect();
                prop_assert!((pearson(&x, &moved).unwrap() - base).abs() < 1e-9);
                prop_assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }
}
