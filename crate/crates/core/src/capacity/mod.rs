//! Stationary capacity region and traffic slackness.
//!
//! For arrival rates `lambda` and service rates `mu`, the slackness is
//!
//! ```text
//! max delta  s.t.  sum_i alpha_ij <= 1            for every server j
//!                  sum_j alpha_ij mu_ij >= lambda_i + delta   for every type i
//!                  alpha >= 0
//! ```
//!
//! The program is solved directly with `delta` as a decision variable. It is
//! shifted by `max_i lambda_i` so that the zero allocation is a feasible
//! starting vertex even for overloaded instances.

pub mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Feasibility slack allowed in the post-solve check.
const CHECK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Slackness {
    pub delta: f64,
    pub alpha: Matrix<f64>,
}

fn validate(lambda: &[f64], mu: &Matrix<f64>) -> Result<()> {
    if lambda.len() != mu.rows() {
        return Err(Error::dimension(format!(
            "{} arrival rates for a {}x{} rate matrix",
            lambda.len(),
            mu.rows(),
            mu.cols()
        )));
    }
    if mu.rows() == 0 || mu.cols() == 0 {
        return Err(Error::dimension("empty rate matrix"));
    }
    if lambda.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
        return Err(Error::parameter("arrival rates must be finite and non-negative"));
    }
    if mu.as_slice().iter().any(|&m| !(m > 0.0 && m <= 1.0)) {
        return Err(Error::parameter("service rates must lie in (0, 1]"));
    }
    Ok(())
}

/// Smallest margin `min_i (sum_j alpha_ij mu_ij - lambda_i)` achieved by an
/// allocation.
pub fn achieved_slackness(lambda: &[f64], mu: &Matrix<f64>, alpha: &Matrix<f64>) -> f64 {
    (0..mu.rows())
        .map(|i| (0..mu.cols()).map(|j| alpha[(i, j)] * mu[(i, j)]).sum::<f64>() - lambda[i])
        .fold(f64::INFINITY, f64::min)
}

pub fn max_slackness(lambda: &[f64], mu: &Matrix<f64>) -> Result<Slackness> {
    validate(lambda, mu)?;
    let (ni, nj) = mu.shape();
    let shift = lambda.iter().copied().fold(0.0, f64::max);
    let nvar = ni * nj + 1;
    let delta_col = ni * nj;

    let mut a = Vec::with_capacity(nj + ni);
    let mut b = Vec::with_capacity(nj + ni);
    for j in 0..nj {
        let mut row = vec![0.0; nvar];
        for i in 0..ni {
            row[i * nj + j] = 1.0;
        }
        a.push(row);
        b.push(1.0);
    }
    for i in 0..ni {
        let mut row = vec![0.0; nvar];
        for j in 0..nj {
            row[i * nj + j] = -mu[(i, j)];
        }
        row[delta_col] = 1.0;
        a.push(row);
        b.push(shift - lambda[i]);
    }
    let mut c = vec![0.0; nvar];
    c[delta_col] = 1.0;

    let sol = simplex::maximize(&c, &a, &b)?;
    let delta = sol.value - shift;
    let alpha = Matrix::from_fn(ni, nj, |i, j| sol.x[i * nj + j].max(0.0));

    for j in 0..nj {
        let load: f64 = alpha.column(j).sum();
        if load > 1.0 + CHECK_TOL {
            return Err(Error::contract(format!("server {j} over-allocated ({load})")));
        }
    }
    let achieved = achieved_slackness(lambda, mu, &alpha);
    if (achieved - delta).abs() > CHECK_TOL {
        return Err(Error::contract(format!(
            "allocation attains {achieved}, solver reported {delta}"
        )));
    }
    Ok(Slackness { delta, alpha })
}

/// Scales `direction` by `c >= 0` so that the slackness of `c * direction`
/// equals `target` within `1e-4`.
pub fn scale_to_slackness(direction: &[f64], mu: &Matrix<f64>, target: f64) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-4;
    validate(direction, mu)?;
    let at = |c: f64| -> Result<f64> {
        let lambda: Vec<f64> = direction.iter().map(|&d| c * d).collect();
        Ok(max_slackness(&lambda, mu)?.delta)
    };
    let scaled = |c: f64| direction.iter().map(|&d| c * d).collect::<Vec<f64>>();

    let ceiling = at(0.0)?;
    if target > ceiling + TOL {
        return Err(Error::Infeasible(format!(
            "target slackness {target} exceeds {ceiling}, the value with no traffic"
        )));
    }
    if (target - ceiling).abs() <= TOL {
        return Ok(scaled(0.0));
    }
    if direction.iter().all(|&d| d == 0.0) {
        return Err(Error::Infeasible("zero direction cannot reach the target".into()));
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    while at(hi)? > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Infeasible(format!("target slackness {target} unreachable")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let d = at(mid)?;
        if (d - target).abs() <= TOL * 1e-3 {
            return Ok(scaled(mid));
        }
        if d > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    if (at(c)? - target).abs() > TOL {
        return Err(Error::Infeasible(format!("bisection did not reach {target}")));
    }
    Ok(scaled(c))
}
