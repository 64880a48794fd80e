//! Dense tableau simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The origin is always feasible under `b >= 0`, so a single phase starting
//! from the slack basis suffices. Bland's rule rules out cycling.

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = b.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::dimension("constraint matrix does not match c and b"));
    }
    if b.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::parameter("right-hand side must be finite and non-negative"));
    }

    // Row k < m: constraint k over n structural + m slack columns, then rhs.
    // Row m: objective row holding -c (reduced costs).
    let width = n + m + 1;
    let mut tab = vec![vec![0.0; width]; m + 1];
    for k in 0..m {
        tab[k][..n].copy_from_slice(&a[k]);
        tab[k][n + k] = 1.0;
        tab[k][width - 1] = b[k];
    }
    for (col, &cj) in c.iter().enumerate() {
        tab[m][col] = -cj;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_iter = 50 * (n + m + 1);
    for _ in 0..max_iter {
        let Some(enter) = (0..n + m).find(|&col| tab[m][col] < -PIVOT_TOL) else {
            let mut x = vec![0.0; n];
            for (k, &var) in basis.iter().enumerate() {
                if var < n {
                    x[var] = tab[k][width - 1];
                }
            }
            return Ok(LpSolution {
                value: tab[m][width - 1],
                x,
            });
        };

        let mut leave: Option<(usize, f64)> = None;
        for k in 0..m {
            let coef = tab[k][enter];
            if coef > PIVOT_TOL {
                let ratio = tab[k][width - 1] / coef;
                let better = match leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < best_ratio - PIVOT_TOL
                            || (ratio <= best_ratio + PIVOT_TOL && basis[k] < basis[best])
                    }
                };
                if better {
                    leave = Some((k, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Infeasible("linear program is unbounded".into()));
        };

        let pivot = tab[row][enter];
        for v in tab[row].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = tab[row].clone();
        for (k, r) in tab.iter_mut().enumerate() {
            if k == row {
                continue;
            }
            let factor = r[enter];
            if factor != 0.0 {
                for (v, p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        basis[row] = enter;
    }
    Err(Error::Infeasible("simplex iteration limit reached".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_instance() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36.
        let sol = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((sol.value - 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_instance_terminates() {
        // Klee-Minty style cube in 3 dimensions plus a redundant degenerate row.
        let a = vec![
            vec![1.0, 0.0, 0.0],
            vec![4.0, 1.0, 0.0],
            vec![8.0, 4.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ];
        let sol = maximize(&[4.0, 2.0, 1.0], &a, &[5.0, 25.0, 125.0, 0.0]).unwrap();
        assert!((sol.value - 125.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_is_reported() {
        assert!(matches!(
            maximize(&[1.0, 1.0], &[vec![1.0, -1.0]], &[1.0]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn negative_rhs_is_rejected() {
        assert!(maximize(&[1.0], &[vec![1.0]], &[-1.0]).is_err());
    }
}
