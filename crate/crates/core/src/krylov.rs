//! Right-preconditioned BiCGSTAB with restarts on breakdown.

use crate::error::{Error, Result};
use crate::grid::ScalarField;

pub trait LinearOperator {
    fn apply(&mut self, x: &[f64], y: &mut [f64]);
}

impl<F: FnMut(&[f64], &mut [f64])> LinearOperator for F {
    fn apply(&mut self, x: &[f64], y: &mut [f64]) {
        self(x, y)
    }
}

pub trait Preconditioner {
    fn apply(&mut self, r: &[f64], z: &mut [f64]);
}

pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

#[derive(Clone, Debug)]
pub struct KrylovOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `||b - A x|| / ||b||`, recomputed from the returned solution
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn nrm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn true_residual(op: &mut dyn LinearOperator, b: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    nrm(r)
}

const MAX_RESTARTS: usize = 20;

/// Solves `A x = b` to relative residual `tol`.  A zero right-hand side
/// returns exactly zero.
pub fn bicgstab(
    op: &mut dyn LinearOperator,
    pc: &mut dyn Preconditioner,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    maxit: usize,
) -> Result<KrylovOutcome> {
    let n = b.len();
    let bnorm = nrm(b);
    if bnorm == 0.0 {
        return Ok(KrylovOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut x = match x0 {
        Some(g) => g.to_vec(),
        None => vec![0.0; n],
    };
    let mut r = vec![0.0; n];
    let mut rnorm = true_residual(op, b, &x, &mut r);
    if rnorm <= tol * bnorm {
        return Ok(KrylovOutcome {
            solution: x,
            iterations: 0,
            residual: rnorm / bnorm,
        });
    }
    let mut rhat = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut restarts = 0;
    let mut it = 0;

    while it < maxit {
        let rho_new = dot(&rhat, &r);
        let breakdown = rho_new.abs() <= 1e-30 * rnorm * nrm(&rhat) || omega == 0.0;
        if breakdown {
            if restarts == MAX_RESTARTS {
                break;
            }
            restarts += 1;
            rnorm = true_residual(op, b, &x, &mut r);
            rhat.copy_from_slice(&r);
            p.iter_mut().for_each(|v| *v = 0.0);
            v.iter_mut().for_each(|v| *v = 0.0);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            continue;
        }
        it += 1;
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        pc.apply(&p, &mut phat);
        op.apply(&phat, &mut v);
        let rv = dot(&rhat, &v);
        if rv == 0.0 || !rv.is_finite() {
            omega = 0.0;
            continue;
        }
        alpha = rho / rv;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        let snorm = nrm(&s);
        if snorm <= tol * bnorm {
            for k in 0..n {
                x[k] += alpha * phat[k];
            }
            rnorm = snorm;
            break;
        }
        pc.apply(&s, &mut shat);
        op.apply(&shat, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for k in 0..n {
            x[k] += alpha * phat[k] + omega * shat[k];
            r[k] = s[k] - omega * t[k];
        }
        rnorm = nrm(&r);
        if rnorm <= tol * bnorm {
            break;
        }
    }

    let final_res = true_residual(op, b, &x, &mut r) / bnorm;
    // the recursive residual can drift from the true one by roundoff
    let converged = final_res <= tol || (rnorm <= tol * bnorm && final_res <= 100.0 * tol);
    if !converged {
        return Err(Error::Solver {
            iterations: it,
            residual: final_res,
        });
    }
    Ok(KrylovOutcome {
        solution: x,
        iterations: it,
        residual: final_res,
    })
}

/// Unpreconditioned solve of a substep system given as an operator on
/// nodal values.  Returns the solution, iteration count and relative
/// residual.
pub fn solve_substep_linear(
    op: &mut dyn LinearOperator,
    rhs: &ScalarField,
    tol: f64,
    maxit: usize,
) -> Result<(ScalarField, usize, f64)> {
    let out = bicgstab(op, &mut Identity, &rhs.values, None, tol, maxit)?;
    Ok((ScalarField::from_values(rhs.grid, out.solution)?, out.iterations, out.residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    #[test]
    fn identity_in_one_step() {
        let g = Grid2D::unit(5).unwrap();
        let rhs = ScalarField::from_fn(g, |x, y| x - 2.0 * y);
        let mut id = |x: &[f64], y: &mut [f64]| y.copy_from_slice(x);
        let (u, its, res) = solve_substep_linear(&mut id, &rhs, 1e-12, 10).unwrap();
        assert!(its <= 1);
        assert!(res <= 1e-12);
        assert_eq!(u.values, rhs.values);
    }

    #[test]
    fn nonsymmetric_system() {
        let n = 30;
        let mut op = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                y[i] = 4.0 * x[i] - if i > 0 { 1.5 * x[i - 1] } else { 0.0 } - if i + 1 < n { 0.5 * x[i + 1] } else { 0.0 };
            }
        };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let out = bicgstab(&mut op, &mut Identity, &b, None, 1e-12, 200).unwrap();
        let mut y = vec![0.0; n];
        op(&out.solution, &mut y);
        let err: f64 = y.iter().zip(&b).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-12 * nrm(&b) * 10.0);
    }

    #[test]
    fn zero_rhs_is_exact_zero() {
        let mut op = |x: &[f64], y: &mut [f64]| y.copy_from_slice(x);
        let out = bicgstab(&mut op, &mut Identity, &[0.0; 4], Some(&[1.0; 4]), 1e-10, 5).unwrap();
        assert_eq!(out.solution, vec![0.0; 4]);
    }

    #[test]
    fn reports_non_convergence() {
        let mut op = |x: &[f64], y: &mut [f64]| {
            for (i, (a, b)) in x.iter().zip(y.iter_mut()).enumerate() {
                *b = a * (1.0 + i as f64 * 1e3);
            }
        };
        let b: Vec<f64> = (0..50).map(|i| 1.0 + i as f64).collect();
        assert!(matches!(
            bicgstab(&mut op, &mut Identity, &b, None, 1e-14, 2),
            Err(Error::Solver { .. })
        ));
    }
}
