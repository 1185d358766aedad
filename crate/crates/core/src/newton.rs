//! Damped Newton iteration for square systems in three unknowns.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub type Vec3<T> = [T; 3];
pub type Mat3<T> = [[T; 3]; 3];

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions<T> {
    /// Target for the max-norm of the residual.
    pub tol: T,
    pub max_iter: usize,
    /// Central-difference step.
    pub fd_step: T,
    pub max_halvings: usize,
    /// Jacobians with a larger condition estimate are rejected.
    pub cond_limit: T,
    /// Steps smaller than this (relative to `1 + |x|`) end the iteration.
    pub step_floor: T,
}

impl<T: Real> Default for NewtonOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::solve_tol(),
            max_iter: 50,
            fd_step: T::fd_step(),
            max_halvings: 20,
            cond_limit: lit(1e12),
            step_floor: lit(1e-15),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSolution<T> {
    pub x: Vec3<T>,
    pub iterations: usize,
    /// Max-norm of the residual at `x`.
    pub residual: T,
}

pub fn max_norm<T: Real>(v: Vec3<T>) -> T {
    v[0].abs().max(v[1].abs()).max(v[2].abs())
}

/// Jacobian of `f` at `x` by central differences.
pub fn fd_jacobian<T: Real>(f: impl Fn(Vec3<T>) -> Vec3<T>, x: Vec3<T>, h: T) -> Mat3<T> {
    let mut j = [[T::zero(); 3]; 3];
    let two_h = h + h;
    for c in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(xp), f(xm));
        for r in 0..3 {
            j[r][c] = (fp[r] - fm[r]) / two_h;
        }
    }
    j
}

pub fn det3<T: Real>(m: &Mat3<T>) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// LU factorisation with partial pivoting.
#[derive(Debug, Clone, Copy)]
pub struct Lu3<T> {
    lu: Mat3<T>,
    perm: [usize; 3],
    norm_inf: T,
}

impl<T: Real> Lu3<T> {
    pub fn new(m: &Mat3<T>) -> Result<Self> {
        let norm_inf = m
            .iter()
            .map(|r| r[0].abs() + r[1].abs() + r[2].abs())
            .fold(T::zero(), T::max);
        let mut lu = *m;
        let mut perm = [0, 1, 2];
        for k in 0..3 {
            let p = (k..3)
                .max_by(|&a, &b| {
                    lu[a][k]
                        .abs()
                        .partial_cmp(&lu[b][k].abs())
                        .unwrap_or(core::cmp::Ordering::Equal)
                })
                .unwrap_or(k);
            if !(lu[p][k].abs() > T::zero()) {
                return Err(Error::SingularJacobian {
                    condition: f64::INFINITY,
                });
            }
            lu.swap(k, p);
            perm.swap(k, p);
            for r in k + 1..3 {
                let l = lu[r][k] / lu[k][k];
                lu[r][k] = l;
                for c in k + 1..3 {
                    let u = lu[k][c];
                    lu[r][c] -= l * u;
                }
            }
        }
        Ok(Self { lu, perm, norm_inf })
    }

    pub fn solve(&self, b: Vec3<T>) -> Vec3<T> {
        let lu = &self.lu;
        let mut y = [b[self.perm[0]], b[self.perm[1]], b[self.perm[2]]];
        for r in 1..3 {
            for c in 0..r {
                let l = lu[r][c];
                y[r] -= l * y[c];
            }
        }
        for r in (0..3).rev() {
            for c in r + 1..3 {
                let u = lu[r][c];
                y[r] -= u * y[c];
            }
            y[r] /= lu[r][r];
        }
        y
    }

    /// `‖A‖∞ ‖A⁻¹‖∞`, with the inverse formed column by column.
    pub fn condition(&self) -> T {
        let mut row_sums = [T::zero(); 3];
        for c in 0..3 {
            let mut e = [T::zero(); 3];
            e[c] = T::one();
            let col = self.solve(e);
            for r in 0..3 {
                row_sums[r] += col[r].abs();
            }
        }
        self.norm_inf * max_norm(row_sums)
    }
}

/// Solves `m x = b`, rejecting matrices whose condition estimate exceeds `cond_limit`.
pub fn solve3<T: Real>(m: &Mat3<T>, b: Vec3<T>, cond_limit: T) -> Result<Vec3<T>> {
    let lu = Lu3::new(m)?;
    let cond = lu.condition();
    if !(cond <= cond_limit) {
        return Err(Error::SingularJacobian {
            condition: cond.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(lu.solve(b))
}

/// Newton iteration with a finite-difference Jacobian and default options
/// apart from `tol` and `max_iter`.
pub fn newton3<T: Real>(
    f: impl Fn(Vec3<T>) -> Vec3<T>,
    x0: Vec3<T>,
    tol: T,
    max_iter: usize,
) -> Result<NewtonSolution<T>> {
    let opts = NewtonOptions {
        tol,
        max_iter,
        ..NewtonOptions::default()
    };
    newton3_with(&f, None::<&dyn Fn(Vec3<T>) -> Mat3<T>>, x0, &opts)
}

/// Newton iteration; uses `jac` when given, central differences otherwise.
///
/// A step is halved until the residual decreases. Fails with
/// [`Error::NoConvergence`] when no halving helps, when the step becomes
/// negligible, or after `max_iter` iterations.
pub fn newton3_with<T: Real, F, J>(
    f: &F,
    jac: Option<&J>,
    x0: Vec3<T>,
    opts: &NewtonOptions<T>,
) -> Result<NewtonSolution<T>>
where
    F: Fn(Vec3<T>) -> Vec3<T> + ?Sized,
    J: Fn(Vec3<T>) -> Mat3<T> + ?Sized,
{
    let fail = |iterations: usize, residual: T| Error::NoConvergence {
        iterations,
        residual: residual.to_f64().unwrap_or(f64::NAN),
    };
    let mut x = x0;
    let mut fx = f(x);
    let mut res = max_norm(fx);
    if !res.is_finite() {
        return Err(fail(0, res));
    }
    for it in 0..opts.max_iter {
        if res <= opts.tol {
            return Ok(NewtonSolution {
                x,
                iterations: it,
                residual: res,
            });
        }
        let j = match jac {
            Some(j) => j(x),
            None => fd_jacobian(f, x, opts.fd_step),
        };
        let dx = solve3(&j, [-fx[0], -fx[1], -fx[2]], opts.cond_limit)?;
        let scale = T::one() + max_norm(x);
        if max_norm(dx) <= opts.step_floor * scale {
            return Err(fail(it, res));
        }
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1], x[2] + lambda * dx[2]];
            let ft = f(trial);
            let rt = max_norm(ft);
            if rt.is_finite() && rt < res {
                x = trial;
                fx = ft;
                res = rt;
                accepted = true;
                break;
            }
            lambda *= lit(0.5);
        }
        if !accepted {
            return Err(fail(it + 1, res));
        }
    }
    if res <= opts.tol {
        Ok(NewtonSolution {
            x,
            iterations: opts.max_iter,
            residual: res,
        })
    } else {
        Err(fail(opts.max_iter, res))
    }
}
