//! Minimal fitting utilities shared by the analysis pipelines.

use thiserror::Error;

/// Result of a least-squares fit.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    /// Fitted parameters; meaning depends on the fit.
    pub params: Vec<f64>,
    /// One standard error per parameter.
    pub errors: Vec<f64>,
    /// Euclidean norm of the residuals.
    pub residual_norm: f64,
    /// False means the parameters are unusable.
    pub converged: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points with positive weight, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate abscissa: all x values coincide")]
    DegenerateAbscissa,
    #[error("degenerate data: {0}")]
    Degenerate(&'static str),
    #[error("no convergence after {iterations} iterations (residual norm {residual_norm:.3e})")]
    NoConvergence {
        iterations: usize,
        residual_norm: f64,
    },
}

/// Weighted least-squares line `y = slope * x + intercept`.
///
/// `params = [slope, intercept]`. Closed form; errors from the weighted
/// residual variance.
pub fn weighted_linear_fit(points: &[(f64, f64, f64)]) -> Result<FitResult, FitError> {
    let used: Vec<&(f64, f64, f64)> = points.iter().filter(|p| p.2 > 0.0).collect();
    if used.len() < 2 {
        return Err(FitError::TooFewPoints {
            needed: 2,
            got: used.len(),
        });
    }
    let w_sum: f64 = used.iter().map(|p| p.2).sum();
    let x_bar: f64 = used.iter().map(|p| p.0 * p.2).sum::<f64>() / w_sum;
    let y_bar: f64 = used.iter().map(|p| p.1 * p.2).sum::<f64>() / w_sum;
    let sxx: f64 = used.iter().map(|p| p.2 * (p.0 - x_bar).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(FitError::DegenerateAbscissa);
    }
    let sxy: f64 = used
        .iter()
        .map(|p| p.2 * (p.0 - x_bar) * (p.1 - y_bar))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;

    let ss_res: f64 = used
        .iter()
        .map(|p| p.2 * (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    // Residual variance per unit weight, on n - 2 degrees of freedom.
    let dof = (used.len() as f64 - 2.0).max(1.0);
    let sigma2 = ss_res / dof;
    let slope_err = (sigma2 / sxx).sqrt();
    let intercept_err = (sigma2 * (1.0 / w_sum + x_bar * x_bar / sxx)).sqrt();

    Ok(FitResult {
        params: vec![slope, intercept],
        errors: vec![slope_err, intercept_err],
        residual_norm: ss_res.sqrt(),
        converged: true,
    })
}

/// Iterative least-squares fit of `y = a * exp(-t / T) + b`.
///
/// `params = [a, T, b]`. The initial guess uses `T = span / 2` refined by
/// log-linearization, then damped Gauss-Newton; iteration cap 200,
/// relative tolerance 1e-10.
pub fn exponential_fit(series: &[(f64, f64)]) -> Result<FitResult, FitError> {
    if series.len() < 4 {
        return Err(FitError::TooFewPoints {
            needed: 4,
            got: series.len(),
        });
    }
    let t0 = series.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t1 = series.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let span = t1 - t0;
    if span <= 0.0 {
        return Err(FitError::DegenerateAbscissa);
    }
    let y_min = series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y_max = series.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let y_scale = y_max.abs().max(y_min.abs()).max(1e-300);
    if y_max - y_min < 1e-10 * y_scale {
        return Err(FitError::Degenerate("series is constant"));
    }

    // Baseline from the tail, amplitude from the head, T = span/2 refined
    // by a log-linear fit where the decaying part is resolved.
    let tail = (series.len() / 10).max(1);
    let b0: f64 = series[series.len() - tail..]
        .iter()
        .map(|p| p.1)
        .sum::<f64>()
        / tail as f64;
    let a0 = series[0].1 - b0;
    let mut guess_t = span / 2.0;
    if a0 != 0.0 {
        let pts: Vec<(f64, f64, f64)> = series
            .iter()
            .filter(|p| (p.1 - b0) / a0 > 0.05)
            .map(|p| (p.0, ((p.1 - b0) / a0).ln(), 1.0))
            .collect();
        if pts.len() >= 2 {
            if let Ok(line) = weighted_linear_fit(&pts) {
                if line.params[0] < 0.0 {
                    guess_t = -1.0 / line.params[0];
                }
            }
        }
    }

    let mut p = [if a0 != 0.0 { a0 } else { y_max - y_min }, guess_t, b0];
    let mut cost = sum_sq(series, &p);
    const MAX_ITER: usize = 200;
    const REL_TOL: f64 = 1e-10;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        // Normal equations J^T J dp = -J^T r for r = model - y.
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(t, y) in series {
            let e = (-t / p[1]).exp();
            let r = p[0] * e + p[2] - y;
            let j = [e, p[0] * e * t / (p[1] * p[1]), 1.0];
            for u in 0..3 {
                jtr[u] += j[u] * r;
                for v in 0..3 {
                    jtj[u][v] += j[u] * j[v];
                }
            }
        }
        let Some(step) = solve3(&jtj, &[-jtr[0], -jtr[1], -jtr[2]]) else {
            break; // singular normal equations
        };
        // Damped step: halve until the cost stops increasing.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [
                p[0] + lambda * step[0],
                p[1] + lambda * step[1],
                p[2] + lambda * step[2],
            ];
            if trial[1] > 0.0 {
                let c = sum_sq(series, &trial);
                if c <= cost {
                    let rel = (0..3)
                        .map(|k| (trial[k] - p[k]).abs() / p[k].abs().max(1e-300))
                        .fold(0.0f64, f64::max);
                    p = trial;
                    cost = c;
                    accepted = true;
                    if rel < REL_TOL {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // No improving step exists: numerically at the minimum.
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(FitError::NoConvergence {
            iterations: MAX_ITER,
            residual_norm: cost.sqrt(),
        });
    }

    // Standard errors from (J^T J)^-1 scaled by the residual variance.
    let mut jtj = [[0.0f64; 3]; 3];
    for &(t, _) in series {
        let e = (-t / p[1]).exp();
        let j = [e, p[0] * e * t / (p[1] * p[1]), 1.0];
        for u in 0..3 {
            for v in 0..3 {
                jtj[u][v] += j[u] * j[v];
            }
        }
    }
    let dof = (series.len() as f64 - 3.0).max(1.0);
    let sigma2 = cost / dof;
    let errors = match invert3(&jtj) {
        Some(inv) => (0..3)
            .map(|k| (inv[k][k].max(0.0) * sigma2).sqrt())
            .collect(),
        None => vec![f64::NAN; 3],
    };

    Ok(FitResult {
        params: p.to_vec(),
        errors,
        residual_norm: cost.sqrt(),
        converged: true,
    })
}

fn sum_sq(series: &[(f64, f64)], p: &[f64; 3]) -> f64 {
    series
        .iter()
        .map(|&(t, y)| {
            let r = p[0] * (-t / p[1]).exp() + p[2] - y;
            r * r
        })
        .sum()
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let inv = invert3(a)?;
    let mut x = [0.0; 3];
    for u in 0..3 {
        for v in 0..3 {
            x[u] += inv[u][v] * b[v];
        }
    }
    Some(x)
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut inv = [[0.0; 3]; 3];
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    Some(inv)
}

/// Gaussian mode fitted to a histogram peak.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPeak {
    pub mean: f64,
    pub sigma: f64,
    pub amplitude: f64,
}

/// Fit one Gaussian to the histogram peak inside `bins` (center, count)
/// via a count-weighted parabola on the log counts within `window` of the
/// tallest bin. Robust against mass in the far tails.
pub fn fit_gaussian_peak(bins: &[(f64, f64)], window: f64) -> Result<GaussianPeak, FitError> {
    let peak = bins
        .iter()
        .cloned()
        .fold(None::<(f64, f64)>, |best, b| match best {
            Some(p) if p.1 >= b.1 => Some(p),
            _ => Some(b),
        })
        .ok_or(FitError::TooFewPoints { needed: 3, got: 0 })?;
    if peak.1 <= 0.0 {
        return Err(FitError::Degenerate("empty histogram"));
    }
    let pts: Vec<(f64, f64, f64)> = bins
        .iter()
        .filter(|(c, n)| (c - peak.0).abs() <= window && *n >= 5.0)
        .map(|&(c, n)| (c, n.ln(), n))
        .collect();
    if pts.len() < 3 {
        return Err(FitError::TooFewPoints {
            needed: 3,
            got: pts.len(),
        });
    }
    // Weighted quadratic ln n = c0 + c1 x + c2 x^2.
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(x, y, w) in &pts {
        let basis = [1.0, x, x * x];
        for u in 0..3 {
            rhs[u] += w * basis[u] * y;
            for v in 0..3 {
                m[u][v] += w * basis[u] * basis[v];
            }
        }
    }
    let c = solve3(&m, &rhs).ok_or(FitError::DegenerateAbscissa)?;
    if c[2] >= 0.0 {
        return Err(FitError::Degenerate("peak is not log-concave"));
    }
    let sigma = (-1.0 / (2.0 * c[2])).sqrt();
    let mean = -c[1] / (2.0 * c[2]);
    let amplitude = (c[0] - c[1] * c[1] / (4.0 * c[2])).exp();
    Ok(GaussianPeak {
        mean,
        sigma,
        amplitude,
    })
}
