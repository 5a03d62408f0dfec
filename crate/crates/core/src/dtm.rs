//! Distance-to-measure evaluation and the stability constants built on it.
//!
//! For a discrete measure μ and mass parameter `m ∈ (0,1)`,
//!
//! ```text
//! d_{μ,m}(x)² = (1/m) ∫_0^m δ_{μ,t}(x)² dt,   δ_{μ,t}(x) = inf{ r ≥ 0 : μ(B̄(x,r)) > t }
//! ```
//!
//! With support points sorted by distance `r_1 ≤ r_2 ≤ …` and cumulative
//! masses `M_j`, `δ_{μ,t}` equals `r_j` on `[M_{j−1}, M_j)`, so the integral is
//! the finite sum `Σ_j (min(m,M_j) − min(m,M_{j−1})) r_j²`. The strict
//! inequality means a mass breakpoint exactly at `m` contributes nothing
//! beyond it.

use crate::filtration::PExponent;
use crate::minimax::{smallest_enclosing_ball, weighted_minimax, SolverOptions};
use crate::pointcloud::{DiscreteMeasure, PointCloud};
use crate::{Error, Result};

/// The DTM mass parameter `m`, restricted to the open interval (0, 1).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct DtmParams {
    m: f64,
}

impl DtmParams {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::Parameter(format!("DTM mass parameter must lie in (0,1), got {m}")));
        }
        Ok(Self { m })
    }

    /// `m = k/n`, the k-nearest-neighbour setting for a uniform n-point measure.
    pub fn from_ratio(k: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("denominator must be positive".into()));
        }
        Self::new(k as f64 / n as f64)
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

/// Nonnegative finite weights, one per point of an associated cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction {
    values: Vec<f64>,
}

impl WeightFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Parameter(format!("weight {i} is negative or not finite ({})", values[i])));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

fn dtm_unchecked(mu: &DiscreteMeasure, query: &[f64], m: f64, scratch: &mut Vec<(f64, f64)>) -> f64 {
    scratch.clear();
    scratch.extend(
        mu.support()
            .iter()
            .zip(mu.masses())
            .map(|(s, &w)| (s.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), w)),
    );
    scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut reached = 0.0f64;
    let mut integral = 0.0;
    for &(r2, w) in scratch.iter() {
        if reached >= m {
            break;
        }
        let next = (reached + w).min(m);
        integral += (next - reached) * r2;
        reached = next;
    }
    (integral / m).sqrt()
}

/// `d_{μ,m}(query)`.
pub fn dtm(mu: &DiscreteMeasure, query: &[f64], params: DtmParams) -> Result<f64> {
    if query.len() != mu.dim() {
        return Err(Error::Dimension { expected: mu.dim(), found: query.len() });
    }
    Ok(dtm_unchecked(mu, query, params.m, &mut Vec::with_capacity(mu.len())))
}

/// DTM of `mu` evaluated at every point of `at`.
pub fn dtm_on(mu: &DiscreteMeasure, at: &PointCloud, params: DtmParams) -> Result<WeightFunction> {
    if at.dim() != mu.dim() {
        return Err(Error::Dimension { expected: mu.dim(), found: at.dim() });
    }
    let mut scratch = Vec::with_capacity(mu.len());
    WeightFunction::new(at.iter().map(|q| dtm_unchecked(mu, q, params.m, &mut scratch)).collect())
}

/// DTM of `mu` restricted to its own support.
pub fn dtm_weights_of(mu: &DiscreteMeasure, params: DtmParams) -> Result<WeightFunction> {
    dtm_on(mu, mu.support(), params)
}

/// `d_{μ_X,m}` on X for the empirical measure of X.
pub fn dtm_weights(x: &PointCloud, params: DtmParams) -> Result<WeightFunction> {
    dtm_weights_of(&DiscreteMeasure::uniform(x.clone())?, params)
}

/// `c(μ,m)`: supremum of the DTM over the support.
pub fn c_const(mu: &DiscreteMeasure, params: DtmParams) -> Result<f64> {
    Ok(dtm_weights_of(mu, params)?.max())
}

/// Filtration value of the simplex spanned by `points` in the weighted Čech
/// filtration with weights `f`: the least `t` at which the balls
/// `B̄(x_i, r_{x_i}(t))` share a point.
///
/// Finite `p` is solved to absolute tolerance `tol` (see [`crate::minimax`]);
/// `p = ∞` is exact: `max(max_i f_i, radius of the smallest enclosing ball)`.
pub fn simplex_filtration_value(points: &[&[f64]], f: &[f64], p: PExponent, tol: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty("simplex"));
    }
    if f.len() != points.len() {
        return Err(Error::Parameter(format!("{} weights for {} points", f.len(), points.len())));
    }
    if let Some(w) = f.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::Parameter(format!("weight {w} is negative or not finite")));
    }
    if points.len() == 1 {
        return Ok(f[0]);
    }
    match p {
        PExponent::Infinity => {
            let ball = smallest_enclosing_ball(points)?;
            Ok(ball.radius.max(f.iter().copied().fold(0.0, f64::max)))
        }
        PExponent::Finite(p) => Ok(weighted_minimax(points, f, p, SolverOptions::with_tol(tol))?.value),
    }
}

/// `t_μ(Γ)`: filtration value of the full support simplex with weights `d_{μ,m}`.
pub fn full_simplex_value(mu: &DiscreteMeasure, params: DtmParams, p: PExponent, tol: f64) -> Result<f64> {
    let weights = dtm_weights_of(mu, params)?;
    let points: Vec<&[f64]> = mu.support().iter().collect();
    simplex_filtration_value(&points, weights.values(), p, tol)
}

/// `c(μ,m,p) = c(μ,m) + (1 − 1/p)·t_μ(Γ)`; equals `c(μ,m)` exactly at `p = 1`.
pub fn c_const_p(mu: &DiscreteMeasure, params: DtmParams, p: PExponent, tol: f64) -> Result<f64> {
    let weights = dtm_weights_of(mu, params)?;
    let c = weights.max();
    let kappa = p.kappa();
    if kappa == 0.0 {
        return Ok(c);
    }
    let points: Vec<&[f64]> = mu.support().iter().collect();
    Ok(c + kappa * simplex_filtration_value(&points, weights.values(), p, tol)?)
}
