//! Convex minimax solvers behind the simplex filtration value.
//!
//! For finite `p` the value of a simplex `{x_i}` with weights `f_i` is
//!
//! ```text
//! min_y max_i (‖y − x_i‖^p + f_i^p)^(1/p)
//! ```
//!
//! a minimum of a maximum of 1-Lipschitz convex functions. It is solved by
//! the central-cut ellipsoid method, which keeps a certified lower bound
//! `F(y_k) − sqrt(g_kᵀ P_k g_k)` alongside the best value seen. For `p = ∞`
//! the problem decouples into `max(max_i f_i, r)` where `r` is the radius of
//! the smallest enclosing ball, computed exactly by [`smallest_enclosing_ball`].

use crate::pointcloud::euclidean;
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Absolute gap `upper − lower` at which the solver stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxSolution {
    /// Best objective value found (an upper bound on the optimum).
    pub value: f64,
    /// Certified lower bound on the optimum.
    pub lower: f64,
    pub center: Vec<f64>,
    pub iterations: usize,
}

/// `(a^p + b^p)^(1/p)` for `a, b ≥ 0`, scaled to avoid overflow for large `p`.
#[inline]
pub fn lp_combine(a: f64, b: f64, p: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return a + b;
    }
    if p == 2.0 {
        return a.hypot(b);
    }
    m * ((a / m).powf(p) + (b / m).powf(p)).powf(1.0 / p)
}

struct Objective<'a> {
    points: &'a [&'a [f64]],
    weights: &'a [f64],
    p: f64,
}

impl Objective<'_> {
    /// Objective value and a subgradient at `y` (taken from the first maximiser).
    fn eval(&self, y: &[f64], grad: &mut [f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        let mut arg_dist = 0.0;
        for (i, (x, &f)) in self.points.iter().zip(self.weights).enumerate() {
            let a = euclidean(y, x);
            let g = lp_combine(a, f, self.p);
            if g > best {
                best = g;
                arg = i;
                arg_dist = a;
            }
        }
        if arg_dist == 0.0 || best == 0.0 {
            // y minimises the active term, hence the whole maximum
            grad.iter_mut().for_each(|g| *g = 0.0);
            return best;
        }
        let scale = (arg_dist / best).powf(self.p - 1.0) / arg_dist;
        for ((g, yk), xk) in grad.iter_mut().zip(y).zip(self.points[arg].iter()) {
            *g = scale * (yk - xk);
        }
        best
    }
}

/// Minimises `max_i (‖y − x_i‖^p + f_i^p)^(1/p)` over `y ∈ ℝ^d` for finite `p ≥ 1`.
pub fn weighted_minimax(points: &[&[f64]], weights: &[f64], p: f64, opts: SolverOptions) -> Result<MinimaxSolution> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Empty("simplex"));
    }
    if weights.len() != n {
        return Err(Error::Parameter(format!("{} weights for {n} points", weights.len())));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("minimax exponent must be finite and >= 1, got {p}")));
    }
    let dim = points[0].len();
    if let Some(q) = points.iter().find(|q| q.len() != dim) {
        return Err(Error::Dimension { expected: dim, found: q.len() });
    }
    if n == 1 {
        return Ok(MinimaxSolution { value: weights[0], lower: weights[0], center: points[0].to_vec(), iterations: 0 });
    }

    let obj = Objective { points, weights, p };
    let mut y = vec![0.0; dim];
    for q in points {
        for (yk, qk) in y.iter_mut().zip(q.iter()) {
            *yk += qk / n as f64;
        }
    }
    let mut grad = vec![0.0; dim];
    let f0 = obj.eval(&y, &mut grad);
    // every minimiser is within F(c) of every x_i
    let nearest = points.iter().map(|q| euclidean(&y, q)).fold(f64::INFINITY, f64::min);
    let radius = (f0 + nearest) * (1.0 + 1e-9) + 1e-12;

    let mut upper = f0;
    let mut center = y.clone();
    let mut lower = weights.iter().copied().fold(0.0, f64::max);
    let mut iterations = 0;

    let finished = |upper: f64, lower: f64| upper - lower <= opts.tol;

    if dim == 1 {
        let (mut lo, mut hi) = (y[0] - radius, y[0] + radius);
        while !finished(upper, lower) {
            if iterations >= opts.max_iter {
                return Err(Error::Solver { lower, upper, iterations });
            }
            iterations += 1;
            let mid = [0.5 * (lo + hi)];
            let f = obj.eval(&mid, &mut grad);
            if f < upper {
                upper = f;
                center = mid.to_vec();
            }
            if grad[0] == 0.0 {
                lower = lower.max(f);
                break;
            }
            lower = lower.max(f - grad[0].abs() * 0.5 * (hi - lo));
            if grad[0] > 0.0 {
                hi = mid[0];
            } else {
                lo = mid[0];
            }
        }
        return Ok(MinimaxSolution { value: upper, lower: lower.min(upper), center, iterations });
    }

    let d = dim as f64;
    let mut shape = vec![0.0; dim * dim];
    for k in 0..dim {
        shape[k * dim + k] = radius * radius;
    }
    let mut pg = vec![0.0; dim];
    let expand = d * d / (d * d - 1.0);
    let shrink = 2.0 / (d + 1.0);
    let mut f = f0;
    loop {
        if f < upper {
            upper = f;
            center.copy_from_slice(&y);
        }
        if grad.iter().all(|&g| g == 0.0) {
            lower = lower.max(f);
        } else {
            for (r, v) in pg.iter_mut().enumerate() {
                *v = (0..dim).map(|c| shape[r * dim + c] * grad[c]).sum();
            }
            let gpg: f64 = pg.iter().zip(&grad).map(|(a, b)| a * b).sum();
            if !(gpg > 0.0 && gpg.is_finite()) {
                // ellipsoid collapsed below floating-point resolution
                lower = lower.max(f);
            } else {
                let s = gpg.sqrt();
                lower = lower.max(f - s);
                if !finished(upper, lower) {
                    for v in pg.iter_mut() {
                        *v /= s;
                    }
                    for (yk, v) in y.iter_mut().zip(&pg) {
                        *yk -= v / (d + 1.0);
                    }
                    for r in 0..dim {
                        for c in r..dim {
                            let v = expand * (shape[r * dim + c] - shrink * pg[r] * pg[c]);
                            shape[r * dim + c] = v;
                            shape[c * dim + r] = v;
                        }
                    }
                }
            }
        }
        if finished(upper, lower) {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::Solver { lower, upper, iterations });
        }
        iterations += 1;
        f = obj.eval(&y, &mut grad);
    }
    Ok(MinimaxSolution { value: upper, lower: lower.min(upper), center, iterations })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, q: &[f64]) -> bool {
        if self.radius < 0.0 {
            return false;
        }
        euclidean(&self.center, q) <= self.radius * (1.0 + 1e-12) + 1e-15
    }
}

/// Circumscribed ball of the support points within their affine hull.
fn ball_from_support(points: &[&[f64]], support: &[usize], dim: usize) -> Ball {
    match support {
        [] => Ball { center: vec![0.0; dim], radius: -1.0 },
        [i] => Ball { center: points[*i].to_vec(), radius: 0.0 },
        _ => {
            let origin = points[support[0]];
            let k = support.len() - 1;
            let vecs: Vec<Vec<f64>> =
                support[1..].iter().map(|&i| points[i].iter().zip(origin).map(|(a, b)| a - b).collect()).collect();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            // augmented Gram system 2 VᵀV λ = diag(VᵀV)
            let mut m = vec![vec![0.0; k + 1]; k];
            for r in 0..k {
                for c in 0..k {
                    m[r][c] = 2.0 * dot(&vecs[r], &vecs[c]);
                }
                m[r][k] = dot(&vecs[r], &vecs[r]);
            }
            let scale = (0..k).map(|r| m[r][r]).fold(0.0, f64::max);
            for col in 0..k {
                let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
                if m[piv][col].abs() <= 1e-12 * scale {
                    // affinely dependent support; the last point is redundant
                    return ball_from_support(points, &support[..support.len() - 1], dim);
                }
                m.swap(col, piv);
                for r in 0..k {
                    if r != col {
                        let factor = m[r][col] / m[col][col];
                        if factor != 0.0 {
                            for c in col..=k {
                                m[r][c] -= factor * m[col][c];
                            }
                        }
                    }
                }
            }
            let mut center = origin.to_vec();
            for (r, v) in vecs.iter().enumerate() {
                let lambda = m[r][k] / m[r][r];
                for (ck, vk) in center.iter_mut().zip(v) {
                    *ck += lambda * vk;
                }
            }
            let radius = support.iter().map(|&i| euclidean(&center, points[i])).fold(0.0, f64::max);
            Ball { center, radius }
        }
    }
}

fn move_to_front(points: &[&[f64]], order: &mut [usize], end: usize, support: &mut Vec<usize>, dim: usize) -> Ball {
    let mut ball = ball_from_support(points, support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        let idx = order[i];
        if !ball.contains(points[idx]) {
            support.push(idx);
            ball = move_to_front(points, order, i, support, dim);
            support.pop();
            order[..=i].rotate_right(1);
        }
    }
    ball
}

/// Smallest ball enclosing all points (Welzl's algorithm with move-to-front).
pub fn smallest_enclosing_ball(points: &[&[f64]]) -> Result<Ball> {
    let first = points.first().ok_or(Error::Empty("point set"))?;
    let dim = first.len();
    if let Some(q) = points.iter().find(|q| q.len() != dim) {
        return Err(Error::Dimension { expected: dim, found: q.len() });
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut support = Vec::with_capacity(dim + 1);
    Ok(move_to_front(points, &mut order, points.len(), &mut support, dim))
}
