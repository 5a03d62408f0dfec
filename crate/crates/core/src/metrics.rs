//! Diagram and measure distances, stability bounds and certification.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::dtm::{c_const, c_const_p, dtm_weights_of, DtmParams};
use crate::filtration::{PExponent, WeightedGraph};
use crate::matching::maximum_matching;
use crate::minimax::DEFAULT_TOL;
use crate::persistence::{flag_persistence, DiagramPoint, PersistenceDiagram};
use crate::pointcloud::{euclidean, hausdorff, DiscreteMeasure, PointCloud};
use crate::transport::{integral_supplies, min_cost_transport};
use crate::{Error, Result};

/// Slack allowed when comparing a measured distance with its bound.
pub const CERTIFY_SLACK: f64 = 1e-9;

fn linf(a: &DiagramPoint, b: &DiagramPoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn to_diagonal(a: &DiagramPoint) -> f64 {
    (a.death - a.birth) / 2.0
}

/// Bottleneck distance between the degree-`dim` parts of two diagrams.
///
/// Essential points are matched among themselves by sorted births; differing
/// essential counts give `+∞`. The finite part is exact: a binary search over
/// all candidate costs with a perfect-matching test at each step.
pub fn bottleneck(d1: &PersistenceDiagram, d2: &PersistenceDiagram, dim: usize) -> f64 {
    let (a_ess, a): (Vec<DiagramPoint>, Vec<DiagramPoint>) = d1.in_dim(dim).into_iter().partition(DiagramPoint::is_essential);
    let (b_ess, b): (Vec<DiagramPoint>, Vec<DiagramPoint>) = d2.in_dim(dim).into_iter().partition(DiagramPoint::is_essential);
    if a_ess.len() != b_ess.len() {
        return f64::INFINITY;
    }
    let mut births_a: Vec<f64> = a_ess.iter().map(|q| q.birth).collect();
    let mut births_b: Vec<f64> = b_ess.iter().map(|q| q.birth).collect();
    births_a.sort_by(f64::total_cmp);
    births_b.sort_by(f64::total_cmp);
    let essential = births_a.iter().zip(&births_b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    essential.max(finite_bottleneck(&a, &b))
}

fn finite_bottleneck(a: &[DiagramPoint], b: &[DiagramPoint]) -> f64 {
    let (n, m) = (a.len(), b.len());
    if n + m == 0 {
        return 0.0;
    }
    let mut candidates: Vec<f64> = vec![0.0];
    candidates.extend(a.iter().map(to_diagonal));
    candidates.extend(b.iter().map(to_diagonal));
    for p in a {
        candidates.extend(b.iter().map(|q| linf(p, q)));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Left: a then diagonal copies of b. Right: b then diagonal copies of a.
    let feasible = |eps: f64| {
        let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n + m);
        for (i, p) in a.iter().enumerate() {
            let mut row: Vec<usize> = (0..m).filter(|&j| linf(p, &b[j]) <= eps).collect();
            if to_diagonal(p) <= eps {
                row.push(m + i);
            }
            adj.push(row);
        }
        for (j, q) in b.iter().enumerate() {
            let mut row = Vec::with_capacity(n + 1);
            if to_diagonal(q) <= eps {
                row.push(j);
            }
            row.extend(m..m + n);
            adj.push(row);
        }
        maximum_matching(&adj, n + m) == n + m
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Quadratic Wasserstein distance between two discrete measures.
pub fn wasserstein2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::Dimension { expected: mu.dim(), found: nu.dim() });
    }
    let (sa, sb): (f64, f64) = (mu.masses().iter().sum(), nu.masses().iter().sum());
    if (sa - sb).abs() > 1e-12 {
        return Err(Error::Measure(format!("total masses differ: {sa} vs {sb}")));
    }
    let (supply, demand, total) = integral_supplies(mu.masses(), nu.masses())?;
    let (x, y) = (mu.support(), nu.support());
    let mut cost = Vec::with_capacity(x.len() * y.len());
    for p in x.iter() {
        cost.extend(y.iter().map(|q| {
            let d = euclidean(p, q);
            d * d
        }));
    }
    let c = min_cost_transport(&supply, &demand, &cost);
    Ok((c / total as f64).max(0.0).sqrt())
}

/// Which stability statement a report instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// `m^(-1/2) W2(μ,ν) + 2^(1/p) d_H(X,Y)`.
    P44,
    /// Outlier-robust bound with `c(Γ,m) + c(Ω,m)`.
    T46,
    /// As [`Theorem::T46`] with `c(·,m,p)`.
    T413,
    /// `m^(-1/2) W2(μ,μ_X) + 2ε + c(μ,m)`; no filtration is compared.
    P48,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::P44 => "P4.4",
            Theorem::T46 => "T4.6",
            Theorem::T413 => "T4.13",
            Theorem::P48 => "P4.8-bound",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P4.4" | "P44" => Ok(Theorem::P44),
            "T4.6" | "T46" => Ok(Theorem::T46),
            "T4.13" | "T413" => Ok(Theorem::T413),
            "P4.8" | "P48" | "P4.8-BOUND" => Ok(Theorem::P48),
            _ => Err(Error::Parameter(format!("unknown theorem {s:?} (expected P4.4, T4.6, T4.13 or P4.8)"))),
        }
    }
}

/// Named bound terms, the bound itself and, once measured, the bottleneck
/// distance it is compared with.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub theorem: Theorem,
    pub m: f64,
    pub p: PExponent,
    pub terms: Vec<(String, f64)>,
    pub bound: f64,
    pub measured_bottleneck: Option<f64>,
    pub satisfied: Option<bool>,
    pub per_dim: Vec<(usize, f64)>,
}

impl StabilityReport {
    fn new(theorem: Theorem, m: f64, p: PExponent, terms: Vec<(&str, f64)>, bound: f64) -> Self {
        Self {
            theorem,
            m,
            p,
            terms: terms.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            bound,
            measured_bottleneck: None,
            satisfied: None,
            per_dim: Vec::new(),
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(k, _)| k == name).map(|t| t.1)
    }

    /// Records the measured distance and whether it respects the bound.
    pub fn with_measurement(mut self, measured: f64) -> Self {
        self.measured_bottleneck = Some(measured);
        self.satisfied = Some(measured <= self.bound + CERTIFY_SLACK);
        self
    }

    pub fn slack(&self) -> Option<f64> {
        self.measured_bottleneck.map(|d| self.bound - d)
    }

    pub fn to_json(&self) -> Value {
        let num = |x: f64| if x.is_finite() { json!(x) } else { json!(if x > 0.0 { "inf" } else { "-inf" }) };
        let mut terms = Map::new();
        for (k, v) in &self.terms {
            terms.insert(k.clone(), num(*v));
        }
        let mut per_dim = Map::new();
        for (d, v) in &self.per_dim {
            per_dim.insert(d.to_string(), num(*v));
        }
        let p = match self.p {
            PExponent::Finite(p) => json!(p),
            PExponent::Infinity => json!("inf"),
        };
        let mut out = Map::new();
        out.insert("theorem".into(), json!(self.theorem.id()));
        out.insert("m".into(), json!(self.m));
        out.insert("p".into(), p);
        out.insert("terms".into(), Value::Object(terms));
        out.insert("bound".into(), num(self.bound));
        out.insert("measured_bottleneck".into(), self.measured_bottleneck.map_or(Value::Null, num));
        out.insert("bottleneck_by_dim".into(), Value::Object(per_dim));
        out.insert("slack".into(), self.slack().map_or(Value::Null, num));
        out.insert("satisfied".into(), self.satisfied.map_or(Value::Null, Value::Bool));
        Value::Object(out)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes") + "\n"
    }
}

fn uniform(x: &PointCloud) -> Result<DiscreteMeasure> {
    DiscreteMeasure::uniform(x.clone())
}

/// Checks that every point of `sub` is a point of `sup` (exact coordinates).
pub fn check_subset(sub: &PointCloud, sup: &PointCloud, sub_name: &str, sup_name: &str) -> Result<()> {
    if sub.dim() != sup.dim() {
        return Err(Error::Dimension { expected: sup.dim(), found: sub.dim() });
    }
    for (i, q) in sub.iter().enumerate() {
        if sup.position(q).is_none() {
            return Err(Error::Subset(format!("point {i} {q:?} of {sub_name} is not a point of {sup_name}")));
        }
    }
    Ok(())
}

fn same_points(a: &PointCloud, b: &PointCloud) -> bool {
    a.dim() == b.dim() && a.len() == b.len() && a.coords() == b.coords()
}

pub fn bound_p44(mu: &DiscreteMeasure, nu: &DiscreteMeasure, m: DtmParams, p: PExponent) -> Result<StabilityReport> {
    let w2 = wasserstein2(mu, nu)?;
    let dh = hausdorff(mu.support(), nu.support())?;
    let bound = w2 / m.m().sqrt() + p.two_pow_inv() * dh;
    Ok(StabilityReport::new(Theorem::P44, m.m(), p, vec![("w2_x_y", w2), ("dh_x_y", dh)], bound))
}

fn robust_bound(
    theorem: Theorem,
    x: &PointCloud,
    gamma: &PointCloud,
    omega: &PointCloud,
    y: &PointCloud,
    m: DtmParams,
    p: PExponent,
    c: impl Fn(&DiscreteMeasure) -> Result<f64>,
) -> Result<StabilityReport> {
    check_subset(gamma, x, "Gamma", "X")?;
    check_subset(omega, y, "Omega", "Y")?;
    let (mx, mg, mo, my) = (uniform(x)?, uniform(gamma)?, uniform(omega)?, uniform(y)?);
    let scale = 1.0 / m.m().sqrt();
    let w_xg = wasserstein2(&mx, &mg)?;
    let w_go = wasserstein2(&mg, &mo)?;
    let mut terms = vec![("w2_x_gamma", w_xg), ("w2_gamma_omega", w_go)];
    let mut w_sum = w_xg + w_go;
    if !same_points(omega, y) {
        let w_oy = wasserstein2(&mo, &my)?;
        terms.push(("w2_omega_y", w_oy));
        w_sum += w_oy;
    }
    let c_gamma = c(&mg)?;
    let c_omega = if same_points(gamma, omega) { c_gamma } else { c(&mo)? };
    let names = if theorem == Theorem::T413 { ("c_gamma_p", "c_omega_p") } else { ("c_gamma", "c_omega") };
    terms.push((names.0, c_gamma));
    terms.push((names.1, c_omega));
    let bound = scale * w_sum + c_gamma + c_omega;
    Ok(StabilityReport::new(theorem, m.m(), p, terms, bound))
}

pub fn bound_t46(x: &PointCloud, gamma: &PointCloud, omega: &PointCloud, y: &PointCloud, m: DtmParams) -> Result<StabilityReport> {
    robust_bound(Theorem::T46, x, gamma, omega, y, m, PExponent::ONE, |mu| c_const(mu, m))
}

pub fn bound_t413(
    x: &PointCloud,
    gamma: &PointCloud,
    omega: &PointCloud,
    y: &PointCloud,
    m: DtmParams,
    p: PExponent,
    tol: f64,
) -> Result<StabilityReport> {
    robust_bound(Theorem::T413, x, gamma, omega, y, m, p, |mu| c_const_p(mu, m, p, tol))
}

/// Bound for the sublevel filtration of `d_{μ,m}`; only the bound is computed.
pub fn bound_p48(mu: &DiscreteMeasure, x: &PointCloud, m: DtmParams) -> Result<StabilityReport> {
    if mu.dim() != x.dim() {
        return Err(Error::Dimension { expected: x.dim(), found: mu.dim() });
    }
    let w2 = wasserstein2(mu, &uniform(x)?)?;
    let eps = hausdorff(&mu.support().union(x)?, x)?;
    let c = c_const(mu, m)?;
    let bound = w2 / m.m().sqrt() + 2.0 * eps + c;
    Ok(StabilityReport::new(Theorem::P48, m.m(), PExponent::ONE, vec![("w2_mu_x", w2), ("epsilon", eps), ("c_mu", c)], bound))
}

/// Inputs of [`certify`].
#[derive(Clone, Debug)]
pub struct CertifyInput {
    pub theorem: Theorem,
    /// First measure; its support is `X`.
    pub x: DiscreteMeasure,
    /// Second measure (`Y`). For [`Theorem::P48`] this is the sample `X`.
    pub y: DiscreteMeasure,
    /// `Γ ⊆ X`; defaults to `X`.
    pub gamma: Option<PointCloud>,
    /// `Ω ⊆ Y`; defaults to `Y`.
    pub omega: Option<PointCloud>,
    pub m: DtmParams,
    pub p: PExponent,
    pub max_dim: usize,
    /// Truncation level; defaults to the diameter of `X ∪ Y`.
    pub t_max: Option<f64>,
    pub dims: Vec<usize>,
    pub tol: f64,
    /// Refuse to build flag complexes with more simplices than this.
    pub limit: usize,
}

impl CertifyInput {
    pub fn new(theorem: Theorem, x: DiscreteMeasure, y: DiscreteMeasure, m: DtmParams, p: PExponent) -> Self {
        Self {
            theorem,
            x,
            y,
            gamma: None,
            omega: None,
            m,
            p,
            max_dim: 2,
            t_max: None,
            dims: vec![0, 1],
            tol: DEFAULT_TOL,
            limit: 20_000_000,
        }
    }
}

/// DTM-Rips diagram of `mu` in degrees `dims`.
pub fn dtm_diagram(mu: &DiscreteMeasure, m: DtmParams, p: PExponent, max_dim: usize, t_max: f64, dims: &[usize], limit: usize) -> Result<PersistenceDiagram> {
    let f = dtm_weights_of(mu, m)?;
    let g = WeightedGraph::weighted_rips(mu.support(), &f, p, t_max)?;
    flag_persistence(&g, max_dim, dims, limit)
}

/// Computes the bound for `input.theorem`, builds both DTM filtrations and
/// records the largest bottleneck distance over `input.dims`.
///
/// A violated bound is reported through `satisfied`, not as an error.
pub fn certify(input: &CertifyInput) -> Result<StabilityReport> {
    let x = input.x.support();
    let y = input.y.support();
    let report = match input.theorem {
        Theorem::P44 => bound_p44(&input.x, &input.y, input.m, input.p)?,
        Theorem::T46 | Theorem::T413 => {
            let gamma = input.gamma.as_ref().unwrap_or(x);
            let omega = input.omega.as_ref().unwrap_or(y);
            if input.theorem == Theorem::T46 {
                if input.p != PExponent::ONE {
                    return Err(Error::Parameter("T4.6 is stated for p = 1; use T4.13 for other exponents".into()));
                }
                bound_t46(x, gamma, omega, y, input.m)?
            } else {
                bound_t413(x, gamma, omega, y, input.m, input.p, input.tol)?
            }
        }
        Theorem::P48 => return bound_p48(&input.x, y, input.m),
    };
    let t_max = match input.t_max {
        Some(t) => t,
        None => x.union(y)?.diameter(),
    };
    let dx = dtm_diagram(&input.x, input.m, input.p, input.max_dim, t_max, &input.dims, input.limit)?;
    let dy = dtm_diagram(&input.y, input.m, input.p, input.max_dim, t_max, &input.dims, input.limit)?;
    let per_dim: Vec<(usize, f64)> = input.dims.iter().map(|&d| (d, bottleneck(&dx, &dy, d))).collect();
    let measured = per_dim.iter().map(|t| t.1).fold(0.0, f64::max);
    let mut report = report.with_measurement(measured);
    report.per_dim = per_dim;
    Ok(report)
}
