//! Weighted Čech and Rips filtrations.
//!
//! A point `x` with weight `f(x)` carries the ball `B̄(x, r_x(t))` where
//! `r_x(t) = (t^p − f(x)^p)^(1/p)` once `t ≥ f(x)` (and `r_x(t) = t` for
//! `p = ∞`). The weighted Čech complex at level `t` is the nerve of these
//! balls; the weighted Rips complex is the flag complex of its 1-skeleton.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::dtm::{dtm_weights_of, simplex_filtration_value, DtmParams, WeightFunction};
use crate::fmt::{g17, parse_f64};
use crate::minimax::lp_combine;
use crate::pointcloud::{euclidean, DiscreteMeasure, PointCloud};
use crate::{Error, Result};

/// Default absolute tolerance for bisected edge values.
pub const EDGE_TOL: f64 = 1e-12;

/// Exponent `p ∈ [1, ∞]` of the radius functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub const ONE: PExponent = PExponent::Finite(1.0);
    pub const TWO: PExponent = PExponent::Finite(2.0);

    pub fn finite(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Parameter(format!("p must be at least 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(PExponent::Infinity);
        }
        Ok(PExponent::Finite(p))
    }

    /// `κ(p) = 1 − 1/p`, with `κ(∞) = 1`.
    pub fn kappa(self) -> f64 {
        match self {
            PExponent::Finite(p) => 1.0 - 1.0 / p,
            PExponent::Infinity => 1.0,
        }
    }

    /// `2^(1/p)`, with `2^(1/∞) = 1`.
    pub fn two_pow_inv(self) -> f64 {
        match self {
            PExponent::Finite(p) => 2f64.powf(1.0 / p),
            PExponent::Infinity => 1.0,
        }
    }

    /// `(a^p + b^p)^(1/p)`, or `max(a, b)` at infinity.
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            PExponent::Finite(p) => lp_combine(a, b, p),
            PExponent::Infinity => a.max(b),
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(PExponent::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::Parameter(format!("invalid p {s:?}: expected a number >= 1 or `inf`")))?;
        PExponent::finite(p)
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => f.write_str(&g17(*p)),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

/// Ball radius `r_x(t)` of a point with weight `f_x`; `None` while the ball is empty.
pub fn radius(f_x: f64, t: f64, p: PExponent) -> Option<f64> {
    if t < f_x {
        return None;
    }
    Some(match p {
        PExponent::Infinity => t,
        PExponent::Finite(_) => root_term(t, f_x, p),
    })
}

/// `(t^p − f^p)^(1/p)` for `t ≥ f ≥ 0`, clamped at 0.
#[inline]
fn root_term(t: f64, f: f64, p: PExponent) -> f64 {
    if t <= f {
        return 0.0;
    }
    match p {
        PExponent::Infinity => t,
        PExponent::Finite(1.0) => t - f,
        PExponent::Finite(2.0) => ((t - f) * (t + f)).sqrt(),
        PExponent::Finite(p) => t * (1.0 - (f / t).powf(p)).powf(1.0 / p),
    }
}

/// Infimum of the `t` at which `y` is covered by some ball, i.e.
/// `min_x (‖x − y‖^p + f(x)^p)^(1/p)` (`max(‖x − y‖, f(x))` for `p = ∞`).
pub fn power_value(y: &[f64], x: &PointCloud, f: &WeightFunction, p: PExponent) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    if y.len() != x.dim() {
        return Err(Error::Dimension { expected: x.dim(), found: y.len() });
    }
    if f.len() != x.len() {
        return Err(Error::Parameter(format!("{} weights for {} points", f.len(), x.len())));
    }
    Ok(x.iter().zip(f.values()).map(|(q, &w)| p.combine(euclidean(q, y), w)).fold(f64::INFINITY, f64::min))
}

/// `|f_x^p − f_y^p|^(1/p)`: the distance below which one ball swallows the meeting point.
fn branch_threshold(f_x: f64, f_y: f64, p: PExponent) -> f64 {
    let (hi, lo) = if f_x >= f_y { (f_x, f_y) } else { (f_y, f_x) };
    match p {
        PExponent::Infinity => hi,
        PExponent::Finite(_) => root_term(hi, lo, p),
    }
}

/// Filtration value of the edge `{x, y}` at distance `dist`.
///
/// Equal to `max(f_x, f_y)` when `dist ≤ |f_x^p − f_y^p|^(1/p)`, otherwise the
/// unique root of `dist = r_x(t) + r_y(t)`. Closed forms are used for
/// `p ∈ {1, 2, ∞}`; other exponents are bisected to absolute tolerance `tol`.
pub fn edge_value(dist: f64, f_x: f64, f_y: f64, p: PExponent, tol: f64) -> f64 {
    let hi = f_x.max(f_y);
    match p {
        PExponent::Infinity => hi.max(dist / 2.0),
        PExponent::Finite(q) => {
            if dist <= branch_threshold(f_x, f_y, p) {
                hi
            } else if q == 1.0 {
                (f_x + f_y + dist) / 2.0
            } else if q == 2.0 {
                // Exactly dist/2 when the weights vanish.
                0.5 * (f_x + f_y).hypot(dist) * ((f_x - f_y).hypot(dist) / dist)
            } else {
                bisect_edge_root(dist, f_x, f_y, p, tol)
            }
        }
    }
}

/// [`edge_value`] computed by bisection for every finite `p`, closed forms ignored.
pub fn edge_value_bisect(dist: f64, f_x: f64, f_y: f64, p: f64, tol: f64) -> f64 {
    let p = PExponent::Finite(p);
    if dist <= branch_threshold(f_x, f_y, p) {
        return f_x.max(f_y);
    }
    bisect_edge_root(dist, f_x, f_y, p, tol)
}

fn bisect_edge_root(dist: f64, f_x: f64, f_y: f64, p: PExponent, tol: f64) -> f64 {
    let top = f_x.max(f_y);
    let mut lo = top;
    let mut hi = p.combine(dist, top);
    for _ in 0..2000 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if root_term(mid, f_x, p) + root_term(mid, f_y, p) < dist {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Value of a simplex in the weighted Čech (nerve) filtration; see
/// [`simplex_filtration_value`].
pub fn cech_simplex_value(points: &[&[f64]], f: &[f64], p: PExponent, tol: f64) -> Result<f64> {
    simplex_filtration_value(points, f, p, tol)
}

/// A nonempty, strictly increasing list of point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Parameter("a simplex needs at least one vertex".into()));
        }
        let sorted = vertices.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            vertices.sort_unstable();
            if vertices.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parameter(format!("repeated vertex in simplex {vertices:?}")));
            }
        }
        Ok(Self(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces (empty for a vertex).
    pub fn faces(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| self.0.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Total order used for filtrations: value, then dimension, then vertices.
pub fn filtration_order(a: &(Simplex, f64), b: &(Simplex, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.dim().cmp(&b.0.dim())).then_with(|| a.0.cmp(&b.0))
}

/// Simplices with filtration values, closed under faces and face-monotone,
/// stored in a filtration order.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    entries: Vec<(Simplex, f64)>,
    n_points: usize,
    truncation: Option<f64>,
}

impl FilteredComplex {
    /// Sorts `entries` into `(value, dim, vertices)` order and validates them.
    pub fn new(mut entries: Vec<(Simplex, f64)>, n_points: usize) -> Result<Self> {
        entries.sort_by(filtration_order);
        Self::from_ordered(entries, n_points)
    }

    /// Keeps the given order, which must be a filtration order: values
    /// non-decreasing and every face listed before its cofaces.
    pub fn from_ordered(entries: Vec<(Simplex, f64)>, n_points: usize) -> Result<Self> {
        let complex = Self { entries, n_points, truncation: None };
        complex.validate()?;
        Ok(complex)
    }

    fn validate(&self) -> Result<()> {
        let index = self.index();
        if index.len() != self.entries.len() {
            return Err(Error::Integrity("duplicate simplex".into()));
        }
        let mut previous = f64::NEG_INFINITY;
        for (pos, (s, v)) in self.entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Integrity(format!("simplex [{s}] has non-finite value {v}")));
            }
            if *v < previous {
                return Err(Error::Integrity(format!("values decrease at simplex [{s}]")));
            }
            previous = *v;
            if let Some(&bad) = s.vertices().iter().find(|&&u| u >= self.n_points) {
                return Err(Error::Integrity(format!("vertex {bad} out of range for {} points", self.n_points)));
            }
            for face in s.faces() {
                match index.get(face.as_slice()) {
                    None => return Err(Error::Integrity(format!("face {face:?} of [{s}] is missing"))),
                    Some(&fpos) if fpos > pos => {
                        return Err(Error::Integrity(format!("face {face:?} of [{s}] appears after it")))
                    }
                    Some(&fpos) if self.entries[fpos].1 > *v => {
                        return Err(Error::Integrity(format!("face {face:?} of [{s}] has a larger value")))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub(crate) fn index(&self) -> HashMap<&[usize], usize> {
        self.entries.iter().enumerate().map(|(i, (s, _))| (s.vertices(), i)).collect()
    }

    pub fn entries(&self) -> &[(Simplex, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.entries.iter().map(|(s, _)| s.dim()).max()
    }

    /// The level the complex was truncated at, if any. Classes still alive
    /// there are reported as essential.
    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn with_truncation(mut self, t_max: Option<f64>) -> Self {
        self.truncation = t_max.filter(|t| t.is_finite());
        self
    }

    /// One `value;dim;v0 v1 … vk` line per simplex, in filtration order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, v) in &self.entries {
            out.push_str(&format!("{};{};{}\n", g17(*v), s.dim(), s));
        }
        out
    }

    /// Parses [`FilteredComplex::to_text`] output; the point count is one
    /// more than the largest vertex index.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() {
                continue;
            }
            let fields: Vec<&str> = row.split(';').collect();
            if fields.len() != 3 {
                return Err(Error::Parse { line, message: "expected `value;dim;vertices`".into() });
            }
            let value = parse_f64(fields[0]).ok_or_else(|| Error::Parse { line, message: format!("bad value {:?}", fields[0]) })?;
            let dim: usize = fields[1].trim().parse().map_err(|_| Error::Parse { line, message: format!("bad dimension {:?}", fields[1]) })?;
            let vertices = fields[2]
                .split_whitespace()
                .map(|v| v.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse { line, message: format!("bad vertex list {:?}", fields[2]) })?;
            if vertices.len() != dim + 1 {
                return Err(Error::Parse { line, message: format!("dimension {dim} but {} vertices", vertices.len()) });
            }
            let simplex = Simplex::new(vertices).map_err(|e| Error::Parse { line, message: e.to_string() })?;
            entries.push((simplex, value));
        }
        let n_points = entries.iter().flat_map(|(s, _)| s.vertices().iter().copied()).max().map_or(0, |m| m + 1);
        Self::new(entries, n_points)
    }
}

/// Vertex and edge values of a weighted Rips filtration: everything the
/// flag complex needs.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    vertex_values: Vec<f64>,
    /// Row-major `n × n`; the diagonal holds vertex values.
    edge_values: Vec<f64>,
    t_max: f64,
}

impl WeightedGraph {
    /// Vertex values `f(x_i)` and edge values from [`edge_value`] for all pairs.
    pub fn weighted_rips(x: &PointCloud, f: &WeightFunction, p: PExponent, t_max: f64) -> Result<Self> {
        if f.len() != x.len() {
            return Err(Error::Parameter(format!("{} weights for {} points", f.len(), x.len())));
        }
        let n = x.len();
        let w = f.values();
        let mut edge_values = vec![0.0; n * n];
        for i in 0..n {
            edge_values[i * n + i] = w[i];
            for j in i + 1..n {
                let v = edge_value(x.distance(i, j), w[i], w[j], p, EDGE_TOL);
                edge_values[i * n + j] = v;
                edge_values[j * n + i] = v;
            }
        }
        Ok(Self { n, vertex_values: w.to_vec(), edge_values, t_max })
    }

    /// A graph from explicit values; `edge_values` is row-major `n × n`.
    pub fn from_values(vertex_values: Vec<f64>, mut edge_values: Vec<f64>, t_max: f64) -> Result<Self> {
        let n = vertex_values.len();
        if edge_values.len() != n * n {
            return Err(Error::Parameter(format!("expected {} edge values, got {}", n * n, edge_values.len())));
        }
        for i in 0..n {
            edge_values[i * n + i] = vertex_values[i];
            for j in 0..n {
                let e = edge_values[i * n + j];
                if e != edge_values[j * n + i] || e < vertex_values[i] {
                    return Err(Error::Integrity(format!("edge ({i},{j}) is asymmetric or below its vertex")));
                }
            }
        }
        Ok(Self { n, vertex_values, edge_values, t_max })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> f64 {
        self.vertex_values[i]
    }

    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> f64 {
        self.edge_values[i * self.n + j]
    }

    #[inline]
    pub fn has_vertex(&self, i: usize) -> bool {
        self.vertex_values[i] <= self.t_max
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edge(i, j) <= self.t_max
    }

    /// Flag complex up to `max_dim`: each simplex gets the largest value
    /// among its vertices and edges.
    pub fn flag_complex(&self, max_dim: usize) -> FilteredComplex {
        self.flag_complex_limited(max_dim, usize::MAX).expect("unlimited expansion")
    }

    /// [`WeightedGraph::flag_complex`] failing with [`Error::SizeGuard`]
    /// once more than `limit` simplices would be produced.
    pub fn flag_complex_limited(&self, max_dim: usize, limit: usize) -> Result<FilteredComplex> {
        let mut out = Vec::new();
        let mut simplex = Vec::with_capacity(max_dim + 1);
        for v in 0..self.n {
            if !self.has_vertex(v) {
                continue;
            }
            let candidates: Vec<usize> = (v + 1..self.n).filter(|&w| self.has_edge(v, w)).collect();
            simplex.push(v);
            self.expand(&mut simplex, self.vertex(v), &candidates, max_dim, limit, &mut out)?;
            simplex.pop();
        }
        out.sort_by(filtration_order);
        let t_max = Some(self.t_max);
        Ok(FilteredComplex { entries: out, n_points: self.n, truncation: None }.with_truncation(t_max))
    }

    fn expand(
        &self,
        simplex: &mut Vec<usize>,
        value: f64,
        candidates: &[usize],
        max_dim: usize,
        limit: usize,
        out: &mut Vec<(Simplex, f64)>,
    ) -> Result<()> {
        if out.len() >= limit {
            return Err(Error::SizeGuard(format!("flag complex exceeds {limit} simplices")));
        }
        out.push((Simplex(simplex.clone()), value));
        if simplex.len() > max_dim {
            return Ok(());
        }
        for (k, &v) in candidates.iter().enumerate() {
            let joined = simplex.iter().fold(value.max(self.vertex(v)), |acc, &u| acc.max(self.edge(u, v)));
            let next: Vec<usize> = candidates[k + 1..].iter().copied().filter(|&w| self.has_edge(v, w)).collect();
            simplex.push(v);
            self.expand(simplex, joined, &next, max_dim, limit, out)?;
            simplex.pop();
        }
        Ok(())
    }
}

/// Weighted Rips filtration of `(x, f, p)` up to `max_dim`, truncated at `t_max`.
pub fn build_weighted_rips(x: &PointCloud, f: &WeightFunction, p: PExponent, max_dim: usize, t_max: f64) -> Result<FilteredComplex> {
    Ok(WeightedGraph::weighted_rips(x, f, p, t_max)?.flag_complex(max_dim))
}

/// Largest number of candidate simplices [`build_weighted_cech`] will enumerate.
pub const CECH_GUARD: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Weighted Čech (nerve) filtration by exhaustive enumeration.
///
/// Edges use the exact [`edge_value`]; simplices with three or more vertices
/// use the minimax solver at tolerance `tol` and are clamped up to the
/// largest face value so the result stays face-monotone.
pub fn build_weighted_cech(
    x: &PointCloud,
    f: &WeightFunction,
    p: PExponent,
    max_dim: usize,
    t_max: f64,
    tol: f64,
) -> Result<FilteredComplex> {
    let n = x.len();
    if f.len() != n {
        return Err(Error::Parameter(format!("{} weights for {n} points", f.len())));
    }
    let top = binomial(n, max_dim + 1);
    if top > CECH_GUARD {
        return Err(Error::SizeGuard(format!("C({n}, {}) = {top} candidate simplices exceeds {CECH_GUARD}", max_dim + 1)));
    }
    let w = f.values();
    let mut values: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut entries = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..n).filter(|&i| w[i] <= t_max).map(|i| vec![i]).collect();
    for s in &layer {
        values.insert(s.clone(), w[s[0]]);
    }
    for size in 2..=max_dim + 1 {
        let mut next = Vec::new();
        for base in &layer {
            let last = *base.last().unwrap();
            'extend: for v in last + 1..n {
                let mut cand = base.clone();
                cand.push(v);
                let mut face_max = 0.0f64;
                for skip in 0..cand.len() {
                    let face: Vec<usize> = cand.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &u)| u).collect();
                    match values.get(&face) {
                        Some(&fv) => face_max = face_max.max(fv),
                        None => continue 'extend,
                    }
                }
                let value = if size == 2 {
                    edge_value(x.distance(cand[0], cand[1]), w[cand[0]], w[cand[1]], p, EDGE_TOL)
                } else {
                    let pts: Vec<&[f64]> = cand.iter().map(|&i| x.point(i)).collect();
                    let fs: Vec<f64> = cand.iter().map(|&i| w[i]).collect();
                    cech_simplex_value(&pts, &fs, p, tol)?
                }
                .max(face_max);
                if value <= t_max {
                    values.insert(cand.clone(), value);
                    next.push(cand);
                }
            }
        }
        layer = next;
    }
    entries.extend(values.into_iter().map(|(s, v)| (Simplex(s), v)));
    entries.sort_by(filtration_order);
    Ok(FilteredComplex { entries, n_points: n, truncation: None }.with_truncation(Some(t_max)))
}

/// DTM-filtration (Rips flavour) of a point cloud with its empirical measure.
pub fn dtm_filtration(x: &PointCloud, params: DtmParams, p: PExponent, max_dim: usize, t_max: f64) -> Result<FilteredComplex> {
    dtm_filtration_of(&DiscreteMeasure::uniform(x.clone())?, params, p, max_dim, t_max)
}

/// DTM-filtration (Rips flavour) on the support of `mu` with weights `d_{μ,m}`.
pub fn dtm_filtration_of(mu: &DiscreteMeasure, params: DtmParams, p: PExponent, max_dim: usize, t_max: f64) -> Result<FilteredComplex> {
    let f = dtm_weights_of(mu, params)?;
    build_weighted_rips(mu.support(), &f, p, max_dim, t_max)
}
