//! Point clouds, discrete measures and their ingestion.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Euclidean distance between two coordinate slices of equal length.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// An ordered list of points in ℝ^d, stored row-major.
///
/// Indices are stable: downstream simplices and weight functions refer to
/// points by their position. Coincident points are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("point dimension must be at least 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::Parameter(format!("{} coordinates do not split into points of dimension {dim}", coords.len())));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Parameter(format!("point {} has a non-finite coordinate", pos / dim)));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::Empty("point cloud"))?;
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::Dimension { expected: dim, found: row.len() });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    /// An empty cloud in ℝ^dim.
    pub fn empty(dim: usize) -> Self {
        Self { dim: dim.max(1), coords: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: p.len() });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("non-finite coordinate".into()));
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    /// Points of `self` followed by points of `other`.
    pub fn union(&self, other: &PointCloud) -> Result<PointCloud> {
        self.check_dim(other)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(Self { dim: self.dim, coords })
    }

    pub fn subset(&self, indices: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self { dim: self.dim, coords }
    }

    /// Index of the first point with exactly these coordinates.
    pub fn position(&self, p: &[f64]) -> Option<usize> {
        self.iter().position(|q| q == p)
    }

    /// Largest pairwise distance; 0 for fewer than two points.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(self.distance(i, j));
            }
        }
        best
    }

    pub(crate) fn check_dim(&self, other: &PointCloud) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// Serialises as the point CSV format (no header, 17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(|&c| crate::fmt::g17(c)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A probability measure with finite support: point masses on a [`PointCloud`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    support: PointCloud,
    masses: Vec<f64>,
}

impl DiscreteMeasure {
    /// Masses must be positive and sum to 1 within 1e-12.
    pub fn new(support: PointCloud, masses: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Empty("measure support"));
        }
        if masses.len() != support.len() {
            return Err(Error::Measure(format!("{} masses for {} support points", masses.len(), support.len())));
        }
        if let Some(i) = masses.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Measure(format!("mass of point {i} is not positive")));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Measure(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self { support, masses })
    }

    /// Rescales positive weights to total mass 1.
    pub fn normalized(support: PointCloud, weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Measure(format!("weight of point {i} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        let masses = weights.into_iter().map(|w| w / total).collect();
        Self::new(support, masses)
    }

    /// The empirical measure μ_X: mass 1/|X| on every point.
    pub fn uniform(support: PointCloud) -> Result<Self> {
        let n = support.len();
        if n == 0 {
            return Err(Error::Empty("measure support"));
        }
        Ok(Self { masses: vec![1.0 / n as f64; n], support })
    }

    pub fn support(&self) -> &PointCloud {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn into_support(self) -> PointCloud {
        self.support
    }
}

/// A finite series of real samples, used as input to [`delay_embedding`].
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("time series"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Parameter(format!("sample {i} is not finite")));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Reads one or more comma/whitespace separated values per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            for field in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Parse { line: lineno + 1, message: format!("not a number: {field:?}") })?;
                samples.push(v);
            }
        }
        Self::new(samples)
    }
}

/// Parses the point CSV format. Without `weighted` every point gets mass
/// 1/n; with it the last column is a positive weight, renormalised to sum 1.
pub fn parse_points(text: &str, weighted: bool) -> Result<DiscreteMeasure> {
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut arity: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        match arity {
            None => arity = Some(fields.len()),
            Some(a) if a != fields.len() => {
                return Err(Error::Parse { line, message: format!("expected {a} fields, found {}", fields.len()) })
            }
            _ => {}
        }
        let mut values = Vec::with_capacity(fields.len());
        for f in &fields {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line, message: format!("not a number: {:?}", f.trim()) })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, message: format!("non-finite value {:?}", f.trim()) });
            }
            values.push(v);
        }
        if weighted {
            if values.len() < 2 {
                return Err(Error::Parse { line, message: "weighted rows need at least one coordinate and a mass".into() });
            }
            let w = values.pop().unwrap();
            if w <= 0.0 {
                return Err(Error::Parse { line, message: format!("mass {w} is not positive") });
            }
            weights.push(w);
        }
        coords.extend(values);
    }
    let arity = arity.ok_or(Error::Parse { line: 1, message: "no points in input".into() })?;
    let dim = if weighted { arity - 1 } else { arity };
    let cloud = PointCloud::new(dim, coords)?;
    if weighted {
        DiscreteMeasure::normalized(cloud, weights)
    } else {
        DiscreteMeasure::uniform(cloud)
    }
}

/// Reads a point CSV file; see [`parse_points`].
pub fn load_points(path: impl AsRef<Path>, weighted: bool) -> Result<DiscreteMeasure> {
    let text = std::fs::read_to_string(path)?;
    parse_points(&text, weighted)
}

/// Row-major symmetric matrix of pairwise distances.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn pairwise_distances(x: &PointCloud) -> DistanceMatrix {
    let n = x.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = x.distance(i, j);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix { n, data }
}

/// Largest distance from a point of `from` to its nearest point of `to`.
fn directed_hausdorff(from: &PointCloud, to: &PointCloud) -> f64 {
    from.iter()
        .map(|a| to.iter().map(|b| euclidean(a, b)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two nonempty clouds.
pub fn hausdorff(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    x.check_dim(y)?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("hausdorff operand"));
    }
    Ok(directed_hausdorff(x, y).max(directed_hausdorff(y, x)))
}

/// Sliding-window embedding: point k is `(s_k, s_{k+stride}, …, s_{k+(dim-1)·stride})`.
pub fn delay_embedding(s: &TimeSeries, dim: usize, stride: usize) -> Result<PointCloud> {
    if dim == 0 || stride == 0 {
        return Err(Error::Parameter("embedding dimension and stride must be positive".into()));
    }
    let span = (dim - 1) * stride;
    let samples = s.samples();
    if samples.len() <= span {
        return Err(Error::Parameter(format!(
            "series of length {} is too short for dimension {dim} and stride {stride} (need at least {})",
            samples.len(),
            span + 1
        )));
    }
    let count = samples.len() - span;
    let mut coords = Vec::with_capacity(count * dim);
    for k in 0..count {
        coords.extend((0..dim).map(|j| samples[k + j * stride]));
    }
    PointCloud::new(dim, coords)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    /// Uniform sample of the unit circle.
    Circle,
    /// Uniform sample of `[-1,1]²`.
    Square,
    /// `n` circle points followed by `outliers` square points.
    CircleWithOutliers,
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Self::Circle),
            "square" => Ok(Self::Square),
            "circle-with-outliers" => Ok(Self::CircleWithOutliers),
            other => Err(Error::Parameter(format!("unknown synthetic kind {other:?}"))),
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Circle => "circle",
            Self::Square => "square",
            Self::CircleWithOutliers => "circle-with-outliers",
        })
    }
}

/// Seeded synthetic clouds in ℝ².
///
/// The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), so
/// outputs are reproducible across platforms. Circle points are drawn
/// before outliers from a single stream: `CircleWithOutliers` with seed `s`
/// starts with exactly the points of `Circle` with seed `s`.
pub fn synth(kind: SynthKind, n: usize, outliers: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::new();
    let circle = |rng: &mut ChaCha8Rng, coords: &mut Vec<f64>, count: usize| {
        for _ in 0..count {
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            coords.push(theta.cos());
            coords.push(theta.sin());
        }
    };
    let square = |rng: &mut ChaCha8Rng, coords: &mut Vec<f64>, count: usize| {
        for _ in 0..2 * count {
            coords.push(rng.random_range(-1.0..=1.0));
        }
    };
    match kind {
        SynthKind::Circle => circle(&mut rng, &mut coords, n),
        SynthKind::Square => square(&mut rng, &mut coords, n),
        SynthKind::CircleWithOutliers => {
            circle(&mut rng, &mut coords, n);
            square(&mut rng, &mut coords, outliers);
        }
    }
    PointCloud::new(2, coords)
}
