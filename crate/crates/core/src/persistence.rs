//! Persistence diagrams over GF(2).
//!
//! [`reduce`] runs the column algorithm on the boundary matrix of any
//! [`FilteredComplex`]. [`flag_persistence`] computes degrees 0 and 1 of a
//! flag complex straight from its [`WeightedGraph`] (union-find for `H0`,
//! cohomology with implicit triangles for `H1`) so the 2-skeleton never has
//! to be stored.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::filtration::{FilteredComplex, WeightedGraph};
use crate::fmt::{g17, parse_f64};
use crate::{Error, Result};

/// A `(dim, birth, death)` triple; `death` is `+∞` for essential classes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramPoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Self { dim, birth, death }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    fn order(a: &Self, b: &Self) -> std::cmp::Ordering {
        a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death))
    }
}

/// Multiset of diagram points, sorted by `(dim, birth, death)`.
///
/// Zero-persistence points are stored but skipped by [`nontrivial`](Self::nontrivial)
/// and by default CSV output.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
    censor_value: Option<f64>,
}

impl PersistenceDiagram {
    pub fn new(mut points: Vec<DiagramPoint>, censor_value: Option<f64>) -> Result<Self> {
        for q in &points {
            if q.birth.is_nan() || q.death.is_nan() || q.birth.is_infinite() || q.death < q.birth {
                return Err(Error::Parameter(format!("invalid diagram point ({}, {}, {})", q.dim, q.birth, q.death)));
            }
        }
        points.sort_by(DiagramPoint::order);
        Ok(Self { points, censor_value })
    }

    /// All points, zero-persistence pairs included.
    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &DiagramPoint> + '_ {
        self.points.iter().filter(|q| q.death > q.birth)
    }

    /// Nontrivial points of one dimension.
    pub fn in_dim(&self, dim: usize) -> Vec<DiagramPoint> {
        self.nontrivial().filter(|q| q.dim == dim).copied().collect()
    }

    /// The truncation level; essential points may be classes cut off there.
    pub fn censor_value(&self) -> Option<f64> {
        self.censor_value
    }

    /// Number of points of `dim` with `birth ≤ t < death`.
    pub fn betti(&self, t: f64, dim: usize) -> usize {
        self.points.iter().filter(|q| q.dim == dim && q.birth <= t && t < q.death).count()
    }

    /// The `dim` point with the largest persistence, essential points first.
    pub fn most_persistent(&self, dim: usize) -> Option<DiagramPoint> {
        self.nontrivial().filter(|q| q.dim == dim).copied().max_by(|a, b| a.persistence().total_cmp(&b.persistence()))
    }

    /// `dim,birth,death` CSV with 17 significant digits.
    pub fn to_csv(&self, include_trivial: bool) -> String {
        let mut out = String::from("dim,birth,death\n");
        for q in self.points.iter().filter(|q| include_trivial || q.death > q.birth) {
            out.push_str(&format!("{},{},{}\n", q.dim, g17(q.birth), g17(q.death)));
        }
        out
    }

    /// Parses [`to_csv`](Self::to_csv) output; the header is optional.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() || (line == 1 && row.starts_with("dim")) {
                continue;
            }
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse { line, message: "expected `dim,birth,death`".into() });
            }
            let dim = fields[0].parse().map_err(|_| Error::Parse { line, message: format!("bad dimension {:?}", fields[0]) })?;
            let birth = parse_f64(fields[1]).ok_or_else(|| Error::Parse { line, message: format!("bad birth {:?}", fields[1]) })?;
            let death = parse_f64(fields[2]).ok_or_else(|| Error::Parse { line, message: format!("bad death {:?}", fields[2]) })?;
            if !(birth.is_finite() && death >= birth) {
                return Err(Error::Parse { line, message: format!("invalid interval [{birth}, {death})") });
            }
            points.push(DiagramPoint::new(dim, birth, death));
        }
        Self::new(points, None)
    }
}

/// Options for [`reduce_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Reduce from the top dimension down and zero out columns already known
    /// to be positive.
    pub clearing: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { clearing: true }
    }
}

/// Diagram of `k` in the homology dimensions `dims`.
///
/// Degree `q` is only meaningful if `k` contains its `(q+1)`-simplices;
/// otherwise every `q`-cycle is reported as essential.
pub fn reduce(k: &FilteredComplex, dims: &[usize]) -> Result<PersistenceDiagram> {
    reduce_with(k, dims, ReduceOptions::default())
}

pub fn reduce_with(k: &FilteredComplex, dims: &[usize], opts: ReduceOptions) -> Result<PersistenceDiagram> {
    let entries = k.entries();
    let index = k.index();
    let wanted = |d: usize| dims.contains(&d) || (d > 0 && dims.contains(&(d - 1)));

    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(entries.len());
    for (pos, (s, v)) in entries.iter().enumerate() {
        let mut col = Vec::new();
        if wanted(s.dim()) {
            for face in s.faces() {
                match index.get(face.as_slice()) {
                    Some(&f) if f < pos && entries[f].1 <= *v => col.push(f),
                    _ => return Err(Error::Integrity(format!("face {face:?} of [{s}] is missing or out of order"))),
                }
            }
            col.sort_unstable();
        }
        columns.push(col);
    }

    let mut order: Vec<usize> = (0..entries.len()).filter(|&j| wanted(entries[j].0.dim())).collect();
    if opts.clearing {
        order.sort_by_key(|&j| (Reverse(entries[j].0.dim()), j));
    }

    let mut pivot_of: HashMap<usize, usize> = HashMap::new();
    let mut paired = vec![false; entries.len()];
    for j in order {
        if opts.clearing && paired[j] {
            columns[j].clear();
            continue;
        }
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match pivot_of.get(&low) {
                Some(&other) => col = symmetric_difference(&col, &columns[other]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivot_of.insert(low, j);
            paired[low] = true;
            paired[j] = true;
        }
        columns[j] = col;
    }

    let mut points = Vec::new();
    for (j, (s, v)) in entries.iter().enumerate() {
        let d = s.dim();
        if !dims.contains(&d) {
            continue;
        }
        if let Some(&killer) = pivot_of.get(&j) {
            points.push(DiagramPoint::new(d, *v, entries[killer].1));
        } else if columns[j].is_empty() {
            points.push(DiagramPoint::new(d, *v, f64::INFINITY));
        }
    }
    PersistenceDiagram::new(points, k.truncation())
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Betti number of `k` in degree `dim` at level `t`.
pub fn betti(k: &FilteredComplex, t: f64, dim: usize) -> Result<usize> {
    Ok(reduce(k, &[dim])?.betti(t, dim))
}

const VERTEX_BITS: u32 = 21;

/// Diagram of the flag complex of `g` up to dimension `max_dim`.
///
/// Degrees 0 and 1 with `max_dim ≤ 2` are computed without materialising the
/// complex; anything else falls back to [`reduce`] on the explicit flag
/// complex, refusing to build more than `limit` simplices.
pub fn flag_persistence(g: &WeightedGraph, max_dim: usize, dims: &[usize], limit: usize) -> Result<PersistenceDiagram> {
    let direct = max_dim <= 2 && dims.iter().all(|&d| d <= 1);
    if !direct || g.len() >= 1 << VERTEX_BITS {
        let k = g.flag_complex_limited(max_dim, limit)?;
        return reduce(&k, dims);
    }
    let mut points = Vec::new();
    let vertices: Vec<usize> = (0..g.len()).filter(|&v| g.has_vertex(v)).collect();
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    if max_dim >= 1 {
        for (a, &i) in vertices.iter().enumerate() {
            for &j in &vertices[a + 1..] {
                if g.has_edge(i, j) {
                    edges.push((g.edge(i, j), i, j));
                }
            }
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    }

    // H0: elder rule on union-find; `negative[e]` marks edges that merge components.
    let mut parent: Vec<usize> = (0..g.len()).collect();
    let rank_key = |v: usize| (g.vertex(v), v);
    let mut negative = vec![false; edges.len()];
    for (e, &(value, i, j)) in edges.iter().enumerate() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri == rj {
            continue;
        }
        negative[e] = true;
        let (elder, younger) = if rank_key(ri).0.total_cmp(&rank_key(rj).0).then(ri.cmp(&rj)).is_le() { (ri, rj) } else { (rj, ri) };
        if dims.contains(&0) {
            points.push(DiagramPoint::new(0, g.vertex(younger), value));
        }
        parent[younger] = elder;
    }
    if dims.contains(&0) {
        for &v in &vertices {
            if find(&mut parent, v) == v {
                points.push(DiagramPoint::new(0, g.vertex(v), f64::INFINITY));
            }
        }
    }

    if dims.contains(&1) {
        cohomology_h1(g, &edges, &negative, max_dim >= 2, &mut points);
    }
    PersistenceDiagram::new(points, Some(g.t_max()).filter(|t| t.is_finite()))
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

type Coface = Reverse<(u64, u64)>;

#[inline]
fn triangle_key(mut t: [usize; 3]) -> u64 {
    t.sort_unstable();
    ((t[0] as u64) << (2 * VERTEX_BITS)) | ((t[1] as u64) << VERTEX_BITS) | t[2] as u64
}

/// Pushes the triangles containing edge `(i, j)` onto `heap`, keyed in
/// filtration order (values are non-negative, so their bit patterns sort).
fn push_coboundary(g: &WeightedGraph, i: usize, j: usize, value: f64, heap: &mut BinaryHeap<Coface>) {
    for w in 0..g.len() {
        if w == i || w == j || !g.has_edge(i, w) || !g.has_edge(j, w) {
            continue;
        }
        let v = value.max(g.edge(i, w)).max(g.edge(j, w));
        heap.push(Reverse((v.to_bits(), triangle_key([i, j, w]))));
    }
}

/// Pops the smallest coface that survives mod-2 cancellation.
fn pop_pivot(heap: &mut BinaryHeap<Coface>) -> Option<(u64, u64)> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek().is_some_and(|Reverse(next)| *next == top) {
            heap.pop();
            continue;
        }
        return Some(top);
    }
    None
}

fn cohomology_h1(g: &WeightedGraph, edges: &[(f64, usize, usize)], negative: &[bool], triangles: bool, points: &mut Vec<DiagramPoint>) {
    // pivot triangle -> cocycle (edge indices) whose coboundary has that pivot
    let mut pivots: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for e in (0..edges.len()).rev() {
        if negative[e] {
            continue;
        }
        let (value, i, j) = edges[e];
        if !triangles {
            points.push(DiagramPoint::new(1, value, f64::INFINITY));
            continue;
        }
        heap.clear();
        let mut cocycle = vec![e];
        push_coboundary(g, i, j, value, &mut heap);
        let death = loop {
            let Some(pivot) = pop_pivot(&mut heap) else { break None };
            match pivots.get(&pivot.1) {
                Some(other) => {
                    for &o in other {
                        let (ov, oi, oj) = edges[o];
                        push_coboundary(g, oi, oj, ov, &mut heap);
                    }
                    cocycle = symmetric_difference(&cocycle, other);
                    heap.push(Reverse(pivot));
                }
                None => {
                    pivots.insert(pivot.1, cocycle);
                    break Some(f64::from_bits(pivot.0));
                }
            }
        };
        points.push(DiagramPoint::new(1, value, death.unwrap_or(f64::INFINITY)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtm::{DtmParams, WeightFunction};
    use crate::filtration::{build_weighted_rips, dtm_filtration_of, PExponent, Simplex};
    use crate::pointcloud::{DiscreteMeasure, PointCloud};
    use proptest::prelude::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn square() -> FilteredComplex {
        let x = PointCloud::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        build_weighted_rips(&x, &WeightFunction::zeros(4), PExponent::ONE, 2, 5.0).unwrap()
    }

    #[test]
    fn two_vertices() {
        let k = FilteredComplex::new(vec![(s(&[0]), 0.0), (s(&[1]), 0.0), (s(&[0, 1]), 0.5)], 2).unwrap();
        let d = reduce(&k, &[0]).unwrap();
        assert_eq!(d.in_dim(0), vec![DiagramPoint::new(0, 0.0, 0.5), DiagramPoint::new(0, 0.0, f64::INFINITY)]);
        assert_eq!(betti(&k, 1.0, 0).unwrap(), 1);
        assert_eq!(betti(&k, -1.0, 0).unwrap(), 0);
    }

    #[test]
    fn square_cycle() {
        let k = square();
        let d = reduce(&k, &[0, 1]).unwrap();
        assert_eq!(d.in_dim(1), vec![DiagramPoint::new(1, 0.5, 2f64.sqrt() / 2.0)]);
        assert_eq!(d.betti(0.6, 1), 1);
        assert_eq!(d.points().iter().filter(|q| q.dim == 0).count(), 4);
    }

    #[test]
    fn weighted_two_point_barcode() {
        let mu = DiscreteMeasure::new(PointCloud::from_rows(vec![vec![-1.0], vec![1.0]]).unwrap(), vec![0.2, 0.8]).unwrap();
        let k = dtm_filtration_of(&mu, DtmParams::new(0.3).unwrap(), PExponent::ONE, 1, 10.0).unwrap();
        let d = reduce(&k, &[0]).unwrap();
        let pts = d.in_dim(0);
        assert_eq!(pts[0], DiagramPoint::new(0, 0.0, f64::INFINITY));
        assert!((pts[1].birth - 1.1547005383792515).abs() < 1e-12);
        assert!((pts[1].death - 1.5773502691896257).abs() < 1e-12);
    }

    #[test]
    fn clearing_matches_plain_reduction() {
        let k = square();
        let a = reduce_with(&k, &[0, 1, 2], ReduceOptions { clearing: true }).unwrap();
        let b = reduce_with(&k, &[0, 1, 2], ReduceOptions { clearing: false }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip() {
        let d = reduce(&square(), &[0, 1]).unwrap();
        let text = d.to_csv(false);
        assert!(text.starts_with("dim,birth,death\n0,0,0.5\n") && text.contains("0,0,inf\n"));
        assert!(text.contains("1,0.5,0.70710678118654757\n"));
        let back = PersistenceDiagram::parse_csv(&text).unwrap();
        assert_eq!(back.to_csv(false), text);
        assert!(PersistenceDiagram::parse_csv("dim,birth,death\n0,2,1\n").is_err());
    }

    fn random_graph(coords: &[f64], weights: &[f64], p: f64, t_max: f64) -> WeightedGraph {
        let x = PointCloud::new(2, coords[..coords.len() / 2 * 2].to_vec()).unwrap();
        let f = WeightFunction::new(weights[..x.len()].to_vec()).unwrap();
        WeightedGraph::weighted_rips(&x, &f, PExponent::Finite(p), t_max).unwrap()
    }

    proptest! {
        #[test]
        fn flag_engine_matches_reduction(
            coords in prop::collection::vec(-1.0f64..1.0, 2..28),
            weights in prop::collection::vec(0.0f64..0.5, 14),
            p in 1.0f64..3.0,
            t_max in 0.3f64..3.0,
            max_dim in 1usize..=2,
        ) {
            let g = random_graph(&coords, &weights, p, t_max);
            let dims: Vec<usize> = (0..max_dim).collect();
            let fast = flag_persistence(&g, max_dim, &dims, usize::MAX).unwrap();
            let slow = reduce(&g.flag_complex(max_dim), &dims).unwrap();
            prop_assert_eq!(fast.in_dim(0), slow.in_dim(0));
            prop_assert_eq!(fast.in_dim(1), slow.in_dim(1));
        }

        #[test]
        fn clearing_is_transparent(coords in prop::collection::vec(-1.0f64..1.0, 2..20), weights in prop::collection::vec(0.0f64..0.5, 10)) {
            let k = random_graph(&coords, &weights, 2.0, 10.0).flag_complex(3);
            let a = reduce_with(&k, &[0, 1, 2], ReduceOptions { clearing: true }).unwrap();
            let b = reduce_with(&k, &[0, 1, 2], ReduceOptions { clearing: false }).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn dim0_count_is_vertex_count(coords in prop::collection::vec(-1.0f64..1.0, 2..24), weights in prop::collection::vec(0.0f64..0.5, 12)) {
            let k = random_graph(&coords, &weights, 1.5, 10.0).flag_complex(2);
            let d = reduce(&k, &[0]).unwrap();
            prop_assert_eq!(d.points().len(), coords.len() / 2);
        }
    }
}
