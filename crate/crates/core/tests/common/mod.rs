//! Brute-force oracles shared by the integration tests. None of them reuse
//! the library's reduction, matching or transport code.

#![allow(dead_code)]

use dtmf::persistence::DiagramPoint;
use dtmf::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cloud(rng: &mut impl Rng, n: usize, dim: usize) -> PointCloud {
    PointCloud::new(dim, (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

// ---------------------------------------------------------------------------
// Persistence via ranks of inclusion-induced maps.

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }
    fn top(&self) -> Option<usize> {
        self.0.iter().enumerate().rev().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + 63 - w.leading_zeros() as usize)
    }
}

/// Rank over GF(2) of a set of vectors.
fn rank(mut rows: Vec<Bits>) -> usize {
    let mut basis: Vec<(usize, Bits)> = Vec::new();
    for r in rows.iter_mut() {
        loop {
            let Some(t) = r.top() else { break };
            match basis.iter().find(|(bt, _)| *bt == t) {
                Some((_, b)) => r.xor(b),
                None => {
                    basis.push((t, r.clone()));
                    break;
                }
            }
        }
    }
    basis.len()
}

/// Basis of the kernel of the boundary map restricted to `chains`
/// (indices into the q-simplex list), as vectors over q-simplices.
fn cycle_basis(chains: &[usize], boundary: &[Bits], n_q: usize) -> Vec<Bits> {
    // Gaussian elimination tracking combinations.
    let mut work: Vec<(Bits, Bits)> = chains
        .iter()
        .map(|&c| {
            let mut id = Bits::zero(n_q);
            id.set(c);
            (boundary[c].clone(), id)
        })
        .collect();
    let mut cycles = Vec::new();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for k in 0..work.len() {
        loop {
            let Some(t) = work[k].0.top() else {
                cycles.push(work[k].1.clone());
                break;
            };
            match pivots.iter().find(|(pt, _)| *pt == t) {
                Some(&(_, j)) => {
                    let (b, id) = work[j].clone();
                    work[k].0.xor(&b);
                    work[k].1.xor(&id);
                }
                None => {
                    pivots.push((t, k));
                    break;
                }
            }
        }
    }
    cycles
}

/// Diagram of the filtration `simplices` (vertex lists with values) in
/// degree `q`, from the ranks of the maps `H_q(K_a) → H_q(K_b)` at all
/// critical values. Zero-length bars do not appear.
pub fn rank_diagram(simplices: &[(Vec<usize>, f64)], q: usize) -> Vec<(f64, f64)> {
    let mut levels: Vec<f64> = simplices.iter().map(|s| s.1).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let of_dim = |d: usize| -> Vec<&(Vec<usize>, f64)> { simplices.iter().filter(|s| s.0.len() == d + 1).collect() };
    let qs = of_dim(q);
    let q1 = of_dim(q + 1);
    let faces = |s: &Vec<usize>, list: &[&(Vec<usize>, f64)]| -> Bits {
        let mut b = Bits::zero(list.len());
        if s.len() == 1 {
            return b;
        }
        for skip in 0..s.len() {
            let f: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let idx = list.iter().position(|t| t.0 == f).expect("face present");
            b.set(idx);
        }
        b
    };
    let qm1 = if q == 0 { Vec::new() } else { of_dim(q - 1) };
    let bd_q: Vec<Bits> = qs.iter().map(|s| if q == 0 { Bits::zero(1) } else { faces(&s.0, &qm1) }).collect();
    let bd_q1: Vec<Bits> = q1.iter().map(|s| faces(&s.0, &qs)).collect();

    let nl = levels.len();
    let z: Vec<Vec<Bits>> = (0..nl)
        .map(|a| {
            let chains: Vec<usize> = (0..qs.len()).filter(|&i| qs[i].1 <= levels[a]).collect();
            cycle_basis(&chains, &bd_q, qs.len())
        })
        .collect();
    let b: Vec<Vec<Bits>> = (0..nl).map(|a| (0..q1.len()).filter(|&i| q1[i].1 <= levels[a]).map(|i| bd_q1[i].clone()).collect()).collect();
    let rb: Vec<usize> = b.iter().map(|v| rank(v.clone())).collect();
    // beta[a][b] for a <= b; index nl stands for "before the first level".
    let beta = |a: isize, bb: usize| -> isize {
        if a < 0 {
            return 0;
        }
        let a = a as usize;
        let mut rows = z[a].clone();
        rows.extend(b[bb].iter().cloned());
        (rank(rows) - rb[bb]) as isize
    };
    let mut out = Vec::new();
    for i in 0..nl {
        for j in i + 1..nl {
            let mult = beta(i as isize, j - 1) - beta(i as isize, j) - beta(i as isize - 1, j - 1) + beta(i as isize - 1, j);
            assert!(mult >= 0);
            for _ in 0..mult {
                out.push((levels[i], levels[j]));
            }
        }
        let last = nl - 1;
        let mult = beta(i as isize, last) - beta(i as isize - 1, last);
        for _ in 0..mult {
            out.push((levels[i], f64::INFINITY));
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    out
}

pub fn as_pairs(points: &[DiagramPoint]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = points.iter().map(|p| (p.birth, p.death)).collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    v
}

/// Standard Rips filtration (values are half the longest edge) of all
/// simplices up to `max_dim`, enumerated directly.
pub fn standard_rips(x: &PointCloud, max_dim: usize) -> Vec<(Vec<usize>, f64)> {
    let n = x.len();
    let mut out = Vec::new();
    fn rec(x: &PointCloud, n: usize, cur: &mut Vec<usize>, start: usize, max_len: usize, out: &mut Vec<(Vec<usize>, f64)>) {
        if !cur.is_empty() {
            let mut v = 0.0f64;
            for a in 0..cur.len() {
                for b in a + 1..cur.len() {
                    let d: f64 = x.point(cur[a]).iter().zip(x.point(cur[b])).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
                    v = v.max(d / 2.0);
                }
            }
            out.push((cur.clone(), v));
        }
        if cur.len() == max_len {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(x, n, cur, i + 1, max_len, out);
            cur.pop();
        }
    }
    rec(x, n, &mut Vec::new(), 0, max_dim + 1, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Bottleneck by enumerating partial matchings.

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

pub fn brute_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn rec(a: &[(f64, f64)], b: &[(f64, f64)], i: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if acc >= *best {
            return;
        }
        if i == a.len() {
            let rest = b.iter().zip(used.iter()).filter(|(_, &u)| !u).map(|(q, _)| (q.1 - q.0) / 2.0).fold(acc, f64::max);
            *best = best.min(rest);
            return;
        }
        rec(a, b, i + 1, used, acc.max((a[i].1 - a[i].0) / 2.0), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                rec(a, b, i + 1, used, acc.max(linf(a[i], b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(a, b, 0, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

// ---------------------------------------------------------------------------
// W2 between uniform measures of equal size: best permutation.

pub fn brute_w2_uniform(x: &PointCloud, y: &PointCloud) -> f64 {
    let n = x.len();
    assert_eq!(n, y.len());
    let cost = |i: usize, j: usize| -> f64 { x.point(i).iter().zip(y.point(j)).map(|(p, q)| (p - q) * (p - q)).sum() };
    fn rec(n: usize, i: usize, used: &mut Vec<bool>, acc: f64, cost: &dyn Fn(usize, usize) -> f64, best: &mut f64) {
        if i == n {
            *best = best.min(acc);
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                rec(n, i + 1, used, acc + cost(i, j), cost, best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(n, 0, &mut vec![false; n], 0.0, &cost, &mut best);
    (best / n as f64).sqrt()
}
