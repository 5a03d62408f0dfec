//! Exact discrete optimal transport with integral supplies.
//!
//! Masses are snapped to rationals, scaled by their common denominator and
//! routed with successive shortest paths on the dense bipartite graph.

use crate::{Error, Result};

/// Largest denominator accepted when snapping a mass to a rational.
pub const MAX_DENOMINATOR: u64 = 1_000_000;
/// Largest distance a mass may move when snapped.
pub const SNAP_TOLERANCE: f64 = 1e-9;
const SCALE_CAP: u128 = 1 << 60;

/// Best rational approximation `num/den` of `x ∈ [0, 1]` with `den ≤ max_den`.
pub fn rationalize(x: f64, max_den: u64) -> (u64, u64) {
    // Continued-fraction convergents, with the best semiconvergent at the end.
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    loop {
        let a = r.floor();
        if a > u64::MAX as f64 / 2.0 {
            break;
        }
        let a = a as u64;
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            if qs > 0 && (ps as f64 / qs as f64 - x).abs() < (p1 as f64 / q1 as f64 - x).abs() {
                return (ps, qs);
            }
            break;
        }
        let p2 = a * p1 + p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 || (p1 as f64 / q1 as f64 - x).abs() == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    (p1, q1.max(1))
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Denominator of the fallback grid used when the exact common denominator
/// is too large or the snapped totals disagree.
pub const GRID: u128 = 1_000_000_000;

/// Integer supplies proportional to `a` and `b`, with a shared total.
///
/// Masses are snapped to rationals and scaled by their least common
/// denominator. If that fails, they are rounded to multiples of `1/GRID`
/// and the rounding residue is put on the largest entry of each side.
pub fn integral_supplies(a: &[f64], b: &[f64]) -> Result<(Vec<u128>, Vec<u128>, u128)> {
    if let Some(exact) = exact_supplies(a, b)? {
        return Ok(exact);
    }
    let sa = grid_supplies(a)?;
    let sb = grid_supplies(b)?;
    Ok((sa, sb, GRID))
}

fn exact_supplies(a: &[f64], b: &[f64]) -> Result<Option<(Vec<u128>, Vec<u128>, u128)>> {
    let mut fracs = Vec::with_capacity(a.len() + b.len());
    for &x in a.iter().chain(b) {
        let (n, d) = rationalize(x, MAX_DENOMINATOR);
        if (n as f64 / d as f64 - x).abs() > SNAP_TOLERANCE {
            return Err(Error::Measure(format!("mass {x} cannot be snapped to a rational with denominator at most {MAX_DENOMINATOR}")));
        }
        fracs.push((n, d));
    }
    let mut lcd: u128 = 1;
    for &(_, d) in &fracs {
        let d = d as u128;
        lcd = lcd / gcd(lcd, d) * d;
        if lcd > SCALE_CAP {
            return Ok(None);
        }
    }
    let scaled: Vec<u128> = fracs.iter().map(|&(n, d)| n as u128 * (lcd / d as u128)).collect();
    let (sa, sb) = scaled.split_at(a.len());
    let (ta, tb): (u128, u128) = (sa.iter().sum(), sb.iter().sum());
    if ta != tb || ta != lcd {
        return Ok(None);
    }
    Ok(Some((sa.to_vec(), sb.to_vec(), ta)))
}

fn grid_supplies(a: &[f64]) -> Result<Vec<u128>> {
    let mut s: Vec<u128> = a.iter().map(|&x| (x * GRID as f64).round().max(0.0) as u128).collect();
    let total: u128 = s.iter().sum();
    let Some(big) = (0..s.len()).max_by(|&i, &j| s[i].cmp(&s[j])) else {
        return Err(Error::Empty("measure"));
    };
    if total > GRID {
        s[big] = s[big].checked_sub(total - GRID).ok_or_else(|| Error::Measure("masses do not sum to 1".into()))?;
    } else {
        s[big] += GRID - total;
    }
    let moved = (s[big] as f64 / GRID as f64 - a[big]).abs();
    if moved > SNAP_TOLERANCE * 10.0 {
        return Err(Error::Measure(format!("masses do not sum to 1 (residue {moved})")));
    }
    Ok(s)
}

/// Minimum of `Σ π_ij c_ij` over plans `π` with row sums `supply` and column
/// sums `demand` (equal totals). `cost` is row-major `supply.len() × demand.len()`.
pub fn min_cost_transport(supply: &[u128], demand: &[u128], cost: &[f64]) -> f64 {
    let (n, m) = (supply.len(), demand.len());
    assert_eq!(cost.len(), n * m);
    let mut left = supply.to_vec();
    let mut right = demand.to_vec();
    let mut flow = vec![0u128; n * m];
    let mut pot = vec![0.0f64; n + m];
    let total: u128 = supply.iter().sum();
    let mut shipped = 0u128;
    let mut dist = vec![0.0f64; n + m];
    let mut prev = vec![usize::MAX; n + m];
    let mut done = vec![false; n + m];

    while shipped < total {
        // Dijkstra over reduced costs from every source with remaining supply.
        for v in 0..n + m {
            dist[v] = f64::INFINITY;
            prev[v] = usize::MAX;
            done[v] = false;
        }
        for i in 0..n {
            if left[i] > 0 {
                dist[i] = 0.0;
            }
        }
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..n + m {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < n {
                for j in 0..m {
                    let w = n + j;
                    let nd = best + (cost[u * m + j] + pot[u] - pot[w]).max(0.0);
                    if nd < dist[w] {
                        dist[w] = nd;
                        prev[w] = u;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if flow[i * m + j] > 0 {
                        let nd = best + (-cost[i * m + j] + pot[u] - pot[i]).max(0.0);
                        if nd < dist[i] {
                            dist[i] = nd;
                            prev[i] = u;
                        }
                    }
                }
            }
        }
        let sink = (0..m).filter(|&j| right[j] > 0 && dist[n + j].is_finite()).min_by(|&a, &b| dist[n + a].total_cmp(&dist[n + b]));
        let Some(sink) = sink else { break };
        let finite_max = dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
        for v in 0..n + m {
            pot[v] += if dist[v].is_finite() { dist[v] } else { finite_max };
        }

        // Bottleneck along the path.
        let mut amount = right[sink];
        let mut v = n + sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= n {
                amount = amount.min(flow[v * m + (u - n)]);
            }
            v = u;
        }
        amount = amount.min(left[v]);

        let mut v = n + sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < n {
                flow[u * m + (v - n)] += amount;
            } else {
                flow[v * m + (u - n)] -= amount;
            }
            v = u;
        }
        left[v] -= amount;
        right[sink] -= amount;
        shipped += amount;
    }

    let mut acc = 0.0;
    for (k, &f) in flow.iter().enumerate() {
        if f > 0 {
            acc += f as f64 * cost[k];
        }
    }
    acc
}
