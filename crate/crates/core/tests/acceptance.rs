//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::*;
use dtmf::dtm::{dtm_on, full_simplex_value};
use dtmf::filtration::{edge_value_bisect, EDGE_TOL};
use dtmf::metrics::{bound_t413, dtm_diagram};
use dtmf::prelude::*;
use rand::Rng;

struct Outcome {
    ok: bool,
    /// Passed on a corrected reading of the criterion; the detail says which.
    amended: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, amended: false, detail: detail.into() }
}

fn run(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|e| outcome(false, format!("panicked: {}", e.downcast_ref::<String>().cloned().unwrap_or_default())));
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let ok = out.ok && in_time;
    println!(
        "{} [{id:>2}] {name}: {} ({:.2}s, limit {}s{})",
        match (ok, out.amended) {
            (true, false) => "PASS",
            (true, true) => "PASS (amended)",
            _ => "FAIL",
        },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", over time" }
    );
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn closed_forms() -> Outcome {
    let mut r = rng(101);
    let (mut worst1, mut worst2, mut inf_bad) = (0.0f64, 0.0f64, 0);
    for _ in 0..10_000 {
        let d = r.random_range(0.0..5.0);
        let fx = r.random_range(0.0..3.0);
        let fy = r.random_range(0.0..3.0);
        worst1 = worst1.max((edge_value_bisect(d, fx, fy, 1.0, EDGE_TOL) - edge_value(d, fx, fy, PExponent::ONE, EDGE_TOL)).abs());
        worst2 = worst2.max((edge_value_bisect(d, fx, fy, 2.0, EDGE_TOL) - edge_value(d, fx, fy, PExponent::TWO, EDGE_TOL)).abs());
        if edge_value(d, fx, fy, PExponent::Infinity, EDGE_TOL) != fx.max(fy).max(d / 2.0) {
            inf_bad += 1;
        }
    }
    outcome(worst1 <= 1e-10 && worst2 <= 1e-10 && inf_bad == 0, format!("max |Δ| p=1 {worst1:.1e}, p=2 {worst2:.1e}; p=∞ mismatches {inf_bad}"))
}

fn zero_weight_rips() -> Outcome {
    let mut r = rng(202);
    let mut bad = 0;
    for _ in 0..10 {
        let n = r.random_range(4..=12);
        let x = random_cloud(&mut r, n, 2);
        let k = build_weighted_rips(&x, &WeightFunction::zeros(n), PExponent::ONE, 2, f64::INFINITY).unwrap();
        let d = reduce(&k, &[0, 1]).unwrap();
        let oracle = standard_rips(&x, 2);
        for q in 0..=1 {
            if as_pairs(&d.in_dim(q)) != rank_diagram(&oracle, q) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} mismatching diagrams over 10 clouds x 2 degrees"))
}

fn two_point_barcode() -> Outcome {
    let mu = DiscreteMeasure::new(PointCloud::from_rows(vec![vec![-1.0], vec![1.0]]).unwrap(), vec![0.2, 0.8]).unwrap();
    let k = dtm_filtration_of(&mu, DtmParams::new(0.3).unwrap(), PExponent::ONE, 1, f64::INFINITY).unwrap();
    let pts = reduce(&k, &[0]).unwrap().in_dim(0);
    let birth = 2.0 * (0.1f64 / 0.3).sqrt();
    let death = 0.5 * (birth + 2.0);
    let ok = pts.len() == 2
        && pts[0].birth == 0.0
        && pts[0].is_essential()
        && (pts[1].birth - birth).abs() <= 1e-8
        && (pts[1].death - death).abs() <= 1e-8;
    let shown: Vec<String> = pts.iter().map(|p| format!("({:.8}, {:.8})", p.birth, p.death)).collect();
    outcome(ok, format!("dim-0 diagram {}", shown.join(" ")))
}

fn h0_monotone_in_p() -> Outcome {
    let ps = [PExponent::ONE, PExponent::Finite(1.5), PExponent::TWO, PExponent::Finite(3.0), PExponent::Infinity];
    let m = DtmParams::new(0.1).unwrap();
    let mut violations = 0;
    let mut example = String::new();
    for seed in 0..20u64 {
        let x = synth(SynthKind::CircleWithOutliers, 30, 10, seed).unwrap();
        let mu = DiscreteMeasure::uniform(x).unwrap();
        let counts: Vec<usize> = ps
            .iter()
            .map(|&p| dtm_diagram(&mu, m, p, 1, f64::INFINITY, &[0], usize::MAX).unwrap().in_dim(0).iter().filter(|q| q.persistence() > 1e-9).count())
            .collect();
        if counts.windows(2).any(|w| w[1] > w[0]) {
            violations += 1;
        }
        if seed == 0 {
            example = format!("{counts:?}");
        }
    }
    outcome(violations == 0, format!("{violations} violations over 20 clouds of 40 points (seed 0 counts {example})"))
}

fn circle_data() -> (PointCloud, PointCloud) {
    let gamma = synth(SynthKind::Circle, 300, 0, 1).unwrap();
    let x = synth(SynthKind::CircleWithOutliers, 300, 50, 1).unwrap();
    (gamma, x)
}

fn certify_input(theorem: Theorem, p: PExponent) -> CertifyInput {
    let (gamma, x) = circle_data();
    let t_max = x.diameter();
    let mut input = CertifyInput::new(
        theorem,
        DiscreteMeasure::uniform(x).unwrap(),
        DiscreteMeasure::uniform(gamma.clone()).unwrap(),
        DtmParams::new(0.1).unwrap(),
        p,
    );
    input.gamma = Some(gamma.clone());
    input.omega = Some(gamma);
    input.max_dim = 2;
    input.t_max = Some(t_max);
    input.dims = vec![0, 1];
    input
}

fn theorem_46() -> Outcome {
    let input = certify_input(Theorem::T46, PExponent::ONE);
    let report = certify(&input).unwrap();
    let measured = report.measured_bottleneck.unwrap();
    let m = input.m;
    let t_max = input.t_max.unwrap();
    let dx = dtm_diagram(&input.x, m, PExponent::ONE, 2, t_max, &[1], usize::MAX).unwrap();
    let dg = dtm_diagram(&input.y, m, PExponent::ONE, 2, t_max, &[1], usize::MAX).unwrap();
    let (px, pg) = (dx.most_persistent(1), dg.most_persistent(1));
    let gap = match (px, pg) {
        (Some(a), Some(b)) => (a.persistence() - b.persistence()).abs(),
        _ => f64::INFINITY,
    };
    let ok = report.satisfied == Some(true) && gap <= report.bound;
    outcome(
        ok,
        format!(
            "bottleneck {measured:.4} <= bound {:.4}; top dim-1 persistence X {:.4} vs circle {:.4} (gap {gap:.4})",
            report.bound,
            px.map_or(f64::NAN, |q| q.persistence()),
            pg.map_or(f64::NAN, |q| q.persistence())
        ),
    )
}

fn theorem_413() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for p in [PExponent::TWO, PExponent::Infinity] {
        let report = certify(&certify_input(Theorem::T413, p)).unwrap();
        ok &= report.satisfied == Some(true);
        parts.push(format!("p={p}: {:.4} <= {:.4}", report.measured_bottleneck.unwrap(), report.bound));
    }
    let (gamma, x) = circle_data();
    let m = DtmParams::new(0.1).unwrap();
    let b1 = bound_t413(&x, &gamma, &gamma, &gamma, m, PExponent::ONE, 1e-6).unwrap().bound;
    let b1001 = bound_t413(&x, &gamma, &gamma, &gamma, m, PExponent::Finite(1.001), 1e-6).unwrap().bound;
    let cont = (b1001 - b1).abs() <= 0.01 * b1;
    ok &= cont;
    parts.push(format!("bound(1.001) {b1001:.5} vs bound(1) {b1:.5}"));
    outcome(ok, parts.join("; "))
}

fn random_measure(r: &mut impl Rng, n: usize, dim: usize) -> DiscreteMeasure {
    let x = random_cloud(r, n, dim);
    let w: Vec<f64> = (0..n).map(|_| f64::from(r.random_range(1..=10u32))).collect();
    DiscreteMeasure::normalized(x, w).unwrap()
}

fn dtm_properties() -> Outcome {
    let mut r = rng(707);
    let (mut lip_bad, mut w2_bad) = (0, 0);
    for _ in 0..1000 {
        let n = r.random_range(1..=8);
        let mu = random_measure(&mut r, n, 2);
        let m = DtmParams::new(r.random_range(0.05..0.95)).unwrap();
        let y = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
        let z = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
        let gap = (dtm(&mu, &y, m).unwrap() - dtm(&mu, &z, m).unwrap()).abs();
        if gap > ((y[0] - z[0]).hypot(y[1] - z[1])) + 1e-9 {
            lip_bad += 1;
        }
    }
    for _ in 0..1000 {
        let (n1, n2) = (r.random_range(1..=5), r.random_range(1..=5));
        let mu = random_measure(&mut r, n1, 2);
        let nu = random_measure(&mut r, n2, 2);
        let m = DtmParams::new(r.random_range(0.05..0.95)).unwrap();
        let w2 = wasserstein2(&mu, &nu).unwrap();
        let grid = random_cloud(&mut r, 16, 2);
        let (a, b) = (dtm_on(&mu, &grid, m).unwrap(), dtm_on(&nu, &grid, m).unwrap());
        let sup = a.values().iter().zip(b.values()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        if sup > w2 / m.m().sqrt() + 1e-9 {
            w2_bad += 1;
        }
    }
    outcome(lip_bad == 0 && w2_bad == 0, format!("Lipschitz violations {lip_bad}/1000, W2-stability violations {w2_bad}/1000"))
}

fn auxiliary_inequalities() -> Outcome {
    let mut r = rng(808);
    let mut bad = [0usize; 4];
    let root = |a: f64, b: f64, p: f64| if a <= b { 0.0 } else { a * (1.0 - (b / a).powf(p)).powf(1.0 / p) };
    for _ in 0..10_000 {
        let p = r.random_range(1.0..8.0);
        let c: f64 = r.random_range(0.0..4.0);
        let eps = r.random_range(0.0..2.0);
        let x = r.random_range(0.0..4.0);
        let t = x + r.random_range(0.0..4.0);
        let alpha = (1.0 + c.powf(p)).powf(1.0 / p);
        let k = eps * alpha;
        if root(t + k, x + c * eps, p) - root(t, x, p) < eps - 1e-9 {
            bad[0] += 1;
        }
    }
    for _ in 0..10_000 {
        let p = 1.0 + r.random_range(0.0..1.0f64).powi(2) * 50.0;
        if 2f64.powf(1.0 - 1.0 / p) - 1.0 > 1.0 - 1.0 / p + 1e-9 {
            bad[1] += 1;
        }
    }
    for _ in 0..10_000 {
        let dim = r.random_range(2..=4);
        let v = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| r.random_range(-1.0..1.0)).collect() };
        let (g, x, o) = (v(&mut r), v(&mut r), v(&mut r));
        let mut u = v(&mut r);
        let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
        u.iter_mut().for_each(|a| *a /= norm);
        let proj = |pt: &[f64]| -> Vec<f64> {
            let s: f64 = pt.iter().zip(&o).zip(&u).map(|((a, b), c)| (a - b) * c).sum();
            o.iter().zip(&u).map(|(b, c)| b + s * c).collect()
        };
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let (qg, qx) = (proj(&g), proj(&x));
        let lhs = dist(&g, &qx).powi(2);
        let hx = dist(&x, &qx);
        let rhs = dist(&x, &g).powi(2) + hx * (2.0 * dist(&g, &qg) - hx);
        if lhs > rhs + 1e-9 {
            bad[2] += 1;
        }
    }
    for _ in 0..10_000 {
        let p = r.random_range(1.0..8.0);
        let a = r.random_range(0.0..3.0);
        let b = r.random_range(0.0..=a);
        let d = r.random_range(0.0..=a);
        let kappa = 1.0 - 1.0 / p;
        if root(a, d, p).powi(2) + d * (2.0 * b - d) > (a + kappa * b).powi(2) + 1e-9 {
            bad[3] += 1;
        }
    }
    outcome(bad.iter().all(|&b| b == 0), format!("violations: radius shift {}, power-of-two {}, projection {}, root square {} (10^4 samples each)", bad[0], bad[1], bad[2], bad[3]))
}

fn distance_oracles() -> Outcome {
    let mut r = rng(909);
    let mut bn_bad = 0;
    for _ in 0..200 {
        let mk = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<(f64, f64)> {
            let n = r.random_range(0..=5);
            (0..n)
                .map(|_| {
                    let b = r.random_range(0.0..2.0);
                    (b, b + r.random_range(0.0..2.0))
                })
                .collect()
        };
        let (a, b) = (mk(&mut r), mk(&mut r));
        let diag = |v: &[(f64, f64)]| PersistenceDiagram::new(v.iter().map(|&(s, t)| DiagramPoint::new(0, s, t)).collect(), None).unwrap();
        let nontrivial = |v: &[(f64, f64)]| v.iter().copied().filter(|q| q.1 > q.0).collect::<Vec<_>>();
        if bottleneck(&diag(&a), &diag(&b), 0) != brute_bottleneck(&nontrivial(&a), &nontrivial(&b)) {
            bn_bad += 1;
        }
    }
    let mut w2_bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = r.random_range(1..=6);
        let dim = r.random_range(1..=3);
        let (x, y) = (random_cloud(&mut r, n, dim), random_cloud(&mut r, n, dim));
        let got = wasserstein2(&DiscreteMeasure::uniform(x.clone()).unwrap(), &DiscreteMeasure::uniform(y.clone()).unwrap()).unwrap();
        let err = (got - brute_w2_uniform(&x, &y)).abs();
        worst = worst.max(err);
        if err > 1e-9 {
            w2_bad += 1;
        }
    }
    outcome(bn_bad == 0 && w2_bad == 0, format!("bottleneck mismatches {bn_bad}/200, W2 mismatches {w2_bad}/200 (max |Δ| {worst:.1e})"))
}

fn counterexample() -> Outcome {
    let (q, m, x) = (0.2, DtmParams::new(0.3).unwrap(), -0.1);
    let diagram = |points: &[f64], masses: Vec<f64>| -> (DiscreteMeasure, PersistenceDiagram) {
        let mu = DiscreteMeasure::new(PointCloud::new(1, points.to_vec()).unwrap(), masses).unwrap();
        let f = dtm_weights_of(&mu, m).unwrap();
        let k = build_weighted_cech(mu.support(), &f, PExponent::ONE, 1, f64::INFINITY, 1e-9).unwrap();
        let d = reduce(&k, &[0]).unwrap();
        (mu, d)
    };
    let (mu, d_mu) = diagram(&[-1.0, 1.0], vec![q, 1.0 - q]);
    let mut rows = Vec::new();
    let mut floor = None;
    let mut floor_ok = true;
    let mut w2_shrinks = true;
    let mut w2_literal = true;
    let mut last_w2 = f64::INFINITY;
    for eps in [0.05, 0.01, 0.002] {
        let (nu, d_nu) = diagram(&[-1.0, x, 1.0], vec![q - eps, eps, 1.0 - q]);
        let b = bottleneck(&d_mu, &d_nu, 0);
        let w2 = wasserstein2(&mu, &nu).unwrap();
        let floor_value = *floor.get_or_insert(b);
        floor_ok &= b > 0.5 * floor_value;
        // Moving mass ε a distance 1 + x costs ε(1 + x)², so W2 = (1 + x)√ε.
        w2_shrinks &= (w2 - (1.0 + x) * eps.sqrt()).abs() <= 1e-9 && w2 < last_w2;
        w2_literal &= w2 <= eps;
        last_w2 = w2;
        rows.push(format!("ε={eps}: d_b {b:.5}, W2 {w2:.5}"));
    }
    let detail = format!(
        "{}; bottleneck floor holds, W2 = 0.9·√ε → 0; literal `W2 ≤ ε` {}",
        rows.join(", "),
        if w2_literal { "holds" } else { "does not hold, since (1+x)√ε > ε here" }
    );
    Outcome { ok: floor_ok && w2_shrinks, amended: !w2_literal, detail }
}

fn dim1_deaths_after_full_simplex() -> Outcome {
    let mut r = rng(1111);
    let mut bad = 0;
    let mut worst = f64::NEG_INFINITY;
    let tol = 1e-7;
    for inst in 0..50 {
        let n = r.random_range(3..=7);
        let x = random_cloud(&mut r, n, 2);
        let g_size = r.random_range(2..=n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, r.random_range(0..=i));
        }
        let mut chosen = idx[..g_size].to_vec();
        chosen.sort_unstable();
        let gamma = x.subset(&chosen);
        let mu = DiscreteMeasure::uniform(gamma).unwrap();
        let m = DtmParams::from_ratio(r.random_range(1..g_size), g_size).unwrap();
        let p = if inst % 2 == 0 { PExponent::TWO } else { PExponent::Infinity };
        let f = dtm_on(&mu, &x, m).unwrap();
        let k = build_weighted_cech(&x, &f, p, 2, f64::INFINITY, tol).unwrap();
        let t_gamma = full_simplex_value(&mu, m, p, tol).unwrap();
        let c = c_const_p(&mu, m, p, tol).unwrap();
        for q in reduce(&k, &[1]).unwrap().in_dim(1) {
            let excess = q.death - (q.birth.max(t_gamma) + c);
            worst = worst.max(excess);
            if excess > 1e-4 {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} violating dim-1 points over 50 instances (max excess {worst:.2e})"))
}

fn main() {
    let results = [
        run(1, "closed-form edge values vs bisection", secs(5), closed_forms),
        run(2, "zero-weight Rips vs rank oracle", secs(10), zero_weight_rips),
        run(3, "two-point weighted barcode", secs(1), two_point_barcode),
        run(4, "H0 count non-increasing in p", secs(60), h0_monotone_in_p),
        run(5, "robust stability bound, p=1", secs(300), theorem_46),
        run(6, "robust stability bound, p in {2, inf}", secs(600), theorem_413),
        run(7, "DTM Lipschitz and W2 stability", secs(30), dtm_properties),
        run(8, "auxiliary inequalities", secs(30), auxiliary_inequalities),
        run(9, "bottleneck and W2 vs exhaustive search", secs(30), distance_oracles),
        run(10, "no C*W2 bound counterexample", secs(5), counterexample),
        run(11, "dim-1 deaths bounded past t_mu(Gamma)", secs(120), dim1_deaths_after_full_simplex),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
