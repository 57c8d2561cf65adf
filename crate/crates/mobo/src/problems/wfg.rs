//! WFG1–9 evaluated per point.
//!
//! Every problem is a pipeline: the unit-cube input (which equals the
//! native variables scaled by their 2i upper bounds) flows through bias /
//! shift transformations and group reductions down to M transition values,
//! which a shape function mixes into objectives f_m = x_M + 2m·h_m.
//!
//! Position variables 1..k are sliced into M−1 contiguous groups with
//! floor-rounded boundaries (exactly the canonical equal groups whenever
//! M−1 divides k); distance variables k+1..d form the final group. The
//! pair-reduction problems (WFG2/3) consume two distance variables per
//! output and ignore a trailing odd one.

use std::f64::consts::{FRAC_PI_2, PI};

const PARAM_A: f64 = 0.98 / 49.98;
const PARAM_B: f64 = 0.02;
const PARAM_C: f64 = 50.0;

/// `id`, `m`, `k` are validated by `ProblemSpec`; `x` is in the unit cube.
pub(super) fn evaluate(id: u8, m: usize, k: usize, x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    match id {
        1 => {
            for v in &mut y[k..] {
                *v = s_linear(*v, 0.35);
            }
            for v in &mut y[k..] {
                *v = b_flat(*v, 0.8, 0.75, 0.85);
            }
            for v in &mut y {
                *v = b_poly(*v, 0.02);
            }
            let t = sum_reduce(&y, k, m, |i| 2.0 * i as f64);
            finish(&t, m, false, |xs, obj| {
                if obj == m {
                    sh_mixed(xs[0], 1.0, 5.0)
                } else {
                    sh_convex(xs, obj, m)
                }
            })
        }
        2 | 3 => {
            for v in &mut y[k..] {
                *v = s_linear(*v, 0.35);
            }
            let reduced = pair_reduce(&y, k);
            let t = sum_reduce(&reduced, k, m, |_| 1.0);
            if id == 2 {
                finish(&t, m, false, |xs, obj| {
                    if obj == m {
                        sh_disc(xs[0], 1.0, 1.0, 5.0)
                    } else {
                        sh_convex(xs, obj, m)
                    }
                })
            } else {
                finish(&t, m, true, |xs, obj| sh_linear(xs, obj, m))
            }
        }
        4 => {
            for v in &mut y {
                *v = s_multi(*v, 30.0, 10.0, 0.35);
            }
            let t = sum_reduce(&y, k, m, |_| 1.0);
            finish(&t, m, false, |xs, obj| sh_concave(xs, obj, m))
        }
        5 => {
            for v in &mut y {
                *v = s_decept(*v, 0.35, 0.001, 0.05);
            }
            let t = sum_reduce(&y, k, m, |_| 1.0);
            finish(&t, m, false, |xs, obj| sh_concave(xs, obj, m))
        }
        6 => {
            for v in &mut y[k..] {
                *v = s_linear(*v, 0.35);
            }
            let t = nonsep_reduce(&y, k, m);
            finish(&t, m, false, |xs, obj| sh_concave(xs, obj, m))
        }
        7 => {
            let base = y.clone();
            for i in 0..k {
                y[i] = b_param(base[i], mean(&base[i + 1..]), PARAM_A, PARAM_B, PARAM_C);
            }
            for v in &mut y[k..] {
                *v = s_linear(*v, 0.35);
            }
            let t = sum_reduce(&y, k, m, |_| 1.0);
            finish(&t, m, false, |xs, obj| sh_concave(xs, obj, m))
        }
        8 => {
            let base = y.clone();
            for i in k..y.len() {
                y[i] = b_param(base[i], mean(&base[..i]), PARAM_A, PARAM_B, PARAM_C);
            }
            for v in &mut y[k..] {
                *v = s_linear(*v, 0.35);
            }
            let t = sum_reduce(&y, k, m, |_| 1.0);
            finish(&t, m, false, |xs, obj| sh_concave(xs, obj, m))
        }
        9 => {
            let base = y.clone();
            for i in 0..y.len() - 1 {
                y[i] = b_param(base[i], mean(&base[i + 1..]), PARAM_A, PARAM_B, PARAM_C);
            }
            for v in &mut y[..k] {
                *v = s_decept(*v, 0.35, 0.001, 0.05);
            }
            for v in &mut y[k..] {
                *v = s_multi(*v, 30.0, 95.0, 0.35);
            }
            let t = nonsep_reduce(&y, k, m);
            finish(&t, m, false, |xs, obj| sh_concave(xs, obj, m))
        }
        _ => unreachable!("problem ids validated at construction"),
    }
}

// ---------------------------------------------------------------------
// Bias and shift transformations; each maps [0,1] → [0,1].
// ---------------------------------------------------------------------

fn b_poly(y: f64, alpha: f64) -> f64 {
    y.powf(alpha)
}

fn b_flat(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let v = a + 0f64.min((y - b).floor()) * a * (b - y) / b
        - 0f64.min((c - y).floor()) * (1.0 - a) * (y - c) / (1.0 - c);
    // Round-off below zero would poison the fractional powers downstream.
    v.clamp(0.0, 1.0)
}

fn b_param(y: f64, u: f64, a: f64, b: f64, c: f64) -> f64 {
    let exponent = b + (c - b) * (a - (1.0 - 2.0 * u) * ((0.5 - u).floor() + a).abs());
    y.powf(exponent)
}

fn s_linear(y: f64, a: f64) -> f64 {
    (y - a).abs() / ((a - y).floor() + a).abs()
}

fn s_decept(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let lead = (y - a + b).floor() * (1.0 - c + (a - b) / b) / (a - b);
    let trail = (a + b - y).floor() * (1.0 - c + (1.0 - a - b) / b) / (1.0 - a - b);
    1.0 + ((y - a).abs() - b) * (lead + trail + 1.0 / b)
}

fn s_multi(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let ratio = (y - c).abs() / (2.0 * ((c - y).floor() + c));
    (1.0 + ((4.0 * a + 2.0) * PI * (0.5 - ratio)).cos() + 4.0 * b * ratio * ratio) / (b + 2.0)
}

// ---------------------------------------------------------------------
// Reductions.
// ---------------------------------------------------------------------

fn mean(ys: &[f64]) -> f64 {
    ys.iter().sum::<f64>() / ys.len() as f64
}

fn r_sum(ys: &[f64], ws: &[f64]) -> f64 {
    let dot: f64 = ys.iter().zip(ws).map(|(y, w)| y * w).sum();
    dot / ws.iter().sum::<f64>()
}

/// Non-separable reduction of degree `a` (a = 1 is the plain mean,
/// a = len couples every element with every other).
fn r_nonsep(ys: &[f64], a: usize) -> f64 {
    let n = ys.len();
    let mut total = 0.0;
    for j in 0..n {
        let mut inner = ys[j];
        for step in 0..a.saturating_sub(1) {
            inner += (ys[j] - ys[(j + step + 1) % n]).abs();
        }
        total += inner;
    }
    let half_up = a.div_ceil(2) as f64;
    let denom = (n as f64 / a as f64) * half_up * (1.0 + 2.0 * a as f64 - 2.0 * half_up);
    total / denom
}

/// 0-based half-open index ranges slicing 0..k into M−1 groups.
fn position_groups(k: usize, m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..m).map(move |g| ((g - 1) * k / (m - 1), g * k / (m - 1)))
}

/// Weighted-mean reduction over the position groups plus the distance tail;
/// the weight closure receives original 1-based variable indices.
fn sum_reduce(y: &[f64], k: usize, m: usize, weight: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut t = Vec::with_capacity(m);
    for (start, end) in position_groups(k, m) {
        let ws: Vec<f64> = (start..end).map(|i| weight(i + 1)).collect();
        t.push(r_sum(&y[start..end], &ws));
    }
    let ws: Vec<f64> = (k..y.len()).map(|i| weight(i + 1)).collect();
    t.push(r_sum(&y[k..], &ws));
    t
}

/// Non-separable reduction over the position groups plus the distance tail,
/// with coupling degree equal to each group's size.
fn nonsep_reduce(y: &[f64], k: usize, m: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(m);
    for (start, end) in position_groups(k, m) {
        t.push(r_nonsep(&y[start..end], end - start));
    }
    t.push(r_nonsep(&y[k..], y.len() - k));
    t
}

/// Collapse distance variables pairwise (degree-2 non-separable); an odd
/// trailing variable is dropped.
fn pair_reduce(y: &[f64], k: usize) -> Vec<f64> {
    let half = (y.len() - k) / 2;
    let mut out = y[..k].to_vec();
    for i in 0..half {
        out.push(r_nonsep(&y[k + 2 * i..k + 2 * i + 2], 2));
    }
    out
}

// ---------------------------------------------------------------------
// Shape functions over the mixed variables x_1..x_M; `obj` is 1-based.
// ---------------------------------------------------------------------

fn sh_linear(xs: &[f64], obj: usize, m: usize) -> f64 {
    if obj == 1 {
        xs[..m - 1].iter().product()
    } else if obj == m {
        1.0 - xs[0]
    } else {
        xs[..m - obj].iter().product::<f64>() * (1.0 - xs[m - obj])
    }
}

fn sh_convex(xs: &[f64], obj: usize, m: usize) -> f64 {
    let leg = |v: f64| 1.0 - (v * FRAC_PI_2).cos();
    let cap = |v: f64| 1.0 - (v * FRAC_PI_2).sin();
    if obj == 1 {
        xs[..m - 1].iter().map(|&v| leg(v)).product()
    } else if obj == m {
        cap(xs[0])
    } else {
        xs[..m - obj].iter().map(|&v| leg(v)).product::<f64>() * cap(xs[m - obj])
    }
}

fn sh_concave(xs: &[f64], obj: usize, m: usize) -> f64 {
    if obj == 1 {
        xs[..m - 1].iter().map(|&v| (v * FRAC_PI_2).sin()).product()
    } else if obj == m {
        (xs[0] * FRAC_PI_2).cos()
    } else {
        xs[..m - obj]
            .iter()
            .map(|&v| (v * FRAC_PI_2).sin())
            .product::<f64>()
            * (xs[m - obj] * FRAC_PI_2).cos()
    }
}

fn sh_mixed(x1: f64, alpha: f64, a: f64) -> f64 {
    let angle = 2.0 * a * PI;
    (1.0 - x1 - (angle * x1 + FRAC_PI_2).cos() / angle).powf(alpha)
}

fn sh_disc(x1: f64, alpha: f64, beta: f64, a: f64) -> f64 {
    1.0 - x1.powf(alpha) * (a * x1.powf(beta) * PI).cos().powi(2)
}

/// Mix the M transition values into objectives. With `degenerate`, all
/// mixing coefficients past the first are zero, collapsing the front to a
/// one-dimensional curve.
fn finish(t: &[f64], m: usize, degenerate: bool, shape: impl Fn(&[f64], usize) -> f64) -> Vec<f64> {
    let x_m = t[m - 1];
    let mut xs = Vec::with_capacity(m);
    for (i, &ti) in t[..m - 1].iter().enumerate() {
        let a = if i == 0 || !degenerate { 1.0 } else { 0.0 };
        xs.push(x_m.max(a) * (ti - 0.5) + 0.5);
    }
    xs.push(x_m);
    (1..=m)
        .map(|obj| x_m + 2.0 * obj as f64 * shape(&xs, obj))
        .collect()
}
