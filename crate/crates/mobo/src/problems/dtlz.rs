//! DTLZ1–7 evaluated per point.
//!
//! Each problem splits the decision vector into M−1 position variables and
//! k = d − M + 1 distance variables; the distance part drives a scalar g
//! that lifts the front, while the position part parameterises it.

use std::f64::consts::{FRAC_PI_2, PI};

/// `id` and shapes are validated by `ProblemSpec`; `x` is in the unit cube.
pub(super) fn evaluate(id: u8, m: usize, x: &[f64]) -> Vec<f64> {
    let (position, distance) = x.split_at(m - 1);
    match id {
        1 => {
            let g = rastrigin_g(distance);
            (0..m)
                .map(|idx| {
                    let mut v = 0.5 * (1.0 + g);
                    for &p in &position[..m - 1 - idx] {
                        v *= p;
                    }
                    if idx > 0 {
                        v *= 1.0 - position[m - 1 - idx];
                    }
                    v
                })
                .collect()
        }
        2..=4 => {
            let g = if id == 3 {
                rastrigin_g(distance)
            } else {
                sphere_g(distance)
            };
            let angles: Vec<f64> = position
                .iter()
                .map(|&p| {
                    let p = if id == 4 { p.powi(100) } else { p };
                    p * FRAC_PI_2
                })
                .collect();
            spherical(&angles, g, m)
        }
        5 | 6 => {
            let g = if id == 5 {
                sphere_g(distance)
            } else {
                distance.iter().map(|&v| v.powf(0.1)).sum()
            };
            let mut angles = Vec::with_capacity(m - 1);
            angles.push(position[0] * FRAC_PI_2);
            for &p in &position[1..] {
                // Later angles collapse towards π/4 as g falls, bending the
                // front into a degenerate curve.
                angles.push(PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * p));
            }
            spherical(&angles, g, m)
        }
        7 => {
            let k = distance.len() as f64;
            let g = 1.0 + 9.0 * distance.iter().sum::<f64>() / k;
            let mut f: Vec<f64> = position.to_vec();
            let h = m as f64
                - position
                    .iter()
                    .map(|&p| p / (1.0 + g) * (1.0 + (3.0 * PI * p).sin()))
                    .sum::<f64>();
            f.push((1.0 + g) * h);
            f
        }
        _ => unreachable!("problem ids validated at construction"),
    }
}

/// Highly multimodal distance function, zero at all-0.5.
fn rastrigin_g(distance: &[f64]) -> f64 {
    let sum: f64 = distance
        .iter()
        .map(|&v| {
            let z = v - 0.5;
            z * z - (20.0 * PI * z).cos()
        })
        .sum();
    100.0 * (distance.len() as f64 + sum)
}

/// Unimodal distance function, zero at all-0.5.
fn sphere_g(distance: &[f64]) -> f64 {
    distance
        .iter()
        .map(|&v| {
            let z = v - 0.5;
            z * z
        })
        .sum()
}

/// Hyper-spherical construction: objective idx (0-based) multiplies the
/// first M−1−idx cosines and, past the first objective, one sine.
fn spherical(angles: &[f64], g: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|idx| {
            let mut v = 1.0 + g;
            for &a in &angles[..m - 1 - idx] {
                v *= a.cos();
            }
            if idx > 0 {
                v *= angles[m - 1 - idx].sin();
            }
            v
        })
        .collect()
}
