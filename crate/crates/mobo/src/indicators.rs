//! Run-quality indicators: normalised hypervolume and the one-sided inverted
//! generational distance (IGD+).
//!
//! Both indicators operate on objective vectors mapped into a normalised
//! space by [`normalise_front`] using a problem's ideal and reference points,
//! so values are comparable across problems with different objective scales.

use std::path::Path;

use crate::pareto::{hypervolume, nondominated};
use crate::{Error, Result};

fn validate_bounds(ideal: &[f64], ref_point: &[f64]) -> Result<usize> {
    if ideal.is_empty() {
        return Err(Error::EmptyInput("ideal point must have length ≥ 1"));
    }
    if ideal.len() != ref_point.len() {
        return Err(Error::DimensionMismatch {
            expected: ideal.len(),
            got: ref_point.len(),
        });
    }
    for (i, (&q, &r)) in ideal.iter().zip(ref_point).enumerate() {
        if !q.is_finite() || !r.is_finite() {
            return Err(Error::NonFiniteData(format!(
                "ideal/reference coordinate {i} is not finite"
            )));
        }
        if r <= q {
            return Err(Error::InvalidArgument(format!(
                "reference must exceed the ideal in every coordinate: \
                 coordinate {i} has ideal {q}, reference {r}"
            )));
        }
    }
    Ok(ideal.len())
}

/// Map objective vectors into normalised space: f̂ᵢ = (fᵢ − idealᵢ)/(refᵢ − idealᵢ).
///
/// The map is affine per coordinate; outputs may leave [0, 1] when a point
/// falls outside the ideal–reference box. Errors if any reference coordinate
/// does not strictly exceed its ideal counterpart.
pub fn normalise_front(
    points: &[Vec<f64>],
    ideal: &[f64],
    ref_point: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let m = validate_bounds(ideal, ref_point)?;
    let mut out = Vec::with_capacity(points.len());
    for (row, point) in points.iter().enumerate() {
        if point.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: point.len(),
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(format!(
                "objective vector {row} contains a non-finite value"
            )));
        }
        out.push(
            point
                .iter()
                .zip(ideal)
                .zip(ref_point)
                .map(|((&f, &q), &r)| (f - q) / (r - q))
                .collect(),
        );
    }
    Ok(out)
}

/// Normalised hypervolume of an archive: normalise all points, keep those
/// strictly below 1 in every coordinate, drop dominated ones, and measure
/// the hypervolume against the all-ones reference.
///
/// An archive with no point inside the unit box scores 0; an archive
/// containing the ideal point scores 1 (the normalised origin dominates the
/// whole box). Non-decreasing as the archive grows.
pub fn hv_indicator(points: &[Vec<f64>], ideal: &[f64], ref_point: &[f64]) -> Result<f64> {
    let m = validate_bounds(ideal, ref_point)?;
    let normalised = normalise_front(points, ideal, ref_point)?;
    let inside: Vec<Vec<f64>> = normalised
        .into_iter()
        .filter(|p| p.iter().all(|&v| v < 1.0))
        .collect();
    if inside.is_empty() {
        return Ok(0.0);
    }
    let keep = nondominated(&inside)?;
    let front: Vec<Vec<f64>> = keep.into_iter().map(|i| inside[i].clone()).collect();
    hypervolume(&front, &vec![1.0; m])
}

/// One-sided distance from a reference point to an attained point:
/// d⁺(a, z) = √(Σᵢ max(aᵢ − zᵢ, 0)²). Zero whenever `a` weakly dominates `z`.
fn d_plus(a: &[f64], z: &[f64]) -> f64 {
    a.iter()
        .zip(z)
        .map(|(&ai, &zi)| {
            let excess = (ai - zi).max(0.0);
            excess * excess
        })
        .sum::<f64>()
        .sqrt()
}

/// Averaged one-sided inverted generational distance:
/// (1/|Z|)·Σ_{z∈Z} min_{a∈A} d⁺(a, z).
///
/// Zero exactly when every reference point is weakly dominated by some
/// attained point; non-increasing as `attained` grows. Both sets must be
/// non-empty, share one objective count, and be expressed in the same
/// (normalised) space.
pub fn igd_plus(attained: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64> {
    if attained.is_empty() {
        return Err(Error::EmptyInput("attained set must be non-empty"));
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("reference set must be non-empty"));
    }
    let m = attained[0].len();
    if m == 0 {
        return Err(Error::EmptyInput("objective vectors must have length ≥ 1"));
    }
    for (row, point) in attained.iter().chain(reference.iter()).enumerate() {
        if point.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: point.len(),
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData(format!(
                "point {row} contains a non-finite value"
            )));
        }
    }
    let total: f64 = reference
        .iter()
        .map(|z| {
            attained
                .iter()
                .map(|a| d_plus(a, z))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}

/// Read a reference set from a plain-text file: one point per line,
/// whitespace-separated reals. Blank lines and lines starting with `#` are
/// skipped. All points must share one length.
pub fn read_reference_set(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let point: Vec<f64> = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::ConfigParse(format!(
                        "{}:{}: '{tok}' is not a number",
                        path.display(),
                        line_no + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = points.first() {
            if point.len() != first.len() {
                return Err(Error::ConfigParse(format!(
                    "{}:{}: point has {} coordinates, expected {}",
                    path.display(),
                    line_no + 1,
                    point.len(),
                    first.len()
                )));
            }
        }
        points.push(point);
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("reference-set file holds no points"));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn normalisation_maps_the_box_corners() {
        let ideal = [1.0, 2.0];
        let reference = [3.0, 6.0];
        let out = normalise_front(
            &pts(&[&[1.0, 2.0], &[3.0, 6.0], &[2.0, 4.0]]),
            &ideal,
            &reference,
        )
        .unwrap();
        assert_eq!(out[0], vec![0.0, 0.0], "ideal maps to the origin");
        assert_eq!(out[1], vec![1.0, 1.0], "reference maps to ones");
        assert_eq!(out[2], vec![0.5, 0.5], "midpoint maps to one half");
    }

    #[test]
    fn normalisation_rejects_degenerate_bounds() {
        assert!(normalise_front(&pts(&[&[0.0, 0.0]]), &[0.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(normalise_front(&pts(&[&[0.0, 0.0]]), &[0.0, 2.0], &[1.0, 1.0]).is_err());
        assert!(normalise_front(&pts(&[&[0.0]]), &[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(
            normalise_front(&pts(&[&[f64::NAN, 0.0]]), &[0.0, 0.0], &[1.0, 1.0]).is_err()
        );
    }

    #[test]
    fn ideal_point_scores_full_hypervolume() {
        let value = hv_indicator(&pts(&[&[0.0, 0.0]]), &[0.0, 0.0], &[2.0, 4.0]).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn archive_beyond_the_reference_scores_zero() {
        let value =
            hv_indicator(&pts(&[&[5.0, 5.0], &[2.0, 9.0]]), &[0.0, 0.0], &[2.0, 4.0]).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn indicator_matches_direct_hypervolume_of_normalised_points() {
        // With ideal 0 and reference (4,4), normalisation divides by 4, so
        // the indicator equals HV against (4,4) divided by the box volume 16.
        let points = pts(&[&[1.0, 3.0], &[2.0, 2.0]]);
        let direct = hypervolume(&points, &[4.0, 4.0]).unwrap();
        let indicator = hv_indicator(&points, &[0.0, 0.0], &[4.0, 4.0]).unwrap();
        assert!((indicator - direct / 16.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_ignores_dominated_and_outlying_points() {
        let base = pts(&[&[1.0, 3.0], &[2.0, 2.0]]);
        let noisy = pts(&[&[1.0, 3.0], &[2.0, 2.0], &[3.0, 3.0], &[9.0, 1.0]]);
        let a = hv_indicator(&base, &[0.0, 0.0], &[4.0, 4.0]).unwrap();
        let b = hv_indicator(&noisy, &[0.0, 0.0], &[4.0, 4.0]).unwrap();
        assert!((a - b).abs() < 1e-12, "dominated/outside points contribute nothing");
    }

    #[test]
    fn indicator_is_monotone_in_the_archive() {
        let mut archive = pts(&[&[3.0, 1.0]]);
        let mut last = hv_indicator(&archive, &[0.0, 0.0], &[4.0, 4.0]).unwrap();
        for extra in [[1.0, 3.0], [2.0, 2.0], [0.5, 3.5], [3.5, 3.5]] {
            archive.push(extra.to_vec());
            let next = hv_indicator(&archive, &[0.0, 0.0], &[4.0, 4.0]).unwrap();
            assert!(next >= last - 1e-15, "adding points never loses volume");
            last = next;
        }
    }

    #[test]
    fn igd_plus_hand_values() {
        // Only the excess over the reference point counts.
        let value = igd_plus(&pts(&[&[2.0, 2.0]]), &pts(&[&[1.0, 1.0]])).unwrap();
        assert!((value - 2.0_f64.sqrt()).abs() < 1e-12);
        // Weak dominance in one coordinate contributes nothing.
        let value = igd_plus(&pts(&[&[0.5, 2.0]]), &pts(&[&[1.0, 1.0]])).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn igd_plus_is_zero_for_weakly_dominating_sets() {
        let z = pts(&[&[1.0, 0.0], &[0.5, 0.5], &[0.0, 1.0]]);
        assert_eq!(igd_plus(&z, &z).unwrap(), 0.0, "a set covers itself");
        let origin = pts(&[&[0.0, 0.0]]);
        assert_eq!(igd_plus(&origin, &z).unwrap(), 0.0, "origin covers everything");
    }

    #[test]
    fn igd_plus_shrinks_as_the_attained_set_grows() {
        let z = pts(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let mut attained = pts(&[&[2.0, 2.0]]);
        let mut last = igd_plus(&attained, &z).unwrap();
        for extra in [[1.5, 0.5], [0.0, 1.0], [1.0, 0.0]] {
            attained.push(extra.to_vec());
            let next = igd_plus(&attained, &z).unwrap();
            assert!(next <= last + 1e-15);
            last = next;
        }
        assert_eq!(last, 0.0, "every reference point is weakly dominated");
    }

    #[test]
    fn igd_plus_rejects_bad_inputs() {
        let a = pts(&[&[0.0, 0.0]]);
        assert!(igd_plus(&[], &a).is_err());
        assert!(igd_plus(&a, &[]).is_err());
        assert!(igd_plus(&a, &pts(&[&[0.0, 0.0, 0.0]])).is_err());
        assert!(igd_plus(&a, &pts(&[&[f64::INFINITY, 0.0]])).is_err());
    }

    #[test]
    fn reference_set_files_round_trip() {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("mobo-refset-{}.txt", std::process::id()));
        std::fs::write(
            &path,
            "# estimated front\n0.0 1.0\n\n0.5   0.5\n1.0 0.0\n",
        )
        .unwrap();
        let points = read_reference_set(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(points, pts(&[&[0.0, 1.0], &[0.5, 0.5], &[1.0, 0.0]]));
    }

    #[test]
    fn reference_set_loader_rejects_malformed_files() {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("mobo-refset-bad-{}.txt", std::process::id()));
        std::fs::write(&path, "0.0 1.0\n0.5\n").unwrap();
        assert!(read_reference_set(&path).is_err(), "ragged rows");
        std::fs::write(&path, "0.0 one\n").unwrap();
        assert!(read_reference_set(&path).is_err(), "non-numeric token");
        std::fs::write(&path, "# nothing\n\n").unwrap();
        assert!(read_reference_set(&path).is_err(), "no points");
        std::fs::remove_file(&path).ok();
    }
}
