//! Greenhouse summation: segment self inductances plus signed pairwise
//! mutual inductances between parallel segments.

use crate::error::{Error, Result};
use crate::geometry::Segment;

/// Grover rectangular-bar self inductance,
/// `2e-7·l·[ln(2l/(w+t)) + 0.50049 + (w+t)/(3l)]`, lengths in meters.
pub fn segment_self_inductance(length: f64, width: f64, thickness: f64) -> Result<f64> {
    let wt = width + thickness;
    if !(length > 0.0) || !(wt > 0.0) || wt >= 2.0 * length {
        return Err(Error::Domain {
            what: "self inductance",
            detail: format!("need l > 0 and w + t < 2l (l = {length:e}, w + t = {wt:e})"),
        });
    }
    Ok(2e-7 * length * ((2.0 * length / wt).ln() + 0.50049 + wt / (3.0 * length)))
}

/// Grover mutual inductance of two equal, aligned parallel filaments.
pub fn filament_mutual(length: f64, distance: f64) -> f64 {
    if length == 0.0 {
        return 0.0;
    }
    let r = length / distance;
    2e-7 * length * ((r + (1.0 + r * r).sqrt()).ln() - (1.0 + 1.0 / (r * r)).sqrt() + 1.0 / r)
}

/// Geometric mean distance of two equal-width parallel bars whose
/// centerlines are `distance` apart (Greenhouse series). Below one width the
/// series diverges and the centerline distance is used.
pub fn bar_gmd(distance: f64, width: f64) -> f64 {
    let r = distance / width;
    if r < 1.0 {
        return distance;
    }
    let r2 = r * r;
    let ln_ratio = 1.0 / (12.0 * r2)
        + 1.0 / (60.0 * r2 * r2)
        + 1.0 / (168.0 * r2.powi(3))
        + 1.0 / (360.0 * r2.powi(4))
        + 1.0 / (660.0 * r2.powi(5));
    distance * (-ln_ratio).exp()
}

fn axis_of(s: &Segment) -> Option<usize> {
    let d = s.end - s.start;
    let nonzero: Vec<usize> = (0..3).filter(|&k| d[k] != 0.0).collect();
    match nonzero.as_slice() {
        [k] => Some(*k),
        _ => None,
    }
}

/// Signed mutual inductance between two axis-aligned segments, with
/// current flowing from `start` to `end` in each.
///
/// Offsets are handled by the Greenhouse length decomposition written over
/// the four endpoint separations along the shared axis:
/// `M = ½[M(x₁) + M(x₄) − M(x₂) − M(x₃)]`, which is symmetric in its
/// arguments by construction.
pub fn segment_mutual_inductance(a: &Segment, b: &Segment) -> Result<f64> {
    let (Some(ax), Some(bx)) = (axis_of(a), axis_of(b)) else {
        return Err(Error::Domain {
            what: "mutual inductance",
            detail: "segments must be axis-aligned and nondegenerate".into(),
        });
    };
    if ax != bx {
        return Ok(0.0);
    }
    let sign = ((a.end[ax] - a.start[ax]) * (b.end[bx] - b.start[bx])).signum();
    let dist = (0..3)
        .filter(|&k| k != ax)
        .map(|k| (a.start[k] - b.start[k]).powi(2))
        .sum::<f64>()
        .sqrt();
    if dist == 0.0 {
        return Err(Error::Domain {
            what: "mutual inductance",
            detail: "coincident filaments".into(),
        });
    }
    let gmd = bar_gmd(dist, 0.5 * (a.width + b.width));
    let (a0, a1) = (a.start[ax].min(a.end[ax]), a.start[ax].max(a.end[ax]));
    let (b0, b1) = (b.start[ax].min(b.end[ax]), b.start[ax].max(b.end[ax]));
    let m = |x: f64| filament_mutual(x.abs(), gmd);
    let outer = m(a1 - b0) + m(a0 - b1);
    let inner = m(a1 - b1) + m(a0 - b0);
    Ok(sign * 0.5 * (outer - inner))
}

/// Σ self + 2·Σ_{i<j} M(i,j), summed in index-pair order.
pub fn total_inductance(segments: &[Segment]) -> Result<f64> {
    if segments.is_empty() {
        return Err(Error::Domain {
            what: "total inductance",
            detail: "no segments".into(),
        });
    }
    let mut total = 0.0;
    for s in segments {
        total += segment_self_inductance(s.length(), s.width, s.thickness)?;
    }
    for i in 0..segments.len() {
        for j in i + 1..segments.len() {
            total += 2.0
                * segment_mutual_inductance(&segments[i], &segments[j])
                    .map_err(|e| match e {
                        Error::Domain { detail, .. } if detail.contains("coincident") => {
                            Error::CoincidentFilaments(i, j)
                        }
                        e => e,
                    })?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_layout, LayerTag, SpiralSpec};
    use approx::assert_relative_eq;
    use nalgebra::Point3;

    fn seg(x0: f64, y0: f64, x1: f64, y1: f64) -> Segment {
        Segment {
            start: Point3::new(x0, y0, 0.0),
            end: Point3::new(x1, y1, 0.0),
            width: 10e-6,
            thickness: 1e-6,
            layer_tag: LayerTag::Winding,
        }
    }

    #[test]
    fn self_inductance_golden() {
        // 2e-7 · 1e-3 · [ln(2000/11) + 0.50049 + 11/3000]
        let l = segment_self_inductance(1e-3, 10e-6, 1e-6).unwrap();
        assert_relative_eq!(l, 1.141_432_770_7e-9, max_relative = 1e-9);
    }

    #[test]
    fn self_inductance_superlinear_and_domain() {
        let a = segment_self_inductance(100e-6, 10e-6, 1e-6).unwrap();
        let b = segment_self_inductance(1000e-6, 10e-6, 1e-6).unwrap();
        assert!(b > 10.0 * a);
        assert!(segment_self_inductance(5.5e-6, 10e-6, 1e-6).is_err());
        assert!(segment_self_inductance(0.0, 10e-6, 1e-6).is_err());
    }

    #[test]
    fn grover_equal_filaments_golden() {
        // 2e-7·l·[ln(l/d + √(1 + l²/d²)) − √(1 + d²/l²) + d/l], l = 500 µm, d = 12 µm
        assert_relative_eq!(filament_mutual(500e-6, 12e-6), 3.446_704_639_6e-10, max_relative = 1e-9);
        // Same bars through the segment path use the bar GMD (11.2022 µm).
        let m = segment_mutual_inductance(&seg(0.0, 0.0, 500e-6, 0.0), &seg(0.0, 12e-6, 500e-6, 12e-6)).unwrap();
        assert_relative_eq!(m, 3.513_919_734_6e-10, max_relative = 1e-9);
    }

    #[test]
    fn perpendicular_is_zero_and_sign_follows_current() {
        let a = seg(0.0, 0.0, 100e-6, 0.0);
        assert_eq!(segment_mutual_inductance(&a, &seg(0.0, 20e-6, 0.0, 120e-6)).unwrap(), 0.0);
        let co = segment_mutual_inductance(&a, &seg(0.0, 20e-6, 100e-6, 20e-6)).unwrap();
        let anti = segment_mutual_inductance(&a, &seg(100e-6, 20e-6, 0.0, 20e-6)).unwrap();
        assert!(co > 0.0);
        assert_eq!(anti, -co);
    }

    #[test]
    fn mutual_decreases_with_distance() {
        let a = seg(0.0, 0.0, 200e-6, 0.0);
        let mut last = f64::INFINITY;
        for k in 1..30 {
            let d = k as f64 * 5e-6;
            let m = segment_mutual_inductance(&a, &seg(0.0, d, 200e-6, d)).unwrap();
            assert!(m > 0.0 && m < last);
            last = m;
        }
    }

    #[test]
    fn coincident_is_error() {
        let a = seg(0.0, 0.0, 100e-6, 0.0);
        assert!(segment_mutual_inductance(&a, &a).is_err());
        assert!(matches!(
            total_inductance(&[a.clone(), a]),
            Err(Error::CoincidentFilaments(0, 1))
        ));
    }

    /// Neumann double integral over two parallel filaments by composite
    /// Gauss-Legendre quadrature, as an oracle for the offset decomposition.
    fn neumann_parallel(a: (f64, f64), b: (f64, f64), d: f64) -> f64 {
        const X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
        const W: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
        let panels = 400;
        let nodes = |lo: f64, hi: f64| {
            let h = (hi - lo) / panels as f64;
            let mut out = Vec::new();
            for p in 0..panels {
                let c = lo + (p as f64 + 0.5) * h;
                for k in 0..5 {
                    out.push((c + 0.5 * h * X[k], 0.5 * h * W[k]));
                }
            }
            out
        };
        let (na, nb) = (nodes(a.0, a.1), nodes(b.0, b.1));
        let mut s = 0.0;
        for &(x, wx) in &na {
            for &(y, wy) in &nb {
                s += wx * wy / ((x - y).powi(2) + d * d).sqrt();
            }
        }
        1e-7 * s
    }

    #[test]
    fn offset_decomposition_matches_quadrature() {
        // Unequal, partially overlapping and disjoint placements. The bar GMD
        // is used by the segment path, so compare at that distance.
        let d = 30e-6;
        let gmd = bar_gmd(d, 10e-6);
        for &(a, b) in &[
            ((0.0, 200e-6), (50e-6, 120e-6)),
            ((0.0, 200e-6), (150e-6, 400e-6)),
            ((0.0, 100e-6), (250e-6, 300e-6)),
            ((0.0, 340e-6), (-12e-6, 352e-6)),
        ] {
            let m = segment_mutual_inductance(&seg(a.0, 0.0, a.1, 0.0), &seg(b.0, d, b.1, d)).unwrap();
            let oracle = neumann_parallel(a, b, gmd);
            assert_relative_eq!(m, oracle, max_relative = 1e-6);
        }
    }

    #[test]
    fn mutual_is_exactly_symmetric() {
        let set = generate_layout(&SpiralSpec::reference_device()).unwrap();
        let w: Vec<_> = set.winding().cloned().collect();
        for i in 0..w.len() {
            for j in 0..w.len() {
                if i != j {
                    assert_eq!(
                        segment_mutual_inductance(&w[i], &w[j]).unwrap(),
                        segment_mutual_inductance(&w[j], &w[i]).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn single_segment_total_is_self() {
        let s = seg(0.0, 0.0, 300e-6, 0.0);
        assert_eq!(
            total_inductance(std::slice::from_ref(&s)).unwrap(),
            segment_self_inductance(300e-6, 10e-6, 1e-6).unwrap()
        );
    }

    #[test]
    fn global_current_reversal_and_list_order() {
        let set = generate_layout(&SpiralSpec::reference_device()).unwrap();
        let w: Vec<_> = set.winding().cloned().collect();
        let l = total_inductance(&w).unwrap();

        let flipped: Vec<_> = w
            .iter()
            .map(|s| Segment {
                start: s.end,
                end: s.start,
                ..s.clone()
            })
            .collect();
        assert_eq!(total_inductance(&flipped).unwrap(), l);

        let mut reversed = w.clone();
        reversed.reverse();
        assert_relative_eq!(total_inductance(&reversed).unwrap(), l, max_relative = 1e-12);
        let mut rotated = w.clone();
        rotated.rotate_left(13);
        assert_relative_eq!(total_inductance(&rotated).unwrap(), l, max_relative = 1e-12);
    }
}
