use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mapping::{AffineSubspace, FixedSet};
use crate::point::{NormKind, Point};

/// Stopping tolerance for the minimization used with non-euclidean norms.
pub const DISTANCE_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `d(x, F) = inf { ‖x - p‖ : p ∈ F }`.
///
/// Finite sets give the exact minimum. Affine subspaces use the orthogonal
/// projection under the euclidean norm. Under other norms the distance
/// `t ↦ ‖x - o - D t‖` is minimized by cyclic golden-section line searches
/// over the direction coefficients, started from the euclidean
/// projection, until a sweep improves the value by less than `1e-10`.
/// For one direction this is an exact convex line search; with several
/// directions under the max norm a sweep can stall at a kink, so the result
/// is an upper bound there.
pub fn distance_to_fixed_set(x: &Point, fixed: &FixedSet, norm: NormKind) -> Result<f64> {
    match fixed {
        FixedSet::Points(ps) => {
            if ps.is_empty() {
                return Err(Error::NotApplicable("empty fixed-point list".into()));
            }
            let mut best = f64::INFINITY;
            for p in ps {
                x.check_dim(p.dim())?;
                best = best.min(x.distance(p, norm));
            }
            Ok(best)
        }
        FixedSet::Affine(s) => affine_distance(x, s, norm),
    }
}

fn affine_distance(x: &Point, s: &AffineSubspace, norm: NormKind) -> Result<f64> {
    x.check_dim(s.origin.dim())?;
    let dim = x.dim();
    let rel = DVector::from_iterator(dim, x.sub(&s.origin).into_vec());
    if s.directions.is_empty() {
        return Ok(norm.eval(rel.as_slice()));
    }
    for d in &s.directions {
        d.check_dim(dim)?;
    }
    let basis = DMatrix::from_fn(dim, s.directions.len(), |i, j| s.directions[j][i]);
    let coeffs = basis
        .clone()
        .svd(true, true)
        .solve(&rel, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("projection failed: {e}")))?;
    let residual = |c: &DVector<f64>| -> f64 { norm.eval((&rel - &basis * c).as_slice()) };

    let euclid = matches!(norm, NormKind::Euclidean) || matches!(norm, NormKind::P(p) if p == 2.0);
    if euclid {
        return Ok(residual(&coeffs));
    }

    let mut c = coeffs;
    let mut value = residual(&c);
    let scale = norm.eval(rel.as_slice()).max(1.0);
    for _ in 0..MAX_SWEEPS {
        let before = value;
        for j in 0..c.len() {
            let dnorm = norm.eval(basis.column(j).as_slice());
            if dnorm == 0.0 {
                continue;
            }
            // the optimum along one coordinate lies within 2‖x - o - Dc‖/‖d_j‖
            let radius = 2.0 * value / dnorm + DISTANCE_TOL;
            let center = c[j];
            let mut probe = c.clone();
            let mut along = |t: f64| {
                probe[j] = t;
                residual(&probe)
            };
            let t = golden_min(
                &mut along,
                center - radius,
                center + radius,
                DISTANCE_TOL * scale / dnorm,
            );
            let v = along(t);
            if v < value {
                c[j] = t;
                value = v;
            }
        }
        if before - value < DISTANCE_TOL {
            break;
        }
    }
    Ok(value)
}

fn golden_min(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn diagonal() -> FixedSet {
        FixedSet::Affine(AffineSubspace {
            origin: Point::zeros(2),
            directions: vec![pt(&[1.0, 1.0])],
        })
    }

    #[test]
    fn single_point() {
        let f = FixedSet::singleton(Point::zeros(2));
        assert_eq!(
            distance_to_fixed_set(&pt(&[3.0, 4.0]), &f, NormKind::Euclidean).unwrap(),
            5.0
        );
    }

    #[test]
    fn nearest_of_several() {
        let f = FixedSet::Points(vec![pt(&[10.0]), pt(&[2.0]), pt(&[-1.0])]);
        assert_eq!(
            distance_to_fixed_set(&pt(&[1.5]), &f, NormKind::Euclidean).unwrap(),
            0.5
        );
    }

    #[test]
    fn projection_onto_diagonal() {
        let d = distance_to_fixed_set(&pt(&[1.0, 2.0]), &diagonal(), NormKind::Euclidean).unwrap();
        assert_abs_diff_eq!(d, 0.5_f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn member_has_zero_distance() {
        for norm in [NormKind::Euclidean, NormKind::Max, NormKind::P(3.0)] {
            let d = distance_to_fixed_set(&pt(&[-2.5, -2.5]), &diagonal(), norm).unwrap();
            assert_abs_diff_eq!(d, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn max_norm_distance_to_diagonal() {
        // min_t max(|1 - t|, |2 - t|) = 1/2 at t = 3/2
        let d = distance_to_fixed_set(&pt(&[1.0, 2.0]), &diagonal(), NormKind::Max).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-10);
        // 1-norm: |1 - t| + |2 - t| >= 1
        let d = distance_to_fixed_set(&pt(&[1.0, 2.0]), &diagonal(), NormKind::P(1.0)).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn p_norm_distance_brute_force() {
        let x = pt(&[0.3, -1.7]);
        let norm = NormKind::P(3.0);
        let d = distance_to_fixed_set(&x, &diagonal(), norm).unwrap();
        let brute = (-400_000..=400_000)
            .map(|k| {
                let t = k as f64 * 1e-5;
                ((0.3 - t).abs().powi(3) + (-1.7 - t).abs().powi(3)).cbrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(d <= brute + 1e-10);
        assert!(brute - d < 1e-9);
    }

    #[test]
    fn plane_in_three_dimensions() {
        let plane = FixedSet::Affine(AffineSubspace {
            origin: pt(&[0.0, 0.0, 1.0]),
            directions: vec![pt(&[1.0, 0.0, 0.0]), pt(&[0.0, 1.0, 0.0])],
        });
        let d = distance_to_fixed_set(&pt(&[5.0, -3.0, 4.0]), &plane, NormKind::Euclidean).unwrap();
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-14);
        let d = distance_to_fixed_set(&pt(&[5.0, -3.0, 4.0]), &plane, NormKind::Max).unwrap();
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-9);
    }

    #[test]
    fn empty_list_not_applicable() {
        let f = FixedSet::Points(vec![]);
        assert!(matches!(
            distance_to_fixed_set(&pt(&[1.0]), &f, NormKind::Euclidean),
            Err(Error::NotApplicable(_))
        ));
    }
}
