//! Monodromy generators by analytic continuation around single singular
//! points: a lasso from a far base point to an isolating circle, once
//! around, and back.

use num_complex::Complex64 as C64;

use super::ode::{integrate, Path, PathSegment};
use super::{FuchsianError, FuchsianSystem};
use crate::numkit::{lu_solve, Matrix};

/// A lasso around one singular point: polyline legs from the base point to
/// the circle, the full circle, and the legs reversed.
#[derive(Clone, Debug)]
pub struct LoopPath {
    base: C64,
    target: usize,
    winding: i8,
    path: Path,
}

impl LoopPath {
    /// Build a lasso around `t_j`.  The circle of the given radius must
    /// isolate the point; legs are chosen (and bent if necessary) to keep
    /// clear of the other singular points.
    pub fn around(
        system: &FuchsianSystem,
        j: usize,
        radius: f64,
        winding: i8,
    ) -> Result<Self, FuchsianError> {
        system.check_index(j)?;
        assert!(winding == 1 || winding == -1, "winding must be +1 or -1");
        let t_j = system.points()[j];
        let gap = system.isolation_gap(j);
        if !(radius > 0.0) || gap < 1.6 * radius {
            return Err(FuchsianError::CircleNotIsolating { j: j + 1, radius });
        }
        let obstacles: Vec<C64> = system
            .points()
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &t)| t)
            .collect();

        let n = system.n() as f64;
        let centroid = system.points().iter().sum::<C64>() / C64::new(n, 0.0);
        let spread = system
            .points()
            .iter()
            .map(|&t| (t - centroid).norm())
            .fold(1e-3, f64::max);
        let r_big = 10.0 * spread;
        let clearance = (radius / 2.0).max(0.02 * gap);

        // try a fan of base directions, keep the clearest approach leg
        let mut best: Option<(f64, C64, C64)> = None;
        for i in 0..16 {
            let phi = 2.0 * std::f64::consts::PI * (i as f64) / 16.0 + 0.1;
            let base = centroid + C64::from_polar(r_big, phi);
            let dir = (base - t_j) / (base - t_j).norm();
            let entry = t_j + dir * radius;
            let leg = PathSegment::Line { from: base, to: entry };
            let c = obstacles
                .iter()
                .map(|&t| leg.distance_to(t))
                .fold(f64::INFINITY, f64::min);
            if best.as_ref().map_or(true, |(bc, _, _)| c > *bc) {
                best = Some((c, base, entry));
            }
        }
        let (_, base, entry) = best.expect("candidate fan is non-empty");

        let mut waypoints = vec![base];
        bend_leg(base, entry, &obstacles, clearance, 0, &mut waypoints)?;

        let mut segments: Vec<PathSegment> = waypoints
            .windows(2)
            .map(|w| PathSegment::Line { from: w[0], to: w[1] })
            .collect();
        let theta = (entry - t_j).arg();
        segments.push(PathSegment::Arc {
            center: t_j,
            radius,
            start_angle: theta,
            sweep: 2.0 * std::f64::consts::PI * winding as f64,
        });
        for w in waypoints.windows(2).rev() {
            segments.push(PathSegment::Line { from: w[1], to: w[0] });
        }
        Ok(LoopPath { base, target: j, winding, path: Path { segments } })
    }

    pub fn base(&self) -> C64 {
        self.base
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn winding(&self) -> i8 {
        self.winding
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

/// Append the leg from `a` to `b`, inserting detour waypoints until every
/// sub-leg stays `clearance` away from all obstacles.
fn bend_leg(
    a: C64,
    b: C64,
    obstacles: &[C64],
    clearance: f64,
    depth: usize,
    out: &mut Vec<C64>,
) -> Result<(), FuchsianError> {
    let seg = PathSegment::Line { from: a, to: b };
    let mut worst: Option<(f64, C64)> = None;
    for &t in obstacles {
        let d = seg.distance_to(t);
        if d < clearance && worst.as_ref().map_or(true, |(wd, _)| d < *wd) {
            worst = Some((d, t));
        }
    }
    match worst {
        None => {
            out.push(b);
            Ok(())
        }
        Some((_, obstacle)) => {
            if depth >= 8 {
                return Err(FuchsianError::PathTooClose {
                    index: 0,
                    dist: seg.distance_to(obstacle),
                });
            }
            // push the midpoint away from the obstacle, perpendicular-ish
            let d = b - a;
            let foot = {
                let len2 = d.norm_sqr();
                let u = (((obstacle - a) * d.conj()).re / len2).clamp(0.0, 1.0);
                a + d * u
            };
            let away = foot - obstacle;
            let normal = if away.norm() > 1e-12 * clearance.max(1.0) {
                away / away.norm()
            } else {
                let unit = d / d.norm();
                C64::new(-unit.im, unit.re)
            };
            let detour = obstacle + normal * (2.5 * clearance);
            bend_leg(a, detour, obstacles, clearance, depth + 1, out)?;
            bend_leg(detour, b, obstacles, clearance, depth + 1, out)
        }
    }
}

/// Monodromy generator around `t_j`: continue the solution seeded with the
/// identity at a far base point once (positively) around the point and
/// back, and return `(continued Y)^{-1} (original Y)`.
pub fn monodromy(
    system: &FuchsianSystem,
    j: usize,
    radius: f64,
) -> Result<Matrix, FuchsianError> {
    let lasso = LoopPath::around(system, j, radius, 1)?;
    let y0 = Matrix::identity(system.m());
    let y_loop = integrate(system, lasso.path(), &y0)?;
    Ok(lu_solve(&y_loop, &y0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::residues_from_realization;
    use crate::realization::{complete_from_cp_bz, eval, PoleZeroData};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn d_instance() -> crate::realization::Realization {
        let pz = PoleZeroData::new(vec![r(0.0)], vec![r(1.0)]).unwrap();
        let c_p = Matrix::from_real_rows(&[vec![1.0], vec![0.0]]);
        let b_z = Matrix::from_real_rows(&[vec![1.0, 0.0]]);
        complete_from_cp_bz(&c_p, &b_z, &pz).unwrap()
    }

    #[test]
    fn integrate_reproduces_realization_values() {
        let re = d_instance();
        let f = residues_from_realization(&re);
        let path = Path::polyline(&[r(10.0), r(2.0)]);
        let y0 = eval(&re, r(10.0)).unwrap();
        let y = integrate(&f, &path, &y0).unwrap();
        let expected = eval(&re, r(2.0)).unwrap();
        assert!(
            (&y - &expected).max_norm() < 1e-8,
            "continuation error {:.3e}",
            (&y - &expected).max_norm()
        );
    }

    #[test]
    fn integrate_zero_system_is_identity_flow() {
        let f = FuchsianSystem::new(
            vec![r(0.0), r(1.0)],
            vec![Matrix::zeros(2, 2), Matrix::zeros(2, 2)],
        )
        .unwrap();
        let y0 = Matrix::from_real_rows(&[vec![2.0, 1.0], vec![0.5, 1.0]]);
        let path = Path::polyline(&[C64::new(5.0, 2.0), C64::new(-4.0, 3.0), C64::new(0.5, 6.0)]);
        let y = integrate(&f, &path, &y0).unwrap();
        assert!((&y - &y0).max_norm() < 1e-12);
    }

    #[test]
    fn integrate_round_trip_is_identity() {
        let re = d_instance();
        let f = residues_from_realization(&re);
        let fwd = Path::polyline(&[r(10.0), C64::new(2.0, 2.0)]);
        let back = Path::polyline(&[C64::new(2.0, 2.0), r(10.0)]);
        let y0 = Matrix::identity(2);
        let mid = integrate(&f, &fwd, &y0).unwrap();
        let ret = integrate(&f, &back, &mid).unwrap();
        assert!((&ret - &y0).max_norm() < 1e-8);
    }

    #[test]
    fn integrate_rejects_paths_through_singularities() {
        let re = d_instance();
        let f = residues_from_realization(&re);
        let path = Path::polyline(&[r(10.0), r(-10.0)]); // passes through 0 and 1
        assert!(matches!(
            integrate(&f, &path, &Matrix::identity(2)),
            Err(FuchsianError::PathTooClose { .. })
        ));
    }

    #[test]
    fn monodromy_of_rational_system_is_trivial() {
        let re = d_instance();
        let f = residues_from_realization(&re);
        for j in 0..2 {
            let phi = monodromy(&f, j, 0.25).unwrap();
            assert!(
                (&phi - &Matrix::identity(2)).max_norm() < 1e-6,
                "monodromy around {} deviates {:.3e}",
                j,
                (&phi - &Matrix::identity(2)).max_norm()
            );
        }
    }

    #[test]
    fn monodromy_of_zero_system_is_identity() {
        let f = FuchsianSystem::new(
            vec![r(0.0), r(1.0)],
            vec![Matrix::zeros(2, 2), Matrix::zeros(2, 2)],
        )
        .unwrap();
        let phi = monodromy(&f, 0, 0.3).unwrap();
        assert!((&phi - &Matrix::identity(2)).max_norm() < 1e-10);
    }

    #[test]
    fn monodromy_eigenvalues_of_scalar_third_system() {
        let q1 = Matrix::diag(&[r(1.0 / 3.0), r(0.0)]);
        let q2 = q1.scale(r(-1.0));
        let f = FuchsianSystem::new(vec![r(0.0), r(1.0)], vec![q1, q2]).unwrap();
        let phi = monodromy(&f, 0, 0.3).unwrap();
        // conjugacy-level check: eigenvalue set {exp(-/+ 2 pi i / 3), 1}
        let eigs = crate::fuchsian::eigenvalues(&phi).unwrap();
        let target = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut found_unit = false;
        let mut found_rot = false;
        for e in eigs {
            if (e - r(1.0)).norm() < 1e-6 {
                found_unit = true;
            }
            if (e - target).norm() < 1e-6 || (e - target.conj()).norm() < 1e-6 {
                found_rot = true;
            }
        }
        assert!(found_unit && found_rot);
    }

    #[test]
    fn reversed_winding_gives_inverse_monodromy() {
        let q1 = Matrix::diag(&[r(1.0 / 3.0), r(0.0)]);
        let q2 = q1.scale(r(-1.0));
        let f = FuchsianSystem::new(vec![r(0.0), r(1.0)], vec![q1, q2]).unwrap();
        let y0 = Matrix::identity(2);
        let fwd = LoopPath::around(&f, 0, 0.3, 1).unwrap();
        let back = LoopPath::around(&f, 0, 0.3, -1).unwrap();
        let a = integrate(&f, fwd.path(), &y0).unwrap();
        let b = integrate(&f, back.path(), &y0).unwrap();
        assert!(
            (&a.matmul(&b) - &Matrix::identity(2)).max_norm() < 1e-7,
            "opposite circuits should compose to the identity"
        );
    }

    #[test]
    fn lasso_keeps_clear_of_other_points() {
        let q1 = Matrix::diag(&[r(1.0 / 3.0), r(0.0)]);
        let q2 = q1.scale(r(-1.0));
        let f = FuchsianSystem::new(vec![r(0.0), r(1.0)], vec![q1, q2]).unwrap();
        let lasso = LoopPath::around(&f, 0, 0.3, 1).unwrap();
        assert!(lasso.path().distance_to(r(1.0)) >= 0.15);
    }

    #[test]
    fn radius_must_isolate() {
        let f = FuchsianSystem::new(
            vec![r(0.0), r(1.0)],
            vec![Matrix::zeros(2, 2), Matrix::zeros(2, 2)],
        )
        .unwrap();
        assert!(matches!(
            LoopPath::around(&f, 0, 0.9, 1),
            Err(FuchsianError::CircleNotIsolating { .. })
        ));
    }
}
