use std::f64::consts::PI;

use super::*;
use crate::geometry::{Point3, Vec3};

#[test]
fn dorfler_marks_the_minimal_prefix() {
    let eta = [1.0, 3.0, 4.0, 2.0];
    let h = [1.0; 4];
    assert_eq!(dorfler_mark(&eta, 0.2, &h).unwrap(), vec![2]);
    // Exhaustive oracle: no set smaller than the marked one meets the bulk
    // criterion, for several θ.
    let total: f64 = eta.iter().map(|e| e * e).sum();
    for theta in [0.1, 0.2, 0.5, 0.7, 0.9, 1.0] {
        let marked = dorfler_mark(&eta, theta, &h).unwrap();
        let sum: f64 = marked.iter().map(|&k| eta[k] * eta[k]).sum();
        assert!(sum >= theta * total);
        for mask in 0u32..16 {
            let subset: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
            let s: f64 = subset.iter().map(|&k| eta[k] * eta[k]).sum();
            if s >= theta * total {
                assert!(subset.len() >= marked.len(), "θ = {theta}");
            }
        }
        // Dropping the last marked element breaks the criterion.
        let short: f64 = marked[..marked.len() - 1].iter().map(|&k| eta[k] * eta[k]).sum();
        assert!(short < theta * total);
    }
    assert_eq!(dorfler_mark(&eta, 1.0, &h).unwrap().len(), 4);
    assert_eq!(dorfler_mark(&[0.3], 0.2, &[1.0]).unwrap(), vec![0]);
}

#[test]
fn dorfler_edge_cases() {
    assert_eq!(dorfler_mark(&[0.0, 0.0, 0.0], 0.5, &[0.1, 0.3, 0.2]).unwrap(), vec![1]);
    assert!(dorfler_mark(&[1.0], 0.0, &[1.0]).is_err());
    assert!(dorfler_mark(&[1.0], 1.5, &[1.0]).is_err());
    assert!(dorfler_mark(&[], 0.5, &[]).is_err());
    assert!(dorfler_mark(&[f64::NAN], 0.5, &[1.0]).is_err());
    // Ties resolve to the lower index.
    assert_eq!(dorfler_mark(&[1.0, 1.0], 0.5, &[1.0, 1.0]).unwrap(), vec![0]);
}

fn history(ndof: &[usize], eta: &[f64]) -> ConvergenceHistory {
    ConvergenceHistory {
        problem: "synthetic".into(),
        estimator: EstimatorKind::Recovery,
        levels: ndof
            .iter()
            .zip(eta)
            .enumerate()
            .map(|(level, (&n, &e))| LevelRecord {
                level,
                ndof: n,
                elements: n,
                eta: e,
                eta_perp: e,
                eta_0: 0.0,
                eta_r: 0.0,
                error: None,
                rel_error: None,
                eff_index: None,
            })
            .collect(),
        converged: false,
    }
}

#[test]
fn rate_fit_on_exact_power_laws() {
    let ndof = [100, 230, 520, 1100, 2500, 6000];
    let eta: Vec<f64> = ndof.iter().map(|&n| 7.0 * (n as f64).powf(-1.0 / 3.0)).collect();
    let (r, err) = fit_rate(&history(&ndof, &eta)).unwrap();
    assert!((r - 1.0 / 3.0).abs() < 1e-12);
    assert!(err.is_none());
    let (r, _) = fit_rate(&history(&ndof, &[2.0; 6])).unwrap();
    assert!(r.abs() < 1e-12);
    assert!(matches!(
        fit_rate(&history(&ndof[..3], &eta[..3])),
        Err(Error::TooFewLevels { needed: 4, got: 3 })
    ));
    // Only the last half counts: a different early slope is ignored.
    let mut eta2 = eta.clone();
    eta2[0] *= 10.0;
    eta2[1] *= 3.0;
    let (r, _) = fit_rate(&history(&ndof, &eta2)).unwrap();
    assert!((r - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn kellogg_potential_is_glued_continuously() {
    let p = KelloggParams::default();
    let beta = |t: f64| p.beta_at(t);
    for t in [PI / 2.0, PI, 1.5 * PI] {
        let (a, da) = p.phi(t - 1e-12);
        let (b, db) = p.phi(t + 1e-12);
        assert!((a - b).abs() < 1e-9, "φ jumps at {t}");
        // Normal flux continuity: β φ' is continuous across each ray.
        assert!((beta(t - 1e-9) * da - beta(t + 1e-9) * db).abs() < 1e-8, "flux jumps at {t}");
    }
    let (a, da) = p.phi(2.0 * PI - 1e-12);
    let (b, db) = p.phi(0.0);
    assert!((a - b).abs() < 1e-9);
    assert!((beta(2.0 * PI - 1e-9) * da - beta(1e-9) * db).abs() < 1e-8);
}

#[test]
fn kellogg_gradient_and_harmonicity() {
    let p = KelloggParams::default();
    let h = 1e-5;
    for x in [Point3::new(0.3, 0.4, 0.0), Point3::new(-0.7, 0.2, 0.1), Point3::new(-0.2, -0.5, 0.0), Point3::new(0.6, -0.1, -0.1)] {
        let fd = Vec3::new(
            (p.potential(&(x + Vec3::x() * h)) - p.potential(&(x - Vec3::x() * h))) / (2.0 * h),
            (p.potential(&(x + Vec3::y() * h)) - p.potential(&(x - Vec3::y() * h))) / (2.0 * h),
            0.0,
        );
        assert!((fd - p.gradient(&x)).norm() < 1e-7);
        let hl = 1e-3;
        let lap = (p.potential(&(x + Vec3::x() * hl)) + p.potential(&(x - Vec3::x() * hl))
            + p.potential(&(x + Vec3::y() * hl))
            + p.potential(&(x - Vec3::y() * hl))
            - 4.0 * p.potential(&x))
            / (hl * hl);
        assert!(lap.abs() < 1e-4, "Δψ = {lap} at {x:?}");
    }
}

#[test]
fn kellogg_energy_matches_cartesian_quadrature() {
    // Independent oracle: tensor Gauss quadrature on the four unit squares
    // around the origin, graded towards the singular corner.
    let p = KelloggParams::default();
    let rule = crate::quadrature::segment_rule(11).unwrap();
    let mut total = 0.0;
    let grade = |i: usize, n: usize| (i as f64 / n as f64).powi(4);
    let n = 24;
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        for i in 0..n {
            for j in 0..n {
                let (x0, x1) = (grade(i, n), grade(i + 1, n));
                let (y0, y1) = (grade(j, n), grade(j + 1, n));
                for (a, wa) in rule.iter() {
                    for (b, wb) in rule.iter() {
                        let x = Point3::new(sx * (x0 + (x1 - x0) * a[1]), sy * (y0 + (y1 - y0) * b[1]), 0.0);
                        let (_, t) = KelloggParams::polar(&x);
                        total += wa * wb * (x1 - x0) * (y1 - y0) * p.beta_at(t) * p.gradient(&x).norm_squared();
                    }
                }
            }
        }
    }
    let want = 0.4 * total;
    let got = p.energy_sq(0.2);
    assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
}

#[test]
fn benchmark_layouts() {
    let k = kellogg_slit().unwrap();
    let tag_at = |m: &TetMesh, x: Point3| {
        (0..m.num_tets())
            .find(|&e| m.geometry(e).barycentric(&x).iter().all(|&l| l > 1e-9))
            .map(|e| m.tag(e))
            .unwrap()
    };
    let beta_at = |b: &BenchmarkProblem, x: Point3| b.coeff.beta(tag_at(&b.mesh, x));
    assert!((beta_at(&k, Point3::new(0.51, 0.52, 0.01)) - 5.828_427_124_746_190_7).abs() < 1e-15);
    assert_eq!(beta_at(&k, Point3::new(-0.51, 0.52, 0.01)), 1.0);
    let c = cube_inclusion().unwrap();
    assert_eq!(beta_at(&c, Point3::new(0.01, 0.02, 0.03)), 1.0);
    assert_eq!(beta_at(&c, Point3::new(0.9, 0.91, 0.92)), 100.0);
    assert!(benchmark("nope").is_err());
    assert_eq!(benchmark_catalog().unwrap().len(), 3);
}

#[test]
fn manufactured_solution_satisfies_the_equation() {
    // curl curl u + u = f by central differences of the closed-form curl.
    let b = manufactured_cube().unwrap();
    let h = 1e-5;
    for x in [Point3::new(0.2, 0.3, 0.7), Point3::new(0.55, 0.1, 0.4)] {
        let d = |e: Vec3| (manufactured_curl(&(x + e * h)) - manufactured_curl(&(x - e * h))) / (2.0 * h);
        let (dx, dy, dz) = (d(Vec3::x()), d(Vec3::y()), d(Vec3::z()));
        let curl_curl = Vec3::new(dy.z - dz.y, dz.x - dx.z, dx.y - dy.x);
        let r = curl_curl + manufactured_field(&x) - b.source.eval(0, &x);
        assert!(r.norm() < 1e-6 * b.source.eval(0, &x).norm());
    }
}

#[test]
fn adaptive_loop_reduces_the_error() {
    let b = manufactured_cube_with(2).unwrap();
    let opts = AmrOptions {
        max_levels: 3,
        ..AmrOptions::default()
    };
    let mut seen = 0;
    let hist = amr_loop_with(&b, EstimatorKind::Recovery, &opts, |s| {
        assert_eq!(s.indicators.len(), s.mesh.num_tets());
        seen += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(seen, 3);
    assert_eq!(hist.levels.len(), 3);
    for w in hist.levels.windows(2) {
        assert!(w[1].ndof > w[0].ndof);
        assert!(w[1].error.unwrap() < w[0].error.unwrap());
    }
    let again = amr_loop(&b, EstimatorKind::Recovery, &opts).unwrap();
    assert_eq!(again, hist);
}

#[test]
fn relative_error_stop_needs_an_exact_solution() {
    let c = cube_inclusion_with([2, 2, 2]).unwrap();
    let opts = AmrOptions {
        stop: Some(StoppingRule::RelativeError(0.1)),
        ..AmrOptions::default()
    };
    assert!(amr_loop(&c, EstimatorKind::Recovery, &opts).is_err());
    let opts = AmrOptions {
        stop: Some(StoppingRule::Estimator(1e9)),
        ..AmrOptions::default()
    };
    let h = amr_loop(&c, EstimatorKind::Residual, &opts).unwrap();
    assert!(h.converged);
    assert_eq!(h.levels.len(), 1);
}
