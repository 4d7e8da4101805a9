//! Empirical constants of the weighted Clément interpolant under coefficient
//! jumps.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::dual::jacobian;
use super::identity::DualField;
use super::{monotone_bfs, trace_path};
use crate::elements::{clement_interpolate, CoefficientField};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::{build_patches, PatchIndex, TetMesh};
use crate::quadrature::tet_rule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    /// Ratio between the largest and smallest `μ⁻¹`.
    pub jump: f64,
    /// `max_K ‖μ^{-1/2}(v − Π̃v)‖_K / (h_K ‖μ^{-1/2}∇v‖_{ω̃_{K,e}})`.
    pub ratio_l2: f64,
    /// `max_K ‖μ^{-1/2} curl(v − Π̃v)‖_K / ‖μ^{-1/2}∇v‖_{ω̃_{K,e}}`.
    pub ratio_curl: f64,
}

/// Elements of the extended patch `ω̃_{K,e}`: `K`, the monotone paths from `K`
/// into the maximal sets of its edge patches, and those maximal sets. Where no
/// monotone path exists the whole edge patch is used.
fn extended_patch(mesh: &TetMesh, coeff: &CoefficientField, patches: &PatchIndex, k: usize) -> Vec<usize> {
    let mu_inv = |j: usize| coeff.mu_inv(mesh.tag(j));
    let mut out = vec![k];
    for &e in mesh.tet_edges(k) {
        let mut patch = mesh.edge_tets(e).to_vec();
        patch.sort_unstable();
        let parent = monotone_bfs(mesh, &patch, &mu_inv, k);
        for &t in patches.edge_max_mu_inv(e) {
            let j = patch.binary_search(&t).unwrap();
            if parent[j] == usize::MAX {
                out.extend_from_slice(&patch);
            } else {
                out.extend(trace_path(&patch, &parent, t));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// For each jump ratio, sets `μ⁻¹ = jump^{t/(T−1)}` on subdomain `t` of `T`
/// (and `β = 1`), interpolates the smooth field `v` with the weighted Clément
/// operator and reports the largest per-element ratios. The subdomain tags of
/// `mesh` define the layout.
pub fn interp_constant_probe(mesh: &TetMesh, jumps: &[f64], v: &DualField, order: usize) -> Result<Vec<ProbeRow>> {
    let rule = tet_rule(order)?;
    let nsub = mesh.num_subdomains();
    jumps
        .iter()
        .map(|&jump| {
            if !(jump.is_finite() && jump >= 1.0) {
                return Err(Error::Precondition(format!("jump ratio {jump} must be at least 1")));
            }
            let mu_inv: Vec<f64> = (0..nsub)
                .map(|t| if nsub == 1 { 1.0 } else { jump.powf(t as f64 / (nsub - 1) as f64) })
                .collect();
            let coeff = CoefficientField::from_mu_inv(mu_inv, vec![1.0; nsub])?;
            let patches = build_patches(mesh, &coeff);
            let pi = clement_interpolate(mesh, &patches, order, |k, x| jacobian(|p| v(mesh.tag(k), p), x).0)?;
            // Per element: ∫μ⁻¹|∇v|², ∫μ⁻¹|v − Π̃v|², ∫μ⁻¹|curl(v − Π̃v)|².
            let parts: Vec<[f64; 3]> = (0..mesh.num_tets())
                .into_par_iter()
                .map(|k| {
                    let g = mesh.geometry(k);
                    let m = coeff.element_mu_inv(mesh, k);
                    let curl_pi = pi.curl(mesh, k);
                    let mut acc = [0.0; 3];
                    for (l, w) in rule.iter() {
                        let x = g.point_from_barycentric(l);
                        let (val, j) = jacobian(|p| v(mesh.tag(k), p), &x);
                        let curl = Vec3::new(j[(2, 1)] - j[(1, 2)], j[(0, 2)] - j[(2, 0)], j[(1, 0)] - j[(0, 1)]);
                        acc[0] += w * j.norm_squared();
                        acc[1] += w * (val - pi.eval(mesh, k, l)).norm_squared();
                        acc[2] += w * (curl - curl_pi).norm_squared();
                    }
                    acc.map(|a| a * m * g.volume)
                })
                .collect();
            let ratios: Vec<(f64, f64)> = (0..mesh.num_tets())
                .into_par_iter()
                .map(|k| {
                    let den: f64 = extended_patch(mesh, &coeff, &patches, k).iter().map(|&j| parts[j][0]).sum();
                    if den == 0.0 {
                        return (0.0, 0.0);
                    }
                    let den = den.sqrt();
                    (parts[k][1].sqrt() / (mesh.h(k) * den), parts[k][2].sqrt() / den)
                })
                .collect();
            Ok(ProbeRow {
                jump,
                ratio_l2: ratios.iter().map(|r| r.0).fold(0.0, f64::max),
                ratio_curl: ratios.iter().map(|r| r.1).fold(0.0, f64::max),
            })
        })
        .collect()
}

/// CSV with header `jump,ratio_l2,ratio_curl`.
pub fn write_probe_csv(rows: &[ProbeRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "jump,ratio_l2,ratio_curl")?;
    for r in rows {
        writeln!(out, "{:e},{:e},{:e}", r.jump, r.ratio_l2, r.ratio_curl)?;
    }
    Ok(())
}
