//! Numerical checks of the structural hypotheses behind the estimator: the
//! quasi-monotone coefficient distributions in edge and vertex patches, the
//! weighted Helmholtz norm identity, and empirical constants of the weighted
//! Clément interpolant.

mod dual;
mod identity;
mod probe;

pub use dual::{jacobian, Dual3};
pub use identity::{helmholtz_identity_residual, identity_suite, DualField, IdentityCase, IdentityReport};
pub use probe::{interp_constant_probe, write_probe_csv, ProbeRow};

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::elements::CoefficientField;
use crate::error::{Error, Result};
use crate::mesh::{PatchIndex, TetMesh, COEFFICIENT_TIE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchKind {
    /// Edge patches weighted by `μ⁻¹`.
    Edge,
    /// Vertex patches weighted by `β`.
    Vertex,
}

impl fmt::Display for PatchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatchKind::Edge => "edge",
            PatchKind::Vertex => "vertex",
        })
    }
}

/// A face-connected element path with nondecreasing coefficient, from `start`
/// to an element of the maximal-coefficient set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub start: usize,
    pub target: usize,
    /// `start, …, target`; a single element when they coincide.
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// No monotone path inside the patch leads from `from` to `to`.
    NoPath { from: usize, to: usize },
    /// Boundary entity whose maximal set has no face on `∂Ω`.
    NoBoundaryContact,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NoPath { from, to } => write!(f, "no monotone path from element {from} to element {to}"),
            Violation::NoBoundaryContact => f.write_str("no maximal element touches the boundary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityCheck {
    /// Edge or vertex index.
    pub entity: usize,
    pub boundary: bool,
    pub ok: bool,
    pub witnesses: Vec<Witness>,
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub kind: PatchKind,
    pub entities: Vec<EntityCheck>,
    /// Conjunction of the per-entity flags.
    pub quasi_monotone: bool,
}

impl MonotonicityReport {
    pub fn violations(&self) -> impl Iterator<Item = &EntityCheck> {
        self.entities.iter().filter(|c| !c.ok)
    }

    /// CSV of the violating entities: `kind,entity,boundary,reason,from,to`.
    pub fn write_violations_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "kind,entity,boundary,reason,from,to")?;
        for c in self.violations() {
            let (reason, from, to) = match c.violation {
                Some(Violation::NoPath { from, to }) => ("no_monotone_path", from.to_string(), to.to_string()),
                Some(Violation::NoBoundaryContact) => ("no_boundary_contact", String::new(), String::new()),
                None => ("unknown", String::new(), String::new()),
            };
            writeln!(out, "{},{},{},{},{},{}", self.kind, c.entity, c.boundary, reason, from, to)?;
        }
        Ok(())
    }

    pub fn save_violations_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_violations_csv(std::io::BufWriter::new(file))
    }
}

fn at_least(a: f64, b: f64) -> bool {
    b >= a - COEFFICIENT_TIE_TOL * a.abs().max(b.abs())
}

/// Face neighbour of `k` across its local face `i`, if any.
fn face_neighbor(mesh: &TetMesh, k: usize, i: usize) -> Option<usize> {
    mesh.face_adjacency(mesh.tet_faces(k)[i]).other(k)
}

/// Breadth-first search inside `patch` from `start`, stepping only to face
/// neighbours with a coefficient at least as large. Returns the parent map
/// (indexed like `patch`), with `usize::MAX` for unreached elements.
pub(super) fn monotone_bfs(mesh: &TetMesh, patch: &[usize], coeff: &dyn Fn(usize) -> f64, start: usize) -> Vec<usize> {
    let slot = |k: usize| patch.binary_search(&k).ok();
    let mut parent = vec![usize::MAX; patch.len()];
    let s = slot(start).expect("start lies in the patch");
    parent[s] = s;
    let mut queue = VecDeque::from([start]);
    while let Some(k) = queue.pop_front() {
        for i in 0..4 {
            let Some(n) = face_neighbor(mesh, k, i) else { continue };
            let Some(j) = slot(n) else { continue };
            if parent[j] == usize::MAX && at_least(coeff(k), coeff(n)) {
                parent[j] = slot(k).unwrap();
                queue.push_back(n);
            }
        }
    }
    parent
}

pub(super) fn trace_path(patch: &[usize], parent: &[usize], target: usize) -> Vec<usize> {
    let mut j = patch.binary_search(&target).unwrap();
    let mut path = vec![patch[j]];
    while parent[j] != j {
        j = parent[j];
        path.push(patch[j]);
    }
    path.reverse();
    path
}

fn check_entity(
    mesh: &TetMesh,
    entity: usize,
    boundary: bool,
    patch: &[usize],
    maximal: &[usize],
    coeff: &dyn Fn(usize) -> f64,
) -> EntityCheck {
    let mut patch = patch.to_vec();
    patch.sort_unstable();
    let mut check = EntityCheck {
        entity,
        boundary,
        ok: true,
        witnesses: Vec::new(),
        violation: None,
    };
    for &k in &patch {
        if boundary && maximal.contains(&k) {
            continue;
        }
        let parent = monotone_bfs(mesh, &patch, coeff, k);
        for &t in maximal {
            let j = patch.binary_search(&t).expect("maximal set lies in the patch");
            if parent[j] == usize::MAX {
                check.ok = false;
                check.violation = Some(Violation::NoPath { from: k, to: t });
                check.witnesses.clear();
                return check;
            }
            check.witnesses.push(Witness {
                start: k,
                target: t,
                path: trace_path(&patch, &parent, t),
            });
        }
    }
    if boundary {
        let contact = maximal
            .iter()
            .any(|&k| mesh.tet_faces(k).iter().any(|&f| mesh.is_boundary_face(f)));
        if !contact {
            check.ok = false;
            check.violation = Some(Violation::NoBoundaryContact);
            check.witnesses.clear();
        }
    }
    check
}

fn report(kind: PatchKind, entities: Vec<EntityCheck>) -> MonotonicityReport {
    let quasi_monotone = entities.iter().all(|c| c.ok);
    MonotonicityReport {
        kind,
        entities,
        quasi_monotone,
    }
}

/// Quasi-monotonicity of `μ⁻¹` in every edge patch: from every element of
/// `ω_e` (of `ω_e \ ω̃_e` for boundary edges) each element of the maximal set
/// `ω̃_e` is reachable through face neighbours inside `ω_e` along which `μ⁻¹`
/// does not decrease. Boundary edges also need a face of `ω̃_e` on `∂Ω`.
pub fn check_quasimonotone_edge(mesh: &TetMesh, coeff: &CoefficientField, patches: &PatchIndex) -> MonotonicityReport {
    let mu_inv = |k: usize| coeff.mu_inv(mesh.tag(k));
    let entities = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            check_entity(
                mesh,
                e,
                mesh.is_boundary_edge(e),
                mesh.edge_tets(e),
                patches.edge_max_mu_inv(e),
                &mu_inv,
            )
        })
        .collect();
    report(PatchKind::Edge, entities)
}

/// The vertex-patch analogue of [`check_quasimonotone_edge`] for `β`.
pub fn check_quasimonotone_vertex(mesh: &TetMesh, coeff: &CoefficientField, patches: &PatchIndex) -> MonotonicityReport {
    let beta = |k: usize| coeff.beta(mesh.tag(k));
    let entities = (0..mesh.num_vertices())
        .into_par_iter()
        .map(|z| {
            check_entity(
                mesh,
                z,
                mesh.is_boundary_vertex(z),
                mesh.vertex_tets(z),
                patches.vertex_max_beta(z),
                &beta,
            )
        })
        .collect();
    report(PatchKind::Vertex, entities)
}

/// Check a witness against the definition: consecutive elements share a face,
/// all lie in `patch`, the coefficient never decreases, and the path ends in
/// `maximal`.
pub fn validate_witness(
    mesh: &TetMesh,
    coeff: &dyn Fn(usize) -> f64,
    patch: &[usize],
    maximal: &[usize],
    w: &Witness,
) -> Result<()> {
    let fail = |msg: String| Err(Error::Precondition(format!("witness {} → {}: {msg}", w.start, w.target)));
    if w.path.first() != Some(&w.start) || w.path.last() != Some(&w.target) {
        return fail("endpoints do not match".into());
    }
    if !maximal.contains(&w.target) {
        return fail("target is not maximal".into());
    }
    if let Some(k) = w.path.iter().find(|k| !patch.contains(k)) {
        return fail(format!("element {k} leaves the patch"));
    }
    for pair in w.path.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(0..4).any(|i| face_neighbor(mesh, a, i) == Some(b)) {
            return fail(format!("{a} and {b} share no face"));
        }
        if !at_least(coeff(a), coeff(b)) {
            return fail(format!("coefficient decreases from {a} to {b}"));
        }
    }
    Ok(())
}
