//! Longest-edge (Rivara) bisection with conforming closure.

use std::collections::HashMap;

use super::{MeshError, TetMesh};
use crate::geometry::{Point3, EDGE_VERTICES};

/// Upper bound on closure passes before giving up.
pub const MAX_CLOSURE_GENERATIONS: usize = 100;

struct Splitter {
    vertices: Vec<Point3>,
    midpoints: HashMap<(usize, usize), usize>,
}

impl Splitter {
    fn key(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let vertices = &mut self.vertices;
        *self.midpoints.entry(Self::key(a, b)).or_insert_with(|| {
            vertices.push((vertices[a] + vertices[b]) * 0.5);
            vertices.len() - 1
        })
    }

    fn is_split(&self, a: usize, b: usize) -> bool {
        self.midpoints.contains_key(&Self::key(a, b))
    }

    /// Local index into [`EDGE_VERTICES`] of the refinement edge of `t`: the
    /// longest edge, ties broken by the lexicographically smallest sorted
    /// vertex pair so that neighbouring elements agree.
    fn refinement_edge(&self, t: &[usize; 4]) -> usize {
        let mut best = 0;
        let mut best_len = f64::NEG_INFINITY;
        let mut best_pair = (usize::MAX, usize::MAX);
        for (le, [a, b]) in EDGE_VERTICES.iter().enumerate() {
            let (p, q) = (t[*a], t[*b]);
            let len = (self.vertices[p] - self.vertices[q]).norm_squared();
            let pair = Self::key(p, q);
            let tol = 1e-12 * len.max(best_len.max(0.0));
            if len > best_len + tol || ((len - best_len).abs() <= tol && pair < best_pair) {
                best = le;
                best_len = len;
                best_pair = pair;
            }
        }
        best
    }
}

/// Bisects every marked element at least once and closes the mesh by
/// bisecting any element that still carries a hanging node. Children inherit
/// the subdomain tag of their parent.
pub fn bisect(mesh: &TetMesh, marked: &[usize]) -> Result<TetMesh, MeshError> {
    let mut s = Splitter {
        vertices: mesh.vertices().to_vec(),
        midpoints: HashMap::new(),
    };
    for &k in marked {
        if k >= mesh.num_tets() {
            return Err(MeshError::MarkedOutOfRange(k));
        }
        let t = mesh.tet(k);
        let [a, b] = EDGE_VERTICES[s.refinement_edge(t)];
        s.midpoint(t[a], t[b]);
    }

    let mut tets: Vec<[usize; 4]> = mesh.tets().to_vec();
    let mut tags: Vec<usize> = mesh.tags().to_vec();
    let mut generation = 0;
    loop {
        let mut changed = false;
        let mut next_tets = Vec::with_capacity(tets.len() + tets.len() / 2);
        let mut next_tags = Vec::with_capacity(next_tets.capacity());
        for (t, &tag) in tets.iter().zip(&tags) {
            let hanging = EDGE_VERTICES.iter().any(|[a, b]| s.is_split(t[*a], t[*b]));
            if !hanging {
                next_tets.push(*t);
                next_tags.push(tag);
                continue;
            }
            changed = true;
            let [i, j] = EDGE_VERTICES[s.refinement_edge(t)];
            let m = s.midpoint(t[i], t[j]);
            // Replacing one endpoint of the bisected edge by its midpoint keeps
            // the orientation of the parent.
            let mut c0 = *t;
            c0[j] = m;
            let mut c1 = *t;
            c1[i] = m;
            next_tets.extend([c0, c1]);
            next_tags.extend([tag, tag]);
        }
        tets = next_tets;
        tags = next_tags;
        if !changed {
            break;
        }
        generation += 1;
        if generation > MAX_CLOSURE_GENERATIONS {
            return Err(MeshError::RefinementDiverged(MAX_CLOSURE_GENERATIONS));
        }
    }
    TetMesh::new(s.vertices, tets, tags)
}

/// Bisects every element once (plus closure).
pub fn uniform_refine(mesh: &TetMesh) -> Result<TetMesh, MeshError> {
    let all: Vec<usize> = (0..mesh.num_tets()).collect();
    bisect(mesh, &all)
}
