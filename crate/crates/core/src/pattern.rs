//! Circle patterns, cross-ratio systems and the developing map.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::mesh::TriangulatedDisk;
use crate::moebius::{det, edge_cross_ratio, SpherePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("face {0} has coincident vertices")]
    DegenerateFace(usize),
    #[error("cross ratios do not close: residual {0:.3e}")]
    ClosureViolation(f64),
    #[error("seed points are not distinct")]
    DegenerateSeed,
    #[error("vertex count {got} does not match the mesh ({expected})")]
    SizeMismatch { expected: usize, got: usize },
}

/// Slack on the Delaunay bounds `0 ≤ Arg X < π`, so that cocircular quads
/// (Arg X = 0 up to rounding) count as Delaunay.
pub const DELAUNAY_SLACK: f64 = 1e-9;

pub fn is_delaunay(x: C64) -> bool {
    let a = x.arg();
    a >= -DELAUNAY_SLACK && a < PI - DELAUNAY_SLACK
}

/// A realization of a triangulated disk on the Riemann sphere.
#[derive(Clone, Debug)]
pub struct CirclePattern {
    pub disk: Arc<TriangulatedDisk>,
    pub z: Vec<SpherePoint>,
}

impl CirclePattern {
    pub fn new(disk: Arc<TriangulatedDisk>, z: Vec<SpherePoint>) -> Result<Self, PatternError> {
        if z.len() != disk.n_vertices() {
            return Err(PatternError::SizeMismatch { expected: disk.n_vertices(), got: z.len() });
        }
        for (f, t) in disk.faces().iter().enumerate() {
            let [a, b, c] = t.map(|v| z[v]);
            if a.chordal(&b) < 1e-14 || b.chordal(&c) < 1e-14 || a.chordal(&c) < 1e-14 {
                return Err(PatternError::DegenerateFace(f));
            }
        }
        Ok(Self { disk, z })
    }

    pub fn from_affine(disk: Arc<TriangulatedDisk>, z: &[C64]) -> Result<Self, PatternError> {
        Self::new(disk, z.iter().map(|&w| SpherePoint::finite(w)).collect())
    }

    /// Affine coordinates; panics at infinity.
    pub fn affine(&self) -> Vec<C64> {
        self.z.iter().map(|p| p.affine().expect("finite vertex")).collect()
    }

    /// Faces whose finite vertices are clockwise in the affine chart.
    pub fn orientation_flips(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (f, t) in self.disk.faces().iter().enumerate() {
            let w: Option<Vec<C64>> = t.iter().map(|&v| self.z[v].affine()).collect();
            if let Some(w) = w {
                if ((w[1] - w[0]).conj() * (w[2] - w[0])).im <= 0.0 {
                    out.push(f);
                }
            }
        }
        out
    }
}

/// Cross ratios per interior edge, indexed like `disk.edges()`.
#[derive(Clone, Debug)]
pub struct CrossRatioSystem {
    pub disk: Arc<TriangulatedDisk>,
    pub x: Vec<C64>,
}

impl CrossRatioSystem {
    pub fn arg(&self, e: usize) -> f64 {
        self.x[e].arg()
    }

    pub fn non_delaunay(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&e| !is_delaunay(self.x[e])).collect()
    }

    pub fn is_delaunay(&self) -> bool {
        self.x.iter().all(|&x| is_delaunay(x))
    }
}

pub fn cross_ratios_of(pattern: &CirclePattern) -> Result<CrossRatioSystem, PatternError> {
    let z = &pattern.z;
    let x = pattern
        .disk
        .edges()
        .iter()
        .map(|e| {
            edge_cross_ratio(&z[e.k], &z[e.i], &z[e.l], &z[e.j])
                .map_err(|_| PatternError::DegenerateFace(e.left))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CrossRatioSystem { disk: pattern.disk.clone(), x })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClosureReport {
    pub product: f64,
    pub sum: f64,
    pub branching: f64,
    pub non_delaunay: Vec<usize>,
}

impl ClosureReport {
    pub fn max_residual(&self) -> f64 {
        self.product.max(self.sum).max(self.branching)
    }
}

/// Vertex product, telescoping sum and branching residuals at interior vertices.
pub fn verify_closure(xs: &CrossRatioSystem) -> ClosureReport {
    let disk = &xs.disk;
    let mut rep = ClosureReport { non_delaunay: xs.non_delaunay(), ..Default::default() };
    for v in disk.interior_vertices() {
        let star = disk.interior_star(v).unwrap();
        let mut prod = C64::new(1.0, 0.0);
        let mut sum = C64::new(0.0, 0.0);
        let mut args = 0.0;
        for &w in star {
            let x = xs.x[disk.edge_between(v, w).unwrap()];
            prod *= x;
            sum += prod;
            args += x.arg();
        }
        rep.product = rep.product.max((prod - 1.0).norm());
        rep.sum = rep.sum.max(sum.norm());
        rep.branching = rep.branching.max((args - 2.0 * PI).abs());
    }
    rep
}

/// Places `z_l` from the left face `(i, j, k)` of the oriented edge `i→j`.
pub fn propagate(x: C64, zi: &SpherePoint, zj: &SpherePoint, zk: &SpherePoint) -> Option<SpherePoint> {
    let a = x * det(zj, zk);
    let b = det(zi, zk);
    SpherePoint::new(a * zi.p() + b * zj.p(), a * zi.q() + b * zj.q())
}

/// Integrates a cross-ratio system from `seed` placed on the vertices of
/// `seed_face` (in face order).
pub fn develop(
    disk: &Arc<TriangulatedDisk>,
    xs: &[C64],
    seed_face: usize,
    seed: [SpherePoint; 3],
) -> Result<CirclePattern, PatternError> {
    const TREE_TOL: f64 = 1e-6;
    if seed[0].chordal(&seed[1]) < 1e-14
        || seed[1].chordal(&seed[2]) < 1e-14
        || seed[0].chordal(&seed[2]) < 1e-14
    {
        return Err(PatternError::DegenerateSeed);
    }
    let faces = disk.faces();
    let mut z: Vec<Option<SpherePoint>> = vec![None; disk.n_vertices()];
    for s in 0..3 {
        z[faces[seed_face][s]] = Some(seed[s]);
    }
    let mut done = vec![false; faces.len()];
    done[seed_face] = true;
    let mut queue = VecDeque::from([seed_face]);
    let mut worst: f64 = 0.0;
    while let Some(f) = queue.pop_front() {
        for &(g, e) in disk.dual_neighbors(f) {
            if done[g] {
                continue;
            }
            let ed = disk.edges()[e];
            // orient so that f is the left face
            let (i, j, k, l) = if ed.left == f { (ed.i, ed.j, ed.k, ed.l) } else { (ed.j, ed.i, ed.l, ed.k) };
            let (zi, zj, zk) = (z[i].unwrap(), z[j].unwrap(), z[k].unwrap());
            let zl = propagate(xs[e], &zi, &zj, &zk).ok_or(PatternError::ClosureViolation(f64::INFINITY))?;
            match z[l] {
                Some(old) => worst = worst.max(old.chordal(&zl)),
                None => z[l] = Some(zl),
            }
            done[g] = true;
            queue.push_back(g);
        }
    }
    // non-tree edges
    for (e, ed) in disk.edges().iter().enumerate() {
        let zl = propagate(xs[e], &z[ed.i].unwrap(), &z[ed.j].unwrap(), &z[ed.k].unwrap())
            .ok_or(PatternError::ClosureViolation(f64::INFINITY))?;
        worst = worst.max(zl.chordal(&z[ed.l].unwrap()));
    }
    if worst > TREE_TOL {
        return Err(PatternError::ClosureViolation(worst));
    }
    CirclePattern::new(disk.clone(), z.into_iter().map(|p| p.unwrap()).collect())
}

/// `max |Re log X - Re log X̃|`.
pub fn shear_match(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a.norm().ln() - b.norm().ln()).abs()).fold(0.0, f64::max)
}

/// `max |Arg X - Arg X̃|`.
pub fn angle_match(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a.arg() - b.arg()).abs()).fold(0.0, f64::max)
}
