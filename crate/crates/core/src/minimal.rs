//! Osculating Möbius vector fields of infinitesimal pattern deformations and
//! the minimal surfaces in R³ they define.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::mesh::TriangulatedDisk;
use crate::osculating::smooth::Jet;
use crate::pattern::CirclePattern;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinimalError {
    #[error("face {0} has coincident vertices")]
    DegenerateFace(usize),
    #[error("face {0} has a vertex at infinity")]
    InfinityInFace(usize),
    #[error("velocity has {got} entries, mesh has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
}

/// Traceless `[[α, β], [γ, -α]]`, acting as the field `(-γz² + 2αz + β) ∂z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorMatrix {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
}

impl VectorMatrix {
    pub fn field(&self, z: C64) -> C64 {
        -self.gamma * z * z + 2.0 * self.alpha * z + self.beta
    }

    pub fn sub(&self, o: &VectorMatrix) -> VectorMatrix {
        VectorMatrix { alpha: self.alpha - o.alpha, beta: self.beta - o.beta, gamma: self.gamma - o.gamma }
    }

    pub fn norm(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr() + self.gamma.norm_sqr()).sqrt()
    }

    /// The null isomorphism onto C³: `((β+γ)/2, i(β-γ)/2, α)`.
    pub fn to_c3(&self) -> [C64; 3] {
        let i = C64::new(0.0, 1.0);
        [(self.beta + self.gamma) / 2.0, i * (self.beta - self.gamma) / 2.0, self.alpha]
    }

    /// `−det` of the matrix, which `to_c3` carries to the complex quadratic
    /// form `x² + y² + z²`.
    pub fn killing(&self) -> C64 {
        self.alpha * self.alpha + self.beta * self.gamma
    }
}

#[derive(Clone, Debug)]
pub struct MoebiusVectorFrame {
    pub disk: Arc<TriangulatedDisk>,
    pub a: Vec<VectorMatrix>,
}

/// Per face, the quadratic field through the three vertex velocities.
pub fn osculating_vector_field(z: &CirclePattern, zdot: &[C64]) -> Result<MoebiusVectorFrame, MinimalError> {
    let disk = &z.disk;
    if zdot.len() != disk.n_vertices() {
        return Err(MinimalError::SizeMismatch { expected: disk.n_vertices(), got: zdot.len() });
    }
    let a = disk
        .faces()
        .iter()
        .enumerate()
        .map(|(f, t)| {
            let w: Vec<C64> =
                t.iter().map(|&v| z.z[v].affine().ok_or(MinimalError::InfinityInFace(f))).collect::<Result<_, _>>()?;
            let [x0, x1, x2] = [w[0], w[1], w[2]];
            let [y0, y1, y2] = t.map(|v| zdot[v]);
            let (d01, d12, d02) = (x1 - x0, x2 - x1, x2 - x0);
            if d01.norm() == 0.0 || d12.norm() == 0.0 || d02.norm() == 0.0 {
                return Err(MinimalError::DegenerateFace(f));
            }
            // Newton divided differences
            let f01 = (y1 - y0) / d01;
            let f12 = (y2 - y1) / d12;
            let c2 = (f12 - f01) / d02;
            let c1 = f01 - c2 * (x0 + x1);
            let c0 = y0 - x0 * (c1 + c2 * x0);
            Ok(VectorMatrix { alpha: c1 / 2.0, beta: c0, gamma: -c2 })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MoebiusVectorFrame { disk: disk.clone(), a })
}

/// Real part of the null image of each face matrix.
pub fn minimal_surface(frame: &MoebiusVectorFrame) -> Vec<[f64; 3]> {
    frame.a.iter().map(|a| a.to_c3().map(|c| c.re)).collect()
}

/// Largest value of `a_left - a_right` at the two ends of any interior edge.
pub fn edge_compatibility(z: &CirclePattern, frame: &MoebiusVectorFrame) -> f64 {
    let mut worst: f64 = 0.0;
    for ed in frame.disk.edges() {
        let d = frame.a[ed.left].sub(&frame.a[ed.right]);
        for v in [ed.i, ed.j] {
            if let Some(w) = z.z[v].affine() {
                let scale = 1.0 + w.norm_sqr();
                worst = worst.max(d.field(w).norm() / scale);
            }
        }
    }
    worst
}

/// The smooth field matrix of `h` at `z`:
/// `[[½(h′ − z h″), ½(z²h″ − 2zh′ + 2h)], [−½h″, ½(zh″ − h′)]]`.
pub fn smooth_vector_osculating(jet: Jet, z: C64) -> VectorMatrix {
    let [h, h1, h2, _] = jet;
    VectorMatrix {
        alpha: (h1 - z * h2) / 2.0,
        beta: (z * z * h2 - 2.0 * z * h1 + 2.0 * h) / 2.0,
        gamma: -h2 / 2.0,
    }
}

/// `da/dz = −(h‴/2)[[z, −z²], [1, −z]]`.
pub fn smooth_vector_derivative(jet: Jet, z: C64) -> VectorMatrix {
    let k = -jet[3] / 2.0;
    VectorMatrix { alpha: k * z, beta: -k * z * z, gamma: k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{lattice_subcomplex, LatticeSpec, Region};
    use crate::osculating::smooth::SmoothMap;

    fn lattice() -> CirclePattern {
        let p = lattice_subcomplex(&LatticeSpec::equilateral(0.3, Region::unit_square())).unwrap();
        CirclePattern::from_affine(p.disk, &p.positions).unwrap()
    }

    #[test]
    fn mobius_field_gives_constant_frame() {
        let z = lattice();
        let zdot: Vec<C64> = z.affine().iter().map(|w| w * w).collect();
        let fr = osculating_vector_field(&z, &zdot).unwrap();
        for a in &fr.a {
            assert!(a.alpha.norm() < 1e-12 && a.beta.norm() < 1e-12 && (a.gamma + 1.0).norm() < 1e-12);
        }
        let pts = minimal_surface(&fr);
        assert!(pts.iter().all(|p| (0..3).all(|k| (p[k] - pts[0][k]).abs() < 1e-12)));
    }

    #[test]
    fn cube_at_one() {
        let a = smooth_vector_osculating(SmoothMap::Power(3).jet(C64::new(1.0, 0.0)), C64::new(1.0, 0.0));
        assert!((a.alpha + 1.5).norm() < 1e-15 && (a.beta - 1.0).norm() < 1e-15 && (a.gamma + 3.0).norm() < 1e-15);
    }

    #[test]
    fn image_of_derivative_is_null() {
        let d = smooth_vector_derivative(SmoothMap::Exp.jet(C64::new(0.3, 0.2)), C64::new(0.3, 0.2));
        let v = d.to_c3();
        assert!((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).norm() < 1e-14);
        assert!(d.killing().norm() < 1e-14);
    }

    #[test]
    fn fields_interpolate_and_glue() {
        let z = lattice();
        let zdot: Vec<C64> = z.affine().iter().map(|w| (w * 1.3).sin() + w * w * w).collect();
        let fr = osculating_vector_field(&z, &zdot).unwrap();
        for (a, t) in fr.a.iter().zip(z.disk.faces()) {
            for &v in t {
                assert!((a.field(z.z[v].affine().unwrap()) - zdot[v]).norm() < 1e-12);
            }
        }
        assert!(edge_compatibility(&z, &fr) < 1e-12);
    }
}
