//! Osculating Möbius transformations between two patterns and their coherent
//! SL(2,C) lift.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::mesh::TriangulatedDisk;
use crate::moebius::{mobius_from_triples, HermitianMatrix, MoebiusMap, SpherePoint};
use crate::pattern::{cross_ratios_of, CirclePattern, PatternError};

pub mod smooth;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OsculatingError {
    #[error("face {0} is degenerate")]
    DegenerateFace(usize),
    #[error("edge {0}-{1} is not interior")]
    BoundaryEdge(usize, usize),
    #[error("{which} pattern is not Delaunay at {count} edges")]
    NotDelaunay { which: &'static str, count: usize },
    #[error("transition monodromy is -I at vertex {0}")]
    MonodromyObstruction(usize),
    #[error("patterns live on different meshes")]
    MeshMismatch,
    #[error("transition 1-form does not close: residual {0:.3e}")]
    EtaNotClosed(f64),
    #[error("h' vanishes at {0}")]
    CriticalPoint(C64),
}

impl From<PatternError> for OsculatingError {
    fn from(e: PatternError) -> Self {
        match e {
            PatternError::DegenerateFace(f) => OsculatingError::DegenerateFace(f),
            _ => OsculatingError::MeshMismatch,
        }
    }
}

/// One SL(2,C) matrix per face.
#[derive(Clone, Debug)]
pub struct MoebiusFrame {
    pub disk: Arc<TriangulatedDisk>,
    pub maps: Vec<MoebiusMap>,
}

impl MoebiusFrame {
    pub fn inverse(&self) -> MoebiusFrame {
        MoebiusFrame { disk: self.disk.clone(), maps: self.maps.iter().map(|a| a.inverse()).collect() }
    }

    /// `f = A A*` per face.
    pub fn points(&self) -> Vec<HermitianMatrix> {
        self.maps.iter().map(|a| a.hermitian_square()).collect()
    }
}

fn same_mesh(a: &CirclePattern, b: &CirclePattern) -> bool {
    Arc::ptr_eq(&a.disk, &b.disk) || a.disk.faces() == b.disk.faces()
}

/// Per face, the Möbius map taking the face's vertices in `z` to those in `zt`.
pub fn osculating_frame(z: &CirclePattern, zt: &CirclePattern) -> Result<MoebiusFrame, OsculatingError> {
    if !same_mesh(z, zt) {
        return Err(OsculatingError::MeshMismatch);
    }
    let maps = z
        .disk
        .faces()
        .iter()
        .enumerate()
        .map(|(f, t)| {
            mobius_from_triples(t.map(|v| z.z[v]), t.map(|v| zt.z[v]))
                .map_err(|_| OsculatingError::DegenerateFace(f))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MoebiusFrame { disk: z.disk.clone(), maps })
}

/// `P diag(λ, 1/λ) P⁻¹` with `P = [zᵢ zⱼ]`: fixes both points, eigenvalue `λ`
/// at `zᵢ`. For finite points this is the closed form
/// `(1/(zⱼ−zᵢ)) [[zⱼ/λ − λzᵢ, −zᵢzⱼ(1/λ − λ)], [1/λ − λ, λzⱼ − zᵢ/λ]]`.
pub fn fixed_point_map(zi: &SpherePoint, zj: &SpherePoint, lambda: C64) -> MoebiusMap {
    let (pi, qi) = (zi.p(), zi.q());
    let (pj, qj) = (zj.p(), zj.q());
    let d = pi * qj - pj * qi;
    let (l, li) = (lambda, lambda.inv());
    // P diag P⁻¹ with P⁻¹ = adj(P)/d
    MoebiusMap {
        a: (l * pi * qj - li * pj * qi) / d,
        b: (-l * pi * pj + li * pj * pi) / d,
        c: (l * qi * qj - li * qj * qi) / d,
        d: (-l * qi * pj + li * qj * pi) / d,
    }
}

/// Transition `A_right⁻¹ A_left` across the oriented edge `i→j`, together
/// with its eigenvalue at `zᵢ`.
pub fn transition(
    frame: &MoebiusFrame,
    z: &CirclePattern,
    i: usize,
    j: usize,
) -> Result<(MoebiusMap, C64), OsculatingError> {
    let o = frame.disk.oriented(i, j).ok_or(OsculatingError::BoundaryEdge(i, j))?;
    let t = frame.maps[o.right].inverse() * frame.maps[o.left];
    let lambda = t.eigenvalue_at(&z.z[i]);
    Ok((t, lambda))
}

/// `λ` with `λ² = X/X̃` and `Arg λ = (Arg X − Arg X̃)/2`.
pub fn lift_eigenvalue(x: C64, xt: C64) -> C64 {
    C64::from_polar((x.norm() / xt.norm()).sqrt(), (x.arg() - xt.arg()) / 2.0)
}

/// Worst `‖Π T − I‖` over interior vertices, with `T` the fixed-point maps built
/// from the lifted eigenvalues; also the first vertex where the product is `−I`.
pub fn vertex_monodromy(z: &CirclePattern, lambdas: &[C64]) -> (f64, Option<usize>) {
    let disk = &z.disk;
    let mut worst: f64 = 0.0;
    let mut bad = None;
    for v in disk.interior_vertices() {
        let mut prod = MoebiusMap::IDENTITY;
        for &w in disk.interior_star(v).unwrap() {
            let e = disk.edge_between(v, w).unwrap();
            prod = fixed_point_map(&z.z[v], &z.z[w], lambdas[e]) * prod;
        }
        let plus = prod.dist(&MoebiusMap::IDENTITY);
        let minus = prod.dist(&-MoebiusMap::IDENTITY);
        if minus < plus && bad.is_none() {
            bad = Some(v);
        }
        worst = worst.max(plus);
    }
    (worst, bad)
}

fn root_sign(a: MoebiusMap) -> MoebiusMap {
    let scale = a.max_abs();
    if a.d.norm() > 1e-14 * scale {
        let arg = a.d.arg();
        if arg > -FRAC_PI_2 && arg <= FRAC_PI_2 {
            a
        } else {
            -a
        }
    } else {
        a.canonical()
    }
}

/// Signs the frame so every transition eigenvalue has `Re λ > 0`.
pub fn coherent_lift(
    frame: &MoebiusFrame,
    z: &CirclePattern,
    zt: &CirclePattern,
) -> Result<MoebiusFrame, OsculatingError> {
    let x = cross_ratios_of(z)?;
    let xt = cross_ratios_of(zt)?;
    for (which, xs) in [("source", &x), ("target", &xt)] {
        let bad = xs.non_delaunay();
        if !bad.is_empty() {
            return Err(OsculatingError::NotDelaunay { which, count: bad.len() });
        }
    }
    let lambdas: Vec<C64> = x.x.iter().zip(&xt.x).map(|(&a, &b)| lift_eigenvalue(a, b)).collect();
    if let (_, Some(v)) = vertex_monodromy(z, &lambdas) {
        return Err(OsculatingError::MonodromyObstruction(v));
    }
    let disk = &frame.disk;
    let mut maps = frame.maps.clone();
    maps[0] = root_sign(maps[0]);
    for (f, g, e) in disk.dual_tree(0) {
        let ed = disk.edges()[e];
        let t = if ed.left == f {
            maps[g].inverse() * maps[f]
        } else {
            maps[f].inverse() * maps[g]
        };
        if (t.eigenvalue_at(&z.z[ed.i]) * lambdas[e].conj()).re < 0.0 {
            maps[g] = -maps[g];
        }
    }
    for (e, ed) in disk.edges().iter().enumerate() {
        let t = maps[ed.right].inverse() * maps[ed.left];
        if (t.eigenvalue_at(&z.z[ed.i]) * lambdas[e].conj()).re < 0.0 {
            return Err(OsculatingError::MonodromyObstruction(ed.i));
        }
    }
    Ok(MoebiusFrame { disk: disk.clone(), maps })
}

/// Composition `z → z̃ → z†` facewise.
pub fn compose_frames(first: &MoebiusFrame, second: &MoebiusFrame) -> Result<MoebiusFrame, OsculatingError> {
    if first.disk.faces() != second.disk.faces() {
        return Err(OsculatingError::MeshMismatch);
    }
    let maps = first.maps.iter().zip(&second.maps).map(|(a, b)| *b * *a).collect();
    Ok(MoebiusFrame { disk: first.disk.clone(), maps })
}

/// Integrates edge transitions `η` (with `A_right = η A_left` for the
/// canonical orientation of each interior edge) into a frame with
/// `A A* = f`, and recovers the source pattern `z = A⁻¹ z̃`.
pub(crate) fn integrate_transitions(
    disk: &Arc<TriangulatedDisk>,
    gauss: &[SpherePoint],
    f: &[HermitianMatrix],
    eta: &[MoebiusMap],
) -> Result<(MoebiusFrame, Vec<SpherePoint>), OsculatingError> {
    const TOL: f64 = 1e-8;
    let mut worst: f64 = 0.0;
    for v in disk.interior_vertices() {
        let mut prod = MoebiusMap::IDENTITY;
        for &w in disk.interior_star(v).unwrap() {
            let o = disk.oriented(v, w).unwrap();
            let step = if o.from == disk.edges()[o.edge].i { eta[o.edge] } else { eta[o.edge].inverse() };
            prod = step * prod;
        }
        worst = worst.max(prod.dist(&MoebiusMap::IDENTITY));
    }
    if worst > TOL {
        return Err(OsculatingError::EtaNotClosed(worst));
    }
    let n = disk.faces().len();
    // root at the point nearest the ball center to keep products small
    let root = (0..n).min_by(|&a, &b| f[a].trace().total_cmp(&f[b].trace())).unwrap_or(0);
    let mut hat = vec![MoebiusMap::IDENTITY; n];
    for (a, b, e) in disk.dual_tree(root) {
        let ed = disk.edges()[e];
        hat[b] = if ed.left == a { eta[e] * hat[a] } else { eta[e].inverse() * hat[a] };
    }
    let c = f[root].sqrt_positive();
    let maps: Vec<MoebiusMap> = hat.iter().map(|h| *h * c).collect();
    let mut fit: f64 = 0.0;
    for (a, fa) in maps.iter().zip(f) {
        let scale = fa.trace().max(1.0);
        fit = fit.max(a.hermitian_square().max_abs_diff(fa) / scale);
    }
    if fit > TOL {
        return Err(OsculatingError::EtaNotClosed(fit));
    }
    let mut z: Vec<Option<SpherePoint>> = vec![None; disk.n_vertices()];
    for (face, t) in disk.faces().iter().enumerate() {
        let inv = maps[face].inverse();
        for &v in t {
            let p = inv.apply(&gauss[v]);
            match z[v] {
                None => z[v] = Some(p),
                Some(q) => fit = fit.max(q.chordal(&p)),
            }
        }
    }
    if fit > TOL {
        return Err(OsculatingError::EtaNotClosed(fit));
    }
    Ok((MoebiusFrame { disk: disk.clone(), maps }, z.into_iter().map(Option::unwrap).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{lattice_subcomplex, LatticeSpec, Region};
    use crate::pattern::CirclePattern;

    fn pair() -> (CirclePattern, CirclePattern) {
        let p = lattice_subcomplex(&LatticeSpec::equilateral(0.25, Region::unit_square())).unwrap();
        let z = CirclePattern::from_affine(p.disk.clone(), &p.positions).unwrap();
        let w: Vec<C64> = p.positions.iter().map(|v| (v * 0.8).exp()).collect();
        let zt = CirclePattern::from_affine(p.disk, &w).unwrap();
        (z, zt)
    }

    #[test]
    fn closed_form_matches_written_formula() {
        let (zi, zj, l) = (C64::new(0.3, -0.2), C64::new(-1.1, 0.7), C64::new(0.8, 0.5));
        let m = fixed_point_map(&SpherePoint::finite(zi), &SpherePoint::finite(zj), l);
        let k = (zj - zi).inv();
        let li = l.inv();
        let w = MoebiusMap::new(
            k * (zj * li - l * zi),
            -k * zi * zj * (li - l),
            k * (li - l),
            k * (l * zj - zi * li),
        );
        assert!(m.dist(&w) < 1e-13);
    }

    #[test]
    fn transitions_match_cross_ratios() {
        let (z, zt) = pair();
        let frame = coherent_lift(&osculating_frame(&z, &zt).unwrap(), &z, &zt).unwrap();
        let x = cross_ratios_of(&z).unwrap();
        let xt = cross_ratios_of(&zt).unwrap();
        for (e, ed) in z.disk.edges().iter().enumerate() {
            let (t, l) = transition(&frame, &z, ed.i, ed.j).unwrap();
            assert!((l * l - x.x[e] / xt.x[e]).norm() < 1e-10);
            assert!((l - lift_eigenvalue(x.x[e], xt.x[e])).norm() < 1e-10);
            let closed = fixed_point_map(&z.z[ed.i], &z.z[ed.j], l);
            assert!(t.dist(&closed) < 1e-10);
        }
        let lambdas: Vec<C64> = x.x.iter().zip(&xt.x).map(|(&a, &b)| lift_eigenvalue(a, b)).collect();
        assert!(vertex_monodromy(&z, &lambdas).0 < 1e-10);
    }

    #[test]
    fn frames_map_faces() {
        let (z, zt) = pair();
        let frame = osculating_frame(&z, &zt).unwrap();
        for (f, t) in z.disk.faces().iter().enumerate() {
            for &v in t {
                assert!(frame.maps[f].apply(&z.z[v]).chordal(&zt.z[v]) < 1e-12);
            }
            assert!((frame.maps[f].det() - 1.0).norm() < 1e-12);
        }
    }
}
