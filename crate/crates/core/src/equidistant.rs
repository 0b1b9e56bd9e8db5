//! Equidistant nets from angle-matched pattern pairs.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::mesh::TriangulatedDisk;
use crate::moebius::{horosphere, minkowski_dot, minkowski_normal, HermitianMatrix, MoebiusError, MoebiusMap, SpherePoint};
use crate::osculating::{
    coherent_lift, fixed_point_map, integrate_transitions, osculating_frame, transition, MoebiusFrame,
    OsculatingError,
};
use crate::pattern::{angle_match, cross_ratios_of, CirclePattern, PatternError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquidistantError {
    #[error("patterns are not angle matched (discrepancy {0:.3e})")]
    NotAngleMatched(f64),
    #[error("{which} pattern is not Delaunay at {count} edges")]
    NotDelaunay { which: &'static str, count: usize },
    #[error("lift failed: {0}")]
    LiftFailed(OsculatingError),
    #[error("net is not equidistant (residual {0:.3e})")]
    NotEquidistant(f64),
    #[error("transition form does not close: residual {0:.3e}")]
    EtaNotClosed(f64),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Unit spacelike functional `P` and level `c` with `⟨x, P⟩ = c` on an
/// equidistant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equidistant {
    pub p: [f64; 4],
    pub c: f64,
}

impl Equidistant {
    pub fn residual(&self, x: &HermitianMatrix) -> f64 {
        minkowski_dot(&x.minkowski(), &self.p) - self.c
    }

    /// Hyperbolic distance from `x` to the surface, measured along the
    /// normal geodesics of the base plane.
    pub fn distance(&self, x: &HermitianMatrix) -> f64 {
        (minkowski_dot(&x.minkowski(), &self.p).asinh() - self.c.asinh()).abs()
    }
}

#[derive(Clone, Debug)]
pub struct EquidistantNet {
    pub disk: Arc<TriangulatedDisk>,
    pub f: Vec<HermitianMatrix>,
    pub gauss: Vec<SpherePoint>,
    /// Per face: the equidistant through `f` over the circumcircle of the
    /// face's Gauss points.
    pub equidistants: Vec<Equidistant>,
    /// Transition eigenvalue per interior edge, when built from a frame.
    pub lambdas: Option<Vec<C64>>,
    pub frame: Option<MoebiusFrame>,
    pub source: Option<Vec<SpherePoint>>,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EquidistantReport {
    /// `max |Im λ| / |λ|`, or zero without a frame.
    pub eigenvalue_reality: f64,
    /// Largest hyperbolic distance from a face's neighbours to its
    /// equidistant.
    pub cosphericity: f64,
    /// Largest deviation of `f_right` from the arc through `f_left` with ends
    /// at the edge's two Gauss points.
    pub arc: f64,
}

impl EquidistantReport {
    pub fn max(&self) -> f64 {
        self.eigenvalue_reality.max(self.cosphericity).max(self.arc)
    }
}

fn fit_equidistants(disk: &TriangulatedDisk, f: &[HermitianMatrix], gauss: &[SpherePoint]) -> Result<Vec<Equidistant>, MoebiusError> {
    let ideal: Vec<[f64; 4]> =
        gauss.iter().map(|z| horosphere(*z, 1.0).map(|h| h.n.minkowski())).collect::<Result<_, _>>()?;
    Ok(disk
        .faces()
        .iter()
        .enumerate()
        .map(|(face, t)| {
            let p = minkowski_normal(&ideal[t[0]], &ideal[t[1]], &ideal[t[2]]);
            let norm = minkowski_dot(&p, &p).sqrt();
            let p = p.map(|x| x / norm);
            Equidistant { p, c: minkowski_dot(&f[face].minkowski(), &p) }
        })
        .collect())
}

/// `C` with `z̃_i ↦ 0` and `z̃_j ↦ ∞`, unit determinant.
pub(crate) fn axis_chart(zi: &SpherePoint, zj: &SpherePoint) -> MoebiusMap {
    let m = MoebiusMap::new(zi.q(), -zi.p(), zj.q(), -zj.p());
    m.scale(m.det().sqrt().inv())
}

/// Upper half-space `(w, t)` of `x` in the axis chart of `i→j`.
pub(crate) fn axis_coords(c: &MoebiusMap, x: &HermitianMatrix) -> (C64, f64) {
    let y = c.act(x);
    (y.b / y.d, 1.0 / y.d)
}

impl EquidistantNet {
    pub fn from_points(
        disk: Arc<TriangulatedDisk>,
        f: Vec<HermitianMatrix>,
        gauss: Vec<SpherePoint>,
    ) -> Result<Self, EquidistantError> {
        let equidistants = fit_equidistants(&disk, &f, &gauss)?;
        let degenerate = f.iter().all(|x| x.max_abs_diff(&f[0]) <= 1e-12 * f[0].trace());
        Ok(Self { disk, f, gauss, equidistants, lambdas: None, frame: None, source: None, degenerate })
    }

    /// Real scaling factor `λ` per edge with `f_right = η f_left η*`, read off
    /// the axis chart.
    pub fn scaling_factors(&self) -> Vec<f64> {
        self.disk
            .edges()
            .iter()
            .map(|ed| {
                let c = axis_chart(&self.gauss[ed.i], &self.gauss[ed.j]);
                let (_, tl) = axis_coords(&c, &self.f[ed.left]);
                let (_, tr) = axis_coords(&c, &self.f[ed.right]);
                (tr / tl).sqrt()
            })
            .collect()
    }
}

/// `f = A A*` from an angle-matched Delaunay pair.
pub fn build_equidistant(z: &CirclePattern, zt: &CirclePattern) -> Result<EquidistantNet, EquidistantError> {
    let x = cross_ratios_of(z)?;
    let xt = cross_ratios_of(zt)?;
    for (which, xs) in [("source", &x), ("target", &xt)] {
        let bad = xs.non_delaunay();
        if !bad.is_empty() {
            return Err(EquidistantError::NotDelaunay { which, count: bad.len() });
        }
    }
    let mismatch = angle_match(&x.x, &xt.x);
    if mismatch > 1e-9 {
        return Err(EquidistantError::NotAngleMatched(mismatch));
    }
    let frame = osculating_frame(z, zt).map_err(EquidistantError::LiftFailed)?;
    let frame = coherent_lift(&frame, z, zt).map_err(EquidistantError::LiftFailed)?;
    let lambdas = z
        .disk
        .edges()
        .iter()
        .map(|ed| transition(&frame, z, ed.i, ed.j).map(|(_, l)| l))
        .collect::<Result<Vec<_>, _>>()
        .map_err(EquidistantError::LiftFailed)?;
    let mut net = EquidistantNet::from_points(z.disk.clone(), frame.points(), zt.z.clone())?;
    net.lambdas = Some(lambdas);
    net.frame = Some(frame);
    net.source = Some(z.z.clone());
    Ok(net)
}

pub fn verify_equidistant(net: &EquidistantNet) -> EquidistantReport {
    let disk = &net.disk;
    let mut rep = EquidistantReport::default();
    if let Some(ls) = &net.lambdas {
        rep.eigenvalue_reality =
            ls.iter().map(|l| if l.re > 0.0 { l.im.abs() / l.norm() } else { f64::INFINITY }).fold(0.0, f64::max);
    }
    for (face, eq) in net.equidistants.iter().enumerate() {
        for &(g, _) in disk.dual_neighbors(face) {
            rep.cosphericity = rep.cosphericity.max(eq.distance(&net.f[g]));
        }
    }
    for ed in disk.edges() {
        let c = axis_chart(&net.gauss[ed.i], &net.gauss[ed.j]);
        let (wl, tl) = axis_coords(&c, &net.f[ed.left]);
        let (wr, tr) = axis_coords(&c, &net.f[ed.right]);
        // both points on one ray from the origin of the chart
        let ul = C64::new(wl.norm(), tl) / (wl.norm_sqr() + tl * tl).sqrt();
        let ur = C64::new(wr.norm(), tr) / (wr.norm_sqr() + tr * tr).sqrt();
        let mut dev = (ul - ur).norm();
        if wl.norm() > 1e-12 * tl && wr.norm() > 1e-12 * tr {
            dev = dev.max((wr / wl).arg().abs());
        }
        rep.arc = rep.arc.max(dev);
    }
    rep
}

/// Source pattern, Gauss pattern and frame of an equidistant net.
pub fn extract_equidistant_patterns(
    net: &EquidistantNet,
) -> Result<(CirclePattern, CirclePattern, MoebiusFrame), EquidistantError> {
    const TOL: f64 = 1e-8;
    let rep = verify_equidistant(net);
    let geometric = rep.cosphericity.max(rep.arc);
    if geometric > TOL {
        return Err(EquidistantError::NotEquidistant(geometric));
    }
    let eta: Vec<MoebiusMap> = net
        .disk
        .edges()
        .iter()
        .zip(net.scaling_factors())
        .map(|(ed, mu)| fixed_point_map(&net.gauss[ed.i], &net.gauss[ed.j], C64::new(1.0 / mu, 0.0)))
        .collect();
    let (frame, z) = integrate_transitions(&net.disk, &net.gauss, &net.f, &eta).map_err(|e| match e {
        OsculatingError::EtaNotClosed(r) => EquidistantError::EtaNotClosed(r),
        e => EquidistantError::LiftFailed(e),
    })?;
    let z = CirclePattern::new(net.disk.clone(), z)?;
    let zt = CirclePattern::new(net.disk.clone(), net.gauss.clone())?;
    Ok((z, zt, frame))
}
