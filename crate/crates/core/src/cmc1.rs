//! Horospherical nets `f = A A*` built from shear-matched pattern pairs, their
//! geometric measurement, parallel offsets, duals, and the inverse direction.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::mesh::TriangulatedDisk;
use crate::moebius::{
    horosphere, minkowski_dot, minkowski_normal, HermitianMatrix, Horosphere, MoebiusError, MoebiusMap,
    SpherePoint,
};
use crate::osculating::{
    coherent_lift, fixed_point_map, integrate_transitions, osculating_frame, MoebiusFrame, OsculatingError,
};
use crate::pattern::{cross_ratios_of, shear_match, CirclePattern, PatternError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Cmc1Error {
    #[error("patterns are not shear matched (discrepancy {0:.3e})")]
    NotShearMatched(f64),
    #[error("{which} pattern is not Delaunay at {count} edges")]
    NotDelaunay { which: &'static str, count: usize },
    #[error("lift failed: {0}")]
    LiftFailed(OsculatingError),
    #[error("horospheres at {vertex} and {neighbor} do not intersect (chart diameter {diameter})")]
    NonIntersectingHorospheres { vertex: usize, neighbor: usize, diameter: f64 },
    #[error("dual face at vertex {0} has zero area")]
    ZeroArea(usize),
    #[error("offset {0} exceeds the real-radius bound")]
    OffsetTooLarge(f64),
    #[error("net carries no frame")]
    FrameUnavailable,
    #[error("net is not CMC-1: {0}")]
    NotCmc1(String),
    #[error("transition form does not close: residual {0:.3e}")]
    EtaNotClosed(f64),
    #[error("horospheres disagree across faces by {0:.3e}")]
    HorosphereMismatch(f64),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

impl From<OsculatingError> for Cmc1Error {
    fn from(e: OsculatingError) -> Self {
        match e {
            OsculatingError::EtaNotClosed(r) => Cmc1Error::EtaNotClosed(r),
            OsculatingError::NotDelaunay { which, count } => Cmc1Error::NotDelaunay { which, count },
            e => Cmc1Error::LiftFailed(e),
        }
    }
}

/// Edge and face data read off the geometry of a net.
#[derive(Clone, Debug, Default)]
pub struct NetMeasurement {
    /// Per interior edge, indexed like `disk.edges()`.
    pub theta: Vec<f64>,
    pub ell: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Per vertex; `None` on the boundary.
    pub area: Vec<Option<f64>>,
    pub mean_curvature: Vec<Option<f64>>,
    /// Largest disagreement between the rotation angle read in the charts of
    /// the two endpoints.
    pub chart_mismatch: f64,
    /// Largest `|-⟨f, N⟩ - 1|` over vertex/face incidences.
    pub incidence: f64,
    /// Edges whose two arcs tie in length.
    pub tied_edges: Vec<usize>,
}

impl NetMeasurement {
    /// `H/area` per interior vertex with nonzero area.
    pub fn ratio(&self, v: usize) -> Option<f64> {
        match (self.area[v], self.mean_curvature[v]) {
            (Some(a), Some(h)) if a > 0.0 => Some(h / a),
            _ => None,
        }
    }

    pub fn max_ratio_error(&self) -> f64 {
        (0..self.area.len()).filter_map(|v| self.ratio(v)).map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `ℓ tan(α/2)` per edge.
    pub fn torsion(&self, e: usize) -> f64 {
        let (l, a) = (self.ell[e], self.alpha[e]);
        if l == 0.0 {
            0.0
        } else {
            l * (a / 2.0).tan()
        }
    }
}

/// A realization of the dual graph with every dual face on a horosphere.
#[derive(Clone, Debug)]
pub struct HorosphericalNet {
    pub disk: Arc<TriangulatedDisk>,
    /// Per face, a point of the hyperboloid.
    pub f: Vec<HermitianMatrix>,
    /// Hyperbolic Gauss map per vertex.
    pub gauss: Vec<SpherePoint>,
    /// Per vertex, fitted from `f` and `gauss`.
    pub horospheres: Vec<Horosphere>,
    pub frame: Option<MoebiusFrame>,
    /// The pattern the frame starts from.
    pub source: Option<Vec<SpherePoint>>,
    pub degenerate: bool,
    pub measurement: NetMeasurement,
}

fn is_degenerate(f: &[HermitianMatrix]) -> bool {
    f.iter().all(|x| x.max_abs_diff(&f[0]) <= 1e-12 * f[0].trace())
}

/// The chart sending `z` to `∞` and `n` (a horosphere at `z`) to the plane `t = 1`.
pub fn horosphere_chart(z: &SpherePoint, n: &HermitianMatrix) -> MoebiusMap {
    let (p, q) = z.unit();
    let u = MoebiusMap::new(p.conj(), q.conj(), -q, p);
    let r = u.act(n).a / 2.0;
    let s = r.sqrt();
    let scale = MoebiusMap::new(C64::new(1.0 / s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0));
    scale * u
}

pub(crate) fn chart_point(b: &MoebiusMap, x: &HermitianMatrix) -> (C64, f64) {
    let y = b.act(x);
    (y.b / y.d, 1.0 / y.d)
}

/// Euclidean diameter and touching point of a horosphere in a chart.
pub(crate) fn chart_ball(b: &MoebiusMap, n: &HermitianMatrix) -> (f64, C64) {
    let m = b.act(n);
    (2.0 / m.d, m.b / m.d)
}

impl HorosphericalNet {
    /// Assembles and measures a net from face points and a Gauss map.
    pub fn from_points(
        disk: Arc<TriangulatedDisk>,
        f: Vec<HermitianMatrix>,
        gauss: Vec<SpherePoint>,
    ) -> Result<Self, Cmc1Error> {
        let incident = disk.incident_faces();
        let horospheres = gauss
            .iter()
            .zip(&incident)
            .map(|(z, faces)| Horosphere::through(*z, &f[faces[0]]))
            .collect::<Result<Vec<_>, _>>()?;
        let degenerate = is_degenerate(&f);
        let mut net = HorosphericalNet {
            disk,
            f,
            gauss,
            horospheres,
            frame: None,
            source: None,
            degenerate,
            measurement: NetMeasurement::default(),
        };
        net.measurement = measure_net(&net)?;
        Ok(net)
    }

    /// Gauss-map cross ratios.
    pub fn gauss_pattern(&self) -> Result<CirclePattern, PatternError> {
        CirclePattern::new(self.disk.clone(), self.gauss.clone())
    }

    /// Edges violating `0 ≤ ℓ tan(α/2) + Arg X̃ < π`.
    pub fn edge_condition_violations(&self) -> Result<Vec<usize>, Cmc1Error> {
        let xt = cross_ratios_of(&self.gauss_pattern()?)?;
        let tol = 1e-9;
        Ok((0..xt.x.len())
            .filter(|&e| {
                let s = self.measurement.torsion(e) + xt.arg(e);
                !(s >= -tol && s < PI + tol)
            })
            .collect())
    }

    /// Largest `|Σ θ|` and `|Σ ℓ tan(α/2)|` over interior vertex stars.
    pub fn vertex_balance(&self) -> (f64, f64) {
        let m = &self.measurement;
        let mut worst = (0.0f64, 0.0f64);
        for v in self.disk.interior_vertices() {
            let (mut a, mut b) = (0.0, 0.0);
            for &w in self.disk.interior_star(v).unwrap() {
                let e = self.disk.edge_between(v, w).unwrap();
                a += m.theta[e];
                b += m.torsion(e);
            }
            worst = (worst.0.max(a.abs()), worst.1.max(b.abs()));
        }
        worst
    }
}

/// `f = A A*` for the coherent lift of the osculating frame from `z` to `zt`.
pub fn build_cmc1(z: &CirclePattern, zt: &CirclePattern) -> Result<HorosphericalNet, Cmc1Error> {
    let x = cross_ratios_of(z)?;
    let xt = cross_ratios_of(zt)?;
    for (which, xs) in [("source", &x), ("target", &xt)] {
        let bad = xs.non_delaunay();
        if !bad.is_empty() {
            return Err(Cmc1Error::NotDelaunay { which, count: bad.len() });
        }
    }
    let shear = shear_match(&x.x, &xt.x);
    if shear > 1e-9 {
        return Err(Cmc1Error::NotShearMatched(shear));
    }
    let frame = coherent_lift(&osculating_frame(z, zt)?, z, zt).map_err(Cmc1Error::LiftFailed)?;
    net_from_frame(frame, z.z.clone(), zt.z.clone())
}

pub(crate) fn net_from_frame(
    frame: MoebiusFrame,
    source: Vec<SpherePoint>,
    gauss: Vec<SpherePoint>,
) -> Result<HorosphericalNet, Cmc1Error> {
    let disk = frame.disk.clone();
    let f = frame.points();
    // transported horospheres must agree across the faces at a vertex
    let mut mismatch: f64 = 0.0;
    for (v, faces) in disk.incident_faces().iter().enumerate() {
        let base = horosphere(source[v], 1.0)?;
        let first = base.transformed(&frame.maps[faces[0]]);
        for &g in &faces[1..] {
            let other = base.transformed(&frame.maps[g]);
            mismatch = mismatch.max(other.n.max_abs_diff(&first.n) / first.n.trace().max(1.0));
        }
    }
    if mismatch > 1e-9 {
        return Err(Cmc1Error::HorosphereMismatch(mismatch));
    }
    let mut net = HorosphericalNet::from_points(disk, f, gauss)?;
    net.frame = Some(frame);
    net.source = Some(source);
    Ok(net)
}

/// Reads rotation angles, arc lengths, dihedral angles and face areas off the
/// net's points alone, in per-vertex horosphere charts.
pub fn measure_net(net: &HorosphericalNet) -> Result<NetMeasurement, Cmc1Error> {
    let disk = &net.disk;
    let n_edges = disk.edges().len();
    let mut m = NetMeasurement {
        theta: vec![0.0; n_edges],
        ell: vec![0.0; n_edges],
        alpha: vec![0.0; n_edges],
        area: vec![None; disk.n_vertices()],
        mean_curvature: vec![None; disk.n_vertices()],
        ..Default::default()
    };
    for (v, faces) in disk.incident_faces().iter().enumerate() {
        for &g in faces {
            m.incidence = m.incidence.max(net.horospheres[v].residual(&net.f[g]).abs());
        }
    }
    let charts: Vec<MoebiusMap> =
        net.gauss.iter().zip(&net.horospheres).map(|(z, h)| horosphere_chart(z, &h.n)).collect();
    // rotation about the touching point of `to`, carrying f_left to f_right
    let rotation = |from: usize, to: usize, left: usize, right: usize| -> Result<(f64, f64), Cmc1Error> {
        let b = &charts[from];
        let (d, c) = chart_ball(b, &net.horospheres[to].n);
        if !(d > 1.0) {
            return Err(Cmc1Error::NonIntersectingHorospheres { vertex: from, neighbor: to, diameter: d });
        }
        let (wl, _) = chart_point(b, &net.f[left]);
        let (wr, _) = chart_point(b, &net.f[right]);
        let q = (wr - c) / (wl - c);
        let theta = if q.norm() == 0.0 || !q.is_finite() { 0.0 } else { -q.arg() };
        Ok((theta, d))
    };
    for (e, ed) in disk.edges().iter().enumerate() {
        let (theta, d) = rotation(ed.i, ed.j, ed.left, ed.right)?;
        let (back, _) = rotation(ed.j, ed.i, ed.right, ed.left)?;
        m.chart_mismatch = m.chart_mismatch.max((theta - back).abs());
        if (theta.abs() - PI).abs() < 1e-12 {
            m.tied_edges.push(e);
        }
        let r = (d - 1.0).sqrt();
        m.theta[e] = theta;
        m.ell[e] = theta.abs() * r;
        m.alpha[e] = theta.signum() * (1.0 - 2.0 / d).acos();
        if theta == 0.0 {
            m.alpha[e] = 0.0;
        }
    }
    for v in disk.interior_vertices() {
        let star = disk.interior_star(v).unwrap();
        let faces = disk.star_faces(v).unwrap();
        let b = &charts[v];
        let w: Vec<C64> = faces.iter().map(|&g| chart_point(b, &net.f[g]).0).collect();
        let n = w.len();
        let mut area = 0.0;
        let mut torsion = 0.0;
        for k in 0..n {
            let prev = w[(k + n - 1) % n];
            area += 0.5 * (prev.conj() * w[k]).im;
            let (d, c) = chart_ball(b, &net.horospheres[star[k]].n);
            let q = (w[k] - c) / (prev - c);
            if q.is_finite() && q.norm() > 0.0 {
                let phi = q.arg();
                area += 0.5 * (d - 1.0) * (phi - phi.sin());
            }
            torsion += m.torsion(disk.edge_between(v, star[k]).unwrap());
        }
        let area = area.abs();
        m.area[v] = Some(area);
        m.mean_curvature[v] = Some(area + 0.5 * torsion);
    }
    Ok(m)
}

/// `(vertex, H, H/area)` per interior vertex.
pub fn integrated_mean_curvature(net: &HorosphericalNet) -> Result<Vec<(usize, f64, f64)>, Cmc1Error> {
    let m = &net.measurement;
    net.disk
        .interior_vertices()
        .map(|v| {
            let a = m.area[v].unwrap();
            if a <= 1e-300 {
                return Err(Cmc1Error::ZeroArea(v));
            }
            let h = m.mean_curvature[v].unwrap();
            Ok((v, h, h / a))
        })
        .collect()
}

/// Every horosphere pushed by `s` toward its point at infinity; face points
/// are re-intersected.
pub fn parallel_net(net: &HorosphericalNet, s: f64) -> Result<HorosphericalNet, Cmc1Error> {
    offset_horospheres(net, &vec![s; net.disk.n_vertices()])
}

/// Pushes the horosphere at vertex `v` by `s[v]` and re-intersects each face
/// point with its three horospheres, taking the intersection nearer the old
/// point.
pub fn offset_horospheres(net: &HorosphericalNet, s: &[f64]) -> Result<HorosphericalNet, Cmc1Error> {
    let worst = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut f = Vec::with_capacity(net.f.len());
    for (face, t) in net.disk.faces().iter().enumerate() {
        let n3 = t.map(|v| net.horospheres[v].n.minkowski());
        let x = net.f[face].minkowski();
        // y in the span of the N's with ⟨x + y, N_a⟩ = -e^{-s_a}
        let r = t.map(|v| 1.0 - (-s[v]).exp());
        let g: [[f64; 3]; 3] = std::array::from_fn(|a| std::array::from_fn(|b| minkowski_dot(&n3[a], &n3[b])));
        let beta = solve3(g, r).ok_or(Cmc1Error::OffsetTooLarge(worst))?;
        let y: [f64; 4] = std::array::from_fn(|i| x[i] + (0..3).map(|b| beta[b] * n3[b][i]).sum::<f64>());
        let n = minkowski_normal(&n3[0], &n3[1], &n3[2]);
        let (a2, b1, c0) = (minkowski_dot(&n, &n), minkowski_dot(&y, &n), minkowski_dot(&y, &y) + 1.0);
        let disc = b1 * b1 - a2 * c0;
        if disc < 0.0 || a2 == 0.0 {
            return Err(Cmc1Error::OffsetTooLarge(worst));
        }
        // root of smaller magnitude, written to avoid cancellation
        let tau = if c0 == 0.0 { 0.0 } else { -c0 / (b1 + if b1 >= 0.0 { 1.0 } else { -1.0 } * disc.sqrt()) };
        if !tau.is_finite() {
            return Err(Cmc1Error::OffsetTooLarge(worst));
        }
        f.push(HermitianMatrix::from_minkowski(std::array::from_fn(|i| y[i] + tau * n[i])));
    }
    HorosphericalNet::from_points(net.disk.clone(), f, net.gauss.clone())
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some(std::array::from_fn(|k| {
        let mut mk = m;
        for row in 0..3 {
            mk[row][k] = r[row];
        }
        det3(&mk) / d
    }))
}

/// Richardson-extrapolated `d/dt area(f_t)` at `t = 0` per interior vertex,
/// from three steps `t, t/2, t/4`.
pub fn area_derivative(net: &HorosphericalNet, t: f64) -> Result<Vec<(usize, f64)>, Cmc1Error> {
    let base = &net.measurement.area;
    let quotients = [t, t / 2.0, t / 4.0]
        .iter()
        .map(|&s| {
            let p = parallel_net(net, s)?;
            Ok(p.measurement.area.iter().zip(base).map(|(a, b)| a.zip(*b).map(|(a, b)| (a - b) / s)).collect())
        })
        .collect::<Result<Vec<Vec<Option<f64>>>, Cmc1Error>>()?;
    Ok(net
        .disk
        .interior_vertices()
        .map(|v| {
            let [d0, d1, d2] = [0, 1, 2].map(|k| quotients[k][v].unwrap());
            let (r0, r1) = (2.0 * d1 - d0, 2.0 * d2 - d1);
            (v, (4.0 * r1 - r0) / 3.0)
        })
        .collect())
}

/// Moves a point along the normal geodesic of a horosphere through it.
pub fn normal_flow(x: &HermitianMatrix, h: &Horosphere, s: f64) -> HermitianMatrix {
    // scale N so that ⟨x, N⟩ = -1
    let n = h.n.scaled(-1.0 / x.inner(&h.n));
    x.scaled((-s).exp()).add(&n.scaled(s.sinh()))
}

/// Euclidean area of the polygon through `points` in the chart where `h` is
/// the plane `t = 1`.
pub fn flat_patch_area(points: &[HermitianMatrix], h: &Horosphere) -> f64 {
    let b = horosphere_chart(&h.tangency, &h.n);
    let w: Vec<C64> = points.iter().map(|x| chart_point(&b, x).0).collect();
    let n = w.len();
    (0..n).map(|k| 0.5 * (w[k].conj() * w[(k + 1) % n]).im).sum::<f64>().abs()
}

/// The dual net `A⁻¹ (A⁻¹)*` with the roles of the two patterns swapped.
pub fn dual_surface(net: &HorosphericalNet) -> Result<HorosphericalNet, Cmc1Error> {
    let frame = net.frame.as_ref().ok_or(Cmc1Error::FrameUnavailable)?;
    let source = net.source.clone().ok_or(Cmc1Error::FrameUnavailable)?;
    net_from_frame(frame.inverse(), net.gauss.clone(), source)
}

/// Source pattern, Gauss pattern and frame of a CMC-1 net, read from its
/// geometry alone.
pub fn extract_patterns(net: &HorosphericalNet) -> Result<(CirclePattern, CirclePattern, MoebiusFrame), Cmc1Error> {
    const TOL: f64 = 1e-8;
    if net.degenerate {
        return Err(Cmc1Error::NotCmc1("degenerate net".into()));
    }
    let worst = net.measurement.max_ratio_error();
    if worst > TOL {
        return Err(Cmc1Error::NotCmc1(format!("H/area off by {worst:.3e}")));
    }
    let bad = net.edge_condition_violations()?;
    if !bad.is_empty() {
        return Err(Cmc1Error::NotCmc1(format!("edge condition fails on {} edges", bad.len())));
    }
    let m = &net.measurement;
    let eta: Vec<MoebiusMap> = net
        .disk
        .edges()
        .iter()
        .enumerate()
        .map(|(e, ed)| {
            let lambda = C64::from_polar(1.0, m.torsion(e) / 2.0);
            fixed_point_map(&net.gauss[ed.i], &net.gauss[ed.j], lambda.inv())
        })
        .collect();
    let (frame, z) = integrate_transitions(&net.disk, &net.gauss, &net.f, &eta)?;
    let z = CirclePattern::new(net.disk.clone(), z)?;
    let zt = net.gauss_pattern()?;
    Ok((z, zt, frame))
}
