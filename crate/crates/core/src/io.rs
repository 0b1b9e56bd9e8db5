//! JSON file formats, OBJ/PLY export of nets, and run manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cmc1::{chart_ball, chart_point, horosphere_chart, HorosphericalNet};
use crate::equidistant::{axis_chart, axis_coords, verify_equidistant, EquidistantNet};
use crate::mesh::TriangulatedDisk;
use crate::minimal::{minimal_surface, MoebiusVectorFrame};
use crate::moebius::{from_upper_half_space, to_poincare_ball, HermitianMatrix, MoebiusMap, SpherePoint};
use crate::osculating::MoebiusFrame;
use crate::pattern::{CirclePattern, CrossRatioSystem};
use crate::toda::{CellComplex, TodaSolution};
use crate::Error;

/// A complex number as `{"re", "im"}`.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// A point of the sphere: a complex number or the string `"inf"`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum JsonPoint {
    Finite(JsonComplex),
    Tag(String),
}

impl From<&SpherePoint> for JsonPoint {
    fn from(p: &SpherePoint) -> Self {
        match p.affine() {
            Some(z) => JsonPoint::Finite(z.into()),
            None => JsonPoint::Tag("inf".into()),
        }
    }
}

impl JsonPoint {
    pub fn to_point(&self) -> Result<SpherePoint, Error> {
        match self {
            JsonPoint::Finite(z) => Ok(SpherePoint::finite((*z).into())),
            JsonPoint::Tag(s) if s == "inf" => Ok(SpherePoint::infinity()),
            JsonPoint::Tag(s) => Err(Error::Parse(format!("unknown point tag {s:?}"))),
        }
    }
}

fn points(ps: &[SpherePoint]) -> Vec<JsonPoint> {
    ps.iter().map(JsonPoint::from).collect()
}

fn parse_points(ps: &[JsonPoint]) -> Result<Vec<SpherePoint>, Error> {
    ps.iter().map(JsonPoint::to_point).collect()
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// `{"faces": [[i,j,k], ...], "positions": [...]}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MeshFile {
    pub faces: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<JsonPoint>>,
}

pub fn mesh_from_json(text: &str) -> Result<TriangulatedDisk, Error> {
    let m: MeshFile = from_json(text)?;
    Ok(TriangulatedDisk::new(m.faces)?)
}

pub fn pattern_to_json(p: &CirclePattern) -> String {
    to_json(&MeshFile { faces: p.disk.faces().to_vec(), positions: Some(points(&p.z)) })
}

pub fn pattern_from_json(text: &str) -> Result<CirclePattern, Error> {
    let m: MeshFile = from_json(text)?;
    let pos = m.positions.ok_or_else(|| Error::Parse("pattern file needs \"positions\"".into()))?;
    let disk = Arc::new(TriangulatedDisk::new(m.faces)?);
    Ok(CirclePattern::new(disk, parse_points(&pos)?)?)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CrossRatioEntry {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CrossRatioFile {
    pub edges: Vec<CrossRatioEntry>,
}

pub fn cross_ratios_to_json(xs: &CrossRatioSystem) -> String {
    let edges = xs
        .disk
        .edges()
        .iter()
        .zip(&xs.x)
        .map(|(ed, x)| CrossRatioEntry { i: ed.i, j: ed.j, re: x.re, im: x.im })
        .collect();
    to_json(&CrossRatioFile { edges })
}

/// Reads cross ratios onto the interior edges of `disk`; every interior edge
/// must be listed once.
pub fn cross_ratios_from_json(disk: Arc<TriangulatedDisk>, text: &str) -> Result<CrossRatioSystem, Error> {
    let f: CrossRatioFile = from_json(text)?;
    let mut x = vec![None; disk.edges().len()];
    for e in &f.edges {
        let k = disk.edge_between(e.i, e.j).ok_or_else(|| Error::Parse(format!("{}-{} is not an interior edge", e.i, e.j)))?;
        x[k] = Some(C64::new(e.re, e.im));
    }
    let x = x
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| Error::Parse(format!("edge {k} has no cross ratio"))))
        .collect::<Result<_, _>>()?;
    Ok(CrossRatioSystem { disk, x })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TodaEntry {
    pub i: usize,
    pub j: usize,
    pub q_re: f64,
    pub q_im: f64,
}

/// `{"edges": [{"i","j","q_re","q_im"}]}`, with the cells and their
/// realization alongside.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TodaFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<JsonComplex>>,
    pub edges: Vec<TodaEntry>,
}

pub fn toda_to_json(s: &TodaSolution) -> String {
    let edges = s
        .complex
        .edges()
        .iter()
        .zip(&s.q)
        .map(|(e, q)| TodaEntry { i: e.i, j: e.j, q_re: q.re, q_im: q.im })
        .collect();
    to_json(&TodaFile {
        faces: Some(s.complex.faces().to_vec()),
        positions: Some(s.z.iter().map(|&z| z.into()).collect()),
        edges,
    })
}

pub fn toda_from_json(text: &str) -> Result<TodaSolution, Error> {
    let f: TodaFile = from_json(text)?;
    let faces = f.faces.ok_or_else(|| Error::Parse("Toda file needs \"faces\"".into()))?;
    let pos = f.positions.ok_or_else(|| Error::Parse("Toda file needs \"positions\"".into()))?;
    let complex = CellComplex::new(faces)?;
    let mut q = vec![None; complex.edges().len()];
    for e in &f.edges {
        let k = complex.edge_between(e.i, e.j).ok_or_else(|| Error::Parse(format!("{}-{} is not an edge", e.i, e.j)))?;
        q[k] = Some(C64::new(e.q_re, e.q_im));
    }
    let q = q
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| Error::Parse(format!("edge {k} has no q"))))
        .collect::<Result<_, _>>()?;
    Ok(TodaSolution { complex: Arc::new(complex), z: pos.into_iter().map(C64::from).collect(), q })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FrameEntry {
    pub face: usize,
    pub matrix: [[JsonComplex; 2]; 2],
}

/// A frame keyed by face, with the two patterns it relates.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FrameFile {
    pub faces: Vec<[usize; 3]>,
    pub frames: Vec<FrameEntry>,
    pub source: Vec<JsonPoint>,
    pub gauss: Vec<JsonPoint>,
}

pub fn frame_to_json(frame: &MoebiusFrame, source: &[SpherePoint], gauss: &[SpherePoint]) -> String {
    let frames = frame
        .maps
        .iter()
        .enumerate()
        .map(|(face, m)| FrameEntry { face, matrix: [[m.a.into(), m.b.into()], [m.c.into(), m.d.into()]] })
        .collect();
    to_json(&FrameFile { faces: frame.disk.faces().to_vec(), frames, source: points(source), gauss: points(gauss) })
}

/// `(frame, source, gauss)`.
pub fn frame_from_json(text: &str) -> Result<(MoebiusFrame, Vec<SpherePoint>, Vec<SpherePoint>), Error> {
    let f: FrameFile = from_json(text)?;
    let disk = Arc::new(TriangulatedDisk::new(f.faces)?);
    let mut maps = vec![None; disk.faces().len()];
    for e in &f.frames {
        let slot = maps.get_mut(e.face).ok_or_else(|| Error::Parse(format!("face {} out of range", e.face)))?;
        let [[a, b], [c, d]] = e.matrix;
        *slot = Some(MoebiusMap::new(a.into(), b.into(), c.into(), d.into()));
    }
    let maps = maps
        .into_iter()
        .enumerate()
        .map(|(k, m)| m.ok_or_else(|| Error::Parse(format!("face {k} has no matrix"))))
        .collect::<Result<_, _>>()?;
    Ok((MoebiusFrame { disk, maps }, parse_points(&f.source)?, parse_points(&f.gauss)?))
}

/// `{"velocity": [...]}`, one complex number per vertex.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct VelocityFile {
    pub velocity: Vec<JsonComplex>,
}

pub fn velocity_from_json(text: &str) -> Result<Vec<C64>, Error> {
    let f: VelocityFile = from_json(text)?;
    Ok(f.velocity.into_iter().map(C64::from).collect())
}

pub fn velocity_to_json(v: &[C64]) -> String {
    to_json(&VelocityFile { velocity: v.iter().map(|&z| z.into()).collect() })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct VertexRecord {
    pub vertex: usize,
    pub area: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub ratio: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

/// Per dual face (primal vertex) area, `H` and ratio; per edge the measured
/// quantities; the dual vertices in the Poincaré ball.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct NetReport {
    pub kind: String,
    pub degenerate: bool,
    pub points: Vec<[f64; 3]>,
    pub faces: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub residuals: BTreeMap<String, f64>,
}

impl NetReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        from_json(text)
    }
}

fn ball(x: &HermitianMatrix) -> Result<[f64; 3], Error> {
    Ok(to_poincare_ball(x)?)
}

pub fn cmc1_report(net: &HorosphericalNet) -> Result<NetReport, Error> {
    let m = &net.measurement;
    if m.theta.len() != net.disk.edges().len() {
        return Err(Error::UnmeasuredNet);
    }
    let faces = net
        .disk
        .interior_vertices()
        .filter_map(|v| {
            let (a, h) = (m.area[v]?, m.mean_curvature[v]?);
            Some(VertexRecord { vertex: v, area: a, h, ratio: m.ratio(v).unwrap_or(f64::NAN) })
        })
        .collect();
    let edges = net
        .disk
        .edges()
        .iter()
        .enumerate()
        .map(|(e, ed)| EdgeRecord {
            i: ed.i,
            j: ed.j,
            ell: Some(m.ell[e]),
            alpha: Some(m.alpha[e]),
            theta: Some(m.theta[e]),
            lambda: None,
        })
        .collect();
    let (theta_sum, torsion_sum) = net.vertex_balance();
    let residuals = BTreeMap::from([
        ("ratio".to_string(), m.max_ratio_error()),
        ("incidence".to_string(), m.incidence),
        ("theta_balance".to_string(), theta_sum),
        ("torsion_balance".to_string(), torsion_sum),
    ]);
    Ok(NetReport {
        kind: "cmc1".into(),
        degenerate: net.degenerate,
        points: net.f.iter().map(ball).collect::<Result<_, _>>()?,
        faces,
        edges,
        residuals,
    })
}

pub fn equidistant_report(net: &EquidistantNet) -> Result<NetReport, Error> {
    let rep = verify_equidistant(net);
    let edges = net
        .disk
        .edges()
        .iter()
        .zip(net.scaling_factors())
        .map(|(ed, l)| EdgeRecord { i: ed.i, j: ed.j, ell: None, alpha: None, theta: None, lambda: Some(l) })
        .collect();
    let residuals = BTreeMap::from([
        ("eigenvalue_reality".to_string(), rep.eigenvalue_reality),
        ("cosphericity".to_string(), rep.cosphericity),
        ("arc".to_string(), rep.arc),
    ]);
    Ok(NetReport {
        kind: "equidistant".into(),
        degenerate: net.degenerate,
        points: net.f.iter().map(ball).collect::<Result<_, _>>()?,
        faces: Vec::new(),
        edges,
        residuals,
    })
}

/// Points, polylines and triangles in R³.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExportMesh {
    pub comments: Vec<String>,
    pub vertices: Vec<[f64; 3]>,
    pub lines: Vec<Vec<usize>>,
    pub triangles: Vec<[usize; 3]>,
}

impl ExportMesh {
    fn push(&mut self, p: [f64; 3]) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", v[0], v[1], v[2]);
        }
        for l in &self.lines {
            let idx: Vec<String> = l.iter().map(|i| (i + 1).to_string()).collect();
            let _ = writeln!(s, "l {}", idx.join(" "));
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    /// ASCII PLY; polylines become their segments.
    pub fn to_ply(&self) -> String {
        let segments: Vec<(usize, usize)> = self.lines.iter().flat_map(|l| l.windows(2).map(|w| (w[0], w[1]))).collect();
        let mut s = String::from("ply\nformat ascii 1.0\n");
        for c in &self.comments {
            let _ = writeln!(s, "comment {c}");
        }
        let _ = writeln!(s, "element vertex {}", self.vertices.len());
        s.push_str("property double x\nproperty double y\nproperty double z\n");
        let _ = writeln!(s, "element face {}", self.triangles.len());
        s.push_str("property list uchar int vertex_indices\n");
        let _ = writeln!(s, "element edge {}", segments.len());
        s.push_str("property int vertex1\nproperty int vertex2\nend_header\n");
        for v in &self.vertices {
            let _ = writeln!(s, "{} {} {}", v[0], v[1], v[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        for (a, b) in segments {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }

    pub fn from_obj(text: &str) -> Result<Self, Error> {
        let mut m = ExportMesh::default();
        let index = |t: &str| -> Result<usize, Error> {
            let k: usize = t.split('/').next().unwrap_or("").parse().map_err(|_| Error::Parse(format!("bad index {t:?}")))?;
            k.checked_sub(1).ok_or_else(|| Error::Parse("OBJ indices start at 1".into()))
        };
        for line in text.lines() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("#") => m.comments.push(line.trim_start_matches('#').trim().to_string()),
                Some("v") => {
                    let c: Vec<f64> = it.map(|t| t.parse().map_err(|_| Error::Parse(format!("bad coordinate {t:?}")))).collect::<Result<_, _>>()?;
                    if c.len() < 3 {
                        return Err(Error::Parse("vertex needs three coordinates".into()));
                    }
                    m.vertices.push([c[0], c[1], c[2]]);
                }
                Some("l") => m.lines.push(it.map(index).collect::<Result<_, _>>()?),
                Some("f") => {
                    let f: Vec<usize> = it.map(index).collect::<Result<_, _>>()?;
                    if f.len() != 3 {
                        return Err(Error::Parse("only triangles are supported".into()));
                    }
                    m.triangles.push([f[0], f[1], f[2]]);
                }
                _ => {}
            }
        }
        Ok(m)
    }
}

const DEGENERATE_NOTE: &str = "warning: degenerate net, all dual vertices coincide";

/// Vertices at the dual vertices, edges along the horocycle arcs, and each
/// interior dual face as a fan over its circular-arc polygon in the chart
/// where its horosphere is the plane `t = 1`.
pub fn export_cmc1(net: &HorosphericalNet, arcs: usize) -> Result<ExportMesh, Error> {
    let m = &net.measurement;
    let disk = &net.disk;
    if m.theta.len() != disk.edges().len() {
        return Err(Error::UnmeasuredNet);
    }
    let mut out = ExportMesh { comments: vec!["horospherical net, Poincare ball".into()], ..Default::default() };
    if net.degenerate {
        out.comments.push(DEGENERATE_NOTE.into());
        out.push(ball(&net.f[0])?);
        return Ok(out);
    }
    let arcs = arcs.max(1);
    for x in &net.f {
        out.push(ball(x)?);
    }
    let charts: Vec<MoebiusMap> =
        net.gauss.iter().zip(&net.horospheres).map(|(z, h)| horosphere_chart(z, &h.n)).collect();
    let lift = |chart: &MoebiusMap, w: C64| ball(&chart.inverse().act(&from_upper_half_space(w, 1.0)));
    for (e, ed) in disk.edges().iter().enumerate() {
        let b = &charts[ed.i];
        let (_, c) = chart_ball(b, &net.horospheres[ed.j].n);
        let (wl, _) = chart_point(b, &net.f[ed.left]);
        let mut line = vec![ed.left];
        for k in 1..arcs {
            let s = k as f64 / arcs as f64;
            let p = lift(b, c + (wl - c) * C64::from_polar(1.0, -m.theta[e] * s))?;
            line.push(out.push(p));
        }
        line.push(ed.right);
        out.lines.push(line);
    }
    for v in disk.interior_vertices() {
        let b = &charts[v];
        let star = disk.interior_star(v)?;
        let faces = disk.star_faces(v)?;
        let w: Vec<C64> = faces.iter().map(|&g| chart_point(b, &net.f[g]).0).collect();
        let n = w.len();
        let mut ring: Vec<(usize, C64)> = Vec::new();
        for k in 0..n {
            let prev = (k + n - 1) % n;
            let (_, c) = chart_ball(b, &net.horospheres[star[k]].n);
            let q = (w[k] - c) / (w[prev] - c);
            let phi = if q.is_finite() && q.norm() > 0.0 { q.arg() } else { 0.0 };
            ring.push((faces[prev], w[prev]));
            for j in 1..arcs {
                let p = c + (w[prev] - c) * C64::from_polar(1.0, phi * j as f64 / arcs as f64);
                let id = out.push(lift(b, p)?);
                ring.push((id, p));
            }
        }
        let centre = ring.iter().map(|r| r.1).sum::<C64>() / ring.len() as f64;
        let hub = out.push(lift(b, centre)?);
        for k in 0..ring.len() {
            out.triangles.push([hub, ring[k].0, ring[(k + 1) % ring.len()].0]);
        }
    }
    Ok(out)
}

/// Vertices at the dual vertices and edges along the arcs ending at the
/// edge's two Gauss points; faces are fans in the ball.
pub fn export_equidistant(net: &EquidistantNet, arcs: usize) -> Result<ExportMesh, Error> {
    let disk = &net.disk;
    let mut out = ExportMesh { comments: vec!["equidistant net, Poincare ball".into()], ..Default::default() };
    if net.degenerate {
        out.comments.push(DEGENERATE_NOTE.into());
        out.push(ball(&net.f[0])?);
        return Ok(out);
    }
    let arcs = arcs.max(1);
    for x in &net.f {
        out.push(ball(x)?);
    }
    for ed in disk.edges() {
        let c = axis_chart(&net.gauss[ed.i], &net.gauss[ed.j]);
        let (wl, tl) = axis_coords(&c, &net.f[ed.left]);
        let (wr, tr) = axis_coords(&c, &net.f[ed.right]);
        let (rl, rr) = ((wl.norm_sqr() + tl * tl).sqrt(), (wr.norm_sqr() + tr * tr).sqrt());
        let mut line = vec![ed.left];
        let back = c.inverse();
        for k in 1..arcs {
            let s = k as f64 / arcs as f64;
            let r = rl * (rr / rl).powf(s);
            let p = from_upper_half_space(wl * (r / rl), tl * (r / rl));
            line.push(out.push(ball(&back.act(&p))?));
        }
        line.push(ed.right);
        out.lines.push(line);
    }
    for v in disk.interior_vertices() {
        let faces = disk.star_faces(v)?;
        let pts: Vec<[f64; 3]> = faces.iter().map(|&g| out.vertices[g]).collect();
        let n = pts.len() as f64;
        let centre = [0, 1, 2].map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / n);
        let hub = out.push(centre);
        for k in 0..faces.len() {
            out.triangles.push([hub, faces[k], faces[(k + 1) % faces.len()]]);
        }
    }
    Ok(out)
}

/// The trivalent surface in R³: one point per face, straight dual edges.
pub fn export_minimal(frame: &MoebiusVectorFrame) -> ExportMesh {
    let mut out = ExportMesh { comments: vec!["discrete minimal surface".into()], ..Default::default() };
    out.vertices = minimal_surface(frame);
    out.lines = frame.disk.edges().iter().map(|ed| vec![ed.left, ed.right]).collect();
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// What was run, on which inputs, with which settings.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<InputHash>,
    pub tolerances: BTreeMap<String, f64>,
    pub parameters: BTreeMap<String, String>,
    pub seed_face: usize,
    pub version: String,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()).unwrap_or_else(|| {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
        });
        Self {
            subcommand: subcommand.into(),
            inputs: Vec::new(),
            tolerances: BTreeMap::new(),
            parameters: BTreeMap::new(),
            seed_face: 0,
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
        }
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(InputHash { path: path.into(), sha256: sha256_hex(bytes) });
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        from_json(text)
    }
}

/// Hyperbolic length of a polyline given in the Poincaré ball.
pub fn ball_length(points: &[[f64; 3]]) -> f64 {
    let d = |a: &[f64; 3], b: &[f64; 3]| {
        let diff: f64 = (0..3).map(|k| (a[k] - b[k]).powi(2)).sum();
        let na: f64 = a.iter().map(|x| x * x).sum();
        let nb: f64 = b.iter().map(|x| x * x).sum();
        (1.0 + 2.0 * diff / ((1.0 - na) * (1.0 - nb))).acosh()
    };
    points.windows(2).map(|w| d(&w[0], &w[1])).sum()
}
