//! Discrete Toda-type solutions on cell decompositions, labelings on the
//! double, and the cross-ratio family they generate.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::cmc1::{build_cmc1, Cmc1Error, HorosphericalNet};
use crate::equidistant::{build_equidistant, EquidistantError, EquidistantNet};
use crate::mesh::{MeshError, TriangulatedDisk};
use crate::moebius::{mobius_from_triples, SpherePoint};
use crate::pattern::{cross_ratios_of, develop, CirclePattern, PatternError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TodaError {
    #[error("grid must be at least 2x2")]
    TooSmall,
    #[error("no labeling fits q (residual {0:.3e})")]
    InconsistentLabeling(f64),
    #[error("pole in family: |t| max|alpha| = {0}")]
    PoleInFamily(f64),
    #[error("family member at t = {0} is not Delaunay")]
    NotDelaunayAtT(f64),
    #[error("edge {0}-{1} is not in the decomposition")]
    UnknownEdge(usize, usize),
    #[error("labeling of a complex q cannot feed the real family")]
    ComplexLabeling,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Cmc1(#[from] Cmc1Error),
    #[error(transparent)]
    Equidistant(#[from] EquidistantError),
}

/// An edge of a cell decomposition with its left face (containing `i→j`) and
/// right face (containing `j→i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellEdge {
    pub i: usize,
    pub j: usize,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

impl CellEdge {
    pub fn is_interior(&self) -> bool {
        self.left.is_some() && self.right.is_some()
    }
}

/// A polygonal decomposition of a disk, faces counterclockwise.
#[derive(Clone, Debug)]
pub struct CellComplex {
    n_vertices: usize,
    faces: Vec<Vec<usize>>,
    edges: Vec<CellEdge>,
    index: HashMap<(usize, usize), usize>,
    boundary: Vec<bool>,
}

impl CellComplex {
    pub fn new(faces: Vec<Vec<usize>>) -> Result<Self, TodaError> {
        let n_vertices = faces.iter().flatten().max().map_or(0, |m| m + 1);
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<CellEdge> = Vec::new();
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(MeshError::NotADisk(format!("face {f} has fewer than three vertices")).into());
            }
            for s in 0..face.len() {
                let (a, b) = (face[s], face[(s + 1) % face.len()]);
                let key = (a.min(b), a.max(b));
                let e = *index.entry(key).or_insert_with(|| {
                    edges.push(CellEdge { i: key.0, j: key.1, left: None, right: None });
                    edges.len() - 1
                });
                let slot = if a == key.0 { &mut edges[e].left } else { &mut edges[e].right };
                if slot.is_some() {
                    return Err(MeshError::InconsistentOrientation(a, b).into());
                }
                *slot = Some(f);
            }
        }
        let mut boundary = vec![false; n_vertices];
        for e in &edges {
            if !e.is_interior() {
                boundary[e.i] = true;
                boundary[e.j] = true;
            }
        }
        Ok(Self { n_vertices, faces, edges, index, boundary })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[CellEdge] {
        &self.edges
    }

    pub fn edge_between(&self, i: usize, j: usize) -> Option<usize> {
        self.index.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn is_interior(&self, v: usize) -> bool {
        !self.boundary[v]
    }

    /// Left face of the oriented edge `i→j`.
    pub fn left_of(&self, i: usize, j: usize) -> Option<usize> {
        let e = self.edges[self.edge_between(i, j)?];
        if e.i == i {
            e.left
        } else {
            e.right
        }
    }

    pub fn right_of(&self, i: usize, j: usize) -> Option<usize> {
        self.left_of(j, i)
    }
}

/// Which diagonal splits each quadrilateral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalRule {
    /// The diagonal whose sorted vertex pair is lexicographically smaller.
    Smaller,
    Larger,
}

/// A triangulation of a cell complex, remembering each triangle's cell.
#[derive(Clone, Debug)]
pub struct CellTriangulation {
    pub disk: Arc<TriangulatedDisk>,
    pub parent: Vec<usize>,
}

pub fn triangulate(complex: &CellComplex, rule: DiagonalRule) -> Result<CellTriangulation, TodaError> {
    let mut faces = Vec::new();
    let mut parent = Vec::new();
    for (f, face) in complex.faces.iter().enumerate() {
        let n = face.len();
        // fan apex: position of the smallest (or second smallest) vertex
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&s| face[s]);
        let apex = if n == 4 {
            let d0 = (face[0].min(face[2]), face[0].max(face[2]));
            let d1 = (face[1].min(face[3]), face[1].max(face[3]));
            let first = (d0 < d1) == (rule == DiagonalRule::Smaller);
            if first {
                0
            } else {
                1
            }
        } else if rule == DiagonalRule::Smaller || n == 3 {
            order[0]
        } else {
            order[1]
        };
        for s in 1..n - 1 {
            faces.push([face[apex], face[(apex + s) % n], face[(apex + s + 1) % n]]);
            parent.push(f);
        }
    }
    Ok(CellTriangulation { disk: Arc::new(TriangulatedDisk::new(faces)?), parent })
}

impl CellTriangulation {
    /// The cell edge under a triangulation edge, if it is not a diagonal.
    pub fn cell_edge(&self, complex: &CellComplex, e: usize) -> Option<usize> {
        let ed = self.disk.edges()[e];
        if self.parent[ed.left] == self.parent[ed.right] {
            None
        } else {
            complex.edge_between(ed.i, ed.j)
        }
    }
}

/// Edge function `q` with its realization.
#[derive(Clone, Debug)]
pub struct TodaSolution {
    pub complex: Arc<CellComplex>,
    pub z: Vec<C64>,
    /// Indexed like `complex.edges()`.
    pub q: Vec<C64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TodaResiduals {
    pub versum: f64,
    pub facesum: f64,
    pub verzsum: f64,
}

impl TodaResiduals {
    pub fn max(&self) -> f64 {
        self.versum.max(self.facesum).max(self.verzsum)
    }
}

/// The `n × m` vertex grid `a + bi` with `q = 1` on horizontal and `-1` on
/// vertical edges.
pub fn square_grid_toda(n: usize, m: usize) -> Result<TodaSolution, TodaError> {
    if n < 2 || m < 2 {
        return Err(TodaError::TooSmall);
    }
    let id = |a: usize, b: usize| b * n + a;
    let mut faces = Vec::new();
    for b in 0..m - 1 {
        for a in 0..n - 1 {
            faces.push(vec![id(a, b), id(a + 1, b), id(a + 1, b + 1), id(a, b + 1)]);
        }
    }
    let complex = CellComplex::new(faces)?;
    let z: Vec<C64> = (0..n * m).map(|v| C64::new((v % n) as f64, (v / n) as f64)).collect();
    let q = complex
        .edges()
        .iter()
        .map(|e| if (z[e.j] - z[e.i]).im == 0.0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) })
        .collect();
    Ok(TodaSolution { complex: Arc::new(complex), z, q })
}

/// Vertex sums and weighted vertex sums at interior vertices, face sums on
/// every face.
pub fn verify_toda(complex: &CellComplex, z: &[C64], q: &[C64]) -> TodaResiduals {
    let mut vs = vec![C64::new(0.0, 0.0); complex.n_vertices()];
    let mut wz = vec![C64::new(0.0, 0.0); complex.n_vertices()];
    let mut fs = vec![C64::new(0.0, 0.0); complex.faces().len()];
    for (e, ed) in complex.edges().iter().enumerate() {
        vs[ed.i] += q[e];
        vs[ed.j] += q[e];
        wz[ed.i] += q[e] / (z[ed.j] - z[ed.i]);
        wz[ed.j] += q[e] / (z[ed.i] - z[ed.j]);
        for f in [ed.left, ed.right].into_iter().flatten() {
            fs[f] += q[e];
        }
    }
    let interior = |v: &usize| complex.is_interior(*v);
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    TodaResiduals {
        versum: max(&mut (0..complex.n_vertices()).filter(interior).map(|v| vs[v].norm())),
        facesum: max(&mut fs.iter().map(|s| s.norm())),
        verzsum: max(&mut (0..complex.n_vertices()).filter(interior).map(|v| wz[v].norm())),
    }
}

/// A function on the edges of the double: one value per corner `(vertex, face)`.
#[derive(Clone, Debug)]
pub struct Labeling {
    corners: HashMap<(usize, usize), usize>,
    pub values: Vec<C64>,
}

impl Labeling {
    pub fn alpha(&self, v: usize, face: usize) -> C64 {
        self.values[self.corners[&(v, face)]]
    }

    /// `(α_{ij+}, α_{ij-})`: the corners at `i` on the left and right of `i→j`.
    pub fn plus_minus(&self, complex: &CellComplex, i: usize, j: usize) -> Option<(C64, C64)> {
        let l = complex.left_of(i, j)?;
        let r = complex.right_of(i, j)?;
        Some((self.alpha(i, l), self.alpha(i, r)))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|a| a.im.abs() <= 1e-12)
    }

    /// Largest violation of equal opposite sides or of `q = α+ - α-`.
    pub fn residual(&self, complex: &CellComplex, q: &[C64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (e, ed) in complex.edges().iter().enumerate() {
            if let (Some(l), Some(r)) = (ed.left, ed.right) {
                worst = worst.max((self.alpha(ed.i, l) - self.alpha(ed.j, r)).norm());
                worst = worst.max((self.alpha(ed.j, l) - self.alpha(ed.i, r)).norm());
                worst = worst.max((q[e] - (self.alpha(ed.i, l) - self.alpha(ed.i, r))).norm());
            }
        }
        worst
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Labeling on the double with `q_ij = α_{ij+} - α_{ij-}`; each connected
/// piece is pinned to zero at its first corner.
pub fn labeling_from(complex: &CellComplex, q: &[C64]) -> Result<Labeling, TodaError> {
    const TOL: f64 = 1e-10;
    let mut corners = HashMap::new();
    for (f, face) in complex.faces().iter().enumerate() {
        for &v in face {
            let k = corners.len();
            corners.insert((v, f), k);
        }
    }
    let n = corners.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let interior: Vec<(usize, CellEdge)> =
        complex.edges().iter().copied().enumerate().filter(|(_, e)| e.is_interior()).collect();
    for &(_, ed) in &interior {
        let (l, r) = (ed.left.unwrap(), ed.right.unwrap());
        for (a, b) in [((ed.i, l), (ed.j, r)), ((ed.j, l), (ed.i, r))] {
            let (x, y) = (find(&mut parent, corners[&a]), find(&mut parent, corners[&b]));
            parent[x] = y;
        }
    }
    let class: Vec<usize> = (0..n).map(|c| find(&mut parent, c)).collect();
    // class(i, left) - class(i, right) = q
    let mut adj: HashMap<usize, Vec<(usize, C64)>> = HashMap::new();
    for &(e, ed) in &interior {
        let a = class[corners[&(ed.i, ed.left.unwrap())]];
        let b = class[corners[&(ed.i, ed.right.unwrap())]];
        adj.entry(a).or_default().push((b, -q[e]));
        adj.entry(b).or_default().push((a, q[e]));
    }
    let mut value: HashMap<usize, C64> = HashMap::new();
    let mut worst: f64 = 0.0;
    for c in 0..n {
        let root = class[c];
        if value.contains_key(&root) {
            continue;
        }
        value.insert(root, C64::new(0.0, 0.0));
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            let va = value[&a];
            for &(b, d) in adj.get(&a).map(|v| v.as_slice()).unwrap_or(&[]) {
                match value.get(&b) {
                    Some(&vb) => worst = worst.max((vb - (va + d)).norm()),
                    None => {
                        value.insert(b, va + d);
                        queue.push_back(b);
                    }
                }
            }
        }
    }
    if worst > TOL {
        return Err(TodaError::InconsistentLabeling(worst));
    }
    let values = class.iter().map(|c| value[c]).collect();
    Ok(Labeling { corners, values })
}

/// `X_t = ((1 - t α-)/(1 - t α+)) X` on cell edges, `X` on diagonals.
pub fn family_xt(
    complex: &CellComplex,
    tri: &CellTriangulation,
    x: &[C64],
    labeling: &Labeling,
    t: C64,
) -> Result<Vec<C64>, TodaError> {
    let guard = t.norm() * labeling.max_abs();
    if guard >= 0.9 {
        return Err(TodaError::PoleInFamily(guard));
    }
    let one = C64::new(1.0, 0.0);
    Ok(tri
        .disk
        .edges()
        .iter()
        .enumerate()
        .map(|(e, ed)| match tri.cell_edge(complex, e) {
            None => x[e],
            Some(_) => {
                let plus = labeling.alpha(ed.i, tri.parent[ed.left]);
                let minus = labeling.alpha(ed.i, tri.parent[ed.right]);
                (one - t * minus) / (one - t * plus) * x[e]
            }
        })
        .collect())
}

/// Toda data prepared for developing family members.
#[derive(Clone, Debug)]
pub struct TodaFamily {
    pub solution: TodaSolution,
    pub tri: CellTriangulation,
    pub labeling: Labeling,
    pub pattern: CirclePattern,
    pub x: Vec<C64>,
    /// Face held fixed when developing; the one nearest the centroid keeps
    /// the developed pairs, and the nets built from them, well conditioned.
    pub seed_face: usize,
}

impl TodaFamily {
    pub fn new(solution: TodaSolution, rule: DiagonalRule) -> Result<Self, TodaError> {
        let tri = triangulate(&solution.complex, rule)?;
        let labeling = labeling_from(&solution.complex, &solution.q)?;
        let pattern = CirclePattern::from_affine(tri.disk.clone(), &solution.z)?;
        let x = cross_ratios_of(&pattern)?.x;
        let n = solution.z.len() as f64;
        let centroid = solution.z.iter().sum::<C64>() / n;
        let seed_face = (0..tri.disk.faces().len())
            .min_by(|&a, &b| {
                let d = |f: usize| (tri.disk.faces()[f].iter().map(|&v| solution.z[v]).sum::<C64>() / 3.0 - centroid).norm();
                d(a).total_cmp(&d(b))
            })
            .unwrap_or(0);
        Ok(Self { solution, tri, labeling, pattern, x, seed_face })
    }

    pub fn xt(&self, t: C64) -> Result<Vec<C64>, TodaError> {
        family_xt(&self.solution.complex, &self.tri, &self.x, &self.labeling, t)
    }

    /// Develops `X_t` with the seed triangle pinned where `z` has it.
    pub fn develop(&self, t: C64) -> Result<CirclePattern, TodaError> {
        let xt = self.xt(t)?;
        let seed = self.tri.disk.faces()[self.seed_face].map(|v| self.pattern.z[v]);
        Ok(develop(&self.tri.disk, &xt, self.seed_face, seed)?)
    }

    fn delaunay_member(&self, t: C64, report: f64) -> Result<CirclePattern, TodaError> {
        let p = self.develop(t)?;
        if !cross_ratios_of(&p)?.is_delaunay() {
            return Err(TodaError::NotDelaunayAtT(report));
        }
        Ok(p)
    }

    /// `d/ds z_{s·dir}` at `s = 0`, by a fourth-order central difference.
    /// The seed triangle stays fixed, so its vertices have zero velocity.
    pub fn velocity(&self, dir: C64) -> Result<Vec<C64>, TodaError> {
        let h = 1e-3 / (dir.norm() * self.labeling.max_abs()).max(1.0);
        let at = |s: f64| -> Result<Vec<C64>, TodaError> {
            self.develop(dir * s)?
                .z
                .iter()
                .map(|p| p.affine().ok_or(TodaError::Pattern(PatternError::DegenerateSeed)))
                .collect()
        };
        let (p1, m1, p2, m2) = (at(h)?, at(-h)?, at(2.0 * h)?, at(-2.0 * h)?);
        Ok((0..p1.len()).map(|v| (8.0 * (p1[v] - m1[v]) - (p2[v] - m2[v])) / (12.0 * h)).collect())
    }

    /// `(z_{it}, z_{-it})`.
    pub fn cmc1_pair(&self, t: f64) -> Result<(CirclePattern, CirclePattern), TodaError> {
        if !self.labeling.is_real() {
            return Err(TodaError::ComplexLabeling);
        }
        let a = self.delaunay_member(C64::new(0.0, t), t)?;
        let b = self.delaunay_member(C64::new(0.0, -t), t)?;
        Ok((a, b))
    }
}

/// The net induced by the osculating maps from `z_{it}` to `z_{-it}`.
pub fn cmc1_from_toda(family: &TodaFamily, t: f64) -> Result<HorosphericalNet, TodaError> {
    let (a, b) = family.cmc1_pair(t)?;
    Ok(build_cmc1(&a, &b)?)
}

/// The equidistant net from `z` to `z_t` for real `t`.
pub fn equidistant_from_toda(family: &TodaFamily, t: f64) -> Result<EquidistantNet, TodaError> {
    if !family.labeling.is_real() {
        return Err(TodaError::ComplexLabeling);
    }
    let zt = family.delaunay_member(C64::new(t, 0.0), t)?;
    Ok(build_equidistant(&family.pattern, &zt)?)
}

/// Largest chordal distance between the cell-vertex positions developed from
/// the two diagonal rules, after matching three vertices of the first cell.
pub fn triangulation_independence(solution: &TodaSolution, t: C64) -> Result<f64, TodaError> {
    let a = TodaFamily::new(solution.clone(), DiagonalRule::Smaller)?.develop(t)?;
    let b = TodaFamily::new(solution.clone(), DiagonalRule::Larger)?.develop(t)?;
    let cell = &solution.complex.faces()[0];
    let pick = |p: &CirclePattern| [p.z[cell[0]], p.z[cell[1]], p.z[cell[2]]];
    let m = mobius_from_triples(pick(&b), pick(&a)).map_err(|_| PatternError::DegenerateSeed)?;
    Ok(a.z.iter().zip(&b.z).map(|(p, q): (&SpherePoint, &SpherePoint)| p.chordal(&m.apply(q))).fold(0.0, f64::max))
}

/// `max |d/dt log X_t|_{t=0} - q|` on cell edges and `max |…|` on diagonals,
/// by Richardson-extrapolated central differences.
pub fn tangent_check(family: &TodaFamily) -> Result<(f64, f64), TodaError> {
    let h = 1e-3 / family.labeling.max_abs().max(1.0);
    let deriv = |h: f64| -> Result<Vec<C64>, TodaError> {
        let p = family.xt(C64::new(h, 0.0))?;
        let m = family.xt(C64::new(-h, 0.0))?;
        Ok(p.iter().zip(&m).map(|(a, b)| (a / b).ln() / (2.0 * h)).collect())
    };
    let (d1, d2) = (deriv(h)?, deriv(h / 2.0)?);
    let complex = &family.solution.complex;
    let (mut on_cells, mut on_diagonals) = (0.0f64, 0.0f64);
    for e in 0..d1.len() {
        let d = (4.0 * d2[e] - d1[e]) / 3.0;
        match family.tri.cell_edge(complex, e) {
            Some(c) => on_cells = on_cells.max((d - family.solution.q[c]).norm()),
            None => on_diagonals = on_diagonals.max(d.norm()),
        }
    }
    Ok((on_cells, on_diagonals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::verify_closure;

    #[test]
    fn grid_residuals_vanish() {
        for (n, m) in [(3, 3), (2, 2), (5, 4)] {
            let g = square_grid_toda(n, m).unwrap();
            assert_eq!(verify_toda(&g.complex, &g.z, &g.q).max(), 0.0);
        }
        assert!(matches!(square_grid_toda(1, 3), Err(TodaError::TooSmall)));
    }

    #[test]
    fn flipped_q_breaks_vertex_sums() {
        let g = square_grid_toda(3, 3).unwrap();
        let mut q = g.q.clone();
        let e = g.complex.edge_between(4, 5).unwrap();
        q[e] = C64::new(2.0, 0.0);
        let r = verify_toda(&g.complex, &g.z, &q);
        assert!((r.versum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_labeling_is_two_valued() {
        let g = square_grid_toda(4, 4).unwrap();
        let lab = labeling_from(&g.complex, &g.q).unwrap();
        assert!(lab.residual(&g.complex, &g.q) < 1e-14);
        let mut vals: Vec<f64> = lab.values.iter().map(|a| a.re).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        assert_eq!(vals.len(), 2);
        assert_eq!(vals[1] - vals[0], 1.0);
        let zero = labeling_from(&g.complex, &vec![C64::new(0.0, 0.0); g.q.len()]).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn family_closes() {
        let g = square_grid_toda(5, 5).unwrap();
        let fam = TodaFamily::new(g, DiagonalRule::Smaller).unwrap();
        for t in [C64::new(0.2, 0.0), C64::new(0.0, 0.15), C64::new(-0.1, 0.1)] {
            let xt = fam.xt(t).unwrap();
            let rep = verify_closure(&crate::pattern::CrossRatioSystem { disk: fam.tri.disk.clone(), x: xt });
            assert!(rep.max_residual() < 1e-10, "{rep:?}");
        }
    }
}
