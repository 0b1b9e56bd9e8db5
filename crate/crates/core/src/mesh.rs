//! Oriented triangulated disks, their duals, and triangular lattice patches.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("not a disk: {0}")]
    NotADisk(String),
    #[error("edge {0}-{1} has more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("directed edge {0}->{1} appears in two faces")]
    InconsistentOrientation(usize, usize),
    #[error("region contains no lattice triangle")]
    EmptyRegion,
    #[error("vertex {0} is on the boundary")]
    BoundaryVertex(usize),
    #[error("invalid lattice angles")]
    InvalidLattice,
}

/// An interior edge `i < j`. `left` is the face containing `i→j` with third
/// vertex `k`; `right` contains `j→i` with third vertex `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InteriorEdge {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub left: usize,
    pub right: usize,
}

/// An interior edge seen from a chosen orientation `from→to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientedEdge {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    pub k: usize,
    pub l: usize,
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug)]
pub struct TriangulatedDisk {
    n_vertices: usize,
    faces: Vec<[usize; 3]>,
    interior: Vec<bool>,
    edges: Vec<InteriorEdge>,
    edge_index: HashMap<(usize, usize), usize>,
    directed: HashMap<(usize, usize), usize>,
    stars: Vec<Vec<usize>>,
    star_faces: Vec<Vec<usize>>,
    dual: Vec<Vec<(usize, usize)>>,
}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl TriangulatedDisk {
    pub fn new(faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::NotADisk("no faces".into()));
        }
        let n_vertices = faces.iter().flatten().max().map_or(0, |m| m + 1);
        let mut directed = HashMap::new();
        let mut undirected: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, t) in faces.iter().enumerate() {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshError::NotADisk(format!("face {f} repeats a vertex")));
            }
            for s in 0..3 {
                let (a, b) = (t[s], t[(s + 1) % 3]);
                if directed.insert((a, b), f).is_some() {
                    return Err(MeshError::InconsistentOrientation(a, b));
                }
                let c = undirected.entry(key(a, b)).or_insert(0);
                *c += 1;
                if *c > 2 {
                    return Err(MeshError::NonManifoldEdge(key(a, b).0, key(a, b).1));
                }
            }
        }
        let mut used = vec![false; n_vertices];
        for t in &faces {
            for &v in t {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::NotADisk(format!("vertex {v} is unused")));
        }

        // connectivity through shared vertices
        let mut parent: Vec<usize> = (0..n_vertices).collect();
        for t in &faces {
            for s in 1..3 {
                let (a, b) = (find(&mut parent, t[0]), find(&mut parent, t[s]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        if (0..n_vertices).any(|v| find(&mut parent, v) != root) {
            return Err(MeshError::NotADisk("disconnected".into()));
        }

        let euler = n_vertices as i64 - undirected.len() as i64 + faces.len() as i64;
        if euler != 1 {
            return Err(MeshError::NotADisk(format!("Euler characteristic {euler}")));
        }

        // boundary loop: directed edges without a reverse
        let mut next_boundary: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) && next_boundary.insert(a, b).is_some() {
                return Err(MeshError::NotADisk(format!("pinched boundary at vertex {a}")));
            }
        }
        if next_boundary.is_empty() {
            return Err(MeshError::NotADisk("no boundary".into()));
        }
        let start = *next_boundary.keys().min().unwrap();
        let mut v = start;
        let mut len = 0;
        loop {
            v = next_boundary[&v];
            len += 1;
            if v == start || len > next_boundary.len() {
                break;
            }
        }
        if v != start || len != next_boundary.len() {
            return Err(MeshError::NotADisk("more than one boundary loop".into()));
        }
        let mut interior = vec![true; n_vertices];
        for &a in next_boundary.keys() {
            interior[a] = false;
        }

        let mut keys: Vec<(usize, usize)> =
            undirected.iter().filter(|(_, &c)| c == 2).map(|(&k, _)| k).collect();
        keys.sort_unstable();
        let mut edges = Vec::with_capacity(keys.len());
        let mut edge_index = HashMap::with_capacity(keys.len());
        for (e, &(i, j)) in keys.iter().enumerate() {
            let left = directed[&(i, j)];
            let right = directed[&(j, i)];
            let k = third(&faces[left], i, j);
            let l = third(&faces[right], i, j);
            edges.push(InteriorEdge { i, j, k, l, left, right });
            edge_index.insert((i, j), e);
        }

        // incident face counts, for the vertex-link check
        let mut degree = vec![0usize; n_vertices];
        for t in &faces {
            for &v in t {
                degree[v] += 1;
            }
        }
        let mut out_min = vec![usize::MAX; n_vertices];
        for &(a, b) in directed.keys() {
            out_min[a] = out_min[a].min(b);
        }
        let mut stars = vec![Vec::new(); n_vertices];
        let mut star_faces = vec![Vec::new(); n_vertices];
        for v in 0..n_vertices {
            if !interior[v] {
                continue;
            }
            let first = out_min[v];
            let mut ring = vec![first];
            let mut fs = Vec::new();
            let mut j = first;
            loop {
                // right face of v→j contains j→v
                let f = directed[&(j, v)];
                fs.push(f);
                let l = third(&faces[f], v, j);
                if l == first {
                    break;
                }
                ring.push(l);
                j = l;
                if ring.len() > degree[v] {
                    break;
                }
            }
            if ring.len() != degree[v] {
                return Err(MeshError::NotADisk(format!("vertex {v} has a non-cyclic link")));
            }
            stars[v] = ring;
            star_faces[v] = fs;
        }

        let mut dual = vec![Vec::new(); faces.len()];
        for (e, ed) in edges.iter().enumerate() {
            dual[ed.left].push((ed.right, e));
            dual[ed.right].push((ed.left, e));
        }

        Ok(Self { n_vertices, faces, interior, edges, edge_index, directed, stars, star_faces, dual })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[InteriorEdge] {
        &self.edges
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_vertices).filter(|&v| self.interior[v])
    }

    pub fn edge_between(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_index.get(&key(i, j)).copied()
    }

    /// The face containing the directed edge `i→j`.
    pub fn face_with(&self, i: usize, j: usize) -> Option<usize> {
        self.directed.get(&(i, j)).copied()
    }

    pub fn oriented(&self, from: usize, to: usize) -> Option<OrientedEdge> {
        let e = self.edge_between(from, to)?;
        let ed = &self.edges[e];
        Some(if ed.i == from {
            OrientedEdge { edge: e, from, to, k: ed.k, l: ed.l, left: ed.left, right: ed.right }
        } else {
            OrientedEdge { edge: e, from, to, k: ed.l, l: ed.k, left: ed.right, right: ed.left }
        })
    }

    /// Neighbors of an interior vertex in clockwise order: the successor of
    /// `j` is the third vertex of the right face of `v→j`.
    pub fn interior_star(&self, v: usize) -> Result<&[usize], MeshError> {
        if !self.interior[v] {
            return Err(MeshError::BoundaryVertex(v));
        }
        Ok(&self.stars[v])
    }

    /// Faces around an interior vertex; entry `m` contains `star[m]` and
    /// `star[m+1]`, so it is the right face of `v→star[m]`.
    pub fn star_faces(&self, v: usize) -> Result<&[usize], MeshError> {
        if !self.interior[v] {
            return Err(MeshError::BoundaryVertex(v));
        }
        Ok(&self.star_faces[v])
    }

    /// Dual neighbors `(face, interior edge)`.
    pub fn dual_neighbors(&self, f: usize) -> &[(usize, usize)] {
        &self.dual[f]
    }

    /// Breadth-first spanning tree of the dual graph as `(from, to, edge)`.
    pub fn dual_tree(&self, root: usize) -> Vec<(usize, usize, usize)> {
        let mut seen = vec![false; self.faces.len()];
        let mut out = Vec::with_capacity(self.faces.len());
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(f) = queue.pop_front() {
            for &(g, e) in &self.dual[f] {
                if !seen[g] {
                    seen[g] = true;
                    out.push((f, g, e));
                    queue.push_back(g);
                }
            }
        }
        out
    }

    /// Some face incident to each vertex.
    pub fn vertex_faces(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n_vertices];
        for (f, t) in self.faces.iter().enumerate() {
            for &v in t {
                if out[v] == usize::MAX {
                    out[v] = f;
                }
            }
        }
        out
    }

    /// All faces incident to each vertex.
    pub fn incident_faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_vertices];
        for (f, t) in self.faces.iter().enumerate() {
            for &v in t {
                out[v].push(f);
            }
        }
        out
    }
}

fn third(t: &[usize; 3], a: usize, b: usize) -> usize {
    *t.iter().find(|&&v| v != a && v != b).unwrap()
}

pub type RegionTest = Arc<dyn Fn(C64) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Region {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Vertex predicate plus a bounding box `[x0, x1, y0, y1]` for enumeration.
    Predicate { bounds: [f64; 4], test: RegionTest },
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Rect { x0, x1, y0, y1 } => write!(f, "Rect[{x0}, {x1}]x[{y0}, {y1}]"),
            Region::Predicate { bounds, .. } => write!(f, "Predicate within {bounds:?}"),
        }
    }
}

impl Region {
    pub fn unit_square() -> Self {
        Region::Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }
    }

    fn bounds(&self) -> [f64; 4] {
        match self {
            Region::Rect { x0, x1, y0, y1 } => [*x0, *x1, *y0, *y1],
            Region::Predicate { bounds, .. } => *bounds,
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        const SLACK: f64 = 1e-12;
        match self {
            Region::Rect { x0, x1, y0, y1 } => {
                z.re >= x0 - SLACK && z.re <= x1 + SLACK && z.im >= y0 - SLACK && z.im <= y1 + SLACK
            }
            Region::Predicate { test, .. } => test(z),
        }
    }
}

/// Acute triangular lattice with angles `alpha, beta, gamma` scaled by `eps`.
#[derive(Clone, Debug)]
pub struct LatticeSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eps: f64,
    pub region: Region,
}

/// Lattice steps `τ₁..τ₆` in `(n, m)` coordinates, matching `ω₁..ω₆`.
pub const STEPS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

impl LatticeSpec {
    pub fn equilateral(eps: f64, region: Region) -> Self {
        let a = std::f64::consts::FRAC_PI_3;
        Self { alpha: a, beta: a, gamma: a, eps, region }
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let half = std::f64::consts::FRAC_PI_2;
        let ok = [self.alpha, self.beta, self.gamma].iter().all(|&x| x > 0.0 && x < half)
            && (self.alpha + self.beta + self.gamma - std::f64::consts::PI).abs() < 1e-12
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(MeshError::InvalidLattice)
        }
    }

    /// Unit directions `ω₁..ω₆`.
    pub fn omega(&self, k: usize) -> C64 {
        let w = [
            C64::new(1.0, 0.0),
            C64::from_polar(1.0, self.beta),
            C64::from_polar(1.0, self.alpha + self.beta),
        ];
        let s = if (k - 1) / 3 == 0 { 1.0 } else { -1.0 };
        w[(k - 1) % 3] * s
    }

    /// Edge lengths `L₁..L₆` before scaling by `eps`.
    pub fn length(&self, k: usize) -> f64 {
        match (k - 1) % 3 {
            0 => self.alpha.sin(),
            1 => self.gamma.sin(),
            _ => self.beta.sin(),
        }
    }

    pub fn position(&self, n: i64, m: i64) -> C64 {
        let e1 = C64::new(self.eps * self.alpha.sin(), 0.0);
        let e2 = C64::from_polar(self.eps * self.gamma.sin(), self.beta);
        e1 * n as f64 + e2 * m as f64
    }

    /// Index ranges covering the bounding box of the region.
    fn index_box(&self) -> (i64, i64, i64, i64) {
        let [x0, x1, y0, y1] = self.region.bounds();
        let h = self.eps * self.gamma.sin() * self.beta.sin();
        let m0 = (y0 / h).floor() as i64 - 1;
        let m1 = (y1 / h).ceil() as i64 + 1;
        let w = self.eps * self.alpha.sin();
        let shift = self.eps * self.gamma.sin() * self.beta.cos();
        let n0 = ((x0 - shift * m1.max(m0.abs()) as f64 - w) / w).floor() as i64 - 2;
        let n1 = ((x1 + shift * m1.max(m0.abs()) as f64 + w) / w).ceil() as i64 + 2;
        (n0, n1, m0, m1)
    }

    /// Lattice points of the region, found by scanning the index box.
    pub fn points_in_region(&self) -> Vec<(i64, i64)> {
        let (n0, n1, m0, m1) = self.index_box();
        let mut out = Vec::new();
        for m in m0..=m1 {
            for n in n0..=n1 {
                if self.region.contains(self.position(n, m)) {
                    out.push((n, m));
                }
            }
        }
        out
    }
}

/// A lattice subcomplex with its lattice coordinates.
#[derive(Clone, Debug)]
pub struct LatticePatch {
    pub spec: LatticeSpec,
    pub disk: Arc<TriangulatedDisk>,
    pub positions: Vec<C64>,
    pub coords: Vec<(i64, i64)>,
    pub index: HashMap<(i64, i64), usize>,
}

impl LatticePatch {
    pub fn vertex(&self, n: i64, m: i64) -> Option<usize> {
        self.index.get(&(n, m)).copied()
    }

    /// The neighbor of `v` in direction `k ∈ 1..=6`, if present.
    pub fn step(&self, v: usize, k: usize) -> Option<usize> {
        let (n, m) = self.coords[v];
        let (dn, dm) = STEPS[k - 1];
        self.vertex(n + dn, m + dm)
    }

    pub fn barycenter(&self, f: usize) -> C64 {
        let t = self.disk.faces()[f];
        (self.positions[t[0]] + self.positions[t[1]] + self.positions[t[2]]) / 3.0
    }
}

type Tri = [(i64, i64); 3];

/// Maximal subcomplex of the lattice supported in the region that is a disk.
pub fn lattice_subcomplex(spec: &LatticeSpec) -> Result<LatticePatch, MeshError> {
    spec.validate()?;
    let (n0, n1, m0, m1) = spec.index_box();
    let inside = |n: i64, m: i64| spec.region.contains(spec.position(n, m));
    let mut tris: Vec<Tri> = Vec::new();
    for m in m0..m1 {
        for n in n0..n1 {
            let a = [(n, m), (n + 1, m), (n, m + 1)];
            let b = [(n + 1, m), (n + 1, m + 1), (n, m + 1)];
            for t in [a, b] {
                if t.iter().all(|&(x, y)| inside(x, y)) {
                    tris.push(t);
                }
            }
        }
    }
    loop {
        tris = largest_component(&tris);
        if tris.is_empty() {
            return Err(MeshError::EmptyRegion);
        }
        match pinch_repair(&tris) {
            Some(fixed) => tris = fixed,
            None => break,
        }
    }
    let mut coords: Vec<(i64, i64)> = tris.iter().flatten().copied().collect();
    coords.sort_unstable_by_key(|&(n, m)| (m, n));
    coords.dedup();
    let index: HashMap<(i64, i64), usize> =
        coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let faces: Vec<[usize; 3]> = tris.iter().map(|t| [index[&t[0]], index[&t[1]], index[&t[2]]]).collect();
    let disk = TriangulatedDisk::new(faces)?;
    let positions = coords.iter().map(|&(n, m)| spec.position(n, m)).collect();
    Ok(LatticePatch { spec: spec.clone(), disk: Arc::new(disk), positions, coords, index })
}

fn tri_edges(t: &Tri) -> [((i64, i64), (i64, i64)); 3] {
    let o = |a: (i64, i64), b: (i64, i64)| if a < b { (a, b) } else { (b, a) };
    [o(t[0], t[1]), o(t[1], t[2]), o(t[0], t[2])]
}

fn largest_component(tris: &[Tri]) -> Vec<Tri> {
    if tris.is_empty() {
        return Vec::new();
    }
    let mut by_edge: HashMap<((i64, i64), (i64, i64)), Vec<usize>> = HashMap::new();
    for (f, t) in tris.iter().enumerate() {
        for e in tri_edges(t) {
            by_edge.entry(e).or_default().push(f);
        }
    }
    let mut comp = vec![usize::MAX; tris.len()];
    let mut sizes = Vec::new();
    for s in 0..tris.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        let mut stack = vec![s];
        comp[s] = c;
        let mut size = 0;
        while let Some(f) = stack.pop() {
            size += 1;
            for e in tri_edges(&tris[f]) {
                for &g in &by_edge[&e] {
                    if comp[g] == usize::MAX {
                        comp[g] = c;
                        stack.push(g);
                    }
                }
            }
        }
        sizes.push(size);
    }
    let best = (0..sizes.len()).max_by_key(|&c| (sizes[c], usize::MAX - c)).unwrap();
    tris.iter().zip(&comp).filter(|(_, &c)| c == best).map(|(t, _)| *t).collect()
}

/// Drops the smaller fans at vertices whose incident triangles form more than
/// one edge-connected fan. `None` when nothing needed fixing.
fn pinch_repair(tris: &[Tri]) -> Option<Vec<Tri>> {
    let mut at: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (f, t) in tris.iter().enumerate() {
        for &v in t {
            at.entry(v).or_default().push(f);
        }
    }
    let mut drop = vec![false; tris.len()];
    let mut changed = false;
    for (v, fs) in &at {
        // group faces at v that share an edge through v
        let mut group: Vec<usize> = (0..fs.len()).collect();
        for a in 0..fs.len() {
            for b in a + 1..fs.len() {
                let shared = tris[fs[a]].iter().filter(|x| *x != v && tris[fs[b]].contains(x)).count();
                if shared > 0 {
                    let (ra, rb) = (find(&mut group, a), find(&mut group, b));
                    group[ra] = rb;
                }
            }
        }
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for a in 0..fs.len() {
            *counts.entry(find(&mut group, a)).or_default() += 1;
        }
        if counts.len() > 1 {
            let keep = *counts.iter().max_by_key(|(r, c)| (**c, usize::MAX - **r)).unwrap().0;
            for a in 0..fs.len() {
                if find(&mut group, a) != keep {
                    drop[fs[a]] = true;
                    changed = true;
                }
            }
        }
    }
    changed.then(|| tris.iter().zip(&drop).filter(|(_, d)| !**d).map(|(t, _)| *t).collect())
}
