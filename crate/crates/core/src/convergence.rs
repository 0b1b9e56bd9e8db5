//! Lattice patterns from smooth maps, discrete Schwarzians, and empirical
//! convergence of discrete frames and CMC-1 nets to their smooth limits.

pub mod solver;

use std::io::Write;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::cmc1::{build_cmc1, Cmc1Error};
use crate::mesh::{lattice_subcomplex, LatticePatch, LatticeSpec, MeshError, Region};
use crate::moebius::{hyperbolic_distance, MoebiusError, MoebiusMap};
use crate::osculating::smooth::{smooth_osculating, smooth_pair_frame, SmoothMap, SqrtBranch};
use crate::osculating::{coherent_lift, osculating_frame, MoebiusFrame, OsculatingError};
use crate::pattern::{cross_ratios_of, CirclePattern, CrossRatioSystem, PatternError};
use solver::{ConformalProblem, SolveFailure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvergenceError {
    #[error("face {0} flips orientation")]
    FoldOver(usize),
    #[error("Newton solve stalled after {iterations} steps (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("solved pattern is not Delaunay at edge {edge} (Arg X = {arg:.4})")]
    DelaunayViolated { edge: usize, arg: f64 },
    #[error("cross ratios are not shear matched (|Re log| = {0:.3e})")]
    NotShearMatched(f64),
    #[error("derivative order exceeds the available interior depth")]
    DomainExhausted,
    #[error("derivative vanishes near {0}")]
    CriticalPoint(C64),
    #[error("Schwarzians agree near {0}: the pair has an umbilic")]
    Umbilic(C64),
    #[error("epsilon list must be strictly decreasing and positive")]
    BadEpsilons,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Osculating(#[from] OsculatingError),
    #[error(transparent)]
    Cmc1(#[from] Cmc1Error),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

/// Sample grid over the bounding box of `region`, used for the hypothesis checks.
fn sample_grid(region: &Region) -> Vec<C64> {
    let b = match region {
        Region::Rect { x0, x1, y0, y1 } => [*x0, *x1, *y0, *y1],
        Region::Predicate { bounds, .. } => *bounds,
    };
    let n = 24;
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let z = C64::new(b[0] + (b[1] - b[0]) * i as f64 / n as f64, b[2] + (b[3] - b[2]) * j as f64 / n as f64);
            if region.contains(z) {
                out.push(z);
            }
        }
    }
    out
}

/// A locally univalent map on a compact set `K`.
#[derive(Clone, Debug)]
pub struct SmoothData {
    pub h: SmoothMap,
    pub region: Region,
    /// Where square-root branches of `h′` are seeded.
    pub base: C64,
}

impl SmoothData {
    pub fn new(h: SmoothMap, region: Region, base: C64) -> Result<Self, ConvergenceError> {
        for z in sample_grid(&region) {
            if h.jet(z)[1].norm() < 1e-8 {
                return Err(ConvergenceError::CriticalPoint(z));
            }
        }
        Ok(Self { h, region, base })
    }
}

/// A pair `(g, g̃)` defining the smooth CMC-1 surface `f = A Aᴴ`,
/// `A = A_g̃ A_g⁻¹`.
#[derive(Clone, Debug)]
pub struct PairData {
    pub g: SmoothMap,
    pub gt: SmoothMap,
    pub region: Region,
    pub base: C64,
}

impl PairData {
    pub fn new(g: SmoothMap, gt: SmoothMap, region: Region, base: C64) -> Result<Self, ConvergenceError> {
        for z in sample_grid(&region) {
            if g.jet(z)[1].norm() < 1e-8 || gt.jet(z)[1].norm() < 1e-8 {
                return Err(ConvergenceError::CriticalPoint(z));
            }
            if (g.schwarzian(z) - gt.schwarzian(z)).norm() < 1e-8 {
                return Err(ConvergenceError::Umbilic(z));
            }
        }
        Ok(Self { g, gt, region, base })
    }

    /// Hopf differential coefficient `Q = (S_g − S_g̃)/2`.
    pub fn hopf(&self, z: C64) -> C64 {
        (self.g.schwarzian(z) - self.gt.schwarzian(z)) / 2.0
    }

    fn side(&self, h: SmoothMap) -> SmoothData {
        SmoothData { h, region: self.region.clone(), base: self.base }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// `z̃_v = h(v)` at the lattice points.
    Sampled,
    /// The Delaunay pattern with the lattice's shear coordinates.
    Solved,
}

/// A pattern over a lattice patch.
#[derive(Clone, Debug)]
pub struct LatticePattern {
    pub patch: LatticePatch,
    pub pattern: CirclePattern,
    /// Scale factors of the solve, if any.
    pub u: Option<Vec<f64>>,
    pub iterations: usize,
    /// Largest `|Σθ − 2π|` over interior vertices.
    pub angle_residual: f64,
    /// `sup |z̃_v − h(v)|` over vertices.
    pub vertex_error: f64,
}

impl LatticePattern {
    pub fn lattice(&self) -> CirclePattern {
        CirclePattern::from_affine(self.patch.disk.clone(), &self.patch.positions).expect("lattice faces are nondegenerate")
    }
}

fn with_region(spec: &LatticeSpec, region: &Region) -> LatticeSpec {
    LatticeSpec { region: region.clone(), ..spec.clone() }
}

fn vertex_error(w: &[C64], positions: &[C64], h: &SmoothMap) -> f64 {
    w.iter().zip(positions).map(|(a, &v)| (a - h.value(v)).norm()).fold(0.0, f64::max)
}

/// Samples `h` at the lattice points of `K`.
pub fn sampled_pattern(data: &SmoothData, spec: &LatticeSpec) -> Result<LatticePattern, ConvergenceError> {
    let patch = lattice_subcomplex(&with_region(spec, &data.region))?;
    let w: Vec<C64> = patch.positions.iter().map(|&v| data.h.value(v)).collect();
    let pattern = CirclePattern::from_affine(patch.disk.clone(), &w)?;
    if let Some(&f) = pattern.orientation_flips().first() {
        return Err(ConvergenceError::FoldOver(f));
    }
    Ok(LatticePattern { vertex_error: 0.0, patch, pattern, u: None, iterations: 0, angle_residual: 0.0 })
}

/// Tolerance on the interior angle defects of the solve.
pub const SOLVE_TOL: f64 = 1e-12;

/// The pattern with the lattice's shear coordinates and scale factors
/// `u = log|h′|` on the boundary, placed by the least-squares similarity
/// closest to `h`.
pub fn shear_preserving_solve(spec: &LatticeSpec, data: &SmoothData) -> Result<LatticePattern, ConvergenceError> {
    let patch = lattice_subcomplex(&with_region(spec, &data.region))?;
    let problem = ConformalProblem::new(&patch.disk, &patch.positions);
    let mut u: Vec<f64> = patch.positions.iter().map(|&v| data.h.jet(v)[1].norm().ln()).collect();
    for v in patch.disk.interior_vertices() {
        // interior values only seed Newton
        u[v] = u[v].clamp(-50.0, 50.0);
    }
    let iterations = match problem.solve(&mut u, SOLVE_TOL, 60) {
        Ok(n) => n,
        Err(SolveFailure::Diverged { iterations, residual }) => {
            return Err(ConvergenceError::NewtonDiverged { iterations, residual })
        }
        Err(SolveFailure::Infeasible(_)) => {
            return Err(ConvergenceError::NewtonDiverged { iterations: 0, residual: f64::INFINITY })
        }
    };
    let angles = problem.angles(&u).ok_or(ConvergenceError::NewtonDiverged { iterations, residual: f64::NAN })?;
    let angle_residual = problem.defects(&angles).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let laid = problem.layout(&u).ok_or(ConvergenceError::NewtonDiverged { iterations, residual: f64::NAN })?;
    let target: Vec<C64> = patch.positions.iter().map(|&v| data.h.value(v)).collect();
    let (a, b) = similarity_fit(&laid, &target);
    let w: Vec<C64> = laid.iter().map(|&x| a * x + b).collect();
    let pattern = CirclePattern::from_affine(patch.disk.clone(), &w)?;
    let xs = cross_ratios_of(&pattern)?;
    if let Some(&e) = xs.non_delaunay().first() {
        return Err(ConvergenceError::DelaunayViolated { edge: e, arg: xs.arg(e) });
    }
    let vertex_error = vertex_error(&w, &patch.positions, &data.h);
    Ok(LatticePattern { patch, pattern, u: Some(u), iterations, angle_residual, vertex_error })
}

pub fn lattice_pattern(data: &SmoothData, spec: &LatticeSpec, pipeline: Pipeline) -> Result<LatticePattern, ConvergenceError> {
    match pipeline {
        Pipeline::Sampled => sampled_pattern(data, spec),
        Pipeline::Solved => shear_preserving_solve(spec, data),
    }
}

/// `(a, b)` minimising `Σ |a xᵥ + b − yᵥ|²`.
pub fn similarity_fit(x: &[C64], y: &[C64]) -> (C64, C64) {
    let n = x.len() as f64;
    let xm: C64 = x.iter().sum::<C64>() / n;
    let ym: C64 = y.iter().sum::<C64>() / n;
    let num: C64 = x.iter().zip(y).map(|(a, b)| (a - xm).conj() * (b - ym)).sum();
    let den: f64 = x.iter().map(|a| (a - xm).norm_sqr()).sum();
    let a = num / den;
    (a, ym - a * xm)
}

/// The edge from `v` in lattice direction `k`, if interior.
fn lattice_edge(patch: &LatticePatch, v: usize, k: usize) -> Option<usize> {
    patch.step(v, k).and_then(|w| patch.disk.edge_between(v, w))
}

/// Largest `|Re log(X̃/X)|` tolerated by [`discrete_schwarzian`].
pub const SHEAR_TOL: f64 = 1e-8;

/// `s_k(v) = Im log(X̃(e)/X(e)) / ε²` on the edge `e = (v, τ_k v)`; `None`
/// where that edge is not interior.
pub fn discrete_schwarzian(
    x: &CrossRatioSystem,
    xt: &CrossRatioSystem,
    patch: &LatticePatch,
    k: usize,
) -> Result<Vec<Option<f64>>, ConvergenceError> {
    let eps2 = patch.spec.eps * patch.spec.eps;
    (0..patch.disk.n_vertices())
        .map(|v| match lattice_edge(patch, v, k) {
            None => Ok(None),
            Some(e) => {
                let l = (xt.x[e] / x.x[e]).ln();
                if l.re.abs() > SHEAR_TOL {
                    Err(ConvergenceError::NotShearMatched(l.re.abs()))
                } else {
                    Ok(Some(l.im / eps2))
                }
            }
        })
        .collect()
}

/// `(L_k/2) Re(ω_{k+1} ω_{k+2} S)`, the limit of `s_k` where `S_h = S`.
pub fn schwarzian_limit(spec: &LatticeSpec, k: usize, s: C64) -> f64 {
    let next = |j: usize| (j - 1) % 6 + 1;
    0.5 * spec.length(k) * (spec.omega(next(k + 1)) * spec.omega(next(k + 2)) * s).re
}

/// `L_k Re(ω_{k+1} ω_{k+2} Q)`, the limit of `ℓ_k tan(α_k/2) / ε²`.
pub fn hopf_limit(spec: &LatticeSpec, k: usize, q: C64) -> f64 {
    2.0 * schwarzian_limit(spec, k, q)
}

/// `order`-fold difference quotient `(η(τ_k v) − η(v)) / (ε L_k)`; defined
/// where every point it touches is.
pub fn discrete_derivative(
    field: &[Option<C64>],
    patch: &LatticePatch,
    k: usize,
    order: usize,
) -> Result<Vec<Option<C64>>, ConvergenceError> {
    let h = patch.spec.eps * patch.spec.length(k);
    let mut cur = field.to_vec();
    for _ in 0..order {
        let next: Vec<Option<C64>> = (0..cur.len())
            .map(|v| {
                let w = patch.step(v, k)?;
                Some((cur[w]? - cur[v]?) / h)
            })
            .collect();
        if next.iter().all(Option::is_none) {
            return Err(ConvergenceError::DomainExhausted);
        }
        cur = next;
    }
    Ok(cur)
}

/// Errors at one lattice spacing. Columns not measured by a run are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub n_vertices: usize,
    /// `sup ‖A^(ε) − A_h‖` over faces, sign aligned.
    pub frame_error: Option<f64>,
    /// `sup d(f^(ε), f)` over dual vertices.
    pub surface_error: Option<f64>,
    /// `sup |s₁ − lim s₁|`.
    pub schwarzian_error: Option<f64>,
    /// `sup |ℓ₁ tan(α₁/2)/ε² − L₁ Re(ω₂ω₃Q)|`.
    pub hopf_error: Option<f64>,
    /// Mean of `ℓ₁ tan(α₁/2)/ε²` over direction-1 edges.
    pub hopf_mean: Option<f64>,
    pub vertex_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub label: String,
    pub rows: Vec<ConvergenceRow>,
}

/// Least-squares slope of `log err` against `log ε`.
pub fn fitted_order(eps: &[f64], err: &[f64]) -> f64 {
    let n = eps.len() as f64;
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    num / den
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    Frame,
    Surface,
    Schwarzian,
    Hopf,
    Vertex,
}

impl ConvergenceReport {
    pub fn column(&self, c: Column) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| match c {
                Column::Frame => r.frame_error,
                Column::Surface => r.surface_error,
                Column::Schwarzian => r.schwarzian_error,
                Column::Hopf => r.hopf_error,
                Column::Vertex => Some(r.vertex_error),
            })
            .collect()
    }

    pub fn eps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.eps).collect()
    }

    /// Fitted order of a column over all rows.
    pub fn order(&self, c: Column) -> Option<f64> {
        let err = self.column(c)?;
        (err.len() >= 2 && err.iter().all(|&e| e > 0.0)).then(|| fitted_order(&self.eps(), &err))
    }

    /// Orders between consecutive rows.
    pub fn pairwise_orders(&self, c: Column) -> Option<Vec<f64>> {
        let err = self.column(c)?;
        let eps = self.eps();
        Some((1..err.len()).map(|i| (err[i - 1] / err[i]).ln() / (eps[i - 1] / eps[i]).ln()).collect())
    }

    pub fn decreasing(&self, c: Column) -> bool {
        self.column(c).is_some_and(|e| e.windows(2).all(|w| w[1] < w[0]))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "eps", "vertices", "frame_err", "surf_err", "s1_err", "hopf_err", "vertex_err", "frame_order", "surf_order",
            "s1_order", "hopf_order",
        ])?;
        let cols = [Column::Frame, Column::Surface, Column::Schwarzian, Column::Hopf];
        let orders: Vec<Option<Vec<f64>>> = cols.iter().map(|&c| self.pairwise_orders(c)).collect();
        let fmt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.12e}"));
        for (i, r) in self.rows.iter().enumerate() {
            let mut rec = vec![
                format!("{}", r.eps),
                r.n_vertices.to_string(),
                fmt(r.frame_error),
                fmt(r.surface_error),
                fmt(r.schwarzian_error),
                fmt(r.hopf_error),
                fmt(Some(r.vertex_error)),
            ];
            for o in &orders {
                rec.push(match (i, o) {
                    (0, _) | (_, None) => String::new(),
                    (i, Some(o)) => format!("{:.6}", o[i - 1]),
                });
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_eps(eps: &[f64]) -> Result<(), ConvergenceError> {
    if eps.is_empty() || eps.iter().any(|&e| e <= 0.0) || eps.windows(2).any(|w| w[1] >= w[0]) {
        Err(ConvergenceError::BadEpsilons)
    } else {
        Ok(())
    }
}

/// Runs `f` once per ε on its own thread, keeping the order.
fn per_eps<T: Send>(
    eps: &[f64],
    f: impl Fn(f64) -> Result<T, ConvergenceError> + Sync,
) -> Result<Vec<T>, ConvergenceError> {
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = eps.iter().map(|&e| s.spawn(move || f(e))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// `min(‖A − B‖, ‖A + B‖)` in the max-entry norm.
fn aligned_distance(a: &MoebiusMap, b: &MoebiusMap) -> f64 {
    a.dist(b).min(a.dist(&-*b))
}

fn frame_for(z: &CirclePattern, zt: &CirclePattern) -> Result<MoebiusFrame, ConvergenceError> {
    let frame = osculating_frame(z, zt)?;
    // raw samples need not be Delaunay; the comparison aligns signs per face
    Ok(coherent_lift(&frame, z, zt).unwrap_or(frame))
}

fn schwarzian_sup(
    lp: &LatticePattern,
    h: &SmoothMap,
    k: usize,
) -> Result<f64, ConvergenceError> {
    let x = cross_ratios_of(&lp.lattice())?;
    let xt = cross_ratios_of(&lp.pattern)?;
    let s = discrete_schwarzian(&x, &xt, &lp.patch, k)?;
    Ok(s.iter()
        .enumerate()
        .filter_map(|(v, sv)| sv.map(|sv| (sv - schwarzian_limit(&lp.patch.spec, k, h.schwarzian(lp.patch.positions[v]))).abs()))
        .fold(0.0, f64::max))
}

/// Discrete osculating frames of `lattice → h^(ε)` against `A_h` at face
/// barycentres; for the solved pipeline also the direction-1 Schwarzian.
pub fn frame_convergence(
    data: &SmoothData,
    spec: &LatticeSpec,
    eps: &[f64],
    pipeline: Pipeline,
) -> Result<ConvergenceReport, ConvergenceError> {
    check_eps(eps)?;
    let rows = per_eps(eps, |e| {
        let lp = lattice_pattern(data, &LatticeSpec { eps: e, ..spec.clone() }, pipeline)?;
        let frame = frame_for(&lp.lattice(), &lp.pattern)?;
        let mut branch = SqrtBranch::new();
        branch.sqrt(data.h.jet(data.base)[1]);
        let mut err: f64 = 0.0;
        for (f, a) in frame.maps.iter().enumerate() {
            let b = lp.patch.barycenter(f);
            let smooth = smooth_osculating(&data.h, b, &mut branch.clone())?;
            err = err.max(aligned_distance(a, &smooth));
        }
        let schwarzian_error = match pipeline {
            Pipeline::Solved => Some(schwarzian_sup(&lp, &data.h, 1)?),
            Pipeline::Sampled => None,
        };
        Ok(ConvergenceRow {
            eps: e,
            n_vertices: lp.patch.disk.n_vertices(),
            frame_error: Some(err),
            surface_error: None,
            schwarzian_error,
            hopf_error: None,
            hopf_mean: None,
            vertex_error: lp.vertex_error,
        })
    })?;
    Ok(ConvergenceReport { label: format!("frame {}", data.h.name()), rows })
}

/// Discrete CMC-1 nets from the solved pair against `f = A Aᴴ` at face
/// barycentres, plus the direction-1 Hopf check.
pub fn surface_convergence(
    pair: &PairData,
    spec: &LatticeSpec,
    eps: &[f64],
) -> Result<ConvergenceReport, ConvergenceError> {
    check_eps(eps)?;
    let rows = per_eps(eps, |e| {
        let s = LatticeSpec { eps: e, ..spec.clone() };
        let lg = shear_preserving_solve(&s, &pair.side(pair.g.clone()))?;
        let lgt = shear_preserving_solve(&s, &pair.side(pair.gt.clone()))?;
        let net = build_cmc1(&lg.pattern, &lgt.pattern)?;
        let patch = &lg.patch;
        let mut bg = SqrtBranch::new();
        let mut bgt = SqrtBranch::new();
        bg.sqrt(pair.g.jet(pair.base)[1]);
        bgt.sqrt(pair.gt.jet(pair.base)[1]);
        let mut surface: f64 = 0.0;
        for (f, x) in net.f.iter().enumerate() {
            let b = patch.barycenter(f);
            let a = smooth_pair_frame(&pair.g, &pair.gt, b, &mut bg.clone(), &mut bgt.clone())?;
            surface = surface.max(hyperbolic_distance(x, &a.hermitian_square())?);
        }
        let (mut hopf, mut sum, mut count): (f64, f64, usize) = (0.0, 0.0, 0);
        for v in 0..patch.disk.n_vertices() {
            if let Some(edge) = lattice_edge(patch, v, 1) {
                let w = patch.step(v, 1).expect("edge has an end");
                let mid = (patch.positions[v] + patch.positions[w]) / 2.0;
                let val = net.measurement.torsion(edge) / (e * e);
                hopf = hopf.max((val - hopf_limit(&s, 1, pair.hopf(mid))).abs());
                sum += val;
                count += 1;
            }
        }
        Ok(ConvergenceRow {
            eps: e,
            n_vertices: patch.disk.n_vertices(),
            frame_error: None,
            surface_error: Some(surface),
            schwarzian_error: None,
            hopf_error: Some(hopf),
            hopf_mean: (count > 0).then(|| sum / count as f64),
            vertex_error: lg.vertex_error.max(lgt.vertex_error),
        })
    })?;
    Ok(ConvergenceReport { label: format!("surface {}/{}", pair.g.name(), pair.gt.name()), rows })
}

/// The named smooth cases of the command line: map and compact set.
pub fn named_case(name: &str) -> Option<SmoothData> {
    let unit = Region::unit_square();
    let (h, region, base) = match name {
        "exp" => (SmoothMap::Exp, unit, C64::new(0.5, 0.5)),
        "square" => (SmoothMap::Power(2), Region::Rect { x0: 0.5, x1: 1.5, y0: 0.5, y1: 1.5 }, C64::new(1.0, 1.0)),
        "moebius" => {
            // 1/(z − c) with the pole at c = −1 − i
            let m = MoebiusMap::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 1.0));
            (SmoothMap::Mobius(m), unit, C64::new(0.5, 0.5))
        }
        _ => return None,
    };
    SmoothData::new(h, region, base).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn differences_of_polynomials() {
        let spec = LatticeSpec::equilateral(0.1, Region::unit_square());
        let patch = lattice_subcomplex(&spec).unwrap();
        let (a, b) = (c(0.7, -0.3), c(0.2, 1.1));
        let lin: Vec<Option<C64>> = patch.positions.iter().map(|z| Some(a * z + b)).collect();
        for k in 1..=6 {
            let step = spec.omega(k) * spec.length(k) * spec.eps;
            let h = spec.eps * spec.length(k);
            let d1 = discrete_derivative(&lin, &patch, k, 1).unwrap();
            assert!(d1.iter().flatten().all(|d| (d - a * step / h).norm() < 1e-12));
            let quad: Vec<Option<C64>> = patch.positions.iter().map(|z| Some(z * z)).collect();
            let d2 = discrete_derivative(&quad, &patch, k, 2).unwrap();
            assert!(d2.iter().flatten().count() > 0);
            assert!(d2.iter().flatten().all(|d| (d - 2.0 * (step / h).powi(2)).norm() < 1e-9));
        }
    }

    #[test]
    fn identity_solves_to_zero_factors() {
        let data = SmoothData::new(SmoothMap::Identity, Region::unit_square(), c(0.5, 0.5)).unwrap();
        let lp = shear_preserving_solve(&LatticeSpec::equilateral(0.1, Region::unit_square()), &data).unwrap();
        assert!(lp.u.as_ref().unwrap().iter().all(|u| u.abs() < 1e-12));
        assert!(lp.vertex_error < 1e-12);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let data = named_case("exp").unwrap();
        assert!(sampled_pattern(&data, &LatticeSpec::equilateral(10.0, Region::unit_square())).is_err());
        assert!(matches!(
            frame_convergence(&data, &LatticeSpec::equilateral(0.1, Region::unit_square()), &[0.05, 0.1], Pipeline::Sampled),
            Err(ConvergenceError::BadEpsilons)
        ));
    }

    #[test]
    fn moebius_data_has_exact_frames() {
        let data = named_case("moebius").unwrap();
        let spec = LatticeSpec::equilateral(0.1, data.region.clone());
        let rep = frame_convergence(&data, &spec, &[0.2, 0.1], Pipeline::Sampled).unwrap();
        let errs = rep.column(Column::Frame).unwrap();
        assert!(errs.iter().all(|e| *e <= 1e-10), "{errs:?}");
    }

    #[test]
    fn coarse_power_folds_over() {
        let r = Region::Rect { x0: 0.2, x1: 2.0, y0: 0.2, y1: 2.0 };
        let data = SmoothData::new(SmoothMap::Power(6), r.clone(), c(0.5, 0.5)).unwrap();
        assert!(matches!(sampled_pattern(&data, &LatticeSpec::equilateral(0.5, r)), Err(ConvergenceError::FoldOver(_))));
    }

    #[test]
    fn fitted_order_of_a_power_law() {
        let eps = [0.1, 0.05, 0.025];
        let err: Vec<f64> = eps.iter().map(|e| 3.0 * e * e).collect();
        assert!((fitted_order(&eps, &err) - 2.0).abs() < 1e-12);
    }
}
