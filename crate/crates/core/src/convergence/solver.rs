//! Discrete conformal solve: vertex scale factors `u` with prescribed boundary
//! values, Newton on the convex energy whose gradient is the angle defect.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::mesh::TriangulatedDisk;

/// Interior angles of the triangle with side lengths `a, b, c`, opposite each.
/// `None` if the triangle inequality fails.
pub fn triangle_angles(a: f64, b: f64, c: f64) -> Option<[f64; 3]> {
    let s = 0.5 * (a + b + c);
    let (sa, sb, sc) = (s - a, s - b, s - c);
    if sa <= 0.0 || sb <= 0.0 || sc <= 0.0 {
        return None;
    }
    // half-angle formulas stay accurate for needle triangles
    let half = |x: f64, y: f64, z: f64| 2.0 * ((y * z) / (s * x)).sqrt().atan();
    Some([half(sa, sb, sc), half(sb, sa, sc), half(sc, sa, sb)])
}

/// Conformal data on a fixed triangulation: base side lengths per face,
/// `l[f][m]` opposite corner `m`.
pub struct ConformalProblem<'a> {
    pub disk: &'a TriangulatedDisk,
    pub lengths: Vec<[f64; 3]>,
    /// Position of each interior vertex in the unknown vector.
    slot: Vec<Option<usize>>,
    free: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveFailure {
    Diverged { iterations: usize, residual: f64 },
    /// A face is not a Euclidean triangle at the starting scale factors.
    Infeasible(usize),
}

impl<'a> ConformalProblem<'a> {
    pub fn new(disk: &'a TriangulatedDisk, positions: &[C64]) -> Self {
        let lengths = disk
            .faces()
            .iter()
            .map(|t| {
                let p = t.map(|v| positions[v]);
                [(p[1] - p[2]).norm(), (p[2] - p[0]).norm(), (p[0] - p[1]).norm()]
            })
            .collect();
        let mut slot = vec![None; disk.n_vertices()];
        let free: Vec<usize> = disk.interior_vertices().collect();
        for (k, &v) in free.iter().enumerate() {
            slot[v] = Some(k);
        }
        Self { disk, lengths, slot, free }
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    fn scaled(&self, f: usize, u: &[f64]) -> [f64; 3] {
        let t = self.disk.faces()[f];
        let l = self.lengths[f];
        let e = |a: usize, b: usize| (0.5 * (u[t[a]] + u[t[b]])).exp();
        [l[0] * e(1, 2), l[1] * e(2, 0), l[2] * e(0, 1)]
    }

    pub fn angles(&self, u: &[f64]) -> Option<Vec<[f64; 3]>> {
        (0..self.disk.faces().len())
            .map(|f| {
                let [a, b, c] = self.scaled(f, u);
                triangle_angles(a, b, c)
            })
            .collect()
    }

    /// `Σθ − 2π` at each interior vertex.
    pub fn defects(&self, angles: &[[f64; 3]]) -> Vec<f64> {
        let mut g = vec![-2.0 * PI; self.free.len()];
        for (t, a) in self.disk.faces().iter().zip(angles) {
            for m in 0..3 {
                if let Some(k) = self.slot[t[m]] {
                    g[k] += a[m];
                }
            }
        }
        g
    }

    /// Cotangent Laplacian on the free vertices as row lists, with weights
    /// `½ cot` per adjacent corner.
    fn laplacian(&self, angles: &[[f64; 3]]) -> Vec<Vec<(usize, f64)>> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.free.len()];
        for (t, a) in self.disk.faces().iter().zip(angles) {
            for m in 0..3 {
                let (i, j) = (t[(m + 1) % 3], t[(m + 2) % 3]);
                let w = 0.5 / a[m].tan();
                if let Some(ki) = self.slot[i] {
                    rows[ki].push((ki, w));
                    if let Some(kj) = self.slot[j] {
                        rows[ki].push((kj, -w));
                    }
                }
                if let Some(kj) = self.slot[j] {
                    rows[kj].push((kj, w));
                    if let Some(ki) = self.slot[i] {
                        rows[kj].push((ki, -w));
                    }
                }
            }
        }
        for r in &mut rows {
            r.sort_unstable_by_key(|e| e.0);
            r.dedup_by(|a, b| {
                if a.0 == b.0 {
                    b.1 += a.1;
                    true
                } else {
                    false
                }
            });
        }
        rows
    }

    /// Solves for interior `u` with the boundary entries of `u` held fixed.
    pub fn solve(&self, u: &mut [f64], tol: f64, max_iter: usize) -> Result<usize, SolveFailure> {
        let mut angles = match self.angles(u) {
            Some(a) => a,
            None => {
                let f = (0..self.disk.faces().len())
                    .find(|&f| {
                        let [a, b, c] = self.scaled(f, u);
                        triangle_angles(a, b, c).is_none()
                    })
                    .unwrap_or(0);
                return Err(SolveFailure::Infeasible(f));
            }
        };
        let mut g = self.defects(&angles);
        for it in 0..max_iter {
            let res = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if res <= tol {
                return Ok(it);
            }
            let lap = self.laplacian(&angles);
            let delta = conjugate_gradient(&lap, &g, 1e-15);
            let mut trial = u.to_vec();
            // slope of the energy along delta at step s, or None past the
            // feasible region
            let slope = |s: f64, trial: &mut Vec<f64>| -> Option<(f64, Vec<[f64; 3]>, Vec<f64>)> {
                for (k, &v) in self.free.iter().enumerate() {
                    trial[v] = u[v] + s * delta[k];
                }
                let a = self.angles(trial)?;
                let g = self.defects(&a);
                let d = -g.iter().zip(&delta).map(|(x, y)| x * y).sum::<f64>();
                Some((d, a, g))
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            let mut accepted = match slope(1.0, &mut trial) {
                Some((d, a, g)) if d <= 0.0 => Some((1.0, a, g)),
                _ => None,
            };
            if accepted.is_none() {
                let mut best = None;
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    match slope(mid, &mut trial) {
                        Some((d, a, g)) if d <= 0.0 => {
                            lo = mid;
                            best = Some((mid, a, g));
                        }
                        _ => hi = mid,
                    }
                    if hi - lo < 1e-3 * hi && best.is_some() {
                        break;
                    }
                }
                accepted = best;
            }
            let Some((s, a, gn)) = accepted else {
                return Err(SolveFailure::Diverged { iterations: it, residual: res });
            };
            for (k, &v) in self.free.iter().enumerate() {
                u[v] += s * delta[k];
            }
            angles = a;
            g = gn;
        }
        let res = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if res <= tol {
            Ok(max_iter)
        } else {
            Err(SolveFailure::Diverged { iterations: max_iter, residual: res })
        }
    }

    /// Lays the triangles out in the plane by breadth-first development from
    /// face 0, with the scaled lengths and angles of `u`.
    pub fn layout(&self, u: &[f64]) -> Option<Vec<C64>> {
        let disk = self.disk;
        let angles = self.angles(u)?;
        let faces = disk.faces();
        let mut pos: Vec<Option<C64>> = vec![None; disk.n_vertices()];
        let t0 = faces[0];
        let l0 = self.scaled(0, u);
        pos[t0[0]] = Some(C64::new(0.0, 0.0));
        pos[t0[1]] = Some(C64::new(l0[2], 0.0));
        pos[t0[2]] = Some(C64::from_polar(l0[1], angles[0][0]));
        let mut done = vec![false; faces.len()];
        done[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            for &(g, _) in disk.dual_neighbors(f) {
                if done[g] {
                    continue;
                }
                done[g] = true;
                let t = faces[g];
                let l = self.scaled(g, u);
                for m in 0..3 {
                    let (a, b, c) = (t[m], t[(m + 1) % 3], t[(m + 2) % 3]);
                    if let (Some(pa), Some(pb)) = (pos[a], pos[b]) {
                        if pos[c].is_none() {
                            // side a–c is opposite corner m+1
                            let dir = (pb - pa) / (pb - pa).norm();
                            pos[c] = Some(pa + dir * C64::from_polar(l[(m + 1) % 3], angles[g][m]));
                        }
                        break;
                    }
                }
                queue.push_back(g);
            }
        }
        pos.into_iter().collect()
    }
}

fn apply(rows: &[Vec<(usize, f64)>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| r.iter().map(|&(j, w)| w * x[j]).sum()).collect()
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite sparse matrix.
pub fn conjugate_gradient(rows: &[Vec<(usize, f64)>], b: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = b.len();
    let diag: Vec<f64> =
        rows.iter().enumerate().map(|(i, r)| r.iter().find(|e| e.0 == i).map_or(1.0, |e| e.1)).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return x;
    }
    for _ in 0..(10 * n + 100) {
        let ap = apply(rows, &p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if r.iter().map(|v| v * v).sum::<f64>().sqrt() <= rel_tol * bnorm {
            break;
        }
        z = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{lattice_subcomplex, LatticeSpec, Region};

    #[test]
    fn angles_sum_to_pi() {
        let a = triangle_angles(3.0, 4.0, 5.0).unwrap();
        assert!((a.iter().sum::<f64>() - PI).abs() < 1e-15);
        assert!((a[2] - PI / 2.0).abs() < 1e-15);
        assert!(triangle_angles(1.0, 1.0, 2.5).is_none());
    }

    #[test]
    fn laplacian_is_minus_jacobian() {
        let p = lattice_subcomplex(&LatticeSpec::equilateral(0.25, Region::unit_square())).unwrap();
        let pr = ConformalProblem::new(&p.disk, &p.positions);
        let u: Vec<f64> = p.positions.iter().map(|z| 0.3 * z.re - 0.2 * z.im * z.im).collect();
        let lap = pr.laplacian(&pr.angles(&u).unwrap());
        let g0 = pr.defects(&pr.angles(&u).unwrap());
        let h = 1e-6;
        for (k, &v) in pr.free.iter().enumerate().take(5) {
            let mut up = u.clone();
            up[v] += h;
            let mut dn = u.clone();
            dn[v] -= h;
            let gp = pr.defects(&pr.angles(&up).unwrap());
            let gm = pr.defects(&pr.angles(&dn).unwrap());
            for i in 0..g0.len() {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                let l = lap[i].iter().find(|e| e.0 == k).map_or(0.0, |e| e.1);
                assert!((fd + l).abs() < 1e-7, "row {i} col {k}: {fd} vs {l}");
            }
        }
    }

    #[test]
    fn zero_factors_lay_out_the_lattice() {
        let p = lattice_subcomplex(&LatticeSpec::equilateral(0.2, Region::unit_square())).unwrap();
        let pr = ConformalProblem::new(&p.disk, &p.positions);
        let mut u = vec![0.0; p.positions.len()];
        assert_eq!(pr.solve(&mut u, 1e-12, 20), Ok(0));
        let w = pr.layout(&u).unwrap();
        let (a0, b0) = (p.positions[p.disk.faces()[0][0]], p.positions[p.disk.faces()[0][1]]);
        let rot = (b0 - a0) / (b0 - a0).norm();
        for (x, y) in w.iter().zip(&p.positions) {
            assert!((x * rot + a0 - y).norm() < 1e-12);
        }
    }
}
