//! Riemann sphere points, SL(2,C) matrices and the Hermitian model of H³.

use std::f64::consts::FRAC_PI_2;
use std::ops::Mul;

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("triple contains coincident points")]
    DegenerateTriple,
    #[error("cross ratio of coincident points")]
    CoincidentPoints,
    #[error("horosphere radius must be positive, got {0}")]
    NonpositiveRadius(f64),
    #[error("point is not on the hyperboloid (det {det}, trace {trace})")]
    NotInHyperboloid { det: f64, trace: f64 },
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A point of the Riemann sphere as a homogeneous pair `(p, q)`, scaled so
/// that `max(|p|, |q|) = 1`. The point at infinity has `q = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    p: C64,
    q: C64,
}

impl SpherePoint {
    /// Returns `None` when both coordinates vanish.
    pub fn new(p: C64, q: C64) -> Option<Self> {
        let s = p.norm().max(q.norm());
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        Some(Self { p: p / s, q: q / s })
    }

    pub fn finite(z: C64) -> Self {
        Self::new(z, ONE).expect("finite point")
    }

    pub fn infinity() -> Self {
        Self { p: ONE, q: ZERO }
    }

    pub fn p(&self) -> C64 {
        self.p
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q == ZERO
    }

    /// Affine coordinate, `None` at infinity.
    pub fn affine(&self) -> Option<C64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.p / self.q)
        }
    }

    /// Chordal distance, in `[0, 1]`.
    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        let n1 = (self.p.norm_sqr() + self.q.norm_sqr()).sqrt();
        let n2 = (other.p.norm_sqr() + other.q.norm_sqr()).sqrt();
        det(self, other).norm() / (n1 * n2)
    }

    pub fn same_as(&self, other: &SpherePoint, tol: f64) -> bool {
        self.chordal(other) <= tol
    }

    /// Unit column vector `(p, q) / |(p, q)|`.
    pub(crate) fn unit(&self) -> (C64, C64) {
        let n = (self.p.norm_sqr() + self.q.norm_sqr()).sqrt();
        (self.p / n, self.q / n)
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        SpherePoint::finite(z)
    }
}

/// `det[(a.p, b.p), (a.q, b.q)]`, the homogeneous stand-in for `a - b`.
pub fn det(a: &SpherePoint, b: &SpherePoint) -> C64 {
    a.p * b.q - a.q * b.p
}

/// Matrix `[[a, b], [c, d]]` acting as `z ↦ (az+b)/(cz+d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;
    fn mul(self, o: MoebiusMap) -> MoebiusMap {
        MoebiusMap {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE };

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    /// Scales to determinant one and applies the sign rule.
    pub fn normalized(self) -> Self {
        let s = self.det().sqrt();
        let m = MoebiusMap { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s };
        m.canonical()
    }

    /// Picks the sign so the first nonzero entry, row-major, has argument in
    /// `(-π/2, π/2]`.
    pub fn canonical(self) -> Self {
        let scale = self.max_abs();
        for e in [self.a, self.b, self.c, self.d] {
            if e.norm() > 1e-14 * scale {
                let arg = e.arg();
                return if arg > -FRAC_PI_2 && arg <= FRAC_PI_2 { self } else { -self };
            }
        }
        self
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    /// Inverse for a unit-determinant matrix (the adjugate).
    pub fn inverse(&self) -> Self {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        MoebiusMap { a: self.a.conj(), b: self.c.conj(), c: self.b.conj(), d: self.d.conj() }
    }

    pub fn scale(&self, s: C64) -> Self {
        MoebiusMap { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Frobenius norm of `self - other`.
    pub fn dist(&self, other: &MoebiusMap) -> f64 {
        let d = *self - *other;
        d.entries().iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Distance to the nearer of `±other`.
    pub fn dist_projective(&self, other: &MoebiusMap) -> f64 {
        self.dist(other).min(self.dist(&-*other))
    }

    pub fn apply(&self, z: &SpherePoint) -> SpherePoint {
        let (p, q) = self.apply_vec(z.p, z.q);
        SpherePoint::new(p, q).expect("invertible map")
    }

    pub fn apply_vec(&self, p: C64, q: C64) -> (C64, C64) {
        (self.a * p + self.b * q, self.c * p + self.d * q)
    }

    /// Rayleigh quotient on the direction of `z`; the eigenvalue when `z` is
    /// a fixed point.
    pub fn eigenvalue_at(&self, z: &SpherePoint) -> C64 {
        let (p, q) = z.unit();
        let (tp, tq) = self.apply_vec(p, q);
        tp * p.conj() + tq * q.conj()
    }

    /// `A V A*`.
    pub fn act(&self, v: &HermitianMatrix) -> HermitianMatrix {
        let m = *self * v.as_matrix() * self.adjoint();
        HermitianMatrix::from_matrix(&m)
    }

    /// `A A*`, the image of the ball center.
    pub fn hermitian_square(&self) -> HermitianMatrix {
        HermitianMatrix::from_matrix(&(*self * self.adjoint()))
    }
}

impl std::ops::Neg for MoebiusMap {
    type Output = MoebiusMap;
    fn neg(self) -> MoebiusMap {
        MoebiusMap { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl std::ops::Sub for MoebiusMap {
    type Output = MoebiusMap;
    fn sub(self, o: MoebiusMap) -> MoebiusMap {
        MoebiusMap { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c, d: self.d - o.d }
    }
}

/// Matrix sending `z1, z2, z3` to `0, 1, ∞`, unnormalized.
fn to_standard(z1: &SpherePoint, z2: &SpherePoint, z3: &SpherePoint) -> MoebiusMap {
    let d23 = det(z2, z3);
    let d21 = det(z2, z1);
    MoebiusMap {
        a: z1.q * d23,
        b: -z1.p * d23,
        c: z3.q * d21,
        d: -z3.p * d21,
    }
}

fn distinct(z: [&SpherePoint; 3]) -> bool {
    const TOL: f64 = 1e-14;
    z[0].chordal(z[1]) > TOL && z[1].chordal(z[2]) > TOL && z[0].chordal(z[2]) > TOL
}

/// The Möbius map sending `zᵢ` to `wᵢ`, with determinant one and canonical sign.
pub fn mobius_from_triples(
    z: [SpherePoint; 3],
    w: [SpherePoint; 3],
) -> Result<MoebiusMap, MoebiusError> {
    if !distinct([&z[0], &z[1], &z[2]]) || !distinct([&w[0], &w[1], &w[2]]) {
        return Err(MoebiusError::DegenerateTriple);
    }
    let mz = to_standard(&z[0], &z[1], &z[2]);
    let mw = to_standard(&w[0], &w[1], &w[2]);
    // mw⁻¹ up to scale is its adjugate.
    Ok((mw.inverse() * mz).normalized())
}

/// `-[(zᵢ - z_k)(z_j - z_l)] / [(zᵢ - z_l)(z_j - z_k)]`.
pub fn edge_cross_ratio(
    zk: &SpherePoint,
    zi: &SpherePoint,
    zl: &SpherePoint,
    zj: &SpherePoint,
) -> Result<C64, MoebiusError> {
    let num = det(zk, zi) * det(zl, zj);
    let den = det(zi, zl) * det(zj, zk);
    let tol = 1e-15;
    if den.norm() <= tol || num.norm() <= tol {
        return Err(MoebiusError::CoincidentPoints);
    }
    Ok(-num / den)
}

/// Hermitian matrix `[[a, b], [conj b, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrix {
    pub a: f64,
    pub b: C64,
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermitianClass {
    Hyperboloid,
    LightCone,
    General,
}

impl HermitianMatrix {
    pub const IDENTITY: HermitianMatrix = HermitianMatrix { a: 1.0, b: ZERO, d: 1.0 };

    pub fn new(a: f64, b: C64, d: f64) -> Self {
        Self { a, b, d }
    }

    /// Minkowski coordinates `(x₀, x₁, x₂, x₃)`.
    pub fn from_minkowski(x: [f64; 4]) -> Self {
        Self { a: x[0] + x[3], b: C64::new(x[1], x[2]), d: x[0] - x[3] }
    }

    pub fn minkowski(&self) -> [f64; 4] {
        [(self.a + self.d) / 2.0, self.b.re, self.b.im, (self.a - self.d) / 2.0]
    }

    /// Symmetrizes an arbitrary 2×2 matrix.
    pub fn from_matrix(m: &MoebiusMap) -> Self {
        Self { a: m.a.re, b: (m.b + m.c.conj()) * 0.5, d: m.d.re }
    }

    pub fn as_matrix(&self) -> MoebiusMap {
        MoebiusMap { a: C64::new(self.a, 0.0), b: self.b, c: self.b.conj(), d: C64::new(self.d, 0.0) }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b.norm_sqr()
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// `⟨U, V⟩ = -½ tr(U cof V)`, of signature `(-,+,+,+)`.
    pub fn inner(&self, v: &HermitianMatrix) -> f64 {
        -0.5 * (self.a * v.d + self.d * v.a - 2.0 * (self.b * v.b.conj()).re)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { a: self.a * s, b: self.b * s, d: self.d * s }
    }

    pub fn add(&self, o: &HermitianMatrix) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b, d: self.d + o.d }
    }

    pub fn classify(&self, tol: f64) -> HermitianClass {
        let det = self.det();
        // det rounds off at the scale of trace²
        let scale = (0.25 * self.trace().powi(2)).max(1.0);
        if self.trace() > 0.0 && det > 0.5 && (det - 1.0).abs() <= tol * scale {
            HermitianClass::Hyperboloid
        } else if self.trace() > 0.0 && det.abs() <= tol * self.trace().powi(2).max(1.0) {
            HermitianClass::LightCone
        } else {
            HermitianClass::General
        }
    }

    pub fn check_hyperboloid(&self) -> Result<(), MoebiusError> {
        if self.classify(1e-10) == HermitianClass::Hyperboloid {
            Ok(())
        } else {
            Err(MoebiusError::NotInHyperboloid { det: self.det(), trace: self.trace() })
        }
    }

    /// Principal square root of a positive definite matrix.
    pub fn sqrt_positive(&self) -> MoebiusMap {
        let s = self.det().max(0.0).sqrt();
        let t = (self.trace() + 2.0 * s).sqrt();
        MoebiusMap {
            a: C64::new((self.a + s) / t, 0.0),
            b: self.b / t,
            c: self.b.conj() / t,
            d: C64::new((self.d + s) / t, 0.0),
        }
    }

    pub fn max_abs_diff(&self, o: &HermitianMatrix) -> f64 {
        (self.a - o.a).abs().max((self.d - o.d).abs()).max((self.b - o.b).norm())
    }
}

/// Horosphere `{x : -⟨x, N⟩ = 1}` tangent to the sphere at infinity in `tangency`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Horosphere {
    pub tangency: SpherePoint,
    pub r: f64,
    pub n: HermitianMatrix,
}

/// `N_{z,r}`, written homogeneously so that `z = ∞` needs no special case.
pub fn horosphere(z: SpherePoint, r: f64) -> Result<Horosphere, MoebiusError> {
    if !(r > 0.0) {
        return Err(MoebiusError::NonpositiveRadius(r));
    }
    let (p, q) = (z.p, z.q);
    let s = 2.0 * r / (p.norm_sqr() + q.norm_sqr());
    let n = HermitianMatrix { a: s * p.norm_sqr(), b: p * q.conj() * s, d: s * q.norm_sqr() };
    Ok(Horosphere { tangency: z, r, n })
}

impl Horosphere {
    /// `-⟨x, N⟩ - 1`.
    pub fn residual(&self, x: &HermitianMatrix) -> f64 {
        -x.inner(&self.n) - 1.0
    }

    pub fn contains(&self, x: &HermitianMatrix, tol: f64) -> Result<(bool, f64), MoebiusError> {
        x.check_hyperboloid()?;
        let r = self.residual(x);
        Ok((r.abs() <= tol, r))
    }

    /// Image under an isometry.
    pub fn transformed(&self, m: &MoebiusMap) -> Horosphere {
        let n = m.act(&self.n);
        let z = m.apply(&self.tangency);
        Horosphere { tangency: z, r: n.trace() / 2.0, n }
    }

    /// The horosphere at signed distance `s` toward its tangency point.
    pub fn offset(&self, s: f64) -> Horosphere {
        let k = s.exp();
        Horosphere { tangency: self.tangency, r: self.r * k, n: self.n.scaled(k) }
    }

    /// The horosphere through `x` tangent at `z`.
    pub fn through(z: SpherePoint, x: &HermitianMatrix) -> Result<Horosphere, MoebiusError> {
        let unit = horosphere(z, 1.0)?;
        let v = -x.inner(&unit.n);
        horosphere(z, 1.0 / v)
    }
}

pub fn hyperbolic_distance(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64, MoebiusError> {
    x.check_hyperboloid()?;
    y.check_hyperboloid()?;
    // det(x − y) = 2 − 2 cosh d = −4 sinh²(d/2), free of cancellation as d → 0
    let diff = HermitianMatrix { a: x.a - y.a, b: x.b - y.b, d: x.d - y.d };
    Ok(2.0 * ((-diff.det()).max(0.0).sqrt() / 2.0).asinh())
}

pub fn to_poincare_ball(x: &HermitianMatrix) -> Result<[f64; 3], MoebiusError> {
    x.check_hyperboloid()?;
    let m = x.minkowski();
    let s = 1.0 + m[0];
    Ok([m[1] / s, m[2] / s, m[3] / s])
}

pub fn from_poincare_ball(b: [f64; 3]) -> HermitianMatrix {
    let s = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    let k = 1.0 / (1.0 - s);
    HermitianMatrix::from_minkowski([(1.0 + s) * k, 2.0 * b[0] * k, 2.0 * b[1] * k, 2.0 * b[2] * k])
}

/// Upper half-space coordinates `(w, t)` of a hyperboloid point, using
/// `X = (1/t) [[|w|² + t², w], [w̄, 1]]`.
pub fn to_upper_half_space(x: &HermitianMatrix) -> (C64, f64) {
    let t = 1.0 / x.d;
    (x.b * t, t)
}

pub fn from_upper_half_space(w: C64, t: f64) -> HermitianMatrix {
    HermitianMatrix { a: (w.norm_sqr() + t * t) / t, b: w / t, d: 1.0 / t }
}

/// Minkowski inner product on coordinate 4-vectors.
pub(crate) fn minkowski_dot(x: &[f64; 4], y: &[f64; 4]) -> f64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

/// A vector Minkowski-orthogonal to three given vectors.
pub(crate) fn minkowski_normal(u: &[f64; 4], v: &[f64; 4], w: &[f64; 4]) -> [f64; 4] {
    // Euclidean generalized cross product of the rows (ηu, ηv, ηw).
    let f = |x: &[f64; 4]| [-x[0], x[1], x[2], x[3]];
    let (a, b, c) = (f(u), f(v), f(w));
    let m3 = |i: usize, j: usize, k: usize| {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i])
            + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    [m3(1, 2, 3), -m3(0, 2, 3), m3(0, 1, 3), -m3(0, 1, 2)]
}
