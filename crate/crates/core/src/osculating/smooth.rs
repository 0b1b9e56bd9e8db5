//! Smooth holomorphic maps with their 3-jets, and their osculating Möbius maps.

use num_complex::Complex64 as C64;

use super::OsculatingError;
use crate::moebius::MoebiusMap;

/// A holomorphic function known in closed form up to third derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothMap {
    Identity,
    Exp,
    /// `z ↦ zⁿ`
    Power(i32),
    Mobius(MoebiusMap),
    /// `outer ∘ inner`
    Compose(Box<SmoothMap>, Box<SmoothMap>),
}

/// `(h, h′, h″, h‴)` at a point.
pub type Jet = [C64; 4];

impl SmoothMap {
    pub fn compose(outer: SmoothMap, inner: SmoothMap) -> SmoothMap {
        SmoothMap::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn name(&self) -> String {
        match self {
            SmoothMap::Identity => "id".into(),
            SmoothMap::Exp => "exp".into(),
            SmoothMap::Power(n) => format!("z^{n}"),
            SmoothMap::Mobius(_) => "moebius".into(),
            SmoothMap::Compose(a, b) => format!("{}o{}", a.name(), b.name()),
        }
    }

    pub fn jet(&self, z: C64) -> Jet {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match self {
            SmoothMap::Identity => [z, one, zero, zero],
            SmoothMap::Exp => {
                let e = z.exp();
                [e, e, e, e]
            }
            SmoothMap::Power(n) => {
                let n = *n;
                let f = |k: i32| -> C64 {
                    // falling factorial n(n-1)...(n-k+1)
                    let c: f64 = (0..k).map(|i| (n - i) as f64).product();
                    if c == 0.0 {
                        zero
                    } else {
                        z.powi(n - k) * c
                    }
                };
                [f(0), f(1), f(2), f(3)]
            }
            SmoothMap::Mobius(m) => {
                let w = m.c * z + m.d;
                let det = m.det();
                [
                    (m.a * z + m.b) / w,
                    det / (w * w),
                    -2.0 * m.c * det / (w * w * w),
                    6.0 * m.c * m.c * det / (w * w * w * w),
                ]
            }
            SmoothMap::Compose(outer, inner) => {
                let [g, g1, g2, g3] = inner.jet(z);
                let [_, h1, h2, h3] = outer.jet(g);
                let h0 = outer.jet(g)[0];
                [
                    h0,
                    h1 * g1,
                    h2 * g1 * g1 + h1 * g2,
                    h3 * g1 * g1 * g1 + 3.0 * h2 * g1 * g2 + h1 * g3,
                ]
            }
        }
    }

    pub fn value(&self, z: C64) -> C64 {
        self.jet(z)[0]
    }

    /// `S_h = h‴/h′ − (3/2)(h″/h′)²`.
    pub fn schwarzian(&self, z: C64) -> C64 {
        let [_, h1, h2, h3] = self.jet(z);
        h3 / h1 - 1.5 * (h2 / h1) * (h2 / h1)
    }
}

/// Square-root branch carried along a path: each new root is the one nearer
/// the previous.
#[derive(Clone, Copy, Debug, Default)]
pub struct SqrtBranch {
    last: Option<C64>,
}

impl SqrtBranch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sqrt(&mut self, w: C64) -> C64 {
        let r = w.sqrt();
        let r = match self.last {
            Some(prev) if (r - prev).norm() > (r + prev).norm() => -r,
            _ => r,
        };
        self.last = Some(r);
        r
    }
}

/// Osculating Möbius map of `h` at `z`: the unit-determinant matrix whose map
/// agrees with `h` to second order at `z`.
pub fn smooth_osculating(h: &SmoothMap, z: C64, branch: &mut SqrtBranch) -> Result<MoebiusMap, OsculatingError> {
    osculating_from_jet(h.jet(z), z, branch)
}

pub fn osculating_from_jet(jet: Jet, z: C64, branch: &mut SqrtBranch) -> Result<MoebiusMap, OsculatingError> {
    let [h, h1, h2, _] = jet;
    if h1.norm() < 1e-300 {
        return Err(OsculatingError::CriticalPoint(z));
    }
    let s = h1 * branch.sqrt(h1);
    let m = MoebiusMap::new(
        h1 * h1 - h * h2 / 2.0,
        z * h * h2 / 2.0 + h * h1 - z * h1 * h1,
        -h2 / 2.0,
        z * h2 / 2.0 + h1,
    );
    Ok(m.scale(s.inv()))
}

/// `A_g̃ A_g⁻¹` for a pair of maps.
pub fn smooth_pair_frame(
    g: &SmoothMap,
    gt: &SmoothMap,
    z: C64,
    bg: &mut SqrtBranch,
    bgt: &mut SqrtBranch,
) -> Result<MoebiusMap, OsculatingError> {
    let a = smooth_osculating(g, z, bg)?;
    let b = smooth_osculating(gt, z, bgt)?;
    Ok(b * a.inverse())
}

/// The Maurer–Cartan form `−(S/2)[[z, −z²], [1, −z]]`.
pub fn maurer_cartan(s: C64, z: C64) -> MoebiusMap {
    MoebiusMap::new(z, -z * z, C64::new(1.0, 0.0), -z).scale(-s / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn square_at_one() {
        let a = smooth_osculating(&SmoothMap::Power(2), c(1.0, 0.0), &mut SqrtBranch::new()).unwrap();
        let k = 1.0 / (2.0 * 2f64.sqrt());
        let want = MoebiusMap::new(c(3.0 * k, 0.0), c(-k, 0.0), c(-k, 0.0), c(3.0 * k, 0.0));
        assert!(a.dist_projective(&want) < 1e-14);
    }

    #[test]
    fn identity_and_mobius() {
        let z = c(0.3, 0.4);
        let a = smooth_osculating(&SmoothMap::Identity, z, &mut SqrtBranch::new()).unwrap();
        assert!(a.dist(&MoebiusMap::IDENTITY) < 1e-15);
        let m = MoebiusMap::new(c(1.0, 1.0), c(0.5, 0.0), c(0.2, -0.1), c(2.0, 0.0)).normalized();
        let a = smooth_osculating(&SmoothMap::Mobius(m), z, &mut SqrtBranch::new()).unwrap();
        assert!(a.dist_projective(&m) < 1e-13);
    }

    #[test]
    fn two_jet_matches() {
        let h = SmoothMap::Exp;
        let z = c(0.2, 0.7);
        let a = smooth_osculating(&h, z, &mut SqrtBranch::new()).unwrap();
        let f = |w: C64| (a.a * w + a.b) / (a.c * w + a.d);
        let d = 1e-3;
        let jet = h.jet(z);
        assert!((f(z) - jet[0]).norm() < 1e-12);
        let d1 = (f(z + d) - f(z - d)) / (2.0 * d);
        let d2 = (f(z + d) - 2.0 * f(z) + f(z - d)) / (d * d);
        assert!((d1 - jet[1]).norm() < 1e-6);
        assert!((d2 - jet[2]).norm() < 1e-5);
    }

    #[test]
    fn compose_jets() {
        let h = SmoothMap::compose(SmoothMap::Exp, SmoothMap::Power(2));
        let z = c(0.4, -0.3);
        let j = h.jet(z);
        let e = (z * z).exp();
        assert!((j[1] - 2.0 * z * e).norm() < 1e-13);
        assert!((j[2] - (2.0 + 4.0 * z * z) * e).norm() < 1e-13);
        assert!((j[3] - (12.0 * z + 8.0 * z * z * z) * e).norm() < 1e-12);
        assert!((SmoothMap::Exp.schwarzian(z) + 0.5).norm() < 1e-15);
    }
}
