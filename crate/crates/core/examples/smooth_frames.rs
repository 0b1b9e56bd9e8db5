//! Osculating Möbius maps of smooth functions: the composition rule and the
//! Maurer–Cartan form.

use horonet::osculating::smooth::{maurer_cartan, smooth_osculating, SmoothMap, SqrtBranch};
use horonet::C64;

fn main() {
    let (g, h) = (SmoothMap::Power(2), SmoothMap::Exp);
    let hg = SmoothMap::compose(h.clone(), g.clone());
    let z = C64::new(0.6, 0.3);
    let lhs = smooth_osculating(&hg, z, &mut SqrtBranch::new()).unwrap();
    let rhs = smooth_osculating(&h, g.value(z), &mut SqrtBranch::new()).unwrap()
        * smooth_osculating(&g, z, &mut SqrtBranch::new()).unwrap();
    println!("composition defect {:.2e}", lhs.dist_projective(&rhs));

    println!("Schwarzian of {} at {z}: {:.6}", hg.name(), hg.schwarzian(z));
    for d in [1e-2, 1e-3] {
        let mut br = SqrtBranch::new();
        let a = smooth_osculating(&hg, z, &mut br).unwrap();
        let ap = smooth_osculating(&hg, z + d, &mut br.clone()).unwrap();
        let am = smooth_osculating(&hg, z - d, &mut br.clone()).unwrap();
        let da = (ap - am).scale(C64::new(0.5 / d, 0.0));
        println!("step {d}: |A^-1 A' - MC| = {:.2e}", (a.inverse() * da).dist(&maurer_cartan(hg.schwarzian(z), z)));
    }
}
