//! Horospheres in the Hermitian model: incidence, parallel offsets and the
//! exact area law of a flat patch.

use horonet::cmc1::{flat_patch_area, normal_flow};
use horonet::moebius::{from_upper_half_space, horosphere, hyperbolic_distance, to_poincare_ball, Horosphere, SpherePoint};
use horonet::C64;

fn main() {
    let z = SpherePoint::finite(C64::new(0.4, -0.1));
    let h = horosphere(z, 0.5).unwrap();
    println!("horosphere at {:?} with radius {}: N = {:?}", z.affine(), h.r, h.n);

    // four points on the horosphere at infinity at height 1
    let at_inf: Vec<_> = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 1.0)]
        .iter()
        .map(|&w| from_upper_half_space(w, 1.0))
        .collect();
    let top = Horosphere::through(SpherePoint::infinity(), &at_inf[0]).unwrap();
    println!("incidence residuals {:?}", at_inf.iter().map(|x| top.residual(x)).collect::<Vec<_>>());

    let a0 = flat_patch_area(&at_inf, &top);
    for s in [0.25, 0.5, 1.0] {
        let moved: Vec<_> = at_inf.iter().map(|x| normal_flow(x, &top, s)).collect();
        let a = flat_patch_area(&moved, &top.offset(s));
        println!(
            "offset {s}: area {a:.6}, e^(-2s) area {:.6}, moved by {:.6}",
            (-2.0 * s).exp() * a0,
            hyperbolic_distance(&at_inf[0], &moved[0]).unwrap()
        );
    }
    println!("ball coordinates of the first corner {:?}", to_poincare_ball(&at_inf[0]).unwrap());
}
