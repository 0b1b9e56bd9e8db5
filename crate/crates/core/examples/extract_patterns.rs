//! Recovering the two circle patterns of a CMC-1 net from the net alone.

use horonet::cmc1::{build_cmc1, extract_patterns};
use horonet::moebius::hyperbolic_distance;
use horonet::pattern::{cross_ratios_of, shear_match};
use horonet::toda::{square_grid_toda, DiagonalRule, TodaFamily};

fn main() {
    let family = TodaFamily::new(square_grid_toda(6, 6).unwrap(), DiagonalRule::Smaller).unwrap();
    let (za, zb) = family.cmc1_pair(0.06).unwrap();
    let net = build_cmc1(&za, &zb).unwrap();

    let (z, zt, _frame) = extract_patterns(&net).unwrap();
    let x = cross_ratios_of(&z).unwrap();
    let xt = cross_ratios_of(&zt).unwrap();
    println!("shear mismatch {:.2e}, Delaunay {} / {}", shear_match(&x.x, &xt.x), x.is_delaunay(), xt.is_delaunay());

    let again = build_cmc1(&z, &zt).unwrap();
    let mut worst: f64 = 0.0;
    for a in 0..net.f.len() {
        for b in a + 1..net.f.len() {
            let d0 = hyperbolic_distance(&net.f[a], &net.f[b]).unwrap();
            let d1 = hyperbolic_distance(&again.f[a], &again.f[b]).unwrap();
            worst = worst.max((d0 - d1).abs());
        }
    }
    println!("rebuilt net matches pairwise distances to {worst:.2e}");
}
