//! A discrete minimal surface from the infinitesimal Toda deformation of a
//! square grid pattern.

use horonet::minimal::{edge_compatibility, minimal_surface, osculating_vector_field};
use horonet::toda::{square_grid_toda, DiagonalRule, TodaFamily};
use horonet::C64;

fn main() {
    let family = TodaFamily::new(square_grid_toda(6, 6).unwrap(), DiagonalRule::Smaller).unwrap();
    let dot = family.velocity(C64::new(0.0, 1.0)).unwrap();
    let field = osculating_vector_field(&family.pattern, &dot).unwrap();
    println!("edge compatibility {:.2e}", edge_compatibility(&family.pattern, &field));

    let points = minimal_surface(&field);
    for (f, p) in points.iter().enumerate().take(4) {
        println!("face {f}: ({:.5}, {:.5}, {:.5})", p[0], p[1], p[2]);
    }

    // a Möbius velocity field collapses the surface to a point
    let mob: Vec<C64> = family.pattern.affine().iter().map(|z| 1.0 + z * z).collect();
    let flat = minimal_surface(&osculating_vector_field(&family.pattern, &mob).unwrap());
    let spread = flat.iter().map(|p| (0..3).map(|k| (p[k] - flat[0][k]).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
    println!("Möbius velocity: spread {spread:.2e}");
}
