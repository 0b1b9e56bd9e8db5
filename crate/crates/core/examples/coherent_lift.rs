//! Osculating Möbius maps between a pattern and its image under exp, signed
//! so every transition has an eigenvalue with positive real part.

use horonet::mesh::{lattice_subcomplex, LatticeSpec, Region};
use horonet::osculating::{coherent_lift, lift_eigenvalue, osculating_frame, transition, vertex_monodromy};
use horonet::pattern::{cross_ratios_of, CirclePattern};
use horonet::C64;

fn main() {
    let patch = lattice_subcomplex(&LatticeSpec::equilateral(0.2, Region::unit_square())).unwrap();
    let z = CirclePattern::from_affine(patch.disk.clone(), &patch.positions).unwrap();
    let w: Vec<C64> = patch.positions.iter().map(|p| p.exp()).collect();
    let zt = CirclePattern::from_affine(patch.disk.clone(), &w).unwrap();

    let x = cross_ratios_of(&z).unwrap();
    let xt = cross_ratios_of(&zt).unwrap();
    let lambdas: Vec<C64> = x.x.iter().zip(&xt.x).map(|(&a, &b)| lift_eigenvalue(a, b)).collect();
    let (monodromy, obstruction) = vertex_monodromy(&z, &lambdas);
    println!("vertex monodromy |prod - I| = {monodromy:.2e}, obstruction at {obstruction:?}");

    let frame = coherent_lift(&osculating_frame(&z, &zt).unwrap(), &z, &zt).unwrap();
    let e = z.disk.edges()[0];
    let (_, l) = transition(&frame, &z, e.i, e.j).unwrap();
    println!("edge {}-{}: transition eigenvalue {l:.6}, expected {:.6}", e.i, e.j, lambdas[0]);
    let worst = z
        .disk
        .edges()
        .iter()
        .map(|ed| transition(&frame, &z, ed.i, ed.j).unwrap().1.re)
        .fold(f64::INFINITY, f64::min);
    println!("smallest Re(lambda) over interior edges {worst:.4}");
}
