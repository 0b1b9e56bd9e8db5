//! Cross ratios of the equilateral lattice, and developing them back into a
//! pattern from a single seed triangle.

use horonet::mesh::{lattice_subcomplex, LatticeSpec, Region};
use horonet::pattern::{cross_ratios_of, develop, verify_closure, CirclePattern};

fn main() {
    let patch = lattice_subcomplex(&LatticeSpec::equilateral(0.2, Region::unit_square())).unwrap();
    let z = CirclePattern::from_affine(patch.disk.clone(), &patch.positions).unwrap();
    let x = cross_ratios_of(&z).unwrap();
    println!("{} vertices, {} interior edges", z.z.len(), x.x.len());
    println!("first cross ratio {:.6} (arg {:.6})", x.x[0], x.x[0].arg());

    let rep = verify_closure(&x);
    println!("closure residual {:.2e}, Delaunay {}", rep.max_residual(), x.is_delaunay());

    let seed = z.disk.faces()[0].map(|v| z.z[v]);
    let back = develop(&z.disk, &x.x, 0, seed).unwrap();
    let err = z.z.iter().zip(&back.z).map(|(a, b)| a.chordal(b)).fold(0.0, f64::max);
    println!("developed pattern differs by {err:.2e} (chordal)");
}
