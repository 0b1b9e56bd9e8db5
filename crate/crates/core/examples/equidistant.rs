//! An equidistant net from two angle-matched patterns: z and its real-time
//! Toda deformation.

use horonet::io::export_equidistant;
use horonet::equidistant::{extract_equidistant_patterns, verify_equidistant};
use horonet::toda::{equidistant_from_toda, square_grid_toda, DiagonalRule, TodaFamily};

fn main() {
    let family = TodaFamily::new(square_grid_toda(6, 6).unwrap(), DiagonalRule::Smaller).unwrap();
    let net = equidistant_from_toda(&family, 0.1).unwrap();
    let rep = verify_equidistant(&net);
    println!("co-sphericity {:.2e}, Im eigenvalues {:.2e}, arcs {:.2e}", rep.cosphericity, rep.eigenvalue_reality, rep.arc);
    let mu = net.scaling_factors();
    println!("first scaling factors {:?}", &mu[..4]);

    let (z, _, _) = extract_equidistant_patterns(&net).unwrap();
    println!("recovered source pattern with {} vertices", z.z.len());

    let mesh = export_equidistant(&net, 12).unwrap();
    let path = std::env::temp_dir().join("equidistant.ply");
    std::fs::write(&path, mesh.to_ply()).unwrap();
    println!("written to {}", path.display());
}
