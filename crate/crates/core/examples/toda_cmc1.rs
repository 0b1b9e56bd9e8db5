//! A discrete CMC-1 surface from the pair z_{it}, z_{-it} of the Toda family
//! on a square grid, exported to OBJ.

use horonet::cmc1::integrated_mean_curvature;
use horonet::io::export_cmc1;
use horonet::toda::{cmc1_from_toda, square_grid_toda, verify_toda, DiagonalRule, TodaFamily};

fn main() {
    let solution = square_grid_toda(8, 8).unwrap();
    let res = verify_toda(&solution.complex, &solution.z, &solution.q);
    println!("Toda residuals {:.2e}", res.max());

    let family = TodaFamily::new(solution, DiagonalRule::Smaller).unwrap();
    let net = cmc1_from_toda(&family, 0.08).unwrap();
    println!("max |H/area - 1| = {:.2e}", net.measurement.max_ratio_error());
    let (theta, torsion) = net.vertex_balance();
    println!("vertex balance: {theta:.2e}, {torsion:.2e}");
    for (v, h, ratio) in integrated_mean_curvature(&net).unwrap().into_iter().take(3) {
        println!("dual face {v}: H {h:.6}, H/area {ratio:.15}");
    }

    let mesh = export_cmc1(&net, 16).unwrap();
    let path = std::env::temp_dir().join("toda_cmc1.obj");
    std::fs::write(&path, mesh.to_obj()).unwrap();
    println!("{} vertices written to {}", mesh.vertices.len(), path.display());
}
