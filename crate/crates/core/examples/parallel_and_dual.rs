//! Parallel nets, the first variation of area, and the dual surface.

use horonet::cmc1::{area_derivative, dual_surface, integrated_mean_curvature, parallel_net};
use horonet::toda::{cmc1_from_toda, square_grid_toda, DiagonalRule, TodaFamily};

fn main() {
    let family = TodaFamily::new(square_grid_toda(6, 6).unwrap(), DiagonalRule::Smaller).unwrap();
    let net = cmc1_from_toda(&family, 0.1).unwrap();

    let p = parallel_net(&net, 0.05).unwrap();
    let v = net.disk.interior_vertices().next().unwrap();
    println!("area of dual face {v}: {:.6} -> {:.6} after offset 0.05", net.measurement.area[v].unwrap(), p.measurement.area[v].unwrap());

    let h = integrated_mean_curvature(&net).unwrap();
    let d = area_derivative(&net, 1e-2).unwrap();
    for ((v, hv, _), (_, dv)) in h.iter().zip(&d).take(4) {
        println!("face {v}: d area/dt {dv:.6}, -2H {:.6}", -2.0 * hv);
    }

    let dual = dual_surface(&net).unwrap();
    let e = 0;
    println!(
        "edge {e}: l tan(a/2) = {:.6}, dual {:.6}; dual ratio error {:.2e}",
        net.measurement.torsion(e),
        dual.measurement.torsion(e),
        dual.measurement.max_ratio_error()
    );
}
