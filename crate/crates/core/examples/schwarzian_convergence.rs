//! Refinement study for h = exp: frames, the discrete Schwarzian and the
//! CMC-1 surface of the pair (id, exp) against their smooth limits.

use horonet::convergence::{frame_convergence, named_case, surface_convergence, Column, PairData, Pipeline};
use horonet::mesh::LatticeSpec;
use horonet::osculating::smooth::SmoothMap;

fn main() {
    let data = named_case("exp").unwrap();
    let spec = LatticeSpec::equilateral(0.1, data.region.clone());
    let eps = [0.1, 0.05, 0.025];

    let frames = frame_convergence(&data, &spec, &eps, Pipeline::Solved).unwrap();
    let pair = PairData::new(SmoothMap::Identity, SmoothMap::Exp, data.region.clone(), data.base).unwrap();
    let surface = surface_convergence(&pair, &spec, &eps).unwrap();

    for (a, b) in frames.rows.iter().zip(&surface.rows) {
        println!(
            "eps {:<6} vertices {:>5}  frame {:.3e}  s1 {:.3e}  surface {:.3e}  hopf mean {:.6}",
            a.eps,
            a.n_vertices,
            a.frame_error.unwrap(),
            a.schwarzian_error.unwrap(),
            b.surface_error.unwrap(),
            b.hopf_mean.unwrap()
        );
    }
    println!(
        "orders: frame {:.2}, s1 {:.2}, surface {:.2}",
        frames.order(Column::Frame).unwrap(),
        frames.order(Column::Schwarzian).unwrap(),
        surface.order(Column::Surface).unwrap()
    );
    println!("Hopf limit -sqrt(3)/8 = {:.6}", -(3f64.sqrt()) / 8.0);
}
