//! The five-dimensional (kappa, mu)-space with h^2 = 0.

use pclab::catalog;
use pclab::classify::{check_kno1, is_iht, km_fit};
use pclab::curvature::Geometry;
use pclab::frame::SignConvention;

fn main() {
    let g = Geometry::new(catalog::get("km5d").unwrap().instantiate(&Default::default(), SignConvention::CALIBRATED).unwrap());
    let km = km_fit(&g).unwrap();
    println!("kappa = {}, mu = {}", km.kappa, pclab::cli::report::mu_text(&km.mu));
    println!("h^2 = 0: {}", g.frame.h().mul(g.frame.h()).is_zero());
    println!("IHT: {}", is_iht(&g).unwrap().0);
    // kappa = -1 is outside the range of the Q formula
    println!("Q formula: {:?}", check_kno1(&g, &km).map(|v| v.to_string()));
}
