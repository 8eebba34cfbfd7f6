//! Ricci soliton search along the g3 family.

use std::collections::BTreeMap;

use pclab::catalog;
use pclab::classify::soliton_solve;
use pclab::curvature::Geometry;
use pclab::frame::SignConvention;
use pclab::scalar::int;

fn main() {
    let e = catalog::get("g3").unwrap();
    let g = Geometry::new(e.instantiate(&BTreeMap::new(), SignConvention::CALIBRATED).unwrap());
    let s = soliton_solve(&g).unwrap();
    println!("g3: soliton {}, lambda = {}", s.verdict, s.lambda);
    for (b, c) in [(2, 2), (2, 0), (0, 0)] {
        let point = BTreeMap::from([("beta".to_string(), int(b)), ("gamma".to_string(), int(c))]);
        let g = Geometry::new(e.instantiate(&point, SignConvention::CALIBRATED).unwrap());
        let s = soliton_solve(&g).unwrap();
        println!("beta = {b}, gamma = {c}: soliton {}, trivial {}", s.verdict, s.trivial);
    }
}
