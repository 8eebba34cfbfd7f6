//! The structural identities on a random point of each family.

use std::collections::BTreeMap;

use pclab::catalog;
use pclab::classify::identities::{identity_suite, Kind};
use pclab::curvature::Geometry;
use pclab::frame::SignConvention;
use pclab::scalar::rat;

fn main() {
    for id in ["g2", "g3", "g4", "g5g6", "g7"] {
        let e = catalog::get(id).unwrap();
        let point: BTreeMap<_, _> = e
            .params()
            .iter()
            .map(|n| (n.clone(), if n == "eps" { rat(-1, 1) } else { rat(3, 2) }))
            .collect();
        let g = Geometry::new(e.instantiate(&point, SignConvention::CALIBRATED).unwrap());
        let line: Vec<String> = identity_suite(&g)
            .iter()
            .map(|r| {
                let mark = match (r.passed(), r.kind) {
                    (true, _) => "ok",
                    // conditions such as the soliton equation may legitimately fail
                    (false, Kind::Condition) => "no",
                    (false, Kind::Identity) => "FAIL",
                };
                format!("{}:{mark}", r.id)
            })
            .collect();
        println!("{id} {}", line.join(" "));
    }
}
