//! Classification of every catalog entry.

use pclab::catalog;
use pclab::classify::classify;
use pclab::curvature::Geometry;
use pclab::frame::SignConvention;

fn main() {
    for e in catalog::entries() {
        let g = Geometry::new(e.instantiate(&Default::default(), SignConvention::CALIBRATED).unwrap());
        let c = classify(&g).unwrap();
        println!("{}:", e.id);
        for (name, v) in c.flags() {
            println!("  {name:<16} {v}");
        }
        if let Some(k) = &c.fitted.kappa {
            println!("  kappa = {k}, mu = {}", pclab::cli::report::mu_text(c.fitted.mu.as_ref().unwrap()));
        }
    }
}
