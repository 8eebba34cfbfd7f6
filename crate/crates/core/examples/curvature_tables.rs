//! Ricci operator and the R(xi, .) table of the symbolic g2 family.

use pclab::catalog;
use pclab::curvature::Geometry;
use pclab::frame::SignConvention;

fn main() {
    let frame = catalog::get("g2").unwrap().instantiate(&Default::default(), SignConvention::CALIBRATED).unwrap();
    let g = Geometry::new(frame);
    println!("Q:");
    for row in g.curv.ricci_operator().rows() {
        let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        println!("  [{}]", cells.join(", "));
    }
    println!("scalar curvature {}", g.curv.scalar());
    let names = ["xi", "e", "phi e"];
    for y in 1..3 {
        for z in 1..3 {
            let v = g.curv.r(&g.frame.xi(), &g.frame.basis(y), &g.frame.basis(z));
            println!("R(xi, {}) {} = ({}) xi", names[y], names[z], v[0]);
        }
    }
}
