//! D-homothetic deformation of the g2 family.

use pclab::catalog;
use pclab::classify::is_h_paracontact;
use pclab::curvature::Geometry;
use pclab::deform::{check_deformed_ricci_relation, check_restricted_curvature_relation, deform, DeformationParams};
use pclab::frame::file::FrameFile;
use pclab::frame::SignConvention;
use pclab::scalar::rat;

fn main() {
    let f = catalog::get("g2").unwrap().instantiate(&Default::default(), SignConvention::CALIBRATED).unwrap();
    let t = rat(3, 1);
    let d = deform(&f, &DeformationParams::new(t.clone(), 1).unwrap()).unwrap();
    let (before, after) = (Geometry::new(f), Geometry::new(d));
    println!("{}", FrameFile::from_spec(after.frame.spec()).to_json());
    println!("rho_t(X, xi_t) = rho(X, xi) / t: {}", check_deformed_ricci_relation(&before, &after, &t));
    println!("curvature relation: {}", check_restricted_curvature_relation(&before, &after, &t));
    println!(
        "H-paracontact before {}, after {}",
        is_h_paracontact(&before).unwrap(),
        is_h_paracontact(&after).unwrap()
    );
}
