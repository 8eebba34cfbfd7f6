//! Golden verification of the whole catalog, with the known errata listed.

use pclab::catalog::{self, verify_goldens, Status};
use pclab::frame::SignConvention;

fn main() {
    for e in catalog::entries() {
        let r = verify_goldens(e, SignConvention::CALIBRATED).unwrap();
        println!("{}: {} goldens, ok = {}", r.id, r.comparisons.len(), r.ok());
        for c in &r.comparisons {
            if let Status::Erratum { note } = &c.status {
                println!("  {}: printed {} / computed {}: {note}", c.field, c.expected, c.got);
            }
        }
    }
}
