//! Which phi sign patterns satisfy d eta = g(., phi .) under each convention.

use pclab::catalog;
use pclab::frame::{infer_phi, SignConvention};

fn main() {
    let spec = &catalog::get("heisenberg").unwrap().spec;
    for sign in [1, -1] {
        let conv = SignConvention::new(sign).unwrap();
        let found = infer_phi(spec, &spec.pairing, conv).unwrap();
        for phi in found {
            println!("d eta sign {sign:+}: phi rows {:?}", phi.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
        }
    }
}
