//! Loading a frame file and checking the paracontact axioms.

use pclab::frame::file::FrameFile;
use pclab::frame::{validate, SignConvention};

const BROKEN: &str = r#"{
    "label": "not-a-lie-algebra", "dim": 3,
    "brackets": [
        {"i": 0, "j": 1, "coeffs": {"2": "1"}},
        {"i": 1, "j": 2, "coeffs": {"0": "1"}},
        {"i": 0, "j": 2, "coeffs": {"0": "1"}}
    ],
    "metric": [[1, 0, 0], [0, 1, 0], [0, 0, -1]],
    "xi_index": 0, "phi": [[0, 0, 0], [0, 0, -1], [0, -1, 0]]
}"#;

fn main() {
    let conv = SignConvention::CALIBRATED;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/frames/g2.json");
    let spec = FrameFile::load(path.as_ref()).unwrap().to_spec(conv).unwrap();
    let frame = validate(&spec, conv).unwrap();
    println!("{} is paracontact; h columns:", frame.spec().label);
    for j in 0..frame.dim() {
        let col: Vec<String> = frame.h().column(j).iter().map(|p| p.to_string()).collect();
        println!("  h E{j} = ({})", col.join(", "));
    }

    let spec = FrameFile::from_json(BROKEN).unwrap().to_spec(conv).unwrap();
    if let Err(e) = validate(&spec, conv) {
        println!("{}: {e}", spec.label);
    }
}
