//! The JSON analysis report for a frame file, as `pclab analyze` emits it.

use std::collections::BTreeMap;

use pclab::cli::analyze;
use pclab::frame::file::FrameFile;
use pclab::frame::{validate, SignConvention};

fn main() {
    let conv = SignConvention::CALIBRATED;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/frames/g5g6.json");
    let spec = FrameFile::load(path.as_ref()).unwrap().to_spec(conv).unwrap();
    let report = analyze(validate(&spec, conv).unwrap(), &BTreeMap::new()).unwrap();
    println!("{}", report.to_json());
}
