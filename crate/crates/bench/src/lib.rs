//! Shared inputs for the benchmarks.

use std::path::PathBuf;

/// Path of a file in the repository's `fixtures/` directory.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// The map-service network with its context trace merged in.
pub fn wms() -> (ntm::Network, ntm::Schedules) {
    let (network, mut schedules) = ntm::io::load_network(&fixture("wms.net.json")).expect("fixture loads");
    let trace = ntm::io::load_trace(&fixture("wms.trace.json")).expect("fixture loads");
    let encoding = ntm::context::Encoding::default();
    let prepared = ntm::context::prepare_network(&network, &trace, &encoding).expect("trace fits");
    schedules.extend(ntm::context::encode_trace(&trace, &prepared, &encoding, None).expect("trace encodes"));
    (prepared, schedules)
}
