//! Process-wide record of which service operations have run at least once.
//!
//! The end-to-end workflow test uses this to assert that every operation of
//! the service was exercised.

use std::collections::BTreeSet;
use std::sync::{Mutex, OnceLock};

fn seen() -> &'static Mutex<BTreeSet<&'static str>> {
    static SEEN: OnceLock<Mutex<BTreeSet<&'static str>>> = OnceLock::new();
    SEEN.get_or_init(Default::default)
}

pub fn record(operation: &'static str) {
    if let Ok(mut s) = seen().lock() {
        s.insert(operation);
    }
}

pub fn recorded() -> BTreeSet<&'static str> {
    seen().lock().map(|s| s.clone()).unwrap_or_default()
}
