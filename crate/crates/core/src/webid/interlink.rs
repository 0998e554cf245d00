use std::fmt;

use super::cert::CertificateInfo;
use super::profile::WebIdProfile;
use super::verify::{load_profile, ProfileFetcher};
use crate::ops;
use crate::rdf::Iri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InterlinkMethod {
    /// Both certificates carry the same key pair.
    SharedKey = 1,
    /// Both certificates name a WebID whose profile lists both keys.
    SharedProfile = 2,
    /// Each certificate verifies against its own profile and the profiles
    /// point at each other with `psid:linkedIdentity`.
    MutualLink = 3,
}

impl InterlinkMethod {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interlink {
    Linked(InterlinkMethod),
    NotLinked,
}

impl fmt::Display for Interlink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interlink::Linked(m) => write!(f, "linked({})", m.number()),
            Interlink::NotLinked => f.write_str("not_linked"),
        }
    }
}

/// Decides whether two certificates denote the same identity, trying the
/// methods in ascending order. The result does not depend on argument order.
pub fn check_interlink(a: &CertificateInfo, b: &CertificateInfo, fetcher: &dyn ProfileFetcher) -> Interlink {
    ops::record("check_interlink");
    if a.key == b.key {
        return Interlink::Linked(InterlinkMethod::SharedKey);
    }

    for san in a.san_uris.iter().filter(|s| b.san_uris.contains(s)) {
        if let Ok(profile) = load_profile(san, fetcher) {
            if profile.has_key(&a.key) && profile.has_key(&b.key) {
                return Interlink::Linked(InterlinkMethod::SharedProfile);
            }
        }
    }

    let own_a = verified_profiles(a, fetcher);
    let own_b = verified_profiles(b, fetcher);
    for pa in &own_a {
        for pb in &own_b {
            if pa.webid != pb.webid && links_to(pa, &pb.webid) && links_to(pb, &pa.webid) {
                return Interlink::Linked(InterlinkMethod::MutualLink);
            }
        }
    }
    Interlink::NotLinked
}

/// Profiles among the certificate's SAN URIs that list its key.
fn verified_profiles(cert: &CertificateInfo, fetcher: &dyn ProfileFetcher) -> Vec<WebIdProfile> {
    cert.san_uris
        .iter()
        .filter_map(|san| load_profile(san, fetcher).ok())
        .filter(|p| p.has_key(&cert.key))
        .collect()
}

fn links_to(profile: &WebIdProfile, target: &Iri) -> bool {
    profile.linked_identities().iter().any(|l| l == target)
}
