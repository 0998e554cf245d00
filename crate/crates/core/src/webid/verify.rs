use std::collections::HashMap;
use std::fmt;

use super::cert::CertificateInfo;
use super::profile::WebIdProfile;
use crate::ops;
use crate::rdf::Iri;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchedProfile {
    pub body: Vec<u8>,
    pub media_type: Option<String>,
}

impl FetchedProfile {
    pub fn turtle(body: impl Into<Vec<u8>>) -> Self {
        FetchedProfile {
            body: body.into(),
            media_type: Some("text/turtle".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FetchError {
    #[error("{iri} is unreachable: {reason}")]
    Unreachable { iri: String, reason: String },
    #[error("{iri} answered with HTTP status {status}")]
    Status { iri: String, status: u16 },
}

/// Dereferences a profile document. Implementations must tolerate
/// concurrent calls.
pub trait ProfileFetcher: Send + Sync {
    /// `document` never carries a fragment.
    fn fetch(&self, document: &Iri) -> Result<FetchedProfile, FetchError>;
}

impl<F> ProfileFetcher for F
where
    F: Fn(&Iri) -> Result<FetchedProfile, FetchError> + Send + Sync,
{
    fn fetch(&self, document: &Iri) -> Result<FetchedProfile, FetchError> {
        self(document)
    }
}

/// Serves a fixed set of documents keyed by document IRI.
#[derive(Debug, Clone, Default)]
pub struct StaticFetcher {
    documents: HashMap<String, FetchedProfile>,
}

impl StaticFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a Turtle body under the document part of `iri`.
    pub fn insert(&mut self, iri: &Iri, turtle: impl Into<Vec<u8>>) {
        self.documents
            .insert(iri.document().into_string(), FetchedProfile::turtle(turtle));
    }

    pub fn with(mut self, iri: &Iri, turtle: impl Into<Vec<u8>>) -> Self {
        self.insert(iri, turtle);
        self
    }
}

impl ProfileFetcher for StaticFetcher {
    fn fetch(&self, document: &Iri) -> Result<FetchedProfile, FetchError> {
        self.documents
            .get(document.as_str())
            .cloned()
            .ok_or_else(|| FetchError::Status {
                iri: document.to_string(),
                status: 404,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VerificationResult {
    /// The SAN URI whose profile lists the certificate key.
    Verified(Iri),
    NoSan,
    ProfileUnreachable(Iri),
    ProfileUnparseable(Iri),
    KeyMismatch(Iri),
}

impl VerificationResult {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerificationResult::Verified(_))
    }

    pub fn webid(&self) -> Option<&Iri> {
        match self {
            VerificationResult::Verified(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            VerificationResult::Verified(_) => "verified",
            VerificationResult::NoSan => "no_san",
            VerificationResult::ProfileUnreachable(_) => "profile_unreachable",
            VerificationResult::ProfileUnparseable(_) => "profile_unparseable",
            VerificationResult::KeyMismatch(_) => "key_mismatch",
        }
    }
}

impl fmt::Display for VerificationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationResult::NoSan => f.write_str("no_san"),
            VerificationResult::Verified(iri)
            | VerificationResult::ProfileUnreachable(iri)
            | VerificationResult::ProfileUnparseable(iri)
            | VerificationResult::KeyMismatch(iri) => write!(f, "{}({})", self.kind(), iri.as_str()),
        }
    }
}

/// Checks the certificate key against the profile of each SAN URI in turn.
/// The first match wins; otherwise the last SAN's failure is reported.
pub fn verify_webid(cert: &CertificateInfo, fetcher: &dyn ProfileFetcher) -> VerificationResult {
    ops::record("verify_webid");
    let mut last = VerificationResult::NoSan;
    for san in &cert.san_uris {
        let profile = match load_profile(san, fetcher) {
            Ok(p) => p,
            Err(failure) => {
                last = failure;
                continue;
            }
        };
        if profile.has_key(&cert.key) {
            tracing::info!(webid = %san, scheme = san.scheme(), "WebID verified");
            return VerificationResult::Verified(san.clone());
        }
        tracing::debug!(webid = %san, "certificate key not listed in profile");
        last = VerificationResult::KeyMismatch(san.clone());
    }
    last
}

pub(super) fn load_profile(webid: &Iri, fetcher: &dyn ProfileFetcher) -> Result<WebIdProfile, VerificationResult> {
    let fetched = fetcher.fetch(&webid.document()).map_err(|e| {
        tracing::debug!(webid = %webid, scheme = webid.scheme(), "profile fetch failed: {e}");
        VerificationResult::ProfileUnreachable(webid.clone())
    })?;
    let unparseable = |reason: String| {
        tracing::debug!(webid = %webid, "profile unparseable: {reason}");
        VerificationResult::ProfileUnparseable(webid.clone())
    };
    if let Some(mt) = &fetched.media_type {
        if !is_turtle_compatible(mt) {
            return Err(unparseable(format!("media type {mt}")));
        }
    }
    let text = String::from_utf8(fetched.body).map_err(|e| unparseable(e.to_string()))?;
    WebIdProfile::parse(&text, webid).map_err(|e| unparseable(e.to_string()))
}

fn is_turtle_compatible(media_type: &str) -> bool {
    let essence = media_type.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    matches!(
        essence.as_str(),
        "text/turtle" | "application/x-turtle" | "application/n-triples" | "text/plain"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::webid::RsaKey;

    fn cert(sans: &[&str], key: &RsaKey) -> CertificateInfo {
        CertificateInfo {
            subject_name: "CN=t".into(),
            san_uris: sans.iter().map(|s| Iri::new(*s).unwrap()).collect(),
            key: key.clone(),
            not_before: 0,
            not_after: 0,
            raw_der: Vec::new(),
        }
    }

    fn profile(key: &RsaKey) -> String {
        format!(
            "@prefix cert: <http://www.w3.org/ns/auth/cert#> .\n<#id> cert:key [ cert:modulus \"{}\"^^<http://www.w3.org/2001/XMLSchema#hexBinary> ; cert:exponent {} ] .\n",
            key.modulus_hex(),
            key.exponent()
        )
    }

    #[test]
    fn outcomes() {
        let key = RsaKey::from_hex("c2bcf492680f885d", 65537).unwrap();
        let other = RsaKey::from_hex("c2bcf492680f885e", 65537).unwrap();
        let a = Iri::new("https://h/a#id").unwrap();
        let fetcher = StaticFetcher::new()
            .with(&a, profile(&key))
            .with(&Iri::new("https://h/bad").unwrap(), "<<<");
        assert_eq!(verify_webid(&cert(&[], &key), &fetcher), VerificationResult::NoSan);
        assert_eq!(verify_webid(&cert(&["https://h/a#id"], &key), &fetcher), VerificationResult::Verified(a.clone()));
        assert_eq!(verify_webid(&cert(&["https://h/a#id"], &other), &fetcher), VerificationResult::KeyMismatch(a));
        assert_eq!(
            verify_webid(&cert(&["https://h/bad#me"], &key), &fetcher).kind(),
            "profile_unparseable"
        );
        assert_eq!(verify_webid(&cert(&["https://h/x#me"], &key), &fetcher).kind(), "profile_unreachable");
    }

    #[test]
    fn later_san_can_match_and_last_failure_is_reported() {
        let key = RsaKey::from_hex("c2bcf492680f885d", 65537).unwrap();
        let fetcher = StaticFetcher::new().with(&Iri::new("https://h/a#id").unwrap(), profile(&key));
        let r = verify_webid(&cert(&["https://gone/x#id", "https://h/a#id"], &key), &fetcher);
        assert!(r.is_verified());
        let other = RsaKey::from_hex("01", 3).unwrap();
        let r = verify_webid(&cert(&["https://h/a#id", "https://gone/x#id"], &other), &fetcher);
        assert_eq!(r.kind(), "profile_unreachable");
    }

    #[test]
    fn html_is_not_a_profile() {
        let key = RsaKey::from_hex("c2bc", 3).unwrap();
        let fetcher = |_: &Iri| {
            Ok(FetchedProfile {
                body: profile(&RsaKey::from_hex("c2bc", 3).unwrap()).into_bytes(),
                media_type: Some("text/html; charset=utf-8".into()),
            })
        };
        assert_eq!(verify_webid(&cert(&["https://h/a#id"], &key), &fetcher).kind(), "profile_unparseable");
    }
}
