use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Duration;

use webcas_core::rdf::Iri;
use webcas_core::webid::{FetchError, FetchedProfile, ProfileFetcher};

/// Profile fetcher used during request authentication.
///
/// Documents of locally hosted actors are answered from memory, so the
/// server never has to connect to itself. Everything else goes out over
/// HTTP(S) when remote fetching is enabled.
pub struct ServerFetcher {
    local: HashMap<String, Vec<u8>>,
    remote: bool,
    timeout: Duration,
    client: OnceLock<Result<reqwest::blocking::Client, String>>,
}

impl ServerFetcher {
    pub fn new(remote: bool, timeout: Duration) -> Self {
        ServerFetcher {
            local: HashMap::new(),
            remote,
            timeout,
            client: OnceLock::new(),
        }
    }

    /// Serves `turtle` for the document part of `webid`.
    pub fn add_local(&mut self, webid: &Iri, turtle: impl Into<Vec<u8>>) {
        self.local.insert(webid.document().into_string(), turtle.into());
    }

    // The blocking client owns a runtime of its own, so it is built lazily
    // on the first blocking call rather than inside the server's runtime.
    fn client(&self) -> Result<&reqwest::blocking::Client, String> {
        self.client
            .get_or_init(|| {
                reqwest::blocking::Client::builder()
                    .timeout(self.timeout)
                    .connect_timeout(self.timeout)
                    .redirect(reqwest::redirect::Policy::limited(3))
                    .build()
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

impl ProfileFetcher for ServerFetcher {
    fn fetch(&self, document: &Iri) -> Result<FetchedProfile, FetchError> {
        if let Some(body) = self.local.get(document.as_str()) {
            return Ok(FetchedProfile::turtle(body.clone()));
        }
        let unreachable = |reason: String| FetchError::Unreachable {
            iri: document.to_string(),
            reason,
        };
        if !self.remote {
            return Err(unreachable("remote profiles are disabled".into()));
        }
        if !matches!(document.scheme(), "http" | "https") {
            return Err(unreachable(format!("unsupported scheme {}", document.scheme())));
        }
        let response = self
            .client()
            .map_err(unreachable)?
            .get(document.as_str())
            .header(reqwest::header::ACCEPT, "text/turtle")
            .send()
            .map_err(|e| unreachable(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(FetchError::Status {
                iri: document.to_string(),
                status: status.as_u16(),
            });
        }
        let media_type = response
            .headers()
            .get(reqwest::header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .map(str::to_owned);
        let body = response.bytes().map_err(|e| unreachable(e.to_string()))?;
        Ok(FetchedProfile {
            body: body.to_vec(),
            media_type,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_documents_short_circuit() {
        let mut f = ServerFetcher::new(false, Duration::from_secs(1));
        let webid = Iri::new("https://localhost:8443/webid/student#id").unwrap();
        f.add_local(&webid, "<#id> a <http://xmlns.com/foaf/0.1/Person> .");
        assert!(f.fetch(&webid.document()).is_ok());
        let other = Iri::new("https://elsewhere.example/card").unwrap();
        assert!(matches!(f.fetch(&other), Err(FetchError::Unreachable { .. })));
    }

    #[test]
    fn unsupported_scheme() {
        let f = ServerFetcher::new(true, Duration::from_secs(1));
        let iri = Iri::new("urn:example:profile").unwrap();
        assert!(matches!(f.fetch(&iri), Err(FetchError::Unreachable { .. })));
    }
}
