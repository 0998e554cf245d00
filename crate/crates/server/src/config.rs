use std::collections::HashSet;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use webcas_core::cas::{Actor, Vocabulary};
use webcas_core::rdf::Iri;
use webcas_core::webid::WebIdProfile;

use crate::ServerError;

pub const DEFAULT_MAX_UPLOAD: usize = 16 * 1024 * 1024;
pub const DEFAULT_MAX_IMPORT: usize = 64 * 1024 * 1024;

/// Server configuration, usually read from a TOML file.
///
/// Relative paths are resolved against the directory of the file they were
/// read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    pub bind: SocketAddr,
    /// PEM certificate chain presented to clients.
    pub tls_cert: PathBuf,
    /// PEM private key for `tls_cert`.
    pub tls_key: PathBuf,
    /// N-Quads file holding every actor graph.
    pub dataset: PathBuf,
    /// Root of the `<actor>/<handle><ext>` document tree.
    pub storage_root: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub static_root: Option<PathBuf>,
    #[serde(default = "default_max_upload")]
    pub max_upload_bytes: usize,
    #[serde(default = "default_max_import")]
    pub max_import_bytes: usize,
    /// Whether profiles of WebIDs hosted elsewhere may be fetched.
    #[serde(default = "default_true")]
    pub remote_profiles: bool,
    #[serde(default = "default_fetch_timeout")]
    pub fetch_timeout_secs: u64,
    pub actors: Vec<ActorConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorConfig {
    /// Short name used in URLs and the storage layout, e.g. `student`.
    pub name: String,
    /// Graph name, e.g. `http://example.org/Student`.
    pub iri: String,
    /// Either a short vocabulary name (`student`, `hbsc`, `hmsc`) or a full
    /// namespace IRI.
    pub vocabulary: String,
    /// Local name of the actor class in the vocabulary.
    pub class: String,
    pub webid: String,
    /// Turtle profile served under `/webid/<name>`.
    pub profile: PathBuf,
}

fn default_max_upload() -> usize {
    DEFAULT_MAX_UPLOAD
}

fn default_max_import() -> usize {
    DEFAULT_MAX_IMPORT
}

fn default_true() -> bool {
    true
}

fn default_fetch_timeout() -> u64 {
    5
}

impl ServerConfig {
    pub fn load(path: &Path) -> Result<Self, ServerError> {
        let text = std::fs::read_to_string(path).map_err(|e| ServerError::io(path, e))?;
        let mut config: ServerConfig =
            toml::from_str(&text).map_err(|e| ServerError::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration is always serializable")
    }

    /// Makes every relative path absolute with respect to `dir`.
    pub fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        fix(&mut self.tls_cert);
        fix(&mut self.tls_key);
        fix(&mut self.dataset);
        fix(&mut self.storage_root);
        if let Some(s) = self.static_root.as_mut() {
            fix(s);
        }
        for a in &mut self.actors {
            fix(&mut a.profile);
        }
    }

    /// Builds the actors and checks that names and WebIDs are unique and
    /// that every profile lists at least one key for its WebID.
    pub fn actors(&self) -> Result<Vec<Actor>, ServerError> {
        if self.actors.is_empty() {
            return Err(ServerError::Config("no actors configured".into()));
        }
        let mut names = HashSet::new();
        let mut webids = HashSet::new();
        let mut out = Vec::new();
        for a in &self.actors {
            if !names.insert(a.name.as_str()) {
                return Err(ServerError::Config(format!("actor {} configured twice", a.name)));
            }
            if !webids.insert(a.webid.as_str()) {
                return Err(ServerError::Config(format!("WebID {} used by two actors", a.webid)));
            }
            let actor = a.to_actor()?;
            let profile = a.load_profile()?;
            let parsed = WebIdProfile::parse(&profile, &actor.webid)
                .map_err(|e| ServerError::Config(format!("profile of {}: {e}", a.name)))?;
            if parsed.keys.is_empty() {
                return Err(ServerError::Config(format!(
                    "profile {} lists no key for {}",
                    a.profile.display(),
                    a.webid
                )));
            }
            out.push(actor);
        }
        Ok(out)
    }
}

impl ActorConfig {
    pub fn to_actor(&self) -> Result<Actor, ServerError> {
        let bad = |what: &str, e: &dyn std::fmt::Display| ServerError::Config(format!("actor {}: {what}: {e}", self.name));
        let vocabulary = if self.vocabulary.contains(':') {
            Vocabulary::new(&self.vocabulary, &self.class).map_err(|e| bad("vocabulary", &e))?
        } else {
            Vocabulary::persemid(&self.vocabulary, &self.class)
        };
        let iri = Iri::new(&self.iri).map_err(|e| bad("iri", &e))?;
        let webid = Iri::new(&self.webid).map_err(|e| bad("webid", &e))?;
        Actor::new(&self.name, iri, vocabulary, webid).map_err(|e| bad("definition", &e))
    }

    pub fn load_profile(&self) -> Result<String, ServerError> {
        std::fs::read_to_string(&self.profile).map_err(|e| ServerError::io(&self.profile, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
bind = "127.0.0.1:8443"
tls_cert = "tls/server.crt"
tls_key = "tls/server.key"
dataset = "data/dataset.nq"
storage_root = "data/files"

[[actors]]
name = "student"
iri = "http://example.org/Student"
vocabulary = "student"
class = "Student"
webid = "https://localhost:8443/webid/student#id"
profile = "identities/student/profile.ttl"
"#;

    #[test]
    fn defaults_and_relative_paths() {
        let mut c: ServerConfig = toml::from_str(SAMPLE).unwrap();
        assert_eq!(c.max_upload_bytes, DEFAULT_MAX_UPLOAD);
        assert_eq!(c.fetch_timeout_secs, 5);
        assert!(c.remote_profiles);
        c.resolve_paths(Path::new("/etc/webcas"));
        assert_eq!(c.dataset, Path::new("/etc/webcas/data/dataset.nq"));
        assert_eq!(c.actors[0].profile, Path::new("/etc/webcas/identities/student/profile.ttl"));
        let back: ServerConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{SAMPLE}\nport = 1\n");
        assert!(toml::from_str::<ServerConfig>(&text).is_err());
    }

    #[test]
    fn vocabulary_forms() {
        let c: ServerConfig = toml::from_str(SAMPLE).unwrap();
        let mut a = c.actors[0].clone();
        assert_eq!(a.to_actor().unwrap().vocabulary, Vocabulary::student());
        a.vocabulary = "https://vocab.example/uni#".into();
        assert_eq!(a.to_actor().unwrap().vocabulary.namespace(), "https://vocab.example/uni#");
        a.iri = "not an iri".into();
        assert!(a.to_actor().is_err());
    }
}
