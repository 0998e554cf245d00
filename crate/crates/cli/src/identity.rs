use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use webcas_core::ops;
use webcas_core::rdf::Iri;
use webcas_core::webid::{
    certificate_der_from_pem, extract_certificate_info, generate_identity, verify_webid, CertificateInfo,
    StaticFetcher, VerificationResult,
};

use crate::CliError;

pub const KEY_FILE: &str = "key.pem";
pub const CERT_FILE: &str = "cert.pem";
pub const PROFILE_FILE: &str = "profile.ttl";

#[derive(Debug, Clone, Serialize)]
pub struct GeneratedIdentity {
    pub name: String,
    pub webid: String,
    pub key: PathBuf,
    pub certificate: PathBuf,
    pub profile: PathBuf,
    pub verification: String,
}

/// Identity material read back from a directory written by [`gen_identity`].
#[derive(Debug, Clone)]
pub struct StoredIdentity {
    pub key_pem: String,
    pub cert_pem: String,
    pub profile: String,
}

impl StoredIdentity {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let read = |f: &str| {
            let p = dir.join(f);
            fs::read_to_string(&p).map_err(|e| CliError::io(p, e))
        };
        Ok(StoredIdentity {
            key_pem: read(KEY_FILE)?,
            cert_pem: read(CERT_FILE)?,
            profile: read(PROFILE_FILE)?,
        })
    }

    /// Key followed by certificate, the form TLS clients take.
    pub fn client_pem(&self) -> Vec<u8> {
        format!("{}{}", self.key_pem, self.cert_pem).into_bytes()
    }

    pub fn certificate_info(&self) -> Result<CertificateInfo, CliError> {
        let der = certificate_der_from_pem(self.cert_pem.as_bytes())?;
        Ok(extract_certificate_info(&der)?)
    }
}

/// Writes `key.pem`, `cert.pem` and `profile.ttl` for a new identity and
/// checks the result with a local verification before returning.
pub fn gen_identity(
    name: &str,
    webid: &str,
    out_dir: &Path,
    key_bits: u32,
    force: bool,
) -> Result<GeneratedIdentity, CliError> {
    ops::record("cmd_gen_identity");
    let webid = Iri::new(webid).map_err(|e| CliError::Identity(format!("WebID {webid:?}: {e}")))?;
    let paths = [KEY_FILE, CERT_FILE, PROFILE_FILE].map(|f| out_dir.join(f));
    if !force {
        if let Some(existing) = paths.iter().find(|p| p.exists()) {
            return Err(CliError::Exists { path: existing.clone() });
        }
    }

    let identity = generate_identity(name, &webid, key_bits)?;
    let profile = identity.profile_turtle();
    let info = identity.certificate_info()?;
    let fetcher = StaticFetcher::new().with(&webid, profile.as_bytes());
    let verification = verify_webid(&info, &fetcher);
    if !matches!(&verification, VerificationResult::Verified(v) if *v == webid) {
        return Err(CliError::Identity(format!("generated identity fails verification: {verification}")));
    }

    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let [key, certificate, profile_path] = paths;
    write_file(&key, identity.private_key_pem.as_bytes(), true)?;
    write_file(&certificate, identity.certificate_pem.as_bytes(), false)?;
    write_file(&profile_path, profile.as_bytes(), false)?;
    Ok(GeneratedIdentity {
        name: name.to_owned(),
        webid: webid.into_string(),
        key,
        certificate,
        profile: profile_path,
        verification: verification.kind().to_owned(),
    })
}

fn write_file(path: &Path, bytes: &[u8], private: bool) -> Result<(), CliError> {
    let mut options = fs::OpenOptions::new();
    options.write(true).create(true).truncate(true);
    #[cfg(unix)]
    if private {
        use std::os::unix::fs::OpenOptionsExt;
        options.mode(0o600);
    }
    #[cfg(not(unix))]
    let _ = private;
    let mut file = options.open(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    #[cfg(unix)]
    if private {
        // `mode` only applies on creation; tighten a file we overwrote.
        use std::os::unix::fs::PermissionsExt;
        fs::set_permissions(path, fs::Permissions::from_mode(0o600)).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use webcas_core::rdf::{parse_document, Syntax};

    #[test]
    fn writes_three_files_and_refuses_to_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let webid = "https://localhost/webid/student#id";
        let out = gen_identity("student", webid, dir.path(), 2048, false).unwrap();
        assert_eq!(out.verification, "verified");
        let stored = StoredIdentity::load(dir.path()).unwrap();
        let triples = parse_document(&stored.profile, Some(&Iri::new(webid).unwrap()), Syntax::Turtle).unwrap();
        assert_eq!(triples.len(), 5);
        assert_eq!(stored.certificate_info().unwrap().san_uris, vec![Iri::new(webid).unwrap()]);

        let before = fs::read(dir.path().join(KEY_FILE)).unwrap();
        let err = gen_identity("student", webid, dir.path(), 2048, false).unwrap_err();
        assert!(matches!(err, CliError::Exists { .. }));
        assert_eq!(err.exit_code(), 4);
        assert_eq!(fs::read(dir.path().join(KEY_FILE)).unwrap(), before);

        gen_identity("student", webid, dir.path(), 2048, true).unwrap();
        assert_ne!(fs::read(dir.path().join(KEY_FILE)).unwrap(), before);
    }

    #[cfg(unix)]
    #[test]
    fn private_key_is_owner_only() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        gen_identity("hbsc", "https://localhost/webid/hbsc#id", dir.path(), 2048, false).unwrap();
        let mode = fs::metadata(dir.path().join(KEY_FILE)).unwrap().permissions().mode();
        assert_eq!(mode & 0o777, 0o600);
    }

    #[test]
    fn webid_without_fragment_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = gen_identity("x", "https://localhost/webid/x", dir.path(), 2048, false).unwrap_err();
        assert_eq!(err.exit_code(), 6);
        assert!(!dir.path().join(KEY_FILE).exists());
    }
}
