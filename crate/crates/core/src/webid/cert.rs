use x509_parser::extensions::GeneralName;
use x509_parser::prelude::{FromDer, X509Certificate};
use x509_parser::public_key::PublicKey;
use x509_parser::x509::SubjectPublicKeyInfo;

use super::RsaKey;
use crate::ops;
use crate::rdf::Iri;

#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Parse(String),
    #[error("unsupported public key type: {0}")]
    UnsupportedKey(String),
    #[error("invalid RSA key: {0}")]
    InvalidKey(String),
    #[error("no PEM certificate found")]
    NoPem,
}

/// The authentication-relevant content of an X.509 client certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateInfo {
    pub subject_name: String,
    /// URI entries of the subject alternative name extension, in certificate order.
    pub san_uris: Vec<Iri>,
    pub key: RsaKey,
    /// Validity window as Unix timestamps. Not consulted during WebID verification.
    pub not_before: i64,
    pub not_after: i64,
    pub raw_der: Vec<u8>,
}

impl CertificateInfo {
    pub fn rsa_modulus(&self) -> &[u8] {
        self.key.modulus()
    }

    pub fn rsa_exponent(&self) -> u64 {
        self.key.exponent()
    }

    pub fn is_expired_at(&self, unix_time: i64) -> bool {
        unix_time > self.not_after
    }
}

/// Extracts SAN URIs and the RSA public key from a DER certificate.
pub fn extract_certificate_info(der: &[u8]) -> Result<CertificateInfo, CertificateError> {
    ops::record("extract_certificate_info");
    let (_, cert) = X509Certificate::from_der(der).map_err(|e| CertificateError::Parse(e.to_string()))?;
    let key = rsa_key_from_spki(cert.public_key())?;

    let mut san_uris = Vec::new();
    let san = cert
        .subject_alternative_name()
        .map_err(|e| CertificateError::Parse(e.to_string()))?;
    if let Some(san) = san {
        for name in &san.value.general_names {
            if let GeneralName::URI(uri) = name {
                match Iri::new(*uri) {
                    Ok(iri) => san_uris.push(iri),
                    Err(e) => tracing::warn!("ignoring SAN URI that is not an absolute IRI: {e}"),
                }
            }
        }
    }

    let validity = cert.validity();
    Ok(CertificateInfo {
        subject_name: cert.subject().to_string(),
        san_uris,
        key,
        not_before: validity.not_before.timestamp(),
        not_after: validity.not_after.timestamp(),
        raw_der: der.to_vec(),
    })
}

/// Reads the first `CERTIFICATE` block of a PEM document.
pub fn certificate_der_from_pem(pem: &[u8]) -> Result<Vec<u8>, CertificateError> {
    for item in x509_parser::pem::Pem::iter_from_buffer(pem) {
        let item = item.map_err(|e| CertificateError::Parse(e.to_string()))?;
        if item.label == "CERTIFICATE" {
            return Ok(item.contents);
        }
    }
    Err(CertificateError::NoPem)
}

/// Decodes the RSA key of a DER `SubjectPublicKeyInfo`.
pub fn rsa_key_from_spki_der(spki_der: &[u8]) -> Result<RsaKey, CertificateError> {
    let (_, spki) = SubjectPublicKeyInfo::from_der(spki_der).map_err(|e| CertificateError::Parse(e.to_string()))?;
    rsa_key_from_spki(&spki)
}

fn rsa_key_from_spki(spki: &SubjectPublicKeyInfo<'_>) -> Result<RsaKey, CertificateError> {
    match spki.parsed() {
        Ok(PublicKey::RSA(rsa)) => {
            let exponent = rsa
                .try_exponent()
                .map_err(|e| CertificateError::InvalidKey(e.to_string()))?;
            RsaKey::new(rsa.modulus, exponent).map_err(CertificateError::InvalidKey)
        }
        Ok(PublicKey::EC(_)) => Err(CertificateError::UnsupportedKey("EC".into())),
        Ok(PublicKey::DSA(_)) => Err(CertificateError::UnsupportedKey("DSA".into())),
        Ok(_) => Err(CertificateError::UnsupportedKey(spki.algorithm.algorithm.to_id_string())),
        Err(e) => Err(CertificateError::Parse(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(
            extract_certificate_info(b"not a certificate"),
            Err(CertificateError::Parse(_))
        ));
    }

    #[test]
    fn ecdsa_certificate_is_unsupported() {
        let key = rcgen::KeyPair::generate().unwrap();
        let params = rcgen::CertificateParams::new(vec!["localhost".to_owned()]).unwrap();
        let cert = params.self_signed(&key).unwrap();
        assert!(matches!(
            extract_certificate_info(cert.der()),
            Err(CertificateError::UnsupportedKey(_))
        ));
    }

    #[test]
    fn pem_without_certificate() {
        assert!(matches!(certificate_der_from_pem(b""), Err(CertificateError::NoPem)));
    }
}
