use rand::RngCore;
use rcgen::string::Ia5String;
use rcgen::{
    CertificateParams, DistinguishedName, DnType, KeyPair, PublicKeyData, RsaKeySize, SanType, SerialNumber,
    PKCS_RSA_SHA256,
};
use time::{Duration, OffsetDateTime};

use super::cert::{extract_certificate_info, rsa_key_from_spki_der, CertificateError, CertificateInfo};
use super::profile::profile_triples;
use super::RsaKey;
use crate::ops;
use crate::rdf::{serialize_document, Iri, Syntax, Triple};

#[derive(Debug, thiserror::Error)]
pub enum IdentityError {
    #[error("RSA keys need at least 2048 bits, got {0}")]
    KeyTooSmall(u32),
    #[error("unsupported RSA key size {0}; use 2048, 3072 or 4096")]
    UnsupportedKeySize(u32),
    #[error("profile IRI {0} has no fragment (expected something like #id)")]
    MissingFragment(String),
    #[error("invalid SAN URI {0}")]
    InvalidSan(String),
    #[error("key generation failed: {0}")]
    KeyGeneration(String),
    #[error("certificate generation failed: {0}")]
    Certificate(String),
    #[error(transparent)]
    Inspect(#[from] CertificateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validity {
    pub not_before: OffsetDateTime,
    pub not_after: OffsetDateTime,
}

impl Validity {
    /// One year starting now.
    pub fn one_year() -> Self {
        let now = OffsetDateTime::now_utc();
        Validity {
            not_before: now,
            not_after: now + Duration::days(365),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IdentityOptions {
    pub key_bits: u32,
    pub validity: Validity,
    /// Leave the SAN extension out of the certificate entirely.
    pub omit_san: bool,
}

impl IdentityOptions {
    pub fn new(key_bits: u32) -> Self {
        IdentityOptions {
            key_bits,
            validity: Validity::one_year(),
            omit_san: false,
        }
    }
}

/// A freshly generated key pair, its self-signed certificate and the
/// matching FOAF profile.
#[derive(Debug, Clone)]
pub struct Identity {
    pub name: String,
    pub webid: Iri,
    /// PKCS#8 PEM.
    pub private_key_pem: String,
    pub certificate_der: Vec<u8>,
    pub certificate_pem: String,
    pub key: RsaKey,
    pub profile: Vec<Triple>,
}

impl Identity {
    pub fn profile_turtle(&self) -> String {
        serialize_document(&self.profile, Syntax::Turtle)
    }

    pub fn certificate_info(&self) -> Result<CertificateInfo, CertificateError> {
        extract_certificate_info(&self.certificate_der)
    }
}

pub fn generate_identity(name: &str, profile_uri: &Iri, key_bits: u32) -> Result<Identity, IdentityError> {
    generate_identity_with(name, profile_uri, &IdentityOptions::new(key_bits))
}

pub fn generate_identity_with(name: &str, profile_uri: &Iri, options: &IdentityOptions) -> Result<Identity, IdentityError> {
    ops::record("generate_identity");
    if profile_uri.fragment().is_none() {
        return Err(IdentityError::MissingFragment(profile_uri.to_string()));
    }
    let size = match options.key_bits {
        2048 => RsaKeySize::_2048,
        3072 => RsaKeySize::_3072,
        4096 => RsaKeySize::_4096,
        b if b < 2048 => return Err(IdentityError::KeyTooSmall(b)),
        b => return Err(IdentityError::UnsupportedKeySize(b)),
    };
    let key_pair =
        KeyPair::generate_rsa_for(&PKCS_RSA_SHA256, size).map_err(|e| IdentityError::KeyGeneration(e.to_string()))?;
    let sans = if options.omit_san {
        Vec::new()
    } else {
        vec![profile_uri.clone()]
    };
    let (certificate_der, certificate_pem) = sign(&key_pair, name, &sans, options.validity)?;
    // The profile is built from the key pair itself, not from the certificate.
    let key = rsa_key_from_spki_der(&key_pair.subject_public_key_info())?;
    Ok(Identity {
        name: name.to_owned(),
        webid: profile_uri.clone(),
        private_key_pem: key_pair.serialize_pem(),
        profile: profile_triples(profile_uri, std::slice::from_ref(&key)),
        certificate_der,
        certificate_pem,
        key,
    })
}

/// Issues another self-signed certificate for an existing PKCS#8 RSA key.
/// Returns the certificate as DER and PEM.
pub fn issue_certificate(
    private_key_pem: &str,
    name: &str,
    sans: &[Iri],
    validity: Validity,
) -> Result<(Vec<u8>, String), IdentityError> {
    let key_pair = KeyPair::from_pkcs8_pem_and_sign_algo(private_key_pem, &PKCS_RSA_SHA256)
        .map_err(|e| IdentityError::KeyGeneration(e.to_string()))?;
    sign(&key_pair, name, sans, validity)
}

fn sign(key_pair: &KeyPair, name: &str, sans: &[Iri], validity: Validity) -> Result<(Vec<u8>, String), IdentityError> {
    let mut params = CertificateParams::default();
    let mut dn = DistinguishedName::new();
    dn.push(DnType::CommonName, name);
    params.distinguished_name = dn;
    params.not_before = validity.not_before;
    params.not_after = validity.not_after;
    let mut serial = [0u8; 16];
    rand::thread_rng().fill_bytes(&mut serial);
    serial[0] &= 0x7f;
    params.serial_number = Some(SerialNumber::from_slice(&serial));
    for san in sans {
        let uri = Ia5String::try_from(san.as_str()).map_err(|_| IdentityError::InvalidSan(san.to_string()))?;
        params.subject_alt_names.push(SanType::URI(uri));
    }
    let cert = params
        .self_signed(key_pair)
        .map_err(|e| IdentityError::Certificate(e.to_string()))?;
    Ok((cert.der().to_vec(), cert.pem()))
}
