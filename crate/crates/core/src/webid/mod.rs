//! WebID-TLS: client certificate inspection, FOAF key profiles, verification
//! of a certificate against the profiles named in its SAN, and checks for
//! whether two certificates denote the same identity.

mod cert;
mod identity;
mod interlink;
mod profile;
mod verify;

use std::fmt;

pub use cert::{certificate_der_from_pem, extract_certificate_info, rsa_key_from_spki_der, CertificateError, CertificateInfo};
pub use identity::{generate_identity, generate_identity_with, issue_certificate, Identity, IdentityError, IdentityOptions, Validity};
pub use interlink::{check_interlink, Interlink, InterlinkMethod};
pub use profile::{profile_triples, ProfileError, WebIdProfile};
pub use verify::{verify_webid, FetchError, FetchedProfile, ProfileFetcher, StaticFetcher, VerificationResult};

/// An RSA public key with its modulus in canonical form: big-endian with
/// leading zero bytes removed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RsaKey {
    modulus: Vec<u8>,
    exponent: u64,
}

impl RsaKey {
    /// Fails on an all-zero modulus or an exponent that is even or below 3.
    pub fn new(modulus: &[u8], exponent: u64) -> Result<Self, String> {
        let key = Self::normalized(modulus, exponent);
        if key.modulus.is_empty() {
            return Err("modulus is zero".into());
        }
        if exponent < 3 || exponent % 2 == 0 {
            return Err(format!("exponent {exponent} must be odd and at least 3"));
        }
        Ok(key)
    }

    /// Parses an `xsd:hexBinary` modulus. Case-insensitive; surrounding
    /// whitespace is ignored.
    pub fn from_hex(modulus_hex: &str, exponent: u64) -> Result<Self, String> {
        let bytes = hex::decode(modulus_hex.trim()).map_err(|e| format!("bad hexBinary modulus: {e}"))?;
        Self::new(&bytes, exponent)
    }

    fn normalized(modulus: &[u8], exponent: u64) -> Self {
        let start = modulus.iter().position(|b| *b != 0).unwrap_or(modulus.len());
        RsaKey {
            modulus: modulus[start..].to_vec(),
            exponent,
        }
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Lowercase hex without leading zero bytes.
    pub fn modulus_hex(&self) -> String {
        hex::encode(&self.modulus)
    }

    pub fn bits(&self) -> usize {
        match self.modulus.first() {
            Some(b) => self.modulus.len() * 8 - b.leading_zeros() as usize,
            None => 0,
        }
    }
}

impl fmt::Debug for RsaKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hex = self.modulus_hex();
        let head = &hex[..hex.len().min(16)];
        write!(f, "RsaKey({} bits, e={}, n={head}..)", self.bits(), self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_zeros_and_case_are_ignored() {
        let a = RsaKey::from_hex("00C2BCf492", 65537).unwrap();
        let b = RsaKey::from_hex("c2bcf492", 65537).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.modulus_hex(), "c2bcf492");
        assert_eq!(a.bits(), 32);
    }

    #[test]
    fn invalid_keys() {
        assert!(RsaKey::new(&[0, 0], 65537).is_err());
        assert!(RsaKey::new(&[1], 65536).is_err());
        assert!(RsaKey::new(&[1], 1).is_err());
        assert!(RsaKey::from_hex("c2bcf49", 3).is_err());
        assert!(RsaKey::from_hex("c2bc [ ... ] f492", 3).is_err());
    }
}
