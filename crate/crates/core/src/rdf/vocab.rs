//! Namespace constants used across the crate.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
    pub const HEX_BINARY: &str = "http://www.w3.org/2001/XMLSchema#hexBinary";
}

pub mod foaf {
    pub const NS: &str = "http://xmlns.com/foaf/0.1/";
    pub const PERSON: &str = "http://xmlns.com/foaf/0.1/Person";
}

pub mod cert {
    pub const NS: &str = "http://www.w3.org/ns/auth/cert#";
    pub const KEY: &str = "http://www.w3.org/ns/auth/cert#key";
    pub const RSA_PUBLIC_KEY: &str = "http://www.w3.org/ns/auth/cert#RSAPublicKey";
    pub const MODULUS: &str = "http://www.w3.org/ns/auth/cert#modulus";
    pub const EXPONENT: &str = "http://www.w3.org/ns/auth/cert#exponent";
}

/// Identity-linking vocabulary.
pub mod psid {
    pub const NS: &str = "http://persemid.bfh.ch/vocab/psid#";
    /// Asserted from one WebID towards another it denotes the same subject as.
    pub const LINKED_IDENTITY: &str = "http://persemid.bfh.ch/vocab/psid#linkedIdentity";
}

/// Prefixes written by default when serializing Turtle.
pub const DEFAULT_PREFIXES: &[(&str, &str)] = &[
    ("rdf", rdf::NS),
    ("rdfs", rdfs::NS),
    ("xsd", xsd::NS),
    ("foaf", foaf::NS),
    ("cert", cert::NS),
    ("psid", psid::NS),
];
