use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use webcas_cli::workdir::{Workdir, CONFIG_FILE};
use webcas_core::rdf::{parse_document, Iri, Syntax};

fn webcas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_webcas")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_identity_writes_files_and_refuses_to_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("student");
    let webid = "https://localhost:8443/webid/student#id";
    let out = webcas(&["gen-identity", "--name", "student", "--webid", webid, "--out-dir", p(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), webid);
    let profile = std::fs::read_to_string(out_dir.join("profile.ttl")).unwrap();
    let triples = parse_document(&profile, Some(&Iri::new(webid).unwrap()), Syntax::Turtle).unwrap();
    assert_eq!(triples.len(), 5);

    let cert = std::fs::read(out_dir.join("cert.pem")).unwrap();
    let again = webcas(&["--json", "gen-identity", "--name", "student", "--webid", webid, "--out-dir", p(&out_dir)]);
    assert_eq!(again.status.code(), Some(4));
    assert_eq!(json(&again)["error"], "exists");
    assert_eq!(std::fs::read(out_dir.join("cert.pem")).unwrap(), cert);
}

#[test]
fn usage_errors_exit_2_and_missing_config_exits_5() {
    assert_eq!(webcas(&["workflow", "--decision", "maybe"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.toml");
    let out = webcas(&["--config", p(&missing), "grant", "--actor", "student", "--webid", "https://x.example/#me"]);
    assert_eq!(out.status.code(), Some(5), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn offline_exchange_and_permissions() {
    let dir = tempfile::tempdir().unwrap();
    let work = Workdir::prepare(dir.path(), 2048).unwrap();
    let config = dir.path().join(CONFIG_FILE);
    let config = p(&config);
    let hmsc = work.webid("hmsc").unwrap();

    let grant = webcas(&["--config", config, "--json", "grant", "--actor", "student", "--webid", &hmsc]);
    assert!(grant.status.success(), "{}", String::from_utf8_lossy(&grant.stderr));
    assert_eq!(json(&grant)["changed"], true);
    let again = webcas(&["--config", config, "--json", "grant", "--actor", "student", "--webid", &hmsc]);
    assert_eq!(json(&again)["changed"], false);

    let zip = dir.path().join("student.zip");
    let export = webcas(&["--config", config, "--json", "export", "--actor", "student", "--out", p(&zip)]);
    assert!(export.status.success(), "{}", String::from_utf8_lossy(&export.stderr));
    assert_eq!(json(&export)["bytes"], std::fs::metadata(&zip).unwrap().len());

    let import = webcas(&["--config", config, "--json", "import", "--actor", "hmsc", "--package", p(&zip)]);
    assert!(import.status.success(), "{}", String::from_utf8_lossy(&import.stderr));
    // The student's seed triples: its class and its WebID.
    assert_eq!(json(&import)["triples_added"], 2);
    let twice = webcas(&["--config", config, "--json", "import", "--actor", "hmsc", "--package", p(&zip)]);
    assert_eq!(json(&twice)["triples_added"], 0);

    let revoke = webcas(&["--config", config, "--json", "revoke", "--actor", "student", "--webid", &hmsc]);
    assert_eq!(json(&revoke)["changed"], true);

    std::fs::write(&zip, b"not a zip").unwrap();
    let bad = webcas(&["--config", config, "--json", "import", "--actor", "hmsc", "--package", p(&zip)]);
    assert_eq!(bad.status.code(), Some(8));
    assert_eq!(json(&bad)["error"], "malformed-package");

    let unknown = webcas(&["--config", config, "grant", "--actor", "nobody", "--webid", &hmsc]);
    assert_eq!(unknown.status.code(), Some(3));
}
