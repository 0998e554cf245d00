//! The scripted enrollment workflow between a student, the bachelor
//! university (`hbsc`) and the master university (`hmsc`).

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use base64::Engine;
use serde::Serialize;
use serde_json::{json, Value};
use webcas_core::cas::find_decision;
use webcas_core::exchange::parse_package;
use webcas_core::ops;
use webcas_core::rdf::Iri;
use webcas_core::webid::{check_interlink, CertificateInfo, Interlink, StaticFetcher};

use crate::client::{ActorClient, HttpFailure};
use crate::runtime::BackgroundServer;
use crate::workdir::{Workdir, ACTORS};
use crate::CliError;

pub const DOCUMENT_NAME: &str = "Curriculum.pdf";
pub const DOCUMENT_TYPE: &str = "application/pdf";
pub const DOCUMENT_SIZE: usize = 605_660;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accepted,
    Rejected,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accepted => "accepted",
            Decision::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone)]
pub struct WorkflowOptions {
    pub workdir: PathBuf,
    pub decision: Decision,
    /// Leaves out the student's grant to the master university.
    pub skip_grant: bool,
    /// Talk to a server that is already running with the workdir's
    /// configuration instead of starting one.
    pub external_server: bool,
    pub key_bits: u32,
}

impl WorkflowOptions {
    pub fn new(workdir: impl Into<PathBuf>) -> Self {
        WorkflowOptions {
            workdir: workdir.into(),
            decision: Decision::Accepted,
            skip_grant: false,
            external_server: false,
            key_bits: 2048,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub number: usize,
    pub name: &'static str,
    pub detail: String,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ImportCount {
    pub triples_added: u64,
    pub files_added: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorkflowReport {
    pub steps: Vec<StepReport>,
    pub recorded_decision: String,
    pub decision: String,
    /// Result of each import, keyed by step name.
    pub imports: HashMap<&'static str, ImportCount>,
    pub elapsed_ms: u128,
}

pub const STEPS: [&str; 7] = [
    "seed",
    "student-import",
    "upload",
    "grant",
    "master-import",
    "decision",
    "student-retrieval",
];

struct Run<'a> {
    out: &'a mut dyn Write,
    steps: Vec<StepReport>,
    imports: HashMap<&'static str, ImportCount>,
}

impl Run<'_> {
    fn step(
        &mut self,
        number: usize,
        f: impl FnOnce(&mut HashMap<&'static str, ImportCount>) -> Result<String, String>,
    ) -> Result<(), CliError> {
        let name = STEPS[number - 1];
        let started = Instant::now();
        let _ = write!(self.out, "[{number}/7] {name} ... ");
        match f(&mut self.imports) {
            Ok(detail) => {
                let _ = writeln!(self.out, "ok: {detail}");
                self.steps.push(StepReport {
                    number,
                    name,
                    detail,
                    elapsed_ms: started.elapsed().as_millis(),
                });
                Ok(())
            }
            Err(detail) => {
                let _ = writeln!(self.out, "FAILED");
                let _ = writeln!(self.out, "  {detail}");
                Err(CliError::Step {
                    step: name.to_owned(),
                    detail,
                })
            }
        }
    }
}

fn http(e: HttpFailure) -> String {
    e.to_string()
}

fn field<'v>(v: &'v Value, key: &str) -> Result<&'v Value, String> {
    v.get(key).ok_or_else(|| format!("response has no {key:?}: {v}"))
}

fn import_count(v: &Value) -> Result<ImportCount, String> {
    let n = |k| field(v, k)?.as_u64().ok_or_else(|| format!("{k} is not a count: {v}"));
    Ok(ImportCount {
        triples_added: n("triples_added")?,
        files_added: n("files_added")?,
    })
}

/// Deterministic stand-in for the student's CV: a PDF header followed by
/// filler, exactly [`DOCUMENT_SIZE`] bytes.
pub fn curriculum_bytes() -> Vec<u8> {
    let mut bytes = b"%PDF-1.4\n% curriculum vitae\n".to_vec();
    let mut x: u32 = 0x9e37_79b9;
    while bytes.len() < DOCUMENT_SIZE - 6 {
        x ^= x << 13;
        x ^= x >> 17;
        x ^= x << 5;
        bytes.push(b' ' + (x % 95) as u8);
    }
    bytes.extend_from_slice(b"\n%%EOF");
    bytes
}

fn decode_document(v: &Value) -> Result<Vec<u8>, String> {
    let b64 = field(v, "content_base64")?
        .as_str()
        .ok_or("content_base64 is not a string")?;
    base64::engine::general_purpose::STANDARD
        .decode(b64)
        .map_err(|e| format!("content_base64: {e}"))
}

struct Actors {
    student: ActorClient,
    hbsc: ActorClient,
    hmsc: ActorClient,
}

/// Fetches every actor profile over HTTPS and checks that no two actor
/// certificates are interlinked.
fn preflight(work: &Workdir, anonymous: &ActorClient) -> Result<(), CliError> {
    let mut fetcher = StaticFetcher::new();
    let mut infos: Vec<(&str, CertificateInfo)> = Vec::new();
    for (name, ..) in ACTORS {
        let body = anonymous
            .get_text(&format!("/webid/{name}"))
            .map_err(|e| CliError::Step {
                step: "preflight".into(),
                detail: e.to_string(),
            })?;
        let webid = Iri::new(&work.webid(name)?).map_err(|e| CliError::Config(e.to_string()))?;
        fetcher.insert(&webid, body);
        infos.push((name, work.identity(name)?.certificate_info()?));
    }
    for (i, (a, ia)) in infos.iter().enumerate() {
        for (b, ib) in &infos[i + 1..] {
            let link = check_interlink(ia, ib, &fetcher);
            if link != Interlink::NotLinked {
                return Err(CliError::Step {
                    step: "preflight".into(),
                    detail: format!("{a} and {b} are {link}; the actors must be distinct identities"),
                });
            }
        }
    }
    Ok(())
}

/// Runs the seven workflow steps, writing a transcript to `out`.
pub fn run_workflow(options: &WorkflowOptions, out: &mut dyn Write) -> Result<WorkflowReport, CliError> {
    ops::record("cmd_workflow");
    let started = Instant::now();
    std::fs::create_dir_all(&options.workdir).map_err(|e| CliError::io(&options.workdir, e))?;
    let work = Workdir::prepare(&options.workdir, options.key_bits)?;
    let _server;
    let addr = if options.external_server {
        work.config.bind
    } else {
        let server = BackgroundServer::start(&work.config)?;
        let addr = server.addr();
        _server = server;
        addr
    };
    let _ = writeln!(out, "server at https://localhost:{}", addr.port());

    let ca = work.server_cert_pem()?;
    let client = |identity: Option<&[u8]>| ActorClient::new(addr, &ca, identity).map_err(CliError::Config);
    let anonymous = client(None)?;
    let actors = Actors {
        student: client(Some(&work.identity("student")?.client_pem()))?,
        hbsc: client(Some(&work.identity("hbsc")?.client_pem()))?,
        hmsc: client(Some(&work.identity("hmsc")?.client_pem()))?,
    };
    preflight(&work, &anonymous)?;
    let _ = writeln!(out, "preflight: profiles served, identities distinct");

    let student_webid = work.webid("student")?;
    let hmsc_webid = work.webid("hmsc")?;
    let student_graph = work.actor("student")?.iri.clone();
    let hbsc_actor = work.actor("hbsc")?.to_actor()?;
    let student_actor = work.actor("student")?.to_actor()?;
    let decision = options.decision.as_str();
    let mut run = Run {
        out,
        steps: Vec::new(),
        imports: HashMap::new(),
    };

    run.step(1, |_| {
        let hbsc = hbsc_actor.vocabulary.namespace();
        let record = format!(
            "@prefix hbsc: <{hbsc}> .\n\
             @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n\
             <#bachelor-student> a hbsc:BachelorDegree ;\n\
             \thbsc:holder <{student_webid}> ;\n\
             \thbsc:degree \"Bachelor of Science in Computer Science\" ;\n\
             \thbsc:grade \"1.7\" ;\n\
             \thbsc:awarded \"2014-09-30\"^^xsd:date .\n"
        );
        let seeded = actors
            .hbsc
            .post_json("/store", &json!({ "delete": "", "insert": record }))
            .map_err(http)?;
        let s = student_actor.vocabulary.namespace();
        let attributes = format!("@prefix s: <{s}> .\n<#> s:givenName \"Alice\" ; s:familyName \"Example\" .\n");
        actors
            .student
            .post_json("/store", &json!({ "delete": "", "insert": attributes }))
            .map_err(http)?;
        actors
            .hbsc
            .action("set-permission", json!({ "webid": student_webid, "grant": true }))
            .map_err(http)?;
        Ok(format!(
            "bachelor record stored ({} new triples), student may read hbsc",
            field(&seeded, "inserted")?
        ))
    })?;

    run.step(2, |imports| {
        let zip = actors.student.export("hbsc").map_err(http)?;
        let summary = actors.student.import(zip).map_err(http)?;
        let count = import_count(&summary)?;
        imports.insert("student-import", count);
        Ok(format!("{} triples, {} files added", count.triples_added, count.files_added))
    })?;

    let content = curriculum_bytes();
    let mut handle = String::new();
    run.step(3, |_| {
        let listed = actors.student.action("list-documents", json!({})).map_err(http)?;
        let documents = field(&listed, "documents")?.as_array().cloned().unwrap_or_default();
        for doc in documents {
            let same_name = doc.get("file_name").and_then(Value::as_str) == Some(DOCUMENT_NAME);
            let same_size = doc.get("file_size").and_then(Value::as_u64) == Some(DOCUMENT_SIZE as u64);
            let Some(h) = doc.get("handle").and_then(Value::as_str) else {
                continue;
            };
            if same_name && same_size {
                let got = actors
                    .student
                    .action("get-document", json!({ "handle": h }))
                    .map_err(http)?;
                if decode_document(&got)? == content {
                    handle = h.to_owned();
                    return Ok(format!("{DOCUMENT_NAME} already stored as {h}"));
                }
            }
        }
        let stored = actors
            .student
            .upload(DOCUMENT_NAME, DOCUMENT_TYPE, content.clone())
            .map_err(http)?;
        let size = field(&stored, "file_size")?.as_u64();
        if size != Some(DOCUMENT_SIZE as u64) {
            return Err(format!("server reports file_size {size:?}, sent {DOCUMENT_SIZE}"));
        }
        handle = field(&stored, "handle")?.as_str().ok_or("handle is not a string")?.to_owned();
        Ok(format!("{DOCUMENT_NAME} stored as {handle} ({DOCUMENT_SIZE} bytes)"))
    })?;

    run.step(4, |_| {
        if options.skip_grant {
            return Ok("skipped".into());
        }
        let changed = actors
            .student
            .action("set-permission", json!({ "webid": hmsc_webid, "grant": true }))
            .map_err(http)?;
        Ok(format!(
            "hmsc may read the student's graph (changed: {})",
            field(&changed, "changed")?
        ))
    })?;

    run.step(5, |imports| {
        let zip = actors.hmsc.export("student").map_err(http)?;
        let summary = actors.hmsc.import(zip).map_err(http)?;
        let count = import_count(&summary)?;
        imports.insert("master-import", count);
        let got = actors
            .hmsc
            .action("get-document", json!({ "handle": handle }))
            .map_err(http)?;
        if decode_document(&got)? != content {
            return Err(format!("imported document {handle} differs from the upload"));
        }
        let size = actors
            .hmsc
            .get_query(
                "/store",
                &[
                    ("graph", &format!("<{}>", student_graph)),
                    ("p", &format!("<{}>", student_actor.vocabulary.term("fileSize").as_str())),
                ],
            )
            .map_err(http)?;
        if !size.contains(&format!("\"{DOCUMENT_SIZE}\"")) {
            return Err(format!("student graph query did not show the document size: {size}"));
        }
        Ok(format!(
            "{} triples, {} files added; document verified",
            count.triples_added, count.files_added
        ))
    })?;

    run.step(6, |_| {
        let recorded = actors
            .hmsc
            .action(
                "record-decision",
                json!({ "applicant": student_webid, "decision": decision }),
            )
            .map_err(http)?;
        actors
            .hmsc
            .action("set-permission", json!({ "webid": student_webid, "grant": true }))
            .map_err(http)?;
        Ok(format!("{decision} recorded at {}", field(&recorded, "subject")?.as_str().unwrap_or_default()))
    })?;

    let mut retrieved = String::new();
    run.step(7, |imports| {
        let zip = actors.student.export("hmsc").map_err(http)?;
        let package = parse_package(&zip).map_err(|e| e.to_string())?;
        let applicant = Iri::new(&student_webid).map_err(|e| e.to_string())?;
        retrieved = find_decision(&package.data_triples, &applicant)
            .ok_or("the master export carries no decision for the student")?;
        let summary = actors.student.import(zip).map_err(http)?;
        let count = import_count(&summary)?;
        imports.insert("student-retrieval", count);
        if retrieved != decision {
            return Err(format!("retrieved decision {retrieved:?}, recorded {decision:?}"));
        }
        Ok(format!("decision: {retrieved}"))
    })?;

    let elapsed_ms = started.elapsed().as_millis();
    let _ = writeln!(run.out, "decision: {retrieved} ({elapsed_ms} ms)");
    Ok(WorkflowReport {
        steps: run.steps,
        recorded_decision: decision.to_owned(),
        decision: retrieved,
        imports: run.imports,
        elapsed_ms,
    })
}
