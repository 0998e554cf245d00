use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::multipart::MultipartRejection;
use axum::extract::rejection::{BytesRejection, JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use tower_http::services::ServeDir;
use webcas_core::cas::{export_exclusions, permissions, Actor, CasError, ContentAccessService};
use webcas_core::exchange::parse_package;
use webcas_core::ops;
use webcas_core::rdf::{parse_document, parse_term, write_nquads, write_ntriples, Iri, Quad, Syntax, Term, Triple};

use crate::api::*;
use crate::auth::Requester;
use crate::error::ApiError;
use crate::fetch::ServerFetcher;

const DECISIONS: &[&str] = &["accepted", "rejected"];
// Headroom for multipart boundaries and part headers.
const MULTIPART_OVERHEAD: usize = 64 * 1024;

#[derive(Clone)]
pub struct AppState {
    pub service: Arc<ContentAccessService>,
    pub fetcher: Arc<ServerFetcher>,
    /// actor name -> Turtle profile
    pub profiles: Arc<HashMap<String, String>>,
    pub max_upload_bytes: usize,
    pub max_import_bytes: usize,
}

impl AppState {
    fn actor(&self, name: &str) -> Result<Actor, ApiError> {
        self.service
            .actor(name)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no actor named {name:?}")))
    }
}

pub fn router(state: AppState, static_root: Option<&std::path::Path>) -> Router {
    let upload_limit = state.max_upload_bytes + MULTIPART_OVERHEAD;
    let import_limit = state.max_import_bytes;
    let mut app = Router::new()
        .route("/webid/{actor}", get(profile))
        .route("/store", get(store_query).post(store_update))
        .route("/upload", post(upload).layer(DefaultBodyLimit::max(upload_limit)))
        .route("/export/{file}", get(export))
        .route("/import", post(import).layer(DefaultBodyLimit::max(import_limit)))
        .route("/action/{name}", post(action));
    if let Some(root) = static_root {
        app = app.nest_service("/static", ServeDir::new(root));
    }
    app.with_state(state)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

fn parse_iri(value: &str, what: &str) -> Result<Iri, ApiError> {
    Iri::new(value).map_err(|e| ApiError::bad_request("malformed-request", format!("{what}: {e}")))
}

async fn profile(State(state): State<AppState>, Path(actor): Path<String>) -> Result<Response, ApiError> {
    ops::record("handle_profile");
    let body = state
        .profiles
        .get(&actor)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no profile for {actor:?}")))?;
    Ok(([(header::CONTENT_TYPE, "text/turtle; charset=utf-8")], body).into_response())
}

#[derive(Debug, Deserialize)]
struct Pattern {
    graph: Option<String>,
    s: Option<String>,
    p: Option<String>,
    o: Option<String>,
}

fn pattern_term(value: &Option<String>, what: &str) -> Result<Option<Term>, ApiError> {
    value
        .as_deref()
        .filter(|v| !v.trim().is_empty())
        .map(|v| parse_term(v).map_err(|e| ApiError::bad_request("malformed-query", format!("{what}: {e}"))))
        .transpose()
}

/// Pattern query. With `graph` the answer is N-Triples from that graph;
/// without, N-Quads from every graph the requester may read.
async fn store_query(
    State(state): State<AppState>,
    requester: Requester,
    query: Result<Query<Pattern>, QueryRejection>,
) -> Result<Response, ApiError> {
    ops::record("handle_store_proxy");
    let webid = requester.require()?.clone();
    let Query(q) = query.map_err(|e| ApiError::bad_request("malformed-query", e.body_text()))?;
    let graph = match pattern_term(&q.graph, "graph")? {
        None => None,
        Some(Term::Iri(g)) => Some(g),
        Some(_) => return Err(ApiError::bad_request("malformed-query", "graph must be an IRI")),
    };
    let subject = match pattern_term(&q.s, "s")? {
        None => None,
        Some(t) => Some(
            t.to_subject()
                .ok_or_else(|| ApiError::bad_request("malformed-query", "a literal cannot be a subject"))?,
        ),
    };
    let predicate = match pattern_term(&q.p, "p")? {
        None => None,
        Some(Term::Iri(p)) => Some(p),
        Some(_) => return Err(ApiError::bad_request("malformed-query", "predicate must be an IRI")),
    };
    let object = pattern_term(&q.o, "o")?;

    let store = state.service.dataset().read();
    let readable: Vec<&Actor> = match &graph {
        Some(g) => {
            let owner = state
                .service
                .actors()
                .iter()
                .find(|a| &a.iri == g)
                .ok_or_else(|| ApiError::forbidden(format!("{webid} may not read {g}")))?;
            requester.authorize_read(&store, owner)?;
            vec![owner]
        }
        None => state
            .service
            .actors()
            .iter()
            .filter(|a| requester.authorize_read(&store, a).is_ok())
            .collect(),
    };
    let quads: Vec<Quad> = readable
        .iter()
        .flat_map(|a| store.match_pattern(Some(&a.iri), subject.as_ref(), predicate.as_ref(), object.as_ref()))
        .collect();
    drop(store);
    Ok(if graph.is_some() {
        let triples: Vec<&Triple> = quads.iter().map(|q| &q.triple).collect();
        (
            [(header::CONTENT_TYPE, "application/n-triples")],
            write_ntriples(triples),
        )
            .into_response()
    } else {
        ([(header::CONTENT_TYPE, "application/n-quads")], write_nquads(&quads)).into_response()
    })
}

fn json_body<T: DeserializeOwned>(body: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    body.map(|Json(v)| v)
        .map_err(|e| ApiError::bad_request("malformed-request", e.body_text()))
}

/// Inserts and deletes triples in the requester's own graph.
async fn store_update(
    State(state): State<AppState>,
    requester: Requester,
    body: Result<Json<StoreUpdate>, JsonRejection>,
) -> Result<Json<StoreUpdated>, ApiError> {
    ops::record("handle_store_proxy");
    let actor = requester.own_actor(&state)?;
    let update = json_body(body)?;
    if let Some(g) = &update.graph {
        let g = parse_iri(g, "graph")?;
        if g != actor.iri {
            return Err(ApiError::forbidden(format!("{} may only change its own graph", actor.name)));
        }
    }
    let parse = |text: &str| {
        parse_document(text, Some(&actor.iri), Syntax::Turtle)
            .map_err(|e| ApiError::bad_request("malformed-rdf", e.to_string()))
    };
    let delete = parse(&update.delete)?;
    let insert = parse(&update.insert)?;
    let service = state.service.clone();
    let updated = blocking(move || {
        service.dataset().write(|store| {
            let deleted = delete.iter().filter(|t| store.remove(&actor.iri, t)).count();
            let inserted = store.insert_document(&actor.iri, insert);
            Ok::<_, CasError>(StoreUpdated { deleted, inserted })
        })
        .map_err(ApiError::from)
    })
    .await?;
    Ok(Json(updated))
}

async fn upload(
    State(state): State<AppState>,
    requester: Requester,
    multipart: Result<Multipart, MultipartRejection>,
) -> Result<Json<DocumentSummary>, ApiError> {
    ops::record("handle_upload");
    let actor = requester.own_actor(&state)?;
    let mut multipart = multipart.map_err(|e| ApiError::bad_request("malformed-request", e.body_text()))?;
    let part_error = |e: axum::extract::multipart::MultipartError| {
        let status = e.status();
        let category = if status == StatusCode::PAYLOAD_TOO_LARGE { "too-large" } else { "malformed-request" };
        ApiError::new(status, category, e.body_text())
    };
    let too_large = || {
        ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "too-large",
            format!("documents are limited to {} bytes", state.max_upload_bytes),
        )
    };
    while let Some(field) = multipart.next_field().await.map_err(part_error)? {
        let Some(file_name) = field.file_name().map(str::to_owned) else {
            continue;
        };
        let media_type = field
            .content_type()
            .unwrap_or("application/octet-stream")
            .to_owned();
        let bytes = field.bytes().await.map_err(part_error)?;
        if bytes.len() > state.max_upload_bytes {
            return Err(too_large());
        }
        let service = state.service.clone();
        let record = blocking(move || Ok(service.store_document(&actor, &file_name, &media_type, &bytes)?)).await?;
        return Ok(Json(DocumentSummary::from(&record)));
    }
    Err(ApiError::bad_request("missing-file", "no file part in the upload"))
}

/// `GET /export/<owner>.zip`, the owner's configured selection.
async fn export(
    State(state): State<AppState>,
    requester: Requester,
    Path(file): Path<String>,
) -> Result<Response, ApiError> {
    ops::record("handle_zip");
    requester.require()?;
    let name = file
        .strip_suffix(".zip")
        .ok_or_else(|| ApiError::not_found(format!("no export named {file:?}")))?;
    let owner = state.actor(name)?;
    requester.authorize_read(&state.service.dataset().read(), &owner)?;
    let service = state.service.clone();
    let zip = {
        let owner = owner.clone();
        blocking(move || Ok(service.export(&owner)?)).await?
    };
    let disposition = format!("attachment; filename=\"export-{}.zip\"", owner.name);
    Ok((
        [
            (header::CONTENT_TYPE, "application/zip".to_owned()),
            (header::CONTENT_DISPOSITION, disposition),
        ],
        zip,
    )
        .into_response())
}

/// `POST /import` with a package as the request body.
async fn import(
    State(state): State<AppState>,
    requester: Requester,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    ops::record("handle_zip");
    let actor = requester.own_actor(&state)?;
    let body = body.map_err(|e| {
        let status = e.status();
        let category = if status == StatusCode::PAYLOAD_TOO_LARGE { "too-large" } else { "malformed-request" };
        ApiError::new(status, category, e.body_text())
    })?;
    let service = state.service.clone();
    let summary = blocking(move || {
        let package = parse_package(&body)?;
        Ok(service.import(&actor, &package)?)
    })
    .await?;
    Ok(Json(summary).into_response())
}

fn action_args<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let text: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(text).map_err(|e| ApiError::bad_request("malformed-request", e.to_string()))
}

/// `POST /action/<name>` with a JSON object (or nothing) as the body.
async fn action(
    State(state): State<AppState>,
    requester: Requester,
    Path(name): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    if name == "whoami" {
        let actor = requester.webid.as_ref().and_then(|w| state.service.actor_for_webid(w));
        return Ok(Json(WhoAmI {
            authenticated: requester.webid.is_some(),
            webid: requester.webid.as_ref().map(|w| w.as_str().to_owned()),
            actor: actor.map(|a| a.name.clone()),
            class: actor.map(|a| a.vocabulary.class().local_name().to_owned()),
            vocabulary: actor.map(|a| a.vocabulary.namespace().to_owned()),
            verification: requester.outcome.clone(),
            detail: requester.detail.clone(),
        })
        .into_response());
    }
    let actor = requester.own_actor(&state)?;
    let service = state.service.clone();
    match name.as_str() {
        "list-own-data" => {
            let store = service.dataset().read();
            let triples: Vec<&Triple> = store.graph(&actor.iri).into_iter().flatten().collect();
            let data = OwnData {
                actor: actor.name.clone(),
                graph: actor.iri.as_str().to_owned(),
                triple_count: triples.len(),
                ntriples: write_ntriples(triples),
                permissions: permissions(&store, &actor).iter().map(|i| i.as_str().to_owned()).collect(),
                export_exclude: export_exclusions(&store, &actor)
                    .iter()
                    .map(|i| i.as_str().to_owned())
                    .collect(),
            };
            Ok(Json(data).into_response())
        }
        "set-permission" => {
            let args: SetPermission = action_args(&body)?;
            let webid = parse_iri(&args.webid, "webid")?;
            let changed = blocking(move || Ok(service.set_permission(&actor, &webid, args.grant)?)).await?;
            Ok(Json(serde_json::json!({ "changed": changed })).into_response())
        }
        "set-selection" => {
            let args: SetSelection = action_args(&body)?;
            let subjects = args
                .exclude
                .iter()
                .map(|s| parse_iri(s, "exclude"))
                .collect::<Result<Vec<_>, _>>()?;
            let count = subjects.len();
            blocking(move || Ok(service.set_export_exclusions(&actor, &subjects)?)).await?;
            Ok(Json(serde_json::json!({ "excluded": count })).into_response())
        }
        "list-documents" => {
            let docs: Vec<DocumentSummary> = service.list_documents(&actor).iter().map(Into::into).collect();
            Ok(Json(serde_json::json!({ "documents": docs })).into_response())
        }
        "get-document" => {
            let args: GetDocument = action_args(&body)?;
            let (record, bytes) = blocking(move || Ok(service.get_document(&actor, &args.handle)?)).await?;
            Ok(Json(DocumentContent {
                document: DocumentSummary::from(&record),
                content_base64: base64::engine::general_purpose::STANDARD.encode(bytes),
            })
            .into_response())
        }
        "record-decision" => {
            let args: RecordDecision = action_args(&body)?;
            if !DECISIONS.contains(&args.decision.as_str()) {
                return Err(ApiError::bad_request(
                    "malformed-request",
                    format!("decision must be one of {DECISIONS:?}"),
                ));
            }
            let applicant = parse_iri(&args.applicant, "applicant")?;
            let subject =
                blocking(move || Ok(service.record_decision(&actor, &applicant, &args.decision)?)).await?;
            Ok(Json(serde_json::json!({ "subject": subject.as_str() })).into_response())
        }
        _ => Err(ApiError::not_found(format!("unknown action {name:?}"))),
    }
}
