//! Blocking HTTPS client for one actor, speaking the server's JSON API.

use std::net::SocketAddr;
use std::time::Duration;

use reqwest::blocking::{multipart, Client, Response};
use reqwest::StatusCode;
use serde_json::Value;

/// A request the server answered with a non-success status, or one that
/// never got an answer.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{method} {path}: {}", match .status { Some(s) => format!("{s} {body}"), None => body.clone() })]
pub struct HttpFailure {
    pub method: &'static str,
    pub path: String,
    pub status: Option<StatusCode>,
    pub body: String,
}

pub struct ActorClient {
    client: Client,
    base: String,
}

impl ActorClient {
    /// `identity_pem` holds a private key and certificate; `None` connects
    /// without a client certificate. `localhost` resolves to `addr`.
    pub fn new(addr: SocketAddr, server_cert_pem: &[u8], identity_pem: Option<&[u8]>) -> Result<Self, String> {
        let ca = reqwest::Certificate::from_pem(server_cert_pem).map_err(|e| format!("server certificate: {e}"))?;
        let mut builder = Client::builder()
            .tls_certs_only([ca])
            .resolve("localhost", addr)
            .timeout(Duration::from_secs(30));
        if let Some(pem) = identity_pem {
            builder = builder.identity(reqwest::Identity::from_pem(pem).map_err(|e| format!("client identity: {e}"))?);
        }
        let client = builder.build().map_err(|e| format!("HTTP client: {e}"))?;
        Ok(ActorClient {
            client,
            base: format!("https://localhost:{}", addr.port()),
        })
    }

    fn check(method: &'static str, path: &str, sent: reqwest::Result<Response>) -> Result<Response, HttpFailure> {
        let failure = |status, body| HttpFailure {
            method,
            path: path.to_owned(),
            status,
            body,
        };
        let resp = sent.map_err(|e| failure(None, e.to_string()))?;
        if resp.status().is_success() {
            Ok(resp)
        } else {
            let status = resp.status();
            Err(failure(Some(status), resp.text().unwrap_or_default()))
        }
    }

    fn json(method: &'static str, path: &str, resp: Response) -> Result<Value, HttpFailure> {
        resp.json().map_err(|e| HttpFailure {
            method,
            path: path.to_owned(),
            status: None,
            body: format!("invalid JSON response: {e}"),
        })
    }

    pub fn get_text(&self, path: &str) -> Result<String, HttpFailure> {
        let resp = Self::check("GET", path, self.client.get(format!("{}{path}", self.base)).send())?;
        resp.text().map_err(|e| HttpFailure {
            method: "GET",
            path: path.to_owned(),
            status: None,
            body: e.to_string(),
        })
    }

    pub fn get_bytes(&self, path: &str) -> Result<Vec<u8>, HttpFailure> {
        let resp = Self::check("GET", path, self.client.get(format!("{}{path}", self.base)).send())?;
        resp.bytes().map(|b| b.to_vec()).map_err(|e| HttpFailure {
            method: "GET",
            path: path.to_owned(),
            status: None,
            body: e.to_string(),
        })
    }

    pub fn get_query(&self, path: &str, query: &[(&str, &str)]) -> Result<String, HttpFailure> {
        let resp = Self::check(
            "GET",
            path,
            self.client.get(format!("{}{path}", self.base)).query(query).send(),
        )?;
        resp.text().map_err(|e| HttpFailure {
            method: "GET",
            path: path.to_owned(),
            status: None,
            body: e.to_string(),
        })
    }

    pub fn post_json(&self, path: &str, body: &Value) -> Result<Value, HttpFailure> {
        let resp = Self::check(
            "POST",
            path,
            self.client.post(format!("{}{path}", self.base)).json(body).send(),
        )?;
        Self::json("POST", path, resp)
    }

    pub fn action(&self, name: &str, body: Value) -> Result<Value, HttpFailure> {
        self.post_json(&format!("/action/{name}"), &body)
    }

    pub fn export(&self, owner: &str) -> Result<Vec<u8>, HttpFailure> {
        self.get_bytes(&format!("/export/{owner}.zip"))
    }

    pub fn import(&self, package: Vec<u8>) -> Result<Value, HttpFailure> {
        let resp = Self::check(
            "POST",
            "/import",
            self.client
                .post(format!("{}/import", self.base))
                .header(reqwest::header::CONTENT_TYPE, "application/zip")
                .body(package)
                .send(),
        )?;
        Self::json("POST", "/import", resp)
    }

    pub fn upload(&self, file_name: &str, media_type: &str, bytes: Vec<u8>) -> Result<Value, HttpFailure> {
        let part = multipart::Part::bytes(bytes)
            .file_name(file_name.to_owned())
            .mime_str(media_type)
            .map_err(|e| HttpFailure {
                method: "POST",
                path: "/upload".into(),
                status: None,
                body: e.to_string(),
            })?;
        let form = multipart::Form::new().part("file", part);
        let resp = Self::check(
            "POST",
            "/upload",
            self.client.post(format!("{}/upload", self.base)).multipart(form).send(),
        )?;
        Self::json("POST", "/upload", resp)
    }
}
