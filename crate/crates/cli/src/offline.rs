//! Commands that work on the dataset directly, without a running server.
//! They must not run while `serve` holds the same dataset: the server
//! would not see the change and its next write would overwrite it.

use std::fs;
use std::path::Path;

use webcas_core::cas::{Actor, ContentAccessService};
use webcas_core::exchange::{parse_package, ImportSummary};
use webcas_core::rdf::{Dataset, Iri};
use webcas_server::ServerConfig;

use crate::CliError;

pub fn open_service(config: &ServerConfig) -> Result<ContentAccessService, CliError> {
    let actors = config.actors()?;
    fs::create_dir_all(&config.storage_root).map_err(|e| CliError::io(&config.storage_root, e))?;
    let dataset = Dataset::open(config.dataset.clone()).map_err(webcas_core::cas::CasError::from)?;
    Ok(ContentAccessService::open(dataset, config.storage_root.clone(), actors)?)
}

fn actor<'a>(service: &'a ContentAccessService, name: &str) -> Result<&'a Actor, CliError> {
    service
        .actor(name)
        .ok_or_else(|| CliError::Config(format!("no actor named {name}")))
}

/// Writes the actor's export package to `out` and returns its size.
pub fn export(config: &ServerConfig, name: &str, out: &Path) -> Result<usize, CliError> {
    let service = open_service(config)?;
    let zip = service.export(actor(&service, name)?)?;
    fs::write(out, &zip).map_err(|e| CliError::io(out, e))?;
    Ok(zip.len())
}

pub fn import(config: &ServerConfig, name: &str, package: &Path) -> Result<ImportSummary, CliError> {
    let bytes = fs::read(package).map_err(|e| CliError::io(package, e))?;
    let package = parse_package(&bytes)?;
    let service = open_service(config)?;
    Ok(service.import(actor(&service, name)?, &package)?)
}

/// Grants or revokes read access to `name`'s graph. Returns whether
/// anything changed.
pub fn set_permission(config: &ServerConfig, name: &str, webid: &str, grant: bool) -> Result<bool, CliError> {
    let webid = Iri::new(webid).map_err(|e| CliError::Config(format!("WebID {webid:?}: {e}")))?;
    let service = open_service(config)?;
    Ok(service.set_permission(actor(&service, name)?, &webid, grant)?)
}
