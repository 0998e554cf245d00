use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use tracing_subscriber::EnvFilter;
use webcas_cli::workflow::WorkflowOptions;
use webcas_cli::{gen_identity, offline, run_workflow, runtime, CliError, Decision};
use webcas_server::ServerConfig;

#[derive(Parser)]
#[command(name = "webcas", version, about = "WebID-authenticated content access service")]
struct Cli {
    /// Server configuration file.
    #[arg(long, global = true, default_value = "webcas.toml")]
    config: PathBuf,
    /// Print results as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a key pair, a certificate naming the WebID and its profile.
    GenIdentity {
        #[arg(long)]
        name: String,
        /// WebID with a fragment, e.g. https://example.org/card#me
        #[arg(long)]
        webid: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 2048)]
        key_bits: u32,
        /// Overwrite existing files.
        #[arg(long)]
        force: bool,
    },
    /// Run the HTTPS server until interrupted.
    Serve,
    /// Write an actor's export package (server must be stopped).
    Export {
        #[arg(long)]
        actor: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Import a package into an actor's graph (server must be stopped).
    Import {
        #[arg(long)]
        actor: String,
        #[arg(long)]
        package: PathBuf,
    },
    /// Let a WebID read an actor's graph (server must be stopped).
    Grant {
        #[arg(long)]
        actor: String,
        #[arg(long)]
        webid: String,
    },
    /// Withdraw a grant (server must be stopped).
    Revoke {
        #[arg(long)]
        actor: String,
        #[arg(long)]
        webid: String,
    },
    /// Run the enrollment workflow in a self-contained directory.
    Workflow {
        #[arg(long, default_value = "webcas-workflow")]
        workdir: PathBuf,
        #[arg(long, value_enum, default_value_t = Decision::Accepted)]
        decision: Decision,
        /// Leave out the student's grant to the master university.
        #[arg(long)]
        skip_grant: bool,
        /// Use a server already running with the workdir's configuration.
        #[arg(long)]
        no_start: bool,
    },
}

fn load(path: &std::path::Path) -> Result<ServerConfig, CliError> {
    Ok(ServerConfig::load(path)?)
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    let grant = matches!(cli.command, Command::Grant { .. });
    match cli.command {
        Command::GenIdentity {
            name,
            webid,
            out_dir,
            key_bits,
            force,
        } => {
            let out = gen_identity(&name, &webid, &out_dir, key_bits, force)?;
            if !cli.json {
                println!("{}", out.webid);
            }
            Ok(serde_json::to_value(out).unwrap_or_default())
        }
        Command::Serve => {
            runtime::serve(&load(&cli.config)?)?;
            Ok(json!({ "stopped": true }))
        }
        Command::Export { actor, out } => {
            let bytes = offline::export(&load(&cli.config)?, &actor, &out)?;
            if !cli.json {
                println!("wrote {} ({bytes} bytes)", out.display());
            }
            Ok(json!({ "path": out, "bytes": bytes }))
        }
        Command::Import { actor, package } => {
            let summary = offline::import(&load(&cli.config)?, &actor, &package)?;
            if !cli.json {
                println!(
                    "{} triples, {} files added, {} skipped",
                    summary.triples_added, summary.files_added, summary.triples_skipped
                );
            }
            Ok(serde_json::to_value(summary).unwrap_or_default())
        }
        Command::Grant { actor, webid } | Command::Revoke { actor, webid } => {
            let changed = offline::set_permission(&load(&cli.config)?, &actor, &webid, grant)?;
            if !cli.json {
                let verb = if grant { "granted" } else { "revoked" };
                println!("{verb}{}", if changed { "" } else { " (no change)" });
            }
            Ok(json!({ "changed": changed }))
        }
        Command::Workflow {
            ref workdir,
            decision,
            skip_grant,
            no_start,
        } => {
            let mut options = WorkflowOptions::new(workdir);
            options.decision = decision;
            options.skip_grant = skip_grant;
            options.external_server = no_start;
            let report = if cli.json {
                run_workflow(&options, &mut std::io::stderr())?
            } else {
                run_workflow(&options, &mut std::io::stdout())?
            };
            Ok(json!({
                "steps": report.steps,
                "decision": report.decision,
                "imports": report.imports,
                "elapsed_ms": report.elapsed_ms,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if matches!(cli.command, Command::Serve) { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default_level)))
        .with_writer(std::io::stderr)
        .init();
    let json_output = cli.json;
    match run(cli) {
        Ok(value) => {
            if json_output {
                println!("{value}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if json_output {
                println!("{}", json!({ "error": e.category(), "detail": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
