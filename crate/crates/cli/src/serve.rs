use std::net::{SocketAddr, ToSocketAddrs};
use std::path::PathBuf;

use serde_json::json;
use syriaca_works::model::EntityKind;
use syriaca_works::registry::http::{serve as serve_http, AppState};
use syriaca_works::registry::Registry;

use crate::config::Settings;
use crate::inputs::Printer;
use crate::{CliError, CmdResult, Status};

fn data_dir(data: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = data.ok_or_else(|| CliError("--data is required".into()))?;
    if !dir.is_dir() {
        return Err(CliError(format!("{}: not a directory", dir.display())));
    }
    Ok(dir)
}

pub fn mint(data: Option<PathBuf>, kind: &str, count: usize, out: &Printer) -> CmdResult {
    let kind: EntityKind = kind.parse()?;
    let reg = Registry::open(data_dir(data)?)?;
    for _ in 0..count {
        let uri = reg.mint_uri(kind)?;
        out.emit(|| uri.to_string(), &json!({ "uri": uri }));
    }
    Ok(Status::Ok)
}

pub struct ServeArgs {
    pub data: Option<PathBuf>,
    pub review: Option<PathBuf>,
    pub host: String,
    pub port: u16,
    pub read_only: bool,
}

pub fn serve(args: ServeArgs, settings: &Settings) -> CmdResult {
    let root = data_dir(args.data)?;
    let registry = if args.read_only { Registry::open_read_only(&root)? } else { Registry::open(&root)? };
    let review = args.review.unwrap_or_else(|| root.join("review"));
    let state = AppState::new(registry, &review, settings.ns.clone())?;
    let addr: SocketAddr = (args.host.as_str(), args.port)
        .to_socket_addrs()?
        .next()
        .ok_or_else(|| CliError(format!("cannot resolve {}", args.host)))?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(serve_http(state, addr)).map_err(|e| CliError(format!("{addr}: {e}")))?;
    Ok(Status::Ok)
}
