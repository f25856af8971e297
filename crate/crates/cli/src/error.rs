use pmdnav_core::router::RouteError;
use pmdnav_core::scenarios::ScenarioError;
use serde_json::json;

pub const INVALID: u8 = 1;
pub const INFEASIBLE: u8 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError { code: INVALID, kind: "invalid_input".into(), message: message.into() }
    }

    pub fn usage(kind: String, message: String) -> Self {
        let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
        CliError { code: INVALID, kind: format!("usage: {kind}"), message: first }
    }

    pub fn infeasible(kind: &str, message: impl Into<String>) -> Self {
        CliError { code: INFEASIBLE, kind: kind.into(), message: message.into() }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError { code: INVALID, kind: "io".into(), message: format!("{}: {e}", path.display()) }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message, "exit_code": self.code }).to_string()
    }
}

impl From<RouteError> for CliError {
    fn from(e: RouteError) -> Self {
        if e.is_infeasible() {
            CliError::infeasible("infeasible_query", e.to_string())
        } else {
            CliError::invalid(e.to_string())
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError { code: INVALID, kind: "io".into(), message: e.to_string() }
    }
}
