use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Unsupported,
    InvalidInput,
    InternalError,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Unsupported => 2,
            Status::InvalidInput | Status::InternalError => 1,
        }
    }
}

/// Outcome of one command: a payload on success, otherwise a detail
/// document with at least a `message`.
#[derive(Debug, Clone)]
pub struct CommandResult {
    pub status: Status,
    body: Value,
    human: String,
}

impl CommandResult {
    pub fn ok(payload: Value, human: String) -> Self {
        Self {
            status: Status::Ok,
            body: payload,
            human,
        }
    }

    pub fn fail(status: Status, message: impl Into<String>, extra: Value) -> Self {
        let message = message.into();
        let mut detail = json!({ "message": message });
        if let (Some(d), Value::Object(extra)) = (detail.as_object_mut(), extra) {
            d.extend(extra);
        }
        Self {
            status,
            body: detail,
            human: format!("{}: {message}", json!(status).as_str().unwrap_or("error")),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::fail(Status::InvalidInput, message, Value::Null)
    }

    pub fn to_json(&self) -> String {
        let key = if self.status == Status::Ok { "payload" } else { "detail" };
        serde_json::to_string_pretty(&json!({ "status": self.status, key: self.body })).expect("values serialize")
    }

    pub fn human(&self) -> &str {
        &self.human
    }
}
