//! Versioned JSON persistence for trained schemes.

use serde::{Deserialize, Serialize};

use super::scheme::TrainedScheme;
use crate::error::ClassifyError;

pub const MODEL_FORMAT: &str = "lcmodel-classifier";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    model: TrainedScheme,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

pub fn model_to_json(model: &TrainedScheme) -> String {
    let env = Envelope {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        model: model.clone(),
    };
    serde_json::to_string_pretty(&env).expect("models serialize")
}

pub fn model_from_json(text: &str) -> Result<TrainedScheme, ClassifyError> {
    let bad = |m: String| ClassifyError::ModelFormat(m);
    let header: Header = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if header.format != MODEL_FORMAT {
        return Err(bad(format!("expected format {MODEL_FORMAT}, got {}", header.format)));
    }
    if header.version != MODEL_VERSION {
        return Err(bad(format!("unsupported model version {}", header.version)));
    }
    let env: Envelope = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    Ok(env.model)
}
