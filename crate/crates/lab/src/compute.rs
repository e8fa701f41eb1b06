use std::path::Path;

use rcc_core::channel::Channel;
use rcc_core::rcc::{average_rcc, RccReport};
use rcc_core::state::BipartitePureState;
use serde::de::DeserializeOwned;

use crate::error::{LabError, Result};

fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Read {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| LabError::Parse {
        path: path.to_owned(),
        source,
    })
}

/// Reads a pure state and a channel from JSON files and evaluates them.
pub fn compute_files(state: &Path, channel: &Path) -> Result<RccReport> {
    let psi: BipartitePureState = load(state)?;
    let ch: Channel = load(channel)?;
    Ok(average_rcc(&psi, &ch)?)
}
