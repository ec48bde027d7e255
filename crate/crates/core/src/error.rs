//! Error types shared by the model-level modules.

use std::fmt;

/// Errors raised by the channel model and scenario constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A device index does not exist in the deployment.
    DeviceIndexOutOfRange { index: usize, count: usize },
    /// The antenna footprint does not cover the named device, so the
    /// all-in-lobe SINR expression does not apply.
    DeviceOutsideMainLobe { index: usize },
    /// A parameter violates its documented invariant.
    InvalidParameter(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DeviceIndexOutOfRange { index, count } => {
                write!(f, "device index {index} out of range (deployment has {count})")
            }
            ModelError::DeviceOutsideMainLobe { index } => {
                write!(f, "device {index} outside the antenna main lobe footprint")
            }
            ModelError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl std::error::Error for ModelError {}
