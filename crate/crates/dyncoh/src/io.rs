//! Versioned JSON file formats for channels and states.
//!
//! A channel file stores the unnormalized Choi operator (input factor first,
//! `tr J = dim_in`) as separate real and imaginary row-major arrays:
//!
//! ```json
//! {"version": 1, "dim_in": 2, "dim_out": 2,
//!  "choi_real": [...], "choi_imag": [...]}
//! ```
//!
//! A state file mirrors it with a `dims` list. Readers reject files whose
//! operators violate the CPTP or state invariants beyond tolerances.

use crate::channels::{ChannelError, QuantumChannel};
use crate::density::{DensityMatrix, StateError};
use crate::matrix::{ComplexMatrix, MatrixError, C64};
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unsupported format version {got} (expected {expected})")]
    Version { got: u32, expected: u32 },

    #[error("array length {got} does not match {rows}x{cols}")]
    ArrayLength {
        got: usize,
        rows: usize,
        cols: usize,
    },

    #[error("file violates channel invariants: {0}")]
    Channel(#[from] ChannelError),

    #[error("file violates state invariants: {0}")]
    State(#[from] StateError),

    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub version: u32,
    pub dim_in: usize,
    pub dim_out: usize,
    pub choi_real: Vec<f64>,
    pub choi_imag: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub version: u32,
    pub dims: Vec<usize>,
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
}

fn matrix_to_parts(m: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let re = m.as_slice().iter().map(|c| c.re).collect();
    let im = m.as_slice().iter().map(|c| c.im).collect();
    (re, im)
}

fn matrix_from_parts(
    rows: usize,
    cols: usize,
    re: &[f64],
    im: &[f64],
) -> Result<ComplexMatrix, IoError> {
    if re.len() != rows * cols || im.len() != re.len() {
        return Err(IoError::ArrayLength {
            got: re.len().max(im.len()),
            rows,
            cols,
        });
    }
    let data = re
        .iter()
        .zip(im)
        .map(|(&r, &i)| C64::new(r, i))
        .collect::<Vec<_>>();
    Ok(ComplexMatrix::from_vec(rows, cols, data)?)
}

impl ChannelFile {
    pub fn from_channel(channel: &QuantumChannel) -> Self {
        let (choi_real, choi_imag) = matrix_to_parts(channel.choi());
        Self {
            version: FORMAT_VERSION,
            dim_in: channel.dim_in(),
            dim_out: channel.dim_out(),
            choi_real,
            choi_imag,
        }
    }

    /// Validates the stored operator against the CPTP invariants.
    pub fn into_channel(self) -> Result<QuantumChannel, IoError> {
        self.into_channel_with(&Tolerances::default())
    }

    pub fn into_channel_with(self, tol: &Tolerances) -> Result<QuantumChannel, IoError> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::Version {
                got: self.version,
                expected: FORMAT_VERSION,
            });
        }
        let d = self.dim_in * self.dim_out;
        let choi = matrix_from_parts(d, d, &self.choi_real, &self.choi_imag)?;
        Ok(QuantumChannel::from_choi_with(
            self.dim_in,
            self.dim_out,
            choi,
            tol,
        )?)
    }
}

impl StateFile {
    pub fn from_state(state: &DensityMatrix) -> Self {
        let (real, imag) = matrix_to_parts(state.matrix());
        Self {
            version: FORMAT_VERSION,
            dims: state.dims().to_vec(),
            real,
            imag,
        }
    }

    pub fn into_state(self) -> Result<DensityMatrix, IoError> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::Version {
                got: self.version,
                expected: FORMAT_VERSION,
            });
        }
        let d: usize = self.dims.iter().product();
        let m = matrix_from_parts(d, d, &self.real, &self.imag)?;
        Ok(DensityMatrix::new(self.dims, m)?)
    }
}

pub fn save_channel(channel: &QuantumChannel, path: &Path) -> Result<(), IoError> {
    let file = ChannelFile::from_channel(channel);
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_channel(path: &Path) -> Result<QuantumChannel, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: ChannelFile = serde_json::from_str(&text)?;
    file.into_channel()
}

pub fn save_state(state: &DensityMatrix, path: &Path) -> Result<(), IoError> {
    let file = StateFile::from_state(state);
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<DensityMatrix, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: StateFile = serde_json::from_str(&text)?;
    file.into_state()
}
