use crate::error::{Error, Result};

/// Truncated bosonic number-state space spanned by |0⟩ … |dim−1⟩.
///
/// `buffer` counts the top states excluded from identity checks, since
/// products of ladder operators are corrupted near the truncation edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
    buffer: usize,
}

pub const MIN_DIM: usize = 8;

impl FockSpace {
    pub fn new(dim: usize, buffer: usize) -> Result<Self> {
        if dim < MIN_DIM {
            return Err(Error::InvalidSpace(format!(
                "dim must be at least {MIN_DIM}, got {dim}"
            )));
        }
        if 2 * buffer >= dim {
            return Err(Error::BufferTooLarge { buffer, dim });
        }
        Ok(Self { dim, buffer })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn buffer(&self) -> usize {
        self.buffer
    }

    /// Number of states that are considered free of truncation effects.
    pub fn interior(&self) -> usize {
        self.dim - self.buffer
    }

    /// A larger working space with `extra` additional states and the same buffer.
    ///
    /// Operators that spread support towards high number states are built
    /// here and then restricted back, so the retained block is exact.
    pub fn padded(&self, extra: usize) -> Self {
        Self {
            dim: self.dim + extra,
            buffer: self.buffer,
        }
    }

    pub fn with_buffer(&self, buffer: usize) -> Result<Self> {
        Self::new(self.dim, buffer)
    }
}
