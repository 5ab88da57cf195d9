use std::ops::Range;

use crate::error::{invalid, Result};

/// Splits a flat variable vector of dimension `n` into `N` contiguous blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("a partition needs at least one block"));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(invalid(format!("block {i} has size zero")));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        Ok(Self {
            sizes,
            offsets,
            dim: acc,
        })
    }

    /// One block per coordinate.
    pub fn scalar(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// Blocks of `block_size` coordinates; the last block takes the remainder.
    pub fn uniform(n: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(invalid("block size must be positive"));
        }
        let mut sizes = vec![block_size; n / block_size];
        if n % block_size != 0 {
            sizes.push(n % block_size);
        }
        Self::new(sizes)
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.sizes[i]
    }

    pub fn is_scalar(&self) -> bool {
        self.dim == self.sizes.len()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.sizes.len() {
            return Err(invalid(format!(
                "block index {i} out of range for {} blocks",
                self.sizes.len()
            )));
        }
        Ok(())
    }

    pub fn block<'a>(&self, x: &'a [f64], i: usize) -> &'a [f64] {
        &x[self.range(i)]
    }
}
