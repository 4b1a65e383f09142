//! Vertex partitions used as quotient maps.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("vertex {vertex} appears in more than one block")]
    Overlap { vertex: usize },
    #[error("vertex {vertex} is not covered by any block")]
    Uncovered { vertex: usize },
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    OutOfRange { vertex: usize, vertex_count: usize },
    #[error("empty block")]
    EmptyBlock,
}

/// A surjection from vertices onto blocks.
///
/// Blocks are stored sorted, and block ids are dense from 0, ordered by the
/// smallest vertex each block contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl QuotientMap {
    pub fn from_blocks(
        vertex_count: usize,
        blocks: Vec<Vec<usize>>,
    ) -> Result<Self, PartitionError> {
        let mut seen = vec![false; vertex_count];
        for block in &blocks {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            for &v in block {
                if v >= vertex_count {
                    return Err(PartitionError::OutOfRange { vertex: v, vertex_count });
                }
                if seen[v] {
                    return Err(PartitionError::Overlap { vertex: v });
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(PartitionError::Uncovered { vertex: v });
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        let mut block_of = vec![0; vertex_count];
        for (id, block) in blocks.iter().enumerate() {
            for &v in block {
                block_of[v] = id;
            }
        }
        Ok(Self { block_of, blocks })
    }

    /// Builds the partition whose blocks are the fibres of `labels`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (v, label) in labels.iter().enumerate() {
            let id = *remap.entry(label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push(v);
        }
        // Labels are visited in vertex order, so blocks already sort by minimum.
        let mut block_of = vec![0; labels.len()];
        for (id, block) in blocks.iter().enumerate() {
            for &v in block {
                block_of[v] = id;
            }
        }
        Self { block_of, blocks }
    }

    pub fn singletons(vertex_count: usize) -> Self {
        Self {
            block_of: (0..vertex_count).collect(),
            blocks: (0..vertex_count).map(|v| vec![v]).collect(),
        }
    }

    pub fn single_block(vertex_count: usize) -> Self {
        Self {
            block_of: vec![0; vertex_count],
            blocks: vec![(0..vertex_count).collect()],
        }
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn block(&self, id: usize) -> &[usize] {
        &self.blocks[id]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn same_block(&self, u: usize, v: usize) -> bool {
        self.block_of[u] == self.block_of[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_are_ordered_by_minimum() {
        let q = QuotientMap::from_blocks(5, vec![vec![4, 1], vec![3, 0], vec![2]]).unwrap();
        assert_eq!(q.blocks(), &[vec![0, 3], vec![1, 4], vec![2]]);
        assert_eq!(q.block_of(4), 1);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert_eq!(
            QuotientMap::from_blocks(3, vec![vec![0, 1], vec![1, 2]]),
            Err(PartitionError::Overlap { vertex: 1 })
        );
        assert_eq!(
            QuotientMap::from_blocks(3, vec![vec![0, 1]]),
            Err(PartitionError::Uncovered { vertex: 2 })
        );
        assert!(QuotientMap::from_blocks(2, vec![vec![0, 5]]).is_err());
    }

    #[test]
    fn labels_match_blocks() {
        let q = QuotientMap::from_labels(&[7, 3, 7, 3, 9]);
        assert_eq!(q.blocks(), &[vec![0, 2], vec![1, 3], vec![4]]);
    }
}
