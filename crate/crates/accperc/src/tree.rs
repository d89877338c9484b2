//! Explicit small-tree materialization, used as a brute-force oracle.
//!
//! The frontier simulation in [`crate::sim`] never builds the tree; this
//! module does, for configurations small enough to enumerate. Vertices at
//! each level are stored in lexicographic order (children of the first
//! vertex, then children of the second, and so on), which makes parent
//! lookups and prefix embeddings between nested trees straightforward.

use crate::error::{Error, Result};
use crate::growth::GrowthFunction;

/// A fully materialized spherically symmetric tree down to a fixed depth.
///
/// Level `n` holds exactly `level_size(n)` vertices, identified by their
/// index within the level. `parents[n][v]` is the level-`(n-1)` index of the
/// parent of vertex `v` at level `n`, for `n >= 1`.
#[derive(Debug, Clone)]
pub struct MaterializedTree {
    depth: usize,
    children_per_level: Vec<u64>,
    level_sizes: Vec<usize>,
    parents: Vec<Vec<u32>>,
}

impl MaterializedTree {
    /// Depth of the deepest materialized level.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of vertices at level `n`.
    pub fn level_size(&self, n: usize) -> usize {
        self.level_sizes[n]
    }

    /// Number of vertices across all levels.
    pub fn vertex_count(&self) -> usize {
        self.level_sizes.iter().sum()
    }

    /// Children count of every vertex at level `n < depth`.
    pub fn children_at(&self, n: usize) -> u64 {
        self.children_per_level[n]
    }

    /// Parent index (within level `n - 1`) of vertex `v` at level `n >= 1`.
    pub fn parent(&self, n: usize, v: usize) -> usize {
        self.parents[n][v] as usize
    }
}

/// Builds the explicit tree for `g` down to `depth`, refusing to allocate
/// more than `size_cap` vertices in total.
pub fn materialize(g: &GrowthFunction, depth: usize, size_cap: usize) -> Result<MaterializedTree> {
    let mut children_per_level = Vec::with_capacity(depth);
    let mut level_sizes = vec![1usize];
    let mut parents: Vec<Vec<u32>> = vec![Vec::new()];
    let mut total = 1usize;
    for n in 0..depth {
        let c = g.children(n as u64)?;
        let next_size = level_sizes[n]
            .checked_mul(usize::try_from(c).ok().filter(|&c| c > 0).ok_or_else(|| {
                Error::Capacity(format!("children count {c} at level {n} exceeds usize"))
            })?)
            .filter(|&s| s <= size_cap.saturating_sub(total))
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "materializing level {} exceeds the size cap of {size_cap} vertices",
                    n + 1
                ))
            })?;
        let mut level_parents = Vec::with_capacity(next_size);
        for p in 0..level_sizes[n] {
            for _ in 0..c {
                level_parents.push(p as u32);
            }
        }
        total += next_size;
        children_per_level.push(c);
        level_sizes.push(next_size);
        parents.push(level_parents);
    }
    Ok(MaterializedTree {
        depth,
        children_per_level,
        level_sizes,
        parents,
    })
}

/// Maps each vertex of `small` to its image in `big` under the prefix
/// embedding: the root maps to the root, and the `r`-th child of a vertex
/// maps to the `r`-th child of its image.
///
/// Requires `children_small(i) <= children_big(i)` for every level below the
/// shared depth; both trees must have the same depth.
pub fn embed_indices(small: &MaterializedTree, big: &MaterializedTree) -> Result<Vec<Vec<u32>>> {
    if small.depth != big.depth {
        return Err(Error::Input(format!(
            "embedding needs equal depths, got {} and {}",
            small.depth, big.depth
        )));
    }
    for n in 0..small.depth {
        if small.children_per_level[n] > big.children_per_level[n] {
            return Err(Error::Input(format!(
                "level {n} has {} children in the small tree but only {} in the big tree",
                small.children_per_level[n], big.children_per_level[n]
            )));
        }
    }
    let mut map: Vec<Vec<u32>> = vec![vec![0]];
    for n in 0..small.depth {
        let cs = small.children_per_level[n] as usize;
        let cb = big.children_per_level[n] as usize;
        let mut level_map = Vec::with_capacity(small.level_sizes[n + 1]);
        for v in 0..small.level_sizes[n + 1] {
            let p = small.parent(n + 1, v);
            let rank = v - p * cs;
            level_map.push(map[n][p] * cb as u32 + rank as u32);
        }
        map.push(level_map);
    }
    Ok(map)
}

/// Marks, per level, which vertices are accessible: the root always is, and
/// a deeper vertex is accessible when its parent is and its fitness strictly
/// exceeds the parent's.
///
/// `fitness[n][v]` is the fitness of vertex `v` at level `n`. Duplicate
/// fitness values anywhere in the tree are rejected: ties have probability
/// zero under an absolutely continuous fitness law, so one indicates a
/// sampling bug rather than a configuration choice.
pub fn enumerate_accessible(
    tree: &MaterializedTree,
    fitness: &[Vec<f64>],
) -> Result<Vec<Vec<bool>>> {
    if fitness.len() != tree.depth + 1 {
        return Err(Error::Input(format!(
            "fitness has {} levels, tree has {}",
            fitness.len(),
            tree.depth + 1
        )));
    }
    for (n, level) in fitness.iter().enumerate() {
        if level.len() != tree.level_sizes[n] {
            return Err(Error::Input(format!(
                "fitness level {n} has {} values, tree level has {} vertices",
                level.len(),
                tree.level_sizes[n]
            )));
        }
    }
    let mut all: Vec<f64> = fitness.iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Input(
            "duplicate fitness values; ties are a probability-zero event".to_string(),
        ));
    }
    let mut accessible = vec![vec![true]];
    for n in 1..=tree.depth {
        let level: Vec<bool> = (0..tree.level_sizes[n])
            .map(|v| {
                let p = tree.parent(n, v);
                accessible[n - 1][p] && fitness[n][v] > fitness[n - 1][p]
            })
            .collect();
        accessible.push(level);
    }
    Ok(accessible)
}

/// Number of accessible vertices at each level, from an accessibility map.
pub fn accessible_counts(accessible: &[Vec<bool>]) -> Vec<u64> {
    accessible
        .iter()
        .map(|level| level.iter().filter(|&&a| a).count() as u64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn materialize_matches_level_size() {
        let g = GrowthFunction::Factorial;
        let tree = materialize(&g, 3, 1_000).unwrap();
        assert_eq!(
            (0..=3).map(|n| tree.level_size(n)).collect::<Vec<_>>(),
            vec![1, 1, 2, 6]
        );
        let g = GrowthFunction::homogeneous(2).unwrap();
        let tree = materialize(&g, 3, 1_000).unwrap();
        assert_eq!(tree.vertex_count(), 15);
        let g = GrowthFunction::linear_ceil(2.0).unwrap();
        let tree = materialize(&g, 0, 10).unwrap();
        assert_eq!(tree.vertex_count(), 1);
    }

    #[test]
    fn materialize_cap_error_names_the_offending_level() {
        let g = GrowthFunction::homogeneous(10).unwrap();
        let err = materialize(&g, 5, 200).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("level 3"), "{msg}");
    }

    #[test]
    fn parents_partition_into_child_blocks() {
        let g = GrowthFunction::explicit(vec![2, 3]).unwrap();
        let tree = materialize(&g, 2, 100).unwrap();
        assert_eq!(tree.parents[1], vec![0, 0]);
        assert_eq!(tree.parents[2], vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn embedding_preserves_parent_structure() {
        let small = materialize(&GrowthFunction::linear_ceil(1.5).unwrap(), 4, 10_000).unwrap();
        let big = materialize(&GrowthFunction::linear_ceil(2.5).unwrap(), 4, 10_000).unwrap();
        let map = embed_indices(&small, &big).unwrap();
        for n in 1..=4 {
            for v in 0..small.level_size(n) {
                let image_parent = big.parent(n, map[n][v] as usize);
                let parent_image = map[n - 1][small.parent(n, v)] as usize;
                assert_eq!(image_parent, parent_image);
            }
        }
        let images: std::collections::HashSet<u32> = map[4].iter().copied().collect();
        assert_eq!(images.len(), small.level_size(4));
    }

    #[test]
    fn embedding_rejects_non_nested_growths() {
        let a = materialize(&GrowthFunction::homogeneous(3).unwrap(), 2, 100).unwrap();
        let b = materialize(&GrowthFunction::homogeneous(2).unwrap(), 2, 100).unwrap();
        assert!(embed_indices(&a, &b).is_err());
    }

    #[test]
    fn accessibility_follows_strict_increase_along_paths() {
        // Depth-3 binary tree mirroring a hand-checked fitness assignment:
        // exactly two level-3 vertices are reachable by strictly increasing
        // paths (0.12 < 0.33 < 0.51 < 0.62 and 0.12 < 0.33 < 0.78 < 0.93).
        let g = GrowthFunction::homogeneous(2).unwrap();
        let tree = materialize(&g, 3, 100).unwrap();
        let fitness = vec![
            vec![0.12],
            vec![0.33, 0.10],
            vec![0.51, 0.78, 0.15, 0.22],
            vec![0.43, 0.62, 0.31, 0.93, 0.87, 0.27, 0.88, 0.35],
        ];
        let acc = enumerate_accessible(&tree, &fitness).unwrap();
        assert_eq!(accessible_counts(&acc), vec![1, 1, 2, 2]);
        let deepest: Vec<f64> = (0..8).filter(|&v| acc[3][v]).map(|v| fitness[3][v]).collect();
        assert_eq!(deepest, vec![0.62, 0.93]);
    }

    #[test]
    fn strictly_increasing_path_is_fully_accessible() {
        let g = GrowthFunction::explicit(vec![1, 1, 1]).unwrap();
        let tree = materialize(&g, 3, 10).unwrap();
        let fitness = vec![vec![0.1], vec![0.2], vec![0.3], vec![0.4]];
        let acc = enumerate_accessible(&tree, &fitness).unwrap();
        assert_eq!(accessible_counts(&acc), vec![1, 1, 1, 1]);
    }

    #[test]
    fn maximal_root_blocks_every_descendant() {
        let g = GrowthFunction::homogeneous(2).unwrap();
        let tree = materialize(&g, 2, 100).unwrap();
        let fitness = vec![vec![0.99], vec![0.5, 0.6], vec![0.1, 0.2, 0.3, 0.4]];
        let acc = enumerate_accessible(&tree, &fitness).unwrap();
        assert_eq!(accessible_counts(&acc), vec![1, 0, 0]);
    }

    #[test]
    fn duplicate_fitness_is_rejected() {
        let g = GrowthFunction::explicit(vec![2]).unwrap();
        let tree = materialize(&g, 1, 10).unwrap();
        let fitness = vec![vec![0.5], vec![0.7, 0.5]];
        assert!(enumerate_accessible(&tree, &fitness).is_err());
    }
}
