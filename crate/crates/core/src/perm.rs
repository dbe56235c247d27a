//! Bijections between finite carriers `{0, .., n-1}`.

use serde::Serialize;

/// A bijection `R_i -> R_j` between carriers of equal size, stored as the
/// image of each index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Bij(Vec<u32>);

impl Bij {
    pub fn identity(n: usize) -> Self {
        Bij((0..n as u32).collect())
    }

    /// Builds a bijection from its images; `None` if `images` is not a
    /// permutation of `0..images.len()`.
    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Bij(images))
    }

    pub fn swap() -> Self {
        Bij(vec![1, 0])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Bij) -> Bij {
        Bij(self.0.iter().map(|&x| next.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Bij {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Bij(inv)
    }

    /// All bijections on `n` points, in lexicographic order of images.
    pub fn all(n: usize) -> Vec<Bij> {
        let mut out = Vec::new();
        let mut cur: Vec<u32> = (0..n as u32).collect();
        loop {
            out.push(Bij(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}
