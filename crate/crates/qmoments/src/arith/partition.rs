//! Integer partitions, stored as descending part lists.

use serde::{Deserialize, Serialize};

/// An integer partition. Parts are kept sorted in descending order, so the
/// derived lexicographic `Ord` on the part list gives the canonical ordering
/// used for stable serialization (largest-first partitions compare highest).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Build from any part list; zeros are rejected, order is normalized.
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "partition parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// The empty partition (weight 0).
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Distinct parts with their multiplicities, largest part first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

impl std::fmt::Debug for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", strs.join(","))
    }
}

/// All partitions of `n` with an even number of parts, each exactly once,
/// in descending lexicographic order on the part lists (e.g. for `n = 4`:
/// `[3,1]`, `[2,2]`, `[1,1,1,1]`).
pub fn partitions_even_parts(n: u32) -> Vec<Partition> {
    assert!(n >= 2, "need n >= 2");
    let mut out = Vec::new();
    let mut stack = Vec::new();
    descend(n, n, &mut stack, &mut out);
    out
}

/// All partitions of `n` (any part count), same ordering. Used as the
/// reference enumerator in tests and by consumers that filter themselves.
pub fn partitions_all(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    descend_all(n, n, &mut stack, &mut out);
    out
}

fn descend(rem: u32, max_part: u32, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rem == 0 {
        if stack.len() % 2 == 0 {
            out.push(Partition { parts: stack.clone() });
        }
        return;
    }
    for p in (1..=rem.min(max_part)).rev() {
        stack.push(p);
        descend(rem - p, p, stack, out);
        stack.pop();
    }
}

fn descend_all(rem: u32, max_part: u32, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rem == 0 {
        out.push(Partition { parts: stack.clone() });
        return;
    }
    for p in (1..=rem.min(max_part)).rev() {
        stack.push(p);
        descend_all(rem - p, p, stack, out);
        stack.pop();
    }
}
