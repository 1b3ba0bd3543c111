//! Action sequences and subsequences.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Agents are the integers `0..n`.
pub type AgentId = usize;

/// An ordered, duplicate-free list of agents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ActionSeq(Vec<AgentId>);

impl ActionSeq {
    pub fn new(order: Vec<AgentId>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(order.len());
        for &a in &order {
            if !seen.insert(a) {
                return Err(Error::DuplicateAgent(a));
            }
        }
        Ok(ActionSeq(order))
    }

    pub fn empty() -> Self {
        ActionSeq(Vec::new())
    }

    /// `(0, 1, ..., n-1)`.
    pub fn ascending(n: usize) -> Self {
        ActionSeq((0..n).collect())
    }

    pub fn as_slice(&self) -> &[AgentId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<AgentId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.0.contains(&agent)
    }

    pub fn position(&self, agent: AgentId) -> Option<usize> {
        self.0.iter().position(|&a| a == agent)
    }

    /// `S || i`.
    pub fn push(&mut self, agent: AgentId) -> Result<()> {
        if self.contains(agent) {
            return Err(Error::DuplicateAgent(agent));
        }
        self.0.push(agent);
        Ok(())
    }

    /// `S \ j`, preserving the order of the others.
    pub fn without(&self, agent: AgentId) -> ActionSeq {
        ActionSeq(self.0.iter().copied().filter(|&a| a != agent).collect())
    }

    /// `S|_c`, the first `c` agents.
    pub fn truncated(&self, c: usize) -> ActionSeq {
        ActionSeq(self.0[..c.min(self.len())].to_vec())
    }

    /// Checks that this is a permutation of `0..n`.
    pub fn check_full(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::NotFull { len: self.len(), n });
        }
        for &a in &self.0 {
            if a >= n {
                return Err(Error::AgentOutOfRange { agent: a, n });
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for ActionSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<AgentId>> for ActionSeq {
    type Error = Error;

    fn try_from(order: Vec<AgentId>) -> Result<Self> {
        ActionSeq::new(order)
    }
}

/// `S^i`: the agents strictly ahead of `agent` in `seq`.
pub fn prefix_of(seq: &ActionSeq, agent: AgentId) -> Result<ActionSeq> {
    let pos = seq.position(agent).ok_or(Error::AgentNotInSequence(agent))?;
    Ok(seq.truncated(pos))
}

/// `a <= b`: every agent of `a` appears in `b` in the same relative order.
pub fn is_subsequence(a: &[AgentId], b: &[AgentId]) -> bool {
    let mut rest = b.iter();
    a.iter().all(|x| rest.any(|y| y == x))
}

/// Visits every permutation of `items` in lexicographic order (given sorted
/// input). Stops early if `visit` returns `false`.
pub fn for_each_permutation(items: &[AgentId], mut visit: impl FnMut(&[AgentId]) -> bool) {
    let mut perm = items.to_vec();
    perm.sort_unstable();
    loop {
        if !visit(&perm) {
            return;
        }
        if !next_permutation(&mut perm) {
            return;
        }
    }
}

fn next_permutation(p: &mut [AgentId]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<AgentId>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every ordered subsequence of `items` (all subsets, all orders), including
/// the empty one.
pub fn ordered_subsets(items: &[AgentId]) -> Vec<Vec<AgentId>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..items.len() {
        let mut next = Vec::new();
        for s in &frontier {
            for &a in items {
                if !s.contains(&a) {
                    let mut t: Vec<AgentId> = s.clone();
                    t.push(a);
                    next.push(t);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[AgentId]) -> ActionSeq {
        ActionSeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(prefix_of(&seq(&[2, 0, 1]), 0).unwrap(), seq(&[2]));
        assert_eq!(prefix_of(&seq(&[0, 1, 2]), 0).unwrap(), seq(&[]));
        assert_eq!(prefix_of(&seq(&[2, 0, 1]), 1).unwrap(), seq(&[2, 0]));
        assert_eq!(
            prefix_of(&seq(&[2, 0]), 1),
            Err(Error::AgentNotInSequence(1))
        );
    }

    #[test]
    fn subsequence_examples() {
        assert!(is_subsequence(&[0, 2], &[0, 1, 2]));
        assert!(!is_subsequence(&[2, 0], &[0, 1, 2]));
        assert!(is_subsequence(&[], &[0, 1]));
        assert!(!is_subsequence(&[3], &[0, 1]));
    }

    #[test]
    fn rejects_duplicates() {
        assert_eq!(ActionSeq::new(vec![0, 1, 0]), Err(Error::DuplicateAgent(0)));
        assert!(seq(&[0, 1]).check_full(3).is_err());
        assert!(seq(&[0, 3, 1]).check_full(3).is_err());
        assert!(seq(&[2, 0, 1]).check_full(3).is_ok());
    }

    #[test]
    fn enumeration_counts() {
        let mut count = 0;
        let mut last: Option<Vec<usize>> = None;
        for_each_permutation(&[3, 1, 2, 0], |p| {
            if let Some(prev) = &last {
                assert!(prev.as_slice() < p);
            }
            last = Some(p.to_vec());
            count += 1;
            true
        });
        assert_eq!(count, 24);
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
        // 1 + 3 + 6 + 6
        assert_eq!(ordered_subsets(&[0, 1, 2]).len(), 16);
    }
}
