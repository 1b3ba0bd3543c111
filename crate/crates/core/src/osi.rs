//! Independent-set valuations: `v_i(S) = 1` iff `S + i` is independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::oracle::{Valuation, ValuationOracle};
use crate::seq::{ActionSeq, AgentId};
use crate::value::{int, zero, Value};
use crate::welfare::UnderlyingProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OsiInstance {
    adj: Vec<Vec<bool>>,
}

impl OsiInstance {
    pub fn new(adj: Vec<Vec<bool>>) -> Result<Self> {
        let n = adj.len();
        for i in 0..n {
            if adj[i].len() != n {
                return Err(Error::InvalidInstance(format!("graph: row {i} has {} entries", adj[i].len())));
            }
            if adj[i][i] {
                return Err(Error::InvalidInstance(format!("graph: self-loop at {i}")));
            }
            if (0..n).any(|j| adj[i][j] != adj[j][i]) {
                return Err(Error::InvalidInstance("graph: adjacency not symmetric".into()));
            }
        }
        Ok(OsiInstance { adj })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInstance(format!("graph: edge ({a},{b}) out of range")));
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Self::new(adj)
    }

    pub fn empty(n: usize) -> Self {
        OsiInstance { adj: vec![vec![false; n]; n] }
    }

    pub fn complete(n: usize) -> Self {
        OsiInstance { adj: (0..n).map(|i| (0..n).map(|j| i != j).collect()).collect() }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).filter(|(a, b)| a != b).collect();
        Self::from_edges(n, &edges).expect("cycle edges are in range")
    }

    /// `G(n, p)` with `p = edge_numerator / edge_denominator`.
    pub fn random(n: usize, seed: u64, edge_numerator: u32, edge_denominator: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let e = rng.gen_ratio(edge_numerator.min(edge_denominator), edge_denominator.max(1));
                adj[i][j] = e;
                adj[j][i] = e;
            }
        }
        OsiInstance { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adj
    }

    pub fn is_independent(&self, nodes: &[usize]) -> bool {
        nodes
            .iter()
            .enumerate()
            .all(|(k, &a)| nodes[k + 1..].iter().all(|&b| !self.adj[a][b]))
    }
}

impl Valuation for OsiInstance {
    fn agents(&self) -> usize {
        self.n()
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        if self.is_independent(prefix) && prefix.iter().all(|&k| !self.adj[agent][k]) {
            int(1)
        } else {
            zero()
        }
    }
}

/// A maximum independent set, ascending. Branches on the lowest remaining
/// vertex (take it first, then skip it) and prunes when even taking every
/// remaining candidate cannot beat the incumbent.
pub fn maximum_independent_set(adj: &[Vec<bool>], caps: &Caps) -> Result<Vec<usize>> {
    let n = adj.len();
    caps.check_exponential("maximum independent set", n)?;
    let nbr: Vec<u64> = adj
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &e)| e).fold(0, |m, (j, _)| m | 1 << j))
        .collect();

    fn go(nbr: &[u64], candidates: u64, chosen: u64, best: &mut u64) {
        if chosen.count_ones() + candidates.count_ones() <= best.count_ones() {
            return;
        }
        if candidates == 0 {
            *best = chosen;
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        let rest = candidates & !(1 << v);
        go(nbr, rest & !nbr[v], chosen | 1 << v, best);
        go(nbr, rest, chosen, best);
    }

    if n >= 64 {
        return Err(Error::CapExceeded { what: "maximum independent set", n, cap: 63 });
    }
    let mut best = 0u64;
    go(&nbr, (1u64 << n) - 1, 0, &mut best);
    Ok((0..n).filter(|&i| best >> i & 1 == 1).collect())
}

/// Learns the graph with `v_i((j))` for every ordered pair (`n(n-1)`
/// queries), then returns a maximum independent set ascending followed by the
/// other agents ascending.
pub fn osi_learn_and_solve(oracle: &mut ValuationOracle<'_>, caps: &Caps) -> Result<ActionSeq> {
    let n = oracle.n();
    caps.check_exponential("osi_learn_and_solve", n)?;
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            adj[i][j] = oracle.query(i, &[j])? == zero();
        }
    }
    let mis = maximum_independent_set(&adj, caps)?;
    let mut order = mis.clone();
    order.extend((0..n).filter(|i| !mis.contains(i)));
    ActionSeq::new(order)
}

impl UnderlyingProblem for OsiInstance {
    fn underlying_optimum(&self, caps: &Caps) -> Result<Value> {
        Ok(int(maximum_independent_set(&self.adj, caps)?.len() as i64))
    }
}
