//! Reference computations written without the library's own enumeration
//! helpers, used to cross-check it.

#![allow(dead_code)]

use seqdict::{ActionSeq, Valuation, Value};

/// All permutations of `0..n`, in lexicographic order.
pub fn perms(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(k, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

pub fn seq(order: &[usize]) -> ActionSeq {
    ActionSeq::new(order.to_vec()).unwrap()
}

/// `a` appears in `b` in the same relative order.
pub fn is_subseq(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

pub fn sw(v: &dyn Valuation, order: &[usize]) -> Value {
    (0..order.len()).map(|k| v.value(order[k], &order[..k])).sum()
}

/// Largest welfare over all sequences, by full enumeration.
pub fn best_sw(v: &dyn Valuation) -> Value {
    perms(v.agents())
        .iter()
        .map(|p| sw(v, p))
        .max()
        .unwrap()
}

/// Every ordered selection of distinct elements of `items`.
pub fn arrangements(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..items.len() {
        let mut next = Vec::new();
        for s in &frontier {
            for &x in items {
                if !s.contains(&x) {
                    let mut t: Vec<usize> = s.clone();
                    t.push(x);
                    next.push(t);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `v_i(S') >= v_i(S)` for every `S' <= S`, checked by dropping every subset
/// of positions from every `S`.
pub fn monotone(v: &dyn Valuation) -> bool {
    let n = v.agents();
    (0..n).all(|i| {
        let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
        arrangements(&others).iter().all(|s| {
            let full = v.value(i, s);
            (0u32..1 << s.len()).all(|mask| {
                let sub: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                v.value(i, &sub) >= full
            })
        })
    })
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}
