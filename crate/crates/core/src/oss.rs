//! Satisfiability valuations: agent `i` owns variable `x_i` and sets it to
//! the polarity carrying more weight among the clauses still unsatisfied.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::oracle::Valuation;
use crate::seq::{ActionSeq, AgentId};
use crate::value::{int, parse_value, ratio, to_pq, zero, Value};
use crate::welfare::UnderlyingProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    pub fn is_satisfied_by(&self, value: bool) -> bool {
        self.positive == value
    }

    /// DIMACS form: `var + 1`, negated for negative literals.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(code: i64) -> Option<Self> {
        if code == 0 {
            return None;
        }
        let var = (code.unsigned_abs() - 1) as usize;
        Some(Literal { var, positive: code > 0 })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.var)
        } else {
            write!(f, "~x{}", self.var)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub literals: BTreeSet<Literal>,
    pub weight: Value,
}

impl Clause {
    pub fn new(literals: impl IntoIterator<Item = Literal>, weight: Value) -> Self {
        Clause { literals: literals.into_iter().collect(), weight }
    }

    pub fn is_satisfied(&self, assignment: &[Option<bool>]) -> bool {
        self.literals
            .iter()
            .any(|l| assignment[l.var].is_some_and(|b| l.is_satisfied_by(b)))
    }
}

/// Weighted CNF formula plus each agent's tie-breaking polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatInstance {
    n: usize,
    clauses: Vec<Clause>,
    tie_default: Vec<bool>,
}

pub type Assignment = Vec<bool>;

impl SatInstance {
    /// Ties default to `true` for every agent.
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        Self::with_tie_default(n, clauses, vec![true; n])
    }

    pub fn with_tie_default(n: usize, clauses: Vec<Clause>, tie_default: Vec<bool>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if tie_default.len() != n {
            return bad(format!("sat: {} tie defaults for {n} variables", tie_default.len()));
        }
        for (j, c) in clauses.iter().enumerate() {
            if c.literals.is_empty() {
                return bad(format!("sat: clause {j} is empty"));
            }
            if c.weight < Value::zero() {
                return bad(format!("sat: clause {j} has negative weight"));
            }
            if let Some(l) = c.literals.iter().find(|l| l.var >= n) {
                return bad(format!("sat: clause {j} mentions {l} but n = {n}"));
            }
            if c.literals.iter().any(|l| c.literals.contains(&Literal { var: l.var, positive: !l.positive })) {
                return bad(format!("sat: clause {j} contains a complementary pair"));
            }
        }
        Ok(SatInstance { n, clauses, tie_default })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn tie_default(&self) -> &[bool] {
        &self.tie_default
    }

    pub fn set_tie_default(&mut self, tie_default: Vec<bool>) -> Result<()> {
        if tie_default.len() != self.n {
            return Err(Error::InvalidInstance("sat: tie default length".into()));
        }
        self.tie_default = tie_default;
        Ok(())
    }

    pub fn total_weight(&self) -> Value {
        self.clauses.iter().map(|c| c.weight.clone()).sum()
    }

    /// Weight of clauses satisfied by a complete assignment.
    pub fn satisfied_weight(&self, assignment: &[bool]) -> Value {
        let partial: Vec<Option<bool>> = assignment.iter().copied().map(Some).collect();
        self.clauses
            .iter()
            .filter(|c| c.is_satisfied(&partial))
            .map(|c| c.weight.clone())
            .sum()
    }

    /// `(P(i, C_S), N(i, C_S))` for the clauses unsatisfied under `partial`.
    pub fn pressures(&self, var: usize, partial: &[Option<bool>]) -> (Value, Value) {
        let (mut p, mut n) = (zero(), zero());
        for c in self.clauses.iter().filter(|c| !c.is_satisfied(partial)) {
            if c.literals.contains(&Literal::pos(var)) {
                p += &c.weight;
            } else if c.literals.contains(&Literal::neg(var)) {
                n += &c.weight;
            }
        }
        (p, n)
    }

    /// The value agent `var` picks and the weight it collects.
    pub fn choice(&self, var: usize, partial: &[Option<bool>]) -> (bool, Value) {
        let (p, n) = self.pressures(var, partial);
        match p.cmp(&n) {
            std::cmp::Ordering::Greater => (true, p),
            std::cmp::Ordering::Less => (false, n),
            std::cmp::Ordering::Equal => (self.tie_default[var], p),
        }
    }

    fn partial_after(&self, prefix: &[AgentId]) -> Vec<Option<bool>> {
        let mut partial = vec![None; self.n];
        for &k in prefix {
            partial[k] = Some(self.choice(k, &partial).0);
        }
        partial
    }
}

impl Valuation for SatInstance {
    fn agents(&self) -> usize {
        self.n
    }

    fn value(&self, agent: AgentId, prefix: &[AgentId]) -> Value {
        self.choice(agent, &self.partial_after(prefix)).1
    }

    fn monotone_claimed(&self) -> bool {
        false
    }
}

pub fn assignment_from_sequence(inst: &SatInstance, seq: &ActionSeq) -> Result<Assignment> {
    seq.check_full(inst.n)?;
    Ok(inst
        .partial_after(seq.as_slice())
        .into_iter()
        .map(|b| b.expect("every variable set"))
        .collect())
}

/// Lexicographically smallest sequence producing `target`, or `None`.
///
/// Depth-first over sequences in lexicographic order, cutting any branch in
/// which an agent would set the wrong value. When every agent so far set its
/// target value, the partial assignment is determined by the set of agents
/// alone, so dead sets are memoised; the search covers all `n!` sequences in
/// `O(2^n n)` steps.
pub fn sat_as_decide(inst: &SatInstance, target: &[bool], caps: &Caps) -> Result<Option<ActionSeq>> {
    let n = inst.n;
    if target.len() != n {
        return Err(Error::InvalidInstance(format!(
            "sat: target has {} values for {n} variables",
            target.len()
        )));
    }
    caps.check_exponential("sat_as_decide", n)?;
    if n >= 64 {
        return Err(Error::CapExceeded { what: "sat_as_decide", n, cap: 63 });
    }

    struct Search<'a> {
        inst: &'a SatInstance,
        target: &'a [bool],
        partial: Vec<Option<bool>>,
        order: Vec<AgentId>,
        dead: HashSet<u64>,
    }

    impl Search<'_> {
        fn go(&mut self, used: u64) -> bool {
            let n = self.inst.n;
            if self.order.len() == n {
                return true;
            }
            if self.dead.contains(&used) {
                return false;
            }
            for i in (0..n).filter(|&i| used & (1 << i) == 0) {
                if self.inst.choice(i, &self.partial).0 != self.target[i] {
                    continue;
                }
                self.partial[i] = Some(self.target[i]);
                self.order.push(i);
                if self.go(used | (1 << i)) {
                    return true;
                }
                self.order.pop();
                self.partial[i] = None;
            }
            self.dead.insert(used);
            false
        }
    }

    let mut search = Search {
        inst,
        target,
        partial: vec![None; n],
        order: Vec::with_capacity(n),
        dead: HashSet::new(),
    };
    Ok(if search.go(0) { Some(ActionSeq::new(search.order)?) } else { None })
}

/// Reduction from exact 3-cover to deciding whether some sequence yields the
/// all-true assignment. Variables are the `3q` elements, then the `t` sets,
/// then `Q`; clauses are emitted in type order A (set pairs), B (set,
/// member), C (elements), D (sets), E.
///
/// Elements covered by no set get weight 0 on their `(x | ~Q)` clause rather
/// than a negative one, and every tie defaults to `false`: such an element
/// sees no pressure either way and ends up false, as it must when no cover
/// exists. Outside that case every agent on the all-true path faces a strict
/// comparison, so the tie rule does not change the answer.
pub fn x3c_reduce(universe_size: usize, sets: &[[usize; 3]]) -> Result<SatInstance> {
    let bad = |m: String| Err(Error::MalformedX3c(m));
    if !universe_size.is_multiple_of(3) {
        return bad(format!("universe size {universe_size} is not a multiple of 3"));
    }
    let q = universe_size / 3;
    let t = sets.len();
    let mut freq = vec![0usize; universe_size];
    for (k, s) in sets.iter().enumerate() {
        if s.iter().any(|&x| x >= universe_size) {
            return bad(format!("set {k} has an element outside the universe"));
        }
        if s[0] == s[1] || s[0] == s[2] || s[1] == s[2] {
            return bad(format!("set {k} repeats an element"));
        }
        for &x in s {
            freq[x] += 1;
        }
    }
    let set_var = |k: usize| universe_size + k;
    let qv = universe_size + t;
    let (qi, ti) = (q as i64, t as i64);
    let mut clauses = Vec::new();
    for a in 0..t {
        for b in a + 1..t {
            clauses.push(Clause::new([Literal::pos(set_var(a)), Literal::pos(set_var(b))], int(1)));
        }
    }
    for (k, s) in sets.iter().enumerate() {
        for &x in s {
            clauses.push(Clause::new([Literal::pos(set_var(k)), Literal::neg(x)], int(1)));
        }
    }
    for (x, &f) in freq.iter().enumerate() {
        let w = (int(f as i64) - ratio(1, 3)).max(zero());
        clauses.push(Clause::new([Literal::pos(x), Literal::neg(qv)], w));
    }
    let d = int(ti - qi) + ratio(7, 3);
    for k in 0..t {
        clauses.push(Clause::new([Literal::pos(qv), Literal::neg(set_var(k))], d.clone()));
    }
    let e = int(ti * ti - qi * ti) + ratio(7 * ti, 3) - ratio(1, 3);
    clauses.push(Clause::new([Literal::neg(qv)], e));
    let n = universe_size + t + 1;
    SatInstance::with_tie_default(n, clauses, vec![false; n])
}

/// Three variables: three mixed clauses of weight 1 and three positive unit
/// clauses of weight `1 - eps`.
pub fn posd_sat_instance(eps: &Value) -> Result<SatInstance> {
    if *eps <= zero() || *eps >= Value::one() {
        return Err(Error::InvalidInstance(format!("eps = {} must lie in (0, 1)", to_pq(eps))));
    }
    let (p, n) = (Literal::pos, Literal::neg);
    let unit = Value::one() - eps;
    SatInstance::new(
        3,
        vec![
            Clause::new([p(0), n(1), n(2)], int(1)),
            Clause::new([n(0), p(1), n(2)], int(1)),
            Clause::new([n(0), n(1), p(2)], int(1)),
            Clause::new([p(0)], unit.clone()),
            Clause::new([p(1)], unit.clone()),
            Clause::new([p(2)], unit),
        ],
    )
}

/// Four clauses on three variables whose valuations are not monotone:
/// `v_2((0,1)) = 2 > v_2((1)) = 1`.
pub fn nonmonotone_sat_instance() -> SatInstance {
    let (p, n) = (Literal::pos, Literal::neg);
    SatInstance::new(
        3,
        vec![
            Clause::new([p(0), p(1)], int(6)),
            Clause::new([n(0), p(1), p(2)], int(2)),
            Clause::new([n(0), n(1), p(2)], int(1)),
            Clause::new([n(0), n(1)], int(2)),
        ],
    )
    .expect("valid instance")
}

/// `m` clauses over `n` variables, each with 1 to `max_clause_len` distinct
/// variables of random sign and weight `k / weight_denominator`,
/// `k` uniform in `1..=weight_denominator`.
pub fn random_sat_instance(
    n: usize,
    m: usize,
    max_clause_len: usize,
    seed: u64,
    weight_denominator: u32,
) -> Result<SatInstance> {
    if n == 0 && m > 0 {
        return Err(Error::InvalidInstance("sat: clauses need variables".into()));
    }
    let max_len = max_clause_len.clamp(1, n.max(1));
    let d = weight_denominator.max(1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<usize> = (0..n).collect();
    let clauses = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            let lits: Vec<Literal> = vars
                .choose_multiple(&mut rng, len)
                .map(|&v| Literal { var: v, positive: rng.gen_bool(0.5) })
                .collect();
            Clause::new(lits, ratio(rng.gen_range(1..=d), d))
        })
        .collect();
    SatInstance::new(n, clauses)
}

/// Maximum satisfied weight over all `2^n` assignments; ties go to the
/// assignment that is smallest read as a binary number with `x_0` first.
pub fn max_sat(inst: &SatInstance, caps: &Caps) -> Result<(Assignment, Value)> {
    let n = inst.n;
    caps.check_exponential("MAX-SAT enumeration", n)?;
    let mut best: Option<(Assignment, Value)> = None;
    for mask in 0u64..(1u64 << n) {
        let a: Assignment = (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect();
        let w = inst.satisfied_weight(&a);
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((a, w));
        }
    }
    Ok(best.expect("at least one assignment"))
}

impl UnderlyingProblem for SatInstance {
    fn underlying_optimum(&self, caps: &Caps) -> Result<Value> {
        max_sat(self, caps).map(|(_, w)| w)
    }
}

/// Weighted CNF text:
///
/// ```text
/// p wcnf <n> <m>
/// t <0|1> ... <0|1>
/// <p/q> <lit> ... <lit> 0
/// ```
///
/// Literals are 1-based and negative for negated variables. The `t` line
/// lists tie defaults and may be omitted (all true). Lines starting with `c`
/// are comments.
pub fn to_wcnf(inst: &SatInstance) -> String {
    let mut out = format!("p wcnf {} {}\n", inst.n, inst.clauses.len());
    out.push('t');
    for &b in &inst.tie_default {
        out.push_str(if b { " 1" } else { " 0" });
    }
    out.push('\n');
    for c in &inst.clauses {
        out.push_str(&to_pq(&c.weight));
        for l in &c.literals {
            let _ = write!(out, " {}", l.to_dimacs());
        }
        out.push_str(" 0\n");
    }
    out
}

pub fn from_wcnf(text: &str) -> Result<SatInstance> {
    let err = |line: usize, m: &str| Error::Parse(format!("wcnf line {}: {m}", line + 1));
    let mut header: Option<(usize, usize)> = None;
    let mut ties: Option<Vec<bool>> = None;
    let mut clauses = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().expect("non-empty line");
        match first {
            "p" => {
                if header.is_some() {
                    return Err(err(ln, "duplicate header"));
                }
                if tokens.next() != Some("wcnf") {
                    return Err(err(ln, "expected 'p wcnf <n> <m>'"));
                }
                let mut num = || -> Result<usize> {
                    tokens
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(ln, "expected 'p wcnf <n> <m>'"))
                };
                header = Some((num()?, num()?));
            }
            "t" => {
                let bits = tokens
                    .map(|s| match s {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(err(ln, "tie defaults must be 0 or 1")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                ties = Some(bits);
            }
            weight => {
                if header.is_none() {
                    return Err(err(ln, "clause before header"));
                }
                let weight = parse_value(weight).map_err(|_| err(ln, "bad weight"))?;
                let mut lits = Vec::new();
                let mut closed = false;
                for tok in tokens {
                    if closed {
                        return Err(err(ln, "tokens after terminating 0"));
                    }
                    let code: i64 = tok.parse().map_err(|_| err(ln, "bad literal"))?;
                    match Literal::from_dimacs(code) {
                        Some(l) => lits.push(l),
                        None => closed = true,
                    }
                }
                if !closed {
                    return Err(err(ln, "clause must end with 0"));
                }
                clauses.push(Clause::new(lits, weight));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::Parse("wcnf: missing header".into()))?;
    if clauses.len() != m {
        return Err(Error::Parse(format!("wcnf: header says {m} clauses, found {}", clauses.len())));
    }
    SatInstance::with_tie_default(n, clauses, ties.unwrap_or_else(|| vec![true; n]))
}
