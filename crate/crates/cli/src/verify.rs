//! Property suites behind `seqdict verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use seqdict::feasibility::{producing_sequence_exhaustive, Collection};
use seqdict::mechanisms::{
    counterexample_profiles, cycle_mon_terms, truthfulness_spotcheck, AgentTable, Bit, Mechanism, TargetRule,
    ValuationProfile, VcgDetPlus, VcgRand,
};
use seqdict::osa::{
    bit_expected_welfare, for_each_arborescence, greedy_osa, is_pareto_optimal_arborescence, random_digraph_instance,
    sequence_for_arborescence, Arborescence, ArborescenceContext,
};
use seqdict::osi::OsiInstance;
use seqdict::osm::{
    greedy_osm, is_pareto_optimal_matching, random_matching_instance, sequence_for_matching, Matching,
    MatchingContext,
};
use seqdict::oss::{assignment_from_sequence, nonmonotone_sat_instance, random_sat_instance, sat_as_decide, x3c_reduce};
use seqdict::paths::random_paths_instance;
use seqdict::seq::{for_each_permutation, is_subsequence};
use seqdict::seqopt::{det, LowerBoundInstance, MonotoneInstance};
use seqdict::value::{int, ratio, zero};
use seqdict::welfare::{brute_force_optimal_sequence, check_monotone_exhaustive, monotonicity_violations, welfare_of};
use seqdict::{ActionSeq, Caps, Valuation, ValuationOracle, Value};

use crate::instance::{Instance, InstanceFile};
use crate::report::{envelope, pq};
use crate::CliError;

pub const SUITES: [&str; 6] = ["monotonicity", "pareto", "approx", "truthful", "lowerbound", "x3c"];

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub data: Json,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into(), data: Json::Null }
    }

    fn with_data(mut self, data: Json) -> Self {
        self.data = data;
        self
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random instances per structure and size class.
    pub instances: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, instances: 50 }
    }
}

/// A per-instance seed, distinct across `(label, k)`.
pub fn derive_seed(seed: u64, label: &str, k: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in label.bytes().chain(k.to_le_bytes()) {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn best(v: &dyn Valuation, caps: &Caps) -> Result<Value, CliError> {
    Ok(brute_force_optimal_sequence(&mut ValuationOracle::new(v), caps)?.1)
}

pub fn run_suite(
    suite: &str,
    file: Option<&InstanceFile>,
    opts: &VerifyOptions,
    caps: &Caps,
) -> Result<Vec<Check>, CliError> {
    match (suite, file) {
        ("monotonicity", None) => monotonicity(opts, caps),
        ("monotonicity", Some(f)) => Ok(vec![instance_monotonicity(&f.instance, caps)?]),
        ("pareto", None) => pareto(opts, caps),
        ("approx", None) => approx(opts, caps),
        ("truthful", None) => truthful(opts, caps),
        ("truthful", Some(f)) => instance_truthful(f, caps),
        ("lowerbound", None) => lowerbound(opts, caps),
        ("x3c", None) => x3c(caps),
        (s, Some(_)) if SUITES.contains(&s) => {
            Err(CliError::Usage(format!("suite {s} does not take --instance")))
        }
        (other, _) => Err(CliError::Usage(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    }
}

pub fn verify_report(suite: &str, opts: &VerifyOptions, caps: &Caps, checks: &[Check]) -> Json {
    let passed = checks.iter().all(|c| c.passed);
    envelope(
        "verify",
        caps,
        json!({
            "suite": suite,
            "seed": opts.seed,
            "instances": opts.instances,
            "passed": passed,
            "checks": checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail, "data": c.data}))
                .collect::<Vec<_>>(),
        }),
    )
}

pub fn verify_text(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        s += &format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    s
}

fn violation_json(w: &seqdict::welfare::MonotonicityViolation) -> Json {
    json!({
        "agent": w.agent,
        "shorter": w.shorter.as_slice(),
        "shorter_value": pq(&w.shorter_value),
        "longer": w.longer.as_slice(),
        "longer_value": pq(&w.longer_value),
    })
}

fn instance_monotonicity(inst: &Instance, caps: &Caps) -> Result<Check, CliError> {
    let found = monotonicity_violations(&mut ValuationOracle::new(inst.valuation()), caps)?;
    let detail = match found.first() {
        None => "monotone".to_string(),
        Some(w) => format!(
            "{} violations; first: v_{}({:?}) = {} < v_{}({:?}) = {}",
            found.len(),
            w.agent,
            w.shorter.as_slice(),
            pq(&w.shorter_value),
            w.agent,
            w.longer.as_slice(),
            pq(&w.longer_value)
        ),
    };
    Ok(Check::new(format!("{} instance is monotone", inst.kind()), found.is_empty(), detail)
        .with_data(json!({"monotone": found.is_empty(), "violations": found.iter().map(violation_json).collect::<Vec<_>>()})))
}

fn monotonicity(opts: &VerifyOptions, caps: &Caps) -> Result<Vec<Check>, CliError> {
    let per_size = opts.instances.div_ceil(4).max(1);
    let mut checks = Vec::new();
    type Make = fn(usize, u64) -> Box<dyn Valuation>;
    let families: [(&str, Make); 5] = [
        ("osm", |n, s| Box::new(random_matching_instance(n, s, 3))),
        ("osa", |n, s| Box::new(random_digraph_instance(n, s, 3))),
        ("osi", |n, s| Box::new(OsiInstance::random(n, s, 1, 2))),
        ("paths", |n, s| Box::new(random_paths_instance(n, s, 3))),
        ("lowerbound", |n, s| {
            Box::new(LowerBoundInstance::random(n, 1 + (s as usize) % n, s).expect("c in range"))
        }),
    ];
    for (name, make) in families {
        let mut total = 0;
        let mut bad = 0;
        let mut first = Json::Null;
        for n in 2..=5 {
            for k in 0..per_size {
                let v = make(n, derive_seed(opts.seed, name, n * 1000 + k));
                total += 1;
                let found = monotonicity_violations(&mut ValuationOracle::new(v.as_ref()), caps)?;
                if let Some(w) = found.first() {
                    bad += 1;
                    if first.is_null() {
                        first = json!({"n": n, "instance": k, "witness": violation_json(w)});
                    }
                }
            }
        }
        let detail = if bad == 0 {
            format!("{total} random instances, n = 2..5, all monotone")
        } else {
            format!("{bad} of {total} random instances, n = 2..5, not monotone; first {first}")
        };
        checks.push(Check::new(format!("{name} monotone"), bad == 0, detail).with_data(first));
    }
    let nonmono = nonmonotone_sat_instance();
    let found = monotonicity_violations(&mut ValuationOracle::new(&nonmono), caps)?;
    let witness = found.iter().find(|w| {
        w.agent == 2
            && w.shorter.as_slice() == [1]
            && w.longer.as_slice() == [0, 1]
            && w.shorter_value == int(1)
            && w.longer_value == int(2)
    });
    checks.push(
        Check::new(
            "oss non-monotone instance flagged",
            witness.is_some(),
            match witness {
                Some(_) => "v_2((0, 1)) = 2 > v_2((1)) = 1".to_string(),
                None => "expected witness not found".to_string(),
            },
        )
        .with_data(witness.map(violation_json).unwrap_or(Json::Null)),
    );
    Ok(checks)
}

fn pareto(opts: &VerifyOptions, caps: &Caps) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let (mut checked, mut disagree) = (0usize, Vec::new());
    for k in 0..opts.instances {
        let n = 1 + k % 4;
        let inst = random_matching_instance(n, derive_seed(opts.seed, "pareto-osm", k), 3);
        let items: Vec<usize> = (0..n).collect();
        let mut err = None;
        for_each_permutation(&items, |m| {
            let result = (|| -> Result<[bool; 3], CliError> {
                let matching = Matching::new(m.to_vec())?;
                let target = Collection::full(m.iter().copied());
                Ok([
                    producing_sequence_exhaustive(&MatchingContext(&inst), &target, caps)?.is_some(),
                    sequence_for_matching(&inst, &matching)?.is_produced(),
                    is_pareto_optimal_matching(&inst, &matching, caps)?,
                ])
            })();
            match result {
                Ok(v) => {
                    checked += 1;
                    if v[0] != v[1] || v[1] != v[2] {
                        disagree.push(json!({"instance": k, "matching": m, "verdicts": v}));
                    }
                    true
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    checks.push(
        Check::new(
            "osm: producible = decider accepts = Pareto-optimal",
            disagree.is_empty(),
            format!("{checked} matchings over {} instances, n = 1..4, {} disagreements", opts.instances, disagree.len()),
        )
        .with_data(json!(disagree)),
    );

    let (mut checked, mut disagree) = (0usize, Vec::new());
    for k in 0..opts.instances {
        let n = 1 + k % 4;
        let inst = random_digraph_instance(n, derive_seed(opts.seed, "pareto-osa", k), 3);
        let mut trees = Vec::new();
        for_each_arborescence(n, |t| trees.push(t.to_vec()));
        for t in trees {
            let tree = Arborescence::new(t.clone())?;
            let target = Collection::full(t.iter().copied());
            let v = [
                producing_sequence_exhaustive(&ArborescenceContext(&inst), &target, caps)?.is_some(),
                sequence_for_arborescence(&inst, &tree)?.is_produced(),
                is_pareto_optimal_arborescence(&inst, &tree, caps)?,
            ];
            checked += 1;
            if v[0] != v[1] || v[1] != v[2] {
                disagree.push(json!({"instance": k, "parents": t, "verdicts": v}));
            }
        }
    }
    checks.push(
        Check::new(
            "osa: producible = decider accepts = Pareto-optimal",
            disagree.is_empty(),
            format!("{checked} arborescences over {} instances, n = 1..4, {} disagreements", opts.instances, disagree.len()),
        )
        .with_data(json!(disagree)),
    );
    Ok(checks)
}

fn approx(opts: &VerifyOptions, caps: &Caps) -> Result<Vec<Check>, CliError> {
    let m = opts.instances;
    let mut checks = Vec::new();

    let mut worst: Option<(Value, Json)> = None;
    let mut failures = 0;
    for k in 0..m {
        let n = 2 + k % 5;
        let inst = MonotoneInstance::random(n, derive_seed(opts.seed, "approx-det", k), 3);
        let opt = best(&inst, caps)?;
        for c in 1..=n {
            let sw = welfare_of(&inst, &det(&mut ValuationOracle::new(&inst), c)?)?;
            // Slack of SW against the guarantee, scaled by n.
            let slack = sw.clone() * int(n as i64) - opt.clone() * int(c as i64);
            if slack < zero() {
                failures += 1;
            }
            if worst.as_ref().is_none_or(|(w, _)| slack < *w) {
                worst = Some((slack, json!({"instance": k, "n": n, "c": c, "welfare": pq(&sw), "optimum": pq(&opt)})));
            }
        }
    }
    checks.push(Check::new(
        "det: SW >= (c/n) OPT",
        failures == 0,
        format!("{m} general instances, n = 2..6, every c; {failures} failures"),
    ).with_data(worst.map(|w| w.1).unwrap_or(Json::Null)));

    for (name, label) in [("greedy-osm", "approx-osm"), ("greedy-osa", "approx-osa")] {
        let mut failures = Vec::new();
        for k in 0..m {
            let n = 3 + k % 4;
            let s = derive_seed(opts.seed, label, k);
            let (sw, opt) = if name == "greedy-osm" {
                let inst = random_matching_instance(n, s, 4);
                (welfare_of(&inst, &greedy_osm(&mut ValuationOracle::new(&inst))?)?, best(&inst, caps)?)
            } else {
                let inst = random_digraph_instance(n, s, 4);
                (welfare_of(&inst, &greedy_osa(&mut ValuationOracle::new(&inst))?)?, best(&inst, caps)?)
            };
            if sw.clone() * int(2) < opt {
                failures.push(json!({"instance": k, "n": n, "welfare": pq(&sw), "optimum": pq(&opt)}));
            }
        }
        checks.push(
            Check::new(
                format!("{name}: SW >= OPT / 2"),
                failures.is_empty(),
                format!("{m} instances, n = 3..6; {} failures", failures.len()),
            )
            .with_data(json!(failures)),
        );
    }

    let mut failures = Vec::new();
    let mut sequences = 0usize;
    for k in 0..m {
        let n = 1 + k % 5;
        let inst = random_sat_instance(n, 2 * n + k % 3, 3, derive_seed(opts.seed, "approx-oss", k), 4)?;
        let half = inst.total_weight() / int(2);
        let agents: Vec<usize> = (0..n).collect();
        for_each_permutation(&agents, |p| {
            sequences += 1;
            let sw: Value = (0..n).map(|j| inst.value(p[j], &p[..j])).sum();
            if sw < half {
                failures.push(json!({"instance": k, "sequence": p, "welfare": pq(&sw)}));
            }
            true
        });
    }
    checks.push(
        Check::new(
            "oss: every sequence collects half the clause weight",
            failures.is_empty(),
            format!("{sequences} sequences over {m} instances, n = 1..5; {} failures", failures.len()),
        )
        .with_data(json!(failures)),
    );

    let mut failures = Vec::new();
    for k in 0..m {
        let n = 1 + k % 6;
        let inst = random_digraph_instance(n, derive_seed(opts.seed, "approx-bit", k), 4);
        let e = bit_expected_welfare(&inst)?;
        let opt = best(&inst, caps)?;
        if e.clone() * int(2) < opt {
            failures.push(json!({"instance": k, "expected": pq(&e), "optimum": pq(&opt)}));
        }
    }
    checks.push(
        Check::new(
            "bit: E[SW] >= OPT / 2 on osa",
            failures.is_empty(),
            format!("{m} instances, n = 1..6; {} failures", failures.len()),
        )
        .with_data(json!(failures)),
    );
    Ok(checks)
}

/// Zero, a large constant, doubled truth, an early-only spike and a few
/// random tables, plus `extra`.
pub fn misreport_family(truth: &ValuationProfile, agent: usize, extra: Option<&AgentTable>, seed: u64) -> Vec<AgentTable> {
    let n = truth.agents();
    let mut out = vec![
        AgentTable::from_fn(n, agent, |_| zero()),
        AgentTable::from_fn(n, agent, |_| int(100)),
        AgentTable::from_fn(n, agent, |s| truth.value(agent, s) * int(2)),
        AgentTable::from_fn(n, agent, |s| if s.is_empty() { int(50) } else { zero() }),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        out.push(AgentTable::from_fn(n, agent, |_| ratio(rng.gen_range(0..=20), 4)));
    }
    out.extend(extra.cloned());
    out
}

fn terms_json(t: &seqdict::mechanisms::CycleMonTerms) -> Json {
    json!({
        "truth_at_truth": pq(&t.truth_at_truth),
        "alt_at_alt": pq(&t.alt_at_alt),
        "truth_at_alt": pq(&t.truth_at_alt),
        "alt_at_truth": pq(&t.alt_at_truth),
        "violated": t.violated(),
    })
}

fn truthful(opts: &VerifyOptions, caps: &Caps) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for eps in [ratio(1, 10), ratio(1, 100)] {
        for case in counterexample_profiles(&eps, 5, 2, caps)? {
            let t = case.terms()?;
            checks.push(
                Check::new(
                    format!("{} ({}) violates cycle monotonicity, eps = {}", case.name, case.rule.name(), pq(&eps)),
                    t.violated(),
                    format!(
                        "{} + {} vs {} + {}",
                        pq(&t.truth_at_truth),
                        pq(&t.alt_at_alt),
                        pq(&t.truth_at_alt),
                        pq(&t.alt_at_truth)
                    ),
                )
                .with_data(terms_json(&t)),
            );
        }
    }
    for case in counterexample_profiles(&ratio(1, 10), 4, 2, caps)? {
        let n = case.truth.agents();
        let families: Vec<Vec<AgentTable>> = (0..n)
            .map(|i| {
                let extra = (i == case.agent).then_some(&case.alt);
                misreport_family(&case.truth, i, extra, derive_seed(opts.seed, case.name, i))
            })
            .collect();
        let mut mechs: Vec<Box<dyn Mechanism>> = Vec::new();
        for c in 1..=n {
            mechs.push(Box::new(VcgRand { c }));
            mechs.push(Box::new(VcgDetPlus { c, caps: *caps }));
        }
        mechs.push(Box::new(Bit));
        for mech in mechs {
            let r = truthfulness_spotcheck(mech.as_ref(), &case.truth, &families)?;
            checks.push(Check::new(
                format!("{} truthful on the {} counterexample", mech.name(), case.name),
                r.passed(),
                format!(
                    "{} misreports; {} violations, {} negative payments, {} rationality failures",
                    r.pairs_checked,
                    r.violations.len(),
                    r.negative_payments.len(),
                    r.rationality_failures.len()
                ),
            ));
        }
    }
    Ok(checks)
}

fn instance_truthful(file: &InstanceFile, caps: &Caps) -> Result<Vec<Check>, CliError> {
    let rule = match file.instance.kind() {
        "osm" => TargetRule::GreedyOsm,
        "osa" => TargetRule::GreedyOsa,
        k => return Err(CliError::Usage(format!("verify truthful --instance needs osm or osa, got {k}"))),
    };
    let Some((truth, lie, agent)) = file.misreport_profiles(caps)? else {
        return Err(CliError::Usage("instance file has no misreport".into()));
    };
    let t = cycle_mon_terms(|o| rule.run(o), &truth, agent, lie.table(agent))?;
    Ok(vec![Check::new(
        format!("{} violates cycle monotonicity", rule.name()),
        t.violated(),
        format!(
            "{} + {} vs {} + {}",
            pq(&t.truth_at_truth),
            pq(&t.alt_at_alt),
            pq(&t.truth_at_alt),
            pq(&t.alt_at_truth)
        ),
    )
    .with_data(terms_json(&t))])
}

fn lowerbound(opts: &VerifyOptions, caps: &Caps) -> Result<Vec<Check>, CliError> {
    let mut opt_bad = Vec::new();
    let mut score_bad = Vec::new();
    let mut mono_bad = Vec::new();
    let mut count = 0;
    for n in 1..=6 {
        for c in 1..=n {
            let inst = LowerBoundInstance::random(n, c, derive_seed(opts.seed, "lowerbound", n * 10 + c))?;
            count += 1;
            let opt = best(&inst, caps)?;
            if opt != int(n as i64) {
                opt_bad.push(json!({"n": n, "c": c, "optimum": pq(&opt)}));
            }
            let hidden = inst.hidden().as_slice().to_vec();
            let agents: Vec<usize> = (0..n).collect();
            for_each_permutation(&agents, |p| {
                if !is_subsequence(&p[..c], &hidden) {
                    let sw: Value = (0..n).map(|j| inst.value(p[j], &p[..j])).sum();
                    if sw != int(c as i64) {
                        score_bad.push(json!({"n": n, "c": c, "sequence": p, "welfare": pq(&sw)}));
                    }
                }
                true
            });
            if n <= 5 && !check_monotone_exhaustive(&mut ValuationOracle::new(&inst), caps)? {
                mono_bad.push(json!({"n": n, "c": c}));
            }
        }
    }
    Ok(vec![
        Check::new("F_c: optimal welfare is n", opt_bad.is_empty(), format!("{count} instances, n = 1..6, every c"))
            .with_data(json!(opt_bad)),
        Check::new(
            "F_c: sequences whose c-prefix misses the hidden order score c",
            score_bad.is_empty(),
            format!("{count} instances, all sequences; {} failures", score_bad.len()),
        )
        .with_data(json!(score_bad)),
        Check::new("F_c: monotone", mono_bad.is_empty(), "n = 1..5, every c").with_data(json!(mono_bad)),
    ])
}

/// Whether some sequence makes every variable true.
fn all_true_reachable(sets: &[[usize; 3]], universe: usize, caps: &Caps) -> Result<(bool, usize), CliError> {
    let inst = x3c_reduce(universe, sets)?;
    let n = inst.n();
    let found = sat_as_decide(&inst, &vec![true; n], caps)?;
    if let Some(s) = &found {
        debug_assert!(assignment_from_sequence(&inst, s)?.iter().all(|&b| b));
    }
    Ok((found.is_some(), n))
}

fn x3c(caps: &Caps) -> Result<Vec<Check>, CliError> {
    let cases: [(&str, usize, Vec<[usize; 3]>, bool); 4] = [
        ("yes, q = 1, t = 1", 3, vec![[0, 1, 2]], true),
        ("no, q = 2, t = 2, element 4 uncovered", 6, vec![[0, 1, 2], [1, 2, 3]], false),
        ("yes, q = 2, t = 2", 6, vec![[0, 1, 2], [3, 4, 5]], true),
        ("no, q = 2, t = 3, pairwise intersecting", 6, vec![[0, 1, 2], [1, 3, 4], [2, 4, 5]], false),
    ];
    let mut checks = Vec::new();
    for (name, universe, sets, expected) in cases {
        let (got, n) = all_true_reachable(&sets, universe, caps)?;
        checks.push(
            Check::new(
                format!("x3c {name}"),
                got == expected,
                format!("{n} variables; all-true {}", if got { "reachable" } else { "unreachable" }),
            )
            .with_data(json!({"variables": n, "all_true_reachable": got})),
        );
    }
    Ok(checks)
}

/// Exhaustive: does any of the `n!` sequences produce `target`?
pub fn literal_all_sequences(inst: &seqdict::oss::SatInstance, target: &[bool]) -> Result<Option<ActionSeq>, CliError> {
    let agents: Vec<usize> = (0..inst.n()).collect();
    let mut found = None;
    let mut err = None;
    for_each_permutation(&agents, |p| match ActionSeq::new(p.to_vec()).and_then(|s| {
        let a = assignment_from_sequence(inst, &s)?;
        Ok((s, a))
    }) {
        Ok((s, a)) => {
            if a == target {
                found = Some(s);
                false
            } else {
                true
            }
        }
        Err(e) => {
            err = Some(e);
            false
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(found),
    }
}
