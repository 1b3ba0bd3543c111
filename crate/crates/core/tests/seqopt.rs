mod common;

use common::{best_sw, binomial, factorial, perms, seq, sw};
use seqdict::mechanisms::det_counterexample;
use seqdict::seq::is_subsequence;
use seqdict::seqopt::{det, det_plus, rand_seeded, LowerBoundInstance, MonotoneInstance};
use seqdict::value::int;
use seqdict::welfare::check_monotone_exhaustive;
use seqdict::{Caps, Error, Valuation, ValuationOracle, Value};

#[test]
fn query_counts_are_exact() {
    for n in 1..=7u64 {
        let inst = MonotoneInstance::random(n as usize, n, 3);
        for c in 1..=n {
            let mut o = ValuationOracle::new(&inst);
            det(&mut o, c as usize).unwrap();
            assert_eq!(o.total_calls(), binomial(n, c) * c * factorial(c), "det n={n} c={c}");
            for seed in 0..3 {
                let mut o = ValuationOracle::new(&inst);
                rand_seeded(&mut o, c as usize, seed).unwrap();
                assert_eq!(o.total_calls(), c * factorial(c), "rand n={n} c={c}");
            }
        }
    }
}

#[test]
fn c_must_be_in_range() {
    let inst = MonotoneInstance::random(3, 0, 2);
    let mut o = ValuationOracle::new(&inst);
    assert_eq!(det(&mut o, 0), Err(Error::COutOfRange { c: 0, n: 3 }));
    assert_eq!(det(&mut o, 4), Err(Error::COutOfRange { c: 4, n: 3 }));
    assert!(rand_seeded(&mut o, 0, 1).is_err());
    assert!(det_plus(&mut o, 4, &Caps::default()).is_err());
}

#[test]
fn det_meets_its_ratio() {
    // c/n * OPT <= SW(det), compared as n * SW >= c * OPT.
    for k in 0..60u64 {
        let n = 2 + (k % 5) as usize;
        let inst = MonotoneInstance::random(n, 1000 + k, 2);
        let opt = best_sw(&inst);
        for c in 1..=n {
            let out = det(&mut ValuationOracle::new(&inst), c).unwrap();
            let got = sw(&inst, out.as_slice());
            assert!(got.clone() * int(n as i64) >= opt.clone() * int(c as i64), "seed {k} c={c}");
            if c == n {
                assert_eq!(got, opt);
            }
        }
    }
}

#[test]
fn det_plus_dominates_det() {
    let caps = Caps::default();
    for k in 0..25u64 {
        let n = 2 + (k % 4) as usize;
        let inst = MonotoneInstance::random(n, 500 + k, 3);
        for c in 1..=n {
            let d = det(&mut ValuationOracle::new(&inst), c).unwrap();
            let p = det_plus(&mut ValuationOracle::new(&inst), c, &caps).unwrap();
            assert!(sw(&inst, p.as_slice()) >= sw(&inst, d.as_slice()));
            // Reference: best over the same candidate set.
            let reference = perms(n)
                .into_iter()
                .filter(|s| s[c..].windows(2).all(|w| w[0] < w[1]))
                .map(|s| sw(&inst, &s))
                .max()
                .unwrap();
            assert_eq!(sw(&inst, p.as_slice()), reference);
        }
        assert_eq!(sw(&inst, det_plus(&mut ValuationOracle::new(&inst), n, &caps).unwrap().as_slice()), best_sw(&inst));
        assert_eq!(det_plus(&mut ValuationOracle::new(&inst), 0, &caps).unwrap(), seqdict::ActionSeq::ascending(n));
    }
}

#[test]
fn rand_with_full_subset_is_optimal() {
    let inst = MonotoneInstance::random(5, 77, 3);
    let opt = best_sw(&inst);
    for seed in 0..5 {
        let run = rand_seeded(&mut ValuationOracle::new(&inst), 5, seed).unwrap();
        assert_eq!(sw(&inst, run.sequence.as_slice()), opt);
    }
}

#[test]
fn rand_single_agent_prefix() {
    let inst = MonotoneInstance::random(5, 78, 3);
    for seed in 0..10 {
        let run = rand_seeded(&mut ValuationOracle::new(&inst), 1, seed).unwrap();
        let j = run.subset[0];
        assert_eq!(run.sequence.as_slice()[0], j);
        assert!(sw(&inst, run.sequence.as_slice()) >= inst.value(j, &[]));
    }
}

#[test]
fn rand_subsets_are_uniform_enough() {
    // 6000 draws of a 2-subset of 0..4: each of the 6 subsets within 5 sigma.
    let inst = MonotoneInstance::random(4, 1, 2);
    let mut counts = std::collections::HashMap::new();
    for seed in 0..6000 {
        let run = rand_seeded(&mut ValuationOracle::new(&inst), 2, seed).unwrap();
        *counts.entry(run.subset).or_insert(0u32) += 1;
    }
    assert_eq!(counts.len(), 6);
    for (s, &k) in &counts {
        assert!((k as f64 - 1000.0).abs() < 5.0 * (6000.0f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt(), "{s:?}: {k}");
    }
}

#[test]
fn lower_bound_examples() {
    let inst = LowerBoundInstance::new(1, seq(&[1, 0, 2])).unwrap();
    assert_eq!(inst.value(2, &[1, 0]), int(1));
    assert_eq!(inst.value(2, &[0, 1]), int(0));
    for i in 0..3 {
        assert_eq!(inst.value(i, &[]), int(1));
    }
}

#[test]
fn lower_bound_family() {
    let caps = Caps::default();
    for n in 1..=6usize {
        for c in 1..=n {
            let inst = LowerBoundInstance::random(n, c, (n * 10 + c) as u64).unwrap();
            let hidden = inst.hidden().as_slice().to_vec();
            assert_eq!(sw(&inst, &hidden), int(n as i64));
            if n <= 5 {
                assert!(check_monotone_exhaustive(&mut ValuationOracle::new(&inst), &caps).unwrap());
            }
            for p in perms(n) {
                if !is_subsequence(&p[..c], &hidden) {
                    assert_eq!(sw(&inst, &p), int(c as i64), "n={n} c={c} {p:?}");
                }
            }
        }
    }
}

#[test]
fn det_on_lower_bound_family() {
    let inst = LowerBoundInstance::new(1, seq(&[1, 2, 0])).unwrap();
    let out = det(&mut ValuationOracle::new(&inst), 1).unwrap();
    assert_eq!(out.as_slice()[0], 0);
    assert!(sw(&inst, out.as_slice()) >= int(1));
}

#[test]
fn det_counterexample_puts_c_first() {
    let (truth, _) = det_counterexample(5, 2).unwrap();
    let out = det(&mut ValuationOracle::new(&truth), 2).unwrap();
    assert_eq!(out.as_slice(), &[0, 1, 2, 3, 4]);
    let plus = det_plus(&mut ValuationOracle::new(&truth), 2, &Caps::default()).unwrap();
    assert_eq!(&plus.as_slice()[..2], &[0, 1]);
    assert_eq!(sw(&truth, plus.as_slice()), int(47));
}

#[test]
fn rand_mean_on_lower_bound() {
    // The mean over many seeds must clear (c/n) OPT = 2 within 3 standard errors.
    let inst = LowerBoundInstance::random(5, 2, 3).unwrap();
    let runs = 2000;
    let samples: Vec<f64> = (0..runs)
        .map(|seed| {
            let run = rand_seeded(&mut ValuationOracle::new(&inst), 2, seed).unwrap();
            seqdict::value::to_f64(&sw(&inst, run.sequence.as_slice()))
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / runs as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
    let se = (var / runs as f64).sqrt();
    assert!(mean >= 2.0 - 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn exact_expected_rand_meets_bound() {
    // Exact expectation over all C(n,c) subsets, via Rand's deterministic core.
    for k in 0..10u64 {
        let n = 4 + (k % 2) as usize;
        let inst = MonotoneInstance::random(n, 300 + k, 3);
        let opt = best_sw(&inst);
        for c in 1..=n {
            let subsets = seqdict::seq::combinations(n, c);
            let total: Value = subsets
                .iter()
                .map(|s| {
                    let out = seqdict::seqopt::rand_with_subset(&mut ValuationOracle::new(&inst), s).unwrap();
                    sw(&inst, out.as_slice())
                })
                .sum();
            let mean = total / int(subsets.len() as i64);
            assert!(mean * int(n as i64) >= opt.clone() * int(c as i64));
        }
    }
}
