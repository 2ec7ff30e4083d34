// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints exactly one PASS/FAIL line, even when captured output
//! would otherwise be hidden.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use qtorus::harness::{
    gen_commutative, gen_finite_index, gen_independent, gen_random, gen_symplectic, gen_transpose_pair,
    run_campaign, Analysis, CampaignConfig, Outcome, Statement,
};
use qtorus::instance::{parse_str, to_json_string};
use qtorus::lattice::{int_vector, IntMatrix, Sublattice};
use qtorus::pairing::{pairing_of, MultiparameterMatrix};
use qtorus::solver::{
    brute_force_dimension, dim_single_form, dimension, dimension_of_pairing, dimension_with_hint, DimensionOptions,
};
use qtorus::twisted::{cocycle, commutator_units};
use qtorus::value_group::{GroupElement, MergeMode, ValueGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion<'a> = Box<dyn Fn() -> Check + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts() -> DimensionOptions {
    DimensionOptions::default()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn independent_dimension() -> Check {
    let mut times = Vec::new();
    for n in 2..=5 {
        let l = gen_independent(n);
        let (d, t) = timed(|| dimension(&l, &opts()));
        ensure(d.exact && d.lower == 1, || format!("n={n}: [{}, {}]", d.lower, d.upper))?;
        ensure(t < Duration::from_secs(1), || format!("n={n}: {t:?}"))?;
        times.push(format!("n={n} {:.0?}", t));
    }
    Ok(format!("exact 1 for n=2..5 ({})", times.join(", ")))
}

fn transpose_tensor() -> Check {
    let mut times = Vec::new();
    for n in 2..=4 {
        let (l, lt) = gen_transpose_pair(n);
        let (a, t) = timed(|| Analysis::new(&[l, lt], MergeMode::Shared, &opts()).map_err(|e| e.to_string()));
        let a = a?;
        ensure(a.tensor.exact && a.tensor.lower == n, || format!("n={n}: [{}, {}]", a.tensor.lower, a.tensor.upper))?;
        let p = pairing_of(&a.product);
        ensure(p.is_commutative(&a.tensor.witness).unwrap(), || format!("n={n}: witness not commutative"))?;
        // The diagonal (e_i, e_i) is itself a maximal witness: handing it to
        // the solver must give back an exact n containing it.
        let diagonal: Vec<_> = (0..n)
            .map(|i| {
                let mut v = vec![0i64; 2 * n];
                v[i] = 1;
                v[n + i] = 1;
                int_vector(&v)
            })
            .collect();
        let diag = Sublattice::from_rows(2 * n, diagonal.clone()).map_err(|e| e.to_string())?;
        ensure(p.is_commutative(&diag).unwrap(), || format!("n={n}: diagonal does not commute"))?;
        let d = dimension_with_hint(&p, &opts(), Some(&diag));
        ensure(d.value() == Some(n) && d.witness.rank() == n, || format!("n={n}: with diagonal [{}, {}]", d.lower, d.upper))?;
        for (i, v) in diagonal.iter().enumerate() {
            ensure(d.witness.contains(v), || format!("n={n}: diagonal e_{} missing", i + 1))?;
        }
        let v = a.upper_bound();
        ensure(v.data.bound == Some((n, n)), || format!("n={n}: bound {:?}", v.data.bound))?;
        ensure(v.conclusion == Outcome::Holds, || format!("n={n}: upper bound {:?}", v.conclusion))?;
        if n == 4 {
            ensure(t < Duration::from_secs(10), || format!("n=4: {t:?}"))?;
        }
        times.push(format!("n={n} {:.0?}", t));
    }
    Ok(format!("exact n with diagonal witness, equal to the bound ({})", times.join(", ")))
}

fn campaign() -> qtorus::harness::Report {
    run_campaign(&CampaignConfig::default())
}

fn superadditivity(report: &qtorus::harness::Report) -> Check {
    let t = &report.tallies["superadditivity"];
    ensure(t.total() == 500, || format!("{} verdicts", t.total()))?;
    ensure(t.violated == 0, || format!("{} violated", t.violated))?;
    let decisive = t.decisive_fraction();
    ensure(decisive >= 0.9, || format!("decisive {:.1}%", 100.0 * decisive))?;
    Ok(format!("500 trials, 0 violated, {:.1}% decisive", 100.0 * decisive))
}

fn upper_bound(report: &qtorus::harness::Report) -> Check {
    let sharp = &report.tallies["upper_bound"];
    let weak = &report.tallies["weak_upper_bound"];
    ensure(sharp.violated == 0, || format!("{} violated under the hypotheses", sharp.violated))?;
    ensure(weak.violated == 0, || format!("{} weak-bound violations", weak.violated))?;

    let a = Analysis::new(&[gen_commutative(2), gen_symplectic(1, "q")], MergeMode::Shared, &opts())
        .map_err(|e| e.to_string())?;
    let dims: Vec<_> = a.factors.iter().map(|f| f.dim.value()).collect();
    ensure(dims == [Some(2), Some(1)], || format!("factor dims {dims:?}"))?;
    ensure(a.tensor.value() == Some(3), || format!("tensor [{}, {}]", a.tensor.lower, a.tensor.upper))?;
    let v = a.upper_bound();
    ensure(!v.hypotheses_met && v.statement == Statement::WeakUpperBound, || "hypotheses reported met".into())?;
    ensure(v.conclusion == Outcome::Holds && v.data.bound == Some((3, 3)), || format!("weak bound {:?}", v.data.bound))?;
    Ok(format!(
        "{} hypothesis-meeting trials, 0 violated; {} weak-bound trials hold; 2/2 ranks with dims 2/1 give d = 3 <= 3",
        sharp.holds + sharp.inconclusive,
        weak.holds
    ))
}

fn strict_instance() -> Check {
    let mut times = Vec::new();
    for mode in [MergeMode::Shared, MergeMode::Disjoint] {
        let s = gen_symplectic(2, "q");
        let (a, t) = timed(|| Analysis::new(&[s.clone(), s], mode, &opts()).map_err(|e| e.to_string()));
        let a = a?;
        for f in &a.factors {
            ensure(f.dim.value() == Some(2) && f.center_is_f, || format!("{mode:?}: factor {:?}", f.dim.value()))?;
        }
        ensure(a.tensor.value() == Some(4), || format!("{mode:?}: tensor [{}, {}]", a.tensor.lower, a.tensor.upper))?;
        let s = a.strict();
        ensure(s.hypotheses_met && s.conclusion == Outcome::Holds && s.data.bound == Some((5, 5)), || {
            format!("{mode:?}: strict {:?} {:?}", s.conclusion, s.data.bound)
        })?;
        let d = a.additivity();
        ensure(
            d.statement == Statement::AdditivityCodim2 && d.hypotheses_met && d.conclusion == Outcome::Holds,
            || format!("{mode:?}: additivity {:?} {:?}", d.statement, d.conclusion),
        )?;
        ensure(t < Duration::from_secs(30), || format!("{mode:?}: {t:?}"))?;
        times.push(format!("{mode:?} {:.0?}", t).to_lowercase());
    }
    Ok(format!("exact 4 < 5 and 4 = 2 + 2 in both modes ({})", times.join(", ")))
}

fn weyl_chain() -> Check {
    let chain: Vec<_> = ["q1", "q2", "q3"].iter().map(|q| gen_symplectic(1, q)).collect();
    let a = Analysis::new(&chain, MergeMode::Shared, &opts()).map_err(|e| e.to_string())?;
    let v = a.weyl_chain();
    ensure(v.hypotheses_met && v.conclusion == Outcome::Holds, || format!("{:?}", v.conclusion))?;
    ensure(a.tensor.value() == Some(3), || format!("[{}, {}]", a.tensor.lower, a.tensor.upper))?;
    Ok("three rank-2 factors, exact 3 = 1 + 1 + 1".into())
}

fn single_q(m: &IntMatrix) -> MultiparameterMatrix {
    let g = ValueGroup::new(vec!["q"], 1).unwrap();
    let gg = g.clone();
    MultiparameterMatrix::from_upper(m.rows(), g, |i, j| gg.element(vec![m.get(i, j).clone()], 0).unwrap()).unwrap()
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut exact = 0;
    for trial in 0..200 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(0..=2);
        let l = gen_random(n, k, 1, 2, rng.gen());
        let d = dimension(&l, &opts());
        let o = brute_force_dimension(&l, 2).map_err(|e| e.to_string())?;
        ensure(d.lower <= o && o <= d.upper, || format!("trial {trial}: oracle {o} outside [{}, {}]", d.lower, d.upper))?;
        if d.exact {
            ensure(o == d.lower, || format!("trial {trial}: oracle {o}, exact {}", d.lower))?;
            exact += 1;
        }
    }
    let mut forms = 0;
    for n in 1..=4usize {
        let slots = n * (n - 1) / 2;
        for code in 0..5usize.pow(slots as u32) {
            let mut m = IntMatrix::zeros(n, n);
            let mut s = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let v = BigInt::from((code / 5usize.pow(s) % 5) as i64 - 2);
                    m.set(j, i, -v.clone());
                    m.set(i, j, v);
                    s += 1;
                }
            }
            let f = dim_single_form(&m).map_err(|e| e.to_string())?.dimension;
            let o = brute_force_dimension(&single_q(&m), 2).map_err(|e| e.to_string())?;
            ensure(f == o, || format!("form {:?}: formula {f}, oracle {o}", m.to_i64_rows()))?;
            forms += 1;
        }
    }
    Ok(format!("200 random instances inside the interval ({exact} exact, all equal); {forms} single forms agree"))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigInt> {
    (0..n).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect()
}

fn commutator_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=4);
        let l = gen_random(n, rng.gen_range(0..=2), rng.gen_range(1..=4), 2, rng.gen());
        let g = l.value_group().clone();
        let p = pairing_of(&l);
        let (a, b, c) = (random_vector(&mut rng, n), random_vector(&mut rng, n), random_vector(&mut rng, n));
        let sum = |u: &[BigInt], v: &[BigInt]| -> Vec<BigInt> { u.iter().zip(v).map(|(x, y)| x + y).collect() };
        let neg = |u: &[BigInt]| -> Vec<BigInt> { u.iter().map(|x| -x).collect() };
        let comm = |u: &[BigInt], v: &[BigInt]| commutator_units(&l, u, v).unwrap();

        ensure(comm(&a, &b) == p.commutator(&a, &b).unwrap(), || format!("trial {trial}: units differ from pairing"))?;

        let lhs = g.combine(&cocycle(&l, &a, &b).unwrap(), &cocycle(&l, &sum(&a, &b), &c).unwrap()).unwrap();
        let rhs = g.combine(&cocycle(&l, &b, &c).unwrap(), &cocycle(&l, &a, &sum(&b, &c)).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("trial {trial}: cocycle identity"))?;

        let mul = |x: &GroupElement, y: &GroupElement| g.combine(x, y).unwrap();
        ensure(comm(&sum(&a, &b), &c) == mul(&comm(&a, &c), &comm(&b, &c)), || format!("trial {trial}: left additivity"))?;
        ensure(comm(&a, &sum(&b, &c)) == mul(&comm(&a, &b), &comm(&a, &c)), || format!("trial {trial}: right additivity"))?;
        ensure(comm(&a, &neg(&b)) == g.inverse(&comm(&a, &b)), || format!("trial {trial}: inverse in second slot"))?;
        ensure(comm(&neg(&a), &b) == g.inverse(&comm(&a, &b)), || format!("trial {trial}: inverse in first slot"))?;
    }
    Ok("1000 pairs/triples: units = pairing, cocycle identity and commutator identities hold".into())
}

fn finite_index() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut trials, mut drawn) = (0, 0);
    while trials < 200 {
        drawn += 1;
        ensure(drawn <= 2000, || format!("only {trials} exact instances in {drawn} draws"))?;
        let n = rng.gen_range(1..=4);
        let l = gen_random(n, rng.gen_range(0..=2), rng.gen_range(1..=3), 2, rng.gen());
        let p = pairing_of(&l);
        let Some(d) = dimension_of_pairing(&p, &opts()).value() else { continue };
        let b = gen_finite_index(n, 3, rng.gen());
        let r = p.restrict(&b).map_err(|e| e.to_string())?;
        let dr = dimension_of_pairing(&r, &opts());
        ensure(dr.value() == Some(d), || format!("trial {trials}: {d} became [{}, {}]", dr.lower, dr.upper))?;
        ensure(r.center_is_f() == p.center_is_f(), || format!("trial {trials}: center changed"))?;
        trials += 1;
    }
    Ok(format!("200 restrictions ({drawn} draws): dimension and center unchanged"))
}

fn qtorus(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qtorus"))
        .args(args)
        .env_remove("QTORUS_TIME_BUDGET_MS")
        .output()
        .expect("binary runs")
}

fn cli_contract() -> Check {
    for seed in 0..100u64 {
        let n = (1 + seed % 4).to_string();
        let k = (seed % 3).to_string();
        let m = (1 + seed % 3).to_string();
        let s = seed.to_string();
        let out = qtorus(&["generate", "random", "-n", &n, "-k", &k, "-m", &m, "--seed", &s]);
        ensure(out.status.success(), || format!("generate {seed} failed"))?;
        let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        let l = parse_str(&text).map_err(|e| format!("seed {seed}: {e}"))?;
        let again = to_json_string(&l).map_err(|e| e.to_string())?;
        ensure(again == text, || format!("seed {seed}: serialization is not a fixed point"))?;
        ensure(parse_str(&again).unwrap() == l, || format!("seed {seed}: reparse differs"))?;
    }
    let runs: Vec<_> = (0..2).map(|_| timed(|| qtorus(&["--json", "verify", "--trials", "500", "--seed", "7"]))).collect();
    for (out, _) in &runs {
        ensure(out.status.code() == Some(0), || format!("verify exited {:?}", out.status.code()))?;
    }
    ensure(runs[0].0.stdout == runs[1].0.stdout, || "verify output differs between runs".into())?;
    let report: Value = serde_json::from_slice(&runs[0].0.stdout).map_err(|e| e.to_string())?;
    let violated: u64 = report["tallies"]
        .as_object()
        .ok_or("no tallies")?
        .values()
        .map(|t| t["violated"].as_u64().unwrap_or(0))
        .sum();
    ensure(violated == 0, || format!("{violated} violations"))?;
    Ok(format!("100 round trips; verify exits 0 with 0 violations, identical bytes ({:.1?} per run)", runs[0].1))
}

fn main() -> ExitCode {
    // Both campaign criteria read the same report.
    let report = catch_unwind(campaign);
    let from_report = |f: fn(&qtorus::harness::Report) -> Check| -> Check {
        match &report {
            Ok(r) => f(r),
            Err(_) => Err("campaign panicked".into()),
        }
    };
    let checks: Vec<(&str, Criterion)> = vec![
        ("independent multiparameters have dimension 1", Box::new(independent_dimension)),
        ("tensor with the transpose reaches n", Box::new(transpose_tensor)),
        ("super-additivity campaign", Box::new(move || from_report(superadditivity))),
        ("upper-bound campaign and hypothesis necessity", Box::new(move || from_report(upper_bound))),
        ("strict inequality and codim-2 additivity", Box::new(strict_instance)),
        ("chain of rank-2 factors", Box::new(weyl_chain)),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("commutator oracle", Box::new(commutator_oracle)),
        ("finite-index invariance", Box::new(finite_index)),
        ("command-line contract", Box::new(cli_contract)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let (result, t) = timed(|| catch_unwind(AssertUnwindSafe(check)));
        let result = result.unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", i + 1, t),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{:.2?}]", i + 1, t);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
