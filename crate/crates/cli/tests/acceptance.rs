//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Expected values are computed here by small
//! independent oracles rather than taken from the library.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use horncat::{load_and_preprocess, solve, RunConfig, SatResult, SolveOutput, Verdict};
use horncat_core::automata::{build_automata, check_herbrand_model, theorem1_check};
use horncat_core::fixtures;
use horncat_core::fuzz::{random_system, FuzzLimits};
use horncat_core::ir::Term;
use horncat_core::model::{cardinality_schedule, find_model, verify_model, FindOutcome, SearchBudget};
use horncat_core::preprocess::diseq_rule_system;
use horncat_core::refuter::{bounded_refute, least_model_facts, replay_derivation, RefuteOutcome};

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn config(name: &str) -> RunConfig {
    RunConfig {
        timeout: Duration::from_secs(120),
        ..RunConfig::new(fixture(name))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn run_sat(config: &RunConfig) -> Result<(SolveOutput, SatResult), String> {
    let out = solve(config).map_err(|e| e.to_string())?;
    match &out.verdict {
        Verdict::Sat(sat) => {
            let sat = (**sat).clone();
            Ok((out, sat))
        }
        v => Err(format!("expected sat, got {}", v.keyword())),
    }
}

// Independent term construction for the oracles.

fn nat(k: usize) -> Term {
    (0..k).fold(Term::App("Z".into(), vec![]), |t, _| Term::App("S".into(), vec![t]))
}

fn nats_upto(h: usize) -> Vec<Term> {
    (0..h).map(nat).collect()
}

fn trees_upto(h: usize) -> Vec<Term> {
    let mut levels: Vec<Term> = Vec::new();
    for _ in 0..h {
        let mut next = vec![Term::App("leaf".into(), vec![])];
        for l in &levels {
            for r in &levels {
                next.push(Term::App("node".into(), vec![l.clone(), r.clone()]));
            }
        }
        levels = next;
    }
    levels
}

/// All permutations of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn same_up_to_renaming(n: usize, got: &BTreeSet<Vec<usize>>, want: &BTreeSet<Vec<usize>>) -> bool {
    permutations(n).into_iter().any(|p| {
        let renamed: BTreeSet<Vec<usize>> = got.iter().map(|t| t.iter().map(|&x| p[x]).collect()).collect();
        &renamed == want
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (_, sat) = run_sat(&config("even.smt2"))?;
    ensure(sat.model.total_size() == 2, || format!("model size {}", sat.model.total_size()))?;
    let accepted: Vec<Term> = sat.automata["even"]
        .enumerate_accepted(20)
        .into_iter()
        .map(|t| t[0].clone())
        .collect();
    let got: BTreeSet<Term> = accepted.into_iter().collect();
    let want: BTreeSet<Term> = (0..=9).map(|n| nat(2 * n)).collect();
    ensure(got == want, || format!("accepted {} terms, expected {}", got.len(), want.len()))?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("size 2, accepts S^2n(Z) for n <= 9, {t:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let out = solve(&config("example3.smt2")).map_err(|e| e.to_string())?;
    let Verdict::Unsat(d) = &out.verdict else {
        return Err(format!("expected unsat, got {}", out.verdict.keyword()));
    };
    replay_derivation(&out.prepared.preprocessed, d).map_err(|e| e.to_string())?;
    ensure(d.len() <= 3, || format!("{} steps", d.len()))?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("{}-step derivation replays, {t:.2?}", d.len()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (_, sat) = run_sat(&config("diseq_zz.smt2"))?;
    ensure(sat.model.total_size() == 2, || format!("model size {}", sat.model.total_size()))?;
    let table = &sat.model.predicates["diseq_Nat"].tuples;
    let want: BTreeSet<Vec<usize>> = [vec![0, 1], vec![1, 0], vec![1, 1]].into();
    ensure(same_up_to_renaming(2, table, &want), || format!("diseq table {table:?}"))?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("diseq = {{(0,1),(1,0),(1,1)}} up to renaming, {t:.2?}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (out, sat) = run_sat(&config("incdec.smt2"))?;
    ensure(sat.model.total_size() == 3, || format!("model size {}", sat.model.total_size()))?;
    let finals = &sat.automata["inc"].finals;
    let want: BTreeSet<Vec<usize>> = [vec![0, 1], vec![1, 2], vec![2, 0]].into();
    ensure(same_up_to_renaming(3, finals, &want), || format!("inc finals {finals:?}"))?;
    let report = check_herbrand_model(&out.prepared.original, &sat.automata, 5).map_err(|e| e.to_string())?;
    ensure(report.passed() && report.effective_height() == 5, || report.to_string())?;
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("size 3, inc is a 3-cycle, herbrand check at height 5 passes, {t:.2?}"))
}

/// Number of nodes on the leftmost branch.
fn left_spine(t: &Term) -> usize {
    match t {
        Term::App(c, args) if c == "node" => 1 + left_spine(&args[0]),
        _ => 0,
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (_, sat) = run_sat(&config("evenleft.smt2"))?;
    ensure(sat.model.total_size() == 2, || format!("model size {}", sat.model.total_size()))?;
    let got: BTreeSet<Term> = sat.automata["EvenLeft"]
        .enumerate_accepted(3)
        .into_iter()
        .map(|t| t[0].clone())
        .collect();
    let want: BTreeSet<Term> = trees_upto(3).into_iter().filter(|t| left_spine(t).is_multiple_of(2)).collect();
    ensure(got == want, || format!("accepted {got:?}, expected {want:?}"))?;
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("size 2, {} accepted trees at height 3 match, {t:.2?}", want.len()))
}

fn criterion_6() -> Outcome {
    let mut details = Vec::new();
    for name in ["diag", "ltgt"] {
        let start = Instant::now();
        let cfg = RunConfig {
            max_card: 4,
            refute_height: 5,
            timeout: Duration::from_secs(300),
            ..RunConfig::new(fixture(&format!("{name}.smt2")))
        };
        let out = solve(&cfg).map_err(|e| e.to_string())?;
        let Verdict::Unknown(info) = &out.verdict else {
            return Err(format!("{name}: expected unknown, got {}", out.verdict.keyword()));
        };
        ensure(info.models_exhausted_to >= 4 && info.refuter_exhausted_to >= 5, || {
            format!("{name}: exhausted models to {}, refuter to {}", info.models_exhausted_to, info.refuter_exhausted_to)
        })?;
        let t = within(start, Duration::from_secs(60))?;
        details.push(format!("{name} {t:.2?}"));
    }
    Ok(format!("unknown, no model up to size 4, no refutation up to height 5 ({})", details.join(", ")))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let cfg = RunConfig {
        check_height: 3,
        ..config("stlc.smt2")
    };
    let (out, sat) = run_sat(&cfg)?;
    let bound = [("Var", 1), ("Type", 2), ("Expr", 1), ("Env", 2)];
    for (sort, k) in bound {
        ensure(sat.model.size_of(sort) <= k, || format!("{sort} has {} elements", sat.model.size_of(sort)))?;
    }
    let table = &sat.automata["typeCheck"].table;
    let arrow = |a: usize, b: usize| table.step("arrow", &[a, b]);
    let implication = (0..2).any(|x| {
        let y = 1 - x;
        arrow(y, x) == Some(x) && arrow(x, x) == Some(y) && arrow(x, y) == Some(y) && arrow(y, y) == Some(y)
    });
    ensure(implication, || "arrow is not implication under any renaming".into())?;
    let report = check_herbrand_model(&out.prepared.original, &sat.automata, 3).map_err(|e| e.to_string())?;
    ensure(report.passed() && report.effective_height() == 3, || report.to_string())?;
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("{}, arrow behaves as implication, herbrand check at height 3 passes, {t:.2?}", sat.cardinality))
}

fn criterion_8() -> Outcome {
    let mut checked = Vec::new();
    for name in ["even", "diseq_zz", "incdec", "evenleft", "stlc"] {
        let (out, sat) = run_sat(&config(&format!("{name}.smt2")))?;
        let sig = &out.prepared.preprocessed.signature;
        let automata = build_automata(&sat.model, sig, true).map_err(|e| e.to_string())?;
        let report = theorem1_check(&sat.model, &automata, sig, 5);
        ensure(report.is_ok(), || format!("{name}: {:?}", report.outcome))?;
        let heights: Vec<String> = report.effective_height.iter().map(|(p, h)| format!("{p}@{h}")).collect();
        checked.push(format!("{name}[{}]", heights.join(",")));
    }
    Ok(format!("automata agree with models: {}", checked.join(" ")))
}

fn criterion_9() -> Outcome {
    let cases: [(&str, horncat_core::ir::Signature, fn(usize) -> Vec<Term>); 2] = [
        ("Nat", fixtures::nat_signature(), nats_upto),
        ("Tree", fixtures::tree_signature(), trees_upto),
    ];
    let mut sizes = Vec::new();
    for (sort, sig, terms) in cases {
        let (system, names) = diseq_rule_system(&sig, &[sort.to_string()]).map_err(|e| e.to_string())?;
        for h in 2..=4 {
            let facts = least_model_facts(&system, h);
            ensure(facts.is_saturated(), || format!("{sort} height {h} did not saturate"))?;
            let got: BTreeSet<(Term, Term)> = facts
                .tuples(&names[sort])
                .into_iter()
                .map(|t| (t[0].clone(), t[1].clone()))
                .collect();
            let universe = terms(h);
            let want: BTreeSet<(Term, Term)> = universe
                .iter()
                .flat_map(|a| universe.iter().filter(move |b| a != *b).map(move |b| (a.clone(), b.clone())))
                .collect();
            ensure(got == want, || format!("{sort} height {h}: {} facts, {} unequal pairs", got.len(), want.len()))?;
            sizes.push(format!("{sort}@{h}:{}", want.len()));
        }
    }
    Ok(format!("diseq facts equal syntactic inequality ({})", sizes.join(" ")))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let (mut sat, mut unsat, mut neither) = (0, 0, 0);
    for seed in 0..200u64 {
        let system = random_system(seed, FuzzLimits::default());
        let budget = SearchBudget {
            max_total: 6,
            time_limit: Some(Duration::from_secs(5)),
            seed: Some(seed),
            ..SearchBudget::default()
        };
        let mut model = None;
        for card in cardinality_schedule(&system.signature, &budget) {
            match find_model(&system, &card, &budget).map_err(|e| format!("seed {seed}: {e}"))? {
                FindOutcome::Model(m) => {
                    let v = verify_model(&system, &m).map_err(|e| format!("seed {seed}: {e}"))?;
                    ensure(v.is_ok(), || format!("seed {seed}: model fails verification: {v:?}"))?;
                    model = Some(m);
                    break;
                }
                FindOutcome::NoModelAtThisSize | FindOutcome::TimedOut => {}
            }
        }
        let refuted = match bounded_refute(&system, 4) {
            RefuteOutcome::Refuted(d) => {
                replay_derivation(&system, &d).map_err(|e| format!("seed {seed}: {e}"))?;
                true
            }
            _ => false,
        };
        ensure(!(model.is_some() && refuted), || format!("seed {seed}: both a model and a refutation\n{system}"))?;
        match (model.is_some(), refuted) {
            (true, _) => sat += 1,
            (_, true) => unsat += 1,
            _ => neither += 1,
        }
    }
    let t = within(start, Duration::from_secs(600))?;
    Ok(format!("200 systems: {sat} sat, {unsat} unsat, {neither} neither, no conflicts, {t:.2?}"))
}

fn main() -> ExitCode {
    // Make sure preprocessing of every fixture works before timing anything.
    for (name, text) in fixtures::ALL {
        if let Err(e) = load_and_preprocess(text) {
            println!("fixture {name} does not load: {e}");
            return ExitCode::FAILURE;
        }
    }
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("even is sat with the even-numeral automaton", criterion_1),
        ("example3 is unsat with a short derivation", criterion_2),
        ("diseq(Z,Z) query is sat with a reflexive diseq table", criterion_3),
        ("incdec is sat with counting modulo 3", criterion_4),
        ("evenleft is sat and its automaton matches the oracle", criterion_5),
        ("diag and ltgt stay unknown", criterion_6),
        ("stlc is sat with arrow as implication", criterion_7),
        ("automata agree with models at height 5", criterion_8),
        ("diseq rules compute syntactic inequality", criterion_9),
        ("random systems never get both verdicts", criterion_10),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
