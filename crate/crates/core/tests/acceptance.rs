//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every count is compared against a brute-force oracle written here that
//! does not share code with the library's search routines.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use jalg_core::agenda::Agenda;
use jalg_core::aggregation::{
    check_pareto, check_rational_universal, is_rational_attitude, lemma1_witness, lemma2_witness,
    verify_bijection, Aggregator, AttitudeFunction, DecisionCriterion, Profile, Setting,
};
use jalg_core::algebra::{
    boolean2, decode_tuple, distributive_lattice, encode_tuple, mv_chain, FiniteAlgebra, Poset, Valuation,
    DEFAULT_HOM_BUDGET,
};
use jalg_core::impossibility::{classify_dictator, decisive_coalitions, dictator_report, is_ultrafilter};
use jalg_core::modal::{bao_from_frame, dietrich_summary, KripkeFrame};
use jalg_core::semantics::{check_selfextensionality, entails, Matrix};
use jalg_core::syntax::{parse_formula, Formula};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

/// Every map `B^n → B` as a table over little-endian tuple codes.
fn all_tables(k: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let rows = k.pow(n as u32);
    let total = k.pow(rows as u32);
    (0..total).map(move |mut c| {
        let mut t = vec![0; rows];
        for slot in t.iter_mut().rev() {
            *slot = c % k;
            c /= k;
        }
        t
    })
}

/// `h(g(ā_1..ā_m)) = g(h(ā_1), ..)` with `g` computed coordinatewise on
/// decoded tuples rather than through a power algebra.
fn hom_oracle(table: &[usize], b: &FiniteAlgebra, n: usize) -> bool {
    let k = b.size();
    let rows = table.len();
    for (op, c) in b.signature().connectives().iter().enumerate() {
        let m = c.arity;
        for args_code in 0..rows.pow(m as u32) {
            let args: Vec<usize> = (0..m).map(|j| (args_code / rows.pow(j as u32)) % rows).collect();
            let tuples: Vec<Vec<usize>> = args.iter().map(|&a| decode_tuple(a, k, n)).collect();
            let result: Vec<usize> = (0..n)
                .map(|i| {
                    let coords: Vec<usize> = tuples.iter().map(|t| t[i]).collect();
                    b.apply(op, &coords)
                })
                .collect();
            let mapped: Vec<usize> = args.iter().map(|&a| table[a]).collect();
            if table[encode_tuple(&result, k)] != b.apply(op, &mapped) {
                return false;
            }
        }
    }
    true
}

/// Rationality by direct search, evaluating formulas here.
fn rational_oracle(ag: &Agenda, values: &[usize]) -> bool {
    let vars = ag.variables();
    let k = ag.algebra().size();
    (0..k.pow(vars.len() as u32)).any(|code| {
        let digits = decode_tuple(code, k, vars.len());
        let v: Valuation = vars.iter().cloned().zip(digits).collect();
        ag.formulas()
            .iter()
            .zip(values)
            .all(|(f, &a)| ag.algebra().evaluate(f, &v).unwrap() == a)
    })
}

fn boolean_agenda() -> Agenda {
    Agenda::parse(Matrix::classical(), &["x1", "x2", "(or x1 x2)", "(not x1)"]).unwrap()
}

fn mv_agenda() -> Agenda {
    Agenda::parse(Matrix::lukasiewicz_degree(3).unwrap(), &["x1", "x2", "(oplus x1 x2)"]).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let b = boolean2();
    let mut notes = Vec::new();
    for n in 1..=3 {
        let oracle: Vec<Vec<usize>> = all_tables(2, n).filter(|t| hom_oracle(t, &b, n)).collect();
        let mut projections: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..1 << n).map(|c| decode_tuple(c, 2, n)[i]).collect())
            .collect();
        projections.sort();
        ensure(oracle == projections, format!("N={n}: oracle homomorphisms are not the projections"))?;

        let s = Setting::new(boolean_agenda(), n).map_err(|e| e.to_string())?;
        let r = verify_bijection(&s, 2, DEFAULT_HOM_BUDGET).map_err(|e| e.to_string())?;
        ensure(r.homs == n, format!("N={n}: {} homomorphisms", r.homs))?;
        let found: Vec<Vec<usize>> = r.items.iter().filter(|i| i.homomorphism).map(|i| i.table.clone()).collect();
        ensure(found == oracle, format!("N={n}: enumerated homomorphisms differ from the oracle"))?;
        ensure(r.aggregators == n, format!("N={n}: {} qualifying aggregators", r.aggregators))?;
        ensure(r.passes(), format!("N={n}: round trips {}, pareto {}", r.roundtrips, r.pareto))?;
        notes.push(format!("N={n}: {}", n));
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("homs/aggregators {} in {:?}", notes.join(", "), start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let l3 = mv_chain(3).unwrap();
    let oracle: Vec<Vec<usize>> = all_tables(3, 2).filter(|t| hom_oracle(t, &l3, 2)).collect();
    let s = Setting::new(mv_agenda(), 2).map_err(|e| e.to_string())?;
    let r = verify_bijection(&s, 2, DEFAULT_HOM_BUDGET).map_err(|e| e.to_string())?;
    ensure(r.candidates == 19_683, format!("{} candidate criteria", r.candidates))?;
    ensure(r.homs == oracle.len(), format!("{} homomorphisms, oracle {}", r.homs, oracle.len()))?;
    ensure(r.aggregators == oracle.len(), format!("{} aggregators, oracle {}", r.aggregators, oracle.len()))?;
    ensure(r.passes(), format!("round trips {}, pareto {}", r.roundtrips, r.pareto))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} homomorphisms = {} aggregators in {:?}", r.homs, r.aggregators, start.elapsed()))
}

fn ultrafilter_oracle(family: &BTreeSet<u32>, n: usize) -> bool {
    let full = (1u32 << n) - 1;
    !family.contains(&0)
        && family.iter().all(|&a| family.iter().all(|&b| family.contains(&(a & b))))
        && family.iter().all(|&a| (0..=full).filter(|s| s & a == a).all(|s| family.contains(&s)))
        && (0..=full).all(|c| family.contains(&c) != family.contains(&(full & !c)))
}

fn criterion_3() -> Outcome {
    let b = boolean2();
    let mut checked = 0;
    for n in 1..=3 {
        for table in all_tables(2, n) {
            checked += 1;
            let f = DecisionCriterion::new(2, n, table.clone()).unwrap();
            let hom = hom_oracle(&table, &b, n);
            let family: BTreeSet<u32> = (0..1u32 << n).filter(|&c| table[c as usize] == 1).collect();
            let uf = ultrafilter_oracle(&family, n);
            let dict = classify_dictator(&f, &b).map_err(|e| e.to_string())?;
            let view = decisive_coalitions(&f, &b).map_err(|e| e.to_string())?;
            let lib_uf = is_ultrafilter(&view).ultrafilter;
            ensure(
                hom == uf && uf == lib_uf && hom == dict.is_some(),
                format!("N={n} table {table:?}: hom {hom}, ultrafilter {uf}/{lib_uf}, dictator {dict:?}"),
            )?;
            if let Some(i) = dict {
                ensure(family.iter().all(|c| c & (1 << i) != 0), format!("dictator {i} not in every decisive coalition"))?;
            }
        }
    }
    let r = dictator_report(&DecisionCriterion::majority(3), &b).map_err(|e| e.to_string())?;
    ensure(!r.homomorphism && !r.ultrafilter && r.dictator.is_none(), "majority classified as dictatorial")?;
    let hv = r.hom_violation.ok_or("no homomorphism witness for majority")?;
    ensure(!r.violations.is_empty(), "no ultrafilter witness for majority")?;
    Ok(format!(
        "{checked} maps agree; majority fails `{}` at {:?} and {}",
        hv.connective, hv.args, r.violations[0]
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let s = dietrich_summary(2, 3).map_err(|e| e.to_string())?;
    ensure(s.subjunctive.items.len() == 8, "expected eight consistency checks")?;
    ensure(s.subjunctive.items.iter().all(|i| i.passes), "a subjunctive check failed")?;
    ensure(s.subjunctive.a && s.subjunctive.b, "subjunctive reading misses (a) or (b)")?;
    ensure(s.material.a && !s.material.b, "material reading should meet (a) and fail (b)")?;
    ensure(s.derivation.holds, "bottom derivation fails in some BAO")?;

    // witnesses are genuine: every formula holds at the reported world
    for item in &s.subjunctive.items {
        if let Some(w) = &item.witness {
            let alg = bao_from_frame(&w.frame).map_err(|e| e.to_string())?;
            for text in &item.formulas {
                let f = parse_formula(text, alg.signature()).unwrap();
                let value = alg.evaluate(&f, &w.valuation).unwrap();
                ensure(value & (1 << w.world) != 0, format!("witness for {text} is wrong"))?;
            }
        }
    }
    // pointwise ⊥ oracle over {p→q, p, ¬q}, recomputed from the frames' successor sets
    for worlds in 1..=3usize {
        let pairs: Vec<(usize, usize)> = (0..worlds)
            .flat_map(|a| (0..worlds).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let extra = pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p);
            let fr = KripkeFrame::reflexive(worlds, extra).unwrap();
            let full = (1usize << worlds) - 1;
            for p in 0..=full {
                for q in 0..=full {
                    let mat = (full & !p) | q;
                    let boxed = (0..worlds)
                        .filter(|&w| fr.successors(w) as usize & !mat == 0)
                        .fold(0, |acc, w| acc | 1 << w);
                    ensure(boxed & p & (full & !q) == 0, "□(¬p∨q) ∧ p ∧ ¬q is not ⊥")?;
                }
            }
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "a pass, b pass, material b fail, ⊥ over {} frames in {:?}",
        s.derivation.frames,
        start.elapsed()
    ))
}

fn criterion_5() -> Outcome {
    let vars3: Vec<String> = ["x1", "x2", "x3"].map(String::from).to_vec();
    let classical = check_selfextensionality(&Matrix::classical(), &vars3, 2).map_err(|e| e.to_string())?;
    ensure(classical.selfextensional, format!("classical counterexample {:?}", classical.witness))?;

    let l3 = Matrix::lukasiewicz(3).unwrap();
    let truth = check_selfextensionality(&l3, &vars3, 2).map_err(|e| e.to_string())?;
    ensure(!truth.selfextensional, "no counterexample for Ł₃ with designated {1}")?;
    let w = truth.witness.ok_or("missing witness")?;
    // oracle on the canonical witness: x ≡ x⊙x but ¬x ≢ ¬(x⊙x)
    let sig = l3.algebra().signature();
    let p = |t: &str| parse_formula(t, sig).unwrap();
    let (x, sq) = (p("x1"), p("(odot x1 x1)"));
    let both = |a: &Formula, b: &Formula| {
        entails(&l3, std::slice::from_ref(a), b).unwrap() && entails(&l3, std::slice::from_ref(b), a).unwrap()
    };
    ensure(both(&x, &sq), "x ≢ x⊙x")?;
    ensure(!both(&p("(not x1)"), &p("(not (odot x1 x1))")), "¬x ≡ ¬(x⊙x)")?;
    // the reported witness is a genuine failure
    let (l, r): (Vec<Formula>, Vec<Formula>) = (
        w.left.iter().map(|t| p(t)).collect(),
        w.right.iter().map(|t| p(t)).collect(),
    );
    ensure(l.iter().zip(&r).all(|(a, b)| both(a, b)), "witness arguments are not equivalent")?;
    ensure(
        !both(&Formula::app(w.connective.clone(), l.clone()), &Formula::app(w.connective.clone(), r.clone())),
        "witness images are equivalent",
    )?;

    let degree = check_selfextensionality(&Matrix::lukasiewicz_degree(3).unwrap(), &vars3, 2)
        .map_err(|e| e.to_string())?;
    ensure(degree.selfextensional, format!("Ł₃ degree counterexample {:?}", degree.witness))?;
    Ok(format!(
        "classical none ({} classes), Ł₃/{{1}} `{}` on {:?} vs {:?}, Ł₃ degree none ({} classes)",
        classical.equivalence_classes, w.connective, w.left, w.right, degree.equivalence_classes
    ))
}

fn criterion_6() -> Outcome {
    let mut aggregators = 0;
    let mut instances = 0;
    let settings = [
        Setting::new(boolean_agenda(), 1),
        Setting::new(boolean_agenda(), 2),
        Setting::new(boolean_agenda(), 3),
        Setting::new(mv_agenda(), 2),
    ];
    for s in settings {
        let s = s.map_err(|e| e.to_string())?;
        let r = verify_bijection(&s, 2, DEFAULT_HOM_BUDGET).map_err(|e| e.to_string())?;
        let b = s.algebra();
        let constants = b.constants();
        for item in r.items.iter().filter(|i| i.qualifying) {
            aggregators += 1;
            let f = Aggregator::Criterion(DecisionCriterion::new(b.size(), s.electorate(), item.table.clone()).unwrap());
            let report = check_pareto(&s, &f, 2).map_err(|e| e.to_string())?;
            ensure(report.holds, format!("Pareto fails: {:?}", report.violation))?;
            // oracle: unanimity on agenda formulas
            for p in s.rational_profiles() {
                let out = f.apply(&s, &p).unwrap();
                for i in 0..s.agenda().len() {
                    let col = p.column(i);
                    for (_, c) in &constants {
                        if col.iter().all(|v| v == c) {
                            instances += 1;
                            ensure(out.get(i) == *c, "unanimous agenda value not preserved")?;
                        }
                    }
                }
            }
            // oracle: every constant's unanimous tuple maps to the constant
            for (name, c) in &constants {
                let code = encode_tuple(&vec![*c; s.electorate()], b.size());
                ensure(item.table[code] == *c, format!("f(c) ≠ c for `{name}`"))?;
            }
        }
    }
    Ok(format!("{aggregators} aggregators, {instances} unanimous agenda instances"))
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let frame = KripkeFrame::reflexive(2, [(0, 1)]).unwrap();
    let builtins: Vec<(&str, Matrix, Vec<&str>)> = vec![
        ("boolean2", Matrix::classical(), vec!["x1", "(not (not x2))", "x3", "(or x1 x2)"]),
        (
            "Ł₃ degree",
            Matrix::lukasiewicz_degree(3).unwrap(),
            vec!["x1", "(not (not x2))", "x3", "(oplus x1 x2)"],
        ),
        (
            "BAO",
            Matrix::degree(bao_from_frame(&frame).unwrap()).unwrap(),
            vec!["x1", "x2", "x3", "(box x1)"],
        ),
        (
            "lattice",
            Matrix::degree(distributive_lattice(&Poset::antichain(2)).unwrap()).unwrap(),
            vec!["x1", "x2", "x3", "(and x1 x2)"],
        ),
    ];
    let mut checks = 0;
    for (name, m, texts) in builtins {
        let ag = Agenda::parse(m, &texts).map_err(|e| e.to_string())?;
        let k = ag.algebra().size();
        for _ in 0..50 {
            let m = rng.random_range(1..=3);
            let targets: Vec<usize> = (0..m).map(|_| rng.random_range(0..k)).collect();
            let w = lemma1_witness(&ag, &targets).map_err(|e| format!("{name}: {e}"))?;
            for (&d, &a) in w.deltas.iter().zip(&targets) {
                ensure(w.attitude.get(d) == a, format!("{name}: A(δ) ≠ a"))?;
            }
            ensure(rational_oracle(&ag, w.attitude.values()), format!("{name}: lemma 1 attitude irrational"))?;
            ensure(is_rational_attitude(&ag, &w.attitude).unwrap().is_some(), format!("{name}: library disagrees"))?;

            let n = rng.random_range(1..=3);
            let tuples: Vec<Vec<usize>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(0..k)).collect()).collect();
            let w2 = lemma2_witness(&ag, n, &tuples).map_err(|e| format!("{name}: {e}"))?;
            for (&d, t) in w2.deltas.iter().zip(&tuples) {
                ensure(w2.profile.column(d) == *t, format!("{name}: ⃗A(δ) ≠ ā"))?;
            }
            for a in &w2.profile.0 {
                ensure(rational_oracle(&ag, a.values()), format!("{name}: lemma 2 voter irrational"))?;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} randomized target choices over 4 algebras"))
}

fn criterion_8() -> Outcome {
    let ag = Agenda::parse(Matrix::classical(), &["x1", "x2", "(or x1 x2)"]).unwrap();
    let s = Setting::new(ag.clone(), 3).map_err(|e| e.to_string())?;
    let maj = DecisionCriterion::majority(3);
    // oracle: every triple of valuations of (x1, x2)
    let mut witness = None;
    for code in 0..64usize {
        let voters: Vec<Vec<usize>> = (0..3)
            .map(|i| {
                let (x1, x2) = ((code >> (2 * i)) & 1, (code >> (2 * i + 1)) & 1);
                ag.formulas()
                    .iter()
                    .map(|f| ag.algebra().evaluate(f, &Valuation::new().with("x1", x1).with("x2", x2)).unwrap())
                    .collect()
            })
            .collect();
        let out: Vec<usize> = (0..ag.len())
            .map(|j| usize::from(voters.iter().filter(|v| v[j] == 1).count() >= 2))
            .collect();
        if !rational_oracle(&ag, &out) {
            witness = Some((voters, out));
            break;
        }
    }
    let (voters, out) = witness.ok_or("oracle found no discursive dilemma")?;
    let f = Aggregator::Criterion(maj);
    let r = check_rational_universal(&s, &f);
    ensure(r.universal && !r.rational, "majority aggregator reported rational")?;
    let (p, lib_out) = r.irrational.ok_or("no library witness")?;
    ensure(p.0.iter().all(|a| rational_oracle(&ag, a.values())), "witness profile is not rational")?;
    ensure(!rational_oracle(&ag, lib_out.values()), "witness output is rational")?;
    let oracle_profile = Profile(voters.into_iter().map(AttitudeFunction).collect());
    ensure(f.apply(&s, &oracle_profile) == Some(AttitudeFunction(out.clone())), "majority output mismatch")?;
    let show = |p: &Profile| {
        p.0.iter()
            .map(|a| format!("{:?}", a.values()))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok(format!(
        "profile {} ↦ {:?} over {:?}",
        show(&p),
        lib_out.values(),
        ag.formulas().iter().map(ToString::to_string).collect::<Vec<_>>()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("bijection over 2, N = 1..3", criterion_1),
        ("bijection over Ł₃, N = 2", criterion_2),
        ("homomorphism ⟺ ultrafilter ⟺ dictator", criterion_3),
        ("subjunctive implication meets (a) and (b)", criterion_4),
        ("selfextensionality classification", criterion_5),
        ("Pareto for qualifying aggregators", criterion_6),
        ("lemma witnesses", criterion_7),
        ("majority irrationality", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{:?}]", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", i + 1);
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
