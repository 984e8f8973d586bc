//! Acceptance gate: one test per criterion, each printing a single
//! `ACCEPTANCE <n>: PASS|FAIL` line (run with `--nocapture` to see them
//! live). Every tolerance — time budgets, sample counts, seeds — is
//! pinned as a constant below. Nothing is approximated: a criterion that
//! cannot be computed reports FAIL with the reason.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::AssertUnwindSafe;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ag_core::*;

/// Criterion 1 must finish its twelve exact counts inside this wall time.
const SMALL_PRIME_TIME: Duration = Duration::from_secs(1);
/// Criterion 2: direct a(2^d), d = 1..6.
const TWO_POWER_TIME: Duration = Duration::from_secs(600);
/// Criterion 2: direct a(3^d), d = 1..4.
const THREE_POWER_TIME: Duration = Duration::from_secs(300);
/// Criterion 4: the order-6 brute-force search.
const ORDER_SIX_TIME: Duration = Duration::from_secs(300);
/// Criterion 7 randomization, all reproducible.
const RANDOM_SAMPLES: usize = 50;
const RANDOM_SEED: u64 = 0x4147;
const MUTATION_EXHAUSTIVE_MAX_ORDER: usize = 8;
const MUTATION_SAMPLES: usize = 200;
const MUTATION_SEED: u64 = 0x4148;

#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn check_eq<T: PartialEq + std::fmt::Debug>(&mut self, got: T, want: T, what: &str) {
        if got != want {
            self.failures.push(format!("{what}: got {got:?}, want {want:?}"));
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

/// Runs one criterion body, prints its verdict line, then asserts. Panics
/// inside the body become an honest FAIL line instead of a missing one.
fn run(number: u32, body: impl FnOnce(&mut Criterion)) {
    let mut c = Criterion::default();
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(|| body(&mut c)));
    if let Err(payload) = outcome {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic with non-string payload".to_string());
        c.failures.push(format!("panicked: {msg}"));
    }
    let verdict = if c.failures.is_empty() { "PASS" } else { "FAIL" };
    let detail = if c.failures.is_empty() {
        c.notes.join("; ")
    } else {
        c.failures.join("; ")
    };
    println!("ACCEPTANCE {number}: {verdict} — {detail}");
    assert!(
        c.failures.is_empty(),
        "criterion {number} failed: {}",
        c.failures.join("; ")
    );
}

fn is_prime(n: u64) -> bool {
    n > 1 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn criterion_1_small_prime_closed_forms() {
    run(1, |c| {
        let budget = Budget { max_order: 169, stretch: false, max_nodes: None };
        let clock = Instant::now();
        for p in [3u64, 5, 7, 11, 13] {
            c.check_eq(count_prime_power(p, 1, &budget).unwrap(), 2, &format!("a({p})"));
            c.check_eq(count_prime_power(p, 2, &budget).unwrap(), 5, &format!("a({p}^2)"));
        }
        c.check_eq(count_prime_power(2, 1, &budget).unwrap(), 1, "a(2)");
        c.check_eq(count_prime_power(2, 2, &budget).unwrap(), 4, "a(4)");
        let took = clock.elapsed();
        c.check(
            took <= SMALL_PRIME_TIME,
            &format!("took {took:?}, budget {SMALL_PRIME_TIME:?}"),
        );
        c.note(format!(
            "a(p)=2 and a(p^2)=5 for p in {{3,5,7,11,13}}, a(2)=1, a(4)=4, direct, in {took:?}"
        ));
    });
}

#[test]
fn criterion_2_reference_counts_at_desk_scale() {
    run(2, |c| {
        let budget = Budget { max_order: 343, stretch: false, max_nodes: None };

        let clock = Instant::now();
        for (d, want) in [(1, 1u64), (2, 4), (3, 10), (4, 29), (5, 69), (6, 187)] {
            c.check_eq(count_prime_power(2, d, &budget).unwrap(), want, &format!("a(2^{d})"));
        }
        let two_time = clock.elapsed();
        c.check(
            two_time <= TWO_POWER_TIME,
            &format!("powers of two took {two_time:?}, budget {TWO_POWER_TIME:?}"),
        );

        let clock = Instant::now();
        for (d, want) in [(1, 2u64), (2, 5), (3, 10), (4, 20)] {
            c.check_eq(count_prime_power(3, d, &budget).unwrap(), want, &format!("a(3^{d})"));
        }
        let three_time = clock.elapsed();
        c.check(
            three_time <= THREE_POWER_TIME,
            &format!("powers of three took {three_time:?}, budget {THREE_POWER_TIME:?}"),
        );

        for (d, want) in [(1, 2u64), (2, 5), (3, 10)] {
            c.check_eq(count_prime_power(5, d, &budget).unwrap(), want, &format!("a(5^{d})"));
            c.check_eq(count_prime_power(7, d, &budget).unwrap(), want, &format!("a(7^{d})"));
        }

        // The partition formula may only be trusted after it reproduces
        // direct enumeration on every odd prime power up to 81.
        let mut gate = 0;
        for p in (3..=81u64).filter(|&p| p % 2 == 1 && is_prime(p)) {
            let mut q = p;
            let mut d = 1u32;
            while q <= 81 {
                c.check_eq(
                    odd_p_fastpath(p, d),
                    count_prime_power(p, d, &budget).unwrap(),
                    &format!("fastpath vs direct at {p}^{d}"),
                );
                gate += 1;
                q *= p;
                d += 1;
            }
        }
        c.check_eq(odd_p_fastpath(3, 5), 36, "a(3^5) via fastpath");
        c.check_eq(odd_p_fastpath(3, 6), 65, "a(3^6) via fastpath");
        c.check_eq(odd_p_fastpath(5, 4), 20, "a(5^4) via fastpath");

        c.note(format!(
            "a(2^d) d≤6 direct in {two_time:?}; a(3^d) d≤4 direct in {three_time:?}; \
             a(5^d), a(7^d) d≤3 direct; fastpath matched direct on {gate} odd prime powers ≤ 81, \
             then a(3^5)=36, a(3^6)=65, a(5^4)=20"
        ));
    });
}

#[test]
fn criterion_3_stretch_powers_of_two() {
    if std::env::var_os("AG_STRETCH").is_none() {
        println!(
            "ACCEPTANCE 3: SKIP — stretch values a(2^7)=449, a(2^8)=1141 run only with \
             AG_STRETCH=1; when they cannot be computed they are reported, never approximated"
        );
        return;
    }
    run(3, |c| {
        let budget = Budget { max_order: 256, stretch: true, max_nodes: None };
        let clock = Instant::now();
        for (n, want, types) in [(128u64, 449u64, 15usize), (256, 1141, 22)] {
            match count(n, &budget, false) {
                Ok(result) => {
                    c.check_eq(result.count, want, &format!("a({n})"));
                    c.check_eq(result.per_group.len(), types, &format!("group types of order {n}"));
                }
                Err(e) => c.check(false, &format!("a({n}) did not complete: {e}")),
            }
        }
        let took = clock.elapsed();
        // honest method report: the one elementary type uses the closed
        // form validated against streaming classification at k ≤ 6; all
        // other types are classified directly
        let elementary: AbelianGroupType = "Z2^7".parse().unwrap();
        let method = classify_involutions(&elementary, &budget).unwrap().method();
        c.note(format!(
            "a(2^7)=449 over 15 types, a(2^8)=1141 over 22 types in {took:?}; elementary type \
             classified by {method:?} (validated against streaming for k ≤ 6), all other types \
             by direct search with per-member conjugacy verification"
        ));
    });
}

#[test]
fn criterion_4_bruteforce_agrees_with_enumeration() {
    run(4, |c| {
        let expected = [1u64, 1, 2, 4, 2, 2];
        let opts = SearchOptions::default();
        let budget = Budget::default();
        let mut six_time = Duration::ZERO;
        for n in 1..=6usize {
            let clock = Instant::now();
            let (reps, stats) = find_all(n, &opts).unwrap();
            let took = clock.elapsed();
            if n == 6 {
                six_time = took;
                c.check(
                    took <= ORDER_SIX_TIME,
                    &format!("order 6 took {took:?}, budget {ORDER_SIX_TIME:?}"),
                );
            }
            c.check_eq(stats.classes, expected[n - 1], &format!("find_all({n}) classes"));
            c.check_eq(reps.len() as u64, stats.classes, &format!("find_all({n}) repr count"));
            let counted = count(n as u64, &budget, false).unwrap().count;
            c.check_eq(stats.classes, counted, &format!("find_all({n}) vs count({n})"));
        }
        c.note(format!(
            "raw-table search found 1, 1, 2, 4, 2, 2 classes for n = 1..6, matching count(n); \
             order 6 in {six_time:?}"
        ));
    });
}

#[test]
fn criterion_5_representation_theorem_is_complete_at_desk_scale() {
    run(5, |c| {
        let opts = SearchOptions::default();
        for n in 1..=6usize {
            c.check(
                verify_representation(n, &opts).unwrap(),
                &format!("verify_representation({n})"),
            );
        }
        c.note(
            "for n = 1..6 every brute-forced AG-group is isomorphic to exactly one \
             constructed AG(G,φ) representative, and conversely"
                .to_string(),
        );
    });
}

#[test]
fn criterion_6_term_equivalence_round_trips() {
    run(6, |c| {
        let budget = Budget::default();
        let mut tables = 0;
        for n in 1..=8u64 {
            for rep in count(n, &budget, true).unwrap().representatives.unwrap() {
                let t = construct(&rep).unwrap();
                let m = to_module(&t).unwrap();
                let back = from_module(&m).unwrap();
                c.check(back == t, &format!("from_module∘to_module ≠ id at order {n}"));
                c.check(
                    to_module(&back).unwrap() == m,
                    &format!("to_module∘from_module ≠ id at order {n}"),
                );

                let (right, left) = divisions(&t).unwrap();
                let units = t.left_units();
                c.check_eq(units.len(), 1, &format!("left units at order {n}"));
                let e = units[0];
                let inv = t.inverses(e).unwrap();
                let size = t.order();
                let right_ok = (0..size).all(|b| {
                    (0..size).all(|a| right.get(b, a) == t.get(b, inv[a]))
                });
                let left_ok = (0..size).all(|a| {
                    (0..size).all(|b| left.get(a, b) == t.get(t.get(b, e), inv[a]))
                });
                c.check(right_ok, &format!("b/a ≠ b·a⁻¹ at order {n}"));
                c.check(left_ok, &format!("a\\b ≠ (b·e)·a⁻¹ at order {n}"));
                tables += 1;
            }
        }
        c.note(format!(
            "{tables} representative tables of order ≤ 8: module extraction and rebuild are \
             mutually inverse, divisions match b·a⁻¹ and (b·e)·a⁻¹ cell-for-cell"
        ));
    });
}

#[test]
fn criterion_7_law_suite_with_mutations() {
    run(7, |c| {
        let budget = Budget::default();

        // every representative of order ≤ 32
        let mut pool: Vec<CayleyTable> = Vec::new();
        for n in 1..=32u64 {
            for rep in count(n, &budget, true).unwrap().representatives.unwrap() {
                pool.push(construct(&rep).unwrap());
            }
        }
        fn suite(c: &mut Criterion, t: &CayleyTable, label: &str) {
            for r in check_all(t).unwrap() {
                c.check(r.holds, &format!("{label}: {r}"));
            }
            let (right, _) = divisions(t).unwrap();
            let units = t.left_units();
            c.check_eq(units.len(), 1, &format!("{label}: left unit count"));
            let constant = (0..t.order()).all(|a| right.get(a, a) == units[0]);
            c.check(constant, &format!("{label}: a/a is not constantly the left unit"));
        }
        for (i, t) in pool.iter().enumerate() {
            suite(c, t, &format!("representative {i} of order {}", t.order()));
        }

        // seeded random conjugates of class representatives, order ≤ 64
        let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
        let mut cache: BTreeMap<AbelianGroupType, Vec<Endomorphism>> = BTreeMap::new();
        for k in 0..RANDOM_SAMPLES {
            let n = rng.gen_range(1..=64u64);
            let types = groups_of_order(n).unwrap();
            let ty = types[rng.gen_range(0..types.len())].clone();
            let reps = cache.entry(ty.clone()).or_insert_with(|| {
                classify_involutions(&ty, &budget)
                    .unwrap()
                    .classes()
                    .iter()
                    .map(|cl| cl.representative.clone())
                    .collect()
            });
            let phi = &reps[rng.gen_range(0..reps.len())];
            let f = Endomorphism::random_automorphism(&ty, &mut rng);
            let psi = phi.conjugate_by(&f).expect("conjugation by an automorphism");
            let t = construct(&AgRepresentation::new(psi).unwrap()).unwrap();
            suite(c, &t, &format!("random sample {k} on {ty:?}"));
        }

        // single-cell mutations: exhaustive at order ≤ 8, sampled above
        fn mutation_checks(c: &mut Criterion, original: &CayleyTable, mutant: &CayleyTable, label: &str) {
            let reports = check_all(mutant).unwrap();
            let holds =
                |law: Law| reports.iter().find(|r| r.law == law).expect("all laws").holds;
            if holds(Law::Paramedial) && holds(Law::LeftUnit) {
                c.check(holds(Law::Ag), &format!("{label}: paramedial ∧ left unit without AG"));
            }
            if holds(Law::Ag) && holds(Law::LeftUnit) {
                c.check(
                    holds(Law::AgStarStar),
                    &format!("{label}: AG ∧ left unit without AG**"),
                );
            }
            if reports.iter().all(|r| r.holds) {
                c.check(
                    isomorphic(mutant, original).is_none(),
                    &format!("{label}: undetected single-cell edit"),
                );
            }
        }
        let mut exhaustive = 0u64;
        for t in pool.iter().filter(|t| t.order() <= MUTATION_EXHAUSTIVE_MAX_ORDER) {
            let size = t.order();
            for a in 0..size {
                for b in 0..size {
                    for v in 0..size {
                        if v == t.get(a, b) {
                            continue;
                        }
                        let mut rows = t.rows();
                        rows[a][b] = v;
                        let mutant = CayleyTable::new(rows).unwrap();
                        mutation_checks(c, t, &mutant, &format!("mutant of order {size}"));
                        exhaustive += 1;
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(MUTATION_SEED);
        for k in 0..MUTATION_SAMPLES {
            let t = &pool[rng.gen_range(0..pool.len())];
            let size = t.order();
            if size < 2 {
                continue;
            }
            let (a, b) = (rng.gen_range(0..size), rng.gen_range(0..size));
            let shift = rng.gen_range(1..size);
            let mut rows = t.rows();
            rows[a][b] = (rows[a][b] + shift) % size;
            let mutant = CayleyTable::new(rows).unwrap();
            mutation_checks(c, t, &mutant, &format!("sampled mutant {k} of order {size}"));
        }

        c.note(format!(
            "all 7 laws + constant a/a on {} representatives of order ≤ 32 and {} seeded \
             random conjugates of order ≤ 64; {} exhaustive single-cell mutants (order ≤ {}) \
             and {} sampled ones (order ≤ 32) each break a law, with both law implications \
             holding throughout",
            pool.len(),
            RANDOM_SAMPLES,
            exhaustive,
            MUTATION_EXHAUSTIVE_MAX_ORDER,
            MUTATION_SAMPLES
        ));
    });
}

#[test]
fn criterion_8_isomorphism_iff_conjugacy_both_paths() {
    run(8, |c| {
        let budget = Budget::default();
        let mut pairs = 0u64;
        for n in 1..=16u64 {
            for ty in groups_of_order(n).unwrap() {
                let classification = classify_involutions(&ty, &budget).unwrap();
                let reps: Vec<Endomorphism> = classification
                    .classes()
                    .iter()
                    .map(|cl| cl.representative.clone())
                    .collect();
                let tables: Vec<CayleyTable> = reps
                    .iter()
                    .map(|phi| {
                        construct(&AgRepresentation::new(phi.clone()).unwrap()).unwrap()
                    })
                    .collect();
                for i in 0..reps.len() {
                    for j in i..reps.len() {
                        let what = format!("{ty:?} classes {i},{j}");
                        let expect = i == j;
                        let conjugate =
                            conjugating_automorphism(&reps[i], &reps[j], None).unwrap();
                        c.check_eq(conjugate.is_some(), expect, &format!("{what}: conjugator"));
                        let via_representation = isomorphic(&tables[i], &tables[j]);
                        c.check_eq(
                            via_representation.is_some(),
                            expect,
                            &format!("{what}: representation path"),
                        );
                        let via_generic = isomorphic_generic(&tables[i], &tables[j]);
                        c.check_eq(
                            via_generic.is_some(),
                            expect,
                            &format!("{what}: generic path"),
                        );
                        for map in [&via_representation, &via_generic].into_iter().flatten() {
                            c.check(
                                is_isomorphism(&tables[i], &tables[j], map),
                                &format!("{what}: returned map is not an isomorphism"),
                            );
                        }
                        pairs += 1;
                    }
                }
            }
        }
        c.note(format!(
            "{pairs} representative pairs across every group type of order ≤ 16: conjugacy, \
             the representation path and the generic path all agree (isomorphic ⟺ same class)"
        ));
    });
}

#[test]
fn criterion_9_congruences_are_subalgebras() {
    run(9, |c| {
        let budget = Budget::default();
        let canon = |p: &[Vec<usize>]| -> Vec<Vec<usize>> {
            let mut blocks: Vec<Vec<usize>> = p
                .iter()
                .map(|b| {
                    let mut b = b.clone();
                    b.sort_unstable();
                    b
                })
                .collect();
            blocks.sort();
            blocks
        };
        let mut algebras = 0u64;
        let mut total_subalgebras = 0usize;
        for n in 1..=16u64 {
            for rep in count(n, &budget, true).unwrap().representatives.unwrap() {
                let t = construct(&rep).unwrap();
                let subs = subalgebras(&t).unwrap();
                let congs = congruences(&t).unwrap();
                c.check_eq(
                    congs.len(),
                    subs.len(),
                    &format!("order {n}: #congruences vs #subalgebras"),
                );
                let via_subalgebras: BTreeSet<Vec<Vec<usize>>> = subs
                    .iter()
                    .map(|h| canon(&congruence_from_subalgebra(&t, h).unwrap()))
                    .collect();
                let enumerated: BTreeSet<Vec<Vec<usize>>> =
                    congs.iter().map(|p| canon(p)).collect();
                c.check(
                    via_subalgebras == enumerated,
                    &format!("order {n}: congruence sets differ"),
                );
                for h in &subs {
                    c.check(
                        n as usize % h.len() == 0,
                        &format!("order {n}: |H| = {} does not divide |G|", h.len()),
                    );
                    c.check(
                        is_protic_normal(&t, h).unwrap(),
                        &format!("order {n}: subalgebra {h:?} is not protic normal"),
                    );
                }
                algebras += 1;
                total_subalgebras += subs.len();
            }
        }
        c.note(format!(
            "{algebras} AG-groups of order ≤ 16: congruence lattice = subalgebra lattice \
             ({total_subalgebras} subalgebras), all protic normal, all orders divide |G|"
        ));
    });
}

#[test]
fn criterion_10_byte_identical_json_at_any_worker_count() {
    run(10, |c| {
        let probe = || -> String {
            let budget = Budget::default();
            let enumeration =
                serde_json::to_string(&count(12, &budget, true).unwrap()).unwrap();
            let ty: AbelianGroupType = "Z4xZ2".parse().unwrap();
            let classification =
                serde_json::to_string(&classify_involutions(&ty, &budget).unwrap()).unwrap();
            let (tables, stats) = find_all(5, &SearchOptions::default()).unwrap();
            let stats = serde_json::to_string(&stats).unwrap();
            let tables: Vec<String> = tables.iter().map(CayleyTable::to_text).collect();
            // a fixed random table big enough to engage the parallel scanners
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let size = 48;
            let rows: Vec<Vec<usize>> = (0..size)
                .map(|_| (0..size).map(|_| rng.gen_range(0..size)).collect())
                .collect();
            let t = CayleyTable::new(rows).unwrap();
            let reports = serde_json::to_string(&check_all(&t).unwrap()).unwrap();
            let regression = serde_json::to_string(&reference_regression(&Budget {
                max_order: 25,
                stretch: false,
                max_nodes: None,
            }))
            .unwrap();
            format!("{enumeration}\n{classification}\n{stats}\n{tables:?}\n{reports}\n{regression}")
        };
        let mut outputs: Vec<String> = Vec::new();
        for threads in [1usize, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            outputs.push(pool.install(probe));
            outputs.push(pool.install(probe));
        }
        c.check(
            outputs.windows(2).all(|w| w[0] == w[1]),
            "JSON outputs differ across repeated runs or worker counts",
        );
        c.note(format!(
            "{} bytes of enumeration, classification, search, law-report and regression \
             output byte-identical over 2 runs × worker counts {{1, 3}}",
            outputs[0].len()
        ));
    });
}
