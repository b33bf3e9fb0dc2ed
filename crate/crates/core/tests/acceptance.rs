//! Acceptance criteria. Runs as a plain binary so each criterion prints one
//! PASS/FAIL line with its elapsed time regardless of output capture.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pdp_core::cyclic::{develop, factorization_condition, Factorization};
use pdp_core::design::{Block, ParallelClass, Point, Schedule};
use pdp_core::hosts::assign_hosts;
use pdp_core::latin::gf_mols;
use pdp_core::planner::{generate, plan, GenerateOptions, PlanError, PlanOptions, Route};
use pdp_core::search::{search_pdp, SearchConfig, SearchMode, SearchOutcome};
use pdp_core::special::{buratti_family, buratti_pdp_5_30, DifferenceFamily};
use pdp_core::verify::{pair_multiset, verify};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn is_valid(s: &Schedule) -> bool {
    verify(s).map(|r| r.is_valid()).unwrap_or(false)
}

/// One-based printed classes with the host listed first in each block.
fn from_printed(k: usize, v: usize, classes: &[Vec<Vec<Point>>]) -> Schedule {
    let classes = classes
        .iter()
        .map(|c| {
            ParallelClass::new(
                c.iter()
                    .map(|b| Block::new(b.iter().map(|p| p - 1).collect(), Some(b[0] - 1)))
                    .collect(),
            )
        })
        .collect();
    Schedule::new(k, v, classes)
}

fn criterion_1() -> Outcome {
    let printed12 = from_printed(
        3,
        12,
        &[
            vec![vec![1, 5, 9], vec![2, 8, 11], vec![3, 6, 12], vec![4, 7, 10]],
            vec![vec![7, 1, 12], vec![6, 2, 10], vec![8, 3, 9], vec![5, 4, 11]],
            vec![vec![10, 1, 8], vec![12, 2, 5], vec![11, 3, 7], vec![9, 4, 6]],
        ],
    );
    let (decision, s) = generate(3, 12, &GenerateOptions::default()).map_err(|e| e.to_string())?;
    ensure(decision.route == Route::Mols, || {
        format!("route was {}", decision.route)
    })?;
    ensure(s.same_design(&printed12), || {
        "PDP(12) differs from the printed schedule".into()
    })?;

    // cell (residue, group) is point group * 5 + residue; host listed first
    let cell = |r: Point, g: Point| g * 5 + r + 1;
    let table = [
        [
            [(0, 0), (0, 1), (0, 2)],
            [(1, 1), (0, 0), (2, 2)],
            [(4, 2), (0, 0), (2, 1)],
        ],
        [
            [(1, 0), (1, 1), (1, 2)],
            [(2, 1), (1, 0), (3, 2)],
            [(0, 2), (1, 0), (3, 1)],
        ],
        [
            [(2, 0), (2, 1), (2, 2)],
            [(3, 1), (2, 0), (4, 2)],
            [(1, 2), (2, 0), (4, 1)],
        ],
        [
            [(3, 0), (3, 1), (3, 2)],
            [(4, 1), (3, 0), (0, 2)],
            [(2, 2), (3, 0), (0, 1)],
        ],
        [
            [(4, 0), (4, 1), (4, 2)],
            [(0, 1), (4, 0), (1, 2)],
            [(3, 2), (4, 0), (1, 1)],
        ],
    ];
    let classes: Vec<Vec<Vec<Point>>> = (0..3)
        .map(|c| {
            table
                .iter()
                .map(|row| row[c].iter().map(|&(r, g)| cell(r, g)).collect())
                .collect()
        })
        .collect();
    let printed15 = from_printed(3, 15, &classes);
    let (decision, s) = generate(3, 15, &GenerateOptions::default()).map_err(|e| e.to_string())?;
    ensure(decision.route == Route::Cyclic, || {
        format!("route was {}", decision.route)
    })?;
    ensure(s.same_design(&printed15), || {
        "PDP(15) differs from the printed table".into()
    })?;
    Ok("PDP(12) and PDP(15) match the printed schedules".into())
}

fn criterion_2() -> Outcome {
    let half = [1u32, 2, 4, 6, 7, 8, 11, 12, 13, 14];
    let expected: BTreeSet<u32> = half.iter().flat_map(|&d| [d, 30 - d]).collect();
    let family = buratti_family();
    let got = DifferenceFamily::internal_differences(&family.base_blocks[0], family.modulus);
    ensure(got == expected, || format!("differences {got:?}"))?;
    let s = buratti_pdp_5_30();
    let r = verify(&s).map_err(|e| e.to_string())?;
    ensure(r.is_valid(), || format!("{:?}", r.violations))?;
    Ok(format!("{} differences, schedule valid", got.len()))
}

fn criterion_3() -> Outcome {
    let options = GenerateOptions::default();
    let mut count = 0;
    let ranges = [(3, 3..=100), (4, 4..=75), (5, 5..=75)];
    for (k, ws) in ranges {
        for w in ws {
            if k == 5 && w == 12 {
                continue;
            }
            let (d, s) = generate(k, k * w, &options).map_err(|e| format!("({k}, {}): {e}", k * w))?;
            ensure(is_valid(&s), || {
                format!("({k}, {}) via {} fails verify", k * w, d.route)
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} parameter pairs generated and verified"))
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for v in [3, 6] {
        let start = Instant::now();
        let r = search_pdp(3, v, &SearchConfig::default()).map_err(|e| e.to_string())?;
        let t = start.elapsed();
        ensure(r.is_exhausted(), || format!("search_pdp(3, {v}) did not exhaust"))?;
        ensure(t < Duration::from_secs(5), || {
            format!("search_pdp(3, {v}) took {t:?}")
        })?;
        notes.push(format!("v={v} exhausted after {} nodes", r.stats.nodes));
    }
    Ok(notes.join(", "))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for k in 3..=8 {
        for w in k..=64 {
            let holds = factorization_condition(k, w) == Factorization::Holds;
            let passes = is_valid(&develop(k, w));
            ensure(holds == passes, || {
                format!("k={k}, w={w}: condition {holds}, verify {passes}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (k, w) pairs agree"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pool = Vec::new();
    for k in 3..=5usize {
        for w in k..=60 / k {
            if let Ok((_, s)) = generate(k, k * w, &GenerateOptions::default()) {
                pool.push(s);
            }
        }
    }
    for trial in 0..1000 {
        let base = pool.choose(&mut rng).unwrap();
        let mut perm: Vec<Point> = (0..base.v as Point).collect();
        perm.shuffle(&mut rng);
        let mut classes = base.relabel(&perm).without_hosts().classes;
        classes.shuffle(&mut rng);
        for c in &mut classes {
            c.blocks.shuffle(&mut rng);
        }
        let s = assign_hosts(&classes).map_err(|e| format!("trial {trial}: {e}"))?;
        let r = verify(&s).map_err(|e| e.to_string())?;
        ensure(r.axiom3_ok && r.is_valid(), || {
            format!("trial {trial}: {:?}", r.violations)
        })?;
        ensure(s.without_hosts().classes == classes, || {
            format!("trial {trial}: blocks changed")
        })?;
        let relabeled = base.relabel(&perm);
        ensure(pair_multiset(&s) == pair_multiset(&relabeled), || {
            format!("trial {trial}: pairs changed")
        })?;
    }
    Ok(format!(
        "1000 trials over {} base designs, 0 failures",
        pool.len()
    ))
}

fn criterion_7() -> Outcome {
    for q in [4usize, 5, 7, 8, 9, 11, 13, 16] {
        let family = gf_mols(q, q - 1).map_err(|e| format!("q={q}: {e}"))?;
        let squares = family.squares();
        ensure(squares.len() == q - 1, || {
            format!("q={q}: {} squares", squares.len())
        })?;
        for sq in squares {
            for i in 0..q {
                let row: BTreeSet<u32> = (0..q).map(|j| sq.get(i, j)).collect();
                let col: BTreeSet<u32> = (0..q).map(|j| sq.get(j, i)).collect();
                ensure(row.len() == q && col.len() == q, || format!("q={q}: not latin"))?;
            }
        }
        for (a, x) in squares.iter().enumerate() {
            for (b, y) in squares.iter().enumerate().skip(a + 1) {
                let cells: BTreeSet<(u32, u32)> = (0..q)
                    .flat_map(|i| (0..q).map(move |j| (i, j)))
                    .map(|(i, j)| (x.get(i, j), y.get(i, j)))
                    .collect();
                ensure(cells.len() == q * q, || {
                    format!("q={q}: squares {a} and {b} not orthogonal")
                })?;
            }
        }
    }
    Ok("all families pairwise orthogonal".into())
}

fn criterion_8() -> Outcome {
    let config = SearchConfig {
        mode: SearchMode::Exhaust,
        ..SearchConfig::default()
    };
    let mut notes = Vec::new();
    for v in [3usize, 6, 9, 12, 15] {
        let r = search_pdp(3, v, &config).map_err(|e| e.to_string())?;
        let found = match &r.outcome {
            SearchOutcome::Found(s) => {
                ensure(is_valid(s), || format!("v={v}: search output invalid"))?;
                true
            }
            SearchOutcome::Exhausted => false,
            SearchOutcome::BudgetExceeded => return Err(format!("v={v}: budget exceeded")),
        };
        let planned = match plan(3, v, &PlanOptions::default()) {
            Ok(_) => generate(3, v, &GenerateOptions::default()).is_ok(),
            Err(PlanError::Infeasible { .. }) => false,
            Err(e) => return Err(format!("v={v}: {e}")),
        };
        ensure(found == planned, || {
            format!("v={v}: search {found}, planner {planned}")
        })?;
        notes.push(format!("{v}:{}", if found { "found" } else { "none" }));
    }
    Ok(notes.join(" "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 printed examples", criterion_1, Duration::from_secs(1)),
        ("2 Buratti differences", criterion_2, Duration::from_secs(1)),
        ("3 completeness sweep", criterion_3, Duration::from_secs(60)),
        ("4 nonexistence", criterion_4, Duration::from_secs(10)),
        ("5 condition equivalence", criterion_5, Duration::from_secs(30)),
        ("6 matching suite", criterion_6, Duration::from_secs(30)),
        ("7 MOLS orthogonality", criterion_7, Duration::from_secs(5)),
        ("8 oracle equivalence", criterion_8, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|note| {
            if elapsed <= limit {
                Ok(note)
            } else {
                Err(format!("took {elapsed:?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(note) => println!("PASS criterion {name} ({elapsed:.2?}, limit {limit:?}): {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}, limit {limit:?}): {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
