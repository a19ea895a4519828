//! End-to-end acceptance checks, one per criterion. Each prints a single
//! PASS/FAIL line on stdout (bypassing test output capture), and the test
//! fails if any criterion does.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use knightcount::checkpoint::{create_file, run_checkpoint};
use knightcount::enumerate::{count_tours, count_unit, merge_results, split_work, Enumerator};
use knightcount::estimate::{run_estimate, EstimateRequest};
use knightcount::{BoardSpec, Checkpoint, Executor, Pruning, SamplePolicy, SearchOptions};
use knightcount_cli::reference::{Quantity, ReferenceTable};
use knightcount_cli::report::{CheckStatus, Results, RunReport};
use knightcount_oracle as oracle;
use num_bigint::BigUint;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn board(r: usize, c: usize) -> BoardSpec {
    BoardSpec::new(r, c).unwrap()
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> Result<RunReport, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_knightcount"))
        .args(args)
        .env_remove("KNIGHTCOUNT_JOBS")
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    // a failed verify still prints its report
    RunReport::from_json(&text).map_err(|e| {
        format!(
            "{args:?} exited {:?} without a report ({e}): {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

/// Every board with at most 30 squares and at least two.
fn boards_up_to_30() -> Vec<BoardSpec> {
    let mut out = Vec::new();
    for r in 1..=5 {
        for c in r..=30 {
            if r * c >= 2 && r * c <= 30 {
                out.push(board(r, c));
            }
        }
    }
    out
}

fn small_board_exactness() -> Outcome {
    for (r, c) in [(3, 3), (4, 4)] {
        let n = count_tours(&board(r, c), SearchOptions::open(), &Executor::default())
            .map_err(|e| e.to_string())?;
        let n = n.open.unwrap().numberings;
        ensure(n == big(0), || format!("{r}x{c}: N = {n}"))?;
    }
    ensure(
        oracle::count_open_numberings(5, 5) == oracle::OPEN_NUMBERINGS_5X5,
        || "oracle disagrees with its frozen 5x5 value".into(),
    )?;
    let t = Instant::now();
    let n = knightcount::count_open_numberings(&board(5, 5), SearchOptions::open())
        .map_err(|e| e.to_string())?
        .total;
    let took = t.elapsed();
    ensure(n == big(oracle::OPEN_NUMBERINGS_5X5), || {
        format!("5x5: N = {n}")
    })?;
    ensure(took < Duration::from_secs(60), || {
        format!("5x5 took {took:?}")
    })?;
    Ok(format!(
        "N(3x3) = N(4x4) = 0, N(5x5) = {n} in {:.2}s",
        took.as_secs_f64()
    ))
}

fn six_by_six_open() -> Outcome {
    let t = Instant::now();
    let counts = count_tours(&board(6, 6), SearchOptions::open(), &Executor::default())
        .map_err(|e| e.to_string())?;
    let took = t.elapsed();
    let n = counts.open.unwrap().numberings;
    ensure(n == big(oracle::OPEN_NUMBERINGS_6X6), || {
        format!(
            "pruned N(6x6) = {n}, oracle {}",
            oracle::OPEN_NUMBERINGS_6X6
        )
    })?;
    ensure(took < Duration::from_secs(30 * 60), || {
        format!("took {took:?}")
    })?;
    Ok(format!("pruned N(6x6) = {n} in {:.1}s", took.as_secs_f64()))
}

fn closed_tours() -> Outcome {
    let exec = Executor::default();
    let five =
        count_tours(&board(5, 5), SearchOptions::closed(), &exec).map_err(|e| e.to_string())?;
    ensure(five.closed.diagrams == big(0), || {
        format!("D(5x5) = {}", five.closed.diagrams)
    })?;
    let six =
        count_tours(&board(6, 6), SearchOptions::closed(), &exec).map_err(|e| e.to_string())?;
    let d = &six.closed.diagrams;
    ensure(
        six.closed.directed_cycles == big(oracle::DIRECTED_CYCLES_6X6),
        || {
            format!(
                "directed 6x6 cycles {} vs oracle {}",
                six.closed.directed_cycles,
                oracle::DIRECTED_CYCLES_6X6
            )
        },
    )?;
    ensure(six.closed.directed_cycles == d * 2u32, || {
        "directed != 2D".into()
    })?;
    let table = ReferenceTable::builtin();
    let eight = table
        .get(board(8, 8), Quantity::D)
        .ok_or("no 8x8 D entry")?;
    ensure(
        eight.value == "13267364410532".parse::<BigUint>().unwrap() && !eight.desk_runnable,
        || format!("8x8 D entry {eight:?}"),
    )?;
    Ok(format!(
        "D(5x5) = 0, D(6x6) = {d}, 8x8 D = {} held as reference only",
        eight.value
    ))
}

fn symmetry_relations() -> Outcome {
    let exec = Executor::default();
    let mut checked = 0;
    let mut enumerated: Vec<BoardSpec> = boards_up_to_30();
    enumerated.push(board(6, 6));
    for b in enumerated {
        let open = count_tours(&b, SearchOptions::open(), &exec)
            .map_err(|e| e.to_string())?
            .open
            .unwrap();
        ensure(open.numberings == &open.diagrams * 2u32, || {
            format!("{b}: N != 2T")
        })?;
        if b.is_square() {
            ensure(&open.geometric_classes * 8u32 >= open.diagrams, || {
                format!("{b}: G < T/8")
            })?;
        }
        checked += 1;
    }
    let truth = oracle::classify(5, 5);
    let five = count_tours(&board(5, 5), SearchOptions::open(), &exec)
        .map_err(|e| e.to_string())?
        .open
        .unwrap();
    ensure(
        five.geometric_classes == big(truth.geometric_classes),
        || {
            format!(
                "5x5 G {} vs deduplicated {}",
                five.geometric_classes, truth.geometric_classes
            )
        },
    )?;
    ensure(
        five.symmetric_diagrams > big(0) && !five.division_relation_exact,
        || "5x5 has no symmetric diagrams".into(),
    )?;
    Ok(format!(
        "N = 2T on {checked} boards; 5x5 G = {} (deduplicated {}), {} symmetric diagrams, T = {} != 8G",
        five.geometric_classes, truth.geometric_classes, five.symmetric_diagrams, five.diagrams
    ))
}

fn partition_and_checkpoint() -> Outcome {
    let b = board(5, 5);
    let direct =
        count_tours(&b, SearchOptions::open(), &Executor::default()).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for depth in 1..=3 {
        let opts = SearchOptions::open().with_split_depth(depth);
        let units = split_work(&b, depth).map_err(|e| e.to_string())?;
        let results: Vec<_> = units.iter().map(|u| count_unit(u, opts).unwrap()).collect();
        let merged = merge_results(&b, &opts, units.len(), &results).map_err(|e| e.to_string())?;
        ensure(merged == direct, || {
            format!("depth {depth}: merged totals differ")
        })?;

        let path = dir.path().join(format!("d{depth}.ckpt"));
        create_file(&path, &Checkpoint::new(&b, opts).unwrap()).map_err(|e| e.to_string())?;
        // interrupt at several unit boundaries before finishing
        for step in [1, units.len() / 3, 2] {
            run_checkpoint(&path, &Executor::with_jobs(Some(2)).unwrap(), Some(step))
                .map_err(|e| e.to_string())?;
        }
        let done =
            run_checkpoint(&path, &Executor::sequential(), None).map_err(|e| e.to_string())?;
        ensure(done.totals().map_err(|e| e.to_string())? == direct, || {
            format!("depth {depth}: resumed totals differ")
        })?;
    }
    Ok("split depths 1-3 merge and resume to the direct 5x5 totals".into())
}

fn estimator_unbiasedness() -> Outcome {
    let b = board(5, 5);
    let exec = Executor::default();
    let exact = oracle::OPEN_NUMBERINGS_5X5 as f64;
    let t = Instant::now();
    let req = EstimateRequest {
        samples: 1_000_000,
        policy: SamplePolicy::default(),
        confidence: 0.99,
        seed: 42,
    };
    let r = run_estimate(&b, &req, &exec, None).map_err(|e| e.to_string())?;
    let dev = (r.point_estimate - exact).abs() / r.standard_error;
    ensure(dev <= 3.0, || {
        format!("|mean - N| = {dev:.2} SE (mean {})", r.point_estimate)
    })?;
    let mut covered = 0;
    for seed in 0..50 {
        let req = EstimateRequest {
            samples: 200_000,
            seed,
            ..req
        };
        let r = run_estimate(&b, &req, &exec, None).map_err(|e| e.to_string())?;
        if r.ci_low <= exact && exact <= r.ci_high {
            covered += 1;
        }
    }
    let took = t.elapsed();
    ensure(covered >= 46, || format!("coverage {covered}/50"))?;
    ensure(took < Duration::from_secs(600), || format!("took {took:?}"))?;
    Ok(format!(
        "mean {:.1} is {dev:.2} SE from {exact}; 99% coverage {covered}/50; {:.1}s",
        r.point_estimate,
        took.as_secs_f64()
    ))
}

fn paper_scale_consistency() -> Outcome {
    let t = Instant::now();
    let r = cli(&[
        "verify",
        "--level",
        "full",
        "--samples",
        "10000000",
        "--seed",
        "42",
        "--confidence",
        "0.99",
    ])?;
    let took = t.elapsed();
    let Some(Results::Verify(checks)) = r.results else {
        return Err("verify produced no checks".into());
    };
    let g = checks
        .iter()
        .find(|c| c.board == board(8, 8) && c.quantity == Quantity::G)
        .ok_or("no 8x8 G check")?;
    ensure(g.expected == "1224489260686244", || format!("{g:?}"))?;
    ensure(g.status == CheckStatus::InsideInterval, || {
        format!("G = {} outside 99% CI {:?}", g.expected, g.computed)
    })?;
    ensure(took < Duration::from_secs(30 * 60), || {
        format!("took {took:?}")
    })?;
    Ok(format!(
        "G = {} inside 99% CI {} (1e7 samples, seed 42, {:.0}s)",
        g.expected,
        g.computed.as_deref().unwrap_or("?"),
        took.as_secs_f64()
    ))
}

fn pruning_safety() -> Outcome {
    let exec = Executor::default();
    let single = |isolated, anchor, dead| Pruning {
        isolated_square: isolated,
        anchor_exit: anchor,
        dead_end_pair: dead,
    };
    // rule under test, plus the mode it acts on
    let rules = [
        ("isolated_square", single(true, false, false), false),
        ("anchor_exit", single(false, true, false), true),
        ("dead_end_pair", single(false, false, true), false),
    ];
    let mut cut = [false; 3];
    let boards = boards_up_to_30();
    for b in &boards {
        let (r, c) = (b.rows(), b.cols());
        let n = big(oracle::count_open_numberings(r, c));
        let d = big(oracle::count_directed_cycles(r, c));
        for closed in [false, true] {
            let base = if closed {
                SearchOptions::closed()
            } else {
                SearchOptions::open()
            };
            let run = |p: Pruning| {
                Enumerator::new(b, base.with_pruning(p))
                    .unwrap()
                    .count(&exec)
                    .unwrap()
            };
            let (none, none_nodes) = run(Pruning::NONE);
            for (i, (name, p, closed_rule)) in rules.iter().enumerate() {
                let (counts, nodes) = run(*p);
                ensure(counts == none, || format!("{b} {name}: counts changed"))?;
                ensure(nodes <= none_nodes, || format!("{b} {name}: more nodes"))?;
                if *closed_rule == closed && nodes < none_nodes {
                    cut[i] = true;
                }
            }
            let (all, _) = run(Pruning::ALL);
            ensure(all == none, || format!("{b}: all rules changed counts"))?;
            ensure(none.closed.directed_cycles == d, || {
                format!("{b}: cycles vs oracle")
            })?;
            if !closed {
                ensure(none.open.as_ref().unwrap().numberings == n, || {
                    format!("{b}: N vs oracle")
                })?;
            }
        }
    }
    ensure(cut.iter().all(|&c| c), || {
        format!("some rule never cut the tree: {cut:?}")
    })?;
    Ok(format!(
        "{} boards, each rule alone changes node counts but no count",
        boards.len()
    ))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["count", "--rows", "5", "--cols", "6", "--closed"],
        &["count", "--rows", "5", "--cols", "5", "--split-depth", "4"],
        &[
            "estimate",
            "--rows",
            "8",
            "--cols",
            "8",
            "--samples",
            "200000",
            "--seed",
            "3",
            "--target",
            "G",
        ],
    ];
    for args in runs {
        let strip = |jobs: &str| -> Result<String, String> {
            let mut a = args.to_vec();
            a.extend(["--jobs", jobs]);
            Ok(cli(&a)?.without_runtime().to_json())
        };
        let one = strip("1")?;
        for jobs in ["1", "4"] {
            ensure(strip(jobs)? == one, || {
                format!("{args:?} differs with {jobs} jobs")
            })?;
        }
    }
    Ok("count and estimate reports identical for 1 and 4 workers, repeated runs".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("small-board exactness", small_board_exactness),
        ("6x6 open count", six_by_six_open),
        ("closed tours", closed_tours),
        ("symmetry relations", symmetry_relations),
        ("partition and checkpoint", partition_and_checkpoint),
        ("estimator unbiasedness", estimator_unbiasedness),
        ("8x8 estimate consistency", paper_scale_consistency),
        ("pruning safety", pruning_safety),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let line = match check() {
            Ok(detail) => format!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {}: FAIL {name}: {why}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
