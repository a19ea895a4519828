use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use knightcount::checkpoint::{create_file, read_file, run_checkpoint};
use knightcount::enumerate::{total_nodes, Enumerator};
use knightcount::estimate::{derive_geometric_estimate, run_estimate, EstimateRequest};
use knightcount::{
    BoardSpec, Checkpoint, EstimateReport, Executor, Pruning, SamplePolicy, SearchMode,
    SearchOptions, TourCounts,
};
use num_bigint::BigUint;
use serde_json::json;

use crate::args::{
    BoardArgs, Cli, Command, CountArgs, EstimateArgs, JobsArgs, Level, Prune, SearchArgs,
    SplitArgs, TargetArg, VerifyArgs,
};
use crate::reference::{Quantity, ReferenceTable, GENERATED};
use crate::report::{Check, CheckStatus, Results, RunReport, Runtime, Work};
use crate::Failure;

pub fn run(cli: &Cli) -> Result<RunReport, Failure> {
    match &cli.command {
        Command::Count(a) => count(a),
        Command::Estimate(a) => estimate(a),
        Command::Verify(a) => verify(a),
        Command::Split(a) => split(a),
    }
}

/// One line per failed check of a `verify` report.
pub fn verification_failures(report: &RunReport) -> Vec<String> {
    let Some(Results::Verify(checks)) = &report.results else {
        return Vec::new();
    };
    checks
        .iter()
        .filter(|c| c.status.is_failure())
        .map(|c| {
            format!(
                "{} {} {}: expected {}, computed {}",
                c.board,
                c.quantity,
                serde_json::to_value(c.status).unwrap().as_str().unwrap(),
                c.expected,
                c.computed.as_deref().unwrap_or("nothing"),
            )
        })
        .collect()
}

fn board(b: &BoardArgs) -> Result<BoardSpec, Failure> {
    Ok(BoardSpec::new(b.rows, b.cols)?)
}

fn executor(j: &JobsArgs) -> Result<Executor, Failure> {
    Ok(Executor::with_jobs(j.jobs.map(|n| n as usize))?)
}

fn search_options(s: &SearchArgs, split_depth: usize) -> SearchOptions {
    let mode = if s.closed {
        SearchMode::Closed
    } else {
        SearchMode::Open
    };
    let pruning = match s.prune {
        Prune::On => Pruning::ALL,
        Prune::Off => Pruning::NONE,
    };
    SearchOptions {
        mode,
        pruning,
        split_depth,
        symmetry_reduce_starts: false,
    }
}

fn finish(mut report: RunReport, exec: &Executor, started: Instant) -> RunReport {
    report.runtime = Some(Runtime {
        jobs: exec.jobs(),
        wall_seconds: started.elapsed().as_secs_f64(),
    });
    report
}

fn count(a: &CountArgs) -> Result<RunReport, Failure> {
    let started = Instant::now();
    let b = board(&a.board)?;
    let opts = search_options(&a.search, a.split_depth);
    let exec = executor(&a.jobs)?;
    let mut report = RunReport::new(
        "count",
        Some(b),
        json!({
            "search": opts,
            "checkpoint": a.checkpoint,
            "resume": a.resume,
            "max_units": a.max_units,
        }),
    );

    match &a.checkpoint {
        None => {
            let (counts, nodes) = Enumerator::new(&b, opts)?.count(&exec)?;
            report.work.nodes_expanded = Some(nodes.to_string());
            report.results = Some(Results::Counts(counts));
        }
        Some(path) => {
            if a.resume {
                read_file(path)?.ensure_matches(&b, &opts)?;
            } else {
                create_file(path, &Checkpoint::new(&b, opts)?)?;
            }
            let cp = run_checkpoint(path, &exec, a.max_units)?;
            report.work = Work {
                nodes_expanded: Some(total_nodes(&cp.completed).to_string()),
                samples: None,
                units_total: Some(cp.unit_count),
                units_completed: Some(cp.completed.len() as u64),
            };
            if cp.is_complete() {
                report.results = Some(Results::Counts(cp.totals()?));
            }
        }
    }
    Ok(finish(report, &exec, started))
}

fn estimate_report(
    b: &BoardSpec,
    req: &EstimateRequest,
    target: TargetArg,
    exec: &Executor,
    log: Option<&mut dyn Write>,
) -> Result<EstimateReport, Failure> {
    let numberings = run_estimate(b, req, exec, log)?;
    Ok(match target {
        TargetArg::N => numberings,
        TargetArg::G => derive_geometric_estimate(&numberings)?,
    })
}

fn estimate(a: &EstimateArgs) -> Result<RunReport, Failure> {
    let started = Instant::now();
    let b = board(&a.board)?;
    let exec = executor(&a.jobs)?;
    let req = EstimateRequest {
        samples: a.samples,
        policy: SamplePolicy::new(a.alpha, a.epsilon)?,
        confidence: a.confidence,
        seed: a.seed,
    };
    let est = match &a.sample_log {
        None => estimate_report(&b, &req, a.target, &exec, None)?,
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            let est = estimate_report(&b, &req, a.target, &exec, Some(&mut w))?;
            w.flush()?;
            est
        }
    };
    let mut report = RunReport::new(
        "estimate",
        Some(b),
        json!({
            "samples": a.samples,
            "policy": req.policy,
            "confidence": a.confidence,
            "seed": a.seed,
            "target": est.target,
            "sample_log": a.sample_log,
        }),
    );
    report.work.samples = Some(est.sample_count);
    report.generator = Some(est.generator.clone());
    report.results = Some(Results::Estimate(est));
    Ok(finish(report, &exec, started))
}

fn load_table(path: Option<&Path>) -> Result<ReferenceTable, Failure> {
    let text = match path {
        Some(p) => {
            std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?
        }
        None => GENERATED.to_string(),
    };
    ReferenceTable::with_published(&text).map_err(|e| Failure::Usage(e.to_string()))
}

fn exact_value(counts: &TourCounts, q: Quantity) -> Option<BigUint> {
    let open = counts.open.as_ref();
    match q {
        Quantity::N => open.map(|o| o.numberings.clone()),
        Quantity::T => open.map(|o| o.diagrams.clone()),
        Quantity::G => open.map(|o| o.geometric_classes.clone()),
        Quantity::S => open.map(|o| o.symmetric_diagrams.clone()),
        Quantity::D => Some(counts.closed.diagrams.clone()),
    }
}

fn verify(a: &VerifyArgs) -> Result<RunReport, Failure> {
    let started = Instant::now();
    let exec = executor(&a.jobs)?;
    let table = load_table(a.reference.as_deref())?;
    let mut checks = Vec::new();
    let mut nodes = BigUint::default();
    let mut samples = 0u64;
    let mut generator = None;

    for b in table.boards() {
        let entries: Vec<_> = table.entries.iter().filter(|e| e.board == b).collect();

        let exact: Vec<_> = entries.iter().filter(|e| e.desk_runnable).collect();
        let counts = if exact.is_empty() {
            None
        } else {
            let only_closed = exact.iter().all(|e| e.quantity == Quantity::D);
            let opts = if only_closed {
                SearchOptions::closed()
            } else {
                SearchOptions::open()
            };
            let (counts, n) = Enumerator::new(&b, opts)?.count(&exec)?;
            nodes += n;
            Some(counts)
        };

        let estimated = a.level == Level::Full
            && b.is_square()
            && entries
                .iter()
                .any(|e| !e.desk_runnable && matches!(e.quantity, Quantity::N | Quantity::G));
        let numberings = if estimated {
            let req = EstimateRequest {
                samples: a.samples,
                policy: SamplePolicy::default(),
                confidence: a.confidence,
                seed: a.seed,
            };
            let est = run_estimate(&b, &req, &exec, None)?;
            samples += est.sample_count;
            generator = Some(est.generator.clone());
            Some(est)
        } else {
            None
        };

        for e in entries {
            let expected = e.value.to_string();
            let check = if e.desk_runnable {
                let got = counts.as_ref().and_then(|c| exact_value(c, e.quantity));
                let status = if got.as_ref() == Some(&e.value) {
                    CheckStatus::Match
                } else {
                    CheckStatus::Mismatch
                };
                Check {
                    board: b,
                    quantity: e.quantity,
                    expected,
                    computed: got.map(|v| v.to_string()),
                    status,
                }
            } else {
                let interval = match (&numberings, e.quantity) {
                    (Some(est), Quantity::N) => Some(est.clone()),
                    (Some(est), Quantity::G) => Some(derive_geometric_estimate(est)?),
                    _ => None,
                };
                match interval {
                    None => Check {
                        board: b,
                        quantity: e.quantity,
                        expected,
                        computed: None,
                        status: CheckStatus::ReferenceOnly,
                    },
                    Some(est) => {
                        let v: f64 = expected.parse().expect("decimal parses as f64");
                        let inside = est.ci_low <= v && v <= est.ci_high;
                        Check {
                            board: b,
                            quantity: e.quantity,
                            expected,
                            computed: Some(format!("{:.0}..{:.0}", est.ci_low, est.ci_high)),
                            status: if inside {
                                CheckStatus::InsideInterval
                            } else {
                                CheckStatus::OutsideInterval
                            },
                        }
                    }
                }
            };
            checks.push(check);
        }
    }

    let mut report = RunReport::new(
        "verify",
        None,
        json!({
            "level": if a.level == Level::Full { "full" } else { "quick" },
            "reference": a.reference,
            "samples": if a.level == Level::Full { Some(a.samples) } else { None },
            "seed": a.seed,
            "confidence": a.confidence,
        }),
    );
    report.work = Work {
        nodes_expanded: Some(nodes.to_string()),
        samples: (samples > 0).then_some(samples),
        units_total: None,
        units_completed: None,
    };
    report.generator = generator;
    report.results = Some(Results::Verify(checks));
    Ok(finish(report, &exec, started))
}

fn split(a: &SplitArgs) -> Result<RunReport, Failure> {
    let started = Instant::now();
    let b = board(&a.board)?;
    let opts = search_options(&a.search, a.depth);
    let cp = Checkpoint::new(&b, opts)?;
    create_file(&a.out, &cp)?;
    let mut report = RunReport::new("split", Some(b), json!({ "search": opts, "out": a.out }));
    report.work.units_total = Some(cp.unit_count);
    report.work.units_completed = Some(0);
    report.results = Some(Results::Split {
        unit_count: cp.unit_count,
        checkpoint: a.out.display().to_string(),
    });
    Ok(finish(report, &Executor::sequential(), started))
}
