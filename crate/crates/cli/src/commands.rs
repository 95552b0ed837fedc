//! Implementations of the subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;

use tdcube_core::agent_io::{expect_variant, load_agent, save_agent};
use tdcube_core::cube::{Action, CubeState};
use tdcube_core::mcts::{self, EvalConfig, MctsTree, WrapConfig};
use tdcube_core::oracle::{unpack_state, DistanceTable};
use tdcube_core::trainer::{self, greedy_step};
use tdcube_core::CubeVariant;

use crate::presets::TrainFileConfig;
use crate::{CliError, EvalArgs, OracleArgs, SolveArgs, SymcountArgs, TrainArgs};

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn parse_p_range(s: &str) -> Result<(usize, usize), CliError> {
    let err = || CliError::Usage(format!("bad twist range '{s}' (use e.g. 5 or 1-14)"));
    let core = s.replace("..", "-");
    let (lo, hi) = match core.split_once('-') {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| err())?,
            b.trim().parse().map_err(|_| err())?,
        ),
        None => {
            let v: usize = core.trim().parse().map_err(|_| err())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(err());
    }
    Ok((lo, hi))
}

pub fn parse_iterations(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad iteration count '{t}'")))
        })
        .collect()
}

fn wrap_from_args(iterations: u32, args: &EvalWrapArgs) -> WrapConfig {
    WrapConfig {
        iterations,
        c_puct: args.c_puct,
        d_max: args.d_max,
        epsilon_ucb: 1e-8,
        use_softmax: !args.no_softmax,
        use_last_mcts: !args.no_reuse,
    }
}

/// Wrapper tuning shared by eval/solve/audit.
#[derive(Clone, Copy, Debug)]
pub struct EvalWrapArgs {
    pub c_puct: f64,
    pub d_max: i32,
    pub no_softmax: bool,
    pub no_reuse: bool,
}

// ---------------------------------------------------------------- train

pub fn cmd_train(
    seed: u64,
    out_dir: &Path,
    file_cfg: TrainFileConfig,
    args: &TrainArgs,
) -> Result<(), CliError> {
    let resolved = toml::to_string_pretty(&file_cfg)
        .map_err(|e| CliError::Data(format!("cannot serialize config: {e}")))?;
    println!("# resolved configuration\n{resolved}");
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
    let cfg_path = out_dir.join(format!("{}.config.toml", file_cfg.name));
    std::fs::write(&cfg_path, &resolved)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", cfg_path.display())))?;

    let mut all_curves = Vec::new();
    for r in 0..args.replicates {
        let run_seed = seed + r as u64;
        let cfg = file_cfg.to_train_config(run_seed)?;
        let stem = if args.replicates > 1 {
            format!("{}-r{r}", file_cfg.name)
        } else {
            file_cfg.name.clone()
        };
        let mut net = trainer::new_net(&cfg);
        println!(
            "[{stem}] training: variant={} metric={} tuples={} entries={} seed={run_seed}",
            cfg.variant,
            cfg.metric,
            net.tuples.len(),
            net.total_weights()
        );
        let log_path = out_dir.join(format!("{stem}.train.csv"));
        let report = if cfg.log_every > 0 {
            let mut log = create(&log_path)?;
            let rep = trainer::train(&mut net, &cfg, Some(&mut log))?;
            log.flush()?;
            rep
        } else {
            trainer::train(&mut net, &cfg, None)?
        };
        let agent_path = out_dir.join(format!("{stem}.agent"));
        save_agent(&net, &agent_path)?;
        println!(
            "[{stem}] done: episodes={} solved={} ({:.1}%) updates={} wall={:.1}s -> {}",
            report.episodes_done,
            report.solved_episodes,
            100.0 * report.solved_episodes as f64 / report.episodes_done.max(1) as f64,
            report.updates,
            report.wall_seconds,
            agent_path.display()
        );
        all_curves.extend(report.curve);
    }
    if !all_curves.is_empty() {
        let curve_path = out_dir.join(format!("{}.curve.csv", file_cfg.name));
        let mut w = create(&curve_path)?;
        trainer::write_curve_csv(&all_curves, &mut w)?;
        w.flush()?;
        println!("learning curve -> {}", curve_path.display());
    }
    Ok(())
}

// ----------------------------------------------------------------- eval

pub fn cmd_eval(seed: u64, out_dir: &Path, args: &EvalArgs) -> Result<(), CliError> {
    let (p_lo, p_hi) = parse_p_range(&args.p_range)?;
    if p_lo < 1 {
        return Err(CliError::Usage(
            "evaluation needs at least one scrambling twist (p >= 1)".into(),
        ));
    }
    if args.cubes < 1 {
        return Err(CliError::Usage("need at least one cube".into()));
    }
    let iterations = parse_iterations(&args.iterations)?;
    let wrap_args = EvalWrapArgs {
        c_puct: args.c_puct,
        d_max: args.d_max,
        no_softmax: args.no_softmax,
        no_reuse: args.no_reuse,
    };

    let mut agents = Vec::new();
    for path in &args.agent {
        let net = load_agent(path)?;
        if let Some(v) = args.variant {
            expect_variant(&net, v)?;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "agent".into());
        agents.push((stem, net));
    }
    if agents.is_empty() {
        return Err(CliError::Usage("pass at least one --agent file".into()));
    }

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
    let csv_path = match &args.out {
        Some(p) => p.clone(),
        None => out_dir.join("eval.csv"),
    };
    let mut w = create(&csv_path)?;
    let multi = agents.len() > 1;
    if multi {
        writeln!(w, "agent,p,iterations,n_sym,solved_rate,mean_moves,mean_time_ms")?;
    } else {
        writeln!(w, "p,iterations,n_sym,solved_rate,mean_moves,mean_time_ms")?;
    }

    let mut records_w = match &args.records {
        Some(p) => {
            let mut rw = create(p)?;
            writeln!(
                rw,
                "agent,iterations,index,p,scramble,solved,moves_used,expansions,wall_ms"
            )?;
            Some(rw)
        }
        None => None,
    };

    // (p, iterations) -> per-agent rates for the mean summary.
    let mut sums: Vec<(usize, u32, f64, f64, f64)> = Vec::new();
    for (stem, net) in &agents {
        let n_sym = args.n_sym.unwrap_or(net.config.n_sym);
        for &iters in &iterations {
            for p in p_lo..=p_hi {
                let report = mcts::evaluate(
                    net,
                    &EvalConfig {
                        p,
                        cubes: args.cubes,
                        e_eval: args.e_eval,
                        n_sym,
                        seed,
                        wrap: wrap_from_args(iters, &wrap_args),
                    },
                );
                let row = format!(
                    "{p},{iters},{n_sym},{},{},{:.3}",
                    report.solved_rate, report.mean_moves, report.mean_time_ms
                );
                if multi {
                    writeln!(w, "{stem},{row}")?;
                } else {
                    writeln!(w, "{row}")?;
                }
                println!(
                    "[{stem}] p={p} I={iters} n_sym={n_sym}: solved {:.3} mean_moves {:.2} mean_ms {:.2}",
                    report.solved_rate, report.mean_moves, report.mean_time_ms
                );
                if let Some(rw) = records_w.as_mut() {
                    for r in &report.records {
                        writeln!(
                            rw,
                            "{stem},{iters},{},{},{},{},{},{},{:.3}",
                            r.index,
                            r.p,
                            Action::format_sequence(&r.scramble),
                            r.solved as u8,
                            r.moves_used,
                            r.expansions,
                            r.wall_ms
                        )?;
                    }
                }
                sums.push((p, iters, report.solved_rate, report.mean_moves, report.mean_time_ms));
            }
        }
    }
    if multi {
        // Mean over agents per (p, iterations).
        for &iters in &iterations {
            for p in p_lo..=p_hi {
                let rows: Vec<_> = sums
                    .iter()
                    .filter(|&&(rp, ri, ..)| rp == p && ri == iters)
                    .collect();
                let n = rows.len() as f64;
                let rate = rows.iter().map(|r| r.2).sum::<f64>() / n;
                let moves = rows.iter().map(|r| r.3).sum::<f64>() / n;
                let ms = rows.iter().map(|r| r.4).sum::<f64>() / n;
                writeln!(
                    w,
                    "mean,{p},{iters},{},{rate},{moves},{ms:.3}",
                    args.n_sym
                        .unwrap_or_else(|| agents[0].1.config.n_sym)
                )?;
            }
        }
    }
    w.flush()?;
    if let Some(mut rw) = records_w {
        rw.flush()?;
    }
    println!("eval table -> {}", csv_path.display());
    Ok(())
}

// ------------------------------------------------------------- symcount

pub fn cmd_symcount(seed: u64, out_dir: &Path, args: &SymcountArgs) -> Result<(), CliError> {
    let (p_lo, p_hi) = parse_p_range(&args.p_range)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
    let csv_path = match &args.out {
        Some(p) => p.clone(),
        None => out_dir.join("symcount.csv"),
    };
    let mut w = create(&csv_path)?;
    writeln!(w, "p,samples,avg_distinct")?;
    for p in p_lo..=p_hi {
        let mut total = 0u64;
        for i in 0..args.samples {
            let mut rng = tdcube_core::rng::substream_indexed(
                seed,
                "symcount",
                ((p as u64) << 32) | i as u64,
            );
            let (s, _) = CubeState::scramble(args.variant, args.metric, p, &mut rng);
            total += s.count_distinct_symmetries() as u64;
        }
        let avg = total as f64 / args.samples.max(1) as f64;
        writeln!(w, "{p},{},{avg}", args.samples)?;
        println!("p={p}: avg distinct symmetric states {avg:.3}");
    }
    w.flush()?;
    println!("symmetry counts -> {}", csv_path.display());
    Ok(())
}

// --------------------------------------------------------------- oracle

pub fn cmd_oracle(out_dir: &Path, args: &OracleArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
    let t0 = Instant::now();
    let table = DistanceTable::build(args.metric);
    println!(
        "{} states, max depth {} ({}, built in {:.1}s)",
        table.len(),
        table.max_depth(),
        args.metric,
        t0.elapsed().as_secs_f64()
    );
    println!("level sizes:");
    for (d, c) in table.levels().iter().enumerate() {
        println!("  depth {d:2}: {c}");
    }
    let table_path = match &args.out {
        Some(p) => p.clone(),
        None => out_dir.join(format!("oracle-{}.tbl", args.metric)),
    };
    table.save(&table_path)?;
    println!("distance table -> {}", table_path.display());
    let levels_path = match &args.levels_csv {
        Some(p) => p.clone(),
        None => out_dir.join(format!("oracle-{}-levels.csv", args.metric)),
    };
    let mut w = create(&levels_path)?;
    table.write_levels_csv(&mut w)?;
    w.flush()?;
    println!("level histogram -> {}", levels_path.display());
    Ok(())
}

// ---------------------------------------------------------------- solve

pub fn cmd_solve(seed: u64, args: &SolveArgs) -> Result<(), CliError> {
    let net = load_agent(&args.agent)?;
    let mut rng = tdcube_core::rng::substream(seed, "solve");
    let (start, scramble) = match (&args.scramble, args.p) {
        (Some(text), _) => {
            let moves = Action::parse_sequence(text)
                .map_err(|e| CliError::Data(format!("bad scramble: {e}")))?;
            // Twists of non-twistable faces (D/R/B on the 2x2x2) are the
            // mirror twist plus a whole-cube rotation; normalizing removes
            // the rotation so the agent sees an equivalent solvable state.
            let state = CubeState::solved(net.variant)
                .apply_all(&moves)
                .normalize()
                .expect("legal twists always leave a normalizable state");
            (state, moves)
        }
        (None, Some(p)) => {
            if p < 1 {
                return Err(CliError::Usage("p must be at least 1".into()));
            }
            CubeState::scramble(net.variant, net.metric, p, &mut rng)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "pass --scramble \"U L F\" or --p <twists>".into(),
            ))
        }
    };
    println!(
        "agent: {} {} ({} tuples); scramble: {}",
        net.variant,
        net.metric,
        net.tuples.len(),
        Action::format_sequence(&scramble)
    );
    println!("{}", start.pretty());

    let n_sym = args.n_sym.unwrap_or(net.config.n_sym);
    let wrap = wrap_from_args(
        args.iterations,
        &EvalWrapArgs {
            c_puct: args.c_puct,
            d_max: args.d_max,
            no_softmax: args.no_softmax,
            no_reuse: args.no_reuse,
        },
    );
    let mut s = start;
    let mut moves: Vec<Action> = Vec::new();
    let mut tree: Option<MctsTree> = None;
    while !s.is_solved() && moves.len() < args.e_eval {
        let (action, value) = if wrap.iterations == 0 {
            let c = greedy_step(&net, &s, n_sym, &mut rng);
            (c.action, c.value)
        } else {
            let mut t = match tree.take() {
                Some(t) => t,
                None => MctsTree::new(&net, wrap, n_sym, s, &mut rng),
            };
            t.search(&mut rng);
            let a = t.best_action(&mut rng);
            let idx = t.actions().iter().position(|&x| x == a).unwrap();
            let visits = t.root_visits()[idx];
            let next = s.apply(a);
            if wrap.use_last_mcts && !next.is_solved() {
                t.advance(a, next, &mut rng);
                tree = Some(t);
            }
            (a, visits as f64)
        };
        s = s.apply(action);
        moves.push(action);
        let what = if wrap.iterations == 0 { "value" } else { "visits" };
        println!("move {:3}: {action}  ({what} {value:.3})", moves.len());
    }
    println!("{}", s.pretty());
    if s.is_solved() {
        println!(
            "SOLVED in {} moves: {}",
            moves.len(),
            Action::format_sequence(&moves)
        );
    } else {
        println!("UNSOLVED after {} moves", moves.len());
    }
    Ok(())
}

// ---------------------------------------------------------------- audit

pub struct AuditArgsView<'a> {
    pub agent: &'a Path,
    pub table: &'a Path,
    pub samples: usize,
    pub iterations: u32,
    pub e_eval: usize,
    pub n_sym: Option<usize>,
    pub wrap_args: EvalWrapArgs,
    pub out: Option<PathBuf>,
}

pub fn cmd_audit(seed: u64, out_dir: &Path, args: &AuditArgsView) -> Result<(), CliError> {
    let net = load_agent(args.agent)?;
    expect_variant(&net, CubeVariant::Pocket2)?;
    let table = DistanceTable::load(args.table)?;
    if table.metric() != net.metric {
        return Err(CliError::Data(format!(
            "distance table is {} but the agent plays {}",
            table.metric(),
            net.metric
        )));
    }
    let n_sym = args.n_sym.unwrap_or(net.config.n_sym);
    let wrap = wrap_from_args(args.iterations, &args.wrap_args);

    // Sample table states uniformly (depth-0 = solved is excluded).
    let mut keys = Vec::new();
    for d in 1..=table.max_depth() {
        keys.push(table.keys_at_depth(d));
    }
    let flat: Vec<(u128, u8)> = keys
        .iter()
        .enumerate()
        .flat_map(|(i, ks)| ks.iter().map(move |&k| (k, i as u8 + 1)))
        .collect();
    let mut rng = tdcube_core::rng::substream(seed, "audit");
    let mut overheads: Vec<i64> = Vec::new();
    let mut unsolved = 0usize;
    let mut rows = Vec::new();
    for _ in 0..args.samples {
        let (key, dist) = flat[rng.gen_range(0..flat.len())];
        let start = unpack_state(key).map_err(|e| CliError::Data(e.to_string()))?;
        let mut s = start;
        let mut moves = 0usize;
        let mut tree: Option<MctsTree> = None;
        while !s.is_solved() && moves < args.e_eval {
            let action = if wrap.iterations == 0 {
                greedy_step(&net, &s, n_sym, &mut rng).action
            } else {
                let mut t = match tree.take() {
                    Some(t) => t,
                    None => MctsTree::new(&net, wrap, n_sym, s, &mut rng),
                };
                t.search(&mut rng);
                let a = t.best_action(&mut rng);
                let next = s.apply(a);
                if wrap.use_last_mcts && !next.is_solved() {
                    t.advance(a, next, &mut rng);
                    tree = Some(t);
                }
                a
            };
            s = s.apply(action);
            moves += 1;
        }
        let solved = s.is_solved();
        if solved {
            overheads.push(moves as i64 - dist as i64);
        } else {
            unsolved += 1;
        }
        rows.push((dist, solved, moves));
    }
    overheads.sort_unstable();
    let pct = |q: f64| -> i64 {
        if overheads.is_empty() {
            0
        } else {
            overheads[((overheads.len() - 1) as f64 * q).round() as usize]
        }
    };
    let mean = if overheads.is_empty() {
        f64::NAN
    } else {
        overheads.iter().sum::<i64>() as f64 / overheads.len() as f64
    };
    println!(
        "audit: {} samples, solved {} ({:.2}%), unsolved {}",
        args.samples,
        args.samples - unsolved,
        100.0 * (args.samples - unsolved) as f64 / args.samples.max(1) as f64,
        unsolved
    );
    println!(
        "solution-length overhead vs optimal: mean {mean:.3}, p50 {}, p90 {}, p99 {}, max {}",
        pct(0.5),
        pct(0.9),
        pct(0.99),
        overheads.last().copied().unwrap_or(0)
    );
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out_dir).ok();
        let mut w = create(out)?;
        writeln!(w, "optimal,solved,moves")?;
        for (dist, solved, moves) in rows {
            writeln!(w, "{dist},{},{moves}", solved as u8)?;
        }
        w.flush()?;
        println!("per-sample audit -> {}", out.display());
    }
    Ok(())
}
