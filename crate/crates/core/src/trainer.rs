//! Training loops for the n-tuple TD agent.
//!
//! Two modes are provided:
//!
//! * **FullEpisode** — episodic TD(0): scramble a cube with `p ~ U{1..p_max}`
//!   twists, then walk greedily for up to `e_train` steps, updating the
//!   network toward the value of the chosen successor after every step.
//! * **OneStepDavi** — a one-step value-iteration variant: batches of
//!   independently scrambled states are updated toward one-step lookahead
//!   targets computed with a *frozen* copy of the weights; the frozen copy
//!   is refreshed only when the running batch loss falls below a
//!   threshold at a fixed check interval.

use std::io::Write;
use std::time::Instant;

use rand::Rng;

use crate::board::{random_walk_ntuples, NTupleDef, Repr};
use crate::cube::tables::{tables, MAX_STICKERS};
use crate::cube::{draw_symmetry_keys, Action, CubeState, CubeVariant, Metric};
use crate::mcts::{self, EvalConfig, WrapConfig};
use crate::net::{NTupleNet, NetConfig};

/// Which training loop to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrainMode {
    FullEpisode,
    OneStepDavi,
}

/// Settings of the one-step (DAVI-style) mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DaviConfig {
    /// Scrambled states per batch.
    pub batch_size: usize,
    /// Frozen-copy refresh is considered every this many batches.
    pub check_interval: u64,
    /// Batch MSE must fall below this for the refresh to happen.
    pub loss_threshold: f64,
}

impl Default for DaviConfig {
    fn default() -> Self {
        DaviConfig {
            batch_size: 100,
            check_interval: 100,
            loss_threshold: 0.05,
        }
    }
}

/// Full description of one training run.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub variant: CubeVariant,
    pub metric: Metric,
    pub repr: Repr,
    /// Number of n-tuples to draw (random walks on the board graph).
    pub n_tuples: usize,
    /// Length of each n-tuple.
    pub tuple_len: usize,
    /// Maximum number of scrambling twists.
    pub p_max: usize,
    /// Episodes (FullEpisode) or scrambled samples (OneStepDavi).
    pub episodes: u64,
    /// Maximum episode length during training.
    pub e_train: usize,
    pub net: NetConfig,
    pub seed: u64,
    pub mode: TrainMode,
    pub davi: DaviConfig,
    /// Evaluate the learning curve every this many episodes (0 = never).
    pub eval_every: u64,
    /// Cubes per twist count in learning-curve evaluations.
    pub eval_cubes: usize,
    /// Move limit in learning-curve evaluations.
    pub eval_e: usize,
    /// Write one training-log record every this many episodes (0 = never).
    pub log_every: u64,
    /// Upper bound on total lookup-table bytes (weights + TCL counters);
    /// tuple sets exceeding it are redrawn deterministically.
    pub max_table_bytes: u64,
}

impl TrainConfig {
    pub fn new(variant: CubeVariant, metric: Metric) -> TrainConfig {
        TrainConfig {
            variant,
            metric,
            repr: Repr::Sticker2,
            n_tuples: 60,
            tuple_len: 7,
            p_max: 13,
            episodes: 3_000_000,
            e_train: 16,
            net: NetConfig::default(),
            seed: 0,
            mode: TrainMode::FullEpisode,
            davi: DaviConfig::default(),
            eval_every: 0,
            eval_cubes: 200,
            eval_e: 50,
            log_every: 0,
            max_table_bytes: 3_500_000_000,
        }
    }

    /// Check the structural constraints of the configuration.
    pub fn validate(&self) -> Result<(), String> {
        if self.p_max < 1 {
            return Err("p_max must be at least 1".into());
        }
        if self.mode == TrainMode::FullEpisode && self.e_train < self.p_max + 3 {
            return Err(format!(
                "e_train ({}) must be at least p_max + 3 ({})",
                self.e_train,
                self.p_max + 3
            ));
        }
        if !(self.net.cost < 0.0) || !(self.net.r_pos > 0.0) {
            return Err("cost-to-go must be negative and the solved reward positive".into());
        }
        if self.n_tuples == 0 || self.tuple_len == 0 {
            return Err("need at least one tuple of at least one cell".into());
        }
        if self.mode == TrainMode::OneStepDavi && self.davi.batch_size == 0 {
            return Err("DAVI batch size must be positive".into());
        }
        Ok(())
    }
}

/// One point of the learning curve.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub episodes_done: u64,
    pub p: usize,
    pub solved_rate: f64,
    pub n_sym: usize,
    pub seed: u64,
}

/// Summary of a finished training run.
#[derive(Clone, Debug, Default)]
pub struct TrainReport {
    /// Episodes (FullEpisode) or scrambled samples (OneStepDavi) consumed.
    pub episodes_done: u64,
    /// Weight-update steps performed.
    pub updates: u64,
    /// Episodes that reached the solved cube (FullEpisode only).
    pub solved_episodes: u64,
    /// Frozen-copy refreshes (OneStepDavi only).
    pub frozen_refreshes: u64,
    /// Batch MSE of the final batch (OneStepDavi only).
    pub final_loss: f64,
    pub curve: Vec<CurvePoint>,
    pub wall_seconds: f64,
}

/// Draw the run's tuple set deterministically from the seed, redrawing
/// (still deterministically) if the lookup tables would exceed the
/// configured memory bound.
pub fn make_tuples(cfg: &TrainConfig) -> Vec<NTupleDef> {
    let spec = crate::board::board_spec(cfg.variant, cfg.repr);
    let per_entry = if cfg.net.tcl_enabled { 24 } else { 8 };
    for attempt in 0u32.. {
        let name = if attempt == 0 {
            "tuples".to_string()
        } else {
            format!("tuples-{attempt}")
        };
        let mut rng = crate::rng::substream(cfg.seed, &name);
        let tuples = random_walk_ntuples(spec, cfg.n_tuples, cfg.tuple_len, &mut rng);
        let bytes: u64 = tuples.iter().map(|t| t.lut_size as u64 * per_entry).sum();
        if bytes <= cfg.max_table_bytes {
            return tuples;
        }
    }
    unreachable!()
}

/// Fresh zero network for a training configuration.
pub fn new_net(cfg: &TrainConfig) -> NTupleNet {
    let tuples = make_tuples(cfg);
    NTupleNet::new(cfg.variant, cfg.metric, cfg.repr, tuples, cfg.net, cfg.seed)
}

/// The greedy action choice at `state`.
#[derive(Clone, Copy, Debug)]
pub struct GreedyChoice {
    pub action: Action,
    pub next: CubeState,
    /// One-step lookahead value of the chosen successor.
    pub value: f64,
}

/// Pick the successor with the highest one-step lookahead value, using
/// the symmetric states selected by `keys` for the network estimates.
/// Exact value ties are broken uniformly at random.
pub fn greedy_step_with_keys<R: Rng + ?Sized>(
    net: &NTupleNet,
    state: &CubeState,
    keys: &[u8],
    rng: &mut R,
) -> GreedyChoice {
    let actions = tables(net.variant).actions(net.metric);
    let mut best: Option<GreedyChoice> = None;
    let mut ties = 0u32;
    for &action in actions {
        let next = state.apply(action);
        let value = net.lookahead_value(&next, keys);
        let better = match &best {
            None => true,
            Some(b) => value > b.value,
        };
        if better {
            best = Some(GreedyChoice {
                action,
                next,
                value,
            });
            ties = 1;
        } else if value == best.as_ref().unwrap().value {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                best = Some(GreedyChoice {
                    action,
                    next,
                    value,
                });
            }
        }
    }
    best.expect("cube has at least one action")
}

/// Greedy step with a fresh symmetry-key draw (evaluation-time variant).
pub fn greedy_step<R: Rng + ?Sized>(
    net: &NTupleNet,
    state: &CubeState,
    n_sym: usize,
    rng: &mut R,
) -> GreedyChoice {
    let keys = draw_symmetry_keys(n_sym, rng);
    greedy_step_with_keys(net, state, &keys, rng)
}

/// Train `net` in place according to `cfg`. Optional training-log records
/// are written to `log` every `cfg.log_every` episodes/batches.
pub fn train(
    net: &mut NTupleNet,
    cfg: &TrainConfig,
    log: Option<&mut dyn Write>,
) -> std::io::Result<TrainReport> {
    if let Err(msg) = cfg.validate() {
        panic!("invalid training configuration: {msg}");
    }
    match cfg.mode {
        TrainMode::FullEpisode => train_full_episode(net, cfg, log),
        TrainMode::OneStepDavi => train_davi(net, cfg, log),
    }
}

fn run_curve_eval(net: &NTupleNet, cfg: &TrainConfig, episodes_done: u64, out: &mut Vec<CurvePoint>) {
    for p in 1..=cfg.p_max {
        let report = mcts::evaluate(
            net,
            &EvalConfig {
                p,
                cubes: cfg.eval_cubes,
                e_eval: cfg.eval_e,
                n_sym: net.config.n_sym,
                seed: cfg.seed,
                wrap: WrapConfig::unwrapped(),
            },
        );
        out.push(CurvePoint {
            episodes_done,
            p,
            solved_rate: report.solved_rate,
            n_sym: net.config.n_sym,
            seed: cfg.seed,
        });
    }
}

fn train_full_episode(
    net: &mut NTupleNet,
    cfg: &TrainConfig,
    mut log: Option<&mut dyn Write>,
) -> std::io::Result<TrainReport> {
    let start = Instant::now();
    let mut scramble_rng = crate::rng::substream(cfg.seed, "train-scramble");
    let mut walk_rng = crate::rng::substream(cfg.seed, "train-walk");
    let mut report = TrainReport::default();

    if let Some(w) = log.as_deref_mut() {
        writeln!(w, "episode,p,solved,steps,wall_ms")?;
    }

    for episode in 0..cfg.episodes {
        let ep_start = Instant::now();
        let p = scramble_rng.gen_range(1..=cfg.p_max);
        let (mut s, _) = CubeState::scramble(cfg.variant, cfg.metric, p, &mut scramble_rng);
        let mut steps = 0usize;
        let mut solved = s.is_solved();
        while !solved && steps < cfg.e_train {
            // One symmetry-key draw per step, shared by the action
            // selection and the weight update.
            let keys = draw_symmetry_keys(net.config.n_sym, &mut walk_rng);
            let choice = if net.config.epsilon > 0.0
                && walk_rng.gen::<f64>() < net.config.epsilon
            {
                let actions = tables(net.variant).actions(net.metric);
                let action = actions[walk_rng.gen_range(0..actions.len())];
                let next = s.apply(action);
                let value = net.lookahead_value(&next, &keys);
                GreedyChoice {
                    action,
                    next,
                    value,
                }
            } else {
                greedy_step_with_keys(net, &s, &keys, &mut walk_rng)
            };
            net.td_update_with_keys(&s, choice.value, &keys);
            report.updates += 1;
            s = choice.next;
            steps += 1;
            solved = s.is_solved();
        }
        if solved {
            report.solved_episodes += 1;
        }
        net.episodes_trained += 1;
        report.episodes_done = episode + 1;

        if cfg.log_every > 0 && (episode + 1) % cfg.log_every == 0 {
            if let Some(w) = log.as_deref_mut() {
                writeln!(
                    w,
                    "{},{},{},{},{:.3}",
                    episode + 1,
                    p,
                    solved as u8,
                    steps,
                    ep_start.elapsed().as_secs_f64() * 1e3
                )?;
            }
        }
        if cfg.eval_every > 0
            && ((episode + 1) % cfg.eval_every == 0 || episode + 1 == cfg.episodes)
        {
            run_curve_eval(net, cfg, episode + 1, &mut report.curve);
        }
    }

    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Network value of a state under a frozen weight snapshot.
fn frozen_value(net: &NTupleNet, frozen: &[Vec<f64>], s: &CubeState) -> f64 {
    let spec = net.board_spec();
    let mut buf = [0u8; MAX_STICKERS];
    let board = &mut buf[..spec.n_cells];
    spec.encode_into(s, board);
    net.tuples
        .iter()
        .zip(frozen)
        .map(|(t, w)| w[t.index(board)])
        .sum()
}

fn train_davi(
    net: &mut NTupleNet,
    cfg: &TrainConfig,
    mut log: Option<&mut dyn Write>,
) -> std::io::Result<TrainReport> {
    let start = Instant::now();
    let mut scramble_rng = crate::rng::substream(cfg.seed, "train-scramble");
    let mut report = TrainReport::default();
    let actions = tables(cfg.variant).actions(cfg.metric);
    let mut frozen: Vec<Vec<f64>> = net.weights.clone();
    let mut batch_idx = 0u64;

    if let Some(w) = log.as_deref_mut() {
        writeln!(w, "batch,samples_done,loss,refreshed")?;
    }

    while report.episodes_done < cfg.episodes {
        let n = (cfg.episodes - report.episodes_done).min(cfg.davi.batch_size as u64) as usize;
        batch_idx += 1;
        let mut sq_err = 0.0;
        let mut counted = 0usize;
        for _ in 0..n {
            let p = scramble_rng.gen_range(1..=cfg.p_max);
            let (x, _) = CubeState::scramble(cfg.variant, cfg.metric, p, &mut scramble_rng);
            report.episodes_done += 1;
            if x.is_solved() {
                // Terminal states carry no cost-to-go; nothing to learn.
                continue;
            }
            // One-step target from the frozen network (raw values; the
            // one-step mode does not use symmetry averaging).
            let mut y = f64::NEG_INFINITY;
            for &a in actions {
                let child = x.apply(a);
                let v = if child.is_solved() {
                    net.config.cost + net.config.r_pos
                } else {
                    net.config.cost + net.config.gamma * frozen_value(net, &frozen, &child)
                };
                if v > y {
                    y = v;
                }
            }
            let before = net.raw_value(&x);
            sq_err += (before - y) * (before - y);
            counted += 1;
            net.td_update_with_keys(&x, y, &[0]);
            report.updates += 1;
        }
        let loss = if counted > 0 {
            sq_err / counted as f64
        } else {
            0.0
        };
        report.final_loss = loss;
        let mut refreshed = false;
        if batch_idx % cfg.davi.check_interval == 0 && loss < cfg.davi.loss_threshold {
            frozen = net.weights.clone();
            report.frozen_refreshes += 1;
            refreshed = true;
        }
        net.episodes_trained = report.episodes_done;

        if cfg.log_every > 0 && batch_idx % cfg.log_every == 0 {
            if let Some(w) = log.as_deref_mut() {
                writeln!(
                    w,
                    "{},{},{:.6},{}",
                    batch_idx, report.episodes_done, loss, refreshed as u8
                )?;
            }
        }
        if cfg.eval_every > 0
            && (report.episodes_done % cfg.eval_every == 0
                || report.episodes_done == cfg.episodes)
        {
            run_curve_eval(net, cfg, report.episodes_done, &mut report.curve);
        }
    }

    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Write learning-curve points as CSV.
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "episodes_done,p,solved_rate,n_sym,seed")?;
    for c in points {
        writeln!(
            w,
            "{},{},{},{},{}",
            c.episodes_done, c.p, c.solved_rate, c.n_sym, c.seed
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Face;

    fn toy_cfg() -> TrainConfig {
        let mut cfg = TrainConfig::new(CubeVariant::Pocket2, Metric::Qtm);
        cfg.p_max = 2;
        cfg.e_train = 5;
        cfg.episodes = 20_000;
        cfg.seed = 42;
        cfg
    }

    #[test]
    fn config_validation() {
        let mut cfg = toy_cfg();
        assert!(cfg.validate().is_ok());
        cfg.e_train = cfg.p_max + 2;
        assert!(cfg.validate().is_err());
        cfg.e_train = cfg.p_max + 3;
        assert!(cfg.validate().is_ok());
        cfg.net.cost = 0.1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_episodes_leaves_network_unchanged() {
        let mut cfg = toy_cfg();
        cfg.episodes = 0;
        let mut net = new_net(&cfg);
        let report = train(&mut net, &cfg, None).unwrap();
        assert_eq!(report.updates, 0);
        assert!(net.weights.iter().flatten().all(|&w| w == 0.0));
    }

    #[test]
    fn greedy_step_prefers_the_solving_move_on_zero_net() {
        let cfg = toy_cfg();
        let net = new_net(&cfg);
        let mut rng = crate::rng::substream(1, "trainer-test");
        // Zero network: non-solving actions all tie at value c; the
        // solving action scores c + r_pos and must always win.
        for face in [Face::U, Face::L, Face::F] {
            for power in [1u8, 3] {
                let s = CubeState::solved(CubeVariant::Pocket2).twist(face, power);
                let choice = greedy_step(&net, &s, 0, &mut rng);
                assert!(choice.next.is_solved());
                assert_eq!(choice.action, Action::new(face, 4 - power));
                assert!((choice.value - (-0.1 + 1.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn toy_training_reaches_perfect_play_at_two_twists() {
        let cfg = toy_cfg();
        let mut net = new_net(&cfg);
        let report = train(&mut net, &cfg, None).unwrap();
        assert_eq!(report.episodes_done, 20_000);
        assert!(report.updates > 0);
        // Greedy play must now solve every 1- and 2-twist state.
        let mut rng = crate::rng::substream(3, "trainer-check");
        for _ in 0..200 {
            let p = rng.gen_range(1..=2);
            let (mut s, _) = CubeState::scramble(CubeVariant::Pocket2, Metric::Qtm, p, &mut rng);
            let mut steps = 0;
            while !s.is_solved() && steps < 4 {
                s = greedy_step(&net, &s, 0, &mut rng).next;
                steps += 1;
            }
            assert!(s.is_solved(), "greedy play failed on a {p}-twist cube");
        }
    }

    #[test]
    fn training_is_reproducible_for_equal_seeds() {
        let mut cfg = toy_cfg();
        cfg.episodes = 2_000;
        let mut a = new_net(&cfg);
        let mut b = new_net(&cfg);
        train(&mut a, &cfg, None).unwrap();
        train(&mut b, &cfg, None).unwrap();
        let bits = |n: &NTupleNet| -> Vec<u64> {
            n.weights.iter().flatten().map(|x| x.to_bits()).collect()
        };
        assert_eq!(bits(&a), bits(&b));
        // A different seed gives different tuples and weights.
        let mut cfg2 = cfg.clone();
        cfg2.seed = 43;
        let mut c = new_net(&cfg2);
        train(&mut c, &cfg2, None).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn start_twist_distribution_is_uniform() {
        let cfg = toy_cfg();
        let mut rng = crate::rng::substream(cfg.seed, "train-scramble");
        let p_max = 13usize;
        let mut counts = vec![0u64; p_max + 1];
        let n = 100_000u64;
        for _ in 0..n {
            counts[rng.gen_range(1..=p_max)] += 1;
        }
        let expect = n as f64 / p_max as f64;
        let sigma = (expect * (1.0 - 1.0 / p_max as f64)).sqrt();
        for p in 1..=p_max {
            assert!(
                (counts[p] as f64 - expect).abs() < 3.0 * sigma,
                "p={p} count {} outside 3 sigma of {expect}",
                counts[p]
            );
        }
    }

    #[test]
    fn davi_refresh_is_withheld_while_loss_is_high() {
        let mut cfg = toy_cfg();
        cfg.mode = TrainMode::OneStepDavi;
        cfg.episodes = 600;
        cfg.davi = DaviConfig {
            batch_size: 50,
            check_interval: 1,
            // Impossible threshold: no refresh may ever happen.
            loss_threshold: 0.0,
        };
        let mut net = new_net(&cfg);
        let report = train(&mut net, &cfg, None).unwrap();
        assert_eq!(report.frozen_refreshes, 0);
        assert_eq!(report.episodes_done, 600);
        assert!(report.updates > 0);

        // Permissive threshold at every check: refreshes happen.
        cfg.davi.loss_threshold = f64::INFINITY;
        let mut net = new_net(&cfg);
        let report = train(&mut net, &cfg, None).unwrap();
        assert_eq!(report.frozen_refreshes, 600 / 50);
    }

    #[test]
    fn davi_first_batch_learns_terminal_targets() {
        // On a zero network, the target of any 1-twist state is c + r_pos
        // (the solved child dominates).
        let mut cfg = toy_cfg();
        cfg.mode = TrainMode::OneStepDavi;
        cfg.p_max = 1;
        cfg.episodes = 30;
        cfg.davi.batch_size = 30;
        let mut net = new_net(&cfg);
        train(&mut net, &cfg, None).unwrap();
        // All 1-twist states were pushed toward 0.9; with α=0.25 and
        // repeat visits the value is strictly positive.
        let s = CubeState::solved(CubeVariant::Pocket2).twist(Face::U, 1);
        assert!(net.raw_value(&s) > 0.0);
    }
}
