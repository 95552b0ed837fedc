//! N-tuple value network with TD(0) updates and temporal coherence.
//!
//! The value of a state is the sum, over all n-tuples, of one looked-up
//! table entry per tuple (a linear network over sparse binary features; no
//! output squashing). Training nudges the active entries toward a target
//! value; temporal coherence learning (TCL) gives every table entry its
//! own adaptive learning-rate factor derived from the history of its
//! weight changes.

use rand::Rng;

use crate::board::{board_spec, BoardSpec, NTupleDef, Repr};
use crate::cube::tables::MAX_STICKERS;
use crate::cube::{draw_symmetry_keys, CubeState, CubeVariant, Metric};

/// What the TCL counters accumulate on each weight change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TclAccumulation {
    /// The recommended weight change `α·δ` (before the per-weight factor).
    RecWeightChange,
    /// The raw error signal `δ`.
    Delta,
}

/// Transfer function turning the coherence ratio `|N|/A` into the
/// per-weight learning-rate factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TclTransfer {
    /// Standard TCL: the ratio itself.
    Id,
    /// Exponential squashing `g(x) = exp(β·(x − 1))`.
    Exp,
}

/// Learning configuration carried by the network (and reused by the
/// training loops).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetConfig {
    /// Global learning rate α.
    pub alpha: f64,
    /// Discount factor γ.
    pub gamma: f64,
    /// ε-greedy exploration rate during training (0 disables).
    pub epsilon: f64,
    /// Negative cost-to-go `c` added to every successor value.
    pub cost: f64,
    /// Positive reward for reaching the solved cube.
    pub r_pos: f64,
    /// Whether temporal coherence learning is active.
    pub tcl_enabled: bool,
    /// Initial seed of both TCL counters (keeps α_i = 1 at the start).
    pub tc_init: f64,
    pub tcl_accumulation: TclAccumulation,
    pub tcl_transfer: TclTransfer,
    /// β of the exponential transfer (unused by `TclTransfer::Id`).
    pub tcl_beta: f64,
    /// Number of symmetric states per value/update (0 or 1 = none).
    pub n_sym: usize,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            alpha: 0.25,
            gamma: 1.0,
            epsilon: 0.0,
            cost: -0.1,
            r_pos: 1.0,
            tcl_enabled: true,
            tc_init: 1e-4,
            tcl_accumulation: TclAccumulation::RecWeightChange,
            tcl_transfer: TclTransfer::Id,
            tcl_beta: 2.0,
            n_sym: 0,
        }
    }
}

/// The n-tuple value network for one cube variant / metric / board layout.
pub struct NTupleNet {
    pub variant: CubeVariant,
    pub metric: Metric,
    pub repr: Repr,
    pub config: NetConfig,
    pub tuples: Vec<NTupleDef>,
    /// One dense table per tuple, all entries starting at zero.
    pub weights: Vec<Vec<f64>>,
    /// TCL counters: signed sum of changes per weight (empty when TCL off).
    pub n_acc: Vec<Vec<f64>>,
    /// TCL counters: sum of absolute changes per weight.
    pub a_acc: Vec<Vec<f64>>,
    /// Run seed the tuples/training were created from.
    pub seed: u64,
    /// Number of training episodes performed on these weights.
    pub episodes_trained: u64,
}

impl std::fmt::Debug for NTupleNet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NTupleNet")
            .field("variant", &self.variant)
            .field("metric", &self.metric)
            .field("repr", &self.repr)
            .field("tuples", &self.tuples.len())
            .field("total_weights", &self.total_weights())
            .field("episodes_trained", &self.episodes_trained)
            .finish_non_exhaustive()
    }
}

impl NTupleNet {
    pub fn new(
        variant: CubeVariant,
        metric: Metric,
        repr: Repr,
        tuples: Vec<NTupleDef>,
        config: NetConfig,
        seed: u64,
    ) -> NTupleNet {
        let weights: Vec<Vec<f64>> = tuples.iter().map(|t| vec![0.0; t.lut_size]).collect();
        let (n_acc, a_acc) = if config.tcl_enabled {
            (
                tuples
                    .iter()
                    .map(|t| vec![config.tc_init; t.lut_size])
                    .collect(),
                tuples
                    .iter()
                    .map(|t| vec![config.tc_init; t.lut_size])
                    .collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        NTupleNet {
            variant,
            metric,
            repr,
            config,
            tuples,
            weights,
            n_acc,
            a_acc,
            seed,
            episodes_trained: 0,
        }
    }

    pub fn board_spec(&self) -> &'static BoardSpec {
        board_spec(self.variant, self.repr)
    }

    pub fn total_weights(&self) -> usize {
        self.tuples.iter().map(|t| t.lut_size).sum()
    }

    /// The sparse feature support of a board vector: one active
    /// lookup-table entry per tuple.
    pub fn active_indices(&self, board: &[u8]) -> Vec<(usize, usize)> {
        assert_eq!(board.len(), self.board_spec().n_cells, "board size mismatch");
        self.tuples
            .iter()
            .enumerate()
            .map(|(t, def)| (t, def.index(board)))
            .collect()
    }

    /// Network value of an encoded board.
    pub fn value_board(&self, board: &[u8]) -> f64 {
        self.tuples
            .iter()
            .zip(&self.weights)
            .map(|(def, w)| w[def.index(board)])
            .sum()
    }

    fn encode<'a>(&self, state: &CubeState, buf: &'a mut [u8; MAX_STICKERS]) -> &'a [u8] {
        let spec = self.board_spec();
        let cells = &mut buf[..spec.n_cells];
        spec.encode_into(state, cells);
        cells
    }

    /// Plain network value of a state (no symmetry averaging).
    pub fn raw_value(&self, state: &CubeState) -> f64 {
        let mut buf = [0u8; MAX_STICKERS];
        self.value_board(self.encode(state, &mut buf))
    }

    /// Symmetry-averaged value over the states selected by `keys`
    /// (color-transformation keys; key 0 is the state itself).
    pub fn sym_value_with_keys(&self, state: &CubeState, keys: &[u8]) -> f64 {
        if keys.len() <= 1 {
            return self.raw_value(state);
        }
        // Shifted mean: exact when all symmetric values coincide (e.g. the
        // solved cube, whose 24 images are the same state).
        let v0 = self.raw_value(state);
        let mut shifted = 0.0;
        for &k in keys {
            if k == 0 {
                continue;
            }
            shifted += self.raw_value(&state.color_transform(k as usize)) - v0;
        }
        v0 + shifted / keys.len() as f64
    }

    /// Symmetry-averaged value with a fresh draw of `n_sym` keys.
    pub fn sym_value<R: Rng + ?Sized>(&self, state: &CubeState, n_sym: usize, rng: &mut R) -> f64 {
        self.sym_value_with_keys(state, &draw_symmetry_keys(n_sym, rng))
    }

    /// One-step lookahead value of a successor state: cost-to-go plus the
    /// positive reward if solved, else the (discounted) network estimate.
    pub fn lookahead_value(&self, successor: &CubeState, keys: &[u8]) -> f64 {
        let c = &self.config;
        if successor.is_solved() {
            c.cost + c.r_pos
        } else {
            c.cost + c.gamma * self.sym_value_with_keys(successor, keys)
        }
    }

    /// Per-weight learning-rate factor α_i from the current counters.
    #[inline]
    fn tcl_alpha(&self, t: usize, i: usize) -> f64 {
        if !self.config.tcl_enabled {
            return 1.0;
        }
        let a = self.a_acc[t][i];
        if a == 0.0 {
            return 1.0;
        }
        let ratio = self.n_acc[t][i].abs() / a;
        match self.config.tcl_transfer {
            TclTransfer::Id => ratio,
            TclTransfer::Exp => (self.config.tcl_beta * (ratio - 1.0)).exp(),
        }
    }

    /// Accumulate one weight change into the TCL counters.
    #[inline]
    pub fn tcl_accumulate(&mut self, t: usize, i: usize, delta_theta: f64) {
        self.n_acc[t][i] += delta_theta;
        self.a_acc[t][i] += delta_theta.abs();
    }

    /// TD(0) update of one state toward `target`, with the symmetric
    /// states selected by `keys` sharing the same error signal.
    ///
    /// The error is δ = target − V(s) where V is the symmetry-averaged
    /// value over `keys`. The update moves each selected state's value a
    /// fraction α toward the target (`V ← V + α·δ`): since the value is
    /// the sum of one entry per tuple, the recommended change of every
    /// active entry is `α·δ/m` for `m` tuples. With TCL on, each entry's
    /// change is further scaled by its own factor α_i, read before the
    /// counters absorb this step's change.
    ///
    /// Returns δ.
    pub fn td_update_with_keys(&mut self, state: &CubeState, target: f64, keys: &[u8]) -> f64 {
        let delta = target - self.sym_value_with_keys(state, keys);
        let alpha_per = self.config.alpha / self.tuples.len() as f64;
        let mut buf = [0u8; MAX_STICKERS];
        for &k in keys {
            let sym_state;
            let s = if k == 0 {
                state
            } else {
                sym_state = state.color_transform(k as usize);
                &sym_state
            };
            self.encode(s, &mut buf);
            let spec_cells = self.board_spec().n_cells;
            let board = &buf[..spec_cells];
            for t in 0..self.tuples.len() {
                let i = self.tuples[t].index(board);
                let a_i = self.tcl_alpha(t, i);
                self.weights[t][i] += alpha_per * a_i * delta;
                if self.config.tcl_enabled {
                    let acc = match self.config.tcl_accumulation {
                        TclAccumulation::RecWeightChange => alpha_per * delta,
                        TclAccumulation::Delta => delta,
                    };
                    self.tcl_accumulate(t, i, acc);
                }
            }
        }
        delta
    }

    /// TD(0) update with a fresh symmetry-key draw from `rng`.
    pub fn td_update<R: Rng + ?Sized>(
        &mut self,
        state: &CubeState,
        target: f64,
        rng: &mut R,
    ) -> f64 {
        let keys = draw_symmetry_keys(self.config.n_sym, rng);
        self.td_update_with_keys(state, target, &keys)
    }
}
