//! Training configuration as a (de)serializable key-value file, plus the
//! named presets for the standard agents.

use serde::{Deserialize, Serialize};

use tdcube_core::board::Repr;
use tdcube_core::net::{NetConfig, TclAccumulation, TclTransfer};
use tdcube_core::trainer::{DaviConfig, TrainConfig, TrainMode};
use tdcube_core::{CubeVariant, Metric};

use crate::CliError;

/// Flat, file-friendly view of a training run. All keys are optional in
/// TOML (defaults below); unknown keys are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainFileConfig {
    pub name: String,
    pub variant: String,
    pub metric: String,
    pub representation: String,
    pub n_tuples: usize,
    pub tuple_len: usize,
    pub p_max: usize,
    pub e_train: usize,
    pub episodes: u64,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub cost: f64,
    pub r_pos: f64,
    pub tcl: bool,
    pub tc_init: f64,
    pub tcl_accumulation: String,
    pub tcl_transfer: String,
    pub tcl_beta: f64,
    pub n_sym: usize,
    pub mode: String,
    pub davi_batch: usize,
    pub davi_check_interval: u64,
    pub davi_loss_threshold: f64,
    pub eval_every: u64,
    pub eval_cubes: usize,
    pub eval_e: usize,
    pub log_every: u64,
    pub max_table_bytes: u64,
}

impl Default for TrainFileConfig {
    fn default() -> Self {
        TrainFileConfig {
            name: "custom".into(),
            variant: "pocket2".into(),
            metric: "qtm".into(),
            representation: "sticker2".into(),
            n_tuples: 60,
            tuple_len: 7,
            p_max: 16,
            e_train: 20,
            episodes: 3_000_000,
            alpha: 0.25,
            gamma: 1.0,
            epsilon: 0.0,
            cost: -0.1,
            r_pos: 1.0,
            tcl: true,
            tc_init: 1e-4,
            tcl_accumulation: "rec-weight-change".into(),
            tcl_transfer: "id".into(),
            tcl_beta: 2.0,
            n_sym: 0,
            mode: "full-episode".into(),
            davi_batch: 100,
            davi_check_interval: 100,
            davi_loss_threshold: 0.05,
            eval_every: 0,
            eval_cubes: 200,
            eval_e: 50,
            log_every: 0,
            max_table_bytes: 3_500_000_000,
        }
    }
}

impl TrainFileConfig {
    /// Resolve into the trainer's config (seed filled in by the caller).
    pub fn to_train_config(&self, seed: u64) -> Result<TrainConfig, CliError> {
        let variant: CubeVariant = self
            .variant
            .parse()
            .map_err(|_| CliError::Data(format!("unknown cube variant '{}'", self.variant)))?;
        let metric: Metric = self
            .metric
            .parse()
            .map_err(|_| CliError::Data(format!("unknown metric '{}'", self.metric)))?;
        let repr: Repr = self
            .representation
            .parse()
            .map_err(|e: String| CliError::Data(e))?;
        let tcl_accumulation = match self.tcl_accumulation.as_str() {
            "rec-weight-change" => TclAccumulation::RecWeightChange,
            "delta" => TclAccumulation::Delta,
            other => {
                return Err(CliError::Data(format!(
                    "unknown tcl_accumulation '{other}' (use rec-weight-change or delta)"
                )))
            }
        };
        let tcl_transfer = match self.tcl_transfer.as_str() {
            "id" => TclTransfer::Id,
            "exp" => TclTransfer::Exp,
            other => {
                return Err(CliError::Data(format!(
                    "unknown tcl_transfer '{other}' (use id or exp)"
                )))
            }
        };
        let mode = match self.mode.as_str() {
            "full-episode" => TrainMode::FullEpisode,
            "one-step-davi" => TrainMode::OneStepDavi,
            other => {
                return Err(CliError::Data(format!(
                    "unknown mode '{other}' (use full-episode or one-step-davi)"
                )))
            }
        };
        let cfg = TrainConfig {
            variant,
            metric,
            repr,
            n_tuples: self.n_tuples,
            tuple_len: self.tuple_len,
            p_max: self.p_max,
            episodes: self.episodes,
            e_train: self.e_train,
            net: NetConfig {
                alpha: self.alpha,
                gamma: self.gamma,
                epsilon: self.epsilon,
                cost: self.cost,
                r_pos: self.r_pos,
                tcl_enabled: self.tcl,
                tc_init: self.tc_init,
                tcl_accumulation,
                tcl_transfer,
                tcl_beta: self.tcl_beta,
                n_sym: self.n_sym,
            },
            seed,
            mode,
            davi: DaviConfig {
                batch_size: self.davi_batch,
                check_interval: self.davi_check_interval,
                loss_threshold: self.davi_loss_threshold,
            },
            eval_every: self.eval_every,
            eval_cubes: self.eval_cubes,
            eval_e: self.eval_e,
            log_every: self.log_every,
            max_table_bytes: self.max_table_bytes,
        };
        cfg.validate().map_err(CliError::Usage)?;
        Ok(cfg)
    }
}

/// The named presets: one per standard agent configuration.
pub fn preset(name: &str) -> Option<TrainFileConfig> {
    let base = TrainFileConfig::default();
    let canonical = canonical_name(name)?;
    let cfg = match canonical {
        "pocket2-htm" => TrainFileConfig {
            name: "pocket2-htm".into(),
            variant: "pocket2".into(),
            metric: "htm".into(),
            n_tuples: 60,
            p_max: 13,
            e_train: 16,
            ..base
        },
        "pocket2-qtm" => TrainFileConfig {
            name: "pocket2-qtm".into(),
            variant: "pocket2".into(),
            metric: "qtm".into(),
            n_tuples: 60,
            p_max: 16,
            e_train: 20,
            ..base
        },
        "rubiks3-htm" => TrainFileConfig {
            name: "rubiks3-htm".into(),
            variant: "rubiks3".into(),
            metric: "htm".into(),
            n_tuples: 120,
            p_max: 9,
            e_train: 13,
            ..base
        },
        "rubiks3-qtm" => TrainFileConfig {
            name: "rubiks3-qtm".into(),
            variant: "rubiks3".into(),
            metric: "qtm".into(),
            n_tuples: 120,
            p_max: 13,
            e_train: 16,
            ..base
        },
        "rubiks3-qtm-nsym8" | "rubiks3-qtm-nsym16" | "rubiks3-qtm-nsym24" => {
            let n_sym = canonical.rsplit("nsym").next().unwrap().parse().unwrap();
            TrainFileConfig {
                name: canonical.into(),
                variant: "rubiks3".into(),
                metric: "qtm".into(),
                n_tuples: 120,
                p_max: 13,
                e_train: 16,
                n_sym,
                ..base
            }
        }
        _ => return None,
    };
    Some(cfg)
}

/// Resolve a preset name or one of its historical aliases.
fn canonical_name(name: &str) -> Option<&'static str> {
    let lower = name.to_ascii_lowercase();
    let stripped = lower.trim_end_matches("-stub");
    Some(match stripped {
        "pocket2-htm" | "2x2x2-htm" | "tcl4-p13-et16-3000k-60-7t" => "pocket2-htm",
        "pocket2-qtm" | "2x2x2-qtm" | "tcl4-p16-et20-3000k-60-7t" => "pocket2-qtm",
        "rubiks3-htm" | "3x3x3-htm" | "tcl4-p9-et13-3000k-120-7t" => "rubiks3-htm",
        "rubiks3-qtm" | "3x3x3-qtm" | "tcl4-p13-et16-3000k-120-7t" => "rubiks3-qtm",
        "rubiks3-qtm-nsym8" | "3x3x3-qtm-nsym8" | "tcl4-p13-et16-3000k-120-7t-nsym08" => {
            "rubiks3-qtm-nsym8"
        }
        "rubiks3-qtm-nsym16" | "3x3x3-qtm-nsym16" | "tcl4-p13-et16-3000k-120-7t-nsym16" => {
            "rubiks3-qtm-nsym16"
        }
        "rubiks3-qtm-nsym24" | "3x3x3-qtm-nsym24" | "tcl4-p13-et16-3000k-120-7t-nsym24" => {
            "rubiks3-qtm-nsym24"
        }
        _ => return None,
    })
}

pub const PRESET_NAMES: &[&str] = &[
    "pocket2-htm",
    "pocket2-qtm",
    "rubiks3-htm",
    "rubiks3-qtm",
    "rubiks3-qtm-nsym8",
    "rubiks3-qtm-nsym16",
    "rubiks3-qtm-nsym24",
];
