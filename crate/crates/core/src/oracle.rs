//! Exact distance-to-solved tables for the 2x2x2 cube.
//!
//! A breadth-first search from the solved cube over normalized states
//! (fixed down-back-right cubie, twists of the U/L/F faces only) visits
//! the entire group — 3,674,160 states — and records the exact solving
//! distance of every state under the chosen move metric. States are keyed
//! by their sticker coloring packed 3 bits per sticker into a `u128`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::cube::tables::tables;
use crate::cube::{Action, CubeError, CubeState, CubeVariant, Metric};

/// Number of stickers on the 2x2x2.
const N: usize = 24;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a distance-table file (bad magic)")]
    BadMagic,
    #[error("unsupported distance-table version {0}")]
    UnsupportedVersion(u32),
    #[error("distance-table checksum mismatch (file corrupt or truncated)")]
    ChecksumMismatch,
    #[error("distance-table file corrupt: {0}")]
    Corrupt(&'static str),
    #[error("distance table only covers the 2x2x2 cube")]
    WrongVariant,
    #[error("state not in the table (invalid coloring)")]
    UnknownState,
    #[error("{0}")]
    Cube(#[from] CubeError),
}

/// Pack a 24-sticker coloring into a 72-bit key (sticker 0 in the low bits).
pub fn pack_fcol(fcol: &[u8]) -> u128 {
    debug_assert_eq!(fcol.len(), N);
    let mut key = 0u128;
    for i in (0..N).rev() {
        key = (key << 3) | fcol[i] as u128;
    }
    key
}

/// Unpack a 72-bit key back into a cube state (colors plus the sticker
/// locations reconstructed from them).
pub fn unpack_state(key: u128) -> Result<CubeState, CubeError> {
    let mut fcol = [0u8; N];
    let mut k = key;
    for c in fcol.iter_mut() {
        *c = (k & 7) as u8;
        k >>= 3;
    }
    if k != 0 {
        return Err(CubeError::InvalidColoring("key has bits beyond 24 stickers"));
    }
    CubeState::from_fcol(CubeVariant::Pocket2, &fcol)
}

/// Exact distance-to-solved for every normalized 2x2x2 state.
pub struct DistanceTable {
    metric: Metric,
    map: HashMap<u128, u8>,
    levels: Vec<u64>,
}

impl DistanceTable {
    /// Full breadth-first search from the solved cube.
    pub fn build(metric: Metric) -> DistanceTable {
        let t = tables(CubeVariant::Pocket2);
        let actions = t.actions(metric);
        // Successor permutations on colorings: fcol'[i] = fcol[inv[i]].
        let invs: Vec<[u8; N]> = actions
            .iter()
            .map(|a| {
                let tr = t.twist(a.face, a.power);
                let mut inv = [0u8; N];
                inv.copy_from_slice(&tr.inverse[..N]);
                inv
            })
            .collect();

        let solved = CubeState::solved(CubeVariant::Pocket2);
        debug_assert!(solved.is_normalized());
        let root = pack_fcol(solved.fcol());

        let mut map: HashMap<u128, u8> = HashMap::with_capacity(4_000_000);
        map.insert(root, 0);
        let mut levels: Vec<u64> = vec![1];
        let mut frontier: Vec<u128> = vec![root];
        let mut depth: u8 = 0;

        while !frontier.is_empty() {
            depth += 1;
            let mut next: Vec<u128> = Vec::with_capacity(frontier.len() * 2);
            let mut fcol = [0u8; N];
            let mut succ = [0u8; N];
            for &key in &frontier {
                let mut k = key;
                for c in fcol.iter_mut() {
                    *c = (k & 7) as u8;
                    k >>= 3;
                }
                for inv in &invs {
                    for i in 0..N {
                        succ[i] = fcol[inv[i] as usize];
                    }
                    let skey = pack_fcol(&succ);
                    if let std::collections::hash_map::Entry::Vacant(e) = map.entry(skey) {
                        e.insert(depth);
                        next.push(skey);
                    }
                }
            }
            if !next.is_empty() {
                levels.push(next.len() as u64);
            }
            frontier = next;
        }

        DistanceTable { metric, map, levels }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// Total number of states in the table.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Number of states at each exact distance, indexed by depth.
    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    /// Largest exact distance ("God's number" for this metric).
    pub fn max_depth(&self) -> u8 {
        (self.levels.len() - 1) as u8
    }

    /// Exact solving distance of any valid 2x2x2 state (the state is
    /// normalized internally, so un-normalized states are fine).
    pub fn exact_distance(&self, state: &CubeState) -> Result<u8, OracleError> {
        if state.variant() != CubeVariant::Pocket2 {
            return Err(OracleError::WrongVariant);
        }
        let norm = state.normalize()?;
        self.map
            .get(&pack_fcol(norm.fcol()))
            .copied()
            .ok_or(OracleError::UnknownState)
    }

    /// All packed keys whose exact distance is `d` (ascending key order).
    pub fn keys_at_depth(&self, d: u8) -> Vec<u128> {
        let mut keys: Vec<u128> = self
            .map
            .iter()
            .filter(|&(_, &dist)| dist == d)
            .map(|(&k, _)| k)
            .collect();
        keys.sort_unstable();
        keys
    }

    /// A shortest solution found by greedy distance descent.
    pub fn greedy_solve(&self, start: &CubeState) -> Result<Vec<Action>, OracleError> {
        let mut s = start.normalize()?;
        let d0 = self.exact_distance(&s)?;
        let actions = tables(CubeVariant::Pocket2).actions(self.metric);
        let mut moves = Vec::with_capacity(d0 as usize);
        let mut d = d0;
        while d > 0 {
            let mut advanced = false;
            for &a in actions {
                let nxt = s.apply(a);
                if self.exact_distance(&nxt)? == d - 1 {
                    moves.push(a);
                    s = nxt;
                    d -= 1;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "BFS table admits no descending move");
        }
        debug_assert!(s.is_solved());
        Ok(moves)
    }

    /// Check a solution trace: does it solve the cube, and does it do so
    /// in the minimum possible number of moves?
    pub fn audit_trace(
        &self,
        start: &CubeState,
        moves: &[Action],
    ) -> Result<TraceAudit, OracleError> {
        let optimal_len = self.exact_distance(start)?;
        let end = start.apply_all(moves);
        let solved = end.is_solved();
        Ok(TraceAudit {
            optimal_len,
            trace_len: moves.len(),
            solved,
            optimal: solved && moves.len() == optimal_len as usize,
        })
    }

    /// Write the table: a versioned header, then one 10-byte record per
    /// state (9-byte little-endian key, 1-byte distance) in ascending key
    /// order, then an FNV-1a checksum. Rebuilding and re-saving always
    /// produces byte-identical files.
    pub fn save(&self, path: &Path) -> Result<(), OracleError> {
        let mut keys: Vec<u128> = self.map.keys().copied().collect();
        keys.sort_unstable();
        let file = File::create(path)?;
        let mut w = BufWriter::with_capacity(1 << 20, file);
        let mut hash = Fnv1a::new();
        let mut put = |w: &mut BufWriter<File>, bytes: &[u8]| -> std::io::Result<()> {
            hash.update(bytes);
            w.write_all(bytes)
        };
        put(&mut w, MAGIC)?;
        put(&mut w, &VERSION.to_le_bytes())?;
        put(&mut w, &[metric_id(self.metric), self.max_depth()])?;
        put(&mut w, &(keys.len() as u64).to_le_bytes())?;
        for &key in &keys {
            let kb = key.to_le_bytes();
            put(&mut w, &kb[..9])?;
            put(&mut w, &[self.map[&key]])?;
        }
        let digest = hash.0;
        w.write_all(&digest.to_le_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Read a table saved by [`DistanceTable::save`].
    pub fn load(path: &Path) -> Result<DistanceTable, OracleError> {
        let file = File::open(path)?;
        let mut r = BufReader::with_capacity(1 << 20, file);
        let mut hash = Fnv1a::new();

        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| OracleError::BadMagic)?;
        if &magic != MAGIC {
            return Err(OracleError::BadMagic);
        }
        hash.update(&magic);

        let mut take = |r: &mut BufReader<File>, buf: &mut [u8]| -> Result<(), OracleError> {
            r.read_exact(buf).map_err(|e| {
                if e.kind() == std::io::ErrorKind::UnexpectedEof {
                    OracleError::ChecksumMismatch
                } else {
                    OracleError::Io(e)
                }
            })?;
            hash.update(buf);
            Ok(())
        };

        let mut b4 = [0u8; 4];
        take(&mut r, &mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != VERSION {
            return Err(OracleError::UnsupportedVersion(version));
        }
        let mut b2 = [0u8; 2];
        take(&mut r, &mut b2)?;
        let metric = match b2[0] {
            0 => Metric::Htm,
            1 => Metric::Qtm,
            _ => return Err(OracleError::Corrupt("unknown metric id")),
        };
        let max_depth = b2[1];
        let mut b8 = [0u8; 8];
        take(&mut r, &mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        if n == 0 || n > 100_000_000 {
            return Err(OracleError::Corrupt("implausible state count"));
        }

        let mut map = HashMap::with_capacity(n + n / 8);
        let mut levels = vec![0u64; max_depth as usize + 1];
        let mut prev: Option<u128> = None;
        let mut rec = [0u8; 10];
        for _ in 0..n {
            take(&mut r, &mut rec)?;
            let mut kb = [0u8; 16];
            kb[..9].copy_from_slice(&rec[..9]);
            let key = u128::from_le_bytes(kb);
            if let Some(p) = prev {
                if key <= p {
                    return Err(OracleError::Corrupt("keys not strictly ascending"));
                }
            }
            prev = Some(key);
            let dist = rec[9];
            if dist > max_depth {
                return Err(OracleError::Corrupt("distance exceeds stated maximum"));
            }
            levels[dist as usize] += 1;
            map.insert(key, dist);
        }
        if levels.iter().any(|&c| c == 0) {
            return Err(OracleError::Corrupt("empty distance level"));
        }

        let digest = hash.0;
        let mut tail = [0u8; 8];
        r.read_exact(&mut tail)
            .map_err(|_| OracleError::ChecksumMismatch)?;
        if u64::from_le_bytes(tail) != digest {
            return Err(OracleError::ChecksumMismatch);
        }
        let mut extra = [0u8; 1];
        match r.read(&mut extra) {
            Ok(0) => {}
            Ok(_) => return Err(OracleError::Corrupt("trailing bytes after checksum")),
            Err(e) => return Err(OracleError::Io(e)),
        }

        Ok(DistanceTable { metric, map, levels })
    }

    /// Write the level histogram as CSV (`depth,count` per line).
    pub fn write_levels_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "depth,count")?;
        for (d, c) in self.levels.iter().enumerate() {
            writeln!(w, "{d},{c}")?;
        }
        Ok(())
    }
}

/// Result of checking one solution trace against the exact distances.
#[derive(Clone, Copy, Debug)]
pub struct TraceAudit {
    pub optimal_len: u8,
    pub trace_len: usize,
    pub solved: bool,
    pub optimal: bool,
}

const MAGIC: &[u8; 8] = b"TDCORACL";
const VERSION: u32 = 1;

fn metric_id(metric: Metric) -> u8 {
    match metric {
        Metric::Htm => 0,
        Metric::Qtm => 1,
    }
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Fnv1a {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }
    fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}
