//! Binary save/load of trained agents.
//!
//! The file is a little-endian, versioned, self-describing container:
//!
//! ```text
//! magic        8 bytes  "TDCAGENT"
//! version      u32
//! variant      u8       0 = Pocket2, 1 = Rubiks3
//! metric       u8       0 = HTM, 1 = QTM
//! repr         u8       0 = CubeState, 1 = Sticker2
//! flags        u8       bit0 tcl_enabled, bit1 accumulation, bit2 transfer
//! alpha, gamma, epsilon, cost, r_pos, tc_init, tcl_beta   7 × f64
//! n_sym        u32
//! seed         u64      rng seed the agent was created from
//! episodes     u64      training episodes applied to the weights
//! n_tuples     u32
//! per tuple:   len u32, cells u8×len, radices u8×len
//! per tuple:   weights f64×lut_size
//! if TCL:      per tuple N f64×lut_size, then per tuple A f64×lut_size
//! checksum     u64      FNV-1a over every preceding byte
//! ```
//!
//! Floats round-trip bit-exactly via their IEEE-754 little-endian bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::board::{board_spec, NTupleDef, Repr};
use crate::cube::{CubeVariant, Metric};
use crate::net::{NTupleNet, NetConfig, TclAccumulation, TclTransfer};

const MAGIC: &[u8; 8] = b"TDCAGENT";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum AgentIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not an agent file (bad magic)")]
    BadMagic,
    #[error("unsupported agent file version {0}")]
    UnsupportedVersion(u32),
    #[error("agent file checksum mismatch (file corrupt or truncated)")]
    ChecksumMismatch,
    #[error("agent file corrupt: {0}")]
    Corrupt(&'static str),
    #[error("agent is for {found}, expected {expected}")]
    VariantMismatch {
        expected: CubeVariant,
        found: CubeVariant,
    },
}

/// Fail unless the agent was trained for the expected cube variant.
pub fn expect_variant(net: &NTupleNet, expected: CubeVariant) -> Result<(), AgentIoError> {
    if net.variant == expected {
        Ok(())
    } else {
        Err(AgentIoError::VariantMismatch {
            expected,
            found: net.variant,
        })
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

struct HashWriter<W: Write> {
    inner: W,
    hash: Fnv1a,
}

impl<W: Write> HashWriter<W> {
    fn new(inner: W) -> Self {
        HashWriter {
            inner,
            hash: Fnv1a::new(),
        }
    }
    fn put(&mut self, bytes: &[u8]) -> std::io::Result<()> {
        self.hash.update(bytes);
        self.inner.write_all(bytes)
    }
    fn put_u32(&mut self, v: u32) -> std::io::Result<()> {
        self.put(&v.to_le_bytes())
    }
    fn put_u64(&mut self, v: u64) -> std::io::Result<()> {
        self.put(&v.to_le_bytes())
    }
    fn put_f64(&mut self, v: f64) -> std::io::Result<()> {
        self.put(&v.to_le_bytes())
    }
    fn put_f64s(&mut self, vs: &[f64]) -> std::io::Result<()> {
        for &v in vs {
            self.put_f64(v)?;
        }
        Ok(())
    }
}

struct HashReader<R: Read> {
    inner: R,
    hash: Fnv1a,
}

impl<R: Read> HashReader<R> {
    fn new(inner: R) -> Self {
        HashReader {
            inner,
            hash: Fnv1a::new(),
        }
    }
    fn take(&mut self, buf: &mut [u8]) -> Result<(), AgentIoError> {
        self.inner.read_exact(buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                AgentIoError::ChecksumMismatch
            } else {
                AgentIoError::Io(e)
            }
        })?;
        self.hash.update(buf);
        Ok(())
    }
    fn take_u8(&mut self) -> Result<u8, AgentIoError> {
        let mut b = [0u8; 1];
        self.take(&mut b)?;
        Ok(b[0])
    }
    fn take_u32(&mut self) -> Result<u32, AgentIoError> {
        let mut b = [0u8; 4];
        self.take(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    fn take_u64(&mut self) -> Result<u64, AgentIoError> {
        let mut b = [0u8; 8];
        self.take(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }
    fn take_f64(&mut self) -> Result<f64, AgentIoError> {
        let mut b = [0u8; 8];
        self.take(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }
    fn take_f64s(&mut self, n: usize) -> Result<Vec<f64>, AgentIoError> {
        let mut out = vec![0.0f64; n];
        let mut b = [0u8; 8];
        for slot in out.iter_mut() {
            self.take(&mut b)?;
            *slot = f64::from_le_bytes(b);
        }
        Ok(out)
    }
}

pub fn save_agent(net: &NTupleNet, path: &Path) -> Result<(), AgentIoError> {
    let file = File::create(path)?;
    let mut w = HashWriter::new(BufWriter::with_capacity(1 << 20, file));
    w.put(MAGIC)?;
    w.put_u32(VERSION)?;
    let variant = match net.variant {
        CubeVariant::Pocket2 => 0u8,
        CubeVariant::Rubiks3 => 1u8,
    };
    let metric = match net.metric {
        Metric::Htm => 0u8,
        Metric::Qtm => 1u8,
    };
    let repr = match net.repr {
        Repr::CubeState => 0u8,
        Repr::Sticker2 => 1u8,
    };
    let c = &net.config;
    let mut flags = 0u8;
    if c.tcl_enabled {
        flags |= 1;
    }
    if c.tcl_accumulation == TclAccumulation::Delta {
        flags |= 2;
    }
    if c.tcl_transfer == TclTransfer::Exp {
        flags |= 4;
    }
    w.put(&[variant, metric, repr, flags])?;
    w.put_f64(c.alpha)?;
    w.put_f64(c.gamma)?;
    w.put_f64(c.epsilon)?;
    w.put_f64(c.cost)?;
    w.put_f64(c.r_pos)?;
    w.put_f64(c.tc_init)?;
    w.put_f64(c.tcl_beta)?;
    w.put_u32(c.n_sym as u32)?;
    w.put_u64(net.seed)?;
    w.put_u64(net.episodes_trained)?;
    w.put_u32(net.tuples.len() as u32)?;
    for t in &net.tuples {
        w.put_u32(t.cells.len() as u32)?;
        w.put(&t.cells)?;
        w.put(&t.radices)?;
    }
    for table in &net.weights {
        w.put_f64s(table)?;
    }
    if c.tcl_enabled {
        for table in &net.n_acc {
            w.put_f64s(table)?;
        }
        for table in &net.a_acc {
            w.put_f64s(table)?;
        }
    }
    let checksum = w.hash.0;
    w.inner.write_all(&checksum.to_le_bytes())?;
    w.inner.flush()?;
    Ok(())
}

pub fn load_agent(path: &Path) -> Result<NTupleNet, AgentIoError> {
    let file = File::open(path)?;
    let mut r = HashReader::new(BufReader::with_capacity(1 << 20, file));
    let mut magic = [0u8; 8];
    r.inner.read_exact(&mut magic).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            AgentIoError::BadMagic
        } else {
            AgentIoError::Io(e)
        }
    })?;
    if &magic != MAGIC {
        return Err(AgentIoError::BadMagic);
    }
    r.hash.update(&magic);
    let version = r.take_u32()?;
    if version != VERSION {
        return Err(AgentIoError::UnsupportedVersion(version));
    }
    let variant = match r.take_u8()? {
        0 => CubeVariant::Pocket2,
        1 => CubeVariant::Rubiks3,
        _ => return Err(AgentIoError::Corrupt("unknown cube variant id")),
    };
    let metric = match r.take_u8()? {
        0 => Metric::Htm,
        1 => Metric::Qtm,
        _ => return Err(AgentIoError::Corrupt("unknown metric id")),
    };
    let repr = match r.take_u8()? {
        0 => Repr::CubeState,
        1 => Repr::Sticker2,
        _ => return Err(AgentIoError::Corrupt("unknown representation id")),
    };
    let flags = r.take_u8()?;
    if flags & !0b111 != 0 {
        return Err(AgentIoError::Corrupt("unknown flag bits set"));
    }
    let config = NetConfig {
        alpha: r.take_f64()?,
        gamma: r.take_f64()?,
        epsilon: r.take_f64()?,
        cost: r.take_f64()?,
        r_pos: r.take_f64()?,
        tc_init: r.take_f64()?,
        tcl_beta: r.take_f64()?,
        tcl_enabled: flags & 1 != 0,
        tcl_accumulation: if flags & 2 != 0 {
            TclAccumulation::Delta
        } else {
            TclAccumulation::RecWeightChange
        },
        tcl_transfer: if flags & 4 != 0 {
            TclTransfer::Exp
        } else {
            TclTransfer::Id
        },
        n_sym: r.take_u32()? as usize,
    };
    let seed = r.take_u64()?;
    let episodes_trained = r.take_u64()?;
    let spec = board_spec(variant, repr);
    let n_tuples = r.take_u32()? as usize;
    if n_tuples > 1 << 20 {
        return Err(AgentIoError::Corrupt("implausible tuple count"));
    }
    let mut tuples = Vec::with_capacity(n_tuples);
    for _ in 0..n_tuples {
        let len = r.take_u32()? as usize;
        if len == 0 || len > spec.n_cells {
            return Err(AgentIoError::Corrupt("tuple length out of range"));
        }
        let mut cells = vec![0u8; len];
        r.take(&mut cells)?;
        if cells.iter().any(|&c| c as usize >= spec.n_cells) {
            return Err(AgentIoError::Corrupt("tuple cell out of range"));
        }
        let mut radices = vec![0u8; len];
        r.take(&mut radices)?;
        let def = NTupleDef::new(spec, cells);
        if def.radices != radices {
            return Err(AgentIoError::Corrupt(
                "stored radices disagree with the board layout",
            ));
        }
        tuples.push(def);
    }
    let mut weights = Vec::with_capacity(n_tuples);
    for t in &tuples {
        weights.push(r.take_f64s(t.lut_size)?);
    }
    let (mut n_acc, mut a_acc) = (Vec::new(), Vec::new());
    if config.tcl_enabled {
        for t in &tuples {
            n_acc.push(r.take_f64s(t.lut_size)?);
        }
        for t in &tuples {
            a_acc.push(r.take_f64s(t.lut_size)?);
        }
    }
    let computed = r.hash.0;
    let mut tail = [0u8; 8];
    r.inner
        .read_exact(&mut tail)
        .map_err(|_| AgentIoError::ChecksumMismatch)?;
    if u64::from_le_bytes(tail) != computed {
        return Err(AgentIoError::ChecksumMismatch);
    }
    // Trailing garbage after the checksum is also corruption.
    let mut extra = [0u8; 1];
    match r.inner.read(&mut extra) {
        Ok(0) => {}
        Ok(_) => return Err(AgentIoError::Corrupt("trailing bytes after checksum")),
        Err(e) => return Err(AgentIoError::Io(e)),
    }
    Ok(NTupleNet {
        variant,
        metric,
        repr,
        config,
        tuples,
        weights,
        n_acc,
        a_acc,
        seed,
        episodes_trained,
    })
}
