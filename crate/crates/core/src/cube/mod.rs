//! Cube representation and transformation algebra.
//!
//! A cube state is a pair of arrays: `fcol` gives the color currently shown
//! at each sticker location, and `sloc` gives the location where each
//! sticker of the home cube currently sits. The two views are kept
//! mutually consistent: reading `fcol` at `sloc[i]` always yields sticker
//! `i`'s home color.
//!
//! Locations are numbered face by face in the order up, left, front, down,
//! right, back with home colors white, blue, orange, yellow, green, red.
//! The 2x2x2 has 24 sticker locations; the 3x3x3 numbers its 48 movable
//! stickers and leaves the six fixed centers implicit.

pub mod consts;
pub mod tables;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::Rng;

use tables::{tables, CubeTables, Transform, MAX_STICKERS, N_ROTATIONS};
use tables::{POCKET_ANCHOR_COLORS, POCKET_ANCHOR_LOCS};

/// Single letter per color index 0..=5 (white, blue, orange, yellow,
/// green, red).
pub const COLOR_CHARS: [char; 6] = ['w', 'b', 'o', 'y', 'g', 'r'];

#[derive(Debug, thiserror::Error)]
pub enum CubeError {
    #[error("invalid cube coloring: {0}")]
    InvalidColoring(&'static str),
    #[error("state cannot be normalized: no rotation anchors the down-back-right cubie")]
    NotNormalizable,
    #[error("cannot parse `{0}` as a move (expected a face letter U/L/F/D/R/B, optionally followed by 2, 3 or ')")]
    BadAction(String),
    #[error("cannot parse `{0}` as a cube variant (expected `pocket2` or `rubiks3`)")]
    BadVariant(String),
    #[error("cannot parse `{0}` as a metric (expected `htm` or `qtm`)")]
    BadMetric(String),
}

/// Which puzzle is being played.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CubeVariant {
    /// The 2x2x2 pocket cube.
    Pocket2,
    /// The classic 3x3x3 cube.
    Rubiks3,
}

impl CubeVariant {
    pub fn n_stickers(self) -> usize {
        tables(self).n_stickers
    }

    pub fn name(self) -> &'static str {
        match self {
            CubeVariant::Pocket2 => "pocket2",
            CubeVariant::Rubiks3 => "rubiks3",
        }
    }
}

impl fmt::Display for CubeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CubeVariant {
    type Err = CubeError;
    fn from_str(s: &str) -> Result<Self, CubeError> {
        match s.to_ascii_lowercase().as_str() {
            "pocket2" | "2x2x2" | "2x2" | "pocket" => Ok(CubeVariant::Pocket2),
            "rubiks3" | "3x3x3" | "3x3" | "rubiks" => Ok(CubeVariant::Rubiks3),
            _ => Err(CubeError::BadVariant(s.to_string())),
        }
    }
}

/// Move metric: which twists count as one move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Half-turn metric: quarter and half twists each count as one move.
    Htm,
    /// Quarter-turn metric: only quarter twists are moves.
    Qtm,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Htm => "htm",
            Metric::Qtm => "qtm",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = CubeError;
    fn from_str(s: &str) -> Result<Self, CubeError> {
        match s.to_ascii_lowercase().as_str() {
            "htm" => Ok(Metric::Htm),
            "qtm" => Ok(Metric::Qtm),
            _ => Err(CubeError::BadMetric(s.to_string())),
        }
    }
}

/// A face of the cube, in home-color order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    U = 0,
    L = 1,
    F = 2,
    D = 3,
    R = 4,
    B = 5,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::U, Face::L, Face::F, Face::D, Face::R, Face::B];

    pub fn letter(self) -> char {
        b"ULFDRB"[self as usize] as char
    }

    pub fn from_letter(c: char) -> Option<Face> {
        let idx = b"ULFDRB"
            .iter()
            .position(|&b| b as char == c.to_ascii_uppercase())?;
        Some(Face::ALL[idx])
    }
}

/// One twist: a face and how far to turn it clockwise (1..=3 quarter
/// turns; 3 is the counter-clockwise quarter turn).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub face: Face,
    pub power: u8,
}

impl Action {
    pub fn new(face: Face, power: u8) -> Action {
        assert!((1..=3).contains(&power), "twist power must be 1..=3");
        Action { face, power }
    }

    /// The twist that undoes this one.
    pub fn inverse(self) -> Action {
        Action {
            face: self.face,
            power: 4 - self.power,
        }
    }

    /// Parse a whitespace-separated move sequence such as `"U L' F2"`.
    pub fn parse_sequence(s: &str) -> Result<Vec<Action>, CubeError> {
        s.split_whitespace().map(|tok| tok.parse()).collect()
    }

    /// Format a move sequence with single spaces.
    pub fn format_sequence(seq: &[Action]) -> String {
        seq.iter()
            .map(Action::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            1 => write!(f, "{}", self.face.letter()),
            2 => write!(f, "{}2", self.face.letter()),
            _ => write!(f, "{}'", self.face.letter()),
        }
    }
}

impl FromStr for Action {
    type Err = CubeError;
    fn from_str(s: &str) -> Result<Self, CubeError> {
        let mut chars = s.chars();
        let face = chars
            .next()
            .and_then(Face::from_letter)
            .ok_or_else(|| CubeError::BadAction(s.to_string()))?;
        let power = match chars.as_str() {
            "" | "1" => 1,
            "2" => 2,
            "3" | "'" => 3,
            _ => return Err(CubeError::BadAction(s.to_string())),
        };
        Ok(Action { face, power })
    }
}

/// A cube state: the coloring of every sticker location plus the location
/// of every home-cube sticker.
#[derive(Clone, Copy)]
pub struct CubeState {
    variant: CubeVariant,
    fcol: [u8; MAX_STICKERS],
    sloc: [u8; MAX_STICKERS],
}

impl PartialEq for CubeState {
    fn eq(&self, other: &Self) -> bool {
        self.variant == other.variant && self.fcol() == other.fcol()
    }
}
impl Eq for CubeState {}

impl Hash for CubeState {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.variant.hash(state);
        self.fcol().hash(state);
    }
}

impl fmt::Debug for CubeState {
    // Compact one-line form: colors grouped per face.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let per_face = self.tables().per_face;
        write!(f, "{}[", self.variant.name())?;
        for (i, &c) in self.fcol().iter().enumerate() {
            if i > 0 && i % per_face == 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", COLOR_CHARS[c as usize])?;
        }
        write!(f, "]")
    }
}

impl CubeState {
    /// The solved cube.
    pub fn solved(variant: CubeVariant) -> CubeState {
        let t = tables(variant);
        let mut sloc = [0u8; MAX_STICKERS];
        for (i, v) in sloc.iter_mut().enumerate().take(t.n_stickers) {
            *v = i as u8;
        }
        CubeState {
            variant,
            fcol: t.solved_fcol,
            sloc,
        }
    }

    pub fn variant(&self) -> CubeVariant {
        self.variant
    }

    pub fn tables(&self) -> &'static CubeTables {
        tables(self.variant)
    }

    /// Color shown at each sticker location.
    pub fn fcol(&self) -> &[u8] {
        &self.fcol[..self.tables().n_stickers]
    }

    /// Current location of each home-cube sticker.
    pub fn sloc(&self) -> &[u8] {
        &self.sloc[..self.tables().n_stickers]
    }

    pub fn is_solved(&self) -> bool {
        let t = self.tables();
        self.fcol[..t.n_stickers] == t.solved_fcol[..t.n_stickers]
    }

    /// Apply a sticker permutation: the sticker at location `i` moves to
    /// `t.forward[i]`.
    pub fn apply_transform(&self, t: &Transform) -> CubeState {
        let n = self.tables().n_stickers;
        let mut fcol = [0u8; MAX_STICKERS];
        let mut sloc = [0u8; MAX_STICKERS];
        for i in 0..n {
            fcol[i] = self.fcol[t.inverse[i] as usize];
            sloc[i] = t.forward[self.sloc[i] as usize];
        }
        CubeState {
            variant: self.variant,
            fcol,
            sloc,
        }
    }

    /// Twist `face` clockwise by `power` quarter turns.
    pub fn twist(&self, face: Face, power: u8) -> CubeState {
        self.apply_transform(self.tables().twist(face, power))
    }

    pub fn apply(&self, action: Action) -> CubeState {
        self.twist(action.face, action.power)
    }

    pub fn apply_all(&self, actions: &[Action]) -> CubeState {
        actions.iter().fold(*self, |s, &a| s.apply(a))
    }

    /// Whether the state is in normal form. 3x3x3 states always are (their
    /// centers pin the orientation); a 2x2x2 state is normal when its
    /// down-back-right cubie shows home colors at home locations.
    pub fn is_normalized(&self) -> bool {
        match self.variant {
            CubeVariant::Rubiks3 => true,
            CubeVariant::Pocket2 => POCKET_ANCHOR_LOCS
                .iter()
                .zip(POCKET_ANCHOR_COLORS)
                .all(|(&l, c)| self.fcol[l] == c),
        }
    }

    /// Rotate the whole cube into normal form. Fails only for colorings
    /// that contain no yellow-green-red cubie.
    pub fn normalize(&self) -> Result<CubeState, CubeError> {
        if self.is_normalized() {
            return Ok(*self);
        }
        let t = self.tables();
        for x in t.wcr.iter() {
            let anchored = POCKET_ANCHOR_LOCS
                .iter()
                .zip(POCKET_ANCHOR_COLORS)
                .all(|(&l, c)| self.fcol[x.inverse[l] as usize] == c);
            if anchored {
                return Ok(self.apply_transform(x));
            }
        }
        Err(CubeError::NotNormalizable)
    }

    /// The state with colors renamed by rotation key `key` (0..24), brought
    /// back to normal form. Key 0 is the identity. Twist distance is
    /// invariant under every key, which makes the 24 images of a state
    /// interchangeable for value learning.
    ///
    /// Panics on an out-of-range key; requires a valid cube state.
    pub fn color_transform(&self, key: usize) -> CubeState {
        assert!(key < N_ROTATIONS, "color transformation key must be 0..24");
        let t = self.tables();
        let c = &t.color_maps[key];
        let tr = &t.wcr[key];
        let n = t.n_stickers;
        let mut fcol = [0u8; MAX_STICKERS];
        let mut sloc = [0u8; MAX_STICKERS];
        match self.variant {
            CubeVariant::Pocket2 => {
                // Repaint every sticker in place, relabel which home
                // sticker is which, then rotate back to normal form.
                for i in 0..n {
                    fcol[i] = c[self.fcol[i] as usize];
                    sloc[i] = self.sloc[tr.forward[i] as usize];
                }
                let recolored = CubeState {
                    variant: self.variant,
                    fcol,
                    sloc,
                };
                recolored
                    .normalize()
                    .expect("recoloring a valid state keeps its anchor cubie")
            }
            CubeVariant::Rubiks3 => {
                // Conjugate by the rotation so the fixed centers stay home:
                // the result is already in normal form.
                for i in 0..n {
                    fcol[i] = c[self.fcol[tr.forward[i] as usize] as usize];
                    sloc[i] = tr.inverse[self.sloc[tr.forward[i] as usize] as usize];
                }
                CubeState {
                    variant: self.variant,
                    fcol,
                    sloc,
                }
            }
        }
    }

    /// How many distinct states the 24 color transformations produce.
    /// The solved cube yields 1; most scrambled states yield 24.
    pub fn count_distinct_symmetries(&self) -> usize {
        let mut seen: Vec<[u8; MAX_STICKERS]> = (0..N_ROTATIONS)
            .map(|k| self.color_transform(k).fcol)
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Rebuild the sticker-location array from a coloring alone by locating
    /// every cubie through its color combination. Fails if some cubie is
    /// missing or duplicated, or if the located stickers do not tile the
    /// cube.
    pub fn reconstruct_sloc(
        variant: CubeVariant,
        fcol: &[u8],
    ) -> Result<[u8; MAX_STICKERS], CubeError> {
        let t = tables(variant);
        if fcol.len() != t.n_stickers {
            return Err(CubeError::InvalidColoring("wrong number of stickers"));
        }
        let col = |s: u8| t.solved_fcol[s as usize];
        let mut sloc = [255u8; MAX_STICKERS];

        for &s in &t.tracked_corners {
            let s2 = t.rnext[s as usize];
            let s3 = t.rnext[s2 as usize];
            let mut found = None;
            for &l in &t.corner_locs {
                let l2 = t.rnext[l as usize];
                let l3 = t.rnext[l2 as usize];
                if fcol[l as usize] == col(s)
                    && fcol[l2 as usize] == col(s2)
                    && fcol[l3 as usize] == col(s3)
                {
                    if found.is_some() {
                        return Err(CubeError::InvalidColoring("corner cubie appears twice"));
                    }
                    found = Some((l, l2, l3));
                }
            }
            let (l, l2, l3) =
                found.ok_or(CubeError::InvalidColoring("corner cubie not found"))?;
            sloc[s as usize] = l;
            sloc[s2 as usize] = l2;
            sloc[s3 as usize] = l3;
        }

        for &s in t.reconstruct_edges {
            let s2 = t.eother[s as usize];
            let mut found = None;
            for &l in &t.edge_locs {
                let l2 = t.eother[l as usize];
                if fcol[l as usize] == col(s) && fcol[l2 as usize] == col(s2) {
                    if found.is_some() {
                        return Err(CubeError::InvalidColoring("edge cubie appears twice"));
                    }
                    found = Some((l, l2));
                }
            }
            let (l, l2) = found.ok_or(CubeError::InvalidColoring("edge cubie not found"))?;
            sloc[s as usize] = l;
            sloc[s2 as usize] = l2;
        }

        let mut seen = [false; MAX_STICKERS];
        for &l in sloc.iter().take(t.n_stickers) {
            if l == 255 || seen[l as usize] {
                return Err(CubeError::InvalidColoring(
                    "located stickers do not tile the cube",
                ));
            }
            seen[l as usize] = true;
        }
        Ok(sloc)
    }

    /// Build a state from a coloring, reconstructing sticker locations.
    pub fn from_fcol(variant: CubeVariant, fcol: &[u8]) -> Result<CubeState, CubeError> {
        let sloc = Self::reconstruct_sloc(variant, fcol)?;
        let mut full = [0u8; MAX_STICKERS];
        full[..fcol.len()].copy_from_slice(fcol);
        Ok(CubeState {
            variant,
            fcol: full,
            sloc,
        })
    }

    /// Scramble the solved cube with `p` random twists of the given
    /// metric, never twisting the same face twice in a row (consecutive
    /// same-face twists merge or cancel instead of scrambling further).
    /// Returns the state and the twist sequence.
    pub fn scramble<R: Rng + ?Sized>(
        variant: CubeVariant,
        metric: Metric,
        p: usize,
        rng: &mut R,
    ) -> (CubeState, Vec<Action>) {
        let actions = tables(variant).actions(metric);
        let mut state = CubeState::solved(variant);
        let mut seq: Vec<Action> = Vec::with_capacity(p);
        for _ in 0..p {
            let a = loop {
                let a = actions[rng.gen_range(0..actions.len())];
                match seq.last() {
                    Some(prev) if prev.face == a.face => continue,
                    _ => break a,
                }
            };
            state = state.apply(a);
            seq.push(a);
        }
        (state, seq)
    }

    /// Multi-line flattened drawing of the cube: the up face on top, the
    /// left/front/right/back band in the middle, the down face below. Each
    /// cell shows the color letter and the sticker location number.
    pub fn pretty(&self) -> String {
        match self.variant {
            CubeVariant::Pocket2 => self.pretty_grids(&POCKET_GRIDS, 2),
            CubeVariant::Rubiks3 => self.pretty_grids(&RUBIKS_GRIDS, 3),
        }
    }

    fn pretty_grids(&self, grids: &[Vec<Vec<Option<u8>>>; 6], dim: usize) -> String {
        let cell = |c: Option<u8>, face: usize| -> String {
            match c {
                Some(loc) => format!(
                    "{}{:<3}",
                    COLOR_CHARS[self.fcol[loc as usize] as usize],
                    loc
                ),
                None => format!("{}   ", COLOR_CHARS[face]),
            }
        };
        let face_rows = |f: usize| -> Vec<String> {
            grids[f]
                .iter()
                .map(|row| row.iter().map(|&c| cell(c, f)).collect::<String>())
                .collect()
        };
        let blank = " ".repeat(4 * dim);
        let mut out = String::new();
        for row in face_rows(Face::U as usize) {
            out.push_str(&blank);
            out.push(' ');
            out.push_str(row.trim_end());
            out.push('\n');
        }
        let bands: Vec<Vec<String>> = [Face::L, Face::F, Face::R, Face::B]
            .iter()
            .map(|&f| face_rows(f as usize))
            .collect();
        for r in 0..dim {
            let line: Vec<&str> = bands.iter().map(|b| b[r].as_str()).collect();
            out.push_str(line.join(" ").trim_end());
            out.push('\n');
        }
        for row in face_rows(Face::D as usize) {
            out.push_str(&blank);
            out.push(' ');
            out.push_str(row.trim_end());
            out.push('\n');
        }
        out
    }
}

/// Flattened-net cell layout per face (up, left, front, down, right, back):
/// which sticker location each drawn cell shows, `None` for fixed centers.
type FaceGrid = Vec<Vec<Option<u8>>>;

fn grid(rows: &[&[i16]]) -> FaceGrid {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|&v| if v < 0 { None } else { Some(v as u8) })
                .collect()
        })
        .collect()
}

static POCKET_GRIDS: std::sync::LazyLock<[FaceGrid; 6]> = std::sync::LazyLock::new(|| {
    [
        grid(&[&[3, 2], &[0, 1]]),     // U
        grid(&[&[5, 4], &[6, 7]]),     // L
        grid(&[&[8, 11], &[9, 10]]),   // F
        grid(&[&[14, 13], &[15, 12]]), // D
        grid(&[&[18, 17], &[19, 16]]), // R
        grid(&[&[23, 22], &[20, 21]]), // B
    ]
});

static RUBIKS_GRIDS: std::sync::LazyLock<[FaceGrid; 6]> = std::sync::LazyLock::new(|| {
    [
        grid(&[&[6, 5, 4], &[7, -1, 3], &[0, 1, 2]]),     // U
        grid(&[&[10, 9, 8], &[11, -1, 15], &[12, 13, 14]]), // L
        grid(&[&[16, 23, 22], &[17, -1, 21], &[18, 19, 20]]), // F
        grid(&[&[28, 27, 26], &[29, -1, 25], &[30, 31, 24]]), // D
        grid(&[&[36, 35, 34], &[37, -1, 33], &[38, 39, 32]]), // R
        grid(&[&[46, 45, 44], &[47, -1, 43], &[40, 41, 42]]), // B
    ]
});

/// Draw the color-transformation keys for one training or evaluation step:
/// always key 0 (identity) first, then `n_sym - 1` distinct random keys
/// from 1..24. `n_sym <= 1` yields just the identity.
pub fn draw_symmetry_keys<R: Rng + ?Sized>(n_sym: usize, rng: &mut R) -> Vec<u8> {
    let n = n_sym.min(N_ROTATIONS);
    if n <= 1 {
        return vec![0];
    }
    let mut keys = Vec::with_capacity(n);
    keys.push(0u8);
    let picked = rand::seq::index::sample(rng, N_ROTATIONS - 1, n - 1);
    keys.extend(picked.iter().map(|i| (i + 1) as u8));
    keys
}
