//! Derived transformation tables, built once per cube size at first use.
//!
//! All permutations are stored as fixed 48-entry arrays; the 2x2x2 uses the
//! first 24 entries and pads the rest with the identity so composition is
//! uniform across cube sizes.

use std::sync::OnceLock;

use super::consts::*;
use super::{Action, CubeVariant, Face, Metric};

/// Array width of every permutation table (3x3x3 sticker count).
pub const MAX_STICKERS: usize = 48;

/// Number of whole-cube rotations / color transformations.
pub const N_ROTATIONS: usize = 24;

/// A sticker permutation together with its inverse.
///
/// Applying a transform `T` to a state moves the sticker currently at
/// location `i` to location `T.forward[i]`; the sticker that ends up at
/// location `i` came from `T.inverse[i]`.
#[derive(Clone, PartialEq, Eq)]
pub struct Transform {
    pub forward: [u8; MAX_STICKERS],
    pub inverse: [u8; MAX_STICKERS],
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Transform{:?}", &self.forward[..])
    }
}

impl Transform {
    pub fn identity() -> Self {
        let mut forward = [0u8; MAX_STICKERS];
        for (i, v) in forward.iter_mut().enumerate() {
            *v = i as u8;
        }
        Transform {
            forward,
            inverse: forward,
        }
    }

    /// Build from a forward permutation, computing the inverse.
    pub fn from_forward(forward: [u8; MAX_STICKERS]) -> Self {
        let mut inverse = [0u8; MAX_STICKERS];
        for (i, &v) in forward.iter().enumerate() {
            inverse[v as usize] = i as u8;
        }
        Transform { forward, inverse }
    }

    /// The composite "first `self`, then `next`".
    pub fn then(&self, next: &Transform) -> Transform {
        let mut forward = [0u8; MAX_STICKERS];
        let mut inverse = [0u8; MAX_STICKERS];
        for i in 0..MAX_STICKERS {
            forward[i] = next.forward[self.forward[i] as usize];
            inverse[i] = self.inverse[next.inverse[i] as usize];
        }
        Transform { forward, inverse }
    }

    pub fn inverted(&self) -> Transform {
        Transform {
            forward: self.inverse,
            inverse: self.forward,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &v)| v as usize == i)
    }
}

/// Everything derived for one cube size.
pub struct CubeTables {
    pub variant: CubeVariant,
    /// 24 for the 2x2x2, 48 for the 3x3x3.
    pub n_stickers: usize,
    /// Movable stickers per face: 4 or 8.
    pub per_face: usize,
    /// Home coloring: sticker `i` has color `i / per_face`.
    pub solved_fcol: [u8; MAX_STICKERS],
    /// `twists[face][power - 1]` for power 1..=3 (quarter, half, counter).
    pub twists: [[Transform; 3]; 6],
    /// The full rotation group. Key `4 * row + p` applies one of the six
    /// axis rotations {id, f, f2, f', l, l'} followed by p quarter turns
    /// of the whole cube around the up-down axis.
    pub wcr: [Transform; N_ROTATIONS],
    /// Key of the inverse rotation: `wcr[wcr_inv_key[k]] == wcr[k]^-1`.
    pub wcr_inv_key: [u8; N_ROTATIONS],
    /// Color renaming of each rotation: a cube whose whole-cube rotation by
    /// key `k` looks like the home coloring with colors renamed by
    /// `color_maps[k]` (old color `x` becomes `color_maps[k][x]`).
    pub color_maps: [[u8; 6]; N_ROTATIONS],
    /// Corner cubies: sticker locations with face index 1, 2, 3.
    pub corners: [[u8; 3]; 8],
    /// Edge cubies (empty for the 2x2x2): locations with face index 1, 2.
    pub edges: &'static [[u8; 2]],
    /// Location -> corner cubie letter 0..8, or 255 for non-corner stickers.
    pub corner_letter: [u8; MAX_STICKERS],
    /// Location -> face index 1..=3 within its corner cubie, or 0.
    pub corner_faceid: [u8; MAX_STICKERS],
    /// Location -> edge cubie letter 0..12, or 255.
    pub edge_letter: [u8; MAX_STICKERS],
    /// Location -> face index 1..=2 within its edge cubie, or 0.
    pub edge_faceid: [u8; MAX_STICKERS],
    /// Clockwise-next sticker location on the same corner cubie (255 for
    /// non-corner locations).
    pub rnext: [u8; MAX_STICKERS],
    /// The other sticker location of the same edge cubie (255 if none).
    pub eother: [u8; MAX_STICKERS],
    /// Surface adjacency rows, padded with [`ADJ_NONE`].
    pub surface_adj: [[u8; 4]; MAX_STICKERS],
    /// All corner sticker locations (for reconstruction scans).
    pub corner_locs: Vec<u8>,
    /// All edge sticker locations (empty for the 2x2x2).
    pub edge_locs: Vec<u8>,
    /// One sticker per corner cubie (face index 1), used both as the
    /// tracked set during state reconstruction and, in board encodings, as
    /// the stickers whose whereabouts are observed.
    pub tracked_corners: [u8; 8],
    /// One sticker per edge cubie used during state reconstruction
    /// (a historically fixed mix of face-1 and face-2 stickers).
    pub reconstruct_edges: &'static [u8],
    /// One sticker per edge cubie (face index 1), used by board encodings.
    pub tracked_edges: Vec<u8>,
    /// Faces that may be twisted. The 2x2x2 twists only up, left and front,
    /// which keeps the down-back-right cubie in place so every reachable
    /// state is its own normal form.
    pub twistable_faces: &'static [Face],
    actions_htm: Vec<Action>,
    actions_qtm: Vec<Action>,
}

/// Stickers used to anchor 2x2x2 normalization: the home locations of the
/// down-back-right cubie and their home colors (yellow, green, red).
pub const POCKET_ANCHOR_LOCS: [usize; 3] = [12, 16, 20];
pub const POCKET_ANCHOR_COLORS: [u8; 3] = [3, 4, 5];

/// One sticker per 3x3x3 edge cubie, in the fixed order used by state
/// reconstruction.
const RUBIKS_RECONSTRUCT_EDGES: [u8; 12] = [1, 3, 5, 7, 25, 27, 29, 31, 11, 15, 21, 33];

fn widen24(t: &[u8; 24]) -> [u8; MAX_STICKERS] {
    let mut out = [0u8; MAX_STICKERS];
    for (i, v) in out.iter_mut().enumerate() {
        *v = i as u8;
    }
    out[..24].copy_from_slice(t);
    out
}

fn widen_adj(rows: &[[u8; 4]; 24]) -> [[u8; 4]; MAX_STICKERS] {
    let mut out = [[ADJ_NONE; 4]; MAX_STICKERS];
    out[..24].copy_from_slice(rows);
    out
}

impl CubeTables {
    fn build(variant: CubeVariant) -> CubeTables {
        let (n_stickers, per_face, u_fwd, wcr_u_fwd, wcr_f_fwd, surface_adj) = match variant {
            CubeVariant::Pocket2 => (
                24,
                4,
                widen24(&POCKET_U),
                widen24(&POCKET_WCR_U),
                widen24(&POCKET_WCR_F),
                widen_adj(&POCKET_SURFACE_ADJ),
            ),
            CubeVariant::Rubiks3 => (
                48,
                8,
                RUBIKS_U,
                RUBIKS_WCR_U,
                RUBIKS_WCR_F,
                RUBIKS_SURFACE_ADJ,
            ),
        };

        let mut solved_fcol = [0u8; MAX_STICKERS];
        for (i, v) in solved_fcol.iter_mut().enumerate().take(n_stickers) {
            *v = (i / per_face) as u8;
        }

        let twist_u = Transform::from_forward(u_fwd);
        let rot_u = Transform::from_forward(wcr_u_fwd);
        let rot_f = Transform::from_forward(wcr_f_fwd);
        // Rotation that brings the left face up: first undo f, turn the top
        // away, then redo f.
        let rot_l = rot_f.inverted().then(&rot_u).then(&rot_f);

        // The 24 rotations: six choices of which face points up, times four
        // turns around the vertical axis.
        let rows = [
            Transform::identity(),
            rot_f.clone(),
            rot_f.then(&rot_f),
            rot_f.inverted(),
            rot_l.clone(),
            rot_l.inverted(),
        ];
        let mut u_pow = Vec::with_capacity(4);
        u_pow.push(Transform::identity());
        for p in 1..4 {
            let prev: &Transform = &u_pow[p - 1];
            u_pow.push(prev.then(&rot_u));
        }
        let wcr: [Transform; N_ROTATIONS] = std::array::from_fn(|k| {
            let (row, p) = (k / 4, k % 4);
            rows[row].then(&u_pow[p])
        });

        let mut wcr_inv_key = [0u8; N_ROTATIONS];
        for (k, t) in wcr.iter().enumerate() {
            let inv = t.inverted();
            let j = wcr
                .iter()
                .position(|c| *c == inv)
                .expect("rotation group is closed under inversion");
            wcr_inv_key[k] = j as u8;
        }

        // Rotating the home cube by k and reading the color now shown at
        // each face's home location yields the color renaming of k.
        let mut color_maps = [[0u8; 6]; N_ROTATIONS];
        for (k, t) in wcr.iter().enumerate() {
            for x in 0..6 {
                color_maps[k][x] = solved_fcol[t.inverse[per_face * x] as usize];
            }
        }

        // Each remaining face twist is the up twist conjugated by the
        // rotation that brings that face up (innermost transform first).
        let conj = |pre: &Transform| pre.then(&twist_u).then(&pre.inverted());
        let rot_f2 = rot_f.then(&rot_f);
        let base: [Transform; 6] = [
            twist_u.clone(),                // U
            conj(&rot_f.inverted()),        // L: first f', then U, then f
            conj(&rot_l),                   // F
            conj(&rot_f2),                  // D (f2 is its own inverse)
            conj(&rot_f),                   // R
            conj(&rot_l.inverted()),        // B
        ];
        let twists: [[Transform; 3]; 6] = std::array::from_fn(|f| {
            let t = &base[f];
            let t2 = t.then(t);
            let t3 = t2.then(t);
            [t.clone(), t2, t3]
        });

        let corners = match variant {
            CubeVariant::Pocket2 => POCKET_CORNERS,
            CubeVariant::Rubiks3 => RUBIKS_CORNERS,
        };
        let edges: &'static [[u8; 2]] = match variant {
            CubeVariant::Pocket2 => &[],
            CubeVariant::Rubiks3 => &RUBIKS_EDGES,
        };

        let mut corner_letter = [255u8; MAX_STICKERS];
        let mut corner_faceid = [0u8; MAX_STICKERS];
        let mut tracked_corners = [0u8; 8];
        for (letter, triple) in corners.iter().enumerate() {
            for (fid, &loc) in triple.iter().enumerate() {
                corner_letter[loc as usize] = letter as u8;
                corner_faceid[loc as usize] = (fid + 1) as u8;
            }
            tracked_corners[letter] = triple[0];
        }

        // Clockwise-next map around each corner cubie (viewed from outside
        // the cube). Cubie a is seeded from its known winding — its three
        // face-index stickers run counter-clockwise, so clockwise is the
        // reversed cycle — and the rest follows by symmetry: rigid
        // rotations preserve clockwise order, so the map must commute with
        // every whole-cube rotation. The face-index winding of the other
        // cubies is *not* assumed (one of them winds the opposite way).
        let mut rnext = [255u8; MAX_STICKERS];
        let a = corners[0];
        rnext[a[0] as usize] = a[2];
        rnext[a[2] as usize] = a[1];
        rnext[a[1] as usize] = a[0];
        loop {
            let mut changed = false;
            for l in 0..n_stickers {
                if rnext[l] == 255 {
                    continue;
                }
                for w in wcr.iter() {
                    let ml = w.forward[l] as usize;
                    let mr = w.forward[rnext[l] as usize];
                    if rnext[ml] == 255 {
                        rnext[ml] = mr;
                        changed = true;
                    } else {
                        assert_eq!(
                            rnext[ml], mr,
                            "clockwise-next map inconsistent under rotation"
                        );
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for (l, &letter) in corner_letter.iter().enumerate().take(n_stickers) {
            if letter != 255 {
                assert_ne!(rnext[l], 255, "clockwise-next undefined at location {l}");
                assert_eq!(
                    corner_letter[rnext[l] as usize], letter,
                    "clockwise-next leaves the cubie at location {l}"
                );
            }
        }

        let mut edge_letter = [255u8; MAX_STICKERS];
        let mut edge_faceid = [0u8; MAX_STICKERS];
        let mut eother = [255u8; MAX_STICKERS];
        let mut tracked_edges = Vec::with_capacity(edges.len());
        for (letter, pair) in edges.iter().enumerate() {
            for (fid, &loc) in pair.iter().enumerate() {
                edge_letter[loc as usize] = letter as u8;
                edge_faceid[loc as usize] = (fid + 1) as u8;
            }
            eother[pair[0] as usize] = pair[1];
            eother[pair[1] as usize] = pair[0];
            tracked_edges.push(pair[0]);
        }

        let corner_locs: Vec<u8> = (0..n_stickers as u8)
            .filter(|&l| corner_letter[l as usize] != 255)
            .collect();
        let edge_locs: Vec<u8> = (0..n_stickers as u8)
            .filter(|&l| edge_letter[l as usize] != 255)
            .collect();

        let twistable_faces: &'static [Face] = match variant {
            CubeVariant::Pocket2 => &[Face::U, Face::L, Face::F],
            CubeVariant::Rubiks3 => &[Face::U, Face::L, Face::F, Face::D, Face::R, Face::B],
        };
        let mut actions_htm = Vec::new();
        let mut actions_qtm = Vec::new();
        for &face in twistable_faces {
            for power in 1..=3u8 {
                actions_htm.push(Action { face, power });
                if power != 2 {
                    actions_qtm.push(Action { face, power });
                }
            }
        }

        let reconstruct_edges: &'static [u8] = match variant {
            CubeVariant::Pocket2 => &[],
            CubeVariant::Rubiks3 => &RUBIKS_RECONSTRUCT_EDGES,
        };

        CubeTables {
            variant,
            n_stickers,
            per_face,
            solved_fcol,
            twists,
            wcr,
            wcr_inv_key,
            color_maps,
            corners,
            edges,
            corner_letter,
            corner_faceid,
            edge_letter,
            edge_faceid,
            rnext,
            eother,
            surface_adj,
            corner_locs,
            edge_locs,
            tracked_corners,
            reconstruct_edges,
            tracked_edges,
            twistable_faces,
            actions_htm,
            actions_qtm,
        }
    }

    /// The actions available under a move metric, in a fixed order
    /// (faces in U, L, F, D, R, B order; powers ascending).
    pub fn actions(&self, metric: Metric) -> &[Action] {
        match metric {
            Metric::Htm => &self.actions_htm,
            Metric::Qtm => &self.actions_qtm,
        }
    }

    pub fn twist(&self, face: Face, power: u8) -> &Transform {
        &self.twists[face as usize][(power - 1) as usize]
    }
}

/// Shared tables for a cube size.
pub fn tables(variant: CubeVariant) -> &'static CubeTables {
    static POCKET: OnceLock<CubeTables> = OnceLock::new();
    static RUBIKS: OnceLock<CubeTables> = OnceLock::new();
    match variant {
        CubeVariant::Pocket2 => POCKET.get_or_init(|| CubeTables::build(CubeVariant::Pocket2)),
        CubeVariant::Rubiks3 => RUBIKS.get_or_init(|| CubeTables::build(CubeVariant::Rubiks3)),
    }
}
