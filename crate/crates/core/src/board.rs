//! Board encodings of cube states and n-tuple definitions over them.
//!
//! A board encoding turns a state into a short vector of cells, each cell
//! taking one of a fixed number of position values. N-tuples are small
//! sets of board cells generated by random walk over a cell adjacency
//! structure; each n-tuple indexes a lookup table by the mixed-radix
//! number formed from its cells' values.

use std::sync::OnceLock;

use rand::Rng;

use crate::cube::consts::ADJ_NONE;
use crate::cube::tables::tables;
use crate::cube::{CubeState, CubeVariant};

/// How a cube state is laid out as a board vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Repr {
    /// One cell per sticker location carrying its color (6 values each).
    /// Cells are adjacent when the stickers share an edge on the cube.
    CubeState,
    /// One cell pair (cubie letter, face ID) per tracked sticker. The
    /// 2x2x2 board has 7 letter cells (7 values: the movable cubies) and
    /// 7 face-ID cells (3 values). The 3x3x3 board has 8 corner-letter
    /// cells (8 values), 8 corner-face-ID cells (3 values), 12
    /// edge-letter cells (12 values) and 12 edge-face-ID cells (2
    /// values). Corner cells and edge cells form separate adjacency
    /// cliques.
    Sticker2,
}

impl Repr {
    pub fn name(self) -> &'static str {
        match self {
            Repr::CubeState => "cubestate",
            Repr::Sticker2 => "sticker2",
        }
    }
}

impl std::fmt::Display for Repr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Repr {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cubestate" => Ok(Repr::CubeState),
            "sticker2" => Ok(Repr::Sticker2),
            _ => Err(format!(
                "cannot parse `{s}` as a representation (expected `cubestate` or `sticker2`)"
            )),
        }
    }
}

/// Static description of one board layout: cell count, position values per
/// cell and the adjacency used by random-walk n-tuple creation.
pub struct BoardSpec {
    pub variant: CubeVariant,
    pub repr: Repr,
    pub n_cells: usize,
    /// Number of position values of each cell.
    pub positions: Vec<u8>,
    /// Neighbor cells of each cell.
    pub adjacency: Vec<Vec<u8>>,
}

impl BoardSpec {
    fn build(variant: CubeVariant, repr: Repr) -> BoardSpec {
        let t = tables(variant);
        match repr {
            Repr::CubeState => {
                let n_cells = t.n_stickers;
                let positions = vec![6u8; n_cells];
                let adjacency = (0..n_cells)
                    .map(|k| {
                        t.surface_adj[k]
                            .iter()
                            .copied()
                            .filter(|&x| x != ADJ_NONE)
                            .collect()
                    })
                    .collect();
                BoardSpec {
                    variant,
                    repr,
                    n_cells,
                    positions,
                    adjacency,
                }
            }
            Repr::Sticker2 => {
                let (letters, faceids, subsets): (Vec<u8>, Vec<u8>, Vec<(usize, usize)>) =
                    match variant {
                        // 7 movable cubies (the down-back-right cubie is
                        // fixed); one adjacency clique over all 14 cells.
                        CubeVariant::Pocket2 => (vec![7; 7], vec![3; 7], vec![(0, 14)]),
                        // 8 corner + 12 edge cubies; corner cells and edge
                        // cells form separate cliques.
                        CubeVariant::Rubiks3 => (
                            [vec![8u8; 8], vec![12u8; 12]].concat(),
                            [vec![3u8; 8], vec![2u8; 12]].concat(),
                            vec![(0, 16), (16, 40)],
                        ),
                    };
                // Cells are laid out letters-then-face-IDs per cubie kind:
                // corner letters, corner face IDs, edge letters, edge
                // face IDs.
                let mut positions = Vec::new();
                let half = letters.len().min(8);
                positions.extend_from_slice(&letters[..half]);
                positions.extend_from_slice(&faceids[..half]);
                positions.extend_from_slice(&letters[half..]);
                positions.extend_from_slice(&faceids[half..]);
                let n_cells = positions.len();
                let mut adjacency = vec![Vec::new(); n_cells];
                for &(lo, hi) in &subsets {
                    for k in lo..hi {
                        adjacency[k] =
                            (lo..hi).filter(|&j| j != k).map(|j| j as u8).collect();
                    }
                }
                BoardSpec {
                    variant,
                    repr,
                    n_cells,
                    positions,
                    adjacency,
                }
            }
        }
    }

    /// Total number of board combinations (product of position counts).
    pub fn capacity(&self) -> f64 {
        self.positions.iter().map(|&p| p as f64).product()
    }

    /// Encode a state into `out` (length `n_cells`).
    pub fn encode_into(&self, state: &CubeState, out: &mut [u8]) {
        debug_assert_eq!(out.len(), self.n_cells);
        debug_assert_eq!(state.variant(), self.variant);
        let t = tables(self.variant);
        match self.repr {
            Repr::CubeState => out.copy_from_slice(state.fcol()),
            Repr::Sticker2 => {
                let sloc = state.sloc();
                match self.variant {
                    CubeVariant::Pocket2 => {
                        // Tracked stickers: one per movable cubie, skipping
                        // the fixed cubie e (letter index 4).
                        let mut j = 0;
                        for (letter, &s) in t.tracked_corners.iter().enumerate() {
                            if letter == 4 {
                                continue;
                            }
                            let loc = sloc[s as usize] as usize;
                            let l = t.corner_letter[loc];
                            assert_ne!(
                                l, 4,
                                "movable sticker on the fixed cubie: state not in normal form"
                            );
                            out[j] = if l < 4 { l } else { l - 1 };
                            out[7 + j] = t.corner_faceid[loc] - 1;
                            j += 1;
                        }
                    }
                    CubeVariant::Rubiks3 => {
                        for (j, &s) in t.tracked_corners.iter().enumerate() {
                            let loc = sloc[s as usize] as usize;
                            out[j] = t.corner_letter[loc];
                            out[8 + j] = t.corner_faceid[loc] - 1;
                        }
                        for (j, &s) in t.tracked_edges.iter().enumerate() {
                            let loc = sloc[s as usize] as usize;
                            out[16 + j] = t.edge_letter[loc];
                            out[28 + j] = t.edge_faceid[loc] - 1;
                        }
                    }
                }
            }
        }
    }

    pub fn encode(&self, state: &CubeState) -> Vec<u8> {
        let mut out = vec![0u8; self.n_cells];
        self.encode_into(state, &mut out);
        out
    }
}

/// Shared board description for a (cube size, representation) pair.
pub fn board_spec(variant: CubeVariant, repr: Repr) -> &'static BoardSpec {
    static SPECS: OnceLock<[BoardSpec; 4]> = OnceLock::new();
    let specs = SPECS.get_or_init(|| {
        [
            BoardSpec::build(CubeVariant::Pocket2, Repr::CubeState),
            BoardSpec::build(CubeVariant::Pocket2, Repr::Sticker2),
            BoardSpec::build(CubeVariant::Rubiks3, Repr::CubeState),
            BoardSpec::build(CubeVariant::Rubiks3, Repr::Sticker2),
        ]
    });
    let idx = match (variant, repr) {
        (CubeVariant::Pocket2, Repr::CubeState) => 0,
        (CubeVariant::Pocket2, Repr::Sticker2) => 1,
        (CubeVariant::Rubiks3, Repr::CubeState) => 2,
        (CubeVariant::Rubiks3, Repr::Sticker2) => 3,
    };
    &specs[idx]
}

/// One n-tuple: an ordered set of distinct board cells plus the derived
/// mixed-radix layout of its lookup table.
#[derive(Clone, Debug, PartialEq)]
pub struct NTupleDef {
    pub cells: Vec<u8>,
    /// Position-value count of each cell, in `cells` order.
    pub radices: Vec<u8>,
    /// Mixed-radix strides: the first cell is most significant, the last
    /// has stride 1.
    pub strides: Vec<u64>,
    /// Product of the radices; number of lookup-table entries.
    pub lut_size: usize,
}

impl NTupleDef {
    pub fn new(spec: &BoardSpec, cells: Vec<u8>) -> NTupleDef {
        assert!(!cells.is_empty());
        let radices: Vec<u8> = cells.iter().map(|&c| spec.positions[c as usize]).collect();
        let mut strides = vec![1u64; cells.len()];
        for i in (0..cells.len() - 1).rev() {
            strides[i] = strides[i + 1] * radices[i + 1] as u64;
        }
        let lut_size = (strides[0] * radices[0] as u64) as usize;
        NTupleDef {
            cells,
            radices,
            strides,
            lut_size,
        }
    }

    /// Lookup-table index of a board vector.
    #[inline]
    pub fn index(&self, board: &[u8]) -> usize {
        let mut idx = 0u64;
        for (i, &c) in self.cells.iter().enumerate() {
            debug_assert!(board[c as usize] < self.radices[i]);
            idx += board[c as usize] as u64 * self.strides[i];
        }
        idx as usize
    }
}

/// Generate `count` n-tuples of `len` distinct cells each by random walk:
/// the first cell is uniform over the board, every further cell is drawn
/// uniformly from the unused neighbors of the cells placed so far, so each
/// cell is adjacent to at least one other cell of the tuple.
pub fn random_walk_ntuples<R: Rng + ?Sized>(
    spec: &BoardSpec,
    count: usize,
    len: usize,
    rng: &mut R,
) -> Vec<NTupleDef> {
    assert!(len >= 1 && len <= spec.n_cells);
    let mut tuples = Vec::with_capacity(count);
    while tuples.len() < count {
        let mut in_tuple = vec![false; spec.n_cells];
        let mut cells: Vec<u8> = Vec::with_capacity(len);
        let start = rng.gen_range(0..spec.n_cells) as u8;
        cells.push(start);
        in_tuple[start as usize] = true;
        while cells.len() < len {
            let mut frontier: Vec<u8> = Vec::new();
            for &c in &cells {
                for &nb in &spec.adjacency[c as usize] {
                    if !in_tuple[nb as usize] && !frontier.contains(&nb) {
                        frontier.push(nb);
                    }
                }
            }
            if frontier.is_empty() {
                break; // isolated region smaller than `len`; retry
            }
            let next = frontier[rng.gen_range(0..frontier.len())];
            cells.push(next);
            in_tuple[next as usize] = true;
        }
        if cells.len() == len {
            tuples.push(NTupleDef::new(spec, cells));
        }
    }
    tuples
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{CubeState, CubeVariant, Face};

    #[test]
    fn board_sizes_and_capacities() {
        let p_cs = board_spec(CubeVariant::Pocket2, Repr::CubeState);
        let p_s2 = board_spec(CubeVariant::Pocket2, Repr::Sticker2);
        let r_cs = board_spec(CubeVariant::Rubiks3, Repr::CubeState);
        let r_s2 = board_spec(CubeVariant::Rubiks3, Repr::Sticker2);
        assert_eq!(p_cs.n_cells, 24);
        assert_eq!(p_s2.n_cells, 14);
        assert_eq!(r_cs.n_cells, 48);
        assert_eq!(r_s2.n_cells, 40);
        // Exact count for the 2x2x2: 7^7 * 3^7 = 1,801,088,541.
        let exact = 7u64.pow(7) * 3u64.pow(7);
        assert_eq!(exact, 1_801_088_541);
        assert_eq!(p_s2.capacity(), exact as f64);
        // 3x3x3: 8^8 * 3^8 * 12^12 * 2^12 ~= 4.0e27.
        let cap = r_s2.capacity();
        assert!((cap / 4.0e27 - 1.0).abs() < 0.01, "capacity {cap:e}");
        assert_eq!(p_cs.capacity(), 6f64.powi(24));
        assert_eq!(r_cs.capacity(), 6f64.powi(48));
    }

    #[test]
    fn solved_and_twisted_boards() {
        let p_s2 = board_spec(CubeVariant::Pocket2, Repr::Sticker2);
        let solved = CubeState::solved(CubeVariant::Pocket2);
        assert_eq!(
            p_s2.encode(&solved),
            [0, 1, 2, 3, 4, 5, 6, 0, 0, 0, 0, 0, 0, 0]
        );
        let after_u = solved.twist(Face::U, 1);
        assert_eq!(
            p_s2.encode(&after_u),
            [1, 2, 3, 0, 4, 5, 6, 0, 0, 0, 0, 0, 0, 0]
        );

        let r_s2 = board_spec(CubeVariant::Rubiks3, Repr::Sticker2);
        let solved3 = CubeState::solved(CubeVariant::Rubiks3);
        let mut expect: Vec<u8> = Vec::new();
        expect.extend(0..8);
        expect.extend([0u8; 8]);
        expect.extend(0..12);
        expect.extend([0u8; 12]);
        assert_eq!(r_s2.encode(&solved3), expect);
        let after_u3 = solved3.twist(Face::U, 1);
        let mut expect_u: Vec<u8> = vec![1, 2, 3, 0, 4, 5, 6, 7];
        expect_u.extend([0u8; 8]);
        expect_u.extend([1, 2, 3, 0, 4, 5, 6, 7, 8, 9, 10, 11]);
        expect_u.extend([0u8; 12]);
        assert_eq!(r_s2.encode(&after_u3), expect_u);

        let p_cs = board_spec(CubeVariant::Pocket2, Repr::CubeState);
        assert_eq!(p_cs.encode(&after_u), after_u.fcol());
    }

    #[test]
    fn tuple_indexing_is_mixed_radix_most_significant_first() {
        let spec = board_spec(CubeVariant::Pocket2, Repr::Sticker2);
        let t = NTupleDef::new(spec, vec![0, 1]);
        assert_eq!(t.radices, vec![7, 7]);
        assert_eq!(t.strides, vec![7, 1]);
        assert_eq!(t.lut_size, 49);
        let mut board = vec![0u8; spec.n_cells];
        board[0] = 0;
        board[1] = 1;
        assert_eq!(t.index(&board), 1);
        board[0] = 2;
        board[1] = 3;
        assert_eq!(t.index(&board), 2 * 7 + 3);
        // Mixed radices: letter cell then face-ID cell.
        let t2 = NTupleDef::new(spec, vec![0, 7]);
        assert_eq!(t2.radices, vec![7, 3]);
        assert_eq!(t2.strides, vec![3, 1]);
        assert_eq!(t2.lut_size, 21);
    }

    #[test]
    fn random_walk_tuples_are_connected_and_sized() {
        let mut rng = crate::rng::substream(3, "board-tests");
        for (variant, repr) in [
            (CubeVariant::Pocket2, Repr::CubeState),
            (CubeVariant::Pocket2, Repr::Sticker2),
            (CubeVariant::Rubiks3, Repr::CubeState),
            (CubeVariant::Rubiks3, Repr::Sticker2),
        ] {
            let spec = board_spec(variant, repr);
            let tuples = random_walk_ntuples(spec, 40, 7, &mut rng);
            assert_eq!(tuples.len(), 40);
            for t in &tuples {
                assert_eq!(t.cells.len(), 7);
                let mut sorted = t.cells.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), 7, "cells must be distinct");
                // Every cell is adjacent to at least one other tuple cell.
                for &c in &t.cells {
                    let ok = t.cells.iter().any(|&d| {
                        d != c && spec.adjacency[c as usize].contains(&d)
                    });
                    assert!(ok, "cell {c} isolated in tuple {:?}", t.cells);
                }
                assert_eq!(
                    t.lut_size,
                    t.radices.iter().map(|&r| r as usize).product::<usize>()
                );
            }
            // Sticker2 walk on the 3x3x3 stays within one clique.
            if repr == Repr::Sticker2 && variant == CubeVariant::Rubiks3 {
                for t in &tuples {
                    let corner = t.cells[0] < 16;
                    assert!(t.cells.iter().all(|&c| (c < 16) == corner));
                }
            }
        }
    }

    #[test]
    fn sticker2_feature_is_twist_invariantly_decodable() {
        // Round-trip sanity: two different scrambles rarely encode equal,
        // and equal states always encode equal.
        let mut rng = crate::rng::substream(4, "board-encode");
        let spec = board_spec(CubeVariant::Rubiks3, Repr::Sticker2);
        for _ in 0..50 {
            let (s, seq) = CubeState::scramble(
                CubeVariant::Rubiks3,
                crate::cube::Metric::Htm,
                10,
                &mut rng,
            );
            let replay = CubeState::solved(CubeVariant::Rubiks3).apply_all(&seq);
            assert_eq!(spec.encode(&s), spec.encode(&replay));
        }
    }
}
