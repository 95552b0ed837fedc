//! Base permutation tables and cubie geometry for both cube sizes.
//!
//! Only three permutations per cube size are stored: the quarter-turn twist
//! of the up face (`*_U`) and the two generating whole-cube rotations
//! (`*_WCR_U` around the up-down axis and `*_WCR_F` around the front-back
//! axis). Everything else — the other five face twists, half and
//! counter-clockwise turns, the full 24-element rotation group and the 24
//! color transformations — is derived from these by composition in
//! [`super::tables`].
//!
//! Sticker numbering: faces are ordered up, left, front, down, right, back
//! with home colors white, blue, orange, yellow, green, red (0..=5). The
//! 2x2x2 has 4 stickers per face (sticker `i` lives on face `i / 4`); the
//! 3x3x3 numbers only the 48 movable stickers, 8 per face (`i / 8`),
//! clockwise around each face's fixed center.

/// 2x2x2 up-face quarter twist (clockwise seen from above).
pub const POCKET_U: [u8; 24] = [
    1, 2, 3, 0, 11, 8, 6, 7, 18, 9, 10, 17, 12, 13, 14, 15, 16, 22, 23, 19, 20, 21, 4, 5,
];

/// 2x2x2 whole-cube rotation around the up-down axis (same sense as `U`).
pub const POCKET_WCR_U: [u8; 24] = [
    1, 2, 3, 0, 11, 8, 9, 10, 18, 19, 16, 17, 15, 12, 13, 14, 21, 22, 23, 20, 6, 7, 4, 5,
];

/// 2x2x2 whole-cube rotation around the front-back axis (clockwise seen
/// from the front).
pub const POCKET_WCR_F: [u8; 24] = [
    7, 4, 5, 6, 14, 15, 12, 13, 9, 10, 11, 8, 17, 18, 19, 16, 2, 3, 0, 1, 23, 20, 21, 22,
];

/// 3x3x3 up-face quarter twist.
pub const RUBIKS_U: [u8; 48] = [
    2, 3, 4, 5, 6, 7, 0, 1, 22, 23, 16, 11, 12, 13, 14, 15, 36, 17, 18, 19, 20, 21, 34, 35, 24,
    25, 26, 27, 28, 29, 30, 31, 32, 33, 44, 45, 46, 37, 38, 39, 40, 41, 42, 43, 8, 9, 10, 47,
];

/// 3x3x3 whole-cube rotation around the up-down axis.
pub const RUBIKS_WCR_U: [u8; 48] = [
    2, 3, 4, 5, 6, 7, 0, 1, 22, 23, 16, 17, 18, 19, 20, 21, 36, 37, 38, 39, 32, 33, 34, 35, 30,
    31, 24, 25, 26, 27, 28, 29, 42, 43, 44, 45, 46, 47, 40, 41, 12, 13, 14, 15, 8, 9, 10, 11,
];

/// 3x3x3 whole-cube rotation around the front-back axis.
pub const RUBIKS_WCR_F: [u8; 48] = [
    14, 15, 8, 9, 10, 11, 12, 13, 28, 29, 30, 31, 24, 25, 26, 27, 18, 19, 20, 21, 22, 23, 16, 17,
    34, 35, 36, 37, 38, 39, 32, 33, 4, 5, 6, 7, 0, 1, 2, 3, 46, 47, 40, 41, 42, 43, 44, 45,
];

/// Padding value for adjacency rows shorter than the row width.
pub const ADJ_NONE: u8 = 255;

/// 2x2x2 surface adjacency: for each location, the locations whose stickers
/// touch it edge-to-edge on the cube surface (every sticker has exactly 4).
pub const POCKET_SURFACE_ADJ: [[u8; 4]; 24] = [
    [1, 3, 4, 8],
    [0, 2, 11, 18],
    [1, 3, 17, 23],
    [0, 2, 5, 22],
    [0, 5, 7, 8],
    [3, 4, 6, 22],
    [5, 7, 15, 21],
    [4, 6, 9, 14],
    [0, 4, 9, 11],
    [7, 8, 10, 14],
    [9, 11, 13, 19],
    [1, 8, 10, 18],
    [13, 15, 16, 20],
    [10, 12, 14, 19],
    [7, 9, 13, 15],
    [6, 12, 14, 21],
    [12, 17, 19, 20],
    [2, 16, 18, 23],
    [1, 11, 17, 19],
    [10, 13, 16, 18],
    [12, 16, 21, 23],
    [6, 15, 20, 22],
    [3, 5, 21, 23],
    [2, 17, 20, 22],
];

/// 3x3x3 surface adjacency (centers excluded). Corner stickers have 4
/// neighbours, edge stickers 3; short rows are padded with [`ADJ_NONE`].
pub const RUBIKS_SURFACE_ADJ: [[u8; 4]; 48] = [
    [1, 7, 8, 16],
    [0, 2, 23, ADJ_NONE],
    [1, 3, 22, 36],
    [2, 4, 35, ADJ_NONE],
    [3, 5, 34, 46],
    [4, 6, 45, ADJ_NONE],
    [5, 7, 10, 44],
    [0, 6, 9, ADJ_NONE],
    [0, 9, 15, 16],
    [7, 8, 10, ADJ_NONE],
    [6, 9, 11, 44],
    [10, 12, 43, ADJ_NONE],
    [11, 13, 30, 42],
    [12, 14, 29, ADJ_NONE],
    [13, 15, 18, 28],
    [8, 14, 17, ADJ_NONE],
    [0, 8, 17, 23],
    [15, 16, 18, ADJ_NONE],
    [14, 17, 19, 28],
    [18, 20, 27, ADJ_NONE],
    [19, 21, 26, 38],
    [20, 22, 37, ADJ_NONE],
    [2, 21, 23, 36],
    [1, 16, 22, ADJ_NONE],
    [25, 31, 32, 40],
    [24, 26, 39, ADJ_NONE],
    [20, 25, 27, 38],
    [19, 26, 28, ADJ_NONE],
    [14, 18, 27, 29],
    [13, 28, 30, ADJ_NONE],
    [12, 29, 31, 42],
    [24, 30, 41, ADJ_NONE],
    [24, 33, 39, 40],
    [32, 34, 47, ADJ_NONE],
    [4, 33, 35, 46],
    [3, 34, 36, ADJ_NONE],
    [2, 22, 35, 37],
    [21, 36, 38, ADJ_NONE],
    [20, 26, 37, 39],
    [25, 32, 38, ADJ_NONE],
    [24, 32, 41, 47],
    [31, 40, 42, ADJ_NONE],
    [12, 30, 41, 43],
    [11, 42, 44, ADJ_NONE],
    [6, 10, 43, 45],
    [5, 44, 46, ADJ_NONE],
    [4, 34, 45, 47],
    [33, 40, 46, ADJ_NONE],
];

/// 2x2x2 corner cubies: for each of the eight corners (letters a..h) the
/// sticker locations with face index 1, 2, 3. Face-index order winds
/// counter-clockwise around every cubie except e, whose printed numbering
/// winds the other way; the geometric clockwise-next map is derived in
/// [`super::tables`] rather than read from these triples.
pub const POCKET_CORNERS: [[u8; 3]; 8] = [
    [0, 4, 8],
    [1, 11, 18],
    [2, 17, 23],
    [3, 22, 5],
    [12, 16, 20],
    [13, 19, 10],
    [14, 9, 7],
    [15, 6, 21],
];

/// 3x3x3 corner cubies (letters a..h), face index 1..=3 per column.
pub const RUBIKS_CORNERS: [[u8; 3]; 8] = [
    [0, 8, 16],
    [2, 22, 36],
    [4, 34, 46],
    [6, 44, 10],
    [24, 32, 40],
    [26, 38, 20],
    [28, 18, 14],
    [30, 12, 42],
];

/// 3x3x3 edge cubies (letters A..L), face index 1..=2 per column. Face
/// index 1 is the up/down sticker for top- and bottom-layer edges and the
/// front/back sticker for middle-layer edges.
pub const RUBIKS_EDGES: [[u8; 2]; 12] = [
    [1, 23],
    [3, 35],
    [5, 45],
    [7, 9],
    [17, 15],
    [21, 37],
    [43, 11],
    [47, 33],
    [25, 39],
    [27, 19],
    [29, 13],
    [31, 41],
];
