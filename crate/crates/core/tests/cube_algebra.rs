//! Pinned permutation tables and algebraic properties of the cube moves.
//!
//! The expected rows below were frozen from an independent 3-D geometric
//! model of both cubes (sticker coordinates rotated about the face axes),
//! so these tests guard the hand-derived composition conventions.

use rand::Rng;
use tdcube_core::cube::tables::{tables, Transform, N_ROTATIONS};
use tdcube_core::cube::{draw_symmetry_keys, COLOR_CHARS};
use tdcube_core::{Action, CubeState, CubeVariant, Face, Metric};

const POCKET_U_ROW: [u8; 24] = [
    1, 2, 3, 0, 11, 8, 6, 7, 18, 9, 10, 17, 12, 13, 14, 15, 16, 22, 23, 19, 20, 21, 4, 5,
];
const POCKET_L_ROW: [u8; 24] = [
    22, 1, 2, 21, 5, 6, 7, 4, 3, 0, 10, 11, 12, 13, 8, 9, 16, 17, 18, 19, 20, 14, 15, 23,
];
const POCKET_F_ROW: [u8; 24] = [
    7, 4, 2, 3, 14, 5, 6, 13, 9, 10, 11, 8, 12, 18, 19, 15, 16, 17, 0, 1, 20, 21, 22, 23,
];
const POCKET_U_INV_ROW: [u8; 24] = [
    3, 0, 1, 2, 22, 23, 6, 7, 5, 9, 10, 4, 12, 13, 14, 15, 16, 11, 8, 19, 20, 21, 17, 18,
];
const POCKET_L_INV_ROW: [u8; 24] = [
    9, 1, 2, 8, 7, 4, 5, 6, 14, 15, 10, 11, 12, 13, 21, 22, 16, 17, 18, 19, 20, 3, 0, 23,
];
const POCKET_F_INV_ROW: [u8; 24] = [
    18, 19, 2, 3, 1, 5, 6, 0, 11, 8, 9, 10, 12, 7, 4, 15, 16, 17, 13, 14, 20, 21, 22, 23,
];
const RUBIKS_U_ROW: [u8; 48] = [
    2, 3, 4, 5, 6, 7, 0, 1, 22, 23, 16, 11, 12, 13, 14, 15, 36, 17, 18, 19, 20, 21, 34, 35, 24,
    25, 26, 27, 28, 29, 30, 31, 32, 33, 44, 45, 46, 37, 38, 39, 40, 41, 42, 43, 8, 9, 10, 47,
];

/// Key of each rotation's inverse within the 24-element rotation group.
const WCR_INV_KEY: [u8; 24] = [
    0, 3, 2, 1, 12, 19, 6, 21, 8, 9, 10, 11, 4, 23, 14, 17, 20, 15, 18, 5, 16, 7, 22, 13,
];

/// Color shown on top of the home cube after applying the first rotation
/// of each group row (rows: identity, f, f2, f', l, l').
const ROW_TOP_COLORS: [u8; 6] = [0, 4, 3, 1, 2, 5];

/// Coloring after one clockwise up twist of the solved 2x2x2.
const POCKET_AFTER_U_FCOL: [u8; 24] = [
    0, 0, 0, 0, 5, 5, 1, 1, 1, 2, 2, 1, 3, 3, 3, 3, 4, 2, 2, 4, 5, 5, 4, 4,
];

/// Color renaming of rotation key 4 (front-axis rotation).
const CT4_COLOR_MAP: [u8; 6] = [4, 0, 2, 1, 3, 5];

fn forward24(t: &Transform) -> [u8; 24] {
    let mut out = [0u8; 24];
    out.copy_from_slice(&t.forward[..24]);
    out
}

fn inverse24(t: &Transform) -> [u8; 24] {
    let mut out = [0u8; 24];
    out.copy_from_slice(&t.inverse[..24]);
    out
}

#[test]
fn pocket_twist_rows_match_pinned_tables() {
    let t = tables(CubeVariant::Pocket2);
    assert_eq!(forward24(t.twist(Face::U, 1)), POCKET_U_ROW);
    assert_eq!(forward24(t.twist(Face::L, 1)), POCKET_L_ROW);
    assert_eq!(forward24(t.twist(Face::F, 1)), POCKET_F_ROW);
    assert_eq!(inverse24(t.twist(Face::U, 1)), POCKET_U_INV_ROW);
    assert_eq!(inverse24(t.twist(Face::L, 1)), POCKET_L_INV_ROW);
    assert_eq!(inverse24(t.twist(Face::F, 1)), POCKET_F_INV_ROW);
    // The counter-clockwise twist is the inverse quarter twist.
    assert_eq!(forward24(t.twist(Face::U, 3)), POCKET_U_INV_ROW);
}

#[test]
fn rubiks_up_twist_matches_pinned_table() {
    let t = tables(CubeVariant::Rubiks3);
    assert_eq!(t.twist(Face::U, 1).forward, RUBIKS_U_ROW);
}

#[test]
fn rotation_group_structure() {
    for variant in [CubeVariant::Pocket2, CubeVariant::Rubiks3] {
        let t = tables(variant);
        // 24 distinct rotations, closed under composition and inversion.
        for i in 0..N_ROTATIONS {
            for j in 0..N_ROTATIONS {
                if i != j {
                    assert_ne!(t.wcr[i], t.wcr[j], "rotations {i} and {j} coincide");
                }
                let comp = t.wcr[i].then(&t.wcr[j]);
                assert!(
                    t.wcr.iter().any(|w| *w == comp),
                    "composition {i};{j} leaves the group"
                );
            }
        }
        assert_eq!(t.wcr_inv_key, WCR_INV_KEY, "inverse keys for {variant:?}");
        let self_inverse = (0..N_ROTATIONS)
            .filter(|&k| t.wcr_inv_key[k] as usize == k)
            .count();
        assert_eq!(self_inverse, 10);
        // Row structure: the first rotation of each row brings a fixed
        // color on top of the home cube.
        let solved = CubeState::solved(variant);
        for (row, &want) in ROW_TOP_COLORS.iter().enumerate() {
            let rotated = solved.apply_transform(&t.wcr[4 * row]);
            assert_eq!(rotated.fcol()[0], want, "top color of row {row}");
        }
    }
}

#[test]
fn color_maps_are_consistent_across_cube_sizes() {
    let p = tables(CubeVariant::Pocket2);
    let r = tables(CubeVariant::Rubiks3);
    assert_eq!(p.color_maps, r.color_maps);
    assert_eq!(p.color_maps[4], CT4_COLOR_MAP);
    // All 24 renamings are distinct permutations of the six colors.
    let mut maps = p.color_maps.to_vec();
    maps.sort_unstable();
    maps.dedup();
    assert_eq!(maps.len(), 24);
}

#[test]
fn twist_after_solved_matches_pinned_coloring() {
    let s = CubeState::solved(CubeVariant::Pocket2).twist(Face::U, 1);
    assert_eq!(s.fcol(), POCKET_AFTER_U_FCOL);
    // sloc of a twist applied to the home cube is the forward row itself.
    assert_eq!(s.sloc(), POCKET_U_ROW);
}

#[test]
fn color_transform_worked_example() {
    // Renaming the one-up-twist state by key 4 must give exactly the
    // one-left-twist state, including sticker locations.
    let after_u = CubeState::solved(CubeVariant::Pocket2).twist(Face::U, 1);
    let after_l = CubeState::solved(CubeVariant::Pocket2).twist(Face::L, 1);
    let mapped = after_u.color_transform(4);
    assert_eq!(mapped, after_l);
    assert_eq!(mapped.sloc(), after_l.sloc());
    assert_eq!(mapped.sloc(), POCKET_L_ROW);
}

#[test]
fn action_lists_per_metric() {
    let p = tables(CubeVariant::Pocket2);
    let r = tables(CubeVariant::Rubiks3);
    assert_eq!(p.actions(Metric::Htm).len(), 9);
    assert_eq!(p.actions(Metric::Qtm).len(), 6);
    assert_eq!(r.actions(Metric::Htm).len(), 18);
    assert_eq!(r.actions(Metric::Qtm).len(), 12);
    // The 2x2x2 twists keep the anchor cubie in place, so states stay
    // normalized without extra work.
    for a in p.actions(Metric::Htm) {
        let tr = p.twist(a.face, a.power);
        for loc in [12, 16, 20] {
            assert_eq!(tr.forward[loc] as usize, loc);
        }
    }
}

#[test]
fn four_quarter_twists_are_identity() {
    for variant in [CubeVariant::Pocket2, CubeVariant::Rubiks3] {
        let t = tables(variant);
        for &face in t.twistable_faces {
            let q = t.twist(face, 1);
            let full = q.then(q).then(q).then(q);
            assert!(full.is_identity(), "{face:?}^4 on {variant:?}");
            // Powers agree with repeated composition.
            assert_eq!(*t.twist(face, 2), q.then(q));
            assert_eq!(*t.twist(face, 3), q.then(q).then(q));
        }
    }
}

#[test]
fn state_invariant_under_random_sequences() {
    let mut rng = tdcube_core::rng::substream(11, "cube-algebra-fuzz");
    for variant in [CubeVariant::Pocket2, CubeVariant::Rubiks3] {
        let t = tables(variant);
        let solved = CubeState::solved(variant);
        for _ in 0..200 {
            let len = rng.gen_range(0..60);
            let (s, seq) = CubeState::scramble(variant, Metric::Htm, len, &mut rng);
            // Home sticker i is found at its recorded location.
            for i in 0..t.n_stickers {
                assert_eq!(
                    s.fcol()[s.sloc()[i] as usize],
                    t.solved_fcol[i],
                    "sticker {i} after {seq:?}"
                );
            }
            // Undoing the sequence restores the home cube.
            let undone: Vec<Action> = seq.iter().rev().map(|a| a.inverse()).collect();
            assert_eq!(s.apply_all(&undone), solved);
        }
    }
}

#[test]
fn reconstruction_recovers_sticker_locations() {
    let mut rng = tdcube_core::rng::substream(12, "cube-algebra-reconstruct");
    for variant in [CubeVariant::Pocket2, CubeVariant::Rubiks3] {
        for _ in 0..100 {
            let p = rng.gen_range(0..40);
            let (s, _) = CubeState::scramble(variant, Metric::Qtm, p, &mut rng);
            let rebuilt = CubeState::from_fcol(variant, s.fcol()).unwrap();
            assert_eq!(rebuilt.sloc(), s.sloc());
        }
    }
    // A coloring with a repainted sticker has no consistent cubie layout.
    let mut bad = CubeState::solved(CubeVariant::Pocket2).fcol().to_vec();
    bad[0] = 3;
    assert!(CubeState::from_fcol(CubeVariant::Pocket2, &bad).is_err());
}

#[test]
fn normalization_inverts_whole_cube_rotations() {
    let mut rng = tdcube_core::rng::substream(13, "cube-algebra-normalize");
    let t = tables(CubeVariant::Pocket2);
    for _ in 0..50 {
        let (s, _) = CubeState::scramble(CubeVariant::Pocket2, Metric::Htm, 20, &mut rng);
        assert!(s.is_normalized());
        for k in 0..N_ROTATIONS {
            let rotated = s.apply_transform(&t.wcr[k]);
            assert_eq!(rotated.normalize().unwrap(), s);
        }
    }
}

#[test]
fn symmetry_counting_and_key_draws() {
    let solved = CubeState::solved(CubeVariant::Pocket2);
    assert_eq!(solved.count_distinct_symmetries(), 1);
    assert_eq!(
        CubeState::solved(CubeVariant::Rubiks3).count_distinct_symmetries(),
        1
    );
    let mut rng = tdcube_core::rng::substream(14, "cube-algebra-keys");
    for n_sym in [0usize, 1, 2, 8, 16, 24] {
        let keys = draw_symmetry_keys(n_sym, &mut rng);
        assert_eq!(keys[0], 0);
        assert_eq!(keys.len(), n_sym.max(1));
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), keys.len(), "keys must be distinct");
        assert!(keys.iter().all(|&k| (k as usize) < N_ROTATIONS));
    }
}

#[test]
fn color_transform_preserves_solvability_structure() {
    // Every color transformation preserves the twist relation: renaming
    // then twisting equals twisting then renaming (with the twist mapped
    // through the rotation). Weaker but sufficient here: renamed states
    // stay valid and renaming is invertible on reachable states.
    let mut rng = tdcube_core::rng::substream(15, "cube-algebra-ct");
    for variant in [CubeVariant::Pocket2, CubeVariant::Rubiks3] {
        for _ in 0..40 {
            let (s, _) = CubeState::scramble(variant, Metric::Htm, 15, &mut rng);
            for k in 0..N_ROTATIONS {
                let m = s.color_transform(k);
                // Result is a valid reconstructible state in normal form.
                assert!(m.is_normalized());
                let rebuilt = CubeState::from_fcol(variant, m.fcol()).unwrap();
                assert_eq!(rebuilt.sloc(), m.sloc());
            }
            // Key 0 is the identity.
            assert_eq!(s.color_transform(0), s);
        }
    }
}

#[test]
fn action_notation_round_trips() {
    for token in ["U", "U2", "U'", "L", "F2", "D'", "R", "B2", "l", "f'"] {
        let a: Action = token.parse().unwrap();
        let b: Action = a.to_string().parse().unwrap();
        assert_eq!(a, b);
    }
    assert_eq!("U3".parse::<Action>().unwrap(), "U'".parse().unwrap());
    assert_eq!("U1".parse::<Action>().unwrap(), "U".parse().unwrap());
    assert!("X".parse::<Action>().is_err());
    assert!("U4".parse::<Action>().is_err());
    let seq = Action::parse_sequence("U L' F2  D").unwrap();
    assert_eq!(Action::format_sequence(&seq), "U L' F2 D");
    for a in &seq {
        let undo = a.inverse();
        assert_eq!(
            CubeState::solved(CubeVariant::Rubiks3).apply(*a).apply(undo),
            CubeState::solved(CubeVariant::Rubiks3)
        );
    }
}

#[test]
fn pretty_output_labels_every_sticker() {
    for variant in [CubeVariant::Pocket2, CubeVariant::Rubiks3] {
        let s = CubeState::solved(variant).twist(Face::F, 1);
        let text = s.pretty();
        for i in 0..variant.n_stickers() {
            assert!(
                text.contains(&format!("{}{}", COLOR_CHARS[s.fcol()[i] as usize], i)),
                "sticker {i} missing from drawing of {variant:?}"
            );
        }
    }
}
