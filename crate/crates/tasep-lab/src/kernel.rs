//! Wall-indexed transition maps: the row maps, the paired complete-chain
//! maps with their inverses, the border swap, the circular variant, and the
//! reduction of a (configuration, wall) pair to a smaller configuration.
//!
//! Open-boundary maps act on walls `0..=n`, the circular map on walls
//! `0..n`. Every paired map returns the image configuration together with
//! the wall its image pairs with, and is a bijection of the pair space.

use thiserror::Error;

use crate::config::{Boundary, CompleteConfig, Particle, TasepRow};

// --- errors ---

/// Errors raised by the transition maps.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum KernelError {
    #[error("wall {wall} out of range for size {n}")]
    WallOutOfRange { wall: usize, n: usize },
    #[error("the pair at wall {wall} is stable")]
    StablePair { wall: usize },
    #[error("expected boundary {expected}, found {found}")]
    WrongBoundary { expected: Boundary, found: Boundary },
    #[error("the circular map needs at least one neutral column")]
    NeedsNeutralColumn,
    #[error("orbit failed to close after {steps} steps")]
    OrbitOverrun { steps: usize },
}

// --- classification ---

/// How a (configuration, wall) pair moves under the paired maps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClassTag {
    /// Interior wall with a `W/B` column right of an occupied top cell: the
    /// column relocates leftward past the white stretch.
    RelocateLeft,
    /// Interior wall with a black top cell before a `W/W` column: the black
    /// and the white relocate rightward past the black stretch, entering on
    /// a diagonal.
    RelocateRightDiagonal,
    /// Interior wall with a `B/W` column before a neutral column: the full
    /// column relocates rightward past the black stretch.
    RelocateRightColumn,
    /// Left border with a `W/B` column at cell 1: the column leaves the
    /// border and its cells re-enter with the rows exchanged.
    InjectLeft,
    /// Right border with a `B/W` column at cell n: mirror of
    /// [`ClassTag::InjectLeft`].
    EjectRight,
    /// Left border held by a neutral column; fixed by the primary map.
    NeutralLeft,
    /// Right border held by a neutral column; fixed by the primary map.
    NeutralRight,
    /// Nothing moves.
    Stable,
}

/// The class of a (configuration, wall) pair and the wall its image pairs
/// with. Stable and neutral-border pairs keep their wall.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Classification {
    pub tag: ClassTag,
    pub target: usize,
}

fn scan_left(top: &[Particle], wall: usize) -> usize {
    let mut w = wall - 1;
    while w > 0 && top[w - 1] == Particle::White {
        w -= 1;
    }
    w
}

fn scan_right(top: &[Particle], wall: usize) -> usize {
    let n = top.len();
    let mut j = wall + 1;
    while j < n && top[j] == Particle::Black {
        j += 1;
    }
    j
}

/// Classifies a (configuration, wall) pair of an open-boundary space.
pub fn classify(cfg: &CompleteConfig, wall: usize) -> Classification {
    let n = cfg.n();
    assert!(wall <= n, "wall index out of range");
    assert!(
        cfg.boundary() != Boundary::Periodic,
        "classification applies to open boundaries"
    );
    let stable = Classification {
        tag: ClassTag::Stable,
        target: wall,
    };
    if n == 0 {
        return stable;
    }
    let top = cfg.top();
    if wall == 0 {
        return match cfg.column(1) {
            (Particle::Neutral, Particle::Neutral) => Classification {
                tag: ClassTag::NeutralLeft,
                target: 0,
            },
            (Particle::White, b) => {
                debug_assert_eq!(b, Particle::Black);
                Classification {
                    tag: ClassTag::InjectLeft,
                    target: scan_right(top, 0),
                }
            }
            _ => stable,
        };
    }
    if wall == n {
        return match cfg.column(n) {
            (Particle::Neutral, Particle::Neutral) => Classification {
                tag: ClassTag::NeutralRight,
                target: n,
            },
            (Particle::Black, b) => {
                debug_assert_eq!(b, Particle::White);
                Classification {
                    tag: ClassTag::EjectRight,
                    target: scan_left(top, n),
                }
            }
            _ => stable,
        };
    }
    let tl = cfg.top_cell(wall);
    let (tr, br) = cfg.column(wall + 1);
    if tl != Particle::White && tr == Particle::White && br == Particle::Black {
        Classification {
            tag: ClassTag::RelocateLeft,
            target: scan_left(top, wall),
        }
    } else if tl == Particle::Black && tr == Particle::White && br == Particle::White {
        Classification {
            tag: ClassTag::RelocateRightDiagonal,
            target: scan_right(top, wall),
        }
    } else if tl == Particle::Black && tr == Particle::Neutral {
        debug_assert_eq!(cfg.bottom_cell(wall), Particle::White);
        Classification {
            tag: ClassTag::RelocateRightColumn,
            target: scan_right(top, wall),
        }
    } else {
        stable
    }
}

// --- row maps ---

/// Two-species row move at a wall: interior `B·W` pairs swap, a white enters
/// at the left border, a black leaves at the right border.
pub fn theta(row: &TasepRow, wall: usize) -> TasepRow {
    let n = row.n();
    assert!(wall <= n, "wall index out of range");
    let mut cells = row.cells().to_vec();
    if n == 0 {
        return TasepRow::new(cells);
    }
    if wall == 0 {
        if cells[0] == Particle::White {
            cells[0] = Particle::Black;
        }
    } else if wall == n {
        if cells[n - 1] == Particle::Black {
            cells[n - 1] = Particle::White;
        }
    } else if cells[wall - 1] == Particle::Black && cells[wall] == Particle::White {
        cells.swap(wall - 1, wall);
    }
    TasepRow::new(cells)
}

/// Which of the two three-species row moves to apply at a wall.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ThetaVariant {
    /// Interior swaps plus the plain border moves (white to black on the
    /// left, black to white on the right); neutral border cells hold.
    Primary,
    /// Interior swaps plus the recoloring border moves: borders convert
    /// through the neutral state (white to neutral and neutral to black on
    /// the left; black to neutral and neutral to white on the right).
    Secondary,
}

fn interior_swap_active(left: Particle, right: Particle) -> bool {
    left != Particle::White
        && right != Particle::Black
        && (left, right) != (Particle::Neutral, Particle::Neutral)
}

/// Three-species row move at a wall.
pub fn theta3(row: &TasepRow, wall: usize, variant: ThetaVariant) -> TasepRow {
    let n = row.n();
    assert!(wall <= n, "wall index out of range");
    let mut cells = row.cells().to_vec();
    if n == 0 {
        return TasepRow::new(cells);
    }
    if wall == 0 {
        cells[0] = match (variant, cells[0]) {
            (ThetaVariant::Primary, Particle::White) => Particle::Black,
            (ThetaVariant::Secondary, Particle::White) => Particle::Neutral,
            (ThetaVariant::Secondary, Particle::Neutral) => Particle::Black,
            (_, keep) => keep,
        };
    } else if wall == n {
        cells[n - 1] = match (variant, cells[n - 1]) {
            (ThetaVariant::Primary, Particle::Black) => Particle::White,
            (ThetaVariant::Secondary, Particle::Black) => Particle::Neutral,
            (ThetaVariant::Secondary, Particle::Neutral) => Particle::White,
            (_, keep) => keep,
        };
    } else if interior_swap_active(cells[wall - 1], cells[wall]) {
        cells.swap(wall - 1, wall);
    }
    TasepRow::new(cells)
}

/// Circular three-species row move at a wall in `0..n`; wall 0 sits between
/// cells `n` and 1. All active patterns swap the two cells.
pub fn theta_hat(row: &TasepRow, wall: usize) -> TasepRow {
    let n = row.n();
    assert!(wall < n, "wall index out of range");
    let left = if wall == 0 { n } else { wall };
    let right = wall % n + 1;
    let mut cells = row.cells().to_vec();
    if left != right && interior_swap_active(cells[left - 1], cells[right - 1]) {
        cells.swap(left - 1, right - 1);
    }
    TasepRow::new(cells)
}

// --- the sweep description of the paired two-species map ---

fn white_sweep(bottom: &mut [Particle], lo: usize, hi: usize) {
    debug_assert_eq!(bottom[hi - 1], Particle::Black);
    let old: Vec<Particle> = bottom[lo - 1..hi].to_vec();
    for c in lo..=hi {
        bottom[c - 1] = Particle::Black;
    }
    for c in lo..hi {
        if old[c - lo] == Particle::White {
            bottom[c] = Particle::White;
        }
    }
}

fn black_sweep(bottom: &mut [Particle], lo: usize, hi: usize) {
    debug_assert_eq!(bottom[lo - 1], Particle::White);
    let old: Vec<Particle> = bottom[lo - 1..hi].to_vec();
    for c in lo..=hi {
        bottom[c - 1] = Particle::White;
    }
    for c in lo + 1..=hi {
        if old[c - lo] == Particle::Black {
            bottom[c - 2] = Particle::Black;
        }
    }
}

/// The sweep description of the paired two-species move: the top row makes
/// the row move at the wall while the bottom row sweeps, white particles
/// hopping one cell right toward the wall's black anchor or black particles
/// hopping one cell left toward its white anchor. Returns the image
/// configuration only; it is pointwise equal to the first component of
/// [`relocation_map`], which this function deliberately does not call.
pub fn sweep_map(cfg: &CompleteConfig, wall: usize) -> CompleteConfig {
    let n = cfg.n();
    assert!(wall <= n, "wall index out of range");
    assert_eq!(
        cfg.boundary(),
        Boundary::Open2,
        "the sweep map is two-species"
    );
    if n == 0 {
        return cfg.clone();
    }
    let mut top = cfg.top().to_vec();
    let mut bottom = cfg.bottom().to_vec();
    if wall == 0 {
        if top[0] != Particle::White {
            return cfg.clone();
        }
        let j2 = scan_right(cfg.top(), 0);
        top[0] = Particle::Black;
        bottom[0] = Particle::White;
        let hi = if j2 < n { j2 + 1 } else { n };
        black_sweep(&mut bottom, 1, hi);
    } else if wall == n {
        if top[n - 1] != Particle::Black {
            return cfg.clone();
        }
        let j1 = scan_left(cfg.top(), n);
        top[n - 1] = Particle::White;
        bottom[n - 1] = Particle::Black;
        white_sweep(&mut bottom, j1 + 1, n);
    } else {
        if !(top[wall - 1] == Particle::Black && top[wall] == Particle::White) {
            return cfg.clone();
        }
        top.swap(wall - 1, wall);
        if bottom[wall] == Particle::Black {
            let j1 = scan_left(cfg.top(), wall);
            white_sweep(&mut bottom, j1 + 1, wall + 1);
        } else {
            let j2 = scan_right(cfg.top(), wall);
            let hi = if j2 < n { j2 + 1 } else { n };
            black_sweep(&mut bottom, wall + 1, hi);
        }
    }
    CompleteConfig::from_parts_unchecked(top, bottom, Boundary::Open2)
}

// --- the paired maps through column relocation ---

fn place_rightward(top: &mut Vec<Particle>, bottom: &mut Vec<Particle>, j2: usize, diagonal: bool) {
    top.insert(j2 - 1, Particle::Black);
    if diagonal {
        bottom.insert(j2, Particle::White);
    } else {
        bottom.insert(j2 - 1, Particle::White);
    }
}

/// The paired move through column relocation, acting on both open spaces.
/// Returns the image configuration and the wall it pairs with.
pub fn relocation_map_primary(cfg: &CompleteConfig, wall: usize) -> (CompleteConfig, usize) {
    let n = cfg.n();
    let class = classify(cfg, wall);
    let boundary = cfg.boundary();
    let mut top = cfg.top().to_vec();
    let mut bottom = cfg.bottom().to_vec();
    match class.tag {
        ClassTag::Stable | ClassTag::NeutralLeft | ClassTag::NeutralRight => (cfg.clone(), wall),
        ClassTag::RelocateLeft => {
            let j1 = class.target;
            let moved = (top.remove(wall), bottom.remove(wall));
            debug_assert_eq!(moved, (Particle::White, Particle::Black));
            top.insert(j1, moved.0);
            bottom.insert(j1, moved.1);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                j1,
            )
        }
        ClassTag::EjectRight => {
            let j1 = class.target;
            let moved = (top.remove(n - 1), bottom.remove(n - 1));
            debug_assert_eq!(moved, (Particle::Black, Particle::White));
            top.insert(j1, Particle::White);
            bottom.insert(j1, Particle::Black);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                j1,
            )
        }
        ClassTag::RelocateRightDiagonal => {
            let j2 = class.target;
            let diagonal = j2 < n && top[j2] == Particle::White;
            let moved = (top.remove(wall - 1), bottom.remove(wall));
            debug_assert_eq!(moved, (Particle::Black, Particle::White));
            place_rightward(&mut top, &mut bottom, j2, diagonal);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                j2,
            )
        }
        ClassTag::RelocateRightColumn => {
            let j2 = class.target;
            let diagonal = j2 < n && top[j2] == Particle::White;
            let moved = (top.remove(wall - 1), bottom.remove(wall - 1));
            debug_assert_eq!(moved, (Particle::Black, Particle::White));
            place_rightward(&mut top, &mut bottom, j2, diagonal);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                j2,
            )
        }
        ClassTag::InjectLeft => {
            let j2 = class.target;
            let diagonal = j2 < n && top[j2] == Particle::White;
            let moved = (top.remove(0), bottom.remove(0));
            debug_assert_eq!(moved, (Particle::White, Particle::Black));
            place_rightward(&mut top, &mut bottom, j2, diagonal);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                j2,
            )
        }
    }
}

/// Inverse of [`relocation_map_primary`].
pub fn relocation_map_primary_inverse(
    cfg: &CompleteConfig,
    wall: usize,
) -> (CompleteConfig, usize) {
    let n = cfg.n();
    assert!(wall <= n, "wall index out of range");
    assert!(
        cfg.boundary() != Boundary::Periodic,
        "the relocation maps act on open boundaries"
    );
    if n == 0 {
        return (cfg.clone(), wall);
    }
    let boundary = cfg.boundary();
    let top0 = cfg.top().to_vec();
    let top = cfg.top().to_vec();
    let bottom = cfg.bottom().to_vec();

    // Undoes a leftward relocation: the `W/B` column right of the wall
    // returns to the far end of the white stretch, or to the right border
    // when the stretch runs out.
    let undo_leftward = |mut top: Vec<Particle>, mut bottom: Vec<Particle>| {
        let moved = (top.remove(wall), bottom.remove(wall));
        debug_assert_eq!(moved, (Particle::White, Particle::Black));
        let mut e = wall + 1;
        while e < n && top0[e] == Particle::White {
            e += 1;
        }
        if e == n {
            top.push(Particle::Black);
            bottom.push(Particle::White);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                n,
            )
        } else {
            top.insert(e, moved.0);
            bottom.insert(e, moved.1);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                e,
            )
        }
    };

    if wall == 0 {
        return match cfg.column(1) {
            (Particle::White, Particle::Black) => undo_leftward(top, bottom),
            _ => (cfg.clone(), 0),
        };
    }

    // Undoes a rightward relocation ending at this wall: the moved material
    // returns to the near end of the black stretch, or to the left border
    // when the stretch runs out.
    let undo_rightward = |mut top: Vec<Particle>, mut bottom: Vec<Particle>| {
        let mut r = wall;
        while r > 1 && top0[r - 2] == Particle::Black {
            r -= 1;
        }
        if wall == n || top0[wall] == Particle::Neutral {
            let moved = if wall == n {
                (top.remove(n - 1), bottom.remove(n - 1))
            } else {
                (top.remove(wall - 1), bottom.remove(wall - 1))
            };
            debug_assert_eq!(moved, (Particle::Black, Particle::White));
        } else {
            let moved = (top.remove(wall - 1), bottom.remove(wall));
            debug_assert_eq!(moved, (Particle::Black, Particle::White));
        }
        if r == 1 {
            top.insert(0, Particle::White);
            bottom.insert(0, Particle::Black);
            (
                CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                0,
            )
        } else {
            match top0[r - 2] {
                Particle::White => {
                    top.insert(r - 2, Particle::Black);
                    bottom.insert(r - 1, Particle::White);
                    (
                        CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                        r - 1,
                    )
                }
                Particle::Neutral => {
                    top.insert(r - 2, Particle::Black);
                    bottom.insert(r - 2, Particle::White);
                    (
                        CompleteConfig::from_parts_unchecked(top, bottom, boundary),
                        r - 1,
                    )
                }
                Particle::Black => unreachable!("the black stretch scan is maximal"),
            }
        }
    };

    if wall == n {
        return match cfg.column(n) {
            (Particle::Black, Particle::White) => undo_rightward(top, bottom),
            _ => (cfg.clone(), n),
        };
    }

    let tl = top0[wall - 1];
    let (tr, br) = (top0[wall], bottom[wall]);
    if tl != Particle::White && tr == Particle::White && br == Particle::Black {
        undo_leftward(top, bottom)
    } else if tl == Particle::Black
        && ((tr, br) == (Particle::White, Particle::White) || tr == Particle::Neutral)
    {
        if tr == Particle::Neutral {
            debug_assert_eq!(bottom[wall - 1], Particle::White);
        }
        undo_rightward(top, bottom)
    } else {
        (cfg.clone(), wall)
    }
}

/// The paired two-species move; a restriction of
/// [`relocation_map_primary`] to the two-species open space.
pub fn relocation_map(cfg: &CompleteConfig, wall: usize) -> (CompleteConfig, usize) {
    assert_eq!(
        cfg.boundary(),
        Boundary::Open2,
        "relocation_map is the two-species restriction"
    );
    relocation_map_primary(cfg, wall)
}

/// Inverse of [`relocation_map`].
pub fn relocation_map_inverse(cfg: &CompleteConfig, wall: usize) -> (CompleteConfig, usize) {
    assert_eq!(
        cfg.boundary(),
        Boundary::Open2,
        "relocation_map_inverse is the two-species restriction"
    );
    relocation_map_primary_inverse(cfg, wall)
}

// --- the border swap and the secondary map ---

/// The border involution: at the left border it exchanges a `W/B` column at
/// cell 1 with a neutral column, at the right border a `B/W` column at cell
/// `n` with a neutral column; everywhere else it is the identity. The wall
/// of the pair is unchanged.
pub fn border_swap(cfg: &CompleteConfig, wall: usize) -> CompleteConfig {
    let n = cfg.n();
    assert!(wall <= n, "wall index out of range");
    assert_eq!(
        cfg.boundary(),
        Boundary::Open3,
        "the border swap acts on the three-species open space"
    );
    if n == 0 {
        return cfg.clone();
    }
    let mut top = cfg.top().to_vec();
    let mut bottom = cfg.bottom().to_vec();
    if wall == 0 {
        match cfg.column(1) {
            (Particle::Neutral, Particle::Neutral) => {
                top[0] = Particle::White;
                bottom[0] = Particle::Black;
            }
            (Particle::White, Particle::Black) => {
                top[0] = Particle::Neutral;
                bottom[0] = Particle::Neutral;
            }
            _ => return cfg.clone(),
        }
    } else if wall == n {
        match cfg.column(n) {
            (Particle::Neutral, Particle::Neutral) => {
                top[n - 1] = Particle::Black;
                bottom[n - 1] = Particle::White;
            }
            (Particle::Black, Particle::White) => {
                top[n - 1] = Particle::Neutral;
                bottom[n - 1] = Particle::Neutral;
            }
            _ => return cfg.clone(),
        }
    } else {
        return cfg.clone();
    }
    CompleteConfig::from_parts_unchecked(top, bottom, Boundary::Open3)
}

/// The secondary paired move: the border swap followed by the primary map.
pub fn relocation_map_secondary(cfg: &CompleteConfig, wall: usize) -> (CompleteConfig, usize) {
    relocation_map_primary(&border_swap(cfg, wall), wall)
}

/// Inverse of [`relocation_map_secondary`]: the primary inverse followed by
/// the border swap.
pub fn relocation_map_secondary_inverse(
    cfg: &CompleteConfig,
    wall: usize,
) -> (CompleteConfig, usize) {
    let (mid, j) = relocation_map_primary_inverse(cfg, wall);
    (border_swap(&mid, j), j)
}

// --- the circular map ---

/// The paired move on the periodic space with at least one neutral column.
/// The relocation families act by circular arc rotations; the stretch scans
/// walk the circle and are capped after `n - 2` examined cells.
pub fn circular_map(
    cfg: &CompleteConfig,
    wall: usize,
) -> Result<(CompleteConfig, usize), KernelError> {
    if cfg.boundary() != Boundary::Periodic {
        return Err(KernelError::WrongBoundary {
            expected: Boundary::Periodic,
            found: cfg.boundary(),
        });
    }
    let n = cfg.n();
    if wall >= n {
        return Err(KernelError::WallOutOfRange { wall, n });
    }
    if cfg.ell() == 0 {
        return Err(KernelError::NeedsNeutralColumn);
    }
    let shift =
        |c: usize, d: i64| -> usize { ((c as i64 - 1 + d).rem_euclid(n as i64)) as usize + 1 };
    let wall_left_of = |c: usize| -> usize { (c + n - 1) % n };
    let wall_right_of = |c: usize| -> usize { c % n };

    let left = if wall == 0 { n } else { wall };
    let right = wall % n + 1;
    let top0 = cfg.top();
    let bottom0 = cfg.bottom();
    let tl = top0[left - 1];
    let tr = top0[right - 1];
    let br = bottom0[right - 1];

    let mut top = top0.to_vec();
    let mut bottom = bottom0.to_vec();

    if tl != Particle::White && tr == Particle::White && br == Particle::Black {
        // Leftward relocation: rotate the arc ending at the moved column one
        // step clockwise.
        let mut t = 0usize;
        while t < n - 2 && top0[shift(left, -(t as i64 + 1)) - 1] == Particle::White {
            t += 1;
        }
        let cells: Vec<usize> = (0..t + 2)
            .map(|q| shift(left, q as i64 - t as i64))
            .collect();
        for q in 0..t + 2 {
            let src = cells[if q == 0 { t + 1 } else { q - 1 }];
            top[cells[q] - 1] = top0[src - 1];
            bottom[cells[q] - 1] = bottom0[src - 1];
        }
        let j = wall_left_of(cells[0]);
        Ok((
            CompleteConfig::from_parts_unchecked(top, bottom, Boundary::Periodic),
            j,
        ))
    } else if tl == Particle::Black
        && ((tr == Particle::White && br == Particle::White) || tr == Particle::Neutral)
    {
        // Rightward relocation: rotate the top arc (and the matching bottom
        // arc) one step counterclockwise.
        let column_source = tr == Particle::Neutral;
        if column_source {
            debug_assert_eq!(bottom0[left - 1], Particle::White);
        }
        let mut t = 0usize;
        while t < n - 2 && top0[shift(right, t as i64 + 1) - 1] == Particle::Black {
            t += 1;
        }
        let j2cell = shift(right, t as i64);
        let after = shift(j2cell, 1);
        let diagonal = t < n - 2 && top0[after - 1] == Particle::White;

        let top_cells: Vec<usize> = (0..t + 2).map(|q| shift(left, q as i64)).collect();
        for q in 0..t + 2 {
            let src = top_cells[if q == t + 1 { 0 } else { q + 1 }];
            top[top_cells[q] - 1] = top0[src - 1];
        }
        let bsrc = if column_source { left } else { right };
        let btgt = if diagonal { after } else { j2cell };
        let mut bottom_cells = Vec::new();
        let mut c = bsrc;
        loop {
            bottom_cells.push(c);
            if c == btgt {
                break;
            }
            c = shift(c, 1);
        }
        let blen = bottom_cells.len();
        for q in 0..blen {
            let src = bottom_cells[if q == blen - 1 { 0 } else { q + 1 }];
            bottom[bottom_cells[q] - 1] = bottom0[src - 1];
        }
        let j = wall_right_of(j2cell);
        Ok((
            CompleteConfig::from_parts_unchecked(top, bottom, Boundary::Periodic),
            j,
        ))
    } else {
        Ok((cfg.clone(), wall))
    }
}

// --- reduction ---

/// Removes the moving material of a non-stable (configuration, wall) pair,
/// producing a configuration one column shorter. Defined exactly on the
/// pairs the paired maps move, plus the neutral-border pairs.
pub fn reduce_pair(cfg: &CompleteConfig, wall: usize) -> Result<CompleteConfig, KernelError> {
    let n = cfg.n();
    if cfg.boundary() == Boundary::Periodic {
        return Err(KernelError::WrongBoundary {
            expected: Boundary::Open3,
            found: Boundary::Periodic,
        });
    }
    if wall > n {
        return Err(KernelError::WallOutOfRange { wall, n });
    }
    if n == 0 {
        return Err(KernelError::StablePair { wall });
    }
    let mut top = cfg.top().to_vec();
    let mut bottom = cfg.bottom().to_vec();
    let remove_column = |top: &mut Vec<Particle>, bottom: &mut Vec<Particle>, col: usize| {
        top.remove(col - 1);
        bottom.remove(col - 1);
    };
    if wall == 0 {
        match cfg.column(1) {
            (Particle::Neutral, _) | (Particle::White, _) => {
                remove_column(&mut top, &mut bottom, 1)
            }
            _ => return Err(KernelError::StablePair { wall }),
        }
    } else if wall == n {
        match cfg.column(n) {
            (Particle::Neutral, _) | (Particle::Black, _) => {
                remove_column(&mut top, &mut bottom, n)
            }
            _ => return Err(KernelError::StablePair { wall }),
        }
    } else {
        let tl = cfg.top_cell(wall);
        let (tr, br) = cfg.column(wall + 1);
        if tl != Particle::White && tr == Particle::White && br == Particle::Black {
            remove_column(&mut top, &mut bottom, wall + 1);
        } else if tl == Particle::Black && tr == Particle::White && br == Particle::White {
            top.remove(wall - 1);
            bottom.remove(wall);
        } else if tl == Particle::Black && tr == Particle::Neutral {
            debug_assert_eq!(cfg.bottom_cell(wall), Particle::White);
            remove_column(&mut top, &mut bottom, wall);
        } else {
            return Err(KernelError::StablePair { wall });
        }
    }
    Ok(CompleteConfig::from_parts_unchecked(
        top,
        bottom,
        cfg.boundary(),
    ))
}

// --- orbits ---

/// Which paired map drives an orbit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OrbitMap {
    /// The two-species map on the two-species open space.
    TwoSpecies,
    /// The primary map on the three-species open space.
    Primary,
    /// The secondary map on the three-species open space.
    Secondary,
}

/// Iterates a paired map from the canonical seed pair over a reduced
/// configuration: prepend a `W/B` column and start at wall 0. Returns the
/// full cycle, seed first.
pub fn pair_orbit(
    reduced: &CompleteConfig,
    map: OrbitMap,
) -> Result<Vec<(CompleteConfig, usize)>, KernelError> {
    let ambient = match map {
        OrbitMap::TwoSpecies => {
            if reduced.boundary() != Boundary::Open2 {
                return Err(KernelError::WrongBoundary {
                    expected: Boundary::Open2,
                    found: reduced.boundary(),
                });
            }
            Boundary::Open2
        }
        OrbitMap::Primary | OrbitMap::Secondary => {
            if reduced.boundary() == Boundary::Periodic {
                return Err(KernelError::WrongBoundary {
                    expected: Boundary::Open3,
                    found: Boundary::Periodic,
                });
            }
            Boundary::Open3
        }
    };
    let mut top = vec![Particle::White];
    top.extend_from_slice(reduced.top());
    let mut bottom = vec![Particle::Black];
    bottom.extend_from_slice(reduced.bottom());
    let seed = (
        CompleteConfig::from_parts_unchecked(top, bottom, ambient),
        0usize,
    );
    let step = |pair: &(CompleteConfig, usize)| match map {
        OrbitMap::TwoSpecies => relocation_map(&pair.0, pair.1),
        OrbitMap::Primary => relocation_map_primary(&pair.0, pair.1),
        OrbitMap::Secondary => relocation_map_secondary(&pair.0, pair.1),
    };
    let mut orbit = vec![seed.clone()];
    let mut current = step(&seed);
    while current != seed {
        orbit.push(current.clone());
        current = step(&current);
        if orbit.len() > 10_000_000 {
            return Err(KernelError::OrbitOverrun { steps: orbit.len() });
        }
    }
    Ok(orbit)
}

// --- tests ---

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{omega, omega0, omega_hat_sector};

    fn cfg(s: &str) -> CompleteConfig {
        s.parse().expect("valid configuration")
    }

    fn row(s: &str) -> TasepRow {
        s.parse().expect("valid row")
    }

    #[test]
    fn theta_moves_particles() {
        assert_eq!(theta(&row("W"), 0).serialize(), "B");
        assert_eq!(theta(&row("B"), 0).serialize(), "B");
        assert_eq!(theta(&row("B"), 1).serialize(), "W");
        assert_eq!(theta(&row("BW"), 1).serialize(), "WB");
        assert_eq!(theta(&row("WB"), 1).serialize(), "WB");
        assert_eq!(theta(&row("BWB"), 2).serialize(), "BWB");
    }

    #[test]
    fn theta3_variants_cover_the_border_moves() {
        assert_eq!(theta3(&row("W"), 0, ThetaVariant::Primary).serialize(), "B");
        assert_eq!(theta3(&row("X"), 0, ThetaVariant::Primary).serialize(), "X");
        assert_eq!(
            theta3(&row("W"), 0, ThetaVariant::Secondary).serialize(),
            "X"
        );
        assert_eq!(
            theta3(&row("X"), 0, ThetaVariant::Secondary).serialize(),
            "B"
        );
        assert_eq!(theta3(&row("B"), 1, ThetaVariant::Primary).serialize(), "W");
        assert_eq!(theta3(&row("X"), 1, ThetaVariant::Primary).serialize(), "X");
        assert_eq!(
            theta3(&row("B"), 1, ThetaVariant::Secondary).serialize(),
            "X"
        );
        assert_eq!(
            theta3(&row("X"), 1, ThetaVariant::Secondary).serialize(),
            "W"
        );
        // Interior swaps are shared by both variants.
        for v in [ThetaVariant::Primary, ThetaVariant::Secondary] {
            assert_eq!(theta3(&row("BW"), 1, v).serialize(), "WB");
            assert_eq!(theta3(&row("XW"), 1, v).serialize(), "WX");
            assert_eq!(theta3(&row("BX"), 1, v).serialize(), "XB");
            assert_eq!(theta3(&row("XX"), 1, v).serialize(), "XX");
            assert_eq!(theta3(&row("WB"), 1, v).serialize(), "WB");
        }
    }

    #[test]
    fn theta_hat_swaps_across_the_seam() {
        assert_eq!(theta_hat(&row("WB"), 0).serialize(), "BW");
        assert_eq!(theta_hat(&row("BW"), 0).serialize(), "BW");
        assert_eq!(theta_hat(&row("BW"), 1).serialize(), "WB");
        assert_eq!(theta_hat(&row("XWB"), 0).serialize(), "BWX");
        assert_eq!(theta_hat(&row("WXB"), 2).serialize(), "WXB");
        assert_eq!(theta_hat(&row("WBX"), 2).serialize(), "WXB");
        assert_eq!(theta_hat(&row("B"), 0).serialize(), "B");
    }

    #[test]
    fn classify_identifies_the_moving_patterns() {
        let c = cfg("BW/WB");
        assert_eq!(classify(&c, 0).tag, ClassTag::Stable);
        assert_eq!(classify(&c, 1).tag, ClassTag::RelocateLeft);
        assert_eq!(classify(&c, 1).target, 0);
        assert_eq!(classify(&c, 2).tag, ClassTag::Stable);
        let c = cfg("WB/BW");
        assert_eq!(classify(&c, 0).tag, ClassTag::InjectLeft);
        assert_eq!(classify(&c, 0).target, 2);
        assert_eq!(classify(&c, 2).tag, ClassTag::EjectRight);
        assert_eq!(classify(&c, 2).target, 0);
        let c = cfg("BBWW/BWWB");
        assert_eq!(classify(&c, 2).tag, ClassTag::RelocateRightDiagonal);
        assert_eq!(classify(&c, 2).target, 3);
        let c = cfg("BWX/WBX@open3");
        assert_eq!(classify(&c, 1).tag, ClassTag::RelocateLeft);
        assert_eq!(classify(&c, 3).tag, ClassTag::NeutralRight);
        let c = cfg("XBW/XWB@open3");
        assert_eq!(classify(&c, 0).tag, ClassTag::NeutralLeft);
        let c = cfg("BX/WX@open3");
        assert_eq!(classify(&c, 1).tag, ClassTag::RelocateRightColumn);
        assert_eq!(classify(&c, 1).target, 2);
    }

    #[test]
    fn relocation_map_hand_examples() {
        // Single column: ejection and injection cycle through the two states.
        assert_eq!(relocation_map(&cfg("B/W"), 1), (cfg("W/B"), 0));
        assert_eq!(relocation_map(&cfg("W/B"), 0), (cfg("B/W"), 1));
        // Leftward relocation of the W/B column.
        assert_eq!(relocation_map(&cfg("BW/WB"), 1), (cfg("WB/BW"), 0));
        // Rightward diagonal relocation.
        assert_eq!(relocation_map(&cfg("BBWW/BWWB"), 2), (cfg("BWBW/BWBW"), 3));
        // Neutral column relocation.
        assert_eq!(
            relocation_map_primary(&cfg("BX/WX@open3"), 1),
            (cfg("XB/XW@open3"), 2)
        );
    }

    #[test]
    fn sweep_and_relocation_agree_small() {
        for n in 0..=5 {
            for c in omega0(n) {
                for wall in 0..=n {
                    assert_eq!(
                        sweep_map(&c, wall),
                        relocation_map(&c, wall).0,
                        "configuration {c} wall {wall}"
                    );
                }
            }
        }
    }

    #[test]
    fn relocation_round_trips_small() {
        for n in 0..=4 {
            for c in omega(n) {
                for wall in 0..=n {
                    let (fwd, j) = relocation_map_primary(&c, wall);
                    let (back, i) = relocation_map_primary_inverse(&fwd, j);
                    assert_eq!((back, i), (c.clone(), wall), "primary at {c} wall {wall}");
                    let (fwd, j) = relocation_map_secondary(&c, wall);
                    let (back, i) = relocation_map_secondary_inverse(&fwd, j);
                    assert_eq!((back, i), (c.clone(), wall), "secondary at {c} wall {wall}");
                }
            }
        }
    }

    #[test]
    fn border_swap_is_an_involution() {
        for n in 0..=4 {
            for c in omega(n) {
                for wall in 0..=n {
                    let once = border_swap(&c, wall);
                    assert!(once.validate().is_empty());
                    let twice = border_swap(&once, wall);
                    assert_eq!(twice, c);
                }
            }
        }
        assert_eq!(border_swap(&cfg("X/X@open3"), 0), cfg("W/B@open3"));
        assert_eq!(border_swap(&cfg("X/X@open3"), 1), cfg("B/W@open3"));
        assert_eq!(border_swap(&cfg("W/B@open3"), 0), cfg("X/X@open3"));
        assert_eq!(border_swap(&cfg("B/W@open3"), 1), cfg("X/X@open3"));
        assert_eq!(border_swap(&cfg("B/W@open3"), 0), cfg("B/W@open3"));
    }

    #[test]
    fn circular_map_hand_examples() {
        // The W/B column crosses the seam onto the neutral column's slot.
        let c = cfg("XW/XB@periodic");
        let (img, j) = circular_map(&c, 1).unwrap();
        assert_eq!(img, cfg("WX/BX@periodic"));
        assert_eq!(j, 0);
        // Stable patterns hold.
        let (img, j) = circular_map(&c, 0).unwrap();
        assert_eq!((img, j), (c.clone(), 0));
        // Requires a neutral column and a periodic boundary.
        assert!(matches!(
            circular_map(&cfg("BW/WB@periodic"), 0),
            Err(KernelError::NeedsNeutralColumn)
        ));
        assert!(matches!(
            circular_map(&cfg("BW/WB"), 0),
            Err(KernelError::WrongBoundary { .. })
        ));
    }

    #[test]
    fn circular_map_permutes_each_sector() {
        for (n, k, l, m) in [(2, 1, 1, 0), (3, 1, 1, 1), (4, 2, 1, 1), (4, 1, 2, 1)] {
            let space = omega_hat_sector(n, k, l, m).unwrap();
            for wall in 0..n {
                let mut images: Vec<(CompleteConfig, usize)> = Vec::new();
                for c in &space {
                    let (img, j) = circular_map(c, wall).unwrap();
                    assert!(img.validate().is_empty());
                    assert_eq!(img.ell(), l, "{c} wall {wall}");
                    assert_eq!(img.top_black_count(), k);
                    images.push((img, j));
                }
                images.sort();
                images.dedup();
                assert_eq!(
                    images.len(),
                    space.len(),
                    "wall {wall} collapses sector ({n},{k},{l},{m})"
                );
            }
        }
    }

    #[test]
    fn reduce_pair_hand_examples() {
        assert_eq!(reduce_pair(&cfg("W/B"), 0).unwrap(), cfg("/"));
        assert_eq!(reduce_pair(&cfg("B/W"), 1).unwrap(), cfg("/"));
        assert_eq!(reduce_pair(&cfg("X/X@open3"), 0).unwrap(), cfg("/@open3"));
        assert_eq!(reduce_pair(&cfg("BW/WB"), 1).unwrap(), cfg("B/W"));
        assert_eq!(reduce_pair(&cfg("BBWW/BWWB"), 2).unwrap(), cfg("BWW/BWB"));
        assert_eq!(
            reduce_pair(&cfg("BX/WX@open3"), 1).unwrap(),
            cfg("X/X@open3")
        );
        assert!(matches!(
            reduce_pair(&cfg("B/W"), 0),
            Err(KernelError::StablePair { wall: 0 })
        ));
    }

    #[test]
    fn orbit_visits_the_expected_pairs_at_size_one() {
        let empty2 = cfg("/");
        let orbit = pair_orbit(&empty2, OrbitMap::TwoSpecies).unwrap();
        assert_eq!(orbit, vec![(cfg("W/B"), 0), (cfg("B/W"), 1)]);
        let empty3 = cfg("/@open3");
        let orbit = pair_orbit(&empty3, OrbitMap::Secondary).unwrap();
        assert_eq!(
            orbit,
            vec![
                (cfg("W/B@open3"), 0),
                (cfg("X/X@open3"), 0),
                (cfg("B/W@open3"), 1),
                (cfg("X/X@open3"), 1),
            ]
        );
        let orbit = pair_orbit(&empty3, OrbitMap::Primary).unwrap();
        assert_eq!(orbit, vec![(cfg("W/B@open3"), 0), (cfg("B/W@open3"), 1)]);
    }

    #[test]
    fn projection_onto_rows_commutes_small() {
        for n in 0..=4 {
            for c in omega(n) {
                for wall in 0..=n {
                    let (img1, _) = relocation_map_primary(&c, wall);
                    assert_eq!(
                        img1.top_row(),
                        theta3(&c.top_row(), wall, ThetaVariant::Primary),
                        "primary projection at {c} wall {wall}"
                    );
                    let (img2, _) = relocation_map_secondary(&c, wall);
                    assert_eq!(
                        img2.top_row(),
                        theta3(&c.top_row(), wall, ThetaVariant::Secondary),
                        "secondary projection at {c} wall {wall}"
                    );
                }
            }
        }
    }

    #[test]
    fn circular_projection_commutes_small() {
        for (n, k, l, m) in [(3, 1, 1, 1), (4, 2, 1, 1), (4, 1, 2, 1), (5, 2, 1, 2)] {
            for c in omega_hat_sector(n, k, l, m).unwrap() {
                for wall in 0..n {
                    let (img, _) = circular_map(&c, wall).unwrap();
                    assert_eq!(
                        img.top_row(),
                        theta_hat(&c.top_row(), wall),
                        "circular projection at {c} wall {wall}"
                    );
                }
            }
        }
    }
}
