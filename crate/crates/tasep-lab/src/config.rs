//! Cells, rows, and validated two-row configurations, together with prefix
//! statistics, the prime-factor decomposition, and the bicolored Motzkin
//! encoding.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

// --- particles and boundaries ---

/// Contents of a single cell.
///
/// The declaration order gives the canonical cell order `B < W < X`, which
/// matches the order of the serialized characters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Particle {
    Black,
    White,
    Neutral,
}

impl Particle {
    /// Serialized form of the cell.
    pub fn as_char(self) -> char {
        match self {
            Particle::Black => 'B',
            Particle::White => 'W',
            Particle::Neutral => 'X',
        }
    }

    /// Parses a serialized cell.
    pub fn from_char(c: char) -> Option<Particle> {
        match c {
            'B' => Some(Particle::Black),
            'W' => Some(Particle::White),
            'X' => Some(Particle::Neutral),
            _ => None,
        }
    }
}

impl fmt::Display for Particle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Boundary discipline of a configuration.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Boundary {
    /// Open boundaries, two species (no neutral cells).
    Open2,
    /// Open boundaries, neutral columns allowed.
    Open3,
    /// Circular cell arrangement, neutral columns allowed.
    Periodic,
}

impl Boundary {
    /// Serialized form of the boundary.
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Open2 => "open2",
            Boundary::Open3 => "open3",
            Boundary::Periodic => "periodic",
        }
    }

    /// Parses a serialized boundary.
    pub fn parse(s: &str) -> Option<Boundary> {
        match s {
            "open2" => Some(Boundary::Open2),
            "open3" => Some(Boundary::Open3),
            "periodic" => Some(Boundary::Periodic),
            _ => None,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

// --- rows ---

/// A single row of cells, the state of the row chains.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TasepRow {
    cells: Vec<Particle>,
}

impl TasepRow {
    /// Wraps a cell vector as a row.
    pub fn new(cells: Vec<Particle>) -> TasepRow {
        TasepRow { cells }
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.cells.len()
    }

    /// All cells, left to right.
    pub fn cells(&self) -> &[Particle] {
        &self.cells
    }

    /// Cell `i`, 1-based.
    pub fn cell(&self, i: usize) -> Particle {
        assert!(i >= 1 && i <= self.cells.len(), "cell index out of range");
        self.cells[i - 1]
    }

    /// Number of cells holding the given particle.
    pub fn count(&self, p: Particle) -> usize {
        self.cells.iter().filter(|&&c| c == p).count()
    }

    /// Serialized form, one character per cell.
    pub fn serialize(&self) -> String {
        self.cells.iter().map(|c| c.as_char()).collect()
    }
}

impl fmt::Display for TasepRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for TasepRow {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<TasepRow, ConfigError> {
        let mut cells = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match Particle::from_char(ch) {
                Some(p) => cells.push(p),
                None => return Err(ConfigError::BadCell { ch }),
            }
        }
        Ok(TasepRow { cells })
    }
}

// --- validation ---

/// A structural defect found by validation, naming the wall or column where
/// the check first fails.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum Violation {
    #[error("rows have different lengths ({top} vs {bottom})")]
    LengthMismatch { top: usize, bottom: usize },
    #[error("column {column} pairs a neutral cell with a non-neutral cell")]
    HalfNeutralColumn { column: usize },
    #[error("column {column} is neutral but the boundary admits two species only")]
    NeutralForbidden { column: usize },
    #[error("segment ending at wall {wall} is unbalanced (surplus {surplus})")]
    UnbalancedSegment { wall: usize, surplus: i64 },
    #[error("positivity fails at wall {wall} (prefix difference {value})")]
    NegativeExcursion { wall: usize, value: i64 },
    #[error("the circle is unbalanced ({black} black vs {white} white)")]
    UnbalancedCircle { black: usize, white: usize },
}

fn cell_contribution(p: Particle) -> i64 {
    match p {
        Particle::Black => 1,
        Particle::White => -1,
        Particle::Neutral => 0,
    }
}

/// Validates a pair of rows against a boundary and returns every violation
/// found, in scan order. An empty result means the pair is a valid
/// configuration.
pub fn validate_parts(top: &[Particle], bottom: &[Particle], boundary: Boundary) -> Vec<Violation> {
    if top.len() != bottom.len() {
        return vec![Violation::LengthMismatch {
            top: top.len(),
            bottom: bottom.len(),
        }];
    }
    let n = top.len();
    let mut violations = Vec::new();
    for j in 1..=n {
        let t = top[j - 1];
        let b = bottom[j - 1];
        let neutrals = (t == Particle::Neutral) as u8 + (b == Particle::Neutral) as u8;
        if neutrals == 1 {
            violations.push(Violation::HalfNeutralColumn { column: j });
        } else if neutrals == 2 && boundary == Boundary::Open2 {
            violations.push(Violation::NeutralForbidden { column: j });
        }
    }
    if !violations.is_empty() {
        return violations;
    }

    match boundary {
        Boundary::Open2 | Boundary::Open3 => {
            let mut e: i64 = 0;
            for j in 1..=n {
                if top[j - 1] == Particle::Neutral {
                    if e != 0 {
                        violations.push(Violation::UnbalancedSegment {
                            wall: j - 1,
                            surplus: e,
                        });
                        e = 0;
                    }
                    continue;
                }
                let prev = e;
                e += cell_contribution(top[j - 1]) + cell_contribution(bottom[j - 1]);
                if e < 0 && prev >= 0 {
                    violations.push(Violation::NegativeExcursion { wall: j, value: e });
                }
            }
            if e != 0 {
                violations.push(Violation::UnbalancedSegment {
                    wall: n,
                    surplus: e,
                });
            }
        }
        Boundary::Periodic => {
            let neutral_cols: Vec<usize> = (1..=n)
                .filter(|&j| top[j - 1] == Particle::Neutral)
                .collect();
            if neutral_cols.is_empty() {
                let black = top
                    .iter()
                    .chain(bottom.iter())
                    .filter(|&&c| c == Particle::Black)
                    .count();
                let white = top
                    .iter()
                    .chain(bottom.iter())
                    .filter(|&&c| c == Particle::White)
                    .count();
                if black != white {
                    violations.push(Violation::UnbalancedCircle { black, white });
                }
            } else {
                let l = neutral_cols.len();
                for a in 0..l {
                    let start = neutral_cols[a];
                    let stop = neutral_cols[(a + 1) % l];
                    let mut e: i64 = 0;
                    let mut c = start % n + 1;
                    while c != stop {
                        let prev = e;
                        e += cell_contribution(top[c - 1]) + cell_contribution(bottom[c - 1]);
                        if e < 0 && prev >= 0 {
                            violations.push(Violation::NegativeExcursion {
                                wall: c % n,
                                value: e,
                            });
                        }
                        c = c % n + 1;
                    }
                    if e != 0 {
                        violations.push(Violation::UnbalancedSegment {
                            wall: (stop + n - 1) % n,
                            surplus: e,
                        });
                    }
                }
            }
        }
    }
    violations
}

// --- complete configurations ---

/// A validated two-row configuration. Ordering is lexicographic on the top
/// row, then the bottom row, matching the serialized order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CompleteConfig {
    top: Vec<Particle>,
    bottom: Vec<Particle>,
    boundary: Boundary,
}

impl CompleteConfig {
    /// Builds a configuration, rejecting the pair on the first violation.
    pub fn new(
        top: Vec<Particle>,
        bottom: Vec<Particle>,
        boundary: Boundary,
    ) -> Result<CompleteConfig, Violation> {
        match validate_parts(&top, &bottom, boundary).into_iter().next() {
            Some(v) => Err(v),
            None => Ok(CompleteConfig {
                top,
                bottom,
                boundary,
            }),
        }
    }

    /// Builds a configuration the caller has already validated.
    pub(crate) fn from_parts_unchecked(
        top: Vec<Particle>,
        bottom: Vec<Particle>,
        boundary: Boundary,
    ) -> CompleteConfig {
        debug_assert!(validate_parts(&top, &bottom, boundary).is_empty());
        CompleteConfig {
            top,
            bottom,
            boundary,
        }
    }

    /// Number of columns.
    pub fn n(&self) -> usize {
        self.top.len()
    }

    /// Boundary discipline.
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// The top row, left to right.
    pub fn top(&self) -> &[Particle] {
        &self.top
    }

    /// The bottom row, left to right.
    pub fn bottom(&self) -> &[Particle] {
        &self.bottom
    }

    /// Top cell `i`, 1-based.
    pub fn top_cell(&self, i: usize) -> Particle {
        assert!(i >= 1 && i <= self.top.len(), "cell index out of range");
        self.top[i - 1]
    }

    /// Bottom cell `i`, 1-based.
    pub fn bottom_cell(&self, i: usize) -> Particle {
        assert!(i >= 1 && i <= self.bottom.len(), "cell index out of range");
        self.bottom[i - 1]
    }

    /// Column `i` as (top, bottom), 1-based.
    pub fn column(&self, i: usize) -> (Particle, Particle) {
        (self.top_cell(i), self.bottom_cell(i))
    }

    /// The top row as an owned row value.
    pub fn top_row(&self) -> TasepRow {
        TasepRow::new(self.top.clone())
    }

    /// Indices of the neutral columns, ascending.
    pub fn neutral_columns(&self) -> Vec<usize> {
        (1..=self.n())
            .filter(|&j| self.top[j - 1] == Particle::Neutral)
            .collect()
    }

    /// Number of neutral columns.
    pub fn ell(&self) -> usize {
        self.top.iter().filter(|&&c| c == Particle::Neutral).count()
    }

    /// Number of black cells in the top row.
    pub fn top_black_count(&self) -> usize {
        self.top.iter().filter(|&&c| c == Particle::Black).count()
    }

    /// Number of black cells in the bottom row.
    pub fn bottom_black_count(&self) -> usize {
        self.bottom
            .iter()
            .filter(|&&c| c == Particle::Black)
            .count()
    }

    /// Re-tags the configuration with another boundary, revalidating.
    pub fn with_boundary(&self, boundary: Boundary) -> Result<CompleteConfig, Violation> {
        CompleteConfig::new(self.top.clone(), self.bottom.clone(), boundary)
    }

    /// Re-checks the stored pair and reports all violations (empty for any
    /// value built through the public constructors).
    pub fn validate(&self) -> Vec<Violation> {
        validate_parts(&self.top, &self.bottom, self.boundary)
    }

    /// Serialized form `TOP/BOTTOM`, suffixed with `@open3` or `@periodic`
    /// for the extended boundaries.
    pub fn serialize(&self) -> String {
        let mut s = String::with_capacity(2 * self.n() + 10);
        for c in &self.top {
            s.push(c.as_char());
        }
        s.push('/');
        for c in &self.bottom {
            s.push(c.as_char());
        }
        match self.boundary {
            Boundary::Open2 => {}
            b => {
                s.push('@');
                s.push_str(b.as_str());
            }
        }
        s
    }
}

impl fmt::Display for CompleteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for CompleteConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<CompleteConfig, ConfigError> {
        let (body, boundary) = match s.split_once('@') {
            Some((body, tag)) => match Boundary::parse(tag) {
                Some(b) => (body, b),
                None => {
                    return Err(ConfigError::UnknownBoundary {
                        token: tag.to_string(),
                    })
                }
            },
            None => (s, Boundary::Open2),
        };
        let (top_s, bottom_s) = body.split_once('/').ok_or(ConfigError::MissingSeparator)?;
        if bottom_s.contains('/') {
            return Err(ConfigError::ExtraSeparator);
        }
        let top: TasepRow = top_s.parse()?;
        let bottom: TasepRow = bottom_s.parse()?;
        CompleteConfig::new(top.cells, bottom.cells, boundary).map_err(ConfigError::Invalid)
    }
}

/// Errors raised while parsing serialized rows and configurations.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ConfigError {
    #[error("unknown cell character {ch:?}")]
    BadCell { ch: char },
    #[error("missing the '/' between the rows")]
    MissingSeparator,
    #[error("more than one '/' in the configuration")]
    ExtraSeparator,
    #[error("unknown boundary {token:?}")]
    UnknownBoundary { token: String },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] Violation),
}

// --- prefix statistics ---

/// Cumulative particle counts at each wall, reading the columns from the
/// left. Every vector has length `n + 1`, indexed by wall.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrefixStats {
    /// Black cells in both rows, left of the wall.
    pub black: Vec<i64>,
    /// White cells in both rows, left of the wall.
    pub white: Vec<i64>,
    /// `black - white` at each wall.
    pub e: Vec<i64>,
    /// Black cells in the top row, left of the wall.
    pub top_black: Vec<i64>,
    /// Black cells in the bottom row, left of the wall.
    pub bottom_black: Vec<i64>,
}

/// Computes the prefix statistics of a configuration, reading from cell 1.
pub fn prefix_stats(cfg: &CompleteConfig) -> PrefixStats {
    let n = cfg.n();
    let mut stats = PrefixStats {
        black: Vec::with_capacity(n + 1),
        white: Vec::with_capacity(n + 1),
        e: Vec::with_capacity(n + 1),
        top_black: Vec::with_capacity(n + 1),
        bottom_black: Vec::with_capacity(n + 1),
    };
    let (mut black, mut white, mut top_black, mut bottom_black) = (0i64, 0i64, 0i64, 0i64);
    stats.black.push(0);
    stats.white.push(0);
    stats.e.push(0);
    stats.top_black.push(0);
    stats.bottom_black.push(0);
    for j in 1..=n {
        for (cell, row_black) in [
            (cfg.top_cell(j), &mut top_black),
            (cfg.bottom_cell(j), &mut bottom_black),
        ] {
            match cell {
                Particle::Black => {
                    black += 1;
                    *row_black += 1;
                }
                Particle::White => white += 1,
                Particle::Neutral => {}
            }
        }
        stats.black.push(black);
        stats.white.push(white);
        stats.e.push(black - white);
        stats.top_black.push(top_black);
        stats.bottom_black.push(bottom_black);
    }
    stats
}

// --- prime factorization ---

/// One top-level factor of a configuration segment. Columns are 1-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PrimeFactor {
    /// A `B/W` column outside every block.
    BwColumn { column: usize },
    /// A `W/B` column outside every block.
    WbColumn { column: usize },
    /// A neutral column.
    NeutralColumn { column: usize },
    /// A balanced stretch opened by a `B/B` column and closed by a `W/W`
    /// column, with the factorization of the enclosed part.
    Block {
        start: usize,
        end: usize,
        inside: Vec<PrimeFactor>,
    },
}

/// The top-level factors of a configuration, left to right.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrimeFactorization {
    pub factors: Vec<PrimeFactor>,
}

/// Factorizes a validated slice of columns. `positions[j]` is the 1-based
/// column index reported for slice position `j`, which lets circular arcs
/// keep their absolute positions.
pub(crate) fn factorize_slice(
    top: &[Particle],
    bottom: &[Particle],
    positions: &[usize],
) -> Vec<PrimeFactor> {
    let mut factors = Vec::new();
    let mut from = 0usize;
    let mut e: i64 = 0;
    for j in 0..top.len() {
        e += cell_contribution(top[j]) + cell_contribution(bottom[j]);
        if e == 0 {
            if j == from {
                let factor = match (top[j], bottom[j]) {
                    (Particle::Black, Particle::White) => PrimeFactor::BwColumn {
                        column: positions[j],
                    },
                    (Particle::White, Particle::Black) => PrimeFactor::WbColumn {
                        column: positions[j],
                    },
                    (Particle::Neutral, Particle::Neutral) => PrimeFactor::NeutralColumn {
                        column: positions[j],
                    },
                    other => unreachable!("invalid single-column factor {other:?}"),
                };
                factors.push(factor);
            } else {
                debug_assert_eq!(
                    (top[from], bottom[from]),
                    (Particle::Black, Particle::Black)
                );
                debug_assert_eq!((top[j], bottom[j]), (Particle::White, Particle::White));
                factors.push(PrimeFactor::Block {
                    start: positions[from],
                    end: positions[j],
                    inside: factorize_slice(
                        &top[from + 1..j],
                        &bottom[from + 1..j],
                        &positions[from + 1..j],
                    ),
                });
            }
            from = j + 1;
        }
    }
    debug_assert_eq!(from, top.len(), "slice does not factorize");
    factors
}

/// Decomposes an open-boundary configuration into its top-level factors.
pub fn prime_factorize(cfg: &CompleteConfig) -> Result<PrimeFactorization, ConfigError> {
    if cfg.boundary() == Boundary::Periodic {
        return Err(ConfigError::UnknownBoundary {
            token: "periodic factorization is arc-wise".to_string(),
        });
    }
    let positions: Vec<usize> = (1..=cfg.n()).collect();
    Ok(PrimeFactorization {
        factors: factorize_slice(cfg.top(), cfg.bottom(), &positions),
    })
}

// --- Motzkin encoding ---

/// One step of a bicolored Motzkin path.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MotzkinStep {
    /// From a `B/B` column.
    Up,
    /// From a `W/W` column.
    Down,
    /// From a `B/W` column.
    LevelBlackWhite,
    /// From a `W/B` column.
    LevelWhiteBlack,
}

/// Encodes a two-species open configuration as a bicolored Motzkin path.
pub fn to_motzkin(cfg: &CompleteConfig) -> Result<Vec<MotzkinStep>, ConfigError> {
    if cfg.boundary() != Boundary::Open2 {
        return Err(ConfigError::UnknownBoundary {
            token: cfg.boundary().as_str().to_string(),
        });
    }
    Ok((1..=cfg.n())
        .map(|j| match cfg.column(j) {
            (Particle::Black, Particle::Black) => MotzkinStep::Up,
            (Particle::White, Particle::White) => MotzkinStep::Down,
            (Particle::Black, Particle::White) => MotzkinStep::LevelBlackWhite,
            (Particle::White, Particle::Black) => MotzkinStep::LevelWhiteBlack,
            other => unreachable!("neutral cells in a two-species configuration: {other:?}"),
        })
        .collect())
}

/// Decodes a bicolored Motzkin path back into a configuration, validating
/// the path along the way.
pub fn from_motzkin(steps: &[MotzkinStep]) -> Result<CompleteConfig, Violation> {
    let mut top = Vec::with_capacity(steps.len());
    let mut bottom = Vec::with_capacity(steps.len());
    for step in steps {
        let (t, b) = match step {
            MotzkinStep::Up => (Particle::Black, Particle::Black),
            MotzkinStep::Down => (Particle::White, Particle::White),
            MotzkinStep::LevelBlackWhite => (Particle::Black, Particle::White),
            MotzkinStep::LevelWhiteBlack => (Particle::White, Particle::Black),
        };
        top.push(t);
        bottom.push(b);
    }
    CompleteConfig::new(top, bottom, Boundary::Open2)
}

// --- tests ---
