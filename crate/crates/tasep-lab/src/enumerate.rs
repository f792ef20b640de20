//! Exhaustive generation of the configuration spaces, the closed counting
//! formulas they satisfy, and the padding and conjugation bijections that
//! relate constrained configurations to unconstrained column words.

use std::fmt;
use std::str::FromStr;

use num::BigUint;
use thiserror::Error;

use crate::config::{Boundary, CompleteConfig, ConfigError, Particle, TasepRow, Violation};

// --- errors ---

/// Errors raised by space generation and the bijections.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum EnumError {
    #[error("sector (k={k}, l={l}, m={m}) does not fit size {n}")]
    SectorMismatch {
        n: usize,
        k: usize,
        l: usize,
        m: usize,
    },
    #[error("bad column pair: {0}")]
    BadPair(#[from] ConfigError),
    #[error("the pair is empty")]
    EmptyPair,
    #[error("the final top cell is not black")]
    LastCellNotBlack,
    #[error("the pair is not balanced (final level {level})")]
    Unbalanced { level: i64 },
    #[error("column {column} is not a first-passage mark")]
    BadMark { column: usize },
    #[error("the value is outside the bijection's image: {0}")]
    NotInImage(Violation),
}

// --- closed counting formulas ---

/// Binomial coefficient `C(n, k)` in exact arithmetic.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut result = BigUint::from(1u32);
    for i in 0..k {
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

/// Catalan number `C(2n, n) / (n + 1)`.
pub fn catalan(n: u64) -> BigUint {
    binomial(2 * n, n) / BigUint::from(n + 1)
}

/// Narayana count for balanced two-row words of size `n` with `k` black top
/// cells: `C(n+1, k) * C(n+1, n-k) / (n+1)`.
pub fn narayana(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    binomial(n + 1, k) * binomial(n + 1, n - k) / BigUint::from(n + 1)
}

/// Number of balanced nonnegative two-species configurations of size `n`.
pub fn count_omega0(n: u64) -> BigUint {
    catalan(n + 1)
}

/// Number of such configurations with `k` black top cells.
pub fn count_omega0_sector(n: u64, k: u64) -> BigUint {
    narayana(n, k)
}

/// Number of open three-species configurations of size `n`, all neutral
/// multiplicities combined: `C(2n+2, n+1) / 2`.
pub fn count_omega(n: u64) -> BigUint {
    binomial(2 * n + 2, n + 1) / BigUint::from(2u32)
}

/// Number of open three-species configurations with `l` neutral columns:
/// `(l+1)/(n+1) * C(2n+2, n-l)`.
pub fn count_omega_level(n: u64, l: u64) -> BigUint {
    if l > n {
        return BigUint::from(0u32);
    }
    BigUint::from(l + 1) * binomial(2 * n + 2, n - l) / BigUint::from(n + 1)
}

/// Number of open three-species configurations with `l` neutral columns and
/// `k` black top cells: `(l+1)/(n+1) * C(n+1, k) * C(n+1, m)`, `m = n-l-k`.
pub fn count_omega_level_sector(n: u64, l: u64, k: u64) -> BigUint {
    if l + k > n {
        return BigUint::from(0u32);
    }
    let m = n - l - k;
    BigUint::from(l + 1) * binomial(n + 1, k) * binomial(n + 1, m) / BigUint::from(n + 1)
}

/// Number of periodic configurations with `l` neutral columns and `k` black
/// top cells: `C(n, k) * C(n, m)`, `m = n-l-k`.
pub fn count_omega_hat_sector(n: u64, l: u64, k: u64) -> BigUint {
    if l + k > n {
        return BigUint::from(0u32);
    }
    let m = n - l - k;
    binomial(n, k) * binomial(n, m)
}

/// Number of balanced unconstrained pairs of the given length: `C(2len, len)`.
pub fn count_gamma(len: u64) -> BigUint {
    binomial(2 * len, len)
}

/// Number of balanced unconstrained pairs whose final top cell is black:
/// `C(2len, len) / 2`.
pub fn count_gamma_bar(len: u64) -> BigUint {
    if len == 0 {
        return BigUint::from(0u32);
    }
    binomial(2 * len, len) / BigUint::from(2u32)
}

/// Number of unconstrained pairs of the given length with `k` black top and
/// `m` black bottom cells: `C(len, k) * C(len, m)`.
pub fn count_delta(len: u64, k: u64, m: u64) -> BigUint {
    binomial(len, k) * binomial(len, m)
}

// --- configuration space generation ---

fn generate_open(
    n: usize,
    allow_neutral: bool,
    want_l: Option<usize>,
    want_k: Option<usize>,
    boundary: Boundary,
) -> Vec<CompleteConfig> {
    fn recurse(
        n: usize,
        e: i64,
        used_l: usize,
        used_k: usize,
        allow_neutral: bool,
        want_l: Option<usize>,
        want_k: Option<usize>,
        boundary: Boundary,
        top: &mut Vec<Particle>,
        bottom: &mut Vec<Particle>,
        out: &mut Vec<CompleteConfig>,
    ) {
        let pos = top.len();
        if pos == n {
            if e == 0
                && want_l.map_or(true, |l| used_l == l)
                && want_k.map_or(true, |k| used_k == k)
            {
                out.push(CompleteConfig::from_parts_unchecked(
                    top.clone(),
                    bottom.clone(),
                    boundary,
                ));
            }
            return;
        }
        let rem = n - pos;
        if e > 2 * rem as i64 {
            return;
        }
        if let Some(l) = want_l {
            if used_l > l || l - used_l > rem {
                return;
            }
        }
        if let Some(k) = want_k {
            if used_k > k || k - used_k > rem {
                return;
            }
        }
        let mut columns: Vec<(Particle, Particle)> = vec![
            (Particle::Black, Particle::Black),
            (Particle::Black, Particle::White),
            (Particle::White, Particle::Black),
        ];
        if e >= 2 {
            columns.push((Particle::White, Particle::White));
        }
        if allow_neutral && e == 0 {
            columns.push((Particle::Neutral, Particle::Neutral));
        }
        for (t, b) in columns {
            let de = match (t, b) {
                (Particle::Black, Particle::Black) => 2,
                (Particle::White, Particle::White) => -2,
                _ => 0,
            };
            let dl = (t == Particle::Neutral) as usize;
            let dk = (t == Particle::Black) as usize;
            top.push(t);
            bottom.push(b);
            recurse(
                n,
                e + de,
                used_l + dl,
                used_k + dk,
                allow_neutral,
                want_l,
                want_k,
                boundary,
                top,
                bottom,
                out,
            );
            top.pop();
            bottom.pop();
        }
    }

    let mut out = Vec::new();
    let mut top = Vec::with_capacity(n);
    let mut bottom = Vec::with_capacity(n);
    recurse(
        n,
        0,
        0,
        0,
        allow_neutral,
        want_l,
        want_k,
        boundary,
        &mut top,
        &mut bottom,
        &mut out,
    );
    out.sort();
    out
}

/// All balanced nonnegative two-species configurations of size `n`, sorted.
pub fn omega0(n: usize) -> Vec<CompleteConfig> {
    generate_open(n, false, None, None, Boundary::Open2)
}

/// The configurations of [`omega0`] with `k` black top cells.
pub fn omega0_sector(n: usize, k: usize) -> Vec<CompleteConfig> {
    generate_open(n, false, None, Some(k), Boundary::Open2)
}

/// All open three-species configurations of size `n`, sorted.
pub fn omega(n: usize) -> Vec<CompleteConfig> {
    generate_open(n, true, None, None, Boundary::Open3)
}

/// The configurations of [`omega`] with `l` neutral columns.
pub fn omega_level(n: usize, l: usize) -> Vec<CompleteConfig> {
    generate_open(n, true, Some(l), None, Boundary::Open3)
}

/// The configurations of [`omega`] with `l` neutral columns and `k` black
/// top cells.
pub fn omega_level_sector(n: usize, l: usize, k: usize) -> Vec<CompleteConfig> {
    generate_open(n, true, Some(l), Some(k), Boundary::Open3)
}

fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn recurse(
        n: usize,
        size: usize,
        from: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let needed = size - cur.len();
        for v in from..=n {
            if n - v + 1 < needed {
                break;
            }
            cur.push(v);
            recurse(n, size, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        recurse(n, size, 1, &mut Vec::new(), &mut out);
    } else if size == 0 {
        out.push(Vec::new());
    }
    out
}

/// All periodic configurations of size `n` with `k` black top cells, `l`
/// neutral columns, and `m` white top cells, sorted. Each arc between
/// consecutive neutral columns must be balanced and nonnegative; with
/// `l = 0` only total balance is required.
pub fn omega_hat_sector(
    n: usize,
    k: usize,
    l: usize,
    m: usize,
) -> Result<Vec<CompleteConfig>, EnumError> {
    if k + l + m != n {
        return Err(EnumError::SectorMismatch { n, k, l, m });
    }
    let mut out = Vec::new();
    if l == 0 {
        let tops = rows_with_counts(n, k);
        let bottoms = rows_with_counts(n, m);
        for top in &tops {
            for bottom in &bottoms {
                out.push(CompleteConfig::from_parts_unchecked(
                    top.clone(),
                    bottom.clone(),
                    Boundary::Periodic,
                ));
            }
        }
    } else {
        let max_arc = n - l;
        let words_by_len: Vec<Vec<CompleteConfig>> = (0..=max_arc).map(omega0).collect();
        for xs in combinations(n, l) {
            let mut arcs: Vec<Vec<usize>> = Vec::with_capacity(l);
            for a in 0..l {
                let start = xs[a];
                let stop = xs[(a + 1) % l];
                let mut cells = Vec::new();
                let mut c = start % n + 1;
                while c != stop {
                    cells.push(c);
                    c = c % n + 1;
                }
                arcs.push(cells);
            }
            fill_arcs(
                n,
                k,
                &xs,
                &arcs,
                0,
                &words_by_len,
                &mut Vec::new(),
                &mut out,
            );
        }
    }
    out.sort();
    Ok(out)
}

fn fill_arcs(
    n: usize,
    k: usize,
    xs: &[usize],
    arcs: &[Vec<usize>],
    arc_idx: usize,
    words_by_len: &[Vec<CompleteConfig>],
    chosen: &mut Vec<CompleteConfig>,
    out: &mut Vec<CompleteConfig>,
) {
    let used_k: usize = chosen.iter().map(|w| w.top_black_count()).sum();
    if used_k > k {
        return;
    }
    if arc_idx == arcs.len() {
        if used_k != k {
            return;
        }
        let mut top = vec![Particle::Neutral; n];
        let mut bottom = vec![Particle::Neutral; n];
        for (arc, word) in arcs.iter().zip(chosen.iter()) {
            for (slot, &cell) in arc.iter().enumerate() {
                top[cell - 1] = word.top()[slot];
                bottom[cell - 1] = word.bottom()[slot];
            }
        }
        debug_assert!(xs.iter().all(|&x| top[x - 1] == Particle::Neutral));
        out.push(CompleteConfig::from_parts_unchecked(
            top,
            bottom,
            Boundary::Periodic,
        ));
        return;
    }
    for word in &words_by_len[arcs[arc_idx].len()] {
        chosen.push(word.clone());
        fill_arcs(n, k, xs, arcs, arc_idx + 1, words_by_len, chosen, out);
        chosen.pop();
    }
}

fn rows_with_counts(n: usize, black: usize) -> Vec<Vec<Particle>> {
    fn recurse(n: usize, black: usize, cur: &mut Vec<Particle>, out: &mut Vec<Vec<Particle>>) {
        let used: usize = cur.iter().filter(|&&c| c == Particle::Black).count();
        let rem = n - cur.len();
        if used > black || black - used > rem {
            return;
        }
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for p in [Particle::Black, Particle::White] {
            cur.push(p);
            recurse(n, black, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    recurse(n, black, &mut Vec::new(), &mut out);
    out
}

// --- row spaces ---

/// All two-species rows of length `n`, in lexicographic order.
pub fn rows2(n: usize) -> Vec<TasepRow> {
    let mut out = Vec::with_capacity(1 << n);
    let mut cur = Vec::with_capacity(n);
    fn recurse(n: usize, cur: &mut Vec<Particle>, out: &mut Vec<TasepRow>) {
        if cur.len() == n {
            out.push(TasepRow::new(cur.clone()));
            return;
        }
        for p in [Particle::Black, Particle::White] {
            cur.push(p);
            recurse(n, cur, out);
            cur.pop();
        }
    }
    recurse(n, &mut cur, &mut out);
    out
}

/// All three-species rows of length `n`, in lexicographic order.
pub fn rows3(n: usize) -> Vec<TasepRow> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn recurse(n: usize, cur: &mut Vec<Particle>, out: &mut Vec<TasepRow>) {
        if cur.len() == n {
            out.push(TasepRow::new(cur.clone()));
            return;
        }
        for p in [Particle::Black, Particle::White, Particle::Neutral] {
            cur.push(p);
            recurse(n, cur, out);
            cur.pop();
        }
    }
    recurse(n, &mut cur, &mut out);
    out
}

/// All rows of length `n` with exactly `k` black, `l` neutral, and `m` white
/// cells, in lexicographic order.
pub fn rows_circular(n: usize, k: usize, l: usize, m: usize) -> Result<Vec<TasepRow>, EnumError> {
    if k + l + m != n {
        return Err(EnumError::SectorMismatch { n, k, l, m });
    }
    fn recurse(
        n: usize,
        k: usize,
        l: usize,
        m: usize,
        cur: &mut Vec<Particle>,
        out: &mut Vec<TasepRow>,
    ) {
        if cur.len() == n {
            out.push(TasepRow::new(cur.clone()));
            return;
        }
        let used_k = cur.iter().filter(|&&c| c == Particle::Black).count();
        let used_l = cur.iter().filter(|&&c| c == Particle::Neutral).count();
        let used_m = cur.len() - used_k - used_l;
        for p in [Particle::Black, Particle::White, Particle::Neutral] {
            let fits = match p {
                Particle::Black => used_k < k,
                Particle::White => used_m < m,
                Particle::Neutral => used_l < l,
            };
            if fits {
                cur.push(p);
                recurse(n, k, l, m, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    recurse(n, k, l, m, &mut Vec::new(), &mut out);
    Ok(out)
}

// --- unconstrained pairs ---

/// A two-species column pair with no balance or positivity constraint.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UnconstrainedPair {
    top: Vec<Particle>,
    bottom: Vec<Particle>,
}

impl UnconstrainedPair {
    /// Wraps two equal-length neutral-free rows.
    pub fn new(top: Vec<Particle>, bottom: Vec<Particle>) -> Result<UnconstrainedPair, EnumError> {
        if top.len() != bottom.len() {
            return Err(EnumError::BadPair(ConfigError::Invalid(
                Violation::LengthMismatch {
                    top: top.len(),
                    bottom: bottom.len(),
                },
            )));
        }
        if top
            .iter()
            .chain(bottom.iter())
            .any(|&c| c == Particle::Neutral)
        {
            return Err(EnumError::BadPair(ConfigError::BadCell { ch: 'X' }));
        }
        Ok(UnconstrainedPair { top, bottom })
    }

    /// Number of columns.
    pub fn n(&self) -> usize {
        self.top.len()
    }

    /// The top row.
    pub fn top(&self) -> &[Particle] {
        &self.top
    }

    /// The bottom row.
    pub fn bottom(&self) -> &[Particle] {
        &self.bottom
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

    /// Prefix level at each wall: black minus white cells in both rows,
    /// left of the wall. Length `n + 1`.
    pub fn e_profile(&self) -> Vec<i64> {
        let mut levels = Vec::with_capacity(self.n() + 1);
        let mut e = 0i64;
        levels.push(0);
        for j in 0..self.n() {
            for cell in [self.top[j], self.bottom[j]] {
                e += match cell {
                    Particle::Black => 1,
                    Particle::White => -1,
                    Particle::Neutral => 0,
                };
            }
            levels.push(e);
        }
        levels
    }

    /// Serialized form `TOP/BOTTOM`.
    pub fn serialize(&self) -> String {
        let mut s = String::with_capacity(2 * self.n() + 1);
        for c in &self.top {
            s.push(c.as_char());
        }
        s.push('/');
        for c in &self.bottom {
            s.push(c.as_char());
        }
        s
    }
}

impl fmt::Display for UnconstrainedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for UnconstrainedPair {
    type Err = EnumError;

    fn from_str(s: &str) -> Result<UnconstrainedPair, EnumError> {
        let (top_s, bottom_s) = s
            .split_once('/')
            .ok_or(EnumError::BadPair(ConfigError::MissingSeparator))?;
        let top: TasepRow = top_s.parse().map_err(EnumError::BadPair)?;
        let bottom: TasepRow = bottom_s.parse().map_err(EnumError::BadPair)?;
        UnconstrainedPair::new(top.cells().to_vec(), bottom.cells().to_vec())
    }
}

fn generate_pairs(len: usize, keep: impl Fn(&UnconstrainedPair) -> bool) -> Vec<UnconstrainedPair> {
    fn recurse(
        len: usize,
        top: &mut Vec<Particle>,
        bottom: &mut Vec<Particle>,
        out: &mut Vec<UnconstrainedPair>,
        keep: &impl Fn(&UnconstrainedPair) -> bool,
    ) {
        if top.len() == len {
            let pair = UnconstrainedPair {
                top: top.clone(),
                bottom: bottom.clone(),
            };
            if keep(&pair) {
                out.push(pair);
            }
            return;
        }
        for t in [Particle::Black, Particle::White] {
            for b in [Particle::Black, Particle::White] {
                top.push(t);
                bottom.push(b);
                recurse(len, top, bottom, out, keep);
                top.pop();
                bottom.pop();
            }
        }
    }
    let mut out = Vec::new();
    recurse(len, &mut Vec::new(), &mut Vec::new(), &mut out, &keep);
    out.sort();
    out
}

/// All balanced unconstrained pairs of the given length, sorted.
pub fn gamma_pairs(len: usize) -> Vec<UnconstrainedPair> {
    generate_pairs(len, |p| p.top_black_count() + p.bottom_black_count() == len)
}

/// Balanced unconstrained pairs whose final top cell is black, sorted.
pub fn gamma_bar_pairs(len: usize) -> Vec<UnconstrainedPair> {
    generate_pairs(len, |p| {
        p.top_black_count() + p.bottom_black_count() == len
            && p.top().last() == Some(&Particle::Black)
    })
}

/// All unconstrained pairs with `k` black top cells and `m` black bottom
/// cells, sorted.
pub fn delta_words(len: usize, k: usize, m: usize) -> Vec<UnconstrainedPair> {
    generate_pairs(len, |p| {
        p.top_black_count() == k && p.bottom_black_count() == m
    })
}

// --- padding bijection ---

/// Pads an open configuration to an unconstrained pair one column longer:
/// append a `B/W` column when the neutral count is even, else a neutral
/// column, then recolor the neutral columns left to right, first half to
/// `W/W` and second half to `B/B`.
pub fn pad_to_unconstrained(cfg: &CompleteConfig) -> Result<UnconstrainedPair, EnumError> {
    if cfg.boundary() == Boundary::Periodic {
        return Err(EnumError::BadPair(ConfigError::UnknownBoundary {
            token: Boundary::Periodic.as_str().to_string(),
        }));
    }
    let mut top = cfg.top().to_vec();
    let mut bottom = cfg.bottom().to_vec();
    if cfg.ell() % 2 == 0 {
        top.push(Particle::Black);
        bottom.push(Particle::White);
    } else {
        top.push(Particle::Neutral);
        bottom.push(Particle::Neutral);
    }
    let neutral: Vec<usize> = (0..top.len())
        .filter(|&j| top[j] == Particle::Neutral)
        .collect();
    debug_assert_eq!(neutral.len() % 2, 0);
    let half = neutral.len() / 2;
    for (rank, &j) in neutral.iter().enumerate() {
        let color = if rank < half {
            Particle::White
        } else {
            Particle::Black
        };
        top[j] = color;
        bottom[j] = color;
    }
    UnconstrainedPair::new(top, bottom)
}

/// Inverts [`pad_to_unconstrained`]: marks, for each depth the level profile
/// reaches, the first column that attains it and the last column that leaves
/// it, recolors those columns neutral, and drops the final column.
pub fn unpad_to_complete(pair: &UnconstrainedPair) -> Result<CompleteConfig, EnumError> {
    let n_padded = pair.n();
    if n_padded == 0 {
        return Err(EnumError::EmptyPair);
    }
    if pair.top().last() != Some(&Particle::Black) {
        return Err(EnumError::LastCellNotBlack);
    }
    let levels = pair.e_profile();
    if levels[n_padded] != 0 {
        return Err(EnumError::Unbalanced {
            level: levels[n_padded],
        });
    }
    let depth = *levels.iter().min().expect("nonempty profile");
    debug_assert!(depth <= 0 && depth % 2 == 0);
    let t = (-depth / 2) as usize;
    let mut top = pair.top().to_vec();
    let mut bottom = pair.bottom().to_vec();
    let mut marks = Vec::with_capacity(2 * t);
    for i in 1..=t {
        let target = -2 * (i as i64);
        let down = (1..=n_padded)
            .find(|&j| levels[j] == target)
            .expect("depth is attained");
        let up = (1..=n_padded)
            .rev()
            .find(|&j| levels[j - 1] == target)
            .expect("depth is left");
        debug_assert_eq!(
            (top[down - 1], bottom[down - 1]),
            (Particle::White, Particle::White)
        );
        debug_assert_eq!(
            (top[up - 1], bottom[up - 1]),
            (Particle::Black, Particle::Black)
        );
        marks.push(down);
        marks.push(up);
    }
    marks.sort_unstable();
    debug_assert!(marks.windows(2).all(|w| w[0] < w[1]));
    for &j in &marks {
        top[j - 1] = Particle::Neutral;
        bottom[j - 1] = Particle::Neutral;
    }
    // The final column is either a mark (when the original neutral count was
    // odd) or the appended B/W column: a B/B final column forces a depth of
    // -2 at the second-to-last wall, which marks it.
    debug_assert!(
        top[n_padded - 1] == Particle::Neutral || bottom[n_padded - 1] == Particle::White
    );
    top.pop();
    bottom.pop();
    CompleteConfig::new(top, bottom, Boundary::Open3).map_err(EnumError::NotInImage)
}

// --- first-passage marks and the conjugation bijections ---

/// Columns at which the level profile first attains each of its `|E(n)|/2`
/// lowest even depths, ascending. Empty when the pair ends at level zero or
/// above.
pub fn first_passage_columns(pair: &UnconstrainedPair) -> Vec<usize> {
    let levels = pair.e_profile();
    let end = levels[pair.n()];
    if end >= 0 {
        return Vec::new();
    }
    let depth = *levels.iter().min().expect("nonempty profile");
    let t = (-end / 2) as usize;
    let mut marks = Vec::with_capacity(t);
    for i in 0..t {
        let target = depth + 2 * i as i64;
        let j = (1..=pair.n())
            .find(|&j| levels[j] == target)
            .expect("every level above the minimum is attained");
        marks.push(j);
    }
    marks.sort_unstable();
    debug_assert!(marks.windows(2).all(|w| w[0] < w[1]));
    marks
}

/// Conjugation from a marked unconstrained word to an open configuration
/// with a distinguished wall: recolor all first-passage columns neutral,
/// rotate the chosen mark to the last position, and drop it. The returned
/// wall is `n + 1 - mark`.
pub fn conjugate_to_complete(
    pair: &UnconstrainedPair,
    mark: usize,
) -> Result<(CompleteConfig, usize), EnumError> {
    let marks = first_passage_columns(pair);
    if !marks.contains(&mark) {
        return Err(EnumError::BadMark { column: mark });
    }
    let len = pair.n();
    let mut top = Vec::with_capacity(len - 1);
    let mut bottom = Vec::with_capacity(len - 1);
    for offset in 1..len {
        let j = (mark + offset - 1) % len + 1;
        if marks.contains(&j) {
            top.push(Particle::Neutral);
            bottom.push(Particle::Neutral);
        } else {
            top.push(pair.top()[j - 1]);
            bottom.push(pair.bottom()[j - 1]);
        }
    }
    let wall = len - mark;
    let cfg = CompleteConfig::new(top, bottom, Boundary::Open3).map_err(EnumError::NotInImage)?;
    Ok((cfg, wall))
}

/// Inverts [`conjugate_to_complete`]: append a neutral column, rotate so the
/// appended column takes the mark's position, recolor neutral columns to
/// `W/W`, and check the mark really is a first passage of the result.
pub fn conjugate_from_complete(
    cfg: &CompleteConfig,
    wall: usize,
) -> Result<(UnconstrainedPair, usize), EnumError> {
    if cfg.boundary() == Boundary::Periodic {
        return Err(EnumError::BadPair(ConfigError::UnknownBoundary {
            token: Boundary::Periodic.as_str().to_string(),
        }));
    }
    let n = cfg.n();
    if wall > n {
        return Err(EnumError::BadMark { column: wall });
    }
    let len = n + 1;
    let mark = len - wall;
    let mut plus_top = cfg.top().to_vec();
    let mut plus_bottom = cfg.bottom().to_vec();
    plus_top.push(Particle::Neutral);
    plus_bottom.push(Particle::Neutral);
    let mut top = vec![Particle::White; len];
    let mut bottom = vec![Particle::White; len];
    let mut from_neutral = Vec::new();
    for (offset, (&t, &b)) in plus_top.iter().zip(plus_bottom.iter()).enumerate() {
        // Position `mark + 1 + offset` cyclically, undoing the rotation that
        // put the marked column last.
        let j = (mark + offset) % len + 1;
        if t == Particle::Neutral {
            from_neutral.push(j);
        } else {
            top[j - 1] = t;
            bottom[j - 1] = b;
        }
    }
    from_neutral.sort_unstable();
    let pair = UnconstrainedPair::new(top, bottom)?;
    if first_passage_columns(&pair) != from_neutral {
        return Err(EnumError::BadMark { column: mark });
    }
    Ok((pair, mark))
}

/// Wraps an unconstrained word into a periodic configuration by recoloring
/// its first-passage columns neutral and closing the row into a circle.
pub fn wrap_to_circular(pair: &UnconstrainedPair) -> Result<CompleteConfig, EnumError> {
    let marks = first_passage_columns(pair);
    let mut top = pair.top().to_vec();
    let mut bottom = pair.bottom().to_vec();
    for &j in &marks {
        top[j - 1] = Particle::Neutral;
        bottom[j - 1] = Particle::Neutral;
    }
    CompleteConfig::new(top, bottom, Boundary::Periodic).map_err(EnumError::NotInImage)
}

/// Inverts [`wrap_to_circular`]: recolor neutral columns to `W/W` and read
/// the circle linearly from cell 1, checking that the neutral columns were
/// exactly the first passages.
pub fn unwrap_from_circular(cfg: &CompleteConfig) -> Result<UnconstrainedPair, EnumError> {
    if cfg.boundary() != Boundary::Periodic {
        return Err(EnumError::BadPair(ConfigError::UnknownBoundary {
            token: cfg.boundary().as_str().to_string(),
        }));
    }
    let neutral = cfg.neutral_columns();
    let mut top = cfg.top().to_vec();
    let mut bottom = cfg.bottom().to_vec();
    for &j in &neutral {
        top[j - 1] = Particle::White;
        bottom[j - 1] = Particle::White;
    }
    let pair = UnconstrainedPair::new(top, bottom)?;
    if first_passage_columns(&pair) != neutral {
        return Err(EnumError::BadMark {
            column: *neutral.first().unwrap_or(&0),
        });
    }
    Ok(pair)
}

// --- tests ---
