//! Rate parameters, the y/z labeling of configurations, and the product
//! weights the labeling induces on all three configuration spaces.
//!
//! Every bottom-row particle earns at most one label. A `B/W` column
//! outside every block labels its white particle `z`; a `W/B` column or a
//! block opening at depth zero labels its black particle `y` unless a `z`
//! sits to its left in the same neutral-delimited segment. The weight of a
//! configuration is a monomial in the rates determined by the label counts.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::config::{factorize_slice, Boundary, CompleteConfig, Particle, PrimeFactor};

// --- errors ---

/// Errors raised while building parameters or evaluating weights.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum WeightError {
    #[error("rate {name} must lie in (0, 1]")]
    RateOutOfRange { name: &'static str },
    #[error("epsilon must lie in [0, 1]")]
    EpsilonOutOfRange,
    #[error("epsilon 1 makes the open three-species weight degenerate")]
    EpsilonDegenerate,
    #[error("the neutral-state rate {value} exceeds 1")]
    NeutralRateTooLarge { value: BigRational },
    #[error("the periodic labeling needs at least one neutral column")]
    PeriodicNeedsNeutral,
    #[error("cannot parse {input:?} as a rational number")]
    BadRational { input: String },
}

// --- parameters ---

/// Parses `p/q`, a decimal such as `0.25`, or an integer, exactly.
pub fn parse_rational(input: &str) -> Result<BigRational, WeightError> {
    let bad = || WeightError::BadRational {
        input: input.to_string(),
    };
    let text = input.trim();
    if let Some((numer, denom)) = text.split_once('/') {
        let n: BigInt = numer.trim().parse().map_err(|_| bad())?;
        let d: BigInt = denom.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else if let Some((whole, frac)) = text.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole_part: BigInt = if whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_part: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let scale = (0..frac.len()).fold(BigInt::one(), |acc, _| acc * 10);
        let value = BigRational::new(whole_part * &scale + frac_part, scale);
        Ok(if negative { -value } else { value })
    } else {
        let n: BigInt = text.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Converts an exact rational to the nearest double.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The hop rates: `alpha` in the bulk, `beta` at the left border, `gamma`
/// at the right border, and the neutral-state split `epsilon` for the
/// three-species chains.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RateParams {
    alpha: BigRational,
    beta: BigRational,
    gamma: BigRational,
    epsilon: BigRational,
}

impl RateParams {
    /// Two-species parameters; `epsilon` is zero.
    pub fn new(
        alpha: BigRational,
        beta: BigRational,
        gamma: BigRational,
    ) -> Result<RateParams, WeightError> {
        RateParams::with_epsilon(alpha, beta, gamma, BigRational::zero())
    }

    /// Full parameter set. The hop rates must lie in `(0, 1]` and
    /// `epsilon` in `[0, 1]`.
    pub fn with_epsilon(
        alpha: BigRational,
        beta: BigRational,
        gamma: BigRational,
        epsilon: BigRational,
    ) -> Result<RateParams, WeightError> {
        let one = BigRational::one();
        for (name, rate) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma)] {
            if !rate.is_positive() || *rate > one {
                return Err(WeightError::RateOutOfRange { name });
            }
        }
        if epsilon.is_negative() || epsilon > one {
            return Err(WeightError::EpsilonOutOfRange);
        }
        Ok(RateParams {
            alpha,
            beta,
            gamma,
            epsilon,
        })
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn alpha_f64(&self) -> f64 {
        rational_to_f64(&self.alpha)
    }

    pub fn beta_f64(&self) -> f64 {
        rational_to_f64(&self.beta)
    }

    pub fn gamma_f64(&self) -> f64 {
        rational_to_f64(&self.gamma)
    }

    pub fn epsilon_f64(&self) -> f64 {
        rational_to_f64(&self.epsilon)
    }

    /// The rate attached to neutral-state moves,
    /// `(1 - epsilon) * beta * gamma / alpha`.
    pub fn neutral_rate(&self) -> BigRational {
        (BigRational::one() - &self.epsilon) * &self.beta * &self.gamma / &self.alpha
    }

    /// Checks that the neutral-state rate is a valid rate.
    pub fn check_neutral_rate(&self) -> Result<(), WeightError> {
        let value = self.neutral_rate();
        if value > BigRational::one() {
            return Err(WeightError::NeutralRateTooLarge { value });
        }
        Ok(())
    }
}

// --- labeling ---

/// The y/z labels of a configuration: counts, the 1-based columns carrying
/// each label, and the number of neutral columns.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LabelReport {
    pub n_y: usize,
    pub n_z: usize,
    pub y_positions: Vec<usize>,
    pub z_positions: Vec<usize>,
    pub ell: usize,
}

fn label_factors(factors: &[PrimeFactor], report: &mut LabelReport) {
    let mut seen_z = false;
    for factor in factors {
        match factor {
            PrimeFactor::NeutralColumn { .. } => seen_z = false,
            PrimeFactor::BwColumn { column } => {
                report.n_z += 1;
                report.z_positions.push(*column);
                seen_z = true;
            }
            PrimeFactor::WbColumn { column } => {
                if !seen_z {
                    report.n_y += 1;
                    report.y_positions.push(*column);
                }
            }
            PrimeFactor::Block { start, .. } => {
                if !seen_z {
                    report.n_y += 1;
                    report.y_positions.push(*start);
                }
            }
        }
    }
}

/// Labels a configuration. Open configurations are labeled left to right;
/// periodic ones arc by arc between neutral columns, so they need at least
/// one neutral column to anchor the reading.
pub fn label(cfg: &CompleteConfig) -> Result<LabelReport, WeightError> {
    let mut report = LabelReport {
        ell: cfg.ell(),
        ..LabelReport::default()
    };
    match cfg.boundary() {
        Boundary::Open2 | Boundary::Open3 => {
            let positions: Vec<usize> = (1..=cfg.n()).collect();
            let factors = factorize_slice(cfg.top(), cfg.bottom(), &positions);
            label_factors(&factors, &mut report);
        }
        Boundary::Periodic => {
            let marks = cfg.neutral_columns();
            if marks.is_empty() {
                return Err(WeightError::PeriodicNeedsNeutral);
            }
            let n = cfg.n();
            for (a, &mark) in marks.iter().enumerate() {
                let stop = marks[(a + 1) % marks.len()];
                let mut cells = Vec::new();
                let mut c = mark % n + 1;
                while c != stop {
                    cells.push(c);
                    c = c % n + 1;
                }
                let top: Vec<Particle> = cells.iter().map(|&c| cfg.top_cell(c)).collect();
                let bottom: Vec<Particle> = cells.iter().map(|&c| cfg.bottom_cell(c)).collect();
                let factors = factorize_slice(&top, &bottom, &cells);
                label_factors(&factors, &mut report);
            }
            report.y_positions.sort_unstable();
            report.z_positions.sort_unstable();
        }
    }
    Ok(report)
}

// --- weights ---

fn rat_pow(base: &BigRational, exp: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// The stationary weight of a configuration under the given rates.
pub fn weight(cfg: &CompleteConfig, params: &RateParams) -> Result<BigRational, WeightError> {
    let report = label(cfg)?;
    let n = cfg.n();
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    match cfg.boundary() {
        Boundary::Open2 => Ok(rat_pow(alpha, report.n_y + report.n_z)
            * rat_pow(beta, n - report.n_y)
            * rat_pow(gamma, n - report.n_z)),
        Boundary::Open3 => {
            if params.epsilon().is_one() {
                return Err(WeightError::EpsilonDegenerate);
            }
            let l = report.ell;
            let complement = BigRational::one() - params.epsilon();
            Ok(rat_pow(alpha, report.n_y + report.n_z + 2 * l)
                * rat_pow(beta, n - report.n_y - l)
                * rat_pow(gamma, n - report.n_z - l)
                * rat_pow(params.epsilon(), l)
                * rat_pow(&complement, n - l))
        }
        Boundary::Periodic => {
            let ratio_y = alpha / beta;
            let ratio_z = alpha / gamma;
            Ok(rat_pow(beta, n)
                * rat_pow(gamma, n)
                * rat_pow(&ratio_y, report.n_y)
                * rat_pow(&ratio_z, report.n_z))
        }
    }
}

/// Sums the weights over a slice of configurations.
pub fn partition_sum(
    space: &[CompleteConfig],
    params: &RateParams,
) -> Result<BigRational, WeightError> {
    let mut total = BigRational::zero();
    for cfg in space {
        total += weight(cfg, params)?;
    }
    Ok(total)
}

// --- tests ---

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::prefix_stats;
    use crate::enumerate::{omega, omega0, omega_hat_sector};

    fn cfg(s: &str) -> CompleteConfig {
        s.parse().expect("valid configuration")
    }

    fn rat(s: &str) -> BigRational {
        parse_rational(s).expect("valid rational")
    }

    fn params(a: &str, b: &str, g: &str) -> RateParams {
        RateParams::new(rat(a), rat(b), rat(g)).expect("valid rates")
    }

    fn params_eps(a: &str, b: &str, g: &str, e: &str) -> RateParams {
        RateParams::with_epsilon(rat(a), rat(b), rat(g), rat(e)).expect("valid rates")
    }

    /// Labels a configuration straight from the particle description,
    /// without the factor walk: a `z` on every bottom white lying outside
    /// all blocks, a `y` on every bottom black not strictly inside a block
    /// that has no `z` to its left in its segment.
    fn oracle_positions(c: &CompleteConfig) -> (Vec<usize>, Vec<usize>) {
        let stats = prefix_stats(c);
        let mut ys = Vec::new();
        let mut zs = Vec::new();
        let mut seen_z = false;
        for col in 1..=c.n() {
            let (top, bottom) = c.column(col);
            if top == Particle::Neutral {
                seen_z = false;
                continue;
            }
            let before = stats.e[col - 1];
            let after = stats.e[col];
            if bottom == Particle::White && before == 0 && after == 0 {
                zs.push(col);
                seen_z = true;
            }
            if bottom == Particle::Black && !(before > 0 && after > 0) && !seen_z {
                ys.push(col);
            }
        }
        (ys, zs)
    }

    /// The periodic analog: rotate the circle to start right after a chosen
    /// neutral column, label the rotated word as an open configuration, and
    /// map the positions back.
    fn oracle_positions_periodic(c: &CompleteConfig) -> (Vec<usize>, Vec<usize>) {
        let n = c.n();
        let anchor = c.neutral_columns()[0];
        let cells: Vec<usize> = (0..n).map(|off| (anchor + off) % n + 1).collect();
        let top: Vec<Particle> = cells.iter().map(|&j| c.top_cell(j)).collect();
        let bottom: Vec<Particle> = cells.iter().map(|&j| c.bottom_cell(j)).collect();
        let open = CompleteConfig::new(top, bottom, Boundary::Open3).expect("rotated word");
        let (ys, zs) = oracle_positions(&open);
        let back = |v: Vec<usize>| {
            let mut out: Vec<usize> = v.into_iter().map(|p| cells[p - 1]).collect();
            out.sort_unstable();
            out
        };
        (back(ys), back(zs))
    }

    #[test]
    fn parse_rational_accepts_the_common_forms() {
        assert_eq!(rat("1/3"), BigRational::new(1.into(), 3.into()));
        assert_eq!(rat("2/4"), BigRational::new(1.into(), 2.into()));
        assert_eq!(rat("0.25"), BigRational::new(1.into(), 4.into()));
        assert_eq!(rat(".5"), BigRational::new(1.into(), 2.into()));
        assert_eq!(rat("-0.5"), BigRational::new((-1).into(), 2.into()));
        assert_eq!(rat("1"), BigRational::one());
        assert_eq!(rat(" 3/5 "), BigRational::new(3.into(), 5.into()));
        for bad in ["", "abc", "1/0", ".", "1.2.3", "0x2"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn rate_params_validate_their_ranges() {
        assert!(params("1/2", "1", "1/3").check_neutral_rate().is_ok());
        assert!(RateParams::new(rat("0"), rat("1"), rat("1")).is_err());
        assert!(RateParams::new(rat("1"), rat("3/2"), rat("1")).is_err());
        assert!(RateParams::new(rat("1"), rat("1"), rat("-1/2")).is_err());
        assert!(RateParams::with_epsilon(rat("1"), rat("1"), rat("1"), rat("2")).is_err());
        // beta * gamma / alpha can exceed 1, which the neutral-rate check rejects.
        let p = params("1/4", "1", "1");
        assert_eq!(p.neutral_rate(), rat("4"));
        assert!(matches!(
            p.check_neutral_rate(),
            Err(WeightError::NeutralRateTooLarge { .. })
        ));
        // A large epsilon can rescue it.
        let p = params_eps("1/4", "1", "1", "7/8");
        assert_eq!(p.neutral_rate(), rat("1/2"));
        assert!(p.check_neutral_rate().is_ok());
    }

    #[test]
    fn labels_of_small_configurations() {
        let rep = label(&cfg("BW/BW")).unwrap();
        assert_eq!((rep.n_y, rep.n_z), (1, 0));
        assert_eq!(rep.y_positions, vec![1]);
        let rep = label(&cfg("WB/BW")).unwrap();
        assert_eq!((rep.n_y, rep.n_z), (1, 1));
        assert_eq!((rep.y_positions, rep.z_positions), (vec![1], vec![2]));
        let rep = label(&cfg("BW/WB")).unwrap();
        assert_eq!((rep.n_y, rep.n_z), (0, 1));
        assert_eq!(rep.z_positions, vec![1]);
        // A neutral column resets the z memory.
        let rep = label(&cfg("BWXWB/WBXBW@open3")).unwrap();
        assert_eq!((rep.n_y, rep.n_z), (1, 2));
        assert_eq!((rep.y_positions, rep.z_positions), (vec![4], vec![1, 5]));
        // Periodic labels read arc by arc, including the wrapping arc.
        let rep = label(&cfg("XBW/XWB@periodic")).unwrap();
        assert_eq!((rep.n_y, rep.n_z), (0, 1));
        assert_eq!(rep.z_positions, vec![2]);
        let rep = label(&cfg("BXW/WXB@periodic")).unwrap();
        assert_eq!((rep.n_y, rep.n_z), (1, 1));
        assert_eq!((rep.y_positions, rep.z_positions), (vec![3], vec![1]));
        assert!(matches!(
            label(&cfg("BW/WB@periodic")),
            Err(WeightError::PeriodicNeedsNeutral)
        ));
    }

    #[test]
    fn factor_walk_matches_the_particle_description() {
        for n in 0..=6 {
            for c in omega0(n) {
                let rep = label(&c).unwrap();
                let (ys, zs) = oracle_positions(&c);
                assert_eq!((rep.y_positions, rep.z_positions), (ys, zs), "{c}");
            }
        }
        for n in 0..=5 {
            for c in omega(n) {
                let rep = label(&c).unwrap();
                let (ys, zs) = oracle_positions(&c);
                assert_eq!((rep.y_positions, rep.z_positions), (ys, zs), "{c}");
            }
        }
        for (n, k, l, m) in [(3, 1, 1, 1), (4, 1, 1, 2), (4, 1, 2, 1), (5, 2, 1, 2)] {
            for c in omega_hat_sector(n, k, l, m).unwrap() {
                let rep = label(&c).unwrap();
                let (ys, zs) = oracle_positions_periodic(&c);
                assert_eq!((rep.y_positions, rep.z_positions), (ys, zs), "{c}");
            }
        }
    }

    #[test]
    fn z_labels_sit_on_bw_columns_only() {
        for n in 0..=5 {
            for c in omega(n) {
                let rep = label(&c).unwrap();
                for &p in &rep.z_positions {
                    assert_eq!(c.column(p), (Particle::Black, Particle::White), "{c}");
                }
                for &p in &rep.y_positions {
                    assert_eq!(c.bottom_cell(p), Particle::Black, "{c}");
                }
            }
        }
    }

    #[test]
    fn wb_column_after_a_black_cell_is_never_y() {
        for n in 2..=6 {
            for c in omega0(n) {
                let rep = label(&c).unwrap();
                for wall in 1..n {
                    if c.top_cell(wall) == Particle::Black
                        && c.column(wall + 1) == (Particle::White, Particle::Black)
                    {
                        assert!(!rep.y_positions.contains(&(wall + 1)), "{c} wall {wall}");
                    }
                }
            }
        }
    }

    #[test]
    fn removing_a_movable_wb_column_preserves_the_other_labels() {
        use crate::kernel::{classify, reduce_pair, ClassTag};
        for n in 1..=5 {
            for c in omega(n) {
                for wall in 0..=n {
                    if classify(&c, wall).tag != ClassTag::RelocateLeft {
                        continue;
                    }
                    let removed = wall + 1;
                    let reduced = reduce_pair(&c, wall).unwrap();
                    let rep = label(&c).unwrap();
                    let rep_reduced = label(&reduced).unwrap();
                    let map = |v: &[usize]| -> Vec<usize> {
                        v.iter()
                            .filter(|&&p| p != removed)
                            .map(|&p| if p > removed { p - 1 } else { p })
                            .collect()
                    };
                    assert_eq!(
                        rep_reduced.y_positions,
                        map(&rep.y_positions),
                        "{c} wall {wall}"
                    );
                    assert_eq!(
                        rep_reduced.z_positions,
                        map(&rep.z_positions),
                        "{c} wall {wall}"
                    );
                }
            }
        }
    }

    #[test]
    fn removing_a_diagonal_preserves_all_labels() {
        use crate::kernel::{classify, reduce_pair, ClassTag};
        for n in 2..=5 {
            for c in omega(n) {
                for wall in 1..n {
                    if classify(&c, wall).tag != ClassTag::RelocateRightDiagonal {
                        continue;
                    }
                    let reduced = reduce_pair(&c, wall).unwrap();
                    let rep = label(&c).unwrap();
                    let rep_reduced = label(&reduced).unwrap();
                    let map = |v: &[usize]| -> Vec<usize> {
                        v.iter()
                            .map(|&p| if p > wall { p - 1 } else { p })
                            .collect()
                    };
                    assert_eq!(
                        rep_reduced.y_positions,
                        map(&rep.y_positions),
                        "{c} wall {wall}"
                    );
                    assert_eq!(
                        rep_reduced.z_positions,
                        map(&rep.z_positions),
                        "{c} wall {wall}"
                    );
                }
            }
        }
    }

    #[test]
    fn weights_at_size_two_match_the_derived_table() {
        let p = params("1/2", "1/3", "1/5");
        let (a, b, g) = (rat("1/2"), rat("1/3"), rat("1/5"));
        let table = [
            ("BW/BW", &a * &b * &g * &g),
            ("BW/WB", &a * &b * &b * &g),
            ("WB/BW", &a * &a * &b * &g),
            ("BB/WW", &a * &a * &b * &b),
            ("WW/BB", &a * &a * &g * &g),
        ];
        for (s, expected) in &table {
            assert_eq!(weight(&cfg(s), &p).unwrap(), *expected, "{s}");
        }
        let total: BigRational = table.iter().map(|(_, w)| w.clone()).sum();
        assert_eq!(partition_sum(&omega0(2), &p).unwrap(), total);
    }

    #[test]
    fn three_species_weight_handles_neutral_columns() {
        let p = params_eps("1/2", "1/3", "1/5", "1/4");
        // X/X has one neutral column: weight alpha^2 * epsilon.
        assert_eq!(
            weight(&cfg("X/X@open3"), &p).unwrap(),
            rat("1/4") * rat("1/4")
        );
        // W/B is a plain y column with the (1 - epsilon) factor.
        assert_eq!(
            weight(&cfg("W/B@open3"), &p).unwrap(),
            rat("1/2") * rat("1/5") * rat("3/4")
        );
        assert!(matches!(
            weight(&cfg("X/X@open3"), &params_eps("1", "1", "1", "1")),
            Err(WeightError::EpsilonDegenerate)
        ));
    }

    #[test]
    fn periodic_weight_uses_the_rate_ratios() {
        let p = params("1/2", "1/3", "1/5");
        // XBW/XWB: one z, no y.
        let expected = rat("1/3")
            * rat("1/3")
            * rat("1/3")
            * rat("1/5")
            * rat("1/5")
            * rat("1/5")
            * (rat("1/2") / rat("1/5"));
        assert_eq!(weight(&cfg("XBW/XWB@periodic"), &p).unwrap(), expected);
    }
}
