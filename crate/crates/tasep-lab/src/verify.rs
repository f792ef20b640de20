//! The self-check suite: fifteen named checks covering the counting
//! formulas, the bijections, the weight transport identities, stationary
//! laws, structural properties, and the walk decomposition.
//!
//! Each check exhausts its stated range and reports a pass with details or
//! a counterexample. Checks run in parallel on a small work queue; set
//! `TASEP_LAB_THREADS` to pin the worker count.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num::{BigInt, BigRational, BigUint, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{
    check_aperiodic, check_irreducible, circular_pattern, lambda_circular, lambda_wall, mass_split,
    open_pattern, stationary_exact, strongly_connected_components, transition_matrix,
    verify_stationary, ChainSpec, Model, Sector,
};
use crate::config::{from_motzkin, to_motzkin, CompleteConfig, Particle};
use crate::enumerate::{
    binomial, catalan, count_delta, count_gamma, count_gamma_bar, count_omega,
    count_omega_hat_sector, count_omega_level, count_omega_level_sector, delta_words,
    gamma_bar_pairs, gamma_pairs, narayana, omega, omega0, omega0_sector, omega_hat_sector,
    omega_level, omega_level_sector, rows_circular,
};
use crate::excursion::{excursion_sum_identity, join, split, walks};
use crate::kernel::{
    border_swap, circular_map, pair_orbit, reduce_pair, relocation_map, relocation_map_inverse,
    relocation_map_primary, relocation_map_primary_inverse, relocation_map_secondary,
    relocation_map_secondary_inverse, sweep_map, OrbitMap,
};
use crate::weight::{weight, RateParams};

// --- reports ---

/// How much ground the suite covers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Profile {
    Quick,
    Full,
}

impl Profile {
    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        }
    }

    /// Picks the size bound for the active profile.
    fn pick(&self, quick: usize, full: usize) -> usize {
        match self {
            Profile::Quick => quick,
            Profile::Full => full,
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Profile, String> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            other => Err(format!(
                "unknown profile {other:?} (expected quick or full)"
            )),
        }
    }
}

/// The outcome of one named check.
#[derive(Clone, PartialEq, Debug)]
pub struct CheckReport {
    pub name: String,
    /// The ranges the check covers, by profile.
    pub bounds: String,
    pub passed: bool,
    pub counterexample: Option<String>,
    pub details: String,
    pub runtime: Duration,
}

type CheckFn = fn(Profile) -> Result<String, String>;

fn checks() -> Vec<(&'static str, &'static str, CheckFn)> {
    vec![
        ("counts", "spaces to n 8 quick, n 10 full", check_counts),
        (
            "narayana",
            "sectors to n 7 quick, n 10 full",
            check_narayana,
        ),
        (
            "bijection-T",
            "pairs to n 5 quick, n 7 full",
            check_bijection_two,
        ),
        (
            "bijection-T1T2",
            "pairs to n 4 quick, n 6 full",
            check_bijection_three,
        ),
        (
            "sweep-equivalence",
            "pairs to n 5 quick, n 7 full",
            check_sweep_equivalence,
        ),
        (
            "weight-transport-2",
            "n 4 and 2 rate draws quick, n 6 and 4 draws full",
            check_transport_two,
        ),
        (
            "weight-transport-3",
            "n 3 and 2 rate draws quick, n 4 and 3 draws full",
            check_transport_three,
        ),
        (
            "weight-transport-periodic",
            "sectors to n 4 quick, n 6 full",
            check_transport_periodic,
        ),
        (
            "stationary-uniform",
            "solves to 42 states quick, 132 full, candidates beyond",
            check_stationary_uniform,
        ),
        (
            "stationary-q",
            "solves to n 3 quick, n 4 full, candidates beyond",
            check_stationary_q,
        ),
        (
            "marginal-consistency",
            "n 3 quick, n 4 full, all three boundaries",
            check_marginal_consistency,
        ),
        (
            "irreducibility",
            "n 4 quick, n 6 full, including the frozen-count splitting",
            check_irreducibility,
        ),
        (
            "orbits",
            "ambient n 3 quick, n 4 full (n 5 two-species)",
            check_orbits,
        ),
        ("lifting", "ambient n 3 quick, n 4 full", check_lifting),
        (
            "split-join",
            "pairs to n 6 quick, n 8 full; identity to n 12",
            check_split_join,
        ),
    ]
}

/// Runs every check under the given profile, in parallel, preserving the
/// declared order in the returned reports.
pub fn run_all(profile: Profile) -> Vec<CheckReport> {
    let list = checks();
    let workers = std::env::var("TASEP_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .min(list.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<CheckReport>>> =
        (0..list.len()).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= list.len() {
                    break;
                }
                let (name, bounds, run) = list[i];
                let start = Instant::now();
                let outcome = run(profile);
                let runtime = start.elapsed();
                let report = match outcome {
                    Ok(details) => CheckReport {
                        name: name.to_string(),
                        bounds: bounds.to_string(),
                        passed: true,
                        counterexample: None,
                        details,
                        runtime,
                    },
                    Err(counterexample) => CheckReport {
                        name: name.to_string(),
                        bounds: bounds.to_string(),
                        passed: false,
                        counterexample: Some(counterexample),
                        details: String::new(),
                        runtime,
                    },
                };
                *slots[i].lock().expect("slot lock") = Some(report);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("slot lock")
                .expect("every check reports")
        })
        .collect()
}

/// True when every report passed.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// One line per check plus a summary line.
pub fn render_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in reports {
        let mark = if r.passed { "ok  " } else { "FAIL" };
        let body = if r.passed {
            &r.details
        } else {
            r.counterexample.as_deref().unwrap_or("")
        };
        out.push_str(&format!(
            "{mark}  {:width$}  {:>7.2}s  {body}\n",
            r.name,
            r.runtime.as_secs_f64(),
        ));
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed} of {} checks passed\n", reports.len()));
    out
}

/// The reports as a JSON document.
pub fn render_json(reports: &[CheckReport]) -> String {
    let entries: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "name": r.name,
                "bounds": r.bounds,
                "passed": r.passed,
                "counterexample": r.counterexample,
                "details": r.details,
                "runtime_seconds": r.runtime.as_secs_f64(),
            })
        })
        .collect();
    let doc = serde_json::json!({
        "checks": entries,
        "passed": all_passed(reports),
    });
    serde_json::to_string_pretty(&doc).expect("reports serialize")
}

// --- shared helpers ---

fn seeded(stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a5e_9b01);
    rng.set_stream(stream);
    rng
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let denom = rng.gen_range(1..=10u64);
    let numer = rng.gen_range(1..=denom);
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Random rates with denominators up to ten. With `epsilon` set, draws are
/// repeated until the neutral rate stays within one.
fn random_params(rng: &mut ChaCha8Rng, with_epsilon: bool) -> RateParams {
    loop {
        let alpha = small_rational(rng);
        let beta = small_rational(rng);
        let gamma = small_rational(rng);
        let params = if with_epsilon {
            let denom = rng.gen_range(2..=10u64);
            let numer = rng.gen_range(1..denom);
            let epsilon = BigRational::new(BigInt::from(numer), BigInt::from(denom));
            RateParams::with_epsilon(alpha, beta, gamma, epsilon)
        } else {
            RateParams::new(alpha, beta, gamma)
        }
        .expect("draws stay in range");
        if !with_epsilon || params.check_neutral_rate().is_ok() {
            return params;
        }
    }
}

fn uniform_exact(size: usize) -> Vec<BigRational> {
    vec![BigRational::new(BigInt::one(), BigInt::from(size.max(1))); size]
}

fn q_candidate(space: &[CompleteConfig], params: &RateParams) -> Result<Vec<BigRational>, String> {
    let mut weights = Vec::with_capacity(space.len());
    for cfg in space {
        weights.push(weight(cfg, params).map_err(|e| format!("weight of {cfg}: {e}"))?);
    }
    let total: BigRational = weights.iter().cloned().sum();
    if total.is_zero() {
        return Err("weights sum to zero".to_string());
    }
    Ok(weights.into_iter().map(|w| w / &total).collect())
}

fn sample_sectors(max_n: usize) -> Vec<(usize, usize, usize, usize)> {
    let all = [
        (2, 1, 1, 0),
        (3, 1, 1, 1),
        (4, 2, 1, 1),
        (4, 1, 2, 1),
        (5, 2, 2, 1),
        (5, 1, 2, 2),
        (6, 2, 2, 2),
    ];
    all.into_iter().filter(|&(n, _, _, _)| n <= max_n).collect()
}

// --- the checks ---

fn check_counts(profile: Profile) -> Result<String, String> {
    let n0 = profile.pick(8, 10);
    for n in 0..=n0 {
        let got = omega0(n).len();
        let want = catalan(n as u64 + 1);
        if BigUint::from(got) != want {
            return Err(format!("balanced pairs at n {n}: {got} vs {want}"));
        }
    }
    let n3 = profile.pick(6, 8);
    for n in 0..=n3 {
        let got = omega(n).len();
        if BigUint::from(got) != count_omega(n as u64) {
            return Err(format!("three-species pairs at n {n}: {got}"));
        }
        for l in 0..=n {
            let level = omega_level(n, l);
            if BigUint::from(level.len()) != count_omega_level(n as u64, l as u64) {
                return Err(format!("level {l} at n {n}: {}", level.len()));
            }
            for k in 0..=n - l {
                let sector = omega_level_sector(n, l, k);
                if BigUint::from(sector.len())
                    != count_omega_level_sector(n as u64, l as u64, k as u64)
                {
                    return Err(format!("sector ({k}, {l}) at n {n}: {}", sector.len()));
                }
                // The padded form of the sector count.
                let lhs = BigUint::from(l as u64 + 1)
                    * binomial(n as u64 + 1, k as u64)
                    * binomial(n as u64 + 1, (n - l - k) as u64);
                let rhs = BigUint::from(n as u64 + 1) * BigUint::from(sector.len());
                if lhs != rhs {
                    return Err(format!("padded count at n {n}, sector ({k}, {l})"));
                }
            }
        }
    }
    for (n, k, l, m) in sample_sectors(profile.pick(4, 6)) {
        let space = omega_hat_sector(n, k, l, m).map_err(|e| e.to_string())?;
        if l >= 1 {
            let want = count_omega_hat_sector(n as u64, l as u64, k as u64);
            if BigUint::from(space.len()) != want {
                return Err(format!(
                    "circular sector ({k}, {l}, {m}) at n {n}: {} vs {want}",
                    space.len()
                ));
            }
        }
        let rows = rows_circular(n, k, l, m).map_err(|e| e.to_string())?;
        let want_rows = binomial(n as u64, k as u64) * binomial((n - k) as u64, l as u64);
        if BigUint::from(rows.len()) != want_rows {
            return Err(format!("circular rows ({k}, {l}, {m}) at n {n}"));
        }
    }
    let ng = profile.pick(5, 7);
    for len in 0..=ng {
        if BigUint::from(gamma_pairs(len).len()) != count_gamma(len as u64) {
            return Err(format!("unconstrained pairs at length {len}"));
        }
        if BigUint::from(gamma_bar_pairs(len).len()) != count_gamma_bar(len as u64) {
            return Err(format!("returning pairs at length {len}"));
        }
        for k in 0..=len {
            for m in 0..=len {
                if BigUint::from(delta_words(len, k, m).len())
                    != count_delta(len as u64, k as u64, m as u64)
                {
                    return Err(format!("count at length {len}, ({k}, {m})"));
                }
            }
        }
    }
    Ok(format!(
        "enumerated spaces match the closed forms to n {n0}"
    ))
}

fn check_narayana(profile: Profile) -> Result<String, String> {
    let max_n = profile.pick(7, 10);
    for n in 0..=max_n {
        let mut total = BigUint::zero();
        for k in 0..=n {
            let sector = omega0_sector(n, k);
            let want = narayana(n as u64, k as u64);
            if BigUint::from(sector.len()) != want {
                return Err(format!("sector count at n {n}, k {k}: {}", sector.len()));
            }
            for cfg in &sector {
                if cfg.top_black_count() != k {
                    return Err(format!("stray member {cfg} in sector k {k}"));
                }
            }
            total += want;
        }
        if total != catalan(n as u64 + 1) {
            return Err(format!("sector totals at n {n}"));
        }
    }
    let path_n = profile.pick(6, 8);
    for n in 0..=path_n {
        let mut seen = HashSet::new();
        for cfg in omega0(n) {
            let path = to_motzkin(&cfg).map_err(|e| format!("path of {cfg}: {e}"))?;
            if !seen.insert(format!("{path:?}")) {
                return Err(format!("path collides for {cfg}"));
            }
            let back = from_motzkin(&path).map_err(|e| format!("rebuild of {cfg}: {e}"))?;
            if back != cfg {
                return Err(format!("path round trip moved {cfg} to {back}"));
            }
        }
    }
    Ok(format!(
        "sector counts and the path bijection agree to n {max_n}"
    ))
}

fn check_bijection_two(profile: Profile) -> Result<String, String> {
    let max_n = profile.pick(5, 7);
    let mut pairs = 0usize;
    for n in 0..=max_n {
        let space = omega0(n);
        let mut seen = HashSet::new();
        for cfg in &space {
            for wall in 0..=n {
                let (image, j) = relocation_map(cfg, wall);
                if !image.validate().is_empty() {
                    return Err(format!("image of ({cfg}, {wall}) is invalid"));
                }
                if !seen.insert((image.serialize(), j)) {
                    return Err(format!("images collide at ({cfg}, {wall})"));
                }
                let (back, i) = relocation_map_inverse(&image, j);
                if back != *cfg || i != wall {
                    return Err(format!("inverse fails at ({cfg}, {wall})"));
                }
                pairs += 1;
            }
        }
        if seen.len() != space.len() * (n + 1) {
            return Err(format!("image count off at n {n}"));
        }
    }
    Ok(format!("{pairs} pairs permute and invert, to n {max_n}"))
}

fn check_bijection_three(profile: Profile) -> Result<String, String> {
    let max_n = profile.pick(4, 6);
    let mut pairs = 0usize;
    for n in 1..=max_n {
        let space = omega(n);
        let mut seen_primary = HashSet::new();
        let mut seen_secondary = HashSet::new();
        for cfg in &space {
            for wall in 0..=n {
                let (p_image, pj) = relocation_map_primary(cfg, wall);
                let (back, i) = relocation_map_primary_inverse(&p_image, pj);
                if back != *cfg || i != wall {
                    return Err(format!("primary inverse fails at ({cfg}, {wall})"));
                }
                if !seen_primary.insert((p_image.serialize(), pj)) {
                    return Err(format!("primary images collide at ({cfg}, {wall})"));
                }
                let (s_image, sj) = relocation_map_secondary(cfg, wall);
                let (back, i) = relocation_map_secondary_inverse(&s_image, sj);
                if back != *cfg || i != wall {
                    return Err(format!("secondary inverse fails at ({cfg}, {wall})"));
                }
                if !seen_secondary.insert((s_image.serialize(), sj)) {
                    return Err(format!("secondary images collide at ({cfg}, {wall})"));
                }
                let swapped = border_swap(&border_swap(cfg, wall), wall);
                if swapped != *cfg {
                    return Err(format!("border swap is not involutive at ({cfg}, {wall})"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{pairs} pairs permute under both maps, to n {max_n}"
    ))
}

fn check_sweep_equivalence(profile: Profile) -> Result<String, String> {
    let max_n = profile.pick(5, 7);
    let mut checked = 0usize;
    for n in 0..=max_n {
        for cfg in omega0(n) {
            for wall in 0..=n {
                let swept = sweep_map(&cfg, wall);
                let (relocated, _) = relocation_map(&cfg, wall);
                if swept != relocated {
                    return Err(format!(
                        "sweep and relocation differ at ({cfg}, {wall}): {swept} vs {relocated}"
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} moves agree, to n {max_n}"))
}

/// Transport for the two-species map under a caller-supplied map, so the
/// tests can aim it at a corrupted map.
fn transport_two_over<F>(max_n: usize, params: &RateParams, map: F) -> Result<usize, String>
where
    F: Fn(&CompleteConfig, usize) -> (CompleteConfig, usize),
{
    let mut moved = 0usize;
    for n in 1..=max_n {
        for cfg in omega0(n) {
            let q = weight(&cfg, params).map_err(|e| e.to_string())?;
            for wall in 0..=n {
                let (image, j) = map(&cfg, wall);
                let q_image = weight(&image, params).map_err(|e| e.to_string())?;
                let lhs = lambda_wall(wall, n, params) * &q;
                let rhs = lambda_wall(j, n, params) * &q_image;
                if lhs != rhs {
                    return Err(format!(
                        "transport fails at ({cfg}, {wall}) into ({image}, {j})"
                    ));
                }
                if image != cfg {
                    moved += 1;
                }
            }
        }
    }
    Ok(moved)
}

fn check_transport_two(profile: Profile) -> Result<String, String> {
    let max_n = profile.pick(4, 6);
    let draws = profile.pick(2, 4);
    let mut rng = seeded(21);
    let mut moved = 0usize;
    for _ in 0..draws {
        let params = random_params(&mut rng, false);
        moved += transport_two_over(max_n, &params, relocation_map)?;
    }
    if moved < 20 {
        return Err(format!("only {moved} moving pairs covered"));
    }
    Ok(format!(
        "{moved} moving pairs balance over {draws} rate draws, to n {max_n}"
    ))
}

fn check_transport_three(profile: Profile) -> Result<String, String> {
    let max_n = profile.pick(3, 4);
    let draws = profile.pick(2, 3);
    let mut rng = seeded(22);
    let mut checked = 0usize;
    for _ in 0..draws {
        let params = random_params(&mut rng, true);
        for n in 1..=max_n {
            for cfg in omega(n) {
                let q = weight(&cfg, &params).map_err(|e| e.to_string())?;
                for wall in 0..=n {
                    // Outflow mass at this pair, against the inflow from the
                    // two preimages.
                    let (l, r) = open_pattern(cfg.top(), wall);
                    let (out1, out2) = mass_split(l, r, &params);
                    let (pre1, i1) = relocation_map_primary_inverse(&cfg, wall);
                    let (pre2, i2) = relocation_map_secondary_inverse(&cfg, wall);
                    let (l1, r1) = open_pattern(pre1.top(), i1);
                    let (m1, _) = mass_split(l1, r1, &params);
                    let (l2, r2) = open_pattern(pre2.top(), i2);
                    let (_, m2) = mass_split(l2, r2, &params);
                    let q1 = weight(&pre1, &params).map_err(|e| e.to_string())?;
                    let q2 = weight(&pre2, &params).map_err(|e| e.to_string())?;
                    let inflow = m1 * q1 + m2 * q2;
                    let outflow = (out1 + out2) * &q;
                    if inflow != outflow {
                        return Err(format!("balance fails at ({cfg}, {wall})"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} pairs balance over {draws} rate draws, to n {max_n}"
    ))
}

fn check_transport_periodic(profile: Profile) -> Result<String, String> {
    let mut rng = seeded(23);
    let mut moved = 0usize;
    for (n, k, l, m) in sample_sectors(profile.pick(4, 6)) {
        if l == 0 {
            continue;
        }
        let params = random_params(&mut rng, false);
        let space = omega_hat_sector(n, k, l, m).map_err(|e| e.to_string())?;
        for cfg in &space {
            let q = weight(cfg, &params).map_err(|e| e.to_string())?;
            for wall in 0..n {
                let (pl, pr) = circular_pattern(cfg.top(), wall);
                let rate = lambda_circular(pl, pr, &params);
                if rate.is_zero() {
                    continue;
                }
                let (image, j) = circular_map(cfg, wall).map_err(|e| e.to_string())?;
                let (il, ir) = circular_pattern(image.top(), j);
                let image_rate = lambda_circular(il, ir, &params);
                let q_image = weight(&image, &params).map_err(|e| e.to_string())?;
                if rate * &q != image_rate * q_image {
                    return Err(format!("transport fails at ({cfg}, {wall})"));
                }
                moved += 1;
            }
        }
    }
    Ok(format!("{moved} circular moves balance"))
}

fn check_stationary_uniform(profile: Profile) -> Result<String, String> {
    let unit = RateParams::new(BigRational::one(), BigRational::one(), BigRational::one())
        .expect("unit rates");
    let half = RateParams::with_epsilon(
        BigRational::one(),
        BigRational::one(),
        BigRational::one(),
        BigRational::new(BigInt::one(), BigInt::from(2)),
    )
    .expect("unit rates with epsilon");
    // Solved exactly at moderate sizes.
    for n in 1..=profile.pick(4, 5) {
        let spec = ChainSpec {
            model: Model::CompleteTwo,
            n,
            params: unit.clone(),
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        let pi = stationary_exact(&matrix).map_err(|e| e.to_string())?;
        let want = uniform_exact(matrix.len());
        if pi.exact_probs() != Some(&want[..]) {
            return Err(format!("balanced pairs at n {n} are not uniform"));
        }
    }
    // Certified beyond the solver sizes.
    {
        let n = profile.pick(5, 6);
        let spec = ChainSpec {
            model: Model::CompleteTwo,
            n,
            params: unit.clone(),
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        verify_stationary(&matrix, &uniform_exact(matrix.len())).map_err(|e| e.to_string())?;
    }
    for n in 1..=profile.pick(2, 3) {
        let spec = ChainSpec {
            model: Model::CompleteThree,
            n,
            params: half.clone(),
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        let pi = stationary_exact(&matrix).map_err(|e| e.to_string())?;
        let want = uniform_exact(matrix.len());
        if pi.exact_probs() != Some(&want[..]) {
            return Err(format!("three-species chain at n {n} is not uniform"));
        }
    }
    {
        let n = profile.pick(3, 4);
        let spec = ChainSpec {
            model: Model::CompleteThree,
            n,
            params: half.clone(),
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        verify_stationary(&matrix, &uniform_exact(matrix.len())).map_err(|e| e.to_string())?;
    }
    for (n, k, l, m) in sample_sectors(profile.pick(4, 6)) {
        if l == 0 {
            continue;
        }
        let spec = ChainSpec {
            model: Model::CompleteCircular,
            n,
            params: unit.clone(),
            sector: Some(Sector { k, l, m }),
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        verify_stationary(&matrix, &uniform_exact(matrix.len()))
            .map_err(|e| format!("sector ({k}, {l}, {m}) at n {n}: {e}"))?;
        if matrix.len() <= 30 {
            let pi = stationary_exact(&matrix).map_err(|e| e.to_string())?;
            if pi.exact_probs() != Some(&uniform_exact(matrix.len())[..]) {
                return Err(format!("sector ({k}, {l}, {m}) at n {n} is not uniform"));
            }
        }
    }
    Ok("uniform laws hold at unit rates on all three boundaries".to_string())
}

fn check_stationary_q(profile: Profile) -> Result<String, String> {
    let mut rng = seeded(24);
    for n in 1..=profile.pick(3, 4) {
        let params = random_params(&mut rng, false);
        let spec = ChainSpec {
            model: Model::CompleteTwo,
            n,
            params: params.clone(),
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        let space = omega0(n);
        let want = q_candidate(&space, &params)?;
        let pi = stationary_exact(&matrix).map_err(|e| e.to_string())?;
        if pi.exact_probs() != Some(&want[..]) {
            return Err(format!("weights miss the solved law at n {n}"));
        }
    }
    for n in 1..=profile.pick(2, 3) {
        let params = random_params(&mut rng, true);
        let spec = ChainSpec {
            model: Model::CompleteThree,
            n,
            params: params.clone(),
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        let space = omega(n);
        let want = q_candidate(&space, &params)?;
        let pi = stationary_exact(&matrix).map_err(|e| e.to_string())?;
        if pi.exact_probs() != Some(&want[..]) {
            return Err(format!("three-species weights miss the law at n {n}"));
        }
    }
    for (n, k, l, m) in sample_sectors(profile.pick(4, 5)) {
        if l == 0 {
            continue;
        }
        let params = random_params(&mut rng, false);
        let spec = ChainSpec {
            model: Model::CompleteCircular,
            n,
            params: params.clone(),
            sector: Some(Sector { k, l, m }),
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        let space = omega_hat_sector(n, k, l, m).map_err(|e| e.to_string())?;
        let want = q_candidate(&space, &params)?;
        verify_stationary(&matrix, &want)
            .map_err(|e| format!("sector ({k}, {l}, {m}) at n {n}: {e}"))?;
    }
    Ok("solved and certified laws match the weights".to_string())
}

fn check_marginal_consistency(profile: Profile) -> Result<String, String> {
    let mut rng = seeded(25);
    let compare = |row: &ChainSpec, complete: &ChainSpec| -> Result<(), String> {
        let mr = transition_matrix(row).map_err(|e| e.to_string())?;
        let mc = transition_matrix(complete).map_err(|e| e.to_string())?;
        let pr = stationary_exact(&mr).map_err(|e| e.to_string())?;
        let pc = stationary_exact(&mc)
            .map_err(|e| e.to_string())?
            .marginal_top();
        if pr.support != pc.support || pr.exact_probs() != pc.exact_probs() {
            return Err(format!(
                "marginal mismatch for {} at n {}",
                complete.model, complete.n
            ));
        }
        Ok(())
    };
    for n in 1..=profile.pick(3, 4) {
        let params = random_params(&mut rng, false);
        compare(
            &ChainSpec {
                model: Model::RowTwo,
                n,
                params: params.clone(),
                sector: None,
            },
            &ChainSpec {
                model: Model::CompleteTwo,
                n,
                params,
                sector: None,
            },
        )?;
    }
    for n in 1..=profile.pick(2, 3) {
        let params = random_params(&mut rng, true);
        compare(
            &ChainSpec {
                model: Model::RowThree,
                n,
                params: params.clone(),
                sector: None,
            },
            &ChainSpec {
                model: Model::CompleteThree,
                n,
                params,
                sector: None,
            },
        )?;
    }
    for (n, k, l, m) in sample_sectors(profile.pick(3, 4)) {
        if l == 0 {
            continue;
        }
        let params = random_params(&mut rng, false);
        compare(
            &ChainSpec {
                model: Model::RowCircular,
                n,
                params: params.clone(),
                sector: Some(Sector { k, l, m }),
            },
            &ChainSpec {
                model: Model::CompleteCircular,
                n,
                params,
                sector: Some(Sector { k, l, m }),
            },
        )?;
    }
    Ok("row marginals of the complete laws match the row chains".to_string())
}

fn check_irreducibility(profile: Profile) -> Result<String, String> {
    let mut rng = seeded(26);
    for n in 1..=profile.pick(4, 6) {
        let params = random_params(&mut rng, false);
        let spec = ChainSpec {
            model: Model::CompleteTwo,
            n,
            params,
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        if !check_irreducible(&matrix) {
            return Err(format!("balanced chain splits at n {n}"));
        }
        if !check_aperiodic(&matrix) {
            return Err(format!("balanced chain is periodic at n {n}"));
        }
    }
    for n in 1..=profile.pick(3, 4) {
        let params = random_params(&mut rng, true);
        let spec = ChainSpec {
            model: Model::CompleteThree,
            n,
            params,
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        if !check_irreducible(&matrix) {
            return Err(format!("three-species chain splits at n {n}"));
        }
    }
    for (n, k, l, m) in sample_sectors(profile.pick(4, 6)) {
        if l == 0 {
            continue;
        }
        let params = random_params(&mut rng, false);
        let spec = ChainSpec {
            model: Model::CompleteCircular,
            n,
            params,
            sector: Some(Sector { k, l, m }),
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        if !check_irreducible(&matrix) {
            return Err(format!("circular sector ({k}, {l}, {m}) splits at n {n}"));
        }
    }
    // With epsilon zero the neutral count only falls, so the communicating
    // classes are exactly the constant-count levels.
    for n in 1..=profile.pick(2, 3) {
        let params = RateParams::with_epsilon(
            BigRational::one(),
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::zero(),
        )
        .expect("valid rates");
        let spec = ChainSpec {
            model: Model::CompleteThree,
            n,
            params,
            sector: None,
        };
        let matrix = transition_matrix(&spec).map_err(|e| e.to_string())?;
        let components = strongly_connected_components(&matrix);
        if components.len() != n + 1 {
            return Err(format!(
                "{} classes at n {n}, expected {}",
                components.len(),
                n + 1
            ));
        }
        for members in &components {
            let first: CompleteConfig = matrix.labels[members[0]]
                .parse()
                .map_err(|_| "bad label".to_string())?;
            let level = first.ell();
            if BigUint::from(members.len()) != count_omega_level(n as u64, level as u64) {
                return Err(format!("class size at n {n}, level {level}"));
            }
            for &i in members {
                let cfg: CompleteConfig = matrix.labels[i]
                    .parse()
                    .map_err(|_| "bad label".to_string())?;
                if cfg.ell() != level {
                    return Err(format!("mixed levels in one class at n {n}"));
                }
            }
        }
    }
    Ok("chains are irreducible, and the frozen chain splits by level".to_string())
}

fn check_orbits(profile: Profile) -> Result<String, String> {
    // Two-species orbits over the balanced ambient space.
    for ambient in 1..=profile.pick(4, 5) {
        let reduced_space = omega0(ambient - 1);
        let space = omega0(ambient);
        for reduced in &reduced_space {
            let mut expected = HashSet::new();
            for cfg in &space {
                for wall in 0..=ambient {
                    if let Ok(r) = reduce_pair(cfg, wall) {
                        if r == *reduced {
                            expected.insert((cfg.serialize(), wall));
                        }
                    }
                }
            }
            let orbit = pair_orbit(reduced, OrbitMap::TwoSpecies).map_err(|e| e.to_string())?;
            let got: HashSet<(String, usize)> =
                orbit.iter().map(|(c, w)| (c.serialize(), *w)).collect();
            if got.len() != orbit.len() {
                return Err(format!("orbit of {reduced} repeats a pair"));
            }
            if got != expected {
                return Err(format!("orbit of {reduced} misses its preimage set"));
            }
        }
    }
    // Three-species orbits: the secondary map walks the whole preimage set,
    // the primary map walks it without the neutral border pairs.
    for ambient in 1..=profile.pick(3, 4) {
        let reduced_space = omega(ambient - 1);
        let space = omega(ambient);
        for reduced in &reduced_space {
            let mut full = HashSet::new();
            for cfg in &space {
                for wall in 0..=ambient {
                    if let Ok(r) = reduce_pair(cfg, wall) {
                        if r == *reduced {
                            full.insert((cfg.serialize(), wall));
                        }
                    }
                }
            }
            let trimmed: HashSet<(String, usize)> = full
                .iter()
                .filter(|(label, wall)| {
                    let cfg: CompleteConfig = label.parse().expect("stored label");
                    let neutral_left =
                        *wall == 0 && cfg.n() >= 1 && cfg.top_cell(1) == Particle::Neutral;
                    let neutral_right = *wall == cfg.n()
                        && cfg.n() >= 1
                        && cfg.top_cell(cfg.n()) == Particle::Neutral;
                    !neutral_left && !neutral_right
                })
                .cloned()
                .collect();
            let secondary = pair_orbit(reduced, OrbitMap::Secondary).map_err(|e| e.to_string())?;
            let got: HashSet<(String, usize)> =
                secondary.iter().map(|(c, w)| (c.serialize(), *w)).collect();
            if got.len() != secondary.len() || got != full {
                return Err(format!("secondary orbit of {reduced} is off"));
            }
            let primary = pair_orbit(reduced, OrbitMap::Primary).map_err(|e| e.to_string())?;
            let got: HashSet<(String, usize)> =
                primary.iter().map(|(c, w)| (c.serialize(), *w)).collect();
            if got.len() != primary.len() || got != trimmed {
                return Err(format!("primary orbit of {reduced} is off"));
            }
        }
    }
    Ok("orbits traverse each preimage set exactly once".to_string())
}

fn check_lifting(profile: Profile) -> Result<String, String> {
    let max_ambient = profile.pick(3, 4);
    let mut lifted = 0usize;
    // Two-species lifts.
    for ambient in 2..=max_ambient {
        let reduced_space = omega0(ambient - 1);
        let space = omega0(ambient);
        for reduced in &reduced_space {
            let mut fiber = Vec::new();
            for cfg in &space {
                for wall in 0..=ambient {
                    if reduce_pair(cfg, wall).map_or(false, |r| r == *reduced) {
                        fiber.push(cfg.clone());
                    }
                }
            }
            for wall in 0..=ambient - 1 {
                let (image, j) = relocation_map(reduced, wall);
                if image == *reduced && j == wall {
                    continue;
                }
                let found = fiber.iter().any(|cfg| {
                    (0..=ambient).any(|lift_wall| {
                        let (lift_image, lift_j) = relocation_map(cfg, lift_wall);
                        reduce_pair(&lift_image, lift_j).map_or(false, |r| r == image)
                    })
                });
                if !found {
                    return Err(format!("no lift for ({reduced}, {wall})"));
                }
                lifted += 1;
            }
        }
    }
    // Three-species lifts under both maps.
    for ambient in 2..=max_ambient {
        let reduced_space = omega(ambient - 1);
        let space = omega(ambient);
        for reduced in &reduced_space {
            let mut fiber = Vec::new();
            for cfg in &space {
                for wall in 0..=ambient {
                    if reduce_pair(cfg, wall).map_or(false, |r| r == *reduced) {
                        fiber.push(cfg.clone());
                    }
                }
            }
            let maps: [(fn(&CompleteConfig, usize) -> (CompleteConfig, usize), &str); 2] = [
                (relocation_map_primary, "primary"),
                (relocation_map_secondary, "secondary"),
            ];
            for (map, name) in maps {
                for wall in 0..=ambient - 1 {
                    let (image, j) = map(reduced, wall);
                    if image == *reduced && j == wall {
                        continue;
                    }
                    let found = fiber.iter().any(|cfg| {
                        (0..=ambient).any(|lift_wall| {
                            let (lift_image, lift_j) = map(cfg, lift_wall);
                            reduce_pair(&lift_image, lift_j).map_or(false, |r| r == image)
                        })
                    });
                    if !found {
                        return Err(format!("no {name} lift for ({reduced}, {wall})"));
                    }
                    lifted += 1;
                }
            }
        }
    }
    Ok(format!(
        "{lifted} reduced moves lift, ambient to n {max_ambient}"
    ))
}

fn check_split_join(profile: Profile) -> Result<String, String> {
    let max_n = profile.pick(6, 8);
    for n in 0..=max_n {
        let mut seen = HashSet::new();
        for cfg in omega0(n) {
            let pair = walks(&cfg);
            for i in 0..n {
                let de = (pair.e[i + 1] - pair.e[i]).abs();
                let db = (pair.b[i + 1] - pair.b[i]).abs();
                if de + db != 1 || pair.e[i + 1] < 0 {
                    return Err(format!("walk shape fails for {cfg}"));
                }
            }
            let s = split(&cfg);
            if !seen.insert(format!("{s:?}")) {
                return Err(format!("split repeats for {cfg}"));
            }
            let back = join(n, &s).map_err(|e| format!("join of {cfg}: {e}"))?;
            if back != cfg {
                return Err(format!("round trip moved {cfg} to {back}"));
            }
        }
    }
    let id_n = profile.pick(10, 12);
    for n in 0..=id_n as u64 {
        if excursion_sum_identity(n) != catalan(n + 1) {
            return Err(format!("counting identity fails at n {n}"));
        }
    }
    Ok(format!(
        "splits invert and the counting identity holds to n {id_n}"
    ))
}

// --- tests ---

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_profile_passes_everywhere() {
        let reports = run_all(Profile::Quick);
        assert_eq!(reports.len(), checks().len());
        for r in &reports {
            assert!(r.passed, "{} failed: {:?}", r.name, r.counterexample);
        }
        assert!(all_passed(&reports));
        let text = render_text(&reports);
        assert!(text.contains("ok"));
        assert!(text.contains("checks passed"));
        let json = render_json(&reports);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["passed"], serde_json::Value::Bool(true));
        assert_eq!(parsed["checks"].as_array().unwrap().len(), reports.len());
    }

    #[test]
    fn worker_count_respects_the_environment() {
        // The suite honors TASEP_LAB_THREADS; a single worker must produce
        // the same reports in the same order.
        std::env::set_var("TASEP_LAB_THREADS", "1");
        let serial = run_all(Profile::Quick);
        std::env::remove_var("TASEP_LAB_THREADS");
        let names: Vec<&str> = serial.iter().map(|r| r.name.as_str()).collect();
        let declared: Vec<&str> = checks().iter().map(|(n, _, _)| *n).collect();
        assert_eq!(names, declared);
        assert!(all_passed(&serial));
    }

    #[test]
    fn the_transport_check_catches_a_broken_map() {
        let params = RateParams::new(
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::new(BigInt::one(), BigInt::from(3)),
            BigRational::new(BigInt::one(), BigInt::from(5)),
        )
        .unwrap();
        // The honest map balances.
        assert!(transport_two_over(3, &params, relocation_map).is_ok());
        // A map that forgets to move the wall index does not.
        let broken = |cfg: &CompleteConfig, wall: usize| {
            let (image, _) = relocation_map(cfg, wall);
            (image, wall)
        };
        assert!(transport_two_over(3, &params, broken).is_err());
    }

    #[test]
    fn reports_render_failures() {
        let report = CheckReport {
            name: "demo".to_string(),
            bounds: "none".to_string(),
            passed: false,
            counterexample: Some("pair (BW/WB, 1)".to_string()),
            details: String::new(),
            runtime: Duration::from_millis(12),
        };
        let text = render_text(&[report.clone()]);
        assert!(text.contains("FAIL"));
        assert!(text.contains("pair (BW/WB, 1)"));
        assert!(!all_passed(&[report.clone()]));
        let json = render_json(&[report]);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["passed"], serde_json::Value::Bool(false));
    }
}
