//! Occupancy evaluators: the exact critical-line maximum, a seeded
//! random-line lower-bound probe, the interval-stacking reformulation,
//! and the exhaustive minimax over an abstract family.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use num_rational::Rational64;

use crate::construct::PermutationSpec;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::grid::{critical_lines, tube_count_columns, CellTester, GridSet, Line};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactCritical,
    Sampled,
    Interval,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactCritical => "exact-critical",
            Method::Sampled => "sampled",
            Method::Interval => "interval",
        }
    }
}

/// What certifies the reported count: a concrete line, or for the
/// interval method a slope interval at one anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    Line(Line),
    SlopeInterval { lo: f64, hi: f64, anchor: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyReport {
    pub method: Method,
    pub n: u32,
    pub max_count: usize,
    pub witness: Witness,
    pub seed: Option<u64>,
    pub num_lines: Option<usize>,
}

impl OccupancyReport {
    pub fn to_json(&self) -> serde_json::Value {
        let witness = match &self.witness {
            Witness::Line(line) => {
                let (a, b) = line.params_f64();
                match line {
                    Line::Slope { .. } => json!({ "kind": "slope", "alpha": a, "beta": b }),
                    Line::Vertical { .. } => json!({ "kind": "vertical", "x0": a }),
                }
            }
            Witness::SlopeInterval { lo, hi, anchor } => json!({
                "kind": "slope-interval",
                "alpha": (lo + hi) / 2.0,
                "lo": lo,
                "hi": hi,
                "anchor": anchor,
            }),
        };
        let mut obj = json!({
            "method": self.method.as_str(),
            "N": self.n,
            "max_count": self.max_count,
            "witness": witness,
        });
        if let Some(seed) = self.seed {
            obj["seed"] = json!(seed);
        }
        if let Some(num_lines) = self.num_lines {
            obj["num_lines"] = json!(num_lines);
        }
        obj
    }
}

/// Pick the better `(count, line)` pair: higher count wins, ties go to
/// the canonically smaller line. Associative and commutative, so
/// parallel reductions are deterministic.
fn better(x: (usize, Line), y: (usize, Line)) -> (usize, Line) {
    match x.0.cmp(&y.0) {
        std::cmp::Ordering::Greater => x,
        std::cmp::Ordering::Less => y,
        std::cmp::Ordering::Equal => {
            if x.1.canonical_cmp(&y.1).is_le() {
                x
            } else {
                y
            }
        }
    }
}

/// Exact `max over lines of |tube(line) ∩ s|`, computed on the finite
/// critical-line certificate. Deterministic: ties are broken by the
/// canonical line order regardless of thread count.
pub fn max_tube_occupancy_exact(s: &GridSet) -> Result<OccupancyReport> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = s.n();
    let lines = critical_lines(s)?;
    let cells: Vec<(u32, u32)> = s.cells().collect();
    let best = lines
        .into_par_iter()
        .map(|line| {
            let tester = CellTester::new(&line, n);
            (tester.count_cells(&cells), line)
        })
        .reduce_with(better)
        .expect("nonempty set yields at least one critical line");
    Ok(OccupancyReport {
        method: Method::ExactCritical,
        n,
        max_count: best.0,
        witness: Witness::Line(best.1),
        seed: None,
        num_lines: None,
    })
}

/// Count `|tube(line) ∩ s|` for one explicit line, exactly.
pub fn tube_occupancy_of_line(s: &GridSet, line: &Line) -> usize {
    let columns = s.columns();
    tube_count_columns(line, s.n(), &columns)
}

/// Draw a uniform random line: angle uniform in [0,π), signed offset
/// uniform over the range that meets `[0,1]²`. The direction is
/// snapped to the 2^20 grid and the offset to the 2^30 grid, so every
/// sampled line is an exact rational line and its count is exact;
/// sampled values can therefore never exceed the exact maximum.
fn random_line<R: Rng>(rng: &mut R) -> Line {
    const DIR: f64 = (1u32 << 20) as f64;
    const OFF: i64 = 1 << 30;
    let theta = rng.gen::<f64>() * std::f64::consts::PI;
    let u = (theta.cos() * DIR).round() as i64; // x-direction
    let v = (theta.sin() * DIR).round() as i64; // y-direction
    let s = rng.gen::<f64>();
    // normal form -v·x + u·y = c over unit-square corners
    let corners = [0, -v, u, u - v];
    let cmin = *corners.iter().min().unwrap();
    let cmax = *corners.iter().max().unwrap();
    let k = (s * OFF as f64).floor() as i64; // offset fraction k/2^30
    // c = cmin + (k/2^30)(cmax - cmin), exactly
    let c_num = cmin as i128 * OFF as i128 + k as i128 * (cmax - cmin) as i128;
    if u == 0 {
        // -v·x = c  =>  x0 = -c/(v·2^30)
        let x0 = reduce_rat(-c_num, v as i128 * OFF as i128);
        Line::Vertical { x0: clamp_unit(x0) }
    } else {
        // y = (v/u)x + c/u  =>  alpha = v/u, beta = -c/u
        let alpha = reduce_rat(v as i128, u as i128);
        let beta = reduce_rat(-c_num, u as i128 * OFF as i128);
        Line::Slope { alpha, beta }
    }
}

fn reduce_rat(num: i128, den: i128) -> Rational64 {
    let g = gcd(num, den);
    let (mut num, mut den) = (num / g, den / g);
    if den < 0 {
        num = -num;
        den = -den;
    }
    Rational64::new_raw(num as i64, den as i64)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn clamp_unit(x: Rational64) -> Rational64 {
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    x.max(zero).min(one)
}

/// Lower-bound probe: the best count over `num_lines` seeded random
/// lines. Always at most the exact value; deterministic given seed.
pub fn max_occupancy_sampled(s: &GridSet, num_lines: usize, seed: u64) -> Result<OccupancyReport> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if num_lines == 0 {
        return Err(Error::DegenerateInput("num_lines must be at least 1".into()));
    }
    let n = s.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines: Vec<Line> = (0..num_lines).map(|_| random_line(&mut rng)).collect();
    let columns = s.columns();
    let best = lines
        .into_par_iter()
        .map(|line| (tube_count_columns(&line, n, &columns), line))
        .reduce_with(better)
        .expect("at least one line");
    Ok(OccupancyReport {
        method: Method::Sampled,
        n,
        max_count: best.0,
        witness: Witness::Line(best.1),
        seed: Some(seed),
        num_lines: Some(num_lines),
    })
}

/// One anchor's intervals `I_{n,m}` of the slope reformulation:
/// centered at the chord slope `s = (π(n)-π(m))/(n-m)`, with half-width
/// `c·max(1,|s|)/|n-m|`.
#[derive(Debug, Clone)]
pub struct IntervalProfile {
    pub anchor: usize,
    pub c: f64,
    /// `(m, lo, hi)` for every m ≠ anchor.
    pub intervals: Vec<(usize, f64, f64)>,
}

pub fn interval_profile(perm: &PermutationSpec, c: f64, anchor: usize) -> Result<IntervalProfile> {
    let values = perm.values();
    if anchor >= values.len() {
        return Err(Error::DegenerateInput(format!("anchor {anchor} out of range")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::DegenerateInput("half-width constant must be positive".into()));
    }
    let mut intervals = Vec::with_capacity(values.len().saturating_sub(1));
    for (m, &vm) in values.iter().enumerate() {
        if m == anchor {
            continue;
        }
        let slope = (values[anchor] - vm) / (anchor as f64 - m as f64);
        let width = c * slope.abs().max(1.0) / (anchor as f64 - m as f64).abs();
        intervals.push((m, slope - width, slope + width));
    }
    Ok(IntervalProfile { anchor, c, intervals })
}

fn max_stacking_depth(intervals: &[(usize, f64, f64)]) -> (usize, f64, f64) {
    // closed intervals: at equal coordinates starts come before ends,
    // so point contact counts as overlap
    let mut events: Vec<(f64, bool)> = Vec::with_capacity(2 * intervals.len());
    for &(_, lo, hi) in intervals {
        events.push((lo, false));
        events.push((hi, true));
    }
    events.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite endpoints")
            .then_with(|| a.1.cmp(&b.1))
    });
    let mut depth = 0usize;
    let mut best = 0usize;
    let mut best_lo = 0.0;
    let mut best_hi = 0.0;
    for (i, &(x, is_end)) in events.iter().enumerate() {
        if is_end {
            depth -= 1;
        } else {
            depth += 1;
            if depth > best {
                best = depth;
                best_lo = x;
                best_hi = events.get(i + 1).map(|e| e.0).unwrap_or(x);
            }
        }
    }
    (best, best_lo, best_hi)
}

/// The §-style slope-interval evaluator: for each anchor n, the
/// maximum stacking depth of the intervals `I_{n,m}`, maximized over
/// anchors. O(N² log N) via an endpoint sweep per anchor.
pub fn interval_occupancy(perm: &PermutationSpec, c: f64) -> Result<OccupancyReport> {
    let values = perm.values();
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::DegenerateInput("half-width constant must be positive".into()));
    }
    let len = values.len();
    let per_anchor: Vec<(usize, usize, f64, f64)> = (0..len)
        .into_par_iter()
        .map(|anchor| {
            let profile = interval_profile(perm, c, anchor).expect("anchor in range");
            let (depth, lo, hi) = max_stacking_depth(&profile.intervals);
            (depth, anchor, lo, hi)
        })
        .collect();
    // deterministic reduction: deepest stack, ties to the smallest anchor
    let best = per_anchor
        .into_iter()
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .unwrap_or((0, 0, 0.0, 0.0));
    Ok(OccupancyReport {
        method: Method::Interval,
        n: perm.n(),
        max_count: best.0,
        witness: Witness::SlopeInterval { lo: best.2, hi: best.3, anchor: best.1 },
        seed: None,
        num_lines: None,
    })
}

/// Exact binomial coefficient as u128, capping at `cap`.
fn binomial_capped(m: u64, n: u64, cap: u128) -> u128 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for i in 0..n {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
        if acc > cap {
            return cap.saturating_add(1);
        }
    }
    acc
}

/// Exhaustive minimax `C(𝒮) = min over N-sets S' of max over members
/// of |S ∩ S'|`, enumerating every N-subset of the ground set. Refuses
/// (never approximates) when `C(M,N)` exceeds the budget; this is the
/// trusted oracle.
pub fn minimax_occupancy_bruteforce(
    family: &SetFamily,
    budget: u64,
) -> Result<(usize, Vec<u32>)> {
    let m = family.m();
    let n = family.n();
    if n == 0 || n > m {
        return Err(Error::DegenerateInput(format!("selection size {n} vs ground {m}")));
    }
    let total = binomial_capped(m as u64, n as u64, budget as u128);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { required: total, budget: budget as u128 });
    }
    let words = (m + 63) / 64;
    let member_bits: Vec<Vec<u64>> = family
        .members()
        .iter()
        .map(|member| {
            let mut bits = vec![0u64; words];
            for &e in member {
                bits[e as usize / 64] |= 1 << (e % 64);
            }
            bits
        })
        .collect();

    let mut subset: Vec<u32> = (0..n as u32).collect();
    let mut best_value = usize::MAX;
    let mut best_subset = subset.clone();
    let mut sbits = vec![0u64; words];
    loop {
        for b in sbits.iter_mut() {
            *b = 0;
        }
        for &e in &subset {
            sbits[e as usize / 64] |= 1 << (e % 64);
        }
        let mut worst = 0usize;
        for bits in &member_bits {
            let overlap: u32 = bits
                .iter()
                .zip(&sbits)
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            worst = worst.max(overlap as usize);
            if worst >= best_value {
                break;
            }
        }
        if worst < best_value {
            best_value = worst;
            best_subset = subset.clone();
            if best_value == 0 {
                break;
            }
        }
        // lexicographic successor
        let mut i = n;
        loop {
            if i == 0 {
                return Ok((best_value, best_subset));
            }
            i -= 1;
            if subset[i] < (m - n + i) as u32 {
                subset[i] += 1;
                for j in i + 1..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
    Ok((best_value, best_subset))
}
