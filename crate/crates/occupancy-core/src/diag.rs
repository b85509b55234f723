//! Lower-bound and structure diagnostics: the reciprocal-distance
//! energy and AD-regularity profile, dyadic slope-class sums,
//! harmonic pair sums, the Dirichlet collinearity witness for
//! fractional-part sets, palindrome fixed points, and growth fitting.

use rayon::prelude::*;

use crate::construct::{
    permutation_set, quadratic_irrational_perm, reverse_bits, PermutationSpec,
};
use crate::error::{Error, Result};
use crate::eval::{max_tube_occupancy_exact, tube_occupancy_of_line};
use crate::grid::{GridSet, Line};

/// Σ over ordered pairs of selected squares of 1/dist(centers).
/// Parallel over the outer index with a fixed sequential reduction, so
/// the floating-point result is identical at any thread count.
pub fn energy(s: &GridSet) -> Result<f64> {
    if s.len() < 2 {
        return Err(Error::DegenerateInput("energy needs at least two squares".into()));
    }
    let centers: Vec<(f64, f64)> = s.squares().map(|sq| sq.center()).collect();
    let partials: Vec<f64> = centers
        .par_iter()
        .enumerate()
        .map(|(i, &(xi, yi))| {
            let mut acc = 0.0;
            for (j, &(xj, yj)) in centers.iter().enumerate() {
                if i == j {
                    continue;
                }
                acc += 1.0 / ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
            }
            acc
        })
        .collect();
    Ok(partials.iter().sum())
}

/// Covering and neighborhood counts at every dyadic radius
/// `r = 2^j/N ∈ [1/N, 1]`.
#[derive(Debug, Clone)]
pub struct RegularityProfile {
    pub n: u32,
    pub radii: Vec<f64>,
    /// Greedy farthest-first r-ball cover size, one per radius.
    pub cover_counts: Vec<usize>,
    /// Per-square count of squares within distance r (self included),
    /// one vector per radius.
    pub neighborhood_counts: Vec<Vec<usize>>,
}

impl RegularityProfile {
    /// One-dimensional AD-regularity: `c1·rN ≤ #neighbors ≤ c2·rN` for
    /// every square and every dyadic radius.
    pub fn ad_regular(&self, c1: f64, c2: f64) -> bool {
        self.radii.iter().zip(&self.neighborhood_counts).all(|(&r, counts)| {
            let scale = r * self.n as f64;
            counts
                .iter()
                .all(|&c| c as f64 >= c1 * scale && c as f64 <= c2 * scale)
        })
    }

    /// The covering hypothesis `cover_count ≲ 1/r`, with an explicit
    /// threshold constant.
    pub fn covering_hypothesis(&self, threshold: f64) -> bool {
        self.radii
            .iter()
            .zip(&self.cover_counts)
            .all(|(&r, &c)| (c as f64) <= threshold / r)
    }

    /// Max over radii of cover_count·r, the constant the hypothesis is
    /// judged against.
    pub fn max_cover_ratio(&self) -> f64 {
        self.radii
            .iter()
            .zip(&self.cover_counts)
            .map(|(&r, &c)| c as f64 * r)
            .fold(0.0, f64::max)
    }
}

/// Greedy metric cover plus neighborhood counts at each dyadic radius.
/// The cover is a farthest-first traversal seeded at the data
/// 1-center (the point minimizing the maximum distance), a factor-2
/// surrogate for the optimal r-ball cover; one unit ball at the middle
/// of a diagonal covers it, matching the r = 1 baseline.
pub fn ad_regularity_profile(s: &GridSet) -> Result<RegularityProfile> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = s.n();
    let centers: Vec<(f64, f64)> = s.squares().map(|sq| sq.center()).collect();
    let mut radii = Vec::new();
    let mut r = 1.0 / n as f64;
    while r <= 1.0 {
        radii.push(r);
        r *= 2.0;
    }
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();

    // the traversal order does not depend on the radius, so run it
    // once: after t picks, far[t] is the largest distance from any
    // point to its nearest pick; cover_count(r) = first t with
    // far[t] ≤ r
    let first = (0..centers.len())
        .map(|i| {
            let worst = centers
                .iter()
                .map(|&c| dist(centers[i], c))
                .fold(0.0f64, f64::max);
            (i, worst)
        })
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite").then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut min_dist = vec![f64::INFINITY; centers.len()];
    let mut far_after: Vec<f64> = Vec::new();
    let mut next = first;
    loop {
        let center = centers[next];
        let mut far_idx = 0usize;
        let mut far_dist = -1.0;
        for (i, &c) in centers.iter().enumerate() {
            let d = dist(center, c).min(min_dist[i]);
            min_dist[i] = d;
            if d > far_dist {
                far_dist = d;
                far_idx = i;
            }
        }
        far_after.push(far_dist);
        if far_dist <= 0.0 {
            break;
        }
        next = far_idx;
    }

    let cover_counts: Vec<usize> = radii
        .iter()
        .map(|&r| {
            far_after
                .iter()
                .position(|&d| d <= r)
                .map(|t| t + 1)
                .unwrap_or(far_after.len())
        })
        .collect();
    let neighborhood_counts: Vec<Vec<usize>> = radii
        .iter()
        .map(|&r| {
            centers
                .par_iter()
                .map(|&a| centers.iter().filter(|&&b| dist(a, b) <= r).count())
                .collect()
        })
        .collect();
    Ok(RegularityProfile { n, radii, cover_counts, neighborhood_counts })
}

/// Harmonic sums Σ 1/|n-m| over the dyadic slope classes A_j(n):
/// A_0 holds chords of slope magnitude ≤ 1, A_j (j ≥ 1) those with
/// magnitude in (2^(j-1), 2^j].
#[derive(Debug, Clone)]
pub struct SlopeClassSums {
    /// `sums[anchor][j]`, a ragged table.
    pub sums: Vec<Vec<f64>>,
    pub max_sum: f64,
    /// Class populations per anchor (for the partition check).
    pub class_sizes: Vec<Vec<usize>>,
}

pub fn slope_class_sums(perm: &PermutationSpec) -> SlopeClassSums {
    let values = perm.values();
    let len = values.len();
    let per_anchor: Vec<(Vec<f64>, Vec<usize>)> = (0..len)
        .into_par_iter()
        .map(|a| {
            let mut sums: Vec<f64> = Vec::new();
            let mut sizes: Vec<usize> = Vec::new();
            for m in 0..len {
                if m == a {
                    continue;
                }
                let gap = (a as f64 - m as f64).abs();
                let slope = ((values[a] - values[m]) / (a as f64 - m as f64)).abs();
                let j = if slope <= 1.0 {
                    0usize
                } else {
                    // smallest j with slope ≤ 2^j
                    slope.log2().ceil() as usize
                };
                if j >= sums.len() {
                    sums.resize(j + 1, 0.0);
                    sizes.resize(j + 1, 0);
                }
                sums[j] += 1.0 / gap;
                sizes[j] += 1;
            }
            (sums, sizes)
        })
        .collect();
    let mut sums = Vec::with_capacity(len);
    let mut class_sizes = Vec::with_capacity(len);
    let mut max_sum = 0.0f64;
    for (s, z) in per_anchor {
        for &v in &s {
            max_sum = max_sum.max(v);
        }
        sums.push(s);
        class_sizes.push(z);
    }
    SlopeClassSums { sums, max_sum, class_sizes }
}

/// Σ over ordered pairs n ≠ m of S of 1/|n-m|.
pub fn harmonic_pair_sum(set: &[u32]) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::DegenerateInput("harmonic sum needs at least two points".into()));
    }
    let partials: Vec<f64> = set
        .par_iter()
        .map(|&a| {
            let mut acc = 0.0;
            for &b in set {
                if a != b {
                    acc += 1.0 / (a as f64 - b as f64).abs();
                }
            }
            acc
        })
        .collect();
    Ok(partials.iter().sum())
}

/// The Dirichlet collinearity witness against fractional-part sets:
/// a denominator p ≤ √N with {pθ} ≤ 1/√N makes the points
/// `(pl, π(pl))` collinear for small l, pinning ≳ √N squares of the
/// associated grid set into one tube.
#[derive(Debug, Clone)]
pub struct DirichletWitness {
    pub p: u32,
    /// The collinear points `(p·l, π(p·l))`, l = 1, 2, …, with the
    /// first coordinate 1-based.
    pub points: Vec<(u32, f64)>,
    /// An exact line certified to meet every witness square.
    pub line: Line,
    /// `|tube(line) ∩ S|` for the associated fractional-part set,
    /// counted exactly.
    pub occupancy: usize,
}

pub fn dirichlet_collinear_witness(n: u32, theta: f64) -> Result<DirichletWitness> {
    if !theta.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    if n == 0 {
        return Err(Error::DegenerateInput("need N >= 1".into()));
    }
    if n == 1 {
        let perm = quadratic_irrational_perm(1, theta)?;
        let s = permutation_set(&perm);
        let rep = max_tube_occupancy_exact(&s)?;
        let line = match rep.witness {
            crate::eval::Witness::Line(line) => line,
            _ => unreachable!("exact reports carry a line"),
        };
        return Ok(DirichletWitness {
            p: 1,
            points: vec![(1, perm.values()[0])],
            line,
            occupancy: rep.max_count,
        });
    }
    let root = (n as f64).sqrt().floor() as u32;
    let bound = 1.0 / root as f64;
    let mut p = None;
    for cand in 1..=(2 * root) {
        if (cand as f64 * theta).fract() <= bound {
            p = Some(cand);
            break;
        }
    }
    let p = p.ok_or_else(|| {
        Error::Guard(format!("no denominator p ≤ 2√N with {{pθ}} ≤ 1/√N for θ={theta}"))
    })?;
    let fp = (p as f64 * theta).fract();
    let perm = quadratic_irrational_perm(n, theta)?;
    let s = permutation_set(&perm);

    let mut points = Vec::new();
    let mut witness_cells = Vec::new();
    let mut l = 1u32;
    while p * l <= n && (l as f64) * fp < 1.0 {
        let idx = (p * l - 1) as usize; // 0-based column of the 1-based p·l
        let value = perm.values()[idx];
        points.push((p * l, value));
        let row = (value.floor() as i64).clamp(0, n as i64 - 1) as u32;
        witness_cells.push((idx as u32, row));
        l += 1;
    }
    let witness_set = GridSet::new(n, witness_cells)?;
    // the collinear points guarantee one line through every witness
    // square; the exact evaluator on the small witness set recovers it
    // as a corner-pinned rational line
    let rep = max_tube_occupancy_exact(&witness_set)?;
    let line = match rep.witness {
        crate::eval::Witness::Line(line) => line,
        _ => unreachable!("exact reports carry a line"),
    };
    if rep.max_count < witness_set.len() {
        return Err(Error::InvariantViolation(format!(
            "witness line meets only {} of {} collinear squares",
            rep.max_count,
            witness_set.len()
        )));
    }
    let occupancy = tube_occupancy_of_line(&s, &line);
    Ok(DirichletWitness { p, points, line, occupancy })
}

/// All t-bit base-2 palindromes: the fixed points of the bit-reversal
/// permutation. There are 2^⌈t/2⌉ of them.
pub fn palindrome_fixed_points(t: u32) -> Vec<u32> {
    let n = 1u32 << t;
    (0..n).filter(|&v| reverse_bits(v, t) == v).collect()
}

/// Least-squares fits of occupancy growth: a power law
/// (log value vs log N) and the probabilistic-threshold model
/// (value vs log N / log log N).
#[derive(Debug, Clone, Copy)]
pub struct GrowthFit {
    pub exponent: f64,
    pub exponent_intercept: f64,
    pub exponent_residual: f64,
    pub log_coefficient: f64,
    pub log_intercept: f64,
    pub log_residual: f64,
}

pub fn fit_growth(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    if samples.len() < 3 {
        return Err(Error::DegenerateInput("need at least 3 samples".into()));
    }
    for &(n, v) in samples {
        if !(n >= 3.0) || !(v > 0.0) || !n.is_finite() || !v.is_finite() {
            return Err(Error::DegenerateInput(format!("bad sample ({n}, {v})")));
        }
    }
    let mut ns: Vec<f64> = samples.iter().map(|s| s.0).collect();
    ns.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateInput("sample N values must be distinct".into()));
    }
    let power: Vec<(f64, f64)> = samples.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let (exponent, exponent_intercept, exponent_residual) = least_squares(&power);
    let logmodel: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(n, v)| (n.ln() / n.ln().ln(), v))
        .collect();
    let (log_coefficient, log_intercept, log_residual) = least_squares(&logmodel);
    Ok(GrowthFit {
        exponent,
        exponent_intercept,
        exponent_residual,
        log_coefficient,
        log_intercept,
        log_residual,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let residual: f64 = pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    (slope, intercept, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::GOLDEN_RATIO;
    use crate::grid::Symmetry;

    fn diagonal(n: u32) -> GridSet {
        GridSet::new(n, (0..n).map(|i| (i, i))).unwrap()
    }

    #[test]
    fn energy_single_pair() {
        // N=2, squares (0,0) and (1,1): centers distance √2/2
        let s = GridSet::new(2, [(0, 0), (1, 1)]).unwrap();
        let e = energy(&s).unwrap();
        assert!((e - 2.0 * 2.0f64.sqrt()).abs() < 1e-12, "got {e}");
        assert!(energy(&GridSet::new(2, [(0, 0)]).unwrap()).is_err());
    }

    #[test]
    fn energy_symmetry_invariant() {
        let s = GridSet::new(8, [(0, 0), (3, 5), (7, 2), (4, 4)]).unwrap();
        let base = energy(&s).unwrap();
        for sym in Symmetry::ALL {
            let e = energy(&s.transform(sym)).unwrap();
            assert!((e - base).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_of_diagonal_scales_like_n2_logn() {
        let s = diagonal(16);
        let e = energy(&s).unwrap();
        // Σ_{i≠j} (N/√2)/|i-j| = √2·N·(N·H_{N-1} - (N-1))
        let mut expect = 0.0;
        for i in 0..16i64 {
            for j in 0..16i64 {
                if i != j {
                    expect += 16.0 / (2.0f64.sqrt() * (i - j).abs() as f64);
                }
            }
        }
        assert!((e - expect).abs() < 1e-9);
        let ratio = e / (16.0 * 16.0 * 16.0f64.ln());
        assert!(ratio > 1.0 / 64.0 && ratio < 64.0, "ratio {ratio}");
    }

    #[test]
    fn adreg_diagonal_is_regular() {
        let s = diagonal(64);
        let prof = ad_regularity_profile(&s).unwrap();
        assert_eq!(prof.cover_counts[prof.radii.len() - 1], 1); // r = 1
        assert!(prof.ad_regular(0.25, 4.0));
        assert!(prof.covering_hypothesis(4.0));
        // neighborhoods include self
        assert!(prof.neighborhood_counts.iter().flatten().all(|&c| c >= 1));
        // cover counts do not increase with the radius
        for w in prof.cover_counts.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn adreg_one_per_cell_fails_covering() {
        // at r = 1/8 the spread-out set needs ≫ 1/r = 8 balls
        let s = crate::construct::one_per_cell_set(64, crate::construct::Placement::Center, 0)
            .unwrap();
        let prof = ad_regularity_profile(&s).unwrap();
        let idx = prof
            .radii
            .iter()
            .position(|&r| (r - 0.125).abs() < 1e-12)
            .unwrap();
        assert!(
            prof.cover_counts[idx] >= 16,
            "cover {} at r=1/8 should dwarf 1/r = 8",
            prof.cover_counts[idx]
        );
        // at N=256 the two-dimensional spread breaks even the
        // threshold-4 covering surrogate
        let s = crate::construct::one_per_cell_set(256, crate::construct::Placement::Center, 0)
            .unwrap();
        let prof = ad_regularity_profile(&s).unwrap();
        assert!(!prof.covering_hypothesis(4.0));
        assert!(prof.max_cover_ratio() > 4.0);
    }

    #[test]
    fn slope_sums_identity_all_in_class_zero() {
        let perm = PermutationSpec::identity(64);
        let s = slope_class_sums(&perm);
        for (a, sizes) in s.class_sizes.iter().enumerate() {
            let total: usize = sizes.iter().sum();
            assert_eq!(total, 63, "anchor {a} partition");
            assert_eq!(sizes.len(), 1); // all slopes are 1
        }
        // max over anchors of Σ 1/|n-m| ≈ 2 ln N
        assert!(s.max_sum > (64f64).ln() && s.max_sum < 3.0 * (64f64).ln());
    }

    #[test]
    fn slope_sums_two_points() {
        let perm = PermutationSpec::identity(2);
        let s = slope_class_sums(&perm);
        assert_eq!(s.max_sum, 1.0);
    }

    #[test]
    fn slope_sums_partition_check_golden() {
        let perm = quadratic_irrational_perm(128, GOLDEN_RATIO).unwrap();
        let s = slope_class_sums(&perm);
        for sizes in &s.class_sizes {
            assert_eq!(sizes.iter().sum::<usize>(), 127);
        }
    }

    #[test]
    fn harmonic_sums() {
        assert_eq!(harmonic_pair_sum(&[1, 2]).unwrap(), 2.0);
        let full: Vec<u32> = (1..=1024).collect();
        let sum = harmonic_pair_sum(&full).unwrap();
        let ratio = sum / (1024.0 * 1024f64.ln());
        assert!(ratio >= 1.0 && ratio <= 3.0, "ratio {ratio}");
        let evens: Vec<u32> = (1..=1024).filter(|v| v % 2 == 0).collect();
        let sum = harmonic_pair_sum(&evens).unwrap();
        let m = evens.len() as f64;
        let ratio = sum / (m * m.ln());
        assert!(ratio >= 0.5 && ratio <= 3.0, "evens ratio {ratio}");
    }

    #[test]
    fn dirichlet_witness_golden() {
        let w = dirichlet_collinear_witness(64, GOLDEN_RATIO).unwrap();
        // convergent denominators of the golden ratio are Fibonacci
        assert!([1, 2, 3, 5, 8, 13].contains(&w.p), "p = {}", w.p);
        assert!(w.occupancy >= 6, "occupancy {}", w.occupancy);
        assert!(w.points.len() >= 2);
        let w = dirichlet_collinear_witness(1, GOLDEN_RATIO).unwrap();
        assert_eq!(w.occupancy, 1);
    }

    #[test]
    fn palindromes() {
        assert_eq!(palindrome_fixed_points(3), vec![0, 2, 5, 7]);
        assert_eq!(palindrome_fixed_points(2), vec![0, 3]);
        assert_eq!(palindrome_fixed_points(8).len(), 16); // 2^⌈8/2⌉
        for t in 1..=10u32 {
            assert_eq!(palindrome_fixed_points(t).len(), 1 << t.div_ceil(2));
        }
    }

    #[test]
    fn fit_growth_recovers_power_laws() {
        let samples: Vec<(f64, f64)> = [16.0, 64.0, 256.0, 1024.0]
            .iter()
            .map(|&n| (n, n))
            .collect();
        let fit = fit_growth(&samples).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-9);
        let samples: Vec<(f64, f64)> =
            [16.0, 64.0, 256.0].iter().map(|&n| (n, 7.5)).collect();
        let fit = fit_growth(&samples).unwrap();
        assert!(fit.exponent.abs() < 1e-9);
        assert!(fit_growth(&samples[..2]).is_err());
        assert!(fit_growth(&[(16.0, 1.0), (16.0, 2.0), (32.0, 3.0)]).is_err());
    }
}
