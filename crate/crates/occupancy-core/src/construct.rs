//! Every explicit candidate selection: permutation-driven sets,
//! one-per-cell and packed-cell layouts, curve sets, self-similar
//! composition, and uniform random sets. All generators are pure and
//! seedable.
//!
//! Indices are 0-based throughout: a spec over `{0..N-1}` with value
//! `π(k)` stands for the 1-based `π(n)` at `n = k+1`. Chord slopes and
//! gaps only see differences, so the shift is invisible to every
//! downstream formula.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridSet;

pub const GOLDEN_RATIO: f64 = 1.618033988749894848;

/// An integer permutation of `{0..N-1}` or a quasi-permutation: a real
/// map into `[0,N]` whose values are pairwise separated by a recorded
/// positive gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PermKind {
    IntegerPermutation,
    QuasiPermutation { min_gap: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationSpec {
    n: u32,
    values: Vec<f64>,
    kind: PermKind,
}

impl PermutationSpec {
    /// Wrap an integer permutation; values must be a bijection on
    /// `{0..N-1}`.
    pub fn integer(values: Vec<u32>) -> Result<Self> {
        let n = values.len() as u32;
        let mut seen = vec![false; values.len()];
        for &v in &values {
            if v >= n || seen[v as usize] {
                return Err(Error::NotAPermutation(format!(
                    "value {v} repeated or out of range for domain size {n}"
                )));
            }
            seen[v as usize] = true;
        }
        Ok(Self {
            n,
            values: values.into_iter().map(f64::from).collect(),
            kind: PermKind::IntegerPermutation,
        })
    }

    /// Wrap real values in `[0,N]`; the minimum pairwise gap is
    /// computed and recorded. A zero gap (duplicate values) is allowed
    /// but callers may treat it as a warning sign.
    pub fn quasi(values: Vec<f64>) -> Result<Self> {
        let n = values.len() as u32;
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if *v < 0.0 || *v > n as f64 {
                return Err(Error::DegenerateInput(format!(
                    "value {v} at index {i} outside [0,{n}]"
                )));
            }
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let min_gap = sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let min_gap = if min_gap.is_finite() { min_gap } else { 0.0 };
        Ok(Self {
            n,
            values,
            kind: PermKind::QuasiPermutation { min_gap },
        })
    }

    pub fn identity(n: u32) -> Self {
        Self::integer((0..n).collect()).expect("identity is a bijection")
    }

    pub fn reversal(n: u32) -> Self {
        Self::integer((0..n).rev().collect()).expect("reversal is a bijection")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PermKind {
        self.kind
    }

    /// Integer values, when the spec wraps an integer permutation.
    pub fn integer_values(&self) -> Option<Vec<u32>> {
        match self.kind {
            PermKind::IntegerPermutation => {
                Some(self.values.iter().map(|&v| v as u32).collect())
            }
            PermKind::QuasiPermutation { .. } => None,
        }
    }
}

/// One square per column: column k holds row `clamp(⌊π(k)⌋, 0, N-1)`.
pub fn permutation_set(perm: &PermutationSpec) -> GridSet {
    let n = perm.n();
    let cells = perm.values().iter().enumerate().map(|(k, &v)| {
        let row = (v.floor() as i64).clamp(0, n as i64 - 1) as u32;
        (k as u32, row)
    });
    GridSet::new(n, cells).expect("one distinct square per column")
}

/// The fractional-part quasi-permutation `π(k) = N·{(k+1)θ}`. Badly
/// approximable θ (all quadratic irrationals) give pairwise separation
/// `|π(n)-π(m)| ≳ N/|n-m|`. Rational θ collapses values at large N;
/// the recorded `min_gap` exposes that.
pub fn quadratic_irrational_perm(n: u32, theta: f64) -> Result<PermutationSpec> {
    if !theta.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    let values = (0..n)
        .map(|k| {
            let x = (k as f64 + 1.0) * theta;
            n as f64 * x.fract()
        })
        .collect();
    PermutationSpec::quasi(values)
}

/// Base-2 digit reversal on `{0..2^t-1}`: an involution whose fixed
/// points are exactly the t-bit palindromes.
pub fn bit_reversal_perm(t: u32) -> Result<PermutationSpec> {
    if t == 0 || t > 16 {
        return Err(Error::DegenerateInput(format!("t={t} outside 1..=16")));
    }
    let n = 1u32 << t;
    let values = (0..n).map(|k| reverse_bits(k, t)).collect();
    PermutationSpec::integer(values)
}

pub(crate) fn reverse_bits(v: u32, t: u32) -> u32 {
    let mut out = 0;
    for i in 0..t {
        out |= ((v >> i) & 1) << (t - 1 - i);
    }
    out
}

/// Permute base-2 digit positions by a seeded uniform permutation σ:
/// input bit i moves to output position σ(i). A bijection for every
/// seed; σ = reversal reproduces [`bit_reversal_perm`].
pub fn digit_scramble_perm(t: u32, seed: u64) -> Result<PermutationSpec> {
    if t == 0 || t > 16 {
        return Err(Error::DegenerateInput(format!("t={t} outside 1..=16")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma: Vec<u32> = (0..t).collect();
    for i in (1..t as usize).rev() {
        let j = rng.gen_range(0..=i);
        sigma.swap(i, j);
    }
    Ok(scramble_with(t, &sigma))
}

pub(crate) fn scramble_with(t: u32, sigma: &[u32]) -> PermutationSpec {
    let n = 1u32 << t;
    let values = (0..n)
        .map(|k| {
            let mut out = 0;
            for (i, &si) in sigma.iter().enumerate() {
                out |= ((k >> i) & 1) << si;
            }
            out
        })
        .collect();
    PermutationSpec::integer(values).expect("digit scrambling is a bijection")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Corner,
    Center,
    Random,
}

/// Exactly one 1/N-square inside each of the N cells of side 1/√N.
pub fn one_per_cell_set(n: u32, placement: Placement, seed: u64) -> Result<GridSet> {
    let s = integer_sqrt(n).ok_or(Error::NotPerfectSquare(n))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = Vec::with_capacity(n as usize);
    for i in 0..s {
        for j in 0..s {
            let (dx, dy) = match placement {
                Placement::Corner => (0, 0),
                Placement::Center => (s / 2, s / 2),
                Placement::Random => (rng.gen_range(0..s), rng.gen_range(0..s)),
            };
            cells.push((i * s + dx, j * s + dy));
        }
    }
    GridSet::new(n, cells)
}

/// All √N×√N squares packed into the lower-left 1/√N-cell.
pub fn packed_cell_set(n: u32) -> Result<GridSet> {
    let s = integer_sqrt(n).ok_or(Error::NotPerfectSquare(n))?;
    GridSet::new(n, (0..s).flat_map(|c| (0..s).map(move |r| (c, r))))
}

fn integer_sqrt(n: u32) -> Option<u32> {
    let s = (n as f64).sqrt().round() as u32;
    (s > 0 && s * s == n).then_some(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    /// `y = scale·x²`; spans [0,1] horizontally, stays inside [0,1]².
    Parabola { scale: f64 },
    /// Quarter circle `y = 1 - sqrt(1-x²)`, positive curvature.
    CircleArc,
}

/// Squares containing the points `(x_k, γ(x_k))`, `x_k = (k+0.5)/N`.
/// Returns the set and the number of collapsed duplicates.
pub fn curve_set(n: u32, curve: Curve) -> Result<(GridSet, usize)> {
    if n < 2 {
        return Err(Error::DegenerateInput("curve sets need N >= 2".into()));
    }
    let gamma = |x: f64| -> f64 {
        match curve {
            Curve::Parabola { scale } => scale * x * x,
            Curve::CircleArc => 1.0 - (1.0 - x * x).max(0.0).sqrt(),
        }
    };
    if let Curve::Parabola { scale } = curve {
        if !(scale > 0.0) || scale > 1.0 {
            return Err(Error::DegenerateInput(
                "parabola scale must lie in (0,1] to stay inside the unit square".into(),
            ));
        }
    }
    let mut cells = Vec::with_capacity(n as usize);
    for k in 0..n {
        let x = (k as f64 + 0.5) / n as f64;
        let y = gamma(x);
        let col = ((x * n as f64).floor() as i64).clamp(0, n as i64 - 1) as u32;
        let row = ((y * n as f64).floor() as i64).clamp(0, n as i64 - 1) as u32;
        cells.push((col, row));
    }
    cells.sort_unstable();
    let before = cells.len();
    cells.dedup();
    let collapsed = before - cells.len();
    Ok((GridSet::new(n, cells)?, collapsed))
}

/// Place a rescaled copy of `inner` inside every square of `outer`.
/// The result lives at resolution `outer.n() * inner.n()` and has
/// `|outer|·|inner|` squares.
pub fn self_similar_compose(outer: &GridSet, inner: &GridSet) -> Result<GridSet> {
    let no = outer.n() as u64;
    let ni = inner.n() as u64;
    let n = no * ni;
    if n > crate::grid::MAX_RESOLUTION as u64 {
        return Err(Error::DegenerateInput(format!(
            "composed resolution {n} too large"
        )));
    }
    let n = n as u32;
    let mut cells = Vec::with_capacity(outer.len() * inner.len());
    for (oc, or) in outer.cells() {
        for (ic, ir) in inner.cells() {
            cells.push((oc * inner.n() + ic, or * inner.n() + ir));
        }
    }
    GridSet::new(n, cells)
}

/// Uniform N-subset of the N² squares via a rejection-free partial
/// Fisher–Yates shuffle; deterministic given seed.
pub fn random_set(n: u32, seed: u64) -> GridSet {
    let total = n as u64 * n as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = sample_distinct(&mut rng, total, n as usize);
    GridSet::from_ids(n, ids.into_iter().map(|v| v as u32))
        .expect("sampled ids are distinct and in range")
}

/// `count` distinct values from `0..total`, uniformly, by a sparse
/// partial shuffle.
pub(crate) fn sample_distinct<R: Rng>(rng: &mut R, total: u64, count: usize) -> Vec<u64> {
    assert!(count as u64 <= total, "cannot sample {count} from {total}");
    let mut swap: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let j = rng.gen_range(i..total);
        let pick = swap.get(&j).copied().unwrap_or(j);
        let cur_i = swap.get(&i).copied().unwrap_or(i);
        swap.insert(j, cur_i);
        out.push(pick);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_reversal_sets() {
        let s = permutation_set(&PermutationSpec::identity(4));
        assert_eq!(s.cells().collect::<Vec<_>>(), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        let s = permutation_set(&PermutationSpec::reversal(4));
        assert_eq!(s.cells().collect::<Vec<_>>(), vec![(0, 3), (1, 2), (2, 1), (3, 0)]);
    }

    #[test]
    fn golden_rows_match_direct_arithmetic() {
        let n = 8u32;
        let perm = quadratic_irrational_perm(n, GOLDEN_RATIO).unwrap();
        let s = permutation_set(&perm);
        for (k, (col, row)) in s.cells().enumerate() {
            assert_eq!(col, k as u32);
            let expect = (n as f64 * ((k as f64 + 1.0) * GOLDEN_RATIO).fract()).floor() as u32;
            assert_eq!(row, expect.min(n - 1));
        }
        // direct arithmetic at N=5
        let perm = quadratic_irrational_perm(5, GOLDEN_RATIO).unwrap();
        for (k, &v) in perm.values().iter().enumerate() {
            let direct = 5.0 * ((k as f64 + 1.0) * GOLDEN_RATIO).fract();
            assert!((v - direct).abs() < 1e-12);
        }
        // single value domain
        assert_eq!(quadratic_irrational_perm(1, 2f64.sqrt()).unwrap().len(), 1);
    }

    #[test]
    fn quasi_separation_for_badly_approximable() {
        for theta in [GOLDEN_RATIO, std::f64::consts::SQRT_2] {
            for n in [16u32, 64, 256] {
                let perm = quadratic_irrational_perm(n, theta).unwrap();
                let v = perm.values();
                let mut min_prod = f64::INFINITY;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        let prod = (v[i] - v[j]).abs() * (i as f64 - j as f64).abs();
                        min_prod = min_prod.min(prod / n as f64);
                    }
                }
                assert!(min_prod > 0.2, "theta={theta} n={n}: {min_prod}");
            }
        }
    }

    #[test]
    fn bit_reversal_examples_and_involution() {
        let p = bit_reversal_perm(2).unwrap();
        let v = p.integer_values().unwrap();
        assert_eq!(v, vec![0, 2, 1, 3]);
        let p = bit_reversal_perm(3).unwrap();
        let v = p.integer_values().unwrap();
        assert_eq!(v[1], 4); // 001 -> 100
        let fixed: Vec<u32> = (0..8).filter(|&k| v[k as usize] == k).collect();
        assert_eq!(fixed, vec![0, 2, 5, 7]);
        for t in 1..=10 {
            let v = bit_reversal_perm(t).unwrap().integer_values().unwrap();
            for (k, &pk) in v.iter().enumerate() {
                assert_eq!(v[pk as usize] as usize, k);
            }
        }
    }

    #[test]
    fn scramble_is_bijection_and_reversal_case() {
        for seed in 0..20u64 {
            let p = digit_scramble_perm(4, seed).unwrap();
            assert!(p.integer_values().is_some());
        }
        let rev_sigma: Vec<u32> = (0..5).rev().collect();
        let scrambled = scramble_with(5, &rev_sigma);
        let bitrev = bit_reversal_perm(5).unwrap();
        assert_eq!(scrambled.values(), bitrev.values());
        let id_sigma: Vec<u32> = (0..5).collect();
        assert_eq!(
            scramble_with(5, &id_sigma).values(),
            PermutationSpec::identity(32).values()
        );
    }

    #[test]
    fn one_per_cell_layouts() {
        let s = one_per_cell_set(4, Placement::Corner, 0).unwrap();
        assert_eq!(s.cells().collect::<Vec<_>>(), vec![(0, 0), (0, 2), (2, 0), (2, 2)]);
        let s = one_per_cell_set(9, Placement::Center, 0).unwrap();
        for (col, row) in s.cells() {
            assert_eq!(col % 3, 1);
            assert_eq!(row % 3, 1);
        }
        // each cell holds exactly one square
        let s = one_per_cell_set(16, Placement::Random, 7).unwrap();
        assert_eq!(s.len(), 16);
        let mut per_cell = std::collections::HashMap::new();
        for (col, row) in s.cells() {
            *per_cell.entry((col / 4, row / 4)).or_insert(0) += 1;
        }
        assert_eq!(per_cell.len(), 16);
        assert!(per_cell.values().all(|&c| c == 1));
        assert!(one_per_cell_set(5, Placement::Corner, 0).is_err());
    }

    #[test]
    fn packed_cell_examples() {
        let s = packed_cell_set(4).unwrap();
        assert_eq!(s.cells().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let s = packed_cell_set(9).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.cells().all(|(c, r)| c < 3 && r < 3));
    }

    #[test]
    fn curve_sets_distinct_per_column() {
        let (s, collapsed) = curve_set(4, Curve::Parabola { scale: 1.0 }).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(collapsed, 0);
        // first point (1/8, 1/64) lands in square (0,0)
        assert!(s.contains(0, 0));
        let (s, _) = curve_set(2, Curve::CircleArc).unwrap();
        assert_eq!(s.len(), 2);
        let (s, collapsed) = curve_set(16, Curve::CircleArc).unwrap();
        assert_eq!(s.len(), 16);
        assert_eq!(collapsed, 0);
    }

    #[test]
    fn compose_single_squares() {
        let a = GridSet::new(2, [(0, 0)]).unwrap();
        let c = self_similar_compose(&a, &a).unwrap();
        assert_eq!(c.n(), 4);
        assert_eq!(c.cells().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn compose_cardinality_multiplies() {
        let a = GridSet::new(3, [(0, 0), (1, 2), (2, 1)]).unwrap();
        let c = self_similar_compose(&a, &a).unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!(c.n(), 9);
        let ccc = self_similar_compose(&c, &a).unwrap();
        assert_eq!(ccc.len(), 27);
        assert_eq!(ccc.n(), 27);
    }

    #[test]
    fn random_set_deterministic_and_uniformish() {
        let a = random_set(16, 42);
        let b = random_set(16, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        assert_ne!(a, random_set(16, 43));
        assert_eq!(random_set(1, 0).len(), 1);

        // empirical inclusion frequency over seeds: each square is
        // included with probability 1/N; a 5σ band around the binomial
        // mean must hold for the total spread
        let n = 32u32;
        let trials = 400u32;
        let mut counts = vec![0u32; (n * n) as usize];
        for seed in 0..trials {
            for id in random_set(n, seed as u64).ids() {
                counts[id as usize] += 1;
            }
        }
        let p = 1.0 / n as f64;
        let mean = trials as f64 * p;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        // ~1024 bins: allow 5σ per bin
        for &c in &counts {
            assert!((c as f64 - mean).abs() <= 5.0 * sigma, "count {c} vs mean {mean}");
        }
    }
}
