//! Abstract families of subsets of a ground set: the minimax machinery
//! for arbitrary collections, greedy low-intersection selection,
//! probabilistic selection with verification, covering designs, and
//! the adversarial block families. Also the two canonical tube
//! families bridging the grid world into this one.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use std::io::{BufRead, Write};

use crate::construct::sample_distinct;
use crate::error::{Error, Result};
use crate::grid::{cell_id, critical_lines, tube_squares, GridSet};

/// A collection of subsets of `{0..M-1}`. `n` is the nominal selection
/// size (the N of the N-set problem). Members of a Def-1.1-style
/// family all have exactly `n` elements; tube families keep their
/// natural sizes (up to 2N+2), which the constructors document.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFamily {
    m: usize,
    n: usize,
    members: Vec<Vec<u32>>,
}

impl SetFamily {
    /// Validate and build. Members are sorted internally; duplicate
    /// elements within a member and out-of-range elements are
    /// rejected. Empty members are rejected.
    pub fn new(m: usize, n: usize, members: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 || n > m {
            return Err(Error::DegenerateInput(format!(
                "selection size {n} vs ground set {m}"
            )));
        }
        let mut sorted_members = Vec::with_capacity(members.len());
        for mut member in members {
            if member.is_empty() {
                return Err(Error::DegenerateInput("empty family member".into()));
            }
            member.sort_unstable();
            for w in member.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DegenerateInput(format!(
                        "duplicate element {} in member",
                        w[0]
                    )));
                }
            }
            if let Some(&last) = member.last() {
                if last as usize >= m {
                    return Err(Error::ElementOutOfRange { element: last, m });
                }
            }
            sorted_members.push(member);
        }
        Ok(Self { m, n, members: sorted_members })
    }

    /// Every n-subset of the ground set, in lexicographic order.
    pub fn complete(m: usize, n: usize, budget: u64) -> Result<Self> {
        let total = binomial_u128(m as u64, n as u64);
        if total > budget as u128 {
            return Err(Error::BudgetExceeded { required: total, budget: budget as u128 });
        }
        let mut members = Vec::with_capacity(total as usize);
        let mut subset: Vec<u32> = (0..n as u32).collect();
        loop {
            members.push(subset.clone());
            if !next_combination(&mut subset, m) {
                break;
            }
        }
        Self::new(m, n, members)
    }

    /// `count` independent uniform n-subsets (members may repeat).
    pub fn random(count: usize, m: usize, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..count)
            .map(|_| {
                let mut s: Vec<u32> = sample_distinct(&mut rng, m as u64, n)
                    .into_iter()
                    .map(|v| v as u32)
                    .collect();
                s.sort_unstable();
                s
            })
            .collect();
        Self::new(m, n, members)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Vec<u32>] {
        &self.members
    }

    /// Element -> indices of members containing it.
    pub fn inverted_index(&self) -> Vec<Vec<u32>> {
        let mut index = vec![Vec::new(); self.m];
        for (mi, member) in self.members.iter().enumerate() {
            for &e in member {
                index[e as usize].push(mi as u32);
            }
        }
        index
    }

    /// Text form: `M <m> N <n>` header, one member per line as
    /// space-separated sorted indices.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "M {} N {}", self.m, self.n)?;
        for member in &self.members {
            let mut first = true;
            for e in member {
                if !first {
                    write!(w, " ")?;
                }
                write!(w, "{e}")?;
                first = false;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
        let header = header?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let (m, n) = match tokens.as_slice() {
            ["M", m, "N", n] => {
                let m = m.parse::<usize>().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
                let n = n.parse::<usize>().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
                (m, n)
            }
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected `M <m> N <n>`, got `{header}`"),
                })
            }
        };
        let mut members = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let member = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>().map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })
                })
                .collect::<Result<Vec<u32>>>()?;
            members.push(member);
        }
        Self::new(m, n, members)
    }
}

fn next_combination(subset: &mut [u32], m: usize) -> bool {
    let n = subset.len();
    let mut i = n;
    while i > 0 {
        i -= 1;
        if subset[i] < (m - n + i) as u32 {
            subset[i] += 1;
            for j in i + 1..n {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub(crate) fn binomial_u128(m: u64, k: u64) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn big_binomial(m: u64, k: u64) -> BigInt {
    if k > m {
        return BigInt::from(0);
    }
    let k = k.min(m - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    acc
}

fn selection_bits(m: usize, selection: &[u32]) -> Result<Vec<u64>> {
    let mut bits = vec![0u64; (m + 63) / 64];
    for &e in selection {
        if e as usize >= m {
            return Err(Error::ElementOutOfRange { element: e, m });
        }
        let word = &mut bits[e as usize / 64];
        let mask = 1u64 << (e % 64);
        if *word & mask != 0 {
            return Err(Error::DegenerateInput(format!("duplicate element {e}")));
        }
        *word |= mask;
    }
    Ok(bits)
}

/// Exact `max over members of |S ∩ S'|` with the first maximizing
/// member (in member order) as witness. Empty families give (0, None).
pub fn family_max_intersection(
    family: &SetFamily,
    selection: &[u32],
) -> Result<(usize, Option<usize>)> {
    if selection.len() != family.n {
        return Err(Error::SizeMismatch { expected: family.n, got: selection.len() });
    }
    let bits = selection_bits(family.m, selection)?;
    let best = family
        .members
        .par_iter()
        .enumerate()
        .map(|(idx, member)| {
            let count = member
                .iter()
                .filter(|&&e| bits[e as usize / 64] & (1 << (e % 64)) != 0)
                .count();
            (count, idx)
        })
        .reduce_with(|a, b| {
            // max count, ties to the earliest member
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            }
        });
    Ok(match best {
        Some((count, idx)) => (count, Some(idx)),
        None => (0, None),
    })
}

/// Output of the multi-stage greedy selection.
#[derive(Debug, Clone)]
pub struct GreedySelection {
    /// The N selected elements, in selection order.
    pub selected: Vec<u32>,
    /// The stage sets S'_1, S'_2, …; each intersects every family
    /// member at most once.
    pub stage_sets: Vec<Vec<u32>>,
    /// K = max(1, ⌈|family|/N⌉); the number of stages is at most 8K.
    pub k_cap: usize,
}

/// The multi-stage pool selection: restrict to the pool of elements
/// lying in at most 2K members, then repeatedly pick the smallest
/// available element and discard its whole influence set
/// (the union of the members containing it) for the rest of the stage.
/// Each stage set meets every member at most once, so the final
/// selection meets every member at most `#stages ≤ 8K` times.
pub fn greedy_low_intersection_select(family: &SetFamily) -> Result<GreedySelection> {
    let n = family.n;
    let m = family.m;
    let k_cap = std::cmp::max(1, family.len().div_ceil(n));
    if k_cap > n {
        return Err(Error::Guard(format!(
            "family too large: K = {k_cap} exceeds N = {n}"
        )));
    }
    let index = family.inverted_index();
    let words = (m + 63) / 64;
    let mut pool = vec![0u64; words];
    for e in 0..m {
        if index[e].len() <= 2 * k_cap {
            pool[e / 64] |= 1 << (e % 64);
        }
    }
    let mut selected_bits = vec![0u64; words];
    let mut selected: Vec<u32> = Vec::with_capacity(n);
    let mut stage_sets: Vec<Vec<u32>> = Vec::new();

    'outer: while selected.len() < n {
        let mut avail: Vec<u64> = pool
            .iter()
            .zip(&selected_bits)
            .map(|(p, s)| p & !s)
            .collect();
        let mut stage: Vec<u32> = Vec::new();
        while let Some(e) = first_set(&avail) {
            let e32 = e as u32;
            selected.push(e32);
            stage.push(e32);
            selected_bits[e / 64] |= 1 << (e % 64);
            avail[e / 64] &= !(1 << (e % 64));
            for &mi in &index[e] {
                for &x in &family.members[mi as usize] {
                    avail[x as usize / 64] &= !(1 << (x % 64));
                }
            }
            if selected.len() == n {
                stage_sets.push(stage);
                break 'outer;
            }
        }
        if stage.is_empty() {
            return Err(Error::Guard(
                "selection pool exhausted before reaching N elements".into(),
            ));
        }
        stage_sets.push(stage);
    }
    if stage_sets.len() > 8 * k_cap {
        return Err(Error::InvariantViolation(format!(
            "{} stages exceeds the 8K = {} bound",
            stage_sets.len(),
            8 * k_cap
        )));
    }
    Ok(GreedySelection { selected, stage_sets, k_cap })
}

fn first_set(bits: &[u64]) -> Option<usize> {
    for (w, &word) in bits.iter().enumerate() {
        if word != 0 {
            return Some(w * 64 + word.trailing_zeros() as usize);
        }
    }
    None
}

/// Outcome of one random selection against the log-threshold.
#[derive(Debug, Clone)]
pub struct RandomSelection {
    pub selected: Vec<u32>,
    pub max_intersection: usize,
    pub witness: Option<usize>,
    /// β·log N / log log N (natural logarithms).
    pub threshold: f64,
    pub pass: bool,
    /// The exponent s with |family| = N^(1+s), floored at 0.
    pub s_exponent: f64,
}

/// Draw a uniform N-subset and check it against the probabilistic
/// threshold β·log N/log log N. Requires N ≥ 3 (so log log N > 0) and
/// β > 1 + s.
pub fn random_select_verify(family: &SetFamily, beta: f64, seed: u64) -> Result<RandomSelection> {
    let n = family.n;
    if n < 3 {
        return Err(Error::DegenerateInput("need N >= 3 for log log N > 0".into()));
    }
    let s_exponent = if family.len() <= 1 {
        0.0
    } else {
        ((family.len() as f64).ln() / (n as f64).ln() - 1.0).max(0.0)
    };
    if !(beta > 1.0 + s_exponent) {
        return Err(Error::Guard(format!(
            "beta = {beta} must exceed 1 + s = {}",
            1.0 + s_exponent
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected: Vec<u32> = sample_distinct(&mut rng, family.m as u64, n)
        .into_iter()
        .map(|v| v as u32)
        .collect();
    selected.sort_unstable();
    let (max_intersection, witness) = family_max_intersection(family, &selected)?;
    let threshold = beta * (n as f64).ln() / (n as f64).ln().ln();
    let pass = (max_intersection as f64) <= threshold;
    Ok(RandomSelection { selected, max_intersection, witness, threshold, pass, s_exponent })
}

/// Exact overlap distribution of two uniform N-sets in [N²]:
/// `P(|S∩S'| = k) = C(N,k)·C(N²-N,N-k)/C(N²,N)`, with `k!·pmf`
/// alongside for the ∼1/k! comparison. Big-integer arithmetic.
pub fn hypergeometric_overlap_pmf(n: u64, k: u64) -> Result<(BigRational, BigRational)> {
    if k > n {
        return Err(Error::DegenerateInput(format!("k={k} exceeds N={n}")));
    }
    let m = n * n;
    let numer = big_binomial(n, k) * big_binomial(m - n, n - k);
    let denom = big_binomial(m, n);
    let pmf = BigRational::new(numer, denom);
    let mut kfact = BigInt::from(1);
    for i in 2..=k {
        kfact *= BigInt::from(i);
    }
    let scaled = &pmf * BigRational::from_integer(kfact);
    Ok((pmf, scaled))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMethod {
    Greedy,
    RandomPatch,
}

impl CoverMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoverMethod::Greedy => "greedy",
            CoverMethod::RandomPatch => "random-patch",
        }
    }
}

/// A covering design: k-sets covering every l-set of [n].
#[derive(Debug, Clone)]
pub struct CoverResult {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub k_sets: Vec<Vec<u32>>,
    pub method: CoverMethod,
    pub certified: bool,
}

/// Independent certification: every l-subset of [n] is contained in
/// some chosen k-set, checked by full enumeration.
fn certify_cover(n: usize, l: usize, k_sets: &[Vec<u32>]) -> bool {
    let mut lset: Vec<u32> = (0..l as u32).collect();
    loop {
        let covered = k_sets.iter().any(|ks| is_subset(&lset, ks));
        if !covered {
            return false;
        }
        if !next_combination(&mut lset, n) {
            return true;
        }
    }
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    // both sorted
    let mut it = big.iter();
    'outer: for &s in small {
        for &b in it.by_ref() {
            match b.cmp(&s) {
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Less => {}
            }
        }
        return false;
    }
    true
}

fn check_cover_params(n: usize, k: usize, l: usize, budget: u64) -> Result<()> {
    if !(1 <= l && l < k && k <= n) {
        return Err(Error::DegenerateInput(format!(
            "need 1 <= l < k <= n, got (n,k,l)=({n},{k},{l})"
        )));
    }
    for (m, r) in [(n, l), (n, k)] {
        let c = binomial_u128(m as u64, r as u64);
        if c > budget as u128 {
            return Err(Error::BudgetExceeded { required: c, budget: budget as u128 });
        }
    }
    Ok(())
}

/// Colex rank of a sorted l-subset, for O(1) covered-flag lookup.
fn colex_rank(subset: &[u32]) -> usize {
    subset
        .iter()
        .enumerate()
        .map(|(i, &a)| binomial_u128(a as u64, i as u64 + 1) as usize)
        .sum()
}

/// Classic greedy cover: repeatedly add the k-set covering the most
/// still-uncovered l-sets, ties to the lexicographically smallest.
/// The size obeys the standard (C(n,l)/C(k,l))·(1+ln C(k,l)) guarantee.
pub fn greedy_cover(n: usize, k: usize, l: usize, budget: u64) -> Result<CoverResult> {
    check_cover_params(n, k, l, budget)?;
    let total_l = binomial_u128(n as u64, l as u64) as usize;
    let mut covered = vec![false; total_l];
    let mut uncovered = total_l;
    let mut chosen: Vec<Vec<u32>> = Vec::new();
    let mut scratch: Vec<u32> = vec![0; l];
    while uncovered > 0 {
        let mut best: Option<(usize, Vec<u32>)> = None;
        let mut kset: Vec<u32> = (0..k as u32).collect();
        loop {
            let mut gain = 0usize;
            for_each_subset(&kset, l, &mut scratch, &mut |sub| {
                if !covered[colex_rank(sub)] {
                    gain += 1;
                }
            });
            if best.as_ref().map_or(true, |(g, _)| gain > *g) {
                best = Some((gain, kset.clone()));
            }
            if !next_combination(&mut kset, n) {
                break;
            }
        }
        let (gain, pick) = best.expect("at least one candidate k-set");
        debug_assert!(gain > 0, "greedy must make progress");
        for_each_subset(&pick, l, &mut scratch, &mut |sub| {
            let r = colex_rank(sub);
            if !covered[r] {
                covered[r] = true;
                uncovered -= 1;
            }
        });
        chosen.push(pick);
    }
    let certified = certify_cover(n, l, &chosen);
    Ok(CoverResult { n, k, l, k_sets: chosen, method: CoverMethod::Greedy, certified })
}

/// Enumerate the l-subsets of a sorted slice into `scratch`, calling
/// `f` for each.
fn for_each_subset(set: &[u32], l: usize, scratch: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    let k = set.len();
    let mut idx: Vec<usize> = (0..l).collect();
    loop {
        scratch.clear();
        scratch.extend(idx.iter().map(|&i| set[i]));
        f(scratch);
        let mut i = l;
        let mut done = true;
        while i > 0 {
            i -= 1;
            if idx[i] < k - l + i {
                idx[i] += 1;
                for j in i + 1..l {
                    idx[j] = idx[j - 1] + 1;
                }
                done = false;
                break;
            }
        }
        if done {
            break;
        }
    }
}

/// The double-counting construction: draw
/// `x = ⌈(C(n,l)/C(k,l))·ln C(k,l)⌉` random k-sets, then patch every
/// l-set still uncovered with a deterministic k-set containing it.
pub fn random_patch_cover(
    n: usize,
    k: usize,
    l: usize,
    seed: u64,
    budget: u64,
) -> Result<CoverResult> {
    check_cover_params(n, k, l, budget)?;
    let cnl = binomial_u128(n as u64, l as u64) as f64;
    let ckl = binomial_u128(k as u64, l as u64) as f64;
    let x = (cnl / ckl * ckl.ln()).ceil().max(1.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<Vec<u32>> = (0..x)
        .map(|_| {
            let mut s: Vec<u32> = sample_distinct(&mut rng, n as u64, k)
                .into_iter()
                .map(|v| v as u32)
                .collect();
            s.sort_unstable();
            s
        })
        .collect();
    // patch pass
    let mut lset: Vec<u32> = (0..l as u32).collect();
    loop {
        if !chosen.iter().any(|ks| is_subset(&lset, ks)) {
            let mut patch = lset.clone();
            let mut next = 0u32;
            while patch.len() < k {
                if !lset.contains(&next) {
                    patch.push(next);
                }
                next += 1;
            }
            patch.sort_unstable();
            chosen.push(patch);
        }
        if !next_combination(&mut lset, n) {
            break;
        }
    }
    let certified = certify_cover(n, l, &chosen);
    Ok(CoverResult { n, k, l, k_sets: chosen, method: CoverMethod::RandomPatch, certified })
}

/// The deterministic block family: split [N²] into N/m groups of size
/// N·m, each group into m² blocks of size N/m; members are the unions
/// of exactly m blocks within one group. Every N-set meets some member
/// in at least m elements (pigeonhole). `|family| = (N/m)·C(m²,m)`.
pub fn adversarial_family(n: u32, m_blocks: u32, budget: u64) -> Result<SetFamily> {
    if m_blocks == 0 || n == 0 || n % m_blocks != 0 {
        return Err(Error::Divisibility {
            what: "adversarial family needs m | N",
            m: m_blocks as u64,
            n: n as u64,
        });
    }
    let n = n as usize;
    let m = m_blocks as usize;
    let groups = n / m;
    let block_size = n / m;
    let per_group = binomial_u128((m * m) as u64, m as u64);
    let total = per_group.saturating_mul(groups as u128);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { required: total, budget: budget as u128 });
    }
    let mut members = Vec::with_capacity(total as usize);
    for g in 0..groups {
        let base = g * n * m;
        let mut blocks: Vec<u32> = (0..m as u32).collect();
        loop {
            let mut member = Vec::with_capacity(n);
            for &bj in &blocks {
                let start = base + bj as usize * block_size;
                member.extend((start..start + block_size).map(|e| e as u32));
            }
            members.push(member);
            if !next_combination(&mut blocks, m * m) {
                break;
            }
        }
    }
    SetFamily::new(n * n, n, members)
}

/// The canonical ∼N² tube family: the two-pencil 1/N-net. Slopes k/N
/// for |k| ≤ N against both axes, offsets at half-integer multiples of
/// 1/N (so lines sit mid-row rather than on grid boundaries), one tube
/// per line that meets the unit square, deduplicated.
pub fn tube_family(n: u32) -> Result<SetFamily> {
    let ni = n as i64;
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut cells: Vec<u32> = Vec::new();
    for steep in [false, true] {
        for k in -ni..=ni {
            if steep && k.abs() == ni {
                continue; // the diagonal pencil boundary; covered flat
            }
            // generous offset range; empty tubes are skipped
            let j_lo = k.min(0) - ni - 1;
            let j_hi = k.max(0) + 1;
            for j in j_lo..=j_hi {
                cells.clear();
                pencil_tube(n, k, j, steep, &mut cells);
                if cells.is_empty() {
                    continue;
                }
                cells.sort_unstable();
                members.push(cells.clone());
            }
        }
    }
    members.sort_unstable();
    members.dedup();
    SetFamily::new((n as usize) * (n as usize), n as usize, members)
}

/// Cells of the tube at slope k/N, offset (2j+1)/(2N), in the flat or
/// steep pencil. Lattice form: 2N·Y = 2k·X - N(2j+1) (roles swapped
/// when steep).
fn pencil_tube(n: u32, k: i64, j: i64, steep: bool, out: &mut Vec<u32>) {
    let ni = n as i64;
    let b = 2 * ni;
    for t in 0..ni {
        let v0 = 2 * k * t - ni * (2 * j + 1);
        let v1 = v0 + 2 * k;
        let (lo, hi) = if v0 <= v1 { (v0, v1) } else { (v1, v0) };
        // rows r with r ≤ hi/b and r+1 ≥ lo/b
        let rlo = (-(-lo).div_euclid(b) - 1).max(0);
        let rhi = hi.div_euclid(b).min(ni - 1);
        for r in rlo..=rhi {
            let (col, row) = if steep { (r, t) } else { (t, r) };
            out.push(cell_id(col as u32, row as u32, n));
        }
    }
}

/// Every essentially distinct tube at resolution n, generated from the
/// critical lines of the full grid. Exhaustive but only feasible at
/// tiny n; this is the oracle family for the minimax brute force.
pub fn tube_family_exact(n: u32) -> Result<SetFamily> {
    let full = GridSet::new(n, (0..n).flat_map(|c| (0..n).map(move |r| (c, r))))?;
    let lines = critical_lines(&full)?;
    let mut members: Vec<Vec<u32>> = lines
        .iter()
        .map(|line| {
            let mut ids: Vec<u32> = tube_squares(line, n).ids().collect();
            ids.sort_unstable();
            ids
        })
        .filter(|ids| !ids.is_empty())
        .collect();
    members.sort_unstable();
    members.dedup();
    SetFamily::new((n as usize) * (n as usize), n as usize, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn max_intersection_self_and_disjoint() {
        let family = SetFamily::new(16, 4, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]).unwrap();
        let (c, w) = family_max_intersection(&family, &[0, 1, 2, 3]).unwrap();
        assert_eq!((c, w), (4, Some(0)));
        let (c, _) = family_max_intersection(&family, &[8, 9, 10, 11]).unwrap();
        assert_eq!(c, 0);
        assert!(family_max_intersection(&family, &[0, 1]).is_err());
    }

    #[test]
    fn max_intersection_matches_naive_recount() {
        let family = SetFamily::random(50, 256, 16, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let mut sel: Vec<u32> = sample_distinct(&mut rng, 256, 16)
                .into_iter()
                .map(|v| v as u32)
                .collect();
            sel.sort_unstable();
            let (fast, _) = family_max_intersection(&family, &sel).unwrap();
            let naive = family
                .members()
                .iter()
                .map(|mem| mem.iter().filter(|e| sel.contains(e)).count())
                .max()
                .unwrap();
            assert_eq!(fast, naive);
        }
    }

    #[test]
    fn greedy_on_empty_family() {
        let family = SetFamily::new(64, 8, vec![]).unwrap();
        let sel = greedy_low_intersection_select(&family).unwrap();
        assert_eq!(sel.selected.len(), 8);
        assert_eq!(sel.stage_sets.len(), 1);
        let (c, _) = family_max_intersection(&family, &sel.selected).unwrap();
        assert_eq!(c, 0);
    }

    #[test]
    fn greedy_on_disjoint_tiling() {
        // N disjoint N-sets tiling [N²]: K = 1, bound 8
        let n = 16usize;
        let members: Vec<Vec<u32>> = (0..n)
            .map(|i| ((i * n) as u32..(i * n + n) as u32).collect())
            .collect();
        let family = SetFamily::new(n * n, n, members).unwrap();
        let sel = greedy_low_intersection_select(&family).unwrap();
        assert_eq!(sel.k_cap, 1);
        let mut sorted = sel.selected.clone();
        sorted.sort_unstable();
        let (c, _) = family_max_intersection(&family, &sorted).unwrap();
        assert!(c <= 8, "intersection {c} exceeds the proof bound");
        // the key claim: each stage meets each member at most once
        for stage in &sel.stage_sets {
            for member in family.members() {
                let hits = stage.iter().filter(|e| member.contains(e)).count();
                assert!(hits <= 1);
            }
        }
    }

    #[test]
    fn greedy_random_families_respect_8k() {
        for seed in 0..10u64 {
            let n = 32usize;
            let family = SetFamily::random(2 * n, n * n, n, seed).unwrap();
            let sel = greedy_low_intersection_select(&family).unwrap();
            assert_eq!(sel.k_cap, 2);
            let mut sorted = sel.selected.clone();
            sorted.sort_unstable();
            let (c, _) = family_max_intersection(&family, &sorted).unwrap();
            assert!(c <= 16, "seed {seed}: {c} > 8K");
            for stage in &sel.stage_sets {
                for member in family.members() {
                    assert!(stage.iter().filter(|e| member.contains(e)).count() <= 1);
                }
            }
        }
    }

    #[test]
    fn greedy_guard_on_oversized_family() {
        let family = SetFamily::random(100, 16, 3, 0).unwrap();
        assert!(matches!(
            greedy_low_intersection_select(&family),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn random_select_small_family_passes() {
        let family = SetFamily::random(1, 10_000, 100, 5).unwrap();
        let mut passes = 0;
        for seed in 0..200 {
            let r = random_select_verify(&family, 2.0, seed).unwrap();
            assert!((r.threshold - 2.0 * (100f64).ln() / (100f64).ln().ln()).abs() < 1e-12);
            if r.pass {
                passes += 1;
            }
        }
        assert!(passes >= 195, "only {passes}/200 passed");
    }

    #[test]
    fn random_select_empty_family() {
        let family = SetFamily::new(100, 10, vec![]).unwrap();
        let r = random_select_verify(&family, 2.0, 1).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_intersection, 0);
    }

    #[test]
    fn random_select_guards() {
        let family = SetFamily::new(4, 2, vec![]).unwrap();
        assert!(random_select_verify(&family, 2.0, 0).is_err()); // N < 3
        let family = SetFamily::random(1000, 81, 9, 0).unwrap();
        // s = ln(1000)/ln(9) - 1 ≈ 2.14; beta = 2 too small
        assert!(matches!(
            random_select_verify(&family, 2.0, 0),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn hypergeometric_tiny_case_enumeration() {
        // N=2, ground [4]: overlap of a fixed 2-set with all six 2-sets
        let (p0, _) = hypergeometric_overlap_pmf(2, 0).unwrap();
        let (p1, _) = hypergeometric_overlap_pmf(2, 1).unwrap();
        let (p2, _) = hypergeometric_overlap_pmf(2, 2).unwrap();
        let sixth = BigRational::new(BigInt::from(1), BigInt::from(6));
        assert_eq!(p0, sixth);
        assert_eq!(p2, sixth);
        assert_eq!(p1, BigRational::new(BigInt::from(4), BigInt::from(6)));
        // independent oracle: enumerate the six 2-subsets of {0,1,2,3}
        let fixed = [0u32, 1];
        let mut counts = [0usize; 3];
        for a in 0..4u32 {
            for b in a + 1..4 {
                let overlap = [a, b].iter().filter(|e| fixed.contains(e)).count();
                counts[overlap] += 1;
            }
        }
        assert_eq!(counts, [1, 4, 1]);
    }

    #[test]
    fn hypergeometric_sums_to_one() {
        for n in [2u64, 3, 5, 8] {
            let mut total = BigRational::from_integer(BigInt::from(0));
            for k in 0..=n {
                total += hypergeometric_overlap_pmf(n, k).unwrap().0;
            }
            assert_eq!(total, BigRational::from_integer(BigInt::from(1)));
        }
    }

    #[test]
    fn hypergeometric_below_inverse_factorial() {
        let one = BigRational::from_integer(BigInt::from(1));
        for k in 1..=8u64 {
            let (_, scaled) = hypergeometric_overlap_pmf(100, k).unwrap();
            assert!(scaled < one, "k!·pmf must stay below 1 at k={k}");
        }
    }

    #[test]
    fn greedy_cover_trivial_and_lower_bound() {
        let c = greedy_cover(4, 4, 2, 1 << 20).unwrap();
        assert_eq!(c.k_sets.len(), 1);
        assert!(c.certified);
        let c = greedy_cover(6, 3, 2, 1 << 20).unwrap();
        assert!(c.certified);
        assert!(c.k_sets.len() >= 5); // C(6,2)/C(3,2) = 5
    }

    #[test]
    fn exhaustive_minimum_cover_632() {
        // oracle: no 5 triples cover all 15 pairs of [6]; 6 do
        let triples: Vec<Vec<u32>> = {
            let mut v = Vec::new();
            let mut t: Vec<u32> = vec![0, 1, 2];
            loop {
                v.push(t.clone());
                if !next_combination(&mut t, 6) {
                    break;
                }
            }
            v
        };
        assert_eq!(triples.len(), 20);
        let mut best = usize::MAX;
        for size in 5..=6 {
            let mut pick: Vec<u32> = (0..size as u32).collect();
            loop {
                let chosen: Vec<Vec<u32>> =
                    pick.iter().map(|&i| triples[i as usize].clone()).collect();
                if certify_cover(6, 2, &chosen) {
                    best = best.min(size);
                    break;
                }
                if !next_combination(&mut pick, 20) {
                    break;
                }
            }
            if best != usize::MAX {
                break;
            }
        }
        assert_eq!(best, 6);
        // greedy is deterministic but not optimal here; it stays within
        // the (C(6,2)/C(3,2))·(1+ln C(3,2)) ≈ 10.5 guarantee
        let greedy = greedy_cover(6, 3, 2, 1 << 20).unwrap();
        assert!(greedy.certified);
        assert!(greedy.k_sets.len() >= best && greedy.k_sets.len() <= 10);
        assert_eq!(greedy.k_sets.len(), 7); // pinned regression
    }

    #[test]
    fn random_patch_certifies() {
        for seed in 0..20u64 {
            let c = random_patch_cover(8, 4, 2, seed, 1 << 20).unwrap();
            assert!(c.certified, "seed {seed}");
        }
    }

    #[test]
    fn adversarial_family_counts_and_pigeonhole() {
        let fam = adversarial_family(4, 1, 1 << 20).unwrap();
        assert_eq!(fam.len(), 4);
        // m=1: members are the four blocks of size 4 tiling [16]
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut sel: Vec<u32> = sample_distinct(&mut rng, 16, 4)
                .into_iter()
                .map(|v| v as u32)
                .collect();
            sel.sort_unstable();
            let (c, _) = family_max_intersection(&fam, &sel).unwrap();
            assert!(c >= 1);
        }
        let fam = adversarial_family(27, 3, 1 << 20).unwrap();
        assert_eq!(fam.len(), 9 * 84); // (N/m)·C(m²,m) = 9·C(9,3)
        assert!(fam.members().iter().all(|mem| mem.len() == 27));
    }

    #[test]
    fn adversarial_rejects_bad_divisibility() {
        assert!(adversarial_family(27, 4, 1 << 20).is_err());
    }

    #[test]
    fn family_file_roundtrip() {
        let fam = SetFamily::new(9, 3, vec![vec![0, 4, 8], vec![1, 2, 3]]).unwrap();
        let mut buf = Vec::new();
        fam.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "M 9 N 3\n0 4 8\n1 2 3\n");
        let back = SetFamily::read_from(text.as_bytes()).unwrap();
        assert_eq!(back, fam);
        assert!(SetFamily::read_from("M 9 N 3\n0 0 1\n".as_bytes()).is_err());
        assert!(SetFamily::read_from("M 9 N 3\n0 4 9\n".as_bytes()).is_err());
    }

    #[test]
    fn tube_family_members_look_like_tubes() {
        let fam = tube_family(8).unwrap();
        assert_eq!(fam.m(), 64);
        // ~6N² members, every tube within the 2N+2 size bound
        assert!(fam.len() > 64 && fam.len() < 8 * 64, "got {}", fam.len());
        assert!(fam.members().iter().all(|t| t.len() <= 18));
        // the mid-row horizontal tube is present: k=0 j=0 gives row 0
        let row0: Vec<u32> = (0..8u32).map(|c| cell_id(c, 0, 8)).collect();
        assert!(fam.members().iter().any(|t| *t == row0));
    }

    #[test]
    fn tube_family_exact_small() {
        let fam = tube_family_exact(2).unwrap();
        assert_eq!(fam.m(), 4);
        // the four 1-square tubes cannot occur; every member is a real tube
        assert!(fam.members().iter().all(|t| !t.is_empty()));
        // row/column/diagonal tubes must appear
        let row0: Vec<u32> = vec![0, 1];
        assert!(fam.members().iter().any(|t| *t == row0));
    }

    #[test]
    fn pmf_to_f64_sanity() {
        let (pmf, _) = hypergeometric_overlap_pmf(10, 1).unwrap();
        let v = pmf.to_f64().unwrap();
        assert!(v > 0.3 && v < 0.5, "pmf(1) at N=10 ≈ 0.39, got {v}");
    }
}
