//! Exact geometry of the N×N grid: squares, lines, the incidence
//! predicate, tubes, and the finite certificate family of candidate
//! extremal lines.
//!
//! One convention runs through the whole module: the unit square is
//! scaled by N so that every square corner is an integer lattice point
//! in `[0,N]²`, and a line is an integer equation `a·X + b·Y = c` on
//! that lattice. Every incidence decision is an exact integer sign
//! test; no floating point enters any predicate. Boundary contact
//! counts: squares and lines are closed sets.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Write};

use num_rational::Rational64;

use crate::error::{Error, Result};

/// Bound on |numerator| and |denominator| of stored line coefficients.
/// Keeps corner sign tests inside i128 for every resolution we accept.
const COEFF_LIMIT: i64 = 1 << 56;

/// Largest accepted grid resolution (2^16 squares per side).
pub const MAX_RESOLUTION: u32 = 1 << 16;

/// One square of the N×N subdivision of `[0,1]²`. It occupies
/// `[col/N,(col+1)/N] × [row/N,(row+1)/N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridSquare {
    pub col: u32,
    pub row: u32,
    pub n: u32,
}

impl GridSquare {
    pub fn new(col: u32, row: u32, n: u32) -> Result<Self> {
        if n == 0 || n > MAX_RESOLUTION || col >= n || row >= n {
            return Err(Error::SquareOutOfRange { col, row, n });
        }
        Ok(Self { col, row, n })
    }

    /// Center of the square in unit coordinates.
    pub fn center(&self) -> (f64, f64) {
        let n = self.n as f64;
        (
            (self.col as f64 + 0.5) / n,
            (self.row as f64 + 0.5) / n,
        )
    }
}

/// Center of a square: `((col+0.5)/N, (row+0.5)/N)`.
pub fn square_center(sq: &GridSquare) -> (f64, f64) {
    sq.center()
}

/// Row-major ground-set index of a cell, for bridging grids to
/// abstract set families over `[N²]`.
pub fn cell_id(col: u32, row: u32, n: u32) -> u32 {
    row * n + col
}

/// Inverse of [`cell_id`].
pub fn id_cell(id: u32, n: u32) -> (u32, u32) {
    (id % n, id / n)
}

/// One of the eight symmetries of the grid (the dihedral group of the
/// square): an optional transpose followed by optional axis flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetry {
    pub transpose: bool,
    pub flip_x: bool,
    pub flip_y: bool,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = {
        let mut all = [Symmetry { transpose: false, flip_x: false, flip_y: false }; 8];
        let mut i = 0;
        while i < 8 {
            all[i] = Symmetry {
                transpose: i & 1 != 0,
                flip_x: i & 2 != 0,
                flip_y: i & 4 != 0,
            };
            i += 1;
        }
        all
    };

    pub fn apply(&self, col: u32, row: u32, n: u32) -> (u32, u32) {
        let (mut c, mut r) = if self.transpose { (row, col) } else { (col, row) };
        if self.flip_x {
            c = n - 1 - c;
        }
        if self.flip_y {
            r = n - 1 - r;
        }
        (c, r)
    }

    /// Image of a line under the same symmetry of `[0,1]²`.
    pub fn apply_line(&self, line: &Line) -> Line {
        let one = Rational64::from_integer(1);
        let mut cur = *line;
        if self.transpose {
            cur = match cur {
                Line::Slope { alpha, beta } => {
                    if alpha == Rational64::from_integer(0) {
                        // horizontal y = -beta becomes vertical x = -beta
                        Line::Vertical { x0: -beta }
                    } else {
                        Line::Slope { alpha: one / alpha, beta: -beta / alpha }
                    }
                }
                Line::Vertical { x0 } => Line::Slope { alpha: Rational64::from_integer(0), beta: -x0 },
            };
        }
        if self.flip_x {
            cur = match cur {
                Line::Slope { alpha, beta } => Line::Slope { alpha: -alpha, beta: beta - alpha },
                Line::Vertical { x0 } => Line::Vertical { x0: one - x0 },
            };
        }
        if self.flip_y {
            cur = match cur {
                Line::Slope { alpha, beta } => Line::Slope { alpha: -alpha, beta: -(beta + one) },
                Line::Vertical { x0 } => Line::Vertical { x0 },
            };
        }
        cur
    }
}

/// A finite selection of squares, all at the same resolution. The
/// candidate S′ of the occupancy problem when it has exactly N squares,
/// but any cardinality is allowed for composition intermediates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSet {
    n: u32,
    cells: BTreeSet<(u32, u32)>,
}

impl GridSet {
    /// Build a set from `(col,row)` pairs, rejecting out-of-range
    /// indices and duplicates.
    pub fn new(n: u32, cells: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if n == 0 || n > MAX_RESOLUTION {
            return Err(Error::SquareOutOfRange { col: 0, row: 0, n });
        }
        let mut set = BTreeSet::new();
        for (col, row) in cells {
            if col >= n || row >= n {
                return Err(Error::SquareOutOfRange { col, row, n });
            }
            if !set.insert((col, row)) {
                return Err(Error::DuplicateSquare { col, row });
            }
        }
        Ok(Self { n, cells: set })
    }

    pub fn from_ids(n: u32, ids: impl IntoIterator<Item = u32>) -> Result<Self> {
        Self::new(n, ids.into_iter().map(|id| id_cell(id, n)))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, col: u32, row: u32) -> bool {
        self.cells.contains(&(col, row))
    }

    /// Cells in lexicographic `(col,row)` order.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.cells.iter().copied()
    }

    pub fn squares(&self) -> impl Iterator<Item = GridSquare> + '_ {
        let n = self.n;
        self.cells.iter().map(move |&(col, row)| GridSquare { col, row, n })
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        let n = self.n;
        self.cells.iter().map(move |&(col, row)| cell_id(col, row, n))
    }

    /// Rows per column, each sorted ascending. Used by the per-column
    /// counting paths.
    pub fn columns(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![Vec::new(); self.n as usize];
        for &(col, row) in &self.cells {
            cols[col as usize].push(row);
        }
        cols
    }

    pub fn transform(&self, sym: Symmetry) -> GridSet {
        let n = self.n;
        let cells = self
            .cells
            .iter()
            .map(|&(c, r)| sym.apply(c, r, n))
            .collect();
        GridSet { n, cells }
    }

    /// Canonical text form: header `N <resolution>`, then one
    /// `col row` pair per line in lexicographic order.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N {}", self.n)?;
        for &(col, row) in &self.cells {
            writeln!(w, "{} {}", col, row)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
        let header = header?;
        let mut it = header.split_whitespace();
        let n = match (it.next(), it.next(), it.next()) {
            (Some("N"), Some(v), None) => v.parse::<u32>().map_err(|e| Error::Parse {
                line: 1,
                msg: format!("bad resolution: {e}"),
            })?,
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected `N <resolution>`, got `{header}`"),
                })
            }
        };
        let mut cells = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<u32> {
                s.ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    msg: "expected `col row`".into(),
                })?
                .parse::<u32>()
                .map_err(|e| Error::Parse { line: idx + 1, msg: e.to_string() })
            };
            let col = parse(it.next())?;
            let row = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: "trailing tokens".into(),
                });
            }
            cells.push((col, row));
        }
        GridSet::new(n, cells)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }

    /// FNV-1a hash of the canonical text form; used to key diagnostic
    /// records to their input set.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in self.to_text().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

/// A line in the plane, stored exactly. Non-vertical lines are
/// `y = alpha·x - beta`; vertical lines are `x = x0` with `x0 ∈ [0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Slope { alpha: Rational64, beta: Rational64 },
    Vertical { x0: Rational64 },
}

fn check_coeff(r: Rational64) -> Result<Rational64> {
    if r.numer().abs() > COEFF_LIMIT || r.denom().abs() > COEFF_LIMIT {
        return Err(Error::CoefficientRange);
    }
    Ok(r)
}

/// Exact comparison of two rationals via i128 cross multiplication.
/// num-rational keeps denominators positive, so the sign is direct.
fn rat_cmp(a: Rational64, b: Rational64) -> Ordering {
    let lhs = *a.numer() as i128 * *b.denom() as i128;
    let rhs = *b.numer() as i128 * *a.denom() as i128;
    lhs.cmp(&rhs)
}

impl Line {
    pub fn slope(alpha: Rational64, beta: Rational64) -> Result<Line> {
        Ok(Line::Slope { alpha: check_coeff(alpha)?, beta: check_coeff(beta)? })
    }

    pub fn vertical(x0: Rational64) -> Result<Line> {
        let x0 = check_coeff(x0)?;
        if x0 < Rational64::from_integer(0) || x0 > Rational64::from_integer(1) {
            return Err(Error::AbscissaRange { x0: x0.to_string() });
        }
        Ok(Line::Vertical { x0 })
    }

    pub fn horizontal(y: Rational64) -> Result<Line> {
        Line::slope(Rational64::from_integer(0), -y)
    }

    /// Snap floating coefficients to the dyadic grid with denominator
    /// 2^30. Every snapped line is still an exact line.
    pub fn slope_from_f64(alpha: f64, beta: f64) -> Result<Line> {
        Ok(Line::Slope { alpha: snap_f64(alpha)?, beta: snap_f64(beta)? })
    }

    /// `alpha` and `beta` as floats for reporting; verticals return
    /// `(x0, 0)`.
    pub fn params_f64(&self) -> (f64, f64) {
        match self {
            Line::Slope { alpha, beta } => (rat_f64(*alpha), rat_f64(*beta)),
            Line::Vertical { x0 } => (rat_f64(*x0), 0.0),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Line::Slope { .. } => "slope",
            Line::Vertical { .. } => "vertical",
        }
    }

    /// Canonical witness order: slope lines first, ordered by exact
    /// `(alpha, beta)`; verticals last, ordered by `x0`.
    pub fn canonical_cmp(&self, other: &Line) -> Ordering {
        match (self, other) {
            (Line::Slope { alpha: a1, beta: b1 }, Line::Slope { alpha: a2, beta: b2 }) => {
                rat_cmp(*a1, *a2).then_with(|| rat_cmp(*b1, *b2))
            }
            (Line::Slope { .. }, Line::Vertical { .. }) => Ordering::Less,
            (Line::Vertical { .. }, Line::Slope { .. }) => Ordering::Greater,
            (Line::Vertical { x0: x1 }, Line::Vertical { x0: x2 }) => rat_cmp(*x1, *x2),
        }
    }

    pub(crate) fn lattice(&self, n: u32) -> LatticeLine {
        let n = n as i128;
        match self {
            Line::Slope { alpha, beta } => {
                let (p, q) = (*alpha.numer() as i128, *alpha.denom() as i128);
                let (r, s) = (*beta.numer() as i128, *beta.denom() as i128);
                // y = (p/q)x - r/s  on the lattice:  ps·X - qs·Y = qr·N
                LatticeLine::new(p * s, -q * s, q * r * n)
            }
            Line::Vertical { x0 } => {
                let (p, q) = (*x0.numer() as i128, *x0.denom() as i128);
                // x = p/q  on the lattice:  q·X = p·N
                LatticeLine::new(q, 0, p * n)
            }
        }
    }
}

fn rat_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn snap_f64(v: f64) -> Result<Rational64> {
    if !v.is_finite() || v.abs() > (1u64 << 26) as f64 {
        return Err(Error::CoefficientRange);
    }
    const DEN: i64 = 1 << 30;
    Ok(Rational64::new((v * DEN as f64).round() as i64, DEN))
}

fn gcd128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Integer line `a·X + b·Y = c` on the N-scaled lattice, reduced and
/// sign-normalized so equal lines compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct LatticeLine {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl LatticeLine {
    pub fn new(a: i128, b: i128, c: i128) -> LatticeLine {
        debug_assert!(a != 0 || b != 0, "degenerate line");
        let g = gcd128(gcd128(a, b), c);
        let (mut a, mut b, mut c) = (a / g, b / g, c / g);
        if a < 0 || (a == 0 && b < 0) {
            a = -a;
            b = -b;
            c = -c;
        }
        LatticeLine { a, b, c }
    }

    /// Line through two distinct lattice points.
    pub fn through(p: (i64, i64), q: (i64, i64)) -> Option<LatticeLine> {
        if p == q {
            return None;
        }
        let dx = q.0 as i128 - p.0 as i128;
        let dy = q.1 as i128 - p.1 as i128;
        // normal (dy, -dx), through p
        Some(LatticeLine::new(dy, -dx, dy * p.0 as i128 - dx * p.1 as i128))
    }

    pub fn to_line(&self, n: u32) -> Line {
        let n = n as i128;
        if self.b == 0 {
            // a·X = c, a > 0 after normalization; x0 = c/(a·N)
            Line::Vertical { x0: reduce_to_rat(self.c, self.a * n) }
        } else {
            // y = (-a/b)x + c/(bN)
            Line::Slope {
                alpha: reduce_to_rat(-self.a, self.b),
                beta: reduce_to_rat(-self.c, self.b * n),
            }
        }
    }
}

fn reduce_to_rat(num: i128, den: i128) -> Rational64 {
    debug_assert!(den != 0);
    let g = gcd128(num, den);
    let (mut num, mut den) = (num / g, den / g);
    if den < 0 {
        num = -num;
        den = -den;
    }
    let num = i64::try_from(num).expect("reduced numerator fits i64");
    let den = i64::try_from(den).expect("reduced denominator fits i64");
    Rational64::new_raw(num, den)
}

/// Exact per-cell incidence tester for one line at one resolution.
/// Falls back to i128 only when the coefficients demand it.
pub(crate) enum CellTester {
    Small { a: i64, b: i64, c: i64 },
    Big { a: i128, b: i128, c: i128 },
}

impl CellTester {
    pub fn new(line: &Line, n: u32) -> CellTester {
        let ll = line.lattice(n);
        let bound = (i64::MAX as i128) / 8;
        let reach = |v: i128| v.saturating_abs().saturating_mul(n as i128 + 1);
        if reach(ll.a) < bound && reach(ll.b) < bound && ll.c.abs() < bound {
            CellTester::Small { a: ll.a as i64, b: ll.b as i64, c: ll.c as i64 }
        } else {
            CellTester::Big { a: ll.a, b: ll.b, c: ll.c }
        }
    }

    /// Closed line meets the closed cell `[col,col+1]×[row,row+1]` iff
    /// the four corner values do not all lie strictly on one side.
    #[inline]
    pub fn intersects(&self, col: u32, row: u32) -> bool {
        match *self {
            CellTester::Small { a, b, c } => {
                let f00 = a * col as i64 + b * row as i64 - c;
                let f10 = f00 + a;
                let f01 = f00 + b;
                let f11 = f10 + b;
                let mn = f00.min(f10).min(f01).min(f11);
                let mx = f00.max(f10).max(f01).max(f11);
                mn <= 0 && 0 <= mx
            }
            CellTester::Big { a, b, c } => {
                let f00 = a * col as i128 + b * row as i128 - c;
                let f10 = f00 + a;
                let f01 = f00 + b;
                let f11 = f10 + b;
                let mn = f00.min(f10).min(f01).min(f11);
                let mx = f00.max(f10).max(f01).max(f11);
                mn <= 0 && 0 <= mx
            }
        }
    }

    pub fn count_cells(&self, cells: &[(u32, u32)]) -> usize {
        cells.iter().filter(|&&(c, r)| self.intersects(c, r)).count()
    }
}

/// Exact incidence predicate: does the closed line, restricted to
/// `[0,1]²`, meet the closed square? Boundary contact counts.
pub fn line_intersects_square(line: &Line, sq: &GridSquare) -> bool {
    CellTester::new(line, sq.n).intersects(sq.col, sq.row)
}

fn floor_div(x: i128, y: i128) -> i128 {
    debug_assert!(y > 0);
    x.div_euclid(y)
}

fn ceil_div(x: i128, y: i128) -> i128 {
    debug_assert!(y > 0);
    -(-x).div_euclid(y)
}

/// The tube generated by a line: every square at resolution `n` that
/// the line meets inside the unit square.
pub fn tube_squares(line: &Line, n: u32) -> GridSet {
    let ll = line.lattice(n);
    let (a, b, c) = if ll.b < 0 {
        (-ll.a, -ll.b, -ll.c)
    } else {
        (ll.a, ll.b, ll.c)
    };
    let mut cells = Vec::new();
    let nn = n as i128;
    if b == 0 {
        // vertical: a·X = c with a > 0; columns with col ≤ c/a ≤ col+1
        let lo = (ceil_div(c, a) - 1).max(0);
        let hi = floor_div(c, a).min(nn - 1);
        for col in lo..=hi {
            for row in 0..n {
                cells.push((col as u32, row));
            }
        }
    } else {
        for col in 0..nn {
            // y over the strip [col, col+1] spans [ylo, yhi] = nums/b
            let y0 = c - a * col;
            let y1 = y0 - a;
            let (lo_num, hi_num) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            let rlo = (ceil_div(lo_num, b) - 1).max(0);
            let rhi = floor_div(hi_num, b).min(nn - 1);
            for row in rlo..=rhi {
                cells.push((col as u32, row as u32));
            }
        }
    }
    GridSet::new(n, cells).expect("tube cells are in range and distinct")
}

/// Count `|tube(line) ∩ S|` given the set's per-column sorted rows,
/// in O(columns · log rows-per-column). Exact integer arithmetic.
pub(crate) fn tube_count_columns(line: &Line, n: u32, columns: &[Vec<u32>]) -> usize {
    let ll = line.lattice(n);
    let (a, b, c) = if ll.b < 0 {
        (-ll.a, -ll.b, -ll.c)
    } else {
        (ll.a, ll.b, ll.c)
    };
    let nn = n as i128;
    let mut count = 0usize;
    if b == 0 {
        let lo = (ceil_div(c, a) - 1).max(0);
        let hi = floor_div(c, a).min(nn - 1);
        let mut col = lo;
        while col <= hi {
            count += columns[col as usize].len();
            col += 1;
        }
    } else {
        for (col, rows) in columns.iter().enumerate() {
            if rows.is_empty() {
                continue;
            }
            let y0 = c - a * col as i128;
            let y1 = y0 - a;
            let (lo_num, hi_num) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            let rlo = ceil_div(lo_num, b) - 1;
            let rhi = floor_div(hi_num, b);
            if rhi < 0 || rlo >= nn || rhi < rlo {
                continue;
            }
            let rlo = rlo.max(0) as u32;
            let rhi = rhi.min(nn - 1) as u32;
            let start = rows.partition_point(|&r| r < rlo);
            let end = rows.partition_point(|&r| r <= rhi);
            count += end - start;
        }
    }
    count
}

/// The finite certificate family for the occupancy maximum over a set:
/// every line through a pair of distinct corners of squares of `s`,
/// plus the horizontal and vertical lines through each square's
/// center. The maximum of `|tube ∩ s|` over all lines in the plane is
/// attained on this family: an extremal line can be translated until
/// it touches a corner of a met square and rotated about that corner
/// until it touches a second one (or becomes an included vertical),
/// without losing any incidence.
///
/// Returned deduplicated, ordered by the integer lattice key (a fixed,
/// deterministic order).
pub fn critical_lines(s: &GridSet) -> Result<Vec<Line>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = s.n();
    let mut corners: BTreeSet<(i64, i64)> = BTreeSet::new();
    for (col, row) in s.cells() {
        let (c, r) = (col as i64, row as i64);
        corners.insert((c, r));
        corners.insert((c + 1, r));
        corners.insert((c, r + 1));
        corners.insert((c + 1, r + 1));
    }
    let corners: Vec<(i64, i64)> = corners.into_iter().collect();
    let mut lines: HashSet<LatticeLine> = HashSet::new();
    for (i, &p) in corners.iter().enumerate() {
        for &q in &corners[i + 1..] {
            if let Some(ll) = LatticeLine::through(p, q) {
                lines.insert(ll);
            }
        }
    }
    for (col, row) in s.cells() {
        // center lines at half-integer offsets: 2Y = 2row+1, 2X = 2col+1
        lines.insert(LatticeLine::new(0, 2, 2 * row as i128 + 1));
        lines.insert(LatticeLine::new(2, 0, 2 * col as i128 + 1));
    }
    let mut lines: Vec<LatticeLine> = lines.into_iter().collect();
    lines.sort_unstable();
    Ok(lines.into_iter().map(|ll| ll.to_line(n)).collect())
}
