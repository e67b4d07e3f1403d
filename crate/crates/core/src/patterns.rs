//! Erasure patterns on grid-like topologies.
//!
//! A pattern is a set of erased cells `(row, col)`. Its *type* is the orbit of the pattern
//! under row and column permutations, represented by the lexicographically least 0/1 mask
//! of its support (row-major order, `0 < 1`).

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Cell = (usize, usize);

/// Default ceiling on the number of column multisets visited by [`enumerate_types`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;
/// Ceiling on the orbit candidates examined when canonicalizing or instantiating a type.
pub const ORBIT_CAP: u64 = 100_000_000;

/// `T(m×n; a, b, h)`: `a` parities per column, `b` per row, `h` global parities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Topology {
    pub m: usize,
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub h: usize,
}

impl Topology {
    /// Validates the shape. Topologies with global parities are rejected.
    pub fn new(m: usize, n: usize, a: usize, b: usize, h: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidTopology(format!("empty grid {m}x{n}")));
        }
        if a >= m {
            return Err(Error::InvalidTopology(format!("a = {a} must be below m = {m}")));
        }
        if b >= n {
            return Err(Error::InvalidTopology(format!("b = {b} must be below n = {n}")));
        }
        if h > 0 {
            return Err(Error::UnsupportedGlobalParities);
        }
        Ok(Topology { m, n, a, b, h })
    }

    /// `T(m×n; a, b, 0)`.
    pub fn grid(m: usize, n: usize, a: usize, b: usize) -> Result<Self> {
        Self::new(m, n, a, b, 0)
    }

    pub fn cells(&self) -> usize {
        self.m * self.n
    }

    /// Flat index of a cell, row-major.
    pub fn index(&self, (r, c): Cell) -> usize {
        r * self.n + c
    }

    pub fn check_pattern(&self, e: &ErasurePattern) -> Result<()> {
        match e.cells.iter().find(|&&(r, c)| r >= self.m || c >= self.n) {
            Some(&(r, c)) => Err(Error::InvalidPattern(format!(
                "cell ({r}, {c}) outside the {}x{} grid",
                self.m, self.n
            ))),
            None => Ok(()),
        }
    }
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            m: usize,
            n: usize,
            a: usize,
            b: usize,
            #[serde(default)]
            h: usize,
        }
        let r = Raw::deserialize(d)?;
        Topology::new(r.m, r.n, r.a, r.b, r.h).map_err(D::Error::custom)
    }
}

/// A set of erased cells. Serialized as a list of `[row, col]` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErasurePattern {
    cells: BTreeSet<Cell>,
}

impl Serialize for ErasurePattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.cells.iter().map(|&(r, c)| [r, c]))
    }
}

impl<'de> Deserialize<'de> for ErasurePattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<[usize; 2]> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|[r, c]| (r, c)).collect())
    }
}

impl FromIterator<Cell> for ErasurePattern {
    fn from_iter<I: IntoIterator<Item = Cell>>(iter: I) -> Self {
        ErasurePattern { cells: iter.into_iter().collect() }
    }
}

impl fmt::Display for ErasurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.rows();
        let cols = self.cols();
        for r in rows {
            let line: String =
                cols.iter().map(|&c| if self.contains((r, c)) { '*' } else { '.' }).collect();
            writeln!(f, "{r:>3} {line}")?;
        }
        Ok(())
    }
}

impl ErasurePattern {
    pub fn new<I: IntoIterator<Item = Cell>>(cells: I) -> Self {
        cells.into_iter().collect()
    }

    /// Builds a pattern from mask rows such as `"110100"`, `'1'` marking an erasure.
    pub fn from_strings<S: AsRef<str>>(rows: &[S]) -> Self {
        rows.iter()
            .enumerate()
            .flat_map(|(r, s)| {
                s.as_ref()
                    .chars()
                    .enumerate()
                    .filter(|&(_, ch)| ch == '1' || ch == '*')
                    .map(move |(c, _)| (r, c))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.contains(&cell)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }

    /// Rows touched by the pattern (`U_E`), ascending.
    pub fn rows(&self) -> Vec<usize> {
        self.cells.iter().map(|&(r, _)| r).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Columns touched by the pattern (`V_E`), ascending.
    pub fn cols(&self) -> Vec<usize> {
        self.cells.iter().map(|&(_, c)| c).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn row_count(&self, r: usize) -> usize {
        self.cells.iter().filter(|&&(i, _)| i == r).count()
    }

    pub fn col_count(&self, c: usize) -> usize {
        self.cells.iter().filter(|&&(_, j)| j == c).count()
    }

    /// Support columns as row-bitmasks over the compressed support rows.
    fn compressed_columns(&self) -> (usize, Vec<u64>) {
        let rows = self.rows();
        let cols = self.cols();
        assert!(rows.len() <= 64, "pattern spans more than 64 rows");
        let mut masks = vec![0u64; cols.len()];
        for &(r, c) in &self.cells {
            let i = rows.binary_search(&r).unwrap();
            let j = cols.binary_search(&c).unwrap();
            masks[j] |= 1 << i;
        }
        (rows.len(), masks)
    }
}

/// Regularity test selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegularityMode {
    /// Per row subset, checks only the column set that maximizes the excess.
    Fast,
    /// Enumerates every row subset and column subset of the support.
    Brute,
}

/// Every erased cell sees at least `a + 1` erasures in its column and `b + 1` in its row.
pub fn is_irreducible(t: &Topology, e: &ErasurePattern) -> bool {
    let mut row_counts = std::collections::HashMap::new();
    let mut col_counts = std::collections::HashMap::new();
    for (r, c) in e.cells() {
        *row_counts.entry(r).or_insert(0usize) += 1;
        *col_counts.entry(c).or_insert(0usize) += 1;
    }
    e.cells().all(|(r, c)| col_counts[&c] > t.a && row_counts[&r] > t.b)
}

/// `|E ∩ (U×V)| <= |V|·a + |U|·b − a·b` for every row set `U` and column set `V`.
///
/// Sub-grids with `|U| < a` and `|V| < b` are excluded: the right-hand side is then
/// negative even for the empty pattern. Every other sub-grid with `|U| < a` or `|V| < b`
/// satisfies the inequality trivially, so only support rows and columns need examining.
pub fn is_regular(t: &Topology, e: &ErasurePattern, mode: RegularityMode) -> bool {
    if e.is_empty() {
        return true;
    }
    let (u, cols) = e.compressed_columns();
    columns_regular(u, &cols, t.a, t.b, mode)
}

pub(crate) fn columns_regular(
    u: usize,
    cols: &[u64],
    a: usize,
    b: usize,
    mode: RegularityMode,
) -> bool {
    match mode {
        RegularityMode::Fast => regular_fast(u, cols, a, b),
        RegularityMode::Brute => regular_brute(u, cols, a, b),
    }
}

fn regular_fast(u: usize, cols: &[u64], a: usize, b: usize) -> bool {
    for rows in 0u64..(1u64 << u) {
        let size = rows.count_ones() as usize;
        if size < a {
            continue;
        }
        // Column j contributes count_j − a when positive; ties at count_j = a are left out.
        let excess: usize = cols
            .iter()
            .map(|&c| (c & rows).count_ones() as usize)
            .filter(|&k| k > a)
            .map(|k| k - a)
            .sum();
        if excess > b * (size - a) {
            return false;
        }
    }
    true
}

fn regular_brute(u: usize, cols: &[u64], a: usize, b: usize) -> bool {
    let v = cols.len();
    assert!(v < 40, "brute-force regularity over {v} columns is infeasible");
    for rows in 0u64..(1u64 << u) {
        let us = rows.count_ones() as i64;
        let counts: Vec<i64> = cols.iter().map(|&c| (c & rows).count_ones() as i64).collect();
        // Gray-code walk over column subsets keeps |V| and |E ∩ (U×V)| incrementally.
        let mut inside = 0i64;
        let mut vs = 0i64;
        let mut gray = 0u64;
        for step in 0u64..(1u64 << v) {
            if step > 0 {
                let bit = step.trailing_zeros() as usize;
                gray ^= 1 << bit;
                if gray >> bit & 1 == 1 {
                    inside += counts[bit];
                    vs += 1;
                } else {
                    inside -= counts[bit];
                    vs -= 1;
                }
            }
            if us < a as i64 && vs < b as i64 {
                continue;
            }
            if inside > vs * a as i64 + us * b as i64 - (a * b) as i64 {
                return false;
            }
        }
    }
    true
}

/// Canonical representative of a pattern type: a `u×v` 0/1 mask with no empty row or
/// column, lexicographically least over all row and column permutations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternType {
    pub u: usize,
    pub v: usize,
    /// Row bitmasks; column 0 is the most significant of the `v` bits.
    rows: Vec<u64>,
}

impl PatternType {
    /// Mask rows as strings of `'0'`/`'1'`.
    pub fn mask(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|&r| (0..self.v).map(|j| if r >> (self.v - 1 - j) & 1 == 1 { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.count_ones() as usize).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.v)
            .map(|j| self.rows.iter().filter(|&&r| r >> (self.v - 1 - j) & 1 == 1).count())
            .collect()
    }

    /// The canonical mask placed in the top-left corner of the grid.
    pub fn to_pattern(&self) -> ErasurePattern {
        ErasurePattern::from_strings(&self.mask())
    }

    /// Columns as bitmasks over the `u` rows, row 0 least significant.
    fn column_masks(&self) -> Vec<u64> {
        (0..self.v)
            .map(|j| {
                (0..self.u).fold(0u64, |acc, i| acc | ((self.rows[i] >> (self.v - 1 - j) & 1) << i))
            })
            .collect()
    }

    fn from_mask_strings(u: usize, v: usize, mask: &[String]) -> Result<Self> {
        if mask.len() != u || mask.iter().any(|s| s.len() != v) || v > 64 {
            return Err(Error::InvalidPattern("mask shape does not match u, v".into()));
        }
        let mut rows = Vec::with_capacity(u);
        for s in mask {
            let mut r = 0u64;
            for ch in s.chars() {
                r = r << 1
                    | match ch {
                        '0' => 0,
                        '1' => 1,
                        _ => return Err(Error::InvalidPattern(format!("bad mask char {ch:?}"))),
                    };
            }
            rows.push(r);
        }
        let t = PatternType { u, v, rows };
        if canonical_type(&t.to_pattern())? != t {
            return Err(Error::InvalidPattern("mask is not in canonical form".into()));
        }
        Ok(t)
    }
}

impl fmt::Display for PatternType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.mask() {
            writeln!(f, "{}", line.replace('1', "*").replace('0', "."))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PatternTypeJson {
    u: usize,
    v: usize,
    mask: Vec<String>,
}

impl Serialize for PatternType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PatternTypeJson { u: self.u, v: self.v, mask: self.mask() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PatternType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PatternTypeJson::deserialize(d)?;
        PatternType::from_mask_strings(j.u, j.v, &j.mask).map_err(D::Error::custom)
    }
}

fn factorial_capped(n: usize, cap: u64) -> Option<u64> {
    let mut acc = 1u64;
    for k in 2..=n as u64 {
        acc = acc.checked_mul(k).filter(|&x| x <= cap)?;
    }
    Some(acc)
}

/// Canonical mask from support columns: for each row order, sorting the columns as
/// top-to-bottom bit strings gives the row-major least arrangement; take the least over
/// all row orders.
fn canonical_from_columns(u: usize, cols: &[u64]) -> PatternType {
    let v = cols.len();
    let mut best: Option<Vec<u64>> = None;
    let mut keyed = vec![0u64; v];
    for perm in (0..u).permutations(u) {
        for (k, &c) in cols.iter().enumerate() {
            // new row i takes old row perm[i]; row 0 is the most significant key bit
            keyed[k] = (0..u).fold(0u64, |acc, i| acc << 1 | (c >> perm[i] & 1));
        }
        keyed.sort_unstable();
        let rows: Vec<u64> = (0..u)
            .map(|i| keyed.iter().fold(0u64, |acc, &k| acc << 1 | (k >> (u - 1 - i) & 1)))
            .collect();
        if best.as_ref().is_none_or(|b| rows < *b) {
            best = Some(rows);
        }
    }
    PatternType { u, v, rows: best.unwrap_or_default() }
}

/// Canonical type of a nonempty pattern.
pub fn canonical_type(e: &ErasurePattern) -> Result<PatternType> {
    if e.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let (u, cols) = e.compressed_columns();
    if cols.len() > 64 {
        return Err(Error::ResourceGuard("pattern support wider than 64 columns".into()));
    }
    if factorial_capped(u, ORBIT_CAP).is_none() {
        return Err(Error::ResourceGuard(format!("{u}! row orders exceed the orbit cap")));
    }
    Ok(canonical_from_columns(u, &cols))
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

/// All canonical types of regular irreducible patterns of `T(m×n; 1, b, 0)` for unbounded `n`.
///
/// Support shapes are restricted to `u + b <= v <= b·u − b`, the only shapes admitting a
/// regular irreducible pattern. Since types are closed under column permutation, masks are
/// generated as nondecreasing multisets of columns, each column holding at least two erasures.
pub fn enumerate_types(m: usize, b: usize) -> Result<BTreeSet<PatternType>> {
    enumerate_types_capped(m, b, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_types_capped(m: usize, b: usize, cap: u64) -> Result<BTreeSet<PatternType>> {
    if m == 0 || b == 0 {
        return Err(Error::InvalidParameter("enumeration needs m >= 1 and b >= 1".into()));
    }
    if m > 16 {
        return Err(Error::ResourceGuard(format!("m = {m} exceeds 16 rows")));
    }
    let a = 1;
    let mut shapes = Vec::new();
    let mut total = 0u64;
    for u in 1..=m {
        let lo = u + b;
        let hi = (b * u).saturating_sub(b);
        if lo > hi {
            continue;
        }
        let candidates: Vec<u64> =
            (0u64..(1u64 << u)).filter(|c| c.count_ones() as usize > a).collect();
        for v in lo..=hi {
            let count = binomial((candidates.len() + v - 1) as u64, v as u64);
            total = total.saturating_add(count);
            if total > cap {
                return Err(Error::ResourceGuard(format!(
                    "type enumeration for m = {m}, b = {b} visits more than {cap} masks"
                )));
            }
            shapes.push((u, v, candidates.clone()));
        }
    }

    let mut out = BTreeSet::new();
    for (u, v, candidates) in shapes {
        let max_weight = 2 * b * (u - 1);
        let mut chosen = Vec::with_capacity(v);
        let mut row_sums = vec![0usize; u];
        multisets(&candidates, 0, v, &mut chosen, &mut row_sums, 0, max_weight, &mut |cols, sums| {
            if sums.iter().all(|&s| s > b) && columns_regular(u, cols, a, b, RegularityMode::Fast)
            {
                out.insert(canonical_from_columns(u, cols));
            }
        });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn multisets(
    candidates: &[u64],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<u64>,
    row_sums: &mut [usize],
    weight: usize,
    max_weight: usize,
    visit: &mut dyn FnMut(&[u64], &[usize]),
) {
    if remaining == 0 {
        visit(chosen, row_sums);
        return;
    }
    // every later column adds at least two erasures
    if weight + 2 * remaining > max_weight {
        return;
    }
    for idx in start..candidates.len() {
        let c = candidates[idx];
        let w = c.count_ones() as usize;
        if weight + w + 2 * (remaining - 1) > max_weight {
            continue;
        }
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s += (c >> i & 1) as usize;
        }
        chosen.push(c);
        multisets(candidates, idx, remaining - 1, chosen, row_sums, weight + w, max_weight, visit);
        chosen.pop();
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s -= (c >> i & 1) as usize;
        }
    }
}

/// Rearranges `xs` into the next lexicographic permutation; false after the last one.
fn next_permutation(xs: &mut [u64]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Every distinct `u×v` arrangement of a type, as column bitmasks.
pub fn type_orbit(pt: &PatternType) -> Result<Vec<Vec<u64>>> {
    let rows_fact = factorial_capped(pt.u, ORBIT_CAP)
        .ok_or_else(|| Error::ResourceGuard("row permutations exceed the orbit cap".into()))?;
    let cols_fact = factorial_capped(pt.v, ORBIT_CAP).unwrap_or(u64::MAX);
    if rows_fact.saturating_mul(cols_fact) > ORBIT_CAP {
        return Err(Error::ResourceGuard(format!(
            "orbit of a {}x{} type exceeds {ORBIT_CAP} candidates",
            pt.u, pt.v
        )));
    }
    let base = pt.column_masks();
    let mut seen = HashSet::new();
    for perm in (0..pt.u).permutations(pt.u) {
        let mut cols: Vec<u64> = base
            .iter()
            .map(|&c| (0..pt.u).fold(0u64, |acc, i| acc | ((c >> perm[i] & 1) << i)))
            .collect();
        cols.sort_unstable();
        loop {
            seen.insert(cols.clone());
            if !next_permutation(&mut cols) {
                break;
            }
        }
    }
    let mut orbit: Vec<Vec<u64>> = seen.into_iter().collect();
    orbit.sort_unstable();
    Ok(orbit)
}

/// All embeddings of a type into an `m×n` grid, addressable by index.
///
/// An embedding picks `u` grid rows, `v` grid columns (both ascending) and one arrangement
/// from the type's orbit; distinct choices give distinct cell sets.
#[derive(Debug, Clone)]
pub struct Instantiations {
    row_sets: Vec<Vec<usize>>,
    col_sets: Vec<Vec<usize>>,
    orbit: Vec<Vec<u64>>,
}

/// Ceiling on the column subsets materialized by [`instantiate_type`].
pub const MAX_COLUMN_SUBSETS: u64 = 10_000_000;

pub fn instantiate_type(pt: &PatternType, m: usize, n: usize) -> Result<Instantiations> {
    if pt.u > m || pt.v > n {
        return Err(Error::InvalidParameter(format!(
            "a {}x{} type does not fit a {m}x{n} grid",
            pt.u, pt.v
        )));
    }
    if binomial(n as u64, pt.v as u64) > MAX_COLUMN_SUBSETS {
        return Err(Error::ResourceGuard(format!("C({n}, {}) column subsets", pt.v)));
    }
    Ok(Instantiations {
        row_sets: (0..m).combinations(pt.u).collect(),
        col_sets: (0..n).combinations(pt.v).collect(),
        orbit: type_orbit(pt)?,
    })
}

impl Instantiations {
    pub fn len(&self) -> usize {
        self.row_sets.len() * self.col_sets.len() * self.orbit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn orbit_size(&self) -> usize {
        self.orbit.len()
    }

    /// The `idx`-th embedding, arrangement varying fastest.
    pub fn get(&self, idx: usize) -> ErasurePattern {
        let o = idx % self.orbit.len();
        let rest = idx / self.orbit.len();
        let cs = rest % self.col_sets.len();
        let rs = rest / self.col_sets.len();
        let rows = &self.row_sets[rs];
        let cols = &self.col_sets[cs];
        let mut cells = BTreeSet::new();
        for (j, &mask) in self.orbit[o].iter().enumerate() {
            for (i, &r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    cells.insert((r, cols[j]));
                }
            }
        }
        ErasurePattern { cells }
    }

    pub fn iter(&self) -> impl Iterator<Item = ErasurePattern> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}
