//! MR certification, constructive search for MR row codes, and Sidon-style attacks that
//! produce uncorrectable regular patterns when the field is too small.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::TensorCode;
use crate::error::{Error, Result};
use crate::galois::{Field, FieldElement, FieldSpec};
use crate::gfmatrix::GfMatrix;
use crate::patterns::{enumerate_types, instantiate_type, Cell, ErasurePattern};

/// Default ceiling on pattern instances examined by [`certify_mr`].
pub const DEFAULT_INSTANCE_CAP: u64 = 10_000_000;

const CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    FailedMds,
    FailedPattern,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertReport {
    pub verdict: Verdict,
    pub counterexample: Option<ErasurePattern>,
    pub rank_found: Option<usize>,
    pub patterns_checked: u64,
}

impl CertReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

pub fn certify_mr(code: &TensorCode) -> Result<CertReport> {
    certify_mr_capped(code, DEFAULT_INSTANCE_CAP)
}

/// Checks that `h_row` is MDS and `h_col` has no zero entry, then that every embedding of
/// every regular irreducible type is correctable.
///
/// Instances are visited in a fixed order and the first failure in that order is reported,
/// so the result does not depend on the thread count. `ResourceGuard` is returned only if
/// `cap` instances pass without reaching the end.
pub fn certify_mr_capped(code: &TensorCode, cap: u64) -> Result<CertReport> {
    let t = code.topology();
    if t.a != 1 {
        return Err(Error::UnsupportedColumnParities(t.a));
    }
    let mds_row = code.h_row().every_w_columns_independent(t.b)?;
    let mds_col = (0..t.m).all(|i| code.h_col().get(0, i) != 0);
    if !(mds_row && mds_col) {
        return Ok(CertReport {
            verdict: Verdict::FailedMds,
            counterexample: None,
            rank_found: None,
            patterns_checked: 0,
        });
    }
    let mut checked = 0u64;
    for pt in enumerate_types(t.m, t.b)? {
        if pt.u > t.m || pt.v > t.n {
            continue;
        }
        let inst = instantiate_type(&pt, t.m, t.n)?;
        let total = inst.len();
        let mut start = 0usize;
        while start < total {
            if checked >= cap {
                return Err(Error::ResourceGuard(format!(
                    "more than {cap} pattern instances; raise the cap"
                )));
            }
            let end = total.min(start + CHUNK).min(start + (cap - checked) as usize);
            let hit = (start..end).into_par_iter().find_map_first(|idx| {
                let cells: Vec<Cell> = inst.get(idx).cells().collect();
                let rank = code.restricted_matrix(&cells).rank();
                (rank < cells.len()).then_some((idx, rank))
            });
            if let Some((idx, rank)) = hit {
                return Ok(CertReport {
                    verdict: Verdict::FailedPattern,
                    counterexample: Some(inst.get(idx)),
                    rank_found: Some(rank),
                    patterns_checked: checked + (idx - start) as u64 + 1,
                });
            }
            checked += (end - start) as u64;
            start = end;
        }
    }
    Ok(CertReport {
        verdict: Verdict::Certified,
        counterexample: None,
        rank_found: None,
        patterns_checked: checked,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyKind {
    /// `T(4×n; 1, 2, 0)`, twelve erasures per pattern.
    #[serde(rename = "T4_12")]
    T4_12,
    /// `T(3×n; 1, 3, 0)`, twelve erasures per pattern.
    #[serde(rename = "T3_13")]
    T3_13,
}

impl TopologyKind {
    pub fn shape(self) -> (usize, usize) {
        match self {
            TopologyKind::T4_12 => (4, 2),
            TopologyKind::T3_13 => (3, 3),
        }
    }
}

/// The polynomial whose zeros on distinct evaluation points make the hard pattern type
/// uncorrectable for row columns `(1, x)` (T4_12) or `(1, x, x²)` (T3_13).
pub fn f_value(field: &Field, kind: TopologyKind, x: &[u32; 6]) -> u32 {
    let d = |i: usize, j: usize| field.sub(x[i - 1], x[j - 1]);
    let p = |fs: &[u32]| field.product(fs.iter().copied());
    match kind {
        TopologyKind::T4_12 => field.sub(
            p(&[d(1, 4), d(2, 6), d(3, 5)]),
            p(&[d(2, 4), d(1, 5), d(3, 6)]),
        ),
        TopologyKind::T3_13 => {
            let m = |idx: &[usize]| p(&idx.iter().map(|&i| x[i - 1]).collect::<Vec<_>>());
            let plus = [
                m(&[1, 2, 3]),
                m(&[1, 2, 4]),
                m(&[1, 5, 6]),
                m(&[2, 5, 6]),
                m(&[3, 4, 5]),
                m(&[3, 4, 6]),
            ];
            let minus = [
                m(&[1, 2, 5]),
                m(&[1, 2, 6]),
                m(&[1, 3, 4]),
                m(&[2, 3, 4]),
                m(&[3, 5, 6]),
                m(&[4, 5, 6]),
            ];
            let cubic = field.sub(field.sum(plus), field.sum(minus));
            p(&[d(1, 2), d(3, 4), d(5, 6), cubic])
        }
    }
}

pub fn f_poly(kind: TopologyKind, args: &[FieldElement]) -> Result<FieldElement> {
    if args.len() != 6 {
        return Err(Error::Arity { op: "f_poly", expected: 6, got: args.len() });
    }
    let field = args[0].field.clone();
    if args.iter().any(|a| a.field != field) {
        return Err(Error::MixedFields);
    }
    let x: [u32; 6] = std::array::from_fn(|i| args[i].value);
    let value = f_value(&field, kind, &x);
    Ok(FieldElement { value, field })
}

/// Six exponents with `t₁+t₆ ≡ t₂+t₅ ≡ t₃+t₄ (mod modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidonWitness {
    pub exponents: [u64; 6],
    pub pairing: [[u64; 2]; 3],
    /// Positions of `t₁..t₆` in the input (row-code column indices for attacks).
    pub columns: [usize; 6],
    pub modulus: u64,
    pub sum: u64,
}

/// Three pairwise disjoint pairs with equal sums modulo `modulus`.
///
/// Pairs are visited lexicographically by input position and bucketed by sum; the first
/// bucket to collect three pairs wins. Two pairs in one bucket that share an element would
/// force the other elements to coincide, so bucket members are automatically disjoint.
/// Duplicate exponents (after reduction) are ignored beyond their first occurrence.
pub fn find_sum_collision(exponents: &[u64], modulus: u64) -> Option<SidonWitness> {
    if modulus == 0 {
        return None;
    }
    let mut first = Slots::new(modulus);
    let items: Vec<(usize, u64)> = exponents
        .iter()
        .enumerate()
        .map(|(i, &t)| (i, t % modulus))
        .filter(|&(i, t)| first.get_or_insert(t, i) == i)
        .collect();
    // per sum: how many pairs so far and the first two of them
    let mut bucket_of = Slots::new(modulus);
    let mut buckets: Vec<(u8, [(usize, usize); 2])> = Vec::new();
    for (x, y) in (0..items.len()).tuple_combinations() {
        let s = (items[x].1 + items[y].1) % modulus;
        let k = bucket_of.get_or_insert(s, buckets.len());
        if k == buckets.len() {
            buckets.push((0, [(0, 0); 2]));
        }
        let bucket = &mut buckets[k];
        if bucket.0 < 2 {
            bucket.1[bucket.0 as usize] = (x, y);
            bucket.0 += 1;
            continue;
        }
        let [p1, p2, p3] = [bucket.1[0], bucket.1[1], (x, y)];
        let order = [p1.0, p2.0, p3.0, p3.1, p2.1, p1.1];
        return Some(SidonWitness {
            exponents: order.map(|k| items[k].1),
            pairing: [p1, p2, p3].map(|(a, b)| [items[a].1, items[b].1]),
            columns: order.map(|k| items[k].0),
            modulus,
            sum: s,
        });
    }
    None
}

/// A map from residues to small indices: a flat table for small moduli, hashed otherwise.
enum Slots {
    Dense(Vec<usize>),
    Sparse(HashMap<u64, usize>),
}

impl Slots {
    fn new(modulus: u64) -> Self {
        if modulus <= 1 << 12 {
            Slots::Dense(vec![usize::MAX; modulus as usize])
        } else {
            Slots::Sparse(HashMap::new())
        }
    }

    fn get_or_insert(&mut self, key: u64, value: usize) -> usize {
        match self {
            Slots::Dense(v) => {
                let slot = &mut v[key as usize];
                if *slot == usize::MAX {
                    *slot = value;
                }
                *slot
            }
            Slots::Sparse(m) => *m.entry(key).or_insert(value),
        }
    }
}

/// How an attack found its columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackWitness {
    /// Exponents of the normalized weight-2 columns collide as pair sums.
    SumCollision(SidonWitness),
    /// Six columns whose first coordinate is zero.
    ZeroFirstCoordinate { columns: [usize; 6] },
    /// Three disjoint pairs `(i, j)` with the same difference `γ_j − γ_i`.
    DifferenceCollision { columns: [usize; 6], difference: [u32; 2] },
}

/// An uncorrectable regular pattern together with its provenance and the rank of the
/// restricted pseudo-parity matrix under the all-ones column parity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attack {
    pub pattern: ErasurePattern,
    pub witness: AttackWitness,
    pub rank: usize,
}

const TYPE_TWO: [&str; 4] = ["111000", "100110", "010101", "001011"];
const E_ZERO: [&str; 3] = ["111100", "110011", "001111"];

/// Places a six-column mask so that mask column `k` lands on grid column `roles[k]`.
fn place(mask: &[&str], roles: &[usize; 6]) -> ErasurePattern {
    ErasurePattern::from_strings(mask).cells().map(|(r, c)| (r, roles[c])).collect()
}

fn rank_with_simple_parity(h_row: &GfMatrix, m: usize, e: &ErasurePattern) -> Result<usize> {
    TensorCode::with_simple_parity(m, h_row.clone())?.restricted_rank(e)
}

/// Searches the `2×n` row parity for a Type II pattern that no column code can correct.
pub fn attack_t4(h_row: &GfMatrix) -> Result<Option<Attack>> {
    if h_row.rows() != 2 {
        return Err(Error::DimensionMismatch(format!("expected 2 rows, got {}", h_row.rows())));
    }
    if h_row.cols() < 2 || !h_row.every_w_columns_independent(2)? {
        return Err(Error::NotMds);
    }
    let f = h_row.field();
    let omega = f.primitive_element();
    let mut cols = Vec::new();
    let mut exps = Vec::new();
    for j in 0..h_row.cols() {
        let (b1, b2) = (h_row.get(0, j), h_row.get(1, j));
        if b1 != 0 && b2 != 0 {
            cols.push(j);
            exps.push(f.discrete_log(f.div(b2, b1)?, omega)?);
        }
    }
    let Some(mut w) = find_sum_collision(&exps, f.order() as u64 - 1) else {
        return Ok(None);
    };
    w.columns = w.columns.map(|k| cols[k]);
    let pattern = place(&TYPE_TWO, &w.columns);
    let rank = rank_with_simple_parity(h_row, 4, &pattern)?;
    Ok(Some(Attack { pattern, witness: AttackWitness::SumCollision(w), rank }))
}

/// Searches the `3×n` row parity for an `E₀` pattern that no column code can correct.
pub fn attack_t3(h_row: &GfMatrix) -> Result<Option<Attack>> {
    if h_row.rows() != 3 {
        return Err(Error::DimensionMismatch(format!("expected 3 rows, got {}", h_row.rows())));
    }
    if h_row.cols() < 3 || !h_row.every_w_columns_independent(3)? {
        return Err(Error::NotMds);
    }
    let f = h_row.field();
    let (zero, rest): (Vec<usize>, Vec<usize>) =
        (0..h_row.cols()).partition(|&j| h_row.get(0, j) == 0);
    if zero.len() >= 6 {
        let columns: [usize; 6] = std::array::from_fn(|k| zero[k]);
        let pattern = place(&E_ZERO, &columns);
        let rank = rank_with_simple_parity(h_row, 3, &pattern)?;
        return Ok(Some(Attack {
            pattern,
            witness: AttackWitness::ZeroFirstCoordinate { columns },
            rank,
        }));
    }
    let gamma: Vec<[u32; 2]> = rest
        .iter()
        .map(|&j| {
            let b1 = h_row.get(0, j);
            Ok([f.div(h_row.get(1, j), b1)?, f.div(h_row.get(2, j), b1)?])
        })
        .collect::<Result<_>>()?;
    let Some((diff, flat)) = difference_collision(f, &gamma) else {
        return Ok(None);
    };
    let columns = flat.map(|k| rest[k]);
    let pattern = place(&E_ZERO, &columns);
    let rank = rank_with_simple_parity(h_row, 3, &pattern)?;
    Ok(Some(Attack {
        pattern,
        witness: AttackWitness::DifferenceCollision { columns, difference: diff },
        rank,
    }))
}

/// Indices `(i₁, j₁, i₂, j₂, i₃, j₃)` of three disjoint ordered pairs with the same nonzero
/// difference `γ_j − γ_i`, taking the least such difference.
pub fn difference_collision(f: &Field, gamma: &[[u32; 2]]) -> Option<([u32; 2], [usize; 6])> {
    let mut buckets: BTreeMap<[u32; 2], Vec<(usize, usize)>> = BTreeMap::new();
    for (i, j) in (0..gamma.len()).tuple_combinations() {
        for (x, y) in [(i, j), (j, i)] {
            let diff = [f.sub(gamma[y][0], gamma[x][0]), f.sub(gamma[y][1], gamma[x][1])];
            buckets.entry(diff).or_default().push((x, y));
        }
    }
    buckets.into_iter().filter(|(d, p)| *d != [0, 0] && p.len() >= 3).find_map(|(d, pairs)| {
        let c = disjoint_triple(&pairs)?;
        Some((d, [c[0].0, c[0].1, c[1].0, c[1].1, c[2].0, c[2].1]))
    })
}

/// First three pairwise disjoint pairs in lexicographic order of indices into `pairs`.
fn disjoint_triple(pairs: &[(usize, usize)]) -> Option<[(usize, usize); 3]> {
    let meets = |p: (usize, usize), q: (usize, usize)| p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1;
    for (x, &p) in pairs.iter().enumerate() {
        for (y, &q) in pairs.iter().enumerate().skip(x + 1) {
            if meets(p, q) {
                continue;
            }
            if let Some(&r) = pairs[y + 1..].iter().find(|&&r| !meets(p, r) && !meets(q, r)) {
                return Some([p, q, r]);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    GreedyIndep,
    Random,
}

#[derive(Debug, Clone)]
pub struct SearchParams {
    pub m: usize,
    pub b: usize,
    pub n: usize,
    pub field: FieldSpec,
    pub strategy: Strategy,
    pub seed: u64,
    /// Random strategy: number of sampled row parities.
    pub budget: u64,
    pub instance_cap: u64,
}

impl SearchParams {
    pub fn new(m: usize, b: usize, n: usize, field: FieldSpec, strategy: Strategy) -> Self {
        SearchParams {
            m,
            b,
            n,
            field,
            strategy,
            seed: 0,
            budget: 200,
            instance_cap: DEFAULT_INSTANCE_CAP,
        }
    }
}

/// What a search did: the number of candidates tried and the outcome.
#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub trials: u64,
    pub outcome: Result<TensorCode>,
}

pub fn search_mr(p: &SearchParams) -> Result<TensorCode> {
    search_mr_traced(p).outcome
}

/// Looks for an MR code with the all-ones column parity. A returned code always carries a
/// `certified` verdict from [`certify_mr_capped`]; `NotFound` only means this field and
/// budget did not produce one.
pub fn search_mr_traced(p: &SearchParams) -> SearchTrace {
    let fail = |trials, e| SearchTrace { trials, outcome: Err(e) };
    let field = match Field::new(p.field) {
        Ok(f) => f,
        Err(e) => return fail(0, e),
    };
    if p.b == 0 || p.b >= p.n || p.m < 2 {
        return fail(0, Error::InvalidTopology(format!("m = {}, n = {}, b = {}", p.m, p.n, p.b)));
    }
    match p.strategy {
        Strategy::GreedyIndep => greedy(p, &field),
        Strategy::Random => random(p, &field),
    }
}

fn gate(p: &SearchParams, h_row: GfMatrix) -> Result<TensorCode> {
    let code = TensorCode::with_simple_parity(p.m, h_row)?;
    match certify_mr_capped(&code, p.instance_cap)?.verdict {
        Verdict::Certified => Ok(code),
        v => Err(Error::NotFound(format!("candidate failed certification ({v:?})"))),
    }
}

fn greedy(p: &SearchParams, field: &Field) -> SearchTrace {
    let kind = match (p.m, p.b) {
        (4, 2) => TopologyKind::T4_12,
        (3, 3) => TopologyKind::T3_13,
        _ => {
            return SearchTrace {
                trials: 0,
                outcome: Err(Error::UnsupportedShape(format!(
                    "greedy_indep supports (m, b) = (4, 2) or (3, 3), got ({}, {})",
                    p.m, p.b
                ))),
            }
        }
    };
    let mut order: Vec<u32> = field.elements().collect();
    if p.seed != 0 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(p.seed));
    }
    let mut accepted: Vec<u32> = Vec::with_capacity(p.n);
    let mut trials = 0u64;
    for &cand in &order {
        if accepted.len() == p.n {
            break;
        }
        trials += 1;
        if accepted.contains(&cand) || !extends_independent(field, kind, &accepted, cand) {
            continue;
        }
        accepted.push(cand);
    }
    if accepted.len() < p.n {
        return SearchTrace {
            trials,
            outcome: Err(Error::NotFound(format!(
                "GF({}) admits only {} greedy evaluation points",
                field.order(),
                accepted.len()
            ))),
        };
    }
    let outcome = vandermonde_rows(field, p.b, &accepted).and_then(|h| gate(p, h));
    SearchTrace { trials, outcome }
}

fn vandermonde_rows(field: &Field, rows: usize, points: &[u32]) -> Result<GfMatrix> {
    crate::codes::vandermonde(field, rows, points)
}

/// True iff no six-element subset containing `cand` zeroes `f` in any argument order.
pub fn extends_independent(field: &Field, kind: TopologyKind, accepted: &[u32], cand: u32) -> bool {
    accepted.iter().copied().combinations(5).all(|mut five| {
        five.push(cand);
        !zero_in_some_order(field, kind, &five)
    })
}

/// Whether some ordering of six points is a zero of `f`.
pub fn zero_in_some_order(field: &Field, kind: TopologyKind, six: &[u32]) -> bool {
    six.iter().copied().permutations(6).any(|perm| {
        let x: [u32; 6] = std::array::from_fn(|i| perm[i]);
        f_value(field, kind, &x) == 0
    })
}

fn random(p: &SearchParams, field: &Field) -> SearchTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let q = field.order();
    for trial in 1..=p.budget {
        let data = (0..p.b * p.n).map(|_| rng.gen_range(0..q)).collect();
        let h_row = match GfMatrix::from_vec(field, p.b, p.n, data) {
            Ok(h) => h,
            Err(e) => return SearchTrace { trials: trial, outcome: Err(e) },
        };
        if h_row.rank() < p.b {
            continue;
        }
        match gate(p, h_row) {
            Ok(code) => return SearchTrace { trials: trial, outcome: Ok(code) },
            Err(Error::NotFound(_)) => {}
            Err(e) => return SearchTrace { trials: trial, outcome: Err(e) },
        }
    }
    SearchTrace {
        trials: p.budget,
        outcome: Err(Error::NotFound(format!("{} random row parities over GF({q})", p.budget))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{random_mds_parity, vandermonde};
    use crate::patterns::{is_irreducible, is_regular, RegularityMode, Topology};

    fn gf(q: u32) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn f_examples() {
        let f = gf(7);
        assert_eq!(f_value(&f, TopologyKind::T4_12, &[1, 3, 2, 6, 4, 5]), 0);
        assert_eq!(f_value(&f, TopologyKind::T4_12, &[1, 2, 3, 4, 3, 3]), 0);
        assert_eq!(f_value(&f, TopologyKind::T3_13, &[2, 2, 1, 5, 6, 4]), 0);
    }

    #[test]
    fn f_poly_checks_fields() {
        let a = FieldElement::new(&gf(7), 1).unwrap();
        let b = FieldElement::new(&gf(11), 1).unwrap();
        let args = vec![a.clone(), a.clone(), a.clone(), a.clone(), a.clone(), b];
        assert_eq!(f_poly(TopologyKind::T4_12, &args), Err(Error::MixedFields));
        assert!(matches!(f_poly(TopologyKind::T4_12, &args[..3]), Err(Error::Arity { .. })));
    }

    /// `f` vanishes exactly when the pattern's restricted matrix loses rank.
    #[test]
    fn f_agrees_with_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (kind, q, mask) in [
            (TopologyKind::T4_12, 13, &TYPE_TWO[..]),
            (TopologyKind::T4_12, 16, &TYPE_TWO[..]),
            (TopologyKind::T3_13, 13, &E_ZERO[..]),
            (TopologyKind::T3_13, 16, &E_ZERO[..]),
        ] {
            let f = gf(q);
            let (m, b) = kind.shape();
            let e = ErasurePattern::from_strings(mask);
            let mut zeros = 0;
            for _ in 0..1500 {
                let mut pts: Vec<u32> = f.elements().collect();
                pts.shuffle(&mut rng);
                pts.truncate(6);
                let code =
                    TensorCode::with_simple_parity(m, vandermonde(&f, b, &pts).unwrap()).unwrap();
                let x: [u32; 6] = std::array::from_fn(|i| pts[i]);
                let zero = f_value(&f, kind, &x) == 0;
                zeros += zero as usize;
                assert_eq!(!code.is_correctable_by(&e).unwrap(), zero, "{kind:?} {pts:?}");
            }
            assert!(zeros > 0, "{kind:?} over GF({q}) never hit a zero");
        }
    }

    #[test]
    fn sum_collision_examples() {
        let w = find_sum_collision(&[0, 1, 2, 3, 4, 5], 6).unwrap();
        assert_eq!(w.pairing, [[0, 5], [1, 4], [2, 3]]);
        assert_eq!(w.sum, 5);
        assert_eq!(w.exponents, [0, 1, 2, 3, 4, 5]);
        assert!(find_sum_collision(&[0, 1, 2, 4], 15).is_none());
    }

    #[test]
    fn attack_t4_small_field() {
        let f = gf(7);
        let omega = f.primitive_element();
        let cols: Vec<Vec<u32>> = (0..6).map(|t| vec![1, f.pow(omega, t)]).collect();
        let h = GfMatrix::from_columns(&f, 2, &cols).unwrap();
        let att = attack_t4(&h).unwrap().unwrap();
        assert!(att.rank < 12);
        let t = Topology::grid(4, 6, 1, 2).unwrap();
        assert!(is_regular(&t, &att.pattern, RegularityMode::Brute));
        assert!(is_irreducible(&t, &att.pattern));
        let AttackWitness::SumCollision(w) = &att.witness else { panic!() };
        let x = w.exponents.map(|e| f.pow(omega, e));
        assert_eq!(x, [1, 3, 2, 6, 4, 5]);
    }

    #[test]
    fn attack_t4_sidon_input_gives_none() {
        // pair sums of 0, 1, 3, 7, 12, 20 are distinct mod 52
        let f = gf(53);
        let omega = f.primitive_element();
        let cols: Vec<Vec<u32>> =
            [0u64, 1, 3, 7, 12, 20].iter().map(|&t| vec![1, f.pow(omega, t)]).collect();
        let h = GfMatrix::from_columns(&f, 2, &cols).unwrap();
        assert!(attack_t4(&h).unwrap().is_none());
    }

    #[test]
    fn attack_t3_branches() {
        let f = gf(16);
        // six columns (0, 1, x): first coordinate zero
        let mut cols: Vec<Vec<u32>> = (1..7).map(|x| vec![0, 1, x]).collect();
        cols.push(vec![1, 0, 0]);
        let h = GfMatrix::from_columns(&f, 3, &cols).unwrap();
        if h.every_w_columns_independent(3).unwrap() {
            let att = attack_t3(&h).unwrap().unwrap();
            assert!(matches!(att.witness, AttackWitness::ZeroFirstCoordinate { .. }));
            assert!(att.rank < 12);
        }

        // cosets {a, a + 1} in characteristic 2 share the difference (1, 1)
        let cols: Vec<Vec<u32>> = (0..6).map(|a| vec![1, a, f.mul(a, a)]).collect();
        let h = GfMatrix::from_columns(&f, 3, &cols).unwrap();
        let att = attack_t3(&h).unwrap().unwrap();
        assert!(matches!(att.witness, AttackWitness::DifferenceCollision { difference: [1, 1], .. }));
        assert!(att.rank < 12);
        let t = Topology::grid(3, 6, 1, 3).unwrap();
        assert!(is_regular(&t, &att.pattern, RegularityMode::Brute));

        let f7 = gf(7);
        let small = vandermonde(&f7, 3, &[1, 2, 3, 4]).unwrap();
        assert!(attack_t3(&small).unwrap().is_none());
    }

    #[test]
    fn difference_collision_example() {
        let f = gf(7);
        let gamma: Vec<[u32; 2]> = (0..6).map(|g| [g, g]).collect();
        let (d, idx) = difference_collision(&f, &gamma).unwrap();
        assert_eq!(d, [1, 1]);
        assert_eq!(idx, [0, 1, 2, 3, 4, 5]);
        let curve: Vec<[u32; 2]> = (0..6).map(|g| [g, f.mul(g, g)]).collect();
        assert!(difference_collision(&f, &curve).is_none());
    }

    #[test]
    fn certify_detects_non_mds() {
        let f = gf(16);
        let h = GfMatrix::from_columns(&f, 2, &[vec![1, 2], vec![1, 2], vec![1, 3], vec![1, 4]])
            .unwrap();
        let code = TensorCode::with_simple_parity(4, h).unwrap();
        assert_eq!(certify_mr(&code).unwrap().verdict, Verdict::FailedMds);
    }

    #[test]
    fn certify_small_n_is_vacuous() {
        let f = gf(4);
        let code = TensorCode::with_simple_parity(4, vandermonde(&f, 2, &[0, 1, 2, 3]).unwrap())
            .unwrap();
        let r = certify_mr(&code).unwrap();
        assert_eq!(r.verdict, Verdict::Certified);
        assert_eq!(r.patterns_checked, 0);
    }

    #[test]
    fn certify_finds_counterexample_over_gf16() {
        let f = gf(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_mds_parity(&f, 2, 13, &mut rng, 10_000).unwrap();
        let code = TensorCode::with_simple_parity(4, h).unwrap();
        let r = certify_mr(&code).unwrap();
        assert_eq!(r.verdict, Verdict::FailedPattern);
        let e = r.counterexample.unwrap();
        let t = code.topology();
        assert!(is_regular(&t, &e, RegularityMode::Brute) && is_irreducible(&t, &e));
        assert_eq!(code.restricted_rank(&e).unwrap(), r.rank_found.unwrap());
        assert!(r.rank_found.unwrap() < e.len());
    }

    #[test]
    fn greedy_search_is_deterministic_and_certified() {
        let p = SearchParams::new(4, 2, 6, FieldSpec::binary(5), Strategy::GreedyIndep);
        let a = search_mr(&p).unwrap();
        let b = search_mr(&p).unwrap();
        assert_eq!(a, b);
        assert!(certify_mr(&a).unwrap().is_certified());

        let p = SearchParams::new(4, 2, 4, FieldSpec::binary(2), Strategy::GreedyIndep);
        assert!(search_mr(&p).is_ok());
        let p = SearchParams::new(5, 2, 6, FieldSpec::prime(7), Strategy::GreedyIndep);
        assert!(matches!(search_mr(&p), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn report_json() {
        let r = CertReport {
            verdict: Verdict::FailedMds,
            counterexample: None,
            rank_found: None,
            patterns_checked: 0,
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"verdict":"failed_mds","counterexample":null,"rank_found":null,"patterns_checked":0}"#
        );
    }
}
