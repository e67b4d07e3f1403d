//! Tensor-product codes `C_col ⊗ C_row`, their pseudo-parity check matrices, an erasure
//! decoder and a systematic encoder.

use itertools::Itertools;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois::{Field, FieldSpec};
use crate::gfmatrix::{GfMatrix, Solution};
use crate::patterns::{is_irreducible, Cell, ErasurePattern, Topology};

/// A code on `T(m×n; a, b, 0)`: every column lies in the kernel of `h_col` (`a×m`) and every
/// row in the kernel of `h_row` (`b×n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorCode {
    topology: Topology,
    h_col: GfMatrix,
    h_row: GfMatrix,
}

impl TensorCode {
    pub fn new(h_col: GfMatrix, h_row: GfMatrix) -> Result<Self> {
        if h_col.field() != h_row.field() {
            return Err(Error::MixedFields);
        }
        let topology = Topology::grid(h_col.cols(), h_row.cols(), h_col.rows(), h_row.rows())?;
        for (name, h) in [("h_col", &h_col), ("h_row", &h_row)] {
            let rank = h.rank();
            if rank < h.rows() {
                return Err(Error::InvalidParameter(format!(
                    "{name} has rank {rank} but {} rows",
                    h.rows()
                )));
            }
        }
        Ok(TensorCode { topology, h_col, h_row })
    }

    /// `P_m ⊗ C_row`: the single all-ones column parity over `m` rows.
    pub fn with_simple_parity(m: usize, h_row: GfMatrix) -> Result<Self> {
        let h_col = GfMatrix::from_vec(h_row.field(), 1, m, vec![1; m])?;
        Self::new(h_col, h_row)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn field(&self) -> &Field {
        self.h_row.field()
    }

    pub fn h_col(&self) -> &GfMatrix {
        &self.h_col
    }

    pub fn h_row(&self) -> &GfMatrix {
        &self.h_row
    }

    /// `(m − a)(n − b)`.
    pub fn dimension(&self) -> usize {
        let t = self.topology;
        (t.m - t.a) * (t.n - t.b)
    }

    /// The `(a·n + b·m) × (m·n)` matrix stacking every column constraint above a
    /// block diagonal of row constraints. Cell `(i, j)` maps to column `i·n + j`.
    pub fn build_pseudo_parity(&self) -> GfMatrix {
        let Topology { m, n, a, b, .. } = self.topology;
        let mut h = GfMatrix::zeros(self.field(), a * n + b * m, m * n);
        for i in 0..m {
            for j in 0..n {
                let col = i * n + j;
                for k in 0..a {
                    h.set(j * a + k, col, self.h_col.get(k, i));
                }
                for k in 0..b {
                    h.set(a * n + i * b + k, col, self.h_row.get(k, j));
                }
            }
        }
        h
    }

    /// Columns of the pseudo-parity check matrix for the given cells, keeping only the
    /// constraint rows those cells touch. Rank is the same as for the full restriction.
    pub fn restricted_matrix(&self, cells: &[Cell]) -> GfMatrix {
        let Topology { a, b, .. } = self.topology;
        let grid_cols: Vec<usize> = cells.iter().map(|&(_, c)| c).sorted().dedup().collect();
        let grid_rows: Vec<usize> = cells.iter().map(|&(r, _)| r).sorted().dedup().collect();
        let height = a * grid_cols.len() + b * grid_rows.len();
        let mut h = GfMatrix::zeros(self.field(), height, cells.len());
        for (x, &(i, j)) in cells.iter().enumerate() {
            let jc = grid_cols.binary_search(&j).unwrap();
            let ir = grid_rows.binary_search(&i).unwrap();
            for k in 0..a {
                h.set(jc * a + k, x, self.h_col.get(k, i));
            }
            for k in 0..b {
                h.set(a * grid_cols.len() + ir * b + k, x, self.h_row.get(k, j));
            }
        }
        h
    }

    /// Rank of the pseudo-parity check matrix restricted to the pattern's cells.
    pub fn restricted_rank(&self, e: &ErasurePattern) -> Result<usize> {
        self.topology.check_pattern(e)?;
        let cells: Vec<Cell> = e.cells().collect();
        Ok(self.restricted_matrix(&cells).rank())
    }

    /// The pattern is recoverable iff the restricted pseudo-parity matrix has full column rank.
    pub fn is_correctable_by(&self, e: &ErasurePattern) -> Result<bool> {
        Ok(self.restricted_rank(e)? == e.len())
    }

    pub fn is_codeword(&self, grid: &[Vec<u32>]) -> Result<bool> {
        let flat = self.flatten(grid)?;
        Ok(self.build_pseudo_parity().mul_vec(&flat)?.iter().all(|&x| x == 0))
    }

    fn flatten(&self, grid: &[Vec<u32>]) -> Result<Vec<u32>> {
        let Topology { m, n, .. } = self.topology;
        if grid.len() != m || grid.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("grid is not {m}x{n}")));
        }
        grid.iter().flatten().map(|&x| self.field().element(x as u64)).collect()
    }

    /// Fills the erased cells of `w`. Known symbols are checked for consistency with the
    /// code before uniqueness is considered.
    pub fn decode(&self, w: &GridWord) -> Result<Vec<Vec<u32>>> {
        let Topology { m, n, .. } = self.topology;
        if w.rows() != m || w.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "word is {}x{}, code is {m}x{n}",
                w.rows(),
                w.cols()
            )));
        }
        let f = self.field();
        let h = self.build_pseudo_parity();
        let mut erased = Vec::new();
        let mut known = vec![0u32; m * n];
        for i in 0..m {
            for j in 0..n {
                match w.entries[i][j] {
                    Some(x) => known[i * n + j] = f.element(x as u64)?,
                    None => erased.push(i * n + j),
                }
            }
        }
        let syndrome = h.mul_vec(&known)?;
        let rhs: Vec<u32> = syndrome.iter().map(|&s| f.neg(s)).collect();
        let system = h.select_columns(&erased);
        let values = match system.solve(&rhs)? {
            Solution::Inconsistent => return Err(Error::InconsistentWord),
            Solution::Underdetermined { .. } => return Err(Error::Uncorrectable),
            Solution::Unique(x) => x,
        };
        for (&idx, v) in erased.iter().zip(values) {
            known[idx] = v;
        }
        Ok(known.chunks(n).map(<[u32]>::to_vec).collect())
    }

    /// Places the message row-major on the first `m − a` rows × first `n − b` columns and
    /// solves for the parity cells.
    pub fn encode(&self, message: &[u32]) -> Result<GridWord> {
        let Topology { m, n, a, b, .. } = self.topology;
        let k = self.dimension();
        if message.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "message of length {} for dimension {k}",
                message.len()
            )));
        }
        let mut entries = vec![vec![None; n]; m];
        for (x, &val) in message.iter().enumerate() {
            entries[x / (n - b)][x % (n - b)] = Some(self.field().element(val as u64)?);
        }
        let partial = GridWord { entries };
        let _ = a;
        match self.decode(&partial) {
            Ok(grid) => Ok(GridWord::full(grid)),
            Err(Error::Uncorrectable) => Err(Error::NotMds),
            Err(e) => Err(e),
        }
    }

    /// The `u₀b × (|E| − v₀)` block left after eliminating one pivot cell per erased column
    /// (the topmost erased cell with a nonzero column coefficient).
    ///
    /// Column order follows the non-pivot cells row-major; row blocks follow the erased rows
    /// in ascending order. `rank(H|_E) = v₀ + rank(B)`.
    pub fn reduce_restricted(&self, e: &ErasurePattern) -> Result<GfMatrix> {
        let t = self.topology;
        if t.a != 1 {
            return Err(Error::UnsupportedColumnParities(t.a));
        }
        t.check_pattern(e)?;
        if (0..t.m).any(|i| self.h_col.get(0, i) == 0) {
            return Err(Error::NotMds);
        }
        if e.is_empty() || !is_irreducible(&t, e) {
            return Err(Error::NotIrreducible);
        }
        let f = self.field();
        let rows = e.rows();
        let cols = e.cols();
        let pivot_row: Vec<usize> = cols
            .iter()
            .map(|&c| e.cells().find(|&(_, j)| j == c).map(|(r, _)| r).unwrap())
            .collect();
        let rest: Vec<Cell> = e
            .cells()
            .filter(|&(r, c)| pivot_row[cols.binary_search(&c).unwrap()] != r)
            .collect();
        let b = t.b;
        let mut out = GfMatrix::zeros(f, rows.len() * b, rest.len());
        for (x, &(i, j)) in rest.iter().enumerate() {
            let p = pivot_row[cols.binary_search(&j).unwrap()];
            let ratio = f.div(self.h_col.get(0, i), self.h_col.get(0, p))?;
            let bi = rows.binary_search(&i).unwrap();
            let bp = rows.binary_search(&p).unwrap();
            for k in 0..b {
                let h = self.h_row.get(k, j);
                out.set(bi * b + k, x, h);
                out.set(bp * b + k, x, f.neg(f.mul(ratio, h)));
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CodeJson {
    field: FieldSpec,
    m: usize,
    n: usize,
    a: usize,
    b: usize,
    h_col: GfMatrix,
    h_row: GfMatrix,
}

impl Serialize for TensorCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let t = self.topology;
        CodeJson {
            field: self.field().spec(),
            m: t.m,
            n: t.n,
            a: t.a,
            b: t.b,
            h_col: self.h_col.clone(),
            h_row: self.h_row.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CodeJson::deserialize(d)?;
        if j.h_col.field().spec() != j.field || j.h_row.field().spec() != j.field {
            return Err(D::Error::custom("matrix fields differ from the code field"));
        }
        let code = TensorCode::new(j.h_col, j.h_row).map_err(D::Error::custom)?;
        let t = code.topology();
        if (t.m, t.n, t.a, t.b) != (j.m, j.n, j.a, j.b) {
            return Err(D::Error::custom("m, n, a, b disagree with the matrix shapes"));
        }
        Ok(code)
    }
}

/// An `m×n` array of symbols with erased cells marked `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWord {
    pub entries: Vec<Vec<Option<u32>>>,
}

impl GridWord {
    pub fn full(grid: Vec<Vec<u32>>) -> Self {
        GridWord { entries: grid.into_iter().map(|r| r.into_iter().map(Some).collect()).collect() }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn erased(&self) -> ErasurePattern {
        self.entries
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, x)| x.is_none()).map(move |(j, _)| (i, j)))
            .collect()
    }

    /// A copy with the pattern's cells erased.
    pub fn erase(&self, e: &ErasurePattern) -> GridWord {
        let mut w = self.clone();
        for (i, j) in e.cells() {
            if let Some(cell) = w.entries.get_mut(i).and_then(|r| r.get_mut(j)) {
                *cell = None;
            }
        }
        w
    }

    /// The symbols, if nothing is erased.
    pub fn values(&self) -> Option<Vec<Vec<u32>>> {
        self.entries.iter().map(|r| r.iter().copied().collect()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GridWordJson {
    entries: Vec<Vec<Option<u32>>>,
    #[serde(default)]
    erased: Option<ErasurePattern>,
}

impl Serialize for GridWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridWordJson { entries: self.entries.clone(), erased: Some(self.erased()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GridWordJson::deserialize(d)?;
        let w = GridWord { entries: j.entries };
        if w.entries.iter().any(|r| r.len() != w.cols()) {
            return Err(D::Error::custom("ragged grid"));
        }
        if let Some(listed) = j.erased {
            if listed != w.erased() {
                return Err(D::Error::custom("\"erased\" must list exactly the null entries"));
            }
        }
        Ok(w)
    }
}

/// A random `rows × n` matrix in which every `rows` columns are independent.
///
/// Columns are drawn one at a time, rejecting any column that would create a dependent
/// `rows`-subset with earlier columns. Returns `None` after `attempts` rejections in a row.
pub fn random_mds_parity<R: Rng + ?Sized>(
    field: &Field,
    rows: usize,
    n: usize,
    rng: &mut R,
    attempts: usize,
) -> Option<GfMatrix> {
    let q = field.order();
    let mut columns: Vec<Vec<u32>> = Vec::with_capacity(n);
    while columns.len() < n {
        let mut accepted = false;
        for _ in 0..attempts {
            let cand: Vec<u32> = (0..rows).map(|_| rng.gen_range(0..q)).collect();
            let k = rows.min(columns.len() + 1);
            let ok = (0..columns.len()).combinations(k - 1).all(|subset| {
                let mut cols: Vec<Vec<u32>> = subset.iter().map(|&i| columns[i].clone()).collect();
                cols.push(cand.clone());
                GfMatrix::from_columns(field, rows, &cols).map(|m| m.rank() == k).unwrap_or(false)
            });
            if ok {
                columns.push(cand);
                accepted = true;
                break;
            }
        }
        if !accepted {
            return None;
        }
    }
    GfMatrix::from_columns(field, rows, &columns).ok()
}

/// Rows `(x^0, x^1, …, x^{rows−1})` evaluated at the given points.
pub fn vandermonde(field: &Field, rows: usize, points: &[u32]) -> Result<GfMatrix> {
    let data = (0..rows)
        .flat_map(|k| points.iter().map(move |&x| field.pow(x, k as u64)))
        .collect();
    GfMatrix::from_vec(field, rows, points.len(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn gf(q: u32) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn pseudo_parity_2x2_over_gf2() {
        let f = gf(2);
        let code = TensorCode::new(
            GfMatrix::from_rows(&f, &[vec![1, 1]]).unwrap(),
            GfMatrix::from_rows(&f, &[vec![1, 1]]).unwrap(),
        )
        .unwrap();
        let h = code.build_pseudo_parity();
        assert_eq!((h.rows(), h.cols()), (4, 4));
        for r in 0..4 {
            assert_eq!(h.row(r).iter().filter(|&&x| x == 1).count(), 2);
        }
        // cells (0,0),(1,0) share the first column constraint
        assert_eq!(h.row(0), &[1, 0, 1, 0]);
        assert_eq!(h.row(2), &[1, 1, 0, 0]);
    }

    #[test]
    fn restricted_matrix_rank_matches_full_restriction() {
        let f = gf(16);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h_col = random_mds_parity(&f, 2, 4, &mut rng, 1000).unwrap();
        let h_row = random_mds_parity(&f, 2, 6, &mut rng, 1000).unwrap();
        let code = TensorCode::new(h_col, h_row).unwrap();
        let full = code.build_pseudo_parity();
        for _ in 0..200 {
            let cells: Vec<Cell> = (0..4)
                .flat_map(|i| (0..6).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            let idx: Vec<usize> = cells.iter().map(|&(i, j)| i * 6 + j).collect();
            assert_eq!(code.restricted_matrix(&cells).rank(), full.select_columns(&idx).rank());
        }
    }

    #[test]
    fn correctability_examples() {
        let f = gf(7);
        let h_row = vandermonde(&f, 2, &[1, 2, 3, 4, 5, 6]).unwrap();
        let code = TensorCode::with_simple_parity(4, h_row).unwrap();
        assert!(code.is_correctable_by(&ErasurePattern::default()).unwrap());
        let column: ErasurePattern = (0..4).map(|i| (i, 2)).collect();
        assert!(code.is_correctable_by(&column).unwrap());
        let oob = ErasurePattern::new([(4, 0)]);
        assert!(code.is_correctable_by(&oob).is_err());
    }

    #[test]
    fn encode_small_examples() {
        let f = gf(2);
        let ones = GfMatrix::from_rows(&f, &[vec![1, 1]]).unwrap();
        let code = TensorCode::new(ones.clone(), ones).unwrap();
        let w = code.encode(&[1]).unwrap();
        assert_eq!(w.values().unwrap(), vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(code.encode(&[0]).unwrap().values().unwrap(), vec![vec![0, 0], vec![0, 0]]);
        assert!(matches!(code.encode(&[1, 0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn decode_examples() {
        let f = gf(7);
        let h_row = vandermonde(&f, 2, &[1, 2, 3, 4, 5]).unwrap();
        let code = TensorCode::with_simple_parity(3, h_row).unwrap();
        let msg: Vec<u32> = (0..code.dimension() as u32).map(|x| (x * 3 + 1) % 7).collect();
        let word = code.encode(&msg).unwrap();
        let grid = word.values().unwrap();
        assert!(code.is_codeword(&grid).unwrap());
        assert_eq!(code.decode(&word).unwrap(), grid);

        // a single erasure is minus the sum of the rest of its column
        let w1 = word.erase(&ErasurePattern::new([(1, 3)]));
        let out = code.decode(&w1).unwrap();
        assert_eq!(out[1][3], f.neg(f.add(grid[0][3], grid[2][3])));

        let mut bad = w1.clone();
        bad.entries[0][0] = Some(f.add(grid[0][0], 1));
        assert_eq!(code.decode(&bad), Err(Error::InconsistentWord));

        let everything: ErasurePattern = (0..3).flat_map(|i| (0..5).map(move |j| (i, j))).collect();
        assert_eq!(code.decode(&word.erase(&everything)), Err(Error::Uncorrectable));
    }

    #[test]
    fn reduce_restricted_rank_identity_small() {
        let f = gf(7);
        let h_row = vandermonde(&f, 2, &[0, 1, 2, 3, 4, 5]).unwrap();
        let code = TensorCode::with_simple_parity(4, h_row).unwrap();
        let e = ErasurePattern::from_strings(&["111000", "110100", "001011", "000111"]);
        let bmat = code.reduce_restricted(&e).unwrap();
        assert_eq!((bmat.rows(), bmat.cols()), (8, 6));
        assert_eq!(code.restricted_rank(&e).unwrap(), 6 + bmat.rank());
        let reducible = ErasurePattern::new([(0, 0), (0, 1)]);
        assert_eq!(code.reduce_restricted(&reducible), Err(Error::NotIrreducible));
    }

    #[test]
    fn grid_word_json() {
        let w = GridWord { entries: vec![vec![Some(1), None], vec![Some(0), Some(2)]] };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"entries":[[1,null],[0,2]],"erased":[[0,1]]}"#);
        assert_eq!(serde_json::from_str::<GridWord>(&s).unwrap(), w);
        assert!(serde_json::from_str::<GridWord>(r#"{"entries":[[1,null]],"erased":[[0,0]]}"#)
            .is_err());
    }

    #[test]
    fn code_json_roundtrip() {
        let f = gf(16);
        let code =
            TensorCode::with_simple_parity(4, vandermonde(&f, 2, &[1, 2, 3, 4, 5, 6]).unwrap())
                .unwrap();
        let s = serde_json::to_string(&code).unwrap();
        let back: TensorCode = serde_json::from_str(&s).unwrap();
        assert_eq!(back, code);
    }
}
