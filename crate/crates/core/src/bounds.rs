//! Closed-form field-size bounds for grid-like topologies, evaluated exactly where the
//! formula is combinatorial.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    GopalanGeneral,
    KmgPoly,
    T4Upper,
    T3Upper,
    T4LowerThreshold,
    T3LowerThreshold,
    SidonMax,
    TypeCount,
    HypergraphAlpha,
}

impl BoundName {
    pub const ALL: [BoundName; 9] = [
        BoundName::GopalanGeneral,
        BoundName::KmgPoly,
        BoundName::T4Upper,
        BoundName::T3Upper,
        BoundName::T4LowerThreshold,
        BoundName::T3LowerThreshold,
        BoundName::SidonMax,
        BoundName::TypeCount,
        BoundName::HypergraphAlpha,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::GopalanGeneral => "gopalan_general",
            BoundName::KmgPoly => "kmg_poly",
            BoundName::T4Upper => "t4_upper",
            BoundName::T3Upper => "t3_upper",
            BoundName::T4LowerThreshold => "t4_lower_threshold",
            BoundName::T3LowerThreshold => "t3_lower_threshold",
            BoundName::SidonMax => "sidon_max",
            BoundName::TypeCount => "type_count",
            BoundName::HypergraphAlpha => "hypergraph_alpha",
        }
    }

    /// Parameter names the bound reads.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            BoundName::GopalanGeneral | BoundName::KmgPoly => &["m", "b", "n"],
            BoundName::T4Upper => &["n", "c1"],
            BoundName::T3Upper => &["n", "c2"],
            BoundName::T4LowerThreshold | BoundName::T3LowerThreshold => &["n"],
            BoundName::SidonMax => &["N"],
            BoundName::TypeCount => &["m", "b"],
            BoundName::HypergraphAlpha => &["nv", "delta", "r", "c_r"],
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bound {s:?}")))
    }
}

/// A bound parameter: an exact integer or a real constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(u64),
    Real(f64),
}

impl Param {
    fn as_f64(self) -> f64 {
        match self {
            Param::Int(x) => x as f64,
            Param::Real(x) => x,
        }
    }
}

pub type Params = BTreeMap<String, Param>;

/// A bound value. Integers serialize as decimal strings, rationals as `"p/q"`, and
/// `offset + √radicand / divisor` as an object.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Integer(BigUint),
    Rational { num: BigUint, den: BigUint },
    Radical { radicand: BigUint, divisor: u64, offset: u64 },
    Real(f64),
}

impl BoundValue {
    pub fn approx(&self) -> f64 {
        let f = |x: &BigUint| x.to_f64().unwrap_or(f64::INFINITY);
        match self {
            BoundValue::Integer(x) => f(x),
            BoundValue::Rational { num, den } => f(num) / f(den),
            BoundValue::Radical { radicand, divisor, offset } => {
                f(radicand).sqrt() / *divisor as f64 + *offset as f64
            }
            BoundValue::Real(x) => *x,
        }
    }

    fn rational(num: BigUint, den: BigUint) -> Self {
        let g = gcd(&num, &den);
        let (num, den) = (num / &g, den / &g);
        if den.is_one() {
            BoundValue::Integer(num)
        } else {
            BoundValue::Rational { num, den }
        }
    }
}

fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Radical {
            radicand: String,
            divisor: u64,
            offset: u64,
        }
        match self {
            BoundValue::Integer(x) => s.serialize_str(&x.to_string()),
            BoundValue::Rational { num, den } => s.serialize_str(&format!("{num}/{den}")),
            BoundValue::Radical { radicand, divisor, offset } => Radical {
                radicand: radicand.to_string(),
                divisor: *divisor,
                offset: *offset,
            }
            .serialize(s),
            BoundValue::Real(x) => s.serialize_f64(*x),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Integer(x) => write!(f, "{x}"),
            BoundValue::Rational { num, den } => write!(f, "{num}/{den}"),
            BoundValue::Radical { radicand, divisor, offset } => {
                if *offset > 0 {
                    write!(f, "{offset} + ")?;
                }
                write!(f, "sqrt({radicand})")?;
                if *divisor != 1 {
                    write!(f, "/{divisor}")?;
                }
                Ok(())
            }
            BoundValue::Real(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: BoundName,
    pub params: Params,
    pub value: BoundValue,
    pub approx: f64,
    pub applicability: String,
}

fn int(params: &Params, key: &str) -> Result<u64> {
    match params.get(key) {
        Some(Param::Int(x)) => Ok(*x),
        Some(Param::Real(x)) if x.fract() == 0.0 && *x >= 0.0 && *x < 9.0e15 => Ok(*x as u64),
        Some(Param::Real(x)) => {
            Err(Error::InvalidParameter(format!("{key} must be a nonnegative integer, got {x}")))
        }
        None => Err(Error::InvalidParameter(format!("missing parameter {key}"))),
    }
}

fn constant(params: &Params, key: &str) -> Result<f64> {
    params
        .get(key)
        .map(|p| p.as_f64())
        .ok_or_else(|| Error::MissingConstant(format!("{key} must be supplied explicitly")))
}

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `Σ_{i ≤ k} C(n, i)`.
pub fn binomial_prefix(n: u64, k: u64) -> BigUint {
    (0..=k.min(n)).map(|i| binomial(n, i)).sum()
}

fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn positive(key: &str, x: u64) -> Result<u64> {
    if x == 0 {
        Err(Error::InvalidParameter(format!("{key} must be positive")))
    } else {
        Ok(x)
    }
}

pub fn bound(name: BoundName, params: &Params) -> Result<BoundReport> {
    let (value, applicability) = match name {
        BoundName::GopalanGeneral => {
            let (m, b, n) = (int(params, "m")?, int(params, "b")?, int(params, "n")?);
            let k = n + b * m - b;
            (
                BoundValue::Integer(BigUint::from(k) * binomial_prefix(m * n, k)),
                "field size above which some instantiation of a topology with this many \
                 parities is MR"
                    .into(),
            )
        }
        BoundName::KmgPoly => {
            let (m, b, n) = (int(params, "m")?, int(params, "b")?, int(params, "n")?);
            let e = 2 * b * (m.max(1) - 1);
            let c0 = factorial(m + 1) * binomial_prefix(m * b * (m.max(1) - 1), e);
            let n_big = BigUint::from(n);
            let tail = if b == 0 { BigUint::zero() } else { n_big.pow((b - 1) as u32) };
            (
                BoundValue::Integer(c0 * n_big.pow(e as u32) + tail),
                "field size above which T(m×n; 1, b, 0) has an MR tensor-product code".into(),
            )
        }
        BoundName::T4Upper | BoundName::T3Upper => {
            let n = int(params, "n")?;
            let key = if name == BoundName::T4Upper { "c1" } else { "c2" };
            let c = constant(params, key)?;
            if n < 2 {
                return Err(Error::InvalidParameter("n must be at least 2".into()));
            }
            let nf = n as f64;
            (
                BoundValue::Real(c * nf.powi(5) / nf.ln()),
                format!(
                    "field size above which T({}×n; 1, {}, 0) has an MR code; natural log",
                    if name == BoundName::T4Upper { 4 } else { 3 },
                    if name == BoundName::T4Upper { 2 } else { 3 }
                ),
            )
        }
        BoundName::T4LowerThreshold => {
            let n = int(params, "n")?;
            let d = BigUint::from(n.saturating_sub(3));
            (
                BoundValue::rational(&d * &d + BigUint::from(8u32), BigUint::from(4u32)),
                "T(4×n; 1, 2, 0) has no MR tensor-product code when q is below this value".into(),
            )
        }
        BoundName::T3LowerThreshold => {
            let n = int(params, "n")?;
            // n² − 11n + 34 > 0 for every integer n
            let r = n * n + 34 - 11 * n;
            (
                BoundValue::Radical { radicand: BigUint::from(r), divisor: 2, offset: 0 },
                "T(3×n; 1, 3, 0) has no MR tensor-product code when q is below this value".into(),
            )
        }
        BoundName::SidonMax => {
            let big_n = positive("N", int(params, "N")?)?;
            (
                BoundValue::Radical { radicand: BigUint::from(4 * big_n), divisor: 1, offset: 1 },
                "upper bound on the size of a 2-Sidon subset of Z_N".into(),
            )
        }
        BoundName::TypeCount => {
            let (m, b) = (int(params, "m")?, int(params, "b")?);
            let mm = m.max(1) - 1;
            (
                BoundValue::Integer(binomial_prefix(m * b * mm, 2 * b * mm)),
                "upper bound on the number of regular irreducible pattern types".into(),
            )
        }
        BoundName::HypergraphAlpha => {
            let nv = positive("nv", int(params, "nv")?)? as f64;
            let delta = positive("delta", int(params, "delta")?)? as f64;
            let r = positive("r", int(params, "r")?)? as f64;
            let c_r = constant(params, "c_r")?;
            let x = nv / delta;
            (
                BoundValue::Real(c_r * (x * x.ln()).max(0.0).powf(1.0 / r)),
                "independence number lower bound for an (r+1)-graph with small maximum \
                 r-degree; c_r is caller supplied"
                    .into(),
            )
        }
    };
    let used: Params = params
        .iter()
        .filter(|(k, _)| name.params().contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    Ok(BoundReport { name, params: used, approx: value.approx(), value, applicability })
}

/// `q < (n−3)²/4 + 2`, decided exactly.
pub fn below_t4_threshold(n: u64, q: u64) -> bool {
    let d = n.saturating_sub(3) as u128;
    4 * (q as u128) < d * d + 8
}

/// `q < √(n² − 11n + 34) / 2`, decided exactly.
pub fn below_t3_threshold(n: u64, q: u64) -> bool {
    let n = n as u128;
    let q = q as u128;
    4 * q * q < n * n + 34 - 11 * n
}

/// `size > 2√N + 1`, decided exactly.
pub fn exceeds_sidon_max(size: u64, big_n: u64) -> bool {
    size >= 1 && ((size - 1) as u128).pow(2) > 4 * big_n as u128
}
