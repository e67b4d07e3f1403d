//! Arithmetic in GF(p) and GF(2^k).
//!
//! Elements are plain `u32` values in `[0, q)`. For prime fields the value is the least
//! non-negative residue; for GF(2^k) it is the coefficient bitmask of a polynomial reduced
//! modulo a primitive polynomial, so `2` (the polynomial `x`) generates the multiplicative group.
//! Every field carries log/antilog tables, which keeps discrete logarithms O(1).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 20;

/// One primitive polynomial over GF(2) per degree, indexed by degree.
const PRIMITIVE_POLYS: [u32; 17] = [
    0, 0, 0b111, 0b1011, 0b1_0011, 0b10_0101, 0b100_0011, 0b1000_1001, 0x11d, 0x211, 0x409, 0x805,
    0x1053, 0x201b, 0x4443, 0x8003, 0x1_100b,
];

/// Built-in primitive polynomial for GF(2^k), `2 <= k <= 16`.
pub fn default_modulus(k: u32) -> Option<u32> {
    PRIMITIVE_POLYS.get(k as usize).copied().filter(|&m| m != 0)
}

/// Serializable description of a finite field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u32>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> Self {
        FieldSpec { p, k: 1, modulus: None }
    }

    /// GF(2^k) with the built-in modulus (or GF(2) when `k == 1`).
    pub fn binary(k: u32) -> Self {
        FieldSpec { p: 2, k, modulus: if k > 1 { default_modulus(k) } else { None } }
    }

    /// The field of order `q`, if `q` is a prime or a power of two within the supported range.
    pub fn for_order(q: u32) -> Option<Self> {
        if !(2..=MAX_ORDER).contains(&q) {
            return None;
        }
        if q.is_power_of_two() {
            let k = q.trailing_zeros();
            if k == 1 || default_modulus(k).is_some() {
                return Some(FieldSpec::binary(k));
            }
            return None;
        }
        is_prime(q as u64).then(|| FieldSpec::prime(q))
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.k)
        }
    }
}

struct Tables {
    spec: FieldSpec,
    order: u32,
    /// `exp[i] = g^i` for the table generator `g`, `i < q - 1`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`; `log[0]` is unused.
    log: Vec<u32>,
    /// Distinct prime factors of `q - 1`.
    group_factors: Vec<u64>,
}

/// A constructed finite field. Cheap to clone; equality is by [`FieldSpec`].
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.spec)
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = FieldSpec::deserialize(d)?;
        Field::new(spec).map_err(serde::de::Error::custom)
    }
}

impl Field {
    /// Builds the field described by `spec`, filling in the built-in modulus for GF(2^k)
    /// when none is given.
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let FieldSpec { p, k, modulus } = spec;
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("characteristic {p} is not prime")));
        }
        if k > 1 && p != 2 {
            return Err(Error::InvalidField("extensions are supported only over GF(2)".into()));
        }
        let order = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or_else(|| Error::InvalidField(format!("order {p}^{k} exceeds 2^20")))?
            as u32;
        let group_factors = prime_factors(order as u64 - 1);

        if k == 1 {
            if modulus.is_some() {
                return Err(Error::InvalidField("prime fields take no modulus".into()));
            }
            let spec = FieldSpec::prime(p);
            let g = (1..p)
                .find(|&g| has_full_order(g as u64, p as u64, &group_factors))
                .expect("prime fields are cyclic");
            let mut exp = Vec::with_capacity(p as usize - 1);
            let mut log = vec![0u32; p as usize];
            let mut x = 1u64;
            for i in 0..p - 1 {
                exp.push(x as u32);
                log[x as usize] = i;
                x = x * g as u64 % p as u64;
            }
            return Ok(Field(Arc::new(Tables { spec, order, exp, log, group_factors })));
        }

        let poly = match modulus {
            Some(m) => m,
            None => default_modulus(k).ok_or_else(|| {
                Error::InvalidField(format!("no built-in modulus for k = {k}; supply one"))
            })?,
        };
        if poly >> k != 1 {
            return Err(Error::InvalidField(format!("modulus {poly:#b} does not have degree {k}")));
        }
        let mut exp = Vec::with_capacity(order as usize - 1);
        let mut log = vec![u32::MAX; order as usize];
        let mut x = 1u32;
        for i in 0..order - 1 {
            if log[x as usize] != u32::MAX {
                return Err(Error::InvalidField(format!("modulus {poly:#b} is not primitive")));
            }
            exp.push(x);
            log[x as usize] = i;
            x <<= 1;
            if x & order != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::InvalidField(format!("modulus {poly:#b} is not primitive")));
        }
        log[0] = 0;
        let spec = FieldSpec { p: 2, k, modulus: Some(poly) };
        Ok(Field(Arc::new(Tables { spec, order, exp, log, group_factors })))
    }

    /// Field of order `q` using the built-in representation.
    pub fn of_order(q: u32) -> Result<Self> {
        let spec = FieldSpec::for_order(q)
            .ok_or_else(|| Error::InvalidField(format!("no supported field of order {q}")))?;
        Field::new(spec)
    }

    pub fn spec(&self) -> FieldSpec {
        self.0.spec
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn characteristic(&self) -> u32 {
        self.0.spec.p
    }

    fn is_prime_field(&self) -> bool {
        self.0.spec.k == 1
    }

    pub fn contains(&self, x: u64) -> bool {
        x < self.0.order as u64
    }

    /// Checks that `x` is a valid element and narrows it.
    pub fn element(&self, x: u64) -> Result<u32> {
        if self.contains(x) {
            Ok(x as u32)
        } else {
            Err(Error::ElementOutOfRange { value: x, order: self.0.order })
        }
    }

    /// Reduces an arbitrary integer into the prime subfield.
    pub fn from_int(&self, x: i64) -> u32 {
        let p = self.0.spec.p as i64;
        let r = x.rem_euclid(p) as u32;
        if self.is_prime_field() {
            r
        } else {
            r & 1
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.is_prime_field() {
            let p = self.0.order;
            let s = a + b;
            if s >= p {
                s - p
            } else {
                s
            }
        } else {
            a ^ b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.is_prime_field() && a != 0 {
            self.0.order - a
        } else {
            a
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.is_prime_field() {
            (a as u64 * b as u64 % self.0.order as u64) as u32
        } else if a == 0 || b == 0 {
            0
        } else {
            let t = &*self.0;
            let s = t.log[a as usize] + t.log[b as usize];
            let n = t.order - 1;
            t.exp[(if s >= n { s - n } else { s }) as usize]
        }
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let t = &*self.0;
        let n = t.order - 1;
        let l = t.log[a as usize];
        Ok(t.exp[((n - l) % n) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &*self.0;
        let n = (t.order - 1) as u64;
        let l = t.log[a as usize] as u64 * (e % n) % n;
        t.exp[l as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: u32) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroHasNoLog);
        }
        let n = (self.0.order - 1) as u64;
        let l = self.0.log[a as usize] as u64;
        Ok(n / gcd(n, l))
    }

    pub fn is_primitive(&self, a: u32) -> bool {
        a != 0 && self.multiplicative_order(a).ok() == Some((self.0.order - 1) as u64)
    }

    /// The least-valued element of multiplicative order `q - 1`.
    pub fn primitive_element(&self) -> u32 {
        let n = self.0.order as u64 - 1;
        (1..self.0.order)
            .find(|&g| {
                self.0.group_factors.iter().all(|&r| self.pow(g, n / r) != 1)
            })
            .expect("multiplicative group is cyclic")
    }

    /// The unique `t` in `[0, q - 1)` with `base^t = x`.
    pub fn discrete_log(&self, x: u32, base: u32) -> Result<u64> {
        if x == 0 {
            return Err(Error::ZeroHasNoLog);
        }
        if !self.is_primitive(base) {
            return Err(Error::NotPrimitive(base));
        }
        let n = self.0.order as u64 - 1;
        let lx = self.0.log[x as usize] as u64;
        let lb = self.0.log[base as usize] as u64;
        // base = g^lb with gcd(lb, n) = 1, so t = lx * lb^{-1} mod n.
        let inv = mod_inverse(lb, n).expect("primitive base has invertible log");
        Ok(((lx as u128 * inv as u128) % n as u128) as u64)
    }

    /// Iterator over all elements in increasing integer value.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.order
    }

    pub fn sum<I: IntoIterator<Item = u32>>(&self, it: I) -> u32 {
        it.into_iter().fold(0, |acc, x| self.add(acc, x))
    }

    pub fn product<I: IntoIterator<Item = u32>>(&self, it: I) -> u32 {
        it.into_iter().fold(1, |acc, x| self.mul(acc, x))
    }
}

/// Field operations accepted by [`field_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow,
}

/// An element tagged with the field it belongs to.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    pub value: u32,
    pub field: Field,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.value, self.field)
    }
}

impl FieldElement {
    pub fn new(field: &Field, value: u64) -> Result<Self> {
        Ok(FieldElement { value: field.element(value)?, field: field.clone() })
    }
}

/// Checked arithmetic on tagged elements.
///
/// `pow` takes the exponent as the integer value of its second operand.
pub fn field_op(field: &Field, op: FieldOp, operands: &[FieldElement]) -> Result<FieldElement> {
    if operands.iter().any(|x| x.field != *field) {
        return Err(Error::MixedFields);
    }
    let arity = match op {
        FieldOp::Neg | FieldOp::Inv => 1,
        _ => 2,
    };
    if operands.len() != arity {
        let name = match op {
            FieldOp::Add => "add",
            FieldOp::Sub => "sub",
            FieldOp::Mul => "mul",
            FieldOp::Div => "div",
            FieldOp::Neg => "neg",
            FieldOp::Inv => "inv",
            FieldOp::Pow => "pow",
        };
        return Err(Error::Arity { op: name, expected: arity, got: operands.len() });
    }
    let a = operands[0].value;
    let value = match op {
        FieldOp::Add => field.add(a, operands[1].value),
        FieldOp::Sub => field.sub(a, operands[1].value),
        FieldOp::Mul => field.mul(a, operands[1].value),
        FieldOp::Div => field.div(a, operands[1].value)?,
        FieldOp::Neg => field.neg(a),
        FieldOp::Inv => field.inv(a)?,
        FieldOp::Pow => field.pow(a, operands[1].value as u64),
    };
    Ok(FieldElement { value, field: field.clone() })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn has_full_order(g: u64, p: u64, factors: &[u64]) -> bool {
    factors.iter().all(|&r| mod_pow(g, (p - 1) / r, p) != 1)
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(n as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Schoolbook carry-less product reduced modulo `poly`.
    fn clmul_mod(a: u32, b: u32, poly: u32, k: u32) -> u32 {
        let mut acc = 0u64;
        for i in 0..32 {
            if b >> i & 1 == 1 {
                acc ^= (a as u64) << i;
            }
        }
        for bit in (k..64).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= (poly as u64) << (bit - k);
            }
        }
        acc as u32
    }

    #[test]
    fn gf7_mul() {
        let f = Field::of_order(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
    }

    #[test]
    fn gf8_mul_matches_schoolbook() {
        let f = Field::new(FieldSpec { p: 2, k: 3, modulus: Some(0b1011) }).unwrap();
        assert_eq!(f.mul(0b010, 0b100), 0b011);
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(f.mul(a, b), clmul_mod(a, b, 0b1011, 3));
            }
        }
    }

    #[test]
    fn all_builtin_moduli_are_primitive() {
        for k in 1..=16 {
            let f = Field::new(FieldSpec::binary(k)).unwrap();
            assert_eq!(f.order(), 1 << k);
            if k > 1 {
                assert_eq!(f.primitive_element(), 2, "k = {k}");
            }
        }
    }

    #[test]
    fn schoolbook_agreement_gf256() {
        let f = Field::new(FieldSpec::binary(8)).unwrap();
        for a in (0..256).step_by(7) {
            for b in 0..256 {
                assert_eq!(f.mul(a, b), clmul_mod(a, b, 0x11d, 8));
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Field::new(FieldSpec::prime(9)).is_err());
        assert!(Field::new(FieldSpec { p: 3, k: 2, modulus: None }).is_err());
        // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5.
        assert!(Field::new(FieldSpec { p: 2, k: 4, modulus: Some(0b11111) }).is_err());
        // reducible: x^3 + 1
        assert!(Field::new(FieldSpec { p: 2, k: 3, modulus: Some(0b1001) }).is_err());
        assert!(Field::new(FieldSpec::binary(21)).is_err());
        assert!(Field::new(FieldSpec::prime(1_048_583)).is_err());
    }

    #[test]
    fn primitive_elements() {
        assert_eq!(Field::of_order(7).unwrap().primitive_element(), 3);
        assert_eq!(Field::of_order(2).unwrap().primitive_element(), 1);
        assert_eq!(Field::of_order(8).unwrap().primitive_element(), 0b010);
        assert_eq!(Field::of_order(3).unwrap().primitive_element(), 2);
        // 3^1..3^6 enumerates GF(7)*
        let f = Field::of_order(7).unwrap();
        let mut seen: Vec<u32> = (1..=6).map(|e| f.pow(3, e)).collect();
        seen.sort();
        assert_eq!(seen, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn discrete_logs_gf7() {
        let f = Field::of_order(7).unwrap();
        assert_eq!(f.discrete_log(1, 3).unwrap(), 0);
        assert_eq!(f.discrete_log(3, 3).unwrap(), 1);
        assert_eq!(f.discrete_log(6, 3).unwrap(), 3);
        assert_eq!(f.discrete_log(0, 3), Err(Error::ZeroHasNoLog));
        assert_eq!(f.discrete_log(2, 2), Err(Error::NotPrimitive(2)));
    }

    #[test]
    fn discrete_log_with_non_table_base() {
        let f = Field::of_order(16).unwrap();
        let primitive: Vec<u32> = (1..16).filter(|&g| f.is_primitive(g)).collect();
        assert_eq!(primitive.len(), 8);
        for &g in &primitive {
            for x in 1..16 {
                let t = f.discrete_log(x, g).unwrap();
                assert_eq!(f.pow(g, t), x);
            }
        }
    }

    #[test]
    fn field_op_checks() {
        let f7 = Field::of_order(7).unwrap();
        let f5 = Field::of_order(5).unwrap();
        let a = FieldElement::new(&f7, 3).unwrap();
        let b = FieldElement::new(&f7, 5).unwrap();
        let z = FieldElement::new(&f7, 0).unwrap();
        let c = FieldElement::new(&f5, 1).unwrap();
        assert_eq!(field_op(&f7, FieldOp::Mul, &[a.clone(), b.clone()]).unwrap().value, 1);
        assert_eq!(field_op(&f7, FieldOp::Div, &[a.clone(), z.clone()]), Err(Error::DivisionByZero));
        assert_eq!(field_op(&f7, FieldOp::Inv, &[z]), Err(Error::DivisionByZero));
        assert_eq!(field_op(&f7, FieldOp::Add, &[a.clone(), c]), Err(Error::MixedFields));
        assert_eq!(field_op(&f7, FieldOp::Pow, &[a.clone(), b]).unwrap().value, f7.pow(3, 5));
        assert!(FieldElement::new(&f7, 7).is_err());
        for x in 0..7 {
            let e = FieldElement::new(&f7, x).unwrap();
            let one = FieldElement::new(&f7, 1).unwrap();
            assert_eq!(field_op(&f7, FieldOp::Mul, &[e, one]).unwrap().value, x as u32);
        }
    }

    #[test]
    fn exhaustive_axioms_small_fields() {
        for q in [2u32, 3, 4, 5, 7, 8, 11, 13, 16, 17, 31, 32, 64] {
            let f = Field::of_order(q).unwrap();
            for a in 0..q {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                if f.characteristic() == 2 {
                    assert_eq!(f.add(a, a), 0);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn log_is_a_homomorphism() {
        for q in [7u32, 16, 29, 256] {
            let f = Field::of_order(q).unwrap();
            let w = f.primitive_element();
            let n = (q - 1) as u64;
            let mut seen = vec![false; n as usize];
            for x in 1..q {
                let lx = f.discrete_log(x, w).unwrap();
                assert!(!seen[lx as usize]);
                seen[lx as usize] = true;
                for y in (1..q).step_by(3) {
                    let ly = f.discrete_log(y, w).unwrap();
                    assert_eq!(f.discrete_log(f.mul(x, y), w).unwrap(), (lx + ly) % n);
                }
            }
        }
    }

    #[test]
    fn spec_json() {
        let s: FieldSpec = serde_json::from_str(r#"{"p":2,"k":3,"modulus":11}"#).unwrap();
        assert_eq!(s, FieldSpec::binary(3));
        let f = Field::of_order(13).unwrap();
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"p":13,"k":1}"#);
    }
}
