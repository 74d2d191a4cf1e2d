use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::numtheory::{distinct_prime_factors, is_prime_u64};
use super::prime_poly::{self, add_mod, mul_mod, sub_mod};
use crate::error::{Error, Result};

/// Trial-division limit used when factoring `p^m - 1` to certify α.
pub const DEFAULT_TRIAL_LIMIT: u64 = 1 << 20;

/// An element of GF(p^m) in polynomial basis, constant coefficient first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: SmallVec<[u32; 4]>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn from_coeffs(m: usize, src: &[u32]) -> Self {
        let mut coeffs: SmallVec<[u32; 4]> = SmallVec::from_elem(0, m);
        coeffs[..src.len().min(m)].copy_from_slice(&src[..src.len().min(m)]);
        FieldElement { coeffs }
    }

    /// Packed base-p integer value of the coefficient vector.
    pub fn value(&self, p: u32) -> BigUint {
        let mut v = BigUint::zero();
        for &c in self.coeffs.iter().rev() {
            v = v * p + c;
        }
        v
    }

    /// Big-endian hex of the packed value ("0" and "1" for the identities).
    pub fn to_hex(&self, p: u32) -> String {
        self.value(p).to_str_radix(16)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub m: usize,
    /// Monic irreducible of degree m, constant term first (length m + 1).
    pub modulus: Vec<u32>,
    pub primitive: FieldElement,
    /// False when `p^m - 1` could not be factored and α was taken on trust.
    pub primitive_verified: bool,
}

/// Serialized form of a [`FieldSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSpecJson {
    pub p: u32,
    pub m: usize,
    pub modulus: Vec<u32>,
    pub primitive: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unverified_primitive: bool,
}

pub enum ModulusChoice {
    Auto,
    Explicit(Vec<u32>),
}

struct Inner {
    spec: FieldSpec,
    group_order: BigUint,
    /// Nonzero coefficients of `x^m - modulus`, i.e. what `x^m` reduces to.
    reduce: Vec<(usize, u32)>,
}

/// A finite field GF(p^m) with a designated primitive element. Cheap to clone
/// and shareable across threads.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p(), self.m())
    }
}

/// `gf_make`: validate parameters, choose the modulus and a primitive element.
pub fn gf_make(p: u64, m: usize, modulus: ModulusChoice) -> Result<Field> {
    Field::new(p, m, modulus)
}

impl Field {
    pub fn new(p: u64, m: usize, modulus: ModulusChoice) -> Result<Field> {
        Self::with_trial_limit(p, m, modulus, DEFAULT_TRIAL_LIMIT)
    }

    pub fn with_trial_limit(
        p: u64,
        m: usize,
        modulus: ModulusChoice,
        trial_limit: u64,
    ) -> Result<Field> {
        let p32 = check_char(p)?;
        if m == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let modulus = match modulus {
            ModulusChoice::Auto => prime_poly::lowest_irreducible(p32, m),
            ModulusChoice::Explicit(f) => {
                check_modulus(&f, p32, m)?;
                f
            }
        };
        let mut field = Field::unchecked(p32, m, modulus, None, false);
        let factors = distinct_prime_factors(&field.0.group_order, trial_limit);
        let (primitive, verified) = match factors {
            Some(factors) => (field.search_primitive(&factors)?, true),
            None => (field.x_or_one(), false),
        };
        Arc::get_mut(&mut field.0).expect("fresh field").spec.primitive = primitive;
        Arc::get_mut(&mut field.0).expect("fresh field").spec.primitive_verified = verified;
        Ok(field)
    }

    /// Rebuild a field from its serialized form, re-validating every claim.
    pub fn from_json(j: &FieldSpecJson) -> Result<Field> {
        let p = check_char(j.p as u64)?;
        if j.m == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        check_modulus(&j.modulus, p, j.m)?;
        let field = Field::unchecked(p, j.m, j.modulus.clone(), None, false);
        let alpha = field.parse_hex(&j.primitive)?;
        let verified = match distinct_prime_factors(&field.0.group_order, DEFAULT_TRIAL_LIMIT) {
            Some(factors) => {
                if !field.has_full_order(&alpha, &factors) {
                    return Err(Error::NotPrimitive(j.primitive.clone()));
                }
                true
            }
            None => {
                if alpha.is_zero() {
                    return Err(Error::NotPrimitive(j.primitive.clone()));
                }
                false
            }
        };
        Ok(Field::unchecked(p, j.m, j.modulus.clone(), Some(alpha), verified))
    }

    pub fn to_json(&self) -> FieldSpecJson {
        let s = &self.0.spec;
        FieldSpecJson {
            p: s.p,
            m: s.m,
            modulus: s.modulus.clone(),
            primitive: s.primitive.to_hex(s.p),
            unverified_primitive: !s.primitive_verified,
        }
    }

    fn unchecked(
        p: u32,
        m: usize,
        modulus: Vec<u32>,
        primitive: Option<FieldElement>,
        verified: bool,
    ) -> Field {
        let reduce = modulus[..m]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, (p - c) % p))
            .collect();
        let group_order = BigUint::from(p).pow(m as u32) - BigUint::one();
        let primitive = primitive.unwrap_or_else(|| FieldElement::from_coeffs(m, &[1]));
        Field(Arc::new(Inner {
            spec: FieldSpec {
                p,
                m,
                modulus,
                primitive,
                primitive_verified: verified,
            },
            group_order,
            reduce,
        }))
    }

    fn x_or_one(&self) -> FieldElement {
        if self.m() == 1 {
            self.one()
        } else {
            FieldElement::from_coeffs(self.m(), &[0, 1])
        }
    }

    fn has_full_order(&self, a: &FieldElement, factors: &[BigUint]) -> bool {
        if a.is_zero() {
            return false;
        }
        factors
            .iter()
            .all(|r| !self.pow(a, &(&self.0.group_order / r)).is_one())
    }

    fn search_primitive(&self, factors: &[BigUint]) -> Result<FieldElement> {
        let x = self.x_or_one();
        if self.m() > 1 && self.has_full_order(&x, factors) {
            return Ok(x);
        }
        const ATTEMPTS: u64 = 100_000;
        let limit = self.0.group_order.to_u64().unwrap_or(u64::MAX).min(ATTEMPTS);
        for idx in 1..=limit {
            let a = self.from_index(idx);
            if self.has_full_order(&a, factors) {
                return Ok(a);
            }
        }
        Err(Error::NoPrimitiveFound)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u32 {
        self.0.spec.p
    }

    pub fn m(&self) -> usize {
        self.0.spec.m
    }

    /// Field size as an arbitrary-precision integer.
    pub fn order(&self) -> BigUint {
        &self.0.group_order + 1u32
    }

    /// Field size when it fits a machine word.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn primitive(&self) -> FieldElement {
        self.0.spec.primitive.clone()
    }

    pub fn primitive_verified(&self) -> bool {
        self.0.spec.primitive_verified
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::from_coeffs(self.m(), &[])
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::from_coeffs(self.m(), &[1])
    }

    /// Embed an integer of the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let c = v.rem_euclid(self.p() as i64) as u32;
        FieldElement::from_coeffs(self.m(), &[c])
    }

    /// Element whose packed base-p value is `idx` (requires `idx < q`).
    pub fn from_index(&self, mut idx: u64) -> FieldElement {
        let p = self.p() as u64;
        let mut e = self.zero();
        for c in e.coeffs.iter_mut() {
            *c = (idx % p) as u32;
            idx /= p;
        }
        debug_assert_eq!(idx, 0, "index exceeds field size");
        e
    }

    pub fn to_index(&self, a: &FieldElement) -> u64 {
        let p = self.p() as u64;
        a.coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    /// All elements in index order; only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let q = self.order_u64().expect("field too large to enumerate");
        (0..q).map(move |i| self.from_index(i))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let p = self.p();
        let mut e = self.zero();
        for c in e.coeffs.iter_mut() {
            *c = rng.gen_range(0..p);
        }
        e
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let e = self.random(rng);
            if !e.is_zero() {
                return e;
            }
        }
    }

    pub fn to_hex(&self, a: &FieldElement) -> String {
        a.to_hex(self.p())
    }

    pub fn parse_hex(&self, s: &str) -> Result<FieldElement> {
        let t = s.trim();
        let t = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        let mut v = BigUint::parse_bytes(t.as_bytes(), 16)
            .ok_or_else(|| Error::parse(s, "not a hex field element"))?;
        if v > self.0.group_order {
            return Err(Error::parse(s, "value exceeds field size"));
        }
        let mut e = self.zero();
        let p = BigUint::from(self.p());
        for c in e.coeffs.iter_mut() {
            let (q, r) = v.div_rem(&p);
            *c = r.to_u32().expect("digit below p");
            v = q;
        }
        Ok(e)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p();
        let mut out = a.clone();
        if p == 2 {
            for (o, &y) in out.coeffs.iter_mut().zip(b.coeffs.iter()) {
                *o ^= y;
            }
        } else {
            for (o, &y) in out.coeffs.iter_mut().zip(b.coeffs.iter()) {
                *o = add_mod(*o, y, p);
            }
        }
        out
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p();
        let mut out = a.clone();
        for (o, &y) in out.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *o = sub_mod(*o, y, p);
        }
        out
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p();
        let m = self.m();
        if m == 1 {
            return FieldElement::from_coeffs(1, &[mul_mod(a.coeffs[0], b.coeffs[0], p)]);
        }
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let mut prod: SmallVec<[u32; 8]> = SmallVec::from_elem(0, 2 * m - 1);
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            if p == 2 {
                for (j, &y) in b.coeffs.iter().enumerate() {
                    prod[i + j] ^= y;
                }
            } else {
                for (j, &y) in b.coeffs.iter().enumerate() {
                    if y != 0 {
                        prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
                    }
                }
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for &(i, r) in &self.0.reduce {
                let t = d - m + i;
                prod[t] = if p == 2 {
                    prod[t] ^ c
                } else {
                    add_mod(prod[t], mul_mod(c, r, p), p)
                };
            }
        }
        FieldElement::from_coeffs(m, &prod[..m])
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.p();
        if self.m() == 1 {
            return Ok(FieldElement::from_coeffs(1, &[prime_poly::inv_mod(a.coeffs[0], p)]));
        }
        let inv = prime_poly::inv_mod_poly(&a.coeffs, &self.0.spec.modulus, p)
            .ok_or(Error::DivisionByZero)?;
        Ok(FieldElement::from_coeffs(self.m(), &inv))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^e` for an arbitrary-precision exponent; `0^0 = 1`.
    pub fn pow(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        if e.is_zero() {
            return self.one();
        }
        if a.is_zero() {
            return self.zero();
        }
        let e = e % &self.0.group_order;
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn pow_u64(&self, a: &FieldElement, e: u64) -> FieldElement {
        self.pow(a, &BigUint::from(e))
    }

    /// `α^e` for the designated primitive element.
    pub fn alpha_pow(&self, e: &BigUint) -> FieldElement {
        self.pow(&self.0.spec.primitive, e)
    }
}

fn check_char(p: u64) -> Result<u32> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    u32::try_from(p)
        .ok()
        .filter(|&p| p < (1 << 31))
        .ok_or_else(|| Error::InvalidField(format!("characteristic {p} exceeds 2^31")))
}

fn check_modulus(f: &[u32], p: u32, m: usize) -> Result<()> {
    if f.len() != m + 1 || f[m] != 1 {
        return Err(Error::InvalidField(format!(
            "modulus must be monic of degree {m} ({} coefficients given)",
            f.len()
        )));
    }
    if f.iter().any(|&c| c >= p) {
        return Err(Error::InvalidField("modulus coefficient not reduced mod p".into()));
    }
    if !prime_poly::is_irreducible(f, p) {
        return Err(Error::Reducible { p: p as u64 });
    }
    Ok(())
}
