//! Exact arithmetic in the truncated local rings `Z/p^l` and `F_p[u]/(u^l)`.
//!
//! Both families store an element as a single canonical `u64` in `[0, p^l)`.
//! For `Z/p^l` this is the usual residue. For `F_p[u]/(u^l)` it is the base-`p`
//! encoding `c_0 + c_1 p + ... + c_{l-1} p^{l-1}` of the coefficient vector,
//! so that the uniformizer `u` is encoded as `p`, reduction to a shorter length
//! is `value mod p^m` and division by `u^v` is `value / p^v` in both families.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps every product of two representatives inside `u128`
/// and every sum inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `Z/p^l`, mixed characteristic.
    #[serde(rename = "int")]
    IntTrunc,
    /// `F_p[u]/(u^l)`, equal characteristic.
    #[serde(rename = "series")]
    SeriesTrunc,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    p: u64,
    ell: u32,
    family: Family,
}

/// The ambient ring `O_l`: an odd prime `p`, a length `l >= 1` and a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct RingSpec {
    p: u64,
    ell: u32,
    family: Family,
    modulus: u64,
}

impl TryFrom<RawSpec> for RingSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        RingSpec::new(raw.p, raw.ell, raw.family)
    }
}

impl From<RingSpec> for RawSpec {
    fn from(spec: RingSpec) -> Self {
        RawSpec { p: spec.p, ell: spec.ell, family: spec.family }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl RingSpec {
    pub fn new(p: u64, ell: u32, family: Family) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidSpec(format!("p = {p} must be an odd prime")));
        }
        if ell == 0 {
            return Err(Error::InvalidSpec("length must be at least 1".into()));
        }
        let mut modulus = 1u64;
        for _ in 0..ell {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or_else(|| Error::InvalidSpec(format!("{p}^{ell} exceeds 2^62")))?;
        }
        Ok(RingSpec { p, ell, family, modulus })
    }

    /// Shorthand for `Z/p^l`.
    pub fn int(p: u64, ell: u32) -> Result<Self> {
        Self::new(p, ell, Family::IntTrunc)
    }

    /// Shorthand for `F_p[u]/(u^l)`.
    pub fn series(p: u64, ell: u32) -> Result<Self> {
        Self::new(p, ell, Family::SeriesTrunc)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of elements, `p^l`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The same family and prime at another length.
    pub fn with_ell(&self, ell: u32) -> Result<Self> {
        Self::new(self.p, ell, self.family)
    }

    /// The residue field `k = O_1`.
    pub fn residue_field(&self) -> Self {
        RingSpec { p: self.p, ell: 1, family: self.family, modulus: self.p }
    }

    pub(crate) fn check_target(&self, target: u32) -> Result<()> {
        if target == 0 || target > self.ell {
            return Err(Error::BadTarget { from: self.ell, to: target });
        }
        Ok(())
    }

    /// `p^v` as a `u64`; `v` must not exceed `l`.
    pub(crate) fn p_pow(&self, v: u32) -> u64 {
        self.p.pow(v)
    }

    // Arithmetic on canonical representatives. Callers guarantee inputs are in `[0, p^l)`.

    pub fn add(&self, a: u64, b: u64) -> u64 {
        match self.family {
            Family::IntTrunc => {
                let s = a + b;
                if s >= self.modulus {
                    s - self.modulus
                } else {
                    s
                }
            }
            Family::SeriesTrunc => self.digitwise(a, b, |x, y| (x + y) % self.p),
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        match self.family {
            Family::IntTrunc => {
                if a == 0 {
                    0
                } else {
                    self.modulus - a
                }
            }
            Family::SeriesTrunc => self.digitwise(a, 0, |x, _| (self.p - x) % self.p),
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        match self.family {
            Family::IntTrunc => {
                if a >= b {
                    a - b
                } else {
                    a + (self.modulus - b)
                }
            }
            Family::SeriesTrunc => self.digitwise(a, b, |x, y| (x + self.p - y) % self.p),
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match self.family {
            Family::IntTrunc => ((a as u128 * b as u128) % self.modulus as u128) as u64,
            Family::SeriesTrunc => {
                if self.ell == 1 {
                    return ((a as u128 * b as u128) % self.p as u128) as u64;
                }
                // l <= 39 since p >= 3 and p^l <= 2^62.
                let l = self.ell as usize;
                let (mut x, mut y) = ([0u64; 64], [0u64; 64]);
                let (mut u, mut v) = (a, b);
                for i in 0..l {
                    x[i] = u % self.p;
                    y[i] = v % self.p;
                    u /= self.p;
                    v /= self.p;
                }
                let mut out = 0u64;
                for k in (0..l).rev() {
                    let mut c = 0u64;
                    for i in 0..=k {
                        c += x[i] * y[k - i];
                    }
                    out = out * self.p + c % self.p;
                }
                out
            }
        }
    }

    /// Image of an integer under the structure map `Z -> O_l`.
    pub fn from_int(&self, x: i64) -> u64 {
        match self.family {
            Family::IntTrunc => (x as i128).rem_euclid(self.modulus as i128) as u64,
            Family::SeriesTrunc => (x as i128).rem_euclid(self.p as i128) as u64,
        }
    }

    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    /// pi-adic valuation, with `valuation(0) = l`.
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.ell;
        }
        let mut v = 0;
        let mut x = a;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if !self.is_unit(a) {
            return Err(Error::NonUnit);
        }
        match self.family {
            Family::IntTrunc => Ok(inv_mod(a, self.modulus)),
            Family::SeriesTrunc => {
                // Newton iteration y <- y(2 - ay) doubles the precision each round.
                let mut y = inv_mod(a % self.p, self.p);
                let two = self.from_int(2);
                let mut precision = 1;
                while precision < self.ell {
                    y = self.mul(y, self.sub(two, self.mul(a, y)));
                    precision *= 2;
                }
                Ok(y)
            }
        }
    }

    /// Base-`p` digits, lowest first, always `l` of them.
    pub fn digits(&self, a: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.ell as usize);
        let mut x = a;
        for _ in 0..self.ell {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    /// Inverse of [`RingSpec::digits`]; digits must be below `p`.
    pub fn encode(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.p + d)
    }

    fn digitwise(&self, a: u64, b: u64, op: impl Fn(u64, u64) -> u64) -> u64 {
        let (mut x, mut y) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.ell {
            out += op(x % self.p, y % self.p) * place;
            x /= self.p;
            y /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::IntTrunc => write!(f, "Z/{}^{}", self.p, self.ell),
            Family::SeriesTrunc => write!(f, "F_{}[u]/(u^{})", self.p, self.ell),
        }
    }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// An element of `O_l` in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    spec: RingSpec,
    value: u64,
}

impl RingElement {
    pub fn new(spec: RingSpec, value: u64) -> Result<Self> {
        if value >= spec.modulus {
            return Err(Error::NotCanonical { value, modulus: spec.modulus });
        }
        Ok(RingElement { spec, value })
    }

    pub(crate) fn new_unchecked(spec: RingSpec, value: u64) -> Self {
        debug_assert!(value < spec.modulus);
        RingElement { spec, value }
    }

    pub fn from_int(spec: RingSpec, x: i64) -> Self {
        RingElement { spec, value: spec.from_int(x) }
    }

    /// Element of `F_p[u]/(u^l)` (or `Z/p^l`) from its base-`p` digits, lowest first.
    pub fn from_digits(spec: RingSpec, digits: &[u64]) -> Result<Self> {
        if digits.len() != spec.ell as usize || digits.iter().any(|&d| d >= spec.p) {
            return Err(Error::Parse(format!("expected {} residues mod {}, got {:?}", spec.ell, spec.p, digits)));
        }
        Ok(RingElement { spec, value: spec.encode(digits) })
    }

    pub fn zero(spec: RingSpec) -> Self {
        RingElement { spec, value: 0 }
    }

    pub fn one(spec: RingSpec) -> Self {
        RingElement { spec, value: 1 }
    }

    /// The uniformizer `pi` (`p` or `u`).
    pub fn pi(spec: RingSpec) -> Self {
        RingElement { spec, value: spec.p % spec.modulus }
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    /// Canonical representative.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn digits(&self) -> Vec<u64> {
        self.spec.digits(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same(&self, other: &Self) -> Result<RingSpec> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(self.spec)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let s = self.same(other)?;
        Ok(RingElement { spec: s, value: s.add(self.value, other.value) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let s = self.same(other)?;
        Ok(RingElement { spec: s, value: s.sub(self.value, other.value) })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let s = self.same(other)?;
        Ok(RingElement { spec: s, value: s.mul(self.value, other.value) })
    }

    pub fn neg(&self) -> Self {
        RingElement { spec: self.spec, value: self.spec.neg(self.value) }
    }

    pub fn is_unit(&self) -> bool {
        self.spec.is_unit(self.value)
    }

    pub fn invert_unit(&self) -> Result<Self> {
        Ok(RingElement { spec: self.spec, value: self.spec.inv(self.value)? })
    }

    pub fn valuation(&self) -> u32 {
        self.spec.valuation(self.value)
    }

    /// The floor quotient `y` with `pi^v * y = self`.
    ///
    /// `y` is only determined modulo `pi^(l-v)`; the representative returned is
    /// `value / p^v`, i.e. the high digits shifted down with zeros on top.
    pub fn divide_by_pi_power(&self, v: u32) -> Result<Self> {
        let valuation = self.valuation();
        if valuation < v {
            return Err(Error::InsufficientValuation { valuation, requested: v });
        }
        Ok(RingElement { spec: self.spec, value: self.value / self.spec.p_pow(v) })
    }

    /// Image under the reduction map `O_l -> O_target`.
    pub fn reduce(&self, target: u32) -> Result<Self> {
        self.spec.check_target(target)?;
        let spec = self.spec.with_ell(target)?;
        Ok(RingElement { spec, value: self.value % spec.modulus })
    }

    /// Canonical lift to a longer ring: same representative.
    pub fn lift_to(&self, spec: RingSpec) -> Result<Self> {
        if spec.p != self.spec.p || spec.family != self.spec.family || spec.ell < self.spec.ell {
            return Err(Error::SpecMismatch);
        }
        Ok(RingElement { spec, value: self.value })
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spec.family {
            Family::IntTrunc => write!(f, "{}", self.value),
            Family::SeriesTrunc => write!(f, "{:?}", self.digits()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(spec: RingSpec, v: u64) -> RingElement {
        RingElement::new(spec, v).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(RingSpec::int(2, 3).is_err());
        assert!(RingSpec::int(9, 1).is_err());
        assert!(RingSpec::int(3, 0).is_err());
        assert!(RingSpec::int(3, 60).is_err());
        assert!(RingSpec::series(7, 4).is_ok());
    }

    #[test]
    fn int_arithmetic_examples() {
        let s = RingSpec::int(3, 3).unwrap();
        assert_eq!(el(s, 20).add(&el(s, 10)).unwrap().value(), 3);
        assert_eq!(el(s, 5).mul(&el(s, 11)).unwrap().value(), 1);
        let s5 = RingSpec::int(5, 2).unwrap();
        assert_eq!(el(s5, 0).sub(&el(s5, 1)).unwrap().value(), 24);
        assert_eq!(el(s, 1).add(&el(s5, 1)), Err(Error::SpecMismatch));
    }

    #[test]
    fn units_and_inverses() {
        let s = RingSpec::int(3, 2).unwrap();
        assert!(el(s, 5).is_unit());
        assert!(!el(s, 6).is_unit());
        assert!(!RingElement::zero(RingSpec::int(5, 3).unwrap()).is_unit());

        let s27 = RingSpec::int(3, 3).unwrap();
        assert_eq!(el(s27, 5).invert_unit().unwrap().value(), 11);
        let s25 = RingSpec::int(5, 2).unwrap();
        assert_eq!(el(s25, 2).invert_unit().unwrap().value(), 13);
        let f3 = RingSpec::int(3, 1).unwrap();
        assert_eq!(el(f3, 2).invert_unit().unwrap().value(), 2);
        assert_eq!(el(s27, 9).invert_unit(), Err(Error::NonUnit));
    }

    #[test]
    fn valuation_and_division() {
        let s = RingSpec::int(3, 3).unwrap();
        assert_eq!(el(s, 18).valuation(), 2);
        assert_eq!(el(s, 0).valuation(), 3);
        assert_eq!(el(RingSpec::int(5, 2).unwrap(), 7).valuation(), 0);

        assert_eq!(el(s, 18).divide_by_pi_power(2).unwrap().value(), 2);
        let s25 = RingSpec::int(5, 2).unwrap();
        assert_eq!(el(s25, 0).divide_by_pi_power(1).unwrap().value(), 0);
        assert!(matches!(
            el(s, 5).divide_by_pi_power(1),
            Err(Error::InsufficientValuation { valuation: 0, requested: 1 })
        ));
    }

    #[test]
    fn reduction_examples() {
        let s = RingSpec::int(3, 3).unwrap();
        assert_eq!(el(s, 25).reduce(2).unwrap().value(), 7);
        let s25 = RingSpec::int(5, 2).unwrap();
        assert_eq!(el(s25, 24).reduce(1).unwrap().value(), 4);
        assert_eq!(el(s, 25).reduce(3).unwrap(), el(s, 25));
        assert!(matches!(el(s, 25).reduce(4), Err(Error::BadTarget { .. })));
        assert!(matches!(el(s, 25).reduce(0), Err(Error::BadTarget { .. })));
    }

    #[test]
    fn series_arithmetic_is_truncated_polynomial_arithmetic() {
        let s = RingSpec::series(3, 3).unwrap();
        // (1 + u)(1 + 2u) = 1 + 3u + 2u^2 = 1 + 2u^2 over F_3
        let a = RingElement::from_digits(s, &[1, 1, 0]).unwrap();
        let b = RingElement::from_digits(s, &[1, 2, 0]).unwrap();
        assert_eq!(a.mul(&b).unwrap().digits(), vec![1, 0, 2]);
        // u^2 * u = 0
        let u = RingElement::pi(s);
        let u2 = u.mul(&u).unwrap();
        assert_eq!(u2.digits(), vec![0, 0, 1]);
        assert!(u2.mul(&u).unwrap().is_zero());
        // no carries: (2 + 2u) + (1 + 2u) = 0 + u
        let c = RingElement::from_digits(s, &[2, 2, 0]).unwrap();
        let d = RingElement::from_digits(s, &[1, 2, 0]).unwrap();
        assert_eq!(c.add(&d).unwrap().digits(), vec![0, 1, 0]);
        // 3 maps to zero in characteristic 3
        assert!(RingElement::from_int(s, 3).is_zero());
        assert_eq!(RingElement::from_int(s, -1).digits(), vec![2, 0, 0]);
    }

    #[test]
    fn series_inverse() {
        let s = RingSpec::series(5, 4).unwrap();
        let a = RingElement::from_digits(s, &[2, 3, 0, 4]).unwrap();
        let inv = a.invert_unit().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RingElement::one(s));
    }

    fn any_spec() -> impl Strategy<Value = RingSpec> {
        (prop::sample::select(vec![3u64, 5, 7]), 1u32..6, any::<bool>()).prop_map(|(p, l, series)| {
            if series {
                RingSpec::series(p, l).unwrap()
            } else {
                RingSpec::int(p, l).unwrap()
            }
        })
    }

    fn spec_and_values() -> impl Strategy<Value = (RingSpec, u64, u64, u32)> {
        any_spec().prop_flat_map(|s| (Just(s), 0..s.modulus(), 0..s.modulus(), 1..=s.ell()))
    }

    proptest! {
        #[test]
        fn reduction_is_a_ring_map((s, x, y, m) in spec_and_values()) {
            let (x, y) = (el(s, x), el(s, y));
            let r = |e: RingElement| e.reduce(m).unwrap();
            prop_assert_eq!(r(x.mul(&y).unwrap()), r(x).mul(&r(y)).unwrap());
            prop_assert_eq!(r(x.add(&y).unwrap()), r(x).add(&r(y)).unwrap());
            prop_assert_eq!(r(x.sub(&y).unwrap()), r(x).sub(&r(y)).unwrap());
        }

        #[test]
        fn units_detected_in_residue_field((s, x, _y, _m) in spec_and_values()) {
            let x = el(s, x);
            prop_assert_eq!(x.is_unit(), x.reduce(1).unwrap().is_unit());
            if x.is_unit() {
                prop_assert_eq!(x.mul(&x.invert_unit().unwrap()).unwrap(), RingElement::one(s));
            }
        }

        #[test]
        fn valuation_is_additive((s, x, y, _m) in spec_and_values()) {
            let (x, y) = (el(s, x), el(s, y));
            let expected = (x.valuation() + y.valuation()).min(s.ell());
            prop_assert_eq!(x.mul(&y).unwrap().valuation(), expected);
        }

        #[test]
        fn pi_power_division_round_trip((s, y, _x, v) in spec_and_values()) {
            let v = v - 1;
            let y = el(s, y);
            let mut pv = RingElement::one(s);
            for _ in 0..v {
                pv = pv.mul(&RingElement::pi(s)).unwrap();
            }
            let x = pv.mul(&y).unwrap();
            let q = x.divide_by_pi_power(v).unwrap();
            if v < s.ell() {
                prop_assert_eq!(q.reduce(s.ell() - v).unwrap(), y.reduce(s.ell() - v).unwrap());
            }
            prop_assert_eq!(pv.mul(&q).unwrap(), x);
        }
    }
}
