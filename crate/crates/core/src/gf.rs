//! Arithmetic in GF(2^t) for 1 <= t <= 16.
//!
//! Elements are encoded as integers whose bits are the coefficients of the
//! polynomial basis of the field's irreducible polynomial. The polynomial is
//! the smallest irreducible one of degree `t` when read as an integer.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A field element in polynomial-basis encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Add for Elem {
    type Output = Elem;
    #[inline]
    fn add(self, rhs: Elem) -> Elem {
        Elem(self.0 ^ rhs.0)
    }
}

impl AddAssign for Elem {
    #[inline]
    fn add_assign(&mut self, rhs: Elem) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    t: u32,
    q: u32,
    irred: u32,
    generator: u32,
    /// exp[i] = g^i for i in 0..2(q-1), doubled so products never need a modulo.
    exp: Vec<u16>,
    /// log[x] for x != 0; log[0] unused.
    log: Vec<u16>,
    /// Bit i is tr(x^i); the trace is the parity of `x & trace_mask`.
    trace_mask: u32,
}

/// An immutable GF(2^t) context. Cloning is cheap.
#[derive(Clone)]
pub struct FieldCtx(Arc<Tables>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; irred={:#b})", self.0.t, self.0.irred)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.t == other.0.t && self.0.irred == other.0.irred
    }
}

impl Eq for FieldCtx {}

/// Carry-less multiplication reduced modulo `irred` (degree `t`).
fn slow_mul(mut a: u32, mut b: u32, t: u32, irred: u32) -> u32 {
    let mut acc = 0u32;
    let top = 1u32 << t;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= irred;
        }
    }
    acc
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn is_irreducible(p: u32) -> bool {
    let d = poly_degree(p);
    if d <= 1 {
        return d == 1;
    }
    // Trial division by every polynomial of degree 1..=d/2.
    for div in 2u32..(1u32 << (d / 2 + 1)) {
        if poly_rem(p, div) == 0 {
            return false;
        }
    }
    true
}

/// Smallest irreducible polynomial of degree `t` by integer encoding.
pub fn smallest_irreducible(t: u32) -> u32 {
    (1u32 << t..1u32 << (t + 1)).find(|&p| is_irreducible(p)).expect("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    pub fn new(t: u32) -> Result<FieldCtx> {
        if !(1..=16).contains(&t) {
            return Err(Error::FieldExponent(t));
        }
        let irred = smallest_irreducible(t);
        let q = 1u32 << t;
        let order = q - 1;
        // Smallest element generating the multiplicative group.
        let generator = (1..q)
            .find(|&g| {
                let mut x = 1u32;
                for i in 1..=order {
                    x = slow_mul(x, g, t, irred);
                    if x == 1 {
                        return i == order;
                    }
                }
                false
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u16; 2 * order as usize];
        let mut log = vec![0u16; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x as u16;
            exp[(i + order) as usize] = x as u16;
            log[x as usize] = i as u16;
            x = slow_mul(x, generator, t, irred);
        }
        let mut trace_mask = 0u32;
        for i in 0..t {
            let mut y = 1u32 << i;
            let mut acc = 0u32;
            for _ in 0..t {
                acc ^= y;
                y = slow_mul(y, y, t, irred);
            }
            debug_assert!(acc <= 1);
            trace_mask |= acc << i;
        }
        Ok(FieldCtx(Arc::new(Tables { t, q, irred, generator, exp, log, trace_mask })))
    }

    #[inline]
    pub fn t(&self) -> u32 {
        self.0.t
    }

    /// Field order q = 2^t.
    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn irred_bits(&self) -> u32 {
        self.0.irred
    }

    /// The smallest primitive element, used as the base of the log tables.
    pub fn generator(&self) -> Elem {
        Elem(self.0.generator)
    }

    /// Checked conversion of an integer encoding.
    pub fn elem(&self, v: u32) -> Result<Elem> {
        if v < self.0.q {
            Ok(Elem(v))
        } else {
            Err(Error::Invalid(format!("{v} is not an element of GF({})", self.0.q)))
        }
    }

    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.0.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let tb = &*self.0;
        let i = tb.log[a.0 as usize] as usize + tb.log[b.0 as usize] as usize;
        Elem(tb.exp[i] as u32)
    }

    #[inline]
    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::InverseOfZero);
        }
        let tb = &*self.0;
        let order = (tb.q - 1) as usize;
        let l = tb.log[a.0 as usize] as usize;
        Ok(Elem(tb.exp[(order - l) % order] as u32))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e with the convention 0^0 = 1.
    #[inline]
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let tb = &*self.0;
        let order = (tb.q - 1) as u64;
        let l = tb.log[a.0 as usize] as u64;
        Elem(tb.exp[((l * (e % order)) % order) as usize] as u32)
    }

    /// Absolute trace to GF(2).
    #[inline]
    pub fn trace(&self, x: Elem) -> u8 {
        ((x.0 & self.0.trace_mask).count_ones() & 1) as u8
    }

    /// Trace computed from its definition, sum of x^(2^i).
    pub fn trace_by_frobenius(&self, x: Elem) -> u8 {
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.t() {
            acc += y;
            y = self.square(y);
        }
        acc.0 as u8
    }

    #[inline]
    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| acc + self.mul(x, y))
    }

    /// The subfield of order `n`: all x with x^n = x, sorted by encoding.
    pub fn subfield_elements(&self, n: u64) -> Result<Vec<Elem>> {
        let t = self.t();
        let bad = Error::NotSubfield { n, t };
        if n < 2 || !n.is_power_of_two() {
            return Err(bad);
        }
        let s = n.trailing_zeros();
        if !t.is_multiple_of(s) {
            return Err(bad);
        }
        Ok(self.elements().filter(|&x| self.pow(x, n) == x).collect())
    }

    /// Deterministic self-dual basis: the lexicographically first sorted
    /// tuple (α_1 < ... < α_t) with tr(α_i α_j) = δ_ij.
    pub fn self_dual_basis(&self) -> SelfDualBasis {
        let mut chosen = Vec::with_capacity(self.t() as usize);
        let found = self.sdb_search(&mut chosen, 1);
        assert!(found, "self-dual bases exist in characteristic 2");
        SelfDualBasis { elems: chosen }
    }

    fn sdb_search(&self, chosen: &mut Vec<Elem>, start: u32) -> bool {
        let t = self.t() as usize;
        if chosen.len() == t {
            return true;
        }
        let need = (t - chosen.len()) as u32;
        for x in start..=self.q() - need {
            let x = Elem(x);
            if self.trace(self.square(x)) != 1 {
                continue;
            }
            if chosen.iter().any(|&c| self.trace(self.mul(c, x)) != 0) {
                continue;
            }
            chosen.push(x);
            if self.sdb_search(chosen, x.0 + 1) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

impl Serialize for FieldCtx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldRepr { t: self.t(), irred_bits: self.irred_bits() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldCtx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldRepr::deserialize(d)?;
        let ctx = FieldCtx::new(repr.t).map_err(serde::de::Error::custom)?;
        if ctx.irred_bits() != repr.irred_bits {
            return Err(serde::de::Error::custom(format!(
                "unsupported irreducible polynomial {:#b} for t = {}",
                repr.irred_bits, repr.t
            )));
        }
        Ok(ctx)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    t: u32,
    irred_bits: u32,
}

/// A basis α_1..α_t of GF(2^t) over GF(2) with tr(α_i α_j) = δ_ij.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfDualBasis {
    pub elems: Vec<Elem>,
}

impl SelfDualBasis {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Checks all t^2 trace conditions.
    pub fn is_self_dual(&self, ctx: &FieldCtx) -> bool {
        self.elems.len() == ctx.t() as usize
            && self.elems.iter().enumerate().all(|(i, &a)| {
                self.elems.iter().enumerate().all(|(j, &b)| ctx.trace(ctx.mul(a, b)) == u8::from(i == j))
            })
    }

    /// Coordinates s_i = tr(x α_i).
    pub fn decomp(&self, ctx: &FieldCtx, x: Elem) -> Vec<u8> {
        self.elems.iter().map(|&a| ctx.trace(ctx.mul(x, a))).collect()
    }

    /// Writes the coordinates of `x` as GF(2) elements into `out`.
    pub fn decomp_into(&self, ctx: &FieldCtx, x: Elem, out: &mut [Elem]) {
        for (o, &a) in out.iter_mut().zip(&self.elems) {
            *o = Elem(ctx.trace(ctx.mul(x, a)) as u32);
        }
    }

    /// Σ s_i α_i.
    pub fn recomp(&self, bits: &[u8]) -> Elem {
        bits.iter().zip(&self.elems).fold(Elem::ZERO, |acc, (&b, &a)| if b & 1 == 1 { acc + a } else { acc })
    }

    /// `recomp` over GF(2)-valued elements.
    pub fn recomp_elems(&self, bits: &[Elem]) -> Elem {
        bits.iter().zip(&self.elems).fold(Elem::ZERO, |acc, (&b, &a)| if b.0 & 1 == 1 { acc + a } else { acc })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducible_choices() {
        assert_eq!(FieldCtx::new(1).unwrap().irred_bits(), 0b10);
        assert_eq!(FieldCtx::new(2).unwrap().irred_bits(), 0b111);
        assert_eq!(FieldCtx::new(4).unwrap().irred_bits(), 0b10011);
        assert_eq!(FieldCtx::new(8).unwrap().irred_bits(), 0x11b);
        assert!(FieldCtx::new(0).is_err());
        assert!(FieldCtx::new(17).is_err());
    }

    #[test]
    fn gf4_arithmetic() {
        let f = FieldCtx::new(2).unwrap();
        assert_eq!(f.mul(Elem(2), Elem(2)), Elem(3));
        assert_eq!(f.mul(Elem(2), Elem(3)), Elem(1));
        assert_eq!(f.trace(Elem(1)), 0);
        assert_eq!(f.trace(Elem(2)), 1);
        assert_eq!(f.inv(Elem(2)).unwrap(), Elem(3));
        assert_eq!(f.inv(Elem(0)), Err(Error::InverseOfZero));
    }

    #[test]
    fn mul_matches_carryless_reference() {
        for t in 1..=8 {
            let f = FieldCtx::new(t).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).0, slow_mul(a.0, b.0, t, f.irred_bits()));
                }
            }
        }
    }

    #[test]
    fn gf2_field() {
        let f = FieldCtx::new(1).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.mul(Elem::ONE, Elem::ONE), Elem::ONE);
        assert_eq!(f.trace(Elem::ONE), 1);
        assert_eq!(f.self_dual_basis().elems, vec![Elem::ONE]);
    }

    #[test]
    fn subfields() {
        let f = FieldCtx::new(4).unwrap();
        let k = f.subfield_elements(4).unwrap();
        assert_eq!(k.len(), 4);
        for &a in &k {
            for &b in &k {
                assert!(k.contains(&(a + b)));
                assert!(k.contains(&f.mul(a, b)));
            }
        }
        assert_eq!(f.subfield_elements(2).unwrap(), vec![Elem(0), Elem(1)]);
        assert!(f.subfield_elements(8).is_err());
        assert!(f.subfield_elements(6).is_err());
    }

    #[test]
    fn gf4_basis_and_decomp() {
        let f = FieldCtx::new(2).unwrap();
        let b = f.self_dual_basis();
        assert_eq!(b.elems, vec![Elem(2), Elem(3)]);
        assert_eq!(b.decomp(&f, Elem(2)), vec![1, 0]);
        assert_eq!(b.decomp(&f, Elem(1)), vec![1, 1]);
        assert_eq!(b.decomp(&f, Elem(0)), vec![0, 0]);
    }

    #[test]
    fn self_dual_bases_up_to_16() {
        for t in 1..=16 {
            let f = FieldCtx::new(t).unwrap();
            let b = f.self_dual_basis();
            assert!(b.is_self_dual(&f), "t = {t}");
        }
    }

    #[test]
    fn pow_and_inverse() {
        let f = FieldCtx::new(6).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
            assert_eq!(f.pow(a, 63), Elem::ONE);
            assert_eq!(f.pow(a, 3), f.mul(a, f.mul(a, a)));
        }
        assert_eq!(f.pow(Elem::ZERO, 0), Elem::ONE);
        assert_eq!(f.pow(Elem::ZERO, 5), Elem::ZERO);
    }

    #[test]
    fn serde_round_trip() {
        let f = FieldCtx::new(5).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"t":5,"irred_bits":37}"#);
        let g: FieldCtx = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<FieldCtx>(r#"{"t":5,"irred_bits":41}"#).is_err());
    }
}
