//! Encodings of the countable carriers used by the constructions.
//!
//! Every relation in this crate is a relation on `ω`; structured carriers
//! (pairs, finite sets, rationals, words, tagged tree symbols) are reached
//! through the bijections below.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

use crate::{Code, ElemSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CarrierError {
    #[error("code does not fit in 64 bits")]
    Overflow,
    #[error("finite-set element {0} is too large for the bit-mask encoding (must be < 64)")]
    ElementTooLarge(Code),
    #[error("rational with zero denominator")]
    ZeroDenominator,
    #[error("{0} is not a dyadic rational strictly between 0 and 1")]
    NotDyadic(Rational),
    #[error("tree is not prefix-closed: {word:?} is a member but its prefix {prefix:?} is not")]
    NotPrefixClosed { word: Vec<u64>, prefix: Vec<u64> },
}

// ---------------------------------------------------------------------------
// Pairing

/// Cantor pairing. Panics if the result does not fit in a `u64`; use
/// [`checked_pair`] when the inputs are not known to be small.
pub fn pair(a: Code, b: Code) -> Code {
    checked_pair(a, b).expect("pair code overflows u64")
}

pub fn checked_pair(a: Code, b: Code) -> Option<Code> {
    let w = a.checked_add(b)?;
    let tri = (w as u128) * (w as u128 + 1) / 2;
    let z = tri + b as u128;
    u64::try_from(z).ok()
}

/// Inverse of [`pair`].
pub fn unpair(z: Code) -> (Code, Code) {
    let z = z as u128;
    let w = ((8 * z + 1).isqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let b = z - t;
    let a = w - b;
    (a as u64, b as u64)
}

// ---------------------------------------------------------------------------
// Finite sets of naturals

/// Characteristic bit mask of a finite set; elements must be below 64.
pub fn finset_mask<'a>(set: impl IntoIterator<Item = &'a Code>) -> Result<u64, CarrierError> {
    let mut mask = 0u64;
    for &x in set {
        if x >= 64 {
            return Err(CarrierError::ElementTooLarge(x));
        }
        mask |= 1 << x;
    }
    Ok(mask)
}

pub fn finset_from_mask(mask: u64) -> ElemSet {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

/// Code of the pair `⟨F, m⟩` with `F` a finite set of naturals.
pub fn encode_finset_pair(set: &ElemSet, m: Code) -> Result<Code, CarrierError> {
    let mask = finset_mask(set)?;
    checked_pair(mask, m).ok_or(CarrierError::Overflow)
}

pub fn decode_finset_pair(code: Code) -> (ElemSet, Code) {
    let (mask, m) = unpair(code);
    (finset_from_mask(mask), m)
}

/// Bit-mask form of [`decode_finset_pair`], for hot loops.
pub fn decode_mask_pair(code: Code) -> (u64, Code) {
    unpair(code)
}

/// Shift encoding of `ω` extended by `stars` fresh symbols: star `i` is
/// coded as `i`, the natural `n` as `n + stars`. With one star this is the
/// usual `* ↦ 0, n ↦ n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarShift {
    pub stars: u64,
}

impl StarShift {
    pub const SINGLE: StarShift = StarShift { stars: 1 };

    pub fn star(self, i: u64) -> Code {
        debug_assert!(i < self.stars);
        i
    }

    pub fn nat(self, n: Code) -> Code {
        n + self.stars
    }

    pub fn is_star(self, code: Code) -> bool {
        code < self.stars
    }

    /// `None` for a star.
    pub fn decode(self, code: Code) -> Option<Code> {
        code.checked_sub(self.stars)
    }
}

// ---------------------------------------------------------------------------
// Rationals

/// An exact rational in lowest terms with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Rational, CarrierError> {
        if den == 0 {
            return Err(CarrierError::ZeroDenominator);
        }
        let negative = (num < 0) != (den < 0);
        let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd(n, d).max(1);
        let (n, d) = (n / g, d / g);
        let n = i64::try_from(n).map_err(|_| CarrierError::Overflow)?;
        Ok(Rational {
            num: if negative { -n } else { n },
            den: d,
        })
    }

    pub fn integer(n: i64) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    /// `(a+c)/(b+d)`; lies strictly between two distinct rationals.
    pub fn mediant(&self, other: &Rational) -> Rational {
        let n = self.num as i128 + other.num as i128;
        let d = self.den as i128 + other.den as i128;
        let g = gcd(n.unsigned_abs() as u64, d as u64).max(1) as i128;
        Rational {
            num: (n / g) as i64,
            den: (d / g) as u64,
        }
    }

    /// Code of this rational in the Stern–Brocot enumeration of `ℚ`:
    /// `0 ↦ 0`, a positive rational with breadth-first Stern–Brocot index
    /// `k ≥ 1` maps to `2k - 1`, its negation to `2k`.
    pub fn to_code(&self) -> Result<Code, CarrierError> {
        if self.num == 0 {
            return Ok(0);
        }
        let k = stern_brocot_index(self.num.unsigned_abs(), self.den)?;
        let code = if self.num > 0 { 2 * k - 1 } else { 2 * k };
        Ok(code)
    }

    pub fn from_code(code: Code) -> Rational {
        if code == 0 {
            return Rational::ZERO;
        }
        let k = code.div_ceil(2);
        let (n, d) = stern_brocot_node(k);
        let n = n as i64;
        Rational {
            num: if code % 2 == 1 { n } else { -n },
            den: d,
        }
    }

    /// Code of a dyadic rational in `(0,1)`: the heap index of its node in
    /// the complete binary tree of midpoints, minus one. `1/2 ↦ 0`,
    /// `1/4 ↦ 1`, `3/4 ↦ 2`, `1/8 ↦ 3`, ...
    pub fn to_dyadic_code(&self) -> Result<Code, CarrierError> {
        let not_dyadic = CarrierError::NotDyadic(*self);
        if self.num <= 0 || self.num as u64 >= self.den || !self.den.is_power_of_two() {
            return Err(not_dyadic);
        }
        // den = 2^(d+1), num odd
        let d = self.den.trailing_zeros() as u64 - 1;
        if d >= 63 {
            return Err(CarrierError::Overflow);
        }
        let j = (self.num as u64 - 1) / 2;
        Ok((1u64 << d) + j - 1)
    }

    pub fn from_dyadic_code(code: Code) -> Rational {
        let h = code + 1;
        let d = 63 - h.leading_zeros() as u64;
        let j = h - (1 << d);
        Rational {
            num: (2 * j + 1) as i64,
            den: 1 << (d + 1),
        }
    }
}

fn stern_brocot_index(mut a: u64, mut b: u64) -> Result<u64, CarrierError> {
    let mut index = 1u64;
    while a != b {
        if index >> 62 != 0 {
            return Err(CarrierError::Overflow);
        }
        if a < b {
            index <<= 1;
            b -= a;
        } else {
            index = (index << 1) | 1;
            a -= b;
        }
    }
    Ok(index)
}

fn stern_brocot_node(k: u64) -> (u64, u64) {
    debug_assert!(k >= 1);
    let (mut ln, mut ld, mut rn, mut rd) = (0u64, 1u64, 1u64, 0u64);
    let bits = 63 - k.leading_zeros();
    for i in (0..bits).rev() {
        let (mn, md) = (ln + rn, ld + rd);
        if k & (1 << i) == 0 {
            rn = mn;
            rd = md;
        } else {
            ln = mn;
            ld = md;
        }
    }
    (ln + rn, ld + rd)
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

/// The strict order of `ℚ`, decided by cross-multiplication.
pub fn rational_less(p: &Rational, q: &Rational) -> bool {
    p < q
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

// ---------------------------------------------------------------------------
// Words over ω

/// Bijection `ω^{<ω} → ω`. Each letter `a` becomes the bit string `0^a 1`;
/// the concatenation is read least-significant-bit first. The empty word is 0.
pub fn encode_word(word: &[u64]) -> Result<Code, CarrierError> {
    let mut code = 0u64;
    let mut pos = 0u64;
    for &a in word {
        pos = pos.checked_add(a).ok_or(CarrierError::Overflow)?;
        if pos >= 64 {
            return Err(CarrierError::Overflow);
        }
        code |= 1 << pos;
        pos += 1;
    }
    Ok(code)
}

pub fn decode_word(mut code: Code) -> Vec<u64> {
    let mut word = Vec::new();
    while code != 0 {
        let a = code.trailing_zeros() as u64;
        word.push(a);
        code >>= a + 1;
    }
    word
}

// ---------------------------------------------------------------------------
// Tagged symbols of the tree spaces

/// Symbols of the tree-parameterized spaces: a word `σ` decorated by a
/// symbol family, some families also indexed by a natural `n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Symbol {
    /// `σ`
    Word(Vec<u64>),
    /// `σ̲`
    Under(Vec<u64>),
    /// `[σ, ∞]`
    Inf(Vec<u64>),
    /// `[σ, ∞*]`
    InfStar(Vec<u64>),
    /// `(n, σ)`
    Point(u64, Vec<u64>),
    /// `(n, σ̲)`
    PointUnder(u64, Vec<u64>),
    /// `(n, σ^±)`
    PointPm(u64, Vec<u64>),
    /// `[n, σ]`
    Ray(u64, Vec<u64>),
    /// `[n, σ̲]`
    RayUnder(u64, Vec<u64>),
}

impl Symbol {
    fn tag(&self) -> u64 {
        match self {
            Symbol::Word(_) => 0,
            Symbol::Under(_) => 1,
            Symbol::Inf(_) => 2,
            Symbol::InfStar(_) => 3,
            Symbol::Point(..) => 4,
            Symbol::PointUnder(..) => 5,
            Symbol::PointPm(..) => 6,
            Symbol::Ray(..) => 7,
            Symbol::RayUnder(..) => 8,
        }
    }

    pub fn word(&self) -> &[u64] {
        match self {
            Symbol::Word(w) | Symbol::Under(w) | Symbol::Inf(w) | Symbol::InfStar(w) => w,
            Symbol::Point(_, w)
            | Symbol::PointUnder(_, w)
            | Symbol::PointPm(_, w)
            | Symbol::Ray(_, w)
            | Symbol::RayUnder(_, w) => w,
        }
    }

    pub fn index(&self) -> Option<u64> {
        match self {
            Symbol::Point(n, _)
            | Symbol::PointUnder(n, _)
            | Symbol::PointPm(n, _)
            | Symbol::Ray(n, _)
            | Symbol::RayUnder(n, _) => Some(*n),
            _ => None,
        }
    }

    pub fn encode(&self) -> Result<Code, CarrierError> {
        let w = encode_word(self.word())?;
        let payload = match self.index() {
            Some(n) => checked_pair(n, w).ok_or(CarrierError::Overflow)?,
            None => w,
        };
        checked_pair(self.tag(), payload).ok_or(CarrierError::Overflow)
    }

    /// `None` when the tag is outside the nine symbol families.
    pub fn decode(code: Code) -> Option<Symbol> {
        let (tag, payload) = unpair(code);
        let indexed = || {
            let (n, w) = unpair(payload);
            (n, decode_word(w))
        };
        Some(match tag {
            0 => Symbol::Word(decode_word(payload)),
            1 => Symbol::Under(decode_word(payload)),
            2 => Symbol::Inf(decode_word(payload)),
            3 => Symbol::InfStar(decode_word(payload)),
            4 => {
                let (n, w) = indexed();
                Symbol::Point(n, w)
            }
            5 => {
                let (n, w) = indexed();
                Symbol::PointUnder(n, w)
            }
            6 => {
                let (n, w) = indexed();
                Symbol::PointPm(n, w)
            }
            7 => {
                let (n, w) = indexed();
                Symbol::Ray(n, w)
            }
            8 => {
                let (n, w) = indexed();
                Symbol::RayUnder(n, w)
            }
            _ => return None,
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        struct W<'a>(&'a [u64]);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_empty() {
                    return f.write_str("ε");
                }
                for (i, a) in self.0.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
        match self {
            Symbol::Word(w) => write!(f, "{}", W(w)),
            Symbol::Under(w) => write!(f, "_{}", W(w)),
            Symbol::Inf(w) => write!(f, "[{},inf]", W(w)),
            Symbol::InfStar(w) => write!(f, "[{},inf*]", W(w)),
            Symbol::Point(n, w) => write!(f, "({n},{})", W(w)),
            Symbol::PointUnder(n, w) => write!(f, "({n},_{})", W(w)),
            Symbol::PointPm(n, w) => write!(f, "({n},{}±)", W(w)),
            Symbol::Ray(n, w) => write!(f, "[{n},{}]", W(w)),
            Symbol::RayUnder(n, w) => write!(f, "[{n},_{}]", W(w)),
        }
    }
}

// ---------------------------------------------------------------------------
// Carrier codes

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CarrierTag {
    Nat,
    Pair,
    FinSetNatPair,
    Rational,
    TaggedSymbol,
    Word,
}

/// A structured carrier element together with its family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CarrierCode {
    Nat(u64),
    Pair(u64, u64),
    FinSetNatPair(ElemSet, u64),
    Rational(Rational),
    TaggedSymbol(Symbol),
    Word(Vec<u64>),
}

impl CarrierCode {
    pub fn tag(&self) -> CarrierTag {
        match self {
            CarrierCode::Nat(_) => CarrierTag::Nat,
            CarrierCode::Pair(..) => CarrierTag::Pair,
            CarrierCode::FinSetNatPair(..) => CarrierTag::FinSetNatPair,
            CarrierCode::Rational(_) => CarrierTag::Rational,
            CarrierCode::TaggedSymbol(_) => CarrierTag::TaggedSymbol,
            CarrierCode::Word(_) => CarrierTag::Word,
        }
    }

    pub fn encode(&self) -> Result<Code, CarrierError> {
        match self {
            CarrierCode::Nat(n) => Ok(*n),
            CarrierCode::Pair(a, b) => checked_pair(*a, *b).ok_or(CarrierError::Overflow),
            CarrierCode::FinSetNatPair(f, m) => encode_finset_pair(f, *m),
            CarrierCode::Rational(q) => q.to_code(),
            CarrierCode::TaggedSymbol(s) => s.encode(),
            CarrierCode::Word(w) => encode_word(w),
        }
    }

    /// Decode within a family. Returns `None` only for tagged symbols whose
    /// tag is out of range; every other family is onto `ω`.
    pub fn decode(tag: CarrierTag, code: Code) -> Option<CarrierCode> {
        Some(match tag {
            CarrierTag::Nat => CarrierCode::Nat(code),
            CarrierTag::Pair => {
                let (a, b) = unpair(code);
                CarrierCode::Pair(a, b)
            }
            CarrierTag::FinSetNatPair => {
                let (f, m) = decode_finset_pair(code);
                CarrierCode::FinSetNatPair(f, m)
            }
            CarrierTag::Rational => CarrierCode::Rational(Rational::from_code(code)),
            CarrierTag::TaggedSymbol => CarrierCode::TaggedSymbol(Symbol::decode(code)?),
            CarrierTag::Word => CarrierCode::Word(decode_word(code)),
        })
    }
}

// ---------------------------------------------------------------------------
// Trees

type Membership = dyn Fn(&[u64]) -> bool + Send + Sync;

/// A decidable set of words, required to be prefix-closed. Closure is
/// checked for every word actually queried; verified answers are cached.
#[derive(Clone)]
pub struct TreePredicate {
    membership: Arc<Membership>,
    description: String,
    cache: Arc<spin::Mutex<BTreeMap<Vec<u64>, bool>>>,
}

impl TreePredicate {
    pub fn new(
        description: impl Into<String>,
        membership: impl Fn(&[u64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        TreePredicate {
            membership: Arc::new(membership),
            description: description.into(),
            cache: Arc::new(spin::Mutex::new(BTreeMap::new())),
        }
    }

    /// `ω^{<ω}`.
    pub fn full() -> Self {
        TreePredicate::new("full", |_| true)
    }

    /// `{ε}`, a well-founded tree.
    pub fn root_only() -> Self {
        TreePredicate::new("root-only", |w| w.is_empty())
    }

    /// The smallest tree containing the given words.
    pub fn generated_by(words: Vec<Vec<u64>>) -> Self {
        TreePredicate::new("generated", move |w| {
            words.iter().any(|g| g.len() >= w.len() && g[..w.len()] == *w)
        })
    }

    /// Words of length at most `depth`.
    pub fn bounded_depth(depth: usize) -> Self {
        TreePredicate::new(alloc::format!("depth<={depth}"), move |w| w.len() <= depth)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn contains(&self, word: &[u64]) -> Result<bool, CarrierError> {
        if let Some(&hit) = self.cache.lock().get(word) {
            return Ok(hit);
        }
        let member = (self.membership)(word);
        if member && !word.is_empty() {
            let parent = &word[..word.len() - 1];
            if !self.contains(parent)? {
                return Err(CarrierError::NotPrefixClosed {
                    word: word.to_vec(),
                    prefix: parent.to_vec(),
                });
            }
        }
        self.cache.lock().insert(word.to_vec(), member);
        Ok(member)
    }
}

impl fmt::Debug for TreePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreePredicate")
            .field("description", &self.description)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn pair_base_and_round_trip() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(unpair(pair(3, 5)), (3, 5));
    }

    #[test]
    fn pair_injective_below_50() {
        let mut seen = alloc::collections::BTreeSet::new();
        for a in 0..50 {
            for b in 0..50 {
                assert!(seen.insert(pair(a, b)));
            }
        }
        assert_eq!(seen.len(), 2500);
    }

    #[test]
    fn pairing_is_a_bijection_below_10k() {
        for z in 0..10_000 {
            let (a, b) = unpair(z);
            assert_eq!(pair(a, b), z);
        }
    }

    #[test]
    fn unpair_handles_large_codes() {
        let z = pair(1 << 31, 12345);
        assert_eq!(unpair(z), (1 << 31, 12345));
        assert!(checked_pair(u64::MAX, 1).is_none());
    }

    #[test]
    fn finset_pair_codes() {
        assert_eq!(encode_finset_pair(&ElemSet::new(), 0).unwrap(), 0);
        let f: ElemSet = [1, 3].into_iter().collect();
        let c = encode_finset_pair(&f, 2).unwrap();
        assert_eq!(decode_finset_pair(c), (f, 2));
        for code in 0..200 {
            let (f, m) = decode_finset_pair(code);
            assert_eq!(encode_finset_pair(&f, m).unwrap(), code);
        }
        let big: ElemSet = [64].into_iter().collect();
        assert_eq!(encode_finset_pair(&big, 0), Err(CarrierError::ElementTooLarge(64)));
    }

    #[test]
    fn finset_pairs_bijective_below_10k() {
        for code in 0..10_000 {
            let (f, m) = decode_finset_pair(code);
            assert_eq!(encode_finset_pair(&f, m).unwrap(), code);
        }
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn rationals_are_canonical() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(1, -2), q(-1, 2));
        assert_eq!(q(-3, -6), q(1, 2));
        assert_eq!(q(0, -5), Rational::ZERO);
        assert_eq!(Rational::new(1, 0), Err(CarrierError::ZeroDenominator));
        let r = q(6, -8);
        assert_eq!((r.numer(), r.denom()), (-3, 4));
    }

    #[test]
    fn rational_order() {
        assert!(rational_less(&q(1, 2), &q(3, 4)));
        assert!(!rational_less(&q(3, 4), &q(1, 2)));
        for c in 0..100 {
            let p = Rational::from_code(c);
            assert!(!rational_less(&p, &p));
        }
    }

    #[test]
    fn mediant_is_strictly_between() {
        let sample: Vec<Rational> = (0..50).map(Rational::from_code).collect();
        for p in &sample {
            for r in &sample {
                if p < r {
                    let m = p.mediant(r);
                    assert!(p < &m && &m < r, "{p} {m} {r}");
                }
            }
        }
    }

    #[test]
    fn stern_brocot_codes() {
        assert_eq!(Rational::from_code(0), Rational::ZERO);
        assert_eq!(Rational::from_code(1), q(1, 1));
        assert_eq!(Rational::from_code(2), q(-1, 1));
        assert_eq!(Rational::from_code(3), q(1, 2));
        assert_eq!(Rational::from_code(5), q(2, 1));
        assert_eq!(q(2, 3).to_code().unwrap(), 2 * 0b101 - 1);
        for c in 0..10_000 {
            assert_eq!(Rational::from_code(c).to_code().unwrap(), c);
        }
        assert_eq!(q(1, 1000).to_code(), Err(CarrierError::Overflow));
    }

    #[test]
    fn dyadic_codes() {
        assert_eq!(Rational::from_dyadic_code(0), q(1, 2));
        assert_eq!(Rational::from_dyadic_code(1), q(1, 4));
        assert_eq!(Rational::from_dyadic_code(2), q(3, 4));
        assert_eq!(Rational::from_dyadic_code(3), q(1, 8));
        for c in 0..10_000 {
            assert_eq!(Rational::from_dyadic_code(c).to_dyadic_code().unwrap(), c);
        }
        assert!(q(1, 3).to_dyadic_code().is_err());
        assert!(q(1, 1).to_dyadic_code().is_err());
    }

    #[test]
    fn words() {
        assert_eq!(encode_word(&[]).unwrap(), 0);
        assert_eq!(decode_word(encode_word(&[0, 2, 1]).unwrap()), vec![0, 2, 1]);
        for c in 0..10_000 {
            assert_eq!(encode_word(&decode_word(c)).unwrap(), c);
        }
    }

    #[test]
    fn symbols_round_trip() {
        let syms = [
            Symbol::Word(vec![0, 1]),
            Symbol::Under(vec![]),
            Symbol::Inf(vec![1]),
            Symbol::InfStar(vec![1, 1, 0]),
            Symbol::Point(3, vec![0]),
            Symbol::PointUnder(0, vec![]),
            Symbol::PointPm(2, vec![1, 0]),
            Symbol::Ray(1, vec![0, 0]),
            Symbol::RayUnder(4, vec![1]),
        ];
        for s in syms {
            let c = s.encode().unwrap();
            assert_eq!(Symbol::decode(c), Some(s));
        }
        assert_eq!(Symbol::decode(pair(9, 0)), None);
    }

    #[test]
    fn carrier_codes_bijective_below_10k() {
        let tags = [
            CarrierTag::Nat,
            CarrierTag::Pair,
            CarrierTag::FinSetNatPair,
            CarrierTag::Rational,
            CarrierTag::Word,
        ];
        for tag in tags {
            for code in 0..10_000 {
                let c = CarrierCode::decode(tag, code).unwrap();
                assert_eq!(c.tag(), tag);
                assert_eq!(c.encode().unwrap(), code);
            }
        }
        for code in 0..10_000 {
            if let Some(c) = CarrierCode::decode(CarrierTag::TaggedSymbol, code) {
                assert_eq!(c.encode().unwrap(), code);
            }
        }
    }

    #[test]
    fn star_shift() {
        let s = StarShift::SINGLE;
        assert_eq!(s.star(0), 0);
        assert_eq!(s.nat(4), 5);
        assert_eq!(s.decode(0), None);
        assert_eq!(s.decode(5), Some(4));
    }

    #[test]
    fn tree_prefix_closure_is_checked() {
        let full = TreePredicate::full();
        assert!(full.contains(&[3, 1, 4]).unwrap());
        let root = TreePredicate::root_only();
        assert!(root.contains(&[]).unwrap());
        assert!(!root.contains(&[0]).unwrap());
        let gen = TreePredicate::generated_by(vec![vec![0, 1]]);
        assert!(gen.contains(&[0]).unwrap());
        assert!(!gen.contains(&[1]).unwrap());
        let broken = TreePredicate::new("odd-lengths", |w| w.len() % 2 == 1 || w.is_empty());
        assert!(matches!(
            broken.contains(&[0, 0, 0]),
            Err(CarrierError::NotPrefixClosed { .. })
        ));
    }
}
