//! Bit-packed Pauli strings in symplectic `(x|z)` form.
//!
//! A [`PauliString`] stores one x bit and one z bit per qubit plus a single
//! sign bit. The letter on qubit `q` is `I` for `(0,0)`, `X` for `(1,0)`,
//! `Z` for `(0,1)` and `Y` for `(1,1)`, where `Y` is the Hermitian Pauli `Y`
//! (so `X·Z = -iY`). Only a real sign is tracked. Products of anticommuting
//! strings carry an extra factor of `±i` which is folded into the sign by
//! rounding the phase exponent down to `{0, 2}`; callers that need exact
//! phases must only multiply commuting strings.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator with a ±1 sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            negative: false,
        }
    }

    /// A weight-one string with `letter` on `qubit`.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// Builds a string from bit slices of equal length.
    pub fn from_bits(x_bits: &[bool], z_bits: &[bool], negative: bool) -> Result<Self> {
        if x_bits.len() != z_bits.len() {
            return Err(Error::LengthMismatch {
                left: x_bits.len(),
                right: z_bits.len(),
            });
        }
        let mut p = Self::identity(x_bits.len());
        for (q, (&xb, &zb)) in x_bits.iter().zip(z_bits).enumerate() {
            p.set_x(q, xb);
            p.set_z(q, zb);
        }
        p.negative = negative;
        Ok(p)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    #[inline]
    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    #[inline]
    pub fn negate(&mut self) {
        self.negative = !self.negative;
    }

    #[inline]
    pub fn x(&self, q: usize) -> bool {
        debug_assert!(q < self.n);
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z(&self, q: usize) -> bool {
        debug_assert!(q < self.n);
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set_x(&mut self, q: usize, v: bool) {
        let mask = 1u64 << (q % WORD);
        if v {
            self.x[q / WORD] |= mask;
        } else {
            self.x[q / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn set_z(&mut self, q: usize, v: bool) {
        let mask = 1u64 << (q % WORD);
        if v {
            self.z[q / WORD] |= mask;
        } else {
            self.z[q / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip_x(&mut self, q: usize) {
        self.x[q / WORD] ^= 1u64 << (q % WORD);
    }

    #[inline]
    pub fn flip_z(&mut self, q: usize) {
        self.z[q / WORD] ^= 1u64 << (q % WORD);
    }

    #[inline]
    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x(q), self.z(q))
    }

    #[inline]
    pub fn set_letter(&mut self, q: usize, l: Letter) {
        let (xb, zb) = l.bits();
        self.set_x(q, xb);
        self.set_z(q, zb);
    }

    /// Multiplies `letter` on qubit `q` into this string from the right,
    /// ignoring phase. Used for fault injection where only letters matter.
    #[inline]
    pub fn xor_letter(&mut self, q: usize, l: Letter) {
        let (xb, zb) = l.bits();
        if xb {
            self.flip_x(q);
        }
        if zb {
            self.flip_z(q);
        }
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity letter, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x(q) || self.z(q))
            .collect()
    }

    /// True for the identity operator: all bits clear and sign `+1`.
    pub fn is_identity(&self) -> bool {
        !self.negative && self.letters_trivial()
    }

    /// True when every letter is `I`, whatever the sign.
    #[inline]
    pub fn letters_trivial(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True when every letter on `qubits` is `I`.
    pub fn trivial_on(&self, qubits: &[usize]) -> bool {
        qubits.iter().all(|&q| !self.x(q) && !self.z(q))
    }

    /// Same letters, ignoring sign.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Clears every letter on qubit `q`.
    #[inline]
    pub fn clear(&mut self, q: usize) {
        self.set_x(q, false);
        self.set_z(q, false);
    }

    pub fn clear_all(&mut self) {
        self.x.iter_mut().for_each(|w| *w = 0);
        self.z.iter_mut().for_each(|w| *w = 0);
        self.negative = false;
    }

    /// Symplectic inner product parity; `true` when the strings commute.
    ///
    /// Panics if the lengths differ.
    pub fn commutes(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "commutes: Pauli length mismatch");
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones() & 1;
        }
        acc == 0
    }

    /// Checked variant of [`commutes`](Self::commutes).
    pub fn try_commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes(other))
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Power of `i` picked up when multiplying the letters of `self` by the
    /// letters of `rhs` (in that order), modulo 4.
    fn product_phase(&self, rhs: &PauliString) -> u32 {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], rhs.x[i], rhs.z[i]);
            let y1 = x1 & z1;
            let xo1 = x1 & !z1;
            let zo1 = z1 & !x1;
            let y2 = x2 & z2;
            let xo2 = x2 & !z2;
            let zo2 = z2 & !x2;
            plus += ((y1 & zo2) | (xo1 & y2) | (zo1 & xo2)).count_ones();
            minus += ((y1 & xo2) | (xo1 & zo2) | (zo1 & y2)).count_ones();
        }
        (i64::from(plus) - i64::from(minus)).rem_euclid(4) as u32
    }

    /// In-place product `self ← self · rhs`.
    ///
    /// Panics if the lengths differ.
    pub fn mul_assign(&mut self, rhs: &PauliString) {
        assert_eq!(self.n, rhs.n, "pauli_mul: Pauli length mismatch");
        let phase = self.product_phase(rhs);
        self.negative ^= rhs.negative ^ (phase >= 2);
        for i in 0..self.x.len() {
            self.x[i] ^= rhs.x[i];
            self.z[i] ^= rhs.z[i];
        }
    }

    /// XORs the letters of `rhs` into `self`, leaving the sign untouched.
    pub fn xor_assign(&mut self, rhs: &PauliString) {
        assert_eq!(self.n, rhs.n, "Pauli length mismatch");
        for i in 0..self.x.len() {
            self.x[i] ^= rhs.x[i];
            self.z[i] ^= rhs.z[i];
        }
    }

    /// Checked product `self · rhs`.
    pub fn try_mul(&self, rhs: &PauliString) -> Result<PauliString> {
        self.check_len(rhs)?;
        let mut out = self.clone();
        out.mul_assign(rhs);
        Ok(out)
    }

    /// Embeds this string into a register of `n` qubits, sending qubit `i` to
    /// `map[i]`.
    pub fn embed(&self, n: usize, map: &[usize]) -> PauliString {
        assert_eq!(map.len(), self.n);
        let mut out = PauliString::identity(n);
        for (q, &dst) in map.iter().enumerate() {
            out.set_x(dst, self.x(q));
            out.set_z(dst, self.z(q));
        }
        out.negative = self.negative;
        out
    }

    /// Restriction to `qubits`, re-indexed to `0..qubits.len()`.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set_x(i, self.x(q));
            out.set_z(i, self.z(q));
        }
        out.negative = self.negative;
        out
    }

    /// Symplectic vector `(x_0..x_{n-1}, z_0..z_{n-1})` packed into words.
    pub fn symplectic_bits(&self) -> Vec<u64> {
        let mut bits = vec![0u64; words_for(2 * self.n)];
        for q in 0..self.n {
            if self.x(q) {
                bits[q / WORD] |= 1 << (q % WORD);
            }
            if self.z(q) {
                let j = q + self.n;
                bits[j / WORD] |= 1 << (j % WORD);
            }
        }
        bits
    }
}

/// `true` iff `p` and `q` commute.
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.try_commutes(q)
}

/// Operator product `p · q` under the sign convention of this module.
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    p.try_mul(q)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `"XIZ"`, `"+XYZ"` or `"-ZZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::InvalidPauli(format!("unexpected letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut p = PauliString::from_letters(&letters);
        p.negative = negative;
        Ok(p)
    }
}
