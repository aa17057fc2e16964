//! Pauli strings and canonical weighted sums of them.
//!
//! A string is stored as an `(x, z)` bitmask pair: qubit `q` carries `X` if
//! only bit `q` of `x` is set, `Z` if only bit `q` of `z` is set and `Y` if
//! both are. Qubit `q` is bit `q` of a basis-state index.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Terms with smaller magnitude are dropped on canonicalization.
pub const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
    Z,
}

/// Letter pattern of a Pauli string, without coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliKey {
    pub x: u64,
    pub z: u64,
}

impl PauliKey {
    pub fn identity() -> Self {
        PauliKey::default()
    }

    pub fn single(qubit: usize, letter: Letter) -> Self {
        let bit = 1u64 << qubit;
        match letter {
            Letter::X => PauliKey { x: bit, z: 0 },
            Letter::Y => PauliKey { x: bit, z: bit },
            Letter::Z => PauliKey { x: 0, z: bit },
        }
    }

    pub fn from_letters(letters: &[(usize, Letter)]) -> Self {
        letters.iter().fold(PauliKey::identity(), |acc, &(q, l)| {
            let s = PauliKey::single(q, l);
            PauliKey { x: acc.x ^ s.x, z: acc.z ^ s.z }
        })
    }

    pub fn letter(&self, qubit: usize) -> Option<Letter> {
        let xb = (self.x >> qubit) & 1 == 1;
        let zb = (self.z >> qubit) & 1 == 1;
        match (xb, zb) {
            (false, false) => None,
            (true, false) => Some(Letter::X),
            (true, true) => Some(Letter::Y),
            (false, true) => Some(Letter::Z),
        }
    }

    pub fn letters(&self) -> Vec<(usize, Letter)> {
        let support = self.x | self.z;
        (0..64)
            .filter(|q| (support >> q) & 1 == 1)
            .map(|q| (q, self.letter(q).unwrap()))
            .collect()
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// True iff the strings anticommute on an even number of qubits.
    pub fn commutes_with(&self, other: &PauliKey) -> bool {
        (((self.x & other.z) ^ (self.z & other.x)).count_ones() & 1) == 0
    }

    /// `self * other = phase * result`.
    pub fn multiply(&self, other: &PauliKey) -> (Complex64, PauliKey) {
        let out = PauliKey { x: self.x ^ other.x, z: self.z ^ other.z };
        // letter = i^{xz} X^x Z^z per qubit; Z^z1 X^x2 = (-1)^{z1 x2} X^x2 Z^z1
        let exp = self.y_count() as i64 + other.y_count() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - out.y_count() as i64;
        (i_pow(exp), out)
    }

    /// Action on a basis state: `P|b> = phase |b ^ x>`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let sign = if (b & self.z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        (i_pow(self.y_count() as i64) * sign, b ^ self.x)
    }
}

pub(crate) fn i_pow(exp: i64) -> Complex64 {
    match exp.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A weighted Pauli string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub coeff: Complex64,
    pub key: PauliKey,
}

impl PauliString {
    pub fn new(coeff: Complex64, letters: &[(usize, Letter)]) -> Self {
        PauliString { coeff, key: PauliKey::from_letters(letters) }
    }

    pub fn real(coeff: f64, letters: &[(usize, Letter)]) -> Self {
        Self::new(Complex64::new(coeff, 0.0), letters)
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        self.key.commutes_with(&other.key)
    }
}

pub fn commutes(a: &PauliString, b: &PauliString) -> bool {
    a.commutes(b)
}

fn fmt_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

fn parse_coeff(s: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad coefficient '{s}'"));
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix("i)")) {
        // split at the sign that starts the imaginary part
        let split = inner
            .char_indices()
            .skip(1)
            .filter(|&(i, ch)| (ch == '+' || ch == '-') && !matches!(&inner[i - 1..i], "e" | "E"))
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let re = inner[..split].parse::<f64>().map_err(|_| bad())?;
        let im = inner[split..].parse::<f64>().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else if let Some(im) = s.strip_suffix('i') {
        Ok(Complex64::new(0.0, im.parse::<f64>().map_err(|_| bad())?))
    } else {
        Ok(Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

/// Canonical text form: coefficient, then letter-qubit tokens in ascending
/// qubit order, e.g. `0.125 X0 Y3 Z5`. The identity has no tokens.
impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_coeff(self.coeff))?;
        for (q, l) in self.key.letters() {
            write!(f, " {l:?}{q}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let coeff = parse_coeff(tokens.next().ok_or_else(|| Error::Parse("empty string".into()))?)?;
        let mut letters = Vec::new();
        let mut last: Option<usize> = None;
        for tok in tokens {
            let (head, tail) = tok.split_at(1);
            let letter = match head {
                "X" => Letter::X,
                "Y" => Letter::Y,
                "Z" => Letter::Z,
                _ => return Err(Error::Parse(format!("bad Pauli token '{tok}'"))),
            };
            let q: usize = tail.parse().map_err(|_| Error::Parse(format!("bad qubit in '{tok}'")))?;
            if q >= 64 || last.is_some_and(|l| q <= l) {
                return Err(Error::Parse(format!("qubits must be strictly increasing: '{s}'")));
            }
            last = Some(q);
            letters.push((q, letter));
        }
        Ok(PauliString::new(coeff, &letters))
    }
}

/// Canonical sum of Pauli strings on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliKey, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::from_strings(n_qubits, [PauliString { coeff: Complex64::new(1.0, 0.0), key: PauliKey::identity() }])
    }

    pub fn from_strings(n_qubits: usize, strings: impl IntoIterator<Item = PauliString>) -> Self {
        let mut sum = PauliSum::zero(n_qubits);
        for s in strings {
            sum.accumulate(s.key, s.coeff);
        }
        sum.canonicalize();
        sum
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(|(&key, &coeff)| PauliString { coeff, key })
    }

    pub fn coefficient(&self, key: &PauliKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    fn accumulate(&mut self, key: PauliKey, coeff: Complex64) {
        assert!(
            key.support() >> self.n_qubits == 0,
            "Pauli string acts outside the {}-qubit register",
            self.n_qubits
        );
        *self.terms.entry(key).or_default() += coeff;
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| c.norm() >= DROP_TOL);
    }

    fn check_register(&self, other: &PauliSum) {
        assert_eq!(self.n_qubits, other.n_qubits, "Pauli sums on different registers");
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for (k, c) in &self.terms {
            out.terms.insert(*k, c * factor);
        }
        out.canonicalize();
        out
    }

    pub fn scale_real(&self, factor: f64) -> PauliSum {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Hermitian adjoint; every Pauli string is Hermitian, so only the
    /// coefficients are conjugated.
    pub fn conjugate(&self) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.conj();
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() < DROP_TOL)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(PauliKey::is_diagonal)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &PauliSum) -> PauliSum {
        self * other - other * self
    }

    /// Dense matrix, row/column index = basis-state bitstring. Intended for
    /// small registers (tests and diagnostics).
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        assert!(self.n_qubits <= 14, "dense matrix requested for {} qubits", self.n_qubits);
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (key, c) in &self.terms {
            for b in 0..dim as u64 {
                let (phase, out) = key.apply_to_basis(b);
                m[(out as usize, b as usize)] += c * phase;
            }
        }
        m
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let lines: Vec<String> = self.terms().map(|t| t.to_string()).collect();
        write!(f, "{}", lines.join(" + "))
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;

    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.check_register(rhs);
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.accumulate(*k, *c);
        }
        out.canonicalize();
        out
    }
}

impl Add for PauliSum {
    type Output = PauliSum;

    fn add(self, rhs: PauliSum) -> PauliSum {
        &self + &rhs
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;

    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self + &rhs.scale_real(-1.0)
    }
}

impl Sub for PauliSum {
    type Output = PauliSum;

    fn sub(self, rhs: PauliSum) -> PauliSum {
        &self - &rhs
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;

    fn neg(self) -> PauliSum {
        self.scale_real(-1.0)
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.check_register(rhs);
        let mut out = PauliSum::zero(self.n_qubits);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let (phase, key) = ka.multiply(kb);
                out.accumulate(key, ca * cb * phase);
            }
        }
        out.canonicalize();
        out
    }
}

impl Mul for PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: PauliSum) -> PauliSum {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> PauliString {
        text.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(commutes(&s("1 X0 X1"), &s("1 Y0 Y1")));
        assert!(!commutes(&s("1 X0"), &s("1 Y0")));
        let p = s("0.5 X0 Y2 Z3");
        assert!(commutes(&p, &p));
    }

    #[test]
    fn sum_algebra_examples() {
        let p = PauliSum::from_strings(4, [s("0.3 X0 Z2")]);
        assert!((&p + &p.scale_real(-1.0)).is_empty());

        let hop = PauliSum::from_strings(2, [s("0.5 X0 X1"), s("0.5 Y0 Y1")]);
        assert_eq!(hop.conjugate(), hop);

        let dup = PauliSum::from_strings(1, [s("0.25 Z0"), s("0.25 Z0")]);
        assert_eq!(dup.len(), 1);
        assert_eq!(dup.coefficient(&PauliKey::single(0, Letter::Z)), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliSum::from_strings(1, [s("1 X0")]);
        let y = PauliSum::from_strings(1, [s("1 Y0")]);
        let z = PauliSum::from_strings(1, [s("1 Z0")]);
        assert_eq!(&x * &y, z.scale(Complex64::new(0.0, 1.0)));
        assert_eq!(&y * &z, x.scale(Complex64::new(0.0, 1.0)));
        assert_eq!(&z * &x, y.scale(Complex64::new(0.0, 1.0)));
        assert_eq!(&x * &x, PauliSum::identity(1));
    }

    #[test]
    fn text_format() {
        let p = PauliString::real(0.125, &[(5, Letter::Z), (0, Letter::X), (3, Letter::Y)]);
        assert_eq!(p.to_string(), "0.125 X0 Y3 Z5");
        assert_eq!(s("-1i Z1").coeff, Complex64::new(0.0, -1.0));
        assert_eq!(s("(0.5-2e-3i) X4").coeff, Complex64::new(0.5, -2e-3));
        assert!("1 X3 Z1".parse::<PauliString>().is_err());
        assert!("1 W3".parse::<PauliString>().is_err());
    }

    #[test]
    fn hermiticity_predicate() {
        let h = PauliSum::from_strings(2, [s("0.5 X0 X1"), s("-1 Z0")]);
        assert!(h.is_hermitian());
        assert!(!h.scale(Complex64::new(0.0, 1.0)).is_hermitian());
    }

    fn arb_key(n: usize) -> impl Strategy<Value = PauliKey> {
        let mask = (1u64 << n) - 1;
        (any::<u64>(), any::<u64>()).prop_map(move |(x, z)| PauliKey { x: x & mask, z: z & mask })
    }

    proptest! {
        #[test]
        fn product_matches_dense(a in arb_key(4), b in arb_key(4)) {
            let pa = PauliSum::from_strings(4, [PauliString { coeff: Complex64::new(1.0, 0.0), key: a }]);
            let pb = PauliSum::from_strings(4, [PauliString { coeff: Complex64::new(1.0, 0.0), key: b }]);
            let dense = pa.to_dense() * pb.to_dense();
            prop_assert!(((&pa * &pb).to_dense() - dense).norm() < 1e-12);
        }

        #[test]
        fn commutation_matches_dense(a in arb_key(3), b in arb_key(3)) {
            let ma = PauliSum::from_strings(3, [PauliString { coeff: Complex64::new(1.0, 0.0), key: a }]).to_dense();
            let mb = PauliSum::from_strings(3, [PauliString { coeff: Complex64::new(1.0, 0.0), key: b }]).to_dense();
            let comm = (&ma * &mb - &mb * &ma).norm() < 1e-12;
            prop_assert_eq!(a.commutes_with(&b), comm);
        }

        #[test]
        fn text_round_trip(key in arb_key(20), re in -10.0f64..10.0, im in -10.0f64..10.0, which in 0usize..3) {
            let coeff = match which {
                0 => Complex64::new(re, 0.0),
                1 => Complex64::new(0.0, im),
                _ => Complex64::new(re, im),
            };
            let p = PauliString { coeff, key };
            let back: PauliString = p.to_string().parse().unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
