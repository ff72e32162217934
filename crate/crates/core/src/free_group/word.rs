use std::fmt;

use crate::error::{Error, Result};

/// A generator `a_i` (`inverse == false`) or its inverse. Generators are
/// numbered from 0 internally and printed from 1.
///
/// The derived order puts all positive letters first:
/// `a_1 < a_2 < … < a_d < a_1⁻¹ < … < a_d⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub inverse: bool,
    pub generator: u8,
}

impl Letter {
    pub const fn pos(generator: u8) -> Self {
        Letter { inverse: false, generator }
    }

    pub const fn neg(generator: u8) -> Self {
        Letter { inverse: true, generator }
    }

    pub fn inv(self) -> Self {
        Letter { inverse: !self.inverse, generator: self.generator }
    }

    /// Slot in `0..2d`: `a_i ↦ i`, `a_i⁻¹ ↦ d + i`. Also the label bit.
    pub fn slot(self, d: usize) -> usize {
        self.generator as usize + if self.inverse { d } else { 0 }
    }

    pub fn from_slot(slot: usize, d: usize) -> Self {
        if slot < d {
            Letter::pos(slot as u8)
        } else {
            Letter::neg((slot - d) as u8)
        }
    }

    /// All `2d` letters in slot order.
    pub fn all(d: usize) -> impl Iterator<Item = Letter> {
        (0..2 * d).map(move |s| Letter::from_slot(s, d))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "a{}^-1", self.generator + 1)
        } else {
            write!(f, "a{}", self.generator + 1)
        }
    }
}

/// A freely reduced word. The empty word is the identity.
///
/// Words are ordered by length first, then lexicographically by letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// `a_{g+1}^power` (negative powers use the inverse letter).
    pub fn power(generator: u8, power: i32) -> Self {
        let l = if power >= 0 { Letter::pos(generator) } else { Letter::neg(generator) };
        Word(vec![l; power.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inv())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: Letter) -> Word {
        Word::reduce(std::iter::once(g).chain(self.0.iter().copied()).chain(std::iter::once(g.inv())))
    }

    /// Largest generator index used plus one (0 for the identity).
    pub fn rank(&self) -> usize {
        self.0.iter().map(|l| l.generator as usize + 1).max().unwrap_or(0)
    }

    /// Parses `e`, or letters such as `a1`, `a2^-1`, `A2` (inverse), `a1^3`,
    /// separated by whitespace, `.` or `*`. The result is freely reduced.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "1" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '.' || c == '*').filter(|t| !t.is_empty()) {
            let bad = || Error::InvalidWord(format!("bad token {tok:?} in {s:?}"));
            let (head, exp) = match tok.split_once('^') {
                Some((h, e)) => (h, e.parse::<i32>().map_err(|_| bad())?),
                None => (tok, 1),
            };
            let (upper, digits) = if let Some(rest) = head.strip_prefix('a') {
                (false, rest)
            } else if let Some(rest) = head.strip_prefix('A') {
                (true, rest)
            } else {
                return Err(bad());
            };
            let idx: u8 = digits.parse().map_err(|_| bad())?;
            if idx == 0 {
                return Err(bad());
            }
            let base = if upper { Letter::neg(idx - 1) } else { Letter::pos(idx - 1) };
            let l = if exp < 0 { base.inv() } else { base };
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Ok(Word::reduce(letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word::reduce(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cancels() {
        let w = Word::reduce([Letter::pos(0), Letter::pos(1), Letter::neg(1), Letter::neg(0)]);
        assert!(w.is_empty());
        let w = Word::parse("a1 a2 A2 a1").unwrap();
        assert_eq!(w, Word::power(0, 2));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["e", "a1", "a2^-1", "a1 a2 a1^-1"] {
            let w = Word::parse(s).unwrap();
            assert_eq!(w.to_string(), s);
            assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
        }
        assert_eq!(Word::parse("a1^3").unwrap(), Word::power(0, 3));
        assert_eq!(Word::parse("A1.a2").unwrap().to_string(), "a1^-1 a2");
        assert!(Word::parse("b1").is_err());
        assert!(Word::parse("a0").is_err());
    }

    #[test]
    fn order_is_length_then_lex() {
        let mut ws: Vec<Word> = ["a1^-1", "e", "a2 a1", "a1", "a2"].iter().map(|s| Word::parse(s).unwrap()).collect();
        ws.sort();
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["e", "a1", "a2", "a1^-1", "a2 a1"]);
    }

    #[test]
    fn conjugation_reduces() {
        let w = Word::parse("a2").unwrap();
        assert_eq!(w.conjugate_by(Letter::pos(0)).to_string(), "a1 a2 a1^-1");
        let w = Word::parse("a1 a2").unwrap();
        assert_eq!(w.conjugate_by(Letter::neg(0)).to_string(), "a2 a1");
    }
}
