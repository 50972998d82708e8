//! Reduced words in a free group of rank at most 13.
//!
//! A [`Letter`] packs a generator index and an inversion bit into one byte,
//! so the derived ordering is `a < a' < b < b' < ...`, which is the tie-break
//! order used by every canonical form in the crate.

use std::fmt;

use crate::error::{Error, Result};

pub type Word = Vec<Letter>;

#[derive(Copy, Clone, Eq, PartialEq, Ord, PartialOrd, Hash)]
pub struct Letter(u8);

impl Letter {
    pub const fn gen(index: usize) -> Self {
        Letter((index as u8) << 1)
    }

    pub const fn gen_inv(index: usize) -> Self {
        Letter(((index as u8) << 1) | 1)
    }

    pub const fn from_code(code: u8) -> Self {
        Letter(code)
    }

    #[inline]
    pub const fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub const fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub const fn inv(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// +1 for a generator, -1 for an inverse generator.
    pub const fn exponent(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = (b'a' + self.index() as u8) as char;
        if self.is_inverse() {
            write!(f, "{c}'")
        } else {
            write!(f, "{c}")
        }
    }
}

/// Parses `aba'b'` style words over the first `rank` generators.
pub fn parse(text: &str, rank: usize) -> Result<Word> {
    let mut out = Vec::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '\'' => match out.last_mut() {
                Some(l) if !Letter::is_inverse(*l) => *l = l.inv(),
                _ => return Err(Error::Parse(format!("misplaced inverse mark in {text:?}"))),
            },
            'a'..='m' => {
                let idx = (ch as u8 - b'a') as usize;
                if idx >= rank {
                    return Err(Error::Parse(format!(
                        "letter {ch:?} outside the alphabet of rank {rank}"
                    )));
                }
                out.push(Letter::gen(idx));
            }
            c if c.is_whitespace() || c == '.' || c == '·' => {}
            other => return Err(Error::Parse(format!("unexpected character {other:?} in {text:?}"))),
        }
    }
    Ok(out)
}

pub fn format(word: &[Letter]) -> String {
    let mut s = String::with_capacity(word.len() * 2);
    for l in word {
        s.push_str(&l.to_string());
    }
    s
}

/// Free reduction.
pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let letters = letters.into_iter();
    let mut out: Word = Vec::with_capacity(letters.size_hint().0);
    for l in letters {
        push_reduced(&mut out, l);
    }
    out
}

/// Appends `l` to a reduced word, cancelling against its last letter.
#[inline]
pub fn push_reduced(out: &mut Word, l: Letter) {
    if out.last() == Some(&l.inv()) {
        out.pop();
    } else {
        out.push(l);
    }
}

pub fn concat(parts: &[&[Letter]]) -> Word {
    reduce(parts.iter().flat_map(|p| p.iter().copied()))
}

pub fn inverse(word: &[Letter]) -> Word {
    word.iter().rev().map(|l| l.inv()).collect()
}

pub fn is_reduced(word: &[Letter]) -> bool {
    word.windows(2).all(|w| w[0] != w[1].inv())
}

pub fn is_cyclically_reduced(word: &[Letter]) -> bool {
    is_reduced(word) && (word.len() < 2 || word[0] != word[word.len() - 1].inv())
}

/// Splits a reduced word as `t · core · t⁻¹` with `core` cyclically reduced.
pub fn cyclic_split(word: &[Letter]) -> (Word, Word) {
    let mut i = 0;
    let mut j = word.len();
    while j >= i + 2 && word[i] == word[j - 1].inv() {
        i += 1;
        j -= 1;
    }
    (word[..i].to_vec(), word[i..j].to_vec())
}

pub fn cyclic_reduce(word: &[Letter]) -> Word {
    let mut r = reduce(word.iter().copied());
    let mut i = 0;
    let mut j = r.len();
    while j >= i + 2 && r[i] == r[j - 1].inv() {
        i += 1;
        j -= 1;
    }
    r.truncate(j);
    r.drain(..i);
    r
}

pub fn rotate(word: &[Letter], k: usize) -> Word {
    let mut v = Vec::with_capacity(word.len());
    v.extend_from_slice(&word[k..]);
    v.extend_from_slice(&word[..k]);
    v
}

#[inline]
fn wrap(i: usize, n: usize) -> usize {
    if i >= n {
        i - n
    } else {
        i
    }
}

/// Start index of the lexicographically least rotation (two-pointer
/// minimum-expression algorithm, linear time).
pub fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[wrap(i + k, n)];
        let b = s[wrap(j + k, n)];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Canonical representative of a cyclic word up to rotation and inversion.
/// The input must be cyclically reduced.
pub fn canonical_cyclic(word: &[Letter]) -> Word {
    let n = word.len();
    let f = least_rotation(word);
    let mut inv = inverse(word);
    let b = least_rotation(&inv);
    let fwd = (0..n).map(|k| word[wrap(f + k, n)]);
    let bwd = (0..n).map(|k| inv[wrap(b + k, n)]);
    if bwd.lt(fwd) {
        inv.rotate_left(b);
        inv
    } else {
        rotate(word, f)
    }
}

/// Returns `(root, k)` with `word = root^k` and `root` not a proper power.
pub fn primitive_root(word: &[Letter]) -> (Word, usize) {
    let n = word.len();
    if n == 0 {
        return (Vec::new(), 1);
    }
    // prefix function
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && word[i] != word[k] {
            k = pi[k - 1];
        }
        if word[i] == word[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    if n % p == 0 {
        (word[..p].to_vec(), n / p)
    } else {
        (word.to_vec(), 1)
    }
}

pub fn power(word: &[Letter], k: i64) -> Word {
    let base = if k < 0 { inverse(word) } else { word.to_vec() };
    let mut out = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
    for _ in 0..k.unsigned_abs() {
        out.extend_from_slice(&base);
    }
    reduce(out)
}

/// Exponent sums, i.e. the image in the abelianization.
pub fn abelianize(word: &[Letter], rank: usize) -> Vec<i64> {
    let mut v = vec![0i64; rank];
    for l in word {
        v[l.index()] += l.exponent();
    }
    v
}

/// Nibble-packed bytes; used as a compact hash key.
pub fn pack(word: &[Letter], out: &mut Vec<u8>) {
    out.extend_from_slice(&(word.len() as u32).to_le_bytes());
    for pair in word.chunks(2) {
        let hi = pair[0].code();
        let lo = pair.get(1).map_or(0x0f, |l| l.code());
        out.push((hi << 4) | lo);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        parse(s, 3).unwrap()
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(format(&w("aba'b'")), "aba'b'");
        assert!(parse("ad", 3).is_err());
        assert!(parse("'a", 3).is_err());
        assert!(parse("a''", 3).is_err());
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce(w("abb'a")), w("aa"));
        assert_eq!(cyclic_reduce(&w("a'bca")), w("bc"));
        assert!(is_cyclically_reduced(&w("ab")));
        assert!(!is_cyclically_reduced(&w("aba'")));
    }

    #[test]
    fn least_rotation_matches_brute_force() {
        let words = ["ba", "bab'a'", "cab", "aab", "abab", "b'ab'a", "c'c'ab"];
        for s in words {
            let x = w(s);
            let best = (0..x.len()).map(|k| rotate(&x, k)).min().unwrap();
            assert_eq!(rotate(&x, least_rotation(&x)), best, "{s}");
        }
    }

    #[test]
    fn canonical_handles_inversion() {
        assert_eq!(canonical_cyclic(&w("a'")), w("a"));
        assert_eq!(canonical_cyclic(&w("b'a'")), w("ab"));
    }

    #[test]
    fn roots() {
        assert_eq!(primitive_root(&w("abab")), (w("ab"), 2));
        assert_eq!(primitive_root(&w("aba")), (w("aba"), 1));
        assert_eq!(primitive_root(&w("aaa")), (w("a"), 3));
    }

    #[test]
    fn packing_distinguishes_lengths() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        pack(&w("a"), &mut x);
        pack(&w("aa"), &mut y);
        assert_ne!(x, y);
    }
}
