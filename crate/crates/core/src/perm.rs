//! Bijections over the input space of a 3- or 4-line reversible circuit.
//!
//! A function on `n` lines maps each input value in `[0, 2^n)` to a distinct
//! output value; we write it as the output vector `[f(0), f(1), ...]`. The
//! whole table is packed into one `u64`: the image of input `i` occupies the
//! `n`-bit field starting at bit `n * (2^n - 1 - i)`, so index 0 sits in the
//! most significant field. With that layout, integer order on packed keys
//! equals lexicographic order on output vectors, which is the order the
//! canonical-form search minimizes and the database file sorts by.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MIN_LINES: u8 = 3;
pub const MAX_LINES: u8 = 4;

/// A reversible function: a permutation of `[0, 2^n)` for `n` in 3..=4.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    n: u8,
    key: u64,
}

#[inline]
pub(crate) fn points(n: u8) -> usize {
    1usize << n
}

#[inline]
pub(crate) fn field_shift(n: u8, i: usize) -> u32 {
    (n as u32) * ((1u32 << n) - 1 - i as u32)
}

#[inline]
pub(crate) fn field(key: u64, n: u8, i: usize) -> u8 {
    ((key >> field_shift(n, i)) as u8) & ((1 << n) - 1)
}

pub(crate) fn identity_key(n: u8) -> u64 {
    let mut key = 0;
    for i in 0..points(n) {
        key |= (i as u64) << field_shift(n, i);
    }
    key
}

/// True when `key` packs a bijection on `n`-line values (and, for n = 3,
/// uses only the low 24 bits).
pub(crate) fn is_valid_key(n: u8, key: u64) -> bool {
    let pts = points(n);
    if n == 3 && key >> 24 != 0 {
        return false;
    }
    let mut seen = 0u32;
    for i in 0..pts {
        seen |= 1 << field(key, n, i);
    }
    seen == ((1u64 << pts) - 1) as u32
}

/// `out[i] = g[f[i]]` on packed keys (apply `f` first, then `g`).
pub(crate) fn compose_key(n: u8, f: u64, g: u64) -> u64 {
    let w = n as u32;
    let mask = (1u64 << n) - 1;
    let top = ((1u32 << n) - 1) * w;
    let mut out = 0;
    let mut sh = top;
    loop {
        let fi = (f >> sh) & mask;
        out |= ((g >> (top - (fi as u32) * w)) & mask) << sh;
        if sh == 0 {
            break;
        }
        sh -= w;
    }
    out
}

pub(crate) fn invert_key(n: u8, f: u64) -> u64 {
    let w = n as u32;
    let mask = (1u64 << n) - 1;
    let top = ((1u32 << n) - 1) * w;
    let mut out = 0;
    let mut sh = top;
    let mut i = 0u64;
    loop {
        let fi = (f >> sh) & mask;
        out |= i << (top - (fi as u32) * w);
        if sh == 0 {
            break;
        }
        sh -= w;
        i += 1;
    }
    out
}

/// Mask with the least significant bit of every `n`-bit field set.
#[inline]
pub(crate) fn lane_lsb(n: u8) -> u64 {
    match n {
        3 => 0x0024_9249,
        _ => 0x1111_1111_1111_1111,
    }
}

impl Perm {
    /// The identity function on `n` lines. Panics if `n` is not 3 or 4.
    pub fn identity(n: u8) -> Perm {
        assert!((MIN_LINES..=MAX_LINES).contains(&n), "unsupported line count {n}");
        Perm { n, key: identity_key(n) }
    }

    /// Builds a function from its output vector, rejecting non-bijections.
    pub fn from_table(table: &[u8]) -> Result<Perm> {
        let n = match table.len() {
            8 => 3u8,
            16 => 4u8,
            len => return Err(Error::UnsupportedWidth(len)),
        };
        let cnt = points(n);
        let mut seen = [false; 16];
        let mut key = 0;
        for (i, &v) in table.iter().enumerate() {
            if v as usize >= cnt {
                return Err(Error::BadVector(format!(
                    "entry {v} at index {i} is out of range for {cnt} values"
                )));
            }
            if seen[v as usize] {
                return Err(Error::BadVector(format!("value {v} appears twice")));
            }
            seen[v as usize] = true;
            key |= (v as u64) << field_shift(n, i);
        }
        Ok(Perm { n, key })
    }

    #[inline]
    pub(crate) fn from_key(n: u8, key: u64) -> Perm {
        Perm { n, key }
    }

    /// Number of lines (3 or 4).
    #[inline]
    pub fn lines(&self) -> u8 {
        self.n
    }

    /// Number of input points, `2^n`.
    #[inline]
    pub fn points(&self) -> usize {
        points(self.n)
    }

    /// The packed table; index 0 in the most significant field.
    #[inline]
    pub fn key(&self) -> u64 {
        self.key
    }

    /// The image of input `i`.
    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i < self.points());
        field(self.key, self.n, i)
    }

    /// The output vector as a fresh table.
    pub fn table(&self) -> Vec<u8> {
        (0..self.points()).map(|i| self.get(i)).collect()
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.key == identity_key(self.n)
    }

    /// Applies `self` first, then `g`: `result(x) = g(self(x))`.
    ///
    /// Panics if the two functions act on different line counts.
    pub fn compose(&self, g: &Perm) -> Perm {
        assert_eq!(self.n, g.n, "composing functions on different line counts");
        Perm { n: self.n, key: compose_key(self.n, self.key, g.key) }
    }

    pub fn inverse(&self) -> Perm {
        Perm { n: self.n, key: invert_key(self.n, self.key) }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.points() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({} lines, {self})", self.n)
    }
}

impl FromStr for Perm {
    type Err = Error;

    /// Parses the bracketed comma form, e.g. `[1,0,3,2,5,7,4,6]`.
    /// Brackets are optional and whitespace is ignored.
    fn from_str(s: &str) -> Result<Perm> {
        let inner = s.trim();
        let inner = inner.strip_prefix('[').unwrap_or(inner);
        let inner = inner.strip_suffix(']').unwrap_or(inner);
        let mut table = Vec::new();
        for piece in inner.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(Error::BadVector("empty entry".into()));
            }
            let v: u8 = piece
                .parse()
                .map_err(|_| Error::BadVector(format!("`{piece}` is not a number")))?;
            table.push(v);
        }
        Perm::from_table(&table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_puts_index_zero_in_top_field() {
        assert_eq!(Perm::identity(4).key(), 0x0123_4567_89AB_CDEF);
        let id3 = Perm::identity(3);
        assert_eq!(id3.key(), 0o01234567);
        assert_eq!(id3.key() >> 24, 0);
    }

    #[test]
    fn key_order_is_vector_order() {
        // Integer comparison on packed keys must agree with lexicographic
        // comparison of output vectors.
        let mut rng = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for n in [3u8, 4] {
            let cnt = points(n);
            for _ in 0..500 {
                let mut a: Vec<u8> = (0..cnt as u8).collect();
                let mut b: Vec<u8> = (0..cnt as u8).collect();
                for i in (1..cnt).rev() {
                    a.swap(i, next() as usize % (i + 1));
                    b.swap(i, next() as usize % (i + 1));
                }
                let pa = Perm::from_table(&a).unwrap();
                let pb = Perm::from_table(&b).unwrap();
                assert_eq!(pa.key().cmp(&pb.key()), a.cmp(&b));
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p: Perm = "[1,0,3,2,5,7,4,6]".parse().unwrap();
        assert_eq!(p.lines(), 3);
        assert_eq!(p.table(), vec![1, 0, 3, 2, 5, 7, 4, 6]);
        assert_eq!(p.to_string(), "[1,0,3,2,5,7,4,6]");
        let q: Perm = p.to_string().parse().unwrap();
        assert_eq!(p, q);
        // whitespace and missing brackets are tolerated
        let r: Perm = " 1, 0, 3, 2, 5, 7, 4, 6 ".parse().unwrap();
        assert_eq!(p, r);
    }

    #[test]
    fn parse_rejects_bad_vectors() {
        assert!("[1,0,3,3,5,7,4,6]".parse::<Perm>().is_err()); // duplicate
        assert!("[1,0,3,2,5,7,4]".parse::<Perm>().is_err()); // length 7
        assert!("[1,0,3,2,5,7,4,8]".parse::<Perm>().is_err()); // out of range
        assert!("[1,0,3,2,5,7,4,x]".parse::<Perm>().is_err()); // not a number
    }

    #[test]
    fn inverse_of_worked_example() {
        let f: Perm = "[1,0,3,2,5,7,4,6]".parse().unwrap();
        let finv: Perm = "[1,0,3,2,6,4,7,5]".parse().unwrap();
        assert_eq!(f.inverse(), finv);
        assert!(f.compose(&finv).is_identity());
        assert!(finv.compose(&f).is_identity());
    }

    #[test]
    fn compose_applies_left_operand_first() {
        let f: Perm = "[1,0,3,2,5,7,4,6]".parse().unwrap();
        let g: Perm = "[2,3,0,1,6,4,7,5]".parse().unwrap();
        let h = f.compose(&g);
        for x in 0..8 {
            assert_eq!(h.get(x), g.get(f.get(x) as usize));
        }
    }

    #[test]
    fn inverse_round_trip_n4() {
        let t: Vec<u8> = vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 13, 12, 14, 15, 11, 10];
        let p = Perm::from_table(&t).unwrap();
        assert_eq!(p.inverse().inverse(), p);
        assert!(p.compose(&p.inverse()).is_identity());
    }
}
