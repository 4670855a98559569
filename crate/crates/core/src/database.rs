//! Breadth-first database of minimal gate counts, one canonical class
//! representative per entry.
//!
//! Level `k` holds the canonical keys of every relabeling class whose
//! functions need exactly `k` gates. A level is grown from the previous one
//! by appending *and* prepending every library gate to each representative:
//! a class reached by appending a gate to some member of a known class is
//! always reachable from the stored representative by appending or
//! prepending one (relabeled) gate, so expanding both ends of the
//! representative alone keeps the search closed over classes.
//!
//! Each entry also records one such discovery gate, already relabeled into
//! the entry's own canonical frame. Stripping that gate from the back or
//! front of the representative lands exactly one level down, which is how
//! [`OptimalDb::synthesize`] rebuilds an explicit circuit.

use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::canonical::{canon_key, relabeling_by_index};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{gate_library, tables, GateId, NO_GATE};
use crate::perm::{self, Perm};

const MAGIC: &[u8; 4] = b"RCDB";
const VERSION: u16 = 1;

/// Knobs for [`OptimalDb::build`].
#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Largest gate count to index. Level sizes grow by roughly an order
    /// of magnitude per step on 4 lines; 6 is the practical default there,
    /// while 8 exhausts the whole 3-line space.
    pub depth: u8,
    /// Rough cap on working memory in bytes. The expansion of the next
    /// level is cost-estimated up front and aborted with
    /// [`Error::MemoryBudget`] instead of thrashing.
    pub memory_budget: u64,
    /// Print one line per finished level to stderr.
    pub progress: bool,
}

impl Default for BuildOptions {
    fn default() -> BuildOptions {
        BuildOptions {
            depth: 6,
            memory_budget: 4 << 30,
            progress: false,
        }
    }
}

struct Level {
    /// Sorted canonical keys.
    keys: Vec<u64>,
    /// Discovery gate per key, in the key's own frame (`NO_GATE` at level 0).
    gates: Vec<GateId>,
}

/// Database of minimal gate counts for every class within its depth.
pub struct OptimalDb {
    n: u8,
    depth: u8,
    levels: Vec<Level>,
    /// All keys again, merged and sorted, for one-probe membership tests.
    index_keys: Vec<u64>,
    index_gc: Vec<u8>,
}

/// Summary of a database's shape, printable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DbInfo {
    pub lines: u8,
    pub depth: u8,
    pub level_counts: Vec<u64>,
    pub total: u64,
}

impl fmt::Display for DbInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lines: {}", self.lines)?;
        writeln!(f, "depth: {}", self.depth)?;
        writeln!(f, "classes: {}", self.total)?;
        for (gc, count) in self.level_counts.iter().enumerate() {
            writeln!(f, "  gate count {gc:2}: {count}")?;
        }
        Ok(())
    }
}

impl OptimalDb {
    /// Runs the breadth-first search to `opts.depth` levels.
    pub fn build(n: u8, opts: &BuildOptions) -> Result<OptimalDb> {
        if n != 3 && n != 4 {
            return Err(Error::UnsupportedWidth(n as usize));
        }
        let t = tables(n);
        let lib = gate_library(n);
        let mut levels = vec![Level {
            keys: vec![perm::identity_key(n)],
            gates: vec![NO_GATE],
        }];

        for k in 0..opts.depth as usize {
            let cur: &[u64] = &levels[k].keys;
            let prev: &[u64] = if k == 0 { &[] } else { &levels[k - 1].keys };
            if cur.is_empty() {
                levels.push(Level { keys: Vec::new(), gates: Vec::new() });
                continue;
            }

            // Worst case every expansion is new: each candidate costs a
            // 16-byte slot during collection plus its final resting place.
            let projected = cur.len() as u64 * lib.len() as u64 * 2;
            let existing: u64 = levels.iter().map(|l| l.keys.len() as u64).sum();
            if projected * 24 + existing * 9 > opts.memory_budget {
                return Err(Error::MemoryBudget {
                    entries: projected,
                    budget: opts.memory_budget,
                });
            }

            let mut cands: Vec<(u64, GateId)> = cur
                .par_iter()
                .fold(Vec::new, |mut acc, &r| {
                    for (id, gate) in lib.iter().enumerate() {
                        let id = id as GateId;
                        let back = t.apply_key(n, r, id);
                        let front = t.apply_before_key(r, id);
                        let ends = if front == back { &[back][..] } else { &[back, front][..] };
                        for &raw in ends {
                            let (ck, widx) = canon_key(n, raw);
                            if cur.binary_search(&ck).is_ok()
                                || prev.binary_search(&ck).is_ok()
                            {
                                continue;
                            }
                            let w = relabeling_by_index(n, widx as usize);
                            let stored = w
                                .map_gate(gate)
                                .id(n)
                                .expect("relabeled gate stays in the library");
                            acc.push((ck, stored));
                        }
                    }
                    acc
                })
                .reduce(Vec::new, |mut a, mut b| {
                    a.append(&mut b);
                    a
                });

            cands.par_sort_unstable();
            cands.dedup_by_key(|c| c.0);
            let level = Level {
                keys: cands.iter().map(|c| c.0).collect(),
                gates: cands.iter().map(|c| c.1).collect(),
            };
            if opts.progress {
                eprintln!("level {}: {} classes", k + 1, level.keys.len());
            }
            levels.push(level);
        }

        Ok(OptimalDb::assemble(n, opts.depth, levels))
    }

    fn assemble(n: u8, depth: u8, levels: Vec<Level>) -> OptimalDb {
        let mut merged: Vec<(u64, u8)> = levels
            .iter()
            .enumerate()
            .flat_map(|(gc, l)| l.keys.iter().map(move |&k| (k, gc as u8)))
            .collect();
        merged.par_sort_unstable();
        OptimalDb {
            n,
            depth,
            index_keys: merged.iter().map(|e| e.0).collect(),
            index_gc: merged.iter().map(|e| e.1).collect(),
            levels,
        }
    }

    pub fn lines(&self) -> u8 {
        self.n
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    /// Total number of stored classes.
    pub fn len(&self) -> u64 {
        self.index_keys.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        false // level 0 always holds the identity
    }

    pub fn level_count(&self, gc: u8) -> u64 {
        self.levels.get(gc as usize).map_or(0, |l| l.keys.len() as u64)
    }

    pub fn info(&self) -> DbInfo {
        DbInfo {
            lines: self.n,
            depth: self.depth,
            level_counts: self.levels.iter().map(|l| l.keys.len() as u64).collect(),
            total: self.len(),
        }
    }

    /// Sorted canonical keys at one level.
    pub(crate) fn level_keys(&self, gc: u8) -> &[u64] {
        self.levels.get(gc as usize).map_or(&[], |l| &l.keys)
    }

    /// Minimal gate count for an already-canonical key.
    pub(crate) fn lookup_key(&self, canon: u64) -> Option<u8> {
        self.index_keys
            .binary_search(&canon)
            .ok()
            .map(|i| self.index_gc[i])
    }

    /// Minimal gate count of `f`, when within depth.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn lookup_gc(&self, f: &Perm) -> Option<u8> {
        assert_eq!(f.lines(), self.n, "line-width mismatch");
        self.lookup_key(canon_key(self.n, f.key()).0)
    }

    /// One minimal circuit for `f`, or [`Error::NotInDatabase`] when `f`
    /// needs more gates than the database depth.
    ///
    /// # Panics
    /// If `f` is on a different number of lines than the database.
    pub fn synthesize(&self, f: &Perm) -> Result<Circuit> {
        assert_eq!(f.lines(), self.n, "line-width mismatch");
        let (ck, widx) = canon_key(self.n, f.key());
        let gc = self
            .lookup_key(ck)
            .ok_or(Error::NotInDatabase { depth: self.depth })?;
        let rep_circuit = self.reconstruct_rep(ck, gc)?;
        let c = relabeling_by_index(self.n, widx as usize)
            .inverse()
            .transport(&rep_circuit);
        if c.to_perm() != *f {
            return Err(Error::CorruptDb(
                "reconstructed circuit does not realize the function".into(),
            ));
        }
        Ok(c)
    }

    /// Builds a circuit for the representative with canonical key
    /// `rep_key` at level `gc` by stripping stored gates.
    fn reconstruct_rep(&self, rep_key: u64, gc: u8) -> Result<Circuit> {
        if gc == 0 {
            if rep_key != perm::identity_key(self.n) {
                return Err(Error::CorruptDb("level 0 holds a non-identity key".into()));
            }
            return Ok(Circuit::empty(self.n));
        }
        let lvl = &self.levels[gc as usize];
        let slot = lvl
            .keys
            .binary_search(&rep_key)
            .map_err(|_| Error::CorruptDb("key missing from its level".into()))?;
        let id = lvl.gates[slot];
        let lib = gate_library(self.n);
        if id as usize >= lib.len() {
            return Err(Error::CorruptDb(format!("bad stored gate id {id}")));
        }
        let h = lib[id as usize];
        let t = tables(self.n);

        // The discovery gate came off either end; find which (back first).
        let back = t.apply_key(self.n, rep_key, id);
        let (bk, bw) = canon_key(self.n, back);
        if self.lookup_key(bk) == Some(gc - 1) {
            let inner = self.reconstruct_rep(bk, gc - 1)?;
            let mut c = relabeling_by_index(self.n, bw as usize)
                .inverse()
                .transport(&inner);
            c.push(h);
            return Ok(c);
        }
        let front = t.apply_before_key(rep_key, id);
        let (fk, fw) = canon_key(self.n, front);
        if self.lookup_key(fk) == Some(gc - 1) {
            let inner = self.reconstruct_rep(fk, gc - 1)?;
            let tail = relabeling_by_index(self.n, fw as usize)
                .inverse()
                .transport(&inner);
            let mut gates = vec![h];
            gates.extend_from_slice(tail.gates());
            return Ok(Circuit::from_gates(self.n, gates)?);
        }
        Err(Error::CorruptDb(format!(
            "stored gate strips no level at gate count {gc}"
        )))
    }

    /// Writes the database in the RCDB format: magic `RCDB`, version,
    /// line count, depth, total entry count, then per level a count and
    /// `(key, gate count, gate id, reserved)` entries, all little-endian,
    /// with a trailing CRC-32 of everything before it.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf: Vec<u8> = Vec::with_capacity(20 + self.len() as usize * 12);
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.push(self.n);
        buf.push(self.depth);
        buf.extend_from_slice(&self.len().to_le_bytes());
        for (gc, lvl) in self.levels.iter().enumerate() {
            buf.extend_from_slice(&(lvl.keys.len() as u64).to_le_bytes());
            for (key, gate) in lvl.keys.iter().zip(&lvl.gates) {
                buf.extend_from_slice(&key.to_le_bytes());
                buf.push(gc as u8);
                buf.push(*gate);
                buf.extend_from_slice(&0u16.to_le_bytes());
            }
        }
        buf.extend_from_slice(&crc32fast::hash(&buf).to_le_bytes());
        fs::write(path, &buf)?;
        Ok(())
    }

    /// Reads a database back, validating checksum and structure.
    pub fn load(path: &Path) -> Result<OptimalDb> {
        let buf = fs::read(path)?;
        if buf.len() < 10 {
            return Err(Error::Truncated);
        }
        if &buf[0..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = u16::from_le_bytes([buf[4], buf[5]]);
        if version != VERSION {
            return Err(Error::BadVersion(version));
        }
        let (body, tail) = buf.split_at(buf.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().unwrap());
        if crc32fast::hash(body) != stored {
            return Err(Error::BadChecksum);
        }

        let mut cur = Cursor { buf: body, pos: 6 };
        let n = cur.u8()?;
        if n != 3 && n != 4 {
            return Err(Error::CorruptDb(format!("unsupported line count {n}")));
        }
        let depth = cur.u8()?;
        let total = cur.u64()?;
        let lib_len = gate_library(n).len() as GateId;

        let mut levels = Vec::with_capacity(depth as usize + 1);
        for gc in 0..=depth {
            let count = cur.u64()?;
            let mut keys = Vec::with_capacity(count as usize);
            let mut gates = Vec::with_capacity(count as usize);
            for e in 0..count {
                let key = cur.u64()?;
                let stored_gc = cur.u8()?;
                let gate = cur.u8()?;
                let reserved = cur.u16()?;
                if stored_gc != gc || reserved != 0 {
                    return Err(Error::CorruptDb(format!(
                        "entry {e} at level {gc} has bad fields"
                    )));
                }
                if !perm::is_valid_key(n, key) {
                    return Err(Error::CorruptDb(format!(
                        "entry {e} at level {gc} is not a permutation"
                    )));
                }
                if gc == 0 {
                    if key != perm::identity_key(n) || gate != NO_GATE {
                        return Err(Error::CorruptDb("level 0 must be the identity".into()));
                    }
                } else if gate >= lib_len {
                    return Err(Error::CorruptDb(format!(
                        "entry {e} at level {gc} has bad gate id {gate}"
                    )));
                }
                if let Some(&last) = keys.last() {
                    if key <= last {
                        return Err(Error::CorruptDb(format!("level {gc} keys unsorted")));
                    }
                }
                // Spot-check canonicity; full verification would dominate
                // load time on big files.
                if e % 4096 == 0 && canon_key(n, key).0 != key {
                    return Err(Error::CorruptDb(format!(
                        "entry {e} at level {gc} is not canonical"
                    )));
                }
                keys.push(key);
                gates.push(gate);
            }
            levels.push(Level { keys, gates });
        }
        if cur.pos != body.len() {
            return Err(Error::CorruptDb("trailing bytes after last level".into()));
        }
        let counted: u64 = levels.iter().map(|l| l.keys.len() as u64).sum();
        if counted != total || levels[0].keys.len() != 1 {
            return Err(Error::CorruptDb("entry count mismatch".into()));
        }
        Ok(OptimalDb::assemble(n, depth, levels))
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        if self.pos + len > self.buf.len() {
            return Err(Error::Truncated);
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
