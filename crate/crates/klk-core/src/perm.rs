//! Permutations of S_n: products, Bruhat order, descents, parabolic
//! longest elements, and Robinson–Schensted data.
//!
//! Convention, fixed once for the whole crate: permutations act on
//! positions from the left, `(a·b)(i) = a(b(i))`, so in a word such as
//! `s2·s1·s3·s2` the rightmost factor is applied first. With this choice
//! cell tables come out with insertion tableaux labelling rows
//! and recording tableaux labelling columns; the cells module
//! cross-validates that against the Hecke-algebra preorder.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;

/// Default bound on the rank; n! enumeration above this is refused.
pub const DEFAULT_RANK_CAP: u8 = 8;

/// An element of S_n in one-line notation: `one_line[i-1]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    one_line: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: u8) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPermutation("rank 0 is not allowed".into()));
        }
        Ok(Permutation {
            one_line: (1..=n).collect(),
        })
    }

    /// The transposition of `i`, `i+1`, for `1 ≤ i ≤ n−1`.
    pub fn simple_reflection(i: u8, n: u8) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::InvalidGenerator { index: i, n });
        }
        let mut w = Self::identity(n)?;
        w.one_line.swap((i - 1) as usize, i as usize);
        Ok(w)
    }

    pub fn from_one_line(one_line: Vec<u8>) -> Result<Self> {
        let n = one_line.len();
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::InvalidPermutation(format!(
                "bad length {n} for one-line notation"
            )));
        }
        let mut seen = vec![false; n];
        for &v in &one_line {
            if v == 0 || v as usize > n || seen[(v - 1) as usize] {
                return Err(Error::InvalidPermutation(format!(
                    "{one_line:?} is not a bijection of 1..={n}"
                )));
            }
            seen[(v - 1) as usize] = true;
        }
        Ok(Permutation { one_line })
    }

    /// Product of the simple reflections named by `word`, left to right
    /// (so `[2,1,3,2]` is s2·s1·s3·s2). The word need not be reduced.
    pub fn from_word(word: &[u8], n: u8) -> Result<Self> {
        let mut acc = Self::identity(n)?;
        for &i in word {
            let s = Self::simple_reflection(i, n)?;
            acc = acc.multiply(&s)?;
        }
        Ok(acc)
    }

    pub fn n(&self) -> u8 {
        self.one_line.len() as u8
    }

    pub fn one_line(&self) -> &[u8] {
        &self.one_line
    }

    /// Image of `i` (1-based).
    pub fn apply(&self, i: u8) -> u8 {
        self.one_line[(i - 1) as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.one_line.iter().enumerate().all(|(k, &v)| v as usize == k + 1)
    }

    /// `(a·b)(i) = a(b(i))`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::RankMismatch(self.n(), other.n()));
        }
        Ok(Permutation {
            one_line: other.one_line.iter().map(|&i| self.apply(i)).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.one_line.len()];
        for (pos, &val) in self.one_line.iter().enumerate() {
            inv[(val - 1) as usize] = pos as u8 + 1;
        }
        Permutation { one_line: inv }
    }

    /// Coxeter length = number of inversions of the one-line form.
    pub fn length(&self) -> u32 {
        let v = &self.one_line;
        let mut count = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Right multiplication by s_i swaps positions i, i+1.
    pub fn is_right_descent(&self, i: u8) -> bool {
        debug_assert!(i >= 1 && i < self.n());
        self.one_line[(i - 1) as usize] > self.one_line[i as usize]
    }

    /// Left multiplication by s_i swaps the values i, i+1.
    pub fn is_left_descent(&self, i: u8) -> bool {
        self.inverse().is_right_descent(i)
    }

    pub fn right_descents(&self) -> Vec<u8> {
        (1..self.n()).filter(|&i| self.is_right_descent(i)).collect()
    }

    pub fn left_descents(&self) -> Vec<u8> {
        self.inverse().right_descents()
    }

    /// Bruhat order by the sorted-prefix dominance criterion. Agrees with
    /// the transitive closure of the covering relation (oracle module).
    pub fn bruhat_leq(&self, other: &Self) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::RankMismatch(self.n(), other.n()));
        }
        let n = self.one_line.len();
        let mut a: Vec<u8> = Vec::with_capacity(n);
        let mut b: Vec<u8> = Vec::with_capacity(n);
        for i in 0..n - 1 {
            let ai = self.one_line[i];
            let bi = other.one_line[i];
            a.insert(a.partition_point(|&x| x < ai), ai);
            b.insert(b.partition_point(|&x| x < bi), bi);
            if a.iter().zip(b.iter()).any(|(x, y)| x > y) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Longest element of the standard parabolic subgroup generated by
    /// `{s_i : i ∈ gens}`. Indices outside 1..n−1 are rejected.
    pub fn longest_element(gens: &[u8], n: u8) -> Result<Self> {
        let mut w = Self::identity(n)?;
        let mut flags = vec![false; n as usize];
        for &i in gens {
            if i == 0 || i >= n {
                return Err(Error::InvalidGenerator { index: i, n });
            }
            flags[i as usize] = true;
        }
        // Each maximal run of consecutive generators i..=j contributes the
        // order-reversal of positions i..=j+1.
        let mut i = 1usize;
        while i < n as usize {
            if flags[i] {
                let mut j = i;
                while j + 1 < n as usize && flags[j + 1] {
                    j += 1;
                }
                w.one_line[i - 1..=j].reverse();
                i = j + 1;
            } else {
                i += 1;
            }
        }
        Ok(w)
    }

    /// All n! elements in lexicographic order of one-line notation. This
    /// order is the enumeration every table in the crate is indexed by.
    pub fn elements(n: u8) -> Result<Vec<Self>> {
        Self::elements_capped(n, DEFAULT_RANK_CAP)
    }

    pub fn elements_capped(n: u8, cap: u8) -> Result<Vec<Self>> {
        if n == 0 {
            return Err(Error::InvalidPermutation("rank 0 is not allowed".into()));
        }
        if n > cap {
            return Err(Error::CapacityExceeded { n, cap });
        }
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (1..=n).collect();
        loop {
            out.push(Permutation {
                one_line: cur.clone(),
            });
            // next_permutation in lexicographic order
            let Some(i) = (0..cur.len() - 1).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        Ok(out)
    }

    pub fn is_involution(&self) -> bool {
        self.one_line
            .iter()
            .enumerate()
            .all(|(pos, &val)| self.one_line[(val - 1) as usize] as usize == pos + 1)
    }

    /// Row-insertion RSK.
    pub fn rsk(&self) -> TableauPair {
        let mut p: Vec<Vec<u8>> = Vec::new();
        let mut q: Vec<Vec<u8>> = Vec::new();
        for (step, &val) in self.one_line.iter().enumerate() {
            let mut carry = val;
            let mut row = 0;
            loop {
                if row == p.len() {
                    p.push(vec![carry]);
                    q.push(vec![step as u8 + 1]);
                    break;
                }
                let r = &mut p[row];
                let pos = r.partition_point(|&x| x < carry);
                if pos == r.len() {
                    r.push(carry);
                    q[row].push(step as u8 + 1);
                    break;
                }
                std::mem::swap(&mut r[pos], &mut carry);
                row += 1;
            }
        }
        TableauPair {
            p: Tableau { rows: p },
            q: Tableau { rows: q },
        }
    }

    /// Shape of the RSK tableaux.
    pub fn shape(&self) -> Vec<u8> {
        self.rsk().p.shape()
    }

    /// Lexicographically smallest reduced word, built greedily from the
    /// smallest left descent.
    pub fn lexmin_reduced_word(&self) -> Vec<u8> {
        let mut word = Vec::with_capacity(self.length() as usize);
        let mut w = self.clone();
        let n = w.n();
        'outer: loop {
            for i in 1..n {
                if w.is_left_descent(i) {
                    word.push(i);
                    let s = Self::simple_reflection(i, n).unwrap();
                    w = s.multiply(&w).unwrap();
                    continue 'outer;
                }
            }
            return word;
        }
    }

    /// Image under the diagram automorphism s_i ↦ s_{n−i}, i.e. w ↦ w₀ w w₀.
    pub fn diagram_flip(&self) -> Self {
        let n = self.one_line.len();
        let mut out = vec![0u8; n];
        for (pos, &val) in self.one_line.iter().enumerate() {
            out[n - 1 - pos] = (n as u8) + 1 - val;
        }
        Permutation { one_line: out }
    }

    /// One-line text form: digits for n ≤ 9, comma-separated for larger.
    pub fn one_line_string(&self) -> String {
        if self.n() <= 9 {
            self.one_line.iter().map(|v| v.to_string()).collect()
        } else {
            self.one_line
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Concatenated lexmin reduced word, `"e"` for the identity; the
    /// compact generator-index naming ("2143" = s2·s1·s4·s3) every table
    /// rendering uses.
    pub fn word_string(&self) -> String {
        let word = self.lexmin_reduced_word();
        if word.is_empty() {
            "e".to_string()
        } else {
            word.iter().map(|i| i.to_string()).collect()
        }
    }

    /// Parses `"2143"`, `"2,1,4,3"` (one-line) or `"w:2,1,3,2"` (reduced
    /// word, product left to right) as an element of S_n.
    pub fn parse(text: &str, n: u8) -> Result<Self> {
        let text = text.trim();
        if let Some(word) = text.strip_prefix("w:") {
            let idx = parse_index_list(word)?;
            return Self::from_word(&idx, n);
        }
        let one_line = parse_index_list(text)?;
        if one_line.len() != n as usize {
            return Err(Error::InvalidPermutation(format!(
                "\"{text}\" has {} entries, expected {n}",
                one_line.len()
            )));
        }
        Self::from_one_line(one_line)
    }
}

fn parse_index_list(text: &str) -> Result<Vec<u8>> {
    let bad = |t: &str| Error::InvalidPermutation(format!("cannot parse \"{t}\""));
    if text.is_empty() {
        return Err(bad(text));
    }
    if text.contains(',') {
        text.split(',')
            .map(|part| part.trim().parse::<u8>().map_err(|_| bad(text)))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| bad(text)))
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.one_line_string())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({})", self.one_line_string())
    }
}

/// A standard Young tableau, rows strictly increasing left to right and
/// columns strictly increasing top to bottom.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tableau {
    rows: Vec<Vec<u8>>,
}

impl Tableau {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn shape(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r.len() as u8).collect()
    }

    pub fn is_standard(&self, n: u8) -> bool {
        let mut seen = vec![false; n as usize + 1];
        let mut total = 0usize;
        for (ri, row) in self.rows.iter().enumerate() {
            if ri > 0 && row.len() > self.rows[ri - 1].len() {
                return false;
            }
            for (ci, &v) in row.iter().enumerate() {
                if v == 0 || v > n || seen[v as usize] {
                    return false;
                }
                seen[v as usize] = true;
                total += 1;
                if ci > 0 && row[ci - 1] >= v {
                    return false;
                }
                if ri > 0 && self.rows[ri - 1][ci] >= v {
                    return false;
                }
            }
        }
        total == n as usize
    }

    /// Compact text form: rows joined by `/`, e.g. `135/24`.
    pub fn compact(&self) -> String {
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<String>())
            .collect::<Vec<_>>()
            .join("/")
    }

    /// Parses the compact form.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Result<Vec<Vec<u8>>> = text
            .split('/')
            .map(|row| {
                row.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| Error::InvalidPermutation(format!("bad tableau \"{text}\"")))
                    })
                    .collect()
            })
            .collect();
        Ok(Tableau { rows: rows? })
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.compact())
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tableau({})", self.compact())
    }
}

/// The Robinson–Schensted pair: `p` the insertion tableau, `q` the
/// recording tableau. `w` is an involution iff `p == q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TableauPair {
    pub p: Tableau,
    pub q: Tableau,
}

impl TableauPair {
    pub fn shape(&self) -> Vec<u8> {
        self.p.shape()
    }

    /// Inverse RSK by reverse row insertion; `inverse_rsk(rsk(w)) == w`.
    pub fn inverse_rsk(&self) -> Result<Permutation> {
        let n: usize = self.p.rows.iter().map(|r| r.len()).sum();
        if self.p.shape() != self.q.shape()
            || !self.p.is_standard(n as u8)
            || !self.q.is_standard(n as u8)
        {
            return Err(Error::InvalidPermutation(
                "not a same-shape pair of standard tableaux".into(),
            ));
        }
        let mut p = self.p.rows.clone();
        let mut one_line = vec![0u8; n];
        for step in (1..=n as u8).rev() {
            let (row, _) = self
                .q
                .rows
                .iter()
                .enumerate()
                .find_map(|(ri, r)| r.iter().position(|&v| v == step).map(|ci| (ri, ci)))
                .expect("standard recording tableau covers 1..=n");
            let mut carry = p[row].pop().unwrap();
            for r in p[..row].iter_mut().rev() {
                // rightmost entry strictly smaller than the carry
                let pos = r.partition_point(|&x| x < carry) - 1;
                std::mem::swap(&mut r[pos], &mut carry);
            }
            one_line[step as usize - 1] = carry;
        }
        Permutation::from_one_line(one_line)
    }
}

/// Partition text form `"2,2,1"`.
pub fn shape_string(shape: &[u8]) -> String {
    shape
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_shape(text: &str, n: u8) -> Result<Vec<u8>> {
    let parts = parse_index_list(text)?;
    let total: u32 = parts.iter().map(|&v| v as u32).sum();
    let decreasing = parts.windows(2).all(|w| w[0] >= w[1]);
    if total != n as u32 || !decreasing || parts.contains(&0) {
        return Err(Error::UnknownShape(format!(
            "\"{text}\" is not a partition of {n}"
        )));
    }
    Ok(parts)
}

/// Conjugate (transpose) partition.
pub fn conjugate_shape(shape: &[u8]) -> Vec<u8> {
    let Some(&first) = shape.first() else {
        return Vec::new();
    };
    (1..=first)
        .map(|col| shape.iter().filter(|&&len| len >= col).count() as u8)
        .collect()
}

/// Precomputed tables for one rank: the lexicographic element list, index
/// lookups, lengths, generator multiplication tables and inverses. Every
/// index-addressed structure in the crate (KL table, cells, characters)
/// refers to this enumeration.
pub struct GroupData {
    n: u8,
    elems: Vec<Permutation>,
    index: HashMap<Vec<u8>, u32>,
    len: Vec<u16>,
    /// `right[e * (n-1) + (i-1)]` = index of elems[e] · s_i
    right: Vec<u32>,
    /// `left[e * (n-1) + (i-1)]` = index of s_i · elems[e]
    left: Vec<u32>,
    inv: Vec<u32>,
}

impl GroupData {
    pub fn new(n: u8) -> Result<Self> {
        Self::new_capped(n, DEFAULT_RANK_CAP)
    }

    pub fn new_capped(n: u8, cap: u8) -> Result<Self> {
        let elems = Permutation::elements_capped(n, cap)?;
        let index: HashMap<Vec<u8>, u32> = elems
            .iter()
            .enumerate()
            .map(|(i, p)| (p.one_line().to_vec(), i as u32))
            .collect();
        let len: Vec<u16> = elems.iter().map(|p| p.length() as u16).collect();
        let gens = n.saturating_sub(1) as usize;
        let mut right = vec![0u32; elems.len() * gens];
        let mut left = vec![0u32; elems.len() * gens];
        let mut inv = vec![0u32; elems.len()];
        for (e, p) in elems.iter().enumerate() {
            inv[e] = index[p.inverse().one_line()];
            for i in 1..n {
                let mut r = p.one_line().to_vec();
                r.swap((i - 1) as usize, i as usize);
                right[e * gens + (i - 1) as usize] = index[&r];
                let l: Vec<u8> = p
                    .one_line()
                    .iter()
                    .map(|&v| match v {
                        v if v == i => i + 1,
                        v if v == i + 1 => i,
                        v => v,
                    })
                    .collect();
                left[e * gens + (i - 1) as usize] = index[&l];
            }
        }
        Ok(GroupData {
            n,
            elems,
            index,
            len,
            right,
            left,
            inv,
        })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn perm(&self, idx: u32) -> &Permutation {
        &self.elems[idx as usize]
    }

    pub fn elems(&self) -> &[Permutation] {
        &self.elems
    }

    pub fn index_of(&self, p: &Permutation) -> Result<u32> {
        if p.n() != self.n {
            return Err(Error::RankMismatch(p.n(), self.n));
        }
        Ok(self.index[p.one_line()])
    }

    pub fn length(&self, idx: u32) -> u32 {
        self.len[idx as usize] as u32
    }

    pub fn identity_index(&self) -> u32 {
        self.index[&(1..=self.n).collect::<Vec<u8>>()]
    }

    pub fn longest_index(&self) -> u32 {
        self.index[&(1..=self.n).rev().collect::<Vec<u8>>()]
    }

    pub fn right_mul_gen(&self, idx: u32, i: u8) -> u32 {
        self.right[idx as usize * (self.n - 1) as usize + (i - 1) as usize]
    }

    pub fn left_mul_gen(&self, idx: u32, i: u8) -> u32 {
        self.left[idx as usize * (self.n - 1) as usize + (i - 1) as usize]
    }

    pub fn inverse_of(&self, idx: u32) -> u32 {
        self.inv[idx as usize]
    }

    pub fn is_right_descent(&self, idx: u32, i: u8) -> bool {
        self.length(self.right_mul_gen(idx, i)) < self.length(idx)
    }

    /// Smallest right descent, `None` on the identity.
    pub fn first_right_descent(&self, idx: u32) -> Option<u8> {
        (1..self.n).find(|&i| self.is_right_descent(idx, i))
    }

    pub fn involution_indices(&self) -> Vec<u32> {
        (0..self.order() as u32)
            .filter(|&i| self.inv[i as usize] == i)
            .collect()
    }
}
