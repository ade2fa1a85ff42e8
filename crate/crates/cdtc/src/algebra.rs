//! Bit-packed GF(2) vectors and matrices, plus symplectic Pauli vectors.

use std::fmt;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Dense vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { words, len };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i & 63);
        if b {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        xor_words(&mut self.words, &other.words);
    }

    pub fn and_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        parity_and(&self.words, &other.words)
    }

    /// Size of the intersection of supports.
    pub fn overlap(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    pub fn ones(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Lexicographic comparison reading bit 0 first (bit 0 most significant).
    pub fn lex_cmp(&self, other: &BitVec) -> std::cmp::Ordering {
        for i in 0..self.len.min(other.len) {
            match (self.get(i), other.get(i)) {
                (true, false) => return std::cmp::Ordering::Less,
                (false, true) => return std::cmp::Ordering::Greater,
                _ => {}
            }
        }
        self.len.cmp(&other.len)
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut v = BitVec::zeros(end - start);
        for i in self.iter_ones().filter(|&i| i >= start && i < end) {
            v.set(i - start, true);
        }
        v
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

#[inline]
pub(crate) fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= b;
    }
}

#[inline]
pub(crate) fn parity_and(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
}

/// Dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Output of [`BitMatrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + (c >> 6)] >> (c & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + (c >> 6)];
        let m = 1u64 << (c & 63);
        if b {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + (c >> 6)] ^= 1u64 << (c & 63);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn row_ones(&self, r: usize) -> Vec<usize> {
        self.row(r).ones()
    }

    pub fn push_row(&mut self, v: &BitVec) {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(v.words());
        self.rows += 1;
    }

    /// `rows[dst] ^= rows[src]`.
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        if dst == src {
            self.row_words_mut(dst).fill(0);
            return;
        }
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..(dst + 1) * s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..(src + 1) * s])
        };
        xor_words(a, b);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if parity_and(self.row_words(r), v.words()) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row(r).iter_ones() {
                let src = other.row_words(k).to_vec();
                xor_words(out.row_words_mut(r), &src);
            }
        }
        out
    }

    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                out.set(r, c, true);
            }
            for c in other.row(r).iter_ones() {
                out.set(r, self.cols + c, true);
            }
        }
        out
    }

    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            let src = self.row_words(r).to_vec();
            out.row_words_mut(i).copy_from_slice(&src);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Reduced row-echelon form with columns scanned left to right.
    pub fn rref(&self) -> Rref {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_with_order(&order)
    }

    /// RREF where pivot columns are searched in the given column order.
    pub fn rref_with_order(&self, order: &[usize]) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else { continue };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_row(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.data.truncate(r * m.stride);
        m.rows = r;
        Rref { reduced: m, pivots, rank: r }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of {v : M v = 0}, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let Rref { reduced, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::with_capacity(self.cols - pivots.len());
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            for (i, &p) in pivots.iter().enumerate() {
                if reduced.get(i, f) {
                    v.set(p, true);
                }
            }
            out.push(v);
        }
        out
    }

    /// Some x with M x = s, or None when the system is inconsistent.
    pub fn solve(&self, s: &BitVec) -> Option<BitVec> {
        assert_eq!(s.len(), self.rows, "syndrome length mismatch");
        let mut rhs = BitMatrix::zeros(self.rows, 1);
        for i in s.iter_ones() {
            rhs.set(i, 0, true);
        }
        let order: Vec<usize> = (0..self.cols).collect();
        let Rref { reduced, pivots, .. } = self.hstack(&rhs).rref_with_order(&order);
        let mut x = BitVec::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            if reduced.get(i, self.cols) {
                x.set(p, true);
            }
        }
        if self.mul_vec(&x) == *s {
            Some(x)
        } else {
            None
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

/// Incrementally built row-echelon basis for fast membership and reduction.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self { len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors<'a>(len: usize, vs: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let mut b = Self::new(len);
        for v in vs {
            b.insert(v.clone());
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn vectors(&self) -> &[BitVec] {
        &self.rows
    }

    /// Reduce `v` in place against the basis; the result is canonical for the coset.
    pub fn reduce(&self, v: &mut BitVec) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Add `v`; returns false when it was already in the span.
    pub fn insert(&mut self, mut v: BitVec) -> bool {
        assert_eq!(v.len(), self.len, "length mismatch");
        self.reduce(&mut v);
        let Some(p) = v.first_one() else { return false };
        // keep fully reduced: clear p from existing rows
        for row in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

/// Pauli operator on n qubits without phase, stored as (x | z) bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliVec {
    pub x: BitVec,
    pub z: BitVec,
}

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        (ax & bz) ^ (az & bx)
    }

    pub fn mul(self, other: Pauli) -> Pauli {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        Pauli::from_bits(ax ^ bx, az ^ bz)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn parse(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl PauliVec {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVec::zeros(n), z: BitVec::zeros(n) }
    }

    pub fn new(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len(), "x/z length mismatch");
        Self { x, z }
    }

    pub fn pure_z(z: BitVec) -> Self {
        Self { x: BitVec::zeros(z.len()), z }
    }

    pub fn pure_x(x: BitVec) -> Self {
        Self { z: BitVec::zeros(x.len()), x }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut v = Self::identity(n);
        v.set(q, p);
        v
    }

    /// Parse a string such as "XIZY".
    pub fn from_str_paulis(s: &str) -> Option<Self> {
        let chars: Vec<char> = s.chars().collect();
        let mut v = Self::identity(chars.len());
        for (i, c) in chars.into_iter().enumerate() {
            v.set(i, Pauli::parse(c)?);
        }
        Some(v)
    }

    /// From a length-2n symplectic vector (x | z).
    pub fn from_symplectic(v: &BitVec) -> Self {
        let n = v.len() / 2;
        Self { x: v.slice(0, n), z: v.slice(n, 2 * n) }
    }

    pub fn to_symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> BitVec {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_pure_z(&self) -> bool {
        self.x.is_zero()
    }

    pub fn mul(&self, other: &PauliVec) -> PauliVec {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    pub fn mul_assign(&mut self, other: &PauliVec) {
        assert_eq!(self.n(), other.n(), "length mismatch");
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Zero every qubit outside `support`.
    pub fn restrict(&self, support: &BitVec) -> PauliVec {
        let mut out = self.clone();
        out.x.and_assign(support);
        out.z.and_assign(support);
        out
    }
}

/// 1 iff the two operators anticommute.
pub fn symplectic_product(a: &PauliVec, b: &PauliVec) -> bool {
    assert_eq!(a.n(), b.n(), "length mismatch");
    a.x.dot(&b.z) ^ a.z.dot(&b.x)
}

impl fmt::Debug for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.n()).map(|q| self.get(q).symbol()).collect();
        write!(f, "Pauli({s})")
    }
}

impl fmt::Display for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n() {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rref() {
        let r = BitMatrix::identity(4).rref();
        assert_eq!(r.rank, 4);
        assert_eq!(r.pivots, vec![0, 1, 2, 3]);
    }

    #[test]
    fn duplicate_rows_rank_one() {
        assert_eq!(BitMatrix::from_dense(&[vec![1, 1], vec![1, 1]]).rank(), 1);
    }

    #[test]
    fn kernel_of_zero_and_invertible() {
        assert_eq!(BitMatrix::zeros(3, 5).kernel_basis().len(), 5);
        assert!(BitMatrix::identity(6).kernel_basis().is_empty());
    }

    #[test]
    fn solve_small_cases() {
        let s = BitVec::from_indices(5, &[0, 3]);
        assert_eq!(BitMatrix::identity(5).solve(&s), Some(s.clone()));
        let m = BitMatrix::from_dense(&[vec![1, 1]]);
        let x = m.solve(&BitVec::from_indices(1, &[0])).unwrap();
        assert_eq!(x.weight(), 1);
        let m = BitMatrix::from_dense(&[vec![1, 0], vec![1, 0]]);
        assert_eq!(m.solve(&BitVec::from_indices(2, &[0])), None);
    }

    #[test]
    fn symplectic_basics() {
        let x0 = PauliVec::single(2, 0, Pauli::X);
        let z0 = PauliVec::single(2, 0, Pauli::Z);
        let y0 = PauliVec::single(2, 0, Pauli::Y);
        assert!(symplectic_product(&x0, &z0));
        assert!(!symplectic_product(&x0, &x0));
        assert!(symplectic_product(&y0, &z0));
        assert!(x0.mul(&x0).is_identity());
        let zz = PauliVec::from_str_paulis("ZZ").unwrap();
        assert_eq!(zz.weight(), 2);
    }

    #[test]
    fn echelon_basis_membership() {
        let a = BitVec::from_indices(6, &[0, 2]);
        let b = BitVec::from_indices(6, &[2, 5]);
        let basis = EchelonBasis::from_vectors(6, [&a, &b]);
        let mut c = a.clone();
        c.xor_assign(&b);
        assert!(basis.contains(&c));
        assert!(!basis.contains(&BitVec::from_indices(6, &[1])));
        assert_eq!(basis.dim(), 2);
    }

    #[test]
    fn xor_row_both_directions() {
        let mut m = BitMatrix::from_dense(&[vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 1]]);
        m.xor_row(0, 2);
        m.xor_row(2, 1);
        assert_eq!(m.row_ones(0), vec![1]);
        assert_eq!(m.row_ones(2), vec![0]);
    }
}
