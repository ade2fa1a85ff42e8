//! Open- and periodic-boundary tile codes and their parameters.

use crate::algebra::{symplectic_product, BitMatrix, BitVec, EchelonBasis, PauliVec};
use crate::Error;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Which CSS family a check descends from, kept through deformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CheckKind {
    X,
    Z,
}

/// Edge-qubit geometry of an Lx×Ly lattice. Horizontal edge (x,y) is qubit
/// `x + Lx*y`, vertical edge (x,y) is `Lx*Ly + x + Lx*y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileLayout {
    pub lx: usize,
    pub ly: usize,
    pub boundary: Boundary,
}

impl TileLayout {
    pub fn n(&self) -> usize {
        2 * self.lx * self.ly
    }

    pub fn qubit(&self, o: Orientation, x: usize, y: usize) -> usize {
        let base = match o {
            Orientation::Horizontal => 0,
            Orientation::Vertical => self.lx * self.ly,
        };
        base + x + self.lx * y
    }

    /// Qubit at signed coordinates, wrapping on the torus, `None` off an open lattice.
    pub fn qubit_at(&self, o: Orientation, x: i64, y: i64) -> Option<usize> {
        let (lx, ly) = (self.lx as i64, self.ly as i64);
        match self.boundary {
            Boundary::Periodic => Some(self.qubit(o, x.rem_euclid(lx) as usize, y.rem_euclid(ly) as usize)),
            Boundary::Open => {
                if (0..lx).contains(&x) && (0..ly).contains(&y) {
                    Some(self.qubit(o, x as usize, y as usize))
                } else {
                    None
                }
            }
        }
    }

    pub fn site(&self, q: usize) -> (Orientation, usize, usize) {
        let a = self.lx * self.ly;
        let (o, r) = if q < a { (Orientation::Horizontal, q) } else { (Orientation::Vertical, q - a) };
        (o, r % self.lx, r / self.lx)
    }

    /// Planar position used for locality heuristics (vertical edges offset by half a cell).
    pub fn position(&self, q: usize) -> (f64, f64) {
        let (o, x, y) = self.site(q);
        match o {
            Orientation::Horizontal => (x as f64 + 0.5, y as f64),
            Orientation::Vertical => (x as f64, y as f64 + 0.5),
        }
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (ax, ay) = self.position(a);
        let (bx, by) = self.position(b);
        let mut dx = (ax - bx).abs();
        let mut dy = (ay - by).abs();
        if self.boundary == Boundary::Periodic {
            dx = dx.min(self.lx as f64 - dx);
            dy = dy.min(self.ly as f64 - dy);
        }
        dx.max(dy)
    }
}

pub type Offset = (i64, i64);

/// Bulk check shape: X checks use `x_h` on horizontal and `x_v` on vertical edges;
/// Z checks are the point reflections inside the 3×3 box with the roles swapped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTemplate {
    pub x_h: [Offset; 3],
    pub x_v: [Offset; 3],
    pub z_h: [Offset; 3],
    pub z_v: [Offset; 3],
    /// X checks overhang the lattice along x (anchors -2..L), Z checks along y.
    pub x_overhang_in_x: bool,
}

/// Horizontal X support of the bulk check.
pub const HORIZONTAL_TRIPLE: [Offset; 3] = [(0, 0), (2, 1), (2, 2)];

fn reflect(o: [Offset; 3]) -> [Offset; 3] {
    let mut r = o.map(|(x, y)| (2 - x, 2 - y));
    r.sort();
    r
}

fn d4_images(s: [Offset; 3]) -> Vec<[Offset; 3]> {
    let maps: [fn(i64, i64) -> Offset; 8] = [
        |x, y| (x, y),
        |x, y| (2 - x, y),
        |x, y| (x, 2 - y),
        |x, y| (2 - x, 2 - y),
        |x, y| (y, x),
        |x, y| (2 - y, x),
        |x, y| (y, 2 - x),
        |x, y| (2 - y, 2 - x),
    ];
    let mut out: Vec<[Offset; 3]> = maps
        .iter()
        .map(|f| {
            let mut t = s.map(|(x, y)| f(x, y));
            t.sort();
            t
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

impl StabilizerTemplate {
    pub fn new(x_v: [Offset; 3], x_overhang_in_x: bool) -> Self {
        let mut x_h = HORIZONTAL_TRIPLE;
        x_h.sort();
        let mut x_v = x_v;
        x_v.sort();
        Self { x_h, x_v, z_h: reflect(x_v), z_v: reflect(x_h), x_overhang_in_x }
    }

    /// All symmetry-image candidates in lexicographic order.
    pub fn candidates() -> Vec<StabilizerTemplate> {
        let mut out = Vec::new();
        for img in d4_images(HORIZONTAL_TRIPLE) {
            for over in [true, false] {
                out.push(StabilizerTemplate::new(img, over));
            }
        }
        out
    }

    /// First candidate that passes validation; cached after the first call.
    pub fn default_validated() -> Result<&'static StabilizerTemplate, Error> {
        use std::sync::OnceLock;
        static CELL: OnceLock<Result<StabilizerTemplate, String>> = OnceLock::new();
        CELL.get_or_init(|| {
            let mut log = String::new();
            for t in Self::candidates() {
                match t.validate() {
                    Ok(()) => return Ok(t),
                    Err(e) => {
                        let _ = writeln!(log, "{:?}/{}: {e}", t.x_v, t.x_overhang_in_x);
                    }
                }
            }
            Err(log)
        })
        .as_ref()
        .map_err(|log| Error::Validation(format!("no bulk template candidate validates:\n{log}")))
    }

    fn validate(&self) -> Result<(), String> {
        for l in [7usize, 14] {
            let c = build_with_template(self, l, l, Boundary::Periodic);
            if !c.code.is_commuting() {
                return Err(format!("periodic {l}x{l}: checks do not commute"));
            }
            if c.code.k() != 6 {
                return Err(format!("periodic {l}x{l}: k = {}", c.code.k()));
            }
        }
        for l in [6usize, 8] {
            let c = build_with_template(self, l, l, Boundary::Open);
            if !c.code.is_commuting() {
                return Err(format!("open L={l}: checks do not commute"));
            }
            if c.code.rank() != c.code.m() {
                return Err(format!("open L={l}: checks dependent"));
            }
            if c.code.k() != 8 {
                return Err(format!("open L={l}: k = {}", c.code.k()));
            }
            if (0..c.layout.n()).any(|q| c.code.qubit_degree(q) == 0) {
                return Err(format!("open L={l}: idle qubit"));
            }
        }
        Ok(())
    }
}

/// Generic stabilizer code given by a symplectic check matrix [x | z].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerCode {
    n: usize,
    checks: BitMatrix,
    kinds: Vec<CheckKind>,
}

impl StabilizerCode {
    pub fn new(n: usize, checks: BitMatrix, kinds: Vec<CheckKind>) -> Self {
        assert_eq!(checks.cols(), 2 * n, "check matrix must have 2n columns");
        assert_eq!(checks.rows(), kinds.len(), "one kind per check");
        Self { n, checks, kinds }
    }

    /// CSS code from X-check and Z-check supports.
    pub fn css(hx: &BitMatrix, hz: &BitMatrix) -> Self {
        let n = hx.cols();
        assert_eq!(hz.cols(), n);
        let zero_x = BitMatrix::zeros(hx.rows(), n);
        let zero_z = BitMatrix::zeros(hz.rows(), n);
        let checks = hx.hstack(&zero_x).vstack(&zero_z.hstack(hz));
        let mut kinds = vec![CheckKind::X; hx.rows()];
        kinds.extend(std::iter::repeat(CheckKind::Z).take(hz.rows()));
        Self { n, checks, kinds }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.checks.rows()
    }

    pub fn checks(&self) -> &BitMatrix {
        &self.checks
    }

    pub fn kinds(&self) -> &[CheckKind] {
        &self.kinds
    }

    pub fn check(&self, i: usize) -> PauliVec {
        PauliVec::from_symplectic(&self.checks.row(i))
    }

    pub fn check_paulis(&self) -> Vec<PauliVec> {
        (0..self.m()).map(|i| self.check(i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.checks.rank()
    }

    pub fn k(&self) -> usize {
        self.n - self.rank()
    }

    /// X-part of every check, an m×n matrix. A pure-Z error z has syndrome x_part·z.
    pub fn x_part(&self) -> BitMatrix {
        self.checks.select_columns(&(0..self.n).collect::<Vec<_>>())
    }

    pub fn z_part(&self) -> BitMatrix {
        self.checks.select_columns(&(self.n..2 * self.n).collect::<Vec<_>>())
    }

    pub fn is_commuting(&self) -> bool {
        let ps = self.check_paulis();
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                if symplectic_product(&ps[i], &ps[j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_css(&self) -> bool {
        (0..self.m()).all(|i| {
            let p = self.check(i);
            p.x.is_zero() || p.z.is_zero()
        })
    }

    pub fn check_weight(&self, i: usize) -> usize {
        self.check(i).weight()
    }

    pub fn qubit_degree(&self, q: usize) -> usize {
        (0..self.m()).filter(|&i| self.checks.get(i, q) || self.checks.get(i, self.n + q)).count()
    }

    pub fn syndrome(&self, e: &PauliVec) -> BitVec {
        let mut s = BitVec::zeros(self.m());
        for i in 0..self.m() {
            if symplectic_product(&self.check(i), e) {
                s.set(i, true);
            }
        }
        s
    }

    /// Matrix whose product with a symplectic error vector (x | z) gives the syndrome.
    pub fn parity_matrix(&self) -> BitMatrix {
        self.z_part().hstack(&self.x_part())
    }

    pub fn stabilizer_basis(&self) -> EchelonBasis {
        EchelonBasis::from_vectors(2 * self.n, self.checks.row_vecs().iter())
    }

    pub fn is_stabilizer(&self, p: &PauliVec) -> bool {
        self.stabilizer_basis().contains(&p.to_symplectic())
    }

    /// Nontrivial logical: commutes with every check and lies outside the check span.
    pub fn is_logical(&self, p: &PauliVec) -> bool {
        self.syndrome(p).is_zero() && !self.is_stabilizer(p)
    }

    /// 2k operators spanning normalizer/stabilizer.
    pub fn logical_operators(&self) -> Vec<PauliVec> {
        let normalizer = self.parity_matrix().kernel_basis();
        let mut basis = self.stabilizer_basis();
        let mut out = Vec::new();
        for v in normalizer {
            if basis.insert(v.clone()) {
                out.push(PauliVec::from_symplectic(&v));
            }
        }
        out
    }

    /// Pure-X and pure-Z logical representatives of a CSS code (k of each).
    pub fn css_logicals(&self) -> (Vec<PauliVec>, Vec<PauliVec>) {
        let xs = self.pure_logicals(true);
        let zs = self.pure_logicals(false);
        (xs, zs)
    }

    fn pure_logicals(&self, want_x: bool) -> Vec<PauliVec> {
        let n = self.n;
        // a pure-X operator commutes with checks through their z-part, and vice versa
        let relevant = if want_x { self.z_part() } else { self.x_part() };
        let mut basis = self.stabilizer_basis();
        let mut out = Vec::new();
        for v in relevant.kernel_basis() {
            let p = if want_x { PauliVec::pure_x(v) } else { PauliVec::pure_z(v) };
            if basis.insert(p.to_symplectic()) {
                out.push(p);
            }
        }
        debug_assert!(out.len() <= n);
        out
    }

    /// Undirected qubit adjacency (sharing a check) restricted to the given checks.
    fn adjacency(&self, rows: &[usize]) -> Vec<BitVec> {
        let mut adj = vec![BitVec::zeros(self.n); self.n];
        for &i in rows {
            let s = self.check(i).support().ones();
            for &a in &s {
                for &b in &s {
                    if a != b {
                        adj[a].set(b, true);
                    }
                }
            }
        }
        adj
    }
}

/// Distance record attached to a code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceRecord {
    Exact { value: usize, certificate: PauliVec },
    Upper { value: usize, certificate: PauliVec },
    AtLeast(usize),
}

#[derive(Clone, Debug)]
pub struct TileCode {
    pub layout: TileLayout,
    pub template: StabilizerTemplate,
    pub code: StabilizerCode,
    pub anchors: Vec<(i64, i64)>,
    pub distance: Option<DistanceRecord>,
}

impl TileCode {
    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn k(&self) -> usize {
        self.code.k()
    }

    pub fn vertical_qubits(&self) -> Vec<usize> {
        (0..self.n()).filter(|&q| self.layout.site(q).0 == Orientation::Vertical).collect()
    }
}

fn build_with_template(t: &StabilizerTemplate, lx: usize, ly: usize, boundary: Boundary) -> TileCode {
    let layout = TileLayout { lx, ly, boundary };
    let n = layout.n();
    let mut rows = Vec::new();
    let mut kinds = Vec::new();
    let mut anchors = Vec::new();
    let range = |over: bool, l: usize| -> std::ops::Range<i64> {
        match boundary {
            Boundary::Periodic => 0..l as i64,
            Boundary::Open if over => -2..l as i64,
            Boundary::Open => 0..l as i64 - 2,
        }
    };
    let mut emit = |kind: CheckKind, a: i64, b: i64, h: &[Offset; 3], v: &[Offset; 3]| {
        let mut row = BitVec::zeros(2 * n);
        let base = if kind == CheckKind::X { 0 } else { n };
        let mut w = 0;
        for (o, offs) in [(Orientation::Horizontal, h), (Orientation::Vertical, v)] {
            for &(dx, dy) in offs.iter() {
                if let Some(q) = layout.qubit_at(o, a + dx, b + dy) {
                    row.flip(base + q);
                    w += 1;
                }
            }
        }
        if w >= 2 {
            rows.push(row);
            kinds.push(kind);
            anchors.push((a, b));
        }
    };
    for b in range(!t.x_overhang_in_x, ly) {
        for a in range(t.x_overhang_in_x, lx) {
            emit(CheckKind::X, a, b, &t.x_h, &t.x_v);
        }
    }
    for b in range(t.x_overhang_in_x, ly) {
        for a in range(!t.x_overhang_in_x, lx) {
            emit(CheckKind::Z, a, b, &t.z_h, &t.z_v);
        }
    }
    let code = StabilizerCode::new(n, BitMatrix::from_rows(2 * n, &rows), kinds);
    TileCode { layout, template: t.clone(), code, anchors, distance: None }
}

/// Sizes whose open-code parameters are validated (n = 2L², k = 8).
pub const VALIDATED_OPEN_SIZES: [usize; 6] = [6, 8, 10, 12, 13, 14];

/// Open-boundary tile code on an L×L lattice, n = 2L², k = 8.
pub fn build_open(l: usize) -> Result<TileCode, Error> {
    if l < 5 {
        return Err(Error::Invalid(format!("open tile code needs L >= 5, got {l}")));
    }
    let t = StabilizerTemplate::default_validated()?;
    let code = build_with_template(t, l, l, Boundary::Open);
    if !code.code.is_commuting() {
        return Err(Error::Validation(format!("open L={l}: checks do not commute")));
    }
    if code.code.rank() != code.code.m() {
        return Err(Error::Validation(format!("open L={l}: checks are not independent")));
    }
    if code.k() != 8 {
        return Err(Error::Validation(format!("open L={l}: k = {} (expected 8)", code.k())));
    }
    Ok(code)
}

/// Periodic tile code on an Lx×Ly torus with both extents divisible by 7; k = 6.
pub fn build_periodic(lx: usize, ly: usize) -> Result<TileCode, Error> {
    if lx == 0 || ly == 0 || lx % 7 != 0 || ly % 7 != 0 {
        return Err(Error::Invalid(format!("periodic extents must be positive multiples of 7, got {lx}x{ly}")));
    }
    let t = StabilizerTemplate::default_validated()?;
    let code = build_with_template(t, lx, ly, Boundary::Periodic);
    if code.k() != 6 {
        return Err(Error::Validation(format!("periodic {lx}x{ly}: k = {} (expected 6)", code.k())));
    }
    Ok(code)
}

/// Exhaustive minimum-weight logical search up to `wmax`.
///
/// Only supports connected in the check-sharing graph are enumerated: a minimum-weight
/// logical splits into pieces that commute with every check separately, and at least one
/// piece is itself a nontrivial logical. CSS codes are searched sector by sector.
/// `budget` caps the number of Pauli candidates examined.
pub fn distance_exact_upto(code: &StabilizerCode, wmax: usize, budget: u64) -> Result<Option<(usize, PauliVec)>, Error> {
    if wmax == 0 {
        return Ok(None);
    }
    let stabs = code.stabilizer_basis();
    let n = code.n();
    let mut spent = 0u64;
    let sectors: Vec<Sector> = if code.is_css() {
        vec![Sector::PureZ, Sector::PureX]
    } else {
        vec![Sector::General]
    };
    for w in 1..=wmax {
        let mut best: Option<PauliVec> = None;
        for &sector in &sectors {
            let rows: Vec<usize> = (0..code.m())
                .filter(|&i| {
                    let p = code.check(i);
                    match sector {
                        Sector::PureZ => !p.x.is_zero(),
                        Sector::PureX => !p.z.is_zero(),
                        Sector::General => true,
                    }
                })
                .collect();
            let adj = code.adjacency(&rows);
            let cols = SyndromeColumns::new(code, &rows);
            let mut search = ConnectedSearch {
                adj: &adj,
                w,
                sector,
                cols: &cols,
                stabs: &stabs,
                n,
                spent: &mut spent,
                budget,
                found: None,
            };
            for v in 0..n {
                let mut ext = Vec::new();
                for u in adj[v].iter_ones() {
                    if u > v {
                        ext.push(u);
                    }
                }
                let mut sub = vec![v];
                search.extend(&mut sub, ext, v)?;
                if search.found.is_some() {
                    break;
                }
            }
            if let Some(p) = search.found.take() {
                best = Some(p);
                break;
            }
        }
        if let Some(p) = best {
            return Ok(Some((w, p)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sector {
    PureZ,
    PureX,
    General,
}

struct SyndromeColumns {
    words: usize,
    x: Vec<Vec<u64>>,
    z: Vec<Vec<u64>>,
}

impl SyndromeColumns {
    fn new(code: &StabilizerCode, rows: &[usize]) -> Self {
        let n = code.n();
        let words = rows.len().div_ceil(64).max(1);
        let mut x = vec![vec![0u64; words]; n];
        let mut z = vec![vec![0u64; words]; n];
        for (j, &i) in rows.iter().enumerate() {
            let p = code.check(i);
            // an X error on q flips checks with z on q
            for q in p.z.iter_ones() {
                x[q][j / 64] ^= 1 << (j % 64);
            }
            for q in p.x.iter_ones() {
                z[q][j / 64] ^= 1 << (j % 64);
            }
        }
        Self { words, x, z }
    }
}

struct ConnectedSearch<'a> {
    adj: &'a [BitVec],
    w: usize,
    sector: Sector,
    cols: &'a SyndromeColumns,
    stabs: &'a EchelonBasis,
    n: usize,
    spent: &'a mut u64,
    budget: u64,
    found: Option<PauliVec>,
}

impl ConnectedSearch<'_> {
    fn extend(&mut self, sub: &mut Vec<usize>, mut ext: Vec<usize>, v: usize) -> Result<(), Error> {
        if self.found.is_some() {
            return Ok(());
        }
        if sub.len() == self.w {
            return self.test(sub);
        }
        let mut closed = BitVec::zeros(self.n);
        for &s in sub.iter() {
            closed.set(s, true);
            closed.or_assign(&self.adj[s]);
        }
        while let Some(u) = ext.pop() {
            let mut ext2 = ext.clone();
            for x in self.adj[u].iter_ones() {
                if x > v && !closed.get(x) && !ext2.contains(&x) {
                    ext2.push(x);
                }
            }
            sub.push(u);
            self.extend(sub, ext2, v)?;
            sub.pop();
            if self.found.is_some() {
                return Ok(());
            }
        }
        Ok(())
    }

    fn test(&mut self, sub: &[usize]) -> Result<(), Error> {
        let words = self.cols.words;
        let choices: &[u8] = match self.sector {
            Sector::PureZ => &[2],
            Sector::PureX => &[0],
            Sector::General => &[0, 1, 2],
        };
        let total = (choices.len() as u64).pow(sub.len() as u32);
        *self.spent += total;
        if *self.spent > self.budget {
            return Err(Error::Budget(format!("distance search exceeded {} candidates", self.budget)));
        }
        let mut assign = vec![0usize; sub.len()];
        let mut acc = vec![0u64; words];
        for _ in 0..total {
            acc.iter_mut().for_each(|a| *a = 0);
            for (i, &q) in sub.iter().enumerate() {
                let c = choices[assign[i]];
                // 0 = X, 1 = Y, 2 = Z
                if c != 2 {
                    crate::algebra::xor_words(&mut acc, &self.cols.x[q]);
                }
                if c != 0 {
                    crate::algebra::xor_words(&mut acc, &self.cols.z[q]);
                }
            }
            if acc.iter().all(|&a| a == 0) {
                let mut p = PauliVec::identity(self.n);
                for (i, &q) in sub.iter().enumerate() {
                    let c = choices[assign[i]];
                    if c != 2 {
                        p.x.set(q, true);
                    }
                    if c != 0 {
                        p.z.set(q, true);
                    }
                }
                if !self.stabs.contains(&p.to_symplectic()) {
                    self.found = Some(p);
                    return Ok(());
                }
            }
            for a in assign.iter_mut() {
                *a += 1;
                if *a < choices.len() {
                    break;
                }
                *a = 0;
            }
        }
        Ok(())
    }
}

/// Randomized information-set search for a low-weight logical; returns an upper bound
/// on the distance with its certificate.
pub fn distance_upper(code: &StabilizerCode, effort: usize, seed: u64) -> (usize, PauliVec) {
    let n = code.n();
    let stabs = code.stabilizer_basis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<PauliVec> = None;
    let consider = |p: PauliVec, best: &mut Option<PauliVec>| {
        let w = p.weight();
        if w > 0 && best.as_ref().is_none_or(|b| w < b.weight()) && !stabs.contains(&p.to_symplectic()) {
            *best = Some(p);
        }
    };
    if code.is_css() {
        let x_rows: Vec<usize> = (0..code.m()).filter(|&i| !code.check(i).x.is_zero()).collect();
        let z_rows: Vec<usize> = (0..code.m()).filter(|&i| !code.check(i).z.is_zero()).collect();
        // pure-Z logicals live in ker of the X-check supports and vice versa
        let kz = code.x_part().select_rows(&x_rows).kernel_basis();
        let kx = code.z_part().select_rows(&z_rows).kernel_basis();
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..effort {
            for (ker, pure_z) in [(&kz, true), (&kx, false)] {
                order.shuffle(&mut rng);
                let m = BitMatrix::from_rows(n, ker);
                for v in m.rref_with_order(&order).reduced.row_vecs() {
                    let p = if pure_z { PauliVec::pure_z(v) } else { PauliVec::pure_x(v) };
                    consider(p, &mut best);
                }
            }
        }
    } else {
        let ker = code.parity_matrix().kernel_basis();
        let m = BitMatrix::from_rows(2 * n, &ker);
        let mut qorder: Vec<usize> = (0..n).collect();
        for _ in 0..effort {
            qorder.shuffle(&mut rng);
            let order: Vec<usize> = qorder.iter().flat_map(|&q| [q, n + q]).collect();
            for v in m.rref_with_order(&order).reduced.row_vecs() {
                consider(PauliVec::from_symplectic(&v), &mut best);
            }
        }
    }
    let p = best.expect("code has no logical operators");
    (p.weight(), p)
}

/// Serialize as `tilecode v1 <boundary> <Lx> <Ly> <n> <k>` plus one check per line.
pub fn write_tilecode(layout: &TileLayout, code: &StabilizerCode) -> String {
    let mut s = format!(
        "tilecode v1 {} {} {} {} {}\n",
        layout.boundary.name(),
        layout.lx,
        layout.ly,
        code.n(),
        code.k()
    );
    for i in 0..code.m() {
        let p = code.check(i);
        let mut parts = Vec::new();
        for q in p.support().iter_ones() {
            if p.x.get(q) {
                parts.push(format!("({q},X)"));
            }
            if p.z.get(q) {
                parts.push(format!("({q},Z)"));
            }
        }
        s.push_str(&parts.join(" "));
        s.push('\n');
    }
    s
}

/// Parse the text format; check kinds are inferred (rows with any X part count as X).
pub fn read_tilecode(text: &str) -> Result<(TileLayout, StabilizerCode), Error> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty tilecode file".into()))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    if f.len() != 7 || f[0] != "tilecode" || f[1] != "v1" {
        return Err(Error::Parse(format!("bad tilecode header: {header}")));
    }
    let boundary = match f[2] {
        "open" => Boundary::Open,
        "periodic" => Boundary::Periodic,
        b => return Err(Error::Parse(format!("unknown boundary {b}"))),
    };
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad integer {s}")));
    let (lx, ly, n, k) = (num(f[3])?, num(f[4])?, num(f[5])?, num(f[6])?);
    let layout = TileLayout { lx, ly, boundary };
    if layout.n() != n {
        return Err(Error::Parse(format!("n = {n} does not match 2*Lx*Ly")));
    }
    let mut rows = Vec::new();
    let mut kinds = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let mut row = BitVec::zeros(2 * n);
        for tok in line.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad pair {tok}")))?;
            let (q, axis) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("bad pair {tok}")))?;
            let q = num(q)?;
            if q >= n {
                return Err(Error::Parse(format!("qubit {q} out of range")));
            }
            match axis {
                "X" => row.flip(q),
                "Z" => row.flip(n + q),
                a => return Err(Error::Parse(format!("bad axis {a}"))),
            }
        }
        let has_x = (0..n).any(|q| row.get(q));
        kinds.push(if has_x { CheckKind::X } else { CheckKind::Z });
        rows.push(row);
    }
    let code = StabilizerCode::new(n, BitMatrix::from_rows(2 * n, &rows), kinds);
    if code.k() != k {
        return Err(Error::Parse(format!("header k = {k} but checks give k = {}", code.k())));
    }
    Ok((layout, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selected_template() {
        let t = StabilizerTemplate::default_validated().unwrap();
        assert_eq!(t.x_v, [(0, 2), (1, 0), (2, 0)]);
        assert!(t.x_overhang_in_x);
    }

    #[test]
    fn open_parameters() {
        for l in [6, 8, 10] {
            let c = build_open(l).unwrap();
            assert_eq!(c.n(), 2 * l * l);
            assert_eq!(c.k(), 8);
            assert!(c.code.is_css());
            let weights: std::collections::BTreeSet<usize> = (0..c.code.m()).map(|i| c.code.check_weight(i)).collect();
            assert!(weights.iter().all(|w| [2, 3, 4, 6].contains(w)), "{weights:?}");
            assert!(weights.contains(&6));
        }
    }

    #[test]
    fn periodic_parameters_and_rejection() {
        let c = build_periodic(7, 7).unwrap();
        assert_eq!((c.n(), c.k()), (98, 6));
        assert!((0..c.code.m()).all(|i| c.code.check_weight(i) == 6));
        assert!(build_periodic(6, 7).is_err());
    }

    #[test]
    fn wmax_zero() {
        let c = build_open(6).unwrap();
        assert_eq!(distance_exact_upto(&c.code, 0, 1_000_000_000).unwrap(), None);
    }

    #[test]
    fn serialization_round_trip() {
        let c = build_open(6).unwrap();
        let text = write_tilecode(&c.layout, &c.code);
        let (layout, code) = read_tilecode(&text).unwrap();
        assert_eq!(layout, c.layout);
        assert_eq!(code.checks(), c.code.checks());
        assert_eq!(write_tilecode(&layout, &code), text);
    }
}
