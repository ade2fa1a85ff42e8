//! Single-qubit Clifford deformations acting as column transforms on the (x,z) bit pairs.

use crate::algebra::{BitMatrix, PauliVec};
use crate::rng::stream;
use crate::tilecode::{Orientation, StabilizerCode, TileCode, TileLayout};
use crate::Error;
use rand::Rng;

/// Permutation of {X, Y, Z} induced by a single-qubit Clifford (phases dropped).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Tag {
    I,
    /// Hadamard: X ↔ Z.
    XZ,
    /// HSH: Y ↔ Z, X fixed.
    YZ,
    /// S: X ↔ Y, Z fixed.
    XY,
    /// X → Z → Y → X.
    CycleXZY,
    /// X → Y → Z → X.
    CycleXYZ,
}

pub const ALL_TAGS: [Tag; 6] = [Tag::I, Tag::XZ, Tag::YZ, Tag::XY, Tag::CycleXZY, Tag::CycleXYZ];

impl Tag {
    /// Map (x, z) to the image bits.
    #[inline]
    pub fn apply(self, x: bool, z: bool) -> (bool, bool) {
        match self {
            Tag::I => (x, z),
            Tag::XZ => (z, x),
            Tag::YZ => (x ^ z, z),
            Tag::XY => (x, z ^ x),
            Tag::CycleXZY => (z, x ^ z),
            Tag::CycleXYZ => (x ^ z, x),
        }
    }

    pub fn inverse(self) -> Tag {
        match self {
            Tag::CycleXZY => Tag::CycleXYZ,
            Tag::CycleXYZ => Tag::CycleXZY,
            t => t,
        }
    }

    /// Columns of the 2×2 GF(2) matrix: images of X and of Z.
    pub fn matrix(self) -> [[bool; 2]; 2] {
        let (a, b) = self.apply(true, false);
        let (c, d) = self.apply(false, true);
        [[a, c], [b, d]]
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::I => "I",
            Tag::XZ => "XZ",
            Tag::YZ => "YZ",
            Tag::XY => "XY",
            Tag::CycleXZY => "XZY",
            Tag::CycleXYZ => "XYZ",
        }
    }

    pub fn parse(s: &str) -> Option<Tag> {
        ALL_TAGS.into_iter().find(|t| t.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationMap {
    pub tags: Vec<Tag>,
}

impl DeformationMap {
    pub fn identity(n: usize) -> Self {
        Self { tags: vec![Tag::I; n] }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self { tags: self.tags.iter().map(|t| t.inverse()).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.tags.iter().all(|&t| t == Tag::I)
    }

    pub fn apply_pauli(&self, p: &PauliVec) -> PauliVec {
        assert_eq!(p.n(), self.len(), "length mismatch");
        let mut out = p.clone();
        for (q, &t) in self.tags.iter().enumerate() {
            if t != Tag::I {
                let (x, z) = t.apply(p.x.get(q), p.z.get(q));
                out.x.set(q, x);
                out.z.set(q, z);
            }
        }
        out
    }

    pub fn count(&self, tag: Tag) -> usize {
        self.tags.iter().filter(|&&t| t == tag).count()
    }
}

/// Conjugate every check by the deformation. Check kinds are kept.
pub fn apply(code: &StabilizerCode, map: &DeformationMap) -> Result<StabilizerCode, Error> {
    let n = code.n();
    if map.len() != n {
        return Err(Error::Invalid(format!("deformation has {} tags for {n} qubits", map.len())));
    }
    let mut rows = Vec::with_capacity(code.m());
    for i in 0..code.m() {
        rows.push(map.apply_pauli(&code.check(i)).to_symplectic());
    }
    Ok(StabilizerCode::new(n, BitMatrix::from_rows(2 * n, &rows), code.kinds().to_vec()))
}

/// i.i.d. tags: XZ with `pi_xz`, YZ with `pi_yz`, identity otherwise.
pub fn random_map(n: usize, pi_xz: f64, pi_yz: f64, seed: u64) -> Result<DeformationMap, Error> {
    if !(pi_xz >= 0.0 && pi_yz >= 0.0 && pi_xz + pi_yz <= 1.0 + 1e-12) {
        return Err(Error::Invalid(format!("invalid deformation probabilities ({pi_xz}, {pi_yz})")));
    }
    let mut rng = stream(seed, 0);
    let tags = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < pi_xz {
                Tag::XZ
            } else if u < pi_xz + pi_yz {
                Tag::YZ
            } else {
                Tag::I
            }
        })
        .collect();
    Ok(DeformationMap { tags })
}

/// Hadamard on every vertical edge.
pub fn ti_linear(code: &TileCode) -> DeformationMap {
    let mut m = DeformationMap::identity(code.n());
    for q in code.vertical_qubits() {
        m.tags[q] = Tag::XZ;
    }
    m
}

/// Which Clifford realizes the XY deformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum XyVariant {
    /// HSH on every qubit (Y ↔ Z).
    #[default]
    Hsh,
    /// SH on every qubit, a 3-cycle; kept for comparison runs.
    Sh,
}

pub fn ti_xy(code: &TileCode, variant: XyVariant) -> DeformationMap {
    let tag = match variant {
        XyVariant::Hsh => Tag::YZ,
        XyVariant::Sh => Tag::CycleXZY,
    };
    DeformationMap { tags: vec![tag; code.n()] }
}

/// Unit cell of w×h lattice sites; each site carries a horizontal and a vertical edge tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitCell {
    pub w: usize,
    pub h: usize,
    /// Row-major horizontal-edge tags followed by row-major vertical-edge tags.
    pub tags: Vec<Tag>,
}

impl UnitCell {
    pub fn tag(&self, o: Orientation, x: usize, y: usize) -> Tag {
        let base = match o {
            Orientation::Horizontal => 0,
            Orientation::Vertical => self.w * self.h,
        };
        self.tags[base + (x % self.w) + self.w * (y % self.h)]
    }

    /// Default cell for the (0.25, 0.5) phase point: ¼ XZ, ½ YZ, ¼ I.
    pub fn ti_middle() -> Self {
        use Tag::*;
        Self { w: 2, h: 2, tags: vec![I, YZ, YZ, I, XZ, XZ, YZ, YZ] }
    }

    pub fn fractions(&self) -> (f64, f64, f64) {
        let t = self.tags.len() as f64;
        let c = |tag| self.tags.iter().filter(|&&x| x == tag).count() as f64 / t;
        (c(Tag::XZ), c(Tag::YZ), c(Tag::I))
    }
}

pub fn ti_unitcell(layout: &TileLayout, cell: &UnitCell) -> Result<DeformationMap, Error> {
    if cell.w == 0 || cell.h == 0 || layout.lx % cell.w != 0 || layout.ly % cell.h != 0 {
        return Err(Error::Invalid(format!(
            "{}x{} cell does not divide {}x{} lattice",
            cell.w, cell.h, layout.lx, layout.ly
        )));
    }
    if cell.tags.len() != 2 * cell.w * cell.h {
        return Err(Error::Invalid("cell needs 2*w*h tags".into()));
    }
    let tags = (0..layout.n())
        .map(|q| {
            let (o, x, y) = layout.site(q);
            cell.tag(o, x, y)
        })
        .collect();
    Ok(DeformationMap { tags })
}

/// Named deformation families used by the experiment drivers.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    Css,
    Linear,
    Xy,
    TiMiddle,
    Random { pi_xz: f64, pi_yz: f64, seed: u64 },
}

impl Variant {
    pub fn name(&self) -> String {
        match self {
            Variant::Css => "css".into(),
            Variant::Linear => "linear".into(),
            Variant::Xy => "xy".into(),
            Variant::TiMiddle => "ti-middle".into(),
            Variant::Random { pi_xz, pi_yz, .. } => format!("random({pi_xz},{pi_yz})"),
        }
    }

    /// Accepts `css`, `linear`, `xy`, `ti-middle`; random maps are built from their parameters.
    pub fn parse(s: &str) -> Result<Variant, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "css" => Ok(Variant::Css),
            "linear" => Ok(Variant::Linear),
            "xy" => Ok(Variant::Xy),
            "ti-middle" | "ti" => Ok(Variant::TiMiddle),
            _ => Err(Error::Parse(format!("unknown variant {s}"))),
        }
    }

    pub fn map(&self, tile: &TileCode) -> Result<DeformationMap, Error> {
        match *self {
            Variant::Css => Ok(DeformationMap::identity(tile.n())),
            Variant::Linear => Ok(ti_linear(tile)),
            Variant::Xy => Ok(ti_xy(tile, XyVariant::Hsh)),
            Variant::TiMiddle => ti_unitcell(&tile.layout, &UnitCell::ti_middle()),
            Variant::Random { pi_xz, pi_yz, seed } => random_map(tile.n(), pi_xz, pi_yz, seed),
        }
    }

    pub fn build(&self, tile: &TileCode) -> Result<(DeformationMap, StabilizerCode), Error> {
        let m = self.map(tile)?;
        let c = apply(&tile.code, &m)?;
        Ok((m, c))
    }
}

pub fn write_map(map: &DeformationMap) -> String {
    let mut s = format!("deform v1 {}\n", map.len());
    for t in &map.tags {
        s.push_str(t.name());
        s.push('\n');
    }
    s
}

pub fn read_map(text: &str) -> Result<DeformationMap, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty deformation file".into()))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    if f.len() != 3 || f[0] != "deform" || f[1] != "v1" {
        return Err(Error::Parse(format!("bad deformation header: {header}")));
    }
    let n: usize = f[2].parse().map_err(|_| Error::Parse(format!("bad length {}", f[2])))?;
    let tags = lines
        .map(|l| Tag::parse(l.trim()).ok_or_else(|| Error::Parse(format!("unknown tag {l}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if tags.len() != n {
        return Err(Error::Parse(format!("expected {n} tags, found {}", tags.len())));
    }
    Ok(DeformationMap { tags })
}

pub fn write_cell(cell: &UnitCell) -> String {
    let mut s = format!("cell v1 {} {}\n", cell.w, cell.h);
    for t in &cell.tags {
        s.push_str(t.name());
        s.push('\n');
    }
    s
}

pub fn read_cell(text: &str) -> Result<UnitCell, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty cell file".into()))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    if f.len() != 4 || f[0] != "cell" || f[1] != "v1" {
        return Err(Error::Parse(format!("bad cell header: {header}")));
    }
    let w: usize = f[2].parse().map_err(|_| Error::Parse("bad width".into()))?;
    let h: usize = f[3].parse().map_err(|_| Error::Parse("bad height".into()))?;
    let tags = lines
        .map(|l| Tag::parse(l.trim()).ok_or_else(|| Error::Parse(format!("unknown tag {l}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if tags.len() != 2 * w * h {
        return Err(Error::Parse(format!("expected {} tags, found {}", 2 * w * h, tags.len())));
    }
    Ok(UnitCell { w, h, tags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Pauli;
    use crate::tilecode::build_open;

    #[test]
    fn tag_images() {
        let img = |t: Tag, p: Pauli| {
            let (x, z) = p.bits();
            let (a, b) = t.apply(x, z);
            Pauli::from_bits(a, b)
        };
        assert_eq!(img(Tag::XZ, Pauli::X), Pauli::Z);
        assert_eq!(img(Tag::YZ, Pauli::Z), Pauli::Y);
        assert_eq!(img(Tag::YZ, Pauli::X), Pauli::X);
        assert_eq!(img(Tag::XY, Pauli::X), Pauli::Y);
        assert_eq!(img(Tag::CycleXZY, Pauli::X), Pauli::Z);
        assert_eq!(img(Tag::CycleXZY, Pauli::Z), Pauli::Y);
        assert_eq!(img(Tag::CycleXYZ, Pauli::X), Pauli::Y);
        for t in ALL_TAGS {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                assert_eq!(img(t.inverse(), img(t, p)), p);
            }
        }
    }

    #[test]
    fn linear_deformation_shape() {
        let c = build_open(6).unwrap();
        let m = ti_linear(&c);
        assert_eq!(m.count(Tag::XZ), 36);
        let d = apply(&c.code, &m).unwrap();
        for i in 0..d.m() {
            if c.code.check_weight(i) == 6 {
                let p = d.check(i);
                assert_eq!(p.x.weight(), 3);
                assert_eq!(p.z.weight(), 3);
            }
        }
        for q in 0..36 {
            for i in 0..d.m() {
                assert_eq!(d.checks().get(i, q), c.code.checks().get(i, q));
            }
        }
    }

    #[test]
    fn xy_deformation_rows() {
        let c = build_open(6).unwrap();
        let d = apply(&c.code, &ti_xy(&c, XyVariant::Hsh)).unwrap();
        for i in 0..d.m() {
            let (orig, new) = (c.code.check(i), d.check(i));
            if orig.x.is_zero() {
                assert_eq!(new.x, new.z);
                assert_eq!(new.weight(), orig.weight());
            } else {
                assert_eq!(new, orig);
            }
        }
    }

    #[test]
    fn random_map_extremes() {
        assert!(random_map(50, 0.0, 0.0, 1).unwrap().is_identity());
        assert_eq!(random_map(50, 1.0, 0.0, 1).unwrap().count(Tag::XZ), 50);
        assert!(random_map(5, 0.7, 0.7, 1).is_err());
    }

    #[test]
    fn shipped_cell_fractions() {
        let (xz, yz, id) = UnitCell::ti_middle().fractions();
        assert_eq!((xz, yz, id), (0.25, 0.5, 0.25));
    }

    #[test]
    fn cell_must_divide() {
        let c = build_open(13).unwrap();
        assert!(ti_unitcell(&c.layout, &UnitCell::ti_middle()).is_err());
    }
}
