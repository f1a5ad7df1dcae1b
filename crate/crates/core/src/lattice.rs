//! Rectangles, directions and dense site configurations on Z^2.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice site `(x, y)`. Sites are ordered lexicographically, `x` first.
pub type Site = (i64, i64);

/// Closed integer rectangle `[x_lo, x_hi] x [y_lo, y_hi]`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 4]", into = "[i64; 4]")]
pub struct Rect {
    x_lo: i64,
    x_hi: i64,
    y_lo: i64,
    y_hi: i64,
}

impl Rect {
    pub fn new(x_lo: i64, x_hi: i64, y_lo: i64, y_hi: i64) -> Result<Self> {
        if x_lo > x_hi || y_lo > y_hi {
            return Err(Error::EmptyRect { x_lo, x_hi, y_lo, y_hi });
        }
        Ok(Rect { x_lo, x_hi, y_lo, y_hi })
    }

    /// The `width x height` rectangle with lower-left corner at the origin.
    pub fn with_dims(width: i64, height: i64) -> Result<Self> {
        Rect::new(0, width - 1, 0, height - 1)
    }

    /// The `n x n` square `[0, n-1]^2`.
    pub fn square(n: i64) -> Result<Self> {
        Rect::with_dims(n, n)
    }

    pub fn cell(x: i64, y: i64) -> Self {
        Rect { x_lo: x, x_hi: x, y_lo: y, y_hi: y }
    }

    pub fn x_lo(&self) -> i64 {
        self.x_lo
    }
    pub fn x_hi(&self) -> i64 {
        self.x_hi
    }
    pub fn y_lo(&self) -> i64 {
        self.y_lo
    }
    pub fn y_hi(&self) -> i64 {
        self.y_hi
    }

    pub fn width(&self) -> i64 {
        self.x_hi - self.x_lo + 1
    }

    pub fn height(&self) -> i64 {
        self.y_hi - self.y_lo + 1
    }

    /// `(width, height)`.
    pub fn dims(&self) -> (i64, i64) {
        (self.width(), self.height())
    }

    /// Semi-perimeter: `long + short`.
    pub fn phi(&self) -> i64 {
        self.width() + self.height()
    }

    pub fn short(&self) -> i64 {
        self.width().min(self.height())
    }

    pub fn long(&self) -> i64 {
        self.width().max(self.height())
    }

    pub fn area(&self) -> usize {
        (self.width() * self.height()) as usize
    }

    pub fn lower_left(&self) -> Site {
        (self.x_lo, self.y_lo)
    }

    /// Coordinate of the side facing `dir`, e.g. `x_hi` for `+x`.
    pub fn side(&self, dir: Direction) -> i64 {
        match dir {
            Direction::PosX => self.x_hi,
            Direction::PosY => self.y_hi,
            Direction::NegX => self.x_lo,
            Direction::NegY => self.y_lo,
        }
    }

    pub fn contains(&self, (x, y): Site) -> bool {
        self.x_lo <= x && x <= self.x_hi && self.y_lo <= y && y <= self.y_hi
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x_lo <= other.x_lo && other.x_hi <= self.x_hi && self.y_lo <= other.y_lo && other.y_hi <= self.y_hi
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        Rect::new(
            self.x_lo.max(other.x_lo),
            self.x_hi.min(other.x_hi),
            self.y_lo.max(other.y_lo),
            self.y_hi.min(other.y_hi),
        )
        .ok()
    }

    /// Smallest rectangle containing both.
    pub fn bounding(&self, other: &Rect) -> Rect {
        Rect {
            x_lo: self.x_lo.min(other.x_lo),
            x_hi: self.x_hi.max(other.x_hi),
            y_lo: self.y_lo.min(other.y_lo),
            y_hi: self.y_hi.max(other.y_hi),
        }
    }

    /// Signed column and row separation: `1` means adjacent, `2` means one
    /// empty line in between, values `<= 0` mean the projections overlap.
    pub fn separation(&self, other: &Rect) -> (i64, i64) {
        let dx = (other.x_lo - self.x_hi).max(self.x_lo - other.x_hi);
        let dy = (other.y_lo - self.y_hi).max(self.y_lo - other.y_hi);
        (dx, dy)
    }

    /// Whether the two-neighbour closure of `self ∪ other` is strictly larger
    /// than the union (or the two overlap). When it holds the closure is the
    /// bounding rectangle.
    pub fn interacts(&self, other: &Rect) -> bool {
        let (dx, dy) = self.separation(other);
        dx.max(0) + dy.max(0) <= 2
    }

    /// `[self ∪ other]` when it is a rectangle.
    pub fn span_with(&self, other: &Rect) -> Option<Rect> {
        if self.contains_rect(other) {
            Some(*self)
        } else if other.contains_rect(self) {
            Some(*other)
        } else if self.interacts(other) {
            Some(self.bounding(other))
        } else {
            None
        }
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Rect {
        Rect { x_lo: self.x_lo + dx, x_hi: self.x_hi + dx, y_lo: self.y_lo + dy, y_hi: self.y_hi + dy }
    }

    /// Reflection in the diagonal `x = y`.
    pub fn transpose(&self) -> Rect {
        Rect { x_lo: self.y_lo, x_hi: self.y_hi, y_lo: self.x_lo, y_hi: self.x_hi }
    }

    /// Sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (self.x_lo..=self.x_hi).flat_map(move |x| (self.y_lo..=self.y_hi).map(move |y| (x, y)))
    }

    /// Every sub-rectangle, in lexicographic order of `(x_lo, x_hi, y_lo, y_hi)`.
    pub fn subrects(&self) -> impl Iterator<Item = Rect> + '_ {
        let xs = move || (self.x_lo..=self.x_hi).flat_map(move |a| (a..=self.x_hi).map(move |b| (a, b)));
        xs().flat_map(move |(a, b)| {
            (self.y_lo..=self.y_hi)
                .flat_map(move |c| (c..=self.y_hi).map(move |d| Rect { x_lo: a, x_hi: b, y_lo: c, y_hi: d }))
        })
    }

    /// The rectangle grown by `amount` on the side facing `dir` (shrunk if
    /// negative).
    pub fn extend(&self, dir: Direction, amount: i64) -> Result<Rect> {
        let mut r = *self;
        match dir {
            Direction::PosX => r.x_hi += amount,
            Direction::PosY => r.y_hi += amount,
            Direction::NegX => r.x_lo -= amount,
            Direction::NegY => r.y_lo -= amount,
        }
        Rect::new(r.x_lo, r.x_hi, r.y_lo, r.y_hi)
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x_lo, self.x_hi, self.y_lo, self.y_hi)
    }
}

impl TryFrom<[i64; 4]> for Rect {
    type Error = Error;
    fn try_from(v: [i64; 4]) -> Result<Self> {
        Rect::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Rect> for [i64; 4] {
    fn from(r: Rect) -> Self {
        [r.x_lo, r.x_hi, r.y_lo, r.y_hi]
    }
}

/// Dimensions, semi-perimeter and side lengths of `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectMetrics {
    pub dims: (i64, i64),
    pub phi: i64,
    pub short: i64,
    pub long: i64,
}

pub fn rect_metrics(r: &Rect) -> RectMetrics {
    RectMetrics { dims: r.dims(), phi: r.phi(), short: r.short(), long: r.long() }
}

/// One of the four unit vectors `(1,0), (0,1), (-1,0), (0,-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+x")]
    PosX,
    #[serde(rename = "+y")]
    PosY,
    #[serde(rename = "-x")]
    NegX,
    #[serde(rename = "-y")]
    NegY,
}

impl Direction {
    /// All four, in the fixed cycling order `+x, +y, -x, -y`.
    pub const ALL: [Direction; 4] = [Direction::PosX, Direction::PosY, Direction::NegX, Direction::NegY];

    pub fn vector(self) -> (i64, i64) {
        match self {
            Direction::PosX => (1, 0),
            Direction::PosY => (0, 1),
            Direction::NegX => (-1, 0),
            Direction::NegY => (0, -1),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::PosX => Direction::NegX,
            Direction::PosY => Direction::NegY,
            Direction::NegX => Direction::PosX,
            Direction::NegY => Direction::PosY,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::PosX | Direction::NegX)
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::PosX => "+x",
            Direction::PosY => "+y",
            Direction::NegX => "-x",
            Direction::NegY => "-y",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.name() == s)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-side gaps `|r_j - s_j|` between nested rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideDistances(pub [i64; 4]);

impl SideDistances {
    pub fn get(&self, dir: Direction) -> i64 {
        self.0[dir.index()]
    }

    pub fn max(&self) -> i64 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Side distances of `s` inside `r`; errors unless `s ⊆ r`.
pub fn side_distances(s: &Rect, r: &Rect) -> Result<SideDistances> {
    if !r.contains_rect(s) {
        return Err(Error::NotNested { inner: *s, outer: *r });
    }
    let mut d = [0; 4];
    for dir in Direction::ALL {
        d[dir.index()] = (r.side(dir) - s.side(dir)).abs();
    }
    Ok(SideDistances(d))
}

/// `d(S, R)`, the largest side distance. Panics unless `s ⊆ r`.
pub fn distance(s: &Rect, r: &Rect) -> i64 {
    side_distances(s, r).expect("distance requires nested rectangles").max()
}

/// A set of sites inside a rectangular domain, one bit per site.
///
/// Bits are laid out column by column (`x` major), so iteration yields sites
/// in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Config {
    domain: Rect,
    bits: Vec<u64>,
}

impl Config {
    pub fn empty(domain: Rect) -> Self {
        Config { domain, bits: vec![0; domain.area().div_ceil(64)] }
    }

    pub fn full(domain: Rect) -> Self {
        let mut c = Config::empty(domain);
        let n = domain.area();
        for (i, w) in c.bits.iter_mut().enumerate() {
            let lo = i * 64;
            let count = (n - lo).min(64);
            *w = if count == 64 { !0 } else { (1u64 << count) - 1 };
        }
        c
    }

    pub fn from_sites<I: IntoIterator<Item = Site>>(domain: Rect, sites: I) -> Result<Self> {
        let mut c = Config::empty(domain);
        for s in sites {
            c.insert(s)?;
        }
        Ok(c)
    }

    /// Builds a configuration from a dense row-major mask (`mask[y * w + x]`
    /// relative to the lower-left corner).
    pub fn from_row_major(domain: Rect, mask: &[bool]) -> Self {
        let (w, h) = domain.dims();
        assert_eq!(mask.len(), (w * h) as usize, "mask size mismatch");
        let mut c = Config::empty(domain);
        for y in 0..h {
            for x in 0..w {
                if mask[(y * w + x) as usize] {
                    c.set_index((x * h + y) as usize);
                }
            }
        }
        c
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub(crate) fn bits_words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub(crate) fn index_of(&self, (x, y): Site) -> usize {
        ((x - self.domain.x_lo) * self.domain.height() + (y - self.domain.y_lo)) as usize
    }

    #[inline]
    pub(crate) fn site_of(&self, i: usize) -> Site {
        let h = self.domain.height() as usize;
        (self.domain.x_lo + (i / h) as i64, self.domain.y_lo + (i % h) as i64)
    }

    #[inline]
    pub(crate) fn get_index(&self, i: usize) -> bool {
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_index(&mut self, i: usize) {
        self.bits[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub(crate) fn clear_index(&mut self, i: usize) {
        self.bits[i >> 6] &= !(1 << (i & 63));
    }

    /// Infection state; sites outside the domain are uninfected.
    pub fn contains(&self, s: Site) -> bool {
        self.domain.contains(s) && self.get_index(self.index_of(s))
    }

    /// Marks `s` infected. Returns whether it was newly inserted.
    pub fn insert(&mut self, s: Site) -> Result<bool> {
        if !self.domain.contains(s) {
            return Err(Error::SiteOutside(s.0, s.1, self.domain));
        }
        let i = self.index_of(s);
        let fresh = !self.get_index(i);
        self.set_index(i);
        Ok(fresh)
    }

    pub fn remove(&mut self, s: Site) -> bool {
        if !self.domain.contains(s) {
            return false;
        }
        let i = self.index_of(s);
        let was = self.get_index(i);
        self.clear_index(i);
        was
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.domain.area()
    }

    /// Infected sites in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Site> + '_ {
        self.bits.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
            .map(move |i| self.site_of(i))
        })
    }

    pub fn sites(&self) -> Vec<Site> {
        self.iter().collect()
    }

    /// `A ∩ r` as a configuration over the domain `r` (which need not lie
    /// inside the current domain).
    pub fn restrict(&self, r: &Rect) -> Config {
        let mut out = Config::empty(*r);
        let Some(common) = self.domain.intersection(r) else {
            return out;
        };
        for x in common.x_lo..=common.x_hi {
            for y in common.y_lo..=common.y_hi {
                if self.get_index(self.index_of((x, y))) {
                    out.set_index(out.index_of((x, y)));
                }
            }
        }
        out
    }

    /// Number of infected sites inside `r`.
    pub fn count_in(&self, r: &Rect) -> usize {
        let Some(common) = self.domain.intersection(r) else {
            return 0;
        };
        let mut n = 0;
        for x in common.x_lo..=common.x_hi {
            for y in common.y_lo..=common.y_hi {
                n += self.get_index(self.index_of((x, y))) as usize;
            }
        }
        n
    }

    /// Same domain, union of infected sets.
    pub fn union(&self, other: &Config) -> Config {
        assert_eq!(self.domain, other.domain, "union of configs on different domains");
        Config { domain: self.domain, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect() }
    }

    /// Same domain, `self \ other`.
    pub fn difference(&self, other: &Config) -> Config {
        assert_eq!(self.domain, other.domain, "difference of configs on different domains");
        Config { domain: self.domain, bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect() }
    }

    /// Whether every infected site of `self` is infected in `other`
    /// (domains may differ).
    pub fn is_subset_of(&self, other: &Config) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    pub fn intersects(&self, other: &Config) -> bool {
        if self.domain == other.domain {
            return self.bits.iter().zip(&other.bits).any(|(a, b)| a & b != 0);
        }
        self.iter().any(|s| other.contains(s))
    }

    /// Marks every site of `r ∩ domain` infected.
    pub fn fill_rect(&mut self, r: &Rect) {
        if let Some(common) = self.domain.intersection(r) {
            for s in common.sites() {
                let i = self.index_of(s);
                self.set_index(i);
            }
        }
    }

    /// Whether every site of `r` is infected.
    pub fn covers(&self, r: &Rect) -> bool {
        self.domain.contains_rect(r) && self.count_in(r) == r.area()
    }

    pub fn to_json(&self) -> ConfigJson {
        ConfigJson { domain: self.domain.into(), infected: self.iter().map(|(x, y)| [x, y]).collect() }
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Config {} ({} infected)", self.domain, self.len())?;
        if self.domain.area() <= 4096 {
            for y in (self.domain.y_lo..=self.domain.y_hi).rev() {
                for x in self.domain.x_lo..=self.domain.x_hi {
                    f.write_str(if self.contains((x, y)) { "#" } else { "." })?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Wire form `{"domain": [x_lo, x_hi, y_lo, y_hi], "infected": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub domain: [i64; 4],
    pub infected: Vec<[i64; 2]>,
}

impl TryFrom<ConfigJson> for Config {
    type Error = Error;
    fn try_from(j: ConfigJson) -> Result<Self> {
        let domain = Rect::try_from(j.domain)?;
        Config::from_sites(domain, j.infected.into_iter().map(|[x, y]| (x, y)))
    }
}

impl From<Config> for ConfigJson {
    fn from(c: Config) -> Self {
        c.to_json()
    }
}

impl Serialize for Config {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = ConfigJson::deserialize(deserializer)?;
        Config::try_from(j).map_err(serde::de::Error::custom)
    }
}
