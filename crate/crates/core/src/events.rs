//! Buffers, frames and the growth events `D₁ˣ(S,R)`, `D₂ˣ(S,R)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::closure;
use crate::error::{Error, Result};
use crate::lattice::{Config, Direction, Rect};
use crate::numerics::Constants;

/// A label `x ∈ {0,1}^𝓘`, indexed by [`Direction::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Selection(pub [bool; 4]);

impl Selection {
    pub const NONE: Selection = Selection([false; 4]);
    pub const ALL: Selection = Selection([true; 4]);

    pub fn get(&self, d: Direction) -> bool {
        self.0[d.index()]
    }

    pub fn set(&mut self, d: Direction, on: bool) {
        self.0[d.index()] = on;
    }

    pub fn with(mut self, d: Direction, on: bool) -> Self {
        self.set(d, on);
        self
    }

    pub fn only(dirs: &[Direction]) -> Self {
        let mut s = Selection::NONE;
        for &d in dirs {
            s.set(d, true);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// `self ≤ other` componentwise.
    pub fn le(&self, other: &Selection) -> bool {
        self.0.iter().zip(other.0).all(|(&a, b)| !a || b)
    }

    /// Componentwise product `x · y`.
    pub fn and(&self, other: &Selection) -> Selection {
        let mut out = [false; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i] && other.0[i];
        }
        Selection(out)
    }

    /// Every label, in increasing binary order over `+x, +y, -x, -y`.
    pub fn all_labels() -> impl Iterator<Item = Selection> {
        (0u8..16).map(|m| Selection([m & 1 != 0, m & 2 != 0, m & 4 != 0, m & 8 != 0]))
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on: Vec<&str> = Direction::ALL.iter().filter(|d| self.get(**d)).map(|d| d.name()).collect();
        write!(f, "{{{}}}", on.join(","))
    }
}

impl Serialize for Selection {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, u8> = Direction::ALL.iter().map(|d| (d.name(), self.get(*d) as u8)).collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, u8>::deserialize(deserializer)?;
        let mut s = Selection::NONE;
        for (k, v) in map {
            let d = Direction::parse(&k).ok_or_else(|| serde::de::Error::custom(format!("unknown direction {k:?}")))?;
            if v > 1 {
                return Err(serde::de::Error::custom(format!("label for {k} must be 0 or 1")));
            }
            s.set(d, v == 1);
        }
        Ok(s)
    }
}

/// Nested rectangles `S ⊆ R` with a label `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrameSpec {
    pub s: Rect,
    pub r: Rect,
    pub x: Selection,
}

#[derive(Deserialize)]
struct FrameSpecRaw {
    s: Rect,
    r: Rect,
    #[serde(default)]
    x: Selection,
}

impl<'de> Deserialize<'de> for FrameSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FrameSpecRaw::deserialize(deserializer)?;
        FrameSpec::new(raw.s, raw.r, raw.x).map_err(serde::de::Error::custom)
    }
}

impl FrameSpec {
    /// Requires `s ⊆ r` and `short(s) ≥ 2`.
    pub fn new(s: Rect, r: Rect, x: Selection) -> Result<Self> {
        if s.short() < 2 {
            return Err(Error::ThinFrame(s));
        }
        FrameSpec::nested(s, r, x)
    }

    /// Requires only `s ⊆ r`. Buffers of a thin `s` still follow the
    /// displacement rule, so a width-1 side gets a buffer one site away.
    pub fn nested(s: Rect, r: Rect, x: Selection) -> Result<Self> {
        if !r.contains_rect(&s) {
            return Err(Error::NotNested { inner: s, outer: r });
        }
        Ok(FrameSpec { s, r, x })
    }

    /// `(s, t)` with `dim S = (a − s, b − t)`, `dim R = (a, b)`.
    pub fn shrink(&self) -> (i64, i64) {
        (self.r.width() - self.s.width(), self.r.height() - self.s.height())
    }
}

/// The four buffers of `S` in `R` and the set `Z` of non-empty ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Buffers {
    pub per_direction: [Option<Rect>; 4],
    pub nonempty: Vec<Direction>,
    pub z: usize,
}

impl Buffers {
    pub fn get(&self, d: Direction) -> Option<Rect> {
        self.per_direction[d.index()]
    }

    /// `1_Z` as a label.
    pub fn indicator(&self) -> Selection {
        Selection::only(&self.nonempty)
    }
}

fn buffer(s: &Rect, r: &Rect, d: Direction) -> Option<Rect> {
    // (S + 2d) ∩ R \ S, a rectangle because the shift is along one axis
    let (xl, xh, yl, yh) = match d {
        Direction::PosX => ((s.x_lo() + 2).max(s.x_hi() + 1), (s.x_hi() + 2).min(r.x_hi()), s.y_lo(), s.y_hi()),
        Direction::NegX => ((s.x_lo() - 2).max(r.x_lo()), (s.x_hi() - 2).min(s.x_lo() - 1), s.y_lo(), s.y_hi()),
        Direction::PosY => (s.x_lo(), s.x_hi(), (s.y_lo() + 2).max(s.y_hi() + 1), (s.y_hi() + 2).min(r.y_hi())),
        Direction::NegY => (s.x_lo(), s.x_hi(), (s.y_lo() - 2).max(r.y_lo()), (s.y_hi() - 2).min(s.y_lo() - 1)),
    };
    Rect::new(xl, xh, yl, yh).ok()
}

/// `B_d = {v ∈ R \ S : v − 2d ∈ S}` for each direction.
pub fn buffers(spec: &FrameSpec) -> Buffers {
    let mut per_direction = [None; 4];
    let mut nonempty = Vec::new();
    for d in Direction::ALL {
        let b = buffer(&spec.s, &spec.r, d);
        if b.is_some() {
            nonempty.push(d);
        }
        per_direction[d.index()] = b;
    }
    let z = nonempty.len();
    Buffers { per_direction, nonempty, z }
}

/// The `x`-frame of `S` in `R`, with site sets over the domain `R`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub spec: FrameSpec,
    pub buffers: Buffers,
    /// `Bˣ`.
    pub selected: Config,
    /// `S_□ˣ`.
    pub square: Config,
    /// `S_■ˣ = S ∪ S_□ˣ`.
    pub blacksquare: Config,
    /// Number of selected non-empty horizontal buffers.
    pub x: u32,
    /// Number of selected non-empty vertical buffers.
    pub y: u32,
}

impl Frame {
    /// `‖x‖ = x + y`.
    pub fn norm(&self) -> u32 {
        self.x + self.y
    }

    /// The starting set `S ∪ (A ∩ R \ S_■ˣ)` of the event `D₁ˣ`.
    pub fn d1_seed(&self, a: &Config) -> Config {
        let mut start = a.restrict(&self.spec.r).difference(&self.blacksquare);
        start.fill_rect(&self.spec.s);
        start
    }

    /// `D₁ˣ(S, R)`.
    pub fn d1(&self, a: &Config) -> bool {
        closure(&self.d1_seed(a)).is_full()
    }

    /// `D₂ˣ(S, R) = D₁ˣ(S, R) ∩ {A ∩ S_□ˣ = ∅}`.
    pub fn d2(&self, a: &Config) -> bool {
        !a.restrict(&self.spec.r).intersects(&self.square) && self.d1(a)
    }
}

/// Builds the `x`-frame of `spec`.
pub fn frame(spec: &FrameSpec) -> Frame {
    let bufs = buffers(spec);
    let r = spec.r;
    let mut selected = Config::empty(r);
    let (mut x, mut y) = (0, 0);
    for d in Direction::ALL {
        if let (true, Some(b)) = (spec.x.get(d), bufs.get(d)) {
            selected.fill_rect(&b);
            if d.is_horizontal() {
                x += 1;
            } else {
                y += 1;
            }
        }
    }
    let mut square = selected.clone();
    for v in r.sites() {
        if spec.s.contains(v) || selected.contains(v) {
            continue;
        }
        let n = Direction::ALL
            .iter()
            .filter(|d| {
                let (dx, dy) = d.vector();
                selected.contains((v.0 + dx, v.1 + dy))
            })
            .count();
        if n >= 2 {
            square.insert(v).expect("site of R");
        }
    }
    let mut blacksquare = square.clone();
    blacksquare.fill_rect(&spec.s);
    Frame { spec: *spec, buffers: bufs, selected, square, blacksquare, x, y }
}

/// `[S ∪ (A ∩ R \ S_■ˣ)] = R`.
pub fn event_d1(a: &Config, spec: &FrameSpec) -> bool {
    frame(spec).d1(a)
}

/// `D₁ˣ(S, R)` and `A ∩ S_□ˣ = ∅`.
pub fn event_d2(a: &Config, spec: &FrameSpec) -> bool {
    frame(spec).d2(a)
}

/// Size class of a rectangle relative to `1/q`. The two critical classes
/// are disjoint (`short ≤ B/q` against `short > B/q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criticality {
    /// `L₁ ≤ short ≤ B/q` and `long ≤ 3e^{2B}/q`.
    OneCritical,
    /// `short > B/q` and `long ≤ (1/2q) log(1/q)`.
    TwoCritical,
    Neither,
}

impl Criticality {
    pub fn index(self) -> Option<u8> {
        match self {
            Criticality::OneCritical => Some(1),
            Criticality::TwoCritical => Some(2),
            Criticality::Neither => None,
        }
    }
}

pub fn is_one_critical(r: &Rect, k: &Constants) -> bool {
    let q = k.q();
    let (short, long) = (r.short() as f64, r.long() as f64);
    k.l1 <= short && short <= k.b / q && long <= 3.0 * (2.0 * k.b).exp() / q
}

pub fn is_two_critical(r: &Rect, k: &Constants) -> bool {
    let q = k.q();
    let (short, long) = (r.short() as f64, r.long() as f64);
    short > k.b / q && long <= (1.0 / q).ln() / (2.0 * q)
}

pub fn criticality(r: &Rect, k: &Constants) -> Criticality {
    if is_one_critical(r, k) {
        Criticality::OneCritical
    } else if is_two_critical(r, k) {
        Criticality::TwoCritical
    } else {
        Criticality::Neither
    }
}
