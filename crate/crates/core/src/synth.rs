//! Constraint-driven plan synthesis.
//!
//! A plan is built in fixed stages, all driven by one seeded stream:
//! footprint template, room partition, kind assignment, doors (spanning
//! tree first, then extras), windows, recoloring. A layout that cannot host
//! the requested openings is retried with a larger template before the spec
//! is declared infeasible.
//!
//! Rooms always keep at least one wall on the outer boundary of their
//! building, and are at least [`MIN_ROOM_SIDE`] cells on each side.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    trace_region, walls_for_rooms, DoorSwing, ElementTerm, FloorPlan, Footprint, GridPoint, Opening, OpeningKind,
    Orientation, RectilinearPolygon, Room, RoomKind, ShapeClass, Side, SpanEnd, DEFAULT_GRID,
};
use crate::palette::ColorName;
use crate::rng::{derive_seed, rng_from_seed, PlanRng};

pub const SPEC_SCHEMA: &str = "planforge-spec/1";
pub const MIN_ROOM_SIDE: i32 = 4;
/// Empty cells kept between the footprint and the grid border.
pub const GRID_MARGIN: i32 = 4;
pub const DOOR_WIDTH: u32 = 2;
const LAYOUT_ATTEMPTS: u32 = 6;

/// Fuzzy cardinality word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantityBand {
    No,
    Few,
    Many,
}

impl QuantityBand {
    pub const ALL: [QuantityBand; 3] = [QuantityBand::No, QuantityBand::Few, QuantityBand::Many];
    pub const FEW_MAX: u32 = 6;
    pub const MANY_MIN: u32 = 7;
    pub const MANY_MAX: u32 = 12;

    /// Inclusive range a band resolves to.
    pub const fn range(self) -> (u32, u32) {
        match self {
            QuantityBand::No => (0, 0),
            QuantityBand::Few => (1, Self::FEW_MAX),
            QuantityBand::Many => (Self::MANY_MIN, Self::MANY_MAX),
        }
    }

    /// Word for an exact count. Total: anything above six is "many".
    pub const fn of_count(n: u32) -> QuantityBand {
        match n {
            0 => QuantityBand::No,
            1..=Self::FEW_MAX => QuantityBand::Few,
            _ => QuantityBand::Many,
        }
    }

    /// Whether `n` is described by this word. "many" is unbounded above.
    pub const fn admits(self, n: u32) -> bool {
        match self {
            QuantityBand::No => n == 0,
            QuantityBand::Few => n >= 1 && n <= Self::FEW_MAX,
            QuantityBand::Many => n >= Self::MANY_MIN,
        }
    }

    pub const fn word(self) -> &'static str {
        match self {
            QuantityBand::No => "no",
            QuantityBand::Few => "few",
            QuantityBand::Many => "many",
        }
    }

    pub fn from_word(w: &str) -> Option<QuantityBand> {
        QuantityBand::ALL.into_iter().find(|b| b.word() == w)
    }
}

impl fmt::Display for QuantityBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

/// A requested count: exact, or a band resolved from the seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CountSpec {
    Exact(u32),
    Band(QuantityBand),
}

impl Default for CountSpec {
    fn default() -> Self {
        CountSpec::Exact(0)
    }
}

impl CountSpec {
    fn resolve(self, rng: &mut PlanRng) -> u32 {
        self.resolve_at_least(0, rng)
    }

    /// Band draws are raised to `floor` where the band allows it.
    fn resolve_at_least(self, floor: u32, rng: &mut PlanRng) -> u32 {
        match self {
            CountSpec::Exact(n) => n,
            CountSpec::Band(b) => {
                let (lo, hi) = b.range();
                rng.random_range(lo.max(floor).min(hi)..=hi)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recolor {
    pub element: ElementTerm,
    pub color: ColorName,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanSpec {
    pub shape: ShapeClass,
    #[serde(default)]
    pub rooms: BTreeMap<RoomKind, CountSpec>,
    #[serde(default)]
    pub doors: CountSpec,
    #[serde(default)]
    pub windows: CountSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recolor: Option<Recolor>,
    pub seed: u64,
    /// Fixed footprint bounding size in cells, instead of a seeded one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<[i32; 2]>,
    #[serde(default = "default_grid")]
    pub grid: i32,
}

fn default_grid() -> i32 {
    DEFAULT_GRID
}

/// Counts after band resolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedCounts {
    pub kitchens: u32,
    pub bathrooms: u32,
    pub living_rooms: u32,
    pub doors: u32,
    pub windows: u32,
}

impl ResolvedCounts {
    pub fn total_rooms(&self) -> u32 {
        self.kitchens + self.bathrooms + self.living_rooms
    }
}

impl PlanSpec {
    /// Spec with exact counts.
    pub fn exact(shape: ShapeClass, counts: ResolvedCounts, seed: u64) -> Self {
        let mut rooms = BTreeMap::new();
        rooms.insert(RoomKind::Kitchen, CountSpec::Exact(counts.kitchens));
        rooms.insert(RoomKind::Bathroom, CountSpec::Exact(counts.bathrooms));
        rooms.insert(RoomKind::LivingRoom, CountSpec::Exact(counts.living_rooms));
        PlanSpec {
            shape,
            rooms,
            doors: CountSpec::Exact(counts.doors),
            windows: CountSpec::Exact(counts.windows),
            recolor: None,
            seed,
            size: None,
            grid: DEFAULT_GRID,
        }
    }

    pub fn with_recolor(mut self, element: ElementTerm, color: ColorName) -> Self {
        self.recolor = Some(Recolor { element, color });
        self
    }

    /// Band resolution, drawn from the head of the seed stream in a fixed
    /// order (kitchen, bathroom, living room, doors, windows).
    pub fn resolve(&self) -> ResolvedCounts {
        let mut rng = rng_from_seed(derive_seed(self.seed, "counts", 0));
        let room = |k: RoomKind, rng: &mut PlanRng| self.rooms.get(&k).copied().unwrap_or_default().resolve(rng);
        let kitchens = room(RoomKind::Kitchen, &mut rng);
        let bathrooms = room(RoomKind::Bathroom, &mut rng);
        let living_rooms = room(RoomKind::LivingRoom, &mut rng);
        // Doors drawn from a band connect every room when they can.
        let doors = self.doors.resolve_at_least(kitchens + bathrooms + living_rooms, &mut rng);
        let windows = self.windows.resolve(&mut rng);
        ResolvedCounts { kitchens, bathrooms, living_rooms, doors, windows }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: &'static str,
            #[serde(flatten)]
            spec: &'a PlanSpec,
        }
        serde_json::to_string_pretty(&Doc { schema: SPEC_SCHEMA, spec: self }).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<PlanSpec, SpecFormatError> {
        #[derive(Deserialize)]
        struct Doc {
            schema: String,
            #[serde(flatten)]
            spec: PlanSpec,
        }
        let doc: Doc = serde_json::from_str(text)?;
        if doc.schema != SPEC_SCHEMA {
            return Err(SpecFormatError::Schema(doc.schema));
        }
        Ok(doc.spec)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecFormatError {
    #[error("malformed spec document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported spec schema `{0}`")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("infeasible spec: {0}")]
    Infeasible(String),
}

fn infeasible<T>(reason: impl Into<String>) -> Result<T, SynthError> {
    Err(SynthError::Infeasible(reason.into()))
}

// Block side bits. TOP is the small-y side.
const LEFT: u8 = 1;
const RIGHT: u8 = 2;
const TOP: u8 = 4;
const BOTTOM: u8 = 8;

/// Cells `x0..x1 × y0..y1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct CellRect {
    x0: i32,
    y0: i32,
    x1: i32,
    y1: i32,
}

impl CellRect {
    fn new(x0: i32, y0: i32, x1: i32, y1: i32) -> Self {
        Self { x0, y0, x1, y1 }
    }
    fn w(&self) -> i32 {
        self.x1 - self.x0
    }
    fn h(&self) -> i32 {
        self.y1 - self.y0
    }
    fn cells(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (self.y0..self.y1).flat_map(move |y| (self.x0..self.x1).map(move |x| (x, y)))
    }
    fn transposed(&self) -> Self {
        Self::new(self.y0, self.x0, self.y1, self.x1)
    }
    fn mirrored_x(&self, w: i32) -> Self {
        Self::new(w - self.x1, self.y0, w - self.x0, self.y1)
    }
    fn mirrored_y(&self, h: i32) -> Self {
        Self::new(self.x0, h - self.y1, self.x1, h - self.y0)
    }
    fn shifted(&self, dx: i32, dy: i32) -> Self {
        Self::new(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)
    }
}

/// A rectangle of a footprint template, with the sides that lie entirely on
/// the building's outer boundary.
#[derive(Clone, Copy, Debug)]
struct Block {
    rect: CellRect,
    outer: u8,
}

impl Block {
    fn transposed(self) -> Self {
        let o = self.outer;
        let mut t = 0;
        if o & LEFT != 0 {
            t |= TOP;
        }
        if o & TOP != 0 {
            t |= LEFT;
        }
        if o & RIGHT != 0 {
            t |= BOTTOM;
        }
        if o & BOTTOM != 0 {
            t |= RIGHT;
        }
        Block { rect: self.rect.transposed(), outer: t }
    }
    fn mirrored_x(self, w: i32) -> Self {
        let o = self.outer;
        let t = (o & (TOP | BOTTOM)) | if o & LEFT != 0 { RIGHT } else { 0 } | if o & RIGHT != 0 { LEFT } else { 0 };
        Block { rect: self.rect.mirrored_x(w), outer: t }
    }
    fn mirrored_y(self, h: i32) -> Self {
        let o = self.outer;
        let t = (o & (LEFT | RIGHT)) | if o & TOP != 0 { BOTTOM } else { 0 } | if o & BOTTOM != 0 { TOP } else { 0 };
        Block { rect: self.rect.mirrored_y(h), outer: t }
    }
}

/// One building: blocks in chain order, so that contiguous runs form
/// simply connected unions. `ring` marks a chain whose full union has a hole.
#[derive(Clone, Debug)]
struct Component {
    blocks: Vec<Block>,
    ring: bool,
}

impl Component {
    fn min_rooms(&self) -> u32 {
        if self.ring {
            2
        } else {
            1
        }
    }
}

thread_local! {
    static CAPACITY: RefCell<HashMap<(i32, i32, u8), u32>> = RefCell::new(HashMap::new());
}

const LR_TB: u8 = LEFT | TOP | BOTTOM;
const RR_TB: u8 = RIGHT | TOP | BOTTOM;
const TR_LR: u8 = TOP | LEFT | RIGHT;
const BR_LR: u8 = BOTTOM | LEFT | RIGHT;

/// Maximum rooms a `w × h` block splits into, keeping each room at least
/// `MIN_ROOM_SIDE` wide and touching one of the `outer` sides.
fn capacity(w: i32, h: i32, outer: u8) -> u32 {
    if w < MIN_ROOM_SIDE || h < MIN_ROOM_SIDE || outer == 0 {
        return 0;
    }
    if let Some(c) = CAPACITY.with(|m| m.borrow().get(&(w, h, outer)).copied()) {
        return c;
    }
    let mut best = 1;
    for c in MIN_ROOM_SIDE..=(w - MIN_ROOM_SIDE) {
        let (l, r) = (outer & LR_TB, outer & RR_TB);
        let (a, b) = (capacity(c, h, l), capacity(w - c, h, r));
        if a > 0 && b > 0 {
            best = best.max(a + b);
        }
    }
    for c in MIN_ROOM_SIDE..=(h - MIN_ROOM_SIDE) {
        let (t, b) = (outer & TR_LR, outer & BR_LR);
        let (a, bb) = (capacity(w, c, t), capacity(w, h - c, b));
        if a > 0 && bb > 0 {
            best = best.max(a + bb);
        }
    }
    CAPACITY.with(|m| m.borrow_mut().insert((w, h, outer), best));
    best
}

/// Recursive axis-alternating binary partition of one block into `k` rooms.
fn partition(rect: CellRect, outer: u8, k: u32, depth: u32, first_axis: u32, rng: &mut PlanRng, out: &mut Vec<CellRect>) {
    if k <= 1 {
        out.push(rect);
        return;
    }
    let axes = if (depth + first_axis).is_multiple_of(2) { [0, 1] } else { [1, 0] };
    for axis in axes {
        // (cut offset, rooms on the low side)
        let mut options: Vec<(i32, u32)> = Vec::new();
        let (len, lo_mask, hi_mask) = if axis == 0 {
            (rect.w(), outer & LR_TB, outer & RR_TB)
        } else {
            (rect.h(), outer & TR_LR, outer & BR_LR)
        };
        for c in MIN_ROOM_SIDE..=(len - MIN_ROOM_SIDE) {
            let (a, b) = if axis == 0 {
                (capacity(c, rect.h(), lo_mask), capacity(len - c, rect.h(), hi_mask))
            } else {
                (capacity(rect.w(), c, lo_mask), capacity(rect.w(), len - c, hi_mask))
            };
            for k1 in 1..k {
                if k1 <= a && k - k1 <= b {
                    options.push((c, k1));
                }
            }
        }
        if options.is_empty() {
            continue;
        }
        let mut ks: Vec<u32> = options.iter().map(|o| o.1).collect();
        ks.dedup();
        ks.sort_unstable();
        ks.dedup();
        // Balanced splits first.
        let half = k / 2;
        let k1 = if ks.contains(&half) && rng.random_bool(0.75) {
            half
        } else {
            *ks.choose(rng).expect("non-empty")
        };
        let ideal = len as f64 * k1 as f64 / k as f64;
        let mut cuts: Vec<i32> = options.iter().filter(|o| o.1 == k1).map(|o| o.0).collect();
        cuts.sort_by(|a, b| ((*a as f64 - ideal).abs()).total_cmp(&(*b as f64 - ideal).abs()).then(a.cmp(b)));
        let pick = cuts[rng.random_range(0..cuts.len().min(3))];
        let (lo, hi) = if axis == 0 {
            (CellRect::new(rect.x0, rect.y0, rect.x0 + pick, rect.y1), CellRect::new(rect.x0 + pick, rect.y0, rect.x1, rect.y1))
        } else {
            (CellRect::new(rect.x0, rect.y0, rect.x1, rect.y0 + pick), CellRect::new(rect.x0, rect.y0 + pick, rect.x1, rect.y1))
        };
        partition(lo, lo_mask, k1, depth + 1, first_axis, rng, out);
        partition(hi, hi_mask, k - k1, depth + 1, first_axis, rng, out);
        return;
    }
    // Caller guarantees k <= capacity, so some axis always has an option.
    out.push(rect);
}

/// Uniform draw in `lo..=hi`, biased upward on later attempts.
fn pick_dim(rng: &mut PlanRng, lo: i32, hi: i32, attempt: u32) -> i32 {
    if hi <= lo {
        return hi.max(lo.min(hi));
    }
    let lo = lo + ((hi - lo) * attempt as i32) / LAYOUT_ATTEMPTS as i32;
    rng.random_range(lo..=hi)
}

struct Template {
    components: Vec<Component>,
}

fn template(shape: ShapeClass, grid: i32, size: Option<[i32; 2]>, attempt: u32, rng: &mut PlanRng) -> Result<Template, SynthError> {
    let avail = grid - 2 * GRID_MARGIN;
    if avail < MIN_ROOM_SIDE {
        return infeasible("grid too small");
    }
    let dims = |rng: &mut PlanRng, lo: i32| -> (i32, i32) {
        match size {
            Some([w, h]) => (w, h),
            None => (pick_dim(rng, lo, avail, attempt), pick_dim(rng, lo, avail, attempt)),
        }
    };
    let all = LEFT | RIGHT | TOP | BOTTOM;
    // Blocks in local coordinates with (0, 0) at the bbox corner.
    let (w, h, components): (i32, i32, Vec<Component>) = match shape {
        ShapeClass::Square => {
            let s = match size {
                Some([w, _]) => w,
                None => pick_dim(rng, 16, avail, attempt),
            };
            (s, s, vec![Component { blocks: vec![Block { rect: CellRect::new(0, 0, s, s), outer: all }], ring: false }])
        }
        ShapeClass::Rectangle => {
            let (w, h) = match size {
                Some([w, h]) => (w, h),
                None => {
                    let long = pick_dim(rng, 28, avail, attempt);
                    let short = ((long as f64) * rng.random_range(0.5..0.72)).round() as i32;
                    let short = short.max(MIN_ROOM_SIDE * 3);
                    if rng.random_bool(0.5) {
                        (long, short)
                    } else {
                        (short, long)
                    }
                }
            };
            (w, h, vec![Component { blocks: vec![Block { rect: CellRect::new(0, 0, w, h), outer: all }], ring: false }])
        }
        ShapeClass::LShaped => {
            let (w, h) = dims(rng, 24);
            if w < 18 || h < 18 {
                return infeasible("footprint too small for an l-shape");
            }
            // Notch at the top-right corner: arm on the left, foot along the bottom.
            let a = rng.random_range(10..=(w - 8));
            let b = rng.random_range(10..=(h - 8));
            let arm = Block { rect: CellRect::new(0, 0, a, h), outer: LEFT | TOP | BOTTOM };
            let foot = Block { rect: CellRect::new(a, h - b, w, h), outer: TOP | RIGHT | BOTTOM };
            (w, h, vec![Component { blocks: vec![arm, foot], ring: false }])
        }
        ShapeClass::CShaped => {
            let (w, h) = dims(rng, 26);
            if w < 24 || h < 16 {
                return infeasible("footprint too small for a c-shape");
            }
            // Notch open toward the top.
            let a = rng.random_range(8..=((w - 8) / 2));
            let c = rng.random_range(8..=((w - 8) / 2));
            let b = rng.random_range(8..=(h - 8));
            let left = Block { rect: CellRect::new(0, 0, a, h), outer: LEFT | TOP | BOTTOM };
            let base = Block { rect: CellRect::new(a, h - b, w - c, h), outer: TOP | BOTTOM };
            let right = Block { rect: CellRect::new(w - c, 0, w, h), outer: RIGHT | TOP | BOTTOM };
            (w, h, vec![Component { blocks: vec![left, base, right], ring: false }])
        }
        ShapeClass::OShaped => {
            let (w, h) = dims(rng, 30);
            let dmax = ((w - 8) / 2).min((h - 8) / 2).min(12);
            if dmax < 8 {
                return infeasible("footprint too small for an o-shape");
            }
            let d = rng.random_range(8..=dmax);
            let top = Block { rect: CellRect::new(0, 0, w, d), outer: TOP | LEFT | RIGHT };
            let right = Block { rect: CellRect::new(w - d, d, w, h - d), outer: RIGHT };
            let bottom = Block { rect: CellRect::new(0, h - d, w, h), outer: BOTTOM | LEFT | RIGHT };
            let left = Block { rect: CellRect::new(0, d, d, h - d), outer: LEFT };
            (w, h, vec![Component { blocks: vec![top, right, bottom, left], ring: true }])
        }
        ShapeClass::MultipleBuildings => {
            const GAP: i32 = 6;
            let n = if avail >= 3 * 12 + 2 * GAP && rng.random_bool(0.3) { 3 } else { 2 };
            let mut widths = vec![12; n];
            let mut spare = avail - GAP * (n as i32 - 1) - 12 * n as i32;
            if spare < 0 {
                return infeasible("grid too small for multiple buildings");
            }
            let min_extra = spare * attempt as i32 / LAYOUT_ATTEMPTS as i32;
            spare -= rng.random_range(0..=(spare - min_extra).max(0));
            for _ in 0..spare {
                let i = rng.random_range(0..n);
                widths[i] += 1;
            }
            let mut comps = Vec::new();
            let mut x = 0;
            let mut tallest = 0;
            for wi in widths {
                let hi = pick_dim(rng, 14, avail, attempt);
                let y = rng.random_range(0..=(avail - hi));
                tallest = tallest.max(y + hi);
                comps.push(Component { blocks: vec![Block { rect: CellRect::new(x, y, x + wi, y + hi), outer: all }], ring: false });
                x += wi + GAP;
            }
            (x - GAP, tallest, comps)
        }
    };
    if w > avail || h > avail || w < MIN_ROOM_SIDE || h < MIN_ROOM_SIDE {
        return infeasible(format!("footprint {w}x{h} does not fit the grid"));
    }
    // Random dihedral placement, then a random offset inside the margins.
    let transpose = rng.random_bool(0.5);
    let mx = rng.random_bool(0.5);
    let my = rng.random_bool(0.5);
    let (tw, th) = if transpose { (h, w) } else { (w, h) };
    let ox = GRID_MARGIN + rng.random_range(0..=(avail - tw));
    let oy = GRID_MARGIN + rng.random_range(0..=(avail - th));
    let components = components
        .into_iter()
        .map(|c| Component {
            ring: c.ring,
            blocks: c
                .blocks
                .into_iter()
                .map(|b| {
                    let b = if transpose { b.transposed() } else { b };
                    let b = if mx { b.mirrored_x(tw) } else { b };
                    let b = if my { b.mirrored_y(th) } else { b };
                    Block { rect: b.rect.shifted(ox, oy), outer: b.outer }
                })
                .collect(),
        })
        .collect();
    Ok(Template { components })
}

/// Outline polygons of a cell set: one outer boundary and any holes.
fn footprint_of(cells: &HashSet<(i32, i32)>, grid: i32) -> Footprint {
    let loops = trace_region(grid, grid, |x, y| cells.contains(&(x, y)));
    let mut outer = None;
    let mut holes = Vec::new();
    for l in loops {
        let p = RectilinearPolygon::new(l).normalized();
        if p.signed_area2() > 0 {
            outer = Some(p);
        } else {
            let mut h = p;
            h.vertices.reverse();
            holes.push(h.normalized());
        }
    }
    Footprint { outer: outer.expect("non-empty component"), holes }
}

fn polygon_of(cells: &HashSet<(i32, i32)>, grid: i32) -> RectilinearPolygon {
    footprint_of(cells, grid).outer
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Owner {
    Room(usize),
    Outside,
    Courtyard,
}

/// Maximal run of unit wall edges with the same owners on both sides.
#[derive(Clone, Copy, Debug)]
struct Stretch {
    orientation: Orientation,
    line: i32,
    start: i32,
    end: i32,
    neg: Owner,
    pos: Owner,
}

impl Stretch {
    fn owner(&self, side: Side) -> Owner {
        match side {
            Side::Negative => self.neg,
            Side::Positive => self.pos,
        }
    }
    fn exterior_side(&self) -> Option<Side> {
        match (self.neg, self.pos) {
            (Owner::Room(_), Owner::Room(_)) => None,
            (Owner::Room(_), _) => Some(Side::Positive),
            (_, Owner::Room(_)) => Some(Side::Negative),
            _ => None,
        }
    }
    fn room_sides(&self) -> Vec<Side> {
        [Side::Negative, Side::Positive]
            .into_iter()
            .filter(|&s| matches!(self.owner(s), Owner::Room(_)))
            .collect()
    }
    fn cell(&self, along: i32, perp_offset: i32, side: Side) -> (i32, i32) {
        let perp = match side {
            Side::Positive => self.line + perp_offset,
            Side::Negative => self.line - 1 - perp_offset,
        };
        match self.orientation {
            Orientation::Horizontal => (along, perp),
            Orientation::Vertical => (perp, along),
        }
    }
}

struct Layout {
    grid: i32,
    owner: Vec<Owner>,
    rooms: Vec<HashSet<(i32, i32)>>,
    component_of_room: Vec<usize>,
    stretches: Vec<Stretch>,
}

impl Layout {
    fn owner_at(&self, x: i32, y: i32) -> Owner {
        if x < 0 || y < 0 || x >= self.grid || y >= self.grid {
            return Owner::Outside;
        }
        self.owner[(y * self.grid + x) as usize]
    }

    fn build(grid: i32, rooms: Vec<HashSet<(i32, i32)>>, component_of_room: Vec<usize>) -> Self {
        let n = (grid * grid) as usize;
        let mut owner = vec![Owner::Courtyard; n];
        for (i, cells) in rooms.iter().enumerate() {
            for &(x, y) in cells {
                owner[(y * grid + x) as usize] = Owner::Room(i);
            }
        }
        // Non-room cells reachable from the border are outside; the rest are courtyards.
        let mut stack: Vec<(i32, i32)> = Vec::new();
        for i in 0..grid {
            stack.extend([(i, 0), (i, grid - 1), (0, i), (grid - 1, i)]);
        }
        while let Some((x, y)) = stack.pop() {
            if x < 0 || y < 0 || x >= grid || y >= grid {
                continue;
            }
            let idx = (y * grid + x) as usize;
            if owner[idx] != Owner::Courtyard {
                continue;
            }
            owner[idx] = Owner::Outside;
            stack.extend([(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]);
        }
        let mut layout = Layout { grid, owner, rooms, component_of_room, stretches: Vec::new() };
        layout.stretches = layout.compute_stretches();
        layout
    }

    fn compute_stretches(&self) -> Vec<Stretch> {
        let g = self.grid;
        let mut out = Vec::new();
        for orientation in [Orientation::Horizontal, Orientation::Vertical] {
            for line in 0..=g {
                let mut run: Option<Stretch> = None;
                for pos in 0..g {
                    let (neg, posc) = match orientation {
                        Orientation::Horizontal => (self.owner_at(pos, line - 1), self.owner_at(pos, line)),
                        Orientation::Vertical => (self.owner_at(line - 1, pos), self.owner_at(line, pos)),
                    };
                    let is_wall = neg != posc && (matches!(neg, Owner::Room(_)) || matches!(posc, Owner::Room(_)));
                    match (&mut run, is_wall) {
                        (Some(r), true) if r.neg == neg && r.pos == posc && r.end == pos => r.end = pos + 1,
                        _ => {
                            if let Some(r) = run.take() {
                                out.push(r);
                            }
                            if is_wall {
                                run = Some(Stretch { orientation, line, start: pos, end: pos + 1, neg, pos: posc });
                            }
                        }
                    }
                }
                if let Some(r) = run.take() {
                    out.push(r);
                }
            }
        }
        out
    }
}

/// Opening placement bookkeeping.
#[derive(Default)]
struct Placement {
    spans: HashMap<(Orientation, i32), Vec<(i32, i32)>>,
    sectors: HashSet<(i32, i32)>,
    openings: Vec<Opening>,
}

impl Placement {
    fn span_free(&self, st: &Stretch, p: i32, w: i32) -> bool {
        if p < st.start + 1 || p + w > st.end - 1 {
            return false;
        }
        self.spans
            .get(&(st.orientation, st.line))
            .is_none_or(|v| v.iter().all(|&(s, e)| p + w < s || e < p))
    }

    fn sector_cells(layout: &Layout, st: &Stretch, p: i32, w: i32, side: Side) -> Option<Vec<(i32, i32)>> {
        let Owner::Room(room) = st.owner(side) else { return None };
        let mut cells = Vec::new();
        for i in 0..w {
            for j in 0..=w {
                let c = st.cell(p + i, j, side);
                if layout.owner_at(c.0, c.1) != Owner::Room(room) {
                    return None;
                }
                if j < w {
                    cells.push(c);
                }
            }
        }
        Some(cells)
    }

    fn sector_free(&self, cells: &[(i32, i32)]) -> bool {
        cells.iter().all(|&(x, y)| {
            (-1..=1).all(|dy| (-1..=1).all(|dx| !self.sectors.contains(&(x + dx, y + dy))))
        })
    }

    fn claim(&mut self, st: &Stretch, p: i32, w: i32) {
        self.spans.entry((st.orientation, st.line)).or_default().push((p, p + w));
    }

    fn anchor(st: &Stretch, p: i32) -> GridPoint {
        match st.orientation {
            Orientation::Horizontal => GridPoint::new(p, st.line),
            Orientation::Vertical => GridPoint::new(st.line, p),
        }
    }

    /// Tries to put a door on `st`, swinging into one of `sides`.
    fn try_door(&mut self, layout: &Layout, st: &Stretch, sides: &[Side], rng: &mut PlanRng) -> bool {
        let w = DOOR_WIDTH as i32;
        let mut positions: Vec<i32> = (st.start + 1..=st.end - 1 - w).collect();
        positions.shuffle(rng);
        let mut sides = sides.to_vec();
        sides.shuffle(rng);
        for p in positions {
            if !self.span_free(st, p, w) {
                continue;
            }
            for &side in &sides {
                let Some(cells) = Self::sector_cells(layout, st, p, w, side) else { continue };
                if !self.sector_free(&cells) {
                    continue;
                }
                self.sectors.extend(cells);
                self.claim(st, p, w);
                let hinge = if rng.random_bool(0.5) { SpanEnd::Start } else { SpanEnd::End };
                self.openings.push(Opening {
                    kind: OpeningKind::Door,
                    wall_anchor: Self::anchor(st, p),
                    orientation: st.orientation,
                    width: w as u32,
                    color_override: None,
                    swing: Some(DoorSwing { into: side, hinge }),
                });
                return true;
            }
        }
        false
    }

    fn try_window(&mut self, st: &Stretch, rng: &mut PlanRng) -> bool {
        let w = if rng.random_bool(0.5) { 2 } else { 3 };
        for width in [w, 2] {
            let mut positions: Vec<i32> = (st.start + 1..=st.end - 1 - width).collect();
            positions.shuffle(rng);
            if let Some(&p) = positions.iter().find(|&&p| self.span_free(st, p, width)) {
                self.claim(st, p, width);
                self.openings.push(Opening {
                    kind: OpeningKind::Window,
                    wall_anchor: Self::anchor(st, p),
                    orientation: st.orientation,
                    width: width as u32,
                    color_override: None,
                    swing: None,
                });
                return true;
            }
        }
        false
    }
}

/// Generates a valid plan meeting `spec` exactly.
pub fn synthesize(spec: &PlanSpec) -> Result<FloorPlan, SynthError> {
    let counts = spec.resolve();
    let rooms_total = counts.total_rooms();
    if rooms_total == 0 {
        return infeasible("a plan needs at least one room");
    }
    if counts.doors > 0 && counts.doors < rooms_total {
        return infeasible(format!(
            "{} doors cannot connect {} rooms (one door per room is needed)",
            counts.doors, rooms_total
        ));
    }
    if spec.shape == ShapeClass::OShaped && rooms_total < 2 {
        return infeasible("an o-shaped building needs at least two rooms");
    }
    if spec.shape == ShapeClass::MultipleBuildings && rooms_total < 2 {
        return infeasible("multiple buildings need at least two rooms");
    }
    let mut last = String::from("no layout attempt succeeded");
    for attempt in 0..LAYOUT_ATTEMPTS {
        let mut rng = rng_from_seed(derive_seed(spec.seed, "layout", attempt as u64));
        match try_layout(spec, &counts, attempt, &mut rng) {
            Ok(plan) => return Ok(plan),
            Err(SynthError::Infeasible(reason)) => last = reason,
        }
        if spec.size.is_some() && attempt >= 2 {
            break;
        }
    }
    Err(SynthError::Infeasible(last))
}

fn try_layout(spec: &PlanSpec, counts: &ResolvedCounts, attempt: u32, rng: &mut PlanRng) -> Result<FloorPlan, SynthError> {
    let grid = spec.grid;
    let t = template(spec.shape, grid, spec.size, attempt, rng)?;
    let k = counts.total_rooms();
    if k < t.components.len() as u32 {
        return infeasible(format!("{} buildings need at least {} rooms", t.components.len(), t.components.len()));
    }

    // Rooms per component.
    let caps: Vec<u32> = t
        .components
        .iter()
        .map(|c| c.blocks.iter().map(|b| capacity(b.rect.w(), b.rect.h(), b.outer)).sum())
        .collect();
    let total_cap: u32 = caps.iter().sum();
    if k > total_cap {
        return infeasible(format!("{k} rooms do not fit the footprint (capacity {total_cap})"));
    }
    let mut per_comp: Vec<u32> = t.components.iter().map(|c| c.min_rooms()).collect();
    if per_comp.iter().sum::<u32>() > k {
        return infeasible("too few rooms for this footprint");
    }
    for _ in per_comp.iter().sum::<u32>()..k {
        let open: Vec<usize> = (0..per_comp.len()).filter(|&i| per_comp[i] < caps[i]).collect();
        let i = *open.choose(rng).expect("capacity checked");
        per_comp[i] += 1;
    }

    let mut room_cells: Vec<HashSet<(i32, i32)>> = Vec::new();
    let mut component_of_room = Vec::new();
    let mut footprints = Vec::new();
    for (ci, comp) in t.components.iter().enumerate() {
        let all: HashSet<(i32, i32)> = comp.blocks.iter().flat_map(|b| b.rect.cells().collect::<Vec<_>>()).collect();
        footprints.push(footprint_of(&all, grid));
        let n = comp.blocks.len();
        let r = per_comp[ci] as usize;
        if r < n {
            // Merge contiguous chain runs of blocks into single rooms.
            let mut cuts: Vec<usize> = (1..n).collect();
            cuts.shuffle(rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(r - 1).collect();
            cuts.sort_unstable();
            let mut bounds = vec![0];
            bounds.extend(cuts);
            bounds.push(n);
            for win in bounds.windows(2) {
                let cells = comp.blocks[win[0]..win[1]].iter().flat_map(|b| b.rect.cells().collect::<Vec<_>>()).collect();
                room_cells.push(cells);
                component_of_room.push(ci);
            }
        } else {
            let block_caps: Vec<u32> = comp.blocks.iter().map(|b| capacity(b.rect.w(), b.rect.h(), b.outer)).collect();
            let mut per_block = vec![1u32; n];
            for _ in n..r {
                let open: Vec<usize> = (0..n).filter(|&i| per_block[i] < block_caps[i]).collect();
                // Weight by remaining capacity so large blocks take more rooms.
                let weights: Vec<u32> = open.iter().map(|&i| block_caps[i] - per_block[i]).collect();
                let total: u32 = weights.iter().sum();
                let mut pick = rng.random_range(0..total);
                let mut chosen = open[0];
                for (j, &wt) in open.iter().zip(&weights) {
                    if pick < wt {
                        chosen = *j;
                        break;
                    }
                    pick -= wt;
                }
                per_block[chosen] += 1;
            }
            for (b, &kb) in comp.blocks.iter().zip(&per_block) {
                let mut rects = Vec::new();
                let first_axis = rng.random_range(0..2);
                partition(b.rect, b.outer, kb, 0, first_axis, rng, &mut rects);
                for rc in rects {
                    room_cells.push(rc.cells().collect());
                    component_of_room.push(ci);
                }
            }
        }
    }
    if room_cells.len() as u32 != k {
        return infeasible("partition could not reach the requested room count");
    }

    let mut kinds: Vec<RoomKind> = std::iter::repeat_n(RoomKind::Kitchen, counts.kitchens as usize)
        .chain(std::iter::repeat_n(RoomKind::Bathroom, counts.bathrooms as usize))
        .chain(std::iter::repeat_n(RoomKind::LivingRoom, counts.living_rooms as usize))
        .collect();
    kinds.shuffle(rng);

    let rooms: Vec<Room> = room_cells
        .iter()
        .zip(&kinds)
        .enumerate()
        .map(|(i, (cells, &kind))| Room { id: i as u32, boundary: polygon_of(cells, grid), kind })
        .collect();
    let walls = walls_for_rooms(&rooms, 1);
    let layout = Layout::build(grid, room_cells, component_of_room);

    let mut placement = Placement::default();
    if counts.doors > 0 {
        place_doors(&layout, &mut placement, counts.doors, rng)?;
    }
    place_windows(&layout, &mut placement, counts.windows, rng)?;

    let mut openings = placement.openings;
    let mut overrides = BTreeMap::new();
    if let Some(rc) = spec.recolor {
        match rc.element {
            ElementTerm::Doors | ElementTerm::Windows => {
                let kind = rc.element.opening_kind().expect("opening term");
                for o in openings.iter_mut().filter(|o| o.kind == kind) {
                    o.color_override = Some(rc.color);
                }
            }
            ElementTerm::Rooms => {
                for k in RoomKind::ALL {
                    overrides.insert(k, rc.color);
                }
            }
            term => {
                overrides.insert(term.room_kind().expect("room term"), rc.color);
            }
        }
    }

    Ok(FloorPlan { grid, footprint: footprints, rooms, walls, openings, room_color_overrides: overrides })
}

fn place_doors(layout: &Layout, placement: &mut Placement, doors: u32, rng: &mut PlanRng) -> Result<(), SynthError> {
    let n = layout.rooms.len();
    let mut connected = vec![false; n];
    let mut entrance = vec![false; layout.component_of_room.iter().max().map_or(0, |m| m + 1)];
    let mut placed = 0u32;
    while connected.iter().any(|c| !c) {
        // Grow the spanning tree inside already entered buildings.
        let mut frontier: Vec<(Stretch, Side)> = layout
            .stretches
            .iter()
            .filter_map(|st| match (st.neg, st.pos) {
                (Owner::Room(a), Owner::Room(b)) if connected[a] != connected[b] => {
                    // Swing into either room.
                    Some((*st, if rng.random_bool(0.5) { Side::Negative } else { Side::Positive }))
                }
                _ => None,
            })
            .collect();
        frontier.shuffle(rng);
        let mut grown = false;
        for (st, side) in &frontier {
            if placement.try_door(layout, st, &[*side, side.flip()], rng) {
                let (Owner::Room(a), Owner::Room(b)) = (st.neg, st.pos) else { unreachable!() };
                connected[a] = true;
                connected[b] = true;
                placed += 1;
                grown = true;
                break;
            }
        }
        if grown {
            continue;
        }
        // Otherwise enter a building that has no entrance yet.
        let waiting: Vec<usize> = (0..n).filter(|&r| !connected[r]).collect();
        if waiting.iter().any(|&r| entrance[layout.component_of_room[r]]) {
            return infeasible("rooms could not be joined by doors");
        }
        let mut outer: Vec<Stretch> = layout
            .stretches
            .iter()
            .filter(|st| {
                st.exterior_side().is_some_and(|s| st.owner(s) == Owner::Outside)
                    && st.room_sides().iter().any(|&s| matches!(st.owner(s), Owner::Room(r) if !connected[r]))
            })
            .copied()
            .collect();
        outer.shuffle(rng);
        let mut entered = false;
        for st in &outer {
            let inside = st.exterior_side().expect("exterior").flip();
            if placement.try_door(layout, st, &[inside], rng) {
                let Owner::Room(r) = st.owner(inside) else { unreachable!() };
                connected[r] = true;
                entrance[layout.component_of_room[r]] = true;
                placed += 1;
                entered = true;
                break;
            }
        }
        if !entered {
            return infeasible("no room for an entrance door");
        }
    }
    if placed > doors {
        return infeasible(format!("{doors} doors cannot connect every room"));
    }
    let mut fails = 0;
    while placed < doors {
        let st = layout.stretches.choose(rng).expect("walls exist");
        let sides = st.room_sides();
        if placement.try_door(layout, st, &sides, rng) {
            placed += 1;
            fails = 0;
        } else {
            fails += 1;
            if fails > 4 * layout.stretches.len() + 64 {
                return infeasible(format!("walls cannot host {doors} doors"));
            }
        }
    }
    Ok(())
}

fn place_windows(layout: &Layout, placement: &mut Placement, windows: u32, rng: &mut PlanRng) -> Result<(), SynthError> {
    if windows == 0 {
        return Ok(());
    }
    let mut exterior: Vec<Stretch> = layout.stretches.iter().filter(|st| st.exterior_side().is_some()).copied().collect();
    let exterior_len: i32 = exterior.iter().map(|st| st.end - st.start).sum();
    if windows as i32 > exterior_len / 3 {
        return infeasible(format!("{windows} windows exceed the exterior wall capacity"));
    }
    exterior.shuffle(rng);
    let mut placed = 0;
    while placed < windows {
        let mut progress = false;
        for st in &exterior {
            if placed == windows {
                break;
            }
            if placement.try_window(st, rng) {
                placed += 1;
                progress = true;
            }
        }
        if !progress {
            return infeasible(format!("exterior walls cannot host {windows} windows"));
        }
    }
    Ok(())
}

/// Element shown alone on a symbol card.
pub fn card_element_for(term: ElementTerm) -> Option<ElementTerm> {
    (term != ElementTerm::Rooms).then_some(term)
}

/// Minimal centered plan with exactly one instance of `element`. Doors and
/// windows are hosted by a single living-room stub.
pub fn symbol_card(element: ElementTerm, orientation: Orientation, seed: u64) -> Result<FloorPlan, SynthError> {
    let grid = DEFAULT_GRID;
    let mut rng = rng_from_seed(derive_seed(seed, "symbol-card", 0));
    let kind = match element {
        ElementTerm::Doors | ElementTerm::Windows => RoomKind::LivingRoom,
        ElementTerm::Rooms => return infeasible("symbol cards show a single concrete element"),
        t => t.room_kind().expect("room term"),
    };
    // Large enough for the wall ink to clear the decoder's plan threshold.
    let long = rng.random_range(20..=30);
    let short = rng.random_range(16..=long.min(22));
    // The opening sits on the long wall, which runs along `orientation`.
    let (w, h) = match orientation {
        Orientation::Horizontal => (long, short),
        Orientation::Vertical => (short, long),
    };
    let x0 = (grid - w) / 2;
    let y0 = (grid - h) / 2;
    let rect = RectilinearPolygon::rect(x0, y0, x0 + w, y0 + h);
    let rooms = vec![Room { id: 0, boundary: rect.clone(), kind }];
    let walls = walls_for_rooms(&rooms, 1);
    let mut openings = Vec::new();
    if let Some(ok) = element.opening_kind() {
        let width: u32 = if ok == OpeningKind::Door { DOOR_WIDTH } else { rng.random_range(2..=3) };
        let far = rng.random_bool(0.5);
        let (anchor, into) = match orientation {
            Orientation::Horizontal => {
                let y = if far { y0 + h } else { y0 };
                (GridPoint::new(x0 + (w - width as i32) / 2, y), if far { Side::Negative } else { Side::Positive })
            }
            Orientation::Vertical => {
                let x = if far { x0 + w } else { x0 };
                (GridPoint::new(x, y0 + (h - width as i32) / 2), if far { Side::Negative } else { Side::Positive })
            }
        };
        let swing = (ok == OpeningKind::Door).then(|| DoorSwing {
            into,
            hinge: if rng.random_bool(0.5) { SpanEnd::Start } else { SpanEnd::End },
        });
        openings.push(Opening { kind: ok, wall_anchor: anchor, orientation, width, color_override: None, swing });
    }
    Ok(FloorPlan {
        grid,
        footprint: vec![Footprint::solid(rect)],
        rooms,
        walls,
        openings,
        room_color_overrides: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{element_counts, footprint_shape_class, validate};

    fn counts(k: u32, b: u32, l: u32, d: u32, w: u32) -> ResolvedCounts {
        ResolvedCounts { kitchens: k, bathrooms: b, living_rooms: l, doors: d, windows: w }
    }

    #[test]
    fn band_thresholds() {
        assert_eq!(QuantityBand::of_count(0), QuantityBand::No);
        assert_eq!(QuantityBand::of_count(1), QuantityBand::Few);
        assert_eq!(QuantityBand::of_count(6), QuantityBand::Few);
        assert_eq!(QuantityBand::of_count(7), QuantityBand::Many);
        assert_eq!(QuantityBand::of_count(500), QuantityBand::Many);
        assert!(!QuantityBand::Few.admits(7));
        assert!(QuantityBand::Many.admits(40));
        assert_eq!(QuantityBand::Many.range(), (7, 12));
    }

    #[test]
    fn square_example_meets_counts() {
        let spec = PlanSpec::exact(ShapeClass::Square, counts(1, 1, 2, 4, 6), 42);
        let plan = synthesize(&spec).unwrap();
        assert_eq!(validate(&plan), vec![]);
        let c = element_counts(&plan);
        assert_eq!((c.kitchens, c.bathrooms, c.living_rooms, c.doors, c.windows), (1, 1, 2, 4, 6));
        assert_eq!(footprint_shape_class(&plan), Ok(ShapeClass::Square));
    }

    #[test]
    fn windowless_rectangle() {
        let spec = PlanSpec::exact(ShapeClass::Rectangle, counts(0, 0, 1, 1, 0), 7);
        let plan = synthesize(&spec).unwrap();
        assert_eq!(validate(&plan), vec![]);
        assert_eq!(element_counts(&plan).windows, 0);
        assert_eq!(footprint_shape_class(&plan), Ok(ShapeClass::Rectangle));
    }

    #[test]
    fn too_many_windows_is_infeasible() {
        let mut spec = PlanSpec::exact(ShapeClass::Square, counts(0, 0, 1, 1, 500), 3);
        spec.size = Some([10, 10]);
        assert!(matches!(synthesize(&spec), Err(SynthError::Infeasible(_))));
    }

    #[test]
    fn too_few_doors_is_infeasible() {
        let spec = PlanSpec::exact(ShapeClass::Square, counts(2, 2, 2, 2, 0), 3);
        assert!(synthesize(&spec).is_err());
    }

    #[test]
    fn every_shape_is_synthesized() {
        for (i, shape) in ShapeClass::ALL.into_iter().enumerate() {
            for seed in 0..20u64 {
                let spec = PlanSpec::exact(shape, counts(1, 1, 2, 5, 4), seed * 31 + i as u64);
                let plan = synthesize(&spec).unwrap_or_else(|e| panic!("{shape:?} seed {seed}: {e}"));
                assert_eq!(validate(&plan), vec![], "{shape:?} seed {seed}");
                assert_eq!(footprint_shape_class(&plan), Ok(shape), "{shape:?} seed {seed}");
            }
        }
    }

    #[test]
    fn single_room_l_shape_uses_a_merged_room() {
        let spec = PlanSpec::exact(ShapeClass::LShaped, counts(0, 0, 1, 1, 2), 5);
        let plan = synthesize(&spec).unwrap();
        assert_eq!(plan.rooms.len(), 1);
        assert_eq!(plan.rooms[0].boundary.reflex_vertices().len(), 1);
        assert_eq!(validate(&plan), vec![]);
    }

    #[test]
    fn recolor_marks_elements() {
        let spec = PlanSpec::exact(ShapeClass::Square, counts(1, 0, 1, 3, 2), 9).with_recolor(ElementTerm::Doors, ColorName::Green);
        let plan = synthesize(&spec).unwrap();
        assert!(plan.openings.iter().filter(|o| o.kind == OpeningKind::Door).all(|o| o.color_override == Some(ColorName::Green)));
        let spec = PlanSpec::exact(ShapeClass::Square, counts(1, 0, 1, 3, 2), 9).with_recolor(ElementTerm::Kitchen, ColorName::Green);
        let plan = synthesize(&spec).unwrap();
        assert_eq!(plan.room_color_overrides.get(&RoomKind::Kitchen), Some(&ColorName::Green));
    }

    #[test]
    fn zero_doors_plans_are_valid() {
        let spec = PlanSpec::exact(ShapeClass::CShaped, counts(1, 1, 1, 0, 3), 11);
        let plan = synthesize(&spec).unwrap();
        assert_eq!(validate(&plan), vec![]);
        assert_eq!(element_counts(&plan).doors, 0);
    }

    #[test]
    fn symbol_cards() {
        let card = symbol_card(ElementTerm::Doors, Orientation::Horizontal, 1).unwrap();
        let c = element_counts(&card);
        assert_eq!((c.doors, c.windows, c.total_rooms()), (1, 0, 1));
        assert_eq!(validate(&card), vec![]);
        let card = symbol_card(ElementTerm::Kitchen, Orientation::Vertical, 1).unwrap();
        assert_eq!(element_counts(&card).kitchens, 1);
        let a = symbol_card(ElementTerm::Doors, Orientation::Vertical, 1).unwrap();
        let b = symbol_card(ElementTerm::Doors, Orientation::Vertical, 2).unwrap();
        assert_ne!(a, b);
        assert_eq!(validate(&a), vec![]);
        assert_eq!(validate(&b), vec![]);
        let w = symbol_card(ElementTerm::Windows, Orientation::Vertical, 4).unwrap();
        assert_eq!(validate(&w), vec![]);
        assert_eq!(element_counts(&w).windows, 1);
    }

    #[test]
    fn spec_json_round_trip() {
        let mut spec = PlanSpec::exact(ShapeClass::OShaped, counts(1, 2, 1, 4, 3), 99);
        spec.rooms.insert(RoomKind::Kitchen, CountSpec::Band(QuantityBand::Few));
        let text = spec.to_json();
        assert!(text.contains("planforge-spec/1"));
        assert!(text.contains("\"few\""));
        assert_eq!(PlanSpec::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn capacity_is_additive() {
        assert_eq!(capacity(4, 4, LEFT), 1);
        assert_eq!(capacity(3, 8, LEFT), 0);
        // Strips along the single outer side.
        assert_eq!(capacity(8, 20, LEFT), 5);
        assert_eq!(capacity(16, 8, TOP), 4);
    }
}
