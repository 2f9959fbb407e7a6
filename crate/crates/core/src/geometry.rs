//! Rectilinear floor-plan model on an integer grid, with the structural
//! queries the rest of the crate depends on: validation, element counts,
//! footprint shape class and the room adjacency graph.
//!
//! Coordinates are grid lines. A cell `(x, y)` covers `[x, x+1] × [y, y+1]`.
//! Polygons are stored with positive shoelace area ("counter-clockwise" in
//! a y-up frame; on screen, with y pointing down, they appear clockwise).

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::palette::ColorName;

pub const DEFAULT_GRID: i32 = 64;
pub const PLAN_SCHEMA: &str = "planforge-plan/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct GridPoint {
    pub x: i32,
    pub y: i32,
}

impl GridPoint {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }
}

impl From<[i32; 2]> for GridPoint {
    fn from([x, y]: [i32; 2]) -> Self {
        Self { x, y }
    }
}

impl From<GridPoint> for [i32; 2] {
    fn from(p: GridPoint) -> Self {
        [p.x, p.y]
    }
}

/// What is wrong with a polygon's vertex list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolygonDefect {
    TooFewVertices,
    NotAxisAligned,
    SelfIntersecting,
    Clockwise,
    OutOfBounds,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RectilinearPolygon {
    pub vertices: Vec<GridPoint>,
}

/// Axis-aligned bounding box in grid lines, `min` inclusive and `max` exclusive for cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BBox {
    pub min: GridPoint,
    pub max: GridPoint,
}

impl BBox {
    pub fn width(&self) -> i32 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> i32 {
        self.max.y - self.min.y
    }
}

impl RectilinearPolygon {
    pub fn new(vertices: Vec<GridPoint>) -> Self {
        Self { vertices }
    }

    /// Rectangle covering cells `x0..x1 × y0..y1`.
    pub fn rect(x0: i32, y0: i32, x1: i32, y1: i32) -> Self {
        Self::new(vec![
            GridPoint::new(x0, y0),
            GridPoint::new(x1, y0),
            GridPoint::new(x1, y1),
            GridPoint::new(x0, y1),
        ])
    }

    pub fn edges(&self) -> impl Iterator<Item = (GridPoint, GridPoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Twice the signed shoelace area.
    pub fn signed_area2(&self) -> i64 {
        self.edges()
            .map(|(a, b)| a.x as i64 * b.y as i64 - b.x as i64 * a.y as i64)
            .sum()
    }

    pub fn area(&self) -> i64 {
        self.signed_area2().abs() / 2
    }

    pub fn bbox(&self) -> BBox {
        let mut min = GridPoint::new(i32::MAX, i32::MAX);
        let mut max = GridPoint::new(i32::MIN, i32::MIN);
        for v in &self.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        BBox { min, max }
    }

    /// Even-odd test for a point that never lies on a grid line (cell centers).
    pub fn contains(&self, px: f64, py: f64) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if a.x != b.x {
                continue;
            }
            let (y0, y1) = (a.y.min(b.y) as f64, a.y.max(b.y) as f64);
            if (a.x as f64) > px && py > y0 && py < y1 {
                inside = !inside;
            }
        }
        inside
    }

    pub fn contains_cell(&self, x: i32, y: i32) -> bool {
        self.contains(x as f64 + 0.5, y as f64 + 0.5)
    }

    /// Drops repeated and collinear vertices.
    pub fn normalized(&self) -> Self {
        let mut v: Vec<GridPoint> = Vec::with_capacity(self.vertices.len());
        for &p in &self.vertices {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        loop {
            let n = v.len();
            if n < 3 {
                break;
            }
            let mut removed = false;
            for i in 0..n {
                let a = v[(i + n - 1) % n];
                let b = v[i];
                let c = v[(i + 1) % n];
                let cross = (b.x - a.x) as i64 * (c.y - b.y) as i64 - (b.y - a.y) as i64 * (c.x - b.x) as i64;
                if cross == 0 {
                    v.remove(i);
                    removed = true;
                    break;
                }
            }
            if !removed {
                break;
            }
        }
        Self::new(v)
    }

    /// Indices (into the normalized vertex list) of reflex vertices. Assumes
    /// positive orientation; a clockwise input is reversed first.
    pub fn reflex_vertices(&self) -> Vec<usize> {
        let mut p = self.normalized();
        if p.signed_area2() < 0 {
            p.vertices.reverse();
        }
        let v = &p.vertices;
        let n = v.len();
        (0..n)
            .filter(|&i| {
                let a = v[(i + n - 1) % n];
                let b = v[i];
                let c = v[(i + 1) % n];
                let cross = (b.x - a.x) as i64 * (c.y - b.y) as i64 - (b.y - a.y) as i64 * (c.x - b.x) as i64;
                cross < 0
            })
            .collect()
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Self {
        Self::new(self.vertices.iter().map(|p| GridPoint::new(p.x + dx, p.y + dy)).collect())
    }

    pub fn scaled(&self, k: i32) -> Self {
        Self::new(self.vertices.iter().map(|p| GridPoint::new(p.x * k, p.y * k)).collect())
    }

    /// Structural defects; empty when the polygon satisfies every invariant.
    /// `grid` bounds the coordinates when given.
    pub fn defects(&self, grid: Option<i32>) -> Vec<PolygonDefect> {
        let mut out = Vec::new();
        let v = &self.vertices;
        if v.len() < 4 {
            out.push(PolygonDefect::TooFewVertices);
            return out;
        }
        if let Some(g) = grid {
            if v.iter().any(|p| p.x < 0 || p.y < 0 || p.x > g || p.y > g) {
                out.push(PolygonDefect::OutOfBounds);
            }
        }
        if self.edges().any(|(a, b)| (a.x != b.x && a.y != b.y) || a == b) {
            out.push(PolygonDefect::NotAxisAligned);
            return out;
        }
        if self.self_intersects() {
            out.push(PolygonDefect::SelfIntersecting);
        } else if self.signed_area2() <= 0 {
            out.push(PolygonDefect::Clockwise);
        }
        out
    }

    fn self_intersects(&self) -> bool {
        let edges: Vec<_> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if segments_touch(edges[i], edges[j], adjacent) {
                    return true;
                }
            }
        }
        false
    }
}

/// Axis-aligned segment intersection. Adjacent edges may share exactly their
/// common endpoint.
fn segments_touch(a: (GridPoint, GridPoint), b: (GridPoint, GridPoint), adjacent: bool) -> bool {
    let (ax0, ax1) = (a.0.x.min(a.1.x), a.0.x.max(a.1.x));
    let (ay0, ay1) = (a.0.y.min(a.1.y), a.0.y.max(a.1.y));
    let (bx0, bx1) = (b.0.x.min(b.1.x), b.0.x.max(b.1.x));
    let (by0, by1) = (b.0.y.min(b.1.y), b.0.y.max(b.1.y));
    let ox0 = ax0.max(bx0);
    let ox1 = ax1.min(bx1);
    let oy0 = ay0.max(by0);
    let oy1 = ay1.min(by1);
    if ox0 > ox1 || oy0 > oy1 {
        return false;
    }
    if !adjacent {
        return true;
    }
    // Adjacent edges may only share their common vertex.
    !(ox0 == ox1 && oy0 == oy1)
}

/// One connected building outline, possibly with courtyards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Footprint {
    pub outer: RectilinearPolygon,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<RectilinearPolygon>,
}

impl Footprint {
    pub fn solid(outer: RectilinearPolygon) -> Self {
        Self { outer, holes: Vec::new() }
    }

    pub fn contains_cell(&self, x: i32, y: i32) -> bool {
        self.outer.contains_cell(x, y) && !self.holes.iter().any(|h| h.contains_cell(x, y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoomKind {
    Kitchen,
    Bathroom,
    LivingRoom,
}

impl RoomKind {
    pub const ALL: [RoomKind; 3] = [RoomKind::Kitchen, RoomKind::Bathroom, RoomKind::LivingRoom];

    /// Fill color when rooms are semantically colored.
    pub const fn canonical_color(self) -> ColorName {
        match self {
            RoomKind::Kitchen => ColorName::Magenta,
            RoomKind::Bathroom => ColorName::Cyan,
            RoomKind::LivingRoom => ColorName::Yellow,
        }
    }

    pub fn from_canonical_color(c: ColorName) -> Option<RoomKind> {
        RoomKind::ALL.into_iter().find(|k| k.canonical_color() == c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    pub id: u32,
    pub boundary: RectilinearPolygon,
    pub kind: RoomKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpeningKind {
    Door,
    Window,
}

impl OpeningKind {
    pub const fn canonical_color(self) -> ColorName {
        match self {
            OpeningKind::Door => ColorName::Red,
            OpeningKind::Window => ColorName::Blue,
        }
    }
}

/// Direction of the wall an opening sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Side of a wall line: toward smaller or larger perpendicular coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Negative => Side::Positive,
            Side::Positive => Side::Negative,
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Side::Negative => -1,
            Side::Positive => 1,
        }
    }
}

/// End of the opening span carrying the door hinge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanEnd {
    Start,
    End,
}

/// How a door leaf swings: into which side of the wall, hinged at which end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DoorSwing {
    pub into: Side,
    pub hinge: SpanEnd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub kind: OpeningKind,
    /// Grid point where the span starts (smallest coordinate along the wall).
    pub wall_anchor: GridPoint,
    pub orientation: Orientation,
    pub width: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color_override: Option<ColorName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swing: Option<DoorSwing>,
}

impl Opening {
    pub fn unit_edges(&self) -> impl Iterator<Item = UnitEdge> + '_ {
        let (line, start) = match self.orientation {
            Orientation::Horizontal => (self.wall_anchor.y, self.wall_anchor.x),
            Orientation::Vertical => (self.wall_anchor.x, self.wall_anchor.y),
        };
        (0..self.width as i32).map(move |i| UnitEdge { orientation: self.orientation, line, pos: start + i })
    }

    /// Cell on the given side of the wall at span offset `i`.
    pub fn side_cell(&self, side: Side, i: i32) -> (i32, i32) {
        self.unit_edges().nth(i as usize).map(|e| e.side_cell(side)).unwrap_or((i32::MIN, i32::MIN))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallSegment {
    pub start: GridPoint,
    pub end: GridPoint,
    pub thickness: u32,
}

impl WallSegment {
    pub fn is_axis_aligned(&self) -> bool {
        (self.start.x == self.end.x) != (self.start.y == self.end.y)
    }

    pub fn unit_edges(&self) -> Vec<UnitEdge> {
        if !self.is_axis_aligned() {
            return Vec::new();
        }
        if self.start.y == self.end.y {
            let (a, b) = (self.start.x.min(self.end.x), self.start.x.max(self.end.x));
            (a..b).map(|x| UnitEdge { orientation: Orientation::Horizontal, line: self.start.y, pos: x }).collect()
        } else {
            let (a, b) = (self.start.y.min(self.end.y), self.start.y.max(self.end.y));
            (a..b).map(|y| UnitEdge { orientation: Orientation::Vertical, line: self.start.x, pos: y }).collect()
        }
    }
}

/// A unit-length piece of grid line. Horizontal edges lie on `y = line`
/// between `x = pos` and `pos + 1`; vertical edges on `x = line`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitEdge {
    pub orientation: Orientation,
    pub line: i32,
    pub pos: i32,
}

impl UnitEdge {
    pub fn side_cell(&self, side: Side) -> (i32, i32) {
        let off = match side {
            Side::Negative => -1,
            Side::Positive => 0,
        };
        match self.orientation {
            Orientation::Horizontal => (self.pos, self.line + off),
            Orientation::Vertical => (self.line + off, self.pos),
        }
    }
}

fn polygon_unit_edges(p: &RectilinearPolygon) -> Vec<UnitEdge> {
    p.edges()
        .flat_map(|(a, b)| WallSegment { start: a, end: b, thickness: 1 }.unit_edges())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeClass {
    LShaped,
    CShaped,
    OShaped,
    Square,
    Rectangle,
    MultipleBuildings,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 6] = [
        ShapeClass::LShaped,
        ShapeClass::CShaped,
        ShapeClass::OShaped,
        ShapeClass::Square,
        ShapeClass::Rectangle,
        ShapeClass::MultipleBuildings,
    ];

    /// Prompt wording.
    pub const fn word(self) -> &'static str {
        match self {
            ShapeClass::LShaped => "l-shaped",
            ShapeClass::CShaped => "c-shaped",
            ShapeClass::OShaped => "o-shaped",
            ShapeClass::Square => "square",
            ShapeClass::Rectangle => "rectangle",
            ShapeClass::MultipleBuildings => "multiple",
        }
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("footprint matches no shape class ({reason})")]
pub struct Unclassifiable {
    pub reason: &'static str,
}

pub const SQUARE_ASPECT_MIN: f64 = 0.9;
pub const SQUARE_ASPECT_MAX: f64 = 1.1;

/// Shape class of a set of footprint components.
pub fn classify_footprint(components: &[Footprint]) -> Result<ShapeClass, Unclassifiable> {
    match components {
        [] => Err(Unclassifiable { reason: "empty footprint" }),
        [_, _, ..] => Ok(ShapeClass::MultipleBuildings),
        [one] => match one.holes.len() {
            1 => Ok(ShapeClass::OShaped),
            0 => classify_outline(&one.outer),
            _ => Err(Unclassifiable { reason: "more than one hole" }),
        },
    }
}

fn classify_outline(outer: &RectilinearPolygon) -> Result<ShapeClass, Unclassifiable> {
    let norm = outer.normalized();
    let reflex = norm.reflex_vertices();
    let n = norm.vertices.len();
    match reflex.as_slice() {
        [] => {
            let bb = norm.bbox();
            let aspect = bb.width() as f64 / bb.height().max(1) as f64;
            if (SQUARE_ASPECT_MIN..=SQUARE_ASPECT_MAX).contains(&aspect) {
                Ok(ShapeClass::Square)
            } else {
                Ok(ShapeClass::Rectangle)
            }
        }
        [_] => Ok(ShapeClass::LShaped),
        [a, b] => {
            // Consecutive reflex corners are the floor of an open notch.
            if (a + 1) % n == *b || (b + 1) % n == *a {
                Ok(ShapeClass::CShaped)
            } else {
                Err(Unclassifiable { reason: "two reflex vertices without a notch" })
            }
        }
        _ => Err(Unclassifiable { reason: "more than two reflex vertices" }),
    }
}

/// Plan element vocabulary shared by specs, prompts and the evaluator.
/// `Rooms` is the generic room term used by room-count queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementTerm {
    Doors,
    Windows,
    Kitchen,
    Bathroom,
    LivingRoom,
    Rooms,
}

impl ElementTerm {
    pub const ALL: [ElementTerm; 6] = [
        ElementTerm::Doors,
        ElementTerm::Windows,
        ElementTerm::Kitchen,
        ElementTerm::Bathroom,
        ElementTerm::LivingRoom,
        ElementTerm::Rooms,
    ];

    /// The five concrete element kinds a plan is made of.
    pub const CONCRETE: [ElementTerm; 5] = [
        ElementTerm::Doors,
        ElementTerm::Windows,
        ElementTerm::Kitchen,
        ElementTerm::Bathroom,
        ElementTerm::LivingRoom,
    ];

    pub const fn word(self) -> &'static str {
        match self {
            ElementTerm::Doors => "doors",
            ElementTerm::Windows => "windows",
            ElementTerm::Kitchen => "kitchen",
            ElementTerm::Bathroom => "bathroom",
            ElementTerm::LivingRoom => "living room",
            ElementTerm::Rooms => "rooms",
        }
    }

    pub fn from_word(w: &str) -> Option<ElementTerm> {
        ElementTerm::ALL.into_iter().find(|e| e.word() == w)
    }

    pub const fn canonical_color(self) -> ColorName {
        match self {
            ElementTerm::Doors => ColorName::Red,
            ElementTerm::Windows => ColorName::Blue,
            ElementTerm::Kitchen => ColorName::Magenta,
            ElementTerm::Bathroom => ColorName::Cyan,
            ElementTerm::LivingRoom => ColorName::Yellow,
            ElementTerm::Rooms => ColorName::White,
        }
    }

    pub const fn room_kind(self) -> Option<RoomKind> {
        match self {
            ElementTerm::Kitchen => Some(RoomKind::Kitchen),
            ElementTerm::Bathroom => Some(RoomKind::Bathroom),
            ElementTerm::LivingRoom => Some(RoomKind::LivingRoom),
            _ => None,
        }
    }

    pub const fn opening_kind(self) -> Option<OpeningKind> {
        match self {
            ElementTerm::Doors => Some(OpeningKind::Door),
            ElementTerm::Windows => Some(OpeningKind::Window),
            _ => None,
        }
    }

    pub const fn from_room_kind(k: RoomKind) -> ElementTerm {
        match k {
            RoomKind::Kitchen => ElementTerm::Kitchen,
            RoomKind::Bathroom => ElementTerm::Bathroom,
            RoomKind::LivingRoom => ElementTerm::LivingRoom,
        }
    }
}

impl fmt::Display for ElementTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub grid: i32,
    pub footprint: Vec<Footprint>,
    pub rooms: Vec<Room>,
    pub walls: Vec<WallSegment>,
    pub openings: Vec<Opening>,
    pub room_color_overrides: BTreeMap<RoomKind, ColorName>,
}

/// Node of the adjacency graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Node {
    Exterior,
    Room(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyEdge {
    pub a: Node,
    pub b: Node,
    /// Number of unit wall edges the two nodes share.
    pub shared_wall: u32,
    pub doors: u32,
}

#[derive(Clone, Debug, Default)]
pub struct AdjacencyGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<AdjacencyEdge>,
}

impl AdjacencyGraph {
    pub fn edge(&self, a: Node, b: Node) -> Option<&AdjacencyEdge> {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.a == a && e.b == b)
    }

    /// Nodes reachable from the exterior through doors.
    pub fn door_reachable(&self) -> HashSet<Node> {
        let mut seen = HashSet::from([Node::Exterior]);
        let mut queue = VecDeque::from([Node::Exterior]);
        while let Some(n) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.doors > 0) {
                let other = if e.a == n {
                    e.b
                } else if e.b == n {
                    e.a
                } else {
                    continue;
                };
                if seen.insert(other) {
                    queue.push_back(other);
                }
            }
        }
        seen
    }
}

/// Per-cell footprint component and room membership.
pub struct CellMap {
    grid: i32,
    component: Vec<Option<u16>>,
    room: Vec<Option<usize>>,
    overlaps: Vec<(usize, usize)>,
}

impl CellMap {
    pub fn build(plan: &FloorPlan) -> Self {
        let g = plan.grid.max(1);
        let n = (g * g) as usize;
        let mut component = vec![None; n];
        let mut room = vec![None; n];
        let mut overlaps = Vec::new();
        for (ci, fp) in plan.footprint.iter().enumerate() {
            let bb = fp.outer.bbox();
            for y in bb.min.y.max(0)..bb.max.y.min(g) {
                for x in bb.min.x.max(0)..bb.max.x.min(g) {
                    if fp.contains_cell(x, y) {
                        component[(y * g + x) as usize].get_or_insert(ci as u16);
                    }
                }
            }
        }
        for (ri, r) in plan.rooms.iter().enumerate() {
            let bb = r.boundary.bbox();
            for y in bb.min.y.max(0)..bb.max.y.min(g) {
                for x in bb.min.x.max(0)..bb.max.x.min(g) {
                    if r.boundary.contains_cell(x, y) {
                        let slot = &mut room[(y * g + x) as usize];
                        match *slot {
                            Some(other) if other != ri => {
                                if !overlaps.contains(&(other, ri)) {
                                    overlaps.push((other, ri));
                                }
                            }
                            _ => *slot = Some(ri),
                        }
                    }
                }
            }
        }
        Self { grid: g, component, room, overlaps }
    }

    fn idx(&self, x: i32, y: i32) -> Option<usize> {
        (x >= 0 && y >= 0 && x < self.grid && y < self.grid).then(|| (y * self.grid + x) as usize)
    }

    pub fn component(&self, x: i32, y: i32) -> Option<u16> {
        self.idx(x, y).and_then(|i| self.component[i])
    }

    pub fn room_index(&self, x: i32, y: i32) -> Option<usize> {
        self.idx(x, y).and_then(|i| self.room[i])
    }

    pub fn in_footprint(&self, x: i32, y: i32) -> bool {
        self.component(x, y).is_some()
    }

    pub fn node(&self, plan: &FloorPlan, x: i32, y: i32) -> Node {
        match self.room_index(x, y) {
            Some(i) => Node::Room(plan.rooms[i].id),
            None => Node::Exterior,
        }
    }

    /// An edge with footprint on exactly one side.
    pub fn is_exterior_edge(&self, e: UnitEdge) -> bool {
        let (ax, ay) = e.side_cell(Side::Negative);
        let (bx, by) = e.side_cell(Side::Positive);
        self.in_footprint(ax, ay) != self.in_footprint(bx, by)
    }
}

/// A broken plan invariant together with the offending element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    FootprintDefect { component: usize, defect: PolygonDefect },
    HoleDefect { component: usize, hole: usize, defect: PolygonDefect },
    RoomBoundaryDefect { room: u32, defect: PolygonDefect },
    DuplicateRoomId { room: u32 },
    RoomOutsideFootprint { room: u32 },
    RoomsOverlap { a: u32, b: u32 },
    ComponentWithoutRoom { component: usize },
    WallDefect { wall: usize },
    WallMissing { room: u32, at: GridPoint },
    OpeningWidthZero { opening: usize },
    OpeningOffWall { opening: usize },
    WindowOnInteriorWall { opening: usize },
    OpeningsOverlap { a: usize, b: usize },
    RoomUnreachable { room: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FootprintDefect { component, defect } => write!(f, "footprint component {component}: {defect:?}"),
            Violation::HoleDefect { component, hole, defect } => {
                write!(f, "hole {hole} of footprint component {component}: {defect:?}")
            }
            Violation::RoomBoundaryDefect { room, defect } => write!(f, "room {room} boundary: {defect:?}"),
            Violation::DuplicateRoomId { room } => write!(f, "room id {room} is used twice"),
            Violation::RoomOutsideFootprint { room } => write!(f, "room {room} is not inside one footprint component"),
            Violation::RoomsOverlap { a, b } => write!(f, "rooms {a} and {b} overlap"),
            Violation::ComponentWithoutRoom { component } => write!(f, "footprint component {component} has no room"),
            Violation::WallDefect { wall } => write!(f, "wall {wall} is degenerate or not axis-aligned"),
            Violation::WallMissing { room, at } => write!(f, "room {room} edge at ({}, {}) has no wall", at.x, at.y),
            Violation::OpeningWidthZero { opening } => write!(f, "opening {opening} has zero width"),
            Violation::OpeningOffWall { opening } => write!(f, "opening {opening} does not lie on a single wall"),
            Violation::WindowOnInteriorWall { opening } => write!(f, "window {opening} is on an interior wall"),
            Violation::OpeningsOverlap { a, b } => write!(f, "openings {a} and {b} overlap"),
            Violation::RoomUnreachable { room } => write!(f, "room {room} cannot be reached from outside through doors"),
        }
    }
}

/// Every broken invariant of `plan`; empty iff the plan is valid.
///
/// Door connectivity is only required when the plan has at least one door,
/// so explicit no-door plans (and single-element symbol cards) stay valid.
pub fn validate(plan: &FloorPlan) -> Vec<Violation> {
    let mut out = Vec::new();
    let grid = Some(plan.grid);

    for (ci, fp) in plan.footprint.iter().enumerate() {
        for defect in fp.outer.defects(grid) {
            out.push(Violation::FootprintDefect { component: ci, defect });
        }
        for (hi, h) in fp.holes.iter().enumerate() {
            for defect in h.defects(grid) {
                out.push(Violation::HoleDefect { component: ci, hole: hi, defect });
            }
        }
    }
    let mut seen_ids = HashSet::new();
    for r in &plan.rooms {
        for defect in r.boundary.defects(grid) {
            out.push(Violation::RoomBoundaryDefect { room: r.id, defect });
        }
        if !seen_ids.insert(r.id) {
            out.push(Violation::DuplicateRoomId { room: r.id });
        }
    }

    let cells = CellMap::build(plan);
    let mut component_has_room = vec![false; plan.footprint.len()];
    for r in &plan.rooms {
        let bb = r.boundary.bbox();
        let mut comps = HashSet::new();
        let mut outside = false;
        for y in bb.min.y..bb.max.y {
            for x in bb.min.x..bb.max.x {
                if r.boundary.contains_cell(x, y) {
                    match cells.component(x, y) {
                        Some(c) => {
                            comps.insert(c);
                        }
                        None => outside = true,
                    }
                }
            }
        }
        if outside || comps.len() != 1 {
            out.push(Violation::RoomOutsideFootprint { room: r.id });
        } else if let Some(&c) = comps.iter().next() {
            component_has_room[c as usize] = true;
        }
    }
    for &(a, b) in &cells.overlaps {
        out.push(Violation::RoomsOverlap { a: plan.rooms[a].id, b: plan.rooms[b].id });
    }
    for (ci, has) in component_has_room.iter().enumerate() {
        if !has {
            out.push(Violation::ComponentWithoutRoom { component: ci });
        }
    }

    let mut wall_edges = HashSet::new();
    for (wi, w) in plan.walls.iter().enumerate() {
        if !w.is_axis_aligned() || w.thickness == 0 {
            out.push(Violation::WallDefect { wall: wi });
            continue;
        }
        wall_edges.extend(w.unit_edges());
    }
    for r in &plan.rooms {
        if let Some(e) = polygon_unit_edges(&r.boundary).into_iter().find(|e| !wall_edges.contains(e)) {
            let at = match e.orientation {
                Orientation::Horizontal => GridPoint::new(e.pos, e.line),
                Orientation::Vertical => GridPoint::new(e.line, e.pos),
            };
            out.push(Violation::WallMissing { room: r.id, at });
        }
    }

    let mut claimed: HashMap<UnitEdge, usize> = HashMap::new();
    for (oi, o) in plan.openings.iter().enumerate() {
        if o.width == 0 {
            out.push(Violation::OpeningWidthZero { opening: oi });
            continue;
        }
        let edges: Vec<UnitEdge> = o.unit_edges().collect();
        let on_walls = edges.iter().all(|e| wall_edges.contains(e));
        let sides: HashSet<(Node, Node)> = edges
            .iter()
            .map(|e| {
                let (ax, ay) = e.side_cell(Side::Negative);
                let (bx, by) = e.side_cell(Side::Positive);
                (cells.node(plan, ax, ay), cells.node(plan, bx, by))
            })
            .collect();
        let single_wall = sides.len() == 1 && sides.iter().all(|(a, b)| a != b);
        if !on_walls || !single_wall {
            out.push(Violation::OpeningOffWall { opening: oi });
        } else if o.kind == OpeningKind::Window && !edges.iter().all(|&e| cells.is_exterior_edge(e)) {
            out.push(Violation::WindowOnInteriorWall { opening: oi });
        }
        for e in edges {
            if let Some(prev) = claimed.insert(e, oi) {
                let v = Violation::OpeningsOverlap { a: prev, b: oi };
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }

    if plan.openings.iter().any(|o| o.kind == OpeningKind::Door) {
        let reach = adjacency_graph(plan).door_reachable();
        for r in &plan.rooms {
            if !reach.contains(&Node::Room(r.id)) {
                out.push(Violation::RoomUnreachable { room: r.id });
            }
        }
    }
    out
}

/// Graph over rooms plus the exterior. Edges record shared wall length and
/// the number of doors between the two nodes.
pub fn adjacency_graph(plan: &FloorPlan) -> AdjacencyGraph {
    let cells = CellMap::build(plan);
    let mut shared: BTreeMap<(Node, Node), (u32, u32)> = BTreeMap::new();
    let key = |a: Node, b: Node| (a.min(b), a.max(b));
    for r in &plan.rooms {
        for e in polygon_unit_edges(&r.boundary) {
            let (ax, ay) = e.side_cell(Side::Negative);
            let (bx, by) = e.side_cell(Side::Positive);
            let (a, b) = (cells.node(plan, ax, ay), cells.node(plan, bx, by));
            if a != b {
                shared.entry(key(a, b)).or_default().0 += 1;
            }
        }
    }
    // Interior walls were counted from both rooms.
    for ((a, b), (len, _)) in shared.iter_mut() {
        if *a != Node::Exterior && *b != Node::Exterior {
            *len /= 2;
        }
    }
    for o in plan.openings.iter().filter(|o| o.kind == OpeningKind::Door && o.width > 0) {
        let e = o.unit_edges().next().expect("width > 0");
        let (ax, ay) = e.side_cell(Side::Negative);
        let (bx, by) = e.side_cell(Side::Positive);
        let (a, b) = (cells.node(plan, ax, ay), cells.node(plan, bx, by));
        if a != b {
            shared.entry(key(a, b)).or_default().1 += 1;
        }
    }
    let mut nodes = vec![Node::Exterior];
    nodes.extend(plan.rooms.iter().map(|r| Node::Room(r.id)));
    let edges = shared
        .into_iter()
        .map(|((a, b), (shared_wall, doors))| AdjacencyEdge { a, b, shared_wall, doors })
        .collect();
    AdjacencyGraph { nodes, edges }
}

/// Multiset counts of openings and rooms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementCounts {
    pub doors: u32,
    pub windows: u32,
    pub kitchens: u32,
    pub bathrooms: u32,
    pub living_rooms: u32,
}

impl ElementCounts {
    pub fn rooms(&self, kind: RoomKind) -> u32 {
        match kind {
            RoomKind::Kitchen => self.kitchens,
            RoomKind::Bathroom => self.bathrooms,
            RoomKind::LivingRoom => self.living_rooms,
        }
    }

    pub fn openings(&self, kind: OpeningKind) -> u32 {
        match kind {
            OpeningKind::Door => self.doors,
            OpeningKind::Window => self.windows,
        }
    }

    pub fn total_rooms(&self) -> u32 {
        self.kitchens + self.bathrooms + self.living_rooms
    }

    pub fn get(&self, term: ElementTerm) -> u32 {
        match term {
            ElementTerm::Doors => self.doors,
            ElementTerm::Windows => self.windows,
            ElementTerm::Kitchen => self.kitchens,
            ElementTerm::Bathroom => self.bathrooms,
            ElementTerm::LivingRoom => self.living_rooms,
            ElementTerm::Rooms => self.total_rooms(),
        }
    }
}

pub fn element_counts(plan: &FloorPlan) -> ElementCounts {
    let mut c = ElementCounts::default();
    for o in &plan.openings {
        match o.kind {
            OpeningKind::Door => c.doors += 1,
            OpeningKind::Window => c.windows += 1,
        }
    }
    for r in &plan.rooms {
        match r.kind {
            RoomKind::Kitchen => c.kitchens += 1,
            RoomKind::Bathroom => c.bathrooms += 1,
            RoomKind::LivingRoom => c.living_rooms += 1,
        }
    }
    c
}

pub fn footprint_shape_class(plan: &FloorPlan) -> Result<ShapeClass, Unclassifiable> {
    classify_footprint(&plan.footprint)
}

/// Boundary loops of a cell region, as vertex lists on grid lines. Outer
/// loops have positive shoelace area, hole loops negative. Diagonally
/// touching cells belong to separate loops (4-connectivity).
pub fn trace_region(width: i32, height: i32, inside: impl Fn(i32, i32) -> bool) -> Vec<Vec<GridPoint>> {
    let at = |x: i32, y: i32| x >= 0 && y >= 0 && x < width && y < height && inside(x, y);
    // Directed unit edges keyed by start vertex; direction index 0:+x 1:+y 2:-x 3:-y.
    let mut outgoing: HashMap<(i32, i32), [bool; 4]> = HashMap::new();
    for y in 0..=height {
        for x in 0..width {
            let above = at(x, y - 1);
            let below = at(x, y);
            if below && !above {
                outgoing.entry((x, y)).or_default()[0] = true;
            } else if above && !below {
                outgoing.entry((x + 1, y)).or_default()[2] = true;
            }
        }
    }
    for x in 0..=width {
        for y in 0..height {
            let left = at(x - 1, y);
            let right = at(x, y);
            if left && !right {
                outgoing.entry((x, y)).or_default()[1] = true;
            } else if right && !left {
                outgoing.entry((x, y + 1)).or_default()[3] = true;
            }
        }
    }
    const STEP: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut starts: Vec<(i32, i32)> = outgoing.keys().copied().collect();
    starts.sort_unstable_by_key(|&(x, y)| (y, x));
    let mut loops = Vec::new();
    for s in starts {
        while let Some(first) = outgoing.get(&s).and_then(|d| d.iter().position(|&b| b)) {
            let mut pts = vec![GridPoint::new(s.0, s.1)];
            let mut pos = s;
            let mut dir = first;
            outgoing.get_mut(&pos).expect("edge start")[dir] = false;
            loop {
                pos = (pos.0 + STEP[dir].0, pos.1 + STEP[dir].1);
                let mut avail = outgoing.get(&pos).copied().unwrap_or_default();
                if pos == s {
                    avail[first] = true;
                }
                // Prefer a left turn, then straight, then right.
                let Some(next) = [(dir + 1) % 4, dir, (dir + 3) % 4].into_iter().find(|&d| avail[d]) else {
                    break;
                };
                if pos == s && next == first {
                    break;
                }
                if next != dir {
                    pts.push(GridPoint::new(pos.0, pos.1));
                }
                outgoing.get_mut(&pos).expect("edge start")[next] = false;
                dir = next;
            }
            loops.push(pts);
        }
    }
    loops
}

pub fn to_json(plan: &FloorPlan) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        grid: i32,
        footprint: &'a [Footprint],
        rooms: &'a [Room],
        walls: &'a [WallSegment],
        openings: &'a [Opening],
        overrides: &'a BTreeMap<RoomKind, ColorName>,
    }
    let doc = Doc {
        schema: PLAN_SCHEMA,
        grid: plan.grid,
        footprint: &plan.footprint,
        rooms: &plan.rooms,
        walls: &plan.walls,
        openings: &plan.openings,
        overrides: &plan.room_color_overrides,
    };
    serde_json::to_string_pretty(&doc).expect("plan serializes")
}

#[derive(Debug, thiserror::Error)]
pub enum PlanFormatError {
    #[error("malformed plan document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported plan schema `{0}`")]
    Schema(String),
}

pub fn from_json(text: &str) -> Result<FloorPlan, PlanFormatError> {
    #[derive(Deserialize)]
    struct Doc {
        schema: String,
        #[serde(default = "default_grid")]
        grid: i32,
        footprint: Vec<Footprint>,
        rooms: Vec<Room>,
        walls: Vec<WallSegment>,
        openings: Vec<Opening>,
        #[serde(default)]
        overrides: BTreeMap<RoomKind, ColorName>,
    }
    fn default_grid() -> i32 {
        DEFAULT_GRID
    }
    let doc: Doc = serde_json::from_str(text)?;
    if doc.schema != PLAN_SCHEMA {
        return Err(PlanFormatError::Schema(doc.schema));
    }
    Ok(FloorPlan {
        grid: doc.grid,
        footprint: doc.footprint,
        rooms: doc.rooms,
        walls: doc.walls,
        openings: doc.openings,
        room_color_overrides: doc.overrides,
    })
}

/// Wall segments covering every room edge, merged into maximal straight runs.
pub fn walls_for_rooms(rooms: &[Room], thickness: u32) -> Vec<WallSegment> {
    let mut edges: Vec<UnitEdge> = rooms.iter().flat_map(|r| polygon_unit_edges(&r.boundary)).collect();
    edges.sort_unstable();
    edges.dedup();
    let mut walls = Vec::new();
    let mut i = 0;
    while i < edges.len() {
        let first = edges[i];
        let mut j = i;
        while j + 1 < edges.len()
            && edges[j + 1].orientation == first.orientation
            && edges[j + 1].line == first.line
            && edges[j + 1].pos == edges[j].pos + 1
        {
            j += 1;
        }
        let end = edges[j].pos + 1;
        let (start, stop) = match first.orientation {
            Orientation::Horizontal => (GridPoint::new(first.pos, first.line), GridPoint::new(end, first.line)),
            Orientation::Vertical => (GridPoint::new(first.line, first.pos), GridPoint::new(first.line, end)),
        };
        walls.push(WallSegment { start, end: stop, thickness });
        i = j + 1;
    }
    walls
}

impl GridPoint {
    pub const fn from_tuple((x, y): (i32, i32)) -> Self {
        Self { x, y }
    }
}
