//! Rasterization of plans in the four encoding styles.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Cursor;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{CellMap, FloorPlan, Opening, OpeningKind, Orientation, RoomKind, Side, SpanEnd};
use crate::palette::ColorName;

pub const DEFAULT_RESOLUTION: u32 = 512;

/// Encoding style of a rendered plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingStyle {
    /// Black-and-white symbols, white rooms.
    R,
    /// Symbols with semantically colored rooms.
    SR,
    /// Color bars for openings, white rooms.
    SE,
    /// Color bars and colored rooms.
    SRE,
}

impl EncodingStyle {
    pub const ALL: [EncodingStyle; 4] = [EncodingStyle::R, EncodingStyle::SR, EncodingStyle::SE, EncodingStyle::SRE];

    pub const fn name(self) -> &'static str {
        match self {
            EncodingStyle::R => "r",
            EncodingStyle::SR => "sr",
            EncodingStyle::SE => "se",
            EncodingStyle::SRE => "sre",
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            EncodingStyle::R => "R",
            EncodingStyle::SR => "SR",
            EncodingStyle::SE => "SE",
            EncodingStyle::SRE => "SRE",
        }
    }

    pub const fn policy(self) -> StylePolicy {
        let colored = matches!(self, EncodingStyle::SR | EncodingStyle::SRE);
        let bars = matches!(self, EncodingStyle::SE | EncodingStyle::SRE);
        StylePolicy {
            style: self,
            room_fill: colored,
            opening_render: if bars { OpeningRender::ColorBar } else { OpeningRender::Symbol },
        }
    }

    pub fn room_fill(self) -> bool {
        self.policy().room_fill
    }

    pub fn color_bars(self) -> bool {
        self.policy().opening_render == OpeningRender::ColorBar
    }
}

impl fmt::Display for EncodingStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown style `{0}` (expected r, sr, se or sre)")]
pub struct UnknownStyle(pub String);

impl FromStr for EncodingStyle {
    type Err = UnknownStyle;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        EncodingStyle::ALL.into_iter().find(|st| st.name() == lower).ok_or_else(|| UnknownStyle(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpeningRender {
    Symbol,
    ColorBar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StylePolicy {
    pub style: EncodingStyle,
    pub room_fill: bool,
    pub opening_render: OpeningRender,
}

/// Color an opening is drawn in under `style`.
pub fn opening_color(style: EncodingStyle, kind: OpeningKind, color_override: Option<ColorName>) -> ColorName {
    match (style.color_bars(), color_override) {
        (_, Some(c)) => c,
        (true, None) => kind.canonical_color(),
        (false, None) => ColorName::Black,
    }
}

/// Fill color of a room kind under `style`. Room overrides only show in the
/// room-coloring styles; R and SE keep every room white.
pub fn room_color(style: EncodingStyle, kind: RoomKind, color_override: Option<ColorName>) -> ColorName {
    if style.room_fill() {
        color_override.unwrap_or(kind.canonical_color())
    } else {
        ColorName::White
    }
}

/// Colors a render of `plan` in `style` may contain.
pub fn declared_palette(style: EncodingStyle, plan: &FloorPlan) -> BTreeSet<ColorName> {
    let mut set = BTreeSet::from([ColorName::White, ColorName::Black]);
    if style.color_bars() {
        set.insert(ColorName::Red);
        set.insert(ColorName::Blue);
    }
    for o in &plan.openings {
        set.insert(opening_color(style, o.kind, o.color_override));
    }
    if style.room_fill() {
        for k in RoomKind::ALL {
            set.insert(room_color(style, k, plan.room_color_overrides.get(&k).copied()));
        }
    }
    set
}

/// Square RGB raster, row-major, 3 bytes per pixel.
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RasterImage({}x{})", self.width, self.height)
    }
}

impl RasterImage {
    pub fn filled(width: u32, height: u32, color: ColorName) -> Self {
        let rgb = color.rgb();
        let pixels = rgb.iter().copied().cycle().take((width * height * 3) as usize).collect();
        RasterImage { width, height, pixels }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = ((y * self.width + x) * 3) as usize;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    fn put(&mut self, x: i32, y: i32, c: ColorName) {
        if x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height {
            self.set(x as u32, y as u32, c.rgb());
        }
    }

    /// Distinct palette colors present; `Err` on the first off-palette pixel.
    pub fn palette_colors(&self) -> Result<BTreeSet<ColorName>, [u8; 3]> {
        let mut seen = [false; 8];
        let mut last: Option<([u8; 3], ColorName)> = None;
        for px in self.pixels.chunks_exact(3) {
            let rgb = [px[0], px[1], px[2]];
            let c = match last {
                Some((l, c)) if l == rgb => c,
                _ => {
                    let c = ColorName::from_rgb(rgb).ok_or(rgb)?;
                    last = Some((rgb, c));
                    c
                }
            };
            seen[c.index()] = true;
        }
        Ok(ColorName::ALL.into_iter().filter(|c| seen[c.index()]).collect())
    }

    /// Crops to the given window, padding nothing.
    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> RasterImage {
        let mut out = RasterImage::filled(w, h, ColorName::White);
        for y in 0..h {
            for x in 0..w {
                out.set(x, y, self.get(x0 + x, y0 + y));
            }
        }
        out
    }

    pub fn to_png(&self) -> Result<Vec<u8>, ImageError> {
        let img = image::RgbImage::from_raw(self.width, self.height, self.pixels.clone())
            .ok_or(ImageError::Shape { width: self.width, height: self.height })?;
        let mut buf = Cursor::new(Vec::new());
        img.write_to(&mut buf, image::ImageFormat::Png)?;
        Ok(buf.into_inner())
    }

    pub fn from_encoded(bytes: &[u8]) -> Result<RasterImage, ImageError> {
        let img = image::load_from_memory(bytes)?.to_rgb8();
        let (width, height) = img.dimensions();
        Ok(RasterImage { width, height, pixels: img.into_raw() })
    }

    pub fn write_png(&self, path: &Path) -> Result<(), ImageError> {
        std::fs::write(path, self.to_png()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<RasterImage, ImageError> {
        RasterImage::from_encoded(&std::fs::read(path)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("image I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("image codec: {0}")]
    Codec(#[from] image::ImageError),
    #[error("pixel buffer does not match {width}x{height}")]
    Shape { width: u32, height: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("resolution {resolution} maps a grid cell to {scale} px (at least 2 needed)")]
    ResolutionTooSmall { resolution: u32, scale: u32 },
}

/// Pixel metrics for a grid at a resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RasterFrame {
    /// Pixels per grid cell.
    pub scale: i32,
    /// Wall half-thickness; walls are `2 * half + 1` px thick.
    pub half: i32,
    /// Symbol stroke width.
    pub stroke: i32,
    pub offset: i32,
}

impl RasterFrame {
    pub fn new(resolution: u32, grid: i32) -> Result<Self, RenderError> {
        let scale = resolution as i32 / grid.max(1);
        if scale < 2 {
            return Err(RenderError::ResolutionTooSmall { resolution, scale: scale.max(0) as u32 });
        }
        let half = (3 * scale + 4) / 16;
        let stroke = (2 * half).max(1);
        let offset = (resolution as i32 - scale * grid) / 2;
        Ok(RasterFrame { scale, half, stroke, offset })
    }

    pub fn wall_thickness(&self) -> i32 {
        2 * self.half + 1
    }

    /// Pixel coordinate of grid line `k`.
    pub fn px(&self, k: i32) -> i32 {
        self.offset + k * self.scale
    }
}

/// Maps (along, across) coordinates of a wall to pixels.
fn to_px(orientation: Orientation, u: i32, v: i32) -> (i32, i32) {
    match orientation {
        Orientation::Horizontal => (u, v),
        Orientation::Vertical => (v, u),
    }
}

fn span_of(o: &Opening) -> (i32, i32) {
    match o.orientation {
        Orientation::Horizontal => (o.wall_anchor.y, o.wall_anchor.x),
        Orientation::Vertical => (o.wall_anchor.x, o.wall_anchor.y),
    }
}

/// Rasterizes `plan` at `resolution × resolution`.
pub fn render(plan: &FloorPlan, style: EncodingStyle, resolution: u32) -> Result<RasterImage, RenderError> {
    let f = RasterFrame::new(resolution, plan.grid)?;
    let mut img = RasterImage::filled(resolution, resolution, ColorName::White);
    let cells = CellMap::build(plan);
    let fill_of = |room: Option<usize>| -> ColorName {
        match room {
            Some(i) => {
                let k = plan.rooms[i].kind;
                room_color(style, k, plan.room_color_overrides.get(&k).copied())
            }
            None => ColorName::White,
        }
    };

    if style.room_fill() {
        for y in 0..plan.grid {
            for x in 0..plan.grid {
                let c = fill_of(cells.room_index(x, y));
                if c == ColorName::White {
                    continue;
                }
                for py in f.px(y)..f.px(y + 1) {
                    for px in f.px(x)..f.px(x + 1) {
                        img.put(px, py, c);
                    }
                }
            }
        }
    }

    for w in &plan.walls {
        let (x0, x1) = (w.start.x.min(w.end.x), w.start.x.max(w.end.x));
        let (y0, y1) = (w.start.y.min(w.end.y), w.start.y.max(w.end.y));
        for py in f.px(y0) - f.half..=f.px(y1) + f.half {
            for px in f.px(x0) - f.half..=f.px(x1) + f.half {
                img.put(px, py, ColorName::Black);
            }
        }
    }

    for o in &plan.openings {
        let (line, a) = span_of(o);
        let w = o.width as i32;
        let c = f.px(line);
        let (u0, u1) = (f.px(a) + 1, f.px(a + w) - 1);
        let color = opening_color(style, o.kind, o.color_override);
        let band = |img: &mut RasterImage, v: i32, col: ColorName| {
            for u in u0..=u1 {
                let (x, y) = to_px(o.orientation, u, v);
                img.put(x, y, col);
            }
        };
        if style.color_bars() {
            for v in c - f.half..=c + f.half {
                band(&mut img, v, color);
            }
            continue;
        }
        match o.kind {
            OpeningKind::Window => {
                for v in c - f.half..=c + f.half {
                    band(&mut img, v, ColorName::White);
                }
                band(&mut img, c - f.half, color);
                band(&mut img, c + f.half, color);
            }
            OpeningKind::Door => {
                let swing = o.swing.unwrap_or(crate::geometry::DoorSwing { into: Side::Positive, hinge: SpanEnd::Start });
                let beyond = cells.room_index(o.side_cell(swing.into.flip(), 0).0, o.side_cell(swing.into.flip(), 0).1);
                let back = fill_of(beyond);
                for v in c - f.half..=c + f.half {
                    band(&mut img, v, back);
                }
                draw_door_symbol(&mut img, &f, o.orientation, c, f.px(a), f.px(a + w), swing, back, color);
            }
        }
    }
    Ok(img)
}

/// Quarter-disk swing, leaf and arc, drawn on the `into` side of the wall
/// at across-coordinate `c`, for a gap spanning pixels `ua..ub`.
#[allow(clippy::too_many_arguments)]
fn draw_door_symbol(
    img: &mut RasterImage,
    f: &RasterFrame,
    orientation: Orientation,
    c: i32,
    ua: i32,
    ub: i32,
    swing: crate::geometry::DoorSwing,
    back: ColorName,
    stroke_color: ColorName,
) {
    let r = ub - ua;
    let sgn = swing.into.sign();
    let (hinge, dir) = match swing.hinge {
        SpanEnd::Start => (ua, 1),
        SpanEnd::End => (ub, -1),
    };
    let rr = |du: i32, dv: i32| ((du * du + dv * dv) as f64).sqrt();
    // Swept area takes the color of the far side so both rooms stay sealed.
    for k in 0..=r {
        for dv in f.half + 1..=r {
            let d = rr(k, dv);
            if d < (r - f.stroke) as f64 {
                let (x, y) = to_px(orientation, hinge + dir * k, c + sgn * dv);
                img.put(x, y, back);
            }
        }
    }
    // Arc ring.
    for k in 0..=r {
        for dv in 0..=r {
            let d = rr(k, dv);
            if d >= (r - f.stroke) as f64 && d < r as f64 + 0.5 {
                let (x, y) = to_px(orientation, hinge + dir * k, c + sgn * dv);
                img.put(x, y, stroke_color);
            }
        }
    }
    // Leaf, perpendicular to the wall at the hinge.
    for k in 0..f.stroke {
        for dv in 0..=r {
            let (x, y) = to_px(orientation, hinge + dir * k, c + sgn * dv);
            img.put(x, y, stroke_color);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{element_counts, ElementTerm, GridPoint, Room, RectilinearPolygon, Footprint, walls_for_rooms, DoorSwing};
    use crate::synth::{synthesize, PlanSpec, ResolvedCounts};
    use crate::ShapeClass;
    use std::collections::BTreeMap;

    fn one_room(kind: RoomKind) -> FloorPlan {
        let rect = RectilinearPolygon::rect(20, 20, 40, 36);
        let rooms = vec![Room { id: 0, boundary: rect.clone(), kind }];
        let walls = walls_for_rooms(&rooms, 1);
        FloorPlan {
            grid: 64,
            footprint: vec![Footprint::solid(rect)],
            rooms,
            walls,
            openings: vec![
                Opening {
                    kind: OpeningKind::Door,
                    wall_anchor: GridPoint::new(24, 20),
                    orientation: Orientation::Horizontal,
                    width: 2,
                    color_override: None,
                    swing: Some(DoorSwing { into: Side::Positive, hinge: SpanEnd::Start }),
                },
                Opening {
                    kind: OpeningKind::Window,
                    wall_anchor: GridPoint::new(40, 24),
                    orientation: Orientation::Vertical,
                    width: 3,
                    color_override: None,
                    swing: None,
                },
            ],
            room_color_overrides: BTreeMap::new(),
        }
    }

    fn colors(img: &RasterImage) -> BTreeSet<ColorName> {
        img.palette_colors().expect("on palette")
    }

    #[test]
    fn se_uses_four_colors() {
        let img = render(&one_room(RoomKind::Kitchen), EncodingStyle::SE, 512).unwrap();
        let want = BTreeSet::from([ColorName::White, ColorName::Black, ColorName::Red, ColorName::Blue]);
        assert_eq!(colors(&img), want);
    }

    #[test]
    fn sre_fills_kitchen_magenta() {
        let img = render(&one_room(RoomKind::Kitchen), EncodingStyle::SRE, 512).unwrap();
        assert!(colors(&img).contains(&ColorName::Magenta));
        // Room center.
        assert_eq!(img.get(8 * 30, 8 * 28), ColorName::Magenta.rgb());
    }

    #[test]
    fn door_recolor_shows_green_bar() {
        let mut plan = one_room(RoomKind::LivingRoom);
        plan.openings[0].color_override = Some(ColorName::Green);
        let img = render(&plan, EncodingStyle::SE, 512).unwrap();
        let c = colors(&img);
        assert!(c.contains(&ColorName::Green));
        assert!(!c.contains(&ColorName::Red));
        assert_eq!(img.get(8 * 25, 8 * 20), ColorName::Green.rgb());
    }

    #[test]
    fn r_style_is_black_and_white() {
        let img = render(&one_room(RoomKind::Bathroom), EncodingStyle::R, 512).unwrap();
        assert_eq!(colors(&img), BTreeSet::from([ColorName::White, ColorName::Black]));
        let img = render(&one_room(RoomKind::Bathroom), EncodingStyle::SR, 512).unwrap();
        assert_eq!(colors(&img), BTreeSet::from([ColorName::White, ColorName::Black, ColorName::Cyan]));
    }

    #[test]
    fn door_symbol_geometry() {
        let img = render(&one_room(RoomKind::LivingRoom), EncodingStyle::R, 512).unwrap();
        // Hinge at (192, 160); leaf runs down into the room for 2 cells.
        for dv in 0..=16 {
            assert_eq!(img.get(192, 160 + dv), ColorName::Black.rgb(), "leaf at {dv}");
        }
        // The arc crosses the diagonal at radius ~15.
        let d = (15.0 / std::f64::consts::SQRT_2) as u32;
        assert_eq!(img.get(192 + d, 160 + d), ColorName::Black.rgb());
        // Gap is open, inside of the swept area is white.
        assert_eq!(img.get(200, 160), ColorName::White.rgb());
        assert_eq!(img.get(197, 165), ColorName::White.rgb());
    }

    #[test]
    fn window_symbol_is_two_thin_lines() {
        let img = render(&one_room(RoomKind::LivingRoom), EncodingStyle::R, 512).unwrap();
        // Vertical wall at x = 320, span 192..216.
        assert_eq!(img.get(319, 200), ColorName::Black.rgb());
        assert_eq!(img.get(320, 200), ColorName::White.rgb());
        assert_eq!(img.get(321, 200), ColorName::Black.rgb());
    }

    #[test]
    fn resolution_too_small() {
        let plan = one_room(RoomKind::Kitchen);
        assert!(matches!(render(&plan, EncodingStyle::R, 64), Err(RenderError::ResolutionTooSmall { .. })));
        assert!(render(&plan, EncodingStyle::R, 128).is_ok());
    }

    #[test]
    fn png_round_trip_and_determinism() {
        let spec = PlanSpec::exact(
            ShapeClass::LShaped,
            ResolvedCounts { kitchens: 1, bathrooms: 1, living_rooms: 1, doors: 4, windows: 3 },
            5,
        );
        let plan = synthesize(&spec).unwrap();
        for style in EncodingStyle::ALL {
            let a = render(&plan, style, 512).unwrap();
            let b = render(&plan, style, 512).unwrap();
            assert_eq!(a.to_png().unwrap(), b.to_png().unwrap());
            assert_eq!(RasterImage::from_encoded(&a.to_png().unwrap()).unwrap(), a);
            let got = colors(&a);
            assert!(got.is_subset(&declared_palette(style, &plan)), "{style}: {got:?}");
        }
        assert_eq!(element_counts(&plan).get(ElementTerm::Doors), 4);
    }

    #[test]
    fn style_names_parse() {
        for s in EncodingStyle::ALL {
            assert_eq!(s.name().parse::<EncodingStyle>().unwrap(), s);
            assert_eq!(s.label().parse::<EncodingStyle>().unwrap(), s);
        }
        assert!("b".parse::<EncodingStyle>().is_err());
    }
}
