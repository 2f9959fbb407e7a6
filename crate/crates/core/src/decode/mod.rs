//! Raster decoding: recovers rooms, openings and footprint shape from a plan
//! image, ours or a generated one.

pub mod mask;
pub mod symbols;

use serde::{Deserialize, Serialize};

use crate::geometry::{classify_footprint, trace_region, Footprint, OpeningKind, RectilinearPolygon, RoomKind};
use crate::palette::ColorName;
use crate::render::{EncodingStyle, RasterImage};
use crate::ShapeClass;
use mask::{label_components, mask_components, Mask};

pub const DECODED_SCHEMA: &str = "planforge-decoded/1";
/// Maximum RGB distance to a palette anchor.
pub const QUANTIZE_THRESHOLD: f64 = 80.0;
/// Minimum share of black pixels for an image to count as a plan.
pub const MIN_INK_FRACTION: f64 = 0.005;
/// Minimum region area as a share of the image.
pub const MIN_REGION_FRACTION: f64 = 0.0005;
pub const MIN_IMAGE_SIDE: u32 = 128;
/// Label of pixels far from every palette color.
pub const OTHER: u8 = 8;
/// Door template acceptance.
pub const DOOR_NCC_MIN: f64 = 0.7;

/// Per-pixel palette label; `None` when no anchor is within the threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedImage {
    pub width: usize,
    pub height: usize,
    /// Palette index per pixel, or [`OTHER`].
    pub labels: Vec<u8>,
}

impl QuantizedImage {
    pub fn label(&self, x: usize, y: usize) -> Option<ColorName> {
        let l = self.labels[y * self.width + x];
        (l != OTHER).then(|| ColorName::ALL[l as usize])
    }

    pub fn other_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == OTHER).count()
    }

    pub fn count(&self, c: ColorName) -> usize {
        let i = c.index() as u8;
        self.labels.iter().filter(|&&l| l == i).count()
    }

    fn mask_of(&self, c: ColorName) -> Mask {
        let i = c.index() as u8;
        Mask { width: self.width, height: self.height, data: self.labels.iter().map(|&l| l == i).collect() }
    }
}

pub fn quantize_pixel(rgb: [u8; 3]) -> Option<ColorName> {
    quantize_pixel_within(rgb, QUANTIZE_THRESHOLD)
}

/// Nearest palette color if it lies within `threshold` RGB distance.
pub fn quantize_pixel_within(rgb: [u8; 3], threshold: f64) -> Option<ColorName> {
    let mut best = (f64::INFINITY, ColorName::Black);
    for c in ColorName::ALL {
        let a = c.rgb();
        let d: f64 = (0..3).map(|i| (rgb[i] as f64 - a[i] as f64).powi(2)).sum::<f64>().sqrt();
        if d < best.0 {
            best = (d, c);
        }
    }
    (best.0 <= threshold).then_some(best.1)
}

pub fn quantize(img: &RasterImage) -> QuantizedImage {
    quantize_within(img, QUANTIZE_THRESHOLD)
}

pub fn quantize_within(img: &RasterImage, threshold: f64) -> QuantizedImage {
    let mut cache: std::collections::HashMap<[u8; 3], u8> = std::collections::HashMap::new();
    let labels = img
        .pixels
        .chunks_exact(3)
        .map(|p| {
            let rgb = [p[0], p[1], p[2]];
            *cache.entry(rgb).or_insert_with(|| quantize_pixel_within(rgb, threshold).map_or(OTHER, |c| c.index() as u8))
        })
        .collect();
    QuantizedImage { width: img.width as usize, height: img.height as usize, labels }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("not a plan: wall ink covers {:.3}% of the image", ink_fraction * 100.0)]
    NotAPlan { ink_fraction: f64 },
    #[error("image {width}x{height} is too small or not square (at least 128x128 needed)")]
    BadImageSize { width: u32, height: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedRoom {
    pub area_px: usize,
    pub bbox: [usize; 4],
    pub centroid: [f64; 2],
    /// `None` when the fill color names no room kind.
    pub kind: Option<RoomKind>,
    /// Dominant fill color; `None` for off-palette regions.
    pub color: Option<ColorName>,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedOpening {
    /// `None` when the symbol or color is not recognized.
    pub kind: Option<OpeningKind>,
    pub bbox: [usize; 4],
    pub color: ColorName,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedComponent {
    pub area_px: usize,
    pub outer: Vec<[i32; 2]>,
    pub holes: Vec<Vec<[i32; 2]>>,
    pub reflex_vertices: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityFlags {
    pub closed_outline: bool,
    pub touches_border: bool,
    pub recognizable_symbology: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "value")]
pub enum ShapeOutcome {
    Shape(ShapeClass),
    Unclassifiable(String),
}

impl ShapeOutcome {
    pub fn shape(&self) -> Option<ShapeClass> {
        match self {
            ShapeOutcome::Shape(s) => Some(*s),
            ShapeOutcome::Unclassifiable(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedPlan {
    pub width: u32,
    pub height: u32,
    pub style: EncodingStyle,
    pub footprint: Vec<DecodedComponent>,
    pub courtyards: usize,
    pub rooms: Vec<DecodedRoom>,
    pub openings: Vec<DecodedOpening>,
    pub shape_class: ShapeOutcome,
    pub validity_flags: ValidityFlags,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedCounts {
    pub doors: u32,
    pub windows: u32,
    pub unknown_openings: u32,
    pub kitchens: u32,
    pub bathrooms: u32,
    pub living_rooms: u32,
    pub unknown_rooms: u32,
}

impl DecodedCounts {
    pub fn rooms(&self) -> u32 {
        self.kitchens + self.bathrooms + self.living_rooms + self.unknown_rooms
    }
}

impl DecodedPlan {
    pub fn counts(&self) -> DecodedCounts {
        count_elements(self)
    }

    pub fn openings_colored(&self, color: ColorName) -> u32 {
        self.openings.iter().filter(|o| o.color == color).count() as u32
    }

    pub fn openings_of(&self, kind: OpeningKind) -> u32 {
        self.openings.iter().filter(|o| o.kind == Some(kind)).count() as u32
    }

    pub fn rooms_colored(&self, color: ColorName) -> u32 {
        self.rooms.iter().filter(|r| r.color == Some(color)).count() as u32
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: &'static str,
            counts: DecodedCounts,
            #[serde(flatten)]
            plan: &'a DecodedPlan,
        }
        serde_json::to_string_pretty(&Doc { schema: DECODED_SCHEMA, counts: self.counts(), plan: self }).expect("serializes")
    }
}

pub fn count_elements(d: &DecodedPlan) -> DecodedCounts {
    let mut c = DecodedCounts::default();
    for o in &d.openings {
        match o.kind {
            Some(OpeningKind::Door) => c.doors += 1,
            Some(OpeningKind::Window) => c.windows += 1,
            None => c.unknown_openings += 1,
        }
    }
    for r in &d.rooms {
        match r.kind {
            Some(RoomKind::Kitchen) => c.kitchens += 1,
            Some(RoomKind::Bathroom) => c.bathrooms += 1,
            Some(RoomKind::LivingRoom) => c.living_rooms += 1,
            None => c.unknown_rooms += 1,
        }
    }
    c
}

/// Pixel parameters derived from the image size, assuming the plan grid.
#[derive(Clone, Copy, Debug)]
struct Params {
    scale: usize,
    half: usize,
    stroke: usize,
    min_region: usize,
    margin: usize,
    close_radius: usize,
    courtyard_gap: usize,
}

impl Params {
    fn new(width: usize, height: usize) -> Self {
        let scale = (width / crate::geometry::DEFAULT_GRID as usize).max(2);
        let half = (3 * scale + 4) / 16;
        Params {
            scale,
            half,
            stroke: (2 * half).max(1),
            min_region: ((width * height) as f64 * MIN_REGION_FRACTION).ceil() as usize,
            margin: (width / 128).max(2),
            close_radius: (13 * width / 512).max(2),
            courtyard_gap: 2 * half + 4,
        }
    }
}

pub fn decode(img: &RasterImage, style: EncodingStyle) -> Result<DecodedPlan, DecodeError> {
    decode_within(img, style, QUANTIZE_THRESHOLD)
}

pub fn decode_within(img: &RasterImage, style: EncodingStyle, threshold: f64) -> Result<DecodedPlan, DecodeError> {
    if img.width != img.height || img.width < MIN_IMAGE_SIDE {
        return Err(DecodeError::BadImageSize { width: img.width, height: img.height });
    }
    let q = quantize_within(img, threshold);
    decode_quantized(&q, style)
}

pub fn decode_quantized(q: &QuantizedImage, style: EncodingStyle) -> Result<DecodedPlan, DecodeError> {
    let (w, h) = (q.width, q.height);
    let p = Params::new(w, h);
    let black_idx = ColorName::Black.index() as u8;
    // Color bars replace wall ink; count them with it. Room fills are not
    // wall.
    let ink = ColorName::ALL
        .into_iter()
        .filter(|&c| match c {
            ColorName::Black => true,
            ColorName::White => false,
            c if style.color_bars() => !(style.room_fill() && RoomKind::from_canonical_color(c).is_some()),
            _ => false,
        })
        .map(|c| q.count(c))
        .sum::<usize>();
    let ink_fraction = ink as f64 / (w * h) as f64;
    if ink_fraction < MIN_INK_FRACTION {
        return Err(DecodeError::NotAPlan { ink_fraction });
    }

    let regions = label_components(w, h, &q.labels, |l| l != black_idx, false);
    let exterior = Mask {
        width: w,
        height: h,
        data: regions.ids.iter().map(|&id| id != u32::MAX && regions.stats[id as usize].touches_border).collect(),
    };
    let near_exterior = exterior.dilate(p.courtyard_gap);

    // Enclosed regions: rooms or courtyards.
    let mut big = vec![false; regions.stats.len()];
    let mut courtyard = vec![false; regions.stats.len()];
    for (i, st) in regions.stats.iter().enumerate() {
        if st.touches_border || st.area < p.min_region {
            continue;
        }
        big[i] = true;
    }
    let mut touches_near = vec![false; regions.stats.len()];
    for (px, &id) in regions.ids.iter().enumerate() {
        if id != u32::MAX && big[id as usize] && near_exterior.data[px] {
            touches_near[id as usize] = true;
        }
    }
    let mut rooms = Vec::new();
    for (i, st) in regions.stats.iter().enumerate() {
        if !big[i] {
            continue;
        }
        if !touches_near[i] && st.label == ColorName::White.index() as u8 {
            courtyard[i] = true;
            continue;
        }
        let color = (st.label != OTHER).then(|| ColorName::ALL[st.label as usize]);
        rooms.push(DecodedRoom {
            area_px: st.area,
            bbox: st.bbox,
            centroid: st.centroid(),
            kind: color.and_then(RoomKind::from_canonical_color),
            color,
            confidence: 1.0,
        });
    }

    let openings = if style.color_bars() { bar_openings(&regions, &p) } else { symbol_openings(q, &regions, &big, &p) };

    // Footprint: everything that is neither exterior nor courtyard.
    let mut solid = exterior.not();
    for (px, &id) in regions.ids.iter().enumerate() {
        if id != u32::MAX && courtyard[id as usize] {
            solid.data[px] = false;
        }
    }
    let solid = solid.close(p.close_radius).open(p.half + 1);
    let (footprint, shape_class) = footprint_of(&solid, p.min_region);

    let touches_border = {
        let m = p.margin;
        let mut hit = false;
        for y in 0..h {
            for x in 0..w {
                if (x < m || y < m || x + m >= w || y + m >= h) && q.labels[y * w + x] == black_idx {
                    hit = true;
                    break;
                }
            }
            if hit {
                break;
            }
        }
        hit
    };
    let validity_flags = ValidityFlags {
        closed_outline: !rooms.is_empty() && !footprint.is_empty(),
        touches_border,
        recognizable_symbology: !rooms.is_empty() || !openings.is_empty(),
    };
    Ok(DecodedPlan {
        width: w as u32,
        height: h as u32,
        style,
        footprint,
        courtyards: courtyard.iter().filter(|&&c| c).count(),
        rooms,
        openings,
        shape_class,
        validity_flags,
    })
}

fn bar_openings(regions: &mask::Components, p: &Params) -> Vec<DecodedOpening> {
    let white = ColorName::White.index() as u8;
    let mut out = Vec::new();
    for st in &regions.stats {
        if st.label == white || st.label == OTHER || st.area >= p.min_region || st.touches_border {
            continue;
        }
        let thin = st.bw().min(st.bh());
        let long = st.bw().max(st.bh());
        if thin > 2 * (2 * p.half + 1) || long < p.scale / 2 || st.area < p.scale {
            continue;
        }
        let color = ColorName::ALL[st.label as usize];
        let kind = match color {
            ColorName::Red => Some(OpeningKind::Door),
            ColorName::Blue => Some(OpeningKind::Window),
            _ => None,
        };
        out.push(DecodedOpening { kind, bbox: st.bbox, color, confidence: 1.0 });
    }
    out
}

fn symbol_openings(q: &QuantizedImage, regions: &mask::Components, big: &[bool], p: &Params) -> Vec<DecodedOpening> {
    let w = q.width;
    // Stroke colors: black, plus any color never used as a region fill.
    let mut fill = [false; 9];
    for (i, st) in regions.stats.iter().enumerate() {
        if big[i] || (st.touches_border && st.area >= p.min_region) {
            fill[st.label as usize] = true;
        }
    }
    let mut strokes = vec![ColorName::Black];
    for c in ColorName::ALL {
        if c != ColorName::Black && c != ColorName::White && !fill[c.index()] && q.count(c) > 0 {
            strokes.push(c);
        }
    }
    let mut out = Vec::new();
    for color in strokes {
        let m = q.mask_of(color);
        // Walls are long straight bands; whatever ink is left are symbols.
        let walls = m.open_box(p.scale / 2, p.half).or(&m.open_box(p.half, p.scale / 2));
        let thin = m.and_not(&walls);
        let comps = mask_components(&thin, true);
        let mut lines = Vec::new();
        for (id, st) in comps.stats.iter().enumerate() {
            if st.area < p.scale || st.touches_border {
                continue;
            }
            let (bw, bh) = (st.bw(), st.bh());
            let (short, long) = (bw.min(bh), bw.max(bh));
            if short <= p.stroke && long >= p.scale {
                lines.push(symbols::Line::of(st, id));
            } else if short >= p.scale && (long as f64) <= 1.7 * short as f64 {
                let patch = symbols::patch(&comps, id, w);
                let score = symbols::door_score(&patch, st, p.stroke);
                if score >= DOOR_NCC_MIN {
                    out.push(DecodedOpening { kind: Some(OpeningKind::Door), bbox: st.bbox, color, confidence: score.min(1.0) });
                }
            }
        }
        for (i, j, ratio) in symbols::pair_lines(&lines, (2 * p.half + 3) as f64) {
            let (a, b) = (&comps.stats[lines[i].id], &comps.stats[lines[j].id]);
            let bbox = [a.bbox[0].min(b.bbox[0]), a.bbox[1].min(b.bbox[1]), a.bbox[2].max(b.bbox[2]), a.bbox[3].max(b.bbox[3])];
            out.push(DecodedOpening { kind: Some(OpeningKind::Window), bbox, color, confidence: ratio.min(1.0) });
        }
    }
    out.sort_by_key(|o| (o.bbox[1], o.bbox[0]));
    out
}

fn footprint_of(solid: &Mask, min_area: usize) -> (Vec<DecodedComponent>, ShapeOutcome) {
    let (w, h) = (solid.width, solid.height);
    let comps = mask_components(solid, false);
    let mut out = Vec::new();
    let mut fps = Vec::new();
    for (id, st) in comps.stats.iter().enumerate() {
        if st.area < min_area {
            continue;
        }
        let loops = trace_region(w as i32, h as i32, |x, y| comps.ids[y as usize * w + x as usize] == id as u32);
        let mut outer = None;
        let mut holes = Vec::new();
        for l in loops {
            let poly = RectilinearPolygon::new(l).normalized();
            if poly.signed_area2() > 0 {
                if outer.as_ref().is_none_or(|o: &RectilinearPolygon| poly.area() > o.area()) {
                    outer = Some(poly);
                }
            } else {
                let mut hp = poly;
                hp.vertices.reverse();
                let hp = hp.normalized();
                // Ignore pinholes left by symbols.
                if hp.area() as usize >= min_area {
                    holes.push(hp);
                }
            }
        }
        let Some(outer) = outer else { continue };
        let pts = |p: &RectilinearPolygon| p.vertices.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>();
        out.push(DecodedComponent {
            area_px: st.area,
            outer: pts(&outer),
            holes: holes.iter().map(pts).collect(),
            reflex_vertices: outer.reflex_vertices().len(),
        });
        fps.push(Footprint { outer, holes });
    }
    let shape = match classify_footprint(&fps) {
        Ok(s) => ShapeOutcome::Shape(s),
        Err(e) => ShapeOutcome::Unclassifiable(e.reason.to_string()),
    };
    (out, shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_pixel([250, 10, 245]), Some(ColorName::Magenta));
        assert_eq!(quantize_pixel([128, 128, 128]), None);
        assert_eq!(quantize_pixel([10, 10, 10]), Some(ColorName::Black));
    }

    #[test]
    fn blank_is_not_a_plan() {
        let img = RasterImage::filled(512, 512, ColorName::White);
        assert!(matches!(decode(&img, EncodingStyle::SE), Err(DecodeError::NotAPlan { .. })));
        let small = RasterImage::filled(64, 64, ColorName::White);
        assert!(matches!(decode(&small, EncodingStyle::SE), Err(DecodeError::BadImageSize { .. })));
    }
}
