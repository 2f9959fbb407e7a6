//! Door and window symbol recognition on thin-stroke components.

use super::mask::{CompStats, Components};

/// Normalized cross-correlation of two equally sized binary patches.
pub fn ncc(a: &[bool], b: &[bool]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().filter(|&&v| v).count() as f64 / n;
    let mb = b.iter().filter(|&&v| v).count() as f64 / n;
    let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as u8 as f64 - ma, y as u8 as f64 - mb);
        num += x * y;
        da += x * x;
        db += y * y;
    }
    if da == 0.0 || db == 0.0 {
        return 0.0;
    }
    num / (da * db).sqrt()
}

/// Quarter-arc plus leaf template in a `w × h` box. The hinge sits at corner
/// `(hx, hy)` (each 0 or 1 for low/high end) and the leaf runs along the
/// vertical box edge when `leaf_vertical`.
pub fn door_template(w: usize, h: usize, corner: (usize, usize), leaf_vertical: bool, stroke: usize) -> Vec<bool> {
    let r = w.max(h) as f64 - 1.0;
    let cx = if corner.0 == 0 { 0.0 } else { (w - 1) as f64 };
    let cy = if corner.1 == 0 { 0.0 } else { (h - 1) as f64 };
    let s = stroke as f64;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            let d = (dx * dx + dy * dy).sqrt();
            let ring = d >= r - s && d < r + 0.5;
            let leaf = if leaf_vertical { dx.abs() < s } else { dy.abs() < s };
            out.push(ring || leaf);
        }
    }
    out
}

pub fn patch(comps: &Components, id: usize, width: usize) -> Vec<bool> {
    let st = &comps.stats[id];
    let mut out = Vec::with_capacity(st.bw() * st.bh());
    for y in st.bbox[1]..=st.bbox[3] {
        for x in st.bbox[0]..=st.bbox[2] {
            out.push(comps.ids[y * width + x] == id as u32);
        }
    }
    out
}

/// Best template score over the eight hinge/leaf variants.
pub fn door_score(p: &[bool], st: &CompStats, stroke: usize) -> f64 {
    let mut best: f64 = 0.0;
    for corner in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for leaf_vertical in [false, true] {
            let t = door_template(st.bw(), st.bh(), corner, leaf_vertical, stroke);
            best = best.max(ncc(p, &t));
        }
    }
    best
}

#[derive(Clone, Copy, Debug)]
pub struct Line {
    pub horizontal: bool,
    pub lo: usize,
    pub hi: usize,
    pub across: f64,
    pub id: usize,
}

impl Line {
    pub fn of(st: &CompStats, id: usize) -> Line {
        let horizontal = st.bw() >= st.bh();
        let [x0, y0, x1, y1] = st.bbox;
        if horizontal {
            Line { horizontal, lo: x0, hi: x1, across: (y0 + y1) as f64 / 2.0, id }
        } else {
            Line { horizontal, lo: y0, hi: y1, across: (x0 + x1) as f64 / 2.0, id }
        }
    }
    fn len(&self) -> usize {
        self.hi - self.lo + 1
    }
}

/// Greedily pairs parallel lines that overlap along their length and sit
/// at most `max_gap` px apart. Returns pairs and their overlap ratios.
pub fn pair_lines(lines: &[Line], max_gap: f64) -> Vec<(usize, usize, f64)> {
    let mut used = vec![false; lines.len()];
    let mut pairs = Vec::new();
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&a, &b| (lines[a].horizontal, lines[a].lo, lines[a].across.to_bits()).cmp(&(lines[b].horizontal, lines[b].lo, lines[b].across.to_bits())));
    for &i in &order {
        if used[i] {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for &j in &order {
            if i == j || used[j] || lines[i].horizontal != lines[j].horizontal {
                continue;
            }
            let gap = (lines[i].across - lines[j].across).abs();
            if gap < 1.0 || gap > max_gap {
                continue;
            }
            let ov = lines[i].hi.min(lines[j].hi) as i64 - lines[i].lo.max(lines[j].lo) as i64 + 1;
            if ov <= 0 {
                continue;
            }
            let ratio = ov as f64 / lines[i].len().max(lines[j].len()) as f64;
            if ratio >= 0.5 && best.is_none_or(|b| ratio > b.1) {
                best = Some((j, ratio));
            }
        }
        if let Some((j, ratio)) = best {
            used[i] = true;
            used[j] = true;
            pairs.push((i, j, ratio));
        }
    }
    pairs
}
