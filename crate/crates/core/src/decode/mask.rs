//! Binary masks, square-element morphology and connected components.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        Mask { width, height, data: vec![false; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Mask { width, height, data }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.data[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn and_not(&self, other: &Mask) -> Mask {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a && !b).collect();
        Mask { width: self.width, height: self.height, data }
    }

    pub fn or(&self, other: &Mask) -> Mask {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a || b).collect();
        Mask { width: self.width, height: self.height, data }
    }

    pub fn not(&self) -> Mask {
        Mask { width: self.width, height: self.height, data: self.data.iter().map(|b| !b).collect() }
    }

    /// Min (erode) or max (dilate) over a `(2rx+1) × (2ry+1)` box. Pixels
    /// outside the image count as `outside`.
    fn box_filter(&self, rx: usize, ry: usize, erode: bool, outside: bool) -> Mask {
        let pass = |src: &[bool], r: usize, len: usize, stride: usize, lines: usize, line_stride: usize| -> Vec<bool> {
            if r == 0 {
                return src.to_vec();
            }
            let mut out = vec![false; src.len()];
            let mut prefix = vec![0u32; len + 1];
            for l in 0..lines {
                let base = l * line_stride;
                for i in 0..len {
                    prefix[i + 1] = prefix[i] + src[base + i * stride] as u32;
                }
                for i in 0..len {
                    let lo = i.saturating_sub(r);
                    let hi = (i + r).min(len - 1);
                    let inside = prefix[hi + 1] - prefix[lo];
                    let span = (hi - lo + 1) as u32;
                    let clipped = (2 * r + 1) as u32 - span;
                    let set = inside + if outside { clipped } else { 0 };
                    out[base + i * stride] = if erode { set == (2 * r + 1) as u32 } else { set > 0 };
                }
            }
            out
        };
        let rows = pass(&self.data, rx, self.width, 1, self.height, self.width);
        let cols = pass(&rows, ry, self.height, self.width, self.width, 1);
        Mask { width: self.width, height: self.height, data: cols }
    }

    pub fn erode(&self, r: usize) -> Mask {
        self.box_filter(r, r, true, true)
    }

    pub fn dilate(&self, r: usize) -> Mask {
        self.box_filter(r, r, false, false)
    }

    /// Erosion then dilation: removes features thinner than `2r + 1`.
    pub fn open(&self, r: usize) -> Mask {
        self.open_box(r, r)
    }

    /// Opening with a `(2rx+1) × (2ry+1)` box.
    pub fn open_box(&self, rx: usize, ry: usize) -> Mask {
        self.box_filter(rx, ry, true, false).box_filter(rx, ry, false, false)
    }

    /// Dilation then erosion: fills gaps narrower than `2r + 1`.
    pub fn close(&self, r: usize) -> Mask {
        self.dilate(r).erode(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompStats {
    pub label: u8,
    pub area: usize,
    /// Inclusive pixel box: x0, y0, x1, y1.
    pub bbox: [usize; 4],
    pub touches_border: bool,
    pub sum_x: u64,
    pub sum_y: u64,
}

impl CompStats {
    pub fn bw(&self) -> usize {
        self.bbox[2] - self.bbox[0] + 1
    }
    pub fn bh(&self) -> usize {
        self.bbox[3] - self.bbox[1] + 1
    }
    pub fn centroid(&self) -> [f64; 2] {
        [self.sum_x as f64 / self.area as f64, self.sum_y as f64 / self.area as f64]
    }
}

/// Connected components of equal labels. Pixels whose label fails `keep`
/// get id `u32::MAX`.
pub struct Components {
    pub ids: Vec<u32>,
    pub stats: Vec<CompStats>,
}

pub fn label_components(
    width: usize,
    height: usize,
    labels: &[u8],
    keep: impl Fn(u8) -> bool,
    eight: bool,
) -> Components {
    let mut ids = vec![u32::MAX; labels.len()];
    let mut stats = Vec::new();
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        if ids[start] != u32::MAX || !keep(labels[start]) {
            continue;
        }
        let label = labels[start];
        let id = stats.len() as u32;
        let mut st = CompStats {
            label,
            area: 0,
            bbox: [usize::MAX, usize::MAX, 0, 0],
            touches_border: false,
            sum_x: 0,
            sum_y: 0,
        };
        ids[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = (i % width, i / width);
            st.area += 1;
            st.sum_x += x as u64;
            st.sum_y += y as u64;
            st.bbox[0] = st.bbox[0].min(x);
            st.bbox[1] = st.bbox[1].min(y);
            st.bbox[2] = st.bbox[2].max(x);
            st.bbox[3] = st.bbox[3].max(y);
            if x == 0 || y == 0 || x + 1 == width || y + 1 == height {
                st.touches_border = true;
            }
            let mut visit = |nx: isize, ny: isize| {
                if nx < 0 || ny < 0 || nx as usize >= width || ny as usize >= height {
                    return;
                }
                let j = ny as usize * width + nx as usize;
                if ids[j] == u32::MAX && labels[j] == label {
                    ids[j] = id;
                    stack.push(j);
                }
            };
            let (xi, yi) = (x as isize, y as isize);
            visit(xi + 1, yi);
            visit(xi - 1, yi);
            visit(xi, yi + 1);
            visit(xi, yi - 1);
            if eight {
                visit(xi + 1, yi + 1);
                visit(xi - 1, yi - 1);
                visit(xi + 1, yi - 1);
                visit(xi - 1, yi + 1);
            }
        }
        stats.push(st);
    }
    Components { ids, stats }
}

pub fn mask_components(mask: &Mask, eight: bool) -> Components {
    let labels: Vec<u8> = mask.data.iter().map(|&b| b as u8).collect();
    label_components(mask.width, mask.height, &labels, |l| l == 1, eight)
}
