//! Training corpus materialization: paired `NNNN.png` / `NNNN.txt` files per
//! category, plus a manifest with content hashes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{ElementTerm, FloorPlan, Orientation, RoomKind};
use crate::palette::ColorName;
use crate::prompt::{prompt_for_card, prompt_for_plan, serialize, style_token};
use crate::render::{render, EncodingStyle, ImageError, RenderError, DEFAULT_RESOLUTION};
use crate::rng::{derive_seed, rng_from_seed, PlanRng, PRNG_ALGORITHM};
use crate::synth::{symbol_card, synthesize, CountSpec, PlanSpec, QuantityBand, SynthError};
use crate::ShapeClass;

pub const MANIFEST_SCHEMA: &str = "planforge-manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";
/// Fresh seeds tried per item before giving up.
const ITEM_ATTEMPTS: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecipe {
    pub master_seed: u64,
    pub resolution: u32,
    /// Symbol cards per element.
    pub cards: BTreeMap<ElementTerm, u32>,
    /// Elements varied by the recolor, negation, band and count categories.
    pub elements: Vec<ElementTerm>,
    pub recolor_per_element: u32,
    pub recolor_color: ColorName,
    pub plans_per_shape: u32,
    pub negation_per_element: u32,
    pub bands: Vec<QuantityBand>,
    pub per_band: u32,
    pub count_values: Vec<u32>,
    pub per_count: u32,
}

impl Default for CorpusRecipe {
    fn default() -> Self {
        CorpusRecipe {
            master_seed: 0,
            resolution: DEFAULT_RESOLUTION,
            cards: BTreeMap::from([
                (ElementTerm::Doors, 2),
                (ElementTerm::Windows, 2),
                (ElementTerm::LivingRoom, 3),
                (ElementTerm::Bathroom, 3),
                (ElementTerm::Kitchen, 3),
            ]),
            elements: ElementTerm::CONCRETE.to_vec(),
            recolor_per_element: 10,
            recolor_color: ColorName::Green,
            plans_per_shape: 10,
            negation_per_element: 10,
            bands: vec![QuantityBand::Few, QuantityBand::Many],
            per_band: 10,
            count_values: vec![2, 4, 6],
            per_count: 10,
        }
    }
}

impl CorpusRecipe {
    pub fn with_seed(seed: u64) -> Self {
        CorpusRecipe { master_seed: seed, ..Self::default() }
    }

    /// Recipe that emits nothing.
    pub fn empty(seed: u64) -> Self {
        CorpusRecipe {
            master_seed: seed,
            cards: BTreeMap::new(),
            recolor_per_element: 0,
            plans_per_shape: 0,
            negation_per_element: 0,
            per_band: 0,
            per_count: 0,
            ..Self::default()
        }
    }

    /// Every item to emit, in manifest order.
    pub fn items(&self) -> Vec<ItemRequest> {
        let mut out = Vec::new();
        let mut push = |category: Category, tag: String, n: u32| {
            for i in 0..n {
                out.push(ItemRequest { category, tag: tag.clone(), index: i });
            }
        };
        for (e, &n) in &self.cards {
            push(Category::Cards, format!("cards/{}", slug(*e)), n);
        }
        for &e in &self.elements {
            push(Category::Recolor, format!("recolor/{}", slug(e)), self.recolor_per_element);
        }
        for s in ShapeClass::ALL {
            push(Category::Shapes, format!("shapes/{}", s.word()), self.plans_per_shape);
        }
        for &e in &self.elements {
            push(Category::Negation, format!("negation/{}", slug(e)), self.negation_per_element);
        }
        for &b in &self.bands {
            for &e in &self.elements {
                push(Category::Bands, format!("bands/{b}/{}", slug(e)), self.per_band);
            }
        }
        for &n in &self.count_values {
            for &e in &self.elements {
                push(Category::Counts, format!("counts/{n}/{}", slug(e)), self.per_count);
            }
        }
        out
    }
}

fn slug(e: ElementTerm) -> String {
    e.word().replace(' ', "-")
}

fn element_of_slug(s: &str) -> Option<ElementTerm> {
    ElementTerm::from_word(&s.replace('-', " "))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Cards,
    Recolor,
    Shapes,
    Negation,
    Bands,
    Counts,
}

impl Category {
    pub const ALL: [Category; 6] =
        [Category::Cards, Category::Recolor, Category::Shapes, Category::Negation, Category::Bands, Category::Counts];

    pub fn dir(self) -> &'static str {
        match self {
            Category::Cards => "cards",
            Category::Recolor => "recolor",
            Category::Shapes => "shapes",
            Category::Negation => "negation",
            Category::Bands => "bands",
            Category::Counts => "counts",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItemRequest {
    pub category: Category,
    pub tag: String,
    /// Index within the tag.
    pub index: u32,
}

/// What an image shows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ItemSource {
    Plan { spec: PlanSpec },
    Card { element: ElementTerm, orientation: Orientation, seed: u64 },
}

impl ItemSource {
    /// Regenerates the item's plan.
    pub fn plan(&self) -> Result<FloorPlan, SynthError> {
        match self {
            ItemSource::Plan { spec } => synthesize(spec),
            ItemSource::Card { element, orientation, seed } => symbol_card(*element, *orientation, *seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub image: String,
    pub prompt_file: String,
    pub category: Category,
    pub tag: String,
    pub style: EncodingStyle,
    pub prompt: String,
    pub source: ItemSource,
    pub png_sha256: String,
    pub txt_sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub master_seed: u64,
    pub prng: String,
    pub style: EncodingStyle,
    pub resolution: u32,
    pub recipe: CorpusRecipe,
    pub records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn category_counts(&self) -> BTreeMap<Category, usize> {
        let mut m = BTreeMap::new();
        for r in &self.records {
            *m.entry(r.category).or_insert(0) += 1;
        }
        m
    }

    pub fn read(path: &Path) -> Result<Manifest, DatasetError> {
        let text = fs::read_to_string(path).map_err(|e| DatasetError::ManifestUnreadable(format!("{}: {e}", path.display())))?;
        let m: Manifest =
            serde_json::from_str(&text).map_err(|e| DatasetError::ManifestUnreadable(format!("{}: {e}", path.display())))?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(DatasetError::ManifestUnreadable(format!("unsupported schema `{}`", m.schema)));
        }
        Ok(m)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("item {tag}#{index}: {source}")]
    Infeasible { tag: String, index: u32, source: SynthError },
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("I/O on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest unreadable: {0}")]
    ManifestUnreadable(String),
    #[error("malformed item tag `{0}`")]
    BadTag(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Random baseline spec: any shape, a few rooms of each kind, doors enough
/// to connect them, some windows.
fn base_spec(rng: &mut PlanRng, seed: u64) -> PlanSpec {
    let shape = *ShapeClass::ALL.choose(rng).expect("shapes");
    let mut rooms = BTreeMap::new();
    rooms.insert(RoomKind::Kitchen, CountSpec::Exact(rng.random_range(0..=2)));
    rooms.insert(RoomKind::Bathroom, CountSpec::Exact(rng.random_range(0..=2)));
    rooms.insert(RoomKind::LivingRoom, CountSpec::Exact(rng.random_range(1..=3)));
    PlanSpec {
        shape,
        rooms,
        doors: CountSpec::Exact(0),
        windows: CountSpec::Exact(rng.random_range(1..=8)),
        recolor: None,
        seed,
        size: None,
        grid: crate::geometry::DEFAULT_GRID,
    }
}

fn set_count(spec: &mut PlanSpec, e: ElementTerm, c: CountSpec) {
    match e {
        ElementTerm::Doors => spec.doors = c,
        ElementTerm::Windows => spec.windows = c,
        ElementTerm::Rooms => {}
        t => {
            spec.rooms.insert(t.room_kind().expect("room term"), c);
        }
    }
}

fn exact_rooms(spec: &PlanSpec, k: RoomKind) -> u32 {
    match spec.rooms.get(&k) {
        Some(CountSpec::Exact(n)) => *n,
        _ => 0,
    }
}

/// Completes the door count: at least one per room unless the item fixes
/// doors, in which case rooms are trimmed to what the doors can connect.
fn finish_spec(spec: &mut PlanSpec, fixed: Option<ElementTerm>, rng: &mut PlanRng) {
    let doors_fixed = fixed == Some(ElementTerm::Doors);
    let fixed_room = fixed.and_then(|e| e.room_kind());
    let mut r = spec.resolve();
    if doors_fixed && r.doors > 0 {
        // Trim free room kinds until the doors suffice.
        while r.total_rooms() > r.doors {
            let kinds: Vec<RoomKind> = RoomKind::ALL.into_iter().filter(|&k| exact_rooms(spec, k) > 0).collect();
            let k = *kinds.choose(rng).expect("rooms exceed doors");
            let n = exact_rooms(spec, k);
            spec.rooms.insert(k, CountSpec::Exact(n - 1));
            r = spec.resolve();
        }
    }
    if r.total_rooms() == 0 {
        let k = RoomKind::ALL.into_iter().find(|&k| Some(k) != fixed_room).expect("free kind");
        spec.rooms.insert(k, CountSpec::Exact(1));
        r = spec.resolve();
    }
    let min_rooms = match spec.shape {
        ShapeClass::OShaped | ShapeClass::MultipleBuildings => 2,
        _ => 1,
    };
    if r.total_rooms() < min_rooms {
        if doors_fixed && r.doors > 0 && r.doors < min_rooms {
            spec.shape = *[ShapeClass::Square, ShapeClass::Rectangle, ShapeClass::LShaped, ShapeClass::CShaped]
                .choose(rng)
                .expect("shapes");
        } else {
            let k = RoomKind::ALL.into_iter().find(|&k| Some(k) != fixed_room).expect("free kind");
            spec.rooms.insert(k, CountSpec::Exact(exact_rooms(spec, k) + 1));
            r = spec.resolve();
        }
    }
    if !doors_fixed {
        spec.doors = CountSpec::Exact(r.total_rooms() + rng.random_range(0..=3));
    }
}

/// Spec for one plan item of a category tag.
pub fn spec_for_item(tag: &str, seed: u64, recolor_color: ColorName) -> Result<PlanSpec, DatasetError> {
    let bad = || DatasetError::BadTag(tag.to_string());
    let parts: Vec<&str> = tag.split('/').collect();
    let mut rng = rng_from_seed(derive_seed(seed, "item-spec", 0));
    let mut spec = base_spec(&mut rng, seed);
    let fixed = match parts.as_slice() {
        ["recolor", e] => {
            let e = element_of_slug(e).ok_or_else(bad)?;
            if e != ElementTerm::Doors && e != ElementTerm::Rooms {
                set_count(&mut spec, e, CountSpec::Exact(rng.random_range(1..=3)));
            }
            spec.recolor = Some(crate::synth::Recolor { element: e, color: recolor_color });
            (e != ElementTerm::Doors).then_some(e)
        }
        ["shapes", s] => {
            spec.shape = ShapeClass::ALL.into_iter().find(|c| c.word() == *s).ok_or_else(bad)?;
            None
        }
        ["negation", e] => {
            let e = element_of_slug(e).ok_or_else(bad)?;
            set_count(&mut spec, e, CountSpec::Exact(0));
            Some(e)
        }
        ["bands", b, e] => {
            let b = QuantityBand::from_word(b).ok_or_else(bad)?;
            let e = element_of_slug(e).ok_or_else(bad)?;
            set_count(&mut spec, e, CountSpec::Band(b));
            Some(e)
        }
        ["counts", n, e] => {
            let n: u32 = n.parse().map_err(|_| bad())?;
            let e = element_of_slug(e).ok_or_else(bad)?;
            set_count(&mut spec, e, CountSpec::Exact(n));
            Some(e)
        }
        _ => return Err(bad()),
    };
    finish_spec(&mut spec, fixed, &mut rng);
    Ok(spec)
}

/// An item rendered in memory, ready to be written.
struct BuiltItem {
    png: Vec<u8>,
    txt: String,
    record: ManifestRecord,
}

fn build_item(req: &ItemRequest, file_index: usize, style: EncodingStyle, recipe: &CorpusRecipe) -> Result<BuiltItem, DatasetError> {
    let token = style_token(style);
    let item_seed = derive_seed(recipe.master_seed, &req.tag, req.index as u64);
    let (plan, source, prompt) = if req.category == Category::Cards {
        let element = element_of_slug(req.tag.trim_start_matches("cards/")).ok_or_else(|| DatasetError::BadTag(req.tag.clone()))?;
        let orientation = if req.index.is_multiple_of(2) { Orientation::Horizontal } else { Orientation::Vertical };
        let plan = symbol_card(element, orientation, item_seed)
            .map_err(|source| DatasetError::Infeasible { tag: req.tag.clone(), index: req.index, source })?;
        (plan, ItemSource::Card { element, orientation, seed: item_seed }, prompt_for_card(element, token))
    } else {
        let mut last = None;
        let mut found = None;
        for attempt in 0..ITEM_ATTEMPTS {
            let seed = if attempt == 0 { item_seed } else { derive_seed(item_seed, "retry", attempt) };
            let spec = spec_for_item(&req.tag, seed, recipe.recolor_color)?;
            match synthesize(&spec) {
                Ok(plan) => {
                    found = Some((plan, spec));
                    break;
                }
                Err(e) => last = Some(e),
            }
        }
        let Some((plan, spec)) = found else {
            return Err(DatasetError::Infeasible { tag: req.tag.clone(), index: req.index, source: last.expect("attempted") });
        };
        let prompt = prompt_for_plan(&plan, token).map_err(|e| DatasetError::Infeasible {
            tag: req.tag.clone(),
            index: req.index,
            source: SynthError::Infeasible(format!("generated footprint unclassifiable: {}", e.reason)),
        })?;
        (plan, ItemSource::Plan { spec }, prompt)
    };
    let png = render(&plan, style, recipe.resolution)?.to_png()?;
    let txt = serialize(&prompt);
    let stem = format!("{}/{:04}", req.category.dir(), file_index);
    let record = ManifestRecord {
        image: format!("{stem}.png"),
        prompt_file: format!("{stem}.txt"),
        category: req.category,
        tag: req.tag.clone(),
        style,
        prompt: txt.clone(),
        source,
        png_sha256: sha256_hex(&png),
        txt_sha256: sha256_hex(txt.as_bytes()),
    };
    Ok(BuiltItem { png, txt, record })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("part")
    ));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Builds one style's corpus under `<out_dir>/<style>/`. Nothing is written
/// unless every item succeeds; the manifest is written last.
pub fn build_training_corpus(style: EncodingStyle, recipe: &CorpusRecipe, out_dir: &Path) -> Result<Manifest, DatasetError> {
    let requests = recipe.items();
    let mut per_category: BTreeMap<Category, usize> = BTreeMap::new();
    let indexed: Vec<(ItemRequest, usize)> = requests
        .into_iter()
        .map(|r| {
            let n = per_category.entry(r.category).or_insert(0);
            *n += 1;
            (r, *n)
        })
        .collect();
    let built: Vec<BuiltItem> = indexed
        .par_iter()
        .map(|(r, i)| build_item(r, *i, style, recipe))
        .collect::<Result<_, _>>()?;

    let root = out_dir.join(style.name());
    fs::create_dir_all(&root).map_err(io_err(&root))?;
    for cat in per_category.keys() {
        let d = root.join(cat.dir());
        fs::create_dir_all(&d).map_err(io_err(&d))?;
    }
    built.par_iter().try_for_each(|b| -> Result<(), DatasetError> {
        write_atomic(&root.join(&b.record.image), &b.png)?;
        write_atomic(&root.join(&b.record.prompt_file), b.txt.as_bytes())
    })?;
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.to_string(),
        master_seed: recipe.master_seed,
        prng: PRNG_ALGORITHM.to_string(),
        style,
        resolution: recipe.resolution,
        recipe: recipe.clone(),
        records: built.into_iter().map(|b| b.record).collect(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&root.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(manifest)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: usize,
    pub missing: Vec<String>,
    pub mismatched: Vec<String>,
    pub extra: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.mismatched.is_empty() && self.extra.is_empty()
    }
}

/// Re-hashes every file listed in the manifest under `dir` (a style
/// directory) and lists unlisted png/txt files.
pub fn verify_corpus(dir: &Path, manifest: &Manifest) -> Result<VerifyReport, DatasetError> {
    let mut report = VerifyReport::default();
    let mut listed = BTreeSet::new();
    for r in &manifest.records {
        for (file, hash) in [(&r.image, &r.png_sha256), (&r.prompt_file, &r.txt_sha256)] {
            listed.insert(file.clone());
            match fs::read(dir.join(file)) {
                Ok(bytes) if sha256_hex(&bytes) == *hash => report.ok += 1,
                Ok(_) => report.mismatched.push(file.clone()),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => report.missing.push(file.clone()),
                Err(e) => return Err(DatasetError::Io { path: dir.join(file), source: e }),
            }
        }
    }
    for cat in Category::ALL {
        let d = dir.join(cat.dir());
        let Ok(entries) = fs::read_dir(&d) else { continue };
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .map(|e| format!("{}/{}", cat.dir(), e.file_name().to_string_lossy()))
            .filter(|n| n.ends_with(".png") || n.ends_with(".txt"))
            .collect();
        names.sort();
        report.extra.extend(names.into_iter().filter(|n| !listed.contains(n)));
    }
    Ok(report)
}

/// Reads `<dir>/manifest.json` and verifies against it.
pub fn verify_style_dir(dir: &Path) -> Result<VerifyReport, DatasetError> {
    let m = Manifest::read(&dir.join(MANIFEST_FILE))?;
    verify_corpus(dir, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::element_counts;

    #[test]
    fn default_recipe_has_423_items() {
        let items = CorpusRecipe::default().items();
        assert_eq!(items.len(), 423);
        let count = |c: Category| items.iter().filter(|i| i.category == c).count();
        assert_eq!(
            [Category::Cards, Category::Recolor, Category::Shapes, Category::Negation, Category::Bands, Category::Counts].map(count),
            [13, 50, 60, 50, 100, 150]
        );
        assert!(CorpusRecipe::empty(1).items().is_empty());
    }

    #[test]
    fn item_specs_honor_their_tags() {
        for (tag, check) in [
            ("counts/2/doors", ElementTerm::Doors),
            ("counts/6/kitchen", ElementTerm::Kitchen),
            ("negation/living-room", ElementTerm::LivingRoom),
            ("negation/doors", ElementTerm::Doors),
        ] {
            for seed in 0..30 {
                let spec = spec_for_item(tag, seed, ColorName::Green).unwrap();
                let plan = synthesize(&spec).unwrap_or_else(|e| panic!("{tag} {seed}: {e}"));
                let want: u32 = tag.split('/').nth(1).unwrap().parse().unwrap_or(0);
                assert_eq!(element_counts(&plan).get(check), want, "{tag} {seed}");
            }
        }
        for seed in 0..30 {
            let spec = spec_for_item("bands/few/doors", seed, ColorName::Green).unwrap();
            let plan = synthesize(&spec).unwrap();
            assert!(QuantityBand::Few.admits(element_counts(&plan).doors));
            let spec = spec_for_item("bands/many/bathroom", seed, ColorName::Green).unwrap();
            let plan = synthesize(&spec).unwrap();
            assert!(QuantityBand::Many.admits(element_counts(&plan).bathrooms));
        }
        assert!(spec_for_item("bogus/kitchen", 0, ColorName::Green).is_err());
    }
}
