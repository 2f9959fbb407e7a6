//! Test-prompt suite, image scoring and result tables.
//!
//! A case may test several features at once: the shape requests share their
//! prompts with the removal cases, so one image is scored for both.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decode::{decode, DecodeError, DecodedPlan};
use crate::geometry::{ElementTerm, RoomKind, DEFAULT_GRID};
use crate::palette::ColorName;
use crate::prompt::{serialize, style_token, ConceptDescriptor, PromptSpec, BASELINE_TOKEN, NEGATIVE_PROMPT};
use crate::render::{opening_color, render, room_color, EncodingStyle, ImageError, RasterImage, RenderError, DEFAULT_RESOLUTION};
use crate::rng::{derive_seed, rng_from_seed, PlanRng};
use crate::synth::{synthesize, CountSpec, PlanSpec, QuantityBand, Recolor, SynthError};
use crate::ShapeClass;

pub const SUITE_SCHEMA: &str = "planforge-suite/1";
pub const DEFAULT_SAMPLES: u32 = 10;

/// Row of the results table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalCategory {
    ValidPlan,
    OverfitCheck,
    QuantifyObjects,
    QuantifyRooms,
    CountObjects,
    CountRooms,
    RemoveObjects,
    RemoveRooms,
    RecolorObjects,
    RecolorRooms,
    ArrangeRooms,
}

impl EvalCategory {
    pub const ALL: [EvalCategory; 11] = [
        EvalCategory::ValidPlan,
        EvalCategory::OverfitCheck,
        EvalCategory::QuantifyObjects,
        EvalCategory::QuantifyRooms,
        EvalCategory::CountObjects,
        EvalCategory::CountRooms,
        EvalCategory::RemoveObjects,
        EvalCategory::RemoveRooms,
        EvalCategory::RecolorObjects,
        EvalCategory::RecolorRooms,
        EvalCategory::ArrangeRooms,
    ];

    /// Table row label.
    pub const fn label(self) -> &'static str {
        match self {
            EvalCategory::ValidPlan => "Valid Plan",
            EvalCategory::OverfitCheck => "Not Overfitted",
            EvalCategory::QuantifyObjects => "Quantify Obj.",
            EvalCategory::QuantifyRooms => "Quantify Rooms",
            EvalCategory::CountObjects => "Count of Obj.",
            EvalCategory::CountRooms => "Count of Rooms",
            EvalCategory::RemoveObjects => "Remove Obj.",
            EvalCategory::RemoveRooms => "Remove Room",
            EvalCategory::RecolorObjects => "Recoloured Obj.",
            EvalCategory::RecolorRooms => "Recolour Room",
            EvalCategory::ArrangeRooms => "Arrange Rooms",
        }
    }

    pub fn slug(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
    }

    pub fn from_slug(s: &str) -> Option<EvalCategory> {
        EvalCategory::ALL.into_iter().find(|c| c.slug() == s)
    }

    /// Categories with a feature predicate of their own.
    pub const FEATURES: [EvalCategory; 9] = [
        EvalCategory::QuantifyObjects,
        EvalCategory::QuantifyRooms,
        EvalCategory::CountObjects,
        EvalCategory::CountRooms,
        EvalCategory::RemoveObjects,
        EvalCategory::RemoveRooms,
        EvalCategory::RecolorObjects,
        EvalCategory::RecolorRooms,
        EvalCategory::ArrangeRooms,
    ];
}

/// A model column: the untuned baseline or one of the tuned styles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Column {
    B,
    R,
    SR,
    SE,
    SRE,
}

impl Column {
    pub const ALL: [Column; 5] = [Column::B, Column::R, Column::SR, Column::SE, Column::SRE];

    pub const fn label(self) -> &'static str {
        match self {
            Column::B => "B",
            Column::R => "R",
            Column::SR => "SR",
            Column::SE => "SE",
            Column::SRE => "SRE",
        }
    }

    pub const fn dir(self) -> &'static str {
        match self {
            Column::B => "b",
            Column::R => "r",
            Column::SR => "sr",
            Column::SE => "se",
            Column::SRE => "sre",
        }
    }

    /// Style the column's images are decoded as. The baseline produces
    /// plain black-and-white drawings.
    pub const fn decode_style(self) -> EncodingStyle {
        match self {
            Column::B | Column::R => EncodingStyle::R,
            Column::SR => EncodingStyle::SR,
            Column::SE => EncodingStyle::SE,
            Column::SRE => EncodingStyle::SRE,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Column::B => BASELINE_TOKEN,
            c => style_token(c.decode_style()),
        }
    }

    pub fn from_label(s: &str) -> Option<Column> {
        Column::ALL.into_iter().find(|c| c.label().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One machine-checkable test on a decoded image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "check")]
pub enum Check {
    /// The concept's count (or band) matches what the image shows.
    Concept { concept: ConceptDescriptor },
    Shape { shape: ShapeClass },
    /// The image must not decode as a plan.
    NotAPlan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub category: EvalCategory,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCase {
    pub id: String,
    /// Prompt body without the style token; `None` for literal prompts.
    pub spec: Option<PromptSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<String>,
    pub features: Vec<Feature>,
    pub samples: u32,
}

impl EvalCase {
    pub fn is_overfit(&self) -> bool {
        self.features.iter().any(|f| f.category == EvalCategory::OverfitCheck)
    }

    pub fn prompt_for(&self, column: Column) -> String {
        match (&self.spec, &self.literal) {
            (Some(spec), _) => {
                let mut s = spec.clone();
                s.style_token = column.token().to_string();
                serialize(&s)
            }
            (None, Some(text)) => format!("{}, {text}", column.token()),
            (None, None) => column.token().to_string(),
        }
    }

    pub fn categories(&self) -> Vec<EvalCategory> {
        self.features.iter().map(|f| f.category).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub samples: u32,
    pub count_values: Vec<u32>,
    pub recolor_color: ColorName,
    pub face_prompts: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: DEFAULT_SAMPLES,
            count_values: vec![2, 4, 6],
            recolor_color: ColorName::Green,
            face_prompts: vec![
                "portrait photograph of a human face, neutral expression".to_string(),
                "close-up photo of a smiling person's face".to_string(),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("invalid suite configuration: {0}")]
    ConfigInvalid(String),
    #[error("image unreadable: {0}")]
    ImageUnreadable(String),
    #[error("mapping incomplete: {0}")]
    MappingIncomplete(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error("ground truth: {0}")]
    GroundTruth(String),
    #[error("malformed report: {0}")]
    ReportFormat(String),
}

impl From<SynthError> for EvalError {
    fn from(e: SynthError) -> Self {
        EvalError::GroundTruth(e.to_string())
    }
}

impl From<RenderError> for EvalError {
    fn from(e: RenderError) -> Self {
        EvalError::GroundTruth(e.to_string())
    }
}

impl From<ImageError> for EvalError {
    fn from(e: ImageError) -> Self {
        EvalError::Io(e.to_string())
    }
}

fn concept_case(id: String, cat: EvalCategory, concept: ConceptDescriptor, samples: u32) -> EvalCase {
    EvalCase {
        id,
        spec: Some(PromptSpec::new("").with(concept)),
        literal: None,
        features: vec![Feature { category: cat, checks: vec![Check::Concept { concept }] }],
        samples,
    }
}

fn slug(e: ElementTerm) -> String {
    e.word().replace(' ', "-")
}

/// The suite: two overfit prompts and 41 plan prompts. Shape requests ride
/// on the five removal prompts.
pub fn build_eval_suite(config: &SuiteConfig) -> Result<Vec<EvalCase>, EvalError> {
    if config.samples == 0 {
        return Err(EvalError::ConfigInvalid("samples must be positive".into()));
    }
    if let Some(&n) = config.count_values.iter().find(|&&n| n == 0 || n > QuantityBand::MANY_MAX) {
        return Err(EvalError::ConfigInvalid(format!("count {n} outside 1..={}", QuantityBand::MANY_MAX)));
    }
    if [ColorName::Red, ColorName::Blue, ColorName::Black, ColorName::White].contains(&config.recolor_color) {
        return Err(EvalError::ConfigInvalid(format!("recolor color {} is already used by the encoding", config.recolor_color)));
    }
    let n = config.samples;
    let mut suite = Vec::new();
    for (i, text) in config.face_prompts.iter().enumerate() {
        suite.push(EvalCase {
            id: format!("overfit-face-{}", i + 1),
            spec: None,
            literal: Some(text.clone()),
            features: vec![Feature { category: EvalCategory::OverfitCheck, checks: vec![Check::NotAPlan] }],
            samples: n,
        });
    }
    let objects = [ElementTerm::Windows, ElementTerm::Doors];
    let rooms = [ElementTerm::Rooms, ElementTerm::Kitchen, ElementTerm::Bathroom, ElementTerm::LivingRoom];
    for (cat, terms) in [(EvalCategory::QuantifyObjects, &objects[..]), (EvalCategory::QuantifyRooms, &rooms[..])] {
        for band in [QuantityBand::Few, QuantityBand::Many] {
            for &e in terms {
                let c = ConceptDescriptor::fuzzy(band, e, e.canonical_color());
                suite.push(concept_case(format!("{}-{band}-{}", cat.slug(), slug(e)), cat, c, n));
            }
        }
    }
    for (cat, terms) in [(EvalCategory::CountObjects, &objects[..]), (EvalCategory::CountRooms, &rooms[..])] {
        for &k in &config.count_values {
            for &e in terms {
                let c = ConceptDescriptor::canonical(k, e);
                suite.push(concept_case(format!("{}-{k}-{}", cat.slug(), slug(e)), cat, c, n));
            }
        }
    }
    let removals = [
        (EvalCategory::RemoveObjects, ElementTerm::Windows, ShapeClass::LShaped),
        (EvalCategory::RemoveObjects, ElementTerm::Doors, ShapeClass::CShaped),
        (EvalCategory::RemoveRooms, ElementTerm::Kitchen, ShapeClass::OShaped),
        (EvalCategory::RemoveRooms, ElementTerm::Bathroom, ShapeClass::Rectangle),
        (EvalCategory::RemoveRooms, ElementTerm::LivingRoom, ShapeClass::MultipleBuildings),
    ];
    for (cat, e, shape) in removals {
        let c = ConceptDescriptor::canonical(0, e);
        suite.push(EvalCase {
            id: format!("{}-no-{}-{}", cat.slug(), slug(e), shape.word()),
            spec: Some(PromptSpec::new("").with_shape(shape).with(c)),
            literal: None,
            features: vec![
                Feature { category: cat, checks: vec![Check::Concept { concept: c }] },
                Feature { category: EvalCategory::ArrangeRooms, checks: vec![Check::Shape { shape }] },
            ],
            samples: n,
        });
    }
    let green = config.recolor_color;
    for (e, k) in [(ElementTerm::Doors, 2), (ElementTerm::Windows, 3), (ElementTerm::Doors, 8)] {
        let c = ConceptDescriptor::exact(k, e, green);
        suite.push(concept_case(format!("recolor-objects-{k}-{}-{green}", slug(e)), EvalCategory::RecolorObjects, c, n));
    }
    for (e, k) in [(ElementTerm::Kitchen, 1), (ElementTerm::Bathroom, 1), (ElementTerm::LivingRoom, 2)] {
        let c = ConceptDescriptor::exact(k, e, green);
        suite.push(concept_case(format!("recolor-rooms-{k}-{}-{green}", slug(e)), EvalCategory::RecolorRooms, c, n));
    }
    Ok(suite)
}

/// Experiments per row for one column.
pub fn expected_experiments(suite: &[EvalCase]) -> BTreeMap<EvalCategory, u32> {
    let mut m: BTreeMap<EvalCategory, u32> = EvalCategory::ALL.into_iter().map(|c| (c, 0)).collect();
    for case in suite {
        if !case.is_overfit() {
            *m.get_mut(&EvalCategory::ValidPlan).expect("row") += case.samples;
        }
        for f in &case.features {
            *m.get_mut(&f.category).expect("row") += case.samples;
        }
    }
    m
}

/// Count of `concept` a decoded image shows, or `None` when the style
/// cannot show it.
fn observed(d: &DecodedPlan, style: EncodingStyle, c: &ConceptDescriptor) -> Option<u32> {
    let override_of = |canonical: ColorName| (c.color != canonical).then_some(c.color);
    match c.element {
        ElementTerm::Doors | ElementTerm::Windows => {
            let kind = c.element.opening_kind().expect("opening");
            let shown = opening_color(style, kind, override_of(kind.canonical_color()));
            let n = d
                .openings
                .iter()
                .filter(|o| o.color == shown && (style.color_bars() || o.kind == Some(kind)))
                .count();
            Some(n as u32)
        }
        ElementTerm::Rooms => Some(d.rooms.len() as u32),
        t => {
            let kind: RoomKind = t.room_kind().expect("room");
            style.room_fill().then(|| d.rooms_colored(room_color(style, kind, override_of(kind.canonical_color()))))
        }
    }
}

/// Whether the decoded image agrees with `c`. Room kinds a style draws white
/// pass whenever the plan has enough rooms to contain them.
pub fn concept_holds(d: &DecodedPlan, style: EncodingStyle, c: &ConceptDescriptor) -> bool {
    match observed(d, style, c) {
        Some(n) => match c.count {
            Some(k) => n == k,
            None => c.quantity.admits(n),
        },
        // Room kinds drawn white: any plan with enough rooms could match.
        None => {
            let total = d.rooms.len() as u32;
            match (c.count, c.quantity) {
                (Some(k), _) => total >= k,
                (None, QuantityBand::No) => true,
                (None, QuantityBand::Few) => total >= 1,
                (None, QuantityBand::Many) => total >= QuantityBand::MANY_MIN,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageScore {
    pub case_id: String,
    /// Plan validity; `None` for overfit cases.
    pub valid: Option<bool>,
    pub features: Vec<(EvalCategory, bool)>,
    pub detail: String,
}

pub fn score_decoded(decoded: &Result<DecodedPlan, DecodeError>, case: &EvalCase, column: Column) -> ImageScore {
    let style = column.decode_style();
    let valid = (!case.is_overfit()).then(|| match decoded {
        Ok(d) => {
            let v = d.validity_flags;
            v.closed_outline && !v.touches_border && v.recognizable_symbology
        }
        Err(_) => false,
    });
    let features = case
        .features
        .iter()
        .map(|f| {
            let pass = f.checks.iter().all(|ch| match (ch, decoded) {
                (Check::NotAPlan, r) => matches!(r, Err(DecodeError::NotAPlan { .. })),
                (_, Err(_)) => false,
                (Check::Concept { concept }, Ok(d)) => concept_holds(d, style, concept),
                (Check::Shape { shape }, Ok(d)) => d.shape_class.shape() == Some(*shape),
            });
            (f.category, pass)
        })
        .collect();
    let detail = match decoded {
        Ok(d) => {
            let c = d.counts();
            format!(
                "doors {} windows {} rooms {} (k{} b{} l{} ?{}) shape {:?}",
                c.doors,
                c.windows,
                c.rooms(),
                c.kitchens,
                c.bathrooms,
                c.living_rooms,
                c.unknown_rooms,
                d.shape_class.shape()
            )
        }
        Err(e) => e.to_string(),
    };
    ImageScore { case_id: case.id.clone(), valid, features, detail }
}

pub fn score_image(image: &RasterImage, case: &EvalCase, column: Column) -> ImageScore {
    score_decoded(&decode(image, column.decode_style()), case, column)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub experiments: u32,
    pub successes: u32,
}

impl Cell {
    pub fn rate(&self) -> Option<f64> {
        (self.experiments > 0).then(|| self.successes as f64 / self.experiments as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub category: EvalCategory,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub columns: Vec<Column>,
    pub rows: Vec<ReportRow>,
    pub images: u32,
    #[serde(default)]
    pub unmatched: Vec<String>,
}

impl ScoreReport {
    pub fn empty(columns: &[Column]) -> Self {
        ScoreReport {
            columns: columns.to_vec(),
            rows: EvalCategory::ALL.into_iter().map(|category| ReportRow { category, cells: vec![Cell::default(); columns.len()] }).collect(),
            images: 0,
            unmatched: Vec::new(),
        }
    }

    pub fn cell(&self, category: EvalCategory, column: Column) -> Cell {
        let ci = self.columns.iter().position(|&c| c == column);
        let row = self.rows.iter().find(|r| r.category == category);
        match (ci, row) {
            (Some(i), Some(r)) => r.cells[i],
            _ => Cell::default(),
        }
    }

    fn cell_mut(&mut self, category: EvalCategory, column: Column) -> &mut Cell {
        let ci = match self.columns.iter().position(|&c| c == column) {
            Some(i) => i,
            None => {
                self.columns.push(column);
                for r in &mut self.rows {
                    r.cells.push(Cell::default());
                }
                self.columns.len() - 1
            }
        };
        let r = self.rows.iter_mut().find(|r| r.category == category).expect("all rows present");
        &mut r.cells[ci]
    }

    pub fn add(&mut self, column: Column, score: &ImageScore) {
        self.images += 1;
        let bump = |cell: &mut Cell, ok: bool| {
            cell.experiments += 1;
            cell.successes += ok as u32;
        };
        if let Some(v) = score.valid {
            bump(self.cell_mut(EvalCategory::ValidPlan, column), v);
        }
        for &(cat, ok) in &score.features {
            bump(self.cell_mut(cat, column), ok);
        }
    }

    /// Adds another report's counts, cell by cell.
    pub fn merge(&mut self, other: &ScoreReport) {
        for &col in &other.columns {
            for cat in EvalCategory::ALL {
                let o = other.cell(cat, col);
                let c = self.cell_mut(cat, col);
                c.experiments += o.experiments;
                c.successes += o.successes;
            }
        }
        self.images += other.images;
        self.unmatched.extend(other.unmatched.iter().cloned());
    }

    /// Experiments in a row: the largest over columns.
    pub fn row_experiments(&self, category: EvalCategory) -> u32 {
        self.columns.iter().map(|&c| self.cell(category, c).experiments).max().unwrap_or(0)
    }

    pub fn total_experiments(&self) -> u32 {
        self.columns
            .iter()
            .map(|&c| self.cell(EvalCategory::ValidPlan, c).experiments + self.cell(EvalCategory::OverfitCheck, c).experiments)
            .sum()
    }
}

/// Splits `caseid_sampleN.png` into case id and sample index.
pub fn parse_sample_name(name: &str) -> Option<(&str, u32)> {
    let stem = name.strip_suffix(".png").or_else(|| name.strip_suffix(".jpg")).or_else(|| name.strip_suffix(".jpeg"))?;
    let (id, n) = stem.rsplit_once("_sample")?;
    Some((id, n.parse().ok()?))
}

pub fn sample_name(case_id: &str, sample: u32) -> String {
    format!("{case_id}_sample{sample}.png")
}

/// How image files are matched to cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mapping {
    /// `caseid_sampleN.png`.
    FileNames,
    /// JSON object from file name to case id.
    Sidecar(PathBuf),
}

/// Scores every image of one column's directory.
pub fn score_directory(dir: &Path, suite: &[EvalCase], column: Column, mapping: &Mapping) -> Result<ScoreReport, EvalError> {
    let by_id: BTreeMap<&str, &EvalCase> = suite.iter().map(|c| (c.id.as_str(), c)).collect();
    let mut report = ScoreReport::empty(&[column]);
    let mut jobs: Vec<(PathBuf, &EvalCase)> = Vec::new();
    match mapping {
        Mapping::FileNames => {
            let entries = match fs::read_dir(dir) {
                Ok(e) => e,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(report),
                Err(e) => return Err(EvalError::Io(format!("{}: {e}", dir.display()))),
            };
            let mut names: Vec<String> = entries.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
            names.sort();
            for name in names {
                if !(name.ends_with(".png") || name.ends_with(".jpg") || name.ends_with(".jpeg")) {
                    continue;
                }
                match parse_sample_name(&name).and_then(|(id, _)| by_id.get(id)) {
                    Some(case) => jobs.push((dir.join(&name), case)),
                    None => report.unmatched.push(name),
                }
            }
        }
        Mapping::Sidecar(path) => {
            let text = fs::read_to_string(path).map_err(|e| EvalError::MappingIncomplete(format!("{}: {e}", path.display())))?;
            let map: BTreeMap<String, String> =
                serde_json::from_str(&text).map_err(|e| EvalError::MappingIncomplete(format!("{}: {e}", path.display())))?;
            for (file, id) in map {
                let Some(case) = by_id.get(id.as_str()) else {
                    return Err(EvalError::MappingIncomplete(format!("{file} maps to unknown case `{id}`")));
                };
                let p = dir.join(&file);
                if !p.exists() {
                    return Err(EvalError::MappingIncomplete(format!("{file} is listed but missing")));
                }
                jobs.push((p, case));
            }
        }
    }
    let scores: Vec<ImageScore> = jobs
        .par_iter()
        .map(|(p, case)| {
            let img = RasterImage::read(p).map_err(|e| EvalError::ImageUnreadable(format!("{}: {e}", p.display())))?;
            Ok(score_image(&img, case, column))
        })
        .collect::<Result<_, EvalError>>()?;
    for s in &scores {
        report.add(column, s);
    }
    Ok(report)
}

/// Scores `<root>/<column>/` for every column directory present.
pub fn score_root(root: &Path, suite: &[EvalCase], columns: &[Column]) -> Result<ScoreReport, EvalError> {
    let mut report = ScoreReport::empty(columns);
    for &c in columns {
        report.merge(&score_directory(&root.join(c.dir()), suite, c, &Mapping::FileNames)?);
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format `{s}` (expected text, csv or markdown)")),
        }
    }
}

fn pct(cell: Cell) -> String {
    match cell.rate() {
        Some(r) => format!("{:.0}%", r * 100.0),
        None => "–".to_string(),
    }
}

pub fn format_report(report: &ScoreReport, format: ReportFormat) -> String {
    let header: Vec<String> = ["".to_string(), "#".to_string()]
        .into_iter()
        .chain(report.columns.iter().map(|c| c.label().to_string()))
        .collect();
    let rows: Vec<Vec<String>> = EvalCategory::ALL
        .into_iter()
        .map(|cat| {
            let mut r = vec![cat.label().to_string(), report.row_experiments(cat).to_string()];
            r.extend(report.columns.iter().map(|&c| pct(report.cell(cat, c))));
            r
        })
        .collect();
    match format {
        ReportFormat::Text => {
            let ncol = header.len();
            let widths: Vec<usize> = (0..ncol)
                .map(|i| std::iter::once(&header).chain(&rows).map(|r| r[i].chars().count()).max().unwrap_or(0))
                .collect();
            let line = |r: &[String]| -> String {
                r.iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let pad = widths[i] - s.chars().count();
                        if i == 0 {
                            format!("{s}{}", " ".repeat(pad))
                        } else {
                            format!("{}{s}", " ".repeat(pad))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let mut out = line(&header);
            out.push('\n');
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (ncol - 1)));
            out.push('\n');
            for r in &rows {
                out.push_str(&line(r));
                out.push('\n');
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = format!("| {} |\n", header.join(" | "));
            out.push_str(&format!("|{}\n", ["---|"].repeat(header.len()).concat()));
            for r in &rows {
                out.push_str(&format!("| {} |\n", r.join(" | ")));
            }
            out
        }
        ReportFormat::Csv => {
            let mut out = String::from("category,experiments");
            for c in &report.columns {
                out.push_str(&format!(",{0}_successes,{0}_experiments", c.label()));
            }
            out.push('\n');
            for cat in EvalCategory::ALL {
                out.push_str(&format!("{},{}", cat.slug(), report.row_experiments(cat)));
                for &c in &report.columns {
                    let cell = report.cell(cat, c);
                    out.push_str(&format!(",{},{}", cell.successes, cell.experiments));
                }
                out.push('\n');
            }
            out
        }
    }
}

/// Reads a CSV report back.
pub fn parse_csv_report(text: &str) -> Result<ScoreReport, EvalError> {
    let bad = |m: &str| EvalError::ReportFormat(m.to_string());
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split(',').collect();
    if header.len() < 2 || header[0] != "category" || header[1] != "experiments" || !(header.len() - 2).is_multiple_of(2) {
        return Err(bad("unexpected header"));
    }
    let mut columns = Vec::new();
    for pair in header[2..].chunks(2) {
        let label = pair[0].strip_suffix("_successes").ok_or_else(|| bad("column header"))?;
        if pair[1] != format!("{label}_experiments") {
            return Err(bad("column header"));
        }
        columns.push(Column::from_label(label).ok_or_else(|| bad("unknown column"))?);
    }
    let mut report = ScoreReport::empty(&columns);
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != header.len() {
            return Err(bad("row width"));
        }
        let cat = EvalCategory::from_slug(f[0]).ok_or_else(|| bad("unknown category"))?;
        for (i, &col) in columns.iter().enumerate() {
            let num = |s: &str| s.parse::<u32>().map_err(|_| bad("number"));
            let cell = Cell { successes: num(f[2 + 2 * i])?, experiments: num(f[3 + 2 * i])? };
            *report.cell_mut(cat, col) = cell;
        }
    }
    report.images = report.total_experiments();
    Ok(report)
}

/// Suite document for generation tools.
pub fn suite_json(suite: &[EvalCase], columns: &[Column]) -> String {
    #[derive(Serialize)]
    struct CaseDoc<'a> {
        #[serde(flatten)]
        case: &'a EvalCase,
        categories: Vec<EvalCategory>,
        prompts: BTreeMap<&'static str, String>,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        negative_prompt: &'static str,
        columns: BTreeMap<&'static str, &'static str>,
        cases: Vec<CaseDoc<'a>>,
    }
    let doc = Doc {
        schema: SUITE_SCHEMA,
        negative_prompt: NEGATIVE_PROMPT,
        columns: columns.iter().map(|c| (c.label(), c.token())).collect(),
        cases: suite
            .iter()
            .map(|c| CaseDoc {
                case: c,
                categories: c.categories(),
                prompts: columns.iter().map(|&col| (col.label(), c.prompt_for(col))).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("suite serializes")
}

/// Reads a suite document written by [`suite_json`].
pub fn parse_suite_json(text: &str) -> Result<Vec<EvalCase>, EvalError> {
    #[derive(Deserialize)]
    struct Doc {
        schema: String,
        cases: Vec<EvalCase>,
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| EvalError::ConfigInvalid(format!("suite: {e}")))?;
    if doc.schema != SUITE_SCHEMA {
        return Err(EvalError::ConfigInvalid(format!("suite schema `{}`, expected `{SUITE_SCHEMA}`", doc.schema)));
    }
    Ok(doc.cases)
}

fn pick_count(c: &ConceptDescriptor, rng: &mut PlanRng) -> u32 {
    match c.count {
        Some(n) => n,
        None => {
            let (lo, hi) = c.quantity.range();
            rng.random_range(lo..=hi)
        }
    }
}

/// Exact plan spec realizing a prompt's concepts and shape.
pub fn spec_for_prompt(prompt: &PromptSpec, seed: u64) -> PlanSpec {
    let mut rng = rng_from_seed(derive_seed(seed, "ground-truth", 0));
    let mut kinds: BTreeMap<RoomKind, Option<u32>> = RoomKind::ALL.into_iter().map(|k| (k, None)).collect();
    let (mut doors, mut windows, mut total) = (None, None, None);
    let mut recolor = None;
    for c in &prompt.concepts {
        let n = pick_count(c, &mut rng);
        match c.element {
            ElementTerm::Doors => doors = Some(n),
            ElementTerm::Windows => windows = Some(n),
            ElementTerm::Rooms => total = Some(n),
            t => {
                kinds.insert(t.room_kind().expect("room"), Some(n));
            }
        }
        if c.color != c.element.canonical_color() {
            recolor = Some(Recolor { element: c.element, color: c.color });
        }
    }
    let fixed_shape = prompt.shape.map(|s| s.shape);
    // Room totals are bounded by a fixed door count.
    let cap = doors.filter(|&d| d > 0).unwrap_or(u32::MAX);
    let fixed_sum: u32 = kinds.values().flatten().sum();
    let free: Vec<RoomKind> = kinds.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| *k).collect();
    let mut counts: BTreeMap<RoomKind, u32> = kinds.iter().filter_map(|(k, v)| v.map(|n| (*k, n))).collect();
    for &k in &free {
        counts.insert(k, 0);
    }
    let min_total = match fixed_shape {
        Some(ShapeClass::OShaped | ShapeClass::MultipleBuildings) => 2,
        _ => 1,
    };
    let target = match total {
        Some(t) => t,
        None => {
            let hi = (fixed_sum + 4).min(cap).max(fixed_sum);
            let lo = (fixed_sum + (fixed_sum == 0) as u32).max(min_total).min(hi);
            rng.random_range(lo..=hi.max(lo))
        }
    };
    let mut remaining = target.saturating_sub(fixed_sum);
    if !free.is_empty() {
        while remaining > 0 {
            let k = *free.choose(&mut rng).expect("free kinds");
            *counts.get_mut(&k).expect("kind") += 1;
            remaining -= 1;
        }
    }
    let rooms_total: u32 = counts.values().sum();
    let shape = fixed_shape.unwrap_or_else(|| {
        let options: Vec<ShapeClass> =
            ShapeClass::ALL.into_iter().filter(|s| rooms_total >= 2 || !matches!(s, ShapeClass::OShaped | ShapeClass::MultipleBuildings)).collect();
        *options.choose(&mut rng).expect("shapes")
    });
    let doors = doors.unwrap_or_else(|| rooms_total + rng.random_range(0..=2));
    let windows = windows.unwrap_or_else(|| rng.random_range(1..=6));
    PlanSpec {
        shape,
        rooms: counts.into_iter().map(|(k, n)| (k, CountSpec::Exact(n))).collect(),
        doors: CountSpec::Exact(doors),
        windows: CountSpec::Exact(windows),
        recolor,
        seed: derive_seed(seed, "ground-truth-plan", 0),
        size: None,
        grid: DEFAULT_GRID,
    }
}

/// Stand-in for a portrait: a face-like disc with no plan structure.
pub fn face_image(resolution: u32, seed: u64) -> RasterImage {
    let mut rng = rng_from_seed(seed);
    let mut img = RasterImage::filled(resolution, resolution, ColorName::White);
    let skin = [rng.random_range(200..240), rng.random_range(160..200), rng.random_range(130..170)];
    let bg = [rng.random_range(90..140), rng.random_range(120..170), rng.random_range(150..200)];
    let r = resolution as f64;
    let (cx, cy) = (r / 2.0, r / 2.0);
    for y in 0..resolution {
        for x in 0..resolution {
            let (dx, dy) = ((x as f64 - cx) / (0.3 * r), (y as f64 - cy) / (0.4 * r));
            let inside = dx * dx + dy * dy < 1.0;
            let eye = [(0.4, 0.42), (0.6, 0.42)]
                .iter()
                .any(|&(ex, ey)| ((x as f64 / r - ex).powi(2) + (y as f64 / r - ey).powi(2)).sqrt() < 0.025);
            let mouth = ((y as f64 / r - 0.6).abs() < 0.01) && (x as f64 / r - 0.5).abs() < 0.08;
            let rgb = if eye || mouth { [120, 70, 60] } else if inside { skin } else { bg };
            img.set(x, y, rgb);
        }
    }
    img
}

/// An image satisfying every feature of `case` in `column`, drawn with seed
/// `sample`.
pub fn ground_truth_image(case: &EvalCase, column: Column, sample: u32, resolution: u32) -> Result<RasterImage, EvalError> {
    let seed = derive_seed(derive_seed(0, &case.id, sample as u64), "sample", 0);
    match &case.spec {
        None => Ok(face_image(resolution, seed)),
        Some(prompt) => {
            let plan = synthesize_with_retries(prompt, seed)?;
            Ok(render(&plan, column.decode_style(), resolution)?)
        }
    }
}

fn synthesize_with_retries(prompt: &PromptSpec, seed: u64) -> Result<crate::FloorPlan, EvalError> {
    let mut last = None;
    for attempt in 0..16 {
        let spec = spec_for_prompt(prompt, derive_seed(seed, "attempt", attempt));
        match synthesize(&spec) {
            Ok(p) => return Ok(p),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("attempted").into())
}

/// Writes `<root>/<column>/<case>_sample<N>.png` for the whole suite.
pub fn write_ground_truth(root: &Path, suite: &[EvalCase], columns: &[Column], resolution: u32) -> Result<u32, EvalError> {
    let jobs: Vec<(Column, &EvalCase, u32)> = columns
        .iter()
        .flat_map(|&col| suite.iter().flat_map(move |c| (0..c.samples).map(move |s| (col, c, s))))
        .collect();
    for &c in columns {
        fs::create_dir_all(root.join(c.dir())).map_err(|e| EvalError::Io(e.to_string()))?;
    }
    jobs.par_iter().try_for_each(|&(col, case, s)| -> Result<(), EvalError> {
        let img = ground_truth_image(case, col, s, resolution)?;
        img.write_png(&root.join(col.dir()).join(sample_name(&case.id, s)))?;
        Ok(())
    })?;
    Ok(jobs.len() as u32)
}

/// A concept altered so that the image contradicts the original.
fn contradict(c: &ConceptDescriptor) -> ConceptDescriptor {
    if c.color != c.element.canonical_color() {
        return ConceptDescriptor { color: c.element.canonical_color(), ..*c };
    }
    match c.count {
        Some(n) => ConceptDescriptor::exact(n + 1, c.element, c.color),
        None => {
            let n = match c.quantity {
                QuantityBand::No => 2,
                QuantityBand::Few => 8,
                QuantityBand::Many => 3,
            };
            ConceptDescriptor::exact(n, c.element, c.color)
        }
    }
}

fn other_shape(s: ShapeClass) -> ShapeClass {
    match s {
        ShapeClass::Rectangle => ShapeClass::LShaped,
        _ => ShapeClass::Rectangle,
    }
}

/// Column in which feature `f` is directly visible.
fn observable_column(f: &Feature) -> Column {
    let room_kind = f.checks.iter().any(|c| matches!(c, Check::Concept { concept } if concept.element.room_kind().is_some()));
    if room_kind {
        Column::SRE
    } else {
        Column::SE
    }
}

/// Image built to fail the `feature`-th feature of `case`, with the column
/// it should be scored in. For the plan-validity row, pass `None`.
pub fn counterexample(case: &EvalCase, feature: Option<usize>, resolution: u32) -> Result<(RasterImage, Column), EvalError> {
    let seed = derive_seed(0, &case.id, 1_000_000);
    let Some(fi) = feature else {
        let img = ground_truth_image(case, Column::SE, 0, resolution)?;
        return Ok((cut_off(&img, 0.3), Column::SE));
    };
    let f = &case.features[fi];
    if f.category == EvalCategory::OverfitCheck {
        let prompt = PromptSpec::new("").with(ConceptDescriptor::canonical(2, ElementTerm::Doors));
        let plan = synthesize_with_retries(&prompt, seed)?;
        return Ok((render(&plan, EncodingStyle::SE, resolution)?, Column::SE));
    }
    let mut prompt = case.spec.clone().ok_or_else(|| EvalError::GroundTruth("case has no prompt".into()))?;
    for ch in &f.checks {
        match ch {
            Check::Concept { concept } => {
                for c in prompt.concepts.iter_mut().filter(|c| *c == concept) {
                    *c = contradict(concept);
                }
            }
            Check::Shape { shape } => {
                if let Some(s) = prompt.shape.as_mut() {
                    s.shape = other_shape(*shape);
                }
            }
            Check::NotAPlan => {}
        }
    }
    let col = observable_column(f);
    let plan = synthesize_with_retries(&prompt, seed)?;
    Ok((render(&plan, col.decode_style(), resolution)?, col))
}

/// Moves the drawing up and left so that `frac` of its width and height
/// falls off the canvas. The freed area is white.
pub fn cut_off(img: &RasterImage, frac: f64) -> RasterImage {
    let white = ColorName::White.rgb();
    let (mut x0, mut y0, mut x1, mut y1) = (img.width, img.height, 0, 0);
    for y in 0..img.height {
        for x in 0..img.width {
            if img.get(x, y) != white {
                (x0, y0, x1, y1) = (x0.min(x), y0.min(y), x1.max(x), y1.max(y));
            }
        }
    }
    if x0 > x1 {
        return img.clone();
    }
    let dx = x0 + ((x1 - x0) as f64 * frac) as u32;
    let dy = y0 + ((y1 - y0) as f64 * frac) as u32;
    let mut out = RasterImage::filled(img.width, img.height, ColorName::White);
    for y in 0..img.height - dy {
        for x in 0..img.width - dx {
            out.set(x, y, img.get(x + dx, y + dy));
        }
    }
    out
}

/// Default resolution of ground-truth images.
pub const GROUND_TRUTH_RESOLUTION: u32 = DEFAULT_RESOLUTION;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::{DecodedOpening, ShapeOutcome, ValidityFlags};
    use crate::geometry::OpeningKind;

    fn suite() -> Vec<EvalCase> {
        build_eval_suite(&SuiteConfig::default()).unwrap()
    }

    #[test]
    fn default_suite_shape() {
        let s = suite();
        assert_eq!(s.len(), 43);
        let e = expected_experiments(&s);
        let got: Vec<u32> = EvalCategory::ALL.iter().map(|c| e[c]).collect();
        assert_eq!(got, vec![410, 20, 40, 80, 60, 120, 20, 30, 30, 30, 50]);
        let ids: std::collections::BTreeSet<_> = s.iter().map(|c| &c.id).collect();
        assert_eq!(ids.len(), 43);
        assert!(build_eval_suite(&SuiteConfig { samples: 0, ..SuiteConfig::default() }).is_err());
    }

    fn decoded_with(windows: u32, kitchens: u32) -> DecodedPlan {
        DecodedPlan {
            width: 512,
            height: 512,
            style: EncodingStyle::SRE,
            footprint: vec![],
            courtyards: 0,
            rooms: (0..kitchens)
                .map(|_| crate::decode::DecodedRoom {
                    area_px: 2000,
                    bbox: [0, 0, 1, 1],
                    centroid: [0.0, 0.0],
                    kind: Some(RoomKind::Kitchen),
                    color: Some(ColorName::Magenta),
                    confidence: 1.0,
                })
                .collect(),
            openings: (0..windows)
                .map(|_| DecodedOpening { kind: Some(OpeningKind::Window), bbox: [0; 4], color: ColorName::Blue, confidence: 1.0 })
                .collect(),
            shape_class: ShapeOutcome::Shape(ShapeClass::Square),
            validity_flags: ValidityFlags { closed_outline: true, touches_border: false, recognizable_symbology: true },
        }
    }

    #[test]
    fn predicates() {
        let many = ConceptDescriptor::fuzzy(QuantityBand::Many, ElementTerm::Windows, ColorName::Blue);
        assert!(concept_holds(&decoded_with(8, 0), EncodingStyle::SE, &many));
        assert!(!concept_holds(&decoded_with(6, 0), EncodingStyle::SE, &many));
        let two = ConceptDescriptor::canonical(2, ElementTerm::Kitchen);
        assert!(!concept_holds(&decoded_with(0, 3), EncodingStyle::SRE, &two));
        assert!(concept_holds(&decoded_with(0, 2), EncodingStyle::SRE, &two));
    }

    #[test]
    fn blank_images() {
        let s = suite();
        let blank = RasterImage::filled(512, 512, ColorName::White);
        let plan_case = s.iter().find(|c| !c.is_overfit()).unwrap();
        assert_eq!(score_image(&blank, plan_case, Column::SE).valid, Some(false));
        let face = s.iter().find(|c| c.is_overfit()).unwrap();
        let sc = score_image(&blank, face, Column::SE);
        assert_eq!(sc.features, vec![(EvalCategory::OverfitCheck, true)]);
        let sc = score_image(&face_image(512, 3), face, Column::R);
        assert_eq!(sc.features, vec![(EvalCategory::OverfitCheck, true)]);
    }

    #[test]
    fn report_formats() {
        let empty = ScoreReport::empty(&Column::ALL);
        let text = format_report(&empty, ReportFormat::Text);
        assert!(text.contains("Valid Plan"));
        assert!(text.lines().nth(2).unwrap().contains('–'));
        assert!(!text.contains('%'));
        let mut r = ScoreReport::empty(&Column::ALL);
        for i in 0..10 {
            let sc = ImageScore { case_id: "x".into(), valid: Some(i < 9), features: vec![], detail: String::new() };
            r.add(Column::SE, &sc);
        }
        let text = format_report(&r, ReportFormat::Text);
        assert!(text.lines().find(|l| l.starts_with("Valid Plan")).unwrap().contains("90%"));
        let csv = format_report(&r, ReportFormat::Csv);
        assert_eq!(parse_csv_report(&csv).unwrap(), ScoreReport { unmatched: vec![], ..r.clone() });
        let md = format_report(&r, ReportFormat::Markdown);
        assert!(md.starts_with("|  | # | B | R | SR | SE | SRE |"));
    }

    #[test]
    fn prompts_use_column_tokens() {
        let s = suite();
        let c = s.iter().find(|c| c.id == "remove-objects-no-windows-l-shaped").unwrap();
        assert_eq!(c.prompt_for(Column::SE), "flrpln-se, (l-shaped building green:1), (0 no windows blue:1)");
        assert!(c.prompt_for(Column::B).starts_with("floorplan, "));
        assert_eq!(parse_sample_name("count-rooms-2-kitchen_sample7.png"), Some(("count-rooms-2-kitchen", 7)));
        let json = suite_json(&s, &Column::ALL);
        assert!(json.contains(SUITE_SCHEMA) && json.contains(NEGATIVE_PROMPT));
        assert_eq!(parse_suite_json(&json).unwrap(), s);
    }
}
