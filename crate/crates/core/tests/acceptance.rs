//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use planforge::dataset::{build_training_corpus, verify_style_dir, Category, CorpusRecipe, Manifest};
use planforge::decode::decode;
use planforge::eval::{
    build_eval_suite, counterexample, format_report, score_image, score_root, write_ground_truth, Column, EvalCategory, ReportFormat,
    SuiteConfig,
};
use planforge::geometry::{element_counts, footprint_shape_class, ElementTerm};
use planforge::prompt::{parse, serialize, style_token, ConceptDescriptor, PromptSpec, ShapeConcept, BASELINE_TOKEN};
use planforge::render::{declared_palette, render, EncodingStyle, RasterImage};
use planforge::rng::{derive_seed, rng_from_seed};
use planforge::synth::{synthesize, PlanSpec, QuantityBand, ResolvedCounts};
use planforge::{ColorName, FloorPlan, ShapeClass};
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;

const SEED: u64 = 42;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

struct Corpora {
    dir: tempfile::TempDir,
    manifests: BTreeMap<EncodingStyle, Manifest>,
    times: BTreeMap<EncodingStyle, Duration>,
}

fn build_corpora() -> Corpora {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut manifests = BTreeMap::new();
    let mut times = BTreeMap::new();
    for style in EncodingStyle::ALL {
        let t = Instant::now();
        let m = build_training_corpus(style, &CorpusRecipe::with_seed(SEED), dir.path()).expect("corpus builds");
        times.insert(style, t.elapsed());
        manifests.insert(style, m);
    }
    Corpora { dir, manifests, times }
}

fn corpus_composition(c: &Corpora) -> Outcome {
    let expected = [
        (Category::Cards, 13),
        (Category::Recolor, 50),
        (Category::Shapes, 60),
        (Category::Negation, 50),
        (Category::Bands, 100),
        (Category::Counts, 150),
    ];
    for (style, m) in &c.manifests {
        let counts = m.category_counts();
        for (cat, n) in expected {
            check(counts.get(&cat).copied().unwrap_or(0) == n, format!("{style:?} {cat:?}: {:?} != {n}", counts.get(&cat)))?;
        }
        check(m.records.len() == 423, format!("{style:?}: {} records", m.records.len()))?;
        // Plan buckets hold ten images each.
        let mut per_tag: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &m.records {
            *per_tag.entry(r.tag.as_str()).or_default() += 1;
        }
        let bad: Vec<_> = per_tag.iter().filter(|(t, &n)| !t.starts_with("cards/") && n != 10).collect();
        check(bad.is_empty(), format!("{style:?}: buckets without 10 images: {bad:?}"))?;
        let cards: usize = per_tag.iter().filter(|(t, _)| t.starts_with("cards/")).map(|(_, n)| n).sum();
        check(cards == 13, format!("{style:?}: {cards} cards"))?;
        let t = c.times[style];
        check(t < Duration::from_secs(60), format!("{style:?} took {t:.1?}"))?;
    }
    let times: Vec<String> = c.times.iter().map(|(s, t)| format!("{}={:.1}s", s.label(), t.as_secs_f64())).collect();
    Ok(format!("4 styles x 423 items (13 cards, 41 buckets of 10); build {}", times.join(" ")))
}

fn determinism(c: &Corpora) -> Outcome {
    let again = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut mismatches = 0usize;
    let mut hashes = 0usize;
    for (style, m) in &c.manifests {
        let m2 = build_training_corpus(*style, &CorpusRecipe::with_seed(m.master_seed), again.path()).map_err(|e| e.to_string())?;
        for (a, b) in m.records.iter().zip(&m2.records) {
            hashes += 2;
            mismatches += (a.png_sha256 != b.png_sha256) as usize + (a.txt_sha256 != b.txt_sha256) as usize;
            mismatches += (a.image != b.image) as usize;
        }
        mismatches += m.records.len().abs_diff(m2.records.len());
        for root in [c.dir.path(), again.path()] {
            let r = verify_style_dir(&root.join(style.name())).map_err(|e| e.to_string())?;
            mismatches += r.missing.len() + r.mismatched.len() + r.extra.len();
        }
    }
    check(mismatches == 0, format!("{mismatches} mismatches"))?;
    Ok(format!("{hashes} content hashes reproduced, 0 mismatches; both trees verify clean"))
}

fn random_prompt(rng: &mut planforge::rng::PlanRng) -> PromptSpec {
    let tokens: Vec<&str> = EncodingStyle::ALL.iter().map(|&s| style_token(s)).chain([BASELINE_TOKEN]).collect();
    let mut p = PromptSpec::new(*tokens.choose(rng).expect("tokens"));
    if rng.random_bool(0.5) {
        p.shape = Some(ShapeConcept {
            shape: *ShapeClass::ALL.choose(rng).expect("shapes"),
            color: *ColorName::ALL.choose(rng).expect("colors"),
        });
    }
    for _ in 0..rng.random_range(0..=6) {
        let element = *ElementTerm::ALL.choose(rng).expect("elements");
        let color = *ColorName::ALL.choose(rng).expect("colors");
        p.concepts.push(if rng.random_bool(0.7) {
            ConceptDescriptor::exact(rng.random_range(0..=30), element, color)
        } else {
            ConceptDescriptor::fuzzy(*QuantityBand::ALL.choose(rng).expect("bands"), element, color)
        });
    }
    p
}

fn grammar_round_trip() -> Outcome {
    let mut rng = rng_from_seed(derive_seed(SEED, "grammar", 0));
    let mut failures = 0;
    for _ in 0..10_000 {
        let p = random_prompt(&mut rng);
        if parse(&serialize(&p)).ok().as_ref() != Some(&p) {
            failures += 1;
        }
    }
    check(failures == 0, format!("{failures} round-trip failures"))?;
    for n in 0..=1000u32 {
        let want = match n {
            0 => QuantityBand::No,
            1..=6 => QuantityBand::Few,
            _ => QuantityBand::Many,
        };
        check(QuantityBand::of_count(n) == want, format!("quantity word of {n}"))?;
    }
    Ok("10000 specs, 0 failures; 0->no, 1-6->few, >=7->many".into())
}

fn round_trip_plan(seed: u64) -> FloorPlan {
    let mut attempt = 0;
    loop {
        let mut rng = rng_from_seed(derive_seed(seed, "decoder-plan", attempt));
        let shape = ShapeClass::ALL[(seed % 6) as usize];
        let min = if matches!(shape, ShapeClass::OShaped | ShapeClass::MultipleBuildings) { 2 } else { 1 };
        let k = rng.random_range(0..=3);
        let b = rng.random_range(0..=3);
        let l = rng.random_range(0..=3u32).max(min - (k + b).min(min));
        let rooms = k + b + l;
        let counts = ResolvedCounts { kitchens: k, bathrooms: b, living_rooms: l, doors: rooms + rng.random_range(0..=3), windows: rng.random_range(0..=12) };
        if let Ok(p) = synthesize(&PlanSpec::exact(shape, counts, derive_seed(seed, "decoder-spec", attempt))) {
            return p;
        }
        attempt += 1;
    }
}

fn decoder_round_trip() -> Outcome {
    let t = Instant::now();
    let plans: Vec<(u64, FloorPlan)> = (0..500u64).into_par_iter().map(|s| (s, round_trip_plan(s))).collect();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for style in EncodingStyle::ALL {
        let misses: Vec<u64> = plans
            .par_iter()
            .filter_map(|(seed, plan)| {
                let truth = element_counts(plan);
                let shape = footprint_shape_class(plan).ok();
                let ok = match decode(&render(plan, style, 512).ok()?, style) {
                    Ok(d) => {
                        let c = d.counts();
                        let kinds = if style.room_fill() {
                            (c.kitchens, c.bathrooms, c.living_rooms, c.unknown_rooms) == (truth.kitchens, truth.bathrooms, truth.living_rooms, 0)
                        } else {
                            c.rooms() == truth.total_rooms()
                        };
                        c.doors == truth.doors && c.windows == truth.windows && kinds && d.shape_class.shape() == shape
                    }
                    Err(_) => false,
                };
                (!ok).then_some(*seed)
            })
            .collect();
        let rate = 1.0 - misses.len() as f64 / plans.len() as f64;
        let need = if matches!(style, EncodingStyle::SE | EncodingStyle::SRE) { 0.99 } else { 0.95 };
        if !misses.is_empty() {
            println!("  decoder misses {}: seeds {:?}", style.label(), misses);
        }
        if rate < need {
            failed.push(format!("{} {:.1}% < {:.0}%", style.label(), rate * 100.0, need * 100.0));
        }
        lines.push(format!("{} {:.1}%", style.label(), rate * 100.0));
    }
    let elapsed = t.elapsed();
    check(failed.is_empty(), failed.join(", "))?;
    check(elapsed < Duration::from_secs(300), format!("took {elapsed:.1?}"))?;
    Ok(format!("500 plans/style exact: {}; {:.0}s", lines.join(", "), elapsed.as_secs_f64()))
}

struct Protocol {
    report: planforge::eval::ScoreReport,
    images: u32,
    elapsed: Duration,
    counterexample_failures: Vec<String>,
}

fn run_protocol(dir: &Path) -> Protocol {
    let t = Instant::now();
    let suite = build_eval_suite(&SuiteConfig::default()).expect("suite");
    let images = write_ground_truth(dir, &suite, &Column::ALL, 512).expect("ground truth");
    let report = score_root(dir, &suite, &Column::ALL).expect("scoring");
    let mut counterexample_failures = Vec::new();
    for case in &suite {
        let targets = (0..case.features.len()).map(Some).chain((!case.is_overfit()).then_some(None));
        for fi in targets {
            let (img, col) = counterexample(case, fi, 512).expect("counterexample");
            let s = score_image(&img, case, col);
            let scored_zero = match fi {
                Some(i) => !s.features[i].1,
                None => s.valid == Some(false),
            };
            if !scored_zero {
                counterexample_failures.push(format!("{}#{fi:?}", case.id));
            }
        }
    }
    Protocol { report, images, elapsed: t.elapsed(), counterexample_failures }
}

fn self_consistency(p: &Protocol) -> Outcome {
    let mut bad = Vec::new();
    for cat in EvalCategory::ALL {
        for col in Column::ALL {
            let c = p.report.cell(cat, col);
            if c.experiments == 0 || c.successes != c.experiments {
                bad.push(format!("{} {col}: {}/{}", cat.label(), c.successes, c.experiments));
            }
        }
    }
    check(bad.is_empty(), format!("not 100%: {}", bad.join("; ")))?;
    check(p.counterexample_failures.is_empty(), format!("counterexamples not scoring 0: {:?}", p.counterexample_failures))?;
    Ok("ground truth 100% in all 11 rows x 5 columns; every counterexample scores 0 on its predicate".into())
}

fn protocol_scale(p: &Protocol) -> Outcome {
    check(p.images == 2150 && p.report.images == 2150, format!("{} images written, {} scored", p.images, p.report.images))?;
    check(p.report.total_experiments() == 2150, format!("{} experiments", p.report.total_experiments()))?;
    let md = format_report(&p.report, ReportFormat::Markdown);
    let rows: Vec<(String, String)> = md
        .lines()
        .skip(2)
        .map(|l| {
            let f: Vec<&str> = l.trim_matches('|').split('|').map(str::trim).collect();
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    let want = [
        ("Valid Plan", "410"),
        ("Not Overfitted", "20"),
        ("Quantify Obj.", "40"),
        ("Quantify Rooms", "80"),
        ("Count of Obj.", "60"),
        ("Count of Rooms", "120"),
        ("Remove Obj.", "20"),
        ("Remove Room", "30"),
        ("Recoloured Obj.", "30"),
        ("Recolour Room", "30"),
        ("Arrange Rooms", "50"),
    ];
    let want: Vec<(String, String)> = want.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    check(rows == want, format!("rows {rows:?}"))?;
    let header = md.lines().next().unwrap_or_default();
    check(header.contains("| B | R | SR | SE | SRE |"), format!("header {header}"))?;
    Ok(format!(
        "43 prompts x 10 samples x 5 columns = 2150 experiments; rows and # column 410/20/40/80/60/120/20/30/30/30/50; render+score {:.0}s",
        p.elapsed.as_secs_f64()
    ))
}

fn color_discipline(c: &Corpora) -> Outcome {
    let mut max_colors: BTreeMap<EncodingStyle, usize> = BTreeMap::new();
    let mut scanned = 0usize;
    for (style, m) in &c.manifests {
        let root = c.dir.path().join(style.name());
        let results: Vec<Result<usize, String>> = m
            .records
            .par_iter()
            .map(|r| {
                let img = RasterImage::read(&root.join(&r.image)).map_err(|e| e.to_string())?;
                let used = img.palette_colors().map_err(|rgb| format!("{}: off-palette pixel {rgb:?}", r.image))?;
                let plan = r.source.plan().map_err(|e| e.to_string())?;
                let declared = declared_palette(*style, &plan);
                if !used.is_subset(&declared) {
                    return Err(format!("{} {}: {used:?} not within {declared:?}", style.label(), r.image));
                }
                Ok(used.len())
            })
            .collect();
        for r in results {
            let n = r?;
            scanned += 1;
            let e = max_colors.entry(*style).or_default();
            *e = (*e).max(n);
        }
    }
    check(max_colors[&EncodingStyle::SE] <= 4, format!("SE uses {} colors", max_colors[&EncodingStyle::SE]))?;
    let summary: Vec<String> = max_colors.iter().map(|(s, n)| format!("{} {n}", s.label())).collect();
    Ok(format!("{scanned} images within their declared palettes; max colors {}", summary.join(", ")))
}

fn robustness() -> Outcome {
    let mut changed = Vec::new();
    for i in 0..100u64 {
        let plan = round_trip_plan(10_000 + i);
        let style = EncodingStyle::ALL[(i % 4) as usize];
        let clean = render(&plan, style, 512).map_err(|e| e.to_string())?;
        let mut noisy = clean.clone();
        let mut rng = rng_from_seed(derive_seed(SEED, "noise", i));
        for p in noisy.pixels.iter_mut() {
            *p = (*p as i32 + rng.random_range(-10..=10)).clamp(0, 255) as u8;
        }
        let a = decode(&clean, style).map(|d| (d.counts(), d.shape_class.shape()));
        let b = decode(&noisy, style).map(|d| (d.counts(), d.shape_class.shape()));
        if a.is_err() || a != b {
            changed.push(i);
        }
    }
    check(changed.is_empty(), format!("counts changed for samples {changed:?}"))?;
    Ok("100 renders with uniform RGB noise of amplitude 10: counts and shape unchanged".into())
}

fn run(n: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let secs = t.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("PASS [{n}] {name}: {detail} ({secs:.1}s)");
            true
        }
        Err(detail) => {
            println!("FAIL [{n}] {name}: {detail} ({secs:.1}s)");
            false
        }
    }
}

fn main() {
    let corpora = build_corpora();
    let gt_dir = tempfile::tempdir().expect("tempdir");
    let mut ok = true;
    ok &= run(1, "corpus composition", || corpus_composition(&corpora));
    ok &= run(2, "determinism", || determinism(&corpora));
    ok &= run(3, "grammar round-trip", grammar_round_trip);
    ok &= run(4, "decoder round-trip", decoder_round_trip);
    let protocol = catch_unwind(AssertUnwindSafe(|| run_protocol(gt_dir.path())));
    match &protocol {
        Ok(p) => {
            ok &= run(5, "evaluator self-consistency", || self_consistency(p));
            ok &= run(6, "protocol-scale reproduction", || protocol_scale(p));
        }
        Err(_) => {
            ok &= run(5, "evaluator self-consistency", || Err("protocol run panicked".into()));
            ok &= run(6, "protocol-scale reproduction", || Err("protocol run panicked".into()));
        }
    }
    ok &= run(7, "color discipline", || color_discipline(&corpora));
    ok &= run(8, "robustness", robustness);
    println!("{}", if ok { "acceptance: all criteria pass" } else { "acceptance: FAILURES" });
    if !ok {
        std::process::exit(1);
    }
}
