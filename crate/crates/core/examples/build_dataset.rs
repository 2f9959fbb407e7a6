//! Builds the default training corpus for one style, audits it against the
//! manifest and shows a tampered file being caught.
//!
//! `cargo run --release --example build_dataset -- [style] [out_dir]`

use std::path::PathBuf;

use planforge::dataset::{build_training_corpus, verify_style_dir, CorpusRecipe};
use planforge::render::EncodingStyle;

fn main() {
    let mut args = std::env::args().skip(1);
    let style: EncodingStyle = args.next().map(|s| s.parse().expect("style")).unwrap_or(EncodingStyle::SE);
    let out: PathBuf = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("planforge-dataset"));
    let recipe = CorpusRecipe::with_seed(42);
    let t = std::time::Instant::now();
    let manifest = build_training_corpus(style, &recipe, &out).expect("corpus");
    println!("{} items in {:.1?} under {}", manifest.records.len(), t.elapsed(), out.join(style.name()).display());
    for (cat, n) in manifest.category_counts() {
        println!("  {:<9} {n}", cat.dir());
    }
    let first = &manifest.records[0];
    println!("first: {} {:?} {}", first.image, first.tag, first.prompt);

    let dir = out.join(style.name());
    println!("verify: clean = {}", verify_style_dir(&dir).expect("manifest").is_clean());
    let victim = dir.join(&manifest.records[5].prompt_file);
    let original = std::fs::read(&victim).expect("prompt file");
    std::fs::write(&victim, b"tampered").expect("write");
    println!("after tampering: {:?}", verify_style_dir(&dir).expect("manifest").mismatched);
    std::fs::write(&victim, original).expect("restore");
}
