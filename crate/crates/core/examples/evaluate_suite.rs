//! Exports the evaluation suite, renders reference images for it, scores
//! them and prints the results table.
//!
//! `cargo run --release --example evaluate_suite -- [samples] [out_dir]`

use std::path::PathBuf;

use planforge::eval::{
    build_eval_suite, counterexample, expected_experiments, format_report, score_image, score_root, suite_json, write_ground_truth,
    Column, ReportFormat, SuiteConfig, GROUND_TRUTH_RESOLUTION,
};

fn main() {
    let mut args = std::env::args().skip(1);
    let samples: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let out: PathBuf = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("planforge-eval"));
    let suite = build_eval_suite(&SuiteConfig { samples, ..SuiteConfig::default() }).expect("suite");
    std::fs::create_dir_all(&out).expect("out dir");
    std::fs::write(out.join("suite.json"), suite_json(&suite, &Column::ALL)).expect("suite.json");
    println!("{} prompts, e.g. {}", suite.len(), suite[10].prompt_for(Column::SE));
    println!("experiments per column: {:?}", expected_experiments(&suite).values().collect::<Vec<_>>());

    let n = write_ground_truth(&out, &suite, &Column::ALL, GROUND_TRUTH_RESOLUTION).expect("ground truth");
    let report = score_root(&out, &suite, &Column::ALL).expect("scores");
    println!("{n} images scored\n{}", format_report(&report, ReportFormat::Text));

    let case = suite.iter().find(|c| c.features.len() == 2).expect("shape case");
    let (img, col) = counterexample(case, Some(1), GROUND_TRUTH_RESOLUTION).expect("counterexample");
    println!("counterexample for {} in {col}: {:?}", case.id, score_image(&img, case, col).features);
}
