use std::fs;

use planforge::eval::{
    build_eval_suite, counterexample, expected_experiments, format_report, ground_truth_image, parse_csv_report, sample_name,
    score_directory, score_image, Column, EvalCategory, EvalError, Mapping, ReportFormat, SuiteConfig,
};

fn suite(samples: u32) -> Vec<planforge::eval::EvalCase> {
    build_eval_suite(&SuiteConfig { samples, ..SuiteConfig::default() }).unwrap()
}

#[test]
fn every_counterexample_fails_its_predicate() {
    for case in suite(1) {
        for fi in 0..case.features.len() {
            let (img, col) = counterexample(&case, Some(fi), 512).unwrap();
            let s = score_image(&img, &case, col);
            assert!(!s.features[fi].1, "{} feature {fi}: {}", case.id, s.detail);
        }
        if !case.is_overfit() {
            let (img, col) = counterexample(&case, None, 512).unwrap();
            assert_eq!(score_image(&img, &case, col).valid, Some(false), "{}", case.id);
        }
    }
}

#[test]
fn directory_scoring_conserves_images() {
    let s = suite(1);
    let dir = tempfile::tempdir().unwrap();
    let picked: Vec<_> = s.iter().step_by(4).collect();
    for case in &picked {
        ground_truth_image(case, Column::SR, 0, 512).unwrap().write_png(&dir.path().join(sample_name(&case.id, 0))).unwrap();
    }
    fs::write(dir.path().join("stray_sample0.png"), b"x").unwrap();
    fs::write(dir.path().join("notes.txt"), b"x").unwrap();
    let r = score_directory(dir.path(), &s, Column::SR, &Mapping::FileNames).unwrap();
    assert_eq!(r.images as usize, picked.len());
    assert_eq!(r.total_experiments(), r.images);
    assert_eq!(r.unmatched, vec!["stray_sample0.png".to_string()]);
    for cat in EvalCategory::ALL {
        let c = r.cell(cat, Column::SR);
        assert_eq!(c.successes, c.experiments, "{cat:?}");
    }
    let csv = format_report(&r, ReportFormat::Csv);
    let back = parse_csv_report(&csv).unwrap();
    assert_eq!(format_report(&back, ReportFormat::Csv), csv);
}

#[test]
fn sidecar_mapping_must_be_complete() {
    let s = suite(1);
    let dir = tempfile::tempdir().unwrap();
    let case = &s[5];
    ground_truth_image(case, Column::SE, 0, 512).unwrap().write_png(&dir.path().join("a.png")).unwrap();
    let map = dir.path().join("map.json");
    fs::write(&map, format!(r#"{{"a.png": "{}"}}"#, case.id)).unwrap();
    let r = score_directory(dir.path(), &s, Column::SE, &Mapping::Sidecar(map.clone())).unwrap();
    assert_eq!(r.images, 1);
    fs::write(&map, format!(r#"{{"a.png": "{}", "b.png": "{}"}}"#, case.id, case.id)).unwrap();
    assert!(matches!(score_directory(dir.path(), &s, Column::SE, &Mapping::Sidecar(map.clone())), Err(EvalError::MappingIncomplete(_))));
    fs::write(&map, r#"{"a.png": "no-such-case"}"#).unwrap();
    assert!(matches!(score_directory(dir.path(), &s, Column::SE, &Mapping::Sidecar(map)), Err(EvalError::MappingIncomplete(_))));
}

#[test]
fn unreadable_images_are_errors() {
    let s = suite(1);
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(sample_name(&s[3].id, 0)), b"not a png").unwrap();
    assert!(matches!(score_directory(dir.path(), &s, Column::R, &Mapping::FileNames), Err(EvalError::ImageUnreadable(_))));
}

#[test]
fn custom_counts_resize_the_suite() {
    let s = build_eval_suite(&SuiteConfig { samples: 3, count_values: vec![3], ..SuiteConfig::default() }).unwrap();
    let e = expected_experiments(&s);
    assert_eq!(e[&EvalCategory::CountObjects], 2 * 3);
    assert_eq!(e[&EvalCategory::CountRooms], 4 * 3);
    assert!(build_eval_suite(&SuiteConfig { count_values: vec![13], ..SuiteConfig::default() }).is_err());
}
