use planforge::geometry::{element_counts, footprint_shape_class, to_json, validate, ElementTerm, RoomKind};
use planforge::synth::{synthesize, CountSpec, PlanSpec, QuantityBand, ResolvedCounts};
use planforge::{ColorName, ShapeClass};
use proptest::prelude::*;

fn feasible_spec() -> impl Strategy<Value = PlanSpec> {
    (prop::sample::select(ShapeClass::ALL.to_vec()), 0u32..=4, 0u32..=3, 0u32..=4, 0u32..=3, 0u32..=10, any::<u64>(), any::<bool>())
        .prop_map(|(shape, k, b, l, extra_doors, windows, seed, recolor)| {
            let min_rooms: u32 = if matches!(shape, ShapeClass::OShaped | ShapeClass::MultipleBuildings) { 2 } else { 1 };
            let l = l.max(min_rooms.saturating_sub(k + b));
            let counts = ResolvedCounts { kitchens: k, bathrooms: b, living_rooms: l, doors: k + b + l + extra_doors, windows };
            let spec = PlanSpec::exact(shape, counts, seed);
            if recolor {
                spec.with_recolor(ElementTerm::Doors, ColorName::Green)
            } else {
                spec
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn synthesized_plans_are_sound(spec in feasible_spec()) {
        let want = spec.resolve();
        let plan = synthesize(&spec).map_err(|e| TestCaseError::fail(format!("{e} for {spec:?}")))?;
        prop_assert_eq!(validate(&plan), vec![]);
        let got = element_counts(&plan);
        prop_assert_eq!(
            (got.kitchens, got.bathrooms, got.living_rooms, got.doors, got.windows),
            (want.kitchens, want.bathrooms, want.living_rooms, want.doors, want.windows)
        );
        prop_assert_eq!(footprint_shape_class(&plan).unwrap(), spec.shape);
        if spec.recolor.is_some() {
            prop_assert!(plan.openings.iter().filter(|o| o.kind == planforge::geometry::OpeningKind::Door).all(|o| o.color_override == Some(ColorName::Green)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn synthesis_is_deterministic(spec in feasible_spec()) {
        prop_assert_eq!(to_json(&synthesize(&spec).unwrap()), to_json(&synthesize(&spec).unwrap()));
    }

    #[test]
    fn band_resolution_stays_in_range(seed in any::<u64>(), band in prop::sample::select(QuantityBand::ALL.to_vec())) {
        let mut spec = PlanSpec::exact(ShapeClass::Square, ResolvedCounts::default(), seed);
        for k in RoomKind::ALL {
            spec.rooms.insert(k, CountSpec::Band(band));
        }
        spec.doors = CountSpec::Band(band);
        spec.windows = CountSpec::Band(band);
        let r = spec.resolve();
        let (lo, hi) = band.range();
        for n in [r.kitchens, r.bathrooms, r.living_rooms, r.doors, r.windows] {
            prop_assert!((lo..=hi).contains(&n));
        }
        match band {
            QuantityBand::No => prop_assert_eq!((lo, hi), (0, 0)),
            QuantityBand::Few => prop_assert_eq!((lo, hi), (1, 6)),
            QuantityBand::Many => prop_assert_eq!((lo, hi), (7, 12)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fewer_windows_stay_feasible(spec in feasible_spec(), extra in 0u32..=30) {
        let mut spec = spec;
        let CountSpec::Exact(w) = spec.windows else { unreachable!() };
        spec.windows = CountSpec::Exact(w + extra);
        if synthesize(&spec).is_ok() {
            for fewer in (0..w + extra).step_by(3) {
                spec.windows = CountSpec::Exact(fewer);
                prop_assert!(synthesize(&spec).is_ok(), "{} windows failed", fewer);
            }
        }
    }
}
