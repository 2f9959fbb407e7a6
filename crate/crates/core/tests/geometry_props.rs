use planforge::geometry::{
    classify_footprint, element_counts, footprint_shape_class, from_json, to_json, validate, Footprint, GridPoint, OpeningKind,
    RectilinearPolygon, Violation,
};
use planforge::synth::{synthesize, PlanSpec, ResolvedCounts};
use planforge::{FloorPlan, ShapeClass};
use proptest::prelude::*;

fn plan(shape: ShapeClass, seed: u64) -> FloorPlan {
    let counts = ResolvedCounts { kitchens: 1, bathrooms: 1, living_rooms: 2, doors: 5, windows: 4 };
    synthesize(&PlanSpec::exact(shape, counts, seed)).expect("feasible")
}

fn map_poly(p: &RectilinearPolygon, f: impl Fn(GridPoint) -> GridPoint) -> RectilinearPolygon {
    RectilinearPolygon::new(p.vertices.iter().copied().map(f).collect())
}

fn map_footprint(fp: &[Footprint], f: impl Fn(GridPoint) -> GridPoint + Copy) -> Vec<Footprint> {
    fp.iter().map(|c| Footprint { outer: map_poly(&c.outer, f), holes: c.holes.iter().map(|h| map_poly(h, f)).collect() }).collect()
}

fn shape_strategy() -> impl Strategy<Value = ShapeClass> {
    prop::sample::select(ShapeClass::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn shape_class_survives_translation_and_scaling(shape in shape_strategy(), seed in any::<u64>(), dx in -3i32..=3, dy in -3i32..=3, k in 1i32..=3) {
        let p = plan(shape, seed);
        let base = footprint_shape_class(&p).unwrap();
        prop_assert_eq!(base, shape);
        let moved = map_footprint(&p.footprint, |v| GridPoint::new(v.x + dx, v.y + dy));
        prop_assert_eq!(classify_footprint(&moved).unwrap(), base);
        let scaled = map_footprint(&p.footprint, |v| GridPoint::new(v.x * k, v.y * k));
        prop_assert_eq!(classify_footprint(&scaled).unwrap(), base);
    }

    #[test]
    fn counts_survive_json(shape in shape_strategy(), seed in any::<u64>()) {
        let p = plan(shape, seed);
        let back = from_json(&to_json(&p)).unwrap();
        prop_assert_eq!(element_counts(&back), element_counts(&p));
        prop_assert_eq!(to_json(&back), to_json(&p));
    }

    #[test]
    fn zero_width_opening_is_the_only_violation(seed in any::<u64>()) {
        let mut p = plan(ShapeClass::Rectangle, seed);
        let i = p.openings.iter().position(|o| o.kind == OpeningKind::Window).unwrap();
        p.openings[i].width = 0;
        prop_assert_eq!(validate(&p), vec![Violation::OpeningWidthZero { opening: i }]);
    }

    #[test]
    fn duplicated_opening_is_the_only_violation(seed in any::<u64>()) {
        let mut p = plan(ShapeClass::Square, seed);
        let i = p.openings.iter().position(|o| o.kind == OpeningKind::Window).unwrap();
        p.openings.push(p.openings[i].clone());
        let n = p.openings.len() - 1;
        prop_assert_eq!(validate(&p), vec![Violation::OpeningsOverlap { a: i, b: n }]);
    }

    #[test]
    fn room_pushed_outside_is_reported(seed in any::<u64>()) {
        let mut p = plan(ShapeClass::LShaped, seed);
        let last = p.rooms.len() - 1;
        let id = p.rooms[last].id;
        p.rooms[last].boundary = map_poly(&p.rooms[last].boundary, |v| GridPoint::new(v.x + 200, v.y));
        let expected = Violation::RoomOutsideFootprint { room: id };
        prop_assert!(validate(&p).contains(&expected));
    }
}

#[test]
fn removed_door_leaves_room_unreachable() {
    // Two rooms, two doors: either door is a bridge of the door graph.
    let counts = ResolvedCounts { kitchens: 1, bathrooms: 1, living_rooms: 0, doors: 2, windows: 1 };
    for seed in 0..20 {
        let mut p = synthesize(&PlanSpec::exact(ShapeClass::Rectangle, counts, seed)).unwrap();
        assert!(validate(&p).is_empty());
        let doors: Vec<usize> = p.openings.iter().enumerate().filter(|(_, o)| o.kind == OpeningKind::Door).map(|(i, _)| i).collect();
        p.openings.remove(doors[0]);
        let v = validate(&p);
        assert!(!v.is_empty() && v.iter().all(|x| matches!(x, Violation::RoomUnreachable { .. })), "seed {seed}: {v:?}");
    }
}
