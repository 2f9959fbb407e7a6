//! Synthesizes plans for every footprint class from a spec with bands.
//!
//! `cargo run --example synthesize_plan -- [seed]`

use planforge::geometry::{element_counts, footprint_shape_class, validate, RoomKind};
use planforge::synth::{synthesize, CountSpec, PlanSpec, QuantityBand};
use planforge::ShapeClass;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    for shape in ShapeClass::ALL {
        let mut spec = PlanSpec::exact(shape, Default::default(), seed);
        spec.rooms.insert(RoomKind::Kitchen, CountSpec::Exact(1));
        spec.rooms.insert(RoomKind::Bathroom, CountSpec::Exact(1));
        spec.rooms.insert(RoomKind::LivingRoom, CountSpec::Band(QuantityBand::Few));
        spec.doors = CountSpec::Band(QuantityBand::Few);
        spec.windows = CountSpec::Band(QuantityBand::Many);
        let resolved = spec.resolve();
        let plan = synthesize(&spec).expect("feasible spec");
        assert!(validate(&plan).is_empty());
        println!(
            "{:<18} resolved {:?}\n{:<18} got {:?}, classified {:?}",
            shape.word(),
            resolved,
            "",
            element_counts(&plan),
            footprint_shape_class(&plan)
        );
    }

    let mut impossible = PlanSpec::exact(ShapeClass::Square, Default::default(), seed);
    impossible.rooms.insert(RoomKind::Kitchen, CountSpec::Exact(2));
    impossible.windows = CountSpec::Exact(400);
    println!("400 windows: {}", synthesize(&impossible).unwrap_err());
    println!("spec JSON:\n{}", impossible.to_json());
}
