//! Builds a plan by hand, validates it, classifies its footprint and
//! round-trips the JSON form.

use planforge::geometry::{
    adjacency_graph, classify_footprint, element_counts, from_json, to_json, validate, walls_for_rooms, DoorSwing, Footprint,
    GridPoint, Opening, OpeningKind, Orientation, RectilinearPolygon, Room, RoomKind, Side, SpanEnd, DEFAULT_GRID,
};
use planforge::FloorPlan;

fn main() {
    let outer = RectilinearPolygon::rect(10, 10, 40, 30);
    let l_shape = RectilinearPolygon::new(
        [(10, 10), (40, 10), (40, 20), (25, 20), (25, 30), (10, 30)].map(GridPoint::from_tuple).to_vec(),
    );
    for (name, poly) in [("rectangle", &outer), ("L", &l_shape)] {
        let fp = Footprint { outer: poly.clone(), holes: vec![] };
        println!("{name}: area {} reflex {} -> {:?}", poly.area(), poly.reflex_vertices().len(), classify_footprint(&[fp]));
    }

    let rooms = vec![
        Room { id: 0, boundary: RectilinearPolygon::rect(10, 10, 25, 30), kind: RoomKind::LivingRoom },
        Room { id: 1, boundary: RectilinearPolygon::rect(25, 10, 40, 30), kind: RoomKind::Kitchen },
    ];
    let openings = vec![
        // Entrance in the bottom wall of the living room.
        Opening {
            kind: OpeningKind::Door,
            wall_anchor: GridPoint::new(16, 30),
            orientation: Orientation::Horizontal,
            width: 2,
            color_override: None,
            swing: Some(DoorSwing { into: Side::Negative, hinge: SpanEnd::Start }),
        },
        // Between the two rooms.
        Opening {
            kind: OpeningKind::Door,
            wall_anchor: GridPoint::new(25, 18),
            orientation: Orientation::Vertical,
            width: 2,
            color_override: None,
            swing: Some(DoorSwing { into: Side::Positive, hinge: SpanEnd::End }),
        },
        Opening {
            kind: OpeningKind::Window,
            wall_anchor: GridPoint::new(30, 10),
            orientation: Orientation::Horizontal,
            width: 3,
            color_override: None,
            swing: None,
        },
    ];
    let plan = FloorPlan {
        grid: DEFAULT_GRID,
        footprint: vec![Footprint { outer, holes: vec![] }],
        walls: walls_for_rooms(&rooms, 1),
        rooms,
        openings,
        room_color_overrides: Default::default(),
    };
    println!("violations: {:?}", validate(&plan));
    println!("counts: {:?}", element_counts(&plan));
    println!("door-reachable from outside: {}", adjacency_graph(&plan).door_reachable().len());
    let json = to_json(&plan);
    assert_eq!(from_json(&json).expect("parses"), plan);
    println!("JSON round trip ok ({} bytes)", json.len());
}
