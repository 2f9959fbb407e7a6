//! Renders one plan in all four encoding styles and lists each image's
//! colors.
//!
//! `cargo run --example render_styles -- [out_dir]`

use std::path::PathBuf;

use planforge::geometry::{ElementTerm, RoomKind};
use planforge::render::{declared_palette, render, EncodingStyle, RasterFrame, DEFAULT_RESOLUTION};
use planforge::synth::{synthesize, CountSpec, PlanSpec};
use planforge::{ColorName, ShapeClass};

fn main() {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("planforge-render"));
    std::fs::create_dir_all(&out).expect("output dir");
    let mut spec = PlanSpec::exact(ShapeClass::CShaped, Default::default(), 11);
    spec.rooms.insert(RoomKind::Kitchen, CountSpec::Exact(1));
    spec.rooms.insert(RoomKind::Bathroom, CountSpec::Exact(2));
    spec.rooms.insert(RoomKind::LivingRoom, CountSpec::Exact(2));
    spec.doors = CountSpec::Exact(6);
    spec.windows = CountSpec::Exact(5);
    let plan = synthesize(&spec.clone().with_recolor(ElementTerm::Windows, ColorName::Green)).expect("feasible");

    let frame = RasterFrame::new(DEFAULT_RESOLUTION, plan.grid).expect("resolution");
    println!("{} px per cell, walls {} px", frame.scale, frame.wall_thickness());
    for style in EncodingStyle::ALL {
        let img = render(&plan, style, DEFAULT_RESOLUTION).expect("render");
        let path = out.join(format!("{}.png", style.name()));
        img.write_png(&path).expect("write");
        let used = img.palette_colors().expect("palette only");
        let declared = declared_palette(style, &plan);
        assert!(used.is_subset(&declared));
        println!("{:<3} {:?} -> {}", style.label(), used, path.display());
    }
    println!("64 px is too small: {}", render(&plan, EncodingStyle::SE, 64).unwrap_err());
}
