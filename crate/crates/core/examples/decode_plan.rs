//! Renders plans, decodes the rasters back and compares element counts,
//! then decodes a noisy copy.
//!
//! `cargo run --release --example decode_plan -- [image.png style]`

use planforge::decode::decode;
use planforge::geometry::{element_counts, footprint_shape_class};
use planforge::render::{render, EncodingStyle, RasterImage};
use planforge::rng::rng_from_seed;
use planforge::synth::{synthesize, PlanSpec, ResolvedCounts};
use planforge::ShapeClass;
use rand::Rng;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [path, style] = &args[..] {
        let img = RasterImage::read(path.as_ref()).expect("readable image");
        match decode(&img, style.parse().expect("style")) {
            Ok(d) => println!("{}", d.to_json()),
            Err(e) => println!("{e}"),
        }
        return;
    }
    let counts = ResolvedCounts { kitchens: 1, bathrooms: 2, living_rooms: 1, doors: 5, windows: 6 };
    let plan = synthesize(&PlanSpec::exact(ShapeClass::LShaped, counts, 21)).expect("feasible");
    println!("truth   {:?} {:?}", element_counts(&plan), footprint_shape_class(&plan));
    for style in EncodingStyle::ALL {
        let img = render(&plan, style, 512).expect("render");
        let d = decode(&img, style).expect("decodes");
        println!("{:<3}     {:?} {:?} valid {:?}", style.label(), d.counts(), d.shape_class.shape(), d.validity_flags);
    }

    let mut noisy = render(&plan, EncodingStyle::SE, 512).expect("render");
    let mut rng = rng_from_seed(1);
    for p in noisy.pixels.iter_mut() {
        *p = (*p as i32 + rng.random_range(-10..=10)).clamp(0, 255) as u8;
    }
    println!("noisy   {:?}", decode(&noisy, EncodingStyle::SE).expect("decodes").counts());
    let blank = RasterImage::filled(512, 512, planforge::ColorName::White);
    println!("blank   {}", decode(&blank, EncodingStyle::SE).unwrap_err());
}
