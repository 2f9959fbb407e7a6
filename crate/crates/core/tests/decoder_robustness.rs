use planforge::decode::mask::label_components;
use planforge::decode::{decode, quantize, DecodeError};
use planforge::eval::cut_off;
use planforge::geometry::{element_counts, footprint_shape_class};
use planforge::render::{render, EncodingStyle, RasterImage};
use planforge::rng::rng_from_seed;
use planforge::synth::{synthesize, PlanSpec, ResolvedCounts};
use planforge::{ColorName, FloorPlan, ShapeClass};
use rand::Rng;

fn plan(i: u64) -> FloorPlan {
    let mut rng = rng_from_seed(i);
    let shape = ShapeClass::ALL[(i % 6) as usize];
    let (k, b, l) = (rng.random_range(0..=2), rng.random_range(0..=2), rng.random_range(2..=3));
    let counts = ResolvedCounts { kitchens: k, bathrooms: b, living_rooms: l, doors: k + b + l + rng.random_range(0..=2), windows: rng.random_range(0..=8) };
    synthesize(&PlanSpec::exact(shape, counts, i)).unwrap()
}

fn add_noise(img: &RasterImage, amplitude: i32, seed: u64) -> RasterImage {
    let mut out = img.clone();
    let mut rng = rng_from_seed(seed);
    for p in out.pixels.iter_mut() {
        *p = (*p as i32 + rng.random_range(-amplitude..=amplitude)).clamp(0, 255) as u8;
    }
    out
}

#[test]
fn exact_round_trip_on_a_sample() {
    for i in 0..24 {
        let p = plan(i);
        let truth = element_counts(&p);
        for style in EncodingStyle::ALL {
            let d = decode(&render(&p, style, 512).unwrap(), style).unwrap();
            let c = d.counts();
            assert_eq!((c.doors, c.windows, c.rooms()), (truth.doors, truth.windows, truth.total_rooms()), "plan {i} {style:?}");
            if style.room_fill() {
                assert_eq!((c.kitchens, c.bathrooms, c.living_rooms), (truth.kitchens, truth.bathrooms, truth.living_rooms));
            }
            assert_eq!(d.shape_class.shape(), footprint_shape_class(&p).ok(), "plan {i} {style:?}");
        }
    }
}

#[test]
fn noise_does_not_change_counts() {
    for i in 0..12 {
        let p = plan(100 + i);
        for style in EncodingStyle::ALL {
            let clean = render(&p, style, 512).unwrap();
            let a = decode(&clean, style).unwrap();
            let b = decode(&add_noise(&clean, 10, i), style).unwrap();
            assert_eq!(a.counts(), b.counts(), "plan {i} {style:?}");
            assert_eq!(a.shape_class, b.shape_class);
        }
    }
}

#[test]
fn rooms_never_exceed_interior_components() {
    for i in 0..12 {
        let p = plan(200 + i);
        for style in EncodingStyle::ALL {
            let img = render(&p, style, 512).unwrap();
            let q = quantize(&img);
            let black = ColorName::Black.index() as u8;
            let comps = label_components(q.width, q.height, &q.labels, |l| l != black, false);
            let interior = comps.stats.iter().filter(|s| !s.touches_border).count();
            assert!(decode(&img, style).unwrap().rooms.len() <= interior);
        }
    }
}

#[test]
fn cut_plans_touch_the_border() {
    for i in 0..6 {
        let img = render(&plan(300 + i), EncodingStyle::SE, 512).unwrap();
        let d = decode(&cut_off(&img, 0.3), EncodingStyle::SE).unwrap();
        assert!(d.validity_flags.touches_border, "plan {i}");
        assert!(!decode(&img, EncodingStyle::SE).unwrap().validity_flags.touches_border);
    }
}

#[test]
fn non_plans_are_rejected() {
    let blank = RasterImage::filled(512, 512, ColorName::White);
    assert!(matches!(decode(&blank, EncodingStyle::R), Err(DecodeError::NotAPlan { .. })));
    let wide = RasterImage::filled(512, 256, ColorName::White);
    assert!(matches!(decode(&wide, EncodingStyle::R), Err(DecodeError::BadImageSize { .. })));
    let tiny = RasterImage::filled(64, 64, ColorName::Black);
    assert!(matches!(decode(&tiny, EncodingStyle::R), Err(DecodeError::BadImageSize { .. })));
}

#[test]
fn png_round_trip_preserves_decoding() {
    let p = plan(400);
    let img = render(&p, EncodingStyle::SRE, 512).unwrap();
    let back = RasterImage::from_encoded(&img.to_png().unwrap()).unwrap();
    assert_eq!(back, img);
    assert_eq!(decode(&back, EncodingStyle::SRE).unwrap().counts(), decode(&img, EncodingStyle::SRE).unwrap().counts());
}
