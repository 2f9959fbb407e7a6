//! Serializes and parses prompts, including the training prompt of a plan.

use planforge::geometry::ElementTerm;
use planforge::prompt::{parse, prompt_for_card, prompt_for_plan, serialize, style_token, ConceptDescriptor, PromptSpec};
use planforge::render::EncodingStyle;
use planforge::synth::{synthesize, PlanSpec, QuantityBand, ResolvedCounts};
use planforge::{ColorName, ShapeClass};

fn main() {
    let spec = PromptSpec::new(style_token(EncodingStyle::SE))
        .with_shape(ShapeClass::OShaped)
        .with(ConceptDescriptor::canonical(3, ElementTerm::Doors))
        .with(ConceptDescriptor::fuzzy(QuantityBand::Many, ElementTerm::Windows, ColorName::Blue))
        .with(ConceptDescriptor::exact(0, ElementTerm::Kitchen, ColorName::Magenta));
    let text = serialize(&spec);
    println!("{text}");
    assert_eq!(parse(&text).expect("parses"), spec);

    for (n, word) in [0, 1, 6, 7, 12].map(|n| (n, QuantityBand::of_count(n))) {
        println!("{n:>2} -> {word}");
    }

    println!("card: {}", serialize(&prompt_for_card(ElementTerm::Windows, style_token(EncodingStyle::SRE))));
    let counts = ResolvedCounts { kitchens: 1, bathrooms: 1, living_rooms: 2, doors: 4, windows: 3 };
    let plan = synthesize(&PlanSpec::exact(ShapeClass::Square, counts, 5)).expect("feasible");
    println!("plan: {}", serialize(&prompt_for_plan(&plan, style_token(EncodingStyle::SR)).expect("classifiable")));

    for bad in ["flrpln-se, (3 many doors red:1)", "flrpln-se, (2 few doors red:1", "flrpln-se, (2 few sofas red:1)"] {
        println!("{bad:?}: {}", parse(bad).unwrap_err());
    }
}
