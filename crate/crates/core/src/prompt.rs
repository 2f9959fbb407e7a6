//! Caption prompts: `style, (shape building green:1), (n quantity element color:1), ...`

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{element_counts, footprint_shape_class, ElementTerm, FloorPlan, OpeningKind, RoomKind, Unclassifiable};
use crate::palette::ColorName;
use crate::render::EncodingStyle;
use crate::synth::QuantityBand;
use crate::ShapeClass;

pub const NEGATIVE_PROMPT: &str = "gradients, blurry, fuzzy borders, reflections, lighting";

/// Token for the untuned baseline model.
pub const BASELINE_TOKEN: &str = "floorplan";

pub fn style_token(style: EncodingStyle) -> &'static str {
    match style {
        EncodingStyle::R => "flrpln-r",
        EncodingStyle::SR => "flrpln-sr",
        EncodingStyle::SE => "flrpln-se",
        EncodingStyle::SRE => "flrpln-sre",
    }
}

pub fn style_for_token(token: &str) -> Option<EncodingStyle> {
    EncodingStyle::ALL.into_iter().find(|&s| style_token(s) == token)
}

/// One bracketed concept. The count may be omitted for purely fuzzy
/// requests such as "(many windows blue:1)".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
    pub quantity: QuantityBand,
    pub element: ElementTerm,
    pub color: ColorName,
}

impl ConceptDescriptor {
    /// Exact count with its matching quantity word.
    pub fn exact(count: u32, element: ElementTerm, color: ColorName) -> Self {
        ConceptDescriptor { count: Some(count), quantity: QuantityBand::of_count(count), element, color }
    }

    pub fn fuzzy(quantity: QuantityBand, element: ElementTerm, color: ColorName) -> Self {
        ConceptDescriptor { count: None, quantity, element, color }
    }

    /// Canonical color of the element.
    pub fn canonical(count: u32, element: ElementTerm) -> Self {
        Self::exact(count, element, element.canonical_color())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeConcept {
    pub shape: ShapeClass,
    pub color: ColorName,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub style_token: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeConcept>,
    #[serde(default)]
    pub concepts: Vec<ConceptDescriptor>,
}

impl PromptSpec {
    pub fn new(style_token: impl Into<String>) -> Self {
        PromptSpec { style_token: style_token.into(), shape: None, concepts: Vec::new() }
    }

    pub fn with_shape(mut self, shape: ShapeClass) -> Self {
        self.shape = Some(ShapeConcept { shape, color: ColorName::Green });
        self
    }

    pub fn with(mut self, concept: ConceptDescriptor) -> Self {
        self.concepts.push(concept);
        self
    }

    pub fn style(&self) -> Option<EncodingStyle> {
        style_for_token(&self.style_token)
    }
}

impl fmt::Display for PromptSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

pub fn serialize(spec: &PromptSpec) -> String {
    let mut out = spec.style_token.clone();
    if let Some(s) = spec.shape {
        out.push_str(&format!(", ({} building {}:1)", s.shape.word(), s.color));
    }
    for c in &spec.concepts {
        out.push_str(", (");
        if let Some(n) = c.count {
            out.push_str(&format!("{n} "));
        }
        out.push_str(&format!("{} {} {}:1)", c.quantity, c.element.word(), c.color));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("{0}")]
    Semantics(String),
}

fn syntax<T>(position: usize, expected: &str) -> Result<T, PromptError> {
    Err(PromptError::Syntax { position, expected: expected.to_string() })
}

fn semantics<T>(msg: String) -> Result<T, PromptError> {
    Err(PromptError::Semantics(msg))
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    /// Word of `[a-z0-9-.]`, returned with its start offset.
    fn word(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        (self.pos > start).then(|| (start, &self.text[start..self.pos]))
    }
}

pub fn parse(text: &str) -> Result<PromptSpec, PromptError> {
    let mut cur = Cursor { text, pos: 0 };
    let Some((_, token)) = cur.word() else {
        cur.skip_ws();
        return syntax(cur.pos, "style token");
    };
    let mut spec = PromptSpec::new(token);
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            return Ok(spec);
        }
        if !cur.eat(',') {
            return syntax(cur.pos, "`,` or end of prompt");
        }
        cur.skip_ws();
        if !cur.eat('(') {
            return syntax(cur.pos, "`(`");
        }
        let mut words: Vec<(usize, &str)> = Vec::new();
        while let Some(w) = cur.word() {
            words.push(w);
        }
        cur.skip_ws();
        if !cur.eat(':') {
            return syntax(cur.pos, if cur.peek().is_none() { "`:` weight" } else { "word or `:`" });
        }
        let Some((wpos, weight)) = cur.word() else { return syntax(cur.pos, "weight") };
        cur.skip_ws();
        if !cur.eat(')') {
            return syntax(cur.pos, "`)`");
        }
        match weight.parse::<f64>() {
            Ok(1.0) => {}
            _ => return semantics(format!("weight `{weight}` at byte {wpos} must be 1")),
        }
        if words.len() < 2 {
            return syntax(cur.pos, "element and color");
        }
        let (cpos, color_word) = words.pop().expect("two words");
        let color: ColorName = color_word
            .parse()
            .map_err(|_| PromptError::Semantics(format!("unknown color `{color_word}` at byte {cpos}")))?;
        if words.last().map(|w| w.1) == Some("building") && words.len() == 2 {
            let (spos, shape_word) = words[0];
            let shape = ShapeClass::ALL
                .into_iter()
                .find(|s| s.word() == shape_word)
                .ok_or_else(|| PromptError::Semantics(format!("unknown shape `{shape_word}` at byte {spos}")))?;
            if spec.shape.is_some() {
                return semantics(format!("second shape concept at byte {spos}"));
            }
            spec.shape = Some(ShapeConcept { shape, color });
            continue;
        }
        let mut idx = 0;
        let count = match words[0].1.parse::<u32>() {
            Ok(n) => {
                idx = 1;
                Some(n)
            }
            Err(_) if words[0].1.chars().all(|c| c.is_ascii_digit()) => {
                return semantics(format!("count `{}` out of range", words[0].1));
            }
            Err(_) => None,
        };
        let Some(&(qpos, qword)) = words.get(idx) else { return syntax(cur.pos, "quantity word") };
        let quantity = QuantityBand::from_word(qword)
            .ok_or_else(|| PromptError::Semantics(format!("unknown quantity `{qword}` at byte {qpos}")))?;
        let rest: Vec<&str> = words[idx + 1..].iter().map(|w| w.1).collect();
        if rest.is_empty() {
            return syntax(qpos + qword.len(), "element");
        }
        let ewords = rest.join(" ");
        let element = ElementTerm::from_word(&ewords)
            .ok_or_else(|| PromptError::Semantics(format!("unknown element `{ewords}`")))?;
        if let Some(n) = count {
            if !quantity.admits(n) {
                return semantics(format!("{n} is not `{quantity}`"));
            }
        }
        spec.concepts.push(ConceptDescriptor { count, quantity, element, color });
    }
}

/// Full description of a plan: shape, then kitchen, bathroom, living room,
/// windows and doors, each with its displayed color.
pub fn prompt_for_plan(plan: &FloorPlan, style_token: &str) -> Result<PromptSpec, Unclassifiable> {
    let shape = footprint_shape_class(plan)?;
    let counts = element_counts(plan);
    let mut spec = PromptSpec::new(style_token).with_shape(shape);
    for kind in RoomKind::ALL {
        let color = plan.room_color_overrides.get(&kind).copied().unwrap_or(kind.canonical_color());
        spec.concepts.push(ConceptDescriptor::exact(counts.rooms(kind), ElementTerm::from_room_kind(kind), color));
    }
    for (kind, term) in [(OpeningKind::Window, ElementTerm::Windows), (OpeningKind::Door, ElementTerm::Doors)] {
        let color = plan
            .openings
            .iter()
            .find(|o| o.kind == kind)
            .and_then(|o| o.color_override)
            .unwrap_or(kind.canonical_color());
        spec.concepts.push(ConceptDescriptor::exact(counts.openings(kind), term, color));
    }
    Ok(spec)
}

/// Prompt for a card showing one instance of `element`, without a shape.
pub fn prompt_for_card(element: ElementTerm, style_token: &str) -> PromptSpec {
    PromptSpec::new(style_token).with(ConceptDescriptor::canonical(1, element))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_reference_form() {
        let spec = PromptSpec::new("flrpln-se")
            .with_shape(ShapeClass::LShaped)
            .with(ConceptDescriptor::exact(2, ElementTerm::Doors, ColorName::Red))
            .with(ConceptDescriptor::exact(4, ElementTerm::Windows, ColorName::Blue));
        let text = serialize(&spec);
        assert_eq!(text, "flrpln-se, (l-shaped building green:1), (2 few doors red:1), (4 few windows blue:1)");
        assert_eq!(parse(&text).unwrap(), spec);
        assert_eq!(serialize(&PromptSpec::new("flrpln-se")), "flrpln-se");
        let zero = PromptSpec::new("flrpln-r").with(ConceptDescriptor::canonical(0, ElementTerm::Windows));
        assert_eq!(serialize(&zero), "flrpln-r, (0 no windows blue:1)");
    }

    #[test]
    fn parses_with_loose_whitespace() {
        let spec = parse("  flrpln-sre ,( 3  few   living  room yellow : 1 ) ,(many windows blue:1.0)").unwrap();
        assert_eq!(spec.style_token, "flrpln-sre");
        assert_eq!(spec.concepts[0], ConceptDescriptor::exact(3, ElementTerm::LivingRoom, ColorName::Yellow));
        assert_eq!(spec.concepts[1], ConceptDescriptor::fuzzy(QuantityBand::Many, ElementTerm::Windows, ColorName::Blue));
        assert_eq!(spec.style(), Some(EncodingStyle::SRE));
    }

    #[test]
    fn rejects_count_quantity_mismatch() {
        assert!(matches!(parse("flrpln-se, (9 few doors red:1)"), Err(PromptError::Semantics(_))));
        assert!(matches!(parse("flrpln-se, (0 few doors red:1)"), Err(PromptError::Semantics(_))));
        assert!(matches!(parse("flrpln-se, (2 few chimneys red:1)"), Err(PromptError::Semantics(_))));
        assert!(matches!(parse("flrpln-se, (2 few doors orange:1)"), Err(PromptError::Semantics(_))));
        assert!(matches!(parse("flrpln-se, (2 few doors red:2)"), Err(PromptError::Semantics(_))));
    }

    #[test]
    fn unclosed_bracket_fails_at_end() {
        let text = "flrpln-se, (2 few doors";
        match parse(text) {
            Err(PromptError::Syntax { position, .. }) => assert_eq!(position, text.len()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse(""), Err(PromptError::Syntax { position: 0, .. })));
        assert!(matches!(parse("flrpln-se (2 few doors red:1)"), Err(PromptError::Syntax { .. })));
    }

    #[test]
    fn quantity_words_follow_thresholds() {
        for n in 0..30 {
            let expect = match n {
                0 => "no",
                1..=6 => "few",
                _ => "many",
            };
            assert_eq!(QuantityBand::of_count(n).word(), expect);
        }
    }

    #[test]
    fn tokens_round_trip() {
        for s in EncodingStyle::ALL {
            assert_eq!(style_for_token(style_token(s)), Some(s));
        }
        assert_eq!(style_for_token(BASELINE_TOKEN), None);
    }
}
