//! The fixed eight-color palette shared by the renderer, the prompt grammar
//! and the decoder.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Named palette color. RGB values are pure saturated anchors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorName {
    Black,
    White,
    Green,
    Magenta,
    Cyan,
    Yellow,
    Blue,
    Red,
}

impl ColorName {
    pub const ALL: [ColorName; 8] = [
        ColorName::Black,
        ColorName::White,
        ColorName::Green,
        ColorName::Magenta,
        ColorName::Cyan,
        ColorName::Yellow,
        ColorName::Blue,
        ColorName::Red,
    ];

    pub const fn rgb(self) -> [u8; 3] {
        match self {
            ColorName::Black => [0, 0, 0],
            ColorName::White => [255, 255, 255],
            ColorName::Green => [0, 255, 0],
            ColorName::Magenta => [255, 0, 255],
            ColorName::Cyan => [0, 255, 255],
            ColorName::Yellow => [255, 255, 0],
            ColorName::Blue => [0, 0, 255],
            ColorName::Red => [255, 0, 0],
        }
    }

    pub const fn word(self) -> &'static str {
        match self {
            ColorName::Black => "black",
            ColorName::White => "white",
            ColorName::Green => "green",
            ColorName::Magenta => "magenta",
            ColorName::Cyan => "cyan",
            ColorName::Yellow => "yellow",
            ColorName::Blue => "blue",
            ColorName::Red => "red",
        }
    }

    pub fn from_rgb(rgb: [u8; 3]) -> Option<ColorName> {
        ColorName::ALL.into_iter().find(|c| c.rgb() == rgb)
    }

    /// Dense index in `0..8`, matching the order of [`ColorName::ALL`].
    pub const fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ColorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown color `{0}`")]
pub struct UnknownColor(pub String);

impl FromStr for ColorName {
    type Err = UnknownColor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ColorName::ALL
            .into_iter()
            .find(|c| c.word() == s)
            .ok_or_else(|| UnknownColor(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_round_trip() {
        for c in ColorName::ALL {
            assert_eq!(c.word().parse::<ColorName>().unwrap(), c);
            assert_eq!(ColorName::from_rgb(c.rgb()), Some(c));
            assert_eq!(ColorName::ALL[c.index()], c);
        }
        assert!("orange".parse::<ColorName>().is_err());
    }

    #[test]
    fn magenta_is_pure() {
        assert_eq!(ColorName::Magenta.rgb(), [255, 0, 255]);
    }
}
