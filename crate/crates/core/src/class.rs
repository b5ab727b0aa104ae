use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Building object types recognised at early design stage.
///
/// Variants are declared in lexicographic order of their names so the derived
/// `Ord` doubles as the vote tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectClass {
    Door,
    Floor,
    Wall,
    Window,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 4] = [
        ObjectClass::Door,
        ObjectClass::Floor,
        ObjectClass::Wall,
        ObjectClass::Window,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectClass::Door => "door",
            ObjectClass::Floor => "floor",
            ObjectClass::Wall => "wall",
            ObjectClass::Window => "window",
        }
    }

    /// Class term in the `cbim:` vocabulary.
    pub fn iri_local(self) -> &'static str {
        match self {
            ObjectClass::Door => "Door",
            ObjectClass::Floor => "Floor",
            ObjectClass::Wall => "Wall",
            ObjectClass::Window => "Window",
        }
    }

    pub fn from_iri_local(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.iri_local() == s)
    }

    pub fn is_hosted_kind(self) -> bool {
        matches!(self, ObjectClass::Door | ObjectClass::Window)
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Dataset(format!("unknown class '{s}'")))
    }
}
