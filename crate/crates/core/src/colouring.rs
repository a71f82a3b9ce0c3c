//! Partial vertex colourings and their JSON form.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum ColouringError {
    #[error("colouring covers {found} vertices but the graph has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} has colour {colour} outside the palette of size {palette}")]
    ColourOutOfRange { vertex: usize, colour: usize, palette: usize },
    #[error("edge {u}-{v} is monochromatic (colour {colour})")]
    Monochromatic { u: usize, v: usize, colour: usize },
    #[error("vertex {0} is uncoloured but a total colouring is required")]
    Uncoloured(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ColouringError {
    /// True for the errors that describe an improper (rather than malformed) colouring.
    pub fn is_improper(&self) -> bool {
        matches!(self, ColouringError::Monochromatic { .. })
    }
}

/// Assignment of optional colours in `0..palette` to vertices.
///
/// Serialized as `{"palette": c, "colours": [int-or-null per vertex]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialColouring {
    pub palette: usize,
    pub colours: Vec<Option<usize>>,
}

impl PartialColouring {
    /// All `n` vertices uncoloured.
    pub fn uncoloured(n: usize, palette: usize) -> Self {
        PartialColouring {
            palette,
            colours: vec![None; n],
        }
    }

    pub fn from_total(palette: usize, colours: Vec<usize>) -> Self {
        PartialColouring {
            palette,
            colours: colours.into_iter().map(Some).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.colours.len()
    }

    #[inline]
    pub fn get(&self, v: usize) -> Option<usize> {
        self.colours[v]
    }

    #[inline]
    pub fn set(&mut self, v: usize, colour: usize) {
        debug_assert!(colour < self.palette);
        self.colours[v] = Some(colour);
    }

    #[inline]
    pub fn unset(&mut self, v: usize) {
        self.colours[v] = None;
    }

    pub fn is_total(&self) -> bool {
        self.colours.iter().all(Option::is_some)
    }

    pub fn coloured_count(&self) -> usize {
        self.colours.iter().filter(|c| c.is_some()).count()
    }

    /// Number of distinct colours actually used.
    pub fn colours_used(&self) -> usize {
        let mut seen = vec![false; self.palette];
        let mut count = 0;
        for c in self.colours.iter().flatten() {
            if let Some(slot) = seen.get_mut(*c) {
                if !*slot {
                    *slot = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// Checks length, palette bounds and properness against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), ColouringError> {
        if self.n() != g.n() {
            return Err(ColouringError::LengthMismatch {
                expected: g.n(),
                found: self.n(),
            });
        }
        for (vertex, c) in self.colours.iter().enumerate() {
            if let Some(colour) = *c {
                if colour >= self.palette {
                    return Err(ColouringError::ColourOutOfRange {
                        vertex,
                        colour,
                        palette: self.palette,
                    });
                }
            }
        }
        for (u, v) in g.edges() {
            if let (Some(a), Some(b)) = (self.colours[u], self.colours[v]) {
                if a == b {
                    return Err(ColouringError::Monochromatic { u, v, colour: a });
                }
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus totality.
    pub fn validate_total(&self, g: &Graph) -> Result<(), ColouringError> {
        self.validate(g)?;
        match self.colours.iter().position(Option::is_none) {
            Some(v) => Err(ColouringError::Uncoloured(v)),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("colourings always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ColouringError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ColouringError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ColouringError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let f = PartialColouring {
            palette: 3,
            colours: vec![Some(0), None, Some(2)],
        };
        assert_eq!(f.to_json(), r#"{"palette":3,"colours":[0,null,2]}"#);
        assert_eq!(PartialColouring::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn validation() {
        let k3 = Graph::complete(3);
        assert!(PartialColouring::from_total(3, vec![0, 1, 2]).validate_total(&k3).is_ok());
        let mono = PartialColouring::from_total(3, vec![0, 0, 2]).validate(&k3).unwrap_err();
        assert!(mono.is_improper());
        assert!(matches!(
            PartialColouring::from_total(2, vec![0, 1, 2]).validate(&k3),
            Err(ColouringError::ColourOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            PartialColouring::uncoloured(2, 3).validate(&k3),
            Err(ColouringError::LengthMismatch { .. })
        ));
        assert!(matches!(
            PartialColouring::uncoloured(3, 3).validate_total(&k3),
            Err(ColouringError::Uncoloured(0))
        ));
    }

    #[test]
    fn counting() {
        let f = PartialColouring {
            palette: 5,
            colours: vec![Some(4), None, Some(4), Some(1)],
        };
        assert_eq!(f.coloured_count(), 3);
        assert_eq!(f.colours_used(), 2);
        assert!(!f.is_total());
    }
}
