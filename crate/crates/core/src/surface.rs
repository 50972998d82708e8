//! One-vertex ribbon graph model of a compact surface with boundary.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{self, Letter, Word};

/// A wedge of `n` loops with a cyclic order on the `2n` germs at the vertex.
///
/// Germ `x` is the start of edge `x`; germ `x'` is its end. A boundary walk
/// leaves along `l`, comes back in along `l'`, and continues with the germ
/// just before `l'` in the cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonSurface {
    name: String,
    genus: usize,
    boundary_count: usize,
    rank: usize,
    ribbon: Vec<Letter>,
    position: Vec<usize>,
    boundary_words: Vec<Word>,
    /// For each letter code: (boundary index, offset in that boundary word).
    boundary_slot: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceInvariants {
    pub genus: usize,
    pub boundary_count: usize,
    pub double_genus: usize,
    pub growth_exponent: usize,
    pub is_pair_of_pants: bool,
}

pub const PRESET_NAMES: [&str; 4] = ["S_1_1", "S_0_4", "S_1_2", "S_0_3"];

struct Preset {
    name: &'static str,
    genus: usize,
    boundary_count: usize,
    ribbon: &'static str,
    boundaries: &'static [&'static str],
}

const PRESETS: [Preset; 4] = [
    Preset {
        name: "S_1_1",
        genus: 1,
        boundary_count: 1,
        ribbon: "a b a' b'",
        boundaries: &["aba'b'"],
    },
    Preset {
        name: "S_0_4",
        genus: 0,
        boundary_count: 4,
        ribbon: "a a' b b' c c'",
        boundaries: &["a", "b", "c", "a'c'b'"],
    },
    Preset {
        name: "S_1_2",
        genus: 1,
        boundary_count: 2,
        ribbon: "a b a' b' c c'",
        boundaries: &["aba'c'b'", "c"],
    },
    Preset {
        name: "S_0_3",
        genus: 0,
        boundary_count: 3,
        ribbon: "a a' b b'",
        boundaries: &["a", "b", "a'b'"],
    },
];

pub fn make_preset(name: &str) -> Result<RibbonSurface> {
    let p = PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let rank = 2 * p.genus + p.boundary_count - 1;
    let ribbon = word::parse(p.ribbon, rank)?;
    let listing = p
        .boundaries
        .iter()
        .map(|b| word::parse(b, rank))
        .collect::<Result<Vec<_>>>()?;
    RibbonSurface::build(p.name, p.genus, p.boundary_count, ribbon, Some(listing))
}

impl RibbonSurface {
    /// Builds a surface from an arbitrary germ order, listing boundary cycles
    /// in order of their least letter.
    pub fn from_ribbon(name: &str, genus: usize, boundary_count: usize, ribbon: Word) -> Result<Self> {
        Self::build(name, genus, boundary_count, ribbon, None)
    }

    fn build(
        name: &str,
        genus: usize,
        boundary_count: usize,
        ribbon: Word,
        listing: Option<Vec<Word>>,
    ) -> Result<Self> {
        if boundary_count == 0 {
            return Err(Error::InvalidSurface("at least one boundary component required".into()));
        }
        let rank = 2 * genus + boundary_count - 1;
        if rank < 2 {
            return Err(Error::InvalidSurface(format!(
                "Euler characteristic {} is not negative",
                1 - rank as i64
            )));
        }
        if ribbon.len() != 2 * rank {
            return Err(Error::InvalidSurface(format!(
                "ribbon order has {} germs, expected {}",
                ribbon.len(),
                2 * rank
            )));
        }
        let mut position = vec![usize::MAX; 2 * rank];
        for (i, l) in ribbon.iter().enumerate() {
            let c = l.code() as usize;
            if c >= 2 * rank || position[c] != usize::MAX {
                return Err(Error::InvalidSurface(format!("germ {l} repeated or out of range")));
            }
            position[c] = i;
        }

        let cycles = boundary_cycles(&ribbon, &position);
        if cycles.len() != boundary_count {
            return Err(Error::InvalidSurface(format!(
                "ribbon order has {} boundary cycles, expected {boundary_count}",
                cycles.len()
            )));
        }
        let boundary_words = match listing {
            None => cycles,
            Some(list) => {
                if list.len() != cycles.len() {
                    return Err(Error::InvalidSurface("boundary listing has wrong length".into()));
                }
                for b in &list {
                    let found = cycles.iter().any(|c| {
                        c.len() == b.len() && (0..c.len()).any(|k| word::rotate(c, k) == *b)
                    });
                    if !found {
                        return Err(Error::InvalidSurface(format!(
                            "listed boundary {} is not a boundary cycle",
                            word::format(b)
                        )));
                    }
                }
                list
            }
        };

        let mut boundary_slot = vec![(usize::MAX, 0); 2 * rank];
        for (i, b) in boundary_words.iter().enumerate() {
            if !word::is_cyclically_reduced(b) || b.is_empty() {
                return Err(Error::InvalidSurface(format!(
                    "boundary {} is not cyclically reduced",
                    word::format(b)
                )));
            }
            for (k, l) in b.iter().enumerate() {
                let slot = &mut boundary_slot[l.code() as usize];
                if slot.0 != usize::MAX {
                    return Err(Error::InvalidSurface(format!("germ {l} on two boundary cycles")));
                }
                *slot = (i, k);
            }
        }
        if boundary_slot.iter().any(|s| s.0 == usize::MAX) {
            return Err(Error::InvalidSurface("some germ lies on no boundary cycle".into()));
        }

        Ok(RibbonSurface {
            name: name.to_string(),
            genus,
            boundary_count,
            rank,
            ribbon,
            position,
            boundary_words,
            boundary_slot,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    /// Number of free generators, `2g + r - 1`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ribbon_order(&self) -> &[Letter] {
        &self.ribbon
    }

    /// Position of a germ in the cyclic order.
    #[inline]
    pub fn position(&self, l: Letter) -> usize {
        self.position[l.code() as usize]
    }

    /// Number of germs, `2n`.
    #[inline]
    pub fn germ_count(&self) -> usize {
        self.ribbon.len()
    }

    pub fn boundary_words(&self) -> &[Word] {
        &self.boundary_words
    }

    pub fn boundary(&self, i: usize) -> &[Letter] {
        &self.boundary_words[i]
    }

    /// Which boundary word contains `l`, and at which offset.
    pub fn boundary_slot(&self, l: Letter) -> (usize, usize) {
        self.boundary_slot[l.code() as usize]
    }

    pub fn is_pair_of_pants(&self) -> bool {
        self.genus == 0 && self.boundary_count == 3
    }

    /// Rejects the pair of pants at counting entry points.
    pub fn require_countable(&self) -> Result<()> {
        if self.is_pair_of_pants() {
            Err(Error::PairOfPants)
        } else {
            Ok(())
        }
    }

    pub fn invariants(&self) -> SurfaceInvariants {
        SurfaceInvariants {
            genus: self.genus,
            boundary_count: self.boundary_count,
            double_genus: 2 * self.genus + self.boundary_count - 1,
            growth_exponent: 6 * self.genus + 2 * self.boundary_count - 6,
            is_pair_of_pants: self.is_pair_of_pants(),
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        word::parse(text, self.rank)
    }
}

impl fmt::Display for RibbonSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (g={}, r={})", self.name, self.genus, self.boundary_count)
    }
}

fn boundary_cycles(ribbon: &[Letter], position: &[usize]) -> Vec<Word> {
    let m = ribbon.len();
    let next = |l: Letter| ribbon[(position[l.inv().code() as usize] + m - 1) % m];
    let mut seen = vec![false; m];
    let mut cycles = Vec::new();
    let mut order: Vec<Letter> = ribbon.to_vec();
    order.sort();
    for start in order {
        if seen[start.code() as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut l = start;
        while !seen[l.code() as usize] {
            seen[l.code() as usize] = true;
            cycle.push(l);
            l = next(l);
        }
        cycles.push(cycle);
    }
    cycles
}
