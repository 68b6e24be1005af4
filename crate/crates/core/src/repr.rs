//! The three string representations of platformer levels used by
//! compression distance, plus the per-column feature extraction behind the
//! Normal form.

use std::fmt;

use thiserror::Error;

use crate::level::{Domain, TileGrid, TileKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Repr {
    Normal,
    Concatenated,
    Flat,
}

impl Repr {
    pub const ALL: [Repr; 3] = [Repr::Normal, Repr::Concatenated, Repr::Flat];

    pub fn parse(s: &str) -> Option<Repr> {
        match s {
            "normal" => Some(Repr::Normal),
            "concatenated" => Some(Repr::Concatenated),
            "flat" => Some(Repr::Flat),
            _ => None,
        }
    }
}

impl fmt::Display for Repr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Repr::Normal => write!(f, "normal"),
            Repr::Concatenated => write!(f, "concatenated"),
            Repr::Flat => write!(f, "flat"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReprError {
    #[error("representation needs a platformer grid, got {0}")]
    WrongDomain(Domain),
    #[error("column {col} has platform height {height}, too tall for digit encoding")]
    HeightOverflow { col: usize, height: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightDelta {
    Inc,
    Dec,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnFeatures {
    pub platform_height: usize,
    pub height_delta: HeightDelta,
    pub gap_start: bool,
    pub gap_end: bool,
    pub in_gap: bool,
    pub has_enemy: bool,
}

/// Height of the walkable platform in a column: the contiguous stack of
/// solid tiles resting on the bottom row. Free-floating solids above the
/// band are decoration and do not count, so cosmetic edits up there leave
/// the Normal and Concatenated forms unchanged.
pub fn platform_height(grid: &TileGrid, col: usize) -> usize {
    (0..grid.height())
        .rev()
        .take_while(|&y| grid.tile(col, y).is_solid())
        .count()
}

pub fn column_features(grid: &TileGrid) -> Result<Vec<ColumnFeatures>, ReprError> {
    if grid.domain() != Domain::Platformer {
        return Err(ReprError::WrongDomain(grid.domain()));
    }
    let w = grid.width();
    let heights: Vec<usize> = (0..w).map(|c| platform_height(grid, c)).collect();
    let mut features = Vec::with_capacity(w);
    // Deltas compare against the last platform column, so a gap exit at the
    // same height reads as Flat rather than a rise out of the void.
    let mut last_platform: Option<usize> = None;
    for c in 0..w {
        let h = heights[c];
        let prev = last_platform.unwrap_or(h);
        if h > 0 {
            last_platform = Some(h);
        }
        let in_gap = h == 0;
        features.push(ColumnFeatures {
            platform_height: h,
            height_delta: if h > prev {
                HeightDelta::Inc
            } else if h < prev {
                HeightDelta::Dec
            } else {
                HeightDelta::Flat
            },
            gap_start: in_gap && (c == 0 || heights[c - 1] > 0),
            gap_end: in_gap && (c + 1 == w || heights[c + 1] > 0),
            in_gap,
            has_enemy: (0..grid.height()).any(|y| grid.tile(c, y) == TileKind::Goomba),
        });
    }
    Ok(features)
}

/// One symbol per column from a 16-letter alphabet 'A'..'P'. The low three
/// bits encode the column shape (0 Flat, 1 Inc, 2 Dec, 3 GapStart,
/// 4 GapEnd, 5 one-column gap, 6 gap interior; 7 unused) and bit 3 is set
/// when the column holds an enemy.
pub fn repr_normal(grid: &TileGrid) -> Result<String, ReprError> {
    let features = column_features(grid)?;
    Ok(features
        .iter()
        .map(|f| {
            let shape = if f.in_gap {
                match (f.gap_start, f.gap_end) {
                    (true, true) => 5,
                    (true, false) => 3,
                    (false, true) => 4,
                    (false, false) => 6,
                }
            } else {
                match f.height_delta {
                    HeightDelta::Flat => 0,
                    HeightDelta::Inc => 1,
                    HeightDelta::Dec => 2,
                }
            };
            (b'A' + shape + if f.has_enemy { 8 } else { 0 }) as char
        })
        .collect())
}

/// Per-column platform heights as digits, then per-column enemy-presence
/// bits; length 2 x width.
pub fn repr_concatenated(grid: &TileGrid) -> Result<String, ReprError> {
    let features = column_features(grid)?;
    let mut out = String::with_capacity(2 * features.len());
    for (c, f) in features.iter().enumerate() {
        if f.platform_height > 9 {
            return Err(ReprError::HeightOverflow { col: c, height: f.platform_height });
        }
        out.push((b'0' + f.platform_height as u8) as char);
    }
    for f in &features {
        out.push(if f.has_enemy { '1' } else { '0' });
    }
    Ok(out)
}

/// Row-major tile codes; defined for every domain.
pub fn repr_flat(grid: &TileGrid) -> String {
    crate::level::flatten(grid)
}

/// Dispatch by tag. Flat admits any domain; the other two need platformer.
pub fn level_repr(grid: &TileGrid, repr: Repr) -> Result<String, ReprError> {
    match repr {
        Repr::Normal => repr_normal(grid),
        Repr::Concatenated => repr_concatenated(grid),
        Repr::Flat => Ok(repr_flat(grid)),
    }
}
