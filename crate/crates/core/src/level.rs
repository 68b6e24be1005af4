//! Tile-grid level representation shared by every domain and metric.
//!
//! Conventions used framework-wide: row-major storage, top-left origin,
//! x grows rightward, y grows downward.

use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Which game a level belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Maze,
    Platformer,
}

impl Domain {
    pub fn parse(s: &str) -> Option<Domain> {
        match s {
            "maze" => Some(Domain::Maze),
            "platformer" => Some(Domain::Platformer),
            _ => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Maze => write!(f, "maze"),
            Domain::Platformer => write!(f, "platformer"),
        }
    }
}

/// A single tile. `Empty`/`Wall` are maze tiles, the rest are platformer
/// tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TileKind {
    Empty,
    Wall,
    Air,
    Ground,
    Brick,
    Goomba,
    Flag,
}

impl TileKind {
    /// True if this kind may appear in a grid of the given domain.
    pub fn legal_for(self, domain: Domain) -> bool {
        match domain {
            Domain::Maze => matches!(self, TileKind::Empty | TileKind::Wall),
            Domain::Platformer => matches!(
                self,
                TileKind::Air | TileKind::Ground | TileKind::Brick | TileKind::Goomba | TileKind::Flag
            ),
        }
    }

    /// One-character file code. The mapping is a bijection per domain.
    pub fn code(self) -> char {
        match self {
            TileKind::Empty => '.',
            TileKind::Wall => '#',
            TileKind::Air => '-',
            TileKind::Ground => 'X',
            TileKind::Brick => 'B',
            TileKind::Goomba => 'g',
            TileKind::Flag => 'F',
        }
    }

    pub fn from_code(c: char, domain: Domain) -> Option<TileKind> {
        let kind = match (domain, c) {
            (Domain::Maze, '.') => TileKind::Empty,
            (Domain::Maze, '#') => TileKind::Wall,
            (Domain::Platformer, '-') => TileKind::Air,
            (Domain::Platformer, 'X') => TileKind::Ground,
            (Domain::Platformer, 'B') => TileKind::Brick,
            (Domain::Platformer, 'g') => TileKind::Goomba,
            (Domain::Platformer, 'F') => TileKind::Flag,
            _ => return None,
        };
        Some(kind)
    }

    /// Symbol emitted by [`flatten`]. Maze tiles flatten to a binary
    /// alphabet ('0' empty, '1' wall); platformer tiles keep their file
    /// code.
    pub fn flat_code(self) -> char {
        match self {
            TileKind::Empty => '0',
            TileKind::Wall => '1',
            other => other.code(),
        }
    }

    /// Tiles the platformer agent cannot occupy or pass through.
    pub fn is_solid(self) -> bool {
        matches!(self, TileKind::Ground | TileKind::Brick)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("level text is empty")]
    EmptyLevel,
    #[error("line {line} has length {len}, expected {expected}")]
    RaggedLines { line: usize, len: usize, expected: usize },
    #[error("unknown tile code {code:?} for domain {domain} at row {row}, col {col}")]
    UnknownTileCode { code: char, domain: Domain, row: usize, col: usize },
    #[error("tile vector has length {got}, expected {width}x{height}={expected}")]
    BadTileCount { got: usize, width: usize, height: usize, expected: usize },
    #[error("{kind:?} is not a legal tile for domain {domain}")]
    IllegalTile { kind: TileKind, domain: Domain },
    #[error("grid dimensions must be positive")]
    ZeroDimension,
    #[error("level set mixes domains")]
    MixedDomains,
}

#[derive(Debug, Error)]
pub enum LevelIoError {
    #[error(transparent)]
    Parse(#[from] LevelError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A rectangular level. Immutable once built (generators mutate through
/// [`TileGrid::set_tile`] before handing the grid out).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileGrid {
    width: usize,
    height: usize,
    tiles: Vec<TileKind>,
    domain: Domain,
}

impl TileGrid {
    pub fn new(
        width: usize,
        height: usize,
        tiles: Vec<TileKind>,
        domain: Domain,
    ) -> Result<TileGrid, LevelError> {
        if width == 0 || height == 0 {
            return Err(LevelError::ZeroDimension);
        }
        if tiles.len() != width * height {
            return Err(LevelError::BadTileCount {
                got: tiles.len(),
                width,
                height,
                expected: width * height,
            });
        }
        if let Some(&kind) = tiles.iter().find(|k| !k.legal_for(domain)) {
            return Err(LevelError::IllegalTile { kind, domain });
        }
        Ok(TileGrid { width, height, tiles, domain })
    }

    /// Grid of uniform tiles.
    pub fn filled(width: usize, height: usize, kind: TileKind, domain: Domain) -> TileGrid {
        TileGrid::new(width, height, vec![kind; width * height], domain)
            .expect("uniform grid is valid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn in_bounds(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Tile at (x, y). Panics out of bounds.
    pub fn tile(&self, x: usize, y: usize) -> TileKind {
        assert!(x < self.width && y < self.height, "tile ({x},{y}) out of bounds");
        self.tiles[y * self.width + x]
    }

    pub fn get(&self, x: isize, y: isize) -> Option<TileKind> {
        if self.in_bounds(x, y) {
            Some(self.tiles[y as usize * self.width + x as usize])
        } else {
            None
        }
    }

    pub fn set_tile(&mut self, x: usize, y: usize, kind: TileKind) {
        assert!(x < self.width && y < self.height, "tile ({x},{y}) out of bounds");
        assert!(kind.legal_for(self.domain), "{kind:?} illegal for {}", self.domain);
        self.tiles[y * self.width + x] = kind;
    }

    pub fn tiles(&self) -> &[TileKind] {
        &self.tiles
    }
}

/// Parse one level from multi-line text. Every line must have the same
/// length; every character must be a legal code for the domain.
pub fn parse_level(text: &str, domain: Domain) -> Result<TileGrid, LevelError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    if lines.is_empty() || lines[0].is_empty() {
        return Err(LevelError::EmptyLevel);
    }
    let width = lines[0].chars().count();
    let height = lines.len();
    let mut tiles = Vec::with_capacity(width * height);
    for (row, line) in lines.iter().enumerate() {
        let len = line.chars().count();
        if len != width {
            return Err(LevelError::RaggedLines { line: row, len, expected: width });
        }
        for (col, c) in line.chars().enumerate() {
            match TileKind::from_code(c, domain) {
                Some(kind) => tiles.push(kind),
                None => {
                    return Err(LevelError::UnknownTileCode { code: c, domain, row, col });
                }
            }
        }
    }
    TileGrid::new(width, height, tiles, domain)
}

/// Inverse of [`parse_level`]; one row per line with a trailing newline.
pub fn serialize_level(grid: &TileGrid) -> String {
    let mut out = String::with_capacity((grid.width + 1) * grid.height);
    for y in 0..grid.height {
        for x in 0..grid.width {
            out.push(grid.tile(x, y).code());
        }
        out.push('\n');
    }
    out
}

/// Row-major concatenation of per-tile symbols; length is exactly
/// width*height. Maze grids flatten to a binary '0'/'1' string.
pub fn flatten(grid: &TileGrid) -> String {
    grid.tiles.iter().map(|k| k.flat_code()).collect()
}

/// An ordered collection of same-domain levels with the seed and label it
/// was produced from. Iteration order is the insertion order, so pairwise
/// indices are reproducible.
#[derive(Debug, Clone)]
pub struct LevelSet {
    pub levels: Vec<TileGrid>,
    pub seed: u64,
    pub source_label: String,
}

impl LevelSet {
    pub fn new(levels: Vec<TileGrid>, seed: u64, source_label: &str) -> Result<LevelSet, LevelError> {
        if let Some(first) = levels.first() {
            if levels.iter().any(|l| l.domain() != first.domain()) {
                return Err(LevelError::MixedDomains);
            }
        }
        Ok(LevelSet { levels, seed, source_label: source_label.to_string() })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Parse a level-set file: levels separated by a blank line, lines starting
/// with '%' are comments.
pub fn parse_level_set(text: &str, domain: Domain) -> Result<Vec<TileGrid>, LevelError> {
    let mut levels = Vec::new();
    let mut block = String::new();
    for line in text.lines() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.starts_with('%') {
            continue;
        }
        if line.is_empty() {
            if !block.is_empty() {
                levels.push(parse_level(&block, domain)?);
                block.clear();
            }
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    if !block.is_empty() {
        levels.push(parse_level(&block, domain)?);
    }
    Ok(levels)
}

/// Serialize levels into the set format (single blank line between levels).
pub fn serialize_level_set(levels: &[TileGrid]) -> String {
    let mut out = String::new();
    for (i, level) in levels.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&serialize_level(level));
    }
    out
}

pub fn read_level_set(path: &Path, domain: Domain) -> Result<Vec<TileGrid>, LevelIoError> {
    let text = std::fs::read_to_string(path).map_err(|source| LevelIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_level_set(&text, domain)?)
}

pub fn write_level_set(path: &Path, levels: &[TileGrid]) -> Result<(), LevelIoError> {
    std::fs::write(path, serialize_level_set(levels)).map_err(|source| LevelIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_all_empty() {
        let g = parse_level("..\n..", Domain::Maze).unwrap();
        assert_eq!((g.width(), g.height()), (2, 2));
        assert!(g.tiles().iter().all(|&t| t == TileKind::Empty));
    }

    #[test]
    fn parse_wall_positions() {
        let g = parse_level(".#\n#.", Domain::Maze).unwrap();
        assert_eq!(g.tile(1, 0), TileKind::Wall);
        assert_eq!(g.tile(0, 1), TileKind::Wall);
        assert_eq!(g.tile(0, 0), TileKind::Empty);
        assert_eq!(g.tile(1, 1), TileKind::Empty);
    }

    #[test]
    fn parse_ragged_lines() {
        let err = parse_level("..\n...", Domain::Maze).unwrap_err();
        assert_eq!(err, LevelError::RaggedLines { line: 1, len: 3, expected: 2 });
    }

    #[test]
    fn parse_unknown_code_reports_position() {
        let err = parse_level("..\n.X", Domain::Maze).unwrap_err();
        assert_eq!(
            err,
            LevelError::UnknownTileCode { code: 'X', domain: Domain::Maze, row: 1, col: 1 }
        );
    }

    #[test]
    fn parse_empty_input() {
        assert_eq!(parse_level("", Domain::Maze).unwrap_err(), LevelError::EmptyLevel);
    }

    #[test]
    fn serialize_examples() {
        let g = TileGrid::filled(2, 2, TileKind::Empty, Domain::Maze);
        assert_eq!(serialize_level(&g), "..\n..\n");
        let w = TileGrid::filled(1, 1, TileKind::Wall, Domain::Maze);
        assert_eq!(serialize_level(&w), "#\n");
    }

    #[test]
    fn flatten_examples() {
        let g = parse_level(".#\n#.", Domain::Maze).unwrap();
        assert_eq!(flatten(&g), "0110");
        let row = TileGrid::filled(3, 1, TileKind::Empty, Domain::Maze);
        assert_eq!(flatten(&row), "000");
    }

    #[test]
    fn platformer_codes_round_trip() {
        let text = "----\n-g-F\nXXXX\n";
        let g = parse_level(text, Domain::Platformer).unwrap();
        assert_eq!(serialize_level(&g), text);
        assert_eq!(flatten(&g), "-----g-FXXXX");
    }

    #[test]
    fn new_rejects_illegal_tile() {
        let err = TileGrid::new(1, 1, vec![TileKind::Goomba], Domain::Maze).unwrap_err();
        assert_eq!(err, LevelError::IllegalTile { kind: TileKind::Goomba, domain: Domain::Maze });
    }

    #[test]
    fn level_set_round_trip_with_comments() {
        let text = "% generated fixture\n..\n..\n\n.#\n#.\n\n% trailing comment\n";
        let levels = parse_level_set(text, Domain::Maze).unwrap();
        assert_eq!(levels.len(), 2);
        assert_eq!(levels[1].tile(1, 0), TileKind::Wall);
        let ser = serialize_level_set(&levels);
        let reparsed = parse_level_set(&ser, Domain::Maze).unwrap();
        assert_eq!(levels, reparsed);
    }

    #[test]
    fn level_set_rejects_mixed_domains() {
        let maze = TileGrid::filled(2, 2, TileKind::Empty, Domain::Maze);
        let plat = TileGrid::filled(2, 2, TileKind::Air, Domain::Platformer);
        assert_eq!(
            LevelSet::new(vec![maze, plat], 0, "x").unwrap_err(),
            LevelError::MixedDomains
        );
    }
}
