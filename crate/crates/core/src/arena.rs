//! The tiled binary surface the robots inspect.
//!
//! The arena is a square of side `side_m` meters with its origin at one
//! corner, split into a 16 x 16 grid of black (0) or white (1) tiles.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use thiserror::Error;

use crate::seed::{self, Purpose};

pub const TILES_PER_SIDE: usize = 16;
pub const TILE_COUNT: usize = TILES_PER_SIDE * TILES_PER_SIDE;
pub const ARENA_SIDE_M: f64 = 1.0;

/// Tile color. Black is 0, white is 1, matching the Bernoulli observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black = 0,
    White = 1,
}

impl Color {
    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Color::Black),
            1 => Some(Color::White),
            _ => None,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("fill ratio {0} is outside [0, 1]")]
    FillOutOfRange(f64),
    #[error("pattern text line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A 16 x 16 binary tile grid. Tile `(ix, iy)` covers
/// `[ix, ix + 1) * tile_side` by `[iy, iy + 1) * tile_side`.
#[derive(Clone, PartialEq, Eq)]
pub struct ArenaPattern {
    tiles: [Color; TILE_COUNT],
    nominal_fill: Option<u64>,
}

impl ArenaPattern {
    pub fn from_fn(mut color: impl FnMut(usize, usize) -> Color) -> Self {
        let mut tiles = [Color::Black; TILE_COUNT];
        for iy in 0..TILES_PER_SIDE {
            for ix in 0..TILES_PER_SIDE {
                tiles[iy * TILES_PER_SIDE + ix] = color(ix, iy);
            }
        }
        Self { tiles, nominal_fill: None }
    }

    pub fn uniform(color: Color) -> Self {
        Self::from_fn(|_, _| color)
    }

    pub fn checkerboard() -> Self {
        Self::from_fn(|ix, iy| if (ix + iy) % 2 == 0 { Color::Black } else { Color::White })
    }

    pub fn side_m(&self) -> f64 {
        ARENA_SIDE_M
    }

    pub fn tile_side_m(&self) -> f64 {
        ARENA_SIDE_M / TILES_PER_SIDE as f64
    }

    /// The fill ratio requested at generation time, if the pattern was generated.
    pub fn nominal_fill(&self) -> Option<f64> {
        self.nominal_fill.map(f64::from_bits)
    }

    pub fn white_count(&self) -> usize {
        self.tiles.iter().filter(|&&c| c == Color::White).count()
    }

    pub fn actual_fill(&self) -> f64 {
        self.white_count() as f64 / TILE_COUNT as f64
    }

    /// Majority color of the realized pattern, or `None` for an exact tie.
    pub fn majority(&self) -> Option<Color> {
        let white = self.white_count();
        match (2 * white).cmp(&TILE_COUNT) {
            std::cmp::Ordering::Greater => Some(Color::White),
            std::cmp::Ordering::Less => Some(Color::Black),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn tile(&self, ix: usize, iy: usize) -> Color {
        self.tiles[iy * TILES_PER_SIDE + ix]
    }

    /// Flat tile index of the tile containing `(x, y)`.
    ///
    /// `floor(coord / tile_side)` clamped to `[0, 15]`, except that a point
    /// lying exactly on a boundary between two tiles resolves to the tile
    /// with the lower index.
    pub fn tile_index(&self, x: f64, y: f64) -> usize {
        debug_assert!(
            (0.0..=ARENA_SIDE_M).contains(&x) && (0.0..=ARENA_SIDE_M).contains(&y),
            "point ({x}, {y}) outside arena"
        );
        let ix = tile_coord(x);
        let iy = tile_coord(y);
        iy * TILES_PER_SIDE + ix
    }

    pub fn color_at(&self, x: f64, y: f64) -> Color {
        self.tiles[self.tile_index(x, y)]
    }
}

fn tile_coord(c: f64) -> usize {
    // ceil(u) - 1 equals floor(u) except on integer u, where it picks the lower tile.
    let i = (c * TILES_PER_SIDE as f64 / ARENA_SIDE_M).ceil() - 1.0;
    (i.max(0.0) as usize).min(TILES_PER_SIDE - 1)
}

/// Places exactly `round(fill * 256)` white tiles uniformly at random.
pub fn generate_pattern(fill: f64, seed: u64) -> Result<ArenaPattern, PatternError> {
    if !(0.0..=1.0).contains(&fill) {
        return Err(PatternError::FillOutOfRange(fill));
    }
    let whites = (fill * TILE_COUNT as f64).round() as usize;
    let mut rng = seed::stream(seed, Purpose::Pattern, &[]);
    let mut tiles = [Color::Black; TILE_COUNT];
    for i in index::sample(&mut rng, TILE_COUNT, whites) {
        tiles[i] = Color::White;
    }
    Ok(ArenaPattern { tiles, nominal_fill: Some(fill.to_bits()) })
}

impl fmt::Display for ArenaPattern {
    /// 16 lines of 16 `0`/`1` characters, row `iy = 0` first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for iy in 0..TILES_PER_SIDE {
            for ix in 0..TILES_PER_SIDE {
                f.write_str(if self.tile(ix, iy) == Color::White { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ArenaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArenaPattern(white={}/{})\n{}", self.white_count(), TILE_COUNT, self)
    }
}

impl FromStr for ArenaPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lines: Vec<&str> = s.lines().map(str::trim_end).filter(|l| !l.is_empty()).collect();
        if lines.len() != TILES_PER_SIDE {
            return Err(PatternError::Parse {
                line: lines.len(),
                reason: format!("expected {TILES_PER_SIDE} rows, found {}", lines.len()),
            });
        }
        let mut tiles = [Color::Black; TILE_COUNT];
        for (iy, line) in lines.iter().enumerate() {
            if line.len() != TILES_PER_SIDE {
                return Err(PatternError::Parse {
                    line: iy + 1,
                    reason: format!("expected {TILES_PER_SIDE} characters, found {}", line.len()),
                });
            }
            for (ix, ch) in line.chars().enumerate() {
                tiles[iy * TILES_PER_SIDE + ix] = match ch {
                    '0' => Color::Black,
                    '1' => Color::White,
                    other => {
                        return Err(PatternError::Parse {
                            line: iy + 1,
                            reason: format!("unexpected character {other:?}"),
                        })
                    }
                };
            }
        }
        Ok(ArenaPattern { tiles, nominal_fill: None })
    }
}
