//! Canonical network setups for the benchmark campaigns.
//!
//! The three named setups trade AP density against per-AP antenna count at
//! a fixed antenna total (RK = 144) and a fixed coverage area: a 3x3 grid
//! of 16-antenna sites, a 6x6 grid of 4-antenna APs, and a 9x8 grid of
//! 2-antenna APs. Setup II anchors the area (100 m spacing); the other two
//! grids are rescaled so their bounding rectangles cover the same area.

use cellfree_core::channel::{grid_extents, grid_shape};
use cellfree_core::error::{Error, Result};
use cellfree_core::NetworkConfig64;

/// Inter-AP spacing of the area-anchoring setup (II), in metres.
pub const REFERENCE_SPACING: f64 = 100.0;

/// Number of APs in the area-anchoring setup (II).
pub const REFERENCE_APS: usize = 36;

/// A named benchmark setup, or a fully caller-specified network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetupId {
    I,
    II,
    III,
    Custom,
}

/// Grid and clustering defaults of one named setup.
#[derive(Debug, Clone, Copy)]
pub struct SetupParams {
    pub num_aps: usize,
    pub antennas_per_ap: usize,
    pub candidate_size: usize,
    pub inter_ap_distance: f64,
}

impl SetupId {
    pub const ALL: [SetupId; 3] = [SetupId::I, SetupId::II, SetupId::III];

    pub fn name(self) -> &'static str {
        match self {
            SetupId::I => "I",
            SetupId::II => "II",
            SetupId::III => "III",
            SetupId::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "I" | "i" | "1" => Ok(SetupId::I),
            "II" | "ii" | "2" => Ok(SetupId::II),
            "III" | "iii" | "3" => Ok(SetupId::III),
            "custom" => Ok(SetupId::Custom),
            other => Err(Error::Config(format!(
                "unknown setup {other:?}; expected I, II, III, or custom"
            ))),
        }
    }

    /// Grid parameters of a named setup; `Custom` has none.
    pub fn params(self) -> Option<SetupParams> {
        let (num_aps, antennas_per_ap, candidate_size) = match self {
            SetupId::I => (9, 16, 1),
            SetupId::II => (36, 4, 4),
            SetupId::III => (72, 2, 8),
            SetupId::Custom => return None,
        };
        Some(SetupParams {
            num_aps,
            antennas_per_ap,
            candidate_size,
            inter_ap_distance: area_matched_spacing(num_aps)
                .expect("table setups form valid grids"),
        })
    }

    /// Base network configuration for `num_users` users; `Custom` starts
    /// from setup II's grid and expects the caller to override fields.
    pub fn network(self, num_users: usize) -> NetworkConfig64 {
        let params = self
            .params()
            .or_else(|| SetupId::II.params())
            .expect("setup II is always defined");
        NetworkConfig64::new(
            params.num_aps,
            params.antennas_per_ap,
            num_users,
            params.inter_ap_distance,
        )
    }
}

impl std::fmt::Display for SetupId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Spacing that gives `num_aps` hexagonal rows the same bounding-rectangle
/// area as the reference 6x6 grid at 100 m.
///
/// The bounding rectangle of a grid with unit spacing has area
/// `(cols - 1 + 1/2) * (rows - 1) * sqrt(3)/2` (the half column is the odd
/// rows' offset), so matching areas fixes the spacing ratio to the square
/// root of the factors' ratio.
pub fn area_matched_spacing(num_aps: usize) -> Result<f64> {
    let reference = unit_area(REFERENCE_APS)?;
    let target = unit_area(num_aps)?;
    if target <= 0.0 {
        return Err(Error::Config(format!(
            "{num_aps} APs form a degenerate (single-row) grid with no area to match"
        )));
    }
    Ok(REFERENCE_SPACING * (reference / target).sqrt())
}

fn unit_area(num_aps: usize) -> Result<f64> {
    let (rows, per_row) = grid_shape(num_aps)?;
    let (width, height) = grid_extents::<f64>(rows, per_row, 1.0);
    Ok(width * height)
}
