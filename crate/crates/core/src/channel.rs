//! Network geometry and channel generation.
//!
//! The model: access points (APs) sit on a hexagonal grid, users drop
//! uniformly over the grid's bounding rectangle, and each AP-user link gets
//! a distance-based pathloss plus spatially correlated log-normal shadowing.
//! Small-scale fading is independent Rayleigh per antenna, with per-entry
//! power equal to the link's large-scale gain.
//!
//! All randomness flows through caller-provided RNGs. [`generate_instance`]
//! wires up one seeded generator per trial with fixed sub-streams (user
//! positions, shadowing, fading) so that trials are reproducible and
//! different runs over the same trial index see bit-identical channels.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{cast, Scalar};
use crate::units::dbm_to_watts;

/// Scenario parameters. Distances are in meters, powers in the stated units.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig<T> {
    /// Number of APs (R). Must fit the hexagonal row layout.
    pub num_aps: usize,
    /// Antennas per AP (K).
    pub antennas_per_ap: usize,
    /// Number of single-antenna users (N).
    pub num_users: usize,
    /// Horizontal spacing between adjacent APs in a row.
    pub inter_ap_distance: T,
    /// Vertical offset between AP antennas and user level, added to every
    /// link distance in quadrature.
    pub ap_height_offset: T,
    /// Pathloss at 1 m, in dB.
    pub pathloss_intercept_db: T,
    /// Pathloss slope in dB per decade of distance.
    pub pathloss_db_per_decade: T,
    /// Shadow-fading standard deviation in dB. Zero disables shadowing.
    pub shadow_std_db: T,
    /// Distance at which shadow correlation halves, in meters.
    pub shadow_decorrelation_distance: T,
    /// Receiver noise power in dBm.
    pub noise_power_dbm: T,
    /// Base seed for all random draws derived from this scenario.
    pub rng_seed: u64,
}

impl<T: Scalar> NetworkConfig<T> {
    /// Builds a configuration with the default propagation parameters.
    pub fn new(num_aps: usize, antennas_per_ap: usize, num_users: usize, inter_ap_distance: T) -> Self {
        Self {
            num_aps,
            antennas_per_ap,
            num_users,
            inter_ap_distance,
            ap_height_offset: cast(10.0),
            pathloss_intercept_db: cast(-30.5),
            pathloss_db_per_decade: cast(36.7),
            shadow_std_db: cast(4.0),
            shadow_decorrelation_distance: cast(9.0),
            noise_power_dbm: cast(-94.0),
            rng_seed: 0,
        }
    }

    /// Noise power in linear watts.
    pub fn noise_power_watts(&self) -> T {
        dbm_to_watts(self.noise_power_dbm)
    }

    /// Checks dimension and parameter sanity, including the grid layout.
    pub fn validate(&self) -> Result<()> {
        if self.num_aps == 0 {
            return Err(Error::Config("need at least one AP".into()));
        }
        if self.antennas_per_ap == 0 {
            return Err(Error::Config("need at least one antenna per AP".into()));
        }
        if self.num_users == 0 {
            return Err(Error::Config("need at least one user".into()));
        }
        if !(self.inter_ap_distance > T::zero()) || !self.inter_ap_distance.is_finite() {
            return Err(Error::Config("inter-AP distance must be positive".into()));
        }
        if self.ap_height_offset < T::zero() {
            return Err(Error::Config("AP height offset must be non-negative".into()));
        }
        if self.shadow_std_db < T::zero() {
            return Err(Error::Config("shadow standard deviation must be non-negative".into()));
        }
        if !(self.shadow_decorrelation_distance > T::zero()) {
            return Err(Error::Config("shadow decorrelation distance must be positive".into()));
        }
        grid_shape(self.num_aps)?;
        Ok(())
    }
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// Euclidean distance in the plane.
    pub fn planar_distance(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Row layout of the hexagonal AP grid: `R` splits into rows of `ceil(sqrt R)`.
///
/// Returns `(rows, aps_per_row)`, or a configuration error when `R` does not
/// divide evenly into such rows.
pub fn grid_shape(num_aps: usize) -> Result<(usize, usize)> {
    let per_row = (num_aps as f64).sqrt().ceil() as usize;
    if per_row == 0 || num_aps % per_row != 0 {
        return Err(Error::Config(format!(
            "{num_aps} APs do not split into rows of {per_row}"
        )));
    }
    Ok((num_aps / per_row, per_row))
}

/// Width and height of the grid's bounding rectangle in closed form.
///
/// Width spans `aps_per_row - 1` spacings, plus the half-spacing stagger of
/// odd rows when there is more than one row. Height spans `rows - 1` row
/// pitches of `sqrt(3)/2` spacings.
pub fn grid_extents<T: Scalar>(rows: usize, aps_per_row: usize, spacing: T) -> (T, T) {
    let stagger = if rows > 1 { cast(0.5) } else { T::zero() };
    let width = spacing * (cast::<T>((aps_per_row - 1) as f64) + stagger);
    let height = spacing * cast::<T>((rows - 1) as f64) * cast::<T>(3.0f64.sqrt() / 2.0);
    (width, height)
}

/// Places the APs on a hexagonal grid centered on the origin.
///
/// Rows hold `ceil(sqrt R)` APs spaced `inter_ap_distance` apart; consecutive
/// rows sit `inter_ap_distance * sqrt(3)/2` higher and are staggered by half
/// a spacing, which makes nearest-neighbor distances uniform.
pub fn build_topology<T: Scalar>(config: &NetworkConfig<T>) -> Result<Vec<Point2<T>>> {
    let (rows, per_row) = grid_shape(config.num_aps)?;
    let d = config.inter_ap_distance;
    let row_pitch = d * cast::<T>(3.0f64.sqrt() / 2.0);
    let half = d * cast::<T>(0.5);

    let mut positions = Vec::with_capacity(config.num_aps);
    for row in 0..rows {
        let offset = if row % 2 == 1 { half } else { T::zero() };
        for col in 0..per_row {
            positions.push(Point2::new(
                cast::<T>(col as f64) * d + offset,
                cast::<T>(row as f64) * row_pitch,
            ));
        }
    }

    let (min, max) = bounding_rect(&positions);
    let shift = Point2::new(
        (min.x + max.x) * cast(0.5),
        (min.y + max.y) * cast(0.5),
    );
    for p in &mut positions {
        p.x = p.x - shift.x;
        p.y = p.y - shift.y;
    }
    Ok(positions)
}

/// Axis-aligned bounding rectangle of a non-empty point set.
pub fn bounding_rect<T: Scalar>(points: &[Point2<T>]) -> (Point2<T>, Point2<T>) {
    assert!(!points.is_empty(), "bounding rectangle of an empty set");
    let mut min = points[0];
    let mut max = points[0];
    for p in &points[1..] {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    (min, max)
}

/// Drops `config.num_users` users uniformly over the grid's bounding
/// rectangle. Draw order is fixed: per user, x first, then y.
pub fn place_users<T: Scalar, R: Rng + ?Sized>(
    topology: &[Point2<T>],
    config: &NetworkConfig<T>,
    rng: &mut R,
) -> Vec<Point2<T>> {
    let (min, max) = bounding_rect(topology);
    (0..config.num_users)
        .map(|_| {
            let x = T::uniform(rng, min.x, max.x);
            let y = T::uniform(rng, min.y, max.y);
            Point2::new(x, y)
        })
        .collect()
}

/// Shadow-fading covariance across users: `std^2 * 2^(-distance / d_half)`.
///
/// Shared by every AP; draws for different APs are independent.
pub fn shadow_covariance<T: Scalar>(users: &[Point2<T>], config: &NetworkConfig<T>) -> DenseMatrix<T> {
    let n = users.len();
    let var = config.shadow_std_db * config.shadow_std_db;
    let mut cov = DenseMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let delta = users[a].planar_distance(&users[b]);
            let corr = cast::<T>(2.0).powf(-delta / config.shadow_decorrelation_distance);
            cov.set(a, b, var * corr);
        }
    }
    cov
}

/// Draws the shadow-fading field in dB: one row per AP, one column per user.
///
/// Each row is an independent draw from `N(0, C)` with `C` from
/// [`shadow_covariance`], generated through the Cholesky square root of `C`.
/// Co-located users make `C` singular; a single diagonal jitter of `1e-9` is
/// applied and the factorization retried once before giving up. A zero
/// shadow standard deviation yields an all-zero field and consumes no
/// randomness.
pub fn shadow_fields<T: Scalar, R: Rng + ?Sized>(
    users: &[Point2<T>],
    config: &NetworkConfig<T>,
    rng: &mut R,
) -> Result<DenseMatrix<T>> {
    let n = users.len();
    let r = config.num_aps;
    if config.shadow_std_db == T::zero() {
        return Ok(DenseMatrix::zeros(r, n));
    }

    let cov = shadow_covariance(users, config);
    let factor = match cov.cholesky_lower() {
        Some(l) => l,
        None => {
            let mut jittered = cov;
            for i in 0..n {
                let bumped = jittered.get(i, i) + cast(1e-9);
                jittered.set(i, i, bumped);
            }
            jittered.cholesky_lower().ok_or_else(|| {
                Error::Numerical(
                    "shadow covariance is not positive definite even after diagonal jitter".into(),
                )
            })?
        }
    };

    let mut fields = DenseMatrix::zeros(r, n);
    let mut white = vec![T::zero(); n];
    for ap in 0..r {
        for w in white.iter_mut() {
            *w = T::standard_normal(rng);
        }
        let correlated = factor.matvec(&white);
        fields.set_row(ap, &correlated);
    }
    Ok(fields)
}

/// Large-scale link gains: one row per AP, one column per user, linear power.
///
/// Gain in dB is `intercept - slope * log10(d) + shadow`, with `d` the 3-D
/// distance including the AP height offset; the returned entries are
/// `10^(gain_dB / 10)`.
pub fn large_scale_fading<T: Scalar, R: Rng + ?Sized>(
    topology: &[Point2<T>],
    users: &[Point2<T>],
    config: &NetworkConfig<T>,
    rng: &mut R,
) -> Result<DenseMatrix<T>> {
    let shadows = shadow_fields(users, config, rng)?;
    let height_sq = config.ap_height_offset * config.ap_height_offset;
    let ten: T = cast(10.0);

    let mut gains = DenseMatrix::zeros(topology.len(), users.len());
    for (r, ap) in topology.iter().enumerate() {
        for (n, user) in users.iter().enumerate() {
            let planar = ap.planar_distance(user);
            let distance = (planar * planar + height_sq).sqrt();
            let gain_db = config.pathloss_intercept_db
                - config.pathloss_db_per_decade * distance.log10()
                + shadows.get(r, n);
            gains.set(r, n, ten.powf(gain_db / ten));
        }
    }
    Ok(gains)
}

/// One small-scale fading draw for a whole network.
///
/// `h[user]` concatenates the AP blocks: entry `r * K + k` is the channel
/// from user to antenna `k` of AP `r`. Entries are circularly symmetric
/// complex Gaussians whose mean power equals the link gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    h: Vec<Vec<Complex<T>>>,
    num_aps: usize,
    antennas_per_ap: usize,
    noise_power: T,
}

impl<T: Scalar> ChannelRealization<T> {
    /// Assembles a realization from explicit channel vectors, e.g. synthetic
    /// channels in tests. Each user's vector must hold `num_aps * antennas`
    /// entries in AP-block order.
    pub fn from_parts(
        h: Vec<Vec<Complex<T>>>,
        num_aps: usize,
        antennas_per_ap: usize,
        noise_power: T,
    ) -> Self {
        assert!(noise_power > T::zero(), "noise power must be positive");
        for (user, entries) in h.iter().enumerate() {
            assert_eq!(
                entries.len(),
                num_aps * antennas_per_ap,
                "user {user} channel length"
            );
        }
        Self {
            h,
            num_aps,
            antennas_per_ap,
            noise_power,
        }
    }

    pub fn num_users(&self) -> usize {
        self.h.len()
    }

    pub fn num_aps(&self) -> usize {
        self.num_aps
    }

    pub fn antennas_per_ap(&self) -> usize {
        self.antennas_per_ap
    }

    /// Noise power in linear watts, taken from the generating scenario.
    pub fn noise_power(&self) -> T {
        self.noise_power
    }

    /// Full stacked channel vector of one user (length `R * K`).
    pub fn user(&self, user: usize) -> &[Complex<T>] {
        &self.h[user]
    }

    /// The K entries of one user's channel at one AP.
    pub fn block(&self, user: usize, ap: usize) -> &[Complex<T>] {
        let k = self.antennas_per_ap;
        &self.h[user][ap * k..(ap + 1) * k]
    }
}

/// Draws independent Rayleigh fading on top of the given large-scale gains.
///
/// Per entry: real and imaginary parts are `N(0, gain/2)`, so the expected
/// entry power is exactly the linear gain. Draw order is fixed: user-major,
/// then AP, then antenna, real part before imaginary part.
pub fn draw_channel<T: Scalar, R: Rng + ?Sized>(
    gains: &DenseMatrix<T>,
    config: &NetworkConfig<T>,
    rng: &mut R,
) -> ChannelRealization<T> {
    let num_aps = gains.nrows();
    let num_users = gains.ncols();
    let k = config.antennas_per_ap;
    let half: T = cast(0.5);

    let mut h = Vec::with_capacity(num_users);
    for user in 0..num_users {
        let mut entries = Vec::with_capacity(num_aps * k);
        for ap in 0..num_aps {
            let scale = (gains.get(ap, user) * half).sqrt();
            for _ in 0..k {
                let re = scale * T::standard_normal(rng);
                let im = scale * T::standard_normal(rng);
                entries.push(Complex::new(re, im));
            }
        }
        h.push(entries);
    }

    ChannelRealization {
        h,
        num_aps,
        antennas_per_ap: k,
        noise_power: config.noise_power_watts(),
    }
}

/// Everything that is fixed for one trial before small-scale fading.
#[derive(Debug, Clone)]
pub struct NetworkInstance<T> {
    pub config: NetworkConfig<T>,
    pub ap_positions: Vec<Point2<T>>,
    pub user_positions: Vec<Point2<T>>,
    /// Large-scale link gains, APs along rows and users along columns.
    pub gains: DenseMatrix<T>,
}

/// Named sub-streams of a trial's randomness, in consumption order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngStream {
    UserPositions = 0,
    Shadowing = 1,
    Fading = 2,
}

/// Independent generator for one sub-stream of one trial.
///
/// All sub-streams share the scenario seed and select disjoint ChaCha
/// streams, so adding draws to one stage never perturbs another.
pub fn substream_rng(seed: u64, trial: u64, stream: RngStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial * 4 + stream as u64);
    rng
}

/// Generates the complete channel state for one trial index.
///
/// Consumes the sub-streams in fixed order (positions, shadowing, fading) so
/// repeated calls with the same seed and trial reproduce the instance bit
/// for bit.
pub fn generate_instance<T: Scalar>(
    config: &NetworkConfig<T>,
    trial: u64,
) -> Result<(NetworkInstance<T>, ChannelRealization<T>)> {
    config.validate()?;
    let topology = build_topology(config)?;

    let mut rng = substream_rng(config.rng_seed, trial, RngStream::UserPositions);
    let users = place_users(&topology, config, &mut rng);

    let mut rng = substream_rng(config.rng_seed, trial, RngStream::Shadowing);
    let gains = large_scale_fading(&topology, &users, config, &mut rng)?;

    let mut rng = substream_rng(config.rng_seed, trial, RngStream::Fading);
    let channel = draw_channel(&gains, config, &mut rng);

    let instance = NetworkInstance {
        config: config.clone(),
        ap_positions: topology,
        user_positions: users,
        gains,
    };
    Ok((instance, channel))
}
