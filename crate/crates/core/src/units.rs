//! Power and gain unit conversions (dBm, dB, linear).

use crate::scalar::{cast, Scalar};

/// Converts a power in dBm to linear watts.
pub fn dbm_to_watts<T: Scalar>(dbm: T) -> T {
    cast::<T>(10.0).powf((dbm - cast(30.0)) / cast(10.0))
}

/// Converts a power in linear watts to dBm.
pub fn watts_to_dbm<T: Scalar>(watts: T) -> T {
    cast::<T>(10.0) * watts.log10() + cast(30.0)
}

/// Converts a gain in dB to a linear power ratio.
pub fn db_to_linear<T: Scalar>(db: T) -> T {
    cast::<T>(10.0).powf(db / cast(10.0))
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db<T: Scalar>(linear: T) -> T {
    cast::<T>(10.0) * linear.log10()
}
