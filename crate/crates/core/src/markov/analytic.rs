use crate::error::{Error, Result};
use crate::scalar::{count, real, Real};

fn rotation_angle<T: Real>(database_size: usize) -> Result<T> {
    if database_size < 8 {
        return Err(Error::invalid("N", format!("need N >= 8, got {database_size}")));
    }
    Ok((real::<T>(2.0) / count(database_size)).acos())
}

/// `P(t) = cos^2(theta t) (tan(theta/2) tan(theta t) - 1)^2 / N`,
/// `theta = arccos(2/N)`: success probability when the sigma_x-noisy
/// operator fires at every step. Accepts non-integer `t`.
pub fn perfect_memory_analytic<T: Real>(database_size: usize, t: T) -> Result<T> {
    let theta = rotation_angle::<T>(database_size)?;
    let c = (theta * t).cos();
    let s = (theta * t).sin();
    // cos(x)(tan(a) tan(x) - 1) = tan(a) sin(x) - cos(x), finite everywhere
    let amp = (theta * real(0.5)).tan() * s - c;
    Ok(amp * amp / count(database_size))
}

/// Location of the first maximum of [`perfect_memory_analytic`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstMaximum<T> {
    /// `pi/theta - 1/2`
    pub exact: T,
    /// Large-`N` expansion `3/2 + 8/(pi N)`.
    pub approx: T,
}

pub fn perfect_memory_first_max<T: Real>(database_size: usize) -> Result<FirstMaximum<T>> {
    let theta = rotation_angle::<T>(database_size)?;
    Ok(FirstMaximum {
        exact: T::PI() / theta - real(0.5),
        approx: real::<T>(1.5) + real::<T>(8.0) / (T::PI() * count(database_size)),
    })
}
