//! Real elementary functions that resolve to libm without `std`.

use num_traits::Float;

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    Float::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    Float::cos(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}
