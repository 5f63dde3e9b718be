//! Float math shims for `no_std` builds. Everything that is not available
//! in `core` goes through `libm`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn hypot_sq(v: &[f64]) -> f64 {
    v.iter().map(|&x| x * x).sum()
}

/// Euclidean norm without overflow care; fine at the magnitudes this
/// solver works with.
#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    sqrt(hypot_sq(v))
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
