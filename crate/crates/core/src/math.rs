// Thin wrappers so every float op goes through libm in both std and no_std builds.

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// |x|^y with 0^y = 0 for y > 0.
#[inline]
pub fn powabs(x: f64, y: f64) -> f64 {
    let a = abs(x);
    if a == 0.0 {
        if y == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        pow(a, y)
    }
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}
