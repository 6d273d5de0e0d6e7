//! The quintic smoothstep `g(s) = 10s³ − 15s⁴ + 6s⁵` on `s ∈ [0, 1]`.
//!
//! `g(0) = 0`, `g(1) = 1`, and the first two derivatives vanish at both ends.
//! It is used for the scaling-factor ansatz, the smooth ω² reference ramps and
//! the bundled parameter schedules of the counterdiabatic paths.

/// Value and the first four derivatives with respect to `s`.
#[inline]
pub fn smoothstep5(s: f64) -> [f64; 5] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        s3 * (10.0 - 15.0 * s + 6.0 * s2),
        30.0 * s2 * (1.0 - 2.0 * s + s2),
        60.0 * s * (1.0 - 3.0 * s + 2.0 * s2),
        60.0 - 360.0 * s + 360.0 * s2,
        -360.0 + 720.0 * s,
    ]
}
