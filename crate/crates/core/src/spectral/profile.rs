//! The fixed C-infinity cutoff profile and bumps built from it.

/// Smooth step: 0 for `x <= 0`, 1 for `x >= 1`, C-infinity in between,
/// built from the flat function `exp(-1/x)`.
pub fn smooth_step(x: f64) -> f64 {
    fn g(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }
    let a = g(x);
    let b = g(1.0 - x);
    a / (a + b)
}

/// Radial cutoff `chi(r)`: identically 1 for `r <= 1/2`, identically 0 for
/// `r >= 2`, smooth and monotone in between.
pub fn smooth_cutoff(r: f64) -> f64 {
    1.0 - smooth_step((r - 0.5) / 1.5)
}

/// Smooth bump supported in `[1/2, 2]` with a plateau at 1; `radial_bump(s/2^k)`
/// is supported in `[2^(k-1), 2^(k+1)]`.
pub fn radial_bump(u: f64) -> f64 {
    smooth_step((u - 0.5) * 4.0) * smooth_step(2.0 - u)
}
