use crate::scalar::Real;

/// `C^∞` step: 0 for `u ≤ 0`, 1 for `u ≥ 1`, built from `e^{-1/u}`.
pub fn smooth_step<T: Real>(u: T) -> T {
    if u <= T::zero() {
        return T::zero();
    }
    if u >= T::one() {
        return T::one();
    }
    let a = (-T::one() / u).exp();
    let b = (-T::one() / (T::one() - u)).exp();
    a / (a + b)
}

/// Library-wide cutoff `Φ`: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, smooth and even.
pub fn standard_cutoff<T: Real>(t: T) -> T {
    T::one() - smooth_step(t.abs() - T::one())
}
