use num_complex::Complex;

use super::SampledFunction;
use crate::scalar::Real;

/// Discrete Hardy–Littlewood maximal function: at each grid point, the largest
/// average of `|f|` over runs of consecutive cells containing it. Runs do not
/// wrap around the period.
pub fn hardy_littlewood_max<T: Real>(f: &SampledFunction<T>) -> SampledFunction<T> {
    let n = f.len();
    let abs: Vec<T> = f.values().iter().map(|v| v.norm()).collect();
    let mut out = vec![T::zero(); n];
    let mut avg = vec![T::zero(); n];
    for a in 0..n {
        let mut s = T::zero();
        for b in a..n {
            s += abs[b];
            avg[b] = s / T::of_usize(b - a + 1);
        }
        // suffix max over right endpoints, folded into points x ≥ a
        let mut best = T::zero();
        for x in (a..n).rev() {
            best = best.max(avg[x]);
            out[x] = out[x].max(best);
        }
    }
    SampledFunction::new(*f.grid(), out.into_iter().map(|v| Complex::new(v, T::zero())).collect())
        .expect("same length")
}
