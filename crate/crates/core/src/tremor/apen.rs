use crate::scalar::{population_std, Real};

/// Approximate entropy `Φ^m − Φ^{m+1}` with tolerance `r_factor · SD`, Chebyshev
/// distance and self-matches included. Zero for a constant series.
pub fn approximate_entropy<T: Real>(x: &[T], m: usize, r_factor: f64) -> T {
    let n = x.len();
    let sd = population_std(x).unwrap_or(T::zero());
    if sd == T::zero() || n <= m + 1 || m == 0 {
        return T::zero();
    }
    let r = T::lit(r_factor) * sd;
    let templates_m = n - m + 1;
    let templates_m1 = n - m;
    // counts[i] = matches of template i at length m; longer[i] at length m + 1.
    let mut counts = vec![1usize; templates_m];
    let mut longer = vec![0usize; templates_m1];
    longer.iter_mut().for_each(|c| *c = 1);
    for i in 0..templates_m {
        for j in i + 1..templates_m {
            if (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                counts[i] += 1;
                counts[j] += 1;
                if j < templates_m1 && (x[i + m] - x[j + m]).abs() <= r {
                    longer[i] += 1;
                    longer[j] += 1;
                }
            }
        }
    }
    let phi = |c: &[usize]| -> T {
        let total = T::from_usize_exact(c.len());
        c.iter().map(|&k| (T::from_usize_exact(k) / total).ln()).sum::<T>() / total
    };
    phi(&counts) - phi(&longer)
}
