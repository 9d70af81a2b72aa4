use crate::error::{Error, Result};
use crate::scalar::{population_std, Real};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RqaParams {
    pub dim: usize,
    pub delay: usize,
    /// Recurrence radius as a fraction of the series SD.
    pub eps_factor: f64,
    /// Minimum diagonal line length counted as deterministic.
    pub l_min: usize,
}

impl Default for RqaParams {
    fn default() -> Self {
        RqaParams { dim: 3, delay: 2, eps_factor: 0.5, l_min: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RqaMeasures<T> {
    /// Recurrence rate, main diagonal excluded.
    pub rr: T,
    /// Fraction of recurrent points on diagonal lines of length ≥ `l_min`.
    pub det: T,
}

/// Recurrence rate and determinism over a time-delay embedding with Euclidean
/// distance. The recurrence test is `distance ≤ eps`, so a constant series (SD = 0)
/// recurs everywhere.
pub fn rqa<T: Real>(x: &[T], params: &RqaParams) -> Result<RqaMeasures<T>> {
    let span = (params.dim.max(1) - 1) * params.delay;
    let required = params.dim * params.delay + 10;
    if x.len() < required {
        return Err(Error::TooShortForRqa { len: x.len(), required });
    }
    let m = x.len() - span;
    let eps = (T::lit(params.eps_factor) * population_std(x).unwrap_or(T::zero())).max(T::epsilon());
    let eps2 = eps * eps;
    let dim = params.dim;
    let delay = params.delay;
    let dist2 = |i: usize, j: usize| -> T {
        let mut s = T::zero();
        for k in 0..dim {
            let d = x[i + k * delay] - x[j + k * delay];
            s += d * d;
        }
        s
    };

    // Scan each upper diagonal; the matrix is symmetric so counts double out.
    let mut recurrent = 0usize;
    let mut on_lines = 0usize;
    for offset in 1..m {
        let mut run = 0usize;
        for i in 0..m - offset {
            if dist2(i, i + offset) <= eps2 {
                recurrent += 1;
                run += 1;
            } else {
                if run >= params.l_min {
                    on_lines += run;
                }
                run = 0;
            }
        }
        if run >= params.l_min {
            on_lines += run;
        }
    }
    let off_diagonal = m * (m - 1) / 2;
    let rr = T::from_usize_exact(recurrent) / T::from_usize_exact(off_diagonal);
    let det = if recurrent == 0 {
        T::zero()
    } else {
        T::from_usize_exact(on_lines) / T::from_usize_exact(recurrent)
    };
    Ok(RqaMeasures { rr, det })
}
