use crate::scalar::Real;

/// Natural cubic spline through `(xs, ys)` evaluated at `0, 1, ..., n - 1`.
///
/// `xs` must be strictly increasing with at least two knots.
pub(crate) fn natural_spline_on_grid<T: Real>(xs: &[T], ys: &[T], n: usize) -> Vec<T> {
    let k = xs.len();
    debug_assert!(k >= 2 && ys.len() == k);
    let two = T::lit(2.0);
    let six = T::lit(6.0);

    // Second derivatives; natural boundary sets the end values to zero.
    let mut m = vec![T::zero(); k];
    if k > 2 {
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let inner = k - 2;
        let mut diag = vec![T::zero(); inner];
        let mut upper = vec![T::zero(); inner];
        let mut rhs = vec![T::zero(); inner];
        for i in 0..inner {
            diag[i] = two * (h[i] + h[i + 1]);
            upper[i] = h[i + 1];
            rhs[i] = six * ((ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i]);
        }
        // Thomas algorithm; the sub-diagonal equals h[i] for row i.
        for i in 1..inner {
            let w = h[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            let prev = rhs[i - 1];
            rhs[i] -= w * prev;
        }
        m[inner] = rhs[inner - 1] / diag[inner - 1];
        for i in (0..inner - 1).rev() {
            m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
        }
    }

    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for j in 0..n {
        let x = T::from_usize_exact(j);
        while seg + 2 < k && xs[seg + 1] < x {
            seg += 1;
        }
        let (x0, x1) = (xs[seg], xs[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let v = a * ys[seg]
            + b * ys[seg + 1]
            + ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / six;
        out.push(v);
    }
    out
}
