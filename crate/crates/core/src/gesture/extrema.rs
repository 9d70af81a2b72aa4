use crate::scalar::Real;

/// Counts interior turning points of `xs` whose swing on both sides is at least
/// `prominence` (zig-zag filter). Endpoints are never counted.
pub fn count_turning_points<T: Real>(xs: &[T], prominence: T) -> usize {
    #[derive(Clone, Copy)]
    enum Dir {
        Unknown,
        Up,
        Down,
    }
    let Some(&first) = xs.first() else {
        return 0;
    };
    let prominence = prominence.max(T::min_positive_value());
    let (mut lo, mut hi) = (first, first);
    let mut dir = Dir::Unknown;
    let mut candidate = first;
    let mut count = 0;
    for &x in &xs[1..] {
        match dir {
            Dir::Unknown => {
                lo = lo.min(x);
                hi = hi.max(x);
                if x - lo >= prominence {
                    dir = Dir::Up;
                    candidate = x;
                } else if hi - x >= prominence {
                    dir = Dir::Down;
                    candidate = x;
                }
            }
            Dir::Up => {
                if x > candidate {
                    candidate = x;
                } else if candidate - x >= prominence {
                    count += 1;
                    dir = Dir::Down;
                    candidate = x;
                }
            }
            Dir::Down => {
                if x < candidate {
                    candidate = x;
                } else if x - candidate >= prominence {
                    count += 1;
                    dir = Dir::Up;
                    candidate = x;
                }
            }
        }
    }
    count
}

/// Extremum count used by NCF/NCA: a stroke without any qualifying turning point
/// (a plateau or a monotone ramp) counts as one extremum.
pub fn extrema_count<T: Real>(xs: &[T], prominence: T) -> usize {
    count_turning_points(xs, prominence).max(1)
}
