use crate::{BackendError, Result};

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Clone, Copy)]
struct Cell {
    cost: f64,
    len: u32,
}

impl Cell {
    /// Lower cost wins; equal costs prefer the longer path.
    fn better(self, other: Cell) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.len > other.len)
    }
}

/// Dynamic time warping distance under Euclidean frame distance: the total
/// cost of the cheapest monotone alignment (steps right, down, diagonal)
/// divided by its number of cells. Among equally cheap alignments the
/// longest is used. Symmetric in its arguments.
pub fn dtw_distance<T: AsRef<[f64]>>(a: &[T], b: &[T]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(BackendError::Domain("dtw of an empty sequence".into()));
    }
    let m = b.len();
    let mut prev = vec![Cell { cost: f64::INFINITY, len: 0 }; m];
    let mut cur = prev.clone();
    for (i, ai) in a.iter().enumerate() {
        for j in 0..m {
            let d = euclidean(ai.as_ref(), b[j].as_ref());
            let best = if i == 0 && j == 0 {
                Cell { cost: 0.0, len: 0 }
            } else {
                let mut best = Cell { cost: f64::INFINITY, len: 0 };
                if i > 0 {
                    best = prev[j];
                    if j > 0 && prev[j - 1].better(best) {
                        best = prev[j - 1];
                    }
                }
                if j > 0 && cur[j - 1].better(best) {
                    best = cur[j - 1];
                }
                best
            };
            cur[j] = Cell {
                cost: best.cost + d,
                len: best.len + 1,
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let end = prev[m - 1];
    Ok(end.cost / f64::from(end.len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> Vec<[f64; 1]> {
        v.iter().map(|&x| [x]).collect()
    }

    #[test]
    fn identical_is_zero() {
        let a = seq(&[0.3, -1.0, 2.0, 2.5]);
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn repeated_frame_aligns_for_free() {
        assert_eq!(dtw_distance(&seq(&[0.0, 0.0, 1.0]), &seq(&[0.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn single_frames() {
        let d = dtw_distance(&[[3.0, 4.0]], &[[0.0, 0.0]]).unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn empty_rejected() {
        let e: Vec<[f64; 1]> = vec![];
        assert!(dtw_distance(&e, &seq(&[1.0])).is_err());
    }
}
