//! Correctly rounded sums of products, used where reproduction must be exact.
//!
//! Products are split exactly with a fused multiply-add and accumulated as a
//! list of nonoverlapping partials (Shewchuk); the final rounding follows the
//! half-way correction of Python's `math.fsum`.

#[derive(Clone, Debug, Default)]
pub(crate) struct ExactDot {
    partials: Vec<f64>,
}

impl ExactDot {
    pub fn new() -> Self {
        ExactDot::default()
    }

    fn push(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Adds `a * b` without intermediate rounding.
    pub fn add(&mut self, a: f64, b: f64) {
        let h = a * b;
        let r = a.mul_add(b, -h);
        self.push(h);
        if r != 0.0 {
            self.push(r);
        }
    }

    pub fn value(self) -> f64 {
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        if !hi.is_finite() {
            return p.iter().sum();
        }
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round half-way cases using the sign of the next partial
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancels_without_rounding() {
        let t = 0.1 + 0.2;
        let eps = 1.0 / 3.0;
        let mut acc = ExactDot::new();
        acc.add(0.5, eps);
        acc.add(1.0, t);
        acc.add(-1.0, eps);
        acc.add(0.5, eps);
        assert_eq!(acc.value(), t);
    }

    #[test]
    fn products_are_exact() {
        // 0.1 * 0.1 rounds; the residual term must survive
        let mut acc = ExactDot::new();
        acc.add(0.1, 0.1);
        acc.add(-1.0, 0.1 * 0.1);
        assert_eq!(acc.value(), 0.1f64.mul_add(0.1, -(0.1 * 0.1)));
        let mut acc = ExactDot::new();
        for x in [1e100, 1.0, -1e100] {
            acc.add(x, 1.0);
        }
        assert_eq!(acc.value(), 1.0);
        assert_eq!(ExactDot::new().value(), 0.0);
    }

    #[test]
    fn half_way_rounding() {
        // 1 + 2^-53 + 2^-80 must round up
        let mut acc = ExactDot::new();
        for x in [1.0, 2f64.powi(-53), 2f64.powi(-80)] {
            acc.add(x, 1.0);
        }
        assert_eq!(acc.value(), 1.0 + f64::EPSILON);
    }
}
