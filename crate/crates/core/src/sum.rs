//! Compensated summation.

/// Neumaier's improved Kahan–Babuška running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Combines two partial sums. Symmetric in its arguments.
    pub fn merge(&self, other: &NeumaierSum) -> NeumaierSum {
        // two-sum error of the leading parts is exact, hence order-independent.
        let t = self.sum + other.sum;
        let err = if self.sum.abs() >= other.sum.abs() {
            (self.sum - t) + other.sum
        } else {
            (other.sum - t) + self.sum
        };
        NeumaierSum { sum: t, compensation: (self.compensation + other.compensation) + err }
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
