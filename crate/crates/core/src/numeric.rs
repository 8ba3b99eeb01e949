/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `|a - b| / |a|`, zero when both vanish.
pub fn relative_deviation(reference: f64, other: f64) -> f64 {
    if reference == other {
        0.0
    } else if reference == 0.0 {
        f64::INFINITY
    } else {
        ((other - reference) / reference).abs()
    }
}
