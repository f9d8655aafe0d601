//! Compensated accumulation for long orbit sums.

use num_complex::Complex64;

/// Kahan-Babuška (Neumaier) running sum of `f64`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of complex numbers, one Neumaier accumulator per part.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
    count: u64,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
        self.count += 1;
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Sum divided by the number of terms added (0 when empty).
    pub fn mean(&self) -> Complex64 {
        if self.count == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.value() / self.count as f64
        }
    }
}
