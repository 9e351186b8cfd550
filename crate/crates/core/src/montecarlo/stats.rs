/// Count of events out of `n` trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rate {
    pub count: u64,
    pub n: u64,
}

impl Rate {
    pub fn new(count: u64, n: u64) -> Self {
        Rate { count, n }
    }

    pub fn record(&mut self, event: bool) {
        self.n += 1;
        self.count += u64::from(event);
    }

    pub fn merge(&mut self, other: &Rate) {
        self.count += other.count;
        self.n += other.n;
    }

    pub fn value(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.count as f64 / self.n as f64
    }

    /// Binomial standard error at the observed rate.
    pub fn stderr(&self) -> f64 {
        let p = self.value();
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    /// Binomial standard deviation of the estimate if the true rate were
    /// `target`.
    pub fn sigma_at(&self, target: f64) -> f64 {
        (target * (1.0 - target) / self.n as f64).sqrt()
    }

    /// Deviation from `target` in units of [`sigma_at`](Self::sigma_at).
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value() - target) / self.sigma_at(target)
    }

    /// `|rate - target| <= k σ(target)`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value() - target).abs() <= k * self.sigma_at(target)
    }
}

/// Streaming mean/variance/extremes. Merging follows Chan et al., so the
/// result depends only on the order in which partial summaries are merged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for Moments {
    fn default() -> Self {
        Moments {
            n: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += d * nb / n as f64;
        self.m2 += other.m2 + d * d * na * nb / n as f64;
        self.n = n;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.m2 / (self.n - 1) as f64
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}
