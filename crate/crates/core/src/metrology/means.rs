use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type MeanFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A symmetric, normalized mean `m(a, b)` on the non-negative reals.
///
/// Each mean generates one generalized variance and one generalized Fisher
/// information. `m(1, 0)` fixes their normalization on pure states.
#[derive(Clone)]
pub struct MeanFunction {
    name: String,
    evaluate: Arc<MeanFn>,
    at_one_zero: f64,
}

impl MeanFunction {
    /// Plug-in point for means outside the catalog.
    pub fn new(name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let at_one_zero = f(1.0, 0.0);
        Self {
            name: name.into(),
            evaluate: Arc::new(f),
            at_one_zero,
        }
    }

    pub fn arithmetic() -> Self {
        Self::new("arithmetic", |a, b| 0.5 * (a + b))
    }

    pub fn harmonic() -> Self {
        Self::new("harmonic", |a, b| {
            if a + b == 0.0 {
                0.0
            } else {
                2.0 * a * b / (a + b)
            }
        })
    }

    pub fn geometric() -> Self {
        Self::new("geometric", |a, b| (a * b).sqrt())
    }

    pub fn logarithmic() -> Self {
        Self::new("logarithmic", logarithmic_mean)
    }

    pub fn wigner_yanase() -> Self {
        Self::new("wigner-yanase", |a, b| {
            let s = 0.5 * (a.sqrt() + b.sqrt());
            s * s
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, a: f64, b: f64) -> f64 {
        (self.evaluate)(a, b)
    }

    /// `m(1, 0)`.
    pub fn at_one_zero(&self) -> f64 {
        self.at_one_zero
    }
}

impl fmt::Debug for MeanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeanFunction")
            .field("name", &self.name)
            .field("at_one_zero", &self.at_one_zero)
            .finish()
    }
}

/// `(a − b) / (ln a − ln b)`, with `L(a, a) = a` and `L(a, 0) = 0`.
fn logarithmic_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let rel = (hi - lo) / lo;
    if rel == 0.0 {
        return a;
    }
    if rel < 1e-4 {
        // Series of x / ln(1 + x) around 0.
        return lo * (1.0 + rel / 2.0 - rel * rel / 12.0 + rel * rel * rel / 24.0);
    }
    (hi - lo) / rel.ln_1p()
}

/// Ordered list of means. Always contains arithmetic and harmonic.
#[derive(Debug, Clone)]
pub struct MeanCatalog {
    means: Vec<MeanFunction>,
}

impl MeanCatalog {
    pub fn standard() -> Self {
        Self {
            means: vec![
                MeanFunction::arithmetic(),
                MeanFunction::harmonic(),
                MeanFunction::geometric(),
                MeanFunction::logarithmic(),
                MeanFunction::wigner_yanase(),
            ],
        }
    }

    pub fn push(&mut self, mean: MeanFunction) {
        self.means.push(mean);
    }

    pub fn iter(&self) -> impl Iterator<Item = &MeanFunction> {
        self.means.iter()
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.means.iter().map(|m| m.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&MeanFunction> {
        self.means
            .iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownMean {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

impl Default for MeanCatalog {
    fn default() -> Self {
        Self::standard()
    }
}
