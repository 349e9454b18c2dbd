//! Complex signal vectors and the real/complex field tag.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Whether a signal (and the matching measurement model) lives over the
/// reals or the complex numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldKind::Real => write!(f, "real"),
            FieldKind::Complex => write!(f, "complex"),
        }
    }
}

/// A length-`n` signal vector; the ground truth `x` and all iterates `z`.
///
/// For `FieldKind::Real` every imaginary part is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<Complex64>,
    field_kind: FieldKind,
}

impl Signal {
    /// Real signal from real values.
    pub fn real(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("signal length must be >= 1".into()));
        }
        Ok(Signal {
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            field_kind: FieldKind::Real,
        })
    }

    /// Complex signal from complex values.
    pub fn complex(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("signal length must be >= 1".into()));
        }
        Ok(Signal {
            values,
            field_kind: FieldKind::Complex,
        })
    }

    /// Signal from complex values with an explicit field tag; real-kind
    /// inputs must have exactly zero imaginary parts.
    pub fn new(values: Vec<Complex64>, field_kind: FieldKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("signal length must be >= 1".into()));
        }
        if field_kind == FieldKind::Real && values.iter().any(|v| v.im != 0.0) {
            return Err(Error::InvalidParameter(
                "real signal has nonzero imaginary part".into(),
            ));
        }
        Ok(Signal { values, field_kind })
    }

    /// Gaussian random signal: `N(0, I)` entries for the real kind,
    /// `N(0, I/2) + jN(0, I/2)` for the complex kind.
    pub fn random(n: usize, field_kind: FieldKind, rng: &mut Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("signal length must be >= 1".into()));
        }
        let values = match field_kind {
            FieldKind::Real => (0..n)
                .map(|_| Complex64::new(rng.next_normal(), 0.0))
                .collect(),
            FieldKind::Complex => {
                let s = 0.5f64.sqrt();
                (0..n)
                    .map(|_| Complex64::new(s * rng.next_normal(), s * rng.next_normal()))
                    .collect()
            }
        };
        Ok(Signal { values, field_kind })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn field_kind(&self) -> FieldKind {
        self.field_kind
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `self + alpha * dir`, preserving the field tag. For real signals the
    /// direction must be real too (imaginary parts exactly zero).
    pub fn axpy(&self, alpha: Complex64, dir: &[Complex64]) -> Result<Signal> {
        if dir.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: dir.len(),
            });
        }
        let values: Vec<Complex64> = self
            .values
            .iter()
            .zip(dir)
            .map(|(v, d)| v + alpha * d)
            .collect();
        Signal::new(values, self.field_kind)
    }

    /// Multiply by a complex scalar. Rotating a real signal by a non-real
    /// phase yields a complex-kind signal.
    pub fn scale(&self, factor: Complex64) -> Signal {
        let values = self.values.iter().map(|v| v * factor).collect();
        let field_kind = if self.field_kind == FieldKind::Real && factor.im == 0.0 {
            FieldKind::Real
        } else {
            FieldKind::Complex
        };
        Signal { values, field_kind }
    }
}

/// Inner product `⟨a, z⟩ := Σ conj(a_t) z_t`, conjugate-linear in `a`.
///
/// This is the single convention used throughout the crate; measurement
/// entries are `⟨a_i, z⟩ = a_i* z`.
pub fn inner(a: &[Complex64], z: &[Complex64]) -> Complex64 {
    a.iter().zip(z).map(|(x, y)| x.conj() * y).sum()
}
