//! Measurement ensembles and the intensity forward map.
//!
//! Two ensemble families are supported: explicit Gaussian sensing vectors and
//! coded diffraction patterns (random masks followed by an unnormalized DFT).
//! Measurement `i` of a signal `z` is the inner product `⟨a_i, z⟩ = a_i* z`
//! (conjugate-linear in `a_i`); observed intensities are `y_i = |a_i* z|²`.
//!
//! With that convention the adjoint of `z ↦ (a_i* z)_i` is
//! `c ↦ Σ_i c_i a_i`, and `⟨forward(z), c⟩ = ⟨z, adjoint_accumulate(c)⟩`
//! holds exactly for the elementwise inner product `⟨u, v⟩ = Σ conj(u_i) v_i`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{fft_in_place, Direction};
use crate::rng::Rng;
use crate::signal::{inner, FieldKind, Signal};

/// Observed intensities `y_i`, with the optional additive noise that was
/// folded into them.
#[derive(Debug, Clone)]
pub struct IntensityVector {
    values: Vec<f64>,
    noise: Option<Vec<f64>>,
}

impl IntensityVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise(&self) -> Option<&[f64]> {
        self.noise.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Intensities from raw values (test and I/O plumbing).
    pub fn from_values(values: Vec<f64>) -> Self {
        IntensityVector {
            values,
            noise: None,
        }
    }
}

#[derive(Debug, Clone)]
enum EnsembleKind {
    Gaussian { vectors: Vec<Vec<Complex64>> },
    Cdp { masks: Vec<Vec<Complex64>> },
}

/// A measurement ensemble: `m` sensing functionals over length-`n` signals.
///
/// Ensembles are immutable after construction and are reconstructed from
/// `(seed, parameters)` rather than serialized.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble {
    kind: EnsembleKind,
    n: usize,
    field_kind: FieldKind,
    seed: u64,
}

/// Gaussian ensemble: `m` vectors with i.i.d. `N(0, 1)` entries (real kind)
/// or `N(0, 1/2) + jN(0, 1/2)` entries (complex kind).
pub fn gen_gaussian_ensemble(
    n: usize,
    m: usize,
    field_kind: FieldKind,
    seed: u64,
) -> Result<MeasurementEnsemble> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian ensemble needs n >= 1 and m >= 1, got n={n}, m={m}"
        )));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let vectors = (0..m)
        .map(|_| match field_kind {
            FieldKind::Real => (0..n)
                .map(|_| Complex64::new(rng.next_normal(), 0.0))
                .collect(),
            FieldKind::Complex => {
                let s = 0.5f64.sqrt();
                (0..n)
                    .map(|_| Complex64::new(s * rng.next_normal(), s * rng.next_normal()))
                    .collect()
            }
        })
        .collect();
    Ok(MeasurementEnsemble {
        kind: EnsembleKind::Gaussian { vectors },
        n,
        field_kind,
        seed,
    })
}

/// Coded-diffraction-pattern ensemble with `L` octanary masks.
///
/// Each mask entry is `d = b1 * b2` with `b1` uniform on `{1, -1, j, -j}`
/// and `b2 = sqrt(2)/2` with probability 4/5, `sqrt(3)` with probability 1/5,
/// giving `E|d|² = 1`. Requires power-of-two `n` (radix-2 FFT).
pub fn gen_cdp_ensemble(n: usize, masks: usize, seed: u64) -> Result<MeasurementEnsemble> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if masks == 0 {
        return Err(Error::InvalidParameter(
            "cdp ensemble needs at least one mask".into(),
        ));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    let lo = 0.5f64.sqrt();
    let hi = 3.0f64.sqrt();
    let mask_vecs = (0..masks)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let b1 = phases[(rng.next_u64() & 3) as usize];
                    let b2 = if rng.next_f64() < 0.8 { lo } else { hi };
                    b1 * b2
                })
                .collect()
        })
        .collect();
    Ok(MeasurementEnsemble {
        kind: EnsembleKind::Cdp { masks: mask_vecs },
        n,
        field_kind: FieldKind::Complex,
        seed,
    })
}

impl MeasurementEnsemble {
    /// Hand-built Gaussian-style ensemble from explicit sensing vectors.
    pub fn from_vectors(vectors: Vec<Vec<Complex64>>, field_kind: FieldKind) -> Result<Self> {
        let n = match vectors.first() {
            Some(v) if !v.is_empty() => v.len(),
            _ => {
                return Err(Error::InvalidParameter(
                    "ensemble needs at least one nonempty vector".into(),
                ))
            }
        };
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidParameter(
                "sensing vectors have inconsistent lengths".into(),
            ));
        }
        Ok(MeasurementEnsemble {
            kind: EnsembleKind::Gaussian { vectors },
            n,
            field_kind,
            seed: 0,
        })
    }

    /// Hand-built CDP ensemble from explicit masks (power-of-two length).
    pub fn from_masks(masks: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = match masks.first() {
            Some(d) => d.len(),
            None => {
                return Err(Error::InvalidParameter(
                    "cdp ensemble needs at least one mask".into(),
                ))
            }
        };
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if masks.iter().any(|d| d.len() != n) {
            return Err(Error::InvalidParameter(
                "masks have inconsistent lengths".into(),
            ));
        }
        Ok(MeasurementEnsemble {
            kind: EnsembleKind::Cdp { masks },
            n,
            field_kind: FieldKind::Complex,
            seed: 0,
        })
    }

    /// Signal length `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Measurement count `m` (Gaussian: number of vectors; CDP: `n * L`).
    pub fn m(&self) -> usize {
        match &self.kind {
            EnsembleKind::Gaussian { vectors } => vectors.len(),
            EnsembleKind::Cdp { masks } => self.n * masks.len(),
        }
    }

    pub fn field_kind(&self) -> FieldKind {
        self.field_kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Gaussian sensing vectors, if this is a Gaussian ensemble.
    pub fn vectors(&self) -> Option<&[Vec<Complex64>]> {
        match &self.kind {
            EnsembleKind::Gaussian { vectors } => Some(vectors),
            EnsembleKind::Cdp { .. } => None,
        }
    }

    /// CDP masks, if this is a CDP ensemble.
    pub fn masks(&self) -> Option<&[Vec<Complex64>]> {
        match &self.kind {
            EnsembleKind::Cdp { masks } => Some(masks),
            EnsembleKind::Gaussian { .. } => None,
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    /// Forward map `z ↦ (⟨a_i, z⟩)_i`.
    ///
    /// Gaussian: entry `i` is `a_i* z`. CDP: for `r = (k1, l)` the entry is
    /// the unnormalized DFT at frequency `k1` of `conj(d_l) ⊙ z`, laid out
    /// mask-major (`out[l*n + k1]`).
    pub fn forward(&self, z: &Signal) -> Result<Vec<Complex64>> {
        self.check_len(z.len())?;
        match &self.kind {
            EnsembleKind::Gaussian { vectors } => {
                Ok(vectors.iter().map(|a| inner(a, z.values())).collect())
            }
            EnsembleKind::Cdp { masks } => {
                let mut out = Vec::with_capacity(self.m());
                let mut buf = vec![Complex64::default(); self.n];
                for mask in masks {
                    for ((b, d), v) in buf.iter_mut().zip(mask).zip(z.values()) {
                        *b = d.conj() * v;
                    }
                    fft_in_place(&mut buf, Direction::Forward)?;
                    out.extend_from_slice(&buf);
                }
                Ok(out)
            }
        }
    }

    /// Adjoint accumulation `c ↦ Σ_i c_i a_i`.
    ///
    /// CDP: per mask `l`, `Σ_{k1} c_{k1,l} a_{(k1,l)} = d_l ⊙ (n · IDFT(c_l))`.
    pub fn adjoint_accumulate(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.m() {
            return Err(Error::LengthMismatch {
                expected: self.m(),
                got: coeffs.len(),
            });
        }
        match &self.kind {
            EnsembleKind::Gaussian { vectors } => {
                let mut acc = vec![Complex64::default(); self.n];
                for (c, a) in coeffs.iter().zip(vectors) {
                    for (s, v) in acc.iter_mut().zip(a) {
                        *s += c * v;
                    }
                }
                Ok(acc)
            }
            EnsembleKind::Cdp { masks } => {
                let mut acc = vec![Complex64::default(); self.n];
                let mut buf = vec![Complex64::default(); self.n];
                // n is a power of two, so scaling by n is exact.
                let n_f = self.n as f64;
                for (l, mask) in masks.iter().enumerate() {
                    buf.copy_from_slice(&coeffs[l * self.n..(l + 1) * self.n]);
                    fft_in_place(&mut buf, Direction::Inverse)?;
                    for ((s, d), b) in acc.iter_mut().zip(mask).zip(&buf) {
                        *s += d * (b * n_f);
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Intensity measurements `y_i = |⟨a_i, x⟩|² + ε_i` (`ε` defaults to 0).
    pub fn intensities(&self, x: &Signal, noise: Option<&[f64]>) -> Result<IntensityVector> {
        let fwd = self.forward(x)?;
        if let Some(eps) = noise {
            if eps.len() != fwd.len() {
                return Err(Error::LengthMismatch {
                    expected: fwd.len(),
                    got: eps.len(),
                });
            }
        }
        let values = fwd
            .iter()
            .enumerate()
            .map(|(i, f)| f.norm_sqr() + noise.map_or(0.0, |eps| eps[i]))
            .collect();
        Ok(IntensityVector {
            values,
            noise: noise.map(|eps| eps.to_vec()),
        })
    }

    /// `Σ_i ‖a_i‖²` over all measurement functionals.
    ///
    /// For CDP, row `(k1, l)` is `t ↦ d_l(t) e^{j2πk1 t/n}`, so its squared
    /// norm is `Σ_t |d_l(t)|²` independent of `k1`; the total is accumulated
    /// from the mask magnitudes, `n` rows per mask.
    pub fn sum_row_norms_sqr(&self) -> f64 {
        match &self.kind {
            EnsembleKind::Gaussian { vectors } => vectors
                .iter()
                .map(|a| a.iter().map(|v| v.norm_sqr()).sum::<f64>())
                .sum(),
            EnsembleKind::Cdp { masks } => masks
                .iter()
                .map(|d| self.n as f64 * d.iter().map(|v| v.norm_sqr()).sum::<f64>())
                .sum(),
        }
    }
}
