//! Fourier-domain window profiles and the tensor-product wavelet built from them.
//!
//! Each axis carries a real, nonnegative profile supported in `[1/2, 2]`; the
//! n-dimensional wavelet spectrum is the product of the per-axis profiles.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUPPORT_LO: f64 = 0.5;
pub const SUPPORT_HI: f64 = 2.0;

/// Quadrature nodes per axis used when a wavelet is built without an explicit
/// resolution.
pub const DEFAULT_RESOLUTION: usize = 512;

/// C-infinity step: 0 for `x <= 0`, 1 for `x >= 1`, built from `exp(-1/x)`.
///
/// `smooth_step(x) + smooth_step(1 - x) == 1` holds for every `x`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// exp(-1/x) ramps in log2-frequency, up on [1/2, 1] and down on [1, 2].
    SmoothBump,
    /// Cubed raised cosine in log2-frequency; five derivatives vanish at the edges.
    RaisedCosine,
    /// Indicator of [1/2, 2]. Not in the Schwartz class; only for analytic checks.
    IdealBox,
}

impl ProfileKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileKind::SmoothBump => "smooth_bump",
            ProfileKind::RaisedCosine => "raised_cosine",
            ProfileKind::IdealBox => "ideal_box",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "smooth_bump" => Ok(ProfileKind::SmoothBump),
            "raised_cosine" => Ok(ProfileKind::RaisedCosine),
            "ideal_box" => Ok(ProfileKind::IdealBox),
            other => Err(Error::config(format!("unknown profile kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Finite(u32),
    Infinite,
}

impl Smoothness {
    /// Number of endpoint derivatives that must vanish: `max(4, order)`.
    pub fn required_vanishing(&self) -> u32 {
        match *self {
            Smoothness::Finite(k) => k.max(4),
            Smoothness::Infinite => 4,
        }
    }
}

type CustomFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    Builtin(ProfileKind),
    Custom(CustomFn),
}

/// One-dimensional Fourier window `h` with `supp h ⊂ [support_lo, support_hi]`.
#[derive(Clone)]
pub struct WindowProfile1D {
    pub support_lo: f64,
    pub support_hi: f64,
    pub smoothness: Smoothness,
    evaluator: Evaluator,
}

impl fmt::Debug for WindowProfile1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.evaluator {
            Evaluator::Builtin(k) => k.as_str(),
            Evaluator::Custom(_) => "custom",
        };
        f.debug_struct("WindowProfile1D")
            .field("kind", &name)
            .field("support_lo", &self.support_lo)
            .field("support_hi", &self.support_hi)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl WindowProfile1D {
    pub fn new(kind: ProfileKind) -> Self {
        let smoothness = match kind {
            ProfileKind::SmoothBump => Smoothness::Infinite,
            ProfileKind::RaisedCosine => Smoothness::Finite(5),
            ProfileKind::IdealBox => Smoothness::Finite(0),
        };
        WindowProfile1D {
            support_lo: SUPPORT_LO,
            support_hi: SUPPORT_HI,
            smoothness,
            evaluator: Evaluator::Builtin(kind),
        }
    }

    /// Wraps an arbitrary evaluator without checking any invariant.
    ///
    /// Used for fault injection in the self-test; nothing else should need it.
    pub fn from_fn_unchecked(
        support_lo: f64,
        support_hi: f64,
        smoothness: Smoothness,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        WindowProfile1D {
            support_lo,
            support_hi,
            smoothness,
            evaluator: Evaluator::Custom(Arc::new(f)),
        }
    }

    pub fn kind(&self) -> Option<ProfileKind> {
        match self.evaluator {
            Evaluator::Builtin(k) => Some(k),
            Evaluator::Custom(_) => None,
        }
    }

    #[inline]
    pub fn eval(&self, omega: f64) -> f64 {
        match &self.evaluator {
            Evaluator::Builtin(kind) => eval_builtin(*kind, omega),
            Evaluator::Custom(f) => f(omega),
        }
    }

    /// `∫ |h(ω)|² dω/ω` by the log-uniform trapezoid rule with `resolution` nodes.
    pub fn log_energy(&self, resolution: usize) -> Result<f64> {
        let (nodes, weights) = log_trapezoid(self.support_lo, self.support_hi, resolution);
        let mut acc = 0.0;
        for (w, wt) in nodes.iter().zip(&weights) {
            let v = self.eval(*w);
            acc += wt * v * v;
        }
        if !acc.is_finite() {
            return Err(Error::Numerical("non-finite profile energy".into()));
        }
        Ok(acc)
    }

    /// Finite-difference check that the first `order` derivatives vanish at both
    /// support endpoints (one-sided, from inside the support).
    ///
    /// A vanishing k-th derivative shows up as a k-th scaled difference that
    /// shrinks when the step is halved; a nonzero one converges to `h^(k)(e)`.
    pub fn endpoint_derivatives_vanish(&self, order: u32) -> bool {
        let h0 = 0.005;
        for (edge, dir) in [(self.support_lo, 1.0), (self.support_hi, -1.0)] {
            if self.eval(edge).abs() > 1e-12 {
                return false;
            }
            for k in 1..=order {
                let d1 = scaled_difference(self, edge, dir * h0, k).abs();
                let d2 = scaled_difference(self, edge, dir * h0 / 2.0, k).abs();
                if d2 > 0.7 * d1 + 1e-9 {
                    return false;
                }
            }
        }
        true
    }
}

fn scaled_difference(p: &WindowProfile1D, x: f64, step: f64, k: u32) -> f64 {
    // forward difference of order k: sum_i (-1)^(k-i) C(k,i) f(x + i*step)
    let mut acc = 0.0;
    let mut binom = 1.0;
    for i in 0..=k {
        let sign = if (k - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * binom * p.eval(x + i as f64 * step);
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    acc / step.abs().powi(k as i32)
}

fn eval_builtin(kind: ProfileKind, omega: f64) -> f64 {
    if !(SUPPORT_LO..=SUPPORT_HI).contains(&omega) {
        return 0.0;
    }
    match kind {
        ProfileKind::IdealBox => 1.0,
        ProfileKind::SmoothBump => {
            let u = omega.log2();
            if u <= 0.0 {
                smooth_step(u + 1.0)
            } else {
                smooth_step(1.0 - u)
            }
        }
        ProfileKind::RaisedCosine => {
            let u = omega.log2();
            let c = 0.5 * (1.0 + (PI * u).cos());
            c * c * c
        }
    }
}

/// Log-uniform trapezoid nodes on `[lo, hi]` with weights for the measure `dω/ω`.
pub fn log_trapezoid(lo: f64, hi: f64, resolution: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (lo.log2(), hi.log2());
    let n = resolution.max(2);
    let du = (b - a) / (n - 1) as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let u = if k == n - 1 { b } else { a + k as f64 * du };
        nodes.push(u.exp2());
        let end = k == 0 || k == n - 1;
        weights.push(LN_2 * du * if end { 0.5 } else { 1.0 });
    }
    (nodes, weights)
}

/// Separable wavelet `ψ̂(ω) = ∏ᵢ hᵢ(ωᵢ)` together with its admissibility constant.
#[derive(Debug, Clone)]
pub struct WaveletSpec {
    pub profiles: Vec<WindowProfile1D>,
    pub n_dims: usize,
    c_psi: f64,
}

impl WaveletSpec {
    /// Builds a wavelet from explicit profiles and computes `C_ψ` at `resolution`.
    pub fn from_profiles(profiles: Vec<WindowProfile1D>, resolution: usize) -> Result<Self> {
        let n_dims = profiles.len();
        if !(1..=2).contains(&n_dims) {
            return Err(Error::config(format!(
                "n_dims must be 1 or 2, got {n_dims}"
            )));
        }
        let mut w = WaveletSpec {
            profiles,
            n_dims,
            c_psi: f64::NAN,
        };
        w.c_psi = admissibility_constant(&w, resolution)?;
        if !(w.c_psi > 0.0) {
            return Err(Error::Numerical(format!(
                "admissibility constant must be positive, got {}",
                w.c_psi
            )));
        }
        Ok(w)
    }

    pub fn c_psi(&self) -> f64 {
        self.c_psi
    }

    pub fn kind(&self) -> Option<ProfileKind> {
        self.profiles[0].kind()
    }

    /// False for the ideal box, whose spatial wavelet is not rapidly decreasing.
    pub fn admissible_for_theory(&self) -> bool {
        self.profiles
            .iter()
            .all(|p| !matches!(p.kind(), Some(ProfileKind::IdealBox)))
    }

    pub fn eval(&self, omega: &[f64]) -> f64 {
        debug_assert_eq!(omega.len(), self.n_dims);
        self.profiles
            .iter()
            .zip(omega)
            .map(|(p, &w)| p.eval(w))
            .product()
    }

    pub fn axis(&self, i: usize) -> &WindowProfile1D {
        &self.profiles[i]
    }

    /// Returns the wavelet with `ψ̂` replaced by `c·ψ̂` (the factor goes on axis 0).
    pub fn scaled(&self, c: f64, resolution: usize) -> Result<Self> {
        let mut profiles = self.profiles.clone();
        let inner = profiles[0].clone();
        profiles[0] = WindowProfile1D::from_fn_unchecked(
            inner.support_lo,
            inner.support_hi,
            inner.smoothness,
            move |w| c * inner.eval(w),
        );
        Self::from_profiles(profiles, resolution)
    }
}

pub fn make_wavelet(kind: ProfileKind, n_dims: usize) -> Result<WaveletSpec> {
    make_wavelet_with_resolution(kind, n_dims, DEFAULT_RESOLUTION)
}

pub fn make_wavelet_with_resolution(
    kind: ProfileKind,
    n_dims: usize,
    resolution: usize,
) -> Result<WaveletSpec> {
    if !(1..=2).contains(&n_dims) {
        return Err(Error::config(format!(
            "n_dims must be 1 or 2, got {n_dims}"
        )));
    }
    WaveletSpec::from_profiles(vec![WindowProfile1D::new(kind); n_dims], resolution)
}

/// `C_ψ = ∫ |ψ̂(ω)|² dω/|ω₁⋯ωₙ|`, evaluated by the tensor log-trapezoid rule.
pub fn admissibility_constant(w: &WaveletSpec, resolution: usize) -> Result<f64> {
    if resolution < 64 {
        return Err(Error::config(format!(
            "admissibility resolution must be >= 64, got {resolution}"
        )));
    }
    // Tabulate |h_i|^2 * weight per axis, then sum the tensor grid.
    let axes: Vec<Vec<f64>> = w
        .profiles
        .iter()
        .map(|p| {
            let (nodes, weights) = log_trapezoid(p.support_lo, p.support_hi, resolution);
            nodes
                .iter()
                .zip(&weights)
                .map(|(&om, &wt)| {
                    let v = p.eval(om);
                    v * v * wt
                })
                .collect()
        })
        .collect();
    let total = match axes.as_slice() {
        [a] => a.iter().sum::<f64>(),
        [a, b] => a
            .iter()
            .map(|&x| b.iter().map(|&y| x * y).sum::<f64>())
            .sum(),
        _ => unreachable!("n_dims validated by the constructor"),
    };
    if !total.is_finite() {
        return Err(Error::Numerical(
            "non-finite admissibility quadrature".into(),
        ));
    }
    Ok(total)
}
