//! Closed-form distance certificates.
//!
//! Each certificate records the inputs it was computed from, so its value
//! can be recomputed bit-for-bit with [`BoundCertificate::recompute`].

use serde::{Deserialize, Serialize};

use crate::curve::DiscreteCurve;
use crate::diffeo::{delta, DiscreteDiffeo};
use crate::error::{Error, Result};
use crate::metric::{tangent_norm, MetricCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    ShrinkUpper,
    TranslateUpper,
    RotateUpper,
    DeltaLower,
    SeparationDelta,
}

/// Everything a certificate value depends on.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CertificateInputs {
    pub weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    /// `√G_c(c, c)` of the rotated curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Bound on the curve length of every frame of the paths considered.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: CertificateKind,
    pub value: f64,
    pub inputs: CertificateInputs,
    /// Which statement the certificate instantiates.
    pub anchor: String,
}

impl BoundCertificate {
    /// Recomputes the value from the recorded inputs.
    pub fn recompute(&self) -> Result<f64> {
        let i = &self.inputs;
        let need =
            |x: Option<f64>, name: &str| x.ok_or_else(|| Error::InvalidParameter(format!("missing input {name}")));
        let w = |k: usize| i.weights.get(k).copied().unwrap_or(0.0);
        Ok(match self.kind {
            CertificateKind::ShrinkUpper => shrink_value(w(0), w(1), need(i.curve_length, "curve_length")?),
            CertificateKind::TranslateUpper => {
                translate_value(w(0), need(i.curve_length, "curve_length")?, need(i.v0_norm, "v0_norm")?)
            }
            CertificateKind::RotateUpper => need(i.angle, "angle")?.abs() * need(i.self_norm, "self_norm")?,
            CertificateKind::DeltaLower => need(i.delta, "delta")? * (w(2) / need(i.max_length, "max_length")?).sqrt(),
            CertificateKind::SeparationDelta => {
                need(i.delta, "delta")? * w(2).sqrt() / (2.0 * need(i.max_length, "max_length")?.sqrt())
            }
        })
    }
}

fn shrink_value(a0: f64, a1: f64, l: f64) -> f64 {
    2.0 * (a0.sqrt() + a1.sqrt()) * l.powf(1.5).max(l.sqrt())
}

fn translate_value(a0: f64, l: f64, v: f64) -> f64 {
    v * (a0 * l).sqrt()
}

fn positive(x: f64, name: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {x} must be positive")));
    }
    Ok(())
}

/// Length bound for shrinking a straight line of length `ℓ` to a point:
/// `2(√a₀ + √a₁)·max(ℓ^{3/2}, ℓ^{1/2})`.
pub fn shrink_upper(g: &MetricCoefficients, length: f64) -> Result<BoundCertificate> {
    positive(length, "curve length")?;
    let inputs = CertificateInputs { weights: g.weights().to_vec(), curve_length: Some(length), ..Default::default() };
    Ok(BoundCertificate {
        kind: CertificateKind::ShrinkUpper,
        value: shrink_value(g.weight(0), g.weight(1), length),
        inputs,
        anchor: "shrinking a straight line: len <= 2(sqrt a0 + sqrt a1) max(l^1.5, l^0.5)".into(),
    })
}

/// `d_G(c, c + v₀) ≤ |v₀|·√(a₀ℓ_c)`.
pub fn translate_upper(g: &MetricCoefficients, length: f64, v0_norm: f64) -> Result<BoundCertificate> {
    positive(length, "curve length")?;
    if !(v0_norm >= 0.0) {
        return Err(Error::InvalidParameter(format!("|v0| = {v0_norm} must be non-negative")));
    }
    let inputs = CertificateInputs {
        weights: g.weights().to_vec(),
        curve_length: Some(length),
        v0_norm: Some(v0_norm),
        ..Default::default()
    };
    Ok(BoundCertificate {
        kind: CertificateKind::TranslateUpper,
        value: translate_value(g.weight(0), length, v0_norm),
        inputs,
        anchor: "translation: d(c, c + v0) <= |v0| sqrt(a0 l_c)".into(),
    })
}

/// `d_G(c, A_ϑ c) ≤ |ϑ|·√G_c(c, c)` for planar curves.
pub fn rotate_upper(g: &MetricCoefficients, c: &DiscreteCurve, angle: f64) -> Result<BoundCertificate> {
    if c.dim() != 2 {
        return Err(Error::UnsupportedDimension(format!(
            "certified rotation bounds exist for planar curves only, got dimension {}",
            c.dim()
        )));
    }
    if !(angle.abs() <= std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("|angle| = {} exceeds pi", angle.abs())));
    }
    let h = c.as_field();
    let norm = tangent_norm(g, c, &h)?;
    let inputs = CertificateInputs {
        weights: g.weights().to_vec(),
        angle: Some(angle),
        self_norm: Some(norm),
        curve_length: Some(c.length()),
        ..Default::default()
    };
    Ok(BoundCertificate {
        kind: CertificateKind::RotateUpper,
        value: angle.abs() * norm,
        inputs,
        anchor: "planar rotation: d(c, Ac) <= |angle| sqrt(G_c(c, c))".into(),
    })
}

fn lower_inputs(
    phi: &DiscreteDiffeo,
    psi: &DiscreteDiffeo,
    g: &MetricCoefficients,
    l: f64,
) -> Result<CertificateInputs> {
    if !(g.weight(2) > 0.0) {
        return Err(Error::InapplicableCertificate("the lower bound needs a_2 > 0".into()));
    }
    positive(l, "max length")?;
    Ok(CertificateInputs {
        weights: g.weights().to_vec(),
        delta: Some(delta(phi, psi)?),
        max_length: Some(l),
        ..Default::default()
    })
}

/// `len(γ) ≥ Δ(φ, ψ)·√(a₂ / L)` for every path from `λφ` to `λψ` whose
/// frames all have length at most `L`.
pub fn delta_lower(
    phi: &DiscreteDiffeo,
    psi: &DiscreteDiffeo,
    g: &MetricCoefficients,
    l: f64,
) -> Result<BoundCertificate> {
    delta_lower_from(lower_inputs(phi, psi, g, l)?)
}

/// The same bound from a precomputed `Δ`.
pub fn delta_lower_with(delta: f64, g: &MetricCoefficients, l: f64) -> Result<BoundCertificate> {
    if !(g.weight(2) > 0.0) {
        return Err(Error::InapplicableCertificate("the lower bound needs a_2 > 0".into()));
    }
    positive(l, "max length")?;
    let inputs = CertificateInputs {
        weights: g.weights().to_vec(),
        delta: Some(delta),
        max_length: Some(l),
        ..Default::default()
    };
    delta_lower_from(inputs)
}

fn delta_lower_from(inputs: CertificateInputs) -> Result<BoundCertificate> {
    let mut c = BoundCertificate {
        kind: CertificateKind::DeltaLower,
        value: 0.0,
        inputs,
        anchor: "parametrization gap: len >= Delta(phi, psi) sqrt(a2 / max l)".into(),
    };
    c.value = c.recompute()?;
    Ok(c)
}

/// `δ = Δ(φ, ψ)·√a₂ / (2√L)`.
pub fn separation_delta(
    phi: &DiscreteDiffeo,
    psi: &DiscreteDiffeo,
    g: &MetricCoefficients,
    l: f64,
) -> Result<BoundCertificate> {
    separation_from(lower_inputs(phi, psi, g, l)?)
}

pub fn separation_delta_with(delta: f64, g: &MetricCoefficients, l: f64) -> Result<BoundCertificate> {
    separation_from(delta_lower_with(delta, g, l)?.inputs)
}

fn separation_from(inputs: CertificateInputs) -> Result<BoundCertificate> {
    let mut c = BoundCertificate {
        kind: CertificateKind::SeparationDelta,
        value: 0.0,
        inputs,
        anchor: "separation constant: delta = Delta sqrt(a2) / (2 sqrt L)".into(),
    };
    c.value = c.recompute()?;
    Ok(c)
}

/// Exact length of the shrink path `t ↦ t·c`, `t ∈ [t_min, 1]`, of a
/// straight line: `∫ √(a₀ t Q + a₁ ℓ/t) dt` with `Q = ∫|c|² ds` (all
/// higher-order terms vanish on a line). Evaluated by composite Simpson
/// after `t = u²`, which removes the endpoint singularity.
pub fn straight_shrink_length(g: &MetricCoefficients, c: &DiscreteCurve, t_min: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t_min) {
        return Err(Error::InvalidParameter(format!("t_min = {t_min} must lie in [0, 1)")));
    }
    let line = c
        .as_straight_line(1e-8)
        .ok_or_else(|| Error::NotASegment("the shrink-length oracle needs a straight line".into()))?;
    let l = line.length;
    let pu: f64 = line.start.iter().zip(&line.direction).map(|(a, b)| a * b).sum();
    let pp: f64 = line.start.iter().map(|x| x * x).sum();
    let q = l * pp + l * l * pu + l.powi(3) / 3.0;
    let (a, b) = (g.weight(0) * q, g.weight(1) * l);
    let f = |u: f64| 2.0 * (a * u.powi(4) + b).sqrt();
    let (u0, k) = (t_min.sqrt(), 4096);
    let h = (1.0 - u0) / k as f64;
    let inner: f64 = (1..k).map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(u0 + i as f64 * h)).sum();
    Ok(h / 3.0 * (f(u0) + inner + f(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Segment;
    use crate::grid::Grid;
    use std::sync::Arc;

    fn coeffs(a: &[f64]) -> MetricCoefficients {
        MetricCoefficients::new(a.len() - 1, a.to_vec()).unwrap()
    }

    #[test]
    fn shrink_arithmetic() {
        let g = coeffs(&[1.0, 1.0, 1.0]);
        assert_eq!(shrink_upper(&g, 1.0).unwrap().value, 4.0);
        assert_eq!(shrink_upper(&g, 0.25).unwrap().value, 2.0);
        assert_eq!(shrink_upper(&coeffs(&[4.0, 0.0, 1.0]), 1.0).unwrap().value, 4.0);
    }

    #[test]
    fn translate_arithmetic() {
        let g = coeffs(&[1.0, 1.0, 1.0]);
        assert_eq!(translate_upper(&g, 1.0, 0.0).unwrap().value, 0.0);
        assert_eq!(translate_upper(&g, 1.0, 1.0).unwrap().value, 1.0);
        assert_eq!(translate_upper(&coeffs(&[9.0, 1.0, 1.0]), 4.0, 2.0).unwrap().value, 12.0);
    }

    #[test]
    fn rotation_certificate() {
        let c = DiscreteCurve::sample(Grid::new(256).unwrap(), Arc::new(Segment::unit(2))).unwrap();
        let g = MetricCoefficients::default();
        assert_eq!(rotate_upper(&g, &c, 0.0).unwrap().value, 0.0);
        let v = rotate_upper(&g, &c, std::f64::consts::PI).unwrap().value;
        assert!((v - std::f64::consts::PI * (4.0f64 / 3.0).sqrt()).abs() < 1e-3);
        let c1 = DiscreteCurve::sample(Grid::new(16).unwrap(), Arc::new(Segment::unit(3))).unwrap();
        assert_eq!(rotate_upper(&g, &c1, 1.0).unwrap_err().tag(), "unsupported-dimension");
    }

    #[test]
    fn lower_certificates() {
        let grid = Grid::new(256).unwrap();
        let id = DiscreteDiffeo::identity(grid);
        let psi = DiscreteDiffeo::exp_family(grid, 1.0).unwrap();
        let g = MetricCoefficients::default();
        assert_eq!(delta_lower(&id, &id, &g, 1.0).unwrap().value, 0.0);
        assert!((delta_lower(&id, &psi, &g, 1.0).unwrap().value - 1.0).abs() < 1e-6);
        assert!((separation_delta(&id, &psi, &g, 1.0).unwrap().value - 0.5).abs() < 1e-6);
        assert_eq!(separation_delta_with(2.0, &coeffs(&[1.0, 1.0, 4.0]), 4.0).unwrap().value, 1.0);
        let flat = coeffs(&[1.0, 1.0, 0.0, 1.0]);
        assert_eq!(delta_lower(&id, &psi, &flat, 1.0).unwrap_err().tag(), "inapplicable-certificate");
    }

    #[test]
    fn shrink_oracle_matches_adaptive_quadrature() {
        // scipy.integrate.quad of √(t/3 + 1/t) on [0, 1]
        let c = DiscreteCurve::sample(Grid::new(64).unwrap(), Arc::new(Segment::unit(2))).unwrap();
        let v = straight_shrink_length(&MetricCoefficients::default(), &c, 0.0).unwrap();
        assert!((v - 2.063888513905749).abs() < 1e-10, "{v}");
        let tail = v - straight_shrink_length(&MetricCoefficients::default(), &c, 1e-6).unwrap();
        assert!((tail - 2e-3).abs() < 1e-6);
    }

    #[test]
    fn certificates_recompute_bitwise() {
        let g = coeffs(&[1.3, 0.7, 2.1]);
        for c in [
            shrink_upper(&g, 0.37).unwrap(),
            translate_upper(&g, 0.37, 1.9).unwrap(),
            delta_lower_with(0.4, &g, 0.2).unwrap(),
        ] {
            assert_eq!(c.recompute().unwrap().to_bits(), c.value.to_bits());
            let back: BoundCertificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
            assert_eq!(back.recompute().unwrap().to_bits(), c.value.to_bits());
        }
    }
}
