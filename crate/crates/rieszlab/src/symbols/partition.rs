//! Smooth radial partition of unity with three members: a low band equal
//! to 1 near the origin, a high band equal to 1 near infinity, and the
//! complementary middle band.  Transitions use the standard C-infinity
//! step built from exp(-1/t), so every member has derivatives of all
//! orders and compact transition regions.

use crate::error::{LabError, Result};
use crate::special::jets::Jet;
use crate::symbols::mikhlin::RadialSymbol;

/// Inside the transition band, arguments this close to an endpoint are
/// rounded onto it: the step differs from its plateau by less than
/// exp(-1e12) there, far below representable differences.
const EDGE: f64 = 1e-12;

/// Jet (in r) of the step h(t)/(h(t) + h(1-t)), h(t) = exp(-1/t), along
/// the affine argument t(r) = t0 + slope (r - r0).
fn smoothstep_jet(t0: f64, slope: f64, order: usize) -> Jet {
    if t0 <= EDGE {
        return Jet::constant(0.0, order);
    }
    if t0 >= 1.0 - EDGE {
        return Jet::constant(1.0, order);
    }
    let mut coeffs = vec![0.0; order + 1];
    coeffs[0] = t0;
    if order >= 1 {
        coeffs[1] = slope;
    }
    let t = Jet::from_derivatives(&coeffs);
    let h = t.recip().scale(-1.0).exp();
    let h_mirror = Jet::constant(1.0, order).sub(&t).recip().scale(-1.0).exp();
    h.div(&h.add(&h_mirror))
}

/// 1 on [0, plateau_until], 0 on [zero_from, inf), smooth between.
#[derive(Debug, Clone, Copy)]
pub struct LowBand {
    plateau_until: f64,
    zero_from: f64,
}

impl LowBand {
    /// Where the fall lives: identically one up to `.0`, identically zero
    /// from `.1` on.
    pub fn transition(&self) -> (f64, f64) {
        (self.plateau_until, self.zero_from)
    }

    fn jet(&self, r: f64, order: usize) -> Jet {
        if r <= self.plateau_until {
            Jet::constant(1.0, order)
        } else if r >= self.zero_from {
            Jet::constant(0.0, order)
        } else {
            let width = self.zero_from - self.plateau_until;
            smoothstep_jet((self.zero_from - r) / width, -1.0 / width, order)
        }
    }
}

impl RadialSymbol for LowBand {
    fn eval(&self, r: f64) -> f64 {
        self.jet(r, 0).value()
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        Ok(self.jet(r, k).derivatives()[k])
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        Ok(self.jet(r, k_max).derivatives())
    }

    fn max_order(&self) -> usize {
        8
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// 0 on [0, zero_until], 1 on [plateau_from, inf), smooth between.
#[derive(Debug, Clone, Copy)]
pub struct HighBand {
    zero_until: f64,
    plateau_from: f64,
}

impl HighBand {
    /// Where the rise lives: identically zero up to `.0`, identically one
    /// from `.1` on.
    pub fn transition(&self) -> (f64, f64) {
        (self.zero_until, self.plateau_from)
    }

    fn jet(&self, r: f64, order: usize) -> Jet {
        if r <= self.zero_until {
            Jet::constant(0.0, order)
        } else if r >= self.plateau_from {
            Jet::constant(1.0, order)
        } else {
            let width = self.plateau_from - self.zero_until;
            smoothstep_jet((r - self.zero_until) / width, 1.0 / width, order)
        }
    }
}

impl RadialSymbol for HighBand {
    fn eval(&self, r: f64) -> f64 {
        self.jet(r, 0).value()
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        Ok(self.jet(r, k).derivatives()[k])
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        Ok(self.jet(r, k_max).derivatives())
    }

    fn max_order(&self) -> usize {
        8
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// The complement 1 - low - high: supported between the low band's
/// plateau and the high band's plateau.
#[derive(Debug, Clone, Copy)]
pub struct MidBand {
    low: LowBand,
    high: HighBand,
}

impl MidBand {
    /// Interval outside of which the band vanishes identically.
    pub fn support(&self) -> (f64, f64) {
        (self.low.transition().0, self.high.transition().1)
    }
}

impl RadialSymbol for MidBand {
    fn eval(&self, r: f64) -> f64 {
        1.0 - self.low.eval(r) - self.high.eval(r)
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        if k == 0 {
            Ok(self.eval(r))
        } else {
            Ok(-self.low.deriv(k, r)? - self.high.deriv(k, r)?)
        }
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        let lo = self.low.deriv_row(k_max, r)?;
        let hi = self.high.deriv_row(k_max, r)?;
        Ok(lo
            .into_iter()
            .zip(hi)
            .enumerate()
            .map(|(k, (a, b))| if k == 0 { 1.0 - a - b } else { -a - b })
            .collect())
    }

    fn max_order(&self) -> usize {
        8
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Build the three members: the low band is 1 up to `inner_radius` and
/// fades out over `fade_width`; the high band fades in over the last
/// `fade_width` before `outer_radius` and is 1 beyond.  The bands must
/// leave room for a middle plateau:
/// 0 < inner_radius, 0 < fade_width, inner_radius + fade_width <
/// outer_radius - fade_width.
pub fn partition_unity(
    inner_radius: f64,
    fade_width: f64,
    outer_radius: f64,
) -> Result<(LowBand, MidBand, HighBand)> {
    let ok = inner_radius.is_finite()
        && outer_radius.is_finite()
        && inner_radius > 0.0
        && fade_width > 0.0
        && inner_radius + fade_width < outer_radius - fade_width;
    if !ok {
        return Err(LabError::domain(format!(
            "partition bands need 0 < inner < inner + fade < outer - fade, \
             got inner = {inner_radius}, fade = {fade_width}, outer = {outer_radius}"
        )));
    }
    let low = LowBand {
        plateau_until: inner_radius,
        zero_from: inner_radius + fade_width,
    };
    let high = HighBand {
        zero_until: outer_radius - fade_width,
        plateau_from: outer_radius,
    };
    Ok((low, MidBand { low, high }, high))
}

/// The default band layout used by the experiments and the audit CLI.
pub fn standard_partition() -> (LowBand, MidBand, HighBand) {
    partition_unity(1.0, 1.0, 10.0).expect("default band layout is valid")
}

/// Product of a rising and a falling step: 0 outside (zero_until,
/// zero_from), 1 on [plateau_from, plateau_until], smooth everywhere.
#[derive(Debug, Clone, Copy)]
pub struct SmoothBump {
    rise: HighBand,
    fall: LowBand,
}

impl SmoothBump {
    /// The closed interval outside of which the bump vanishes.
    pub fn support(&self) -> (f64, f64) {
        (self.rise.zero_until, self.fall.zero_from)
    }
}

impl RadialSymbol for SmoothBump {
    fn eval(&self, r: f64) -> f64 {
        self.rise.eval(r) * self.fall.eval(r)
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        Ok(self.deriv_row(k, r)?[k])
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        let a = self.rise.deriv_row(k_max, r)?;
        let b = self.fall.deriv_row(k_max, r)?;
        Ok((0..=k_max)
            .map(|k| {
                (0..=k)
                    .map(|j| crate::special::binomial(k as u32, j as u32) * a[j] * b[k - j])
                    .sum()
            })
            .collect())
    }

    fn max_order(&self) -> usize {
        8
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        Some(0.0)
    }
}

pub fn smooth_bump(
    zero_until: f64,
    plateau_from: f64,
    plateau_until: f64,
    zero_from: f64,
) -> Result<SmoothBump> {
    let ok = zero_until.is_finite()
        && zero_from.is_finite()
        && 0.0 < zero_until
        && zero_until < plateau_from
        && plateau_from <= plateau_until
        && plateau_until < zero_from;
    if !ok {
        return Err(LabError::domain(format!(
            "bump breakpoints must be finite and increasing: \
             0 < {zero_until} < {plateau_from} <= {plateau_until} < {zero_from}"
        )));
    }
    Ok(SmoothBump {
        rise: HighBand {
            zero_until,
            plateau_from,
        },
        fall: LowBand {
            plateau_until,
            zero_from,
        },
    })
}
