use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real function of time used for Ω(t), G(t) or a diagnostic γ(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeProfile {
    Constant {
        value: f64,
    },
    /// `offset + amplitude·sin(frequency·t + phase)`
    Sinusoidal {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `Σ coefficients[k]·tᵏ`
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// Linear interpolation between `(t, value)` samples, held flat outside.
    Sampled {
        points: Vec<(f64, f64)>,
    },
}

const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_DEPTH: u32 = 48;

impl TimeProfile {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn sinusoidal(offset: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self::Sinusoidal {
            offset,
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        Self::Polynomial { coefficients }
    }

    pub fn sampled(points: Vec<(f64, f64)>) -> Result<Self> {
        let p = Self::Sampled { points };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            Self::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidProfile("constant value is not finite".into()))
            }
            Self::Sinusoidal {
                offset,
                amplitude,
                frequency,
                phase,
            } if !finite(&[*offset, *amplitude, *frequency, *phase]) => Err(Error::InvalidProfile(
                "sinusoidal parameters must be finite".into(),
            )),
            Self::Polynomial { coefficients } if !finite(coefficients) => Err(
                Error::InvalidProfile("polynomial coefficients must be finite".into()),
            ),
            Self::Sampled { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidProfile(
                        "sampled profile needs at least two points".into(),
                    ));
                }
                if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(Error::InvalidProfile(
                        "sampled points must be finite".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidProfile(
                        "sampled time points must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn raw(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Sinusoidal {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (frequency * t + phase).sin(),
            Self::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            Self::Sampled { points } => interpolate(points, t),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = self.raw(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteProfile { t })
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Sinusoidal {
                amplitude,
                frequency,
                phase,
                ..
            } => amplitude * frequency * (frequency * t + phase).cos(),
            Self::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c),
            Self::Sampled { points } => {
                let first = points[0].0;
                let last = points[points.len() - 1].0;
                if t < first || t > last {
                    return 0.0;
                }
                let i = segment(points, t);
                let (t0, v0) = points[i];
                let (t1, v1) = points[i + 1];
                (v1 - v0) / (t1 - t0)
            }
        }
    }

    /// `∫ₐᵇ f(t) dt`, closed form except for sampled profiles.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let v = match self {
            Self::Constant { value } => value * (b - a),
            Self::Sinusoidal {
                offset,
                amplitude,
                frequency,
                phase,
            } => {
                if *frequency == 0.0 {
                    (offset + amplitude * phase.sin()) * (b - a)
                } else {
                    offset * (b - a)
                        - amplitude / frequency
                            * ((frequency * b + phase).cos() - (frequency * a + phase).cos())
                }
            }
            Self::Polynomial { coefficients } => {
                let antider = |t: f64| {
                    coefficients
                        .iter()
                        .enumerate()
                        .rev()
                        .fold(0.0, |acc, (k, c)| acc * t + c / (k as f64 + 1.0))
                        * t
                };
                antider(b) - antider(a)
            }
            Self::Sampled { .. } => adaptive_simpson(&|t| self.raw(t), a, b, SIMPSON_TOL),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteProfile { t: b })
        }
    }
}

fn segment(points: &[(f64, f64)], t: f64) -> usize {
    let idx = points.partition_point(|(ti, _)| *ti <= t);
    idx.saturating_sub(1).min(points.len() - 2)
}

fn interpolate(points: &[(f64, f64)], t: f64) -> f64 {
    let (first, last) = (points[0], points[points.len() - 1]);
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let i = segment(points, t);
    let (t0, v0) = points[i];
    let (t1, v1) = points[i + 1];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_each_kind() {
        assert_eq!(TimeProfile::constant(2.0).eval(3.0).unwrap(), 2.0);
        let s = TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0);
        assert_eq!(s.eval(0.0).unwrap(), 1.0);
        let p = TimeProfile::polynomial(vec![1.0, -2.0, 0.5]);
        assert!((p.eval(2.0).unwrap() - (1.0 - 4.0 + 2.0)).abs() < 1e-15);
        let q = TimeProfile::sampled(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 0.0)]).unwrap();
        assert_eq!(q.eval(0.5).unwrap(), 1.0);
        assert_eq!(q.eval(2.0).unwrap(), 1.0);
        assert_eq!(q.eval(-1.0).unwrap(), 0.0);
        assert_eq!(q.eval(9.0).unwrap(), 0.0);
    }

    #[test]
    fn sampled_requires_increasing_times() {
        assert!(TimeProfile::sampled(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(TimeProfile::sampled(vec![(1.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(TimeProfile::sampled(vec![(0.0, 1.0)]).is_err());
    }

    #[test]
    fn non_finite_value_is_an_error() {
        let p = TimeProfile::polynomial(vec![0.0, 0.0, 1e308]);
        assert!(matches!(p.eval(1e10), Err(Error::NonFiniteProfile { .. })));
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        let profiles = [
            TimeProfile::constant(1.5),
            TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.4),
            TimeProfile::polynomial(vec![0.5, -1.0, 0.25, 0.1]),
        ];
        for p in &profiles {
            let exact = p.integral(0.3, 4.1).unwrap();
            let quad = adaptive_simpson(&|t| p.eval(t).unwrap(), 0.3, 4.1, 1e-12);
            assert!((exact - quad).abs() < 1e-10, "{p:?}");
        }
    }

    #[test]
    fn sampled_integral_is_piecewise_trapezoid() {
        let q = TimeProfile::sampled(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 0.0)]).unwrap();
        assert!((q.integral(0.0, 3.0).unwrap() - 3.0).abs() < 1e-10);
        assert!((q.integral(0.0, 5.0).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn derivatives() {
        let s = TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0);
        assert!((s.derivative(0.0) - 0.6).abs() < 1e-15);
        let p = TimeProfile::polynomial(vec![1.0, 3.0, 2.0]);
        assert!((p.derivative(2.0) - 11.0).abs() < 1e-14);
        let q = TimeProfile::sampled(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 0.0)]).unwrap();
        assert_eq!(q.derivative(0.5), 2.0);
        assert_eq!(q.derivative(2.0), -1.0);
    }

    #[test]
    fn serde_uses_kind_tag() {
        let p: TimeProfile = serde_json::from_str(
            r#"{"kind":"sinusoidal","offset":1,"amplitude":0.3,"frequency":2}"#,
        )
        .unwrap();
        assert_eq!(p, TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0));
        assert!(
            serde_json::from_str::<TimeProfile>(r#"{"kind":"constant","value":1,"x":2}"#).is_err()
        );
    }
}
