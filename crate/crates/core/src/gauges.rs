//! Rate functions φ: continuous, strictly increasing on `[0, ∞)`, with
//! `φ(0) = 0` and `φ(t) → ∞`.
//!
//! Every gauge is defined on the whole half-line. Power-type members have
//! closed-form inverses; the remaining ones are inverted by bisection down to
//! adjacent floating-point numbers, which keeps `invert(eval(t))` accurate in
//! relative terms even for tiny `t`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Gauge {
    /// `t ↦ α⁻¹·t^q`
    Power { alpha: f64, q: f64 },
    /// `t ↦ α⁻¹·(t^q + β·t)`
    HolderType { alpha: f64, beta: f64, q: f64 },
    /// `t ↦ α⁻¹·t`
    Linear { alpha: f64 },
    /// `t ↦ c·t^q`; `q = 0.5` gives the scaled roots `c·√t`.
    ScaledPower { c: f64, q: f64 },
    /// Piecewise-linear interpolant through `(t, φ(t))` knots starting at `(0, 0)`,
    /// continued past the last knot with the last slope.
    Table(Vec<[f64; 2]>),
    /// `t ↦ outer·φ(arg·t) + linear·t`
    Composite {
        inner: Box<Gauge>,
        outer: f64,
        arg: f64,
        linear: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderApprox {
    pub q_prime: f64,
    /// Supremum of admissible α′ (attained only in the linear case `q = 1`).
    pub alpha_prime_sup: f64,
    /// The candidate α′ the radius was computed for.
    pub alpha_prime: f64,
    /// Largest `t̄` with `φ(t) ≤ α′⁻¹·t^{q′}` on `]0, t̄]`; infinite when `q = 1`.
    pub validity_radius: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl Gauge {
    pub fn power(alpha: f64, q: f64) -> Result<Self> {
        let g = Gauge::Power { alpha, q };
        g.validate()?;
        Ok(g)
    }

    pub fn holder_type(alpha: f64, beta: f64, q: f64) -> Result<Self> {
        let g = Gauge::HolderType { alpha, beta, q };
        g.validate()?;
        Ok(g)
    }

    pub fn linear(alpha: f64) -> Result<Self> {
        let g = Gauge::Linear { alpha };
        g.validate()?;
        Ok(g)
    }

    pub fn scaled_power(c: f64, q: f64) -> Result<Self> {
        let g = Gauge::ScaledPower { c, q };
        g.validate()?;
        Ok(g)
    }

    pub fn scaled_root(c: f64) -> Result<Self> {
        Self::scaled_power(c, 0.5)
    }

    pub fn table(knots: Vec<[f64; 2]>) -> Result<Self> {
        let g = Gauge::Table(knots);
        g.validate()?;
        Ok(g)
    }

    pub fn composite(inner: Gauge, outer: f64, arg: f64, linear: f64) -> Result<Self> {
        let g = Gauge::Composite {
            inner: Box::new(inner),
            outer,
            arg,
            linear,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Gauge::Power { alpha, q } => {
                positive("alpha", *alpha)?;
                positive("q", *q)
            }
            Gauge::HolderType { alpha, beta, q } => {
                positive("alpha", *alpha)?;
                positive("beta", *beta)?;
                positive("q", *q)
            }
            Gauge::Linear { alpha } => positive("alpha", *alpha),
            Gauge::ScaledPower { c, q } => {
                positive("c", *c)?;
                positive("q", *q)
            }
            Gauge::Table(knots) => {
                if knots.len() < 2 {
                    return Err(invalid("table gauge needs at least two knots"));
                }
                if knots[0] != [0.0, 0.0] {
                    return Err(invalid("table gauge must start at (0, 0)"));
                }
                for w in knots.windows(2) {
                    let ok = w[1][0] > w[0][0]
                        && w[1][1] > w[0][1]
                        && w[1].iter().all(|v| v.is_finite());
                    if !ok {
                        return Err(invalid(
                            "table gauge knots must be finite and strictly increasing",
                        ));
                    }
                }
                Ok(())
            }
            Gauge::Composite {
                inner,
                outer,
                arg,
                linear,
            } => {
                inner.validate()?;
                positive("outer", *outer)?;
                positive("arg", *arg)?;
                if !(*linear >= 0.0 && linear.is_finite()) {
                    return Err(invalid(format!("linear must be nonnegative, got {linear}")));
                }
                Ok(())
            }
        }
    }

    /// Whether the gauge belongs to the differentiable subfamily.
    pub fn is_c1(&self) -> bool {
        match self {
            Gauge::Table(_) => false,
            Gauge::Composite { inner, .. } => inner.is_c1(),
            _ => true,
        }
    }

    /// `(α, q)` when the gauge is exactly `α⁻¹·t^q`.
    pub fn holder_params(&self) -> Option<(f64, f64)> {
        match *self {
            Gauge::Power { alpha, q } => Some((alpha, q)),
            Gauge::Linear { alpha } => Some((alpha, 1.0)),
            Gauge::ScaledPower { c, q } => Some((1.0 / c, q)),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!(
                "gauge argument must be nonnegative, got {t}"
            )));
        }
        Ok(self.at(t))
    }

    /// Evaluation without the domain check; callers guarantee `t ≥ 0`.
    pub(crate) fn at(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "negative gauge argument {t}");
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        match self {
            Gauge::Power { alpha, q } => t.powf(*q) / alpha,
            Gauge::HolderType { alpha, beta, q } => (t.powf(*q) + beta * t) / alpha,
            Gauge::Linear { alpha } => t / alpha,
            Gauge::ScaledPower { c, q } => c * t.powf(*q),
            Gauge::Table(knots) => table_eval(knots, t),
            Gauge::Composite {
                inner,
                outer,
                arg,
                linear,
            } => outer * inner.at(arg * t) + linear * t,
        }
    }

    pub fn invert(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!(
                "gauge value must be nonnegative, got {s}"
            )));
        }
        Ok(self.inv(s))
    }

    pub(crate) fn inv(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        if s == f64::INFINITY {
            return f64::INFINITY;
        }
        match self {
            Gauge::Power { alpha, q } => (alpha * s).powf(1.0 / q),
            Gauge::Linear { alpha } => alpha * s,
            Gauge::ScaledPower { c, q } => (s / c).powf(1.0 / q),
            Gauge::HolderType { alpha, beta, q } => {
                let hi = 1f64.max((alpha * s).powf(1.0 / q)).max(alpha * s / beta);
                bisect_inverse(|t| self.at(t), s, hi)
            }
            Gauge::Table(knots) => table_invert(knots, s),
            Gauge::Composite { .. } => {
                let mut hi = 1.0;
                while self.at(hi) < s && hi < 1e300 {
                    hi *= 2.0;
                }
                bisect_inverse(|t| self.at(t), s, hi)
            }
        }
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!(
                "gauge argument must be nonnegative, got {t}"
            )));
        }
        let pow_deriv = |q: f64| -> Result<f64> {
            if t == 0.0 {
                if q < 1.0 {
                    return Err(Error::Pole { q });
                }
                return Ok(if q == 1.0 { 1.0 } else { 0.0 });
            }
            Ok(q * t.powf(q - 1.0))
        };
        match self {
            Gauge::Power { alpha, q } => Ok(pow_deriv(*q)? / alpha),
            Gauge::HolderType { alpha, beta, q } => Ok((pow_deriv(*q)? + beta) / alpha),
            Gauge::Linear { alpha } => Ok(1.0 / alpha),
            Gauge::ScaledPower { c, q } => Ok(c * pow_deriv(*q)?),
            Gauge::Table(_) => Err(Error::Unsupported(
                "table gauges are piecewise linear and have no derivative".into(),
            )),
            Gauge::Composite {
                inner,
                outer,
                arg,
                linear,
            } => Ok(outer * arg * inner.derivative(arg * t)? + linear),
        }
    }

    /// Hölder (or linear) minorant data for a Hölder-type gauge.
    ///
    /// `alpha_prime` selects the candidate α′ for which the validity radius is
    /// computed; it defaults to half the supremum and is ignored when `q = 1`.
    pub fn holder_approximation(&self, alpha_prime: Option<f64>) -> Result<HolderApprox> {
        let Gauge::HolderType { alpha, beta, q } = *self else {
            return Err(Error::Unsupported(
                "Hölder approximation is defined for Hölder-type gauges only".into(),
            ));
        };
        if q == 1.0 {
            let a = alpha / (1.0 + beta);
            return Ok(HolderApprox {
                q_prime: 1.0,
                alpha_prime_sup: a,
                alpha_prime: a,
                validity_radius: f64::INFINITY,
            });
        }
        let (q_prime, sup) = if q < 1.0 {
            (q, alpha)
        } else {
            (1.0, alpha / beta)
        };
        let cand = alpha_prime.unwrap_or(0.5 * sup);
        if !(cand > 0.0 && cand < sup) {
            return Err(invalid(format!(
                "alpha' must lie in ]0, {sup}[, got {cand}"
            )));
        }
        // q < 1: α′(1 + β t^{1−q}) ≤ α;  q > 1: α′(t^{q−1} + β) ≤ α.
        let radius = if q < 1.0 {
            ((alpha / cand - 1.0) / beta).powf(1.0 / (1.0 - q))
        } else {
            (alpha / cand - beta).powf(1.0 / (q - 1.0))
        };
        Ok(HolderApprox {
            q_prime,
            alpha_prime_sup: sup,
            alpha_prime: cand,
            validity_radius: radius,
        })
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        match self {
            Gauge::Power { alpha, q } => format!("t^{q}/{alpha}"),
            Gauge::HolderType { alpha, beta, q } => format!("(t^{q}+{beta}t)/{alpha}"),
            Gauge::Linear { alpha } => format!("t/{alpha}"),
            Gauge::ScaledPower { c, q } => format!("{c}*t^{q}"),
            Gauge::Table(k) => format!("table[{} knots]", k.len()),
            Gauge::Composite {
                inner,
                outer,
                arg,
                linear,
            } => format!("{outer}*({})({arg}t)+{linear}t", inner.describe()),
        }
    }
}

/// Parses `linear:α`, `power:α,q`, `holder:α,β,q`, `scaled:c,q`, `root:c`
/// (`c·√t`), `table:0,0;t,v;…`, or a JSON gauge object.
impl std::str::FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let de = &mut serde_json::Deserializer::from_str(s);
            let g: Gauge = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
                path: e.path().to_string(),
                msg: e.inner().to_string(),
            })?;
            g.validate()?;
            return Ok(g);
        }
        let unknown = || invalid(format!("unknown gauge {s:?}"));
        let (kind, args) = s.split_once(':').ok_or_else(unknown)?;
        let nums = |text: &str| -> Result<Vec<f64>> {
            text.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| invalid(format!("bad number {v:?} in gauge {s:?}")))
                })
                .collect()
        };
        let arity = |v: Vec<f64>, n: usize| -> Result<Vec<f64>> {
            if v.len() == n {
                Ok(v)
            } else {
                Err(invalid(format!(
                    "gauge {kind:?} takes {n} parameters, got {}",
                    v.len()
                )))
            }
        };
        match kind.trim() {
            "linear" => Gauge::linear(arity(nums(args)?, 1)?[0]),
            "power" => {
                let v = arity(nums(args)?, 2)?;
                Gauge::power(v[0], v[1])
            }
            "holder" => {
                let v = arity(nums(args)?, 3)?;
                Gauge::holder_type(v[0], v[1], v[2])
            }
            "scaled" => {
                let v = arity(nums(args)?, 2)?;
                Gauge::scaled_power(v[0], v[1])
            }
            "root" => Gauge::scaled_root(arity(nums(args)?, 1)?[0]),
            "table" => {
                let knots = args
                    .split(';')
                    .map(|k| arity(nums(k)?, 2).map(|v| [v[0], v[1]]))
                    .collect::<Result<Vec<_>>>()?;
                Gauge::table(knots)
            }
            _ => Err(unknown()),
        }
    }
}

/// Bisection for the root of `f(t) = s` on `[0, hi]`, run until the bracket
/// cannot be split further in floating point.
fn bisect_inverse(f: impl Fn(f64) -> f64, s: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, hi);
    for _ in 0..2200 {
        let mid = if lo == 0.0 {
            hi * 0.5
        } else if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (f(lo) - s).abs() <= (f(hi) - s).abs() {
        lo
    } else {
        hi
    }
}

fn table_eval(knots: &[[f64; 2]], t: f64) -> f64 {
    let n = knots.len();
    let k = match knots.iter().position(|kn| kn[0] >= t) {
        Some(0) => return 0.0,
        Some(k) => k,
        None => n - 1,
    };
    let (a, b) = (knots[k - 1], knots[k]);
    a[1] + (t - a[0]) * (b[1] - a[1]) / (b[0] - a[0])
}

fn table_invert(knots: &[[f64; 2]], s: f64) -> f64 {
    let n = knots.len();
    let k = match knots.iter().position(|kn| kn[1] >= s) {
        Some(0) => return 0.0,
        Some(k) => k,
        None => n - 1,
    };
    let (a, b) = (knots[k - 1], knots[k]);
    a[0] + (s - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_compact_and_json_forms() {
        assert_eq!(
            "linear:0.5".parse::<Gauge>().unwrap(),
            Gauge::linear(0.5).unwrap()
        );
        assert_eq!(
            "power:1,0.5".parse::<Gauge>().unwrap(),
            Gauge::power(1.0, 0.5).unwrap()
        );
        assert_eq!(
            "root:1.1".parse::<Gauge>().unwrap(),
            Gauge::scaled_root(1.1).unwrap()
        );
        assert_eq!(
            r#"{"scaled_power": {"c": 2, "q": 2}}"#.parse::<Gauge>().unwrap(),
            Gauge::scaled_power(2.0, 2.0).unwrap()
        );
        assert!("table:0,0;1,1;2,3".parse::<Gauge>().is_ok());
        assert!("sine:1".parse::<Gauge>().is_err());
        assert!("linear:1,2".parse::<Gauge>().is_err());
        assert!("linear:-1".parse::<Gauge>().is_err());
        assert!(matches!(
            r#"{"linear": {"beta": 1}}"#.parse::<Gauge>(),
            Err(Error::Schema { .. })
        ));
    }
    use approx::assert_relative_eq;

    #[test]
    fn evaluation_examples() {
        assert_eq!(Gauge::power(1.0, 2.0).unwrap().eval(3.0).unwrap(), 9.0);
        assert_eq!(
            Gauge::holder_type(1.0, 1.0, 2.0)
                .unwrap()
                .eval(1.0)
                .unwrap(),
            2.0
        );
        let root = Gauge::scaled_root(2f64.sqrt()).unwrap();
        assert_relative_eq!(root.eval(2.0).unwrap(), 2.0, epsilon = 1e-15);
        assert!(matches!(root.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(Gauge::power(2.0, 2.0).unwrap().invert(8.0).unwrap(), 4.0);
        assert_relative_eq!(
            Gauge::holder_type(1.0, 1.0, 2.0)
                .unwrap()
                .invert(2.0)
                .unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(Gauge::power(1.0, 1.0).unwrap().invert(0.0).unwrap(), 0.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            Gauge::power(1.0, 2.0).unwrap().derivative(3.0).unwrap(),
            6.0
        );
        assert_eq!(
            Gauge::power(1.0, 1.0).unwrap().derivative(5.0).unwrap(),
            1.0
        );
        assert_eq!(
            Gauge::holder_type(2.0, 1.0, 2.0)
                .unwrap()
                .derivative(1.0)
                .unwrap(),
            1.5
        );
        assert!(matches!(
            Gauge::power(1.0, 0.5).unwrap().derivative(0.0),
            Err(Error::Pole { .. })
        ));
        let table = Gauge::table(vec![[0.0, 0.0], [1.0, 2.0]]).unwrap();
        assert!(matches!(table.derivative(0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn holder_approximation_cases() {
        let a = Gauge::holder_type(1.0, 1.0, 1.0)
            .unwrap()
            .holder_approximation(None)
            .unwrap();
        assert_eq!((a.q_prime, a.alpha_prime_sup), (1.0, 0.5));
        let a = Gauge::holder_type(2.0, 4.0, 3.0)
            .unwrap()
            .holder_approximation(None)
            .unwrap();
        assert_eq!((a.q_prime, a.alpha_prime_sup), (1.0, 0.5));
        let a = Gauge::holder_type(1.0, 1.0, 0.5)
            .unwrap()
            .holder_approximation(Some(0.9))
            .unwrap();
        assert_eq!(a.q_prime, 0.5);
        assert_relative_eq!(a.validity_radius, 1.0 / 81.0, max_relative = 1e-12);
        assert!(Gauge::linear(1.0)
            .unwrap()
            .holder_approximation(None)
            .is_err());
    }

    #[test]
    fn table_gauge_interpolates_and_extends() {
        let g = Gauge::table(vec![[0.0, 0.0], [1.0, 2.0], [2.0, 3.0]]).unwrap();
        assert_eq!(g.at(0.5), 1.0);
        assert_eq!(g.at(3.0), 4.0);
        assert_eq!(g.inv(4.0), 3.0);
        assert_eq!(g.inv(1.0), 0.5);
        assert!(Gauge::table(vec![[0.0, 0.0], [1.0, 1.0], [0.5, 2.0]]).is_err());
    }

    #[test]
    fn composite_matches_formula() {
        let phi = Gauge::power(1.0, 1.0 / 3.0).unwrap();
        let psi = Gauge::composite(phi.clone(), 1.0, 2.0, 1.0).unwrap();
        let t: f64 = 0.3;
        assert_relative_eq!(psi.at(t), (2.0 * t).cbrt() + t, max_relative = 1e-15);
        assert_relative_eq!(psi.inv(psi.at(t)), t, max_relative = 1e-13);
    }

    #[test]
    fn json_literals() {
        let g: Gauge = serde_json::from_str(r#"{"power": {"alpha": 1.0, "q": 0.5}}"#).unwrap();
        assert_eq!(g, Gauge::Power { alpha: 1.0, q: 0.5 });
        let g: Gauge = serde_json::from_str(r#"{"table": [[0, 0], [1, 2]]}"#).unwrap();
        assert_eq!(g, Gauge::Table(vec![[0.0, 0.0], [1.0, 2.0]]));
        let g: Gauge =
            serde_json::from_str(r#"{"holder_type": {"alpha": 1, "beta": 2, "q": 3}}"#).unwrap();
        assert!(g.validate().is_ok());
    }
}
