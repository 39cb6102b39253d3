//! Biological parameters, growth kinetics, and the chemostat vector field.
//!
//! The state is `(S, u, v)`: substrate, planktonic biomass, and attached
//! (aggregated) biomass, all in g/l. Planktonic cells aggregate at rate
//! `a·(u+v)·u` and flocs release isolated cells at rate `b·v`. Each form is
//! removed at its own rate `D_u = α·D + m_u`, `D_v = β·D + m_v`, combining a
//! dilution fraction with mortality.

use crate::dual::Dual;
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// A growth law usable by the steady-state theory: zero at zero substrate
/// and strictly increasing, with a one-sided supremum at infinite substrate.
pub trait GrowthLaw {
    /// Specific growth rate at substrate concentration `s` (1/h).
    fn rate(&self, s: f64) -> f64;

    /// Derivative of the rate with respect to `s`.
    fn slope(&self, s: f64) -> f64;

    /// Least upper bound of the rate (`+∞` for unbounded laws).
    fn supremum(&self) -> f64;

    /// Substrate level at which the rate equals `r`, if the law reaches it.
    fn break_even(&self, r: f64) -> Option<f64>;

    /// Rate evaluated on a dual number, propagating the derivative.
    fn rate_dual(&self, s: Dual) -> Dual {
        Dual {
            val: self.rate(s.val),
            eps: self.slope(s.val) * s.eps,
        }
    }
}

/// Monod kinetics `m·S/(k+S)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monod {
    pub m: f64,
    pub k: f64,
}

impl GrowthLaw for Monod {
    fn rate(&self, s: f64) -> f64 {
        self.m * s / (self.k + s)
    }

    fn slope(&self, s: f64) -> f64 {
        let denom = self.k + s;
        self.m * self.k / (denom * denom)
    }

    fn supremum(&self) -> f64 {
        self.m
    }

    fn break_even(&self, r: f64) -> Option<f64> {
        if r >= 0.0 && r < self.m {
            Some(self.k * r / (self.m - r))
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    Planktonic,
    Attached,
}

/// The fixed biological constants of the model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BioParams {
    /// Max growth rate of planktonic bacteria (1/h).
    pub m1: f64,
    /// Half-saturation constant of planktonic growth (g/l).
    pub k1: f64,
    /// Max growth rate of attached bacteria (1/h).
    pub m2: f64,
    /// Half-saturation constant of attached growth (g/l).
    pub k2: f64,
    /// Attachment rate (l/h/g).
    pub a: f64,
    /// Detachment rate (1/h).
    pub b: f64,
    /// Planktonic dilution fraction (dimensionless).
    pub alpha: f64,
    /// Attached dilution fraction (dimensionless).
    pub beta: f64,
    /// Planktonic mortality (1/h).
    pub m_u: f64,
    /// Attached mortality (1/h).
    pub m_v: f64,
    /// Planktonic yield (dimensionless).
    pub y_u: f64,
    /// Attached yield (dimensionless).
    pub y_v: f64,
}

impl BioParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.m1, "m1"),
            (self.k1, "k1"),
            (self.m2, "m2"),
            (self.k2, "k2"),
            (self.y_u, "y_u"),
            (self.y_v, "y_v"),
        ];
        for (x, name) in positive {
            if !(x > 0.0) || !x.is_finite() {
                return Err(CoreError::InvalidParams(format!(
                    "{name} must be positive and finite, got {x}"
                )));
            }
        }
        let nonnegative = [
            (self.a, "a"),
            (self.b, "b"),
            (self.alpha, "alpha"),
            (self.beta, "beta"),
            (self.m_u, "m_u"),
            (self.m_v, "m_v"),
        ];
        for (x, name) in nonnegative {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(CoreError::InvalidParams(format!(
                    "{name} must be nonnegative and finite, got {x}"
                )));
            }
        }
        Ok(())
    }

    pub fn growth(&self, species: Species) -> Monod {
        match species {
            Species::Planktonic => Monod {
                m: self.m1,
                k: self.k1,
            },
            Species::Attached => Monod {
                m: self.m2,
                k: self.k2,
            },
        }
    }

    /// Planktonic growth law `f`.
    pub fn f(&self) -> Monod {
        self.growth(Species::Planktonic)
    }

    /// Attached growth law `g`.
    pub fn g(&self) -> Monod {
        self.growth(Species::Attached)
    }

    /// Returns a copy with the attachment/detachment rates replaced.
    pub fn with_flocculation(&self, a: f64, b: f64) -> Self {
        Self { a, b, ..*self }
    }

    /// Resolves one of the named reference parameter sets.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "line1" => Some(Self {
                m1: 4.5,
                k1: 1.0,
                m2: 3.0,
                k2: 2.7,
                a: 2.0,
                b: 3.0,
                alpha: 0.8,
                beta: 0.5,
                m_u: 0.2,
                m_v: 0.25,
                y_u: 1.0,
                y_v: 1.0,
            }),
            "line2" => Some(Self {
                m1: 5.0,
                k1: 2.0,
                m2: 5.0,
                k2: 3.0,
                a: 4.0,
                b: 2.0,
                alpha: 1.0,
                beta: 0.9,
                m_u: 3.25,
                m_v: 0.0,
                y_u: 1.0,
                y_v: 1.0,
            }),
            "line3" => Some(Self {
                m1: 5.0,
                k1: 2.0,
                m2: 5.0,
                k2: 3.0,
                a: 4.0,
                b: 2.0,
                alpha: 1.0,
                beta: 1.0,
                m_u: 3.25,
                m_v: 1.0,
                y_u: 1.0,
                y_v: 1.0,
            }),
            "line5" => Some(Self {
                m1: 3.5,
                k1: 2.5,
                m2: 3.0,
                k2: 1.5,
                a: 1.0,
                b: 1.0,
                alpha: 1.0,
                beta: 0.75,
                m_u: 0.7,
                m_v: 0.4,
                y_u: 1.0,
                y_v: 1.0,
            }),
            _ => None,
        }
    }

    pub const PRESET_NAMES: [&'static str; 4] = ["line1", "line2", "line3", "line5"];

    pub fn line1() -> Self {
        Self::preset("line1").unwrap()
    }

    pub fn line2() -> Self {
        Self::preset("line2").unwrap()
    }

    pub fn line3() -> Self {
        Self::preset("line3").unwrap()
    }

    pub fn line5() -> Self {
        Self::preset("line5").unwrap()
    }
}

/// The two control parameters of the chemostat.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Inflow substrate concentration (g/l).
    pub s_in: f64,
    /// Dilution rate (1/h).
    pub d: f64,
}

impl OperatingPoint {
    pub fn new(s_in: f64, d: f64) -> Self {
        Self { s_in, d }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_in >= 0.0) || !self.s_in.is_finite() {
            return Err(CoreError::InvalidParams(format!(
                "s_in must be nonnegative and finite, got {}",
                self.s_in
            )));
        }
        if !(self.d >= 0.0) || !self.d.is_finite() {
            return Err(CoreError::InvalidParams(format!(
                "d must be nonnegative and finite, got {}",
                self.d
            )));
        }
        Ok(())
    }
}

/// Model state: substrate, planktonic biomass, attached biomass (g/l).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub s: f64,
    pub u: f64,
    pub v: f64,
}

impl State {
    pub fn new(s: f64, u: f64, v: f64) -> Self {
        Self { s, u, v }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.s, self.u, self.v]
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        Self {
            s: x[0],
            u: x[1],
            v: x[2],
        }
    }

    pub fn inf_norm(&self) -> f64 {
        self.s.abs().max(self.u.abs()).max(self.v.abs())
    }

    pub fn dist_inf(&self, other: &State) -> f64 {
        (self.s - other.s)
            .abs()
            .max((self.u - other.u).abs())
            .max((self.v - other.v).abs())
    }
}

/// Removal rates `(D_u, D_v) = (α·D + m_u, β·D + m_v)`.
pub fn removal_rates(d: f64, p: &BioParams) -> (f64, f64) {
    (p.alpha * d + p.m_u, p.beta * d + p.m_v)
}

/// Specific growth rate of one species; errors on negative substrate.
pub fn growth_rate(species: Species, s: f64, p: &BioParams) -> Result<f64> {
    if s < 0.0 {
        return Err(CoreError::NegativeConcentration(s));
    }
    Ok(p.growth(species).rate(s))
}

/// Right-hand side of the model at state `x`.
///
/// Callers must pass componentwise nonnegative states; small negative values
/// produced transiently by an integrator should be clamped beforehand.
pub fn vector_field(x: &State, op: &OperatingPoint, p: &BioParams) -> State {
    let (d_u, d_v) = removal_rates(op.d, p);
    let fs = p.f().rate(x.s);
    let gs = p.g().rate(x.s);
    let floc = p.a * (x.u + x.v) * x.u;
    State {
        s: op.d * (op.s_in - x.s) - fs * x.u / p.y_u - gs * x.v / p.y_v,
        u: (fs - d_u) * x.u - floc + p.b * x.v,
        v: (gs - d_v) * x.v + floc - p.b * x.v,
    }
}

/// Analytic Jacobian of [`vector_field`] at `x` (rows d(Ṡ,u̇,v̇), columns d(S,u,v)).
pub fn jacobian(x: &State, op: &OperatingPoint, p: &BioParams) -> [[f64; 3]; 3] {
    let (d_u, d_v) = removal_rates(op.d, p);
    let f = p.f();
    let g = p.g();
    let fs = f.rate(x.s);
    let gs = g.rate(x.s);
    let fps = f.slope(x.s);
    let gps = g.slope(x.s);
    [
        [
            -op.d - fps * x.u / p.y_u - gps * x.v / p.y_v,
            -fs / p.y_u,
            -gs / p.y_v,
        ],
        [
            fps * x.u,
            fs - d_u - p.a * (2.0 * x.u + x.v),
            -p.a * x.u + p.b,
        ],
        [gps * x.v, p.a * (2.0 * x.u + x.v), gs - d_v + p.a * x.u - p.b],
    ]
}
