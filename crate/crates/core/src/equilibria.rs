//! Steady-state theory: net growth rates, the aggregate biomass profiles,
//! break-even concentrations, the existence interval of coexistence states,
//! balance-equation roots, and the fold locus.
//!
//! Every coexistence steady state has substrate component `S*` solving the
//! balance `D·(S_in − S) = H(S)` with `u = U(S*)`, `v = V(S*)`, where
//!
//! ```text
//! φ(S) = f(S) − D_u                   net planktonic growth
//! ψ(S) = g(S) − D_v                   net attached growth
//! U(S) = φ(ψ − b) / (a(ψ − φ))
//! V(S) = −φ²(ψ − b) / (a(ψ − φ)ψ)
//! H(S) = f·U/y_u + g·V/y_v            substrate consumption at equilibrium
//! ```
//!
//! `U` and `V` are positive exactly on the interval `I`: `(λ_u, λ_v)` when
//! `λ_u < λ_v`, else `(λ_v, min(λ_u, λ_b))`, where each `λ` is the substrate
//! level at which a growth law balances the matching removal rate.

use crate::dual::Dual;
use crate::error::{CoreError, Result};
use crate::model::{removal_rates, BioParams, GrowthLaw, OperatingPoint, State};
use crate::roots;

/// Residual tolerance for polished balance-equation roots.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;

/// Subintervals used when scanning the existence interval for roots.
pub(crate) const SCAN_POINTS: usize = 2000;

/// Relative guard band kept around the poles of `U` and `V`.
const POLE_GUARD: f64 = 1e-9;

/// Joint evaluation of the auxiliary functions at one substrate level.
#[derive(Clone, Copy, Debug)]
pub struct AuxiliaryEval {
    pub s: f64,
    pub phi: f64,
    pub psi: f64,
    pub u_profile: f64,
    pub v_profile: f64,
    pub h: f64,
    pub h_prime: f64,
}

/// Net growth rates `(φ, ψ)` at substrate level `s`.
pub fn net_growth(s: f64, d: f64, p: &BioParams) -> (f64, f64) {
    let (d_u, d_v) = removal_rates(d, p);
    (p.f().rate(s) - d_u, p.g().rate(s) - d_v)
}

fn profiles_dual(s: Dual, d: f64, p: &BioParams) -> (Dual, Dual, Dual, Dual, Dual) {
    let (d_u, d_v) = removal_rates(d, p);
    let f = p.f().rate_dual(s);
    let g = p.g().rate_dual(s);
    let phi = f - d_u;
    let psi = g - d_v;
    let denom = (psi - phi) * p.a;
    let u = phi * (psi - p.b) / denom;
    let v = -(phi * phi * (psi - p.b)) / (denom * psi);
    let h = f * u / p.y_u + g * v / p.y_v;
    (phi, psi, u, v, h)
}

/// `U(S)` and `V(S)` without pole checks; callers stay inside the guard band.
pub(crate) fn uv_profiles(s: f64, d: f64, p: &BioParams) -> (f64, f64) {
    let (phi, psi) = net_growth(s, d, p);
    let denom = p.a * (psi - phi);
    let u = phi * (psi - p.b) / denom;
    let v = -(phi * phi * (psi - p.b)) / (denom * psi);
    (u, v)
}

/// `H(S)` without pole checks.
pub(crate) fn h_value(s: f64, d: f64, p: &BioParams) -> f64 {
    let (u, v) = uv_profiles(s, d, p);
    p.f().rate(s) * u / p.y_u + p.g().rate(s) * v / p.y_v
}

/// `(H(S), H'(S))` by dual-number evaluation of the closed form.
pub(crate) fn h_and_slope(s: f64, d: f64, p: &BioParams) -> (f64, f64) {
    let (_, _, _, _, h) = profiles_dual(Dual::variable(s), d, p);
    (h.val, h.eps)
}

/// Evaluates φ, ψ, U, V, H, H′ at `s`, rejecting pole-adjacent inputs.
pub fn auxiliary(s: f64, d: f64, p: &BioParams) -> Result<AuxiliaryEval> {
    if s <= 0.0 {
        return Err(CoreError::NegativeConcentration(s));
    }
    if p.a == 0.0 {
        return Err(CoreError::FlocculationDegenerate);
    }
    let (phi, psi) = net_growth(s, d, p);
    let scale = phi.abs().max(psi.abs()).max(1.0);
    if (psi - phi).abs() <= POLE_GUARD * scale || psi.abs() <= POLE_GUARD * scale {
        return Err(CoreError::NearPole { s });
    }
    let (phi_d, psi_d, u, v, h) = profiles_dual(Dual::variable(s), d, p);
    Ok(AuxiliaryEval {
        s,
        phi: phi_d.val,
        psi: psi_d.val,
        u_profile: u.val,
        v_profile: v.val,
        h: h.val,
        h_prime: h.eps,
    })
}

/// Break-even concentrations and the domain bounds of their defining curves.
#[derive(Clone, Copy, Debug)]
pub struct BreakEvenSet {
    /// `f⁻¹(αD + m_u)`, absent when the removal rate exceeds `f(+∞)`.
    pub lambda_u: Option<f64>,
    /// `g⁻¹(βD + m_v)`.
    pub lambda_v: Option<f64>,
    /// `g⁻¹(βD + m_v + b)`.
    pub lambda_b: Option<f64>,
    /// `min(λ_u, λ_b)`: the substrate level of the transcritical exchange.
    pub lambda_bp: Option<f64>,
    /// Upper dilution bound of `λ_u`'s domain.
    pub d_bar_u: f64,
    /// Upper dilution bound of `λ_v`'s domain.
    pub d_bar_v: f64,
    /// Upper dilution bound of `λ_b`'s domain.
    pub d_bar_b: f64,
}

fn domain_bound(sup: f64, offset: f64, fraction: f64) -> f64 {
    if fraction > 0.0 {
        (sup - offset) / fraction
    } else if offset < sup {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Break-even concentrations at dilution rate `d`.
pub fn break_evens(d: f64, p: &BioParams) -> BreakEvenSet {
    let (d_u, d_v) = removal_rates(d, p);
    let lambda_u = p.f().break_even(d_u);
    let lambda_v = p.g().break_even(d_v);
    let lambda_b = p.g().break_even(d_v + p.b);
    let lambda_bp = match (lambda_u, lambda_b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    BreakEvenSet {
        lambda_u,
        lambda_v,
        lambda_b,
        lambda_bp,
        d_bar_u: domain_bound(p.f().supremum(), p.m_u, p.alpha),
        d_bar_v: domain_bound(p.g().supremum(), p.m_v, p.beta),
        d_bar_b: domain_bound(p.g().supremum(), p.m_v + p.b, p.beta),
    }
}

/// Which way `H` runs over the existence interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalKind {
    /// `λ_u < λ_v`: `H` grows from 0 to +∞ and the coexistence state is unique.
    Increasing,
    /// `λ_v < λ_BP`: `H` falls from +∞ to 0; a fold can split the branch in two.
    Decreasing,
}

/// Open interval of substrate levels admitting positive biomass profiles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    /// May be `+∞` when no break-even bounds the interval from above.
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, s: f64) -> bool {
        s > self.lo && s < self.hi
    }
}

/// Existence interval `I` at dilution rate `d`, with its orientation.
/// `None` when the interval is empty or degenerate.
pub fn existence_interval(d: f64, p: &BioParams) -> Option<(Interval, IntervalKind)> {
    let be = break_evens(d, p);
    let lu = be.lambda_u.unwrap_or(f64::INFINITY);
    let lv = be.lambda_v.unwrap_or(f64::INFINITY);
    if lu.is_infinite() && lv.is_infinite() {
        return None;
    }
    if lu < lv {
        Some((Interval { lo: lu, hi: lv }, IntervalKind::Increasing))
    } else if lv < lu {
        let hi = lu.min(be.lambda_b.unwrap_or(f64::INFINITY));
        if hi > lv {
            Some((Interval { lo: lv, hi }, IntervalKind::Decreasing))
        } else {
            None
        }
    } else {
        None
    }
}

/// Identity of a steady state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SteadyStateKind {
    /// `(S_in, 0, 0)`: both forms washed out.
    Washout,
    /// Coexistence branch with positive `c₃` factor; the one that can be
    /// locally stable.
    Branch1,
    /// Coexistence branch with negative `c₃` factor: saddle-type, and the one
    /// that meets the washout branch at the transcritical point.
    Branch2,
    /// Planktonic-only state of the `a = 0` limit.
    PlanktonicOnly,
    /// Attached-only state of the `a = 0`, `b = 0` limit.
    AttachedOnly,
}

impl SteadyStateKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Washout => "washout",
            Self::Branch1 => "branch1",
            Self::Branch2 => "branch2",
            Self::PlanktonicOnly => "planktonic-only",
            Self::AttachedOnly => "attached-only",
        }
    }

    /// True for states with both biomass forms present.
    pub fn is_coexistence(&self) -> bool {
        matches!(self, Self::Branch1 | Self::Branch2)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SteadyState {
    pub kind: SteadyStateKind,
    pub state: State,
    /// Substrate component (the balance-equation root for positive kinds).
    pub s_star: f64,
}

/// Sign of the stability-relevant factorization `φ·(b−ψ)·(D+H′)` at `s`.
pub(crate) fn c3_factor(s: f64, d: f64, p: &BioParams) -> f64 {
    let (phi, psi) = net_growth(s, d, p);
    let (_, hp) = h_and_slope(s, d, p);
    phi * (p.b - psi) * (d + hp)
}

/// Maps a parameterizing substrate level to the inflow concentration that
/// places a coexistence state there: `S_in(S) = S + H(S)/D`.
pub fn s_in_of_s(s: f64, d: f64, p: &BioParams) -> f64 {
    s + h_value(s, d, p) / d
}

/// All steady states at an operating point, washout first, positive roots in
/// increasing substrate order.
pub fn find_steady_states(op: &OperatingPoint, p: &BioParams) -> Result<Vec<SteadyState>> {
    op.validate()?;
    p.validate()?;
    let washout = SteadyState {
        kind: SteadyStateKind::Washout,
        state: State::new(op.s_in, 0.0, 0.0),
        s_star: op.s_in,
    };
    let mut states = vec![washout];
    if p.a == 0.0 {
        classical_states(op, p, &mut states);
        return Ok(states);
    }
    let Some((iv, _)) = existence_interval(op.d, p) else {
        return Ok(states);
    };
    // roots satisfy D(S_in − S*) = H(S*) ≥ 0, so none lie above S_in
    let guard_lo = POLE_GUARD * iv.lo.abs().max(1.0);
    let lo = iv.lo + guard_lo;
    let hi = iv.hi.min(op.s_in) - POLE_GUARD * iv.hi.min(op.s_in).abs().max(1.0);
    if !(hi > lo) || op.d == 0.0 {
        return Ok(states);
    }
    let balance = |s: f64| op.d * (op.s_in - s) - h_value(s, op.d, p);
    for (blo, bhi, flo, fhi) in roots::sign_change_brackets(balance, lo, hi, SCAN_POINTS) {
        let s_star = roots::refine(balance, blo, bhi, flo, fhi);
        let residual = balance(s_star).abs();
        let scale = (op.d * op.s_in).abs().max(1.0);
        // a machine-exact root of a steep balance still carries a residual of
        // |F'|·ulp(S); accept whichever floor is larger
        let slope = op.d + h_and_slope(s_star, op.d, p).1.abs();
        let floor = slope * 8.0 * f64::EPSILON * s_star.abs().max(1.0);
        if residual > (ROOT_RESIDUAL_TOL * scale).max(floor) {
            if h_value(s_star, op.d, p).abs() > 1e6 * scale {
                // bracket straddled a pole of the profiles, not a root
                continue;
            }
            return Err(CoreError::Inconsistent(format!(
                "balance root at S={s_star} polished to residual {residual:e}"
            )));
        }
        if states
            .iter()
            .any(|e| e.kind.is_coexistence() && (e.s_star - s_star).abs() < 1e-8 * s_star.max(1.0))
        {
            continue;
        }
        let (u, v) = uv_profiles(s_star, op.d, p);
        if !(u > 0.0) || !(v > 0.0) {
            continue;
        }
        let kind = if c3_factor(s_star, op.d, p) >= 0.0 {
            SteadyStateKind::Branch1
        } else {
            SteadyStateKind::Branch2
        };
        states.push(SteadyState {
            kind,
            state: State::new(s_star, u, v),
            s_star,
        });
    }
    // washout stays first; coexistence roots in increasing substrate order
    states[1..].sort_by(|a, b| a.s_star.partial_cmp(&b.s_star).unwrap());
    Ok(states)
}

/// Steady states of the `a = 0` limit: washout, single-species states, and
/// (for `b > 0`) the detachment-sustained coexistence state at `λ_b`.
fn classical_states(op: &OperatingPoint, p: &BioParams, states: &mut Vec<SteadyState>) {
    if op.d == 0.0 {
        return;
    }
    let be = break_evens(op.d, p);
    if let Some(lu) = be.lambda_u {
        if lu < op.s_in {
            let u = p.y_u * op.d * (op.s_in - lu) / p.f().rate(lu);
            states.push(SteadyState {
                kind: SteadyStateKind::PlanktonicOnly,
                state: State::new(lu, u, 0.0),
                s_star: lu,
            });
        }
    }
    if p.b == 0.0 {
        if let Some(lv) = be.lambda_v {
            if lv < op.s_in {
                let v = p.y_v * op.d * (op.s_in - lv) / p.g().rate(lv);
                states.push(SteadyState {
                    kind: SteadyStateKind::AttachedOnly,
                    state: State::new(lv, 0.0, v),
                    s_star: lv,
                });
            }
        }
    } else if let Some(lb) = be.lambda_b {
        let (phi_b, _) = net_growth(lb, op.d, p);
        if lb < op.s_in && phi_b < 0.0 {
            let denom = p.g().rate(lb) / p.y_v - p.b * p.f().rate(lb) / (phi_b * p.y_u);
            let v = op.d * (op.s_in - lb) / denom;
            let u = -p.b * v / phi_b;
            states.push(SteadyState {
                kind: SteadyStateKind::Branch1,
                state: State::new(lb, u, v),
                s_star: lb,
            });
        }
    }
}

/// Fold of the coexistence branch in the dilution direction.
#[derive(Clone, Copy, Debug)]
pub struct FoldPoint {
    /// Substrate component where the two coexistence roots merge.
    pub s_lp: f64,
    /// Inflow concentration of the fold: `H(S_LP)/D + S_LP`.
    pub lambda_lp: f64,
    /// Set when `H' = -D` had more than one root; `s_lp` is then the smallest.
    pub multiple_roots: bool,
}

/// Locates the fold `H'(S) = −D` on the decreasing-`H` interval, if any.
pub fn fold_locus(d: f64, p: &BioParams) -> Option<FoldPoint> {
    if p.a == 0.0 || d <= 0.0 {
        return None;
    }
    let (iv, kind) = existence_interval(d, p)?;
    if kind != IntervalKind::Decreasing {
        return None;
    }
    let lo = iv.lo + POLE_GUARD * iv.lo.abs().max(1.0);
    let mut hi = iv.hi;
    let slope = |s: f64| h_and_slope(s, d, p).1 + d;
    if hi.is_infinite() {
        // H flattens at large substrate, so the slope eventually beats -D
        hi = lo.max(1.0) * 2.0;
        let mut tries = 0;
        while slope(hi) < 0.0 {
            hi *= 2.0;
            tries += 1;
            if tries > 60 {
                return None;
            }
        }
    }
    if slope(hi) < 0.0 {
        return None;
    }
    let brackets = roots::sign_change_brackets(slope, lo, hi, 256);
    let (blo, bhi, flo, fhi) = *brackets.first()?;
    let s_lp = roots::refine(slope, blo, bhi, flo, fhi);
    Some(FoldPoint {
        s_lp,
        lambda_lp: s_in_of_s(s_lp, d, p),
        multiple_roots: brackets.len() > 1,
    })
}

/// Dilution rate at which the fold locus detaches from the transcritical
/// curve: the root of `H'(λ_BP(D)) = −D`. `None` when it never does.
pub fn critical_dilution_dbar(p: &BioParams) -> Option<f64> {
    if p.a == 0.0 {
        return None;
    }
    let residual = |d: f64| -> Option<f64> {
        let (iv, kind) = existence_interval(d, p)?;
        if kind != IntervalKind::Decreasing || iv.hi.is_infinite() {
            return None;
        }
        Some(h_and_slope(iv.hi, d, p).1 + d)
    };
    let be0 = break_evens(0.0, p);
    let d_max = be0
        .d_bar_v
        .min(be0.d_bar_u.max(be0.d_bar_b))
        .min(1e6);
    if !(d_max > 0.0) {
        return None;
    }
    let n = 800;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let d = 1e-9 + (d_max * (1.0 - 1e-9) - 1e-9) * i as f64 / n as f64;
        let Some(r) = residual(d) else {
            prev = None;
            continue;
        };
        if let Some((dp, rp)) = prev {
            if rp == 0.0 || (rp < 0.0) != (r < 0.0) {
                let f = |x: f64| residual(x).unwrap_or(f64::NAN);
                let root = roots::refine(f, dp, d, rp, r);
                return Some(root);
            }
        }
        prev = Some((d, r));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vector_field;

    #[test]
    fn net_growth_hand_values() {
        // line 3, D=0.1, S=2: φ = 5·2/4 − 3.35, ψ = 5·2/5 − 1.1
        let p = BioParams::line3();
        let (phi, psi) = net_growth(2.0, 0.1, &p);
        assert!((phi + 0.85).abs() < 1e-14);
        assert!((psi - 0.9).abs() < 1e-14);
    }

    #[test]
    fn break_evens_line3() {
        let p = BioParams::line3();
        let be = break_evens(0.1, &p);
        assert!((be.lambda_u.unwrap() - 2.0 * 3.35 / 1.65).abs() < 1e-12);
        assert!((be.lambda_v.unwrap() - 3.0 * 1.1 / 3.9).abs() < 1e-12);
        assert!((be.lambda_b.unwrap() - 3.0 * 3.1 / 1.9).abs() < 1e-12);
        assert_eq!(be.lambda_bp, be.lambda_u);
        // at D = 0 the transcritical curve starts from 6.5/1.75
        let be0 = break_evens(0.0, &p);
        assert!((be0.lambda_u.unwrap() - 6.5 / 1.75).abs() < 1e-12);
        // domain bounds
        assert!((be.d_bar_u - 1.75).abs() < 1e-12);
        assert!((be.d_bar_v - 4.0).abs() < 1e-12);
        assert!((be.d_bar_b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn break_evens_line2_reference_values() {
        let p = BioParams::line2();
        let be = break_evens(0.142, &p);
        assert!((be.lambda_v.unwrap() - 0.0787).abs() < 1e-3);
        assert!((be.lambda_b.unwrap() - 2.2226).abs() < 1e-3);
        assert_eq!(be.lambda_bp, be.lambda_b);
    }

    #[test]
    fn interval_line1_is_increasing() {
        // line 1 keeps λ_u < λ_v over the whole dilution domain
        let p = BioParams::line1();
        for d in [0.0, 0.5, 1.0, 2.0, 3.5, 5.0] {
            if let Some((iv, kind)) = existence_interval(d, &p) {
                assert_eq!(kind, IntervalKind::Increasing, "d={d}");
                assert!(iv.lo < iv.hi);
            }
        }
        let (iv, _) = existence_interval(3.5, &p).unwrap();
        assert!((iv.lo - 2.0).abs() < 1e-12);
    }

    #[test]
    fn interval_line3_matches_break_evens() {
        let p = BioParams::line3();
        let (iv, kind) = existence_interval(0.1, &p).unwrap();
        assert_eq!(kind, IntervalKind::Decreasing);
        assert!((iv.lo - 0.8461538461538461).abs() < 1e-12);
        assert!((iv.hi - 4.060606060606061).abs() < 1e-12);
    }

    #[test]
    fn auxiliary_hand_profile() {
        // U(2) and V(2) for line 3 at D = 0.1, from the closed forms
        let p = BioParams::line3();
        let aux = auxiliary(2.0, 0.1, &p).unwrap();
        assert!((aux.u_profile - 0.935 / 7.0).abs() < 1e-12);
        assert!((aux.v_profile - 0.79475 / 6.3).abs() < 1e-12);
        let h = 2.5 * aux.u_profile + 2.0 * aux.v_profile;
        assert!((aux.h - h).abs() < 1e-13);
    }

    #[test]
    fn h_prime_matches_finite_difference() {
        let p = BioParams::line3();
        let (iv, _) = existence_interval(0.1, &p).unwrap();
        for i in 1..50 {
            let s = iv.lo + (iv.hi - iv.lo) * i as f64 / 51.0;
            let (_, hp) = h_and_slope(s, 0.1, &p);
            let dh = 1e-6;
            let fd = (h_value(s + dh, 0.1, &p) - h_value(s - dh, 0.1, &p)) / (2.0 * dh);
            assert!((hp - fd).abs() < 1e-5 * hp.abs().max(1.0), "s={s}: {hp} vs {fd}");
        }
    }

    #[test]
    fn auxiliary_rejects_poles_and_degenerate_a() {
        let p = BioParams::line3();
        // ψ = 0 exactly at λ_v
        let lv = break_evens(0.1, &p).lambda_v.unwrap();
        assert!(matches!(
            auxiliary(lv, 0.1, &p),
            Err(CoreError::NearPole { .. })
        ));
        let p0 = p.with_flocculation(0.0, 2.0);
        assert!(matches!(
            auxiliary(2.0, 0.1, &p0),
            Err(CoreError::FlocculationDegenerate)
        ));
    }

    #[test]
    fn steady_state_counts_line3() {
        let p = BioParams::line3();
        // below the fold: washout only
        let ss = find_steady_states(&OperatingPoint::new(3.80, 0.1), &p).unwrap();
        assert_eq!(ss.len(), 1);
        // between fold and transcritical: washout + two coexistence states
        let ss = find_steady_states(&OperatingPoint::new(3.90, 0.1), &p).unwrap();
        assert_eq!(ss.len(), 3);
        // past the transcritical: washout + one coexistence state
        let ss = find_steady_states(&OperatingPoint::new(5.0, 0.1), &p).unwrap();
        assert_eq!(ss.len(), 2);
        assert_eq!(ss[1].kind, SteadyStateKind::Branch1);
    }

    #[test]
    fn steady_state_residuals_vanish() {
        let p = BioParams::line3();
        for s_in in [3.9, 4.5, 5.0, 9.0] {
            let op = OperatingPoint::new(s_in, 0.1);
            for e in find_steady_states(&op, &p).unwrap() {
                let r = vector_field(&e.state, &op, &p);
                assert!(
                    r.inf_norm() < 1e-9,
                    "s_in={s_in} kind={:?}: residual {}",
                    e.kind,
                    r.inf_norm()
                );
            }
        }
    }

    #[test]
    fn branch_kinds_split_at_fold() {
        let p = BioParams::line3();
        let ss = find_steady_states(&OperatingPoint::new(3.95, 0.1), &p).unwrap();
        let fold = fold_locus(0.1, &p).unwrap();
        let b1 = ss.iter().find(|e| e.kind == SteadyStateKind::Branch1).unwrap();
        let b2 = ss.iter().find(|e| e.kind == SteadyStateKind::Branch2).unwrap();
        assert!(b1.s_star < fold.s_lp);
        assert!(b2.s_star > fold.s_lp);
    }

    #[test]
    fn fold_locus_defining_equation() {
        let p = BioParams::line3();
        let fold = fold_locus(0.1, &p).unwrap();
        let (_, hp) = h_and_slope(fold.s_lp, 0.1, &p);
        assert!((hp + 0.1).abs() < 1e-9);
        assert!(!fold.multiple_roots);
        // no fold on the increasing geometry
        assert!(fold_locus(0.5, &BioParams::line1()).is_none());
    }

    #[test]
    fn classical_limit_states() {
        let p = BioParams::line3().with_flocculation(0.0, 0.0);
        let ss = find_steady_states(&OperatingPoint::new(5.0, 0.1), &p).unwrap();
        // washout, planktonic-only at λ_u, attached-only at λ_v
        assert_eq!(ss.len(), 3);
        assert!(ss
            .iter()
            .any(|e| e.kind == SteadyStateKind::PlanktonicOnly && (e.s_star - 4.0606).abs() < 1e-3));
        assert!(ss
            .iter()
            .any(|e| e.kind == SteadyStateKind::AttachedOnly && (e.s_star - 0.8462).abs() < 1e-3));
        let op = OperatingPoint::new(5.0, 0.1);
        for e in &ss {
            assert!(vector_field(&e.state, &op, &p).inf_norm() < 1e-12);
        }
    }

    #[test]
    fn dbar_residual_is_zero() {
        let p = BioParams::line3();
        let dbar = critical_dilution_dbar(&p).unwrap();
        let (iv, _) = existence_interval(dbar, &p).unwrap();
        let r = h_and_slope(iv.hi, dbar, &p).1 + dbar;
        assert!(r.abs() < 1e-9, "residual {r}");
        assert!(critical_dilution_dbar(&BioParams::line1()).is_none());
    }
}
