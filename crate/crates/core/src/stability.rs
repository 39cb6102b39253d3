//! Local stability: characteristic-cubic eigenvalues of the 3×3 Jacobian,
//! the Routh–Hurwitz coefficients of coexistence states, classification of
//! every steady state, and the transversality slope at Hopf crossings.

use crate::equilibria::{break_evens, find_steady_states, net_growth, SteadyState, SteadyStateKind};
use crate::error::{CoreError, Result};
use crate::model::{jacobian, vector_field, BioParams, GrowthLaw, OperatingPoint};
use num_complex::Complex64;

/// Eigenvalue real parts within this band of zero classify as marginal.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Residual accepted when verifying a steady state handed to this module.
const STATE_RESIDUAL_TOL: f64 = 1e-9;

/// The nine signed Jacobian magnitudes entering the Routh–Hurwitz
/// composition. All are nonnegative at a coexistence state except `a23`.
#[derive(Clone, Copy, Debug)]
pub struct MEntries {
    pub m11: f64,
    pub m12: f64,
    pub m13: f64,
    pub m21: f64,
    pub m22: f64,
    pub a23: f64,
    pub m31: f64,
    pub m32: f64,
    pub m33: f64,
}

/// Routh–Hurwitz data of a coexistence steady state. The characteristic
/// polynomial is `λ³ + c1·λ² + c2·λ + c3`, and `c4 = c1·c2 − c3` is the
/// Hurwitz determinant whose sign switches at Hopf crossings.
#[derive(Clone, Copy, Debug)]
pub struct RouthHurwitz {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub m_entries: MEntries,
}

fn m_entries_at(s: f64, u: f64, v: f64, op: &OperatingPoint, p: &BioParams) -> MEntries {
    let f = p.f();
    let g = p.g();
    let (phi, psi) = net_growth(s, op.d, p);
    MEntries {
        m11: op.d + f.slope(s) * u / p.y_u + g.slope(s) * v / p.y_v,
        m12: f.rate(s) / p.y_u,
        m13: g.rate(s) / p.y_v,
        m21: f.slope(s) * u,
        m22: p.a * (2.0 * u + v) - phi,
        a23: p.b - p.a * u,
        m31: g.slope(s) * v,
        m32: p.a * (2.0 * u + v),
        m33: p.b - p.a * u - psi,
    }
}

pub(crate) fn routh_hurwitz_at(s: f64, u: f64, v: f64, op: &OperatingPoint, p: &BioParams) -> RouthHurwitz {
    let m = m_entries_at(s, u, v, op, p);
    let c1 = m.m11 + m.m22 + m.m33;
    let c2 = m.m12 * m.m21 + m.m13 * m.m31 - m.m32 * m.a23
        + m.m11 * m.m22
        + m.m11 * m.m33
        + m.m22 * m.m33;
    let c3 = m.m11 * (m.m22 * m.m33 - m.m32 * m.a23)
        + m.m21 * (m.m12 * m.m33 + m.m32 * m.m13)
        + m.m31 * (m.m12 * m.a23 + m.m13 * m.m22);
    RouthHurwitz {
        c1,
        c2,
        c3,
        c4: c1 * c2 - c3,
        m_entries: m,
    }
}

/// Routh–Hurwitz coefficients of a coexistence steady state.
pub fn routh_hurwitz(e: &SteadyState, op: &OperatingPoint, p: &BioParams) -> Result<RouthHurwitz> {
    if !e.kind.is_coexistence() {
        return Err(CoreError::WrongKind {
            expected: "coexistence",
            got: e.kind.name(),
        });
    }
    let residual = vector_field(&e.state, op, p).inf_norm();
    if residual > STATE_RESIDUAL_TOL {
        return Err(CoreError::StaleSteadyState {
            residual,
            tol: STATE_RESIDUAL_TOL,
        });
    }
    Ok(routh_hurwitz_at(e.state.s, e.state.u, e.state.v, op, p))
}

// ---------------------------------------------------------------------------
// characteristic cubic
// ---------------------------------------------------------------------------

/// Real roots of the monic cubic `x³ + a·x² + b·x + c`, via the depressed
/// form with the trigonometric branch for three real roots and Cardano for
/// one. Complex pairs come from deflating the quadratic factor.
fn solve_monic_cubic(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let shift = -a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    if disc > 0.0 {
        // one real root; avoid cancellation by taking the large cube root first
        let sq = disc.sqrt();
        let u = if q >= 0.0 { -0.5 * q - sq } else { -0.5 * q + sq };
        let t1 = u.cbrt();
        let t = t1 + if t1 != 0.0 { -p / (3.0 * t1) } else { 0.0 };
        let r = t + shift;
        // deflate: x² + (a + r)x + (b + r(a + r))
        let qb = a + r;
        let qc = b + r * qb;
        let qd = qb * qb - 4.0 * qc;
        let (z1, z2) = if qd >= 0.0 {
            let sd = qd.sqrt();
            (
                Complex64::new((-qb + sd) / 2.0, 0.0),
                Complex64::new((-qb - sd) / 2.0, 0.0),
            )
        } else {
            let sd = (-qd).sqrt() / 2.0;
            (
                Complex64::new(-qb / 2.0, sd),
                Complex64::new(-qb / 2.0, -sd),
            )
        };
        [Complex64::new(r, 0.0), z1, z2]
    } else {
        // three real roots (possibly repeated)
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        let arg = if m == 0.0 {
            0.0
        } else {
            (3.0 * q / (p * m)).clamp(-1.0, 1.0)
        };
        let theta = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        [
            Complex64::new(m * theta.cos() + shift, 0.0),
            Complex64::new(m * (theta - tau).cos() + shift, 0.0),
            Complex64::new(m * (theta + tau).cos() + shift, 0.0),
        ]
    }
}

fn poly_eval(a: f64, b: f64, c: f64, x: Complex64) -> Complex64 {
    ((x + a) * x + b) * x + c
}

fn poly_slope(a: f64, b: f64, x: Complex64) -> Complex64 {
    (3.0 * x + 2.0 * a) * x + b
}

fn frobenius(j: &[[f64; 3]; 3]) -> f64 {
    j.iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

fn det3_complex(j: &[[f64; 3]; 3], lambda: Complex64) -> Complex64 {
    let m = |r: usize, c: usize| -> Complex64 {
        if r == c {
            Complex64::new(j[r][c], 0.0) - lambda
        } else {
            Complex64::new(j[r][c], 0.0)
        }
    };
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

/// Eigenvalues of a real 3×3 matrix, sorted by real part (ties by imaginary
/// part). Each root is Newton-polished on the characteristic cubic.
pub fn eigenvalues(j: &[[f64; 3]; 3]) -> Result<[Complex64; 3]> {
    if j.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CoreError::NonFinite("jacobian entries"));
    }
    let tr = j[0][0] + j[1][1] + j[2][2];
    let minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] + j[0][0] * j[2][2]
        - j[0][2] * j[2][0]
        + j[1][1] * j[2][2]
        - j[1][2] * j[2][1];
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
        - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    // det(λI − J) = λ³ − tr·λ² + minors·λ − det
    let (a, b, c) = (-tr, minors, -det);
    let mut roots = solve_monic_cubic(a, b, c);
    for root in &mut roots {
        // monotone Newton polish; near multiple roots the quotient is noise,
        // so a step is kept only when it actually shrinks the residual
        for _ in 0..2 {
            let fx = poly_eval(a, b, c, *root);
            let dfx = poly_slope(a, b, *root);
            if dfx.norm() <= 1e-30 {
                break;
            }
            let candidate = *root - fx / dfx;
            if poly_eval(a, b, c, candidate).norm() < fx.norm() {
                *root = candidate;
            } else {
                break;
            }
        }
        // keep conjugate symmetry exact for near-real polish results
        if root.im != 0.0 && root.im.abs() < 1e-14 * root.re.abs() {
            *root = Complex64::new(root.re, 0.0);
        }
    }
    // a polished pair may drift off exact conjugacy; restore it
    if roots[1].im != 0.0 && roots[2].im != 0.0 {
        let re = 0.5 * (roots[1].re + roots[2].re);
        let im = 0.5 * (roots[1].im.abs() + roots[2].im.abs());
        roots[1] = Complex64::new(re, im);
        roots[2] = Complex64::new(re, -im);
    }
    let scale = frobenius(j).max(1.0);
    let tol = 1e-8 * scale * scale * scale;
    for root in &roots {
        let residual = det3_complex(j, *root).norm();
        if !(residual <= tol) {
            return Err(CoreError::Inconsistent(format!(
                "eigenvalue residual {residual:e} exceeds {tol:e}"
            )));
        }
    }
    roots.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    Ok(roots)
}

/// Right eigenvector for `lambda`, from the largest cross product of two rows
/// of `J − λI`.
pub fn eigenvector(j: &[[f64; 3]; 3], lambda: Complex64) -> [Complex64; 3] {
    let row = |r: usize| -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for c in 0..3 {
            out[c] = Complex64::new(j[r][c], 0.0);
            if r == c {
                out[c] -= lambda;
            }
        }
        out
    };
    let cross = |x: [Complex64; 3], y: [Complex64; 3]| {
        [
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        ]
    };
    let r = [row(0), row(1), row(2)];
    let candidates = [cross(r[0], r[1]), cross(r[1], r[2]), cross(r[0], r[2])];
    let norm2 = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let best = candidates
        .into_iter()
        .max_by(|x, y| norm2(x).partial_cmp(&norm2(y)).unwrap())
        .unwrap();
    let n = norm2(&best).sqrt();
    if n == 0.0 {
        return best;
    }
    [best[0] / n, best[1] / n, best[2] / n]
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityMechanism {
    AllEigenvaluesNegative,
    RealPositiveEigenvalue,
    ComplexPairPositive,
    MarginalZero,
    MarginalImaginary,
}

#[derive(Clone, Copy, Debug)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub mechanism: StabilityMechanism,
    pub eigenvalues: [Complex64; 3],
}

impl StabilityVerdict {
    pub fn is_marginal(&self) -> bool {
        matches!(
            self.mechanism,
            StabilityMechanism::MarginalZero | StabilityMechanism::MarginalImaginary
        )
    }

    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::MIN, f64::max)
    }
}

fn verdict_from_eigenvalues(eig: [Complex64; 3]) -> StabilityVerdict {
    let leader = eig
        .iter()
        .copied()
        .max_by(|x, y| x.re.partial_cmp(&y.re).unwrap())
        .unwrap();
    let (stable, mechanism) = if leader.re < -STABILITY_MARGIN {
        (true, StabilityMechanism::AllEigenvaluesNegative)
    } else if leader.re > STABILITY_MARGIN {
        if leader.im == 0.0 {
            (false, StabilityMechanism::RealPositiveEigenvalue)
        } else {
            (false, StabilityMechanism::ComplexPairPositive)
        }
    } else if leader.im == 0.0 {
        (false, StabilityMechanism::MarginalZero)
    } else {
        (false, StabilityMechanism::MarginalImaginary)
    };
    StabilityVerdict {
        stable,
        mechanism,
        eigenvalues: eig,
    }
}

/// Eigenvalue-based stability verdict for a steady state, cross-checked
/// against the closed-form criteria away from the marginal band.
pub fn classify(ss: &SteadyState, op: &OperatingPoint, p: &BioParams) -> Result<StabilityVerdict> {
    let residual = vector_field(&ss.state, op, p).inf_norm();
    if residual > STATE_RESIDUAL_TOL {
        return Err(CoreError::StaleSteadyState {
            residual,
            tol: STATE_RESIDUAL_TOL,
        });
    }
    let eig = eigenvalues(&jacobian(&ss.state, op, p))?;
    let verdict = verdict_from_eigenvalues(eig);
    if verdict.is_marginal() {
        return Ok(verdict);
    }
    match ss.kind {
        SteadyStateKind::Washout => {
            // closed-form criterion: S_in below both break-even thresholds
            let be = break_evens(op.d, p);
            let threshold = be
                .lambda_u
                .unwrap_or(f64::INFINITY)
                .min(be.lambda_b.unwrap_or(f64::INFINITY));
            let margin = (op.s_in - threshold).abs();
            if margin > 1e-9 * op.s_in.max(1.0) {
                let closed_form = op.s_in < threshold;
                if closed_form != verdict.stable {
                    return Err(CoreError::Inconsistent(format!(
                        "washout at (S_in={}, D={}): eigenvalues say stable={}, criterion says {}",
                        op.s_in, op.d, verdict.stable, closed_form
                    )));
                }
            }
        }
        SteadyStateKind::Branch1 | SteadyStateKind::Branch2 => {
            // c1 is part of the cubic Routh–Hurwitz test but the stated
            // criterion uses only c3, c4; the eigenvalues guard the gap.
            let rh = routh_hurwitz(ss, op, p)?;
            let scale = rh.c1.abs().max(rh.c2.abs()).max(1.0);
            if rh.c3.abs() > 1e-10 * scale && rh.c4.abs() > 1e-10 * scale {
                let closed_form = rh.c3 > 0.0 && rh.c4 > 0.0;
                if closed_form != verdict.stable {
                    return Err(CoreError::Inconsistent(format!(
                        "coexistence state at S*={}: eigenvalues say stable={}, (c3, c4) = ({:e}, {:e})",
                        ss.s_star, verdict.stable, rh.c3, rh.c4
                    )));
                }
            }
        }
        _ => {}
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// Hopf transversality
// ---------------------------------------------------------------------------

/// Real part of the complex-conjugate eigenvalue pair on the stable-capable
/// coexistence branch at `(s_in, d)`.
fn pair_real_part(s_in: f64, d: f64, p: &BioParams) -> Result<f64> {
    let op = OperatingPoint::new(s_in, d);
    let states = find_steady_states(&op, p)?;
    let branch = states
        .iter()
        .find(|e| e.kind == SteadyStateKind::Branch1)
        .ok_or_else(|| {
            CoreError::Inconclusive(format!("no stable-capable branch at (S_in={s_in}, D={d})"))
        })?;
    let eig = eigenvalues(&jacobian(&branch.state, &op, p))?;
    let pair: Vec<_> = eig.iter().filter(|z| z.im != 0.0).collect();
    if pair.len() != 2 {
        return Err(CoreError::DegenerateEigenpair);
    }
    Ok(pair[0].re)
}

/// Speed at which the complex pair crosses the imaginary axis at a Hopf
/// point: `d Re(λ)/d S_in`, by Richardson-refined central differences.
pub fn hopf_transversality(d: f64, s_in_star: f64, p: &BioParams) -> Result<f64> {
    let h0 = 1e-4 * s_in_star.abs().max(1.0);
    let central = |h: f64| -> Result<f64> {
        let hi = pair_real_part(s_in_star + h, d, p)?;
        let lo = pair_real_part(s_in_star - h, d, p)?;
        Ok((hi - lo) / (2.0 * h))
    };
    let coarse = central(h0)?;
    let fine = central(0.5 * h0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{c3_factor, fold_locus};
    use crate::model::State;

    fn diag(d0: f64, d1: f64, d2: f64) -> [[f64; 3]; 3] {
        [[d0, 0.0, 0.0], [0.0, d1, 0.0], [0.0, 0.0, d2]]
    }

    #[test]
    fn eigenvalues_of_diagonal_matrices() {
        let eig = eigenvalues(&diag(1.0, 1.0, 1.0)).unwrap();
        for z in eig {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let eig = eigenvalues(&diag(-1.0, 2.0, -3.0)).unwrap();
        let res: Vec<f64> = eig.iter().map(|z| z.re).collect();
        assert!((res[0] + 3.0).abs() < 1e-12);
        assert!((res[1] + 1.0).abs() < 1e-12);
        assert!((res[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_companion_matrix() {
        // λ³ − 6λ² + 11λ − 6 = (λ−1)(λ−2)(λ−3)
        let j = [[0.0, 0.0, 6.0], [1.0, 0.0, -11.0], [0.0, 1.0, 6.0]];
        let eig = eigenvalues(&j).unwrap();
        for (z, want) in eig.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z.re - want).abs() < 1e-10, "{z} vs {want}");
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn eigenvalues_complex_pair() {
        // rotation-like block plus a decaying direction
        let j = [[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, -1.0]];
        let eig = eigenvalues(&j).unwrap();
        let pair: Vec<_> = eig.iter().filter(|z| z.im != 0.0).collect();
        assert_eq!(pair.len(), 2);
        assert!((pair[0].im.abs() - 2.0).abs() < 1e-12);
        assert!(pair[0].re.abs() < 1e-12);
        assert!(eigenvalues(&[[f64::NAN; 3]; 3]).is_err());
    }

    #[test]
    fn eigenvector_solves_system() {
        let j = [[1.0, 2.0, 0.5], [0.3, -1.0, 0.0], [0.0, 0.7, -2.0]];
        let eig = eigenvalues(&j).unwrap();
        for lambda in eig {
            let v = eigenvector(&j, lambda);
            // (J − λI)v ≈ 0
            for (r, row) in j.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..3 {
                    let jrc = Complex64::new(row[c], 0.0);
                    let entry = if r == c { jrc - lambda } else { jrc };
                    acc += entry * v[c];
                }
                assert!(acc.norm() < 1e-9, "row {r}: {acc}");
            }
        }
    }

    #[test]
    fn c4_is_c1c2_minus_c3() {
        let p = BioParams::line3();
        let op = OperatingPoint::new(5.0, 0.1);
        let ss = find_steady_states(&op, &p).unwrap();
        let e1 = &ss[1];
        let rh = routh_hurwitz(e1, &op, &p).unwrap();
        let expected = rh.c1 * rh.c2 - rh.c3;
        assert!((rh.c4 - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn c3_matches_factorization() {
        let p = BioParams::line3();
        for s_in in [3.9, 4.0, 5.0, 7.0, 9.0] {
            let op = OperatingPoint::new(s_in, 0.1);
            for e in find_steady_states(&op, &p).unwrap() {
                if !e.kind.is_coexistence() {
                    continue;
                }
                let rh = routh_hurwitz(&e, &op, &p).unwrap();
                let fac = c3_factor(e.s_star, op.d, &p);
                assert!(
                    (rh.c3 - fac).abs() <= 1e-8 * fac.abs().max(1e-12),
                    "s_in={s_in} S*={}: c3={:e} factored={:e}",
                    e.s_star,
                    rh.c3,
                    fac
                );
            }
        }
    }

    #[test]
    fn c3_vanishes_at_fold() {
        let p = BioParams::line3();
        let fold = fold_locus(0.1, &p).unwrap();
        let op = OperatingPoint::new(fold.lambda_lp, 0.1);
        let rh = routh_hurwitz_at(
            fold.s_lp,
            crate::equilibria::uv_profiles(fold.s_lp, 0.1, &p).0,
            crate::equilibria::uv_profiles(fold.s_lp, 0.1, &p).1,
            &op,
            &p,
        );
        assert!(rh.c3.abs() < 1e-8, "c3 at fold: {:e}", rh.c3);
    }

    #[test]
    fn routh_hurwitz_rejects_washout() {
        let p = BioParams::line3();
        let op = OperatingPoint::new(5.0, 0.1);
        let washout = SteadyState {
            kind: SteadyStateKind::Washout,
            state: State::new(5.0, 0.0, 0.0),
            s_star: 5.0,
        };
        assert!(matches!(
            routh_hurwitz(&washout, &op, &p),
            Err(CoreError::WrongKind { .. })
        ));
    }

    #[test]
    fn c4_sign_flips_across_the_window() {
        let p = BioParams::line3();
        let rh_at = |s_in: f64| {
            let op = OperatingPoint::new(s_in, 0.1);
            let ss = find_steady_states(&op, &p).unwrap();
            let e1 = ss.iter().find(|e| e.kind == SteadyStateKind::Branch1).unwrap();
            routh_hurwitz(e1, &op, &p).unwrap()
        };
        assert!(rh_at(5.0).c4 < 0.0);
        assert!(rh_at(9.0).c4 > 0.0);
        // c1 stays positive on both sides even though the stated criterion
        // never uses it
        assert!(rh_at(5.0).c1 > 0.0 && rh_at(9.0).c1 > 0.0);
    }

    #[test]
    fn classify_washout_against_criterion() {
        let p = BioParams::line3();
        // S_in = 3 < min(λ_u, λ_b) = 4.06: stable
        let op = OperatingPoint::new(3.0, 0.1);
        let ss = find_steady_states(&op, &p).unwrap();
        let verdict = classify(&ss[0], &op, &p).unwrap();
        assert!(verdict.stable);
        // S_in = 5 > 4.06: unstable
        let op = OperatingPoint::new(5.0, 0.1);
        let ss = find_steady_states(&op, &p).unwrap();
        let verdict = classify(&ss[0], &op, &p).unwrap();
        assert!(!verdict.stable);
    }

    #[test]
    fn classify_coexistence_windows() {
        let p = BioParams::line3();
        // between the transcritical and the second Hopf value the branch is
        // unstable; past it, stable
        let op = OperatingPoint::new(5.0, 0.1);
        let ss = find_steady_states(&op, &p).unwrap();
        let verdict = classify(&ss[1], &op, &p).unwrap();
        assert!(!verdict.stable);
        assert_eq!(verdict.mechanism, StabilityMechanism::ComplexPairPositive);
        let op = OperatingPoint::new(9.0, 0.1);
        let ss = find_steady_states(&op, &p).unwrap();
        let verdict = classify(&ss[1], &op, &p).unwrap();
        assert!(verdict.stable);
    }
}
