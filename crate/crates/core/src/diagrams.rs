//! Operating diagrams in the `(S_in, D)` plane: bifurcation curves, region
//! classification, codimension-two special points, one-parameter branch
//! diagrams, and flocculation-rate sweeps.
//!
//! Region tags follow a fixed inventory convention:
//!
//! | tag | washout | branch 1 | branch 2 |
//! |-----|---------|----------|----------|
//! | I0  | S       | —        | —        |
//! | I1  | U       | S        | —        |
//! | I2  | S       | S        | U        |
//! | I3  | U       | U        | —        |
//! | I4  | S       | U        | U        |

use crate::dynamics::{homoclinic_locate, period_beyond_cap};
use crate::equilibria::{
    break_evens, critical_dilution_dbar, existence_interval, find_steady_states, fold_locus,
    s_in_of_s, uv_profiles, BreakEvenSet, FoldPoint, Interval, IntervalKind, SteadyStateKind,
};
use crate::error::{CoreError, Result};
use crate::model::{BioParams, OperatingPoint, State};
use crate::roots;
use crate::stability::{classify, routh_hurwitz_at};
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt;

/// Operating points closer than this to a curve classify as boundary.
pub const BOUNDARY_BAND: f64 = 1e-7;

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveId {
    GammaU,
    GammaB,
    GammaBp,
    GammaLp,
    GammaH1,
    GammaH2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BifurcationType {
    BranchPoint,
    LimitPoint,
    Hopf,
}

impl fmt::Display for BifurcationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::BranchPoint => "BP",
            Self::LimitPoint => "LP",
            Self::Hopf => "H",
        };
        f.write_str(s)
    }
}

impl CurveId {
    pub const ALL: [CurveId; 6] = [
        CurveId::GammaU,
        CurveId::GammaB,
        CurveId::GammaBp,
        CurveId::GammaLp,
        CurveId::GammaH1,
        CurveId::GammaH2,
    ];

    pub fn bifurcation_type(&self) -> BifurcationType {
        match self {
            CurveId::GammaU | CurveId::GammaB | CurveId::GammaBp => BifurcationType::BranchPoint,
            CurveId::GammaLp => BifurcationType::LimitPoint,
            CurveId::GammaH1 | CurveId::GammaH2 => BifurcationType::Hopf,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CurveId::GammaU => "Gamma_u",
            CurveId::GammaB => "Gamma_b",
            CurveId::GammaBp => "Gamma_BP",
            CurveId::GammaLp => "Gamma_LP",
            CurveId::GammaH1 => "Gamma_H1",
            CurveId::GammaH2 => "Gamma_H2",
        }
    }

    /// Stroke color used by the SVG layer.
    pub fn color(&self) -> &'static str {
        match self {
            CurveId::GammaU => "red",
            CurveId::GammaB => "blue",
            CurveId::GammaBp => "black",
            CurveId::GammaLp => "green",
            CurveId::GammaH1 | CurveId::GammaH2 => "magenta",
        }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A bifurcation curve as a polyline of `(S_in, D)` points, ordered by
/// increasing `D`. Empty curves carry the reason they vanished.
#[derive(Clone, Debug)]
pub struct DiagramCurve {
    pub id: CurveId,
    pub bifurcation: BifurcationType,
    pub points: Vec<(f64, f64)>,
    pub empty_reason: Option<String>,
}

/// Per-dilution cache of everything the classifiers need.
pub(crate) struct DSlice {
    pub be: BreakEvenSet,
    pub interval: Option<(Interval, IntervalKind)>,
    pub fold: Option<FoldPoint>,
    /// `(S_H², S_H¹)` roots of `c₄` inside the existence interval.
    pub hopf_s: Option<(f64, f64)>,
    /// The same window mapped to inflow concentrations `(S_in^H1, S_in^H2)`.
    pub hopf_sin: Option<(f64, f64)>,
}

impl DSlice {
    pub fn new(d: f64, p: &BioParams) -> Self {
        let be = break_evens(d, p);
        let interval = if p.a > 0.0 {
            existence_interval(d, p)
        } else {
            None
        };
        let fold = fold_locus(d, p);
        let hopf_s = if p.a > 0.0 { hopf_window_s(d, p) } else { None };
        let hopf_sin = hopf_s.filter(|_| d > 0.0).map(|(s2, s1)| {
            let sin1 = s_in_of_s(s1, d, p);
            let sin2 = s_in_of_s(s2, d, p);
            (sin1.min(sin2), sin1.max(sin2))
        });
        DSlice {
            be,
            interval,
            fold,
            hopf_s,
            hopf_sin,
        }
    }
}

/// Hurwitz determinant `c₄` along the coexistence branch, as a function of
/// the parameterizing substrate level.
pub fn c4_on_branch(s: f64, d: f64, p: &BioParams) -> f64 {
    let (u, v) = uv_profiles(s, d, p);
    let op = OperatingPoint::new(0.0, d);
    routh_hurwitz_at(s, u, v, &op, p).c4
}

/// `c₄` normalized by the magnitude of its two composing products, which
/// keeps the root bracketing meaningful when the raw coefficient underflows
/// toward zero at very small dilution rates.
fn c4_scaled(s: f64, d: f64, p: &BioParams) -> f64 {
    let (u, v) = uv_profiles(s, d, p);
    let op = OperatingPoint::new(0.0, d);
    let rh = routh_hurwitz_at(s, u, v, &op, p);
    let scale = (rh.c1 * rh.c2).abs().max(rh.c3.abs()).max(1e-300);
    rh.c4 / scale
}

/// Roots `(S_H², S_H¹)` of `c₄(S) = 0` inside the existence interval, with
/// `S_H² < S_H¹`. `None` when `c₄` keeps its sign.
pub fn hopf_window_s(d: f64, p: &BioParams) -> Option<(f64, f64)> {
    let (iv, _) = existence_interval(d, p)?;
    let guard = 1e-9 * iv.lo.abs().max(1.0);
    let lo = iv.lo + guard;
    let hi = if iv.hi.is_finite() {
        iv.hi - 1e-9 * iv.hi.abs().max(1.0)
    } else if let Some(fold) = fold_locus(d, p) {
        10.0 * fold.s_lp
    } else {
        1e3 * iv.lo.max(1.0)
    };
    if !(hi > lo) {
        return None;
    }
    let f = |s: f64| c4_scaled(s, d, p);
    let brackets = roots::sign_change_brackets(f, lo, hi, 2000);
    let mut found: Vec<f64> = brackets
        .into_iter()
        .map(|(blo, bhi, flo, fhi)| roots::refine(f, blo, bhi, flo, fhi))
        .collect();
    found.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * a.abs().max(1.0));
    if found.len() >= 2 {
        Some((found[0], *found.last().unwrap()))
    } else {
        None
    }
}

/// The Hopf window expressed in inflow concentrations `(S_in^H1, S_in^H2)`
/// with `S_in^H1 < S_in^H2`; the coexistence branch is unstable in between.
pub fn hopf_window_sin(d: f64, p: &BioParams) -> Option<(f64, f64)> {
    if d <= 0.0 {
        return None;
    }
    let (s2, s1) = hopf_window_s(d, p)?;
    let sin1 = s_in_of_s(s1, d, p);
    let sin2 = s_in_of_s(s2, d, p);
    Some((sin1.min(sin2), sin1.max(sin2)))
}

/// Largest dilution rate at which the Hopf window still exists, bisected to
/// a bracket below 1e-4.
pub fn hopf_extent(p: &BioParams, d_probe: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = d_probe;
    if !(hi > lo) {
        return Err(CoreError::InvalidParams(format!(
            "bad probe interval {d_probe:?}"
        )));
    }
    let has_window = |d: f64| hopf_window_s(d, p).is_some();
    let at_lo = has_window(lo);
    let at_hi = has_window(hi);
    if at_lo == at_hi {
        return Err(CoreError::Inconclusive(format!(
            "Hopf window present at both probe ends is {at_lo}; cannot bracket its extent"
        )));
    }
    while hi - lo >= 1e-4 {
        let mid = 0.5 * (lo + hi);
        if has_window(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn curve_sample_ds(id: CurveId, d_range: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = d_range;
    let n = n.max(2);
    let hopf = matches!(id, CurveId::GammaH1 | CurveId::GammaH2);
    if hopf && lo > 0.0 && hi / lo >= 100.0 {
        // spread samples in log(D) so near-axis structure stays resolved
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Samples one curve over `d_range` at `n` dilution values; points where the
/// defining quantity does not exist are trimmed.
pub fn curve(id: CurveId, d_range: (f64, f64), n: usize, p: &BioParams) -> DiagramCurve {
    let mut points = Vec::new();
    for d in curve_sample_ds(id, d_range, n) {
        if d < 0.0 {
            continue;
        }
        let s_in = match id {
            CurveId::GammaU => break_evens(d, p).lambda_u,
            CurveId::GammaB => break_evens(d, p).lambda_b,
            CurveId::GammaBp => break_evens(d, p).lambda_bp,
            CurveId::GammaLp => fold_locus(d, p).map(|f| f.lambda_lp),
            CurveId::GammaH1 => hopf_window_sin(d, p).map(|w| w.0),
            CurveId::GammaH2 => hopf_window_sin(d, p).map(|w| w.1),
        };
        if let Some(s_in) = s_in {
            if s_in.is_finite() {
                points.push((s_in, d));
            }
        }
    }
    let empty_reason = if points.is_empty() {
        Some(format!(
            "{} undefined for D in [{}, {}]",
            id.label(),
            d_range.0,
            d_range.1
        ))
    } else {
        None
    };
    DiagramCurve {
        id,
        bifurcation: id.bifurcation_type(),
        points,
        empty_reason,
    }
}

// ---------------------------------------------------------------------------
// region classification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionTag {
    I0,
    I1,
    I2,
    I3,
    I4,
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionTag::I0 => "I0",
            RegionTag::I1 => "I1",
            RegionTag::I2 => "I2",
            RegionTag::I3 => "I3",
            RegionTag::I4 => "I4",
        };
        f.write_str(s)
    }
}

impl RegionTag {
    /// Fill color matching the region convention used throughout.
    pub fn color(&self) -> &'static str {
        match self {
            RegionTag::I0 => "cyan",
            RegionTag::I1 => "red",
            RegionTag::I2 => "green",
            RegionTag::I3 => "blue",
            RegionTag::I4 => "yellow",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabLetter {
    Stable,
    Unstable,
}

impl fmt::Display for StabLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabLetter::Stable => "S",
            StabLetter::Unstable => "U",
        })
    }
}

/// Existence/stability letters for every steady state at one operating point.
#[derive(Clone, Debug)]
pub struct Inventory {
    pub washout: StabLetter,
    pub positive: Vec<(SteadyStateKind, StabLetter)>,
}

impl Inventory {
    fn letter_of(&self, kind: SteadyStateKind) -> Option<StabLetter> {
        self.positive
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, l)| *l)
    }
}

#[derive(Clone, Debug)]
pub struct RegionLabel {
    /// Tag derived from the eigenvalue inventory.
    pub tag: RegionTag,
    pub inventory: Inventory,
    /// Tag derived from the closed-form conditions, when they apply.
    pub theory_tag: Option<RegionTag>,
    /// False when the two derivations disagree.
    pub consistent: bool,
}

fn boundary_guard(op: &OperatingPoint, slice: &DSlice) -> Result<()> {
    let mut checks: Vec<(&'static str, Option<f64>)> = vec![
        ("Gamma_u", slice.be.lambda_u),
        ("Gamma_b", slice.be.lambda_b),
        ("Gamma_LP", slice.fold.map(|f| f.lambda_lp)),
    ];
    if let Some((h1, h2)) = slice.hopf_sin {
        checks.push(("Gamma_H1", Some(h1)));
        checks.push(("Gamma_H2", Some(h2)));
    }
    for (curve, value) in checks {
        if let Some(v) = value {
            let dist = (op.s_in - v).abs();
            if dist < BOUNDARY_BAND {
                return Err(CoreError::Boundary { curve, dist });
            }
        }
    }
    Ok(())
}

fn eigen_tag(inv: &Inventory, a_zero: bool) -> Result<RegionTag> {
    use StabLetter::*;
    if a_zero {
        let any_stable_positive = inv.positive.iter().any(|(_, l)| *l == Stable);
        return match (inv.washout, any_stable_positive) {
            (Stable, false) => Ok(RegionTag::I0),
            (_, true) => Ok(RegionTag::I1),
            (w, s) => Err(CoreError::Inconsistent(format!(
                "classical inventory unmapped: washout {w}, stable positive {s}"
            ))),
        };
    }
    let b1 = inv.letter_of(SteadyStateKind::Branch1);
    let b2 = inv.letter_of(SteadyStateKind::Branch2);
    match (inv.washout, b1, b2) {
        (Stable, None, None) => Ok(RegionTag::I0),
        (Unstable, Some(Stable), None) => Ok(RegionTag::I1),
        (Stable, Some(Stable), Some(Unstable)) => Ok(RegionTag::I2),
        (Unstable, Some(Unstable), None) => Ok(RegionTag::I3),
        (Stable, Some(Unstable), Some(Unstable)) => Ok(RegionTag::I4),
        (w, b1, b2) => Err(CoreError::Inconsistent(format!(
            "inventory unmapped: washout {w}, branch1 {b1:?}, branch2 {b2:?}"
        ))),
    }
}

fn theory_tag(op: &OperatingPoint, slice: &DSlice, a_zero: bool) -> Option<RegionTag> {
    if a_zero {
        let threshold = slice
            .be
            .lambda_u
            .unwrap_or(f64::INFINITY)
            .min(slice.be.lambda_b.unwrap_or(f64::INFINITY));
        return Some(if op.s_in < threshold {
            RegionTag::I0
        } else {
            RegionTag::I1
        });
    }
    let lam_bp = slice.be.lambda_bp.unwrap_or(f64::INFINITY);
    let lam_lp = slice
        .fold
        .map(|f| f.lambda_lp)
        .unwrap_or(f64::INFINITY);
    if op.s_in < lam_lp.min(lam_bp) {
        return Some(RegionTag::I0);
    }
    let c4_negative = slice
        .hopf_sin
        .map(|(h1, h2)| op.s_in > h1 && op.s_in < h2)
        .unwrap_or(false);
    Some(if op.s_in > lam_bp {
        if c4_negative {
            RegionTag::I3
        } else {
            RegionTag::I1
        }
    } else if c4_negative {
        RegionTag::I4
    } else {
        RegionTag::I2
    })
}

pub(crate) fn classify_region_with_slice(
    op: &OperatingPoint,
    p: &BioParams,
    slice: &DSlice,
) -> Result<RegionLabel> {
    boundary_guard(op, slice)?;
    let states = find_steady_states(op, p)?;
    let mut washout = StabLetter::Unstable;
    let mut positive = Vec::new();
    for e in &states {
        let verdict = classify(e, op, p)?;
        if verdict.is_marginal() {
            return Err(CoreError::Boundary {
                curve: "marginal-eigenvalue",
                dist: verdict.max_real_part().abs(),
            });
        }
        let letter = if verdict.stable {
            StabLetter::Stable
        } else {
            StabLetter::Unstable
        };
        if e.kind == SteadyStateKind::Washout {
            washout = letter;
        } else {
            positive.push((e.kind, letter));
        }
    }
    let inventory = Inventory { washout, positive };
    let a_zero = p.a == 0.0;
    let tag = eigen_tag(&inventory, a_zero)?;
    let theory = theory_tag(op, slice, a_zero);
    let consistent = theory.map(|t| t == tag).unwrap_or(true);
    Ok(RegionLabel {
        tag,
        inventory,
        theory_tag: theory,
        consistent,
    })
}

/// Classifies the long-term inventory at one operating point into a region
/// tag, evaluating the closed-form region conditions independently of the
/// eigenvalue-derived inventory.
pub fn classify_region(op: &OperatingPoint, p: &BioParams) -> Result<RegionLabel> {
    op.validate()?;
    let slice = DSlice::new(op.d, p);
    classify_region_with_slice(op, p, &slice)
}

// ---------------------------------------------------------------------------
// operating diagram grids
// ---------------------------------------------------------------------------

/// Outcome at one grid cell center.
#[derive(Clone, Debug)]
pub struct CellOutcome {
    pub s_in: f64,
    pub d: f64,
    /// `None` when the cell sits on a boundary or failed to classify.
    pub tag: Option<RegionTag>,
    pub boundary: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug)]
pub struct OperatingDiagram {
    pub s_in_range: (f64, f64),
    pub d_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Row-major over `ny` dilution rows of `nx` cells.
    pub cells: Vec<CellOutcome>,
    pub curves: Vec<DiagramCurve>,
    pub special_points: Vec<SpecialPoint>,
    /// Fraction of non-boundary cells whose two classifications agree.
    pub agreement: f64,
}

impl OperatingDiagram {
    pub fn labels_present(&self) -> BTreeSet<RegionTag> {
        self.cells.iter().filter_map(|c| c.tag).collect()
    }

    /// Total area of cells carrying `tag`, in `(S_in × D)` units.
    pub fn region_area(&self, tag: RegionTag) -> f64 {
        let cell = (self.s_in_range.1 - self.s_in_range.0) / self.nx as f64
            * (self.d_range.1 - self.d_range.0) / self.ny as f64;
        cell * self.cells.iter().filter(|c| c.tag == Some(tag)).count() as f64
    }
}

/// Classifies a full grid of cell centers and overlays curves and special
/// points. Rows are independent and classified in parallel.
pub fn operating_diagram(
    s_in_range: (f64, f64),
    d_range: (f64, f64),
    grid: (usize, usize),
    p: &BioParams,
) -> Result<OperatingDiagram> {
    let (nx, ny) = grid;
    if nx < 2 || ny < 2 {
        return Err(CoreError::InvalidParams(format!(
            "grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    if !(s_in_range.1 > s_in_range.0) || !(d_range.1 > d_range.0) || s_in_range.0 < 0.0 || d_range.0 < 0.0 {
        return Err(CoreError::InvalidParams(format!(
            "ranges must be nonnegative and increasing: {s_in_range:?}, {d_range:?}"
        )));
    }
    p.validate()?;
    let dx = (s_in_range.1 - s_in_range.0) / nx as f64;
    let dy = (d_range.1 - d_range.0) / ny as f64;
    let rows: Vec<Vec<CellOutcome>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let d = d_range.0 + (j as f64 + 0.5) * dy;
            let slice = DSlice::new(d, p);
            (0..nx)
                .map(|i| {
                    let s_in = s_in_range.0 + (i as f64 + 0.5) * dx;
                    let op = OperatingPoint::new(s_in, d);
                    match classify_region_with_slice(&op, p, &slice) {
                        Ok(label) => CellOutcome {
                            s_in,
                            d,
                            tag: Some(label.tag),
                            boundary: false,
                            consistent: label.consistent,
                        },
                        Err(CoreError::Boundary { .. }) => CellOutcome {
                            s_in,
                            d,
                            tag: None,
                            boundary: true,
                            consistent: true,
                        },
                        Err(_) => CellOutcome {
                            s_in,
                            d,
                            tag: None,
                            boundary: false,
                            consistent: false,
                        },
                    }
                })
                .collect()
        })
        .collect();
    let cells: Vec<CellOutcome> = rows.into_iter().flatten().collect();
    let non_boundary = cells.iter().filter(|c| !c.boundary).count();
    let agreeing = cells
        .iter()
        .filter(|c| !c.boundary && c.consistent)
        .count();
    let agreement = if non_boundary == 0 {
        1.0
    } else {
        agreeing as f64 / non_boundary as f64
    };
    let curves = CurveId::ALL
        .iter()
        .map(|&id| curve(id, d_range, (2 * ny).max(400), p))
        .filter(|c| !c.points.is_empty())
        .collect();
    let special_points = special_points(p, d_range);
    Ok(OperatingDiagram {
        s_in_range,
        d_range,
        nx,
        ny,
        cells,
        curves,
        special_points,
        agreement,
    })
}

// ---------------------------------------------------------------------------
// special points
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialPointKind {
    Cusp,
    BogdanovTakens,
    CurveIntersection,
}

impl fmt::Display for SpecialPointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpecialPointKind::Cusp => "CP",
            SpecialPointKind::BogdanovTakens => "BT",
            SpecialPointKind::CurveIntersection => "intersection",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SpecialPoint {
    pub kind: SpecialPointKind,
    pub s_in: f64,
    pub d: f64,
    pub provenance: String,
    pub uncertain: bool,
}

/// Quadratic (Neville) extrapolation of the last three curve samples to the
/// `D = 0` axis, with the linear-vs-quadratic difference as the spread.
fn axis_extrapolate(samples: &[(f64, f64)]) -> Option<(f64, f64)> {
    if samples.len() < 3 {
        return None;
    }
    let [(d1, v1), (d2, v2), (d3, v3)] = [samples[0], samples[1], samples[2]];
    // contraction toward the axis; diverging tails are not extrapolable
    if (v3 - v2).abs() > (v2 - v1).abs() {
        return None;
    }
    let linear = v3 - d3 * (v2 - v3) / (d2 - d3);
    let l01 = v1 + (0.0 - d1) * (v2 - v1) / (d2 - d1);
    let l12 = v2 + (0.0 - d2) * (v3 - v2) / (d3 - d2);
    let quad = l01 + (0.0 - d1) * (l12 - l01) / (d3 - d1);
    Some((quad, (quad - linear).abs()))
}

/// Geometric special points: the cusp where the fold curve lands on the
/// transcritical curve, axis limits of the curves (candidate double-zero
/// points), and transcritical curve crossings.
pub fn special_points(p: &BioParams, d_range: (f64, f64)) -> Vec<SpecialPoint> {
    let mut out = Vec::new();
    if p.a > 0.0 {
        if let Some(dbar) = critical_dilution_dbar(p) {
            if dbar >= d_range.0 && dbar <= d_range.1 {
                if let Some(s) = break_evens(dbar, p).lambda_bp {
                    out.push(SpecialPoint {
                        kind: SpecialPointKind::Cusp,
                        s_in: s,
                        d: dbar,
                        provenance: "Gamma_LP endpoint on Gamma_BP".into(),
                        uncertain: false,
                    });
                }
            }
        }
    }
    if d_range.0 <= 1e-12 {
        // the transcritical curve meets the axis at its D = 0 value
        if let Some(s) = break_evens(0.0, p).lambda_bp {
            out.push(SpecialPoint {
                kind: SpecialPointKind::BogdanovTakens,
                s_in: s,
                d: 0.0,
                provenance: "Gamma_BP at D = 0".into(),
                uncertain: false,
            });
        }
        // the Hopf curve only approaches the axis; extrapolate its branches
        let ds = [1e-3, 5e-4, 2.5e-4];
        for (branch, pick) in [("Gamma_H1", 0usize), ("Gamma_H2", 1usize)] {
            let samples: Vec<(f64, f64)> = ds
                .iter()
                .filter_map(|&d| hopf_window_sin(d, p).map(|w| (d, if pick == 0 { w.0 } else { w.1 })))
                .collect();
            if let Some((value, spread)) = axis_extrapolate(&samples) {
                out.push(SpecialPoint {
                    kind: SpecialPointKind::BogdanovTakens,
                    s_in: value,
                    d: 0.0,
                    provenance: format!("{branch} extrapolated to D = 0"),
                    uncertain: spread > 1e-3,
                });
            }
        }
    }
    // crossings of the two transcritical branches
    let gap = |d: f64| -> f64 {
        let be = break_evens(d, p);
        match (be.lambda_u, be.lambda_b) {
            (Some(u), Some(b)) => u - b,
            _ => f64::NAN,
        }
    };
    let lo = d_range.0.max(0.0);
    let hi = d_range.1;
    if hi > lo {
        let mut prev: Option<(f64, f64)> = None;
        let n = 2000;
        for i in 0..=n {
            let d = lo + (hi - lo) * i as f64 / n as f64;
            let gd = gap(d);
            if !gd.is_finite() {
                prev = None;
                continue;
            }
            if let Some((dp, gp)) = prev {
                if gp == 0.0 || (gp < 0.0) != (gd < 0.0) {
                    let d_cross = roots::refine(gap, dp, d, gp, gd);
                    if let Some(s) = break_evens(d_cross, p).lambda_u {
                        out.push(SpecialPoint {
                            kind: SpecialPointKind::CurveIntersection,
                            s_in: s,
                            d: d_cross,
                            provenance: "Gamma_u crossing Gamma_b".into(),
                            uncertain: false,
                        });
                    }
                }
            }
            prev = Some((d, gd));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// one-parameter bifurcation diagram
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct BranchSample {
    pub s_in: f64,
    pub s_star: f64,
    pub state: State,
    pub kind: SteadyStateKind,
    /// `None` when the verdict sat inside the marginal band.
    pub stable: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventType {
    LimitPoint,
    BranchPoint,
    Hopf,
    Homoclinic,
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventType::LimitPoint => "LP",
            EventType::BranchPoint => "BP",
            EventType::Hopf => "H",
            EventType::Homoclinic => "Hom",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BifurcationEvent {
    pub s_in: f64,
    pub event: EventType,
    /// Substrate component at the bifurcating state, when meaningful.
    pub s_star: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BifurcationDiagram1D {
    pub fixed_d: f64,
    /// Polylines of samples: the washout branch plus one per coexistence
    /// branch segment, each ordered by increasing `S_in`.
    pub branches: Vec<Vec<BranchSample>>,
    /// Events ordered by increasing `S_in`.
    pub events: Vec<BifurcationEvent>,
    pub notes: Vec<String>,
}

/// One-parameter diagram at fixed dilution: equilibrium branches are graphs
/// over the substrate component (`S_in(S) = S + H(S)/D`), so no numerical
/// continuation is required; cycle-death points are located by the
/// period-divergence proxy when `with_cycles` is set.
pub fn bifurcation_1d(
    fixed_d: f64,
    s_in_range: (f64, f64),
    p: &BioParams,
    with_cycles: bool,
) -> Result<BifurcationDiagram1D> {
    let (lo, hi) = s_in_range;
    if !(hi > lo) || lo < 0.0 {
        return Err(CoreError::InvalidParams(format!(
            "bad S_in range {s_in_range:?}"
        )));
    }
    p.validate()?;
    let slice = DSlice::new(fixed_d, p);
    let mut branches = Vec::new();
    let mut notes = Vec::new();

    // washout branch
    let n_washout = 400;
    let threshold = slice
        .be
        .lambda_u
        .unwrap_or(f64::INFINITY)
        .min(slice.be.lambda_b.unwrap_or(f64::INFINITY));
    let washout: Vec<BranchSample> = (0..=n_washout)
        .map(|i| {
            let s_in = lo + (hi - lo) * i as f64 / n_washout as f64;
            BranchSample {
                s_in,
                s_star: s_in,
                state: State::new(s_in, 0.0, 0.0),
                kind: SteadyStateKind::Washout,
                stable: Some(s_in < threshold),
            }
        })
        .collect();
    branches.push(washout);

    // coexistence branches, parameterized by the substrate component
    if fixed_d > 0.0 && p.a > 0.0 {
        if let Some((iv, _)) = slice.interval {
            let guard = 1e-7 * iv.lo.abs().max(1.0);
            let s_lo = iv.lo + guard;
            let s_hi = iv.hi.min(hi) - guard;
            if s_hi > s_lo {
                let n = 1600;
                let mut segments: Vec<(SteadyStateKind, Vec<BranchSample>)> = Vec::new();
                for i in 0..=n {
                    let s = s_lo + (s_hi - s_lo) * i as f64 / n as f64;
                    let s_in = s_in_of_s(s, fixed_d, p);
                    if !s_in.is_finite() || s_in < lo || s_in > hi {
                        continue;
                    }
                    let (u, v) = uv_profiles(s, fixed_d, p);
                    if !(u > 0.0) || !(v > 0.0) {
                        continue;
                    }
                    let kind = if crate::equilibria::c3_factor(s, fixed_d, p) >= 0.0 {
                        SteadyStateKind::Branch1
                    } else {
                        SteadyStateKind::Branch2
                    };
                    let ss = crate::equilibria::SteadyState {
                        kind,
                        state: State::new(s, u, v),
                        s_star: s,
                    };
                    let op = OperatingPoint::new(s_in, fixed_d);
                    let stable = match classify(&ss, &op, p) {
                        Ok(verdict) if verdict.is_marginal() => None,
                        Ok(verdict) => Some(verdict.stable),
                        Err(_) => None,
                    };
                    let sample = BranchSample {
                        s_in,
                        s_star: s,
                        state: ss.state,
                        kind,
                        stable,
                    };
                    match segments.last_mut() {
                        Some((k, seg)) if *k == kind => seg.push(sample),
                        _ => segments.push((kind, vec![sample])),
                    }
                }
                for (_, mut seg) in segments {
                    seg.sort_by(|a, b| a.s_in.partial_cmp(&b.s_in).unwrap());
                    if !seg.is_empty() {
                        branches.push(seg);
                    }
                }
            }
        }
    }

    // events
    let mut events = Vec::new();
    if let Some(fold) = slice.fold {
        if fold.lambda_lp >= lo && fold.lambda_lp <= hi {
            events.push(BifurcationEvent {
                s_in: fold.lambda_lp,
                event: EventType::LimitPoint,
                s_star: Some(fold.s_lp),
            });
        }
    }
    if let Some(bp) = slice.be.lambda_bp {
        if bp >= lo && bp <= hi {
            events.push(BifurcationEvent {
                s_in: bp,
                event: EventType::BranchPoint,
                s_star: Some(bp),
            });
        }
    }
    if let (Some((h1, h2)), Some((s2, s1))) = (slice.hopf_sin, slice.hopf_s) {
        for (s_in, s_star) in [(h1, s1), (h2, s2)] {
            if s_in >= lo && s_in <= hi {
                events.push(BifurcationEvent {
                    s_in,
                    event: EventType::Hopf,
                    s_star: Some(s_star),
                });
            }
        }
    }
    if with_cycles {
        match locate_homoclinics(fixed_d, &slice, p, &mut notes) {
            Ok(homs) => {
                for s_in in homs {
                    if s_in >= lo && s_in <= hi {
                        events.push(BifurcationEvent {
                            s_in,
                            event: EventType::Homoclinic,
                            s_star: None,
                        });
                    }
                }
            }
            Err(e) => notes.push(format!("homoclinic search failed: {e}")),
        }
    } else if slice.hopf_sin.is_some() {
        notes.push("cycle probing disabled; homoclinic events not searched".into());
    }
    events.sort_by(|a, b| a.s_in.partial_cmp(&b.s_in).unwrap());
    Ok(BifurcationDiagram1D {
        fixed_d,
        branches,
        events,
        notes,
    })
}

/// Default period threshold for declaring a cycle "about to die" in the
/// homoclinic proxy.
pub const DEFAULT_PERIOD_CAP: f64 = 500.0;

/// Probes a ladder across the Hopf window for cycle-death transitions and
/// bisects each one.
fn locate_homoclinics(
    d: f64,
    slice: &DSlice,
    p: &BioParams,
    notes: &mut Vec<String>,
) -> Result<Vec<f64>> {
    let Some((h1, h2)) = slice.hopf_sin else {
        return Ok(Vec::new());
    };
    let width = h2 - h1;
    // cycles die close to the Hopf ends far more often than mid-window, so
    // the ladder is geometric from both ends plus the midpoint
    const OFFSETS: [f64; 10] = [
        5e-4, 1e-3, 2.5e-3, 5e-3, 0.01, 0.02, 0.04, 0.08, 0.16, 0.32,
    ];
    let mut points: Vec<f64> = OFFSETS
        .iter()
        .flat_map(|&f| [h1 + f * width, h2 - f * width])
        .chain([0.5 * (h1 + h2)])
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-6 * width);
    let mut ladder = Vec::with_capacity(points.len());
    for s_in in points {
        let (beyond, note) = period_beyond_cap(s_in, d, p, DEFAULT_PERIOD_CAP)?;
        notes.push(note);
        ladder.push((s_in, beyond));
    }
    let mut found = Vec::new();
    for w in ladder.windows(2) {
        let (s_a, beyond_a) = w[0];
        let (s_b, beyond_b) = w[1];
        if beyond_a == beyond_b {
            continue;
        }
        match homoclinic_locate(d, (s_a, s_b), p, DEFAULT_PERIOD_CAP) {
            Ok(s_hom) => {
                // demand a definite non-cycle attractor on the no-cycle side,
                // otherwise the flip was a budget artifact near a Hopf end
                let probe_side = if beyond_a { s_a } else { s_b };
                let (_, note) = period_beyond_cap(probe_side, d, p, DEFAULT_PERIOD_CAP)?;
                if note.contains("unresolved") {
                    notes.push(format!(
                        "dropped cycle-death candidate near S_in={s_hom:.4}: {note}"
                    ));
                } else {
                    found.push(s_hom);
                }
            }
            Err(e) => notes.push(format!(
                "cycle-death bisection failed on ({s_a:.4}, {s_b:.4}): {e}"
            )),
        }
    }
    Ok(found)
}

// ---------------------------------------------------------------------------
// flocculation sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub a: f64,
    pub b: f64,
    pub diagram: OperatingDiagram,
}

/// One operating diagram per `(a, b)` override of the base parameters.
pub fn flocculation_sweep(
    pairs: &[(f64, f64)],
    s_in_range: (f64, f64),
    d_range: (f64, f64),
    grid: (usize, usize),
    p_base: &BioParams,
) -> Result<Vec<SweepEntry>> {
    if pairs.is_empty() {
        return Err(CoreError::InvalidParams("empty sweep pair list".into()));
    }
    pairs
        .iter()
        .map(|&(a, b)| {
            let p = p_base.with_flocculation(a, b);
            operating_diagram(s_in_range, d_range, grid, &p).map(|diagram| SweepEntry {
                a,
                b,
                diagram,
            })
        })
        .collect()
}
