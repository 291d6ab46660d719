//! Composite-rate formulas and SNR sweeps.
//!
//! Two accountings of the OCB rate are computed side by side:
//!
//! - the claimed one, `R_c1 = ½·I_q(γ)`, `R_c2 = I_b(γ)`, `R_J = R_c1 + R_c2`;
//! - the exact chain-rule split `I(V1;Y) + I(V2;Y|V1) = I_q(γ)`.
//!
//! Here `γ = 2α²/σ²` is the symbol energy over the per-dimension noise variance.
//! Both share `R_c2 = I(V2;Y|V1)`, so the whole difference sits in the first
//! stream: `R_J − I_q = R_c1 − I(V1;Y)`.

use rayon::prelude::*;

use crate::awgn_info::{
    gaussian_capacity, mi_awgn_2d, mi_bpsk_with_order, mi_qpsk_with_order, Dims, NoiseModel,
    DEFAULT_QUAD_ORDER,
};
use crate::error::{domain, parameter, Result};
use crate::modem::Constellation;

/// Claimed rate of the axis stream, `½·I_q(γ)`.
pub fn rate_c1_claimed(gamma: f64) -> Result<f64> {
    Ok(0.5 * mi_qpsk_with_order(gamma, DEFAULT_QUAD_ORDER)?)
}

/// Rate of the sign stream once the axis is known, `I_b(γ)`.
pub fn rate_c2(gamma: f64) -> Result<f64> {
    mi_bpsk_with_order(gamma, DEFAULT_QUAD_ORDER)
}

/// Claimed composite rate `R_c1 + R_c2`.
pub fn rate_ocb_claimed(gamma: f64) -> Result<f64> {
    Ok(rate_c1_claimed(gamma)? + rate_c2(gamma)?)
}

/// Exact per-stream information of OCB.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactRates {
    pub i_v1: f64,
    pub i_v2: f64,
    pub sum: f64,
}

/// Chain-rule rates at `γ`: `I(V1;Y) = I_ocb(γ) − I_b(γ)` with unit noise.
pub fn rate_ocb_exact(gamma: f64) -> Result<ExactRates> {
    rate_ocb_exact_with_order(gamma, DEFAULT_QUAD_ORDER)
}

pub fn rate_ocb_exact_with_order(gamma: f64, order: usize) -> Result<ExactRates> {
    if gamma.is_nan() || gamma < 0.0 {
        return domain(format!("SNR must be nonnegative, got {gamma}"));
    }
    if gamma == 0.0 {
        return Ok(ExactRates {
            i_v1: 0.0,
            i_v2: 0.0,
            sum: 0.0,
        });
    }
    // Same split as `stream_mi_ocb`, with the BPSK term evaluated at `gamma`
    // itself so that `i_v2` and `rate_c2` agree bit for bit.
    let cons = Constellation::with_energy(gamma)?;
    let joint = mi_awgn_2d(&cons.point_set(), &NoiseModel::new(1.0)?, order)?.bits;
    let i_v2 = mi_bpsk_with_order(gamma, order)?;
    let i_v1 = (joint - i_v2).max(0.0);
    Ok(ExactRates {
        i_v1,
        i_v2,
        sum: i_v1 + i_v2,
    })
}

/// Input family for [`check_superposition_inequality`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modulation {
    Bpsk,
    Qpsk,
}

impl Modulation {
    fn mi(self, gamma: f64, order: usize) -> Result<f64> {
        match self {
            Modulation::Bpsk => mi_bpsk_with_order(gamma, order),
            Modulation::Qpsk => mi_qpsk_with_order(gamma, order),
        }
    }
}

/// Outcome of the subadditivity comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperpositionCheck {
    /// `Ĩ((E1 + E2)/σ²)`
    pub lhs: f64,
    /// `Ĩ(E1/σ²) + Ĩ(E2/σ²)`
    pub rhs: f64,
    /// `lhs < rhs`
    pub holds: bool,
}

/// Compares the information of the combined energy against the sum of the parts.
pub fn check_superposition_inequality(
    e1: f64,
    e2: f64,
    sigma2: f64,
    modulation: Modulation,
) -> Result<SuperpositionCheck> {
    if !(e1 >= 0.0 && e2 >= 0.0) {
        return domain(format!("energies must be nonnegative, got {e1} and {e2}"));
    }
    let noise = NoiseModel::new(sigma2)?;
    let s2 = noise.sigma2();
    let lhs = modulation.mi((e1 + e2) / s2, DEFAULT_QUAD_ORDER)?;
    let rhs =
        modulation.mi(e1 / s2, DEFAULT_QUAD_ORDER)? + modulation.mi(e2 / s2, DEFAULT_QUAD_ORDER)?;
    Ok(SuperpositionCheck {
        lhs,
        rhs,
        holds: lhs < rhs,
    })
}

/// One grid point of a rate sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub gamma: f64,
    pub i_bpsk: f64,
    pub i_qpsk: f64,
    /// Complex Gaussian-input capacity at the same per-dimension noise,
    /// `log2(1 + γ/2)`.
    pub c_gauss_complex: f64,
    pub r_c1_claimed: f64,
    pub r_c2: f64,
    pub r_j_claimed: f64,
    pub i_v1_exact: f64,
    pub i_v2_exact: f64,
    pub sum_exact: f64,
}

impl RateRow {
    pub fn at(gamma: f64, order: usize) -> Result<Self> {
        let i_bpsk = mi_bpsk_with_order(gamma, order)?;
        let i_qpsk = mi_qpsk_with_order(gamma, order)?;
        let exact = rate_ocb_exact_with_order(gamma, order)?;
        let r_c1_claimed = 0.5 * i_qpsk;
        let r_c2 = i_bpsk;
        Ok(Self {
            gamma,
            i_bpsk,
            i_qpsk,
            c_gauss_complex: gaussian_capacity(gamma / 2.0, Dims::Complex)?,
            r_c1_claimed,
            r_c2,
            r_j_claimed: r_c1_claimed + r_c2,
            i_v1_exact: exact.i_v1,
            i_v2_exact: exact.i_v2,
            sum_exact: exact.sum,
        })
    }

    /// `R_c1 − I(V1;Y)`, the part of the claimed rate the first stream does not carry.
    pub fn c1_gap(&self) -> f64 {
        self.r_c1_claimed - self.i_v1_exact
    }

    /// `R_J − I_q`.
    pub fn claimed_excess(&self) -> f64 {
        self.r_j_claimed - self.i_qpsk
    }

    /// Column names in CSV order.
    pub const CSV_HEADER: &'static str =
        "gamma,i_bpsk,i_qpsk,c_gauss,r_c1_claimed,r_c2,r_j_claimed,i_v1_exact,i_v2_exact,sum_exact";

    pub fn csv_fields(&self) -> [f64; 10] {
        [
            self.gamma,
            self.i_bpsk,
            self.i_qpsk,
            self.c_gauss_complex,
            self.r_c1_claimed,
            self.r_c2,
            self.r_j_claimed,
            self.i_v1_exact,
            self.i_v2_exact,
            self.sum_exact,
        ]
    }
}

/// Grid spacing for sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

impl Spacing {
    pub fn as_str(&self) -> &'static str {
        match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        }
    }
}

impl std::fmt::Display for Spacing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Spacing {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Spacing::Log),
            "linear" | "lin" => Ok(Spacing::Linear),
            _ => parameter(format!("unknown spacing {s:?}")),
        }
    }
}

/// SNR grid and quadrature order for a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub order: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            gamma_min: 0.01,
            gamma_max: 100.0,
            count: 60,
            spacing: Spacing::Log,
            order: DEFAULT_QUAD_ORDER,
        }
    }
}

impl SweepSpec {
    /// The grid points in increasing order. A single point requires `min == max`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        let (lo, hi, n) = (self.gamma_min, self.gamma_max, self.count);
        if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
            return parameter(format!(
                "grid bounds must be positive and finite, got [{lo}, {hi}]"
            ));
        }
        if hi < lo {
            return parameter(format!("grid maximum {hi} is below minimum {lo}"));
        }
        match n {
            0 => parameter("grid needs at least one point"),
            1 if lo == hi => Ok(vec![lo]),
            1 => parameter("a single-point grid needs gamma_min == gamma_max"),
            _ => {
                let step = |i: usize| i as f64 / (n - 1) as f64;
                Ok((0..n)
                    .map(|i| match i {
                        0 => lo,
                        i if i == n - 1 => hi,
                        _ => match self.spacing {
                            Spacing::Log => (lo.ln() + (hi.ln() - lo.ln()) * step(i)).exp(),
                            Spacing::Linear => lo + (hi - lo) * step(i),
                        },
                    })
                    .collect())
            }
        }
    }
}

/// One [`RateRow`] per grid point, in grid order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<RateRow>> {
    let grid = spec.grid()?;
    grid.par_iter()
        .map(|&g| RateRow::at(g, spec.order))
        .collect()
}

/// Where the claimed composite rate exceeds QPSK by more than a threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExcessInterval {
    pub lower: f64,
    pub upper: f64,
    pub peak_gamma: f64,
    pub peak_gap: f64,
    pub threshold: f64,
}

/// `R_J(γ) − I_q(γ)`.
fn claimed_gap(gamma: f64, order: usize) -> Result<f64> {
    let i_q = mi_qpsk_with_order(gamma, order)?;
    Ok(0.5 * i_q + mi_bpsk_with_order(gamma, order)? - i_q)
}

/// Relative width at which the interval edges and the peak location are final.
const SEARCH_TOL: f64 = 1e-9;

/// Bisects for the sign change of `f` between `inside` (f > 0) and `outside`.
fn bisect(mut inside: f64, mut outside: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    for _ in 0..100 {
        if (inside - outside).abs() <= SEARCH_TOL * inside.abs().max(outside.abs()) {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if f(mid)? > 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

/// Locates the SNR interval, within the sweep range, on which
/// `R_J(γ) − I_q(γ) > threshold`, and the peak of that gap.
///
/// The interval is the run of grid points around the largest gap, with each
/// interior edge refined by bisection; the peak is refined by golden-section
/// search between the grid neighbors of the largest sample.
pub fn claimed_excess_interval(spec: &SweepSpec, threshold: f64) -> Result<Option<ExcessInterval>> {
    let grid = spec.grid()?;
    let order = spec.order;
    let gaps: Vec<f64> = grid
        .par_iter()
        .map(|&g| claimed_gap(g, order))
        .collect::<Result<_>>()?;
    let (best, &best_gap) = gaps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    if best_gap <= threshold {
        return Ok(None);
    }
    let above = |g: f64| Ok(claimed_gap(g, order)? - threshold);
    let mut first = best;
    while first > 0 && gaps[first - 1] > threshold {
        first -= 1;
    }
    let mut last = best;
    while last + 1 < grid.len() && gaps[last + 1] > threshold {
        last += 1;
    }
    let lower = if first == 0 {
        grid[0]
    } else {
        bisect(grid[first], grid[first - 1], above)?
    };
    let upper = if last + 1 == grid.len() {
        grid[last]
    } else {
        bisect(grid[last], grid[last + 1], above)?
    };

    // Golden-section refinement of the peak in log-SNR.
    let (mut a, mut b) = (
        grid[best.saturating_sub(1)].ln(),
        grid[(best + 1).min(grid.len() - 1)].ln(),
    );
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let gap_at = |x: f64| claimed_gap(x.exp(), order);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut f1, mut f2) = (gap_at(x1)?, gap_at(x2)?);
    while b - a > SEARCH_TOL {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = gap_at(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = gap_at(x2)?;
        }
    }
    let (mut peak_gamma, mut peak_gap) = if f1 > f2 {
        (x1.exp(), f1)
    } else {
        (x2.exp(), f2)
    };
    if best_gap > peak_gap {
        peak_gamma = grid[best];
        peak_gap = best_gap;
    }
    Ok(Some(ExcessInterval {
        lower,
        upper,
        peak_gamma,
        peak_gap,
        threshold,
    }))
}
