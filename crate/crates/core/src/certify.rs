//! Thresholds and verdicts for interpolation and sampling in `F^p_alpha`.
//!
//! The classification is taken on trust: a separated sequence is
//! interpolating iff `D+ < alpha / pi` and sampling iff `D- > alpha / pi`,
//! for every `0 < p <= inf`. The certificates here chain that criterion
//! with the packing and covering density bounds, so a verdict only needs a
//! separation or covering measurement.
//!
//! A certificate speaks about the infinite sequence that the finite input
//! stands for. What it verifies on the data is the hypothesis (separation,
//! or covering on the stated region), nothing more.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::density::{
    covering_density_bound, density_profile, estimate_lower_density, estimate_upper_density,
    separation_density_bound, DensityEstimate, DensityProfile,
};
use crate::error::{check_positive, Error, Result};
use crate::geometry::{is_covering, min_separation, Coverage, GridSpec, PointSet, Region};

/// Lebesgue exponent `p` in `(0, inf]`. Serialised as a number, or the
/// string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && !p.is_nan() {
            Ok(Exponent(p))
        } else {
            Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must lie in (0, inf]",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Str(s) if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") => f64::INFINITY,
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom)?,
        };
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockParams {
    pub alpha: f64,
    pub p: Exponent,
}

impl FockParams {
    pub fn new(alpha: f64, p: Exponent) -> Result<Self> {
        check_positive("alpha", alpha)?;
        Ok(FockParams { alpha, p })
    }

    /// `p = 2`, the Hilbert-space case.
    pub fn hilbert(alpha: f64) -> Result<Self> {
        Self::new(alpha, Exponent(2.0))
    }
}

/// Tung's separation threshold `2 / sqrt(alpha)`.
pub fn tung_threshold(params: &FockParams) -> f64 {
    2.0 / params.alpha.sqrt()
}

/// `sqrt(2 pi / (sqrt(3) alpha))`: separation beyond this forces
/// `D+ < alpha / pi`.
pub fn improved_interpolation_threshold(params: &FockParams) -> f64 {
    (2.0 * PI / (3f64.sqrt() * params.alpha)).sqrt()
}

/// `sqrt(2 pi / (3 sqrt(3) alpha))`: covering radius below this forces
/// `D- > alpha / pi`.
pub fn covering_sampling_threshold(params: &FockParams) -> f64 {
    (2.0 * PI / (3.0 * 3f64.sqrt() * params.alpha)).sqrt()
}

/// Critical density `alpha / pi`.
pub fn critical_density(params: &FockParams) -> f64 {
    params.alpha / PI
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedInterpolating,
    CertifiedSampling,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    SeparationThm5,
    SeparationThm2,
    CoveringThm6,
    DensityEmpirical,
}

/// `margin` is positive exactly when the bound sits on the certifying side
/// of `critical`: `critical - bound` for interpolation, `bound - critical`
/// for sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub route: Route,
    pub sigma: f64,
    pub bound: f64,
    pub critical: f64,
    pub margin: f64,
    pub notes: String,
}

impl Certificate {
    /// Structural consistency between verdict, route and the numbers.
    pub fn validate(&self) -> std::result::Result<(), String> {
        match self.verdict {
            Verdict::CertifiedInterpolating => {
                if !matches!(self.route, Route::SeparationThm5 | Route::SeparationThm2) {
                    return Err(format!("interpolating verdict via {:?}", self.route));
                }
                if !(self.bound < self.critical) {
                    return Err(format!("bound {} not below critical {}", self.bound, self.critical));
                }
            }
            Verdict::CertifiedSampling => {
                if self.route != Route::CoveringThm6 {
                    return Err(format!("sampling verdict via {:?}", self.route));
                }
                if !(self.bound > self.critical) {
                    return Err(format!("bound {} not above critical {}", self.bound, self.critical));
                }
            }
            Verdict::Inconclusive => {}
        }
        Ok(())
    }
}

fn scope_note(params: &FockParams) -> String {
    format!(
        "verdict applies to every 0 < p <= inf (requested p = {}); it concerns the infinite sequence \
         represented by the data, of which only the stated hypothesis was checked on the given points",
        params.p
    )
}

/// Certifies interpolation from the measured separation.
pub fn certify_interpolating_by_separation(ps: &PointSet, params: &FockParams) -> Result<Certificate> {
    check_positive("alpha", params.alpha)?;
    let sigma = min_separation(ps)?;
    let improved = improved_interpolation_threshold(params);
    let tung = tung_threshold(params);
    let critical = critical_density(params);
    let bound = separation_density_bound(sigma)?;
    let mut notes = Vec::new();
    let (verdict, route) = if sigma > improved {
        notes.push(format!(
            "separation {sigma} > improved threshold {improved}: D+ <= {bound} < alpha/pi = {critical}"
        ));
        if sigma > tung {
            notes.push(format!("Tung threshold {tung} is also met"));
        } else {
            notes.push(format!(
                "Tung threshold {tung} NOT met (separation {sigma} <= {tung}); certified only by the improved threshold"
            ));
        }
        (Verdict::CertifiedInterpolating, Route::SeparationThm5)
    } else if sigma > tung {
        // unreachable while improved < tung; kept for completeness of the report
        (Verdict::CertifiedInterpolating, Route::SeparationThm2)
    } else {
        notes.push(format!(
            "separation {sigma} <= improved threshold {improved} (Tung threshold {tung}); no conclusion"
        ));
        (Verdict::Inconclusive, Route::SeparationThm5)
    };
    notes.push(scope_note(params));
    Ok(Certificate {
        verdict,
        route,
        sigma,
        bound,
        critical,
        margin: critical - bound,
        notes: notes.join("; "),
    })
}

/// Certifies sampling from a covering by `sigma`-circles, checked
/// conservatively on `region`.
pub fn certify_sampling_by_covering(
    ps: &PointSet,
    sigma: f64,
    region: &Region,
    grid: &GridSpec,
    params: &FockParams,
) -> Result<Certificate> {
    check_positive("alpha", params.alpha)?;
    let coverage = is_covering(ps, sigma, region, grid)?;
    let threshold = covering_sampling_threshold(params);
    let critical = critical_density(params);
    let bound = covering_density_bound(sigma)?;
    let mut notes = Vec::new();
    let verdict = if !(sigma < threshold) {
        notes.push(format!("sigma above threshold: {sigma} >= {threshold}"));
        Verdict::Inconclusive
    } else {
        match coverage {
            Coverage::Covered { radius } => {
                notes.push(format!(
                    "covering verified on region [{}, {}] x [{}, {}] only (grid radius {radius} + half-diagonal {} <= {sigma}); \
                     sigma {sigma} < threshold {threshold}: D- >= {bound} > alpha/pi = {critical}",
                    region.xmin,
                    region.xmax,
                    region.ymin,
                    region.ymax,
                    grid.half_diagonal()
                ));
                Verdict::CertifiedSampling
            }
            Coverage::Uncovered { witness, radius } => {
                notes.push(format!(
                    "not a covering: grid covering radius {radius} (+ half-diagonal {}) exceeds sigma {sigma}; deepest point ({}, {})",
                    grid.half_diagonal(),
                    witness.x,
                    witness.y
                ));
                Verdict::Inconclusive
            }
        }
    };
    notes.push(scope_note(params));
    Ok(Certificate {
        verdict,
        route: Route::CoveringThm6,
        sigma,
        bound,
        critical,
        margin: bound - critical,
        notes: notes.join("; "),
    })
}

/// Sweep parameters for the empirical route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityInputs {
    pub radii: Vec<f64>,
    pub zeta_region: Region,
    pub zeta_grid: GridSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indication {
    Interpolating,
    Sampling,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityClassification {
    pub certificate: Certificate,
    pub indication: Indication,
    pub upper: DensityEstimate,
    pub lower: DensityEstimate,
    pub profile: DensityProfile,
}

/// Applies the density criterion to extrapolated estimates. The verdict is
/// always `Inconclusive`; the empirical reading goes in `indication`.
pub fn classify_by_density(ps: &PointSet, params: &FockParams, inputs: &DensityInputs) -> Result<DensityClassification> {
    check_positive("alpha", params.alpha)?;
    let sigma = min_separation(ps)?;
    let profile = density_profile(ps, &inputs.radii, &inputs.zeta_region, &inputs.zeta_grid)?;
    let upper = estimate_upper_density(&profile)?;
    let lower = estimate_lower_density(&profile)?;
    let critical = critical_density(params);
    let (indication, bound, margin) = if lower.value > critical {
        (Indication::Sampling, lower.value, lower.value - critical)
    } else if upper.value < critical {
        (Indication::Interpolating, upper.value, critical - upper.value)
    } else {
        (Indication::Neither, upper.value, critical - upper.value)
    };
    let cmp = |v: f64| if v < critical { "<" } else if v > critical { ">" } else { "=" };
    let notes = format!(
        "empirical, not certified: {} centres swept, radii up to {}; D+ ~ {} {} alpha/pi = {critical}; \
         D- ~ {} {} alpha/pi; indication: {:?}; separation {sigma}; {}",
        profile.zeta_sweep.samples,
        profile.radii.last().copied().unwrap_or(0.0),
        upper.value,
        cmp(upper.value),
        lower.value,
        cmp(lower.value),
        indication,
        scope_note(params)
    );
    Ok(DensityClassification {
        certificate: Certificate {
            verdict: Verdict::Inconclusive,
            route: Route::DensityEmpirical,
            sigma,
            bound,
            critical,
            margin,
            notes,
        },
        indication,
        upper,
        lower,
        profile,
    })
}
