//! The bound engine: derives every effective constant of a domain and assembles
//! per-weight upper and lower bounds for `sup S_{2k}`.

mod formulas;

pub use formulas::*;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainPart, FundamentalDomain, RegionTag};
use crate::error::{Error, Result};
use crate::hyperbolic::dist_point_to_segment;
use crate::numfmt::sig;

/// Constants printed for the modular group in the published worked example,
/// reported next to the engine's own values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedModular {
    pub elliptic_coefficient: f64,
    pub decay_coefficient: f64,
    pub sigma_y: f64,
}

pub const PUBLISHED_MODULAR: PublishedModular =
    PublishedModular { elliptic_coefficient: 31.0, decay_coefficient: 72.0, sigma_y: 1.014 };

/// Everything the bounds depend on. Absent cusp data (compact quotients) and
/// absent torsion are `None`; `mu_gamma = None` means the infimum is empty (+∞).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveConstants {
    pub domain: String,
    pub genus: u32,
    pub cusps: usize,
    pub covolume: f64,
    pub y0: f64,
    pub y: f64,
    pub ell_gamma: f64,
    pub theta_gamma: Option<f64>,
    pub mu_gamma: Option<f64>,
    pub sigma_branches: SigmaBranches,
    pub sigma_y: f64,
    pub m_y: Option<f64>,
    pub big_m_y: Option<f64>,
    pub diam_y: f64,
    pub vol_y: f64,
    pub b_y: f64,
    pub diam_y0: Option<f64>,
    pub vol_y0: Option<f64>,
    pub b_y0: Option<f64>,
    pub elliptic_excess: u32,
    /// `12 B_Y`, the coefficient of `(2k−1) σ_Y^{−(k−2)}` in the compact bound.
    pub decay_coefficient: f64,
    pub cocompact: Option<CocompactConstants>,
    pub weight2: Weight2Bound,
    pub published: Option<PublishedModular>,
}

/// One entry of the constants ledger with a short note on where it comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub name: &'static str,
    pub value: Option<f64>,
    pub provenance: &'static str,
}

impl EffectiveConstants {
    pub fn ledger(&self) -> Vec<LedgerEntry> {
        let e = |name, value, provenance| LedgerEntry { name, value, provenance };
        vec![
            e("Y0", Some(self.y0), "input"),
            e("Y", Some(self.y), "max{2 Y0, 16/sqrt(15)}"),
            e("covolume", Some(self.covolume), "Gauss-Bonnet"),
            e("ell_gamma", Some(self.ell_gamma), "systole from the minimal hyperbolic trace"),
            e("theta_gamma", self.theta_gamma, "min 2 pi / n over elliptic points"),
            e("mu_gamma", self.mu_gamma, "elliptic point to boundary distances (absent = +inf)"),
            e("m_Y", self.m_y, "sampled minimum of cusp-chart heights on the truncated domain"),
            e("M_Y", self.big_m_y, "truncation height"),
            e("sigma_hyperbolic", Some(self.sigma_branches.hyperbolic), "(cosh ell + 1)/2"),
            e("sigma_elliptic", self.sigma_branches.elliptic, "sinh^2 mu sin^2(theta/2) + 1"),
            e("sigma_parabolic_low", self.sigma_branches.parabolic_low, "m_Y^2/4 + 1"),
            e("sigma_parabolic_high", self.sigma_branches.parabolic_high, "1/(4 M_Y^2) + 1"),
            e("sigma_Y", Some(self.sigma_y), "minimum of the branches"),
            e("diam_Y", Some(self.diam_y), "diameter upper bound of the compact part"),
            e("diam_Y0", self.diam_y0, "diameter upper bound at height Y0"),
            e("vol_Y", Some(self.vol_y), "area of the compact part"),
            e("vol_Y0", self.vol_y0, "area of the domain truncated at Y0"),
            e("B_Y", Some(self.b_y), "exp(diam_Y / 2) / vol_Y"),
            e("B_Y0", self.b_y0, "exp(diam_Y0 / 2) / vol_Y0"),
            e("elliptic_excess", Some(self.elliptic_excess as f64), "sum (n_j - 1) over listed elliptic points"),
            e("decay_coefficient", Some(self.decay_coefficient), "12 B_Y"),
            e("published_decay_coefficient", self.published.map(|p| p.decay_coefficient), "printed value, for comparison"),
            e("C_gamma", self.cocompact.map(|c| c.c_gamma), "compact torsion-free constant"),
            e("delta_gamma", self.cocompact.map(|c| c.delta_gamma), "compact torsion-free decay rate"),
            e("weight2_eps", Some(self.weight2.eps), "grid minimiser"),
            e("weight2_bound", Some(self.weight2.bound), "weight-2 bound at the minimiser"),
        ]
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn ledger_csv(&self) -> String {
        let mut out = String::from("name,value,provenance\n");
        for e in self.ledger() {
            let v = e.value.map_or_else(|| "absent".to_string(), sig);
            out.push_str(&format!("{},{},\"{}\"\n", e.name, v, e.provenance));
        }
        out
    }
}

/// `inf dist(S, e)` over boundary segments `S` and elliptic points `e ∉ S`.
pub fn mu_gamma(d: &FundamentalDomain) -> Option<f64> {
    d.elliptic
        .iter()
        .flat_map(|e| d.boundary.iter().map(move |s| (s, e.point())))
        .filter(|(s, p)| !s.contains(*p))
        .map(|(s, p)| dist_point_to_segment(s, p))
        .reduce(f64::min)
}

/// `d_{2k} / vol`, with the genus form `(k−1)/2π` flagged when `g ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub dimension_ratio: f64,
    pub genus_form: Option<f64>,
}

pub fn sup_lower_bound(k: u32, d: &FundamentalDomain) -> Result<LowerBound> {
    let dim = d.dimension_d2k(k as i64)?;
    Ok(LowerBound {
        dimension_ratio: dim as f64 / d.covolume(),
        genus_form: (d.genus >= 1).then(|| (k as f64 - 1.0) / (2.0 * PI)),
    })
}

/// Derives all constants for truncation parameter `Y0`.
pub fn compute_constants(d: &FundamentalDomain, y0: f64) -> Result<EffectiveConstants> {
    let y = truncation_height(y0).map_err(Error::at("truncation height"))?;
    let ell = d.shortest_geodesic_length().map_err(Error::at("systole"))?;
    let theta = d.theta_gamma();
    let mu = mu_gamma(d);
    let (heights, diam_y, vol_y, diam_y0, vol_y0) = if d.is_cocompact() {
        let diam = d.diameter_upper_bound(y).map_err(Error::at("diameter"))?;
        (None, diam, d.covolume(), None, None)
    } else {
        let h = d.decomposition(y).map_err(Error::at("cusp-chart heights"))?;
        let diam = d.diameter_upper_bound(y).map_err(Error::at("diameter at Y"))?;
        let vol = d.volume_region(DomainPart::Truncated(y)).map_err(Error::at("area at Y"))?;
        let diam0 = d.diameter_upper_bound(y0).map_err(Error::at("diameter at Y0"))?;
        let vol0 = d.volume_region(DomainPart::Truncated(y0)).map_err(Error::at("area at Y0"))?;
        (Some(h), diam, vol, Some(diam0), Some(vol0))
    };
    let branches = sigma_y_branches(ell, mu, theta, heights.map(|h| (h.m_y, h.big_m_y)));
    let b = b_y(diam_y, vol_y).map_err(Error::at("B_Y"))?;
    let b0 = match (diam_y0, vol_y0) {
        (Some(dd), Some(v)) => Some(b_y(dd, v).map_err(Error::at("B_Y0"))?),
        _ => None,
    };
    let cocompact = (d.is_cocompact() && d.elliptic.is_empty() && d.genus >= 2)
        .then(|| cocompact_constants(d.genus, ell))
        .transpose()
        .map_err(Error::at("compact torsion-free constants"))?;
    let weight2 = sup_bound_weight2_best(y, b).map_err(Error::at("weight 2"))?;
    Ok(EffectiveConstants {
        domain: d.name.clone(),
        genus: d.genus,
        cusps: d.cusps.len(),
        covolume: d.covolume(),
        y0,
        y,
        ell_gamma: ell,
        theta_gamma: theta,
        mu_gamma: mu,
        sigma_y: branches.min(),
        sigma_branches: branches,
        m_y: heights.map(|h| h.m_y),
        big_m_y: heights.map(|h| h.big_m_y),
        diam_y,
        vol_y,
        b_y: b,
        diam_y0,
        vol_y0,
        b_y0: b0,
        elliptic_excess: d.elliptic_excess(),
        decay_coefficient: 12.0 * b,
        cocompact,
        weight2,
        published: d.is_modular_group().then_some(PUBLISHED_MODULAR),
    })
}

/// Which estimate produced a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// Poincaré-series estimate on the compact part.
    CompactPoincare,
    /// Cusp neighbourhood with `Y ≥ k/2π`: the compact bound carries over.
    CuspMaximumPrinciple,
    /// Cusp neighbourhood with `Y < k/2π`: Faddeev transfer plus parabolic sum.
    CuspParabolic,
    /// Compact torsion-free quotient: `(2k−1)/4π + C_Γ e^{−δ_Γ k}`.
    CocompactExponential,
}

impl BoundSource {
    pub fn label(self) -> &'static str {
        match self {
            BoundSource::CompactPoincare => "compact-poincare",
            BoundSource::CuspMaximumPrinciple => "cusp-maximum-principle",
            BoundSource::CuspParabolic => "cusp-parabolic",
            BoundSource::CocompactExponential => "cocompact-exponential",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: u32,
    pub region: RegionTag,
    pub upper: f64,
    pub lower: Option<f64>,
    pub source: BoundSource,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,region,upper,lower,source\n");
        for r in &self.rows {
            let lower = r.lower.map(sig).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{}\n", r.k, r.region, sig(r.upper), lower, r.source.label()));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Plot data `k,bound`, one series per region.
    pub fn curves(&self) -> Vec<(RegionTag, String)> {
        let mut regions: Vec<RegionTag> = self.rows.iter().map(|r| r.region).collect();
        regions.sort();
        regions.dedup();
        regions
            .into_iter()
            .map(|tag| {
                let mut csv = String::from("k,bound\n");
                for r in self.rows.iter().filter(|r| r.region == tag) {
                    csv.push_str(&format!("{},{}\n", r.k, sig(r.upper)));
                }
                (tag, csv)
            })
            .collect()
    }
}

fn rows_for_weight(d: &FundamentalDomain, c: &EffectiveConstants, k: u32) -> Result<Vec<BoundRow>> {
    let lower = sup_lower_bound(k, d)?.dimension_ratio;
    if let Some(cc) = c.cocompact {
        return Ok(vec![BoundRow {
            k,
            region: RegionTag::Compact,
            upper: cc.bound(k),
            lower: Some(lower),
            source: BoundSource::CocompactExponential,
        }]);
    }
    let compact = sup_bound_compact(k, c.b_y, c.sigma_y, c.elliptic_excess)?.total();
    // The supremum over the whole domain is attained in the compact part when Y ≥ k/2π.
    let whole_in_compact = d.is_cocompact() || c.y >= k as f64 / (2.0 * PI);
    let mut rows = vec![BoundRow {
        k,
        region: RegionTag::Compact,
        upper: compact,
        lower: whole_in_compact.then_some(lower),
        source: BoundSource::CompactPoincare,
    }];
    for j in 0..c.cusps {
        let b0 = c.b_y0.ok_or_else(|| Error::MissingData("B_Y0".into()))?;
        let (upper, source) = match sup_bound_cusp(k, c.y0, b0)? {
            CuspBound::UseCompact => (compact, BoundSource::CuspMaximumPrinciple),
            CuspBound::Explicit(v) => (v, BoundSource::CuspParabolic),
        };
        rows.push(BoundRow { k, region: RegionTag::Cusp(j), upper, lower: None, source });
    }
    Ok(rows)
}

/// Bound rows for `k_min ≤ k ≤ k_max` (empty when the range is empty).
pub fn bound_report(d: &FundamentalDomain, c: &EffectiveConstants, k_min: u32, k_max: u32) -> Result<BoundReport> {
    if k_min > k_max {
        return Ok(BoundReport::default());
    }
    if k_min < 2 {
        return Err(Error::UnsupportedWeight(k_min as i64));
    }
    let per_k: Vec<Vec<BoundRow>> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| rows_for_weight(d, c, k))
        .collect::<Result<_>>()
        .map_err(Error::at("bound table"))?;
    let mut rows: Vec<BoundRow> = per_k.into_iter().flatten().collect();
    rows.sort_by_key(|r| (r.k, r.region));
    Ok(BoundReport { rows })
}

/// Constants followed by the bound table.
pub fn run_algorithm(d: &FundamentalDomain, y0: f64, k_min: u32, k_max: u32) -> Result<(EffectiveConstants, BoundReport)> {
    let c = compute_constants(d, y0)?;
    let report = bound_report(d, &c, k_min, k_max)?;
    Ok((c, report))
}
