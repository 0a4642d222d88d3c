//! Fundamental domains: the JSON ingestion format, validation, and the
//! geometric quantities derived from a domain (covolume, dimensions of cusp
//! form spaces, region membership, diameters, areas, cusp-chart heights).

mod region;

pub use region::{Constraint, Region, MEMBERSHIP_TOL};

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyperbolic::{GeodesicSegment, MoebiusMap, UhpPoint};
use crate::quadrature::Tolerance;

const PSL2Z_JSON: &str = include_str!("../../fixtures/psl2z.json");
const GENUS2_JSON: &str = include_str!("../../fixtures/genus2.json");

/// Samples per boundary segment (and per horocycle) when bounding `m_Y`.
pub const BOUNDARY_SAMPLES: usize = 512;
/// Safety margin subtracted from the sampled minimum of `m_Y`.
pub const M_Y_MARGIN: f64 = 1e-9;
/// Accuracy requested from region-area quadrature.
pub const AREA_TOL: Tolerance = Tolerance::new(1e-11, 1e-10);

/// A cusp with its scaling map `σ`, so that `σ(∞)` is the cusp.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspData {
    pub label: String,
    pub scaling_map: MoebiusMap,
}

#[derive(Serialize, Deserialize)]
struct CuspRepr {
    label: String,
    scaling_map: [[f64; 2]; 2],
}

impl Serialize for CuspData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.scaling_map;
        CuspRepr { label: self.label.clone(), scaling_map: [[m.a, m.b], [m.c, m.d]] }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CuspData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CuspRepr::deserialize(d)?;
        let [[a, b], [c, dd]] = r.scaling_map;
        let scaling_map = MoebiusMap::new(a, b, c, dd)
            .map_err(|e| serde::de::Error::custom(format!("cusp {}: {e}", r.label)))?;
        Ok(CuspData { label: r.label, scaling_map })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticPointData {
    pub x: f64,
    pub y: f64,
    pub order: u32,
    /// Whether this point stands for its equivalence class in class-level
    /// counts (covolume, dimensions). Boundary-equivalent copies set `false`.
    #[serde(default = "yes")]
    pub is_class_rep: bool,
}

fn yes() -> bool {
    true
}

impl EllipticPointData {
    pub fn point(&self) -> UhpPoint {
        UhpPoint::at(self.x, self.y)
    }
}

/// Rectangle `[x_min, x_max] × [y_min, ·)` containing the domain in the chart of
/// its cusp at infinity; the top is the truncation height.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingRect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalDomain {
    #[serde(default)]
    pub name: String,
    pub genus: u32,
    #[serde(default)]
    pub cusps: Vec<CuspData>,
    #[serde(default)]
    pub elliptic: Vec<EllipticPointData>,
    #[serde(default)]
    pub boundary: Vec<GeodesicSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_hyperbolic_trace: Option<f64>,
    /// Membership test: the domain is the intersection of these constraints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<Constraint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounding_rect: Option<BoundingRect>,
    /// A known upper bound for the diameter, for domains without a bounding rectangle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter_bound: Option<f64>,
}

/// Which part of a domain a quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainPart {
    Full,
    /// The domain with every cusp neighbourhood `Im(σ_j⁻¹ z) > Y` removed.
    Truncated(f64),
}

/// Location of a point relative to the decomposition at height `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionTag {
    Compact,
    /// Zero-based cusp index.
    Cusp(usize),
}

impl std::fmt::Display for RegionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionTag::Compact => write!(f, "F_Y"),
            RegionTag::Cusp(j) => write!(f, "F_{}^Y", j + 1),
        }
    }
}

/// Heights bounding `Im(σ_j⁻¹ z)` on the truncated domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionDecomposition {
    pub y: f64,
    pub m_y: f64,
    pub big_m_y: f64,
}

/// Shortest closed geodesic length `2 arccosh(t/2)` for a hyperbolic trace `t`.
pub fn geodesic_length_from_trace(trace: f64) -> Result<f64> {
    if !(trace > 2.0) || !trace.is_finite() {
        return Err(Error::NotHyperbolic(trace));
    }
    Ok(2.0 * (0.5 * trace).acosh())
}

/// Loads and validates a domain from JSON text.
pub fn load_domain_str(text: &str) -> Result<FundamentalDomain> {
    let d: FundamentalDomain = serde_json::from_str(text).map_err(|e| Error::Load(e.to_string()))?;
    d.validate().map_err(|e| match e {
        Error::Load(m) => Error::Load(m),
        other => Error::Load(other.to_string()),
    })?;
    Ok(d)
}

/// Loads and validates a domain from a JSON file.
pub fn load_domain(path: impl AsRef<Path>) -> Result<FundamentalDomain> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    load_domain_str(&text)
}

/// The standard domain of the modular group.
pub fn psl2z() -> FundamentalDomain {
    load_domain_str(PSL2Z_JSON).expect("bundled modular-group domain is valid")
}

/// A compact, torsion-free genus-two example with systole trace 3.
pub fn genus2() -> FundamentalDomain {
    load_domain_str(GENUS2_JSON).expect("bundled genus-two domain is valid")
}

impl FundamentalDomain {
    pub fn validate(&self) -> Result<()> {
        let load = |m: String| Err(Error::Load(m));
        for e in &self.elliptic {
            if e.order < 2 {
                return load(format!("elliptic point {}+{}i has order {} < 2", e.x, e.y, e.order));
            }
            UhpPoint::new(e.x, e.y)?;
        }
        for s in &self.boundary {
            s.validate()?;
        }
        if let Some(t) = self.min_hyperbolic_trace {
            geodesic_length_from_trace(t)?;
        }
        if let Some(b) = self.diameter_bound {
            if !(b > 0.0 && b.is_finite()) {
                return load(format!("diameter bound {b} must be positive"));
            }
        }
        if let Some(r) = &self.bounding_rect {
            if !(r.x_max > r.x_min && r.y_min > 0.0 && r.y_min.is_finite() && r.x_min.is_finite() && r.x_max.is_finite()) {
                return load(format!("invalid bounding rectangle {r:?}"));
            }
        }
        if let Some(cs) = &self.region {
            for c in cs {
                c.validate()?;
            }
            let region = Region::new(cs.clone());
            for e in &self.elliptic {
                if !region.contains(e.point(), MEMBERSHIP_TOL) {
                    return load(format!("elliptic point {}+{}i lies outside the region", e.x, e.y));
                }
            }
        }
        let chi = self.euler_term();
        if !(chi > 0.0) {
            return load(format!("Gauss-Bonnet term (2g-2) + h + sum(1 - 1/n) = {chi} is not positive"));
        }
        Ok(())
    }

    /// `(2g − 2) + h + Σ (1 − 1/n)` over elliptic class representatives.
    fn euler_term(&self) -> f64 {
        let elliptic: f64 = self.class_reps().map(|e| 1.0 - 1.0 / e.order as f64).sum();
        2.0 * self.genus as f64 - 2.0 + self.cusps.len() as f64 + elliptic
    }

    fn class_reps(&self) -> impl Iterator<Item = &EllipticPointData> {
        self.elliptic.iter().filter(|e| e.is_class_rep)
    }

    pub fn is_cocompact(&self) -> bool {
        self.cusps.is_empty()
    }

    /// Structural match with the bundled modular-group domain (name ignored).
    pub fn is_modular_group(&self) -> bool {
        let m = psl2z();
        self.genus == m.genus
            && self.cusps.len() == 1
            && self.cusps[0].scaling_map.approx_eq(&m.cusps[0].scaling_map, 1e-12)
            && self.elliptic == m.elliptic
            && self.boundary == m.boundary
            && self.region == m.region
    }

    /// Hyperbolic area of the quotient by Gauss–Bonnet.
    pub fn covolume(&self) -> f64 {
        2.0 * PI * self.euler_term()
    }

    /// Dimension of weight-`2k` cusp forms for `k ≥ 2`.
    pub fn dimension_d2k(&self, k: i64) -> Result<i64> {
        if k < 2 {
            return Err(Error::UnsupportedWeight(k));
        }
        let g = self.genus as i64;
        let h = self.cusps.len() as i64;
        let elliptic: i64 = self.class_reps().map(|e| k * (e.order as i64 - 1) / e.order as i64).sum();
        Ok((2 * k - 1) * (g - 1) + (k - 1) * h + elliptic)
    }

    pub fn membership_region(&self) -> Result<Region> {
        self.region
            .clone()
            .map(Region::new)
            .ok_or_else(|| Error::MissingData(format!("domain '{}' has no region description", self.name)))
    }

    pub fn contains(&self, z: UhpPoint) -> Result<bool> {
        Ok(self.membership_region()?.contains(z, MEMBERSHIP_TOL))
    }

    /// Cusp-chart height `Im(σ_j⁻¹ z)`.
    pub fn cusp_height(&self, j: usize, z: UhpPoint) -> f64 {
        self.cusps[j].scaling_map.inverse().apply(z).y
    }

    /// The cusp neighbourhood containing `z`, or the compact part.
    pub fn classify(&self, y_trunc: f64, z: UhpPoint) -> Result<RegionTag> {
        if !self.contains(z)? {
            return Err(Error::OutsideDomain { x: z.x, y: z.y });
        }
        Ok((0..self.cusps.len())
            .find(|&j| self.cusp_height(j, z) >= y_trunc)
            .map_or(RegionTag::Compact, RegionTag::Cusp))
    }

    pub fn shortest_geodesic_length(&self) -> Result<f64> {
        let t = self
            .min_hyperbolic_trace
            .ok_or_else(|| Error::MissingData("min_hyperbolic_trace is required for the systole".into()))?;
        geodesic_length_from_trace(t)
    }

    /// `min 2π/n` over all listed elliptic points; `None` without torsion.
    pub fn theta_gamma(&self) -> Option<f64> {
        self.elliptic.iter().map(|e| 2.0 * PI / e.order as f64).reduce(f64::min)
    }

    /// `Σ (n − 1)` over every listed elliptic point, duplicates included.
    pub fn elliptic_excess(&self) -> u32 {
        self.elliptic.iter().map(|e| e.order - 1).sum()
    }

    /// Upper bound for the diameter of the part of the domain below height `top`.
    ///
    /// Uses the bounding rectangle when present, then an explicit bound, then for
    /// compact quotients `diam ≤ 2·vol/ℓ`.
    pub fn diameter_upper_bound(&self, top: f64) -> Result<f64> {
        if let Some(r) = &self.bounding_rect {
            if top < r.y_min {
                return Err(Error::Precondition(format!("truncation height {top} below the rectangle floor {}", r.y_min)));
            }
            let w = r.x_max - r.x_min;
            let a = r.y_min;
            let h = top - a;
            return Ok((1.0 + (w * w + h * h) / (2.0 * a * a)).acosh());
        }
        if let Some(b) = self.diameter_bound {
            return Ok(b);
        }
        if self.is_cocompact() {
            if let Ok(l) = self.shortest_geodesic_length() {
                return Ok(2.0 * self.covolume() / l);
            }
        }
        Err(Error::MissingData(format!("no diameter data for domain '{}'", self.name)))
    }

    /// Hyperbolic area of the whole domain or of its truncation.
    pub fn volume_region(&self, part: DomainPart) -> Result<f64> {
        if self.is_cocompact() {
            return Ok(self.covolume());
        }
        let mut region = self.membership_region()?;
        if let DomainPart::Truncated(y) = part {
            if !(y > 0.0) {
                return Err(Error::Precondition(format!("truncation height {y} must be positive")));
            }
            for c in &self.cusps {
                region.truncate(&c.scaling_map, y);
            }
        }
        region.hyperbolic_area(AREA_TOL)
    }

    /// Heights `m_Y ≤ Im(σ_j⁻¹ z) ≤ M_Y` valid on the truncated domain.
    ///
    /// `Im(σ_j⁻¹ z)` is harmonic, so its minimum over the truncated domain sits on
    /// the boundary; that boundary is sampled along the segments and horocycles.
    pub fn decomposition(&self, y_trunc: f64) -> Result<RegionDecomposition> {
        if self.is_cocompact() {
            return Err(Error::MissingData("a compact quotient has no cusp charts".into()));
        }
        let mut truncated = self.membership_region()?;
        for c in &self.cusps {
            truncated.truncate(&c.scaling_map, y_trunc);
        }
        let top = self
            .cusps
            .iter()
            .filter(|c| c.scaling_map.c == 0.0)
            .map(|c| y_trunc * c.scaling_map.d.powi(-2))
            .fold(f64::NAN, f64::max);
        let top = if top.is_nan() { None } else { Some(top) };
        let mut samples: Vec<UhpPoint> =
            self.boundary.iter().flat_map(|s| s.sample(BOUNDARY_SAMPLES, top)).collect();
        for c in &self.cusps {
            samples.extend((0..BOUNDARY_SAMPLES).map(|i| {
                let t = -0.5 + i as f64 / (BOUNDARY_SAMPLES - 1) as f64;
                c.scaling_map.apply(UhpPoint::at(t, y_trunc))
            }));
        }
        let m = samples
            .iter()
            .filter(|&&z| truncated.contains(z, MEMBERSHIP_TOL))
            .flat_map(|&z| (0..self.cusps.len()).map(move |j| (j, z)))
            .map(|(j, z)| self.cusp_height(j, z))
            .fold(f64::INFINITY, f64::min);
        if !m.is_finite() {
            return Err(Error::MissingData("no boundary samples fall in the truncated domain".into()));
        }
        Ok(RegionDecomposition { y: y_trunc, m_y: m - M_Y_MARGIN, big_m_y: y_trunc })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn y_main() -> f64 {
        16.0 / 15f64.sqrt()
    }

    #[test]
    fn bundled_domains_load() {
        let d = psl2z();
        assert_eq!(d.genus, 0);
        assert_eq!(d.cusps.len(), 1);
        let orders: Vec<u32> = d.elliptic.iter().map(|e| e.order).collect();
        assert_eq!(orders, vec![3, 2, 3]);
        assert!(d.is_modular_group());
        let g = genus2();
        assert!(g.is_cocompact());
        assert!(!g.is_modular_group());
    }

    #[test]
    fn load_rejects_bad_input() {
        let order_one = PSL2Z_JSON.replacen("\"order\": 2", "\"order\": 1", 1);
        assert!(matches!(load_domain_str(&order_one), Err(Error::Load(_))));
        let bad_det = PSL2Z_JSON.replace("[[1.0, 0.0], [0.0, 1.0]]", "[[2.0, 0.0], [0.0, 1.0]]");
        assert!(matches!(load_domain_str(&bad_det), Err(Error::Load(_))));
        let sphere = r#"{"genus": 0}"#;
        assert!(matches!(load_domain_str(sphere), Err(Error::Load(_))));
        let parabolic = r#"{"genus": 2, "min_hyperbolic_trace": 2.0}"#;
        assert!(matches!(load_domain_str(parabolic), Err(Error::Load(_))));
        assert!(matches!(load_domain("/nonexistent/domain.json"), Err(Error::Load(_))));
    }

    #[test]
    fn json_round_trip() {
        let d = psl2z();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(load_domain_str(&text).unwrap(), d);
    }

    #[test]
    fn covolumes() {
        assert_relative_eq!(psl2z().covolume(), PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(genus2().covolume(), 4.0 * PI, max_relative = 1e-14);
        let torus = load_domain_str(r#"{"genus": 1, "cusps": [{"label": "a", "scaling_map": [[1,0],[0,1]]}]}"#).unwrap();
        assert_relative_eq!(torus.covolume(), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn dimensions() {
        let d = psl2z();
        assert_eq!(d.dimension_d2k(6).unwrap(), 1);
        assert_eq!(d.dimension_d2k(2).unwrap(), 0);
        assert_eq!(d.dimension_d2k(7).unwrap(), 0);
        // dim S_24 = 2
        assert_eq!(d.dimension_d2k(12).unwrap(), 2);
        assert_eq!(genus2().dimension_d2k(2).unwrap(), 3);
        assert!(matches!(d.dimension_d2k(1), Err(Error::UnsupportedWeight(1))));
    }

    #[test]
    fn classification() {
        let d = psl2z();
        assert_eq!(d.classify(y_main(), UhpPoint::i()).unwrap(), RegionTag::Compact);
        assert_eq!(d.classify(y_main(), UhpPoint::at(0.0, 5.0)).unwrap(), RegionTag::Cusp(0));
        assert!(matches!(d.classify(y_main(), UhpPoint::at(0.0, 0.5)), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn systole_and_angles() {
        let d = psl2z();
        assert_relative_eq!(d.shortest_geodesic_length().unwrap(), 1.9248473002384139, max_relative = 1e-13);
        assert!(matches!(geodesic_length_from_trace(2.0), Err(Error::NotHyperbolic(_))));
        assert_relative_eq!(geodesic_length_from_trace(2.5).unwrap(), 2.0 * 1.25f64.acosh());
        assert_relative_eq!(d.theta_gamma().unwrap(), 2.0 * PI / 3.0);
        assert_eq!(d.elliptic_excess(), 5);
        assert!(genus2().theta_gamma().is_none());
    }

    #[test]
    fn diameters() {
        let d = psl2z();
        let a = 3f64.sqrt() / 2.0;
        let want = |b: f64| (1.0 + (1.0 + (b - a) * (b - a)) / (2.0 * a * a)).acosh();
        assert_relative_eq!(d.diameter_upper_bound(y_main()).unwrap(), want(y_main()), max_relative = 1e-14);
        assert!((d.diameter_upper_bound(y_main()).unwrap() - 2.861).abs() < 1e-3);
        assert!((d.diameter_upper_bound(2.0).unwrap() - 1.577).abs() < 1e-3);
        assert_relative_eq!(d.diameter_upper_bound(a).unwrap(), (1.0 + 1.0 / (2.0 * a * a)).acosh());
        let g = genus2();
        let l = g.shortest_geodesic_length().unwrap();
        assert_relative_eq!(g.diameter_upper_bound(1.0).unwrap(), 8.0 * PI / l);
    }

    #[test]
    fn volumes() {
        let d = psl2z();
        let full = d.volume_region(DomainPart::Full).unwrap();
        assert_relative_eq!(full, d.covolume(), max_relative = 1e-9);
        let v = d.volume_region(DomainPart::Truncated(y_main())).unwrap();
        assert_relative_eq!(v, PI / 3.0 - 1.0 / y_main(), max_relative = 1e-9);
        assert!((v - 0.805136).abs() < 1e-6);
        let v0 = d.volume_region(DomainPart::Truncated(2.0)).unwrap();
        assert!((v0 - 0.547198).abs() < 1e-6);
        assert_relative_eq!(genus2().volume_region(DomainPart::Full).unwrap(), 4.0 * PI);
    }

    #[test]
    fn cusp_chart_heights() {
        let d = psl2z();
        let r = d.decomposition(y_main()).unwrap();
        assert!((r.m_y - 3f64.sqrt() / 2.0).abs() < 1e-8);
        assert!(r.m_y < 3f64.sqrt() / 2.0);
        assert_eq!(r.big_m_y, y_main());
        assert!(genus2().decomposition(2.0).is_err());
    }

    #[test]
    fn decomposition_with_finite_cusp() {
        // Same modular domain seen through z ↦ −1/z: the cusp sits at 0.
        let mut d = psl2z();
        d.cusps[0].scaling_map = MoebiusMap::inversion();
        d.region = Some(vec![
            Constraint::OutsideDisk { center: [-1.0, 0.0], radius: 1.0 },
            Constraint::OutsideDisk { center: [1.0, 0.0], radius: 1.0 },
            Constraint::InsideDisk { center: [0.0, 0.0], radius: 1.0 },
        ]);
        d.boundary = vec![
            GeodesicSegment::Arc { center: 1.0, radius: 1.0, theta_min: 2.0 * PI / 3.0, theta_max: PI },
            GeodesicSegment::Arc { center: 0.0, radius: 1.0, theta_min: PI / 3.0, theta_max: 2.0 * PI / 3.0 },
            GeodesicSegment::Arc { center: -1.0, radius: 1.0, theta_min: 0.0, theta_max: PI / 3.0 },
        ];
        d.bounding_rect = None;
        d.validate().unwrap();
        let v = d.volume_region(DomainPart::Truncated(2.0)).unwrap();
        assert_relative_eq!(v, PI / 3.0 - 0.5, max_relative = 1e-8);
        let r = d.decomposition(2.0).unwrap();
        assert!((r.m_y - 3f64.sqrt() / 2.0).abs() < 1e-6, "{}", r.m_y);
    }
}
