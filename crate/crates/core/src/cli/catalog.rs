/// One registry row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CatalogEntry {
    pub category: &'static str,
    pub name: &'static str,
    pub summary: &'static str,
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry { category: "coefficient", name: "constant", summary: "mu = k, |k| < 1; solution z + k conj(z)" },
    CatalogEntry { category: "coefficient", name: "radial_stretch", summary: "coefficient of c + (z - c)|z - c|^(K-1)" },
    CatalogEntry { category: "coefficient", name: "radial_profile", summary: "radial map with a monotone (r, rho) table" },
    CatalogEntry { category: "coefficient", name: "angular", summary: "mu = +-k (z - z0)/conj(z - z0); K^T hits 1/K or K" },
    CatalogEntry { category: "coefficient", name: "degenerate_log", summary: "K_mu = 1 + log(1/|z - z0|) near z0, tangential phase" },
    CatalogEntry { category: "phi", name: "exponential Φ", summary: "exp(alpha t)" },
    CatalogEntry { category: "phi", name: "stretched_exponential Φ", summary: "exp(alpha (1 + t)^beta)" },
    CatalogEntry { category: "phi", name: "power Φ", summary: "t^p, p >= 1" },
    CatalogEntry { category: "phi", name: "t_log Φ", summary: "t log^beta(e + t)" },
    CatalogEntry { category: "phi", name: "table Φ", summary: "piecewise power law through (t, Phi) knots" },
    CatalogEntry { category: "domain", name: "disk", summary: "|z - c| < r" },
    CatalogEntry { category: "domain", name: "upper_half_disk", summary: "|z - c| < r, Im(z - c) > 0" },
    CatalogEntry { category: "domain", name: "annulus", summary: "r1 < |z - c| < r2" },
    CatalogEntry { category: "domain", name: "slit_disk", summary: "unit disk minus the segment [x0, x1]" },
    CatalogEntry { category: "domain", name: "rectangle", summary: "open axis-parallel rectangle" },
    CatalogEntry { category: "domain", name: "ellipse", summary: "axis-parallel ellipse" },
    CatalogEntry { category: "domain", name: "square_frame", summary: "open square minus a concentric closed square" },
    CatalogEntry { category: "domain", name: "polygon", summary: "interior of a simple closed polygon" },
    CatalogEntry { category: "domain", name: "plane", summary: "the whole plane (criteria only)" },
];

/// The registry, sorted by category and name.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut v = ENTRIES.to_vec();
    v.sort();
    v
}

/// Printable rows whose text contains `filter` (case-insensitive); an empty
/// filter lists everything.
pub fn list_catalog(filter: Option<&str>) -> Vec<String> {
    let needle = filter.unwrap_or("").to_lowercase();
    catalog()
        .into_iter()
        .map(|e| format!("{:<12} {:<24} {}", e.category, e.name, e.summary))
        .filter(|line| line.to_lowercase().contains(&needle))
        .collect()
}
