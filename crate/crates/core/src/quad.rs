//! Fixed-order quadrature rules and small fitting helpers.

/// 8-point Gauss–Legendre nodes on `[-1, 1]`.
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Nodes and weights of the 8-point rule mapped to `[a, b]`.
pub fn gauss_legendre(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL8_X
        .iter()
        .zip(GL8_W.iter())
        .map(move |(&x, &w)| (mid + half * x, half * w))
}

/// Radial nodes on `(0, r]` graded geometrically toward zero: `levels`
/// dyadic panels plus a final panel touching the origin.
pub fn graded_radial_nodes(r: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(8 * (levels + 1));
    let mut hi = r;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        out.extend(gauss_legendre(lo, hi));
        hi = lo;
    }
    out.extend(gauss_legendre(0.0, hi));
    out
}

/// Least-squares line `y = slope x + intercept`; returns `(slope, intercept, r2)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}
