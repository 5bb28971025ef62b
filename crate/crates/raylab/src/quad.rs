//! Gauss–Kronrod quadrature on panels.

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate on `[a, b]` and its difference from the
/// embedded 7-point Gauss rule.
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Fixed composite rule: `panels` equal Kronrod panels.
pub fn composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels).map(|i| gk15(f, a + i as f64 * w, a + (i + 1) as f64 * w).0).sum()
}

/// Adaptive bisection until each panel's error estimate falls below its
/// share of `tol`. Panels are split first at the given breakpoints.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|x| *x > a && *x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let width = b - a;
    cuts.windows(2).map(|w| refine(f, w[0], w[1], tol * (w[1] - w[0]) / width, 0)).sum()
}

fn refine(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (v, e) = gk15(f, a, b);
    if e <= tol.max(1e-15 * v.abs()) || depth >= 40 {
        return v;
    }
    let m = 0.5 * (a + b);
    refine(f, a, m, 0.5 * tol, depth + 1) + refine(f, m, b, 0.5 * tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_exact() {
        let (v, _) = gk15(&|x: f64| x.powi(10), -1.0, 1.0);
        assert!((v - 2.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn kinked_integrand() {
        let f = |x: f64| (x - 0.3).abs();
        let exact = 0.5 * (0.09 + 0.49);
        assert!((adaptive(&f, 0.0, 1.0, &[0.3], 1e-12) - exact).abs() < 1e-14);
        assert!((adaptive(&f, 0.0, 1.0, &[], 1e-10) - exact).abs() < 1e-9);
        assert!((composite(&|x: f64| x.exp(), 0.0, 1.0, 4) - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
