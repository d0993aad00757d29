//! Helpers shared by the integration tests: an adaptive Gauss-Kronrod
//! integrator over `(0, inf)` and the standard parameter grid.

#![allow(dead_code)]

use weighted_expfam::family::{log_density, FamilySpec, Params};

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

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive 15-point Gauss-Kronrod on `[a, b]`: keeps splitting
/// the interval with the largest error estimate until the summed estimate
/// drops below `max(tol, tol * |integral|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_INTERVALS: usize = 5000;
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol * total.abs().max(1.0) || parts.len() >= MAX_INTERVALS {
            return total;
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// `int_0^inf g(x) dx` through `x = exp(t)`, `t = center + width u / (1 - u^2)`.
pub fn integrate_positive<F: Fn(f64) -> f64>(g: F, center: f64, width: f64, tol: f64) -> f64 {
    let mapped = |u: f64| {
        let d = 1.0 - u * u;
        let t = center + width * u / d;
        let x = t.exp();
        if !(x > 0.0 && x.is_finite()) {
            return 0.0;
        }
        let v = g(x) * x * width * (1.0 + u * u) / (d * d);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(&mapped, -1.0, 1.0, tol)
}

/// Where the mass of `(spec, params)` sits on the log scale, and how wide it is.
pub fn log_scale(spec: FamilySpec, params: Params) -> (f64, f64) {
    let center = params.sigma().ln() / spec.s();
    let width = (1.0f64).max(1.0 / params.mu()) / spec.s().abs();
    (center, width)
}

/// `E[g(X)]` by quadrature against the density.
pub fn expect<G: Fn(f64) -> f64>(spec: FamilySpec, params: Params, g: G) -> f64 {
    let (c, w) = log_scale(spec, params);
    integrate_positive(
        |x| {
            let ld = log_density(spec, params, x).unwrap_or(f64::NEG_INFINITY);
            if ld == f64::NEG_INFINITY {
                0.0
            } else {
                g(x) * ld.exp()
            }
        },
        c,
        w,
        1e-14,
    )
}

pub const S_GRID: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
pub const DELTA_GRID: [u8; 2] = [0, 1];
pub const MU_GRID: [f64; 4] = [0.5, 1.0, 3.0, 9.0];
pub const SIGMA_GRID: [f64; 3] = [0.25, 1.0, 4.0];

/// The 96-point test grid.
pub fn grid() -> Vec<(FamilySpec, Params)> {
    let mut out = Vec::new();
    for s in S_GRID {
        for d in DELTA_GRID {
            for mu in MU_GRID {
                for sigma in SIGMA_GRID {
                    out.push((FamilySpec::new(s, d).unwrap(), Params::new(mu, sigma).unwrap()));
                }
            }
        }
    }
    out
}

pub fn rel_err(actual: f64, expected: f64) -> f64 {
    ((actual - expected) / expected).abs()
}
