//! Gauss-Legendre rules and a product quadrature on the unit sphere.
//!
//! Integrals are reported against the normalized uniform measure, so the
//! constant function 1 integrates to 1.

use std::f64::consts::{PI, TAU};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Maps a rule on `[-1,1]` to `[a,b]`.
fn mapped<'a>(
    nodes: &'a [f64],
    weights: &'a [f64],
    a: f64,
    b: f64,
) -> impl Iterator<Item = (f64, f64)> + 'a {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    nodes
        .iter()
        .zip(weights)
        .map(move |(x, w)| (mid + half * x, half * w))
}

/// Product rule on the sphere: Gauss-Legendre in the polar direction with
/// `level` nodes, uniform trapezoid with `2 * level` nodes in azimuth.
///
/// Without cuts the rule is exact for polynomials in `(x, y, z)` of total
/// degree up to `2 * level - 1`. With cuts (planes through the origin across
/// which the integrand may jump), the frame is rotated so that every cut
/// contains the polar axis, each azimuthal arc between cuts gets its own
/// Gauss-Legendre rule, and the polar integral is taken in the angle rather
/// than its cosine. Cut normals that are not coplanar fall back to `level`
/// polar panels with per-latitude arc splitting, which is accurate but no
/// longer exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereQuadrature {
    pub level: usize,
}

impl SphereQuadrature {
    pub fn new(level: usize) -> Self {
        assert!(level >= 1);
        Self { level }
    }

    /// Nodes and weights of the plain product rule (weights sum to 1).
    pub fn nodes(&self) -> Vec<([f64; 3], f64)> {
        let (t, w) = gauss_legendre(self.level);
        let m = 2 * self.level;
        let mut out = Vec::with_capacity(self.level * m);
        for (ct, wt) in t.iter().zip(&w) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..m {
                let b = TAU * k as f64 / m as f64;
                out.push(([st * b.cos(), st * b.sin(), *ct], wt / (2.0 * m as f64)));
            }
        }
        out
    }

    /// Mean of `f` over the sphere. `cuts` lists normals of planes where `f`
    /// may be discontinuous; `kink`, when given, is a function whose sign
    /// changes mark further break lines (assumed to be great circles through
    /// the rotated poles).
    pub fn integrate(
        &self,
        f: &dyn Fn(&[f64; 3]) -> f64,
        cuts: &[[f64; 3]],
        kink: Option<&dyn Fn(&[f64; 3]) -> f64>,
    ) -> f64 {
        let cuts: Vec<[f64; 3]> = cuts.iter().filter_map(|n| unit(*n)).collect();
        if cuts.is_empty() && kink.is_none() {
            return self.nodes().iter().map(|(p, w)| w * f(p)).sum();
        }
        let (axis, coplanar) = polar_axis(&cuts);
        let (u, v) = frame(&axis);
        let (gx, gw) = gauss_legendre(self.level);
        let polar: Vec<(f64, f64)> = if coplanar {
            mapped(&gx, &gw, 0.0, PI).collect()
        } else {
            // split where a cut circle becomes tangent to a latitude, and
            // smooth the square-root behaviour there with a cubic map
            let mut edges = vec![0.0, PI];
            for n in &cuts {
                let alpha = dot(n, &axis).clamp(-1.0, 1.0).acos();
                edges.push((PI / 2.0 - alpha).abs());
                edges.push(PI / 2.0 + alpha.min(PI - alpha));
            }
            edges.sort_by(f64::total_cmp);
            edges.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
            let mut pts = Vec::new();
            for w in edges.windows(2) {
                let sub = 4;
                for j in 0..sub {
                    let a = w[0] + (w[1] - w[0]) * j as f64 / sub as f64;
                    let b = w[0] + (w[1] - w[0]) * (j + 1) as f64 / sub as f64;
                    for (s, ws) in mapped(&gx, &gw, 0.0, 1.0) {
                        let theta = a + (b - a) * s * s * (3.0 - 2.0 * s);
                        pts.push((theta, ws * (b - a) * 6.0 * s * (1.0 - s)));
                    }
                }
            }
            pts
        };
        let mut total = 0.0;
        for &(theta, wt) in &polar {
            {
                let (st, ct) = theta.sin_cos();
                let point = |beta: f64| {
                    let (sb, cb) = beta.sin_cos();
                    let mut x = [0.0; 3];
                    for i in 0..3 {
                        x[i] = st * (cb * u[i] + sb * v[i]) + ct * axis[i];
                    }
                    x
                };
                let mut breaks = Vec::new();
                for n in &cuts {
                    let (na, nb, nc) = (st * dot(n, &u), st * dot(n, &v), ct * dot(n, &axis));
                    let r = na.hypot(nb);
                    if r > 1e-300 && nc.abs() < r {
                        let b0 = nb.atan2(na);
                        let d = (-nc / r).acos();
                        breaks.push((b0 + d).rem_euclid(TAU));
                        breaks.push((b0 - d).rem_euclid(TAU));
                    }
                }
                if let Some(k) = kink {
                    breaks.extend(sign_changes(
                        &|beta| k(&point(beta)),
                        &breaks,
                        8 * self.level,
                    ));
                }
                breaks.sort_by(f64::total_cmp);
                breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
                let ring: f64 = if breaks.is_empty() {
                    let m = 2 * self.level;
                    (0..m)
                        .map(|k| f(&point(TAU * k as f64 / m as f64)) * TAU / m as f64)
                        .sum()
                } else {
                    let mut s = 0.0;
                    for (i, &lo) in breaks.iter().enumerate() {
                        let hi = if i + 1 < breaks.len() {
                            breaks[i + 1]
                        } else {
                            breaks[0] + TAU
                        };
                        s += mapped(&gx, &gw, lo, hi)
                            .map(|(beta, wb)| wb * f(&point(beta)))
                            .sum::<f64>();
                    }
                    s
                };
                total += wt * st * ring;
            }
        }
        total / (4.0 * PI)
    }
}

/// Zero crossings of `g` on the circle, refined by bisection.
fn sign_changes(g: &dyn Fn(f64) -> f64, existing: &[f64], samples: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..samples)
        .map(|k| TAU * k as f64 / samples as f64)
        .collect();
    // nudge grid off existing breaks so a jump is not mistaken for a root
    grid.extend(existing.iter().map(|b| b + 1e-9));
    grid.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for i in 0..grid.len() {
        let a = grid[i];
        let b = if i + 1 < grid.len() {
            grid[i + 1]
        } else {
            grid[0] + TAU
        };
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            out.push(a.rem_euclid(TAU));
            continue;
        }
        if ga * gb < 0.0 {
            let (mut lo, mut hi, glo) = (a, b, ga);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) * glo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push((0.5 * (lo + hi)).rem_euclid(TAU));
        }
    }
    out
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn unit(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(&a, &a).sqrt();
    (n > 1e-300).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// A polar axis perpendicular to every cut normal when one exists.
fn polar_axis(cuts: &[[f64; 3]]) -> ([f64; 3], bool) {
    let Some(first) = cuts.first() else {
        return ([0.0, 0.0, 1.0], true);
    };
    let mut best: Option<[f64; 3]> = None;
    let mut best_norm = 1e-9;
    for n in &cuts[1..] {
        let c = cross(first, n);
        let cn = dot(&c, &c).sqrt();
        if cn > best_norm {
            best_norm = cn;
            best = unit(c);
        }
    }
    let axis = match best {
        Some(a) => a,
        // all cuts parallel: any perpendicular works
        None => {
            let trial = if first[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            unit(cross(first, &trial)).expect("nonparallel")
        }
    };
    let coplanar = cuts.iter().all(|n| dot(n, &axis).abs() < 1e-12);
    if coplanar {
        (axis, true)
    } else {
        (*first, false)
    }
}

fn frame(w: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let trial = if w[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = unit(cross(&trial, w)).expect("nonparallel");
    let v = cross(w, &u);
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Mean of x^a y^b z^c over the sphere, via the Gamma-function formula.
    fn monomial_mean(a: u32, b: u32, c: u32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        // Gamma at half-integers: G(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
        fn g_half(m: u32) -> f64 {
            // Gamma(m / 2) for odd or even m >= 1
            if m % 2 == 0 {
                (1..m / 2).map(f64::from).product()
            } else {
                let k = (m - 1) / 2;
                let mut v = PI.sqrt();
                for j in 0..k {
                    v *= f64::from(j) + 0.5;
                }
                v
            }
        }
        2.0 * g_half(a + 1) * g_half(b + 1) * g_half(c + 1) / g_half(a + b + c + 3) / (4.0 * PI)
    }

    #[test]
    fn legendre_rule_is_exact() {
        let (x, w) = gauss_legendre(9);
        for k in 0..18 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 1 {
                0.0
            } else {
                2.0 / f64::from(k as u32 + 1)
            };
            assert!((got - want).abs() < 1e-14, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn sphere_polynomials_exact_to_level() {
        let level = 17u32;
        let q = SphereQuadrature::new(level as usize);
        for a in 0..=level {
            for b in 0..=level - a {
                for c in 0..=level - a - b {
                    let f = |p: &[f64; 3]| {
                        p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                    };
                    let got = q.integrate(&f, &[], None);
                    let want = monomial_mean(a, b, c);
                    assert!((got - want).abs() < 1e-10, "({a},{b},{c}): {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn hemisphere_cut_areas() {
        let q = SphereQuadrature::new(17);
        let n = [0.3, -0.4, 0.866];
        let ind = |p: &[f64; 3]| if dot(p, &n) > 0.0 { 1.0 } else { 0.0 };
        assert!((q.integrate(&ind, &[n], None) - 0.5).abs() < 1e-12);
        // lune between two hemispheres with angle alpha has area fraction (pi - alpha) / (2 pi)
        let m = [1.0, 0.0, 0.0];
        let alpha = dot(&unit(n).unwrap(), &m).acos();
        let lune = |p: &[f64; 3]| {
            if dot(p, &n) > 0.0 && dot(p, &m) > 0.0 {
                1.0
            } else {
                0.0
            }
        };
        let want = (PI - alpha) / TAU;
        assert!((q.integrate(&lune, &[n, m], None) - want).abs() < 1e-12);
    }

    #[test]
    fn non_coplanar_cuts_fall_back() {
        let q = SphereQuadrature::new(17);
        // octant: three mutually orthogonal cuts, area 1/8
        let oct = |p: &[f64; 3]| if p.iter().all(|&x| x > 0.0) { 1.0 } else { 0.0 };
        let got = q.integrate(
            &oct,
            &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            None,
        );
        assert!((got - 0.125).abs() < 1e-6, "{got}");
    }

    #[test]
    fn kinks_are_split() {
        let q = SphereQuadrature::new(17);
        // mean of | |z| - |x| | = sqrt 2 - 1
        let f = |p: &[f64; 3]| (p[2].abs() - p[0].abs()).abs();
        let k = |p: &[f64; 3]| p[2].abs() - p[0].abs();
        let cuts = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        let got = q.integrate(&f, &cuts, Some(&k));
        assert!((got - (2f64.sqrt() - 1.0)).abs() < 1e-12, "{got}");
    }
}
