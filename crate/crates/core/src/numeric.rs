//! One-dimensional numerics: polynomial arithmetic and real-root isolation,
//! bisection, and golden-section search.

/// Evaluate `Σ c[k]·s^k` by Horner's rule.
pub fn poly_eval(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * s + ck)
}

pub fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

pub fn poly_trim(c: &[f64]) -> Vec<f64> {
    let mut v = c.to_vec();
    while v.last() == Some(&0.0) {
        v.pop();
    }
    v
}

pub fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0))
        .collect()
}

/// Coefficients of `s ↦ p(s - a)`.
pub fn poly_shift(c: &[f64], a: f64) -> Vec<f64> {
    let mut q: Vec<f64> = Vec::with_capacity(c.len());
    for &ck in c.iter().rev() {
        // q <- q * (s - a) + ck
        let mut next = vec![0.0; q.len() + 1];
        for (i, &qi) in q.iter().enumerate() {
            next[i + 1] += qi;
            next[i] -= a * qi;
        }
        next[0] += ck;
        q = next;
    }
    q
}

/// Magnitude scale `Σ |c[k]|·|s|^k` used for relative zero tests.
fn poly_scale(c: &[f64], s: f64) -> f64 {
    c.iter()
        .rev()
        .fold(0.0, |acc, &ck| acc * s.abs() + ck.abs())
}

/// Bisection on a sign change of `f` over `[a, b]`, run until the bracket
/// cannot be split in floating point.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    if f(b) == 0.0 {
        return b;
    }
    for _ in 0..1100 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// Real roots of a polynomial in `[lo, hi]`, sorted, including near-double
/// roots at critical points. The zero polynomial yields no roots.
pub fn poly_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = poly_trim(c);
    if c.len() <= 1 || !(lo <= hi) {
        return Vec::new();
    }
    if c.len() == 2 {
        let r = -c[0] / c[1];
        return if r >= lo && r <= hi {
            vec![r]
        } else {
            Vec::new()
        };
    }
    let crit = poly_roots(&poly_deriv(&c), lo, hi);
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(crit.iter().copied());
    knots.push(hi);
    let f = |s: f64| poly_eval(&c, s);
    let mut roots = Vec::new();
    for &k in &knots {
        if f(k).abs() <= 1e-13 * poly_scale(&c, k) {
            roots.push(k);
        }
    }
    for w in knots.windows(2) {
        let (fa, fb) = (f(w[0]), f(w[1]));
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect_root(f, w[0], w[1]));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization on `[a, b]`, iterated until the bracket stalls.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if !(c > a && d < b && c < d) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = (c, fc);
    for s in [a, b, d] {
        let v = f(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    best
}

/// Golden-section search started from every interior local minimum of a
/// uniform grid with `seeds` cells; returns all refined minimizers.
pub fn golden_multistart(f: impl Fn(f64) -> f64, a: f64, b: f64, seeds: usize) -> Vec<(f64, f64)> {
    if !(b > a) {
        return vec![(a, f(a))];
    }
    let h = (b - a) / seeds as f64;
    let grid: Vec<(f64, f64)> = (0..=seeds)
        .map(|k| {
            let s = if k == seeds { b } else { a + h * k as f64 };
            (s, f(s))
        })
        .collect();
    let mut out = Vec::new();
    for k in 0..=seeds {
        let left = if k == 0 { f64::INFINITY } else { grid[k - 1].1 };
        let right = if k == seeds {
            f64::INFINITY
        } else {
            grid[k + 1].1
        };
        if grid[k].1 <= left && grid[k].1 <= right {
            let lo = grid[k.saturating_sub(1)].0;
            let hi = grid[(k + 1).min(seeds)].0;
            out.push(golden_min(&f, lo, hi));
        }
    }
    out
}

/// Roots on `[a, b]` of a function that is convex or concave there: split at
/// the extremum and bisect each monotone piece. The extremum is also reported
/// when it is (numerically) a double root.
pub fn convex_piece_roots(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Vec<f64> {
    if !(b > a) {
        return Vec::new();
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let chord = 0.5 * (fa + fb);
    let convex = f(m) <= chord;
    let (e, fe) = if convex {
        golden_min(&f, a, b)
    } else {
        let (s, v) = golden_min(|s| -f(s), a, b);
        (s, -v)
    };
    let mut out = Vec::new();
    let scale = fa.abs().max(fb.abs()).max(1.0);
    if fe.abs() <= 1e-13 * scale {
        out.push(e);
    }
    for (lo, hi, flo, fhi) in [(a, e, fa, fe), (e, b, fe, fb)] {
        if flo == 0.0 {
            out.push(lo);
        } else if fhi != 0.0 && (flo < 0.0) != (fhi < 0.0) {
            out.push(bisect_root(&f, lo, hi));
        }
    }
    if fb == 0.0 {
        out.push(b);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Sign-change roots and near-tangencies of an arbitrary continuous function,
/// located by a uniform scan with `cells` cells followed by bisection.
pub fn scan_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> Vec<f64> {
    if !(b > a) {
        return Vec::new();
    }
    let h = (b - a) / cells as f64;
    let xs: Vec<f64> = (0..=cells)
        .map(|k| if k == cells { b } else { a + h * k as f64 })
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&s| f(s)).collect();
    let mut out = Vec::new();
    for k in 0..cells {
        if fs[k] == 0.0 {
            out.push(xs[k]);
        } else if fs[k + 1] != 0.0 && (fs[k] < 0.0) != (fs[k + 1] < 0.0) {
            out.push(bisect_root(&f, xs[k], xs[k + 1]));
        }
    }
    if fs[cells] == 0.0 {
        out.push(b);
    }
    for k in 1..cells {
        let v = fs[k].abs();
        if v <= fs[k - 1].abs() && v <= fs[k + 1].abs() && (fs[k - 1] < 0.0) == (fs[k + 1] < 0.0) {
            let (s, m) = golden_min(|s| f(s).abs(), xs[k - 1], xs[k + 1]);
            if m <= 1e-12 * (1.0 + s.abs()) {
                out.push(s);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_shift() {
        let c = [1.0, -3.0, 0.0, 2.0];
        assert_eq!(poly_eval(&c, 2.0), 1.0 - 6.0 + 16.0);
        let shifted = poly_shift(&c, 0.5);
        for s in [-1.0, 0.0, 0.3, 2.0] {
            assert!((poly_eval(&shifted, s) - poly_eval(&c, s - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_of_cubic() {
        // (s - 1)(s + 2)(s - 0.5)
        let c = [1.0, -2.5, 0.5, 1.0];
        let r = poly_roots(&c, -10.0, 10.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-2.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn double_root_reported() {
        let r = poly_roots(&[0.0, 0.0, 1.0], -1.0, 1.0);
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn golden_finds_kink_minimum() {
        let (s, v) = golden_min(|s| (s - 0.3).abs(), -1.0, 2.0);
        assert!((s - 0.3).abs() < 1e-12 && v < 1e-12);
    }

    #[test]
    fn convex_piece_two_roots() {
        let r = convex_piece_roots(|s| s * s - 0.25, -1.0, 1.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] + 0.5).abs() < 1e-15 && (r[1] - 0.5).abs() < 1e-15);
    }
}
