//! Small numeric primitives shared across the crate.
//!
//! Percentiles use linear interpolation between order statistics and
//! standard deviations are population (divide by n) throughout, so every
//! threshold in the pipeline is reproducible from these definitions.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divide by n).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    percentile(xs, 50.0)
}

/// Percentile in [0, 100] with linear interpolation between order
/// statistics. NaN entries are excluded before sorting.
pub fn percentile(xs: &[f64], q: f64) -> f64 {
    let mut sorted: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    if sorted.is_empty() {
        return f64::NAN;
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = q.clamp(0.0, 100.0);
    let pos = (sorted.len() - 1) as f64 * q / 100.0;
    let lower = pos.floor() as usize;
    let upper = pos.ceil() as usize;
    if lower == upper {
        sorted[lower]
    } else {
        let frac = pos - lower as f64;
        sorted[lower] + frac * (sorted[upper] - sorted[lower])
    }
}

/// Mean over the non-NaN entries; NaN when all entries are NaN.
pub fn nan_mean(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &x in xs {
        if !x.is_nan() {
            sum += x;
            count += 1;
        }
    }
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// Pearson correlation coefficient; NaN when either input has zero
/// variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return f64::NAN;
    }
    let ma = mean(a);
    let mb = mean(b);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for i in 0..n {
        let da = a[i] - ma;
        let db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if va == 0.0 || vb == 0.0 {
        return f64::NAN;
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Rank transform with average ranks for ties (1-based ranks).
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // Positions i..=j share the same value; average their 1-based ranks.
        let avg = (i + j + 2) as f64 / 2.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    pearson(&average_ranks(a), &average_ranks(b))
}

/// Ordinary least squares y = intercept + slope * x.
/// Returns (slope, intercept, r_squared); r_squared is NaN when y is
/// constant.
pub fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..x.len() {
        let dx = x[i] - mx;
        sxx += dx * dx;
        sxy += dx * (y[i] - my);
    }
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..x.len() {
        let fit = intercept + slope * x[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    let r2 = if ss_tot == 0.0 {
        f64::NAN
    } else {
        1.0 - ss_res / ss_tot
    };
    let _ = n;
    (slope, intercept, r2)
}

/// Least-squares polynomial fit of the given degree. The abscissa is
/// rescaled to [-1, 1] internally for conditioning; the returned closure
/// evaluates the fitted polynomial at raw x.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> impl Fn(f64) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    debug_assert!(x.len() > degree);
    let x_min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let scale = move |v: f64| 2.0 * (v - x_min) / span - 1.0;

    let k = degree + 1;
    // Normal equations on the scaled abscissa.
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for (xi, yi) in x.iter().zip(y) {
        let t = scale(*xi);
        let mut pow = vec![1.0; k];
        for d in 1..k {
            pow[d] = pow[d - 1] * t;
        }
        for r in 0..k {
            atb[r] += pow[r] * yi;
            for c in 0..k {
                ata[r][c] += pow[r] * pow[c];
            }
        }
    }
    let coeffs = solve_linear(&mut ata, &mut atb);
    move |v: f64| {
        let t = scale(v);
        let mut acc = 0.0;
        let mut pow = 1.0;
        for c in &coeffs {
            acc += c * pow;
            pow *= t;
        }
        acc
    }
}

/// Gaussian elimination with partial pivoting; consumes its arguments.
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        if diag == 0.0 {
            continue;
        }
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            for (cell, &p) in a[row][col..n].iter_mut().zip(&pivot_row[col..n]) {
                *cell -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = if a[row][row] == 0.0 {
            0.0
        } else {
            acc / a[row][row]
        };
    }
    x
}

/// Golden-section search for the minimum of `f` on [lo, hi].
pub fn golden_section_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..100 {
        if hi - lo < 1e-6 {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}
