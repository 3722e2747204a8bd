//! Small least-squares helpers shared by the fitting routines.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
///
/// Returns `None` for fewer than two points or when all `x` coincide.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(LineFit { slope, intercept: my - slope * mx, r_squared })
}

/// Mean and standard error from `n_batches` equal consecutive batches.
pub fn batch_means(values: &[f64], n_batches: usize) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let size = n / n_batches;
    if n_batches < 2 || size == 0 {
        return (mean, 0.0);
    }
    let means: Vec<f64> = values
        .chunks_exact(size)
        .take(n_batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let bm = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
    (mean, (var / means.len() as f64).sqrt())
}
