//! Golden-section search for unimodal scalar minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimize `f` on `[lo, hi]` with a fixed number of interval reductions.
/// Returns the best evaluated abscissa and its value.
pub fn golden_section_iters(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, iterations: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iterations {
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
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Minimize `f` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn golden_section_tol(f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let width = (hi - lo).max(tol);
    let iterations = ((tol / width).ln() / INV_PHI.ln()).ceil().max(1.0) as usize;
    golden_section_iters(f, lo, hi, iterations)
}
