//! Cylindrical and spherical Bessel functions of the first kind, and
//! their zeros.
//!
//! Values come from Miller's downward recurrence: seed two trailing
//! orders high above both the requested order and the argument, recur
//! down (which is stable for J), and fix the overall scale afterwards.
//! The cylindrical sequence is normalized through
//! J_0 + 2 J_2 + 2 J_4 + ... = 1; the spherical one against the closed
//! forms j_0 = sin(x)/x or j_1, whichever is farther from a node.
//! Zeros are found by unit-step sign scanning (consecutive zeros of
//! these families are always more than one apart) followed by bisection
//! and a safeguarded Newton polish.

use crate::error::{Result, SpectralError};

/// Start order for a downward recurrence that must be accurate at
/// order `m` and argument `x`: past the turning point by a dozen
/// Airy widths, which suppresses the seed contamination below 1e-16.
fn start_order(m: usize, x: f64) -> usize {
    let base = (m as f64).max(x);
    (base + 12.0 * base.cbrt() + 20.0) as usize
}

const RESCALE_LIMIT: f64 = 1e250;
const SEED: f64 = 1e-250;

// ---------------------------------------------------------------------------
// Cylindrical J_m
// ---------------------------------------------------------------------------

/// J_0(x), J_1(x), ..., J_{m_max}(x) for x > 0.
pub fn bessel_j_sequence(m_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let mut out = vec![0.0; m_max + 1];
    let mut norm = 0.0;
    let mut f_next = 0.0;
    let mut f = SEED;
    let mut k = start_order(m_max, x);
    loop {
        if k % 2 == 0 {
            norm += if k == 0 { f } else { 2.0 * f };
        }
        if k <= m_max {
            out[k] = f;
        }
        if k == 0 {
            break;
        }
        let f_prev = (2.0 * k as f64 / x) * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if f.abs() > RESCALE_LIMIT {
            f *= SEED;
            f_next *= SEED;
            norm *= SEED;
            for v in &mut out {
                *v *= SEED;
            }
        }
    }
    for v in &mut out {
        *v /= norm;
    }
    out
}

pub fn bessel_j(m: usize, x: f64) -> f64 {
    bessel_j_with_derivative(m, x).0
}

/// (J_m(x), J_m'(x)) without allocating the whole sequence.
/// J_m' = J_{m-1} - (m/x) J_m, with J_0' = -J_1.
pub fn bessel_j_with_derivative(m: usize, x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    let mut norm = 0.0;
    let mut want = [0.0f64; 2]; // values at orders m and m.max(1) - 1
    let lower = m.saturating_sub(1);
    let upper = m.max(1);
    let mut f_next = 0.0;
    let mut f = SEED;
    let mut k = start_order(upper, x);
    loop {
        if k % 2 == 0 {
            norm += if k == 0 { f } else { 2.0 * f };
        }
        if k == upper {
            want[1] = f;
        }
        if k == lower {
            want[0] = f;
        }
        if k == 0 {
            break;
        }
        let f_prev = (2.0 * k as f64 / x) * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if f.abs() > RESCALE_LIMIT {
            f *= SEED;
            f_next *= SEED;
            norm *= SEED;
            want[0] *= SEED;
            want[1] *= SEED;
        }
    }
    if m == 0 {
        // want[0] = J_0, want[1] = J_1
        (want[0] / norm, -want[1] / norm)
    } else {
        let jm = want[1] / norm;
        let jm1 = want[0] / norm;
        (jm, jm1 - (m as f64 / x) * jm)
    }
}

// ---------------------------------------------------------------------------
// Spherical j_l
// ---------------------------------------------------------------------------

fn spherical_j0(x: f64) -> f64 {
    x.sin() / x
}

fn spherical_j1(x: f64) -> f64 {
    x.sin() / (x * x) - x.cos() / x
}

/// j_0(x), ..., j_{l_max}(x) for x > 0.
pub fn spherical_j_sequence(l_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let top = l_max.max(1);
    let mut out = vec![0.0; top + 1];
    let mut f_next = 0.0;
    let mut f = SEED;
    let mut k = start_order(top, x);
    loop {
        if k <= top {
            out[k] = f;
        }
        if k == 0 {
            break;
        }
        let f_prev = ((2 * k + 1) as f64 / x) * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if f.abs() > RESCALE_LIMIT {
            f *= SEED;
            f_next *= SEED;
            for v in &mut out {
                *v *= SEED;
            }
        }
    }
    // Normalize against whichever closed form is farther from a node;
    // j_0 and j_1 have no common zeros, so one of them is always safe.
    let e0 = spherical_j0(x);
    let e1 = spherical_j1(x);
    let scale = if e0.abs() >= e1.abs() {
        e0 / out[0]
    } else {
        e1 / out[1]
    };
    for v in &mut out {
        *v *= scale;
    }
    out.truncate(l_max + 1);
    out
}

pub fn spherical_j(l: usize, x: f64) -> f64 {
    spherical_j_sequence(l, x)[l]
}

/// (j_l(x), j_l'(x)). j_l' = j_{l-1} - ((l+1)/x) j_l, with j_0' = -j_1.
pub fn spherical_j_with_derivative(l: usize, x: f64) -> (f64, f64) {
    let seq = spherical_j_sequence(l.max(1), x);
    if l == 0 {
        (seq[0], -seq[1])
    } else {
        (seq[l], seq[l - 1] - ((l + 1) as f64 / x) * seq[l])
    }
}

// ---------------------------------------------------------------------------
// Zero finding
// ---------------------------------------------------------------------------

/// Refines a sign-change bracket to a relative width of a few 1e-14:
/// bisection down to 1e-10 relative, then safeguarded Newton.
fn refine_zero<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (orig_a, orig_b) = (a, b);
    for _ in 0..80 {
        if b - a <= 1e-10 * b.abs() {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // interval already at floating-point resolution
        }
        let (fm, _) = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..12 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if dfx == 0.0 {
            break;
        }
        let step = fx / dfx;
        let next = x - step;
        if !(a..=b).contains(&next) {
            break; // Newton left the certified bracket; bisection result stands
        }
        if step.abs() <= 1e-14 * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    if b - a <= 1e-12 * b.abs() {
        return Ok(x);
    }
    let (f_lo, _) = f(orig_a);
    let (f_hi, _) = f(orig_b);
    Err(SpectralError::RootFind {
        lo: orig_a,
        hi: orig_b,
        f_lo,
        f_hi,
        context: "zero refinement stalled".into(),
    })
}

/// All zeros of `f` in (start, stop], scanned with unit steps. The
/// caller must guarantee consecutive zeros are separated by more than
/// the step, which holds for Bessel functions of fixed order (spacing
/// at least ~3).
fn scan_zeros<F>(f: &F, start: f64, stop: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> (f64, f64),
{
    let mut zeros = Vec::new();
    if stop <= start {
        return Ok(zeros);
    }
    let mut x_prev = start;
    let (mut f_prev, _) = f(start);
    let mut x = start + 1.0;
    loop {
        let clamped = x.min(stop);
        let (fx, _) = f(clamped);
        if fx == 0.0 {
            zeros.push(clamped);
        } else if (fx > 0.0) != (f_prev > 0.0) {
            zeros.push(refine_zero(f, x_prev, clamped, f_prev)?);
        }
        if clamped >= stop {
            break;
        }
        x_prev = clamped;
        f_prev = fx;
        x += 1.0;
    }
    Ok(zeros)
}

/// Zeros of J_m in (0, x_max].
pub fn bessel_j_zeros(m: usize, x_max: f64) -> Result<Vec<f64>> {
    // The first zero exceeds the order, so starting the scan at the
    // order (or just above zero for m = 0) cannot skip anything.
    let start = if m == 0 { 0.5 } else { m as f64 };
    scan_zeros(&|x| bessel_j_with_derivative(m, x), start, x_max)
}

/// Zeros of the spherical j_l in (0, x_max].
pub fn spherical_j_zeros(l: usize, x_max: f64) -> Result<Vec<f64>> {
    let start = (l as f64 + 0.5).max(0.5);
    scan_zeros(&|x| spherical_j_with_derivative(l, x), start, x_max)
}
