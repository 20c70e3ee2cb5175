//! Radix-2 FFT over MPFR floats.

use rug::float::Constant;
use rug::{Assign, Float};

/// `e^{2πij/n}` for `j < n/2`, built from one octant by symmetry.
fn twiddles(n: usize, prec: u32) -> (Vec<Float>, Vec<Float>) {
    let half = n / 2;
    let quarter = n / 4;
    let eighth = n / 8;
    let mut cos = vec![Float::new(prec); half];
    let mut sin = vec![Float::new(prec); half];
    if n < 8 {
        // tiny sizes: direct
        for j in 0..half {
            let mut x = Float::with_val(prec + 16, Constant::Pi);
            x *= 2 * j as u64;
            x /= n as u64;
            let mut c = Float::new(prec + 16);
            x.sin_cos_mut(&mut c);
            sin[j].assign(&x);
            cos[j].assign(&c);
        }
        return (cos, sin);
    }
    let pi = Float::with_val(prec + 16, Constant::Pi);
    for j in 0..=eighth {
        let mut x = Float::with_val(prec + 16, &pi * (2 * j as u64));
        x /= n as u64;
        let mut c = Float::new(prec + 16);
        x.sin_cos_mut(&mut c);
        sin[j].assign(&x);
        cos[j].assign(&c);
    }
    // angle π/2 − θ
    for j in eighth + 1..=quarter {
        let k = quarter - j;
        let (c, s) = (sin[k].clone(), cos[k].clone());
        cos[j] = c;
        sin[j] = s;
    }
    // angle π/2 + θ
    for j in quarter + 1..half {
        let k = j - quarter;
        let (c, s) = (-sin[k].clone(), cos[k].clone());
        cos[j] = c;
        sin[j] = s;
    }
    (cos, sin)
}

/// In place `y_j = Σ_k x_k e^{2πijk/n}`; `n` must be a power of two.
///
/// With inputs exact, every output is within `8 n 2^{-prec} Σ|x_k|` of the
/// true value (each stage adds a few roundings of size at most Σ|x_k|, and
/// stage errors at most double per later stage).
pub(crate) fn dft(re: &mut [Float], im: &mut [Float], prec: u32) {
    let n = re.len();
    assert!(n.is_power_of_two() && im.len() == n);
    if n == 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let (cos, sin) = twiddles(n, prec);
    let mut tr = Float::new(prec);
    let mut ti = Float::new(prec);
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let stride = n / size;
        for start in (0..n).step_by(size) {
            for m in 0..half {
                let (a, b) = (start + m, start + m + half);
                let (wr, wi) = (&cos[m * stride], &sin[m * stride]);
                if m == 0 {
                    tr.assign(&re[b]);
                    ti.assign(&im[b]);
                } else {
                    tr.assign(wr * &re[b] - wi * &im[b]);
                    ti.assign(wr * &im[b] + wi * &re[b]);
                }
                let (lo, hi) = re.split_at_mut(b);
                hi[0].assign(&lo[a] - &tr);
                lo[a] += &tr;
                let (lo, hi) = im.split_at_mut(b);
                hi[0].assign(&lo[a] - &ti);
                lo[a] += &ti;
            }
        }
        size *= 2;
    }
}
