//! Center-aligned resampling of row-major planes.
//!
//! Output sample `k` of an `m`-sample axis reads the source at
//! `(k + 0.5) * n / m - 0.5`, so every routine here commutes with mirroring.

/// Bilinear interpolation, clamped at the borders.
pub fn resize_bilinear(src: &[f64], w: usize, h: usize, nw: usize, nh: usize) -> Vec<f64> {
    debug_assert_eq!(src.len(), w * h);
    if nw == w && nh == h {
        return src.to_vec();
    }
    let xs = axis_taps(w, nw);
    let ys = axis_taps(h, nh);

    // horizontal pass
    let mut tmp = vec![0.0; nw * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let out = &mut tmp[y * nw..(y + 1) * nw];
        for (o, &(i0, i1, f)) in out.iter_mut().zip(&xs) {
            *o = lerp(row[i0], row[i1], f);
        }
    }
    // vertical pass
    let mut dst = vec![0.0; nw * nh];
    for (y, &(j0, j1, f)) in ys.iter().enumerate() {
        let (r0, r1) = (&tmp[j0 * nw..(j0 + 1) * nw], &tmp[j1 * nw..(j1 + 1) * nw]);
        for x in 0..nw {
            dst[y * nw + x] = lerp(r0[x], r1[x], f);
        }
    }
    dst
}

#[inline]
fn lerp(a: f64, b: f64, f: f64) -> f64 {
    if f == 0.0 {
        a
    } else {
        a + (b - a) * f
    }
}

fn axis_taps(n: usize, m: usize) -> Vec<(usize, usize, f64)> {
    let scale = n as f64 / m as f64;
    (0..m)
        .map(|k| {
            let pos = ((k as f64 + 0.5) * scale - 0.5).clamp(0.0, (n - 1) as f64);
            let i0 = pos.floor() as usize;
            let i1 = (i0 + 1).min(n - 1);
            (i0, i1, pos - i0 as f64)
        })
        .collect()
}

/// Box-filter resampling with exact fractional pixel coverage. Intended for
/// shrinking; each output value is the area-weighted mean of the source
/// pixels its footprint covers.
pub fn resize_area(src: &[f64], w: usize, h: usize, nw: usize, nh: usize) -> Vec<f64> {
    debug_assert_eq!(src.len(), w * h);
    let xs = area_weights(w, nw);
    let ys = area_weights(h, nh);

    let mut tmp = vec![0.0; nw * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for (x, taps) in xs.iter().enumerate() {
            tmp[y * nw + x] = taps.iter().map(|&(i, wt)| row[i] * wt).sum();
        }
    }
    let mut dst = vec![0.0; nw * nh];
    for (y, taps) in ys.iter().enumerate() {
        for x in 0..nw {
            dst[y * nw + x] = taps.iter().map(|&(j, wt)| tmp[j * nw + x] * wt).sum();
        }
    }
    dst
}

fn area_weights(n: usize, m: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = n as f64 / m as f64;
    (0..m)
        .map(|k| {
            let lo = k as f64 * scale;
            let hi = (k + 1) as f64 * scale;
            let mut taps = Vec::new();
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(n);
            for i in first..last {
                let cover = (hi.min((i + 1) as f64) - lo.max(i as f64)).max(0.0);
                if cover > 0.0 {
                    taps.push((i, cover / scale));
                }
            }
            taps
        })
        .collect()
}
