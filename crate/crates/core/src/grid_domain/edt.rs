//! Exact squared Euclidean distance transform on integer lattices
//! (Felzenszwalb and Huttenlocher lower-envelope algorithm).

/// Marks "no feature reachable".
pub const INF: i64 = i64::MAX / 4;

/// Squared distance transform over a padded three-axis lattice.
///
/// Returns the squared distance (lattice units) from every site to the
/// nearest feature site and the flat index of one such feature. Ties go to
/// the feature with the smaller coordinate on the last processed axis,
/// so the result is deterministic.
pub fn squared_edt(shape: [usize; 3], is_feature: &[bool]) -> (Vec<i64>, Vec<u32>) {
    let total = shape[0] * shape[1] * shape[2];
    assert_eq!(is_feature.len(), total);
    let mut d: Vec<i64> = is_feature.iter().map(|&f| if f { 0 } else { INF }).collect();
    let mut src: Vec<u32> = (0..total)
        .map(|i| if is_feature[i] { i as u32 } else { u32::MAX })
        .collect();
    let strides = [shape[1] * shape[2], shape[2], 1];
    let maxn = *shape.iter().max().unwrap();
    let mut f = vec![0i64; maxn];
    let mut s = vec![0u32; maxn];
    let mut od = vec![0i64; maxn];
    let mut ov = vec![0usize; maxn];
    let mut v = vec![0usize; maxn];
    let mut z = vec![0f64; maxn + 1];
    for axis in 0..3 {
        let n = shape[axis];
        if n == 1 {
            continue;
        }
        let st = strides[axis];
        // Enumerate line starts: all sites whose coordinate on `axis` is 0.
        for base in 0..total {
            if !(base / st).is_multiple_of(n) {
                continue;
            }
            for q in 0..n {
                f[q] = d[base + q * st];
                s[q] = src[base + q * st];
            }
            dt1d(&f[..n], &mut od[..n], &mut ov[..n], &mut v, &mut z);
            for q in 0..n {
                d[base + q * st] = od[q];
                src[base + q * st] = if od[q] >= INF { u32::MAX } else { s[ov[q]] };
            }
        }
    }
    (d, src)
}

fn dt1d(f: &[i64], out: &mut [i64], arg: &mut [usize], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k: isize = -1;
    for q in 0..n {
        if f[q] >= INF {
            continue;
        }
        if k < 0 {
            k = 0;
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            continue;
        }
        loop {
            let p = v[k as usize];
            let num = (f[q] + (q * q) as i64) - (f[p] + (p * p) as i64);
            let sx = num as f64 / (2 * (q - p)) as f64;
            if sx <= z[k as usize] {
                k -= 1;
                if k < 0 {
                    k = 0;
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
            } else {
                k += 1;
                v[k as usize] = q;
                z[k as usize] = sx;
                z[k as usize + 1] = f64::INFINITY;
                break;
            }
        }
    }
    if k < 0 {
        out.iter_mut().for_each(|x| *x = INF);
        return;
    }
    let mut j = 0usize;
    for q in 0..n {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let dq = q as i64 - p as i64;
        out[q] = dq * dq + f[p];
        arg[q] = p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(shape: [usize; 3], feat: &[bool]) -> Vec<i64> {
        let idx = |i: usize| [i / (shape[1] * shape[2]), (i / shape[2]) % shape[1], i % shape[2]];
        (0..feat.len())
            .map(|i| {
                let a = idx(i);
                (0..feat.len())
                    .filter(|&j| feat[j])
                    .map(|j| {
                        let b = idx(j);
                        (0..3).map(|t| (a[t] as i64 - b[t] as i64).pow(2)).sum::<i64>()
                    })
                    .min()
                    .unwrap_or(INF)
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_on_scattered_features() {
        let shape = [3, 7, 9];
        let feat: Vec<bool> = (0..shape.iter().product::<usize>()).map(|i| (i * 37 + 11) % 17 == 0).collect();
        let (d, src) = squared_edt(shape, &feat);
        assert_eq!(d, brute(shape, &feat));
        for (i, &s) in src.iter().enumerate() {
            assert!(feat[s as usize]);
            let _ = i;
        }
    }

    #[test]
    fn no_features_gives_inf() {
        let (d, _) = squared_edt([1, 2, 3], &[false; 6]);
        assert!(d.iter().all(|&x| x == INF));
    }
}
