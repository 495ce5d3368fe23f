// SPDX-License-Identifier: Apache-2.0

//! Serial brute-force versions of every workload, plus the divergence
//! search used to report the first mismatch.

use serde_json::Value;

use crate::config::{Cmp, LimitKind, Order};

pub fn word_mask(width: u8) -> u64 {
    if width >= 64 {
        !0
    } else {
        (1 << width) - 1
    }
}

/// Two's complement reading of `v` wrapped to `width` bits.
pub fn wrap_signed(v: i64, width: u8) -> i64 {
    let w = v as u64 & word_mask(width);
    if width < 64 && w >> (width - 1) & 1 == 1 {
        (w | !word_mask(width)) as i64
    } else {
        w as i64
    }
}

pub fn holds(cmp: Cmp, a: u64, b: u64) -> bool {
    match cmp {
        Cmp::Lt => a < b,
        Cmp::Gt => a > b,
        Cmp::Le => a <= b,
        Cmp::Ge => a >= b,
        Cmp::Eq => a == b,
        Cmp::Ne => a != b,
    }
}

pub fn sum(values: &[u64], width: u8) -> u64 {
    values.iter().fold(0u64, |a, &v| a.wrapping_add(v)) & word_mask(width)
}

/// Value and lowest address.
pub fn limit(values: &[u64], kind: LimitKind) -> (u64, usize) {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        let better = match kind {
            LimitKind::Max => v > values[best],
            LimitKind::Min => v < values[best],
        };
        if better {
            best = i;
        }
    }
    (values[best], best)
}

pub fn threshold(values: &[u64], value: u64, cmp: Cmp) -> Vec<bool> {
    values.iter().map(|&v| holds(cmp, v, value)).collect()
}

fn lowest_min(sad: &[u64]) -> usize {
    let mut best = 0;
    for (i, &s) in sad.iter().enumerate() {
        if s < sad[best] {
            best = i;
        }
    }
    best
}

pub fn sad_1d(data: &[u64], template: &[u64]) -> (Vec<u64>, usize) {
    let sad: Vec<u64> = (0..=data.len() - template.len())
        .map(|s| {
            template
                .iter()
                .enumerate()
                .map(|(k, &t)| data[s + k].abs_diff(t))
                .sum()
        })
        .collect();
    let best = lowest_min(&sad);
    (sad, best)
}

pub fn sad_2d(
    image: &[u64],
    nx: usize,
    ny: usize,
    t: &[u64],
    mx: usize,
    my: usize,
) -> (Vec<u64>, (usize, usize)) {
    let (px, py) = (nx - mx + 1, ny - my + 1);
    let mut sad = Vec::with_capacity(px * py);
    for oy in 0..py {
        for ox in 0..px {
            let mut s = 0;
            for j in 0..my {
                for i in 0..mx {
                    s += image[(oy + j) * nx + ox + i].abs_diff(t[j * mx + i]);
                }
            }
            sad.push(s);
        }
    }
    let b = lowest_min(&sad);
    (sad, (b % px, b / px))
}

/// The order with fewer adjacent inversions, `preferred` on a tie, and the
/// values sorted that way.
pub fn sort(values: &[u64], preferred: Order) -> (Vec<u64>, Order) {
    let up = values.windows(2).filter(|w| w[0] > w[1]).count();
    let down = values.windows(2).filter(|w| w[0] < w[1]).count();
    let order = match preferred {
        Order::Ascending if down < up => Order::Descending,
        Order::Descending if up < down => Order::Ascending,
        p => p,
    };
    let mut v = values.to_vec();
    v.sort_unstable();
    if order == Order::Descending {
        v.reverse();
    }
    (v, order)
}

/// Zero-padded correlation with centered taps, wrapped to `width` bits.
pub fn convolve_2d(image: &[u64], nx: usize, ny: usize, taps: &[Vec<i64>], width: u8) -> Vec<u64> {
    let (ry, rx) = (taps.len() as i64 / 2, taps[0].len() as i64 / 2);
    let mut out = Vec::with_capacity(nx * ny);
    for y in 0..ny as i64 {
        for x in 0..nx as i64 {
            let mut acc = 0i64;
            for dy in -ry..=ry {
                for dx in -rx..=rx {
                    let (sx, sy) = (x + dx, y + dy);
                    if (0..nx as i64).contains(&sx) && (0..ny as i64).contains(&sy) {
                        let t = taps[(dy + ry) as usize][(dx + rx) as usize];
                        acc = acc.wrapping_add(
                            t.wrapping_mul(image[(sy * nx as i64 + sx) as usize] as i64),
                        );
                    }
                }
            }
            out.push(acc as u64 & word_mask(width));
        }
    }
    out
}

/// Messenger values along `path` (cells and signs), or the axis sum for
/// horizontal and vertical slopes.
pub fn messenger(
    image: &[u64],
    nx: usize,
    ny: usize,
    mx: i64,
    my: i64,
    path: &[(i64, i64, i8)],
    width: u8,
) -> Vec<Option<i64>> {
    let at = |x: i64, y: i64| -> Option<i64> {
        ((0..nx as i64).contains(&x) && (0..ny as i64).contains(&y))
            .then(|| image[y as usize * nx + x as usize] as i64)
    };
    (0..nx * ny)
        .map(|i| {
            let (x, y) = ((i % nx) as i64, (i / nx) as i64);
            let v = if mx == 0 || my == 0 {
                let (ax, ay) = (mx.signum(), my.signum());
                // Positive side of the segment direction (-mx, -my).
                let (px, py) = if -mx * ax - my * ay > 0 {
                    (-ay, ax)
                } else {
                    (ay, -ax)
                };
                let mut s = 0;
                for c in 0..=(mx.abs() + my.abs()) {
                    let (cx, cy) = (x + c * ax, y + c * ay);
                    s += at(cx + px, cy + py)? - at(cx - px, cy - py)?;
                }
                s
            } else {
                let mut s = 0;
                for &(dx, dy, sign) in path {
                    s += at(x + dx, y + dy)? * sign as i64;
                }
                s
            };
            Some(wrap_signed(v, width))
        })
        .collect()
}

/// Strongest magnitude per pixel over `responses` (one vector per slope,
/// in slope order) and the index of the first slope reaching it.
pub fn strongest(
    responses: &[Vec<Option<i64>>],
    n: usize,
    width: u8,
) -> (Vec<u64>, Vec<Option<usize>>) {
    let mut strength = vec![0u64; n];
    let mut arg = vec![None; n];
    for (k, r) in responses.iter().enumerate() {
        for i in 0..n {
            if let Some(v) = r[i] {
                let mag = v.unsigned_abs() & word_mask(width);
                if mag > strength[i] {
                    strength[i] = mag;
                    arg[i] = Some(k);
                }
            }
        }
    }
    (strength, arg)
}

/// End address of every occurrence.
pub fn substring(text: &[u8], pattern: &[u8]) -> Vec<usize> {
    if pattern.len() > text.len() {
        return vec![];
    }
    (pattern.len() - 1..text.len())
        .filter(|&e| &text[e + 1 - pattern.len()..=e] == pattern)
        .collect()
}

pub fn histogram(values: &[u64], limits: &[u64]) -> Vec<usize> {
    let mut counts = vec![0; limits.len() + 1];
    for &v in values {
        counts[limits.iter().take_while(|&&l| l <= v).count()] += 1;
    }
    counts
}

pub fn insert(object: &[u64], offset: usize, data: &[u64]) -> Vec<u64> {
    let mut v = object.to_vec();
    v.splice(offset..offset, data.iter().copied());
    v
}

/// JSON-pointer path of the first place `actual` differs from `expected`,
/// with both values there.
pub fn first_divergence(expected: &Value, actual: &Value) -> Option<(String, Value, Value)> {
    match (expected, actual) {
        (Value::Array(e), Value::Array(a)) => {
            for i in 0..e.len().max(a.len()) {
                match (e.get(i), a.get(i)) {
                    (Some(x), Some(y)) => {
                        if let Some((p, ex, ac)) = first_divergence(x, y) {
                            return Some((format!("/{i}{p}"), ex, ac));
                        }
                    }
                    (x, y) => {
                        return Some((
                            format!("/{i}"),
                            x.cloned().unwrap_or(Value::Null),
                            y.cloned().unwrap_or(Value::Null),
                        ))
                    }
                }
            }
            None
        }
        (Value::Object(e), Value::Object(a)) => {
            for (k, x) in e {
                let y = a.get(k).unwrap_or(&Value::Null);
                if let Some((p, ex, ac)) = first_divergence(x, y) {
                    return Some((format!("/{k}{p}"), ex, ac));
                }
            }
            None
        }
        (e, a) if e == a => None,
        (e, a) => Some((String::new(), e.clone(), a.clone())),
    }
}
