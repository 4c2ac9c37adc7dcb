#![allow(dead_code)]

use inner_bernstein::TestFunction;

/// `C(n,k) x^k (1-x)^(n-k)` by an explicit product; fine for `n <= 1000`.
pub fn naive_basis(n: usize, k: usize, x: f64) -> f64 {
    let k_small = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k_small {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32)
}

fn quintic(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (6.0 * u * u - 15.0 * u + 10.0)
    }
}

/// Knot indices `floor(n xi + c sqrt n)` for `c = -2, -1, 1, 2`.
pub fn oracle_knots(n: usize, xi: f64) -> [usize; 4] {
    let nf = n as f64;
    [-2.0, -1.0, 1.0, 2.0].map(|c: f64| (nf * xi + c * nf.sqrt() + 1e-9).floor() as usize)
}

/// The modified operator summed term by term over the four index ranges:
/// `k <= k1` or `k >= k4` sample `f`, `k1 < k < k2` and `k3 < k < k4` sample
/// the quintic blend, `k2 <= k <= k3` sample the chord. Returns the value
/// and `sum |s_k| p_{n,k}(x)`.
pub fn four_sum(f: &TestFunction, n: usize, xi: f64, x: f64) -> (f64, f64) {
    let [k1, k2, k3, k4] = oracle_knots(n, xi);
    let nf = n as f64;
    let (x1, x2, x3, x4) = (k1 as f64 / nf, k2 as f64 / nf, k3 as f64 / nf, k4 as f64 / nf);
    let f1 = f.value(x1).unwrap();
    let f4 = f.value(x4).unwrap();
    let chord = |t: f64| f1 + (f4 - f1) * (t - x1) / (x4 - x1);
    let mut outer = 0.0;
    let mut left = 0.0;
    let mut middle = 0.0;
    let mut right = 0.0;
    let mut scale = 0.0;
    for k in 0..=n {
        let t = k as f64 / nf;
        let p = naive_basis(n, k, x);
        let s = if k <= k1 || k >= k4 {
            let s = f.value(t).unwrap();
            outer += p * s;
            s
        } else if k < k2 {
            let a = quintic((t - x1) / (x2 - x1));
            let s = f.value(t).unwrap() * (1.0 - a) + a * chord(t);
            left += p * s;
            s
        } else if k <= k3 {
            let s = chord(t);
            middle += p * s;
            s
        } else {
            let a = quintic((t - x3) / (x4 - x3));
            let s = chord(t) * (1.0 - a) + a * f.value(t).unwrap();
            right += p * s;
            s
        };
        scale += p * s.abs();
    }
    (outer + left + middle + right, scale)
}

/// `count` equispaced points on `[0,1]`.
pub fn unit_grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| i as f64 / (count - 1) as f64).collect()
}

/// Prints and returns one acceptance line.
pub fn report(id: &str, ok: bool, detail: &str) -> bool {
    println!("{id} {}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}
