//! Independent reference computations used by the integration and acceptance tests.
#![allow(dead_code)]

use num_complex::Complex64;

/// Reference drive written out by hand: `f(t)` and its antiderivative `F(t)` with `F(0) = 0`.
pub struct RefDrive {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub big_f: fn(f64) -> f64,
}

pub fn ref_drives() -> Vec<RefDrive> {
    vec![
        RefDrive { name: "cos", f: |t| t.cos(), big_f: |t| t.sin() },
        RefDrive {
            name: "f1",
            f: |t| t.cos() + 0.1 * (3.0 * t).cos(),
            big_f: |t| t.sin() + 0.1 * (3.0 * t).sin() / 3.0,
        },
        RefDrive {
            name: "f2",
            f: |t| t.cos() + (2.0 * t).cos(),
            big_f: |t| t.sin() + 0.5 * (2.0 * t).sin(),
        },
        RefDrive {
            name: "f3",
            f: |t| t.sin() + (2.0 * t).sin(),
            big_f: |t| (1.0 - t.cos()) + 0.5 * (1.0 - (2.0 * t).cos()),
        },
    ]
}

/// `J_n(x)` for integer `n` by Miller's backward recurrence, normalized with
/// `J_0 + 2 sum J_{2k} = 1`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let sign = if n < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    let start = 2 * ((m.max(ax as usize) + 40) / 2);
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut val = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / ax * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e200 {
            j *= 1e-200;
            jp1 *= 1e-200;
            norm *= 1e-200;
            val *= 1e-200;
        }
        // j now holds J_{k-1}
        if k - 1 == m {
            val = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    let mut out = val / norm;
    if x < 0.0 && m % 2 == 1 {
        out = -out;
    }
    sign * out
}

fn simpson_rec<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.norm() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of a complex integrand.
pub fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    // split into panels first so oscillatory integrands are resolved
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let (x0, x1) = (a + p as f64 * h, a + (p + 1) as f64 * h);
            let (fa, fm, fb) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = (x1 - x0) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_rec(&f, x0, x1, fa, fm, fb, whole, tol / panels as f64, 40)
        })
        .sum()
}

/// `Delta_n = (Delta/T) int_0^T e^{i n t - i A F(t)} dt` at `Omega = 1`.
pub fn delta_n_quadrature(drive: &RefDrive, delta: f64, amplitude: f64, n: i64) -> Complex64 {
    let tp = std::f64::consts::TAU;
    let big_f = drive.big_f;
    let integral = simpson(
        |t| Complex64::from_polar(1.0, n as f64 * t - amplitude * big_f(t)),
        0.0,
        tp,
        1e-13,
    );
    integral * (delta / tp)
}

type M2 = [[Complex64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn axpy(a: &M2, s: f64, b: &M2) -> M2 {
    let mut c = *a;
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] += s * b[i][j];
        }
    }
    c
}

/// One-period propagator of `H = (eps0 - A f(t)) s_z/2 + Delta s_x/2` by
/// classical fixed-step RK4 on `dU/dt = -i H U`, `Omega = 1`.
pub fn rk4_monodromy(drive: &RefDrive, eps0: f64, delta: f64, amplitude: f64, steps: usize) -> M2 {
    let f = drive.f;
    let gen = |t: f64| -> M2 {
        let z = 0.5 * (eps0 - amplitude * f(t));
        let x = 0.5 * delta;
        let mi = Complex64::new(0.0, -1.0);
        [[mi * z, mi * x], [mi * x, -mi * z]]
    };
    let h = std::f64::consts::TAU / steps as f64;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut u: M2 = [[one, zero], [zero, one]];
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = mul(&gen(t), &u);
        let k2 = mul(&gen(t + 0.5 * h), &axpy(&u, 0.5 * h, &k1));
        let k3 = mul(&gen(t + 0.5 * h), &axpy(&u, 0.5 * h, &k2));
        let k4 = mul(&gen(t + h), &axpy(&u, h, &k3));
        for i in 0..2 {
            for j in 0..2 {
                u[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    u
}

pub fn max_diff(a: &M2, b: &M2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// Deterministic low-discrepancy sequence in `[0, 1)` (golden-ratio Weyl sequence).
pub fn weyl(i: usize, dim: usize) -> f64 {
    const ALPHAS: [f64; 4] = [0.618_033_988_749_894_9, 0.754_877_666_246_692_7, 0.569_840_290_998_053_3, 0.839_286_755_214_161_1];
    ((i as f64 + 1.0) * ALPHAS[dim % ALPHAS.len()]).fract()
}

/// Excited-state Gibbs population of `eps0 s_z/2 + Delta s_x/2`.
pub fn gibbs_excited(eps0: f64, delta: f64, beta: f64) -> f64 {
    let e = eps0.hypot(delta);
    1.0 / (1.0 + (beta * e).exp())
}
