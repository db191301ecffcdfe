//! Test-only oracles shared by the integration suites.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite rule on [a, b]: `panels` equal panels of `per` nodes each.
pub fn composite(a: f64, b: f64, panels: usize, per: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(per);
    let w = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let lo = a + p as f64 * w;
            gl.iter().map(move |&(x, wt)| (lo + 0.5 * w * (x + 1.0), 0.5 * w * wt))
        })
        .collect()
}

/// Solid angle of the rectangle [x1,x2]×[y1,y2] in a plane at distance h.
fn rect_solid_angle(x1: f64, x2: f64, y1: f64, y2: f64, h: f64) -> f64 {
    let f = |x: f64, y: f64| (x * y / (h * (x * x + y * y + h * h).sqrt())).atan();
    f(x2, y2) - f(x1, y2) - f(x2, y1) + f(x1, y1)
}

/// Demag factor along z of an a×b×c prism from the face charges: the field
/// of the ±M sheets on the z faces, averaged over the volume. By symmetry
/// N_z = ⟨Ω_top⟩ / 2π.
pub fn demag_z_by_surface_charges(a: f64, b: f64, c: f64) -> f64 {
    let (qx, qy, qz) = (composite(0.0, a, 8, 12), composite(0.0, b, 8, 12), composite(0.0, c, 8, 12));
    let mut acc = 0.0;
    for &(x, wx) in &qx {
        for &(y, wy) in &qy {
            for &(z, wz) in &qz {
                acc += wx * wy * wz * rect_solid_angle(-x, a - x, -y, b - y, c - z);
            }
        }
    }
    acc / (a * b * c) / (2.0 * PI)
}

/// (N_x, N_y, N_z) from the surface-charge oracle.
pub fn demag_by_surface_charges(lx: f64, ly: f64, lz: f64) -> [f64; 3] {
    [
        demag_z_by_surface_charges(ly, lz, lx),
        demag_z_by_surface_charges(lz, lx, ly),
        demag_z_by_surface_charges(lx, ly, lz),
    ]
}
