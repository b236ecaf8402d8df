//! Great-circle geometry on the round sphere of a given radius.
//!
//! Points are kept as unit vectors in ambient 3-space; all distances carry
//! the radius. The angle between unit vectors is computed with the
//! atan2(cross, dot) form, which stays accurate near 0 and near pi, and
//! distance *deltas* along probes use an arcsin identity on half-chords that
//! avoids the catastrophic cancellation of subtracting two arc lengths.

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm3(&a);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some([a[0] / n, a[1] / n, a[2] / n])
}

/// Angle in [0, pi] between two unit vectors.
pub fn angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm3(&cross(a, b)).atan2(dot(a, b))
}

/// An orthonormal pair spanning the tangent plane at `x`, chosen
/// deterministically from the least-aligned coordinate axis.
pub fn tangent_basis(x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let mut axis = [0.0; 3];
    let k = x
        .iter()
        .map(|c| c.abs())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    axis[k] = 1.0;
    let d = dot(&axis, x);
    let e1 = normalize([axis[0] - d * x[0], axis[1] - d * x[1], axis[2] - d * x[2]])
        .expect("axis chosen off the pole");
    let e2 = cross(x, &e1);
    (e1, e2)
}

/// Projects `w` onto the tangent plane at `x` and normalizes; `None` when
/// `w` is (anti)parallel to `x`.
pub fn project_tangent(x: &[f64; 3], w: &[f64; 3]) -> Option<[f64; 3]> {
    let d = dot(w, x);
    normalize([w[0] - d * x[0], w[1] - d * x[1], w[2] - d * x[2]])
}

/// Point reached from `x` after arc `a` along unit tangent `u`.
pub fn step(x: &[f64; 3], u: &[f64; 3], a: f64) -> [f64; 3] {
    let (c, s) = (a.cos(), a.sin());
    [
        c * x[0] + s * u[0],
        c * x[1] + s * u[1],
        c * x[2] + s * u[2],
    ]
}

/// Stable `arcangle(z, step(x, u, a)) - arcangle(z, x)` on the unit sphere.
///
/// Uses half-chords h = |y - z|/2, the identity
/// `asin(hy) - asin(hx) = asin((hy^2 - hx^2) / (hy cx + hx cy))`
/// (valid because both half-angles lie in [0, pi/2]), and the displacement
/// `y - x = -2 sin^2(a/2) x + sin(a) u` which never subtracts nearby arcs.
pub fn angle_delta(z: &[f64; 3], x: &[f64; 3], u: &[f64; 3], a: f64) -> f64 {
    let sh = (0.5 * a).sin();
    let sa = a.sin();
    let m = [
        -2.0 * sh * sh * x[0] + sa * u[0],
        -2.0 * sh * sh * x[1] + sa * u[1],
        -2.0 * sh * sh * x[2] + sa * u[2],
    ];
    let y = step(x, u, a);
    let s = [
        y[0] + x[0] - 2.0 * z[0],
        y[1] + x[1] - 2.0 * z[1],
        y[2] + x[2] - 2.0 * z[2],
    ];
    // hy^2 - hx^2 = <y - x, y + x - 2z> / 4
    let num = 0.25 * (m[0] * s[0] + m[1] * s[1] + m[2] * s[2]);

    let dx = [x[0] - z[0], x[1] - z[1], x[2] - z[2]];
    let hx = (0.5 * norm3(&dx)).min(1.0);
    let cx2 = ((1.0 - hx) * (1.0 + hx)).max(0.0);
    let cx = cx2.sqrt();
    let hy2 = (hx * hx + num).max(0.0);
    let hy = hy2.sqrt().min(1.0);
    let cy = (cx2 - num).max(0.0).sqrt();

    let den = hy * cx + hx * cy;
    if den == 0.0 {
        // z at both x and y (a = 0), or exact antipodes on both ends.
        return 2.0 * (hy.asin() - hx.asin());
    }
    2.0 * (num / den).clamp(-1.0, 1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_endpoints() {
        let n = [0.0, 0.0, 1.0];
        let s = [0.0, 0.0, -1.0];
        let e = [1.0, 0.0, 0.0];
        assert_eq!(angle(&n, &s), std::f64::consts::PI);
        assert!((angle(&n, &e) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(angle(&n, &n), 0.0);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let x = normalize([0.3, -0.5, 0.81]).unwrap();
        let (e1, e2) = tangent_basis(&x);
        assert!(dot(&e1, &x).abs() < 1e-14);
        assert!(dot(&e2, &x).abs() < 1e-14);
        assert!(dot(&e1, &e2).abs() < 1e-14);
        assert!((norm3(&e1) - 1.0).abs() < 1e-14);
        assert!((norm3(&e2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn delta_matches_naive_at_coarse_steps() {
        let x = normalize([0.2, 0.3, 0.93]).unwrap();
        let z = normalize([-0.6, 0.7, 0.1]).unwrap();
        let u = project_tangent(&x, &[0.9, -0.1, 0.2]).unwrap();
        let a = 0.05;
        let y = normalize(step(&x, &u, a)).unwrap();
        let naive = angle(&z, &y) - angle(&z, &x);
        let stable = angle_delta(&z, &x, &u, a);
        assert!((naive - stable).abs() < 1e-12, "{naive} vs {stable}");
    }

    #[test]
    fn delta_toward_reference_is_exactly_minus_arc() {
        // Moving along the great circle toward z shortens the distance at
        // unit rate, and the antipodal configuration stays exact.
        let x = [0.0, 0.0, 1.0];
        let z = [0.0, 0.0, -1.0];
        let u = [1.0, 0.0, 0.0];
        for a in [1e-3, 1e-5, 1e-7, 1e-9] {
            let d = angle_delta(&z, &x, &u, a);
            assert!((d + a).abs() <= 1e-14 * a, "a={a} d={d}");
        }
    }
}
