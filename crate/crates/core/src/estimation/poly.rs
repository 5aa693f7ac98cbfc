//! Lag-polynomial helpers: psi weights, autocovariances and root moduli.

use nalgebra::{DMatrix, DVector};

/// First `len` psi weights of `theta(B) / phi(B)`, with `psi[0] = 1`.
///
/// Sign convention: `phi(B) = 1 - ar_1 B - ...`, `theta(B) = 1 + ma_1 B + ...`.
pub fn psi_weights(ar: &[f64], ma: &[f64], len: usize) -> Vec<f64> {
    let mut psi = vec![0.0; len];
    if len == 0 {
        return psi;
    }
    psi[0] = 1.0;
    for j in 1..len {
        let mut v = if j <= ma.len() { ma[j - 1] } else { 0.0 };
        for (i, a) in ar.iter().enumerate().take(j) {
            v += a * psi[j - i - 1];
        }
        psi[j] = v;
    }
    psi
}

/// Autocovariances `gamma(0..=max_lag)` of a stationary ARMA process with
/// unit innovation variance. Returns `None` when the Yule-Walker system is
/// singular (unit root on the AR side).
pub fn arma_autocovariance(ar: &[f64], ma: &[f64], max_lag: usize) -> Option<Vec<f64>> {
    let p = ar.len();
    let q = ma.len();
    let theta = |j: usize| -> f64 {
        match j {
            0 => 1.0,
            j if j <= q => ma[j - 1],
            _ => 0.0,
        }
    };
    let psi = psi_weights(ar, ma, q + 1);
    // Right-hand side: sum_{j=k}^{q} theta_j psi_{j-k}.
    let rhs_at = |k: usize| -> f64 { (k..=q).map(|j| theta(j) * psi[j - k]).sum() };

    let mut gamma = vec![0.0; max_lag.max(p) + 1];
    if p == 0 {
        for (k, g) in gamma.iter_mut().enumerate() {
            *g = rhs_at(k);
        }
    } else {
        let m = p + 1;
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for k in 0..m {
            a[(k, k)] += 1.0;
            for i in 1..=p {
                let lag = k.abs_diff(i);
                a[(k, lag)] -= ar[i - 1];
            }
            b[k] = rhs_at(k);
        }
        let sol = a.lu().solve(&b)?;
        if sol.iter().any(|v| !v.is_finite()) || sol[0] <= 0.0 {
            return None;
        }
        gamma[..m].copy_from_slice(sol.as_slice());
        for k in m..gamma.len() {
            let mut v = rhs_at(k);
            for i in 1..=p {
                v += ar[i - 1] * gamma[k - i];
            }
            gamma[k] = v;
        }
    }
    gamma.truncate(max_lag + 1);
    Some(gamma)
}

/// Moduli of the roots of `1 + c_1 z + ... + c_k z^k`, where `coeffs = [c_1..c_k]`.
/// Trailing zero coefficients are ignored.
pub fn root_moduli(coeffs: &[f64]) -> Vec<f64> {
    let k = match coeffs.iter().rposition(|c| *c != 0.0) {
        Some(i) => i + 1,
        None => return Vec::new(),
    };
    // Roots of c(z) are reciprocals of the eigenvalues of the companion matrix
    // of the reversed polynomial z^k + c_1 z^{k-1} + ... + c_k.
    let mut comp = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        comp[(0, j)] = -coeffs[j];
    }
    for i in 1..k {
        comp[(i, i - 1)] = 1.0;
    }
    comp.complex_eigenvalues()
        .iter()
        .map(|ev| {
            let m = ev.norm();
            if m == 0.0 {
                f64::INFINITY
            } else {
                1.0 / m
            }
        })
        .collect()
}

/// Reflects roots of `1 + ma_1 z + ...` lying inside the unit circle to
/// their conjugate reciprocals. The autocovariances are unchanged up to the
/// innovation variance, so the concentrated likelihood is unchanged.
pub fn invert_ma(ma: &[f64]) -> Vec<f64> {
    let k = match ma.iter().rposition(|c| *c != 0.0) {
        Some(i) => i + 1,
        None => return ma.to_vec(),
    };
    let mut comp = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        comp[(0, j)] = -ma[j];
    }
    for i in 1..k {
        comp[(i, i - 1)] = 1.0;
    }
    // Eigenvalues are inverse roots: 1 + c(z) = prod (1 - lambda_i z).
    let inv_roots = comp.complex_eigenvalues();
    if inv_roots.iter().all(|l| l.norm() <= 1.0) {
        return ma.to_vec();
    }
    let mut poly = vec![nalgebra::Complex::new(1.0, 0.0)];
    for l in inv_roots.iter() {
        let l = if l.norm() > 1.0 { 1.0 / l.conj() } else { *l };
        let mut next = vec![nalgebra::Complex::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * l;
        }
        poly = next;
    }
    let mut out: Vec<f64> = poly[1..].iter().map(|c| c.re).collect();
    out.resize(ma.len(), 0.0);
    out
}

/// Smallest root modulus of the AR polynomial `1 - ar_1 z - ...`.
pub fn min_ar_root(ar: &[f64]) -> f64 {
    let neg: Vec<f64> = ar.iter().map(|a| -a).collect();
    root_moduli(&neg).into_iter().fold(f64::INFINITY, f64::min)
}

/// Smallest root modulus of the MA polynomial `1 + ma_1 z + ...`.
pub fn min_ma_root(ma: &[f64]) -> f64 {
    root_moduli(ma).into_iter().fold(f64::INFINITY, f64::min)
}

/// Coefficients of `phi(B) (1 - B)^d` expressed as an AR operator
/// (`1 - c_1 B - ...`), used for forecast variance of integrated models.
pub fn integrated_ar(ar: &[f64], d: usize) -> Vec<f64> {
    // Work with the full polynomial 1 - ar_1 B - ...
    let mut poly = vec![1.0];
    poly.extend(ar.iter().map(|a| -a));
    for _ in 0..d {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| -c).collect()
}
