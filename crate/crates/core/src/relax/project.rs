/// Euclidean projection onto the probability simplex, or the vertex `e_p`
/// when a pinned coordinate `p` is given.
pub fn project_simplex(v: &[f64], pinned: Option<usize>) -> Vec<f64> {
    if let Some(p) = pinned {
        let mut out = vec![0.0; v.len()];
        out[p] = 1.0;
        return out;
    }
    project_simplex_masked(v, &vec![true; v.len()])
}

/// Projection onto `{x >= 0, sum x = 1, x_j = 0 where !allowed[j]}`.
///
/// Sort-and-threshold: find the largest `rho` with
/// `u_rho - (sum_{j <= rho} u_j - 1) / rho > 0` over the sorted allowed
/// entries, then shift and clip.
pub fn project_simplex_masked(v: &[f64], allowed: &[bool]) -> Vec<f64> {
    let mut u: Vec<f64> = v
        .iter()
        .zip(allowed)
        .filter(|(_, &a)| a)
        .map(|(&x, _)| x)
        .collect();
    assert!(!u.is_empty(), "projection needs at least one allowed coordinate");
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
        }
    }
    let mut out: Vec<f64> = v
        .iter()
        .zip(allowed)
        .map(|(&x, &a)| if a { (x - tau).max(0.0) } else { 0.0 })
        .collect();
    // Absorb round-off so rows sum to one well inside the row tolerance.
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        out.iter_mut().for_each(|x| *x /= s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points_and_examples() {
        assert_eq!(project_simplex(&[0.25, 0.75], None), vec![0.25, 0.75]);
        assert_eq!(project_simplex(&[2.0, 0.0], None), vec![1.0, 0.0]);
        assert_eq!(project_simplex(&[0.6, 0.6], None), vec![0.5, 0.5]);
        assert_eq!(project_simplex(&[0.3, 0.9, -4.0], Some(2)), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn masked_coordinates_stay_zero() {
        let p = project_simplex_masked(&[5.0, 0.2, 0.4], &[false, true, true]);
        assert_eq!(p[0], 0.0);
        assert!((p[1] - 0.4).abs() < 1e-12 && (p[2] - 0.6).abs() < 1e-12);
    }
}
