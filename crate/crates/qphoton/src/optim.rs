//! Small derivative-free optimizer (Nelder-Mead simplex) used by the
//! Fisher-information landscape search and the maximum-likelihood estimator.

/// Outcome of a simplex minimization.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub fx: f64,
    /// Number of objective evaluations.
    pub evals: usize,
    /// True when the simplex spread fell below the tolerance.
    pub converged: bool,
}

/// Minimizes `f` starting from `x0` with an axis-aligned initial simplex of
/// edge lengths `steps`. Standard Nelder-Mead coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2); stops after `max_iters`
/// iterations or when both the function spread and the simplex diameter fall
/// below `tol`.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    max_iters: usize,
    tol: f64,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(steps.len(), n);
    let mut evals = 0usize;
    let eval = |f: &mut F, x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        simplex.push(x);
    }
    let mut fvals: Vec<f64> = simplex
        .iter()
        .map(|x| eval(&mut f, x, &mut evals))
        .collect();

    let mut converged = false;
    for _ in 0..max_iters {
        // Order the simplex by objective value.
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap());
        let reorder_x: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let reorder_f: Vec<f64> = idx.iter().map(|&i| fvals[i]).collect();
        simplex = reorder_x;
        fvals = reorder_f;

        let f_spread = fvals[n] - fvals[0];
        let diam: f64 = (0..n)
            .map(|d| {
                simplex
                    .iter()
                    .map(|x| (x[d] - simplex[0][d]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if f_spread.abs() < tol && diam < tol.sqrt() {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for x in simplex.iter().take(n) {
            for d in 0..n {
                centroid[d] += x[d] / n as f64;
            }
        }
        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            (0..n).map(|d| a[d] + t * (b[d] - a[d])).collect()
        };

        let reflected = lerp(&centroid, &simplex[n], -1.0);
        let f_r = eval(&mut f, &reflected, &mut evals);
        if f_r < fvals[0] {
            let expanded = lerp(&centroid, &simplex[n], -2.0);
            let f_e = eval(&mut f, &expanded, &mut evals);
            if f_e < f_r {
                simplex[n] = expanded;
                fvals[n] = f_e;
            } else {
                simplex[n] = reflected;
                fvals[n] = f_r;
            }
            continue;
        }
        if f_r < fvals[n - 1] {
            simplex[n] = reflected;
            fvals[n] = f_r;
            continue;
        }
        // Contraction: outside if the reflection improved the worst, else inside.
        let contracted = if f_r < fvals[n] {
            lerp(&centroid, &reflected, 0.5)
        } else {
            lerp(&centroid, &simplex[n], 0.5)
        };
        let f_c = eval(&mut f, &contracted, &mut evals);
        if f_c < fvals[n].min(f_r) {
            simplex[n] = contracted;
            fvals[n] = f_c;
            continue;
        }
        // Shrink toward the best vertex.
        for i in 1..=n {
            simplex[i] = lerp(&simplex[0], &simplex[i], 0.5);
            fvals[i] = eval(&mut f, &simplex[i], &mut evals);
        }
    }

    let mut best = 0usize;
    for i in 1..=n {
        if fvals[i] < fvals[best] {
            best = i;
        }
    }
    NelderMeadResult {
        x: simplex[best].clone(),
        fx: fvals[best],
        evals,
        converged,
    }
}
