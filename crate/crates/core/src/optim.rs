//! Derivative-free Nelder-Mead simplex minimisation in fixed dimension.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Stop once the largest vertex-to-vertex distance falls below this.
    pub tol: f64,
    pub max_evals: usize,
    /// Edge length of the axis-aligned initial simplex.
    pub initial_step: f64,
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult<const N: usize> {
    pub x: [f64; N],
    pub f: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
}

fn diameter<const N: usize>(simplex: &[[f64; N]]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let s: f64 = (0..N).map(|k| (simplex[i][k] - simplex[j][k]).powi(2)).sum();
            d = d.max(s.sqrt());
        }
    }
    d
}

fn affine<const N: usize>(a: &[f64; N], b: &[f64; N], t: f64) -> [f64; N] {
    // a + t (b - a)
    std::array::from_fn(|k| a[k] + t * (b[k] - a[k]))
}

/// Minimises `f` from `x0` with the standard coefficients (reflection 1,
/// expansion 2, contraction ½, shrink ½). Non-finite objective values are
/// treated as `+inf`.
pub fn nelder_mead<const N: usize, F>(f: F, x0: [f64; N], opts: &NelderMeadOptions) -> NelderMeadResult<N>
where
    F: Fn(&[f64; N]) -> f64,
{
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64; N]| -> f64 {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<[f64; N]> = Vec::with_capacity(N + 1);
    simplex.push(x0);
    for k in 0..N {
        let mut v = x0;
        v[k] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(eval).collect();

    let mut iterations = 0usize;
    let mut converged = false;
    loop {
        // ascending by value, ties keep insertion order
        let mut order: Vec<usize> = (0..=N).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i]).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&simplex) < opts.tol {
            converged = true;
            break;
        }
        if evals.get() >= opts.max_evals {
            break;
        }
        iterations += 1;

        let centroid: [f64; N] =
            std::array::from_fn(|k| simplex[..N].iter().map(|v| v[k]).sum::<f64>() / N as f64);
        let worst = simplex[N];

        let reflected = affine(&centroid, &worst, -1.0);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = affine(&centroid, &worst, -2.0);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[N] = expanded;
                values[N] = fe;
            } else {
                simplex[N] = reflected;
                values[N] = fr;
            }
            continue;
        }
        if fr < values[N - 1] {
            simplex[N] = reflected;
            values[N] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[N] {
            let c = affine(&centroid, &reflected, 0.5);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = affine(&centroid, &worst, 0.5);
            let fc = eval(&c);
            (c, fc)
        };
        if fc < values[N].min(fr) {
            simplex[N] = contracted;
            values[N] = fc;
            continue;
        }
        let best = simplex[0];
        for i in 1..=N {
            simplex[i] = affine(&best, &simplex[i], 0.5);
            values[i] = eval(&simplex[i]);
        }
    }

    NelderMeadResult {
        x: simplex[0],
        f: values[0],
        evals: evals.get(),
        iterations,
        converged,
    }
}
