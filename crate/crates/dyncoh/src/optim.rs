//! Small deterministic optimizers shared by the divergence and monotone
//! evaluators: simplex projection and grids, projected gradient ascent with
//! numerical gradients, golden-section search, and a plain Nelder-Mead.
//! Everything here is seeded or fully deterministic so repeated runs
//! reproduce bit-identical reports.

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut threshold = 0.0;
    let mut found = false;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (k as f64 + 1.0);
        if u - candidate > 0.0 {
            threshold = candidate;
        } else {
            found = true;
            break;
        }
    }
    if !found {
        // All coordinates active.
        threshold = (v.iter().sum::<f64>() - 1.0) / n as f64;
    }
    v.iter().map(|&x| (x - threshold).max(0.0)).collect()
}

/// All points of the uniform simplex grid with the given number of steps per
/// coordinate (compositions of `steps` into `dim` parts, scaled by
/// `1/steps`). Vertices are always included.
pub fn simplex_grid(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    assert!(dim >= 1 && steps >= 1);
    let mut out = Vec::new();
    let mut current = vec![0usize; dim];
    fn recurse(
        pos: usize,
        remaining: usize,
        current: &mut Vec<usize>,
        steps: usize,
        out: &mut Vec<Vec<f64>>,
    ) {
        if pos == current.len() - 1 {
            current[pos] = remaining;
            out.push(
                current
                    .iter()
                    .map(|&k| k as f64 / steps as f64)
                    .collect::<Vec<f64>>(),
            );
            return;
        }
        for k in 0..=remaining {
            current[pos] = k;
            recurse(pos + 1, remaining - k, current, steps, out);
        }
    }
    recurse(0, steps, &mut current, steps, &mut out);
    out
}

/// Result of a simplex maximization.
#[derive(Debug, Clone)]
pub struct SimplexMax {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub ascent_iterations: usize,
}

/// Maximizes `f` over the probability simplex: deterministic grid seeding
/// followed by projected gradient ascent (central-difference gradients,
/// backtracking step control) from the best `n_seeds` grid points. The grid
/// contains the vertices, and ascent only ever improves on its seed, so
/// vertex optima are found exactly.
pub fn maximize_on_simplex<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    dim: usize,
    grid_steps: usize,
    n_seeds: usize,
    max_ascent_iters: usize,
    tol: f64,
) -> SimplexMax {
    let mut evaluations = 0usize;
    let grid = simplex_grid(dim, grid_steps);
    let mut scored: Vec<(f64, Vec<f64>)> = grid
        .into_iter()
        .map(|p| {
            evaluations += 1;
            (f(&p), p)
        })
        .collect();
    // Stable order: descending value, original enumeration breaks ties.
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut best_value = scored[0].0;
    let mut best_point = scored[0].1.clone();
    let mut ascent_iterations = 0usize;

    let h = 1e-6;
    for (seed_value, seed) in scored.into_iter().take(n_seeds.max(1)) {
        let mut p = seed;
        let mut value = seed_value;
        let mut step = 0.1;
        for _ in 0..max_ascent_iters {
            ascent_iterations += 1;
            // Central-difference gradient with feasibility projection.
            let mut grad = vec![0.0; dim];
            for i in 0..dim {
                let mut plus = p.clone();
                plus[i] += h;
                let mut minus = p.clone();
                minus[i] -= h;
                let fp = f(&project_to_simplex(&plus));
                let fm = f(&project_to_simplex(&minus));
                evaluations += 2;
                grad[i] = (fp - fm) / (2.0 * h);
            }
            let mean = grad.iter().sum::<f64>() / dim as f64;
            for g in &mut grad {
                *g -= mean;
            }
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-14 {
                break;
            }
            let mut improved = false;
            while step > 1e-12 {
                let candidate: Vec<f64> = p
                    .iter()
                    .zip(&grad)
                    .map(|(&x, &g)| x + step * g / gnorm)
                    .collect();
                let candidate = project_to_simplex(&candidate);
                let cv = f(&candidate);
                evaluations += 1;
                if cv > value + 1e-15 {
                    let gain = cv - value;
                    p = candidate;
                    value = cv;
                    improved = true;
                    step *= 1.5;
                    if gain < tol {
                        improved = false;
                    }
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if value > best_value {
            best_value = value;
            best_point = p;
        }
    }
    SimplexMax {
        point: best_point,
        value: best_value,
        evaluations,
        ascent_iterations,
    }
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> (f64, f64) {
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    (x, fx)
}

/// Nelder-Mead minimization with standard coefficients. Returns the best
/// vertex after `max_iters` iterations or earlier on simplex collapse.
pub fn nelder_mead_min<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    initial_step: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((f(x0), x0.to_vec()));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += initial_step;
        simplex.push((f(&x), x));
    }

    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let spread = simplex[n].0 - simplex[0].0;
        if spread.abs() < 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(_, x)| x[j]).sum::<f64>() / n as f64)
            .collect();

        let reflected: Vec<f64> = (0..n)
            .map(|j| centroid[j] + alpha * (centroid[j] - simplex[n].1[j]))
            .collect();
        let fr = f(&reflected);
        if fr < simplex[0].0 {
            let expanded: Vec<f64> = (0..n)
                .map(|j| centroid[j] + gamma * (reflected[j] - centroid[j]))
                .collect();
            let fe = f(&expanded);
            simplex[n] = if fe < fr {
                (fe, expanded)
            } else {
                (fr, reflected)
            };
            continue;
        }
        if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflected);
            continue;
        }
        let contracted: Vec<f64> = (0..n)
            .map(|j| centroid[j] + rho * (simplex[n].1[j] - centroid[j]))
            .collect();
        let fc = f(&contracted);
        if fc < simplex[n].0 {
            simplex[n] = (fc, contracted);
            continue;
        }
        // Shrink toward the best vertex.
        let best = simplex[0].1.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = (0..n)
                .map(|j| best[j] + sigma * (entry.1[j] - best[j]))
                .collect();
            *entry = (f(&x), x);
        }
    }
    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (fx, x) = simplex.swap_remove(0);
    (x, fx)
}
