//! Composite Simpson quadrature with refinement.

use crate::error::{Error, Result};

/// Simpson weight (1, 4, 2, ..., 4, 1) for node `k` of an `n`-panel rule.
pub fn simpson_weight(k: usize, n: usize) -> f64 {
    if k == 0 || k == n {
        1.0
    } else if k % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Composite Simpson over `[a, b]` with `panels` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(
        panels >= 2 && panels.is_multiple_of(2),
        "Simpson needs an even panel count"
    );
    let h = (b - a) / panels as f64;
    let sum: f64 = (0..=panels)
        .map(|k| simpson_weight(k, panels) * f(a + k as f64 * h))
        .sum();
    sum * h / 3.0
}

/// Controls for [`integrate_refined`].
#[derive(Clone, Copy, Debug)]
pub struct Refinement {
    /// Panels of the coarse rule; must be even and at least 4.
    pub panels: usize,
    /// Accepted relative gap between the coarse and fine rules.
    pub rel_tol: f64,
    /// Gaps below this are accepted regardless of `rel_tol`.
    pub abs_floor: f64,
    /// How many times the panel count may be doubled before giving up.
    pub max_doublings: u32,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            panels: 2000,
            rel_tol: 1e-8,
            abs_floor: 1e-15,
            max_doublings: 4,
        }
    }
}

impl Refinement {
    pub fn with_panels(panels: usize) -> Result<Self> {
        if panels < 4 || !panels.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "quadrature panels must be even and at least 4, got {panels}"
            )));
        }
        Ok(Self {
            panels,
            ..Self::default()
        })
    }
}

/// Result of a refined integration of `N` integrands sharing one grid.
#[derive(Clone, Copy, Debug)]
pub struct Refined<const N: usize> {
    /// Richardson-extrapolated values `S_2n + (S_2n − S_n)/15`.
    pub values: [f64; N],
    /// `|S_2n − S_n|` per component at the final level.
    pub error_estimates: [f64; N],
    /// Panels of the finest rule evaluated.
    pub panels: usize,
    pub converged: bool,
}

/// Integrates `N` functions at once on `[a, b]`, comparing the `n`- and
/// `2n`-panel Simpson rules and doubling `n` until every component agrees
/// to `rel_tol` (or the doubling budget runs out, which clears
/// `converged`). Function values are reused across levels.
pub fn integrate_refined<const N: usize>(
    mut f: impl FnMut(f64) -> Result<[f64; N]>,
    a: f64,
    b: f64,
    opts: &Refinement,
) -> Result<Refined<N>> {
    if opts.panels < 4 || !opts.panels.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "quadrature panels must be even and at least 4, got {}",
            opts.panels
        )));
    }
    if a == b {
        return Ok(Refined {
            values: [0.0; N],
            error_estimates: [0.0; N],
            panels: 0,
            converged: true,
        });
    }

    let mut n = 2 * opts.panels;
    let mut nodes: Vec<[f64; N]> = Vec::with_capacity(n + 1);
    let h = (b - a) / n as f64;
    for k in 0..=n {
        nodes.push(f(a + k as f64 * h)?);
    }

    let mut doublings = 0;
    loop {
        let fine = simpson_sums(&nodes, 1, a, b);
        let coarse = simpson_sums(&nodes, 2, a, b);
        let mut values = [0.0; N];
        let mut errors = [0.0; N];
        let mut converged = true;
        for i in 0..N {
            let gap = (fine[i] - coarse[i]).abs();
            errors[i] = gap;
            values[i] = fine[i] + (fine[i] - coarse[i]) / 15.0;
            if gap > opts.abs_floor && gap > opts.rel_tol * fine[i].abs() {
                converged = false;
            }
        }
        if converged || doublings == opts.max_doublings {
            return Ok(Refined {
                values,
                error_estimates: errors,
                panels: n,
                converged,
            });
        }
        let h_new = (b - a) / (2 * n) as f64;
        let mut refined = Vec::with_capacity(2 * n + 1);
        for (k, node) in nodes.iter().enumerate() {
            if k > 0 {
                refined.push(f(a + (2 * k - 1) as f64 * h_new)?);
            }
            refined.push(*node);
        }
        nodes = refined;
        n *= 2;
        doublings += 1;
    }
}

fn simpson_sums<const N: usize>(nodes: &[[f64; N]], stride: usize, a: f64, b: f64) -> [f64; N] {
    let n = (nodes.len() - 1) / stride;
    let h = (b - a) / n as f64;
    let mut acc = [0.0; N];
    for k in 0..=n {
        let w = simpson_weight(k, n);
        for (slot, v) in acc.iter_mut().zip(nodes[k * stride]) {
            *slot += w * v;
        }
    }
    acc.map(|s| s * h / 3.0)
}
