//! Randomized test of the bilinear estimate for the free lattice flow
//! `e^{i tau Delta_d}` on annular data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::FourierPlan;
use crate::grid::TorusGrid;
use crate::lattice::lattice_symbol;
use crate::scalar::{cis, Cx, Real};

use super::{fit_slope, median};

/// Lattice size and time resolution shared by every trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearOptions<T> {
    pub m: usize,
    /// Time step of the trapezoid rule over `[0, window]`.
    pub dtau: T,
}

impl<T: Real> Default for BilinearOptions<T> {
    fn default() -> Self {
        Self {
            m: 4096,
            dtau: T::lit(0.05),
        }
    }
}

/// Outcome of `trials` independent draws at one `(K, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearRecord<T> {
    pub k: T,
    pub l: T,
    pub window: T,
    pub seed: u64,
    /// `||(e^{i tau Delta} a)(e^{i tau Delta} b)||_{L^2 l^2}` with `||a|| = ||b|| = 1`.
    pub lhs: Vec<T>,
    /// `lhs / L^{-1/2}`
    pub ratios: Vec<T>,
    pub max_ratio: T,
    pub median_ratio: T,
    pub median_lhs: T,
}

/// Frequencies `{theta_k : |sin theta_k| in [s/2, s)}`.
pub fn annulus<T: Real>(grid: &TorusGrid<T>, scale: T) -> Vec<usize> {
    let lo = scale / T::lit(2.0);
    (0..grid.m())
        .filter(|&j| {
            let s = grid.theta(j).sin().abs();
            s >= lo && s < scale
        })
        .collect()
}

/// Unit-norm spectrum with i.i.d. standard complex normal entries on `shell`.
fn draw_shell<T: Real>(rng: &mut ChaCha8Rng, m: usize, shell: &[usize]) -> Vec<Cx<T>> {
    let mut coeffs = vec![Cx::new(T::zero(), T::zero()); m];
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for &j in shell {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        coeffs[j] = Cx::new(T::lit(re * half), T::lit(im * half));
    }
    // l2 mass is (1/m) sum |c|^2
    let mass = coeffs.iter().fold(T::zero(), |a, c| a + c.norm_sqr()) / T::from_count(m);
    if mass > T::zero() {
        let s = mass.sqrt().recip();
        coeffs.iter_mut().for_each(|c| *c = *c * s);
    }
    coeffs
}

/// `||(e^{i tau Delta} a)(e^{i tau Delta} b)||_{L^2_tau l^2_n}` over
/// `[0, window]`, both inputs given as lattice spectra.
pub fn bilinear_lhs<T: Real>(
    grid: &TorusGrid<T>,
    a_hat: &[Cx<T>],
    b_hat: &[Cx<T>],
    window: T,
    dtau: T,
) -> T {
    let m = grid.m();
    let steps = (window / dtau).ceil().to_usize().unwrap_or(1).max(1);
    let step = window / T::from_count(steps);
    let symbol: Vec<T> = (0..m).map(|j| lattice_symbol(grid.theta(j))).collect();
    let mut plan = FourierPlan::new(m);
    let inv_m = T::one() / T::from_count(m);
    let zero = Cx::new(T::zero(), T::zero());
    let mut a = vec![zero; m];
    let mut b = vec![zero; m];
    let mut total = T::zero();
    for i in 0..=steps {
        let tau = step * T::from_count(i);
        for j in 0..m {
            let w = cis(-tau * symbol[j]) * inv_m;
            a[j] = a_hat[j] * w;
            b[j] = b_hat[j] * w;
        }
        plan.inverse(&mut a);
        plan.inverse(&mut b);
        let s = a
            .iter()
            .zip(&b)
            .fold(T::zero(), |acc, (x, y)| acc + x.norm_sqr() * y.norm_sqr());
        let weight = if i == 0 || i == steps {
            T::lit(0.5)
        } else {
            T::one()
        };
        total = total + weight * s;
    }
    (total * step).sqrt()
}

fn check_scales<T: Real>(k: T, l: T) -> Result<()> {
    if !(k > T::zero() && l <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "scales must satisfy 0 < K and L <= 1, got K = {k}, L = {l}"
        )));
    }
    if k >= l / T::lit(2.0) {
        return Err(Error::InvalidParameter(format!(
            "need K < L/2, got K = {k}, L = {l}"
        )));
    }
    Ok(())
}

/// Trial `i` draws `a_K` then `b_L` from ChaCha8 seeded by `seed` on stream
/// `i`, so `a_K` is identical across an L-sweep with the same seed.
pub fn bilinear_ratio_experiment<T: Real>(
    k: T,
    l: T,
    trials: usize,
    window: T,
    seed: u64,
    options: &BilinearOptions<T>,
) -> Result<BilinearRecord<T>> {
    check_scales(k, l)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    if !(window > T::zero() && options.dtau > T::zero()) {
        return Err(Error::InvalidParameter(
            "window and time step must be positive".into(),
        ));
    }
    let grid = TorusGrid::new(options.m, T::one())?;
    let shell_a = annulus(&grid, k);
    let shell_b = annulus(&grid, l);
    if shell_a.is_empty() || shell_b.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "lattice with {} sites has no frequencies in one of the shells",
            options.m
        )));
    }
    let lhs: Vec<T> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let a = draw_shell(&mut rng, options.m, &shell_a);
            let b = draw_shell(&mut rng, options.m, &shell_b);
            bilinear_lhs(&grid, &a, &b, window, options.dtau)
        })
        .collect();
    let norm = l.sqrt();
    let ratios: Vec<T> = lhs.iter().map(|&v| v * norm).collect();
    let max_ratio = ratios.iter().fold(T::zero(), |a, &b| a.max(b));
    Ok(BilinearRecord {
        k,
        l,
        window,
        seed,
        median_ratio: median(&ratios),
        median_lhs: median(&lhs),
        max_ratio,
        lhs,
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSweep<T> {
    pub records: Vec<BilinearRecord<T>>,
    /// Slope of `log median_lhs` against `log L`.
    pub fitted_slope: Option<T>,
}

pub fn bilinear_sweep<T: Real>(
    k: T,
    ls: &[T],
    trials: usize,
    window: T,
    seed: u64,
    options: &BilinearOptions<T>,
) -> Result<BilinearSweep<T>> {
    let records = ls
        .iter()
        .map(|&l| bilinear_ratio_experiment(k, l, trials, window, seed, options))
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<T>, Vec<T>) = records
        .iter()
        .filter(|r| r.median_lhs > T::zero())
        .map(|r| (r.l.ln(), r.median_lhs.ln()))
        .unzip();
    Ok(BilinearSweep {
        fitted_slope: fit_slope(&xs, &ys),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_match_enumeration() {
        let g = TorusGrid::new(8, 1.0f64).unwrap();
        // |sin theta| in [0.5, 1): theta = +-pi/4, +-3pi/4
        assert_eq!(annulus(&g, 1.0), vec![1, 3, 5, 7]);
        assert!(annulus(&g, 0.25).is_empty());
    }

    #[test]
    fn zero_factor_gives_zero() {
        let g = TorusGrid::new(64, 1.0f64).unwrap();
        let zero = vec![Cx::new(0.0, 0.0); 64];
        let mut b = zero.clone();
        b[10] = Cx::new(8.0, 0.0);
        assert_eq!(bilinear_lhs(&g, &zero, &b, 5.0, 0.1), 0.0);
    }

    #[test]
    fn single_modes_give_constant_product() {
        // |a_n| = |b_n| = 1/sqrt(m) for unit single modes, so the integrand is 1/m
        let m = 64;
        let g = TorusGrid::new(m, 1.0f64).unwrap();
        let mut a = vec![Cx::new(0.0, 0.0); m];
        let mut b = a.clone();
        a[1] = Cx::new((m as f64).sqrt(), 0.0);
        b[20] = Cx::new(0.0, (m as f64).sqrt());
        let v = bilinear_lhs(&g, &a, &b, 3.0, 0.1);
        assert!((v - (3.0 / m as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_close_scales_and_is_reproducible() {
        let opts = BilinearOptions { m: 256, dtau: 0.1 };
        assert!(bilinear_ratio_experiment(0.5, 0.75, 4, 5.0, 1, &opts).is_err());
        let a = bilinear_ratio_experiment(0.125, 1.0, 4, 5.0, 7, &opts).unwrap();
        let b = bilinear_ratio_experiment(0.125, 1.0, 4, 5.0, 7, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.max_ratio >= a.median_ratio && a.median_ratio > 0.0);
    }
}
