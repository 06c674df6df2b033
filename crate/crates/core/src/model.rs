//! The XY chain in a transverse field, its free-fermion ground state and the
//! lattice Hamiltonian / momentum densities.
//!
//! ```text
//! H = -1/2 sum_j [ (1+g)/2 X_j X_{j+1} + (1-g)/2 Y_j Y_{j+1} + lambda Z_j ]
//! ```
//!
//! After Jordan–Wigner the bond term becomes
//! `1/2 (a+_{j+1} a_j + g a_{j+1} a_j + h.c.) - lambda/2 (n_j + n_{j+1})`.

use std::f64::consts::PI;

use faer::c64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::quadratic::{Basis, QuadraticOperator};

/// Absolute tolerance on the k-integrals defining the correlators.
pub const CORRELATOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Universality {
    /// Critical line `lambda = 1, gamma != 0`: Ising CFT, `c = 1/2`.
    Ising,
    /// Critical segment `0 <= lambda < 1, gamma = 0`: free boson, `c = 1`.
    Boson,
}

impl Universality {
    pub fn central_charge(self) -> Rational64 {
        match self {
            Universality::Ising => Rational64::new(1, 2),
            Universality::Boson => Rational64::new(1, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub gamma: f64,
    pub universality: Option<Universality>,
    /// Factor multiplying every energy density so that the low-energy
    /// excitations propagate with unit velocity.
    pub velocity_rescale: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !lambda.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite model point ({lambda}, {gamma})"
            )));
        }
        let (universality, velocity_rescale) = if lambda == 1.0 && gamma != 0.0 {
            (Some(Universality::Ising), 1.0 / gamma.abs())
        } else if gamma == 0.0 && (0.0..1.0).contains(&lambda) {
            // Fermi velocity sin(k_F) with cos(k_F) = lambda.
            (
                Some(Universality::Boson),
                1.0 / (1.0 - lambda * lambda).sqrt(),
            )
        } else {
            (None, 1.0)
        };
        Ok(Self {
            lambda,
            gamma,
            universality,
            velocity_rescale,
        })
    }

    pub fn ising() -> Self {
        Self::new(1.0, 1.0).expect("valid preset")
    }

    pub fn xy(gamma: f64) -> Self {
        Self::new(1.0, gamma).expect("valid preset")
    }

    pub fn xx() -> Self {
        Self::new(0.0, 0.0).expect("valid preset")
    }

    pub fn is_critical(&self) -> bool {
        self.universality.is_some()
    }

    pub fn central_charge(&self) -> Option<Rational64> {
        self.universality.map(Universality::central_charge)
    }

    /// Central charge as a float, or an error off criticality.
    pub fn require_central_charge(&self) -> Result<f64> {
        self.central_charge()
            .map(|c| *c.numer() as f64 / *c.denom() as f64)
            .ok_or(Error::NotCritical {
                lambda: self.lambda,
                gamma: self.gamma,
            })
    }

    /// Particle number is conserved (no pairing terms).
    pub fn conserves_number(&self) -> bool {
        self.gamma == 0.0
    }

    fn is_ising_point(&self) -> bool {
        self.lambda == 1.0 && self.gamma == 1.0
    }

    fn is_xx_point(&self) -> bool {
        self.lambda == 0.0 && self.gamma == 0.0
    }
}

/// Single-particle energy `omega_k`, including the velocity rescale.
pub fn dispersion(params: &ModelParams, k: f64) -> f64 {
    params.velocity_rescale * bare_dispersion(params, k)
}

fn bare_dispersion(params: &ModelParams, k: f64) -> f64 {
    let (s, c) = k.sin_cos();
    let x = c - params.lambda;
    let y = params.gamma * s;
    x.hypot(y)
}

/// Ground-state two-point functions at separation `d = n - m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlator {
    /// `<a_n a+_m>`.
    pub particle_hole: f64,
    /// `<a_n a_m>`.
    pub pairing: f64,
}

/// Infinite-chain correlators; both are real throughout the XY family.
pub fn correlator(params: &ModelParams, d: i64) -> Result<Correlator> {
    let delta = if d == 0 { 0.5 } else { 0.0 };
    if params.is_ising_point() {
        let df = d as f64;
        let denom = PI * (4.0 * df * df - 1.0);
        return Ok(Correlator {
            particle_hole: delta + 1.0 / denom,
            pairing: -2.0 * df / denom,
        });
    }
    if params.is_xx_point() {
        let x = PI * d as f64 / 2.0;
        let sinc = if d == 0 { 1.0 } else { x.sin() / x };
        return Ok(Correlator {
            particle_hole: 0.5 * sinc,
            pairing: 0.0,
        });
    }
    correlator_by_quadrature(params, d)
}

/// Evaluates the k-integrals numerically regardless of closed forms.
pub fn correlator_by_quadrature(params: &ModelParams, d: i64) -> Result<Correlator> {
    let mut breaks = vec![0.0];
    if params.lambda.abs() < 1.0 {
        breaks.push(params.lambda.acos());
    }
    breaks.push(PI);
    let freq = d.unsigned_abs() as f64 + 1.0;
    let df = d as f64;
    let lambda = params.lambda;
    let gamma = params.gamma;

    // The integrands are even in k, so integrate over (0, pi) and double.
    let hole = quad::integrate(
        |k| {
            let w = bare_dispersion(params, k);
            if w == 0.0 {
                0.0
            } else {
                (k.cos() - lambda) * (df * k).cos() / w
            }
        },
        &breaks,
        freq,
        CORRELATOR_TOL,
    )?;
    let pair = if gamma == 0.0 || d == 0 {
        0.0
    } else {
        quad::integrate(
            |k| {
                let w = bare_dispersion(params, k);
                if w == 0.0 {
                    0.0
                } else {
                    gamma * (df * k).sin() * k.sin() / w
                }
            },
            &breaks,
            freq,
            CORRELATOR_TOL,
        )?
    };
    Ok(Correlator {
        particle_hole: if d == 0 { 0.5 } else { 0.0 } + hole / (2.0 * PI),
        pairing: -pair / (2.0 * PI),
    })
}

/// Correlators for every separation `0..count`, evaluated in parallel.
pub fn correlator_table(params: &ModelParams, count: usize) -> Result<Vec<Correlator>> {
    (0..count as i64)
        .into_par_iter()
        .map(|d| correlator(params, d))
        .collect()
}

/// Ground-state expectation of the bare (unrescaled, unshifted) bond term.
pub fn ground_energy_density(params: &ModelParams) -> Result<f64> {
    let c0 = correlator(params, 0)?;
    let c1 = correlator(params, 1)?;
    // <a+_{j+1} a_j> = -<a_j a+_{j+1}>, <n_j> = 1 - <a_j a+_j>.
    Ok(-c1.particle_hole + params.gamma * c1.pairing - params.lambda * (1.0 - c0.particle_hole))
}

/// Coefficients shared by all local densities of one model.
#[derive(Debug, Clone, Copy)]
pub struct Densities {
    pub params: ModelParams,
    energy_offset: f64,
}

impl Densities {
    pub fn new(params: ModelParams) -> Result<Self> {
        Ok(Self {
            params,
            energy_offset: ground_energy_density(&params)?,
        })
    }

    /// Adds `weight * h_{p,p+1}` (0-based left site `p`) to `op`.
    pub fn add_bond(&self, op: &mut QuadraticOperator, p: usize, weight: c64) {
        let v = self.params.velocity_rescale;
        let q = p + 1;
        // The weight multiplies the Hermitian density as a whole, so it is
        // not conjugated on the h.c. terms.
        let w = weight * v;
        op.add_one_body(q, p, 0.5 * w);
        op.add_one_body(p, q, 0.5 * w);
        if self.params.gamma != 0.0 {
            let g = 0.5 * self.params.gamma * w;
            op.add_pair_annihilation(q, p, g);
            op.add_pair_creation(p, q, g);
        }
        if self.params.lambda != 0.0 {
            op.add_one_body(p, p, -0.5 * self.params.lambda * w);
            op.add_one_body(q, q, -0.5 * self.params.lambda * w);
        }
        op.add_constant(-self.energy_offset * w);
    }

    /// Adds `weight * p_{m,m+1,m+2}` (0-based leftmost site `m`) to `op`.
    pub fn add_momentum(&self, op: &mut QuadraticOperator, m: usize, weight: c64) {
        let v = self.params.velocity_rescale;
        let (lambda, gamma) = (self.params.lambda, self.params.gamma);
        let (c, p) = (m + 1, m + 2);
        let w = weight * (v * v) * c64::new(0.0, 0.25);
        if gamma != 1.0 && gamma != -1.0 {
            op.add_one_body(p, m, (1.0 - gamma * gamma) * w);
            op.add_one_body(m, p, -(1.0 - gamma * gamma) * w);
        }
        if lambda != 0.0 {
            for (i, j) in [(c, m), (p, c)] {
                op.add_one_body(i, j, -lambda * w);
                op.add_one_body(j, i, lambda * w);
            }
        }
        if gamma != 0.0 && lambda != 0.0 {
            // i/4 g l (a_c a_m - a_p a_c) + h.c.
            op.add_pair_annihilation(c, m, gamma * lambda * w);
            op.add_pair_creation(m, c, -gamma * lambda * w);
            op.add_pair_annihilation(p, c, -gamma * lambda * w);
            op.add_pair_creation(c, p, gamma * lambda * w);
        }
    }
}

/// Lattice Hamiltonian density `h_{j,j+1}` on an interval of `sites` sites
/// (`1 <= bond <= sites - 1`), shifted to vanish in the infinite-chain
/// ground state and multiplied by the velocity rescale.
pub fn hamiltonian_density(
    params: &ModelParams,
    bond: usize,
    sites: usize,
) -> Result<QuadraticOperator> {
    if sites < 2 || bond == 0 || bond >= sites {
        return Err(Error::IndexOutOfRange {
            index: bond,
            lo: 1,
            hi: sites.saturating_sub(1),
        });
    }
    let dens = Densities::new(*params)?;
    let mut op = QuadraticOperator::zeros(Basis::Site, sites);
    dens.add_bond(&mut op, bond - 1, c64::new(1.0, 0.0));
    Ok(op)
}

/// Lattice momentum density `p_{j-1,j,j+1} = -i [h_{j-1,j}, h_{j,j+1}]`
/// centred on site `center` (`2 <= center <= sites - 1`).
pub fn momentum_density(
    params: &ModelParams,
    center: usize,
    sites: usize,
) -> Result<QuadraticOperator> {
    if sites < 3 || center < 2 || center >= sites {
        return Err(Error::IndexOutOfRange {
            index: center,
            lo: 2,
            hi: sites.saturating_sub(1),
        });
    }
    let dens = Densities::new(*params)?;
    let mut op = QuadraticOperator::zeros(Basis::Site, sites);
    dens.add_momentum(&mut op, center - 2, c64::new(1.0, 0.0));
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let ising = ModelParams::ising();
        assert_eq!(ising.universality, Some(Universality::Ising));
        assert_eq!(ising.velocity_rescale, 1.0);
        let xy = ModelParams::xy(0.9);
        assert!((xy.velocity_rescale - 1.0 / 0.9).abs() < 1e-15);
        let xx = ModelParams::xx();
        assert_eq!(xx.universality, Some(Universality::Boson));
        assert_eq!(xx.central_charge(), Some(Rational64::new(1, 1)));
        assert!(ModelParams::new(0.5, 0.5).unwrap().universality.is_none());
        assert!(ModelParams::new(1.0, 0.0).unwrap().universality.is_none());
        assert!(ModelParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn dispersion_examples() {
        assert!((dispersion(&ModelParams::ising(), PI) - 2.0).abs() < 1e-15);
        assert!((dispersion(&ModelParams::xx(), 0.0) - 1.0).abs() < 1e-15);
        assert!((dispersion(&ModelParams::xy(0.9), PI) - 2.0 / 0.9).abs() < 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        let c = correlator(&ModelParams::ising(), 0).unwrap();
        assert!((c.particle_hole - (0.5 - 1.0 / PI)).abs() < 1e-15);
        assert_eq!(c.pairing, 0.0);
        let c = correlator(&ModelParams::xx(), 0).unwrap();
        assert_eq!(c.particle_hole, 0.5);
        assert_eq!(c.pairing, 0.0);
    }

    #[test]
    fn ising_energy_density() {
        let e = ground_energy_density(&ModelParams::ising()).unwrap();
        assert!((e - (-2.0 / PI - 0.5)).abs() < 1e-14);
    }

    #[test]
    fn density_index_errors() {
        let p = ModelParams::ising();
        assert!(hamiltonian_density(&p, 0, 4).is_err());
        assert!(hamiltonian_density(&p, 4, 4).is_err());
        assert!(momentum_density(&p, 1, 4).is_err());
        assert!(momentum_density(&p, 4, 4).is_err());
        assert!(momentum_density(&p, 3, 4).is_ok());
    }
}
