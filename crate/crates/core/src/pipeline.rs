//! End-to-end runs over a ladder of interval sizes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, ComparisonTable, EpsilonFit, LatticeLevel, MatchGuide};
use crate::cft::{ExactTable, TowerSpectrum};
use crate::error::{Error, Result};
use crate::gaussian::{self, SchmidtState};
use crate::lattice::{self, LatticeProfile};
use crate::model::ModelParams;

/// Default number of Schmidt states.
pub const DEFAULT_STATES: usize = 7;

/// Lattice states beyond the CFT window offered to the matcher.
pub const MATCH_MARGIN: usize = 6;

/// Largest dimension mismatch accepted when matching lattice to CFT states.
pub const MATCH_TOLERANCE: f64 = 0.5;

/// The three studied model points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Ising,
    Xy09,
    Xx,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Ising, Preset::Xy09, Preset::Xx];

    pub fn params(self) -> ModelParams {
        match self {
            Preset::Ising => ModelParams::ising(),
            Preset::Xy09 => ModelParams::xy(0.9),
            Preset::Xx => ModelParams::xx(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ising => "ising",
            Preset::Xy09 => "xy09",
            Preset::Xx => "xx",
        }
    }

    /// Sizes `2N` used for the cutoff fit.
    pub fn ladder(self) -> Vec<usize> {
        match self {
            Preset::Ising | Preset::Xy09 => vec![64, 128, 256, 512, 1024],
            Preset::Xx => vec![512, 1024, 2048, 4096, 8192],
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ising" => Ok(Preset::Ising),
            "xy09" => Ok(Preset::Xy09),
            "xx" => Ok(Preset::Xx),
            other => Err(Error::InvalidArgument(format!(
                "unknown model '{other}' (expected ising, xy09 or xx)"
            ))),
        }
    }
}

/// A model point with a display name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub name: String,
    pub params: ModelParams,
    pub preset: Option<Preset>,
}

impl Model {
    pub fn preset(preset: Preset) -> Self {
        Self {
            name: preset.name().into(),
            params: preset.params(),
            preset: Some(preset),
        }
    }

    pub fn custom(lambda: f64, gamma: f64) -> Result<Self> {
        let params = ModelParams::new(lambda, gamma)?;
        params.require_central_charge()?;
        let preset = Preset::ALL.into_iter().find(|p| p.params() == params);
        Ok(Self {
            name: preset.map_or_else(
                || format!("lambda={lambda},gamma={gamma}"),
                |p| p.name().into(),
            ),
            params,
            preset,
        })
    }

    pub fn tower(&self) -> Result<TowerSpectrum> {
        let class = self.params.universality.ok_or(Error::NotCritical {
            lambda: self.params.lambda,
            gamma: self.params.gamma,
        })?;
        Ok(TowerSpectrum::for_class(class))
    }
}

fn check_size(size: usize) -> Result<()> {
    if size < 4 || !size.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sizes must be even and at least 4, got {size}"
        )));
    }
    Ok(())
}

/// Entanglement spectrum of one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRun {
    pub size: usize,
    pub epsilon: f64,
    pub l: f64,
    /// Single-particle entanglement energies `e_k`, ascending.
    pub single_particle: Vec<f64>,
    pub states: Vec<SchmidtState>,
    /// Rescaled dimensions `h_a`.
    pub dimensions: Vec<f64>,
    pub entropy: f64,
}

pub fn run_spectrum(
    params: &ModelParams,
    size: usize,
    count: usize,
    epsilon: f64,
) -> Result<SpectrumRun> {
    check_size(size)?;
    let profile = LatticeProfile::new(size / 2, epsilon)?;
    let cm = gaussian::build_correlation_matrix(params, size)?;
    let spec = gaussian::single_particle_spectrum(&cm)?;
    let states = gaussian::enumerate_schmidt(&spec, count)?;
    Ok(SpectrumRun {
        size,
        epsilon,
        l: profile.l(),
        dimensions: analysis::rescale_spectrum(&states, profile.l()),
        entropy: gaussian::entanglement_entropy(&spec),
        single_particle: spec.energies,
        states,
    })
}

/// First gap and entropy at one size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub size: usize,
    pub gap: f64,
    pub entropy: f64,
}

/// Gaps and entropies over a ladder, computed concurrently.
pub fn gap_ladder(params: &ModelParams, sizes: &[usize]) -> Result<Vec<GapPoint>> {
    sizes.iter().try_for_each(|&s| check_size(s))?;
    sizes
        .par_iter()
        .map(|&size| {
            let spec = gaussian::single_particle_spectrum(&gaussian::build_correlation_matrix(
                params, size,
            )?)?;
            Ok(GapPoint {
                size,
                gap: spec.gap(),
                entropy: gaussian::entanglement_entropy(&spec),
            })
        })
        .collect()
}

/// Cutoff fit and central charge over a ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRun {
    pub fit: EpsilonFit,
    pub central_charge: f64,
    pub points: Vec<GapPoint>,
}

pub fn run_fit(params: &ModelParams, sizes: &[usize]) -> Result<FitRun> {
    let points = gap_ladder(params, sizes)?;
    let sizes: Vec<usize> = points.iter().map(|p| p.size).collect();
    let gaps: Vec<f64> = points.iter().map(|p| p.gap).collect();
    let entropies: Vec<f64> = points.iter().map(|p| p.entropy).collect();
    Ok(FitRun {
        fit: analysis::fit_epsilon(&sizes, &gaps)?,
        central_charge: analysis::fit_central_charge(&sizes, &entropies)?,
        points,
    })
}

/// The cutoff to use: an explicit value, a fit over `sizes` when there are
/// at least three, or a fit over the preset ladder.
pub fn resolve_epsilon(model: &Model, sizes: &[usize], epsilon: Option<f64>) -> Result<f64> {
    if let Some(e) = epsilon {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {e}"
            )));
        }
        return Ok(e);
    }
    if sizes.len() >= 3 {
        return Ok(run_fit(&model.params, sizes)?.fit.epsilon);
    }
    match model.preset {
        Some(p) => Ok(run_fit(&model.params, &p.ladder())?.fit.epsilon),
        None => Err(Error::InvalidArgument(
            "epsilon is needed: pass it explicitly or give at least three sizes".into(),
        )),
    }
}

/// Lattice generator tables compared with the CFT at one size.
#[derive(Debug, Clone)]
pub struct VirasoroRun {
    pub size: usize,
    pub epsilon: f64,
    pub l: f64,
    /// Candidate lattice states offered to the matcher.
    pub levels: Vec<LatticeLevel>,
    /// Dominant lattice state for each CFT state.
    pub assignment: Vec<usize>,
    pub cft_dimensions: Vec<f64>,
    pub cft_tables: Vec<ExactTable>,
    pub comparisons: Vec<ComparisonTable>,
}

pub fn run_virasoro(
    params: &ModelParams,
    tower: &TowerSpectrum,
    size: usize,
    count: usize,
    ns: &[i32],
    epsilon: f64,
) -> Result<VirasoroRun> {
    check_size(size)?;
    if ns.is_empty() {
        return Err(Error::InvalidArgument("at least one n is needed".into()));
    }
    let cft_tables: Vec<ExactTable> = ns
        .iter()
        .map(|&n| tower.hn_table(n, count))
        .collect::<Result<_>>()?;
    let guide_table = tower.hn_table(1, count)?;

    let profile = LatticeProfile::new(size / 2, epsilon)?;
    let cm = gaussian::build_correlation_matrix(params, size)?;
    let (bt, spec) = gaussian::diagonalize(&cm)?;
    let candidates = (count + MATCH_MARGIN).min(if size < 64 { 1 << size } else { usize::MAX });
    let states = gaussian::enumerate_schmidt(&spec, candidates)?;
    let levels = analysis::lattice_levels(&states, &bt, profile.l());

    let lattice_tables = ns
        .iter()
        .map(|&n| lattice::schmidt_table(&lattice::build_hn(params, &profile, n)?, &bt, &states))
        .collect::<Result<Vec<_>>>()?;
    let guide = match ns.iter().position(|&n| n == 1) {
        Some(k) => lattice_tables[k].clone(),
        None => lattice::schmidt_table(&lattice::build_hn(params, &profile, 1)?, &bt, &states)?,
    };
    let matching = analysis::match_states(
        &levels,
        tower,
        count,
        MATCH_TOLERANCE,
        &[MatchGuide {
            lattice: guide.as_ref(),
            cft: &guide_table,
        }],
    )?;
    let projected: Vec<_> = lattice_tables
        .iter()
        .map(|t| matching.project(t.as_ref()))
        .collect();
    let inputs: Vec<_> = ns
        .iter()
        .zip(&projected)
        .zip(&cft_tables)
        .map(|((&n, t), c)| (n, t.as_ref(), c))
        .collect();
    let comparisons = analysis::compare_tables(&inputs)?;
    Ok(VirasoroRun {
        size,
        epsilon,
        l: profile.l(),
        assignment: (0..matching.len()).map(|i| matching.dominant(i)).collect(),
        cft_dimensions: tower
            .dimensions(count)
            .iter()
            .map(|d| num_traits::ToPrimitive::to_f64(d).unwrap_or(f64::NAN))
            .collect(),
        levels,
        cft_tables,
        comparisons,
    })
}

/// [`run_virasoro`] over a ladder, concurrently.
pub fn virasoro_ladder(
    params: &ModelParams,
    tower: &TowerSpectrum,
    sizes: &[usize],
    count: usize,
    ns: &[i32],
    epsilon: f64,
) -> Result<Vec<VirasoroRun>> {
    sizes
        .par_iter()
        .map(|&size| run_virasoro(params, tower, size, count, ns, epsilon))
        .collect()
}

/// `|F^n_{ab}|` across sizes for one table entry.
pub fn correction_series(
    runs: &[VirasoroRun],
    n: i32,
    a: usize,
    b: usize,
) -> Result<Vec<(usize, f64)>> {
    runs.iter()
        .map(|run| {
            let table = run
                .comparisons
                .iter()
                .find(|c| c.n == n)
                .ok_or_else(|| Error::InvalidArgument(format!("no table for n = {n}")))?;
            let k = table.corrections.nrows();
            if a >= k || b >= k {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    lo: 0,
                    hi: k - 1,
                });
            }
            Ok((run.size, table.corrections[(a, b)].norm()))
        })
        .collect()
}
