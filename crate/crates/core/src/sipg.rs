//! Shifted-inverse-power two-grid scheme.
//!
//! For each target index `j`: solve the eigenproblem on the coarse mesh,
//! solve `(A_h - lambda_{j,H} B_h) u~ = b_w(u_{j,H}, .)` once on the fine
//! mesh and take the Rayleigh quotient of `u~`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigsolve::{
    fix_sign, is_acceptable, rayleigh_quotient, smallest_eigs, solve_shifted_with, EigenOptions, EigenPair,
    ShiftedBackend,
};
use crate::error::{Result, WgError};
use crate::mesh::containment_map;
use crate::polyspace::{ElementBasis, QuadratureRule};
use crate::wg::{Discretization, ElementSize, ProblemKind, WgFunction, WgSpace, DEFAULT_EPSILON};

/// What to do when a shift lands (numerically) on a fine eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NearSingularPolicy {
    /// Abort with [`WgError::NearSingularShift`].
    #[default]
    Fail,
    /// Keep the pivoted solution and attach a warning to the target.
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SipgConfig {
    pub kind: ProblemKind,
    pub degree: usize,
    pub epsilon: f64,
    pub element_size: ElementSize,
    pub coarse_level: u32,
    pub fine_level: u32,
    pub num_eigs: usize,
    #[serde(skip)]
    pub eig: EigenOptions,
    pub near_singular: NearSingularPolicy,
    pub backend: ShiftedBackend,
}

impl SipgConfig {
    pub fn new(kind: ProblemKind, degree: usize, coarse_level: u32, fine_level: u32, num_eigs: usize) -> Self {
        Self {
            kind,
            degree,
            epsilon: DEFAULT_EPSILON,
            element_size: ElementSize::Side,
            coarse_level,
            fine_level,
            num_eigs,
            eig: EigenOptions::default(),
            near_singular: NearSingularPolicy::Fail,
            backend: ShiftedBackend::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fine_level <= self.coarse_level {
            return Err(WgError::LevelOrder {
                coarse: self.coarse_level,
                fine: self.fine_level,
            });
        }
        if self.num_eigs == 0 {
            return Err(WgError::InvalidConfig("at least one target eigenpair is required".into()));
        }
        if self.degree < self.kind.min_degree() {
            return Err(WgError::DegreeTooLow {
                problem: self.kind.name(),
                degree: self.degree,
                minimum: self.kind.min_degree(),
            });
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(WgError::InvalidEpsilon(self.epsilon));
        }
        Ok(())
    }

    fn space(&self, level: u32) -> Result<WgSpace> {
        Ok(WgSpace::uniform(level, self.kind, self.degree, self.epsilon)?.with_element_size(self.element_size))
    }

    pub fn coarse_space(&self) -> Result<WgSpace> {
        self.space(self.coarse_level)
    }

    pub fn fine_space(&self) -> Result<WgSpace> {
        self.space(self.fine_level)
    }
}

/// `F_psi = (u_{0,H}, psi_0)` for every fine basis function `psi`.
///
/// The coarse interior polynomial restricted to a fine element is a
/// polynomial of the same degree, so a Gauss rule exact for degree `2k`
/// integrates every entry exactly. Edge entries are zero.
pub fn cross_mass_rhs(coarse: &WgFunction, fine: &WgSpace) -> Result<Vec<f64>> {
    let cspace = coarse.space();
    if cspace.degree() != fine.degree() || cspace.kind() != fine.kind() {
        return Err(WgError::InvalidConfig(
            "coarse and fine spaces must share problem kind and degree".into(),
        ));
    }
    let cmesh = cspace.mesh();
    let fmesh = fine.mesh();
    let parent = containment_map(cmesh, fmesh)?;
    let k = fine.degree();
    let basis = ElementBasis::new(k);
    let rule = QuadratureRule::exact_for(2 * k);
    let fine_values: Vec<Vec<f64>> = rule.points.iter().map(|p| basis.eval(p[0], p[1])).collect();
    let nb = basis.len();

    let blocks: Vec<Vec<f64>> = (0..fmesh.num_elements())
        .into_par_iter()
        .map(|t| {
            let fsq = fmesh.element_square(t);
            let csq = cmesh.element_square(parent[t]);
            let c = coarse.interior(parent[t]);
            let mut block = vec![0.0; nb];
            for ((p, w), psi) in rule.iter().zip(&fine_values) {
                let [x, y] = fsq.to_global(p[0], p[1]);
                let [cx, cy] = csq.to_local(x, y);
                let u: f64 = basis.eval(cx, cy).iter().zip(c).map(|(phi, ci)| phi * ci).sum();
                let uw = u * w;
                for (b, v) in block.iter_mut().zip(psi) {
                    *b += uw * v;
                }
            }
            let area = fsq.area();
            block.iter_mut().for_each(|b| *b *= area);
            block
        })
        .collect();

    let mut rhs = vec![0.0; fine.num_dofs()];
    for (t, block) in blocks.into_iter().enumerate() {
        rhs[fine.element_dofs(t)].copy_from_slice(&block);
    }
    Ok(rhs)
}

/// Steps 2 and 3 for one coarse eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SipgTarget {
    /// Zero-based eigenvalue index.
    pub index: usize,
    pub coarse_value: f64,
    #[serde(skip)]
    pub coarse_vector: Vec<f64>,
    /// Unnormalized fine solution `u~_h`.
    #[serde(skip)]
    pub raw: Vec<f64>,
    /// Rayleigh quotient `lambda~_h`.
    pub rayleigh: f64,
    /// `u~_h / ||u~_h||`, sign-normalized.
    #[serde(skip)]
    pub normalized: Vec<f64>,
    /// Backward error of the shifted solve.
    pub residual: f64,
    pub amplification: f64,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SipgTimings {
    pub coarse_assembly: f64,
    pub coarse_eigensolve: f64,
    pub fine_assembly: f64,
    /// Shifted solves and Rayleigh quotients.
    pub fine_solves: f64,
}

impl SipgTimings {
    pub fn total(&self) -> f64 {
        self.coarse_assembly + self.coarse_eigensolve + self.fine_assembly + self.fine_solves
    }
}

#[derive(Debug, Clone)]
pub struct SipgResult {
    pub config: SipgConfig,
    pub coarse: Discretization,
    pub targets: Vec<SipgTarget>,
    pub timings: SipgTimings,
}

/// Outcome of one fine-level shifted solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub raw: Vec<f64>,
    pub rayleigh: f64,
    pub normalized: Vec<f64>,
    pub residual: f64,
    pub amplification: f64,
    pub acceptable: bool,
}

/// Solves `(A - shift B) u~ = b_w(coarse, .)` on `fine` and forms the
/// Rayleigh quotient. Equal levels are allowed here.
pub fn shifted_inverse_step(
    fine: &Discretization,
    coarse: &WgFunction,
    shift: f64,
    backend: ShiftedBackend,
) -> Result<StepOutcome> {
    let rhs = cross_mass_rhs(coarse, &fine.space)?;
    let sol = solve_shifted_with(&fine.forms, shift, &rhs, backend)?;
    let acceptable = is_acceptable(&sol);
    let rayleigh = rayleigh_quotient(&fine.forms, &sol.x)?;
    let norm = fine.forms.mass_norm_sq(&sol.x).sqrt();
    let mut normalized: Vec<f64> = sol.x.iter().map(|x| x / norm).collect();
    fix_sign(&mut normalized, fine.space.num_interior_dofs());
    Ok(StepOutcome {
        raw: sol.x,
        rayleigh,
        normalized,
        residual: sol.residual,
        amplification: sol.amplification,
        acceptable,
    })
}

/// Runs the two-grid scheme against an already assembled fine level.
pub fn run_sipg_on(config: &SipgConfig, fine: &Discretization) -> Result<SipgResult> {
    config.validate()?;
    if fine.space.level() != config.fine_level
        || fine.space.degree() != config.degree
        || fine.space.kind() != config.kind
    {
        return Err(WgError::InvalidConfig(
            "fine discretization does not match the configuration".into(),
        ));
    }
    let mut timings = SipgTimings::default();

    let t = Instant::now();
    let coarse = Discretization::from_space(config.coarse_space()?);
    timings.coarse_assembly = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let pairs = smallest_eigs(&coarse.forms, config.num_eigs, &config.eig)?;
    timings.coarse_eigensolve = t.elapsed().as_secs_f64();

    let mut targets = Vec::with_capacity(pairs.len());
    for (index, pair) in pairs.into_iter().enumerate() {
        targets.push(fine_target(config, &coarse, fine, index, pair, &mut timings)?);
    }
    Ok(SipgResult {
        config: config.clone(),
        coarse,
        targets,
        timings,
    })
}

fn fine_target(
    config: &SipgConfig,
    coarse: &Discretization,
    fine: &Discretization,
    index: usize,
    pair: EigenPair,
    timings: &mut SipgTimings,
) -> Result<SipgTarget> {
    let coarse_fn = WgFunction::new(&coarse.space, pair.vector)?;
    let t = Instant::now();
    let step = shifted_inverse_step(fine, &coarse_fn, pair.value, config.backend)?;
    timings.fine_solves += t.elapsed().as_secs_f64();

    let warning = if step.acceptable {
        None
    } else {
        match config.near_singular {
            NearSingularPolicy::Fail => {
                return Err(WgError::NearSingularShift {
                    index,
                    shift: pair.value,
                    residual: step.residual,
                    amplification: step.amplification,
                })
            }
            NearSingularPolicy::Warn => Some(format!(
                "shift {:.10e} is nearly singular on the fine mesh (residual {:.3e}, amplification {:.3e})",
                pair.value, step.residual, step.amplification
            )),
        }
    };

    Ok(SipgTarget {
        index,
        coarse_value: pair.value,
        coarse_vector: coarse_fn.into_coeffs(),
        raw: step.raw,
        rayleigh: step.rayleigh,
        normalized: step.normalized,
        residual: step.residual,
        amplification: step.amplification,
        warning,
    })
}

/// Algorithm 2 end to end, assembling the fine level itself. The fine
/// discretization is returned alongside for error evaluation.
pub fn run_sipg(config: &SipgConfig) -> Result<(Discretization, SipgResult)> {
    config.validate()?;
    let t = Instant::now();
    let fine = Discretization::from_space(config.fine_space()?);
    let assembly = t.elapsed().as_secs_f64();
    let mut result = run_sipg_on(config, &fine)?;
    result.timings.fine_assembly = assembly;
    Ok((fine, result))
}

/// The direct method on one level: the `m` smallest pencil eigenpairs.
pub fn run_direct(disc: &Discretization, m: usize, options: &EigenOptions) -> Result<Vec<EigenPair>> {
    smallest_eigs(&disc.forms, m, options)
}
