use super::ifd::ifd_step;
use super::licfp::{li_cfp_step, startup_step};
use super::rk3::rk3_step;
use super::{PdeParams, SchemeKind, SolverConfig, StepOutcome};
use crate::diagnostics::{
    explicit_energy, explicit_history_increment, ifd_energy, ifd_history_increment, licfp_energy,
    licfp_history_increment, mass, relative_residuals, DiagnosticsRow, ExactSolution,
};
use crate::error::{DnlsError, Result};
use crate::grid::{Field, TimeGrid};
use crate::operators::SpectralLaplacian;

/// Mass growth factor beyond which the explicit method is declared unstable.
/// The exact gauged solution conserves mass, so growth by this much is blow-up.
const EXPLICIT_MASS_GROWTH_LIMIT: f64 = 1e6;

/// Time-stepping state for one scheme.
///
/// Energies follow each scheme's own conservation law. The linearly implicit
/// energy `E^k` needs the pair `(U^{k+1}, U^k)`, so at level `n >= 1` the run
/// reports `E^{n-1}` from the stored pair; at level 0 it reports `E^0`,
/// computing `U¹` ahead of time and reusing it for the first step.
#[derive(Debug, Clone)]
pub struct SchemeRun {
    kind: SchemeKind,
    params: PdeParams,
    tgrid: TimeGrid,
    cfg: SolverConfig,
    op: SpectralLaplacian,
    step: usize,
    current: Field,
    previous: Option<Field>,
    history: f64,
    first_step: Option<StepOutcome>,
    initial_mass: f64,
}

impl SchemeRun {
    pub fn new(
        kind: SchemeKind,
        initial: Field,
        params: PdeParams,
        tgrid: TimeGrid,
        cfg: SolverConfig,
    ) -> Self {
        let op = SpectralLaplacian::new(*initial.grid());
        Self {
            kind,
            params,
            tgrid,
            cfg,
            op,
            step: 0,
            initial_mass: mass(&initial),
            current: initial,
            previous: None,
            history: 0.0,
            first_step: None,
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn params(&self) -> &PdeParams {
        &self.params
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn operator(&self) -> &SpectralLaplacian {
        &self.op
    }

    /// Index `n` of the current level.
    pub fn step_index(&self) -> usize {
        self.step
    }

    /// `t_n`
    pub fn time(&self) -> f64 {
        self.tgrid.time(self.step as f64)
    }

    pub fn current(&self) -> &Field {
        &self.current
    }

    /// `U^{n-1}` for the three-level scheme once `n >= 1`.
    pub fn previous(&self) -> Option<&Field> {
        self.previous.as_ref()
    }

    /// Running damped-history sum entering the energy currently reported.
    pub fn history(&self) -> f64 {
        self.history
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.tgrid.steps()
    }

    pub fn mass(&self) -> f64 {
        mass(&self.current)
    }

    fn tau(&self) -> f64 {
        self.tgrid.tau()
    }

    fn wrap(&self, err: DnlsError) -> DnlsError {
        match err {
            e @ DnlsError::Unstable { .. } => e,
            e => DnlsError::StepFailed {
                step: self.step + 1,
                source: Box::new(e),
            },
        }
    }

    fn ensure_first_step(&mut self) -> Result<()> {
        if self.first_step.is_none() {
            let out = startup_step(&self.op, &self.current, &self.params, self.tau(), &self.cfg)
                .map_err(|e| self.wrap(e))?;
            self.first_step = Some(out);
        }
        Ok(())
    }

    /// Advance one level, `U^n → U^{n+1}`.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let tau = self.tau();
        let t_n = self.time();
        let outcome = match self.kind {
            SchemeKind::LiCfp => match self.previous.take() {
                None => {
                    self.ensure_first_step()?;
                    self.first_step.take().expect("startup step computed")
                }
                Some(prev) => {
                    let out = li_cfp_step(
                        &self.op,
                        &prev,
                        &self.current,
                        t_n,
                        &self.params,
                        tau,
                        &self.cfg,
                    );
                    let out = match out {
                        Ok(out) => out,
                        Err(e) => {
                            self.previous = Some(prev);
                            return Err(self.wrap(e));
                        }
                    };
                    // E^n needs history through l = n, built from (U^{n-1}, U^n)
                    self.history += licfp_history_increment(
                        &prev,
                        &self.current,
                        t_n - tau,
                        &self.params,
                        tau,
                    )?;
                    out
                }
            },
            SchemeKind::Ifd => {
                let out = ifd_step(&self.op, &self.current, t_n, &self.params, tau, &self.cfg)
                    .map_err(|e| self.wrap(e))?;
                self.history +=
                    ifd_history_increment(&self.current, self.step + 1, tau, &self.params);
                out
            }
            SchemeKind::Rk3 => {
                let field = rk3_step(
                    &self.op,
                    &self.current,
                    t_n,
                    self.step + 1,
                    &self.params,
                    tau,
                )?;
                let grown = mass(&field);
                if self.initial_mass > 0.0 && grown > EXPLICIT_MASS_GROWTH_LIMIT * self.initial_mass
                {
                    return Err(DnlsError::Unstable {
                        step: self.step + 1,
                        reason: format!("mass grew from {:.3e} to {grown:.3e}", self.initial_mass),
                    });
                }
                self.history += explicit_history_increment(&self.current, t_n, tau, &self.params);
                StepOutcome {
                    field,
                    iterations: 1,
                    residual: 0.0,
                }
            }
        };
        let next = outcome.field.clone();
        let old = std::mem::replace(&mut self.current, next);
        if self.kind == SchemeKind::LiCfp {
            self.previous = Some(old);
        }
        self.step += 1;
        Ok(outcome)
    }

    /// Energy reported at the current level; see the type docs for the
    /// linearly implicit indexing.
    pub fn energy(&mut self) -> Result<f64> {
        match self.kind {
            SchemeKind::LiCfp => match &self.previous {
                Some(prev) => licfp_energy(
                    &self.op,
                    &self.current,
                    prev,
                    self.tgrid.time(self.step as f64 - 1.0),
                    &self.params,
                    self.history,
                ),
                None => {
                    self.ensure_first_step()?;
                    let first = &self
                        .first_step
                        .as_ref()
                        .expect("startup step computed")
                        .field;
                    licfp_energy(&self.op, first, &self.current, 0.0, &self.params, 0.0)
                }
            },
            SchemeKind::Ifd => Ok(ifd_energy(
                &self.current,
                self.step,
                self.tau(),
                &self.params,
                self.history,
            )),
            SchemeKind::Rk3 => explicit_energy(
                &self.op,
                &self.current,
                self.time(),
                &self.params,
                self.history,
            ),
        }
    }

    /// Diagnostics at the current level relative to the reference `(M⁰, E⁰)`.
    pub fn diagnostics(
        &mut self,
        reference: (f64, f64),
        exact: Option<&ExactSolution>,
    ) -> Result<DiagnosticsRow> {
        let m = self.mass();
        let e = self.energy()?;
        let (rm, re) = relative_residuals(m, reference.0, e, reference.1).unwrap_or_else(|_| {
            // zero references: fall back to absolute residuals
            ((m - reference.0).abs(), (e - reference.1).abs())
        });
        let errors = match exact {
            Some(ex) => Some(ex.error_norms(&self.current, self.time())?),
            None => None,
        };
        Ok(DiagnosticsRow {
            step: self.step,
            time: self.time(),
            mass: m,
            energy: e,
            rel_mass_residual: rm,
            rel_energy_residual: re,
            errors,
        })
    }
}

/// Result of [`run_to_time`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<DiagnosticsRow>,
    pub final_field: Field,
    /// Total solver iterations over all steps.
    pub iterations: usize,
}

/// March `initial` to the final time of `tgrid`, recording diagnostics at
/// level 0, every `sample_every` levels, and at the final level.
pub fn run_to_time(
    initial: Field,
    kind: SchemeKind,
    params: PdeParams,
    tgrid: TimeGrid,
    cfg: SolverConfig,
    sample_every: usize,
    exact: Option<&ExactSolution>,
) -> Result<RunOutput> {
    if sample_every == 0 {
        return Err(DnlsError::InvalidParameter(
            "sample_every must be positive".into(),
        ));
    }
    let mut run = SchemeRun::new(kind, initial, params, tgrid, cfg);
    let m0 = run.mass();
    let e0 = run.energy()?;
    let mut rows = vec![run.diagnostics((m0, e0), exact)?];
    let mut iterations = 0;
    while !run.is_finished() {
        iterations += run.step()?.iterations;
        let n = run.step_index();
        if n.is_multiple_of(sample_every) || run.is_finished() {
            rows.push(run.diagnostics((m0, e0), exact)?);
        }
    }
    Ok(RunOutput {
        rows,
        final_field: run.current,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid3;
    use num_complex::Complex64;

    fn setup(n: usize) -> (Field, ExactSolution) {
        let g = Grid3::cube(n).unwrap();
        let ex = ExactSolution::new(Complex64::new(1.0, 0.0), [1, 1, 1], PdeParams::default());
        (ex.u(0.0, &g), ex)
    }

    #[test]
    fn zero_steps_emit_only_the_initial_row() {
        let (u0, ex) = setup(4);
        let tg = TimeGrid::from_final_time(0.1, 0.0).unwrap();
        for kind in [SchemeKind::LiCfp, SchemeKind::Ifd, SchemeKind::Rk3] {
            let out = run_to_time(
                u0.clone(),
                kind,
                PdeParams::default(),
                tg,
                SolverConfig::default(),
                1,
                Some(&ex),
            )
            .unwrap();
            assert_eq!(out.rows.len(), 1);
            assert_eq!(out.rows[0].rel_mass_residual, 0.0);
            assert_eq!(out.rows[0].rel_energy_residual, 0.0);
        }
    }

    #[test]
    fn sampling_includes_final_level() {
        let (u0, _) = setup(4);
        let tg = TimeGrid::new(0.05, 7).unwrap();
        let out = run_to_time(
            u0,
            SchemeKind::LiCfp,
            PdeParams::default(),
            tg,
            SolverConfig::default(),
            3,
            None,
        )
        .unwrap();
        let steps: Vec<usize> = out.rows.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 3, 6, 7]);
        assert!(out.rows.iter().all(|r| r.errors.is_none()));
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let (u0, ex) = setup(8);
        let tg = TimeGrid::new(0.05, 10).unwrap();
        let run = || {
            run_to_time(
                u0.clone(),
                SchemeKind::LiCfp,
                PdeParams::default(),
                tg,
                SolverConfig::default(),
                1,
                Some(&ex),
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.final_field, b.final_field);
    }

    #[test]
    fn solver_failures_carry_the_step_index() {
        let g = Grid3::cube(4).unwrap();
        let u0 = Field::from_fn(g, |[x, y, _]| {
            Complex64::new(1.0 + 0.5 * x.cos(), 0.3 * y.sin())
        });
        let tg = TimeGrid::new(0.1, 5).unwrap();
        let cfg = SolverConfig::new(1e-14, 2).unwrap();
        let err = run_to_time(
            u0,
            SchemeKind::LiCfp,
            PdeParams::default(),
            tg,
            cfg,
            1,
            None,
        )
        .unwrap_err();
        assert!(
            matches!(err, DnlsError::StepFailed { step: 1, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn explicit_blow_up_is_detected() {
        let g = Grid3::cube(16).unwrap();
        let u0 = Field::from_fn(g, |[x, y, z]| {
            Complex64::new(
                1.0 + 0.1 * (7.0 * x).cos() * (5.0 * y).sin(),
                0.1 * (6.0 * z).sin(),
            )
        });
        let tg = TimeGrid::new(0.1, 50).unwrap();
        let err = run_to_time(
            u0,
            SchemeKind::Rk3,
            PdeParams::default(),
            tg,
            SolverConfig::default(),
            1,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, DnlsError::Unstable { .. }), "{err:?}");
    }

    #[test]
    fn zero_sampling_interval_is_rejected() {
        let (u0, _) = setup(4);
        let tg = TimeGrid::new(0.1, 1).unwrap();
        assert!(run_to_time(
            u0,
            SchemeKind::Ifd,
            PdeParams::default(),
            tg,
            SolverConfig::default(),
            0,
            None
        )
        .is_err());
    }
}
