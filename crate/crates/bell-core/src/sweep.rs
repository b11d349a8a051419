//! Parameter sweeps over the squeezing parameter, figure presets, and
//! one-dimensional maximization of the Bell functionals.

use serde::Serialize;

use crate::dp::{bell_dp, DpGeometry};
use crate::error::{Error, Result};
use crate::gaussian::{
    evolve_cov, make_twb_cov, wigner_of_cov, ChannelParams, TwbParams, TwbWignerForm,
};
use crate::hd::{bell_hd, HdSettings};
use crate::ips::{ips_coefficients, ips_state, IpsParams, P11_MIN};
use crate::ps::{bell_ps, correlator_generic, e_ips, PsAngles};
use crate::result::{BellResult, BellTest};

/// Inclusive arithmetic grid over the squeezing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !min.is_finite() || min < 0.0 {
            return Err(Error::InvalidConfig {
                field: "r",
                reason: format!("grid minimum must be non-negative, got {min}"),
            });
        }
        if !(max >= min) {
            return Err(Error::InvalidConfig {
                field: "r",
                reason: format!("grid is empty: max {max} < min {min}"),
            });
        }
        if !(step > 0.0) {
            return Err(Error::InvalidConfig {
                field: "r",
                reason: format!("grid step must be positive, got {step}"),
            });
        }
        Ok(Self { min, max, step })
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1.0)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1.5).floor() as usize;
        (0..n)
            .map(|i| self.min + i as f64 * self.step)
            .filter(|r| *r <= self.max + self.step * 1e-9)
            .collect()
    }
}

/// Which state family the sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Twb,
    Ips,
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Twb => "twb",
            StateKind::Ips => "ips",
        }
    }
}

/// Full description of one sweep: test, state family, squeezing grid,
/// symmetric channel exposure, and the test-specific settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub test: BellTest,
    pub state: StateKind,
    pub r_grid: Grid,
    pub gamma_t: f64,
    pub n_th: f64,
    pub tau: f64,
    pub j: f64,
    pub hd: HdSettings,
    pub ps: PsAngles,
}

impl SweepConfig {
    pub fn new(test: BellTest, state: StateKind, r_grid: Grid) -> Self {
        Self {
            test,
            state,
            r_grid,
            gamma_t: 0.0,
            n_th: 0.0,
            tau: 0.9999,
            j: 1.6e-3,
            hd: HdSettings::default(),
            ps: PsAngles::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma_t.is_finite() || self.gamma_t < 0.0 {
            return Err(Error::InvalidConfig {
                field: "gamma_t",
                reason: format!("must be non-negative, got {}", self.gamma_t),
            });
        }
        if !self.n_th.is_finite() || self.n_th < 0.0 {
            return Err(Error::InvalidConfig {
                field: "n_th",
                reason: format!("must be non-negative, got {}", self.n_th),
            });
        }
        if self.state == StateKind::Ips && !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidConfig {
                field: "tau",
                reason: format!("must lie in (0, 1], got {}", self.tau),
            });
        }
        if self.test == BellTest::Dp && !(self.j > 0.0) {
            return Err(Error::InvalidConfig {
                field: "J",
                reason: format!("must be positive, got {}", self.j),
            });
        }
        if self.test == BellTest::Hd && !(self.hd.eta_h > 0.0 && self.hd.eta_h <= 1.0) {
            return Err(Error::InvalidConfig {
                field: "eta_h",
                reason: format!("must lie in (0, 1], got {}", self.hd.eta_h),
            });
        }
        Ok(())
    }

    /// Serializable echo of every physical/measurement parameter.
    pub fn echo(&self) -> ParameterEcho {
        ParameterEcho {
            state: self.state,
            gamma_t: self.gamma_t,
            n_th: self.n_th,
            tau: (self.state == StateKind::Ips).then_some(self.tau),
            j: (self.test == BellTest::Dp).then_some(self.j),
            eta_h: (self.test == BellTest::Hd).then_some(self.hd.eta_h),
            angles: match self.test {
                BellTest::Hd => Some([
                    self.hd.theta1,
                    self.hd.theta2,
                    self.hd.phi1,
                    self.hd.phi2,
                ]),
                BellTest::Ps => Some([
                    self.ps.theta_a1,
                    self.ps.theta_a2,
                    self.ps.theta_b1,
                    self.ps.theta_b2,
                ]),
                BellTest::Dp => None,
            },
        }
    }
}

/// Flat parameter echo carried by serialized sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterEcho {
    pub state: StateKind,
    pub gamma_t: f64,
    pub n_th: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<[f64; 4]>,
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub value: f64,
    pub violated: bool,
}

/// Evaluate the configured Bell parameter at a single squeezing value.
pub fn eval_point(config: &SweepConfig, r: f64) -> Result<f64> {
    let params = TwbParams::new(r)?;
    let channel = ChannelParams::symmetric(config.gamma_t, config.n_th)?;
    let sigma = evolve_cov(&make_twb_cov(&params), &channel);
    let gaussian = wigner_of_cov(&sigma)?;

    match (config.test, config.state) {
        (BellTest::Dp, StateKind::Twb) => {
            Ok(bell_dp(&gaussian, &DpGeometry::from_j(config.j)?).value)
        }
        (BellTest::Dp, StateKind::Ips) => {
            let (state, _) = ips_state(&gaussian, &IpsParams::from_tau(config.tau)?)?;
            Ok(bell_dp(&state, &DpGeometry::from_j(config.j)?).value)
        }
        (BellTest::Hd, StateKind::Twb) => Ok(bell_hd(&gaussian, &config.hd).value),
        (BellTest::Hd, StateKind::Ips) => {
            let (state, _) = ips_state(&gaussian, &IpsParams::from_tau(config.tau)?)?;
            Ok(bell_hd(&state, &config.hd).value)
        }
        (BellTest::Ps, StateKind::Twb) => Ok(bell_ps(
            |ta, tb| correlator_generic(&gaussian, ta, tb),
            &config.ps,
        )
        .value),
        (BellTest::Ps, StateKind::Ips) => {
            let form = TwbWignerForm::from_cov(&sigma)?;
            let coeffs = ips_coefficients(&form, &IpsParams::from_tau(config.tau)?)?;
            let p11 = coeffs.p11();
            if p11 <= P11_MIN {
                return Err(Error::NoClickRegime { p11, min: P11_MIN });
            }
            Ok(bell_ps(
                |ta, tb| {
                    e_ips(&coeffs, p11, ta, tb).expect("coefficients validated at construction")
                },
                &config.ps,
            )
            .value)
        }
    }
}

/// Run the sweep; one row per grid point, in grid order.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    config
        .r_grid
        .values()
        .into_iter()
        .map(|r| {
            eval_point(config, r).map(|value| SweepRow {
                r,
                value,
                violated: value.abs() > 2.0,
            })
        })
        .collect()
}

/// Scan the grid, then refine around the best point by golden-section search.
///
/// Grid points inside a no-click regime are skipped; if every point is
/// skipped the last such error is reported.
pub fn maximize_over_r(config: &SweepConfig) -> Result<(f64, BellResult)> {
    config.validate()?;
    let mut best: Option<(f64, f64)> = None;
    let mut last_err = None;
    for r in config.r_grid.values() {
        match eval_point(config, r) {
            Ok(v) => {
                if best.map_or(true, |(_, bv)| v > bv) {
                    best = Some((r, v));
                }
            }
            Err(e @ Error::NoClickRegime { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let (r0, _) = best.ok_or_else(|| {
        last_err.unwrap_or(Error::InvalidConfig {
            field: "r",
            reason: "grid produced no evaluable points".to_string(),
        })
    })?;

    let lo = (r0 - config.r_grid.step).max(config.r_grid.min);
    let hi = (r0 + config.r_grid.step).min(config.r_grid.max);
    let f = |r: f64| eval_point(config, r).unwrap_or(f64::NEG_INFINITY);
    let (r_star, value) = golden_section_maximize(f, lo, hi, 1e-6);
    Ok((r_star, BellResult::new(config.test, value)))
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)`.
pub fn golden_section_maximize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// One labelled curve of a figure preset.
#[derive(Debug, Clone)]
pub struct PresetCurve {
    pub label: String,
    pub config: SweepConfig,
}

/// A figure preset: a set of sweeps sharing one grid.
#[derive(Debug, Clone)]
pub struct Preset {
    pub id: &'static str,
    pub description: &'static str,
    pub curves: Vec<PresetCurve>,
}

pub const PRESET_IDS: [&str; 7] = [
    "fig-dp",
    "fig-hd-eta1",
    "fig-hd-eta09",
    "fig-ps-ideal",
    "fig-ps-tau",
    "fig-ps-gamma",
    "fig-ps-thermal",
];

/// Look up a figure preset by id.
pub fn preset(id: &str) -> Result<Preset> {
    match id {
        "fig-dp" => Ok(fig_dp()),
        "fig-hd-eta1" => Ok(fig_hd(1.0, "fig-hd-eta1")),
        "fig-hd-eta09" => Ok(fig_hd(0.9, "fig-hd-eta09")),
        "fig-ps-ideal" => Ok(fig_ps_tau_family(0.0, "fig-ps-ideal", "ideal channel")),
        "fig-ps-tau" => Ok(fig_ps_tau_family(
            0.01,
            "fig-ps-tau",
            "dissipation only, varying effective transmissivity",
        )),
        "fig-ps-gamma" => Ok(fig_ps_gamma()),
        "fig-ps-thermal" => Ok(fig_ps_thermal()),
        _ => Err(Error::InvalidConfig {
            field: "preset",
            reason: format!("unknown preset `{id}`; expected one of {PRESET_IDS:?}"),
        }),
    }
}

fn noise_label(state: StateKind, gamma_t: f64, n_th: f64) -> String {
    if gamma_t == 0.0 && n_th == 0.0 {
        format!("{} ideal", state.name())
    } else {
        format!("{} gt={gamma_t} n={n_th}", state.name())
    }
}

fn fig_dp() -> Preset {
    let grid = Grid::new(0.01, 3.0, 0.01).expect("static grid");
    let mut curves = Vec::new();
    for state in [StateKind::Twb, StateKind::Ips] {
        for (gt, n) in [
            (0.0, 0.0),
            (0.01, 0.0),
            (0.01, 0.05),
            (0.01, 0.1),
            (0.01, 0.2),
        ] {
            let mut config = SweepConfig::new(BellTest::Dp, state, grid);
            config.gamma_t = gt;
            config.n_th = n;
            config.tau = 0.9999;
            config.j = 1.6e-3;
            curves.push(PresetCurve {
                label: noise_label(state, gt, n),
                config,
            });
        }
    }
    Preset {
        id: "fig-dp",
        description: "displaced parity, J=1.6e-3, tau=0.9999, thermal-noise family",
        curves,
    }
}

fn fig_hd(eta_h: f64, id: &'static str) -> Preset {
    let grid = Grid::new(0.01, 1.5, 0.01).expect("static grid");
    let mut curves = Vec::new();
    for (gt, n) in [
        (0.0, 0.0),
        (0.05, 0.0),
        (0.05, 0.05),
        (0.05, 0.1),
        (0.05, 0.2),
    ] {
        let mut config = SweepConfig::new(BellTest::Hd, StateKind::Ips, grid);
        config.gamma_t = gt;
        config.n_th = n;
        config.tau = 0.99;
        config.hd = HdSettings::with_efficiency(eta_h).expect("static efficiency");
        curves.push(PresetCurve {
            label: noise_label(StateKind::Ips, gt, n),
            config,
        });
    }
    Preset {
        id,
        description: "homodyne test on the photon-subtracted state, tau=0.99",
        curves,
    }
}

fn fig_ps_tau_family(gamma_t: f64, id: &'static str, description: &'static str) -> Preset {
    let grid = Grid::new(0.01, 2.0, 0.01).expect("static grid");
    let mut curves = Vec::new();
    let mut twb = SweepConfig::new(BellTest::Ps, StateKind::Twb, grid);
    twb.gamma_t = gamma_t;
    curves.push(PresetCurve {
        label: noise_label(StateKind::Twb, gamma_t, 0.0),
        config: twb,
    });
    for tau in [0.9999, 0.99, 0.9, 0.8] {
        let mut config = SweepConfig::new(BellTest::Ps, StateKind::Ips, grid);
        config.gamma_t = gamma_t;
        config.tau = tau;
        curves.push(PresetCurve {
            label: format!("ips tau={tau}"),
            config,
        });
    }
    Preset {
        id,
        description,
        curves,
    }
}

fn fig_ps_gamma() -> Preset {
    let grid = Grid::new(0.01, 2.0, 0.01).expect("static grid");
    let mut curves = Vec::new();
    for state in [StateKind::Twb, StateKind::Ips] {
        for gt in [0.0, 0.01, 0.05, 0.1] {
            let mut config = SweepConfig::new(BellTest::Ps, state, grid);
            config.gamma_t = gt;
            config.tau = 0.9999;
            curves.push(PresetCurve {
                label: format!("{} gt={gt}", state.name()),
                config,
            });
        }
    }
    Preset {
        id: "fig-ps-gamma",
        description: "pseudospin test, dissipation family, no thermal noise",
        curves,
    }
}

fn fig_ps_thermal() -> Preset {
    let grid = Grid::new(0.01, 2.0, 0.01).expect("static grid");
    let mut curves = Vec::new();
    for state in [StateKind::Twb, StateKind::Ips] {
        for n in [0.0, 0.01, 0.1, 0.2] {
            let mut config = SweepConfig::new(BellTest::Ps, state, grid);
            config.gamma_t = 0.01;
            config.n_th = n;
            config.tau = 0.9999;
            curves.push(PresetCurve {
                label: format!("{} n={n}", state.name()),
                config,
            });
        }
    }
    Preset {
        id: "fig-ps-thermal",
        description: "pseudospin test, thermal-noise family at gt=0.01",
        curves,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_values_are_inclusive() {
        let g = Grid::new(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn empty_grid_is_a_usage_error() {
        let err = Grid::new(1.0, 0.5, 0.1).unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn sweep_rows_follow_grid_order() {
        let config = SweepConfig::new(
            BellTest::Dp,
            StateKind::Twb,
            Grid::new(0.0, 0.2, 0.1).unwrap(),
        );
        let rows = sweep(&config).unwrap();
        assert_eq!(rows.len(), 3);
        assert_relative_eq!(rows[0].r, 0.0);
        assert_relative_eq!(rows[2].r, 0.2);
    }

    #[test]
    fn sweep_is_deterministic() {
        let mut config = SweepConfig::new(
            BellTest::Ps,
            StateKind::Ips,
            Grid::new(0.05, 0.5, 0.05).unwrap(),
        );
        config.tau = 0.99;
        let a = sweep(&config).unwrap();
        let b = sweep(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ips_at_zero_squeezing_without_noise_is_a_domain_error() {
        let config = SweepConfig::new(
            BellTest::Dp,
            StateKind::Ips,
            Grid::new(0.0, 0.1, 0.1).unwrap(),
        );
        match sweep(&config) {
            Err(Error::NoClickRegime { .. }) => {}
            other => panic!("expected no-click regime, got {other:?}"),
        }
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_section_maximize(|x| 3.0 - (x - 0.7) * (x - 0.7), 0.0, 2.0, 1e-9);
        assert_relative_eq!(x, 0.7, epsilon = 1e-6);
        assert_relative_eq!(v, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn maximize_ps_twb_approaches_tsirelson() {
        let config = SweepConfig::new(
            BellTest::Ps,
            StateKind::Twb,
            Grid::new(0.0, 5.0, 0.05).unwrap(),
        );
        let (r_star, result) = maximize_over_r(&config).unwrap();
        assert!(r_star > 4.0);
        assert!(result.value <= 2.0 * std::f64::consts::SQRT_2 + 1e-12);
        assert!(result.value > 2.0 * std::f64::consts::SQRT_2 - 1e-3);
    }

    #[test]
    fn unknown_preset_is_usage_error() {
        assert!(preset("fig-nope").unwrap_err().is_usage());
    }

    #[test]
    fn all_presets_resolve() {
        for id in PRESET_IDS {
            let p = preset(id).unwrap();
            assert!(!p.curves.is_empty());
            for curve in &p.curves {
                curve.config.validate().unwrap();
            }
        }
    }
}
