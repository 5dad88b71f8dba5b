use unidir_core::presets as p;

use crate::config::{NoiseConfig, OutputConfig, ParamsConfig, RunConfig, Spacing, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FigurePreset {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig5c,
    FigNsr,
}

impl FigurePreset {
    #[cfg(test)]
    pub const ALL: [FigurePreset; 9] = [
        FigurePreset::Fig2a,
        FigurePreset::Fig2b,
        FigurePreset::Fig2c,
        FigurePreset::Fig3,
        FigurePreset::Fig4,
        FigurePreset::Fig5a,
        FigurePreset::Fig5b,
        FigurePreset::Fig5c,
        FigurePreset::FigNsr,
    ];

    /// Baked configuration. Multi-set presets (fig3, fig4) carry the first
    /// set's parameters; the others are generated when the preset runs.
    pub fn config(self) -> RunConfig {
        let spec = match self {
            FigurePreset::Fig2a => p::fig2_params(0.5),
            FigurePreset::Fig2b | FigurePreset::FigNsr | FigurePreset::Fig3 => p::fig2_params(1.0),
            FigurePreset::Fig2c => p::fig2_params(1.5),
            FigurePreset::Fig4 => {
                let (d1, d2) = p::FIG4_DETUNINGS_HZ[0];
                p::fig4_params(d1, d2)
            }
            FigurePreset::Fig5a => p::fig5_params(p::FIG5_KAPPA1_E_HZ[0]),
            FigurePreset::Fig5b => p::fig5_params(p::FIG5_KAPPA1_E_HZ[1]),
            FigurePreset::Fig5c => p::fig5_params(p::FIG5_KAPPA1_E_HZ[2]),
        };
        RunConfig {
            params: ParamsConfig::from_spec(&spec),
            sweep: default_sweep(),
            noise: NoiseConfig {
                n_m: p::NSR_THERMAL_PHONONS,
                delta_omega_over_2pi_hz: p::NSR_BANDWIDTH_HZ,
                n_points: unidir_core::noise::DEFAULT_NSR_POINTS,
                samples: 50,
            },
            output: OutputConfig::default(),
        }
    }
}

pub fn default_sweep() -> SweepConfig {
    let decades = (p::SWEEP_P_MAX_W / p::SWEEP_P_MIN_W).log10();
    SweepConfig {
        p_min_w: p::SWEEP_P_MIN_W,
        p_max_w: p::SWEEP_P_MAX_W,
        points: (decades * p::SWEEP_POINTS_PER_DECADE as f64).round() as usize + 1,
        spacing: Spacing::Log,
    }
}
