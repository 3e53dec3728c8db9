//! Built-in scenarios, one per figure panel. The TOML sources live in
//! `presets/` and double as examples of the scenario format.

use crate::error::CliError;
use crate::scenario::Scenario;

pub struct Preset {
    pub id: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

macro_rules! preset {
    ($id:literal, $summary:literal) => {
        Preset { id: $id, summary: $summary, source: include_str!(concat!("../presets/", $id, ".toml")) }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("fig1a", "periodic line L=10, dx=5, delta switching, oscillator modes only"),
    preset!("fig1b", "periodic line L=10, dx=5, delta switching, zero mode included"),
    preset!("fig2a", "estimator vs dt on periodic lines L=10,20,40,80, dx=5"),
    preset!("fig2b", "estimator vs L in [10,160], dx=2, dt=1 and dt=3"),
    preset!("fig3", "smeared detectors on L=20, gap 1, widths r in {1,1/2,1/4,1/8,0} vs D"),
    preset!("fig4a", "torus L=40 (plane proxy), dx=(5,0), cutoff 200"),
    preset!("fig4b", "periodic x Dirichlet strip L=10, y=5, cutoffs 50 and 100"),
    preset!("fig5a", "square torus L=10, dx=(5,0), cutoff 50"),
    preset!("fig5b", "square torus L=10, dx=(5,2), cutoff 100"),
    preset!("fig6", "circle L=10 x open line, dx=5, pv exclusion 1e-1, 1e-2, 1e-3"),
    preset!("fig7", "unit 3-torus, dx=(0.5,0,0), cutoff 30, with and without zero mode"),
];

pub fn find(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

pub fn load(id: &str) -> Result<Scenario, CliError> {
    let p = find(id).ok_or_else(|| {
        let ids: Vec<&str> = PRESETS.iter().map(|p| p.id).collect();
        CliError::Validation(format!("unknown figure {id:?}; expected one of {}", ids.join(", ")))
    })?;
    toml::from_str(p.source).map_err(|e| CliError::Parse(format!("preset {id}: {e}")))
}
