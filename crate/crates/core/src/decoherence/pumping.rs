//! Rate equations for π-polarized optical pumping of the two ground
//! hyperfine levels, with the excited states adiabatically eliminated.
//!
//! Level F (upper ground) is pumped to F' = F−1 with weight (F²−m²)/F²,
//! so m = ±F are dark. An optional leak to F' = F has weight m²/F². Each
//! excited state decays over the allowed q = 0, ±1 channels into both
//! ground levels, and a repump returns F−1 uniformly to F.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler steps must satisfy dt · (largest outflow rate) below this.
pub const STABILITY_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// Ground level F.
    Upper(i32),
    /// Ground level F − 1.
    Lower(i32),
}

/// Relative decay weights for q = −1, 0, +1 into each ground level.
/// Weights are renormalised over the channels allowed for each excited
/// sublevel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branching {
    pub to_upper: [f64; 3],
    pub to_lower: [f64; 3],
}

impl Default for Branching {
    fn default() -> Self {
        Branching {
            to_upper: [1.0; 3],
            to_lower: [1.0; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpLevelSystem {
    /// F of the upper ground level.
    pub f: u32,
    /// Upper level m = −F…F, then lower level m = −(F−1)…F−1.
    pub populations: Vec<f64>,
    pub pump_rate: f64,
    pub repump_rate: f64,
    pub leak_rate: f64,
    pub branching: Branching,
}

impl PumpLevelSystem {
    pub fn new(f: u32, populations: Vec<f64>, pump_rate: f64, repump_rate: f64, leak_rate: f64) -> Result<Self> {
        let sys = PumpLevelSystem {
            f,
            populations,
            pump_rate,
            repump_rate,
            leak_rate,
            branching: Branching::default(),
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Everything spread evenly over the upper level.
    pub fn uniform_upper(f: u32, pump_rate: f64, repump_rate: f64, leak_rate: f64) -> Result<Self> {
        let n_up = (2 * f + 1) as usize;
        let mut p = vec![0.0; n_up + (2 * f - 1) as usize];
        p[..n_up].fill(1.0 / n_up as f64);
        Self::new(f, p, pump_rate, repump_rate, leak_rate)
    }

    pub fn n_levels(&self) -> usize {
        4 * self.f as usize
    }

    pub fn index(&self, level: Level) -> Option<usize> {
        let f = self.f as i32;
        match level {
            Level::Upper(m) if m.abs() <= f => Some((m + f) as usize),
            Level::Lower(m) if m.abs() < f => Some((2 * f + 1 + m + f - 1) as usize),
            _ => None,
        }
    }

    pub fn population(&self, level: Level) -> f64 {
        self.index(level).map_or(0.0, |i| self.populations[i])
    }

    /// Population of the two dark states m = ±F.
    pub fn dark_populations(&self) -> (f64, f64) {
        let f = self.f as i32;
        (self.population(Level::Upper(-f)), self.population(Level::Upper(f)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.f == 0 {
            return Err(Error::InvalidPopulations("F must be at least 1".into()));
        }
        if self.populations.len() != self.n_levels() {
            return Err(Error::InvalidPopulations(format!(
                "expected {} entries, got {}",
                self.n_levels(),
                self.populations.len()
            )));
        }
        if let Some(p) = self.populations.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::InvalidPopulations(format!("negative or NaN entry {p}")));
        }
        let total: f64 = self.populations.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPopulations(format!("populations sum to {total}")));
        }
        for (name, r) in [("pump_rate", self.pump_rate), ("repump_rate", self.repump_rate), ("leak_rate", self.leak_rate)] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::InvalidPopulations(format!("{name} must be nonnegative, got {r}")));
            }
        }
        Ok(())
    }

    /// Transition list `(from, to, rate)`.
    fn transitions(&self) -> Vec<(usize, usize, f64)> {
        let f = self.f as i32;
        let f2 = (f * f) as f64;
        let mut out = Vec::new();
        let mut decay = |source_rate: f64, from: usize, excited_m: i32| {
            let mut channels = Vec::new();
            for (k, q) in (-1..=1).enumerate() {
                let m = excited_m + q;
                if let Some(to) = self.index(Level::Upper(m)) {
                    channels.push((to, self.branching.to_upper[k]));
                }
                if let Some(to) = self.index(Level::Lower(m)) {
                    channels.push((to, self.branching.to_lower[k]));
                }
            }
            let total: f64 = channels.iter().map(|c| c.1).sum();
            if total > 0.0 {
                for (to, w) in channels {
                    if to != from && w > 0.0 {
                        out.push((from, to, source_rate * w / total));
                    }
                }
            }
        };
        for m in -f..=f {
            let from = self.index(Level::Upper(m)).expect("in range");
            let m2 = (m * m) as f64;
            // F' = F − 1 exists only for |m| < F
            if m.abs() < f {
                decay(self.pump_rate * (f2 - m2) / f2, from, m);
            }
            decay(self.leak_rate * m2 / f2, from, m);
        }
        let n_up = (2 * f + 1) as f64;
        for m in -(f - 1)..f {
            let from = self.index(Level::Lower(m)).expect("in range");
            for mu in -f..=f {
                out.push((from, self.index(Level::Upper(mu)).expect("in range"), self.repump_rate / n_up));
            }
        }
        out
    }
}

fn outflow_limit(sys: &PumpLevelSystem, transitions: &[(usize, usize, f64)]) -> f64 {
    let mut out = vec![0.0; sys.n_levels()];
    for &(from, _, r) in transitions {
        out[from] += r;
    }
    out.into_iter().fold(0.0, f64::max)
}

fn euler_step(p: &mut [f64], transitions: &[(usize, usize, f64)], dt: f64) {
    let snapshot = p.to_vec();
    for &(from, to, r) in transitions {
        let moved = dt * r * snapshot[from];
        p[from] -= moved;
        p[to] += moved;
    }
}

/// Advances the populations by `steps` explicit Euler steps of size `dt`.
pub fn evolve_pumping(system: &PumpLevelSystem, dt: f64, steps: usize) -> Result<PumpLevelSystem> {
    Ok(evolve_pumping_traced(system, dt, steps, 0)?.0)
}

/// Like [`evolve_pumping`], also recording `(t, populations)` every
/// `record_every` steps (and at t = 0). `record_every = 0` records nothing.
pub fn evolve_pumping_traced(
    system: &PumpLevelSystem,
    dt: f64,
    steps: usize,
    record_every: usize,
) -> Result<(PumpLevelSystem, Vec<(f64, Vec<f64>)>)> {
    system.validate()?;
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::OutOfRange {
            name: "dt",
            value: dt,
            range: "[0, ∞)",
        });
    }
    let transitions = system.transitions();
    let guard = dt * outflow_limit(system, &transitions);
    if guard >= STABILITY_LIMIT {
        return Err(Error::StepUnstable(guard));
    }
    let mut sys = system.clone();
    let mut trace = Vec::new();
    if record_every > 0 {
        trace.push((0.0, sys.populations.clone()));
    }
    for k in 1..=steps {
        euler_step(&mut sys.populations, &transitions, dt);
        if record_every > 0 && k % record_every == 0 {
            trace.push((k as f64 * dt, sys.populations.clone()));
        }
    }
    Ok((sys, trace))
}
