//! Benchmark problems: initial conditions, domains and the advection fields
//! that drive them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::projection::GridSpec;

/// Asymptotic damping rate of the electric field for weak Landau damping.
pub const WEAK_LANDAU_GAMMA: f64 = 0.1533;

/// How the distribution function is advected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    /// Self-consistent field from the Poisson equation.
    VlasovPoisson,
    /// `E` is forced to zero in the velocity step; it is still computed for
    /// diagnostics.
    FreeStreaming,
    /// Rigid rotation `dx/dt = -omega v`, `dv/dt = omega (x - x_axis)` with
    /// zero-inflow boundaries in both directions.
    SolidRotation { omega: f64, x_axis: f64 },
}

impl Dynamics {
    pub fn name(&self) -> &'static str {
        match self {
            Dynamics::VlasovPoisson => "vlasov_poisson",
            Dynamics::FreeStreaming => "free_streaming",
            Dynamics::SolidRotation { .. } => "solid_rotation",
        }
    }

    /// Whether the electric field is meaningful for this dynamics.
    pub fn has_field(&self) -> bool {
        !matches!(self, Dynamics::SolidRotation { .. })
    }
}

type InitialCondition = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A named test problem on its canonical domain `[0, L] x [-v_max, v_max]`.
#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    initial: InitialCondition,
    length: f64,
    v_max: f64,
    dynamics: Dynamics,
    exact_energy: Option<fn(f64) -> f64>,
    decay_rate: Option<f64>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("length", &self.length)
            .field("v_max", &self.v_max)
            .field("dynamics", &self.dynamics)
            .field("decay_rate", &self.decay_rate)
            .finish_non_exhaustive()
    }
}

fn maxwellian(v: f64) -> f64 {
    (-0.5 * v * v).exp() / (2.0 * PI).sqrt()
}

fn free_streaming_energy(t: f64) -> f64 {
    PI / 1250.0 * (-0.25 * t * t).exp()
}

impl ProblemSpec {
    /// Landau damping `f0 = exp(-v^2/2)/sqrt(2 pi) (1 + alpha cos(x/2))` on
    /// `[0, 4 pi] x [-6, 6]`.
    pub fn landau(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be non-negative, got {alpha}")));
        }
        let name = if alpha == 0.01 {
            "weak_landau".to_string()
        } else if alpha == 0.5 {
            "strong_landau".to_string()
        } else {
            format!("landau({alpha})")
        };
        Ok(ProblemSpec {
            name,
            initial: Arc::new(move |x, v| maxwellian(v) * (1.0 + alpha * (0.5 * x).cos())),
            length: 4.0 * PI,
            v_max: 6.0,
            dynamics: Dynamics::VlasovPoisson,
            exact_energy: None,
            decay_rate: (alpha == 0.01).then_some(WEAK_LANDAU_GAMMA),
        })
    }

    /// Weak Landau initial data under pure free streaming, whose electric
    /// energy is `pi/1250 exp(-t^2/4)`.
    pub fn advection_recurrence() -> Self {
        let alpha = 0.01;
        ProblemSpec {
            name: "advection".to_string(),
            initial: Arc::new(move |x, v| maxwellian(v) * (1.0 + alpha * (0.5 * x).cos())),
            length: 4.0 * PI,
            v_max: 6.0,
            dynamics: Dynamics::FreeStreaming,
            exact_energy: Some(free_streaming_energy),
            decay_rate: None,
        }
    }

    /// Rotating cosine-squared cone, one revolution per unit time.
    ///
    /// The physical domain `[-1, 1]^2` is stored with the first coordinate
    /// shifted to `[0, 2]`, so the rotation axis sits at grid position `x = 1`.
    pub fn molenkamp_crowley() -> Self {
        ProblemSpec {
            name: "molenkamp_crowley".to_string(),
            initial: Arc::new(|x, y| cone(x - 1.0, y)),
            length: 2.0,
            v_max: 1.0,
            dynamics: Dynamics::SolidRotation { omega: 2.0 * PI, x_axis: 1.0 },
            exact_energy: None,
            decay_rate: None,
        }
    }

    /// Looks a problem up by its CLI name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "weak_landau" | "weak-landau" => ProblemSpec::landau(0.01),
            "strong_landau" | "strong-landau" => ProblemSpec::landau(0.5),
            "equilibrium" => ProblemSpec::landau(0.0),
            "advection" | "recurrence" => Ok(ProblemSpec::advection_recurrence()),
            "molenkamp_crowley" | "molenkamp-crowley" | "cone" => Ok(ProblemSpec::molenkamp_crowley()),
            other => {
                if let Some(a) = other.strip_prefix("landau:") {
                    let alpha = a
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad alpha in `{other}`")))?;
                    return ProblemSpec::landau(alpha);
                }
                Err(Error::InvalidArgument(format!(
                    "unknown problem `{other}` (expected weak_landau, strong_landau, equilibrium, advection, molenkamp_crowley or landau:<alpha>)"
                )))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    /// Replaces the dynamics, e.g. to run Landau data as free streaming.
    pub fn with_dynamics(mut self, dynamics: Dynamics) -> Self {
        self.dynamics = dynamics;
        self
    }

    pub fn initial_value(&self, x: f64, v: f64) -> f64 {
        (self.initial)(x, v)
    }

    pub fn initial_condition(&self) -> impl Fn(f64, f64) -> f64 + Sync + '_ {
        move |x, v| (self.initial)(x, v)
    }

    /// Closed-form electric energy, when known.
    pub fn exact_energy(&self, t: f64) -> Option<f64> {
        self.exact_energy.map(|e| e(t))
    }

    /// Reference damping rate of the energy envelope `exp(-2 gamma t)`.
    pub fn decay_rate(&self) -> Option<f64> {
        self.decay_rate
    }

    pub fn grid(&self, nx: usize, nv: usize, degree: usize) -> Result<GridSpec> {
        GridSpec::new(self.length, self.v_max, nx, nv, degree)
    }
}

/// `cos^2(2 pi r)` for `r <= 1/4` around `(-1/2, 0)`, zero outside.
pub fn cone(x: f64, y: f64) -> f64 {
    let r = ((x + 0.5).powi(2) + y * y).sqrt();
    if r <= 0.25 {
        (2.0 * PI * r).cos().powi(2)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landau_variants() {
        assert!(ProblemSpec::landau(-0.1).is_err());
        let weak = ProblemSpec::landau(0.01).unwrap();
        assert_eq!(weak.decay_rate(), Some(WEAK_LANDAU_GAMMA));
        assert_eq!(weak.dynamics(), Dynamics::VlasovPoisson);
        let eq = ProblemSpec::landau(0.0).unwrap();
        assert_eq!(eq.initial_value(1.0, 0.3), eq.initial_value(7.0, 0.3));
        let strong = ProblemSpec::by_name("strong_landau").unwrap();
        assert!((strong.initial_value(0.0, 0.0) - 1.5 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!(ProblemSpec::by_name("bump_on_tail").is_err());
        assert_eq!(ProblemSpec::by_name("landau:0.2").unwrap().name(), "landau(0.2)");
    }

    #[test]
    fn advection_exact_energy() {
        let p = ProblemSpec::advection_recurrence();
        assert_eq!(p.dynamics(), Dynamics::FreeStreaming);
        assert!((p.exact_energy(0.0).unwrap() - PI / 1250.0).abs() < 1e-18);
        assert!(ProblemSpec::landau(0.01).unwrap().exact_energy(0.0).is_none());
    }

    #[test]
    fn cone_values() {
        assert_eq!(cone(-0.5, 0.0), 1.0);
        assert!(cone(-0.25, 0.0).abs() < 1e-30);
        assert_eq!(cone(0.5, 0.0), 0.0);
        let p = ProblemSpec::molenkamp_crowley();
        assert_eq!(p.initial_value(0.5, 0.0), 1.0);
        assert!(!p.dynamics().has_field());
    }

    #[test]
    fn landau_tail_is_negligible_at_cutoff() {
        // exp(-18) / sqrt(2 pi) * 1.01 ~ 6.1e-9, relative to the peak it is exp(-18)
        let p = ProblemSpec::landau(0.01).unwrap();
        let peak = p.initial_value(0.0, 0.0);
        for &x in &[0.0, 1.0, 2.0 * PI] {
            assert!(p.initial_value(x, 6.0).abs() < 7e-9);
            assert!(p.initial_value(x, -6.0).abs() < 7e-9);
            assert!(p.initial_value(x, 6.0) / peak < 1.6e-8);
        }
    }

    #[test]
    fn initial_conditions_non_negative() {
        let problems = [
            ProblemSpec::landau(0.01).unwrap(),
            ProblemSpec::landau(0.5).unwrap(),
            ProblemSpec::advection_recurrence(),
            ProblemSpec::molenkamp_crowley(),
        ];
        for p in &problems {
            for a in 0..40 {
                for b in 0..40 {
                    let x = p.length() * a as f64 / 39.0;
                    let v = -p.v_max() + 2.0 * p.v_max() * b as f64 / 39.0;
                    assert!(p.initial_value(x, v) >= 0.0);
                }
            }
        }
    }
}
