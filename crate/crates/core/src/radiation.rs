//! Six-directional radiative flux balance and mean radiant temperature.
//!
//! The absorbed flux is a weighted sum over the six cardinal directions,
//! with separate absorption coefficients for the shortwave and longwave
//! bands, and the mean radiant temperature follows from inverting the
//! Stefan-Boltzmann law:
//!
//! ```text
//! Q_total = W_ud * sum_{i in {up,down}} (a_k S_i + a_l L_i)
//!         + W_o  * sum_{j in {n,e,s,w}} (a_k S_j + a_l L_j)
//! T_mrt   = (Q_total / (a1 * sigma))^(1/4) - 273.15
//! ```
//!
//! All arithmetic is f64; the gradient path of the learning engine depends
//! on that precision.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Stefan-Boltzmann constant, W m^-2 K^-4 (CODATA).
pub const SIGMA: f64 = 5.670374419e-8;

/// Offset between Kelvin and Celsius.
pub const KELVIN_OFFSET: f64 = 273.15;

/// Lower clamp on Q_total used by training code so the quarter-power
/// gradient stays finite.
pub const Q_CLAMP: f64 = 1e-3;

/// The six sensor directions, in the canonical component order used
/// everywhere fluxes appear as a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::Up,
        Direction::Down,
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    /// Index in the canonical order.
    pub fn index(self) -> usize {
        match self {
            Direction::Up => 0,
            Direction::Down => 1,
            Direction::North => 2,
            Direction::East => 3,
            Direction::South => 4,
            Direction::West => 5,
        }
    }

    /// True for up/down, false for the lateral directions.
    pub fn is_vertical(self) -> bool {
        matches!(self, Direction::Up | Direction::Down)
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::North => "north",
            Direction::East => "east",
            Direction::South => "south",
            Direction::West => "west",
        }
    }
}

/// Shortwave and longwave flux densities for the six directions, W m^-2.
///
/// Component order follows [`Direction::ALL`]: up, down, north, east,
/// south, west.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalFluxes {
    pub shortwave: [f64; 6],
    pub longwave: [f64; 6],
}

/// Plausibility band for measured longwave flux densities, W m^-2.
pub const LONGWAVE_MEASURED_BAND: (f64, f64) = (50.0, 1200.0);

impl DirectionalFluxes {
    /// All twelve components zero.
    pub fn zero() -> Self {
        DirectionalFluxes {
            shortwave: [0.0; 6],
            longwave: [0.0; 6],
        }
    }

    /// Uniform longwave field (isothermal enclosure), zero shortwave.
    pub fn isothermal(longwave: f64) -> Self {
        DirectionalFluxes {
            shortwave: [0.0; 6],
            longwave: [longwave; 6],
        }
    }

    /// Checks that every component is finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        for d in Direction::ALL {
            let s = self.shortwave[d.index()];
            let l = self.longwave[d.index()];
            if !s.is_finite() || s < 0.0 {
                return Err(CoreError::NegativeFlux {
                    component: d.name(),
                    value: s,
                });
            }
            if !l.is_finite() || l < 0.0 {
                return Err(CoreError::NegativeFlux {
                    component: d.name(),
                    value: l,
                });
            }
        }
        Ok(())
    }

    /// The twelve components as one vector: shortwave then longwave,
    /// each in canonical direction order.
    pub fn as_vec(&self) -> [f64; 12] {
        let mut v = [0.0; 12];
        v[..6].copy_from_slice(&self.shortwave);
        v[6..].copy_from_slice(&self.longwave);
        v
    }

    pub fn from_vec(v: &[f64; 12]) -> Self {
        let mut shortwave = [0.0; 6];
        let mut longwave = [0.0; 6];
        shortwave.copy_from_slice(&v[..6]);
        longwave.copy_from_slice(&v[6..]);
        DirectionalFluxes {
            shortwave,
            longwave,
        }
    }
}

/// Absorption coefficients and directional weights of the standing human
/// body, plus the Stefan-Boltzmann constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyRadiationProfile {
    /// Shortwave absorption coefficient.
    pub a_k: f64,
    /// Longwave absorption coefficient.
    pub a_l: f64,
    /// Mean radiant absorptivity of the body.
    pub a1: f64,
    /// Weight applied to each of the up/down directions.
    pub w_updown: f64,
    /// Weight applied to each of the four lateral directions.
    pub w_others: f64,
    /// Stefan-Boltzmann constant, W m^-2 K^-4.
    pub sigma: f64,
}

impl BodyRadiationProfile {
    /// Builds a profile, enforcing coefficient ranges and the weight
    /// closure 2*W_updown + 4*W_others = 1.
    pub fn new(
        a_k: f64,
        a_l: f64,
        a1: f64,
        w_updown: f64,
        w_others: f64,
        sigma: f64,
    ) -> Result<Self> {
        for (name, v) in [("a_k", a_k), ("a_l", a_l), ("a1", a1)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(CoreError::InvalidInput(format!(
                    "{name} must be in (0, 1], got {v}"
                )));
            }
        }
        if w_updown <= 0.0 || w_others <= 0.0 {
            return Err(CoreError::InvalidInput(
                "directional weights must be positive".into(),
            ));
        }
        let closure = 2.0 * w_updown + 4.0 * w_others;
        if (closure - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidInput(format!(
                "weights must satisfy 2*W_updown + 4*W_others = 1, got {closure}"
            )));
        }
        if sigma <= 0.0 {
            return Err(CoreError::InvalidInput("sigma must be positive".into()));
        }
        Ok(BodyRadiationProfile {
            a_k,
            a_l,
            a1,
            w_updown,
            w_others,
            sigma,
        })
    }

    /// Standing-person defaults: a_k = 0.70, a_l = a1 = 0.97,
    /// W_updown = 0.06, W_others = 0.22.
    pub fn standing() -> Self {
        BodyRadiationProfile {
            a_k: 0.70,
            a_l: 0.97,
            a1: 0.97,
            w_updown: 0.06,
            w_others: 0.22,
            sigma: SIGMA,
        }
    }

    /// Directional weight for one direction.
    pub fn weight(&self, d: Direction) -> f64 {
        if d.is_vertical() {
            self.w_updown
        } else {
            self.w_others
        }
    }
}

impl Default for BodyRadiationProfile {
    fn default() -> Self {
        Self::standing()
    }
}

/// Total absorbed radiative flux density, W m^-2.
pub fn total_flux(fluxes: &DirectionalFluxes, profile: &BodyRadiationProfile) -> Result<f64> {
    fluxes.validate()?;
    Ok(total_flux_unchecked(fluxes, profile))
}

/// Same as [`total_flux`] without input validation; used inside the
/// training loop where predicted fluxes are non-negative by construction.
pub fn total_flux_unchecked(fluxes: &DirectionalFluxes, profile: &BodyRadiationProfile) -> f64 {
    let mut q = 0.0;
    for d in Direction::ALL {
        let i = d.index();
        q += profile.weight(d)
            * (profile.a_k * fluxes.shortwave[i] + profile.a_l * fluxes.longwave[i]);
    }
    q
}

/// Mean radiant temperature in degrees Celsius from an absorbed flux.
pub fn tmrt_from_q(q_total: f64, profile: &BodyRadiationProfile) -> Result<f64> {
    if !q_total.is_finite() || q_total < 0.0 {
        return Err(CoreError::Domain(format!(
            "Q_total must be non-negative, got {q_total}"
        )));
    }
    Ok((q_total / (profile.a1 * profile.sigma)).powf(0.25) - KELVIN_OFFSET)
}

/// Mean radiant temperature in degrees Celsius from six-directional fluxes.
pub fn tmrt_from_fluxes(
    fluxes: &DirectionalFluxes,
    profile: &BodyRadiationProfile,
) -> Result<f64> {
    let q = total_flux(fluxes, profile)?;
    tmrt_from_q(q, profile)
}

/// Partial derivatives of T_mrt with respect to each of the twelve flux
/// components, ordered shortwave then longwave in canonical direction order.
///
/// For a shortwave component in direction d:
/// `dT/dS_d = W_d * a_k / (4 a1 sigma) * (Q/(a1 sigma))^(-3/4)`,
/// and analogously with a_l for longwave.
pub fn tmrt_gradient(
    fluxes: &DirectionalFluxes,
    profile: &BodyRadiationProfile,
) -> Result<[f64; 12]> {
    let q = total_flux(fluxes, profile)?;
    if q <= 0.0 {
        return Err(CoreError::SingularGradient);
    }
    Ok(tmrt_gradient_at_q(q, profile))
}

/// Gradient given a precomputed (and possibly clamped) Q_total.
pub fn tmrt_gradient_at_q(q_total: f64, profile: &BodyRadiationProfile) -> [f64; 12] {
    let dt_dq = dtmrt_dq(q_total, profile);
    let mut g = [0.0; 12];
    for d in Direction::ALL {
        let w = profile.weight(d);
        g[d.index()] = w * profile.a_k * dt_dq;
        g[6 + d.index()] = w * profile.a_l * dt_dq;
    }
    g
}

/// dT_mrt / dQ_total at a given Q_total > 0.
pub fn dtmrt_dq(q_total: f64, profile: &BodyRadiationProfile) -> f64 {
    let a1s = profile.a1 * profile.sigma;
    (q_total / a1s).powf(-0.75) / (4.0 * a1s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Frozen by tools/gen_flux_oracle.py.
    const ORACLE_Q_MIXED: f64 = 521.038;
    const ORACLE_TMRT_MIXED: f64 = 38.826213;

    fn mixed_fluxes() -> DirectionalFluxes {
        DirectionalFluxes {
            shortwave: [100.0, 50.0, 150.0, 150.0, 150.0, 150.0],
            longwave: [450.0, 500.0, 430.0, 430.0, 430.0, 430.0],
        }
    }

    #[test]
    fn zero_field_gives_zero_flux() {
        let p = BodyRadiationProfile::standing();
        assert_eq!(total_flux(&DirectionalFluxes::zero(), &p).unwrap(), 0.0);
    }

    #[test]
    fn uniform_longwave_field() {
        let p = BodyRadiationProfile::standing();
        let f = DirectionalFluxes::isothermal(459.27);
        let q = total_flux(&f, &p).unwrap();
        assert_relative_eq!(q, 0.97 * 459.27, epsilon = 1e-9);
        assert_relative_eq!(q, 445.4919, epsilon = 1e-4);
    }

    #[test]
    fn mixed_flux_oracle_value() {
        let p = BodyRadiationProfile::standing();
        let q = total_flux(&mixed_fluxes(), &p).unwrap();
        assert_relative_eq!(q, ORACLE_Q_MIXED, epsilon = 1e-9);
        let t = tmrt_from_fluxes(&mixed_fluxes(), &p).unwrap();
        assert_relative_eq!(t, ORACLE_TMRT_MIXED, epsilon = 1e-5);
    }

    #[test]
    fn isothermal_enclosure_round_trip() {
        let p = BodyRadiationProfile::standing();
        for t_k in [250.0f64, 300.0, 350.0] {
            let f = DirectionalFluxes::isothermal(SIGMA * t_k.powi(4));
            let t = tmrt_from_fluxes(&f, &p).unwrap();
            assert!(
                (t - (t_k - KELVIN_OFFSET)).abs() < 1e-9,
                "round trip at {t_k} K gave {t}"
            );
        }
    }

    #[test]
    fn all_zero_fluxes_give_absolute_zero() {
        let p = BodyRadiationProfile::standing();
        let t = tmrt_from_fluxes(&DirectionalFluxes::zero(), &p).unwrap();
        assert_relative_eq!(t, -KELVIN_OFFSET, epsilon = 1e-12);
    }

    #[test]
    fn negative_flux_rejected() {
        let p = BodyRadiationProfile::standing();
        let mut f = DirectionalFluxes::zero();
        f.shortwave[2] = -1.0;
        assert!(matches!(
            total_flux(&f, &p),
            Err(CoreError::NegativeFlux { .. })
        ));
    }

    #[test]
    fn weight_closure_enforced() {
        assert!(BodyRadiationProfile::new(0.7, 0.97, 0.97, 0.1, 0.22, SIGMA).is_err());
        assert!(BodyRadiationProfile::new(0.7, 0.97, 0.97, 0.06, 0.22, SIGMA).is_ok());
        assert!(BodyRadiationProfile::new(0.7, 1.2, 0.97, 0.06, 0.22, SIGMA).is_err());
    }

    #[test]
    fn gradient_symmetry_in_uniform_field() {
        let p = BodyRadiationProfile::standing();
        let f = DirectionalFluxes::isothermal(SIGMA * 300.0_f64.powi(4));
        let g = tmrt_gradient(&f, &p).unwrap();
        // longwave partials equal within class
        assert!((g[6] - g[7]).abs() < 1e-15); // up vs down
        for i in 9..12 {
            assert!((g[8] - g[i]).abs() < 1e-15); // lateral class
        }
        // vertical/lateral ratio equals weight ratio
        assert_relative_eq!(g[6] / g[8], p.w_updown / p.w_others, epsilon = 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = BodyRadiationProfile::standing();
        let f = mixed_fluxes();
        let g = tmrt_gradient(&f, &p).unwrap();
        let h = 1e-3;
        for k in 0..12 {
            let mut up = f.as_vec();
            let mut dn = f.as_vec();
            up[k] += h;
            dn[k] -= h;
            let t_up = tmrt_from_fluxes(&DirectionalFluxes::from_vec(&up), &p).unwrap();
            let t_dn = tmrt_from_fluxes(&DirectionalFluxes::from_vec(&dn), &p).unwrap();
            let fd = (t_up - t_dn) / (2.0 * h);
            let rel = (g[k] - fd).abs() / fd.abs().max(1e-12);
            assert!(rel < 1e-6, "component {k}: analytic {} vs fd {fd}", g[k]);
        }
    }

    #[test]
    fn gradient_scales_with_quarter_power_homogeneity() {
        let p = BodyRadiationProfile::standing();
        let f = mixed_fluxes();
        let g1 = tmrt_gradient(&f, &p).unwrap();
        let doubled = DirectionalFluxes {
            shortwave: f.shortwave.map(|x| 2.0 * x),
            longwave: f.longwave.map(|x| 2.0 * x),
        };
        let g2 = tmrt_gradient(&doubled, &p).unwrap();
        let scale = 2.0_f64.powf(-0.75);
        for k in 0..12 {
            assert_relative_eq!(g2[k], g1[k] * scale, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_singular_at_zero() {
        let p = BodyRadiationProfile::standing();
        assert!(matches!(
            tmrt_gradient(&DirectionalFluxes::zero(), &p),
            Err(CoreError::SingularGradient)
        ));
    }

    #[test]
    fn monotonic_in_every_component() {
        let p = BodyRadiationProfile::standing();
        let base = mixed_fluxes();
        let t0 = tmrt_from_fluxes(&base, &p).unwrap();
        for k in 0..12 {
            let mut v = base.as_vec();
            v[k] += 10.0;
            let t = tmrt_from_fluxes(&DirectionalFluxes::from_vec(&v), &p).unwrap();
            assert!(t > t0, "component {k} did not increase T_mrt");
        }
    }

    #[test]
    fn lateral_permutation_and_updown_swap_invariance() {
        let p = BodyRadiationProfile::standing();
        let f = DirectionalFluxes {
            shortwave: [10.0, 20.0, 30.0, 40.0, 50.0, 60.0],
            longwave: [410.0, 420.0, 430.0, 440.0, 450.0, 460.0],
        };
        let t0 = tmrt_from_fluxes(&f, &p).unwrap();

        let mut swapped = f;
        swapped.shortwave.swap(2, 4); // north <-> south
        swapped.longwave.swap(2, 4);
        assert_relative_eq!(tmrt_from_fluxes(&swapped, &p).unwrap(), t0, epsilon = 1e-12);

        let mut vswap = f;
        vswap.shortwave.swap(0, 1); // up <-> down
        vswap.longwave.swap(0, 1);
        assert_relative_eq!(tmrt_from_fluxes(&vswap, &p).unwrap(), t0, epsilon = 1e-12);
    }
}
