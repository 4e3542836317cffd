//! Radius and temperature thresholds of the stability and minimality results.

use num_integer::Roots;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::Result;
use crate::profile::r_star;
use crate::spectra::hardy_radius_thresholds;

/// `h₊(t) = (3 + √(9 + 8t))/4` exactly, when `9 + 8t` is a perfect square.
pub fn h_plus_exact(t: u64) -> Option<Ratio<u64>> {
    let d = 9 + 8 * t;
    let s = d.sqrt();
    (s * s == d).then(|| Ratio::new(3 + s, 4))
}

#[derive(Debug, Clone, Serialize)]
pub struct TauCheck {
    pub constant: u64,
    pub t: u64,
    pub discriminant: u64,
    pub sqrt_discriminant: u64,
    pub h_plus: String,
    /// `constant · h₊(t)`.
    pub product: String,
    /// `t = constant · h₊(t)` holds exactly.
    pub equality: bool,
}

/// The temperature at which `t = c h₊(t)`: from `2h₊² = 3h₊ + t` this is
/// `h₊ = (3 + c)/2`, `t = c(3 + c)/2`.
pub fn tau_for_constant(c: u64) -> Option<TauCheck> {
    if (3 + c) % 2 != 0 {
        return None;
    }
    let t = c * (3 + c) / 2;
    let h = h_plus_exact(t)?;
    let product = h * c;
    let d = 9 + 8 * t;
    Some(TauCheck {
        constant: c,
        t,
        discriminant: d,
        sqrt_discriminant: d.sqrt(),
        h_plus: h.to_string(),
        product: product.to_string(),
        equality: product == Ratio::from_integer(t),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Threshold {
    pub name: String,
    pub value: f64,
    /// How the value is obtained.
    pub source: String,
    pub note: String,
}

pub fn threshold_table() -> Result<Vec<Threshold>> {
    let (r0, r0_alt) = hardy_radius_thresholds();
    let tau = tau_for_constant(43).expect("43 + 3 is even");
    Ok(vec![
        Threshold {
            name: "R0".into(),
            value: r0,
            source: "closed form exp(4*pi^2/23)".into(),
            note: "global minimality radius with the Hardy constant taken as pi^2/ln R + 1/4".into(),
        },
        Threshold {
            name: "R0_alt".into(),
            value: r0_alt,
            source: "closed form exp(2*pi/sqrt(23))".into(),
            note: "same condition with the Hardy constant pi^2/(ln R)^2 + 1/4 reproduced by the eigenvalue solver".into(),
        },
        Threshold {
            name: "R_local".into(),
            value: 1.0 + std::f64::consts::PI / 6f64.sqrt(),
            source: "closed form 1 + pi/sqrt(6)".into(),
            note: "local stability radius from the Wirtinger constant pi^2/(R-1)^2".into(),
        },
        Threshold {
            name: "R_star".into(),
            value: r_star()?,
            source: "bisection on min eta(R) = 2/3".into(),
            note: "below it the comparison function keeps h >= 2/3".into(),
        },
        Threshold {
            name: "tau2".into(),
            value: tau.t as f64,
            source: format!(
                "exact: sqrt(9 + 8*{}) = {}, h+ = {}, 43*h+ = {}",
                tau.t, tau.sqrt_discriminant, tau.h_plus, tau.product
            ),
            note: "smallest t with t >= 43 h+(t)".into(),
        },
    ])
}
