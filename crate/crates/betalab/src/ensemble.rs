//! Ensemble specifications.
//!
//! A spec describes the sum of a Gaussian-type ensemble of weight `delta`
//! with a finite list of Laguerre-type components, each carrying a scale
//! `alpha` (nonzero rational, components ordered by strictly decreasing
//! |alpha|) and an aspect weight `gamma >= 1`. `centering` selects whether
//! first moments are removed.
//!
//! JSON form (rationals are strings, either `"p/q"` or decimal):
//!
//! ```json
//! {
//!   "delta": "1/2",
//!   "components": [{ "alpha": "1", "gamma": "2" }],
//!   "centering": "uncentered"
//! }
//! ```

use num::rational::BigRational;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::SpecError;
use crate::exact::{format_rational, int};

/// One Laguerre-type component: scale `alpha`, aspect weight `gamma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    #[serde(with = "crate::exact::rational_string")]
    pub alpha: BigRational,
    #[serde(with = "crate::exact::rational_string")]
    pub gamma: BigRational,
}

impl Component {
    pub fn new(alpha: BigRational, gamma: BigRational) -> Self {
        Component { alpha, gamma }
    }
}

/// Whether component means are subtracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centering {
    Centered,
    #[default]
    Uncentered,
}

/// A validated ensemble specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct EnsembleSpec {
    delta: BigRational,
    components: Vec<Component>,
    centering: Centering,
}

/// Unvalidated mirror used by serde. Unknown fields are rejected so that
/// a typo in a spec file fails loudly instead of silently defaulting.
#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(with = "crate::exact::rational_string")]
    delta: BigRational,
    #[serde(default)]
    components: Vec<Component>,
    #[serde(default)]
    centering: Centering,
}

impl TryFrom<RawSpec> for EnsembleSpec {
    type Error = SpecError;
    fn try_from(raw: RawSpec) -> Result<Self, SpecError> {
        EnsembleSpec::new(raw.delta, raw.components, raw.centering)
    }
}

impl From<EnsembleSpec> for RawSpec {
    fn from(spec: EnsembleSpec) -> RawSpec {
        RawSpec {
            delta: spec.delta,
            components: spec.components,
            centering: spec.centering,
        }
    }
}

impl EnsembleSpec {
    /// Validate and build a spec. Requirements: `delta >= 0`; every component
    /// has nonzero `alpha` and `gamma >= 1`; components are ordered by
    /// strictly decreasing `|alpha|`; at least one of the Gaussian part and
    /// the component list is present.
    pub fn new(
        delta: BigRational,
        components: Vec<Component>,
        centering: Centering,
    ) -> Result<Self, SpecError> {
        if delta.is_negative() {
            return Err(SpecError::NegativeDelta(format_rational(&delta)));
        }
        if delta.is_zero() && components.is_empty() {
            return Err(SpecError::Empty);
        }
        for (index, c) in components.iter().enumerate() {
            if c.alpha.is_zero() {
                return Err(SpecError::ZeroAlpha { index });
            }
            if c.gamma < int(1) {
                return Err(SpecError::GammaTooSmall {
                    index,
                    gamma: format_rational(&c.gamma),
                });
            }
        }
        for i in 1..components.len() {
            if components[i - 1].alpha.abs() <= components[i].alpha.abs() {
                return Err(SpecError::AlphaOrder(i - 1, i));
            }
        }
        Ok(EnsembleSpec {
            delta,
            components,
            centering,
        })
    }

    /// Parse a spec from its JSON form.
    pub fn from_json(json: &str) -> Result<Self, SpecError> {
        serde_json::from_str(json).map_err(|e| SpecError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization cannot fail")
    }

    /// Pure Gaussian spec of weight `delta = 1`: the semicircle benchmark.
    pub fn semicircle() -> Self {
        EnsembleSpec::new(int(1), Vec::new(), Centering::Uncentered).expect("valid")
    }

    /// Single uncentered component with `alpha = 1` and the given aspect
    /// weight: the Marchenko–Pastur benchmark.
    pub fn marchenko_pastur(gamma: BigRational) -> Result<Self, SpecError> {
        EnsembleSpec::new(
            BigRational::zero(),
            vec![Component::new(int(1), gamma)],
            Centering::Uncentered,
        )
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    pub fn is_gaussian_only(&self) -> bool {
        self.components.is_empty()
    }

    /// The component of largest |alpha|, if any.
    pub fn leading_component(&self) -> Option<&Component> {
        self.components.first()
    }

    /// Matrix dimensions for the components at matrix size `n`:
    /// `L_i = ceil(gamma_i * n)`.
    pub fn component_dims(&self, n: u32) -> Vec<BigRational> {
        self.components
            .iter()
            .map(|c| (&c.gamma * int(n as i64)).ceil())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn json_round_trip() {
        let json = r#"{"delta":"1/2","components":[{"alpha":"1","gamma":"2"}],"centering":"uncentered"}"#;
        let spec = EnsembleSpec::from_json(json).unwrap();
        assert_eq!(spec.delta(), &ratio(1, 2));
        assert_eq!(spec.components().len(), 1);
        assert_eq!(spec.centering(), Centering::Uncentered);
        let back = EnsembleSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn centering_defaults_to_uncentered() {
        let spec = EnsembleSpec::from_json(r#"{"delta":"1"}"#).unwrap();
        assert!(spec.is_gaussian_only());
        assert_eq!(spec.centering(), Centering::Uncentered);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(EnsembleSpec::from_json(r#"{"delta":"-1"}"#).is_err());
        assert!(EnsembleSpec::from_json(r#"{"delta":"0"}"#).is_err());
        assert!(EnsembleSpec::from_json(
            r#"{"delta":"0","components":[{"alpha":"0","gamma":"1"}]}"#
        )
        .is_err());
        assert!(EnsembleSpec::from_json(
            r#"{"delta":"0","components":[{"alpha":"1","gamma":"1/2"}]}"#
        )
        .is_err());
        // |alpha| must strictly decrease.
        assert!(EnsembleSpec::from_json(
            r#"{"delta":"0","components":[{"alpha":"1","gamma":"1"},{"alpha":"-1","gamma":"1"}]}"#
        )
        .is_err());
    }

    #[test]
    fn mixed_sign_alphas_allowed_when_ordered() {
        let spec = EnsembleSpec::from_json(
            r#"{"delta":"1/3","components":[{"alpha":"1","gamma":"2"},{"alpha":"-1/2","gamma":"1"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.components().len(), 2);
    }

    #[test]
    fn component_dims_take_ceilings() {
        let spec = EnsembleSpec::from_json(
            r#"{"delta":"0","components":[{"alpha":"1","gamma":"3/2"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.component_dims(5), vec![int(8)]);
        assert_eq!(spec.component_dims(4), vec![int(6)]);
    }
}
