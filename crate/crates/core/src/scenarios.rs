//! The pre/post-selected pairs of the Cheshire cat constructions and the
//! weak-value patterns they are expected to produce.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Arm, BasisConvention, Ket, MAX_PHOTONS};
use crate::parse::parse_angle;
use crate::weakval::{ObservableKey, ObservableKind, PrePostPair, WeakValueReport};

/// Which construction to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioId {
    /// One photon whose circular polarization is found in the other arm.
    Single,
    /// Two path-entangled photons, maximally entangled.
    TwoCat,
    /// Two photons with pre-state `cosθ|LR> + e^{iφ} sinθ|RL>` (angles in radians).
    General { theta: f64, phi: f64 },
    /// `n` photons in the binary-index family.
    NCat { n: usize },
}

impl ScenarioId {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScenarioId::General { theta, phi } => {
                if !phi.is_finite() || !theta.is_finite() {
                    return Err(Error::input("scenario angles must be finite"));
                }
                if !(theta > 0.0 && theta < FRAC_PI_2) {
                    return Err(Error::DegenerateScenario(format!(
                        "θ = {theta} is outside (0, π/2): cotθ is singular or the pre-state is a product"
                    )));
                }
                Ok(())
            }
            ScenarioId::NCat { n } => {
                if n < 2 {
                    return Err(Error::DegenerateScenario(format!(
                        "n-cat family needs n >= 2, got {n}"
                    )));
                }
                if n > MAX_PHOTONS {
                    return Err(Error::input(format!("n-cat limited to {MAX_PHOTONS} photons")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn photons(&self) -> usize {
        match *self {
            ScenarioId::Single => 1,
            ScenarioId::TwoCat | ScenarioId::General { .. } => 2,
            ScenarioId::NCat { n } => n,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioId::Single => f.write_str("single"),
            ScenarioId::TwoCat => f.write_str("two-cat"),
            ScenarioId::General { theta, phi } => write!(f, "general:θ={theta},φ={phi}"),
            ScenarioId::NCat { n } => write!(f, "n-cat:n={n}"),
        }
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    /// `single`, `two-cat`, `general:θ=pi/3,φ=1.0` (also `theta=`/`phi=`),
    /// `n-cat:n=5`. Parameters may be omitted: `general` defaults to θ=π/4,
    /// φ=0. Range checks happen in [`ScenarioId::validate`].
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let mut kv = BTreeMap::new();
        if let Some(params) = params {
            for item in params.split(',').filter(|p| !p.trim().is_empty()) {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::input(format!("scenario parameter `{item}` lacks `=`")))?;
                let key = match k.trim() {
                    "θ" | "theta" => "theta",
                    "φ" | "phi" => "phi",
                    "n" => "n",
                    other => return Err(Error::input(format!("unknown scenario parameter `{other}`"))),
                };
                if kv.insert(key, v.trim().to_string()).is_some() {
                    return Err(Error::input(format!("scenario parameter `{key}` repeated")));
                }
            }
        }
        let reject_params = |allowed: &[&str]| -> Result<()> {
            match kv.keys().find(|k| !allowed.contains(k)) {
                Some(k) => Err(Error::input(format!("`{name}` takes no parameter `{k}`"))),
                None => Ok(()),
            }
        };
        match name {
            "single" => {
                reject_params(&[])?;
                Ok(ScenarioId::Single)
            }
            "two-cat" => {
                reject_params(&[])?;
                Ok(ScenarioId::TwoCat)
            }
            "general" => {
                reject_params(&["theta", "phi"])?;
                let theta = kv.get("theta").map(|v| parse_angle(v)).transpose()?;
                let phi = kv.get("phi").map(|v| parse_angle(v)).transpose()?;
                Ok(ScenarioId::General {
                    theta: theta.unwrap_or(std::f64::consts::FRAC_PI_4),
                    phi: phi.unwrap_or(0.0),
                })
            }
            "n-cat" => {
                reject_params(&["n"])?;
                let n = kv
                    .get("n")
                    .ok_or_else(|| Error::input("n-cat needs n=<photons>"))?;
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::input(format!("bad photon count `{n}`")))?;
                Ok(ScenarioId::NCat { n })
            }
            other => Err(Error::input(format!("unknown scenario `{other}`"))),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Indices of the two pre-state terms of the `n`-photon family:
/// `Σ_{k=1}^{⌊n/2⌋} 2^{2n-2k}` and `Σ_{j=1}^{⌊(n+1)/2⌋} 2^{2n-2j+1}`.
/// Both have an all-H polarization block.
pub fn pre_state_indices(n: usize) -> Result<(usize, usize)> {
    ScenarioId::NCat { n }.validate()?;
    let a = (1..=n / 2).map(|k| 1usize << (2 * n - 2 * k)).sum();
    let b = (1..=(n + 1) / 2).map(|j| 1usize << (2 * n - 2 * j + 1)).sum();
    Ok((a, b))
}

/// Indices of the `n + 1` post-state terms: the first pre-state term (weight
/// `-i`), the second path block with the last photon vertical, and that path
/// block with photon `n - 1 - l` vertical for `l = 0..n-2` instead.
pub fn post_state_indices(n: usize) -> Result<(usize, usize, Vec<usize>)> {
    let (a, b) = pre_state_indices(n)?;
    let extras = (0..=n - 2).map(|l| b + (1usize << (l + 1))).collect();
    Ok((a, b + 1, extras))
}

pub fn build_pair(id: ScenarioId) -> Result<PrePostPair> {
    id.validate()?;
    let conv = BasisConvention::new(id.photons())?;
    let s = FRAC_1_SQRT_2;
    let (pre, post) = match id {
        ScenarioId::Single => (
            // (i|L> + |R>)|H> / √2
            Ket::from_amplitudes(conv, [(0b00, c(0.0, s)), (0b10, c(s, 0.0))])?,
            // (|L>|H> + |R>|V>) / √2
            Ket::from_amplitudes(conv, [(0b00, c(s, 0.0)), (0b11, c(s, 0.0))])?,
        ),
        ScenarioId::TwoCat => return build_pair(ScenarioId::NCat { n: 2 }),
        ScenarioId::General { theta, phi } => {
            let phase = Complex64::from_polar(1.0, phi);
            let cot = theta.cos() / theta.sin();
            let r = 1.0 / 3f64.sqrt();
            let lr = conv.parse_label("0100")?;
            let rl = conv.parse_label("1000")?;
            (
                Ket::from_amplitudes(conv, [(lr, c(theta.cos(), 0.0)), (rl, phase * theta.sin())])?,
                // displayed 1/√3 prefactor; normalized only when θ = π/4
                Ket::from_amplitudes(
                    conv,
                    [
                        (lr, c(0.0, -r)),
                        (conv.parse_label("1001")?, phase * cot * r),
                        (conv.parse_label("1010")?, phase * cot * r),
                    ],
                )?,
            )
        }
        ScenarioId::NCat { n } => {
            let (a, b) = pre_state_indices(n)?;
            let (pa, main, extras) = post_state_indices(n)?;
            let w = 1.0 / ((n + 1) as f64).sqrt();
            let mut post = vec![(pa, c(0.0, -w)), (main, c(w, 0.0))];
            post.extend(extras.into_iter().map(|k| (k, c(w, 0.0))));
            (
                Ket::from_amplitudes(conv, [(a, c(s, 0.0)), (b, c(s, 0.0))])?,
                Ket::from_amplitudes(conv, post)?,
            )
        }
    };
    PrePostPair::new(pre, post)
}

/// Expected Kronecker-delta weak values, keyed like a [`WeakValueReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedPattern {
    entries: BTreeMap<ObservableKey, u8>,
}

impl ExpectedPattern {
    pub fn get(&self, key: ObservableKey) -> Option<u8> {
        self.entries.get(&key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ObservableKey, u8)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|reported - expected|` over all keys; infinite if the key sets differ.
    pub fn max_deviation(&self, report: &WeakValueReport) -> f64 {
        if report.len() != self.len() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (key, want) in self.iter() {
            match report.get(key) {
                Some(v) => worst = worst.max((v - c(f64::from(want), 0.0)).norm()),
                None => return f64::INFINITY,
            }
        }
        worst
    }
}

/// Odd photons: path in L, grin in R. Even photons: path in R, grin in L.
/// This covers the single cat (photon 1 only) and every two- and n-photon case.
pub fn expected_pattern(id: ScenarioId) -> ExpectedPattern {
    let mut entries = BTreeMap::new();
    for photon in 1..=id.photons() {
        let path_arm = if photon % 2 == 1 { Arm::L } else { Arm::R };
        for arm in [Arm::L, Arm::R] {
            let on_path = u8::from(arm == path_arm);
            entries.insert(ObservableKey::new(photon, ObservableKind::Path, arm), on_path);
            entries.insert(ObservableKey::new(photon, ObservableKind::Grin, arm), 1 - on_path);
        }
    }
    ExpectedPattern { entries }
}

/// Schmidt coefficients of `state` across the cut photon 1 | photons 2..n,
/// from the singular values of the reshaped amplitude matrix (descending,
/// nonzero only).
pub fn photon_schmidt_coefficients(state: &Ket) -> Result<Vec<f64>> {
    let conv = state.convention();
    let n = conv.photons();
    if n < 2 {
        return Err(Error::input("a Schmidt cut needs at least two photons"));
    }
    if n > 8 {
        return Err(Error::input("Schmidt decomposition limited to 8 photons"));
    }
    let rest = 1usize << (2 * (n - 1));
    let mut m = DMatrix::<Complex64>::zeros(4, rest);
    for (index, amp) in state.normalized()?.iter() {
        let arm = conv.arm_of(index, 1).bit();
        let pol = conv.pol_of(index, 1).bit();
        let mut col = 0usize;
        for photon in 2..=n {
            col = (col << 1) | conv.arm_of(index, photon).bit();
        }
        for photon in 2..=n {
            col = (col << 1) | conv.pol_of(index, photon).bit();
        }
        m[(2 * arm + pol, col)] = amp;
    }
    let mut sv: Vec<f64> = m
        .singular_values()
        .iter()
        .copied()
        .filter(|&v| v > 1e-12)
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn parse_ids() {
        assert_eq!("single".parse::<ScenarioId>().unwrap(), ScenarioId::Single);
        assert_eq!("two-cat".parse::<ScenarioId>().unwrap(), ScenarioId::TwoCat);
        assert_eq!(
            "n-cat:n=5".parse::<ScenarioId>().unwrap(),
            ScenarioId::NCat { n: 5 }
        );
        assert_eq!(
            "general:θ=pi/3,φ=1.0".parse::<ScenarioId>().unwrap(),
            ScenarioId::General { theta: PI / 3.0, phi: 1.0 }
        );
        assert_eq!(
            "general:theta=0".parse::<ScenarioId>().unwrap(),
            ScenarioId::General { theta: 0.0, phi: 0.0 }
        );
        for bad in ["", "three-cat", "n-cat", "n-cat:n=x", "single:n=2", "general:θ", "general:x=1", "general:θ=1,θ=2"] {
            assert!(bad.parse::<ScenarioId>().is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn display_round_trips() {
        for id in [
            ScenarioId::Single,
            ScenarioId::TwoCat,
            ScenarioId::NCat { n: 7 },
            ScenarioId::General { theta: 0.3, phi: -1.25 },
        ] {
            assert_eq!(id.to_string().parse::<ScenarioId>().unwrap(), id);
        }
    }

    #[test]
    fn boundary_angles_are_degenerate() {
        for theta in [0.0, FRAC_PI_2, -0.1, 2.0] {
            assert!(matches!(
                build_pair(ScenarioId::General { theta, phi: 0.0 }),
                Err(Error::DegenerateScenario(_))
            ));
        }
        assert!(matches!(
            build_pair(ScenarioId::NCat { n: 1 }),
            Err(Error::DegenerateScenario(_))
        ));
    }

    #[test]
    fn pre_indices_match_table() {
        assert_eq!(pre_state_indices(2).unwrap(), (4, 8));
        assert_eq!(pre_state_indices(3).unwrap(), (16, 40));
        assert_eq!(pre_state_indices(4).unwrap(), (80, 160));
        assert_eq!(pre_state_indices(5).unwrap(), (320, 672));
    }

    #[test]
    fn post_indices_match_table() {
        assert_eq!(post_state_indices(2).unwrap(), (4, 9, vec![10]));
        assert_eq!(post_state_indices(3).unwrap(), (16, 41, vec![42, 44]));
        assert_eq!(
            post_state_indices(5).unwrap(),
            (320, 673, vec![674, 676, 680, 688])
        );
    }

    #[test]
    fn two_cat_pair_is_exact() {
        let pair = build_pair(ScenarioId::TwoCat).unwrap();
        let conv = pair.convention();
        let s = FRAC_1_SQRT_2;
        let r = 1.0 / 3f64.sqrt();
        let pre = Ket::from_amplitudes(conv, [(4, c(s, 0.0)), (8, c(s, 0.0))]).unwrap();
        let post =
            Ket::from_amplitudes(conv, [(4, c(0.0, -r)), (9, c(r, 0.0)), (10, c(r, 0.0))]).unwrap();
        assert_eq!(pair.pre(), &pre);
        assert_eq!(pair.post(), &post);
        assert!(pair.pre().is_normalized() && pair.post().is_normalized());
    }

    #[test]
    fn general_reduces_to_two_cat() {
        let g = build_pair(ScenarioId::General { theta: FRAC_PI_4, phi: 0.0 }).unwrap();
        let t = build_pair(ScenarioId::TwoCat).unwrap();
        assert!(g.pre().max_abs_diff_up_to_phase(t.pre()).unwrap() < 1e-12);
        assert!(g.post().max_abs_diff_up_to_phase(t.post()).unwrap() < 1e-12);
    }

    #[test]
    fn general_post_is_unnormalized_away_from_quarter_pi() {
        let g = build_pair(ScenarioId::General { theta: PI / 3.0, phi: 1.0 }).unwrap();
        assert!(!g.post().is_normalized());
        assert!(g.pre().is_normalized());
    }

    #[test]
    fn patterns() {
        let single = expected_pattern(ScenarioId::Single);
        assert_eq!(single.len(), 4);
        assert_eq!(single.get(ObservableKey::new(1, ObservableKind::Path, Arm::L)), Some(1));
        assert_eq!(single.get(ObservableKey::new(1, ObservableKind::Grin, Arm::R)), Some(1));
        assert_eq!(single.get(ObservableKey::new(1, ObservableKind::Grin, Arm::L)), Some(0));
        let two = expected_pattern(ScenarioId::TwoCat);
        assert_eq!(two.get(ObservableKey::new(2, ObservableKind::Path, Arm::R)), Some(1));
        assert_eq!(two.get(ObservableKey::new(2, ObservableKind::Grin, Arm::L)), Some(1));
        let four = expected_pattern(ScenarioId::NCat { n: 4 });
        assert_eq!(four.len(), 16);
        for photon in [1, 3] {
            assert_eq!(four.get(ObservableKey::new(photon, ObservableKind::Path, Arm::L)), Some(1));
            assert_eq!(four.get(ObservableKey::new(photon, ObservableKind::Grin, Arm::R)), Some(1));
        }
        for photon in [2, 4] {
            assert_eq!(four.get(ObservableKey::new(photon, ObservableKind::Path, Arm::R)), Some(1));
            assert_eq!(four.get(ObservableKey::new(photon, ObservableKind::Grin, Arm::L)), Some(1));
        }
    }

    #[test]
    fn schmidt_coefficients_of_general_pre_state() {
        for theta in [PI / 8.0, FRAC_PI_4, 3.0 * PI / 8.0] {
            let pair = build_pair(ScenarioId::General { theta, phi: 1.0 }).unwrap();
            let sv = photon_schmidt_coefficients(pair.pre()).unwrap();
            let mut want = [theta.cos(), theta.sin()];
            want.sort_by(|a, b| b.total_cmp(a));
            assert_eq!(sv.len(), 2);
            assert!((sv[0] - want[0]).abs() < 1e-12 && (sv[1] - want[1]).abs() < 1e-12);
        }
    }
}
