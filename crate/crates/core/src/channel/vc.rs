//! Static wavelength division and per-VC device arbitration.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ChannelError;

pub type DeviceId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualChannel {
    pub id: u32,
    pub wavelengths: Vec<u32>,
    pub frequency_ghz: u32,
    pub owner: u32,
}

impl VirtualChannel {
    pub fn width_bits(&self) -> u32 {
        self.wavelengths.len() as u32
    }
}

/// Splits `total_wavelengths` into equal contiguous blocks, one per
/// controller, controller `i` owning VC `i`.
pub fn divide_channels(
    total_wavelengths: u32,
    n_controllers: u32,
    frequency_ghz: u32,
) -> Result<Vec<VirtualChannel>, ChannelError> {
    if n_controllers == 0 || !total_wavelengths.is_multiple_of(n_controllers) {
        return Err(ChannelError::Indivisible {
            wavelengths: total_wavelengths,
            controllers: n_controllers,
        });
    }
    let per = total_wavelengths / n_controllers;
    Ok((0..n_controllers)
        .map(|i| VirtualChannel {
            id: i,
            wavelengths: (i * per..(i + 1) * per).collect(),
            frequency_ghz,
            owner: i,
        })
        .collect())
}

/// Photonic demultiplexer control for one VC: enables the detector of
/// exactly one device at a time, granting round-robin.
#[derive(Clone, Debug)]
pub struct Arbiter {
    devices: Vec<DeviceId>,
    enabled: Option<DeviceId>,
    last_grant: Option<DeviceId>,
}

impl Arbiter {
    pub fn new(mut devices: Vec<DeviceId>) -> Self {
        devices.sort_unstable();
        devices.dedup();
        Arbiter {
            devices,
            enabled: None,
            last_grant: None,
        }
    }

    pub fn arbitrate(&mut self, requests: &BTreeSet<DeviceId>) -> Result<DeviceId, ChannelError> {
        if requests.is_empty() {
            return Err(ChannelError::NoRequesters);
        }
        if let Some(unknown) = requests.iter().find(|d| !self.devices.contains(d)) {
            return Err(ChannelError::UnknownDevice(*unknown));
        }
        let grant = match self.last_grant {
            None => *requests.iter().next().expect("non-empty"),
            Some(last) => requests
                .range(last + 1..)
                .next()
                .or_else(|| requests.iter().next())
                .copied()
                .expect("non-empty"),
        };
        self.last_grant = Some(grant);
        self.enabled = Some(grant);
        Ok(grant)
    }

    pub fn detector_enabled(&self, device: DeviceId) -> bool {
        self.enabled == Some(device)
    }

    pub fn enabled_count(&self) -> usize {
        self.devices
            .iter()
            .filter(|&&d| self.detector_enabled(d))
            .count()
    }

    pub fn release(&mut self) {
        self.enabled = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_division() {
        let vcs = divide_channels(96, 6, 30).unwrap();
        assert_eq!(vcs.len(), 6);
        assert!(vcs.iter().all(|v| v.width_bits() == 16));
        assert_eq!(vcs.iter().map(|v| v.width_bits()).sum::<u32>(), 96);
        let vcs = divide_channels(6, 6, 30).unwrap();
        assert!(vcs.iter().all(|v| v.width_bits() == 1));
        assert!(divide_channels(97, 6, 30).is_err());
        assert!(divide_channels(96, 0, 30).is_err());
    }

    proptest! {
        #[test]
        fn partition_is_disjoint_and_complete(per in 1u32..40, n in 1u32..12) {
            let vcs = divide_channels(per * n, n, 30).unwrap();
            let mut seen = BTreeSet::new();
            for v in &vcs {
                for w in &v.wavelengths {
                    prop_assert!(seen.insert(*w));
                }
            }
            prop_assert_eq!(seen, (0..per * n).collect::<BTreeSet<_>>());
        }
    }

    #[test]
    fn round_robin() {
        let mut arb = Arbiter::new(vec![1, 2, 3]);
        let one: BTreeSet<_> = [1].into();
        assert_eq!(arb.arbitrate(&one).unwrap(), 1);
        let both: BTreeSet<_> = [1, 2].into();
        let grants: Vec<_> = (0..4).map(|_| arb.arbitrate(&both).unwrap()).collect();
        assert_eq!(grants, vec![2, 1, 2, 1]);
        assert_eq!(arb.enabled_count(), 1);
        assert!(arb.detector_enabled(1));
        assert!(arb.arbitrate(&BTreeSet::new()).is_err());
        assert!(arb.arbitrate(&[9].into()).is_err());
    }

    proptest! {
        // brute-force round-robin oracle: next grant is the smallest
        // requester strictly greater than the previous grant, else the smallest.
        #[test]
        fn arbitration_matches_oracle(reqs in proptest::collection::vec(
            proptest::collection::btree_set(0u32..6, 1..6), 1..40)) {
            let mut arb = Arbiter::new((0..6).collect());
            let mut last: Option<u32> = None;
            for r in &reqs {
                let expected = match last {
                    None => *r.iter().min().unwrap(),
                    Some(l) => r.iter().copied().filter(|&d| d > l).min()
                        .unwrap_or(*r.iter().min().unwrap()),
                };
                let got = arb.arbitrate(r).unwrap();
                prop_assert_eq!(got, expected);
                prop_assert_eq!(arb.enabled_count(), 1);
                last = Some(got);
            }
        }
    }
}
