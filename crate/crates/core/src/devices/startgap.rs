//! Start-Gap wear leveling: N logical lines over N+1 physical lines, one
//! of which is the moving gap.

use serde::{Deserialize, Serialize};

use super::DeviceError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartGap {
    n: u64,
    start: u64,
    gap: u64,
    write_counter: u64,
    psi: u64,
    rotations: u64,
}

/// A line copy performed by a gap movement: `from` is copied into `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GapMove {
    pub from: u64,
    pub to: u64,
}

impl StartGap {
    pub fn new(n: u64, psi: u64) -> Result<Self, DeviceError> {
        if n == 0 || psi == 0 {
            return Err(DeviceError::Config("start-gap needs n > 0 and psi > 0"));
        }
        Ok(StartGap {
            n,
            start: 0,
            gap: n,
            write_counter: 0,
            psi,
            rotations: 0,
        })
    }

    pub fn lines(&self) -> u64 {
        self.n
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn gap(&self) -> u64 {
        self.gap
    }

    pub fn rotations(&self) -> u64 {
        self.rotations
    }

    pub fn translate(&self, logical: u64) -> Result<u64, DeviceError> {
        if logical >= self.n {
            return Err(DeviceError::OutOfRange {
                line: logical,
                lines: self.n,
            });
        }
        let pa = (logical + self.start) % self.n;
        Ok(if pa >= self.gap { pa + 1 } else { pa })
    }

    /// Moves the gap by one line.
    pub fn rotate(&mut self) -> GapMove {
        self.write_counter = 0;
        self.rotations += 1;
        if self.gap == 0 {
            let mv = GapMove { from: self.n, to: 0 };
            self.gap = self.n;
            self.start = (self.start + 1) % self.n;
            mv
        } else {
            let mv = GapMove {
                from: self.gap - 1,
                to: self.gap,
            };
            self.gap -= 1;
            mv
        }
    }

    /// Counts one media write; rotates every `psi` writes.
    pub fn record_write(&mut self) -> Option<GapMove> {
        self.write_counter += 1;
        (self.write_counter >= self.psi).then(|| self.rotate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashMap};

    #[test]
    fn fresh_is_identity() {
        let sg = StartGap::new(8, 100).unwrap();
        for l in 0..8 {
            assert_eq!(sg.translate(l).unwrap(), l);
        }
        assert!(sg.translate(8).is_err());
    }

    #[test]
    fn bijective_at_every_state() {
        for n in 1..=16u64 {
            let mut sg = StartGap::new(n, 1).unwrap();
            for _ in 0..(n + 1) * (n + 2) {
                let image: BTreeSet<u64> = (0..n).map(|l| sg.translate(l).unwrap()).collect();
                assert_eq!(image.len() as u64, n);
                assert!(!image.contains(&sg.gap()));
                assert!(image.iter().all(|&p| p <= n));
                sg.rotate();
            }
        }
    }

    #[test]
    fn full_cycle_advances_start() {
        let mut sg = StartGap::new(4, 100).unwrap();
        for _ in 0..5 {
            sg.rotate();
        }
        assert_eq!(sg.start(), 1);
        assert_eq!(sg.gap(), 4);
    }

    #[test]
    fn rotation_period() {
        let mut sg = StartGap::new(10, 100).unwrap();
        let fired: Vec<u64> = (1..=350)
            .filter(|_| sg.record_write().is_some())
            .collect();
        assert_eq!(fired, vec![100, 200, 300]);
    }

    #[test]
    fn data_follows_moves() {
        for n in 1..=12u64 {
            let mut sg = StartGap::new(n, 1).unwrap();
            let mut phys: HashMap<u64, u64> = (0..n).map(|l| (sg.translate(l).unwrap(), l)).collect();
            for _ in 0..3 * (n + 1) {
                let mv = sg.rotate();
                let v = phys.remove(&mv.from).unwrap();
                phys.insert(mv.to, v);
                for l in 0..n {
                    assert_eq!(phys[&sg.translate(l).unwrap()], l);
                }
            }
        }
    }

    #[test]
    fn wear_spread_single_hot_line() {
        let eps = 0.5;
        for n in 2..=8u64 {
            let psi = 4;
            let mut sg = StartGap::new(n, psi).unwrap();
            let mut wear = vec![0u64; (n + 1) as usize];
            let total = 8 * psi * (n + 1) * n;
            for _ in 0..total {
                let p = sg.translate(0).unwrap();
                wear[p as usize] += 1;
                if let Some(mv) = sg.record_write() {
                    wear[mv.to as usize] += 1;
                }
            }
            let all: u64 = wear.iter().sum();
            let bound = all as f64 / (n + 1) as f64 * (1.0 + eps);
            let max = *wear.iter().max().unwrap() as f64;
            assert!(max <= bound, "n={n} max={max} bound={bound}");
        }
    }
}
