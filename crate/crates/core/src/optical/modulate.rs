//! Per-symbol power arithmetic of MRR modulators and detectors.

use serde::{Deserialize, Serialize};

use super::{Level, LightSymbolStream, OpticalError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MrrMode {
    /// Absorbs all light at the ring's wavelength.
    FullyCoupled,
    /// Absorbs exactly half and passes the rest downstream.
    HalfCoupled,
    /// Passes all light.
    NonCoupled,
}

impl MrrMode {
    pub fn pass(self, input: Level) -> Result<Level, OpticalError> {
        match self {
            MrrMode::FullyCoupled => Ok(Level::ZERO),
            MrrMode::HalfCoupled => input.halved(),
            MrrMode::NonCoupled => Ok(input),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Bit 0 fully couples the light, bit 1 passes it.
    Standard,
    /// Bit 0 half-couples the light so downstream devices can reuse it.
    HalfCoupledZero,
}

/// Detection threshold in eighths of the source power.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threshold(u8);

impl Threshold {
    /// "Strictly positive" detection.
    pub const ZERO: Threshold = Threshold(0);
    /// Midpoint between 1/2 and 1.
    pub const THREE_QUARTERS: Threshold = Threshold(6);

    pub fn from_ratio(numerator: u32, denominator: u32) -> Result<Threshold, OpticalError> {
        if denominator == 0 || !(8 * numerator).is_multiple_of(denominator) || numerator > denominator {
            return Err(OpticalError::BadThreshold(numerator, denominator));
        }
        Ok(Threshold(((8 * numerator) / denominator) as u8))
    }

    fn below(self, level: Level) -> bool {
        level.quarters() * 2 > self.0
    }
}

pub fn modulate(
    input: &LightSymbolStream,
    bits: &[bool],
    scheme: Scheme,
) -> Result<LightSymbolStream, OpticalError> {
    if bits.len() != input.len() {
        return Err(OpticalError::LengthMismatch {
            symbols: input.len(),
            bits: bits.len(),
        });
    }
    let zero_mode = match scheme {
        Scheme::Standard => MrrMode::FullyCoupled,
        Scheme::HalfCoupledZero => MrrMode::HalfCoupled,
    };
    let levels = input
        .levels()
        .iter()
        .zip(bits)
        .map(|(&level, &bit)| {
            if bit {
                MrrMode::NonCoupled.pass(level)
            } else {
                zero_mode.pass(level)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LightSymbolStream::new(input.wavelength_id, levels))
}

/// Half-coupled detection: senses every symbol and passes half of its
/// power on to the next device.
pub fn hc_detect(
    input: &LightSymbolStream,
    threshold: Threshold,
) -> Result<(Vec<bool>, LightSymbolStream), OpticalError> {
    let bits = input.levels().iter().map(|&l| threshold.below(l)).collect();
    let passed = input
        .levels()
        .iter()
        .map(|&l| MrrMode::HalfCoupled.pass(l))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((bits, LightSymbolStream::new(input.wavelength_id, passed)))
}

/// Full-coupled detection; the light is consumed.
pub fn fc_detect(input: LightSymbolStream, threshold: Threshold) -> Vec<bool> {
    input.levels().iter().map(|&l| threshold.below(l)).collect()
}

/// Parses a bit string like `"00110"`.
pub fn bits_from_str(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optical::wom::{wom_decode, WomCode};

    fn stream(s: &str) -> LightSymbolStream {
        LightSymbolStream::parse(0, s).unwrap()
    }

    #[test]
    fn half_coupled_zero_modulation() {
        let out = modulate(
            &LightSymbolStream::full(0, 5),
            &bits_from_str("00110"),
            Scheme::HalfCoupledZero,
        )
        .unwrap();
        assert_eq!(out.to_string(), "½½11½");
    }

    #[test]
    fn standard_modulation_on_reduced_light() {
        let out = modulate(&stream("¼¼½½¼"), &bits_from_str("10101"), Scheme::Standard).unwrap();
        assert_eq!(out.to_string(), "¼0½0¼");
    }

    #[test]
    fn all_ones_is_identity() {
        let input = stream("¼½1½0");
        for scheme in [Scheme::Standard, Scheme::HalfCoupledZero] {
            assert_eq!(modulate(&input, &[true; 5], scheme).unwrap(), input);
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            modulate(&stream("11"), &[true], Scheme::Standard),
            Err(OpticalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn hc_detect_example() {
        let (bits, passed) = hc_detect(&stream("½½11½"), Threshold::THREE_QUARTERS).unwrap();
        assert_eq!(bits_to_string(&bits), "00110");
        assert_eq!(passed.to_string(), "¼¼½½¼");
        let (bits, passed) = hc_detect(&stream("000"), Threshold::THREE_QUARTERS).unwrap();
        assert_eq!(bits, vec![false; 3]);
        assert_eq!(passed.to_string(), "000");
    }

    #[test]
    fn fc_detect_examples() {
        assert_eq!(bits_to_string(&fc_detect(stream("¼0½0¼"), Threshold::ZERO)), "10101");
        assert_eq!(bits_to_string(&fc_detect(stream("1111"), Threshold::ZERO)), "1111");
        let bits = fc_detect(stream("11½"), Threshold::THREE_QUARTERS);
        assert_eq!(bits_to_string(&bits), "110");
        let (data, _) = wom_decode(WomCode::from_bits(&bits).unwrap()).unwrap();
        assert_eq!(data.to_string(), "01");
    }

    #[test]
    fn thresholds() {
        assert_eq!(Threshold::from_ratio(3, 4).unwrap(), Threshold::THREE_QUARTERS);
        assert!(Threshold::from_ratio(1, 3).is_err());
        assert!(Threshold::from_ratio(5, 4).is_err());
    }

    // Every bit pattern on full light keeps at least 1/4 after the HC
    // detector, and no stage ever raises power.
    #[test]
    fn quarter_floor_and_power_never_increases() {
        for n in 1..=8usize {
            for pattern in 0u32..(1 << n) {
                let bits: Vec<bool> = (0..n).map(|i| pattern >> i & 1 == 1).collect();
                let src = LightSymbolStream::full(0, n);
                let tx = modulate(&src, &bits, Scheme::HalfCoupledZero).unwrap();
                let (rx, passed) = hc_detect(&tx, Threshold::THREE_QUARTERS).unwrap();
                assert_eq!(rx, bits);
                for i in 0..n {
                    assert!(tx.levels()[i] <= src.levels()[i]);
                    assert!(passed.levels()[i] <= tx.levels()[i]);
                    assert!(passed.levels()[i] >= Level::QUARTER);
                }
                let second: Vec<bool> = bits.iter().map(|b| !b).collect();
                let out = modulate(&passed, &second, Scheme::Standard).unwrap();
                for i in 0..n {
                    assert!(out.levels()[i] <= passed.levels()[i]);
                }
                assert_eq!(fc_detect(out, Threshold::ZERO), second);
            }
        }
    }
}
