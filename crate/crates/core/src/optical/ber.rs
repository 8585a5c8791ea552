//! Bit-error-rate model `BER(P) = A * exp(-k * P)` over received power.
//!
//! The two coefficients are fitted by linear least squares on `ln BER`
//! against received power over a set of measured operating points. Each
//! operating point is described by its laser multiplier, route components
//! and the lowest legal "1" level reaching the detector, so the received
//! power comes from the same dB budget the rest of the simulator uses.

use serde::{Deserialize, Serialize};

use super::power::{received_power, OpticalPowerModel, RouteComponent};
use super::OpticalError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub name: String,
    pub laser_multiplier: f64,
    pub route: Vec<RouteComponent>,
    /// Worst-case power fraction of a detected "1" at the receiver.
    pub level_fraction: f64,
    /// Measured BER at this point, when known.
    pub measured_ber: Option<f64>,
}

impl OperatingPoint {
    pub fn received_mw(&self, model: &OpticalPowerModel) -> f64 {
        received_power(
            model.laser_power_mw_per_wavelength * self.laser_multiplier,
            model.path_loss_db(&self.route),
            self.level_fraction,
        )
        .expect("operating point fractions are within [0, 1]")
    }
}

/// Receiver operating points of the four measured functions.
///
/// - plain MC-to-device link at 1x laser;
/// - auto-read/write snarf: the half-coupled receiver sees half the light
///   of a 2x laser, from a device one centimeter closer;
/// - WOM swap: the second writer's data reaches DRAM at half power through
///   two modulators over a longer three-device path;
/// - half-coupled-transmitter swap: a 4x laser with the 1/4 floor.
pub fn reference_operating_points() -> Vec<OperatingPoint> {
    use RouteComponent::*;
    vec![
        OperatingPoint {
            name: "baseline".into(),
            laser_multiplier: 1.0,
            route: vec![Modulator, Waveguide { cm: 2.0 }, Filter, Detector],
            level_fraction: 1.0,
            measured_ber: Some(7.2e-16),
        },
        OperatingPoint {
            name: "wom-auto-rw".into(),
            laser_multiplier: 2.0,
            route: vec![Modulator, Waveguide { cm: 1.0 }, Filter, Detector],
            level_fraction: 0.5,
            measured_ber: Some(6.1e-16),
        },
        OperatingPoint {
            name: "wom-swap".into(),
            laser_multiplier: 2.0,
            route: vec![Modulator, Modulator, Waveguide { cm: 2.25 }, Filter, Detector],
            level_fraction: 0.5,
            measured_ber: Some(9.9e-16),
        },
        OperatingPoint {
            name: "bw-swap".into(),
            laser_multiplier: 4.0,
            route: vec![Modulator, Modulator, Waveguide { cm: 2.0 }, Filter, Detector],
            level_fraction: 0.25,
            measured_ber: Some(9.3e-16),
        },
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerModel {
    pub a: f64,
    /// Decay rate per mW.
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub name: String,
    pub received_mw: f64,
    pub measured: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

impl BerModel {
    pub fn new(a: f64, k: f64) -> Result<BerModel, OpticalError> {
        if !(a > 0.0 && a < 1.0 && k > 0.0 && a.is_finite() && k.is_finite()) {
            return Err(OpticalError::BadBerModel { a, k });
        }
        Ok(BerModel { a, k })
    }

    /// Least-squares fit of `ln BER = ln A - k P` over `(power_mw, ber)`.
    pub fn fit(points: &[(f64, f64)]) -> Result<BerModel, OpticalError> {
        if points.len() < 2 || points.iter().any(|&(p, b)| p <= 0.0 || b <= 0.0 || b >= 1.0) {
            return Err(OpticalError::Calibration("need two or more positive points"));
        }
        let n = points.len() as f64;
        let mean_p = points.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mean_p).powi(2)).sum();
        let sxy: f64 = points
            .iter()
            .map(|p| (p.0 - mean_p) * (p.1.ln() - mean_y))
            .sum();
        if sxx == 0.0 {
            return Err(OpticalError::Calibration("all points at the same power"));
        }
        let slope = sxy / sxx;
        let intercept = mean_y - slope * mean_p;
        BerModel::new(intercept.exp(), -slope)
    }

    pub fn calibrate(
        model: &OpticalPowerModel,
        points: &[OperatingPoint],
    ) -> Result<(BerModel, Vec<CalibrationRow>), OpticalError> {
        let measured: Vec<(&OperatingPoint, f64, f64)> = points
            .iter()
            .filter_map(|op| op.measured_ber.map(|b| (op, op.received_mw(model), b)))
            .collect();
        let fitted = BerModel::fit(
            &measured
                .iter()
                .map(|&(_, p, b)| (p, b))
                .collect::<Vec<_>>(),
        )?;
        let rows = measured
            .iter()
            .map(|&(op, p, b)| {
                let predicted = fitted.ber(p).expect("received power is positive");
                CalibrationRow {
                    name: op.name.clone(),
                    received_mw: p,
                    measured: b,
                    predicted,
                    relative_error: (predicted - b).abs() / b,
                }
            })
            .collect();
        Ok((fitted, rows))
    }

    pub fn ber(&self, received_mw: f64) -> Result<f64, OpticalError> {
        if received_mw.is_nan() || received_mw <= 0.0 {
            return Err(OpticalError::NonPositivePower(received_mw));
        }
        Ok(self.a * (-self.k * received_mw).exp())
    }
}

impl Default for BerModel {
    fn default() -> Self {
        BerModel::calibrate(&OpticalPowerModel::default(), &reference_operating_points())
            .expect("reference points calibrate")
            .0
    }
}
