//! dB-loss power budget and MRR tuning cost.

use serde::{Deserialize, Serialize};

use super::{MrrMode, OpticalError};
use crate::sim::SimTime;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticalPowerModel {
    pub mrr_tuning_energy_fj_per_bit: f64,
    pub filter_drop_db: f64,
    pub waveguide_loss_db_per_cm: f64,
    pub splitter_loss_db: f64,
    pub detector_loss_db: f64,
    pub modulator_loss_db: f64,
    pub laser_power_mw_per_wavelength: f64,
    pub tuning_time_normal_ps: u64,
    pub tuning_time_fine_ps: u64,
}

impl Default for OpticalPowerModel {
    fn default() -> Self {
        OpticalPowerModel {
            mrr_tuning_energy_fj_per_bit: 200.0,
            filter_drop_db: 1.5,
            waveguide_loss_db_per_cm: 0.3,
            splitter_loss_db: 0.2,
            detector_loss_db: 0.1,
            modulator_loss_db: 0.5,
            laser_power_mw_per_wavelength: 0.73,
            tuning_time_normal_ps: 100,
            tuning_time_fine_ps: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RouteComponent {
    Filter,
    Waveguide { cm: f64 },
    Splitter,
    Detector,
    Modulator,
}

impl OpticalPowerModel {
    pub fn validate(&self) -> Result<(), OpticalError> {
        let losses = [
            self.filter_drop_db,
            self.waveguide_loss_db_per_cm,
            self.splitter_loss_db,
            self.detector_loss_db,
            self.modulator_loss_db,
            self.laser_power_mw_per_wavelength,
            self.mrr_tuning_energy_fj_per_bit,
        ];
        if losses.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(OpticalError::BadPowerModel("losses must be non-negative"));
        }
        if self.modulator_loss_db > 1.0 {
            return Err(OpticalError::BadPowerModel("modulator loss must be within [0, 1] dB"));
        }
        Ok(())
    }

    pub fn component_loss_db(&self, c: RouteComponent) -> f64 {
        match c {
            RouteComponent::Filter => self.filter_drop_db,
            RouteComponent::Waveguide { cm } => self.waveguide_loss_db_per_cm * cm,
            RouteComponent::Splitter => self.splitter_loss_db,
            RouteComponent::Detector => self.detector_loss_db,
            RouteComponent::Modulator => self.modulator_loss_db,
        }
    }

    pub fn path_loss_db(&self, route: &[RouteComponent]) -> f64 {
        route.iter().map(|&c| self.component_loss_db(c)).sum()
    }

    /// Transition time and tuning energy (per modulated bit) of an MRR
    /// moving between coupling states.
    pub fn tuning_cost(&self, from: MrrMode, to: MrrMode) -> (SimTime, f64) {
        if from == to {
            return (SimTime::ZERO, 0.0);
        }
        let t = if from == MrrMode::HalfCoupled || to == MrrMode::HalfCoupled {
            self.tuning_time_fine_ps
        } else {
            self.tuning_time_normal_ps
        };
        (SimTime::ps(t), self.mrr_tuning_energy_fj_per_bit)
    }
}

pub fn received_power(laser_mw: f64, loss_db: f64, level_fraction: f64) -> Result<f64, OpticalError> {
    if !(0.0..=1.0).contains(&level_fraction) {
        return Err(OpticalError::LevelFraction(level_fraction));
    }
    Ok(laser_mw * 10f64.powf(-loss_db / 10.0) * level_fraction)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn path_losses() {
        let m = OpticalPowerModel::default();
        assert!(close(m.path_loss_db(&[RouteComponent::Waveguide { cm: 1.0 }]), 0.3, 1e-12));
        assert_eq!(m.path_loss_db(&[]), 0.0);
        let route = [
            RouteComponent::Filter,
            RouteComponent::Waveguide { cm: 2.0 },
            RouteComponent::Splitter,
            RouteComponent::Detector,
        ];
        assert!(close(m.path_loss_db(&route), 1.5 + 0.6 + 0.2 + 0.1, 1e-12));
    }

    #[test]
    fn received_power_cases() {
        assert!(close(received_power(0.73, 0.0, 1.0).unwrap(), 0.73, 1e-15));
        assert!(close(received_power(0.73, 3.0103, 1.0).unwrap(), 0.365, 1e-4));
        for loss in [0.0, 1.3, 2.7, 5.0] {
            let quad = received_power(2.92, loss, 0.25).unwrap();
            let base = received_power(0.73, loss, 1.0).unwrap();
            assert!(close(quad, base, 1e-12));
        }
        assert!(received_power(1.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn tuning_costs() {
        let m = OpticalPowerModel::default();
        use MrrMode::*;
        assert_eq!(m.tuning_cost(FullyCoupled, NonCoupled).0, SimTime::ps(100));
        assert_eq!(m.tuning_cost(NonCoupled, FullyCoupled).0, SimTime::ps(100));
        assert_eq!(m.tuning_cost(NonCoupled, HalfCoupled).0, SimTime::ps(500));
        assert_eq!(m.tuning_cost(HalfCoupled, FullyCoupled).0, SimTime::ps(500));
        for mode in [FullyCoupled, HalfCoupled, NonCoupled] {
            assert_eq!(m.tuning_cost(mode, mode), (SimTime::ZERO, 0.0));
        }
    }

    #[test]
    fn validation() {
        let mut m = OpticalPowerModel::default();
        assert!(m.validate().is_ok());
        m.modulator_loss_db = 1.5;
        assert!(m.validate().is_err());
        m.modulator_loss_db = 0.5;
        m.filter_drop_db = -1.0;
        assert!(m.validate().is_err());
    }
}
