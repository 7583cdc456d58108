//! Time-of-use brown-energy tariff, service revenue and pooled profit accounting.
//!
//! One energy unit is one node-slot: the energy a single active node draws
//! during one slot (0.035 kWh at 140 W and 15-minute slots). Green energy is
//! free and is pooled per slot; brown energy covers whatever demand exceeds
//! the green supply of that slot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::GreenTrace;
use crate::model::{Job, Schedule, SimConfig, Slot};

/// On-peak/off-peak brown price schedule plus the service charging rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tariff {
    /// $/kWh during on-peak hours.
    pub onpeak_price: f64,
    /// $/kWh during off-peak hours.
    pub offpeak_price: f64,
    /// First on-peak slot of the day (inclusive).
    pub onpeak_start_slot: usize,
    /// Last on-peak slot of the day (inclusive).
    pub onpeak_end_slot: usize,
    /// $ per machine-hour charged to clients for completed jobs.
    pub charge_rate: f64,
    /// Explicit per-slot peak flags; when present they replace the daily
    /// pattern for the slots they cover.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_override: Option<Vec<bool>>,
}

impl Default for Tariff {
    /// New Jersey summer prices (9:00 to 23:00 on-peak) and $0.022/h per machine.
    fn default() -> Self {
        Tariff {
            onpeak_price: 0.13,
            offpeak_price: 0.08,
            onpeak_start_slot: 36,
            onpeak_end_slot: 91,
            charge_rate: 0.022,
            peak_override: None,
        }
    }
}

impl Tariff {
    pub fn validate(&self, config: &SimConfig) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidTariff(m));
        if !(self.offpeak_price >= 0.0 && self.offpeak_price.is_finite()) {
            return fail("off-peak price must be non-negative".into());
        }
        if !(self.onpeak_price >= self.offpeak_price && self.onpeak_price.is_finite()) {
            return fail("on-peak price must be at least the off-peak price".into());
        }
        if self.onpeak_start_slot > self.onpeak_end_slot || self.onpeak_end_slot >= config.slots_per_day() {
            return fail(format!(
                "on-peak slots {}..={} do not fit a day of {} slots",
                self.onpeak_start_slot,
                self.onpeak_end_slot,
                config.slots_per_day()
            ));
        }
        let offpeak_unit = self.offpeak_price * config.node_slot_kwh();
        if self.node_slot_revenue(config).partial_cmp(&offpeak_unit) != Some(std::cmp::Ordering::Greater) {
            return fail(format!(
                "charge {} per node-slot does not exceed the off-peak energy cost {}",
                self.node_slot_revenue(config),
                offpeak_unit
            ));
        }
        Ok(())
    }

    pub fn is_on_peak(&self, t: Slot, config: &SimConfig) -> bool {
        if let Some(flag) = self.peak_override.as_ref().and_then(|o| o.get(t)) {
            return *flag;
        }
        let of_day = t % config.slots_per_day();
        (self.onpeak_start_slot..=self.onpeak_end_slot).contains(&of_day)
    }

    /// $/kWh at slot `t`.
    pub fn price(&self, t: Slot, config: &SimConfig) -> f64 {
        if self.is_on_peak(t, config) {
            self.onpeak_price
        } else {
            self.offpeak_price
        }
    }

    /// Cost of one brown node-slot at `t`.
    pub fn brown_unit_cost(&self, t: Slot, config: &SimConfig) -> f64 {
        self.price(t, config) * config.node_slot_kwh()
    }

    pub fn onpeak_unit_cost(&self, config: &SimConfig) -> f64 {
        self.onpeak_price * config.node_slot_kwh()
    }

    pub fn offpeak_unit_cost(&self, config: &SimConfig) -> f64 {
        self.offpeak_price * config.node_slot_kwh()
    }

    /// Revenue earned per completed node-slot.
    pub fn node_slot_revenue(&self, config: &SimConfig) -> f64 {
        self.charge_rate * config.slot_hours()
    }

    /// Revenue paid for `job` on completion by its deadline.
    pub fn job_revenue(&self, job: &Job, config: &SimConfig) -> f64 {
        self.node_slot_revenue(config) * job.work() as f64
    }

    /// A tariff whose normalized values are `nv`, keeping `charge_rate`.
    pub fn from_normalized(nv: &NormalizedValues, charge_rate: f64, config: &SimConfig) -> Tariff {
        let per_kwh = charge_rate / (config.node_power_watts / 1000.0);
        Tariff {
            onpeak_price: (1.0 - nv.v_on) * per_kwh,
            offpeak_price: (1.0 - nv.v_off) * per_kwh,
            charge_rate,
            ..Tariff::default()
        }
    }

    /// Per-slot brown unit costs over the horizon.
    pub fn unit_costs(&self, config: &SimConfig) -> Vec<f64> {
        (0..config.horizon_slots)
            .map(|t| self.brown_unit_cost(t, config))
            .collect()
    }
}

/// Outcome of pooled per-slot accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitReport {
    pub revenue: f64,
    pub brown_cost: f64,
    pub net_profit: f64,
    pub green_used: Vec<usize>,
    pub brown_used: Vec<usize>,
    pub green_total: usize,
    pub brown_total: usize,
    pub jobs_completed: usize,
    /// `sum(p * q)` over completed jobs.
    pub work_completed: usize,
}

/// Revenue and brown-energy cost of `schedule`.
///
/// Every placement is complete by construction (slot count equals the job's
/// processing time and slots stay within its deadline), so each one earns its
/// revenue. Brown cost is `sum_t max(0, demand[t] - g(t)) * b(t)`.
pub fn account(schedule: &Schedule, green: &GreenTrace, tariff: &Tariff, config: &SimConfig) -> ProfitReport {
    let horizon = schedule.horizon();
    let mut green_used = Vec::with_capacity(horizon);
    let mut brown_used = Vec::with_capacity(horizon);
    let mut brown_cost = 0.0;
    for (t, &d) in schedule.demand().iter().enumerate() {
        let g = green.at(t);
        let brown = d.saturating_sub(g);
        green_used.push(d.min(g));
        brown_used.push(brown);
        if brown > 0 {
            brown_cost += brown as f64 * tariff.brown_unit_cost(t, config);
        }
    }
    let work_completed = schedule.committed_work();
    let revenue = tariff.node_slot_revenue(config) * work_completed as f64;
    ProfitReport {
        revenue,
        brown_cost,
        net_profit: revenue - brown_cost,
        green_total: green_used.iter().sum(),
        brown_total: brown_used.iter().sum(),
        green_used,
        brown_used,
        jobs_completed: schedule.placements().len(),
        work_completed,
    }
}

/// Profit per node-slot normalized by the charging rate, for the three energy
/// sources: `0 < v_on < v_off < v_g = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedValues {
    pub v_on: f64,
    pub v_off: f64,
    pub v_g: f64,
}

impl NormalizedValues {
    pub fn new(v_on: f64, v_off: f64) -> Result<Self> {
        if !(0.0 < v_on && v_on < v_off && v_off < 1.0) {
            return Err(Error::InvalidTariff(format!(
                "normalized values must satisfy 0 < v_on < v_off < v_g = 1, got v_on = {v_on}, v_off = {v_off}"
            )));
        }
        Ok(NormalizedValues { v_on, v_off, v_g: 1.0 })
    }

    pub fn from_tariff(tariff: &Tariff, config: &SimConfig) -> Result<Self> {
        let unit_revenue = tariff.node_slot_revenue(config);
        if unit_revenue.is_nan() || unit_revenue <= 0.0 {
            return Err(Error::InvalidTariff("charge rate must be positive".into()));
        }
        Self::new(
            1.0 - tariff.onpeak_unit_cost(config) / unit_revenue,
            1.0 - tariff.offpeak_unit_cost(config) / unit_revenue,
        )
    }

    /// Values derived from the default tariff and cluster.
    pub fn reference() -> Self {
        Self::from_tariff(&Tariff::default(), &SimConfig::default()).expect("default tariff is valid")
    }
}

/// `1 + k - k^2`: the best ratio a coin between the two neighbouring choices
/// can guarantee when the cheaper-to-pricier value ratio is `k`.
pub fn ratio_bound(k: f64) -> f64 {
    1.0 + k - k * k
}

/// Probability of scheduling early that equalizes the one-job and two-job
/// adversaries for value ratio `k`.
pub fn optimal_probability(k: f64) -> f64 {
    k / ratio_bound(k)
}

/// Random-Fit coin probabilities and their competitive ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomFitParams {
    /// `v_on / v_off`.
    pub x: f64,
    /// `v_off / v_g`.
    pub y: f64,
    /// Probability of First-Fit for jobs released on-peak.
    pub p_on_to_off: f64,
    /// Probability of First-Fit for jobs released off-peak.
    pub p_off_to_on: f64,
    pub ratio_on: f64,
    pub ratio_off: f64,
}

impl RandomFitParams {
    pub fn new(nv: &NormalizedValues) -> Self {
        let x = nv.v_on / nv.v_off;
        let y = nv.v_off / nv.v_g;
        RandomFitParams {
            x,
            y,
            p_on_to_off: optimal_probability(x),
            p_off_to_on: optimal_probability(y),
            ratio_on: ratio_bound(x),
            ratio_off: ratio_bound(y),
        }
    }

    /// The guaranteed ratio for equal-size jobs, never above 1.25.
    pub fn competitive_ratio(&self) -> f64 {
        self.ratio_on.max(self.ratio_off)
    }
}
