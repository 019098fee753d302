//! Analytic repeater-chain model: link budget, multiplexed heralding and
//! Werner-state fidelity decay.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_range, Error, Result};
use crate::exec::Execution;
use crate::swap::DEFAULT_Q_SWAP;

/// Minimum conditional fidelity for a hop to count as usable.
pub const USABLE_FIDELITY: f64 = 0.7;

/// Slack on fidelity threshold comparisons, so that a value sitting exactly on
/// the threshold is not lost to rounding.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// Default per-link Werner purity.
pub const DEFAULT_P_LINK: f64 = 0.94;

/// One deployment scenario. Attenuation is stored in dB/km and span in km
/// regardless of how the scenario was specified.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub name: String,
    pub alpha_db_per_km: f64,
    pub span_km: f64,
    pub eta_read: f64,
    /// `None` when the link carries no microwave-to-optical conversion.
    pub eta_conv: Option<f64>,
    pub eta_extra: f64,
    pub eta_det: f64,
    pub eta_col: f64,
    pub p_bsa: f64,
    pub m_mux: u32,
}

pub const BUILTIN_SCENARIOS: [&str; 6] = ["chip-a", "chip-b", "chip-c", "metro-a", "metro-b", "metro-c"];

impl ScenarioParams {
    fn chip(name: &str, p_bsa: f64, m_mux: u32) -> Self {
        Self {
            name: name.to_string(),
            // 0.20 dB/cm over 1 cm
            alpha_db_per_km: 2.0e4,
            span_km: 1.0e-5,
            eta_read: 0.62,
            eta_conv: None,
            eta_extra: 0.98,
            eta_det: 0.98,
            eta_col: 0.95,
            p_bsa,
            m_mux,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn metro(name: &str, alpha: f64, conv: f64, extra: f64, det: f64, p_bsa: f64, m_mux: u32) -> Self {
        Self {
            name: name.to_string(),
            alpha_db_per_km: alpha,
            span_km: 10.0,
            eta_read: 0.62,
            eta_conv: Some(conv),
            eta_extra: extra,
            eta_det: det,
            eta_col: 0.95,
            p_bsa,
            m_mux,
        }
    }

    /// Built-in scenario by case-insensitive name.
    pub fn builtin(name: &str) -> Result<Self> {
        let s = match name.to_ascii_lowercase().as_str() {
            "chip-a" => Self::chip("chip-a", 0.50, 1),
            "chip-b" => Self::chip("chip-b", 0.50, 8),
            "chip-c" => Self::chip("chip-c", 0.75, 30),
            "metro-a" => Self::metro("metro-a", 0.35, 0.005, 0.90, 0.80, 0.50, 1),
            "metro-b" => Self::metro("metro-b", 0.20, 0.50, 0.95, 0.98, 0.50, 8),
            "metro-c" => Self::metro("metro-c", 0.16, 0.80, 0.95, 0.98, 0.75, 30),
            _ => return Err(Error::UnknownScenario { name: name.to_string(), valid: BUILTIN_SCENARIOS.join(", ") }),
        };
        Ok(s)
    }

    pub fn builtins() -> Vec<Self> {
        BUILTIN_SCENARIOS.iter().map(|n| Self::builtin(n).expect("built-in")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        check_range("alpha", self.alpha_db_per_km, 0.0, f64::INFINITY, "[0, inf)")?;
        if !(self.span_km > 0.0 && self.span_km.is_finite()) {
            return Err(Error::OutOfRange { name: "span", value: self.span_km, range: "(0, inf)" });
        }
        check_range("eta_read", self.eta_read, 0.0, 1.0, "[0, 1]")?;
        if let Some(c) = self.eta_conv {
            check_range("eta_conv", c, 0.0, 1.0, "[0, 1]")?;
        }
        check_range("eta_extra", self.eta_extra, 0.0, 1.0, "[0, 1]")?;
        check_range("eta_det", self.eta_det, 0.0, 1.0, "[0, 1]")?;
        check_range("eta_col", self.eta_col, 0.0, 1.0, "[0, 1]")?;
        check_range("p_bsa", self.p_bsa, 0.0, 1.0, "[0, 1]")?;
        if self.m_mux < 1 {
            return Err(Error::OutOfRange { name: "m_mux", value: 0.0, range: "[1, inf)" });
        }
        Ok(())
    }
}

/// Werner purity of a fresh link and depolarizing retention per swap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p_link: f64,
    pub q_swap: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { p_link: DEFAULT_P_LINK, q_swap: DEFAULT_Q_SWAP }
    }
}

impl NoiseModel {
    pub fn new(p_link: f64, q_swap: f64) -> Result<Self> {
        let nm = Self { p_link, q_swap };
        nm.validate()?;
        Ok(nm)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("p_link", self.p_link, 0.0, 1.0, "[0, 1]")?;
        check_range("q_swap", self.q_swap, 0.0, 1.0, "[0, 1]")
    }

    /// `p_link^h q_swap^(h-1)`.
    pub fn effective_purity(&self, hops: usize) -> f64 {
        assert!(hops >= 1, "effective purity needs at least one hop");
        self.p_link.powi(hops as i32) * self.q_swap.powi(hops as i32 - 1)
    }
}

/// `10^(-alpha L / 10) * conv^2 * eta_extra`.
pub fn link_efficiency(s: &ScenarioParams) -> f64 {
    let conv = s.eta_conv.map_or(1.0, |c| c * c);
    10f64.powf(-s.alpha_db_per_km * s.span_km / 10.0) * conv * s.eta_extra
}

/// `p_bsa * eta_det^2 * eta_col^2 * eta_link^2 * eta_read`.
pub fn click_probability(s: &ScenarioParams) -> f64 {
    let link = link_efficiency(s);
    s.p_bsa * (s.eta_det * s.eta_det) * (s.eta_col * s.eta_col) * (link * link) * s.eta_read
}

/// `1 - (1 - p)^M`.
pub fn hop_success(p_click: f64, m_mux: u32) -> Result<f64> {
    check_range("p_click", p_click, 0.0, 1.0, "[0, 1]")?;
    if m_mux < 1 {
        return Err(Error::OutOfRange { name: "m_mux", value: 0.0, range: "[1, inf)" });
    }
    if m_mux == 1 {
        return Ok(p_click);
    }
    // -expm1(M ln(1-p)) keeps precision for tiny p
    Ok(-((m_mux as f64) * (-p_click).ln_1p()).exp_m1())
}

/// Running product of per-hop successes.
pub fn cumulative_success(per_hop: &[f64]) -> Vec<f64> {
    per_hop
        .iter()
        .scan(1.0, |acc, &p| {
            *acc *= p;
            Some(*acc)
        })
        .collect()
}

/// Conditional fidelity and concurrence after `hops` links.
pub fn chain_fidelity(hops: usize, nm: &NoiseModel) -> Result<(f64, f64)> {
    if hops == 0 {
        return Err(Error::OutOfRange { name: "hops", value: 0.0, range: "[1, inf)" });
    }
    nm.validate()?;
    let p = nm.effective_purity(hops);
    Ok(((3.0 * p + 1.0) / 4.0, f64::max(0.0, (3.0 * p - 1.0) / 2.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopRecord {
    pub hop: usize,
    pub fidelity: f64,
    pub concurrence: f64,
    pub p_click: f64,
    pub p_hop: f64,
    pub p_cumulative: f64,
    pub usable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub hops: Vec<HopRecord>,
}

impl ChainReport {
    pub fn all_usable(&self) -> bool {
        self.hops.iter().all(|h| h.usable)
    }

    pub fn last(&self) -> &HopRecord {
        self.hops.last().expect("reports have at least one hop")
    }
}

pub fn is_usable(fidelity: f64) -> bool {
    fidelity >= USABLE_FIDELITY - THRESHOLD_SLACK
}

pub fn simulate_chain(s: &ScenarioParams, hops: usize, nm: &NoiseModel) -> Result<ChainReport> {
    simulate_chain_with(s, hops, nm, None)
}

/// As [`simulate_chain`], optionally replacing the scenario's single-channel
/// click probability.
pub fn simulate_chain_with(
    s: &ScenarioParams,
    hops: usize,
    nm: &NoiseModel,
    pclick_override: Option<f64>,
) -> Result<ChainReport> {
    if hops == 0 {
        return Err(Error::OutOfRange { name: "hops", value: 0.0, range: "[1, inf)" });
    }
    simulate_heterogeneous(&vec![s.clone(); hops], nm, pclick_override)
}

/// One hop per scenario, in order.
pub fn simulate_heterogeneous(
    links: &[ScenarioParams],
    nm: &NoiseModel,
    pclick_override: Option<f64>,
) -> Result<ChainReport> {
    if links.is_empty() {
        return Err(Error::OutOfRange { name: "hops", value: 0.0, range: "[1, inf)" });
    }
    nm.validate()?;
    if let Some(p) = pclick_override {
        check_range("pclick_override", p, 0.0, 1.0, "[0, 1]")?;
    }
    let mut clicks = Vec::with_capacity(links.len());
    let mut per_hop = Vec::with_capacity(links.len());
    for s in links {
        s.validate()?;
        let p = pclick_override.unwrap_or_else(|| click_probability(s));
        clicks.push(p);
        per_hop.push(hop_success(p, s.m_mux)?);
    }
    let cumulative = cumulative_success(&per_hop);
    let hops = (0..links.len())
        .map(|i| {
            let (fidelity, concurrence) = chain_fidelity(i + 1, nm)?;
            Ok(HopRecord {
                hop: i + 1,
                fidelity,
                concurrence,
                p_click: clicks[i],
                p_hop: per_hop[i],
                p_cumulative: cumulative[i],
                usable: is_usable(fidelity),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainReport { hops })
}

/// Result of [`threshold_hops`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopThreshold {
    /// Largest hop count meeting the threshold; zero if even one hop fails.
    Bounded(usize),
    /// Every hop count meets the threshold.
    Unbounded,
}

impl fmt::Display for HopThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HopThreshold::Bounded(n) => write!(f, "{n}"),
            HopThreshold::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Largest `h` with `F_h >= f_min`.
pub fn threshold_hops(nm: &NoiseModel, f_min: f64) -> Result<HopThreshold> {
    nm.validate()?;
    if !(f_min > 0.0 && f_min < 1.0) {
        return Err(Error::OutOfRange { name: "f_min", value: f_min, range: "(0, 1)" });
    }
    let meets = |h: usize| chain_fidelity(h, nm).map(|(f, _)| f >= f_min - THRESHOLD_SLACK);
    // Werner fidelity never drops below 1/4
    if f_min <= 0.25 || (nm.p_link == 1.0 && nm.q_swap == 1.0) {
        return Ok(HopThreshold::Unbounded);
    }
    if !meets(1)? {
        return Ok(HopThreshold::Bounded(0));
    }
    let target = (4.0 * f_min - 1.0) / 3.0;
    // h ln p + (h - 1) ln q >= ln target
    let (lp, lq) = (nm.p_link.ln(), nm.q_swap.ln());
    let estimate = (target.ln() + lq) / (lp + lq);
    let mut h = if estimate.is_finite() { estimate.floor().max(1.0) as usize } else { 1 };
    while h > 1 && !meets(h)? {
        h -= 1;
    }
    while meets(h + 1)? {
        h += 1;
    }
    Ok(HopThreshold::Bounded(h))
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Mux,
    Conv,
    Hops,
    Length,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Mux => "mux",
            SweepAxis::Conv => "conv",
            SweepAxis::Hops => "hops",
            SweepAxis::Length => "length",
        }
    }

    fn check(self, v: f64) -> Result<()> {
        let ok = match self {
            SweepAxis::Mux | SweepAxis::Hops => v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64,
            SweepAxis::Conv => (0.0..=1.0).contains(&v),
            SweepAxis::Length => v.is_finite() && v > 0.0,
        };
        if ok {
            Ok(())
        } else {
            let range = match self {
                SweepAxis::Mux | SweepAxis::Hops => "integers >= 1",
                SweepAxis::Conv => "[0, 1]",
                SweepAxis::Length => "(0, inf) km",
            };
            Err(Error::OutOfRange { name: self.name(), value: v, range })
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mux" => Ok(SweepAxis::Mux),
            "conv" => Ok(SweepAxis::Conv),
            "hops" => Ok(SweepAxis::Hops),
            "length" => Ok(SweepAxis::Length),
            other => Err(format!("unknown sweep axis `{other}` (valid: mux, conv, hops, length)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub record: HopRecord,
}

/// Evaluates the chain once per axis value. Rows are ordered by
/// `(value, hop)`; for the `hops` axis each value sets the chain length,
/// otherwise `hops` is used.
pub fn sweep(
    template: &ScenarioParams,
    axis: SweepAxis,
    values: &[f64],
    hops: usize,
    nm: &NoiseModel,
    pclick_override: Option<f64>,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Shape(format!("sweep over `{axis}` needs at least one value")));
    }
    for &v in values {
        axis.check(v)?;
    }
    let mut ordered: Vec<f64> = values.to_vec();
    ordered.sort_by(f64::total_cmp);
    let reports = exec.try_map(&ordered, |&v| {
        let mut s = template.clone();
        let mut n = hops;
        match axis {
            SweepAxis::Mux => s.m_mux = v as u32,
            SweepAxis::Conv => s.eta_conv = Some(v),
            SweepAxis::Length => s.span_km = v,
            SweepAxis::Hops => n = v as usize,
        }
        simulate_chain_with(&s, n, nm, pclick_override)
    })?;
    Ok(ordered
        .iter()
        .zip(reports)
        .flat_map(|(&value, r)| r.hops.into_iter().map(move |record| SweepRow { value, record }))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn builtins_match_table() {
        let a = ScenarioParams::builtin("Chip-A").unwrap();
        assert_eq!((a.alpha_db_per_km, a.span_km, a.eta_conv, a.m_mux), (2.0e4, 1.0e-5, None, 1));
        let c = ScenarioParams::builtin("CHIP-C").unwrap();
        assert_eq!((c.p_bsa, c.m_mux), (0.75, 30));
        let m = ScenarioParams::builtin("metro-b").unwrap();
        assert_eq!(
            (m.alpha_db_per_km, m.span_km, m.eta_conv, m.eta_extra, m.eta_det, m.eta_col, m.m_mux),
            (0.20, 10.0, Some(0.50), 0.95, 0.98, 0.95, 8)
        );
        for s in ScenarioParams::builtins() {
            s.validate().unwrap();
            assert_eq!(s.eta_read, 0.62);
        }
        match ScenarioParams::builtin("lunar") {
            Err(Error::UnknownScenario { valid, .. }) => assert!(valid.contains("metro-c")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn link_budget_examples() {
        let chip = ScenarioParams::builtin("chip-a").unwrap();
        assert!(close(link_efficiency(&chip), 10f64.powf(-0.02) * 0.98, 1e-15));
        assert!(close(link_efficiency(&chip), 0.9359, 1e-4));
        assert!(close(click_probability(&chip), 0.2354, 1e-4));

        let ma = ScenarioParams::builtin("metro-a").unwrap();
        assert!(close(link_efficiency(&ma) / 1.005e-5, 1.0, 1e-3));
        assert!(close(click_probability(&ma) / 1.8e-11, 1.0, 0.01));

        let mc = ScenarioParams::builtin("metro-c").unwrap();
        assert!(close(link_efficiency(&mc), 0.4207, 1e-4));
        assert!(close(click_probability(&mc), 0.0713, 1e-4));
    }

    #[test]
    fn multiplexing_examples() {
        assert!(close(hop_success(0.18, 8).unwrap(), 1.0 - 0.82f64.powi(8), 1e-14));
        assert!(close(hop_success(0.18, 8).unwrap(), 0.7956, 1e-4));
        assert!(close(hop_success(0.18, 30).unwrap(), 0.9974, 1e-4));
        assert_eq!(hop_success(0.123, 1).unwrap(), 0.123);
        assert_eq!(hop_success(0.0, 30).unwrap(), 0.0);
        assert_eq!(hop_success(1.0, 30).unwrap(), 1.0);
        assert!(hop_success(1.2, 2).is_err());
        assert!(hop_success(0.5, 0).is_err());
        // tiny probabilities keep their linear scaling
        assert!(close(hop_success(1e-18, 10).unwrap() / 1e-17, 1.0, 1e-12));
    }

    #[test]
    fn cumulative_examples() {
        let c = cumulative_success(&[0.8; 4]);
        let want = [0.8, 0.64, 0.512, 0.4096];
        for (a, b) in c.iter().zip(want) {
            assert!(close(*a, b, 1e-15));
        }
        assert_eq!(cumulative_success(&[0.5, 0.0, 0.9]), vec![0.5, 0.0, 0.0]);
        assert!(close(*cumulative_success(&[0.18; 4]).last().unwrap(), 0.00105, 1e-5));
        assert!(cumulative_success(&[]).is_empty());
    }

    #[test]
    fn fidelity_decay_examples() {
        let nm = NoiseModel::default();
        let (f1, c1) = chain_fidelity(1, &nm).unwrap();
        assert!(close(f1, 0.955, 1e-12));
        assert!(close(c1, 0.91, 1e-12));
        let (f4, c4) = chain_fidelity(4, &nm).unwrap();
        let p = 0.94f64.powi(4) * 0.967f64.powi(3);
        assert!(close(f4, (3.0 * p + 1.0) / 4.0, 1e-15));
        assert!(close(f4, 0.78, 0.01));
        assert!(close(c4, 0.559, 1e-3));
        assert!(chain_fidelity(0, &nm).is_err());
    }

    #[test]
    fn chain_reports() {
        let nm = NoiseModel::default();
        let chip = ScenarioParams::builtin("chip-a").unwrap();
        let r = simulate_chain(&chip, 4, &nm).unwrap();
        assert_eq!(r.hops.len(), 4);
        assert!(r.all_usable());
        assert!(close(r.last().fidelity, 0.78, 0.01));

        let metro = ScenarioParams::builtin("metro-a").unwrap();
        let m = simulate_chain(&metro, 4, &nm).unwrap();
        assert!(m.last().p_cumulative < 1e-40);
        for (a, b) in r.hops.iter().zip(&m.hops) {
            assert_eq!(a.fidelity, b.fidelity);
        }

        assert_eq!(simulate_chain(&chip, 1, &nm).unwrap().hops.len(), 1);
        assert!(simulate_chain(&chip, 0, &nm).is_err());

        let b = ScenarioParams::builtin("chip-b").unwrap();
        let o = simulate_chain_with(&b, 3, &nm, Some(0.18)).unwrap();
        for h in &o.hops {
            assert!(close(h.p_hop, 0.796, 1e-3));
        }
    }

    #[test]
    fn threshold_examples() {
        let nm = NoiseModel::default();
        // brute-force scan oracle
        let mut last = 0;
        for h in 1..100 {
            let p = 0.94f64.powi(h) * 0.967f64.powi(h - 1);
            if (3.0 * p + 1.0) / 4.0 >= 0.7 {
                last = h as usize;
            }
        }
        assert_eq!(last, 5);
        assert_eq!(threshold_hops(&nm, 0.7).unwrap(), HopThreshold::Bounded(last));
        assert_eq!(threshold_hops(&nm, 0.955).unwrap(), HopThreshold::Bounded(1));
        assert_eq!(threshold_hops(&nm, 0.99).unwrap(), HopThreshold::Bounded(0));
        let perfect = NoiseModel::new(1.0, 1.0).unwrap();
        assert_eq!(threshold_hops(&perfect, 0.7).unwrap(), HopThreshold::Unbounded);
        assert_eq!(threshold_hops(&nm, 0.2).unwrap(), HopThreshold::Unbounded);
        assert!(threshold_hops(&nm, 1.0).is_err());
        let no_swap_loss = NoiseModel::new(1.0, 0.9).unwrap();
        assert!(matches!(threshold_hops(&no_swap_loss, 0.7).unwrap(), HopThreshold::Bounded(n) if n > 1));
    }

    #[test]
    fn scenario_ordering() {
        let p: Vec<f64> = ["metro-a", "metro-b", "metro-c"]
            .iter()
            .map(|n| click_probability(&ScenarioParams::builtin(n).unwrap()))
            .collect();
        assert!(p[1] / p[0] > 1e6);
        assert!(p[1] < p[2]);
    }

    #[test]
    fn sweep_ordering_and_validation() {
        let chip = ScenarioParams::builtin("chip-a").unwrap();
        let nm = NoiseModel::default();
        let rows = sweep(&chip, SweepAxis::Mux, &[30.0, 1.0, 8.0], 2, &nm, Some(0.18), Execution::Parallel).unwrap();
        let keys: Vec<(f64, usize)> = rows.iter().map(|r| (r.value, r.record.hop)).collect();
        assert_eq!(keys, vec![(1.0, 1), (1.0, 2), (8.0, 1), (8.0, 2), (30.0, 1), (30.0, 2)]);
        assert!(close(rows[0].record.p_hop, 0.18, 1e-15));
        assert!(close(rows[2].record.p_hop, 0.7956, 1e-4));
        assert!(close(rows[4].record.p_hop, 0.9974, 1e-4));

        let seq = sweep(&chip, SweepAxis::Mux, &[30.0, 1.0, 8.0], 2, &nm, Some(0.18), Execution::Sequential).unwrap();
        assert_eq!(rows, seq);

        let one = sweep(&chip, SweepAxis::Hops, &[1.0], 4, &nm, None, Execution::Sequential).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].record, simulate_chain(&chip, 4, &nm).unwrap().hops[0]);

        let metro = ScenarioParams::builtin("metro-b").unwrap();
        let conv = sweep(&metro, SweepAxis::Conv, &[0.005, 0.5, 0.8], 1, &nm, None, Execution::Parallel).unwrap();
        assert!(conv.windows(2).all(|w| w[0].record.p_click < w[1].record.p_click));

        for (axis, bad) in
            [(SweepAxis::Mux, 0.0), (SweepAxis::Mux, 2.5), (SweepAxis::Conv, 1.5), (SweepAxis::Length, 0.0)]
        {
            match sweep(&chip, axis, &[bad], 1, &nm, None, Execution::Sequential) {
                Err(Error::OutOfRange { name, .. }) => assert_eq!(name, axis.name()),
                other => panic!("{other:?}"),
            }
        }
        assert!(sweep(&chip, SweepAxis::Mux, &[], 1, &nm, None, Execution::Sequential).is_err());
    }

    proptest! {
        #[test]
        fn hop_success_monotone(p in 0.001f64..0.5, m in 1u32..40) {
            let a = hop_success(p, m).unwrap();
            let b = hop_success(p, m + 1).unwrap();
            let c = hop_success(p, m + 2).unwrap();
            prop_assert!(b > a);
            prop_assert!(c - b < b - a);
            prop_assert!(hop_success((p * 1.001).min(1.0), m).unwrap() >= a);
        }

        #[test]
        fn cumulative_non_increasing(xs in proptest::collection::vec(0.0f64..=1.0, 1..12)) {
            let c = cumulative_success(&xs);
            prop_assert!(c.windows(2).all(|w| w[1] <= w[0]));
        }

        #[test]
        fn fidelity_non_increasing(p in 0.0f64..0.999, q in 0.0f64..0.999) {
            let nm = NoiseModel::new(p, q).unwrap();
            let fs: Vec<f64> = (1..8).map(|h| chain_fidelity(h, &nm).unwrap().0).collect();
            prop_assert!(fs.windows(2).all(|w| w[1] <= w[0]));
        }

        #[test]
        fn conversion_enters_to_the_fourth(conv in 0.001f64..0.5) {
            let mut s = ScenarioParams::builtin("metro-c").unwrap();
            s.eta_conv = Some(conv);
            let a = click_probability(&s);
            s.eta_conv = Some(2.0 * conv);
            let b = click_probability(&s);
            prop_assert!((b / a - 16.0).abs() < 1e-9);
        }
    }
}
