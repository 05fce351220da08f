//! Output records and the three emitters (human table, CSV, JSON).

use hsbounds::bounds::{BoundResult, ElementaryBoundData, Settings, TrialParams};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Golden {
    pub k_plus: f64,
    pub ratio: f64,
    pub tag: String,
    pub k_plus_rel_diff: Option<f64>,
    pub ratio_diff: Option<f64>,
}

/// One (n, d) cell: any of K⁺, a lower bound, their ratio.
#[derive(Debug, Clone, Serialize, PartialEq, Default)]
pub struct BoundRecord {
    pub d: u32,
    /// n exactly as entered ("5/2" stays "5/2").
    pub n: String,
    pub n_value: f64,
    pub label: Option<String>,
    pub k_plus: Option<f64>,
    pub k_minus: Option<f64>,
    pub ratio: Option<f64>,
    /// Method tag of the lower bound, or "+" for an upper-only record.
    pub tag: Option<String>,
    /// Maximizer of K⁺ (the u of the sup).
    pub upper_argmax: Option<f64>,
    /// Maximizer of the lower bound (λ, or p and σ); of K⁺ when there is no lower bound.
    pub argmax1: Option<f64>,
    pub argmax2: Option<f64>,
    pub converged: bool,
    pub caveat: Option<String>,
    pub error: Option<String>,
    pub golden: Option<Golden>,
}

fn argmax_parts(r: &BoundResult) -> (Option<f64>, Option<f64>) {
    match r.argmax {
        Some(p) => {
            let (a, b) = p.components();
            (Some(a), b)
        }
        None => (None, None),
    }
}

fn caveat_of(r: &BoundResult) -> Option<String> {
    if r.diagnostics.converged {
        None
    } else {
        Some(format!("{} search did not converge; value is the best point found", r.kind.tag()))
    }
}

impl BoundRecord {
    pub fn new(d: u32, n: String, n_value: f64) -> Self {
        BoundRecord { d, n, n_value, converged: true, ..Default::default() }
    }

    pub fn set_upper(&mut self, r: &BoundResult) {
        self.k_plus = Some(r.value);
        self.upper_argmax = match r.argmax {
            Some(TrialParams::U(u)) => Some(u),
            _ => None,
        };
        if self.k_minus.is_none() {
            self.tag = Some(r.kind.tag().to_string());
            (self.argmax1, self.argmax2) = argmax_parts(r);
        }
        self.note(r);
    }

    pub fn set_lower(&mut self, r: &BoundResult) {
        self.k_minus = Some(r.value);
        self.tag = Some(r.kind.tag().to_string());
        (self.argmax1, self.argmax2) = argmax_parts(r);
        self.note(r);
    }

    pub fn finish(&mut self) {
        if let (Some(u), Some(l)) = (self.k_plus, self.k_minus) {
            self.ratio = Some(l / u);
        }
    }

    pub fn fail(&mut self, msg: String) {
        self.converged = false;
        self.error = Some(msg);
    }

    fn note(&mut self, r: &BoundResult) {
        if let Some(c) = caveat_of(r) {
            self.converged = false;
            self.caveat = Some(match self.caveat.take() {
                Some(prev) => format!("{prev}; {c}"),
                None => c,
            });
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ElementaryRecord {
    pub d: u32,
    pub z_d: Option<f64>,
    pub z_d_rounded: Option<f64>,
    pub theta_d: Option<f64>,
    pub z_argmax_gap: Option<f64>,
    pub theta_argmax_gap: Option<f64>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
    pub golden_z_d: Option<f64>,
    pub golden_theta_d: Option<f64>,
}

impl ElementaryRecord {
    pub fn from_data(e: &ElementaryBoundData) -> Self {
        ElementaryRecord {
            d: e.d,
            z_d: Some(e.z_d),
            z_d_rounded: Some(e.z_d_rounded),
            theta_d: Some(e.theta_d),
            z_argmax_gap: e.z_argmax_gap,
            theta_argmax_gap: Some(e.theta_argmax_gap),
            warnings: e.warnings.clone(),
            error: None,
            golden_z_d: None,
            golden_theta_d: None,
        }
    }

    pub fn failed(d: u32, msg: String) -> Self {
        ElementaryRecord {
            d,
            z_d: None,
            z_d_rounded: None,
            theta_d: None,
            z_argmax_gap: None,
            theta_argmax_gap: None,
            warnings: Vec::new(),
            error: Some(msg),
            golden_z_d: None,
            golden_theta_d: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AsympRecord {
    pub regime: String,
    pub d: u32,
    pub n: f64,
    pub n_d: f64,
    pub quantity: String,
    pub value: Option<f64>,
    pub target: f64,
    pub rel_diff: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Records {
    Bound(Vec<BoundRecord>),
    Elementary(Vec<ElementaryRecord>),
    Asymp(Vec<AsympRecord>),
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CompareSummary {
    pub max_k_plus_rel_diff: f64,
    pub k_plus_within_unit: usize,
    pub ratios_within_band: usize,
    pub tags_matching: usize,
    pub cells: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Metadata {
    pub wall_time_s: f64,
}

/// Everything one command prints.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub settings: Settings,
    pub records: Records,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<CompareSummary>,
    /// Only with --timing, so that the rest is byte-identical between runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl Report {
    /// Some record carries a caveat or a failure.
    pub fn degraded(&self) -> bool {
        match &self.records {
            Records::Bound(v) => v.iter().any(|r| !r.converged),
            Records::Elementary(v) => v.iter().any(|r| r.error.is_some()),
            Records::Asymp(v) => v.iter().any(|r| r.error.is_some()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.records {
            Records::Bound(v) => {
                out.push_str("d,n,k_plus,k_minus,ratio,tag,argmax1,argmax2\n");
                for r in v {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.d,
                        r.n,
                        opt(r.k_plus),
                        opt(r.k_minus),
                        opt(r.ratio),
                        r.tag.as_deref().unwrap_or(""),
                        opt(r.argmax1),
                        opt(r.argmax2)
                    );
                }
            }
            Records::Elementary(v) => {
                out.push_str("d,z_d,z_d_rounded,theta_d,z_argmax_gap,theta_argmax_gap\n");
                for r in v {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        r.d,
                        opt(r.z_d),
                        opt(r.z_d_rounded),
                        opt(r.theta_d),
                        opt(r.z_argmax_gap),
                        opt(r.theta_argmax_gap)
                    );
                }
            }
            Records::Asymp(v) => {
                out.push_str("regime,d,n,n_d,quantity,value,target,rel_diff\n");
                for r in v {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.regime,
                        r.d,
                        r.n,
                        r.n_d,
                        r.quantity,
                        opt(r.value),
                        r.target,
                        opt(r.rel_diff)
                    );
                }
            }
        }
        out
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        match &self.records {
            Records::Bound(v) => {
                let _ = writeln!(out, "{:>3}  {:>14}  {:>12}  {:>12}  {:>7}  {:>4}  {:>10}  {:>10}", "d", "n", "K+", "K-", "ratio", "tag", "argmax1", "argmax2");
                for r in v {
                    let n = r.label.as_deref().unwrap_or(&r.n);
                    let _ = writeln!(
                        out,
                        "{:>3}  {:>14}  {:>12}  {:>12}  {:>7}  {:>4}  {:>10}  {:>10}",
                        r.d,
                        n,
                        sig(r.k_plus),
                        sig(r.k_minus),
                        r.ratio.map_or("-".into(), |x| format!("{x:.4}")),
                        r.tag.as_deref().unwrap_or("-"),
                        sig(r.argmax1),
                        sig(r.argmax2)
                    );
                    if let Some(g) = &r.golden {
                        let _ = writeln!(
                            out,
                            "{:>3}  {:>14}  {:>12}  {:>12}  {:>7}  {:>4}  (reference)",
                            "",
                            "",
                            sig(Some(g.k_plus)),
                            "",
                            format!("{:.3}", g.ratio),
                            g.tag
                        );
                    }
                    if let Some(c) = &r.caveat {
                        let _ = writeln!(out, "     caveat: {c}");
                    }
                    if let Some(e) = &r.error {
                        let _ = writeln!(out, "     error: {e}");
                    }
                }
            }
            Records::Elementary(v) => {
                let _ = writeln!(out, "{:>3}  {:>10}  {:>10}  {:>8}  {:>10}  {:>10}", "d", "Z_d", "Z_d (up)", "Theta_d", "at gap", "Theta at");
                for r in v {
                    let _ = writeln!(
                        out,
                        "{:>3}  {:>10}  {:>10}  {:>8}  {:>10}  {:>10}",
                        r.d,
                        r.z_d.map_or("-".into(), |x| format!("{x:.5}")),
                        sig(r.z_d_rounded),
                        r.theta_d.map_or("-".into(), |x| format!("{x:.4}")),
                        sig(r.z_argmax_gap),
                        sig(r.theta_argmax_gap)
                    );
                    if let (Some(z), Some(t)) = (r.golden_z_d, r.golden_theta_d) {
                        let _ = writeln!(out, "{:>3}  {:>10}  {:>10}  {:>8}  (reference)", "", format!("{z}"), "", format!("{t}"));
                    }
                    for w in &r.warnings {
                        let _ = writeln!(out, "     warning: {w}");
                    }
                    if let Some(e) = &r.error {
                        let _ = writeln!(out, "     error: {e}");
                    }
                }
            }
            Records::Asymp(v) => {
                let _ = writeln!(out, "{:>3}  {:>10}  {:>10}  {:<16}  {:>12}  {:>10}  {:>10}", "d", "n", "n_d", "quantity", "value", "target", "rel diff");
                for r in v {
                    let _ = writeln!(
                        out,
                        "{:>3}  {:>10}  {:>10}  {:<16}  {:>12}  {:>10.6}  {:>10}",
                        r.d,
                        format!("{}", r.n),
                        format!("{:.3e}", r.n_d),
                        r.quantity,
                        r.value.map_or("-".into(), |x| format!("{x:.6}")),
                        r.target,
                        r.rel_diff.map_or("-".into(), |x| format!("{x:.2e}"))
                    );
                    if let Some(e) = &r.error {
                        let _ = writeln!(out, "     error: {e}");
                    }
                }
            }
        }
        if let Some(s) = &self.summary {
            let _ = writeln!(
                out,
                "K+ within one unit of the third figure: {}/{}; max |rel diff| {:.2e}; ratios in band: {}/{}; tags matching: {}/{}",
                s.k_plus_within_unit, s.cells, s.max_k_plus_rel_diff, s.ratios_within_band, s.cells, s.tags_matching, s.cells
            );
        }
        out
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:e}"))
}

fn sig(x: Option<f64>) -> String {
    match x {
        None => "-".into(),
        Some(v) if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) => format!("{v:.4e}"),
        Some(v) => format!("{v:.6}"),
    }
}
