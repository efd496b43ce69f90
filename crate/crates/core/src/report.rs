//! Analysis reports: assembled from the individual checks, rendered as
//! text and as JSON. Rationals are JSON strings `"p/q"`, integers numbers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boundedness::{
    classify, explore_accessible, unboundedness_threshold, AccessibleSetSample, CriticalPartition, ExplorationCaps,
    SpeciesBoundedness,
};
use crate::feasibility::DualRay;
use crate::moments::{
    check_theorem1, check_theorem2, check_theorem3, verify_theorem1, verify_theorem2, verify_theorem3,
    BlowupCertificate, Inapplicable, MomentCertificate, Theorem, Theorem1Outcome, Theorem2Outcome, Theorem3Outcome,
};
use crate::network::{
    check_nonnegativity, check_regularity, validate_properness, PropensityKind, ProperVerdict, ReactionNetwork,
    RegularityVerdict,
};
use crate::rational::{exact_vec_int, exact_vec_rat, ExactValue};
use crate::simulation::EnsembleStats;

pub const TOOL: &str = "momentcert";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Box used for regularity and nonnegativity checks unless overridden.
pub const DEFAULT_BOX: i64 = 25;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionSummary {
    pub name: String,
    pub jump: Vec<i64>,
    pub kind: String,
    pub propensity: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub species: Vec<String>,
    pub reactions: Vec<ReactionSummary>,
    pub init: Option<Vec<i64>>,
}

impl NetworkSummary {
    pub fn of(net: &ReactionNetwork) -> Self {
        NetworkSummary {
            species: net.species_names().to_vec(),
            reactions: net
                .reactions()
                .iter()
                .enumerate()
                .map(|(j, r)| ReactionSummary {
                    name: r.name.clone(),
                    jump: net.stoich().column(j),
                    kind: match r.kind {
                        PropensityKind::MassAction { .. } => "mass_action".to_string(),
                        PropensityKind::Raw => "poly".to_string(),
                    },
                    propensity: r.propensity.to_string(),
                })
                .collect(),
            init: net.init.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperEntry {
    pub reaction: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
}

pub fn properness_entries(net: &ReactionNetwork) -> Vec<ProperEntry> {
    validate_properness(net)
        .into_iter()
        .zip(net.reactions())
        .map(|(v, r)| match v {
            ProperVerdict::Proper => ProperEntry {
                reaction: r.name.clone(),
                verdict: "PROPER".to_string(),
                species: None,
                witness: None,
            },
            ProperVerdict::Improper { species, witness } => ProperEntry {
                reaction: r.name.clone(),
                verdict: "IMPROPER".to_string(),
                species: Some(net.species_names()[species].clone()),
                witness: Some(witness),
            },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityEntry {
    pub reaction: String,
    pub verdict: RegularityVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativePropensity {
    pub reaction: String,
    pub state: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumptions {
    /// Some reaction is only box-checked (or fails) for regularity.
    pub regularity_assumed: bool,
    /// Box bound on which raw propensities were checked for nonnegativity.
    pub nonnegativity_checked_on_box: Option<i64>,
    pub negative_propensities: Vec<NegativePropensity>,
    /// Reactions whose criticality used the absolute-coefficient polynomial.
    pub sign_mixed_reactions: Vec<String>,
    pub norm: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeciesEntry {
    pub species: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<ExactValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<ExactValue>>,
    /// Counting-sequence threshold: from any `x >= threshold` the witness
    /// firings stay on the lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Vec<i64>>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub critical_species: Vec<String>,
    pub noncritical_species: Vec<String>,
    pub critical_reactions: Vec<String>,
    pub noncritical_reactions: Vec<String>,
    /// Rows of `nu^c`.
    pub nu_c: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayJson {
    pub ineq: Vec<ExactValue>,
    pub eq: Vec<ExactValue>,
}

impl From<&DualRay> for RayJson {
    fn from(r: &DualRay) -> Self {
        RayJson {
            ineq: exact_vec_rat(&r.ineq),
            eq: exact_vec_rat(&r.eq),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub theorem: String,
    /// Species indexed by `gamma`, in order.
    pub gamma_species: Vec<String>,
    pub gamma: Vec<ExactValue>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_exp: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_norm: Option<Vec<ExactValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_drift_reactions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub verified: bool,
    pub spot_checks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremSection {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<RayJson>,
}

impl TheoremSection {
    fn refused(status: &str, reason: String, ray: Option<&DualRay>) -> Self {
        TheoremSection {
            status: status.to_string(),
            certificate: None,
            reason: Some(reason),
            ray: ray.map(RayJson::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub master_seed: Option<u64>,
    pub network: NetworkSummary,
    pub properness: Vec<ProperEntry>,
    pub regularity_box: i64,
    pub regularity: Vec<RegularityEntry>,
    pub assumptions: Assumptions,
    pub boundedness: Vec<SpeciesEntry>,
    pub partition: PartitionSummary,
    pub theorem1: TheoremSection,
    pub theorem2: TheoremSection,
    pub theorem3: TheoremSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<EnsembleStats>,
}

fn names(all: &[String], idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| all[i].clone()).collect()
}

fn t1_section(net: &ReactionNetwork, part: &CriticalPartition) -> TheoremSection {
    match check_theorem1(net, part) {
        Theorem1Outcome::Certified(c) => {
            let verified = verify_theorem1(net, part, &c);
            TheoremSection {
                status: if c.vacuous { "VACUOUS" } else { "FEASIBLE" }.to_string(),
                certificate: Some(moment_json(net, &c, &part.critical_species, verified)),
                reason: c
                    .vacuous
                    .then(|| "no critical reactions; every moment grows at most exponentially".to_string()),
                ray: None,
            }
        }
        Theorem1Outcome::Infeasible(ray) => TheoremSection::refused(
            "INFEASIBLE",
            "no gamma >= 1 on the critical species with gamma^T nu^c <= 0".to_string(),
            Some(&ray),
        ),
    }
}

fn moment_json(net: &ReactionNetwork, c: &MomentCertificate, species: &[usize], verified: bool) -> CertificateJson {
    let reaction_names: Vec<String> = net.reactions().iter().map(|r| r.name.clone()).collect();
    CertificateJson {
        theorem: match c.theorem {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
        }
        .to_string(),
        gamma_species: names(net.species_names(), species),
        gamma: exact_vec_rat(&c.gamma),
        c: c.constant.as_ref().map(ExactValue::from),
        alpha_exp: None,
        r_min: None,
        full_norm: c.full_norm.as_deref().map(exact_vec_int),
        zero_drift_reactions: (c.theorem == Theorem::T2).then(|| names(&reaction_names, &c.zero_drift_reactions)),
        notes: None,
        verified,
        spot_checks: c.spot_checks,
    }
}

fn inapplicable_section(net: &ReactionNetwork, i: &Inapplicable) -> TheoremSection {
    let mut reason = i.reason.clone();
    if !i.high_degree_reactions.is_empty() {
        let names: Vec<&str> = i
            .high_degree_reactions
            .iter()
            .map(|&j| net.reactions()[j].name.as_str())
            .collect();
        let _ = write!(reason, " [degree > 2: {}]", names.join(", "));
    }
    TheoremSection::refused("INAPPLICABLE", reason, i.ray.as_ref())
}

fn t2_section(net: &ReactionNetwork) -> TheoremSection {
    match check_theorem2(net) {
        Theorem2Outcome::Certified(c) => {
            let verified = verify_theorem2(net, &c);
            let all: Vec<usize> = (0..net.n_species()).collect();
            TheoremSection {
                status: "CERTIFIED".to_string(),
                certificate: Some(moment_json(net, &c, &all, verified)),
                reason: None,
                ray: None,
            }
        }
        Theorem2Outcome::Inapplicable(i) => inapplicable_section(net, &i),
    }
}

fn blowup_json(net: &ReactionNetwork, c: &BlowupCertificate, verified: bool) -> CertificateJson {
    CertificateJson {
        theorem: "T3".to_string(),
        gamma_species: net.species_names().to_vec(),
        gamma: exact_vec_rat(&c.gamma),
        c: Some(ExactValue::from(&c.constant)),
        alpha_exp: Some(c.alpha_exp),
        r_min: Some(c.r_min),
        full_norm: None,
        zero_drift_reactions: None,
        notes: Some(c.notes.clone()),
        verified,
        spot_checks: c.spot_checks,
    }
}

fn t3_section(net: &ReactionNetwork, init: Option<&[i64]>) -> TheoremSection {
    let Some(x0) = init else {
        return TheoremSection::refused(
            "SKIPPED",
            "no initial state (use --init or an init line)".to_string(),
            None,
        );
    };
    match check_theorem3(net, x0) {
        Theorem3Outcome::Certified(c) => {
            let verified = verify_theorem3(net, x0, &c);
            TheoremSection {
                status: "CERTIFIED".to_string(),
                certificate: Some(blowup_json(net, &c, verified)),
                reason: None,
                ray: None,
            }
        }
        Theorem3Outcome::Inapplicable(i) => inapplicable_section(net, &i),
    }
}

fn species_entries(net: &ReactionNetwork, part: &CriticalPartition) -> Vec<SpeciesEntry> {
    let nu = net.stoich();
    part.species_outcomes
        .iter()
        .zip(net.species_names())
        .map(|(o, s)| match o {
            SpeciesBoundedness::Bounded(c) => SpeciesEntry {
                species: s.clone(),
                verdict: "BOUNDED".to_string(),
                alpha: Some(exact_vec_int(&c.alpha)),
                witness: None,
                threshold: None,
                verified: o.verify(nu),
            },
            SpeciesBoundedness::Unbounded(w) => {
                let (x_bar, _) = unboundedness_threshold(nu, &w.w);
                SpeciesEntry {
                    species: s.clone(),
                    verdict: "UNBOUNDED".to_string(),
                    alpha: None,
                    witness: Some(exact_vec_int(&w.w)),
                    threshold: Some(x_bar),
                    verified: o.verify(nu),
                }
            }
        })
        .collect()
}

/// Runs every check on a proper network. `init` overrides the file's
/// initial state for the blow-up check.
pub fn analyze(net: &ReactionNetwork, init: Option<&[i64]>, box_bound: i64) -> AnalysisReport {
    let species = net.species_names();
    let reaction_names: Vec<String> = net.reactions().iter().map(|r| r.name.clone()).collect();
    let regularity = check_regularity(net, box_bound);
    let has_raw = net.reactions().iter().any(|r| !r.is_mass_action());
    let negative_propensities = check_nonnegativity(net, box_bound)
        .into_iter()
        .enumerate()
        .filter_map(|(j, s)| {
            s.map(|state| NegativePropensity {
                reaction: reaction_names[j].clone(),
                state,
            })
        })
        .collect();
    let part = classify(net);
    let init = init.or(net.init.as_deref());
    AnalysisReport {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        master_seed: None,
        network: NetworkSummary::of(net),
        properness: properness_entries(net),
        regularity_box: box_bound,
        assumptions: Assumptions {
            regularity_assumed: regularity
                .iter()
                .any(|v| !matches!(v, RegularityVerdict::RegularAnalytic)),
            nonnegativity_checked_on_box: has_raw.then_some(box_bound),
            negative_propensities,
            sign_mixed_reactions: names(&reaction_names, &part.sign_mixed_reactions),
            norm: "l1".to_string(),
        },
        regularity: regularity
            .into_iter()
            .zip(&reaction_names)
            .map(|(verdict, r)| RegularityEntry {
                reaction: r.clone(),
                verdict,
            })
            .collect(),
        boundedness: species_entries(net, &part),
        partition: PartitionSummary {
            critical_species: names(species, &part.critical_species),
            noncritical_species: names(species, &part.noncritical_species),
            critical_reactions: names(&reaction_names, &part.critical_reactions),
            noncritical_reactions: names(&reaction_names, &part.noncritical_reactions),
            nu_c: part.nuc.rows_vec(),
        },
        theorem1: t1_section(net, &part),
        theorem2: t2_section(net),
        theorem3: t3_section(net, init),
        simulation: None,
    }
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn list_or_none(v: &[String]) -> String {
    if v.is_empty() {
        "(none)".to_string()
    } else {
        v.join(", ")
    }
}

fn render_theorem(out: &mut String, label: &str, t: &TheoremSection) {
    let _ = writeln!(out, "{label}: {}", t.status);
    if let Some(c) = &t.certificate {
        let _ = writeln!(out, "  gamma ({}) = ({})", c.gamma_species.join(", "), join(&c.gamma));
        if let Some(v) = &c.c {
            let _ = writeln!(out, "  C = {v}");
        }
        if let Some(a) = c.alpha_exp {
            let _ = writeln!(out, "  alpha_exp = {a}");
        }
        if let Some(r) = c.r_min {
            let _ = writeln!(
                out,
                "  r_min = {r} (moments of order >= {r} are infinite at some finite time)"
            );
        }
        if let Some(n) = &c.full_norm {
            let _ = writeln!(out, "  weighted norm = ({})", join(n));
        }
        if let Some(z) = &c.zero_drift_reactions {
            let _ = writeln!(out, "  zero-drift reactions: {}", list_or_none(z));
        }
        if let Some(n) = &c.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        let _ = writeln!(out, "  verified: {}, spot checks: {}", c.verified, c.spot_checks);
    }
    if let Some(r) = &t.reason {
        let _ = writeln!(out, "  reason: {r}");
    }
    if let Some(ray) = &t.ray {
        let _ = writeln!(
            out,
            "  Farkas multipliers: ineq ({}) eq ({})",
            join(&ray.ineq),
            join(&ray.eq)
        );
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> serde_json::Result<Self> {
        serde_json::from_str(src)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.tool, self.version);
        if let Some(seed) = self.master_seed {
            let _ = writeln!(out, "master seed: {seed}");
        }
        let n = &self.network;
        let _ = writeln!(
            out,
            "network: {} species, {} reactions",
            n.species.len(),
            n.reactions.len()
        );
        for r in &n.reactions {
            let _ = writeln!(
                out,
                "  {}: jump ({}), {} {}",
                r.name,
                join(&r.jump),
                r.kind,
                r.propensity
            );
        }
        if let Some(x0) = &n.init {
            let _ = writeln!(out, "  init ({})", join(x0));
        }
        let _ = writeln!(out, "properness:");
        for p in &self.properness {
            match (&p.species, &p.witness) {
                (Some(s), Some(w)) => {
                    let _ = writeln!(
                        out,
                        "  reaction {}: {} (species {s}, at x = ({}))",
                        p.reaction,
                        p.verdict,
                        join(w)
                    );
                }
                _ => {
                    let _ = writeln!(out, "  reaction {}: {}", p.reaction, p.verdict);
                }
            }
        }
        let _ = writeln!(out, "regularity (box 0..={}):", self.regularity_box);
        for r in &self.regularity {
            let v = match &r.verdict {
                RegularityVerdict::RegularAnalytic => "REGULAR".to_string(),
                RegularityVerdict::RegularOnBox { .. } => "REGULAR_ON_BOX".to_string(),
                RegularityVerdict::Violation { count, examples, .. } => format!(
                    "VIOLATION ({count} states, e.g. ({}))",
                    examples.first().map(|e| join(&e.state)).unwrap_or_default()
                ),
            };
            let _ = writeln!(out, "  reaction {}: {v}", r.reaction);
        }
        let a = &self.assumptions;
        let _ = writeln!(out, "assumptions:");
        let _ = writeln!(out, "  regularity assumed: {}", a.regularity_assumed);
        match a.nonnegativity_checked_on_box {
            Some(b) => {
                let _ = writeln!(out, "  nonnegativity checked on box 0..={b}");
            }
            None => {
                let _ = writeln!(out, "  nonnegativity: mass action");
            }
        }
        for np in &a.negative_propensities {
            let _ = writeln!(
                out,
                "  NEGATIVE propensity: reaction {} at ({})",
                np.reaction,
                join(&np.state)
            );
        }
        if !a.sign_mixed_reactions.is_empty() {
            let _ = writeln!(
                out,
                "  sign-mixed propensities (conservative criticality): {}",
                a.sign_mixed_reactions.join(", ")
            );
        }
        let _ = writeln!(out, "  norm: {}", a.norm);
        let _ = writeln!(out, "boundedness:");
        for s in &self.boundedness {
            let detail = match (&s.alpha, &s.witness) {
                (Some(al), _) => format!("alpha = ({})", join(al)),
                (_, Some(w)) => format!(
                    "witness w = ({}), threshold ({})",
                    join(w),
                    s.threshold.as_deref().map(join).unwrap_or_default()
                ),
                _ => String::new(),
            };
            let _ = writeln!(
                out,
                "  species {}: {} {detail} [verified: {}]",
                s.species, s.verdict, s.verified
            );
        }
        let p = &self.partition;
        let _ = writeln!(out, "critical partition:");
        let _ = writeln!(out, "  critical species: {}", list_or_none(&p.critical_species));
        let _ = writeln!(out, "  non-critical species: {}", list_or_none(&p.noncritical_species));
        let _ = writeln!(out, "  critical reactions: {}", list_or_none(&p.critical_reactions));
        let _ = writeln!(
            out,
            "  non-critical reactions: {}",
            list_or_none(&p.noncritical_reactions)
        );
        render_theorem(&mut out, "T1", &self.theorem1);
        render_theorem(&mut out, "T2", &self.theorem2);
        render_theorem(&mut out, "T3", &self.theorem3);
        if let Some(sim) = &self.simulation {
            let _ = writeln!(
                out,
                "simulation: {} trajectories, seed {}, event cap {}, norm {}",
                sim.n_traj, sim.master_seed, sim.event_cap, sim.norm
            );
            let sc = &sim.status_counts;
            let _ = writeln!(
                out,
                "  absorbed {}, time reached {}, censored {}",
                sc.absorbed, sc.time_reached, sc.censored
            );
            for row in &sim.rows {
                let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6e}"));
                let _ = writeln!(
                    out,
                    "  t={} r={} mean={} se={} n={} censored={:.4}{}",
                    row.t,
                    row.r,
                    fmt(row.mean),
                    fmt(row.stderr),
                    row.n_effective,
                    row.censored_frac,
                    if row.biased_low { " (biased low)" } else { "" }
                );
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessState {
    pub state: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessReport {
    pub tool: String,
    pub version: String,
    pub init: Vec<i64>,
    pub caps: ExplorationCaps,
    /// `COMPLETE` when the frontier was exhausted within the caps, else `SAMPLE`.
    pub label: String,
    pub frontier_exhausted: bool,
    pub cap_hit: bool,
    pub regularity_assumed: bool,
    pub states: Vec<AccessState>,
}

pub fn access(net: &ReactionNetwork, x0: &[i64], caps: ExplorationCaps, witness: bool, box_bound: i64) -> AccessReport {
    let sample: AccessibleSetSample = explore_accessible(net, x0, caps);
    let regularity_assumed = check_regularity(net, box_bound)
        .iter()
        .any(|v| !matches!(v, RegularityVerdict::RegularAnalytic));
    let states = sample
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| AccessState {
            state: s.clone(),
            path: witness.then(|| {
                sample
                    .path_to(k)
                    .into_iter()
                    .map(|j| net.reactions()[j].name.clone())
                    .collect()
            }),
        })
        .collect();
    AccessReport {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        init: x0.to_vec(),
        caps,
        label: if sample.is_complete() { "COMPLETE" } else { "SAMPLE" }.to_string(),
        frontier_exhausted: sample.frontier_exhausted,
        cap_hit: sample.cap_hit,
        regularity_assumed,
        states,
    }
}

impl AccessReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} states from ({}), frontier {}",
            self.label,
            self.states.len(),
            join(&self.init),
            if self.frontier_exhausted {
                "exhausted"
            } else {
                "open (cap hit)"
            }
        );
        if self.regularity_assumed {
            let _ = writeln!(out, "note: regularity assumed (box-checked only)");
        }
        for s in &self.states {
            match &s.path {
                Some(p) if p.is_empty() => {
                    let _ = writeln!(out, "  ({})  <- initial", join(&s.state));
                }
                Some(p) => {
                    let _ = writeln!(out, "  ({})  <- {}", join(&s.state), p.join(" "));
                }
                None => {
                    let _ = writeln!(out, "  ({})", join(&s.state));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn example2_report() {
        let r = analyze(&catalog::example2(), None, 10);
        assert!(r.boundedness.iter().all(|s| s.verdict == "UNBOUNDED" && s.verified));
        assert_eq!(
            r.boundedness[0].witness,
            Some(vec![ExactValue::Int(2), ExactValue::Int(3)])
        );
        assert_eq!(r.partition.critical_reactions, vec!["r1"]);
        assert_eq!(r.theorem1.status, "FEASIBLE");
        assert!(r.theorem1.certificate.as_ref().unwrap().verified);
        assert_eq!(r.theorem3.status, "SKIPPED");
    }

    #[test]
    fn example5_report() {
        let r = analyze(&catalog::example5(), Some(&[1, 1]), 10);
        assert_eq!(r.theorem1.status, "INFEASIBLE");
        assert_eq!(r.theorem2.status, "INAPPLICABLE");
        assert_eq!(r.theorem3.status, "CERTIFIED");
        let c = r.theorem3.certificate.as_ref().unwrap();
        assert_eq!(c.gamma, vec![ExactValue::Int(2), ExactValue::Int(3)]);
        assert_eq!(c.c, Some(ExactValue::Text("1/2".into())));
        assert_eq!((c.alpha_exp, c.r_min, c.verified), (Some(2), Some(2), true));
        let json = r.to_json();
        assert!(json.contains("\"C\": \"1/2\""));
        assert_eq!(AnalysisReport::from_json(&json).unwrap(), r);
    }

    #[test]
    fn conversion_report() {
        let r = analyze(
            &catalog::conversion_pair(crate::rational::rat(1), crate::rational::rat(1)),
            None,
            10,
        );
        for s in &r.boundedness {
            assert_eq!(s.verdict, "BOUNDED");
            assert_eq!(s.alpha, Some(vec![ExactValue::Int(1), ExactValue::Int(1)]));
        }
        assert_eq!(r.theorem1.status, "VACUOUS");
        assert!(!r.assumptions.regularity_assumed);
    }

    #[test]
    fn access_labels() {
        let a = access(&catalog::example1(), &[1, 1], ExplorationCaps::default(), true, 10);
        assert_eq!(a.label, "COMPLETE");
        assert_eq!(a.states.len(), 1);
        let caps = ExplorationCaps {
            max_states: 100,
            max_coord: 1000,
        };
        let a = access(&catalog::example2(), &[10, 10], caps, false, 10);
        assert_eq!(a.label, "SAMPLE");
        assert!(a.to_text().starts_with("SAMPLE: 100 states"));
    }
}
